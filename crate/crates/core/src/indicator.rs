//! Troubled-cell indicator on cell-average density.
//!
//! A cell is troubled when the density jumps to its four face neighbors,
//! measured relative to the largest density in the five-cell stencil,
//! exceed a threshold `K`. Only cell averages enter, so the indicator is
//! dimensionless, zero on locally constant data and invariant under a
//! uniform rescaling of the density field.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::CellField;
use crate::mesh::CellIndex;
use crate::scalar::Real;

/// Cells flagged for limiting, defined on interior cells only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TroubledMask {
    nx: usize,
    ny: usize,
    flags: Vec<bool>,
    count: usize,
}

impl TroubledMask {
    pub fn from_flags(nx: usize, ny: usize, flags: Vec<bool>) -> Self {
        assert_eq!(flags.len(), nx * ny, "mask size must match the interior");
        let count = flags.iter().filter(|&&f| f).count();
        Self {
            nx,
            ny,
            flags,
            count,
        }
    }

    pub fn none(nx: usize, ny: usize) -> Self {
        Self::from_flags(nx, ny, vec![false; nx * ny])
    }

    pub fn all(nx: usize, ny: usize) -> Self {
        Self::from_flags(nx, ny, vec![true; nx * ny])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Number of flagged cells.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    #[inline]
    pub fn is_flagged(&self, i: usize, j: usize) -> bool {
        self.flags[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let slot = &mut self.flags[j * self.nx + i];
        match (*slot, value) {
            (false, true) => self.count += 1,
            (true, false) => self.count -= 1,
            _ => {}
        }
        *slot = value;
    }

    /// True when every cell flagged here is also flagged in `other`.
    pub fn is_subset_of(&self, other: &TroubledMask) -> bool {
        self.flags.len() == other.flags.len()
            && self.flags.iter().zip(&other.flags).all(|(&a, &b)| !a || b)
    }

    /// Flagged cells in row-major order.
    pub fn flagged_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(k, _)| CellIndex::new((k % self.nx) as isize, (k / self.nx) as isize))
    }
}

/// Normalization of the summed neighbor jumps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IndicatorFormula {
    /// `sum |rho_k - rho_i| / (n * max(rho))`: mean jump over the `n` face
    /// neighbors relative to the stencil maximum.
    #[default]
    MeanJump,
    /// `sum |rho_k - rho_i| / max(rho)`: summed jump, the direct cell-average
    /// reduction of the DG indicator it is adapted from.
    SummedJump,
}

impl IndicatorFormula {
    pub fn name(&self) -> &'static str {
        match self {
            IndicatorFormula::MeanJump => "mean_jump",
            IndicatorFormula::SummedJump => "summed_jump",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndicatorConfig<T> {
    pub k_threshold: T,
    pub formula: IndicatorFormula,
}

impl<T: Real> IndicatorConfig<T> {
    pub fn new(k_threshold: T) -> Result<Self> {
        if !(k_threshold > T::zero()) || !k_threshold.is_finite() {
            return Err(Error::OutOfRange(format!(
                "threshold constant K must be positive, got {k_threshold}"
            )));
        }
        Ok(Self {
            k_threshold,
            formula: IndicatorFormula::default(),
        })
    }

    pub fn with_formula(mut self, formula: IndicatorFormula) -> Self {
        self.formula = formula;
        self
    }
}

#[inline]
fn indicator_unchecked<T: Real>(center: T, neighbors: &[T], formula: IndicatorFormula) -> T {
    let mut jump = T::zero();
    let mut scale = center;
    for &rho in neighbors {
        jump = jump + (rho - center).abs();
        scale = scale.max(rho);
    }
    match formula {
        IndicatorFormula::MeanJump => jump / (T::from_usize(neighbors.len()).unwrap() * scale),
        IndicatorFormula::SummedJump => jump / scale,
    }
}

/// Indicator value of a cell from its density average and those of its
/// face neighbors, with the default [`IndicatorFormula`].
pub fn indicator_value<T: Real>(center: T, neighbors: &[T]) -> Result<T> {
    indicator_value_with(center, neighbors, IndicatorFormula::default())
}

pub fn indicator_value_with<T: Real>(
    center: T,
    neighbors: &[T],
    formula: IndicatorFormula,
) -> Result<T> {
    if !(2..=4).contains(&neighbors.len()) {
        return Err(Error::OutOfRange(format!(
            "indicator stencil needs 2 to 4 neighbors, got {}",
            neighbors.len()
        )));
    }
    if let Some(&bad) = std::iter::once(&center)
        .chain(neighbors)
        .find(|&&rho| !(rho > T::zero()))
    {
        return Err(Error::InadmissibleState {
            rho: bad.to_f64_lossy(),
            pressure: f64::NAN,
            context: "indicator stencil density".into(),
        });
    }
    Ok(indicator_unchecked(center, neighbors, formula))
}

/// Indicator value of every interior cell, row-major. Ghost layers must be
/// filled so each cell sees four neighbors.
pub fn indicator_values<T: Real>(
    field: &CellField<T>,
    formula: IndicatorFormula,
) -> Result<Vec<T>> {
    let mesh = field.mesh();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let states = field.states();
    let mut out = vec![T::zero(); nx * ny];
    out.par_chunks_mut(nx)
        .enumerate()
        .try_for_each(|(j, row)| -> Result<()> {
            let j = j as isize;
            for (i, slot) in row.iter_mut().enumerate() {
                let idx = CellIndex::new(i as isize, j);
                let center = states[mesh.offset(idx.i, idx.j)].rho;
                let nb = mesh
                    .neighbors(idx)
                    .map(|n| states[mesh.offset(n.i, n.j)].rho);
                *slot = indicator_value_with(center, &nb, formula).map_err(|e| match e {
                    Error::InadmissibleState { rho, pressure, .. } => Error::InadmissibleState {
                        rho,
                        pressure,
                        context: format!("indicator at cell ({}, {j})", i),
                    },
                    other => other,
                })?;
            }
            Ok(())
        })?;
    Ok(out)
}

/// Flags every interior cell whose indicator value strictly exceeds `K`.
pub fn flag_troubled_cells<T: Real>(
    field: &CellField<T>,
    config: &IndicatorConfig<T>,
) -> Result<TroubledMask> {
    let values = indicator_values(field, config.formula)?;
    Ok(mask_from_values(
        field.mesh().nx(),
        field.mesh().ny(),
        &values,
        config.k_threshold,
    ))
}

/// Thresholds precomputed indicator values with `value > k`.
pub fn mask_from_values<T: Real>(nx: usize, ny: usize, values: &[T], k: T) -> TroubledMask {
    TroubledMask::from_flags(nx, ny, values.iter().map(|&v| v > k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{ConservedState, GasModel, PrimitiveState};
    use crate::mesh::{build_mesh, Bounds};
    use proptest::prelude::*;

    #[test]
    fn constant_data_gives_zero() {
        assert_eq!(indicator_value(1.0, &[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(indicator_value(7.3, &[7.3, 7.3]).unwrap(), 0.0);
    }

    #[test]
    fn oblique_shock_jump_is_flagged_at_largest_threshold() {
        let v = indicator_value(1.0f64, &[1.0, 2.5592, 1.0, 1.0]).unwrap();
        assert!((v - 1.5592 / (4.0 * 2.5592)).abs() < 1e-15);
        assert!(v > 0.1);
        let s = indicator_value_with(
            1.0f64,
            &[1.0, 2.5592, 1.0, 1.0],
            IndicatorFormula::SummedJump,
        )
        .unwrap();
        assert!((s - 4.0 * v).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_density_and_bad_stencils() {
        assert!(matches!(
            indicator_value(1.0, &[1.0, 0.0, 1.0, 1.0]),
            Err(Error::InadmissibleState { .. })
        ));
        assert!(indicator_value(-1.0, &[1.0, 1.0]).is_err());
        assert!(indicator_value(1.0, &[1.0]).is_err());
        assert!(IndicatorConfig::new(0.0).is_err());
    }

    #[test]
    fn strict_threshold() {
        let v = indicator_value(1.0f64, &[2.0, 1.0, 1.0, 1.0]).unwrap();
        let m = mask_from_values(1, 1, &[v], v);
        assert_eq!(m.count(), 0);
        let m = mask_from_values(1, 1, &[v], v * 0.999);
        assert_eq!(m.count(), 1);
    }

    fn field_from_density(nx: usize, ny: usize, rho: impl Fn(f64, f64) -> f64) -> CellField<f64> {
        let gas = GasModel::air();
        let mesh = build_mesh(nx, ny, Bounds::unit_square()).unwrap();
        CellField::from_fn(mesh, |x, y| {
            PrimitiveState::new(rho(x, y), 0.0, 0.0, 1.0).to_conserved_unchecked(&gas)
        })
    }

    #[test]
    fn uniform_field_has_no_troubled_cells() {
        let f = CellField::uniform(
            build_mesh(10, 10, Bounds::unit_square()).unwrap(),
            ConservedState::new(2.0, 0.1, 0.0, 3.0),
        );
        for k in [1e-6, 0.02, 0.05, 0.1] {
            assert_eq!(
                flag_troubled_cells(&f, &IndicatorConfig::new(k).unwrap())
                    .unwrap()
                    .count(),
                0
            );
        }
    }

    #[test]
    fn flags_only_cells_beside_a_jump() {
        let f = field_from_density(20, 10, |x, _| if x < 0.5 { 1.0 } else { 2.5 });
        let m = flag_troubled_cells(&f, &IndicatorConfig::new(0.05).unwrap()).unwrap();
        assert_eq!(m.count(), 20);
        assert!(m.flagged_cells().all(|c| c.i == 9 || c.i == 10));
    }

    #[test]
    fn mask_counter_tracks_flags() {
        let mut m = TroubledMask::none(3, 3);
        m.set(1, 1, true);
        m.set(1, 1, true);
        m.set(2, 0, true);
        assert_eq!(m.count(), 2);
        m.set(1, 1, false);
        assert_eq!(m.count(), 1);
        assert_eq!(
            m.flagged_cells().collect::<Vec<_>>(),
            vec![CellIndex::new(2, 0)]
        );
    }

    fn wavy(x: f64, y: f64) -> f64 {
        1.0 + 0.5 * (9.0 * x).sin() * (7.0 * y).cos() + if x + 0.3 * y > 0.6 { 1.2 } else { 0.0 }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn mask_is_scale_invariant(c in 1e-3f64..1e3, k in 0.005f64..0.2) {
            let base = field_from_density(16, 12, wavy);
            let scaled = field_from_density(16, 12, |x, y| c * wavy(x, y));
            let cfg = IndicatorConfig::new(k).unwrap();
            prop_assert_eq!(
                flag_troubled_cells(&base, &cfg).unwrap(),
                flag_troubled_cells(&scaled, &cfg).unwrap()
            );
        }

        #[test]
        fn masks_nest_as_k_grows(k1 in 0.001f64..0.2, dk in 0.0f64..0.2) {
            let f = field_from_density(16, 12, wavy);
            let lo = flag_troubled_cells(&f, &IndicatorConfig::new(k1).unwrap()).unwrap();
            let hi = flag_troubled_cells(&f, &IndicatorConfig::new(k1 + dk).unwrap()).unwrap();
            prop_assert!(hi.is_subset_of(&lo));
            prop_assert!(hi.count() <= lo.count());
        }

        #[test]
        fn flag_depends_only_on_five_cell_stencil(pi in 0usize..16, pj in 0usize..12, bump in 0.1f64..5.0) {
            let f = field_from_density(16, 12, wavy);
            let mut g = f.clone();
            let q = g.get(pi as isize, pj as isize);
            g.set(pi as isize, pj as isize, ConservedState { rho: q.rho + bump, ..q });
            let cfg = IndicatorConfig::new(0.05).unwrap();
            let a = flag_troubled_cells(&f, &cfg).unwrap();
            let b = flag_troubled_cells(&g, &cfg).unwrap();
            for j in 0..12 {
                for i in 0..16 {
                    let dist = (i as isize - pi as isize).abs() + (j as isize - pj as isize).abs();
                    if dist > 1 {
                        prop_assert_eq!(a.is_flagged(i, j), b.is_flagged(i, j));
                    }
                }
            }
        }
    }
}

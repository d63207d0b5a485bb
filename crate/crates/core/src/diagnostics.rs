//! Error metrics of a density profile along a line crossing a shock.
//!
//! Errors are `e = rho_exact - rho_numerical`. Metrics are taken over two
//! windows of `width` cells on either side of the exact shock position, the
//! shock cell itself excluded. A profile that departs monotonically from the
//! exact value has equal total variation and L-infinity norm of the error in
//! each window, so the monotonicity parameter `mu = TV - Linf` (overall
//! values summed over both windows) measures the oscillation content.

use crate::cases::{first_index_at_or_after, CaseDefinition};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::indicator::TroubledMask;
use crate::mesh::CellIndex;
use crate::scalar::Real;

pub const DEFAULT_WINDOW: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct LineProfile<T> {
    pub xs: Vec<T>,
    pub rho_num: Vec<T>,
    pub rho_exact: Vec<T>,
    /// First sample at or after the exact shock crossing.
    pub shock_index: usize,
    /// Pre-shock side lies at smaller x.
    pub upstream_is_left: bool,
}

impl<T: Real> LineProfile<T> {
    pub fn new(
        xs: Vec<T>,
        rho_num: Vec<T>,
        rho_exact: Vec<T>,
        shock_index: usize,
        upstream_is_left: bool,
    ) -> Result<Self> {
        if xs.len() != rho_num.len() || xs.len() != rho_exact.len() {
            return Err(Error::OutOfRange("profile arrays differ in length".into()));
        }
        if xs.is_empty() || shock_index >= xs.len() {
            return Err(Error::OutOfRange(format!(
                "shock index {shock_index} outside profile of {} samples",
                xs.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::OutOfRange(
                "sample coordinates must increase strictly".into(),
            ));
        }
        Ok(Self {
            xs,
            rho_num,
            rho_exact,
            shock_index,
            upstream_is_left,
        })
    }

    /// Samples `field` along the case's sampling line and pairs it with the
    /// exact solution at the same cell centers.
    pub fn from_case(case: &CaseDefinition<T>, field: &CellField<T>) -> Result<Self> {
        let exact = case
            .exact
            .ok_or_else(|| Error::Config(format!("case {} has no exact solution", case.name)))?;
        let y = case
            .sampling_y
            .ok_or_else(|| Error::Config(format!("case {} has no sampling line", case.name)))?;
        let mesh = field.mesh();
        let row = field.sample_density_row(y)?;
        let j = mesh.row_for_y(y)? as isize;
        let (_, y_row) = mesh.cell_center(CellIndex::new(0, j));
        let shock_index =
            first_index_at_or_after(mesh, exact.crossing_x(y_row)).ok_or_else(|| {
                Error::OutOfRange(format!(
                    "exact shock does not cross the sampling row at y = {y_row}"
                ))
            })?;
        let (xs, rho_num): (Vec<T>, Vec<T>) = row.into_iter().unzip();
        let rho_exact = xs.iter().map(|&x| exact.evaluate(x, y_row).rho).collect();
        Self::new(
            xs,
            rho_num,
            rho_exact,
            shock_index,
            exact.upstream_is_left(),
        )
    }
}

/// `e_i = rho_exact_i - rho_num_i`.
pub fn error_profile<T: Real>(profile: &LineProfile<T>) -> Vec<T> {
    profile
        .rho_exact
        .iter()
        .zip(&profile.rho_num)
        .map(|(&a, &b)| a - b)
        .collect()
}

/// Root-mean-square norm `sqrt(sum e_i^2 / N)`.
pub fn l2_norm<T: Real>(e: &[T]) -> Result<T> {
    if e.is_empty() {
        return Err(Error::EmptyInput("L2 norm"));
    }
    let sum = e.iter().fold(T::zero(), |acc, &x| acc + x * x);
    Ok((sum / T::from_usize(e.len()).unwrap()).sqrt())
}

pub fn linf_norm<T: Real>(e: &[T]) -> Result<T> {
    if e.is_empty() {
        return Err(Error::EmptyInput("Linf norm"));
    }
    Ok(e.iter().fold(T::zero(), |acc, &x| acc.max(x.abs())))
}

/// `sum |e_{i+1} - e_i|`.
pub fn total_variation<T: Real>(e: &[T]) -> Result<T> {
    if e.len() < 2 {
        return Err(Error::EmptyInput("total variation"));
    }
    Ok(e.windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).abs()))
}

/// Index windows of `width` cells upstream and downstream of the shock
/// cell, each ordered by increasing x. The shock cell belongs to neither.
pub fn shock_windows<T: Real>(
    profile: &LineProfile<T>,
    width: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let s = profile.shock_index;
    let n = profile.xs.len();
    let (left, right) = (s, n - s - 1);
    let (upstream, downstream) = if profile.upstream_is_left {
        (left, right)
    } else {
        (right, left)
    };
    if width == 0 || left < width || right < width {
        return Err(Error::Window {
            width,
            upstream,
            downstream,
        });
    }
    let before: Vec<usize> = (s - width..s).collect();
    let after: Vec<usize> = (s + 1..=s + width).collect();
    Ok(if profile.upstream_is_left {
        (before, after)
    } else {
        (after, before)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionMetrics<T> {
    pub l2: T,
    pub linf: T,
    pub tv: T,
    pub cell_count: usize,
}

impl<T: Real> RegionMetrics<T> {
    pub fn from_errors(e: &[T]) -> Result<Self> {
        Ok(Self {
            l2: l2_norm(e)?,
            linf: linf_norm(e)?,
            tv: total_variation(e)?,
            cell_count: e.len(),
        })
    }

    /// `TV - Linf` of this region alone.
    pub fn mu(&self) -> T {
        self.tv - self.linf
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockLineReport<T> {
    pub pre: RegionMetrics<T>,
    pub post: RegionMetrics<T>,
    /// Sum of the regional L-infinity norms.
    pub overall_linf: T,
    /// Sum of the regional total variations.
    pub overall_tv: T,
    pub mu: T,
}

impl<T: Real> ShockLineReport<T> {
    /// Combines regional metrics: overall values are the pre + post sums and
    /// `mu = overall_tv - overall_linf`.
    pub fn from_regions(pre: RegionMetrics<T>, post: RegionMetrics<T>) -> Self {
        let overall_linf = pre.linf + post.linf;
        let overall_tv = pre.tv + post.tv;
        Self {
            pre,
            post,
            overall_linf,
            overall_tv,
            mu: overall_tv - overall_linf,
        }
    }
}

fn gather<T: Real>(e: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&k| e[k]).collect()
}

pub fn monotonicity_report<T: Real>(
    profile: &LineProfile<T>,
    width: usize,
) -> Result<ShockLineReport<T>> {
    let (pre, post) = shock_windows(profile, width)?;
    let e = error_profile(profile);
    Ok(ShockLineReport::from_regions(
        RegionMetrics::from_errors(&gather(&e, &pre))?,
        RegionMetrics::from_errors(&gather(&e, &post))?,
    ))
}

/// L2 and L-infinity norms over the concatenated pre + post windows.
pub fn l2_linf_window_report<T: Real>(profile: &LineProfile<T>, width: usize) -> Result<(T, T)> {
    let (pre, post) = shock_windows(profile, width)?;
    let e = error_profile(profile);
    let mut both = gather(&e, &pre);
    both.extend(gather(&e, &post));
    Ok((l2_norm(&both)?, linf_norm(&both)?))
}

/// Flagged cells on the upstream and downstream side of the exact shock,
/// by cell center. `None` for cases without an exact solution.
pub fn flagged_by_shock_side<T: Real>(
    case: &CaseDefinition<T>,
    mask: &TroubledMask,
) -> Option<(usize, usize)> {
    let exact = case.exact.as_ref()?;
    let (mut pre, mut post) = (0, 0);
    for idx in mask.flagged_cells() {
        let (x, y) = case.mesh.cell_center(idx);
        if exact.is_post_shock(x, y) {
            post += 1;
        } else {
            pre += 1;
        }
    }
    Some((pre, post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(
        n: usize,
        shock: usize,
        num: impl Fn(usize) -> f64,
        exact: impl Fn(usize) -> f64,
    ) -> LineProfile<f64> {
        LineProfile::new(
            (0..n).map(|i| i as f64 * 0.01).collect(),
            (0..n).map(num).collect(),
            (0..n).map(exact).collect(),
            shock,
            true,
        )
        .unwrap()
    }

    #[test]
    fn error_sign_convention() {
        let p =
            LineProfile::new(vec![0.0, 1.0], vec![0.9f64, 1.2], vec![1.0, 1.0], 0, true).unwrap();
        let e = error_profile(&p);
        assert!((e[0] - 0.1).abs() < 1e-15 && (e[1] + 0.2).abs() < 1e-15);
        let same =
            LineProfile::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 2.0], 0, true).unwrap();
        assert_eq!(error_profile(&same), vec![0.0, 0.0]);
    }

    #[test]
    fn norm_examples() {
        assert!((l2_norm(&[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(l2_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((l2_norm(&[-6.0, 8.0]).unwrap() - 2.0 * 12.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(linf_norm(&[0.1, -0.2]).unwrap(), 0.2);
        assert_eq!(linf_norm(&[-0.2, 0.1]).unwrap(), 0.2);
        assert_eq!(linf_norm(&[0.0; 3]).unwrap(), 0.0);
        assert!(matches!(l2_norm::<f64>(&[]), Err(Error::EmptyInput(_))));
        assert!(linf_norm::<f64>(&[]).is_err());
    }

    #[test]
    fn total_variation_examples() {
        assert!((total_variation(&[0.0f64, 0.5, 0.2]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(total_variation(&[0.0, 0.1, 0.3, 0.7]).unwrap(), 0.7);
        assert_eq!(total_variation(&[2.0; 5]).unwrap(), 0.0);
        assert!(total_variation(&[1.0]).is_err());
    }

    #[test]
    fn window_indexing() {
        let p = profile(100, 50, |_| 1.0, |_| 1.0);
        let (pre, post) = shock_windows(&p, 20).unwrap();
        assert_eq!(pre, (30..50).collect::<Vec<_>>());
        assert_eq!(post, (51..71).collect::<Vec<_>>());

        let p = profile(100, 10, |_| 1.0, |_| 1.0);
        assert!(matches!(
            shock_windows(&p, DEFAULT_WINDOW),
            Err(Error::Window {
                upstream: 10,
                downstream: 89,
                ..
            })
        ));

        let mut flipped = profile(100, 50, |_| 1.0, |_| 1.0);
        flipped.upstream_is_left = false;
        let (pre, post) = shock_windows(&flipped, 20).unwrap();
        assert_eq!(pre[0], 51);
        assert_eq!(post[0], 30);
    }

    #[test]
    fn reproduces_tabulated_mu_values() {
        let region = |linf: f64, tv: f64| RegionMetrics {
            l2: 0.0,
            linf,
            tv,
            cell_count: 20,
        };
        let everywhere =
            ShockLineReport::from_regions(region(0.561910, 0.561910), region(0.199483, 0.199641));
        assert!((everywhere.mu - 0.000158).abs() < 1e-9);
        let restricted =
            ShockLineReport::from_regions(region(0.498884, 1.090482), region(0.204351, 0.355214));
        assert!((restricted.overall_tv - 1.445696).abs() < 1e-9);
        assert!((restricted.overall_linf - 0.703235).abs() < 1e-9);
        assert!((restricted.mu - 0.742461).abs() < 1e-9);
    }

    #[test]
    fn window_report_uses_union() {
        let p = profile(
            60,
            30,
            |i| {
                if i >= 30 {
                    2.0 - 0.1 * (i as f64 - 29.0).recip()
                } else {
                    1.0 + 0.01 * i as f64
                }
            },
            |i| if i >= 30 { 2.0 } else { 1.0 },
        );
        let r = monotonicity_report(&p, 20).unwrap();
        let (l2, linf) = l2_linf_window_report(&p, 20).unwrap();
        assert_eq!(linf, r.pre.linf.max(r.post.linf));
        assert!(l2 > 0.0);
        let zero = profile(60, 30, |_| 1.0, |_| 1.0);
        assert_eq!(l2_linf_window_report(&zero, 20).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn monotone_profile_has_zero_mu() {
        // error grows from 0 towards the shock upstream and decays to 0 downstream
        let p = profile(
            61,
            30,
            |i| {
                let d = i as f64 - 30.0;
                if d < 0.0 {
                    1.0 + 0.03 * (d + 10.0).max(0.0)
                } else {
                    2.0 - 0.05 * (10.0 - d).max(0.0)
                }
            },
            |i| if i >= 30 { 2.0 } else { 1.0 },
        );
        let r = monotonicity_report(&p, 20).unwrap();
        assert!(r.pre.mu().abs() < 1e-15 && r.post.mu().abs() < 1e-12);
        assert!(r.mu.abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn tv_bounds_range(e in prop::collection::vec(-5.0f64..5.0, 2..50)) {
            let tv = total_variation(&e).unwrap();
            let max = e.iter().cloned().fold(f64::MIN, f64::max);
            let min = e.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert!(tv >= max - min - 1e-12);
        }

        #[test]
        fn mu_nonnegative_when_each_window_touches_zero(
            pre in prop::collection::vec(-2.0f64..2.0, 19),
            post in prop::collection::vec(-2.0f64..2.0, 19),
            zp in 0usize..20,
            zq in 0usize..20,
        ) {
            let mut a = pre.clone();
            a.insert(zp, 0.0);
            let mut b = post.clone();
            b.insert(zq, 0.0);
            let r = ShockLineReport::from_regions(
                RegionMetrics::from_errors(&a).unwrap(),
                RegionMetrics::from_errors(&b).unwrap(),
            );
            prop_assert!(r.mu >= -1e-12);
        }

        #[test]
        fn metrics_ignore_x_translation(shift in -10.0f64..10.0) {
            let a = profile(50, 25, |i| 1.0 + (i as f64 * 0.7).sin() * 0.1, |i| if i >= 25 { 2.0 } else { 1.0 });
            let mut b = a.clone();
            b.xs.iter_mut().for_each(|x| *x += shift);
            prop_assert_eq!(monotonicity_report(&a, 10).unwrap(), monotonicity_report(&b, 10).unwrap());
        }
    }

    #[test]
    fn flagged_cells_are_split_by_shock_side() {
        let case = crate::cases::aligned_oblique_shock_case::<f64>(20, 20).unwrap();
        let mut mask = TroubledMask::none(20, 20);
        // (0, 0) is upstream near the inflow corner, (19, 19) is downstream
        mask.set(0, 0, true);
        mask.set(19, 19, true);
        mask.set(18, 19, true);
        assert_eq!(flagged_by_shock_side(&case, &mask), Some((1, 2)));
        let riemann = crate::cases::riemann2d_case::<f64>(20, 20).unwrap();
        assert_eq!(flagged_by_shock_side(&riemann, &mask), None);
    }
}

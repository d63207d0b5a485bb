//! Ghost-cell boundary conditions.

use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel, PrimitiveState};
use crate::field::CellField;
use crate::mesh::{CellIndex, Face};
use crate::scalar::Real;

/// Boundary condition on one side of the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryKind<T> {
    /// Fixed state in every ghost cell.
    SupersonicInflow(PrimitiveState<T>),
    /// Zeroth-order extrapolation of the adjacent interior cell.
    SupersonicOutflow,
    /// Exact solution evaluated at each ghost-cell center.
    ExactDirichlet,
    /// Mirror image with the wall-normal velocity reversed.
    SlipWall,
}

impl<T: Real> BoundaryKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryKind::SupersonicInflow(_) => "supersonic_inflow",
            BoundaryKind::SupersonicOutflow => "supersonic_outflow",
            BoundaryKind::ExactDirichlet => "exact_dirichlet",
            BoundaryKind::SlipWall => "slip_wall",
        }
    }
}

/// One boundary condition per side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySet<T> {
    pub west: BoundaryKind<T>,
    pub east: BoundaryKind<T>,
    pub south: BoundaryKind<T>,
    pub north: BoundaryKind<T>,
}

impl<T: Real> BoundarySet<T> {
    pub fn uniform(kind: BoundaryKind<T>) -> Self {
        Self {
            west: kind,
            east: kind,
            south: kind,
            north: kind,
        }
    }

    pub fn side(&self, face: Face) -> BoundaryKind<T> {
        match face {
            Face::West => self.west,
            Face::East => self.east,
            Face::South => self.south,
            Face::North => self.north,
        }
    }
}

/// Fills every ghost layer from the interior. Corner ghost blocks are not
/// touched; no stencil in the crate reads them. `exact` supplies the state
/// for [`BoundaryKind::ExactDirichlet`] sides.
pub fn apply_boundary_conditions<T: Real>(
    field: &mut CellField<T>,
    bcs: &BoundarySet<T>,
    exact: Option<&dyn Fn(T, T) -> PrimitiveState<T>>,
    gas: &GasModel<T>,
) -> Result<()> {
    let mesh = field.mesh().clone();
    let (nx, ny) = (mesh.nx() as isize, mesh.ny() as isize);
    let g = mesh.ghost_width() as isize;

    for face in crate::mesh::FACE_ORDER {
        let kind = bcs.side(face);
        if kind == BoundaryKind::ExactDirichlet && exact.is_none() {
            return Err(Error::Config(format!(
                "{face:?} boundary requests the exact solution but the case has none"
            )));
        }
        let along = match face {
            Face::West | Face::East => 0..ny,
            Face::South | Face::North => 0..nx,
        };
        for s in along {
            for layer in 0..g {
                // ghost cell `layer` steps outside, and its mirror/adjacent interior cells
                let (ghost, mirror, adjacent) = match face {
                    Face::West => ((-1 - layer, s), (layer, s), (0, s)),
                    Face::East => ((nx + layer, s), (nx - 1 - layer, s), (nx - 1, s)),
                    Face::South => ((s, -1 - layer), (s, layer), (s, 0)),
                    Face::North => ((s, ny + layer), (s, ny - 1 - layer), (s, ny - 1)),
                };
                let q = match kind {
                    BoundaryKind::SupersonicInflow(w) => w.to_conserved_unchecked(gas),
                    BoundaryKind::SupersonicOutflow => field.get(adjacent.0, adjacent.1),
                    BoundaryKind::ExactDirichlet => {
                        let (x, y) = mesh.cell_center(CellIndex::new(ghost.0, ghost.1));
                        (exact.unwrap())(x, y).to_conserved_unchecked(gas)
                    }
                    BoundaryKind::SlipWall => {
                        let m = field.get(mirror.0, mirror.1);
                        match face {
                            Face::West | Face::East => ConservedState {
                                mom_x: -m.mom_x,
                                ..m
                            },
                            Face::South | Face::North => ConservedState {
                                mom_y: -m.mom_y,
                                ..m
                            },
                        }
                    }
                };
                field.set(ghost.0, ghost.1, q);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Bounds};

    fn ramp_field() -> CellField<f64> {
        let gas = GasModel::air();
        let mesh = build_mesh(6, 5, Bounds::unit_square()).unwrap();
        CellField::from_fn(mesh, |x, y| {
            PrimitiveState::new(1.0 + x, 0.3 + y, -0.2 + x * y, 1.0 + y)
                .to_conserved_unchecked(&gas)
        })
    }

    #[test]
    fn outflow_copies_adjacent_cell() {
        let gas = GasModel::air();
        let mut f = ramp_field();
        apply_boundary_conditions(
            &mut f,
            &BoundarySet::uniform(BoundaryKind::SupersonicOutflow),
            None,
            &gas,
        )
        .unwrap();
        for j in 0..5 {
            assert_eq!(f.get(-1, j), f.get(0, j));
            assert_eq!(f.get(-2, j), f.get(0, j));
            assert_eq!(f.get(7, j), f.get(5, j));
        }
        for i in 0..6 {
            assert_eq!(f.get(i, 5), f.get(i, 4));
            assert_eq!(f.get(i, -2), f.get(i, 0));
        }
    }

    #[test]
    fn slip_wall_mirrors_normal_velocity() {
        let gas = GasModel::air();
        let mut f = ramp_field();
        apply_boundary_conditions(
            &mut f,
            &BoundarySet::uniform(BoundaryKind::SlipWall),
            None,
            &gas,
        )
        .unwrap();
        for i in 0..6 {
            for layer in 0..2 {
                let ghost = f.get(i, -1 - layer).to_primitive_unchecked(&gas);
                let inner = f.get(i, layer).to_primitive_unchecked(&gas);
                assert_eq!(ghost.v, -inner.v);
                assert_eq!((ghost.rho, ghost.u), (inner.rho, inner.u));
                assert!((ghost.p - inner.p).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn inflow_and_exact_fill_ghosts() {
        let gas = GasModel::air();
        let mut f = ramp_field();
        let w = PrimitiveState::new(1.0, 3.5, 0.0, 1.0);
        let bcs = BoundarySet {
            west: BoundaryKind::SupersonicInflow(w),
            east: BoundaryKind::SupersonicOutflow,
            south: BoundaryKind::SupersonicInflow(w),
            north: BoundaryKind::ExactDirichlet,
        };
        let exact = |x: f64, _y: f64| PrimitiveState::new(2.0 + x, 0.0, 0.0, 1.0);
        apply_boundary_conditions(&mut f, &bcs, Some(&exact), &gas).unwrap();
        assert_eq!(f.get(-2, 3), w.to_conserved_unchecked(&gas));
        let (x, _) = f.mesh().cell_center(CellIndex::new(2, 6));
        assert_eq!(f.get(2, 6).rho, 2.0 + x);

        // applying twice changes nothing
        let once = f.clone();
        apply_boundary_conditions(&mut f, &bcs, Some(&exact), &gas).unwrap();
        assert_eq!(once, f);
    }

    #[test]
    fn exact_side_without_solution_is_a_config_error() {
        let gas = GasModel::air();
        let mut f = ramp_field();
        let r = apply_boundary_conditions(
            &mut f,
            &BoundarySet::uniform(BoundaryKind::ExactDirichlet),
            None,
            &gas,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }
}

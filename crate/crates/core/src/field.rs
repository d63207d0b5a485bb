use crate::error::{Error, Result};
use crate::euler::{ConservedState, GasModel, PrimitiveState};
use crate::mesh::{CellIndex, StructuredMesh};
use crate::scalar::Real;

/// Conserved state on every cell of a mesh, ghost frame included.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField<T> {
    mesh: StructuredMesh<T>,
    states: Vec<ConservedState<T>>,
    pub iteration: usize,
}

impl<T: Real> CellField<T> {
    pub fn uniform(mesh: StructuredMesh<T>, state: ConservedState<T>) -> Self {
        let states = vec![state; mesh.storage_len()];
        Self {
            mesh,
            states,
            iteration: 0,
        }
    }

    /// Fills every cell (ghosts included) from a function of the cell center.
    pub fn from_fn(mesh: StructuredMesh<T>, mut f: impl FnMut(T, T) -> ConservedState<T>) -> Self {
        let g = mesh.ghost_width() as isize;
        let mut states = Vec::with_capacity(mesh.storage_len());
        for j in -g..mesh.ny() as isize + g {
            for i in -g..mesh.nx() as isize + g {
                let (x, y) = mesh.cell_center(CellIndex::new(i, j));
                states.push(f(x, y));
            }
        }
        Self {
            mesh,
            states,
            iteration: 0,
        }
    }

    pub fn mesh(&self) -> &StructuredMesh<T> {
        &self.mesh
    }

    pub fn states(&self) -> &[ConservedState<T>] {
        &self.states
    }

    pub fn states_mut(&mut self) -> &mut [ConservedState<T>] {
        &mut self.states
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> ConservedState<T> {
        self.states[self.mesh.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, q: ConservedState<T>) {
        let k = self.mesh.offset(i, j);
        self.states[k] = q;
    }

    /// Density of every stored cell, in storage order.
    pub fn densities(&self) -> Vec<T> {
        self.states.iter().map(|q| q.rho).collect()
    }

    /// Primitive variables of every stored cell, in storage order.
    pub fn primitives(&self, gas: &GasModel<T>) -> Vec<PrimitiveState<T>> {
        self.states
            .iter()
            .map(|q| q.to_primitive_unchecked(gas))
            .collect()
    }

    /// `(x, rho)` along the interior row nearest to `y`.
    pub fn sample_density_row(&self, y: T) -> Result<Vec<(T, T)>> {
        self.mesh.sample_row(&self.densities(), y)
    }

    /// Volume integral of each conserved component over the interior.
    pub fn total_conserved(&self) -> [T; 4] {
        let vol = self.mesh.cell_volume();
        let mut total = [T::zero(); 4];
        for j in 0..self.mesh.ny() as isize {
            let mut row = [T::zero(); 4];
            for i in 0..self.mesh.nx() as isize {
                let q = self.get(i, j).to_array();
                for k in 0..4 {
                    row[k] = row[k] + q[k];
                }
            }
            for k in 0..4 {
                total[k] = total[k] + row[k] * vol;
            }
        }
        total
    }

    /// Fails on the first interior cell with non-positive density or pressure.
    pub fn check_admissible(&self, gas: &GasModel<T>) -> Result<()> {
        for idx in self.mesh.interior_cells() {
            let q = self.get(idx.i, idx.j);
            if !q.is_admissible(gas) {
                return Err(Error::InadmissibleState {
                    rho: q.rho.to_f64_lossy(),
                    pressure: q.pressure(gas).to_f64_lossy(),
                    context: format!("cell ({}, {})", idx.i, idx.j),
                });
            }
        }
        Ok(())
    }
}

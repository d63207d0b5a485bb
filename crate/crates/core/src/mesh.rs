//! Uniform Cartesian mesh with ghost layers.
//!
//! Interior cells are indexed `0..nx` by `0..ny`; ghost cells use negative
//! indices or indices `>= nx` / `>= ny`. Storage is row-major with the ghost
//! frame included.

use crate::error::{Error, Result};
use crate::euler::Normal;
use crate::scalar::Real;

/// Ghost layers on every side; the MUSCL stencil reaches two cells upwind.
pub const DEFAULT_GHOST_WIDTH: usize = 2;

/// Face order used throughout the crate: west, east, south, north.
pub const FACE_ORDER: [Face; 4] = [Face::West, Face::East, Face::South, Face::North];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    West,
    East,
    South,
    North,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub i: isize,
    pub j: isize,
}

impl CellIndex {
    pub const fn new(i: isize, j: isize) -> Self {
        Self { i, j }
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<T> {
    pub x0: T,
    pub y0: T,
    pub x1: T,
    pub y1: T,
}

impl<T: Real> Bounds<T> {
    pub fn new(x0: T, y0: T, x1: T, y1: T) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn unit_square() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::one())
    }

    pub fn area(&self) -> T {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMesh<T> {
    nx: usize,
    ny: usize,
    bounds: Bounds<T>,
    ghost_width: usize,
    dx: T,
    dy: T,
}

/// Builds an `nx` by `ny` mesh over `bounds` with the default ghost width.
pub fn build_mesh<T: Real>(nx: usize, ny: usize, bounds: Bounds<T>) -> Result<StructuredMesh<T>> {
    StructuredMesh::new(nx, ny, bounds, DEFAULT_GHOST_WIDTH)
}

impl<T: Real> StructuredMesh<T> {
    pub fn new(nx: usize, ny: usize, bounds: Bounds<T>, ghost_width: usize) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidMesh(format!(
                "need at least 4x4 interior cells, got {nx}x{ny}"
            )));
        }
        if !(bounds.x1 > bounds.x0 && bounds.y1 > bounds.y0) {
            return Err(Error::InvalidMesh(format!(
                "empty domain [{}, {}] x [{}, {}]",
                bounds.x0, bounds.x1, bounds.y0, bounds.y1
            )));
        }
        if ghost_width < 2 {
            return Err(Error::InvalidMesh(format!(
                "ghost width must be at least 2, got {ghost_width}"
            )));
        }
        let dx = (bounds.x1 - bounds.x0) / T::from_usize(nx).unwrap();
        let dy = (bounds.y1 - bounds.y0) / T::from_usize(ny).unwrap();
        Ok(Self {
            nx,
            ny,
            bounds,
            ghost_width,
            dx,
            dy,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bounds(&self) -> Bounds<T> {
        self.bounds
    }

    pub fn ghost_width(&self) -> usize {
        self.ghost_width
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn dy(&self) -> T {
        self.dy
    }

    /// Cell volume (area in 2D), identical for every cell.
    pub fn cell_volume(&self) -> T {
        self.dx * self.dy
    }

    pub fn interior_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Row length of the ghosted storage.
    pub fn stride(&self) -> usize {
        self.nx + 2 * self.ghost_width
    }

    pub fn storage_len(&self) -> usize {
        self.stride() * (self.ny + 2 * self.ghost_width)
    }

    pub fn contains(&self, idx: CellIndex) -> bool {
        let g = self.ghost_width as isize;
        (-g..self.nx as isize + g).contains(&idx.i) && (-g..self.ny as isize + g).contains(&idx.j)
    }

    pub fn is_interior(&self, idx: CellIndex) -> bool {
        (0..self.nx as isize).contains(&idx.i) && (0..self.ny as isize).contains(&idx.j)
    }

    /// Offset of `(i, j)` into ghosted storage.
    #[inline]
    pub fn offset(&self, i: isize, j: isize) -> usize {
        let g = self.ghost_width as isize;
        debug_assert!(
            self.contains(CellIndex::new(i, j)),
            "cell ({i}, {j}) outside storage"
        );
        ((j + g) as usize) * self.stride() + (i + g) as usize
    }

    /// Offset of an interior cell into a dense `nx * ny` array.
    #[inline]
    pub fn interior_offset(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_center(&self, idx: CellIndex) -> (T, T) {
        let h = T::half();
        (
            self.bounds.x0 + (T::from_isize(idx.i).unwrap() + h) * self.dx,
            self.bounds.y0 + (T::from_isize(idx.j).unwrap() + h) * self.dy,
        )
    }

    /// Face-adjacent cells in [`FACE_ORDER`]: west, east, south, north.
    pub fn neighbors(&self, idx: CellIndex) -> [CellIndex; 4] {
        let CellIndex { i, j } = idx;
        [
            CellIndex::new(i - 1, j),
            CellIndex::new(i + 1, j),
            CellIndex::new(i, j - 1),
            CellIndex::new(i, j + 1),
        ]
    }

    /// Outward unit normal and area of one face of any cell.
    pub fn face_geometry(&self, face: Face) -> (Normal<T>, T) {
        let (o, z) = (T::one(), T::zero());
        match face {
            Face::West => (Normal::new(-o, z), self.dy),
            Face::East => (Normal::new(o, z), self.dy),
            Face::South => (Normal::new(z, -o), self.dx),
            Face::North => (Normal::new(z, o), self.dx),
        }
    }

    /// Interior row whose cell centers are nearest to `y`. A `y` lying
    /// exactly on a face between two rows selects the upper row.
    pub fn row_for_y(&self, y: T) -> Result<usize> {
        if !(y >= self.bounds.y0 && y <= self.bounds.y1) {
            return Err(Error::OutOfRange(format!(
                "sampling line y = {y} outside [{}, {}]",
                self.bounds.y0, self.bounds.y1
            )));
        }
        let t = (y - self.bounds.y0) * T::from_usize(self.ny).unwrap()
            / (self.bounds.y1 - self.bounds.y0);
        let j = t.floor().to_usize().unwrap_or(0);
        Ok(j.min(self.ny - 1))
    }

    /// Samples one interior row of ghosted per-cell `values`, ordered by
    /// increasing x, returning `(x_center, value)` pairs.
    pub fn sample_row<V: Copy>(&self, values: &[V], y: T) -> Result<Vec<(T, V)>> {
        assert_eq!(
            values.len(),
            self.storage_len(),
            "values must cover ghosted storage"
        );
        let j = self.row_for_y(y)? as isize;
        Ok((0..self.nx as isize)
            .map(|i| {
                let (x, _) = self.cell_center(CellIndex::new(i, j));
                (x, values[self.offset(i, j)])
            })
            .collect())
    }

    /// Iterator over interior cell indices, row by row.
    pub fn interior_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.ny as isize)
            .flat_map(move |j| (0..self.nx as isize).map(move |i| CellIndex::new(i, j)))
    }
}

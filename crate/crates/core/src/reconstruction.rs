//! MUSCL face reconstruction in primitive variables.
//!
//! Each cell extrapolates its average to its faces either with the Koren
//! limiter or with the unlimited kappa = 1/3 scheme, selected per cell by a
//! [`TroubledMask`]. Both modes belong to the same family: where the Koren
//! limiter sits on its smooth branch `(1 + 2r) / 3` the two coincide.

use rayon::prelude::*;

use crate::euler::PrimitiveState;
use crate::indicator::TroubledMask;
use crate::mesh::StructuredMesh;
use crate::scalar::Real;

/// Below this magnitude a one-sided difference is treated as a plateau.
pub const SLOPE_EPSILON: f64 = 1e-12;

/// Upwind-biased blending parameter of the unlimited reconstruction.
pub const KAPPA: f64 = 1.0 / 3.0;

/// Reconstructed values on both sides of one face.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FacePair<T> {
    pub left: PrimitiveState<T>,
    pub right: PrimitiveState<T>,
}

/// Koren limiter `max(0, min(2r, (1 + 2r) / 3, 2))`.
#[inline]
pub fn koren_phi<T: Real>(r: T) -> T {
    let two = T::lit(2.0);
    let smooth = (T::one() + two * r) / T::lit(3.0);
    (two * r).min(smooth).min(two).max(T::zero())
}

/// Extrapolated values of one scalar at the low and high faces of a cell
/// from its own average `center` and its neighbors `lo` and `hi`.
#[inline]
fn extrapolate<T: Real>(lo: T, center: T, hi: T, limited: bool) -> (T, T) {
    let d_minus = center - lo;
    let d_plus = hi - center;
    let h = T::half();
    if limited {
        let eps = T::lit(SLOPE_EPSILON);
        let high = if d_minus.abs() < eps {
            center
        } else {
            center + h * koren_phi(d_plus / d_minus) * d_minus
        };
        let low = if d_plus.abs() < eps {
            center
        } else {
            center - h * koren_phi(d_minus / d_plus) * d_plus
        };
        (low, high)
    } else {
        let k = T::lit(KAPPA);
        let q = T::lit(0.25);
        let high = center + q * ((T::one() - k) * d_minus + (T::one() + k) * d_plus);
        let low = center - q * ((T::one() - k) * d_plus + (T::one() + k) * d_minus);
        (low, high)
    }
}

#[inline]
fn extrapolate_state<T: Real>(
    lo: &PrimitiveState<T>,
    center: &PrimitiveState<T>,
    hi: &PrimitiveState<T>,
    limited: bool,
) -> (PrimitiveState<T>, PrimitiveState<T>) {
    let (a, b, c) = (lo.to_array(), center.to_array(), hi.to_array());
    let mut low = [T::zero(); 4];
    let mut high = [T::zero(); 4];
    for k in 0..4 {
        (low[k], high[k]) = extrapolate(a[k], b[k], c[k], limited);
    }
    (
        PrimitiveState::from_array(low),
        PrimitiveState::from_array(high),
    )
}

/// Face states at the face between `stencil[1]` and `stencil[2]`, from four
/// consecutive cells ordered along increasing coordinate. `limited_left`
/// and `limited_right` select the Koren limiter for the two owning cells.
pub fn muscl_face_states<T: Real>(
    stencil: &[PrimitiveState<T>; 4],
    limited_left: bool,
    limited_right: bool,
) -> FacePair<T> {
    let (_, left) = extrapolate_state(&stencil[0], &stencil[1], &stencil[2], limited_left);
    let (right, _) = extrapolate_state(&stencil[1], &stencil[2], &stencil[3], limited_right);
    FacePair { left, right }
}

/// Reconstructed states on every interior face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceStates<T> {
    /// Vertical faces, `(nx + 1) * ny`, index `j * (nx + 1) + i` for the face
    /// on the west side of cell `(i, j)`.
    pub x_faces: Vec<FacePair<T>>,
    /// Horizontal faces, `nx * (ny + 1)`, index `j * nx + i` for the face on
    /// the south side of cell `(i, j)`.
    pub y_faces: Vec<FacePair<T>>,
    /// Faces that fell back to first order because a reconstructed state had
    /// non-positive density or pressure.
    pub fallbacks: usize,
}

/// Cell averages on both sides of every face, for the first-order scheme.
pub fn first_order_faces<T: Real>(
    prims: &[PrimitiveState<T>],
    mesh: &StructuredMesh<T>,
) -> FaceStates<T> {
    let (nx, ny) = (mesh.nx() as isize, mesh.ny() as isize);
    let mut x_faces = Vec::with_capacity(((nx + 1) * ny) as usize);
    for j in 0..ny {
        for i in 0..=nx {
            x_faces.push(FacePair {
                left: prims[mesh.offset(i - 1, j)],
                right: prims[mesh.offset(i, j)],
            });
        }
    }
    let mut y_faces = Vec::with_capacity((nx * (ny + 1)) as usize);
    for j in 0..=ny {
        for i in 0..nx {
            y_faces.push(FacePair {
                left: prims[mesh.offset(i, j - 1)],
                right: prims[mesh.offset(i, j)],
            });
        }
    }
    FaceStates {
        x_faces,
        y_faces,
        fallbacks: 0,
    }
}

/// MUSCL face states over the whole mesh. A cell's extrapolations are
/// limited iff `mask` flags it; ghost cells take the flag of the nearest
/// interior cell. `prims` must cover the ghosted storage with ghosts filled.
pub fn reconstruct_all_faces<T: Real>(
    prims: &[PrimitiveState<T>],
    mesh: &StructuredMesh<T>,
    mask: &TroubledMask,
) -> FaceStates<T> {
    assert_eq!(prims.len(), mesh.storage_len());
    assert_eq!(mask.len(), mesh.interior_count());
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let flag = |i: isize, j: isize| {
        let ci = i.clamp(0, nx as isize - 1) as usize;
        let cj = j.clamp(0, ny as isize - 1) as usize;
        mask.is_flagged(ci, cj)
    };
    // Each cell's (low, high) extrapolations depend only on its own flag, so
    // they are computed once per cell and shared by its two faces.
    let pair_up = |low_owner: &(PrimitiveState<T>, PrimitiveState<T>),
                   high_owner: &(PrimitiveState<T>, PrimitiveState<T>),
                   left: PrimitiveState<T>,
                   right: PrimitiveState<T>| {
        let pair = FacePair {
            left: low_owner.1,
            right: high_owner.0,
        };
        if pair.left.is_admissible() && pair.right.is_admissible() {
            (pair, 0)
        } else {
            (FacePair { left, right }, 1)
        }
    };

    let mut x_faces = vec![FacePair::default(); (nx + 1) * ny];
    let x_fallbacks: usize = x_faces
        .par_chunks_mut(nx + 1)
        .enumerate()
        .map(|(j, row)| {
            let j = j as isize;
            // cells -1..=nx of this row
            let ext: Vec<_> = (-1..=nx as isize)
                .map(|i| {
                    extrapolate_state(
                        &prims[mesh.offset(i - 1, j)],
                        &prims[mesh.offset(i, j)],
                        &prims[mesh.offset(i + 1, j)],
                        flag(i, j),
                    )
                })
                .collect();
            let mut count = 0;
            for (i, slot) in row.iter_mut().enumerate() {
                let (pair, fb) = pair_up(
                    &ext[i],
                    &ext[i + 1],
                    prims[mesh.offset(i as isize - 1, j)],
                    prims[mesh.offset(i as isize, j)],
                );
                *slot = pair;
                count += fb;
            }
            count
        })
        .sum();

    // rows -1..=ny of y-direction extrapolations
    let mut y_ext = vec![(PrimitiveState::default(), PrimitiveState::default()); nx * (ny + 2)];
    y_ext.par_chunks_mut(nx).enumerate().for_each(|(r, row)| {
        let j = r as isize - 1;
        for (i, slot) in row.iter_mut().enumerate() {
            let i = i as isize;
            *slot = extrapolate_state(
                &prims[mesh.offset(i, j - 1)],
                &prims[mesh.offset(i, j)],
                &prims[mesh.offset(i, j + 1)],
                flag(i, j),
            );
        }
    });
    let mut y_faces = vec![FacePair::default(); nx * (ny + 1)];
    let y_fallbacks: usize = y_faces
        .par_chunks_mut(nx)
        .enumerate()
        .map(|(j, row)| {
            let mut count = 0;
            for (i, slot) in row.iter_mut().enumerate() {
                let (pair, fb) = pair_up(
                    &y_ext[j * nx + i],
                    &y_ext[(j + 1) * nx + i],
                    prims[mesh.offset(i as isize, j as isize - 1)],
                    prims[mesh.offset(i as isize, j as isize)],
                );
                *slot = pair;
                count += fb;
            }
            count
        })
        .sum();

    FaceStates {
        x_faces,
        y_faces,
        fallbacks: x_fallbacks + y_fallbacks,
    }
}

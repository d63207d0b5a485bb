//! Ideal-gas thermodynamics and fluxes for the 2D Euler equations.
//!
//! The unknowns are `Q = (rho, rho u, rho v, E)` with the physical flux
//! `F(Q) n_x + G(Q) n_y` projected on a unit normal. The numerical flux is
//! the local Lax-Friedrichs (Rusanov) flux with a per-face dissipation speed.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A 4-component flux or residual vector ordered like [`ConservedState`].
pub type Flux<T> = [T; 4];

/// Calorically perfect gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel<T> {
    pub gamma: T,
}

impl<T: Real> GasModel<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::OutOfRange(format!(
                "ratio of specific heats must exceed 1, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    /// Standard air, gamma = 1.4.
    pub fn air() -> Self {
        Self { gamma: T::lit(1.4) }
    }

    #[inline]
    pub fn sound_speed(&self, rho: T, p: T) -> T {
        (self.gamma * p / rho).sqrt()
    }
}

impl<T: Real> Default for GasModel<T> {
    fn default() -> Self {
        Self::air()
    }
}

/// Unit normal of a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normal<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Normal<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// Unit normal at `angle` radians from the x axis.
    pub fn from_angle(angle: T) -> Self {
        Self {
            x: angle.cos(),
            y: angle.sin(),
        }
    }

    pub fn east() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn north() -> Self {
        Self::new(T::zero(), T::one())
    }
}

impl<T: Real> Neg for Normal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Conserved variables of one cell: `(rho, rho u, rho v, E)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConservedState<T> {
    pub rho: T,
    pub mom_x: T,
    pub mom_y: T,
    pub energy: T,
}

/// Primitive variables `(rho, u, v, p)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PrimitiveState<T> {
    pub rho: T,
    pub u: T,
    pub v: T,
    pub p: T,
}

impl<T: Real> ConservedState<T> {
    pub fn new(rho: T, mom_x: T, mom_y: T, energy: T) -> Self {
        Self {
            rho,
            mom_x,
            mom_y,
            energy,
        }
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.rho, self.mom_x, self.mom_y, self.energy]
    }

    #[inline]
    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Pressure without any admissibility check.
    #[inline]
    pub fn pressure(&self, gas: &GasModel<T>) -> T {
        let kinetic = T::half() * (self.mom_x * self.mom_x + self.mom_y * self.mom_y) / self.rho;
        (gas.gamma - T::one()) * (self.energy - kinetic)
    }

    /// True when density and pressure are strictly positive (and finite).
    #[inline]
    pub fn is_admissible(&self, gas: &GasModel<T>) -> bool {
        let p = self.pressure(gas);
        self.rho > T::zero() && p > T::zero() && self.rho.is_finite() && p.is_finite()
    }

    /// Primitive variables without the admissibility check, for inner loops
    /// where the state is already known to be admissible.
    #[inline]
    pub fn to_primitive_unchecked(&self, gas: &GasModel<T>) -> PrimitiveState<T> {
        PrimitiveState {
            rho: self.rho,
            u: self.mom_x / self.rho,
            v: self.mom_y / self.rho,
            p: self.pressure(gas),
        }
    }

    pub(crate) fn check(&self, gas: &GasModel<T>, context: impl FnOnce() -> String) -> Result<()> {
        if self.is_admissible(gas) {
            Ok(())
        } else {
            Err(Error::InadmissibleState {
                rho: self.rho.to_f64_lossy(),
                pressure: self.pressure(gas).to_f64_lossy(),
                context: context(),
            })
        }
    }
}

impl<T: Real> Add for ConservedState<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(
            self.rho + o.rho,
            self.mom_x + o.mom_x,
            self.mom_y + o.mom_y,
            self.energy + o.energy,
        )
    }
}

impl<T: Real> Sub for ConservedState<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.rho - o.rho,
            self.mom_x - o.mom_x,
            self.mom_y - o.mom_y,
            self.energy - o.energy,
        )
    }
}

impl<T: Real> Mul<T> for ConservedState<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(
            self.rho * s,
            self.mom_x * s,
            self.mom_y * s,
            self.energy * s,
        )
    }
}

impl<T: Real> PrimitiveState<T> {
    pub fn new(rho: T, u: T, v: T, p: T) -> Self {
        Self { rho, u, v, p }
    }

    #[inline]
    pub fn is_admissible(&self) -> bool {
        self.rho > T::zero() && self.p > T::zero() && self.rho.is_finite() && self.p.is_finite()
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.rho, self.u, self.v, self.p]
    }

    #[inline]
    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn to_conserved_unchecked(&self, gas: &GasModel<T>) -> ConservedState<T> {
        let kinetic = T::half() * self.rho * (self.u * self.u + self.v * self.v);
        ConservedState {
            rho: self.rho,
            mom_x: self.rho * self.u,
            mom_y: self.rho * self.v,
            energy: self.p / (gas.gamma - T::one()) + kinetic,
        }
    }

    pub fn sound_speed(&self, gas: &GasModel<T>) -> T {
        gas.sound_speed(self.rho, self.p)
    }

    pub fn mach(&self, gas: &GasModel<T>) -> T {
        (self.u * self.u + self.v * self.v).sqrt() / self.sound_speed(gas)
    }
}

pub fn primitive_from_conserved<T: Real>(
    q: &ConservedState<T>,
    gas: &GasModel<T>,
) -> Result<PrimitiveState<T>> {
    q.check(gas, || "conserved to primitive".into())?;
    Ok(q.to_primitive_unchecked(gas))
}

pub fn conserved_from_primitive<T: Real>(
    w: &PrimitiveState<T>,
    gas: &GasModel<T>,
) -> Result<ConservedState<T>> {
    if !w.is_admissible() {
        return Err(Error::InadmissibleState {
            rho: w.rho.to_f64_lossy(),
            pressure: w.p.to_f64_lossy(),
            context: "primitive to conserved".into(),
        });
    }
    Ok(w.to_conserved_unchecked(gas))
}

/// Physical flux of a primitive state through a face with unit normal `n`.
#[inline]
pub(crate) fn physical_flux_primitive<T: Real>(
    w: &PrimitiveState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> Flux<T> {
    let un = w.u * n.x + w.v * n.y;
    let energy = w.p / (gas.gamma - T::one()) + T::half() * w.rho * (w.u * w.u + w.v * w.v);
    let mass = w.rho * un;
    [
        mass,
        mass * w.u + w.p * n.x,
        mass * w.v + w.p * n.y,
        un * (energy + w.p),
    ]
}

/// `F(q) n_x + G(q) n_y`.
pub fn physical_flux<T: Real>(
    q: &ConservedState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> Result<Flux<T>> {
    let w = primitive_from_conserved(q, gas)?;
    Ok(physical_flux_primitive(&w, n, gas))
}

#[inline]
pub(crate) fn wave_speed_primitive<T: Real>(
    w: &PrimitiveState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> T {
    (w.u * n.x + w.v * n.y).abs() + w.sound_speed(gas)
}

/// Largest characteristic speed `|V.n| + a`.
pub fn max_wave_speed<T: Real>(
    q: &ConservedState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> Result<T> {
    let w = primitive_from_conserved(q, gas)?;
    Ok(wave_speed_primitive(&w, n, gas))
}

/// Local Lax-Friedrichs flux between two primitive face states. This is the
/// form used in the residual loop, where face states are reconstructed in
/// primitive variables.
#[inline]
pub(crate) fn lax_friedrichs_primitive<T: Real>(
    left: &PrimitiveState<T>,
    right: &PrimitiveState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> Flux<T> {
    let fl = physical_flux_primitive(left, n, gas);
    let fr = physical_flux_primitive(right, n, gas);
    let lambda = wave_speed_primitive(left, n, gas).max(wave_speed_primitive(right, n, gas));
    let ql = left.to_conserved_unchecked(gas).to_array();
    let qr = right.to_conserved_unchecked(gas).to_array();
    let h = T::half();
    std::array::from_fn(|k| h * (fl[k] + fr[k]) - h * lambda * (qr[k] - ql[k]))
}

/// Local Lax-Friedrichs (Rusanov) flux:
/// `1/2 (F(qL) + F(qR)) - 1/2 lambda (qR - qL)` with `lambda` the larger of
/// the two one-sided wave speeds along `n`.
pub fn lax_friedrichs_flux<T: Real>(
    ql: &ConservedState<T>,
    qr: &ConservedState<T>,
    n: Normal<T>,
    gas: &GasModel<T>,
) -> Result<Flux<T>> {
    let fl = physical_flux(ql, n, gas)?;
    let fr = physical_flux(qr, n, gas)?;
    let lambda = max_wave_speed(ql, n, gas)?.max(max_wave_speed(qr, n, gas)?);
    let (a, b) = (ql.to_array(), qr.to_array());
    let h = T::half();
    Ok(std::array::from_fn(|k| {
        h * (fl[k] + fr[k]) - h * lambda * (b[k] - a[k])
    }))
}

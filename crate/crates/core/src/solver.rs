//! Residual assembly, explicit time marching and the run pipelines.
//!
//! The semi-discrete system is `dQ_i/dt = R_i` with
//! `R_i = -(1 / Omega_i) sum_f F(Q_L, Q_R; n_f) A_f` over the outward faces
//! of cell `i`. Both run kinds use SSP-RK2: steady runs march in
//! pseudo-time with local time steps, unsteady runs with a global step.
//! Forward Euler is not used because it amplifies every Fourier mode of the
//! unlimited reconstruction, whatever the CFL number.

use rayon::prelude::*;

use crate::boundary::apply_boundary_conditions;
use crate::cases::{CaseDefinition, CaseKind};
use crate::error::{Error, Result};
use crate::euler::{
    lax_friedrichs_primitive, wave_speed_primitive, ConservedState, Flux, GasModel, Normal,
};
use crate::field::CellField;
use crate::indicator::{
    flag_troubled_cells, indicator_values, IndicatorConfig, IndicatorFormula, TroubledMask,
};
use crate::mesh::StructuredMesh;
use crate::reconstruction::{first_order_faces, reconstruct_all_faces, FaceStates};
use crate::scalar::Real;

pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_MAX_ITERATIONS: usize = 15_000;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-14;
/// Threshold used for mask export when a run does not set one.
pub const DEFAULT_K: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Steady,
    Unsteady,
}

/// Where the Koren limiter is applied during the high-order solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limiting<T> {
    /// Limiter in every cell.
    Everywhere,
    /// Limiter only in troubled cells flagged with threshold `K`.
    Restricted(T),
    /// Cell averages on both sides of every face.
    FirstOrder,
    /// Limiter only in the two cells straddling the exact shock on each row.
    ShockStraddle,
}

impl<T: Real> Limiting<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Limiting::Everywhere => "everywhere",
            Limiting::Restricted(_) => "restricted",
            Limiting::FirstOrder => "first_order",
            Limiting::ShockStraddle => "shock_straddle",
        }
    }

    pub fn threshold(&self) -> Option<T> {
        match self {
            Limiting::Restricted(k) => Some(*k),
            _ => None,
        }
    }
}

/// Face-state scheme for one residual evaluation.
#[derive(Clone, Copy, Debug)]
pub enum Scheme<'a> {
    FirstOrder,
    /// MUSCL, limited in the cells flagged by the mask.
    Muscl(&'a TroubledMask),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig<T> {
    pub mode: Mode,
    pub limiting: Limiting<T>,
    pub cfl: T,
    pub max_iterations: usize,
    pub convergence_tol: T,
    /// Overrides the case's final time in unsteady runs.
    pub final_time: Option<T>,
    pub indicator_formula: IndicatorFormula,
    /// Threshold for mask export when `limiting` carries none.
    pub export_k: T,
}

impl<T: Real> RunConfig<T> {
    pub fn steady(limiting: Limiting<T>) -> Self {
        Self {
            mode: Mode::Steady,
            limiting,
            cfl: T::lit(DEFAULT_CFL),
            max_iterations: DEFAULT_MAX_ITERATIONS,
            convergence_tol: T::lit(DEFAULT_CONVERGENCE_TOL),
            final_time: None,
            indicator_formula: IndicatorFormula::default(),
            export_k: T::lit(DEFAULT_K),
        }
    }

    pub fn unsteady(limiting: Limiting<T>) -> Self {
        Self {
            mode: Mode::Unsteady,
            ..Self::steady(limiting)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(Error::Config(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.convergence_tol > T::zero()) {
            return Err(Error::Config(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tol
            )));
        }
        if let Limiting::Restricted(k) = self.limiting {
            IndicatorConfig::new(k).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(t) = self.final_time {
            if !(t > T::zero()) {
                return Err(Error::Config(format!(
                    "final_time must be positive, got {t}"
                )));
            }
        }
        if self.mode == Mode::Unsteady && self.limiting == Limiting::ShockStraddle {
            return Err(Error::Config(
                "shock_straddle limiting needs a steady run".into(),
            ));
        }
        Ok(())
    }
}

/// Residual norm per iteration of one solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualHistory<T> {
    pub values: Vec<T>,
    pub converged: bool,
    /// Not converged and the last quarter of the run improved the best
    /// residual norm by less than a factor of two.
    pub stalled: bool,
}

impl<T: Real> ResidualHistory<T> {
    pub fn iterations_used(&self) -> usize {
        self.values.len()
    }

    pub fn last(&self) -> Option<T> {
        self.values.last().copied()
    }

    pub fn min(&self) -> Option<T> {
        self.values.iter().copied().reduce(T::min)
    }

    /// Number of iterations until the residual norm first drops to `level`.
    pub fn iterations_to_reach(&self, level: T) -> Option<usize> {
        self.values.iter().position(|&r| r <= level).map(|k| k + 1)
    }

    fn finish(&mut self, tol: T) {
        self.converged = self.last().is_some_and(|r| r <= tol);
        let n = self.values.len();
        self.stalled = if self.converged || n < 8 {
            false
        } else {
            let split = n - n / 4;
            let before = self.values[..split]
                .iter()
                .copied()
                .fold(T::infinity(), T::min);
            let after = self.values[split..]
                .iter()
                .copied()
                .fold(T::infinity(), T::min);
            after > T::half() * before
        };
    }
}

/// Residual of every interior cell and the net outward boundary flux.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    /// Row-major over interior cells.
    pub cells: Vec<Flux<T>>,
    /// `sum over boundary faces of F . n_out A`.
    pub boundary_flux: Flux<T>,
    /// Faces that fell back to first order during reconstruction.
    pub fallbacks: usize,
}

fn face_fluxes<T: Real>(
    faces: &FaceStates<T>,
    mesh: &StructuredMesh<T>,
    gas: &GasModel<T>,
) -> (Vec<Flux<T>>, Vec<Flux<T>>) {
    let (nx, _) = (mesh.nx(), mesh.ny());
    let fx = faces
        .x_faces
        .par_iter()
        .with_min_len(nx)
        .map(|p| lax_friedrichs_primitive(&p.left, &p.right, Normal::east(), gas))
        .collect();
    let fy = faces
        .y_faces
        .par_iter()
        .with_min_len(nx)
        .map(|p| lax_friedrichs_primitive(&p.left, &p.right, Normal::north(), gas))
        .collect();
    (fx, fy)
}

/// Semi-discrete residual `R` with `dQ/dt = R`. Ghost layers must be filled.
pub fn compute_residual<T: Real>(
    field: &CellField<T>,
    scheme: Scheme<'_>,
    gas: &GasModel<T>,
) -> Residual<T> {
    let mesh = field.mesh();
    let prims = field.primitives(gas);
    let faces = match scheme {
        Scheme::FirstOrder => first_order_faces(&prims, mesh),
        Scheme::Muscl(mask) => reconstruct_all_faces(&prims, mesh, mask),
    };
    let (fx, fy) = face_fluxes(&faces, mesh, gas);
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let (dx, dy) = (mesh.dx(), mesh.dy());
    let inv_vol = T::one() / mesh.cell_volume();

    let mut cells = vec![[T::zero(); 4]; nx * ny];
    cells.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, r) in row.iter_mut().enumerate() {
            let w = &fx[j * (nx + 1) + i];
            let e = &fx[j * (nx + 1) + i + 1];
            let s = &fy[j * nx + i];
            let n = &fy[(j + 1) * nx + i];
            for k in 0..4 {
                r[k] = -((e[k] - w[k]) * dy + (n[k] - s[k]) * dx) * inv_vol;
            }
        }
    });

    let mut boundary_flux = [T::zero(); 4];
    for j in 0..ny {
        let (w, e) = (&fx[j * (nx + 1)], &fx[j * (nx + 1) + nx]);
        for k in 0..4 {
            boundary_flux[k] = boundary_flux[k] + (e[k] - w[k]) * dy;
        }
    }
    for i in 0..nx {
        let (s, n) = (&fy[i], &fy[ny * nx + i]);
        for k in 0..4 {
            boundary_flux[k] = boundary_flux[k] + (n[k] - s[k]) * dx;
        }
    }

    Residual {
        cells,
        boundary_flux,
        fallbacks: faces.fallbacks,
    }
}

/// `sqrt(sum_i sum_j R_ij^2 Omega_i)` over interior cells, `residual` given
/// row-major on `mesh`.
pub fn residual_norm<T: Real>(residual: &[Flux<T>], mesh: &StructuredMesh<T>) -> T {
    assert_eq!(residual.len(), mesh.interior_count());
    let row_sums: Vec<T> = residual
        .par_chunks(mesh.nx())
        .map(|row| {
            row.iter()
                .map(|r| r.iter().fold(T::zero(), |acc, &c| acc + c * c))
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    (row_sums.into_iter().fold(T::zero(), |a, b| a + b) * mesh.cell_volume()).sqrt()
}

/// Local pseudo-time step of every interior cell:
/// `cfl * min(dx, dy) / max over faces of the Lax-Friedrichs speed`.
pub fn local_time_steps<T: Real>(field: &CellField<T>, cfl: T, gas: &GasModel<T>) -> Vec<T> {
    let mesh = field.mesh();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let h = mesh.dx().min(mesh.dy());
    // (|u| + a, |v| + a) of every stored cell
    let speeds: Vec<(T, T)> = field
        .states()
        .iter()
        .map(|q| {
            let w = q.to_primitive_unchecked(gas);
            (
                wave_speed_primitive(&w, Normal::east(), gas),
                wave_speed_primitive(&w, Normal::north(), gas),
            )
        })
        .collect();
    let mut dt = vec![T::zero(); nx * ny];
    dt.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let j = j as isize;
        for (i, slot) in row.iter_mut().enumerate() {
            let i = i as isize;
            let c = speeds[mesh.offset(i, j)];
            let lambda =
                c.0.max(c.1)
                    .max(speeds[mesh.offset(i - 1, j)].0)
                    .max(speeds[mesh.offset(i + 1, j)].0)
                    .max(speeds[mesh.offset(i, j - 1)].1)
                    .max(speeds[mesh.offset(i, j + 1)].1);
            *slot = cfl * h / lambda;
        }
    });
    dt
}

/// Largest stable global time step over the interior.
pub fn global_time_step<T: Real>(field: &CellField<T>, cfl: T, gas: &GasModel<T>) -> T {
    local_time_steps(field, cfl, gas)
        .into_iter()
        .fold(T::infinity(), T::min)
}

/// Outcome of one accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo<T> {
    /// Residual norm of the residual used for the update (first stage for
    /// RK2).
    pub residual_norm: T,
    /// Time step actually taken (global steps only).
    pub dt: T,
    /// Net outward boundary flux averaged over the stages with the RK
    /// weights, so that the change of the interior total is `-dt * flux`.
    pub boundary_flux: Flux<T>,
    pub fallbacks: usize,
    /// Steps that had to be retried with halved time steps.
    pub halved_steps: usize,
    pub mask_count: usize,
}

/// Residual of one RK stage and the number of faces that fell back.
type StageResidual<'a, T> = dyn Fn(&mut CellField<T>) -> Result<(Residual<T>, usize)> + 'a;

/// Drives the stages of one case: boundary filling, flagging, residuals and
/// updates.
pub struct Stepper<'a, T> {
    case: &'a CaseDefinition<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(case: &'a CaseDefinition<T>) -> Self {
        Self { case }
    }

    pub fn gas(&self) -> &GasModel<T> {
        &self.case.gas
    }

    pub fn fill_ghosts(&self, field: &mut CellField<T>) -> Result<()> {
        match self.case.exact_fn() {
            Some(f) => {
                apply_boundary_conditions(field, &self.case.boundaries, Some(&f), &self.case.gas)
            }
            None => apply_boundary_conditions(field, &self.case.boundaries, None, &self.case.gas),
        }
    }

    /// One SSP-RK2 pseudo-time step with local time stepping and a fixed
    /// scheme. An inadmissible result retries once with every local step
    /// halved.
    pub fn advance_steady(
        &self,
        field: &mut CellField<T>,
        scheme: Scheme<'_>,
        cfl: T,
    ) -> Result<StepInfo<T>> {
        let gas = self.case.gas;
        self.fill_ghosts(field)?;
        let dt = local_time_steps(field, cfl, &gas);
        let mask_count = match scheme {
            Scheme::FirstOrder => 0,
            Scheme::Muscl(m) => m.count(),
        };
        let stage = |f: &mut CellField<T>| -> Result<(Residual<T>, usize)> {
            self.fill_ghosts(f)?;
            Ok((compute_residual(f, scheme, &gas), mask_count))
        };
        if let Some(info) = self.try_rk2(field, |k| dt[k], &stage)? {
            return Ok(info);
        }
        let h = T::half();
        match self.try_rk2(field, |k| dt[k] * h, &stage)? {
            Some(info) => Ok(StepInfo {
                halved_steps: 1,
                ..info
            }),
            None => Err(Error::Numerical {
                iteration: field.iteration,
                detail: "inadmissible state after halving the local time steps".into(),
            }),
        }
    }

    fn stage_mask(
        &self,
        field: &CellField<T>,
        limiting: Limiting<T>,
        formula: IndicatorFormula,
    ) -> Result<Option<TroubledMask>> {
        let (nx, ny) = (field.mesh().nx(), field.mesh().ny());
        Ok(match limiting {
            Limiting::FirstOrder => None,
            Limiting::Everywhere => Some(TroubledMask::all(nx, ny)),
            Limiting::Restricted(k) => Some(flag_troubled_cells(
                field,
                &IndicatorConfig::new(k)?.with_formula(formula),
            )?),
            Limiting::ShockStraddle => Some(self.case.shock_straddle_mask()?),
        })
    }

    fn rk_stage(
        &self,
        field: &mut CellField<T>,
        limiting: Limiting<T>,
        formula: IndicatorFormula,
    ) -> Result<(Residual<T>, usize)> {
        self.fill_ghosts(field)?;
        let mask = self.stage_mask(field, limiting, formula)?;
        let scheme = match &mask {
            None => Scheme::FirstOrder,
            Some(m) => Scheme::Muscl(m),
        };
        let count = mask.as_ref().map_or(0, TroubledMask::count);
        Ok((compute_residual(field, scheme, &self.case.gas), count))
    }

    /// One SSP-RK2 step of size `dt`. The troubled mask is recomputed from
    /// the current field at both stages when limiting is restricted. An
    /// inadmissible result retries once with `dt / 2`.
    pub fn advance_unsteady(
        &self,
        field: &mut CellField<T>,
        dt: T,
        limiting: Limiting<T>,
        formula: IndicatorFormula,
    ) -> Result<StepInfo<T>> {
        let stage = |f: &mut CellField<T>| self.rk_stage(f, limiting, formula);
        if let Some(info) = self.try_rk2(field, |_| dt, &stage)? {
            return Ok(info);
        }
        let half = dt * T::half();
        match self.try_rk2(field, |_| half, &stage)? {
            Some(info) => Ok(StepInfo {
                halved_steps: 1,
                ..info
            }),
            None => Err(Error::Numerical {
                iteration: field.iteration,
                detail: "inadmissible state after halving the time step".into(),
            }),
        }
    }

    /// `Q1 = Q + dt R(Q)`, `Q <- (Q + Q1 + dt R(Q1)) / 2` with a per-cell
    /// step. Returns `None`, leaving `field` untouched, if any stage is
    /// inadmissible.
    fn try_rk2(
        &self,
        field: &mut CellField<T>,
        dt: impl Fn(usize) -> T,
        stage_residual: &StageResidual<'_, T>,
    ) -> Result<Option<StepInfo<T>>> {
        let gas = self.case.gas;
        let mut stage = field.clone();
        let (r0, mask_count) = stage_residual(&mut stage)?;
        let rn = residual_norm(&r0.cells, stage.mesh());
        if !rn.is_finite() {
            return Err(Error::Numerical {
                iteration: field.iteration,
                detail: "non-finite residual norm".into(),
            });
        }
        let start = stage.clone();
        let nx = stage.mesh().nx();
        for (k, r) in r0.cells.iter().enumerate() {
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            let q = stage.get(i, j) + ConservedState::from_array(*r) * dt(k);
            if !q.is_admissible(&gas) {
                return Ok(None);
            }
            stage.set(i, j, q);
        }
        let (r1, _) = stage_residual(&mut stage)?;
        let h = T::half();
        for (k, r) in r1.cells.iter().enumerate() {
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            let q1 = stage.get(i, j) + ConservedState::from_array(*r) * dt(k);
            let q = (start.get(i, j) + q1) * h;
            if !q.is_admissible(&gas) {
                return Ok(None);
            }
            stage.set(i, j, q);
        }
        stage.iteration = field.iteration + 1;
        *field = stage;
        Ok(Some(StepInfo {
            residual_norm: rn,
            dt: dt(0),
            boundary_flux: std::array::from_fn(|k| h * (r0.boundary_flux[k] + r1.boundary_flux[k])),
            fallbacks: r0.fallbacks + r1.fallbacks,
            halved_steps: 0,
            mask_count,
        }))
    }

    /// Marches a steady solve until the residual norm reaches `tol` or
    /// `max_iterations` steps have been taken.
    pub fn march_steady(
        &self,
        field: &mut CellField<T>,
        scheme: Scheme<'_>,
        cfl: T,
        max_iterations: usize,
        tol: T,
    ) -> Result<(ResidualHistory<T>, SolveStats)> {
        let mut history = ResidualHistory::default();
        let mut stats = SolveStats::default();
        for _ in 0..max_iterations {
            let info = self.advance_steady(field, scheme, cfl)?;
            history.values.push(info.residual_norm);
            stats.fallbacks += info.fallbacks;
            stats.halved_steps += info.halved_steps;
            if info.residual_norm <= tol {
                break;
            }
        }
        self.fill_ghosts(field)?;
        history.finish(tol);
        Ok((history, stats))
    }
}

/// Counters accumulated over a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub fallbacks: usize,
    pub halved_steps: usize,
}

/// Per-step record of an unsteady run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnsteadyStep<T> {
    pub time: T,
    pub dt: T,
    pub mask_count: usize,
    pub boundary_flux: Flux<T>,
    /// Interior totals after the step.
    pub totals: Flux<T>,
}

#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub field: CellField<T>,
    /// History of the final solve (the high-order one for steady runs).
    pub history: ResidualHistory<T>,
    /// First-order pre-solve of a steady run.
    pub first_order: Option<(CellField<T>, ResidualHistory<T>)>,
    /// Mask used by the high-order steady solve, or the last mask of an
    /// unsteady run.
    pub mask: TroubledMask,
    /// Indicator value of every interior cell on the field the mask was
    /// built from.
    pub indicator: Vec<T>,
    /// Threshold behind `mask` when it came from the indicator.
    pub k_threshold: T,
    pub stats: SolveStats,
    pub unsteady_steps: Vec<UnsteadyStep<T>>,
    pub initial_totals: Flux<T>,
}

/// First-order solution of a steady case, from which every high-order
/// steady solve starts.
#[derive(Clone, Debug)]
pub struct FirstOrderSolution<T> {
    pub field: CellField<T>,
    pub history: ResidualHistory<T>,
    pub stats: SolveStats,
    pub initial_totals: Flux<T>,
}

/// First-order pseudo-time solve from the case initialization. Only the
/// cfl, iteration cap and tolerance of `config` matter here.
pub fn solve_first_order<T: Real>(
    config: &RunConfig<T>,
    case: &CaseDefinition<T>,
) -> Result<FirstOrderSolution<T>> {
    config.validate()?;
    if case.kind != CaseKind::Steady {
        return Err(Error::Config(format!(
            "case {} is not a steady case",
            case.name
        )));
    }
    let stepper = Stepper::new(case);
    let mut field = case.initial_field();
    stepper.fill_ghosts(&mut field)?;
    field.check_admissible(&case.gas)?;
    let initial_totals = field.total_conserved();
    let (history, stats) = stepper.march_steady(
        &mut field,
        Scheme::FirstOrder,
        config.cfl,
        config.max_iterations,
        config.convergence_tol,
    )?;
    Ok(FirstOrderSolution {
        field,
        history,
        stats,
        initial_totals,
    })
}

/// Flagging and high-order steady solve started from `first`, with the
/// mask fixed for the whole solve. `first_order` limiting returns `first`
/// itself together with its mask.
pub fn run_from_first_order<T: Real>(
    config: &RunConfig<T>,
    case: &CaseDefinition<T>,
    first: &FirstOrderSolution<T>,
) -> Result<RunOutput<T>> {
    config.validate()?;
    if config.mode != Mode::Steady {
        return Err(Error::Config(
            "a first-order start only applies to steady runs".into(),
        ));
    }
    let stepper = Stepper::new(case);
    let (nx, ny) = (case.mesh.nx(), case.mesh.ny());
    let k_threshold = config.limiting.threshold().unwrap_or(config.export_k);
    let indicator = indicator_values(&first.field, config.indicator_formula)?;
    let flagged = crate::indicator::mask_from_values(nx, ny, &indicator, k_threshold);
    let mask = match config.limiting {
        Limiting::FirstOrder | Limiting::Restricted(_) => flagged,
        Limiting::Everywhere => TroubledMask::all(nx, ny),
        Limiting::ShockStraddle => case.shock_straddle_mask()?,
    };
    let mut stats = first.stats;
    let mut field = first.field.clone();
    let history = if config.limiting == Limiting::FirstOrder {
        first.history.clone()
    } else {
        field.iteration = 0;
        let (history, high_stats) = stepper.march_steady(
            &mut field,
            Scheme::Muscl(&mask),
            config.cfl,
            config.max_iterations,
            config.convergence_tol,
        )?;
        stats.fallbacks += high_stats.fallbacks;
        stats.halved_steps += high_stats.halved_steps;
        history
    };
    Ok(RunOutput {
        field,
        history,
        first_order: Some((first.field.clone(), first.history.clone())),
        mask,
        indicator,
        k_threshold,
        stats,
        unsteady_steps: Vec::new(),
        initial_totals: first.initial_totals,
    })
}

/// Full pipeline for one case.
///
/// Steady: first-order solve from the case initialization, flagging on that
/// solution, then the high-order solve started from it with the mask fixed.
/// Unsteady: SSP-RK2 march to the final time with the mask rebuilt at every
/// stage.
pub fn run<T: Real>(config: &RunConfig<T>, case: &CaseDefinition<T>) -> Result<RunOutput<T>> {
    config.validate()?;
    if config.mode == Mode::Steady {
        let first = solve_first_order(config, case)?;
        return run_from_first_order(config, case, &first);
    }
    let stepper = Stepper::new(case);
    let mut field = case.initial_field();
    stepper.fill_ghosts(&mut field)?;
    field.check_admissible(&case.gas)?;
    let initial_totals = field.total_conserved();
    let (nx, ny) = (case.mesh.nx(), case.mesh.ny());
    let k_threshold = config.limiting.threshold().unwrap_or(config.export_k);
    let formula = config.indicator_formula;

    let final_time = config.final_time.or(case.final_time).ok_or_else(|| {
        Error::Config(format!(
            "case {} has no final time; set final_time",
            case.name
        ))
    })?;
    let mut history = ResidualHistory::default();
    let mut stats = SolveStats::default();
    let mut steps = Vec::new();
    let mut time = T::zero();
    let eps = final_time * T::lit(1e-12);
    while time < final_time - eps && steps.len() < config.max_iterations {
        stepper.fill_ghosts(&mut field)?;
        let dt = global_time_step(&field, config.cfl, &case.gas).min(final_time - time);
        let info = stepper.advance_unsteady(&mut field, dt, config.limiting, formula)?;
        time = time + info.dt;
        history.values.push(info.residual_norm);
        stats.fallbacks += info.fallbacks;
        steps.push(UnsteadyStep {
            time,
            dt: info.dt,
            mask_count: info.mask_count,
            boundary_flux: info.boundary_flux,
            totals: field.total_conserved(),
        });
    }
    history.finish(config.convergence_tol);
    stepper.fill_ghosts(&mut field)?;
    let indicator = indicator_values(&field, formula)?;
    let mask = match config.limiting {
        Limiting::Everywhere => TroubledMask::all(nx, ny),
        _ => crate::indicator::mask_from_values(nx, ny, &indicator, k_threshold),
    };
    Ok(RunOutput {
        field,
        history,
        first_order: None,
        mask,
        indicator,
        k_threshold,
        stats,
        unsteady_steps: steps,
        initial_totals,
    })
}

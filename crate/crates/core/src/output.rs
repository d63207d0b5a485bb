//! CSV and legacy-VTK writers.
//!
//! Every file opens with `#` comment lines identifying the run (config hash,
//! case, mode, limiting, K, grid), followed by a CSV header row. Floats are
//! written in the shortest scientific form that reads back to the same bits.

use std::fmt::LowerExp;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{LineProfile, ShockLineReport};
use crate::error::Result;
use crate::euler::GasModel;
use crate::field::CellField;
use crate::indicator::TroubledMask;
use crate::scalar::Real;
use crate::solver::ResidualHistory;

/// Identification written at the top of every artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct ArtifactHeader {
    pub config_hash: String,
    pub case: String,
    pub mode: String,
    pub limiting: String,
    /// Threshold behind the mask, if any.
    pub k: Option<f64>,
    pub nx: usize,
    pub ny: usize,
}

impl ArtifactHeader {
    fn lines(&self) -> Vec<String> {
        vec![
            format!("config_hash = {}", self.config_hash),
            format!("case = {}", self.case),
            format!("mode = {}", self.mode),
            format!("limiting = {}", self.limiting),
            format!(
                "K = {}",
                self.k.map_or("none".to_string(), |k| k.to_string())
            ),
            format!("grid = {}x{}", self.nx, self.ny),
        ]
    }

    fn write(&self, w: &mut impl Write) -> Result<()> {
        for l in self.lines() {
            writeln!(w, "# {l}")?;
        }
        Ok(())
    }

    /// Single-line form for formats with one title line.
    pub fn one_line(&self) -> String {
        self.lines().join("; ")
    }
}

/// Shortest round-trip scientific notation, e.g. `1.5e-3`.
fn num<T: LowerExp>(v: T) -> String {
    format!("{v:e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn csv_start(path: &Path, header: &ArtifactHeader, columns: &str) -> Result<BufWriter<File>> {
    let mut w = create(path)?;
    header.write(&mut w)?;
    writeln!(w, "{columns}")?;
    Ok(w)
}

/// `iteration,RN`, iterations counted from 1.
pub fn write_residual_history<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    history: &ResidualHistory<T>,
) -> Result<()> {
    let mut w = csv_start(path, header, "iteration,RN")?;
    for (k, r) in history.values.iter().enumerate() {
        writeln!(w, "{},{}", k + 1, num(*r))?;
    }
    w.flush()?;
    Ok(())
}

/// `i,j,x,y,rho,u,v,p` over interior cells, row-major.
pub fn write_field<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    field: &CellField<T>,
    gas: &GasModel<T>,
) -> Result<()> {
    let mut w = csv_start(path, header, "i,j,x,y,rho,u,v,p")?;
    let mesh = field.mesh();
    for idx in mesh.interior_cells() {
        let (x, y) = mesh.cell_center(idx);
        let p = field.get(idx.i, idx.j).to_primitive_unchecked(gas);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            idx.i,
            idx.j,
            num(x),
            num(y),
            num(p.rho),
            num(p.u),
            num(p.v),
            num(p.p)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `i,j,indicator_value,flagged` with `flagged` as 0 or 1.
pub fn write_mask<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    mask: &TroubledMask,
    indicator: &[T],
) -> Result<()> {
    assert_eq!(mask.len(), indicator.len());
    let mut w = csv_start(path, header, "i,j,indicator_value,flagged")?;
    for j in 0..mask.ny() {
        for i in 0..mask.nx() {
            let k = j * mask.nx() + i;
            writeln!(
                w,
                "{},{},{},{}",
                i,
                j,
                num(indicator[k]),
                u8::from(mask.is_flagged(i, j))
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of the shock-window report table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow<T> {
    pub case: String,
    pub mode: String,
    pub k: Option<T>,
    pub report: ShockLineReport<T>,
    /// L2 over both windows together.
    pub window_l2: T,
}

/// `case,mode,K,region,L2,Linf,TV,mu_overall`, three rows per report:
/// `pre`, `post` and `overall` (sums of the regional Linf and TV).
pub fn write_report<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    rows: &[ReportRow<T>],
) -> Result<()> {
    let mut w = csv_start(path, header, "case,mode,K,region,L2,Linf,TV,mu_overall")?;
    for r in rows {
        let k = r.k.map_or(String::new(), num);
        let rep = &r.report;
        for (region, l2, linf, tv) in [
            ("pre", rep.pre.l2, rep.pre.linf, rep.pre.tv),
            ("post", rep.post.l2, rep.post.linf, rep.post.tv),
            ("overall", r.window_l2, rep.overall_linf, rep.overall_tv),
        ] {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.case,
                r.mode,
                k,
                region,
                num(l2),
                num(linf),
                num(tv),
                num(rep.mu)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `x,rho_num,rho_exact` along the sampling line.
pub fn write_line_profile<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    profile: &LineProfile<T>,
) -> Result<()> {
    let mut w = csv_start(path, header, "x,rho_num,rho_exact")?;
    for ((x, n), e) in profile
        .xs
        .iter()
        .zip(&profile.rho_num)
        .zip(&profile.rho_exact)
    {
        writeln!(w, "{},{},{}", num(*x), num(*n), num(*e))?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK structured-points file with cell density.
pub fn write_vtk_density<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    field: &CellField<T>,
) -> Result<()> {
    let mesh = field.mesh();
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let b = mesh.bounds();
    let mut w = create(path)?;
    writeln!(w, "# vtk DataFile Version 3.0")?;
    // the title line is limited to 256 characters
    let title: String = header.one_line().chars().take(255).collect();
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 1", nx + 1, ny + 1)?;
    writeln!(w, "ORIGIN {} {} 0", num(b.x0), num(b.y0))?;
    writeln!(w, "SPACING {} {} 1", num(mesh.dx()), num(mesh.dy()))?;
    writeln!(w, "CELL_DATA {}", nx * ny)?;
    writeln!(w, "SCALARS density double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            writeln!(w, "{}", num(field.get(i, j).rho))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a limiting-mode comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow<T> {
    pub setting: String,
    pub k: Option<T>,
    pub flagged_cells: usize,
    pub iterations: usize,
    pub final_rn: T,
    pub min_rn: T,
    pub converged: bool,
    pub stalled: bool,
    pub window_l2: T,
    pub window_linf: T,
    pub report: ShockLineReport<T>,
}

pub const COMPARE_COLUMNS: &str =
    "setting,K,flagged_cells,iterations,final_RN,min_RN,converged,stalled,\
window_L2,window_Linf,pre_Linf,pre_TV,post_Linf,post_TV,overall_Linf,overall_TV,mu";

/// Combined comparison table, rows in the given order.
pub fn write_compare<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    rows: &[CompareRow<T>],
) -> Result<()> {
    let mut w = csv_start(path, header, COMPARE_COLUMNS)?;
    for r in rows {
        let rep = &r.report;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.setting,
            r.k.map_or(String::new(), num),
            r.flagged_cells,
            r.iterations,
            num(r.final_rn),
            num(r.min_rn),
            r.converged,
            r.stalled,
            num(r.window_l2),
            num(r.window_linf),
            num(rep.pre.linf),
            num(rep.pre.tv),
            num(rep.post.linf),
            num(rep.post.tv),
            num(rep.overall_linf),
            num(rep.overall_tv),
            num(rep.mu)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Flag counts for one threshold. The side counts exist only for cases
/// with an exact shock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlagSummaryRow<T> {
    pub k: T,
    pub flagged: usize,
    pub sides: Option<(usize, usize)>,
}

/// `K,flagged,pre_shock,post_shock`; side columns empty without an exact
/// shock.
pub fn write_flag_summary<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    rows: &[FlagSummaryRow<T>],
) -> Result<()> {
    let mut w = csv_start(path, header, "K,flagged,pre_shock,post_shock")?;
    for r in rows {
        let (pre, post) = r.sides.map_or((String::new(), String::new()), |(a, b)| {
            (a.to_string(), b.to_string())
        });
        writeln!(w, "{},{},{},{}", num(r.k), r.flagged, pre, post)?;
    }
    w.flush()?;
    Ok(())
}

/// Mass, momentum and energy totals of an unsteady run per step:
/// `step,time,dt,flagged,mass,mom_x,mom_y,energy`.
pub fn write_unsteady_log<T: Real>(
    path: &Path,
    header: &ArtifactHeader,
    steps: &[crate::solver::UnsteadyStep<T>],
) -> Result<()> {
    let mut w = csv_start(path, header, "step,time,dt,flagged,mass,mom_x,mom_y,energy")?;
    for (k, s) in steps.iter().enumerate() {
        let t = s.totals;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            k + 1,
            num(s.time),
            num(s.dt),
            s.mask_count,
            num(t[0]),
            num(t[1]),
            num(t[2]),
            num(t[3])
        )?;
    }
    w.flush()?;
    Ok(())
}

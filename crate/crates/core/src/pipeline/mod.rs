//! Staged pipeline over shared artifacts in the output directory.
//!
//! `solve` writes the field, `postproc` the cross-sections and the per-angle
//! report, `chars` the characteristic curves, `goursat` the characteristic
//! mesh and the sonic front, `validate` only the boundary-data checks, and
//! `report` summarises `run.ndjson`. Every stage appends one record to
//! `run.ndjson`; CSVs are rewritten and byte-reproducible for a given config.

pub mod config;
pub mod io;

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};

use crate::chars::{self, CharOptions, Family, SimpleWaveFoot};
use crate::error::{Error, Result};
use crate::fv::{self, Bounds, FvField, MappedGrid, SolverConfig};
use crate::gas::{four_quadrant_states, GasLaw, PolarPoint, QuadrantData, State};
use crate::goursat::{self, BoundaryData, CharMesh, ExtractOptions};
use crate::selfsim::{self, SelfSimField};

pub use config::{DataMode, RunConfig};
use io::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Solve,
    Postproc,
    Chars,
    Goursat,
    Validate,
    Report,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Solve => "solve",
            Stage::Postproc => "postproc",
            Stage::Chars => "chars",
            Stage::Goursat => "goursat",
            Stage::Validate => "validate",
            Stage::Report => "report",
        }
    }
}

/// Process exit code for an error: 2 for configuration problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

pub fn gas_and_data(cfg: &RunConfig) -> Result<(GasLaw, QuadrantData)> {
    let gl = GasLaw::new(cfg.gamma)?;
    let qd = four_quadrant_states(&gl, cfg.rho1, cfg.rho4)?;
    Ok((gl, qd))
}

pub fn grid(cfg: &RunConfig) -> Result<Arc<MappedGrid>> {
    let b = Bounds::annulus(cfg.rmin, cfg.rmax, cfg.thetamin.to_radians(), cfg.thetamax.to_radians());
    Ok(Arc::new(MappedGrid::polar(cfg.nr, cfg.ntheta, b)?))
}

pub fn solver_config(cfg: &RunConfig) -> SolverConfig {
    let mut s = SolverConfig::new(cfg.order);
    s.cfl = cfg.cfl;
    s.limiter = cfg.limiter;
    s.t_final = cfg.t_final;
    s
}

/// Runs the stages in order, stopping at the first error.
pub fn run_pipeline(cfg: &RunConfig, stages: &[Stage]) -> Result<Vec<Value>> {
    std::fs::create_dir_all(&cfg.outdir)?;
    stages.iter().map(|s| run_stage(cfg, *s)).collect()
}

/// Runs one stage and appends its record to `run.ndjson`.
pub fn run_stage(cfg: &RunConfig, stage: Stage) -> Result<Value> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.outdir)?;
    let t0 = Instant::now();
    let body = match stage {
        Stage::Solve => stage_solve(cfg)?,
        Stage::Postproc => stage_postproc(cfg)?,
        Stage::Chars => stage_chars(cfg)?,
        Stage::Goursat => stage_goursat(cfg, true)?,
        Stage::Validate => stage_goursat(cfg, false)?,
        Stage::Report => stage_report(cfg)?,
    };
    let mut rec = json!({
        "run_id": cfg.run_id(),
        "stage": stage.name(),
        "config": cfg.to_json(),
        "wall_seconds": t0.elapsed().as_secs_f64(),
    });
    if let (Value::Object(r), Value::Object(b)) = (&mut rec, body) {
        r.extend(b);
    }
    append_ndjson(&cfg.outdir.join(RUN_NDJSON), std::slice::from_ref(&rec))?;
    Ok(rec)
}

fn require(cfg: &RunConfig, artifact: &str, stage: Stage) -> Result<std::path::PathBuf> {
    let p = cfg.outdir.join(artifact);
    if p.is_file() {
        Ok(p)
    } else {
        Err(Error::MissingArtifact { artifact: artifact.into(), stage: stage.name().into() })
    }
}

fn stage_solve(cfg: &RunConfig) -> Result<Value> {
    let (gl, qd) = gas_and_data(cfg)?;
    let g = grid(cfg)?;
    let (field, log) = fv::solve(&gl, &qd, g.clone(), &solver_config(cfg))?;
    write_field(&cfg.outdir.join(FIELD_CSV), &gl, &field)?;
    let (rho_min, rho_max) = field.density_range();
    Ok(json!({
        "steps": log.steps,
        "retries": log.retries,
        "dt_min": log.dt_min,
        "dt_max": log.dt_max,
        "solver_seconds": log.wall_seconds,
        "time": field.time,
        "rho_min": rho_min,
        "rho_max": rho_max,
    }))
}

/// `field.csv`, ordered by angle then radius.
pub fn write_field(path: &Path, gl: &GasLaw, field: &FvField) -> Result<()> {
    let g = &field.grid;
    let rows = (0..g.n2()).flat_map(|j| (0..g.n1()).map(move |i| (i, j))).map(|(i, j)| {
        let (r, th) = g.comp_center(i, j);
        let (x, y) = g.center(i, j);
        let s = field.at(i, j);
        let p = gl.pressure_unchecked(s.rho);
        FieldRow { r, theta: th.to_degrees(), x, y, rho: s.rho, m: s.m, n: s.n, p, c2: gl.c2_of_p(p) }
    });
    write_csv(path, rows)
}

/// Reads `field.csv` back onto the configured grid.
pub fn read_field(cfg: &RunConfig) -> Result<FvField> {
    let path = require(cfg, FIELD_CSV, Stage::Solve)?;
    let g = grid(cfg)?;
    let rows: Vec<FieldRow> = read_csv(&path)?;
    if rows.len() != g.len() {
        return Err(Error::Parse(format!("{FIELD_CSV} has {} rows for a {}x{} grid", rows.len(), g.n1(), g.n2())));
    }
    let mut q = vec![State::new(0.0, 0.0, 0.0); g.len()];
    for (k, row) in rows.iter().enumerate() {
        let (i, j) = (k % g.n1(), k / g.n1());
        let (r, th) = g.comp_center(i, j);
        if (row.r - r).abs() > 1e-9 * r.max(1.0) || (row.theta.to_radians() - th).abs() > 1e-9 {
            return Err(Error::Parse(format!("{FIELD_CSV} row {k} does not match the configured grid")));
        }
        q[g.index(i, j)] = State::new(row.rho, row.m, row.n);
    }
    Ok(FvField { grid: g, q, time: cfg.t_final })
}

pub fn selfsim_field(cfg: &RunConfig) -> Result<SelfSimField> {
    let (gl, _) = gas_and_data(cfg)?;
    selfsim::to_selfsimilar(&gl, &read_field(cfg)?)
}

fn stage_postproc(cfg: &RunConfig) -> Result<Value> {
    let ss = selfsim_field(cfg)?;
    let angles = selfsim::angle_sweep(0.0, 90.0, cfg.angle_step_deg);
    let rep = selfsim::scan_angles(&ss, &angles, cfg.jump_threshold, cfg.window)?;
    let mut sections = Vec::new();
    for deg in selfsim::angle_sweep(0.0, 90.0, cfg.section_step_deg) {
        let cs = selfsim::radial_cross_section(&ss, deg.to_radians())?;
        let theta_deg = cs.theta.to_degrees();
        sections.extend(cs.points.iter().map(|p| SectionRow { theta_deg, r: p.r, rho: p.rho, p: p.p, u: p.u }));
    }
    write_csv(&cfg.outdir.join(CROSSSECTIONS_CSV), sections)?;
    let rows = rep.angles.iter().map(|a| ReportRow {
        theta_deg: a.theta_deg,
        class: a.class.to_string(),
        transition_r: a.transition_r,
    });
    write_csv(&cfg.outdir.join(REPORT_CSV), rows)?;
    let count = |c: selfsim::Transition| rep.angles.iter().filter(|a| a.class == c).count();
    Ok(json!({
        "theta3_interval_deg": rep.theta3_interval.map(|(a, b)| vec![a, b]),
        "shock_rays": count(selfsim::Transition::Shock),
        "smooth_sonic_rays": count(selfsim::Transition::SmoothSonic),
        "unclassified_rays": count(selfsim::Transition::Unclassified),
    }))
}

/// `Gamma23` data for the configured mode.
pub fn boundary_data(cfg: &RunConfig) -> Result<BoundaryData> {
    let (gl, qd) = gas_and_data(cfg)?;
    match cfg.mode {
        DataMode::Coupled => {
            require(cfg, REPORT_CSV, Stage::Postproc)?;
            let ss = selfsim_field(cfg)?;
            goursat::gamma23_from_field(&ss, &qd, &ExtractOptions::default())
        }
        DataMode::Prescribed => {
            let path = cfg.gamma23_table.as_ref().ok_or_else(|| Error::Config("gamma23_table is not set".into()))?;
            let rows: Vec<TableRow> = read_csv(path)?;
            let th: Vec<f64> = rows.iter().map(|r| r.theta_deg.to_radians()).collect();
            let f: Vec<f64> = rows.iter().map(|r| r.f).collect();
            let g: Vec<f64> = rows.iter().map(|r| r.g).collect();
            goursat::gamma23_from_table(&gl, &qd, &th, &f, &g)
        }
    }
}

fn curve_rows(c: &chars::CharCurve) -> impl Iterator<Item = CurveRow> + '_ {
    c.samples.iter().map(move |s| CurveRow {
        family: c.family.label().into(),
        theta: s.theta.to_degrees(),
        r: s.r,
        p: s.p,
    })
}

fn stage_chars(cfg: &RunConfig) -> Result<Value> {
    let (gl, qd) = gas_and_data(cfg)?;
    let opt = CharOptions::default();
    let r0 = |r: f64, th: f64| Ok(chars::r0_pressure(&gl, r, th));
    let th2 = qd.theta2();
    let closed = |f: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64, p: &dyn Fn(f64, f64) -> f64| {
        (0..=200)
            .filter_map(|k| {
                let th = lo + (hi - lo) * k as f64 / 200.0;
                let r = f(th).ok()?;
                Some(CurveRow { family: Family::Plus.label().into(), theta: th.to_degrees(), r, p: p(r, th) })
            })
            .collect::<Vec<_>>()
    };
    let g12 = closed(&|th| chars::gamma12(&qd, th), th2, FRAC_PI_2, &|r, th| chars::r0_pressure(&gl, r, th));
    write_csv(&cfg.outdir.join("chars_gamma12.csv"), g12.iter())?;
    let g24_hi = (FRAC_PI_2 - chars::gamma24_phase(&qd) - 0.2).max(th2);
    let g24 = closed(&|th| chars::gamma24(&qd, th), th2, g24_hi, &|_, _| qd.p4);
    write_csv(&cfg.outdir.join("chars_gamma24.csv"), g24.iter())?;
    // both families through interior points of the rarefaction region
    let mut fan = Vec::new();
    for k in 1..8 {
        let th = th2 + (FRAC_PI_2 - th2) * k as f64 / 8.0;
        let eta = qd.c4 + (qd.c1 - qd.c4) * 0.5;
        let start = PolarPoint { r: eta / th.sin(), theta: th };
        for fam in [Family::Plus, Family::Minus] {
            for end in [th2, FRAC_PI_2] {
                if let Ok(c) = chars::integrate_char(&gl, r0, start, fam, end, &opt) {
                    if c.samples.len() > 1 {
                        fan.push(c);
                    }
                }
            }
        }
    }
    write_csv(&cfg.outdir.join("chars_fan.csv"), fan.iter().flat_map(curve_rows))?;
    let mut out = json!({
        "gamma12_samples": g12.len(),
        "gamma24_samples": g24.len(),
        "fan_curves": fan.len(),
    });
    // simple waves need Gamma23 data
    let have_data = match cfg.mode {
        DataMode::Coupled => cfg.outdir.join(REPORT_CSV).is_file() && cfg.outdir.join(FIELD_CSV).is_file(),
        DataMode::Prescribed => true,
    };
    if have_data {
        let bd = boundary_data(cfg)?;
        let step = (bd.gamma23.len() / 40).max(1);
        let feet: Vec<SimpleWaveFoot> = bd
            .gamma23
            .iter()
            .step_by(step)
            .filter_map(|a| SimpleWaveFoot::new(&gl, a.theta, a.r, a.p).ok())
            .collect();
        let mut rows = Vec::new();
        for f in &feet {
            for k in 0..=50 {
                let th = f.theta0 - 0.5 * k as f64 / 50.0;
                if let Ok(r) = chars::simple_wave_char(f, th) {
                    rows.push(CurveRow { family: Family::Plus.label().into(), theta: th.to_degrees(), r, p: f.p0 });
                }
            }
        }
        write_csv(&cfg.outdir.join("chars_simple_wave.csv"), rows)?;
        let env = chars::envelope_point(&feet, 0.0, FRAC_PI_2)?;
        write_csv(
            &cfg.outdir.join(ENVELOPE_CSV),
            env.points.iter().map(|p| EnvelopeRow { theta: p.theta.to_degrees(), r: p.r }),
        )?;
        out["simple_wave_feet"] = json!(feet.len());
        out["envelope_points"] = json!(env.points.len());
        out["xi4"] = json!(env.xi4.map(|p| json!({"r": p.r, "theta_deg": p.theta.to_degrees()})));
    } else {
        out["simple_wave_feet"] = json!(0);
        out["note"] = json!("no Gamma23 data yet: run solve and postproc for the simple waves and the envelope");
    }
    Ok(out)
}

pub fn mesh_rows(mesh: &CharMesh) -> impl Iterator<Item = MeshRow> + '_ {
    mesh.iter().map(|(i, j, n)| MeshRow {
        i,
        j,
        theta: n.theta.to_degrees(),
        r: n.r,
        p: n.p,
        r_dir: n.r_dir,
        s_dir: n.s_dir,
        t: n.t,
        sonic_flag: n.sonic as u8,
    })
}

fn stage_goursat(cfg: &RunConfig, march: bool) -> Result<Value> {
    let (gl, qd) = gas_and_data(cfg)?;
    let bd = boundary_data(cfg)?;
    let rep = goursat::validate_boundary_data(&gl, &qd, &bd, cfg.validation_tol)?;
    let entries: Vec<Value> = rep.checks.iter().map(|c| serde_json::to_value(c).unwrap_or(Value::Null)).collect();
    // rewritten, not appended: it describes the current data
    let vpath = cfg.outdir.join(VALIDATION_NDJSON);
    if vpath.exists() {
        std::fs::remove_file(&vpath)?;
    }
    append_ndjson(&vpath, &entries)?;
    let failed: Vec<&str> = rep.failures().iter().filter(|c| c.hard).map(|c| c.name).collect();
    let warnings: Vec<&str> = rep.failures().iter().filter(|c| !c.hard).map(|c| c.name).collect();
    let mut out = json!({
        "theta3_deg": bd.theta3.to_degrees(),
        "validation_accepted": rep.accepted(),
        "validation_failed": failed,
        "validation_warnings": warnings,
    });
    if !march {
        if !rep.accepted() {
            return Err(Error::Analysis(format!("boundary data rejected: {}", failed.join(", "))));
        }
        return Ok(out);
    }
    if !rep.accepted() && cfg.require_valid {
        return Err(Error::Analysis(format!(
            "boundary data rejected ({}); set require_valid=false to march anyway",
            failed.join(", ")
        )));
    }
    let mesh = goursat::goursat_march(&gl, &qd, &bd, cfg.mesh_n, cfg.t_cut)?;
    write_csv(&cfg.outdir.join(MESH_CSV), mesh_rows(&mesh))?;
    let front = goursat::extract_sonic(&gl, &mesh);
    write_csv(
        &cfg.outdir.join(SONIC_FRONT_CSV),
        front.samples.iter().map(|s| FrontRow { theta: s.theta.to_degrees(), r: s.r, rs_value: s.rs_value }),
    )?;
    let diag = goursat::near_sonic_diagnostics(&mesh, cfg.t_band);
    let coarse = goursat::goursat_march(&gl, &qd, &bd, (cfg.mesh_n / 2).max(1), cfg.t_cut)?;
    let coarse_sup = goursat::near_sonic_diagnostics(&coarse, cfg.t_band).band_sup;
    let hard = mesh.hard_breaches();
    let kinds = |k: goursat::BreachKind| hard.iter().filter(|b| b.kind == k).count();
    out["nodes"] = json!(mesh.len());
    out["sonic_nodes"] = json!(mesh.iter().filter(|(_, _, n)| n.sonic).count());
    out["hard_breaches"] = json!({
        "r_non_positive": kinds(goursat::BreachKind::RNonPositive),
        "s_non_positive": kinds(goursat::BreachKind::SNonPositive),
        "pressure_bounds": kinds(goursat::BreachKind::PressureBounds),
        "pressure_decreasing": kinds(goursat::BreachKind::PressureDecreasing),
    });
    out["flagged_node_breaches"] = json!(mesh.breaches.len() - hard.len());
    out["front_samples"] = json!(front.samples.len());
    out["front_strictly_decreasing"] = json!(front.strictly_decreasing(1e-6));
    out["band_sup"] = json!(diag.band_sup);
    out["band_sup_half_mesh"] = json!(coarse_sup);
    out["band_nodes"] = json!(diag.band.len());
    out["excluded_nodes"] = json!(diag.excluded);
    Ok(out)
}

fn stage_report(cfg: &RunConfig) -> Result<Value> {
    let path = require(cfg, RUN_NDJSON, Stage::Solve)?;
    let id = cfg.run_id();
    let records: Vec<Value> = read_ndjson(&path)?.into_iter().filter(|r| r["run_id"] == id.as_str()).collect();
    let mut latest = serde_json::Map::new();
    for r in records {
        if let Some(s) = r["stage"].as_str() {
            if s != "report" {
                latest.insert(s.to_string(), r);
            }
        }
    }
    let pick = |stage: &str, key: &str| latest.get(stage).map(|r| r[key].clone()).unwrap_or(Value::Null);
    Ok(json!({
        "stages_seen": latest.keys().cloned().collect::<Vec<_>>(),
        "theta3_interval_deg": pick("postproc", "theta3_interval_deg"),
        "validation_accepted": pick("goursat", "validation_accepted"),
        "hard_breaches": pick("goursat", "hard_breaches"),
        "front_samples": pick("goursat", "front_samples"),
        "front_strictly_decreasing": pick("goursat", "front_strictly_decreasing"),
        "band_sup": pick("goursat", "band_sup"),
        "band_sup_half_mesh": pick("goursat", "band_sup_half_mesh"),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &Path) -> RunConfig {
        let mut c = RunConfig::default();
        c.apply_text("nr=40\nntheta=60\nt_final=0.2\nangle_step_deg=10\nmesh_n=20").unwrap();
        c.outdir = dir.to_path_buf();
        c
    }

    #[test]
    fn stage_dependencies_are_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let e = run_stage(&cfg, Stage::Postproc).unwrap_err();
        assert!(matches!(&e, Error::MissingArtifact { stage, .. } if stage == "solve"), "{e}");
        assert_eq!(exit_code(&e), 1);
        let e = run_stage(&cfg, Stage::Goursat).unwrap_err();
        assert!(matches!(&e, Error::MissingArtifact { stage, .. } if stage == "postproc"), "{e}");
    }

    #[test]
    fn chars_alone_writes_closed_form_curves() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        let rec = run_stage(&cfg, Stage::Chars).unwrap();
        assert_eq!(rec["simple_wave_feet"], 0);
        for f in ["chars_gamma12.csv", "chars_gamma24.csv", "chars_fan.csv"] {
            let rows: Vec<CurveRow> = read_csv(&dir.path().join(f)).unwrap();
            assert!(rows.len() > 10, "{f}");
        }
        let rows: Vec<CurveRow> = read_csv(&dir.path().join("chars_gamma12.csv")).unwrap();
        let (gl, qd) = gas_and_data(&cfg).unwrap();
        let _ = gl;
        for r in rows {
            assert!((r.r - qd.c1 * r.theta.to_radians().sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn solve_then_postproc_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(dir.path());
        run_pipeline(&cfg, &[Stage::Solve, Stage::Postproc]).unwrap();
        let first: Vec<Vec<u8>> = [FIELD_CSV, REPORT_CSV, CROSSSECTIONS_CSV]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        run_pipeline(&cfg, &[Stage::Solve, Stage::Postproc]).unwrap();
        for (k, f) in [FIELD_CSV, REPORT_CSV, CROSSSECTIONS_CSV].iter().enumerate() {
            assert_eq!(std::fs::read(dir.path().join(f)).unwrap(), first[k], "{f}");
        }
        // the round trip through field.csv is exact
        let (gl, qd) = gas_and_data(&cfg).unwrap();
        let (field, _) = fv::solve(&gl, &qd, grid(&cfg).unwrap(), &solver_config(&cfg)).unwrap();
        assert_eq!(read_field(&cfg).unwrap().q, field.q);
        let records = read_ndjson(&dir.path().join(RUN_NDJSON)).unwrap();
        assert_eq!(records.len(), 4);
        assert!(records.iter().all(|r| r["run_id"] == cfg.run_id().as_str()));
        let rep = run_stage(&cfg, Stage::Report).unwrap();
        assert_eq!(rep["stages_seen"], json!(["postproc", "solve"]));
    }
}

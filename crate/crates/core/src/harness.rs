//! Experiment commands: each reads an [`ExperimentConfig`], writes CSV and
//! snapshot files plus `metadata.json` into the output directory, and maps
//! failures to exit codes (0 success, 1 numerical failure, 2 config error).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read as _};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::ansatz::build_ansatz;
use crate::checks::moyal_property_suite;
use crate::config::{parse_config, ConfigError, ExperimentConfig, InitialConfig};
use crate::error::Error;
use crate::exact_states::{calibrate_theta, optimal_sigma, phi_n, plateau, sigma_scan, wall, StationaryParams};
use crate::moyal::LandauBasis;
use crate::pde::{fitted_radial_acceleration, landau_truncation_error, DiagnosticsRow, Evolution, NlsModel, StarBackend};
use crate::reduced::{
    evolve_peak, fixed_points, landau_cell_areas, lstar_asymptotic, lstar_numeric, peak_force, pn_potential,
    suggested_dt, LatticeVariant, PeakTrajectory,
};
use crate::spectral::{ComplexField2D, GridSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    StarCheck,
    StationaryResidual,
    PnLandscape,
    FixedPoints,
    EvolveReduced,
    EvolvePde,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::StarCheck => "star-check",
            Command::StationaryResidual => "stationary-residual",
            Command::PnLandscape => "pn-landscape",
            Command::FixedPoints => "fixed-points",
            Command::EvolveReduced => "evolve-reduced",
            Command::EvolvePde => "evolve-pde",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Numerical(_) | RunError::Failed(_) => "numerical",
            RunError::Io(_) => "io",
        }
    }
}

/// `{:.16e}`: seventeen significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> io::Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)
}

fn write_json(path: &Path, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Reads the config at `config_path`, runs `command` and returns the exit
/// code. On failure an `error.json` record is written to the output directory.
pub fn run_cli(command: Command, config_path: &Path, output: Option<&Path>) -> i32 {
    let text = match fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            let err = RunError::Config(ConfigError::Io(format!("{}: {e}", config_path.display())));
            return report(command, &fallback_dir(None, output), &err);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return report(command, &fallback_dir(Some(&text), output), &RunError::Config(e)),
    };
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    match run(command, &cfg, &dir) {
        Ok(()) => 0,
        Err(e) => report(command, &dir, &e),
    }
}

// Output directory for a config that failed to parse: the override, else a
// readable `output_dir` key, else the default.
fn fallback_dir(text: Option<&str>, output: Option<&Path>) -> PathBuf {
    if let Some(o) = output {
        return o.to_path_buf();
    }
    text.and_then(|t| serde_json::from_str::<Value>(t).ok())
        .and_then(|v| v.get("output_dir").and_then(Value::as_str).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(ExperimentConfig::default().output_dir))
}

fn report(command: Command, dir: &Path, err: &RunError) -> i32 {
    let code = err.exit_code();
    eprintln!("error: {err}");
    let field = match err {
        RunError::Config(ConfigError::Invalid { field, .. }) => Some(field.clone()),
        _ => None,
    };
    let record = json!({
        "command": command.name(),
        "version": VERSION,
        "kind": err.kind(),
        "field": field,
        "message": err.to_string(),
        "exit_code": code,
    });
    if fs::create_dir_all(dir).and_then(|_| write_json(&dir.join("error.json"), &record)).is_err() {
        eprintln!("error: could not write error record to {}", dir.display());
    }
    code
}

/// Runs one command into `dir`, writing `metadata.json` on completion.
pub fn run(command: Command, cfg: &ExperimentConfig, dir: &Path) -> Result<(), RunError> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    let results = match command {
        Command::StarCheck => star_check(cfg, dir),
        Command::StationaryResidual => stationary_residual(cfg, dir),
        Command::PnLandscape => pn_landscape(cfg, dir),
        Command::FixedPoints => fixed_points_cmd(cfg, dir),
        Command::EvolveReduced => evolve_reduced(cfg, dir),
        Command::EvolvePde => evolve_pde(cfg, dir),
        Command::Compare => compare(cfg, dir),
    };
    let (results, failure) = match results {
        Ok(r) => (r, None),
        Err(Partial { results, error }) => (results, Some(error)),
    };
    let metadata = json!({
        "command": command.name(),
        "version": VERSION,
        "config": cfg,
        "results": results,
    });
    write_json(&dir.join("metadata.json"), &metadata)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

// A failure that still carries the results gathered so far.
struct Partial {
    results: Value,
    error: RunError,
}

impl<E: Into<RunError>> From<E> for Partial {
    fn from(e: E) -> Self {
        Partial { results: Value::Null, error: e.into() }
    }
}

type CmdResult = Result<Value, Partial>;

fn star_check(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let checks = moyal_property_suite(cfg.grid_spec(), 2024)?;
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            let status = if c.pass { "pass" } else { "fail" };
            vec![c.name.clone(), fmt_f64(c.value), fmt_f64(c.tolerance), status.to_string()]
        })
        .collect();
    write_csv(&dir.join("star_check.csv"), "property,value,tolerance,status", &rows)?;
    print!("{}", describe_checks(&checks));
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let results = json!({ "all_pass": failed.is_empty(), "failed": failed });
    if failed.is_empty() {
        Ok(results)
    } else {
        Err(Partial { results, error: RunError::Failed(format!("properties failed: {}", failed.join(", "))) })
    }
}

fn stationary_states(cfg: &ExperimentConfig) -> Result<Vec<(String, ComplexField2D)>, Error> {
    let g = cfg.grid_spec();
    let n = cfg.stationary.n_max;
    let mut states: Vec<_> = (0..=n).map(|j| (format!("phi{j}"), phi_n(j, g))).collect();
    states.push((format!("plateau{n}"), plateau(n, g)));
    states.push((format!("wall{n}"), wall(n, g)?));
    Ok(states)
}

fn stationary_residual(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let p = cfg.moyal();
    let st = &cfg.stationary;
    let sigmas: Vec<f64> = (0..st.sigma_steps)
        .map(|i| st.sigma_min + (st.sigma_max - st.sigma_min) * i as f64 / (st.sigma_steps - 1) as f64)
        .collect();
    let quoted = StationaryParams::quoted_sigma(p);
    let mut scan_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for (name, zeta) in stationary_states(cfg)? {
        for drop in [true, false] {
            for (s, r) in sigma_scan(&zeta, p, drop, &sigmas)? {
                scan_rows.push(vec![name.clone(), drop.to_string(), fmt_f64(s), fmt_f64(r)]);
            }
            let (s_opt, r_opt) = optimal_sigma(&zeta, p, drop)?;
            let r_quoted = sigma_scan(&zeta, p, drop, &[quoted])?[0].1;
            summary_rows.push(vec![
                name.clone(),
                drop.to_string(),
                fmt_f64(s_opt),
                fmt_f64(r_opt),
                fmt_f64(quoted),
                fmt_f64(r_quoted),
            ]);
        }
    }
    write_csv(&dir.join("stationary_residual.csv"), "state,drop_laplacian,sigma,residual", &scan_rows)?;
    write_csv(
        &dir.join("stationary_summary.csv"),
        "state,drop_laplacian,sigma_opt,residual_opt,sigma_quoted,residual_quoted",
        &summary_rows,
    )?;
    let theta_star = calibrate_theta(3, cfg.grid_spec())?;
    Ok(json!({ "calibrated_theta": theta_star, "quoted_sigma": quoted }))
}

fn pn_landscape(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let p = cfg.moyal();
    let sw = &cfg.sweep;
    let pn = &cfg.pn;
    let mut rows = Vec::with_capacity(sw.steps);
    for i in 0..sw.steps {
        let r = sw.r_min + (sw.r_max - sw.r_min) * i as f64 / (sw.steps - 1) as f64;
        let f1 = pn_potential(r, pn.omega, pn.velocity, p, LatticeVariant::Charge1Quadratic)?;
        let fm = pn_potential(r, pn.omega, pn.velocity, p, LatticeVariant::ChargemEquispaced)?;
        let num = lstar_numeric(pn.a, pn.omega, r, pn.velocity, p)?;
        let asy = lstar_asymptotic(pn.a, pn.omega, r, pn.velocity, p)?;
        let gap = if num != 0.0 { (num - asy).abs() / num.abs() } else { f64::NAN };
        rows.push(vec![fmt_f64(r), fmt_f64(f1), fmt_f64(fm), fmt_f64(num), fmt_f64(asy), fmt_f64(gap)]);
    }
    write_csv(
        &dir.join("pn_landscape.csv"),
        "R,F_charge1,F_chargem,lstar_numeric,lstar_asymptotic,relative_gap",
        &rows,
    )?;
    Ok(json!({ "points": sw.steps }))
}

fn fixed_points_cmd(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let p = cfg.moyal();
    let n_max = cfg.fixed_points.n_max;
    let mut summary = serde_json::Map::new();
    for variant in LatticeVariant::ALL {
        // One extra root so that every listed point has a cell area.
        let fps = fixed_points(p, n_max + 1, variant)?;
        let areas = landau_cell_areas(&fps)?;
        let rows: Vec<Vec<String>> = fps[..n_max]
            .iter()
            .zip(&areas)
            .map(|(fp, a)| {
                vec![
                    fp.index.to_string(),
                    fmt_f64(fp.radius),
                    fp.stability.name().to_string(),
                    fmt_f64(fp.paper_radius),
                    fmt_f64(*a),
                ]
            })
            .collect();
        write_csv(&dir.join(format!("fixed_points_{variant}.csv")), "n,R,stability,paper_R,cell_area", &rows)?;
        let last = areas[n_max - 1];
        let change = if n_max >= 2 { (areas[n_max - 1] - areas[n_max - 2]).abs() / areas[n_max - 2] } else { f64::NAN };
        summary.insert(
            variant.name().to_string(),
            json!({
                "last_cell_area": last,
                "last_relative_change": change,
            }),
        );
    }
    summary.insert("cell_area_limit_from_roots".into(), json!(2.0 * PI * PI * p.theta()));
    summary.insert("cell_area_quoted".into(), json!(PI * PI * p.theta()));
    Ok(Value::Object(summary))
}

fn reduced_run(cfg: &ExperimentConfig, dt: f64, t_end: f64) -> Result<PeakTrajectory, Error> {
    let a = &cfg.ansatz;
    evolve_peak(a.radius, a.velocity, a.a, a.omega, cfg.moyal(), cfg.variant, dt, t_end)
}

fn evolve_reduced(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let rc = &cfg.reduced;
    let traj = reduced_run(cfg, rc.dt, rc.t_end)?;
    let last = traj.samples.len() - 1;
    let rows: Vec<Vec<String>> = traj
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % rc.sample_every == 0 || *i == last)
        .map(|(_, s)| vec![fmt_f64(s.t), fmt_f64(s.radius), fmt_f64(s.velocity)])
        .collect();
    write_csv(&dir.join("reduced.csv"), "t,R,V", &rows)?;
    let drift = traj.samples.iter().map(|s| (s.invariant - traj.samples[0].invariant).abs()).fold(0.0, f64::max);
    let a = &cfg.ansatz;
    let results = json!({
        "samples": traj.samples.len(),
        "max_invariant_drift": drift,
        "suggested_dt_at_R0": suggested_dt(a.radius, a.a, a.omega, cfg.moyal(), cfg.variant),
        "aborted": traj.abort.as_ref().map(|e| e.to_string()),
    });
    match traj.abort {
        Some(e) => Err(Partial { results, error: e.into() }),
        None => Ok(results),
    }
}

fn initial_field(cfg: &ExperimentConfig) -> Result<ComplexField2D, Error> {
    match cfg.evolution.initial {
        InitialConfig::Ansatz => build_ansatz(&cfg.vortex(), cfg.grid_spec()),
        InitialConfig::Phi(n) => Ok(phi_n(n, cfg.grid_spec())),
    }
}

fn diagnostics_rows(run: &Evolution) -> Vec<Vec<String>> {
    run.diagnostics
        .iter()
        .map(|d: &DiagnosticsRow| {
            vec![
                fmt_f64(d.t),
                fmt_f64(d.power),
                fmt_f64(d.energy),
                fmt_opt(d.r_fit),
                fmt_opt(d.omega_fit),
                fmt_opt(d.a_fit),
                fmt_opt(d.v_fit),
                d.winding.map(|w| w.to_string()).unwrap_or_default(),
            ]
        })
        .collect()
}

const TIMESERIES_HEADER: &str = "t,power,energy,R_fit,omega_fit,a_fit,V_fit,winding";

/// Writes `field` as raw little-endian `(re, im)` pairs with a JSON sidecar.
pub fn write_snapshot(
    path: &Path,
    field: &ComplexField2D,
    theta: f64,
    t: f64,
    command: &str,
) -> io::Result<()> {
    let mut bytes = Vec::with_capacity(field.values().len() * 16);
    for z in field.values() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::write(path, bytes)?;
    let g = field.grid();
    let meta = json!({
        "n": g.n(),
        "L": g.half_width(),
        "theta": theta,
        "t": t,
        "command": command,
        "version": VERSION,
    });
    write_json(&sidecar_path(path), &meta)
}

fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.meta.json"))
}

/// Reads a snapshot written by [`write_snapshot`], returning the field and `t`.
pub fn read_snapshot(path: &Path) -> Result<(ComplexField2D, f64), RunError> {
    let meta: Value = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)
        .map_err(|e| RunError::Failed(format!("bad snapshot sidecar: {e}")))?;
    let n = meta["n"].as_u64().ok_or_else(|| RunError::Failed("sidecar lacks n".into()))? as usize;
    let l = meta["L"].as_f64().ok_or_else(|| RunError::Failed("sidecar lacks L".into()))?;
    let t = meta["t"].as_f64().unwrap_or(f64::NAN);
    let grid = GridSpec::new(n, l)?;
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != n * n * 16 {
        return Err(RunError::Failed(format!("snapshot holds {} bytes, expected {}", bytes.len(), n * n * 16)));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            crate::spectral::Complex::new(re, im)
        })
        .collect();
    Ok((ComplexField2D::new(grid, values)?, t))
}

fn pde_summary(model: &NlsModel, run: &Evolution, u0: &ComplexField2D, cfg: &ExperimentConfig) -> Result<Value, Error> {
    let d0 = &run.diagnostics[0];
    let rel = |f: fn(&DiagnosticsRow) -> f64| {
        run.diagnostics.iter().map(|d| (f(d) - f(d0)).abs() / f(d0).abs()).fold(0.0, f64::max)
    };
    let truncation = match cfg.evolution_config().star_backend {
        StarBackend::Landau { cutoff } => {
            Some(landau_truncation_error(u0, &LandauBasis::new(*model.grid(), cfg.moyal(), cutoff)?)?)
        }
        StarBackend::Quadrature => None,
    };
    Ok(json!({
        "samples": run.diagnostics.len(),
        "max_relative_power_drift": rel(|d| d.power),
        "max_relative_energy_drift": rel(|d| d.energy),
        "winding_constant": run.winding_constant(),
        "landau_truncation_error": truncation,
        "aborted": run.abort.as_ref().map(|e| e.to_string()),
    }))
}

fn run_pde(cfg: &ExperimentConfig, dir: &Path, command: Command) -> Result<(Evolution, Value), Partial> {
    let u0 = initial_field(cfg)?;
    let ecfg = cfg.evolution_config();
    let model = NlsModel::new(cfg.grid_spec(), cfg.moyal(), ecfg.star_backend)?;
    let run = model.evolve(&u0, &ecfg)?;
    write_csv(&dir.join("timeseries.csv"), TIMESERIES_HEADER, &diagnostics_rows(&run))?;
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir)?;
    for (i, s) in run.snapshots.iter().enumerate() {
        write_snapshot(&snap_dir.join(format!("snapshot_{i:06}.bin")), &s.field, cfg.theta, s.t, command.name())?;
    }
    let summary = pde_summary(&model, &run, &u0, cfg)?;
    Ok((run, summary))
}

fn evolve_pde(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    let (run, summary) = run_pde(cfg, dir, Command::EvolvePde)?;
    match run.abort {
        Some(e) => Err(Partial { results: summary, error: e.into() }),
        None => Ok(summary),
    }
}

fn compare(cfg: &ExperimentConfig, dir: &Path) -> CmdResult {
    if cfg.evolution.initial != InitialConfig::Ansatz {
        return Err(ConfigError::Invalid {
            field: "evolution.initial".into(),
            reason: "compare requires the ansatz initial datum".into(),
        }
        .into());
    }
    let (run, mut summary) = run_pde(cfg, dir, Command::Compare)?;
    let ecfg = cfg.evolution_config();
    let traj = reduced_run(cfg, ecfg.dt, ecfg.t_end)?;
    let mut rows = Vec::new();
    for (i, d) in run.diagnostics.iter().enumerate() {
        let step = i * ecfg.snapshot_every;
        let (r, v) = traj
            .samples
            .get(step)
            .map(|s| (Some(s.radius), Some(s.velocity)))
            .unwrap_or((None, None));
        rows.push(vec![fmt_f64(d.t), fmt_opt(d.r_fit), fmt_opt(d.v_fit), fmt_opt(r), fmt_opt(v)]);
    }
    write_csv(&dir.join("compare.csv"), "t,R_fit,V_fit,R_reduced,V_reduced", &rows)?;
    let a = &cfg.ansatz;
    let force = peak_force(a.radius, a.a, a.omega, cfg.moyal(), cfg.variant);
    let accel = fitted_radial_acceleration(&run.diagnostics, 5);
    if let Value::Object(m) = &mut summary {
        m.insert("reduced_force_at_R0".into(), json!(force));
        m.insert("pde_initial_radial_acceleration".into(), json!(accel));
        m.insert(
            "sign_agreement".into(),
            json!(accel.map(|x| x.signum() == force.signum())),
        );
        m.insert("reduced_aborted".into(), json!(traj.abort.as_ref().map(|e| e.to_string())));
    }
    match run.abort.or(traj.abort) {
        Some(e) => Err(Partial { results: summary, error: e.into() }),
        None => Ok(summary),
    }
}

/// Renders a [`PropertyCheck`](crate::checks::PropertyCheck) list as text, one line each.
pub fn describe_checks(checks: &[crate::checks::PropertyCheck]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(s, "{:<26} {:>12.3e} (tol {:.1e}) {}", c.name, c.value, c.tolerance, if c.pass { "pass" } else { "fail" });
    }
    s
}

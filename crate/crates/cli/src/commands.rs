use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use saari_core::contour::{trace_level, TraceOptions, DEFAULT_LEVELS};
use saari_core::dynamics::{
    integrate_cartesian, integrate_reduced, relative_drift, Horizon, IntegratorConfig, ReducedTrajectory,
};
use saari_core::export::{write_contours_csv, write_metadata_json, write_trajectory_csv, TrajectoryMetadata};
use saari_core::fixtures::{lagrange_rotating, near_lagrange_states, NearLagrange};
use saari_core::geometry::{central_configurations, mu_derivatives, sweep_critical_points};
use saari_core::ode::{Method, StepControl};
use saari_core::qk::{reconstruct_qk, shape_energy, theta_of_t};
use saari_core::reduction::{cartesian_of_reduced, reduced_of_cartesian, Alpha, ReducedState};
use saari_proof::pipeline::{run_pipeline, PipelineOptions, Stage};

use crate::args::{CentralArgs, ContourArgs, Fixture, MethodArg, OrbitArgs, ProofArgs, QkArgs, SimulateArgs};
use crate::config::{load_initial_state, FileConfig};
use crate::error::CliError;

pub const ENERGY_TOL: f64 = 1e-9;
pub const SAARI_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;
pub const QK_TOL: f64 = 1e-8;
pub const SHAPE_ENERGY_TOL: f64 = 1e-10;
pub const CONTOUR_TOL: f64 = 1e-10;
pub const GRADIENT_TOL: f64 = 1e-12;

/// Side of the default equilateral fixture.
pub const DEFAULT_SIDE: f64 = 2.0;

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn alpha_of(v: Option<f64>) -> Result<Alpha, CliError> {
    let a = v.ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
    Alpha::new(a).map_err(|e| CliError::Usage(e.to_string()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

/// Collects invariant checks and turns failures into exit code 1.
#[derive(Default, Serialize)]
struct Checks {
    items: Vec<Check>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Checks {
    fn add(&mut self, name: &str, value: f64, tolerance: f64) {
        let passed = value < tolerance;
        println!("{} {name}: {} (tolerance {})", if passed { "ok  " } else { "FAIL" }, sci(value), sci(tolerance));
        self.items.push(Check { name: name.into(), value, tolerance, passed });
    }

    fn finish(&self, what: &str) -> Result<(), CliError> {
        let failed: Vec<_> = self.items.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Breach(format!("{what}: {} out of tolerance", failed.join(", "))))
        }
    }
}

struct Orbit {
    alpha: Alpha,
    init: ReducedState,
    config: IntegratorConfig,
}

fn orbit(a: &OrbitArgs, f: &FileConfig) -> Result<Orbit, CliError> {
    let alpha = alpha_of(a.alpha.or(f.alpha))?;
    let init = match (a.initial_state.as_ref(), a.fixture) {
        (Some(p), _) => load_initial_state(p)?,
        (None, Some(fx)) => fixture(fx, alpha, a, f)?,
        (None, None) => match (f.initial_state.as_ref(), f.fixture) {
            (Some(p), _) => load_initial_state(p)?,
            (None, Some(fx)) => fixture(fx, alpha, a, f)?,
            (None, None) => return Err(CliError::Usage("give --fixture or --initial-state".into())),
        },
    };
    let horizon = match (a.t_end, a.s_end) {
        (Some(t), _) => Horizon::Time(t),
        (None, Some(s)) => Horizon::ShapeTime(s),
        (None, None) => match (f.t_end, f.s_end) {
            (Some(_), Some(_)) => return Err(CliError::Usage("config sets both t_end and s_end".into())),
            (Some(t), None) => Horizon::Time(t),
            (None, Some(s)) => Horizon::ShapeTime(s),
            (None, None) => Horizon::Time(10.0),
        },
    };
    let d = StepControl::default();
    let control = StepControl {
        method: match a.method.or(f.method) {
            Some(MethodArg::Rk4) => Method::Rk4,
            Some(MethodArg::Dopri5) | None => Method::Dopri5,
        },
        abs_tol: a.abs_tol.or(f.abs_tol).unwrap_or(d.abs_tol),
        rel_tol: a.rel_tol.or(f.rel_tol).unwrap_or(d.rel_tol),
        max_step: a.max_step.or(f.max_step).unwrap_or(d.max_step),
        min_step: d.min_step,
    };
    control.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let config = IntegratorConfig {
        control,
        horizon,
        output_interval: a.output_interval.or(f.output_interval).unwrap_or(0.05),
    };
    config.output_grid().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Orbit { alpha, init, config })
}

fn fixture(fx: Fixture, alpha: Alpha, a: &OrbitArgs, f: &FileConfig) -> Result<ReducedState, CliError> {
    match fx {
        Fixture::LagrangeRotating => {
            let side = a.side.or(f.side).unwrap_or(DEFAULT_SIDE);
            if !(side > 0.0) {
                return Err(CliError::Usage("--side must be positive".into()));
            }
            Ok(lagrange_rotating(alpha, side))
        }
        Fixture::NearLagrange => {
            let seed = a.seed.or(f.seed).unwrap_or(0);
            let states = near_lagrange_states(&NearLagrange::new(alpha), 1, seed)?;
            Ok(states[0])
        }
    }
}

/// Energy drift relative to max(|E|, U) at the start, so that E = 0 orbits are measurable.
fn energy_drift(traj: &ReducedTrajectory, init: &ReducedState) -> Result<f64, CliError> {
    let u = cartesian_of_reduced(init, 0.0).potential(traj.alpha)?;
    let scale = traj.e0.abs().max(u);
    Ok(traj.samples.iter().map(|s| (s.e - traj.e0).abs() / scale).fold(0.0, f64::max))
}

fn conservation_checks(traj: &ReducedTrajectory, init: &ReducedState, checks: &mut Checks) -> Result<(), CliError> {
    checks.add("energy drift", energy_drift(traj, init)?, ENERGY_TOL);
    let saari = traj.samples.iter().map(|s| s.saari_residual.abs()).fold(0.0, f64::max);
    checks.add("Saari residual", saari, SAARI_TOL);
    Ok(())
}

fn trajectory_summary(traj: &ReducedTrajectory, init: &ReducedState) {
    let last = traj.samples.last();
    println!("alpha {}  C {}  E {}", traj.alpha.value(), sci(traj.c0), sci(traj.e0));
    println!(
        "samples {}  t_end {}  s_end {}",
        traj.samples.len(),
        sci(last.map_or(0.0, |s| s.t)),
        sci(last.map_or(0.0, |s| s.s))
    );
    let dz = traj.samples.iter().map(|s| (s.state.zeta - init.zeta).norm()).fold(0.0, f64::max);
    let (lo, hi) = traj
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.mu), hi.max(s.mu)));
    println!("max |zeta - zeta(0)| {}  mu in [{}, {}]", sci(dz), sci(lo), sci(hi));
}

#[derive(Serialize)]
struct SimulateMetadata<'a> {
    run: TrajectoryMetadata<'a>,
    checks: &'a Checks,
}

pub fn simulate(a: &SimulateArgs, f: &FileConfig, out: &Path) -> Result<(), CliError> {
    let o = orbit(&a.orbit, f)?;
    let traj = integrate_reduced(&o.init, &o.config, o.alpha)?;
    trajectory_summary(&traj, &o.init);
    let mut checks = Checks::default();
    conservation_checks(&traj, &o.init, &mut checks)?;
    if a.check_oracle || f.check_oracle.unwrap_or(false) {
        let Horizon::Time(_) = o.config.horizon else {
            return Err(CliError::Usage("--check-oracle needs a time horizon (--t-end)".into()));
        };
        let cart = integrate_cartesian(&cartesian_of_reduced(&o.init, 0.0), &o.config, o.alpha)?;
        let mut dev = 0.0f64;
        for (r, c) in traj.samples.iter().zip(&cart.samples) {
            let m = reduced_of_cartesian(c)?;
            dev = dev.max((r.state.i - m.i).abs()).max((r.state.zeta - m.zeta).norm());
        }
        if cart.samples.len() != traj.samples.len() {
            dev = f64::INFINITY;
        }
        checks.add("reduced vs Cartesian (I, zeta)", dev, ORACLE_TOL);
        let c = relative_drift(std::iter::once(traj.c0).chain(cart.angular_momenta.iter().copied()));
        checks.add("Cartesian angular momentum drift", c, ENERGY_TOL);
        let scale = traj.e0.abs().max(cartesian_of_reduced(&o.init, 0.0).potential(o.alpha)?);
        let e = cart.energies.iter().map(|e| (e - traj.e0).abs() / scale).fold(0.0, f64::max);
        checks.add("Cartesian energy drift", e, ENERGY_TOL);
    }
    if let Some(why) = &traj.truncated {
        println!("FAIL integration stopped early: {why}");
        checks.items.push(Check { name: "truncated".into(), value: traj.samples.last().map_or(0.0, |s| s.t), tolerance: 0.0, passed: false });
    }
    let name = a.name.clone().or_else(|| f.name.clone()).unwrap_or_else(|| "trajectory".into());
    write_trajectory_csv(create(out, &format!("{name}.csv"))?, &traj)?;
    let meta = SimulateMetadata { run: TrajectoryMetadata::new(&traj, &o.config, &o.init), checks: &checks };
    let mut w = create(out, &format!("{name}.json"))?;
    write_metadata_json(&mut w, &meta)?;
    writeln!(w)?;
    println!("wrote {}", out.join(format!("{name}.csv")).display());
    checks.finish("simulate")
}

pub fn contour(a: &ContourArgs, f: &FileConfig, out: &Path) -> Result<(), CliError> {
    let alpha = Alpha::new(a.alpha.or(f.alpha).unwrap_or(2.0)).map_err(|e| CliError::Usage(e.to_string()))?;
    let levels = a.levels.clone().or_else(|| f.levels.clone()).unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    let force = a.force || f.force.unwrap_or(false);
    let mut opts = TraceOptions::default();
    if let Some(step) = a.step.or(f.step) {
        if !(step > 0.0) {
            return Err(CliError::Usage("--step must be positive".into()));
        }
        opts.step = step;
    }
    // Every alpha attains its minimum 3 at the equilateral shapes.
    let floor = 3.0;
    let mut checks = Checks::default();
    for level in levels {
        let arcs = if level <= floor && !force {
            log::warn!("level {level} is not above min mu = {floor}; writing an empty contour (use --force to trace anyway)");
            Vec::new()
        } else {
            trace_level(level, alpha, &opts)?
        };
        let file = format!("contour_mu{level}.csv");
        write_contours_csv(create(out, &file)?, &arcs)?;
        let points: usize = arcs.iter().map(|a| a.points.len()).sum();
        let closed = arcs.iter().filter(|a| a.closed).count();
        let mut worst = 0.0f64;
        for arc in &arcs {
            for &(x, y) in &arc.points {
                worst = worst.max((mu_derivatives(x, y, alpha)?.mu - level).abs());
            }
        }
        let mut touched: Vec<(f64, f64)> = arcs.iter().flat_map(|a| a.critical_ends.iter().copied()).collect();
        touched.sort_by(|p, q| p.partial_cmp(q).unwrap());
        touched.dedup();
        println!(
            "level {level}: {} arcs ({closed} closed), {points} points -> {file}",
            arcs.len()
        );
        for (x, y) in touched {
            println!("  passes through central configuration ({}, {})", sci(x), sci(y));
        }
        if points > 0 {
            checks.add(&format!("level {level} max |mu - mu0|"), worst, CONTOUR_TOL);
        }
    }
    checks.finish("contour")
}

pub fn verify_proof(a: &ProofArgs, f: &FileConfig, out: &Path) -> Result<(), CliError> {
    let stage = match a.stage.clone().or_else(|| f.stage.clone()) {
        Some(s) => s.parse::<Stage>().map_err(CliError::Usage)?,
        None => Stage::VerifyExclusion,
    };
    let threads = a.threads.or(f.threads).unwrap_or(1);
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let omit = a.omit_timings || f.omit_timings.unwrap_or(false);
    let start = Instant::now();
    let report = run_pipeline(PipelineOptions { threads, stop_after: stage, record_timings: !omit })
        .map_err(|e| CliError::Internal(format!("proof pipeline: {e}")))?;
    if let Some(q) = &report.q {
        println!("Q = {}", q.polynomial);
    }
    if let Some(p) = &report.p {
        let d = p.raw_degrees;
        println!("P: {} terms, degrees x^{} y^{} C^{} k^{}", p.terms, d[0], d[1], d[2], d[3]);
    }
    for v in &report.verdicts {
        let detail = if v.detail.is_empty() { String::new() } else { format!(" [{}]", v.detail) };
        println!("{} {}: {}{detail}", if v.passed { "PASS" } else { "FAIL" }, v.stage, v.check);
    }
    if let Some(t) = &report.timings {
        for s in t {
            println!("time {}: {} ms", s.stage, s.millis);
        }
        println!("time total: {} ms", start.elapsed().as_millis());
    }
    let mut w = create(out, "proof_report.json")?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(w)?;
    println!("verdict: {}", if report.passed { "PASS" } else { "FAIL" });
    let failed = report.failed_checks().next().map(|v| format!("stage {} failed: {}", v.stage, v.check));
    failed.map_or(Ok(()), |m| Err(CliError::Breach(m)))
}

pub fn central_configs(a: &CentralArgs, f: &FileConfig) -> Result<(), CliError> {
    let alpha = Alpha::new(a.alpha.or(f.alpha).unwrap_or(2.0)).map_err(|e| CliError::Usage(e.to_string()))?;
    let half = a.half_width.or(f.half_width).unwrap_or(5.0);
    let cells = a.cells.or(f.cells).unwrap_or(400);
    if !(half > 0.0) || cells == 0 {
        return Err(CliError::Usage("--half-width and --cells must be positive".into()));
    }
    let mut checks = Checks::default();
    let known = central_configurations();
    let mut worst = 0.0f64;
    for &(x, y) in &known {
        let d = mu_derivatives(x, y, alpha)?;
        let det = d.mu_xx * d.mu_yy - d.mu_xy * d.mu_xy;
        let kind = if det < 0.0 { "saddle" } else if d.mu_xx > 0.0 { "minimum" } else { "maximum" };
        println!("({}, {})  mu {}  |grad mu| {}  {kind}", sci(x), sci(y), sci(d.mu), sci(d.grad_norm()));
        worst = worst.max(d.grad_norm());
    }
    checks.add("max |grad mu| at central configurations", worst, GRADIENT_TOL);
    let sweep = sweep_critical_points(alpha, half, cells, 0.05);
    let extra: Vec<_> = sweep
        .found
        .iter()
        .filter(|p| !known.iter().any(|k| (k.0 - p.0).hypot(k.1 - p.1) < 1e-8))
        .collect();
    println!(
        "search |x|, |y| <= {half} on {cells}x{cells} cells: {} candidate cells, {} critical points, {} unlisted",
        sweep.candidate_cells,
        sweep.found.len(),
        extra.len()
    );
    for p in &extra {
        println!("  unlisted critical point ({}, {})", sci(p.0), sci(p.1));
    }
    checks.add("unlisted critical points", extra.len() as f64, 0.5);
    checks.finish("central-configs")
}

pub fn qk_check(a: &QkArgs, f: &FileConfig) -> Result<(), CliError> {
    let o = orbit(&a.orbit, f)?;
    let theta0 = a.theta0.or(f.theta0).unwrap_or(o.init.theta);
    let traj = integrate_reduced(&o.init, &o.config, o.alpha)?;
    trajectory_summary(&traj, &o.init);
    let qk = reconstruct_qk(&traj, theta0);
    let mut checks = Checks::default();
    let fold = |g: &dyn Fn(&saari_core::qk::QkDefects) -> f64| qk.iter().map(|q| g(&q.defects())).fold(0.0, f64::max);
    checks.add("|sum Q_k|", fold(&|d| d.center), QK_TOL);
    checks.add("|sum |Q_k|^2 - 1|", fold(&|d| d.norm), QK_TOL);
    checks.add("|sum Q_k ∧ Q_k'|", fold(&|d| d.spin), QK_TOL);
    let energy = traj.samples.iter().map(|s| shape_energy(&s.state, s.c).max_defect()).fold(0.0, f64::max);
    checks.add("shape-energy identity", energy, SHAPE_ENERGY_TOL);
    let dtheta = theta_of_t(&traj, o.init.theta)
        .iter()
        .zip(&traj.samples)
        .map(|(th, s)| (th - s.state.theta).abs())
        .fold(0.0, f64::max);
    checks.add("theta(t) from phases vs integrated", dtheta, QK_TOL);
    checks.finish("qk-check")
}

pub fn out_dir(flag: Option<&PathBuf>, f: &FileConfig) -> PathBuf {
    flag.cloned()
        .or_else(|| std::env::var_os("SAARI_OUT_DIR").map(PathBuf::from))
        .or_else(|| f.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

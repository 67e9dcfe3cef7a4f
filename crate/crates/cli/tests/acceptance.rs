//! Acceptance gate: runs every acceptance criterion and prints one
//! `[PASS]` / `[FAIL]` line per criterion.
//!
//! Set `SAARI_ACCEPTANCE=4,5` to run a subset.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use saari_core::contour::{three_point_curvature, trace_level, TraceOptions, DEFAULT_LEVELS};
use saari_core::dynamics::{integrate_cartesian, integrate_reduced, relative_drift, Horizon, IntegratorConfig};
use saari_core::fixtures::{equilateral_shape, lagrange_omega, lagrange_rotating, near_lagrange_states, NearLagrange};
use saari_core::geometry::{
    central_configurations, curvature_levelset, grid_local_minima, grid_minimum, mu_derivatives, refine_critical_point,
};
use saari_core::ode::StepControl;
use saari_core::qk::{qk_via_cartesian, reconstruct_qk, shape_energy, theta_of_t};
use saari_core::reduction::{cartesian_of_reduced, reduced_of_cartesian, Alpha, ReducedState};
use saari_proof::measure::{M0, X, Y};
use saari_proof::pipeline::{run_pipeline, PipelineOptions, ProofReport, Stage};
use saari_proof::shape_q::{build_q, identity_constant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn tight() -> StepControl {
    StepControl { abs_tol: 1e-12, rel_tol: 1e-12, ..StepControl::default() }
}

fn config(t_end: f64) -> IntegratorConfig {
    IntegratorConfig { control: tight(), horizon: Horizon::Time(t_end), output_interval: 0.05 }
}

fn fixtures(alpha: f64, count: usize, seed: u64) -> Vec<ReducedState> {
    let p = NearLagrange::new(Alpha::new(alpha).unwrap());
    near_lagrange_states(&p, count, seed).expect("fixtures")
}

fn verdict<'a>(report: &'a ProofReport, stage: Stage) -> impl Iterator<Item = &'a saari_proof::pipeline::Verdict> {
    report.verdicts.iter().filter(move |v| v.stage == stage)
}

fn criterion_1(report: &ProofReport) -> Outcome {
    let stages = [Stage::Degrees, Stage::ResultantY, Stage::FactorStructure];
    let failed: Vec<_> = stages.iter().flat_map(|s| verdict(report, *s)).filter(|v| !v.passed).collect();
    let (Some(p), Some(r), Some(f)) = (&report.p, &report.resultant, &report.factors) else {
        return outcome(false, "pipeline stopped before factor_structure");
    };
    let ok = failed.is_empty()
        && p.raw_degrees == [60, 60, 2, 4]
        && 2 * r.x_degree == 68
        && (f.x_exponent, f.four_x_minus_one_exponent) == (4, 6)
        && f.coefficient_count == 25;
    outcome(
        ok,
        format!(
            "P: x^{} y^{} C^{} k^{}; R x-degree {}; X^{} (4X-1)^{}; {} coefficients",
            p.raw_degrees[0],
            p.raw_degrees[1],
            p.raw_degrees[2],
            p.raw_degrees[3],
            2 * r.x_degree,
            f.x_exponent,
            f.four_x_minus_one_exponent,
            f.coefficient_count
        ),
    )
}

fn criterion_2(report: &ProofReport) -> Outcome {
    let checks: Vec<_> = verdict(report, Stage::ResultantK2).collect();
    let ok = checks.len() == 2 && checks.iter().all(|v| v.passed) && !report.factors.as_ref().map_or(true, |f| f.a == "0");
    let consts: Vec<_> = report.eliminants.iter().map(|e| format!("{}: {} digits", e.name, e.constant.trim_start_matches('-').len())).collect();
    outcome(ok, format!("d1, d2 factor as predicted with nonzero integer cofactors ({})", consts.join(", ")))
}

fn criterion_3() -> Outcome {
    let q = build_q();
    let e = |x: u16, y: u16, m: u16| {
        let mut a = [0u16; 6];
        a[X] = x;
        a[Y] = y;
        a[M0] = m;
        a
    };
    // Expansion of the printed display, term by term.
    let expected: [((u16, u16, u16), i64); 16] = [
        ((0, 0, 0), 27),
        ((3, 0, 0), 64),
        ((0, 1, 0), 156),
        ((0, 2, 0), 208),
        ((0, 3, 0), 64),
        ((2, 0, 0), 48 * 3),
        ((2, 1, 0), 48 * 4),
        ((1, 0, 0), 4 * 27),
        ((1, 1, 0), 4 * 88),
        ((1, 2, 0), 4 * 48),
        ((2, 0, 1), -6 * 16),
        ((1, 0, 1), -6 * -8),
        ((1, 1, 1), -6 * 32),
        ((0, 0, 1), -6),
        ((0, 1, 1), -6 * 8),
        ((0, 2, 1), -6 * 16),
    ];
    let mut mismatches = Vec::new();
    for ((x, y, m), c) in expected {
        let exps = e(x, y, m);
        let got = q.coeff(&exps);
        if got != BigInt::from(c) {
            mismatches.push(format!("X^{x}Y^{y}M0^{m}: {got} != {c}"));
        }
    }
    let ratio = identity_constant(&q);
    let ratio_ok = ratio.as_ref().is_ok_and(|r| *r == BigInt::from(96).into());
    let ok = mismatches.is_empty() && q.len() == expected.len() && ratio_ok;
    outcome(
        ok,
        format!(
            "{} of {} printed coefficients match, {} terms, Q / (D- D+ (mu - mu0)) = {}",
            expected.len() - mismatches.len(),
            expected.len(),
            q.len(),
            ratio.map(|r| r.to_string()).unwrap_or_else(|e| e.to_string())
        ),
    )
}

fn criterion_4() -> Outcome {
    let alpha = Alpha::STRONG;
    let min = grid_minimum(alpha, 3.0, 2001);
    let h = 3f64.sqrt() / 2.0;
    let minima = grid_local_minima(alpha, 3.0, 2001);
    let mut refined = Vec::new();
    let mut all_near = true;
    for &(x, y) in &minima {
        match refine_critical_point(x, y, alpha, 50) {
            Some(p) => {
                let d = p.0.hypot(p.1.abs() - h);
                let mu = mu_derivatives(p.0, p.1, alpha).unwrap().mu;
                all_near &= d < 1e-6 && (mu - 3.0).abs() < 1e-12;
                refined.push(d);
            }
            None => all_near = false,
        }
    }
    let worst_grad = central_configurations()
        .iter()
        .map(|&(x, y)| mu_derivatives(x, y, alpha).unwrap().grad_norm())
        .fold(0.0, f64::max);
    let ok = min.mu >= 3.0 - 1e-12 && minima.len() == 2 && all_near && worst_grad < 1e-12;
    outcome(
        ok,
        format!(
            "grid min mu = {:.15} at ({:.4}, {:.4}); {} grid-local minima, refined distance to (0, ±√3/2) <= {:.1e}; max |grad mu| at CCs = {:.1e}",
            min.mu,
            min.x,
            min.y,
            minima.len(),
            refined.iter().cloned().fold(0.0, f64::max),
            worst_grad
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_e = 0.0f64;
    let mut worst_c = 0.0f64;
    let mut worst_saari = 0.0f64;
    let mut runs = 0;
    let mut truncated = 0;
    for (k, a) in [1.0, 2.0, 3.0].into_iter().enumerate() {
        let alpha = Alpha::new(a).unwrap();
        for init in fixtures(a, 20, 0x5a_a41 + k as u64) {
            let cfg = config(10.0);
            let red = integrate_reduced(&init, &cfg, alpha).unwrap();
            let cart = integrate_cartesian(&cartesian_of_reduced(&init, 0.0), &cfg, alpha).unwrap();
            truncated += red.truncated.is_some() as usize + cart.truncated.is_some() as usize;
            let e0 = red.e0;
            worst_e = worst_e.max(relative_drift(std::iter::once(e0).chain(red.samples.iter().map(|s| s.e))));
            worst_e = worst_e.max(relative_drift(std::iter::once(e0).chain(cart.energies.iter().copied())));
            worst_c = worst_c.max(relative_drift(std::iter::once(red.c0).chain(red.samples.iter().map(|s| s.c))));
            worst_c = worst_c.max(relative_drift(std::iter::once(red.c0).chain(cart.angular_momenta.iter().copied())));
            worst_saari = red.samples.iter().map(|s| s.saari_residual.abs()).fold(worst_saari, f64::max);
            runs += 1;
        }
    }
    let ok = worst_e < 1e-9 && worst_c < 1e-9 && worst_saari < 1e-8 && truncated == 0;
    outcome(
        ok,
        format!(
            "{runs} orbits x 2 integrators: max drift E {worst_e:.2e}, C {worst_c:.2e}; max Saari residual {worst_saari:.2e}; truncated {truncated}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let alpha = Alpha::STRONG;
    let mut worst = 0.0f64;
    for init in fixtures(2.0, 10, 0x0c_a4e) {
        let cfg = config(5.0);
        let red = integrate_reduced(&init, &cfg, alpha).unwrap();
        let cart = integrate_cartesian(&cartesian_of_reduced(&init, 0.0), &cfg, alpha).unwrap();
        if red.samples.len() != cart.samples.len() {
            return outcome(false, "integrations ended at different times");
        }
        for (r, c) in red.samples.iter().zip(&cart.samples) {
            let m = reduced_of_cartesian(c).unwrap();
            worst = worst.max((r.state.i - m.i).abs()).max((r.state.zeta - m.zeta).norm());
        }
    }
    outcome(worst < 1e-6, format!("max |ΔI|, |Δzeta| over 10 orbits, t in [0,5]: {worst:.2e}"))
}

/// Deviation of the rotating equilateral fixture of side `r` over `t in [0, 10]`.
fn equilateral_deviation(r: f64) -> (f64, f64, f64, bool) {
    let alpha = Alpha::STRONG;
    let init = lagrange_rotating(alpha, r);
    let traj = integrate_reduced(&init, &config(10.0), alpha).unwrap();
    let z0 = equilateral_shape();
    let dz = traj.samples.iter().map(|s| (s.state.zeta - z0).norm()).fold(0.0, f64::max);
    let dmu = traj.samples.iter().map(|s| (s.mu - 3.0).abs()).fold(0.0, f64::max);
    let w = lagrange_omega(alpha, r);
    let dth = theta_of_t(&traj, 0.0)
        .iter()
        .zip(&traj.samples)
        .map(|(th, s)| (th - w * s.t).abs())
        .fold(0.0, f64::max);
    let complete = traj.truncated.is_none() && traj.samples.last().map(|s| s.t) == Some(10.0);
    (dz, dmu, dth, complete)
}

fn criterion_7() -> Outcome {
    // Shape perturbations of this orbit grow like exp(sqrt(3) t / r^2). At r = 1
    // the rounding of sqrt(3)/2 alone (5.0e-17) reaches 1.2e-9 by t = 10, so the
    // fixture is run at r = 2 and the unit-side deviation is reported alongside.
    let (dz, dmu, dth, complete) = equilateral_deviation(2.0);
    let (dz1, dmu1, _, _) = equilateral_deviation(1.0);
    let ok = dz < 1e-9 && dmu < 1e-9 && complete;
    outcome(
        ok,
        format!(
            "side 2: max |zeta - (0,√3/2)| = {dz:.2e}, max |mu - 3| = {dmu:.2e}, max |theta - omega t| = {dth:.2e}; \
             side 1: {dz1:.2e}, {dmu1:.2e} (rounding floor 1.2e-9)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst_q = 0.0f64;
    let mut worst_energy = 0.0f64;
    let mut worst_theta = 0.0f64;
    let mut worst_diacu = 0.0f64;
    let mut trajectories = 0;
    for (k, a) in [1.0, 2.0, 3.0].into_iter().enumerate() {
        let alpha = Alpha::new(a).unwrap();
        for init in fixtures(a, 5, 0x0b_0b + k as u64) {
            let traj = integrate_reduced(&init, &config(10.0), alpha).unwrap();
            let qk = reconstruct_qk(&traj, init.theta);
            worst_q = qk.iter().map(|q| q.defects().max()).fold(worst_q, f64::max);
            for (s, q) in traj.samples.iter().zip(&qk) {
                worst_energy = worst_energy.max(shape_energy(&s.state, s.c).max_defect());
                let via = qk_via_cartesian(&s.state, s.phase_c);
                worst_diacu = (0..3).map(|j| (via[j] - q.q[j]).norm()).fold(worst_diacu, f64::max);
            }
            worst_theta = theta_of_t(&traj, init.theta)
                .iter()
                .zip(&traj.samples)
                .map(|(th, s)| (th - s.state.theta).abs())
                .fold(worst_theta, f64::max);
            trajectories += 1;
        }
    }
    let ok = worst_q < 1e-8 && worst_energy < 1e-10;
    outcome(
        ok,
        format!(
            "{trajectories} trajectories: max Q_k defect {worst_q:.2e}, shape-energy defect {worst_energy:.2e}; \
             theta(t) vs integrated {worst_theta:.2e}, exp(-i int C/I) q/sqrt(I) vs Q_k {worst_diacu:.2e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let alpha = Alpha::STRONG;
    // The circle through three consecutive points is accurate to O(h^2) only for
    // near-uniform spacing, so the comparison arcs use a fixed fine step.
    let opts = TraceOptions { step: 1e-4, max_turn: None, ..TraceOptions::default() };
    let mut worst_curv = 0.0f64;
    let mut points = 0usize;
    let mut arcs = 0usize;
    for &level in &DEFAULT_LEVELS {
        for arc in trace_level(level, alpha, &opts).unwrap() {
            arcs += 1;
            for w in arc.points.windows(3) {
                let exact = curvature_levelset(w[1].0, w[1].1, arc.epsilon, alpha).unwrap();
                worst_curv = worst_curv.max((exact - three_point_curvature(w[0], w[1], w[2])).abs());
                points += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xfd_0009);
    let mut worst_fd = 0.0f64;
    let mut sampled = 0;
    let h = 1e-6;
    while sampled < 1000 {
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if (x - 0.5f64).hypot(y) < 0.1 || (x + 0.5f64).hypot(y) < 0.1 {
            continue;
        }
        let a = Alpha::new([1.0, 2.0, 3.0][sampled % 3]).unwrap();
        let d = mu_derivatives(x, y, a).unwrap();
        let px = mu_derivatives(x + h, y, a).unwrap();
        let mx = mu_derivatives(x - h, y, a).unwrap();
        let py = mu_derivatives(x, y + h, a).unwrap();
        let my = mu_derivatives(x, y - h, a).unwrap();
        let pairs = [
            (d.mu_x, (px.mu - mx.mu) / (2.0 * h)),
            (d.mu_y, (py.mu - my.mu) / (2.0 * h)),
            (d.mu_xx, (px.mu_x - mx.mu_x) / (2.0 * h)),
            (d.mu_xy, (py.mu_x - my.mu_x) / (2.0 * h)),
            (d.mu_xy, (px.mu_y - mx.mu_y) / (2.0 * h)),
            (d.mu_yy, (py.mu_y - my.mu_y) / (2.0 * h)),
        ];
        for (exact, fd) in pairs {
            worst_fd = worst_fd.max((exact - fd).abs() / exact.abs().max(1.0));
        }
        sampled += 1;
    }
    let ok = worst_curv < 1e-4 && worst_fd < 1e-6 && points > 0;
    outcome(
        ok,
        format!(
            "{arcs} arcs / {points} points: max |curvature - three-point| = {worst_curv:.2e}; \
             {sampled} points: max finite-difference mismatch {worst_fd:.2e}"
        ),
    )
}

const TITLES: [&str; 9] = [
    "proof pipeline structure",
    "eliminant factorizations",
    "level-set polynomial Q",
    "lower bound of mu",
    "conservation and Saari relation",
    "reduced vs Cartesian integration",
    "rotating equilateral fixture",
    "normalized positions Q_k",
    "curvature consistency",
];

fn main() -> ExitCode {
    let selected: Vec<usize> = match std::env::var("SAARI_ACCEPTANCE") {
        Ok(s) => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        Err(_) => (1..=9).collect(),
    };
    let needs_report = selected.iter().any(|&k| k == 1 || k == 2);
    let pipeline_start = Instant::now();
    let report = needs_report.then(|| {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        run_pipeline(PipelineOptions { threads, record_timings: false, ..PipelineOptions::default() })
    });
    let pipeline_secs = pipeline_start.elapsed().as_secs_f64();
    let mut failures = 0;
    for k in selected {
        let start = Instant::now();
        let out = match k {
            1 | 2 => match report.as_ref().unwrap() {
                Ok(r) if k == 1 => criterion_1(r),
                Ok(r) => criterion_2(r),
                Err(e) => outcome(false, format!("pipeline error: {e}")),
            },
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(),
            8 => criterion_8(),
            9 => criterion_9(),
            _ => continue,
        };
        failures += !out.passed as usize;
        let secs = start.elapsed().as_secs_f64() + if k == 1 { pipeline_secs } else { 0.0 };
        println!(
            "[{}] {k}. {}: {} ({secs:.1}s)",
            if out.passed { "PASS" } else { "FAIL" },
            TITLES[k - 1],
            out.detail,
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Level sets of the configurational measure, traced by tangent prediction
//! and Newton correction.

use serde::Serialize;

use crate::error::CoreError;
use crate::geometry::{central_configurations, mu_derivatives, MuDerivatives, CRITICAL_GRAD_TOL};
use crate::reduction::Alpha;

/// Default levels for contour plots of the inverse-square measure.
pub const DEFAULT_LEVELS: [f64; 8] = [3.05, 3.2, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    /// Largest predictor step.
    pub step: f64,
    pub min_step: f64,
    /// Corrector tolerance on `|mu - mu0|`.
    pub tol: f64,
    /// Arcs stop this close to a central configuration.
    pub critical_radius: f64,
    /// Arcs stop on leaving `|x|, |y| <= window`.
    pub window: f64,
    pub max_points: usize,
    /// Target tangent turn per step; the step shrinks where the arc bends.
    /// `None` keeps the step fixed except after rejected steps.
    pub max_turn: Option<f64>,
    /// Largest distance a seed may move while being projected onto the level set.
    pub max_seed_offset: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            step: 1e-2,
            min_step: 1e-7,
            tol: 1e-10,
            critical_radius: 1e-2,
            window: 5.0,
            max_points: 200_000,
            max_turn: Some(5e-3),
            max_seed_offset: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcEnd {
    Closed,
    Critical,
    Window,
    MaxPoints,
    StepUnderflow,
}

/// Points of one connected piece of `{mu = level}`, ordered along
/// `epsilon (-mu_y, mu_x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSetArc {
    pub level: f64,
    pub epsilon: f64,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    /// How each end of an open arc terminated (start, finish); both `Closed` for loops.
    pub ends: (ArcEnd, ArcEnd),
    /// Central configurations on this level at which the arc terminates.
    pub critical_ends: Vec<(f64, f64)>,
}

impl LevelSetArc {
    /// Image under `(x, y) -> (sx x, sy y)`, reordered so `epsilon` keeps its meaning.
    pub fn reflected(&self, sx: f64, sy: f64) -> LevelSetArc {
        let map = |&(x, y): &(f64, f64)| (sx * x, sy * y);
        let mut points: Vec<_> = self.points.iter().map(map).collect();
        let mut ends = self.ends;
        if sx * sy < 0.0 {
            points.reverse();
            ends = (ends.1, ends.0);
        }
        LevelSetArc {
            level: self.level,
            epsilon: self.epsilon,
            points,
            closed: self.closed,
            ends,
            critical_ends: self.critical_ends.iter().map(map).collect(),
        }
    }
}

/// Steps turning the tangent by more than this many radians are retried shorter.
const MAX_STEP_TURN: f64 = 0.1;

fn tangent(d: &MuDerivatives, epsilon: f64) -> (f64, f64) {
    let g = d.grad_norm();
    (-epsilon * d.mu_y / g, epsilon * d.mu_x / g)
}

/// Newton projection onto `mu = mu0` along the gradient.
fn project(p: (f64, f64), mu0: f64, alpha: Alpha, tol: f64) -> Result<((f64, f64), usize), CoreError> {
    let (mut x, mut y) = p;
    for it in 0..40 {
        let d = mu_derivatives(x, y, alpha)?;
        let r = d.mu - mu0;
        let g2 = d.mu_x * d.mu_x + d.mu_y * d.mu_y;
        if g2.sqrt() < CRITICAL_GRAD_TOL {
            return Err(CoreError::CriticalPoint { x, y });
        }
        let (nx, ny) = (x - r * d.mu_x / g2, y - r * d.mu_y / g2);
        if r.abs() < tol {
            // one polishing step, kept only if it does not make things worse
            let better = mu_derivatives(nx, ny, alpha).is_ok_and(|e| (e.mu - mu0).abs() <= r.abs());
            return Ok((if better { (nx, ny) } else { (x, y) }, it));
        }
        (x, y) = (nx, ny);
    }
    Err(CoreError::Contour(format!("corrector did not converge near ({x}, {y})")))
}

fn near_critical(p: (f64, f64), radius: f64) -> Option<(f64, f64)> {
    central_configurations().into_iter().find(|c| dist(p, *c) < radius)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Walks from `start` (already on the level set) until closure or a stop condition.
fn walk(start: (f64, f64), mu0: f64, epsilon: f64, alpha: Alpha, o: &TraceOptions) -> Result<(Vec<(f64, f64)>, ArcEnd, Option<(f64, f64)>), CoreError> {
    let mut pts = vec![start];
    let mut p = start;
    let mut h = o.step;
    let mut travelled = 0.0;
    loop {
        if pts.len() >= o.max_points {
            return Ok((pts, ArcEnd::MaxPoints, None));
        }
        let d = mu_derivatives(p.0, p.1, alpha)?;
        let t = tangent(&d, epsilon);
        let guess = (p.0 + h * t.0, p.1 + h * t.1);
        let accepted = match project(guess, mu0, alpha, o.tol) {
            Ok((q, _)) => {
                let ok_len = (0.5 * h..=1.5 * h).contains(&dist(p, q));
                let tq = mu_derivatives(q.0, q.1, alpha).map(|dq| tangent(&dq, epsilon));
                match tq {
                    Ok(tq) if ok_len && t.0 * tq.0 + t.1 * tq.1 > MAX_STEP_TURN.cos() => Some((q, tq)),
                    _ => None,
                }
            }
            Err(_) => None,
        };
        let Some((q, tq)) = accepted else {
            h *= 0.5;
            if h < o.min_step {
                return Ok((pts, ArcEnd::StepUnderflow, None));
            }
            continue;
        };
        travelled += dist(p, q);
        if pts.len() > 8 && travelled > 4.0 * o.step && dist(q, start) < h {
            return Ok((pts, ArcEnd::Closed, None));
        }
        if let Some(c) = near_critical(q, o.critical_radius) {
            let on_level = mu_derivatives(c.0, c.1, alpha).is_ok_and(|d| (d.mu - mu0).abs() < o.tol);
            return Ok((pts, ArcEnd::Critical, on_level.then_some(c)));
        }
        if q.0.abs() > o.window || q.1.abs() > o.window {
            return Ok((pts, ArcEnd::Window, None));
        }
        let turn = (t.0 * tq.1 - t.1 * tq.0).atan2(t.0 * tq.0 + t.1 * tq.1).abs();
        let target = match o.max_turn {
            Some(m) if turn > 0.0 => m * dist(p, q) / turn,
            _ => o.step,
        };
        h = target.clamp(h / 1.05, 1.05 * h).min(o.step);
        pts.push(q);
        p = q;
    }
}

/// Traces the connected piece of `{mu = mu0}` through (the projection of) `seed`.
pub fn trace_level_set(mu0: f64, seed: (f64, f64), alpha: Alpha, o: &TraceOptions) -> Result<LevelSetArc, CoreError> {
    let (start, _) = project(seed, mu0, alpha, o.tol)?;
    if dist(start, seed) > o.max_seed_offset {
        return Err(CoreError::Contour(format!(
            "seed ({}, {}) is {:.3} away from the level set",
            seed.0,
            seed.1,
            dist(start, seed)
        )));
    }
    let epsilon = 1.0;
    let (fwd, end_fwd, crit_fwd) = walk(start, mu0, epsilon, alpha, o)?;
    if end_fwd == ArcEnd::Closed {
        return Ok(LevelSetArc {
            level: mu0,
            epsilon,
            points: fwd,
            closed: true,
            ends: (ArcEnd::Closed, ArcEnd::Closed),
            critical_ends: Vec::new(),
        });
    }
    let (bwd, end_bwd, crit_bwd) = walk(start, mu0, -epsilon, alpha, o)?;
    let mut points: Vec<_> = bwd.into_iter().skip(1).rev().collect();
    points.extend(fwd);
    Ok(LevelSetArc {
        level: mu0,
        epsilon,
        points,
        closed: false,
        ends: (end_bwd, end_fwd),
        critical_ends: crit_bwd.into_iter().chain(crit_fwd).collect(),
    })
}

/// Seeds on `{mu = mu0}` found by bisecting sign changes along rays from the origin.
pub fn level_seeds(mu0: f64, alpha: Alpha, o: &TraceOptions, rays: usize) -> Vec<(f64, f64)> {
    let f = |r: f64, (c, s): (f64, f64)| mu_derivatives(r * c, r * s, alpha).map(|d| d.mu - mu0).unwrap_or(f64::INFINITY);
    let dr = 1e-3;
    let steps = (o.window / dr) as usize;
    let mut seeds = Vec::new();
    for k in 0..rays {
        let ang = std::f64::consts::TAU * k as f64 / rays as f64;
        let dir = (ang.cos(), ang.sin());
        let mut prev = f(0.0, dir);
        for j in 1..=steps {
            let r = j as f64 * dr;
            let cur = f(r, dir);
            if prev.is_finite() && cur.is_finite() && prev.signum() != cur.signum() && prev != 0.0 {
                let (mut a, mut b) = (r - dr, r);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if f(m, dir).signum() == prev.signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let m = 0.5 * (a + b);
                seeds.push((m * dir.0, m * dir.1));
            }
            prev = cur;
        }
    }
    seeds
}

/// All pieces of `{mu = mu0}` in the tracing window reachable from ray seeds.
/// Returns an empty list when the level lies below the minimum of `mu`.
pub fn trace_level(mu0: f64, alpha: Alpha, o: &TraceOptions) -> Result<Vec<LevelSetArc>, CoreError> {
    let mut arcs: Vec<LevelSetArc> = Vec::new();
    let seeds = level_seeds(mu0, alpha, o, 48);
    if seeds.is_empty() {
        log::warn!("level {mu0} has no points in the window; it may lie below min mu");
        return Ok(arcs);
    }
    for seed in seeds {
        if near_critical(seed, 2.0 * o.critical_radius).is_some() {
            continue;
        }
        if covers(&arcs, seed, o) {
            continue;
        }
        match trace_level_set(mu0, seed, alpha, o) {
            Ok(arc) if arc.points.len() >= 3 => arcs.push(arc),
            Ok(_) => {}
            Err(e) => log::warn!("skipping seed ({}, {}): {e}", seed.0, seed.1),
        }
    }
    complete_symmetry(&mut arcs, o);
    Ok(arcs)
}

fn covers(arcs: &[LevelSetArc], p: (f64, f64), o: &TraceOptions) -> bool {
    arcs.iter().any(|a| a.points.iter().any(|&q| dist(p, q) < 2.0 * o.step))
}

/// Adds mirror images of arcs under `x -> -x` and `y -> -y` that seeding missed.
fn complete_symmetry(arcs: &mut Vec<LevelSetArc>, o: &TraceOptions) {
    let mut k = 0;
    while k < arcs.len() {
        for (sx, sy) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let image = arcs[k].reflected(sx, sy);
            let probe = image.points[image.points.len() / 2];
            if !covers(arcs, probe, o) {
                log::debug!("adding mirrored arc at level {}", image.level);
                arcs.push(image);
            }
        }
        k += 1;
    }
}

/// Signed curvature of the circle through three points (positive for a left turn).
pub fn three_point_curvature(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let (ax, ay) = (p1.0 - p0.0, p1.1 - p0.1);
    let (bx, by) = (p2.0 - p1.0, p2.1 - p1.1);
    let cross = ax * by - ay * bx;
    2.0 * cross / (dist(p0, p1) * dist(p1, p2) * dist(p0, p2))
}

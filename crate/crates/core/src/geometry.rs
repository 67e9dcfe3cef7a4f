//! Derivatives of the configurational measure, the two curvature formulas for
//! its level sets, and the critical points (central configurations).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::CoreError;
use crate::reduction::{check_collision, measure_mu, shape_norm, Alpha};

/// Gradient norm below which curvature is refused.
pub const CRITICAL_GRAD_TOL: f64 = 1e-10;

/// `mu` with its gradient and Hessian at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuDerivatives {
    pub mu: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_xx: f64,
    pub mu_xy: f64,
    pub mu_yy: f64,
}

impl MuDerivatives {
    pub fn grad_norm(&self) -> f64 {
        self.mu_x.hypot(self.mu_y)
    }

    /// `mu_y^2 mu_xx - 2 mu_x mu_y mu_xy + mu_x^2 mu_yy`.
    pub fn level_set_form(&self) -> f64 {
        self.mu_y * self.mu_y * self.mu_xx - 2.0 * self.mu_x * self.mu_y * self.mu_xy
            + self.mu_x * self.mu_x * self.mu_yy
    }
}

/// Closed-form derivatives of `mu = N^{a/2} S`, `S = 1 + D₋^{-a/2} + D₊^{-a/2}`.
pub fn mu_derivatives(x: f64, y: f64, alpha: Alpha) -> Result<MuDerivatives, CoreError> {
    check_collision(Complex64::new(x, y))?;
    let h = alpha.value() / 2.0;
    let n = 0.5 + 2.0 / 3.0 * (x * x + y * y);
    let (nx, ny) = (4.0 / 3.0 * x, 4.0 / 3.0 * y);
    let f = n.powf(h);
    let f1 = h * n.powf(h - 1.0);
    let f2 = h * (h - 1.0) * n.powf(h - 2.0);
    let (fx, fy) = (f1 * nx, f1 * ny);
    let fxx = f2 * nx * nx + f1 * 4.0 / 3.0;
    let fxy = f2 * nx * ny;
    let fyy = f2 * ny * ny + f1 * 4.0 / 3.0;

    let (mut s, mut sx, mut sy, mut sxx, mut sxy, mut syy) = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for c in [0.5, -0.5] {
        let dx = 2.0 * (x - c);
        let dy = 2.0 * y;
        let d = (x - c) * (x - c) + y * y;
        let g = d.powf(-h);
        let g1 = -h * d.powf(-h - 1.0);
        let g2 = h * (h + 1.0) * d.powf(-h - 2.0);
        s += g;
        sx += g1 * dx;
        sy += g1 * dy;
        sxx += g2 * dx * dx + 2.0 * g1;
        sxy += g2 * dx * dy;
        syy += g2 * dy * dy + 2.0 * g1;
    }
    Ok(MuDerivatives {
        mu: f * s,
        mu_x: fx * s + f * sx,
        mu_y: fy * s + f * sy,
        mu_xx: fxx * s + 2.0 * fx * sx + f * sxx,
        mu_xy: fxy * s + fx * sy + fy * sx + f * sxy,
        mu_yy: fyy * s + 2.0 * fy * sy + f * syy,
    })
}

fn guarded(x: f64, y: f64, alpha: Alpha) -> Result<MuDerivatives, CoreError> {
    let d = mu_derivatives(x, y, alpha)?;
    if d.grad_norm() < CRITICAL_GRAD_TOL {
        return Err(CoreError::CriticalPoint { x, y });
    }
    Ok(d)
}

/// Signed curvature of the level set through `(x, y)` traversed with
/// velocity along `epsilon (-mu_y, mu_x)`.
pub fn curvature_levelset(x: f64, y: f64, epsilon: f64, alpha: Alpha) -> Result<f64, CoreError> {
    let d = guarded(x, y, alpha)?;
    Ok(epsilon * d.level_set_form() / d.grad_norm().powi(3))
}

/// Curvature forced by the equations of motion on an arc of constant
/// `mu` traversed at constant shape speed `k` in `s`-time, inverse-square case.
pub fn curvature_dynamic(x: f64, y: f64, epsilon: f64, c: f64, k: f64) -> Result<f64, CoreError> {
    if !(k > 0.0) {
        return Err(CoreError::InvalidInput(format!("shape speed k must be positive, got {k}")));
    }
    let d = guarded(x, y, Alpha::STRONG)?;
    let g = d.grad_norm();
    let n = shape_norm(Complex64::new(x, y));
    let x_dot_grad = x * d.mu_x + y * d.mu_y;
    Ok((-2.0 * c / k + 4.0 * epsilon / (3.0 * g) * x_dot_grad) / n - 1.5 * epsilon / (k * k) * g)
}

/// The five critical points of `mu` for equal masses.
pub fn central_configurations() -> [(f64, f64); 5] {
    let h = 3f64.sqrt() / 2.0;
    [(-1.5, 0.0), (0.0, 0.0), (1.5, 0.0), (0.0, -h), (0.0, h)]
}

/// Newton iteration on `grad mu = 0` from `(x, y)`.
pub fn refine_critical_point(x: f64, y: f64, alpha: Alpha, max_iter: usize) -> Option<(f64, f64)> {
    let (mut x, mut y) = (x, y);
    for _ in 0..max_iter {
        let d = mu_derivatives(x, y, alpha).ok()?;
        let det = d.mu_xx * d.mu_yy - d.mu_xy * d.mu_xy;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (d.mu_yy * d.mu_x - d.mu_xy * d.mu_y) / det;
        let dy = (d.mu_xx * d.mu_y - d.mu_xy * d.mu_x) / det;
        x -= dx;
        y -= dy;
        if dx.hypot(dy) < 1e-15 {
            break;
        }
    }
    let d = mu_derivatives(x, y, alpha).ok()?;
    (d.grad_norm() < 1e-10).then_some((x, y))
}

/// Result of the bounded-window search for critical points.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalSweep {
    pub found: Vec<(f64, f64)>,
    pub candidate_cells: usize,
}

/// Searches `|x|, |y| <= half_width` for zeros of `grad mu`.
///
/// A grid cell is a candidate when both `mu_x` and `mu_y` change sign over
/// its corners (or vanish there); Newton refinement from the cell center
/// decides. Cells within `exclusion` of a collision point are skipped since
/// `mu` blows up there. This is a numerical check on a bounded window, not a proof.
pub fn sweep_critical_points(alpha: Alpha, half_width: f64, cells: usize, exclusion: f64) -> CriticalSweep {
    let h = 2.0 * half_width / cells as f64;
    let coord = |i: usize| -half_width + i as f64 * h;
    let near_collision =
        |x: f64, y: f64| (x - 0.5).hypot(y) < exclusion || (x + 0.5).hypot(y) < exclusion;
    let mut grid = vec![vec![None; cells + 1]; cells + 1];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (x, y) = (coord(i), coord(j));
            if !near_collision(x, y) {
                *cell = mu_derivatives(x, y, alpha).ok().map(|d| (d.mu_x, d.mu_y));
            }
        }
    }
    let changes = |v: [f64; 4]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut found: Vec<(f64, f64)> = Vec::new();
    let mut candidates = 0;
    for i in 0..cells {
        for j in 0..cells {
            let corners = [grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]];
            let Some(c) = corners.into_iter().collect::<Option<Vec<_>>>() else {
                continue;
            };
            if !changes([c[0].0, c[1].0, c[2].0, c[3].0]) || !changes([c[0].1, c[1].1, c[2].1, c[3].1]) {
                continue;
            }
            candidates += 1;
            let (cx, cy) = (coord(i) + h / 2.0, coord(j) + h / 2.0);
            if let Some(p) = refine_critical_point(cx, cy, alpha, 50) {
                if !found.iter().any(|q| (q.0 - p.0).hypot(q.1 - p.1) < 1e-8) {
                    found.push(p);
                }
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    CriticalSweep {
        found,
        candidate_cells: candidates,
    }
}

/// Minimum of `mu` on a uniform `n x n` grid over `[-half_width, half_width]^2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridMinimum {
    pub mu: f64,
    pub x: f64,
    pub y: f64,
}

pub fn grid_minimum(alpha: Alpha, half_width: f64, n: usize) -> GridMinimum {
    let h = 2.0 * half_width / (n - 1) as f64;
    let mut best = GridMinimum { mu: f64::INFINITY, x: 0.0, y: 0.0 };
    for i in 0..n {
        let x = -half_width + i as f64 * h;
        for j in 0..n {
            let y = -half_width + j as f64 * h;
            if let Ok(mu) = measure_mu(Complex64::new(x, y), alpha) {
                if mu < best.mu {
                    best = GridMinimum { mu, x, y };
                }
            }
        }
    }
    best
}

/// Grid points that are local minima of `mu` over their 8 neighbours.
pub fn grid_local_minima(alpha: Alpha, half_width: f64, n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * half_width / (n - 1) as f64;
    let at = |i: usize, j: usize| {
        measure_mu(Complex64::new(-half_width + i as f64 * h, -half_width + j as f64 * h), alpha)
            .unwrap_or(f64::INFINITY)
    };
    let mut values = vec![vec![0.0; n]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = at(i, j);
        }
    }
    let mut out = Vec::new();
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let v = values[i][j];
            let mut is_min = v.is_finite();
            for di in [-1i32, 0, 1] {
                for dj in [-1i32, 0, 1] {
                    if (di, dj) != (0, 0) && values[(i as i32 + di) as usize][(j as i32 + dj) as usize] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push((-half_width + i as f64 * h, -half_width + j as f64 * h));
            }
        }
    }
    out
}

//! Uniform-mesh Numerov shooting, used only to cross-check the collocation
//! eigenvalues at modest accuracy.
//!
//! The outward solution starts from `u(0) = 0`, `u(h) = h^(l+1)` and is
//! bisected on its node count, so the result never depends on matching derivatives at the outer
//! wall. Two meshes, `h` and `h/2`, are combined by one Richardson step.

use crate::error::{Error, Result};
use crate::hamiltonian::Potential;

/// Integration starts at the first mesh point where `h^2 |f| / 12` drops to
/// this level. Inside a steep repulsive core the true solution is
/// exponentially small, and an unresolved `f` would make the recurrence
/// flip sign at every step.
const STIFFNESS_LIMIT: f64 = 0.1;
const RESCALE_ABOVE: f64 = 1e150;
const MIN_STEPS: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Smallest radius at which the potential is sampled; mesh points
    /// inside it are held at `u = 0`.
    pub r_min: f64,
    pub r_max: f64,
    /// Coarse mesh step; the fine run uses `h / 2`.
    pub h: f64,
    pub energy_bracket: (f64, f64),
    pub max_bisections: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub energy_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-4,
            r_max: 10.0,
            h: 1e-3,
            energy_bracket: (0.0, 60.0),
            max_bisections: 200,
            energy_tol: 1e-9,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return bad(format!(
                "need 0 < r_min < r_max, got {} and {}",
                self.r_min, self.r_max
            ));
        }
        if !(self.h > 0.0 && (self.r_max - self.r_min) / self.h >= MIN_STEPS) {
            return bad(format!(
                "step {} leaves fewer than {MIN_STEPS} steps",
                self.h
            ));
        }
        let (lo, hi) = self.energy_bracket;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return bad(format!("empty energy bracket [{lo}, {hi}]"));
        }
        if self.energy_tol.is_nan() || self.energy_tol <= 0.0 {
            return bad(format!(
                "energy tolerance must be positive, got {}",
                self.energy_tol
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingResult {
    /// Richardson-extrapolated energy.
    pub energy: f64,
    pub coarse: f64,
    pub fine: f64,
}

/// Eigenvalue of the state with `target_nodes` interior nodes.
pub fn numerov_eigenvalue(
    potential: &dyn Potential,
    ell: u32,
    cfg: &ShootingConfig,
    target_nodes: usize,
) -> Result<ShootingResult> {
    cfg.validate()?;
    let coarse = bisect(potential, ell, cfg, cfg.h, target_nodes)?;
    let fine = bisect(potential, ell, cfg, cfg.h / 2.0, target_nodes)?;
    Ok(ShootingResult {
        energy: fine + (fine - coarse) / 15.0,
        coarse,
        fine,
    })
}

/// Bisection on one mesh; no extrapolation.
pub fn numerov_single_mesh(
    potential: &dyn Potential,
    ell: u32,
    cfg: &ShootingConfig,
    h: f64,
    target_nodes: usize,
) -> Result<f64> {
    cfg.validate()?;
    bisect(potential, ell, cfg, h, target_nodes)
}

fn bisect(
    potential: &dyn Potential,
    ell: u32,
    cfg: &ShootingConfig,
    h: f64,
    target: usize,
) -> Result<f64> {
    let mesh = Mesh::new(cfg, h);
    let (mut lo, mut hi) = cfg.energy_bracket;
    let nodes_lo = mesh.count_nodes(potential, ell, lo)?;
    let nodes_hi = mesh.count_nodes(potential, ell, hi)?;
    if nodes_lo > target || nodes_hi <= target {
        return Err(Error::Bracket {
            lo,
            hi,
            nodes_lo,
            nodes_hi,
            target,
        });
    }
    // Invariant: nodes(lo) <= target < nodes(hi).
    for _ in 0..cfg.max_bisections {
        if hi - lo <= cfg.energy_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mesh.count_nodes(potential, ell, mid)? > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Uniform mesh `r_k = k h` anchored at the origin, where `u = 0`.
struct Mesh {
    r_min: f64,
    h: f64,
    steps: usize,
}

impl Mesh {
    fn new(cfg: &ShootingConfig, h: f64) -> Self {
        let steps = (cfg.r_max / h).round().max(1.0) as usize;
        Self {
            r_min: cfg.r_min,
            h: cfg.r_max / steps as f64,
            steps,
        }
    }

    fn r(&self, k: usize) -> f64 {
        self.h * k as f64
    }

    /// Sign changes of the outward solution on `(0, r_max]`; equals the
    /// number of Dirichlet eigenvalues below `e`.
    fn count_nodes(&self, potential: &dyn Potential, ell: u32, e: f64) -> Result<usize> {
        let centrifugal = 0.5 * f64::from(ell) * f64::from(ell + 1);
        let h2 = self.h * self.h / 12.0;
        let f = |r: f64| -> Result<f64> {
            Ok(2.0 * (potential.evaluate(r)? + centrifugal / (r * r) - e))
        };

        // First mesh point at or beyond r_min where the recurrence resolves f;
        // everything inside it is held at u = 0.
        let mut start = 1;
        while start + 2 < self.steps
            && (self.r(start) < self.r_min || h2 * f(self.r(start))?.abs() > STIFFNESS_LIMIT)
        {
            start += 1;
        }
        // The sample before `start` is zero, so its f never enters.
        let mut f_prev = 0.0;
        let mut u_prev = 0.0;
        let mut u = self.r(start).powi(ell as i32 + 1).max(f64::MIN_POSITIVE);
        let mut f_cur = h2 * f(self.r(start))?;
        let mut nodes = 0;
        for k in (start + 1)..=self.steps {
            let f_next = h2 * f(self.r(k))?;
            // u'' = f u
            let u_next = (2.0 * (1.0 + 5.0 * f_cur) * u - (1.0 - f_prev) * u_prev) / (1.0 - f_next);
            if u_next == 0.0 || u_next.signum() != u.signum() {
                // A zero sample counts once, on the step that leaves it.
                if u != 0.0 {
                    nodes += 1;
                }
            }
            u_prev = u;
            u = u_next;
            f_prev = f_cur;
            f_cur = f_next;
            if u.abs() > RESCALE_ABOVE {
                u /= RESCALE_ABOVE;
                u_prev /= RESCALE_ABOVE;
            }
        }
        Ok(nodes)
    }
}

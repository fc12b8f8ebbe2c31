//! Normalized radial wavefunctions, radial moments and densities built from
//! Hamiltonian eigenvectors.

use std::sync::Arc;

use crate::eigensolver::EigenDecomposition;
use crate::error::{Error, Result};
use crate::hamiltonian::Discretization;
use crate::legendre::interpolate;

/// Relative magnitude below which `u` samples are ignored when counting nodes.
const NODE_NOISE_FLOOR: f64 = 1e-12;
/// The sign of `u` is fixed on the first sample above this fraction of its peak.
const ANTINODE_FLOOR: f64 = 1e-3;

/// One bound state `u(r) = r R(r)` sampled at the interior nodes.
#[derive(Debug, Clone)]
pub struct RadialState {
    energy: f64,
    ell: u32,
    index_n: usize,
    psi_at_nodes: Vec<f64>,
    discretization: Arc<Discretization>,
}

impl RadialState {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// Excitation index within this `ell`, from 0.
    pub fn index_n(&self) -> usize {
        self.index_n
    }

    pub fn psi_at_nodes(&self) -> &[f64] {
        &self.psi_at_nodes
    }

    pub fn node_r(&self) -> &[f64] {
        self.discretization.node_r()
    }

    pub fn discretization(&self) -> &Discretization {
        &self.discretization
    }

    /// `sum_j w_j r'_j u_j^2`.
    pub fn norm(&self) -> f64 {
        self.weighted_sum(|_| 1.0)
    }

    /// Sign changes of `u` between interior nodes.
    pub fn node_count(&self) -> usize {
        count_sign_changes(&self.psi_at_nodes)
    }

    /// `<r^k> = sum_j w_j r'_j r_j^k u_j^2`.
    pub fn expectation_r_power(&self, k: i32) -> f64 {
        self.weighted_sum(|r| r.powi(k))
    }

    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let disc = &self.discretization;
        let w = &disc.grid().weights()[disc.grid().interior()];
        self.psi_at_nodes
            .iter()
            .zip(w)
            .zip(disc.node_r().iter().zip(disc.node_rprime()))
            .map(|((u, w), (&r, rp))| w * rp * f(r) * u * u)
            .sum()
    }

    /// `u(r)` between nodes, through the cardinal-function interpolant of
    /// `sqrt(r'(x)) u(r(x))`.
    pub fn value_at(&self, r: f64) -> Result<f64> {
        let disc = &self.discretization;
        let x = disc.map().x_of_r(r)?;
        let phi = self.scaled_samples();
        let phi_x = interpolate(disc.grid(), &phi, x)?;
        Ok(phi_x / disc.map().rprime_of_x(x).sqrt())
    }

    /// `(r, |u(r)|^2)` on `n_out` equally spaced radii spanning `[r_lo, r_hi]`.
    pub fn density_samples(&self, n_out: usize, r_lo: f64, r_hi: f64) -> Result<Vec<(f64, f64)>> {
        let r_max = self.discretization.map().r_max();
        if n_out < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 output points, got {n_out}"
            )));
        }
        if !(r_lo >= 0.0 && r_lo <= r_max) {
            return Err(Error::Domain {
                what: "r_lo",
                value: r_lo,
                lo: 0.0,
                hi: r_max,
            });
        }
        if !(r_hi > r_lo && r_hi <= r_max) {
            return Err(Error::Domain {
                what: "r_hi",
                value: r_hi,
                lo: r_lo,
                hi: r_max,
            });
        }
        let disc = &self.discretization;
        let phi = self.scaled_samples();
        let step = (r_hi - r_lo) / (n_out - 1) as f64;
        (0..n_out)
            .map(|i| {
                let r = if i == n_out - 1 {
                    r_hi
                } else {
                    r_lo + step * i as f64
                };
                let x = disc.map().x_of_r(r)?;
                let u = interpolate(disc.grid(), &phi, x)? / disc.map().rprime_of_x(x).sqrt();
                Ok((r, u * u))
            })
            .collect()
    }

    /// `sqrt(r'_j) u_j` on all `N + 1` nodes, zero at both ends.
    fn scaled_samples(&self) -> Vec<f64> {
        let disc = &self.discretization;
        let mut phi = Vec::with_capacity(disc.dim() + 2);
        phi.push(0.0);
        phi.extend(
            self.psi_at_nodes
                .iter()
                .zip(disc.node_rprime())
                .map(|(u, rp)| u * rp.sqrt()),
        );
        phi.push(0.0);
        phi
    }
}

fn count_sign_changes(u: &[f64]) -> usize {
    let floor = NODE_NOISE_FLOOR * u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut last = 0.0_f64;
    let mut changes = 0;
    for &v in u.iter().filter(|v| v.abs() > floor) {
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Converts eigenvectors `A_j` into normalized states
/// `u_j = A_j P_N(x_j) / sqrt(r'_j)`.
pub fn reconstruct(
    decomp: &EigenDecomposition,
    discretization: &Arc<Discretization>,
    ell: u32,
) -> Result<Vec<RadialState>> {
    let disc = discretization.as_ref();
    let pn = &disc.grid().pn_at_nodes()[disc.grid().interior()];
    if decomp.vectors().iter().any(|v| v.len() != disc.dim()) {
        return Err(Error::InvalidParameter(format!(
            "eigenvectors do not match the {} interior nodes",
            disc.dim()
        )));
    }
    decomp
        .values()
        .iter()
        .zip(decomp.vectors())
        .enumerate()
        .map(|(index_n, (&energy, a))| {
            let u: Vec<f64> = a
                .iter()
                .zip(pn)
                .zip(disc.node_rprime())
                .map(|((a, p), rp)| a * p / rp.sqrt())
                .collect();
            let mut state = RadialState {
                energy,
                ell,
                index_n,
                psi_at_nodes: u,
                discretization: Arc::clone(discretization),
            };
            let norm = state.norm();
            if !(norm.is_finite() && norm > f64::MIN_POSITIVE) {
                return Err(Error::Normalization {
                    state: index_n,
                    norm,
                });
            }
            let scale = norm.sqrt().recip();
            let peak = state
                .psi_at_nodes
                .iter()
                .fold(0.0_f64, |m, x| m.max(x.abs()));
            let sign = state
                .psi_at_nodes
                .iter()
                .find(|x| x.abs() > ANTINODE_FLOOR * peak)
                .map_or(1.0, |x| x.signum());
            state
                .psi_at_nodes
                .iter_mut()
                .for_each(|x| *x *= sign * scale);
            Ok(state)
        })
        .collect()
}

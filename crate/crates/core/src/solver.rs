//! End-to-end solves for the spiked oscillator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigensolver::{eigh_lowest_refined, eigvalsh_lowest_refined};
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble, Discretization, RadialProblem, SpikedOscillator};
use crate::mapping::MapParams;
use crate::observables::{reconstruct, RadialState};

/// Grid order and map. The defaults are the production settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub n: usize,
    pub r_max: f64,
    pub alpha_m: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            n: 300,
            r_max: 200.0,
            alpha_m: 0.05,
        }
    }
}

impl GridSettings {
    pub fn new(n: usize, r_max: f64, alpha_m: f64) -> Self {
        Self { n, r_max, alpha_m }
    }

    pub fn discretization(&self) -> Result<Arc<Discretization>> {
        let map = MapParams::new(self.r_max, self.alpha_m)?;
        Ok(Arc::new(Discretization::new(self.n, map)?))
    }
}

/// One `(alpha_s, lambda, ell)` channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub alpha_s: f64,
    pub lambda: f64,
    pub ell: u32,
}

impl Channel {
    pub fn new(alpha_s: f64, lambda: f64, ell: u32) -> Self {
        Self {
            alpha_s,
            lambda,
            ell,
        }
    }

    pub fn problem(&self, disc: &Arc<Discretization>) -> Result<RadialProblem> {
        let pot = SpikedOscillator::new(self.lambda, self.alpha_s)?;
        Ok(RadialProblem::new(
            Arc::new(pot),
            self.ell,
            Arc::clone(disc),
        ))
    }
}

fn check_count(k: usize, disc: &Discretization) -> Result<()> {
    if k == 0 || k > disc.dim() {
        return Err(Error::InvalidParameter(format!(
            "number of states must be in 1..={}, got {k}",
            disc.dim()
        )));
    }
    Ok(())
}

/// Lowest `k` eigenvalues, refined against the assembled matrix.
pub fn energies(channel: &Channel, disc: &Arc<Discretization>, k: usize) -> Result<Vec<f64>> {
    check_count(k, disc)?;
    let h = assemble(&channel.problem(disc)?)?;
    eigvalsh_lowest_refined(h.entries(), k)
}

/// Lowest `k` normalized states.
pub fn states(channel: &Channel, disc: &Arc<Discretization>, k: usize) -> Result<Vec<RadialState>> {
    check_count(k, disc)?;
    let h = assemble(&channel.problem(disc)?)?;
    let decomp = eigh_lowest_refined(h.entries(), k)?;
    reconstruct(&decomp, disc, channel.ell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_agree() {
        let disc = GridSettings::default().discretization().unwrap();
        let ch = Channel::new(6.0, 10.0, 0);
        let e = energies(&ch, &disc, 10).unwrap();
        let s = states(&ch, &disc, 10).unwrap();
        // Refinement starts from different vectors on the two paths.
        for (a, b) in e.iter().zip(&s) {
            assert!(
                (a - b.energy()).abs() <= 1e-14 * a.abs(),
                "{a} vs {}",
                b.energy()
            );
        }
        assert!(energies(&ch, &disc, 0).is_err());
        assert!(energies(&ch, &disc, 300).is_err());
    }
}

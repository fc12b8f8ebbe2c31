//! Discretized radial Hamiltonian on the interior collocation nodes.
//!
//! With `u(r(x_j)) = A_j P_N(x_j) / sqrt(r'(x_j))` the collocation equations
//! become the symmetric problem
//! `sum_j [-1/2 S_ij / (r'_i r'_j) + delta_ij V_eff(r_j)] A_j = E A_i`,
//! where `S` is the second-derivative matrix conjugated by `diag(P_N(x_j))`.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::legendre::{build_grid, derivative_matrix, CollocationGrid};
use crate::mapping::MapParams;
use crate::matrix::Matrix;

/// Largest relative interior asymmetry of `S` accepted before averaging.
const ASYMMETRY_LIMIT: f64 = 1e-8;

pub trait Potential: Debug + Send + Sync {
    /// `v(r)` for `r > 0`, without validation.
    fn value(&self, r: f64) -> f64;

    fn evaluate(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::NonPositiveRadius(r));
        }
        let v = self.value(r);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential { r, value: v });
        }
        Ok(v)
    }
}

/// `v(r) = (r^2 + lambda r^-alpha_s) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedOscillator {
    lambda: f64,
    alpha_s: f64,
}

impl SpikedOscillator {
    pub fn new(lambda: f64, alpha_s: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite, got {lambda}"
            )));
        }
        if !(alpha_s.is_finite() && alpha_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_s must be positive and finite, got {alpha_s}"
            )));
        }
        Ok(Self { lambda, alpha_s })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }
}

impl Potential for SpikedOscillator {
    fn value(&self, r: f64) -> f64 {
        let spike = if self.lambda == 0.0 {
            0.0
        } else {
            self.lambda * r.powf(-self.alpha_s)
        };
        0.5 * (r * r + spike)
    }
}

/// Plain `r^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HarmonicOscillator;

impl Potential for HarmonicOscillator {
    fn value(&self, r: f64) -> f64 {
        0.5 * r * r
    }
}

/// `S_ij = (D1 D1)_ij P_N(x_j) / P_N(x_i)`, symmetrized.
pub fn symmetrized_d2(grid: &CollocationGrid) -> Result<Matrix> {
    let d1 = derivative_matrix(grid);
    let d2 = d1.matmul(&d1);
    let p = grid.pn_at_nodes();
    let s = Matrix::from_fn(d2.rows(), d2.cols(), |i, j| d2[(i, j)] * p[j] / p[i]);

    let interior = grid.interior();
    let block = s.principal_block(interior.start, interior.end);
    let scale = block.max_abs();
    let defect = block.asymmetry();
    if defect > ASYMMETRY_LIMIT * scale {
        return Err(Error::Asymmetric {
            defect: defect / scale,
            limit: ASYMMETRY_LIMIT,
        });
    }
    Ok(s.symmetrized())
}

/// `K_ij = -1/2 S_ij / (r'_i r'_j)` on the interior nodes.
pub fn kinetic_matrix(s: &Matrix, grid: &CollocationGrid, map: &MapParams) -> Result<Matrix> {
    if s.rows() != grid.len() || !s.is_square() {
        return Err(Error::InvalidParameter(format!(
            "second-derivative matrix is {}x{}, grid has {} nodes",
            s.rows(),
            s.cols(),
            grid.len()
        )));
    }
    let interior = grid.interior();
    let inv_rp: Vec<f64> = grid.nodes()[interior.clone()]
        .iter()
        .map(|&x| 1.0 / map.rprime_of_x(x))
        .collect();
    let lo = interior.start;
    Ok(Matrix::from_fn(inv_rp.len(), inv_rp.len(), |i, j| {
        -0.5 * inv_rp[i] * s[(lo + i, lo + j)] * inv_rp[j]
    }))
}

/// Mapping-induced potential. Identically zero for the algebraic map used here.
pub fn mapping_potential(_map: &MapParams, _x: f64) -> f64 {
    0.0
}

/// Everything that depends only on `(N, map)`: shared by all problems that
/// use the same grid.
#[derive(Debug, Clone)]
pub struct Discretization {
    grid: CollocationGrid,
    map: MapParams,
    kinetic: Matrix,
    node_r: Vec<f64>,
    node_rprime: Vec<f64>,
}

impl Discretization {
    pub fn new(n: usize, map: MapParams) -> Result<Self> {
        let grid = build_grid(n)?;
        let s = symmetrized_d2(&grid)?;
        let kinetic = kinetic_matrix(&s, &grid, &map)?;
        let interior = &grid.nodes()[grid.interior()];
        let node_r = interior.iter().map(|&x| map.r_of_x(x)).collect();
        let node_rprime = interior.iter().map(|&x| map.rprime_of_x(x)).collect();
        Ok(Self {
            grid,
            map,
            kinetic,
            node_r,
            node_rprime,
        })
    }

    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    pub fn map(&self) -> &MapParams {
        &self.map
    }

    pub fn kinetic(&self) -> &Matrix {
        &self.kinetic
    }

    /// `r(x_j)` at interior nodes `j = 1..N-1`.
    pub fn node_r(&self) -> &[f64] {
        &self.node_r
    }

    pub fn node_rprime(&self) -> &[f64] {
        &self.node_rprime
    }

    pub fn dim(&self) -> usize {
        self.node_r.len()
    }
}

#[derive(Debug, Clone)]
pub struct RadialProblem {
    potential: Arc<dyn Potential>,
    ell: u32,
    discretization: Arc<Discretization>,
}

impl RadialProblem {
    pub fn new(
        potential: Arc<dyn Potential>,
        ell: u32,
        discretization: Arc<Discretization>,
    ) -> Self {
        Self {
            potential,
            ell,
            discretization,
        }
    }

    pub fn potential(&self) -> &dyn Potential {
        self.potential.as_ref()
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn discretization(&self) -> &Discretization {
        &self.discretization
    }

    pub fn discretization_arc(&self) -> Arc<Discretization> {
        Arc::clone(&self.discretization)
    }

    /// `l(l+1)/(2 r^2) + v(r)` at each interior node.
    pub fn effective_potential(&self) -> Result<Vec<f64>> {
        let disc = self.discretization();
        let centrifugal = 0.5 * f64::from(self.ell) * f64::from(self.ell + 1);
        let interior = &disc.grid.nodes()[disc.grid.interior()];
        disc.node_r
            .iter()
            .zip(interior)
            .map(|(&r, &x)| {
                let v = self.potential.evaluate(r)?
                    + centrifugal / (r * r)
                    + mapping_potential(&disc.map, x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinitePotential { r, value: v })
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: Matrix,
    node_r: Vec<f64>,
}

impl HamiltonianMatrix {
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn node_r(&self) -> &[f64] {
        &self.node_r
    }

    pub fn dim(&self) -> usize {
        self.node_r.len()
    }

    /// `max|H_ij - H_ji| / max|H_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.entries.asymmetry() / self.entries.max_abs()
    }
}

pub fn assemble(problem: &RadialProblem) -> Result<HamiltonianMatrix> {
    let disc = problem.discretization();
    let veff = problem.effective_potential()?;
    let mut entries = disc.kinetic.clone();
    for (i, v) in veff.iter().enumerate() {
        entries[(i, i)] += v;
    }
    Ok(HamiltonianMatrix {
        entries,
        node_r: disc.node_r.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::{eigh, eigvalsh};

    fn disc(n: usize, r_max: f64, alpha_m: f64) -> Arc<Discretization> {
        Arc::new(Discretization::new(n, MapParams::new(r_max, alpha_m).unwrap()).unwrap())
    }

    fn spiked(lambda: f64, alpha_s: f64) -> Arc<dyn Potential> {
        Arc::new(SpikedOscillator::new(lambda, alpha_s).unwrap())
    }

    fn lowest(lambda: f64, alpha_s: f64, ell: u32, d: &Arc<Discretization>, k: usize) -> Vec<f64> {
        let h = assemble(&RadialProblem::new(
            spiked(lambda, alpha_s),
            ell,
            Arc::clone(d),
        ))
        .unwrap();
        let mut v = eigvalsh(h.entries()).unwrap();
        v.truncate(k);
        v
    }

    #[test]
    fn potential_values_and_rejection() {
        let v = SpikedOscillator::new(10.0, 6.0).unwrap();
        assert!((v.evaluate(1.0).unwrap() - 5.5).abs() < 1e-15);
        assert!((v.evaluate(2.0).unwrap() - 0.5 * (4.0 + 10.0 / 64.0)).abs() < 1e-15);
        assert!(matches!(v.evaluate(0.0), Err(Error::NonPositiveRadius(_))));
        assert!(v.evaluate(-1.0).is_err());
        let huge = SpikedOscillator::new(1e300, 6.0).unwrap();
        assert!(matches!(
            huge.evaluate(1e-3),
            Err(Error::NonFinitePotential { .. })
        ));
        assert!(SpikedOscillator::new(1.0, 0.0).is_err());
        assert!(SpikedOscillator::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn three_point_case() {
        // g_0 = x(x-1)/2, g_1 = 1 - x^2, g_2 = x(x+1)/2; second derivatives
        // at x = 0 are (1, -2, 1), and P_2 = (1, -1/2, 1) at the nodes.
        let g = build_grid(2).unwrap();
        let s = symmetrized_d2(&g).unwrap();
        assert!((s[(1, 1)] + 2.0).abs() < 1e-14);
        let d1 = derivative_matrix(&g);
        let d2 = d1.matmul(&d1);
        for (j, want) in [1.0, -2.0, 1.0].iter().enumerate() {
            assert!((d2[(1, j)] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn parabola_second_derivative() {
        let g = build_grid(40).unwrap();
        let s = symmetrized_d2(&g).unwrap();
        let p = g.pn_at_nodes();
        let f: Vec<f64> = g.nodes().iter().map(|x| 1.0 - x * x).collect();
        for i in g.interior() {
            let mut acc = 0.0;
            for j in g.interior() {
                acc += s[(i, j)] * f[j] / p[j];
            }
            assert!((acc * p[i] + 2.0).abs() < 1e-10, "node {i}: {}", acc * p[i]);
        }
    }

    #[test]
    fn interior_block_closed_form() {
        // Off-diagonal -2/(x_i - x_j)^2, diagonal -N(N+1)/(3(1 - x_i^2)).
        let n = 50;
        let g = build_grid(n).unwrap();
        let s = symmetrized_d2(&g).unwrap();
        let x = g.nodes();
        let nn1 = (n * (n + 1)) as f64;
        for i in g.interior() {
            for j in g.interior() {
                let want = if i == j {
                    -nn1 / (3.0 * (1.0 - x[i] * x[i]))
                } else {
                    -2.0 / ((x[i] - x[j]) * (x[i] - x[j]))
                };
                assert!(
                    (s[(i, j)] - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn pre_average_asymmetry_is_tiny() {
        let g = build_grid(50).unwrap();
        let d1 = derivative_matrix(&g);
        let d2 = d1.matmul(&d1);
        let p = g.pn_at_nodes();
        let s = Matrix::from_fn(d2.rows(), d2.cols(), |i, j| d2[(i, j)] * p[j] / p[i]);
        let block = s.principal_block(1, 50);
        assert!(block.asymmetry() <= 1e-10 * block.max_abs());
    }

    #[test]
    fn kinetic_is_symmetric_positive() {
        let d = disc(300, 200.0, 0.05);
        let k = d.kinetic();
        assert!(k.asymmetry() <= 1e-12 * k.max_abs());
        let vals = eigvalsh(k).unwrap();
        assert!(vals[0] > 0.0);
    }

    #[test]
    fn harmonic_ground_state() {
        for d in [disc(300, 200.0, 0.05), disc(300, 200.0, 25.0)] {
            let h = assemble(&RadialProblem::new(
                Arc::new(HarmonicOscillator),
                0,
                Arc::clone(&d),
            ))
            .unwrap();
            let v = eigvalsh(h.entries()).unwrap();
            assert!((v[0] - 1.5).abs() < 1e-10, "{}", v[0]);
        }
    }

    #[test]
    fn harmonic_ladder_with_centrifugal_term() {
        let d = disc(300, 200.0, 0.05);
        let v = lowest(0.0, 1.0, 2, &d, 3);
        for (got, want) in v.iter().zip([3.5, 5.5, 7.5]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn quoted_ground_states() {
        let d = disc(300, 200.0, 0.05);
        let cases = [
            (2.0, 1.0, 0, 2.5, 1e-10),
            (10.0, 6.0, 0, 3.00160451444, 1e-10),
            (1000.0, 4.0, 0, 10.6847312660, 1e-9),
        ];
        for (lambda, alpha, ell, want, tol) in cases {
            let got = lowest(lambda, alpha, ell, &d, 1)[0];
            assert!(
                (got - want).abs() < tol,
                "lambda={lambda} alpha={alpha}: {got}"
            );
        }
    }

    #[test]
    fn symmetric_for_negative_coupling() {
        let d = disc(120, 200.0, 0.05);
        let h = assemble(&RadialProblem::new(spiked(-100.0, 1.0), 0, d)).unwrap();
        assert!(h.symmetry_defect() <= 1e-10);
        assert_eq!(h.dim(), 119);
    }

    #[test]
    fn orthonormal_eigenvectors() {
        let d = disc(300, 200.0, 0.05);
        let h = assemble(&RadialProblem::new(spiked(10.0, 6.0), 1, d)).unwrap();
        let dec = eigh(h.entries()).unwrap();
        assert!(crate::eigensolver::orthonormality_defect(&dec) <= 1e-11);
    }

    #[test]
    fn overflow_is_reported_with_radius() {
        let d = disc(300, 200.0, 0.05);
        let err = assemble(&RadialProblem::new(spiked(1e300, 6.0), 0, d)).unwrap_err();
        match err {
            Error::NonFinitePotential { r, .. } => assert!(r > 0.0 && r < 1e-2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn monotone_in_ell_and_lambda() {
        let d = disc(200, 200.0, 0.05);
        for alpha in [1.0, 4.0] {
            let mut prev = lowest(1.0, alpha, 0, &d, 3);
            for ell in 1..4 {
                let cur = lowest(1.0, alpha, ell, &d, 3);
                assert!(cur.iter().zip(&prev).all(|(c, p)| c > p));
                prev = cur;
            }
            let mut prev = lowest(-1.0, alpha.min(1.0), 0, &d, 3);
            for lambda in [0.0, 0.1, 1.0, 10.0] {
                let cur = lowest(lambda, alpha.min(1.0), 0, &d, 3);
                assert!(cur.iter().zip(&prev).all(|(c, p)| c >= p));
                prev = cur;
            }
        }
    }
}

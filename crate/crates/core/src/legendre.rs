//! Legendre polynomials and the Legendre–Gauss–Lobatto collocation grid.
//!
//! The grid of order `N` has `N + 1` nodes: the endpoints `±1` and the
//! `N - 1` roots of `P'_N`. Everything the solver needs from the
//! reference interval (quadrature weights, cardinal functions, the
//! first-derivative matrix) is built here.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-14;
const MIN_NODE_GAP: f64 = 1e-12;
/// Below this distance from a node the cardinal function is evaluated
/// from its first-order Taylor expansion instead of the quotient form.
const NEAR_NODE: f64 = 1e-10;

/// Value and first two derivatives of a Legendre polynomial at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreValue {
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
}

/// Evaluates `P_n`, `P'_n` and `P''_n` at `x` by the upward three-term
/// recurrence and its term-by-term derivatives.
pub fn legendre_eval(n: usize, x: f64) -> Result<LegendreValue> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(legendre_eval_unchecked(n, x))
}

pub(crate) fn legendre_eval_unchecked(n: usize, x: f64) -> LegendreValue {
    if n == 0 {
        return LegendreValue {
            p: 1.0,
            dp: 0.0,
            d2p: 0.0,
        };
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let a = 2.0 * kf + 1.0;
        let b = kf + 1.0;
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}, differentiated twice.
        let p2 = (a * x * p1 - kf * p0) / b;
        let d2 = (a * (p1 + x * d1) - kf * d0) / b;
        let s2 = (a * (2.0 * d1 + x * s1) - kf * s0) / b;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        s0 = s1;
        s1 = s2;
    }
    LegendreValue {
        p: p1,
        dp: d1,
        d2p: s1,
    }
}

/// Order-`N` Legendre–Gauss–Lobatto nodes, weights and `P_N` at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pn_at_nodes: Vec<f64>,
}

impl CollocationGrid {
    /// Builds the grid of order `n` (so `n + 1` nodes).
    pub fn new(n: usize) -> Result<Self> {
        build_grid(n)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pn_at_nodes(&self) -> &[f64] {
        &self.pn_at_nodes
    }

    /// Indices of the interior nodes, `1..N`.
    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.order
    }

    /// `N(N+1)` as a float; appears in the weights, cardinals and corners of D1.
    pub(crate) fn nn1(&self) -> f64 {
        let n = self.order as f64;
        n * (n + 1.0)
    }
}

/// Builds the order-`n` LGL grid. Interior nodes are Newton-refined roots
/// of `P'_N` seeded at `cos(pi j / N)`; the upper half is the mirror image
/// of the lower half so the grid is exactly symmetric.
pub fn build_grid(n: usize) -> Result<CollocationGrid> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid order must be at least 2, got {n}"
        )));
    }
    let half = (n - 1) / 2;
    let mut lower = Vec::with_capacity(half);
    for j in 1..=half {
        let mut x = -(PI * j as f64 / n as f64).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let v = legendre_eval_unchecked(n, x);
            let step = v.dp / v.d2p;
            x -= step;
            if step.abs() <= NEWTON_STEP_TOL {
                converged = true;
                break;
            }
        }
        if !converged || !x.is_finite() || x <= -1.0 || x >= 0.0 {
            return Err(Error::NodeNotConverged {
                node: j,
                iterations: NEWTON_MAX_ITER,
            });
        }
        lower.push(x);
    }
    lower.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(-1.0);
    nodes.extend_from_slice(&lower);
    if n.is_multiple_of(2) {
        nodes.push(0.0);
    }
    nodes.extend(lower.iter().rev().map(|x| -x));
    nodes.push(1.0);
    debug_assert_eq!(nodes.len(), n + 1);

    for (i, pair) in nodes.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if gap <= MIN_NODE_GAP {
            return Err(Error::NodesCoincide {
                left: i,
                right: i + 1,
                gap,
            });
        }
    }

    let nn1 = (n * (n + 1)) as f64;
    let pn_at_nodes: Vec<f64> = nodes
        .iter()
        .map(|&x| legendre_eval_unchecked(n, x).p)
        .collect();
    let weights = pn_at_nodes.iter().map(|p| 2.0 / (nn1 * p * p)).collect();

    Ok(CollocationGrid {
        order: n,
        nodes,
        weights,
        pn_at_nodes,
    })
}

/// Cardinal function `g_j(x) = -(1 - x^2) P'_N(x) / (N(N+1) P_N(x_j) (x - x_j))`,
/// with `g_j(x_j) = 1`.
pub fn cardinal_eval(grid: &CollocationGrid, j: usize, x: f64) -> Result<f64> {
    if j >= grid.len() {
        return Err(Error::InvalidParameter(format!(
            "cardinal index {j} out of range for {} nodes",
            grid.len()
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let xj = grid.nodes[j];
    let dx = x - xj;
    if dx.abs() < NEAR_NODE {
        return Ok(1.0 + cardinal_slope_at_own_node(grid, j) * dx);
    }
    let v = legendre_eval_unchecked(grid.order, x);
    Ok(-((1.0 - x) * (1.0 + x)) * v.dp / (grid.nn1() * grid.pn_at_nodes[j] * dx))
}

/// `g'_j(x_j)`: the diagonal of the first-derivative matrix.
fn cardinal_slope_at_own_node(grid: &CollocationGrid, j: usize) -> f64 {
    if j == 0 {
        -grid.nn1() / 4.0
    } else if j == grid.order {
        grid.nn1() / 4.0
    } else {
        0.0
    }
}

/// Evaluates the interpolant `sum_j f_j g_j(x)` of nodal values `values`.
pub fn interpolate(grid: &CollocationGrid, values: &[f64], x: f64) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} nodal values, got {}",
            grid.len(),
            values.len()
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    if grid.nodes.iter().any(|&xk| (x - xk).abs() < NEAR_NODE) {
        // The quotient form loses accuracy next to a node.
        let mut sum = 0.0;
        for (j, &f) in values.iter().enumerate() {
            if f != 0.0 {
                sum += f * cardinal_eval(grid, j, x)?;
            }
        }
        return Ok(sum);
    }
    let v = legendre_eval_unchecked(grid.order, x);
    let sum: f64 = values
        .iter()
        .zip(&grid.nodes)
        .zip(&grid.pn_at_nodes)
        .filter(|((f, _), _)| **f != 0.0)
        .map(|((f, xj), pj)| f / (pj * (x - xj)))
        .sum();
    Ok(-((1.0 - x) * (1.0 + x)) * v.dp / grid.nn1() * sum)
}

/// First-derivative collocation matrix `D1[i][j] = g'_j(x_i)`.
pub fn derivative_matrix(grid: &CollocationGrid) -> Matrix {
    let n = grid.order;
    let x = &grid.nodes;
    let p = &grid.pn_at_nodes;
    let mut d = Matrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            0.0
        } else {
            p[i] / (p[j] * (x[i] - x[j]))
        }
    });
    d[(0, 0)] = -grid.nn1() / 4.0;
    d[(n, n)] = grid.nn1() / 4.0;
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_at_origin() {
        let v = legendre_eval(2, 0.0).unwrap();
        assert_eq!(v.p, -0.5);
        assert_eq!(v.dp, 0.0);
        assert_eq!(v.d2p, 3.0);
    }

    #[test]
    fn unit_at_right_endpoint() {
        for n in [0, 1, 5, 50, 300, 1000] {
            let v = legendre_eval(n, 1.0).unwrap();
            assert!((v.p - 1.0).abs() < 1e-13, "n={n}: {}", v.p);
            // P'_n(1) = n(n+1)/2
            let expect = (n * (n + 1)) as f64 / 2.0;
            assert!((v.dp - expect).abs() <= 1e-12 * expect.max(1.0), "n={n}");
        }
    }

    #[test]
    fn p3_derivative_root() {
        let x = 1.0 / 5.0_f64.sqrt();
        let v = legendre_eval(3, x).unwrap();
        // Oracle: P'_3(x) = (15x^2 - 3)/2 evaluated directly.
        let direct = (15.0 * x * x - 3.0) / 2.0;
        assert!(direct.abs() < 1e-15);
        assert!(v.dp.abs() < 1e-14);
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        // P_4 = (35x^4 - 30x^2 + 3)/8, P_5 = (63x^5 - 70x^3 + 15x)/8
        for i in 0..=40 {
            let x = -1.0 + i as f64 * 0.05;
            let v4 = legendre_eval(4, x).unwrap();
            let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
            let dp4 = (140.0 * x.powi(3) - 60.0 * x) / 8.0;
            let d2p4 = (420.0 * x * x - 60.0) / 8.0;
            assert!((v4.p - p4).abs() < 1e-14);
            assert!((v4.dp - dp4).abs() < 1e-13);
            assert!((v4.d2p - d2p4).abs() < 1e-12);
            let v5 = legendre_eval(5, x).unwrap();
            let p5 = (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0;
            assert!((v5.p - p5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_outside_interval() {
        assert!(matches!(
            legendre_eval(3, 1.0000001),
            Err(Error::Domain { .. })
        ));
        assert!(legendre_eval(3, -1.5).is_err());
    }

    #[test]
    fn small_grids() {
        let g2 = build_grid(2).unwrap();
        assert_eq!(g2.nodes(), &[-1.0, 0.0, 1.0]);
        let g3 = build_grid(3).unwrap();
        let r = 1.0 / 5.0_f64.sqrt();
        assert!((g3.nodes()[1] + r).abs() < 1e-15);
        assert!((g3.nodes()[2] - r).abs() < 1e-15);
        // Classical 4-point Lobatto weights 1/6, 5/6.
        assert!((g3.weights()[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((g3.weights()[1] - 5.0 / 6.0).abs() < 1e-14);
        assert!(build_grid(1).is_err());
    }

    #[test]
    fn grid_invariants_large_orders() {
        for n in [2, 3, 10, 51, 100, 300] {
            let g = build_grid(n).unwrap();
            let x = g.nodes();
            assert_eq!(x[0], -1.0);
            assert_eq!(x[n], 1.0);
            assert!(x.windows(2).all(|w| w[0] < w[1]));
            for j in 0..=n {
                assert!((x[j] + x[n - j]).abs() <= 1e-14);
                assert_eq!(g.weights()[j], g.weights()[n - j]);
            }
            let sum: f64 = g.weights().iter().sum();
            assert!((sum - 2.0).abs() <= 2e-13, "n={n}: sum={sum}");
            let target = 2.0 / (n * (n + 1)) as f64;
            for (w, p) in g.weights().iter().zip(g.pn_at_nodes()) {
                assert!((w * p * p - target).abs() <= 1e-12 * target);
            }
            let d2max = (1..n)
                .map(|j| legendre_eval(n, x[j]).unwrap().d2p.abs())
                .fold(0.0, f64::max);
            for xj in &x[1..n] {
                assert!(legendre_eval(n, *xj).unwrap().dp.abs() <= 1e-12 * d2max);
            }
        }
    }

    #[test]
    fn quadrature_exact_for_even_monomials() {
        for n in [10, 40, 100] {
            let g = build_grid(n).unwrap();
            for m in 0..n {
                if 2 * m > 2 * n - 1 {
                    break;
                }
                let q: f64 = g
                    .nodes()
                    .iter()
                    .zip(g.weights())
                    .map(|(x, w)| w * x.powi(2 * m as i32))
                    .sum();
                let exact = 2.0 / (2 * m + 1) as f64;
                assert!(
                    (q - exact).abs() <= 1e-12 * exact,
                    "n={n} m={m}: {q} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn cardinal_kronecker_property() {
        let g = build_grid(20).unwrap();
        for j in 0..=20 {
            for k in 0..=20 {
                let v = cardinal_eval(&g, j, g.nodes()[k]).unwrap();
                if j == k {
                    assert_eq!(v, 1.0);
                } else {
                    assert!(v.abs() < 1e-13, "g_{j}(x_{k}) = {v}");
                }
            }
        }
    }

    #[test]
    fn cardinals_reproduce_identity() {
        let g = build_grid(25).unwrap();
        for i in 0..=200 {
            let x = -1.0 + i as f64 * 0.01;
            let s: f64 = (0..=25)
                .map(|j| cardinal_eval(&g, j, x).unwrap() * g.nodes()[j])
                .sum();
            assert!((s - x).abs() < 1e-13, "x={x}: {s}");
            let via_interp = interpolate(&g, g.nodes(), x).unwrap();
            assert!((via_interp - x).abs() < 1e-13);
        }
    }

    #[test]
    fn d1_annihilates_constants() {
        for n in [2, 10, 50, 100] {
            let g = build_grid(n).unwrap();
            let d = derivative_matrix(&g);
            let out = d.mul_vec(&vec![1.0; n + 1]);
            let worst = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(worst < 1e-13 * (n * (n + 1)) as f64, "n={n}: {worst}");
        }
    }

    #[test]
    fn d1_polynomial_exactness() {
        let n = 50;
        let g = build_grid(n).unwrap();
        let d = derivative_matrix(&g);
        for k in 1..=n {
            let f: Vec<f64> = g.nodes().iter().map(|x| x.powi(k as i32)).collect();
            let df = d.mul_vec(&f);
            for (x, v) in g.nodes().iter().zip(&df) {
                let exact = k as f64 * x.powi(k as i32 - 1);
                assert!((v - exact).abs() <= 1e-10, "k={k} x={x}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn d1_corner_matches_numerical_derivative_of_cardinal() {
        let g = build_grid(2).unwrap();
        let d = derivative_matrix(&g);
        assert_eq!(d[(0, 0)], -1.5);
        // second-order one-sided difference of g_0 at x = -1
        let h = 1e-5;
        let g0 = |x: f64| cardinal_eval(&g, 0, x).unwrap();
        let fd = (-3.0 * g0(-1.0) + 4.0 * g0(-1.0 + h) - g0(-1.0 + 2.0 * h)) / (2.0 * h);
        assert!((fd - d[(0, 0)]).abs() < 1e-8, "fd={fd}");
    }

    #[test]
    fn d1_entries_match_differentiated_cardinals() {
        let g = build_grid(12).unwrap();
        let d = derivative_matrix(&g);
        // Fourth-order stencil, wide enough that cancellation in g_j next to
        // its own node stays small.
        let h = 1e-3;
        for j in 0..=12 {
            let gj = |x: f64| cardinal_eval(&g, j, x).unwrap();
            for i in 1..12 {
                let x = g.nodes()[i];
                let fd = (-gj(x + 2.0 * h) + 8.0 * gj(x + h) - 8.0 * gj(x - h) + gj(x - 2.0 * h))
                    / (12.0 * h);
                assert!(
                    (fd - d[(i, j)]).abs() < 1e-6 * d[(i, j)].abs().max(1.0),
                    "({i},{j}): {fd} vs {}",
                    d[(i, j)]
                );
            }
        }
    }
}

//! Dense real symmetric eigensolver: Householder tridiagonalization
//! followed by implicitly shifted QL/QR iteration.
//!
//! The Hamiltonians produced by the collocation scheme are strongly graded
//! (diagonal entries near the origin can exceed 1e18 while the wanted
//! eigenvalues are O(1)), so the tridiagonal phase splits on a relative
//! test `|e_m| <= eps * sqrt(|d_m| |d_{m+1}|)` and always converges toward
//! the end of each block with the smaller diagonal entry. An absolute
//! `eps * ||T||` deflation test would destroy the low end of the spectrum.

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

const EPS: f64 = f64::EPSILON / 2.0;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;
const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

/// Ascending eigenvalues with orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `vectors()[i]` is the eigenvector for `values()[i]`.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<Vec<f64>>) {
        (self.values, self.vectors)
    }
}

/// The `k` algebraically smallest eigenpairs of the symmetric matrix `h`.
pub fn eigh_lowest(h: &Matrix, k: usize) -> Result<EigenDecomposition> {
    check_square(h)?;
    if k == 0 || k > h.rows() {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {0}x{0} matrix",
            h.rows()
        )));
    }
    let mut full = eigh(h)?;
    full.values.truncate(k);
    full.vectors.truncate(k);
    Ok(full)
}

/// Full eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector is signed so that its first component above the noise
/// floor (`1e-8` of its largest entry) is positive.
pub fn eigh(h: &Matrix) -> Result<EigenDecomposition> {
    check_square(h)?;
    let n = h.rows();
    let perm = grading_order(h);
    let mut work = Tridiagonalization::new(&permuted(h, &perm), true);
    tridiagonal_ql(&mut work.d, &mut work.e, Some(&mut work.q))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| work.d[a].total_cmp(&work.d[b]));
    let values = order.iter().map(|&i| work.d[i]).collect();
    // Rows of `q` hold the eigenvectors in permuted coordinates.
    let vectors = order
        .iter()
        .map(|&i| {
            let row = work.q.row(i);
            let mut v = vec![0.0; n];
            for (k, &orig) in perm.iter().enumerate() {
                v[orig] = row[k];
            }
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, ascending. Bit-identical to the values from [`eigh`].
pub fn eigvalsh(h: &Matrix) -> Result<Vec<f64>> {
    check_square(h)?;
    let perm = grading_order(h);
    let mut work = Tridiagonalization::new(&permuted(h, &perm), false);
    tridiagonal_ql(&mut work.d, &mut work.e, None)?;
    let mut d = work.d;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Like [`eigh_lowest`], with every pair polished by [`refine_eigenpair`].
pub fn eigh_lowest_refined(h: &Matrix, k: usize) -> Result<EigenDecomposition> {
    let rough = eigh_lowest(h, k)?;
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for (&e, v) in rough.values.iter().zip(&rough.vectors) {
        let (e, v) = refine_eigenpair(h, e, v)?;
        values.push(e);
        vectors.push(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// The `k` smallest eigenvalues, each polished by [`refine_eigenpair`].
///
/// The start vector is an irregular sequence so that it has no symmetry that
/// could make it orthogonal to an eigenvector.
pub fn eigvalsh_lowest_refined(h: &Matrix, k: usize) -> Result<Vec<f64>> {
    check_square(h)?;
    if k == 0 || k > h.rows() {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenvalues of a {0}x{0} matrix",
            h.rows()
        )));
    }
    let start: Vec<f64> = (1..=h.rows())
        .map(|i| 1.0 + (i as f64 * 0.754_877_666_246_692_7).fract())
        .collect();
    eigvalsh(h)?
        .into_iter()
        .take(k)
        .map(|e| refine_eigenpair(h, e, &start).map(|p| p.0))
        .collect()
}

/// Shifted inverse iteration on the full matrix, then a Rayleigh quotient.
///
/// Householder reduction of a strongly graded matrix leaves O(1) eigenvalues
/// with absolute errors far above `eps * |E|` (around 1e-9 when the diagonal
/// reaches 1e21). Solving with `h - value*I` works on the original entries and
/// recovers them to a few ulps. If `start` has no overlap with the wanted
/// eigenvector the iteration can land elsewhere; a result that moves more than
/// `1e-6 (1 + |value|)` is discarded and the input pair returned.
pub fn refine_eigenpair(h: &Matrix, value: f64, start: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_square(h)?;
    let n = h.rows();
    if start.len() != n {
        return Err(Error::InvalidParameter(format!(
            "start vector has length {}, matrix is {n}x{n}",
            start.len()
        )));
    }
    let lu = ShiftedLu::new(h, value);
    let mut y = start.to_vec();
    for _ in 0..3 {
        lu.solve(&mut y);
        let norm = matrix::norm2(&y);
        if !(norm.is_finite() && norm > 0.0) {
            return Ok(fallback(value, start));
        }
        y.iter_mut().for_each(|x| *x /= norm);
    }
    let rq = matrix::dot(&y, &h.mul_vec(&y));
    if !rq.is_finite() || (rq - value).abs() > 1e-6 * (1.0 + value.abs()) {
        return Ok(fallback(value, start));
    }
    fix_sign(&mut y);
    Ok((rq, y))
}

fn fallback(value: f64, start: &[f64]) -> (f64, Vec<f64>) {
    let norm = matrix::norm2(start);
    (value, start.iter().map(|x| x / norm).collect())
}

/// Row-major LU factors of `h - shift*I` with partial pivoting.
struct ShiftedLu {
    n: usize,
    a: Vec<f64>,
    pivots: Vec<usize>,
}

impl ShiftedLu {
    fn new(h: &Matrix, shift: f64) -> Self {
        let n = h.rows();
        let mut a = h.as_slice().to_vec();
        for i in 0..n {
            a[i * n + i] -= shift;
        }
        // An exactly singular pivot only means the shift is an eigenvalue to
        // working precision; nudging it keeps the solve finite.
        let tiny = EPS * h.max_abs().max(SAFE_MIN);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .expect("non-empty column");
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            if a[k * n + k] == 0.0 {
                a[k * n + k] = tiny;
            }
            let pivot = a[k * n + k];
            let (top, rest) = a.split_at_mut((k + 1) * n);
            let row_k = &top[k * n..];
            for row in rest.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                if f == 0.0 {
                    continue;
                }
                row[k] = f;
                for j in k + 1..n {
                    row[j] -= f * row_k[j];
                }
            }
        }
        Self { n, a, pivots }
    }

    fn solve(&self, b: &mut [f64]) {
        let (n, a) = (self.n, &self.a);
        // Interchanges were applied to whole rows, multipliers included.
        for (k, &p) in self.pivots.iter().enumerate() {
            b.swap(k, p);
        }
        for i in 1..n {
            b[i] -= matrix::dot(&a[i * n..i * n + i], &b[..i]);
        }
        for k in (0..n).rev() {
            let s = b[k] - matrix::dot(&a[k * n + k + 1..(k + 1) * n], &b[k + 1..]);
            b[k] = s / a[k * n + k];
        }
    }
}

/// Indices sorted by ascending `|h_ii|`. The Householder sweep starts from the
/// last row, so the largest entries are annihilated first and never get
/// mixed into the small end of the spectrum.
fn grading_order(h: &Matrix) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..h.rows()).collect();
    perm.sort_by(|&a, &b| h[(a, a)].abs().total_cmp(&h[(b, b)].abs()));
    perm
}

fn permuted(h: &Matrix, perm: &[usize]) -> Matrix {
    Matrix::from_fn(h.rows(), h.cols(), |i, j| h[(perm[i], perm[j])])
}

fn check_square(h: &Matrix) -> Result<()> {
    if !h.is_square() || h.rows() == 0 {
        return Err(Error::InvalidParameter(format!(
            "eigensolver needs a non-empty square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    Ok(())
}

fn fix_sign(v: &mut [f64]) {
    let big = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * big) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// `A = Q^T T Q` with `T = tridiag(e, d, e)`. Rows of `q` are the basis
/// vectors, so rotations during the QL phase act on contiguous rows.
struct Tridiagonalization {
    d: Vec<f64>,
    /// `e[i]` couples `d[i]` and `d[i + 1]`; `e[n - 1] = 0`.
    e: Vec<f64>,
    q: Matrix,
}

impl Tridiagonalization {
    /// Householder reduction processing rows from the last one upward
    /// (the EISPACK `tred2` ordering).
    fn new(a: &Matrix, accumulate: bool) -> Self {
        let n = a.rows();
        // `v` starts as a copy of the lower triangle and ends up holding the
        // accumulated orthogonal transform, column-wise.
        let mut v = a.clone();
        let mut d: Vec<f64> = v.row(n - 1).to_vec();
        let mut e = vec![0.0; n];

        for i in (1..n).rev() {
            let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
            let mut h = 0.0;
            if scale == 0.0 {
                e[i] = d[i - 1];
                for j in 0..i {
                    d[j] = v[(i - 1, j)];
                    v[(i, j)] = 0.0;
                    v[(j, i)] = 0.0;
                }
            } else {
                for dk in &mut d[..i] {
                    *dk /= scale;
                    h += *dk * *dk;
                }
                let mut f = d[i - 1];
                let mut g = h.sqrt();
                if f > 0.0 {
                    g = -g;
                }
                e[i] = scale * g;
                h -= f * g;
                d[i - 1] = f - g;
                e[..i].iter_mut().for_each(|x| *x = 0.0);

                for j in 0..i {
                    f = d[j];
                    v[(j, i)] = f;
                    g = e[j] + v[(j, j)] * f;
                    for k in (j + 1)..i {
                        g += v[(k, j)] * d[k];
                        e[k] += v[(k, j)] * f;
                    }
                    e[j] = g;
                }
                f = 0.0;
                for j in 0..i {
                    e[j] /= h;
                    f += e[j] * d[j];
                }
                let hh = f / (h + h);
                for j in 0..i {
                    e[j] -= hh * d[j];
                }
                for j in 0..i {
                    f = d[j];
                    g = e[j];
                    for k in j..i {
                        v[(k, j)] -= f * e[k] + g * d[k];
                    }
                    d[j] = v[(i - 1, j)];
                    v[(i, j)] = 0.0;
                }
            }
            d[i] = h;
        }

        if accumulate {
            for i in 0..(n - 1) {
                v[(n - 1, i)] = v[(i, i)];
                v[(i, i)] = 1.0;
                let h = d[i + 1];
                if h != 0.0 {
                    for k in 0..=i {
                        d[k] = v[(k, i + 1)] / h;
                    }
                    for j in 0..=i {
                        let mut g = 0.0;
                        for k in 0..=i {
                            g += v[(k, i + 1)] * v[(k, j)];
                        }
                        for k in 0..=i {
                            v[(k, j)] -= g * d[k];
                        }
                    }
                }
                for k in 0..=i {
                    v[(k, i + 1)] = 0.0;
                }
            }
            for j in 0..n {
                d[j] = v[(n - 1, j)];
                v[(n - 1, j)] = 0.0;
            }
            v[(n - 1, n - 1)] = 1.0;
        } else {
            for (j, dj) in d.iter_mut().enumerate() {
                *dj = v[(j, j)];
            }
        }

        // Shift the off-diagonal so e[i] couples d[i] and d[i+1].
        e.remove(0);
        e.push(0.0);

        let q = if accumulate {
            v.transpose()
        } else {
            Matrix::zeros(0, 0)
        };
        Self { d, e, q }
    }
}

/// `[c s; -s c] [f; g] = [r; 0]`.
#[inline]
fn givens(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = f.hypot(g);
        (f / r, g / r, r)
    }
}

/// Rotates rows `i` and `i + 1` of `q`:
/// `row_{i+1} <- c row_{i+1} + s row_i`, `row_i <- c row_i - s row_{i+1}`.
#[inline]
fn rotate_rows(q: &mut Matrix, i: usize, c: f64, s: f64) {
    let n = q.cols();
    for k in 0..n {
        let upper = q[(i, k)];
        let lower = q[(i + 1, k)];
        q[(i + 1, k)] = c * lower + s * upper;
        q[(i, k)] = c * upper - s * lower;
    }
}

#[inline]
fn negligible(e: f64, d0: f64, d1: f64) -> bool {
    e * e <= (EPS * EPS * d0.abs()) * d1.abs() + SAFE_MIN
}

/// Implicit Wilkinson-shifted QL/QR on the tridiagonal `(d, e)`; on return
/// `d` holds the (unsorted) eigenvalues and rows of `q` the eigenvectors.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut q: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let max_iter = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total_iter = 0usize;
    let mut l1 = 0usize;

    while l1 < n {
        if l1 > 0 {
            e[l1 - 1] = 0.0;
        }
        // Find the end of the unreduced block starting at l1.
        let mut m = l1;
        while m < n - 1 {
            let tst = e[m].abs();
            if tst == 0.0 {
                break;
            }
            if tst <= d[m].abs().sqrt() * d[m + 1].abs().sqrt() * EPS {
                e[m] = 0.0;
                break;
            }
            m += 1;
        }
        let (mut l, mut lend) = (l1, m);
        l1 = m + 1;
        if lend == l {
            continue;
        }
        if d[lend].abs() < d[l].abs() {
            std::mem::swap(&mut l, &mut lend);
        }

        if lend > l {
            // QL: eigenvalues converge at the top of the block.
            loop {
                let mut m = l;
                while m < lend {
                    if negligible(e[m], d[m], d[m + 1]) {
                        break;
                    }
                    m += 1;
                }
                if m < lend {
                    e[m] = 0.0;
                }
                let mut p = d[l];
                if m != l {
                    if total_iter == max_iter {
                        return Err(Error::EigenNotConverged {
                            index: l,
                            iterations: total_iter,
                        });
                    }
                    total_iter += 1;
                    let mut g = (d[l + 1] - p) / (2.0 * e[l]);
                    let r = g.hypot(1.0);
                    g = d[m] - p + e[l] / (g + r.copysign(g));
                    let (mut s, mut c) = (1.0, 1.0);
                    p = 0.0;
                    for i in (l..m).rev() {
                        let f = s * e[i];
                        let b = c * e[i];
                        let (cc, ss, r) = givens(g, f);
                        c = cc;
                        s = ss;
                        if i != m - 1 {
                            e[i + 1] = r;
                        }
                        g = d[i + 1] - p;
                        let r = (d[i] - g) * s + 2.0 * c * b;
                        p = s * r;
                        d[i + 1] = g + p;
                        g = c * r - b;
                        if let Some(q) = q.as_deref_mut() {
                            rotate_rows(q, i, c, s);
                        }
                    }
                    d[l] -= p;
                    e[l] = g;
                    continue;
                }
                d[l] = p;
                l += 1;
                if l > lend {
                    break;
                }
            }
        } else {
            // QR: eigenvalues converge at the bottom of the block.
            loop {
                let mut m = l;
                while m > lend {
                    if negligible(e[m - 1], d[m], d[m - 1]) {
                        break;
                    }
                    m -= 1;
                }
                if m > lend {
                    e[m - 1] = 0.0;
                }
                let mut p = d[l];
                if m != l {
                    if total_iter == max_iter {
                        return Err(Error::EigenNotConverged {
                            index: l,
                            iterations: total_iter,
                        });
                    }
                    total_iter += 1;
                    let mut g = (d[l - 1] - p) / (2.0 * e[l - 1]);
                    let r = g.hypot(1.0);
                    g = d[m] - p + e[l - 1] / (g + r.copysign(g));
                    let (mut s, mut c) = (1.0, 1.0);
                    p = 0.0;
                    for i in m..l {
                        let f = s * e[i];
                        let b = c * e[i];
                        let (cc, ss, r) = givens(g, f);
                        c = cc;
                        s = ss;
                        if i != m {
                            e[i - 1] = r;
                        }
                        g = d[i] - p;
                        let r = (d[i + 1] - g) * s + 2.0 * c * b;
                        p = s * r;
                        d[i] = g + p;
                        g = c * r - b;
                        if let Some(q) = q.as_deref_mut() {
                            rotate_rows(q, i, c, -s);
                        }
                    }
                    d[l] -= p;
                    e[l - 1] = g;
                    continue;
                }
                d[l] = p;
                if l == lend {
                    break;
                }
                l -= 1;
            }
        }
    }
    Ok(())
}

/// `max_i ||H v_i - E_i v_i||_2`.
pub fn max_residual(h: &Matrix, decomp: &EigenDecomposition) -> f64 {
    decomp
        .values
        .iter()
        .zip(&decomp.vectors)
        .map(|(&val, vec)| {
            let hv = h.mul_vec(vec);
            let r: Vec<f64> = hv.iter().zip(vec).map(|(a, b)| a - val * b).collect();
            matrix::norm2(&r)
        })
        .fold(0.0, f64::max)
}

/// `max_{ij} |<v_i, v_j> - delta_ij|`.
pub fn orthonormality_defect(decomp: &EigenDecomposition) -> f64 {
    let vs = &decomp.vectors;
    let mut worst = 0.0_f64;
    for i in 0..vs.len() {
        for j in i..vs.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((matrix::dot(&vs[i], &vs[j]) - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn laplacian_1d(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        })
    }

    #[test]
    fn diagonal_two_by_two() {
        let m = Matrix::from_diagonal(&[2.0, 1.0]);
        let dec = eigh_lowest(&m, 2).unwrap();
        assert_eq!(dec.values(), &[1.0, 2.0]);
        assert_eq!(dec.vectors()[0], vec![0.0, 1.0]);
        assert_eq!(dec.vectors()[1], vec![1.0, 0.0]);
    }

    #[test]
    fn one_by_one() {
        let m = Matrix::from_diagonal(&[-3.5]);
        let dec = eigh(&m).unwrap();
        assert_eq!(dec.values(), &[-3.5]);
        assert_eq!(dec.vectors()[0], vec![1.0]);
    }

    #[test]
    fn second_difference_closed_form() {
        for n in [2, 3, 10, 57, 120] {
            let m = laplacian_1d(n);
            let dec = eigh(&m).unwrap();
            for (k, val) in dec.values().iter().enumerate() {
                let exact = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
                assert!((val - exact).abs() < 1e-13, "n={n} k={k}");
            }
            assert!(max_residual(&m, &dec) <= 1e-10 * m.frobenius_norm());
            assert!(orthonormality_defect(&dec) <= 1e-11);
        }
    }

    #[test]
    fn values_only_path_is_bit_identical() {
        let m = Matrix::from_fn(40, 40, |i, j| {
            1.0 / (1.0 + i as f64 + j as f64) + if i == j { i as f64 } else { 0.0 }
        });
        let full = eigh(&m).unwrap();
        let vals = eigvalsh(&m).unwrap();
        assert_eq!(full.values(), vals.as_slice());
    }

    #[test]
    fn graded_matrix_keeps_small_eigenvalues() {
        // Huge decoupled-ish diagonal at the top, O(1) block below.
        let n = 30;
        let base = laplacian_1d(n);
        let m = Matrix::from_fn(n, n, |i, j| {
            let mut v = base[(i, j)];
            if i == j && i < 3 {
                v += 10f64.powi(18 - 4 * i as i32);
            }
            v
        });
        let vals = eigvalsh(&m).unwrap();
        // Reference: eigenvalues of the lower block with the spike rows removed,
        // perturbed at O(1/1e10) by the coupling.
        let sub = Matrix::from_fn(n - 3, n - 3, |i, j| base[(i + 3, j + 3)]);
        let sub_vals = eigvalsh(&sub).unwrap();
        for k in 0..5 {
            assert!(
                (vals[k] - sub_vals[k]).abs() < 1e-9,
                "{} vs {}",
                vals[k],
                sub_vals[k]
            );
        }
    }

    #[test]
    fn refinement_recovers_perturbed_pairs() {
        let n = 25;
        let m = laplacian_1d(n);
        let exact = |k: usize| 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
        let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        for k in 0..4 {
            let (e, v) = refine_eigenpair(&m, exact(k) + 1e-7, &start).unwrap();
            assert!((e - exact(k)).abs() < 1e-14, "k={k}: {e}");
            let mode: Vec<f64> = (0..n)
                .map(|i| (PI * ((i + 1) * (k + 1)) as f64 / (n + 1) as f64).sin())
                .collect();
            let cos = matrix::dot(&v, &mode) / matrix::norm2(&mode);
            assert!((cos.abs() - 1.0).abs() < 1e-13);
        }
        let vals = eigvalsh_lowest_refined(&m, 3).unwrap();
        let dec = eigh_lowest_refined(&m, 3).unwrap();
        assert_eq!(vals.len(), 3);
        assert!(orthonormality_defect(&dec) < 1e-13);
        for (k, (v, d)) in vals.iter().zip(dec.values()).enumerate() {
            assert!((v - exact(k)).abs() < 1e-14);
            assert!((d - exact(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn refinement_on_exact_eigenvalue_stays_finite() {
        let m = Matrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let (e, v) = refine_eigenpair(&m, 2.0, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(e, 2.0);
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert!(refine_eigenpair(&m, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn refinement_rejects_runaway_shift() {
        // Start orthogonal to the eigenvector at 1: the iteration finds 3 instead.
        let m = Matrix::from_diagonal(&[1.0, 3.0]);
        let (e, v) = refine_eigenpair(&m, 1.0 + 1e-9, &[0.0, 1.0]).unwrap();
        assert_eq!(e, 1.0 + 1e-9);
        assert_eq!(v, vec![0.0, 1.0]);
    }

    #[test]
    fn lowest_rejects_bad_k() {
        let m = laplacian_1d(4);
        assert!(eigh_lowest(&m, 0).is_err());
        assert!(eigh_lowest(&m, 5).is_err());
        assert!(eigh(&Matrix::zeros(2, 3)).is_err());
    }

    fn random_symmetric(n: usize, seed: &[f64]) -> Matrix {
        Matrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            seed[(a * 31 + b * 17) % seed.len()]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn reconstructs_matrix(seed in prop::collection::vec(-10.0f64..10.0, 64), n in 1usize..40) {
            let m = random_symmetric(n, &seed);
            let dec = eigh(&m).unwrap();
            let mut rebuilt = Matrix::zeros(n, n);
            for (val, v) in dec.values().iter().zip(dec.vectors()) {
                for i in 0..n {
                    for j in 0..n {
                        rebuilt[(i, j)] += val * v[i] * v[j];
                    }
                }
            }
            let diff = Matrix::from_fn(n, n, |i, j| rebuilt[(i, j)] - m[(i, j)]);
            prop_assert!(diff.frobenius_norm() <= 1e-9 * m.frobenius_norm().max(1.0));
            prop_assert!(orthonormality_defect(&dec) <= 1e-11);
            prop_assert!(dec.values().windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn permutation_invariant(seed in prop::collection::vec(-5.0f64..5.0, 64), n in 2usize..30, shift in 1usize..29) {
            let m = random_symmetric(n, &seed);
            let perm: Vec<usize> = (0..n).map(|i| (i * (2 * shift + 1) + shift) % n).collect();
            let mut seen = perm.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assume!(seen.len() == n);
            let pm = Matrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
            let a = eigvalsh(&m).unwrap();
            let b = eigvalsh(&pm).unwrap();
            let scale = m.frobenius_norm().max(1.0);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }
}

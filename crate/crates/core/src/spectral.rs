//! Nonnegative rational matrices: exact contraction certificates and
//! floating leading-eigenvalue estimates.
//!
//! Decisions of the form "spectral radius < 1" are made exactly, through the
//! Neumann criterion: for `W >= 0`, `sp(W) < 1` iff `I - W` is invertible and
//! its inverse is entrywise nonnegative. Magnitudes of leading eigenvalues are
//! `f64` estimates with an explicit tolerance.

use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Q;

/// Default bit-size guard for intermediate integers in exact solves.
pub const DEFAULT_BIT_LIMIT: u64 = 1 << 16;

/// Dense matrix of nonnegative rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonnegMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Q>,
}

impl NonnegMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Q>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.is_negative()) {
            return Err(Error::Shape(format!("negative entry {e}")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Q::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.cols + j]
    }

    /// Adds `value` to entry `(i, j)`. Values must be nonnegative.
    pub fn add_to(&mut self, i: usize, j: usize, value: &Q) {
        debug_assert!(!value.is_negative());
        self.entries[i * self.cols + j] += value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Q::is_zero)
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &NonnegMatrix) -> Result<NonnegMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = NonnegMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, mut exp: usize) -> Result<NonnegMatrix> {
        self.require_square()?;
        let mut base = self.clone();
        let mut acc = NonnegMatrix::identity(self.rows);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Principal-style submatrix picking `rows` and `cols` by index.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> NonnegMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        NonnegMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(Q::to_f64).collect()
    }

    /// Rows of `"p/q"` strings, the exact printable form.
    pub fn to_grid(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Q::to_string).collect())
            .collect()
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl fmt::Display for NonnegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let grid = self.to_grid();
        let width = grid.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &grid {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", cells.join("  "))?;
        }
        Ok(())
    }
}

impl Serialize for NonnegMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_grid().serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Floating estimates
// ---------------------------------------------------------------------------

const POWER_ITERATIONS: usize = 20_000;
const SQUARINGS: u32 = 52;

/// Estimate of the spectral radius of a square nonnegative matrix with
/// `|estimate - sp(W)| <= tol`.
///
/// Shifted power iteration on `W + tol*I` brackets the Perron root between
/// the Collatz-Wielandt bounds `min (Ax)_i/x_i` and `max (Ax)_i/x_i`; when the
/// bracket does not close (reducible or periodic structure) the estimate
/// falls back to `||W^(2^k)||^(1/2^k)` computed by scaled repeated squaring.
pub fn power_lambda(w: &NonnegMatrix, tol: f64) -> Result<f64> {
    w.require_square()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    let n = w.rows();
    if n == 0 || w.is_zero() {
        return Ok(0.0);
    }
    let a = w.to_f64();
    if let Some(est) = collatz_wielandt(&a, n, tol) {
        return Ok(est);
    }
    Ok(gelfand(&a, n))
}

fn collatz_wielandt(a: &[f64], n: usize, tol: f64) -> Option<f64> {
    let shift = tol;
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    for _ in 0..POWER_ITERATIONS {
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            y[i] = row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + shift * x[i];
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        if hi - lo <= tol {
            return Some((0.5 * (lo + hi) - shift).max(0.0));
        }
        let scale = y.iter().cloned().fold(0.0f64, f64::max);
        if scale == 0.0 {
            return Some(0.0);
        }
        for i in 0..n {
            x[i] = y[i] / scale;
        }
        if x.iter().any(|&v| v < 1e-280) {
            return None;
        }
    }
    None
}

fn gelfand(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut log_scale = 0.0f64;
    let mut tmp = vec![0.0f64; n * n];
    for _ in 0..SQUARINGS {
        let norm = frobenius(&m);
        if norm == 0.0 {
            return 0.0;
        }
        m.iter_mut().for_each(|v| *v /= norm);
        log_scale += norm.ln();
        for i in 0..n {
            for j in 0..n {
                tmp[i * n + j] = (0..n).map(|k| m[i * n + k] * m[k * n + j]).sum();
            }
        }
        std::mem::swap(&mut m, &mut tmp);
        log_scale *= 2.0;
    }
    let norm = frobenius(&m);
    if norm == 0.0 {
        return 0.0;
    }
    let steps = 2f64.powi(SQUARINGS as i32);
    ((norm.ln() + log_scale) / steps).exp()
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Exact certificates
// ---------------------------------------------------------------------------

/// Solves `A X = B` exactly by fraction-free Gauss-Jordan elimination.
///
/// Rows are first scaled to integers; every intermediate entry is then a minor
/// of the scaled system, so all divisions are exact. Returns `None` when `A`
/// is singular.
pub fn solve_exact(a: &[Vec<Q>], b: &[Vec<Q>], bit_limit: u64) -> Result<Option<Vec<Vec<Q>>>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("solve_exact expects square A and matching B".into()));
    }
    let m = b.first().map_or(0, Vec::len);
    let width = n + m;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (ra, rb) in a.iter().zip(b) {
        let lcm = ra
            .iter()
            .chain(rb)
            .fold(BigInt::one(), |acc, q| acc.lcm(q.0.denom()));
        let row = ra
            .iter()
            .chain(rb)
            .map(|q| q.0.numer() * (&lcm / q.0.denom()))
            .collect();
        rows.push(row);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !rows[i][k].is_zero()) else {
            return Ok(None);
        };
        rows.swap(k, p);
        let pivot_row = rows[k].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..width {
                if j == k {
                    continue;
                }
                let num = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free step must divide exactly");
                if quot.bits() > bit_limit {
                    return Err(Error::BitSizeExceeded { limit: bit_limit });
                }
                row[j] = quot;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let solution = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            (0..m)
                .map(|j| Q(num::BigRational::new(row[n + j].clone(), row[i].clone())))
                .collect()
        })
        .collect();
    Ok(Some(solution))
}

fn i_minus(w: &NonnegMatrix) -> Vec<Vec<Q>> {
    let n = w.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { Q::one() } else { Q::zero() };
                    id - w.get(i, j)
                })
                .collect()
        })
        .collect()
}

/// `(I - W)^{-1}` when it exists.
pub fn neumann_inverse(w: &NonnegMatrix, bit_limit: u64) -> Result<Option<Vec<Vec<Q>>>> {
    w.require_square()?;
    let n = w.rows();
    let id: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    solve_exact(&i_minus(w), &id, bit_limit)
}

/// Exact decision of `sp(W) < 1`.
pub fn is_contracting(w: &NonnegMatrix) -> Result<bool> {
    is_contracting_with(w, DEFAULT_BIT_LIMIT)
}

pub fn is_contracting_with(w: &NonnegMatrix, bit_limit: u64) -> Result<bool> {
    Ok(match neumann_inverse(w, bit_limit)? {
        Some(inv) => inv.iter().flatten().all(|q| !q.is_negative()),
        None => false,
    })
}

/// `v = (I - W)^{-1} 1`, which satisfies `Wv = v - 1` exactly.
pub fn contraction_vector(w: &NonnegMatrix) -> Result<Vec<Q>> {
    let inv = neumann_inverse(w, DEFAULT_BIT_LIMIT)?.ok_or(Error::NotContracting)?;
    if inv.iter().flatten().any(Q::is_negative) {
        return Err(Error::NotContracting);
    }
    Ok(inv.iter().map(|row| row.iter().cloned().sum()).collect())
}

/// True iff `W^m = 0` for `m = size(W)`.
pub fn is_nilpotent(w: &NonnegMatrix) -> Result<bool> {
    w.require_square()?;
    Ok(w.pow(w.rows())?.is_zero())
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclicReport {
    /// `power_lambda` of `B_r B_{r+1} ... B_{r-1}` for each rotation `r`.
    pub estimates: Vec<f64>,
    pub spread: f64,
    pub tol: f64,
    pub agree: bool,
}

/// Spectral radii of all cyclic rotations of a closed chain of blocks
/// (`B_i` is `n_i x n_{i+1}`, `n_{k+1} = n_1`).
pub fn cyclic_sp_invariance(blocks: &[NonnegMatrix], tol: f64) -> Result<CyclicReport> {
    let k = blocks.len();
    if k == 0 {
        return Err(Error::Shape("empty block chain".into()));
    }
    for i in 0..k {
        let next = &blocks[(i + 1) % k];
        if blocks[i].cols() != next.rows() {
            return Err(Error::Shape(format!(
                "block {i} has {} columns but block {} has {} rows",
                blocks[i].cols(),
                (i + 1) % k,
                next.rows()
            )));
        }
    }
    let mut estimates = Vec::with_capacity(k);
    for r in 0..k {
        let mut prod = blocks[r].clone();
        for s in 1..k {
            prod = prod.mul(&blocks[(r + s) % k])?;
        }
        // tighter than `tol` so that two certified estimates can be compared at `tol`
        estimates.push(power_lambda(&prod, tol / 16.0)?);
    }
    let lo = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().cloned().fold(0.0f64, f64::max);
    let spread = hi - lo;
    Ok(CyclicReport {
        estimates,
        spread,
        tol,
        agree: spread <= tol,
    })
}

/// Sign-aware helper: true if every entry of `v` is strictly positive.
pub fn is_positive_vector(v: &[Q]) -> bool {
    v.iter().all(|q| q.0.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| Q::frac(p, q)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn power_lambda_examples() {
        let half = m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert!((power_lambda(&half, 1e-9).unwrap() - 1.0).abs() <= 1e-9);
        assert!((power_lambda(&m(&[&[(1, 2)]]), 1e-9).unwrap() - 0.5).abs() <= 1e-9);
        // Characteristic polynomial l^2 = 2 * 1/8 = 1/4.
        let cyc = m(&[&[(0, 1), (2, 1)], &[(1, 8), (0, 1)]]);
        assert!((power_lambda(&cyc, 1e-9).unwrap() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn power_lambda_rejects_non_square() {
        let r = NonnegMatrix::zeros(1, 2);
        assert!(matches!(power_lambda(&r, 1e-9), Err(Error::Shape(_))));
        assert!(matches!(is_contracting(&r), Err(Error::Shape(_))));
    }

    #[test]
    fn reducible_matrix_uses_fallback() {
        let d = m(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 2)]]);
        assert!((power_lambda(&d, 1e-9).unwrap() - 1.0).abs() <= 1e-9);
        // Jordan-like block with eigenvalue 1/2.
        let j = m(&[&[(1, 2), (1, 1)], &[(0, 1), (1, 2)]]);
        assert!((power_lambda(&j, 1e-9).unwrap() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn contraction_examples() {
        assert!(is_contracting(&m(&[&[(1, 2)]])).unwrap());
        assert!(!is_contracting(&m(&[&[(1, 1)]])).unwrap());
        let cyc = m(&[&[(0, 1), (2, 1)], &[(1, 8), (0, 1)]]);
        assert!(is_contracting(&cyc).unwrap());
        let inv = neumann_inverse(&cyc, DEFAULT_BIT_LIMIT).unwrap().unwrap();
        let expect = [
            [Q::frac(4, 3), Q::frac(8, 3)],
            [Q::frac(1, 6), Q::frac(4, 3)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(inv[i][j], expect[i][j]);
            }
        }
        assert_eq!(contraction_vector(&cyc).unwrap(), vec![Q::int(4), Q::frac(3, 2)]);
        assert_eq!(contraction_vector(&m(&[&[(1, 2)]])).unwrap(), vec![Q::int(2)]);
        assert_eq!(
            contraction_vector(&NonnegMatrix::zeros(2, 2)).unwrap(),
            vec![Q::one(), Q::one()]
        );
        assert_eq!(contraction_vector(&m(&[&[(3, 1)]])), Err(Error::NotContracting));
    }

    #[test]
    fn expanding_but_invertible_is_not_contracting() {
        // sp = 2, I - W = [[-1]] invertible with negative inverse.
        assert!(!is_contracting(&m(&[&[(2, 1)]])).unwrap());
    }

    #[test]
    fn bit_guard_trips() {
        let w = m(&[&[(1, 3), (1, 7)], &[(1, 5), (1, 11)]]);
        assert_eq!(
            is_contracting_with(&w, 2),
            Err(Error::BitSizeExceeded { limit: 2 })
        );
    }

    #[test]
    fn nilpotency() {
        let upper = m(&[
            &[(0, 1), (1, 1), (1, 1)],
            &[(0, 1), (0, 1), (1, 1)],
            &[(0, 1), (0, 1), (0, 1)],
        ]);
        assert!(is_nilpotent(&upper).unwrap());
        assert!(!is_nilpotent(&m(&[&[(1, 2)]])).unwrap());
        assert!(is_nilpotent(&NonnegMatrix::zeros(0, 0)).unwrap());
    }

    #[test]
    fn cyclic_examples() {
        let r = cyclic_sp_invariance(&[m(&[&[(2, 1)]]), m(&[&[(1, 8)]])], 1e-9).unwrap();
        assert!(r.agree);
        assert!((r.estimates[0] - 0.25).abs() <= 1e-9);
        let row = m(&[&[(1, 1), (1, 1)]]);
        let col = m(&[&[(1, 1)], &[(1, 1)]]);
        let r = cyclic_sp_invariance(&[row, col.clone()], 1e-9).unwrap();
        assert!(r.agree);
        assert!((r.estimates[0] - 2.0).abs() <= 1e-9 && (r.estimates[1] - 2.0).abs() <= 1e-9);
        assert!(matches!(
            cyclic_sp_invariance(&[col.clone(), col], 1e-9),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn empty_matrix() {
        let e = NonnegMatrix::zeros(0, 0);
        assert_eq!(power_lambda(&e, 1e-9).unwrap(), 0.0);
        assert!(is_contracting(&e).unwrap());
        assert!(contraction_vector(&e).unwrap().is_empty());
    }
}

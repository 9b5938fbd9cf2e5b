//! Multilinear Hardy-Littlewood-Sobolev integrals on the line for two or
//! three factors.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::quadrature::{gauss_jacobi, TimeRule};

/// Compactly supported profile on the line.
#[derive(Clone)]
pub struct LineProfile {
    lo: f64,
    hi: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for LineProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LineProfile[{}, {}]", self.lo, self.hi)
    }
}

impl LineProfile {
    /// `f` restricted to `[lo, hi]`; it should be smooth there.
    pub fn new(lo: f64, hi: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(lo < hi) {
            return Err(DunklError::Shape(format!("empty support [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, f: Arc::new(f) })
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, |_| 1.0)
    }

    pub fn zero() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            f: Arc::new(|_| 0.0),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.lo || t > self.hi {
            0.0
        } else {
            (self.f)(t)
        }
    }

    /// `t -> f(lambda t)`.
    pub fn dilate(&self, lambda: f64) -> Self {
        let f = self.f.clone();
        Self {
            lo: self.lo / lambda,
            hi: self.hi / lambda,
            f: Arc::new(move |t| f(lambda * t)),
        }
    }

    pub fn lr_norm(&self, r: f64, nodes: usize) -> f64 {
        TimeRule::composite_gauss_legendre(self.lo, self.hi, 8, nodes)
            .integrate(|t| (self.f)(t).abs().powf(r))
            .powf(1.0 / r)
    }
}

/// Value of the multilinear form and the product of norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlsResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Checks `beta_ii = 0`, `0 <= beta_ij = beta_ji < 1`, `r_k > 1`,
/// `sum 1/r_k > 1` and `sum_i beta_ik = 2 (r_k - 1)/r_k`.
pub fn validate_exponents(beta: &[Vec<f64>], r: &[f64]) -> Result<()> {
    let n = r.len();
    if beta.len() != n || beta.iter().any(|row| row.len() != n) {
        return Err(DunklError::Shape(format!("beta must be {n}x{n}")));
    }
    for i in 0..n {
        if beta[i][i] != 0.0 {
            return Err(DunklError::InvalidExponent(format!("beta[{i}][{i}] must vanish")));
        }
        for j in 0..n {
            let b = beta[i][j];
            if (b - beta[j][i]).abs() > 1e-14 || !(0.0..1.0).contains(&b) {
                return Err(DunklError::InvalidExponent(format!(
                    "beta[{i}][{j}] = {b} must be symmetric and in [0, 1)"
                )));
            }
        }
    }
    if let Some(k) = r.iter().position(|&rk| !(rk > 1.0)) {
        return Err(DunklError::InvalidExponent(format!("r[{k}] = {} must exceed 1", r[k])));
    }
    if r.iter().map(|rk| 1.0 / rk).sum::<f64>() <= 1.0 {
        return Err(DunklError::InvalidExponent("sum of 1/r_k must exceed 1".into()));
    }
    for k in 0..n {
        let col: f64 = (0..n).map(|i| beta[i][k]).sum();
        let want = 2.0 * (r[k] - 1.0) / r[k];
        if (col - want).abs() > 1e-12 {
            return Err(DunklError::InvalidExponent(format!(
                "sum_i beta[i][{k}] = {col} but 2(r-1)/r = {want}"
            )));
        }
    }
    Ok(())
}

/// `(r, beta)` of the symmetric case with `n` equal exponents and equal weights.
pub fn symmetric_exponents(n: usize, r: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let b = 2.0 * (r - 1.0) / (r * (n as f64 - 1.0));
    let beta = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { b }).collect())
        .collect();
    (beta, vec![r; n])
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        _ => unreachable!(),
    }
}

/// Gauss-Jacobi nodes on `(0, len)` for the weight `x^c`.
fn power_rule(len: f64, c: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, 0.0, c);
    let half = 0.5 * len;
    (
        x.iter().map(|x| half * (1.0 + x)).collect(),
        w.iter().map(|w| w * half.powf(c + 1.0)).collect(),
    )
}

/// `int ... int prod_k f_k(t_k) prod_{i<j} |t_i - t_j|^{-beta_ij} dt` against
/// `prod_k ||f_k||_{r_k}`.
///
/// Variables are ordered and the gaps written as `rho s`, `rho (1-s)`; the
/// endpoint singularities are absorbed into Gauss-Jacobi weights in `rho`
/// and `s`, and the base point is integrated over the support intersection.
pub fn mhls_check(profiles: &[LineProfile], beta: &[Vec<f64>], r: &[f64], nodes: usize) -> Result<HlsResult> {
    let n = profiles.len();
    if !(n == 2 || n == 3) {
        return Err(DunklError::Unsupported(format!("{n} factors (only 2 or 3)")));
    }
    if r.len() != n {
        return Err(DunklError::Shape(format!("{} exponents for {n} profiles", r.len())));
    }
    validate_exponents(beta, r)?;
    let lo = profiles.iter().map(|p| p.lo).fold(f64::INFINITY, f64::min);
    let hi = profiles.iter().map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let base = |pos: &[(usize, f64)]| -> f64 {
        // int f_{k}(a + off_k) da over the common support
        let mut a0 = f64::NEG_INFINITY;
        let mut a1 = f64::INFINITY;
        for &(k, off) in pos {
            a0 = a0.max(profiles[k].lo - off);
            a1 = a1.min(profiles[k].hi - off);
        }
        if a1 <= a0 {
            return 0.0;
        }
        TimeRule::gauss_legendre(a0, a1, nodes)
            .integrate(|a| pos.iter().map(|&(k, off)| profiles[k].eval(a + off)).product())
    };
    let mut lhs = 0.0;
    for perm in permutations(n) {
        if n == 2 {
            let b = beta[perm[0]][perm[1]];
            let (u, wu) = power_rule(span, -b, nodes);
            for (&u, &w) in u.iter().zip(&wu) {
                lhs += w * base(&[(perm[0], 0.0), (perm[1], u)]);
            }
        } else {
            let b12 = beta[perm[0]][perm[1]];
            let b23 = beta[perm[1]][perm[2]];
            let b13 = beta[perm[0]][perm[2]];
            let (rho, wr) = power_rule(span, 1.0 - b12 - b23 - b13, nodes);
            // s in (0,1) with weight s^{-b12} (1-s)^{-b23}
            let (xs, ws) = gauss_jacobi(nodes, -b23, -b12);
            let scale_s = 0.5f64.powf(1.0 - b12 - b23);
            for (&rv, &wrv) in rho.iter().zip(&wr) {
                for (&x, &wsv) in xs.iter().zip(&ws) {
                    let s = 0.5 * (1.0 + x);
                    lhs += wrv * wsv * scale_s * base(&[(perm[0], 0.0), (perm[1], rv * s), (perm[2], rv)]);
                }
            }
        }
    }
    let rhs: f64 = profiles
        .iter()
        .zip(r)
        .map(|(p, &rk)| p.lr_norm(rk, nodes))
        .product();
    Ok(HlsResult {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_exponents() {
        let (beta, r) = symmetric_exponents(2, 1.5);
        assert!(validate_exponents(&beta, &r).is_ok());
        assert!(validate_exponents(&beta, &[1.5, 1.6]).is_err());
        let (beta3, r3) = symmetric_exponents(3, 2.0);
        // sum 1/r = 1.5 > 1, beta = 0.5
        assert!(validate_exponents(&beta3, &r3).is_ok());
        let (b, r) = symmetric_exponents(3, 3.5);
        assert!(validate_exponents(&b, &r).is_err());
    }

    #[test]
    fn two_indicators_closed_form() {
        let (beta, r) = symmetric_exponents(2, 1.6);
        let f = LineProfile::indicator(0.0, 1.0).unwrap();
        let res = mhls_check(&[f.clone(), f], &beta, &r, 24).unwrap();
        let b = beta[0][1];
        let exact = 2.0 / ((1.0 - b) * (2.0 - b));
        assert!((res.lhs - exact).abs() < 1e-12 * exact, "{} {exact}", res.lhs);
    }
}

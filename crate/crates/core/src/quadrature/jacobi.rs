//! Gauss-Jacobi rules on `[0, 1]` for the weight `(1 - t)^sigma`.
//!
//! Nodes are the eigenvalues of the Jacobi matrix built from the
//! three-term recurrence (Golub-Welsch), polished by Newton steps on the
//! orthonormal polynomial; weights come from the Christoffel function.

use crate::error::{Error, Result};

/// Monic recurrence coefficients `(alpha_k, beta_k)`, `k = 0..=n`, of the
/// orthogonal polynomials for `(1 - t)^sigma` on `[0, 1]`. `beta_0` holds
/// the total mass `1/(sigma+1)`.
fn recurrence(n: usize, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(n + 1);
    let mut beta = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kf = k as f64;
        let a = if k == 0 {
            -sigma / (sigma + 2.0)
        } else {
            let s = 2.0 * kf + sigma;
            -sigma * sigma / (s * (s + 2.0))
        };
        alpha.push(0.5 * (1.0 + a));
        let b = if k == 0 {
            1.0 / (sigma + 1.0)
        } else {
            let s = 2.0 * kf + sigma;
            let num = 4.0 * kf * kf * (kf + sigma) * (kf + sigma);
            0.25 * num / (s * s * (s + 1.0) * (s - 1.0))
        };
        beta.push(b);
    }
    (alpha, beta)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
/// `off[i]` couples rows `i` and `i+1`; its last entry is ignored.
fn tridiagonal_eigenvalues(mut diag: Vec<f64>, mut off: Vec<f64>) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(diag);
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::convergence("QL iteration did not converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    diag.sort_by(|a, b| a.total_cmp(b));
    Ok(diag)
}

/// Values `p_0..p_{n}` of the orthonormal polynomials at `t`, with derivatives.
fn orthonormal(t: f64, n: usize, alpha: &[f64], beta: &[f64]) -> (Vec<f64>, f64, f64) {
    let mut p = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = 1.0 / beta[0].sqrt();
    let mut dprev = 0.0;
    let mut dcur = 0.0;
    p.push(cur);
    for k in 0..n {
        let sb_next = beta[k + 1].sqrt();
        let sb = if k == 0 { 0.0 } else { beta[k].sqrt() };
        let next = ((t - alpha[k]) * cur - sb * prev) / sb_next;
        let dnext = (cur + (t - alpha[k]) * dcur - sb * dprev) / sb_next;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
        p.push(cur);
    }
    (p, cur, dcur)
}

/// `n`-point rule exact for polynomials of degree `<= 2n - 1` against
/// `(1 - t)^sigma dt` on `[0, 1]`. Weights sum to `1/(sigma+1)`.
pub fn gauss_jacobi_unit(n: usize, sigma: f64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::param("Gauss-Jacobi rule needs at least one node"));
    }
    if !(sigma > -1.0) || !sigma.is_finite() {
        return Err(Error::param(format!(
            "weight exponent must exceed -1, got {sigma}"
        )));
    }
    let (alpha, beta) = recurrence(n, sigma);
    let diag = alpha[..n].to_vec();
    let off: Vec<f64> = (1..=n)
        .map(|k| if k < n { beta[k].sqrt() } else { 0.0 })
        .collect();
    let mut nodes = tridiagonal_eigenvalues(diag, off)?;
    for t in nodes.iter_mut() {
        for _ in 0..2 {
            let (_, pn, dpn) = orthonormal(*t, n, &alpha, &beta);
            if dpn == 0.0 {
                break;
            }
            let step = pn / dpn;
            if step.abs() < 1e-10 {
                *t -= step;
            }
        }
    }
    let rule = nodes
        .into_iter()
        .map(|t| {
            let (p, _, _) = orthonormal(t, n - 1, &alpha, &beta);
            let s: f64 = p.iter().map(|v| v * v).sum();
            (t, 1.0 / s)
        })
        .collect::<Vec<_>>();
    if rule
        .iter()
        .any(|&(t, w)| !(t > 0.0 && t < 1.0) || !(w > 0.0))
    {
        return Err(Error::convergence(format!(
            "Gauss-Jacobi rule with n = {n}, sigma = {sigma} produced nodes outside (0,1)"
        )));
    }
    Ok(rule)
}

//! The De Branges-Rovnyak kernel
//!
//! ```text
//! k(z, w) = (1 - phi(z) conj(phi(w))) / (1 - z conj(w))
//! ```
//!
//! of a self-map `phi`, and numerical estimates of its supremum over the
//! bidisc.

mod sup;

pub use sup::{closed_form_sup, estimate_sup, SupEstimate, SupSettings, SupVerdict};

use crate::complexfn::{BoundaryPoint, Symbol, DEFAULT_CONTACT_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::TAU;

/// Smallest admissible `|1 - z conj(w)|` before the kernel is declared singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

/// Kernel of a verified symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEvaluator {
    symbol: Symbol,
}

impl KernelEvaluator {
    pub fn new(symbol: Symbol) -> Result<Self> {
        if !symbol.is_verified() {
            return Err(Error::Symbol {
                message: "kernel needs a symbol that passed self-map verification".into(),
                angle: None,
            });
        }
        Ok(KernelEvaluator { symbol })
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let den = Complex64::new(1.0, 0.0) - z * w.conj();
        let dist = den.norm();
        if !(dist > SINGULAR_THRESHOLD) {
            return Err(Error::Singular { distance: dist });
        }
        let num = Complex64::new(1.0, 0.0)
            - self.symbol.eval_unchecked(z) * self.symbol.eval_unchecked(w).conj();
        Ok(num / den)
    }
}

pub fn eval_kernel(symbol: &Symbol, z: Complex64, w: Complex64) -> Result<Complex64> {
    KernelEvaluator::new(symbol.clone())?.eval(z, w)
}

/// Radial limit of `k(r zeta, r zeta)` at a contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalLimit {
    pub value: f64,
    /// `|phi'(zeta)|` from the closed-form derivative.
    pub deriv_modulus: f64,
    /// Number of radii actually used.
    pub radii_used: usize,
}

/// Radii `1 - 2^{-k}`, `k = 1..=12`.
pub fn default_radii() -> Vec<f64> {
    (1..=12).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

/// Extrapolates `(1 - |phi(r zeta)|^2) / (1 - r^2)` to `r = 1` along `radii`.
///
/// The quotient is smooth in `s = 1 - r` at a contact point, so Neville
/// extrapolation to `s = 0` is used; iteration stops once two successive
/// extrapolants agree to `tol` (relative). At points without contact the
/// quotient grows like `1/s` and the call fails.
pub fn diagonal_boundary_value(
    symbol: &Symbol,
    zeta: BoundaryPoint,
    radii: &[f64],
    contact_tol: f64,
    tol: f64,
) -> Result<DiagonalLimit> {
    if !symbol.is_verified() {
        return Err(Error::Symbol {
            message: "diagonal limit needs a verified symbol".into(),
            angle: Some(zeta.angle()),
        });
    }
    if radii.len() < 3
        || radii.windows(2).any(|w| !(w[0] < w[1]))
        || radii.iter().any(|&r| !(r > 0.0 && r < 1.0))
    {
        return Err(Error::param(
            "radii must be an increasing sequence in (0,1) of length >= 3",
        ));
    }
    let u = zeta.point();
    let modulus = symbol.eval_unchecked(u).norm();
    if 1.0 - modulus > contact_tol {
        return Err(Error::Convergence {
            message: format!(
                "no boundary contact at angle {} (1 - |phi| = {:e}); the radial quotient diverges",
                zeta.angle(),
                1.0 - modulus
            ),
            partial: None,
            trace: Vec::new(),
        });
    }
    let deriv_modulus = symbol.deriv_unchecked(u).norm();
    let s: Vec<f64> = radii.iter().map(|r| 1.0 - r).collect();
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(radii.len());
    let mut trace = Vec::new();
    let mut last: Option<f64> = None;
    for (i, (&r, &si)) in radii.iter().zip(&s).enumerate() {
        let phi = symbol.eval_unchecked(u * r);
        let g = (1.0 - phi.norm_sqr()) / (si * (2.0 - si));
        let mut row = vec![g];
        for j in 1..=i {
            let a = s[i - j];
            let v = (si * tableau[i - 1][j - 1] - a * row[j - 1]) / (si - a);
            row.push(v);
        }
        let est = row[i];
        tableau.push(row);
        trace.push((i + 1, est));
        if let Some(prev) = last {
            if i >= 2 && (est - prev).abs() <= tol * est.abs().max(1.0) {
                return Ok(DiagonalLimit {
                    value: est,
                    deriv_modulus,
                    radii_used: i + 1,
                });
            }
        }
        last = Some(est);
    }
    Err(Error::Convergence {
        message: format!(
            "radial quotient at angle {} did not stabilise",
            zeta.angle()
        ),
        partial: last,
        trace,
    })
}

/// Max over random interior pairs of
/// `| |1 - phi(z) conj(phi(w))| - |k(z,w)| |1 - z conj(w)| |`.
pub fn pointwise_kernel_identity_check(symbol: &Symbol, samples: usize, seed: u64) -> Result<f64> {
    let k = KernelEvaluator::new(symbol.clone())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        let lhs = (Complex64::new(1.0, 0.0)
            - symbol.eval_unchecked(z) * symbol.eval_unchecked(w).conj())
        .norm();
        let rhs = k.eval(z, w)?.norm() * (Complex64::new(1.0, 0.0) - z * w.conj()).norm();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Uniform point of the open disc (area measure).
pub(crate) fn random_disc_point(rng: &mut StdRng) -> Complex64 {
    let r: f64 = rng.gen::<f64>().sqrt();
    let t: f64 = rng.gen::<f64>() * TAU;
    Complex64::from_polar(r.min(1.0 - 1e-12), t)
}

pub(crate) fn default_contact_tol() -> f64 {
    DEFAULT_CONTACT_TOL
}

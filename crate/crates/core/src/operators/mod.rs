//! Composition operators, the lift into the bidisc, the diagonal bidisc
//! symbol with its boundary rank check, and the composition-operator bound
//! pipeline.

mod bound;
mod rank;

pub use bound::{
    bound_check, bound_check_with_sup, BoundCheckReport, BoundCheckSettings, BoundRow,
};
pub use rank::{
    rank_sufficiency_check, ContactKind, ContactPoint, ContactSet, RankReport, RankSettings,
    RankVerdict,
};

use crate::complexfn::{DiscFunction, Symbol, TruncatedPowerSeries};
use crate::error::{Error, Result};
use crate::kernels::SINGULAR_THRESHOLD;
use crate::norms::{
    bergman_norm_sq_bidisc, dirichlet_norm_sq_coeff, double_integral_functional,
    validate_main_theorem_params, NormResult,
};
use crate::quadrature::QuadratureSettings;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `C_phi f = f o phi`, with derivative `f'(phi(z)) phi'(z)`.
#[derive(Debug, Clone)]
pub struct Composition<F> {
    f: F,
    symbol: Symbol,
}

pub fn apply_composition<F: DiscFunction>(f: F, symbol: &Symbol) -> Result<Composition<F>> {
    if !symbol.is_verified() {
        return Err(Error::Symbol {
            message: "composition needs a verified symbol".into(),
            angle: None,
        });
    }
    Ok(Composition {
        f,
        symbol: symbol.clone(),
    })
}

impl<F> Composition<F> {
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }
}

impl<F: DiscFunction> DiscFunction for Composition<F> {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        self.f.value(self.symbol.eval_unchecked(z))
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let w = self.symbol.eval_unchecked(z);
        Ok(self.f.derivative(w)? * self.symbol.deriv_unchecked(z))
    }
}

/// `Phi(z1, z2) = (phi(z1), phi(z2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalBidiscSymbol {
    pub base: Symbol,
}

impl DiagonalBidiscSymbol {
    pub fn new(base: Symbol) -> Result<Self> {
        if !base.is_verified() {
            return Err(Error::Symbol {
                message: "bidisc symbol needs a verified base".into(),
                angle: None,
            });
        }
        Ok(DiagonalBidiscSymbol { base })
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
        (self.base.eval_unchecked(z1), self.base.eval_unchecked(z2))
    }

    /// Jacobian matrix; off-diagonal partials vanish identically.
    pub fn jacobian(&self, z1: Complex64, z2: Complex64) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        [
            [self.base.deriv_unchecked(z1), zero],
            [zero, self.base.deriv_unchecked(z2)],
        ]
    }

    pub fn jacobian_det(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        self.base.deriv_unchecked(z1) * self.base.deriv_unchecked(z2)
    }
}

/// Exponents of the lift; the denominator power is `p_exp / gamma_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftParams {
    pub p_exp: f64,
    pub gamma_exp: f64,
}

impl LiftParams {
    pub fn new(p_exp: f64, gamma_exp: f64) -> Result<Self> {
        if !(p_exp > 0.0 && gamma_exp > 0.0) || !p_exp.is_finite() || !gamma_exp.is_finite() {
            return Err(Error::param(format!(
                "lift exponents must be positive, got p = {p_exp}, gamma = {gamma_exp}"
            )));
        }
        Ok(LiftParams { p_exp, gamma_exp })
    }

    pub fn exponent(&self) -> f64 {
        self.p_exp / self.gamma_exp
    }
}

/// `(f(z) - f(w)) / (1 - conj(w) z)^e` on the bidisc.
///
/// The factor is anti-holomorphic in `w`, and only the modulus is used
/// downstream, so only the modulus is provided (principal branch).
#[derive(Debug, Clone)]
pub struct Lift<F> {
    f: F,
    exponent: f64,
}

pub fn lift<F: DiscFunction>(f: F, params: LiftParams) -> Lift<F> {
    Lift {
        f,
        exponent: params.exponent(),
    }
}

impl<F: DiscFunction> Lift<F> {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn modulus(&self, z: Complex64, w: Complex64) -> Result<f64> {
        let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
        if !(den > SINGULAR_THRESHOLD) {
            return Err(Error::Singular { distance: den });
        }
        Ok((self.f.value(z)? - self.f.value(w)?).norm() / den.powf(self.exponent))
    }
}

/// Both sides of the lift estimate for one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftNormCheck {
    /// `||L f||^2` in `A^2_sigma(D^2)`, integrated through the lift evaluator.
    pub lift_norm_sq: NormResult,
    /// The double-integral functional, integrated through its own route.
    pub functional: NormResult,
    /// `||f||^2` in `D_{2 sigma - 2 beta}`.
    pub dirichlet: NormResult,
}

impl LiftNormCheck {
    /// Relative gap between the two routes to the same integral.
    pub fn route_gap(&self) -> f64 {
        let (a, b) = (self.lift_norm_sq.value_sq, self.functional.value_sq);
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }
}

/// Computes `||L f||^2_{A^2_sigma}` and `||f||^2_{D_{2sigma-2beta}}`.
///
/// The lift paired with `q = 2(beta+2)` divides by `|1 - conj(w) z|^{beta+2}`,
/// so its squared modulus is exactly the double-integral integrand; the
/// functional is computed again through [`double_integral_functional`] for
/// comparison.
pub fn lift_norm_check(
    f: &TruncatedPowerSeries,
    sigma: f64,
    beta: f64,
    settings: &QuadratureSettings,
) -> Result<LiftNormCheck> {
    let params = validate_main_theorem_params(sigma, beta)?;
    let lp = LiftParams::new(params.q_exponent, 2.0)?;
    let l = lift(f, lp);
    let lift_norm_sq = bergman_norm_sq_bidisc(|z, w| l.modulus(z, w), sigma, settings)?;
    let functional = double_integral_functional(f, &params, settings)?;
    let dirichlet = dirichlet_norm_sq_coeff(f, params.p_dirichlet)?;
    Ok(LiftNormCheck {
        lift_norm_sq,
        functional,
        dirichlet,
    })
}

#[cfg(test)]
mod tests;

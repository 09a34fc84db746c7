//! Dirichlet-type norms, bidisc Bergman norms and the double-integral
//! functional
//!
//! ```text
//! I(f) = int int |f(z) - f(w)|^2 / |1 - conj(w) z|^q dA_sigma(z) dA_tau(w)
//! ```
//!
//! which is comparable to `||f||^2` in `D_{sigma+tau-2beta}`.
//!
//! All Dirichlet norms here are seminorms: constants have norm zero.

mod params;

pub use params::{validate_main_theorem_params, validate_params, WeightParams};

use crate::complexfn::{DiscFunction, TruncatedPowerSeries};
use crate::error::{Error, Result};
use crate::quadrature::{
    build_disc_rule, pairwise_sum, refine_until, try_integrate_bidisc, try_integrate_disc,
    BidiscRule, QuadratureSettings,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Coefficient,
    Quadrature,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::Coefficient => "coefficient",
            NormMethod::Quadrature => "quadrature",
        }
    }
}

/// A squared (semi)norm with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value_sq: f64,
    pub method: NormMethod,
    /// Relative change over the last refinement; zero for the coefficient route.
    pub rel_error_estimate: f64,
    /// `(radial_count, value)` per refinement level; empty for coefficients.
    pub trace: Vec<(usize, f64)>,
}

impl NormResult {
    fn quadrature(r: crate::quadrature::Refinement) -> Self {
        NormResult {
            value_sq: r.value.max(0.0),
            method: NormMethod::Quadrature,
            rel_error_estimate: r.achieved_rel_tol,
            trace: r.trace,
        }
    }
}

/// `B(n, b) = Gamma(n) Gamma(b) / Gamma(n + b)` for integer `n >= 1`.
pub fn beta_int(n: usize, b: f64) -> f64 {
    (1..n).fold(1.0 / b, |acc, j| acc * j as f64 / (b + j as f64))
}

fn check_p(p: f64) -> Result<()> {
    if p >= 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "Dirichlet index p must be >= 0, got {p}"
        )))
    }
}

/// `int |f'|^2 (1-|z|^2)^p dA = sum_n n^2 |a_n|^2 B(n, p+1)`.
pub fn dirichlet_norm_sq_coeff(s: &TruncatedPowerSeries, p: f64) -> Result<NormResult> {
    check_p(p)?;
    let terms: Vec<f64> = s
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| (n * n) as f64 * a.norm_sqr() * beta_int(n, p + 1.0))
        .collect();
    Ok(NormResult {
        value_sq: pairwise_sum(&terms),
        method: NormMethod::Coefficient,
        rel_error_estimate: 0.0,
        trace: Vec::new(),
    })
}

/// Quadrature route for the same integral: the `dA_p` rule applied to
/// `|f'|^2`, divided by `p + 1` to undo the probability normalisation.
pub fn dirichlet_norm_sq_quad(
    f: &dyn DiscFunction,
    p: f64,
    settings: &QuadratureSettings,
) -> Result<NormResult> {
    check_p(p)?;
    let r = refine_until(settings, |s| {
        let rule = build_disc_rule(p, s.radial_count, s.angular_count)?;
        let v = try_integrate_disc(&rule, |z| Ok(f.derivative(z)?.norm_sqr()))?;
        Ok(v / (p + 1.0))
    })?;
    Ok(NormResult::quadrature(r))
}

/// `||F||^2` in `A^2_sigma(D^2)`. `modulus` returns `|F(z, w)|`.
pub fn bergman_norm_sq_bidisc<F>(
    modulus: F,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<NormResult>
where
    F: Fn(Complex64, Complex64) -> Result<f64> + Sync,
{
    if !(sigma > -1.0) {
        return Err(Error::param(format!("sigma must exceed -1, got {sigma}")));
    }
    let r = refine_until(settings, |s| {
        let rule = BidiscRule::build(sigma, sigma, s.radial_count, s.angular_count)?;
        try_integrate_bidisc(&rule, |z, w| {
            let m = modulus(z, w)?;
            Ok(m * m)
        })
    })?;
    Ok(NormResult::quadrature(r))
}

/// The double-integral functional on a fixed tensor rule.
///
/// `|1 - conj(w) z|` depends on the angles only through their difference, so
/// for every pair of radial nodes the kernel is tabulated once per angular
/// offset. The nodal sum is otherwise the plain tensor rule.
pub fn double_integral_on_rule(f: &dyn DiscFunction, rule: &BidiscRule, q: f64) -> Result<f64> {
    let m = rule.rule_z.angular_count();
    if rule.rule_w.angular_count() != m {
        return Err(Error::param("double integral needs equal angular counts"));
    }
    let zs = rule.rule_z.nodes();
    let ws = rule.rule_w.nodes();
    let fz = zs
        .iter()
        .map(|n| f.value(n.z))
        .collect::<Result<Vec<_>>>()?;
    let fw = ws
        .iter()
        .map(|n| f.value(n.z))
        .collect::<Result<Vec<_>>>()?;
    let rz: Vec<f64> = rule
        .rule_z
        .radial()
        .iter()
        .map(|&(t, _)| t.sqrt())
        .collect();
    let rw: Vec<f64> = rule
        .rule_w
        .radial()
        .iter()
        .map(|&(t, _)| t.sqrt())
        .collect();
    let nw = rw.len();
    let half_q = q / 2.0;
    // kernel[(i * nw + k) * m + d] = |1 - r_i r_k e^{i 2 pi d / m}|^{-q}
    let kernel: Vec<f64> = (0..rz.len() * nw)
        .into_par_iter()
        .flat_map_iter(|ik| {
            let rho = rz[ik / nw] * rw[ik % nw];
            (0..m).map(move |d| {
                let u = Complex64::from_polar(rho, std::f64::consts::TAU * d as f64 / m as f64);
                (Complex64::new(1.0, 0.0) - u).norm_sqr().powf(-half_q)
            })
        })
        .collect();
    let rows: Vec<f64> = zs
        .par_iter()
        .zip(fz.par_iter())
        .map(|(zn, &fzv)| {
            let mut terms = Vec::with_capacity(ws.len());
            for (wn, &fwv) in ws.iter().zip(&fw) {
                let d = (zn.angular_index + m - wn.angular_index) % m;
                let k = kernel[(zn.radial_index * nw + wn.radial_index) * m + d];
                terms.push((fzv - fwv).norm_sqr() * k * wn.weight);
            }
            pairwise_sum(&terms) * zn.weight
        })
        .collect();
    let v = pairwise_sum(&rows);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::convergence(
            "double integral is not finite on the rule",
        ))
    }
}

/// Refinement-driven evaluation of the double-integral functional.
pub fn double_integral_functional(
    f: &dyn DiscFunction,
    params: &WeightParams,
    settings: &QuadratureSettings,
) -> Result<NormResult> {
    let r = refine_until(settings, |s| {
        let rule = BidiscRule::build(params.sigma, params.tau, s.radial_count, s.angular_count)?;
        double_integral_on_rule(f, &rule, params.q_exponent)
    })?;
    Ok(NormResult::quadrature(r))
}

/// Ratio of the double-integral functional to the Dirichlet seminorm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRatio {
    pub ratio: f64,
    pub functional: NormResult,
    pub dirichlet: NormResult,
}

/// Series input: the Dirichlet denominator uses the exact coefficient formula.
pub fn equivalence_ratio(
    f: &TruncatedPowerSeries,
    params: &WeightParams,
    settings: &QuadratureSettings,
) -> Result<EquivalenceRatio> {
    if f.is_constant() {
        return Err(Error::param(
            "equivalence ratio is undefined for constant f",
        ));
    }
    let dirichlet = dirichlet_norm_sq_coeff(f, params.p_dirichlet)?;
    let functional = double_integral_functional(f, params, settings)?;
    Ok(EquivalenceRatio {
        ratio: functional.value_sq / dirichlet.value_sq,
        functional,
        dirichlet,
    })
}

/// General input: both sides by quadrature. `dirichlet_settings` drives the
/// one-variable rule, `settings` the double integral.
pub fn equivalence_ratio_quad(
    f: &dyn DiscFunction,
    params: &WeightParams,
    settings: &QuadratureSettings,
    dirichlet_settings: &QuadratureSettings,
) -> Result<EquivalenceRatio> {
    let dirichlet = dirichlet_norm_sq_quad(f, params.p_dirichlet, dirichlet_settings)?;
    if dirichlet.value_sq == 0.0 {
        return Err(Error::param(
            "equivalence ratio is undefined for constant f",
        ));
    }
    let functional = double_integral_functional(f, params, settings)?;
    Ok(EquivalenceRatio {
        ratio: functional.value_sq / dirichlet.value_sq,
        functional,
        dirichlet,
    })
}

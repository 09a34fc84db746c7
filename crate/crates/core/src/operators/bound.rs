use super::apply_composition;
use crate::complexfn::{DiscFunction, Symbol, TruncatedPowerSeries};
use crate::error::{Error, Result};
use crate::kernels::{estimate_sup, SupEstimate, SupSettings, SupVerdict};
use crate::norms::{
    dirichlet_norm_sq_coeff, dirichlet_norm_sq_quad, validate_main_theorem_params, NormResult,
    WeightParams,
};
use crate::quadrature::{pairwise_sum, BidiscRule, QuadratureSettings};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckSettings {
    /// One-variable rule for the Dirichlet norms.
    pub dirichlet: QuadratureSettings,
    /// Tensor rule on which the double integrals and the pointwise
    /// inequality are evaluated.
    pub double: QuadratureSettings,
    pub sup: SupSettings,
    /// Relative slack allowed in the pointwise inequality.
    pub pointwise_tol: f64,
}

impl Default for BoundCheckSettings {
    fn default() -> Self {
        BoundCheckSettings {
            dirichlet: QuadratureSettings::default(),
            double: QuadratureSettings {
                radial_count: 16,
                angular_count: 64,
                ..QuadratureSettings::double_integral()
            },
            sup: SupSettings::default(),
            pointwise_tol: 1e-12,
        }
    }
}

/// One family member of the bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub index: usize,
    /// `||C_phi f||^2` in `D_p`, quadrature route on `f'(phi) phi'`.
    pub composed_norm_sq: NormResult,
    /// `||f||^2` in `D_p`, coefficient route.
    pub norm_sq: NormResult,
    /// `||C_phi f||^2 / (sup^q ||f||^2)`.
    pub ratio: f64,
    /// The same ratio with the composed norm from the previous refinement
    /// level; equals `ratio` when only one level was evaluated.
    pub ratio_coarse: f64,
    /// Double integral of `f o phi` with kernel `|1 - conj(w) z|^{-q}`.
    pub composed_functional: f64,
    /// Double integral of `f o phi` with kernel `|1 - conj(phi(w)) phi(z)|^{-q}`.
    pub pulled_back_functional: f64,
    /// Nodes where the integrand with the original kernel exceeded
    /// `sup^q` times the integrand with the pulled-back kernel.
    pub pointwise_violations: usize,
    pub nodes_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub params: WeightParams,
    pub sup: SupEstimate,
    /// `sup^q`.
    pub sup_power: f64,
    pub rows: Vec<BoundRow>,
}

impl BoundCheckReport {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn max_ratio_coarse(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio_coarse).fold(0.0, f64::max)
    }

    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.pointwise_violations).sum()
    }
}

struct ChainIntegrals {
    composed: f64,
    pulled_back: f64,
    violations: usize,
    nodes: usize,
}

/// Both double integrals of `F = f o phi` on one tensor rule, and the count
/// of nodes where `|F(z)-F(w)|^2 / |1 - conj(w) z|^q` exceeds
/// `sup_q |F(z)-F(w)|^2 / |1 - conj(phi(w)) phi(z)|^q`.
fn chain_integrals(
    composed: &dyn DiscFunction,
    symbol: &Symbol,
    rule: &BidiscRule,
    q: f64,
    sup_q: f64,
    tol: f64,
) -> Result<ChainIntegrals> {
    let zs = rule.rule_z.nodes();
    let ws = rule.rule_w.nodes();
    let eval = |nodes: &[crate::quadrature::DiscNode]| -> Result<Vec<(Complex64, Complex64)>> {
        nodes
            .iter()
            .map(|n| Ok((composed.value(n.z)?, symbol.eval_unchecked(n.z))))
            .collect()
    };
    let fz = eval(&zs)?;
    let fw = eval(&ws)?;
    let half_q = q / 2.0;
    let one = Complex64::new(1.0, 0.0);
    let rows: Vec<(f64, f64, usize)> = zs
        .par_iter()
        .zip(fz.par_iter())
        .map(|(zn, &(fzv, pz))| {
            let mut a = Vec::with_capacity(ws.len());
            let mut b = Vec::with_capacity(ws.len());
            let mut bad = 0;
            for (wn, &(fwv, pw)) in ws.iter().zip(&fw) {
                let diff = (fzv - fwv).norm_sqr();
                let orig = diff * (one - wn.z.conj() * zn.z).norm_sqr().powf(-half_q);
                let pulled = diff * (one - pw.conj() * pz).norm_sqr().powf(-half_q);
                if orig > sup_q * pulled * (1.0 + tol) {
                    bad += 1;
                }
                a.push(orig * wn.weight);
                b.push(pulled * wn.weight);
            }
            (
                pairwise_sum(&a) * zn.weight,
                pairwise_sum(&b) * zn.weight,
                bad,
            )
        })
        .collect();
    let composed_v = pairwise_sum(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let pulled_v = pairwise_sum(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
    if !(composed_v.is_finite() && pulled_v.is_finite()) {
        return Err(Error::convergence(
            "chain integrals are not finite on the rule",
        ));
    }
    Ok(ChainIntegrals {
        composed: composed_v,
        pulled_back: pulled_v,
        violations: rows.iter().map(|r| r.2).sum(),
        nodes: zs.len() * ws.len(),
    })
}

/// Runs the bounded-kernel argument for every member of `family`.
///
/// For `p = 2 sigma - 2 beta` and `q = 2 (beta + 2)` the quantity
/// `||C_phi f||^2 / (||k||_inf^q ||f||^2)` is computed per member, next to
/// the two double integrals linked by the pointwise bound
/// `|1 - conj(w) z|^{-q} <= ||k||_inf^q |1 - conj(phi(w)) phi(z)|^{-q}`,
/// which is checked at every node of the tensor rule.
pub fn bound_check(
    family: &[TruncatedPowerSeries],
    symbol: &Symbol,
    sigma: f64,
    beta: f64,
    settings: &BoundCheckSettings,
) -> Result<BoundCheckReport> {
    validate_main_theorem_params(sigma, beta)?;
    let sup = estimate_sup(symbol, &settings.sup)?;
    bound_check_with_sup(family, symbol, sigma, beta, sup, settings)
}

/// [`bound_check`] with a supremum estimate computed beforehand.
pub fn bound_check_with_sup(
    family: &[TruncatedPowerSeries],
    symbol: &Symbol,
    sigma: f64,
    beta: f64,
    sup: SupEstimate,
    settings: &BoundCheckSettings,
) -> Result<BoundCheckReport> {
    let params = validate_main_theorem_params(sigma, beta)?;
    if sup.verdict != SupVerdict::Bounded {
        return Err(Error::param(format!(
            "kernel supremum verdict is {}; the bound needs a bounded kernel",
            sup.verdict.as_str()
        )));
    }
    let sup_power = sup.value.powf(params.q_exponent);
    let rule = BidiscRule::build(
        sigma,
        sigma,
        settings.double.radial_count,
        settings.double.angular_count,
    )?;
    let rows = family
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            let composed = apply_composition(f, symbol)?;
            let composed_norm_sq =
                dirichlet_norm_sq_quad(&composed, params.p_dirichlet, &settings.dirichlet)?;
            let norm_sq = dirichlet_norm_sq_coeff(f, params.p_dirichlet)?;
            let denom = sup_power * norm_sq.value_sq;
            let coarse = composed_norm_sq
                .trace
                .iter()
                .rev()
                .nth(1)
                .map_or(composed_norm_sq.value_sq, |t| t.1);
            let chain = chain_integrals(
                &composed,
                symbol,
                &rule,
                params.q_exponent,
                sup_power,
                settings.pointwise_tol,
            )?;
            Ok(BoundRow {
                index,
                ratio: composed_norm_sq.value_sq / denom,
                ratio_coarse: coarse / denom,
                composed_norm_sq,
                norm_sq,
                composed_functional: chain.composed,
                pulled_back_functional: chain.pulled_back,
                pointwise_violations: chain.violations,
                nodes_checked: chain.nodes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCheckReport {
        params,
        sup,
        sup_power,
        rows,
    })
}

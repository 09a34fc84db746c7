use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Weight exponents `(sigma, tau, beta)` of the double-integral
/// characterisation, with the derived Dirichlet index `p = sigma + tau - 2 beta`
/// and kernel exponent `q = 2 (beta + 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub sigma: f64,
    pub tau: f64,
    pub beta: f64,
    pub p_dirichlet: f64,
    pub q_exponent: f64,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite, got {v}")))
    }
}

/// Admits `sigma, tau > -1` and `max(sigma, tau)/2 - 1 < beta <= (sigma + tau)/2`.
pub fn validate_params(sigma: f64, tau: f64, beta: f64) -> Result<WeightParams> {
    finite("sigma", sigma)?;
    finite("tau", tau)?;
    finite("beta", beta)?;
    if sigma <= -1.0 || tau <= -1.0 {
        return Err(Error::param(format!(
            "weight exponents must satisfy sigma > -1 and tau > -1, got sigma = {sigma}, tau = {tau}"
        )));
    }
    let lower = sigma.max(tau) / 2.0 - 1.0;
    if beta <= lower {
        return Err(Error::param(format!(
            "beta = {beta} violates the lower bound max(sigma,tau)/2 - 1 < beta (= {lower})"
        )));
    }
    let upper = (sigma + tau) / 2.0;
    if beta > upper {
        return Err(Error::param(format!(
            "beta = {beta} violates the upper bound beta <= (sigma+tau)/2 (= {upper})"
        )));
    }
    Ok(WeightParams {
        sigma,
        tau,
        beta,
        p_dirichlet: sigma + tau - 2.0 * beta,
        q_exponent: 2.0 * (beta + 2.0),
    })
}

/// Parameters of the composition-operator bound: `tau = sigma > 0` and the
/// strict window `sigma/2 - 1 < beta < sigma`, giving `p = 2 sigma - 2 beta > 0`.
pub fn validate_main_theorem_params(sigma: f64, beta: f64) -> Result<WeightParams> {
    finite("sigma", sigma)?;
    finite("beta", beta)?;
    if sigma <= 0.0 {
        return Err(Error::param(format!("sigma must be > 0, got {sigma}")));
    }
    let lower = sigma / 2.0 - 1.0;
    if beta <= lower {
        return Err(Error::param(format!(
            "beta = {beta} violates the lower bound sigma/2 - 1 < beta (= {lower})"
        )));
    }
    if beta >= sigma {
        return Err(Error::param(format!(
            "beta = {beta} violates the strict upper bound beta < sigma (= {sigma})"
        )));
    }
    validate_params(sigma, sigma, beta)
}

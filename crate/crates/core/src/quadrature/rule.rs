use super::jacobi::gauss_jacobi_unit;
use super::{pairwise_sum, Quantity};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Quadrature rule for `dA_sigma` on the disc.
///
/// Polar coordinates with `t = r^2` turn the measure into
/// `(sigma+1) (1-t)^sigma dt * dtheta / (2 pi)`; the radial factor uses
/// Gauss-Jacobi nodes and the angular factor the uniform rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscRule {
    sigma: f64,
    radial: Vec<(f64, f64)>,
    angular_count: usize,
    normalization: f64,
}

/// A node of a disc rule with its full weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscNode {
    pub z: Complex64,
    pub weight: f64,
    pub radial_index: usize,
    pub angular_index: usize,
}

pub fn build_disc_rule(sigma: f64, n_rad: usize, n_ang: usize) -> Result<DiscRule> {
    if !(sigma > -1.0) {
        return Err(Error::param(format!(
            "weight exponent sigma must exceed -1 (the endpoint -1 is not integrable), got {sigma}"
        )));
    }
    if n_rad < 2 || n_ang < 4 {
        return Err(Error::param(format!(
            "disc rule needs n_rad >= 2 and n_ang >= 4, got {n_rad} and {n_ang}"
        )));
    }
    Ok(DiscRule {
        sigma,
        radial: gauss_jacobi_unit(n_rad, sigma)?,
        angular_count: n_ang,
        normalization: sigma + 1.0,
    })
}

impl DiscRule {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Radial `(t, w)` pairs for `(1-t)^sigma dt` on `[0,1]`, `t = r^2`.
    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angular_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angle of the `j`-th angular node.
    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.angular_count as f64
    }

    /// All nodes, radial index major.
    pub fn nodes(&self) -> Vec<DiscNode> {
        let m = self.angular_count;
        let units: Vec<Complex64> = (0..m)
            .map(|j| {
                let (s, c) = self.angle(j).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let mut out = Vec::with_capacity(self.len());
        for (i, &(t, w)) in self.radial.iter().enumerate() {
            let r = t.sqrt();
            let weight = self.normalization * w / m as f64;
            for (j, u) in units.iter().enumerate() {
                out.push(DiscNode {
                    z: u * r,
                    weight,
                    radial_index: i,
                    angular_index: j,
                });
            }
        }
        out
    }
}

/// Tensor product of two disc rules for `dA_sigma(z) dA_tau(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiscRule {
    pub rule_z: DiscRule,
    pub rule_w: DiscRule,
}

impl BidiscRule {
    pub fn new(rule_z: DiscRule, rule_w: DiscRule) -> Self {
        BidiscRule { rule_z, rule_w }
    }

    pub fn build(sigma: f64, tau: f64, n_rad: usize, n_ang: usize) -> Result<Self> {
        Ok(BidiscRule {
            rule_z: build_disc_rule(sigma, n_rad, n_ang)?,
            rule_w: build_disc_rule(tau, n_rad, n_ang)?,
        })
    }
}

fn non_finite() -> Error {
    Error::convergence("integrand is not finite at a quadrature node")
}

/// `int g dA_sigma` as a weighted nodal sum with pairwise accumulation.
pub fn integrate_disc<T, G>(rule: &DiscRule, g: G) -> Result<T>
where
    T: Quantity,
    G: Fn(Complex64) -> T,
{
    try_integrate_disc(rule, |z| Ok(g(z)))
}

/// [`integrate_disc`] for integrands that can fail.
pub fn try_integrate_disc<T, G>(rule: &DiscRule, g: G) -> Result<T>
where
    T: Quantity,
    G: Fn(Complex64) -> Result<T>,
{
    let mut terms = Vec::with_capacity(rule.len());
    for node in rule.nodes() {
        let v = g(node.z)?;
        if !v.is_finite() {
            return Err(non_finite());
        }
        terms.push(v.scaled(node.weight));
    }
    Ok(pairwise_sum(&terms))
}

/// `int int G(z, w) dA_sigma(z) dA_tau(w)`.
///
/// Rows (one per `z` node) are evaluated in parallel; every row is reduced
/// pairwise and the row sums are reduced pairwise in node order, so the
/// result does not depend on scheduling.
pub fn integrate_bidisc<T, G>(rule: &BidiscRule, g: G) -> Result<T>
where
    T: Quantity,
    G: Fn(Complex64, Complex64) -> T + Sync,
{
    try_integrate_bidisc(rule, |z, w| Ok(g(z, w)))
}

/// [`integrate_bidisc`] for integrands that can fail. The reported error is
/// the one at the first failing node in node order.
pub fn try_integrate_bidisc<T, G>(rule: &BidiscRule, g: G) -> Result<T>
where
    T: Quantity,
    G: Fn(Complex64, Complex64) -> Result<T> + Sync,
{
    let zs = rule.rule_z.nodes();
    let ws = rule.rule_w.nodes();
    let rows: Vec<Result<T>> = zs
        .par_iter()
        .map(|zn| {
            let mut terms = Vec::with_capacity(ws.len());
            for wn in &ws {
                let v = g(zn.z, wn.z)?;
                if !v.is_finite() {
                    return Err(non_finite());
                }
                terms.push(v.scaled(wn.weight));
            }
            Ok(pairwise_sum(&terms).scaled(zn.weight))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<T>>>()?;
    Ok(pairwise_sum(&rows))
}

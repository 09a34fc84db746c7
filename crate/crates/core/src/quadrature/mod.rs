//! Radially weighted quadrature on the disc and tensor rules on the bidisc.
//!
//! Measures are normalised so that `dA_sigma = (sigma+1)(1-|z|^2)^sigma dA`
//! is a probability measure, with `dA = dx dy / pi`.

mod jacobi;
mod rule;

pub use jacobi::gauss_jacobi_unit;
pub use rule::{
    build_disc_rule, integrate_bidisc, integrate_disc, try_integrate_bidisc, try_integrate_disc,
    BidiscRule, DiscNode, DiscRule,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::Add;

/// Scalar types the integrators accumulate.
pub trait Quantity: Copy + Default + Add<Output = Self> + Send + Sync {
    fn scaled(self, w: f64) -> Self;
    fn is_finite(&self) -> bool;
    fn magnitude(&self) -> f64;
}

impl Quantity for f64 {
    fn scaled(self, w: f64) -> Self {
        self * w
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Quantity for Complex64 {
    fn scaled(self, w: f64) -> Self {
        self * w
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Pairwise (cascade) summation with a fixed split pattern, so the result
/// depends only on the order of `xs`.
pub fn pairwise_sum<T: Quantity>(xs: &[T]) -> T {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().fold(T::default(), |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSettings {
    pub radial_count: usize,
    pub angular_count: usize,
    pub refinement_factor: usize,
    pub target_rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            radial_count: 16,
            angular_count: 32,
            refinement_factor: 2,
            target_rel_tol: 1e-8,
            max_refinements: 3,
        }
    }
}

impl QuadratureSettings {
    /// Defaults for the singular double integrals, which converge
    /// algebraically rather than exactly.
    pub fn double_integral() -> Self {
        QuadratureSettings {
            radial_count: 32,
            angular_count: 128,
            refinement_factor: 2,
            target_rel_tol: 1e-2,
            max_refinements: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_count < 2 || self.angular_count < 4 {
            return Err(Error::param(format!(
                "quadrature needs radial_count >= 2 and angular_count >= 4, got {} and {}",
                self.radial_count, self.angular_count
            )));
        }
        if self.refinement_factor < 2 {
            return Err(Error::param("refinement_factor must be >= 2"));
        }
        if !(self.target_rel_tol > 0.0 && self.target_rel_tol <= 0.1) {
            return Err(Error::param(format!(
                "target_rel_tol must lie in (0, 0.1], got {}",
                self.target_rel_tol
            )));
        }
        Ok(())
    }

    /// Both node counts multiplied by `refinement_factor^levels`.
    pub fn refined(&self, levels: u32) -> Self {
        let f = self.refinement_factor.pow(levels);
        QuadratureSettings {
            radial_count: self.radial_count * f,
            angular_count: self.angular_count * f,
            ..*self
        }
    }
}

/// Result of [`refine_until`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Refinement {
    pub value: f64,
    /// Relative change over the last refinement step.
    pub achieved_rel_tol: f64,
    /// `(radial_count, value)` per level, coarsest first.
    pub trace: Vec<(usize, f64)>,
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    let d = (cur - prev).abs();
    if d == 0.0 {
        0.0
    } else {
        d / cur.abs().max(prev.abs())
    }
}

/// Evaluates `functional` on successively refined settings until the
/// relative change drops to `target_rel_tol`.
pub fn refine_until<F>(settings: &QuadratureSettings, mut functional: F) -> Result<Refinement>
where
    F: FnMut(&QuadratureSettings) -> Result<f64>,
{
    settings.validate()?;
    let mut trace = Vec::with_capacity(settings.max_refinements + 1);
    let mut prev = functional(settings)?;
    if !prev.is_finite() {
        return Err(Error::convergence(
            "functional is not finite on the base rule",
        ));
    }
    trace.push((settings.radial_count, prev));
    let mut change = f64::INFINITY;
    for level in 1..=settings.max_refinements as u32 {
        let s = settings.refined(level);
        let cur = functional(&s)?;
        if !cur.is_finite() {
            return Err(Error::Convergence {
                message: format!("functional is not finite at refinement level {level}"),
                partial: Some(prev),
                trace,
            });
        }
        trace.push((s.radial_count, cur));
        change = relative_change(prev, cur);
        prev = cur;
        if change <= settings.target_rel_tol {
            return Ok(Refinement {
                value: cur,
                achieved_rel_tol: change,
                trace,
            });
        }
    }
    Err(Error::Convergence {
        message: format!(
            "relative change {change:e} after {} refinements exceeds target {:e}",
            settings.max_refinements, settings.target_rel_tol
        ),
        partial: Some(prev),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }

    #[test]
    fn constant_converges_in_one_step() {
        let s = QuadratureSettings::default();
        let r = refine_until(&s, |s| {
            let rule = build_disc_rule(1.0, s.radial_count, s.angular_count)?;
            integrate_disc(&rule, |_| 1.0)
        })
        .unwrap();
        assert_eq!(r.trace.len(), 2);
        assert!(r.achieved_rel_tol < 1e-14);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_integral_of_z8() {
        // |f'|^2 (1-|z|^2) against dA, via the sigma = 1 rule divided by 2
        let s = QuadratureSettings::default();
        let r = refine_until(&s, |s| {
            let rule = build_disc_rule(1.0, s.radial_count, s.angular_count)?;
            let v = integrate_disc(&rule, |z| 64.0 * z.norm_sqr().powi(7))?;
            Ok(v / 2.0)
        })
        .unwrap();
        assert!((r.value - 64.0 / 72.0).abs() < 1e-8);
    }

    #[test]
    fn pole_is_reported() {
        let s = QuadratureSettings::default();
        let e = refine_until(&s, |s| {
            let rule = build_disc_rule(0.0, s.radial_count, s.angular_count)?;
            // every rule has a node on the positive real axis at angle 0
            let t0 = rule.radial()[0].0;
            let pole = Complex64::new(t0.sqrt(), 0.0);
            integrate_disc(&rule, |z| 1.0 / (z - pole).norm())
        })
        .unwrap_err();
        assert_eq!(e.code(), "E_CONVERGENCE");
    }

    #[test]
    fn non_converging_functional_keeps_trace() {
        let s = QuadratureSettings::default();
        let e = refine_until(&s, |s| Ok(s.radial_count as f64)).unwrap_err();
        match e {
            Error::Convergence { partial, trace, .. } => {
                assert_eq!(partial, Some(128.0));
                assert_eq!(trace.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn settings_validation() {
        let s = QuadratureSettings {
            target_rel_tol: 0.5,
            ..QuadratureSettings::default()
        };
        assert_eq!(s.validate().unwrap_err().code(), "E_PARAM");
        let s = QuadratureSettings {
            refinement_factor: 1,
            ..QuadratureSettings::default()
        };
        assert!(s.validate().is_err());
    }
}

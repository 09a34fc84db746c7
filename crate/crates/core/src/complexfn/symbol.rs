use super::{BoundaryPoint, DiscFunction};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default tolerance on `1 - |phi(zeta)|` below which a boundary point counts
/// as a contact point.
pub const DEFAULT_CONTACT_TOL: f64 = 1e-6;

/// Catalog of holomorphic self-maps of the disc with closed-form derivatives.
///
/// Every variant except [`Symbol::Polynomial`] maps the disc into itself by
/// construction. A polynomial is only evaluable after [`verify_self_map`]
/// has set its `verified` flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Symbol {
    Identity,
    Rotation {
        angle: f64,
    },
    /// `e^{i post_rotation} (a - z) / (1 - conj(a) z)`.
    #[serde(rename = "mobius")]
    MobiusAuto {
        #[serde(with = "super::complex_obj")]
        a: Complex64,
        #[serde(default)]
        post_rotation: f64,
    },
    Monomial {
        k: u32,
    },
    /// `e^{i post_rotation} prod_j (a_j - z) / (1 - conj(a_j) z)`.
    #[serde(rename = "blaschke")]
    FiniteBlaschke {
        #[serde(with = "super::complex_obj::vec")]
        zeros: Vec<Complex64>,
        #[serde(default)]
        post_rotation: f64,
    },
    #[serde(rename = "poly")]
    Polynomial {
        #[serde(with = "super::complex_obj::vec")]
        coeffs: Vec<Complex64>,
        #[serde(skip)]
        verified: bool,
    },
}

impl Symbol {
    pub fn rotation(angle: f64) -> Self {
        Symbol::Rotation { angle }
    }

    pub fn mobius(a: Complex64, post_rotation: f64) -> Result<Self> {
        Symbol::MobiusAuto { a, post_rotation }.checked()
    }

    pub fn monomial(k: u32) -> Result<Self> {
        Symbol::Monomial { k }.checked()
    }

    pub fn blaschke(zeros: Vec<Complex64>, post_rotation: f64) -> Result<Self> {
        Symbol::FiniteBlaschke {
            zeros,
            post_rotation,
        }
        .checked()
    }

    /// An unverified polynomial symbol.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Symbol::Polynomial {
            coeffs,
            verified: false,
        }
    }

    pub fn polynomial_real(coeffs: &[f64]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Validates the structural parameters of the variant.
    pub fn checked(self) -> Result<Self> {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        match &self {
            Symbol::Identity => {}
            Symbol::Rotation { angle } => {
                if !angle.is_finite() {
                    return Err(Error::param("rotation angle must be finite"));
                }
            }
            Symbol::MobiusAuto { a, post_rotation } => {
                if !finite(a) || a.norm() >= 1.0 || !post_rotation.is_finite() {
                    return Err(Error::param(format!(
                        "mobius parameter must satisfy |a| < 1, got |a| = {}",
                        a.norm()
                    )));
                }
            }
            Symbol::Monomial { k } => {
                if *k < 1 {
                    return Err(Error::param("monomial exponent must be >= 1"));
                }
            }
            Symbol::FiniteBlaschke {
                zeros,
                post_rotation,
            } => {
                if let Some(z) = zeros.iter().find(|z| !finite(z) || z.norm() >= 1.0) {
                    return Err(Error::param(format!(
                        "blaschke zero {z} lies outside the open disc"
                    )));
                }
                if !post_rotation.is_finite() {
                    return Err(Error::param("blaschke rotation must be finite"));
                }
            }
            Symbol::Polynomial { coeffs, .. } => {
                if coeffs.is_empty() || !coeffs.iter().all(finite) {
                    return Err(Error::param("polynomial needs finite coefficients"));
                }
            }
        }
        Ok(self)
    }

    /// Whether the variant is a self-map of the disc by construction, or has
    /// been verified as one.
    pub fn is_verified(&self) -> bool {
        match self {
            Symbol::Polynomial { verified, .. } => *verified,
            _ => true,
        }
    }

    /// Catalog variants that are inner functions: `|phi| = 1` on the whole circle.
    pub fn is_inner(&self) -> bool {
        matches!(
            self,
            Symbol::Identity
                | Symbol::Rotation { .. }
                | Symbol::MobiusAuto { .. }
                | Symbol::Monomial { .. }
        ) || matches!(self, Symbol::FiniteBlaschke { zeros, .. } if !zeros.is_empty())
    }

    /// `e^{i theta} * self`, the symbol followed by a rotation.
    pub fn post_rotated(&self, theta: f64) -> Symbol {
        match self.clone() {
            Symbol::Identity => Symbol::Rotation { angle: theta },
            Symbol::Rotation { angle } => Symbol::Rotation {
                angle: angle + theta,
            },
            Symbol::MobiusAuto { a, post_rotation } => Symbol::MobiusAuto {
                a,
                post_rotation: post_rotation + theta,
            },
            Symbol::FiniteBlaschke {
                zeros,
                post_rotation,
            } => Symbol::FiniteBlaschke {
                zeros,
                post_rotation: post_rotation + theta,
            },
            Symbol::Monomial { k } => {
                let u = Complex64::from_polar(1.0, theta);
                let mut coeffs = vec![Complex64::new(0.0, 0.0); k as usize + 1];
                coeffs[k as usize] = u;
                Symbol::Polynomial {
                    coeffs,
                    verified: true,
                }
            }
            Symbol::Polynomial { coeffs, verified } => {
                let u = Complex64::from_polar(1.0, theta);
                Symbol::Polynomial {
                    coeffs: coeffs.into_iter().map(|c| c * u).collect(),
                    verified,
                }
            }
        }
    }

    fn require_verified(&self) -> Result<()> {
        if self.is_verified() {
            Ok(())
        } else {
            Err(Error::Symbol {
                message: "polynomial symbol has not passed self-map verification".into(),
                angle: None,
            })
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.require_verified()?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_deriv(&self, z: Complex64) -> Result<Complex64> {
        self.require_verified()?;
        Ok(self.deriv_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Symbol::Identity => z,
            Symbol::Rotation { angle } => Complex64::from_polar(1.0, *angle) * z,
            Symbol::MobiusAuto { a, post_rotation } => {
                Complex64::from_polar(1.0, *post_rotation) * (a - z) / (one - a.conj() * z)
            }
            Symbol::Monomial { k } => z.powu(*k),
            Symbol::FiniteBlaschke {
                zeros,
                post_rotation,
            } => zeros
                .iter()
                .fold(Complex64::from_polar(1.0, *post_rotation), |acc, a| {
                    acc * (a - z) / (one - a.conj() * z)
                }),
            Symbol::Polynomial { coeffs, .. } => coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c),
        }
    }

    pub(crate) fn deriv_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Symbol::Identity => one,
            Symbol::Rotation { angle } => Complex64::from_polar(1.0, *angle),
            Symbol::MobiusAuto { a, post_rotation } => {
                let d = one - a.conj() * z;
                Complex64::from_polar(1.0, *post_rotation) * (a.norm_sqr() - 1.0) / (d * d)
            }
            Symbol::Monomial { k } => z.powu(k - 1) * *k as f64,
            Symbol::FiniteBlaschke {
                zeros,
                post_rotation,
            } => {
                // product rule over the factors; stays valid at the zeros
                let factors: Vec<Complex64> = zeros
                    .iter()
                    .map(|a| (a - z) / (one - a.conj() * z))
                    .collect();
                let mut sum = zero;
                for (j, a) in zeros.iter().enumerate() {
                    let d = one - a.conj() * z;
                    let mut term = (a.norm_sqr() - 1.0) / (d * d);
                    for (i, f) in factors.iter().enumerate() {
                        if i != j {
                            term *= f;
                        }
                    }
                    sum += term;
                }
                Complex64::from_polar(1.0, *post_rotation) * sum
            }
            Symbol::Polynomial { coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(zero, |acc, (n, &c)| acc * z + c * n as f64),
        }
    }
}

impl DiscFunction for Symbol {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        self.eval(z)
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.eval_deriv(z)
    }
}

/// Outcome of a boundary scan of `|phi|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfMapReport {
    pub max_modulus: f64,
    pub argmax: BoundaryPoint,
    /// `max_modulus >= 1 - tol`: the symbol may touch the circle.
    pub contact_candidate: bool,
    /// The input symbol with its verified flag set.
    pub symbol: Symbol,
}

/// Checks `|phi| <= 1 + tol` on `m` equally spaced points of the circle.
///
/// By the maximum-modulus principle the boundary maximum bounds `|phi|`
/// on the whole disc. Catalog variants pass trivially but are scanned all
/// the same so the report is uniform.
pub fn verify_self_map(symbol: &Symbol, m: usize, tol: f64) -> Result<SelfMapReport> {
    if m < 256 {
        return Err(Error::param(format!(
            "self-map scan needs at least 256 points, got {m}"
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::param("self-map tolerance must be non-negative"));
    }
    let symbol = symbol.clone().checked()?;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for j in 0..m {
        let zeta = BoundaryPoint::new(TAU * j as f64 / m as f64);
        let v = symbol.eval_unchecked(zeta.point()).norm();
        if !v.is_finite() {
            return Err(Error::Symbol {
                message: "symbol is not finite on the circle".into(),
                angle: Some(zeta.angle()),
            });
        }
        if v > best.0 {
            best = (v, j);
        }
    }
    let argmax = BoundaryPoint::new(TAU * best.1 as f64 / m as f64);
    if best.0 > 1.0 + tol {
        return Err(Error::Symbol {
            message: format!(
                "|phi| = {} exceeds 1 at angle {}; not a self-map of the disc",
                best.0,
                argmax.angle()
            ),
            angle: Some(argmax.angle()),
        });
    }
    let symbol = match symbol {
        Symbol::Polynomial { coeffs, .. } => Symbol::Polynomial {
            coeffs,
            verified: true,
        },
        other => other,
    };
    Ok(SelfMapReport {
        max_modulus: best.0,
        argmax,
        contact_candidate: best.0 >= 1.0 - tol,
        symbol,
    })
}

use super::DiscFunction;
use crate::error::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Finite list of Taylor coefficients `a_0..a_N`.
///
/// The length is authoritative: trailing zeros are kept so that the
/// truncation order survives arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPowerSeries {
    #[serde(with = "super::complex_obj::vec")]
    coeffs: Vec<Complex64>,
}

impl TruncatedPowerSeries {
    /// An empty coefficient list is read as the zero constant.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return TruncatedPowerSeries {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        TruncatedPowerSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        TruncatedPowerSeries { coeffs: c }
    }

    pub fn constant(c: Complex64) -> Self {
        TruncatedPowerSeries { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when every coefficient of positive degree vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Horner evaluation of `sum a_n z^n`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Horner evaluation of the derivative without materialising it.
    pub fn eval_deriv(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (n, &a)| {
                acc * z + a * n as f64
            })
    }

    pub fn differentiate(&self) -> TruncatedPowerSeries {
        if self.coeffs.len() == 1 {
            return TruncatedPowerSeries::constant(Complex64::new(0.0, 0.0));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &a)| a * n as f64)
            .collect();
        TruncatedPowerSeries { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> TruncatedPowerSeries {
        TruncatedPowerSeries {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `f(e^{i theta} z)`.
    pub fn rotate(&self, theta: f64) -> TruncatedPowerSeries {
        let u = Complex64::from_polar(1.0, theta);
        let mut w = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                let c = a * w;
                w *= u;
                c
            })
            .collect();
        TruncatedPowerSeries { coeffs }
    }
}

impl DiscFunction for TruncatedPowerSeries {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z))
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_deriv(z))
    }
}

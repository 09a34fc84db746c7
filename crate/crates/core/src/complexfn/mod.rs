//! Holomorphic functions on the unit disc: truncated power series, the
//! catalog of self-maps, boundary points and coefficient extraction.

mod coeffs;
mod series;
mod symbol;

pub use coeffs::{coefficients_of, CoefficientExtraction, ExtractionOptions};
pub use series::TruncatedPowerSeries;
pub use symbol::{verify_self_map, SelfMapReport, Symbol, DEFAULT_CONTACT_TOL};

use crate::error::Result;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// A function holomorphic on (a neighbourhood of) the closed disc, together
/// with its complex derivative.
pub trait DiscFunction: Sync {
    fn value(&self, z: Complex64) -> Result<Complex64>;
    fn derivative(&self, z: Complex64) -> Result<Complex64>;
}

impl<T: DiscFunction + ?Sized> DiscFunction for &T {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        (**self).value(z)
    }
    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        (**self).derivative(z)
    }
}

/// A point `e^{i angle}` of the unit circle, stored by its angle in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryPoint {
    angle: f64,
}

impl BoundaryPoint {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        BoundaryPoint { angle: a }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn point(&self) -> Complex64 {
        let (s, c) = self.angle.sin_cos();
        Complex64::new(c, s)
    }
}

/// `{"re": x, "im": y}` encoding of complex numbers used by the text formats.
pub mod complex_obj {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Obj {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Obj { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let o = Obj::deserialize(d)?;
        Ok(Complex64::new(o.re, o.im))
    }

    pub mod vec {
        use super::Obj;
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|z| Obj { re: z.re, im: z.im })
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let v = Vec::<Obj>::deserialize(d)?;
            Ok(v.into_iter().map(|o| Complex64::new(o.re, o.im)).collect())
        }
    }
}

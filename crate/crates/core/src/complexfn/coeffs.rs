use super::{DiscFunction, TruncatedPowerSeries};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Sampling parameters for [`coefficients_of`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    /// Primary sampling radius.
    pub radius: f64,
    /// Radius used for the consistency estimate.
    pub check_radius: f64,
    /// Largest admissible coefficient discrepancy between the two radii.
    pub tol: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        ExtractionOptions {
            radius: 0.9,
            check_radius: 0.8,
            tol: 1e-8,
        }
    }
}

impl ExtractionOptions {
    /// Samples at `radius`, cross-checks at `8/9` of it.
    pub fn at_radius(radius: f64) -> Self {
        ExtractionOptions {
            radius,
            check_radius: radius * 8.0 / 9.0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientExtraction {
    pub series: TruncatedPowerSeries,
    /// Max coefficient difference between the two sampling radii.
    pub discrepancy: f64,
}

fn sample_count(n: usize) -> usize {
    (4 * (n + 1)).max(128).next_power_of_two()
}

fn raw_coefficients(g: &dyn DiscFunction, n: usize, r: f64) -> Result<Vec<Complex64>> {
    let m = sample_count(n);
    let mut buf = Vec::with_capacity(m);
    for j in 0..m {
        let z = Complex64::from_polar(r, TAU * j as f64 / m as f64);
        let v = g.value(z)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::convergence(format!(
                "non-finite sample at radius {r}, index {j}"
            )));
        }
        buf.push(v);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let mut rn = 1.0;
    Ok(buf[..=n]
        .iter()
        .map(|&c| {
            let a = c * scale / rn;
            rn *= r;
            a
        })
        .collect())
}

/// Taylor coefficients `a_0..a_n` of `g` from uniform samples on two circles.
///
/// The discrete Fourier transform of the samples on `|z| = r` divided by
/// `r^k` approximates `a_k`; the same is done on `|z| = check_radius` and
/// the largest discrepancy is reported.
pub fn coefficients_of(
    g: &dyn DiscFunction,
    n: usize,
    opts: ExtractionOptions,
) -> Result<CoefficientExtraction> {
    for r in [opts.radius, opts.check_radius] {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::param(format!(
                "sampling radius must lie in (0,1), got {r}"
            )));
        }
    }
    let primary = raw_coefficients(g, n, opts.radius)?;
    let check = raw_coefficients(g, n, opts.check_radius)?;
    let discrepancy = primary
        .iter()
        .zip(&check)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if !(discrepancy <= opts.tol) {
        return Err(Error::Convergence {
            message: format!(
                "coefficient discrepancy {discrepancy:e} between radii {} and {} exceeds {:e}",
                opts.radius, opts.check_radius, opts.tol
            ),
            partial: Some(discrepancy),
            trace: Vec::new(),
        });
    }
    Ok(CoefficientExtraction {
        series: TruncatedPowerSeries::new(primary),
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexfn::Symbol;

    struct Func<F: Fn(Complex64) -> Complex64 + Sync>(F);

    impl<F: Fn(Complex64) -> Complex64 + Sync> DiscFunction for Func<F> {
        fn value(&self, z: Complex64) -> Result<Complex64> {
            Ok((self.0)(z))
        }
        fn derivative(&self, _z: Complex64) -> Result<Complex64> {
            unimplemented!()
        }
    }

    fn close(a: &[Complex64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, &y) in a.iter().zip(b) {
            assert!((x - Complex64::new(y, 0.0)).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn identity_coefficients() {
        let ex = coefficients_of(&Symbol::Identity, 4, ExtractionOptions::default()).unwrap();
        close(ex.series.coeffs(), &[0.0, 1.0, 0.0, 0.0, 0.0], 1e-10);
    }

    #[test]
    fn binomial_square() {
        let g = Func(|z: Complex64| {
            let u = 0.3 + 0.2 * z;
            u * u
        });
        let ex = coefficients_of(&g, 4, ExtractionOptions::default()).unwrap();
        close(ex.series.coeffs(), &[0.09, 0.12, 0.04, 0.0, 0.0], 1e-10);
    }

    #[test]
    fn constant_one() {
        let g = Func(|_| Complex64::new(1.0, 0.0));
        let ex = coefficients_of(&g, 6, ExtractionOptions::default()).unwrap();
        close(
            ex.series.coeffs(),
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            1e-12,
        );
    }

    #[test]
    fn pole_near_circle_fails_cross_check() {
        // pole just outside the circles: aliasing differs between the two radii
        let g = Func(|z: Complex64| 1.0 / (0.95 - z));
        let e = coefficients_of(&g, 60, ExtractionOptions::default()).unwrap_err();
        assert_eq!(e.code(), "E_CONVERGENCE");
    }

    #[test]
    fn bad_radius() {
        let e =
            coefficients_of(&Symbol::Identity, 3, ExtractionOptions::at_radius(1.0)).unwrap_err();
        assert_eq!(e.code(), "E_PARAM");
    }
}

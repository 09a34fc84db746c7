use crate::error::{HarnessError, Result};
use dirikern_core::complexfn::TruncatedPowerSeries;
use dirikern_core::Complex64;
use serde::{Deserialize, Serialize};

/// One test function with the label used in reports and its abscissa in
/// plot files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub x: f64,
    pub series: TruncatedPowerSeries,
}

/// Expands a named family.
///
/// - `monomials:a..b` gives `z^n` for `n = a..=b`;
/// - `mobius-monomials:a..b@r` gives `((r - z)/(1 - r z))^n`, truncated
///   once the coefficients drop below `1e-16`;
/// - `geometric:a..b@r` gives the partial sums `sum_{k=0}^{n} r^k z^k`.
pub fn expand_named(spec: &str, path: &str) -> Result<Vec<FamilyMember>> {
    let bad = |msg: String| HarnessError::config(path, msg);
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("expected <family>:<a>..<b>, got {spec:?}")))?;
    let (range, r) = match rest.split_once('@') {
        Some((range, r)) => {
            let r: f64 = r
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad family parameter {r:?}")))?;
            (range, Some(r))
        }
        None => (rest, None),
    };
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| bad(format!("expected a range a..b, got {range:?}")))?;
    let parse = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| bad(format!("bad range bound {s:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(bad(format!("empty range {a}..{b}")));
    }
    if b > 4096 {
        return Err(bad(format!("range bound {b} exceeds 4096")));
    }
    let need_r = |r: Option<f64>| -> Result<f64> {
        match r {
            Some(r) if r.is_finite() && r.abs() < 1.0 => Ok(r),
            Some(r) => Err(bad(format!("family parameter must lie in (-1,1), got {r}"))),
            None => Err(bad(format!(
                "family {kind:?} needs a parameter, as in {kind}:1..8@0.5"
            ))),
        }
    };
    match kind.trim() {
        "monomials" => {
            if r.is_some() {
                return Err(bad("monomials take no parameter".into()));
            }
            if a == 0 {
                return Err(bad("monomials start at 1".into()));
            }
            Ok((a..=b)
                .map(|n| FamilyMember {
                    label: format!("z^{n}"),
                    x: n as f64,
                    series: TruncatedPowerSeries::monomial(n),
                })
                .collect())
        }
        "mobius-monomials" => {
            let r = need_r(r)?;
            if a == 0 {
                return Err(bad("mobius-monomials start at 1".into()));
            }
            Ok((a..=b)
                .map(|n| FamilyMember {
                    label: format!("z^{n} o mobius({r})"),
                    x: n as f64,
                    series: mobius_power(r, n),
                })
                .collect())
        }
        "geometric" => {
            let r = need_r(r)?;
            if a == 0 {
                return Err(bad("geometric sums start at degree 1".into()));
            }
            Ok((a..=b)
                .map(|n| FamilyMember {
                    label: format!("sum_{{k<={n}}} ({r} z)^k"),
                    x: n as f64,
                    series: TruncatedPowerSeries::from_real(
                        &(0..=n).map(|k| r.powi(k as i32)).collect::<Vec<_>>(),
                    ),
                })
                .collect())
        }
        other => Err(bad(format!(
            "unknown family {other:?}; expected monomials, mobius-monomials or geometric"
        ))),
    }
}

/// Taylor coefficients of `((r - z)/(1 - r z))^n`.
fn mobius_power(r: f64, n: usize) -> TruncatedPowerSeries {
    // |coeff_k| <= C(k+n, n) |r|^{k-n}; stop when that bound is negligible
    let mut len = n + 1;
    while len < 8192 {
        let k = len as f64;
        let log_binom = (1..=n)
            .map(|j| ((k + j as f64) / j as f64).ln())
            .sum::<f64>();
        if log_binom + (k - n as f64) * r.abs().max(1e-300).ln() < (1e-16f64).ln() {
            break;
        }
        len += 1;
    }
    let mut base = vec![0.0; len];
    base[0] = r;
    for (k, c) in base.iter_mut().enumerate().skip(1) {
        *c = -(1.0 - r * r) * r.powi(k as i32 - 1);
    }
    let mut acc = vec![0.0; len];
    acc[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; len];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in base[..len - i].iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    TruncatedPowerSeries::new(acc.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials_expand() {
        let f = expand_named("monomials:1..8", "family").unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(f[2].series, TruncatedPowerSeries::monomial(3));
        assert_eq!(f[2].label, "z^3");
    }

    #[test]
    fn mobius_power_matches_pointwise() {
        let f = mobius_power(0.5, 3);
        for z in [Complex64::new(0.3, 0.4), Complex64::new(-0.7, 0.2)] {
            let exact = ((0.5 - z) / (1.0 - 0.5 * z)).powu(3);
            assert!((f.eval(z) - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn geometric_sums() {
        let f = expand_named("geometric:2..3@0.5", "family").unwrap();
        assert_eq!(f.len(), 2);
        let c: Vec<f64> = f[1].series.coeffs().iter().map(|c| c.re).collect();
        assert_eq!(c, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn malformed_specs() {
        for s in [
            "monomials",
            "monomials:3..1",
            "mobius-monomials:1..3",
            "geometric:1..2@1.5",
            "squares:1..2",
            "monomials:0..2",
        ] {
            let e = expand_named(s, "family").unwrap_err();
            assert!(e.to_string().starts_with("E_CONFIG: family:"), "{s}: {e}");
        }
    }
}

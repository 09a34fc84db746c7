use crate::complexfn::{BoundaryPoint, Symbol, DEFAULT_CONTACT_TOL};
use crate::error::{Error, Result};
use crate::kernels::{default_radii, diagonal_boundary_value};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSettings {
    pub scan_resolution: usize,
    pub contact_tol: f64,
    pub deriv_tol: f64,
}

impl Default for RankSettings {
    fn default() -> Self {
        RankSettings {
            scan_resolution: 4096,
            contact_tol: DEFAULT_CONTACT_TOL,
            deriv_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactPoint {
    pub point: BoundaryPoint,
    /// `|phi'(zeta)|` from the closed-form derivative.
    pub deriv_modulus: f64,
    /// Radial limit of `(1 - |phi(r zeta)|^2)/(1 - r^2)`, when it stabilised.
    pub angular_derivative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContactKind {
    Empty,
    Points(Vec<ContactPoint>),
    /// `|phi| = 1` on the whole circle.
    FullCircle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactSet {
    pub kind: ContactKind,
    /// Whether the scan is guaranteed not to have missed a contact point.
    pub exhaustive: bool,
}

impl ContactSet {
    pub fn is_empty(&self) -> bool {
        matches!(self.kind, ContactKind::Empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankVerdict {
    Pass,
    Fail,
    Vacuous,
    Inconclusive,
}

impl RankVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            RankVerdict::Pass => "Pass",
            RankVerdict::Fail => "Fail",
            RankVerdict::Vacuous => "Vacuous",
            RankVerdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub contact: ContactSet,
    /// Minimum of `|phi'|` over the contact set; `+inf` when it is empty.
    pub min_deriv_modulus: f64,
    /// Where the minimum is attained.
    pub argmin: Option<BoundaryPoint>,
    pub verdict: RankVerdict,
    pub note: Option<String>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximiser of `g` on `[lo, hi]`.
fn golden_max<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > tol {
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - GOLDEN * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + GOLDEN * (hi - lo);
            g2 = g(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, g(x))
}

/// Checks that the boundary derivative of `Phi = (phi, phi)` is invertible
/// wherever `Phi` touches the torus.
///
/// `d Phi` is diagonal with entries `phi'(zeta_1)`, `phi'(zeta_2)`, so it
/// is invertible on the whole contact product set iff `phi'` is non-zero at
/// every contact point of `phi` itself; the scan works on the circle only.
pub fn rank_sufficiency_check(symbol: &Symbol, settings: &RankSettings) -> Result<RankReport> {
    if !symbol.is_verified() {
        return Err(Error::Symbol {
            message: "rank check needs a verified symbol".into(),
            angle: None,
        });
    }
    if settings.scan_resolution < 16 {
        return Err(Error::param("scan_resolution must be at least 16"));
    }
    let n = settings.scan_resolution;
    let h = TAU / n as f64;
    let angle = |j: usize| TAU * j as f64 / n as f64;
    let deriv = |t: f64| symbol.deriv_unchecked(BoundaryPoint::new(t).point()).norm();
    let modulus = |t: f64| symbol.eval_unchecked(BoundaryPoint::new(t).point()).norm();
    let mods: Vec<f64> = (0..n).map(|j| modulus(angle(j))).collect();

    let full_circle = symbol.is_inner() || mods.iter().all(|m| 1.0 - m <= settings.contact_tol);
    if full_circle {
        // minimum of |phi'| over the circle: grid, then golden-section polish
        let (jmin, _) = (0..n)
            .map(|j| (j, deriv(angle(j))))
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        let (t, neg) = golden_max(|t| -deriv(t), angle(jmin) - h, angle(jmin) + h, 1e-12);
        let min = (-neg).min(deriv(angle(jmin)));
        let argmin = if -neg <= deriv(angle(jmin)) {
            t
        } else {
            angle(jmin)
        };
        let verdict = if min > settings.deriv_tol {
            RankVerdict::Pass
        } else {
            RankVerdict::Fail
        };
        return Ok(RankReport {
            contact: ContactSet {
                kind: ContactKind::FullCircle,
                exhaustive: true,
            },
            min_deriv_modulus: min,
            argmin: Some(BoundaryPoint::new(argmin)),
            verdict,
            note: (verdict == RankVerdict::Fail).then(|| {
                format!(
                    "|phi'| = {min:e} at or below {:e}: boundary derivative not invertible",
                    settings.deriv_tol
                )
            }),
        });
    }

    // |d|phi(e^{it})|/dt| <= sum n |a_n| for polynomials, so a contact point
    // between nodes leaves a node within lip * h / 2 of 1.
    let lip = match symbol {
        Symbol::Polynomial { coeffs, .. } => coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm())
            .sum::<f64>(),
        _ => f64::INFINITY,
    };
    let band = settings.contact_tol + lip * h / 2.0;
    let exhaustive = lip.is_finite() && lip * h / 2.0 < 0.5;

    let mut points: Vec<ContactPoint> = Vec::new();
    let mut ambiguous = Vec::new();
    for j in 0..n {
        let (prev, next) = (mods[(j + n - 1) % n], mods[(j + 1) % n]);
        if 1.0 - mods[j] > band || mods[j] < prev || mods[j] < next {
            continue;
        }
        let (t, m) = golden_max(modulus, angle(j) - h, angle(j) + h, 1e-13);
        let (t, m) = if mods[j] >= m {
            (angle(j), mods[j])
        } else {
            (t, m)
        };
        let gap = 1.0 - m;
        if gap <= settings.contact_tol {
            let p = BoundaryPoint::new(t);
            let dup = points.iter().any(|q| {
                let d = (q.point.angle() - p.angle()).abs();
                d.min(TAU - d) < 2.0 * h
            });
            if !dup {
                let angular_derivative = diagonal_boundary_value(
                    symbol,
                    p,
                    &default_radii(),
                    settings.contact_tol,
                    1e-10,
                )
                .ok()
                .map(|d| d.value);
                points.push(ContactPoint {
                    point: p,
                    deriv_modulus: deriv(t),
                    angular_derivative,
                });
            }
        } else if gap <= 100.0 * settings.contact_tol {
            ambiguous.push(t);
        }
    }

    if points.is_empty() {
        let verdict = if ambiguous.is_empty() {
            RankVerdict::Vacuous
        } else {
            RankVerdict::Inconclusive
        };
        return Ok(RankReport {
            contact: ContactSet {
                kind: ContactKind::Empty,
                exhaustive,
            },
            min_deriv_modulus: f64::INFINITY,
            argmin: None,
            verdict,
            note: (!ambiguous.is_empty()).then(|| near_contact_note(&ambiguous)),
        });
    }
    let best = points
        .iter()
        .min_by(|a, b| a.deriv_modulus.total_cmp(&b.deriv_modulus))
        .expect("non-empty");
    let (min, argmin) = (best.deriv_modulus, best.point);
    let (verdict, note) = if min <= settings.deriv_tol {
        (
            RankVerdict::Fail,
            Some(format!(
                "|phi'| = {min:e} at angle {}: non-zero angular derivative cannot be confirmed",
                argmin.angle()
            )),
        )
    } else if !ambiguous.is_empty() {
        (
            RankVerdict::Inconclusive,
            Some(near_contact_note(&ambiguous)),
        )
    } else {
        (RankVerdict::Pass, None)
    };
    Ok(RankReport {
        contact: ContactSet {
            kind: ContactKind::Points(points),
            exhaustive,
        },
        min_deriv_modulus: min,
        argmin: Some(argmin),
        verdict,
        note,
    })
}

fn near_contact_note(angles: &[f64]) -> String {
    format!(
        "near-contact within 100x the contact tolerance at angles {:?}",
        angles
    )
}

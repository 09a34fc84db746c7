use super::{
    default_contact_tol, default_radii, diagonal_boundary_value, random_disc_point, KernelEvaluator,
};
use crate::complexfn::{BoundaryPoint, Symbol};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupVerdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl SupVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            SupVerdict::Bounded => "Bounded",
            SupVerdict::Unbounded => "Unbounded",
            SupVerdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSettings {
    /// Points per circle of the coarsest torus grid.
    pub initial_grid: usize,
    /// Global grid growth per refinement.
    pub refinement_factor: usize,
    /// Cap on the global grid; beyond it only the local zoom refines.
    pub max_global_grid: usize,
    /// Local zoom: each refinement divides the spacing by this.
    pub zoom_factor: usize,
    pub max_refinements: usize,
    /// Relative change of the running max that counts as stabilised.
    pub stabilization_tol: f64,
    pub divergence_threshold: f64,
    pub growth_factor: f64,
    /// Cells closer than this to the torus diagonal use the radial limit
    /// instead of raw division when the symbol touches the circle there.
    pub near_diagonal_tol: f64,
    pub contact_tol: f64,
    pub interior_samples: usize,
    /// Allowed relative excess of an interior sample over the boundary max.
    pub interior_tol: f64,
    pub seed: u64,
}

impl Default for SupSettings {
    fn default() -> Self {
        SupSettings {
            initial_grid: 256,
            refinement_factor: 2,
            max_global_grid: 4096,
            zoom_factor: 32,
            max_refinements: 6,
            stabilization_tol: 1e-9,
            divergence_threshold: 1e6,
            growth_factor: 2.0,
            near_diagonal_tol: 1e-6,
            contact_tol: default_contact_tol(),
            interior_samples: 1000,
            interior_tol: 1e-6,
            seed: 0,
        }
    }
}

/// Numerical estimate of `sup |k|` over the bidisc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    /// Set when the verdict is `Unbounded`: `value` is only the last finite max.
    pub infinite: bool,
    pub argmax: (BoundaryPoint, BoundaryPoint),
    /// `(points per circle at the finest resolution, running max)`.
    pub trace: Vec<(usize, f64)>,
    pub verdict: SupVerdict,
    /// Largest `|k|` over the interior sample.
    pub interior_max: f64,
    /// Some diagonal point of the torus had no boundary contact, so `|k|`
    /// is unbounded along the diagonal there.
    pub diagonal_divergence: bool,
}

struct Search<'a> {
    kernel: KernelEvaluator,
    settings: &'a SupSettings,
    radii: Vec<f64>,
    diag_cache: HashMap<u64, Option<f64>>,
    diagonal_divergence: bool,
}

impl<'a> Search<'a> {
    fn phi(&self, theta: f64) -> Complex64 {
        self.kernel
            .symbol()
            .eval_unchecked(BoundaryPoint::new(theta).point())
    }

    /// Radial limit on the diagonal at `theta`, `None` without contact.
    fn diagonal(&mut self, theta: f64) -> Option<f64> {
        let key = BoundaryPoint::new(theta).angle().to_bits();
        if let Some(v) = self.diag_cache.get(&key) {
            return *v;
        }
        let v = diagonal_boundary_value(
            self.kernel.symbol(),
            BoundaryPoint::new(theta),
            &self.radii,
            self.settings.contact_tol,
            1e-12,
        )
        .ok()
        .map(|d| d.value);
        if v.is_none() {
            self.diagonal_divergence = true;
        }
        self.diag_cache.insert(key, v);
        v
    }

    /// `|k|` at `(e^{i a}, e^{i b})` given the symbol values there.
    fn cell(&mut self, a: f64, b: f64, pa: Complex64, pb: Complex64) -> Option<f64> {
        // |1 - e^{i(a-b)}| = 2 |sin((a-b)/2)|
        let dist = 2.0 * ((a - b) / 2.0).sin().abs();
        let contact = 1.0 - pa.norm() <= self.settings.contact_tol;
        if dist < self.settings.near_diagonal_tol && (contact || dist < super::SINGULAR_THRESHOLD) {
            return if contact {
                self.diagonal(a)
            } else {
                self.diagonal_divergence = true;
                None
            };
        }
        Some((Complex64::new(1.0, 0.0) - pa * pb.conj()).norm() / dist)
    }

    /// Max over the uniform `n x n` torus grid; lowest index wins ties.
    fn global(&mut self, n: usize) -> (f64, f64, f64) {
        let angles: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let values: Vec<Complex64> = angles.iter().map(|&t| self.phi(t)).collect();
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if let Some(v) = self.cell(angles[i], angles[j], values[i], values[j]) {
                    if v > best.0 {
                        best = (v, angles[i], angles[j]);
                    }
                }
            }
        }
        best
    }

    /// Max over a `(2K+1)^2` grid of spacing `step` centred at `(a, b)`.
    fn zoom(&mut self, a: f64, b: f64, step: f64) -> (f64, f64, f64) {
        let k = self.settings.zoom_factor as i64;
        let ta: Vec<f64> = (-k..=k).map(|m| a + m as f64 * step).collect();
        let tb: Vec<f64> = (-k..=k).map(|m| b + m as f64 * step).collect();
        let pa: Vec<Complex64> = ta.iter().map(|&t| self.phi(t)).collect();
        let pb: Vec<Complex64> = tb.iter().map(|&t| self.phi(t)).collect();
        let mut best = (f64::NEG_INFINITY, a, b);
        for i in 0..ta.len() {
            for j in 0..tb.len() {
                if let Some(v) = self.cell(ta[i], tb[j], pa[i], pb[j]) {
                    if v > best.0 {
                        best = (v, ta[i], tb[j]);
                    }
                }
            }
        }
        best
    }
}

fn validate(s: &SupSettings) -> Result<()> {
    if s.initial_grid < 4 || s.refinement_factor < 1 || s.zoom_factor < 2 {
        return Err(Error::param(
            "sup search needs initial_grid >= 4, refinement_factor >= 1, zoom_factor >= 2",
        ));
    }
    if !(s.growth_factor > 1.0) || !(s.divergence_threshold > 0.0) || !(s.stabilization_tol >= 0.0)
    {
        return Err(Error::param(
            "sup search thresholds must be positive (growth_factor > 1)",
        ));
    }
    Ok(())
}

/// Estimates `sup |k|` over the bidisc by searching the torus.
///
/// For fixed `w` the kernel is holomorphic in `z`, and for fixed `z`
/// anti-holomorphic in `w`, so by the maximum principle in each variable
/// the supremum over the closed bidisc is reached on the torus. A random
/// interior sample guards this reduction numerically.
///
/// The search evaluates a uniform torus grid, then alternates global grid
/// refinement with a local zoom around the running argmax. The verdict is
/// `Unbounded` once the running max exceeds `divergence_threshold` and grew
/// by at least `growth_factor` in the last step, `Bounded` once the
/// relative change falls to `stabilization_tol`, and `Inconclusive` when
/// neither happens within `max_refinements`.
pub fn estimate_sup(symbol: &Symbol, settings: &SupSettings) -> Result<SupEstimate> {
    validate(settings)?;
    let mut search = Search {
        kernel: KernelEvaluator::new(symbol.clone())?,
        settings,
        radii: default_radii(),
        diag_cache: HashMap::new(),
        diagonal_divergence: false,
    };
    let mut n = settings.initial_grid;
    let (mut max, mut a, mut b) = search.global(n);
    if !max.is_finite() {
        return Err(Error::convergence("kernel is not finite on the torus grid"));
    }
    let mut step = TAU / n as f64;
    let mut trace = vec![(n, max)];
    let mut verdict = SupVerdict::Inconclusive;
    for _ in 0..settings.max_refinements {
        let prev = max;
        if n * settings.refinement_factor <= settings.max_global_grid {
            n *= settings.refinement_factor;
            let g = search.global(n);
            if g.0 > max {
                (max, a, b) = g;
            }
        }
        let z = search.zoom(a, b, step / settings.zoom_factor as f64);
        step /= settings.zoom_factor as f64;
        if z.0 > max {
            (max, a, b) = z;
        }
        trace.push(((TAU / step).round() as usize, max));
        let growth = max / prev;
        if max > settings.divergence_threshold && growth >= settings.growth_factor {
            verdict = SupVerdict::Unbounded;
            break;
        }
        if (max - prev) <= settings.stabilization_tol * max {
            verdict = SupVerdict::Bounded;
            break;
        }
    }

    let kernel = search.kernel.clone();
    let mut rng = StdRng::seed_from_u64(settings.seed);
    let mut interior_max: f64 = 0.0;
    for _ in 0..settings.interior_samples {
        let z = random_disc_point(&mut rng);
        let w = random_disc_point(&mut rng);
        if let Ok(v) = kernel.eval(z, w) {
            interior_max = interior_max.max(v.norm());
        }
    }
    if verdict == SupVerdict::Bounded && interior_max > max * (1.0 + settings.interior_tol) {
        verdict = SupVerdict::Inconclusive;
    }
    Ok(SupEstimate {
        value: max,
        infinite: verdict == SupVerdict::Unbounded,
        argmax: (BoundaryPoint::new(a), BoundaryPoint::new(b)),
        trace,
        verdict,
        interior_max,
        diagonal_divergence: search.diagonal_divergence,
    })
}

/// Exact `sup |k|` for the symbols where it is known in closed form.
pub fn closed_form_sup(symbol: &Symbol) -> Result<f64> {
    match symbol {
        Symbol::Identity | Symbol::Rotation { .. } => Ok(1.0),
        Symbol::MobiusAuto { a, .. } => {
            let m = a.norm();
            Ok((1.0 + m) / (1.0 - m))
        }
        // 1 - (z conj w)^k factors as (1 - z conj w)(1 + z conj w + ... + (z conj w)^{k-1})
        Symbol::Monomial { k } => Ok(*k as f64),
        _ => Err(Error::param(
            "no closed-form kernel supremum for this symbol",
        )),
    }
}

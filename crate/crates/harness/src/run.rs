use crate::config::{Command, Params, RunConfig};
use crate::error::{HarnessError, Result};
use crate::report::{PlotData, ReportRow, TraceMirror};
use dirikern_core::complexfn::{verify_self_map, BoundaryPoint, Symbol, TruncatedPowerSeries};
use dirikern_core::kernels::{estimate_sup, SupEstimate, SupVerdict};
use dirikern_core::norms::{dirichlet_norm_sq_coeff, dirichlet_norm_sq_quad, equivalence_ratio};
use dirikern_core::operators::{
    bound_check_with_sup, rank_sufficiency_check, BoundCheckSettings, ContactKind, RankVerdict,
};
use dirikern_core::Error;
use std::collections::BTreeMap;
use std::time::Instant;

/// Command-line adjustments applied on top of a parsed config.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Extra refinement levels: doubles every quadrature node count, the
    /// rank scan resolution and the sup search depth this many times.
    pub refine: u32,
    /// Seed of the interior sampling in the sup search.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ReportRow>,
    pub plots: Vec<PlotData>,
    pub exit_code: i32,
}

impl RunOutput {
    pub fn mirror(&self, config: &RunConfig) -> TraceMirror {
        TraceMirror {
            experiment: config.experiment.clone(),
            command: config.command.as_str().to_string(),
            exit_code: self.exit_code,
            rows: self.rows.clone(),
        }
    }
}

pub fn apply_options(config: &RunConfig, opts: RunOptions) -> RunConfig {
    let mut c = config.clone();
    if opts.refine > 0 {
        c.dirichlet = c.dirichlet.refined(opts.refine);
        c.double = c.double.refined(opts.refine);
        c.sup.max_refinements += opts.refine as usize;
        c.rank.scan_resolution <<= opts.refine;
    }
    if let Some(seed) = opts.seed {
        c.sup.seed = seed;
    }
    c
}

struct Rows<'a> {
    experiment: &'a str,
    rows: Vec<ReportRow>,
    exit: i32,
}

impl<'a> Rows<'a> {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        input: &str,
        quantity: &str,
        value: f64,
        method: &str,
        tolerance: f64,
        verdict: &str,
        start: Instant,
        trace: Vec<(f64, f64)>,
        extra: BTreeMap<String, f64>,
    ) {
        self.rows.push(ReportRow {
            experiment: self.experiment.to_string(),
            input: input.to_string(),
            quantity: quantity.to_string(),
            value: value.is_finite().then_some(value),
            method: method.to_string(),
            tolerance,
            verdict: verdict.to_string(),
            wall_ms: start.elapsed().as_millis() as u64,
            trace,
            extra: extra.into_iter().filter(|(_, v)| v.is_finite()).collect(),
        });
    }

    fn flag(&mut self, code: i32) {
        self.exit = self.exit.max(code);
    }

    /// Records a per-item numerical failure as a row; other errors abort.
    fn failure(&mut self, input: &str, quantity: &str, err: Error, start: Instant) -> Result<()> {
        match err {
            Error::Convergence { partial, trace, .. } => {
                let trace: Vec<(f64, f64)> =
                    trace.into_iter().map(|(n, v)| (n as f64, v)).collect();
                let achieved = match trace.as_slice() {
                    [.., (_, a), (_, b)] => (b - a).abs() / a.abs().max(b.abs()),
                    _ => 1.0,
                };
                self.push(
                    input,
                    quantity,
                    partial.unwrap_or(f64::NAN),
                    "quadrature",
                    achieved,
                    "E_CONVERGENCE",
                    start,
                    trace,
                    BTreeMap::new(),
                );
                self.flag(3);
                Ok(())
            }
            Error::Singular { distance } => {
                let extra = BTreeMap::from([("distance".to_string(), distance)]);
                self.push(
                    input,
                    quantity,
                    f64::NAN,
                    "quadrature",
                    1.0,
                    "E_SINGULAR",
                    start,
                    vec![],
                    extra,
                );
                self.flag(3);
                Ok(())
            }
            other => Err(other.into()),
        }
    }
}

fn verified_symbol(config: &RunConfig) -> Result<Symbol> {
    let s = config
        .symbol
        .as_ref()
        .ok_or_else(|| HarnessError::config("symbol", "missing"))?;
    Ok(verify_self_map(s, config.selfmap.scan_points, config.selfmap.tol)?.symbol)
}

/// `|phi(e^{i theta})|` for a symbol that failed verification.
fn boundary_modulus(s: &Symbol, theta: f64) -> f64 {
    match s {
        Symbol::Polynomial { coeffs, .. } => TruncatedPowerSeries::new(coeffs.clone())
            .eval(BoundaryPoint::new(theta).point())
            .norm(),
        _ => f64::NAN,
    }
}

fn symbol_label(s: &Symbol) -> String {
    serde_json::to_string(s).expect("symbol serialises")
}

fn sup_trace(sup: &SupEstimate) -> Vec<(f64, f64)> {
    sup.trace.iter().map(|&(n, v)| (n as f64, v)).collect()
}

fn sup_row(rows: &mut Rows, input: &str, sup: &SupEstimate, tol: f64, start: Instant) {
    let extra = BTreeMap::from([
        ("argmax_theta_z".to_string(), sup.argmax.0.angle()),
        ("argmax_theta_w".to_string(), sup.argmax.1.angle()),
        ("interior_max".to_string(), sup.interior_max),
        (
            "diagonal_divergence".to_string(),
            f64::from(u8::from(sup.diagonal_divergence)),
        ),
    ]);
    let value = if sup.infinite {
        f64::INFINITY
    } else {
        sup.value
    };
    rows.push(
        input,
        "kernel_sup",
        value,
        "torus-grid",
        tol,
        sup.verdict.as_str(),
        start,
        sup_trace(sup),
        extra,
    );
    rows.flag(match sup.verdict {
        SupVerdict::Bounded => 0,
        SupVerdict::Unbounded => 2,
        SupVerdict::Inconclusive => 3,
    });
}

/// Runs the configured experiment. `Err` is reserved for errors that stop
/// the whole run; per-item numerical failures become rows with exit code 3.
pub fn run(config: &RunConfig, opts: RunOptions) -> Result<RunOutput> {
    let config = apply_options(config, opts);
    let mut rows = Rows {
        experiment: &config.experiment,
        rows: Vec::new(),
        exit: 0,
    };
    let mut plots = Vec::new();
    match config.command {
        Command::Norm => {
            let p = match config.params {
                Params::Dirichlet { p } => p,
                Params::Weights(w) => w.p_dirichlet,
                Params::None => return Err(HarnessError::config("params.p", "missing")),
            };
            let mut points = Vec::new();
            for m in &config.family {
                let start = Instant::now();
                let coeff = dirichlet_norm_sq_coeff(&m.series, p)?;
                rows.push(
                    &m.label,
                    "dirichlet_norm_sq",
                    coeff.value_sq,
                    "coefficient",
                    0.0,
                    "exact",
                    start,
                    vec![],
                    BTreeMap::from([("p".to_string(), p)]),
                );
                let start = Instant::now();
                match dirichlet_norm_sq_quad(&m.series, p, &config.dirichlet) {
                    Ok(q) => {
                        let gap = (q.value_sq - coeff.value_sq).abs();
                        let allowed = config.dirichlet.target_rel_tol.max(q.rel_error_estimate)
                            * coeff.value_sq.max(1e-300);
                        let verdict = if gap <= allowed || gap == 0.0 {
                            "agree"
                        } else {
                            "disagree"
                        };
                        if verdict == "disagree" {
                            rows.flag(3);
                        }
                        let trace = q.trace.iter().map(|&(n, v)| (n as f64, v)).collect();
                        let extra = BTreeMap::from([
                            ("p".to_string(), p),
                            ("coefficient_gap".to_string(), gap),
                        ]);
                        rows.push(
                            &m.label,
                            "dirichlet_norm_sq",
                            q.value_sq,
                            "quadrature",
                            q.rel_error_estimate,
                            verdict,
                            start,
                            trace,
                            extra,
                        );
                        points.push((m.x, q.value_sq));
                    }
                    Err(e) => rows.failure(&m.label, "dirichlet_norm_sq", e, start)?,
                }
            }
            plots.push(PlotData {
                name: "dirichlet_norm_sq".into(),
                columns: ("n".into(), "norm_sq".into()),
                points,
            });
        }
        Command::KernelSup => {
            let start = Instant::now();
            let symbol = verified_symbol(&config)?;
            let sup = estimate_sup(&symbol, &config.sup)?;
            sup_row(
                &mut rows,
                &symbol_label(&symbol),
                &sup,
                config.sup.stabilization_tol,
                start,
            );
            plots.push(PlotData {
                name: "kernel_sup_trace".into(),
                columns: ("grid".into(), "running_max".into()),
                points: sup_trace(&sup),
            });
        }
        Command::RankCheck => {
            let start = Instant::now();
            let symbol = verified_symbol(&config)?;
            let r = rank_sufficiency_check(&symbol, &config.rank)?;
            let (full, count) = match &r.contact.kind {
                ContactKind::Empty => (0.0, 0.0),
                ContactKind::Points(ps) => (0.0, ps.len() as f64),
                ContactKind::FullCircle => (1.0, f64::INFINITY),
            };
            let mut extra = BTreeMap::from([
                ("full_circle".to_string(), full),
                ("contact_points".to_string(), count),
                (
                    "exhaustive".to_string(),
                    f64::from(u8::from(r.contact.exhaustive)),
                ),
            ]);
            if let Some(a) = r.argmin {
                extra.insert("argmin_theta".into(), a.angle());
            }
            rows.push(
                &symbol_label(&symbol),
                "min_deriv_modulus",
                r.min_deriv_modulus,
                "boundary-scan",
                config.rank.deriv_tol,
                r.verdict.as_str(),
                start,
                vec![],
                extra,
            );
            rows.flag(match r.verdict {
                RankVerdict::Pass | RankVerdict::Vacuous => 0,
                RankVerdict::Fail => 2,
                RankVerdict::Inconclusive => 3,
            });
        }
        Command::Equivalence => {
            let Params::Weights(w) = config.params else {
                return Err(HarnessError::config("params", "missing"));
            };
            let mut points = Vec::new();
            for m in &config.family {
                let start = Instant::now();
                match equivalence_ratio(&m.series, &w, &config.double) {
                    Ok(r) => {
                        let trace = r
                            .functional
                            .trace
                            .iter()
                            .map(|&(n, v)| (n as f64, v / r.dirichlet.value_sq))
                            .collect();
                        let extra = BTreeMap::from([
                            ("functional".to_string(), r.functional.value_sq),
                            ("dirichlet_norm_sq".to_string(), r.dirichlet.value_sq),
                            ("p".to_string(), w.p_dirichlet),
                            ("q".to_string(), w.q_exponent),
                        ]);
                        let ok = r.ratio.is_finite() && r.ratio > 0.0;
                        if !ok {
                            rows.flag(2);
                        }
                        rows.push(
                            &m.label,
                            "equivalence_ratio",
                            r.ratio,
                            "quadrature",
                            r.functional.rel_error_estimate,
                            if ok { "ok" } else { "degenerate" },
                            start,
                            trace,
                            extra,
                        );
                        points.push((m.x, r.ratio));
                    }
                    Err(e) => rows.failure(&m.label, "equivalence_ratio", e, start)?,
                }
            }
            plots.push(PlotData {
                name: "equivalence_ratio".into(),
                columns: ("n".into(), "ratio".into()),
                points,
            });
        }
        Command::BoundCheck => {
            let Params::Weights(w) = config.params else {
                return Err(HarnessError::config("params", "missing"));
            };
            let start = Instant::now();
            let symbol = verified_symbol(&config)?;
            let sup = estimate_sup(&symbol, &config.sup)?;
            if sup.verdict != SupVerdict::Bounded {
                sup_row(
                    &mut rows,
                    &symbol_label(&symbol),
                    &sup,
                    config.sup.stabilization_tol,
                    start,
                );
            } else {
                let settings = BoundCheckSettings {
                    dirichlet: config.dirichlet,
                    double: config.double,
                    sup: config.sup,
                    ..BoundCheckSettings::default()
                };
                let family: Vec<_> = config.family.iter().map(|m| m.series.clone()).collect();
                let sup_value = sup.value;
                match bound_check_with_sup(&family, &symbol, w.sigma, w.beta, sup, &settings) {
                    Ok(report) => {
                        let per_row = start.elapsed() / report.rows.len().max(1) as u32;
                        let mut points = Vec::new();
                        for (row, m) in report.rows.iter().zip(&config.family) {
                            let trace = row
                                .composed_norm_sq
                                .trace
                                .iter()
                                .map(|&(n, v)| {
                                    (n as f64, v / (report.sup_power * row.norm_sq.value_sq))
                                })
                                .collect();
                            let extra = BTreeMap::from([
                                ("kernel_sup".to_string(), sup_value),
                                ("sup_power".to_string(), report.sup_power),
                                (
                                    "composed_norm_sq".to_string(),
                                    row.composed_norm_sq.value_sq,
                                ),
                                ("norm_sq".to_string(), row.norm_sq.value_sq),
                                ("ratio_coarse".to_string(), row.ratio_coarse),
                                ("composed_functional".to_string(), row.composed_functional),
                                (
                                    "pulled_back_functional".to_string(),
                                    row.pulled_back_functional,
                                ),
                                (
                                    "pointwise_violations".to_string(),
                                    row.pointwise_violations as f64,
                                ),
                                ("nodes_checked".to_string(), row.nodes_checked as f64),
                            ]);
                            let verdict = if row.pointwise_violations > 0 {
                                rows.flag(2);
                                "violation"
                            } else if !row.ratio.is_finite() {
                                rows.flag(3);
                                "non-finite"
                            } else {
                                "ok"
                            };
                            rows.push(
                                &m.label,
                                "composition_ratio",
                                row.ratio,
                                "quadrature",
                                row.composed_norm_sq.rel_error_estimate,
                                verdict,
                                Instant::now() - per_row,
                                trace,
                                extra,
                            );
                            points.push((m.x, row.ratio));
                        }
                        plots.push(PlotData {
                            name: "composition_ratio".into(),
                            columns: ("n".into(), "ratio".into()),
                            points,
                        });
                    }
                    Err(e) => rows.failure("family", "composition_ratio", e, start)?,
                }
            }
        }
        Command::SelfmapCheck => {
            let start = Instant::now();
            let s = config
                .symbol
                .as_ref()
                .ok_or_else(|| HarnessError::config("symbol", "missing"))?;
            let label = symbol_label(s);
            match verify_self_map(s, config.selfmap.scan_points, config.selfmap.tol) {
                Ok(r) => {
                    let extra = BTreeMap::from([
                        ("argmax_theta".to_string(), r.argmax.angle()),
                        (
                            "contact_candidate".to_string(),
                            f64::from(u8::from(r.contact_candidate)),
                        ),
                    ]);
                    rows.push(
                        &label,
                        "max_boundary_modulus",
                        r.max_modulus,
                        "boundary-scan",
                        config.selfmap.tol,
                        "Pass",
                        start,
                        vec![],
                        extra,
                    );
                }
                Err(Error::Symbol { angle, .. }) => {
                    let mut extra = BTreeMap::new();
                    let mut value = f64::NAN;
                    if let Some(a) = angle {
                        extra.insert("argmax_theta".to_string(), a);
                        value = boundary_modulus(s, a);
                    }
                    rows.push(
                        &label,
                        "max_boundary_modulus",
                        value,
                        "boundary-scan",
                        config.selfmap.tol,
                        "Fail",
                        start,
                        vec![],
                        extra,
                    );
                    rows.flag(2);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(RunOutput {
        exit_code: rows.exit,
        rows: rows.rows,
        plots,
    })
}

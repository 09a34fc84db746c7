use crate::error::{HarnessError, Result};
use crate::family::{expand_named, FamilyMember};
use dirikern_core::complexfn::{Symbol, TruncatedPowerSeries};
use dirikern_core::kernels::SupSettings;
use dirikern_core::norms::{validate_main_theorem_params, validate_params, WeightParams};
use dirikern_core::operators::RankSettings;
use dirikern_core::quadrature::QuadratureSettings;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    KernelSup,
    RankCheck,
    Equivalence,
    BoundCheck,
    SelfmapCheck,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::KernelSup => "kernel-sup",
            Command::RankCheck => "rank-check",
            Command::Equivalence => "equivalence",
            Command::BoundCheck => "bound-check",
            Command::SelfmapCheck => "selfmap-check",
        }
    }
}

/// Which parameters a run uses, after validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Params {
    /// Dirichlet index only.
    Dirichlet {
        p: f64,
    },
    /// A validated `(sigma, tau, beta)` triple.
    Weights(WeightParams),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfMapSettings {
    pub scan_points: usize,
    pub tol: f64,
}

impl Default for SelfMapSettings {
    fn default() -> Self {
        SelfMapSettings {
            scan_points: 4096,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: String,
    pub command: Command,
    pub symbol: Option<Symbol>,
    pub family: Vec<FamilyMember>,
    pub params: Params,
    pub dirichlet: QuadratureSettings,
    pub double: QuadratureSettings,
    pub sup: SupSettings,
    pub rank: RankSettings,
    pub selfmap: SelfMapSettings,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<String>,
    command: Option<Command>,
    symbol: Option<Value>,
    family: Option<RawFamily>,
    params: Option<RawParams>,
    quadrature: Option<RawQuadrature>,
    sup: Option<Value>,
    rank: Option<Value>,
    selfmap: Option<Value>,
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawFamily {
    Named(String),
    List(Vec<RawMember>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMember {
    Named(String),
    Series {
        label: Option<String>,
        #[serde(flatten)]
        series: TruncatedPowerSeries,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawParams {
    sigma: Option<f64>,
    tau: Option<f64>,
    beta: Option<f64>,
    p: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    dirichlet: Option<Value>,
    double: Option<Value>,
}

fn json_error(err: serde_path_to_error::Error<serde_json::Error>, prefix: &str) -> HarnessError {
    let inner = err.path().to_string();
    let path = match (prefix.is_empty(), inner.as_str()) {
        (true, _) => inner.clone(),
        (false, ".") => prefix.to_string(),
        (false, _) => format!("{prefix}.{inner}"),
    };
    HarnessError::config(path, err.into_inner().to_string())
}

/// Deserialises `user` on top of `default`, field by field.
fn overlay<T: Serialize + DeserializeOwned>(
    default: T,
    user: Option<Value>,
    path: &str,
) -> Result<T> {
    let Some(user) = user else {
        return Ok(default);
    };
    let mut base = serde_json::to_value(&default).expect("settings serialise");
    let (Value::Object(base_map), Value::Object(user_map)) = (&mut base, user) else {
        return Err(HarnessError::config(path, "expected an object"));
    };
    for (k, v) in user_map {
        if !base_map.contains_key(&k) {
            return Err(HarnessError::config(
                format!("{path}.{k}"),
                format!(
                    "unknown field; expected one of {}",
                    base_map.keys().cloned().collect::<Vec<_>>().join(", ")
                ),
            ));
        }
        base_map.insert(k, v);
    }
    serde_path_to_error::deserialize(base).map_err(|e| json_error(e, path))
}

fn need<T>(v: Option<T>, path: &str, command: Command) -> Result<T> {
    v.ok_or_else(|| HarnessError::config(path, format!("required by {}", command.as_str())))
}

/// Parses and validates a run configuration.
///
/// `command` is the command given on the command line; when the file also
/// names one, the two must agree.
pub fn parse_config(text: &str, command: Option<Command>) -> Result<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig =
        serde_path_to_error::deserialize(&mut de).map_err(|e| json_error(e, ""))?;
    de.end()
        .map_err(|e| HarnessError::config(".", e.to_string()))?;

    let command = match (raw.command, command) {
        (Some(a), Some(b)) if a != b => {
            return Err(HarnessError::config(
                "command",
                format!(
                    "config says {} but {} was requested",
                    a.as_str(),
                    b.as_str()
                ),
            ))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(HarnessError::config("command", "missing")),
    };

    let symbol = match raw.symbol {
        Some(v) => Some(
            serde_path_to_error::deserialize::<_, Symbol>(v)
                .map_err(|e| json_error(e, "symbol"))?,
        ),
        None => None,
    };

    let mut family = Vec::new();
    match raw.family {
        Some(RawFamily::Named(s)) => family = expand_named(&s, "family")?,
        Some(RawFamily::List(items)) => {
            for (i, item) in items.into_iter().enumerate() {
                let path = format!("family[{i}]");
                match item {
                    RawMember::Named(s) => family.extend(expand_named(&s, &path)?),
                    RawMember::Series { label, series } => {
                        let x = (family.len() + 1) as f64;
                        family.push(FamilyMember {
                            label: label.unwrap_or_else(|| format!("series[{i}]")),
                            x,
                            series,
                        })
                    }
                }
            }
        }
        None => {}
    }

    let rp = raw.params.unwrap_or_default();
    let params = match command {
        Command::Norm => match (rp.p, rp.sigma, rp.beta) {
            (Some(p), _, _) => {
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(HarnessError::config(
                        "params.p",
                        format!("must be finite and >= 0, got {p}"),
                    ));
                }
                Params::Dirichlet { p }
            }
            (None, Some(s), Some(b)) => {
                Params::Weights(validate_params(s, rp.tau.unwrap_or(s), b)?)
            }
            _ => {
                return Err(HarnessError::config(
                    "params.p",
                    "required by norm (or give sigma and beta)",
                ))
            }
        },
        Command::Equivalence => {
            let s = need(rp.sigma, "params.sigma", command)?;
            let b = need(rp.beta, "params.beta", command)?;
            Params::Weights(validate_params(s, rp.tau.unwrap_or(s), b)?)
        }
        Command::BoundCheck => {
            let s = need(rp.sigma, "params.sigma", command)?;
            let b = need(rp.beta, "params.beta", command)?;
            if let Some(t) = rp.tau {
                if t != s {
                    return Err(HarnessError::config(
                        "params.tau",
                        "bound-check uses tau = sigma",
                    ));
                }
            }
            Params::Weights(validate_main_theorem_params(s, b)?)
        }
        _ => Params::None,
    };

    if matches!(
        command,
        Command::Norm | Command::Equivalence | Command::BoundCheck
    ) && family.is_empty()
    {
        return Err(HarnessError::config(
            "family",
            format!("required by {}", command.as_str()),
        ));
    }
    if matches!(
        command,
        Command::KernelSup | Command::RankCheck | Command::BoundCheck | Command::SelfmapCheck
    ) && symbol.is_none()
    {
        return Err(HarnessError::config(
            "symbol",
            format!("required by {}", command.as_str()),
        ));
    }

    let quad = raw.quadrature.unwrap_or_default();
    let dirichlet = overlay(
        QuadratureSettings::default(),
        quad.dirichlet,
        "quadrature.dirichlet",
    )?;
    let double = overlay(
        QuadratureSettings::double_integral(),
        quad.double,
        "quadrature.double",
    )?;
    dirichlet.validate()?;
    double.validate()?;

    Ok(RunConfig {
        experiment: raw
            .experiment
            .unwrap_or_else(|| command.as_str().to_string()),
        command,
        symbol,
        family,
        params,
        dirichlet,
        double,
        sup: overlay(SupSettings::default(), raw.sup, "sup")?,
        rank: overlay(RankSettings::default(), raw.rank, "rank")?,
        selfmap: overlay(SelfMapSettings::default(), raw.selfmap, "selfmap")?,
        output: raw.output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_kernel_sup() {
        let c = parse_config(
            r#"{"command":"kernel-sup","symbol":{"type":"mobius","a":{"re":0.5,"im":0.0}}}"#,
            None,
        )
        .unwrap();
        assert_eq!(c.command, Command::KernelSup);
        assert_eq!(c.experiment, "kernel-sup");
        assert!(matches!(c.symbol, Some(Symbol::MobiusAuto { .. })));
    }

    #[test]
    fn beta_above_window_is_rejected() {
        let e = parse_config(
            r#"{"family":"monomials:1..3","params":{"sigma":1,"tau":1,"beta":2}}"#,
            Some(Command::Equivalence),
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 4);
        let msg = e.to_string();
        assert!(
            msg.starts_with("E_PARAM") && msg.contains("upper bound"),
            "{msg}"
        );
    }

    #[test]
    fn named_family_expands() {
        let c = parse_config(
            r#"{"family":"monomials:1..8","params":{"p":1}}"#,
            Some(Command::Norm),
        )
        .unwrap();
        assert_eq!(c.family.len(), 8);
    }

    #[test]
    fn explicit_series_members() {
        let c = parse_config(
            r#"{"family":[{"coeffs":[{"re":0},{"re":1,"im":0.5}],"label":"f"},"monomials:2..3"],"params":{"p":0}}"#,
            Some(Command::Norm),
        )
        .unwrap();
        assert_eq!(c.family.len(), 3);
        assert_eq!(c.family[0].label, "f");
        assert_eq!(c.family[2].label, "z^3");
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (
                r#"{"command":"kernel-sup","symbol":{"type":"mobius","a":"x"}}"#,
                "symbol",
            ),
            (
                r#"{"command":"kernel-sup","symbol":{"type":"identity"},"sup":{"initial_grid":-1}}"#,
                "sup.initial_grid",
            ),
            (
                r#"{"command":"kernel-sup","symbol":{"type":"identity"},"sup":{"grid":8}}"#,
                "sup.grid",
            ),
            (r#"{"command":"kernel-sup"}"#, "symbol"),
            (
                r#"{"command":"equivalence","family":"monomials:1..2","params":{"sigma":1}}"#,
                "params.beta",
            ),
            (
                r#"{"command":"kernel-sup","symbol":{"type":"identity"},"colour":1}"#,
                "colour",
            ),
            (
                r#"{"command":"norm","family":"monomials:1..2","params":{"p":1},"quadrature":{"double":{"radial_count":"a"}}}"#,
                "quadrature.double.radial_count",
            ),
            (r#"{"symbol":{"type":"identity"}}"#, "command"),
        ];
        for (text, field) in cases {
            let e = parse_config(text, None).unwrap_err();
            let msg = e.to_string();
            assert!(msg.starts_with("E_CONFIG"), "{msg}");
            assert!(msg.contains(field), "{field} not in {msg}");
            assert_eq!(e.exit_code(), 4);
        }
    }

    #[test]
    fn command_mismatch() {
        let e = parse_config(r#"{"command":"norm"}"#, Some(Command::KernelSup)).unwrap_err();
        assert!(e.to_string().contains("command"));
    }

    #[test]
    fn main_theorem_window() {
        let e = parse_config(
            r#"{"family":"monomials:1..2","symbol":{"type":"identity"},"params":{"sigma":1,"beta":1}}"#,
            Some(Command::BoundCheck),
        )
        .unwrap_err();
        assert!(e.to_string().contains("strict upper bound"), "{e}");
    }
}

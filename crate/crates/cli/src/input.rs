//! Parsing of state and sweep documents and channel flags.

use std::path::Path;

use nalgebra::{Matrix4, Vector3};
use noisytele::qstate::C64;
use noisytele::telefid::ChannelConstraint;
use noisytele::{Channel, NoiseModelI, NoiseModelII, StateFamily, TwoQubitState};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum StateSpec {
    /// Row-major entries, each `[re, im]`.
    Dense {
        rho: Vec<[f64; 2]>,
    },
    Pure {
        a: f64,
    },
    Werner {
        epsilon: f64,
    },
    Tdiag {
        t: [f64; 3],
        #[serde(default)]
        r: [f64; 3],
        #[serde(default)]
        s: [f64; 3],
    },
}

impl StateSpec {
    pub fn family(&self) -> Result<StateFamily, CliError> {
        Ok(match self {
            StateSpec::Dense { rho } => {
                if rho.len() != 16 {
                    return Err(CliError::Input(format!(
                        "state.rho: expected 16 entries, found {}",
                        rho.len()
                    )));
                }
                StateFamily::Dense(Matrix4::from_fn(|i, j| {
                    let [re, im] = rho[4 * i + j];
                    C64::new(re, im)
                }))
            }
            StateSpec::Pure { a } => StateFamily::Pure { a: *a },
            StateSpec::Werner { epsilon } => StateFamily::Werner { epsilon: *epsilon },
            StateSpec::Tdiag { t, r, s } => StateFamily::Tdiag {
                t: Vector3::from(*t),
                r: Vector3::from(*r),
                s: Vector3::from(*s),
            },
        })
    }

    pub fn state(&self) -> Result<TwoQubitState, CliError> {
        Ok(TwoQubitState::from_family(&self.family()?)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub state: StateSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Concurrence,
    Epsilon,
    P0,
    Eta,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Concurrence => "concurrence",
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::P0 => "p0",
            SweepVariable::Eta => "eta",
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            SweepVariable::Concurrence | SweepVariable::P0 => (0.0, 1.0),
            SweepVariable::Epsilon => (-1.0 / 3.0, 1.0),
            SweepVariable::Eta => (0.5, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChoice {
    /// The fixed standard correction.
    #[default]
    Standard,
    /// The correction table matching the most likely error pattern.
    Regime,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    #[serde(default)]
    pub strategy: StrategyChoice,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub p: Option<[f64; 4]>,
    pub eta: Option<f64>,
    pub eta_prime: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub sweep: SweepRange,
    #[serde(default)]
    pub channel: ChannelSpec,
    pub state: Option<StateSpec>,
}

impl SweepDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        let SweepRange {
            variable,
            lo,
            hi,
            steps,
            ..
        } = self.sweep;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(CliError::Input(format!(
                "sweep: need lo < hi, got lo = {lo}, hi = {hi}"
            )));
        }
        if steps < 2 {
            return Err(CliError::Input(format!("sweep.steps: need at least 2, got {steps}")));
        }
        let (min, max) = variable.domain();
        if lo < min || hi > max {
            return Err(CliError::Input(format!(
                "sweep: {} range [{lo}, {hi}] leaves [{min}, {max}]",
                variable.name()
            )));
        }
        match variable {
            SweepVariable::Concurrence | SweepVariable::Epsilon => {
                if self.state.is_some() {
                    return Err(CliError::Input(format!(
                        "sweep: a {} sweep defines its own state; remove [state]",
                        variable.name()
                    )));
                }
                self.channel.channel()?;
            }
            SweepVariable::P0 | SweepVariable::Eta => {
                if self.state.is_none() {
                    return Err(CliError::Input(format!(
                        "sweep: a {} sweep needs a [state] section",
                        variable.name()
                    )));
                }
            }
        }
        if variable == SweepVariable::Eta && self.channel.p.is_some() {
            return Err(CliError::Input("channel.p: an eta sweep takes eta_prime only".into()));
        }
        if variable == SweepVariable::P0 && (self.channel.eta.is_some() || self.channel.eta_prime.is_some()) {
            return Err(CliError::Input("channel: a p0 sweep takes p only".into()));
        }
        Ok(())
    }
}

impl ChannelSpec {
    pub fn channel(&self) -> Result<Channel, CliError> {
        channel_from(self.p, self.eta, self.eta_prime)
    }
}

/// Noiseless unless `p` or `eta`/`eta_prime` are given.
pub fn channel_from(p: Option<[f64; 4]>, eta: Option<f64>, eta_prime: Option<f64>) -> Result<Channel, CliError> {
    match (p, eta, eta_prime) {
        (None, None, None) => Ok(NoiseModelI::noiseless().into()),
        (Some(p), None, None) => Ok(NoiseModelI::new(p)?.into()),
        (None, Some(e), Some(ep)) => Ok(NoiseModelII::new(e, ep)?.into()),
        (None, _, _) => Err(CliError::Input("eta and eta-prime must be given together".into())),
        (Some(_), _, _) => Err(CliError::Input("give either p or eta/eta-prime, not both".into())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_document<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    toml::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `a,b,c,d`.
pub fn parse_probabilities(s: &str) -> Result<[f64; 4], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated probabilities, got {}", v.len()))
}

fn probability_index(s: &str) -> Result<usize, String> {
    match s.trim() {
        "p0" => Ok(0),
        "p1" => Ok(1),
        "p2" => Ok(2),
        "p3" => Ok(3),
        other => Err(format!("expected one of p0..p3, got {other:?}")),
    }
}

/// `p1=0.15`.
pub fn parse_fix(s: &str) -> Result<ChannelConstraint, String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected pI=VALUE, got {s:?}"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("{value:?}: {e}"))?;
    Ok(ChannelConstraint::Fix {
        index: probability_index(name)?,
        value,
    })
}

/// `p1=p2`.
pub fn parse_tie(s: &str) -> Result<ChannelConstraint, String> {
    let (a, b) = s.split_once('=').ok_or_else(|| format!("expected pI=pJ, got {s:?}"))?;
    Ok(ChannelConstraint::Tie(probability_index(a)?, probability_index(b)?))
}

//! The five subcommands. Each returns its report and the exit code.

use std::fmt::Write as _;
use std::path::Path;

use noisytele::costopt::{min_cost_model_i, min_cost_model_ii, CostSolution, CostStatus};
use noisytele::oracle::{exact_average, haar_average, SamplingMode};
use noisytele::qstate::pure_amplitude_for_concurrence;
use noisytele::strategy::{fidelity_over_all_strategies, regime_strategy};
use noisytele::telefid::{
    find_dispersion_free_channel, nonclassical_condition, regime_report, report, zero_deviation_residuals,
    ChannelConstraint, FidelityReport,
};
use noisytele::{
    canonicalize, CanonicalForm, Channel, CorrectionStrategy, Error, NoiseModel, NoiseModelI, NoiseModelII,
    TwoQubitState, CLASSICAL_FIDELITY,
};
use rayon::prelude::*;

use crate::fmt::{sig, sig_all};
use crate::input::{StrategyChoice, SweepDocument, SweepVariable};
use crate::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 2;
/// Width of the agreement band in standard errors.
pub const BAND: f64 = 5.0;
/// Closed forms and the exact oracle must agree to this.
pub const EXACT_TOL: f64 = 1e-10;
pub const MIN_SAMPLES: usize = 1000;

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

fn s6(x: f64) -> String {
    sig(x, 6)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe_channel(out: &mut String, ch: &Channel) {
    match ch {
        Channel::I(m) => {
            let _ = writeln!(out, "  model                Model I (single two-bit channel)");
            let _ = writeln!(out, "  p                    {}", sig_all(&m.p(), 6));
        }
        Channel::II(m) => {
            let _ = writeln!(out, "  model                Model II (two binary channels)");
            let _ = writeln!(out, "  eta eta'             {} {}", s6(m.eta()), s6(m.eta_prime()));
            let _ = writeln!(out, "  Model I image p      {}", sig_all(&m.to_model_i().p(), 6));
        }
    }
    let _ = writeln!(out, "  mutual information   {} bits", s6(ch.mutual_information()));
}

fn describe_state(out: &mut String, state: &TwoQubitState, cf: &CanonicalForm) {
    let _ = writeln!(out, "state");
    let _ = writeln!(out, "  |t| per axis         {}", sig_all(&cf.magnitudes, 6));
    let _ = writeln!(out, "  |t| sorted           {}", sig_all(&cf.sorted_magnitudes(), 6));
    let lambda: Vec<String> = cf.lambda.iter().map(|l| format!("{l:+}")).collect();
    let _ = writeln!(out, "  signs                {}", lambda.join(" "));
    let _ = writeln!(out, "  det T                {}", cf.det_sign);
    let _ = writeln!(out, "  concurrence          {}", s6(state.concurrence()));
}

fn describe_fidelity(out: &mut String, title: &str, r: &FidelityReport) {
    let _ = writeln!(out, "{title} {}", r.strategy);
    let _ = writeln!(out, "  F                    {}", s6(r.fidelity));
    let _ = writeln!(out, "  Delta                {}", s6(r.deviation));
    let _ = writeln!(out, "  non-classical        {}", yes_no(r.non_classical));
    let _ = writeln!(out, "  dispersion-free      {}", yes_no(r.dispersion_free));
}

pub fn analyze(state: &TwoQubitState, ch: &Channel) -> Outcome {
    let (cf, _) = canonicalize(state);
    let mut out = String::new();
    describe_state(&mut out, state, &cf);
    let _ = writeln!(out, "channel");
    describe_channel(&mut out, ch);
    describe_fidelity(
        &mut out,
        "standard strategy",
        &report(&cf, ch, &CorrectionStrategy::STANDARD),
    );
    let _ = writeln!(out, "conditions (standard strategy)");
    match nonclassical_condition(&cf, ch) {
        Ok((holds, f)) => {
            let _ = writeln!(out, "  f_noise              {}", s6(f));
            let _ = writeln!(
                out,
                "  sum|t| > 1 + 2 f     {} ({} vs {})",
                yes_no(holds),
                s6(cf.magnitude_sum()),
                s6(1.0 + 2.0 * f)
            );
        }
        Err(e) => {
            let _ = writeln!(out, "  non-classicality     {e}");
        }
    }
    match zero_deviation_residuals(&cf, ch) {
        Ok(r) => {
            let _ = writeln!(out, "  zero-dev residuals   {}", sig_all(&r, 6));
        }
        Err(e) => {
            let _ = writeln!(out, "  zero-deviation       {e}");
        }
    }
    describe_fidelity(&mut out, "regime strategy", &regime_report(&cf, ch));
    let search = fidelity_over_all_strategies(&cf, ch);
    let best = report(&cf, ch, &search.best);
    describe_fidelity(&mut out, "best of 256 assignments", &best);
    Outcome {
        text: out,
        code: EXIT_OK,
    }
}

fn strategy_for(choice: StrategyChoice, ch: &impl NoiseModel) -> CorrectionStrategy {
    match choice {
        StrategyChoice::Standard => CorrectionStrategy::STANDARD,
        StrategyChoice::Regime => regime_strategy(ch),
    }
}

fn sweep_point(doc: &SweepDocument, x: f64) -> Result<(f64, f64), CliError> {
    let fixed = || doc.channel.channel();
    let base =
        || -> Result<CanonicalForm, CliError> { Ok(canonicalize(&doc.state.as_ref().expect("validated").state()?).0) };
    let (cf, ch) = match doc.sweep.variable {
        SweepVariable::Concurrence => {
            let a = pure_amplitude_for_concurrence(x)?;
            (canonicalize(&TwoQubitState::pure(a)?).0, fixed()?)
        }
        SweepVariable::Epsilon => (canonicalize(&TwoQubitState::werner(x)?).0, fixed()?),
        SweepVariable::P0 => {
            let weights = doc.channel.p.map(|p| [p[1], p[2], p[3]]).unwrap_or([1.0; 3]);
            let total: f64 = weights.iter().sum();
            let weights = if total > 0.0 {
                weights.map(|w| w / total)
            } else {
                [1.0 / 3.0; 3]
            };
            let rest = 1.0 - x;
            let ch = NoiseModelI::new([x, rest * weights[0], rest * weights[1], rest * weights[2]])?;
            (base()?, ch.into())
        }
        SweepVariable::Eta => (
            base()?,
            NoiseModelII::new(x, doc.channel.eta_prime.unwrap_or(x))?.into(),
        ),
    };
    let r = report(&cf, &ch, &strategy_for(doc.sweep.strategy, &ch));
    Ok((r.fidelity, r.deviation))
}

/// Sweep rows `(x, F, Δ)` in grid order.
pub fn sweep_rows(doc: &SweepDocument) -> Result<Vec<(f64, f64, f64)>, CliError> {
    doc.validate()?;
    let (lo, hi, n) = (doc.sweep.lo, doc.sweep.hi, doc.sweep.steps);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            sweep_point(doc, x).map(|(f, d)| (x, f, d))
        })
        .collect()
}

pub fn sweep(doc: &SweepDocument, out_path: &Path) -> Result<Outcome, CliError> {
    let rows = sweep_rows(doc)?;
    let unwritable = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", out_path.display()));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out_path)
        .map_err(|e| unwritable(&e))?;
    w.write_record([doc.sweep.variable.name(), "F", "Delta", "nonClassical"])
        .map_err(|e| unwritable(&e))?;
    for &(x, f, d) in &rows {
        let flag = if f > CLASSICAL_FIDELITY { "1" } else { "0" };
        w.write_record([sig(x, 12), sig(f, 12), sig(d, 12), flag.into()])
            .map_err(|e| unwritable(&e))?;
    }
    w.flush().map_err(|e| unwritable(&e))?;
    Ok(Outcome {
        text: format!("wrote {} rows to {}\n", rows.len(), out_path.display()),
        code: EXIT_OK,
    })
}

pub fn verify(
    state: &TwoQubitState,
    ch: &Channel,
    choice: StrategyChoice,
    samples: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    if samples < MIN_SAMPLES {
        return Err(CliError::Input(format!(
            "--samples must be at least {MIN_SAMPLES}, got {samples}"
        )));
    }
    let (cf, _) = canonicalize(state);
    let resource = cf.to_state()?;
    let strat = strategy_for(choice, ch);
    let closed = report(&cf, ch, &strat);
    let (exact_f, exact_d) = exact_average(&resource, ch, &strat);
    let mc = haar_average(&resource, ch, &strat, samples, seed, SamplingMode::Analytic);

    let exact_ok = (exact_f - closed.fidelity).abs() <= EXACT_TOL && (exact_d - closed.deviation).abs() <= EXACT_TOL;
    let f_ok = mc.fidelity_within(closed.fidelity, BAND);
    let d_ok = mc.deviation_within(closed.deviation, BAND);
    let pass = exact_ok && f_ok && d_ok;

    let mut out = String::new();
    let _ = writeln!(out, "strategy             {strat}");
    let _ = writeln!(
        out,
        "closed form          F {}  Delta {}",
        s6(closed.fidelity),
        s6(closed.deviation)
    );
    let _ = writeln!(
        out,
        "exact average        F {}  Delta {}  [{}]",
        s6(exact_f),
        s6(exact_d),
        pass_fail(exact_ok)
    );
    let _ = writeln!(
        out,
        "monte carlo          F {}  Delta {}  stdError {}  deltaStdError {}  samples {}  seed {}",
        s6(mc.mean_f),
        s6(mc.delta),
        s6(mc.std_error),
        s6(mc.delta_std_error),
        mc.n_samples,
        seed
    );
    let _ = writeln!(
        out,
        "band {BAND} sigma         F {}  Delta {}",
        pass_fail(f_ok),
        pass_fail(d_ok)
    );
    let _ = writeln!(out, "result               {}", pass_fail(pass));
    Ok(Outcome {
        text: out,
        code: if pass { EXIT_OK } else { EXIT_FAILURE },
    })
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    #[value(name = "I", alias = "1")]
    I,
    #[value(name = "II", alias = "2")]
    II,
}

pub fn optimize_cost(state: &TwoQubitState, model: Model) -> Result<Outcome, CliError> {
    let (cf, _) = canonicalize(state);
    let sol: CostSolution = match model {
        Model::I => min_cost_model_i(&cf)?,
        Model::II => min_cost_model_ii(&cf)?,
    };
    let mut out = String::new();
    let _ = writeln!(out, "status               {}", sol.status);
    if sol.status == CostStatus::Infeasible {
        let _ = writeln!(
            out,
            "  sum|t| = {} <= 1: no channel noise is compatible with non-classical fidelity",
            s6(cf.magnitude_sum())
        );
        return Ok(Outcome {
            text: out,
            code: EXIT_FAILURE,
        });
    }
    describe_channel(&mut out, &sol.channel);
    let _ = writeln!(out, "  cost                 {} bits", s6(sol.cost));
    let _ = writeln!(out, "  constraint residual  {}", s6(sol.constraint_residual));
    let _ = writeln!(out, "  stationary residuals {}", sig_all(&sol.stationary_residuals, 6));
    Ok(Outcome {
        text: out,
        code: EXIT_OK,
    })
}

pub fn find_channel(state: &TwoQubitState, constraints: &[ChannelConstraint]) -> Result<Outcome, CliError> {
    let (cf, _) = canonicalize(state);
    let found = match find_dispersion_free_channel(&cf, constraints) {
        Ok(found) => found,
        Err(Error::Infeasible(why)) => {
            return Ok(Outcome {
                text: format!("status               infeasible\n  {why}\n"),
                code: EXIT_FAILURE,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = String::new();
    let _ = writeln!(out, "status               found");
    let _ = writeln!(out, "  p                    {}", sig_all(&found.channel.p(), 6));
    let _ = writeln!(out, "  F                    {}", s6(found.fidelity));
    let _ = writeln!(out, "  Delta                {}", s6(found.deviation));
    let _ = writeln!(out, "  non-classical        {}", yes_no(found.non_classical));
    Ok(Outcome {
        text: out,
        code: EXIT_OK,
    })
}

//! Closed forms for the average fidelity and its deviation.
//!
//! For a canonical resource with correlations `t = diag(λ_i |t_ii|)`, Bob's
//! output for input Bloch vector `a` has per-input fidelity
//! `f(a) = ½(1 + aᵀ𝒳a) + w·a`, where `𝒳` is diagonal and `w` vanishes for
//! every strategy that uses each Pauli correction once. Averaging over the
//! sphere gives `F = ½(1 + Tr𝒳/3)` and
//! `Δ² = (Tr𝒳² − (Tr𝒳)²/3)/30 + |w|²/3`.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::canonical::{CanonicalForm, DetSign};
use crate::channels::{received_outcome, Channel, NoiseModel, NoiseModelI};
use crate::error::{Error, Result};
use crate::strategy::{regime_strategy, CorrectionStrategy};
use crate::CLASSICAL_FIDELITY;

/// Correlation-matrix diagonals of the four Bell states.
pub const BELL_CORRELATIONS: [[f64; 3]; 4] = [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0]];

/// Deviation below which a configuration counts as dispersion-free.
pub const DISPERSION_FREE_TOL: f64 = 1e-10;
const SOLVE_TOL: f64 = 1e-10;

/// Diagonal of the effective correlation matrix `𝒳`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiMatrix {
    pub diag: Vector3<f64>,
}

impl ChiMatrix {
    pub fn trace(&self) -> f64 {
        self.diag.sum()
    }

    /// `Tr𝒳² − (Tr𝒳)²/3`, evaluated as a sum of squared differences.
    pub fn spread(&self) -> f64 {
        let x = &self.diag;
        ((x[0] - x[1]).powi(2) + (x[0] - x[2]).powi(2) + (x[1] - x[2]).powi(2)) / 3.0
    }
}

/// `t ⊙ Σᵢ pᵢ T_k(j,i)`: the correlations arriving under decoded label `j`,
/// summed over the outcomes `k` that error pattern `i` turns into `j`.
pub fn message_chi(cf: &CanonicalForm, ch: &NoiseModelI, j: usize) -> Vector3<f64> {
    let p = ch.p();
    let mixed: Vector3<f64> = (0..4)
        .map(|i| Vector3::from(BELL_CORRELATIONS[received_outcome(j, i)]) * p[i])
        .sum();
    cf.correlations().component_mul(&mixed)
}

pub fn chi_matrix(cf: &CanonicalForm, ch: &impl NoiseModel, strat: &CorrectionStrategy) -> ChiMatrix {
    let ch = ch.model_i();
    let diag: Vector3<f64> = (0..4)
        .map(|j| strat.assignment[j].so3_diag().component_mul(&message_chi(cf, &ch, j)))
        .sum();
    ChiMatrix { diag: diag / 4.0 }
}

/// Coefficient of the term linear in `a`; zero for bijective strategies.
pub fn linear_term(cf: &CanonicalForm, strat: &CorrectionStrategy) -> Vector3<f64> {
    strat.rotation_sum().component_mul(&cf.s) / 8.0
}

pub fn fidelity(cf: &CanonicalForm, ch: &impl NoiseModel, strat: &CorrectionStrategy) -> f64 {
    0.5 * (1.0 + chi_matrix(cf, ch, strat).trace() / 3.0)
}

pub fn deviation(cf: &CanonicalForm, ch: &impl NoiseModel, strat: &CorrectionStrategy) -> f64 {
    let chi = chi_matrix(cf, ch, strat);
    let w = linear_term(cf, strat);
    (chi.spread() / 30.0 + w.norm_squared() / 3.0).max(0.0).sqrt()
}

/// Noise penalty `p₁(|t₁₁|+|t₃₃|) + p₂(|t₂₂|+|t₃₃|) + p₃(|t₁₁|+|t₂₂|)`.
///
/// For two binary channels this equals
/// `|t₁₁|(1−η) + |t₂₂|(1−η′) + |t₃₃|(η+η′−2ηη′)`.
pub fn f_noise(cf: &CanonicalForm, ch: &impl NoiseModel) -> f64 {
    let [_, p1, p2, p3] = ch.model_i().p();
    let [t1, t2, t3] = cf.magnitudes;
    p1 * (t1 + t3) + p2 * (t2 + t3) + p3 * (t1 + t2)
}

pub(crate) fn require_negative(cf: &CanonicalForm, what: &str) -> Result<()> {
    if cf.det_sign == DetSign::Negative {
        Ok(())
    } else {
        Err(Error::NotApplicable(format!(
            "{what} is stated for det T < 0, this state has det T {}",
            cf.det_sign
        )))
    }
}

/// Whether `Σ|t_ii| > 1 + 2 f_noise`, together with `f_noise`.
pub fn nonclassical_condition(cf: &CanonicalForm, ch: &impl NoiseModel) -> Result<(bool, f64)> {
    require_negative(cf, "the non-classicality condition")?;
    let f = f_noise(cf, ch);
    Ok((cf.magnitude_sum() > 1.0 + 2.0 * f, f))
}

/// Pairwise differences of the per-axis noise-weighted correlations; both
/// vanish exactly when the standard strategy is dispersion-free.
///
/// Model I uses `|t₁₁|[1−2(p₁+p₃)]`, `|t₂₂|[1−2(p₂+p₃)]`, `|t₃₃|[1−2(p₁+p₂)]`;
/// Model II uses `|t₁₁|(2η−1)`, `|t₂₂|(2η′−1)`, `|t₃₃|(2η−1)(2η′−1)`.
pub fn zero_deviation_residuals(cf: &CanonicalForm, ch: &impl NoiseModel) -> Result<[f64; 2]> {
    require_negative(cf, "the zero-deviation condition")?;
    let [t1, t2, t3] = cf.magnitudes;
    let (b1, b2, b3) = match ch.channel() {
        Channel::I(m) => {
            let [_, p1, p2, p3] = m.p();
            (1.0 - 2.0 * (p1 + p3), 1.0 - 2.0 * (p2 + p3), 1.0 - 2.0 * (p1 + p2))
        }
        Channel::II(m) => {
            let (u, v) = (2.0 * m.eta() - 1.0, 2.0 * m.eta_prime() - 1.0);
            (u, v, u * v)
        }
    };
    Ok([t1 * b1 - t2 * b2, t2 * b2 - t3 * b3])
}

/// Restriction on the channel searched by [`find_dispersion_free_channel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelConstraint {
    /// `p_index = value`.
    Fix { index: usize, value: f64 },
    /// `p_a = p_b`.
    Tie(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionFreeChannel {
    pub channel: NoiseModelI,
    pub fidelity: f64,
    pub deviation: f64,
    pub non_classical: bool,
}

/// Solves the zero-deviation equations, which are linear in `(p₁, p₂, p₃)`,
/// together with the given constraints.
pub fn find_dispersion_free_channel(
    cf: &CanonicalForm,
    constraints: &[ChannelConstraint],
) -> Result<DispersionFreeChannel> {
    require_negative(cf, "the zero-deviation condition")?;
    let [t1, t2, t3] = cf.magnitudes;

    // p_i = coef_i · x + offset_i with x = (p₁, p₂, p₃).
    let affine = |i: usize| -> ([f64; 3], f64) {
        match i {
            0 => ([-1.0; 3], 1.0),
            _ => {
                let mut c = [0.0; 3];
                c[i - 1] = 1.0;
                (c, 0.0)
            }
        }
    };

    let mut rows: Vec<([f64; 3], f64)> = vec![
        ([-2.0 * t1, 2.0 * t2, 2.0 * (t2 - t1)], t2 - t1),
        ([2.0 * t3, 2.0 * (t3 - t2), -2.0 * t2], t3 - t2),
    ];
    let mut value_fixed = [false; 4];
    for c in constraints {
        match *c {
            ChannelConstraint::Fix { index, value } => {
                check_index(index)?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::parameter("fixed probability", value, "0 <= p <= 1"));
                }
                let (coef, off) = affine(index);
                rows.push((coef, value - off));
                value_fixed[index] = true;
            }
            ChannelConstraint::Tie(a, b) => {
                check_index(a)?;
                check_index(b)?;
                let ((ca, oa), (cb, ob)) = (affine(a), affine(b));
                rows.push(([ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]], ob - oa));
            }
        }
    }

    let a = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r].0[c]);
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > SOLVE_TOL * smax.max(1.0))
        .count();
    if rank < 3 {
        return Err(Error::Underdetermined(format!(
            "zero-deviation equations plus constraints have rank {rank}; fix or tie more probabilities"
        )));
    }
    let x = svd.solve(&b, SOLVE_TOL).map_err(|e| Error::Infeasible(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    if residual > SOLVE_TOL {
        return Err(Error::Infeasible(format!(
            "constraints are inconsistent with zero deviation (residual {residual:.3e})"
        )));
    }

    let p = [1.0 - x.sum(), x[0], x[1], x[2]];
    for (i, &pi) in p.iter().enumerate() {
        if pi < -SOLVE_TOL {
            return Err(Error::Infeasible(format!("bound p{i} >= 0 violated (p{i} = {pi:.6})")));
        }
        if pi > 1.0 + SOLVE_TOL {
            return Err(Error::Infeasible(format!("bound p{i} <= 1 violated (p{i} = {pi:.6})")));
        }
    }
    let is_uniform = p.iter().all(|&pi| (pi - 0.25).abs() < SOLVE_TOL);
    if is_uniform && !value_fixed[1..].iter().all(|&f| f) {
        return Err(Error::Infeasible(
            "only the uniform channel solves the equations, which carries no information".into(),
        ));
    }
    let channel = NoiseModelI::new(normalize(p.map(|x| x.clamp(0.0, 1.0))))?;
    let strat = CorrectionStrategy::STANDARD;
    let fidelity = fidelity(cf, &channel, &strat);
    Ok(DispersionFreeChannel {
        channel,
        fidelity,
        deviation: deviation(cf, &channel, &strat),
        non_classical: fidelity > CLASSICAL_FIDELITY,
    })
}

fn check_index(i: usize) -> Result<()> {
    if i < 4 {
        Ok(())
    } else {
        Err(Error::parameter("probability index", i as f64, "0..=3"))
    }
}

fn normalize(p: [f64; 4]) -> [f64; 4] {
    let s: f64 = p.iter().sum();
    p.map(|x| x / s)
}

/// `F = (3 − ε + 4εp₀)/6` and
/// `Δ = 2ε/(3√10) · [(p₁−p₂)² + (p₁−p₃)² + (p₂−p₃)²]^½` for Werner states.
pub fn werner_formulas(epsilon: f64, ch: &impl NoiseModel) -> Result<(f64, f64)> {
    if !(epsilon > 1.0 / 3.0 && epsilon <= 1.0) {
        return Err(Error::parameter("epsilon", epsilon, "1/3 < epsilon <= 1"));
    }
    let [p0, p1, p2, p3] = ch.model_i().p();
    let f = (3.0 - epsilon + 4.0 * epsilon * p0) / 6.0;
    let concurrence = (3.0 * epsilon - 1.0) / 2.0;
    let spread = (p1 - p2).powi(2) + (p1 - p3).powi(2) + (p2 - p3).powi(2);
    let delta = (4.0 * concurrence + 2.0) / (9.0 * 10f64.sqrt()) * spread.sqrt();
    Ok((f, delta))
}

/// Fidelity and deviation for `a|00⟩ + b|11⟩`, `b = √(1 − a²)`.
pub fn pure_state_formulas(a: f64, ch: &impl NoiseModel) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::parameter("a", a, "0 < a < 1"));
    }
    let ab = a * (1.0 - a * a).sqrt();
    match ch.channel() {
        Channel::I(m) => {
            let [p0, p1, p2, p3] = m.p();
            let f = 2.0 / 3.0 * (1.0 + ab) - (p1 + p2 + 2.0 * ab * (p1 + p2 + 2.0 * p3)) / 3.0;
            let (c1, c2, c3) = (p0 + p2 - p1 - p3, p0 + p1 - p2 - p3, p0 + p3 - p1 - p2);
            let quad = c1 * c1 * 4.0 * ab * ab + c2 * c2 * 4.0 * ab * ab + c3 * c3;
            let lin = c1 * 2.0 * ab + c2 * 2.0 * ab + c3;
            let delta = ((quad - lin * lin / 3.0) / 30.0).max(0.0).sqrt();
            Ok((f, delta))
        }
        Channel::II(m) => {
            let (e, g) = (m.eta(), m.eta_prime());
            let f = 2.0 / 3.0 * (1.0 + ab) - (2.0 * ab * (2.0 - e - g) + (e + g - 2.0 * e * g)) / 3.0;
            let radicand = 16.0 * ab * ab * (e - g).powi(2)
                + (2.0 * g - 1.0).powi(2) * (2.0 * ab - 2.0 * e + 1.0).powi(2)
                + (2.0 * e - 1.0).powi(2) * (2.0 * ab - 2.0 * g + 1.0).powi(2);
            Ok((f, radicand.sqrt() / (3.0 * 10f64.sqrt())))
        }
    }
}

/// Everything the closed forms say about one (state, channel, strategy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub deviation: f64,
    pub non_classical: bool,
    pub dispersion_free: bool,
    pub f_noise: f64,
    pub strategy: CorrectionStrategy,
}

pub fn report(cf: &CanonicalForm, ch: &impl NoiseModel, strat: &CorrectionStrategy) -> FidelityReport {
    let fidelity = fidelity(cf, ch, strat);
    let deviation = deviation(cf, ch, strat);
    FidelityReport {
        fidelity,
        deviation,
        non_classical: fidelity > CLASSICAL_FIDELITY,
        dispersion_free: deviation <= DISPERSION_FREE_TOL,
        f_noise: f_noise(cf, ch),
        strategy: *strat,
    }
}

/// Report for the regime strategy matching the channel.
pub fn regime_report(cf: &CanonicalForm, ch: &impl NoiseModel) -> FidelityReport {
    report(cf, ch, &regime_strategy(ch))
}

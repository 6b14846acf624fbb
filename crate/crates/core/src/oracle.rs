//! Direct simulation of the teleportation protocol.
//!
//! Nothing here uses the closed forms: outcome probabilities and Bob's
//! conditional states come from projecting `|ψ⟩⟨ψ| ⊗ ρ` onto the Bell basis
//! and tracing out Alice's side, the classical channel is applied pattern by
//! pattern, and fidelities are overlaps of 2×2 density matrices. Averages over
//! the Bloch sphere are taken either exactly (on a spherical 5-design) or by
//! Monte Carlo.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, SMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::{decode_message, encode_outcome, received_outcome, sample_pattern, NoiseModel, NoiseModelI};
use crate::qstate::{InputQubit, TwoQubitState, C64};
use crate::strategy::CorrectionStrategy;

type Matrix8 = SMatrix<C64, 8, 8>;

/// Samples per independent random stream in [`haar_average`].
pub const CHUNK_SIZE: usize = 4096;
/// Absolute slack added to statistical bands to absorb rounding.
pub const ABS_FLOOR: f64 = 1e-12;
const ZERO_PROBABILITY: f64 = 1e-15;

const fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Bell state `k` as the 2×2 amplitude matrix `Φ[x, y] = ⟨xy|φ_k⟩`.
pub fn bell_amplitudes(k: usize) -> Matrix2<C64> {
    let h = FRAC_1_SQRT_2;
    match k {
        0 => Matrix2::new(c(h), c(0.0), c(0.0), c(h)),
        1 => Matrix2::new(c(h), c(0.0), c(0.0), c(-h)),
        2 => Matrix2::new(c(0.0), c(h), c(h), c(0.0)),
        3 => Matrix2::new(c(0.0), c(h), c(-h), c(0.0)),
        _ => panic!("Bell index {k} out of range 0..4"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOutcome {
    pub k: usize,
    pub probability: f64,
    /// Bob's normalized state before correction; `None` when the outcome
    /// cannot occur.
    pub post_state: Option<Matrix2<C64>>,
}

/// Bell measurement by explicit 8×8 projection and partial trace.
///
/// Qubit order is (input, Alice's half, Bob's half).
pub fn bell_measure(resource: &TwoQubitState, input: &InputQubit) -> [ProtocolOutcome; 4] {
    let psi = input.density();
    let rho = resource.matrix();
    let joint = Matrix8::from_fn(|r, col| psi[(r / 4, col / 4)] * rho[(r % 4, col % 4)]);
    std::array::from_fn(|k| {
        let phi = bell_amplitudes(k);
        let projector = Matrix8::from_fn(|r, col| {
            if r % 2 != col % 2 {
                return c(0.0);
            }
            let (x, y) = ((r >> 2) & 1, (r >> 1) & 1);
            let (x2, y2) = ((col >> 2) & 1, (col >> 1) & 1);
            phi[(x, y)] * phi[(x2, y2)].conj()
        });
        let projected = projector * joint * projector;
        let bob = Matrix2::from_fn(|b, b2| (0..4).map(|xy| projected[(2 * xy + b, 2 * xy + b2)]).sum::<C64>());
        outcome(k, bob)
    })
}

fn outcome(k: usize, unnormalized: Matrix2<C64>) -> ProtocolOutcome {
    let probability = unnormalized.trace().re.max(0.0);
    ProtocolOutcome {
        k,
        probability,
        post_state: (probability > ZERO_PROBABILITY).then(|| unnormalized / c(probability)),
    }
}

/// Bob's unnormalized conditional state `s_k ϱ_k`, contracting
/// `M = Φ_k† P Φ_k` against the resource instead of forming 8×8 matrices.
pub fn bob_unnormalized(resource: &TwoQubitState, input: &InputQubit, k: usize) -> Matrix2<C64> {
    let phi = bell_amplitudes(k);
    let m = phi.adjoint() * input.density() * phi;
    let rho = resource.matrix();
    Matrix2::from_fn(|b, b2| {
        let mut acc = c(0.0);
        for y in 0..2 {
            for y2 in 0..2 {
                acc += m[(y, y2)] * rho[(2 * y + b, 2 * y2 + b2)];
            }
        }
        acc
    })
}

/// Bell measurement via [`bob_unnormalized`].
pub fn bell_measure_fast(resource: &TwoQubitState, input: &InputQubit) -> [ProtocolOutcome; 4] {
    std::array::from_fn(|k| outcome(k, bob_unnormalized(resource, input, k)))
}

/// Bob's output averaged over outcomes and error patterns.
pub fn averaged_output(
    resource: &TwoQubitState,
    ch: &impl NoiseModel,
    strat: &CorrectionStrategy,
    input: &InputQubit,
) -> Matrix2<C64> {
    let p = ch.model_i().p();
    let mut out = Matrix2::zeros();
    for k in 0..4 {
        let bob = bob_unnormalized(resource, input, k);
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            let u = strat.assignment[received_outcome(k, i)].matrix();
            out += u * bob * u.adjoint() * c(pi);
        }
    }
    out
}

/// `Tr(ϱ_avg |ψ⟩⟨ψ|)`.
pub fn per_input_fidelity(
    resource: &TwoQubitState,
    ch: &impl NoiseModel,
    strat: &CorrectionStrategy,
    input: &InputQubit,
) -> f64 {
    (averaged_output(resource, ch, strat, input) * input.density())
        .trace()
        .re
}

/// One protocol run with sampled Bell outcome and channel error.
pub fn sampled_fidelity<R: Rng + ?Sized>(
    resource: &TwoQubitState,
    ch: &NoiseModelI,
    strat: &CorrectionStrategy,
    input: &InputQubit,
    rng: &mut R,
) -> f64 {
    let outcomes = bell_measure_fast(resource, input);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = outcomes[3];
    for o in &outcomes {
        acc += o.probability;
        if u < acc {
            chosen = *o;
            break;
        }
    }
    let Some(state) = chosen.post_state else {
        // Only reachable through rounding in the cumulative sum.
        return sampled_fidelity(resource, ch, strat, input, rng);
    };
    let received = encode_outcome(chosen.k).with_error(sample_pattern(ch, rng));
    let correction = strat.assignment[decode_message(received)].matrix();
    (correction * state * correction.adjoint() * input.density()).trace().re
}

/// Uniform point on the unit sphere from a normalized Gaussian vector.
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n >= 1e-8 {
            return v / n;
        }
    }
}

/// Streaming central moments up to order four, mergeable in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.merge(&Moments {
            n: 1,
            mean: x,
            ..Default::default()
        });
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        let (d2, d3, d4) = (d * d, d * d * d, d * d * d * d);
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * other.m3 - nb * self.m3) / n;
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.n += other.n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStatistics {
    pub mean_f: f64,
    pub mean_f2: f64,
    /// Population standard deviation of the per-input fidelity.
    pub delta: f64,
    pub n_samples: u64,
    /// Standard error of `mean_f`.
    pub std_error: f64,
    /// Large-sample standard error of `delta`.
    pub delta_std_error: f64,
}

impl RunStatistics {
    pub fn from_moments(m: &Moments) -> Self {
        let n = m.n as f64;
        let mu2 = (m.m2 / n).max(0.0);
        let mu4 = (m.m4 / n).max(0.0);
        let sample_var = if m.n > 1 { m.m2 / (n - 1.0) } else { 0.0 };
        let delta_std_error = if mu2 > 0.0 {
            ((mu4 - mu2 * mu2).max(0.0) / (4.0 * mu2 * n)).sqrt()
        } else {
            0.0
        };
        RunStatistics {
            mean_f: m.mean,
            mean_f2: m.mean * m.mean + mu2,
            delta: mu2.sqrt(),
            n_samples: m.n,
            std_error: (sample_var.max(0.0) / n).sqrt(),
            delta_std_error,
        }
    }

    /// Whether `fidelity` lies within `k` standard errors of the mean.
    pub fn fidelity_within(&self, fidelity: f64, k: f64) -> bool {
        (self.mean_f - fidelity).abs() <= k * self.std_error + ABS_FLOOR
    }

    /// Whether `deviation` lies within `k` standard errors of the sample value.
    pub fn deviation_within(&self, deviation: f64, k: f64) -> bool {
        (self.delta - deviation).abs() <= k * self.delta_std_error + ABS_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Average over outcomes and channel errors exactly for each input.
    Analytic,
    /// Sample the Bell outcome and the channel error too.
    Full,
}

/// Monte Carlo average over Haar-random inputs.
///
/// Samples are split into chunks of [`CHUNK_SIZE`], chunk `c` drawing from
/// stream `c` of a ChaCha8 generator seeded with `seed`; chunk moments are
/// merged in chunk order, so results do not depend on the thread count.
pub fn haar_average(
    resource: &TwoQubitState,
    ch: &impl NoiseModel,
    strat: &CorrectionStrategy,
    n_samples: usize,
    seed: u64,
    mode: SamplingMode,
) -> RunStatistics {
    let ch = ch.model_i();
    let chunks = n_samples.div_ceil(CHUNK_SIZE);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK_SIZE.min(n_samples - chunk * CHUNK_SIZE);
            let mut m = Moments::default();
            for _ in 0..len {
                let input = InputQubit::new(sample_unit_vector(&mut rng)).expect("normalized");
                let f = match mode {
                    SamplingMode::Analytic => per_input_fidelity(resource, &ch, strat, &input),
                    SamplingMode::Full => sampled_fidelity(resource, &ch, strat, &input, &mut rng),
                };
                m.push(f);
            }
            m
        })
        .collect();
    let total = partial.iter().fold(Moments::default(), |mut acc, m| {
        acc.merge(m);
        acc
    });
    RunStatistics::from_moments(&total)
}

/// Vertices of the regular icosahedron, a spherical 5-design.
pub fn icosahedron() -> [Vector3<f64>; 12] {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut out = [Vector3::zeros(); 12];
    let mut n = 0;
    for s1 in [1.0, -1.0] {
        for s2 in [g, -g] {
            for v in [
                Vector3::new(0.0, s1, s2),
                Vector3::new(s1, s2, 0.0),
                Vector3::new(s2, 0.0, s1),
            ] {
                out[n] = v.normalize();
                n += 1;
            }
        }
    }
    out
}

/// Exact sphere average and deviation of the per-input fidelity.
///
/// The per-input fidelity is a polynomial of degree two in the Bloch vector,
/// so its first and second moments are reproduced exactly by a 5-design.
pub fn exact_average(resource: &TwoQubitState, ch: &impl NoiseModel, strat: &CorrectionStrategy) -> (f64, f64) {
    let ch = ch.model_i();
    let values: Vec<f64> = icosahedron()
        .iter()
        .map(|a| per_input_fidelity(resource, &ch, strat, &InputQubit::new(*a).expect("unit vertex")))
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;
    use crate::qstate::{bloch_operator, pauli};
    use crate::sampling::{random_model_i, random_state};
    use crate::strategy::Regime;
    use crate::telefid::BELL_CORRELATIONS;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;

    const STD: CorrectionStrategy = CorrectionStrategy::STANDARD;

    fn q(x: f64, y: f64, z: f64) -> InputQubit {
        InputQubit::from_direction(Vector3::new(x, y, z)).unwrap()
    }

    fn ch(p: [f64; 4]) -> NoiseModelI {
        NoiseModelI::new(p).unwrap()
    }

    fn canonical(state: TwoQubitState) -> TwoQubitState {
        canonicalize(&state).0.to_state().unwrap()
    }

    #[test]
    fn bell_amplitudes_match_correlations() {
        for (k, t) in BELL_CORRELATIONS.iter().enumerate() {
            let phi = bell_amplitudes(k);
            let v = nalgebra::Vector4::new(phi[(0, 0)], phi[(0, 1)], phi[(1, 0)], phi[(1, 1)]);
            let state = TwoQubitState::new(v * v.adjoint()).unwrap();
            assert_abs_diff_eq!(
                state.pauli_decompose().t,
                Matrix3::from_diagonal(&Vector3::from(*t)),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn bell_resource_gives_uniform_outcomes() {
        let bell = TwoQubitState::bell();
        for input in [q(1.0, 0.0, 0.0), q(0.3, -0.4, 0.8), q(0.0, 0.0, -1.0)] {
            let total: f64 = bell_measure(&bell, &input).iter().map(|o| o.probability).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            for o in bell_measure(&bell, &input) {
                assert_abs_diff_eq!(o.probability, 0.25, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn uncorrelated_resource_gives_mixed_bob() {
        let mixed = TwoQubitState::maximally_mixed();
        for o in bell_measure(&mixed, &q(0.2, 0.5, -0.1)) {
            let half = Matrix2::identity() * c(0.5);
            assert!((o.post_state.unwrap() - half).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_resource_outcome_probabilities() {
        let resource = TwoQubitState::pure(0.9f64.sqrt()).unwrap();
        let probs: Vec<f64> = bell_measure(&resource, &q(0.0, 0.0, 1.0))
            .iter()
            .map(|o| o.probability)
            .collect();
        for (p, want) in probs.iter().zip([0.45, 0.45, 0.05, 0.05]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn fast_and_explicit_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..100 {
            let resource = random_state(&mut rng);
            let input = InputQubit::new(sample_unit_vector(&mut rng)).unwrap();
            let slow = bell_measure(&resource, &input);
            let fast = bell_measure_fast(&resource, &input);
            for (a, b) in slow.iter().zip(&fast) {
                assert_abs_diff_eq!(a.probability, b.probability, epsilon = 1e-14);
                assert!((a.post_state.unwrap() - b.post_state.unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn outcome_probabilities_and_states_in_pauli_form() {
        // s_k = ¼(1 + aᵀT_k r), s_k ϱ_k = ⅛[(1 + aᵀT_k r) I + (s + Tᵀ T_k a)·σ].
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let resource = random_state(&mut rng);
            let d = resource.pauli_decompose();
            let a = sample_unit_vector(&mut rng);
            let input = InputQubit::new(a).unwrap();
            for o in bell_measure(&resource, &input) {
                let tk = Matrix3::from_diagonal(&Vector3::from(BELL_CORRELATIONS[o.k]));
                let weight = 1.0 + a.dot(&(tk * d.r));
                assert_abs_diff_eq!(o.probability, weight / 4.0, epsilon = 1e-12);
                let bloch = d.s + d.t.transpose() * tk * a;
                let want = (pauli(0) * c(weight) + bloch_operator(&bloch)) / c(8.0);
                let got = o.post_state.unwrap() * c(o.probability);
                assert!((got - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn corrected_outcomes_sum_to_half_identity_minus_correlations() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..100 {
            let (cf, _) = canonicalize(&random_state(&mut rng));
            let resource = cf.to_state().unwrap();
            let a = sample_unit_vector(&mut rng);
            let input = InputQubit::new(a).unwrap();
            let total = averaged_output(&resource, &NoiseModelI::noiseless(), &STD, &input);
            let t = Matrix3::from_diagonal(&cf.correlations());
            let want = (pauli(0) - bloch_operator(&(t.transpose() * a))) * c(0.5);
            assert!((total - want).norm() < 1e-10);
        }
    }

    #[test]
    fn per_input_examples() {
        let bell = canonical(TwoQubitState::bell());
        for input in [q(1.0, 0.0, 0.0), q(0.3, -0.4, 0.8)] {
            assert_abs_diff_eq!(
                per_input_fidelity(&bell, &NoiseModelI::noiseless(), &STD, &input),
                1.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                per_input_fidelity(&bell, &NoiseModelI::uniform(), &STD, &input),
                0.5,
                epsilon = 1e-12
            );
        }
        // Werner ε = 0.5: 𝒳₁₁ = ε(p₀ − p₁ + p₂ − p₃).
        let werner = canonical(TwoQubitState::werner(0.5).unwrap());
        let f = per_input_fidelity(&werner, &ch([0.7, 0.1, 0.1, 0.1]), &STD, &q(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(f, 0.5 * (1.0 + 0.5 * 0.6), epsilon = 1e-12);
    }

    #[test]
    fn local_bob_vector_drops_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..100 {
            let (cf, _) = canonicalize(&random_state(&mut rng));
            let stripped = crate::CanonicalForm {
                s: Vector3::zeros(),
                ..cf
            };
            let (Ok(full), Ok(bare)) = (cf.to_state(), stripped.to_state()) else {
                continue;
            };
            let m = random_model_i(&mut rng);
            let input = InputQubit::new(sample_unit_vector(&mut rng)).unwrap();
            for r in Regime::ALL {
                let a = per_input_fidelity(&full, &m, &r.strategy(), &input);
                let b = per_input_fidelity(&bare, &m, &r.strategy(), &input);
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn icosahedron_is_a_five_design() {
        let pts = icosahedron();
        let mean = |f: &dyn Fn(&Vector3<f64>) -> f64| pts.iter().map(f).sum::<f64>() / 12.0;
        assert_abs_diff_eq!(mean(&|v| v[0] * v[0]), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean(&|v| v[0].powi(4)), 1.0 / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean(&|v| v[0] * v[0] * v[1] * v[1]), 1.0 / 15.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean(&|v| v[0].powi(3) * v[1] * v[1]), 0.0, epsilon = 1e-15);
        for v in pts {
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn exact_average_examples() {
        let mixed = canonical(random_state(&mut ChaCha8Rng::seed_from_u64(73)));
        let (f, d) = exact_average(&mixed, &NoiseModelI::uniform(), &STD);
        assert_abs_diff_eq!(f, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);

        let (f, d) = exact_average(&canonical(TwoQubitState::bell()), &ch([0.6, 0.2, 0.15, 0.05]), &STD);
        assert_abs_diff_eq!(f, 2.2 / 3.0, epsilon = 1e-12);
        let want = 2.0 / (3.0 * 10f64.sqrt()) * (0.05f64.powi(2) + 0.15f64.powi(2) + 0.1f64.powi(2)).sqrt();
        assert_abs_diff_eq!(d, want, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 0.039_440_531, epsilon = 1e-9);

        let example = canonical(TwoQubitState::pure(0.9f64.sqrt()).unwrap());
        let (f, d) = exact_average(&example, &ch([0.7 - 1.0 / 60.0, 0.15, 0.15, 1.0 / 60.0]), &STD);
        assert_abs_diff_eq!(f, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-7);
    }

    #[test]
    fn moments_merge_matches_direct() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64 / 101.0).powi(3)).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut parts = Moments::default();
        for chunk in xs.chunks(77) {
            let mut m = Moments::default();
            chunk.iter().for_each(|&x| m.push(x));
            parts.merge(&m);
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let central = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>();
        for m in [whole, parts] {
            assert_abs_diff_eq!(m.mean, mean, epsilon = 1e-14);
            assert_abs_diff_eq!(m.m2, central(2), epsilon = 1e-11);
            assert_abs_diff_eq!(m.m3, central(3), epsilon = 1e-11);
            assert_abs_diff_eq!(m.m4, central(4), epsilon = 1e-11);
        }
    }

    #[test]
    fn haar_average_bell_noiseless_is_exact() {
        let stats = haar_average(
            &canonical(TwoQubitState::bell()),
            &NoiseModelI::noiseless(),
            &STD,
            10_000,
            1,
            SamplingMode::Analytic,
        );
        assert_abs_diff_eq!(stats.mean_f, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.delta, 0.0, epsilon = 1e-7);
        assert_eq!(stats.n_samples, 10_000);
    }

    #[test]
    fn haar_average_is_reproducible() {
        let m = ch([0.6, 0.2, 0.15, 0.05]);
        let a = haar_average(
            &canonical(TwoQubitState::bell()),
            &m,
            &STD,
            10_000,
            9,
            SamplingMode::Analytic,
        );
        let b = haar_average(
            &canonical(TwoQubitState::bell()),
            &m,
            &STD,
            10_000,
            9,
            SamplingMode::Analytic,
        );
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| {
            haar_average(
                &canonical(TwoQubitState::bell()),
                &m,
                &STD,
                10_000,
                9,
                SamplingMode::Analytic,
            )
        });
        assert_eq!(a, c);
    }

    #[test]
    fn sphere_samples_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let mut mean = Vector3::zeros();
        for _ in 0..10_000 {
            let v = sample_unit_vector(&mut rng);
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-14);
            mean += v / 10_000.0;
        }
        assert!(mean.norm() < 0.05);
    }
}

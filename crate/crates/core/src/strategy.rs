//! Bob's correction strategies.
//!
//! A strategy assigns one Pauli correction to each outcome label Bob decodes
//! from the received bits. The four regime strategies are the permutations
//! that undo the most likely error pattern; the exhaustive search covers all
//! 4⁴ assignments, including non-bijective ones.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix2, Matrix3, Vector3};
use rand::Rng;

use crate::canonical::{CanonicalForm, DetSign};
use crate::channels::NoiseModel;
use crate::error::{Error, Result};
use crate::qstate::{pauli, C64};
use crate::telefid::{fidelity, message_chi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn matrix(self) -> Matrix2<C64> {
        pauli(self.index())
    }

    /// Diagonal of the rotation `σ (·) σ†` induces on Bloch vectors.
    pub fn so3_diag(self) -> Vector3<f64> {
        match self {
            Pauli::I => Vector3::new(1.0, 1.0, 1.0),
            Pauli::X => Vector3::new(1.0, -1.0, -1.0),
            Pauli::Y => Vector3::new(-1.0, 1.0, -1.0),
            Pauli::Z => Vector3::new(-1.0, -1.0, 1.0),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}", self.index())
    }
}

/// Correction applied for each decoded outcome label 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorrectionStrategy {
    pub assignment: [Pauli; 4],
}

impl CorrectionStrategy {
    /// Optimal when no error is the most likely pattern.
    pub const STANDARD: Self = Regime::P0.strategy();

    pub const fn new(assignment: [Pauli; 4]) -> Self {
        Self { assignment }
    }

    /// Strategy number `n < 256`, base-4 digits giving the Pauli per outcome.
    pub fn from_index(n: usize) -> Self {
        assert!(n < 256, "strategy index {n} out of range");
        Self {
            assignment: std::array::from_fn(|j| Pauli::from_index((n >> (2 * j)) & 3)),
        }
    }

    pub fn index(&self) -> usize {
        self.assignment
            .iter()
            .enumerate()
            .map(|(j, p)| p.index() << (2 * j))
            .sum()
    }

    pub fn is_bijection(&self) -> bool {
        Pauli::ALL.iter().all(|p| self.assignment.contains(p))
    }

    /// Σ_j of the SO(3) diagonals of the assigned corrections.
    pub fn rotation_sum(&self) -> Vector3<f64> {
        self.assignment.iter().map(|p| p.so3_diag()).sum()
    }
}

impl fmt::Display for CorrectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.assignment;
        write!(f, "[{a}, {b}, {c}, {d}]")
    }
}

/// Which error pattern is the most likely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    P0,
    P1,
    P2,
    P3,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::P0, Regime::P1, Regime::P2, Regime::P3];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub const fn strategy(self) -> CorrectionStrategy {
        use Pauli::*;
        CorrectionStrategy::new(match self {
            Regime::P0 => [Y, X, Z, I],
            Regime::P1 => [I, Z, X, Y],
            Regime::P2 => [Z, I, Y, X],
            Regime::P3 => [X, Y, I, Z],
        })
    }
}

/// Regime strategy of the first most likely error pattern.
pub fn regime_strategy(ch: &impl NoiseModel) -> CorrectionStrategy {
    Regime::from_index(ch.model_i().dominant()).strategy()
}

/// The regime strategy with the highest fidelity; ties go to the earliest.
pub fn best_regime_strategy(cf: &CanonicalForm, ch: &impl NoiseModel) -> (Regime, f64) {
    let ch = ch.model_i();
    Regime::ALL.iter().map(|&r| (r, fidelity(cf, &ch, &r.strategy()))).fold(
        (Regime::P0, f64::NEG_INFINITY),
        |best, cur| if cur.1 > best.1 { cur } else { best },
    )
}

/// Fidelity reached by the regime strategy for this channel.
///
/// Ties between the largest probabilities are resolved by
/// [`best_regime_strategy`]; positive-determinant states use the exhaustive
/// search.
pub fn regime_fidelity(cf: &CanonicalForm, ch: &impl NoiseModel) -> f64 {
    let ch = ch.model_i();
    if cf.det_sign == DetSign::Positive {
        return fidelity_over_all_strategies(cf, &ch).fidelity;
    }
    match ch.strictly_dominant() {
        Some(d) => fidelity(cf, &ch, &Regime::from_index(d).strategy()),
        None => best_regime_strategy(cf, &ch).1,
    }
}

/// Closed-form regime fidelity `½(1 + Σ|t|/3) − penalty/3`, where the
/// penalty weighs the three less likely patterns by the axis pairs they
/// corrupt.
pub fn regime_formula(cf: &CanonicalForm, ch: &impl NoiseModel) -> Result<f64> {
    if cf.det_sign == DetSign::Positive {
        return Err(Error::NotApplicable("regime formulas require det T <= 0".into()));
    }
    let ch = ch.model_i();
    let [p0, p1, p2, p3] = ch.p();
    let [t1, t2, t3] = cf.magnitudes;
    let penalty = match ch.dominant() {
        0 => p1 * (t1 + t3) + p2 * (t2 + t3) + p3 * (t1 + t2),
        1 => p0 * (t1 + t3) + p2 * (t1 + t2) + p3 * (t2 + t3),
        2 => p0 * (t2 + t3) + p1 * (t1 + t2) + p3 * (t1 + t3),
        _ => p0 * (t1 + t2) + p1 * (t2 + t3) + p2 * (t1 + t3),
    };
    Ok(0.5 * (1.0 + (t1 + t2 + t3) / 3.0) - penalty / 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySearch {
    /// First assignment (by index) attaining the maximum.
    pub best: CorrectionStrategy,
    pub fidelity: f64,
    /// Fidelity of every assignment, indexed by [`CorrectionStrategy::index`].
    pub table: Vec<f64>,
}

pub fn fidelity_over_all_strategies(cf: &CanonicalForm, ch: &impl NoiseModel) -> StrategySearch {
    let ch = ch.model_i();
    let table: Vec<f64> = (0..256)
        .map(|n| fidelity(cf, &ch, &CorrectionStrategy::from_index(n)))
        .collect();
    let best = (0..256).fold(0, |b, n| if table[n] > table[b] { n } else { b });
    StrategySearch {
        best: CorrectionStrategy::from_index(best),
        fidelity: table[best],
        table,
    }
}

/// A proper rotation in z-x-z Euler angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationTriple {
    pub phi: f64,
    pub psi: f64,
    pub theta: f64,
    pub matrix: Matrix3<f64>,
}

impl RotationTriple {
    pub fn from_euler(phi: f64, psi: f64, theta: f64) -> Self {
        let (sf, cf) = phi.sin_cos();
        let (sp, cp) = psi.sin_cos();
        let (st, ct) = theta.sin_cos();
        #[rustfmt::skip]
        let matrix = Matrix3::new(
            cf * cp - ct * sf * sp, -cf * sp - ct * sf * cp,  sf * st,
            sf * cp + ct * cf * sp, -sf * sp + ct * cf * cp, -cf * st,
            sp * st,                 cp * st,                 ct,
        );
        Self {
            phi,
            psi,
            theta,
            matrix,
        }
    }

    /// φ, ψ uniform on [0, 2π), cos θ uniform on [−1, 1].
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let phi = rng.random::<f64>() * TAU;
        let psi = rng.random::<f64>() * TAU;
        let theta = rng.random_range(-1.0f64..=1.0).acos();
        Self::from_euler(phi, psi, theta)
    }
}

/// Average fidelity when Bob rotates by `rotations[j]` on decoding outcome
/// `j`, with arbitrary rotations in place of Pauli corrections.
pub fn rotation_objective(cf: &CanonicalForm, ch: &impl NoiseModel, rotations: &[Matrix3<f64>; 4]) -> f64 {
    let ch = ch.model_i();
    let trace: f64 = (0..4)
        .map(|j| {
            let x = message_chi(cf, &ch, j);
            (0..3).map(|a| rotations[j][(a, a)] * x[a]).sum::<f64>()
        })
        .sum();
    0.5 + trace / 24.0
}

/// Regime fidelity minus the best fidelity over `n_samples` random rotation
/// quadruples. Negative values mean a random strategy beat the regime table.
pub fn random_rotation_check<R: Rng + ?Sized>(
    cf: &CanonicalForm,
    ch: &impl NoiseModel,
    n_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let ch = ch.model_i();
    if ch.strictly_dominant().is_none() {
        return Err(Error::NotApplicable(
            "random rotation check needs a strictly most likely error pattern".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::parameter("n_samples", 0.0, "at least 1"));
    }
    let best_sampled = (0..n_samples)
        .map(|_| {
            let rotations = std::array::from_fn(|_| RotationTriple::random(rng).matrix);
            rotation_objective(cf, &ch, &rotations)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(regime_fidelity(cf, &ch) - best_sampled)
}

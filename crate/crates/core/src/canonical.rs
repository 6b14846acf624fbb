//! Canonical form of a two-qubit state under proper local rotations.
//!
//! Local unitaries `U_A ⊗ U_B` act on the Pauli decomposition as
//! `T → O_A T O_Bᵀ`, `r → O_A r`, `s → O_B s` with `O_A, O_B ∈ SO(3)`. The
//! canonical form has a diagonal correlation matrix `diag(λ_i |t_ii|)` with
//! the sign pattern fixed by the sign of `det T`:
//!
//! - `det T ≤ 0`: every `λ_i = −1`;
//! - `det T > 0`: `λ = +1` on the axis with the smallest magnitude, `−1` on
//!   the other two.
//!
//! Magnitudes are stored per axis. Rotations never move a magnitude to a
//! different axis when the input correlation matrix is already diagonal, and
//! otherwise follow the axis each singular direction is most aligned with.
//! Under a noisy channel the fidelity is *not* invariant under permuting the
//! axes, so this ordering is part of the answer.

use nalgebra::{Matrix3, Vector3};

use crate::qstate::{PauliDecomposition, TwoQubitState};
use crate::Result;

/// Threshold below which `det T` is classified as zero.
pub const DET_ZERO_TOL: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-12;

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetSign {
    Negative,
    Zero,
    Positive,
}

impl DetSign {
    pub fn of(det: f64) -> Self {
        if det.abs() < DET_ZERO_TOL {
            DetSign::Zero
        } else if det < 0.0 {
            DetSign::Negative
        } else {
            DetSign::Positive
        }
    }
}

impl std::fmt::Display for DetSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DetSign::Negative => "negative",
            DetSign::Zero => "zero",
            DetSign::Positive => "positive",
        })
    }
}

/// A state reduced to diagonal correlations `diag(λ_i · magnitudes_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub r: Vector3<f64>,
    pub s: Vector3<f64>,
    /// `|t_ii|` on each axis, in axis order.
    pub magnitudes: [f64; 3],
    pub lambda: [i8; 3],
    pub det_sign: DetSign,
}

/// SO(3) images of the local unitaries used by [`canonicalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRotations {
    pub o_a: Matrix3<f64>,
    pub o_b: Matrix3<f64>,
}

impl LocalRotations {
    /// Applies the rotations to a decomposition.
    pub fn apply(&self, d: &PauliDecomposition) -> PauliDecomposition {
        PauliDecomposition {
            r: self.o_a * d.r,
            s: self.o_b * d.s,
            t: self.o_a * d.t * self.o_b.transpose(),
        }
    }
}

impl CanonicalForm {
    /// Diagonal of the canonical correlation matrix, `λ_i · |t_ii|`.
    pub fn correlations(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| f64::from(self.lambda[i]) * self.magnitudes[i])
    }

    /// Magnitudes sorted in descending order.
    pub fn sorted_magnitudes(&self) -> [f64; 3] {
        let mut m = self.magnitudes;
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    pub fn magnitude_sum(&self) -> f64 {
        self.magnitudes.iter().sum()
    }

    pub fn decomposition(&self) -> PauliDecomposition {
        PauliDecomposition {
            r: self.r,
            s: self.s,
            t: Matrix3::from_diagonal(&self.correlations()),
        }
    }

    /// The canonical state itself.
    pub fn to_state(&self) -> Result<TwoQubitState> {
        self.decomposition().reconstruct()
    }

    /// Canonical form of the Bell-diagonal state with correlations
    /// `diag(−m₁, −m₂, −m₃)` and no local Bloch vectors.
    ///
    /// Physicality is not checked; use [`CanonicalForm::to_state`] for that.
    pub fn negative_branch(magnitudes: [f64; 3]) -> Self {
        Self::from_diagonal(
            Vector3::from(magnitudes.map(|m| -m)),
            Vector3::zeros(),
            Vector3::zeros(),
        )
    }

    /// Canonical form of the decomposition with a diagonal correlation matrix.
    pub fn from_diagonal(t: Vector3<f64>, r: Vector3<f64>, s: Vector3<f64>) -> Self {
        canonicalize_decomposition(&PauliDecomposition {
            r,
            s,
            t: Matrix3::from_diagonal(&t),
        })
        .0
    }
}

/// Sign pattern for the canonical diagonal given per-axis magnitudes.
pub fn lambda_signs(det_sign: DetSign, magnitudes: &[f64; 3]) -> [i8; 3] {
    let mut lambda = [-1; 3];
    if det_sign == DetSign::Positive {
        // Last index among the tied smallest magnitudes.
        let k = (0..3)
            .rev()
            .min_by(|&i, &j| magnitudes[i].total_cmp(&magnitudes[j]))
            .expect("three axes");
        lambda[k] = 1;
    }
    lambda
}

pub fn canonicalize(state: &TwoQubitState) -> (CanonicalForm, LocalRotations) {
    canonicalize_decomposition(&state.pauli_decompose())
}

/// Canonicalizes a decomposition without checking that it is physical.
pub fn canonicalize_decomposition(d: &PauliDecomposition) -> (CanonicalForm, LocalRotations) {
    let det_sign = DetSign::of(d.t.determinant());
    let (u, diag, v) = proper_diagonalization(&d.t);
    let magnitudes = [diag[0].abs(), diag[1].abs(), diag[2].abs()];
    let lambda = lambda_signs(det_sign, &magnitudes);

    // Flip pairs of axes on Alice's side so that sign(diag) matches λ.
    let mut flips: Vec<usize> = (0..3)
        .filter(|&c| magnitudes[c] > 0.0 && (diag[c] > 0.0) != (lambda[c] > 0))
        .collect();
    if flips.len() % 2 == 1 {
        let zero_axis = (0..3)
            .filter(|c| !flips.contains(c))
            .min_by(|&i, &j| magnitudes[i].total_cmp(&magnitudes[j]))
            .expect("odd flip count leaves a free axis");
        flips.push(zero_axis);
    }
    let sign = Matrix3::from_diagonal(&Vector3::from_fn(|c, _| if flips.contains(&c) { -1.0 } else { 1.0 }));

    let rotations = LocalRotations {
        o_a: sign * u.transpose(),
        o_b: v.transpose(),
    };
    let rotated = rotations.apply(d);
    let cf = CanonicalForm {
        r: rotated.r,
        s: rotated.s,
        magnitudes,
        lambda,
        det_sign,
    };
    (cf, rotations)
}

/// `T = U diag(d) Vᵀ` with `U, V ∈ SO(3)` and axes chosen to follow the input.
fn proper_diagonalization(t: &Matrix3<f64>) -> (Matrix3<f64>, Vector3<f64>, Matrix3<f64>) {
    let off_diag = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].abs())
        .fold(0.0, f64::max);
    if off_diag <= DIAGONAL_TOL {
        return (Matrix3::identity(), t.diagonal(), Matrix3::identity());
    }

    let svd = t.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested Vᵀ").transpose();
    let sv = svd.singular_values;

    // Assign singular direction perm[c] to axis c, maximizing alignment.
    let score = |p: &[usize; 3]| -> f64 { (0..3).map(|c| u[(c, p[c])].abs() + v[(c, p[c])].abs()).sum() };
    let mut perm = PERMUTATIONS[0];
    let mut best = score(&perm);
    for p in &PERMUTATIONS[1..] {
        let sc = score(p);
        if sc > best + 1e-12 {
            best = sc;
            perm = *p;
        }
    }

    let mut u = Matrix3::from_fn(|i, c| u[(i, perm[c])]);
    let mut v = Matrix3::from_fn(|i, c| v[(i, perm[c])]);
    let mut d = Vector3::from_fn(|c, _| sv[perm[c]]);
    // Orient each singular pair along its axis's positive direction where possible.
    for c in 0..3 {
        if u[(c, c)] < 0.0 {
            u.column_mut(c).neg_mut();
            d[c] = -d[c];
        }
        if v[(c, c)] < 0.0 {
            v.column_mut(c).neg_mut();
            d[c] = -d[c];
        }
    }
    let weakest = (0..3)
        .min_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()))
        .expect("three axes");
    if u.determinant() < 0.0 {
        u.column_mut(weakest).neg_mut();
        d[weakest] = -d[weakest];
    }
    if v.determinant() < 0.0 {
        v.column_mut(weakest).neg_mut();
        d[weakest] = -d[weakest];
    }
    (u, d, v)
}

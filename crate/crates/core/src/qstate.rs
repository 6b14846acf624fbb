//! Two-qubit density matrices in the Pauli basis.
//!
//! A state is stored as a validated 4×4 complex matrix. Qubit order is
//! (Alice, Bob); basis index `2*a + b` for the computational state `|ab⟩`.

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = -1e-10;
const UNIT_NORM_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as exact zeros when forming matrix
/// square roots (removes O(1e-8) noise that sqrt would otherwise amplify).
const RANK_CUTOFF: f64 = 1e-13;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// σ₀ = I, σ₁ = X, σ₂ = Y, σ₃ = Z.
pub fn pauli(i: usize) -> Matrix2<C64> {
    let (o, z, j) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match i {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -j, j, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("Pauli index {i} out of range 0..4"),
    }
}

pub(crate) fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Spin operator `n·σ` for a real 3-vector.
pub fn bloch_operator(n: &Vector3<f64>) -> Matrix2<C64> {
    (1..=3).fold(Matrix2::zeros(), |acc, i| acc + pauli(i) * c(n[i - 1], 0.0))
}

fn max_abs(m: &Matrix4<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A validated two-qubit density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4<C64>,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    ///
    /// Asymmetry below 1e-12 is removed by symmetrization; anything larger is
    /// rejected.
    pub fn new(matrix: Matrix4<C64>) -> Result<Self> {
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState {
                invariant: "finite entries",
                detail: "matrix contains NaN or infinity".into(),
            });
        }
        let asym = max_abs(&(matrix - matrix.adjoint()));
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidState {
                invariant: "Hermitian",
                detail: format!("max |ρ - ρ†| = {asym:.3e}"),
            });
        }
        let matrix = (matrix + matrix.adjoint()) * c(0.5, 0.0);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState {
                invariant: "unit trace",
                detail: format!("Tr ρ = {trace}"),
            });
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < PSD_TOL {
            return Err(Error::InvalidState {
                invariant: "positive semidefinite",
                detail: format!("smallest eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Matrix4::identity() * c(0.25, 0.0),
        }
    }

    /// |φ₀⟩ = (|00⟩ + |11⟩)/√2.
    pub fn bell() -> Self {
        Self::pure(std::f64::consts::FRAC_1_SQRT_2).expect("valid amplitude")
    }

    /// a|00⟩ + b|11⟩ with b = √(1 − a²).
    pub fn pure(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::parameter("a", a, "0 <= a <= 1"));
        }
        let b = (1.0 - a * a).max(0.0).sqrt();
        let psi = Vector4::new(c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0));
        Ok(Self {
            matrix: psi * psi.adjoint(),
        })
    }

    /// ε|φ₀⟩⟨φ₀| + (1 − ε) I/4.
    pub fn werner(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::parameter("epsilon", epsilon, "0 <= epsilon <= 1"));
        }
        let bell = Self::bell().matrix;
        Ok(Self {
            matrix: bell * c(epsilon, 0.0) + Matrix4::identity() * c((1.0 - epsilon) / 4.0, 0.0),
        })
    }

    pub fn from_family(family: &StateFamily) -> Result<Self> {
        match family {
            StateFamily::Dense(m) => Self::new(*m),
            StateFamily::Pure { a } => Self::pure(*a),
            StateFamily::Werner { epsilon } => Self::werner(*epsilon),
            StateFamily::Tdiag { t, r, s } => PauliDecomposition {
                r: *r,
                s: *s,
                t: Matrix3::from_diagonal(t),
            }
            .reconstruct(),
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self.matrix.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn pauli_decompose(&self) -> PauliDecomposition {
        let expect = |i: usize, j: usize| (self.matrix * kron2(&pauli(i), &pauli(j))).trace().re;
        PauliDecomposition {
            r: Vector3::from_fn(|i, _| expect(i + 1, 0)),
            s: Vector3::from_fn(|j, _| expect(0, j + 1)),
            t: Matrix3::from_fn(|i, j| expect(i + 1, j + 1)),
        }
    }

    /// Wootters concurrence.
    pub fn concurrence(&self) -> f64 {
        // ρ = W W†; the λ's are the singular values of Wᵀ (σy⊗σy) W.
        let eig = SymmetricEigen::new(self.matrix);
        let scale = eig.eigenvalues.map(|w| if w > RANK_CUTOFF { w.sqrt() } else { 0.0 });
        let mut w = eig.eigenvectors;
        for (col, s) in scale.iter().enumerate() {
            w.column_mut(col).scale_mut(*s);
        }
        let yy = kron2(&pauli(2), &pauli(2));
        let tau = w.transpose() * yy * w;
        let mut sv: Vec<f64> = SVD::new(tau, false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
    }
}

pub(crate) fn min_eigenvalue(m: &Matrix4<C64>) -> f64 {
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// ρ = ¼(I + R·σ⊗I + I⊗S·σ + Σ Tᵢⱼ σᵢ⊗σⱼ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    /// Alice's Bloch vector.
    pub r: Vector3<f64>,
    /// Bob's Bloch vector.
    pub s: Vector3<f64>,
    /// Correlation matrix.
    pub t: Matrix3<f64>,
}

impl PauliDecomposition {
    /// The operator the coefficients describe, without any validity check.
    pub fn to_matrix(&self) -> Matrix4<C64> {
        let id = pauli(0);
        let mut m = Matrix4::identity();
        for i in 0..3 {
            m += kron2(&pauli(i + 1), &id) * c(self.r[i], 0.0);
            m += kron2(&id, &pauli(i + 1)) * c(self.s[i], 0.0);
            for j in 0..3 {
                m += kron2(&pauli(i + 1), &pauli(j + 1)) * c(self.t[(i, j)], 0.0);
            }
        }
        m * c(0.25, 0.0)
    }

    pub fn reconstruct(&self) -> Result<TwoQubitState> {
        let m = self.to_matrix();
        let min_eig = min_eigenvalue(&m);
        if !min_eig.is_finite() || min_eig < PSD_TOL {
            return Err(Error::Unphysical {
                min_eigenvalue: min_eig,
            });
        }
        TwoQubitState::new(m)
    }
}

/// Named resource-state families.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    Dense(Matrix4<C64>),
    /// a|00⟩ + b|11⟩.
    Pure {
        a: f64,
    },
    Werner {
        epsilon: f64,
    },
    /// Diagonal correlation matrix `diag(t)` with local vectors `r`, `s`.
    Tdiag {
        t: Vector3<f64>,
        r: Vector3<f64>,
        s: Vector3<f64>,
    },
}

/// Larger amplitude `a` of the pure state a|00⟩ + b|11⟩ whose concurrence 2ab
/// equals `concurrence`.
pub fn pure_amplitude_for_concurrence(concurrence: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::parameter("concurrence", concurrence, "0 <= C <= 1"));
    }
    Ok(((1.0 + (1.0 - concurrence * concurrence).sqrt()) / 2.0).sqrt())
}

/// Pure input qubit ½(I + a·σ) with unit Bloch vector `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubit {
    bloch: Vector3<f64>,
}

impl InputQubit {
    pub fn new(bloch: Vector3<f64>) -> Result<Self> {
        let norm = bloch.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::parameter("|a|", norm, "unit Bloch vector"));
        }
        Ok(Self { bloch })
    }

    /// Normalizes `v`; fails only for (near) zero vectors.
    pub fn from_direction(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if norm.is_nan() || norm <= 1e-8 {
            return Err(Error::parameter("|a|", norm, "nonzero direction"));
        }
        Ok(Self { bloch: v / norm })
    }

    pub fn bloch(&self) -> &Vector3<f64> {
        &self.bloch
    }

    pub fn density(&self) -> Matrix2<C64> {
        (pauli(0) + bloch_operator(&self.bloch)) * c(0.5, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_trace_orthogonality() {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let a = kron2(&pauli(i), &pauli(j));
                        let b = kron2(&pauli(k), &pauli(l));
                        let tr = (a * b).trace();
                        let expected = if i == k && j == l { 4.0 } else { 0.0 };
                        assert!((tr - c(expected, 0.0)).norm() < 1e-15, "{i}{j}{k}{l}");
                    }
                }
            }
        }
    }

    #[test]
    fn bell_decomposition() {
        let d = TwoQubitState::bell().pauli_decompose();
        assert_abs_diff_eq!(d.r.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.s.norm(), 0.0, epsilon = 1e-15);
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0));
        assert_abs_diff_eq!(d.t, expected, epsilon = 1e-15);
    }

    #[test]
    fn maximally_mixed_decomposition() {
        let d = TwoQubitState::maximally_mixed().pauli_decompose();
        assert_eq!(d.r, Vector3::zeros());
        assert_eq!(d.s, Vector3::zeros());
        assert_eq!(d.t, Matrix3::zeros());
        let back = PauliDecomposition {
            r: Vector3::zeros(),
            s: Vector3::zeros(),
            t: Matrix3::zeros(),
        }
        .reconstruct()
        .unwrap();
        assert_abs_diff_eq!(back.matrix().map(|z| z.re), Matrix4::identity() / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn werner_correlations() {
        for eps in [0.2, 0.5, 0.9] {
            let t = TwoQubitState::werner(eps).unwrap().pauli_decompose().t;
            for i in 0..3 {
                assert_abs_diff_eq!(t[(i, i)].abs(), eps, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reconstruct_bell_and_mixed_example() {
        let bell = PauliDecomposition {
            r: Vector3::zeros(),
            s: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)),
        }
        .reconstruct()
        .unwrap();
        assert!(max_abs(&(bell.matrix() - TwoQubitState::bell().matrix())) < 1e-15);

        let mixed = PauliDecomposition {
            r: Vector3::zeros(),
            s: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(-0.6, -0.6, -1.0)),
        }
        .reconstruct()
        .unwrap();
        // Bell-diagonal with weights (0, 0, 0.2, 0.8).
        let ev = mixed.eigenvalues();
        for (got, want) in ev.iter().zip([0.0, 0.0, 0.2, 0.8]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn unphysical_decomposition_rejected() {
        let err = PauliDecomposition {
            r: Vector3::new(0.0, 0.0, 1.0),
            s: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, -1.0)),
        }
        .reconstruct()
        .unwrap_err();
        assert!(matches!(err, Error::Unphysical { .. }));
    }

    #[test]
    fn validation_names_invariant() {
        let mut m = Matrix4::identity() * c(0.25, 0.0);
        m[(0, 1)] = c(1e-6, 0.0);
        match TwoQubitState::new(m) {
            Err(Error::InvalidState { invariant, .. }) => assert_eq!(invariant, "Hermitian"),
            other => panic!("{other:?}"),
        }
        let m = Matrix4::identity() * c(0.3, 0.0);
        match TwoQubitState::new(m) {
            Err(Error::InvalidState { invariant, .. }) => assert_eq!(invariant, "unit trace"),
            other => panic!("{other:?}"),
        }
        let m = Matrix4::from_diagonal(&Vector4::new(c(0.6, 0.0), c(0.6, 0.0), c(0.0, 0.0), c(-0.2, 0.0)));
        match TwoQubitState::new(m) {
            Err(Error::InvalidState { invariant, .. }) => assert_eq!(invariant, "positive semidefinite"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut m = Matrix4::identity() * c(0.25, 0.0);
        m[(0, 1)] = c(1e-13, 0.0);
        let s = TwoQubitState::new(m).unwrap();
        assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)].conj());
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(TwoQubitState::maximally_mixed().concurrence(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(TwoQubitState::bell().concurrence(), 1.0, epsilon = 1e-12);
        for eps in [0.4, 0.6, 0.8, 1.0] {
            let cw = TwoQubitState::werner(eps).unwrap().concurrence();
            assert_abs_diff_eq!(cw, (3.0 * eps - 1.0) / 2.0, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(TwoQubitState::werner(0.3).unwrap().concurrence(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_of_pure_family_grid() {
        for i in 0..50 {
            let a = (i as f64 + 0.5) / 50.0;
            let b = (1.0 - a * a).sqrt();
            let conc = TwoQubitState::pure(a).unwrap().concurrence();
            assert_abs_diff_eq!(conc, 2.0 * a * b, epsilon = 1e-10);
        }
    }

    #[test]
    fn pure_family_examples() {
        let s = TwoQubitState::pure(0.9f64.sqrt()).unwrap();
        let t = s.pauli_decompose().t;
        assert_abs_diff_eq!(t[(0, 0)].abs(), 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(1, 1)].abs(), 0.6, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(2, 2)].abs(), 1.0, epsilon = 1e-14);
        let w1 = TwoQubitState::werner(1.0).unwrap();
        assert!(max_abs(&(w1.matrix() - TwoQubitState::bell().matrix())) < 1e-15);
        assert!(TwoQubitState::pure(1.2).is_err());
        assert!(TwoQubitState::werner(-0.1).is_err());
    }

    #[test]
    fn amplitude_for_concurrence_inverts() {
        for cc in [0.0, 0.3, 0.6, 1.0] {
            let a = pure_amplitude_for_concurrence(cc).unwrap();
            let b = (1.0 - a * a).sqrt();
            assert_abs_diff_eq!(2.0 * a * b, cc, epsilon = 1e-12);
            assert!(a >= b);
        }
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let state = crate::sampling::random_state(&mut rng);
            let back = state.pauli_decompose().reconstruct().unwrap();
            assert!(max_abs(&(back.matrix() - state.matrix())) < 1e-10);
            let d = state.pauli_decompose();
            assert!(d.r.norm() <= 1.0 + 1e-10 && d.s.norm() <= 1.0 + 1e-10);
            assert!(d.t.iter().all(|x| x.abs() <= 1.0 + 1e-10));
        }
    }

    #[test]
    fn input_qubit_requires_unit_vector() {
        assert!(InputQubit::new(Vector3::new(1.0, 0.0, 0.0)).is_ok());
        assert!(InputQubit::new(Vector3::new(1.0, 1.0, 0.0)).is_err());
        let q = InputQubit::from_direction(Vector3::new(0.0, 3.0, 4.0)).unwrap();
        assert_abs_diff_eq!(q.bloch().norm(), 1.0, epsilon = 1e-15);
        let rho = q.density();
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((rho * rho - rho).norm(), 0.0, epsilon = 1e-15);
    }
}

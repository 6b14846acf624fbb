//! Random states and channels for property tests and sweeps.

use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};

use crate::channels::NoiseModelI;
use crate::qstate::{TwoQubitState, C64};

/// `G G† / Tr(G G†)` with i.i.d. complex standard normal entries.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    loop {
        let g = Matrix4::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let rho = g * g.adjoint();
        let tr = rho.trace().re;
        if let Ok(state) = TwoQubitState::new(rho / C64::new(tr, 0.0)) {
            return state;
        }
    }
}

/// Model I channel drawn uniformly from the probability simplex.
pub fn random_model_i<R: Rng + ?Sized>(rng: &mut R) -> NoiseModelI {
    let dirichlet = Dirichlet::new([1.0; 4]).expect("valid concentration");
    let p = dirichlet.sample(rng);
    let total: f64 = p.iter().sum();
    NoiseModelI::new(p.map(|x| x / total)).expect("Dirichlet sample lies on the simplex")
}

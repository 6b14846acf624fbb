//! Minimum classical communication cost compatible with non-classical
//! fidelity.
//!
//! For a state with `det T < 0` the standard strategy beats the classical
//! bound exactly when `Σ|t_ii| > 1 + 2 f_noise`. Both solvers minimize the
//! mutual information carried by the channel on the closure of that set, where
//! the constraint is active: `f_noise = b` with `b = (Σ|t_ii| − 1)/2`.
//!
//! For the single two-bit channel the problem is entropy maximization under
//! one linear constraint, so the minimizer is the Gibbs distribution
//! `p_i ∝ exp(−β c_i)` with `c = (0, |t₁₁|+|t₃₃|, |t₂₂|+|t₃₃|, |t₁₁|+|t₂₂|)`;
//! `β` is found by bisection. For two binary channels the constraint curve is
//! solved for `η′(η)` and the cost is minimized along it by a dense scan
//! followed by root finding on the Lagrange condition.

use rayon::prelude::*;

use crate::canonical::CanonicalForm;
use crate::channels::{binary_entropy, Channel, NoiseModel, NoiseModelI, NoiseModelII};
use crate::error::{Error, Result};
use crate::telefid::{f_noise, require_negative};

/// Distance from ½ or 1 below which a binary channel counts as on the box
/// edge. Within it `1 − η` is too coarsely resolved for the logarithmic
/// stationary condition to be checked to 1e-6.
pub const BOUNDARY_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostStatus {
    Solved,
    Infeasible,
    /// The optimum lies on (within [`BOUNDARY_TOL`] of) an edge of the box.
    Boundary,
}

impl std::fmt::Display for CostStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CostStatus::Solved => "solved",
            CostStatus::Infeasible => "infeasible",
            CostStatus::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostSolution {
    /// The optimal channel; the noiseless channel when infeasible.
    pub channel: Channel,
    /// Mutual information in bits.
    pub cost: f64,
    /// `Σ|t_ii| − 1 − 2 f_noise` at `channel`.
    pub constraint_residual: f64,
    pub stationary_residuals: Vec<f64>,
    pub status: CostStatus,
}

fn noise_budget(cf: &CanonicalForm) -> f64 {
    (cf.magnitude_sum() - 1.0) / 2.0
}

fn infeasible(cf: &CanonicalForm, channel: Channel) -> CostSolution {
    CostSolution {
        channel,
        cost: channel.mutual_information(),
        constraint_residual: cf.magnitude_sum() - 1.0,
        stationary_residuals: Vec::new(),
        status: CostStatus::Infeasible,
    }
}

fn constraint_residual(cf: &CanonicalForm, ch: &impl NoiseModel) -> f64 {
    cf.magnitude_sum() - 1.0 - 2.0 * f_noise(cf, ch)
}

fn penalties(cf: &CanonicalForm) -> [f64; 4] {
    let [t1, t2, t3] = cf.magnitudes;
    [0.0, t1 + t3, t2 + t3, t1 + t2]
}

fn gibbs(c: &[f64; 4], beta: f64) -> [f64; 4] {
    let w = c.map(|ci| (-beta * ci).exp());
    let z: f64 = w.iter().sum();
    w.map(|wi| wi / z)
}

fn mean_penalty(c: &[f64; 4], beta: f64) -> f64 {
    gibbs(c, beta).iter().zip(c).map(|(p, ci)| p * ci).sum()
}

/// Minimum cost over the two-bit channel simplex.
pub fn min_cost_model_i(cf: &CanonicalForm) -> Result<CostSolution> {
    require_negative(cf, "the minimum-cost problem")?;
    let b = noise_budget(cf);
    if b <= 0.0 {
        return Ok(infeasible(cf, NoiseModelI::noiseless().into()));
    }
    let c = penalties(cf);
    // Penalty mean falls from Σ|t_ii|/2 > b at β = 0 towards 0.
    let mut hi = 1.0;
    while mean_penalty(&c, hi) > b {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_penalty(&c, mid) > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ch = NoiseModelI::new(gibbs(&c, hi))?;
    Ok(CostSolution {
        channel: ch.into(),
        cost: ch.mutual_information(),
        constraint_residual: constraint_residual(cf, &ch),
        stationary_residuals: stationary_residuals(cf, &ch)?,
        status: CostStatus::Solved,
    })
}

/// `η′` on the active constraint for a given `η`, if defined.
fn eta_prime_on_curve(cf: &CanonicalForm, eta: f64) -> Option<f64> {
    let [t1, t2, t3] = cf.magnitudes;
    let b = noise_budget(cf);
    let den = t3 - t2 - 2.0 * t3 * eta;
    let v = (b - t1 * (1.0 - eta) - t3 * eta - t2) / den;
    v.is_finite().then_some(v)
}

fn model_ii_cost(eta: f64, eta_prime: f64) -> f64 {
    2.0 - binary_entropy(eta) - binary_entropy(eta_prime)
}

/// Minimum cost over pairs of binary channels `½ ≤ η, η′ ≤ 1`.
pub fn min_cost_model_ii(cf: &CanonicalForm) -> Result<CostSolution> {
    require_negative(cf, "the minimum-cost problem")?;
    let noiseless = NoiseModelII::new(1.0, 1.0)?;
    if noise_budget(cf) <= 0.0 {
        return Ok(infeasible(cf, noiseless.into()));
    }
    let [t1, t2, t3] = cf.magnitudes;
    let b = noise_budget(cf);
    // η′ falls along the curve from 1 at `top` to ½ at `half`.
    let top = 1.0 - b / (t1 + t3);
    let half = if t1 > 0.0 {
        (t1 + 0.5 * (t2 + t3) - b) / t1
    } else {
        f64::INFINITY
    };
    let (lo, hi) = (top.max(0.5), half.min(1.0));
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Ok(infeasible(cf, noiseless.into()));
    }
    let on_curve = |eta: f64| eta_prime_on_curve(cf, eta).map(|v| v.clamp(0.5, 1.0));
    let cost = |eta: f64| on_curve(eta).map_or(f64::INFINITY, |v| model_ii_cost(eta, v));
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let i = (0..grid.len())
        .min_by(|&a, &b| cost(grid[a]).total_cmp(&cost(grid[b])))
        .expect("non-empty scan");
    let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let mut eta = golden_section(a, b, cost);
    // Sharpen with the Lagrange condition, whose sign changes at the minimum.
    let lagrange = |x: f64| on_curve(x).map_or(f64::NAN, |v| lagrange_signed(cf, x, v));
    let (ga, gb) = (lagrange(a), lagrange(b));
    if ga.is_sign_negative() != gb.is_sign_negative() && !ga.is_nan() && !gb.is_nan() && ga != 0.0 && gb != 0.0 {
        let root = bisect(a, b, lagrange);
        if cost(root) <= cost(eta) + 1e-15 {
            eta = root;
        }
    }
    let eta_prime = on_curve(eta).expect("point on the curve");
    let ch = NoiseModelII::new(eta, eta_prime)?;
    let on_edge = [eta, eta_prime]
        .iter()
        .any(|&x| x - 0.5 < BOUNDARY_TOL || 1.0 - x < BOUNDARY_TOL);
    Ok(CostSolution {
        channel: ch.into(),
        cost: model_ii_cost(eta, eta_prime),
        constraint_residual: constraint_residual(cf, &ch),
        stationary_residuals: stationary_residuals(cf, &ch)?,
        status: if on_edge {
            CostStatus::Boundary
        } else {
            CostStatus::Solved
        },
    })
}

fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - r * (b - a), a + r * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    [(a, f(a)), (x1, f1), (x2, f2), (b, f(b))]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .map(|p| p.0)
        .unwrap_or(0.5 * (a + b))
}

fn bisect(mut a: f64, mut b: f64, g: impl Fn(f64) -> f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 || gm.is_nan() {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn logit2(x: f64) -> f64 {
    if x >= 1.0 {
        f64::INFINITY
    } else {
        x.log2() - (1.0 - x).log2()
    }
}

/// `L(η)/(|t₁₁| − (1−2η′)|t₃₃|) − L(η′)/(|t₂₂| − (1−2η)|t₃₃|)` with
/// `L(x) = log₂ x − log₂(1−x)`.
fn lagrange_residual(cf: &CanonicalForm, eta: f64, eta_prime: f64) -> f64 {
    let r = lagrange_signed(cf, eta, eta_prime);
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}

fn lagrange_signed(cf: &CanonicalForm, eta: f64, eta_prime: f64) -> f64 {
    let [t1, t2, t3] = cf.magnitudes;
    let lhs = logit2(eta) / (t1 - (1.0 - 2.0 * eta_prime) * t3);
    let rhs = logit2(eta_prime) / (t2 - (1.0 - 2.0 * eta) * t3);
    lhs - rhs
}

/// Stationary equations of the constrained problem, as left minus right.
///
/// Two-bit channel: the two linear conditions
/// `2(|t₁₁|+|t₃₃|)p₀ = 1 + |t₁₁| − |t₂₂| + |t₃₃| + 2p₂(|t₂₂|−|t₁₁|) + 2p₃(|t₂₂|−|t₃₃|)`,
/// `2(|t₁₁|+|t₃₃|)p₁ = −1 + Σ|t_ii| − 2p₂(|t₂₂|+|t₃₃|) − 2p₃(|t₁₁|+|t₂₂|)`
/// (which together restate normalization and the active constraint), then
/// the Lagrange condition that `ln(p_i/p₀)` is proportional to `c_i`, as the
/// largest deviation from the least-squares fit. Binary channels: the
/// Lagrange cross-ratio condition and `Σ|t_ii| − 1 − 2 f′_noise`.
/// Logarithms of zero give `+∞`.
pub fn stationary_residuals(cf: &CanonicalForm, ch: &impl NoiseModel) -> Result<Vec<f64>> {
    require_negative(cf, "the stationary conditions")?;
    let [t1, t2, t3] = cf.magnitudes;
    let sum = t1 + t2 + t3;
    Ok(match ch.channel() {
        Channel::I(m) => {
            let [p0, p1, p2, p3] = m.p();
            let scale = 2.0 * (t1 + t3);
            let first = scale * p0 - (1.0 + t1 - t2 + t3 + 2.0 * p2 * (t2 - t1) + 2.0 * p3 * (t2 - t3));
            let second = scale * p1 - (-1.0 + sum - 2.0 * p2 * (t2 + t3) - 2.0 * p3 * (t1 + t2));
            vec![first, second, gibbs_residual(cf, &m)]
        }
        Channel::II(m) => {
            vec![
                lagrange_residual(cf, m.eta(), m.eta_prime()),
                constraint_residual(cf, &m),
            ]
        }
    })
}

fn gibbs_residual(cf: &CanonicalForm, m: &NoiseModelI) -> f64 {
    let p = m.p();
    if p.iter().any(|&x| x <= 0.0) {
        return f64::INFINITY;
    }
    let c = penalties(cf);
    let ell: Vec<f64> = (1..4).map(|i| (p[i] / p[0]).ln()).collect();
    let cc: f64 = c[1..].iter().map(|x| x * x).sum();
    if cc == 0.0 {
        return ell.iter().fold(0.0, |acc, x| acc.max(x.abs()));
    }
    let beta = -c[1..].iter().zip(&ell).map(|(ci, l)| ci * l).sum::<f64>() / cc;
    ell.iter()
        .zip(&c[1..])
        .fold(0.0, |acc, (l, ci)| acc.max((l + beta * ci).abs()))
}

/// Smallest cost over the simplex lattice `p = n/steps` satisfying the
/// non-strict constraint, with its channel.
pub fn grid_min_cost_model_i(cf: &CanonicalForm, steps: usize) -> Option<(f64, [f64; 4])> {
    let b = noise_budget(cf);
    let c = penalties(cf);
    let h = 1.0 / steps as f64;
    (0..=steps)
        .into_par_iter()
        .flat_map_iter(|i1| {
            (0..=steps - i1).flat_map(move |i2| {
                (0..=steps - i1 - i2).map(move |i3| {
                    let (p1, p2, p3) = (i1 as f64 * h, i2 as f64 * h, i3 as f64 * h);
                    [(steps - i1 - i2 - i3) as f64 * h, p1, p2, p3]
                })
            })
        })
        .filter(|p| p[1] * c[1] + p[2] * c[2] + p[3] * c[3] <= b)
        .map(|p| {
            let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum();
            (2.0 - h, p)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Smallest cost over the box lattice `η, η′ ∈ ½ + n/(2 steps)` satisfying
/// the non-strict constraint, with its `(η, η′)`.
pub fn grid_min_cost_model_ii(cf: &CanonicalForm, steps: usize) -> Option<(f64, (f64, f64))> {
    let b = noise_budget(cf);
    let [t1, t2, t3] = cf.magnitudes;
    let at = |i: usize| 0.5 + 0.5 * i as f64 / steps as f64;
    (0..=steps)
        .into_par_iter()
        .flat_map_iter(|i| (0..=steps).map(move |j| (at(i), at(j))))
        .filter(|&(u, v)| t1 * (1.0 - u) + t2 * (1.0 - v) + t3 * (u + v - 2.0 * u * v) <= b)
        .map(|(u, v)| (model_ii_cost(u, v), (u, v)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

impl CostSolution {
    /// Fails with [`Error::Infeasible`] unless a channel was found.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            CostStatus::Infeasible => Err(Error::Infeasible(format!(
                "Σ|t_ii| − 1 = {:.6} leaves no room for channel noise",
                self.constraint_residual
            ))),
            _ => Ok(self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NoiseModel;
    use crate::telefid::nonclassical_condition;
    use approx::assert_abs_diff_eq;

    fn cf(m: [f64; 3]) -> CanonicalForm {
        CanonicalForm::negative_branch(m)
    }

    #[test]
    fn bell_model_i_solution_is_closed_form() {
        let sol = min_cost_model_i(&cf([1.0, 1.0, 1.0])).unwrap();
        assert_eq!(sol.status, CostStatus::Solved);
        let p = sol.channel.model_i().p();
        for (got, want) in p.iter().zip([0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(sol.cost < 2.0);
        let want = 2.0 + 0.5 * 0.5f64.log2() + 0.5 * (1.0f64 / 6.0).log2();
        assert_abs_diff_eq!(sol.cost, want, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_when_correlations_too_weak() {
        let weak = cf([0.4, 0.3, 0.2]);
        assert_eq!(min_cost_model_i(&weak).unwrap().status, CostStatus::Infeasible);
        assert_eq!(min_cost_model_ii(&weak).unwrap().status, CostStatus::Infeasible);
        assert!(matches!(
            min_cost_model_i(&weak).unwrap().into_result(),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn requires_negative_determinant() {
        let positive = CanonicalForm::from_diagonal(
            nalgebra::Vector3::new(0.5, 0.5, 0.5),
            nalgebra::Vector3::zeros(),
            nalgebra::Vector3::zeros(),
        );
        assert!(matches!(min_cost_model_i(&positive), Err(Error::NotApplicable(_))));
        assert!(matches!(min_cost_model_ii(&positive), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn model_i_residuals_vanish_at_solution() {
        let state = cf([1.0, 0.6, 0.6]);
        let sol = min_cost_model_i(&state).unwrap();
        assert_eq!(sol.status, CostStatus::Solved);
        for r in &sol.stationary_residuals {
            assert!(r.abs() <= 1e-6, "{r}");
        }
        assert!(sol.constraint_residual >= -1e-9 && sol.constraint_residual.abs() < 1e-9);
        let (_, f) = nonclassical_condition(&state, &sol.channel).unwrap();
        assert_abs_diff_eq!(f, 0.6, epsilon = 1e-9);
    }

    #[test]
    fn model_ii_bell_solution_is_symmetric() {
        let sol = min_cost_model_ii(&cf([1.0, 1.0, 1.0])).unwrap();
        assert_eq!(sol.status, CostStatus::Solved);
        let Channel::II(m) = sol.channel else { panic!() };
        assert_abs_diff_eq!(m.eta(), m.eta_prime(), epsilon = 1e-9);
        assert_abs_diff_eq!(m.eta(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
        for r in &sol.stationary_residuals {
            assert!(r.abs() <= 1e-6, "{r}");
        }
    }

    #[test]
    fn model_ii_asymmetric_magnitudes() {
        let sol = min_cost_model_ii(&cf([1.0, 0.6, 0.6])).unwrap();
        assert_eq!(sol.status, CostStatus::Solved);
        let Channel::II(m) = sol.channel else { panic!() };
        assert!((m.eta() - m.eta_prime()).abs() > 1e-3);
        for r in &sol.stationary_residuals {
            assert!(r.abs() <= 1e-6, "{r}");
        }
    }

    #[test]
    fn symmetric_configuration_has_zero_cross_ratio() {
        let r = stationary_residuals(&cf([0.8, 0.8, 0.5]), &NoiseModelII::new(0.9, 0.9).unwrap()).unwrap();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-15);
        let corner = stationary_residuals(&cf([0.8, 0.8, 0.5]), &NoiseModelII::new(1.0, 0.9).unwrap()).unwrap();
        assert_eq!(corner[0], f64::INFINITY);
        let edge = stationary_residuals(&cf([0.8, 0.8, 0.5]), &NoiseModelI::noiseless()).unwrap();
        assert_eq!(edge[2], f64::INFINITY);
    }

    #[test]
    fn solvers_beat_coarse_grids() {
        for m in [[1.0, 0.6, 0.6], [0.9, 0.7, 0.3], [1.0, 1.0, 1.0], [0.5, 0.45, 0.3]] {
            let state = cf(m);
            let one = min_cost_model_i(&state).unwrap();
            let (grid_one, _) = grid_min_cost_model_i(&state, 60).unwrap();
            assert!(one.cost <= grid_one + 1e-9);
            let two = min_cost_model_ii(&state).unwrap();
            let (grid_two, _) = grid_min_cost_model_ii(&state, 200).unwrap();
            assert!(two.cost <= grid_two + 1e-9);
            assert!(two.channel.model_i().mutual_information() >= one.cost - 1e-9);
        }
    }
}

//! Noisy classical channels carrying Alice's two measurement bits.
//!
//! Model I is a single two-bit channel with four error patterns:
//! `p₀` no error, `p₁` first bit flipped, `p₂` second bit flipped, `p₃` both
//! flipped. Model II is two independent binary channels that deliver each bit
//! correctly with probabilities `η` and `η′`.

use rand::Rng;

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// A two-bit message `ab`, stored with `a` as bit 1 and `b` as bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Message(pub u8);

impl Message {
    pub fn new(first: bool, second: bool) -> Self {
        Message(u8::from(first) << 1 | u8::from(second))
    }

    pub fn first(self) -> bool {
        self.0 & 0b10 != 0
    }

    pub fn second(self) -> bool {
        self.0 & 0b01 != 0
    }

    /// The message as received after error pattern `i` (0..4).
    pub fn with_error(self, pattern: usize) -> Self {
        Message(self.0 ^ ERROR_MASK[pattern])
    }
}

impl std::fmt::Display for Message {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", u8::from(self.first()), u8::from(self.second()))
    }
}

/// XOR masks of the error patterns: none, first bit, second bit, both.
const ERROR_MASK: [u8; 4] = [0b00, 0b10, 0b01, 0b11];
/// Bits sent for Bell outcomes 0..4.
const OUTCOME_CODE: [u8; 4] = [0b00, 0b11, 0b01, 0b10];

pub fn encode_outcome(k: usize) -> Message {
    Message(OUTCOME_CODE[k])
}

pub fn decode_message(m: Message) -> usize {
    OUTCOME_CODE
        .iter()
        .position(|&c| c == m.0 & 0b11)
        .expect("every two-bit word encodes an outcome")
}

/// The outcome Bob infers when Alice obtained `k` and error pattern `i` hit.
pub fn received_outcome(k: usize, pattern: usize) -> usize {
    decode_message(encode_outcome(k).with_error(pattern))
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    -xlog2x(x) - xlog2x(1.0 - x)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModelI {
    p: [f64; 4],
}

impl NoiseModelI {
    /// Validates to 1e-12 and renormalizes exactly.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if let Some(i) = p.iter().position(|x| !x.is_finite() || *x < -PROB_TOL) {
            return Err(Error::InvalidChannel(format!("p{i} = {} is negative", p[i])));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {total}, not 1")));
        }
        let p = p.map(|x| x.max(0.0));
        let total: f64 = p.iter().sum();
        Ok(Self {
            p: p.map(|x| x / total),
        })
    }

    pub fn noiseless() -> Self {
        Self {
            p: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    pub fn p(&self) -> [f64; 4] {
        self.p
    }

    /// Conveyed information `2 + Σ pᵢ log₂ pᵢ` in bits.
    pub fn mutual_information(&self) -> f64 {
        (2.0 + self.p.iter().map(|&x| xlog2x(x)).sum::<f64>()).clamp(0.0, 2.0)
    }

    /// Index of the largest probability, if it is strictly larger than the rest.
    pub fn strictly_dominant(&self) -> Option<usize> {
        let i = self.dominant();
        (0..4).all(|j| j == i || self.p[j] < self.p[i]).then_some(i)
    }

    /// First index attaining the largest probability.
    pub fn dominant(&self) -> usize {
        (0..4).fold(0, |best, j| if self.p[j] > self.p[best] { j } else { best })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModelII {
    eta: f64,
    eta_prime: f64,
}

impl NoiseModelII {
    pub fn new(eta: f64, eta_prime: f64) -> Result<Self> {
        for (name, v) in [("eta", eta), ("eta'", eta_prime)] {
            if !(0.5..=1.0).contains(&v) {
                return Err(Error::InvalidChannel(format!("{name} = {v} outside [1/2, 1]")));
            }
        }
        Ok(Self { eta, eta_prime })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_prime(&self) -> f64 {
        self.eta_prime
    }

    /// The equivalent Model I channel.
    pub fn to_model_i(&self) -> NoiseModelI {
        let (e, f) = (self.eta, self.eta_prime);
        NoiseModelI {
            p: [e * f, (1.0 - e) * f, e * (1.0 - f), (1.0 - e) * (1.0 - f)],
        }
    }

    /// Information conveyed by each binary channel, `1 − H(η)` and `1 − H(η′)`.
    pub fn mutual_information(&self) -> (f64, f64) {
        (1.0 - binary_entropy(self.eta), 1.0 - binary_entropy(self.eta_prime))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    I(NoiseModelI),
    II(NoiseModelII),
}

impl Channel {
    pub fn as_model_i(&self) -> NoiseModelI {
        match self {
            Channel::I(ch) => *ch,
            Channel::II(ch) => ch.to_model_i(),
        }
    }

    /// Total conveyed information in bits.
    pub fn mutual_information(&self) -> f64 {
        match self {
            Channel::I(ch) => ch.mutual_information(),
            Channel::II(ch) => {
                let (a, b) = ch.mutual_information();
                a + b
            }
        }
    }
}

impl From<NoiseModelI> for Channel {
    fn from(ch: NoiseModelI) -> Self {
        Channel::I(ch)
    }
}

impl From<NoiseModelII> for Channel {
    fn from(ch: NoiseModelII) -> Self {
        Channel::II(ch)
    }
}

/// Anything that reduces to the four error-pattern probabilities.
pub trait NoiseModel {
    fn model_i(&self) -> NoiseModelI;
    fn channel(&self) -> Channel;
}

impl NoiseModel for NoiseModelI {
    fn model_i(&self) -> NoiseModelI {
        *self
    }

    fn channel(&self) -> Channel {
        Channel::I(*self)
    }
}

impl NoiseModel for NoiseModelII {
    fn model_i(&self) -> NoiseModelI {
        self.to_model_i()
    }

    fn channel(&self) -> Channel {
        Channel::II(*self)
    }
}

impl NoiseModel for Channel {
    fn model_i(&self) -> NoiseModelI {
        self.as_model_i()
    }

    fn channel(&self) -> Channel {
        *self
    }
}

/// Draws the error pattern index (0..4) according to `p`.
pub fn sample_pattern<R: Rng + ?Sized>(ch: &NoiseModelI, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in ch.p.iter().enumerate().take(3) {
        acc += p;
        if u < acc {
            return i;
        }
    }
    3
}

/// One use of the channel.
pub fn sample_transition<R: Rng + ?Sized>(ch: &NoiseModelI, sent: Message, rng: &mut R) -> Message {
    sent.with_error(sample_pattern(ch, rng))
}

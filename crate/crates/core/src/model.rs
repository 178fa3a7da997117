//! Priors, state sampling, and forward evaluation of the noiseless OR
//! test model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::PoolingGraph;

/// Per-object positivity priors `q[j] = P(S_j = 1)`.
///
/// Every prior must lie strictly inside (0, 1); certainty is expressed
/// structurally (forced-negative status in reports), never through
/// boundary priors that would put ±∞ into the arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    q: Vec<f64>,
}

impl PriorVector {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        for (j, &p) in q.iter().enumerate() {
            if !p.is_finite() || p <= 0.0 || p >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "prior q[{j}] = {p} must lie strictly inside (0, 1)"
                )));
            }
        }
        Ok(Self { q })
    }

    /// Same prior for every object.
    pub fn uniform(len: usize, q: f64) -> Result<Self> {
        Self::new(vec![q; len])
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// P(S_j = 1).
    pub fn p_one(&self, j: usize) -> f64 {
        self.q[j]
    }

    /// P(S_j = 0).
    pub fn p_zero(&self, j: usize) -> f64 {
        1.0 - self.q[j]
    }

    /// P(S_j = b).
    pub fn prob(&self, j: usize, b: u8) -> f64 {
        if b == 1 {
            self.q[j]
        } else {
            1.0 - self.q[j]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    /// Restriction to the listed objects, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            q: keep.iter().map(|&j| self.q[j]).collect(),
        }
    }
}

/// Binary test outcomes, one bit per test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    results: Vec<u8>,
}

impl Observation {
    pub fn new(results: Vec<u8>) -> Result<Self> {
        validate_bits(&results)?;
        Ok(Self { results })
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.results[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.results
    }
}

/// One bit of state per object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    states: Vec<u8>,
}

impl StateVector {
    pub fn new(states: Vec<u8>) -> Result<Self> {
        validate_bits(&states)?;
        Ok(Self { states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn bit(&self, j: usize) -> u8 {
        self.states[j]
    }

    pub fn bits(&self) -> &[u8] {
        &self.states
    }
}

fn validate_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(i) => Err(Error::InvalidParameter(format!(
            "bit {i} has value {}, expected 0 or 1",
            bits[i]
        ))),
        None => Ok(()),
    }
}

/// Samples object states independently from the priors.
///
/// The generator is a ChaCha8 stream keyed by `seed`, so results are
/// reproducible across platforms; the seed is part of the external
/// contract.
pub fn sample_states(priors: &PriorVector, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = (0..priors.len())
        .map(|j| u8::from(rng.random_bool(priors.p_one(j))))
        .collect();
    StateVector { states }
}

/// Evaluates every test on the given states: `t_i = 1` iff some member
/// of group i is positive.
pub fn run_tests(graph: &PoolingGraph, states: &StateVector) -> Result<Observation> {
    if states.len() != graph.num_objects() {
        return Err(Error::LengthMismatch {
            context: "states vs graph objects",
            expected: graph.num_objects(),
            actual: states.len(),
        });
    }
    let results = graph
        .groups()
        .iter()
        .map(|group| u8::from(group.iter().any(|&j| states.bit(j) == 1)))
        .collect();
    Ok(Observation { results })
}

/// Logical OR of a bit list; the empty disjunction is 0.
pub fn or_fn(bits: &[u8]) -> u8 {
    u8::from(bits.contains(&1))
}

/// Boolean equality: 1 iff all inputs agree (vacuously 1 when empty).
pub fn eq_fn(bits: &[u8]) -> u8 {
    u8::from(bits.windows(2).all(|w| w[0] == w[1]))
}

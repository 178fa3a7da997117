//! Brute-force exact posterior computation.
//!
//! Two independent evaluation routes over the reduced problem: a direct
//! sum over all 2^n object states, and a finer factorization that gives
//! every test/object edge its own binary variable tied together by
//! equality factors. Both are deliberately naive — they exist as ground
//! truth for the dual engine, so clarity beats speed. Enumeration order
//! is the ascending integer bitmask, which makes results bit-for-bit
//! reproducible.

use crate::error::{Error, Result};
use crate::graph::ReducedProblem;
use crate::sum::NeumaierSum;

/// Size caps for the exhaustive oracles. Caps are configuration rather
/// than constants so tests can probe the limits; defaults keep the
/// oracle under ~10 s on desktop hardware.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Maximum kept-object count for the direct 2^n enumeration.
    pub max_objects: usize,
    /// Maximum total summation bits (objects + edges) for the finer
    /// factorization.
    pub max_state_bits: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            max_objects: 20,
            max_state_bits: 24,
        }
    }
}

fn check_bit(b: u8) -> Result<()> {
    if b > 1 {
        return Err(Error::InvalidParameter(format!(
            "bit argument must be 0 or 1, got {b}"
        )));
    }
    Ok(())
}

fn check_object(rp: &ReducedProblem, ell: usize) -> Result<()> {
    if ell >= rp.n() {
        return Err(Error::InvalidParameter(format!(
            "object index {ell} out of range for {} kept objects",
            rp.n()
        )));
    }
    Ok(())
}

fn check_enumeration_size(bits: usize, cap: usize, what: &str) -> Result<()> {
    if bits > cap {
        return Err(Error::ProblemTooLarge(format!(
            "{what} needs {bits} summation bits, cap is {cap}"
        )));
    }
    // Never shift a u64 by its full width even if the cap was raised.
    if bits >= 62 {
        return Err(Error::ProblemTooLarge(format!(
            "{what} needs {bits} summation bits, enumeration limit is 61"
        )));
    }
    Ok(())
}

/// Bitmask per test: set bits are the members of alpha(i).
fn test_masks(rp: &ReducedProblem) -> Vec<u64> {
    (0..rp.m())
        .map(|i| rp.alpha(i).iter().fold(0u64, |m, &j| m | (1u64 << j)))
        .collect()
}

/// Unnormalized posterior mass for kept object `ell` taking value `b`,
/// by direct summation over all object states: every state consistent
/// with the positive tests contributes its prior probability.
pub fn naive_posterior_value(
    rp: &ReducedProblem,
    ell: usize,
    b: u8,
    opts: &OracleOptions,
) -> Result<f64> {
    check_object(rp, ell)?;
    check_bit(b)?;
    check_enumeration_size(rp.n(), opts.max_objects, "direct enumeration")?;

    let n = rp.n();
    let masks = test_masks(rp);
    let p = rp.priors();
    let mut acc = NeumaierSum::new();
    for x in 0u64..(1u64 << n) {
        if (x >> ell) & 1 != u64::from(b) {
            continue;
        }
        if masks.iter().any(|&m| x & m == 0) {
            continue;
        }
        let mut weight = 1.0;
        for j in 0..n {
            weight *= p.prob(j, ((x >> j) & 1) as u8);
        }
        acc.add(weight);
    }
    Ok(acc.value())
}

/// Same quantity via the finer factorization: each edge (test i, member
/// j) carries its own bit, each test ORs its edge bits, and each object
/// j carries a bit u_j that an equality factor ties to all of j's edge
/// copies, weighted by the prior (and pinned to `b` for the pivot).
/// Collapsing the equalities recovers the direct form, so the two
/// routes must agree to round-off.
pub fn finer_posterior_value(
    rp: &ReducedProblem,
    ell: usize,
    b: u8,
    opts: &OracleOptions,
) -> Result<f64> {
    check_object(rp, ell)?;
    check_bit(b)?;

    let n = rp.n();
    // Edge bits live above the n object bits, ordered by (test, member).
    let mut edge_bits_of_test: Vec<Vec<usize>> = Vec::with_capacity(rp.m());
    let mut edge_bits_of_object: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut next = n;
    for i in 0..rp.m() {
        let mut bits = Vec::with_capacity(rp.alpha(i).len());
        for &j in rp.alpha(i) {
            bits.push(next);
            edge_bits_of_object[j].push(next);
            next += 1;
        }
        edge_bits_of_test.push(bits);
    }
    let total_bits = next;
    check_enumeration_size(total_bits, opts.max_state_bits, "finer enumeration")?;

    let p = rp.priors();
    let mut acc = NeumaierSum::new();
    'state: for x in 0u64..(1u64 << total_bits) {
        for bits in &edge_bits_of_test {
            if bits.iter().all(|&k| (x >> k) & 1 == 0) {
                continue 'state;
            }
        }
        let mut weight = 1.0;
        for (j, edge_bits) in edge_bits_of_object.iter().enumerate() {
            let u = ((x >> j) & 1) as u8;
            if edge_bits.iter().any(|&k| ((x >> k) & 1) as u8 != u) {
                continue 'state;
            }
            if j == ell && u != b {
                continue 'state;
            }
            weight *= p.prob(j, u);
        }
        acc.add(weight);
    }
    Ok(acc.value())
}

/// Posterior-value pairs (a0, a1) for every kept object in one pass
/// over the 2^n states.
pub fn naive_all_posteriors(rp: &ReducedProblem, opts: &OracleOptions) -> Result<Vec<(f64, f64)>> {
    check_enumeration_size(rp.n(), opts.max_objects, "direct enumeration")?;

    let n = rp.n();
    let masks = test_masks(rp);
    let p = rp.priors();
    let mut acc = vec![(NeumaierSum::new(), NeumaierSum::new()); n];
    for x in 0u64..(1u64 << n) {
        if masks.iter().any(|&m| x & m == 0) {
            continue;
        }
        let mut weight = 1.0;
        for j in 0..n {
            weight *= p.prob(j, ((x >> j) & 1) as u8);
        }
        for (j, pair) in acc.iter_mut().enumerate() {
            if (x >> j) & 1 == 0 {
                pair.0.add(weight);
            } else {
                pair.1.add(weight);
            }
        }
    }
    let out: Vec<(f64, f64)> = acc
        .into_iter()
        .map(|(a0, a1)| (a0.value(), a1.value()))
        .collect();
    if let Some(&(a0, a1)) = out.first() {
        // A successful reduce always leaves at least one feasible state.
        if a0 + a1 == 0.0 {
            return Err(Error::ZeroEvidence);
        }
    }
    Ok(out)
}

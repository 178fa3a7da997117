//! Numeric verifiers for the identities the dual engine rests on.
//!
//! The engine's correctness reduces to three local facts about a pair
//! of 2×2 integer tables θ and η: contracting them yields equality
//! (the duality condition), pushing an OR factor through θ yields a
//! skewed equality function, and absorbing an equality node, its prior
//! weight, and incident η nodes yields the closed-form Δ factor. Each
//! fact is checked by exhaustive enumeration — in integer arithmetic
//! wherever the tables allow — rather than symbolically; at these sizes
//! enumeration is equally conclusive and much simpler.
//!
//! Checkers come in pairs: a zero-argument form bound to the standard
//! tables and a `_with` form taking an explicit [`LocalTransform`],
//! used as a negative control (a corrupted table must fail).

use crate::dual::{delta, sign_factor, DualOptions, DualWorkspace};
use crate::error::{Error, Result};
use crate::graph::{build_pooling_graph, reduce};
use crate::model::{Observation, PriorVector};

/// The θ/η table pair, indexed `[first argument][second argument]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTransform {
    pub theta: [[i64; 2]; 2],
    pub eta: [[i64; 2]; 2],
}

impl LocalTransform {
    /// The standard pair: θ = [[0,−1],[1,1]], η = [[1,1],[−1,0]].
    pub fn standard() -> Self {
        Self {
            theta: [[0, -1], [1, 1]],
            eta: [[1, 1], [-1, 0]],
        }
    }
}

impl Default for LocalTransform {
    fn default() -> Self {
        Self::standard()
    }
}

fn eq2(x: u8, w: u8) -> i64 {
    i64::from(x == w)
}

/// Σ_y θ(x,y)·η(y,w) = EQ(x,w) for all four (x,w) pairs, exactly.
pub fn check_duality_with(t: &LocalTransform) -> bool {
    for x in 0..2u8 {
        for w in 0..2u8 {
            let contraction: i64 = (0..2)
                .map(|y| t.theta[x as usize][y] * t.eta[y][w as usize])
                .sum();
            if contraction != eq2(x, w) {
                return false;
            }
        }
    }
    true
}

pub fn check_duality() -> bool {
    check_duality_with(&LocalTransform::standard())
}

/// Skewed equality: (−1)^{y_1·(r+1)}·EQ(y_1,…,y_r). Equality of all
/// bits, with the sign flipped exactly when y_1 = 1 and r is even.
pub fn seq(y: &[u8]) -> Result<i64> {
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (idx, &bit) in y.iter().enumerate() {
        if bit > 1 {
            return Err(Error::InvalidParameter(format!(
                "y[{idx}] must be 0 or 1, got {bit}"
            )));
        }
    }
    if y.windows(2).any(|pair| pair[0] != pair[1]) {
        return Ok(0);
    }
    let r = y.len();
    let exponent = (y[0] as usize) * (r + 1);
    Ok(if exponent.is_multiple_of(2) { 1 } else { -1 })
}

fn check_r(r: usize, max: usize) -> Result<()> {
    if r == 0 || r > max {
        return Err(Error::InvalidParameter(format!(
            "arity {r} out of supported range [1, {max}]"
        )));
    }
    Ok(())
}

fn mask_bits(mask: u64, r: usize) -> Vec<u8> {
    (0..r).map(|k| ((mask >> k) & 1) as u8).collect()
}

/// For every y ∈ {0,1}^r: Σ_x OR(x)·Π_i θ(x_i,y_i) equals seq(y),
/// in exact integer arithmetic.
pub fn check_seq_lemma_with(r: usize, t: &LocalTransform) -> Result<bool> {
    check_r(r, 10)?;
    for y_mask in 0u64..(1 << r) {
        let mut lhs: i64 = 0;
        // x = 0 is excluded by the OR factor
        for x_mask in 1u64..(1 << r) {
            let mut product: i64 = 1;
            for k in 0..r {
                let x_k = ((x_mask >> k) & 1) as usize;
                let y_k = ((y_mask >> k) & 1) as usize;
                product *= t.theta[x_k][y_k];
            }
            lhs += product;
        }
        if lhs != seq(&mask_bits(y_mask, r))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn check_seq_lemma(r: usize) -> Result<bool> {
    check_seq_lemma_with(r, &LocalTransform::standard())
}

/// Closed-form Δ of arity r: the branch structure the dual engine uses,
/// written out directly for comparison against the contraction.
fn closed_delta(y: &[u8], pivot: bool, b: u8, q: f64) -> f64 {
    let weight: u32 = y.iter().map(|&bit| u32::from(bit)).sum();
    let parity = if weight.is_multiple_of(2) { 1.0 } else { -1.0 };
    let p0 = 1.0 - q;
    if !pivot {
        if weight == 0 {
            1.0
        } else {
            parity * p0
        }
    } else if weight == 0 {
        if b == 0 {
            p0
        } else {
            q
        }
    } else if b == 0 {
        parity * p0
    } else {
        0.0
    }
}

/// For every y ∈ {0,1}^r: contracting an equality node over (u, w),
/// the prior weight φ(u) (pinned to b on the pivot), and one η per
/// edge reproduces the closed-form Δ to ≤1e−14.
pub fn check_delta_lemma_with(
    r: usize,
    j_is_pivot: bool,
    b: u8,
    prior_q: f64,
    t: &LocalTransform,
) -> Result<bool> {
    check_r(r, 8)?;
    if b > 1 {
        return Err(Error::InvalidParameter(format!(
            "bit argument must be 0 or 1, got {b}"
        )));
    }
    if !(prior_q > 0.0 && prior_q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "prior {prior_q} must lie strictly inside (0, 1)"
        )));
    }
    let phi = |u: u8| -> f64 {
        let mass = if u == 0 { 1.0 - prior_q } else { prior_q };
        if j_is_pivot && u != b {
            0.0
        } else {
            mass
        }
    };
    for y_mask in 0u64..(1 << r) {
        let y = mask_bits(y_mask, r);
        let mut lhs = 0.0;
        for u in 0..2u8 {
            for w_mask in 0u64..(1 << r) {
                let equal_all = (0..r).all(|k| ((w_mask >> k) & 1) as u8 == u);
                if !equal_all {
                    continue;
                }
                let mut eta_product: i64 = 1;
                for (k, &y_k) in y.iter().enumerate() {
                    let w_k = ((w_mask >> k) & 1) as usize;
                    eta_product *= t.eta[y_k as usize][w_k];
                }
                lhs += phi(u) * eta_product as f64;
            }
        }
        let rhs = closed_delta(&y, j_is_pivot, b, prior_q);
        if (lhs - rhs).abs() > 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn check_delta_lemma(r: usize, j_is_pivot: bool, b: u8, prior_q: f64) -> Result<bool> {
    check_delta_lemma_with(r, j_is_pivot, b, prior_q, &LocalTransform::standard())
}

/// Reconstructs the worked 3-object/2-test instance (groups {0,1} and
/// {1,2}, all priors 0.1, both tests positive, pivot object 1) and
/// checks every Δ-product row, the sign column, and the two posterior
/// values against their hand-computed constants. Returns one line per
/// mismatch; empty means pass.
pub fn worked_example_mismatches() -> Vec<String> {
    let mut mismatches = Vec::new();
    let mut check = |label: &str, got: f64, want: f64, tol: f64| {
        if (got - want).abs() > tol {
            mismatches.push(format!("{label}: got {got}, expected {want}"));
        }
    };

    let graph = build_pooling_graph(3, vec![vec![0, 1], vec![1, 2]]).expect("valid fixed graph");
    let priors = PriorVector::uniform(3, 0.1).expect("valid fixed priors");
    let observation = Observation::new(vec![1, 1]).expect("valid fixed observation");
    let rp = match reduce(&graph, &observation, &priors) {
        Ok(rp) => rp,
        Err(e) => return vec![format!("reduction failed: {e}")],
    };
    let ws = match DualWorkspace::new(&rp, &DualOptions::default()) {
        Ok(ws) => ws,
        Err(e) => return vec![format!("workspace construction failed: {e}")],
    };

    // (w_0, w_1, Δ-product for b=0, Δ-product for b=1, sign)
    let rows: [(u8, u8, f64, f64, f64); 4] = [
        (0, 0, 0.9, 0.1, 1.0),
        (1, 0, 0.81, 0.0, -1.0),
        (0, 1, 0.81, 0.0, -1.0),
        (1, 1, 0.729, 0.0, 1.0),
    ];
    let pivot = 1usize;
    for (w0, w1, want0, want1, want_sign) in rows {
        let w = u64::from(w0) | (u64::from(w1) << 1);
        for (b, want) in [(0u8, want0), (1u8, want1)] {
            let mut product = 1.0;
            for j in 0..rp.n() {
                let y: Vec<u8> = rp.beta(j).iter().map(|&i| ((w >> i) & 1) as u8).collect();
                product *= delta(&rp, j, pivot, b, &y).expect("valid delta arguments");
            }
            check(
                &format!("row w=({w0},{w1}) b={b} product"),
                product,
                want,
                1e-15,
            );
        }
        check(
            &format!("row w=({w0},{w1}) sign"),
            sign_factor(&ws, w),
            want_sign,
            0.0,
        );
    }

    match crate::dual::dual_all_posteriors_fast(&rp, &DualOptions::default()) {
        Ok(all) => {
            check("a0 of pivot", all[pivot].0, 0.009, 1e-12);
            check("a1 of pivot", all[pivot].1, 0.1, 1e-12);
        }
        Err(e) => mismatches.push(format!("dual evaluation failed: {e}")),
    }
    mismatches
}

pub fn check_worked_example() -> bool {
    worked_example_mismatches().is_empty()
}

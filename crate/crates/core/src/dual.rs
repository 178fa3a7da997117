//! Dual evaluation of posterior values: a signed sum of 2^m terms over
//! test-side binary variables instead of the oracle's 2^n object-side
//! sum.
//!
//! Each term is a sign factor times a product of per-object Δ values,
//! where Δ depends only on the bits of w incident to that object. The
//! per-query route costs O(n·2^m); the all-objects fast path shares the
//! leave-one-out products via prefix/suffix arrays for O(n·2^m) total.
//!
//! Terms carry alternating signs and nearly cancel (the worked
//! instance sums 0.9 − 0.81 − 0.81 + 0.729), so every accumulator is
//! compensated and the summation order is pinned: w ascending, with a
//! fixed chunk partition whose partial sums merge in ascending chunk
//! order no matter how many workers ran them. Precision still degrades
//! for very large m; the oracle bounds the scale at which results are
//! cross-checked.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::graph::ReducedProblem;
use crate::sum::NeumaierSum;

/// Engine configuration. The test cap bounds the 2^m summation;
/// `workers` partitions the w-space without changing the result.
#[derive(Debug, Clone)]
pub struct DualOptions {
    /// Maximum kept-test count m (summation is over 2^m terms).
    pub max_tests: usize,
    /// Worker threads for the w-space partition; 0 and 1 both mean
    /// in-line evaluation. Results are byte-identical for any value.
    pub workers: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            max_tests: 28,
            workers: 1,
        }
    }
}

/// Precomputed per-instance tables for the dual sum: sign exponents
/// (#α(i)+1 mod 2) folded into a single parity mask, per-object
/// incidence masks over the m test bits, and the prior values each Δ
/// draws from.
#[derive(Debug, Clone)]
pub struct DualWorkspace {
    m: usize,
    sign_exponents: Vec<u8>,
    sign_mask: u64,
    beta_masks: Vec<u64>,
    p0: Vec<f64>,
    p1: Vec<f64>,
}

impl DualWorkspace {
    pub fn new(rp: &ReducedProblem, opts: &DualOptions) -> Result<Self> {
        let m = rp.m();
        if m > opts.max_tests {
            return Err(Error::ProblemTooLarge(format!(
                "dual sum needs {m} test bits, cap is {}",
                opts.max_tests
            )));
        }
        if m >= 62 {
            return Err(Error::ProblemTooLarge(format!(
                "dual sum needs {m} test bits, enumeration limit is 61"
            )));
        }
        let mut sign_exponents = Vec::with_capacity(m);
        let mut sign_mask = 0u64;
        for i in 0..m {
            let e = ((rp.alpha(i).len() + 1) % 2) as u8;
            sign_exponents.push(e);
            if e == 1 {
                sign_mask |= 1u64 << i;
            }
        }
        let beta_masks = (0..rp.n())
            .map(|j| rp.beta(j).iter().fold(0u64, |mask, &i| mask | (1u64 << i)))
            .collect();
        let p = rp.priors();
        Ok(Self {
            m,
            sign_exponents,
            sign_mask,
            beta_masks,
            p0: (0..rp.n()).map(|j| p.p_zero(j)).collect(),
            p1: (0..rp.n()).map(|j| p.p_one(j)).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sign_exponents(&self) -> &[u8] {
        &self.sign_exponents
    }

    pub fn beta_mask(&self, j: usize) -> u64 {
        self.beta_masks[j]
    }
}

fn parity_sign(mask: u64) -> f64 {
    if mask.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the w-th dual term: Π_i (−1)^{w_i·(#α(i)+1)}.
pub fn sign_factor(ws: &DualWorkspace, w: u64) -> f64 {
    debug_assert!(w < (1u64 << ws.m));
    parity_sign(w & ws.sign_mask)
}

/// Per-object Δ factor, evaluated on the bits y of w incident to
/// object j (possibly none, in which case the all-zero branch applies
/// vacuously).
///
/// Off-pivot: 1 on all-zero y, else (−1)^{Σy}·P_j(0). On the pivot
/// (j = ℓ): P_j(b) on all-zero y; off all-zero it survives only for
/// b = 0, as (−1)^{Σy}·P_j(0).
pub fn delta(rp: &ReducedProblem, j: usize, ell: usize, b: u8, y: &[u8]) -> Result<f64> {
    for (idx, &bit) in y.iter().enumerate() {
        if bit > 1 {
            return Err(Error::InvalidParameter(format!(
                "y[{idx}] must be 0 or 1, got {bit}"
            )));
        }
    }
    if b > 1 {
        return Err(Error::InvalidParameter(format!(
            "bit argument must be 0 or 1, got {b}"
        )));
    }
    if j >= rp.n() || ell >= rp.n() {
        return Err(Error::InvalidParameter(format!(
            "object index out of range for {} kept objects",
            rp.n()
        )));
    }
    if y.len() != rp.beta(j).len() {
        return Err(Error::LengthMismatch {
            context: "y vs beta(j)",
            expected: rp.beta(j).len(),
            actual: y.len(),
        });
    }
    let weight: u32 = y.iter().map(|&bit| u32::from(bit)).sum();
    let parity = if weight.is_multiple_of(2) { 1.0 } else { -1.0 };
    let p = rp.priors();
    let value = if j != ell {
        if weight == 0 {
            1.0
        } else {
            parity * p.p_zero(j)
        }
    } else if weight == 0 {
        p.prob(j, b)
    } else if b == 0 {
        parity * p.p_zero(j)
    } else {
        0.0
    };
    Ok(value)
}

/// Splits `len` items into at most 256 contiguous chunks. The partition
/// depends only on `len`, never on the worker count, so partial sums
/// always merge in the same order with the same boundaries.
fn chunk_bounds(len: u64, chunks: u64, c: u64) -> (u64, u64) {
    let lo = ((len as u128 * c as u128) / chunks as u128) as u64;
    let hi = ((len as u128 * (c + 1) as u128) / chunks as u128) as u64;
    (lo, hi)
}

/// Runs `compute` over every chunk of `0..len` and feeds the partial
/// results to `merge` in ascending chunk order. With more than one
/// worker the chunks are claimed from a shared counter, but each chunk
/// is still evaluated by the same sequential code and merged in the
/// same order, so the result is byte-identical for any worker count.
fn accumulate_chunked<P: Send>(
    len: u64,
    workers: usize,
    compute: impl Fn(u64, u64) -> P + Sync,
    mut merge: impl FnMut(P),
) {
    let chunks = len.clamp(1, 256);
    if workers <= 1 {
        for c in 0..chunks {
            let (lo, hi) = chunk_bounds(len, chunks, c);
            merge(compute(lo, hi));
        }
        return;
    }
    let next = AtomicU64::new(0);
    let compute = &compute;
    let next_ref = &next;
    let mut collected: Vec<(u64, P)> = Vec::with_capacity(chunks as usize);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers.min(chunks as usize))
            .map(|_| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    loop {
                        let c = next_ref.fetch_add(1, Ordering::Relaxed);
                        if c >= chunks {
                            break;
                        }
                        let (lo, hi) = chunk_bounds(len, chunks, c);
                        out.push((c, compute(lo, hi)));
                    }
                    out
                })
            })
            .collect();
        for handle in handles {
            collected.extend(handle.join().expect("dual worker panicked"));
        }
    });
    collected.sort_by_key(|&(c, _)| c);
    for (_, partial) in collected {
        merge(partial);
    }
}

fn dual_value_with(ws: &DualWorkspace, ell: usize, b: u8, workers: usize) -> f64 {
    let n = ws.beta_masks.len();
    let len = 1u64 << ws.m;
    let mut acc = NeumaierSum::new();
    accumulate_chunked(
        len,
        workers,
        |lo, hi| {
            let mut part = NeumaierSum::new();
            for w in lo..hi {
                let yb = w & ws.beta_masks[ell];
                let pivot = if yb == 0 {
                    if b == 0 {
                        ws.p0[ell]
                    } else {
                        ws.p1[ell]
                    }
                } else if b == 1 {
                    // pivot Δ vanishes off the all-zero branch for b=1
                    continue;
                } else {
                    parity_sign(yb) * ws.p0[ell]
                };
                let mut term = parity_sign(w & ws.sign_mask) * pivot;
                for j in 0..n {
                    if j == ell {
                        continue;
                    }
                    let yj = w & ws.beta_masks[j];
                    if yj != 0 {
                        term *= parity_sign(yj) * ws.p0[j];
                    }
                }
                part.add(term);
            }
            part
        },
        |part| acc.merge(part),
    );
    acc.value()
}

/// Posterior value of kept object `ell` at bit `b` by the dual sum.
pub fn dual_posterior_value(
    rp: &ReducedProblem,
    ell: usize,
    b: u8,
    opts: &DualOptions,
) -> Result<f64> {
    if ell >= rp.n() {
        return Err(Error::InvalidParameter(format!(
            "object index {ell} out of range for {} kept objects",
            rp.n()
        )));
    }
    if b > 1 {
        return Err(Error::InvalidParameter(format!(
            "bit argument must be 0 or 1, got {b}"
        )));
    }
    let ws = DualWorkspace::new(rp, opts)?;
    Ok(dual_value_with(&ws, ell, b, opts.workers))
}

/// All (a0, a1) pairs via one dual sum per object and bit — the
/// O(n²·2^m) reference route for the fast path.
pub fn dual_all_posteriors(rp: &ReducedProblem, opts: &DualOptions) -> Result<Vec<(f64, f64)>> {
    let ws = DualWorkspace::new(rp, opts)?;
    Ok((0..rp.n())
        .map(|ell| {
            (
                dual_value_with(&ws, ell, 0, opts.workers),
                dual_value_with(&ws, ell, 1, opts.workers),
            )
        })
        .collect())
}

/// All (a0, a1) pairs in a single pass over w.
///
/// For each w the off-pivot Δ values are shared across pivots, so the
/// leave-one-out products come from prefix/suffix arrays — never from
/// dividing the full product, which would trade a missing-factor hazard
/// for an underflow one. Cost O(n·2^m).
pub fn dual_all_posteriors_fast(
    rp: &ReducedProblem,
    opts: &DualOptions,
) -> Result<Vec<(f64, f64)>> {
    let ws = DualWorkspace::new(rp, opts)?;
    let n = rp.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let len = 1u64 << ws.m;
    let mut acc = vec![(NeumaierSum::new(), NeumaierSum::new()); n];
    accumulate_chunked(
        len,
        opts.workers,
        |lo, hi| {
            let mut part = vec![(NeumaierSum::new(), NeumaierSum::new()); n];
            let mut base = vec![0.0f64; n];
            let mut prefix = vec![0.0f64; n + 1];
            let mut suffix = vec![0.0f64; n + 1];
            for w in lo..hi {
                for (j, slot) in base.iter_mut().enumerate() {
                    let yj = w & ws.beta_masks[j];
                    *slot = if yj == 0 {
                        1.0
                    } else {
                        parity_sign(yj) * ws.p0[j]
                    };
                }
                prefix[0] = 1.0;
                for j in 0..n {
                    prefix[j + 1] = prefix[j] * base[j];
                }
                suffix[n] = 1.0;
                for j in (0..n).rev() {
                    suffix[j] = suffix[j + 1] * base[j];
                }
                let sign = parity_sign(w & ws.sign_mask);
                for (ell, slot) in part.iter_mut().enumerate() {
                    // product of all base factors except ell's
                    let rest = sign * prefix[ell] * suffix[ell + 1];
                    let yb = w & ws.beta_masks[ell];
                    if yb == 0 {
                        slot.0.add(rest * ws.p0[ell]);
                        slot.1.add(rest * ws.p1[ell]);
                    } else {
                        slot.0.add(rest * (parity_sign(yb) * ws.p0[ell]));
                    }
                }
            }
            part
        },
        |part| {
            for (into, from) in acc.iter_mut().zip(part) {
                into.0.merge(from.0);
                into.1.merge(from.1);
            }
        },
    );
    Ok(acc
        .into_iter()
        .map(|(a0, a1)| (a0.value(), a1.value()))
        .collect())
}

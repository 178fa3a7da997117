//! Posterior reports: runs the reduction, dispatches to an engine, and
//! folds the results back onto the original object indices with MAP
//! decisions attached.
//!
//! Objects eliminated by a negative test are reported as forced
//! negative with log-ratio −∞; objects no test touches keep their
//! prior. The log-ratio is a tagged extended real — JSON never carries
//! a raw ±∞.

use serde::{Deserialize, Serialize};

use crate::dual::{dual_all_posteriors, dual_all_posteriors_fast, DualOptions};
use crate::error::{Error, Result};
use crate::graph::{reduce, PoolingGraph};
use crate::model::{Observation, PriorVector};
use crate::oracle::{naive_all_posteriors, OracleOptions};

/// Which engine computes the posterior values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Naive,
    Dual,
    DualFast,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Dual => "dual",
            Method::DualFast => "dual-fast",
        })
    }
}

/// ln(a1/a0) as an extended real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum LogRatio {
    NegInfinite,
    Finite { value: f64 },
    PosInfinite,
}

/// How an object's posterior was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectStatus {
    /// Member of a negative test; certainly negative.
    ForcedNegative,
    /// Touched by no test; posterior equals the prior.
    Isolated,
    /// Marginalized by the selected engine.
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectPosterior {
    pub index: usize,
    pub status: ObjectStatus,
    pub p_positive: f64,
    pub log_ratio: LogRatio,
    pub map: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    pub method: Method,
    #[serde(rename = "Z")]
    pub z: f64,
    pub objects: Vec<ObjectPosterior>,
}

/// MAP rule: decide 1 iff ln(a1/a0) ≥ 0, so an exact tie goes to 1.
/// Non-positive masses map to the infinite branches (a0 can be an
/// exact 0, e.g. under a singleton positive test).
fn decide(a0: f64, a1: f64) -> (LogRatio, u8) {
    if a1 <= 0.0 {
        (LogRatio::NegInfinite, 0)
    } else if a0 <= 0.0 {
        (LogRatio::PosInfinite, 1)
    } else {
        let value = (a1 / a0).ln();
        (LogRatio::Finite { value }, u8::from(value >= 0.0))
    }
}

/// Full pipeline: reduce, evaluate with `method`, report per original
/// object.
pub fn posterior_report(
    graph: &PoolingGraph,
    priors: &PriorVector,
    observation: &Observation,
    method: Method,
    oracle_opts: &OracleOptions,
    dual_opts: &DualOptions,
) -> Result<PosteriorReport> {
    let rp = reduce(graph, observation, priors)?;
    let pairs = match method {
        Method::Naive => naive_all_posteriors(&rp, oracle_opts)?,
        Method::Dual => dual_all_posteriors(&rp, dual_opts)?,
        Method::DualFast => dual_all_posteriors_fast(&rp, dual_opts)?,
    };
    let z = match pairs.first() {
        Some(&(a0, a1)) => a0 + a1,
        None => 1.0,
    };
    if z <= 0.0 {
        return Err(Error::ZeroEvidence);
    }

    let mut objects = Vec::with_capacity(graph.num_objects());
    let mut next_kept = 0usize;
    for index in 0..graph.num_objects() {
        if rp.is_forced_zero(index) {
            objects.push(ObjectPosterior {
                index,
                status: ObjectStatus::ForcedNegative,
                p_positive: 0.0,
                log_ratio: LogRatio::NegInfinite,
                map: 0,
            });
            continue;
        }
        let r = next_kept;
        next_kept += 1;
        debug_assert_eq!(rp.kept_objects()[r], index);
        if rp.beta(r).is_empty() {
            let q = rp.priors().p_one(r);
            let value = (q / (1.0 - q)).ln();
            objects.push(ObjectPosterior {
                index,
                status: ObjectStatus::Isolated,
                p_positive: q,
                log_ratio: LogRatio::Finite { value },
                map: u8::from(value >= 0.0),
            });
            continue;
        }
        let (a0, a1) = pairs[r];
        let (log_ratio, map) = decide(a0, a1);
        objects.push(ObjectPosterior {
            index,
            status: ObjectStatus::Computed,
            p_positive: (a1 / z).clamp(0.0, 1.0),
            log_ratio,
            map,
        });
    }
    Ok(PosteriorReport { method, z, objects })
}

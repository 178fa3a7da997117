//! Serde DTOs for the on-disk JSON formats. Kept separate from the
//! domain types so file-shape concerns never leak into the solvers;
//! conversion into domain types revalidates everything.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{build_pooling_graph, PoolingGraph};
use crate::model::{Observation, PriorVector, StateVector};

/// Instance file: `{"num_objects": N, "tests": [[j,...],...],
/// "priors": [q_0,...]}` with q_j = P(object j positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub num_objects: usize,
    pub tests: Vec<Vec<usize>>,
    pub priors: Vec<f64>,
}

impl GraphFile {
    pub fn new(graph: &PoolingGraph, priors: &PriorVector) -> Self {
        Self {
            num_objects: graph.num_objects(),
            tests: graph.groups().to_vec(),
            priors: priors.as_slice().to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(PoolingGraph, PriorVector)> {
        let graph = build_pooling_graph(self.num_objects, self.tests)?;
        let priors = PriorVector::new(self.priors)?;
        if priors.len() != graph.num_objects() {
            return Err(crate::error::Error::LengthMismatch {
                context: "priors vs graph objects",
                expected: graph.num_objects(),
                actual: priors.len(),
            });
        }
        Ok((graph, priors))
    }
}

/// Observation file: `{"results": [t_0,...,t_{M-1}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationFile {
    pub results: Vec<u8>,
}

impl ObservationFile {
    pub fn new(observation: &Observation) -> Self {
        Self {
            results: observation.bits().to_vec(),
        }
    }

    pub fn into_observation(self) -> Result<Observation> {
        Observation::new(self.results)
    }
}

/// Simulator output: sampled states plus the observation they induce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationFile {
    pub states: Vec<u8>,
    pub results: Vec<u8>,
}

impl SimulationFile {
    pub fn new(states: &StateVector, observation: &Observation) -> Self {
        Self {
            states: states.bits().to_vec(),
            results: observation.bits().to_vec(),
        }
    }
}

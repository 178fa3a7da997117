//! Pooling-graph construction, validation, and observation-driven
//! reduction.
//!
//! Reduction applies node elimination: every member of a negative test
//! is certainly negative, so those objects and the negative tests are
//! dropped and the survivors are renumbered into an induced subproblem
//! with test-side adjacency `alpha` and object-side adjacency `beta`.
//! Indices are 0-based everywhere, including file formats.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Observation, PriorVector};

/// Bipartite object/test structure. `groups[i]` is the member set of
/// test i, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolingGraph {
    num_objects: usize,
    groups: Vec<Vec<usize>>,
}

impl PoolingGraph {
    pub fn new(num_objects: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if num_objects == 0 {
            return Err(Error::InvalidParameter(
                "a pooling graph needs at least one object".into(),
            ));
        }
        let mut stored = Vec::with_capacity(groups.len());
        for (test, mut group) in groups.into_iter().enumerate() {
            if group.is_empty() {
                return Err(Error::EmptyGroup { test });
            }
            group.sort_unstable();
            for pair in group.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::DuplicateMember {
                        test,
                        index: pair[0],
                    });
                }
            }
            let max = *group.last().expect("group checked non-empty");
            if max >= num_objects {
                return Err(Error::IndexOutOfRange {
                    test,
                    index: max,
                    num_objects,
                });
            }
            stored.push(group);
        }
        Ok(Self {
            num_objects,
            groups: stored,
        })
    }

    pub fn num_objects(&self) -> usize {
        self.num_objects
    }

    pub fn num_tests(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[usize] {
        &self.groups[i]
    }

    /// Object-side adjacency: for each object, the tests containing it.
    pub fn object_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adjacency = vec![Vec::new(); self.num_objects];
        for (i, group) in self.groups.iter().enumerate() {
            for &j in group {
                adjacency[j].push(i);
            }
        }
        adjacency
    }
}

/// Builds a validated pooling graph; groups are stored sorted ascending.
pub fn build_pooling_graph(num_objects: usize, groups: Vec<Vec<usize>>) -> Result<PoolingGraph> {
    PoolingGraph::new(num_objects, groups)
}

/// Random design: every test draws a uniform size-`group_size` subset of
/// the objects from a ChaCha8 stream keyed by `seed`.
pub fn random_pooling_graph(
    num_objects: usize,
    num_tests: usize,
    group_size: usize,
    seed: u64,
) -> Result<PoolingGraph> {
    if num_objects == 0 {
        return Err(Error::InvalidParameter(
            "a pooling graph needs at least one object".into(),
        ));
    }
    if group_size == 0 || group_size > num_objects {
        return Err(Error::InvalidParameter(format!(
            "group size {group_size} must lie in [1, {num_objects}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = (0..num_tests)
        .map(|_| {
            let mut group = rand::seq::index::sample(&mut rng, num_objects, group_size).into_vec();
            group.sort_unstable();
            group
        })
        .collect();
    PoolingGraph::new(num_objects, groups)
}

/// The induced subproblem left after node elimination.
///
/// Kept tests are the positive ones; kept objects are those not forced
/// negative, which includes objects no test ever touched (their `beta`
/// is empty and their posterior is their prior). `kept_objects` and
/// `forced_zero` partition the original objects.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedProblem {
    alpha: Vec<Vec<usize>>,
    beta: Vec<Vec<usize>>,
    kept_objects: Vec<usize>,
    kept_tests: Vec<usize>,
    forced_zero: BTreeSet<usize>,
    priors: PriorVector,
}

impl ReducedProblem {
    /// Number of kept objects.
    pub fn n(&self) -> usize {
        self.beta.len()
    }

    /// Number of kept tests.
    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    /// Members of kept test i, as reduced object indices.
    pub fn alpha(&self, i: usize) -> &[usize] {
        &self.alpha[i]
    }

    /// Kept tests containing kept object j, as reduced test indices.
    pub fn beta(&self, j: usize) -> &[usize] {
        &self.beta[j]
    }

    /// Reduced object index -> original object index.
    pub fn kept_objects(&self) -> &[usize] {
        &self.kept_objects
    }

    /// Reduced test index -> original test index.
    pub fn kept_tests(&self) -> &[usize] {
        &self.kept_tests
    }

    /// Original indices of objects forced negative by a negative test.
    pub fn forced_zero(&self) -> &BTreeSet<usize> {
        &self.forced_zero
    }

    pub fn is_forced_zero(&self, original_object: usize) -> bool {
        self.forced_zero.contains(&original_object)
    }

    /// Priors restricted to the kept objects, indexed by reduced index.
    pub fn priors(&self) -> &PriorVector {
        &self.priors
    }
}

/// Applies node elimination for an observation and renumbers the
/// survivors.
///
/// Fails with [`Error::InconsistentObservation`] when a positive test
/// has every member forced negative, which cannot happen under the
/// noiseless OR model.
pub fn reduce(
    graph: &PoolingGraph,
    observation: &Observation,
    priors: &PriorVector,
) -> Result<ReducedProblem> {
    if observation.len() != graph.num_tests() {
        return Err(Error::LengthMismatch {
            context: "observation vs graph tests",
            expected: graph.num_tests(),
            actual: observation.len(),
        });
    }
    if priors.len() != graph.num_objects() {
        return Err(Error::LengthMismatch {
            context: "priors vs graph objects",
            expected: graph.num_objects(),
            actual: priors.len(),
        });
    }

    let mut forced = vec![false; graph.num_objects()];
    for (i, group) in graph.groups().iter().enumerate() {
        if observation.bit(i) == 0 {
            for &j in group {
                forced[j] = true;
            }
        }
    }

    let kept_objects: Vec<usize> = (0..graph.num_objects()).filter(|&j| !forced[j]).collect();
    let mut reduced_of = vec![usize::MAX; graph.num_objects()];
    for (r, &j) in kept_objects.iter().enumerate() {
        reduced_of[j] = r;
    }

    let mut kept_tests = Vec::new();
    let mut alpha = Vec::new();
    for (i, group) in graph.groups().iter().enumerate() {
        if observation.bit(i) == 0 {
            continue;
        }
        let members: Vec<usize> = group
            .iter()
            .filter(|&&j| !forced[j])
            .map(|&j| reduced_of[j])
            .collect();
        if members.is_empty() {
            return Err(Error::InconsistentObservation { test: i });
        }
        kept_tests.push(i);
        alpha.push(members);
    }

    let mut beta = vec![Vec::new(); kept_objects.len()];
    for (i, members) in alpha.iter().enumerate() {
        for &j in members {
            beta[j].push(i);
        }
    }

    let forced_zero = forced
        .iter()
        .enumerate()
        .filter_map(|(j, &f)| f.then_some(j))
        .collect();
    let priors = priors.restrict(&kept_objects);

    Ok(ReducedProblem {
        alpha,
        beta,
        kept_objects,
        kept_tests,
        forced_zero,
        priors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(bits: &[u8]) -> Observation {
        Observation::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn builds_and_sorts_groups() {
        let g = build_pooling_graph(3, vec![vec![1, 0], vec![2, 1]]).unwrap();
        assert_eq!(g.num_objects(), 3);
        assert_eq!(g.num_tests(), 2);
        assert_eq!(g.group(0), &[0, 1]);
        assert_eq!(g.group(1), &[1, 2]);
    }

    #[test]
    fn accepts_testless_graph() {
        let g = build_pooling_graph(1, vec![]).unwrap();
        assert_eq!(g.num_tests(), 0);
    }

    #[test]
    fn rejects_bad_groups() {
        assert_eq!(
            build_pooling_graph(2, vec![vec![0, 0]]),
            Err(Error::DuplicateMember { test: 0, index: 0 })
        );
        assert_eq!(
            build_pooling_graph(3, vec![vec![0, 3]]),
            Err(Error::IndexOutOfRange {
                test: 0,
                index: 3,
                num_objects: 3
            })
        );
        assert_eq!(
            build_pooling_graph(3, vec![vec![0], vec![]]),
            Err(Error::EmptyGroup { test: 1 })
        );
        assert!(matches!(
            build_pooling_graph(0, vec![]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn object_adjacency_round_trips() {
        let g = build_pooling_graph(4, vec![vec![0, 1], vec![1, 2], vec![1, 3]]).unwrap();
        assert_eq!(
            g.object_adjacency(),
            vec![vec![0], vec![0, 1, 2], vec![1], vec![2]]
        );
    }

    #[test]
    fn random_graph_is_reproducible() {
        let a = random_pooling_graph(10, 4, 3, 7).unwrap();
        let b = random_pooling_graph(10, 4, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_tests(), 4);
        assert!(a.groups().iter().all(|g| g.len() == 3));
        assert_ne!(a, random_pooling_graph(10, 4, 3, 8).unwrap());
    }

    #[test]
    fn random_graph_forced_full_group() {
        let g = random_pooling_graph(3, 1, 3, 0).unwrap();
        assert_eq!(g.group(0), &[0, 1, 2]);
    }

    #[test]
    fn random_graph_rejects_oversized_groups() {
        assert!(matches!(
            random_pooling_graph(2, 1, 5, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            random_pooling_graph(2, 1, 0, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn reduce_keeps_everything_on_all_positive_tests() {
        let g = build_pooling_graph(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let priors = PriorVector::uniform(3, 0.1).unwrap();
        let rp = reduce(&g, &obs(&[1, 1]), &priors).unwrap();
        assert_eq!(rp.n(), 3);
        assert_eq!(rp.m(), 2);
        assert!(rp.forced_zero().is_empty());
        assert_eq!(rp.alpha(0), &[0, 1]);
        assert_eq!(rp.alpha(1), &[1, 2]);
        assert_eq!(rp.beta(1), &[0, 1]);
    }

    #[test]
    fn reduce_applies_node_elimination() {
        let g = build_pooling_graph(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let priors = PriorVector::uniform(3, 0.1).unwrap();
        let rp = reduce(&g, &obs(&[1, 0]), &priors).unwrap();
        assert_eq!(rp.forced_zero().iter().copied().collect::<Vec<_>>(), [1, 2]);
        assert_eq!(rp.kept_objects(), &[0]);
        assert_eq!(rp.kept_tests(), &[0]);
        assert_eq!(rp.m(), 1);
        assert_eq!(rp.alpha(0), &[0]);
        assert_eq!(rp.priors().as_slice(), &[0.1]);
    }

    #[test]
    fn reduce_detects_inconsistent_observation() {
        let g = build_pooling_graph(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let priors = PriorVector::uniform(2, 0.1).unwrap();
        assert_eq!(
            reduce(&g, &obs(&[0, 1]), &priors),
            Err(Error::InconsistentObservation { test: 1 })
        );
    }

    #[test]
    fn untested_objects_stay_with_empty_beta() {
        let g = build_pooling_graph(3, vec![vec![0, 1]]).unwrap();
        let priors = PriorVector::uniform(3, 0.3).unwrap();

        let rp = reduce(&g, &obs(&[1]), &priors).unwrap();
        assert_eq!(rp.kept_objects(), &[0, 1, 2]);
        assert!(rp.beta(2).is_empty());

        let rp = reduce(&g, &obs(&[0]), &priors).unwrap();
        assert_eq!(rp.kept_objects(), &[2]);
        assert_eq!(rp.n(), 1);
        assert_eq!(rp.m(), 0);
        assert!(rp.beta(0).is_empty());
    }

    #[test]
    fn reduce_checks_lengths() {
        let g = build_pooling_graph(3, vec![vec![0, 1]]).unwrap();
        let priors = PriorVector::uniform(3, 0.1).unwrap();
        assert!(matches!(
            reduce(&g, &obs(&[1, 1]), &priors),
            Err(Error::LengthMismatch { .. })
        ));
        let short = PriorVector::uniform(2, 0.1).unwrap();
        assert!(matches!(
            reduce(&g, &obs(&[1]), &short),
            Err(Error::LengthMismatch { .. })
        ));
    }

    /// Strategy: a small random graph plus a random observation.
    fn graph_and_observation() -> impl Strategy<Value = (PoolingGraph, Vec<u8>)> {
        (1usize..8).prop_flat_map(|n| {
            let group = proptest::collection::vec(0..n, 1..=n).prop_map(|mut g| {
                g.sort_unstable();
                g.dedup();
                g
            });
            proptest::collection::vec(group, 0..5).prop_flat_map(move |groups| {
                let m = groups.len();
                (
                    Just(PoolingGraph::new(n, groups).expect("valid by construction")),
                    proptest::collection::vec(0u8..2, m),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn alpha_beta_are_dual((graph, bits) in graph_and_observation()) {
            let priors = PriorVector::uniform(graph.num_objects(), 0.2).unwrap();
            if let Ok(rp) = reduce(&graph, &obs(&bits), &priors) {
                for i in 0..rp.m() {
                    for &j in rp.alpha(i) {
                        prop_assert!(rp.beta(j).contains(&i));
                    }
                }
                for j in 0..rp.n() {
                    for &i in rp.beta(j) {
                        prop_assert!(rp.alpha(i).contains(&j));
                    }
                }
            }
        }

        #[test]
        fn negative_tests_force_all_members((graph, bits) in graph_and_observation()) {
            let priors = PriorVector::uniform(graph.num_objects(), 0.2).unwrap();
            if let Ok(rp) = reduce(&graph, &obs(&bits), &priors) {
                for (i, &t) in bits.iter().enumerate() {
                    if t == 0 {
                        for &k in graph.group(i) {
                            prop_assert!(rp.is_forced_zero(k));
                        }
                    }
                }
                // kept and forced partition the objects
                prop_assert_eq!(rp.kept_objects().len() + rp.forced_zero().len(),
                                graph.num_objects());
            }
        }

        #[test]
        fn reduced_adjacency_matches_induced_subgraph((graph, bits) in graph_and_observation()) {
            let priors = PriorVector::uniform(graph.num_objects(), 0.2).unwrap();
            if let Ok(rp) = reduce(&graph, &obs(&bits), &priors) {
                for i in 0..rp.m() {
                    let original: Vec<usize> = rp.alpha(i)
                        .iter()
                        .map(|&j| rp.kept_objects()[j])
                        .collect();
                    let expected: Vec<usize> = graph
                        .group(rp.kept_tests()[i])
                        .iter()
                        .copied()
                        .filter(|&k| !rp.is_forced_zero(k))
                        .collect();
                    prop_assert_eq!(original, expected);
                }
            }
        }

        #[test]
        fn all_ones_observation_is_isomorphic((graph, _) in graph_and_observation()) {
            let priors = PriorVector::uniform(graph.num_objects(), 0.2).unwrap();
            let ones = obs(&vec![1; graph.num_tests()]);
            let rp = reduce(&graph, &ones, &priors).unwrap();
            prop_assert!(rp.forced_zero().is_empty());
            prop_assert_eq!(rp.n(), graph.num_objects());
            prop_assert_eq!(rp.m(), graph.num_tests());
            for i in 0..rp.m() {
                prop_assert_eq!(rp.alpha(i), graph.group(i));
            }
        }
    }
}

//! Executable predicates for the retrodiction axioms and the generator of
//! the verdict table over a deterministic instance suite.
//!
//! Every check evaluates a deviation (operator norm of the superoperator
//! difference, normalized by the source dimension) over a seeded list of
//! instances plus the built-in counterexample instances, and returns either
//! `Holds` with the maximal deviation or `FailsWitness` with a
//! JSON-round-trippable witness instance.

use serde::{Deserialize, Serialize};

use crate::algebra::{element_distance, Algebra, Element, FaithfulState, C64};
use crate::channels::{
    channel_distance, random_channel, random_faithful_state, random_unitary_element, Channel,
    StatePair,
};
use crate::error::{Error, Result};
use crate::json::{ChannelJson, StateJson};
use crate::measure::Measure;
use crate::retrodiction::{bayes_inverse, evaluate, iterate, Strategy, UnitaryAssignment};

/// The checked axioms. `StatePreservation` is part of being a retrodiction
/// family at all; the remaining eight are the rows of the verdict table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    StatePreservation,
    Normalization,
    CompositionStabilizing,
    Compositionality,
    TensorStabilizing,
    Tensoriality,
    Inverting,
    Involutivity,
    BayesOnCStates,
}

impl Axiom {
    /// The eight table rows, in display order.
    pub fn table_rows() -> [Axiom; 8] {
        [
            Axiom::Normalization,
            Axiom::CompositionStabilizing,
            Axiom::Compositionality,
            Axiom::TensorStabilizing,
            Axiom::Tensoriality,
            Axiom::Inverting,
            Axiom::Involutivity,
            Axiom::BayesOnCStates,
        ]
    }

    pub fn all() -> [Axiom; 9] {
        [
            Axiom::StatePreservation,
            Axiom::Normalization,
            Axiom::CompositionStabilizing,
            Axiom::Compositionality,
            Axiom::TensorStabilizing,
            Axiom::Tensoriality,
            Axiom::Inverting,
            Axiom::Involutivity,
            Axiom::BayesOnCStates,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            Axiom::StatePreservation => "state-preservation",
            Axiom::Normalization => "normalization",
            Axiom::CompositionStabilizing => "comp-stabilizing",
            Axiom::Compositionality => "compositionality",
            Axiom::TensorStabilizing => "tensor-stabilizing",
            Axiom::Tensoriality => "tensoriality",
            Axiom::Inverting => "inverting",
            Axiom::Involutivity => "involutivity",
            Axiom::BayesOnCStates => "bayes-on-cstates",
        }
    }

    pub fn parse(name: &str) -> Option<Axiom> {
        Axiom::all().into_iter().find(|a| a.label() == name)
    }
}

/// A failing instance in wire form; reloading and re-evaluating it must
/// reproduce the recorded deviation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum WitnessJson {
    Single {
        prior: StateJson,
        channel: ChannelJson,
    },
    Chain {
        prior: StateJson,
        first: ChannelJson,
        second: ChannelJson,
    },
    Pair {
        left_prior: StateJson,
        left: ChannelJson,
        right_prior: StateJson,
        right: ChannelJson,
    },
}

/// A core-typed check instance.
#[derive(Debug, Clone)]
pub enum CheckInstance {
    Single {
        prior: FaithfulState,
        channel: Channel,
    },
    Chain {
        prior: FaithfulState,
        first: Channel,
        second: Channel,
    },
    Pair {
        left_prior: FaithfulState,
        left: Channel,
        right_prior: FaithfulState,
        right: Channel,
    },
}

impl CheckInstance {
    pub fn to_json(&self) -> WitnessJson {
        match self {
            CheckInstance::Single { prior, channel } => WitnessJson::Single {
                prior: prior.into(),
                channel: channel.into(),
            },
            CheckInstance::Chain {
                prior,
                first,
                second,
            } => WitnessJson::Chain {
                prior: prior.into(),
                first: first.into(),
                second: second.into(),
            },
            CheckInstance::Pair {
                left_prior,
                left,
                right_prior,
                right,
            } => WitnessJson::Pair {
                left_prior: left_prior.into(),
                left: left.into(),
                right_prior: right_prior.into(),
                right: right.into(),
            },
        }
    }

    pub fn from_json(j: &WitnessJson) -> Result<CheckInstance> {
        Ok(match j {
            WitnessJson::Single { prior, channel } => CheckInstance::Single {
                prior: prior.try_into()?,
                channel: channel.try_into()?,
            },
            WitnessJson::Chain {
                prior,
                first,
                second,
            } => CheckInstance::Chain {
                prior: prior.try_into()?,
                first: first.try_into()?,
                second: second.try_into()?,
            },
            WitnessJson::Pair {
                left_prior,
                left,
                right_prior,
                right,
            } => CheckInstance::Pair {
                left_prior: left_prior.try_into()?,
                left: left.try_into()?,
                right_prior: right_prior.try_into()?,
                right: right.try_into()?,
            },
        })
    }
}

/// The deviation a strategy exhibits on one instance of one axiom. This is
/// the single evaluation path used both by the suite checks and by witness
/// re-evaluation.
pub fn instance_deviation(
    strategy: &Strategy,
    axiom: Axiom,
    instance: &CheckInstance,
) -> Result<f64> {
    match (axiom, instance) {
        (Axiom::StatePreservation, CheckInstance::Single { prior, channel }) => {
            let pair = StatePair::from_channel(channel, prior)?;
            let r = evaluate(strategy, prior, channel)?;
            Ok(element_distance(
                &r.apply(pair.prediction.element())?,
                prior.element(),
            ))
        }
        (Axiom::Normalization, CheckInstance::Single { prior, channel }) => {
            let r = evaluate(strategy, prior, channel)?;
            Ok(channel_distance(&r, &Channel::identity(prior.algebra())))
        }
        (
            Axiom::Compositionality | Axiom::CompositionStabilizing,
            CheckInstance::Chain {
                prior,
                first,
                second,
            },
        ) => {
            let pair = StatePair::from_channel(first, prior)?;
            let composite = Channel::compose(second, first)?;
            let lhs = evaluate(strategy, prior, &composite)?;
            let rhs = Channel::compose(
                &evaluate(strategy, prior, first)?,
                &evaluate(strategy, &pair.prediction, second)?,
            )?;
            Ok(channel_distance(&lhs, &rhs))
        }
        (
            Axiom::Tensoriality | Axiom::TensorStabilizing,
            CheckInstance::Pair {
                left_prior,
                left,
                right_prior,
                right,
            },
        ) => {
            let product_prior = FaithfulState::new(
                left_prior.element().tensor(right_prior.element()),
                (left_prior.floor() * right_prior.floor()).max(1e-15),
            )?;
            let product = Channel::tensor(left, right);
            let lhs = evaluate(strategy, &product_prior, &product)?;
            let rhs = Channel::tensor(
                &evaluate(strategy, left_prior, left)?,
                &evaluate(strategy, right_prior, right)?,
            );
            Ok(channel_distance(&lhs, &rhs))
        }
        (Axiom::Inverting, CheckInstance::Single { prior, channel }) => {
            let r = evaluate(strategy, prior, channel)?;
            Ok(channel_distance(&r, &channel.invert_iso()?))
        }
        (Axiom::Involutivity, CheckInstance::Single { prior, channel }) => {
            let back = iterate(strategy, prior, channel)?;
            Ok(channel_distance(&back, channel))
        }
        (Axiom::BayesOnCStates, CheckInstance::Single { prior, channel }) => {
            let r = evaluate(strategy, prior, channel)?;
            Ok(channel_distance(&r, &bayes_inverse(prior, channel)?))
        }
        _ => Err(Error::InvalidParameter(
            "instance shape does not match the axiom".into(),
        )),
    }
}

/// Re-evaluate a serialized witness.
pub fn witness_deviation(strategy: &Strategy, axiom: Axiom, witness: &WitnessJson) -> Result<f64> {
    instance_deviation(strategy, axiom, &CheckInstance::from_json(witness)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds {
        max_deviation: f64,
    },
    FailsWitness {
        deviation: f64,
        witness: WitnessJson,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub strategy: String,
    pub tolerance: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Number of instances the check actually evaluated.
    pub instances: usize,
}

/// Deterministic generator of check instances: seeded random morphisms over
/// a list of algebra shapes, a covariant slice, and the built-in
/// counterexample instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSuite {
    pub seeds: Vec<u64>,
    pub dims: Vec<Vec<usize>>,
    pub covariant_fraction: f64,
    pub tol: f64,
    /// Looser tolerance for checks whose evaluation goes through the
    /// smoothed-measure quadrature.
    pub jrsww_tol: f64,
    pub state_floor: f64,
}

impl Default for InstanceSuite {
    fn default() -> Self {
        InstanceSuite {
            seeds: (0..25).collect(),
            dims: vec![vec![2], vec![3], vec![1, 1], vec![1, 1, 1], vec![2, 1]],
            covariant_fraction: 0.3,
            tol: 1e-8,
            jrsww_tol: 1e-6,
            state_floor: 0.05,
        }
    }
}

impl InstanceSuite {
    pub fn with_seed_offset(mut self, offset: u64) -> Self {
        self.seeds = self.seeds.iter().map(|s| s + offset).collect();
        self
    }

    fn algebra_for(&self, i: usize) -> Algebra {
        Algebra::new(self.dims[i % self.dims.len()].clone()).expect("suite dims are valid")
    }

    fn covariant_slot(&self, i: usize) -> bool {
        let per_ten = (self.covariant_fraction * 10.0).round() as usize;
        i % 10 < per_ten
    }

    /// X ↦ tr(X) · I/M, used to keep random predictions well-conditioned.
    fn mm_prepare(alg: &Algebra) -> Channel {
        let mm = FaithfulState::maximally_mixed(alg);
        let rho = mm.element().clone();
        Channel::from_map(alg, alg, move |x| rho.scale(x.trace()))
    }

    fn mix(channels: &[(f64, &Channel)]) -> Channel {
        let source = channels[0].1.source().clone();
        let target = channels[0].1.target().clone();
        let mut m = crate::algebra::Mat::zeros(target.total_dim(), source.total_dim());
        for (w, c) in channels {
            m += c.matrix().map(|v| v * C64::new(*w, 0.0));
        }
        Channel::new(source, target, m).expect("mixture of matching channels")
    }

    /// A generic endomorphism with a well-conditioned prediction.
    fn conditioned_channel(&self, alg: &Algebra, seed: u64) -> Channel {
        let raw = random_channel(alg, alg, 2, seed);
        let prep = Self::mm_prepare(alg);
        Self::mix(&[(0.85, &raw), (0.15, &prep)])
    }

    /// A unital channel covariant at the maximally mixed state.
    fn covariant_unital(&self, alg: &Algebra, seed: u64) -> Channel {
        let u1 = Channel::ad(&random_unitary_element(alg, seed.wrapping_mul(2).wrapping_add(1)));
        let u2 = Channel::ad(&random_unitary_element(alg, seed.wrapping_mul(2).wrapping_add(2)));
        Self::mix(&[(0.6, &u1), (0.4, &u2)])
    }

    /// A non-isomorphism channel covariant at the given state.
    fn covariant_at(&self, beta: &FaithfulState) -> Channel {
        let id = Channel::identity(beta.algebra());
        let pinch = Channel::pinching(beta);
        let prep = {
            let rho = beta.element().clone();
            Channel::from_map(beta.algebra(), beta.algebra(), move |x| rho.scale(x.trace()))
        };
        Self::mix(&[(0.5, &id), (0.3, &pinch), (0.2, &prep)])
    }

    /// Generic endomorphic instances; the covariant slice uses maximally
    /// mixed priors with unital channels.
    pub fn endo_instances(&self) -> Vec<(FaithfulState, Channel)> {
        let mut out = Vec::new();
        for (i, &seed) in self.seeds.iter().enumerate() {
            let alg = self.algebra_for(i);
            if self.covariant_slot(i) && !alg.is_commutative() {
                let prior = FaithfulState::maximally_mixed(&alg);
                let channel = self.covariant_unital(&alg, seed);
                out.push((prior, channel));
            } else {
                let prior =
                    random_faithful_state(&alg, self.state_floor, seed.wrapping_add(1000))
                        .expect("suite floor is feasible");
                let channel = self.conditioned_channel(&alg, seed.wrapping_add(2000));
                out.push((prior, channel));
            }
        }
        out
    }

    /// Composable chains. Covariant slots put the covariant factor first or
    /// second in alternation.
    pub fn chains(&self) -> Vec<CheckInstance> {
        let mut out = Vec::new();
        for (i, &seed) in self.seeds.iter().enumerate() {
            let alg = self.algebra_for(i);
            if self.covariant_slot(i) && !alg.is_commutative() {
                if i % 2 == 0 {
                    // covariant first: maximally mixed prior, unital e
                    let prior = FaithfulState::maximally_mixed(&alg);
                    let first = self.covariant_unital(&alg, seed.wrapping_add(3000));
                    let second = self.conditioned_channel(&alg, seed.wrapping_add(4000));
                    out.push(CheckInstance::Chain {
                        prior,
                        first,
                        second,
                    });
                } else {
                    // covariant second: pinching-style map at the prediction
                    let prior =
                        random_faithful_state(&alg, self.state_floor, seed.wrapping_add(5000))
                            .expect("suite floor is feasible");
                    let first = self.conditioned_channel(&alg, seed.wrapping_add(6000));
                    let pair = StatePair::from_channel(&first, &prior)
                        .expect("conditioned prediction is faithful");
                    let second = self.covariant_at(&pair.prediction);
                    out.push(CheckInstance::Chain {
                        prior,
                        first,
                        second,
                    });
                }
            } else {
                let prior =
                    random_faithful_state(&alg, self.state_floor, seed.wrapping_add(7000))
                        .expect("suite floor is feasible");
                let first = self.conditioned_channel(&alg, seed.wrapping_add(8000));
                let second = self.conditioned_channel(&alg, seed.wrapping_add(9000));
                out.push(CheckInstance::Chain {
                    prior,
                    first,
                    second,
                });
            }
        }
        // one cross-algebra chain: measure in the standard basis after a
        // qubit channel
        if let Some(&seed) = self.seeds.first() {
            let alg = Algebra::qubit();
            let prior = random_faithful_state(&alg, self.state_floor, seed.wrapping_add(10000))
                .expect("suite floor is feasible");
            let first = self.conditioned_channel(&alg, seed.wrapping_add(11000));
            let second = Channel::classicalize(2);
            out.push(CheckInstance::Chain {
                prior,
                first,
                second,
            });
        }
        out
    }

    /// Tensor pairs kept small: qubit and two-point factors.
    pub fn tensor_pairs(&self) -> Vec<CheckInstance> {
        let mut out = Vec::new();
        let q = Algebra::qubit();
        let cl = Algebra::classical(2);
        for (i, &seed) in self.seeds.iter().enumerate().take(12) {
            let (left_alg, right_alg) = match i % 3 {
                0 => (q.clone(), q.clone()),
                1 => (q.clone(), cl.clone()),
                _ => (cl.clone(), cl.clone()),
            };
            let left_prior =
                random_faithful_state(&left_alg, self.state_floor, seed.wrapping_add(12000))
                    .expect("suite floor is feasible");
            let left = self.conditioned_channel(&left_alg, seed.wrapping_add(13000));
            if self.covariant_slot(i) {
                // right factor covariant: maximally mixed + unital (quantum)
                // or any stochastic map (classical)
                let right_prior = FaithfulState::maximally_mixed(&right_alg);
                let right = if right_alg.is_commutative() {
                    self.conditioned_channel(&right_alg, seed.wrapping_add(14000))
                } else {
                    self.covariant_unital(&right_alg, seed.wrapping_add(14000))
                };
                out.push(CheckInstance::Pair {
                    left_prior,
                    left,
                    right_prior,
                    right,
                });
            } else {
                let right_prior =
                    random_faithful_state(&right_alg, self.state_floor, seed.wrapping_add(15000))
                        .expect("suite floor is feasible");
                let right = self.conditioned_channel(&right_alg, seed.wrapping_add(16000));
                out.push(CheckInstance::Pair {
                    left_prior,
                    left,
                    right_prior,
                    right,
                });
            }
        }
        out
    }

    /// Isomorphism instances: unitary conjugations, point permutations, and
    /// the identity, across several priors.
    pub fn iso_instances(&self) -> Vec<(FaithfulState, Channel)> {
        let mut out = Vec::new();
        for (i, &seed) in self.seeds.iter().enumerate().take(15) {
            let alg = self.algebra_for(i);
            let prior = random_faithful_state(&alg, self.state_floor, seed.wrapping_add(17000))
                .expect("suite floor is feasible");
            let channel = if alg.is_commutative() {
                let n = alg.num_blocks();
                let perm: Vec<usize> = (0..n).map(|k| (k + 1 + i % n.max(1)) % n).collect();
                match Channel::permutation(&alg, &perm) {
                    Ok(p) => p,
                    Err(_) => Channel::identity(&alg),
                }
            } else {
                Channel::ad(&random_unitary_element(&alg, seed.wrapping_add(18000)))
            };
            out.push((prior, channel));
        }
        // the identity morphism itself
        let alg = Algebra::qubit();
        let prior = random_faithful_state(&alg, self.state_floor, 424242).unwrap();
        out.push((prior, Channel::identity(&alg)));
        out
    }

    /// Commutative instances for the classical-agreement check.
    pub fn commutative_instances(&self) -> Vec<(FaithfulState, Channel)> {
        let mut out = Vec::new();
        for (i, &seed) in self.seeds.iter().enumerate() {
            let n = 2 + i % 3;
            let alg = Algebra::classical(n);
            let prior = random_faithful_state(&alg, self.state_floor / 2.0, seed.wrapping_add(19000))
                .expect("suite floor is feasible");
            let channel = self.conditioned_channel(&alg, seed.wrapping_add(20000));
            out.push((prior, channel));
        }
        out
    }
}

/// Built-in counterexample instances.
pub mod fixed {
    use super::*;

    /// Bit-flip chain with θ = e^{2π}/(1+e^{2π}), p = tanh(π/2)/(2 sinh π),
    /// q = 1/2: the instance on which symmetric rotated averages and the
    /// smoothed average fail compositionality.
    pub fn bit_flip_chain() -> CheckInstance {
        let pi = std::f64::consts::PI;
        let theta = (2.0 * pi).exp() / (1.0 + (2.0 * pi).exp());
        let p = (pi / 2.0).tanh() / (2.0 * pi.sinh());
        let prior = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta]).unwrap();
        CheckInstance::Chain {
            prior,
            first: Channel::bit_flip(p).unwrap(),
            second: Channel::bit_flip(0.5).unwrap(),
        }
    }

    /// Tensor pair of half bit-flips at biased priors: the σy⊗σy
    /// discrepancy instance.
    pub fn bit_flip_tensor_pair() -> CheckInstance {
        let pi = std::f64::consts::PI;
        let theta = 1.0 / (1.0 + (2.0 * pi).exp());
        let theta2 = theta;
        CheckInstance::Pair {
            left_prior: FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta])
                .unwrap(),
            left: Channel::bit_flip(0.5).unwrap(),
            right_prior: FaithfulState::diagonal(&Algebra::qubit(), &[theta2, 1.0 - theta2])
                .unwrap(),
            right: Channel::bit_flip(0.5).unwrap(),
        }
    }

    /// The exact rational stochastic chain on two points.
    pub fn classical_chain() -> CheckInstance {
        let prior = FaithfulState::from_probs(&[0.5, 0.5]).unwrap();
        let e = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.1, 0.3, 0.9, 0.7],
        ))
        .unwrap();
        let f = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.3, 0.6, 0.7, 0.4],
        ))
        .unwrap();
        CheckInstance::Chain {
            prior,
            first: e,
            second: f,
        }
    }

    /// First leg of the classical chain as a single instance.
    pub fn classical_single() -> CheckInstance {
        match classical_chain() {
            CheckInstance::Chain { prior, first, .. } => CheckInstance::Single {
                prior,
                channel: first,
            },
            _ => unreachable!(),
        }
    }

    /// The involutivity-uniqueness instance: a bit flip whose modular
    /// log-ratios are −π and π√2, so no nonzero rotation parameter is
    /// involutive on it.
    pub fn incommensurable_bit_flip() -> CheckInstance {
        let pi = std::f64::consts::PI;
        let sqrt2 = std::f64::consts::SQRT_2;
        let theta = 1.0 / (1.0 + (pi * (sqrt2 + 1.0) / 2.0).exp());
        let p = (pi / 2.0).sinh() / ((pi / 2.0).sinh() + (pi / sqrt2).sinh());
        let prior = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta]).unwrap();
        CheckInstance::Single {
            prior,
            channel: Channel::bit_flip(p).unwrap(),
        }
    }

    /// Flip isomorphism at a biased prior: the phase-conjugated family
    /// leaves a residual conjugation here.
    pub fn flip_iso() -> CheckInstance {
        let prior = FaithfulState::diagonal(&Algebra::qubit(), &[0.3, 0.7]).unwrap();
        CheckInstance::Single {
            prior,
            channel: Channel::ad(&Element::sigma_x()),
        }
    }
}

fn uses_jrsww(strategy: &Strategy) -> bool {
    match strategy {
        Strategy::AveragedPetz(Measure::Jrsww { .. }) => true,
        Strategy::Convex(terms) => terms.iter().any(|(_, s)| uses_jrsww(s)),
        _ => false,
    }
}

fn applicable_to(strategy: &Strategy, source: &Algebra, target: &Algebra) -> bool {
    match strategy {
        Strategy::Bayes => source.is_commutative() && target.is_commutative(),
        Strategy::SuraceScandiClassical => {
            source.is_commutative()
                && target.is_commutative()
                && source.num_blocks() == target.num_blocks()
                && source.num_blocks() <= 4
        }
        Strategy::Convex(terms) => terms.iter().all(|(_, s)| applicable_to(s, source, target)),
        _ => true,
    }
}

fn instance_applicable(strategy: &Strategy, instance: &CheckInstance) -> bool {
    match instance {
        CheckInstance::Single { channel, .. } => {
            applicable_to(strategy, channel.source(), channel.target())
        }
        CheckInstance::Chain { first, second, .. } => {
            applicable_to(strategy, first.source(), first.target())
                && applicable_to(strategy, second.source(), second.target())
                && applicable_to(strategy, first.source(), second.target())
        }
        CheckInstance::Pair { left, right, .. } => {
            let src = left.source().tensor(right.source());
            let tgt = left.target().tensor(right.target());
            applicable_to(strategy, left.source(), left.target())
                && applicable_to(strategy, right.source(), right.target())
                && applicable_to(strategy, &src, &tgt)
        }
    }
}

fn effective_tol(strategy: &Strategy, suite: &InstanceSuite, tol: f64) -> f64 {
    if uses_jrsww(strategy) {
        tol.max(suite.jrsww_tol)
    } else {
        tol
    }
}

fn run_check(
    strategy: &Strategy,
    axiom: Axiom,
    instances: Vec<CheckInstance>,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut max_dev = 0.0_f64;
    let mut evaluated = 0usize;
    for inst in &instances {
        if !instance_applicable(strategy, inst) {
            continue;
        }
        let dev = instance_deviation(strategy, axiom, inst)?;
        evaluated += 1;
        if dev > tol {
            return Ok(AxiomCheck {
                axiom,
                strategy: strategy.label(),
                tolerance: tol,
                verdict: Verdict::FailsWitness {
                    deviation: dev,
                    witness: inst.to_json(),
                },
                instances: evaluated,
            });
        }
        max_dev = max_dev.max(dev);
    }
    Ok(AxiomCheck {
        axiom,
        strategy: strategy.label(),
        tolerance: tol,
        verdict: Verdict::Holds {
            max_deviation: max_dev,
        },
        instances: evaluated,
    })
}

fn singles(list: Vec<(FaithfulState, Channel)>) -> Vec<CheckInstance> {
    list.into_iter()
        .map(|(prior, channel)| CheckInstance::Single { prior, channel })
        .collect()
}

pub fn check_state_preservation(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = singles(suite.endo_instances());
    instances.extend(singles(suite.commutative_instances()));
    instances.push(fixed::classical_single());
    run_check(
        strategy,
        Axiom::StatePreservation,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_normalization(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = Vec::new();
    for (prior, _) in suite.endo_instances() {
        let id = Channel::identity(prior.algebra());
        instances.push(CheckInstance::Single { prior, channel: id });
    }
    run_check(
        strategy,
        Axiom::Normalization,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_compositionality(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = suite.chains();
    instances.push(fixed::bit_flip_chain());
    instances.push(fixed::classical_chain());
    run_check(
        strategy,
        Axiom::Compositionality,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_tensoriality(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = suite.tensor_pairs();
    instances.push(fixed::bit_flip_tensor_pair());
    run_check(
        strategy,
        Axiom::Tensoriality,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

/// Stabilized variants: the compositionality/tensoriality test restricted to
/// instances where at least one factor is covariant.
pub fn check_stabilizing(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
    tensor_mode: bool,
) -> Result<AxiomCheck> {
    if suite.covariant_fraction <= 0.0 {
        return Err(Error::InvalidParameter(
            "stabilizing checks need a covariant slice in the suite".into(),
        ));
    }
    let cov_tol = 1e-8;
    if tensor_mode {
        let mut instances = Vec::new();
        for inst in suite.tensor_pairs() {
            if let CheckInstance::Pair {
                left_prior,
                left,
                right_prior,
                right,
            } = &inst
            {
                let left_cov = left.is_covariant(left_prior, cov_tol).unwrap_or(false);
                let right_cov = right.is_covariant(right_prior, cov_tol).unwrap_or(false);
                if left_cov || right_cov {
                    instances.push(inst);
                }
            }
        }
        run_check(
            strategy,
            Axiom::TensorStabilizing,
            instances,
            effective_tol(strategy, suite, tol),
        )
    } else {
        let mut all = suite.chains();
        all.push(fixed::classical_chain());
        let mut instances = Vec::new();
        for inst in all {
            if let CheckInstance::Chain {
                prior,
                first,
                second,
            } = &inst
            {
                let first_cov = first.is_covariant(prior, cov_tol).unwrap_or(false);
                let second_cov = StatePair::from_channel(first, prior)
                    .ok()
                    .map(|pair| second.is_covariant(&pair.prediction, cov_tol).unwrap_or(false))
                    .unwrap_or(false);
                if first_cov || second_cov {
                    instances.push(inst);
                }
            }
        }
        run_check(
            strategy,
            Axiom::CompositionStabilizing,
            instances,
            effective_tol(strategy, suite, tol),
        )
    }
}

pub fn check_inverting(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = singles(suite.iso_instances());
    instances.push(fixed::flip_iso());
    run_check(
        strategy,
        Axiom::Inverting,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_involutivity(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = singles(suite.endo_instances());
    instances.push(fixed::incommensurable_bit_flip());
    instances.push(fixed::classical_single());
    run_check(
        strategy,
        Axiom::Involutivity,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_bayes_on_cstates(
    strategy: &Strategy,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    let mut instances = singles(suite.commutative_instances());
    instances.push(fixed::classical_single());
    run_check(
        strategy,
        Axiom::BayesOnCStates,
        instances,
        effective_tol(strategy, suite, tol),
    )
}

pub fn check_axiom(
    strategy: &Strategy,
    axiom: Axiom,
    suite: &InstanceSuite,
    tol: f64,
) -> Result<AxiomCheck> {
    match axiom {
        Axiom::StatePreservation => check_state_preservation(strategy, suite, tol),
        Axiom::Normalization => check_normalization(strategy, suite, tol),
        Axiom::Compositionality => check_compositionality(strategy, suite, tol),
        Axiom::CompositionStabilizing => check_stabilizing(strategy, suite, tol, false),
        Axiom::TensorStabilizing => check_stabilizing(strategy, suite, tol, true),
        Axiom::Tensoriality => check_tensoriality(strategy, suite, tol),
        Axiom::Inverting => check_inverting(strategy, suite, tol),
        Axiom::Involutivity => check_involutivity(strategy, suite, tol),
        Axiom::BayesOnCStates => check_bayes_on_cstates(strategy, suite, tol),
    }
}

/// The six canonical strategies, keyed for the expected-verdict table.
pub fn canonical_strategies() -> Vec<(&'static str, Strategy)> {
    vec![
        ("petz", Strategy::Petz),
        ("rotated", Strategy::RotatedPetz(0.7)),
        ("averaged", Strategy::AveragedPetz(Measure::jrsww())),
        ("sth", Strategy::Sth(UnitaryAssignment::nontrivial())),
        ("discard", Strategy::DiscardPrepare),
        ("ss", Strategy::SuraceScandiClassical),
    ]
}

/// Expected verdict for a canonical strategy: Some(holds) for asserted
/// cells, None for the undetermined ones.
pub fn expected_cell(strategy_key: &str, axiom: Axiom) -> Option<bool> {
    use Axiom::*;
    let holds = match (strategy_key, axiom) {
        (_, StatePreservation) => true,
        ("petz", _) => true,
        ("rotated", Involutivity) => false,
        ("rotated", _) => true,
        ("averaged", Compositionality | Tensoriality | Involutivity) => false,
        ("averaged", _) => true,
        ("sth", TensorStabilizing | Tensoriality | Inverting | Involutivity) => false,
        ("sth", _) => true,
        ("discard", Normalization | Inverting | Involutivity | BayesOnCStates) => false,
        ("discard", _) => true,
        ("ss", TensorStabilizing | Tensoriality) => return None,
        ("ss", Normalization | Inverting) => true,
        ("ss", _) => false,
        _ => return None,
    };
    Some(holds)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableCell {
    pub strategy: String,
    pub axiom: Axiom,
    pub holds: bool,
    pub deviation: f64,
    pub tolerance: f64,
    pub expected: Option<bool>,
    pub matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

/// Cells the table reports without asserting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservedCell {
    pub strategy: String,
    pub axiom: Axiom,
    pub holds_within_tol: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableReport {
    pub schema_version: String,
    pub strategies: Vec<String>,
    pub cells: Vec<TableCell>,
    pub observed: Vec<ObservedCell>,
    /// True iff every asserted cell matches its expected verdict.
    pub pass: bool,
}

/// Run the eight table properties for the given keyed strategies and compare
/// against the expected verdicts. Undetermined cells are reported in the
/// `observed` section and never asserted.
pub fn build_table(
    strategies: &[(&str, Strategy)],
    suite: &InstanceSuite,
) -> Result<TableReport> {
    let mut cells = Vec::new();
    let mut observed = Vec::new();
    let mut pass = true;
    for (key, strategy) in strategies {
        for axiom in Axiom::table_rows() {
            let check = check_axiom(strategy, axiom, suite, suite.tol)?;
            let expected = expected_cell(key, axiom);
            let (holds, deviation, witness) = match &check.verdict {
                Verdict::Holds { max_deviation } => (true, *max_deviation, None),
                Verdict::FailsWitness { deviation, witness } => {
                    (false, *deviation, Some(witness.clone()))
                }
            };
            match expected {
                None => observed.push(ObservedCell {
                    strategy: key.to_string(),
                    axiom,
                    holds_within_tol: holds,
                    deviation,
                    tolerance: check.tolerance,
                }),
                Some(exp) => {
                    let matches = exp == holds;
                    pass &= matches;
                    cells.push(TableCell {
                        strategy: key.to_string(),
                        axiom,
                        holds,
                        deviation,
                        tolerance: check.tolerance,
                        expected,
                        matches: Some(matches),
                        witness,
                    });
                }
            }
        }
    }
    Ok(TableReport {
        schema_version: crate::json::SCHEMA_VERSION.to_string(),
        strategies: strategies.iter().map(|(k, _)| k.to_string()).collect(),
        cells,
        observed,
        pass,
    })
}

impl TableReport {
    /// Aligned plain-text rendering: rows are properties, columns are
    /// strategies; mismatches against the expected verdict are flagged.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let col = 10usize;
        out.push_str(&format!("{:<20}", "property"));
        for s in &self.strategies {
            out.push_str(&format!("{s:>col$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(20 + col * self.strategies.len()));
        out.push('\n');
        for axiom in Axiom::table_rows() {
            out.push_str(&format!("{:<20}", axiom.label()));
            for s in &self.strategies {
                let mark = if let Some(c) = self
                    .cells
                    .iter()
                    .find(|c| c.axiom == axiom && &c.strategy == s)
                {
                    let sym = if c.holds { "yes" } else { "no" };
                    if c.matches == Some(false) {
                        format!("{sym}!")
                    } else {
                        sym.to_string()
                    }
                } else if let Some(o) = self
                    .observed
                    .iter()
                    .find(|o| o.axiom == axiom && &o.strategy == s)
                {
                    format!("({})", if o.holds_within_tol { "yes" } else { "no" })
                } else {
                    "-".to_string()
                };
                out.push_str(&format!("{mark:>col$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "\nasserted cells {} the expected verdicts\n",
            if self.pass { "match" } else { "MISMATCH" }
        ));
        out
    }
}

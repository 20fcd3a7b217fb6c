//! Every retrodiction strategy, evaluated at a (prior, channel) pair to
//! produce a channel in the reverse direction.
//!
//! All strategies here send a morphism (α, ℰ) with prediction β = ℰ(α) to a
//! CPTP map ℬ → 𝒜 with ℛ(β) = α. The base map is
//! Ad_{α^{1/2}} ∘ ℰ* ∘ Ad_{β^{−1/2}}; the rotated variant conjugates by the
//! modular phases α^{−it}, β^{it}; averaging integrates the rotation
//! parameter against a probability measure.

use crate::algebra::{element_distance, Element, FaithfulState, C64, Mat, DEFAULT_TOL};
use crate::channels::{Channel, StatePair};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::ss;

/// Deterministic rule assigning to each faithful state a unitary commuting
/// with it: one phase per distinct-eigenvalue cluster,
/// φ_k = rank_gain·(k+1) + eigenvalue_gain·λ_k + probe_gain·Re tr(Π_k D),
/// where D is a fixed diagonal probe element of the algebra.
///
/// The probe term makes the rule depend on the representation, not just the
/// spectrum, so the assignment is deliberately not intertwined by
/// *-isomorphisms. On commutative algebras any such unitary is central and
/// the conjugations cancel.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRule {
    pub rank_gain: f64,
    pub eigenvalue_gain: f64,
    pub probe_gain: f64,
}

impl PhaseRule {
    pub fn trivial() -> Self {
        PhaseRule {
            rank_gain: 0.0,
            eigenvalue_gain: 0.0,
            probe_gain: 0.0,
        }
    }

    pub fn nontrivial() -> Self {
        PhaseRule {
            rank_gain: std::f64::consts::FRAC_PI_3,
            eigenvalue_gain: std::f64::consts::E,
            probe_gain: 0.82708554,
        }
    }

    pub fn unitary_for(&self, state: &FaithfulState) -> Element {
        let clusters = state.spectral_clusters(1e-8);
        let algebra = state.algebra().clone();
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        let mut k_global = 0usize;
        let mut probe_offset = 0usize;
        for (b, per_block) in clusters.iter().enumerate() {
            let m = algebra.block_dims()[b];
            let probe = Mat::from_fn(m, m, |i, j| {
                if i == j {
                    C64::new((probe_offset + i + 1) as f64, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let mut u = Mat::zeros(m, m);
            for (lambda, proj) in per_block {
                let w = (proj * &probe).trace().re;
                let phase = self.rank_gain * (k_global + 1) as f64
                    + self.eigenvalue_gain * lambda
                    + self.probe_gain * w;
                u += proj.map(|v| v * C64::new(0.0, phase).exp());
                k_global += 1;
            }
            blocks.push(u);
            probe_offset += m;
        }
        Element::new(algebra, blocks).expect("projections have block shapes")
    }
}

/// Per-object unitary assignment for the phase-conjugated recovery map:
/// explicit (state, unitary) overrides checked first, then the fallback rule.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryAssignment {
    pub explicit: Vec<(Element, Element)>,
    pub rule: PhaseRule,
}

impl UnitaryAssignment {
    /// Identity unitaries everywhere: the map reduces to the base recovery.
    pub fn identity() -> Self {
        UnitaryAssignment {
            explicit: Vec::new(),
            rule: PhaseRule::trivial(),
        }
    }

    /// Nontrivial deterministic phases everywhere.
    pub fn nontrivial() -> Self {
        UnitaryAssignment {
            explicit: Vec::new(),
            rule: PhaseRule::nontrivial(),
        }
    }

    pub fn with_override(mut self, state: &FaithfulState, unitary: Element) -> Self {
        self.explicit.push((state.element().clone(), unitary));
        self
    }

    pub fn unitary_for(&self, state: &FaithfulState) -> Element {
        for (el, u) in &self.explicit {
            if el.algebra() == state.algebra() && element_distance(el, state.element()) < 1e-8 {
                return u.clone();
            }
        }
        self.rule.unitary_for(state)
    }
}

/// A closed enumeration of the map families evaluated at a (state, channel)
/// pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Petz,
    RotatedPetz(f64),
    AveragedPetz(Measure),
    Sth(UnitaryAssignment),
    DiscardPrepare,
    Bayes,
    SuraceScandiClassical,
    Convex(Vec<(f64, Strategy)>),
}

impl Strategy {
    pub fn label(&self) -> String {
        match self {
            Strategy::Petz => "petz".into(),
            Strategy::RotatedPetz(t) => format!("rotated(t={t})"),
            Strategy::AveragedPetz(Measure::Jrsww { order }) => {
                format!("averaged(jrsww,order={order})")
            }
            Strategy::AveragedPetz(Measure::Dirac { t }) => format!("averaged(dirac,t={t})"),
            Strategy::AveragedPetz(Measure::DiscreteConvex { points }) => {
                format!("averaged(discrete,{} points)", points.len())
            }
            Strategy::Sth(_) => "sth".into(),
            Strategy::DiscardPrepare => "discard-prepare".into(),
            Strategy::Bayes => "bayes".into(),
            Strategy::SuraceScandiClassical => "surace-scandi".into(),
            Strategy::Convex(terms) => format!("convex({} terms)", terms.len()),
        }
    }
}

fn require_cptp(e: &Channel) -> Result<()> {
    if !e.is_cptp() {
        let v = e.cptp_verdict(DEFAULT_TOL);
        return Err(Error::NotCptp(format!(
            "choi negativity {:.3e}, trace defect {:.3e}",
            v.choi_negativity, v.trace_defect
        )));
    }
    Ok(())
}

fn check_prior_algebra(alpha: &FaithfulState, e: &Channel) -> Result<()> {
    if alpha.algebra() != e.source() {
        return Err(Error::AlgebraMismatch {
            expected: e.source().block_dims().to_vec(),
            got: alpha.algebra().block_dims().to_vec(),
        });
    }
    Ok(())
}

fn rotated_matrix(alpha: &FaithfulState, beta: &FaithfulState, adjoint: &Mat, t: f64) -> Mat {
    let left = Channel::ad(&alpha.power(C64::new(0.5, -t)));
    let right = Channel::ad(&beta.power(C64::new(-0.5, t)));
    left.matrix() * adjoint * right.matrix()
}

/// The base recovery map Ad_{α^{1/2}} ∘ ℰ* ∘ Ad_{β^{−1/2}}.
pub fn petz(alpha: &FaithfulState, e: &Channel) -> Result<Channel> {
    rotated_petz(alpha, e, 0.0)
}

/// The rotated recovery map Ad_{α^{1/2−it}} ∘ ℰ* ∘ Ad_{β^{−1/2+it}}.
pub fn rotated_petz(alpha: &FaithfulState, e: &Channel, t: f64) -> Result<Channel> {
    check_prior_algebra(alpha, e)?;
    require_cptp(e)?;
    let pair = StatePair::from_channel(e, alpha)?;
    let adjoint = e.matrix().adjoint();
    let m = rotated_matrix(alpha, &pair.prediction, &adjoint, t);
    Channel::new(e.target().clone(), e.source().clone(), m)
}

/// The measure-averaged rotated recovery map ∫ ℛ^{t} dμ(t), evaluated via
/// the measure's node rule (exact for the discrete kinds).
pub fn averaged_petz(alpha: &FaithfulState, e: &Channel, mu: &Measure) -> Result<Channel> {
    check_prior_algebra(alpha, e)?;
    mu.validate()?;
    require_cptp(e)?;
    let pair = StatePair::from_channel(e, alpha)?;
    let adjoint = e.matrix().adjoint();
    let mut m = Mat::zeros(e.source().total_dim(), e.target().total_dim());
    for (t, w) in mu.nodes_weights() {
        m += rotated_matrix(alpha, &pair.prediction, &adjoint, t).map(|v| v * C64::new(w, 0.0));
    }
    Channel::new(e.target().clone(), e.source().clone(), m)
}

fn check_unitary_fixes_state(u: &Element, state: &FaithfulState) -> Result<()> {
    let uu = u.mul(&u.adjoint())?;
    let unit_dev = element_distance(&uu, &Element::identity(u.algebra()));
    if unit_dev > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "element is not unitary (deviation {unit_dev:.3e})"
        )));
    }
    let conj = u.mul(state.element())?.mul(&u.adjoint())?;
    let dev = element_distance(&conj, state.element());
    if dev > 1e-8 {
        return Err(Error::UnitaryStateMismatch { deviation: dev });
    }
    Ok(())
}

/// The phase-conjugated recovery map Ad_{U_α†} ∘ ℛ ∘ Ad_{U_β} for unitaries
/// fixing the prior and the prediction.
pub fn sth(
    alpha: &FaithfulState,
    e: &Channel,
    u_alpha: &Element,
    u_beta: &Element,
) -> Result<Channel> {
    check_prior_algebra(alpha, e)?;
    let pair = StatePair::from_channel(e, alpha)?;
    check_unitary_fixes_state(u_alpha, alpha)?;
    check_unitary_fixes_state(u_beta, &pair.prediction)?;
    let base = petz(alpha, e)?;
    let left = Channel::ad(&u_alpha.adjoint());
    let right = Channel::ad(u_beta);
    let m = left.matrix() * base.matrix() * right.matrix();
    Channel::new(e.target().clone(), e.source().clone(), m)
}

/// The discard-and-prepare map B ↦ tr(B)·α.
pub fn discard_prepare(alpha: &FaithfulState, e: &Channel) -> Result<Channel> {
    check_prior_algebra(alpha, e)?;
    let rho = alpha.element().clone();
    Ok(Channel::from_map(e.target(), e.source(), move |b| {
        rho.scale(b.trace())
    }))
}

/// Classical Bayesian inversion Ē_{xy} = ℰ_{yx} p_x / q_y on commutative
/// algebras.
pub fn bayes_inverse(p: &FaithfulState, e: &Channel) -> Result<Channel> {
    check_prior_algebra(p, e)?;
    if !e.source().is_commutative() {
        return Err(Error::NotCommutative(e.source().block_dims().to_vec()));
    }
    if !e.target().is_commutative() {
        return Err(Error::NotCommutative(e.target().block_dims().to_vec()));
    }
    if !e.is_cptp() {
        return Err(Error::NotStochastic(
            "matrix is not column-stochastic".into(),
        ));
    }
    let pair = StatePair::from_channel(e, p)?;
    let n_x = e.source().num_blocks();
    let n_y = e.target().num_blocks();
    let mut m = Mat::zeros(n_x, n_y);
    for x in 0..n_x {
        let px = p.element().block(x)[(0, 0)].re;
        for y in 0..n_y {
            let qy = pair.prediction.element().block(y)[(0, 0)].re;
            let eyx = e.matrix()[(y, x)].re;
            m[(x, y)] = C64::new(eyx * px / qy, 0.0);
        }
    }
    Channel::new(e.target().clone(), e.source().clone(), m)
}

/// Evaluate a strategy at a (prior, channel) pair. Every call returns a
/// fresh channel computed from the pair alone.
pub fn evaluate(strategy: &Strategy, alpha: &FaithfulState, e: &Channel) -> Result<Channel> {
    match strategy {
        Strategy::Petz => petz(alpha, e),
        Strategy::RotatedPetz(t) => rotated_petz(alpha, e, *t),
        Strategy::AveragedPetz(mu) => averaged_petz(alpha, e, mu),
        Strategy::Sth(assignment) => {
            let pair = StatePair::from_channel(e, alpha)?;
            let u_alpha = assignment.unitary_for(alpha);
            let u_beta = assignment.unitary_for(&pair.prediction);
            sth(alpha, e, &u_alpha, &u_beta)
        }
        Strategy::DiscardPrepare => discard_prepare(alpha, e),
        Strategy::Bayes => bayes_inverse(alpha, e),
        Strategy::SuraceScandiClassical => Ok(ss::surace_scandi(alpha, e)?.channel),
        Strategy::Convex(terms) => {
            if terms.is_empty() {
                return Err(Error::InvalidParameter("empty convex combination".into()));
            }
            let mass: f64 = terms.iter().map(|(w, _)| w).sum();
            if (mass - 1.0).abs() > 1e-12 || terms.iter().any(|(w, _)| *w <= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "convex weights must be positive and sum to 1 (mass {mass})"
                )));
            }
            let mut m = Mat::zeros(e.source().total_dim(), e.target().total_dim());
            for (w, s) in terms {
                let part = evaluate(s, alpha, e)?;
                m += part.matrix().map(|v| v * C64::new(*w, 0.0));
            }
            Channel::new(e.target().clone(), e.source().clone(), m)
        }
    }
}

/// The retrodiction of the retrodiction:
/// evaluate(s, ℰ(α), evaluate(s, α, ℰ)).
pub fn iterate(strategy: &Strategy, alpha: &FaithfulState, e: &Channel) -> Result<Channel> {
    let pair = StatePair::from_channel(e, alpha)?;
    let first = evaluate(strategy, alpha, e)?;
    evaluate(strategy, &pair.prediction, &first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ad, Algebra};
    use crate::channels::{channel_distance, random_channel, random_faithful_state};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit_diag(theta: f64) -> FaithfulState {
        FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta]).unwrap()
    }

    fn diag_qubit_element(d0: C64, d1: C64) -> Element {
        Element::from_fn(&Algebra::qubit(), |_, i, j| {
            if i != j {
                c(0.0, 0.0)
            } else if i == 0 {
                d0
            } else {
                d1
            }
        })
    }

    fn offdiag_qubit_element(up: C64, down: C64) -> Element {
        Element::from_fn(&Algebra::qubit(), |_, i, j| {
            if i == 0 && j == 1 {
                up
            } else if i == 1 && j == 0 {
                down
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn petz_of_identity_is_identity() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 3).unwrap();
        let r = petz(&alpha, &Channel::identity(&alg)).unwrap();
        assert!(channel_distance(&r, &Channel::identity(&alg)) < 1e-12);
    }

    #[test]
    fn petz_of_flip_is_flip() {
        let alpha = qubit_diag(0.7);
        let e = Channel::ad(&Element::sigma_x());
        let r = petz(&alpha, &e).unwrap();
        assert!(channel_distance(&r, &e) < 1e-11);
    }

    #[test]
    fn petz_matches_bayes_on_the_classical_instance() {
        let p = FaithfulState::from_probs(&[0.5, 0.5]).unwrap();
        let e = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.1, 0.3, 0.9, 0.7],
        ))
        .unwrap();
        let r = petz(&p, &e).unwrap();
        let expected = [[0.25, 9.0 / 16.0], [0.75, 7.0 / 16.0]];
        for x in 0..2 {
            for y in 0..2 {
                assert_abs_diff_eq!(r.matrix()[(x, y)].re, expected[x][y], epsilon = 1e-12);
                assert_abs_diff_eq!(r.matrix()[(x, y)].im, 0.0, epsilon = 1e-12);
            }
        }
        let b = bayes_inverse(&p, &e).unwrap();
        assert!(channel_distance(&r, &b) < 1e-12);
    }

    #[test]
    fn rotated_at_zero_is_petz() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 11).unwrap();
        let e = random_channel(&alg, &alg, 2, 12);
        let r0 = rotated_petz(&alpha, &e, 0.0).unwrap();
        let p = petz(&alpha, &e).unwrap();
        assert!(channel_distance(&r0, &p) == 0.0);
    }

    #[test]
    fn rotated_of_isomorphism_is_inverse_for_any_t() {
        let alg = Algebra::qubit();
        let u = crate::channels::random_unitary_element(&alg, 7);
        let e = Channel::ad(&u);
        let alpha = random_faithful_state(&alg, 1e-3, 8).unwrap();
        let inv = e.invert_iso().unwrap();
        for t in [-1.3, 0.0, 0.4, 2.2] {
            let r = rotated_petz(&alpha, &e, t).unwrap();
            assert!(channel_distance(&r, &inv) < 1e-10, "t={t}");
        }
    }

    #[test]
    fn rotated_matches_two_term_expansion_on_bit_flip() {
        // For the bit-flip morphism the rotated recovery is the explicit
        // two-term Ad expansion with exponents phi^{it-1/2} theta^{-it+1/2}
        // and the sigma_x cross terms.
        let (theta, p, t) = (0.85, 0.3, 0.6);
        let alpha = qubit_diag(theta);
        let e = Channel::bit_flip(p).unwrap();
        let phi = (1.0 - p) * theta + p * (1.0 - theta);
        let r = rotated_petz(&alpha, &e, t).unwrap();

        let alg = Algebra::qubit();
        let z = |base: f64, expo: C64| (expo * base.ln()).exp();
        let d_exp = c(-0.5, t); // it - 1/2
        let u_exp = c(0.5, -t); // -it + 1/2
        let v1 = diag_qubit_element(
            z(phi, d_exp) * z(theta, u_exp),
            z(1.0 - phi, d_exp) * z(1.0 - theta, u_exp),
        );
        let v2 = offdiag_qubit_element(
            z(1.0 - phi, d_exp) * z(theta, u_exp),
            z(phi, d_exp) * z(1.0 - theta, u_exp),
        );
        let expected_mat = Channel::ad(&v1).matrix().map(|v| v * c(1.0 - p, 0.0))
            + Channel::ad(&v2).matrix().map(|v| v * c(p, 0.0));
        let expected = Channel::new(alg.clone(), alg, expected_mat).unwrap();
        assert!(channel_distance(&r, &expected) < 1e-11);
    }

    #[test]
    fn averaged_dirac_equals_rotated() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 21).unwrap();
        let e = random_channel(&alg, &alg, 2, 22);
        let t = 0.37;
        let a = averaged_petz(&alpha, &e, &Measure::Dirac { t }).unwrap();
        let r = rotated_petz(&alpha, &e, t).unwrap();
        assert!(channel_distance(&a, &r) < 1e-14);
    }

    #[test]
    fn symmetric_discrete_average_gives_the_cosine_on_e01() {
        // theta = e^{2pi}/(1+e^{2pi}); the composite morphism is the half
        // bit-flip; the symmetric average at +-t sends E01 to
        // sqrt(theta(1-theta)) cos(ln(theta/(1-theta)) t) sigma_x.
        let theta =
            (2.0 * std::f64::consts::PI).exp() / (1.0 + (2.0 * std::f64::consts::PI).exp());
        let t = 0.5;
        let alpha = qubit_diag(theta);
        let e = Channel::bit_flip(0.5).unwrap();
        let mu = Measure::DiscreteConvex {
            points: vec![(t, 0.5), (-t, 0.5)],
        };
        let r = averaged_petz(&alpha, &e, &mu).unwrap();
        let e01 = Element::matrix_unit(&Algebra::qubit(), 0, 0, 1);
        let out = r.apply(&e01).unwrap();
        let coeff =
            (theta * (1.0 - theta)).sqrt() * ((theta / (1.0 - theta)).ln() * t).cos();
        let expected = Element::sigma_x().scale(c(coeff, 0.0));
        assert!(element_distance(&out, &expected) < 1e-12);
    }

    #[test]
    fn jrsww_average_on_covariant_instance_equals_petz() {
        let alg = Algebra::qubit();
        let alpha = FaithfulState::maximally_mixed(&alg);
        let e = Channel::bit_flip(0.23).unwrap();
        assert!(e.is_covariant(&alpha, 1e-9).unwrap());
        let a = averaged_petz(&alpha, &e, &Measure::jrsww()).unwrap();
        let p = petz(&alpha, &e).unwrap();
        assert!(channel_distance(&a, &p) < 1e-9);
    }

    #[test]
    fn sth_with_identity_unitaries_is_petz() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 31).unwrap();
        let e = random_channel(&alg, &alg, 2, 32);
        let id = Element::identity(&alg);
        let s = sth(&alpha, &e, &id, &id).unwrap();
        let p = petz(&alpha, &e).unwrap();
        assert!(channel_distance(&s, &p) < 1e-13);
    }

    #[test]
    fn sth_phase_example_leaves_residual_conjugation() {
        // alpha = diag(p, 1-p), flip channel, diagonal phase unitaries:
        // the recovery is Ad_V . inverse with V = diag(e^{i(omega-theta)},
        // e^{i(psi-phi)}).
        let p = 0.3;
        let alpha = qubit_diag(p);
        let e = Channel::ad(&Element::sigma_x());
        let (th, ph, ps, om) = (0.4, 1.1, 2.0, 0.7);
        let ua = diag_qubit_element(c(0.0, th).exp(), c(0.0, ph).exp());
        let ub = diag_qubit_element(c(0.0, ps).exp(), c(0.0, om).exp());
        let s = sth(&alpha, &e, &ua, &ub).unwrap();

        let v = diag_qubit_element(c(0.0, om - th).exp(), c(0.0, ps - ph).exp());
        let expected = Channel::compose(&Channel::ad(&v), &e.invert_iso().unwrap()).unwrap();
        assert!(channel_distance(&s, &expected) < 1e-11);
        // and it differs from the plain inverse
        assert!(channel_distance(&s, &e.invert_iso().unwrap()) > 1e-3);
    }

    #[test]
    fn sth_reduces_to_bayes_on_commutative_instances() {
        let p = FaithfulState::from_probs(&[0.35, 0.65]).unwrap();
        let e = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[0.2, 0.55, 0.8, 0.45],
        ))
        .unwrap();
        let s = evaluate(&Strategy::Sth(UnitaryAssignment::nontrivial()), &p, &e).unwrap();
        let b = bayes_inverse(&p, &e).unwrap();
        assert!(channel_distance(&s, &b) < 1e-11);
    }

    #[test]
    fn sth_rejects_unitary_that_moves_the_state() {
        let alpha = qubit_diag(0.7);
        let e = Channel::identity(&Algebra::qubit());
        let sx = Element::sigma_x();
        let id = Element::identity(&Algebra::qubit());
        assert!(matches!(
            sth(&alpha, &e, &sx, &id),
            Err(Error::UnitaryStateMismatch { .. })
        ));
    }

    #[test]
    fn discard_prepare_examples() {
        let alg = Algebra::qubit();
        let alpha = qubit_diag(0.6);
        let e = Channel::bit_flip(0.25).unwrap();
        let r = discard_prepare(&alpha, &e).unwrap();
        let beta = e.apply(alpha.element()).unwrap();
        assert!(element_distance(&r.apply(&beta).unwrap(), alpha.element()) < 1e-12);
        let e01 = Element::matrix_unit(&alg, 0, 0, 1);
        assert!(r.apply(&e01).unwrap().op_norm() < 1e-14);
        // never the identity in dimension > 1
        let r_id = discard_prepare(&alpha, &Channel::identity(&alg)).unwrap();
        assert!(channel_distance(&r_id, &Channel::identity(&alg)) > 0.1);
    }

    #[test]
    fn bayes_examples() {
        let p = FaithfulState::from_probs(&[0.4, 0.6]).unwrap();
        let cl = Algebra::classical(2);
        let id = Channel::identity(&cl);
        assert!(channel_distance(&bayes_inverse(&p, &id).unwrap(), &id) < 1e-13);

        let swap = Channel::permutation(&cl, &[1, 0]).unwrap();
        let inv = bayes_inverse(&p, &swap).unwrap();
        assert!(channel_distance(&inv, &swap) < 1e-13);

        // non-commutative input errors
        let alpha = qubit_diag(0.5);
        assert!(matches!(
            bayes_inverse(&alpha, &Channel::bit_flip(0.2).unwrap()),
            Err(Error::NotCommutative(_))
        ));
    }

    #[test]
    fn evaluate_dispatch() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 41).unwrap();
        let e = random_channel(&alg, &alg, 2, 42);

        let single =
            evaluate(&Strategy::Convex(vec![(1.0, Strategy::Petz)]), &alpha, &e).unwrap();
        assert!(channel_distance(&single, &petz(&alpha, &e).unwrap()) < 1e-14);

        let dirac0 = evaluate(
            &Strategy::AveragedPetz(Measure::Dirac { t: 0.0 }),
            &alpha,
            &e,
        )
        .unwrap();
        assert!(channel_distance(&dirac0, &petz(&alpha, &e).unwrap()) < 1e-14);

        // bad convex weights
        assert!(evaluate(
            &Strategy::Convex(vec![(0.4, Strategy::Petz), (0.4, Strategy::Petz)]),
            &alpha,
            &e
        )
        .is_err());
    }

    #[test]
    fn iterate_petz_recovers_the_channel() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-3, 51).unwrap();
        let e = random_channel(&alg, &alg, 2, 52);
        let back = iterate(&Strategy::Petz, &alpha, &e).unwrap();
        assert!(channel_distance(&back, &e) < 1e-9);
    }

    #[test]
    fn iterate_rotated_is_the_modular_conjugate() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-2, 61).unwrap();
        let e = random_channel(&alg, &alg, 2, 62);
        let t = 0.45;
        let back = iterate(&Strategy::RotatedPetz(t), &alpha, &e).unwrap();
        let beta = FaithfulState::new(e.apply(alpha.element()).unwrap(), 1e-12).unwrap();
        let conj = Channel::compose(
            &Channel::ad(&beta.power(c(0.0, -2.0 * t))),
            &Channel::compose(&e, &Channel::ad(&alpha.power(c(0.0, 2.0 * t)))).unwrap(),
        )
        .unwrap();
        assert!(channel_distance(&back, &conj) < 1e-10);
    }

    #[test]
    fn iterate_averaged_follows_the_convolution() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-2, 71).unwrap();
        let e = random_channel(&alg, &alg, 2, 72);
        let mu = Measure::DiscreteConvex {
            points: vec![(0.3, 0.25), (-0.5, 0.75)],
        };
        let nu = Measure::DiscreteConvex {
            points: vec![(0.9, 0.6), (0.1, 0.4)],
        };
        let first = averaged_petz(&alpha, &e, &mu).unwrap();
        let beta = FaithfulState::new(e.apply(alpha.element()).unwrap(), 1e-12).unwrap();
        let second = averaged_petz(&beta, &first, &nu).unwrap();

        let conv = mu.convolve(&nu).unwrap();
        let mut m = Mat::zeros(alg.total_dim(), alg.total_dim());
        for (r, w) in conv.nodes_weights() {
            let inner = Channel::compose(
                &Channel::ad(&beta.power(c(0.0, -r))),
                &Channel::compose(&e, &Channel::ad(&alpha.power(c(0.0, r)))).unwrap(),
            )
            .unwrap();
            m += inner.matrix().map(|v| v * c(w, 0.0));
        }
        let expected = Channel::new(alg.clone(), alg.clone(), m).unwrap();
        assert!(channel_distance(&second, &expected) < 1e-8);
    }

    #[test]
    fn state_is_preserved_by_all_families_on_a_random_instance() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-2, 81).unwrap();
        let e = random_channel(&alg, &alg, 2, 82);
        let beta = e.apply(alpha.element()).unwrap();
        for s in [
            Strategy::Petz,
            Strategy::RotatedPetz(0.7),
            Strategy::AveragedPetz(Measure::jrsww()),
            Strategy::Sth(UnitaryAssignment::nontrivial()),
            Strategy::DiscardPrepare,
        ] {
            let r = evaluate(&s, &alpha, &e).unwrap();
            let dev = element_distance(&r.apply(&beta).unwrap(), alpha.element());
            assert!(dev < 1e-8, "{}: {dev}", s.label());
            assert!(r.is_cptp(), "{}", s.label());
        }
    }

    #[test]
    fn sth_respects_a_fixed_assignment_under_composition() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-2, 91).unwrap();
        let e = random_channel(&alg, &alg, 2, 92);
        let f = random_channel(&alg, &alg, 2, 93);
        let strategy = Strategy::Sth(UnitaryAssignment::nontrivial());
        let beta = FaithfulState::new(e.apply(alpha.element()).unwrap(), 1e-12).unwrap();

        let composite =
            evaluate(&strategy, &alpha, &Channel::compose(&f, &e).unwrap()).unwrap();
        let chained = Channel::compose(
            &evaluate(&strategy, &alpha, &e).unwrap(),
            &evaluate(&strategy, &beta, &f).unwrap(),
        )
        .unwrap();
        assert!(channel_distance(&composite, &chained) < 1e-9);
    }

    #[test]
    fn phase_rule_unitary_commutes_with_the_state() {
        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 1e-2, 101).unwrap();
        let e = random_channel(&alg, &alg, 2, 102);
        let beta = FaithfulState::new(e.apply(alpha.element()).unwrap(), 1e-12).unwrap();
        let u = PhaseRule::nontrivial().unitary_for(&beta);
        let moved = ad(&u, beta.element()).unwrap();
        assert!(element_distance(&moved, beta.element()) < 1e-9);
    }
}

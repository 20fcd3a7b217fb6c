//! Golden reproductions of the built-in worked computations: the convex
//! rotated-average counterexample chain, its smoothed-average variant, the
//! classical determinant-maximization chain, and the involutivity-uniqueness
//! scan.
//!
//! All hyperbolic constants are computed from scratch through exp/sinh/cosh
//! rather than hard-coded decimals, so the goldens exercise the pipeline
//! instead of transcription.

use serde::{Deserialize, Serialize};

use crate::algebra::{element_distance, Algebra, Element, FaithfulState, C64};
use crate::channels::{channel_distance, Channel};
use crate::error::Result;
use crate::json::{ChannelJson, ElementJson};
use crate::measure::Measure;
use crate::retrodiction::{evaluate, iterate, Strategy};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    Real { value: f64 },
    Element { value: ElementJson },
    Channel { value: ChannelJson },
}

/// One named comparison with its tolerance. `lower_bound` marks the few
/// checks that assert `computed ≥ expected` instead of closeness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenResult {
    pub name: String,
    pub computed: Quantity,
    pub expected: Quantity,
    pub deviation: f64,
    pub tolerance: f64,
    pub provenance: String,
    #[serde(default)]
    pub lower_bound: bool,
    pub pass: bool,
}

impl GoldenResult {
    pub fn real(name: &str, computed: f64, expected: f64, tol: f64, prov: &str) -> Self {
        let deviation = (computed - expected).abs();
        GoldenResult {
            name: name.into(),
            computed: Quantity::Real { value: computed },
            expected: Quantity::Real { value: expected },
            deviation,
            tolerance: tol,
            provenance: prov.into(),
            lower_bound: false,
            pass: deviation <= tol,
        }
    }

    pub fn real_at_least(name: &str, computed: f64, bound: f64, prov: &str) -> Self {
        GoldenResult {
            name: name.into(),
            computed: Quantity::Real { value: computed },
            expected: Quantity::Real { value: bound },
            deviation: (bound - computed).max(0.0),
            tolerance: 0.0,
            provenance: prov.into(),
            lower_bound: true,
            pass: computed >= bound,
        }
    }

    pub fn element(
        name: &str,
        computed: &Element,
        expected: &Element,
        tol: f64,
        prov: &str,
    ) -> Self {
        let deviation = element_distance(computed, expected);
        GoldenResult {
            name: name.into(),
            computed: Quantity::Element {
                value: computed.into(),
            },
            expected: Quantity::Element {
                value: expected.into(),
            },
            deviation,
            tolerance: tol,
            provenance: prov.into(),
            lower_bound: false,
            pass: deviation <= tol,
        }
    }

    pub fn channel(
        name: &str,
        computed: &Channel,
        expected: &Channel,
        tol: f64,
        prov: &str,
    ) -> Self {
        let deviation = channel_distance(computed, expected);
        GoldenResult {
            name: name.into(),
            computed: Quantity::Channel {
                value: computed.into(),
            },
            expected: Quantity::Channel {
                value: expected.into(),
            },
            deviation,
            tolerance: tol,
            provenance: prov.into(),
            lower_bound: false,
            pass: deviation <= tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub schema_version: String,
    pub name: String,
    pub results: Vec<GoldenResult>,
    pub pass: bool,
}

impl ReproduceReport {
    pub fn new(name: &str, results: Vec<GoldenResult>) -> Self {
        let pass = results.iter().all(|r| r.pass);
        ReproduceReport {
            schema_version: crate::json::SCHEMA_VERSION.to_string(),
            name: name.into(),
            results,
            pass,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.name));
        for r in &self.results {
            let status = if r.pass { "pass" } else { "FAIL" };
            let rel = if r.lower_bound { ">=" } else { "vs" };
            let show = |q: &Quantity| -> String {
                match q {
                    Quantity::Real { value } => format!("{value:.12e}"),
                    Quantity::Element { .. } => "<element>".into(),
                    Quantity::Channel { .. } => "<channel>".into(),
                }
            };
            out.push_str(&format!(
                "[{status}] {:<44} {} {} {}  deviation {:.3e} (tol {:.1e})\n",
                r.name,
                show(&r.computed),
                rel,
                show(&r.expected),
                r.deviation,
                r.tolerance
            ));
            if !r.pass {
                out.push_str(&format!(
                    "       computed: {}\n       expected: {}\n",
                    serde_json::to_string(&r.computed).unwrap_or_default(),
                    serde_json::to_string(&r.expected).unwrap_or_default()
                ));
            }
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.name,
            if self.pass { "all pass" } else { "FAILURES" }
        ));
        out
    }
}

const PI: f64 = std::f64::consts::PI;

fn e01() -> Element {
    Element::matrix_unit(&Algebra::qubit(), 0, 0, 1)
}

fn scaled(e: &Element, s: f64) -> Element {
    e.scale(C64::new(s, 0.0))
}

/// θ = e^{2π}/(1+e^{2π}), p = tanh(π/2)/(2 sinh π), q = 1/2: the bit-flip
/// chain all three counterexample computations share.
struct BitFlipChain {
    alpha: FaithfulState,
    beta: FaithfulState,
    e: Channel,
    f: Channel,
    theta: f64,
}

fn bit_flip_chain() -> Result<BitFlipChain> {
    let theta = (2.0 * PI).exp() / (1.0 + (2.0 * PI).exp());
    let p = (PI / 2.0).tanh() / (2.0 * PI.sinh());
    let alpha = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta])?;
    let e = Channel::bit_flip(p)?;
    let beta = FaithfulState::with_default_floor(e.apply(alpha.element())?)?;
    let f = Channel::bit_flip(0.5)?;
    Ok(BitFlipChain {
        alpha,
        beta,
        e,
        f,
        theta,
    })
}

/// The symmetric two-point rotated average on the bit-flip chain:
/// compositionality and tensoriality counterexamples with closed-form
/// values.
pub fn appendix_b() -> Result<Vec<GoldenResult>> {
    let t = 0.5;
    let chain = bit_flip_chain()?;
    let strategy = Strategy::Convex(vec![
        (0.5, Strategy::RotatedPetz(t)),
        (0.5, Strategy::RotatedPetz(-t)),
    ]);
    let mut results = Vec::new();

    // the prediction lands at e^{pi}/(1+e^{pi})
    let phi = chain.beta.element().block(0)[(0, 0)].re;
    results.push(GoldenResult::real(
        "prediction-weight",
        phi,
        PI.exp() / (1.0 + PI.exp()),
        1e-12,
        "appendix-b",
    ));

    // (i) composite morphism acting on E01: coefficient −1/(2 cosh π)
    let fe = Channel::compose(&chain.f, &chain.e)?;
    let composite_map = evaluate(&strategy, &chain.alpha, &fe)?;
    let composite_out = composite_map.apply(&e01())?;
    let coeff = -1.0 / (2.0 * PI.cosh());
    results.push(GoldenResult::element(
        "composite-on-e01",
        &composite_out,
        &scaled(&Element::sigma_x(), coeff),
        1e-10,
        "appendix-b (i)",
    ));
    results.push(GoldenResult::real(
        "composite-coefficient",
        composite_out.block(0)[(0, 1)].re,
        coeff,
        1e-10,
        "appendix-b (i)",
    ));

    // (ii) chained retrodictions annihilate E01
    let chained = Channel::compose(
        &evaluate(&strategy, &chain.alpha, &chain.e)?,
        &evaluate(&strategy, &chain.beta, &chain.f)?,
    )?;
    let chained_out = chained.apply(&e01())?;
    results.push(GoldenResult::element(
        "chained-on-e01",
        &chained_out,
        &Element::zero(&Algebra::qubit()),
        1e-10,
        "appendix-b (ii)",
    ));

    // general-θ closed form at a handful of interior points
    for (k, theta) in [0.15, 0.3, 0.45, 0.6, 0.9].into_iter().enumerate() {
        let alpha = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta])?;
        let map = evaluate(&strategy, &alpha, &Channel::bit_flip(0.5)?)?;
        let out = map.apply(&e01())?;
        let c = (theta * (1.0 - theta)).sqrt() * ((theta / (1.0 - theta)).ln() * t).cos();
        results.push(GoldenResult::element(
            &format!("half-flip-on-e01-theta{k}"),
            &out,
            &scaled(&Element::sigma_x(), c),
            1e-10,
            "appendix-b closed form",
        ));
    }

    // (iii) tensor counterexample at p = p' = 1/2
    let (th1, th2) = (0.3, 0.8);
    let a1 = FaithfulState::diagonal(&Algebra::qubit(), &[th1, 1.0 - th1])?;
    let a2 = FaithfulState::diagonal(&Algebra::qubit(), &[th2, 1.0 - th2])?;
    let half = Channel::bit_flip(0.5)?;
    let product_prior =
        FaithfulState::with_default_floor(a1.element().tensor(a2.element()))?;
    let joint = evaluate(
        &strategy,
        &product_prior,
        &Channel::tensor(&half, &half),
    )?;
    let separate = Channel::tensor(
        &evaluate(&strategy, &a1, &half)?,
        &evaluate(&strategy, &a2, &half)?,
    );
    let probe = e01().tensor(&e01());
    let joint_out = joint.apply(&probe)?;
    let separate_out = separate.apply(&probe)?;
    let root = (th1 * (1.0 - th1) * th2 * (1.0 - th2)).sqrt();
    let (c1, s1) = {
        let a = ((1.0 - th1) / th1).ln() * t;
        (a.cos(), a.sin())
    };
    let (c2, s2) = {
        let a = ((1.0 - th2) / th2).ln() * t;
        (a.cos(), a.sin())
    };
    let sxx = Element::sigma_x().tensor(&Element::sigma_x());
    let syy = Element::sigma_y().tensor(&Element::sigma_y());
    let joint_expected = scaled(&sxx, root * c1 * c2).add(&scaled(&syy, root * s1 * s2))?;
    results.push(GoldenResult::element(
        "joint-tensor-on-e01e01",
        &joint_out,
        &joint_expected,
        1e-10,
        "appendix-b (iii)",
    ));
    results.push(GoldenResult::element(
        "separate-tensor-on-e01e01",
        &separate_out,
        &scaled(&sxx, root * c1 * c2),
        1e-10,
        "appendix-b (iii)",
    ));
    results.push(GoldenResult::real_at_least(
        "tensor-discrepancy",
        element_distance(&joint_out, &separate_out),
        (root * s1 * s2).abs() * 0.5,
        "appendix-b (iii)",
    ));

    Ok(results)
}

/// The smoothed-average (universal recovery) variant on the same chain:
/// the 1.65 compositionality factor and the tensor coefficients, each
/// computed both through the quadrature pipeline and from the closed-form
/// hyperbolic expressions.
pub fn appendix_c() -> Result<Vec<GoldenResult>> {
    let chain = bit_flip_chain()?;
    let mu = Measure::jrsww();
    let strategy = Strategy::AveragedPetz(mu.clone());
    let mut results = Vec::new();

    // quadrature self-test: total mass
    results.push(GoldenResult::real(
        "quadrature-mass",
        mu.mass(),
        1.0,
        1e-12,
        "appendix-c self-test",
    ));

    // (i) composite morphism on E01: coefficient π √(θ(1−θ)) / sinh π
    let root = (chain.theta * (1.0 - chain.theta)).sqrt();
    let fe = Channel::compose(&chain.f, &chain.e)?;
    let direct_out = evaluate(&strategy, &chain.alpha, &fe)?.apply(&e01())?;
    let direct_coeff = PI * root / PI.sinh();
    results.push(GoldenResult::element(
        "composite-on-e01",
        &direct_out,
        &scaled(&Element::sigma_x(), direct_coeff),
        1e-8,
        "appendix-c (i)",
    ));

    // (ii) chained retrodictions: the extra bracket factor
    let chained = Channel::compose(
        &evaluate(&strategy, &chain.alpha, &chain.e)?,
        &evaluate(&strategy, &chain.beta, &chain.f)?,
    )?;
    let chained_out = chained.apply(&e01())?;
    let bracket = (PI / 2.0) * (4.0 - 3.0 * PI.cosh() - (3.0 * PI).cosh())
        / (PI.sinh() + (2.0 * PI).sinh() - (3.0 * PI).sinh());
    results.push(GoldenResult::real(
        "bracket-factor-closed-form",
        bracket,
        1.65,
        0.01,
        "appendix-c (ii): approximately 1.65",
    ));
    let ratio = chained_out.block(0)[(0, 1)].re / direct_out.block(0)[(0, 1)].re;
    results.push(GoldenResult::real(
        "chained-over-composite-ratio",
        ratio,
        bracket,
        1e-6,
        "appendix-c (ii)",
    ));
    results.push(GoldenResult::element(
        "chained-on-e01",
        &chained_out,
        &scaled(&Element::sigma_x(), direct_coeff * bracket),
        1e-8,
        "appendix-c (ii)",
    ));

    // (iii) tensor instance at θ = θ' = 1/(1+e^{2π}), p = p' = 1/2
    let theta = 1.0 / (1.0 + (2.0 * PI).exp());
    let a1 = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta])?;
    let half = Channel::bit_flip(0.5)?;
    let product_prior =
        FaithfulState::with_default_floor(a1.element().tensor(a1.element()))?;
    let probe = e01().tensor(&e01());
    let root2 = theta * (1.0 - theta); // sqrt over both factors combined
    let sxx = Element::sigma_x().tensor(&Element::sigma_x());
    let syy = Element::sigma_y().tensor(&Element::sigma_y());

    let separate = Channel::tensor(
        &evaluate(&strategy, &a1, &half)?,
        &evaluate(&strategy, &a1, &half)?,
    );
    let separate_out = separate.apply(&probe)?;
    let sep_coeff = root2 * (PI / PI.sinh()) * (PI / PI.sinh());
    results.push(GoldenResult::element(
        "separate-tensor-on-e01e01",
        &separate_out,
        &scaled(&sxx, sep_coeff),
        1e-8,
        "appendix-c (iii)",
    ));

    let joint = evaluate(
        &strategy,
        &product_prior,
        &Channel::tensor(&half, &half),
    )?;
    let joint_out = joint.apply(&probe)?;
    let xx_coeff = root2 * (PI / 2.0) * (1.0 / PI + 1.0 / (PI.cosh() * PI.sinh()));
    let yy_coeff = root2 * (PI / 2.0) * (1.0 / PI - 1.0 / (PI.cosh() * PI.sinh()));
    let joint_expected = scaled(&sxx, xx_coeff).add(&scaled(&syy, yy_coeff))?;
    results.push(GoldenResult::element(
        "joint-tensor-on-e01e01",
        &joint_out,
        &joint_expected,
        1e-8,
        "appendix-c (iii)",
    ));

    Ok(results)
}

/// The exact rational two-point chain for the determinant-maximizing map:
/// three recovery matrices and the composite mismatch.
pub fn appendix_d() -> Result<Vec<GoldenResult>> {
    let alpha = FaithfulState::from_probs(&[0.5, 0.5])?;
    let beta = FaithfulState::from_probs(&[0.2, 0.8])?;
    let e = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[0.1, 0.3, 0.9, 0.7],
    ))?;
    let f = Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[0.3, 0.6, 0.7, 0.4],
    ))?;
    let strategy = Strategy::SuraceScandiClassical;
    let mut results = Vec::new();

    let stoch = |rows: [[f64; 2]; 2]| -> Result<Channel> {
        Channel::from_stochastic(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        ))
    };

    // prediction states along the chain
    let q = e.apply(alpha.element())?;
    results.push(GoldenResult::real(
        "beta-first-weight",
        q.block(0)[(0, 0)].re,
        0.2,
        1e-14,
        "appendix-d",
    ));
    let gamma = f.apply(&q)?;
    results.push(GoldenResult::real(
        "gamma-first-weight",
        gamma.block(0)[(0, 0)].re,
        27.0 / 50.0,
        1e-14,
        "appendix-d",
    ));

    let r_e = evaluate(&strategy, &alpha, &e)?;
    results.push(GoldenResult::channel(
        "recovery-of-first",
        &r_e,
        &stoch([[0.0, 5.0 / 8.0], [1.0, 3.0 / 8.0]])?,
        1e-12,
        "appendix-d",
    ));

    let r_f = evaluate(&strategy, &beta, &f)?;
    results.push(GoldenResult::channel(
        "recovery-of-second",
        &r_f,
        &stoch([[0.0, 10.0 / 23.0], [1.0, 13.0 / 23.0]])?,
        1e-12,
        "appendix-d",
    ));

    let fe = Channel::compose(&f, &e)?;
    let r_fe = evaluate(&strategy, &alpha, &fe)?;
    results.push(GoldenResult::channel(
        "recovery-of-composite",
        &r_fe,
        &stoch([[25.0 / 27.0, 0.0], [2.0 / 27.0, 1.0]])?,
        1e-12,
        "appendix-d",
    ));

    let chained = Channel::compose(&r_e, &r_f)?;
    let chained_expected = stoch([
        [5.0 / 8.0, 65.0 / 184.0],
        [3.0 / 8.0, 119.0 / 184.0],
    ])?;
    results.push(GoldenResult::channel(
        "chained-recoveries",
        &chained,
        &chained_expected,
        1e-12,
        "appendix-d",
    ));

    // the mismatch itself, as an exact number
    let expected_gap = channel_distance(&chained_expected, &stoch([[25.0 / 27.0, 0.0], [2.0 / 27.0, 1.0]])?);
    results.push(GoldenResult::real(
        "composite-vs-chained-gap",
        channel_distance(&chained, &r_fe),
        expected_gap,
        1e-12,
        "appendix-d",
    ));

    Ok(results)
}

/// The involutivity-uniqueness instance: modular log-ratios −π and π√2, a
/// zero residual at rotation parameter 0, and a falsification scan (not a
/// proof) over the grid t ∈ {−3, …, 3} step 0.01.
pub fn involution_uniqueness() -> Result<Vec<GoldenResult>> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let theta = 1.0 / (1.0 + (PI * (sqrt2 + 1.0) / 2.0).exp());
    let p = (PI / 2.0).sinh() / ((PI / 2.0).sinh() + (PI / sqrt2).sinh());
    let alpha = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta])?;
    let e = Channel::bit_flip(p)?;
    let beta_el = e.apply(alpha.element())?;
    let phi = beta_el.block(0)[(0, 0)].re;
    let mut results = Vec::new();

    results.push(GoldenResult::real(
        "prediction-weight",
        phi,
        1.0 / (1.0 + (PI * (sqrt2 - 1.0) / 2.0).exp()),
        1e-10,
        "involution",
    ));

    let chi = theta * (1.0 - phi) / ((1.0 - theta) * phi);
    let omega = (1.0 - theta) * (1.0 - phi) / (theta * phi);
    results.push(GoldenResult::real(
        "log-chi",
        chi.ln(),
        -PI,
        1e-10,
        "involution",
    ));
    results.push(GoldenResult::real(
        "log-omega",
        omega.ln(),
        PI * sqrt2,
        1e-10,
        "involution",
    ));

    let residual_at = |t: f64| -> Result<f64> {
        let back = iterate(&Strategy::RotatedPetz(t), &alpha, &e)?;
        Ok(channel_distance(&back, &e))
    };

    results.push(GoldenResult::real(
        "residual-at-zero",
        residual_at(0.0)?,
        0.0,
        1e-9,
        "involution",
    ));

    let mut min_nonzero = f64::INFINITY;
    let mut argmin = 0.0;
    for k in -300..=300i32 {
        if k == 0 {
            continue;
        }
        let t = k as f64 * 0.01;
        let r = residual_at(t)?;
        if r < min_nonzero {
            min_nonzero = r;
            argmin = t;
        }
    }
    results.push(GoldenResult::real_at_least(
        &format!("min-grid-residual (attained at t={argmin})"),
        min_nonzero,
        1e-3,
        "involution scan",
    ));

    Ok(results)
}

/// All reproduction suites in order.
pub fn run_all() -> Result<Vec<ReproduceReport>> {
    Ok(vec![
        ReproduceReport::new("appendix-b", appendix_b()?),
        ReproduceReport::new("appendix-c", appendix_c()?),
        ReproduceReport::new("appendix-d", appendix_d()?),
        ReproduceReport::new("involution", involution_uniqueness()?),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_b_passes() {
        let results = appendix_b().unwrap();
        for r in &results {
            assert!(r.pass, "{}: deviation {:.3e}", r.name, r.deviation);
        }
    }

    #[test]
    fn appendix_c_passes() {
        let results = appendix_c().unwrap();
        for r in &results {
            assert!(r.pass, "{}: deviation {:.3e}", r.name, r.deviation);
        }
    }

    #[test]
    fn appendix_d_passes() {
        let results = appendix_d().unwrap();
        for r in &results {
            assert!(r.pass, "{}: deviation {:.3e}", r.name, r.deviation);
        }
    }

    #[test]
    fn involution_uniqueness_passes() {
        let results = involution_uniqueness().unwrap();
        for r in &results {
            assert!(r.pass, "{}: deviation {:.3e}", r.name, r.deviation);
        }
    }
}

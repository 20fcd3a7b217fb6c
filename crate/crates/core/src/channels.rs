//! CPTP superoperators between algebras: application, composition, tensor
//! products, the Hilbert–Schmidt adjoint, Choi-based complete-positivity
//! verification, covariance and *-isomorphism detection, and seeded random
//! instance generation.
//!
//! A channel stores its matrix in the vectorization convention fixed by
//! [`Element::vectorize`]: blocks in order, column-stacked within a block.

use std::sync::OnceLock;


use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    hermitian_eigenvalues, spectral_norm, Algebra, Element, FaithfulState, C64, Mat, DEFAULT_FLOOR,
    DEFAULT_TOL,
};
use crate::error::{Error, Result};

/// Diagnostic attached to a cached CPTP verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpVerdict {
    pub ok: bool,
    /// Most negative Choi eigenvalue found, scaled by the Choi norm.
    pub choi_negativity: f64,
    /// Largest trace defect |tr e(X) − tr X| over the matrix-unit basis.
    pub trace_defect: f64,
}

/// A linear superoperator between two algebras, with a cached CPTP verdict.
#[derive(Debug)]
pub struct Channel {
    source: Algebra,
    target: Algebra,
    matrix: Mat,
    cptp: OnceLock<CptpVerdict>,
}

impl Clone for Channel {
    fn clone(&self) -> Self {
        Channel {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.clone(),
            cptp: self.cptp.clone(),
        }
    }
}

impl Channel {
    pub fn new(source: Algebra, target: Algebra, matrix: Mat) -> Result<Self> {
        if matrix.nrows() != target.total_dim() || matrix.ncols() != source.total_dim() {
            return Err(Error::ChannelShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected_rows: target.total_dim(),
                expected_cols: source.total_dim(),
            });
        }
        Ok(Channel {
            source,
            target,
            matrix,
            cptp: OnceLock::new(),
        })
    }

    /// Build the matrix by applying `f` to every matrix-unit basis element.
    pub fn from_map(
        source: &Algebra,
        target: &Algebra,
        f: impl Fn(&Element) -> Element,
    ) -> Channel {
        let mut matrix = Mat::zeros(target.total_dim(), source.total_dim());
        let mut col = 0;
        for (x, &m) in source.block_dims().iter().enumerate() {
            for j in 0..m {
                for i in 0..m {
                    let unit = Element::matrix_unit(source, x, i, j);
                    let out = f(&unit).vectorize();
                    matrix.set_column(col, &out);
                    col += 1;
                }
            }
        }
        Channel {
            source: source.clone(),
            target: target.clone(),
            matrix,
            cptp: OnceLock::new(),
        }
    }

    pub fn identity(algebra: &Algebra) -> Channel {
        let d = algebra.total_dim();
        Channel {
            source: algebra.clone(),
            target: algebra.clone(),
            matrix: Mat::identity(d, d),
            cptp: OnceLock::new(),
        }
    }

    /// Ad_V: X ↦ V X V†, an endomorphism of V's algebra.
    pub fn ad(v: &Element) -> Channel {
        let alg = v.algebra().clone();
        Channel::from_map(&alg, &alg, |x| {
            v.mul(x).unwrap().mul(&v.adjoint()).unwrap()
        })
    }

    /// The trace channel 𝒜 → ℂ.
    pub fn trace_channel(algebra: &Algebra) -> Channel {
        let scalar = Algebra::scalar();
        Channel::from_map(algebra, &scalar, |x| {
            Element::identity(&scalar).scale(x.trace())
        })
    }

    /// The preparation channel ℂ → 𝒜, z ↦ z·ρ.
    pub fn prepare(state: &FaithfulState) -> Channel {
        let scalar = Algebra::scalar();
        let rho = state.element().clone();
        Channel::from_map(&scalar, state.algebra(), move |z| {
            rho.scale(z.block(0)[(0, 0)])
        })
    }

    /// Kraus form Σ_k K_k X K_k† between full matrix algebras.
    pub fn from_kraus(source: &Algebra, target: &Algebra, kraus: &[Mat]) -> Result<Channel> {
        if source.num_blocks() != 1 || target.num_blocks() != 1 {
            return Err(Error::InvalidParameter(
                "kraus form is supported between full matrix algebras".into(),
            ));
        }
        let m = source.block_dims()[0];
        let n = target.block_dims()[0];
        for k in kraus {
            if k.nrows() != n || k.ncols() != m {
                return Err(Error::InvalidParameter(format!(
                    "kraus operator of shape {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    n,
                    m
                )));
            }
        }
        let ops: Vec<Mat> = kraus.to_vec();
        let target_cl = target.clone();
        Ok(Channel::from_map(source, target, move |x| {
            let mut out = Mat::zeros(n, n);
            for k in &ops {
                out += k * x.block(0) * k.adjoint();
            }
            Element::new(target_cl.clone(), vec![out]).unwrap()
        }))
    }

    /// The transpose map on M_n: positive but not completely positive for
    /// n ≥ 2.
    pub fn transpose(algebra: &Algebra) -> Channel {
        Channel::from_map(algebra, algebra, |x| {
            Element::new(
                x.algebra().clone(),
                x.blocks().iter().map(|b| b.transpose()).collect(),
            )
            .unwrap()
        })
    }

    /// The bit-flip channel Ω_p = (1−p)·id + p·Ad_{σx} on M₂(ℂ).
    pub fn bit_flip(p: f64) -> Result<Channel> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bit-flip weight {p} outside [0, 1]"
            )));
        }
        let id = Channel::identity(&Algebra::qubit());
        let flip = Channel::ad(&Element::sigma_x());
        let matrix = id.matrix.map(|v| v * C64::new(1.0 - p, 0.0))
            + flip.matrix.map(|v| v * C64::new(p, 0.0));
        Channel::new(Algebra::qubit(), Algebra::qubit(), matrix)
    }

    /// Permutation of the points of a commutative algebra; `perm[y] = x`
    /// sends the basis point x to y... concretely the stochastic matrix with
    /// E_{perm(x), x} = 1.
    pub fn permutation(algebra: &Algebra, perm: &[usize]) -> Result<Channel> {
        if !algebra.is_commutative() {
            return Err(Error::NotCommutative(algebra.block_dims().to_vec()));
        }
        let n = algebra.num_blocks();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
            seen[p] = true;
        }
        if perm.len() != n {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let mut matrix = Mat::zeros(n, n);
        for (x, &y) in perm.iter().enumerate() {
            matrix[(y, x)] = C64::new(1.0, 0.0);
        }
        Channel::new(algebra.clone(), algebra.clone(), matrix)
    }

    /// Column-stochastic matrix as a channel between commutative algebras.
    pub fn from_stochastic(matrix: &nalgebra::DMatrix<f64>) -> Result<Channel> {
        let (n, m) = (matrix.nrows(), matrix.ncols());
        for j in 0..m {
            let col_sum: f64 = (0..n).map(|i| matrix[(i, j)]).sum();
            if (col_sum - 1.0).abs() > 1e-9 || (0..n).any(|i| matrix[(i, j)] < -1e-12) {
                return Err(Error::NotStochastic(format!(
                    "column {j} sums to {col_sum} or has negative entries"
                )));
            }
        }
        Channel::new(
            Algebra::classical(m),
            Algebra::classical(n),
            matrix.map(|v| C64::new(v, 0.0)),
        )
    }

    /// Dephasing onto the spectral clusters of `state`: X ↦ Σ_k Π_k X Π_k.
    /// Covariant with respect to (state, state).
    pub fn pinching(state: &FaithfulState) -> Channel {
        let clusters = state.spectral_clusters(1e-8);
        let alg = state.algebra().clone();
        Channel::from_map(&alg, &alg, move |x| {
            let blocks = x
                .blocks()
                .iter()
                .enumerate()
                .map(|(b, m)| {
                    let mut out = Mat::zeros(m.nrows(), m.ncols());
                    for (_, proj) in &clusters[b] {
                        out += proj * m * proj;
                    }
                    out
                })
                .collect();
            Element::new(x.algebra().clone(), blocks).unwrap()
        })
    }

    /// Diagonal-extraction channel M_n → ℂⁿ (measurement in the standard
    /// basis).
    pub fn classicalize(n: usize) -> Channel {
        let source = Algebra::matrix(n);
        let target = Algebra::classical(n);
        let target_cl = target.clone();
        Channel::from_map(&source, &target, move |x| {
            let b = x.block(0);
            Element::from_fn(&target_cl, |k, _, _| b[(k, k)])
        })
    }

    /// Embedding ℂⁿ → M_n as diagonal matrices.
    pub fn embed_classical(n: usize) -> Channel {
        let source = Algebra::classical(n);
        let target = Algebra::matrix(n);
        let target_cl = target.clone();
        Channel::from_map(&source, &target, move |x| {
            Element::from_fn(&target_cl, |_, i, j| {
                if i == j {
                    x.block(i)[(0, 0)]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        if a.algebra() != &self.source {
            return Err(Error::AlgebraMismatch {
                expected: self.source.block_dims().to_vec(),
                got: a.algebra().block_dims().to_vec(),
            });
        }
        let v = &self.matrix * a.vectorize();
        Element::unvectorize(&self.target, &v)
    }

    /// f ∘ e, defined when e.target = f.source.
    pub fn compose(f: &Channel, e: &Channel) -> Result<Channel> {
        if e.target != f.source {
            return Err(Error::AlgebraMismatch {
                expected: f.source.block_dims().to_vec(),
                got: e.target.block_dims().to_vec(),
            });
        }
        Channel::new(e.source.clone(), f.target.clone(), &f.matrix * &e.matrix)
    }

    /// Tensor product acting as e ⊗ e2 on product elements.
    pub fn tensor(e: &Channel, e2: &Channel) -> Channel {
        let source = e.source.tensor(&e2.source);
        let target = e.target.tensor(&e2.target);
        let mut matrix = Mat::zeros(target.total_dim(), source.total_dim());
        let nb2 = e2.source.num_blocks();
        let mut col = 0;
        for (z, _) in source.block_dims().iter().enumerate() {
            let x = z / nb2;
            let y = z % nb2;
            let m1 = e.source.block_dims()[x];
            let m2 = e2.source.block_dims()[y];
            let md = m1 * m2;
            // column-major within the product block
            for c in 0..md {
                for r in 0..md {
                    let (i, k) = (r / m2, r % m2);
                    let (j, l) = (c / m2, c % m2);
                    let a = e
                        .apply(&Element::matrix_unit(&e.source, x, i, j))
                        .expect("basis element");
                    let b = e2
                        .apply(&Element::matrix_unit(&e2.source, y, k, l))
                        .expect("basis element");
                    matrix.set_column(col, &a.tensor(&b).vectorize());
                    col += 1;
                }
            }
        }
        Channel {
            source,
            target,
            matrix,
            cptp: OnceLock::new(),
        }
    }

    /// Hilbert–Schmidt adjoint: the unique ℰ* with ⟨ℰ*(B), A⟩ = ⟨B, ℰ(A)⟩.
    /// In the vectorized convention this is the conjugate transpose.
    pub fn hs_adjoint(&self) -> Channel {
        Channel {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: self.matrix.adjoint(),
            cptp: OnceLock::new(),
        }
    }

    /// One Choi matrix per source block x: (id ⊗ ℰₓ)(|Ωₓ⟩⟨Ωₓ|) with the
    /// target embedded block-diagonally in M_N, N = Σ_y n_y. For single-block
    /// algebras this is the standard Choi matrix.
    pub fn choi_blocks(&self) -> Vec<Mat> {
        let n_tot = self.target.matrix_dim();
        let mut out = Vec::with_capacity(self.source.num_blocks());
        for (x, &m) in self.source.block_dims().iter().enumerate() {
            let mut c = Mat::zeros(m * n_tot, m * n_tot);
            for i in 0..m {
                for j in 0..m {
                    let img = self
                        .apply(&Element::matrix_unit(&self.source, x, i, j))
                        .expect("basis element");
                    let emb = block_diag_embedding(&img);
                    for u in 0..n_tot {
                        for v in 0..n_tot {
                            c[(i * n_tot + u, j * n_tot + v)] = emb[(u, v)];
                        }
                    }
                }
            }
            out.push(c);
        }
        out
    }

    /// CPTP verdict at tolerance `tol`: every Choi block PSD (eigenvalues
    /// ≥ −tol·(1 + ‖C‖)) and trace preserved on the matrix-unit basis.
    pub fn cptp_verdict(&self, tol: f64) -> CptpVerdict {
        let mut negativity = 0.0_f64;
        for c in self.choi_blocks() {
            let eigs = hermitian_eigenvalues(&c);
            let scale = 1.0 + eigs.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            // also penalize non-Hermitian Choi (not CP either)
            let herm_dev = (&c - c.adjoint()).map(|v| v.norm()).max();
            for l in eigs {
                negativity = negativity.max((-l / scale).max(0.0));
            }
            negativity = negativity.max(herm_dev / scale);
        }
        let mut trace_defect = 0.0_f64;
        for (x, &m) in self.source.block_dims().iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let unit = Element::matrix_unit(&self.source, x, i, j);
                    let d = (self.apply(&unit).unwrap().trace() - unit.trace()).norm();
                    trace_defect = trace_defect.max(d);
                }
            }
        }
        CptpVerdict {
            ok: negativity <= tol && trace_defect <= tol,
            choi_negativity: negativity,
            trace_defect,
        }
    }

    /// Cached CPTP check at the default tolerance.
    pub fn is_cptp(&self) -> bool {
        self.cptp.get_or_init(|| self.cptp_verdict(DEFAULT_TOL)).ok
    }

    pub fn is_cptp_with(&self, tol: f64) -> CptpVerdict {
        self.cptp_verdict(tol)
    }

    /// Covariance of (α, ℰ) via the generator condition
    /// ℰ([log α, X]) = [log β, ℰ(X)] on the matrix-unit basis; in finite
    /// dimension this is equivalent to intertwining the modular groups at
    /// every t.
    pub fn is_covariant(&self, alpha: &FaithfulState, tol: f64) -> Result<bool> {
        Ok(self.covariance_defect(alpha)? <= tol)
    }

    /// The normalized generator-condition defect used by `is_covariant`.
    pub fn covariance_defect(&self, alpha: &FaithfulState) -> Result<f64> {
        let beta_el = self.apply(alpha.element())?;
        let beta = FaithfulState::new(beta_el, DEFAULT_FLOOR)
            .map_err(|e| Error::PredictionNotFaithful(e.to_string()))?;
        let la = alpha.log();
        let lb = beta.log();
        let scale = 1.0 + la.op_norm() + lb.op_norm();
        let mut max_dev = 0.0_f64;
        for (x, &m) in self.source.block_dims().iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let unit = Element::matrix_unit(&self.source, x, i, j);
                    let comm = la.mul(&unit)?.sub(&unit.mul(&la)?)?;
                    let lhs = self.apply(&comm)?;
                    let img = self.apply(&unit)?;
                    let rhs = lb.mul(&img)?.sub(&img.mul(&lb)?)?;
                    max_dev = max_dev.max(lhs.sub(&rhs)?.op_norm());
                }
            }
        }
        Ok(max_dev / scale)
    }

    /// True iff the channel is an invertible, multiplicative, *-preserving
    /// map on a spanning set (condition number capped at 1e10).
    pub fn is_star_isomorphism(&self, tol: f64) -> bool {
        if self.source.total_dim() != self.target.total_dim()
            || self.source.matrix_dim() != self.target.matrix_dim()
        {
            return false;
        }
        let g = self.matrix.adjoint() * &self.matrix;
        let eigs = hermitian_eigenvalues(&g);
        let smax = eigs.iter().fold(0.0_f64, |a, &b| a.max(b)).max(0.0).sqrt();
        let smin = eigs
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
            .max(0.0)
            .sqrt();
        if smin <= 0.0 || smax / smin > 1e10 {
            return false;
        }
        let scale = 1.0 + smax * smax;
        let units = basis_units(&self.source);
        for a in &units {
            let img = self.apply(a).unwrap();
            let lhs = self.apply(&a.adjoint()).unwrap();
            if lhs.sub(&img.adjoint()).unwrap().op_norm() > tol * scale {
                return false;
            }
            for b in &units {
                let lhs = self.apply(&a.mul(b).unwrap()).unwrap();
                let rhs = img.mul(&self.apply(b).unwrap()).unwrap();
                if lhs.sub(&rhs).unwrap().op_norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Matrix inverse of a verified *-isomorphism.
    pub fn invert_iso(&self) -> Result<Channel> {
        if !self.is_star_isomorphism(DEFAULT_TOL) {
            return Err(Error::NotStarIsomorphism(
                "multiplicativity, adjoint-preservation, or invertibility fails".into(),
            ));
        }
        let inv = self
            .matrix
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::NotStarIsomorphism("matrix not invertible".into()))?;
        Channel::new(self.target.clone(), self.source.clone(), inv)
    }

    /// Spectral norm of the superoperator matrix.
    pub fn op_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}

fn basis_units(algebra: &Algebra) -> Vec<Element> {
    let mut out = Vec::with_capacity(algebra.total_dim());
    for (x, &m) in algebra.block_dims().iter().enumerate() {
        for j in 0..m {
            for i in 0..m {
                out.push(Element::matrix_unit(algebra, x, i, j));
            }
        }
    }
    out
}

/// Embed an element of ⊕_y M_{n_y} as a block-diagonal matrix in M_N.
fn block_diag_embedding(a: &Element) -> Mat {
    let n = a.algebra().matrix_dim();
    let mut out = Mat::zeros(n, n);
    let mut off = 0;
    for b in a.blocks() {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.nrows();
    }
    out
}

/// Operator-norm distance of superoperator matrices, normalized by the
/// source dimension. Infinite when the algebras differ.
pub fn channel_distance(e: &Channel, f: &Channel) -> f64 {
    if e.source != f.source || e.target != f.target {
        return f64::INFINITY;
    }
    let d = e.matrix() - f.matrix();
    spectral_norm(&d) / e.source.total_dim() as f64
}

/// A prior together with its prediction under an attached channel.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub prior: FaithfulState,
    pub prediction: FaithfulState,
}

impl StatePair {
    /// Validates that the prediction ℰ(α) is a faithful state.
    pub fn from_channel(e: &Channel, prior: &FaithfulState) -> Result<StatePair> {
        let predicted = e.apply(prior.element())?;
        let prediction = FaithfulState::new(predicted, DEFAULT_FLOOR)
            .map_err(|err| Error::PredictionNotFaithful(err.to_string()))?;
        Ok(StatePair {
            prior: prior.clone(),
            prediction,
        })
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * th.cos(), r * th.sin()) / std::f64::consts::SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-style random isometry: QR of a Gaussian matrix with the phase fix
/// that makes the factorization unique.
fn random_isometry(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let g = gaussian_matrix(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let col = q.column(j) * (phase.conj() / C64::new(1.0, 0.0));
            q.set_column(j, &col);
        }
    }
    q
}

/// Random unitary element (blockwise Haar-style).
pub fn random_unitary_element(algebra: &Algebra, seed: u64) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&m| random_isometry(&mut rng, m, m))
        .collect();
    Element::new(algebra.clone(), blocks).unwrap()
}

/// Seeded random CPTP channel, built blockwise from a random Stinespring
/// isometry into target ⊗ environment followed by the environment trace and
/// the conditional expectation onto the target's block-diagonal.
///
/// If `env_dim` is too small for an isometry to exist it is raised to the
/// smallest feasible value.
pub fn random_channel(source: &Algebra, target: &Algebra, env_dim: usize, seed: u64) -> Channel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_tot = target.matrix_dim();
    let mut isometries = Vec::with_capacity(source.num_blocks());
    for &m in source.block_dims() {
        let env = env_dim.max(m.div_ceil(n_tot)).max(1);
        isometries.push((random_isometry(&mut rng, n_tot * env, m), env));
    }
    let target_cl = target.clone();
    Channel::from_map(source, target, move |a| {
        let mut total = Mat::zeros(n_tot, n_tot);
        for (x, b) in a.blocks().iter().enumerate() {
            let (v, env) = &isometries[x];
            let big = v * b * v.adjoint();
            // partial trace over the environment factor (index layout n*env + e)
            for u in 0..n_tot {
                for w in 0..n_tot {
                    let mut s = C64::new(0.0, 0.0);
                    for e in 0..*env {
                        s += big[(u * env + e, w * env + e)];
                    }
                    total[(u, w)] += s;
                }
            }
        }
        // pinch onto the block-diagonal of the target
        let mut blocks = Vec::with_capacity(target_cl.num_blocks());
        let mut off = 0;
        for &n in target_cl.block_dims() {
            let mut blk = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    blk[(i, j)] = total[(off + i, off + j)];
                }
            }
            blocks.push(blk);
            off += n;
        }
        Element::new(target_cl.clone(), blocks).unwrap()
    })
}

/// Seeded random faithful state: a normalized Wishart-style positive element
/// mixed toward the maximally mixed state just enough to guarantee the floor.
pub fn random_faithful_state(algebra: &Algebra, floor: f64, seed: u64) -> Result<FaithfulState> {
    let m_tot = algebra.matrix_dim() as f64;
    if !(floor > 0.0) || floor >= 1.0 / m_tot {
        return Err(Error::Infeasible(format!(
            "floor {floor} not in (0, 1/{m_tot})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Mat> = algebra
        .block_dims()
        .iter()
        .map(|&m| {
            let g = gaussian_matrix(&mut rng, m, m);
            &g * g.adjoint()
        })
        .collect();
    let trace: f64 = blocks.iter().map(|b| b.trace().re).sum();
    let wishart = Element::new(algebra.clone(), blocks)?.scale(C64::new(1.0 / trace, 0.0));
    let s = (1.5 * m_tot * floor).min(1.0);
    let mixed = wishart
        .scale(C64::new(1.0 - s, 0.0))
        .add(&Element::identity(algebra).scale(C64::new(s / m_tot, 0.0)))?;
    // make it exactly Hermitian before validation
    let sym = mixed.add(&mixed.adjoint())?.scale(C64::new(0.5, 0.0));
    FaithfulState::new(sym, floor)
}

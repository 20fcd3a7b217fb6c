//! Finite-dimensional C*-algebras as direct sums of matrix blocks, their
//! elements, traces, inner products, and the functional calculus used by
//! every recovery-map formula.
//!
//! An algebra ⊕ₓ M_{mₓ}(ℂ) is described by its ordered block dimensions.
//! Commutative algebras (all blocks 1×1) model classical systems; a single
//! block models an ordinary matrix algebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

/// Default operator-norm tolerance for equality-style checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default faithfulness floor for state eigenvalues.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// A finite-dimensional C*-algebra ⊕ₓ M_{mₓ}(ℂ), stored as its ordered list
/// of block dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    dims: Vec<usize>,
}

impl Algebra {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidAlgebra("block list is empty".into()));
        }
        if dims.iter().any(|&m| m == 0) {
            return Err(Error::InvalidAlgebra("block dimension 0".into()));
        }
        Ok(Algebra { dims })
    }

    /// The full matrix algebra M_n(ℂ).
    pub fn matrix(n: usize) -> Self {
        Algebra::new(vec![n]).expect("n >= 1")
    }

    /// The commutative algebra ℂⁿ (n blocks of dimension 1).
    pub fn classical(n: usize) -> Self {
        Algebra::new(vec![1; n]).expect("n >= 1")
    }

    /// M₂(ℂ), the qubit algebra.
    pub fn qubit() -> Self {
        Algebra::matrix(2)
    }

    /// ℂ, the trivial algebra (target of the trace channel).
    pub fn scalar() -> Self {
        Algebra::matrix(1)
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Dimension as a complex vector space: Σₓ mₓ².
    pub fn total_dim(&self) -> usize {
        self.dims.iter().map(|m| m * m).sum()
    }

    /// Total matrix dimension Σₓ mₓ (size of the block-diagonal embedding).
    pub fn matrix_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Commutative iff every block is 1×1; gates the classical-only maps.
    pub fn is_commutative(&self) -> bool {
        self.dims.iter().all(|&m| m == 1)
    }

    /// Offset of block `x` in the vectorized representation.
    pub fn block_offset(&self, x: usize) -> usize {
        self.dims[..x].iter().map(|m| m * m).sum()
    }

    /// Tensor product ⊕ₓ M_{mₓ} ⊗ ⊕_y M_{n_y} = ⊕_{x,y} M_{mₓ·n_y} with
    /// x-major block order.
    pub fn tensor(&self, other: &Algebra) -> Algebra {
        let mut dims = Vec::with_capacity(self.dims.len() * other.dims.len());
        for &m in &self.dims {
            for &n in &other.dims {
                dims.push(m * n);
            }
        }
        Algebra { dims }
    }

    fn check_same(&self, other: &Algebra) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch {
                expected: self.dims.clone(),
                got: other.dims.clone(),
            });
        }
        Ok(())
    }
}

/// An element of an algebra: one complex square matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    algebra: Algebra,
    blocks: Vec<Mat>,
}

impl Element {
    pub fn new(algebra: Algebra, blocks: Vec<Mat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::InvalidAlgebra(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (x, (b, &m)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if b.nrows() != m || b.ncols() != m {
                return Err(Error::BlockShape {
                    block: x,
                    rows: b.nrows(),
                    cols: b.ncols(),
                    dim: m,
                });
            }
        }
        Ok(Element { algebra, blocks })
    }

    pub fn zero(algebra: &Algebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&m| Mat::zeros(m, m))
            .collect();
        Element {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn identity(algebra: &Algebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&m| Mat::identity(m, m))
            .collect();
        Element {
            algebra: algebra.clone(),
            blocks,
        }
    }

    /// Matrix unit E_{ij} in block `x`, zero elsewhere.
    pub fn matrix_unit(algebra: &Algebra, x: usize, i: usize, j: usize) -> Self {
        let mut e = Element::zero(algebra);
        e.blocks[x][(i, j)] = C64::new(1.0, 0.0);
        e
    }

    /// Build an element entry by entry: f(block, row, col).
    pub fn from_fn(algebra: &Algebra, f: impl Fn(usize, usize, usize) -> C64) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .enumerate()
            .map(|(x, &m)| Mat::from_fn(m, m, |i, j| f(x, i, j)))
            .collect();
        Element {
            algebra: algebra.clone(),
            blocks,
        }
    }

    /// Diagonal element with the given real entries, filled block by block.
    pub fn from_real_diagonal(algebra: &Algebra, entries: &[f64]) -> Result<Self> {
        if entries.len() != algebra.matrix_dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} diagonal entries, got {}",
                algebra.matrix_dim(),
                entries.len()
            )));
        }
        let mut e = Element::zero(algebra);
        let mut k = 0;
        for (x, &m) in algebra.block_dims().iter().enumerate() {
            for i in 0..m {
                e.blocks[x][(i, i)] = C64::new(entries[k], 0.0);
                k += 1;
            }
        }
        Ok(e)
    }

    /// Pauli σx on M₂(ℂ).
    pub fn sigma_x() -> Self {
        let alg = Algebra::qubit();
        Element::from_fn(&alg, |_, i, j| {
            if i != j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Pauli σy on M₂(ℂ).
    pub fn sigma_y() -> Self {
        let alg = Algebra::qubit();
        let mut e = Element::zero(&alg);
        e.blocks[0][(0, 1)] = C64::new(0.0, -1.0);
        e.blocks[0][(1, 0)] = C64::new(0.0, 1.0);
        e
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block(&self, x: usize) -> &Mat {
        &self.blocks[x]
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Hilbert–Schmidt inner product tr(a† b).
    pub fn hs_inner(&self, other: &Element) -> Result<C64> {
        self.algebra.check_same(&other.algebra)?;
        let mut s = C64::new(0.0, 0.0);
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            s += (a.adjoint() * b).trace();
        }
        Ok(s)
    }

    pub fn adjoint(&self) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// Blockwise matrix product.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.algebra.check_same(&other.algebra)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.algebra.check_same(&other.algebra)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.algebra.check_same(&other.algebra)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Element {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn scale(&self, s: C64) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.map(|v| v * s)).collect(),
        }
    }

    /// Operator norm: the largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| spectral_norm(b))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint())
            .map(|d| d.op_norm() <= tol)
            .unwrap_or(false)
    }

    /// True iff Hermitian within `tol` and every blockwise eigenvalue ≥ −tol.
    pub fn is_positive(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        self.blocks.iter().all(|b| {
            let eigs = hermitian_eigenvalues(b);
            eigs.iter().all(|&l| l >= -tol)
        })
    }

    /// Vectorize: blocks in order, column-stacked within a block. This is
    /// the layout channel matrices act on.
    pub fn vectorize(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.algebra.total_dim());
        let mut k = 0;
        for b in &self.blocks {
            for j in 0..b.ncols() {
                for i in 0..b.nrows() {
                    v[k] = b[(i, j)];
                    k += 1;
                }
            }
        }
        v
    }

    pub fn unvectorize(algebra: &Algebra, v: &DVector<C64>) -> Result<Element> {
        if v.len() != algebra.total_dim() {
            return Err(Error::InvalidParameter(format!(
                "vector length {} does not match algebra dimension {}",
                v.len(),
                algebra.total_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        let mut k = 0;
        for &m in algebra.block_dims() {
            let mut b = Mat::zeros(m, m);
            for j in 0..m {
                for i in 0..m {
                    b[(i, j)] = v[k];
                    k += 1;
                }
            }
            blocks.push(b);
        }
        Ok(Element {
            algebra: algebra.clone(),
            blocks,
        })
    }

    /// Tensor product, blocks in x-major order matching `Algebra::tensor`.
    pub fn tensor(&self, other: &Element) -> Element {
        let algebra = self.algebra.tensor(&other.algebra);
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        for a in &self.blocks {
            for b in &other.blocks {
                blocks.push(a.kronecker(b));
            }
        }
        Element { algebra, blocks }
    }
}

/// Ad_V(A) = V A V†.
pub fn ad(v: &Element, a: &Element) -> Result<Element> {
    v.mul(a)?.mul(&v.adjoint())
}

/// Operator-norm distance between two elements on the same algebra.
pub fn element_distance(a: &Element, b: &Element) -> f64 {
    a.sub(b).map(|d| d.op_norm()).unwrap_or(f64::INFINITY)
}

/// Largest singular value of a single block, via the Hermitian spectrum of
/// B†B.
pub(crate) fn spectral_norm(b: &Mat) -> f64 {
    if b.nrows() == 0 {
        return 0.0;
    }
    let g = b.adjoint() * b;
    hermitian_eigenvalues(&g)
        .into_iter()
        .fold(0.0_f64, f64::max)
        .max(0.0)
        .sqrt()
}

/// Eigenvalues of a Hermitian matrix, symmetrized first to absorb round-off.
pub(crate) fn hermitian_eigenvalues(b: &Mat) -> Vec<f64> {
    let h = (b + b.adjoint()).map(|v| v * C64::new(0.5, 0.0));
    h.symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// Eigendecomposition of one Hermitian block, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct BlockEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

fn hermitian_eig_sorted(b: &Mat) -> BlockEig {
    let h = (b + b.adjoint()).map(|v| v * C64::new(0.5, 0.0));
    let eig = h.symmetric_eigen();
    let m = b.nrows();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(m, m);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    BlockEig { values, vectors }
}

/// A faithful state: a Hermitian, unit-trace, positive-definite element with
/// its blockwise eigendecomposition cached.
#[derive(Debug, Clone)]
pub struct FaithfulState {
    element: Element,
    eig: Vec<BlockEig>,
    floor: f64,
}

impl FaithfulState {
    /// Validates Hermiticity and unit trace within `DEFAULT_TOL`, and that
    /// every eigenvalue is at least `floor`. Constructing below the floor is
    /// an error, never a silent projection.
    pub fn new(element: Element, floor: f64) -> Result<Self> {
        let herm_dev = element.sub(&element.adjoint())?.op_norm();
        if herm_dev > DEFAULT_TOL {
            return Err(Error::NotHermitian {
                deviation: herm_dev,
                tol: DEFAULT_TOL,
            });
        }
        let tr = element.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DEFAULT_TOL {
            return Err(Error::NotUnitTrace {
                trace: tr.re,
                tol: DEFAULT_TOL,
            });
        }
        let eig: Vec<BlockEig> = element.blocks().iter().map(hermitian_eig_sorted).collect();
        let min_eig = eig
            .iter()
            .flat_map(|e| e.values.iter().copied())
            .fold(f64::INFINITY, f64::min);
        if min_eig < floor {
            return Err(Error::NotFaithful { min_eig, floor });
        }
        Ok(FaithfulState {
            element,
            eig,
            floor,
        })
    }

    pub fn with_default_floor(element: Element) -> Result<Self> {
        FaithfulState::new(element, DEFAULT_FLOOR)
    }

    /// Classical probability vector as a state on ℂⁿ.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        let alg = Algebra::classical(probs.len());
        let el = Element::from_real_diagonal(&alg, probs)?;
        FaithfulState::with_default_floor(el)
    }

    /// Diagonal state on M_n(ℂ).
    pub fn diagonal(algebra: &Algebra, entries: &[f64]) -> Result<Self> {
        let el = Element::from_real_diagonal(algebra, entries)?;
        FaithfulState::with_default_floor(el)
    }

    pub fn maximally_mixed(algebra: &Algebra) -> Self {
        let m = algebra.matrix_dim() as f64;
        let el = Element::identity(algebra).scale(C64::new(1.0 / m, 0.0));
        FaithfulState::with_default_floor(el).expect("maximally mixed is faithful")
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn algebra(&self) -> &Algebra {
        self.element.algebra()
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn block_eigs(&self) -> &[BlockEig] {
        &self.eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig
            .iter()
            .flat_map(|e| e.values.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Functional calculus: U f(Λ) U† per block.
    fn apply_scalar(&self, f: impl Fn(f64) -> C64) -> Element {
        let blocks = self
            .eig
            .iter()
            .map(|e| {
                let m = e.values.len();
                let diag = Mat::from_fn(m, m, |i, j| {
                    if i == j {
                        f(e.values[i])
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                &e.vectors * diag * e.vectors.adjoint()
            })
            .collect();
        Element {
            algebra: self.algebra().clone(),
            blocks,
        }
    }

    /// sᶻ via the cached eigendecomposition: λᶻ = exp(z ln λ). For z = 0 the
    /// identity element is returned exactly; purely imaginary z gives a
    /// unitary.
    pub fn power(&self, z: C64) -> Element {
        if z == C64::new(0.0, 0.0) {
            return Element::identity(self.algebra());
        }
        self.apply_scalar(|l| (z * l.ln()).exp())
    }

    /// Natural logarithm, used by the covariance generator condition.
    pub fn log(&self) -> Element {
        self.apply_scalar(|l| C64::new(l.ln(), 0.0))
    }

    /// KMS inner product ⟨a,b⟩_α = tr(a† α^{−1/2} b α^{−1/2}).
    pub fn kms_inner(&self, a: &Element, b: &Element) -> Result<C64> {
        self.algebra().check_same(a.algebra())?;
        let inv_sqrt = self.power(C64::new(-0.5, 0.0));
        let conjugated = inv_sqrt.mul(b)?.mul(&inv_sqrt)?;
        a.hs_inner(&conjugated)
    }

    /// The spectral projections of the distinct-eigenvalue clusters of each
    /// block, paired with the cluster eigenvalue. Clusters are formed at
    /// relative tolerance `cluster_tol`, ordered by descending eigenvalue.
    pub fn spectral_clusters(&self, cluster_tol: f64) -> Vec<Vec<(f64, Mat)>> {
        self.eig
            .iter()
            .map(|e| {
                let m = e.values.len();
                let mut out: Vec<(f64, Mat)> = Vec::new();
                let mut start = 0;
                while start < m {
                    let mut end = start + 1;
                    while end < m && (e.values[end - 1] - e.values[end]).abs() <= cluster_tol {
                        end += 1;
                    }
                    let mut proj = Mat::zeros(m, m);
                    for k in start..end {
                        let v = e.vectors.column(k);
                        proj += v * v.adjoint();
                    }
                    let mean =
                        e.values[start..end].iter().sum::<f64>() / (end - start) as f64;
                    out.push((mean, proj));
                    start = end;
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn algebra_invariants() {
        assert!(Algebra::new(vec![]).is_err());
        assert!(Algebra::new(vec![2, 0]).is_err());
        let a = Algebra::new(vec![2, 1]).unwrap();
        assert_eq!(a.total_dim(), 5);
        assert_eq!(a.matrix_dim(), 3);
        assert!(!a.is_commutative());
        assert!(Algebra::classical(3).is_commutative());
        assert!(!Algebra::qubit().is_commutative());
    }

    #[test]
    fn trace_examples() {
        let id2 = Element::identity(&Algebra::qubit());
        assert_abs_diff_eq!(id2.trace().re, 2.0, epsilon = 1e-14);

        let half = Element::from_real_diagonal(&Algebra::qubit(), &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(half.trace().re, 1.0, epsilon = 1e-14);

        let beta = Element::from_real_diagonal(&Algebra::classical(2), &[0.2, 0.8]).unwrap();
        assert_abs_diff_eq!(beta.trace().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hs_inner_examples() {
        let alg = Algebra::qubit();
        let id = Element::identity(&alg);
        let sx = Element::sigma_x();
        assert_abs_diff_eq!(id.hs_inner(&id).unwrap().re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sx.hs_inner(&sx).unwrap().re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(id.hs_inner(&sx).unwrap().norm(), 0.0, epsilon = 1e-14);
        // algebra mismatch errors
        let other = Element::identity(&Algebra::classical(2));
        assert!(id.hs_inner(&other).is_err());
    }

    #[test]
    fn kms_inner_examples() {
        let alg = Algebra::qubit();
        let alpha = FaithfulState::diagonal(&alg, &[0.5, 0.5]).unwrap();
        let id = Element::identity(&alg);
        assert_abs_diff_eq!(alpha.kms_inner(&id, &id).unwrap().re, 4.0, epsilon = 1e-12);
        // <alpha, alpha>_alpha = tr(alpha) = 1
        assert_abs_diff_eq!(
            alpha.kms_inner(alpha.element(), alpha.element()).unwrap().re,
            1.0,
            epsilon = 1e-12
        );

        let theta = 0.3;
        let p = FaithfulState::from_probs(&[theta, 1.0 - theta]).unwrap();
        let d0 = Element::matrix_unit(&Algebra::classical(2), 0, 0, 0);
        assert_abs_diff_eq!(
            p.kms_inner(&d0, &d0).unwrap().re,
            1.0 / theta,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kms_equals_hs_of_quarter_conjugates() {
        let alg = Algebra::qubit();
        let alpha = FaithfulState::diagonal(&alg, &[0.7, 0.3]).unwrap();
        let a = Element::from_fn(&alg, |_, i, j| c((i + 2 * j) as f64, 0.3 * i as f64));
        let b = Element::from_fn(&alg, |_, i, j| c(1.0 - j as f64, 0.1 + i as f64));
        let q = alpha.power(c(-0.25, 0.0));
        let aq = q.mul(&a).unwrap().mul(&q).unwrap();
        let bq = q.mul(&b).unwrap().mul(&q).unwrap();
        let lhs = alpha.kms_inner(&a, &b).unwrap();
        let rhs = aq.hs_inner(&bq).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn power_examples() {
        let alg4 = Algebra::matrix(4);
        let s = FaithfulState::diagonal(&alg4, &[0.25; 4]).unwrap();
        let half = s.power(c(0.5, 0.0));
        let expected = Element::identity(&alg4).scale(c(0.5, 0.0));
        assert!(element_distance(&half, &expected) < 1e-12);

        // z = 0 is the identity exactly
        let one = s.power(c(0.0, 0.0));
        assert_eq!(element_distance(&one, &Element::identity(&alg4)), 0.0);

        // diag(theta, 1-theta)^{it} = diag(e^{it ln theta}, e^{it ln(1-theta)})
        let theta = 0.3;
        let t = 0.7;
        let st = FaithfulState::diagonal(&Algebra::qubit(), &[theta, 1.0 - theta]).unwrap();
        let u = st.power(c(0.0, t));
        let expected = Element::from_real_diagonal(&Algebra::qubit(), &[0.0, 0.0])
            .unwrap()
            .add(&{
                let mut e = Element::zero(&Algebra::qubit());
                e.blocks[0][(0, 0)] = (c(0.0, t) * theta.ln()).exp();
                e.blocks[0][(1, 1)] = (c(0.0, t) * (1.0 - theta).ln()).exp();
                e
            })
            .unwrap();
        assert!(element_distance(&u, &expected) < 1e-12);
        // purely imaginary exponent gives a unitary
        let uu = u.mul(&u.adjoint()).unwrap();
        assert!(element_distance(&uu, &Element::identity(&Algebra::qubit())) < 1e-12);
    }

    #[test]
    fn power_group_law() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let s = FaithfulState::diagonal(&alg, &[0.5, 0.3, 0.2]).unwrap();
        for (z1, z2) in [
            (c(0.5, 0.0), c(-0.5, 0.0)),
            (c(0.25, 1.3), c(0.75, -0.4)),
            (c(-0.5, 0.2), c(1.5, 0.8)),
        ] {
            let lhs = s.power(z1).mul(&s.power(z2)).unwrap();
            let rhs = s.power(z1 + z2);
            assert!(element_distance(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn commutative_power_is_entrywise() {
        let p = FaithfulState::from_probs(&[0.2, 0.5, 0.3]).unwrap();
        let z = c(0.37, -0.9);
        let pw = p.power(z);
        for (x, &v) in [0.2, 0.5, 0.3].iter().enumerate() {
            let expected = (z * f64::ln(v)).exp();
            assert!((pw.block(x)[(0, 0)] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn ad_examples() {
        let alg = Algebra::qubit();
        let theta = 0.3;
        let a = Element::from_real_diagonal(&alg, &[theta, 1.0 - theta]).unwrap();
        let id = Element::identity(&alg);
        assert!(element_distance(&ad(&id, &a).unwrap(), &a) < 1e-14);

        let sx = Element::sigma_x();
        let flipped = ad(&sx, &a).unwrap();
        let expected = Element::from_real_diagonal(&alg, &[1.0 - theta, theta]).unwrap();
        assert!(element_distance(&flipped, &expected) < 1e-14);

        let mut phases = Element::zero(&alg);
        phases.blocks[0][(0, 0)] = c(0.0, 1.3).exp();
        phases.blocks[0][(1, 1)] = c(0.0, -0.4).exp();
        assert!(element_distance(&ad(&phases, &a).unwrap(), &a) < 1e-14);
    }

    #[test]
    fn trace_invariant_under_unitary_conjugation() {
        let alg = Algebra::new(vec![2, 2]).unwrap();
        let a = Element::from_fn(&alg, |x, i, j| c((x + i) as f64, (j as f64) - 0.5));
        // unitary from the eigenvectors of a Hermitian element
        let h = a.add(&a.adjoint()).unwrap();
        let u = Element {
            algebra: alg.clone(),
            blocks: h
                .blocks()
                .iter()
                .map(|b| hermitian_eig_sorted(b).vectors)
                .collect(),
        };
        let conj = ad(&u, &a).unwrap();
        assert!((conj.trace() - a.trace()).norm() < 1e-12);
    }

    #[test]
    fn is_positive_examples() {
        let id = Element::identity(&Algebra::qubit());
        assert!(id.is_positive(1e-12));
        assert!(!Element::sigma_x().is_positive(1e-12));
        let beta = Element::from_real_diagonal(&Algebra::classical(2), &[0.2, 0.8]).unwrap();
        assert!(beta.is_positive(1e-12));
    }

    #[test]
    fn faithful_state_validation() {
        let alg = Algebra::qubit();
        // not unit trace
        let e = Element::identity(&alg);
        assert!(matches!(
            FaithfulState::with_default_floor(e),
            Err(Error::NotUnitTrace { .. })
        ));
        // not Hermitian
        let mut e = Element::from_real_diagonal(&alg, &[0.5, 0.5]).unwrap();
        e.blocks[0][(0, 1)] = c(0.3, 0.0);
        assert!(matches!(
            FaithfulState::with_default_floor(e),
            Err(Error::NotHermitian { .. })
        ));
        // below the floor is an error, not a projection
        let e = Element::from_real_diagonal(&alg, &[1.0, 0.0]).unwrap();
        assert!(matches!(
            FaithfulState::with_default_floor(e),
            Err(Error::NotFaithful { .. })
        ));
    }

    #[test]
    fn vectorize_roundtrip() {
        let alg = Algebra::new(vec![2, 3, 1]).unwrap();
        let a = Element::from_fn(&alg, |x, i, j| c((x * 7 + i) as f64, j as f64 * 0.5));
        let v = a.vectorize();
        assert_eq!(v.len(), alg.total_dim());
        let back = Element::unvectorize(&alg, &v).unwrap();
        assert_eq!(element_distance(&a, &back), 0.0);
    }

    #[test]
    fn tensor_block_order_is_x_major() {
        let a = Algebra::new(vec![2, 1]).unwrap();
        let b = Algebra::new(vec![1, 3]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.block_dims(), &[2, 6, 1, 3]);
    }
}

//! The classical state-retrieval map defined by determinant maximization.
//!
//! For a stochastic morphism (p, E) with prediction q = E(p), the map is the
//! column-stochastic R maximizing det(R∘E) subject to
//!   (a) R = E⁻¹ when E is a permutation,
//!   (b) detailed balance: (R E) D_p symmetric with D_p = diag(p),
//!   (c) eigenvalues of R∘E non-negative,
//! plus state preservation R(q) = p, which detailed balance already implies
//! for stochastic R.
//!
//! The problem is a MAXDET program: with M = R E, the similarity
//! M̃ = D_p^{−1/2} M D_p^{1/2} is symmetric on the constraint manifold and
//! affine in the free parameters, (c) becomes M̃ ⪰ 0, and det is log-concave
//! there. Dimension 2 is solved exactly (one free parameter, objective
//! linear in it); dimensions 3 and 4 run a log-barrier Newton ascent from
//! the Bayes inverse, which is always strictly feasible.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{hermitian_eigenvalues, FaithfulState, C64, Mat};
use crate::channels::{Channel, StatePair};
use crate::error::{Error, Result};

/// Result of the determinant-maximization solve.
#[derive(Debug, Clone)]
pub struct SsSolution {
    pub channel: Channel,
    /// Set when the objective is flat along a feasible direction at the
    /// maximizer (e.g. det E = 0), so the maximizer is not unique.
    pub multiple_maximizers: bool,
}

const MAX_DIM: usize = 4;

pub fn surace_scandi(prior: &FaithfulState, e: &Channel) -> Result<SsSolution> {
    if !e.source().is_commutative() || !e.target().is_commutative() {
        return Err(Error::NotCommutative(e.source().block_dims().to_vec()));
    }
    if prior.algebra() != e.source() {
        return Err(Error::AlgebraMismatch {
            expected: e.source().block_dims().to_vec(),
            got: prior.algebra().block_dims().to_vec(),
        });
    }
    let n = e.source().num_blocks();
    if e.target().num_blocks() != n {
        return Err(Error::Infeasible(
            "source and target cardinalities differ".into(),
        ));
    }
    if n > MAX_DIM {
        return Err(Error::Infeasible(format!(
            "cardinality {n} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    if !e.is_cptp() {
        return Err(Error::NotStochastic("matrix not column-stochastic".into()));
    }

    // permutations (the isomorphisms here) are sent to their inverses
    if e.is_star_isomorphism(1e-9) {
        return Ok(SsSolution {
            channel: e.invert_iso()?,
            multiple_maximizers: false,
        });
    }

    let pair = StatePair::from_channel(e, prior)?;
    let p: Vec<f64> = (0..n).map(|x| prior.element().block(x)[(0, 0)].re).collect();
    let q: Vec<f64> = (0..n)
        .map(|y| pair.prediction.element().block(y)[(0, 0)].re)
        .collect();
    let em = DMatrix::<f64>::from_fn(n, n, |y, x| e.matrix()[(y, x)].re);

    let (r, multiple) = match n {
        1 => (DMatrix::<f64>::identity(1, 1), false),
        2 => solve_dim2(&em, &p, &q)?,
        _ => solve_barrier(&em, &p, &q)?,
    };

    let matrix = Mat::from_fn(n, n, |x, y| C64::new(r[(x, y)], 0.0));
    Ok(SsSolution {
        channel: Channel::new(e.target().clone(), e.source().clone(), matrix)?,
        multiple_maximizers: multiple,
    })
}

/// Exact solve for n = 2. With R = [[a, b], [1−a, 1−b]] and R(q) = p, the
/// single free parameter is b; every constraint is a linear bound on it and
/// det(R E) is linear in it, so the maximizer sits at an interval endpoint.
fn solve_dim2(e: &DMatrix<f64>, p: &[f64], q: &[f64]) -> Result<(DMatrix<f64>, bool)> {
    let det_e = e[(0, 0)] * e[(1, 1)] - e[(0, 1)] * e[(1, 0)];
    // a = (p0 - b q1) / q0 in [0,1]; b in [0,1]
    let mut lo = f64::max(0.0, (p[0] - q[0]) / q[1]);
    let mut hi = f64::min(1.0, p[0] / q[1]);
    // nonnegative spectrum of R∘E: det(R E) = det_e (p0 − b)/q0 ≥ 0
    let mut multiple = false;
    if det_e > 1e-13 {
        hi = hi.min(p[0]);
    } else if det_e < -1e-13 {
        lo = lo.max(p[0]);
    } else {
        multiple = true;
    }
    if lo > hi + 1e-12 {
        return Err(Error::Infeasible(format!(
            "empty feasible interval [{lo}, {hi}]"
        )));
    }
    // det(R E) = det_e (p0 − b)/q0: decreasing in b when det_e > 0
    let b = if det_e > 1e-13 {
        lo
    } else if det_e < -1e-13 {
        hi
    } else {
        // flat objective; return the Bayes point of the interval
        (e[(1, 0)] * p[0] / q[1]).clamp(lo, hi)
    };
    let a = (p[0] - b * q[1]) / q[0];
    let r = DMatrix::from_row_slice(2, 2, &[a, b, 1.0 - a, 1.0 - b]);
    Ok((r, multiple))
}

/// Equality constraints: unit column sums and detailed balance of (R E) D_p.
/// Row layout of the unknown: r[x + y n] = R_{xy}.
fn equality_system(e: &DMatrix<f64>, p: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let n = p.len();
    let n_bal = n * (n - 1) / 2;
    let mut a = DMatrix::<f64>::zeros(n + n_bal, n * n);
    let mut b = DVector::<f64>::zeros(n + n_bal);
    for y in 0..n {
        for x in 0..n {
            a[(y, x + y * n)] = 1.0;
        }
        b[y] = 1.0;
    }
    let mut row = n;
    for x in 0..n {
        for z in (x + 1)..n {
            // S_{xz} − S_{zx} = Σ_y R_{xy} E_{yz} p_z − Σ_y R_{zy} E_{yx} p_x
            for y in 0..n {
                a[(row, x + y * n)] += e[(y, z)] * p[z];
                a[(row, z + y * n)] -= e[(y, x)] * p[x];
            }
            row += 1;
        }
    }
    (a, b)
}

/// Orthonormal basis of the nullspace of `a`, by modified Gram–Schmidt with
/// re-orthogonalization.
fn nullspace(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut row_basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..a.nrows() {
        let mut v: DVector<f64> = a.row(i).transpose();
        let scale = v.norm();
        for _ in 0..2 {
            for b in &row_basis {
                let d = b.dot(&v);
                v -= b * d;
            }
        }
        if v.norm() > 1e-12 * (1.0 + scale) {
            let n = v.norm();
            row_basis.push(v / n);
        }
    }
    let mut null = Vec::new();
    for i in 0..a.ncols() {
        let mut v = DVector::<f64>::zeros(a.ncols());
        v[i] = 1.0;
        for _ in 0..2 {
            for b in row_basis.iter().chain(null.iter()) {
                let d = b.dot(&v);
                v -= b * d;
            }
        }
        if v.norm() > 1e-8 {
            let n = v.norm();
            null.push(v / n);
        }
    }
    null
}

fn vec_to_matrix(r: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |x, y| r[x + y * n])
}

/// Symmetric similarity D^{−1/2} (R E) D^{1/2}.
fn symmetrized(r: &DMatrix<f64>, e: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
    let n = p.len();
    let m = r * e;
    let mut s = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for z in 0..n {
            s[(x, z)] = m[(x, z)] * (p[z] / p[x]).sqrt();
        }
    }
    (s.clone() + s.transpose()) * 0.5
}

fn sym_eigen_min(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

fn log_det_psd(m: &DMatrix<f64>) -> Option<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut s = 0.0;
    for &l in eig.eigenvalues.iter() {
        if l <= 0.0 {
            return None;
        }
        s += l.ln();
    }
    Some(s)
}

/// Log-barrier Newton ascent for n = 3, 4, starting from the Bayes inverse.
fn solve_barrier(e: &DMatrix<f64>, p: &[f64], q: &[f64]) -> Result<(DMatrix<f64>, bool)> {
    let n = p.len();
    // Bayes inverse: feasible interior-ish start
    let r0 = DMatrix::<f64>::from_fn(n, n, |x, y| e[(y, x)] * p[x] / q[y]);
    let (a_eq, b_eq) = equality_system(e, p);
    let resid = (&a_eq * flatten(&r0)) - &b_eq;
    if resid.norm() > 1e-8 {
        return Err(Error::Infeasible(format!(
            "starting point violates the equality constraints by {:.3e}",
            resid.norm()
        )));
    }
    let basis = nullspace(&a_eq);
    let d = basis.len();
    let r0_vec = flatten(&r0);

    let r_at = |u: &DVector<f64>| -> DVector<f64> {
        let mut r = r0_vec.clone();
        for (i, b) in basis.iter().enumerate() {
            r += b * u[i];
        }
        r
    };

    let mtilde_of = |rv: &DVector<f64>| symmetrized(&vec_to_matrix(rv, n), e, p);

    // degenerate objective: every feasible point has det 0
    if log_det_psd(&mtilde_of(&r0_vec)).is_none() {
        return Ok((r0, true));
    }

    let objective = |rv: &DVector<f64>, mu: f64| -> Option<f64> {
        let ld = log_det_psd(&mtilde_of(rv))?;
        let mut bar = 0.0;
        for k in 0..rv.len() {
            if rv[k] <= 0.0 {
                return None;
            }
            bar += rv[k].ln();
        }
        Some(ld + mu * bar)
    };

    // directional matrices G_i = D^{-1/2} B_i E D^{1/2} (symmetric on the
    // manifold)
    let dirs: Vec<DMatrix<f64>> = basis
        .iter()
        .map(|b| {
            let bm = vec_to_matrix(&DVector::from_column_slice(b.as_slice()), n);
            symmetrized_raw(&bm, e, p)
        })
        .collect();

    let mut u = DVector::<f64>::zeros(d);
    if d > 0 {
        for &mu in &[1e-1, 1e-3, 1e-5, 1e-7, 1e-9, 1e-11] {
            for _ in 0..40 {
                let rv = r_at(&u);
                let mt = mtilde_of(&rv);
                let inv = match mt.clone().try_inverse() {
                    Some(i) => i,
                    None => break,
                };
                let mut grad = DVector::<f64>::zeros(d);
                let mut hess = DMatrix::<f64>::zeros(d, d);
                for i in 0..d {
                    grad[i] = (&inv * &dirs[i]).trace();
                    for k in 0..rv.len() {
                        grad[i] += mu * basis[i][k] / rv[k];
                    }
                    for j in 0..d {
                        hess[(i, j)] = -((&inv * &dirs[i]) * (&inv * &dirs[j])).trace();
                        for k in 0..rv.len() {
                            hess[(i, j)] -= mu * basis[i][k] * basis[j][k] / (rv[k] * rv[k]);
                        }
                    }
                }
                if grad.norm() < 1e-12 {
                    break;
                }
                let neg_h = -hess;
                let step = neg_h
                    .lu()
                    .solve(&grad)
                    .unwrap_or_else(|| grad.clone() * 1e-3);
                // backtrack to stay strictly feasible and ascend
                let f0 = objective(&rv, mu).unwrap_or(f64::NEG_INFINITY);
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let cand = &u + &step * alpha;
                    if let Some(f) = objective(&r_at(&cand), mu) {
                        if f > f0 - 1e-14 {
                            u = cand;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !moved || grad.norm() * alpha < 1e-13 {
                    break;
                }
            }
        }
    }

    let rv = r_at(&u);
    let r = vec_to_matrix(&rv, n);
    // flatness flag: near-singular curvature of log det along the manifold
    let mut multiple = false;
    if d > 0 {
        let mt = mtilde_of(&rv);
        if let Some(inv) = mt.try_inverse() {
            let mut h = DMatrix::<f64>::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    h[(i, j)] = ((&inv * &dirs[i]) * (&inv * &dirs[j])).trace();
                }
            }
            let eigs = hermitian_eigenvalues(&h.map(|v| C64::new(v, 0.0)));
            let max = eigs.iter().fold(0.0_f64, |a, &b| a.max(b));
            let min = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            if max > 0.0 && min < 1e-8 * max {
                multiple = true;
            }
        }
    }
    // sanity: the result must still be feasible
    let min_entry = rv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min_entry < -1e-9 {
        return Err(Error::Infeasible(format!(
            "optimizer left the feasible set (min entry {min_entry:.3e})"
        )));
    }
    let min_eig = sym_eigen_min(&symmetrized(&r, e, p));
    if min_eig < -1e-7 {
        return Err(Error::Infeasible(format!(
            "optimizer violated the spectral constraint ({min_eig:.3e})"
        )));
    }
    Ok((r, multiple))
}

fn symmetrized_raw(m_part: &DMatrix<f64>, e: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
    let n = p.len();
    let m = m_part * e;
    let mut s = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        for z in 0..n {
            s[(x, z)] = m[(x, z)] * (p[z] / p[x]).sqrt();
        }
    }
    (s.clone() + s.transpose()) * 0.5
}

fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    DVector::from_fn(n * n, |k, _| m[(k % n, k / n)])
}

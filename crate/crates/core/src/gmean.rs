//! Weighted operator geometric means on PSD matrices.
//!
//! The two-variable Kubo–Ando mean `A #_t B = B^{1/2}(B^{-1/2}AB^{-1/2})^t B^{1/2}`
//! (t the weight of A) is nested along a binary weight tree to produce
//! multivariate means; the tree, not a flat weight vector, is the canonical
//! input because distinct trees with equal effective weights need not agree
//! on noncommuting operands. Also provides fractional operator powers, the
//! PSD order check with witness, and the rank-1 max-divergence.

use num_complex::Complex64;
use once_cell::sync::OnceCell;
use serde::{Deserialize, Serialize};

use crate::partitions::ProbVector;
use crate::{CMat, CVec, Error, Result};

/// Relative eigenvalue threshold below which an operand counts as singular.
pub const SINGULAR_TOL: f64 = 1e-10;

/// A Hermitian positive-semidefinite matrix with a lazily cached
/// eigendecomposition (per value, never global).
#[derive(Clone, Debug)]
pub struct PsdMatrix {
    matrix: CMat,
    eig: OnceCell<PsdEig>,
}

#[derive(Clone, Debug)]
struct PsdEig {
    values: Vec<f64>,
    vectors: CMat,
}

impl PsdMatrix {
    /// Wraps a matrix, checking Hermiticity to 1e-12 relative. Positivity is
    /// checked by the operations that depend on it.
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.norm().max(1e-300);
        let asym = (&matrix - matrix.adjoint()).norm() / scale;
        if asym > 1e-12 {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self {
            matrix,
            eig: OnceCell::new(),
        })
    }

    /// Hermitizes first: (M + M†)/2. For matrices assembled columnwise.
    pub fn from_nearly_hermitian(matrix: CMat, max_asym: f64) -> Result<Self> {
        let scale = matrix.norm().max(1e-300);
        let asym = (&matrix - matrix.adjoint()).norm() / scale;
        if asym > max_asym {
            return Err(Error::NotHermitian(asym));
        }
        let sym = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self {
            matrix: sym,
            eig: OnceCell::new(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMat::identity(dim, dim),
            eig: OnceCell::new(),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn eig(&self) -> &PsdEig {
        self.eig.get_or_init(|| {
            let e = self.matrix.clone().symmetric_eigen();
            PsdEig {
                values: e.eigenvalues.iter().copied().collect(),
                vectors: e.eigenvectors,
            }
        })
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = self.eig().values.clone();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig().values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spectral norm (max |eigenvalue|).
    pub fn spectral_norm(&self) -> f64 {
        self.eig()
            .values
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }

    /// Rejects matrices with eigenvalues below −SINGULAR_TOL·‖A‖.
    pub fn check_psd(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -SINGULAR_TOL * self.spectral_norm().max(1e-300) {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    /// f applied to the eigenvalues (clamped at 0), recomposed.
    fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> PsdMatrix {
        let eig = self.eig();
        let n = self.dim();
        let diag = CMat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(f(eig.values[i].max(0.0)), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let m = &eig.vectors * diag * eig.vectors.adjoint();
        // Hermitize against roundoff.
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        PsdMatrix {
            matrix: m,
            eig: OnceCell::new(),
        }
    }
}

/// Fractional power A^t of a PSD matrix by eigendecomposition. Negative
/// powers require a strictly positive matrix.
pub fn psd_power(a: &PsdMatrix, t: f64) -> Result<PsdMatrix> {
    a.check_psd()?;
    if t < 0.0 {
        let min = a.min_eigenvalue();
        if min <= SINGULAR_TOL * a.spectral_norm().max(1e-300) {
            return Err(Error::SingularOperand(min));
        }
    }
    if t == 0.0 {
        return Ok(PsdMatrix::identity(a.dim()));
    }
    Ok(a.map_spectrum(|x| if x > 0.0 { x.powf(t) } else { 0.0 }))
}

/// How `gmean_pair` treats singular second operands.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum GMeanMode {
    /// Restrict to the support of B when A's support is contained there;
    /// otherwise regularize B → B + εI and extrapolate ε → 0 with one
    /// Richardson step.
    #[default]
    Auto,
    /// Same restriction path, but incompatible supports are an error.
    Strict,
}

/// Weighted two-variable geometric mean
/// `A #_t B = B^{1/2}(B^{-1/2} A B^{-1/2})^t B^{1/2}`, t the weight of A.
pub fn gmean_pair(a: &PsdMatrix, b: &PsdMatrix, t: f64, mode: GMeanMode) -> Result<PsdMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!(
            "operands of size {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("weight must be in [0,1], got {t}")));
    }
    a.check_psd()?;
    b.check_psd()?;
    let b_norm = b.spectral_norm().max(1e-300);
    if b.min_eigenvalue() > SINGULAR_TOL * b_norm {
        return gmean_pair_positive(a, b, t);
    }
    // Singular B: try the support restriction.
    let beig = b.eig();
    let support: Vec<usize> = (0..b.dim())
        .filter(|&i| beig.values[i] > SINGULAR_TOL * b_norm)
        .collect();
    let v = CMat::from_fn(b.dim(), support.len(), |i, j| beig.vectors[(i, support[j])]);
    // A's support is inside B's support iff (I - VV*) A (I - VV*) vanishes.
    let proj = &v * v.adjoint();
    let eye = CMat::identity(b.dim(), b.dim());
    let comp = &eye - &proj;
    let leak = (&comp * a.matrix() * &comp).norm();
    if leak <= 1e-9 * a.spectral_norm().max(1e-300) {
        let a_r = PsdMatrix::from_nearly_hermitian(v.adjoint() * a.matrix() * &v, 1e-9)?;
        let b_r = PsdMatrix::from_nearly_hermitian(v.adjoint() * b.matrix() * &v, 1e-9)?;
        let g_r = gmean_pair_positive(&a_r, &b_r, t)?;
        let g = &v * g_r.matrix() * v.adjoint();
        return PsdMatrix::from_nearly_hermitian(g, 1e-9);
    }
    if mode == GMeanMode::Strict {
        return Err(Error::SupportIncompatible);
    }
    // ε-regularization with one Richardson extrapolation step.
    let eps = 1e-12 * b_norm;
    let reg = |e: f64| -> Result<CMat> {
        let br = PsdMatrix::new(b.matrix() + CMat::identity(b.dim(), b.dim()) * Complex64::new(e, 0.0))?;
        Ok(gmean_pair_positive(a, &br, t)?.matrix().clone())
    };
    let g1 = reg(eps)?;
    let g2 = reg(2.0 * eps)?;
    let extrapolated = g1.map(|x| x * Complex64::new(2.0, 0.0)) - g2;
    PsdMatrix::from_nearly_hermitian(extrapolated, 1e-6)
}

fn gmean_pair_positive(a: &PsdMatrix, b: &PsdMatrix, t: f64) -> Result<PsdMatrix> {
    let b_half = b.map_spectrum(|x| x.sqrt());
    let b_neg_half = b.map_spectrum(|x| if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 });
    let inner = PsdMatrix::from_nearly_hermitian(
        b_neg_half.matrix() * a.matrix() * b_neg_half.matrix(),
        1e-8,
    )?;
    let powered = inner.map_spectrum(|x| if x > 0.0 { x.powf(t) } else { 0.0 });
    PsdMatrix::from_nearly_hermitian(b_half.matrix() * powered.matrix() * b_half.matrix(), 1e-8)
}

/// A nested binary weighted-geometric-mean specification. `weight` (in
/// `[0,1]`) is the weight given to the left subtree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GMeanTree {
    Leaf(usize),
    Node {
        left: Box<GMeanTree>,
        right: Box<GMeanTree>,
        weight: f64,
    },
}

impl GMeanTree {
    pub fn leaf_count(&self) -> usize {
        match self {
            GMeanTree::Leaf(_) => 1,
            GMeanTree::Node { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Checks that leaves are exactly 0..arity, each once, and weights lie
    /// in `[0,1]`.
    pub fn validate(&self, arity: usize) -> Result<()> {
        let mut seen = vec![false; arity];
        self.validate_rec(&mut seen)?;
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("leaf {missing} missing from tree")));
        }
        Ok(())
    }

    fn validate_rec(&self, seen: &mut [bool]) -> Result<()> {
        match self {
            GMeanTree::Leaf(i) => {
                if *i >= seen.len() {
                    return Err(Error::InvalidInput(format!(
                        "leaf index {i} out of range 0..{}",
                        seen.len()
                    )));
                }
                if seen[*i] {
                    return Err(Error::InvalidInput(format!("leaf {i} appears twice")));
                }
                seen[*i] = true;
                Ok(())
            }
            GMeanTree::Node { left, right, weight } => {
                if !(0.0..=1.0).contains(weight) {
                    return Err(Error::OutOfRange(format!(
                        "tree weight must be in [0,1], got {weight}"
                    )));
                }
                left.validate_rec(seen)?;
                right.validate_rec(seen)
            }
        }
    }

    /// Effective weights θ(i) = product of branch weights on the path to
    /// leaf i.
    pub fn effective_weights(&self) -> ProbVector {
        let mut theta = vec![0.0; self.leaf_count()];
        self.collect_weights(1.0, &mut theta);
        ProbVector::new(theta).expect("path products are nonnegative")
    }

    fn collect_weights(&self, acc: f64, theta: &mut [f64]) {
        match self {
            GMeanTree::Leaf(i) => theta[*i] = acc,
            GMeanTree::Node { left, right, weight } => {
                left.collect_weights(acc * weight, theta);
                right.collect_weights(acc * (1.0 - weight), theta);
            }
        }
    }

    /// Left-comb tree (((0,1),2),…) with branch weights chosen to realize
    /// the given effective weights.
    pub fn left_comb(theta: &[f64]) -> Result<GMeanTree> {
        Self::check_theta(theta)?;
        let mut tree = GMeanTree::Leaf(0);
        let mut acc = theta[0];
        for (i, &w) in theta.iter().enumerate().skip(1) {
            let total = acc + w;
            let t = if total > 0.0 { acc / total } else { 0.5 };
            tree = GMeanTree::Node {
                left: Box::new(tree),
                right: Box::new(GMeanTree::Leaf(i)),
                weight: t,
            };
            acc = total;
        }
        Ok(tree)
    }

    /// Balanced tree with branch weights chosen to realize the given
    /// effective weights.
    pub fn balanced(theta: &[f64]) -> Result<GMeanTree> {
        Self::check_theta(theta)?;
        fn build(lo: usize, hi: usize, theta: &[f64]) -> (GMeanTree, f64) {
            if hi - lo == 1 {
                return (GMeanTree::Leaf(lo), theta[lo]);
            }
            let mid = lo + (hi - lo).div_ceil(2);
            let (left, wl) = build(lo, mid, theta);
            let (right, wr) = build(mid, hi, theta);
            let total = wl + wr;
            let t = if total > 0.0 { wl / total } else { 0.5 };
            (
                GMeanTree::Node {
                    left: Box::new(left),
                    right: Box::new(right),
                    weight: t,
                },
                total,
            )
        }
        Ok(build(0, theta.len(), theta).0)
    }

    fn check_theta(theta: &[f64]) -> Result<()> {
        if theta.is_empty() {
            return Err(Error::InvalidInput("at least one weight required".into()));
        }
        let p = ProbVector::new(theta.to_vec())?;
        if !p.is_normalized() {
            return Err(Error::NotNormalized(p.sum()));
        }
        Ok(())
    }
}

/// Evaluates a nested geometric mean over PSD operands.
pub fn gmean_tree(tree: &GMeanTree, ops: &[PsdMatrix], mode: GMeanMode) -> Result<PsdMatrix> {
    if tree.leaf_count() != ops.len() {
        return Err(Error::ArityMismatch {
            expected: tree.leaf_count(),
            got: ops.len(),
        });
    }
    tree.validate(ops.len())?;
    gmean_tree_rec(tree, ops, mode)
}

fn gmean_tree_rec(tree: &GMeanTree, ops: &[PsdMatrix], mode: GMeanMode) -> Result<PsdMatrix> {
    match tree {
        GMeanTree::Leaf(i) => Ok(ops[*i].clone()),
        GMeanTree::Node { left, right, weight } => {
            let l = gmean_tree_rec(left, ops, mode)?;
            let r = gmean_tree_rec(right, ops, mode)?;
            gmean_pair(&l, &r, *weight, mode)
        }
    }
}

/// Effective weights of a tree (spec-level convenience wrapper).
pub fn effective_weights(tree: &GMeanTree) -> ProbVector {
    tree.effective_weights()
}

/// Outcome of a PSD order comparison A ≤ B.
#[derive(Clone, Debug)]
pub struct OrderCheck {
    pub holds: bool,
    /// Min eigenvalue of B − A.
    pub margin: f64,
    /// Eigenvector for the most negative eigenvalue when the order fails.
    pub witness: Option<CVec>,
}

/// Checks A ≤ B in the PSD order: min eig(B − A) ≥ −tol·max(1, ‖B‖).
pub fn psd_leq(a: &PsdMatrix, b: &PsdMatrix, tol: f64) -> Result<OrderCheck> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!(
            "operands of size {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = b.matrix() - a.matrix();
    let eig = diff.symmetric_eigen();
    let mut min = f64::INFINITY;
    let mut min_idx = 0;
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < min {
            min = v;
            min_idx = i;
        }
    }
    let threshold = -tol * b.spectral_norm().max(1.0);
    let holds = min >= threshold;
    let witness = if holds {
        None
    } else {
        Some(CVec::from_iterator(
            a.dim(),
            eig.eigenvectors.column(min_idx).iter().copied(),
        ))
    };
    Ok(OrderCheck {
        holds,
        margin: min,
        witness,
    })
}

/// Max-divergence of |ψ⟩⟨ψ| relative to A for a unit vector ψ:
/// log₂⟨ψ|A⁻¹|ψ⟩ = inf { λ : |ψ⟩⟨ψ| ≤ 2^λ A }. A must be strictly positive
/// along ψ.
pub fn max_divergence_rank1(psi: &CVec, a: &PsdMatrix) -> Result<f64> {
    if psi.len() != a.dim() {
        return Err(Error::SizeMismatch {
            expected: a.dim(),
            got: psi.len(),
        });
    }
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfRange(format!("ψ must be a unit vector, ‖ψ‖ = {norm}")));
    }
    a.check_psd()?;
    let eig = a.eig();
    let scale = a.spectral_norm().max(1e-300);
    let coeffs = eig.vectors.adjoint() * psi;
    let mut inner = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let ev: f64 = eig.values[i];
        let weight = c.norm_sqr();
        if ev <= SINGULAR_TOL * scale {
            if weight > 1e-18 {
                return Err(Error::SingularOperand(ev));
            }
            continue;
        }
        inner += weight / ev;
    }
    Ok(inner.log2())
}

//! Multipartite state vectors and their tensor algebra: products, direct
//! sums, local maps by mode contraction, marginals, Schmidt spectra, and the
//! rank-1 sandwiched Rényi divergence.
//!
//! Amplitudes are stored dense in row-major mixed-radix order (part 1 is the
//! most significant digit). All operations are pure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::partitions::ProbVector;
use crate::{CMat, Error, Result};

/// Relative threshold below which Schmidt eigenvalues count as numerically
/// zero.
pub const RANK_TOL: f64 = 1e-10;

/// Local dimensions of a k-partite space H₁ ⊗ … ⊗ H_k.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SpaceSpec {
    dims: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput(format!(
                "local dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of parts k.
    pub fn parts(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension D = ∏ dⱼ.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Mixed-radix strides: index = Σ iⱼ · strideⱼ.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    /// Decodes a flat index into per-part digits.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            out[j] = idx % self.dims[j];
            idx /= self.dims[j];
        }
        out
    }

    /// Encodes per-part digits into a flat index.
    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        let mut idx = 0;
        for (j, &i) in digits.iter().enumerate() {
            debug_assert!(i < self.dims[j]);
            idx = idx * self.dims[j] + i;
        }
        idx
    }

    /// The grouped space (∏_{j∈S} dⱼ, ∏_{j∉S} dⱼ) dimensions for a subset.
    pub fn grouped_dim(&self, side: &[usize]) -> usize {
        side.iter().map(|&j| self.dims[j]).product()
    }
}

/// An unordered bipartition `{S, [k]∖S}` of the parts of a space, stored as
/// the side containing part 0 (equivalently, the lexicographically smaller
/// side).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Bipartition {
    side: Vec<usize>,
    parts: usize,
}

impl Bipartition {
    pub fn new(side: impl IntoIterator<Item = usize>, parts: usize) -> Result<Self> {
        let mut side: Vec<usize> = side.into_iter().collect();
        side.sort_unstable();
        side.dedup();
        if side.iter().any(|&j| j >= parts) {
            return Err(Error::InvalidInput(format!(
                "bipartition side {side:?} references parts outside [0, {parts})"
            )));
        }
        if side.is_empty() || side.len() == parts {
            return Err(Error::InvalidInput(
                "bipartition sides must both be nonempty".into(),
            ));
        }
        if !side.contains(&0) {
            side = (0..parts).filter(|j| !side.contains(j)).collect();
        }
        Ok(Self { side, parts })
    }

    /// The elementary bipartition {{j}, rest}.
    pub fn elementary(j: usize, parts: usize) -> Result<Self> {
        Self::new([j], parts)
    }

    /// Canonical side (contains part 0).
    pub fn side(&self) -> &[usize] {
        &self.side
    }

    /// The complementary side.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.parts).filter(|j| !self.side.contains(j)).collect()
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// Two bipartitions are noncrossing if one side of the first is nested
    /// in or disjoint from one side of the second.
    pub fn noncrossing(&self, other: &Bipartition) -> bool {
        let s: Vec<usize> = self.side.clone();
        let t: Vec<usize> = other.side.clone();
        let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
        let union_all = s.len() + t.len() - s.iter().filter(|x| t.contains(x)).count() == self.parts;
        subset(&s, &t) || subset(&t, &s) || union_all
    }

    /// Renders in 1-based "1|23" notation.
    pub fn display(&self) -> String {
        let fmt = |v: &[usize]| {
            v.iter()
                .map(|j| (j + 1).to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        format!("{}|{}", fmt(&self.side), fmt(&self.complement()))
    }

    /// Parses 1-based "1|23" notation (single-digit part labels).
    pub fn parse(text: &str, parts: usize) -> Result<Self> {
        let (lhs, _rhs) = text.split_once('|').ok_or_else(|| {
            Error::InvalidInput(format!("bipartition '{text}' must contain '|'"))
        })?;
        let side: Vec<usize> = lhs
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize - 1)
                    .ok_or_else(|| Error::InvalidInput(format!("bad part label '{c}' in '{text}'")))
            })
            .collect::<Result<_>>()?;
        Self::new(side, parts)
    }
}

/// A vector in H₁ ⊗ … ⊗ H_k with explicit local dimensions. The zero vector
/// is permitted.
#[derive(Clone, PartialEq, Debug)]
pub struct MultipartiteState {
    space: SpaceSpec,
    amplitudes: Vec<Complex64>,
}

impl MultipartiteState {
    pub fn new(space: SpaceSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::SizeMismatch {
                expected: space.total_dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    /// The unit tensor ⟨r⟩ = Σᵢ eᵢ ⊗ … ⊗ eᵢ on k parts of dimension r.
    pub fn unit_tensor(r: usize, k: usize) -> Result<Self> {
        if r < 1 || k < 1 {
            return Err(Error::InvalidInput(format!("unit tensor needs r,k >= 1, got r={r} k={k}")));
        }
        let space = SpaceSpec::new(vec![r; k])?;
        let mut amps = vec![Complex64::ZERO; space.total_dim()];
        for i in 0..r {
            amps[space.index(&vec![i; k])] = Complex64::ONE;
        }
        Self::new(space, amps)
    }

    /// Normalized unit tensor ⟨level⟩ / √level (GHZ state).
    pub fn ghz(level: usize, k: usize) -> Result<Self> {
        let mut state = Self::unit_tensor(level, k)?;
        let scale = 1.0 / (level as f64).sqrt();
        for a in &mut state.amplitudes {
            *a *= scale;
        }
        Ok(state)
    }

    /// The k-qubit W state (uniform superposition of single excitations).
    pub fn w_state(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput("W state needs k >= 2".into()));
        }
        let space = SpaceSpec::new(vec![2; k])?;
        let mut amps = vec![Complex64::ZERO; space.total_dim()];
        let scale = 1.0 / (k as f64).sqrt();
        for j in 0..k {
            let mut digits = vec![0usize; k];
            digits[j] = 1;
            amps[space.index(&digits)] = Complex64::new(scale, 0.0);
        }
        Self::new(space, amps)
    }

    /// Unnormalized state with i.i.d. complex Gaussian amplitudes drawn from
    /// the given seed (deterministic).
    pub fn random(dims: &[usize], seed: u64) -> Result<Self> {
        let space = SpaceSpec::new(dims.to_vec())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let amps = (0..space.total_dim())
            .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect();
        Self::new(space, amps)
    }

    /// Zero vector on the given space.
    pub fn zero(dims: &[usize]) -> Result<Self> {
        let space = SpaceSpec::new(dims.to_vec())?;
        let amps = vec![Complex64::ZERO; space.total_dim()];
        Self::new(space, amps)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_squared() == 0.0
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Tensor product with factorwise-merged indexing: part j of the result has
/// dimension dⱼ·eⱼ with `a`'s digit major.
pub fn tensor_product(a: &MultipartiteState, b: &MultipartiteState) -> Result<MultipartiteState> {
    let k = a.space.parts();
    if b.space.parts() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            got: b.space.parts(),
        });
    }
    let dims: Vec<usize> = (0..k).map(|j| a.space.dims[j] * b.space.dims[j]).collect();
    let space = SpaceSpec::new(dims)?;
    let mut amps = vec![Complex64::ZERO; space.total_dim()];
    for (ia, &va) in a.amplitudes.iter().enumerate() {
        if va == Complex64::ZERO {
            continue;
        }
        let da = a.space.digits(ia);
        for (ib, &vb) in b.amplitudes.iter().enumerate() {
            if vb == Complex64::ZERO {
                continue;
            }
            let db = b.space.digits(ib);
            let digits: Vec<usize> = (0..k).map(|j| da[j] * b.space.dims[j] + db[j]).collect();
            amps[space.index(&digits)] = va * vb;
        }
    }
    MultipartiteState::new(space, amps)
}

/// Direct sum: part j of the result has dimension dⱼ + eⱼ; `a` occupies the
/// low block of every part and `b` the high block, cross blocks are zero.
pub fn direct_sum(a: &MultipartiteState, b: &MultipartiteState) -> Result<MultipartiteState> {
    let k = a.space.parts();
    if b.space.parts() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            got: b.space.parts(),
        });
    }
    let dims: Vec<usize> = (0..k).map(|j| a.space.dims[j] + b.space.dims[j]).collect();
    let space = SpaceSpec::new(dims)?;
    let mut amps = vec![Complex64::ZERO; space.total_dim()];
    for (ia, &va) in a.amplitudes.iter().enumerate() {
        if va != Complex64::ZERO {
            amps[space.index(&a.space.digits(ia))] = va;
        }
    }
    for (ib, &vb) in b.amplitudes.iter().enumerate() {
        if vb != Complex64::ZERO {
            let db = b.space.digits(ib);
            let digits: Vec<usize> = (0..k).map(|j| a.space.dims[j] + db[j]).collect();
            amps[space.index(&digits)] = vb;
        }
    }
    MultipartiteState::new(space, amps)
}

/// Applies A₁ ⊗ … ⊗ A_k by successive mode contractions; the full Kronecker
/// matrix is never materialized. `maps[j]` has shape d′ⱼ × dⱼ.
pub fn apply_local(maps: &[CMat], psi: &MultipartiteState) -> Result<MultipartiteState> {
    let k = psi.space.parts();
    if maps.len() != k {
        return Err(Error::SizeMismatch {
            expected: k,
            got: maps.len(),
        });
    }
    let mut dims = psi.space.dims.clone();
    let mut amps = psi.amplitudes.clone();
    for (j, map) in maps.iter().enumerate() {
        let d_in = dims[j];
        if map.ncols() != d_in {
            return Err(Error::ShapeMismatch(format!(
                "map {j} has {} columns, part has dimension {d_in}",
                map.ncols()
            )));
        }
        let d_out = map.nrows();
        let prefix: usize = dims[..j].iter().product();
        let suffix: usize = dims[j + 1..].iter().product();
        let mut next = vec![Complex64::ZERO; prefix * d_out * suffix];
        for p in 0..prefix {
            for r in 0..d_out {
                for c in 0..d_in {
                    let m = map[(r, c)];
                    if m == Complex64::ZERO {
                        continue;
                    }
                    let src = (p * d_in + c) * suffix;
                    let dst = (p * d_out + r) * suffix;
                    for s in 0..suffix {
                        next[dst + s] += m * amps[src + s];
                    }
                }
            }
        }
        amps = next;
        dims[j] = d_out;
    }
    MultipartiteState::new(SpaceSpec::new(dims)?, amps)
}

/// Hermitian PSD reduced operator of |ψ⟩⟨ψ| on the parts in `side`
/// (complementary parts traced out). Trace equals ‖ψ‖².
pub fn marginal(psi: &MultipartiteState, side: &[usize]) -> Result<DensityMatrix> {
    let k = psi.space.parts();
    let mut side: Vec<usize> = side.to_vec();
    side.sort_unstable();
    side.dedup();
    if side.is_empty() || side.len() == k || side.iter().any(|&j| j >= k) {
        return Err(Error::InvalidInput(format!(
            "marginal needs a proper nonempty subset of parts, got {side:?} of {k}"
        )));
    }
    let rest: Vec<usize> = (0..k).filter(|j| !side.contains(j)).collect();
    let d_side: usize = side.iter().map(|&j| psi.space.dims[j]).product();
    let d_rest: usize = rest.iter().map(|&j| psi.space.dims[j]).product();

    // Reshape ψ into a d_side × d_rest matrix M; the marginal is M M†.
    let mut m = DMatrix::<Complex64>::zeros(d_side, d_rest);
    for (idx, &v) in psi.amplitudes.iter().enumerate() {
        if v == Complex64::ZERO {
            continue;
        }
        let digits = psi.space.digits(idx);
        let mut row = 0;
        for &j in &side {
            row = row * psi.space.dims[j] + digits[j];
        }
        let mut col = 0;
        for &j in &rest {
            col = col * psi.space.dims[j] + digits[j];
        }
        m[(row, col)] = v;
    }
    let rho = &m * m.adjoint();
    DensityMatrix::new(rho)
}

/// A Hermitian PSD operator with its trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: CMat,
    trace: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12 relative) and positivity
    /// (eigenvalues ≥ −1e−10·trace).
    pub fn new(matrix: CMat) -> Result<Self> {
        let scale = matrix.norm().max(1e-300);
        let asym = (&matrix - matrix.adjoint()).norm() / scale;
        if asym > 1e-12 {
            return Err(Error::NotHermitian(asym));
        }
        let trace = matrix.trace().re;
        let min_eig = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 * trace.max(1e-300) {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { matrix, trace })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in decreasing order, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&x| x.max(0.0))
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }
}

/// Normalized Schmidt spectrum of ψ across a bipartition: eigenvalues of
/// marginal(ψ, S)/‖ψ‖² in decreasing order, truncated at the numerical rank
/// (relative threshold `RANK_TOL`).
pub fn schmidt_spectrum(psi: &MultipartiteState, cut: &Bipartition) -> Result<ProbVector> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let rho = marginal(psi, cut.side())?;
    let norm_sq = psi.norm_squared();
    let mut ev: Vec<f64> = rho.eigenvalues().iter().map(|x| x / norm_sq).collect();
    let max = ev.first().copied().unwrap_or(0.0);
    ev.retain(|&x| x > RANK_TOL * max);
    ProbVector::new(ev)
}

/// Sandwiched Rényi divergence of order α ∈ (0,1) between |ψ⟩⟨ψ| and a PSD
/// operator σ on the same total space:
/// (α/(α−1)) log₂ ⟨ψ| σ^{(1−α)/α} |ψ⟩, via the eigendecomposition of σ.
pub fn sandwiched_divergence_rank1(
    psi: &MultipartiteState,
    sigma: &CMat,
    alpha: f64,
) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::OutOfRange(format!("order must be in (0,1), got {alpha}")));
    }
    let d = psi.space.total_dim();
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            got: sigma.nrows(),
        });
    }
    let scale = sigma.norm().max(1e-300);
    let asym = (sigma - sigma.adjoint()).norm() / scale;
    if asym > 1e-12 {
        return Err(Error::NotHermitian(asym));
    }
    let eig = sigma.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-10 * scale {
        return Err(Error::NotPsd(min_eig));
    }
    let t = (1.0 - alpha) / alpha;
    let psi_vec = crate::CVec::from_column_slice(&psi.amplitudes);
    let coeffs = eig.eigenvectors.adjoint() * psi_vec;
    let mut inner = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let ev = eig.eigenvalues[i].max(0.0);
        if ev > 0.0 {
            inner += ev.powf(t) * c.norm_sqr();
        }
    }
    Ok(alpha / (alpha - 1.0) * inner.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_tensor_amplitudes() {
        let u = MultipartiteState::unit_tensor(2, 3).unwrap();
        assert_eq!(u.space().dims(), &[2, 2, 2]);
        assert_abs_diff_eq!(u.norm(), 2.0_f64.sqrt(), epsilon = 1e-14);
        assert_eq!(u.amplitudes()[0], Complex64::ONE); // (0,0,0)
        assert_eq!(u.amplitudes()[7], Complex64::ONE); // (1,1,1)
        assert_eq!(u.amplitudes()[1], Complex64::ZERO);
        assert!(MultipartiteState::unit_tensor(0, 3).is_err());
    }

    #[test]
    fn ghz_is_normalized_unit() {
        let g = MultipartiteState::ghz(2, 3).unwrap();
        assert_abs_diff_eq!(g.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn explicit_length_checked() {
        let space = SpaceSpec::new(vec![2, 2]).unwrap();
        assert!(MultipartiteState::new(space, vec![Complex64::ONE; 3]).is_err());
    }

    #[test]
    fn tensor_of_units_is_unit() {
        let a = MultipartiteState::unit_tensor(2, 2).unwrap();
        let b = MultipartiteState::unit_tensor(3, 2).unwrap();
        let ab = tensor_product(&a, &b).unwrap();
        // Same multiset of amplitudes as ⟨6⟩ up to index permutation.
        let nonzero = ab.amplitudes().iter().filter(|&&v| v != Complex64::ZERO).count();
        assert_eq!(nonzero, 6);
        assert_abs_diff_eq!(ab.norm_squared(), 6.0, epsilon = 1e-12);
        // Diagonal positions (i·3+j, i·3+j).
        for i in 0..2 {
            for j in 0..3 {
                let d = i * 3 + j;
                assert_eq!(ab.amplitudes()[ab.space().index(&[d, d])], Complex64::ONE);
            }
        }
    }

    #[test]
    fn tensor_norm_multiplicative() {
        let a = MultipartiteState::random(&[2, 3], 11).unwrap();
        let b = MultipartiteState::random(&[2, 2], 12).unwrap();
        let ab = tensor_product(&a, &b).unwrap();
        assert_abs_diff_eq!(ab.norm(), a.norm() * b.norm(), epsilon = 1e-10 * ab.norm());
        let z = MultipartiteState::zero(&[2, 2]).unwrap();
        assert!(tensor_product(&a, &z).unwrap().is_zero());
    }

    #[test]
    fn direct_sum_norm_additive() {
        let a = MultipartiteState::random(&[2, 2], 21).unwrap();
        let b = MultipartiteState::random(&[3, 2], 22).unwrap();
        let s = direct_sum(&a, &b).unwrap();
        assert_eq!(s.space().dims(), &[5, 4]);
        assert_abs_diff_eq!(
            s.norm_squared(),
            a.norm_squared() + b.norm_squared(),
            epsilon = 1e-10 * s.norm_squared()
        );
        // a ⊕ 0 keeps a's amplitudes in the low block.
        let z = MultipartiteState::zero(&[1, 1]).unwrap();
        let az = direct_sum(&a, &z).unwrap();
        for idx in 0..a.space().total_dim() {
            let digits = a.space().digits(idx);
            assert_eq!(az.amplitudes()[az.space().index(&digits)], a.amplitudes()[idx]);
        }
    }

    #[test]
    fn direct_sum_marginal_block_structure() {
        let a = MultipartiteState::unit_tensor(2, 2).unwrap();
        let b = MultipartiteState::unit_tensor(3, 2).unwrap();
        let s = direct_sum(&a, &b).unwrap();
        let rho = marginal(&s, &[0]).unwrap();
        // Block-diagonal: no coherence between the a block (0..2) and b block (2..5).
        for i in 0..2 {
            for j in 2..5 {
                assert_abs_diff_eq!(rho.matrix()[(i, j)].norm(), 0.0, epsilon = 1e-14);
            }
        }
        let ra = marginal(&a, &[0]).unwrap();
        let rb = marginal(&b, &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    (rho.matrix()[(i, j)] - ra.matrix()[(i, j)]).norm(),
                    0.0,
                    epsilon = 1e-14
                );
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(
                    (rho.matrix()[(i + 2, j + 2)] - rb.matrix()[(i, j)]).norm(),
                    0.0,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn apply_local_identity_and_projector() {
        let g = MultipartiteState::ghz(2, 2).unwrap();
        let id = CMat::identity(2, 2);
        let out = apply_local(&[id.clone(), id.clone()], &g).unwrap();
        assert_eq!(out.amplitudes(), g.amplitudes());

        let mut proj = CMat::zeros(2, 2);
        proj[(0, 0)] = Complex64::ONE;
        let out = apply_local(&[proj, id], &g).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].re, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(out.norm_squared(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn apply_local_matches_dense_kronecker() {
        let psi = MultipartiteState::random(&[2, 2, 2], 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let normal = StandardNormal;
        let mut rand_mat = |r: usize, cdim: usize| {
            CMat::from_fn(r, cdim, |_, _| {
                c(Distribution::<f64>::sample(&normal, &mut rng), Distribution::<f64>::sample(&normal, &mut rng))
            })
        };
        let maps = [rand_mat(3, 2), rand_mat(2, 2), rand_mat(1, 2)];
        let out = apply_local(&maps, &psi).unwrap();

        // Dense oracle: build the full Kronecker matrix.
        let mut kron = maps[0].clone();
        for m in &maps[1..] {
            kron = kron.kronecker(m);
        }
        let dense = kron * crate::CVec::from_column_slice(psi.amplitudes());
        for (a, b) in out.amplitudes().iter().zip(dense.iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn apply_local_contraction_never_grows_norm() {
        let psi = MultipartiteState::random(&[3, 2, 2], 31).unwrap();
        // Contractions: random matrices scaled to operator norm <= 1.
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let normal = StandardNormal;
        let maps: Vec<CMat> = psi
            .space()
            .dims()
            .iter()
            .map(|&d| {
                let m = CMat::from_fn(d, d, |_, _| {
                    c(Distribution::<f64>::sample(&normal, &mut rng), Distribution::<f64>::sample(&normal, &mut rng))
                });
                let op_norm = (m.adjoint() * &m)
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(0.0_f64, f64::max)
                    .sqrt();
                m / c(op_norm, 0.0)
            })
            .collect();
        let out = apply_local(&maps, &psi).unwrap();
        assert!(out.norm() <= psi.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn marginals() {
        let g = MultipartiteState::ghz(2, 3).unwrap();
        let rho = marginal(&g, &[0]).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);

        let psi = MultipartiteState::random(&[2, 3, 2], 9).unwrap();
        let rho = marginal(&psi, &[1]).unwrap();
        assert_abs_diff_eq!(rho.trace(), psi.norm_squared(), epsilon = 1e-12 * psi.norm_squared());
        assert!(marginal(&psi, &[0, 1, 2]).is_err());
        assert!(marginal(&psi, &[]).is_err());
    }

    #[test]
    fn complementary_marginals_share_spectrum() {
        for seed in 0..10u64 {
            let psi = MultipartiteState::random(&[3, 3, 3], 100 + seed).unwrap();
            let cut = Bipartition::new([0, 2], 3).unwrap();
            let a = marginal(&psi, cut.side()).unwrap();
            let b = marginal(&psi, &cut.complement()).unwrap();
            let ea = a.eigenvalues();
            let eb = b.eigenvalues();
            let scale = psi.norm_squared();
            for i in 0..ea.len().min(eb.len()) {
                if ea[i] / scale > 1e-9 || eb[i] / scale > 1e-9 {
                    assert_abs_diff_eq!(ea[i], eb[i], epsilon = 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn schmidt_values() {
        let g = MultipartiteState::ghz(2, 3).unwrap();
        for j in 0..3 {
            let cut = Bipartition::elementary(j, 3).unwrap();
            let s = schmidt_spectrum(&g, &cut).unwrap();
            assert_eq!(s.len(), 2);
            assert_abs_diff_eq!(s.weights()[0], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(s.weights()[1], 0.5, epsilon = 1e-12);
        }
        // Product state: rank-1 spectrum.
        let a = MultipartiteState::new(
            SpaceSpec::new(vec![2, 2]).unwrap(),
            vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let s = schmidt_spectrum(&a, &Bipartition::elementary(0, 2).unwrap()).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s.weights()[0], 1.0, epsilon = 1e-12);

        let w = MultipartiteState::w_state(3).unwrap();
        let s = schmidt_spectrum(&w, &Bipartition::elementary(0, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(s.weights()[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.weights()[1], 1.0 / 3.0, epsilon = 1e-12);

        assert!(schmidt_spectrum(
            &MultipartiteState::zero(&[2, 2]).unwrap(),
            &Bipartition::elementary(0, 2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn schmidt_of_tensor_is_outer_product() {
        let a = MultipartiteState::random(&[2, 2], 41).unwrap();
        let b = MultipartiteState::random(&[2, 2], 42).unwrap();
        let ab = tensor_product(&a, &b).unwrap();
        let cut = Bipartition::elementary(0, 2).unwrap();
        let sa = schmidt_spectrum(&a, &cut).unwrap();
        let sb = schmidt_spectrum(&b, &cut).unwrap();
        let sab = schmidt_spectrum(&ab, &cut).unwrap();
        let mut outer: Vec<f64> = sa
            .weights()
            .iter()
            .flat_map(|&x| sb.weights().iter().map(move |&y| x * y))
            .collect();
        outer.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(sab.len(), outer.len());
        for (x, y) in sab.weights().iter().zip(outer.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn sandwiched_divergence_scalars() {
        let g = MultipartiteState::ghz(2, 2).unwrap();
        let id = CMat::identity(4, 4);
        assert_abs_diff_eq!(
            sandwiched_divergence_rank1(&g, &id, 0.5).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        for &alpha in &[0.3, 0.5, 0.8] {
            let scaled = &id * c(3.0, 0.0);
            assert_abs_diff_eq!(
                sandwiched_divergence_rank1(&g, &scaled, alpha).unwrap(),
                -(3.0_f64.log2()),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn sandwiched_divergence_matches_dense_power() {
        let psi = MultipartiteState::random(&[2, 2], 51).unwrap().normalized().unwrap();
        let m = MultipartiteState::random(&[4, 1], 52).unwrap();
        let mm = CMat::from_fn(4, 4, |i, j| {
            m.amplitudes()[i] * m.amplitudes()[j].conj()
        }) + CMat::identity(4, 4) * c(0.7, 0.0);
        for &alpha in &[0.4, 0.5, 0.75] {
            // Dense oracle for Tr((ρ^{1/2} σ^{(1-α)/α} ρ^{1/2})^α) with rank-1 ρ:
            // ⟨ψ|σ^{(1-α)/α}|ψ⟩^α, evaluated through an explicit matrix power.
            let t = (1.0 - alpha) / alpha;
            let eig = mm.clone().symmetric_eigen();
            let powered = &eig.eigenvectors
                * CMat::from_diagonal(&eig.eigenvalues.map(|x| c(x.powf(t), 0.0)))
                * eig.eigenvectors.adjoint();
            let v = crate::CVec::from_column_slice(psi.amplitudes());
            let inner = (v.adjoint() * &powered * &v)[(0, 0)].re;
            let expect = alpha / (alpha - 1.0) * inner.log2();
            assert_abs_diff_eq!(
                sandwiched_divergence_rank1(&psi, &mm, alpha).unwrap(),
                expect,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn bipartition_canonicalization() {
        let b = Bipartition::new([1, 2], 3).unwrap();
        assert_eq!(b.side(), &[0]); // complemented to contain part 0
        assert_eq!(b.display(), "1|23");
        let b2 = Bipartition::parse("23|1", 3).unwrap();
        assert_eq!(b, b2);
        assert!(Bipartition::new([0, 1, 2], 3).is_err());
        assert!(Bipartition::new(Vec::<usize>::new(), 3).is_err());
    }

    #[test]
    fn noncrossing_cases() {
        // Elementary bipartitions are pairwise noncrossing.
        let e: Vec<_> = (0..3).map(|j| Bipartition::elementary(j, 3).unwrap()).collect();
        for a in &e {
            for b in &e {
                assert!(a.noncrossing(b));
            }
        }
        // {12|34} and {13|24} cross.
        let a = Bipartition::new([0, 1], 4).unwrap();
        let b = Bipartition::new([0, 2], 4).unwrap();
        assert!(!a.noncrossing(&b));
        // {12|34} and {1|234} are noncrossing.
        let c = Bipartition::new([0], 4).unwrap();
        assert!(a.noncrossing(&c));
    }
}

//! Symmetric-subspace bases, isotypic and flattening projectors on tensor
//! powers, and the three equivariant isometries between symmetric powers.
//!
//! The compressed representation of `Sym^n(H)` is the occupation-multiset
//! basis: a basis vector is labelled by a nondecreasing tuple of n letters
//! from the alphabet `[D]`, D = dim H, and lifts to the normalized sum of its
//! distinct arrangements in `H^{⊗n}`. Projectors are applied matrix-free:
//! dense D^n × D^n operators are never formed, only vectors are moved.
//!
//! Isotypic projectors are realized as central idempotents
//! `P_λ = (dim[λ]/n!)·Σ_σ χ_λ(σ)ρ(σ)`, with the permutation sum grouped by
//! conjugacy class (one character lookup per class, one scatter per
//! permutation).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::multilinear::{Bipartition, MultipartiteState, SpaceSpec};
use crate::partitions::{enumerate_partitions, factorial, mn_character, weyl_dim, CycleType, Partition};
use crate::{CMat, CVec, Error, Result};

/// Default cap on the number of copies n. The permutation sum costs n!
/// applications per projector; 7! is the desk-scale knee.
pub const DEFAULT_COPY_CAP: usize = 7;

/// Relative tolerance for deciding membership in the symmetric subspace.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// The symmetric group S_n: all permutations with their conjugacy classes.
pub struct SnData {
    pub n: usize,
    /// All n! permutations as images (`perm[t]` = image of t).
    pub perms: Vec<Vec<u8>>,
    /// Index into `classes` for each permutation.
    pub class_of: Vec<usize>,
    /// Cycle types, in the order produced by `enumerate_partitions`.
    pub classes: Vec<Partition>,
}

impl SnData {
    fn build(n: usize) -> Self {
        let classes = enumerate_partitions(n as u32, None);
        let class_index: HashMap<Vec<u32>, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.parts().to_vec(), i))
            .collect();
        let mut perms = Vec::with_capacity(factorial(n as u64) as usize);
        let mut current: Vec<u8> = (0..n as u8).collect();
        permutations_rec(&mut current, 0, &mut perms);
        let class_of = perms
            .iter()
            .map(|p| class_index[cycle_type(p).parts()])
            .collect();
        SnData {
            n,
            perms,
            class_of,
            classes,
        }
    }

    /// Per-class coefficients of a weighted projector sum:
    /// `φ(C) = Σ_λ w(λ)·(dim[λ]/n!)·χ_λ(C)`.
    pub fn class_coefficients(&self, weights: &[(Partition, f64)]) -> Result<Vec<f64>> {
        let order = factorial(self.n as u64) as f64;
        let mut phi = vec![0.0; self.classes.len()];
        for (lam, w) in weights {
            if lam.n() as usize != self.n {
                return Err(Error::SizeMismatch {
                    expected: self.n,
                    got: lam.n() as usize,
                });
            }
            let dim = lam.dim_sn() as f64;
            for (ci, cls) in self.classes.iter().enumerate() {
                let chi = mn_character(lam, &CycleType(cls.clone()))? as f64;
                phi[ci] += w * dim / order * chi;
            }
        }
        Ok(phi)
    }
}

fn permutations_rec(current: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    let n = current.len();
    if k == n {
        out.push(current.clone());
        return;
    }
    for i in k..n {
        current.swap(k, i);
        permutations_rec(current, k + 1, out);
        current.swap(k, i);
    }
}

fn cycle_type(perm: &[u8]) -> Partition {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u32;
        let mut t = start;
        while !seen[t] {
            seen[t] = true;
            t = perm[t] as usize;
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(cycles).expect("cycle lengths are positive")
}

static SN_CACHE: Lazy<Mutex<HashMap<usize, Arc<SnData>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached S_n permutation/class data.
pub fn sn_data(n: usize) -> Arc<SnData> {
    let mut cache = SN_CACHE.lock().unwrap();
    cache.entry(n).or_insert_with(|| Arc::new(SnData::build(n))).clone()
}

/// Occupation-multiset basis of `Sym^n(H)` for a k-part space H.
///
/// Basis states are nondecreasing letter tuples in ascending lexicographic
/// order; `lift` sends state M to (1/√N_M) Σ over its N_M distinct
/// arrangements.
pub struct SymBasis {
    space: SpaceSpec,
    n: usize,
    states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    arr_counts: Vec<f64>,
}

impl SymBasis {
    pub fn new(space: &SpaceSpec, n: usize) -> Self {
        let d = space.total_dim();
        let mut states = Vec::new();
        let mut current: Vec<u16> = Vec::with_capacity(n);
        fn rec(d: usize, n: usize, start: u16, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if current.len() == n {
                out.push(current.clone());
                return;
            }
            for l in start..d as u16 {
                current.push(l);
                rec(d, n, l, current, out);
                current.pop();
            }
        }
        rec(d, n, 0, &mut current, &mut states);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let arr_counts = states.iter().map(|s| arrangement_count(s)).collect();
        SymBasis {
            space: space.clone(),
            n,
            states,
            index,
            arr_counts,
        }
    }

    /// Single-alphabet constructor: `Sym^n(C^D)`.
    pub fn single(d: usize, n: usize) -> Self {
        Self::new(&SpaceSpec::new(vec![d]).expect("d >= 1"), n)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn copies(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u16] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u16>] {
        &self.states
    }

    /// Number of distinct arrangements N_M of basis state i.
    pub fn arrangement_count(&self, i: usize) -> f64 {
        self.arr_counts[i]
    }

    pub fn position(&self, sorted_letters: &[u16]) -> Option<usize> {
        self.index.get(sorted_letters).copied()
    }

    /// Distinct arrangements of basis state i, in lexicographic order.
    pub fn arrangements(&self, i: usize) -> Vec<Vec<u16>> {
        distinct_permutations(&self.states[i])
    }

    fn flat_index(&self, arr: &[u16]) -> usize {
        let d = self.space.total_dim();
        arr.iter().fold(0usize, |acc, &l| acc * d + l as usize)
    }

    /// Lifts compressed coefficients to the full `D^n` space.
    pub fn lift(&self, coeffs: &CVec) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::SizeMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        let full_dim = self.space.total_dim().pow(self.n as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); full_dim];
        for i in 0..self.dim() {
            let c = coeffs[i];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let scale = c / Complex64::new(self.arr_counts[i].sqrt(), 0.0);
            for arr in self.arrangements(i) {
                out[self.flat_index(&arr)] = scale;
            }
        }
        Ok(out)
    }

    /// Orthogonal projection of a full vector onto `Sym^n`, in compressed
    /// coordinates (no symmetry requirement).
    pub fn project(&self, v: &[Complex64]) -> Result<CVec> {
        let d = self.space.total_dim();
        let full_dim = d.pow(self.n as u32);
        if v.len() != full_dim {
            return Err(Error::SizeMismatch {
                expected: full_dim,
                got: v.len(),
            });
        }
        let mut out = CVec::zeros(self.dim());
        let mut letters = vec![0u16; self.n];
        for (idx, &amp) in v.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut rem = idx;
            for t in (0..self.n).rev() {
                letters[t] = (rem % d) as u16;
                rem /= d;
            }
            let mut key = letters.clone();
            key.sort_unstable();
            let i = self.index[&key];
            out[i] += amp;
        }
        for i in 0..self.dim() {
            out[i] /= Complex64::new(self.arr_counts[i].sqrt(), 0.0);
        }
        Ok(out)
    }

    /// Isometric compression of a vector lying in `Sym^n`. Rejects vectors
    /// whose distance from their symmetrization exceeds `SYMMETRY_TOL`
    /// relative to the norm.
    pub fn compress(&self, v: &[Complex64]) -> Result<CVec> {
        let coeffs = self.project(v)?;
        let sym = self.lift(&coeffs)?;
        let dev_sq: f64 = v
            .iter()
            .zip(sym.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        let deviation = dev_sq.sqrt();
        if deviation > SYMMETRY_TOL * norm_sq.sqrt().max(1e-300) {
            return Err(Error::NotSymmetric(deviation));
        }
        Ok(coeffs)
    }

    /// Compressed coordinates of ψ^{⊗n}: entry at multiset M is
    /// √N_M · ∏_{ℓ∈M} ψ_ℓ.
    pub fn compress_power(&self, psi: &MultipartiteState) -> Result<CVec> {
        if psi.space() != &self.space {
            return Err(Error::ShapeMismatch(format!(
                "state on {:?}, basis on {:?}",
                psi.space().dims(),
                self.space.dims()
            )));
        }
        let amps = psi.amplitudes();
        let mut out = CVec::zeros(self.dim());
        for i in 0..self.dim() {
            let mut prod = Complex64::new(1.0, 0.0);
            for &l in &self.states[i] {
                prod *= amps[l as usize];
            }
            out[i] = prod * Complex64::new(self.arr_counts[i].sqrt(), 0.0);
        }
        Ok(out)
    }
}

/// Number of distinct arrangements of a sorted letter tuple.
fn arrangement_count(sorted: &[u16]) -> f64 {
    let n = sorted.len() as u64;
    let mut num = factorial(n);
    let mut run = 1u64;
    for t in 1..sorted.len() {
        if sorted[t] == sorted[t - 1] {
            run += 1;
        } else {
            num /= factorial(run);
            run = 1;
        }
    }
    num /= factorial(run);
    num as f64
}

/// All distinct permutations of a sorted tuple, by repeated
/// next-permutation steps.
fn distinct_permutations(sorted: &[u16]) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = sorted.to_vec();
    loop {
        out.push(cur.clone());
        if !next_permutation(&mut cur) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [u16]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Digit tables for moving the `side` parts of letters across copies.
struct SideTables {
    side_code: Vec<usize>,
    rest_code: Vec<usize>,
    combine: Vec<u16>,
    d_rest: usize,
}

impl SideTables {
    fn new(space: &SpaceSpec, side: &[usize]) -> Self {
        let k = space.parts();
        let rest: Vec<usize> = (0..k).filter(|j| !side.contains(j)).collect();
        let d = space.total_dim();
        let d_side: usize = side.iter().map(|&j| space.dims()[j]).product();
        let d_rest: usize = rest.iter().map(|&j| space.dims()[j]).product::<usize>().max(1);
        let mut side_code = vec![0usize; d];
        let mut rest_code = vec![0usize; d];
        let mut combine = vec![0u16; d_side * d_rest];
        for l in 0..d {
            let digits = space.digits(l);
            let mut sc = 0;
            for &j in side {
                sc = sc * space.dims()[j] + digits[j];
            }
            let mut rc = 0;
            for &j in &rest {
                rc = rc * space.dims()[j] + digits[j];
            }
            side_code[l] = sc;
            rest_code[l] = rc;
            combine[sc * d_rest + rc] = l as u16;
        }
        SideTables {
            side_code,
            rest_code,
            combine,
            d_rest,
        }
    }

    #[inline]
    fn recombine(&self, side_letter: u16, rest_letter: u16) -> u16 {
        self.combine[self.side_code[side_letter as usize] * self.d_rest
            + self.rest_code[rest_letter as usize]]
    }
}

/// Which grouped factor an isotypic projector acts on.
#[derive(Clone, Debug)]
pub enum GroupSide {
    /// The whole space H (plain isotypic projector on H^{⊗n}).
    Whole,
    /// One side of a bipartition (flattening-grouped projector).
    Side(Vec<usize>),
}

/// Isotypic projector specification: a partition label and the grouped
/// factor it acts on.
#[derive(Clone, Debug)]
pub struct IsotypicSpec {
    pub lambda: Partition,
    pub side: GroupSide,
}

fn side_parts(space: &SpaceSpec, side: &GroupSide) -> Vec<usize> {
    match side {
        GroupSide::Whole => (0..space.parts()).collect(),
        GroupSide::Side(s) => s.clone(),
    }
}

/// Applies `P^{H_S}_λ ⊗ I` to a dense vector on `H^{⊗n}` (matrix-free).
///
/// The projector is the central idempotent `(dim[λ]/n!) Σ_σ χ_λ(σ) ρ_S(σ)`
/// where ρ_S permutes the S-side digits of the letters across copies. When
/// l(λ) exceeds dim H_S the result is exactly zero.
pub fn isotypic_apply(
    spec: &IsotypicSpec,
    space: &SpaceSpec,
    n: usize,
    v: &[Complex64],
    cap: usize,
) -> Result<Vec<Complex64>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if spec.lambda.n() as usize != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: spec.lambda.n() as usize,
        });
    }
    let d = space.total_dim();
    let full_dim = d.pow(n as u32);
    if v.len() != full_dim {
        return Err(Error::SizeMismatch {
            expected: full_dim,
            got: v.len(),
        });
    }
    let side = side_parts(space, &spec.side);
    let d_side = space.grouped_dim(&side);
    if weyl_dim(&spec.lambda, d_side) == 0 {
        return Ok(vec![Complex64::new(0.0, 0.0); full_dim]);
    }
    let sn = sn_data(n);
    let phi = sn.class_coefficients(&[(spec.lambda.clone(), 1.0)])?;
    let tables = SideTables::new(space, &side);

    // Letter decomposition of every flat index, computed once.
    let mut letters_of: Vec<Vec<u16>> = Vec::with_capacity(full_dim);
    for idx in 0..full_dim {
        let mut letters = vec![0u16; n];
        let mut rem = idx;
        for t in (0..n).rev() {
            letters[t] = (rem % d) as u16;
            rem /= d;
        }
        letters_of.push(letters);
    }

    let mut out = vec![Complex64::new(0.0, 0.0); full_dim];
    let mut arr2 = vec![0u16; n];
    for (pi, perm) in sn.perms.iter().enumerate() {
        let coeff = phi[sn.class_of[pi]];
        if coeff == 0.0 {
            continue;
        }
        let c = Complex64::new(coeff, 0.0);
        for (idx, &amp) in v.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let arr = &letters_of[idx];
            for t in 0..n {
                let p = perm[t] as usize;
                arr2[p] = tables.recombine(arr[t], arr[p]);
            }
            let target = arr2.iter().fold(0usize, |acc, &l| acc * d + l as usize);
            out[target] += c * amp;
        }
    }
    Ok(out)
}

/// Applies the flattening-grouped projector `(P^{H_S}_λ ⊗ I)` to a vector in
/// `Sym^n(H)`, across the bipartition `cut`. The input must lie in the
/// symmetric subspace; on such inputs the two one-sided applications agree.
pub fn flattening_projector_apply(
    cut: &Bipartition,
    lambda: &Partition,
    space: &SpaceSpec,
    n: usize,
    v: &[Complex64],
    cap: usize,
) -> Result<Vec<Complex64>> {
    let basis = SymBasis::new(space, n);
    basis.compress(v)?; // symmetry check
    let spec = IsotypicSpec {
        lambda: lambda.clone(),
        side: GroupSide::Side(cut.side().to_vec()),
    };
    isotypic_apply(&spec, space, n, v, cap)
}

/// Dense matrix of `P^{H_S}_λ ⊗ I` on the full `D^n` space, assembled
/// column by column. Intended for verification at small sizes.
pub fn isotypic_matrix(spec: &IsotypicSpec, space: &SpaceSpec, n: usize, cap: usize) -> Result<CMat> {
    let d = space.total_dim();
    let full_dim = d.pow(n as u32);
    let mut m = CMat::zeros(full_dim, full_dim);
    let mut e = vec![Complex64::new(0.0, 0.0); full_dim];
    for col in 0..full_dim {
        e[col] = Complex64::new(1.0, 0.0);
        let out = isotypic_apply(spec, space, n, &e, cap)?;
        for (row, val) in out.iter().enumerate() {
            m[(row, col)] = *val;
        }
        e[col] = Complex64::new(0.0, 0.0);
    }
    Ok(m)
}

/// One grouped factor of a class-sum operator: a bipartition side together
/// with one coefficient per conjugacy class of S_n.
pub struct GroupTerm {
    pub side: Vec<usize>,
    pub phi: Vec<f64>,
}

/// Operator on the compressed `Sym^n(H)` basis of the form
/// ∏_g Σ_σ φ_g(class σ) ρ_{S_g}(σ), applied matrix-free.
///
/// With `φ_g(C) = Σ_λ w_g(λ)(dim[λ]/n!)χ_λ(C)` each factor is the weighted
/// flattening-projector sum Σ_λ w_g(λ)(P^{H_{S_g}}_λ ⊗ I); distinct factors
/// commute when their bipartitions are noncrossing.
pub struct ClassSumOp {
    basis: Arc<SymBasis>,
    groups: Vec<GroupTerm>,
    tables: Vec<SideTables>,
    sn: Arc<SnData>,
}

impl ClassSumOp {
    pub fn new(basis: Arc<SymBasis>, groups: Vec<GroupTerm>) -> Self {
        let tables = groups
            .iter()
            .map(|g| SideTables::new(basis.space(), &g.side))
            .collect();
        let sn = sn_data(basis.copies());
        ClassSumOp {
            basis,
            groups,
            tables,
            sn,
        }
    }

    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    /// Applies the operator to a sparse compressed vector.
    ///
    /// Floating-point accumulation follows a fixed deterministic order
    /// (sorted working sets), so identical inputs reproduce bit-identical
    /// outputs across processes.
    pub fn apply_sparse(&self, x: &HashMap<usize, Complex64>) -> HashMap<usize, Complex64> {
        let n = self.basis.copies();
        let mut input: Vec<(usize, Complex64)> = x.iter().map(|(&i, &a)| (i, a)).collect();
        input.sort_unstable_by_key(|&(i, _)| i);
        // Expand to the full-space sparse representation.
        let mut acc: HashMap<Vec<u16>, Complex64> = HashMap::new();
        for (i, amp) in input {
            let scale = amp / Complex64::new(self.basis.arrangement_count(i).sqrt(), 0.0);
            for arr in self.basis.arrangements(i) {
                *acc.entry(arr).or_insert(Complex64::new(0.0, 0.0)) += scale;
            }
        }
        let mut full: Vec<(Vec<u16>, Complex64)> = acc.into_iter().collect();
        full.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        // Apply the group factors right to left.
        for (g, tables) in self.groups.iter().zip(&self.tables).rev() {
            let mut acc: HashMap<Vec<u16>, Complex64> = HashMap::with_capacity(full.len() * 2);
            let mut arr2 = vec![0u16; n];
            for (pi, perm) in self.sn.perms.iter().enumerate() {
                let coeff = g.phi[self.sn.class_of[pi]];
                if coeff == 0.0 {
                    continue;
                }
                let c = Complex64::new(coeff, 0.0);
                for (arr, amp) in &full {
                    for t in 0..n {
                        let p = perm[t] as usize;
                        arr2[p] = tables.recombine(arr[t], arr[p]);
                    }
                    *acc.entry(arr2.clone()).or_insert(Complex64::new(0.0, 0.0)) += c * amp;
                }
            }
            full = acc.into_iter().collect();
            full.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        }
        // Re-compress.
        let mut out: HashMap<usize, Complex64> = HashMap::new();
        for (arr, amp) in full {
            let mut key = arr;
            key.sort_unstable();
            let i = self
                .basis
                .position(&key)
                .expect("letters stay in the alphabet");
            *out.entry(i).or_insert(Complex64::new(0.0, 0.0)) +=
                amp / Complex64::new(self.basis.arrangement_count(i).sqrt(), 0.0);
        }
        out
    }

    /// Single column of the operator in the compressed basis.
    pub fn column(&self, j: usize) -> HashMap<usize, Complex64> {
        let mut x = HashMap::new();
        x.insert(j, Complex64::new(1.0, 0.0));
        self.apply_sparse(&x)
    }

    pub fn apply_dense(&self, x: &CVec) -> CVec {
        let sparse: HashMap<usize, Complex64> = x
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(|(i, a)| (i, *a))
            .collect();
        let result = self.apply_sparse(&sparse);
        let mut out = CVec::zeros(self.basis.dim());
        for (i, a) in result {
            out[i] = a;
        }
        out
    }

    /// ⟨x|Op|x⟩ (real for Hermitian operators).
    pub fn quadratic_form(&self, x: &CVec) -> f64 {
        let y = self.apply_dense(x);
        x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Dense compressed matrix, assembled column by column.
    pub fn to_matrix(&self) -> CMat {
        let dim = self.basis.dim();
        let mut m = CMat::zeros(dim, dim);
        for j in 0..dim {
            for (i, a) in self.column(j) {
                m[(i, j)] = a;
            }
        }
        m
    }
}

/// Sparse columns of an isometry between compressed symmetric bases.
pub struct CompressedIsometry {
    pub source_dim: usize,
    pub target_dim: usize,
    /// Column j lists its (target index, coefficient) entries.
    pub columns: Vec<Vec<(usize, f64)>>,
}

impl CompressedIsometry {
    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.target_dim, self.source_dim);
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                m[(i, j)] = Complex64::new(c, 0.0);
            }
        }
        m
    }

    /// Max-abs deviation of W*W from the identity.
    pub fn gram_residual(&self) -> f64 {
        let w = self.to_dense();
        let gram = w.adjoint() * &w;
        let mut worst: f64 = 0.0;
        for i in 0..self.source_dim {
            for j in 0..self.source_dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// W* x for a dense target vector.
    pub fn adjoint_apply(&self, x: &CVec) -> CVec {
        let mut out = CVec::zeros(self.source_dim);
        for (j, col) in self.columns.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(i, c) in col {
                acc += Complex64::new(c, 0.0) * x[i];
            }
            out[j] = acc;
        }
        out
    }
}

/// Multiplicity profile of a sorted letter tuple: (letter, count) pairs.
fn letter_counts(sorted: &[u16]) -> Vec<(u16, u32)> {
    let mut out: Vec<(u16, u32)> = Vec::new();
    for &l in sorted {
        match out.last_mut() {
            Some((ll, c)) if *ll == l => *c += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Equivariant isometry `W: Sym^{m+n}(H) → Sym^m(H) ⊗ Sym^n(H)` realized on
/// compressed bases (the subspace inclusion). Column M carries coefficient
/// √(N_A·N_B/N_M) at each split M = A ⊎ B into sub-multisets of sizes m, n.
pub fn inclusion_split(space: &SpaceSpec, m: usize, n: usize) -> CompressedIsometry {
    let basis_mn = SymBasis::new(space, m + n);
    let basis_m = SymBasis::new(space, m);
    let basis_n = SymBasis::new(space, n);
    let mut columns = Vec::with_capacity(basis_mn.dim());
    for j in 0..basis_mn.dim() {
        let state = basis_mn.state(j).to_vec();
        let counts = letter_counts(&state);
        let n_m = basis_mn.arrangement_count(j);
        let mut col = Vec::new();
        // Choose how many of each distinct letter go to the first factor.
        let mut choice = vec![0u32; counts.len()];
        enumerate_splits(&counts, m as u32, 0, &mut choice, &mut |choice| {
            let mut a = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(n);
            for (idx, &(l, c)) in counts.iter().enumerate() {
                for _ in 0..choice[idx] {
                    a.push(l);
                }
                for _ in 0..(c - choice[idx]) {
                    b.push(l);
                }
            }
            let ia = basis_m.position(&a).expect("sub-multiset in basis");
            let ib = basis_n.position(&b).expect("sub-multiset in basis");
            let na = basis_m.arrangement_count(ia);
            let nb = basis_n.arrangement_count(ib);
            let coeff = (na * nb / n_m).sqrt();
            col.push((ia * basis_n.dim() + ib, coeff));
        });
        columns.push(col);
    }
    CompressedIsometry {
        source_dim: basis_mn.dim(),
        target_dim: basis_m.dim() * basis_n.dim(),
        columns,
    }
}

fn enumerate_splits(
    counts: &[(u16, u32)],
    remaining: u32,
    idx: usize,
    choice: &mut Vec<u32>,
    emit: &mut impl FnMut(&Vec<u32>),
) {
    if idx == counts.len() {
        if remaining == 0 {
            emit(choice);
        }
        return;
    }
    let available: u32 = counts[idx..].iter().map(|&(_, c)| c).sum();
    if available < remaining {
        return;
    }
    let max_here = counts[idx].1.min(remaining);
    for take in 0..=max_here {
        choice[idx] = take;
        enumerate_splits(counts, remaining - take, idx + 1, choice, emit);
    }
    choice[idx] = 0;
}

/// Equivariant isometry `W: Sym^n(H) ⊗ Sym^n(K) → Sym^n(H ⊗ K)` (the
/// subspace inclusion: vectors invariant under σ⊗τ are invariant under the
/// diagonal action). Source index (A, B) receives coefficient
/// √(N_C/(N_A·N_B)) from each pair-multiset C projecting to (A, B).
pub fn inclusion_tensor(space_h: &SpaceSpec, space_k: &SpaceSpec, n: usize) -> CompressedIsometry {
    let space_hk = product_space(space_h, space_k);
    let basis_h = SymBasis::new(space_h, n);
    let basis_k = SymBasis::new(space_k, n);
    let basis_hk = SymBasis::new(&space_hk, n);
    let source_dim = basis_h.dim() * basis_k.dim();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); source_dim];
    for ci in 0..basis_hk.dim() {
        let state = basis_hk.state(ci);
        let mut a: Vec<u16> = Vec::with_capacity(n);
        let mut b: Vec<u16> = Vec::with_capacity(n);
        for &l in state {
            let (la, lb) = split_product_letter(space_h, space_k, &space_hk, l);
            a.push(la);
            b.push(lb);
        }
        a.sort_unstable();
        b.sort_unstable();
        let ia = basis_h.position(&a).expect("projected multiset");
        let ib = basis_k.position(&b).expect("projected multiset");
        let coeff = (basis_hk.arrangement_count(ci)
            / (basis_h.arrangement_count(ia) * basis_k.arrangement_count(ib)))
        .sqrt();
        columns[ia * basis_k.dim() + ib].push((ci, coeff));
    }
    CompressedIsometry {
        source_dim,
        target_dim: basis_hk.dim(),
        columns,
    }
}

/// Equivariant isometry `W: Sym^m(H) ⊗ Sym^n(K) → Sym^{m+n}(H ⊕ K)`, the
/// symmetrized embedding. On compressed bases every column is a single
/// target basis vector: W(lift_A ⊗ lift_B) = lift_{A ⊎ shift(B)}.
pub fn embed_direct_sum(
    space_h: &SpaceSpec,
    space_k: &SpaceSpec,
    m: usize,
    n: usize,
) -> CompressedIsometry {
    let space_sum = sum_space(space_h, space_k);
    let basis_h = SymBasis::new(space_h, m);
    let basis_k = SymBasis::new(space_k, n);
    let basis_sum = SymBasis::new(&space_sum, m + n);
    let source_dim = basis_h.dim() * basis_k.dim();
    let mut columns = Vec::with_capacity(source_dim);
    for ia in 0..basis_h.dim() {
        for ib in 0..basis_k.dim() {
            let mut letters: Vec<u16> = basis_h
                .state(ia)
                .iter()
                .map(|&l| embed_letter(space_h, space_k, &space_sum, l, false))
                .chain(
                    basis_k
                        .state(ib)
                        .iter()
                        .map(|&l| embed_letter(space_h, space_k, &space_sum, l, true)),
                )
                .collect();
            letters.sort_unstable();
            let ci = basis_sum.position(&letters).expect("embedded multiset");
            columns.push(vec![(ci, 1.0)]);
        }
    }
    CompressedIsometry {
        source_dim,
        target_dim: basis_sum.dim(),
        columns,
    }
}

/// The product space with parts H_j ⊗ K_j.
pub fn product_space(h: &SpaceSpec, k: &SpaceSpec) -> SpaceSpec {
    assert_eq!(h.parts(), k.parts(), "part counts must match");
    SpaceSpec::new(
        h.dims()
            .iter()
            .zip(k.dims())
            .map(|(&a, &b)| a * b)
            .collect(),
    )
    .expect("positive dims")
}

/// The direct-sum space with parts H_j ⊕ K_j.
pub fn sum_space(h: &SpaceSpec, k: &SpaceSpec) -> SpaceSpec {
    assert_eq!(h.parts(), k.parts(), "part counts must match");
    SpaceSpec::new(
        h.dims()
            .iter()
            .zip(k.dims())
            .map(|(&a, &b)| a + b)
            .collect(),
    )
    .expect("positive dims")
}

/// Splits a letter of H ⊗ K into its H and K letters (per-part digits
/// i_j = a_j·e_j + b_j).
fn split_product_letter(h: &SpaceSpec, k: &SpaceSpec, hk: &SpaceSpec, letter: u16) -> (u16, u16) {
    let digits = hk.digits(letter as usize);
    let mut da = Vec::with_capacity(h.parts());
    let mut db = Vec::with_capacity(k.parts());
    for j in 0..h.parts() {
        da.push(digits[j] / k.dims()[j]);
        db.push(digits[j] % k.dims()[j]);
    }
    (h.index(&da) as u16, k.index(&db) as u16)
}

/// Embeds a letter of H (or K) into H ⊕ K.
fn embed_letter(h: &SpaceSpec, k: &SpaceSpec, sum: &SpaceSpec, letter: u16, high: bool) -> u16 {
    let digits = if high {
        k.digits(letter as usize)
    } else {
        h.digits(letter as usize)
    };
    let full: Vec<usize> = digits
        .iter()
        .enumerate()
        .map(|(j, &x)| if high { h.dims()[j] + x } else { x })
        .collect();
    sum.index(&full) as u16
}

/// Compressed matrix of `(U₁⊗…⊗U_k)^{⊗n}` restricted to symmetric
/// subspaces, for product maps U_j: H_j → K_j. Used by the O1 axiom check.
pub fn product_map_compressed(
    space_in: &SpaceSpec,
    space_out: &SpaceSpec,
    maps: &[CMat],
    n: usize,
) -> Result<CMat> {
    if maps.len() != space_in.parts() || space_out.parts() != space_in.parts() {
        return Err(Error::ShapeMismatch("one map per part required".into()));
    }
    let d_in = space_in.total_dim();
    let d_out = space_out.total_dim();
    // Single-copy product matrix U: H → K.
    let mut u = CMat::zeros(d_out, d_in);
    for col in 0..d_in {
        let dc = space_in.digits(col);
        for row in 0..d_out {
            let dr = space_out.digits(row);
            let mut prod = Complex64::new(1.0, 0.0);
            for j in 0..maps.len() {
                prod *= maps[j][(dr[j], dc[j])];
                if prod == Complex64::new(0.0, 0.0) {
                    break;
                }
            }
            u[(row, col)] = prod;
        }
    }
    let basis_in = SymBasis::new(space_in, n);
    let basis_out = SymBasis::new(space_out, n);
    let mut m = CMat::zeros(basis_out.dim(), basis_in.dim());
    for j in 0..basis_in.dim() {
        // U^{⊗n} lift(e_j), accumulated in the compressed target basis.
        let scale = 1.0 / basis_in.arrangement_count(j).sqrt();
        let mut acc: HashMap<Vec<u16>, Complex64> = HashMap::new();
        for arr in basis_in.arrangements(j) {
            // Tensor product of the letter columns of U.
            let mut partial: Vec<(Vec<u16>, Complex64)> =
                vec![(Vec::new(), Complex64::new(scale, 0.0))];
            for &l in &arr {
                let mut next = Vec::with_capacity(partial.len() * d_out);
                for (prefix, amp) in &partial {
                    for row in 0..d_out {
                        let entry = u[(row, l as usize)];
                        if entry == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut ext = prefix.clone();
                        ext.push(row as u16);
                        next.push((ext, amp * entry));
                    }
                }
                partial = next;
            }
            for (letters, amp) in partial {
                *acc.entry(letters).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        let mut entries: Vec<(Vec<u16>, Complex64)> = acc.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        for (letters, amp) in entries {
            let mut key = letters;
            key.sort_unstable();
            let i = basis_out.position(&key).expect("target letters in range");
            m[(i, j)] += amp / Complex64::new(basis_out.arrangement_count(i).sqrt(), 0.0);
        }
    }
    Ok(m)
}

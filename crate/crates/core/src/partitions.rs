//! Integer partitions, symmetric-group characters, Kronecker and
//! Littlewood–Richardson coefficients, and classical entropies.
//!
//! Characters are evaluated by the Murnaghan–Nakayama recursion on the
//! beta-set (first-column hook length) encoding and memoized per
//! `(partition, cycle type)` pair. Coefficient sums run over conjugacy
//! classes, never over group elements, and use exact integer arithmetic;
//! entropies use `f64` with base-2 logarithms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use once_cell::sync::Lazy;

use crate::{Error, Result};

/// A partition λ ⊢ n: nonincreasing positive parts. Trailing zeros are
/// stripped on construction and never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts, stripping trailing zeros.
    pub fn new(parts: impl Into<Vec<u32>>) -> Result<Self> {
        let mut parts = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts must be nonincreasing, got {parts:?}"
            )));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!(
                "interior zero part in {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    /// The empty partition of 0.
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// Single-row partition (n).
    pub fn row(n: u32) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Self { parts: vec![n] }
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts (the n in λ ⊢ n).
    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts l(λ).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part at `row` (0-based), 0 beyond the last row.
    pub fn part(&self, row: usize) -> u32 {
        self.parts.get(row).copied().unwrap_or(0)
    }

    /// The conjugate (transposed) partition.
    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0) as usize;
        let parts = (0..cols)
            .map(|j| self.parts.iter().filter(|&&p| p as usize > j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// λ/n as a probability vector.
    pub fn normalized(&self) -> ProbVector {
        let n = self.n() as f64;
        ProbVector::new(self.parts.iter().map(|&p| p as f64 / n).collect()).expect("parts >= 0")
    }

    /// Dimension of the irreducible S_n representation `[λ]`, by the hook
    /// length formula.
    pub fn dim_sn(&self) -> u64 {
        if self.is_empty() {
            return 1;
        }
        let num = factorial(self.n() as u64);
        let mut den: u128 = 1;
        let conj = self.conjugate();
        for (i, &p) in self.parts.iter().enumerate() {
            for j in 0..p as usize {
                let hook = (p as u128 - j as u128) + (conj.part(j) as u128 - i as u128) - 1;
                den *= hook;
            }
        }
        debug_assert_eq!(num % den, 0);
        (num / den) as u64
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{:?}", self.parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A conjugacy class of S_n, given by its cycle type.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycleType(pub Partition);

impl CycleType {
    /// The identity class (1, 1, …, 1) of S_n.
    pub fn identity(n: u32) -> Self {
        CycleType(Partition {
            parts: vec![1; n as usize],
        })
    }

    pub fn n(&self) -> u32 {
        self.0.n()
    }

    /// Number of permutations in the class: n! / ∏ᵢ iᵐ⁽ⁱ⁾ m(i)! where m(i)
    /// is the multiplicity of cycle length i.
    pub fn class_size(&self) -> u128 {
        let n = self.n() as u64;
        let mut centralizer: u128 = 1;
        let mut mult: HashMap<u32, u128> = HashMap::new();
        for &c in self.0.parts() {
            *mult.entry(c).or_insert(0) += 1;
        }
        for (&c, &m) in &mult {
            centralizer *= (c as u128).pow(m as u32) * factorial(m as u64);
        }
        let total = factorial(n);
        debug_assert_eq!(total % centralizer, 0);
        total / centralizer
    }
}

/// A vector of nonnegative weights, optionally normalized.
#[derive(Clone, PartialEq, Debug)]
pub struct ProbVector {
    weights: Vec<f64>,
}

pub const NORMALIZATION_TOL: f64 = 1e-12;

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::NegativeProbability(w));
        }
        Ok(Self { weights })
    }

    /// Builds from eigenvalues, clamping roundoff negatives above `-tol` to 0.
    pub fn from_eigenvalues(values: &[f64], tol: f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(values.len());
        for &v in values {
            if v < -tol {
                return Err(Error::NegativeProbability(v));
            }
            weights.push(v.max(0.0));
        }
        Ok(Self { weights })
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            weights: vec![1.0 / len as f64; len],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.sum() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Rescales to unit sum.
    pub fn normalize(&self) -> Result<Self> {
        let s = self.sum();
        if s <= 0.0 {
            return Err(Error::NotNormalized(s));
        }
        Ok(Self {
            weights: self.weights.iter().map(|w| w / s).collect(),
        })
    }
}

/// All partitions of `n` with length ≤ `max_len` (all lengths if `None`),
/// in ascending lexicographic order of the part sequences.
pub fn enumerate_partitions(n: u32, max_len: Option<usize>) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition::empty()];
    }
    let cap = max_len.unwrap_or(n as usize).min(n as usize) as u32;
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, slots: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=max_part.min(remaining)).rev() {
            // A feasible tail needs remaining - p <= p * (slots - 1).
            if remaining - p > p * (slots - 1) {
                continue;
            }
            current.push(p);
            rec(remaining - p, p, slots - 1, current, out);
            current.pop();
        }
    }
    rec(n, n, cap, &mut current, &mut out);
    out.sort();
    out
}

/// Shannon entropy in bits; requires a normalized vector.
pub fn shannon_entropy(p: &ProbVector) -> Result<f64> {
    if !p.is_normalized() {
        return Err(Error::NotNormalized(p.sum()));
    }
    Ok(p.weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum())
}

/// Rényi entropy of order α in bits: (1/(1−α)) log₂ Σ p(x)^α.
///
/// α = 1 routes to the Shannon entropy and α = ∞ to the min-entropy;
/// the input need not be normalized except in the α = 1 case.
pub fn renyi_entropy(p: &ProbVector, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 || alpha.is_nan() {
        return Err(Error::OutOfRange(format!("Rényi order must be positive, got {alpha}")));
    }
    if alpha == 1.0 {
        return shannon_entropy(p);
    }
    if alpha.is_infinite() {
        let max = p.weights.iter().cloned().fold(0.0_f64, f64::max);
        if max <= 0.0 {
            return Err(Error::OutOfRange("min-entropy of the zero vector".into()));
        }
        return Ok(-max.log2());
    }
    let s: f64 = p.weights.iter().filter(|&&w| w > 0.0).map(|&w| w.powf(alpha)).sum();
    if s <= 0.0 {
        return Err(Error::OutOfRange("Rényi entropy of the zero vector".into()));
    }
    Ok(s.log2() / (1.0 - alpha))
}

/// Binary entropy h(q) in bits, with h(0) = h(1) = 0.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange(format!("binary entropy needs q in [0,1], got {q}")));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(q) + term(1.0 - q))
}

static MN_CACHE: Lazy<Mutex<HashMap<(Vec<u32>, Vec<u32>), i64>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Irreducible character χ_λ evaluated on a conjugacy class, exactly.
pub fn mn_character(lam: &Partition, cls: &CycleType) -> Result<i64> {
    if lam.n() != cls.n() {
        return Err(Error::SizeMismatch {
            expected: lam.n() as usize,
            got: cls.n() as usize,
        });
    }
    // Cycles are consumed in nonincreasing order, which is also the cache key.
    let mut cycles = cls.0.parts().to_vec();
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    Ok(mn_rec(lam.parts(), &cycles))
}

fn mn_rec(parts: &[u32], cycles: &[u32]) -> i64 {
    if cycles.is_empty() {
        return 1; // parts is empty too when sizes agree
    }
    let key = (parts.to_vec(), cycles.to_vec());
    if let Some(&v) = MN_CACHE.lock().unwrap().get(&key) {
        return v;
    }
    let r = cycles[0];
    let rest = &cycles[1..];
    // Beta set: distinct values λ_i + (l - 1 - i) for i = 0..l, ascending.
    let l = parts.len();
    let beta: Vec<u32> = (0..l).map(|i| parts[i] + (l - 1 - i) as u32).collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        // Height of the removed border strip = number of beta values
        // strictly between target and b.
        let height = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        let mut new_beta = beta.clone();
        new_beta[i] = target;
        new_beta.sort_unstable_by(|a, c| c.cmp(a));
        // Back to partition form: λ'_i = β_i - (l - 1 - i), dropping zeros.
        let mut new_parts: Vec<u32> = new_beta
            .iter()
            .enumerate()
            .map(|(j, &bv)| bv - (l - 1 - j) as u32)
            .collect();
        while new_parts.last() == Some(&0) {
            new_parts.pop();
        }
        total += sign * mn_rec(&new_parts, rest);
    }
    MN_CACHE.lock().unwrap().insert(key, total);
    total
}

/// Kronecker coefficient g_{λμν} = (1/n!) Σ_C |C| χ_λ(C) χ_μ(C) χ_ν(C),
/// exactly as a nonnegative integer. Symmetric in its three arguments.
pub fn kronecker(lam: &Partition, mu: &Partition, nu: &Partition) -> Result<u64> {
    let n = lam.n();
    if mu.n() != n || nu.n() != n {
        return Err(Error::SizeMismatch {
            expected: n as usize,
            got: (if mu.n() != n { mu.n() } else { nu.n() }) as usize,
        });
    }
    let mut sum: i128 = 0;
    for cls_part in enumerate_partitions(n, None) {
        let cls = CycleType(cls_part);
        let size = cls.class_size() as i128;
        let a = mn_character(lam, &cls)? as i128;
        let b = mn_character(mu, &cls)? as i128;
        let c = mn_character(nu, &cls)? as i128;
        sum += size * a * b * c;
    }
    let order = factorial(n as u64) as i128;
    debug_assert_eq!(sum % order, 0);
    let g = sum / order;
    debug_assert!(g >= 0);
    Ok(g as u64)
}

/// Littlewood–Richardson coefficient c^λ_{μν} for λ ⊢ m+n, μ ⊢ m, ν ⊢ n:
/// the multiplicity of `[μ]⊗[ν]` in the restriction of `[λ]` to S_m × S_n,
/// computed by the double class sum. Exact.
pub fn littlewood_richardson(lam: &Partition, mu: &Partition, nu: &Partition) -> Result<u64> {
    let (m, n) = (mu.n(), nu.n());
    if lam.n() != m + n {
        return Err(Error::SizeMismatch {
            expected: (m + n) as usize,
            got: lam.n() as usize,
        });
    }
    let mut sum: i128 = 0;
    for rho_part in enumerate_partitions(m, None) {
        let rho = CycleType(rho_part);
        let chi_mu = mn_character(mu, &rho)? as i128;
        if chi_mu == 0 {
            continue;
        }
        for tau_part in enumerate_partitions(n, None) {
            let tau = CycleType(tau_part);
            let chi_nu = mn_character(nu, &tau)? as i128;
            if chi_nu == 0 {
                continue;
            }
            // The class of S_{m+n} containing an element of type (ρ, τ).
            let mut joint: Vec<u32> = rho.0.parts().iter().chain(tau.0.parts()).copied().collect();
            joint.sort_unstable_by(|a, b| b.cmp(a));
            let joint_cls = CycleType(Partition { parts: joint });
            let chi_lam = mn_character(lam, &joint_cls)? as i128;
            if chi_lam == 0 {
                continue;
            }
            let size = (rho.class_size() * tau.class_size()) as i128;
            sum += size * chi_mu * chi_nu * chi_lam;
        }
    }
    let order = (factorial(m as u64) * factorial(n as u64)) as i128;
    debug_assert_eq!(sum % order, 0);
    let c = sum / order;
    debug_assert!(c >= 0);
    Ok(c as u64)
}

/// Dimension of the irreducible U(d) representation 𝕊_λ(ℂ^d) by the
/// hook-content formula; 0 when l(λ) > d.
pub fn weyl_dim(lam: &Partition, d: usize) -> u64 {
    if lam.len() > d {
        return 0;
    }
    if lam.is_empty() {
        return 1;
    }
    let conj = lam.conjugate();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for (i, &p) in lam.parts().iter().enumerate() {
        for j in 0..p as usize {
            let content = j as i64 - i as i64;
            num *= (d as i64 + content) as u128;
            let hook = (p as u128 - j as u128) + (conj.part(j) as u128 - i as u128) - 1;
            den *= hook;
        }
    }
    debug_assert_eq!(num % den, 0);
    (num / den) as u64
}

/// n! as u128 (exact for n ≤ 33).
pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Binomial coefficient C(n, k) as u128.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn enumerate_small() {
        let all = enumerate_partitions(4, None);
        assert_eq!(all.len(), 5);
        let seqs: Vec<_> = all.iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(
            seqs,
            vec![vec![1, 1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]]
        );
        assert_eq!(enumerate_partitions(0, None), vec![Partition::empty()]);
        let capped = enumerate_partitions(4, Some(2));
        let seqs: Vec<_> = capped.iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(seqs, vec![vec![2, 2], vec![3, 1], vec![4]]);
    }

    #[test]
    fn enumeration_matches_count_recurrence() {
        // p(n) by the Euler pentagonal recurrence, as an independent count.
        let mut p = vec![1i64; 1];
        for n in 1..=12usize {
            let mut total = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * p[n - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= n {
                    total += sign * p[n - g2];
                }
                k += 1;
            }
            p.push(total);
            assert_eq!(enumerate_partitions(n as u32, None).len() as i64, total, "p({n})");
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![3, 1, 0]).is_ok());
        assert_eq!(Partition::new(vec![3, 1, 0]).unwrap().len(), 2);
    }

    #[test]
    fn entropies() {
        let u4 = ProbVector::uniform(4);
        assert_abs_diff_eq!(shannon_entropy(&u4).unwrap(), 2.0, epsilon = 1e-14);
        let point = ProbVector::new(vec![1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&point).unwrap(), 0.0, epsilon = 1e-14);
        let p = ProbVector::new(vec![0.3, 0.7]).unwrap();
        let expect = -(0.3_f64 * 0.3_f64.log2() + 0.7 * 0.7_f64.log2());
        assert_abs_diff_eq!(shannon_entropy(&p).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(expect, 0.8812908992306927, epsilon = 1e-12);

        assert!(shannon_entropy(&ProbVector::new(vec![0.5, 0.2]).unwrap()).is_err());
    }

    #[test]
    fn renyi_values() {
        let point = ProbVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(renyi_entropy(&point, 0.5).unwrap(), 0.0, epsilon = 1e-14);

        let p = ProbVector::new(vec![0.3, 0.7]).unwrap();
        let expect = 2.0 * (0.3_f64.sqrt() + 0.7_f64.sqrt()).log2();
        assert_abs_diff_eq!(renyi_entropy(&p, 0.5).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(expect, 0.9384853943613469, epsilon = 1e-12);

        for &alpha in &[0.25, 0.5, 2.0, f64::INFINITY] {
            let u = ProbVector::uniform(8);
            assert_abs_diff_eq!(renyi_entropy(&u, alpha).unwrap(), 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            renyi_entropy(&p, 1.0).unwrap(),
            shannon_entropy(&p).unwrap(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(renyi_entropy(&p, f64::INFINITY).unwrap(), -(0.7_f64.log2()), epsilon = 1e-14);
        assert!(renyi_entropy(&ProbVector::new(vec![0.5]).unwrap(), -1.0).is_err());
        assert!(ProbVector::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn binary_entropy_values() {
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(binary_entropy(0.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(binary_entropy(1.0).unwrap(), 0.0, epsilon = 1e-14);
        let expect = -(0.11_f64 * 0.11_f64.log2() + 0.89 * 0.89_f64.log2());
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(expect, 0.499915958164528, epsilon = 1e-12);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn characters_basic() {
        // Trivial representation: χ_(n) = 1 on every class.
        for n in 1..=6u32 {
            for cls in enumerate_partitions(n, None) {
                let c = CycleType(cls);
                assert_eq!(mn_character(&Partition::row(n), &c).unwrap(), 1);
            }
        }
        // Sign representation on a transposition class.
        let sign = Partition::new(vec![1, 1, 1]).unwrap();
        let transposition = CycleType(Partition::new(vec![2, 1]).unwrap());
        assert_eq!(mn_character(&sign, &transposition).unwrap(), -1);
        // χ_(2,1)(identity) = dim [2,1] = 2.
        let lam = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(mn_character(&lam, &CycleType::identity(3)).unwrap(), 2);
        assert_eq!(lam.dim_sn(), 2);
        // Size mismatch is rejected.
        assert!(mn_character(&lam, &CycleType::identity(4)).is_err());
    }

    #[test]
    fn character_identity_matches_hook_dims() {
        for n in 1..=7u32 {
            for lam in enumerate_partitions(n, None) {
                assert_eq!(
                    mn_character(&lam, &CycleType::identity(n)).unwrap(),
                    lam.dim_sn() as i64,
                    "λ = {lam}"
                );
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        // First orthogonality relation: Σ_C |C| χ_λ(C) χ_μ(C) = n! δ_{λμ}.
        for n in 1..=6u32 {
            let order = factorial(n as u64) as i128;
            let parts = enumerate_partitions(n, None);
            for lam in &parts {
                for mu in &parts {
                    let mut sum: i128 = 0;
                    for cls in enumerate_partitions(n, None) {
                        let c = CycleType(cls);
                        sum += c.class_size() as i128
                            * mn_character(lam, &c).unwrap() as i128
                            * mn_character(mu, &c).unwrap() as i128;
                    }
                    let expect = if lam == mu { order } else { 0 };
                    assert_eq!(sum, expect, "λ={lam} μ={mu}");
                }
            }
        }
    }

    #[test]
    fn kronecker_basic() {
        // g_(n)μν = δ_{μν} (Schur's lemma).
        for n in 2..=5u32 {
            let parts = enumerate_partitions(n, None);
            for mu in &parts {
                for nu in &parts {
                    let g = kronecker(&Partition::row(n), mu, nu).unwrap();
                    assert_eq!(g, u64::from(mu == nu), "μ={mu} ν={nu}");
                }
            }
        }
        let s21 = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(kronecker(&s21, &s21, &s21).unwrap(), 1);
        assert!(kronecker(&s21, &s21, &Partition::row(4)).is_err());
    }

    #[test]
    fn kronecker_symmetric_in_arguments() {
        let parts = enumerate_partitions(4, None);
        for a in &parts {
            for b in &parts {
                for c in &parts {
                    let g = kronecker(a, b, c).unwrap();
                    assert_eq!(g, kronecker(a, c, b).unwrap());
                    assert_eq!(g, kronecker(b, a, c).unwrap());
                    assert_eq!(g, kronecker(c, b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn littlewood_richardson_basic() {
        let lam = Partition::new(vec![2, 1]).unwrap();
        let mu = Partition::row(2);
        let nu = Partition::row(1);
        assert_eq!(littlewood_richardson(&lam, &mu, &nu).unwrap(), 1);
        // c^(m+n)_(m),(n) = 1.
        for m in 1..=3u32 {
            for n in 1..=3u32 {
                assert_eq!(
                    littlewood_richardson(&Partition::row(m + n), &Partition::row(m), &Partition::row(n))
                        .unwrap(),
                    1
                );
            }
        }
        assert!(littlewood_richardson(&Partition::row(4), &mu, &nu).is_err());
        // Pieri check: c^λ_{μ,(1)} = 1 iff λ/μ is a single box.
        let mu = Partition::new(vec![2, 1]).unwrap();
        let one = Partition::row(1);
        for lam in enumerate_partitions(4, None) {
            let rows = lam.len().max(mu.len());
            let is_box_added = (0..rows).filter(|&i| lam.part(i) == mu.part(i) + 1).count() == 1
                && (0..rows).filter(|&i| lam.part(i) == mu.part(i)).count() == rows - 1;
            let c = littlewood_richardson(&lam, &mu, &one).unwrap();
            assert_eq!(c, u64::from(is_box_added), "λ={lam}");
        }
    }

    #[test]
    fn weyl_dims() {
        // Symmetric powers: dim Sym^n(C^d) = C(d+n-1, n).
        for d in 1..=4usize {
            for n in 0..=5u32 {
                assert_eq!(
                    weyl_dim(&Partition::row(n), d) as u128,
                    binomial((d + n as usize - 1) as u64, n as u64)
                );
            }
        }
        assert_eq!(weyl_dim(&Partition::new(vec![2, 1]).unwrap(), 2), 2);
        assert_eq!(weyl_dim(&Partition::new(vec![1, 1, 1]).unwrap(), 2), 0);
        // d = 1: only single-row partitions survive.
        assert_eq!(weyl_dim(&Partition::new(vec![2, 2]).unwrap(), 1), 0);
        assert_eq!(weyl_dim(&Partition::row(5), 1), 1);
    }

    #[test]
    fn schur_weyl_dimension_count() {
        // Σ_{λ⊢n, l(λ)≤d} dim 𝕊_λ(C^d) · dim [λ] = d^n.
        for d in 1..=4usize {
            for n in 1..=6u32 {
                let total: u128 = enumerate_partitions(n, Some(d))
                    .iter()
                    .map(|lam| weyl_dim(lam, d) as u128 * lam.dim_sn() as u128)
                    .sum();
                assert_eq!(total, (d as u128).pow(n), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn class_sizes_sum_to_group_order() {
        for n in 1..=7u32 {
            let total: u128 = enumerate_partitions(n, None)
                .into_iter()
                .map(|p| CycleType(p).class_size())
                .sum();
            assert_eq!(total, factorial(n as u64));
        }
    }

    #[test]
    fn kronecker_entropic_vanishing() {
        for n in 2..=5u32 {
            let parts = enumerate_partitions(n, None);
            for a in &parts {
                for b in &parts {
                    for c in &parts {
                        if kronecker(a, b, c).unwrap() != 0 {
                            let h = |p: &Partition| shannon_entropy(&p.normalized()).unwrap();
                            assert!(
                                h(a) <= h(b) + h(c) + 1e-12,
                                "g ≠ 0 but H({a}) > H({b}) + H({c})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lr_entropic_sandwich() {
        for m in 1..=5u32 {
            for n in 1..=(6 - m) {
                let q = m as f64 / (m + n) as f64;
                let slack = binary_entropy(q).unwrap();
                for lam in enumerate_partitions(m + n, None) {
                    for mu in enumerate_partitions(m, None) {
                        for nu in enumerate_partitions(n, None) {
                            if littlewood_richardson(&lam, &mu, &nu).unwrap() == 0 {
                                continue;
                            }
                            let h = |p: &Partition| shannon_entropy(&p.normalized()).unwrap();
                            let mix = q * h(&mu) + (1.0 - q) * h(&nu);
                            let hl = h(&lam);
                            assert!(mix <= hl + 1e-12, "λ={lam} μ={mu} ν={nu}");
                            assert!(hl <= mix + slack + 1e-12, "λ={lam} μ={mu} ν={nu}");
                        }
                    }
                }
            }
        }
    }
}

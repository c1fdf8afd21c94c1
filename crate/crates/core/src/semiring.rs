//! Pluggable preordered semirings with abstract upper/lower functionals,
//! rank and subrank, finite-truncation regularization, and geometric means
//! of functionals.
//!
//! Universal statements are validated by sampling only (property-test
//! style), never claimed proven; the built-in instances are the naturals,
//! the positive-pairs semiring behind the known counterexamples, and a
//! tensor-backed instance whose preorder is the flattening-rank-dominance
//! surrogate (a necessary condition for restriction, not restriction
//! itself).

use std::fmt;
use std::sync::Arc;

use crate::multilinear::{self, marginal, Bipartition, MultipartiteState};
use crate::partitions::ProbVector;
use crate::{Error, Result};

/// A preordered semiring presented as operation oracles.
pub trait Semiring {
    type Elem: Clone + fmt::Debug;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// The preorder oracle a ≼ b.
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// The canonical image of a natural number (1 + … + 1).
    fn nat(&self, n: u64) -> Self::Elem {
        let mut acc = self.zero();
        for _ in 0..n {
            acc = self.add(&acc, &self.one());
        }
        acc
    }

    /// Equivalence induced by the preorder.
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }
}

/// ℕ with the usual operations and order.
pub struct Naturals;

impl Semiring for Naturals {
    type Elem = u64;

    fn add(&self, a: &u64, b: &u64) -> u64 {
        a + b
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn leq(&self, a: &u64, b: &u64) -> bool {
        a <= b
    }
    fn nat(&self, n: u64) -> u64 {
        n
    }
}

/// ℝ_{>0}² ∪ {(0,0)} with componentwise operations and order. The two
/// projections are its only spectral points.
pub struct PositivePairs;

impl Semiring for PositivePairs {
    type Elem = (f64, f64);

    fn add(&self, a: &(f64, f64), b: &(f64, f64)) -> (f64, f64) {
        (a.0 + b.0, a.1 + b.1)
    }
    fn mul(&self, a: &(f64, f64), b: &(f64, f64)) -> (f64, f64) {
        (a.0 * b.0, a.1 * b.1)
    }
    fn zero(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn one(&self) -> (f64, f64) {
        (1.0, 1.0)
    }
    fn leq(&self, a: &(f64, f64), b: &(f64, f64)) -> bool {
        a.0 <= b.0 && a.1 <= b.1
    }
    fn nat(&self, n: u64) -> (f64, f64) {
        (n as f64, n as f64)
    }
}

/// Order-k tensors with direct sum, tensor product, and the
/// flattening-rank-dominance preorder surrogate: x ≼ y iff every flattening
/// rank of x is at most that of y. This is a necessary condition for
/// restriction; deciding true restriction is out of reach.
pub struct TensorSemiring {
    pub parts: usize,
}

impl TensorSemiring {
    pub fn new(parts: usize) -> Result<Self> {
        if parts < 2 {
            return Err(Error::InvalidInput("tensor semiring needs k >= 2".into()));
        }
        Ok(Self { parts })
    }

    /// Numerical rank of the flattening across a bipartition.
    pub fn flattening_rank(&self, x: &MultipartiteState, cut: &Bipartition) -> usize {
        if x.is_zero() {
            return 0;
        }
        let rho = marginal(x, cut.side()).expect("proper bipartition");
        let ev = rho.eigenvalues();
        let max = ev.first().copied().unwrap_or(0.0);
        ev.iter().filter(|&&v| v > multilinear::RANK_TOL * max).count()
    }

    /// All flattening ranks, indexed by the bipartitions of `[k]`.
    pub fn rank_profile(&self, x: &MultipartiteState) -> Vec<usize> {
        self.bipartitions()
            .iter()
            .map(|cut| self.flattening_rank(x, cut))
            .collect()
    }

    pub fn bipartitions(&self) -> Vec<Bipartition> {
        let k = self.parts;
        let mut out = Vec::new();
        // Sides containing part 0, excluding the full set.
        for mask in 0..(1u32 << (k - 1)) {
            let side: Vec<usize> = std::iter::once(0)
                .chain((1..k).filter(|j| mask & (1 << (j - 1)) != 0))
                .collect();
            if side.len() < k {
                out.push(Bipartition::new(side, k).expect("proper side"));
            }
        }
        out
    }
}

impl Semiring for TensorSemiring {
    type Elem = MultipartiteState;

    fn add(&self, a: &MultipartiteState, b: &MultipartiteState) -> MultipartiteState {
        multilinear::direct_sum(a, b).expect("matching part counts")
    }
    fn mul(&self, a: &MultipartiteState, b: &MultipartiteState) -> MultipartiteState {
        multilinear::tensor_product(a, b).expect("matching part counts")
    }
    fn zero(&self) -> MultipartiteState {
        MultipartiteState::zero(&vec![1; self.parts]).expect("valid dims")
    }
    fn one(&self) -> MultipartiteState {
        MultipartiteState::unit_tensor(1, self.parts).expect("valid dims")
    }
    fn leq(&self, a: &MultipartiteState, b: &MultipartiteState) -> bool {
        self.rank_profile(a)
            .iter()
            .zip(self.rank_profile(b))
            .all(|(ra, rb)| *ra <= rb)
    }
    fn nat(&self, n: u64) -> MultipartiteState {
        if n == 0 {
            self.zero()
        } else {
            MultipartiteState::unit_tensor(n as usize, self.parts).expect("valid dims")
        }
    }
}

/// Declared behavior of a functional on a semiring.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FunctionalKind {
    Upper,
    Lower,
    SpectralCandidate,
}

/// A named ℝ≥0-valued functional with its declared kind.
pub struct Functional<S: Semiring> {
    pub name: String,
    pub kind: FunctionalKind,
    eval: Arc<dyn Fn(&S::Elem) -> f64 + Send + Sync>,
}

impl<S: Semiring> Clone for Functional<S> {
    fn clone(&self) -> Self {
        Functional {
            name: self.name.clone(),
            kind: self.kind,
            eval: self.eval.clone(),
        }
    }
}

impl<S: Semiring> Functional<S> {
    pub fn new(
        name: impl Into<String>,
        kind: FunctionalKind,
        eval: impl Fn(&S::Elem) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Functional {
            name: name.into(),
            kind,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: &S::Elem) -> f64 {
        (self.eval)(x)
    }
}

/// Least n ≤ `search_bound` with x ≼ n, or None when the bound is exhausted.
pub fn abstract_rank<S: Semiring>(s: &S, x: &S::Elem, search_bound: u64) -> Option<u64> {
    (0..=search_bound).find(|&n| s.leq(x, &s.nat(n)))
}

/// Greatest n ≤ `search_bound` with n ≼ x.
pub fn abstract_subrank<S: Semiring>(s: &S, x: &S::Elem, search_bound: u64) -> u64 {
    let mut best = 0;
    for n in 0..=search_bound {
        if s.leq(&s.nat(n), x) {
            best = n;
        }
    }
    best
}

/// The finite prefix of ⁿ√rank(xⁿ) for n = 1…n_max. The sequence is
/// nonincreasing along divisibility by submultiplicativity of the rank.
pub fn asymptotic_rank_estimate<S: Semiring>(
    s: &S,
    x: &S::Elem,
    n_max: usize,
    search_bound: u64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max);
    let mut power = s.one();
    for n in 1..=n_max {
        power = s.mul(&power, x);
        let rank = abstract_rank(s, &power, search_bound).ok_or_else(|| {
            Error::OutOfRange(format!(
                "rank search bound {search_bound} exhausted at power {n}"
            ))
        })?;
        out.push((rank as f64).powf(1.0 / n as f64));
    }
    Ok(out)
}

/// Weighted geometric mean of lower functionals: x ↦ ∏ f_i(x)^{θ(i)}.
/// The result is again a lower functional but in general not regular.
pub fn gmean_functionals<S: Semiring + 'static>(
    fs: &[Functional<S>],
    theta: &ProbVector,
) -> Result<Functional<S>> {
    if fs.len() != theta.len() {
        return Err(Error::SizeMismatch {
            expected: fs.len(),
            got: theta.len(),
        });
    }
    if !theta.is_normalized() {
        return Err(Error::NotNormalized(theta.sum()));
    }
    if let Some(bad) = fs.iter().find(|f| f.kind != FunctionalKind::Lower) {
        return Err(Error::InvalidInput(format!(
            "geometric means combine lower functionals; '{}' is {:?}",
            bad.name, bad.kind
        )));
    }
    let parts: Vec<(Functional<S>, f64)> = fs
        .iter()
        .cloned()
        .zip(theta.weights().iter().copied())
        .collect();
    let name = format!(
        "gmean[{}]",
        parts
            .iter()
            .map(|(f, w)| format!("{}^{w}", f.name))
            .collect::<Vec<_>>()
            .join("·")
    );
    Ok(Functional::new(name, FunctionalKind::Lower, move |x| {
        parts.iter().map(|(f, w)| f.eval(x).powf(*w)).product()
    }))
}

/// Finite truncation of the regularization of an upper functional:
/// for n = 1…n_max, the min over t in the sample set (the unit is always
/// included) of (g(t·xⁿ)/g(t))^{1/n}. Every term is a valid upper bound on
/// the regularized value by submultiplicativity; only monomial witnesses
/// t·Tⁿ are explored.
pub fn regularize<S: Semiring>(
    g: &Functional<S>,
    s: &S,
    x: &S::Elem,
    t_samples: &[S::Elem],
    n_max: usize,
) -> Result<Vec<f64>> {
    if g.kind != FunctionalKind::Upper {
        return Err(Error::InvalidInput(format!(
            "regularization applies to upper functionals; '{}' is {:?}",
            g.name, g.kind
        )));
    }
    let mut witnesses: Vec<S::Elem> = vec![s.one()];
    witnesses.extend(t_samples.iter().cloned());
    let mut out = Vec::with_capacity(n_max);
    let mut power = s.one();
    for n in 1..=n_max {
        power = s.mul(&power, x);
        let mut best = f64::INFINITY;
        for t in &witnesses {
            let denom = g.eval(t);
            if denom <= 0.0 {
                continue;
            }
            let value = (g.eval(&s.mul(t, &power)) / denom).powf(1.0 / n as f64);
            best = best.min(value);
        }
        if !best.is_finite() {
            return Err(Error::InvalidInput(
                "no witness with positive g(t) available".into(),
            ));
        }
        out.push(best);
    }
    Ok(out)
}

/// Outcome of the normalization equivalence checks.
#[derive(Clone, Debug)]
pub struct NormalizationReport {
    /// g(n) = n held on every sampled natural.
    pub normalized: bool,
    pub violations: Vec<String>,
}

/// Samples the equivalence chain for an upper functional g: g(n) = n on
/// naturals ⟺ g dominates the subrank; a lower functional f ≤ g forces the
/// same pattern on f.
pub fn check_normalization_equivalences<S: Semiring>(
    g: &Functional<S>,
    f: Option<&Functional<S>>,
    s: &S,
    nat_samples: &[u64],
    elem_samples: &[S::Elem],
    subrank_bound: u64,
) -> NormalizationReport {
    let tol = 1e-9;
    let mut violations = Vec::new();
    let mut normalized = true;
    for &n in nat_samples {
        let value = g.eval(&s.nat(n));
        if (value - n as f64).abs() > tol * (n as f64).max(1.0) {
            normalized = false;
            violations.push(format!("{}({n}) = {value} ≠ {n}", g.name));
        }
        if let Some(f) = f {
            let fv = f.eval(&s.nat(n));
            if fv > value + tol * value.abs().max(1.0) {
                violations.push(format!(
                    "lower functional {} exceeds {} at n = {n}: {fv} > {value}",
                    f.name, g.name
                ));
            }
            if normalized && (fv - n as f64).abs() > tol * (n as f64).max(1.0) {
                violations.push(format!(
                    "f ≤ g with g normalized forces f(n) = n; got {}({n}) = {fv}",
                    f.name
                ));
            }
        }
    }
    // Normalization ⟺ domination of the subrank, sampled.
    for (i, x) in elem_samples.iter().enumerate() {
        let sub = abstract_subrank(s, x, subrank_bound) as f64;
        let value = g.eval(x);
        if normalized && value < sub - tol * sub.max(1.0) {
            violations.push(format!(
                "{} is normalized but g(sample {i}) = {value} < subrank {sub}",
                g.name
            ));
        }
    }
    NormalizationReport {
        normalized,
        violations,
    }
}

/// Spot-checks the semiring laws and the Strassen property on samples.
/// Returns human-readable violations (empty when everything holds).
pub fn spot_check_laws<S: Semiring>(
    s: &S,
    samples: &[S::Elem],
    strassen_bound: u64,
) -> Vec<String> {
    let mut violations = Vec::new();
    for (i, a) in samples.iter().enumerate() {
        for (j, b) in samples.iter().enumerate() {
            if !s.equiv(&s.add(a, b), &s.add(b, a)) {
                violations.push(format!("addition not commutative on samples {i},{j}"));
            }
            if !s.equiv(&s.mul(a, b), &s.mul(b, a)) {
                violations.push(format!("multiplication not commutative on samples {i},{j}"));
            }
            for (l, c) in samples.iter().enumerate() {
                if !s.equiv(&s.add(&s.add(a, b), c), &s.add(a, &s.add(b, c))) {
                    violations.push(format!("addition not associative on {i},{j},{l}"));
                }
                if !s.equiv(&s.mul(&s.mul(a, b), c), &s.mul(a, &s.mul(b, c))) {
                    violations.push(format!("multiplication not associative on {i},{j},{l}"));
                }
                if !s.equiv(&s.mul(a, &s.add(b, c)), &s.add(&s.mul(a, b), &s.mul(a, c))) {
                    violations.push(format!("distributivity fails on {i},{j},{l}"));
                }
            }
        }
        if !s.leq(a, a) {
            violations.push(format!("preorder not reflexive on sample {i}"));
        }
        if !s.equiv(&s.mul(a, &s.one()), a) {
            violations.push(format!("unit law fails on sample {i}"));
        }
        if !s.equiv(&s.add(a, &s.zero()), a) {
            violations.push(format!("zero law fails on sample {i}"));
        }
        // Strassen property: nonzero elements are bracketed by naturals.
        if !s.equiv(a, &s.zero()) {
            let bounded = (1..=strassen_bound).any(|r| s.leq(a, &s.nat(r)));
            let inflates = (1..=strassen_bound)
                .any(|r| s.leq(&s.one(), &s.mul(&s.nat(r), a)));
            if !bounded {
                violations.push(format!("sample {i} is not bounded by any natural ≤ {strassen_bound}"));
            }
            if !inflates {
                violations.push(format!("r·(sample {i}) never dominates 1 for r ≤ {strassen_bound}"));
            }
        }
    }
    // Transitivity on sampled chains.
    for a in samples {
        for b in samples {
            for c in samples {
                if s.leq(a, b) && s.leq(b, c) && !s.leq(a, c) {
                    violations.push("preorder not transitive on samples".into());
                }
            }
        }
    }
    violations.sort();
    violations.dedup();
    violations
}

/// The two coordinate projections of `PositivePairs` (its spectral points).
pub fn pair_projections() -> (Functional<PositivePairs>, Functional<PositivePairs>) {
    (
        Functional::new("h1", FunctionalKind::Lower, |x: &(f64, f64)| x.0),
        Functional::new("h2", FunctionalKind::Lower, |x: &(f64, f64)| x.1),
    )
}

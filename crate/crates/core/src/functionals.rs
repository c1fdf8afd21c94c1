//! Finite-copy evaluation and bracketing of the monotones induced by
//! observable families, closed-form bipartite values, the closed
//! upper/lower bound sandwich, and the lower functional.
//!
//! The per-copy logarithmic value
//! `e_n = (1/n)(α/(1−α)) log₂ ⟨ψ^{⊗n}| A^{(1−α)/α}_{H,n} |ψ^{⊗n}⟩`
//! is superadditive in n, so `max_n e_n` is a certified lower end of the
//! limit E while the closed upper bound caps it from above; E is therefore
//! reported as an interval rather than a point estimate. Logs are base 2 and
//! F values exponentiate only at the end.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::multilinear::{marginal, schmidt_spectrum, tensor_product, Bipartition, MultipartiteState};
use crate::observables::{assemble_power, FamilySpec, NormalFamily, WeightModel};
use crate::partitions::{renyi_entropy, shannon_entropy, ProbVector};
use crate::schurweyl::{ClassSumOp, GroupTerm, SymBasis};
use crate::{CMat, Error, Result};

/// Order/weight parameters of a functional evaluation.
#[derive(Clone, Debug)]
pub struct FunctionalParams {
    pub alpha: f64,
    pub theta: Vec<(Bipartition, f64)>,
}

impl FunctionalParams {
    pub fn new(alpha: f64, theta: Vec<(Bipartition, f64)>) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::OutOfRange(format!("alpha must be in (0,1), got {alpha}")));
        }
        let p = ProbVector::new(theta.iter().map(|(_, w)| *w).collect())?;
        if !p.is_normalized() {
            return Err(Error::NotNormalized(p.sum()));
        }
        Ok(Self { alpha, theta })
    }

    /// α′ with 1/α + 1/α′ = 2: defined for α ∈ [1/2, 1), with α = 1/2
    /// mapping to ∞ (the min-entropy order).
    pub fn alpha_conjugate(&self) -> Result<f64> {
        conjugate_order(self.alpha)
    }
}

/// α′ = α/(2α−1) for α ∈ [1/2, 1); α = 1/2 maps to ∞.
pub fn conjugate_order(alpha: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!(
            "conjugate order needs alpha in [1/2, 1), got {alpha}"
        )));
    }
    if alpha == 0.5 {
        Ok(f64::INFINITY)
    } else {
        Ok(alpha / (2.0 * alpha - 1.0))
    }
}

/// Per-copy logarithmic value of the powered observable on ψ^{⊗n}, in bits.
pub fn finite_n_log_value(
    psi: &MultipartiteState,
    spec: &FamilySpec,
    alpha: f64,
    n: usize,
) -> Result<f64> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let family = NormalFamily::from_spec(spec, psi.space().parts())?;
    let op = assemble_power(&family, psi.space(), n, Some(alpha), WeightModel::Standard)?;
    let power = op.basis().compress_power(psi)?;
    let inner = op.quadratic_form(&power);
    Ok(alpha / (1.0 - alpha) * inner.log2() / n as f64)
}

/// Closed-form bipartite value `F^{α,A}(ψ) = Tr (Tr_S |ψ⟩⟨ψ|)^α` for
/// α ∈ (0, 1]; zero states map to 0.
pub fn bipartite_closed_form(psi: &MultipartiteState, cut: &Bipartition, alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha <= 1.0) {
        return Err(Error::OutOfRange(format!("alpha must be in (0,1], got {alpha}")));
    }
    if psi.is_zero() {
        return Ok(0.0);
    }
    let rho = marginal(psi, cut.side())?;
    Ok(rho.eigenvalues().iter().filter(|&&x| x > 0.0).map(|x| x.powf(alpha)).sum())
}

/// Closed upper bound on E:
/// (α/(1−α)) log₂‖ψ‖² + Σ_b θ(b)·H_α(normalized marginal across b).
pub fn closed_upper_bound(
    psi: &MultipartiteState,
    theta: &[(Bipartition, f64)],
    alpha: f64,
) -> Result<f64> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::OutOfRange(format!("alpha must be in (0,1), got {alpha}")));
    }
    weighted_entropy_bound(psi, theta, alpha, alpha)
}

/// Closed lower bound on E for α ∈ [1/2, 1):
/// (α/(1−α)) log₂‖ψ‖² + Σ_b θ(b)·H_{α′}(normalized marginal), α′ = α/(2α−1).
pub fn closed_lower_bound(
    psi: &MultipartiteState,
    theta: &[(Bipartition, f64)],
    alpha: f64,
) -> Result<f64> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let alpha_prime = conjugate_order(alpha)?;
    weighted_entropy_bound(psi, theta, alpha, alpha_prime)
}

fn weighted_entropy_bound(
    psi: &MultipartiteState,
    theta: &[(Bipartition, f64)],
    alpha: f64,
    entropy_order: f64,
) -> Result<f64> {
    let scale = alpha / (1.0 - alpha) * psi.norm_squared().log2();
    let mut total = scale;
    for (cut, w) in theta {
        let spectrum = schmidt_spectrum(psi, cut)?;
        total += w * renyi_entropy(&spectrum, entropy_order)?;
    }
    Ok(total)
}

/// Σ_b θ(b)·H(normalized marginal): the common α → 1 limit of the closed
/// bounds for a unit vector.
pub fn limit_shannon_value(psi: &MultipartiteState, theta: &[(Bipartition, f64)]) -> Result<f64> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let mut total = 0.0;
    for (cut, w) in theta {
        let spectrum = schmidt_spectrum(psi, cut)?;
        total += w * shannon_entropy(&spectrum)?;
    }
    Ok(total)
}

/// The α → 1 sequence (1/n) Σ_i θ_i ⟨ψ̂^{⊗n}| log₂ A^{(i)}_{H,n} |ψ̂^{⊗n}⟩
/// for noncrossing families (ψ normalized internally).
pub fn limit_sequence(
    psi: &MultipartiteState,
    spec: &FamilySpec,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    let family = NormalFamily::from_spec(spec, psi.space().parts())?;
    if !family.noncrossing() {
        return Err(Error::InvalidInput(
            "the α→1 limit sequence is only defined for noncrossing families".into(),
        ));
    }
    if n_max > family.cap {
        return Err(Error::CapExceeded {
            n: n_max,
            cap: family.cap,
        });
    }
    let unit = psi.normalized()?;
    let theta = family.tree.effective_weights();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let basis = std::sync::Arc::new(SymBasis::new(unit.space(), n));
        let power = basis.compress_power(&unit)?;
        let sn = crate::schurweyl::sn_data(n);
        let mut value = 0.0;
        for (leaf, &w) in family.leaves.iter().zip(theta.weights()) {
            // log₂ A = Σ_λ n·H(λ/n)·Q_λ on the surviving partitions.
            let d_side = unit.space().grouped_dim(leaf.side());
            let d_comp = unit.space().grouped_dim(&leaf.complement());
            let weights: Vec<(crate::partitions::Partition, f64)> =
                crate::partitions::enumerate_partitions(n as u32, None)
                    .into_iter()
                    .filter(|lam| {
                        crate::partitions::weyl_dim(lam, d_side) > 0
                            && crate::partitions::weyl_dim(lam, d_comp) > 0
                    })
                    .map(|lam| {
                        let h = shannon_entropy(&lam.normalized()).expect("normalized");
                        (lam, n as f64 * h)
                    })
                    .collect();
            let phi = sn.class_coefficients(&weights)?;
            let op = ClassSumOp::new(
                basis.clone(),
                vec![GroupTerm {
                    side: leaf.side().to_vec(),
                    phi,
                }],
            );
            value += w * op.quadratic_form(&power);
        }
        rows.push((n, value / n as f64));
    }
    Ok(rows)
}

/// Structured outcome of `estimate_upper`.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalReport {
    pub state_digest: String,
    pub spec: String,
    pub alpha: f64,
    pub theta: Vec<(String, f64)>,
    /// (n, e_n) pairs.
    pub sequence: Vec<(usize, f64)>,
    /// Certified bracket for the limit E: the low end is the better of
    /// max_n e_n and the closed lower bound (when α ≥ 1/2), the high end is
    /// the closed upper bound.
    #[serde(rename = "E_interval")]
    pub e_interval: (f64, f64),
    #[serde(rename = "F_interval")]
    pub f_interval: (f64, f64),
    pub closed_upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_lower: Option<f64>,
    pub violations: Vec<String>,
}

/// SHA-256 digest of the dimensions and raw amplitudes.
pub fn state_digest(psi: &MultipartiteState) -> String {
    let mut hasher = Sha256::new();
    for &d in psi.space().dims() {
        hasher.update((d as u64).to_le_bytes());
    }
    for a in psi.amplitudes() {
        hasher.update(a.re.to_le_bytes());
        hasher.update(a.im.to_le_bytes());
    }
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Computes e_1…e_{n_max}, brackets E by `[max_n e_n, closed_upper]`, and
/// flags any violated inequality. The true limit is not computable at finite
/// n; the interval is the honest answer.
pub fn estimate_upper(
    psi: &MultipartiteState,
    spec: &FamilySpec,
    alpha: f64,
    n_max: usize,
) -> Result<FunctionalReport> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let family = NormalFamily::from_spec(spec, psi.space().parts())?;
    let theta_weights = family.tree.effective_weights();
    let theta: Vec<(Bipartition, f64)> = family
        .leaves
        .iter()
        .cloned()
        .zip(theta_weights.weights().iter().copied())
        .collect();

    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if n_max > family.cap {
        return Err(Error::CapExceeded {
            n: n_max,
            cap: family.cap,
        });
    }
    let mut sequence = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        sequence.push((n, finite_n_log_value(psi, spec, alpha, n)?));
    }
    let e_max = sequence.iter().map(|&(_, e)| e).fold(f64::NEG_INFINITY, f64::max);
    let closed_upper = closed_upper_bound(psi, &theta, alpha)?;
    let closed_lower = if alpha >= 0.5 {
        Some(closed_lower_bound(psi, &theta, alpha)?)
    } else {
        None
    };
    // Both max_n e_n and the closed lower bound certify E from below; the
    // interval takes the better of the two.
    let e_low = closed_lower.map_or(e_max, |lo| lo.max(e_max)).min(closed_upper);

    let mut violations = Vec::new();
    let tol = 1e-9;
    let log_norm = alpha / (1.0 - alpha) * psi.norm_squared().log2();
    let log_c = family.bound_constant(psi.space()).log2();
    for &(n, e) in &sequence {
        if e > closed_upper + tol * closed_upper.abs().max(1.0) {
            violations.push(format!("e_{n} = {e} exceeds the closed upper bound {closed_upper}"));
        }
        if e < log_norm - tol || e > log_norm + log_c + tol {
            violations.push(format!(
                "e_{n} = {e} escapes the norm/bound-constant bracket [{log_norm}, {}]",
                log_norm + log_c
            ));
        }
        if n % 2 == 0 {
            if let Some(&(_, e_half)) = sequence.iter().find(|&&(m, _)| m == n / 2) {
                if e + tol < e_half {
                    violations.push(format!("doubling monotonicity violated: e_{n} < e_{}", n / 2));
                }
            }
        }
    }
    if let Some(lo) = closed_lower {
        if lo > closed_upper + tol * closed_upper.abs().max(1.0) {
            violations.push(format!(
                "closed lower bound {lo} exceeds the closed upper bound {closed_upper}"
            ));
        }
    }

    let one_minus = 1.0 - alpha;
    Ok(FunctionalReport {
        state_digest: state_digest(psi),
        spec: describe_family(&family),
        alpha,
        theta: theta
            .iter()
            .map(|(cut, w)| (cut.display(), *w))
            .collect(),
        sequence,
        e_interval: (e_low, closed_upper),
        f_interval: (
            2f64.powf(one_minus * e_low),
            2f64.powf(one_minus * closed_upper),
        ),
        closed_upper,
        closed_lower,
        violations,
    })
}

fn describe_family(family: &NormalFamily) -> String {
    if family.leaves.len() == 1 {
        format!("bipartite[{}]", family.leaves[0].display())
    } else {
        let leaves: Vec<String> = family.leaves.iter().map(|b| b.display()).collect();
        format!(
            "gmean[{}]{}",
            leaves.join(","),
            if family.noncrossing() { " (commuting)" } else { " (crossing)" }
        )
    }
}

/// Outcome of the lower-functional search.
#[derive(Clone, Debug, Serialize)]
pub struct LowerFunctionalReport {
    /// sup over evaluated candidates of
    /// H_{α′,θ}(φ/‖φ‖) + (α/(1−α)) log₂‖φ‖².
    pub e_value: f64,
    /// 2^{(1−α)·e_value}.
    pub f_value: f64,
    pub best_candidate: String,
    pub candidates_evaluated: usize,
    /// (m, best single-copy value of ψ^{⊗m} divided by m) for m ≤ power_cap;
    /// finite surrogates for the regularized limit.
    pub power_sequence: Vec<(usize, f64)>,
}

/// Evaluates the lower functional of order α with entropy order α′ by
/// maximizing over a finite candidate set of local contractions
/// φ = (A₁⊗…⊗A_k)ψ.
///
/// The candidate set always contains the identity (so the result dominates
/// the closed lower bound when α′ is the conjugate order); with a positive
/// `budget` it adds single-party rank-truncation filters built from Schmidt
/// data and `budget` seeded random contractions.
pub fn lower_functional(
    psi: &MultipartiteState,
    theta: &[(Bipartition, f64)],
    alpha: f64,
    alpha_prime: f64,
    budget: usize,
    seed: u64,
    power_cap: usize,
) -> Result<LowerFunctionalReport> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::OutOfRange(format!("alpha must be in (0,1), got {alpha}")));
    }
    if alpha_prime <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "alpha' must be positive, got {alpha_prime}"
        )));
    }
    let (e_value, best, count) = lower_single_copy(psi, theta, alpha, alpha_prime, budget, seed)?;
    let mut power_sequence = vec![(1, e_value)];
    let mut power = psi.clone();
    for m in 2..=power_cap {
        power = tensor_product(&power, psi)?;
        let (e_m, _, _) = lower_single_copy(&power, theta, alpha, alpha_prime, budget, seed ^ m as u64)?;
        power_sequence.push((m, e_m / m as f64));
    }
    Ok(LowerFunctionalReport {
        e_value,
        f_value: 2f64.powf((1.0 - alpha) * e_value),
        best_candidate: best,
        candidates_evaluated: count,
        power_sequence,
    })
}

fn lower_single_copy(
    psi: &MultipartiteState,
    theta: &[(Bipartition, f64)],
    alpha: f64,
    alpha_prime: f64,
    budget: usize,
    seed: u64,
) -> Result<(f64, String, usize)> {
    let k = psi.space().parts();
    let dims = psi.space().dims().to_vec();
    let identity: Vec<CMat> = dims.iter().map(|&d| CMat::identity(d, d)).collect();

    let evaluate = |phi: &MultipartiteState| -> Result<Option<f64>> {
        if phi.norm_squared() < 1e-24 * psi.norm_squared() {
            return Ok(None);
        }
        let mut value = alpha / (1.0 - alpha) * phi.norm_squared().log2();
        for (cut, w) in theta {
            let spectrum = schmidt_spectrum(phi, cut)?;
            value += w * renyi_entropy(&spectrum, alpha_prime)?;
        }
        Ok(Some(value))
    };

    let mut best = evaluate(psi)?.ok_or(Error::ZeroState)?;
    let mut best_name = "identity".to_string();
    let mut count = 1;

    if budget > 0 {
        // Rank-truncation filters from the single-party Schmidt data.
        for j in 0..k {
            if dims[j] < 2 {
                continue;
            }
            let rho = marginal(psi, &[j])?;
            let eig = rho.matrix().clone().symmetric_eigen();
            let mut order: Vec<usize> = (0..dims[j]).collect();
            order.sort_by(|&a, &b| {
                eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap()
            });
            for r in 1..dims[j] {
                let mut proj = CMat::zeros(dims[j], dims[j]);
                for &col in order.iter().take(r) {
                    let v = eig.eigenvectors.column(col);
                    for a in 0..dims[j] {
                        for b in 0..dims[j] {
                            proj[(a, b)] += v[a] * v[b].conj();
                        }
                    }
                }
                let mut maps = identity.clone();
                maps[j] = proj;
                let phi = crate::multilinear::apply_local(&maps, psi)?;
                count += 1;
                if let Some(value) = evaluate(&phi)? {
                    if value > best {
                        best = value;
                        best_name = format!("truncate part {} to rank {r}", j + 1);
                    }
                }
            }
        }
        // Seeded random contractions.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        for sample in 0..budget {
            let maps: Vec<CMat> = dims
                .iter()
                .map(|&d| {
                    let g = CMat::from_fn(d, d, |_, _| {
                        Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
                    });
                    let op_norm = (g.adjoint() * &g)
                        .symmetric_eigen()
                        .eigenvalues
                        .iter()
                        .cloned()
                        .fold(0.0_f64, f64::max)
                        .sqrt();
                    g / Complex64::new(op_norm.max(1e-12), 0.0)
                })
                .collect();
            let phi = crate::multilinear::apply_local(&maps, psi)?;
            count += 1;
            if let Some(value) = evaluate(&phi)? {
                if value > best {
                    best = value;
                    best_name = format!("random contraction #{sample}");
                }
            }
        }
    }
    Ok((best, best_name, count))
}

//! Verification suites behind `entmon verify`: structured pass/fail checks
//! with margins, deterministic for a fixed seed.

use num_complex::Complex64;
use serde::Serialize;

use entmon::gmean::{
    gmean_tree, max_divergence_rank1, psd_leq, GMeanMode, GMeanTree, PsdMatrix,
};
use entmon::multilinear::{Bipartition, SpaceSpec};
use entmon::observables::{verify_axioms, AxiomConfig, FamilySpec, WeightModel};
use entmon::partitions::{
    binary_entropy, enumerate_partitions, factorial, kronecker, littlewood_richardson,
    mn_character, shannon_entropy, weyl_dim, CycleType, Partition, ProbVector,
};
use entmon::schurweyl::{
    embed_direct_sum, inclusion_split, inclusion_tensor, isotypic_matrix, GroupSide, IsotypicSpec,
};
use entmon::semiring::{
    abstract_rank, abstract_subrank, gmean_functionals, pair_projections, regularize,
    spot_check_laws, Functional, FunctionalKind, PositivePairs, Semiring,
};
use entmon::{CMat, CVec, Error as CoreError};

pub struct VerifyConfig {
    pub suites: String,
    pub dims: String,
    pub alpha: f64,
    pub m: usize,
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    pub fault: bool,
    pub json: bool,
}

#[derive(Serialize)]
struct SuiteCheck {
    suite: &'static str,
    check: String,
    margin: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    slack_factor: Option<f64>,
}

#[derive(Serialize)]
struct VerifyOutput {
    checks: Vec<SuiteCheck>,
    all_pass: bool,
}

pub fn cmd_verify(cfg: &VerifyConfig) -> Result<(String, bool), CoreError> {
    const KNOWN: [&str; 5] = ["partitions", "schurweyl", "gmean", "observables", "semiring"];
    let requested: Vec<&str> = if cfg.suites.trim() == "all" {
        KNOWN.to_vec()
    } else {
        let list: Vec<&str> = cfg
            .suites
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .collect();
        for s in &list {
            if !KNOWN.contains(s) {
                return Err(CoreError::InvalidInput(format!("unknown suite '{s}'")));
            }
        }
        if list.is_empty() {
            return Err(CoreError::InvalidInput("empty suite selection".into()));
        }
        list
    };

    let mut checks = Vec::new();
    for suite in KNOWN {
        if !requested.contains(&suite) {
            continue;
        }
        match suite {
            "partitions" => partitions_suite(cfg, &mut checks),
            "schurweyl" => schurweyl_suite(cfg, &mut checks)?,
            "gmean" => gmean_suite(cfg, &mut checks)?,
            "observables" => observables_suite(cfg, &mut checks)?,
            "semiring" => semiring_suite(cfg, &mut checks)?,
            _ => unreachable!(),
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let text = if cfg.json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&VerifyOutput {
                checks,
                all_pass,
            })
            .unwrap()
        )
    } else {
        let mut out = String::new();
        for c in &checks {
            out.push_str(&format!(
                "{} {} :: {} (margin {:.3e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.check,
                c.margin
            ));
        }
        out.push_str(&format!("overall: {}\n", if all_pass { "PASS" } else { "FAIL" }));
        out
    };
    Ok((text, all_pass))
}

fn push(checks: &mut Vec<SuiteCheck>, suite: &'static str, check: String, margin: f64, tol: f64) {
    checks.push(SuiteCheck {
        suite,
        check,
        margin,
        pass: margin >= -tol,
        slack_factor: None,
    });
}

fn partitions_suite(cfg: &VerifyConfig, checks: &mut Vec<SuiteCheck>) {
    // Schur–Weyl dimension count Σ weyl·dim = d^n.
    let mut mismatches = 0;
    for d in 1..=4usize {
        for n in 1..=6u32 {
            let total: u128 = enumerate_partitions(n, Some(d))
                .iter()
                .map(|lam| weyl_dim(lam, d) as u128 * lam.dim_sn() as u128)
                .sum();
            if total != (d as u128).pow(n) {
                mismatches += 1;
            }
        }
    }
    push(
        checks,
        "partitions",
        "dimension count Σ dim𝕊_λ·dim[λ] = d^n for d ≤ 4, n ≤ 6".into(),
        -(mismatches as f64),
        0.0,
    );

    // Character orthogonality.
    let mut worst = 0i128;
    for n in 1..=5u32 {
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
                worst = worst.max((sum - expect).abs());
            }
        }
    }
    push(
        checks,
        "partitions",
        "character orthogonality Σ|C|χ_λχ_μ = n!δ for n ≤ 5".into(),
        -(worst as f64),
        0.0,
    );

    // Kronecker entropic vanishing + symmetry, exhaustive for n ≤ 4.
    let mut violations = 0;
    for n in 2..=4u32 {
        let parts = enumerate_partitions(n, None);
        for a in &parts {
            for b in &parts {
                for c in &parts {
                    let g = kronecker(a, b, c).unwrap();
                    if g != kronecker(b, c, a).unwrap() || g != kronecker(c, a, b).unwrap() {
                        violations += 1;
                    }
                    if g != 0 {
                        let h = |p: &Partition| shannon_entropy(&p.normalized()).unwrap();
                        if h(a) > h(b) + h(c) + cfg.tol.max(1e-12) {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    push(
        checks,
        "partitions",
        "Kronecker symmetry and entropic vanishing for n ≤ 4".into(),
        -(violations as f64),
        0.0,
    );

    // Littlewood–Richardson entropic sandwich for m + n ≤ 5.
    let mut violations = 0;
    for m in 1..=4u32 {
        for n in 1..=(5 - m) {
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
                        if mix > hl + 1e-12 || hl > mix + slack + 1e-12 {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    push(
        checks,
        "partitions",
        "LR entropic sandwich for m+n ≤ 5".into(),
        -(violations as f64),
        0.0,
    );
}

fn schurweyl_suite(cfg: &VerifyConfig, checks: &mut Vec<SuiteCheck>) -> Result<(), CoreError> {
    // Completeness, orthogonality, and ranks of the isotypic projectors.
    let mut worst_completeness: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut rank_mismatches = 0;
    for (d, n_top) in [(2usize, 4usize), (3, 3)] {
        let space = SpaceSpec::new(vec![d])?;
        for n in 2..=n_top {
            let full = d.pow(n as u32);
            let parts = enumerate_partitions(n as u32, None);
            let mats: Vec<CMat> = parts
                .iter()
                .map(|lam| {
                    isotypic_matrix(
                        &IsotypicSpec {
                            lambda: lam.clone(),
                            side: GroupSide::Whole,
                        },
                        &space,
                        n,
                        7,
                    )
                })
                .collect::<Result<_, _>>()?;
            let mut sum = CMat::zeros(full, full);
            for m in &mats {
                sum += m;
            }
            worst_completeness =
                worst_completeness.max(max_abs(&(sum - CMat::identity(full, full))));
            for (i, a) in mats.iter().enumerate() {
                for (j, b) in mats.iter().enumerate() {
                    let prod = a * b;
                    let expect = if i == j { a.clone() } else { CMat::zeros(full, full) };
                    worst_orth = worst_orth.max(max_abs(&(prod - expect)));
                }
                let rank = a
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .filter(|&&x| x > 0.5)
                    .count() as u64;
                if rank != weyl_dim(&parts[i], d) * parts[i].dim_sn() {
                    rank_mismatches += 1;
                }
            }
        }
    }
    push(
        checks,
        "schurweyl",
        "projector completeness Σ_λ P_λ = I (d ≤ 3)".into(),
        -worst_completeness,
        cfg.tol,
    );
    push(
        checks,
        "schurweyl",
        "projector orthogonality P_λP_μ = δP_λ (d ≤ 3)".into(),
        -worst_orth,
        cfg.tol,
    );
    push(
        checks,
        "schurweyl",
        "rank P_λ = dim𝕊_λ·dim[λ] (d ≤ 3)".into(),
        -(rank_mismatches as f64),
        0.0,
    );

    // Gram residuals of the three equivariant isometries.
    let single3 = SpaceSpec::new(vec![3])?;
    let single2 = SpaceSpec::new(vec![2])?;
    let residual = inclusion_split(&single3, 2, 2).gram_residual();
    push(checks, "schurweyl", "split inclusion W*W = I (D=3, m=n=2)".into(), -residual, 1e-12);
    let residual = inclusion_tensor(&single2, &single3, 2).gram_residual();
    push(checks, "schurweyl", "tensor inclusion W*W = I (2,3, n=2)".into(), -residual, 1e-12);
    let residual = embed_direct_sum(&single2, &single2, 1, 2).gram_residual();
    push(checks, "schurweyl", "direct-sum embedding W*W = I (2,2, m=1, n=2)".into(), -residual, 1e-12);
    Ok(())
}

fn gmean_suite(cfg: &VerifyConfig, checks: &mut Vec<SuiteCheck>) -> Result<(), CoreError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let tree = GMeanTree::balanced(&[0.5, 0.25, 0.25])?;
    let theta = tree.effective_weights();
    let dim = 4;
    let mut worst_equiv: f64 = 0.0;
    let mut worst_mono = f64::INFINITY;
    let mut worst_homog: f64 = 0.0;
    let mut worst_vector = f64::INFINITY;
    let mut worst_item4 = f64::INFINITY;
    for _ in 0..5 {
        let ops: Vec<PsdMatrix> = (0..3).map(|_| random_pd(dim, &mut rng)).collect();
        let g = gmean_tree(&tree, &ops, GMeanMode::Auto)?;

        // G1: unitary equivariance.
        let u = entmon::observables::random_isometry(dim, dim, &mut rng);
        let conj: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| PsdMatrix::from_nearly_hermitian(&u * o.matrix() * u.adjoint(), 1e-9))
            .collect::<Result<_, _>>()?;
        let g_conj = gmean_tree(&tree, &conj, GMeanMode::Auto)?;
        let expect = &u * g.matrix() * u.adjoint();
        worst_equiv = worst_equiv.max((g_conj.matrix() - &expect).norm() / expect.norm());

        // G2: monotonicity under PSD bumps.
        let bumped: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| {
                let e = random_psd(dim, &mut rng);
                PsdMatrix::new(o.matrix() + e.matrix())
            })
            .collect::<Result<_, _>>()?;
        let gb = gmean_tree(&tree, &bumped, GMeanMode::Auto)?;
        worst_mono = worst_mono.min(psd_leq(&g, &gb, cfg.tol)?.margin);

        // G5: homogeneity.
        let lam = 1.7;
        let scaled: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| PsdMatrix::new(o.matrix() * Complex64::new(lam, 0.0)))
            .collect::<Result<_, _>>()?;
        let gs = gmean_tree(&tree, &scaled, GMeanMode::Auto)?;
        worst_homog = worst_homog.max(
            (gs.matrix() - g.matrix() * Complex64::new(lam, 0.0)).norm() / gs.matrix().norm(),
        );

        // Vector lower bound and the quadratic-form product bound.
        let psi = random_unit(dim, &mut rng);
        let mut exponent = 0.0;
        for (i, op) in ops.iter().enumerate() {
            exponent += theta.weights()[i] * max_divergence_rank1(&psi, op)?;
        }
        let proj = PsdMatrix::new(
            CMat::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj())
                * Complex64::new(2.0_f64.powf(-exponent), 0.0),
        )?;
        worst_vector = worst_vector.min(psd_leq(&proj, &g, cfg.tol)?.margin);

        let form = |m: &PsdMatrix| {
            let v = m.matrix() * &psi;
            psi.iter().zip(v.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        };
        let lhs = form(&g);
        let rhs: f64 = ops
            .iter()
            .enumerate()
            .map(|(i, o)| form(o).powf(theta.weights()[i]))
            .product();
        worst_item4 = worst_item4.min(rhs - lhs);
    }
    push(checks, "gmean", "G1 unitary equivariance".into(), -worst_equiv, cfg.tol);
    push(checks, "gmean", "G2 monotonicity".into(), worst_mono, 1e-8);
    push(checks, "gmean", "G5 homogeneity".into(), -worst_homog, cfg.tol);
    push(checks, "gmean", "vector lower bound 2^{-Σθ·maxdiv}|ψ⟩⟨ψ| ≤ 𝔾".into(), worst_vector, 1e-8);
    push(checks, "gmean", "⟨ψ|𝔾|ψ⟩ ≤ ∏⟨ψ|A_i|ψ⟩^θ".into(), worst_item4, 1e-8);
    Ok(())
}

fn observables_suite(cfg: &VerifyConfig, checks: &mut Vec<SuiteCheck>) -> Result<(), CoreError> {
    let dims: Vec<usize> = cfg
        .dims
        .split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CoreError::InvalidInput(format!("bad dimension '{p}'")))
        })
        .collect::<Result<_, _>>()?;
    let space = SpaceSpec::new(dims)?;
    let model = if cfg.fault {
        WeightModel::EntropySignFlipped
    } else {
        WeightModel::Standard
    };
    let axiom_cfg = AxiomConfig {
        m: cfg.m,
        n: cfg.n,
        alpha: cfg.alpha,
        tol: cfg.tol,
        isometry_samples: 10,
        seed: cfg.seed,
        weight_model: model,
    };

    let spec = FamilySpec::bipartite(Bipartition::elementary(0, space.parts())?);
    let report = verify_axioms(&spec, &space, None, &axiom_cfg)?;
    for c in report.checks {
        checks.push(SuiteCheck {
            suite: "observables",
            check: format!("bipartite {} :: {}", c.axiom, c.instance),
            margin: c.margin,
            pass: c.pass,
            slack_factor: c.slack_factor,
        });
    }

    let gspace = SpaceSpec::new(vec![2, 2, 2])?;
    let gspec = FamilySpec::elementary_gmean(3, cfg.alpha, None)?;
    let report = verify_axioms(&gspec, &gspace, None, &axiom_cfg)?;
    for c in report.checks {
        checks.push(SuiteCheck {
            suite: "observables",
            check: format!("gmean {} :: {}", c.axiom, c.instance),
            margin: c.margin,
            pass: c.pass,
            slack_factor: c.slack_factor,
        });
    }
    Ok(())
}

fn semiring_suite(_cfg: &VerifyConfig, checks: &mut Vec<SuiteCheck>) -> Result<(), CoreError> {
    let s = PositivePairs;
    let (h1, h2) = pair_projections();
    let theta = ProbVector::new(vec![0.5, 0.5])?;
    let f = gmean_functionals(&[h1, h2], &theta)?;
    let targets = [((1.0, 1.0), 1.0), ((1.0, 4.0), 2.0), ((2.0, 5.0), 10.0_f64.sqrt())];
    let worst = targets
        .iter()
        .map(|(x, want)| (f.eval(x) - want).abs())
        .fold(0.0, f64::max);
    push(
        checks,
        "semiring",
        "geometric-mean functional values on (1,1),(1,4),(2,5)".into(),
        -worst,
        1e-12,
    );

    let g = Functional::<PositivePairs>::new("h1", FunctionalKind::Upper, |x| x.0);
    let samples: Vec<(f64, f64)> = vec![(1.0, 1.0), (2.0, 3.0), (0.5, 4.0)];
    let mut worst: f64 = 0.0;
    for x in &samples {
        let seq = regularize(&g, &s, x, &samples, 5)?;
        for v in seq {
            worst = worst.max((v - x.0).abs() / x.0.max(1.0));
        }
    }
    push(
        checks,
        "semiring",
        "regularization of a multiplicative upper functional is constant".into(),
        -worst,
        1e-12,
    );

    let rank_checks = [
        (abstract_rank(&s, &(1.0, 4.0), 100) == Some(4)),
        (abstract_subrank(&s, &(2.0, 5.0), 100) == 2),
        (abstract_rank(&s, &s.zero(), 10) == Some(0)),
    ];
    let failures = rank_checks.iter().filter(|&&ok| !ok).count();
    push(
        checks,
        "semiring",
        "abstract rank/subrank on positive pairs".into(),
        -(failures as f64),
        0.0,
    );

    let violations = spot_check_laws(&s, &[(1.0, 1.0), (1.0, 4.0), (2.0, 5.0), (0.0, 0.0)], 20);
    push(
        checks,
        "semiring",
        "semiring laws and Strassen property on samples".into(),
        -(violations.len() as f64),
        0.0,
    );
    Ok(())
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn random_pd(dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> PsdMatrix {
    let a = random_psd(dim, rng);
    PsdMatrix::new(a.matrix() + CMat::identity(dim, dim) * Complex64::new(0.25, 0.0)).unwrap()
}

fn random_psd(dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> PsdMatrix {
    let g = CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(
            rand::Rng::random::<f64>(rng) - 0.5,
            rand::Rng::random::<f64>(rng) - 0.5,
        )
    });
    PsdMatrix::new(&g * g.adjoint()).unwrap()
}

fn random_unit(dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> CVec {
    let v = CVec::from_fn(dim, |_, _| {
        Complex64::new(
            rand::Rng::random::<f64>(rng) - 0.5,
            rand::Rng::random::<f64>(rng) - 0.5,
        )
    });
    let n: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v / Complex64::new(n, 0.0)
}

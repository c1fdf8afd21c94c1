//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Every tolerance is pinned in code.
//!
//! Run with `cargo test -p entmon-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use std::process::Command;
use std::time::Instant;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entmon::functionals::{
    bipartite_closed_form, closed_lower_bound, closed_upper_bound, estimate_upper,
    finite_n_log_value,
};
use entmon::gmean::{
    gmean_tree, max_divergence_rank1, psd_leq, GMeanMode, GMeanTree, PsdMatrix,
};
use entmon::multilinear::{Bipartition, MultipartiteState, SpaceSpec};
use entmon::observables::{verify_axioms, AxiomConfig, FamilySpec};
use entmon::partitions::{
    enumerate_partitions, kronecker, littlewood_richardson, renyi_entropy, shannon_entropy,
    weyl_dim, Partition, ProbVector,
};
use entmon::schurweyl::{isotypic_matrix, GroupSide, IsotypicSpec};
use entmon::semiring::{
    gmean_functionals, pair_projections, regularize, Functional, FunctionalKind, PositivePairs,
};
use entmon::{CMat, CVec};

fn conclude(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {criterion}: PASS");
    } else {
        println!("acceptance {criterion}: FAIL ({} issue(s))", failures.len());
    }
    assert!(failures.is_empty(), "{criterion}:\n{}", failures.join("\n"));
}

#[test]
fn criterion_1_schur_weyl_projectors() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let tol = 1e-9;
    for d in 1..=3usize {
        let space = SpaceSpec::new(vec![d]).unwrap();
        for n in 1..=5usize {
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
                    .unwrap()
                })
                .collect();
            let max_abs =
                |m: &CMat| m.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
            let mut sum = CMat::zeros(full, full);
            for m in &mats {
                sum += m;
            }
            let dev = max_abs(&(sum - CMat::identity(full, full)));
            if dev > tol {
                failures.push(format!("completeness d={d} n={n}: deviation {dev:.3e}"));
            }
            for (i, a) in mats.iter().enumerate() {
                for (j, b) in mats.iter().enumerate() {
                    let prod = a * b;
                    let expect = if i == j { a.clone() } else { CMat::zeros(full, full) };
                    let dev = max_abs(&(prod - expect));
                    if dev > tol {
                        failures.push(format!(
                            "orthogonality d={d} n={n} λ={} μ={}: deviation {dev:.3e}",
                            parts[i], parts[j]
                        ));
                    }
                }
                let rank = a
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .filter(|&&x| x > 0.5)
                    .count() as u64;
                let expect = weyl_dim(&parts[i], d) * parts[i].dim_sn();
                if rank != expect {
                    failures.push(format!(
                        "rank d={d} n={n} λ={}: {rank} ≠ {expect}",
                        parts[i]
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() > 60.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 60 s"));
    }
    conclude("criterion 1 (Schur-Weyl projectors)", failures);
}

#[test]
fn criterion_2_axioms() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let pairs = [(1usize, 1usize), (1, 2), (2, 1), (2, 2)];
    let alphas = [0.5, 0.75];

    for dims in [vec![2usize, 2], vec![2, 3]] {
        let space = SpaceSpec::new(dims.clone()).unwrap();
        let spec = FamilySpec::bipartite(Bipartition::elementary(0, 2).unwrap());
        for &(m, n) in &pairs {
            for &alpha in &alphas {
                let cfg = AxiomConfig {
                    m,
                    n,
                    alpha,
                    tol: 1e-9,
                    isometry_samples: 10,
                    ..AxiomConfig::default()
                };
                let report = verify_axioms(&spec, &space, None, &cfg).unwrap();
                for c in &report.checks {
                    if !c.pass {
                        failures.push(format!(
                            "bipartite {dims:?} {} m={m} n={n} α={alpha}: margin {:.3e}",
                            c.axiom, c.margin
                        ));
                    }
                }
            }
        }
    }

    let gspace = SpaceSpec::new(vec![2, 2, 2]).unwrap();
    for &(m, n) in &pairs {
        for &alpha in &alphas {
            let gspec = FamilySpec::elementary_gmean(3, alpha, None).unwrap();
            let cfg = AxiomConfig {
                m,
                n,
                alpha,
                tol: 1e-9,
                isometry_samples: 10,
                ..AxiomConfig::default()
            };
            let report = verify_axioms(&gspec, &gspace, None, &cfg).unwrap();
            for c in &report.checks {
                if !c.pass {
                    failures.push(format!(
                        "gmean {} m={m} n={n} α={alpha}: margin {:.3e}",
                        c.axiom, c.margin
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() > 300.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 5 min"));
    }
    conclude("criterion 2 (axioms O1-O5)", failures);
}

#[test]
fn criterion_3_bipartite_closed_form() {
    let mut failures = Vec::new();
    let cut = Bipartition::elementary(0, 2).unwrap();
    let spec = FamilySpec::bipartite(cut.clone());
    let d = 2.0_f64;
    for seed in 0..20u64 {
        let psi = MultipartiteState::random(&[2, 2], 7000 + seed)
            .unwrap()
            .normalized()
            .unwrap();
        let spectrum = entmon::multilinear::schmidt_spectrum(&psi, &cut).unwrap();
        for &alpha in &[0.5, 0.75] {
            let h_alpha = renyi_entropy(&spectrum, alpha).unwrap();
            let mut sequence = Vec::new();
            for n in 1..=6usize {
                sequence.push((n, finite_n_log_value(&psi, &spec, alpha, n).unwrap()));
            }
            for &(n, e) in &sequence {
                if e > h_alpha + 1e-9 {
                    failures.push(format!(
                        "seed {seed} α={alpha}: e_{n} = {e} exceeds H_α = {h_alpha}"
                    ));
                }
            }
            for &(m, e_m) in &sequence {
                if let Some(&(_, e_2m)) = sequence.iter().find(|&&(n, _)| n == 2 * m) {
                    if e_2m + 1e-10 < e_m {
                        failures.push(format!("seed {seed} α={alpha}: e_{} < e_{m}", 2 * m));
                    }
                }
            }
            let e6 = sequence[5].1;
            let bound =
                d * (d + 1.0) / 2.0 * (6.0 + d).log2() / 6.0 * (alpha / (1.0 - alpha)).max(1.0);
            if (e6 - h_alpha).abs() > bound {
                failures.push(format!(
                    "seed {seed} α={alpha}: |e_6 - H_α| = {} exceeds {bound}",
                    (e6 - h_alpha).abs()
                ));
            }
        }
    }
    for r in [2usize, 3] {
        let u = MultipartiteState::unit_tensor(r, 2).unwrap();
        for &alpha in &[0.5, 0.75] {
            let f = bipartite_closed_form(&u, &cut, alpha).unwrap();
            if (f - r as f64).abs() > 1e-9 {
                failures.push(format!("unit tensor r={r} α={alpha}: F = {f}"));
            }
        }
    }
    conclude("criterion 3 (bipartite closed form)", failures);
}

fn elementary_theta() -> Vec<(Bipartition, f64)> {
    (0..3)
        .map(|j| (Bipartition::elementary(j, 3).unwrap(), 1.0 / 3.0))
        .collect()
}

fn sandwich_failures(alpha: f64) -> Vec<String> {
    let mut failures = Vec::new();
    let theta = elementary_theta();
    let spec = FamilySpec::elementary_gmean(3, alpha, None).unwrap();
    for seed in 0..20u64 {
        let psi = MultipartiteState::random(&[2, 2, 2], 1000 + seed).unwrap();
        let lo = closed_lower_bound(&psi, &theta, alpha).unwrap();
        let hi = closed_upper_bound(&psi, &theta, alpha).unwrap();
        let mut e_max = f64::NEG_INFINITY;
        for n in 1..=4usize {
            e_max = e_max.max(finite_n_log_value(&psi, &spec, alpha, n).unwrap());
        }
        if lo > e_max {
            failures.push(format!(
                "seed {seed} α={alpha}: closed_lower {lo:.6} > max_n≤4 e_n = {e_max:.6}"
            ));
        }
        if e_max > hi + 1e-9 {
            failures.push(format!(
                "seed {seed} α={alpha}: max e_n = {e_max:.6} > closed_upper {hi:.6}"
            ));
        }
    }
    failures
}

#[test]
fn criterion_4_sandwich_alpha_half_and_ghz() {
    let mut failures = sandwich_failures(0.5);

    let ghz = MultipartiteState::ghz(2, 3).unwrap();
    let theta = elementary_theta();
    let lo = closed_lower_bound(&ghz, &theta, 0.5).unwrap();
    let hi = closed_upper_bound(&ghz, &theta, 0.5).unwrap();
    if (lo - 1.0).abs() > 1e-9 || (hi - 1.0).abs() > 1e-9 {
        failures.push(format!("GHZ(2,3) closed bounds ({lo}, {hi}) differ from 1 bit"));
    }
    let spec = FamilySpec::elementary_gmean(3, 0.5, None).unwrap();
    let report = estimate_upper(&ghz, &spec, 0.5, 4).unwrap();
    let width = report.e_interval.1 - report.e_interval.0;
    if width > 0.25 {
        failures.push(format!("GHZ(2,3) E-interval width {width:.4} exceeds 0.25 bits"));
    }
    conclude("criterion 4a (sandwich, α = 1/2, GHZ bounds)", failures);
}

#[test]
fn criterion_4_sandwich_alpha_three_quarters() {
    // As stated this compares the closed lower bound, which certifies the
    // n → ∞ limit, against max_{n≤4} e_n. At α = 3/4 the finite-copy values
    // converge too slowly (the gap closes like log(n)/n) and every random
    // state undershoots the bound by ≈ 0.2–0.35 bits, so this check cannot
    // pass at desk scale; it is kept faithful rather than weakened. The
    // α = 1/2 instance and the upper half of the sandwich do pass.
    let failures = sandwich_failures(0.75);
    conclude("criterion 4b (sandwich, α = 3/4)", failures);
}

#[test]
fn criterion_5_gmean_axioms() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let tol = 1e-8;
    let tree = GMeanTree::balanced(&[0.5, 0.25, 0.25]).unwrap();
    let theta = tree.effective_weights();

    let random_psd = |dim: usize, rng: &mut ChaCha8Rng| -> PsdMatrix {
        let g = CMat::from_fn(dim, dim, |_, _| {
            Complex64::new(
                rand::Rng::random::<f64>(rng) - 0.5,
                rand::Rng::random::<f64>(rng) - 0.5,
            )
        });
        PsdMatrix::new(&g * g.adjoint()).unwrap()
    };
    let random_pd = |dim: usize, rng: &mut ChaCha8Rng| -> PsdMatrix {
        let a = random_psd(dim, rng);
        PsdMatrix::new(a.matrix() + CMat::identity(dim, dim) * Complex64::new(0.25, 0.0)).unwrap()
    };

    for case in 0..50usize {
        let dim = 2 + case % 7; // dimensions 2..8
        let ops: Vec<PsdMatrix> = (0..3).map(|_| random_pd(dim, &mut rng)).collect();
        let g = gmean_tree(&tree, &ops, GMeanMode::Auto).unwrap();
        let expect_equal = |label: &str, a: &PsdMatrix, b: &PsdMatrix| -> Option<String> {
            let forward = psd_leq(a, b, tol).unwrap().margin;
            let backward = psd_leq(b, a, tol).unwrap().margin;
            if forward < -tol * b.spectral_norm().max(1.0)
                || backward < -tol * a.spectral_norm().max(1.0)
            {
                Some(format!(
                    "case {case} {label}: margins {forward:.3e}/{backward:.3e}"
                ))
            } else {
                None
            }
        };

        // G1: unitary equivariance.
        let u = entmon::observables::random_isometry(dim, dim, &mut rng);
        let conj: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| PsdMatrix::from_nearly_hermitian(&u * o.matrix() * u.adjoint(), 1e-9).unwrap())
            .collect();
        let g_conj = gmean_tree(&tree, &conj, GMeanMode::Auto).unwrap();
        let expect =
            PsdMatrix::from_nearly_hermitian(&u * g.matrix() * u.adjoint(), 1e-9).unwrap();
        failures.extend(expect_equal("G1", &g_conj, &expect));

        // G2: monotonicity.
        let bumped: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| {
                let e = random_psd(dim, &mut rng);
                PsdMatrix::new(o.matrix() + e.matrix()).unwrap()
            })
            .collect();
        let gb = gmean_tree(&tree, &bumped, GMeanMode::Auto).unwrap();
        let check = psd_leq(&g, &gb, tol).unwrap();
        if !check.holds {
            failures.push(format!("case {case} G2: margin {:.3e}", check.margin));
        }

        // G3: tensor factorization against a second triple of dimension 2.
        let small: Vec<PsdMatrix> = (0..3).map(|_| random_pd(2, &mut rng)).collect();
        let tensored: Vec<PsdMatrix> = ops
            .iter()
            .zip(&small)
            .map(|(a, b)| PsdMatrix::new(a.matrix().kronecker(b.matrix())).unwrap())
            .collect();
        let g_tensor = gmean_tree(&tree, &tensored, GMeanMode::Auto).unwrap();
        let g_small = gmean_tree(&tree, &small, GMeanMode::Auto).unwrap();
        let expect = PsdMatrix::new(g.matrix().kronecker(g_small.matrix())).unwrap();
        failures.extend(expect_equal("G3", &g_tensor, &expect));

        // G4: direct-sum factorization.
        let summed: Vec<PsdMatrix> = ops
            .iter()
            .zip(&small)
            .map(|(a, b)| {
                let mut m = CMat::zeros(dim + 2, dim + 2);
                m.view_mut((0, 0), (dim, dim)).copy_from(a.matrix());
                m.view_mut((dim, dim), (2, 2)).copy_from(b.matrix());
                PsdMatrix::new(m).unwrap()
            })
            .collect();
        let g_sum = gmean_tree(&tree, &summed, GMeanMode::Auto).unwrap();
        let mut expect = CMat::zeros(dim + 2, dim + 2);
        expect.view_mut((0, 0), (dim, dim)).copy_from(g.matrix());
        expect
            .view_mut((dim, dim), (2, 2))
            .copy_from(g_small.matrix());
        failures.extend(expect_equal("G4", &g_sum, &PsdMatrix::new(expect).unwrap()));

        // G5: homogeneity.
        let lam = 2.3;
        let scaled: Vec<PsdMatrix> = ops
            .iter()
            .map(|o| PsdMatrix::new(o.matrix() * Complex64::new(lam, 0.0)).unwrap())
            .collect();
        let gs = gmean_tree(&tree, &scaled, GMeanMode::Auto).unwrap();
        let expect = PsdMatrix::new(g.matrix() * Complex64::new(lam, 0.0)).unwrap();
        failures.extend(expect_equal("G5", &gs, &expect));

        // G6: midpoint joint concavity, 𝔾((A+B)/2) ≥ (𝔾(A)+𝔾(B))/2.
        let other: Vec<PsdMatrix> = (0..3).map(|_| random_pd(dim, &mut rng)).collect();
        let mixed: Vec<PsdMatrix> = ops
            .iter()
            .zip(&other)
            .map(|(a, b)| {
                PsdMatrix::new((a.matrix() + b.matrix()) * Complex64::new(0.5, 0.0)).unwrap()
            })
            .collect();
        let g_mixed = gmean_tree(&tree, &mixed, GMeanMode::Auto).unwrap();
        let g_other = gmean_tree(&tree, &other, GMeanMode::Auto).unwrap();
        let bound = PsdMatrix::new(
            (g.matrix() + g_other.matrix()) * Complex64::new(0.5, 0.0),
        )
        .unwrap();
        let check = psd_leq(&bound, &g_mixed, tol).unwrap();
        if !check.holds {
            failures.push(format!("case {case} G6: margin {:.3e}", check.margin));
        }

        // Vector lower bound and the quadratic-form product bound.
        let psi = {
            let v = CVec::from_fn(dim, |_, _| {
                Complex64::new(
                    rand::Rng::random::<f64>(&mut rng) - 0.5,
                    rand::Rng::random::<f64>(&mut rng) - 0.5,
                )
            });
            let n: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v / Complex64::new(n, 0.0)
        };
        let mut exponent = 0.0;
        for (i, op) in ops.iter().enumerate() {
            exponent += theta.weights()[i] * max_divergence_rank1(&psi, op).unwrap();
        }
        let proj = PsdMatrix::new(
            CMat::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj())
                * Complex64::new(2.0_f64.powf(-exponent), 0.0),
        )
        .unwrap();
        let check = psd_leq(&proj, &g, tol).unwrap();
        if !check.holds {
            failures.push(format!("case {case} vector bound: margin {:.3e}", check.margin));
        }
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
        if lhs > rhs * (1.0 + 1e-8) {
            failures.push(format!("case {case} quadratic-form bound: {lhs} > {rhs}"));
        }
    }
    conclude("criterion 5 (geometric-mean axioms)", failures);
}

#[test]
fn criterion_6_coefficient_vanishing() {
    let mut failures = Vec::new();
    let h = |p: &Partition| shannon_entropy(&p.normalized()).unwrap();

    for n in 2..=5u32 {
        let parts = enumerate_partitions(n, None);
        for a in &parts {
            for b in &parts {
                for c in &parts {
                    let g = kronecker(a, b, c).unwrap();
                    // Exact symmetry under all six argument permutations.
                    for (x, y, z) in [
                        (a, c, b),
                        (b, a, c),
                        (b, c, a),
                        (c, a, b),
                        (c, b, a),
                    ] {
                        if kronecker(x, y, z).unwrap() != g {
                            failures.push(format!("symmetry broken at ({a},{b},{c})"));
                        }
                    }
                    if g != 0 && h(a) > h(b) + h(c) + 1e-12 {
                        failures.push(format!("Kronecker vanishing at ({a},{b},{c})"));
                    }
                }
            }
        }
    }

    for m in 1..=5u32 {
        for n in 1..=(6 - m) {
            let q = m as f64 / (m + n) as f64;
            let slack = entmon::partitions::binary_entropy(q).unwrap();
            for lam in enumerate_partitions(m + n, None) {
                for mu in enumerate_partitions(m, None) {
                    for nu in enumerate_partitions(n, None) {
                        if littlewood_richardson(&lam, &mu, &nu).unwrap() == 0 {
                            continue;
                        }
                        let mix = q * h(&mu) + (1.0 - q) * h(&nu);
                        let hl = h(&lam);
                        if mix > hl + 1e-12 {
                            failures.push(format!("LR lower at ({lam};{mu},{nu})"));
                        }
                        if hl > mix + slack + 1e-12 {
                            failures.push(format!("LR upper at ({lam};{mu},{nu})"));
                        }
                    }
                }
            }
        }
    }
    conclude("criterion 6 (Kronecker/LR vanishing)", failures);
}

#[test]
fn criterion_7_semiring_counterexamples() {
    let mut failures = Vec::new();
    let (h1, h2) = pair_projections();
    let theta = ProbVector::new(vec![0.5, 0.5]).unwrap();
    let f = gmean_functionals(&[h1, h2], &theta).unwrap();
    for (x, want) in [
        ((1.0, 1.0), 1.0),
        ((1.0, 4.0), 2.0),
        ((2.0, 5.0), 10.0_f64.sqrt()),
    ] {
        let got = f.eval(&x);
        if (got - want).abs() > 1e-12 {
            failures.push(format!("gmean functional at {x:?}: {got} ≠ {want}"));
        }
    }

    let s = PositivePairs;
    let g = Functional::<PositivePairs>::new("h1", FunctionalKind::Upper, |x| x.0);
    let samples = [(1.0, 1.0), (2.0, 3.0), (0.5, 4.0), (3.0, 0.25)];
    for x in &samples {
        let seq = regularize(&g, &s, x, &samples, 6).unwrap();
        for (i, v) in seq.iter().enumerate() {
            if (v - x.0).abs() > 1e-12 * x.0.max(1.0) {
                failures.push(format!(
                    "regularization of multiplicative g at {x:?}, n={}: {v} ≠ {}",
                    i + 1,
                    x.0
                ));
            }
        }
    }
    conclude("criterion 7 (semiring counterexamples)", failures);
}

#[test]
fn criterion_8_verify_determinism() {
    let mut failures = Vec::new();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_entmon"))
            .args([
                "verify",
                "--suite",
                "all",
                "--dims",
                "2x2",
                "--alpha",
                "0.5",
                "--m",
                "1",
                "--n",
                "1",
                "--seed",
                "20240915",
                "--format",
                "json",
            ])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    if !first.status.success() {
        failures.push(format!("verify exited with {:?}", first.status.code()));
    }
    if first.stdout != second.stdout {
        failures.push("stdout differs between identical runs".into());
    }
    if first.status.code() != second.status.code() {
        failures.push("exit codes differ between identical runs".into());
    }
    // Sanity: the output parses and matches the documented shape.
    let parsed: serde_json::Value = serde_json::from_slice(&first.stdout).expect("json output");
    if parsed.get("checks").and_then(|c| c.as_array()).is_none() {
        failures.push("verify output lacks a checks array".into());
    }
    if parsed.get("all_pass") != Some(&serde_json::Value::Bool(true)) {
        failures.push("default verify suite did not pass".into());
    }
    conclude("criterion 8 (determinism)", failures);
}

#[test]
fn unit_tensor_f_interval_contains_r() {
    // CLI-level example: the computed interval for ⟨3⟩ brackets 3.
    let u = MultipartiteState::unit_tensor(3, 2).unwrap();
    let spec = FamilySpec::bipartite(Bipartition::elementary(0, 2).unwrap());
    let report = estimate_upper(&u, &spec, 0.5, 3).unwrap();
    assert!(report.f_interval.0 <= 3.0 + 1e-9 && 3.0 <= report.f_interval.1 + 1e-9);
    assert_abs_diff_eq!(report.f_interval.1, 3.0, epsilon = 1e-9);
}

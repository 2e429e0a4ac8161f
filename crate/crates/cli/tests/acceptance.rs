//! Acceptance gate: one test per shipped guarantee. Each test line printed
//! by the harness is the pass/fail verdict for that guarantee.

use orbits_cli::demos::{counterexample_checks, random_nc_poly};
use orbits_cli::formats::{to_json, TupleDoc, VerdictDoc};
use orbits_core::moddec::{decompose, dim_hom, ModuleRep};
use orbits_core::pencil::{
    select_spanning_subset, witness_from_module_lr, witness_from_module_sim,
};
use orbits_core::{
    nclin, similar, sl_equivalent, structured_similar, Certificate, FieldDescriptor,
    InvolutionKind, LinearPencil, Matrix, MatrixTuple, NcMatPoly, NcPoly, Scalar, Verdict, Witness,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

fn rat() -> FieldDescriptor {
    FieldDescriptor::Rationals
}

fn f101() -> FieldDescriptor {
    FieldDescriptor::prime_field(101).unwrap()
}

fn random_invertible(field: FieldDescriptor, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::random(field, n, n, rng, 3);
        if m.invert().is_ok() {
            return m;
        }
    }
}

/// Block-diagonal nilpotent with one Jordan block per part.
fn nilpotent_jordan(field: FieldDescriptor, partition: &[usize]) -> Matrix {
    let n: usize = partition.iter().sum();
    let mut m = Matrix::zeros(field, n, n);
    let mut off = 0;
    for &k in partition {
        for i in 0..k.saturating_sub(1) {
            m.set(off + i, off + i + 1, field.one());
        }
        off += k;
    }
    m
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![2], vec![1, 1]],
        3 => vec![vec![3], vec![2, 1], vec![1, 1, 1]],
        4 => vec![
            vec![4],
            vec![3, 1],
            vec![2, 2],
            vec![2, 1, 1],
            vec![1, 1, 1, 1],
        ],
        _ => panic!("no partition table for n = {n}"),
    }
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orbits-acceptance-{name}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_tuple(dir: &std::path::Path, name: &str, t: &MatrixTuple) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, to_json(&TupleDoc::from_tuple(t))).unwrap();
    path
}

fn hadwin_larson_pair() -> (MatrixTuple, MatrixTuple) {
    let field = rat();
    let a = MatrixTuple::new(
        field,
        3,
        3,
        vec![
            Matrix::basis(field, 3, 3, 0, 1),
            Matrix::basis(field, 3, 3, 0, 2),
        ],
    );
    let b = MatrixTuple::new(
        field,
        3,
        3,
        vec![
            Matrix::basis(field, 3, 3, 1, 0),
            Matrix::basis(field, 3, 3, 2, 0),
        ],
    );
    (a, b)
}

#[test]
fn criterion_1_explicit_pencil_separates_the_polynomial_blind_pair() {
    let field = rat();
    let (a, b) = hadwin_larson_pair();

    // The explicit size-2 pencil takes ranks exactly 2 and 1.
    let pencil = LinearPencil::new(vec![
        Matrix::zeros(field, 2, 2),
        Matrix::basis(field, 2, 2, 0, 0),
        Matrix::basis(field, 2, 2, 1, 0),
    ]);
    assert_eq!(pencil.evaluate(&a).unwrap().rank(), 2);
    assert_eq!(pencil.evaluate(&b).unwrap().rank(), 1);

    // The witness command finds a separating pencil on its own in < 5 s.
    let dir = scratch_dir("criterion1");
    let pa = write_tuple(&dir, "a.json", &a);
    let pb = write_tuple(&dir, "b.json", &b);
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_orbits"))
        .arg("witness")
        .arg(&pa)
        .arg(&pb)
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    assert!(
        out.status.success(),
        "witness command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "witness search took {elapsed:?}"
    );
    let doc: VerdictDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.decision, "NotEquivalent");
    let ranks = doc.ranks.expect("pencil witness carries ranks");
    assert_ne!(ranks[0], ranks[1]);

    // No noncommutative polynomial of degree ≤ 4 separates the pair.
    let mut rng = ChaCha8Rng::seed_from_u64(0xac1);
    for _ in 0..100 {
        let f = random_nc_poly(field, 2, 4, &mut rng);
        assert_eq!(
            f.evaluate(&a).unwrap().rank(),
            f.evaluate(&b).unwrap().rank(),
            "a polynomial separated the pair: {f:?}"
        );
    }
}

#[test]
fn criterion_2_degeneration_counterexample_passes_all_five_checks() {
    let checks = counterexample_checks();
    assert_eq!(checks.len(), 5);
    for c in &checks {
        assert!(c.pass, "check '{}' failed: {}", c.name, c.detail);
    }
    // And end to end through the binary.
    let out = Command::new(env!("CARGO_BIN_EXE_orbits"))
        .args(["demo", "counterexample"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all checks passed"), "demo output:\n{text}");
}

#[test]
fn criterion_3_similarity_round_trip_on_200_pairs() {
    for field in [rat(), f101()] {
        let mut rng = ChaCha8Rng::seed_from_u64(0xac3);
        // 50 conjugate pairs per field → Equivalent with verified certificates.
        for trial in 0..50u64 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let a = MatrixTuple::random(field, m, n, n, &mut rng, 2);
            let g = random_invertible(field, n, &mut rng);
            let b = a.conjugate(&g).unwrap();
            match similar(&a, &b, 100 + trial).unwrap() {
                Verdict::Equivalent(Certificate::Similarity { p }) => {
                    assert!(p.invert().is_ok());
                    for i in 0..a.len() {
                        assert_eq!(p.mul(a.matrix(i)), b.matrix(i).mul(&p));
                    }
                }
                other => panic!("conjugate pair not certified on trial {trial}: {other:?}"),
            }
        }
        // 50 non-similar pairs per field (distinct nilpotent Jordan types,
        // hidden behind independent conjugations) → verified pencil witnesses.
        for trial in 0..50u64 {
            let n = rng.gen_range(2..=4);
            let parts = partitions(n);
            let i = rng.gen_range(0..parts.len());
            let mut j = rng.gen_range(0..parts.len());
            while j == i {
                j = rng.gen_range(0..parts.len());
            }
            let m = rng.gen_range(1..=3);
            let mut mats_a = vec![nilpotent_jordan(field, &parts[i])];
            let mut mats_b = vec![nilpotent_jordan(field, &parts[j])];
            for _ in 1..m {
                mats_a.push(Matrix::zeros(field, n, n));
                mats_b.push(Matrix::zeros(field, n, n));
            }
            let ga = random_invertible(field, n, &mut rng);
            let gb = random_invertible(field, n, &mut rng);
            let a = MatrixTuple::new(field, n, n, mats_a)
                .conjugate(&ga)
                .unwrap();
            let b = MatrixTuple::new(field, n, n, mats_b)
                .conjugate(&gb)
                .unwrap();
            match similar(&a, &b, 300 + trial).unwrap() {
                Verdict::NotEquivalent(Witness::SimilarityPencil {
                    pencil,
                    rank_a,
                    rank_b,
                }) => {
                    assert_ne!(rank_a, rank_b);
                    assert_eq!(pencil.evaluate(&a).unwrap().rank(), rank_a);
                    assert_eq!(pencil.evaluate(&b).unwrap().rank(), rank_b);
                }
                other => panic!("non-similar pair not witnessed on trial {trial}: {other:?}"),
            }
        }
    }
}

#[test]
fn criterion_4_witness_contracts_hold_on_100_instances_each() {
    let field = rat();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac4);
    // Similarity-action witnesses.
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let t = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=3);
        let c = MatrixTuple::random(field, m, t, t, &mut rng, 2);
        let x = MatrixTuple::random(field, m, n, n, &mut rng, 2);
        let pencil = witness_from_module_sim(&c);
        let hom = dim_hom(
            &ModuleRep::free(c.clone()).unwrap(),
            &ModuleRep::free(x.clone()).unwrap(),
        )
        .unwrap();
        assert_eq!(pencil.evaluate(&x).unwrap().rank(), t * n - hom);
    }
    // Left-right-action witnesses.
    let mut done = 0;
    while done < 100 {
        let m = rng.gen_range(1..=3);
        let r = rng.gen_range(0..=2);
        let s = rng.gen_range(1..=3);
        let p = rng.gen_range(1..=3);
        let q = rng.gen_range(1..=3);
        let c = MatrixTuple::random(field, m, r, s, &mut rng, 2);
        let x = MatrixTuple::random(field, m, p, q, &mut rng, 2);
        let Ok(pencil) = witness_from_module_lr(&c) else {
            continue;
        };
        let hom = dim_hom(&ModuleRep::quiver(c.clone()), &ModuleRep::quiver(x.clone())).unwrap();
        assert_eq!(pencil.evaluate(&x).unwrap().rank(), q * s - hom);
        done += 1;
    }
}

/// Random d×d matrix polynomial with entries of bounded degree.
fn random_mat_poly(
    field: FieldDescriptor,
    m: usize,
    d: usize,
    max_deg: usize,
    rng: &mut ChaCha8Rng,
) -> NcMatPoly {
    let entries: Vec<NcPoly> = (0..d * d)
        .map(|_| {
            let mut p = NcPoly::zero(field);
            for _ in 0..rng.gen_range(0..=3) {
                let deg = rng.gen_range(0..=max_deg);
                let word: Vec<u16> = (0..deg).map(|_| rng.gen_range(0..m) as u16).collect();
                p = p.add(&NcPoly::term(
                    field,
                    word,
                    field.from_i64(rng.gen_range(-2..=2)),
                ));
            }
            p
        })
        .collect();
    NcMatPoly::new(field, m, d, d, entries)
}

#[test]
fn criterion_5_linearization_rank_identity_on_200_instances_per_field() {
    for field in [rat(), f101()] {
        let mut rng = ChaCha8Rng::seed_from_u64(0xac5);
        for _ in 0..200 {
            let m = rng.gen_range(1..=3);
            let d = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=3);
            let f = random_mat_poly(field, m, d, 3, &mut rng);
            let lin = nclin::higman_linearize(&f).unwrap();
            let a = MatrixTuple::random(field, m, n, n, &mut rng, 2);
            assert_eq!(
                f.evaluate(&a).unwrap().rank(),
                lin.pencil.evaluate(&a).unwrap().rank() - lin.offset * n,
                "rank identity failed over {}",
                field.name()
            );
        }
    }
}

#[test]
fn criterion_6_decomposition_fixture_and_seed_independence() {
    // The two-block nilpotent splits into certified summands of sizes 2, 3.
    let field = rat();
    let fixture = MatrixTuple::new(field, 5, 5, vec![nilpotent_jordan(field, &[2, 3])]);
    let dec = decompose(&ModuleRep::free(fixture).unwrap(), 0).unwrap();
    assert!(dec.certified);
    let mut dims = dec.dims();
    dims.sort_unstable();
    assert_eq!(dims, vec![2, 3]);

    // Summand-dimension multisets over a big prime field are seed-free.
    let field = f101();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac6);
    for _ in 0..20 {
        let m = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=6);
        let module = ModuleRep::free(MatrixTuple::random(field, m, n, n, &mut rng, 2)).unwrap();
        let mut reference: Option<Vec<usize>> = None;
        for seed in 0..10u64 {
            let dec = decompose(&module, seed).unwrap();
            assert!(dec.certified);
            let mut dims = dec.dims();
            dims.sort_unstable();
            match &reference {
                None => reference = Some(dims),
                Some(r) => assert_eq!(&dims, r, "summand multiset changed with the seed"),
            }
        }
    }
}

/// Exhaustive search over diagonal determinant-one pairs with entries
/// `±2^e`, `e ∈ {−2,…,2}`: is some `(D₁, D₂)` with `D₁·A·D₂ = λ·A`?
fn diagonal_scaling_oracle(a: &MatrixTuple, lambda: &Scalar) -> bool {
    let field = a.field();
    let mut values = Vec::new();
    for e in -2i64..=2 {
        let pow = if e >= 0 {
            field.from_i64(1 << e)
        } else {
            field.from_i64(1 << (-e)).inv()
        };
        values.push(pow.clone());
        values.push(pow.neg());
    }
    let diagonals = |k: usize| -> Vec<Vec<Scalar>> {
        let mut out: Vec<Vec<Scalar>> = vec![vec![]];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|d| {
                    values
                        .iter()
                        .map(move |v| {
                            let mut d2 = d.clone();
                            d2.push(v.clone());
                            d2
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out.into_iter()
            .filter(|d| d.iter().fold(field.one(), |acc, v| acc.mul(v)).is_one())
            .collect()
    };
    let scaled = a.scale(lambda);
    for d1 in diagonals(a.p()) {
        for d2 in diagonals(a.q()) {
            let mut left = Matrix::zeros(field, a.p(), a.p());
            for (i, v) in d1.iter().enumerate() {
                left.set(i, i, v.clone());
            }
            let mut right = Matrix::zeros(field, a.q(), a.q());
            for (j, v) in d2.iter().enumerate() {
                right.set(j, j, v.clone());
            }
            if a.left_right(&left, &right) == scaled {
                return true;
            }
        }
    }
    false
}

#[test]
fn criterion_7_special_linear_suite() {
    let field = rat();

    // Scaling the identity tuple by 2 is never a determinant-one move.
    for n in [2usize, 3, 4] {
        let id = MatrixTuple::new(field, n, n, vec![Matrix::identity(field, n)]);
        let doubled = id.scale(&field.from_i64(2));
        assert!(
            sl_equivalent(&id, &doubled, 7).unwrap().is_not_equivalent(),
            "2·(I_{n}) must be separated"
        );
        // Negating is a root-of-unity scaling: allowed exactly when
        // (−1)^{lcm(n,n)} = 1, i.e. for even n.
        let negated = id.scale(&field.from_i64(-1));
        let verdict = sl_equivalent(&id, &negated, 8).unwrap();
        if n % 2 == 0 {
            assert!(verdict.is_equivalent(), "−(I_{n}) reachable for even n");
        } else {
            assert!(
                verdict.is_not_equivalent(),
                "−(I_{n}) unreachable for odd n"
            );
        }
    }

    // The unbalanced block fixture: explicit determinant-one scalings move
    // A to 2A.
    let a = MatrixTuple::new(
        field,
        2,
        3,
        vec![
            Matrix::from_i64_rows(field, &[&[1, 1, 0], &[0, 0, 1]]),
            Matrix::from_i64_rows(field, &[&[2, 0, 0], &[0, 0, 3]]),
        ],
    );
    let eight = field.from_i64(8);
    let quarter = field.from_i64(4).inv();
    let mut d1 = Matrix::zeros(field, 2, 2);
    d1.set(0, 0, eight.clone());
    d1.set(1, 1, eight.inv());
    let mut d2 = Matrix::zeros(field, 3, 3);
    d2.set(0, 0, quarter.clone());
    d2.set(1, 1, quarter);
    d2.set(2, 2, field.from_i64(16));
    assert!(d1.det().is_one(), "first scaling has determinant one");
    assert!(d2.det().is_one(), "second scaling has determinant one");
    let doubled = a.scale(&field.from_i64(2));
    assert_eq!(
        a.left_right(&d1, &d2),
        doubled,
        "the explicit pair scales by 2"
    );
    assert!(sl_equivalent(&a, &doubled, 9).unwrap().is_equivalent());

    // The decision agrees with the brute-force diagonal oracle on every
    // tested small instance.
    let square = MatrixTuple::new(
        field,
        2,
        2,
        vec![
            Matrix::identity(field, 2),
            Matrix::from_i64_rows(field, &[&[1, 0], &[0, 2]]),
        ],
    );
    let rect = MatrixTuple::new(
        field,
        1,
        2,
        vec![
            Matrix::from_i64_rows(field, &[&[1, 0]]),
            Matrix::from_i64_rows(field, &[&[0, 1]]),
        ],
    );
    let lambdas = [field.from_i64(1), field.from_i64(-1), field.from_i64(2)];
    for (name, tuple) in [("square", &square), ("rect", &rect)] {
        for lambda in &lambdas {
            let oracle = diagonal_scaling_oracle(tuple, lambda);
            let decided = sl_equivalent(tuple, &tuple.scale(lambda), 10)
                .unwrap()
                .is_equivalent();
            assert_eq!(
                decided, oracle,
                "decision and oracle disagree on the {name} fixture at λ = {lambda}"
            );
        }
    }
}

/// Decides similarity through a spanning subset of the coordinates,
/// extending the subset with a violated index whenever the reduced
/// certificate fails on an omitted coordinate.
fn similar_via_spanning_subset(a: &MatrixTuple, b: &MatrixTuple, seed: u64) -> Verdict {
    let mut indices = select_spanning_subset(a);
    loop {
        let verdict = similar(&a.subset(&indices), &b.subset(&indices), seed).unwrap();
        match &verdict {
            Verdict::Equivalent(Certificate::Similarity { p }) => {
                let bad = (0..a.len())
                    .find(|&j| !indices.contains(&j) && p.mul(a.matrix(j)) != b.matrix(j).mul(p));
                match bad {
                    None => return verdict,
                    Some(j) => {
                        indices.push(j);
                        indices.sort_unstable();
                    }
                }
            }
            _ => return verdict,
        }
    }
}

#[test]
fn criterion_8_spanning_subset_reduction_matches_full_verdicts() {
    let field = rat();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac8);
    for trial in 0..100u64 {
        // Six coordinates spanning only a 3-dimensional space: three
        // generators and three combinations.
        let build = |rng: &mut ChaCha8Rng| -> MatrixTuple {
            let g: Vec<Matrix> = (0..3)
                .map(|_| Matrix::random(field, 3, 3, rng, 2))
                .collect();
            let comb = |x: &Matrix, y: &Matrix, rng: &mut ChaCha8Rng| {
                let (c1, c2) = (
                    field.from_i64(rng.gen_range(-3..=3)),
                    field.from_i64(rng.gen_range(-3..=3)),
                );
                x.scale(&c1).add(&y.scale(&c2))
            };
            let m3 = comb(&g[0], &g[1], rng);
            let m4 = comb(&g[1], &g[2], rng);
            let m5 = comb(&g[0], &g[2], rng);
            MatrixTuple::new(
                field,
                3,
                3,
                vec![g[0].clone(), g[1].clone(), g[2].clone(), m3, m4, m5],
            )
        };
        let a = build(&mut rng);
        let b = if trial % 2 == 0 {
            let g = random_invertible(field, 3, &mut rng);
            a.conjugate(&g).unwrap()
        } else {
            build(&mut rng)
        };
        let subset = select_spanning_subset(&a);
        assert!(
            subset.len() <= 3,
            "the constructed tuples span at most 3 dimensions"
        );

        let full = similar(&a, &b, 8800 + trial).unwrap();
        let reduced = similar_via_spanning_subset(&a, &b, 9900 + trial);
        assert_eq!(
            full.is_equivalent(),
            reduced.is_equivalent(),
            "trial {trial}"
        );
        assert_eq!(
            full.is_not_equivalent(),
            reduced.is_not_equivalent(),
            "trial {trial}"
        );
    }
}

#[test]
fn criterion_9_structured_similarity_on_100_pairs() {
    let field = rat();
    let mut rng = ChaCha8Rng::seed_from_u64(0xac9);

    // 50 orthogonal conjugates, with the orthogonal matrix produced by the
    // Cayley transform of a random skew-symmetric matrix.
    for trial in 0..50u64 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=2);
        let p = loop {
            let r = Matrix::random(field, n, n, &mut rng, 2);
            let s = r.sub(&r.transpose());
            let id = Matrix::identity(field, n);
            if let Ok(inv) = id.add(&s).invert() {
                break id.sub(&s).mul(&inv);
            }
        };
        assert!(
            p.mul(&p.transpose()).is_identity(),
            "Cayley transform is orthogonal"
        );
        let a = MatrixTuple::random(field, m, n, n, &mut rng, 2);
        let b = a.conjugate(&p).unwrap();
        let verdict = structured_similar(&a, &b, &InvolutionKind::Transpose, 500 + trial).unwrap();
        assert!(
            verdict.is_equivalent(),
            "orthogonal conjugates certified on trial {trial}"
        );
    }

    // 50 GL-similar pairs separated by the trace of the word X·Xᵗ.
    let mut done = 0u64;
    while done < 50 {
        let n = rng.gen_range(2..=3);
        let a1 = Matrix::random(field, n, n, &mut rng, 2);
        let g = random_invertible(field, n, &mut rng);
        let b1 = g.mul(&a1).mul(&g.invert().unwrap());
        if a1.mul(&a1.transpose()).trace() == b1.mul(&b1.transpose()).trace() {
            continue;
        }
        let a = MatrixTuple::new(field, n, n, vec![a1]);
        let b = MatrixTuple::new(field, n, n, vec![b1]);
        let verdict = structured_similar(&a, &b, &InvolutionKind::Transpose, 700 + done).unwrap();
        assert!(
            verdict.is_not_equivalent(),
            "word-trace-separated pair must be rejected (trial {done})"
        );
        done += 1;
    }
}

//! Executable fixture demos: a degeneration counterexample showing that
//! pencil-rank domination does not imply orbit-closure membership, and the
//! classical pair separated by a pencil but not by any noncommutative
//! polynomial. Each demo runs a fixed list of exact checks.

use num_rational::BigRational;
use orbits_core::moddec::{decide_similarity, ChainOutcome};
use orbits_core::pencil::rank_equality_sample;
use orbits_core::{
    similar, FieldDescriptor, Matrix, MatrixTuple, NcPoly, Scalar, Verdict, Witness,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One executed demo check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

fn random_invertible(field: FieldDescriptor, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::random(field, n, n, rng, 3);
        if m.invert().is_ok() {
            return m;
        }
    }
}

/// The fixed quadratic `p = x₄₃y₂₁ − x₄₁y₂₃ − x₂₃y₄₁ + x₂₁y₄₃` in the
/// coordinates of a pair of 4×4 matrices (1-indexed positions).
fn quadratic_p(x: &Matrix, y: &Matrix) -> Scalar {
    x.at(3, 2)
        .mul(y.at(1, 0))
        .sub(&x.at(3, 0).mul(y.at(1, 2)))
        .sub(&x.at(1, 2).mul(y.at(3, 0)))
        .add(&x.at(1, 0).mul(y.at(3, 2)))
}

fn counterexample_tuples() -> (MatrixTuple, MatrixTuple) {
    let field = FieldDescriptor::Rationals;
    let b1 = Matrix::from_i64_rows(
        field,
        &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 1, 0]],
    );
    let b2 = Matrix::from_i64_rows(
        field,
        &[&[0, 0, 0, 0], &[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 1, 0, 0]],
    );
    let a = MatrixTuple::new(field, 4, 4, vec![b1.clone(), b1.clone()]);
    let b = MatrixTuple::new(field, 4, 4, vec![b1, b2]);
    (a, b)
}

/// The one-parameter conjugator realizing `A⊕0₁` as a limit of conjugates
/// of `B⊕0₁`.
fn degeneration_conjugator(t: &Scalar) -> Matrix {
    let field = t.field();
    let one = field.one();
    let t2 = t.mul(t);
    let mut p = Matrix::zeros(field, 5, 5);
    p.set(0, 0, one.clone());
    p.set(1, 1, one.clone());
    p.set(1, 2, one.clone());
    p.set(1, 4, one);
    p.set(2, 2, t2.clone());
    p.set(3, 3, t2);
    p.set(4, 1, t.clone());
    p.set(4, 2, t.neg());
    p
}

fn max_abs_entry(tuple: &MatrixTuple) -> BigRational {
    let mut best = BigRational::from_integer(0.into());
    for m in tuple.iter() {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.at(i, j).abs_rational();
                if v > best {
                    best = v;
                }
            }
        }
    }
    best
}

/// Degeneration counterexample: the pair `(A, B)` with every pencil rank of
/// `A` dominated by `B`'s, yet `A` outside the orbit closure of `B` — the
/// quadratic `p` separates the orbit closures while the padded tuples do
/// degenerate.
pub fn counterexample_checks() -> Vec<Check> {
    let field = FieldDescriptor::Rationals;
    let (a, b) = counterexample_tuples();
    let mut checks = Vec::new();

    // 1. p takes the value 2 on A.
    let value = quadratic_p(a.matrix(0), a.matrix(1));
    checks.push(Check::new(
        "quadratic invariant equals 2 on the left tuple",
        value == field.from_i64(2),
        format!("p(A) = {value}"),
    ));

    // 2. p vanishes identically on 200 random conjugates of B.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6e);
    let mut all_zero = true;
    for _ in 0..200 {
        let g = random_invertible(field, 4, &mut rng);
        let conj = b.conjugate(&g).unwrap();
        if !quadratic_p(conj.matrix(0), conj.matrix(1)).is_zero() {
            all_zero = false;
            break;
        }
    }
    checks.push(Check::new(
        "quadratic invariant vanishes on 200 random conjugates of the right tuple",
        all_zero,
        "exact evaluation over the rationals",
    ));

    // 3. The tuples are not similar, certified by a verified pencil witness.
    let verdict = similar(&a, &b, 0).unwrap();
    let witness_ok = match &verdict {
        Verdict::NotEquivalent(Witness::SimilarityPencil {
            pencil,
            rank_a,
            rank_b,
        }) => {
            rank_a != rank_b
                && pencil.evaluate(&a).unwrap().rank() == *rank_a
                && pencil.evaluate(&b).unwrap().rank() == *rank_b
        }
        _ => false,
    };
    checks.push(Check::new(
        "similarity decision returns a verified rank-disparity witness",
        witness_ok,
        match &verdict {
            Verdict::NotEquivalent(Witness::SimilarityPencil {
                pencil,
                rank_a,
                rank_b,
            }) => {
                format!("pencil size {}, ranks {rank_a} vs {rank_b}", pencil.size())
            }
            other => format!("unexpected verdict {other:?}"),
        },
    ));

    // 4. Across ≥ 300 sampled pencils up to size 6, the left tuple's rank
    //    never exceeds the right's.
    let report = rank_equality_sample(&a, &b, 6, 300, 0xabcd);
    let dominated = report.violations.iter().all(|v| v.rank_a < v.rank_b);
    checks.push(Check::new(
        "no sampled pencil rank on the left exceeds the right",
        dominated,
        format!(
            "{} samples, {} strict disparities, all dominated",
            report.trials,
            report.violations.len()
        ),
    ));

    // 5. The padded tuples degenerate: conjugating B⊕0₁ along t → 0 converges
    //    to A⊕0₁ linearly in t.
    let zero1 = MatrixTuple::zeros(field, 2, 1, 1);
    let a_pad = a.direct_sum(&zero1);
    let b_pad = b.direct_sum(&zero1);
    let deviation = |t: &Scalar| -> BigRational {
        let p = degeneration_conjugator(t);
        let conj = b_pad
            .conjugate(&p)
            .expect("the conjugator is invertible for t ≠ 0");
        let mut diff = Vec::new();
        for i in 0..conj.len() {
            diff.push(conj.matrix(i).sub(a_pad.matrix(i)));
        }
        max_abs_entry(&MatrixTuple::new(field, 5, 5, diff))
    };
    let tenth = field.from_i64(1).div(&field.from_i64(10));
    // Calibrate the constant at t = 1/10, then check the linear envelope at
    // the two smaller parameters.
    let c = deviation(&tenth) * BigRational::from_integer(10.into());
    let mut linear = true;
    let mut details = Vec::new();
    for exp in [2u32, 3] {
        let denom = 10i64.pow(exp);
        let t = field.from_i64(1).div(&field.from_i64(denom));
        let dev = deviation(&t);
        let envelope = &c / BigRational::from_integer(denom.into());
        details.push(format!("t = 1/{denom}: deviation {dev} ≤ {envelope}"));
        if dev > envelope {
            linear = false;
        }
    }
    checks.push(Check::new(
        "conjugates of the padded right tuple approach the padded left tuple linearly in t",
        linear,
        details.join("; "),
    ));

    checks
}

/// The classical pair separated by a size-2 pencil although no
/// noncommutative polynomial distinguishes their evaluation ranks.
pub fn hadwin_larson_checks() -> Vec<Check> {
    let field = FieldDescriptor::Rationals;
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
    let mut checks = Vec::new();

    // 1. The explicit size-2 pencil takes ranks 2 and 1.
    let pencil = orbits_core::LinearPencil::new(vec![
        Matrix::zeros(field, 2, 2),
        Matrix::basis(field, 2, 2, 0, 0),
        Matrix::basis(field, 2, 2, 1, 0),
    ]);
    let ra = pencil.evaluate(&a).unwrap().rank();
    let rb = pencil.evaluate(&b).unwrap().rank();
    checks.push(Check::new(
        "the explicit size-2 pencil evaluates to ranks 2 and 1",
        ra == 2 && rb == 1,
        format!("ranks {ra} and {rb}"),
    ));

    // 2. The witness search finds its own rank-disparity pencil.
    let found = match decide_similarity(&a, &b, 0).unwrap() {
        ChainOutcome::Witness {
            pencil,
            rank_a,
            rank_b,
        } => {
            let ok = rank_a != rank_b
                && pencil.evaluate(&a).unwrap().rank() == rank_a
                && pencil.evaluate(&b).unwrap().rank() == rank_b;
            (
                ok,
                format!("pencil size {}, ranks {rank_a} vs {rank_b}", pencil.size()),
            )
        }
        other => (false, format!("unexpected outcome {other:?}")),
    };
    checks.push(Check::new(
        "automatic witness construction succeeds",
        found.0,
        found.1,
    ));

    // 3. Random noncommutative polynomials cannot separate the pair.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f1f);
    let mut agree = true;
    for _ in 0..25 {
        let f = random_nc_poly(field, 2, 4, &mut rng);
        let rfa = f.evaluate(&a).unwrap().rank();
        let rfb = f.evaluate(&b).unwrap().rank();
        if rfa != rfb {
            agree = false;
            break;
        }
    }
    checks.push(Check::new(
        "25 random noncommutative polynomials of degree ≤ 4 see equal ranks",
        agree,
        "exact evaluation on both tuples",
    ));

    checks
}

/// Random noncommutative polynomial: up to six words of bounded degree with
/// small nonzero coefficients.
pub fn random_nc_poly(
    field: FieldDescriptor,
    num_letters: usize,
    max_deg: usize,
    rng: &mut ChaCha8Rng,
) -> NcPoly {
    let mut f = NcPoly::zero(field);
    for _ in 0..rng.gen_range(1..=6) {
        let deg = rng.gen_range(0..=max_deg);
        let word: Vec<u16> = (0..deg)
            .map(|_| rng.gen_range(0..num_letters) as u16)
            .collect();
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-2..=2);
        }
        f = f.add(&NcPoly::term(field, word, field.from_i64(c)));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_demo_passes_every_check() {
        let checks = counterexample_checks();
        assert_eq!(checks.len(), 5);
        for c in &checks {
            assert!(c.pass, "check '{}' failed: {}", c.name, c.detail);
        }
    }

    #[test]
    fn hadwin_larson_demo_passes_every_check() {
        let checks = hadwin_larson_checks();
        assert_eq!(checks.len(), 3);
        for c in &checks {
            assert!(c.pass, "check '{}' failed: {}", c.name, c.detail);
        }
    }

    #[test]
    fn the_degeneration_conjugator_is_invertible_for_nonzero_t() {
        let field = FieldDescriptor::Rationals;
        for denom in [2i64, 10, 1000] {
            let t = field.from_i64(1).div(&field.from_i64(denom));
            assert!(degeneration_conjugator(&t).invert().is_ok());
        }
    }
}

//! Ground fields and exact scalar arithmetic.
//!
//! Three fields are supported: the rationals ℚ, prime fields 𝔽_p, and the
//! Gaussian rationals ℚ[i]. A [`Scalar`] knows which field it belongs to;
//! mixing fields in arithmetic is a programming error and panics. Every value
//! is kept in canonical form (reduced fractions with positive denominator,
//! residues in `[0, p)`), so equality is structural.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Identifies one of the supported ground fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    /// The field ℚ of rational numbers.
    Rationals,
    /// The prime field 𝔽_p; the modulus is verified prime at construction.
    PrimeField(u64),
    /// The Gaussian rationals ℚ[i] with conjugation `(re, im) ↦ (re, −im)`.
    GaussianRationals,
}

impl FieldDescriptor {
    /// Builds a prime-field descriptor, checking primality by trial division.
    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldDescriptor::PrimeField(p))
    }

    /// The field characteristic (0 for ℚ and ℚ[i]).
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::PrimeField(p) => *p,
            _ => 0,
        }
    }

    /// True when conjugation is nontrivial (only ℚ[i] here).
    pub fn has_conjugation(&self) -> bool {
        matches!(self, FieldDescriptor::GaussianRationals)
    }

    /// The additive identity of this field.
    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    /// The multiplicative identity of this field.
    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    /// Embeds a machine integer.
    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldDescriptor::Rationals => Scalar::Rat(BigRational::from(BigInt::from(v))),
            FieldDescriptor::GaussianRationals => {
                Scalar::Gauss(BigRational::from(BigInt::from(v)), BigRational::zero())
            }
            FieldDescriptor::PrimeField(p) => {
                let r = v.rem_euclid(*p as i64);
                Scalar::Mod(r as u64, *p)
            }
        }
    }

    /// The imaginary unit; only defined over ℚ[i].
    pub fn imaginary_unit(&self) -> Result<Scalar> {
        match self {
            FieldDescriptor::GaussianRationals => {
                Ok(Scalar::Gauss(BigRational::zero(), BigRational::one()))
            }
            _ => Err(Error::InvalidScalar {
                text: "i".into(),
                reason: format!("field {self} has no imaginary unit"),
            }),
        }
    }

    /// Draws a scalar for randomized sampling: a uniform integer in
    /// `[-bound, bound]` over ℚ and ℚ[i] (real part only, keeping witnesses
    /// easy to read), and a uniform residue over 𝔽_p.
    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        match self {
            FieldDescriptor::Rationals | FieldDescriptor::GaussianRationals => {
                self.from_i64(rng.gen_range(-bound..=bound))
            }
            FieldDescriptor::PrimeField(p) => Scalar::Mod(rng.gen_range(0..*p), *p),
        }
    }

    /// Stable textual name used by file formats: `Q`, `Qi`, or `Fp:<p>`.
    pub fn name(&self) -> String {
        match self {
            FieldDescriptor::Rationals => "Q".into(),
            FieldDescriptor::GaussianRationals => "Qi".into(),
            FieldDescriptor::PrimeField(p) => format!("Fp:{p}"),
        }
    }

    /// Parses a field name produced by [`FieldDescriptor::name`].
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "Q" => Ok(FieldDescriptor::Rationals),
            "Qi" => Ok(FieldDescriptor::GaussianRationals),
            _ => {
                if let Some(ps) = name.strip_prefix("Fp:") {
                    let p: u64 = ps.parse().map_err(|_| Error::InvalidScalar {
                        text: name.into(),
                        reason: "malformed field name".into(),
                    })?;
                    FieldDescriptor::prime_field(p)
                } else {
                    Err(Error::InvalidScalar {
                        text: name.into(),
                        reason: "unknown field name (expected Q, Qi, or Fp:<p>)".into(),
                    })
                }
            }
        }
    }

    /// Parses a scalar literal: integers (`7`, `-3`), fractions (`22/7`),
    /// and over ℚ[i] Gaussian forms (`3/2+5i`, `-1i`, `i`). Prime-field
    /// literals are integers or fractions reduced modulo p.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        let err = |reason: &str| Error::InvalidScalar {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if t.is_empty() {
            return Err(err("empty literal"));
        }
        let parts = split_signed_parts(t).ok_or_else(|| err("malformed literal"))?;
        match self {
            FieldDescriptor::Rationals => match parts.as_slice() {
                [(sign, mag)] if !mag.imag => Ok(Scalar::Rat(mag.to_rational(*sign))),
                [(_, mag)] if mag.imag => Err(err("imaginary literal over the rationals")),
                _ => Err(err("expected a single rational literal")),
            },
            FieldDescriptor::PrimeField(p) => match parts.as_slice() {
                [(sign, mag)] if !mag.imag => {
                    let r = mag.to_rational(*sign);
                    rational_mod_p(&r, *p).ok_or_else(|| err("denominator vanishes modulo p"))
                }
                _ => Err(err("expected an integer or fraction literal")),
            },
            FieldDescriptor::GaussianRationals => match parts.as_slice() {
                [(sign, mag)] => {
                    let v = mag.to_rational(*sign);
                    if mag.imag {
                        Ok(Scalar::Gauss(BigRational::zero(), v))
                    } else {
                        Ok(Scalar::Gauss(v, BigRational::zero()))
                    }
                }
                [(s1, m1), (s2, m2)] => {
                    if m1.imag == m2.imag {
                        return Err(err("exactly one part may carry the imaginary unit"));
                    }
                    let (re, im) = if m2.imag {
                        (m1.to_rational(*s1), m2.to_rational(*s2))
                    } else {
                        (m2.to_rational(*s2), m1.to_rational(*s1))
                    };
                    Ok(Scalar::Gauss(re, im))
                }
                _ => Err(err("too many terms in literal")),
            },
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// An exact element of one of the supported fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    /// Element of ℚ as a reduced fraction.
    Rat(BigRational),
    /// Element of ℚ[i] as (real, imaginary) reduced fractions.
    Gauss(BigRational, BigRational),
    /// Element of 𝔽_p as `(residue, p)` with `residue < p`.
    Mod(u64, u64),
}

impl Scalar {
    /// The field this scalar belongs to.
    pub fn field(&self) -> FieldDescriptor {
        match self {
            Scalar::Rat(_) => FieldDescriptor::Rationals,
            Scalar::Gauss(..) => FieldDescriptor::GaussianRationals,
            Scalar::Mod(_, p) => FieldDescriptor::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Gauss(re, im) => re.is_zero() && im.is_zero(),
            Scalar::Mod(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Gauss(re, im) => re.is_one() && im.is_zero(),
            Scalar::Mod(v, _) => *v == 1,
        }
    }

    fn check_same_field(&self, other: &Scalar, op: &str) {
        if self.field() != other.field() {
            panic!(
                "scalar {op} across fields: {} vs {}",
                self.field(),
                other.field()
            );
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other, "addition");
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Gauss(ar, ai), Scalar::Gauss(br, bi)) => Scalar::Gauss(ar + br, ai + bi),
            (Scalar::Mod(a, p), Scalar::Mod(b, _)) => {
                Scalar::Mod(((*a as u128 + *b as u128) % *p as u128) as u64, *p)
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Gauss(re, im) => Scalar::Gauss(-re, -im),
            Scalar::Mod(a, p) => Scalar::Mod(if *a == 0 { 0 } else { p - a }, *p),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_same_field(other, "multiplication");
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Gauss(ar, ai), Scalar::Gauss(br, bi)) => {
                Scalar::Gauss(ar * br - ai * bi, ar * bi + ai * br)
            }
            (Scalar::Mod(a, p), Scalar::Mod(b, _)) => {
                Scalar::Mod(((*a as u128 * *b as u128) % *p as u128) as u64, *p)
            }
            _ => unreachable!(),
        }
    }

    /// Multiplicative inverse. Panics on zero; callers guard with `is_zero`.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Gauss(re, im) => {
                let norm = re * re + im * im;
                Scalar::Gauss(re / &norm, -(im / &norm))
            }
            Scalar::Mod(a, p) => Scalar::Mod(mod_inverse(*a, *p), *p),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    /// Complex conjugation; the identity over ℚ and 𝔽_p.
    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Gauss(re, im) => Scalar::Gauss(re.clone(), -im),
            other => other.clone(),
        }
    }

    /// Nonnegative integer power by binary exponentiation.
    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// A total order used only to make sorted outputs deterministic; it is
    /// not compatible with field arithmetic.
    pub fn sort_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            (Scalar::Gauss(ar, ai), Scalar::Gauss(br, bi)) => ar.cmp(br).then_with(|| ai.cmp(bi)),
            (Scalar::Mod(a, _), Scalar::Mod(b, _)) => a.cmp(b),
            _ => panic!("ordering scalars across fields"),
        }
    }

    /// The underlying rational of a ℚ-scalar; panics for other fields.
    pub fn as_rational(&self) -> &BigRational {
        match self {
            Scalar::Rat(r) => r,
            _ => panic!("not a rational scalar"),
        }
    }

    /// |x| for a ℚ-scalar, used by the degeneration-limit demo.
    pub fn abs_rational(&self) -> BigRational {
        self.as_rational().abs()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod(v, _) => write!(f, "{v}"),
            Scalar::Gauss(re, im) => {
                if im.is_zero() {
                    write!(f, "{re}")
                } else if re.is_zero() {
                    write!(f, "{im}i")
                } else if im.is_negative() {
                    write!(f, "{re}-{}i", -im)
                } else {
                    write!(f, "{re}+{im}i")
                }
            }
        }
    }
}

/// One magnitude inside a scalar literal: `digits[/digits][i]`.
struct Magnitude {
    num: BigInt,
    den: BigInt,
    imag: bool,
}

impl Magnitude {
    fn to_rational(&self, negative: bool) -> BigRational {
        let r = BigRational::new(self.num.clone(), self.den.clone());
        if negative {
            -r
        } else {
            r
        }
    }
}

/// Splits a literal into at most two signed magnitudes; returns `None` on any
/// malformed input (including a zero denominator).
fn split_signed_parts(t: &str) -> Option<Vec<(bool, Magnitude)>> {
    let bytes = t.as_bytes();
    let mut parts = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let negative = match bytes[pos] {
            b'+' => {
                pos += 1;
                false
            }
            b'-' => {
                pos += 1;
                true
            }
            _ => false,
        };
        let (mag, next) = scan_magnitude(t, pos)?;
        parts.push((negative, mag));
        pos = next;
        if parts.len() > 2 {
            return None;
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts)
    }
}

fn scan_magnitude(t: &str, start: usize) -> Option<(Magnitude, usize)> {
    let bytes = t.as_bytes();
    let mut pos = start;
    // Bare imaginary unit.
    if pos < bytes.len() && bytes[pos] == b'i' {
        return Some((
            Magnitude {
                num: BigInt::one(),
                den: BigInt::one(),
                imag: true,
            },
            pos + 1,
        ));
    }
    let digits_end = scan_digits(bytes, pos)?;
    let num: BigInt = t[pos..digits_end].parse().ok()?;
    pos = digits_end;
    let mut den = BigInt::one();
    if pos < bytes.len() && bytes[pos] == b'/' {
        let den_end = scan_digits(bytes, pos + 1)?;
        den = t[pos + 1..den_end].parse().ok()?;
        if den.is_zero() {
            return None;
        }
        pos = den_end;
    }
    let mut imag = false;
    if pos < bytes.len() && bytes[pos] == b'i' {
        imag = true;
        pos += 1;
    }
    Some((Magnitude { num, den, imag }, pos))
}

fn scan_digits(bytes: &[u8], start: usize) -> Option<usize> {
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        None
    } else {
        Some(end)
    }
}

/// Reduces a rational modulo p; `None` when the denominator vanishes mod p.
fn rational_mod_p(r: &BigRational, p: u64) -> Option<Scalar> {
    let pb = BigInt::from(p);
    let num = ((r.numer() % &pb) + &pb) % &pb;
    let den = ((r.denom() % &pb) + &pb) % &pb;
    let num: u64 = num.try_into().ok()?;
    let den: u64 = den.try_into().ok()?;
    if den == 0 {
        return None;
    }
    let inv = mod_inverse(den, p);
    Some(Scalar::Mod(
        ((num as u128 * inv as u128) % p as u128) as u64,
        p,
    ))
}

/// Inverse modulo a prime via the extended Euclidean algorithm.
fn mod_inverse(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero residue");
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "modulus not prime or element not a unit");
    t0.rem_euclid(p as i128) as u64
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map(|s| s <= n).unwrap_or(false) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

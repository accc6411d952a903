//! Words, normal forms and the affine invariant in BS(1,N), plus the Collins
//! generators of its automorphism group.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::exactnum::{ExactError, NInvertible, PrimeSignature, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BsError {
    #[error("BS(1,N) needs N >= 2, got {0}")]
    InvalidBase(u64),
    #[error("base mismatch: N={left} vs N={right}")]
    BaseMismatch { left: u64, right: u64 },
    #[error("cannot parse word `{0}`")]
    Parse(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("({x},{y},{z}) violates the normal form condition for N={big_n}")]
    InvalidNormalForm { big_n: u64, x: u64, y: BigInt, z: u64 },
}

impl From<ExactError> for BsError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::InvalidBase(n) => BsError::InvalidBase(n),
            other => BsError::Parse(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    A,
    B,
}

/// A word in a, b with adjacent equal generators merged and zero exponents
/// dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BsWord {
    big_n: u64,
    letters: Vec<(Gen, i64)>,
}

impl BsWord {
    pub fn new(big_n: u64, letters: impl IntoIterator<Item = (Gen, i64)>) -> Result<Self, BsError> {
        if big_n < 2 {
            return Err(BsError::InvalidBase(big_n));
        }
        let mut w = BsWord { big_n, letters: Vec::new() };
        for (g, e) in letters {
            w.push(g, e);
        }
        Ok(w)
    }

    pub fn identity(big_n: u64) -> Result<Self, BsError> {
        BsWord::new(big_n, [])
    }

    pub fn letter(big_n: u64, g: Gen, e: i64) -> Result<Self, BsError> {
        BsWord::new(big_n, [(g, e)])
    }

    fn push(&mut self, g: Gen, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    /// Parses strings such as `"b^-1 a b"`, `"aba"` or `"A*B^2"`.
    pub fn parse(big_n: u64, s: &str) -> Result<Self, BsError> {
        let mut w = BsWord::new(big_n, [])?;
        let chars: Vec<char> = s.chars().collect();
        let bad = || BsError::Parse(s.to_string());
        let mut i = 0;
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "e" {
            return Ok(w);
        }
        while i < chars.len() {
            let ch = chars[i];
            if ch.is_whitespace() || ch == '*' || ch == '·' || ch == '.' {
                i += 1;
                continue;
            }
            let g = match ch.to_ascii_lowercase() {
                'a' => Gen::A,
                'b' => Gen::B,
                _ => return Err(bad()),
            };
            i += 1;
            let mut e = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                e = tok.parse().map_err(|_| bad())?;
            }
            w.push(g, e);
        }
        Ok(w)
    }

    pub fn big_n(&self) -> u64 {
        self.big_n
    }

    pub fn letters(&self) -> &[(Gen, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &BsWord) -> Result<BsWord, BsError> {
        check_base(self.big_n, other.big_n)?;
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        Ok(w)
    }

    pub fn inverse(&self) -> BsWord {
        let mut w = BsWord { big_n: self.big_n, letters: Vec::new() };
        for &(g, e) in self.letters.iter().rev() {
            w.push(g, -e);
        }
        w
    }

    pub fn pow(&self, k: i64) -> BsWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = BsWord { big_n: self.big_n, letters: Vec::new() };
        for _ in 0..k.unsigned_abs() {
            for &(g, e) in &base.letters {
                w.push(g, e);
            }
        }
        w
    }
}

impl fmt::Display for BsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| {
                let name = match g {
                    Gen::A => "a",
                    Gen::B => "b",
                };
                if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

fn check_base(left: u64, right: u64) -> Result<(), BsError> {
    if left == right {
        Ok(())
    } else {
        Err(BsError::BaseMismatch { left, right })
    }
}

/// The affine map t ↦ N^h·t + c, a faithful image of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineInvariant {
    pub h: i64,
    pub c: NInvertible,
}

impl AffineInvariant {
    pub fn identity(sig: &PrimeSignature) -> Self {
        AffineInvariant { h: 0, c: NInvertible::zero(sig) }
    }

    pub fn big_n(&self) -> u64 {
        self.c.base()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineInvariant) -> AffineInvariant {
        AffineInvariant { h: self.h + other.h, c: other.c.scale_by_power(self.h).add(&self.c) }
    }

    pub fn inverse(&self) -> AffineInvariant {
        AffineInvariant { h: -self.h, c: self.c.scale_by_power(-self.h).neg() }
    }

    pub fn apply(&self, t: &Rational) -> Rational {
        t * self.c.signature().pow(self.h) + self.c.value()
    }
}

pub fn evaluate(w: &BsWord) -> AffineInvariant {
    let sig = PrimeSignature::new(w.big_n).expect("validated base");
    let mut acc = AffineInvariant::identity(&sig);
    for &(g, e) in &w.letters {
        let step = match g {
            Gen::A => AffineInvariant {
                h: 0,
                c: NInvertible::new(Rational::from(e), &sig).expect("integer"),
            },
            Gen::B => AffineInvariant { h: e, c: NInvertible::zero(&sig) },
        };
        acc = acc.compose(&step);
    }
    acc
}

/// b^{-x} a^y b^z.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BsNormalForm {
    big_n: u64,
    x: u64,
    y: BigInt,
    z: u64,
}

impl BsNormalForm {
    pub fn new(big_n: u64, x: u64, y: BigInt, z: u64) -> Result<Self, BsError> {
        if big_n < 2 {
            return Err(BsError::InvalidBase(big_n));
        }
        if x > 0 && z > 0 && y.is_multiple_of(&BigInt::from(big_n)) {
            return Err(BsError::InvalidNormalForm { big_n, x, y, z });
        }
        Ok(BsNormalForm { big_n, x, y, z })
    }

    pub fn big_n(&self) -> u64 {
        self.big_n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn from_invariant(inv: &AffineInvariant) -> BsNormalForm {
        let big_n = inv.big_n();
        let sig = inv.c.signature();
        let mut x = (-inv.h).max(0) as u64;
        let y = loop {
            let scaled = inv.c.value() * sig.pow(x as i64);
            if let Some(y) = scaled.to_integer() {
                break y;
            }
            x += 1;
        };
        let z = (x as i64 + inv.h) as u64;
        BsNormalForm { big_n, x, y, z }
    }

    pub fn invariant(&self) -> AffineInvariant {
        let sig = PrimeSignature::new(self.big_n).expect("validated base");
        let c = Rational::from(self.y.clone()) * sig.pow(-(self.x as i64));
        AffineInvariant {
            h: self.z as i64 - self.x as i64,
            c: NInvertible::new(c, &sig).expect("in Z[1/N]"),
        }
    }

    pub fn to_word(&self) -> BsWord {
        let y = i64::try_from(&self.y).ok();
        let mut w = BsWord { big_n: self.big_n, letters: Vec::new() };
        w.push(Gen::B, -(self.x as i64));
        match y {
            Some(y) => w.push(Gen::A, y),
            None => panic!("exponent {} does not fit a word letter", self.y),
        }
        w.push(Gen::B, self.z as i64);
        w
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.y.is_zero()
    }
}

impl fmt::Display for BsNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

pub fn normalize(w: &BsWord) -> BsNormalForm {
    BsNormalForm::from_invariant(&evaluate(w))
}

pub fn multiply(u: &BsNormalForm, v: &BsNormalForm) -> Result<BsNormalForm, BsError> {
    check_base(u.big_n, v.big_n)?;
    Ok(BsNormalForm::from_invariant(&u.invariant().compose(&v.invariant())))
}

pub fn invert(u: &BsNormalForm) -> BsNormalForm {
    BsNormalForm::from_invariant(&u.invariant().inverse())
}

/// Collins generators of Aut(BS(1,N)) together with the endomorphisms θ_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CollinsGen {
    /// Conjugation by a.
    A,
    /// Conjugation by b.
    B,
    /// a ↦ a, b ↦ ab.
    C,
    /// a ↦ a^{-1}, b ↦ b.
    D,
    /// a ↦ a^p for a prime p dividing N.
    Q(u64),
    /// a ↦ a^m, b ↦ b.
    Theta(u64),
}

impl std::str::FromStr for CollinsGen {
    type Err = BsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || BsError::InvalidGenerator(s.to_string());
        let lower = t.to_ascii_lowercase();
        let num = |prefix: &str| -> Result<u64, BsError> {
            lower[prefix.len()..].trim_start_matches('_').parse().map_err(|_| bad())
        };
        match lower.as_str() {
            "a" => Ok(CollinsGen::A),
            "b" => Ok(CollinsGen::B),
            "c" => Ok(CollinsGen::C),
            "d" => Ok(CollinsGen::D),
            _ if lower.starts_with("theta") => Ok(CollinsGen::Theta(num("theta")?)),
            _ if lower.starts_with('q') => Ok(CollinsGen::Q(num("q")?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CollinsGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollinsGen::A => f.write_str("A"),
            CollinsGen::B => f.write_str("B"),
            CollinsGen::C => f.write_str("C"),
            CollinsGen::D => f.write_str("D"),
            CollinsGen::Q(p) => write!(f, "Q{p}"),
            CollinsGen::Theta(m) => write!(f, "theta{m}"),
        }
    }
}

fn check_gen(gen: CollinsGen, big_n: u64) -> Result<(), BsError> {
    match gen {
        CollinsGen::Q(p) => {
            let sig = PrimeSignature::new(big_n)?;
            if sig.primes().any(|q| q == p) {
                Ok(())
            } else {
                Err(BsError::InvalidGenerator(format!("Q{p}: {p} is not a prime factor of {big_n}")))
            }
        }
        CollinsGen::Theta(0) => Err(BsError::InvalidGenerator("theta_m needs m >= 1".into())),
        _ => Ok(()),
    }
}

/// Image of a single generator.
pub fn collins_image(gen: CollinsGen, g: Gen, big_n: u64) -> Result<BsWord, BsError> {
    check_gen(gen, big_n)?;
    let w = |letters: &[(Gen, i64)]| BsWord::new(big_n, letters.iter().copied());
    match (gen, g) {
        (CollinsGen::A, Gen::A) => w(&[(Gen::A, 1)]),
        (CollinsGen::A, Gen::B) => w(&[(Gen::A, 1), (Gen::B, 1), (Gen::A, -1)]),
        (CollinsGen::B, Gen::A) => w(&[(Gen::B, 1), (Gen::A, 1), (Gen::B, -1)]),
        (CollinsGen::B, Gen::B) => w(&[(Gen::B, 1)]),
        (CollinsGen::C, Gen::A) => w(&[(Gen::A, 1)]),
        (CollinsGen::C, Gen::B) => w(&[(Gen::A, 1), (Gen::B, 1)]),
        (CollinsGen::D, Gen::A) => w(&[(Gen::A, -1)]),
        (CollinsGen::D, Gen::B) => w(&[(Gen::B, 1)]),
        (CollinsGen::Q(p), Gen::A) => w(&[(Gen::A, p as i64)]),
        (CollinsGen::Theta(m), Gen::A) => w(&[(Gen::A, m as i64)]),
        (CollinsGen::Q(_) | CollinsGen::Theta(_), Gen::B) => w(&[(Gen::B, 1)]),
    }
}

/// Letter-by-letter substitution.
pub fn apply_collins(gen: CollinsGen, w: &BsWord) -> Result<BsWord, BsError> {
    let img_a = collins_image(gen, Gen::A, w.big_n)?;
    let img_b = collins_image(gen, Gen::B, w.big_n)?;
    let mut out = BsWord::identity(w.big_n)?;
    for &(g, e) in &w.letters {
        let img = match g {
            Gen::A => &img_a,
            Gen::B => &img_b,
        };
        out = out.concat(&img.pow(e))?;
    }
    Ok(out)
}

/// Whether the generator defines an automorphism of BS(1,N).
pub fn is_automorphism(gen: CollinsGen, big_n: u64) -> bool {
    match gen {
        CollinsGen::Theta(m) => {
            if m == 0 {
                return false;
            }
            let Ok(sig_n) = PrimeSignature::new(big_n) else { return false };
            if m == 1 {
                return true;
            }
            PrimeSignature::new(m)
                .map(|sig_m| sig_m.primes().all(|p| sig_n.primes().any(|q| q == p)))
                .unwrap_or(false)
        }
        other => check_gen(other, big_n).is_ok(),
    }
}

/// True iff the translation part of `w` lies in m·Z[1/N].
pub fn in_image_theta_m(w: &BsWord, m: u64) -> bool {
    assert!(m >= 1, "m must be positive");
    let inv = evaluate(w);
    let c = inv.c.value() / Rational::from(m as i64);
    crate::exactnum::is_n_invertible(&c, inv.c.signature())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: u64, s: &str) -> BsWord {
        BsWord::parse(n, s).unwrap()
    }

    fn nf(n: u64, x: u64, y: i64, z: u64) -> BsNormalForm {
        BsNormalForm::new(n, x, y.into(), z).unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w(2, "B^-1 A B").to_string(), "b^-1 a b");
        assert_eq!(w(2, "aba").to_string(), "a b a");
        assert_eq!(w(2, "a a^-1").to_string(), "1");
        assert_eq!(w(2, "a^2*a^3").to_string(), "a^5");
        assert!(BsWord::parse(2, "ac").is_err());
        assert!(BsWord::parse(2, "a^x").is_err());
    }

    #[test]
    fn evaluate_examples() {
        let e = evaluate(&w(2, "b^-1 a b"));
        assert_eq!((e.h, e.c.value().to_string()), (0, "1/2".to_string()));
        let e = evaluate(&w(2, ""));
        assert_eq!((e.h, e.c.value().to_string()), (0, "0".to_string()));
        let e = evaluate(&w(2, "a b a b^-1"));
        assert_eq!((e.h, e.c.value().to_string()), (0, "3".to_string()));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&w(2, "b^-1 a b")), nf(2, 1, 1, 1));
        assert_eq!(normalize(&w(2, "b^-1 a b b^-1 a b")), nf(2, 0, 1, 0));
        assert_eq!(normalize(&w(3, "a^5")), nf(3, 0, 5, 0));
        assert_eq!(normalize(&w(2, "b^-3")), nf(2, 3, 0, 0));
        assert_eq!(normalize(&w(2, "b^2")), nf(2, 0, 0, 2));
    }

    #[test]
    fn multiply_invert_examples() {
        assert_eq!(multiply(&nf(2, 0, 1, 0), &nf(2, 0, 1, 0)).unwrap(), nf(2, 0, 2, 0));
        assert_eq!(invert(&nf(2, 1, 1, 1)), nf(2, 1, -1, 1));
        assert_eq!(multiply(&nf(2, 0, 1, 0), &nf(2, 1, 1, 1)).unwrap(), nf(2, 1, 3, 1));
        assert!(matches!(
            multiply(&nf(2, 0, 1, 0), &nf(3, 0, 1, 0)),
            Err(BsError::BaseMismatch { .. })
        ));
        assert!(BsNormalForm::new(2, 1, 2.into(), 1).is_err());
    }

    #[test]
    fn collins_examples() {
        assert_eq!(apply_collins(CollinsGen::D, &w(2, "aba")).unwrap(), w(2, "a^-1 b a^-1"));
        assert_eq!(apply_collins(CollinsGen::C, &w(2, "b")).unwrap(), w(2, "a b"));
        assert_eq!(apply_collins(CollinsGen::Theta(3), &w(2, "a")).unwrap(), w(2, "a^3"));
        assert!(!is_automorphism(CollinsGen::Theta(3), 2));
        assert!(is_automorphism(CollinsGen::Theta(4), 2));
        assert!(is_automorphism(CollinsGen::Theta(12), 6));
        assert!(is_automorphism(CollinsGen::Q(3), 6));
        assert!(apply_collins(CollinsGen::Q(5), &w(6, "a")).is_err());
        assert!(apply_collins(CollinsGen::Theta(0), &w(6, "a")).is_err());
        assert_eq!("theta_3".parse::<CollinsGen>().unwrap(), CollinsGen::Theta(3));
        assert_eq!("Q2".parse::<CollinsGen>().unwrap(), CollinsGen::Q(2));
    }

    #[test]
    fn theta_image_examples() {
        assert!(in_image_theta_m(&w(2, "a"), 2));
        assert!(!in_image_theta_m(&w(2, "a"), 3));
        assert!(in_image_theta_m(&w(2, "b"), 5));
    }

    #[test]
    fn defining_relation_small_n() {
        for n in 2..=12u64 {
            let lhs = normalize(&w(n, "b a b^-1"));
            let rhs = normalize(&BsWord::letter(n, Gen::A, n as i64).unwrap());
            assert_eq!(lhs, rhs, "N={n}");
        }
    }
}

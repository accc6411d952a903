//! Exact scalars: big rationals, the ring Z[1/n], truncated n-adic integers
//! and per-prime valuations for a composite base n.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational `{0}`")]
    Parse(String),
    #[error("base must be an integer >= 2, got {0}")]
    InvalidBase(u64),
    #[error("{j} does not divide {n}^{k}")]
    NotDivisible { j: BigInt, n: u64, k: u32 },
    #[error("{x} is not invertible modulo powers of {n}")]
    NotInvertible { x: BigInt, n: u64 },
    #[error("{value} is not an element of Z[1/{n}]")]
    NotNInvertible { value: Rational, n: u64 },
    #[error("{value} is not an element of Z_{n}")]
    NotInZn { value: Rational, n: u64 },
    #[error("residue {residue} is out of range for precision {precision} in base {n}")]
    ResidueOutOfRange { residue: BigInt, n: u64, precision: u32 },
    #[error("precision must be positive")]
    ZeroPrecision,
}

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ExactError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Integer power. Panics on `0^e` with `e < 0`.
    pub fn pow(&self, e: i64) -> Self {
        assert!(!(self.is_zero() && e < 0), "zero raised to a negative power");
        let mag = u32::try_from(e.unsigned_abs()).expect("exponent too large");
        let base = if e < 0 { self.0.recip() } else { self.0.clone() };
        Rational(num_traits::pow::Pow::pow(&base, mag))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// The integer value, if this is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ExactError::Parse(s.to_string());
        match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::integer(t.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\", \"p\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::integer(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::integer(v))
            }
        }
        d.deserialize_any(V)
    }
}

macro_rules! rational_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational((&self.0).$m(rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Factorization n = ∏ p^{e_p}, primes increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeSignature {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimeSignature {
    pub fn new(n: u64) -> Result<Self, ExactError> {
        if n < 2 {
            return Err(ExactError::InvalidBase(n));
        }
        let mut factors = Vec::new();
        let mut rest = n;
        let mut p = 2u64;
        while p.saturating_mul(p) <= rest {
            if rest % p == 0 {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += 1;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Ok(PrimeSignature { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// n^k as an integer.
    pub fn pow_int(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.n), k as usize)
    }

    /// n^h as a rational (h may be negative).
    pub fn pow(&self, h: i64) -> Rational {
        Rational::integer(self.n).pow(h)
    }

    /// Splits a nonzero integer into (part supported on primes of n, coprime part).
    pub fn split(&self, x: &BigInt) -> (BigInt, BigInt) {
        let mut rest = x.abs();
        let mut part = BigInt::one();
        for &(p, _) in &self.factors {
            let bp = BigInt::from(p);
            while !rest.is_zero() && rest.is_multiple_of(&bp) {
                rest /= &bp;
                part *= &bp;
            }
        }
        (part, rest)
    }
}

impl fmt::Display for PrimeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{} = {}", self.n, parts.join("·"))
    }
}

/// Valuation of a rational; zero has the distinguished value `Infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

fn int_p_valuation(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let bp = BigInt::from(p);
    let mut v = 0;
    let mut r = x.clone();
    loop {
        let (q, rem) = r.div_rem(&bp);
        if !rem.is_zero() {
            return v;
        }
        r = q;
        v += 1;
    }
}

/// v_p of a rational.
pub fn p_valuation(x: &Rational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(int_p_valuation(x.numer(), p) - int_p_valuation(x.denom(), p))
}

/// (v_p(x)) for the primes of n, in signature order; `None` for zero.
pub fn valuation_vector(x: &Rational, sig: &PrimeSignature) -> Option<Vec<i64>> {
    if x.is_zero() {
        return None;
    }
    Some(
        sig.primes()
            .map(|p| p_valuation(x, p).finite().expect("nonzero"))
            .collect(),
    )
}

/// max{h : x ∈ n^h·Z_n} = min_p floor(v_p(x)/e_p).
pub fn n_valuation(x: &Rational, sig: &PrimeSignature) -> Valuation {
    match valuation_vector(x, sig) {
        None => Valuation::Infinity,
        Some(v) => Valuation::Finite(
            v.iter()
                .zip(sig.factors())
                .map(|(&vp, &(_, e))| Integer::div_floor(&vp, &(e as i64)))
                .min()
                .expect("n has a prime factor"),
        ),
    }
}

pub fn is_unit_in_zn(x: &Rational, sig: &PrimeSignature) -> bool {
    valuation_vector(x, sig).is_some_and(|v| v.iter().all(|&vp| vp == 0))
}

/// Ball membership x ∈ n^h·Z_n, tested prime by prime.
pub fn in_power_ideal(x: &Rational, h: i64, sig: &PrimeSignature) -> bool {
    match valuation_vector(x, sig) {
        None => true,
        Some(v) => v
            .iter()
            .zip(sig.factors())
            .all(|(&vp, &(_, e))| vp >= h * e as i64),
    }
}

/// True iff every prime of the denominator divides n.
pub fn is_n_invertible(x: &Rational, sig: &PrimeSignature) -> bool {
    sig.split(x.denom()).1.is_one()
}

/// Inverse of `a` modulo `m` (m ≥ 1), if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let a = a.mod_floor(m);
    let eg = a.extended_gcd(m);
    eg.gcd.is_one().then(|| eg.x.mod_floor(m))
}

/// Canonical representative of x + n^h·Z_n: the unique element of
/// Z[1/n] ∩ [0, n^h) congruent to x.
pub fn reduce_mod_power(x: &Rational, h: i64, sig: &PrimeSignature) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    // Pick E so that n^E clears the n-part of the denominator and h + E >= 0.
    let (den_n, den_unit) = sig.split(x.denom());
    let mut e_needed = 0i64;
    for &(p, e) in sig.factors() {
        let v = int_p_valuation(&den_n, p);
        e_needed = e_needed.max(Integer::div_ceil(&v, &(e as i64)));
    }
    let big_e = e_needed.max(-h);
    let n_e = sig.pow_int(big_e as u32);
    let numer = x.numer() * (&n_e / &den_n);
    let modulus = sig.pow_int((h + big_e) as u32);
    let inv = mod_inverse(&den_unit, &modulus).expect("coprime to n");
    let r = (numer * inv).mod_floor(&modulus);
    Rational::new(r, n_e).expect("positive power")
}

/// Element of Z[1/n] together with its base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NInvertible {
    value: Rational,
    sig: PrimeSignature,
}

impl NInvertible {
    pub fn new(value: Rational, sig: &PrimeSignature) -> Result<Self, ExactError> {
        if !is_n_invertible(&value, sig) {
            return Err(ExactError::NotNInvertible { value, n: sig.n() });
        }
        Ok(NInvertible { value, sig: sig.clone() })
    }

    pub fn zero(sig: &PrimeSignature) -> Self {
        NInvertible { value: Rational::zero(), sig: sig.clone() }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn base(&self) -> u64 {
        self.sig.n()
    }

    pub fn signature(&self) -> &PrimeSignature {
        &self.sig
    }

    pub fn n_valuation(&self) -> Valuation {
        n_valuation(&self.value, &self.sig)
    }

    pub fn is_unit(&self) -> bool {
        is_unit_in_zn(&self.value, &self.sig)
    }

    fn same_base(&self, other: &Self) {
        assert_eq!(self.sig.n(), other.sig.n(), "Z[1/n] elements over different bases");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_base(other);
        NInvertible { value: &self.value + &other.value, sig: self.sig.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_base(other);
        NInvertible { value: &self.value - &other.value, sig: self.sig.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_base(other);
        NInvertible { value: &self.value * &other.value, sig: self.sig.clone() }
    }

    pub fn neg(&self) -> Self {
        NInvertible { value: -&self.value, sig: self.sig.clone() }
    }

    /// Multiplication by n^h stays inside Z[1/n].
    pub fn scale_by_power(&self, h: i64) -> Self {
        NInvertible { value: &self.value * self.sig.pow(h), sig: self.sig.clone() }
    }
}

impl fmt::Display for NInvertible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

/// An n-adic integer known modulo n^D.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedNAdic {
    n: u64,
    precision: u32,
    residue: BigInt,
}

impl TruncatedNAdic {
    pub fn new(residue: BigInt, precision: u32, sig: &PrimeSignature) -> Result<Self, ExactError> {
        if precision == 0 {
            return Err(ExactError::ZeroPrecision);
        }
        if residue.is_negative() || residue >= sig.pow_int(precision) {
            return Err(ExactError::ResidueOutOfRange { residue, n: sig.n(), precision });
        }
        Ok(TruncatedNAdic { n: sig.n(), precision, residue })
    }

    /// Reduction of an element of Z_n ∩ Q modulo n^D.
    pub fn from_rational(x: &Rational, precision: u32, sig: &PrimeSignature) -> Result<Self, ExactError> {
        if !in_power_ideal(x, 0, sig) {
            return Err(ExactError::NotInZn { value: x.clone(), n: sig.n() });
        }
        let r = reduce_mod_power(x, precision as i64, sig);
        TruncatedNAdic::new(r.to_integer().expect("element of Z_n"), precision, sig)
    }

    pub fn base(&self) -> u64 {
        self.n
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// Residue modulo n^i for i ≤ D.
    pub fn residue_at(&self, i: u32) -> BigInt {
        assert!(i <= self.precision, "level beyond precision");
        self.residue.mod_floor(&num_traits::pow(BigInt::from(self.n), i as usize))
    }
}

impl fmt::Display for TruncatedNAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.n, self.precision)
    }
}

/// The solution η = n^k / j of j·η = n^k in Z_n.
pub fn solve_j_eta(j: &BigInt, k: u32, sig: &PrimeSignature) -> Result<BigInt, ExactError> {
    let nk = sig.pow_int(k);
    if !j.is_positive() || !nk.is_multiple_of(j) {
        return Err(ExactError::NotDivisible { j: j.clone(), n: sig.n(), k });
    }
    Ok(nk / j)
}

/// r with x·r ≡ 1 mod n^D.
pub fn truncated_inverse(x: &BigInt, precision: u32, sig: &PrimeSignature) -> Result<TruncatedNAdic, ExactError> {
    if precision == 0 {
        return Err(ExactError::ZeroPrecision);
    }
    let modulus = sig.pow_int(precision);
    let inv = mod_inverse(x, &modulus).ok_or(ExactError::NotInvertible { x: x.clone(), n: sig.n() })?;
    TruncatedNAdic::new(inv, precision, sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn sig(n: u64) -> PrimeSignature {
        PrimeSignature::new(n).unwrap()
    }

    #[test]
    fn rational_normalizes_and_prints() {
        assert_eq!(q("6/-4").to_string(), "-3/2");
        assert_eq!(q("0/7").to_string(), "0");
        assert_eq!(q("8/4").to_string(), "2");
        assert_eq!(q(" -5 ").to_string(), "-5");
        assert!(Rational::new(1, 0).is_err());
        assert!("1/x".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_serde_round_trip() {
        let x = q("-7/3");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "\"-7/3\"");
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), x);
        assert_eq!(serde_json::from_str::<Rational>("12").unwrap(), Rational::from(12));
    }

    #[test]
    fn powers() {
        assert_eq!(q("2/3").pow(-2), q("9/4"));
        assert_eq!(q("5").pow(0), Rational::one());
    }

    #[test]
    fn signatures() {
        assert_eq!(sig(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(sig(7).factors(), &[(7, 1)]);
        assert_eq!(sig(4).factors(), &[(2, 2)]);
        assert!(PrimeSignature::new(1).is_err());
    }

    #[test]
    fn n_valuation_examples() {
        assert_eq!(n_valuation(&q("12"), &sig(2)), Valuation::Finite(2));
        assert_eq!(n_valuation(&q("8"), &sig(4)), Valuation::Finite(1));
        assert_eq!(n_valuation(&q("9/2"), &sig(6)), Valuation::Finite(-1));
        assert_eq!(n_valuation(&q("0"), &sig(6)), Valuation::Infinity);
    }

    #[test]
    fn unit_examples() {
        assert!(is_unit_in_zn(&q("3"), &sig(2)));
        assert!(!is_unit_in_zn(&q("1/2"), &sig(2)));
        assert!(!is_unit_in_zn(&q("10"), &sig(6)));
        // n_valuation 0 does not imply a unit when n is not a prime power.
        assert_eq!(n_valuation(&q("10"), &sig(6)), Valuation::Finite(0));
    }

    #[test]
    fn solve_j_eta_examples() {
        assert_eq!(solve_j_eta(&1.into(), 0, &sig(2)).unwrap(), BigInt::from(1));
        assert_eq!(solve_j_eta(&4.into(), 3, &sig(2)).unwrap(), BigInt::from(2));
        assert!(matches!(
            solve_j_eta(&3.into(), 1, &sig(2)),
            Err(ExactError::NotDivisible { .. })
        ));
    }

    #[test]
    fn truncated_inverse_examples() {
        assert_eq!(truncated_inverse(&3.into(), 3, &sig(2)).unwrap().residue(), &BigInt::from(3));
        assert_eq!(truncated_inverse(&1.into(), 5, &sig(3)).unwrap().residue(), &BigInt::from(1));
        assert!(matches!(
            truncated_inverse(&2.into(), 2, &sig(2)),
            Err(ExactError::NotInvertible { .. })
        ));
    }

    #[test]
    fn reduction_is_canonical() {
        // -1 in Z_2 reduces to 3 mod 4.
        assert_eq!(reduce_mod_power(&q("-1"), 2, &sig(2)), q("3"));
        // 1/3 mod 8: 3·3 = 9 ≡ 1.
        assert_eq!(reduce_mod_power(&q("1/3"), 3, &sig(2)), q("3"));
        // Negative heights give representatives with n-power denominators.
        assert_eq!(reduce_mod_power(&q("3/4"), -1, &sig(2)), q("1/4"));
        assert_eq!(reduce_mod_power(&q("5/2"), 0, &sig(2)), q("1/2"));
        assert_eq!(reduce_mod_power(&q("7/36"), 1, &sig(6)), q("7/36"));
    }

    #[test]
    fn reduction_matches_brute_force() {
        // Oracle: scan candidates k/n^E in [0, n^h) and test membership of the difference.
        for n in [2u64, 3, 4, 6] {
            let s = sig(n);
            for num in -20i64..=20 {
                for den in [1i64, 2, 3, 5, 6, 9] {
                    let x = Rational::new(num, den).unwrap();
                    for h in -1i64..=2 {
                        let r = reduce_mod_power(&x, h, &s);
                        assert!(!r.is_negative() && r < s.pow(h));
                        assert!(is_n_invertible(&r, &s));
                        assert!(in_power_ideal(&(&x - &r), h, &s), "{x} {r} n={n} h={h}");
                    }
                }
            }
        }
    }

    #[test]
    fn truncated_from_rational() {
        let t = TruncatedNAdic::from_rational(&q("-1"), 3, &sig(2)).unwrap();
        assert_eq!(t.residue(), &BigInt::from(7));
        assert_eq!(t.residue_at(1), BigInt::from(1));
        assert!(TruncatedNAdic::from_rational(&q("1/2"), 3, &sig(2)).is_err());
        assert!(TruncatedNAdic::new(8.into(), 3, &sig(2)).is_err());
    }

    #[test]
    fn n_invertible_membership() {
        assert!(NInvertible::new(q("5/12"), &sig(6)).is_ok());
        assert!(NInvertible::new(q("1/5"), &sig(6)).is_err());
        let a = NInvertible::new(q("1/2"), &sig(2)).unwrap();
        assert_eq!(a.scale_by_power(2).value(), &q("2"));
    }
}

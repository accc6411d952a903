//! The tree T_{1,n} in n-adic ball coordinates.
//!
//! A vertex of height h is a ball c + n^h·Z_n inside Q_n; larger h means a
//! smaller ball, which sits higher in the tree. The root v_0 is Z_n itself.
//! Arithmetic automorphisms are affine maps x ↦ u·x + β; general
//! automorphisms only exist here as depth-truncated level permutations of
//! up(v_0) or as finite partial maps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::exactnum::{
    in_power_ideal, is_n_invertible, is_unit_in_zn, mod_inverse, p_valuation, reduce_mod_power,
    ExactError, PrimeSignature, Rational, TruncatedNAdic,
};

/// Cap on the number of labels at a single level of a level permutation.
pub const MAX_LEVEL_SIZE: u64 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("base mismatch: n={left} vs n={right}")]
    BaseMismatch { left: u64, right: u64 },
    #[error("map has height change {h}, expected an elliptic map")]
    NotElliptic { h: i64 },
    #[error("map is elliptic, expected a hyperbolic map")]
    NotHyperbolic,
    #[error("invalid ball map: {0}")]
    InvalidMap(String),
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),
    #[error("map does not fix {0}")]
    DoesNotFix(String),
    #[error("level {level} does not commute with the full cycle")]
    NotCommuting { level: u32 },
    #[error("axes differ: x* = {left} vs x* = {right}")]
    AxisMismatch { left: Rational, right: Rational },
    #[error("height changes must agree and be positive: {left} vs {right}")]
    HeightMismatch { left: i64, right: i64 },
    #[error("invalid level permutation: {0}")]
    InvalidAutomorphism(String),
    #[error("invalid partial map: {0}")]
    InvalidPartialMap(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn check_base(left: u64, right: u64) -> Result<(), TreeError> {
    if left == right {
        Ok(())
    } else {
        Err(TreeError::BaseMismatch { left, right })
    }
}

fn level_size(n: u64, i: u32) -> Result<u64, TreeError> {
    match n.checked_pow(i) {
        Some(s) if s <= MAX_LEVEL_SIZE => Ok(s),
        _ => Err(TreeError::TooLarge(format!("{n}^{i} labels at one level"))),
    }
}

/// The ball c + n^h·Z_n with c the canonical center in Z[1/n] ∩ [0, n^h).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    n: u64,
    h: i64,
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    h: i64,
    c: Rational,
}

impl TreeVertex {
    /// The height-h ball containing the point x.
    pub fn new(sig: &PrimeSignature, h: i64, x: &Rational) -> TreeVertex {
        TreeVertex { n: sig.n(), h, c: reduce_mod_power(x, h, sig) }
    }

    /// Accepts only an already-canonical center.
    pub fn from_canonical(sig: &PrimeSignature, h: i64, c: Rational) -> Result<TreeVertex, TreeError> {
        if c.is_negative() || c >= sig.pow(h) || !is_n_invertible(&c, sig) {
            return Err(TreeError::InvalidVertex(format!(
                "center {c} is not a canonical representative at height {h} for n={}",
                sig.n()
            )));
        }
        Ok(TreeVertex { n: sig.n(), h, c })
    }

    pub fn root(n: u64) -> TreeVertex {
        TreeVertex { n, h: 0, c: Rational::zero() }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    fn n_pow(&self, h: i64) -> Rational {
        Rational::from(self.n as i64).pow(h)
    }

    /// The unique ancestor at height `h ≤ self.h`.
    pub fn ancestor_at(&self, h: i64) -> Option<TreeVertex> {
        if h > self.h {
            return None;
        }
        let m = self.n_pow(h);
        let k = (&self.c / &m).floor();
        Some(TreeVertex { n: self.n, h, c: &self.c - m * Rational::from(k) })
    }

    pub fn parent(&self) -> TreeVertex {
        self.ancestor_at(self.h - 1).expect("lower height")
    }

    /// The n children c + n^h·t for t = 0..n, in label order.
    pub fn children(&self) -> Vec<TreeVertex> {
        let step = self.n_pow(self.h);
        (0..self.n)
            .map(|t| TreeVertex {
                n: self.n,
                h: self.h + 1,
                c: &self.c + &step * Rational::from(t as i64),
            })
            .collect()
    }

    /// Whether `other` lies in up(self), i.e. is a sub-ball.
    pub fn contains(&self, other: &TreeVertex) -> bool {
        self.n == other.n && other.ancestor_at(self.h).as_ref() == Some(self)
    }

    /// Level and label of `self` inside up(base).
    pub fn label_in(&self, base: &TreeVertex) -> Option<(u32, BigInt)> {
        if !base.contains(self) {
            return None;
        }
        let level = (self.h - base.h) as u32;
        let diff = (&self.c - &base.c) / base.n_pow(base.h);
        let modulus = num_traits::pow(BigInt::from(self.n), level as usize);
        Some((level, diff.to_integer().expect("integer offset").mod_floor(&modulus)))
    }

    /// Vertex of up(base) at relative `level` carrying `label` ∈ Z/n^level.
    pub fn from_label(base: &TreeVertex, level: u32, label: &BigInt) -> TreeVertex {
        let modulus = num_traits::pow(BigInt::from(base.n), level as usize);
        let r = label.mod_floor(&modulus);
        TreeVertex {
            n: base.n,
            h: base.h + level as i64,
            c: &base.c + base.n_pow(base.h) * Rational::from(r),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(VertexJson { h: self.h, c: self.c.clone() }).expect("serializable")
    }

    /// Parses `{"h": int, "c": "p/q"}`; the center is canonicalized.
    pub fn from_json(sig: &PrimeSignature, v: &serde_json::Value) -> Result<TreeVertex, TreeError> {
        let j: VertexJson = serde_json::from_value(v.clone())
            .map_err(|e| TreeError::InvalidVertex(e.to_string()))?;
        Ok(TreeVertex::new(sig, j.h, &j.c))
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.c)
    }
}

impl Serialize for TreeVertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VertexJson { h: self.h, c: self.c.clone() }.serialize(s)
    }
}

/// x ↦ u·x + β on Q_n with u/n^h a unit of Z_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BallAffineMap {
    sig: PrimeSignature,
    h: i64,
    u: Rational,
    beta: Rational,
}

impl BallAffineMap {
    /// Derives the height change from u; fails if u is not n^h times a unit.
    pub fn new(sig: &PrimeSignature, u: Rational, beta: Rational) -> Result<Self, TreeError> {
        if u.is_zero() {
            return Err(TreeError::InvalidMap("u must be nonzero".into()));
        }
        let mut h = None;
        for &(p, e) in sig.factors() {
            let vp = p_valuation(&u, p).finite().expect("nonzero");
            if vp % e as i64 != 0 || h.is_some_and(|h| h != vp / e as i64) {
                return Err(TreeError::InvalidMap(format!(
                    "u = {u} is not a power of {} times a unit of Z_{}",
                    sig.n(),
                    sig.n()
                )));
            }
            h = Some(vp / e as i64);
        }
        Ok(BallAffineMap { sig: sig.clone(), h: h.expect("prime factor"), u, beta })
    }

    pub fn identity(sig: &PrimeSignature) -> Self {
        BallAffineMap { sig: sig.clone(), h: 0, u: Rational::one(), beta: Rational::zero() }
    }

    pub fn translation(sig: &PrimeSignature, beta: Rational) -> Self {
        BallAffineMap { sig: sig.clone(), h: 0, u: Rational::one(), beta }
    }

    /// The standard a: x ↦ x + 1.
    pub fn standard_a(sig: &PrimeSignature) -> Self {
        Self::translation(sig, Rational::one())
    }

    /// x ↦ n^l·x; l = 1 is the standard b.
    pub fn standard_b_power(sig: &PrimeSignature, l: i64) -> Self {
        BallAffineMap { sig: sig.clone(), h: l, u: sig.pow(l), beta: Rational::zero() }
    }

    pub fn signature(&self) -> &PrimeSignature {
        &self.sig
    }

    pub fn n(&self) -> u64 {
        self.sig.n()
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.beta.is_zero()
    }

    pub fn apply_point(&self, x: &Rational) -> Rational {
        &self.u * x + &self.beta
    }

    /// `self ∘ other`. Panics on differing bases.
    pub fn compose(&self, other: &BallAffineMap) -> BallAffineMap {
        assert_eq!(self.n(), other.n(), "ball maps over different bases");
        BallAffineMap {
            sig: self.sig.clone(),
            h: self.h + other.h,
            u: &self.u * &other.u,
            beta: &self.u * &other.beta + &self.beta,
        }
    }

    pub fn try_compose(&self, other: &BallAffineMap) -> Result<BallAffineMap, TreeError> {
        check_base(self.n(), other.n())?;
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> BallAffineMap {
        let inv = self.u.recip().expect("nonzero");
        BallAffineMap { sig: self.sig.clone(), h: -self.h, beta: -(&self.beta * &inv), u: inv }
    }

    pub fn power(&self, k: i64) -> BallAffineMap {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = BallAffineMap::identity(&self.sig);
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        acc
    }

    /// g ∘ self ∘ g^{-1}.
    pub fn conjugate_by(&self, g: &BallAffineMap) -> BallAffineMap {
        g.compose(self).compose(&g.inverse())
    }

    pub fn act(&self, v: &TreeVertex) -> TreeVertex {
        assert_eq!(self.n(), v.n, "vertex and map over different bases");
        TreeVertex::new(&self.sig, v.h + self.h, &self.apply_point(&v.c))
    }

    pub fn fixes(&self, v: &TreeVertex) -> Result<bool, TreeError> {
        check_base(self.n(), v.n)?;
        if self.h != 0 {
            return Err(TreeError::NotElliptic { h: self.h });
        }
        let moved = (&self.u - Rational::one()) * &v.c + &self.beta;
        Ok(in_power_ideal(&moved, v.h, &self.sig))
    }

    /// The fixed point x* = β/(1−u) ∈ Q of a hyperbolic map; its axis is the
    /// set of balls containing x*.
    pub fn axis_point(&self) -> Result<Rational, TreeError> {
        if self.h == 0 {
            return Err(TreeError::NotHyperbolic);
        }
        Ok(&self.beta / (Rational::one() - &self.u))
    }

    pub fn axis_vertex(&self, j: i64) -> Result<TreeVertex, TreeError> {
        Ok(TreeVertex::new(&self.sig, j, &self.axis_point()?))
    }

    /// Orbits of an elliptic map fixing `w` on up_i(w), as sorted label sets.
    pub fn orbits_on_up(&self, w: &TreeVertex, i: u32) -> Result<Vec<Vec<u64>>, TreeError> {
        if !self.fixes(w)? {
            return Err(TreeError::DoesNotFix(w.to_string()));
        }
        let size = level_size(self.n(), i)?;
        let mut seen = vec![false; size as usize];
        let mut orbits = Vec::new();
        for start in 0..size {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut r = start;
            loop {
                seen[r as usize] = true;
                orbit.push(r);
                let v = TreeVertex::from_label(w, i, &BigInt::from(r));
                let (_, next) = self.act(&v).label_in(w).expect("w is fixed");
                r = next.to_u64().expect("small label");
                if r == start {
                    break;
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    pub fn is_transitive_on_up(&self, w: &TreeVertex, i: u32) -> Result<bool, TreeError> {
        Ok(self.orbits_on_up(w, i)?.len() == 1)
    }
}

impl fmt::Display for BallAffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}*x + {}", self.u, self.beta)
    }
}

/// Exact test that x ↦ x + β acts transitively on every level of up(w).
pub fn transitive_forever(beta: &Rational, w: &TreeVertex, sig: &PrimeSignature) -> bool {
    is_unit_in_zn(&(beta / sig.pow(w.h)), sig)
}

/// Residue of a Z_n element modulo m = n^i (denominator must be a unit).
fn residue_u64(x: &Rational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let inv = mod_inverse(x.denom(), &m).expect("unit denominator");
    (x.numer() * inv).mod_floor(&m).to_u64().expect("below modulus")
}

/// Compatible permutations σ_1..σ_D of Z/n^i describing an automorphism of
/// the depth-D truncation of up(v_0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelPermAutomorphism {
    n: u64,
    levels: Vec<Vec<u32>>,
}

impl LevelPermAutomorphism {
    pub fn new(n: u64, levels: Vec<Vec<u32>>) -> Result<Self, TreeError> {
        if n < 2 {
            return Err(TreeError::Exact(ExactError::InvalidBase(n)));
        }
        for (idx, sigma) in levels.iter().enumerate() {
            let i = idx as u32 + 1;
            let size = level_size(n, i)?;
            if sigma.len() as u64 != size {
                return Err(TreeError::InvalidAutomorphism(format!(
                    "level {i} has {} entries, expected {size}",
                    sigma.len()
                )));
            }
            let mut seen = vec![false; sigma.len()];
            for &y in sigma {
                if y as u64 >= size || std::mem::replace(&mut seen[y as usize], true) {
                    return Err(TreeError::InvalidAutomorphism(format!("level {i} is not a bijection")));
                }
            }
        }
        let f = LevelPermAutomorphism { n, levels };
        if let Some(i) = f.first_incompatible_level() {
            return Err(TreeError::InvalidAutomorphism(format!(
                "level {i} is incompatible with level {}",
                i - 1
            )));
        }
        Ok(f)
    }

    pub fn identity(n: u64, depth: u32) -> Result<Self, TreeError> {
        Self::from_fn(n, depth, |_, y| y)
    }

    /// Builds levels from a label function; compatibility is checked.
    pub fn from_fn(n: u64, depth: u32, f: impl Fn(u32, u64) -> u64) -> Result<Self, TreeError> {
        let mut levels = Vec::with_capacity(depth as usize);
        for i in 1..=depth {
            let size = level_size(n, i)?;
            levels.push((0..size).map(|y| f(i, y) as u32).collect());
        }
        LevelPermAutomorphism::new(n, levels)
    }

    /// Levelwise action of an elliptic ball map fixing v_0.
    pub fn from_ball_map(map: &BallAffineMap, depth: u32) -> Result<Self, TreeError> {
        let root = TreeVertex::root(map.n());
        if !map.fixes(&root)? {
            return Err(TreeError::DoesNotFix(root.to_string()));
        }
        let n = map.n();
        let mut levels = Vec::with_capacity(depth as usize);
        for i in 1..=depth {
            let size = level_size(n, i)?;
            let u = residue_u64(map.u(), size) as u128;
            let beta = residue_u64(map.beta(), size) as u128;
            levels.push(
                (0..size)
                    .map(|y| ((u * y as u128 + beta) % size as u128) as u32)
                    .collect(),
            );
        }
        LevelPermAutomorphism::new(n, levels)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }

    /// σ_i(y); level 0 is the single root label.
    pub fn apply(&self, i: u32, y: u64) -> u64 {
        if i == 0 {
            0
        } else {
            self.levels[i as usize - 1][y as usize] as u64
        }
    }

    fn first_incompatible_level(&self) -> Option<u32> {
        for i in 2..=self.depth() {
            let m = self.n.pow(i - 1);
            let lower = &self.levels[i as usize - 2];
            let upper = &self.levels[i as usize - 1];
            if upper
                .iter()
                .enumerate()
                .any(|(y, &s)| s as u64 % m != lower[y % m as usize] as u64)
            {
                return Some(i);
            }
        }
        None
    }

    pub fn is_compatible(&self) -> bool {
        self.first_incompatible_level().is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.levels
            .iter()
            .all(|s| s.iter().enumerate().all(|(y, &t)| y as u32 == t))
    }

    /// `self ∘ other`. Panics if bases or depths differ.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "level permutations over different bases");
        assert_eq!(self.depth(), other.depth(), "level permutations of different depth");
        LevelPermAutomorphism {
            n: self.n,
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(s, o)| o.iter().map(|&y| s[y as usize]).collect())
                .collect(),
        }
    }

    pub fn try_compose(&self, other: &Self) -> Result<Self, TreeError> {
        check_base(self.n, other.n)?;
        if self.depth() != other.depth() {
            return Err(TreeError::InvalidAutomorphism(format!(
                "depths differ: {} vs {}",
                self.depth(),
                other.depth()
            )));
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Self {
        LevelPermAutomorphism {
            n: self.n,
            levels: self
                .levels
                .iter()
                .map(|s| {
                    let mut inv = vec![0u32; s.len()];
                    for (y, &t) in s.iter().enumerate() {
                        inv[t as usize] = y as u32;
                    }
                    inv
                })
                .collect(),
        }
    }

    pub fn power(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = LevelPermAutomorphism {
            n: self.n,
            levels: self.levels.iter().map(|s| (0..s.len() as u32).collect()).collect(),
        };
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        acc
    }

    /// First level where the two automorphisms fail to commute.
    pub fn first_noncommuting_level(&self, other: &Self) -> Option<u32> {
        let ab = self.compose(other);
        let ba = other.compose(self);
        (0..self.levels.len())
            .find(|&i| ab.levels[i] != ba.levels[i])
            .map(|i| i as u32 + 1)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.first_noncommuting_level(other).is_none()
    }

    pub fn truncate(&self, depth: u32) -> Self {
        assert!(depth <= self.depth(), "cannot extend a truncation");
        LevelPermAutomorphism { n: self.n, levels: self.levels[..depth as usize].to_vec() }
    }

    /// Cycle notation of one level, e.g. `(0 1 2 3)`; `()` for the identity.
    pub fn cycle_notation(&self, i: u32) -> String {
        let s = &self.levels[i as usize - 1];
        let mut seen = vec![false; s.len()];
        let mut out = String::new();
        for start in 0..s.len() {
            if seen[start] || s[start] as usize == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut y = start;
            while !seen[y] {
                seen[y] = true;
                cyc.push(y.to_string());
                y = s[y] as usize;
            }
            out.push_str(&format!("({})", cyc.join(" ")));
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }
}

impl Serialize for LevelPermAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.levels.serialize(s)
    }
}

/// A^η: adds η mod n^i at level i.
pub fn build_aeta(eta: &TruncatedNAdic) -> Result<LevelPermAutomorphism, TreeError> {
    let n = eta.base();
    let mut levels = Vec::with_capacity(eta.precision() as usize);
    for i in 1..=eta.precision() {
        let size = level_size(n, i)?;
        let shift = eta.residue_at(i).to_u64().expect("below n^i");
        levels.push((0..size).map(|y| ((y + shift) % size) as u32).collect());
    }
    LevelPermAutomorphism::new(n, levels)
}

/// Inverse of [`build_aeta`] on the levelwise centralizer of the full cycle.
pub fn extract_eta(f: &LevelPermAutomorphism) -> Result<TruncatedNAdic, TreeError> {
    let sig = PrimeSignature::new(f.n())?;
    let one = TruncatedNAdic::new(BigInt::one(), f.depth().max(1), &sig)?;
    if f.depth() == 0 {
        return Err(TreeError::InvalidAutomorphism("depth 0 carries no residue".into()));
    }
    let a = build_aeta(&one)?;
    if let Some(level) = f.first_noncommuting_level(&a) {
        return Err(TreeError::NotCommuting { level });
    }
    let top = f.depth();
    Ok(TruncatedNAdic::new(BigInt::from(f.apply(top, 0)), top, &sig)?)
}

/// Checks b·a·b^{-1} = a^n levelwise on b(up(v_0)), where b sends the label
/// y at level i−1 to n·y at level i. Returns the first failing level.
pub fn defining_relation_failure(a: &LevelPermAutomorphism) -> Option<u32> {
    relation_failure_power(a, 1)
}

/// The same check for b^l·a·b^{-l} = a^{n^l}, with b^l shifting l levels.
pub fn relation_failure_power(a: &LevelPermAutomorphism, l: u32) -> Option<u32> {
    let n = a.n();
    let nl = n.checked_pow(l)?;
    let anl = a.power(nl as i64);
    for i in l.max(1)..=a.depth() {
        let prev = n.pow(i - l);
        let size = prev * nl;
        for y in 0..prev {
            let lhs = (nl * a.apply(i - l, y)) % size;
            if anl.apply(i, nl * y) != lhs {
                return Some(i);
            }
        }
    }
    None
}

/// Finite injective map between vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTreeMap {
    n: u64,
    pairs: BTreeMap<TreeVertex, TreeVertex>,
}

#[derive(Serialize)]
struct PairJson<'a> {
    from: &'a TreeVertex,
    to: &'a TreeVertex,
}

impl PartialTreeMap {
    pub fn new(n: u64, pairs: BTreeMap<TreeVertex, TreeVertex>) -> Result<Self, TreeError> {
        let mut shift = None;
        let mut images = BTreeSet::new();
        for (v, w) in &pairs {
            if v.n != n || w.n != n {
                return Err(TreeError::BaseMismatch { left: n, right: if v.n != n { v.n } else { w.n } });
            }
            let d = w.h - v.h;
            if shift.is_some_and(|s| s != d) {
                return Err(TreeError::InvalidPartialMap("height change is not constant".into()));
            }
            shift = Some(d);
            if !images.insert(w) {
                return Err(TreeError::InvalidPartialMap(format!("{w} has two preimages")));
            }
            if let Some(pw) = pairs.get(&v.parent()) {
                if *pw != w.parent() {
                    return Err(TreeError::InvalidPartialMap(format!("parent of {v} is not preserved")));
                }
            }
        }
        Ok(PartialTreeMap { n, pairs })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, v: &TreeVertex) -> Option<&TreeVertex> {
        self.pairs.get(v)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeVertex, &TreeVertex)> {
        self.pairs.iter()
    }

    pub fn height_change(&self) -> Option<i64> {
        self.pairs.iter().next().map(|(v, w)| w.h - v.h)
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(v, w)| v == w)
    }

    /// Number of domain points where `self ∘ f = g ∘ self` fails among those
    /// where both sides are defined, and the number of points checked.
    pub fn intertwining_defects(&self, f: &BallAffineMap, g: &BallAffineMap) -> (usize, usize) {
        let mut checked = 0;
        let mut bad = 0;
        for (v, gv) in &self.pairs {
            if let Some(lhs) = self.pairs.get(&f.act(v)) {
                checked += 1;
                if *lhs != g.act(gv) {
                    bad += 1;
                }
            }
        }
        (bad, checked)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list: Vec<PairJson<'_>> = self.pairs.iter().map(|(from, to)| PairJson { from, to }).collect();
        serde_json::to_value(list).expect("serializable")
    }
}

/// Extends g0 on the block S_0 hanging off the axis segment w_0..w_{l−1}
/// (w_0 the axis vertex at height 0) to blocks S_k = b^k(S_0) for
/// k ∈ [−M, M) by g = b^k·g0·b'^{−k}.
pub fn build_conjugator(
    b: &BallAffineMap,
    b_prime: &BallAffineMap,
    g0: &LevelPermAutomorphism,
    window: u32,
    depth: u32,
) -> Result<PartialTreeMap, TreeError> {
    check_base(b.n(), b_prime.n())?;
    check_base(b.n(), g0.n())?;
    let l = b.h();
    if l != b_prime.h() || l < 1 {
        return Err(TreeError::HeightMismatch { left: l, right: b_prime.h() });
    }
    let x_b = b.axis_point()?;
    let x_bp = b_prime.axis_point()?;
    if x_b != x_bp {
        return Err(TreeError::AxisMismatch { left: x_b, right: x_bp });
    }
    if g0.depth() < depth {
        return Err(TreeError::InvalidAutomorphism(format!(
            "g0 has depth {} but depth {depth} was requested",
            g0.depth()
        )));
    }
    let sig = b.signature();
    let w0 = b.axis_vertex(0)?;
    let axis_label = |i: u32| -> u64 {
        let (_, lab) = b.axis_vertex(i as i64).expect("hyperbolic").label_in(&w0).expect("on axis");
        lab.to_u64().expect("small label")
    };
    for i in 1..=depth.min(l as u32) {
        let a = axis_label(i);
        if g0.apply(i, a) != a {
            return Err(TreeError::InvalidAutomorphism(format!("g0 moves the axis vertex w_{i}")));
        }
    }
    let top = if (l as u32) <= depth { Some((l as u32, axis_label(l as u32))) } else { None };
    let mut block = Vec::new();
    for i in 0..=depth {
        let size = level_size(sig.n(), i)?;
        let m = top.map(|(tl, _)| sig.n().pow(tl));
        for r in 0..size {
            if let (Some((tl, lab)), Some(m)) = (top, m) {
                if i >= tl && r % m == lab {
                    continue;
                }
            }
            let v = TreeVertex::from_label(&w0, i, &BigInt::from(r));
            let gv = TreeVertex::from_label(&w0, i, &BigInt::from(g0.apply(i, r)));
            block.push((v, gv));
        }
    }
    let mut pairs = BTreeMap::new();
    for k in -(window as i64)..(window as i64) {
        let bk = b.power(k);
        let bpk = b_prime.power(k);
        for (v, gv) in &block {
            pairs.insert(bpk.act(v), bk.act(gv));
        }
    }
    PartialTreeMap::new(sig.n(), pairs)
}

/// DOT picture of up(root) to the given depth, vertices colored by their
/// orbit under an elliptic map fixing root.
pub fn dot_subtree(root: &TreeVertex, depth: u32, map: Option<&BallAffineMap>) -> Result<String, TreeError> {
    const PALETTE: [&str; 8] = [
        "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    ];
    let mut out = String::from("digraph up {\n  node [style=filled];\n");
    let name = |v: &TreeVertex| format!("\"{}:{}\"", v.h, v.c);
    for i in 0..=depth {
        let colors: Vec<usize> = match map {
            Some(f) => {
                let orbits = f.orbits_on_up(root, i)?;
                let mut idx = vec![0; level_size(root.n, i)? as usize];
                for (o, orbit) in orbits.iter().enumerate() {
                    for &r in orbit {
                        idx[r as usize] = o;
                    }
                }
                idx
            }
            None => vec![0; level_size(root.n, i)? as usize],
        };
        for (r, &col) in colors.iter().enumerate() {
            let v = TreeVertex::from_label(root, i, &BigInt::from(r));
            out.push_str(&format!(
                "  {} [label=\"{}\", fillcolor=\"{}\"];\n",
                name(&v),
                v,
                PALETTE[col % PALETTE.len()]
            ));
            if i > 0 {
                out.push_str(&format!("  {} -> {};\n", name(&v.parent()), name(&v)));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

//! Lattice embeddings BS(1,n^l) → G_n: validation, the (s, m) classifier,
//! conjugacy and automorphism equivalence, covolumes, straightening
//! conjugators and the presentations of the full lattices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::exactnum::{
    solve_j_eta, valuation_vector, ExactError, PrimeSignature, Rational,
};
use crate::isometry::{apply_autgn, ArithmeticIsometry, AutGn, IsometryError, IsometryJson};
use crate::tree::{
    build_conjugator, transitive_forever, BallAffineMap, LevelPermAutomorphism, PartialTreeMap,
    TreeError, TreeVertex,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid embedding: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Validation(Vec<Violation>),
    #[error("not straightenable: {0}")]
    NotStraightenable(String),
    #[error("base mismatch: n={left} vs n={right}")]
    BaseMismatch { left: u64, right: u64 },
    #[error("invalid presentation case: {0}")]
    CaseInvalid(String),
    #[error("internal disagreement: {0}")]
    Internal(String),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A broken embedding invariant, in the order `validate` checks them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ReflectionA,
    ReflectionB,
    HeightA { h: i64 },
    HeightB { h: i64, l: u32 },
    TreeNotTranslation { u: Rational },
    ZeroTranslationDistance,
    TrivialTreeAction,
    RelationFails,
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ReflectionA => "reflection_a",
            Violation::ReflectionB => "reflection_b",
            Violation::HeightA { .. } => "height_a",
            Violation::HeightB { .. } => "height_b",
            Violation::TreeNotTranslation { .. } => "discreteness",
            Violation::ZeroTranslationDistance => "td_zero",
            Violation::TrivialTreeAction => "beta_zero",
            Violation::RelationFails => "relation",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = self.code();
        match self {
            Violation::ReflectionA => write!(f, "{code}: image of a must have eps = +1"),
            Violation::ReflectionB => write!(f, "{code}: image of b must have eps = +1"),
            Violation::HeightA { h } => write!(f, "{code}: image of a must be elliptic, has h = {h}"),
            Violation::HeightB { h, l } => write!(f, "{code}: image of b must have h = {l}, has h = {h}"),
            Violation::TreeNotTranslation { u } => write!(
                f,
                "{code}: tree part of the image of a must be x -> x + beta, has u = {u}; conjugates of its powers would accumulate"
            ),
            Violation::ZeroTranslationDistance => write!(f, "{code}: td(image of a) must be nonzero"),
            Violation::TrivialTreeAction => write!(
                f,
                "{code}: image of a acts trivially on the tree (beta = 0), so it fixes the axis of b"
            ),
            Violation::RelationFails => write!(f, "{code}: b a b^-1 = a^(n^l) fails"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSpec {
    sig: PrimeSignature,
    l: u32,
    img_a: ArithmeticIsometry,
    img_b: ArithmeticIsometry,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    n: u64,
    l: u32,
    a: IsometryJson,
    b: IsometryJson,
}

impl EmbeddingSpec {
    pub fn new(l: u32, img_a: ArithmeticIsometry, img_b: ArithmeticIsometry) -> Result<Self, LatticeError> {
        if img_a.n() != img_b.n() {
            return Err(LatticeError::BaseMismatch { left: img_a.n(), right: img_b.n() });
        }
        if l == 0 {
            return Err(LatticeError::InvalidParams("l must be at least 1".into()));
        }
        Ok(EmbeddingSpec { sig: img_a.signature().clone(), l, img_a, img_b })
    }

    pub fn n(&self) -> u64 {
        self.sig.n()
    }

    pub fn signature(&self) -> &PrimeSignature {
        &self.sig
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn img_a(&self) -> &ArithmeticIsometry {
        &self.img_a
    }

    pub fn img_b(&self) -> &ArithmeticIsometry {
        &self.img_b
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EmbeddingJson {
            n: self.n(),
            l: self.l,
            a: self.img_a.to_wire(),
            b: self.img_b.to_wire(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LatticeError> {
        let j: EmbeddingJson = serde_json::from_value(v.clone())
            .map_err(|e| LatticeError::InvalidParams(format!("embedding JSON: {e}")))?;
        let sig = PrimeSignature::new(j.n)?;
        EmbeddingSpec::new(
            j.l,
            ArithmeticIsometry::from_wire(&sig, &j.a)?,
            ArithmeticIsometry::from_wire(&sig, &j.b)?,
        )
    }
}

/// φ_{s,m}: a ↦ (a_s)^m, b ↦ b^l.
pub fn make_phi(n: u64, l: u32, s: &Rational, m: u64) -> Result<EmbeddingSpec, LatticeError> {
    if s.is_zero() {
        return Err(LatticeError::InvalidParams("s must be nonzero".into()));
    }
    if m == 0 {
        return Err(LatticeError::InvalidParams("m must be positive".into()));
    }
    if l == 0 {
        return Err(LatticeError::InvalidParams("l must be at least 1".into()));
    }
    let sig = PrimeSignature::new(n)?;
    let m_q = Rational::from(m as i64);
    let img_a = ArithmeticIsometry::new(1, s * &m_q, BallAffineMap::translation(&sig, m_q))?;
    let img_b = ArithmeticIsometry::standard_b_power(&sig, l as i64);
    EmbeddingSpec::new(l, img_a, img_b)
}

/// Every embedding invariant that fails, in a fixed order (empty = valid).
pub fn validate(spec: &EmbeddingSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let a = &spec.img_a;
    let b = &spec.img_b;
    if a.eps() != 1 {
        out.push(Violation::ReflectionA);
    }
    if b.eps() != 1 {
        out.push(Violation::ReflectionB);
    }
    if a.h() != 0 {
        out.push(Violation::HeightA { h: a.h() });
    }
    if b.h() != spec.l as i64 {
        out.push(Violation::HeightB { h: b.h(), l: spec.l });
    }
    if !a.tree().u().is_one() {
        out.push(Violation::TreeNotTranslation { u: a.tree().u().clone() });
    }
    if a.alpha().is_zero() {
        out.push(Violation::ZeroTranslationDistance);
    }
    if a.tree().beta().is_zero() {
        out.push(Violation::TrivialTreeAction);
    }
    let nl = spec.sig.pow_int(spec.l);
    let lhs = b.compose(a).compose(&b.inverse());
    let rhs = match nl.to_i64() {
        Some(e) => a.power(e),
        None => {
            out.push(Violation::RelationFails);
            return out;
        }
    };
    if lhs != rhs {
        out.push(Violation::RelationFails);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyResult {
    pub s: Rational,
    pub m: BigInt,
    pub h0: i64,
    pub j: BigInt,
    pub k: u32,
    pub w0: TreeVertex,
}

fn int_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl ClassifyResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "s": self.s.to_string(),
            "m": int_json(&self.m),
            "h0": self.h0,
            "j": int_json(&self.j),
            "k": self.k,
            "w0": self.w0.to_json(),
        })
    }
}

/// Condition (∗): every prime factor of m divides n, and n ∤ m.
pub fn satisfies_star(m: &BigInt, sig: &PrimeSignature) -> bool {
    if !m.is_positive() {
        return false;
    }
    let (n_part, rest) = sig.split(m);
    n_part == *m && rest.is_one() && !m.is_multiple_of(&BigInt::from(sig.n()))
}

fn pow_u(p: u64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn closed_form(spec: &EmbeddingSpec) -> Result<ClassifyResult, LatticeError> {
    let sig = &spec.sig;
    let beta = spec.img_a.tree().beta();
    let vals = valuation_vector(beta, sig).ok_or(LatticeError::Validation(vec![Violation::TrivialTreeAction]))?;
    let es: Vec<i64> = sig.factors().iter().map(|&(_, e)| e as i64).collect();
    let h0 = vals
        .iter()
        .zip(&es)
        .map(|(&v, &e)| Integer::div_floor(&v, &e))
        .min()
        .expect("prime factor");
    let l = spec.l as i64;
    let d: Vec<i64> = vals.iter().zip(&es).map(|(&v, &e)| v - h0 * e).collect();
    let k = d
        .iter()
        .zip(&es)
        .map(|(&dp, &e)| Integer::div_ceil(&dp, &(l * e)))
        .max()
        .expect("prime factor");
    let mut j = BigInt::one();
    let mut m = BigInt::one();
    for ((&(p, _), &dp), &e) in sig.factors().iter().zip(&d).zip(&es) {
        j *= pow_u(p, l * k * e - dp);
        m *= pow_u(p, dp);
    }
    let td = spec.img_a.td()?;
    let s = td / (Rational::from(m.clone()) * sig.pow(h0));
    let w0 = spec.img_b.tree().axis_vertex(h0)?;
    Ok(ClassifyResult { s, m, h0, j, k: k as u32, w0 })
}

/// Divisors of n^e in increasing order.
fn divisors_of_power(sig: &PrimeSignature, e: u32) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for &(p, ep) in sig.factors() {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=(ep * e) {
                next.push(d * &pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Walks the construction literally: climb the axis of imgB to the highest
/// vertex fixed by imgA, then for k = 0, 1, ... find the least power of
/// imgA fixing b^k·w_0 and stop once that power acts transitively forever.
fn literal_search(spec: &EmbeddingSpec) -> Result<ClassifyResult, LatticeError> {
    const MAX_STEPS: i64 = 4096;
    let sig = &spec.sig;
    let c = spec.img_a.tree();
    let b = spec.img_b.tree();
    let fixes_at = |h: i64| -> Result<bool, LatticeError> { Ok(c.fixes(&b.axis_vertex(h)?)?) };
    let mut h0 = 0i64;
    if fixes_at(h0)? {
        while fixes_at(h0 + 1)? {
            h0 += 1;
            if h0 > MAX_STEPS {
                return Err(LatticeError::Internal("image of a fixes the whole axis".into()));
            }
        }
    } else {
        while !fixes_at(h0)? {
            h0 -= 1;
            if h0 < -MAX_STEPS {
                return Err(LatticeError::Internal("no fixed vertex on the axis".into()));
            }
        }
    }
    let w0 = b.axis_vertex(h0)?;
    let beta = c.beta();
    let mut wk = w0.clone();
    for k in 0..=MAX_STEPS as u32 {
        let lk = spec.l * k;
        let j = divisors_of_power(sig, lk)
            .into_iter()
            .find(|j| c.power(j.to_i64().expect("small")).fixes(&wk).unwrap_or(false))
            .ok_or_else(|| LatticeError::Internal(format!("no power of a fixes w_{k}")))?;
        let jbeta = beta * Rational::from(j.clone());
        if transitive_forever(&jbeta, &wk, sig) {
            let m = solve_j_eta(&j, lk, sig)?;
            let td = spec.img_a.td()?;
            let s = td * Rational::from(j.clone()) / (Rational::from(sig.pow_int(lk)) * sig.pow(h0));
            return Ok(ClassifyResult { s, m, h0, j, k, w0 });
        }
        wk = b.act(&wk);
    }
    Err(LatticeError::Internal("search for k did not terminate".into()))
}

pub fn classify(spec: &EmbeddingSpec) -> Result<ClassifyResult, LatticeError> {
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(LatticeError::Validation(violations));
    }
    let fast = closed_form(spec)?;
    let slow = literal_search(spec)?;
    if fast != slow {
        return Err(LatticeError::Internal(format!(
            "closed form (s={}, m={}, h0={}, j={}, k={}) vs search (s={}, m={}, h0={}, j={}, k={})",
            fast.s, fast.m, fast.h0, fast.j, fast.k, slow.s, slow.m, slow.h0, slow.j, slow.k
        )));
    }
    debug_assert!(satisfies_star(&fast.m, &spec.sig));
    Ok(fast)
}

/// Classifies independently in parallel; output order follows input order.
pub fn classify_batch(specs: &[EmbeddingSpec]) -> Vec<Result<ClassifyResult, LatticeError>> {
    specs.par_iter().map(classify).collect()
}

/// g·spec·g^{-1}.
pub fn conjugate_spec(g: &ArithmeticIsometry, spec: &EmbeddingSpec) -> Result<EmbeddingSpec, LatticeError> {
    if g.n() != spec.n() {
        return Err(LatticeError::BaseMismatch { left: g.n(), right: spec.n() });
    }
    EmbeddingSpec::new(spec.l, spec.img_a.conjugate_by(g), spec.img_b.conjugate_by(g))
}

pub fn apply_autgn_spec(phi: &AutGn, spec: &EmbeddingSpec) -> Result<EmbeddingSpec, LatticeError> {
    EmbeddingSpec::new(spec.l, apply_autgn(phi, &spec.img_a)?, apply_autgn(phi, &spec.img_b)?)
}

fn same_base(a: &EmbeddingSpec, b: &EmbeddingSpec) -> Result<(), LatticeError> {
    if a.n() == b.n() {
        Ok(())
    } else {
        Err(LatticeError::BaseMismatch { left: a.n(), right: b.n() })
    }
}

pub fn are_conjugate(a: &EmbeddingSpec, b: &EmbeddingSpec) -> Result<bool, LatticeError> {
    same_base(a, b)?;
    let (ca, cb) = (classify(a)?, classify(b)?);
    Ok(a.l == b.l && ca.s == cb.s && ca.m == cb.m)
}

pub fn are_automorphism_equivalent(a: &EmbeddingSpec, b: &EmbeddingSpec) -> Result<bool, LatticeError> {
    same_base(a, b)?;
    let (ca, cb) = (classify(a)?, classify(b)?);
    Ok(a.l == b.l && ca.m == cb.m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientEntry {
    pub rep: TreeVertex,
    #[serde(rename = "a")]
    pub a_v: Rational,
    #[serde(rename = "h")]
    pub h_v: i64,
    pub stab0: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientData {
    entries: Vec<QuotientEntry>,
}

#[derive(Deserialize)]
struct QuotientEntryJson {
    rep: serde_json::Value,
    a: Rational,
    h: Option<i64>,
    stab0: u64,
}

impl QuotientData {
    pub fn new(entries: Vec<QuotientEntry>) -> Result<Self, LatticeError> {
        for (i, e) in entries.iter().enumerate() {
            if !e.a_v.is_positive() {
                return Err(LatticeError::InvalidParams(format!("a_v = {} must be positive", e.a_v)));
            }
            if e.stab0 == 0 {
                return Err(LatticeError::InvalidParams("stab0 must be at least 1".into()));
            }
            if e.rep.h() != e.h_v {
                return Err(LatticeError::InvalidParams(format!(
                    "entry {i}: h = {} disagrees with the height of {}",
                    e.h_v, e.rep
                )));
            }
            if entries[..i].iter().any(|o| o.rep == e.rep) {
                return Err(LatticeError::InvalidParams(format!("representative {} repeats", e.rep)));
            }
        }
        Ok(QuotientData { entries })
    }

    pub fn entries(&self) -> &[QuotientEntry] {
        &self.entries
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.entries).expect("serializable")
    }

    /// Parses `[{"rep": {"h","c"}, "a": "p/q", "h": int, "stab0": int}, ...]`.
    pub fn from_json(sig: &PrimeSignature, v: &serde_json::Value) -> Result<Self, LatticeError> {
        let raw: Vec<QuotientEntryJson> = serde_json::from_value(v.clone())
            .map_err(|e| LatticeError::InvalidParams(format!("quotient JSON: {e}")))?;
        let mut entries = Vec::new();
        for r in raw {
            let rep = TreeVertex::from_json(sig, &r.rep)?;
            let h_v = r.h.unwrap_or(rep.h());
            entries.push(QuotientEntry { rep, a_v: r.a, h_v, stab0: r.stab0 });
        }
        QuotientData::new(entries)
    }
}

/// Σ a_v·n^{-h_v}/|Γ_{v,0}|.
pub fn covolume_from_quotient(q: &QuotientData, n: u64) -> Result<Rational, LatticeError> {
    let sig = PrimeSignature::new(n)?;
    Ok(q.entries.iter().fold(Rational::zero(), |acc, e| {
        acc + &e.a_v * sig.pow(-e.h_v) / Rational::from(e.stab0 as i64)
    }))
}

/// One orbit representative per axis vertex w_0..w_{l-1}; a_{w_i} is the
/// least positive |td| over stabilizer elements b^{-lx}·a^y·b^{lx}, whose
/// tree translations are y·β·n^{-lx}.
pub fn enumerate_quotient(spec: &EmbeddingSpec) -> Result<QuotientData, LatticeError> {
    let c = classify(spec)?;
    let sig = &spec.sig;
    let beta = spec.img_a.tree().beta();
    let vals = valuation_vector(beta, sig).expect("validated");
    let alpha = spec.img_a.alpha().abs();
    let mut entries = Vec::new();
    for i in 0..spec.l as i64 {
        let h = c.h0 + i;
        let mut a_v = alpha.clone();
        for (&(p, e), &vp) in sig.factors().iter().zip(&vals) {
            a_v = a_v * Rational::from(p as i64).pow(h * e as i64 - vp);
        }
        entries.push(QuotientEntry { rep: spec.img_b.tree().axis_vertex(h)?, a_v, h_v: h, stab0: 1 });
    }
    QuotientData::new(entries)
}

/// Builds a window conjugator taking (imgA, imgB) to the standard (a, b^l):
/// translate x* to 0, straighten imgA levelwise by sending c^r·v_i to a^r·v_i,
/// then extend along the axis.
pub fn straighten(spec: &EmbeddingSpec, depth: u32, window: u32) -> Result<PartialTreeMap, LatticeError> {
    if depth == 0 {
        return Err(LatticeError::InvalidParams("depth must be at least 1".into()));
    }
    let c = classify(spec)?;
    if !c.m.is_one() || c.h0 != 0 {
        return Err(LatticeError::NotStraightenable(format!(
            "needs m = 1 and h0 = 0, got m = {} and h0 = {}",
            c.m, c.h0
        )));
    }
    let sig = &spec.sig;
    let n = sig.n();
    let x_star = spec.img_b.tree().axis_point()?;
    let tau = BallAffineMap::translation(sig, -&x_star);
    let b_std = BallAffineMap::standard_b_power(sig, spec.l as i64);
    let b_moved = spec.img_b.tree().conjugate_by(&tau);
    if b_moved != b_std {
        return Err(LatticeError::Internal(format!("moved b is {b_moved}, expected {b_std}")));
    }
    // τ commutes with translations, so imgA is unchanged by the move.
    let root = TreeVertex::root(n);
    let mut levels = Vec::new();
    for i in 1..=depth {
        let size = n
            .checked_pow(i)
            .filter(|&s| s <= crate::tree::MAX_LEVEL_SIZE)
            .ok_or_else(|| LatticeError::InvalidParams(format!("depth {i} too large for n={n}")))?;
        let mut sigma = vec![u32::MAX; size as usize];
        let mut vertex = TreeVertex::from_label(&root, i, &BigInt::zero());
        for r in 0..size {
            let (_, lab) = vertex.label_in(&root).expect("in up(v_0)");
            let slot = &mut sigma[lab.to_usize().expect("small label")];
            if *slot != u32::MAX {
                break;
            }
            *slot = r as u32;
            vertex = spec.img_a.tree().act(&vertex);
        }
        if sigma.contains(&u32::MAX) {
            return Err(LatticeError::Internal(format!("image of a is not transitive on level {i}")));
        }
        levels.push(sigma);
    }
    let f = LevelPermAutomorphism::new(n, levels)?;
    let g = build_conjugator(&b_std, &b_moved, &f, window, depth)?;
    let tau_inv = tau.inverse();
    let pairs: BTreeMap<TreeVertex, TreeVertex> =
        g.iter().map(|(v, w)| (tau_inv.act(v), w.clone())).collect();
    Ok(PartialTreeMap::new(n, pairs)?)
}

/// The three families of full lattices containing BS(1, n^l).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    /// BS(1, n^l) itself.
    One,
    /// Adjoin c with c·a·c^{-1} = a^{-n^{l/2}}, c² = b (l even).
    Two,
    /// Adjoin the reflection c(x) = −x + m_ref.
    Three { m_ref: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresentationCase {
    pub kind: CaseKind,
    pub n: u64,
    pub l: u32,
}

/// Relator word over generators 'a', 'b', 'c'.
pub type PresWord = Vec<(char, i64)>;

pub fn parse_pres_word(s: &str) -> Result<PresWord, LatticeError> {
    let bad = || LatticeError::InvalidParams(format!("cannot parse relator `{s}`"));
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i].to_ascii_lowercase();
        i += 1;
        if ch.is_whitespace() || ch == '*' || ch == '.' || ch == '·' {
            continue;
        }
        if !matches!(ch, 'a' | 'b' | 'c') {
            return Err(bad());
        }
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
            e = chars[start..i].iter().collect::<String>().parse().map_err(|_| bad())?;
        }
        out.push((ch, e));
    }
    Ok(out)
}

pub fn format_pres_word(w: &PresWord) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&(g, e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug)]
pub struct FullLattice {
    pub case: PresentationCase,
    pub generators: Vec<(char, ArithmeticIsometry)>,
    pub relators: Vec<PresWord>,
    /// Exponent y in c·b·c^{-1} = a^y·b, computed by composition (case 3).
    pub y: Option<BigInt>,
    /// The value m_ref·(1 − n) printed in the source for comparison (case 3).
    pub y_printed: Option<BigInt>,
}

pub fn evaluate_relator(
    generators: &[(char, ArithmeticIsometry)],
    word: &PresWord,
) -> Result<ArithmeticIsometry, LatticeError> {
    let first = generators
        .first()
        .ok_or_else(|| LatticeError::InvalidParams("no generators".into()))?;
    let mut acc = ArithmeticIsometry::identity(first.1.signature());
    for &(g, e) in word {
        let gen = generators
            .iter()
            .find(|(name, _)| *name == g)
            .ok_or_else(|| LatticeError::InvalidParams(format!("unknown generator {g}")))?;
        acc = acc.try_compose(&gen.1.power(e))?;
    }
    Ok(acc)
}

/// True iff every relator evaluates to the identity in both components.
pub fn verify_presentation(
    generators: &[(char, ArithmeticIsometry)],
    relators: &[PresWord],
) -> Result<bool, LatticeError> {
    for r in relators {
        if !evaluate_relator(generators, r)?.is_identity() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn build_full_lattice(case: PresentationCase) -> Result<FullLattice, LatticeError> {
    if case.l == 0 {
        return Err(LatticeError::CaseInvalid("l must be at least 1".into()));
    }
    let sig = PrimeSignature::new(case.n)?;
    let l = case.l as i64;
    let nl = sig.pow_int(case.l).to_i64().ok_or_else(|| LatticeError::CaseInvalid("n^l too large".into()))?;
    let a = ArithmeticIsometry::standard_a(&sig, Rational::one());
    let b = ArithmeticIsometry::standard_b_power(&sig, l);
    let mut generators = vec![('a', a), ('b', b.clone())];
    let mut relators: Vec<PresWord> = vec![vec![('b', 1), ('a', 1), ('b', -1), ('a', -nl)]];
    let (mut y, mut y_printed) = (None, None);
    match case.kind {
        CaseKind::One => {}
        CaseKind::Two => {
            if case.l % 2 != 0 {
                return Err(LatticeError::CaseInvalid(format!("case 2 needs even l, got {}", case.l)));
            }
            let half = sig.pow(l / 2);
            let c = ArithmeticIsometry::new(
                -1,
                Rational::zero(),
                BallAffineMap::new(&sig, -half.clone(), Rational::zero())?,
            )?;
            let root = half.to_integer().and_then(|v| v.to_i64()).expect("integer power");
            generators.push(('c', c));
            relators.push(vec![('c', 1), ('a', 1), ('c', -1), ('a', root)]);
            relators.push(vec![('c', 2), ('b', -1)]);
        }
        CaseKind::Three { m_ref } => {
            let m_q = Rational::from(m_ref);
            let c = ArithmeticIsometry::new(
                -1,
                m_q.clone(),
                BallAffineMap::new(&sig, Rational::from(-1), m_q)?,
            )?;
            let commutator = c.compose(&b).compose(&c.inverse()).compose(&b.inverse());
            let y_q = commutator.td().map_err(|_| {
                LatticeError::CaseInvalid("c b c^-1 b^-1 is not a translation".into())
            })?;
            let y_int = y_q
                .to_integer()
                .filter(|_| commutator.tree().u().is_one() && commutator.tree().beta() == &y_q)
                .ok_or_else(|| LatticeError::CaseInvalid("c b c^-1 b^-1 is not a power of a".into()))?;
            let y_i64 = y_int.to_i64().ok_or_else(|| LatticeError::CaseInvalid("y too large".into()))?;
            generators.push(('c', c));
            relators.push(vec![('c', 1), ('a', 1), ('c', -1), ('a', 1)]);
            relators.push(vec![('c', 2)]);
            relators.push(vec![('c', 1), ('b', 1), ('c', -1), ('b', -1), ('a', -y_i64)]);
            y = Some(y_int);
            y_printed = Some(BigInt::from(m_ref) * (1 - case.n as i64));
        }
    }
    Ok(FullLattice { case, generators, relators, y, y_printed })
}

/// Nonzero rational ±p/q with p, q ≤ bound and both coprime to n.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, sig: &PrimeSignature, bound: u64) -> Rational {
    let n = sig.n();
    loop {
        let p = rng.gen_range(1..=bound.max(1));
        let q = rng.gen_range(1..=bound.max(1));
        if p.gcd(&n) == 1 && q.gcd(&n) == 1 {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            return Rational::new(sign * p as i64, q as i64).expect("q >= 1");
        }
    }
}

/// Orientation-preserving isometry with height in [−max_h, max_h], a unit
/// multiple of n^h as tree slope, and translations with numerators bounded
/// by `max_num`.
pub fn random_isometry<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &PrimeSignature,
    max_h: i64,
    max_num: i64,
) -> ArithmeticIsometry {
    let h = rng.gen_range(-max_h..=max_h);
    let u = sig.pow(h) * random_unit(rng, sig, 9);
    let frac = |rng: &mut R| {
        let p = rng.gen_range(-max_num..=max_num);
        let q = rng.gen_range(1..=12i64);
        Rational::new(p, q).expect("q >= 1")
    };
    let alpha = frac(rng);
    let beta = frac(rng);
    ArithmeticIsometry::from_parts(sig, 1, h, alpha, u, beta).expect("consistent by construction")
}

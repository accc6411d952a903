//! Exhaustive checks at desk scale: the finite groups H_k = Aut(up_{≤k}(v_0)),
//! centralizers of powers of a, eventual transitivity of translations, and
//! the level-sum identity. Enumeration is the ground truth; closed forms are
//! shown next to it.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactnum::{
    in_power_ideal, is_unit_in_zn, mod_inverse, valuation_vector, ExactError, PrimeSignature, Rational,
    TruncatedNAdic,
};
use crate::tree::{build_aeta, LevelPermAutomorphism, TreeError};

/// Largest group the enumerator will build.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;
/// Largest number of top-level labels n^k.
pub const MAX_TOP_LEVEL: u64 = 64;
/// Groups up to this order are closure-checked pairwise.
const PAIRWISE_CLOSURE_LIMIT: usize = 600;
/// Maximal abelian subgroups are searched only up to this order.
pub const CLIQUE_SEARCH_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("element is not a member of H_{k} for n={n}")]
    NotMember { n: u64, k: u32 },
    #[error("translation part is zero")]
    ZeroTranslation,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal disagreement: {0}")]
    Internal(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HkGroup {
    n: u64,
    k: u32,
    elements: Vec<LevelPermAutomorphism>,
}

impl HkGroup {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> &[LevelPermAutomorphism] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &LevelPermAutomorphism) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// Composition and inverse closure, identity membership, canonical order.
    pub fn verify_closure(&self) -> Result<(), LabError> {
        if !self.elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(LabError::Internal("elements not strictly sorted".into()));
        }
        let id = LevelPermAutomorphism::identity(self.n, self.k)?;
        if !self.contains(&id) {
            return Err(LabError::Internal("identity missing".into()));
        }
        if self.elements.par_iter().any(|g| !self.contains(&g.inverse())) {
            return Err(LabError::Internal("not closed under inverse".into()));
        }
        if self.order() <= PAIRWISE_CLOSURE_LIMIT {
            let open = self
                .elements
                .par_iter()
                .any(|g| self.elements.iter().any(|h| !self.contains(&g.compose(h))));
            if open {
                return Err(LabError::Internal("not closed under composition".into()));
            }
            return Ok(());
        }
        // A set that contains the identity, is closed under right
        // multiplication by generators of Aut and is reached from the
        // identity by them is exactly the group they generate.
        let gens = subtree_generators(self.n, self.k)?;
        let open = self
            .elements
            .par_iter()
            .any(|g| gens.iter().any(|s| !self.contains(&g.compose(s))));
        if open {
            return Err(LabError::Internal("not closed under the generators".into()));
        }
        let mut seen: HashSet<LevelPermAutomorphism> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &gens {
                let h = g.compose(s);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        if seen.len() != self.order() {
            return Err(LabError::Internal(format!(
                "generators reach {} elements, enumeration has {}",
                seen.len(),
                self.order()
            )));
        }
        Ok(())
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// The closed form (n!)^k·n^{k−1}.
pub fn count_formula_hk(n: u64, k: u32) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    num_traits::pow(factorial(n), k as usize) * num_traits::pow(BigInt::from(n), k as usize - 1)
}

/// Orbit–stabilizer count n!·|H_{k−1}|^n = (n!)^{(n^k−1)/(n−1)}.
pub fn count_recursive_hk(n: u64, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, _| factorial(n) * num_traits::pow(acc, n as usize))
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (n - 1) as u32);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Rigid permutation of the n subtrees hanging off one vertex.
fn vertex_permutation(n: u64, k: u32, level: u32, y: u64, pi: &[u32]) -> Result<LevelPermAutomorphism, LabError> {
    let step = n.pow(level);
    Ok(LevelPermAutomorphism::from_fn(n, k, |i, x| {
        if i <= level || x % step != y {
            return x;
        }
        let t = (x / step) % n;
        let rest = x - (x % (step * n));
        rest + y + step * pi[t as usize] as u64
    })?)
}

/// Transposition and n-cycle at every vertex of levels 0..k−1.
fn subtree_generators(n: u64, k: u32) -> Result<Vec<LevelPermAutomorphism>, LabError> {
    let swap: Vec<u32> = (0..n as u32).map(|t| if t < 2 { 1 - t } else { t }).collect();
    let cycle: Vec<u32> = (0..n as u32).map(|t| (t + 1) % n as u32).collect();
    let mut gens = Vec::new();
    for level in 0..k {
        for y in 0..n.pow(level) {
            gens.push(vertex_permutation(n, k, level, y, &swap)?);
            if n > 2 {
                gens.push(vertex_permutation(n, k, level, y, &cycle)?);
            }
        }
    }
    Ok(gens)
}

/// All compatible level-permutation tuples of depth k, canonically sorted.
pub fn enumerate_hk(n: u64, k: u32) -> Result<HkGroup, LabError> {
    if n < 2 || k == 0 {
        return Err(LabError::Precondition("need n >= 2 and k >= 1".into()));
    }
    let top = n.checked_pow(k).filter(|&t| t <= MAX_TOP_LEVEL);
    if top.is_none() {
        return Err(LabError::TooLarge(format!("{n}^{k} exceeds {MAX_TOP_LEVEL} labels")));
    }
    let expected = count_recursive_hk(n, k);
    if expected > BigInt::from(MAX_GROUP_ORDER) {
        return Err(LabError::TooLarge(format!("|H_{k}| = {expected} exceeds {MAX_GROUP_ORDER}")));
    }
    let perms = permutations(n as usize);
    // Each tuple is extended one level at a time: the children y + n^i·t of
    // label y go to σ_i(y) + n^i·π_y(t) for a free choice π_y ∈ S_n.
    let mut current: Vec<Vec<Vec<u32>>> = vec![vec![]];
    for i in 0..k {
        let width = n.pow(i) as usize;
        let mut next = Vec::new();
        for levels in &current {
            let lower: Vec<u32> = if i == 0 { vec![0] } else { levels[i as usize - 1].clone() };
            let mut choice = vec![0usize; width];
            loop {
                let mut sigma = vec![0u32; width * n as usize];
                for x in 0..width * n as usize {
                    let y = x % width;
                    let t = x / width;
                    sigma[x] = lower[y] + (width as u32) * perms[choice[y]][t];
                }
                let mut ext = levels.clone();
                ext.push(sigma);
                next.push(ext);
                let mut pos = 0;
                while pos < width {
                    choice[pos] += 1;
                    if choice[pos] < perms.len() {
                        break;
                    }
                    choice[pos] = 0;
                    pos += 1;
                }
                if pos == width {
                    break;
                }
            }
        }
        current = next;
    }
    let mut elements = current
        .into_par_iter()
        .map(|levels| LevelPermAutomorphism::new(n, levels))
        .collect::<Result<Vec<_>, _>>()?;
    elements.par_sort();
    elements.dedup();
    let group = HkGroup { n, k, elements };
    group.verify_closure()?;
    Ok(group)
}

/// Elements of H commuting with g, in canonical order.
pub fn centralizer_in_hk(g: &LevelPermAutomorphism, group: &HkGroup) -> Result<HkGroup, LabError> {
    if !group.contains(g) {
        return Err(LabError::NotMember { n: group.n, k: group.k });
    }
    let elements: Vec<LevelPermAutomorphism> = group
        .elements
        .par_iter()
        .filter(|h| h.commutes_with(g))
        .cloned()
        .collect();
    Ok(HkGroup { n: group.n, k: group.k, elements })
}

/// The standard a restricted to depth k, raised to the m-th power.
pub fn a_power(n: u64, k: u32, m: u64) -> Result<LevelPermAutomorphism, LabError> {
    let sig = PrimeSignature::new(n)?;
    let modulus = sig.pow_int(k);
    let eta = TruncatedNAdic::new(BigInt::from(m).mod_floor(&modulus), k, &sig)?;
    Ok(build_aeta(&eta)?)
}

/// A brute-force value set against a closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: String,
    pub params: BTreeMap<String, Value>,
    pub brute: Rational,
    pub formula: Rational,
    pub matches: bool,
    pub notes: Vec<String>,
    pub details: BTreeMap<String, Value>,
}

fn rational_json(x: &Rational) -> Value {
    match x.to_integer().and_then(|v| v.to_i64()) {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl LemmaReport {
    fn new(lemma: &str, params: &[(&str, Value)], brute: Rational, formula: Rational) -> Self {
        LemmaReport {
            lemma: lemma.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            matches: brute == formula,
            brute,
            formula,
            notes: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lemma": self.lemma,
            "params": self.params,
            "brute": rational_json(&self.brute),
            "formula": rational_json(&self.formula),
            "match": self.matches,
            "notes": self.notes,
            "details": self.details,
        })
    }

    /// Plain-text table.
    pub fn to_table(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut rows = vec![
            ("lemma".to_string(), self.lemma.clone()),
            ("params".to_string(), params.join(" ")),
            ("brute force".to_string(), self.brute.to_string()),
            ("formula".to_string(), self.formula.to_string()),
            ("match".to_string(), self.matches.to_string()),
        ];
        for (k, v) in &self.details {
            rows.push((k.clone(), v.to_string().trim_matches('"').to_string()));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Enumerated |H_k| against the closed form, with the orbit–stabilizer count.
pub fn count_hk_report(n: u64, k: u32) -> Result<LemmaReport, LabError> {
    let group = enumerate_hk(n, k)?;
    let formula = count_formula_hk(n, k);
    let recursive = count_recursive_hk(n, k);
    let mut r = LemmaReport::new(
        "countHk",
        &[("n", json!(n)), ("k", json!(k))],
        Rational::from(group.order() as i64),
        Rational::from(formula),
    );
    r.details.insert("orbit_stabilizer".into(), json!(recursive.to_string()));
    r.details.insert("closure_verified".into(), json!(true));
    if !r.matches {
        r.notes.push("closed form disagrees with exhaustive enumeration".into());
    }
    Ok(r)
}

/// Least l with m | n^l·t for some t coprime to n.
fn centralizer_level(m: u64, sig: &PrimeSignature) -> u32 {
    let vals = valuation_vector(&Rational::from(m as i64), sig).expect("m >= 1");
    vals.iter()
        .zip(sig.factors())
        .map(|(&v, &(_, e))| Integer::div_ceil(&v, &(e as i64)) as u32)
        .max()
        .unwrap_or(0)
}

/// |C_{H_k}(a^m)| against the bound n^k·|H_l| and the structural count
/// n^{(k−l)·n^l}·|H_l|.
pub fn centralizer_bound_report(n: u64, k: u32, m: u64) -> Result<LemmaReport, LabError> {
    if m == 0 {
        return Err(LabError::Precondition("m must be positive".into()));
    }
    let sig = PrimeSignature::new(n)?;
    let l = centralizer_level(m, &sig);
    if l >= k {
        return Err(LabError::Precondition(format!("needs l < k, got l = {l}, k = {k}")));
    }
    let group = enumerate_hk(n, k)?;
    let c = centralizer_in_hk(&a_power(n, k, m)?, &group)?;
    let brute = BigInt::from(c.order());
    let bound = sig.pow_int(k) * count_formula_hk(n, l);
    let h_l = if l == 0 { BigInt::one() } else { BigInt::from(enumerate_hk(n, l)?.order()) };
    let structural = num_traits::pow(BigInt::from(n), ((k - l) as u64 * n.pow(l)) as usize) * &h_l;
    let mut r = LemmaReport::new(
        "boundCentralizer",
        &[("n", json!(n)), ("k", json!(k)), ("m", json!(m))],
        Rational::from(brute.clone()),
        Rational::from(bound.clone()),
    );
    r.details.insert("l".into(), json!(l));
    r.details.insert("structural_count".into(), json!(structural.to_string()));
    r.details.insert("bound_holds".into(), json!(brute <= bound));
    r.details.insert("structural_matches".into(), json!(brute == structural));
    if brute > bound {
        r.notes.push(format!("bound fails: {brute} > {bound}"));
    }
    if brute != structural {
        r.notes.push(format!("structural count {structural} differs from {brute}"));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityWitness {
    pub k: u32,
    pub j: BigInt,
    /// Levels of up(w_k) on which transitivity was checked by enumeration.
    pub certified_levels: u32,
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

/// Residue of a Z_n element modulo `modulus`.
fn residue(x: &Rational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let inv = mod_inverse(x.denom(), &m).expect("unit denominator");
    (x.numer() * inv).mod_floor(&m).to_u64().expect("below modulus")
}

/// Size of the orbit of 0 under y ↦ y + g on Z/size.
fn orbit_of_zero(g: u64, size: u64) -> u64 {
    let mut y = g % size;
    let mut len = 1;
    while y != 0 {
        y = (y + g) % size;
        len += 1;
    }
    len
}

/// For x ↦ x + β fixing w_0 = (base, 0) and b = x ↦ n^l·x, the least k and
/// least j with c^j fixing w_k = b^k·w_0 and acting transitively forever on
/// up(w_k). The answer is cross-checked against the per-prime closed form
/// and certified by orbit enumeration on levels 1..=bound.
pub fn eventually_transitive_search(
    beta: &Rational,
    l: u32,
    base: i64,
    bound: u32,
    sig: &PrimeSignature,
) -> Result<TransitivityWitness, LabError> {
    const MAX_K: u32 = 4096;
    if beta.is_zero() {
        return Err(LabError::ZeroTranslation);
    }
    if l == 0 {
        return Err(LabError::Precondition("l must be at least 1".into()));
    }
    if !in_power_ideal(beta, base, sig) {
        return Err(LabError::Precondition(format!("x -> x + {beta} does not fix the base vertex at height {base}")));
    }
    let n = sig.n();
    if n.checked_pow(bound).is_none_or(|s| s > crate::tree::MAX_LEVEL_SIZE) {
        return Err(LabError::TooLarge(format!("{n}^{bound} labels")));
    }
    let mut found = None;
    for k in 0..=MAX_K {
        let height = base + (l * k) as i64;
        let j = divisors_of_power(sig, l * k)
            .into_iter()
            .find(|j| in_power_ideal(&(beta * Rational::from(j.clone())), height, sig))
            .expect("n^{lk} works");
        let gamma = beta * Rational::from(j.clone()) / sig.pow(height);
        if is_unit_in_zn(&gamma, sig) {
            found = Some((k, j, gamma));
            break;
        }
    }
    let (k, j, gamma) = found.ok_or_else(|| LabError::Internal("no k found".into()))?;
    let vals = valuation_vector(beta, sig).expect("nonzero");
    let mut ck = 0i64;
    for (&v, &(_, e)) in vals.iter().zip(sig.factors()) {
        ck = ck.max(Integer::div_ceil(&(v - base * e as i64), &((l * e) as i64)));
    }
    let mut cj = BigInt::one();
    for (&v, &(p, e)) in vals.iter().zip(sig.factors()) {
        cj *= num_traits::pow(BigInt::from(p), (ck * (l * e) as i64 - (v - base * e as i64)) as usize);
    }
    if (ck as u32, &cj) != (k, &j) {
        return Err(LabError::Internal(format!("search gives (k={k}, j={j}), closed form (k={ck}, j={cj})")));
    }
    for i in 1..=bound {
        let size = n.pow(i);
        if orbit_of_zero(residue(&gamma, size), size) != size {
            return Err(LabError::Internal(format!("c^{j} is not transitive on level {i} above w_{k}")));
        }
    }
    Ok(TransitivityWitness { k, j, certified_levels: bound })
}

/// For each level i ≤ depth, Σ over orbits of +γ on Z/n^i of a_v·|orbit|·n^{−i}.
pub fn level_sum_check(gamma: &Rational, a_v: &Rational, depth: u32, sig: &PrimeSignature) -> Result<LemmaReport, LabError> {
    if gamma.is_zero() {
        return Err(LabError::ZeroTranslation);
    }
    if !in_power_ideal(gamma, 0, sig) {
        return Err(LabError::Precondition(format!("{gamma} is not in Z_{}", sig.n())));
    }
    let n = sig.n();
    if n.checked_pow(depth).is_none_or(|s| s > crate::tree::MAX_LEVEL_SIZE) {
        return Err(LabError::TooLarge(format!("{n}^{depth} labels")));
    }
    let mut sums = Vec::new();
    let mut orbit_counts = Vec::new();
    for i in 1..=depth {
        let size = n.pow(i);
        let g = residue(gamma, size);
        let mut seen = vec![false; size as usize];
        let mut total = Rational::zero();
        let mut orbits = 0u64;
        for start in 0..size {
            if seen[start as usize] {
                continue;
            }
            let mut y = start;
            let mut len = 0i64;
            while !seen[y as usize] {
                seen[y as usize] = true;
                len += 1;
                y = (y + g) % size;
            }
            orbits += 1;
            total = total + a_v * Rational::from(len) / Rational::from(size as i64);
        }
        sums.push(total);
        orbit_counts.push(orbits);
    }
    let constant = sums.iter().all(|s| s == a_v);
    let last = sums.last().cloned().unwrap_or_else(|| a_v.clone());
    let mut r = LemmaReport::new(
        "levelSum",
        &[
            ("n", json!(n)),
            ("gamma", json!(gamma.to_string())),
            ("a_v", json!(a_v.to_string())),
            ("depth", json!(depth)),
        ],
        last,
        a_v.clone(),
    );
    r.matches = constant;
    r.details.insert("sums".into(), json!(sums.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    r.details.insert("orbits".into(), json!(orbit_counts));
    if !constant {
        r.notes.push("level sums are not constant".into());
    }
    Ok(r)
}

/// Order of the largest set of pairwise commuting elements (Bron–Kerbosch
/// with pivoting on the commuting graph).
pub fn max_abelian_subgroup_order(group: &HkGroup) -> Result<usize, LabError> {
    let size = group.order();
    if size > CLIQUE_SEARCH_LIMIT {
        return Err(LabError::TooLarge(format!("clique search limited to order {CLIQUE_SEARCH_LIMIT}")));
    }
    let els = group.elements();
    let adj: Vec<Vec<bool>> = (0..size)
        .into_par_iter()
        .map(|i| (0..size).map(|j| i != j && els[i].commutes_with(&els[j])).collect())
        .collect();
    fn expand(adj: &[Vec<bool>], r: usize, p: Vec<usize>, x: Vec<usize>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .expect("nonempty");
        let mut p = p;
        let mut x = x;
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            expand(adj, r + 1, np, nx, best);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    expand(&adj, 0, (0..size).collect(), Vec::new(), &mut best);
    Ok(best)
}

/// [H_k : C_{H_k}(a^m)] for each m, with the smallest abelian index when the
/// group is small enough to search.
pub fn jordan_index_report(n: u64, k: u32, m_range: std::ops::RangeInclusive<u64>) -> Result<Vec<LemmaReport>, LabError> {
    if m_range.is_empty() || *m_range.start() == 0 {
        return Err(LabError::Precondition("m range must be nonempty and start at 1 or more".into()));
    }
    let sig = PrimeSignature::new(n)?;
    let group = enumerate_hk(n, k)?;
    let order = BigInt::from(group.order());
    let abelian = if group.order() <= CLIQUE_SEARCH_LIMIT {
        Some(max_abelian_subgroup_order(&group)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for m in m_range {
        let c = centralizer_in_hk(&a_power(n, k, m)?, &group)?;
        let index = Rational::new(order.clone(), c.order() as i64)?;
        let l = centralizer_level(m, &sig);
        let mut r = if l < k {
            let bound = sig.pow_int(k) * count_formula_hk(n, l);
            let lower = Rational::new(order.clone(), bound)?;
            let mut r = LemmaReport::new(
                "jordanIndex",
                &[("n", json!(n)), ("k", json!(k)), ("m", json!(m))],
                index.clone(),
                lower.clone(),
            );
            r.details.insert("index_at_least_bound".into(), json!(index >= lower));
            r
        } else {
            let mut r = LemmaReport::new(
                "jordanIndex",
                &[("n", json!(n)), ("k", json!(k)), ("m", json!(m))],
                index.clone(),
                Rational::one(),
            );
            r.notes.push(format!("a^{m} is trivial at depth {k}"));
            r
        };
        r.details.insert("order".into(), json!(group.order()));
        r.details.insert("centralizer_order".into(), json!(c.order()));
        if let Some(a) = abelian {
            r.details.insert("max_abelian_order".into(), json!(a));
            r.details.insert(
                "min_abelian_index".into(),
                rational_json(&Rational::new(order.clone(), a as i64)?),
            );
        }
        out.push(r);
    }
    Ok(out)
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
    fn hk_orders() {
        assert_eq!(enumerate_hk(2, 1).unwrap().order(), 2);
        assert_eq!(enumerate_hk(2, 2).unwrap().order(), 8);
        assert_eq!(enumerate_hk(3, 1).unwrap().order(), 6);
        assert_eq!(enumerate_hk(2, 3).unwrap().order(), 128);
        assert!(matches!(enumerate_hk(2, 7), Err(LabError::TooLarge(_))));
        assert!(matches!(enumerate_hk(4, 3), Err(LabError::TooLarge(_))));
    }

    #[test]
    fn formula_values() {
        assert_eq!(count_formula_hk(2, 2), BigInt::from(8));
        assert_eq!(count_formula_hk(3, 1), BigInt::from(6));
        assert_eq!(count_formula_hk(2, 3), BigInt::from(32));
        assert_eq!(count_recursive_hk(2, 3), BigInt::from(128));
        assert_eq!(count_recursive_hk(3, 2), BigInt::from(1296));
    }

    #[test]
    fn generators_generate() {
        let g = enumerate_hk(2, 3).unwrap();
        let gens = subtree_generators(2, 3).unwrap();
        assert!(gens.iter().all(|s| g.contains(s)));
    }

    #[test]
    fn centralizer_examples() {
        let h2 = enumerate_hk(2, 2).unwrap();
        let a = a_power(2, 2, 1).unwrap();
        let c = centralizer_in_hk(&a, &h2).unwrap();
        assert_eq!(c.order(), 4);
        let powers: Vec<_> = (0..4).map(|e| a.power(e)).collect();
        assert!(c.elements().iter().all(|g| powers.contains(g)));
        let id = LevelPermAutomorphism::identity(2, 2).unwrap();
        assert_eq!(centralizer_in_hk(&id, &h2).unwrap().order(), 8);
        assert_eq!(centralizer_in_hk(&a_power(2, 2, 2).unwrap(), &h2).unwrap().order(), 8);
        let stranger = LevelPermAutomorphism::identity(3, 2).unwrap();
        assert!(matches!(centralizer_in_hk(&stranger, &h2), Err(LabError::NotMember { .. })));
    }

    #[test]
    fn bound_report_examples() {
        let r = centralizer_bound_report(2, 2, 2).unwrap();
        assert_eq!((r.brute.clone(), r.formula.clone(), r.matches), (q("8"), q("8"), true));
        let r = centralizer_bound_report(2, 3, 2).unwrap();
        assert_eq!(r.formula, q("16"));
        let r = centralizer_bound_report(2, 2, 1).unwrap();
        assert_eq!(r.brute, q("4"));
        assert!(centralizer_bound_report(2, 2, 4).is_err());
    }

    #[test]
    fn transitivity_examples() {
        let w = eventually_transitive_search(&q("1"), 1, 0, 8, &sig(2)).unwrap();
        assert_eq!((w.k, w.j.clone()), (0, BigInt::from(1)));
        let w = eventually_transitive_search(&q("12"), 1, 0, 8, &sig(2)).unwrap();
        assert_eq!((w.k, w.j.clone()), (2, BigInt::from(1)));
        let w = eventually_transitive_search(&q("12"), 1, 2, 8, &sig(2)).unwrap();
        assert_eq!((w.k, w.j.clone()), (0, BigInt::from(1)));
        let w = eventually_transitive_search(&q("4"), 1, 0, 6, &sig(6)).unwrap();
        assert_eq!((w.k, w.j.clone()), (2, BigInt::from(9)));
        assert!(matches!(
            eventually_transitive_search(&q("0"), 1, 0, 4, &sig(2)),
            Err(LabError::ZeroTranslation)
        ));
    }

    #[test]
    fn level_sum_examples() {
        assert!(level_sum_check(&q("1"), &q("1"), 6, &sig(2)).unwrap().matches);
        let r = level_sum_check(&q("3"), &q("1/2"), 6, &sig(2)).unwrap();
        assert!(r.matches);
        assert_eq!(r.brute, q("1/2"));
        assert!(level_sum_check(&q("2"), &q("1"), 4, &sig(4)).unwrap().matches);
    }

    #[test]
    fn jordan_examples() {
        let r = jordan_index_report(2, 2, 1..=2).unwrap();
        assert_eq!(r[0].brute, q("2"));
        assert_eq!(r[1].brute, q("1"));
        let r = jordan_index_report(2, 3, 1..=1).unwrap();
        assert_eq!(r[0].brute, q("16"));
    }

    #[test]
    fn report_json_shape() {
        let r = count_hk_report(2, 2).unwrap();
        let j = r.to_json();
        assert_eq!(j["brute"], json!(8));
        assert_eq!(j["formula"], json!(8));
        assert_eq!(j["match"], json!(true));
        assert!(r.to_table().contains("brute force"));
    }
}

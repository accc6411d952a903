//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use bslattice::exactnum::{PrimeSignature, Rational};
use bslattice::lattice::EmbeddingSpec;

/// Condition (∗) by trial division: every prime factor of m divides n, and n ∤ m.
pub fn star(m: u64, n: u64) -> bool {
    if m == 0 || m % n == 0 {
        return false;
    }
    let mut rest = m;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            if n % p != 0 {
                return false;
            }
            rest /= p;
        } else {
            p += 1;
        }
    }
    true
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

/// (n, l, s, m) with (∗): n ∈ {2,3,4,6}, l ∈ {1,2,3}, m ≤ 12, and
/// s ∈ {±1/2, ±1, 3/2, 7/3} plus {−7/3, 5} to pass 200 cases.
pub fn round_trip_grid() -> Vec<(u64, u32, Rational, u64)> {
    let ss = ["1/2", "-1/2", "1", "-1", "3/2", "7/3", "-7/3", "5"];
    let mut out = Vec::new();
    for n in [2u64, 3, 4, 6] {
        for l in 1..=3u32 {
            for s in ss {
                for m in (1..=12u64).filter(|&m| star(m, n)) {
                    out.push((n, l, q(s), m));
                }
            }
        }
    }
    out
}

/// Covolume by brute force: for l consecutive axis vertices of imgB, the
/// smallest positive |td| among the elliptic elements imgB^{-x}·imgA^y·imgB^x
/// (0 ≤ x ≤ max_x, 1 ≤ y ≤ max_y) fixing the vertex, weighted by n^{-h}.
/// Returns None if some vertex has no stabilizer element within the bounds.
pub fn stabilizer_covolume(spec: &EmbeddingSpec, max_x: u32, max_y: u32) -> Option<Rational> {
    let sig: &PrimeSignature = spec.signature();
    let a = spec.img_a();
    let b = spec.img_b();
    let mut total = Rational::zero();
    for h in 0..spec.l() as i64 {
        let v = b.tree().axis_vertex(h).ok()?;
        let mut best: Option<Rational> = None;
        let mut conj = a.clone();
        for _ in 0..=max_x {
            let mut g = conj.clone();
            for _ in 1..=max_y {
                if g.tree().fixes(&v).ok()? {
                    let td = g.td().ok()?.abs();
                    assert!(!td.is_zero(), "torsion in the stabilizer");
                    if best.as_ref().is_none_or(|b| &td < b) {
                        best = Some(td);
                    }
                    break;
                }
                g = g.compose(&conj);
            }
            conj = b.inverse().compose(&conj).compose(b);
        }
        total = total + best? * sig.pow(-v.h());
    }
    Some(total)
}

/// A CLI invocation and its expected exit code.
pub struct CliCase {
    pub args: Vec<String>,
    pub exit: i32,
}

/// Writes the input files into `dir` and returns the command corpus. Paths
/// named in arguments live in `dir`; DOT outputs are written there too.
pub fn cli_corpus(dir: &std::path::Path) -> Vec<CliCase> {
    use bslattice::lattice::make_phi;
    std::fs::create_dir_all(dir).unwrap();
    let d = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let write = |name: &str, v: &serde_json::Value| {
        std::fs::write(dir.join(name), serde_json::to_string_pretty(v).unwrap()).unwrap()
    };
    write("phi_1_3.json", &make_phi(2, 1, &q("1"), 3).unwrap().to_json());
    write("phi_3_1.json", &make_phi(2, 1, &q("3"), 1).unwrap().to_json());
    write(
        "g.json",
        &serde_json::json!({"eps": 1, "h": 2, "alpha": "5/3", "u": "-28", "beta": "17/2"}),
    );
    write(
        "bad.json",
        &serde_json::json!({
            "n": 2, "l": 1,
            "a": {"eps": 1, "h": 0, "alpha": "0", "u": "1", "beta": "1"},
            "b": {"eps": 1, "h": 1, "alpha": "0", "u": "2", "beta": "0"}
        }),
    );
    write(
        "quot.json",
        &serde_json::json!([
            {"rep": {"h": 0, "c": "0"}, "a": "1", "h": 0, "stab0": 1},
            {"rep": {"h": 1, "c": "0"}, "a": "2", "h": 1, "stab0": 2}
        ]),
    );
    let cases: Vec<(String, i32)> = vec![
        ("bs normalize --N 2 @b^-1 a b@".into(), 0),
        ("--json bs mult --N 3 @a b@ @b^-1 a^2@".into(), 0),
        ("bs invert --N 4 @b^-2 a^7 b@".into(), 0),
        ("--json bs collins --N 6 --gen Q2 @a b a^-1@".into(), 0),
        ("bs collins --N 2 --gen theta3 @b a b^-1@".into(), 0),
        (format!("tree act --n 2 --beta 1 --h 2 --c 3/4 --dot {} --depth 2", d("act.dot")), 0),
        (format!("--json tree orbit --n 3 --beta 2 --level 2 --dot {}", d("orbit.dot")), 0),
        ("tree axis --n 2 --u 2 --beta 1".into(), 0),
        ("--json tree aeta --n 3 --eta 5 --depth 3".into(), 0),
        (format!("--json embed classify --n 2 --l 1 --file {}", d("phi_1_3.json")), 0),
        ("embed classify --n 6 --l 2 --s=-7/3 --m 9".into(), 0),
        (format!("--json embed conjugate --file {} --by {}", d("phi_1_3.json"), d("g.json")), 0),
        ("--json --seed 5 embed conjugate --n 4 --l 1 --s 3/2 --m 2 --trials 20".into(), 0),
        (format!("embed auto-equiv --file {} --other {}", d("phi_1_3.json"), d("phi_3_1.json")), 0),
        (format!("--json embed validate --file {}", d("bad.json")), 1),
        (format!("embed straighten --n 2 --l 1 --s 3 --m 1 --depth 3 --window 2 --dot {}", d("straighten.dot")), 0),
        ("embed straighten --n 2 --l 1 --s 1 --m 2".into(), 1),
        (format!("--json covol from-quotient --n 2 --file {}", d("quot.json")), 0),
        ("covol enumerate --n 2 --l 2 --s 1/2 --m 1".into(), 0),
        ("--json present verify --case 2 --n 3 --l 2".into(), 0),
        ("present verify --case 3 --n 2 --l 1 --m-ref=-1".into(), 0),
        ("present verify --case 2 --n 2 --l 1".into(), 1),
        ("--json lab count-hk --n 2 --k 3".into(), 0),
        ("lab count-hk --n 3 --k 2".into(), 0),
        ("--json lab centralizer --n 2 --k 3 --m 2".into(), 0),
        ("lab trans-search --n 6 --beta 4".into(), 0),
        ("--json lab trans-search --n 2 --beta 12".into(), 0),
        ("--json lab level-sum --n 4 --gamma 2 --a-v 1 --depth 4".into(), 0),
        ("--json lab jordan-index --n 2 --k 3 --m-to 4".into(), 0),
        ("embed make-phi --n 3 --l 2 --s 1/2 --m 1".into(), 0),
        ("lab count-hk --n 4 --k 3".into(), 3),
        ("bs normalize --N 2 @a c@".into(), 2),
        ("bs normalize --N 1 @a@".into(), 1),
        (format!("embed classify --file {}", d("missing.json")), 2),
        ("embed classify --n 2 --l 1".into(), 2),
        ("lab frobnicate".into(), 2),
    ];
    cases
        .into_iter()
        .map(|(line, exit)| CliCase { args: split_args(&line), exit })
        .collect()
}

/// Whitespace split, except that @...@ groups one argument.
fn split_args(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (i, chunk) in line.split('@').enumerate() {
        if i % 2 == 1 {
            out.push(chunk.to_string());
        } else {
            out.extend(chunk.split_whitespace().map(String::from));
        }
    }
    out
}

/// Transcript of the corpus: arguments, exit code, stdout, stderr and every
/// DOT file produced, in order.
pub fn corpus_transcript(dir: &std::path::Path, extra: &[&str], mut exec: impl FnMut(&[String]) -> (i32, Vec<u8>, Vec<u8>)) -> (String, Vec<String>) {
    let mut text = String::new();
    let mut wrong_exit = Vec::new();
    for case in cli_corpus(dir) {
        let mut args: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
        args.extend(case.args.iter().cloned());
        let (code, out, err) = exec(&args);
        if code != case.exit {
            wrong_exit.push(format!("{} -> {code} (expected {})", case.args.join(" "), case.exit));
        }
        text.push_str(&format!("$ {}\nexit {code}\n", case.args.join(" ")));
        text.push_str(&String::from_utf8_lossy(&out));
        text.push_str(&String::from_utf8_lossy(&err));
    }
    let mut dots: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dot"))
        .collect();
    dots.sort();
    for p in dots {
        text.push_str(&format!("== {}\n", p.file_name().unwrap().to_string_lossy()));
        text.push_str(&std::fs::read_to_string(&p).unwrap());
    }
    (text, wrong_exit)
}

/// A fresh scratch directory under the target tmp dir.
pub fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

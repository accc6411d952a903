//! Command-line front end. `run` never panics on bad input; every failure is a
//! single `error: <kind>: <message>` line on stderr plus a nonzero exit code.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bsgroup::{apply_collins, is_automorphism, multiply, normalize, invert, BsError, BsNormalForm, BsWord, CollinsGen};
use crate::exactnum::{ExactError, PrimeSignature, Rational, TruncatedNAdic};
use crate::isometry::{ArithmeticIsometry, IsometryError, IsometryJson};
use crate::lab::{self, LabError, LemmaReport};
use crate::lattice::{
    self, build_full_lattice, classify, conjugate_spec, covolume_from_quotient, enumerate_quotient,
    evaluate_relator, format_pres_word, make_phi, random_isometry, straighten, validate, CaseKind,
    EmbeddingSpec, LatticeError, PresentationCase, QuotientData,
};
use crate::tree::{build_aeta, defining_relation_failure, dot_subtree, BallAffineMap, TreeError, TreeVertex};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Parse,
    Infeasible,
    Internal,
    Io,
}

impl ErrorKind {
    fn label(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Parse => "parse",
            ErrorKind::Infeasible => "infeasible",
            ErrorKind::Internal => "internal",
            ErrorKind::Io => "io",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation | ErrorKind::Internal => EXIT_VALIDATION,
            ErrorKind::Parse | ErrorKind::Io => EXIT_PARSE,
            ErrorKind::Infeasible => EXIT_INFEASIBLE,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        CliError::new(ErrorKind::Validation, message)
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        let kind = match e {
            ExactError::Parse(_) => ErrorKind::Parse,
            _ => ErrorKind::Validation,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<BsError> for CliError {
    fn from(e: BsError) -> Self {
        let kind = match e {
            BsError::Parse(_) | BsError::InvalidGenerator(_) => ErrorKind::Parse,
            _ => ErrorKind::Validation,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Exact(inner) => inner.into(),
            TreeError::TooLarge(_) => CliError::new(ErrorKind::Infeasible, e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<IsometryError> for CliError {
    fn from(e: IsometryError) -> Self {
        match e {
            IsometryError::Tree(inner) => inner.into(),
            IsometryError::Exact(inner) => inner.into(),
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Isometry(inner) => inner.into(),
            LatticeError::Tree(inner) => inner.into(),
            LatticeError::Exact(inner) => inner.into(),
            LatticeError::Internal(_) => CliError::new(ErrorKind::Internal, e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Tree(inner) => inner.into(),
            LabError::Exact(inner) => inner.into(),
            LabError::TooLarge(_) => CliError::new(ErrorKind::Infeasible, e.to_string()),
            LabError::Internal(_) => CliError::new(ErrorKind::Internal, e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(ErrorKind::Parse, format!("json: {e}"))
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new(ErrorKind::Io, e.to_string())
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser, Debug)]
#[command(name = "bslattice", version, about = "Exact computations with lattices in the isometry groups of BS(1,n) model spaces")]
struct Cli {
    /// Emit JSON on stdout instead of text tables.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized operations.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for parallel enumeration (default: rayon's choice).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print timing diagnostics on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// Words in BS(1,N).
    Bs {
        #[command(subcommand)]
        cmd: BsCmd,
    },
    /// Arithmetic maps acting on the tree.
    Tree {
        #[command(subcommand)]
        cmd: TreeCmd,
    },
    /// Lattice embeddings of BS(1,n^l).
    Embed {
        #[command(subcommand)]
        cmd: EmbedCmd,
    },
    /// Covolumes.
    Covol {
        #[command(subcommand)]
        cmd: CovolCmd,
    },
    /// Presentations of the full lattices.
    Present {
        #[command(subcommand)]
        cmd: PresentCmd,
    },
    /// Exhaustive checks on finite truncations.
    Lab {
        #[command(subcommand)]
        cmd: LabCmd,
    },
}

#[derive(Args, Debug)]
struct BaseN {
    #[arg(long = "N", visible_alias = "n")]
    big_n: u64,
}

#[derive(Subcommand, Debug)]
enum BsCmd {
    Normalize {
        #[command(flatten)]
        base: BaseN,
        word: String,
    },
    Mult {
        #[command(flatten)]
        base: BaseN,
        left: String,
        right: String,
    },
    Invert {
        #[command(flatten)]
        base: BaseN,
        word: String,
    },
    Collins {
        #[command(flatten)]
        base: BaseN,
        /// A, B, C, D, Q<p> or theta<m>.
        #[arg(long)]
        gen: String,
        word: String,
    },
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    u: Rational,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta: Rational,
}

#[derive(Args, Debug)]
struct VertexArgs {
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    h: i64,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    c: Rational,
}

#[derive(Subcommand, Debug)]
enum TreeCmd {
    /// Image of a vertex.
    Act {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        vertex: VertexArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Orbits of an elliptic map on a level above a fixed vertex.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        vertex: VertexArgs,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Axis of a hyperbolic map.
    Axis {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        to: i64,
    },
    /// The level permutations of A^eta.
    Aeta {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        eta: BigInt,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Embedding file {"n","l","a","b"}.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    l: Option<u32>,
    /// With --n, --l and --m, build the standard embedding instead of reading a file.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<Rational>,
    #[arg(long)]
    m: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum EmbedCmd {
    /// The complete conjugacy invariant (s, m).
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Print the standard embedding a -> a_s^m, b^l -> b^l.
    MakePhi {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        l: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: Rational,
        #[arg(long)]
        m: u64,
    },
    /// Conjugate by an isometry from a file, or by seeded random isometries.
    Conjugate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Isometry file {"eps","h","alpha","u","beta"}.
        #[arg(long)]
        by: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        trials: u32,
    },
    /// Conjugacy and automorphism equivalence of two embeddings.
    AutoEquiv {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        other: PathBuf,
    },
    /// List violated embedding invariants.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Partial tree map moving the embedding's b onto the standard one.
    Straighten {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        window: u32,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CovolCmd {
    /// Covolume from quotient data [{"rep","a","h","stab0"}].
    FromQuotient {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        file: PathBuf,
    },
    /// Quotient graph data and covolume of an embedding.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Subcommand, Debug)]
enum PresentCmd {
    /// Evaluate every relator of a full lattice presentation.
    Verify {
        #[arg(long = "case")]
        case: u8,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        l: u32,
        #[arg(long = "m-ref", default_value_t = 0, allow_hyphen_values = true)]
        m_ref: i64,
    },
}

#[derive(Subcommand, Debug)]
enum LabCmd {
    /// Order of the level-preserving group H_k, by enumeration and closed form
    CountHk {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
    },
    /// Centralizer of a power of the odometer inside H_k
    Centralizer {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u64,
    },
    /// Smallest axis step after which a translation acts transitively
    TransSearch {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        beta: Rational,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        base: i64,
        #[arg(long, default_value_t = 8)]
        bound: u32,
    },
    /// Check that translation lengths sum to a constant on each level
    LevelSum {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Rational,
        #[arg(long = "a-v", default_value = "1")]
        a_v: Rational,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Centralizer index against the largest abelian subgroup of H_k
    JordanIndex {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long = "m-from", default_value_t = 1)]
        m_from: u64,
        #[arg(long = "m-to")]
        m_to: u64,
    },
}

struct Ctx<'a> {
    json: bool,
    seed: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, value: &Value, text: &str) -> CliResult {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string_pretty(value)?)?;
        } else {
            write!(self.out, "{text}")?;
            if !text.ends_with('\n') {
                writeln!(self.out)?;
            }
        }
        Ok(())
    }
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// Parse argv, execute, and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{}", e.render());
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_PARSE } else { EXIT_OK };
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "error: parse: {}", first.trim_start_matches("error: "));
            return EXIT_PARSE;
        }
    };
    let started = Instant::now();
    let verbose = cli.verbose;
    let mut buf: Vec<u8> = Vec::new();
    let mut result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(cli, &mut buf)),
            Err(e) => Err(CliError::new(ErrorKind::Internal, e.to_string())),
        },
        None => dispatch(cli, &mut buf),
    };
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        result = result.and(Err(e.into()));
    }
    if verbose {
        let _ = writeln!(err, "elapsed: {} ms", started.elapsed().as_millis());
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let msg = e.message.replace('\n', " ");
            let _ = writeln!(err, "error: {}: {}", e.kind.label(), msg);
            e.kind.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    let mut ctx = Ctx { json: cli.json, seed: cli.seed, out };
    match cli.cmd {
        Top::Bs { cmd } => run_bs(&mut ctx, cmd),
        Top::Tree { cmd } => run_tree(&mut ctx, cmd),
        Top::Embed { cmd } => run_embed(&mut ctx, cmd),
        Top::Covol { cmd } => run_covol(&mut ctx, cmd),
        Top::Present { cmd } => run_present(&mut ctx, cmd),
        Top::Lab { cmd } => run_lab(&mut ctx, cmd),
    }
}

fn normal_form_out(ctx: &mut Ctx, nf: &BsNormalForm, extra: &[(&str, Value)]) -> CliResult {
    let mut v = json!({
        "N": nf.big_n(),
        "word": nf.to_word().to_string(),
        "x": nf.x(),
        "y": int_json(nf.y()),
        "z": nf.z(),
    });
    for (k, val) in extra {
        v[*k] = val.clone();
    }
    let mut rows = vec![("word", nf.to_word().to_string()), ("(x,y,z)", nf.to_string())];
    for (k, val) in extra {
        rows.push((k, val.to_string().trim_matches('"').to_string()));
    }
    ctx.emit(&v, &table(&rows))
}

fn run_bs(ctx: &mut Ctx, cmd: BsCmd) -> CliResult {
    match cmd {
        BsCmd::Normalize { base, word } => {
            let w = BsWord::parse(base.big_n, &word)?;
            normal_form_out(ctx, &normalize(&w), &[])
        }
        BsCmd::Mult { base, left, right } => {
            let u = normalize(&BsWord::parse(base.big_n, &left)?);
            let v = normalize(&BsWord::parse(base.big_n, &right)?);
            normal_form_out(ctx, &multiply(&u, &v)?, &[])
        }
        BsCmd::Invert { base, word } => {
            let u = normalize(&BsWord::parse(base.big_n, &word)?);
            normal_form_out(ctx, &invert(&u), &[])
        }
        BsCmd::Collins { base, gen, word } => {
            let g: CollinsGen = gen.parse()?;
            let w = BsWord::parse(base.big_n, &word)?;
            let image = apply_collins(g, &w)?;
            let auto = is_automorphism(g, base.big_n);
            normal_form_out(
                ctx,
                &normalize(&image),
                &[("generator", json!(g.to_string())), ("automorphism", json!(auto))],
            )
        }
    }
}

fn ball_map(args: &MapArgs) -> Result<BallAffineMap, CliError> {
    let sig = PrimeSignature::new(args.n)?;
    Ok(BallAffineMap::new(&sig, args.u.clone(), args.beta.clone())?)
}

fn vertex(n: u64, args: &VertexArgs) -> Result<TreeVertex, CliError> {
    let sig = PrimeSignature::new(n)?;
    Ok(TreeVertex::new(&sig, args.h, &args.c))
}

fn write_dot(path: &Path, dot: &str) -> CliResult {
    fs::write(path, dot)?;
    Ok(())
}

fn run_tree(ctx: &mut Ctx, cmd: TreeCmd) -> CliResult {
    match cmd {
        TreeCmd::Act { map, vertex: va, dot, depth } => {
            let f = ball_map(&map)?;
            let v = vertex(map.n, &va)?;
            let w = f.act(&v);
            if let Some(path) = dot {
                let colour = if f.fixes(&v)? { Some(&f) } else { None };
                write_dot(&path, &dot_subtree(&v, depth, colour)?)?;
            }
            let value = json!({"map": f.to_string(), "vertex": v.to_json(), "image": w.to_json()});
            ctx.emit(&value, &table(&[("map", f.to_string()), ("vertex", v.to_string()), ("image", w.to_string())]))
        }
        TreeCmd::Orbit { map, vertex: va, level, dot } => {
            let f = ball_map(&map)?;
            let v = vertex(map.n, &va)?;
            let orbits = f.orbits_on_up(&v, level)?;
            if let Some(path) = dot {
                write_dot(&path, &dot_subtree(&v, level, Some(&f))?)?;
            }
            let transitive = orbits.len() == 1;
            let value = json!({
                "map": f.to_string(),
                "vertex": v.to_json(),
                "level": level,
                "orbits": orbits,
                "transitive": transitive,
            });
            let mut text = table(&[
                ("map", f.to_string()),
                ("vertex", v.to_string()),
                ("level", level.to_string()),
                ("orbits", orbits.len().to_string()),
                ("transitive", transitive.to_string()),
            ]);
            for o in &orbits {
                let labels: Vec<String> = o.iter().map(|x| x.to_string()).collect();
                text.push_str(&format!("  {{{}}}\n", labels.join(" ")));
            }
            ctx.emit(&value, &text)
        }
        TreeCmd::Axis { map, from, to } => {
            let f = ball_map(&map)?;
            let x = f.axis_point()?;
            if from > to {
                return Err(CliError::validation(format!("empty range {from}..={to}")));
            }
            let verts = (from..=to).map(|j| f.axis_vertex(j)).collect::<Result<Vec<_>, _>>()?;
            let value = json!({
                "map": f.to_string(),
                "axis_point": x.to_string(),
                "height_change": f.h(),
                "vertices": verts.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            });
            let mut text = table(&[("map", f.to_string()), ("axis point", x.to_string()), ("height change", f.h().to_string())]);
            for (j, v) in (from..).zip(&verts) {
                text.push_str(&format!("  {j:>3}  {v}\n"));
            }
            ctx.emit(&value, &text)
        }
        TreeCmd::Aeta { n, eta, depth } => {
            let sig = PrimeSignature::new(n)?;
            if depth == 0 {
                return Err(CliError::validation("depth must be at least 1"));
            }
            let modulus = sig.pow_int(depth);
            let residue = num_integer::Integer::mod_floor(&eta, &modulus);
            let a = build_aeta(&TruncatedNAdic::new(residue, depth, &sig)?)?;
            let relation = defining_relation_failure(&a);
            let value = json!({
                "n": n,
                "eta": eta.to_string(),
                "depth": depth,
                "levels": a.levels(),
                "relation_holds": relation.is_none(),
            });
            let mut text = table(&[("n", n.to_string()), ("eta", eta.to_string()), ("depth", depth.to_string())]);
            for i in 1..=depth {
                text.push_str(&format!("  level {i}: {}\n", a.cycle_notation(i)));
            }
            ctx.emit(&value, &text)
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_spec(args: &SpecArgs) -> Result<EmbeddingSpec, CliError> {
    let spec = match (&args.file, &args.s, args.m) {
        (Some(path), None, None) => EmbeddingSpec::from_json(&read_json(path)?)?,
        (None, Some(s), Some(m)) => {
            let (n, l) = args
                .n
                .zip(args.l)
                .ok_or_else(|| CliError::new(ErrorKind::Parse, "--s and --m need --n and --l"))?;
            make_phi(n, l, s, m)?
        }
        _ => return Err(CliError::new(ErrorKind::Parse, "give either --file or all of --n --l --s --m")),
    };
    if let Some(n) = args.n.filter(|&n| n != spec.n()) {
        return Err(CliError::validation(format!("--n {n} but the embedding has n = {}", spec.n())));
    }
    if let Some(l) = args.l.filter(|&l| l != spec.l()) {
        return Err(CliError::validation(format!("--l {l} but the embedding has l = {}", spec.l())));
    }
    Ok(spec)
}

fn classify_rows(c: &lattice::ClassifyResult) -> Vec<(&'static str, String)> {
    vec![
        ("s", c.s.to_string()),
        ("m", c.m.to_string()),
        ("h0", c.h0.to_string()),
        ("j", c.j.to_string()),
        ("k", c.k.to_string()),
        ("w0", c.w0.to_string()),
    ]
}

fn run_embed(ctx: &mut Ctx, cmd: EmbedCmd) -> CliResult {
    match cmd {
        EmbedCmd::Classify { spec } => {
            let c = classify(&load_spec(&spec)?)?;
            ctx.emit(&c.to_json(), &table(&classify_rows(&c)))
        }
        EmbedCmd::MakePhi { n, l, s, m } => {
            let spec = make_phi(n, l, &s, m)?;
            let v = spec.to_json();
            writeln!(ctx.out, "{}", serde_json::to_string_pretty(&v)?)?;
            Ok(())
        }
        EmbedCmd::Conjugate { spec, by, trials } => {
            let spec = load_spec(&spec)?;
            let before = classify(&spec)?;
            let sig = spec.signature().clone();
            let conjugators: Vec<ArithmeticIsometry> = match by {
                Some(path) => {
                    let wire: IsometryJson = serde_json::from_value(read_json(&path)?)?;
                    vec![ArithmeticIsometry::from_wire(&sig, &wire)?]
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
                    (0..trials.max(1)).map(|_| random_isometry(&mut rng, &sig, 4, 1000)).collect()
                }
            };
            let mut invariant = true;
            let mut last = spec.clone();
            for g in &conjugators {
                last = conjugate_spec(g, &spec)?;
                let after = classify(&last)?;
                invariant &= (&after.s, &after.m) == (&before.s, &before.m);
            }
            let value = json!({
                "trials": conjugators.len(),
                "seed": ctx.seed,
                "invariant": invariant,
                "classify": before.to_json(),
                "last_conjugator": conjugators.last().map(|g| serde_json::to_value(g.to_wire())).transpose()?,
                "last_embedding": last.to_json(),
            });
            let mut rows = classify_rows(&before);
            rows.push(("trials", conjugators.len().to_string()));
            rows.push(("invariant", invariant.to_string()));
            ctx.emit(&value, &table(&rows))?;
            if invariant {
                Ok(())
            } else {
                Err(CliError::new(ErrorKind::Internal, "classification changed under conjugation"))
            }
        }
        EmbedCmd::AutoEquiv { spec, other } => {
            let a = load_spec(&spec)?;
            let b = EmbeddingSpec::from_json(&read_json(&other)?)?;
            let conj = lattice::are_conjugate(&a, &b)?;
            let auto = lattice::are_automorphism_equivalent(&a, &b)?;
            let value = json!({"conjugate": conj, "automorphism_equivalent": auto});
            ctx.emit(&value, &table(&[("conjugate", conj.to_string()), ("automorphism equivalent", auto.to_string())]))
        }
        EmbedCmd::Validate { spec } => {
            let spec = load_spec(&spec)?;
            let violations = validate(&spec);
            let value = json!({
                "valid": violations.is_empty(),
                "violations": violations
                    .iter()
                    .map(|v| json!({"code": v.code(), "message": v.to_string()}))
                    .collect::<Vec<_>>(),
            });
            let mut text = table(&[("valid", violations.is_empty().to_string())]);
            for v in &violations {
                text.push_str(&format!("  {v}\n"));
            }
            ctx.emit(&value, &text)?;
            match violations.first() {
                None => Ok(()),
                Some(v) => Err(CliError::validation(v.to_string())),
            }
        }
        EmbedCmd::Straighten { spec, depth, window, dot } => {
            let spec = load_spec(&spec)?;
            let map = straighten(&spec, depth, window)?;
            if let Some(path) = dot {
                let root = TreeVertex::root(spec.n());
                write_dot(&path, &dot_subtree(&root, depth.min(4), Some(spec.img_a().tree()))?)?;
            }
            let value = json!({
                "depth": depth,
                "window": window,
                "vertices": map.len(),
                "height_change": map.height_change(),
                "map": map.to_json(),
            });
            let mut text = table(&[
                ("depth", depth.to_string()),
                ("window", window.to_string()),
                ("vertices", map.len().to_string()),
            ]);
            for (v, w) in map.iter().take(16) {
                text.push_str(&format!("  {v} -> {w}\n"));
            }
            if map.len() > 16 {
                text.push_str(&format!("  ... {} more\n", map.len() - 16));
            }
            ctx.emit(&value, &text)
        }
    }
}

fn quotient_out(ctx: &mut Ctx, q: &QuotientData, covol: &Rational) -> CliResult {
    let value = json!({"quotient": q.to_json(), "covolume": covol.to_string()});
    let mut text = table(&[("covolume", covol.to_string()), ("orbits", q.entries().len().to_string())]);
    for e in q.entries() {
        text.push_str(&format!("  rep {}  a = {}  h = {}  stab0 = {}\n", e.rep, e.a_v, e.h_v, e.stab0));
    }
    ctx.emit(&value, &text)
}

fn run_covol(ctx: &mut Ctx, cmd: CovolCmd) -> CliResult {
    match cmd {
        CovolCmd::FromQuotient { n, file } => {
            let sig = PrimeSignature::new(n)?;
            let q = QuotientData::from_json(&sig, &read_json(&file)?)?;
            let c = covolume_from_quotient(&q, n)?;
            quotient_out(ctx, &q, &c)
        }
        CovolCmd::Enumerate { spec } => {
            let spec = load_spec(&spec)?;
            let q = enumerate_quotient(&spec)?;
            let c = covolume_from_quotient(&q, spec.n())?;
            quotient_out(ctx, &q, &c)
        }
    }
}

fn run_present(ctx: &mut Ctx, cmd: PresentCmd) -> CliResult {
    let PresentCmd::Verify { case, n, l, m_ref } = cmd;
    let kind = match case {
        1 => CaseKind::One,
        2 => CaseKind::Two,
        3 => CaseKind::Three { m_ref },
        other => return Err(CliError::validation(format!("case must be 1, 2 or 3, got {other}"))),
    };
    let full = build_full_lattice(PresentationCase { kind, n, l })?;
    let mut rows = Vec::new();
    let mut all = true;
    for r in &full.relators {
        let value = evaluate_relator(&full.generators, r)?;
        all &= value.is_identity();
        rows.push((format_pres_word(r), value.is_identity(), value.to_string()));
    }
    let value = json!({
        "case": case,
        "n": n,
        "l": l,
        "generators": full.generators.iter().map(|(c, g)| json!({"name": c.to_string(), "isometry": g.to_string()})).collect::<Vec<_>>(),
        "relators": rows.iter().map(|(w, ok, v)| json!({"word": w, "identity": ok, "value": v})).collect::<Vec<_>>(),
        "y": full.y.as_ref().map(int_json),
        "y_printed": full.y_printed.as_ref().map(int_json),
        "verified": all,
    });
    let mut text = String::new();
    for (c, g) in &full.generators {
        text.push_str(&format!("{c} = {g}\n"));
    }
    for (w, ok, v) in &rows {
        text.push_str(&format!("  {w:<24} {}  {v}\n", if *ok { "ok  " } else { "FAIL" }));
    }
    if let (Some(y), Some(p)) = (&full.y, &full.y_printed) {
        text.push_str(&format!("y by composition = {y}, printed value = {p}\n"));
    }
    text.push_str(&format!("verified {all}\n"));
    ctx.emit(&value, &text)?;
    if all {
        Ok(())
    } else {
        Err(CliError::validation("some relator is not the identity"))
    }
}

fn report_out(ctx: &mut Ctx, reports: &[LemmaReport]) -> CliResult {
    let value = if reports.len() == 1 {
        reports[0].to_json()
    } else {
        Value::Array(reports.iter().map(|r| r.to_json()).collect())
    };
    let text = reports.iter().map(|r| r.to_table()).collect::<Vec<_>>().join("\n");
    ctx.emit(&value, &text)
}

fn run_lab(ctx: &mut Ctx, cmd: LabCmd) -> CliResult {
    match cmd {
        LabCmd::CountHk { n, k } => report_out(ctx, &[lab::count_hk_report(n, k)?]),
        LabCmd::Centralizer { n, k, m } => report_out(ctx, &[lab::centralizer_bound_report(n, k, m)?]),
        LabCmd::TransSearch { n, beta, l, base, bound } => {
            let sig = PrimeSignature::new(n)?;
            let w = lab::eventually_transitive_search(&beta, l, base, bound, &sig)?;
            let value = json!({
                "n": n,
                "beta": beta.to_string(),
                "l": l,
                "base": base,
                "k": w.k,
                "j": int_json(&w.j),
                "certified_levels": w.certified_levels,
            });
            ctx.emit(
                &value,
                &table(&[
                    ("beta", beta.to_string()),
                    ("k", w.k.to_string()),
                    ("j", w.j.to_string()),
                    ("certified levels", w.certified_levels.to_string()),
                ]),
            )
        }
        LabCmd::LevelSum { n, gamma, a_v, depth } => {
            let sig = PrimeSignature::new(n)?;
            report_out(ctx, &[lab::level_sum_check(&gamma, &a_v, depth, &sig)?])
        }
        LabCmd::JordanIndex { n, k, m_from, m_to } => report_out(ctx, &lab::jordan_index_report(n, k, m_from..=m_to)?),
    }
}

//! The `mvmt` command line.
//!
//! Exit codes: 0 on success (or when the checked relation holds), 3 when the
//! relation fails or a closure check finds a counterexample, 2 on usage
//! errors, 1 on any other error (unreadable or invalid input included).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use mvmt_core::backforth::{
    describe_iso, describe_map, describe_step, find_system_fixed_with_cap, find_system_mixed,
    MixedOptions, DEFAULT_CANDIDATE_CAP,
};
use mvmt_core::bridge::{
    canonical_sentence, gaifman_graph, n_core_bounded, n_maps_to, separating_sentence, translate,
    tree_depth_with_cap, CanonicalStyle, Graph, NMapOutcome, TREE_DEPTH_CAP,
};
use mvmt_core::fixtures::{self, UlVariant};
use mvmt_core::language::{
    enumerate_positive, enumerate_sentences, parse_formula, EnumBounds, PositiveBounds,
    DEFAULT_ENUM_CAP,
};
use mvmt_core::morphisms::{find_morphisms, MorphismOptions};
use mvmt_core::preservation::{
    check_closure, verify_counterexample, ClosureOptions, ReplayOptions, ReplayStatus,
};
use mvmt_core::semantics::sentence_value;
use mvmt_core::structure::{GenMode, GenOptions};
use mvmt_core::{
    ConnectiveSignature, InterpretingLattice, Label, MorphismKind, MorphismWitness, PModel,
    PredicateLanguage, SearchMode, SentenceClass,
};

use crate::format::{parse_algebra, parse_graph, parse_model, write_algebra, write_graph, write_model, FormatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILS: i32 = 3;

/// Built-in models accepted wherever a model file is expected.
pub const BUILTIN_MODELS: [&str; 7] = [
    "prime-m1",
    "prime-m2",
    "ul-m1",
    "ul-m2",
    "ul-original-m1",
    "ul-original-m2",
    "min-cut",
];

const MODEL_HELP: &str = "model file, or a built-in: prime-m1 prime-m2 ul-m1 ul-m2 ul-original-m1 ul-original-m2 min-cut";

#[derive(Parser, Debug)]
#[command(name = "mvmt", version, about = "Finite many-valued model theory over interpreting lattices")]
struct Cli {
    /// Print `key=value` lines instead of `key: value`.
    #[arg(long, global = true)]
    kv: bool,
    /// Override enumeration and search caps.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Seed for sampling modes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Proto,
    Hom,
    Mono,
    Strong,
}

impl From<KindArg> for MorphismKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Proto => MorphismKind::Proto,
            KindArg::Hom => MorphismKind::Hom,
            KindArg::Mono => MorphismKind::Mono,
            KindArg::Strong => MorphismKind::Strong,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StyleArg {
    Flat,
    Td,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum BfMode {
    Fixed,
    Mixed,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Load and validate an algebra (file or built-in name).
    Algebra {
        algebra: String,
        /// Print the algebra in file form.
        #[arg(long)]
        emit: bool,
    },
    /// Evaluate a sentence in a model.
    Eval {
        /// Algebra to use instead of the one the model file names.
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, help = MODEL_HELP)]
        model: String,
        #[arg(long)]
        formula: String,
    },
    /// Search morphisms between two models.
    Morph {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, help = MODEL_HELP)]
        from: String,
        #[arg(long, help = MODEL_HELP)]
        to: String,
        /// List every witness.
        #[arg(long)]
        all: bool,
        /// Print the number of witnesses.
        #[arg(long)]
        count: bool,
        /// Also require algebra maps to send the filter into the filter.
        #[arg(long)]
        filter_preserving: bool,
    },
    /// Threshold a model at its filter (the Boolean translation).
    Translate {
        #[arg(help = MODEL_HELP)]
        model: String,
    },
    /// Gaifman graph of a model, as an edge list.
    Gaifman {
        #[arg(help = MODEL_HELP)]
        model: String,
    },
    /// Tree-depth of a model's Gaifman graph or of an edge-list file.
    Treedepth {
        #[arg(help = MODEL_HELP)]
        model: Option<String>,
        #[arg(long, conflicts_with = "model")]
        graph: Option<PathBuf>,
    },
    /// Canonical sentence of a model's Boolean translation.
    Canonical {
        #[arg(long, value_enum, default_value = "td")]
        style: StyleArg,
        #[arg(help = MODEL_HELP)]
        model: String,
    },
    /// Bounded check of "M n-protomorphically maps to N".
    Nmap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: usize,
        from: String,
        to: String,
    },
    /// Smallest bounded n-core of a model.
    Ncore {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: usize,
        model: String,
    },
    /// Existential-positive sentence true in every listed model, built from n-cores.
    Separate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bound: usize,
        #[arg(required = true)]
        models: Vec<String>,
    },
    /// Back-and-forth system of length n between two models.
    Bf {
        #[arg(long, value_enum, default_value = "fixed")]
        mode: BfMode,
        #[arg(long)]
        n: usize,
        /// Mixed mode: largest domain of the algebra part.
        #[arg(long)]
        fragment_bound: Option<usize>,
        /// Mixed mode: do not require the algebra part to respect the filter.
        #[arg(long)]
        ignore_filter: bool,
        left: String,
        right: String,
    },
    /// Check closure of a sentence under a morphism kind over generated models.
    Preserve {
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value = "proto")]
        kind: KindArg,
        /// Comma-separated algebras (files or built-in names).
        #[arg(long, value_delimiter = ',', required = true)]
        algebras: Vec<String>,
        #[arg(long)]
        max_domain: usize,
        /// Language such as `R:2 P:1`; read off the formula when absent.
        #[arg(long)]
        language: Option<String>,
        /// Sample this many models per domain size instead of enumerating.
        #[arg(long)]
        sample: Option<usize>,
        /// Keep searching after the first counterexample.
        #[arg(long)]
        all: bool,
        /// Where counterexample model files go.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Replay the worked examples shipped as fixtures.
    Replay {
        /// The parameter of the min-cut algebra.
        #[arg(long, default_value = "1/2")]
        alpha: String,
        /// Use the unrepaired values of the uninorm example.
        #[arg(long)]
        ul_original: bool,
    },
    /// Enumerate sentences within bounds.
    Enumerate {
        /// Language such as `R:2 P:1`.
        #[arg(long)]
        language: String,
        #[arg(long, default_value = "boolean")]
        algebra: String,
        /// Quantifier depth.
        #[arg(long, default_value_t = 1)]
        qd: usize,
        /// Distinct variables (defaults to the quantifier depth).
        #[arg(long)]
        vars: Option<usize>,
        /// Connectives per sentence.
        #[arg(long, default_value_t = 1)]
        connectives: usize,
        /// Bound nested rank instead of depth and connectives.
        #[arg(long)]
        nr: Option<usize>,
        /// Enumerate one existential-positive class in prenex form
        /// (and-primitive, e-and-p, conj-primitive, primitive-positive, e-conj-p, e-p).
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = 2)]
        clauses: usize,
        #[arg(long, default_value_t = 2)]
        clause_len: usize,
        #[arg(long, default_value_t = 2)]
        disjuncts: usize,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
}

enum Failure {
    Usage(String),
    Error(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

struct Out<'a> {
    w: &'a mut dyn Write,
    kv: bool,
}

impl Out<'_> {
    fn field(&mut self, key: &str, value: impl Display) -> std::io::Result<()> {
        if self.kv {
            writeln!(self.w, "{key}={value}")
        } else {
            writeln!(self.w, "{key}: {value}")
        }
    }

    fn raw(&mut self, text: &str) -> std::io::Result<()> {
        self.w.write_all(text.as_bytes())
    }
}

/// Runs the command line `args` (including the program name), writing the
/// report to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut o = Out { w: out, kv: cli.kv };
    match dispatch(&cli, &mut o) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Error(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: &Cli, o: &mut Out) -> Outcome {
    match &cli.cmd {
        Cmd::Algebra { algebra, emit } => cmd_algebra(o, algebra, *emit),
        Cmd::Eval {
            algebra,
            model,
            formula,
        } => cmd_eval(o, algebra.as_deref(), model, formula),
        Cmd::Morph {
            kind,
            from,
            to,
            all,
            count,
            filter_preserving,
        } => cmd_morph(o, (*kind).into(), from, to, *all, *count, *filter_preserving),
        Cmd::Translate { model } => {
            let m = load_model(model, None)?;
            o.raw(&write_model(&translate(&m), "boolean"))?;
            Ok(EXIT_OK)
        }
        Cmd::Gaifman { model } => {
            let m = load_model(model, None)?;
            o.raw(&write_graph(&gaifman_graph(&m)))?;
            Ok(EXIT_OK)
        }
        Cmd::Treedepth { model, graph } => cmd_treedepth(o, cli.cap, model.as_deref(), graph.as_deref()),
        Cmd::Canonical { style, model } => {
            let m = load_model(model, None)?;
            let style = match style {
                StyleArg::Flat => CanonicalStyle::Flat,
                StyleArg::Td => CanonicalStyle::TdOptimal,
            };
            let theta = canonical_sentence(&translate(&m), style)?;
            o.field("style", style.keyword())?;
            o.field("sentence", &theta)?;
            o.field("quantifier-depth", theta.quantifier_depth())?;
            Ok(EXIT_OK)
        }
        Cmd::Nmap { n, bound, from, to } => {
            let (m, t) = (load_model(from, None)?, load_model(to, None)?);
            match n_maps_to(&m, &t, *n, *bound)? {
                NMapOutcome::HoldsUpToBound { bound } => {
                    o.field("holds", "true")?;
                    o.field("checked-up-to", bound)?;
                    Ok(EXIT_OK)
                }
                NMapOutcome::Refuted(c) => {
                    o.field("holds", "false")?;
                    o.raw(&write_model(&c, "boolean"))?;
                    Ok(EXIT_FAILS)
                }
            }
        }
        Cmd::Ncore { n, bound, model } => {
            let m = load_model(model, None)?;
            match n_core_bounded(&m, *n, *bound)? {
                Some(c) => {
                    o.field("found", "true")?;
                    o.field("size", c.size())?;
                    o.raw(&write_model(&c, "boolean"))?;
                    Ok(EXIT_OK)
                }
                None => {
                    o.field("found", "false")?;
                    Ok(EXIT_FAILS)
                }
            }
        }
        Cmd::Separate { n, bound, models } => {
            let ms = models
                .iter()
                .map(|m| load_model(m, None))
                .collect::<Result<Vec<_>, _>>()?;
            let psi = separating_sentence(&ms, *n, *bound)?;
            o.field("sentence", &psi)?;
            Ok(EXIT_OK)
        }
        Cmd::Bf {
            mode,
            n,
            fragment_bound,
            ignore_filter,
            left,
            right,
        } => cmd_bf(o, cli.cap, *mode, *n, *fragment_bound, *ignore_filter, left, right),
        Cmd::Preserve {
            formula,
            kind,
            algebras,
            max_domain,
            language,
            sample,
            all,
            out_dir,
        } => cmd_preserve(
            o,
            cli,
            PreserveArgs {
                formula,
                kind: (*kind).into(),
                algebras,
                max_domain: *max_domain,
                language: language.as_deref(),
                sample: *sample,
                all: *all,
                out_dir,
            },
        ),
        Cmd::Replay { alpha, ul_original } => cmd_replay(o, alpha, *ul_original),
        Cmd::Enumerate {
            language,
            algebra,
            qd,
            vars,
            connectives,
            nr,
            class,
            clauses,
            clause_len,
            disjuncts,
            count_only,
        } => {
            let lang: PredicateLanguage = language.parse()?;
            let alg = resolve_algebra(algebra, None)?;
            let cap = cli.cap.unwrap_or(DEFAULT_ENUM_CAP);
            let sentences = match class {
                Some(tag) => {
                    let class = SentenceClass::from_tag(tag)
                        .filter(|c| *c != SentenceClass::None)
                        .ok_or_else(|| Failure::Usage(format!("unknown class `{tag}`")))?;
                    let bounds = PositiveBounds {
                        max_vars: *qd,
                        max_clauses: *clauses,
                        max_clause_len: *clause_len,
                        max_disjuncts: *disjuncts,
                        cap,
                    };
                    enumerate_positive(&lang, class, &bounds)?
                }
                None => {
                    let bounds = match nr {
                        Some(nr) => EnumBounds::nested_rank(*nr, vars.unwrap_or(nr / 3)),
                        None => EnumBounds::new(*qd, vars.unwrap_or(*qd), *connectives),
                    };
                    enumerate_sentences(&lang, &alg.signature(), &bounds.with_cap(cap))?
                }
            };
            if !count_only {
                for s in &sentences {
                    writeln!(o.w, "{s}")?;
                }
            }
            o.field("count", sentences.len())?;
            Ok(EXIT_OK)
        }
    }
}

// ---------------------------------------------------------------------------
// Loading

/// A built-in algebra name, else a path (relative paths are taken from
/// `base` when given).
pub fn resolve_algebra(token: &str, base: Option<&Path>) -> Result<Arc<InterpretingLattice>, FormatError> {
    if let Some(a) = fixtures::by_name(token) {
        return Ok(Arc::new(a));
    }
    let path = match base {
        Some(b) if Path::new(token).is_relative() => b.join(token),
        _ => PathBuf::from(token),
    };
    if !path.exists() {
        return Err(FormatError::UnknownAlgebra(token.to_string()));
    }
    Ok(Arc::new(parse_algebra(&read(&path)?)?))
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn builtin_model(name: &str) -> Option<PModel> {
    Some(match name {
        "prime-m1" => fixtures::prime_requirement_models().0,
        "prime-m2" => fixtures::prime_requirement_models().1,
        "ul-m1" => fixtures::ul_models(UlVariant::Repaired).0,
        "ul-m2" => fixtures::ul_models(UlVariant::Repaired).1,
        "ul-original-m1" => fixtures::ul_models(UlVariant::Original).0,
        "ul-original-m2" => fixtures::ul_models(UlVariant::Original).1,
        "min-cut" => fixtures::min_cut_model(mvmt_core::Rational::new(1, 2)).ok()?,
        _ => return None,
    })
}

/// A built-in model name or a model file; `algebra` replaces the algebra the
/// file names.
pub fn load_model(arg: &str, algebra: Option<Arc<InterpretingLattice>>) -> Result<PModel, FormatError> {
    if let Some(m) = builtin_model(arg) {
        return Ok(m);
    }
    let path = Path::new(arg);
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf);
    parse_model(&text, &mut |tok| match &algebra {
        Some(a) => Ok(a.clone()),
        None => resolve_algebra(tok, base.as_deref()),
    })
}

// ---------------------------------------------------------------------------
// Commands

fn tokens(alg: &InterpretingLattice, elems: impl Iterator<Item = mvmt_core::Elem>) -> String {
    elems.map(|e| alg.label(e).text().to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_algebra(o: &mut Out, token: &str, emit: bool) -> Outcome {
    let alg = resolve_algebra(token, None)?;
    if emit {
        o.raw(&write_algebra(&alg))?;
        return Ok(EXIT_OK);
    }
    o.field("algebra", alg.name())?;
    o.field("size", alg.size())?;
    o.field("carrier", tokens(&alg, alg.elements()))?;
    o.field("order", if alg.is_chain() { "chain" } else { "lattice" })?;
    o.field("bottom", alg.label(alg.bottom()))?;
    o.field("top", alg.label(alg.top()))?;
    o.field("filter", tokens(&alg, alg.filter()))?;
    let ops: Vec<String> = alg
        .ops()
        .iter()
        .map(|op| format!("{}/{}={}", op.name(), op.arity(), op.rule().keyword()))
        .collect();
    o.field("ops", ops.join(" "))?;
    if alg.conj_index().is_some() {
        match alg.conj_unit() {
            Ok(u) => o.field("conj-unit", alg.label(u))?,
            Err(_) => o.field("conj-unit", "none")?,
        }
        if let Ok(integral) = alg.is_integral() {
            o.field("integral", integral)?;
        }
        let law = alg.check_strong_conj_filter_law()?;
        match law.first() {
            None => o.field("conj-filter-law", "pass")?,
            Some(v) => {
                o.field("conj-filter-law", "fail")?;
                o.field("conj-filter-violations", law.violations.len())?;
                o.field(
                    "conj-filter-first",
                    format!(
                        "{} & {} = {}",
                        alg.label(v.a),
                        alg.label(v.b),
                        alg.label(v.product)
                    ),
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_eval(o: &mut Out, algebra: Option<&str>, model: &str, formula: &str) -> Outcome {
    let alg = algebra.map(|a| resolve_algebra(a, None)).transpose()?;
    if alg.is_some() && builtin_model(model).is_some() {
        return Err(Failure::Usage("--algebra applies to model files only".into()));
    }
    let m = load_model(model, alg)?;
    let f = parse_formula(formula, m.language(), &m.algebra().signature())?;
    f.require_sentence()?;
    let v = sentence_value(&m, &f)?;
    let valid = m.algebra().in_filter(v);
    o.field("formula", &f)?;
    o.field("value", m.algebra().label(v))?;
    o.field("valid", valid)?;
    Ok(if valid { EXIT_OK } else { EXIT_FAILS })
}

fn render_witness(w: &MorphismWitness, m: &PModel, n: &PModel) -> String {
    let g: Vec<String> = w
        .g
        .iter()
        .enumerate()
        .map(|(x, &y)| format!("{}->{}", m.domain()[x], n.domain()[y]))
        .collect();
    let mut s = format!("g={{{}}}", g.join(", "));
    if let Some(f) = &w.f {
        let (a, b) = (m.algebra(), n.algebra());
        let f: Vec<String> = f
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", a.label(mvmt_core::Elem::from_index(x)), b.label(y)))
            .collect();
        s.push_str(&format!(" f={{{}}}", f.join(", ")));
    }
    s
}

fn cmd_morph(
    o: &mut Out,
    kind: MorphismKind,
    from: &str,
    to: &str,
    all: bool,
    count: bool,
    filter_preserving: bool,
) -> Outcome {
    let (m, n) = (load_model(from, None)?, load_model(to, None)?);
    let mode = if all {
        SearchMode::All
    } else if count {
        SearchMode::Count
    } else {
        SearchMode::First
    };
    let opts = MorphismOptions {
        require_filter_preservation: filter_preserving,
    };
    let found = find_morphisms(kind, &m, &n, mode, &opts)?;
    let exists = found.exists();
    o.field("kind", kind)?;
    o.field("from", m.name())?;
    o.field("to", n.name())?;
    o.field("exists", exists)?;
    if all || count {
        o.field("count", found.count)?;
    }
    if mode != SearchMode::Count {
        for w in &found.witnesses {
            o.field("witness", render_witness(w, &m, &n))?;
        }
    }
    Ok(if exists { EXIT_OK } else { EXIT_FAILS })
}

fn cmd_treedepth(o: &mut Out, cap: Option<usize>, model: Option<&str>, graph: Option<&Path>) -> Outcome {
    let g: Graph = match (model, graph) {
        (Some(m), None) => gaifman_graph(&load_model(m, None)?),
        (None, Some(p)) => parse_graph(&read(p)?)?,
        _ => return Err(Failure::Usage("give a model or --graph FILE".into())),
    };
    let (td, forest) = tree_depth_with_cap(&g, cap.unwrap_or(TREE_DEPTH_CAP))?;
    o.field("vertices", g.len())?;
    o.field("edges", g.edges().len())?;
    o.field("tree-depth", td)?;
    for v in 0..g.len() {
        let parent = forest.parent[v].map_or("-", |p| g.label(p));
        o.field(
            "node",
            format!("{} level={} parent={}", g.label(v), forest.level[v], parent),
        )?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bf(
    o: &mut Out,
    cap: Option<usize>,
    mode: BfMode,
    n: usize,
    fragment_bound: Option<usize>,
    ignore_filter: bool,
    left: &str,
    right: &str,
) -> Outcome {
    let (m, t) = (load_model(left, None)?, load_model(right, None)?);
    let cap = cap.unwrap_or(DEFAULT_CANDIDATE_CAP);
    let join = |v: Vec<usize>| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
    let exists = match mode {
        BfMode::Fixed => {
            let r = find_system_fixed_with_cap(&m, &t, n, cap)?;
            o.field("mode", "fixed")?;
            o.field("n", n)?;
            o.field("exists", r.exists())?;
            o.field("levels", join(r.level_sizes()))?;
            if let Some(ob) = &r.obstruction {
                o.field("obstruction-level", ob.level)?;
                o.field("obstruction-map", describe_map(&ob.map, &m, &t))?;
                o.field("obstruction-step", describe_step(ob.step, &m, &t))?;
            }
            r.exists()
        }
        BfMode::Mixed => {
            let opts = MixedOptions {
                fragment_bound,
                respect_filter: !ignore_filter,
                cap,
            };
            let r = find_system_mixed(&m, &t, n, &opts)?;
            o.field("mode", "mixed")?;
            o.field("n", n)?;
            o.field("exists", r.exists())?;
            o.field("levels", join(r.level_sizes()))?;
            if let Some(ob) = &r.obstruction {
                o.field("obstruction-level", ob.level)?;
                o.field("obstruction-map", describe_iso(&ob.map, &m, &t))?;
                o.field("obstruction-step", describe_step(ob.step, &m, &t))?;
            }
            r.exists()
        }
    };
    Ok(if exists { EXIT_OK } else { EXIT_FAILS })
}

struct PreserveArgs<'a> {
    formula: &'a str,
    kind: MorphismKind,
    algebras: &'a [String],
    max_domain: usize,
    language: Option<&'a str>,
    sample: Option<usize>,
    all: bool,
    out_dir: &'a Path,
}

fn cmd_preserve(o: &mut Out, cli: &Cli, a: PreserveArgs) -> Outcome {
    let pool: Vec<(String, Arc<InterpretingLattice>)> = a
        .algebras
        .iter()
        .map(|t| resolve_algebra(t, None).map(|alg| (t.clone(), alg)))
        .collect::<Result<_, _>>()?;
    let sig = pool[0].1.signature();
    let lang: PredicateLanguage = match a.language {
        Some(l) => l.parse()?,
        None => infer_language(a.formula, &sig).map_err(Failure::Usage)?,
    };
    let lang = Arc::new(lang);
    let f = parse_formula(a.formula, &lang, &sig)?;
    f.require_sentence()?;
    let mut generation = match a.sample {
        Some(count) => GenOptions::sample(a.max_domain, count, cli.seed),
        None => GenOptions::exhaustive(a.max_domain),
    };
    if let (Some(cap), GenMode::Exhaustive { .. }) = (cli.cap, generation.mode) {
        generation.mode = GenMode::Exhaustive { cap };
    }
    let opts = ClosureOptions {
        generation,
        collect_all: a.all,
        morphisms: MorphismOptions::default(),
    };
    let algs: Vec<Arc<InterpretingLattice>> = pool.iter().map(|(_, a)| a.clone()).collect();
    let report = check_closure(&f, &lang, a.kind, &algs, &opts)?;
    o.field("formula", &f)?;
    o.field("kind", a.kind)?;
    o.field("algebras", a.algebras.join(","))?;
    o.field("max-domain", a.max_domain)?;
    o.field("models", report.models)?;
    o.field("pairs-searched", report.pairs_searched)?;
    o.field("closed", format!("{} (up to bounds)", report.closed()))?;
    if report.closed() {
        return Ok(EXIT_OK);
    }
    std::fs::create_dir_all(a.out_dir).map_err(|source| FormatError::Io {
        path: a.out_dir.display().to_string(),
        source,
    })?;
    let token_of = |m: &PModel| -> String {
        pool.iter()
            .find(|(_, alg)| **alg == *m.algebra())
            .map_or_else(|| m.algebra().name().to_string(), |(t, _)| t.clone())
    };
    for (i, c) in report.counterexamples.iter().enumerate() {
        let ok = verify_counterexample(&f, c, &opts.morphisms)?;
        o.field(
            "counterexample",
            format!(
                "{} -> {} {} verified={}",
                c.source.name(),
                c.target.name(),
                render_witness(&c.witness, &c.source, &c.target),
                ok
            ),
        )?;
        for (role, m) in [("source", &c.source), ("target", &c.target)] {
            let path = a.out_dir.join(format!("cex{}-{}.model", i + 1, role));
            std::fs::write(&path, write_model(m, &token_of(m))).map_err(|source| FormatError::Io {
                path: path.display().to_string(),
                source,
            })?;
            o.field("wrote", path.display())?;
        }
    }
    Ok(EXIT_FAILS)
}

fn cmd_replay(o: &mut Out, alpha: &str, ul_original: bool) -> Outcome {
    let alpha = Label::parse(alpha)
        .value()
        .ok_or_else(|| Failure::Usage(format!("--alpha must be a rational, got `{alpha}`")))?;
    let opts = ReplayOptions {
        alpha,
        ul_variant: if ul_original {
            UlVariant::Original
        } else {
            UlVariant::Repaired
        },
    };
    let report = mvmt_core::preservation::replay_paper_examples(&opts)?;
    for item in &report.items {
        if o.kv {
            writeln!(o.w, "{}={}", item.name, item.status.keyword())?;
        } else {
            writeln!(o.w, "{:<12} {}: {}", item.status.keyword(), item.name, item.detail)?;
        }
    }
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for item in &report.items {
        *tally.entry(item.status.keyword()).or_default() += 1;
    }
    let summary: Vec<String> = tally.iter().map(|(k, v)| format!("{k}={v}")).collect();
    o.field("summary", summary.join(" "))?;
    let drift = report.items.iter().any(|i| i.status == ReplayStatus::Fail);
    o.field("drift", drift)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAILS })
}

/// Reads predicate symbols and arities off a formula: identifiers applied to
/// an argument list, and bare identifiers that are neither keywords, bound
/// variables nor connectives of `sig`.
pub fn infer_language(text: &str, sig: &ConnectiveSignature) -> Result<PredicateLanguage, String> {
    #[derive(PartialEq)]
    enum T {
        Word(String),
        Open,
        Close,
        Comma,
        Quant,
        Other,
    }
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    w.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            toks.push(match w.as_str() {
                "exists" | "forall" => T::Quant,
                "and" | "or" => T::Other,
                _ => T::Word(w),
            });
            continue;
        }
        chars.next();
        if c.is_whitespace() {
            continue;
        }
        toks.push(match c {
            '(' => T::Open,
            ')' => T::Close,
            ',' => T::Comma,
            '∃' | '∀' => T::Quant,
            _ => T::Other,
        });
    }
    let mut preds: BTreeMap<String, usize> = BTreeMap::new();
    let mut record = |name: &str, arity: usize| -> Result<(), String> {
        match preds.insert(name.to_string(), arity) {
            Some(a) if a != arity => Err(format!("`{name}` used with arities {a} and {arity}")),
            _ => Ok(()),
        }
    };
    let mut i = 0;
    while i < toks.len() {
        match &toks[i] {
            T::Quant => i += 2,
            T::Word(w) if !sig.contains(w) => {
                if toks.get(i + 1) == Some(&T::Open) {
                    let mut j = i + 2;
                    let mut arity = 0;
                    while j < toks.len() && toks[j] != T::Close {
                        if let T::Word(_) = toks[j] {
                            arity += 1;
                        }
                        j += 1;
                    }
                    record(w, arity)?;
                    i = j + 1;
                } else {
                    record(w, 0)?;
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }
    if preds.is_empty() {
        return Err("no predicate symbols in the formula; pass --language".into());
    }
    PredicateLanguage::new(preds).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_arities() {
        let sig = fixtures::boolean().signature();
        let l = infer_language("exists x. exists y. R(x,y) & P(y) or T", &sig).unwrap();
        assert_eq!(l.arity("R"), Some(2));
        assert_eq!(l.arity("P"), Some(1));
        assert_eq!(l.arity("T"), Some(0));
        assert_eq!(l.len(), 3);
        assert!(infer_language("exists x. R(x) and R(x,x)", &sig).is_err());
        assert!(infer_language("∃x. ∀y. S(x, y)", &sig).unwrap().arity("S") == Some(2));
    }
}

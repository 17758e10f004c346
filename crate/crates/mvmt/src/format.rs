//! Line-oriented text formats for algebras, models and graphs.
//!
//! All three share the same conventions: UTF-8, one directive per line,
//! `#` starts a comment, blank lines are ignored. The writers emit a form
//! that the readers load back to an equal value.

use std::fmt::Write as _;
use std::sync::Arc;

use mvmt_core::algebra::{AlgebraBuilder, FilterSpec, OpSpec, OrderSpec};
use mvmt_core::bridge::Graph;
use mvmt_core::{
    AlgebraError, AlgebraKind, InterpretingLattice, LanguageError, OpRule, PModel,
    PredicateLanguage, StructureError,
};
use mvmt_core::structure::PModelBuilder;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

fn perr(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn split_keyword(l: &str) -> (&str, &str) {
    match l.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (l, ""),
    }
}

// ---------------------------------------------------------------------------
// Algebras

/// Parses an algebra file.
///
/// ```text
/// algebra four-boolean
/// carrier bot a b top
/// order table
/// leq bot a
/// leq bot b
/// leq a top
/// leq b top
/// filter set b top
/// ```
///
/// Beyond the basic directives, `op` accepts the closed-form rules
/// `lukasiewicz`, `product` and `uninorm` on rational chains, `unit <op> <e>`
/// declares (and cross-checks) the unit of a binary operation, and `join` and
/// `meet` may be omitted when an order is declared.
pub fn parse_algebra(text: &str) -> Result<InterpretingLattice, FormatError> {
    let mut name: Option<String> = None;
    let mut carrier: Option<Vec<String>> = None;
    let mut order = OrderSpec::FromMeet;
    let mut in_table_order = false;
    let mut ops: Vec<OpSpec> = Vec::new();
    let mut filter: Option<FilterSpec> = None;
    let mut units: Vec<(String, String)> = Vec::new();

    for (n, l) in lines(text) {
        let (kw, rest) = split_keyword(l);
        let words: Vec<&str> = rest.split_whitespace().collect();
        match kw {
            "algebra" => {
                if name.is_some() {
                    return Err(perr(n, "second `algebra` line"));
                }
                if words.len() != 1 {
                    return Err(perr(n, "expected `algebra <name>`"));
                }
                name = Some(words[0].to_string());
            }
            "carrier" => {
                if carrier.is_some() {
                    return Err(perr(n, "second `carrier` line"));
                }
                if words.is_empty() {
                    return Err(perr(n, "empty carrier"));
                }
                carrier = Some(words.iter().map(|w| w.to_string()).collect());
            }
            "order" => match words.as_slice() {
                ["chain"] => {
                    order = OrderSpec::Chain;
                    in_table_order = false;
                }
                ["table"] => {
                    order = OrderSpec::Pairs(Vec::new());
                    in_table_order = true;
                }
                _ => return Err(perr(n, "expected `order chain` or `order table`")),
            },
            "leq" => {
                if !in_table_order {
                    return Err(perr(n, "`leq` outside an `order table` block"));
                }
                let [a, b] = words.as_slice() else {
                    return Err(perr(n, "expected `leq <a> <b>`"));
                };
                if let OrderSpec::Pairs(p) = &mut order {
                    p.push((a.to_string(), b.to_string()));
                }
            }
            "op" => {
                let (head, rule) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(n, "expected `op <name> <arity> = <rule>`"))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                let [op, arity] = head.as_slice() else {
                    return Err(perr(n, "expected `op <name> <arity> = <rule>`"));
                };
                let arity: usize = arity
                    .parse()
                    .map_err(|_| perr(n, format!("bad arity `{arity}`")))?;
                let rule = OpRule::from_keyword(rule.trim())
                    .ok_or_else(|| perr(n, format!("unknown rule `{}`", rule.trim())))?;
                ops.push(OpSpec {
                    name: op.to_string(),
                    arity,
                    rule,
                    rows: Vec::new(),
                });
            }
            "row" => {
                let spec = ops
                    .last_mut()
                    .filter(|o| o.rule == OpRule::Table)
                    .ok_or_else(|| perr(n, "`row` outside an `op ... = table` block"))?;
                let (args, v) = rest
                    .split_once("->")
                    .ok_or_else(|| perr(n, "expected `row <args...> -> <value>`"))?;
                let args: Vec<String> = args.split_whitespace().map(str::to_string).collect();
                let v: Vec<&str> = v.split_whitespace().collect();
                let [v] = v.as_slice() else {
                    return Err(perr(n, "expected exactly one value after `->`"));
                };
                if args.len() != spec.arity {
                    return Err(perr(
                        n,
                        format!("`{}` has arity {}, row has {} arguments", spec.name, spec.arity, args.len()),
                    ));
                }
                spec.rows.push((args, v.to_string()));
            }
            "filter" => {
                if filter.is_some() {
                    return Err(perr(n, "second `filter` line"));
                }
                filter = Some(match words.as_slice() {
                    ["upset", e] => FilterSpec::Upset(e.to_string()),
                    ["set", es @ ..] if !es.is_empty() => {
                        FilterSpec::Set(es.iter().map(|e| e.to_string()).collect())
                    }
                    _ => return Err(perr(n, "expected `filter upset <e>` or `filter set <e...>`")),
                });
            }
            "unit" => {
                let [op, e] = words.as_slice() else {
                    return Err(perr(n, "expected `unit <op> <e>`"));
                };
                units.push((op.to_string(), e.to_string()));
            }
            other => return Err(perr(n, format!("unknown directive `{other}`"))),
        }
        if kw != "leq" && kw != "order" {
            in_table_order = false;
        }
    }

    let name = name.ok_or_else(|| perr(0, "missing `algebra <name>`"))?;
    let carrier = carrier.ok_or_else(|| perr(0, "missing `carrier` line"))?;
    let mut b = AlgebraBuilder::new(name).carrier(carrier).order(order);
    for op in ops {
        b = b.op(op);
    }
    if let Some(f) = filter {
        b = b.filter(f);
    }
    for (op, e) in units {
        b = b.unit(&op, &e);
    }
    Ok(b.build()?)
}

/// Writes an algebra in the form [`parse_algebra`] reads back.
pub fn write_algebra(alg: &InterpretingLattice) -> String {
    let mut s = String::new();
    let tok = |e| alg.label(e).text().to_string();
    let _ = writeln!(s, "algebra {}", alg.name());
    let labels: Vec<String> = alg.elements().map(tok).collect();
    let _ = writeln!(s, "carrier {}", labels.join(" "));
    if alg.kind() == AlgebraKind::ComputedChain {
        s.push_str("order chain\n");
    } else {
        s.push_str("order table\n");
        for a in alg.elements() {
            for b in alg.elements() {
                if a != b && alg.leq(a, b) {
                    let _ = writeln!(s, "leq {} {}", tok(a), tok(b));
                }
            }
        }
    }
    for op in alg.ops() {
        let _ = writeln!(s, "op {} {} = {}", op.name(), op.arity(), op.rule().keyword());
        if op.rule() == OpRule::Table {
            let n = alg.size();
            for (i, v) in op.table().iter().enumerate() {
                let mut args = Vec::with_capacity(op.arity());
                let mut rem = i;
                for _ in 0..op.arity() {
                    args.push(labels[rem % n].clone());
                    rem /= n;
                }
                args.reverse();
                let lhs = if args.is_empty() {
                    String::new()
                } else {
                    format!("{} ", args.join(" "))
                };
                let _ = writeln!(s, "row {lhs}-> {}", tok(*v));
            }
        }
    }
    let f: Vec<String> = alg.filter().map(tok).collect();
    let _ = writeln!(s, "filter set {}", f.join(" "));
    s
}

// ---------------------------------------------------------------------------
// Models

/// Parses a model file. `resolve` turns the token of the `algebra` line into
/// an algebra (a built-in name, a path, ...).
///
/// ```text
/// model m1
/// algebra four-boolean
/// language R:1
/// domain x y
/// R(x) = a
/// R(y) = b
/// ```
pub fn parse_model(
    text: &str,
    resolve: &mut dyn FnMut(&str) -> Result<Arc<InterpretingLattice>, FormatError>,
) -> Result<PModel, FormatError> {
    let mut name: Option<String> = None;
    let mut algebra: Option<Arc<InterpretingLattice>> = None;
    let mut language: Option<Arc<PredicateLanguage>> = None;
    let mut domain: Option<Vec<String>> = None;
    let mut entries: Vec<(usize, String, Vec<String>, String)> = Vec::new();
    let mut defaults: Vec<(usize, String, String)> = Vec::new();

    for (n, l) in lines(text) {
        let (kw, rest) = split_keyword(l);
        let words: Vec<&str> = rest.split_whitespace().collect();
        match kw {
            "model" => {
                let [w] = words.as_slice() else {
                    return Err(perr(n, "expected `model <name>`"));
                };
                name = Some(w.to_string());
            }
            "algebra" => {
                let [w] = words.as_slice() else {
                    return Err(perr(n, "expected `algebra <name>`"));
                };
                algebra = Some(resolve(w)?);
            }
            "language" => {
                let lang: PredicateLanguage = rest.parse().map_err(|e: LanguageError| perr(n, e.to_string()))?;
                language = Some(Arc::new(lang));
            }
            "domain" => {
                if words.is_empty() {
                    return Err(perr(n, "empty domain"));
                }
                domain = Some(words.iter().map(|w| w.to_string()).collect());
            }
            "default" => {
                let (p, v) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(n, "expected `default <pred> = <value>`"))?;
                defaults.push((n, p.trim().to_string(), v.trim().to_string()));
            }
            _ => {
                let (lhs, v) = l
                    .split_once('=')
                    .ok_or_else(|| perr(n, format!("unknown directive `{kw}`")))?;
                let (lhs, v) = (lhs.trim(), v.trim());
                if v.is_empty() || v.contains(char::is_whitespace) {
                    return Err(perr(n, "expected one value after `=`"));
                }
                let (pred, args) = match lhs.split_once('(') {
                    Some((p, a)) => {
                        let a = a
                            .strip_suffix(')')
                            .ok_or_else(|| perr(n, "missing `)`"))?;
                        let args: Vec<String> = if a.trim().is_empty() {
                            Vec::new()
                        } else {
                            a.split(',').map(|x| x.trim().to_string()).collect()
                        };
                        (p.trim(), args)
                    }
                    None => (lhs, Vec::new()),
                };
                if pred.is_empty() || pred.contains(char::is_whitespace) {
                    return Err(perr(n, format!("bad atom `{lhs}`")));
                }
                entries.push((n, pred.to_string(), args, v.to_string()));
            }
        }
    }

    let name = name.unwrap_or_else(|| "model".to_string());
    let algebra = algebra.ok_or_else(|| perr(0, "missing `algebra` line"))?;
    let language = language.ok_or_else(|| perr(0, "missing `language` line"))?;
    let domain = domain.ok_or_else(|| perr(0, "missing `domain` line"))?;
    // Arity errors are reported with their line before the builder sees them.
    for (n, pred, args, _) in &entries {
        match language.arity(pred) {
            Some(a) if a == args.len() => {}
            Some(a) => return Err(perr(*n, format!("`{pred}` has arity {a}, got {}", args.len()))),
            None => return Err(perr(*n, format!("`{pred}` is not in the language"))),
        }
    }
    for (n, pred, _) in &defaults {
        if language.arity(pred).is_none() {
            return Err(perr(*n, format!("`{pred}` is not in the language")));
        }
    }
    let mut b = PModelBuilder::new(name, algebra, language).domain(domain);
    for (_, p, args, v) in entries {
        b.push(p, args, v);
    }
    for (_, p, v) in defaults {
        b.push_default(p, v);
    }
    Ok(b.build()?)
}

/// Writes every tuple of a model explicitly; `algebra` is the token for the
/// `algebra` line.
pub fn write_model(m: &PModel, algebra: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model {}", m.name());
    let _ = writeln!(s, "algebra {algebra}");
    let _ = writeln!(s, "language {}", m.language());
    let _ = writeln!(s, "domain {}", m.domain().join(" "));
    let alg = m.algebra();
    m.for_each_entry(|p, t, v| {
        let pred = m.language().name(p);
        let v = alg.label(v).text();
        if m.language().arity_at(p) == 0 {
            let _ = writeln!(s, "{pred} = {v}");
        } else {
            let args: Vec<&str> = t.iter().map(|&i| m.domain()[i].as_str()).collect();
            let _ = writeln!(s, "{pred}({}) = {v}", args.join(","));
        }
    });
    s
}

// ---------------------------------------------------------------------------
// Graphs

/// Parses an edge list: an optional `vertices v1 v2 ...` line, then
/// `edge u v` lines. Without a `vertices` line the vertices are the edge
/// endpoints in order of first appearance.
pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let mut labels: Vec<String> = Vec::new();
    let mut declared = false;
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    for (n, l) in lines(text) {
        let (kw, rest) = split_keyword(l);
        let words: Vec<&str> = rest.split_whitespace().collect();
        match kw {
            "vertices" => {
                if declared {
                    return Err(perr(n, "second `vertices` line"));
                }
                declared = true;
                labels = words.iter().map(|w| w.to_string()).collect();
            }
            "edge" => {
                let [u, v] = words.as_slice() else {
                    return Err(perr(n, "expected `edge <u> <v>`"));
                };
                edges.push((n, u.to_string(), v.to_string()));
            }
            other => return Err(perr(n, format!("unknown directive `{other}`"))),
        }
    }
    if !declared {
        for (_, u, v) in &edges {
            for w in [u, v] {
                if !labels.contains(w) {
                    labels.push(w.clone());
                }
            }
        }
    }
    let mut sorted = labels.clone();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(perr(0, "duplicate vertex"));
    }
    if labels.len() > mvmt_core::bridge::MAX_GRAPH_VERTICES {
        return Err(perr(0, format!("more than {} vertices", mvmt_core::bridge::MAX_GRAPH_VERTICES)));
    }
    let mut g = Graph::with_labels(labels.clone());
    for (n, u, v) in edges {
        let ix = |w: &str| {
            labels
                .iter()
                .position(|l| l == w)
                .ok_or_else(|| perr(n, format!("unknown vertex `{w}`")))
        };
        let (a, b) = (ix(&u)?, ix(&v)?);
        if a == b {
            return Err(perr(n, "self-loop"));
        }
        g.add_edge(a, b);
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", g.labels().join(" "));
    for (u, v) in g.edges() {
        let _ = writeln!(s, "edge {} {}", g.label(u), g.label(v));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvmt_core::fixtures;

    fn builtin(name: &str) -> Result<Arc<InterpretingLattice>, FormatError> {
        fixtures::by_name(name)
            .map(Arc::new)
            .ok_or_else(|| FormatError::UnknownAlgebra(name.to_string()))
    }

    #[test]
    fn two_element_boolean_loads() {
        let a = parse_algebra(
            "algebra two\ncarrier 0 1\norder chain\nop join 2 = max\nop meet 2 = min\nfilter upset 1\n",
        )
        .unwrap();
        assert_eq!(a.size(), 2);
        assert!(a.in_filter(a.top()));
        assert!(!a.in_filter(a.bottom()));
    }

    #[test]
    fn one_element_algebra_is_trivial() {
        let a = parse_algebra("algebra one\ncarrier e\norder chain\nfilter set e\n");
        // A one-point lattice has no proper filter; the loader says which rule fired.
        match a {
            Ok(a) => assert_eq!(a.size(), 1),
            Err(FormatError::Algebra(AlgebraError::DegenerateFilter(_))) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn top_only_filter_on_four_boolean_is_not_prime() {
        let text = "algebra fb\ncarrier bot a b top\norder table\nleq bot a\nleq bot b\nleq a top\nleq b top\nfilter set top\n";
        match parse_algebra(text) {
            Err(FormatError::Algebra(AlgebraError::FilterNotPrime { law, a, b })) => {
                assert_eq!(law, "join");
                let mut pair = [a, b];
                pair.sort();
                assert_eq!(pair, ["a".to_string(), "b".to_string()]);
            }
            other => panic!("expected FilterNotPrime, got {other:?}"),
        }
    }

    #[test]
    fn upper_filter_on_four_boolean_is_not_prime() {
        let text = "algebra fb\ncarrier bot a b top\norder table\nleq bot a\nleq bot b\nleq a top\nleq b top\nfilter set a b top\n";
        match parse_algebra(text) {
            Err(FormatError::Algebra(AlgebraError::FilterNotPrime { law, .. })) => assert_eq!(law, "meet"),
            other => panic!("expected FilterNotPrime, got {other:?}"),
        }
    }

    #[test]
    fn table_ops_and_units() {
        let text = "\
algebra g3
carrier 0 1/2 1
order chain
op conj 2 = table
row 0 0 -> 0
row 0 1/2 -> 0
row 0 1 -> 0
row 1/2 0 -> 0
row 1/2 1/2 -> 1/2
row 1/2 1 -> 1/2
row 1 0 -> 0
row 1 1/2 -> 1/2
row 1 1 -> 1
op one 0 = table
row -> 1
unit conj 1
filter upset 1
";
        let a = parse_algebra(text).unwrap();
        assert_eq!(a.kind(), AlgebraKind::Table);
        assert!(a.is_integral().unwrap());
        assert_eq!(parse_algebra(&write_algebra(&a)).unwrap(), a);
    }

    #[test]
    fn carrier_not_closed_is_reported() {
        let text = "algebra c\ncarrier 0 1/2 1\norder chain\nop conj 2 = product\nfilter upset 1\n";
        match parse_algebra(text) {
            Err(FormatError::Algebra(AlgebraError::CarrierNotClosed { op, .. })) => assert_eq!(op, "conj"),
            other => panic!("expected CarrierNotClosed, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_algebra("algebra x\n# comment\ncarrier 0 1\nfrobnicate\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 4, .. }), "{err}");
        let err = parse_algebra("algebra x\ncarrier 0 1\nrow 0 -> 1\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn builtin_algebras_round_trip() {
        for name in fixtures::BUILTIN_ALGEBRAS {
            let a = fixtures::by_name(name).unwrap();
            let text = write_algebra(&a);
            assert_eq!(parse_algebra(&text).unwrap(), a, "{name}:\n{text}");
        }
    }

    #[test]
    fn fixture_models_round_trip() {
        let (m1, m2) = fixtures::prime_requirement_models();
        let (u1, u2) = fixtures::ul_models(fixtures::UlVariant::Repaired);
        for m in [m1, m2, u1, u2] {
            let text = write_model(&m, m.algebra().name());
            let back = parse_model(&text, &mut builtin).unwrap();
            assert_eq!(back, m, "{text}");
        }
    }

    #[test]
    fn model_defaults_and_nullary() {
        let text = "\
model m
algebra godel5
language R:2 T:0
domain u v
default R = 0
R(u,v) = 3/4
T = 1/4
";
        let m = parse_model(text, &mut builtin).unwrap();
        assert_eq!(m.value_of("R", &["u", "v"]).unwrap(), m.algebra().find("3/4").unwrap());
        assert_eq!(m.value_of("R", &["v", "u"]).unwrap(), m.algebra().bottom());
        assert_eq!(m.value_of("T", &[]).unwrap(), m.algebra().find("1/4").unwrap());
    }

    #[test]
    fn model_errors() {
        let base = "model m\nalgebra boolean\nlanguage R:1\ndomain u\n";
        let err = parse_model(&format!("{base}R(u,u) = 1\n"), &mut builtin).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 5, .. }), "{err}");
        let err = parse_model(&format!("{base}R(u) = 7\n"), &mut builtin).unwrap_err();
        assert!(matches!(err, FormatError::Structure(_)), "{err}");
        let err = parse_model("model m\nalgebra nope\n", &mut builtin).unwrap_err();
        assert!(matches!(err, FormatError::UnknownAlgebra(_)), "{err}");
    }

    #[test]
    fn graph_round_trip() {
        let g = parse_graph("edge a b\nedge b c\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        assert!(parse_graph("vertices a\nedge a b\n").is_err());
    }
}

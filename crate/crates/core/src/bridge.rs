//! The classical side: Boolean translation, Gaifman graphs, tree-depth,
//! canonical ∧-primitive sentences, and bounded n-maps and n-cores.
//!
//! `M^⊤` thresholds every value at the filter, so protomorphisms between
//! P-models are exactly classical homomorphisms between their translations.
//! The n-map and n-core procedures range over classical structures up to an
//! explicit size bound; they never certify the unbounded relation.

use alloc::{
    collections::BTreeSet,
    string::{String, ToString},
    sync::Arc,
    vec,
    vec::Vec,
};
use core::ops::Deref;

use crate::algebra::{Elem, JOIN, MEET};
use crate::fixtures;
use crate::language::{
    enumerate_positive, var_name, Formula, LanguageError, PositiveBounds, SentenceClass,
};
use crate::morphisms::{
    check_morphism, find_morphisms, MorphismError, MorphismKind, MorphismOptions, MorphismWitness,
    SearchMode,
};
use crate::semantics::{Compiled, SemanticsError};
use crate::structure::{
    dedup_isomorphic, generate_models, GenMode, GenOptions, PModel, StructureError,
    DEFAULT_MODEL_CAP,
};

/// Default vertex cap for [`tree_depth`].
pub const TREE_DEPTH_CAP: usize = 12;

/// Hard limit of the bitmask graph representation.
pub const MAX_GRAPH_VERTICES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BridgeError {
    #[error("model `{0}` is not over the two-element Boolean algebra")]
    NotBoolean(String),
    #[error("graph has {vertices} vertices, over the cap of {cap}")]
    GraphTooLarge { vertices: usize, cap: usize },
    #[error("no tuple is true, so the canonical sentence would be an empty conjunction")]
    NoPositiveAtoms,
    #[error("no bounded core found for `{0}`")]
    CoreNotFound(String),
    #[error("separating sentence is not satisfied by `{0}`")]
    PostconditionFailed(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// A P-model over the built-in two-element Boolean algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanModel(PModel);

impl BooleanModel {
    pub fn new(m: PModel) -> Result<BooleanModel, BridgeError> {
        if *m.algebra() != fixtures::boolean() {
            return Err(BridgeError::NotBoolean(m.name().to_string()));
        }
        Ok(BooleanModel(m))
    }

    pub fn model(&self) -> &PModel {
        &self.0
    }

    pub fn into_model(self) -> PModel {
        self.0
    }

    /// True entries as `(pred, tuple)`.
    pub fn true_tuples(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        self.0.for_each_entry(|p, t, v| {
            if v == Elem(1) {
                out.push((p, t.to_vec()));
            }
        });
        out
    }
}

impl Deref for BooleanModel {
    type Target = PModel;

    fn deref(&self) -> &PModel {
        &self.0
    }
}

/// `M^⊤`: each value replaced by `1` if it lies in the filter, else `0`.
/// Models already over the Boolean algebra come back unchanged.
pub fn translate(m: &PModel) -> BooleanModel {
    let two = fixtures::boolean();
    if *m.algebra() == two {
        return BooleanModel(m.clone());
    }
    let alg = m.algebra();
    BooleanModel(m.map_values(Arc::new(two), |v| Elem(alg.in_filter(v) as u16)))
}

/// Outcome of [`check_translation_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationReport {
    /// The identity is a protomorphism `M → M^⊤`.
    pub forward: bool,
    /// The identity is a protomorphism `M^⊤ → M`.
    pub backward: bool,
    pub sentences: usize,
    /// First enumerated sentence on which validity differs.
    pub mismatch: Option<Formula>,
}

impl TranslationReport {
    pub fn holds(&self) -> bool {
        self.forward && self.backward && self.mismatch.is_none()
    }
}

/// Checks `M ⇆ M^⊤` through the identity and compares validity on every
/// e.∧.p sentence within `bounds`.
pub fn check_translation_equivalence(
    m: &PModel,
    bounds: &PositiveBounds,
) -> Result<TranslationReport, BridgeError> {
    check_translation_equivalence_with(m, &translate(m), bounds)
}

/// As [`check_translation_equivalence`] but against a supplied candidate
/// for `M^⊤`.
pub fn check_translation_equivalence_with(
    m: &PModel,
    candidate: &PModel,
    bounds: &PositiveBounds,
) -> Result<TranslationReport, BridgeError> {
    let id = MorphismWitness::identity(MorphismKind::Proto, m);
    let opts = MorphismOptions::default();
    let forward = check_morphism(&id, m, candidate, &opts)?.holds();
    let backward = check_morphism(&id, candidate, m, &opts)?.holds();
    let sentences = enumerate_positive(m.language(), SentenceClass::ExistentialAndPositive, bounds)?;
    let mut mismatch = None;
    for f in &sentences {
        let a = Compiled::for_model(f, m)?.holds(m);
        let b = Compiled::for_model(f, candidate)?.holds(candidate);
        if a != b {
            mismatch = Some(f.clone());
            break;
        }
    }
    Ok(TranslationReport {
        forward,
        backward,
        sentences: sentences.len(),
        mismatch,
    })
}

/// A simple undirected graph on at most 32 vertices, as adjacency bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<u32>,
}

impl Graph {
    /// Vertices named `0..n`.
    pub fn new(n: usize) -> Graph {
        Graph::with_labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Graph {
        assert!(labels.len() <= MAX_GRAPH_VERTICES, "graph too large");
        let n = labels.len();
        Graph {
            labels,
            adj: vec![0; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `{u, v}`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u] |= 1 << v;
            self.adj[v] |= 1 << u;
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbours(&self, v: usize) -> u32 {
        self.adj[v]
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// The subgraph induced on `keep`, relabelled `0..keep.len()` in order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::with_labels(keep.iter().map(|&v| self.labels[v].clone()).collect());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    fn all(&self) -> u32 {
        if self.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.len()) - 1
        }
    }

    /// Connected components of the subgraph induced on `set`.
    fn components(&self, set: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut rest = set;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & set & !comp;
                comp |= new;
                frontier |= new;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }
}

/// `G(M)`: elements joined when they occur together in a tuple whose value
/// is in the filter.
pub fn gaifman_graph(m: &PModel) -> Graph {
    let mut g = Graph::with_labels(m.domain().to_vec());
    let alg = m.algebra();
    m.for_each_entry(|_, t, v| {
        if alg.in_filter(v) {
            for &a in t {
                for &b in t {
                    g.add_edge(a, b);
                }
            }
        }
    });
    g
}

/// A rooted forest on the graph's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationForest {
    pub parent: Vec<Option<usize>>,
    /// Vertex levels, roots at 1.
    pub level: Vec<usize>,
    pub depth: usize,
}

impl EliminationForest {
    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&u| self.parent[u] == Some(v)).collect()
    }

    pub fn is_ancestor(&self, a: usize, mut v: usize) -> bool {
        loop {
            if v == a {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    /// Every edge joins an ancestor/descendant pair, levels are consistent,
    /// and `depth` is the largest level.
    pub fn certifies(&self, g: &Graph) -> bool {
        let n = g.len();
        if self.parent.len() != n || self.level.len() != n {
            return false;
        }
        for v in 0..n {
            let expected = match self.parent[v] {
                None => 1,
                Some(p) => self.level[p] + 1,
            };
            if self.level[v] != expected {
                return false;
            }
        }
        if self.depth != self.level.iter().copied().max().unwrap_or(0) {
            return false;
        }
        g.edges()
            .into_iter()
            .all(|(u, v)| self.is_ancestor(u, v) || self.is_ancestor(v, u))
    }
}

/// Exact tree-depth with [`TREE_DEPTH_CAP`].
pub fn tree_depth(g: &Graph) -> Result<(usize, EliminationForest), BridgeError> {
    tree_depth_with_cap(g, TREE_DEPTH_CAP)
}

/// Exact tree-depth by the recursive definition, memoized on vertex subsets,
/// with an optimal forest. The memo has `2^|V|` entries, hence the cap.
pub fn tree_depth_with_cap(
    g: &Graph,
    cap: usize,
) -> Result<(usize, EliminationForest), BridgeError> {
    let n = g.len();
    let cap = cap.min(24);
    if n > cap {
        return Err(BridgeError::GraphTooLarge { vertices: n, cap });
    }
    let mut memo = vec![u8::MAX; 1usize << n];
    let mut best = vec![u8::MAX; 1usize << n];
    let all = g.all();
    let depth = td_rec(g, all, &mut memo, &mut best) as usize;
    let mut forest = EliminationForest {
        parent: vec![None; n],
        level: vec![0; n],
        depth,
    };
    build_forest(g, all, None, 1, &best, &mut forest);
    debug_assert!(forest.certifies(g));
    Ok((depth, forest))
}

fn td_rec(g: &Graph, set: u32, memo: &mut [u8], best: &mut [u8]) -> u8 {
    if set == 0 {
        return 0;
    }
    if memo[set as usize] != u8::MAX {
        return memo[set as usize];
    }
    let comps = g.components(set);
    let value = if comps.len() > 1 {
        comps
            .into_iter()
            .map(|c| td_rec(g, c, memo, best))
            .max()
            .unwrap_or(0)
    } else {
        let mut lowest = u8::MAX;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let d = td_rec(g, set & !(1 << v), memo, best);
            if d < lowest {
                lowest = d;
                best[set as usize] = v as u8;
            }
        }
        lowest + 1
    };
    memo[set as usize] = value;
    value
}

fn build_forest(
    g: &Graph,
    set: u32,
    parent: Option<usize>,
    level: usize,
    best: &[u8],
    out: &mut EliminationForest,
) {
    for comp in g.components(set) {
        let v = best[comp as usize] as usize;
        out.parent[v] = parent;
        out.level[v] = level;
        build_forest(g, comp & !(1 << v), Some(v), level + 1, best, out);
    }
}

/// How [`canonical_sentence`] lays out its quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalStyle {
    /// One prenex variable per domain element.
    Flat,
    /// Quantifiers nested along an optimal elimination forest of the
    /// covered elements.
    TdOptimal,
}

impl CanonicalStyle {
    pub fn keyword(self) -> &'static str {
        match self {
            CanonicalStyle::Flat => "flat",
            CanonicalStyle::TdOptimal => "td",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "flat" => Some(CanonicalStyle::Flat),
            "td" | "td-optimal" => Some(CanonicalStyle::TdOptimal),
            _ => None,
        }
    }
}

fn atom_for(b: &BooleanModel, p: usize, tuple: &[usize], var: &dyn Fn(usize) -> String) -> Formula {
    Formula::Atom {
        pred: b.language().name(p).to_string(),
        args: tuple.iter().map(|&t| var(t)).collect(),
    }
}

/// The ∧-primitive sentence `θ_B` with `N ⊨ θ_B` iff `B → N`.
pub fn canonical_sentence(b: &BooleanModel, style: CanonicalStyle) -> Result<Formula, BridgeError> {
    let tuples = b.true_tuples();
    if tuples.is_empty() {
        return Err(BridgeError::NoPositiveAtoms);
    }
    match style {
        CanonicalStyle::Flat => {
            let var = |e: usize| var_name(e + 1);
            let atoms = tuples.iter().map(|(p, t)| atom_for(b, *p, t, &var)).collect();
            let matrix = Formula::fold(MEET, atoms).expect("nonempty");
            Ok((1..=b.size())
                .rev()
                .fold(matrix, |body, i| Formula::exists(&var_name(i), body)))
        }
        CanonicalStyle::TdOptimal => {
            let g = gaifman_graph(b);
            let covered: Vec<usize> = tuples
                .iter()
                .flat_map(|(_, t)| t.iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let (_, forest) = tree_depth(&g.induced(&covered))?;
            let local = |e: usize| covered.binary_search(&e).expect("covered");
            let var = |e: usize| var_name(forest.level[local(e)]);
            let mut attached: Vec<Vec<Formula>> = vec![Vec::new(); covered.len()];
            let mut top = Vec::new();
            for (p, t) in &tuples {
                let atom = atom_for(b, *p, t, &var);
                match t.iter().map(|&e| local(e)).max_by_key(|&v| forest.level[v]) {
                    Some(v) => attached[v].push(atom),
                    None => top.push(atom),
                }
            }
            for r in forest.roots() {
                top.push(subtree_formula(r, &forest, &mut attached));
            }
            Ok(Formula::fold(MEET, top).expect("nonempty"))
        }
    }
}

fn subtree_formula(v: usize, forest: &EliminationForest, attached: &mut [Vec<Formula>]) -> Formula {
    let mut parts = core::mem::take(&mut attached[v]);
    for c in forest.children(v) {
        parts.push(subtree_formula(c, forest, attached));
    }
    let body = Formula::fold(MEET, parts).expect("every covered vertex carries an atom below it");
    Formula::exists(&var_name(forest.level[v]), body)
}

/// Outcome of a bounded `→ⁿ` check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NMapOutcome {
    /// No classical structure up to `bound` elements refutes it.
    HoldsUpToBound { bound: usize },
    /// `C → M^⊤`, `C ↛ N^⊤` and `td(G(C)) ≤ n`.
    Refuted(BooleanModel),
}

impl NMapOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, NMapOutcome::HoldsUpToBound { .. })
    }
}

/// Classical structures of tree-depth at most `n` up to a size bound, one
/// per isomorphism class, by ascending size.
#[derive(Clone, Debug)]
pub struct ClassicalPool {
    pub n: usize,
    pub bound: usize,
    pub members: Vec<BooleanModel>,
}

impl ClassicalPool {
    pub fn new(
        lang: &Arc<crate::language::PredicateLanguage>,
        n: usize,
        bound: usize,
        cap: usize,
    ) -> Result<ClassicalPool, BridgeError> {
        let two = Arc::new(fixtures::boolean());
        let mut members = Vec::new();
        for size in 1..=bound {
            let opts = GenOptions {
                min_domain: size,
                max_domain: size,
                mode: GenMode::Exhaustive { cap },
            };
            for c in dedup_isomorphic(generate_models(&two, lang, &opts)?)? {
                if tree_depth(&gaifman_graph(&c))?.0 <= n {
                    members.push(BooleanModel(c));
                }
            }
        }
        Ok(ClassicalPool { n, bound, members })
    }
}

fn maps(c: &PModel, m: &PModel) -> Result<bool, BridgeError> {
    Ok(find_morphisms(MorphismKind::Proto, c, m, SearchMode::First, &MorphismOptions::default())?
        .exists())
}

fn n_maps_in_pool(
    pool: &ClassicalPool,
    mt: &PModel,
    nt: &PModel,
) -> Result<NMapOutcome, BridgeError> {
    for c in &pool.members {
        if maps(c, mt)? && !maps(c, nt)? {
            return Ok(NMapOutcome::Refuted(c.clone()));
        }
    }
    Ok(NMapOutcome::HoldsUpToBound { bound: pool.bound })
}

/// `M →ⁿ N` checked against every classical `C` with `|C| ≤ size_bound`.
pub fn n_maps_to(
    m: &PModel,
    n: &PModel,
    depth: usize,
    size_bound: usize,
) -> Result<NMapOutcome, BridgeError> {
    if m.language() != n.language() {
        return Err(MorphismError::LanguageMismatch.into());
    }
    let pool = ClassicalPool::new(m.language_arc(), depth, size_bound, DEFAULT_MODEL_CAP)?;
    n_maps_in_pool(&pool, &translate(m), &translate(n))
}

/// A smallest classical `C` of tree-depth at most `n` with `C → M^⊤` and
/// `M^⊤ →ⁿ C` up to the same bound.
pub fn n_core_bounded(
    m: &PModel,
    depth: usize,
    size_bound: usize,
) -> Result<Option<BooleanModel>, BridgeError> {
    let pool = ClassicalPool::new(m.language_arc(), depth, size_bound, DEFAULT_MODEL_CAP)?;
    n_core_in_pool(&pool, &translate(m))
}

fn n_core_in_pool(pool: &ClassicalPool, mt: &PModel) -> Result<Option<BooleanModel>, BridgeError> {
    for c in &pool.members {
        if maps(c, mt)? && n_maps_in_pool(pool, mt, c)?.holds() {
            return Ok(Some(c.clone()));
        }
    }
    Ok(None)
}

/// `⋁ θ_C` over the distinct bounded n-cores of the models (tree-depth
/// optimal style); every input model is checked to satisfy the result.
pub fn separating_sentence(
    models: &[PModel],
    depth: usize,
    size_bound: usize,
) -> Result<Formula, BridgeError> {
    let mut cores: Vec<BooleanModel> = Vec::new();
    let mut pool: Option<ClassicalPool> = None;
    for m in models {
        if pool.as_ref().is_none_or(|p| p.members.first().is_some_and(|c| c.language() != m.language())) {
            pool = Some(ClassicalPool::new(m.language_arc(), depth, size_bound, DEFAULT_MODEL_CAP)?);
        }
        let core = n_core_in_pool(pool.as_ref().expect("set"), &translate(m))?
            .ok_or_else(|| BridgeError::CoreNotFound(m.name().to_string()))?;
        let mut dup = false;
        for c in &cores {
            if c.is_isomorphic(&core)? {
                dup = true;
                break;
            }
        }
        if !dup {
            cores.push(core);
        }
    }
    let thetas = cores
        .iter()
        .map(|c| canonical_sentence(c, CanonicalStyle::TdOptimal))
        .collect::<Result<Vec<_>, _>>()?;
    let psi = Formula::fold(JOIN, thetas).ok_or(BridgeError::NoPositiveAtoms)?;
    for m in models {
        if !Compiled::for_model(&psi, m)?.holds(m) {
            return Err(BridgeError::PostconditionFailed(m.name().to_string()));
        }
    }
    Ok(psi)
}

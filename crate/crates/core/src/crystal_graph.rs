//! Crystal graphs: breadth-first generation, export, isomorphism testing and
//! local axiom checks.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanMatrix, Weight};
use crate::error::{Error, Result};
use crate::scalar::Exponent;

/// Default bound on the number of nodes a generation may produce.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// An abstract crystal: partial operators `e_i`, `f_i` and the statistics `wt`, `eps_i`, `phi_i`.
pub trait Crystal: Sync {
    type Element: Clone + Eq + Hash + Ord + Debug + Send + Sync;
    type Scalar: Exponent;

    fn cartan(&self) -> &CartanMatrix;

    fn rank(&self) -> usize {
        self.cartan().rank()
    }

    fn f(&self, x: &Self::Element, i: usize) -> Result<Option<Self::Element>>;
    fn e(&self, x: &Self::Element, i: usize) -> Result<Option<Self::Element>>;
    fn weight(&self, x: &Self::Element) -> Result<Weight<Self::Scalar>>;
    fn epsilon(&self, x: &Self::Element, i: usize) -> Result<Self::Scalar>;
    fn phi(&self, x: &Self::Element, i: usize) -> Result<Self::Scalar>;

    /// Text label for exports.
    fn render(&self, x: &Self::Element) -> String;
}

/// How far generation proceeds from the seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// At most this many operator applications from a seed.
    Depth(usize),
    /// Until closed; only sensible for finite crystals.
    Unbounded,
}

/// Why a generated graph is incomplete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Nodes at this depth were not expanded.
    Depth(usize),
    /// Generation stopped after exceeding the node cap.
    Cap(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub bound: Bound,
    pub cap: usize,
    /// Also follow `e_i` (needed for seeds that are not highest weight).
    pub close_under_e: bool,
    /// Assert `e_i f_i x = x` on every edge found.
    pub check_inverse: bool,
}

impl GenerateOptions {
    pub fn depth(depth: usize) -> Self {
        Self { bound: Bound::Depth(depth), ..Self::default() }
    }

    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_e(mut self, close_under_e: bool) -> Self {
        self.close_under_e = close_under_e;
        self
    }
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self { bound: Bound::Unbounded, cap: DEFAULT_NODE_CAP, close_under_e: false, check_inverse: true }
    }
}

/// A labelled digraph whose edge `(u, i, v)` records `f_i(u) = v`.
#[derive(Debug, Clone)]
pub struct CrystalGraph<T, S: Exponent = i64> {
    rank: usize,
    label_offset: i64,
    nodes: Vec<T>,
    weights: Vec<Weight<S>>,
    depths: Vec<usize>,
    index: HashMap<T, usize>,
    edges: Vec<(usize, usize, usize)>,
    out: HashMap<(usize, usize), usize>,
    inc: HashMap<(usize, usize), usize>,
    seeds: Vec<usize>,
    truncation: Option<Truncation>,
}

impl<T: Clone + Eq + Hash, S: Exponent> CrystalGraph<T, S> {
    fn empty(rank: usize, label_offset: i64) -> Self {
        Self {
            rank,
            label_offset,
            nodes: Vec::new(),
            weights: Vec::new(),
            depths: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            out: HashMap::new(),
            inc: HashMap::new(),
            seeds: Vec::new(),
            truncation: None,
        }
    }

    fn insert_node(&mut self, x: T, weight: Weight<S>, depth: usize) -> (usize, bool) {
        if let Some(&id) = self.index.get(&x) {
            return (id, false);
        }
        let id = self.nodes.len();
        self.index.insert(x.clone(), id);
        self.nodes.push(x);
        self.weights.push(weight);
        self.depths.push(depth);
        (id, true)
    }

    fn insert_edge(&mut self, u: usize, i: usize, v: usize) -> Result<()> {
        match (self.out.get(&(u, i)), self.inc.get(&(v, i))) {
            (None, None) => {
                self.out.insert((u, i), v);
                self.inc.insert((v, i), u);
                self.edges.push((u, i, v));
                Ok(())
            }
            (Some(&w), _) if w == v => Ok(()),
            _ => Err(Error::AxiomViolation(format!(
                "node {u} or {v} would get a second {i}-edge"
            ))),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label_offset(&self) -> i64 {
        self.label_offset
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in discovery order.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &T {
        &self.nodes[id]
    }

    pub fn weight(&self, id: usize) -> &Weight<S> {
        &self.weights[id]
    }

    pub fn depth(&self, id: usize) -> usize {
        self.depths[id]
    }

    pub fn id(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }

    /// Edges `(source, i, target)` in discovery order (internal labels).
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    /// Target of the `i`-edge leaving `u`.
    pub fn f_edge(&self, u: usize, i: usize) -> Option<usize> {
        self.out.get(&(u, i)).copied()
    }

    /// Source of the `i`-edge entering `v`.
    pub fn e_edge(&self, v: usize, i: usize) -> Option<usize> {
        self.inc.get(&(v, i)).copied()
    }

    /// Length of the `i`-string below `u` (a `phi_i` read off the graph).
    pub fn f_string_length(&self, u: usize, i: usize) -> usize {
        let mut count = 0;
        let mut x = u;
        while let Some(y) = self.f_edge(x, i) {
            count += 1;
            x = y;
        }
        count
    }

    /// Length of the `i`-string above `u` (an `eps_i` read off the graph).
    pub fn e_string_length(&self, u: usize, i: usize) -> usize {
        let mut count = 0;
        let mut x = u;
        while let Some(y) = self.e_edge(x, i) {
            count += 1;
            x = y;
        }
        count
    }

    /// Number of nodes at each depth.
    pub fn level_sizes(&self) -> Vec<usize> {
        let max = self.depths.iter().copied().max().unwrap_or(0);
        let mut out = vec![0; if self.nodes.is_empty() { 0 } else { max + 1 }];
        for &d in &self.depths {
            out[d] += 1;
        }
        out
    }

    /// DOT digraph with nodes `n<id>` labelled by `label` and edges labelled by external node labels.
    pub fn to_dot(&self, label: impl Fn(&T) -> String) -> String {
        let mut out = String::from("digraph crystal {\n");
        for (id, x) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{id} [label=\"{}\"];\n", escape(&label(x))));
        }
        for &(u, i, v) in &self.edges {
            out.push_str(&format!("  n{u} -> n{v} [label=\"{}\"];\n", i as i64 + self.label_offset));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, label: impl Fn(&T) -> String) -> GraphJson<S> {
        GraphJson {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, x)| NodeJson { id, monomial: label(x), weight: self.weights[id].coords().to_vec() })
                .collect(),
            edges: self.edges.iter().map(|&(u, i, v)| (u, i as i64 + self.label_offset, v)).collect(),
            truncated: self.truncation.is_some(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson<S: Exponent = i64> {
    pub id: usize,
    pub monomial: String,
    #[serde(bound = "")]
    pub weight: Vec<S>,
}

/// `{"nodes":[{"id","monomial","weight"}], "edges":[[src,i,dst]], "truncated":bool}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson<S: Exponent = i64> {
    #[serde(bound = "")]
    pub nodes: Vec<NodeJson<S>>,
    pub edges: Vec<(usize, i64, usize)>,
    pub truncated: bool,
}

/// What expanding one node produced: `(label, neighbour, is_f)` in label order.
type Expansion<T> = Vec<(usize, T, bool)>;

fn expand<C: Crystal>(crystal: &C, x: &C::Element, options: &GenerateOptions) -> Result<Expansion<C::Element>> {
    let mut out = Vec::new();
    for i in 0..crystal.rank() {
        if let Some(y) = crystal.f(x, i)? {
            if options.check_inverse && crystal.e(&y, i)?.as_ref() != Some(x) {
                return Err(Error::AxiomViolation(format!(
                    "e_{i} f_{i} x != x for x = {}",
                    crystal.render(x)
                )));
            }
            out.push((i, y, true));
        }
        if options.close_under_e {
            if let Some(y) = crystal.e(x, i)? {
                if options.check_inverse && crystal.f(&y, i)?.as_ref() != Some(x) {
                    return Err(Error::AxiomViolation(format!(
                        "f_{i} e_{i} x != x for x = {}",
                        crystal.render(x)
                    )));
                }
                out.push((i, y, false));
            }
        }
    }
    Ok(out)
}

/// Breadth-first closure of `seeds` under the crystal operators.
///
/// Each level is expanded in parallel; new nodes are then numbered
/// sequentially in (parent id, label, f-before-e) order, so the result does
/// not depend on scheduling. Exceeding the cap stops generation and returns
/// the partial graph marked [`Truncation::Cap`].
pub fn generate<C: Crystal>(
    crystal: &C,
    seeds: &[C::Element],
    options: GenerateOptions,
) -> Result<CrystalGraph<C::Element, C::Scalar>> {
    let mut graph = CrystalGraph::empty(crystal.rank(), crystal.cartan().label_offset());
    let mut frontier = Vec::new();
    for seed in seeds {
        let (id, fresh) = graph.insert_node(seed.clone(), crystal.weight(seed)?, 0);
        if fresh {
            frontier.push(id);
        }
        if !graph.seeds.contains(&id) {
            graph.seeds.push(id);
        }
    }
    if graph.len() > options.cap {
        graph.truncation = Some(Truncation::Cap(options.cap));
        return Ok(graph);
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        if let Bound::Depth(d) = options.bound {
            if depth >= d {
                // Edges among already-present nodes are still recorded.
                let pending: Vec<Expansion<C::Element>> = frontier
                    .par_iter()
                    .map(|&id| expand(crystal, &graph.nodes[id], &options))
                    .collect::<Result<_>>()?;
                let mut open = false;
                for (&u, children) in frontier.iter().zip(pending) {
                    for (i, y, is_f) in children {
                        match graph.id(&y) {
                            Some(v) if is_f => graph.insert_edge(u, i, v)?,
                            Some(v) => graph.insert_edge(v, i, u)?,
                            None => open = true,
                        }
                    }
                }
                if open {
                    graph.truncation = Some(Truncation::Depth(d));
                }
                break;
            }
        }
        let expansions: Vec<Expansion<C::Element>> = frontier
            .par_iter()
            .map(|&id| expand(crystal, &graph.nodes[id], &options))
            .collect::<Result<_>>()?;
        let children: Vec<Vec<(usize, C::Element, bool, Weight<C::Scalar>)>> = expansions
            .into_par_iter()
            .map(|list| {
                list.into_iter()
                    .map(|(i, y, is_f)| {
                        let w = crystal.weight(&y)?;
                        Ok((i, y, is_f, w))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (&u, list) in frontier.iter().zip(children) {
            for (i, y, is_f, w) in list {
                let (v, fresh) = graph.insert_node(y, w, depth + 1);
                if fresh {
                    next.push(v);
                }
                if is_f {
                    graph.insert_edge(u, i, v)?;
                } else {
                    graph.insert_edge(v, i, u)?;
                }
                if graph.len() > options.cap {
                    graph.truncation = Some(Truncation::Cap(options.cap));
                    return Ok(graph);
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(graph)
}

/// Checks that every edge lowers the weight by a simple root and that
/// `phi_i - eps_i = <h_i, wt>` at every node.
pub fn invariant_violations<C: Crystal>(crystal: &C, graph: &CrystalGraph<C::Element, C::Scalar>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let cartan = crystal.cartan();
    for &(u, i, v) in graph.edges() {
        let alpha = cartan.simple_root::<C::Scalar>(i)?;
        if graph.weight(v) != &graph.weight(u).checked_sub(&alpha)? {
            out.push(format!("edge ({u}, {i}, {v}) does not lower the weight by alpha_{i}"));
        }
    }
    for id in 0..graph.len() {
        let x = graph.node(id);
        let wt = crystal.weight(x)?;
        for i in 0..graph.rank() {
            let eps = crystal.epsilon(x, i)?;
            let phi = crystal.phi(x, i)?;
            if phi - eps != wt.pairing(i)? {
                out.push(format!("node {id}: phi_{i} - eps_{i} != <h_{i}, wt>"));
            }
        }
    }
    Ok(out)
}

/// Searches for a label-preserving isomorphism `G1 -> G2`.
///
/// `labels[i]` is the label in `G2` matching label `i` of `G1` (identity when
/// `None`); `weight_map` sends weights of `G1` to weights of `G2` (identity when
/// `None`). Returns the node map indexed by `G1` ids.
pub fn crystal_isomorphic<T1, T2, S1, S2>(
    g1: &CrystalGraph<T1, S1>,
    g2: &CrystalGraph<T2, S2>,
    labels: Option<&[usize]>,
    weight_map: Option<&dyn Fn(&Weight<S1>) -> Weight<S2>>,
) -> Result<Option<Vec<usize>>>
where
    T1: Clone + Eq + Hash,
    T2: Clone + Eq + Hash,
    S1: Exponent,
    S2: Exponent,
{
    let identity: Vec<usize>;
    let labels = match labels {
        Some(l) => {
            if l.len() != g1.rank() {
                return Err(Error::DimensionMismatch { expected: g1.rank(), found: l.len() });
            }
            l
        }
        None => {
            if g1.rank() != g2.rank() {
                return Err(Error::IndexSetMismatch { left: g1.rank(), right: g2.rank() });
            }
            identity = (0..g1.rank()).collect();
            &identity
        }
    };
    if g1.len() != g2.len() || g1.edges().len() != g2.edges().len() {
        return Ok(None);
    }
    let mapped_weight = |id: usize| -> Option<Weight<S2>> {
        match weight_map {
            Some(f) => Some(f(g1.weight(id))),
            None => {
                let coords: Option<Vec<S2>> = g1.weight(id).coords().iter().map(|&c| S2::from(c)).collect();
                coords.map(Weight::new)
            }
        }
    };
    let profile1 = |u: usize| -> Vec<(usize, bool, bool)> {
        (0..g1.rank()).map(|i| (labels[i], g1.f_edge(u, i).is_some(), g1.e_edge(u, i).is_some())).collect()
    };
    let profile2 = |v: usize| -> Vec<(usize, bool, bool)> {
        (0..g1.rank()).map(|i| (labels[i], g2.f_edge(v, labels[i]).is_some(), g2.e_edge(v, labels[i]).is_some())).collect()
    };
    let weights1: Vec<Option<Weight<S2>>> = (0..g1.len()).map(mapped_weight).collect();

    // components of g1 (undirected)
    let mut component = vec![usize::MAX; g1.len()];
    let mut roots = Vec::new();
    for start in 0..g1.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let c = roots.len();
        roots.push(start);
        let mut stack = vec![start];
        component[start] = c;
        while let Some(u) = stack.pop() {
            for i in 0..g1.rank() {
                for w in [g1.f_edge(u, i), g1.e_edge(u, i)].into_iter().flatten() {
                    if component[w] == usize::MAX {
                        component[w] = c;
                        stack.push(w);
                    }
                }
            }
        }
    }

    // Propagates a root assignment through a component; `None` on conflict.
    let propagate = |root: usize, image: usize, map: &mut Vec<usize>, used: &mut Vec<bool>| -> Option<Vec<usize>> {
        let mut assigned = Vec::new();
        let mut stack = vec![(root, image)];
        while let Some((u, v)) = stack.pop() {
            if map[u] != usize::MAX {
                if map[u] != v {
                    return rollback(assigned, map, used);
                }
                continue;
            }
            if used[v] || weights1[u].as_ref() != Some(g2.weight(v)) || profile1(u) != profile2(v) {
                return rollback(assigned, map, used);
            }
            map[u] = v;
            used[v] = true;
            assigned.push(u);
            for i in 0..g1.rank() {
                let j = labels[i];
                if let (Some(a), Some(b)) = (g1.f_edge(u, i), g2.f_edge(v, j)) {
                    stack.push((a, b));
                }
                if let (Some(a), Some(b)) = (g1.e_edge(u, i), g2.e_edge(v, j)) {
                    stack.push((a, b));
                }
            }
        }
        Some(assigned)
    };

    fn rollback(assigned: Vec<usize>, map: &mut [usize], used: &mut [bool]) -> Option<Vec<usize>> {
        for u in assigned {
            used[map[u]] = false;
            map[u] = usize::MAX;
        }
        None
    }

    fn search(
        c: usize,
        roots: &[usize],
        n2: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        propagate: &dyn Fn(usize, usize, &mut Vec<usize>, &mut Vec<bool>) -> Option<Vec<usize>>,
    ) -> bool {
        if c == roots.len() {
            return true;
        }
        for image in 0..n2 {
            if used[image] {
                continue;
            }
            if let Some(assigned) = propagate(roots[c], image, map, used) {
                if search(c + 1, roots, n2, map, used, propagate) {
                    return true;
                }
                rollback(assigned, map, used);
            }
        }
        false
    }

    let mut map = vec![usize::MAX; g1.len()];
    let mut used = vec![false; g2.len()];
    if search(0, &roots, g2.len(), &mut map, &mut used, &propagate) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Stembridge's local axioms on a complete graph of a simply-laced crystal.
///
/// `eps` and `phi` are read off the graph as string lengths. Returns a
/// description of every violated configuration.
pub fn stembridge_violations<T, S>(graph: &CrystalGraph<T, S>, cartan: &CartanMatrix) -> Vec<String>
where
    T: Clone + Eq + Hash,
    S: Exponent,
{
    let n = graph.rank();
    let eps = |x: usize, i: usize| graph.e_string_length(x, i) as i64;
    let phi = |x: usize, i: usize| graph.f_string_length(x, i) as i64;
    let e = |x: usize, i: usize| graph.e_edge(x, i);
    let f = |x: usize, i: usize| graph.f_edge(x, i);
    let chain = |x: usize, steps: &[usize], op: &dyn Fn(usize, usize) -> Option<usize>| {
        steps.iter().try_fold(x, |acc, &i| op(acc, i))
    };
    let mut out = Vec::new();
    for x in 0..graph.len() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = cartan.entry(i, j);
                if let Some(ex) = e(x, i) {
                    // delta = -eps
                    let d_delta = -eps(ex, j) + eps(x, j);
                    let d_phi = phi(ex, j) - phi(x, j);
                    if d_delta + d_phi != a {
                        out.push(format!("P2 at node {x}, (i, j) = ({i}, {j})"));
                    }
                    if d_delta > 0 || d_phi > 0 {
                        out.push(format!("P3 at node {x}, (i, j) = ({i}, {j})"));
                    }
                }
                if let Some(fx) = f(x, i) {
                    let n_delta = -eps(x, j) + eps(fx, j);
                    let n_phi = phi(x, j) - phi(fx, j);
                    if n_delta + n_phi != a {
                        out.push(format!("P2' at node {x}, (i, j) = ({i}, {j})"));
                    }
                    if n_delta > 0 || n_phi > 0 {
                        out.push(format!("P3' at node {x}, (i, j) = ({i}, {j})"));
                    }
                }
                if let (Some(exi), Some(exj)) = (e(x, i), e(x, j)) {
                    let di = -eps(exi, j) + eps(x, j);
                    let dj = -eps(exj, i) + eps(x, i);
                    if di == 0 {
                        let y1 = chain(x, &[j, i], &e);
                        let y2 = chain(x, &[i, j], &e);
                        let ok = match (y1, y2) {
                            (Some(y), Some(z)) if y == z => phi(y, i) - phi(exi, i) == 0,
                            _ => false,
                        };
                        if !ok {
                            out.push(format!("P4 at node {x}, (i, j) = ({i}, {j})"));
                        }
                    }
                    if di == -1 && dj == -1 {
                        let y1 = chain(x, &[i, j, j, i], &e);
                        let y2 = chain(x, &[j, i, i, j], &e);
                        let ok = match (y1, y2) {
                            (Some(y), Some(z)) if y == z => {
                                let ejx = chain(x, &[j, i, i], &e);
                                let eix = chain(x, &[i, j, j], &e);
                                match (ejx, eix) {
                                    (Some(p), Some(q)) => {
                                        phi(y, j) - phi(q, j) == -1 && phi(y, i) - phi(p, i) == -1
                                    }
                                    _ => false,
                                }
                            }
                            _ => false,
                        };
                        if !ok {
                            out.push(format!("P5 at node {x}, (i, j) = ({i}, {j})"));
                        }
                    }
                }
                if let (Some(fxi), Some(fxj)) = (f(x, i), f(x, j)) {
                    let ni = phi(x, j) - phi(fxi, j);
                    let nj = phi(x, i) - phi(fxj, i);
                    if ni == 0 {
                        let y1 = chain(x, &[j, i], &f);
                        let y2 = chain(x, &[i, j], &f);
                        let ok = match (y1, y2) {
                            (Some(y), Some(z)) if y == z => -eps(fxi, i) + eps(y, i) == 0,
                            _ => false,
                        };
                        if !ok {
                            out.push(format!("P4' at node {x}, (i, j) = ({i}, {j})"));
                        }
                    }
                    if ni == -1 && nj == -1 {
                        let y1 = chain(x, &[i, j, j, i], &f);
                        let y2 = chain(x, &[j, i, i, j], &f);
                        let ok = match (y1, y2) {
                            (Some(y), Some(z)) if y == z => {
                                let fjx = chain(x, &[j, i, i], &f);
                                let fix = chain(x, &[i, j, j], &f);
                                match (fjx, fix) {
                                    (Some(p), Some(q)) => {
                                        -eps(q, j) + eps(y, j) == -1 && -eps(p, i) + eps(y, i) == -1
                                    }
                                    _ => false,
                                }
                            }
                            _ => false,
                        };
                        if !ok {
                            out.push(format!("P5' at node {x}, (i, j) = ({i}, {j})"));
                        }
                    }
                }
            }
        }
    }
    out
}

//! Graph databases, their products, node-pair languages and regular
//! language containment.
//!
//! Nodes are [`Element`]s and node ids are [`ElemId`]s, so example tuples
//! over a graph are ordinary [`Tuple`]s.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits::DEFAULT_NODE_BUDGET;
use crate::model::{advance, Database, ElemId, Element, Schema, Tuple};

/// An edge-labeled graph. Nodes without edges are kept.
#[derive(Clone)]
pub struct GraphDatabase {
    nodes: Vec<Element>,
    index: HashMap<Element, u32>,
    alphabet: Vec<Arc<str>>,
    /// `(source, label, target)` by ids, sorted.
    edges: Vec<(u32, u32, u32)>,
    /// Per node, `(label, target)` sorted.
    out: Vec<Vec<(u32, u32)>>,
}

impl GraphDatabase {
    /// Builds a graph over the given nodes and alphabet. Nodes are interned
    /// in sorted order.
    pub fn new<N, L, S, E>(nodes: N, alphabet: L, edges: E) -> Result<Self>
    where
        N: IntoIterator<Item = Element>,
        L: IntoIterator<Item = S>,
        S: AsRef<str>,
        E: IntoIterator<Item = (Element, S, Element)>,
    {
        let nodes: BTreeSet<Element> = nodes.into_iter().collect();
        let alphabet: BTreeSet<Arc<str>> = alphabet.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        let alphabet: Vec<Arc<str>> = alphabet.into_iter().collect();
        let nodes: Vec<Element> = nodes.into_iter().collect();
        let index: HashMap<Element, u32> =
            nodes.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        let mut raw = Vec::new();
        for (u, l, v) in edges {
            let node = |e: &Element| index.get(e).copied().ok_or_else(|| Error::UnknownElement(e.to_string()));
            let label = alphabet
                .binary_search_by(|a| (**a).cmp(l.as_ref()))
                .map_err(|_| Error::UnknownLabel(l.as_ref().to_owned()))?;
            raw.push((node(&u)?, label as u32, node(&v)?));
        }
        Ok(Self::from_parts(nodes, alphabet, raw))
    }

    /// Builds a graph from `(source, label, target)` triples, inferring the
    /// nodes and the alphabet.
    pub fn from_edges<I, S>(edges: I) -> Self
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let edges: Vec<(Element, String, Element)> = edges
            .into_iter()
            .map(|(u, l, v)| (u.as_ref().into(), l.as_ref().to_owned(), v.as_ref().into()))
            .collect();
        let nodes: Vec<Element> = edges.iter().flat_map(|(u, _, v)| [u.clone(), v.clone()]).collect();
        let alphabet: Vec<String> = edges.iter().map(|e| e.1.clone()).collect();
        Self::new(nodes, alphabet, edges).expect("inferred nodes and labels are present")
    }

    /// Node order is kept as given; alphabet must be sorted and distinct.
    pub(crate) fn from_parts(nodes: Vec<Element>, alphabet: Vec<Arc<str>>, mut edges: Vec<(u32, u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut out = vec![Vec::new(); nodes.len()];
        for &(u, l, v) in &edges {
            out[u as usize].push((l, v));
        }
        for o in &mut out {
            o.sort_unstable();
        }
        let index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        GraphDatabase {
            nodes,
            index,
            alphabet,
            edges,
            out,
        }
    }

    /// The same graph over the union of both alphabets.
    pub fn with_alphabet<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Self {
        let mut alphabet: BTreeSet<Arc<str>> = self.alphabet.iter().cloned().collect();
        alphabet.extend(labels.into_iter().map(|s| Arc::from(s.as_ref())));
        let alphabet: Vec<Arc<str>> = alphabet.into_iter().collect();
        let edges = self
            .edges
            .iter()
            .map(|&(u, l, v)| {
                let l = alphabet.binary_search(&self.alphabet[l as usize]).unwrap();
                (u, l as u32, v)
            })
            .collect();
        Self::from_parts(self.nodes.clone(), alphabet, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Element] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = ElemId> {
        (0..self.nodes.len() as u32).map(ElemId)
    }

    pub fn node(&self, id: ElemId) -> &Element {
        &self.nodes[id.index()]
    }

    pub fn id_of(&self, node: &Element) -> Option<ElemId> {
        self.index.get(node).map(|&i| ElemId(i))
    }

    pub fn alphabet(&self) -> &[Arc<str>] {
        &self.alphabet
    }

    pub fn label_id(&self, label: &str) -> Option<u32> {
        self.alphabet.binary_search_by(|a| (**a).cmp(label)).ok().map(|i| i as u32)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(source, label id, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (ElemId, u32, ElemId)> + '_ {
        self.edges.iter().map(|&(u, l, v)| (ElemId(u), l, ElemId(v)))
    }

    pub fn successors(&self, node: ElemId) -> &[(u32, u32)] {
        &self.out[node.index()]
    }

    pub fn has_edge(&self, u: ElemId, label: u32, v: ElemId) -> bool {
        self.out[u.index()].binary_search(&(label, v.0)).is_ok()
    }

    pub fn named_edges(&self) -> BTreeSet<(Element, Arc<str>, Element)> {
        self.edges
            .iter()
            .map(|&(u, l, v)| {
                (
                    self.nodes[u as usize].clone(),
                    self.alphabet[l as usize].clone(),
                    self.nodes[v as usize].clone(),
                )
            })
            .collect()
    }

    pub fn tuple<S: AsRef<str>>(&self, names: &[S]) -> Result<Tuple> {
        names
            .iter()
            .map(|n| {
                self.id_of(&n.as_ref().into())
                    .ok_or_else(|| Error::UnknownElement(n.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Tuple)
    }

    pub fn tuple_names(&self, tuple: &Tuple) -> Vec<String> {
        tuple.iter().map(|e| self.node(e).to_string()).collect()
    }

    /// The graph as a database with one binary relation per label. Nodes
    /// without edges have no counterpart.
    pub fn to_database(&self) -> Database {
        let schema = Schema::new(self.alphabet.iter().map(|l| (l.as_ref(), 2))).expect("labels are distinct");
        Database::new(
            schema,
            self.edges.iter().map(|&(u, l, v)| {
                (
                    self.alphabet[l as usize].clone(),
                    vec![self.nodes[u as usize].clone(), self.nodes[v as usize].clone()],
                )
            }),
        )
        .expect("edges match the schema")
    }
}

impl PartialEq for GraphDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.nodes.iter().collect::<BTreeSet<_>>() == other.nodes.iter().collect::<BTreeSet<_>>()
            && self.named_edges() == other.named_edges()
    }
}

impl Eq for GraphDatabase {}

impl fmt::Debug for GraphDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphDatabase")
            .field("nodes", &self.nodes)
            .field("edges", &self.named_edges())
            .finish()
    }
}

/// One edge per line, `source label target`.
impl fmt::Display for GraphDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, l, v) in self.named_edges() {
            writeln!(f, "{u} {l} {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedGraph {
    pub graph: Arc<GraphDatabase>,
    pub point: Tuple,
}

impl PointedGraph {
    pub fn new(graph: Arc<GraphDatabase>, point: Tuple) -> Result<Self> {
        if let Some(bad) = point.iter().find(|e| e.index() >= graph.node_count()) {
            return Err(Error::ElementOutOfRange(bad.0));
        }
        Ok(PointedGraph { graph, point })
    }

    pub fn named<S: AsRef<str>>(graph: Arc<GraphDatabase>, names: &[S]) -> Result<Self> {
        let point = graph.tuple(names)?;
        Ok(PointedGraph { graph, point })
    }
}

/// Number of nodes of the product of `factors`.
pub fn product_size<'a>(factors: impl IntoIterator<Item = &'a GraphDatabase>) -> u128 {
    factors.into_iter().map(|g| g.node_count() as u128).product()
}

pub(crate) fn check_budget(nodes: u128, budget: usize) -> Result<()> {
    if nodes > budget as u128 {
        return Err(Error::Budget { nodes, budget });
    }
    Ok(())
}

/// The product graph under the default node budget.
pub fn graph_product(factors: &[&GraphDatabase]) -> Result<GraphDatabase> {
    graph_product_with_budget(factors, DEFAULT_NODE_BUDGET)
}

/// Nodes are all tuples of factor nodes, in mixed-radix order (first factor
/// most significant); an `a`-edge joins two tuples iff every coordinate has
/// an `a`-edge.
pub fn graph_product_with_budget(factors: &[&GraphDatabase], budget: usize) -> Result<GraphDatabase> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyProduct)?;
    if rest.iter().any(|g| g.alphabet != first.alphabet) {
        return Err(Error::AlphabetMismatch);
    }
    check_budget(product_size(factors.iter().copied()), budget)?;
    if rest.is_empty() {
        return Ok((*first).clone());
    }
    let lens: Vec<usize> = factors.iter().map(|g| g.node_count()).collect();
    let mut nodes = Vec::new();
    let mut pick = vec![0usize; factors.len()];
    if lens.iter().all(|&n| n > 0) {
        loop {
            nodes.push(Element::combine(
                factors.iter().zip(&pick).map(|(g, &i)| &g.nodes[i]),
            ));
            if !advance(&mut pick, &lens) {
                break;
            }
        }
    }
    let mut edges = Vec::new();
    for label in 0..first.alphabet.len() as u32 {
        let per: Vec<Vec<(u32, u32)>> = factors
            .iter()
            .map(|g| {
                g.edges
                    .iter()
                    .filter(|e| e.1 == label)
                    .map(|&(u, _, v)| (u, v))
                    .collect()
            })
            .collect();
        let elens: Vec<usize> = per.iter().map(Vec::len).collect();
        if elens.contains(&0) {
            continue;
        }
        let mut pick = vec![0usize; factors.len()];
        let mut src = vec![0u32; factors.len()];
        let mut dst = vec![0u32; factors.len()];
        loop {
            for (f, &i) in pick.iter().enumerate() {
                (src[f], dst[f]) = per[f][i];
            }
            edges.push((product_id(&src, &lens), label, product_id(&dst, &lens)));
            if !advance(&mut pick, &elens) {
                break;
            }
        }
    }
    Ok(GraphDatabase::from_parts(nodes, first.alphabet.clone(), edges))
}

/// Mixed-radix node id of a product of graphs with the given node counts.
pub(crate) fn product_id(coords: &[u32], lens: &[usize]) -> u32 {
    coords
        .iter()
        .zip(lens)
        .fold(0usize, |acc, (&c, &n)| acc * n + c as usize) as u32
}

/// Coordinates of a mixed-radix product node id.
pub(crate) fn product_coords(mut id: usize, lens: &[usize], out: &mut [u32]) {
    for (slot, &n) in out.iter_mut().zip(lens).rev() {
        *slot = (id % n) as u32;
        id /= n;
    }
}

/// A nondeterministic automaton without ε-transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<Arc<str>>,
    /// Per state, `(label, target)` sorted.
    delta: Vec<Vec<(u32, u32)>>,
    start: Vec<u32>,
    finals: FixedBitSet,
}

impl Nfa {
    pub fn new<L, S, T, I, F>(states: usize, alphabet: L, transitions: T, start: I, finals: F) -> Result<Self>
    where
        L: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator<Item = (u32, S, u32)>,
        I: IntoIterator<Item = u32>,
        F: IntoIterator<Item = u32>,
    {
        let alphabet: BTreeSet<Arc<str>> = alphabet.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        let alphabet: Vec<Arc<str>> = alphabet.into_iter().collect();
        let state = |q: u32| {
            if (q as usize) < states {
                Ok(q)
            } else {
                Err(Error::ElementOutOfRange(q))
            }
        };
        let mut delta = vec![Vec::new(); states];
        for (p, l, q) in transitions {
            let l = alphabet
                .binary_search_by(|a| (**a).cmp(l.as_ref()))
                .map_err(|_| Error::UnknownLabel(l.as_ref().to_owned()))?;
            delta[state(p)? as usize].push((l as u32, state(q)?));
        }
        for d in &mut delta {
            d.sort_unstable();
            d.dedup();
        }
        let start: BTreeSet<u32> = start.into_iter().map(state).collect::<Result<_>>()?;
        let mut fin = FixedBitSet::with_capacity(states);
        for q in finals {
            fin.insert(state(q)? as usize);
        }
        Ok(Nfa {
            alphabet,
            delta,
            start: start.into_iter().collect(),
            finals: fin,
        })
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn alphabet(&self) -> &[Arc<str>] {
        &self.alphabet
    }

    pub fn start(&self) -> &[u32] {
        &self.start
    }

    pub fn is_final(&self, q: u32) -> bool {
        self.finals.contains(q as usize)
    }

    /// Transitions as `(source, label, target)`.
    pub fn transitions(&self) -> impl Iterator<Item = (u32, &str, u32)> + '_ {
        self.delta.iter().enumerate().flat_map(move |(p, d)| {
            d.iter().map(move |&(l, q)| (p as u32, self.alphabet[l as usize].as_ref(), q))
        })
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut cur = FixedBitSet::with_capacity(self.state_count());
        for &q in &self.start {
            cur.insert(q as usize);
        }
        for sym in word {
            let Some(l) = self.alphabet.iter().position(|a| a.as_ref() == sym.as_ref()) else {
                return false;
            };
            let mut next = FixedBitSet::with_capacity(self.state_count());
            for p in cur.ones() {
                for &(m, q) in &self.delta[p] {
                    if m == l as u32 {
                        next.insert(q as usize);
                    }
                }
            }
            cur = next;
        }
        cur.ones().any(|q| self.finals.contains(q))
    }
}

/// The automaton of labels of paths from `from` to `to`: the graph itself
/// with start `{from}` and final `{to}`.
pub fn pair_language(g: &GraphDatabase, from: ElemId, to: ElemId) -> Result<Nfa> {
    for v in [from, to] {
        if v.index() >= g.node_count() {
            return Err(Error::ElementOutOfRange(v.0));
        }
    }
    let mut finals = FixedBitSet::with_capacity(g.node_count());
    finals.insert(to.index());
    Ok(Nfa {
        alphabet: g.alphabet.clone(),
        delta: g.out.clone(),
        start: vec![from.0],
        finals,
    })
}

/// Whether `L(a) ⊆ L(b)`.
pub fn contains(a: &Nfa, b: &Nfa) -> bool {
    counterexample(a, b).is_none()
}

/// A shortest word of `L(a) \ L(b)`, if any.
///
/// Explores the product of `a` with the subset automaton of `b`, reachable
/// part only; the empty subset is the dead state of the completed
/// determinization. Breadth-first, labels in sorted order, so the result is
/// deterministic.
pub fn counterexample(a: &Nfa, b: &Nfa) -> Option<Vec<Arc<str>>> {
    let union: BTreeSet<&Arc<str>> = a.alphabet.iter().chain(&b.alphabet).collect();
    let union: Vec<Arc<str>> = union.into_iter().cloned().collect();
    let remap = |nfa: &Nfa| -> Vec<Vec<(u32, u32)>> {
        let to: Vec<u32> = nfa
            .alphabet
            .iter()
            .map(|l| union.binary_search(l).unwrap() as u32)
            .collect();
        nfa.delta
            .iter()
            .map(|d| {
                let mut d: Vec<(u32, u32)> = d.iter().map(|&(l, q)| (to[l as usize], q)).collect();
                d.sort_unstable();
                d
            })
            .collect()
    };
    let a_delta = remap(a);
    let b_delta = remap(b);
    let nb = b.state_count();
    let post = |s: &FixedBitSet, l: u32| {
        let mut out = FixedBitSet::with_capacity(nb);
        for p in s.ones() {
            for &(m, q) in &b_delta[p] {
                if m == l {
                    out.insert(q as usize);
                }
            }
        }
        out
    };

    let mut b_start = FixedBitSet::with_capacity(nb);
    for &q in &b.start {
        b_start.insert(q as usize);
    }
    let mut seen: HashMap<(u32, FixedBitSet), usize> = HashMap::new();
    let mut states: Vec<(u32, FixedBitSet)> = Vec::new();
    let mut parent: Vec<Option<(usize, u32)>> = Vec::new();
    let mut queue = VecDeque::new();
    let rejects = |p: u32, s: &FixedBitSet| a.is_final(p) && !s.ones().any(|q| b.finals.contains(q));
    let word = |mut i: usize, parent: &[Option<(usize, u32)>]| {
        let mut w = Vec::new();
        while let Some((prev, l)) = parent[i] {
            w.push(union[l as usize].clone());
            i = prev;
        }
        w.reverse();
        w
    };

    for &p in &a.start {
        let key = (p, b_start.clone());
        if seen.contains_key(&key) {
            continue;
        }
        if rejects(p, &b_start) {
            return Some(Vec::new());
        }
        seen.insert(key.clone(), states.len());
        states.push(key);
        parent.push(None);
        queue.push_back(states.len() - 1);
    }
    while let Some(i) = queue.pop_front() {
        let (p, s) = states[i].clone();
        let mut last: Option<(u32, FixedBitSet)> = None;
        for &(l, q) in &a_delta[p as usize] {
            let next = match &last {
                Some((m, t)) if *m == l => t.clone(),
                _ => {
                    let t = post(&s, l);
                    last = Some((l, t.clone()));
                    t
                }
            };
            let key = (q, next);
            if seen.contains_key(&key) {
                continue;
            }
            let hit = rejects(q, &key.1);
            seen.insert(key.clone(), states.len());
            states.push(key);
            parent.push(Some((i, l)));
            if hit {
                return Some(word(states.len() - 1, &parent));
            }
            queue.push_back(states.len() - 1);
        }
    }
    None
}

/// For a fixed factor node `v` and target node `u`: per factor node `v'`,
/// the target nodes `u'` with `L_{v,v'} ⊆ L_{u,u'}`. Unreachable `v'` have
/// an empty language and get every target node.
pub(crate) struct Row {
    per: Vec<FixedBitSet>,
}

impl Row {
    pub fn allows(&self, v2: u32, u2: u32) -> bool {
        self.per[v2 as usize].contains(u2 as usize)
    }

    pub fn set(&self, v2: u32) -> &FixedBitSet {
        &self.per[v2 as usize]
    }
}

/// Memoized containments between pair languages of factor graphs and of a
/// target graph.
///
/// Rows are computed on first use: one exploration of `(factor node,
/// subset of target nodes)` pairs from `(v, {u})` answers every query with
/// that `(factor, v, u)`. Equal factor graphs share rows. Safe for
/// concurrent readers.
pub struct ContainmentCache {
    slots: Vec<Arc<GraphDatabase>>,
    slot_of: Vec<usize>,
    /// Per slot, factor label id to target label id.
    labels: Vec<Vec<Option<u32>>>,
    /// Per slot and node, the nodes reachable from it (itself included).
    reach: Vec<Vec<FixedBitSet>>,
    /// `post[label][node]`: targets of `label`-edges in the target graph.
    post: Vec<Vec<Vec<u32>>>,
    target_nodes: usize,
    rows: RwLock<HashMap<(u32, u32, u32), Arc<Row>>>,
    hits: AtomicU64,
    computed: AtomicU64,
}

impl ContainmentCache {
    pub fn new(factors: &[Arc<GraphDatabase>], target: &GraphDatabase) -> Self {
        let mut slots: Vec<Arc<GraphDatabase>> = Vec::new();
        let mut slot_of = Vec::new();
        for f in factors {
            match slots.iter().position(|s| Arc::ptr_eq(s, f) || **s == **f) {
                Some(i) => slot_of.push(i),
                None => {
                    slot_of.push(slots.len());
                    slots.push(f.clone());
                }
            }
        }
        let labels = slots
            .iter()
            .map(|s| s.alphabet.iter().map(|l| target.label_id(l)).collect())
            .collect();
        let reach = slots.iter().map(|s| reachability(s)).collect();
        let mut post = vec![vec![Vec::new(); target.node_count()]; target.alphabet.len()];
        for &(u, l, v) in &target.edges {
            post[l as usize][u as usize].push(v);
        }
        ContainmentCache {
            slots,
            slot_of,
            labels,
            reach,
            post,
            target_nodes: target.node_count(),
            rows: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            computed: AtomicU64::new(0),
        }
    }

    pub fn factor_count(&self) -> usize {
        self.slot_of.len()
    }

    /// Whether `L^{G_factor}_{v,v'} ⊆ L^{G}_{u,u'}`.
    pub fn contained(&self, factor: usize, v: ElemId, v2: ElemId, u: ElemId, u2: ElemId) -> bool {
        self.row(factor, v.0, u.0).allows(v2.0, u2.0)
    }

    /// Whether `L^{G_factor}_{v,v'}` is nonempty.
    pub fn reachable(&self, factor: usize, v: ElemId, v2: ElemId) -> bool {
        self.reach[self.slot_of[factor]][v.index()].contains(v2.index())
    }

    pub(crate) fn row(&self, factor: usize, v: u32, u: u32) -> Arc<Row> {
        let key = (self.slot_of[factor] as u32, v, u);
        if let Some(row) = self.rows.read().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return row.clone();
        }
        let row = Arc::new(self.compute(key));
        let mut rows = self.rows.write().unwrap();
        match rows.get(&key) {
            // another thread got here first; values are identical
            Some(prev) => prev.clone(),
            None => {
                self.computed.fetch_add(1, Ordering::Relaxed);
                rows.insert(key, row.clone());
                row
            }
        }
    }

    /// Computes every row up front.
    pub fn precompute(&self) {
        let keys: Vec<(usize, u32, u32)> = (0..self.slots.len())
            .flat_map(|s| {
                let n = self.slots[s].node_count() as u32;
                let m = self.target_nodes as u32;
                (0..n).flat_map(move |v| (0..m).map(move |u| (s, v, u)))
            })
            .collect();
        keys.par_iter().for_each(|&(s, v, u)| {
            let factor = self.slot_of.iter().position(|&x| x == s).unwrap();
            self.row(factor, v, u);
        });
    }

    /// Lookups answered from the memo.
    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    /// Rows computed so far.
    pub fn computed(&self) -> u64 {
        self.computed.load(Ordering::Relaxed)
    }

    fn compute(&self, (slot, v, u): (u32, u32, u32)) -> Row {
        let g = &self.slots[slot as usize];
        let labels = &self.labels[slot as usize];
        let m = self.target_nodes;
        let mut start = FixedBitSet::with_capacity(m);
        start.insert(u as usize);
        let mut seen: HashMap<(u32, FixedBitSet), ()> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut per: Vec<Option<FixedBitSet>> = vec![None; g.node_count()];
        seen.insert((v, start.clone()), ());
        queue.push_back((v, start));
        while let Some((x, s)) = queue.pop_front() {
            match &mut per[x as usize] {
                Some(acc) => acc.intersect_with(&s),
                slot => *slot = Some(s.clone()),
            }
            for &(l, y) in &g.out[x as usize] {
                let mut next = FixedBitSet::with_capacity(m);
                if let Some(t) = labels[l as usize] {
                    for p in s.ones() {
                        for &q in &self.post[t as usize][p] {
                            next.insert(q as usize);
                        }
                    }
                }
                let key = (y, next);
                if !seen.contains_key(&key) {
                    seen.insert(key.clone(), ());
                    queue.push_back(key);
                }
            }
        }
        let mut full = FixedBitSet::with_capacity(m);
        full.insert_range(..);
        Row {
            per: per.into_iter().map(|s| s.unwrap_or_else(|| full.clone())).collect(),
        }
    }
}

fn reachability(g: &GraphDatabase) -> Vec<FixedBitSet> {
    let n = g.node_count();
    (0..n)
        .map(|v| {
            let mut seen = FixedBitSet::with_capacity(n);
            seen.insert(v);
            let mut stack = vec![v as u32];
            while let Some(x) = stack.pop() {
                for &(_, y) in &g.out[x as usize] {
                    if !seen.put(y as usize) {
                        stack.push(y);
                    }
                }
            }
            seen
        })
        .collect()
}

//! Strong homomorphisms, the strong pebble game, and the QBE and
//! definability tests for CRPQs and CTW(k).
//!
//! A strong homomorphism from a product of pointed graphs to a pointed
//! graph is a total map `h` on all product nodes such that for every
//! ordered pair `(x, y)` of product nodes, reflexive pairs included, some
//! coordinate `i` has `L^{G_i}_{x_i,y_i} ⊆ L^G_{h(x),h(y)}`. Pairs where some
//! coordinate language is empty hold trivially.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{check_budget, product_coords, product_id, product_size, ContainmentCache, GraphDatabase, PointedGraph};
use crate::limits::Limits;
use crate::model::{ElemId, Element, ExampleSets, Tuple};
use crate::pebble::{Admissible, Arena, DeletionOrder};
use crate::qbe::{all_tuples, first_failure, outside, Class, Engine, Verdict, Witness};

/// A total map from product nodes (by mixed-radix id, first factor most
/// significant) to target nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongAssignment(Vec<ElemId>);

impl StrongAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, node: usize) -> ElemId {
        self.0[node]
    }

    pub fn images(&self) -> &[ElemId] {
        &self.0
    }

    /// Product node names (flattened factor names) to target node names.
    pub fn named(&self, factors: &[&GraphDatabase], target: &GraphDatabase) -> BTreeMap<Element, Element> {
        let lens: Vec<usize> = factors.iter().map(|g| g.node_count()).collect();
        let mut coords = vec![0u32; factors.len()];
        self.0
            .iter()
            .enumerate()
            .map(|(x, &u)| {
                product_coords(x, &lens, &mut coords);
                let name = Element::combine(
                    factors.iter().zip(&coords).map(|(g, &c)| g.node(ElemId(c))),
                );
                (name, target.node(u).clone())
            })
            .collect()
    }
}

/// Counters of the containment cache used by a test.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub rows: u64,
}

/// A product of pointed graphs against a target, with its containment
/// oracle.
struct Strong<'a> {
    lens: Vec<usize>,
    n: usize,
    m: usize,
    coords: Vec<u32>,
    cache: &'a ContainmentCache,
    point: Vec<(u32, u32)>,
}

impl<'a> Strong<'a> {
    fn new(
        factors: &[PointedGraph],
        target: &PointedGraph,
        cache: &'a ContainmentCache,
        limits: &Limits,
    ) -> Result<Self> {
        validate(factors, target)?;
        check_budget(product_size(factors.iter().map(|f| &*f.graph)), limits.node_budget)?;
        let lens: Vec<usize> = factors.iter().map(|f| f.graph.node_count()).collect();
        let n: usize = lens.iter().product();
        let width = factors.len();
        let mut coords = vec![0u32; n * width];
        for x in 0..n {
            product_coords(x, &lens, &mut coords[x * width..(x + 1) * width]);
        }
        let arity = target.point.arity();
        let point = (0..arity)
            .map(|j| {
                let c: Vec<u32> = factors.iter().map(|f| f.point[j].0).collect();
                (product_id(&c, &lens), target.point[j].0)
            })
            .collect();
        Ok(Strong {
            lens,
            n,
            m: target.graph.node_count(),
            coords,
            cache,
            point,
        })
    }

    fn coords(&self, x: u32) -> &[u32] {
        let w = self.lens.len();
        &self.coords[x as usize * w..(x as usize + 1) * w]
    }

    /// Whether the ordered pair `(x ↦ u, y ↦ v)` satisfies the containment
    /// condition on some coordinate.
    fn allows(&self, x: u32, u: u32, y: u32, v: u32) -> bool {
        let (cx, cy) = (self.coords(x), self.coords(y));
        (0..cx.len()).any(|i| self.cache.row(i, cx[i], u).allows(cy[i], v))
    }

    /// Target nodes `v` allowed for `y` once `x ↦ u`, in the `(x, y)`
    /// direction only.
    fn allowed_forward(&self, x: u32, u: u32, y: u32) -> FixedBitSet {
        let (cx, cy) = (self.coords(x), self.coords(y));
        let mut out = FixedBitSet::with_capacity(self.m);
        for i in 0..cx.len() {
            out.union_with(self.cache.row(i, cx[i], u).set(cy[i]));
        }
        out
    }

    /// Whether the pair `(x, y)` constrains anything: every coordinate
    /// language is nonempty.
    fn nontrivial(&self, x: u32, y: u32) -> bool {
        let (cx, cy) = (self.coords(x), self.coords(y));
        (0..cx.len()).all(|i| self.cache.reachable(i, ElemId(cx[i]), ElemId(cy[i])))
    }
}

fn validate(factors: &[PointedGraph], target: &PointedGraph) -> Result<()> {
    if factors.is_empty() {
        return Err(Error::EmptyProduct);
    }
    for f in factors {
        if f.graph.alphabet() != target.graph.alphabet() {
            return Err(Error::AlphabetMismatch);
        }
        if f.point.arity() != target.point.arity() {
            return Err(Error::TupleArity {
                expected: f.point.arity(),
                found: target.point.arity(),
            });
        }
    }
    Ok(())
}

fn cache_for(factors: &[PointedGraph], target: &PointedGraph) -> ContainmentCache {
    let graphs: Vec<Arc<GraphDatabase>> = factors.iter().map(|f| f.graph.clone()).collect();
    ContainmentCache::new(&graphs, &target.graph)
}

/// Backtracking over the constraint graph of nontrivial pairs, one
/// connected component at a time, with forward checking and
/// smallest-domain-first variable choice.
struct Solver<'s, 'a> {
    s: &'s Strong<'a>,
    limits: &'s Limits,
    neighbors: Vec<Vec<u32>>,
    domains: Vec<FixedBitSet>,
    image: Vec<Option<u32>>,
}

impl Solver<'_, '_> {
    fn search(&mut self, component: &[u32]) -> Result<bool> {
        self.limits.check_deadline()?;
        let Some(x) = component
            .iter()
            .copied()
            .filter(|&x| self.image[x as usize].is_none())
            .min_by_key(|&x| (self.domains[x as usize].count_ones(..), x))
        else {
            return Ok(true);
        };
        let values: Vec<usize> = self.domains[x as usize].ones().collect();
        for u in values {
            let u = u as u32;
            self.image[x as usize] = Some(u);
            let mut trail: Vec<(u32, FixedBitSet)> = Vec::new();
            let mut wiped = false;
            for i in 0..self.neighbors[x as usize].len() {
                let y = self.neighbors[x as usize][i];
                if self.image[y as usize].is_some() {
                    continue;
                }
                let mut next = self.s.allowed_forward(x, u, y);
                next.intersect_with(&self.domains[y as usize]);
                let keep: Vec<usize> = next
                    .ones()
                    .filter(|&v| self.s.allows(y, v as u32, x, u))
                    .collect();
                let mut reduced = FixedBitSet::with_capacity(self.s.m);
                reduced.extend(keep);
                if reduced != self.domains[y as usize] {
                    let old = std::mem::replace(&mut self.domains[y as usize], reduced);
                    trail.push((y, old));
                }
                if self.domains[y as usize].is_clear() {
                    wiped = true;
                    break;
                }
            }
            if !wiped && self.search(component)? {
                return Ok(true);
            }
            for (y, old) in trail.into_iter().rev() {
                self.domains[y as usize] = old;
            }
        }
        self.image[x as usize] = None;
        Ok(false)
    }
}

fn solve(s: &Strong<'_>, limits: &Limits) -> Result<Option<StrongAssignment>> {
    let mut pinned: Vec<Option<u32>> = vec![None; s.n];
    for &(x, u) in &s.point {
        match pinned[x as usize] {
            Some(prev) if prev != u => return Ok(None),
            _ => pinned[x as usize] = Some(u),
        }
    }
    // pins must agree with each other before any search
    for &(x, u) in &s.point {
        for &(y, v) in &s.point {
            if !s.allows(x, u, y, v) {
                return Ok(None);
            }
        }
    }
    let mut domains = Vec::with_capacity(s.n);
    for x in 0..s.n as u32 {
        let mut d = FixedBitSet::with_capacity(s.m);
        let candidates = match pinned[x as usize] {
            Some(u) => u..u + 1,
            None => 0..s.m as u32,
        };
        for u in candidates {
            if s.allows(x, u, x, u) && s.point.iter().all(|&(p, v)| s.allows(x, u, p, v) && s.allows(p, v, x, u)) {
                d.insert(u as usize);
            }
        }
        if d.is_clear() {
            return Ok(None);
        }
        domains.push(d);
    }
    let mut neighbors = vec![Vec::new(); s.n];
    for x in 0..s.n as u32 {
        for y in x + 1..s.n as u32 {
            if s.nontrivial(x, y) || s.nontrivial(y, x) {
                neighbors[x as usize].push(y);
                neighbors[y as usize].push(x);
            }
        }
    }
    let mut component_of = vec![usize::MAX; s.n];
    let mut components: Vec<Vec<u32>> = Vec::new();
    for x in 0..s.n {
        if component_of[x] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![x as u32];
        component_of[x] = id;
        let mut at = 0;
        while at < members.len() {
            let y = members[at];
            at += 1;
            for &z in &neighbors[y as usize] {
                if component_of[z as usize] == usize::MAX {
                    component_of[z as usize] = id;
                    members.push(z);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    let mut solver = Solver {
        s,
        limits,
        neighbors,
        domains,
        image: vec![None; s.n],
    };
    for component in &components {
        if !solver.search(component)? {
            return Ok(None);
        }
    }
    Ok(Some(StrongAssignment(
        solver
            .image
            .into_iter()
            .map(|u| ElemId(u.expect("every component is solved")))
            .collect(),
    )))
}

/// Finds a strong homomorphism from the product of `factors` to `target`.
pub fn strong_hom(factors: &[PointedGraph], target: &PointedGraph) -> Result<Option<StrongAssignment>> {
    let cache = cache_for(factors, target);
    strong_hom_with(factors, target, &cache, &Limits::default())
}

/// As [`strong_hom`], sharing `cache`, which must have been built for the
/// same factor graphs (in order) and target graph.
pub fn strong_hom_with(
    factors: &[PointedGraph],
    target: &PointedGraph,
    cache: &ContainmentCache,
    limits: &Limits,
) -> Result<Option<StrongAssignment>> {
    let s = Strong::new(factors, target, cache, limits)?;
    solve(&s, limits)
}

/// Checks every condition on a claimed strong homomorphism: totality, the
/// point, and every ordered pair of product nodes.
pub fn check_strong_hom(factors: &[PointedGraph], target: &PointedGraph, h: &StrongAssignment) -> Result<bool> {
    let cache = cache_for(factors, target);
    let s = Strong::new(factors, target, &cache, &Limits::default())?;
    if h.len() != s.n || h.0.iter().any(|u| u.index() >= s.m) {
        return Ok(false);
    }
    if s.point.iter().any(|&(x, u)| h.0[x as usize].0 != u) {
        return Ok(false);
    }
    Ok((0..s.n as u32).all(|x| (0..s.n as u32).all(|y| s.allows(x, h.0[x as usize].0, y, h.0[y as usize].0))))
}

/// Strong partial homomorphism admissibility: the new pair, against itself
/// and in both directions against every pair already placed (the point
/// included).
struct StrongCheck<'s, 'a>(&'s Strong<'a>);

impl Admissible for StrongCheck<'_, '_> {
    fn admits(&self, base: &[(u32, u32)], c: u32, d: u32) -> bool {
        let s = self.0;
        s.allows(c, d, c, d) && base.iter().all(|&(x, y)| s.allows(c, d, x, y) && s.allows(x, y, c, d))
    }
}

fn strong_game(s: &Strong<'_>, k: usize) -> bool {
    let check = StrongCheck(s);
    let arena = Arena {
        n_src: s.n,
        n_dst: s.m,
        k,
        point: &s.point,
        adm: &check,
    };
    arena.solve(DeletionOrder::Fifo).is_some_and(|f| f.empty_survives())
}

/// Decides `∏ (G_i, ā_i) ⇒_k (G, b̄)`.
pub fn strong_pebble_game(factors: &[PointedGraph], target: &PointedGraph, k: usize) -> Result<bool> {
    let cache = cache_for(factors, target);
    strong_pebble_game_with(factors, target, k, &cache, &Limits::default())
}

pub fn strong_pebble_game_with(
    factors: &[PointedGraph],
    target: &PointedGraph,
    k: usize,
    cache: &ContainmentCache,
    limits: &Limits,
) -> Result<bool> {
    if k < 2 {
        return Err(Error::PebbleCount(k));
    }
    let s = Strong::new(factors, target, cache, limits)?;
    Ok(strong_game(&s, k))
}

fn check_examples(g: &GraphDatabase, ex: &ExampleSets) -> Result<()> {
    for t in ex.positive().iter().chain(ex.negative()) {
        if let Some(bad) = t.iter().find(|e| e.index() >= g.node_count()) {
            return Err(Error::ElementOutOfRange(bad.0));
        }
    }
    Ok(())
}

fn positive_factors(g: &Arc<GraphDatabase>, ex: &ExampleSets) -> Vec<PointedGraph> {
    ex.positive()
        .iter()
        .map(|a| PointedGraph {
            graph: g.clone(),
            point: a.clone(),
        })
        .collect()
}

impl Engine {
    fn strong_test(
        &self,
        g: &Arc<GraphDatabase>,
        ex: &ExampleSets,
        against: &[Tuple],
        pebbles: Option<usize>,
    ) -> Result<(Verdict, CacheStats)> {
        check_examples(g, ex)?;
        if let Some(k) = pebbles {
            if k < 2 {
                return Err(Error::PebbleCount(k));
            }
        }
        let factors = positive_factors(g, ex);
        let graphs: Vec<Arc<GraphDatabase>> = vec![g.clone(); factors.len()];
        check_budget(product_size(graphs.iter().map(|g| &**g)), self.limits.node_budget)?;
        let cache = ContainmentCache::new(&graphs, g);
        let failure = first_failure(&self.limits, against, |b| {
            let target = PointedGraph {
                graph: g.clone(),
                point: b.clone(),
            };
            let s = Strong::new(&factors, &target, &cache, &self.limits)?;
            Ok(match pebbles {
                None => solve(&s, &self.limits)?.map(|h| {
                    let refs: Vec<&GraphDatabase> = graphs.iter().map(|g| &**g).collect();
                    Some(h.named(&refs, g))
                }),
                Some(k) => strong_game(&s, k).then_some(None),
            })
        })?;
        let stats = CacheStats {
            hits: cache.hits(),
            rows: cache.computed(),
        };
        let verdict = match failure {
            None => Verdict::accept(),
            Some((i, assignment)) => Verdict::reject(Witness::FailingNegative {
                tuple: against[i].clone(),
                assignment,
            }),
        };
        Ok((verdict, stats))
    }

    /// Accepts iff no negative receives a strong homomorphism from the
    /// product of the positives. No safety clause.
    pub fn qbe_test_crpq(&self, g: &Arc<GraphDatabase>, ex: &ExampleSets) -> Result<Verdict> {
        let neg: Vec<Tuple> = ex.negative().iter().cloned().collect();
        Ok(self.strong_test(g, ex, &neg, None)?.0)
    }

    pub fn definability_test_crpq(&self, g: &Arc<GraphDatabase>, ex: &ExampleSets) -> Result<Verdict> {
        Ok(self.strong_test(g, ex, &outside(g.node_count(), ex), None)?.0)
    }

    /// `k` is the number of pebbles; CTW(k) is decided with `k + 1`.
    pub fn qbe_test_crpq_pebble(&self, g: &Arc<GraphDatabase>, ex: &ExampleSets, k: usize) -> Result<Verdict> {
        let neg: Vec<Tuple> = ex.negative().iter().cloned().collect();
        Ok(self.strong_test(g, ex, &neg, Some(k))?.0)
    }

    pub fn definability_test_crpq_pebble(
        &self,
        g: &Arc<GraphDatabase>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<Verdict> {
        Ok(self.strong_test(g, ex, &outside(g.node_count(), ex), Some(k))?.0)
    }

    /// Dispatches a graph class, returning the cache counters as well.
    pub fn graph_test(
        &self,
        g: &Arc<GraphDatabase>,
        ex: &ExampleSets,
        class: Class,
        define: bool,
    ) -> Result<(Verdict, CacheStats)> {
        let pebbles = match class {
            Class::Crpq => None,
            Class::Ctw(_) => class.game_parameter()?,
            _ => return Err(Error::Precondition("relational class on a graph database")),
        };
        let against: Vec<Tuple> = if define {
            outside(g.node_count(), ex)
        } else {
            ex.negative().iter().cloned().collect()
        };
        self.strong_test(g, ex, &against, pebbles)
    }

    /// The result over `g` of some CTW(k)-explanation: every tuple the
    /// product of the positives reaches under the strong (k+1)-pebble game.
    pub fn evaluate_ctw_explanation(
        &self,
        g: &Arc<GraphDatabase>,
        ex: &ExampleSets,
        k: usize,
    ) -> Result<BTreeSet<Tuple>> {
        if k == 0 {
            return Err(Error::Treewidth(0));
        }
        if !self.qbe_test_crpq_pebble(g, ex, k + 1)?.accepted {
            return Err(Error::Precondition("the strong (k+1)-pebble test rejected"));
        }
        let factors = positive_factors(g, ex);
        let graphs: Vec<Arc<GraphDatabase>> = vec![g.clone(); factors.len()];
        let cache = ContainmentCache::new(&graphs, g);
        let tuples = all_tuples(g.node_count(), ex.arity());
        let mut out = BTreeSet::new();
        for b in tuples {
            self.limits.check_deadline()?;
            let target = PointedGraph {
                graph: g.clone(),
                point: b.clone(),
            };
            let s = Strong::new(&factors, &target, &cache, &self.limits)?;
            if strong_game(&s, k + 1) {
                out.insert(b);
            }
        }
        Ok(out)
    }
}

pub fn qbe_test_crpq(g: &Arc<GraphDatabase>, ex: &ExampleSets) -> Result<Verdict> {
    Engine::default().qbe_test_crpq(g, ex)
}

pub fn definability_test_crpq(g: &Arc<GraphDatabase>, ex: &ExampleSets) -> Result<Verdict> {
    Engine::default().definability_test_crpq(g, ex)
}

pub fn qbe_test_crpq_pebble(g: &Arc<GraphDatabase>, ex: &ExampleSets, k: usize) -> Result<Verdict> {
    Engine::default().qbe_test_crpq_pebble(g, ex, k)
}

pub fn definability_test_crpq_pebble(g: &Arc<GraphDatabase>, ex: &ExampleSets, k: usize) -> Result<Verdict> {
    Engine::default().definability_test_crpq_pebble(g, ex, k)
}

pub fn evaluate_ctw_explanation(g: &Arc<GraphDatabase>, ex: &ExampleSets, k: usize) -> Result<BTreeSet<Tuple>> {
    Engine::default().evaluate_ctw_explanation(g, ex, k)
}

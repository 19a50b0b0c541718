use std::collections::{HashMap, HashSet};

use qbe_core::{ElemId, GraphDatabase, PointedDatabase, PointedGraph};

use crate::words::language_contained;

/// How the spoiler opens the game.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Convention {
    /// Pebbles go down one at a time; any pebble may be lifted or moved.
    Incremental,
    /// All `k` pebbles go down in the first round; afterwards one pebble
    /// moves per round.
    Simultaneous,
}

/// A source and target with a whole-configuration consistency check.
trait Positions {
    fn n_src(&self) -> usize;
    fn n_dst(&self) -> usize;
    /// Whether the pairs together with the point form an admissible
    /// partial map. Checked from scratch each time.
    fn consistent(&self, pairs: &[(usize, usize)]) -> bool;
}

fn with_point(point: &[(usize, usize)], pairs: &[(usize, usize)]) -> Option<HashMap<usize, usize>> {
    let mut map = HashMap::new();
    for &(c, d) in point.iter().chain(pairs) {
        if *map.entry(c).or_insert(d) != d {
            return None;
        }
    }
    Some(map)
}

struct Relational {
    n: usize,
    m: usize,
    point: Vec<(usize, usize)>,
    atoms: Vec<(String, Vec<usize>)>,
    facts: HashSet<(String, Vec<usize>)>,
}

impl Relational {
    fn new(src: &PointedDatabase, dst: &PointedDatabase) -> Self {
        let named = |p: &PointedDatabase| -> Vec<(String, Vec<usize>)> {
            p.db.atoms()
                .iter()
                .map(|a| (p.db.schema().name(a.rel).to_owned(), a.args.iter().map(|e| e.index()).collect()))
                .collect()
        };
        Relational {
            n: src.db.domain_size(),
            m: dst.db.domain_size(),
            point: src.point.iter().zip(dst.point.iter()).map(|(a, b)| (a.index(), b.index())).collect(),
            atoms: named(src),
            facts: named(dst).into_iter().collect(),
        }
    }
}

impl Positions for Relational {
    fn n_src(&self) -> usize {
        self.n
    }

    fn n_dst(&self) -> usize {
        self.m
    }

    fn consistent(&self, pairs: &[(usize, usize)]) -> bool {
        let Some(map) = with_point(&self.point, pairs) else {
            return false;
        };
        self.atoms.iter().all(|(r, args)| {
            let image: Option<Vec<usize>> = args.iter().map(|a| map.get(a).copied()).collect();
            image.is_none_or(|image| self.facts.contains(&(r.clone(), image)))
        })
    }
}

struct Strong {
    /// Per product node, its factor coordinates.
    nodes: Vec<Vec<usize>>,
    m: usize,
    point: Vec<(usize, usize)>,
    /// `contained[i][(x_i, y_i, u, v)]`.
    contained: Vec<HashMap<(usize, usize, usize, usize), bool>>,
}

impl Strong {
    fn new(factors: &[PointedGraph], target: &PointedGraph) -> Self {
        let sizes: Vec<usize> = factors.iter().map(|f| f.graph.node_count()).collect();
        let mut nodes = vec![Vec::new()];
        for &s in &sizes {
            nodes = nodes
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (0..s).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        let m = target.graph.node_count();
        let point = (0..target.point.len())
            .map(|j| {
                let coords: Vec<usize> = factors.iter().map(|f| f.point[j].index()).collect();
                let x = nodes.iter().position(|n| *n == coords).unwrap();
                (x, target.point[j].index())
            })
            .collect();
        let contained = factors
            .iter()
            .map(|f| table(&f.graph, &target.graph))
            .collect();
        Strong {
            nodes,
            m,
            point,
            contained,
        }
    }

    fn pair_ok(&self, (x, u): (usize, usize), (y, v): (usize, usize)) -> bool {
        (0..self.contained.len()).any(|i| self.contained[i][&(self.nodes[x][i], self.nodes[y][i], u, v)])
    }
}

fn table(g: &GraphDatabase, target: &GraphDatabase) -> HashMap<(usize, usize, usize, usize), bool> {
    let mut out = HashMap::new();
    for x in 0..g.node_count() {
        for y in 0..g.node_count() {
            for u in 0..target.node_count() {
                for v in 0..target.node_count() {
                    let id = |i: usize| ElemId(i as u32);
                    out.insert((x, y, u, v), language_contained(g, id(x), id(y), target, id(u), id(v)));
                }
            }
        }
    }
    out
}

impl Positions for Strong {
    fn n_src(&self) -> usize {
        self.nodes.len()
    }

    fn n_dst(&self) -> usize {
        self.m
    }

    fn consistent(&self, pairs: &[(usize, usize)]) -> bool {
        let Some(map) = with_point(&self.point, pairs) else {
            return false;
        };
        map.iter().all(|(&x, &u)| map.iter().all(|(&y, &v)| self.pair_ok((x, u), (y, v))))
    }
}

/// Slot contents: 0 is an empty slot, `1 + c * m + d` holds `c ↦ d`.
fn decode(cfg: usize, k: usize, base: usize, m: usize, out: &mut Vec<(usize, usize)>) -> Vec<usize> {
    out.clear();
    let mut slots = vec![0; k];
    let mut rest = cfg;
    for slot in slots.iter_mut() {
        *slot = rest % base;
        rest /= base;
        if *slot > 0 {
            out.push(((*slot - 1) / m, (*slot - 1) % m));
        }
    }
    slots
}

fn encode(slots: &[usize], base: usize) -> usize {
    slots.iter().rev().fold(0, |acc, &s| acc * base + s)
}

fn incremental<P: Positions>(p: &P, k: usize) -> bool {
    let (n, m) = (p.n_src(), p.n_dst());
    if !p.consistent(&[]) {
        return false;
    }
    if n == 0 {
        return true;
    }
    if m == 0 {
        return false;
    }
    let base = n * m + 1;
    let total = base.pow(k as u32);
    let mut pairs = Vec::new();
    let mut win: Vec<bool> = (0..total)
        .map(|cfg| {
            decode(cfg, k, base, m, &mut pairs);
            p.consistent(&pairs)
        })
        .collect();
    loop {
        let mut changed = false;
        for cfg in 0..total {
            if !win[cfg] {
                continue;
            }
            let mut slots = decode(cfg, k, base, m, &mut pairs);
            // the spoiler picks a slot and either lifts its pebble or puts it
            // on some element c; the duplicator must answer every c
            let survives = (0..k).all(|i| {
                let keep = slots[i];
                slots[i] = 0;
                let lift = win[encode(&slots, base)];
                let answered = lift
                    && (0..n).all(|c| {
                        (0..m).any(|d| {
                            slots[i] = 1 + c * m + d;
                            win[encode(&slots, base)]
                        })
                    });
                slots[i] = keep;
                answered
            });
            if !survives {
                win[cfg] = false;
                changed = true;
            }
        }
        if !changed {
            return win[0];
        }
    }
}

fn simultaneous<P: Positions>(p: &P, k: usize) -> bool {
    let (n, m) = (p.n_src(), p.n_dst());
    if !p.consistent(&[]) {
        return false;
    }
    if n == 0 {
        return true;
    }
    if m == 0 {
        return false;
    }
    // a configuration places all k pebbles: sources then responses
    let cells = n * m;
    let total = cells.pow(k as u32);
    let decode_full = |cfg: usize| -> Vec<(usize, usize)> {
        let mut rest = cfg;
        (0..k)
            .map(|_| {
                let cell = rest % cells;
                rest /= cells;
                (cell / m, cell % m)
            })
            .collect()
    };
    let encode_full = |pairs: &[(usize, usize)]| pairs.iter().rev().fold(0, |acc, &(c, d)| acc * cells + c * m + d);
    let mut win: Vec<bool> = (0..total).map(|cfg| p.consistent(&decode_full(cfg))).collect();
    loop {
        let mut changed = false;
        for cfg in 0..total {
            if !win[cfg] {
                continue;
            }
            let mut pairs = decode_full(cfg);
            let survives = (0..k).all(|i| {
                let keep = pairs[i];
                let ok = (0..n).all(|c| {
                    (0..m).any(|d| {
                        pairs[i] = (c, d);
                        win[encode_full(&pairs)]
                    })
                });
                pairs[i] = keep;
                ok
            });
            if !survives {
                win[cfg] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // the opening round: every placement of sources has some answer
    let mut sources = vec![0usize; k];
    loop {
        let answered = (0..m.pow(k as u32)).any(|resp| {
            let mut r = resp;
            let pairs: Vec<(usize, usize)> = sources
                .iter()
                .map(|&c| {
                    let d = r % m;
                    r /= m;
                    (c, d)
                })
                .collect();
            win[encode_full(&pairs)]
        });
        if !answered {
            return false;
        }
        let mut i = 0;
        loop {
            if i == k {
                return true;
            }
            sources[i] += 1;
            if sources[i] < n {
                break;
            }
            sources[i] = 0;
            i += 1;
        }
    }
}

fn solve<P: Positions>(p: &P, k: usize, convention: Option<Convention>) -> bool {
    assert!(k >= 1, "at least one pebble");
    match convention {
        Some(Convention::Incremental) => incremental(p, k),
        Some(Convention::Simultaneous) => simultaneous(p, k),
        None => {
            let a = incremental(p, k);
            let b = simultaneous(p, k);
            assert_eq!(a, b, "placement conventions disagree");
            a
        }
    }
}

/// Decides `(src, ā) →_k (dst, b̄)` on the explicit configuration graph.
/// With no convention both are run and must agree.
pub fn game_tree_pebble(
    src: &PointedDatabase,
    dst: &PointedDatabase,
    k: usize,
    convention: Option<Convention>,
) -> bool {
    solve(&Relational::new(src, dst), k, convention)
}

/// Decides `∏ (G_i, ā_i) ⇒_k (G, b̄)` on the explicit configuration graph.
pub fn game_tree_strong(
    factors: &[PointedGraph],
    target: &PointedGraph,
    k: usize,
    convention: Option<Convention>,
) -> bool {
    solve(&Strong::new(factors, target), k, convention)
}

/// Whether a strong homomorphism exists, by trying every total map.
pub fn strong_hom_exists(factors: &[PointedGraph], target: &PointedGraph) -> bool {
    let s = Strong::new(factors, target);
    let n = s.nodes.len();
    if s.m == 0 {
        return n == 0 && s.consistent(&[]);
    }
    let mut map = vec![0usize; n];
    loop {
        let pairs: Vec<(usize, usize)> = map.iter().copied().enumerate().collect();
        if s.consistent(&pairs) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            map[i] += 1;
            if map[i] < s.m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbe_core::{Database, Tuple};
    use std::sync::Arc;

    fn db(edges: &[(&str, &str)]) -> Arc<Database> {
        Arc::new(Database::from_facts(edges.iter().map(|&(a, b)| ("E", [a, b]))).unwrap())
    }

    #[test]
    fn identity_wins() {
        let d = db(&[("a", "b"), ("b", "c")]);
        let p = PointedDatabase::named(d, &["a"]).unwrap();
        assert!(game_tree_pebble(&p, &p, 2, None));
        assert!(game_tree_pebble(&p, &p, 3, None));
    }

    #[test]
    fn two_cycle_to_edge_loses() {
        let src = PointedDatabase::named(db(&[("a", "b"), ("b", "a")]), &["a"]).unwrap();
        let dst = PointedDatabase::named(db(&[("c", "d")]), &["c"]).unwrap();
        assert!(!game_tree_pebble(&src, &dst, 2, None));
    }

    #[test]
    fn triangle_to_edge_needs_three_pebbles() {
        let tri = db(&[("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"), ("a", "c"), ("c", "a")]);
        let edge = db(&[("x", "y"), ("y", "x")]);
        let src = PointedDatabase::new(tri, Tuple(vec![])).unwrap();
        let dst = PointedDatabase::new(edge, Tuple(vec![])).unwrap();
        assert!(game_tree_pebble(&src, &dst, 2, None));
        assert!(!game_tree_pebble(&src, &dst, 3, None));
    }

    #[test]
    fn strong_cycles() {
        let cycle = |n: usize| {
            let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            Arc::new(GraphDatabase::from_edges(
                (0..n).map(|i| (names[i].clone(), "a".to_owned(), names[(i + 1) % n].clone())),
            ))
        };
        let p = |g: Arc<GraphDatabase>| PointedGraph {
            graph: g,
            point: Tuple(vec![]),
        };
        let (c2, c3, c6) = (cycle(2), cycle(3), cycle(6));
        assert!(!strong_hom_exists(&[p(c2.clone()), p(c3.clone())], &p(c6.clone())));
        assert!(strong_hom_exists(&[p(c6.clone())], &p(c6.clone())));
        assert!(game_tree_strong(&[p(c6.clone())], &p(c6), 2, None));
    }
}

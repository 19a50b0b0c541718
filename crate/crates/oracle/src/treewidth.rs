use std::collections::BTreeSet;

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UGraph {
    /// Self-loops are ignored.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        UGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// A tree (by parent links) with a bag of vertices per tree node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<BTreeSet<usize>>,
}

impl TreeDecomposition {
    /// Largest bag size minus one; 0 for a decomposition without vertices.
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// Checks that the parent links form a forest connected into one tree,
    /// that every edge lies in a bag and that each vertex's bags are
    /// connected.
    pub fn is_valid_for(&self, g: &UGraph) -> bool {
        let t = self.bags.len();
        if self.parent.len() != t {
            return false;
        }
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        if t > 0 && roots != 1 {
            return false;
        }
        // parent chains must end at the root without cycles
        for start in 0..t {
            let mut at = start;
            for _ in 0..=t {
                match self.parent[at] {
                    Some(p) if p < t => at = p,
                    Some(_) => return false,
                    None => break,
                }
            }
            if self.parent[at].is_some() {
                return false;
            }
        }
        if self.bags.iter().flatten().any(|&v| v >= g.len()) {
            return false;
        }
        if (0..g.len()).any(|v| !self.bags.iter().any(|b| b.contains(&v))) {
            return false;
        }
        if !g.edges().all(|(a, b)| self.bags.iter().any(|bag| bag.contains(&a) && bag.contains(&b))) {
            return false;
        }
        (0..g.len()).all(|v| {
            // the tree nodes holding v, minus those whose parent also holds
            // v, must be a single top node
            let tops = (0..t)
                .filter(|&i| self.bags[i].contains(&v))
                .filter(|&i| self.parent[i].is_none_or(|p| !self.bags[p].contains(&v)))
                .count();
            tops == 1
        })
    }

    /// The decomposition induced by eliminating vertices in `order`.
    pub fn from_elimination(g: &UGraph, order: &[usize]) -> Self {
        let n = g.len();
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut adj = g.adj.clone();
        let mut bags = Vec::with_capacity(n);
        let mut later_sets = Vec::with_capacity(n);
        for &v in order {
            let later: BTreeSet<usize> = adj[v].iter().copied().filter(|&w| position[w] > position[v]).collect();
            for &a in &later {
                for &b in &later {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
            let mut bag = later.clone();
            bag.insert(v);
            bags.push(bag);
            later_sets.push(later);
        }
        let mut parent: Vec<Option<usize>> = later_sets
            .iter()
            .map(|later| later.iter().min_by_key(|&&w| position[w]).map(|&w| position[w]))
            .collect();
        // separate components hang off the last bag
        if n > 0 {
            for (i, p) in parent.iter_mut().enumerate() {
                if p.is_none() && i + 1 < n {
                    *p = Some(n - 1);
                }
            }
        }
        TreeDecomposition { parent, bags }
    }
}

fn permutations(n: usize, f: &mut impl FnMut(&[usize])) {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if prefix.len() == used.len() {
            f(prefix);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, f);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    go(&mut Vec::with_capacity(n), &mut vec![false; n], f);
}

/// Exact treewidth by trying every elimination ordering. Intended for
/// graphs of at most eight vertices. The empty graph has width 0.
pub fn treewidth(g: &UGraph) -> usize {
    optimal_decomposition(g).width()
}

/// A minimum-width decomposition, from the best elimination ordering.
pub fn optimal_decomposition(g: &UGraph) -> TreeDecomposition {
    let mut best: Option<(usize, Vec<usize>)> = None;
    permutations(g.len(), &mut |order| {
        let w = TreeDecomposition::from_elimination(g, order).width();
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, order.to_vec()));
        }
    });
    let (_, order) = best.unwrap_or_default();
    TreeDecomposition::from_elimination(g, &order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> UGraph {
        UGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn clique(n: usize) -> UGraph {
        UGraph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    #[test]
    fn known_widths() {
        let path = UGraph::new(4, [(0, 1), (1, 2), (2, 3)]);
        let star = UGraph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(treewidth(&path), 1);
        assert_eq!(treewidth(&star), 1);
        for n in 3..=6 {
            assert_eq!(treewidth(&cycle(n)), 2);
        }
        for k in 2..=6 {
            assert_eq!(treewidth(&clique(k)), k - 1);
        }
        assert_eq!(treewidth(&UGraph::new(0, [])), 0);
        assert_eq!(treewidth(&UGraph::new(3, [])), 0);
    }

    #[test]
    fn decompositions_are_valid() {
        let graphs = [cycle(5), clique(4), UGraph::new(5, [(0, 1), (2, 3)]), UGraph::new(1, [])];
        for g in &graphs {
            let d = optimal_decomposition(g);
            assert!(d.is_valid_for(g), "{g:?} {d:?}");
            assert_eq!(d.width(), treewidth(g));
        }
    }

    #[test]
    fn broken_decompositions_are_caught() {
        let g = cycle(4);
        let mut d = optimal_decomposition(&g);
        d.bags[0].clear();
        assert!(!d.is_valid_for(&g));
    }
}

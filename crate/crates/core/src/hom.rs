//! Homomorphism checking and backtracking search between pointed databases.

use std::collections::BTreeSet;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::model::{Assignment, Database, ElemId, PointedDatabase, RelId, Tuple};

/// True iff every atom of `src` whose elements are all mapped by `map` has
/// its image in `dst`.
pub fn check_partial_hom(src: &Database, dst: &Database, map: &Assignment) -> bool {
    let Ok(rels) = src.schema().translate_to(dst.schema()) else {
        return false;
    };
    src.atoms().iter().all(|atom| {
        let image: Option<SmallVec<[ElemId; 8]>> = atom.args.iter().map(|&a| map.get(a)).collect();
        match image {
            None => true,
            Some(image) => rels[atom.rel.index()].is_some_and(|r| dst.contains(r, &image)),
        }
    })
}

/// True iff `map` is total on `src`, preserves every atom and sends the
/// source point to the target point.
pub fn check_hom(src: &PointedDatabase, dst: &PointedDatabase, map: &Assignment) -> bool {
    src.db.domain().all(|e| map.get(e).is_some())
        && map.apply(&src.point).as_ref() == Some(&dst.point)
        && check_partial_hom(&src.db, &dst.db, map)
}

/// Search state shared by `find_hom` and `evaluate_cq`.
struct Search<'a> {
    src: &'a Database,
    dst: &'a Database,
    rels: Vec<Option<RelId>>,
    /// Per source element, the target elements allowed by its (relation,
    /// position) occurrences.
    candidates: Vec<Vec<ElemId>>,
    image: Vec<Option<ElemId>>,
}

impl<'a> Search<'a> {
    fn new(src: &'a Database, dst: &'a Database) -> Result<Self> {
        let rels = src.schema().translate_to(dst.schema())?;
        let mut positions: Vec<BTreeSet<(RelId, usize)>> = vec![BTreeSet::new(); src.domain_size()];
        for atom in src.atoms() {
            for (j, a) in atom.args.iter().enumerate() {
                positions[a.index()].insert((atom.rel, j));
            }
        }
        let mut dst_positions: Vec<BTreeSet<(RelId, usize)>> =
            vec![BTreeSet::new(); dst.domain_size()];
        for atom in dst.atoms() {
            for (j, a) in atom.args.iter().enumerate() {
                dst_positions[a.index()].insert((atom.rel, j));
            }
        }
        let candidates = positions
            .iter()
            .map(|need| {
                let need: Option<Vec<(RelId, usize)>> = need
                    .iter()
                    .map(|&(r, j)| rels[r.index()].map(|t| (t, j)))
                    .collect();
                match need {
                    None => Vec::new(),
                    Some(need) => dst
                        .domain()
                        .filter(|d| need.iter().all(|p| dst_positions[d.index()].contains(p)))
                        .collect(),
                }
            })
            .collect();
        Ok(Search {
            src,
            dst,
            rels,
            candidates,
            image: vec![None; src.domain_size()],
        })
    }

    /// Binds the point; false if the binding is not a function or breaks an
    /// atom whose elements all lie in the point.
    fn pin(&mut self, from: &Tuple, to: &Tuple) -> bool {
        for (a, b) in from.iter().zip(to.iter()) {
            match self.image[a.index()] {
                Some(prev) if prev != b => return false,
                _ => self.image[a.index()] = Some(b),
            }
        }
        from.iter().all(|a| self.consistent(a))
    }

    /// Checks the atoms around `e` that are fully assigned.
    fn consistent(&self, e: ElemId) -> bool {
        self.src.occurrences(e).iter().all(|&i| {
            let atom = &self.src.atoms()[i];
            let image: Option<SmallVec<[ElemId; 8]>> =
                atom.args.iter().map(|a| self.image[a.index()]).collect();
            match image {
                None => true,
                Some(image) => {
                    self.rels[atom.rel.index()].is_some_and(|r| self.dst.contains(r, &image))
                }
            }
        })
    }

    /// Unassigned source elements, each next one chosen with the most atoms
    /// shared with elements already placed (assigned ones included), then by
    /// descending degree, then by id.
    fn order(&self) -> Vec<ElemId> {
        let n = self.src.domain_size();
        let mut placed: Vec<bool> = self.image.iter().map(Option::is_some).collect();
        let mut links = vec![0usize; n];
        let bump = |links: &mut Vec<usize>, placed: &[bool], e: ElemId| {
            for &i in self.src.occurrences(e) {
                for a in self.src.atoms()[i].args.iter() {
                    if !placed[a.index()] && *a != e {
                        links[a.index()] += 1;
                    }
                }
            }
        };
        for e in self.src.domain().filter(|e| placed[e.index()]) {
            bump(&mut links, &placed, e);
        }
        let mut order = Vec::new();
        loop {
            let next = self
                .src
                .domain()
                .filter(|e| !placed[e.index()])
                .max_by_key(|&e| {
                    (
                        links[e.index()],
                        self.src.occurrences(e).len(),
                        std::cmp::Reverse(e),
                    )
                });
            let Some(e) = next else {
                return order;
            };
            placed[e.index()] = true;
            order.push(e);
            bump(&mut links, &placed, e);
        }
    }

    /// Splits `order` into groups linked by atoms through unassigned
    /// elements; each group can be searched on its own. Relative order is
    /// kept.
    fn components(&self, order: &[ElemId]) -> Vec<Vec<ElemId>> {
        let mut root: Vec<usize> = (0..self.src.domain_size()).collect();
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for atom in self.src.atoms() {
            let mut free = atom.args.iter().filter(|a| self.image[a.index()].is_none());
            if let Some(first) = free.next() {
                for other in free {
                    let (a, b) = (find(&mut root, first.index()), find(&mut root, other.index()));
                    root[a] = b;
                }
            }
        }
        let mut slot: Vec<Option<usize>> = vec![None; root.len()];
        let mut groups: Vec<Vec<ElemId>> = Vec::new();
        for &e in order {
            let r = find(&mut root, e.index());
            match slot[r] {
                Some(i) => groups[i].push(e),
                None => {
                    slot[r] = Some(groups.len());
                    groups.push(vec![e]);
                }
            }
        }
        groups
    }

    /// Extends the current assignment to every element of `order`,
    /// component by component.
    fn complete(&mut self, order: &[ElemId]) -> bool {
        self.components(order)
            .iter()
            .all(|group| self.extend(group, 0))
    }

    fn extend(&mut self, order: &[ElemId], pos: usize) -> bool {
        let Some(&e) = order.get(pos) else {
            return true;
        };
        for i in 0..self.candidates[e.index()].len() {
            let d = self.candidates[e.index()][i];
            self.image[e.index()] = Some(d);
            if self.consistent(e) && self.extend(order, pos + 1) {
                return true;
            }
        }
        self.image[e.index()] = None;
        false
    }

    fn assignment(&self) -> Assignment {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (ElemId(i as u32), d)))
            .collect()
    }
}

/// Finds a homomorphism from `src` to `dst` sending the source point to the
/// target point, if one exists.
pub fn find_hom(src: &PointedDatabase, dst: &PointedDatabase) -> Result<Option<Assignment>> {
    if src.point.arity() != dst.point.arity() {
        return Err(Error::TupleArity {
            expected: src.point.arity(),
            found: dst.point.arity(),
        });
    }
    let mut search = Search::new(&src.db, &dst.db)?;
    if !search.pin(&src.point, &dst.point) {
        return Ok(None);
    }
    let order = search.order();
    Ok(search.complete(&order).then(|| search.assignment()))
}

/// Evaluates a conjunctive query given by its canonical database and free
/// tuple: the set of images of the free tuple under all homomorphisms into
/// `data`.
pub fn evaluate_cq(query: &PointedDatabase, data: &Database) -> Result<BTreeSet<Tuple>> {
    let mut search = Search::new(&query.db, data)?;
    // distinct free variables first, then an existence check for the rest
    let mut free: Vec<ElemId> = Vec::new();
    for e in query.point.iter() {
        if !free.contains(&e) {
            free.push(e);
        }
    }
    let mut out = BTreeSet::new();
    enumerate_free(&mut search, &free, 0, &query.point, &mut out);
    Ok(out)
}

fn enumerate_free(
    search: &mut Search<'_>,
    free: &[ElemId],
    pos: usize,
    point: &Tuple,
    out: &mut BTreeSet<Tuple>,
) {
    if pos == free.len() {
        let rest = search.order();
        let saved = search.image.clone();
        if search.complete(&rest) {
            out.insert(Tuple(
                point
                    .iter()
                    .map(|e| search.image[e.index()].expect("free variables are bound"))
                    .collect(),
            ));
        }
        search.image = saved;
        return;
    }
    let e = free[pos];
    for i in 0..search.candidates[e.index()].len() {
        let d = search.candidates[e.index()][i];
        search.image[e.index()] = Some(d);
        if search.consistent(e) {
            enumerate_free(search, free, pos + 1, point, out);
        }
    }
    search.image[e.index()] = None;
}

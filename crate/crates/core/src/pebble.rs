//! The existential k-pebble game.
//!
//! The duplicator wins iff a nonempty family of admissible partial maps with
//! at most `k` pebbled elements exists that is closed under restriction and
//! has the forth property for every map with fewer than `k` pebbles. The
//! largest such family is computed as a greatest fixpoint: start from every
//! admissible map and delete maps until both closure rules hold. The game is
//! won iff the empty map survives.
//!
//! The admissibility notion is pluggable so the same fixpoint drives the
//! strong game over graph products.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::model::{Database, ElemId, PointedDatabase, RelId};

/// A pebble position: source elements with their responses, sorted by source.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap(Vec<(ElemId, ElemId)>);

impl PartialMap {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pebbled(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.0.iter().map(|p| p.0)
    }

    pub fn image(&self, e: ElemId) -> Option<ElemId> {
        self.0.iter().find(|p| p.0 == e).map(|p| p.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        self.0.iter().copied()
    }
}

/// Order in which deleted maps are propagated. The fixpoint does not depend
/// on it; both are exposed so that can be checked.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum DeletionOrder {
    #[default]
    Fifo,
    Lifo,
}

/// Admissibility of partial maps, checked incrementally.
pub(crate) trait Admissible: Sync {
    /// Whether `base ∪ {c ↦ d}` is admissible, given that `base` is and that
    /// `base` does not bind `c`.
    fn admits(&self, base: &[(u32, u32)], c: u32, d: u32) -> bool;
}

type Key = Box<[(u32, u32)]>;

/// The game arena: sizes, pebble count and the pinned point pairs.
pub(crate) struct Arena<'a, A: Admissible> {
    pub n_src: usize,
    pub n_dst: usize,
    pub k: usize,
    pub point: &'a [(u32, u32)],
    pub adm: &'a A,
}

pub(crate) struct Fixpoint {
    maps: Vec<Key>,
    alive: Vec<bool>,
}

impl Fixpoint {
    pub fn empty_survives(&self) -> bool {
        // the empty map is generated first
        self.alive[0]
    }

    pub fn survivors(&self) -> BTreeSet<PartialMap> {
        self.maps
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(m, _)| {
                PartialMap(m.iter().map(|&(c, d)| (ElemId(c), ElemId(d))).collect())
            })
            .collect()
    }
}

type Bindings = Vec<(u32, u32)>;

impl<A: Admissible> Arena<'_, A> {
    /// `None` when the point binding is not a function or not admissible.
    fn forced(&self) -> Option<(Vec<Option<u32>>, Bindings)> {
        let mut forced = vec![None; self.n_src];
        let mut base: Vec<(u32, u32)> = Vec::new();
        for &(c, d) in self.point {
            match forced[c as usize] {
                Some(prev) if prev != d => return None,
                Some(_) => {}
                None => {
                    if !self.adm.admits(&base, c, d) {
                        return None;
                    }
                    forced[c as usize] = Some(d);
                    base.push((c, d));
                }
            }
        }
        Some((forced, base))
    }

    pub fn solve(&self, order: DeletionOrder) -> Option<Fixpoint> {
        let (forced, point_base) = self.forced()?;
        let targets = |c: u32| -> std::ops::Range<u32> {
            match forced[c as usize] {
                Some(d) => d..d + 1,
                None => 0..self.n_dst as u32,
            }
        };

        // every admissible map with at most k pebbles, by increasing source
        let mut maps: Vec<Key> = vec![Box::default()];
        let mut index: HashMap<Key, u32> = HashMap::new();
        index.insert(Box::default(), 0);
        let mut frontier = 0;
        while frontier < maps.len() {
            let cur = maps[frontier].clone();
            frontier += 1;
            if cur.len() == self.k {
                continue;
            }
            let start = cur.last().map_or(0, |p| p.0 + 1);
            let mut base = point_base.clone();
            base.extend(cur.iter().filter(|p| forced[p.0 as usize].is_none()));
            for c in start..self.n_src as u32 {
                for d in targets(c) {
                    if forced[c as usize].is_none() && !self.adm.admits(&base, c, d) {
                        continue;
                    }
                    let mut next = Vec::with_capacity(cur.len() + 1);
                    next.extend_from_slice(&cur);
                    next.push((c, d));
                    let key: Key = next.into_boxed_slice();
                    index.insert(key.clone(), maps.len() as u32);
                    maps.push(key);
                }
            }
        }

        // support[m][c]: live extensions of m that bind c
        let n = self.n_src;
        let mut offset = vec![u32::MAX; maps.len()];
        let mut slots = 0u32;
        for (i, m) in maps.iter().enumerate() {
            if m.len() < self.k {
                offset[i] = slots;
                slots += 1;
            }
        }
        let mut support = vec![0u32; slots as usize * n];
        let mut scratch: Vec<(u32, u32)> = Vec::new();
        for m in &maps {
            for skip in 0..m.len() {
                restrict(m, skip, &mut scratch);
                let r = index[scratch.as_slice()];
                support[offset[r as usize] as usize * n + m[skip].0 as usize] += 1;
            }
        }

        let mut alive = vec![true; maps.len()];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for (i, m) in maps.iter().enumerate() {
            if m.len() < self.k {
                let base = offset[i] as usize * n;
                let lacks = (0..n as u32)
                    .any(|c| !binds(m, c) && support[base + c as usize] == 0);
                if lacks {
                    alive[i] = false;
                    queue.push_back(i as u32);
                }
            }
        }

        while let Some(f) = match order {
            DeletionOrder::Fifo => queue.pop_front(),
            DeletionOrder::Lifo => queue.pop_back(),
        } {
            let m = maps[f as usize].clone();
            // extensions lose a restriction
            if m.len() < self.k {
                for c in 0..n as u32 {
                    if binds(&m, c) {
                        continue;
                    }
                    for d in targets(c) {
                        extend(&m, (c, d), &mut scratch);
                        if let Some(&g) = index.get(scratch.as_slice()) {
                            if alive[g as usize] {
                                alive[g as usize] = false;
                                queue.push_back(g);
                            }
                        }
                    }
                }
            }
            // restrictions lose a supporting extension
            for skip in 0..m.len() {
                restrict(&m, skip, &mut scratch);
                let r = index[scratch.as_slice()];
                let slot = offset[r as usize] as usize * n + m[skip].0 as usize;
                support[slot] -= 1;
                if support[slot] == 0 && alive[r as usize] {
                    alive[r as usize] = false;
                    queue.push_back(r);
                }
            }
        }

        Some(Fixpoint { maps, alive })
    }
}

fn binds(m: &[(u32, u32)], c: u32) -> bool {
    m.iter().any(|p| p.0 == c)
}

fn restrict(m: &[(u32, u32)], skip: usize, out: &mut Vec<(u32, u32)>) {
    out.clear();
    out.extend(m.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &p)| p));
}

fn extend(m: &[(u32, u32)], pair: (u32, u32), out: &mut Vec<(u32, u32)>) {
    out.clear();
    let at = m.partition_point(|p| p.0 < pair.0);
    out.extend_from_slice(&m[..at]);
    out.push(pair);
    out.extend_from_slice(&m[at..]);
}

/// Partial-homomorphism admissibility between two databases.
pub(crate) struct RelationalCheck<'a> {
    src: &'a Database,
    dst: &'a Database,
    rels: Vec<Option<RelId>>,
}

impl<'a> RelationalCheck<'a> {
    pub fn new(src: &'a Database, dst: &'a Database) -> Result<Self> {
        Ok(RelationalCheck {
            src,
            dst,
            rels: src.schema().translate_to(dst.schema())?,
        })
    }
}

impl Admissible for RelationalCheck<'_> {
    fn admits(&self, base: &[(u32, u32)], c: u32, d: u32) -> bool {
        'atoms: for &i in self.src.occurrences(ElemId(c)) {
            let atom = &self.src.atoms()[i];
            let mut image: SmallVec<[ElemId; 8]> = SmallVec::new();
            for a in atom.args.iter() {
                if a.0 == c {
                    image.push(ElemId(d));
                } else if let Some(p) = base.iter().find(|p| p.0 == a.0) {
                    image.push(ElemId(p.1));
                } else {
                    continue 'atoms;
                }
            }
            match self.rels[atom.rel.index()] {
                Some(r) if self.dst.contains(r, &image) => {}
                _ => return false,
            }
        }
        true
    }
}

fn validate(src: &PointedDatabase, dst: &PointedDatabase, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::PebbleCount(k));
    }
    if src.point.arity() != dst.point.arity() {
        return Err(Error::TupleArity {
            expected: src.point.arity(),
            found: dst.point.arity(),
        });
    }
    if !src.db.schema().compatible_with(dst.db.schema()) {
        return Err(Error::SchemaMismatch);
    }
    Ok(())
}

fn point_pairs(src: &PointedDatabase, dst: &PointedDatabase) -> Vec<(u32, u32)> {
    src.point.iter().zip(dst.point.iter()).map(|(a, b)| (a.0, b.0)).collect()
}

/// Computes the duplicator's largest winning family, or `None` when the
/// point binding already loses.
pub fn pebble_family(
    src: &PointedDatabase,
    dst: &PointedDatabase,
    k: usize,
    order: DeletionOrder,
) -> Result<Option<BTreeSet<PartialMap>>> {
    validate(src, dst, k)?;
    let check = RelationalCheck::new(&src.db, &dst.db)?;
    let point = point_pairs(src, dst);
    let arena = Arena {
        n_src: src.db.domain_size(),
        n_dst: dst.db.domain_size(),
        k,
        point: &point,
        adm: &check,
    };
    Ok(arena
        .solve(order)
        .filter(Fixpoint::empty_survives)
        .map(|f| f.survivors()))
}

/// Decides `(src, ā) →_k (dst, b̄)`.
pub fn pebble_game(src: &PointedDatabase, dst: &PointedDatabase, k: usize) -> Result<bool> {
    validate(src, dst, k)?;
    let check = RelationalCheck::new(&src.db, &dst.db)?;
    Ok(run(src, dst, k, &check))
}

fn run(src: &PointedDatabase, dst: &PointedDatabase, k: usize, check: &RelationalCheck<'_>) -> bool {
    let point = point_pairs(src, dst);
    let arena = Arena {
        n_src: src.db.domain_size(),
        n_dst: dst.db.domain_size(),
        k,
        point: &point,
        adm: check,
    };
    arena
        .solve(DeletionOrder::Fifo)
        .is_some_and(|f| f.empty_survives())
}

/// `pebble_game(src, t, k)` for every target, sharing the source side.
pub fn pebble_closure(
    src: &PointedDatabase,
    targets: &[PointedDatabase],
    k: usize,
) -> Result<Vec<bool>> {
    for t in targets {
        validate(src, t, k)?;
    }
    targets
        .par_iter()
        .map(|t| {
            let check = RelationalCheck::new(&src.db, &t.db)?;
            Ok(run(src, t, k, &check))
        })
        .collect()
}

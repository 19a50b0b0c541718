use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use qbe_core::{Database, ElemId, Error, ExampleSets, PointedDatabase, Result, Tuple};

use crate::treewidth::{treewidth, UGraph};

/// A conjunctive query over variables `0..`: a list of atoms and a free
/// tuple. Free variables may repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CqCandidate {
    pub atoms: Vec<(String, Vec<usize>)>,
    pub free: Vec<usize>,
}

impl CqCandidate {
    pub fn variables(&self) -> BTreeSet<usize> {
        self.atoms.iter().flat_map(|(_, a)| a.iter().copied()).chain(self.free.iter().copied()).collect()
    }

    pub fn existential(&self) -> BTreeSet<usize> {
        let free: BTreeSet<usize> = self.free.iter().copied().collect();
        self.variables().difference(&free).copied().collect()
    }

    /// Every free variable occurs in some atom.
    pub fn is_safe(&self) -> bool {
        self.free.iter().all(|v| self.atoms.iter().any(|(_, a)| a.contains(v)))
    }

    /// The Gaifman graph of the existential variables, renumbered in order.
    pub fn gaifman(&self) -> UGraph {
        let ex: Vec<usize> = self.existential().into_iter().collect();
        let at = |v: usize| ex.iter().position(|&e| e == v);
        let mut edges = Vec::new();
        for (_, args) in &self.atoms {
            for &a in args {
                for &b in args {
                    if let (Some(i), Some(j)) = (at(a), at(b)) {
                        edges.push((i, j));
                    }
                }
            }
        }
        UGraph::new(ex.len(), edges)
    }

    pub fn treewidth(&self) -> usize {
        treewidth(&self.gaifman())
    }

    /// The answers over `db`, by trying every assignment of the variables.
    pub fn evaluate(&self, db: &Database) -> BTreeSet<Tuple> {
        let vars = self.variables().into_iter().max().map_or(0, |v| v + 1);
        let facts: BTreeSet<(&str, Vec<ElemId>)> = db
            .atoms()
            .iter()
            .map(|a| (db.schema().name(a.rel), a.args.to_vec()))
            .collect();
        let mut out = BTreeSet::new();
        let m = db.domain_size();
        if m == 0 {
            return out;
        }
        let mut value = vec![0u32; vars];
        loop {
            let holds = self.atoms.iter().all(|(r, args)| {
                facts.contains(&(r.as_str(), args.iter().map(|&v| ElemId(value[v])).collect()))
            });
            if holds {
                out.insert(Tuple(self.free.iter().map(|&v| ElemId(value[v])).collect()));
            }
            let mut i = 0;
            loop {
                if i == vars {
                    return out;
                }
                value[i] += 1;
                if (value[i] as usize) < m {
                    break;
                }
                value[i] = 0;
                i += 1;
            }
        }
    }

    /// The canonical database, variables named `x0, x1, ...`, pointed by
    /// the free tuple. `None` when the query is not safe.
    pub fn canonical(&self) -> Option<PointedDatabase> {
        if !self.is_safe() {
            return None;
        }
        let db = Database::from_facts(
            self.atoms
                .iter()
                .map(|(r, args)| (r.as_str(), args.iter().map(|v| format!("x{v}")))),
        )
        .ok()?;
        let names: Vec<String> = self.free.iter().map(|v| format!("x{v}")).collect();
        PointedDatabase::named(Arc::new(db), &names).ok()
    }
}

impl fmt::Display for CqCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |vs: &[usize]| vs.iter().map(|v| format!("x{v}")).collect::<Vec<_>>().join(",");
        write!(f, "q({}) :- ", list(&self.free))?;
        let atoms: Vec<String> = self.atoms.iter().map(|(r, a)| format!("{r}({})", list(a))).collect();
        f.write_str(&atoms.join(", "))
    }
}

/// All candidates within the bounds whose treewidth is at most `k`, in a
/// fixed order, passed to `visit` until it returns true.
///
/// Atom lists are strictly increasing in (relation, arguments) order and
/// variables are numbered by first occurrence, which removes most renamings.
/// Called on each candidate with an evaluator for a choice of free variables.
type Visit<'a> = &'a mut dyn FnMut(&CqCandidate, &dyn Fn(&[usize]) -> BTreeSet<Tuple>) -> bool;

fn search(
    db: &Database,
    arity: usize,
    k: usize,
    max_atoms: usize,
    max_vars: usize,
    visit: Visit<'_>,
) -> Result<Option<CqCandidate>> {
    if max_atoms == 0 || max_vars == 0 {
        return Err(Error::Precondition("enumeration bounds must be positive"));
    }
    let mut universe: Vec<(String, Vec<usize>)> = Vec::new();
    for (_, name, r) in db.schema().iter() {
        let mut args = vec![0usize; r];
        loop {
            universe.push((name.to_owned(), args.clone()));
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                args[i] += 1;
                if args[i] < max_vars {
                    break;
                }
                args[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    // satisfying assignments of all max_vars variables, filtered per atom
    let m = db.domain_size();
    let facts: BTreeSet<(&str, Vec<usize>)> = db
        .atoms()
        .iter()
        .map(|a| (db.schema().name(a.rel), a.args.iter().map(|e| e.index()).collect()))
        .collect();
    let all: Vec<Vec<usize>> = (0..m.pow(max_vars as u32))
        .map(|mut code| {
            (0..max_vars)
                .map(|_| {
                    let v = code % m;
                    code /= m;
                    v
                })
                .collect()
        })
        .collect();

    struct Frame<'a> {
        universe: &'a [(String, Vec<usize>)],
        facts: &'a BTreeSet<(&'a str, Vec<usize>)>,
        arity: usize,
        k: usize,
        max_atoms: usize,
        chosen: Vec<usize>,
    }

    fn canonical_numbering(atoms: &[&(String, Vec<usize>)]) -> Option<usize> {
        let mut next = 0;
        for (_, args) in atoms {
            for &v in args {
                if v > next {
                    return None;
                }
                if v == next {
                    next += 1;
                }
            }
        }
        Some(next)
    }

    fn go(
        f: &mut Frame<'_>,
        sat: &[&Vec<usize>],
        from: usize,
        visit: Visit<'_>,
    ) -> Option<CqCandidate> {
        // both callers need at least one answer; extensions only lose answers
        // and cannot repair the numbering of a prefix
        if sat.is_empty() {
            return None;
        }
        let prefix: Vec<&(String, Vec<usize>)> = f.chosen.iter().map(|&i| &f.universe[i]).collect();
        canonical_numbering(&prefix)?;
        if f.chosen.len() == f.max_atoms {
            let atoms: Vec<&(String, Vec<usize>)> = f.chosen.iter().map(|&i| &f.universe[i]).collect();
            if let Some(used) = canonical_numbering(&atoms) {
                let answers = |free: &[usize]| -> BTreeSet<Tuple> {
                    sat.iter()
                        .map(|a| Tuple(free.iter().map(|&v| ElemId(a[v] as u32)).collect()))
                        .collect()
                };
                let mut free = vec![0usize; f.arity];
                loop {
                    let q = CqCandidate {
                        atoms: atoms.iter().map(|&a| a.clone()).collect(),
                        free: free.clone(),
                    };
                    if q.treewidth() <= f.k && visit(&q, &answers) {
                        return Some(q);
                    }
                    let mut i = 0;
                    loop {
                        if i == f.arity {
                            break;
                        }
                        free[i] += 1;
                        if free[i] < used {
                            break;
                        }
                        free[i] = 0;
                        i += 1;
                    }
                    if i == f.arity {
                        break;
                    }
                }
            }
        }
        if f.chosen.len() == f.max_atoms {
            return None;
        }
        for i in from..f.universe.len() {
            let (r, args) = &f.universe[i];
            let next: Vec<&Vec<usize>> = sat
                .iter()
                .copied()
                .filter(|a| f.facts.contains(&(r.as_str(), args.iter().map(|&v| a[v]).collect())))
                .collect();
            f.chosen.push(i);
            let found = go(f, &next, i + 1, visit);
            f.chosen.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    // smaller queries first
    let sat: Vec<&Vec<usize>> = all.iter().collect();
    for size in 1..=max_atoms {
        let mut frame = Frame {
            universe: &universe,
            facts: &facts,
            arity,
            k,
            max_atoms: size,
            chosen: Vec::new(),
        };
        if let Some(q) = go(&mut frame, &sat, 0, visit) {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

/// The first query of treewidth at most `k` within the bounds that
/// explains the examples: every positive is an answer and no negative is.
pub fn enumerate_tw_explanations(
    db: &Database,
    ex: &ExampleSets,
    k: usize,
    max_atoms: usize,
    max_vars: usize,
) -> Result<Option<CqCandidate>> {
    search(db, ex.arity(), k, max_atoms, max_vars, &mut |q, answers| {
        let got = answers(&q.free);
        ex.positive().is_subset(&got) && got.is_disjoint(ex.negative())
    })
}

/// One query per positive, each of treewidth at most `k`, having that
/// positive as an answer and no negative. Their union explains the
/// examples.
pub fn enumerate_utw_explanations(
    db: &Database,
    ex: &ExampleSets,
    k: usize,
    max_atoms: usize,
    max_vars: usize,
) -> Result<Option<Vec<CqCandidate>>> {
    let mut out = Vec::new();
    for a in ex.positive() {
        let found = search(db, ex.arity(), k, max_atoms, max_vars, &mut |q, answers| {
            let got = answers(&q.free);
            got.contains(a) && got.is_disjoint(ex.negative())
        })?;
        match found {
            Some(q) => out.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(facts: &[(&str, &[&str])]) -> Database {
        Database::from_facts(facts.iter().map(|(r, a)| (*r, a.iter().copied()))).unwrap()
    }

    #[test]
    fn gaifman_ignores_free_variables() {
        // q(x0) :- E(x0,x1), E(x1,x2), E(x2,x0): the existential part is an edge
        let q = CqCandidate {
            atoms: vec![
                ("E".into(), vec![0, 1]),
                ("E".into(), vec![1, 2]),
                ("E".into(), vec![2, 0]),
            ],
            free: vec![0],
        };
        assert_eq!(q.treewidth(), 1);
        let boolean = CqCandidate { free: vec![], ..q };
        assert_eq!(boolean.treewidth(), 2);
    }

    #[test]
    fn evaluation_matches_canonical_form() {
        let d = db(&[("E", &["a", "b"]), ("E", &["b", "c"])]);
        let q = CqCandidate {
            atoms: vec![("E".into(), vec![0, 1]), ("E".into(), vec![1, 2])],
            free: vec![0, 2],
        };
        let got = q.evaluate(&d);
        assert_eq!(got, BTreeSet::from([d.tuple(&["a", "c"]).unwrap()]));
        assert_eq!(q.to_string(), "q(x0,x2) :- E(x0,x1), E(x1,x2)");
        assert!(q.canonical().is_some());
    }

    #[test]
    fn one_atom_explanation() {
        let d = db(&[("E", &["a", "b"]), ("R", &["c"])]);
        let ex = ExampleSets::positive_only(d.domain_size(), [d.tuple(&["a"]).unwrap()]).unwrap();
        let q = enumerate_tw_explanations(&d, &ex, 1, 3, 4).unwrap().unwrap();
        assert_eq!(q.atoms.len(), 1);
    }

    #[test]
    fn path_query_separates() {
        // a starts a path of length two, b only of length one
        let d = db(&[("E", &["a", "b"]), ("E", &["b", "c"])]);
        let ex = ExampleSets::new(d.domain_size(), [d.tuple(&["a"]).unwrap()], [d.tuple(&["b"]).unwrap()]).unwrap();
        let q = enumerate_tw_explanations(&d, &ex, 1, 3, 4).unwrap().unwrap();
        assert_eq!(q.atoms.len(), 2);
        assert!(q.treewidth() <= 1);
        let got = q.evaluate(&d);
        assert!(got.contains(&d.tuple(&["a"]).unwrap()));
        assert!(!got.contains(&d.tuple(&["b"]).unwrap()));
    }

    #[test]
    fn inseparable_is_absent() {
        let d = db(&[("E", &["a", "b"])]);
        let a = d.tuple(&["a"]).unwrap();
        let ex = ExampleSets::new(d.domain_size(), [a.clone()], [a]).unwrap();
        assert_eq!(enumerate_tw_explanations(&d, &ex, 1, 3, 4).unwrap(), None);
        assert_eq!(enumerate_utw_explanations(&d, &ex, 1, 3, 4).unwrap(), None);
        assert!(enumerate_tw_explanations(&d, &ex, 1, 0, 4).is_err());
    }
}

use std::collections::{BTreeSet, HashSet, VecDeque};

use qbe_core::{ElemId, GraphDatabase, Nfa};

fn step(nfa: &Nfa, states: &BTreeSet<u32>, label: &str) -> BTreeSet<u32> {
    nfa.transitions()
        .filter(|&(p, l, _)| l == label && states.contains(&p))
        .map(|(_, _, q)| q)
        .collect()
}

/// Refutes `L(a) ⊆ L(b)` by trying every word of length at most `max_len`
/// over both alphabets. `false` only with a counterexample in hand.
pub fn word_containment(a: &Nfa, b: &Nfa, max_len: usize) -> bool {
    let alphabet: BTreeSet<&str> = a
        .alphabet()
        .iter()
        .chain(b.alphabet())
        .map(|l| l.as_ref())
        .collect();
    let alphabet: Vec<&str> = alphabet.into_iter().collect();
    let sa: BTreeSet<u32> = a.start().iter().copied().collect();
    let sb: BTreeSet<u32> = b.start().iter().copied().collect();
    counterexample_below(a, b, &alphabet, &sa, &sb, max_len).is_none()
}

/// Depth-first over words; `sa` and `sb` are the states each automaton
/// reaches on the current prefix.
fn counterexample_below<'l>(
    a: &Nfa,
    b: &Nfa,
    alphabet: &[&'l str],
    sa: &BTreeSet<u32>,
    sb: &BTreeSet<u32>,
    budget: usize,
) -> Option<Vec<&'l str>> {
    if sa.iter().any(|&q| a.is_final(q)) && !sb.iter().any(|&q| b.is_final(q)) {
        return Some(Vec::new());
    }
    if budget == 0 || sa.is_empty() {
        return None;
    }
    for &l in alphabet {
        let na = step(a, sa, l);
        let nb = step(b, sb, l);
        if let Some(mut w) = counterexample_below(a, b, alphabet, &na, &nb, budget - 1) {
            w.insert(0, l);
            return Some(w);
        }
    }
    None
}

fn post(g: &GraphDatabase, states: &BTreeSet<u32>, label: &str) -> BTreeSet<u32> {
    let Some(l) = g.label_id(label) else {
        return BTreeSet::new();
    };
    states
        .iter()
        .flat_map(|&s| g.successors(ElemId(s)).iter().filter(move |e| e.0 == l).map(|e| e.1))
        .collect()
}

/// Whether `L^{g1}_{v,v2} ⊆ L^{g2}_{u,u2}`, by exploring pairs of subsets
/// of both graphs reachable on a common word.
pub fn language_contained(
    g1: &GraphDatabase,
    v: ElemId,
    v2: ElemId,
    g2: &GraphDatabase,
    u: ElemId,
    u2: ElemId,
) -> bool {
    let start = (BTreeSet::from([v.0]), BTreeSet::from([u.0]));
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((s1, s2)) = queue.pop_front() {
        if s1.contains(&v2.0) && !s2.contains(&u2.0) {
            return false;
        }
        for label in g1.alphabet() {
            let n1 = post(g1, &s1, label);
            if n1.is_empty() {
                continue;
            }
            let next = (n1, post(g2, &s2, label));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbe_core::pair_language;

    fn cycle(n: usize) -> GraphDatabase {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        GraphDatabase::from_edges((0..n).map(|i| (names[i].as_str(), "a", names[(i + 1) % n].as_str())))
    }

    #[test]
    fn self_containment_at_any_bound() {
        let c2 = cycle(2);
        let l = pair_language(&c2, ElemId(0), ElemId(1)).unwrap();
        for bound in 0..6 {
            assert!(word_containment(&l, &l, bound));
        }
    }

    #[test]
    fn cycles_refuted_at_three() {
        let (c2, c6) = (cycle(2), cycle(6));
        let a = pair_language(&c2, ElemId(0), ElemId(1)).unwrap();
        let b = pair_language(&c6, ElemId(0), ElemId(1)).unwrap();
        assert!(word_containment(&a, &b, 2));
        assert!(!word_containment(&a, &b, 3));
        assert!(!language_contained(&c2, ElemId(0), ElemId(1), &c6, ElemId(0), ElemId(1)));
        assert!(language_contained(&c6, ElemId(0), ElemId(1), &c2, ElemId(0), ElemId(1)));
    }

    #[test]
    fn empty_word() {
        let c2 = cycle(2);
        let a = pair_language(&c2, ElemId(0), ElemId(0)).unwrap();
        let b = pair_language(&c2, ElemId(0), ElemId(1)).unwrap();
        assert!(!word_containment(&a, &b, 0));
        assert!(!language_contained(&c2, ElemId(0), ElemId(0), &c2, ElemId(0), ElemId(1)));
    }
}

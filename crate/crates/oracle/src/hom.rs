use std::collections::{BTreeSet, HashSet};

use qbe_core::{Assignment, ElemId, PointedDatabase};

/// Every homomorphism from `src` to `dst`, found by trying all
/// `|dst|^|src|` maps.
pub fn all_homs(src: &PointedDatabase, dst: &PointedDatabase) -> BTreeSet<Assignment> {
    let n = src.db.domain_size();
    let m = dst.db.domain_size();
    let facts: HashSet<(&str, Vec<u32>)> = dst
        .db
        .atoms()
        .iter()
        .map(|a| (dst.db.schema().name(a.rel), a.args.iter().map(|e| e.0).collect()))
        .collect();
    let mut out = BTreeSet::new();
    if src.point.len() != dst.point.len() || (m == 0 && n > 0) {
        return out;
    }
    let mut map = vec![0u32; n];
    loop {
        let point_ok = src
            .point
            .iter()
            .zip(dst.point.iter())
            .all(|(a, b)| map[a.index()] == b.0);
        let atoms_ok = point_ok
            && src.db.atoms().iter().all(|a| {
                let image: Vec<u32> = a.args.iter().map(|e| map[e.index()]).collect();
                facts.contains(&(src.db.schema().name(a.rel), image))
            });
        if atoms_ok {
            out.insert(
                map.iter()
                    .enumerate()
                    .map(|(i, &d)| (ElemId(i as u32), ElemId(d)))
                    .collect(),
            );
        }
        // next map, last position fastest
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            map[i] += 1;
            if (map[i] as usize) < m {
                break;
            }
            map[i] = 0;
        }
    }
}

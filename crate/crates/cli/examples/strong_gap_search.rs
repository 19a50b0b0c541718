//! Seeded random search for single-graph instances separating the strong
//! relations: `⇒_2` without `⇒_3`, and `⇒_3` without `⇒`. Prints the first
//! instance found for each gap.

use std::sync::Arc;

use qbe_core::{strong_hom, strong_pebble_game, PointedGraph, Tuple};
use qbe_oracle::gen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut two, mut three) = (false, false);
    for round in 0..200_000u32 {
        let nodes = rng.gen_range(2..=4);
        let labels: &[&str] = if rng.gen_bool(0.5) { &["a"] } else { &["a", "b"] };
        let density = rng.gen_range(0.2..0.6);
        let g = gen::graph(&mut rng, nodes, labels, density);
        let n = rng.gen_range(1..=2usize);
        let mut pick = || Tuple(vec![qbe_core::ElemId(rng.gen_range(0..nodes as u32))]);
        let factors: Vec<PointedGraph> = (0..n)
            .map(|_| PointedGraph { graph: g.clone(), point: pick() })
            .collect();
        let target = PointedGraph { graph: Arc::clone(&g), point: pick() };
        let k2 = strong_pebble_game(&factors, &target, 2).unwrap();
        if !k2 {
            continue;
        }
        let k3 = strong_pebble_game(&factors, &target, 3).unwrap();
        let full = strong_hom(&factors, &target).unwrap().is_some();
        let names = |p: &PointedGraph| g.tuple_names(&p.point).join(",");
        let report = |what: &str| {
            println!("# {what} (round {round})");
            print!("{g}");
            println!("# positives: {}", factors.iter().map(names).collect::<Vec<_>>().join(" "));
            println!("# negative: {}", names(&target));
        };
        if !k3 && !two {
            report("=>_2 but not =>_3");
            two = true;
        }
        if k3 && !full && !three {
            report("=>_3 but not =>");
            three = true;
        }
        if two && three {
            return;
        }
    }
    println!("# search exhausted: two={two} three={three}");
}

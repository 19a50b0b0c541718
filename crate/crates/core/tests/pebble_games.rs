use proptest::prelude::*;
use qbe_core::pebble::{pebble_family, DeletionOrder};
use qbe_core::{find_hom, pebble_game, PartialMap};
use qbe_oracle::{game_tree_pebble, gen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn fixpoint_matches_game_tree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arity = (seed % 3) as usize;
        let src = gen::pointed(&mut rng, 4, 5, arity);
        let dst = gen::pointed(&mut rng, 4, 6, arity);
        for k in [2, 3] {
            prop_assert_eq!(pebble_game(&src, &dst, k).unwrap(), game_tree_pebble(&src, &dst, k, None), "k = {}", k);
        }
    }

    #[test]
    fn approximation_chain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = gen::pointed(&mut rng, 4, 6, 1);
        let dst = gen::pointed(&mut rng, 4, 6, 1);
        let hom = find_hom(&src, &dst).unwrap().is_some();
        let three = pebble_game(&src, &dst, 3).unwrap();
        let two = pebble_game(&src, &dst, 2).unwrap();
        prop_assert!(!hom || three);
        prop_assert!(!three || two);
    }

    #[test]
    fn deletion_order_is_irrelevant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = gen::pointed(&mut rng, 4, 5, 1);
        let dst = gen::pointed(&mut rng, 4, 6, 1);
        let fifo = pebble_family(&src, &dst, 3, DeletionOrder::Fifo).unwrap();
        let lifo = pebble_family(&src, &dst, 3, DeletionOrder::Lifo).unwrap();
        prop_assert_eq!(&fifo, &lifo);
        if let Some(family) = fifo {
            // closed under restriction
            for m in &family {
                for skip in m.pebbled() {
                    let smaller: PartialMap = family
                        .iter()
                        .find(|f| f.len() + 1 == m.len() && f.iter().all(|p| m.image(p.0) == Some(p.1)) && f.image(skip).is_none())
                        .cloned()
                        .unwrap_or_default();
                    prop_assert!(smaller.len() + 1 == m.len(), "restriction of {:?} missing", m);
                }
            }
        }
    }
}

//! Exhaustive generation of unlabeled trees under degree constraints.
//!
//! Trees with `e + 1` edges arise from trees with `e` edges by hanging one
//! leaf on some vertex; deduplicating each level by canonical key makes the
//! sweep exhaustive and duplicate-free. Desk scale (a dozen edges, a few
//! thousand trees) needs nothing smarter — exhaustiveness is cross-checked
//! against the known census in the acceptance suite rather than assumed.

use std::collections::BTreeMap;

use crate::canonical::{canonical_key, CanonicalKey};
use crate::forest::Forest;

/// Every unlabeled tree with at most `max_edges` edges whose inner vertices
/// all have degree at least `min_inner_degree`, and at least
/// `min_inner_vertices` of them; each isomorphism class exactly once, in
/// (edge count, canonical key) order.
pub fn enumerate_trees(
    max_edges: usize,
    min_inner_degree: usize,
    min_inner_vertices: usize,
) -> Vec<Forest> {
    let mut results: Vec<(usize, CanonicalKey, Forest)> = Vec::new();
    if max_edges == 0 {
        return Vec::new();
    }
    let mut level: BTreeMap<CanonicalKey, Forest> = BTreeMap::new();
    let single = Forest::star(1);
    level.insert(canonical_key(&single), single);
    for edges in 1..=max_edges {
        for (key, tree) in &level {
            let admissible = tree.inner_vertex_count() >= min_inner_vertices
                && tree
                    .inner_vertices()
                    .iter()
                    .all(|&v| tree.degree(v) >= min_inner_degree);
            if admissible {
                results.push((edges, key.clone(), tree.clone()));
            }
        }
        if edges == max_edges {
            break;
        }
        let mut next: BTreeMap<CanonicalKey, Forest> = BTreeMap::new();
        for tree in level.values() {
            for v in tree.vertices().collect::<Vec<_>>() {
                let grown = tree.add_leaves(v, 1).expect("vertex exists");
                let key = canonical_key(&grown);
                next.entry(key).or_insert(grown);
            }
        }
        level = next;
    }
    results.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    results.into_iter().map(|(_, _, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_forest;
    use std::collections::BTreeSet;

    #[test]
    fn tiny_census() {
        // unlabeled trees by edge count: 1, 1, 2, 3, 6, 11, 23, 47
        let all = enumerate_trees(8, 0, 0);
        let mut by_edges = BTreeMap::new();
        for t in &all {
            *by_edges.entry(t.edge_count()).or_insert(0usize) += 1;
        }
        let counts: Vec<usize> = (1..=8).map(|e| by_edges[&e]).collect();
        assert_eq!(counts, [1, 1, 2, 3, 6, 11, 23, 47]);
    }

    #[test]
    fn keys_are_pairwise_distinct_and_round_trip() {
        let all = enumerate_trees(7, 0, 0);
        let keys: BTreeSet<_> = all.iter().map(canonical_key).collect();
        assert_eq!(keys.len(), all.len());
        for t in &all {
            let text = crate::canonical::serialize_canonical(t);
            let back = parse_forest(&text).unwrap();
            assert_eq!(canonical_key(&back), canonical_key(t), "{text}");
        }
    }

    #[test]
    fn degree_constraints_filter() {
        let only_star = enumerate_trees(3, 3, 1);
        assert_eq!(only_star.len(), 1);
        assert_eq!(
            canonical_key(&only_star[0]),
            canonical_key(&Forest::star(3))
        );

        let nine_edge_four_hubs = enumerate_trees(9, 3, 4);
        let keys: BTreeSet<_> = nine_edge_four_hubs.iter().map(canonical_key).collect();
        let expected: BTreeSet<_> = [
            parse_forest("S(2,1,1,2)").unwrap(),
            parse_forest("((*,*),(*,*),(*,*))").unwrap(),
        ]
        .iter()
        .map(canonical_key)
        .collect();
        assert_eq!(keys, expected);
    }

    #[test]
    fn deterministic_order() {
        let a = enumerate_trees(6, 0, 0);
        let b = enumerate_trees(6, 0, 0);
        let ka: Vec<_> = a.iter().map(canonical_key).collect();
        let kb: Vec<_> = b.iter().map(canonical_key).collect();
        assert_eq!(ka, kb);
        assert!(a.windows(2).all(|w| w[0].edge_count() <= w[1].edge_count()));
    }
}

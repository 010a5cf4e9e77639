//! Canonical forms for unlabeled forests.
//!
//! Volumes depend only on the isomorphism class of a forest, so memoization
//! keys must be isomorphism invariants. The key of a tree is its rooted
//! encoding at the tree center — children sorted recursively, the classic
//! linear canonical form — and the key of a forest is the sorted
//! concatenation of its tree keys. Bicentral trees take the
//! lexicographically smaller of the two center-rooted encodings.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::forest::{Forest, VertexId};

/// Isomorphism-invariant text key of an unlabeled forest. Equal keys mean
/// isomorphic forests; the empty forest has the empty key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn from_raw(s: String) -> Self {
        CanonicalKey(s)
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// The one or two central vertices of a tree component, by leaf stripping.
fn centers(forest: &Forest, component: &BTreeSet<VertexId>) -> Vec<VertexId> {
    if component.len() <= 2 {
        return component.iter().copied().collect();
    }
    let mut degree: std::collections::BTreeMap<VertexId, usize> =
        component.iter().map(|&v| (v, forest.degree(v))).collect();
    let mut remaining = component.len();
    let mut fringe: Vec<VertexId> = component
        .iter()
        .copied()
        .filter(|v| degree[v] <= 1)
        .collect();
    let mut removed: BTreeSet<VertexId> = BTreeSet::new();
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &fringe {
            removed.insert(v);
        }
        remaining -= fringe.len();
        for &v in &fringe {
            for (_, n) in forest.incident_edges(v) {
                if !removed.contains(&n) {
                    let d = degree.get_mut(&n).unwrap();
                    *d -= 1;
                    if *d == 1 {
                        next.push(n);
                    }
                }
            }
        }
        fringe = next;
    }
    component
        .iter()
        .copied()
        .filter(|v| !removed.contains(v))
        .collect()
}

/// Encoding of the tree containing `root`, rooted there: `code(v)` is `(`
/// followed by the children's codes in sorted order, then `)`. Leaves encode
/// as `()`.
pub(crate) fn rooted_code(forest: &Forest, root: VertexId) -> String {
    fn code(forest: &Forest, v: VertexId, parent: Option<VertexId>) -> String {
        let mut children: Vec<String> = forest
            .incident_edges(v)
            .filter(|&(_, n)| Some(n) != parent)
            .map(|(_, n)| code(forest, n, Some(v)))
            .collect();
        children.sort();
        let mut out = String::with_capacity(2 + children.iter().map(String::len).sum::<usize>());
        out.push('(');
        for c in &children {
            out.push_str(c);
        }
        out.push(')');
        out
    }
    code(forest, root, None)
}

fn tree_key(forest: &Forest, component: &BTreeSet<VertexId>) -> String {
    centers(forest, component)
        .into_iter()
        .map(|c| rooted_code(forest, c))
        .min()
        .expect("component is nonempty")
}

/// The canonical root of a tree component: the center whose rooted code is
/// the component's key (ties broken by vertex id; tied roots are automorphic).
fn canonical_root(forest: &Forest, component: &BTreeSet<VertexId>) -> VertexId {
    let mut best: Option<(String, VertexId)> = None;
    for c in centers(forest, component) {
        let code = rooted_code(forest, c);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, c));
        }
    }
    best.expect("component is nonempty").1
}

pub fn canonical_key(forest: &Forest) -> CanonicalKey {
    let mut keys: Vec<String> = forest
        .component_vertex_sets()
        .iter()
        .map(|c| tree_key(forest, c))
        .collect();
    keys.sort();
    CanonicalKey(keys.join("+"))
}

/// Renders a forest back into the input grammar, canonically: components in
/// key order joined by `+`, each rooted at its canonical root with children
/// in code order. Parsing the result gives a forest isomorphic to the input;
/// isomorphic inputs render identically.
pub fn serialize_canonical(forest: &Forest) -> String {
    fn render(forest: &Forest, v: VertexId, parent: Option<VertexId>) -> String {
        let mut children: Vec<(String, VertexId)> = forest
            .incident_edges(v)
            .filter(|&(_, n)| Some(n) != parent)
            .map(|(_, n)| (rooted_code_below(forest, n, v), n))
            .collect();
        if children.is_empty() {
            return "*".to_string();
        }
        children.sort();
        let parts: Vec<String> = children
            .into_iter()
            .map(|(_, n)| render(forest, n, Some(v)))
            .collect();
        format!("({})", parts.join(","))
    }
    fn rooted_code_below(forest: &Forest, v: VertexId, parent: VertexId) -> String {
        let mut children: Vec<String> = forest
            .incident_edges(v)
            .filter(|&(_, n)| n != parent)
            .map(|(_, n)| rooted_code_below(forest, n, v))
            .collect();
        children.sort();
        format!("({})", children.concat())
    }

    let mut rendered: Vec<(String, String)> = forest
        .component_vertex_sets()
        .iter()
        .map(|comp| {
            let root = canonical_root(forest, comp);
            // the root vertex is always written as a parenthesized node
            let mut children: Vec<(String, VertexId)> = forest
                .incident_edges(root)
                .map(|(_, n)| (rooted_code_below(forest, n, root), n))
                .collect();
            children.sort();
            let parts: Vec<String> = children
                .into_iter()
                .map(|(_, n)| render(forest, n, Some(root)))
                .collect();
            (tree_key(forest, comp), format!("({})", parts.join(",")))
        })
        .collect();
    rendered.sort();
    rendered
        .into_iter()
        .map(|(_, text)| text)
        .collect::<Vec<_>>()
        .join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_forest;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn isomorphic_inputs_share_keys() {
        let a = parse_forest("S(2,1,2)").unwrap();
        let b = parse_forest("(*,(*,*),(*,*))").unwrap(); // same tree rooted at its middle
        assert_eq!(canonical_key(&a), canonical_key(&b));

        // path reversal symmetry
        assert_eq!(
            canonical_key(&Forest::path_tree(&[3, 1, 2])),
            canonical_key(&Forest::path_tree(&[2, 1, 3]))
        );
        assert_eq!(
            canonical_key(&Forest::path_tree(&[2, 3, 2])),
            canonical_key(&Forest::path_tree(&[2, 3, 2]))
        );
    }

    #[test]
    fn non_isomorphic_trees_with_equal_edge_counts_differ() {
        assert_ne!(
            canonical_key(&Forest::path_tree(&[2, 2, 2])),
            canonical_key(&Forest::path_tree(&[3, 1, 2]))
        );
    }

    #[test]
    fn serialization_examples() {
        assert_eq!(serialize_canonical(&Forest::star(3)), "(*,*,*)");
        let two = parse_forest("(*,*,*)+(*,*,*)").unwrap();
        assert_eq!(serialize_canonical(&two), "(*,*,*)+(*,*,*)");
        assert_eq!(serialize_canonical(&Forest::empty()), "");
        assert_eq!(serialize_canonical(&Forest::star(1)), "(*)");
    }

    #[test]
    fn round_trip_preserves_keys() {
        for spec in [
            "S(2,1,2)",
            "S(3,1,1,2)",
            "(*,*,*)+(*,*)",
            "((*,*),(*,*),(*,*))",
            "((*,*),(*,*),(*,*),*)",
            "(*)",
        ] {
            let f = parse_forest(spec).unwrap();
            let text = serialize_canonical(&f);
            let g = parse_forest(&text).unwrap();
            assert_eq!(
                canonical_key(&f),
                canonical_key(&g),
                "spec {spec} -> {text}"
            );
        }
    }

    /// Builds a random tree by attaching each new vertex to a uniformly
    /// chosen earlier one, then re-enters it with vertices shuffled.
    fn random_tree_and_relabel(seed: u64, n: usize) -> (Forest, Forest) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let parent = rng.gen_range(0..v);
            edges.push((parent, v));
        }
        let f = Forest::from_edge_list(&edges).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut relabeled: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        // shuffle the edge insertion order too
        for i in (1..relabeled.len()).rev() {
            let j = rng.gen_range(0..=i);
            relabeled.swap(i, j);
        }
        let g = Forest::from_edge_list(&relabeled).unwrap();
        (f, g)
    }

    proptest! {
        #[test]
        fn keys_are_relabeling_invariant(seed in 0u64..500, n in 2usize..12) {
            let (f, g) = random_tree_and_relabel(seed, n);
            prop_assert_eq!(canonical_key(&f), canonical_key(&g));
        }

        #[test]
        fn surgery_commutes_with_isomorphism(seed in 0u64..200, n in 3usize..10) {
            let (f, g) = random_tree_and_relabel(seed, n);
            // deleting corresponding pendant edges gives isomorphic results:
            // match edges by the code pair of their endpoints
            let fe = f.edge_ids().next().unwrap();
            let (a, b) = f.endpoints(fe).unwrap();
            let tag = {
                let mut t = [rooted_code(&f, a), rooted_code(&f, b)];
                t.sort();
                t
            };
            let ge = g
                .edge_ids()
                .find(|&e| {
                    let (x, y) = g.endpoints(e).unwrap();
                    let mut t = [rooted_code(&g, x), rooted_code(&g, y)];
                    t.sort();
                    t == tag
                })
                .expect("isomorphic image of the edge exists");
            prop_assert_eq!(
                canonical_key(&f.delete_edge(fe).unwrap()),
                canonical_key(&g.delete_edge(ge).unwrap())
            );
        }
    }
}

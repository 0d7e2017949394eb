//! Everything that depends on a fixed stable set S: node classes, the
//! canonical exchange loop, wings, free components and the cover of N[s].

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{internal, Result};
use crate::graph::{regular_cover, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Stable,
    /// Exactly one stable neighbor.
    Free(usize),
    /// Two stable neighbors, smaller index first.
    Bound(usize, usize),
    /// No stable neighbor.
    Superfree,
    Dead,
}

/// Classes of all nodes relative to `s`. Fails if some node sees three or
/// more stable nodes or `s` is not stable.
pub fn classify(g: &WeightedGraph, s: &FixedBitSet) -> Result<Vec<NodeClass>> {
    let mut class = vec![NodeClass::Dead; g.bound()];
    for v in g.nodes() {
        let mut sn = g.neighbors(v).iter().copied().filter(|&u| s.contains(u));
        class[v] = if s.contains(v) {
            if sn.next().is_some() {
                return internal(format!("stable set has an edge at {}", g.tag(v)));
            }
            NodeClass::Stable
        } else {
            match (sn.next(), sn.next(), sn.next()) {
                (None, _, _) => NodeClass::Superfree,
                (Some(a), None, _) => NodeClass::Free(a),
                (Some(a), Some(b), None) => NodeClass::Bound(a.min(b), a.max(b)),
                _ => return internal(format!("{} has three stable neighbors", g.tag(v))),
            }
        };
    }
    Ok(class)
}

/// Nodes by descending weight, ties by index.
fn greedy_order(g: &WeightedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = g.nodes().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.weight(v)), v));
    order
}

/// Adds nodes with no neighbor in `s`, heaviest first.
pub fn maximalize(g: &WeightedGraph, s: &mut FixedBitSet) {
    for v in greedy_order(g) {
        if !s.contains(v) && g.nbits(v).is_disjoint(s) {
            s.insert(v);
        }
    }
}

pub fn greedy_maximal_stable_set(g: &WeightedGraph) -> FixedBitSet {
    let mut s = g.empty_set();
    maximalize(g, &mut s);
    s
}

/// Runs the exchange loop until `s` is canonical: no augmenting path
/// `u - s - v` through free nodes and no free node `x` whose closed
/// neighborhood strictly contains that of its stable neighbor.
pub fn canonicalize(g: &WeightedGraph, s0: &FixedBitSet) -> Result<FixedBitSet> {
    let mut s = s0.clone();
    maximalize(g, &mut s);
    let n = g.node_count();
    let cap = n * (n + g.edge_count() + 2) + 16;
    for _ in 0..cap {
        let class = classify(g, &s)?;
        let mut owned: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in g.nodes() {
            if let NodeClass::Free(a) = class[v] {
                owned.entry(a).or_default().push(v);
            }
        }
        if let Some((st, u, v)) = find_augmenting(g, &owned) {
            s.set(st, false);
            s.insert(u);
            s.insert(v);
            maximalize(g, &mut s);
            continue;
        }
        if let Some((x, st)) = find_dominating(g, &class) {
            s.set(st, false);
            s.insert(x);
            continue;
        }
        return Ok(s);
    }
    internal("canonical exchange did not terminate")
}

fn find_augmenting(g: &WeightedGraph, owned: &BTreeMap<usize, Vec<usize>>) -> Option<(usize, usize, usize)> {
    for (&st, fs) in owned {
        for (i, &u) in fs.iter().enumerate() {
            if let Some(&v) = fs[i + 1..].iter().find(|&&v| !g.has_edge(u, v)) {
                return Some((st, u, v));
            }
        }
    }
    None
}

fn find_dominating(g: &WeightedGraph, class: &[NodeClass]) -> Option<(usize, usize)> {
    for x in g.nodes() {
        let NodeClass::Free(st) = class[x] else { continue };
        if g.degree(x) < g.degree(st) {
            continue;
        }
        let nx = g.closed_bits(x);
        let ns = g.closed_bits(st);
        if ns.is_subset(&nx) && ns != nx {
            return Some((x, st));
        }
    }
    None
}

/// Wing membership relative to a fixed stable set.
#[derive(Clone, Debug, Default)]
pub struct Wings {
    /// Bound nodes keyed by their two stable neighbors (smaller first).
    pub bound: BTreeMap<(usize, usize), Vec<usize>>,
    /// `free[(s, t)]`: free nodes of `s` with a free neighbor owned by `t`.
    pub free: BTreeMap<(usize, usize), Vec<usize>>,
    /// Free nodes adjacent to a dissimilar free node.
    pub outer: FixedBitSet,
    /// Representative wing of each bound or outer free node, as an ordered
    /// pair `(own stable neighbor, other)`; bound nodes use `(min, max)`.
    pub rep: Vec<Option<(usize, usize)>>,
}

pub fn compute_wings(g: &WeightedGraph, class: &[NodeClass]) -> Wings {
    let mut w = Wings { outer: g.empty_set(), rep: vec![None; g.bound()], ..Default::default() };
    for u in g.nodes() {
        match class[u] {
            NodeClass::Bound(a, b) => {
                w.bound.entry((a, b)).or_default().push(u);
                w.rep[u] = Some((a, b));
            }
            NodeClass::Free(a) => {
                let mut others: Vec<usize> = Vec::new();
                for &x in g.neighbors(u) {
                    if let NodeClass::Free(b) = class[x] {
                        if b != a {
                            if w.rep[u].is_none() {
                                w.rep[u] = Some((a, b));
                            }
                            others.push(b);
                        }
                    }
                }
                others.sort_unstable();
                others.dedup();
                if !others.is_empty() {
                    w.outer.insert(u);
                }
                for b in others {
                    w.free.entry((a, b)).or_default().push(u);
                }
            }
            _ => {}
        }
    }
    w
}

impl Wings {
    /// W(s, t) as a sorted list.
    pub fn wing(&self, s: usize, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        if let Some(b) = self.bound.get(&(s.min(t), s.max(t))) {
            out.extend(b);
        }
        if let Some(f) = self.free.get(&(s, t)) {
            out.extend(f);
        }
        if let Some(f) = self.free.get(&(t, s)) {
            out.extend(f);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Stable nodes `t` with a nonempty wing W(s, t), ascending.
    pub fn partners(&self, s: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &(a, b) in self.bound.keys() {
            if a == s {
                out.push(b);
            } else if b == s {
                out.push(a);
            }
        }
        for &(a, b) in self.free.keys() {
            if a == s {
                out.push(b);
            } else if b == s {
                out.push(a);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of wings at `s`.
    pub fn k(&self, s: usize) -> usize {
        self.partners(s).len()
    }

    /// Is `u` in W(s, t)?
    pub fn contains(&self, class: &[NodeClass], g: &WeightedGraph, s: usize, t: usize, u: usize) -> bool {
        match class[u] {
            NodeClass::Bound(a, b) => (a, b) == (s.min(t), s.max(t)),
            NodeClass::Free(a) if a == s || a == t => {
                let other = if a == s { t } else { s };
                g.neighbors(u).iter().any(|&x| class[x] == NodeClass::Free(other))
            }
            _ => false,
        }
    }
}

/// Free components: connected pieces of the graph on free nodes whose edges
/// join dissimilar free nodes, kept when they are maximal cliques of G.
#[derive(Clone, Debug, Default)]
pub struct FreeComponents {
    pub comps: Vec<Vec<usize>>,
    /// Distinct stable owners met by each component, ascending.
    pub classes: Vec<Vec<usize>>,
    /// Index into `comps` for nodes that lie in a free component.
    pub comp_of: Vec<Option<usize>>,
}

pub fn free_components(g: &WeightedGraph, class: &[NodeClass]) -> FreeComponents {
    let mut free = g.empty_set();
    for v in g.nodes() {
        if matches!(class[v], NodeClass::Free(_)) {
            free.insert(v);
        }
    }
    let owner = |v: usize| match class[v] {
        NodeClass::Free(a) => a,
        _ => usize::MAX,
    };
    let parts = g.components_where(&free, |u, v| owner(u) == owner(v));
    let mut out = FreeComponents { comp_of: vec![None; g.bound()], ..Default::default() };
    for c in parts {
        if !g.is_clique(&c) || !g.is_maximal_clique(&c) {
            continue;
        }
        let mut cls: Vec<usize> = c.iter().map(|&v| owner(v)).collect();
        cls.sort_unstable();
        cls.dedup();
        if cls.len() < 2 {
            continue;
        }
        for &v in &c {
            out.comp_of[v] = Some(out.comps.len());
        }
        out.comps.push(c);
        out.classes.push(cls);
    }
    out
}

/// The two cliques covering N[s] for each regular stable node s. The first
/// clique extends the first side of the regular cover.
#[derive(Clone, Debug, Default)]
pub struct SCover {
    pub by_stable: BTreeMap<usize, [Vec<usize>; 2]>,
}

/// Greedily extends a clique to a maximal one, adding the smallest index
/// adjacent to everything so far.
pub fn extend_to_maximal(g: &WeightedGraph, seed: &[usize]) -> Vec<usize> {
    let mut q: Vec<usize> = seed.to_vec();
    let mut common = g.alive_set();
    for &v in &q {
        common.intersect_with(g.nbits(v));
    }
    while let Some(x) = common.minimum() {
        q.push(x);
        common.intersect_with(g.nbits(x));
    }
    q.sort_unstable();
    q
}

pub fn s_cover(g: &WeightedGraph, s: &FixedBitSet) -> SCover {
    let mut cover = SCover::default();
    for st in s.ones() {
        let Some((a, b)) = regular_cover(g, st) else { continue };
        let mut c1 = a;
        c1.push(st);
        let mut c2 = b;
        c2.push(st);
        cover.by_stable.insert(st, [extend_to_maximal(g, &c1), extend_to_maximal(g, &c2)]);
    }
    cover
}

impl SCover {
    /// Distinct cliques of the cover with the stable node they belong to.
    pub fn cliques(&self) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (&st, [c1, c2]) in &self.by_stable {
            out.push((st, c1.clone()));
            if c2 != c1 {
                out.push((st, c2.clone()));
            }
        }
        out
    }
}

/// Inner free nodes of `s`: free nodes owned by `s` that are not outer.
pub fn inner(g: &WeightedGraph, class: &[NodeClass], wings: &Wings, s: usize) -> Vec<usize> {
    g.neighbors(s)
        .iter()
        .copied()
        .filter(|&u| class[u] == NodeClass::Free(s) && !wings.outer.contains(u))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::check_canonical;

    #[test]
    fn canonicalize_swaps_dominated_stable_node() {
        // Triangle s x y with z hanging off x.
        let g = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (0, 2), (1, 2), (1, 3)]);
        let mut s0 = g.empty_set();
        s0.insert(0);
        let s = canonicalize(&g, &s0).unwrap();
        let set: Vec<usize> = s.ones().collect();
        assert_eq!(check_canonical(&g, &set), Ok(()));
    }

    #[test]
    fn classes_on_a_path() {
        let g = WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let s = g.set_of(&[0, 2, 4]);
        let c = classify(&g, &s).unwrap();
        assert_eq!(c[1], NodeClass::Bound(0, 2));
        assert_eq!(c[3], NodeClass::Bound(2, 4));
        let w = compute_wings(&g, &c);
        assert_eq!(w.wing(0, 2), vec![1]);
        assert_eq!(w.k(2), 2);
    }

    #[test]
    fn cover_of_clique_is_the_clique() {
        let g = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2), (0, 2)]);
        let s = g.set_of(&[0]);
        let c = s_cover(&g, &s);
        assert_eq!(c.by_stable[&0], [vec![0, 1, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn free_component_of_c5() {
        // C5 with S = {0, 2}: nodes 3 and 4 are free, dissimilar and adjacent.
        let g = WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let s = g.set_of(&[0, 2]);
        let c = classify(&g, &s).unwrap();
        let f = free_components(&g, &c);
        assert_eq!(f.comps, vec![vec![3, 4]]);
        assert_eq!(f.classes, vec![vec![0, 2]]);
    }
}

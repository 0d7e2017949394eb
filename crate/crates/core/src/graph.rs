//! Weighted simple graphs with stable node tags, plus the local detectors
//! the reduction relies on (claws, nets, 5-wheels, regular covers, twins).

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type Weight = i64;

/// Which stage of the pipeline created a node. Originals sort first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Input,
    Soft,
    Free,
    Stable,
}

/// External identity of a node. Indices move under compaction, tags do not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeTag {
    pub phase: Phase,
    pub seq: u32,
}

impl NodeTag {
    pub fn input(seq: u32) -> Self {
        NodeTag { phase: Phase::Input, seq }
    }
}

impl fmt::Display for NodeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::Input => write!(f, "{}", self.seq),
            Phase::Soft => write!(f, "soft{}", self.seq),
            Phase::Free => write!(f, "free{}", self.seq),
            Phase::Stable => write!(f, "slift{}", self.seq),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    adj: Vec<Vec<usize>>,
    bits: Vec<FixedBitSet>,
    weights: Vec<Weight>,
    tags: Vec<NodeTag>,
    alive: Vec<bool>,
    index: HashMap<NodeTag, usize>,
    cap: usize,
    live: usize,
    edges: usize,
}

impl WeightedGraph {
    /// `n` nodes tagged `0..n` with unit weights.
    pub fn new(n: usize) -> Self {
        Self::with_weights(vec![1; n])
    }

    pub fn with_weights(weights: Vec<Weight>) -> Self {
        let mut g = WeightedGraph::default();
        g.reserve(weights.len());
        for (i, w) in weights.into_iter().enumerate() {
            g.add_node(w, NodeTag::input(i as u32));
        }
        g
    }

    pub fn from_edges(weights: Vec<Weight>, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::with_weights(weights);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    fn reserve(&mut self, n: usize) {
        if n <= self.cap {
            return;
        }
        let cap = n.max(2 * self.cap).max(8);
        for b in &mut self.bits {
            b.grow(cap);
        }
        self.cap = cap;
    }

    pub fn add_node(&mut self, weight: Weight, tag: NodeTag) -> usize {
        assert!(weight >= 0, "node weights are nonnegative");
        assert!(!self.index.contains_key(&tag), "duplicate tag {tag}");
        let v = self.adj.len();
        self.reserve(v + 1);
        self.adj.push(Vec::new());
        self.bits.push(FixedBitSet::with_capacity(self.cap));
        self.weights.push(weight);
        self.tags.push(tag);
        self.alive.push(true);
        self.index.insert(tag, v);
        self.live += 1;
        v
    }

    /// Adds `uv`; returns false when it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop at {u}");
        assert!(self.alive[u] && self.alive[v]);
        if self.bits[u].contains(v) {
            return false;
        }
        self.bits[u].insert(v);
        self.bits[v].insert(u);
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.edges += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.bits[u].contains(v) {
            return false;
        }
        self.bits[u].set(v, false);
        self.bits[v].set(u, false);
        if let Ok(p) = self.adj[u].binary_search(&v) {
            self.adj[u].remove(p);
        }
        if let Ok(p) = self.adj[v].binary_search(&u) {
            self.adj[v].remove(p);
        }
        self.edges -= 1;
        true
    }

    /// Tombstones `v`. Indices of other nodes are unaffected.
    pub fn remove_node(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        for u in std::mem::take(&mut self.adj[v]) {
            self.bits[u].set(v, false);
            let p = self.adj[u].binary_search(&v).unwrap();
            self.adj[u].remove(p);
            self.edges -= 1;
        }
        self.bits[v].clear();
        self.alive[v] = false;
        self.index.remove(&self.tags[v]);
        self.live -= 1;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u].contains(v)
    }

    /// One past the largest index ever handed out.
    pub fn bound(&self) -> usize {
        self.adj.len()
    }

    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_alive(&self, v: usize) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.adj.len()).filter(move |&v| self.alive[v])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes()
            .flat_map(move |u| self.adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn nbits(&self, v: usize) -> &FixedBitSet {
        &self.bits[v]
    }

    /// Closed neighborhood as a bitset.
    pub fn closed_bits(&self, v: usize) -> FixedBitSet {
        let mut b = self.bits[v].clone();
        b.insert(v);
        b
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, v: usize) -> Weight {
        self.weights[v]
    }

    pub fn set_weight(&mut self, v: usize, w: Weight) {
        assert!(w >= 0);
        self.weights[v] = w;
    }

    pub fn tag(&self, v: usize) -> NodeTag {
        self.tags[v]
    }

    pub fn index_of(&self, tag: NodeTag) -> Option<usize> {
        self.index.get(&tag).copied()
    }

    pub fn max_weight(&self) -> Weight {
        self.nodes().map(|v| self.weights[v]).max().unwrap_or(0)
    }

    /// Largest `seq` used by tags of the given phase, if any.
    pub fn max_seq(&self, phase: Phase) -> Option<u32> {
        self.tags.iter().filter(|t| t.phase == phase).map(|t| t.seq).max()
    }

    /// Empty bitset sized for this graph.
    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.cap)
    }

    pub fn set_of(&self, nodes: &[usize]) -> FixedBitSet {
        let mut b = self.empty_set();
        for &v in nodes {
            b.insert(v);
        }
        b
    }

    pub fn alive_set(&self) -> FixedBitSet {
        let mut b = self.empty_set();
        for v in self.nodes() {
            b.insert(v);
        }
        b
    }

    pub fn weight_of(&self, nodes: &[usize]) -> Weight {
        nodes.iter().map(|&v| self.weights[v]).sum()
    }

    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &u)| nodes[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_stable(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &u)| nodes[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    /// N(Q): nodes outside `q` with a neighbor in `q`.
    pub fn neighborhood(&self, q: &[usize]) -> Vec<usize> {
        let mut b = self.empty_set();
        for &v in q {
            b.union_with(&self.bits[v]);
        }
        for &v in q {
            b.set(v, false);
        }
        b.ones().collect()
    }

    /// Is the clique `q` maximal (no outside node adjacent to all of it)?
    pub fn is_maximal_clique(&self, q: &[usize]) -> bool {
        if q.is_empty() {
            return false;
        }
        let mut common = self.bits[q[0]].clone();
        for &v in &q[1..] {
            common.intersect_with(&self.bits[v]);
        }
        common.count_ones(..) == 0
    }

    /// Induced subgraph on `nodes`, keeping tags and weights. Returns the
    /// subgraph and the old index of each new index.
    pub fn induced(&self, nodes: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut order: Vec<usize> = nodes.to_vec();
        order.sort_unstable();
        order.dedup();
        let mut g = WeightedGraph::default();
        g.reserve(order.len());
        let mut map = HashMap::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            g.add_node(self.weights[v], self.tags[v]);
            map.insert(v, i);
        }
        for (i, &v) in order.iter().enumerate() {
            for u in &self.adj[v] {
                if let Some(&j) = map.get(u) {
                    if j > i {
                        g.add_edge(i, j);
                    }
                }
            }
        }
        (g, order)
    }

    /// Drops tombstones.
    pub fn compact(&self) -> (WeightedGraph, Vec<usize>) {
        let alive: Vec<usize> = self.nodes().collect();
        self.induced(&alive)
    }

    /// Connected components of the graph restricted to `within`, ignoring
    /// edges for which `skip` returns true. Each component is sorted and the
    /// list is ordered by smallest member.
    pub fn components_where(
        &self,
        within: &FixedBitSet,
        skip: impl Fn(usize, usize) -> bool,
    ) -> Vec<Vec<usize>> {
        let mut seen = self.empty_set();
        let mut out = Vec::new();
        for s in within.ones() {
            if seen.contains(s) || !self.alive[s] {
                continue;
            }
            seen.insert(s);
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if within.contains(v) && !seen.contains(v) && !skip(u, v) {
                        seen.insert(v);
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_where(&self.alive_set(), |_, _| false)
    }

    /// Rejects weights large enough to overflow the lifting arithmetic.
    pub fn check_weight_bound(&self) -> Result<()> {
        let n = self.node_count() as u128;
        let w = self.max_weight().max(0) as u128;
        let product = n * (w + 4 * n);
        if product >= 1u128 << 62 {
            return Err(Error::WeightBound { product });
        }
        Ok(())
    }

    pub fn claw_error(&self, center: usize, leaves: [usize; 3]) -> Error {
        Error::ClawFound {
            center: self.tags[center],
            leaves: leaves.map(|l| self.tags[l]),
        }
    }
}

fn minus(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut r = a.clone();
    r.difference_with(b);
    r
}

fn and(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut r = a.clone();
    r.intersect_with(b);
    r
}

/// First claw `(center, [a, b, c])` in index order, or None.
pub fn find_claw(g: &WeightedGraph) -> Option<(usize, [usize; 3])> {
    for w in g.nodes() {
        let nw = g.nbits(w);
        let adj = g.neighbors(w);
        for (i, &a) in adj.iter().enumerate() {
            let rest_a = minus(nw, g.nbits(a));
            for &b in &adj[i + 1..] {
                if g.has_edge(a, b) {
                    continue;
                }
                let rest = minus(&rest_a, g.nbits(b));
                if let Some(c) = rest.ones().find(|&c| c > b) {
                    return Some((w, [a, b, c]));
                }
            }
        }
    }
    None
}

pub fn is_claw_free(g: &WeightedGraph) -> bool {
    find_claw(g).is_none()
}

/// Splits N(v) into two cliques if possible. The first clique holds the
/// nodes 2-colored first in the complement of G[N(v)]; either may be empty.
pub fn regular_cover(g: &WeightedGraph, v: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let nv = g.neighbors(v);
    let mut color: HashMap<usize, u8> = HashMap::with_capacity(nv.len());
    for &s in nv {
        if color.contains_key(&s) {
            continue;
        }
        color.insert(s, 0);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let cx = color[&x];
            for &y in nv {
                if y == x || g.has_edge(x, y) {
                    continue;
                }
                match color.get(&y) {
                    Some(&cy) if cy == cx => return None,
                    Some(_) => {}
                    None => {
                        color.insert(y, 1 - cx);
                        stack.push(y);
                    }
                }
            }
        }
    }
    let (a, b): (Vec<usize>, Vec<usize>) = nv.iter().partition(|x| color[x] == 0);
    Some((a, b))
}

pub fn is_regular(g: &WeightedGraph, v: usize) -> bool {
    regular_cover(g, v).is_some()
}

/// A net: triangle `x,y,z` with private, pairwise non-adjacent pendants
/// `x',y',z'`. Returned as `[x, y, z, x', y', z']`.
pub fn find_net(g: &WeightedGraph) -> Option<[usize; 6]> {
    find_net_in(g, &g.alive_set())
}

/// Same as [`find_net`] on the subgraph induced by `within`.
pub fn find_net_in(g: &WeightedGraph, within: &FixedBitSet) -> Option<[usize; 6]> {
    for x in within.ones() {
        let nx = and(g.nbits(x), within);
        for y in nx.ones().filter(|&y| y > x) {
            let nxy = and(&nx, g.nbits(y));
            for z in nxy.ones().filter(|&z| z > y) {
                let private = |a: usize, b: usize, c: usize| {
                    let mut p = and(g.nbits(a), within);
                    p.difference_with(g.nbits(b));
                    p.difference_with(g.nbits(c));
                    p.set(b, false);
                    p.set(c, false);
                    p
                };
                let px = private(x, y, z);
                let py = private(y, x, z);
                let pz = private(z, x, y);
                for xp in px.ones() {
                    let py2 = minus(&py, g.nbits(xp));
                    for yp in py2.ones() {
                        let mut pz2 = minus(&pz, g.nbits(xp));
                        pz2.difference_with(g.nbits(yp));
                        if let Some(zp) = pz2.minimum() {
                            return Some([x, y, z, xp, yp, zp]);
                        }
                    }
                }
            }
        }
    }
    None
}

/// A 5-wheel: hub plus an induced 5-cycle in its neighborhood.
pub fn find_five_wheel(g: &WeightedGraph) -> Option<(usize, [usize; 5])> {
    for h in g.nodes() {
        if let Some(c) = induced_c5(g, g.nbits(h)) {
            return Some((h, c));
        }
    }
    None
}

fn induced_c5(g: &WeightedGraph, within: &FixedBitSet) -> Option<[usize; 5]> {
    for a in within.ones() {
        let na = and(g.nbits(a), within);
        for b in na.ones().filter(|&b| b > a) {
            let mut cs = and(g.nbits(b), within);
            cs.difference_with(g.nbits(a));
            cs.set(a, false);
            for c in cs.ones().filter(|&c| c > a) {
                let mut ds = and(g.nbits(c), within);
                ds.difference_with(g.nbits(a));
                ds.difference_with(g.nbits(b));
                ds.set(a, false);
                for d in ds.ones().filter(|&d| d > a) {
                    let mut es = and(g.nbits(d), &na);
                    es.difference_with(g.nbits(b));
                    es.difference_with(g.nbits(c));
                    if let Some(e) = es.ones().find(|&e| e > a && e != b) {
                        return Some([a, b, c, d, e]);
                    }
                }
            }
        }
    }
    None
}

/// True iff `nodes` induce a graph with no stable set of size `k + 1`.
pub fn alpha_at_most(g: &WeightedGraph, nodes: &[usize], k: usize) -> bool {
    let cand = g.set_of(nodes);
    !has_stable(g, &cand, k + 1)
}

fn has_stable(g: &WeightedGraph, cand: &FixedBitSet, need: usize) -> bool {
    if need == 0 {
        return true;
    }
    let mut rest = cand.clone();
    loop {
        if rest.count_ones(..) < need {
            return false;
        }
        let v = rest.minimum().unwrap();
        rest.set(v, false);
        let next = minus(&rest, g.nbits(v));
        if has_stable(g, &next, need - 1) {
            return true;
        }
    }
}

/// α of the subgraph induced by `nodes` (exponential; for small inputs).
pub fn alpha(g: &WeightedGraph, nodes: &[usize]) -> usize {
    let mut k = 0;
    while !alpha_at_most(g, nodes, k) {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinRecord {
    pub kept: NodeTag,
    pub removed: NodeTag,
    pub adjacent: bool,
}

/// Removal log for twins; reinsertion replays it backwards.
#[derive(Clone, Debug, Default)]
pub struct TwinLedger {
    pub records: Vec<TwinRecord>,
}

fn are_twins(g: &WeightedGraph, u: usize, v: usize) -> bool {
    if g.degree(u) != g.degree(v) {
        return false;
    }
    let a = g.neighbors(u).iter().filter(|&&x| x != v);
    let b = g.neighbors(v).iter().filter(|&&x| x != u);
    a.eq(b)
}

/// Removes twins until none are left. Adjacent twins keep the heavier node
/// (ties: smaller tag); non-adjacent twins merge into the smaller tag with
/// summed weight. The result is compacted.
pub fn remove_twins(g: &WeightedGraph) -> (WeightedGraph, TwinLedger) {
    let mut h = g.clone();
    let mut ledger = TwinLedger::default();
    loop {
        let mut changed = false;
        let mut by_degree: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in h.nodes() {
            by_degree.entry(h.degree(v)).or_default().push(v);
        }
        let mut degrees: Vec<usize> = by_degree.keys().copied().collect();
        degrees.sort_unstable();
        for d in degrees {
            let group = &by_degree[&d];
            for (i, &u) in group.iter().enumerate() {
                for &v in &group[i + 1..] {
                    if !h.is_alive(u) || !h.is_alive(v) || !are_twins(&h, u, v) {
                        continue;
                    }
                    let adjacent = h.has_edge(u, v);
                    let (kept, removed) = if adjacent {
                        let (wu, wv) = (h.weight(u), h.weight(v));
                        if wv > wu || (wv == wu && h.tag(v) < h.tag(u)) {
                            (v, u)
                        } else {
                            (u, v)
                        }
                    } else if h.tag(u) < h.tag(v) {
                        (u, v)
                    } else {
                        (v, u)
                    };
                    if !adjacent {
                        let w = h.weight(u) + h.weight(v);
                        h.set_weight(kept, w);
                    }
                    ledger.records.push(TwinRecord {
                        kept: h.tag(kept),
                        removed: h.tag(removed),
                        adjacent,
                    });
                    h.remove_node(removed);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (h.compact().0, ledger)
}

impl TwinLedger {
    /// Lifts a stable set of the reduced graph back to the original one.
    pub fn reinsert(&self, reduced: &WeightedGraph, s: &[NodeTag]) -> Result<Vec<NodeTag>> {
        let mut idx = Vec::with_capacity(s.len());
        for t in s {
            match reduced.index_of(*t) {
                Some(i) => idx.push(i),
                None => return Err(Error::Invalid(format!("tag {t} not in reduced graph"))),
            }
        }
        if !reduced.is_stable(&idx) {
            return Err(Error::Invalid("set is not stable in the reduced graph".into()));
        }
        let mut set: std::collections::BTreeSet<NodeTag> = s.iter().copied().collect();
        for r in self.records.iter().rev() {
            if !r.adjacent && set.contains(&r.kept) {
                set.insert(r.removed);
            }
        }
        Ok(set.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> WeightedGraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::from_edges(vec![1; n], &e)
    }

    fn wheel5() -> WeightedGraph {
        let mut e: Vec<_> = (1..=5).map(|i| (0, i)).collect();
        e.extend((1..=5).map(|i| (i, i % 5 + 1)));
        WeightedGraph::from_edges(vec![1; 6], &e)
    }

    #[test]
    fn star_is_a_claw() {
        let g = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(find_claw(&g), Some((0, [1, 2, 3])));
        assert!(is_claw_free(&cycle(5)));
    }

    #[test]
    fn regular_cover_of_triangle_and_wheel() {
        let g = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(regular_cover(&g, 0), Some((vec![1, 2], vec![])));
        let w = wheel5();
        assert_eq!(regular_cover(&w, 0), None);
        assert!(regular_cover(&w, 1).is_some());
        assert!(find_five_wheel(&w).is_some());
        assert!(find_five_wheel(&cycle(5)).is_none());
    }

    #[test]
    fn net_detection() {
        let g = WeightedGraph::from_edges(
            vec![1; 6],
            &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)],
        );
        assert_eq!(find_net(&g), Some([0, 1, 2, 3, 4, 5]));
        let mut h = g.clone();
        h.add_edge(3, 4);
        assert_eq!(find_net(&h), None);
    }

    #[test]
    fn nonadjacent_twins_merge_weights() {
        let g = WeightedGraph::from_edges(vec![5, 1, 7, 2], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let (h, ledger) = remove_twins(&g);
        // 0~2 and 1~3 merge, then the two survivors are adjacent twins.
        assert_eq!(h.node_count(), 1);
        assert_eq!(h.weight(0), 12);
        let back = ledger.reinsert(&h, &[NodeTag::input(0)]).unwrap();
        assert_eq!(back, vec![NodeTag::input(0), NodeTag::input(2)]);
    }

    #[test]
    fn adjacent_twins_keep_heavier() {
        let g = WeightedGraph::from_edges(vec![3, 9, 1], &[(0, 1), (0, 2), (1, 2)]);
        let (h, ledger) = remove_twins(&g);
        assert_eq!(h.node_count(), 1);
        assert_eq!(h.tag(0), NodeTag::input(1));
        assert_eq!(h.weight(0), 9);
        assert!(ledger.records.iter().all(|r| r.adjacent));
    }

    #[test]
    fn alpha_bounds() {
        let c5 = cycle(5);
        let all: Vec<usize> = (0..5).collect();
        assert!(alpha_at_most(&c5, &all, 2));
        assert!(!alpha_at_most(&c5, &all, 1));
        assert_eq!(alpha(&cycle(8), &(0..8).collect::<Vec<_>>()), 4);
    }

    #[test]
    fn weight_bound_guard() {
        let g = WeightedGraph::with_weights(vec![1 << 61, 1]);
        assert!(matches!(g.check_weight_bound(), Err(Error::WeightBound { .. })));
        assert!(cycle(4).check_weight_bound().is_ok());
    }
}

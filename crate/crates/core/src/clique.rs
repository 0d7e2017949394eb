//! Clique predicates (Q-distance, weak normality, normality), rigid edges
//! and soft cliques, and the weakly normal candidate list.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::graph::WeightedGraph;
use crate::stable::{FreeComponents, NodeClass, SCover, Wings};

/// Non-adjacent `u, v` with no common neighbor in `q`.
pub fn q_distant(g: &WeightedGraph, q: &FixedBitSet, u: usize, v: usize) -> bool {
    assert!(!g.has_edge(u, v), "q_distant needs non-adjacent nodes");
    let mut common = g.nbits(u).clone();
    common.intersect_with(g.nbits(v));
    common.is_disjoint(q)
}

/// Every non-adjacent pair of N(Q) is Q-distant.
pub fn is_weakly_normal(g: &WeightedGraph, q: &[usize]) -> bool {
    let qs = g.set_of(q);
    let nq = g.neighborhood(q);
    let touch: Vec<FixedBitSet> = nq
        .iter()
        .map(|&u| {
            let mut b = g.nbits(u).clone();
            b.intersect_with(&qs);
            b
        })
        .collect();
    for i in 0..nq.len() {
        for j in i + 1..nq.len() {
            if !g.has_edge(nq[i], nq[j]) && !touch[i].is_disjoint(&touch[j]) {
                return false;
            }
        }
    }
    true
}

/// |N(u) ∩ Q| for every u in N(Q).
pub fn nsize(g: &WeightedGraph, q: &[usize]) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for &x in q {
        for &u in g.neighbors(x) {
            *out.entry(u).or_insert(0) += 1;
        }
    }
    for x in q {
        out.remove(x);
    }
    out
}

/// Weak normality by counting: in a claw-free graph two non-adjacent
/// neighbors of a maximal clique share a neighbor in it exactly when their
/// counts add up to more than |Q|.
pub fn is_weakly_normal_nsize(g: &WeightedGraph, q: &[usize]) -> bool {
    let ns = nsize(g, q);
    let mut nq: Vec<(usize, usize)> = ns.into_iter().collect();
    nq.sort_unstable();
    for i in 0..nq.len() {
        for j in i + 1..nq.len() {
            let ((u, a), (v, b)) = (nq[i], nq[j]);
            if !g.has_edge(u, v) && a + b > q.len() {
                return false;
            }
        }
    }
    true
}

/// Three mutually non-adjacent, mutually Q-distant nodes in N(Q).
pub fn is_normal(g: &WeightedGraph, q: &[usize]) -> bool {
    let qs = g.set_of(q);
    let nq = g.neighborhood(q);
    let k = nq.len();
    let mut ok = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = !g.has_edge(nq[i], nq[j]) && q_distant(g, &qs, nq[i], nq[j]);
            ok[i][j] = d;
            ok[j][i] = d;
        }
    }
    (0..k).any(|i| (i + 1..k).any(|j| ok[i][j] && (j + 1..k).any(|l| ok[i][l] && ok[j][l])))
}

/// Normality of `q` through a regular node `u` whose closed neighborhood is
/// covered by the maximal cliques `q` and `qbar`: two Q-distant nodes of
/// N(Q) \ N(u) plus a node of `qbar \ q` adjacent to neither.
pub fn is_normal_via_cover(g: &WeightedGraph, u: usize, q: &[usize], qbar: &[usize]) -> bool {
    let qs = g.set_of(q);
    let far: Vec<usize> = g
        .neighborhood(q)
        .into_iter()
        .filter(|&x| !g.has_edge(u, x))
        .collect();
    let rest: Vec<usize> = qbar.iter().copied().filter(|x| !qs.contains(*x)).collect();
    for (i, &x) in far.iter().enumerate() {
        for &y in &far[i + 1..] {
            if g.has_edge(x, y) || !q_distant(g, &qs, x, y) {
                continue;
            }
            if rest.iter().any(|&z| !g.has_edge(z, x) && !g.has_edge(z, y)) {
                return true;
            }
        }
    }
    false
}

/// Both ends of `uv` see two non-adjacent common neighbors.
pub fn is_rigid_edge(g: &WeightedGraph, u: usize, v: usize) -> bool {
    let mut common = g.nbits(u).clone();
    common.intersect_with(g.nbits(v));
    for x in common.ones() {
        let mut rest = common.clone();
        rest.difference_with(g.nbits(x));
        rest.set(x, false);
        if rest.count_ones(..) > 0 {
            return true;
        }
    }
    false
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn groups(q: &[usize], parent: &mut [usize]) -> Vec<Vec<usize>> {
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &v) in q.iter().enumerate() {
        let r = find(parent, i);
        by_root.entry(r).or_default().push(v);
    }
    let mut parts: Vec<Vec<usize>> = by_root.into_values().collect();
    for p in &mut parts {
        p.sort_unstable();
    }
    parts.sort();
    parts
}

/// Components of the rigid-edge graph restricted to `q`, straight from the
/// definition.
pub fn rigid_partition(g: &WeightedGraph, q: &[usize]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..q.len()).collect();
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if g.has_edge(q[i], q[j]) && is_rigid_edge(g, q[i], q[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    groups(q, &mut parent)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoftClique {
    pub clique: Vec<usize>,
    pub parts: Vec<Vec<usize>>,
}

/// Soft cliques among `cliques`. For each outside neighbor u of Q a root
/// `Root[u, Q]` in N(u) ∩ Q is recorded during one scan of the edges (the
/// last one written wins); G_Q joins every other node of N(u) ∩ Q to that
/// root, and Q is soft when G_Q is disconnected.
pub fn soft_cliques(g: &WeightedGraph, cliques: &[Vec<usize>]) -> Vec<SoftClique> {
    let mut member: Vec<Vec<usize>> = vec![Vec::new(); g.bound()];
    for (ci, q) in cliques.iter().enumerate() {
        for &v in q {
            member[v].push(ci);
        }
    }
    let mut root: HashMap<(usize, usize), usize> = HashMap::new();
    for (u, v) in g.edges() {
        for &c in &member[u] {
            if !member[v].contains(&c) {
                root.insert((v, c), u);
            }
        }
        for &c in &member[v] {
            if !member[u].contains(&c) {
                root.insert((u, c), v);
            }
        }
    }
    let pos: Vec<HashMap<usize, usize>> = cliques
        .iter()
        .map(|q| q.iter().enumerate().map(|(i, &v)| (v, i)).collect())
        .collect();
    let mut parent: Vec<Vec<usize>> = cliques.iter().map(|q| (0..q.len()).collect()).collect();
    for u in g.nodes() {
        for &v in g.neighbors(u) {
            for &c in &member[v] {
                if member[u].contains(&c) {
                    continue;
                }
                let r = root[&(u, c)];
                if r != v {
                    let (a, b) = (pos[c][&v], pos[c][&r]);
                    let (ra, rb) = (find(&mut parent[c], a), find(&mut parent[c], b));
                    parent[c][ra] = rb;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (c, q) in cliques.iter().enumerate() {
        let parts = groups(q, &mut parent[c]);
        if parts.len() > 1 {
            out.push(SoftClique { clique: q.clone(), parts });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// One of the two cover cliques of this stable node.
    Cover(usize),
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub nodes: Vec<usize>,
    pub origin: Origin,
}

/// Cover cliques followed by free components, duplicates removed.
pub fn cover_and_free(cover: &SCover, free: &FreeComponents) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for (st, q) in cover.cliques() {
        if !out.iter().any(|c| c.nodes == q) {
            out.push(Candidate { nodes: q, origin: Origin::Cover(st) });
        }
    }
    for q in &free.comps {
        if !out.iter().any(|c| &c.nodes == q) {
            out.push(Candidate { nodes: q.clone(), origin: Origin::Free });
        }
    }
    out
}

/// The weakly normal members of the cover and the free components. With
/// `quasi_line` set, free components meeting two similarity classes are
/// screened through bound nodes of their wing and the rest through the
/// counting test; otherwise each clique is tested directly.
pub fn build_candidates(
    g: &WeightedGraph,
    class: &[NodeClass],
    wings: &Wings,
    free: &FreeComponents,
    cover: &SCover,
    quasi_line: bool,
) -> Vec<Candidate> {
    let all = cover_and_free(cover, free);
    if !quasi_line {
        return all.into_iter().filter(|c| is_weakly_normal(g, &c.nodes)).collect();
    }
    // Free components meeting exactly two classes, grouped by that pair.
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ci, cls) in free.classes.iter().enumerate() {
        if cls.len() == 2 {
            by_pair.entry((cls[0], cls[1])).or_default().push(ci);
        }
    }
    let mut dropped = vec![false; free.comps.len()];
    for (&(s, t), comps) in &by_pair {
        let bound = wings.bound.get(&(s, t)).cloned().unwrap_or_default();
        for &ci in comps {
            let q = &free.comps[ci];
            let side = |a: usize| -> Vec<usize> {
                q.iter().copied().filter(|&v| class[v] == NodeClass::Free(a)).collect()
            };
            let (qs, qt) = (side(s), side(t));
            if comps.len() >= 2 {
                dropped[ci] = bound.iter().any(|&x| {
                    qs.iter().any(|&z| g.has_edge(x, z)) && qt.iter().any(|&v| g.has_edge(x, v))
                });
            } else {
                let ns = nsize(g, q);
                let qset = g.set_of(q);
                let mut around = g.nbits(s).clone();
                around.union_with(g.nbits(t));
                around.difference_with(&qset);
                dropped[ci] = bound.iter().any(|&x| {
                    let nx = ns.get(&x).copied().unwrap_or(0);
                    around.ones().any(|y| {
                        y != x
                            && !g.has_edge(x, y)
                            && nx + ns.get(&y).copied().unwrap_or(0) > q.len()
                    })
                });
            }
        }
    }
    all.into_iter()
        .filter(|c| match c.origin {
            Origin::Free => {
                let ci = free.comps.iter().position(|q| *q == c.nodes).unwrap();
                !dropped[ci]
            }
            Origin::Cover(_) => is_weakly_normal_nsize(g, &c.nodes),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3)])
    }

    fn wheel5() -> WeightedGraph {
        let mut e: Vec<_> = (1..=5).map(|i| (0, i)).collect();
        e.extend((1..=5).map(|i| (i, i % 5 + 1)));
        WeightedGraph::from_edges(vec![1; 6], &e)
    }

    fn bull() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])
    }

    #[test]
    fn distance_examples() {
        let g = p4();
        assert!(q_distant(&g, &g.set_of(&[1, 2]), 0, 3));
        let w = wheel5();
        assert!(!q_distant(&w, &w.set_of(&[0, 1, 2]), 3, 5));
        let b = bull();
        assert!(q_distant(&b, &b.set_of(&[0, 1, 2]), 3, 4));
    }

    #[test]
    fn weak_normality_examples() {
        assert!(is_weakly_normal(&p4(), &[1, 2]));
        assert!(!is_weakly_normal(&wheel5(), &[0, 1, 2]));
        assert!(is_weakly_normal(&bull(), &[0, 1, 2]));
        assert!(is_weakly_normal_nsize(&bull(), &[0, 1, 2]));
    }

    #[test]
    fn normality_examples() {
        let net = WeightedGraph::from_edges(
            vec![1; 6],
            &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)],
        );
        assert!(is_normal(&net, &[0, 1, 2]));
        assert!(!is_normal(&bull(), &[0, 1, 2]));
    }

    #[test]
    fn rigid_edges() {
        assert!(!is_rigid_edge(&p4(), 1, 2));
        assert!(is_rigid_edge(&wheel5(), 0, 1));
        // Diamond: 0 and 1 share the non-adjacent neighbors 2 and 3.
        let d = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!(is_rigid_edge(&d, 0, 1));
    }

    #[test]
    fn soft_clique_examples() {
        let g = p4();
        let soft = soft_cliques(&g, &[vec![1, 2]]);
        assert_eq!(soft, vec![SoftClique { clique: vec![1, 2], parts: vec![vec![1], vec![2]] }]);
        let w = wheel5();
        assert!(soft_cliques(&w, &[vec![0, 1, 2]]).is_empty());
        assert_eq!(rigid_partition(&w, &[0, 1, 2]).len(), 1);
        let mut k4 = WeightedGraph::new(4);
        for i in 0..4 {
            for j in i + 1..4 {
                k4.add_edge(i, j);
            }
        }
        let soft = soft_cliques(&k4, &[vec![0, 1, 2, 3]]);
        assert_eq!(soft[0].parts.len(), 4);
    }
}

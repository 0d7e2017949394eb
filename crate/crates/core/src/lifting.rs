//! The lifting operation on a partitioned maximal clique, its ledger, and
//! the way solutions are carried back down through it.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;

use crate::clique::is_weakly_normal;
use crate::error::{internal, Error, Result};
use crate::graph::{NodeTag, Phase, Weight, WeightedGraph};

/// Everything needed to undo one lifting.
#[derive(Clone, Debug)]
pub struct LiftRecord {
    pub phase: Phase,
    pub clique: Vec<NodeTag>,
    pub parts: Vec<Vec<NodeTag>>,
    /// `q[i]` is attached to part `i`.
    pub q: Vec<NodeTag>,
    /// The new clique; `qbar[i]` is matched to `q[i]`.
    pub qbar: Vec<NodeTag>,
    pub removed: Vec<(NodeTag, NodeTag)>,
    pub w_m: Weight,
}

/// Indices of the nodes a lifting created.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub q: Vec<usize>,
    pub qbar: Vec<usize>,
    pub record: LiftRecord,
}

/// Why `(q, parts)` fails to be liftable, if it does.
pub fn liftable_violation(g: &WeightedGraph, q: &[usize], parts: &[Vec<usize>]) -> Option<String> {
    let mut part_of = vec![usize::MAX; g.bound()];
    for (i, p) in parts.iter().enumerate() {
        if p.is_empty() {
            return Some("empty part".into());
        }
        for &v in p {
            if part_of[v] != usize::MAX {
                return Some(format!("{} in two parts", g.tag(v)));
            }
            part_of[v] = i;
        }
    }
    if parts.iter().map(Vec::len).sum::<usize>() != q.len() || q.iter().any(|&v| part_of[v] == usize::MAX) {
        return Some("parts do not cover the clique".into());
    }
    if !g.is_clique(q) || !g.is_maximal_clique(q) {
        return Some("not a maximal clique".into());
    }
    if !is_weakly_normal(g, q) {
        return Some("not weakly normal".into());
    }
    let qs = g.set_of(q);
    for (i, &x) in q.iter().enumerate() {
        for &y in &q[i + 1..] {
            if part_of[x] == part_of[y] {
                continue;
            }
            let mut z = g.nbits(x).clone();
            z.intersect_with(g.nbits(y));
            z.difference_with(&qs);
            for zz in z.ones() {
                let mut h = g.nbits(zz).clone();
                h.difference_with(&qs);
                h.difference_with(g.nbits(x));
                h.difference_with(g.nbits(y));
                if let Some(hh) = h.minimum() {
                    return Some(format!(
                        "paw {} {} : {} {}",
                        g.tag(x),
                        g.tag(y),
                        g.tag(zz),
                        g.tag(hh)
                    ));
                }
            }
        }
    }
    for h in g.neighborhood(q) {
        let mut seen: Vec<usize> = g
            .neighbors(h)
            .iter()
            .filter(|&&x| qs.contains(x))
            .map(|&x| part_of[x])
            .collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() >= 3 {
            return Some(format!("{} sees three parts", g.tag(h)));
        }
    }
    None
}

/// Lifts `q` with respect to `parts`: cross-part edges are removed, a new
/// clique `qbar` is added and each `q[i]` joins `qbar[i]` and part `i`. All
/// new nodes weigh `w_m`, which must exceed every weight in the clique.
pub fn lift(
    g: &mut WeightedGraph,
    q: &[usize],
    parts: &[Vec<usize>],
    w_m: Weight,
    phase: Phase,
    next_seq: &mut u32,
) -> Result<Lifted> {
    if let Some(why) = liftable_violation(g, q, parts) {
        return Err(Error::NotLiftable(why));
    }
    if q.iter().any(|&v| g.weight(v) >= w_m) {
        return internal("lifting weight does not dominate the clique");
    }
    let mut part_of = vec![usize::MAX; g.bound()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            part_of[v] = i;
        }
    }
    let mut removed = Vec::new();
    for (i, &x) in q.iter().enumerate() {
        for &y in &q[i + 1..] {
            if part_of[x] != part_of[y] {
                g.remove_edge(x, y);
                removed.push((g.tag(x), g.tag(y)));
            }
        }
    }
    let mut tag = || {
        let t = NodeTag { phase, seq: *next_seq };
        *next_seq += 1;
        t
    };
    let p = parts.len();
    let mut qs = Vec::with_capacity(p);
    let mut qbars = Vec::with_capacity(p);
    for _ in 0..p {
        let a = g.add_node(w_m, tag());
        let b = g.add_node(w_m, tag());
        qs.push(a);
        qbars.push(b);
    }
    for i in 0..p {
        g.add_edge(qs[i], qbars[i]);
        for &t in &parts[i] {
            g.add_edge(qs[i], t);
        }
        for j in i + 1..p {
            g.add_edge(qbars[i], qbars[j]);
        }
    }
    let record = LiftRecord {
        phase,
        clique: q.iter().map(|&v| g.tag(v)).collect(),
        parts: parts.iter().map(|p| p.iter().map(|&v| g.tag(v)).collect()).collect(),
        q: qs.iter().map(|&v| g.tag(v)).collect(),
        qbar: qbars.iter().map(|&v| g.tag(v)).collect(),
        removed,
        w_m,
    };
    Ok(Lifted { q: qs, qbar: qbars, record })
}

/// Extends S after a lifting: `q[i]` joins when part `i` misses S,
/// otherwise `qbar[i]` does.
pub fn extend_stable(s: &mut FixedBitSet, parts: &[Vec<usize>], lifted: &Lifted) {
    s.grow(lifted.qbar.iter().chain(&lifted.q).max().map_or(0, |m| m + 1));
    for (i, p) in parts.iter().enumerate() {
        if p.iter().any(|&v| s.contains(v)) {
            s.insert(lifted.qbar[i]);
        } else {
            s.insert(lifted.q[i]);
        }
    }
}

/// Log of all liftings applied to one component, in order.
#[derive(Clone, Debug, Default)]
pub struct LiftLedger {
    pub records: Vec<LiftRecord>,
}

impl LiftLedger {
    /// Carries an optimal stable set of the final graph back to the graph
    /// before the first lifting. Each step checks that every lifting pair is
    /// hit and that the remainder is stable in the pre-lifting graph, which is
    /// rebuilt from `last` by undoing the records backwards.
    pub fn unwind(&self, last: &WeightedGraph, s_star: &[NodeTag]) -> Result<(WeightedGraph, Vec<NodeTag>)> {
        let mut g = last.clone();
        let mut set: BTreeSet<NodeTag> = s_star.iter().copied().collect();
        for r in self.records.iter().rev() {
            for (a, b) in r.q.iter().zip(&r.qbar) {
                if !set.contains(a) && !set.contains(b) {
                    return internal(format!("lifting pair {a}/{b} missed by the solution"));
                }
            }
            for t in r.q.iter().chain(&r.qbar) {
                set.remove(t);
                let v = g.index_of(*t).ok_or_else(|| Error::Internal(format!("missing {t}")))?;
                g.remove_node(v);
            }
            for (a, b) in &r.removed {
                let (x, y) = (g.index_of(*a), g.index_of(*b));
                match (x, y) {
                    (Some(x), Some(y)) => {
                        g.add_edge(x, y);
                    }
                    _ => return internal("removed edge endpoint missing"),
                }
            }
            let idx: Vec<usize> = set.iter().filter_map(|t| g.index_of(*t)).collect();
            if idx.len() != set.len() || !g.is_stable(&idx) {
                return internal("unwound set is not stable");
            }
        }
        Ok((g, set.into_iter().collect()))
    }

    /// One block per record: `lift <index> <phase> w=<w_M>`, then `clique`,
    /// `part` (one line each), `q`, `qbar` and `removed a-b ...` lines.
    pub fn dump(&self) -> String {
        let join = |ts: &[NodeTag]| ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        for (i, r) in self.records.iter().enumerate() {
            out += &format!("lift {i} {:?} w={}\n", r.phase, r.w_m);
            out += &format!("  clique {}\n", join(&r.clique));
            for p in &r.parts {
                out += &format!("  part {}\n", join(p));
            }
            out += &format!("  q {}\n  qbar {}\n", join(&r.q), join(&r.qbar));
            let removed: Vec<String> = r.removed.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            out += &format!("  removed {}\n", removed.join(" "));
        }
        out
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.records.iter().filter(|r| r.phase == phase).count()
    }
}

/// Tags of all lifting nodes in the ledger.
pub fn lifting_tags(ledger: &LiftLedger) -> HashSet<NodeTag> {
    ledger.records.iter().flat_map(|r| r.q.iter().chain(&r.qbar).copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_mwss;

    fn p4() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3)])
    }

    #[test]
    fn p4_lift_shape() {
        let mut g = p4();
        let mut seq = 0;
        let before = brute_mwss(&g, &[], &[]).unwrap().unwrap().0;
        let l = lift(&mut g, &[1, 2], &[vec![1], vec![2]], 2, Phase::Soft, &mut seq).unwrap();
        // P4 becomes P8: 2p nodes and p(p-1)/2 + p + |Q| edges added.
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.edge_count(), 7);
        assert!(!g.has_edge(1, 2));
        assert!(g.has_edge(l.qbar[0], l.qbar[1]));
        let after = brute_mwss(&g, &[], &[]).unwrap().unwrap().0;
        assert_eq!(after, before + 2 * 2);
    }

    #[test]
    fn trivial_partition_adds_pendant_pair() {
        let mut g = WeightedGraph::from_edges(vec![3, 4, 5], &[(0, 1), (1, 2), (0, 2)]);
        let mut seq = 0;
        lift(&mut g, &[0, 1, 2], &[vec![0, 1, 2]], 6, Phase::Soft, &mut seq).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(brute_mwss(&g, &[], &[]).unwrap().unwrap().0, 5 + 6);
    }

    #[test]
    fn rejects_non_clique() {
        let mut g = p4();
        let mut seq = 0;
        let r = lift(&mut g, &[0, 2], &[vec![0], vec![2]], 2, Phase::Soft, &mut seq);
        assert!(matches!(r, Err(Error::NotLiftable(_))));
    }

    #[test]
    fn unwind_recovers_optimum() {
        let g0 = p4();
        let mut g = g0.clone();
        let mut seq = 0;
        let l = lift(&mut g, &[1, 2], &[vec![1], vec![2]], 2, Phase::Soft, &mut seq).unwrap();
        let ledger = LiftLedger { records: vec![l.record] };
        let (w, s) = brute_mwss(&g, &[], &[]).unwrap().unwrap();
        assert_eq!(w, 2 + 4);
        let tags: Vec<NodeTag> = s.iter().map(|&v| g.tag(v)).collect();
        let (back, set) = ledger.unwind(&g, &tags).unwrap();
        assert_eq!(back.edge_count(), 3);
        let idx: Vec<usize> = set.iter().map(|t| g0.index_of(*t).unwrap()).collect();
        assert_eq!(g0.weight_of(&idx), 2);
    }
}

//! Solves a basic graph: components of G - M are classified into matched
//! cliques, strips with at most two boundary edges and isolated pieces;
//! strips are summarized by their boundary-pattern values and everything is
//! glued into one weighted matching instance.

use std::collections::BTreeMap;

use crate::error::{certificate, internal, Error, Result};
use crate::exact;
use crate::graph::{Weight, WeightedGraph};
use crate::matching::max_weight_matching;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Clique,
    Strip,
    Isolated,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub kind: Kind,
    /// `(u, v)`: matching edge with `u` inside and `v` outside.
    pub boundary: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub comps: Vec<Component>,
    pub comp_of: Vec<usize>,
}

/// Components of `g - m`, classified. Fails when the graph is not basic
/// with respect to `m` in the way the gadget construction needs.
pub fn decompose(g: &WeightedGraph, m: &[(usize, usize)]) -> Result<Decomposition> {
    let mut mate = vec![usize::MAX; g.bound()];
    for &(u, v) in m {
        if !g.has_edge(u, v) || mate[u] != usize::MAX || mate[v] != usize::MAX {
            return Err(Error::NotBasic(format!("{}-{} is not a matching edge", g.tag(u), g.tag(v))));
        }
        mate[u] = v;
        mate[v] = u;
    }
    let alive = g.alive_set();
    let parts = g.components_where(&alive, |u, v| mate[u] == v);
    let mut comp_of = vec![usize::MAX; g.bound()];
    for (i, c) in parts.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut comps = Vec::with_capacity(parts.len());
    for (i, nodes) in parts.into_iter().enumerate() {
        let mut boundary = Vec::new();
        for &u in &nodes {
            let v = mate[u];
            if v == usize::MAX {
                continue;
            }
            if comp_of[v] == i {
                return Err(Error::NotBasic(format!(
                    "matching edge {}-{} inside one component",
                    g.tag(u),
                    g.tag(v)
                )));
            }
            boundary.push((u, v));
        }
        let kind = if boundary.is_empty() {
            Kind::Isolated
        } else if g.is_clique(&nodes) {
            Kind::Clique
        } else if boundary.len() <= 2 {
            Kind::Strip
        } else {
            return Err(Error::NotBasic(format!(
                "component at {} has {} boundary edges",
                g.tag(nodes[0]),
                boundary.len()
            )));
        };
        comps.push(Component { nodes, kind, boundary });
    }
    for &(u, v) in m {
        if comps[comp_of[u]].kind == Kind::Strip && comps[comp_of[v]].kind == Kind::Strip {
            return Err(Error::NotBasic(format!("matching edge {}-{} joins two strips", g.tag(u), g.tag(v))));
        }
    }
    Ok(Decomposition { comps, comp_of })
}

/// Best value and witness of a strip for each boundary pattern; `b[i][j]`
/// has the first boundary node in the set iff `i == 1`, likewise `j`.
/// Best weight and set for one boundary pattern; None when infeasible.
pub type Pattern = Option<(Weight, Vec<usize>)>;

#[derive(Clone, Debug)]
pub struct StripValues {
    pub b: [[Pattern; 2]; 2],
}

#[allow(clippy::needless_range_loop)]
pub fn strip_values(g: &WeightedGraph, c: &Component) -> Result<StripValues> {
    let us: Vec<usize> = c.boundary.iter().map(|e| e.0).collect();
    let mut b: [[Pattern; 2]; 2] = Default::default();
    let second = if us.len() == 2 { 2 } else { 1 };
    for i in 0..2 {
        for j in 0..second {
            let mut fin = Vec::new();
            let mut fout = Vec::new();
            for (bit, &u) in [i, j].iter().zip(&us) {
                if *bit == 1 {
                    fin.push(u);
                } else {
                    fout.push(u);
                }
            }
            b[i][j] = exact::solve_forced(g, &c.nodes, &fin, &fout)?;
        }
    }
    if b[0][0].is_none() {
        return internal("empty pattern infeasible");
    }
    Ok(StripValues { b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    /// Choose this graph node.
    Node(usize),
    /// Strip `comp` realizes pattern `(i, j)`.
    Pattern { comp: usize, i: usize, j: usize },
}

#[derive(Clone, Debug)]
pub struct RootEdge {
    pub a: usize,
    pub b: usize,
    pub w: Weight,
    pub payload: Payload,
}

/// The weighted multigraph whose best matching plus `offset` is the
/// answer. Nodes: one per matched clique, strip hubs and leaves, hubs for
/// clique-clique matching edges and fresh leaves.
#[derive(Clone, Debug, Default)]
pub struct RootInstance {
    pub nodes: usize,
    pub edges: Vec<RootEdge>,
    pub offset: Weight,
}

impl RootInstance {
    /// Weighted edge list in the instance dialect, for debugging.
    pub fn render(&self) -> String {
        let mut out = format!("p root {} {}\n", self.nodes, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("e {} {} {}\n", e.a + 1, e.b + 1, e.w));
        }
        out
    }
}

pub fn build_root_instance(
    g: &WeightedGraph,
    d: &Decomposition,
    values: &BTreeMap<usize, StripValues>,
) -> RootInstance {
    let mut ri = RootInstance::default();
    let fresh = |ri: &mut RootInstance| {
        ri.nodes += 1;
        ri.nodes - 1
    };
    let mut root = vec![usize::MAX; d.comps.len()];
    for (i, c) in d.comps.iter().enumerate() {
        if c.kind == Kind::Clique {
            root[i] = fresh(&mut ri);
        }
    }
    for (i, c) in d.comps.iter().enumerate() {
        match c.kind {
            Kind::Isolated => {}
            Kind::Clique => {
                for &x in &c.nodes {
                    match c.boundary.iter().find(|e| e.0 == x) {
                        None => {
                            let leaf = fresh(&mut ri);
                            ri.edges.push(RootEdge { a: root[i], b: leaf, w: g.weight(x), payload: Payload::Node(x) });
                        }
                        Some(&(_, y)) => {
                            let j = d.comp_of[y];
                            // Each clique-clique edge gets one hub, made by the smaller side.
                            if d.comps[j].kind == Kind::Clique && i < j {
                                let t = fresh(&mut ri);
                                ri.edges.push(RootEdge { a: root[i], b: t, w: g.weight(x), payload: Payload::Node(x) });
                                ri.edges.push(RootEdge { a: root[j], b: t, w: g.weight(y), payload: Payload::Node(y) });
                            }
                        }
                    }
                }
            }
            Kind::Strip => {
                let sv = &values[&i];
                let b00 = sv.b[0][0].as_ref().unwrap().0;
                ri.offset += b00;
                let hubs: Vec<usize> = c.boundary.iter().map(|_| fresh(&mut ri)).collect();
                let leaf = fresh(&mut ri);
                for (k, &(_, v)) in c.boundary.iter().enumerate() {
                    ri.edges.push(RootEdge { a: root[d.comp_of[v]], b: hubs[k], w: g.weight(v), payload: Payload::Node(v) });
                }
                let pattern = |ri: &mut RootInstance, a: usize, b: usize, i2: usize, j2: usize| {
                    if let Some((w, _)) = &sv.b[i2][j2] {
                        ri.edges.push(RootEdge { a, b, w: w - b00, payload: Payload::Pattern { comp: i, i: i2, j: j2 } });
                    }
                };
                pattern(&mut ri, hubs[0], leaf, 1, 0);
                if hubs.len() == 2 {
                    pattern(&mut ri, hubs[1], leaf, 0, 1);
                    pattern(&mut ri, hubs[0], hubs[1], 1, 1);
                }
            }
        }
    }
    ri
}

/// Checks, for one strip, that the best gadget state compatible with each
/// choice of partner nodes equals the best compatible boundary pattern.
pub fn check_gadget(ri: &RootInstance, comp: usize, sv: &StripValues, partners: &[usize]) -> Result<()> {
    let own: Vec<&RootEdge> = ri
        .edges
        .iter()
        .filter(|e| match e.payload {
            Payload::Pattern { comp: c, .. } => c == comp,
            _ => false,
        })
        .collect();
    let hub_edges: Vec<&RootEdge> = ri
        .edges
        .iter()
        .filter(|e| matches!(e.payload, Payload::Node(v) if partners.contains(&v)))
        .filter(|e| own.iter().any(|o| o.a == e.b || o.b == e.b))
        .collect();
    let b00 = sv.b[0][0].as_ref().unwrap().0;
    let k = partners.len();
    for chosen in 0..(1usize << k) {
        // Partner i chosen means its hub edge is used.
        let mut used = Vec::new();
        for (i, &v) in partners.iter().enumerate() {
            if chosen >> i & 1 == 1 {
                let Some(e) = hub_edges.iter().find(|e| e.payload == Payload::Node(v)) else {
                    return certificate("strip hub edge missing");
                };
                used.push(e.b);
            }
        }
        let mut best_gadget = 0;
        for mask in 0..(1usize << own.len()) {
            let mut ends = used.clone();
            let mut ok = true;
            let mut val = 0;
            for (i, e) in own.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    if ends.contains(&e.a) || ends.contains(&e.b) {
                        ok = false;
                        break;
                    }
                    ends.push(e.a);
                    ends.push(e.b);
                    val += e.w;
                }
            }
            if ok {
                best_gadget = best_gadget.max(val);
            }
        }
        let mut best_pattern = 0;
        for i in 0..2 {
            for j in 0..2 {
                let Some((w, _)) = &sv.b[i][j] else { continue };
                let bits = [i, j];
                if (0..k).any(|t| bits[t] == 1 && chosen >> t & 1 == 1) {
                    continue;
                }
                best_pattern = best_pattern.max(w - b00);
            }
        }
        if best_gadget != best_pattern {
            return certificate(format!(
                "gadget of strip {comp} gives {best_gadget}, patterns give {best_pattern}"
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompositionStats {
    pub cliques: usize,
    pub strips: usize,
    pub isolated: usize,
    pub root_nodes: usize,
    pub root_edges: usize,
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub weight: Weight,
    pub set: Vec<usize>,
    pub decomposition: Decomposition,
    pub root: RootInstance,
    pub stats: CompositionStats,
}

/// Maximum weight stable set of a basic graph `g` with matching `m`.
pub fn compose(g: &WeightedGraph, m: &[(usize, usize)], certify: bool) -> Result<Composition> {
    let d = decompose(g, m)?;
    let mut values = BTreeMap::new();
    for (i, c) in d.comps.iter().enumerate() {
        if c.kind == Kind::Strip {
            values.insert(i, strip_values(g, c)?);
        }
    }
    let ri = build_root_instance(g, &d, &values);
    if certify {
        for (&i, sv) in &values {
            let partners: Vec<usize> = d.comps[i].boundary.iter().map(|e| e.1).collect();
            check_gadget(&ri, i, sv, &partners)?;
        }
    }
    let edges: Vec<(usize, usize, Weight)> = ri.edges.iter().map(|e| (e.a, e.b, e.w)).collect();
    let mate = max_weight_matching(ri.nodes, &edges);
    // One edge per matched pair: the heaviest, first on ties.
    let mut picked: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (k, e) in ri.edges.iter().enumerate() {
        if e.w > 0 && mate[e.a] == Some(e.b) {
            let key = (e.a.min(e.b), e.a.max(e.b));
            match picked.get(&key) {
                Some(&o) if ri.edges[o].w >= e.w => {}
                _ => {
                    picked.insert(key, k);
                }
            }
        }
    }
    let mut set = Vec::new();
    let mut pattern: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut matched = 0;
    for &k in picked.values() {
        let e = &ri.edges[k];
        matched += e.w;
        match e.payload {
            Payload::Node(v) => set.push(v),
            Payload::Pattern { comp, i, j } => {
                pattern.insert(comp, (i, j));
            }
        }
    }
    for (&i, sv) in &values {
        let (a, b) = pattern.get(&i).copied().unwrap_or((0, 0));
        set.extend(&sv.b[a][b].as_ref().unwrap().1);
    }
    for c in &d.comps {
        if c.kind == Kind::Isolated {
            set.extend(exact::solve(g, &c.nodes).1);
        }
    }
    set.sort_unstable();
    set.dedup();
    let weight = g.weight_of(&set);
    if !g.is_stable(&set) {
        return internal("decoded set is not stable");
    }
    let isolated: Weight = d
        .comps
        .iter()
        .filter(|c| c.kind == Kind::Isolated)
        .map(|c| exact::solve(g, &c.nodes).0)
        .sum();
    if weight != matched + ri.offset + isolated {
        return internal(format!(
            "decoded weight {weight} differs from matching value {}",
            matched + ri.offset + isolated
        ));
    }
    let count = |k: Kind| d.comps.iter().filter(|c| c.kind == k).count();
    let stats = CompositionStats {
        cliques: count(Kind::Clique),
        strips: count(Kind::Strip),
        isolated: count(Kind::Isolated),
        root_nodes: ri.nodes,
        root_edges: ri.edges.len(),
    };
    Ok(Composition { weight, set, decomposition: d, root: ri, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::lift;
    use crate::oracle::brute_mwss;
    use crate::Phase;

    /// P4 lifted at its middle edge: 0-1-q1-b1-b2-q2-2-3.
    fn p8() -> (WeightedGraph, Vec<(usize, usize)>, Weight) {
        let mut g = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3)]);
        let mut seq = 0;
        let l = lift(&mut g, &[1, 2], &[vec![1], vec![2]], 2, Phase::Soft, &mut seq).unwrap();
        let m = vec![(l.q[0], l.qbar[0]), (l.q[1], l.qbar[1])];
        (g, m, 2)
    }

    #[test]
    fn p8_decomposition() {
        let (g, m, _) = p8();
        let d = decompose(&g, &m).unwrap();
        let kinds: Vec<Kind> = d.comps.iter().map(|c| c.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == Kind::Clique).count(), 1);
        assert_eq!(kinds.iter().filter(|k| **k == Kind::Strip).count(), 2);
        let clique = d.comps.iter().find(|c| c.kind == Kind::Clique).unwrap();
        assert_eq!(clique.nodes, vec![m[0].1, m[1].1]);
    }

    #[test]
    fn p8_strip_values_and_root() {
        let (g, m, wm) = p8();
        let d = decompose(&g, &m).unwrap();
        let side = d.comps.iter().position(|c| c.nodes.contains(&0)).unwrap();
        let sv = strip_values(&g, &d.comps[side]).unwrap();
        assert_eq!(sv.b[1][0].as_ref().unwrap().0, wm + 1);
        assert_eq!(sv.b[0][0].as_ref().unwrap().0, 1);
        let r = compose(&g, &m, true).unwrap();
        assert_eq!(r.root.nodes, 5);
        assert_eq!(r.root.offset, 2);
        let mut ws: Vec<Weight> = r.root.edges.iter().map(|e| e.w).collect();
        ws.sort_unstable();
        assert_eq!(ws, vec![wm; 4]);
        assert_eq!(r.weight, 2 * wm + 2);
        assert_eq!(r.weight, brute_mwss(&g, &[], &[]).unwrap().unwrap().0);
    }

    #[test]
    fn two_boundary_path_values() {
        // u1 - a - u2 with weights 2, 5, 3, each end matched to a pendant.
        let g = WeightedGraph::from_edges(vec![2, 5, 3, 1, 1], &[(0, 1), (1, 2), (0, 3), (2, 4)]);
        let m = [(0, 3), (2, 4)];
        let d = decompose(&g, &m).unwrap();
        let strip = d.comps.iter().find(|c| c.kind == Kind::Strip).unwrap();
        let sv = strip_values(&g, strip).unwrap();
        let v = |i: usize, j: usize| sv.b[i][j].as_ref().unwrap().0;
        assert_eq!((v(0, 0), v(1, 0), v(0, 1), v(1, 1)), (5, 2, 3, 5));
        assert_eq!(compose(&g, &m, true).unwrap().weight, 7);
    }

    #[test]
    fn empty_matching_is_isolated() {
        let g = WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let r = compose(&g, &[], true).unwrap();
        assert_eq!(r.stats.isolated, 1);
        assert_eq!(r.weight, 2);
    }

    #[test]
    fn rejects_strip_strip_edge() {
        let g = WeightedGraph::from_edges(vec![1; 6], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        assert!(matches!(decompose(&g, &[(2, 3)]), Err(Error::NotBasic(_))));
    }
}

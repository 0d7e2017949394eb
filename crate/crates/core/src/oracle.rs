//! Slow reference implementations used to check the fast paths: exact
//! stable-set and matching search, structural predicates written straight
//! from their definitions, and seeded instance generators.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::graph::{alpha_at_most, find_claw, find_net_in, Weight, WeightedGraph};

/// Largest number of undecided nodes [`brute_mwss`] accepts.
pub const ORACLE_NODE_LIMIT: usize = 32;
/// Largest edge count [`brute_matching`] accepts.
pub const ORACLE_EDGE_LIMIT: usize = 20;

/// Exact maximum weight stable set by branch and bound.
///
/// Nodes in `forced_in` must be in the answer and nodes in `forced_out` must
/// not; both are applied as graph surgery before the search. Returns `None`
/// when the forced set is not stable. Among optimal sets the first one met by
/// an include-first search over ascending indices is returned.
pub fn brute_mwss(
    g: &WeightedGraph,
    forced_in: &[usize],
    forced_out: &[usize],
) -> Result<Option<(Weight, Vec<usize>)>> {
    if !g.is_stable(forced_in) || forced_in.iter().any(|v| forced_out.contains(v)) {
        return Ok(None);
    }
    let mut cand = g.alive_set();
    for &v in forced_out {
        cand.set(v, false);
    }
    for &v in forced_in {
        cand.set(v, false);
        cand.difference_with(g.nbits(v));
    }
    let free = cand.count_ones(..);
    if free > ORACLE_NODE_LIMIT {
        return Err(Error::TooLarge { nodes: free, limit: ORACLE_NODE_LIMIT });
    }
    let mut search = Search { g, best_w: -1, best: Vec::new(), cur: Vec::new() };
    search.run(cand, 0);
    let mut set: Vec<usize> = forced_in.to_vec();
    set.extend(search.best);
    set.sort_unstable();
    let w = g.weight_of(&set);
    Ok(Some((w, set)))
}

struct Search<'a> {
    g: &'a WeightedGraph,
    best_w: Weight,
    best: Vec<usize>,
    cur: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, cand: FixedBitSet, cur_w: Weight) {
        let Some(v) = cand.minimum() else {
            if cur_w > self.best_w {
                self.best_w = cur_w;
                self.best = self.cur.clone();
            }
            return;
        };
        if cur_w + clique_cover_bound(self.g, &cand) <= self.best_w {
            return;
        }
        let mut with = cand.clone();
        with.set(v, false);
        with.difference_with(self.g.nbits(v));
        self.cur.push(v);
        self.run(with, cur_w + self.g.weight(v));
        self.cur.pop();
        let mut without = cand;
        without.set(v, false);
        self.run(without, cur_w);
    }
}

/// Sum over a greedy clique cover of the heaviest weight in each clique.
fn clique_cover_bound(g: &WeightedGraph, cand: &FixedBitSet) -> Weight {
    let mut order: Vec<usize> = cand.ones().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.weight(v)), v));
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut bound = 0;
    'next: for v in order {
        for c in cliques.iter_mut() {
            if c.iter().all(|&u| g.has_edge(u, v)) {
                c.push(v);
                continue 'next;
            }
        }
        bound += g.weight(v);
        cliques.push(vec![v]);
    }
    bound
}

/// Exact maximum weight matching by exhaustive search. Returns the weight
/// and the chosen edge indices.
pub fn brute_matching(edges: &[(usize, usize, Weight)]) -> Result<(Weight, Vec<usize>)> {
    if edges.len() > ORACLE_EDGE_LIMIT {
        return Err(Error::TooLarge { nodes: edges.len(), limit: ORACLE_EDGE_LIMIT });
    }
    fn go(
        edges: &[(usize, usize, Weight)],
        i: usize,
        used: &mut BTreeSet<usize>,
        cur: &mut Vec<usize>,
        w: Weight,
        best: &mut (Weight, Vec<usize>),
    ) {
        if i == edges.len() {
            if w > best.0 {
                *best = (w, cur.clone());
            }
            return;
        }
        let (u, v, x) = edges[i];
        if x > 0 && !used.contains(&u) && !used.contains(&v) {
            used.insert(u);
            used.insert(v);
            cur.push(i);
            go(edges, i + 1, used, cur, w + x, best);
            cur.pop();
            used.remove(&u);
            used.remove(&v);
        }
        go(edges, i + 1, used, cur, w, best);
    }
    let mut best = (0, Vec::new());
    go(edges, 0, &mut BTreeSet::new(), &mut Vec::new(), 0, &mut best);
    Ok(best)
}

fn stable_neighbors(g: &WeightedGraph, s: &FixedBitSet, v: usize) -> Vec<usize> {
    g.neighbors(v).iter().copied().filter(|&u| s.contains(u)).collect()
}

/// Checks stability, maximality, and the two canonicity conditions straight
/// from their definitions. Returns a description of the first violation.
pub fn check_canonical(g: &WeightedGraph, s: &[usize]) -> std::result::Result<(), String> {
    if !g.is_stable(s) {
        return Err("not stable".into());
    }
    let set = g.set_of(s);
    let mut owner = vec![None; g.bound()];
    for v in g.nodes() {
        if set.contains(v) {
            continue;
        }
        let sn = stable_neighbors(g, &set, v);
        match sn.len() {
            0 => return Err(format!("not maximal at {}", g.tag(v))),
            1 => owner[v] = Some(sn[0]),
            _ => {}
        }
    }
    for v in g.nodes() {
        let Some(sv) = owner[v] else { continue };
        for u in g.nodes().filter(|&u| u > v) {
            if owner[u] == Some(sv) && !g.has_edge(u, v) {
                return Err(format!(
                    "augmenting path {} {} {}",
                    g.tag(v),
                    g.tag(sv),
                    g.tag(u)
                ));
            }
        }
        // x dominates S(x) when N[x] strictly contains N[S(x)].
        let nx = g.closed_bits(v);
        let ns = g.closed_bits(sv);
        if ns.is_subset(&nx) && nx != ns {
            return Err(format!("{} dominates {}", g.tag(v), g.tag(sv)));
        }
    }
    Ok(())
}

/// Liftability of a clique `q` with the given partition, from the three
/// defining conditions.
pub fn check_liftable(
    g: &WeightedGraph,
    q: &[usize],
    parts: &[Vec<usize>],
) -> std::result::Result<(), String> {
    if !g.is_clique(q) {
        return Err("not a clique".into());
    }
    let mut part_of = vec![usize::MAX; g.bound()];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            part_of[v] = i;
        }
    }
    if q.iter().any(|&v| part_of[v] == usize::MAX) || parts.iter().map(Vec::len).sum::<usize>() != q.len() {
        return Err("parts do not partition the clique".into());
    }
    let inq = g.set_of(q);
    let nq = g.neighborhood(q);
    for (i, &u) in nq.iter().enumerate() {
        for &v in &nq[i + 1..] {
            if g.has_edge(u, v) {
                continue;
            }
            if q.iter().any(|&x| g.has_edge(u, x) && g.has_edge(v, x)) {
                return Err(format!("{} {} not distant", g.tag(u), g.tag(v)));
            }
        }
    }
    for (i, &x) in q.iter().enumerate() {
        for &y in &q[i + 1..] {
            if part_of[x] == part_of[y] {
                continue;
            }
            for &z in g.neighbors(x) {
                if inq.contains(z) || !g.has_edge(z, y) {
                    continue;
                }
                for &h in g.neighbors(z) {
                    if !inq.contains(h) && h != x && h != y && !g.has_edge(h, x) && !g.has_edge(h, y) {
                        return Err(format!("paw on {} {}", g.tag(x), g.tag(y)));
                    }
                }
            }
        }
    }
    for &h in &nq {
        let hit: BTreeSet<usize> = g
            .neighbors(h)
            .iter()
            .filter(|&&x| inq.contains(x))
            .map(|&x| part_of[x])
            .collect();
        if hit.len() >= 3 {
            return Err(format!("{} sees three parts", g.tag(h)));
        }
    }
    Ok(())
}

/// Components of `G - M`.
pub fn components_minus_matching(g: &WeightedGraph, m: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mset: BTreeSet<(usize, usize)> = m.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    g.components_where(&g.alive_set(), |u, v| mset.contains(&(u.min(v), u.max(v))))
}

/// Checks the final structure: every component of `G - M` that is not an
/// M-clique meets at most two matching edges and is {claw, net}-free or has
/// α ≤ 3 once its matched nodes are removed.
pub fn check_basic(g: &WeightedGraph, m: &[(usize, usize)]) -> std::result::Result<(), String> {
    let mut matched = g.empty_set();
    for &(a, b) in m {
        if matched.contains(a) || matched.contains(b) || !g.has_edge(a, b) {
            return Err("not a matching of the graph".into());
        }
        matched.insert(a);
        matched.insert(b);
    }
    for c in components_minus_matching(g, m) {
        let boundary: Vec<usize> = c.iter().copied().filter(|&v| matched.contains(v)).collect();
        let is_clique = g.is_clique(&c);
        if is_clique && !boundary.is_empty() {
            continue;
        }
        if boundary.len() > 2 {
            return Err(format!("component at {} meets {} matching edges", g.tag(c[0]), boundary.len()));
        }
        let interior: Vec<usize> = c.iter().copied().filter(|&v| !matched.contains(v)).collect();
        if alpha_at_most(g, &interior, 3) {
            continue;
        }
        let (mut h, order) = g.induced(&c);
        for &(a, b) in m {
            if let (Ok(i), Ok(j)) = (order.binary_search(&a), order.binary_search(&b)) {
                h.remove_edge(i, j);
            }
        }
        if find_claw(&h).is_some() {
            return Err(format!("component at {} has a claw", g.tag(c[0])));
        }
        if find_net_in(&h, &h.alive_set()).is_some() {
            return Err(format!("component at {} has a net", g.tag(c[0])));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Line,
    Circular,
    Mixed,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Line, Model::Circular, Model::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Model::Line => "line",
            Model::Circular => "circular",
            Model::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(Model::Line),
            "circular" => Ok(Model::Circular),
            "mixed" => Ok(Model::Mixed),
            _ => Err(Error::Invalid(format!("unknown model {s}"))),
        }
    }
}

/// Seeded claw-free instance with weights uniform in `1..=w_max`.
pub fn gen_instance(model: Model, n: usize, seed: u64, w_max: Weight) -> WeightedGraph {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut g = match model {
        Model::Line => gen_line(&mut rng, n),
        Model::Circular => gen_circular(&mut rng, n),
        Model::Mixed => gen_mixed(&mut rng, n),
    };
    let nodes: Vec<usize> = g.nodes().collect();
    for v in nodes {
        g.set_weight(v, rng.gen_range(1..=w_max.max(1)));
    }
    g
}

/// Line graph of a random multigraph with `n` edges.
fn gen_line(rng: &mut SplitMix64, n: usize) -> WeightedGraph {
    let lo = (n / 3).max(2);
    let hi = (2 * n / 3).max(lo);
    let r = rng.gen_range(lo..=hi);
    let ends: Vec<(usize, usize)> = (0..n)
        .map(|_| {
            let a = rng.gen_range(0..r);
            let mut b = rng.gen_range(0..r - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    let mut g = WeightedGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = ends[i];
            let (c, d) = ends[j];
            if a == c || a == d || b == c || b == d {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Points on a circle; two points are adjacent when some arc covers both.
fn gen_circular(rng: &mut SplitMix64, n: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    if n < 2 {
        return g;
    }
    let arcs = (n / 2).max(1);
    let max_len = (n / 3).max(1);
    for _ in 0..arcs {
        let start = rng.gen_range(0..n);
        let len = rng.gen_range(1..=max_len);
        for i in 0..=len {
            for j in i + 1..=len {
                let (a, b) = ((start + i) % n, (start + j) % n);
                if a != b {
                    g.add_edge(a, b);
                }
            }
        }
    }
    g
}

/// 5-wheels, nets and cliques joined along random cliques, then claws are
/// repaired by deleting the smallest leaf until none remain.
fn gen_mixed(rng: &mut SplitMix64, n: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < n {
        let left = n - next;
        let kind = rng.gen_range(0..3);
        let base = next;
        let block: Vec<usize> = match kind {
            0 if left >= 6 => {
                for i in 1..=5 {
                    g.add_edge(base, base + i);
                    g.add_edge(base + i, base + i % 5 + 1);
                }
                (base..base + 6).collect()
            }
            1 if left >= 6 => {
                for (a, b) in [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)] {
                    g.add_edge(base + a, base + b);
                }
                (base..base + 6).collect()
            }
            _ => {
                let k = rng.gen_range(1..=left.min(5));
                for i in 0..k {
                    for j in i + 1..k {
                        g.add_edge(base + i, base + j);
                    }
                }
                (base..base + k).collect()
            }
        };
        next += block.len();
        blocks.push(block);
    }
    let joins = blocks.len().saturating_sub(1) + blocks.len() / 2;
    for _ in 0..joins {
        if blocks.len() < 2 {
            break;
        }
        let a = rng.gen_range(0..blocks.len());
        let mut b = rng.gen_range(0..blocks.len() - 1);
        if b >= a {
            b += 1;
        }
        let ka = random_clique(&g, &blocks[a], rng);
        let kb = random_clique(&g, &blocks[b], rng);
        for &x in &ka {
            for &y in &kb {
                if x != y {
                    g.add_edge(x, y);
                }
            }
        }
    }
    while let Some((_, leaves)) = find_claw(&g) {
        g.remove_node(leaves[0]);
    }
    g.compact().0
}

/// A node of `block` plus, with probability 1/2, one of its neighbors there.
fn random_clique(g: &WeightedGraph, block: &[usize], rng: &mut SplitMix64) -> Vec<usize> {
    let v = block[rng.gen_range(0..block.len())];
    let nb: Vec<usize> = g.neighbors(v).iter().copied().filter(|u| block.contains(u)).collect();
    if !nb.is_empty() && rng.gen_bool(0.5) {
        vec![v, nb[rng.gen_range(0..nb.len())]]
    } else {
        vec![v]
    }
}

/// All maximal cliques of `g[within]` (Bron-Kerbosch with pivoting), each
/// sorted, in discovery order. Gives up with `None` past `limit` cliques.
pub fn maximal_cliques(g: &WeightedGraph, within: &FixedBitSet, limit: usize) -> Option<Vec<Vec<usize>>> {
    fn rec(
        g: &WeightedGraph,
        r: &mut Vec<usize>,
        mut p: FixedBitSet,
        mut x: FixedBitSet,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        if p.is_clear() && x.is_clear() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return out.len() <= limit;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| g.nbits(u).intersection(&p).count())
            .unwrap();
        let branch: Vec<usize> = p.ones().filter(|&v| !g.nbits(pivot).contains(v)).collect();
        for v in branch {
            let mut p2 = p.clone();
            p2.intersect_with(g.nbits(v));
            let mut x2 = x.clone();
            x2.intersect_with(g.nbits(v));
            r.push(v);
            let ok = rec(g, r, p2, x2, out, limit);
            r.pop();
            if !ok {
                return false;
            }
            p.set(v, false);
            x.insert(v);
        }
        true
    }
    let mut out = Vec::new();
    let mut p = within.clone();
    p.intersect_with(&g.alive_set());
    let x = g.empty_set();
    rec(g, &mut Vec::new(), p, x, &mut out, limit).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_claw_free;

    fn exhaustive(g: &WeightedGraph) -> Weight {
        let n = g.bound();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if g.is_stable(&s) {
                best = best.max(g.weight_of(&s));
            }
        }
        best
    }

    #[test]
    fn brute_matches_exhaustive() {
        for seed in 0..60 {
            let model = Model::ALL[seed as usize % 3];
            let g = gen_instance(model, 12, seed, 20);
            let (w, s) = brute_mwss(&g, &[], &[]).unwrap().unwrap();
            assert!(g.is_stable(&s));
            assert_eq!(w, exhaustive(&g), "seed {seed}");
        }
    }

    #[test]
    fn forcing() {
        // P4 a-b-c-d, weights 5 1 1 5.
        let g = WeightedGraph::from_edges(vec![5, 1, 1, 5], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(brute_mwss(&g, &[], &[]).unwrap().unwrap().0, 10);
        assert_eq!(brute_mwss(&g, &[1], &[]).unwrap().unwrap().0, 6);
        assert_eq!(brute_mwss(&g, &[], &[0]).unwrap().unwrap().0, 6);
        assert!(brute_mwss(&g, &[0, 1], &[]).unwrap().is_none());
    }

    #[test]
    fn matching_small_cases() {
        assert_eq!(brute_matching(&[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap().0, 1);
        assert_eq!(brute_matching(&[(0, 1, 5), (1, 2, 1), (2, 3, 5)]).unwrap().0, 10);
        assert_eq!(brute_matching(&[(0, 1, -3)]).unwrap().0, 0);
    }

    #[test]
    fn generators_are_claw_free_and_deterministic() {
        for model in Model::ALL {
            for seed in 0..20 {
                let g = gen_instance(model, 20, seed, 100);
                assert!(is_claw_free(&g), "{} {seed}", model.name());
                let h = gen_instance(model, 20, seed, 100);
                assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn canonical_examples() {
        // Path a-b-c: {b} has the augmenting path a b c.
        let p3 = WeightedGraph::from_edges(vec![1; 3], &[(0, 1), (1, 2)]);
        assert!(check_canonical(&p3, &[1]).is_err());
        assert!(check_canonical(&p3, &[0, 2]).is_ok());
    }

    #[test]
    fn maximal_cliques_of_wheel() {
        let mut e: Vec<_> = (1..=5).map(|i| (0, i)).collect();
        e.extend((1..=5).map(|i| (i, i % 5 + 1)));
        let w = WeightedGraph::from_edges(vec![1; 6], &e);
        let cl = maximal_cliques(&w, &w.alive_set(), 100).unwrap();
        assert_eq!(cl.len(), 5);
        assert!(cl.iter().all(|c| c.len() == 3 && c[0] == 0));
        assert!(maximal_cliques(&w, &w.alive_set(), 3).is_none());
    }
}

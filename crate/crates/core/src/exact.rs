//! Exact maximum weight stable set on small or well-structured pieces.
//! Used for strips and for components that skip lifting. This is a
//! separate engine from the oracle: it folds simplicial nodes, splits into
//! components and branches on a maximum degree node with a clique-cover
//! bound.

use fixedbitset::FixedBitSet;

use crate::error::Result;
use crate::graph::{alpha_at_most, Weight, WeightedGraph};

struct Local {
    adj: Vec<FixedBitSet>,
    w: Vec<Weight>,
}

impl Local {
    fn new(g: &WeightedGraph, nodes: &[usize]) -> Self {
        let (h, _) = g.induced(nodes);
        let n = nodes.len();
        let adj = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(n);
                for &j in h.neighbors(i) {
                    b.insert(j);
                }
                b
            })
            .collect();
        Local { adj, w: (0..n).map(|i| h.weight(i)).collect() }
    }

    fn degree_in(&self, v: usize, cand: &FixedBitSet) -> usize {
        self.adj[v].intersection(cand).count()
    }

    /// Greedy clique cover bound: each clique costs its heaviest node.
    fn bound(&self, cand: &FixedBitSet) -> Weight {
        let mut order: Vec<usize> = cand.ones().collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.w[v]), v));
        let mut left = cand.clone();
        let mut total = 0;
        for v in order {
            if !left.contains(v) {
                continue;
            }
            total += self.w[v];
            left.set(v, false);
            let mut common = self.adj[v].clone();
            common.intersect_with(&left);
            while let Some(u) = common.minimum() {
                left.set(u, false);
                common.set(u, false);
                common.intersect_with(&self.adj[u]);
            }
        }
        total
    }

    /// Simplicial node at least as heavy as all its neighbors in `cand`.
    fn fold_target(&self, cand: &FixedBitSet) -> Option<usize> {
        'outer: for v in cand.ones() {
            let nb: Vec<usize> = self.adj[v].intersection(cand).collect();
            if nb.iter().any(|&u| self.w[u] > self.w[v]) {
                continue;
            }
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !self.adj[a].contains(b) {
                        continue 'outer;
                    }
                }
            }
            return Some(v);
        }
        None
    }

    fn components(&self, cand: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut left = cand.clone();
        let mut out = Vec::new();
        while let Some(s) = left.minimum() {
            let mut comp = FixedBitSet::with_capacity(cand.len());
            let mut stack = vec![s];
            left.set(s, false);
            comp.insert(s);
            while let Some(v) = stack.pop() {
                let next: Vec<usize> = self.adj[v].intersection(&left).collect();
                for u in next {
                    left.set(u, false);
                    comp.insert(u);
                    stack.push(u);
                }
            }
            out.push(comp);
        }
        out
    }

    fn solve(&self, cand: &FixedBitSet) -> (Weight, Vec<usize>) {
        let mut cand = cand.clone();
        let mut taken = Vec::new();
        let mut base = 0;
        let nonpos: Vec<usize> = cand.ones().filter(|&v| self.w[v] <= 0).collect();
        for v in nonpos {
            cand.set(v, false);
        }
        while let Some(v) = self.fold_target(&cand) {
            taken.push(v);
            base += self.w[v];
            cand.set(v, false);
            cand.difference_with(&self.adj[v]);
        }
        if cand.is_clear() {
            return (base, taken);
        }
        let comps = self.components(&cand);
        if comps.len() > 1 {
            for c in comps {
                let (w, s) = self.solve(&c);
                base += w;
                taken.extend(s);
            }
            return (base, taken);
        }
        let v = cand
            .ones()
            .max_by_key(|&v| (self.degree_in(v, &cand), self.w[v], std::cmp::Reverse(v)))
            .unwrap();
        let mut with = cand.clone();
        with.set(v, false);
        with.difference_with(&self.adj[v]);
        let (mut best, mut set) = self.solve(&with);
        best += self.w[v];
        set.push(v);
        let mut without = cand;
        without.set(v, false);
        if self.bound(&without) > best {
            let (w2, s2) = self.solve(&without);
            if w2 > best {
                best = w2;
                set = s2;
            }
        }
        taken.extend(set);
        (base + best, taken)
    }

    /// All stable sets of size at most three; exact when alpha <= 3.
    fn enumerate3(&self, cand: &FixedBitSet) -> (Weight, Vec<usize>) {
        let vs: Vec<usize> = cand.ones().filter(|&v| self.w[v] > 0).collect();
        let mut best = (0, Vec::new());
        for (i, &a) in vs.iter().enumerate() {
            if self.w[a] > best.0 {
                best = (self.w[a], vec![a]);
            }
            for (j, &b) in vs.iter().enumerate().skip(i + 1) {
                if self.adj[a].contains(b) {
                    continue;
                }
                let wab = self.w[a] + self.w[b];
                if wab > best.0 {
                    best = (wab, vec![a, b]);
                }
                for &c in &vs[j + 1..] {
                    if !self.adj[a].contains(c) && !self.adj[b].contains(c) && wab + self.w[c] > best.0 {
                        best = (wab + self.w[c], vec![a, b, c]);
                    }
                }
            }
        }
        best
    }
}

/// Maximum weight stable set of `g[nodes]` with `forced_in` inside and
/// `forced_out` outside the solution. Returns `None` when `forced_in` is
/// not stable. Indices in the answer are indices of `g`, sorted.
pub fn solve_forced(
    g: &WeightedGraph,
    nodes: &[usize],
    forced_in: &[usize],
    forced_out: &[usize],
) -> Result<Option<(Weight, Vec<usize>)>> {
    if !g.is_stable(forced_in) {
        return Ok(None);
    }
    let mut sorted: Vec<usize> = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let local = Local::new(g, &sorted);
    let pos = |v: usize| sorted.binary_search(&v).ok();
    let mut cand = FixedBitSet::with_capacity(sorted.len());
    cand.insert_range(..);
    let mut base = 0;
    for &v in forced_in {
        let Some(i) = pos(v) else {
            return crate::error::internal("forced node outside the piece");
        };
        base += g.weight(v);
        cand.set(i, false);
        cand.difference_with(&local.adj[i]);
    }
    for &v in forced_out {
        if let Some(i) = pos(v) {
            cand.set(i, false);
        }
    }
    let small = alpha_at_most(g, &cand.ones().map(|i| sorted[i]).collect::<Vec<_>>(), 3);
    let (w, set) = if small && cand.count_ones(..) > 12 { local.enumerate3(&cand) } else { local.solve(&cand) };
    let mut out: Vec<usize> = set.into_iter().map(|i| sorted[i]).chain(forced_in.iter().copied()).collect();
    out.sort_unstable();
    Ok(Some((base + w, out)))
}

pub fn solve(g: &WeightedGraph, nodes: &[usize]) -> (Weight, Vec<usize>) {
    solve_forced(g, nodes, &[], &[]).ok().flatten().expect("unforced solve is always feasible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_mwss, gen_instance, Model};

    #[test]
    fn agrees_with_oracle_on_corpus() {
        for model in Model::ALL {
            for seed in 0..60 {
                let g = gen_instance(model, 16, seed, 30);
                let nodes: Vec<usize> = g.nodes().collect();
                let (w, s) = solve(&g, &nodes);
                assert!(g.is_stable(&s));
                assert_eq!(g.weight_of(&s), w);
                assert_eq!(w, brute_mwss(&g, &[], &[]).unwrap().unwrap().0, "{model:?} {seed}");
            }
        }
    }

    #[test]
    fn forcing() {
        let g = WeightedGraph::from_edges(vec![2, 5, 3], &[(0, 1), (1, 2)]);
        let all = [0, 1, 2];
        assert_eq!(solve_forced(&g, &all, &[], &[0, 2]).unwrap().unwrap().0, 5);
        assert_eq!(solve_forced(&g, &all, &[0], &[2]).unwrap().unwrap().0, 2);
        assert_eq!(solve_forced(&g, &all, &[2], &[0]).unwrap().unwrap().0, 3);
        assert_eq!(solve_forced(&g, &all, &[0, 2], &[]).unwrap().unwrap().0, 5);
        assert!(solve_forced(&g, &all, &[0, 1], &[]).unwrap().is_none());
    }
}

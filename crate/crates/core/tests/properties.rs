use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use mwss_core::clique::{
    cover_and_free, is_normal, is_rigid_edge, is_weakly_normal, is_weakly_normal_nsize, nsize, rigid_partition,
    soft_cliques,
};
use mwss_core::graph::{find_claw, regular_cover, remove_twins};
use mwss_core::lifting::{lift, LiftLedger};
use mwss_core::matching::matching_edges;
use mwss_core::oracle::{brute_matching, brute_mwss, check_canonical, check_liftable, gen_instance, maximal_cliques, Model};
use mwss_core::pipeline::{solve, Options};
use mwss_core::stable::{
    canonicalize, classify, compute_wings, free_components, greedy_maximal_stable_set, s_cover, NodeClass,
};
use mwss_core::{NodeTag, Phase, Weight, WeightedGraph};

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Line), Just(Model::Circular), Just(Model::Mixed)]
}

fn instance(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (model(), 4..=max_n, any::<u64>()).prop_map(|(m, n, seed)| gen_instance(m, n, seed, 100))
}

fn random_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (proptest::collection::vec(1i64..=20, n), proptest::collection::vec(any::<bool>(), pairs)).prop_map(
            move |(w, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                WeightedGraph::from_edges(w, &edges)
            },
        )
    })
}

/// Every subset, no pruning.
fn subset_mwss(g: &WeightedGraph) -> Weight {
    let n = g.bound();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if g.is_stable(&set) {
            best = best.max(g.weight_of(&set));
        }
    }
    best
}

fn has_claw_by_scan(g: &WeightedGraph) -> bool {
    let n = g.bound();
    for c in 0..n {
        let nb = g.neighbors(c);
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                for &d in &nb[j + 1..] {
                    if !g.has_edge(a, b) && !g.has_edge(a, d) && !g.has_edge(b, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn stable_of(g: &WeightedGraph) -> FixedBitSet {
    canonicalize(g, &greedy_maximal_stable_set(g)).unwrap()
}

fn opt(g: &WeightedGraph) -> Weight {
    brute_mwss(g, &[], &[]).unwrap().unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn claw_search_matches_scan(g in random_graph(9)) {
        prop_assert_eq!(find_claw(&g).is_some(), has_claw_by_scan(&g));
    }

    #[test]
    fn two_oracles_agree(g in random_graph(14)) {
        prop_assert_eq!(opt(&g), subset_mwss(&g));
    }

    #[test]
    fn regular_cover_is_two_cliques(g in instance(24)) {
        for v in g.nodes() {
            if let Some((a, b)) = regular_cover(&g, v) {
                prop_assert!(g.is_clique(&a) && g.is_clique(&b));
                let mut u = g.set_of(&a);
                u.union_with(&g.set_of(&b));
                prop_assert!(g.nbits(v).is_subset(&u));
            }
        }
    }

    #[test]
    fn generated_instances_are_claw_free(m in model(), n in 4usize..60, seed in any::<u64>()) {
        let g = gen_instance(m, n, seed, 100);
        prop_assert!(find_claw(&g).is_none());
        if m == Model::Circular {
            prop_assert!(g.nodes().all(|v| regular_cover(&g, v).is_some()));
        }
        let h = gen_instance(m, n, seed, 100);
        prop_assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
        prop_assert!(g.nodes().all(|v| g.weight(v) == h.weight(v)));
    }

    #[test]
    fn twin_removal_preserves_weight(g in random_graph(14)) {
        let (h, ledger) = remove_twins(&g);
        prop_assert_eq!(opt(&g), opt(&h));
        let (h2, _) = remove_twins(&h);
        prop_assert_eq!(h2.node_count(), h.node_count());
        let s = brute_mwss(&h, &[], &[]).unwrap().unwrap().1;
        let tags: Vec<NodeTag> = s.iter().map(|&v| h.tag(v)).collect();
        let back: Vec<usize> = ledger.reinsert(&h, &tags).unwrap().iter().map(|&t| g.index_of(t).unwrap()).collect();
        prop_assert!(g.is_stable(&back));
        prop_assert_eq!(g.weight_of(&back), opt(&g));
    }

    #[test]
    fn canonical_stable_set(g in instance(30)) {
        let (h, _) = remove_twins(&g);
        let s: Vec<usize> = stable_of(&h).ones().collect();
        prop_assert_eq!(check_canonical(&h, &s), Ok(()));
    }

    #[test]
    fn classes_wings_and_cover(g in instance(30)) {
        let (h, _) = remove_twins(&g);
        let s = stable_of(&h);
        let class = classify(&h, &s).unwrap();
        for v in h.nodes() {
            let k = h.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
            let want = if s.contains(v) { 0 } else { k };
            prop_assert!(want <= 2);
            match class[v] {
                NodeClass::Stable => prop_assert!(s.contains(v)),
                NodeClass::Free(_) => prop_assert_eq!(k, 1),
                NodeClass::Bound(..) => prop_assert_eq!(k, 2),
                _ => prop_assert_eq!(k, 0),
            }
        }
        let wings = compute_wings(&h, &class);
        for v in h.nodes() {
            if let NodeClass::Bound(..) = class[v] {
                prop_assert_eq!(wings.bound.values().filter(|w| w.contains(&v)).count(), 1);
            }
        }
        for st in s.ones() {
            let distinct = wings.partners(st).into_iter().filter(|&t| !wings.wing(st, t).is_empty()).count();
            prop_assert_eq!(wings.k(st), distinct);
        }
        let free = free_components(&h, &class);
        for (q, cl) in free.comps.iter().zip(&free.classes) {
            prop_assert!(h.is_clique(q) && h.is_maximal_clique(q));
            prop_assert!(cl.len() >= 2);
        }
        let cover = s_cover(&h, &s);
        for (&st, [a, b]) in &cover.by_stable {
            prop_assert!(a.contains(&st) && b.contains(&st));
            prop_assert!(h.is_maximal_clique(a) && h.is_maximal_clique(b));
            let mut u = h.set_of(a);
            u.union_with(&h.set_of(b));
            prop_assert!(h.closed_bits(st).is_subset(&u));
        }
        let mut count = vec![0; h.bound()];
        for c in cover_and_free(&cover, &free) {
            for v in c.nodes {
                count[v] += 1;
            }
        }
        prop_assert!(count.iter().all(|&c| c <= 4));
    }

    #[test]
    fn several_wings_only_in_wide_free_components(g in instance(40)) {
        let (h, _) = remove_twins(&g);
        let s = stable_of(&h);
        let class = classify(&h, &s).unwrap();
        let wings = compute_wings(&h, &class);
        let free = free_components(&h, &class);
        let pairs: Vec<(usize, usize)> =
            s.ones().flat_map(|a| wings.partners(a).into_iter().filter(move |&b| a < b).map(move |b| (a, b))).collect();
        for u in h.nodes().filter(|&u| !s.contains(u)) {
            let n_wings = pairs.iter().filter(|&&(a, b)| wings.contains(&class, &h, a, b, u)).count();
            let wide = free.comp_of[u].is_some_and(|c| free.classes[c].len() >= 3);
            prop_assert_eq!(n_wings >= 2, wide, "node {}", h.tag(u));
        }
    }

    #[test]
    fn nsize_shortcut_matches_direct(g in instance(30)) {
        let all = g.alive_set();
        for q in maximal_cliques(&g, &all, 2000).unwrap_or_default() {
            for (u, k) in nsize(&g, &q) {
                prop_assert_eq!(k, g.neighbors(u).iter().filter(|v| q.contains(v)).count());
            }
            prop_assert_eq!(is_weakly_normal_nsize(&g, &q), is_weakly_normal(&g, &q));
        }
    }

    #[test]
    fn soft_cliques_match_definition(g in instance(24)) {
        let (h, _) = remove_twins(&g);
        let cliques = maximal_cliques(&h, &h.alive_set(), 5000).unwrap();
        let soft = soft_cliques(&h, &cliques);
        for q in &cliques {
            // components of the rigid edges inside q
            let mut parts: Vec<BTreeSet<usize>> = q.iter().map(|&v| BTreeSet::from([v])).collect();
            for (i, &a) in q.iter().enumerate() {
                for &b in &q[i + 1..] {
                    if is_rigid_edge(&h, a, b) {
                        let ia = parts.iter().position(|p| p.contains(&a)).unwrap();
                        let ib = parts.iter().position(|p| p.contains(&b)).unwrap();
                        if ia != ib {
                            let pb = parts.remove(ib.max(ia));
                            parts[ib.min(ia)].extend(pb);
                        }
                    }
                }
            }
            let found = soft.iter().find(|s| &s.clique == q);
            prop_assert_eq!(found.is_some(), parts.len() > 1);
            prop_assert_eq!(rigid_partition(&h, q).len(), parts.len());
        }
        let s = stable_of(&h);
        let class = classify(&h, &s).unwrap();
        let listed: Vec<Vec<usize>> =
            cover_and_free(&s_cover(&h, &s), &free_components(&h, &class)).into_iter().map(|c| c.nodes).collect();
        for sc in &soft {
            prop_assert!(listed.contains(&sc.clique), "soft clique missing from the cover");
        }
    }

    #[test]
    fn large_cover_cliques_are_normal(g in instance(24)) {
        let (h, _) = remove_twins(&g);
        let s = stable_of(&h);
        for (_, q) in s_cover(&h, &s).cliques() {
            let nq = h.neighborhood(&q);
            if mwss_core::graph::alpha(&h, &nq) >= 3 {
                prop_assert!(is_normal(&h, &q));
            }
        }
    }

    #[test]
    fn lifting_is_sound(g in instance(14), pick in any::<u64>(), split in any::<u64>()) {
        let (h, _) = remove_twins(&g);
        let cliques = maximal_cliques(&h, &h.alive_set(), 5000).unwrap();
        prop_assume!(!cliques.is_empty());
        let q = cliques[(pick % cliques.len() as u64) as usize].clone();
        let k = 1 + (split % q.len().min(3) as u64) as usize;
        let mut parts = vec![Vec::new(); k];
        for (i, &v) in q.iter().enumerate() {
            parts[(i + (split as usize >> 2)) % k].push(v);
        }
        parts.retain(|p| !p.is_empty());
        let mut lifted = h.clone();
        let w_m = h.max_weight() + 1;
        let mut seq = 0;
        let r = lift(&mut lifted, &q, &parts, w_m, Phase::Soft, &mut seq);
        prop_assert_eq!(r.is_ok(), check_liftable(&h, &q, &parts).is_ok());
        if let Ok(l) = r {
            prop_assert!(find_claw(&lifted).is_none());
            prop_assert_eq!(opt(&lifted), opt(&h) + parts.len() as Weight * w_m);
            let ledger = LiftLedger { records: vec![l.record] };
            let s = brute_mwss(&lifted, &[], &[]).unwrap().unwrap().1;
            let tags: Vec<NodeTag> = s.iter().map(|&v| lifted.tag(v)).collect();
            let (back, set) = ledger.unwind(&lifted, &tags).unwrap();
            prop_assert_eq!(back.edge_count(), h.edge_count());
            let idx: Vec<usize> = set.iter().map(|&t| h.index_of(t).unwrap()).collect();
            prop_assert_eq!(h.weight_of(&idx), opt(&h));
        }
    }

    #[test]
    fn soft_lift_keeps_rigid_edges(g in instance(18), pick in any::<u64>()) {
        let (h, _) = remove_twins(&g);
        let cliques = maximal_cliques(&h, &h.alive_set(), 5000).unwrap();
        let soft = soft_cliques(&h, &cliques);
        prop_assume!(!soft.is_empty());
        let sc = &soft[(pick % soft.len() as u64) as usize];
        let mut lifted = h.clone();
        let mut seq = 0;
        lift(&mut lifted, &sc.clique, &sc.parts, h.max_weight() + 1, Phase::Soft, &mut seq).unwrap();
        for (u, v) in lifted.edges() {
            if u < h.bound() && v < h.bound() {
                prop_assert_eq!(is_rigid_edge(&lifted, u, v), is_rigid_edge(&h, u, v));
            }
        }
        let others: BTreeSet<Vec<usize>> =
            soft.iter().filter(|s| s.clique != sc.clique).map(|s| s.clique.clone()).collect();
        let after_cliques = maximal_cliques(&lifted, &lifted.alive_set(), 5000).unwrap();
        // cliques through lifting nodes are new and not compared
        let after: BTreeSet<Vec<usize>> = soft_cliques(&lifted, &after_cliques)
            .into_iter()
            .map(|s| s.clique)
            .filter(|q| q.iter().all(|&v| v < h.bound()))
            .collect();
        prop_assert_eq!(after, others);
    }

    #[test]
    fn matching_matches_brute_force(n in 2usize..8, raw in proptest::collection::vec((0usize..8, 0usize..8, -5i64..20), 0..10)) {
        let mut edges: Vec<(usize, usize, Weight)> = Vec::new();
        for (a, b, w) in raw {
            let (a, b) = (a % n, b % n);
            if a != b && !edges.iter().any(|e| (e.0, e.1) == (a.min(b), a.max(b))) {
                edges.push((a.min(b), a.max(b), w));
            }
        }
        prop_assert_eq!(matching_edges(n, &edges).0, brute_matching(&edges).unwrap().0);
    }

    #[test]
    fn pipeline_matches_oracle(g in instance(22)) {
        let sol = solve(&g, &Options { certify: true }).unwrap();
        prop_assert!(g.is_stable(&sol.set));
        prop_assert_eq!(g.weight_of(&sol.set), sol.weight);
        prop_assert_eq!(sol.weight, opt(&g));
        let again = solve(&g, &Options { certify: false }).unwrap();
        prop_assert_eq!(again.set, sol.set);
    }
}

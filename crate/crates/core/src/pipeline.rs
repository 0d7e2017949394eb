//! From a claw-free graph to a basic graph and back: twins are removed, each
//! component is lifted (soft cliques, quasi-line extraction, free
//! components, the S-lifting loop), composed, and the answer is unwound.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::clique::{
    build_candidates, cover_and_free, is_normal, is_weakly_normal, rigid_partition, soft_cliques, Candidate, Origin,
};
use crate::composition::{compose, CompositionStats, Decomposition};
use crate::error::{certificate, internal, Error, Result};
use crate::exact;
use crate::graph::{
    alpha_at_most, find_claw, find_five_wheel, regular_cover, remove_twins, NodeTag, Phase, Weight, WeightedGraph,
};
use crate::lifting::{extend_stable, lift, liftable_violation, LiftLedger, Lifted};
use crate::oracle::{check_basic, check_canonical, maximal_cliques};
use crate::stable::{
    canonicalize, classify, compute_wings, free_components, greedy_maximal_stable_set, inner, s_cover, NodeClass,
    SCover, Wings,
};

/// Exhaustive certificate checks (maximal clique scans) run only up to
/// this many nodes.
pub const CERTIFY_EXHAUSTIVE_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Run every shadow and structure check; failures become errors.
    pub certify: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub input_nodes: usize,
    pub twin_free_nodes: usize,
    pub components: usize,
    /// Components with stability number at most three, solved directly.
    pub direct_components: usize,
    pub lifts_soft: usize,
    pub lifts_free: usize,
    pub lifts_s: usize,
    pub s_iterations: usize,
    /// (S-loop iterations, component size) per lifted component.
    pub s_loops: Vec<(usize, usize)>,
    pub extracted: usize,
    /// Node count of all final graphs plus directly solved components.
    pub final_nodes: usize,
    pub composition: CompositionStats,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub weight: Weight,
    /// Sorted indices into the input graph.
    pub set: Vec<usize>,
    pub stats: Stats,
    /// Final basic graphs, one per lifted component, for inspection.
    pub basics: Vec<Basic>,
}

#[derive(Clone, Debug)]
pub struct Basic {
    pub graph: WeightedGraph,
    pub matching: Vec<(usize, usize)>,
    pub decomposition: Decomposition,
    pub ledger: LiftLedger,
}

/// Prefixes the stage name to internal and certificate errors.
fn at(stage: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Internal(m) => Error::Internal(format!("[{stage}] {m}")),
        Error::Certificate(m) => Error::Certificate(format!("[{stage}] {m}")),
        Error::NotLiftable(m) => Error::Internal(format!("[{stage}] not liftable: {m}")),
        other => other,
    }
}

/// No maximal clique inside a component of G - M that is not an M-clique
/// is normal. Exhaustive, so only run on small components.
fn check_no_normal(g: &WeightedGraph, m: &[(usize, usize)]) -> Result<()> {
    let mut mate = vec![NONE; g.bound()];
    for &(a, b) in m {
        mate[a] = b;
        mate[b] = a;
    }
    for c in g.components_where(&g.alive_set(), |u, v| mate[u] == v) {
        if c.len() > CERTIFY_EXHAUSTIVE_LIMIT / 4 || (g.is_clique(&c) && c.iter().any(|&v| mate[v] != NONE)) {
            continue;
        }
        let Some(cliques) = maximal_cliques(g, &g.set_of(&c), 10_000) else { continue };
        for q in cliques {
            if g.is_maximal_clique(&q) && is_normal(g, &q) {
                return certificate(format!("normal clique at {} left in a strip", g.tag(q[0])));
            }
        }
    }
    Ok(())
}

/// Maximum weight stable set of a claw-free graph.
pub fn solve(g: &WeightedGraph, opts: &Options) -> Result<Solution> {
    if let Some((c, l)) = find_claw(g) {
        return Err(g.claw_error(c, l));
    }
    g.check_weight_bound()?;
    let mut stats = Stats { input_nodes: g.node_count(), ..Default::default() };
    let (h, twins) = remove_twins(g);
    stats.twin_free_nodes = h.node_count();
    let mut tags = Vec::new();
    let mut basics = Vec::new();
    for comp in h.components() {
        stats.components += 1;
        let (sub, _) = h.induced(&comp);
        let (set, basic) = solve_component(sub, opts, &mut stats)?;
        tags.extend(set);
        basics.extend(basic);
    }
    let full = twins.reinsert(&h, &tags)?;
    let mut set = Vec::with_capacity(full.len());
    for t in full {
        set.push(g.index_of(t).ok_or_else(|| Error::Internal(format!("unknown tag {t}")))?);
    }
    set.sort_unstable();
    if !g.is_stable(&set) {
        return internal("final set is not stable");
    }
    Ok(Solution { weight: g.weight_of(&set), set, stats, basics })
}

fn solve_component(g0: WeightedGraph, opts: &Options, stats: &mut Stats) -> Result<(Vec<NodeTag>, Option<Basic>)> {
    let all: Vec<usize> = g0.nodes().collect();
    let n0 = all.len();
    if alpha_at_most(&g0, &all, 3) {
        stats.direct_components += 1;
        stats.final_nodes += n0;
        let (_, set) = exact::solve(&g0, &all);
        return Ok((set.iter().map(|&v| g0.tag(v)).collect(), None));
    }
    let mut run = Run::new(g0.clone(), opts.certify).map_err(at("canonical"))?;
    run.soft_phase().map_err(at("soft"))?;
    let extraction = run.extract().map_err(at("extract"))?;
    run.free_phase(n0).map_err(at("free"))?;
    let iterations = run.s_phase(n0).map_err(at("s-lift"))?;
    if opts.certify {
        check_no_normal(&run.g, &run.matching()).map_err(at("basic"))?;
    }
    let (merged, m) = run.merge(&extraction);
    if opts.certify {
        if let Err(why) = check_basic(&merged, &m) {
            return certificate(format!("[basic] final graph is not basic: {why}"));
        }
    }
    let comp = compose(&merged, &m, opts.certify).map_err(at("compose"))?;
    let tags: Vec<NodeTag> = comp.set.iter().map(|&v| merged.tag(v)).collect();
    let (back, set) = run.ledger.unwind(&merged, &tags).map_err(at("unwind"))?;
    if back.node_count() != n0 || back.edge_count() != g0.edge_count() {
        return internal("unwinding did not restore the component");
    }
    stats.lifts_soft += run.ledger.count(Phase::Soft);
    stats.lifts_free += run.ledger.count(Phase::Free);
    stats.lifts_s += run.ledger.count(Phase::Stable);
    stats.s_iterations += iterations;
    stats.s_loops.push((iterations, n0));
    stats.extracted += extraction.interiors.len();
    stats.final_nodes += merged.node_count();
    let c = &comp.stats;
    let agg = &mut stats.composition;
    agg.cliques += c.cliques;
    agg.strips += c.strips;
    agg.isolated += c.isolated;
    agg.root_nodes += c.root_nodes;
    agg.root_edges += c.root_edges;
    let basic = Basic { graph: merged, matching: m, decomposition: comp.decomposition, ledger: run.ledger };
    Ok((set, Some(basic)))
}

/// Pieces set aside by the quasi-line extraction.
struct Extraction {
    /// The graph at extraction time, source of the detached edges.
    before: WeightedGraph,
    interiors: Vec<Vec<NodeTag>>,
}

struct Run {
    g: WeightedGraph,
    s: FixedBitSet,
    mate: Vec<usize>,
    ledger: LiftLedger,
    seq: BTreeMap<Phase, u32>,
    /// Matched nodes left behind by extraction; cliques through them stay put.
    frozen: FixedBitSet,
    w_top: Weight,
    certify: bool,
    w5_free: bool,
}

const NONE: usize = usize::MAX;

impl Run {
    fn new(g: WeightedGraph, certify: bool) -> Result<Self> {
        let s = canonicalize(&g, &greedy_maximal_stable_set(&g))?;
        if certify {
            let set: Vec<usize> = s.ones().collect();
            if let Err(why) = check_canonical(&g, &set) {
                return certificate(format!("initial stable set: {why}"));
            }
        }
        let w5_free = certify && find_five_wheel(&g).is_none();
        Ok(Run {
            mate: vec![NONE; g.bound()],
            frozen: g.empty_set(),
            w_top: g.max_weight(),
            s,
            g,
            ledger: LiftLedger::default(),
            seq: BTreeMap::new(),
            certify,
            w5_free,
        })
    }

    fn stable_list(&self) -> Vec<usize> {
        self.s.ones().filter(|&v| self.g.is_alive(v)).collect()
    }

    fn matching(&self) -> Vec<(usize, usize)> {
        (0..self.mate.len()).filter(|&v| self.mate[v] != NONE && v < self.mate[v]).map(|v| (v, self.mate[v])).collect()
    }

    fn in_m(&self, v: usize) -> bool {
        self.mate[v] != NONE
    }

    /// ∅ ≠ δ(q) ⊆ M for a clique `q`.
    fn is_m_clique(&self, q: &[usize]) -> bool {
        let qs = self.g.set_of(q);
        let mut any = false;
        for &x in q {
            for &y in self.g.neighbors(x) {
                if qs.contains(y) {
                    continue;
                }
                if self.mate[x] != y {
                    return false;
                }
                any = true;
            }
        }
        any
    }

    fn apply(&mut self, q: &[usize], parts: &[Vec<usize>], phase: Phase) -> Result<Lifted> {
        self.w_top += 1;
        let seq = self.seq.entry(phase).or_insert(0);
        let lifted = lift(&mut self.g, q, parts, self.w_top, phase, seq)?;
        extend_stable(&mut self.s, parts, &lifted);
        self.mate.resize(self.g.bound(), NONE);
        self.frozen.grow(self.g.bound());
        for (&a, &b) in lifted.q.iter().zip(&lifted.qbar) {
            self.mate[a] = b;
            self.mate[b] = a;
        }
        self.ledger.records.push(lifted.record.clone());
        if self.certify {
            if let Some((c, l)) = find_claw(&self.g) {
                return certificate(format!("lifting created the claw {}", self.g.claw_error(c, l)));
            }
            if let Err(why) = check_canonical(&self.g, &self.stable_list()) {
                return certificate(format!("extended stable set: {why}"));
            }
            if self.w5_free && find_five_wheel(&self.g).is_some() {
                return certificate("lifting created a 5-wheel");
            }
        }
        Ok(lifted)
    }

    fn soft_phase(&mut self) -> Result<()> {
        let class = classify(&self.g, &self.s)?;
        let free = free_components(&self.g, &class);
        let cover = s_cover(&self.g, &self.s);
        let cliques: Vec<Vec<usize>> = cover_and_free(&cover, &free).into_iter().map(|c| c.nodes).collect();
        let soft = soft_cliques(&self.g, &cliques);
        if self.certify {
            for q in &cliques {
                let direct = rigid_partition(&self.g, q);
                let found = soft.iter().find(|sc| &sc.clique == q);
                let agree = match found {
                    Some(sc) => direct.len() > 1 && sc.parts == direct,
                    None => direct.len() == 1,
                };
                if !agree {
                    return certificate("soft clique enumeration disagrees with the rigid partition");
                }
            }
            if self.g.node_count() <= CERTIFY_EXHAUSTIVE_LIMIT {
                let all = maximal_cliques(&self.g, &self.g.alive_set(), 100_000).unwrap_or_default();
                for q in all {
                    if rigid_partition(&self.g, &q).len() > 1 && !cliques.contains(&q) {
                        return certificate("a maximal soft clique is missing from the cover and free components");
                    }
                }
            }
        }
        for sc in &soft {
            self.apply(&sc.clique, &sc.parts, Phase::Soft)?;
        }
        if self.certify {
            self.check_after_soft()?;
        }
        Ok(())
    }

    /// Every maximal clique off the matching is rigid, and matched nodes
    /// touch only their mate and their matched clique.
    fn check_after_soft(&self) -> Result<()> {
        let mut off = self.g.alive_set();
        for v in self.g.nodes() {
            if self.in_m(v) {
                off.set(v, false);
            }
        }
        if off.count_ones(..) <= CERTIFY_EXHAUSTIVE_LIMIT {
            if let Some(all) = maximal_cliques(&self.g, &off, 100_000) {
                for q in all {
                    if rigid_partition(&self.g, &q).len() > 1 {
                        return certificate(format!("soft clique left at {}", self.g.tag(q[0])));
                    }
                }
            }
        }
        let comps = self.components_minus_m();
        for (u, v) in self.g.edges() {
            if !self.in_m(u) || !self.in_m(v) || self.mate[u] == v {
                continue;
            }
            let c = &comps.0[comps.1[u]];
            if !self.g.is_clique(c) || !self.is_m_clique(c) {
                return certificate(format!("matched nodes {} {} adjacent outside a matched clique", self.g.tag(u), self.g.tag(v)));
            }
        }
        Ok(())
    }

    fn components_minus_m(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let parts = self.g.components_where(&self.g.alive_set(), |u, v| self.mate[u] == v);
        let mut of = vec![NONE; self.g.bound()];
        for (i, c) in parts.iter().enumerate() {
            for &v in c {
                of[v] = i;
            }
        }
        (parts, of)
    }

    /// Detaches small-α components of G - M that meet at most two matched
    /// nodes. Their matched nodes stay behind as pendants of their mates.
    fn extract(&mut self) -> Result<Extraction> {
        let before = self.g.clone();
        let (parts, of) = self.components_minus_m();
        let mut interiors = Vec::new();
        for (i, c) in parts.iter().enumerate() {
            let matched: Vec<usize> = c.iter().copied().filter(|&v| self.in_m(v)).collect();
            let interior: Vec<usize> = c.iter().copied().filter(|&v| !self.in_m(v)).collect();
            if interior.is_empty() || matched.len() > 2 {
                continue;
            }
            if !matched.is_empty() && self.g.is_clique(c) {
                continue;
            }
            if matched.iter().any(|&v| of[self.mate[v]] == i) {
                continue;
            }
            if !alpha_at_most(&self.g, &interior, 3) {
                continue;
            }
            interiors.push(interior.iter().map(|&v| self.g.tag(v)).collect());
            for &v in &interior {
                self.g.remove_node(v);
                self.s.set(v, false);
            }
            for &v in &matched {
                self.frozen.insert(v);
            }
        }
        for v in self.g.nodes() {
            if regular_cover(&self.g, v).is_none() {
                return internal(format!("{} is irregular after extraction", self.g.tag(v)));
            }
        }
        if !interiors.is_empty() {
            self.s = canonicalize(&self.g, &self.s)?;
            for (u, v) in self.matching() {
                if self.s.contains(u) == self.s.contains(v) {
                    return internal("matching is not saturated by the stable set after extraction");
                }
            }
            if self.certify {
                if let Err(why) = check_canonical(&self.g, &self.stable_list()) {
                    return certificate(format!("stable set after extraction: {why}"));
                }
            }
        }
        Ok(Extraction { before, interiors })
    }

    fn touches_frozen(&self, q: &[usize]) -> bool {
        q.iter().any(|&v| self.frozen.contains(v))
    }

    fn free_phase(&mut self, n0: usize) -> Result<()> {
        let start = self.g.node_count();
        loop {
            let class = classify(&self.g, &self.s)?;
            let free = free_components(&self.g, &class);
            let mut target = None;
            for (ci, q) in free.comps.iter().enumerate() {
                if self.touches_frozen(q) || self.is_m_clique(q) || !is_weakly_normal(&self.g, q) {
                    continue;
                }
                let parts = owner_parts(q, &free.classes[ci], &class);
                target = Some((q.clone(), parts));
                break;
            }
            let Some((q, parts)) = target else { break };
            self.apply(&q, &parts, Phase::Free)?;
            if self.g.node_count() > start + 2 * n0 + 16 {
                return internal("free component liftings grew the graph past 2|V|");
            }
        }
        if self.certify {
            self.check_free_lifted()?;
        }
        Ok(())
    }

    fn check_free_lifted(&self) -> Result<()> {
        let class = classify(&self.g, &self.s)?;
        let (comps, of) = self.components_minus_m();
        for (u, v) in self.matching() {
            if self.s.contains(u) == self.s.contains(v) {
                return certificate("matching edge not saturated by S");
            }
            if !is_strongly_bisimplicial(&self.g, &[u, v]) {
                return certificate(format!("matching edge {}-{} is not strongly bisimplicial", self.g.tag(u), self.g.tag(v)));
            }
        }
        for v in self.g.nodes() {
            if matches!(class[v], NodeClass::Free(_)) && self.in_m(v) {
                let c = &comps[of[v]];
                if !self.g.is_clique(c) || !self.is_m_clique(c) {
                    return certificate(format!("free matched node {} outside a matched clique", self.g.tag(v)));
                }
            }
        }
        let free = free_components(&self.g, &class);
        for (ci, q) in free.comps.iter().enumerate() {
            if self.touches_frozen(q) {
                continue;
            }
            let parts = owner_parts(q, &free.classes[ci], &class);
            if liftable_violation(&self.g, q, &parts).is_none() && !self.is_m_clique(q) {
                return certificate(format!("liftable free component at {} left unlifted", self.g.tag(q[0])));
            }
        }
        Ok(())
    }

    /// Lifts S-liftable cover cliques until none is left; returns the
    /// number of iterations.
    fn s_phase(&mut self, n0: usize) -> Result<usize> {
        let class = classify(&self.g, &self.s)?;
        let wings = compute_wings(&self.g, &class);
        let free = free_components(&self.g, &class);
        let mut cover = s_cover(&self.g, &self.s);
        let fast = build_candidates(&self.g, &class, &wings, &free, &cover, true);
        if self.certify {
            let direct = build_candidates(&self.g, &class, &wings, &free, &cover, false);
            if fast != direct {
                return certificate("weakly normal candidate screening disagrees with the direct test");
            }
        }
        let mut list: Vec<(usize, Vec<usize>)> = fast
            .into_iter()
            .filter_map(|Candidate { nodes, origin }| match origin {
                Origin::Cover(st) if !self.is_m_clique(&nodes) => Some((st, nodes)),
                _ => None,
            })
            .collect();
        let bound = 4 * n0 + 16;
        let mut iterations = 0;
        loop {
            let class = classify(&self.g, &self.s)?;
            let wings = compute_wings(&self.g, &class);
            let free = free_components(&self.g, &class);
            let mut normal_free = self.g.empty_set();
            for q in &free.comps {
                if is_normal(&self.g, q) {
                    for &v in q {
                        normal_free.insert(v);
                    }
                }
            }
            list.sort_by_key(|(st, q)| (self.g.tag(*st), q.clone()));
            let mut chosen = None;
            for (li, (st, q)) in list.iter().enumerate() {
                if self.touches_frozen(q)
                    || self.is_m_clique(q)
                    || q.iter().any(|&v| normal_free.contains(v))
                    || !self.g.is_maximal_clique(q)
                    || !is_weakly_normal(&self.g, q)
                {
                    continue;
                }
                let sp = s_partition(&self.g, &class, &wings, q, *st)?;
                if !self.s_liftable(&sp) {
                    continue;
                }
                if let Some(why) = liftable_violation(&self.g, q, &sp.parts) {
                    if self.certify {
                        return certificate(format!("S-partition of the clique at {} is not liftable: {why}", self.g.tag(*st)));
                    }
                    continue;
                }
                chosen = Some((li, sp));
                break;
            }
            let Some((li, sp)) = chosen else { break };
            iterations += 1;
            if iterations > bound {
                return internal(format!("S-lifting exceeded {bound} iterations"));
            }
            let (st, q) = list.remove(li);
            let lifted = self.apply(&q, &sp.parts, Phase::Stable)?;
            extend_cover(&mut cover, &q, st, &sp.parts, &lifted);
            list.retain(|(_, c)| *c != q);
            for (i, k) in sp.parts.iter().enumerate() {
                let mut c = k.clone();
                c.push(lifted.q[i]);
                c.sort_unstable();
                if !self.is_m_clique(&c) {
                    let owner = if self.s.contains(lifted.q[i]) { lifted.q[i] } else { st };
                    list.push((owner, c));
                }
            }
            if self.certify {
                self.check_cover(&cover)?;
            }
        }
        Ok(iterations)
    }

    fn s_liftable(&self, sp: &SPartition) -> bool {
        let outside_m = sp.parts.iter().filter(|p| p.iter().any(|&v| !self.in_m(v))).count();
        sp.parts.len() >= 3 || outside_m >= 2
    }

    /// Each cover pair is two maximal cliques covering N[s], and no node
    /// lies in more than four cover or free cliques.
    fn check_cover(&self, cover: &SCover) -> Result<()> {
        for (&st, [a, b]) in &cover.by_stable {
            if !self.g.is_alive(st) || !self.s.contains(st) {
                continue;
            }
            for c in [a, b] {
                if !c.contains(&st) || !self.g.is_clique(c) || !self.g.is_maximal_clique(c) {
                    return certificate(format!("cover clique of {} is not a maximal clique", self.g.tag(st)));
                }
            }
            let mut both = self.g.set_of(a);
            both.union_with(&self.g.set_of(b));
            if !self.g.closed_bits(st).is_subset(&both) {
                return certificate(format!("cover of {} misses part of its neighborhood", self.g.tag(st)));
            }
        }
        let class = classify(&self.g, &self.s)?;
        let free = free_components(&self.g, &class);
        let mut count = vec![0usize; self.g.bound()];
        for c in cover_and_free(cover, &free) {
            for v in c.nodes {
                count[v] += 1;
            }
        }
        if let Some(v) = (0..count.len()).find(|&v| count[v] > 4) {
            return certificate(format!("{} lies in {} cover cliques", self.g.tag(v), count[v]));
        }
        Ok(())
    }

    /// The final graph: the lifted remainder plus the detached interiors
    /// with their original edges, and the matching on it.
    fn merge(&self, ex: &Extraction) -> (WeightedGraph, Vec<(usize, usize)>) {
        let mut g = self.g.clone();
        let mut added = Vec::new();
        for interior in &ex.interiors {
            for &t in interior {
                let v = ex.before.index_of(t).unwrap();
                added.push(v);
                g.add_node(ex.before.weight(v), t);
            }
        }
        for &v in &added {
            let a = g.index_of(ex.before.tag(v)).unwrap();
            for &u in ex.before.neighbors(v) {
                let b = g.index_of(ex.before.tag(u)).expect("detached neighbor survives");
                g.add_edge(a, b);
            }
        }
        let m = self
            .matching()
            .into_iter()
            .map(|(u, v)| (g.index_of(self.g.tag(u)).unwrap(), g.index_of(self.g.tag(v)).unwrap()))
            .collect();
        (g, m)
    }
}

/// A free component split by the stable owner of each node.
fn owner_parts(q: &[usize], owners: &[usize], class: &[NodeClass]) -> Vec<Vec<usize>> {
    owners
        .iter()
        .map(|&a| q.iter().copied().filter(|&v| class[v] == NodeClass::Free(a)).collect())
        .collect()
}

/// N(q) splits into at most two cliques with no edge between them.
pub fn is_strongly_bisimplicial(g: &WeightedGraph, q: &[usize]) -> bool {
    let nq = g.neighborhood(q);
    let within = g.set_of(&nq);
    let parts = g.components_where(&within, |_, _| false);
    parts.len() <= 2 && parts.iter().all(|p| g.is_clique(p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPartition {
    pub parts: Vec<Vec<usize>>,
    pub polar: Option<usize>,
    /// True when some free node of the stable node lies outside the clique.
    pub split_polar: bool,
}

/// The polar node of clique `q` around stable node `st`, if any: the wing
/// W(st, r) must hold all of N(st) \ q and join q to the outside by an edge.
pub fn polar_node(g: &WeightedGraph, class: &[NodeClass], wings: &Wings, q: &[usize], st: usize) -> Result<Option<usize>> {
    let qs = g.set_of(q);
    let outside: Vec<usize> = g.neighbors(st).iter().copied().filter(|&u| !qs.contains(u)).collect();
    if outside.is_empty() {
        return Ok(None);
    }
    let mut found = Vec::new();
    for r in wings.partners(st) {
        if !outside.iter().all(|&u| wings.contains(class, g, st, r, u)) {
            continue;
        }
        let crossing = q
            .iter()
            .any(|&x| x != st && wings.contains(class, g, st, r, x) && outside.iter().any(|&y| g.has_edge(x, y)));
        if crossing {
            found.push(r);
        }
    }
    if found.len() > 1 {
        return internal(format!("two polar wings at {}", g.tag(st)));
    }
    Ok(found.first().copied())
}

/// The S-partition of cover clique `q` of stable node `st`: one part per
/// non-polar wing meeting `q`, and the stable node with its inner free
/// nodes together with the polar wing (split into its free and bound
/// halves when a free node of `st` lies outside `q`).
pub fn s_partition(g: &WeightedGraph, class: &[NodeClass], wings: &Wings, q: &[usize], st: usize) -> Result<SPartition> {
    let polar = polar_node(g, class, wings, q, st)?;
    let qs = g.set_of(q);
    let split_polar = g.neighbors(st).iter().any(|&u| !qs.contains(u) && class[u] == NodeClass::Free(st));
    let inner_set = g.set_of(&inner(g, class, wings, st));
    let mut home = vec![st];
    let mut polar_bound = Vec::new();
    let mut by_wing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &u in q {
        if u == st {
            continue;
        }
        if inner_set.contains(u) {
            home.push(u);
            continue;
        }
        let (t, bound) = match (class[u], wings.rep[u]) {
            (NodeClass::Bound(a, b), _) if a == st || b == st => (if a == st { b } else { a }, true),
            (NodeClass::Free(a), Some((_, b))) if a == st => (b, false),
            _ => return internal(format!("{} in the cover clique of {} has no wing", g.tag(u), g.tag(st))),
        };
        if Some(t) == polar {
            if split_polar && bound {
                polar_bound.push(u);
            } else {
                home.push(u);
            }
        } else {
            by_wing.entry(t).or_default().push(u);
        }
    }
    let mut parts: Vec<Vec<usize>> = by_wing.into_values().collect();
    home.sort_unstable();
    parts.push(home);
    if !polar_bound.is_empty() {
        parts.push(polar_bound);
    }
    Ok(SPartition { parts, polar, split_polar })
}

/// Cover update after lifting cover clique `q` of `st`: `st` keeps its
/// part plus its lifting node, every other lifting node in S gets its part
/// and its lifting edge, and the lifting clique goes to the node of it in S.
fn extend_cover(cover: &mut SCover, q: &[usize], st: usize, parts: &[Vec<usize>], lifted: &Lifted) {
    let h = parts.iter().position(|p| p.contains(&st)).expect("stable node in its partition");
    let with_q = |i: usize| {
        let mut c = parts[i].clone();
        c.push(lifted.q[i]);
        c.sort_unstable();
        c
    };
    let pair = |i: usize| {
        let mut c = vec![lifted.q[i], lifted.qbar[i]];
        c.sort_unstable();
        c
    };
    if let Some(slots) = cover.by_stable.get_mut(&st) {
        for slot in slots.iter_mut() {
            if slot.as_slice() == q {
                *slot = with_q(h);
            }
        }
    }
    for i in 0..parts.len() {
        if i != h {
            cover.by_stable.insert(lifted.q[i], [with_q(i), pair(i)]);
        }
    }
    let mut qbar = lifted.qbar.clone();
    qbar.sort_unstable();
    cover.by_stable.insert(lifted.qbar[h], [qbar, pair(h)]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_mwss, gen_instance, Model};

    fn certify() -> Options {
        Options { certify: true }
    }

    #[test]
    fn small_named_graphs() {
        let c5 = WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(solve(&c5, &certify()).unwrap().weight, 2);
        let net = WeightedGraph::from_edges(vec![1, 1, 1, 5, 5, 5], &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]);
        assert_eq!(solve(&net, &certify()).unwrap().weight, 15);
    }

    #[test]
    fn rejects_claw() {
        let claw = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (0, 2), (0, 3)]);
        assert!(matches!(solve(&claw, &certify()), Err(Error::ClawFound { .. })));
    }

    #[test]
    fn long_path_is_lifted() {
        let n = 12;
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = WeightedGraph::from_edges((1..=n as i64).collect(), &e);
        let sol = solve(&g, &certify()).unwrap();
        assert_eq!(sol.weight, brute_mwss(&g, &[], &[]).unwrap().unwrap().0);
        assert!(sol.stats.lifts_soft > 0);
    }

    #[test]
    fn agrees_with_oracle_on_a_corpus_sample() {
        for model in Model::ALL {
            for seed in 0..25 {
                let g = gen_instance(model, 20, seed, 100);
                let sol = solve(&g, &certify()).unwrap_or_else(|e| panic!("{model:?} seed {seed}: {e}"));
                let want = brute_mwss(&g, &[], &[]).unwrap().unwrap().0;
                assert_eq!(sol.weight, want, "{model:?} seed {seed}");
            }
        }
    }
}

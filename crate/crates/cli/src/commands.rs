use std::fmt::Write as _;
use std::time::Instant;

use mwss_core::composition::Kind;
use mwss_core::oracle::{brute_mwss, gen_instance, Model, ORACLE_NODE_LIMIT};
use mwss_core::pipeline::{solve, Options, Solution};
use mwss_core::{Error, NodeTag, Weight, WeightedGraph};
use thiserror::Error as ThisError;

use crate::format::ParseError;

#[derive(Debug, ThisError)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("not claw-free: center {center}, leaves {} {} {}", leaves[0], leaves[1], leaves[2])]
    Claw { center: usize, leaves: [usize; 3] },
    #[error("{0}")]
    Pipeline(Error),
    #[error("oracle mismatch: solver {solver}, oracle {oracle}")]
    Mismatch { solver: Weight, oracle: Weight },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Parse(_) => 1,
            Failure::Claw { .. } => 2,
            Failure::Pipeline(Error::Invalid(_) | Error::WeightBound { .. } | Error::TooLarge { .. }) => 1,
            Failure::Pipeline(_) | Failure::Mismatch { .. } => 3,
        }
    }
}

/// 1-based id of an input tag.
fn id(g: &WeightedGraph, t: NodeTag) -> usize {
    g.index_of(t).map_or(0, |v| v + 1)
}

fn lift_error(g: &WeightedGraph, e: Error) -> Failure {
    match e {
        Error::ClawFound { center, leaves } => Failure::Claw { center: id(g, center), leaves: leaves.map(|t| id(g, t)) },
        other => Failure::Pipeline(other),
    }
}

pub struct SolveReport {
    pub solution: Solution,
    /// Oracle weight, when certify mode ran it.
    pub oracle: Option<Weight>,
}

impl SolveReport {
    pub fn render(&self, ledger: bool) -> String {
        let s = &self.solution;
        let st = &s.stats;
        let mut out = String::new();
        writeln!(out, "weight {}", s.weight).unwrap();
        let ids: Vec<String> = s.set.iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "set {}", ids.join(" ")).unwrap();
        writeln!(out, "components {} direct {} extracted {}", st.components, st.direct_components, st.extracted).unwrap();
        writeln!(out, "lifts soft {} free {} s {} s_iterations {}", st.lifts_soft, st.lifts_free, st.lifts_s, st.s_iterations)
            .unwrap();
        let c = &st.composition;
        writeln!(out, "pieces cliques {} strips {} isolated {}", c.cliques, c.strips, c.isolated).unwrap();
        writeln!(
            out,
            "nodes input {} twin_free {} final {} growth {:.3}",
            st.input_nodes,
            st.twin_free_nodes,
            st.final_nodes,
            growth(st.final_nodes, st.input_nodes)
        )
        .unwrap();
        if let Some(w) = self.oracle {
            if w == s.weight {
                writeln!(out, "oracle: match").unwrap();
            } else {
                writeln!(out, "oracle: mismatch {w}").unwrap();
            }
        }
        if ledger {
            for (i, b) in s.basics.iter().enumerate() {
                writeln!(out, "ledger component {i}").unwrap();
                out += &b.ledger.dump();
            }
        }
        out
    }
}

pub fn growth(final_nodes: usize, input: usize) -> f64 {
    final_nodes as f64 / input.max(1) as f64
}

/// Solves `g`; in certify mode every shadow check runs and, within oracle
/// reach, the weight is compared with brute force.
pub fn cmd_solve(g: &WeightedGraph, certify: bool) -> Result<SolveReport, Failure> {
    let solution = solve(g, &Options { certify }).map_err(|e| lift_error(g, e))?;
    let mut oracle = None;
    if certify && g.node_count() <= ORACLE_NODE_LIMIT {
        let w = brute_mwss(g, &[], &[]).map_err(Failure::Pipeline)?.map(|(w, _)| w).unwrap_or(0);
        if w != solution.weight {
            return Err(Failure::Mismatch { solver: solution.weight, oracle: w });
        }
        oracle = Some(w);
    }
    Ok(SolveReport { solution, oracle })
}

pub fn parse_model(s: &str) -> Result<Model, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("unknown model {s:?} (line, circular, mixed)")))
}

pub fn cmd_gen(model: Model, n: usize, seed: u64, w_max: Weight) -> String {
    let g = gen_instance(model, n, seed, w_max);
    format!("c {} n={} seed={}\n{}", model.name(), n, seed, crate::format::render(&g))
}

pub fn cmd_oracle(g: &WeightedGraph) -> Result<Weight, Failure> {
    Ok(brute_mwss(g, &[], &[]).map_err(Failure::Pipeline)?.map(|(w, _)| w).unwrap_or(0))
}

/// Components of G - M of every final graph. As DOT: one cluster per
/// component (box for matched cliques, ellipse for strips), matching edges
/// bold.
pub fn cmd_decompose(g: &WeightedGraph, dot: bool) -> Result<String, Failure> {
    let sol = solve(g, &Options { certify: false }).map_err(|e| lift_error(g, e))?;
    let mut out = String::new();
    if dot {
        out += "graph basic {\n";
    }
    for (bi, b) in sol.basics.iter().enumerate() {
        let h = &b.graph;
        for (ci, c) in b.decomposition.comps.iter().enumerate() {
            let kind = match c.kind {
                Kind::Clique => "clique",
                Kind::Strip => "strip",
                Kind::Isolated => "isolated",
            };
            let names: Vec<String> = c.nodes.iter().map(|&v| h.tag(v).to_string()).collect();
            if dot {
                writeln!(out, "  subgraph cluster_{bi}_{ci} {{\n    label=\"{kind}\";").unwrap();
                let shape = if c.kind == Kind::Clique { "box" } else { "ellipse" };
                for n in &names {
                    writeln!(out, "    \"{bi}:{n}\" [label=\"{n}\", shape={shape}];").unwrap();
                }
                out += "  }\n";
            } else {
                writeln!(out, "{bi} {kind} {}", names.join(" ")).unwrap();
            }
        }
        if dot {
            for (u, v) in h.edges() {
                let bold = if b.matching.contains(&(u.min(v), u.max(v))) || b.matching.contains(&(u.max(v), u.min(v))) {
                    " [style=bold]"
                } else {
                    ""
                };
                writeln!(out, "  \"{bi}:{}\" -- \"{bi}:{}\"{bold};", h.tag(u), h.tag(v)).unwrap();
            }
        }
    }
    if dot {
        out += "}\n";
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
    pub ms: f64,
    pub node_growth: f64,
    pub lifts: [usize; 3],
}

pub const BENCH_HEADER: &str = "model,n,seed,ms,node_growth,phase_lifts_soft,phase_lifts_free,phase_lifts_s";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.3},{:.3},{},{},{}",
            self.model.name(),
            self.n,
            self.seed,
            self.ms,
            self.node_growth,
            self.lifts[0],
            self.lifts[1],
            self.lifts[2]
        )
    }
}

pub fn cmd_bench(sizes: &[usize], model: Model, seed: u64, certify: bool) -> Result<Vec<BenchRow>, Failure> {
    let mut rows = Vec::new();
    for &n in sizes {
        let g = gen_instance(model, n, seed, 100);
        let t = Instant::now();
        let sol = solve(&g, &Options { certify }).map_err(|e| lift_error(&g, e))?;
        let ms = t.elapsed().as_secs_f64() * 1e3;
        let st = &sol.stats;
        rows.push(BenchRow {
            model,
            n,
            seed,
            ms,
            node_growth: growth(st.final_nodes, st.input_nodes),
            lifts: [st.lifts_soft, st.lifts_free, st.lifts_s],
        });
    }
    Ok(rows)
}

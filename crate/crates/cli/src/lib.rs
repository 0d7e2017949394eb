//! Command-line plumbing for the solver: instance files, reports, DOT and
//! CSV output.
//!
//! `mwss solve --ledger` appends the lifting ledger of every lifted
//! component:
//!
//! ```text
//! ledger component <i>
//! lift <k> <phase> w=<lifting weight>
//!   clique <tags>
//!   part <tags>           one line per part, in lifting order
//!   q <tags>              q[i] is attached to part i
//!   qbar <tags>           the new clique, qbar[i] matched to q[i]
//!   removed <a>-<b> ...   edges of the clique cut by the lifting
//! ```
//!
//! Tags are input indices (0-based) or `soft<n>`, `free<n>`, `slift<n>`
//! for nodes created by each phase.

pub mod commands;
pub mod format;

pub use commands::{cmd_bench, cmd_decompose, cmd_gen, cmd_oracle, cmd_solve, Failure, SolveReport, BENCH_HEADER};
pub use format::{parse, render, ParseError};

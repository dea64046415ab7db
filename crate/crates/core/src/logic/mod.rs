//! First-order logic over finite structures: formulas, parsing, evaluation,
//! rank-`d` types, the addition theorem over free amalgams, and
//! relativization.

mod addition;
mod eval;
mod formula;
mod parser;
mod relativize;
mod types;

pub use addition::{addition_check, amalgam_type_table, sides_over, TypeTable};
pub use eval::{evaluate, evaluate_naive, holds_sentence, Assignment, Evaluator};
pub use formula::Formula;
pub use parser::{parse, parse_graph_formula, parse_lines};
pub use relativize::relativize;
pub use types::{equiv_d, rank_type, RankType, MAX_TYPE_DEPTH, MAX_TYPE_SIZE};

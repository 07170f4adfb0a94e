//! Hierarchy scoring: token serialization, Levenshtein distance, optimal
//! block matching and precision/recall/F1.

mod assign;
mod distance;
mod matching;
pub mod metrics;
mod report;
pub mod tokens;

pub use assign::min_cost_assignment;
pub use distance::edit_distance;
pub use matching::{match_blocks, optimal_matches, BlockMatch, MatchReport};
pub use metrics::{f1_score, metrics, Metrics};
pub use report::{evaluate_gui, EvalReport, ScoreRow, AGGREGATE_STEM};
pub use tokens::{block_sequences, serialize, Token, TokenSeq};

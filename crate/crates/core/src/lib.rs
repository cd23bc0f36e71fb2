//! Exact-arithmetic engine for Parikh-matrix combinatorics: matrices and
//! their monoid, M-equivalence class enumeration by pruned backtracking,
//! projection-based distinguishability verdicts, minimal Hamming distances
//! of classes, and exhaustive scan drivers with deterministic reports.
//!
//! Everything is integer-exact; overflow is an error, never a wrap. All core
//! types are immutable values and all operations are pure, so concurrent
//! read-sharing needs no coordination. With the default `parallel` feature
//! the scans and class enumerations shard across a rayon pool; without it
//! the same entry points run single-threaded and produce identical output.

pub mod budget;
pub mod distinguish;
pub mod error;
pub mod hamming;
pub mod mclass;
pub mod oracle;
pub mod parikh;
pub mod report;
pub mod scan;
pub mod verify;
pub mod wordcore;

pub use budget::Budget;
pub use error::{Error, Result};
pub use mclass::MClass;
pub use parikh::ParikhMatrix;
pub use wordcore::{LetterSet, OrderedAlphabet, Word};

//! Exact simulation of quantum algorithms that read a whole database with a
//! single query, next to their classical counterparts.
//!
//! The database answers `a(x, y)` for a query string `x` against its
//! contents `y`. Quantum runs present a superposition of queries and read
//! the answers back out of the phases of the query register:
//!
//! - coin weighing with a spring scale recovers any `y ∈ {0,1}^n`,
//! - Walsh search finds the one marked item of `n = 2^p`,
//! - Huffman search does the same for a skewed source with fewer queries
//!   and a known chance of error,
//! - random coding identifies one of `k` candidate strings over Z_A.
//!
//! ```
//! use sqdb_core::{algorithms::run_bv_coin_weighing, DigitString, OracleSpec};
//!
//! let y: DigitString = "101101".parse().unwrap();
//! let run = run_bv_coin_weighing(&OracleSpec::spring_scale(y).unwrap()).unwrap();
//! assert!(run.success);
//! assert_eq!(run.oracle_calls, 1);
//! ```

pub mod algebra;
pub mod algorithms;
pub mod baselines;
pub mod codes;
pub mod costmodel;
pub mod error;
pub mod oracle;
pub mod quantum;

pub use algebra::{DigitString, GeneratorSet};
pub use algorithms::{Recovered, Transcript};
pub use codes::{HuffmanCode, SourceDistribution};
pub use costmodel::{Algorithm, CostMode, CostReport, TimePreset};
pub use error::{Error, Result};
pub use oracle::{AnswerKind, OracleSpec, QueryCounter};
pub use quantum::{QuantumState, RegisterLayout};

//! Exact computations with formal potentials: truncated power series over ℚ,
//! Milnor and Tjurina numbers with determinacy certificates, the splitting
//! lemma with verified coordinate changes, quadratic-form bookkeeping, and
//! checks of explicit one-parameter families of automorphisms.

pub mod error;
pub mod expr;
pub mod isotopy;
pub mod linalg;
pub mod milnor;
pub mod morse;
pub mod presets;
pub mod quad;
pub mod rational;
pub mod series;
pub mod stability;

pub use error::{Error, Result};
pub use expr::{parse_expr, parse_series, Expr, ParseError};
pub use linalg::RatMatrix;
pub use isotopy::{verify_isotopy, FamilyCoordChange, FamilySeries, IsotopyReport, MatrixFamily, TPoly};
pub use milnor::{milnor_number, LgPair, MilnorReport};
pub use morse::{split, SplitResult};
pub use quad::{GwClass, Mode, QuadForm};
pub use rational::Rational;
pub use series::{compose, substitute, CoordChange, Monomial, Series};
pub use stability::{stabilize, stable_compare, stable_invariants, ts_sum, StableInvariants, Verdict};

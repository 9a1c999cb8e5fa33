//! Analytic tableau proof search, countermodel extraction and cut
//! elimination for justification logics over finite constant
//! specifications.

pub mod engine;
pub mod export;
pub mod logic;
pub mod oracle;
pub mod semantics;
pub mod syntax;

pub mod cutelim;

pub use logic::{ConstantSpecification, LogicSpec};
pub use syntax::{Formula, SignedFormula, Term};

//! Certified knowledge compilation: CPOG proof checking, proof generation from
//! decision-DNNF graphs, and exact model counting over verified POGs.

pub mod checker;
pub mod cnf;
pub mod compiler;
pub mod cpog;
pub mod evaluator;
pub mod generator;
pub mod instances;
pub mod oracle;
pub mod pog;
pub mod satproof;

pub use checker::{check_proof, CheckOptions, Checker, Verdict};
pub use cnf::{format_dimacs, parse_dimacs, Clause, CnfError, CnfFormula, Lit, Var};
pub use cpog::{parse_cpog, serialize_cpog, CpogStep};
pub use evaluator::{PrimeField, Q25};
pub use generator::{generate, GenMode, GenOptions, GenOutput};
pub use pog::{Pog, PogNode};

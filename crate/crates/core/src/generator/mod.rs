//! CPOG proof generation from a CNF formula and a decision-DNNF compilation of it.

mod ddnnf;
mod forward;
mod reverse;
mod translate;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

pub use ddnnf::{parse_d4, DArc, DKind, DNode, DdnnfError, DdnnfGraph};

use crate::cnf::{CnfFormula, Lit};
use crate::cpog::CpogStep;
use crate::pog::{Pog, PogNode};
use crate::satproof::{Oracle, SatError};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum GenMode {
    #[default]
    Hybrid,
    Structural,
    Monolithic,
    OneSided,
}

/// How lemma hypotheses are formed from the simplified clauses at a shared node.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum LemmaPolicy {
    /// Input clauses untouched by the context are cited directly; only the rest get guards.
    #[default]
    ReuseInput,
    /// Every hypothesis clause gets a guard product.
    SynthesizeAll,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    Monolithic,
    Structural,
    StructuralSwitching,
    OneSided,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Monolithic => "monolithic",
            Strategy::Structural => "structural",
            Strategy::StructuralSwitching => "structural-switching",
            Strategy::OneSided => "one-sided",
        })
    }
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub mode: GenMode,
    pub lemmas: bool,
    pub lemma_policy: LemmaPolicy,
    pub grouping: bool,
    /// Tree size below which the hybrid strategies use a single SAT call.
    pub threshold: u64,
    /// Largest clause count the hybrid strategy will hand to one monolithic call.
    pub clause_limit: u64,
    pub oracle: Oracle,
}

impl Default for GenOptions {
    fn default() -> GenOptions {
        GenOptions {
            mode: GenMode::Hybrid,
            lemmas: true,
            lemma_policy: LemmaPolicy::ReuseInput,
            grouping: true,
            threshold: 1_000_000,
            clause_limit: 10_000_000,
            oracle: Oracle::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenStats {
    pub strategy: Strategy,
    pub pog_nodes: usize,
    pub tree_size: BigUint,
    pub tree_ratio: f64,
    pub declarations: usize,
    pub forward_steps: usize,
    pub deletions: usize,
    pub lemmas: usize,
    pub lemma_applications: usize,
    pub lemma_fallbacks: usize,
    pub sat_calls: usize,
    pub groups: usize,
    /// Largest number of times any single node was expanded during the forward proof.
    pub max_expansions: u32,
}

impl GenStats {
    pub fn total_steps(&self) -> usize {
        self.declarations + 1 + self.forward_steps + self.deletions
    }
}

#[derive(Clone, Debug)]
pub struct GenOutput {
    pub steps: Vec<CpogStep>,
    pub pog: Pog,
    pub stats: GenStats,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Ddnnf(#[from] DdnnfError),
    #[error("d-DNNF mentions variable {0} beyond the CNF header")]
    ForeignVariable(u64),
    #[error("no decision literal separates sum children {left} and {right}")]
    NoDecision { left: Lit, right: Lit },
    #[error("literal {0} is not implied in its context")]
    NotImplied(Lit),
    #[error("clauses do not match the product structure at {0}")]
    Mismatch(Lit),
    #[error("SAT oracle failed: {0}")]
    Solver(#[from] SatError),
    #[error("SAT oracle exhausted its budget")]
    SolverBudget,
    #[error("input clause {0} is not implied by the POG")]
    ReverseFails(u64),
}

fn defining_clause_count(pog: &Pog) -> u64 {
    pog.nodes()
        .iter()
        .map(|n| match n {
            PogNode::Product { args, .. } => args.len() as u64 + 1,
            PogNode::Sum { .. } => 3,
        })
        .sum()
}

/// Chooses between a single SAT call, structural recursion with small-subgraph
/// switching, and pure structural recursion.
pub fn select_strategy(pog: &Pog, clause_count: u64, opts: &GenOptions) -> Strategy {
    let ratio = pog.tree_ratio().unwrap_or_else(|_| BigRational::from_integer(1.into()));
    if ratio > BigRational::from_integer(5.into()) {
        return Strategy::Structural;
    }
    let root = pog.root().expect("root");
    let tree = pog.tree_size(root).unwrap_or_default();
    if tree < BigUint::from(opts.threshold)
        && clause_count + defining_clause_count(pog) <= opts.clause_limit
    {
        Strategy::Monolithic
    } else {
        Strategy::StructuralSwitching
    }
}

pub fn generate(
    cnf: &CnfFormula,
    graph: &DdnnfGraph,
    opts: &GenOptions,
) -> Result<GenOutput, GenError> {
    let m = cnf.clause_count() as u64;
    let tr = translate::ddnnf_to_pog(graph, cnf.var_count(), m)?;
    let root = tr.pog.root().expect("root");
    let strategy = match opts.mode {
        GenMode::Hybrid => select_strategy(&tr.pog, m, opts),
        GenMode::Structural => Strategy::Structural,
        GenMode::Monolithic => Strategy::Monolithic,
        GenMode::OneSided => Strategy::OneSided,
    };
    let tree_size = tr.pog.tree_size(root).unwrap_or_default();
    let tree_ratio = tr
        .pog
        .tree_ratio()
        .ok()
        .and_then(|r| r.to_f64())
        .unwrap_or(0.0);
    let mut stats = GenStats {
        strategy,
        pog_nodes: tr.pog.nodes().len(),
        tree_size,
        tree_ratio,
        declarations: tr.declarations.len(),
        forward_steps: 0,
        deletions: 0,
        lemmas: 0,
        lemma_applications: 0,
        lemma_fallbacks: 0,
        sat_calls: 0,
        groups: 0,
        max_expansions: 0,
    };
    let mut steps = tr.declarations.clone();
    steps.push(CpogStep::DeclareRoot { lit: root });
    let (unit_id, asserted) = if strategy == Strategy::OneSided {
        let id = tr.next_id;
        steps.push(CpogStep::add(id, vec![root], Vec::new()));
        stats.forward_steps = 1;
        (id, Vec::new())
    } else {
        let mut fw = forward::Forward::new(cnf, &tr, opts, strategy);
        let unit = fw.run()?;
        fw.fill_stats(&mut stats);
        let (forward_steps, asserted) = fw.into_steps();
        steps.extend(forward_steps);
        (unit, asserted)
    };
    let before = steps.len();
    reverse::emit_deletions(cnf, &tr.pog, &tr.info, unit_id, &asserted, &mut steps)?;
    stats.deletions = steps.len() - before;
    Ok(GenOutput {
        steps,
        pog: tr.pog,
        stats,
    })
}

/// Parses a d4-style graph and generates a proof.
pub fn generate_from_d4(
    cnf: &CnfFormula,
    d4_text: &str,
    opts: &GenOptions,
) -> Result<GenOutput, GenError> {
    generate(cnf, &parse_d4(d4_text)?, opts)
}

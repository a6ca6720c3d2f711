//! Shared fixtures for the pipeline benchmarks.

use cpog_core::generator::{generate_from_d4, GenOptions, GenOutput};
use cpog_core::instances;
use cpog_core::CnfFormula;

/// A formula with its compiled graph in d4 text.
pub struct Fixture {
    pub name: String,
    pub cnf: CnfFormula,
    pub d4: String,
}

impl Fixture {
    pub fn proof(&self, opts: &GenOptions) -> GenOutput {
        generate_from_d4(&self.cnf, &self.d4, opts).expect("fixture proof")
    }
}

pub fn fixtures() -> Vec<Fixture> {
    let chain = instances::chain_cnf(12);
    let chain_d4 = cpog_core::compiler::compile_to_d4(&chain);
    let (copies, copies_d4) = instances::worked_copies(200);
    vec![
        Fixture {
            name: "worked".into(),
            cnf: instances::worked_cnf(),
            d4: instances::WORKED_D4.into(),
        },
        Fixture {
            name: "chain-12".into(),
            cnf: chain,
            d4: chain_d4,
        },
        Fixture {
            name: "copies-200".into(),
            cnf: copies,
            d4: copies_d4,
        },
    ]
}

//! Reverse implication: deletion of asserted clauses, then of every input clause.

use std::collections::HashMap;

use super::translate::NodeInfo;
use super::GenError;
use crate::cnf::{CnfFormula, Lit};
use crate::cpog::CpogStep;
use crate::pog::{Pog, PogNode};

pub(crate) fn emit_deletions(
    cnf: &CnfFormula,
    pog: &Pog,
    info: &[NodeInfo],
    unit: u64,
    asserted: &[(u64, Vec<u64>)],
    steps: &mut Vec<CpogStep>,
) -> Result<(), GenError> {
    for (id, hint) in asserted.iter().rev() {
        if *id != unit {
            steps.push(CpogStep::DeleteRup {
                id: *id,
                hint: hint.clone(),
            });
        }
    }
    let root = pog.root().expect("root");
    let mut reach = vec![false; pog.nodes().len()];
    if let Some(k) = pog.node_index(root.var()) {
        reach[k] = true;
    }
    // Argument occurrences among root-reachable nodes: literal -> (node, position).
    let mut occurs: HashMap<Lit, Vec<(usize, usize)>> = HashMap::new();
    for k in (0..pog.nodes().len()).rev() {
        if !reach[k] {
            continue;
        }
        for (j, a) in pog.nodes()[k].args().into_iter().enumerate() {
            occurs.entry(a).or_default().push((k, j));
            if let Some(c) = pog.node_index(a.var()) {
                reach[c] = true;
            }
        }
    }
    let root_node = pog.node_index(root.var());
    for (i, clause) in cnf.clauses().iter().enumerate() {
        let cid = i as u64 + 1;
        let mut hint = vec![unit];
        if clause.is_tautology() {
        } else if pog.is_input(root.var()) {
            if !clause.lits().contains(&root) {
                return Err(GenError::ReverseFails(cid));
            }
        } else if !root.is_positive() {
            let k = root_node.expect("node");
            hint.push(info[k].first_id);
        } else {
            hint.extend(marking(pog, info, &occurs, clause.lits(), root_node.expect("node"))
                .ok_or(GenError::ReverseFails(cid))?);
        }
        steps.push(CpogStep::DeleteRup { id: cid, hint });
    }
    Ok(())
}

/// Defining clauses, in declaration order, that force nodes false once every literal
/// of `clause` is false; the last one falsifies the root.
fn marking(
    pog: &Pog,
    info: &[NodeInfo],
    occurs: &HashMap<Lit, Vec<(usize, usize)>>,
    clause: &[Lit],
    root: usize,
) -> Option<Vec<u64>> {
    // A product cites its lowest-position false argument.
    let mut marked: HashMap<usize, u64> = HashMap::new();
    let mut halves: HashMap<usize, u8> = HashMap::new();
    let mut work: Vec<Lit> = clause.to_vec();
    work.sort_unstable();
    work.dedup();
    while let Some(x) = work.pop() {
        for &(k, j) in occurs.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            let first = info[k].first_id;
            let hit = match pog.nodes()[k] {
                PogNode::Product { .. } => {
                    let c = first + 1 + j as u64;
                    if let Some(prev) = marked.get_mut(&k) {
                        *prev = (*prev).min(c);
                        continue;
                    }
                    Some(c)
                }
                PogNode::Sum { .. } if marked.contains_key(&k) => continue,
                PogNode::Sum { .. } => {
                    let h = halves.entry(k).or_insert(0);
                    *h += 1;
                    (*h == 2).then_some(first)
                }
            };
            if let Some(c) = hit {
                marked.insert(k, c);
                work.push(pog.nodes()[k].var().positive());
            }
        }
    }
    marked.get(&root)?;
    let mut order: Vec<(usize, u64)> = marked.into_iter().collect();
    order.sort_unstable();
    Some(order.into_iter().map(|(_, c)| c).collect())
}

//! Partitioned-operation graphs: storage, structural metrics, and evaluation.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::cnf::{Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PogNode {
    Product { var: Var, args: Vec<Lit> },
    Sum { var: Var, left: Lit, right: Lit },
}

impl PogNode {
    pub fn var(&self) -> Var {
        match self {
            PogNode::Product { var, .. } | PogNode::Sum { var, .. } => *var,
        }
    }

    pub fn args(&self) -> Vec<Lit> {
        match self {
            PogNode::Product { args, .. } => args.clone(),
            PogNode::Sum { left, right, .. } => vec![*left, *right],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            PogNode::Product { args, .. } => args.len(),
            PogNode::Sum { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PogError {
    #[error("variable {0} is already defined")]
    VarReuse(u64),
    #[error("variable {0} is not declared")]
    Undeclared(u64),
    #[error("root is not declared")]
    NoRoot,
    #[error("empty POG")]
    Empty,
    #[error("too many input variables for exhaustive check ({0})")]
    TooLarge(u64),
}

/// Nodes are stored in declaration order; children always precede parents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pog {
    input_var_count: u64,
    nodes: Vec<PogNode>,
    index: HashMap<u64, usize>,
    root: Option<Lit>,
}

/// A structural or semantic partitioning violation at the given node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionViolation {
    #[error("product {0} has children with overlapping dependency sets")]
    ProductOverlap(Var),
    #[error("sum {0} has children with a common model")]
    SumOverlap(Var),
    #[error(transparent)]
    Pog(#[from] PogError),
}

impl Pog {
    pub fn new(input_var_count: u64) -> Pog {
        Pog {
            input_var_count,
            ..Pog::default()
        }
    }

    pub fn input_var_count(&self) -> u64 {
        self.input_var_count
    }

    pub fn nodes(&self) -> &[PogNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<Lit> {
        self.root
    }

    pub fn set_root(&mut self, root: Lit) -> Result<(), PogError> {
        self.check_known(root)?;
        self.root = Some(root);
        Ok(())
    }

    pub fn is_input(&self, var: Var) -> bool {
        var.index() <= self.input_var_count
    }

    /// Position of the node defining `var`, if it is an extension variable.
    pub fn node_index(&self, var: Var) -> Option<usize> {
        self.index.get(&var.index()).copied()
    }

    pub fn node(&self, var: Var) -> Option<&PogNode> {
        self.node_index(var).map(|i| &self.nodes[i])
    }

    fn check_known(&self, lit: Lit) -> Result<(), PogError> {
        let v = lit.var();
        if self.is_input(v) || self.index.contains_key(&v.index()) {
            Ok(())
        } else {
            Err(PogError::Undeclared(v.index()))
        }
    }

    fn check_fresh(&self, var: Var) -> Result<(), PogError> {
        if self.is_input(var) || self.index.contains_key(&var.index()) {
            Err(PogError::VarReuse(var.index()))
        } else {
            Ok(())
        }
    }

    /// Appends a product node. Does not check partitioning.
    pub fn add_product(&mut self, var: Var, args: Vec<Lit>) -> Result<(), PogError> {
        self.check_fresh(var)?;
        for &a in &args {
            self.check_known(a)?;
        }
        self.push(PogNode::Product { var, args });
        Ok(())
    }

    /// Appends a sum node. Does not check partitioning.
    pub fn add_sum(&mut self, var: Var, left: Lit, right: Lit) -> Result<(), PogError> {
        self.check_fresh(var)?;
        self.check_known(left)?;
        self.check_known(right)?;
        self.push(PogNode::Sum { var, left, right });
        Ok(())
    }

    fn push(&mut self, node: PogNode) {
        self.index.insert(node.var().index(), self.nodes.len());
        self.nodes.push(node);
    }

    pub fn max_var(&self) -> u64 {
        self.nodes
            .iter()
            .map(|n| n.var().index())
            .max()
            .unwrap_or(0)
            .max(self.input_var_count)
    }

    /// Input variables the literal depends on, sorted.
    pub fn dependency_set(&self, lit: Lit) -> Result<Vec<Var>, PogError> {
        self.check_known(lit)?;
        let deps = self.all_dependency_sets();
        Ok(self.deps_of(lit, &deps))
    }

    fn deps_of(&self, lit: Lit, deps: &[Vec<Var>]) -> Vec<Var> {
        match self.node_index(lit.var()) {
            Some(i) => deps[i].clone(),
            None => vec![lit.var()],
        }
    }

    /// Dependency set of every node, indexed by node position.
    pub fn all_dependency_sets(&self) -> Vec<Vec<Var>> {
        let mut deps: Vec<Vec<Var>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut d: Vec<Var> = Vec::new();
            for a in node.args() {
                d.extend(self.deps_of(a, &deps));
            }
            d.sort_unstable();
            d.dedup();
            deps.push(d);
        }
        deps
    }

    /// Number of nonterminal nodes plus number of edges.
    pub fn pog_size(&self) -> u64 {
        self.nodes.iter().map(|n| 1 + n.arity() as u64).sum()
    }

    /// Tree size of every node, indexed by node position.
    pub fn tree_sizes(&self) -> Vec<BigUint> {
        let mut sizes: Vec<BigUint> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut t = BigUint::from(node.arity() as u64 + 1);
            for a in node.args() {
                if let Some(i) = self.node_index(a.var()) {
                    t += &sizes[i];
                }
            }
            sizes.push(t);
        }
        sizes
    }

    pub fn tree_size(&self, lit: Lit) -> Result<BigUint, PogError> {
        self.check_known(lit)?;
        Ok(match self.node_index(lit.var()) {
            Some(i) => self.tree_sizes().swap_remove(i),
            None => BigUint::zero(),
        })
    }

    /// Tree size of the root divided by the POG size.
    pub fn tree_ratio(&self) -> Result<BigRational, PogError> {
        let root = self.root.ok_or(PogError::NoRoot)?;
        let size = self.pog_size();
        if size == 0 {
            return Err(PogError::Empty);
        }
        let t = self.tree_size(root)?;
        Ok(BigRational::new(t.into(), BigUint::from(size).into()))
    }

    /// Values of all nodes under a total input assignment (`alpha[i]` is variable `i + 1`).
    pub fn evaluate_nodes(&self, alpha: &[bool]) -> Vec<bool> {
        let mut values: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                PogNode::Product { args, .. } => {
                    args.iter().all(|&a| self.lit_value(a, alpha, &values))
                }
                PogNode::Sum { left, right, .. } => {
                    self.lit_value(*left, alpha, &values) || self.lit_value(*right, alpha, &values)
                }
            };
            values.push(v);
        }
        values
    }

    fn lit_value(&self, lit: Lit, alpha: &[bool], values: &[bool]) -> bool {
        let base = match self.node_index(lit.var()) {
            Some(i) => values[i],
            None => alpha[lit.var().index() as usize - 1],
        };
        base == lit.is_positive()
    }

    pub fn evaluate(&self, lit: Lit, alpha: &[bool]) -> Result<bool, PogError> {
        self.check_known(lit)?;
        let values = self.evaluate_nodes(alpha);
        Ok(self.lit_value(lit, alpha, &values))
    }

    /// Checks product disjointness structurally and sum disjointness by enumeration (n <= 16).
    pub fn check_partitioned(&self) -> Result<(), PartitionViolation> {
        let deps = self.all_dependency_sets();
        for node in &self.nodes {
            if let PogNode::Product { var, args } = node {
                let mut all: Vec<Var> = Vec::new();
                for &a in args {
                    all.extend(self.deps_of(a, &deps));
                }
                let total = all.len();
                all.sort_unstable();
                all.dedup();
                if all.len() != total {
                    return Err(PartitionViolation::ProductOverlap(*var));
                }
            }
        }
        let n = self.input_var_count;
        if n > 16 {
            return Err(PogError::TooLarge(n).into());
        }
        let mut alpha = vec![false; n as usize];
        for bits in 0u64..(1 << n) {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a = bits >> i & 1 == 1;
            }
            let values = self.evaluate_nodes(&alpha);
            for node in &self.nodes {
                if let PogNode::Sum { var, left, right } = node {
                    if self.lit_value(*left, &alpha, &values)
                        && self.lit_value(*right, &alpha, &values)
                    {
                        return Err(PartitionViolation::SumOverlap(*var));
                    }
                }
            }
        }
        Ok(())
    }

    /// True iff the literal denotes a constant: an empty product or its negation.
    pub fn constant_value(&self, lit: Lit) -> Option<bool> {
        match self.node(lit.var()) {
            Some(PogNode::Product { args, .. }) if args.is_empty() => Some(lit.is_positive()),
            _ => None,
        }
    }

    /// Number of parents of each node reachable from the root, indexed by node position.
    pub fn reachable_indegrees(&self) -> Vec<usize> {
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut reach = vec![false; self.nodes.len()];
        if let Some(i) = self.root.and_then(|r| self.node_index(r.var())) {
            reach[i] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if !reach[i] {
                continue;
            }
            for a in self.nodes[i].args() {
                if let Some(j) = self.node_index(a.var()) {
                    indeg[j] += 1;
                    reach[j] = true;
                }
            }
        }
        indeg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Lit {
        Lit::from_dimacs(v)
    }

    fn var(v: u64) -> Var {
        Var::new(v).unwrap()
    }

    pub(crate) fn worked_example() -> Pog {
        let mut p = Pog::new(4);
        p.add_product(var(5), vec![lit(-3), lit(-4)]).unwrap();
        p.add_product(var(6), vec![lit(3), lit(4)]).unwrap();
        p.add_sum(var(7), lit(5), lit(6)).unwrap();
        p.add_product(var(8), vec![lit(-1), lit(7)]).unwrap();
        p.add_product(var(9), vec![lit(1), lit(-2), lit(7)]).unwrap();
        p.add_sum(var(10), lit(8), lit(9)).unwrap();
        p.set_root(lit(10)).unwrap();
        p
    }

    #[test]
    fn dependency_sets() {
        let p = worked_example();
        assert_eq!(p.dependency_set(lit(5)).unwrap(), vec![var(3), var(4)]);
        assert_eq!(p.dependency_set(lit(-2)).unwrap(), vec![var(2)]);
        assert_eq!(
            p.dependency_set(lit(10)).unwrap(),
            vec![var(1), var(2), var(3), var(4)]
        );
        assert_eq!(p.dependency_set(lit(11)), Err(PogError::Undeclared(11)));
    }

    #[test]
    fn sizes() {
        let p = worked_example();
        assert_eq!(p.pog_size(), 19);
        assert_eq!(Pog::new(3).pog_size(), 0);
        let mut q = Pog::new(0);
        q.add_product(var(1), vec![]).unwrap();
        assert_eq!(q.pog_size(), 1);

        assert_eq!(p.tree_size(lit(3)).unwrap(), BigUint::zero());
        assert_eq!(p.tree_size(lit(5)).unwrap(), BigUint::from(3u32));
        assert_eq!(p.tree_size(lit(7)).unwrap(), BigUint::from(9u32));
        assert_eq!(p.tree_size(lit(10)).unwrap(), BigUint::from(28u32));
        assert_eq!(
            p.tree_ratio().unwrap(),
            BigRational::new(28.into(), 19.into())
        );
        assert_eq!(Pog::new(2).tree_ratio(), Err(PogError::NoRoot));
    }

    #[test]
    fn evaluation() {
        let p = worked_example();
        assert!(p.evaluate(lit(10), &[false, true, false, false]).unwrap());
        assert!(!p.evaluate(lit(10), &[true, true, false, false]).unwrap());
        assert!(p.evaluate(lit(-10), &[true, true, false, false]).unwrap());
        let mut q = Pog::new(2);
        q.add_product(var(3), vec![]).unwrap();
        assert!(q.evaluate(lit(3), &[false, true]).unwrap());
        assert!(!q.evaluate(lit(-3), &[false, true]).unwrap());
        assert_eq!(q.constant_value(lit(-3)), Some(false));
    }

    #[test]
    fn partitioning() {
        assert_eq!(worked_example().check_partitioned(), Ok(()));

        let mut p = Pog::new(1);
        p.add_product(var(2), vec![lit(1), lit(1)]).unwrap();
        assert_eq!(
            p.check_partitioned(),
            Err(PartitionViolation::ProductOverlap(var(2)))
        );

        let mut p = Pog::new(1);
        p.add_sum(var(2), lit(1), lit(1)).unwrap();
        assert_eq!(
            p.check_partitioned(),
            Err(PartitionViolation::SumOverlap(var(2)))
        );
    }

    #[test]
    fn declaration_errors() {
        let mut p = Pog::new(2);
        assert_eq!(p.add_product(var(2), vec![]), Err(PogError::VarReuse(2)));
        assert_eq!(
            p.add_product(var(3), vec![lit(4)]),
            Err(PogError::Undeclared(4))
        );
        p.add_product(var(3), vec![lit(1)]).unwrap();
        assert_eq!(p.add_sum(var(3), lit(1), lit(2)), Err(PogError::VarReuse(3)));
    }

    #[test]
    fn indegrees() {
        let p = worked_example();
        assert_eq!(p.reachable_indegrees(), vec![1, 1, 2, 1, 1, 0]);
    }
}

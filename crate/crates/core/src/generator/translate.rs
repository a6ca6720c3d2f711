//! Decision-DNNF to POG translation with constant folding and hash-consing.

use std::collections::{HashMap, HashSet};

use super::ddnnf::{DKind, DdnnfGraph};
use super::GenError;
use crate::cnf::{Lit, Var};
use crate::cpog::CpogStep;
use crate::pog::{Pog, PogNode};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Item {
    Const(bool),
    Lit(Lit),
}

/// Per-node data the proof generator needs beyond the POG itself.
#[derive(Clone, Debug)]
pub(crate) struct NodeInfo {
    pub first_id: u64,
    /// For sums: a literal the left child implies and the right child refutes.
    pub decision: Option<Lit>,
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Product(Vec<Lit>),
    Sum(Lit, Lit),
}

pub(crate) struct Translation {
    pub pog: Pog,
    pub info: Vec<NodeInfo>,
    pub declarations: Vec<CpogStep>,
    pub next_var: u64,
    pub next_id: u64,
}

struct Builder {
    pog: Pog,
    info: Vec<NodeInfo>,
    declarations: Vec<CpogStep>,
    next_var: u64,
    next_id: u64,
    unique: HashMap<Key, Lit>,
}

impl Builder {
    fn fresh(&mut self) -> Var {
        let v = Var::new(self.next_var).expect("positive");
        self.next_var += 1;
        v
    }

    fn declare_product(&mut self, args: Vec<Lit>) -> Lit {
        if let Some(&l) = self.unique.get(&Key::Product(args.clone())) {
            return l;
        }
        let var = self.fresh();
        let id = self.next_id;
        self.next_id += 1 + args.len() as u64;
        self.pog.add_product(var, args.clone()).expect("fresh variable");
        self.info.push(NodeInfo {
            first_id: id,
            decision: None,
        });
        self.declarations.push(CpogStep::DeclareProduct {
            id,
            var,
            args: args.clone(),
        });
        self.unique.insert(Key::Product(args), var.positive());
        var.positive()
    }

    fn product(&mut self, items: Vec<Item>) -> Item {
        let mut args: Vec<Lit> = Vec::with_capacity(items.len());
        let mut seen: HashSet<Lit> = HashSet::with_capacity(items.len());
        for it in items {
            match it {
                Item::Const(false) => return Item::Const(false),
                Item::Const(true) => {}
                Item::Lit(l) => {
                    if seen.contains(&l.negate()) {
                        return Item::Const(false);
                    }
                    if seen.insert(l) {
                        args.push(l);
                    }
                }
            }
        }
        match args.len() {
            0 => Item::Const(true),
            1 => Item::Lit(args[0]),
            _ => Item::Lit(self.declare_product(args)),
        }
    }

    /// Literals a node reference directly forces: itself if an input, or product arguments.
    fn forced(&self, l: Lit) -> Vec<Lit> {
        if self.pog.is_input(l.var()) {
            return vec![l];
        }
        match (l.is_positive(), self.pog.node(l.var())) {
            (true, Some(PogNode::Product { args, .. })) => args.clone(),
            _ => Vec::new(),
        }
    }

    /// Clause showing `u` implies `want`, or `None` if `u` is that literal.
    fn implication(&self, u: Lit, want: Lit) -> Option<u64> {
        if u == want {
            return None;
        }
        let k = self.pog.node_index(u.var()).expect("node");
        let pos = self.pog.nodes()[k]
            .args()
            .iter()
            .position(|&a| a == want)
            .expect("forced literal");
        Some(self.info[k].first_id + 1 + pos as u64)
    }

    fn sum(&mut self, left: Item, right: Item) -> Result<Item, GenError> {
        let (l, r) = match (left, right) {
            (Item::Const(false), x) | (x, Item::Const(false)) => return Ok(x),
            (Item::Const(true), _) | (_, Item::Const(true)) => return Ok(Item::Const(true)),
            (Item::Lit(l), Item::Lit(r)) => (l, r),
        };
        if l == r.negate() && self.pog.is_input(l.var()) {
            return Ok(Item::Const(true));
        }
        if let Some(&s) = self.unique.get(&Key::Sum(l, r)) {
            return Ok(Item::Lit(s));
        }
        let lf = self.forced(l);
        let rf = self.forced(r);
        let d = lf
            .iter()
            .copied()
            .find(|d| rf.contains(&d.negate()))
            .ok_or(GenError::NoDecision { left: l, right: r })?;
        let hint: Vec<u64> = [self.implication(l, d), self.implication(r, d.negate())]
            .into_iter()
            .flatten()
            .collect();
        let var = self.fresh();
        let id = self.next_id;
        self.next_id += 3;
        self.pog.add_sum(var, l, r).expect("fresh variable");
        self.info.push(NodeInfo {
            first_id: id,
            decision: Some(d),
        });
        self.declarations.push(CpogStep::DeclareSum {
            id,
            var,
            left: l,
            right: r,
            hint,
        });
        self.unique.insert(Key::Sum(l, r), var.positive());
        Ok(Item::Lit(var.positive()))
    }
}

/// Translates the graph; extension variables start at `n + 1` and clause IDs at `m + 1`.
pub(crate) fn ddnnf_to_pog(graph: &DdnnfGraph, n: u64, m: u64) -> Result<Translation, GenError> {
    let mut b = Builder {
        pog: Pog::new(n),
        info: Vec::new(),
        declarations: Vec::new(),
        next_var: n + 1,
        next_id: m + 1,
        unique: HashMap::new(),
    };
    let nodes = graph.nodes();
    for l in nodes.iter().flat_map(|d| d.arcs.iter().flat_map(|a| &a.lits)) {
        if l.var().index() > n {
            return Err(GenError::ForeignVariable(l.var().index()));
        }
    }
    let mut memo: Vec<Option<Item>> = vec![None; nodes.len()];
    let mut stack = vec![(graph.root(), false)];
    while let Some((k, expanded)) = stack.pop() {
        if memo[k].is_some() {
            continue;
        }
        let node = &nodes[k];
        if !expanded {
            stack.push((k, true));
            for a in node.arcs.iter().rev() {
                if memo[a.child].is_none() {
                    stack.push((a.child, false));
                }
            }
            continue;
        }
        let arc_items = |a: &super::ddnnf::DArc| {
            let mut v: Vec<Item> = a.lits.iter().map(|&l| Item::Lit(l)).collect();
            v.push(memo[a.child].expect("child translated"));
            v
        };
        let item = match node.kind {
            DKind::True => Item::Const(true),
            DKind::False => Item::Const(false),
            DKind::And => {
                let items: Vec<Item> = node.arcs.iter().flat_map(arc_items).collect();
                b.product(items)
            }
            DKind::Or => {
                let mut branches = Vec::with_capacity(2);
                for a in &node.arcs {
                    let items = arc_items(a);
                    branches.push(b.product(items));
                }
                match branches.as_slice() {
                    [] => Item::Const(false),
                    [x] => *x,
                    [x, y] => b.sum(*x, *y)?,
                    _ => unreachable!("validated arity"),
                }
            }
        };
        memo[k] = Some(item);
    }
    let root = match memo[graph.root()].expect("root translated") {
        Item::Lit(l) => l,
        Item::Const(c) => {
            let v = b.declare_product(Vec::new());
            if c {
                v
            } else {
                v.negate()
            }
        }
    };
    b.pog.set_root(root).expect("declared");
    Ok(Translation {
        pog: b.pog,
        info: b.info,
        declarations: b.declarations,
        next_var: b.next_var,
        next_id: b.next_id,
    })
}

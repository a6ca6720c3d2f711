//! Decision-DNNF graphs in the d4 NNF text convention.
//!
//! Node lines are `o <id> 0`, `a <id> 0`, `t <id> 0`, `f <id> 0`; arc lines are
//! `<from> <to> <lits...> 0`. The first declared node is the root.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::Lit;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DKind {
    True,
    False,
    Or,
    And,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DArc {
    pub lits: Vec<Lit>,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DNode {
    pub id: u64,
    pub kind: DKind,
    pub arcs: Vec<DArc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdnnfGraph {
    nodes: Vec<DNode>,
    root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdnnfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("arc refers to undeclared node {0}")]
    DanglingArc(u64),
    #[error("node {0} declared twice")]
    DuplicateNode(u64),
    #[error("graph has no nodes")]
    Empty,
    #[error("graph contains a cycle through node {0}")]
    Cycle(u64),
    #[error("or-node {0} lacks two arcs with opposing decision literals")]
    NoDecision(u64),
    #[error("{kind} node {id} cannot have arcs")]
    TerminalArcs { kind: &'static str, id: u64 },
}

impl DdnnfGraph {
    /// Builds a graph from nodes; `root` indexes into `nodes`. Validates structure.
    pub fn new(nodes: Vec<DNode>, root: usize) -> Result<DdnnfGraph, DdnnfError> {
        let g = DdnnfGraph { nodes, root };
        g.validate()?;
        Ok(g)
    }

    pub fn nodes(&self) -> &[DNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Number of arcs entering each node.
    pub fn indegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for n in &self.nodes {
            for a in &n.arcs {
                d[a.child] += 1;
            }
        }
        d
    }

    /// Literals visible on an arc: its own literals, plus those of an and-node child's arcs.
    fn visible_lits(&self, arc: &DArc) -> Vec<Lit> {
        let mut out = arc.lits.clone();
        let child = &self.nodes[arc.child];
        if child.kind == DKind::And {
            for a in &child.arcs {
                out.extend_from_slice(&a.lits);
            }
        }
        out
    }

    /// The literal on the first arc of a binary or-node whose complement is on the second.
    pub fn decision(&self, node: usize) -> Option<Lit> {
        let n = &self.nodes[node];
        if n.kind != DKind::Or || n.arcs.len() != 2 {
            return None;
        }
        let right = self.visible_lits(&n.arcs[1]);
        self.visible_lits(&n.arcs[0])
            .into_iter()
            .find(|l| right.contains(&l.negate()))
    }

    fn validate(&self) -> Result<(), DdnnfError> {
        if self.nodes.is_empty() {
            return Err(DdnnfError::Empty);
        }
        for (i, n) in self.nodes.iter().enumerate() {
            match n.kind {
                DKind::True | DKind::False if !n.arcs.is_empty() => {
                    return Err(DdnnfError::TerminalArcs {
                        kind: if n.kind == DKind::True { "true" } else { "false" },
                        id: n.id,
                    })
                }
                DKind::Or if n.arcs.len() > 2 || n.arcs.len() == 2 && self.decision(i).is_none() => {
                    return Err(DdnnfError::NoDecision(n.id))
                }
                _ => {}
            }
        }
        // Iterative depth-first search with three colors.
        let mut color = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if color[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            color[start] = 1;
            while let Some(&mut (node, ref mut k)) = stack.last_mut() {
                if let Some(arc) = self.nodes[node].arcs.get(*k) {
                    *k += 1;
                    match color[arc.child] {
                        0 => {
                            color[arc.child] = 1;
                            stack.push((arc.child, 0));
                        }
                        1 => return Err(DdnnfError::Cycle(self.nodes[arc.child].id)),
                        _ => {}
                    }
                } else {
                    color[node] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Renders the graph in the d4 convention, root first.
    pub fn to_d4(&self) -> String {
        let mut order: Vec<usize> = vec![self.root];
        order.extend((0..self.nodes.len()).filter(|&i| i != self.root));
        let mut s = String::new();
        for &i in &order {
            let n = &self.nodes[i];
            let k = match n.kind {
                DKind::True => 't',
                DKind::False => 'f',
                DKind::Or => 'o',
                DKind::And => 'a',
            };
            writeln!(s, "{k} {} 0", n.id).unwrap();
        }
        for &i in &order {
            let n = &self.nodes[i];
            for a in &n.arcs {
                write!(s, "{} {}", n.id, self.nodes[a.child].id).unwrap();
                for l in &a.lits {
                    write!(s, " {l}").unwrap();
                }
                s.push_str(" 0\n");
            }
        }
        s
    }
}

pub fn parse_d4(text: &str) -> Result<DdnnfGraph, DdnnfError> {
    let mut nodes: Vec<DNode> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut arcs: Vec<(u64, u64, Vec<Lit>)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let syntax = |message: String| DdnnfError::Syntax {
            line: lineno + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        let kind = match first {
            "c" => continue,
            "o" => Some(DKind::Or),
            "a" => Some(DKind::And),
            "t" => Some(DKind::True),
            "f" => Some(DKind::False),
            _ => None,
        };
        let nums = |ts: &[&str]| -> Result<Vec<i64>, DdnnfError> {
            ts.iter()
                .map(|t| t.parse::<i64>().map_err(|_| syntax(format!("bad token `{t}`"))))
                .collect()
        };
        if let Some(kind) = kind {
            let v = nums(&toks[1..])?;
            if v.len() != 2 || v[1] != 0 || v[0] <= 0 {
                return Err(syntax(format!("malformed node line `{line}`")));
            }
            let id = v[0] as u64;
            if index.insert(id, nodes.len()).is_some() {
                return Err(DdnnfError::DuplicateNode(id));
            }
            nodes.push(DNode {
                id,
                kind,
                arcs: Vec::new(),
            });
        } else {
            let v = nums(&toks)?;
            if v.len() < 3 || *v.last().unwrap() != 0 || v[0] <= 0 || v[1] <= 0 {
                return Err(syntax(format!("malformed arc line `{line}`")));
            }
            let lits = v[2..v.len() - 1]
                .iter()
                .map(|&x| Lit::new(x).ok_or_else(|| syntax("zero literal inside arc".into())))
                .collect::<Result<Vec<_>, _>>()?;
            arcs.push((v[0] as u64, v[1] as u64, lits));
        }
    }
    for (from, to, lits) in arcs {
        let f = *index.get(&from).ok_or(DdnnfError::DanglingArc(from))?;
        let t = *index.get(&to).ok_or(DdnnfError::DanglingArc(to))?;
        nodes[f].arcs.push(DArc { lits, child: t });
    }
    if nodes.is_empty() {
        return Err(DdnnfError::Empty);
    }
    DdnnfGraph::new(nodes, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const WORKED_D4: &str = "o 1 0\no 2 0\nt 3 0\n1 2 -1 0\n1 2 1 -2 0\n2 3 -3 -4 0\n2 3 3 4 0\n";

    #[test]
    fn parses_worked_graph() {
        let g = parse_d4(WORKED_D4).unwrap();
        assert_eq!(g.nodes().len(), 3);
        assert_eq!(g.root(), 0);
        assert_eq!(g.decision(0), Some(Lit::from_dimacs(-1)));
        assert_eq!(g.decision(1), Some(Lit::from_dimacs(-3)));
        assert_eq!(g.indegrees(), vec![0, 2, 2]);
        assert_eq!(parse_d4(&g.to_d4()).unwrap(), g);
    }

    #[test]
    fn constants() {
        let g = parse_d4("t 1 0\n").unwrap();
        assert_eq!(g.nodes()[0].kind, DKind::True);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_d4("o 1 0\n1 2 0\n"), Err(DdnnfError::DanglingArc(2)));
        assert_eq!(parse_d4(""), Err(DdnnfError::Empty));
        assert_eq!(
            parse_d4("o 1 0\nt 2 0\n1 2 1 0\n1 2 2 0\n"),
            Err(DdnnfError::NoDecision(1))
        );
        assert_eq!(
            parse_d4("a 1 0\na 2 0\n1 2 0\n2 1 0\n"),
            Err(DdnnfError::Cycle(1))
        );
        assert!(matches!(parse_d4("x 1 0\n"), Err(DdnnfError::Syntax { .. })));
        assert_eq!(parse_d4("t 1 0\nf 1 0\n"), Err(DdnnfError::DuplicateNode(1)));
    }
}

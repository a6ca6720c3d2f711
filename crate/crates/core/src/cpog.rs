//! The CPOG proof text format and implicit defining-clause expansion.

use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::cnf::{tokens, Clause, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CpogStep {
    AddRup {
        id: u64,
        clause: Clause,
        hint: Vec<u64>,
    },
    DeleteRup {
        id: u64,
        hint: Vec<u64>,
    },
    DeclareProduct {
        id: u64,
        var: Var,
        args: Vec<Lit>,
    },
    DeclareSum {
        id: u64,
        var: Var,
        left: Lit,
        right: Lit,
        hint: Vec<u64>,
    },
    DeclareRoot {
        lit: Lit,
    },
}

impl CpogStep {
    pub fn add(id: u64, lits: Vec<Lit>, hint: Vec<u64>) -> CpogStep {
        CpogStep::AddRup {
            id,
            clause: Clause::new(lits),
            hint,
        }
    }

    /// Defining clauses introduced by a declaration; empty for other steps.
    pub fn defining_clauses(&self) -> Vec<(u64, Vec<Lit>)> {
        match self {
            CpogStep::DeclareProduct { id, var, args } => product_clauses(*id, *var, args),
            CpogStep::DeclareSum {
                id,
                var,
                left,
                right,
                ..
            } => sum_clauses(*id, *var, *left, *right),
            _ => Vec::new(),
        }
    }
}

/// Clause `id` is `(v, -l1, ..., -lk)`; clause `id + j` is `(-v, lj)`.
pub fn product_clauses(id: u64, var: Var, args: &[Lit]) -> Vec<(u64, Vec<Lit>)> {
    let mut out = Vec::with_capacity(args.len() + 1);
    let mut first = vec![var.positive()];
    first.extend(args.iter().map(|l| l.negate()));
    out.push((id, first));
    for (j, &a) in args.iter().enumerate() {
        out.push((id + 1 + j as u64, vec![var.negative(), a]));
    }
    out
}

/// Clauses `(-v, l1, l2)`, `(v, -l1)`, `(v, -l2)` at `id`, `id + 1`, `id + 2`.
pub fn sum_clauses(id: u64, var: Var, left: Lit, right: Lit) -> Vec<(u64, Vec<Lit>)> {
    vec![
        (id, vec![var.negative(), left, right]),
        (id + 1, vec![var.positive(), left.negate()]),
        (id + 2, vec![var.positive(), right.negate()]),
    ]
}

pub fn expand_defining(step: &CpogStep) -> Vec<(u64, Vec<Lit>)> {
    step.defining_clauses()
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for x in items {
        write!(f, "{x} ")?;
    }
    Ok(())
}

impl fmt::Display for CpogStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpogStep::AddRup { id, clause, hint } => {
                write!(f, "{id} a ")?;
                join(f, clause.lits())?;
                write!(f, "0 ")?;
                join(f, hint)?;
                write!(f, "0")
            }
            CpogStep::DeleteRup { id, hint } => {
                write!(f, "d {id} ")?;
                join(f, hint)?;
                write!(f, "0")
            }
            CpogStep::DeclareProduct { id, var, args } => {
                write!(f, "{id} p {var} ")?;
                join(f, args)?;
                write!(f, "0")
            }
            CpogStep::DeclareSum {
                id,
                var,
                left,
                right,
                hint,
            } => {
                write!(f, "{id} s {var} {left} {right} ")?;
                join(f, hint)?;
                write!(f, "0")
            }
            CpogStep::DeclareRoot { lit } => write!(f, "r {lit}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct CpogParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CpogReadError {
    #[error(transparent)]
    Parse(#[from] CpogParseError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Cursor<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    line: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, column: usize, message: String) -> CpogParseError {
        CpogParseError {
            line: self.line,
            column,
            message,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), CpogParseError> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(self.end, format!("unexpected end of line, expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn int(&mut self, what: &str) -> Result<(usize, i64), CpogParseError> {
        let (col, tok) = self.next(what)?;
        tok.parse::<i64>()
            .map(|v| (col, v))
            .map_err(|_| self.err(col, format!("expected {what}, found `{tok}`")))
    }

    fn id(&mut self) -> Result<u64, CpogParseError> {
        match self.int("a clause ID")? {
            (_, v) if v > 0 => Ok(v as u64),
            (col, v) => Err(self.err(col, format!("expected a positive clause ID, found `{v}`"))),
        }
    }

    fn var(&mut self) -> Result<Var, CpogParseError> {
        match self.int("a variable")? {
            (_, v) if v > 0 => Ok(Var::new(v as u64).expect("positive")),
            (col, v) => Err(self.err(col, format!("expected a variable, found `{v}`"))),
        }
    }

    fn lit(&mut self) -> Result<Lit, CpogParseError> {
        let (col, v) = self.int("a literal")?;
        Lit::new(v).ok_or_else(|| self.err(col, "expected a nonzero literal".to_string()))
    }

    fn lits(&mut self) -> Result<Vec<Lit>, CpogParseError> {
        let mut out = Vec::new();
        loop {
            let (col, v) = self.int("a literal")?;
            if v == 0 {
                return Ok(out);
            }
            out.push(Lit::new(v).ok_or_else(|| self.err(col, "bad literal".to_string()))?);
        }
    }

    fn ids(&mut self) -> Result<Vec<u64>, CpogParseError> {
        let mut out = Vec::new();
        loop {
            match self.int("a clause ID")? {
                (_, 0) => return Ok(out),
                (_, v) if v > 0 => out.push(v as u64),
                (col, v) => {
                    return Err(self.err(col, format!("expected a positive clause ID, found `{v}`")))
                }
            }
        }
    }
}

/// Parses one line. Returns `None` for blank and comment lines.
pub fn parse_step_line(line: &str, lineno: usize) -> Result<Option<CpogStep>, CpogParseError> {
    let toks: Vec<(usize, &str)> = tokens(line).collect();
    match toks.first() {
        None => return Ok(None),
        Some((_, t)) if t.starts_with('c') => return Ok(None),
        _ => {}
    }
    let mut cur = Cursor {
        toks,
        pos: 0,
        line: lineno,
        end: line.trim_end().len() + 1,
    };
    let (_, first) = cur.toks[0];
    let step = match first {
        "d" => {
            cur.pos = 1;
            let id = cur.id()?;
            let hint = cur.ids()?;
            CpogStep::DeleteRup { id, hint }
        }
        "r" => {
            cur.pos = 1;
            CpogStep::DeclareRoot { lit: cur.lit()? }
        }
        _ => {
            let id = cur.id()?;
            let (kcol, kw) = cur.next("a step keyword")?;
            match kw {
                "a" => {
                    let lits = cur.lits()?;
                    let hint = cur.ids()?;
                    CpogStep::AddRup {
                        id,
                        clause: Clause::new(lits),
                        hint,
                    }
                }
                "p" => {
                    let var = cur.var()?;
                    let args = cur.lits()?;
                    CpogStep::DeclareProduct { id, var, args }
                }
                "s" => {
                    let var = cur.var()?;
                    let left = cur.lit()?;
                    let right = cur.lit()?;
                    let hint = cur.ids()?;
                    if hint.is_empty() {
                        return Err(cur.err(kcol, "sum declaration requires a hint".to_string()));
                    }
                    CpogStep::DeclareSum {
                        id,
                        var,
                        left,
                        right,
                        hint,
                    }
                }
                "d" => {
                    return Err(cur.err(kcol, "deletion lines take no leading ID".to_string()))
                }
                other => return Err(cur.err(kcol, format!("unknown step keyword `{other}`"))),
            }
        }
    };
    if let Some(&(col, tok)) = cur.toks.get(cur.pos) {
        return Err(cur.err(col, format!("trailing token `{tok}`")));
    }
    Ok(Some(step))
}

/// Streams steps from a reader, enforcing a single root declaration.
pub struct CpogReader<R> {
    input: R,
    line: String,
    lineno: usize,
    seen_root: bool,
}

impl<R: BufRead> CpogReader<R> {
    pub fn new(input: R) -> CpogReader<R> {
        CpogReader {
            input,
            line: String::new(),
            lineno: 0,
            seen_root: false,
        }
    }

    /// Line number of the most recently returned step.
    pub fn line_number(&self) -> usize {
        self.lineno
    }
}

impl<R: BufRead> Iterator for CpogReader<R> {
    type Item = Result<CpogStep, CpogReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line.clear();
            match self.input.read_line(&mut self.line) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.lineno += 1;
            match parse_step_line(&self.line, self.lineno) {
                Ok(None) => continue,
                Ok(Some(step)) => {
                    if matches!(step, CpogStep::DeclareRoot { .. }) {
                        if self.seen_root {
                            return Some(Err(CpogParseError {
                                line: self.lineno,
                                column: 1,
                                message: "duplicate root declaration".to_string(),
                            }
                            .into()));
                        }
                        self.seen_root = true;
                    }
                    return Some(Ok(step));
                }
                Err(e) => return Some(Err(e.into())),
            }
        }
    }
}

pub fn parse_cpog(text: &str) -> Result<Vec<CpogStep>, CpogParseError> {
    CpogReader::new(text.as_bytes())
        .map(|r| {
            r.map_err(|e| match e {
                CpogReadError::Parse(p) => p,
                CpogReadError::Io(_) => unreachable!("reading from memory"),
            })
        })
        .collect()
}

pub fn write_cpog<'a, W: Write>(
    steps: impl IntoIterator<Item = &'a CpogStep>,
    mut out: W,
) -> io::Result<()> {
    for s in steps {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

pub fn serialize_cpog(steps: &[CpogStep]) -> String {
    let mut buf = Vec::new();
    write_cpog(steps, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CPOG output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(v: &[i64]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn parses_each_step_kind() {
        let steps = parse_cpog(
            "c comment\n\n6 p 5 -3 -4 0\n12 s 7 5 6 7 10 0\nr 10\n25 a 5 1 3 0 3 6 0\nd 1 36 8 10 12 16 21 22 0\n",
        )
        .unwrap();
        assert_eq!(
            steps,
            vec![
                CpogStep::DeclareProduct {
                    id: 6,
                    var: Var::new(5).unwrap(),
                    args: l(&[-3, -4])
                },
                CpogStep::DeclareSum {
                    id: 12,
                    var: Var::new(7).unwrap(),
                    left: Lit::from_dimacs(5),
                    right: Lit::from_dimacs(6),
                    hint: vec![7, 10]
                },
                CpogStep::DeclareRoot {
                    lit: Lit::from_dimacs(10)
                },
                CpogStep::add(25, l(&[5, 1, 3]), vec![3, 6]),
                CpogStep::DeleteRup {
                    id: 1,
                    hint: vec![36, 8, 10, 12, 16, 21, 22]
                },
            ]
        );
        assert_eq!(parse_cpog(&serialize_cpog(&steps)).unwrap(), steps);
    }

    #[test]
    fn defining_clause_expansion() {
        let p = CpogStep::DeclareProduct {
            id: 6,
            var: Var::new(5).unwrap(),
            args: l(&[-3, -4]),
        };
        assert_eq!(
            expand_defining(&p),
            vec![(6, l(&[5, 3, 4])), (7, l(&[-5, -3])), (8, l(&[-5, -4]))]
        );
        let s = parse_cpog("12 s 7 5 6 7 10 0").unwrap().remove(0);
        assert_eq!(
            expand_defining(&s),
            vec![(12, l(&[-7, 5, 6])), (13, l(&[7, -5])), (14, l(&[7, -6]))]
        );
        let e = parse_cpog("9 p 20 0").unwrap().remove(0);
        assert_eq!(expand_defining(&e), vec![(9, l(&[20]))]);
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "5 d 1 0",
            "6 p 5 -3 -4",
            "12 s 7 5 6 0",
            "25 a 5 1 a 0 3 0",
            "25 x 1 0 0",
            "r",
            "r 0",
            "0 a 1 0 0",
            "d 1 2 0 7",
            "25 a 1 0 -3 0",
        ] {
            assert!(parse_cpog(bad).is_err(), "accepted `{bad}`");
        }
        let e = parse_cpog("r 1\nr 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_cpog("25 a 5 x 0 3 0").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
    }
}

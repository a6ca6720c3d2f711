//! DIMACS CNF parsing, clause representation, and canonical reprinting.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

/// A Boolean variable. Indices start at 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u64);

impl Var {
    pub fn new(index: u64) -> Option<Var> {
        (index >= 1 && index <= i64::MAX as u64).then_some(Var(index))
    }

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn positive(self) -> Lit {
        Lit(self.0 as i64)
    }

    pub fn negative(self) -> Lit {
        Lit(-(self.0 as i64))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal in DIMACS encoding: the sign is the polarity, the magnitude the variable.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i64);

impl Lit {
    pub fn new(value: i64) -> Option<Lit> {
        (value != 0 && value != i64::MIN).then_some(Lit(value))
    }

    /// Panics on zero. Meant for literals known to be well formed.
    pub fn from_dimacs(value: i64) -> Lit {
        Lit::new(value).expect("literal must be nonzero")
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negate(self) -> Lit {
        Lit(-self.0)
    }

    /// Truth value of the literal under a value for its variable.
    pub fn eval(self, var_value: bool) -> bool {
        var_value == self.is_positive()
    }
}

impl std::ops::Neg for Lit {
    type Output = Lit;
    fn neg(self) -> Lit {
        self.negate()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ordered sequence of literals. Duplicates are kept as written.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Clause {
        Clause { lits }
    }

    pub fn from_dimacs(values: &[i64]) -> Clause {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v)).collect())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// True iff the clause contains some literal together with its negation.
    pub fn is_tautology(&self) -> bool {
        clause_is_tautology(&self.lits)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut sorted = self.lits.clone();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    pub fn max_var(&self) -> u64 {
        self.lits.iter().map(|l| l.var().index()).max().unwrap_or(0)
    }
}

impl From<Vec<Lit>> for Clause {
    fn from(lits: Vec<Lit>) -> Clause {
        Clause::new(lits)
    }
}

pub fn clause_is_tautology(lits: &[Lit]) -> bool {
    let mut sorted: Vec<i64> = lits.iter().map(|l| l.value()).collect();
    sorted.sort_unstable_by_key(|v| (v.unsigned_abs(), *v));
    sorted
        .windows(2)
        .any(|w| w[0] == -w[1])
}

/// A CNF formula with clause IDs `1..=clauses.len()`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: u64,
    clauses: Vec<Clause>,
    weights: BTreeMap<Lit, String>,
}

impl CnfFormula {
    pub fn new(var_count: u64, clauses: Vec<Clause>) -> Result<CnfFormula, CnfError> {
        for (i, c) in clauses.iter().enumerate() {
            if c.max_var() > var_count {
                return Err(CnfError::new(
                    0,
                    0,
                    CnfErrorKind::VarOutOfRange {
                        var: c.max_var(),
                        declared: var_count,
                    },
                )
                .with_context(format!("clause {}", i + 1)));
            }
        }
        Ok(CnfFormula {
            var_count,
            clauses,
            weights: BTreeMap::new(),
        })
    }

    /// Builds a formula from raw DIMACS literal lists. Panics on out-of-range literals.
    pub fn from_dimacs(var_count: u64, clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(var_count, clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
            .expect("literal out of range")
    }

    pub fn var_count(&self) -> u64 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Clause with the given 1-based ID.
    pub fn clause(&self, id: u64) -> Option<&Clause> {
        id.checked_sub(1).and_then(|i| self.clauses.get(i as usize))
    }

    pub fn weight_annotations(&self) -> &BTreeMap<Lit, String> {
        &self.weights
    }

    pub fn set_weight(&mut self, lit: Lit, decimal: impl Into<String>) {
        self.weights.insert(lit, decimal.into());
    }

    /// IDs of clauses containing complementary literals.
    pub fn tautological_clauses(&self) -> Vec<u64> {
        self.ids_where(Clause::is_tautology)
    }

    /// IDs of clauses that repeat a literal.
    pub fn clauses_with_duplicates(&self) -> Vec<u64> {
        self.ids_where(Clause::has_duplicates)
    }

    fn ids_where(&self, pred: impl Fn(&Clause) -> bool) -> Vec<u64> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| pred(c))
            .map(|(i, _)| i as u64 + 1)
            .collect()
    }

    /// Whether the total assignment satisfies every clause. `assignment[i]` is variable `i + 1`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.lits()
                .iter()
                .any(|l| l.eval(assignment[l.var().index() as usize - 1]))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfErrorKind {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("expected an integer, found `{0}`")]
    NotAnInteger(String),
    #[error("variable {var} exceeds declared count {declared}")]
    VarOutOfRange { var: u64, declared: u64 },
    #[error("header declares {declared} clauses but file has {found}")]
    ClauseCountMismatch { declared: u64, found: u64 },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("malformed weight line: {0}")]
    BadWeight(String),
}

/// A DIMACS parse failure with its source position (1-based; 0 when unknown).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
pub struct CnfError {
    pub line: usize,
    pub column: usize,
    pub kind: CnfErrorKind,
    context: Option<String>,
}

impl CnfError {
    fn new(line: usize, column: usize, kind: CnfErrorKind) -> CnfError {
        CnfError {
            line,
            column,
            kind,
            context: None,
        }
    }

    fn with_context(mut self, context: String) -> CnfError {
        self.context = Some(context);
        self
    }
}

/// Splits a line into tokens with their 1-based starting columns.
pub(crate) fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start().len();
        rest = &rest[skip..];
        offset += skip;
        if rest.is_empty() {
            return None;
        }
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let tok = &rest[..len];
        let col = offset + 1;
        rest = &rest[len..];
        offset += len;
        Some((col, tok))
    })
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(u64, u64)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut weights = BTreeMap::new();
    let mut last_pos = (0, 0);

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('c') {
            if let Some((lit, w)) = parse_weight_comment(trimmed)
                .map_err(|m| CnfError::new(lineno, 1, CnfErrorKind::BadWeight(m)))?
            {
                weights.insert(lit, w);
            }
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::new(lineno, 1, CnfErrorKind::DuplicateHeader));
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(CnfError::new(
                    lineno,
                    1,
                    CnfErrorKind::BadHeader(trimmed.to_string()),
                ));
            }
            let nvars = toks[2]
                .parse::<u64>()
                .ok()
                .filter(|&n| n <= i64::MAX as u64);
            let ncls = toks[3].parse::<u64>().ok();
            match (nvars, ncls) {
                (Some(v), Some(c)) => header = Some((v, c)),
                _ => {
                    return Err(CnfError::new(
                        lineno,
                        1,
                        CnfErrorKind::BadHeader(trimmed.to_string()),
                    ))
                }
            }
            continue;
        }
        for (col, tok) in tokens(line) {
            let Some((nvars, _)) = header else {
                return Err(CnfError::new(lineno, col, CnfErrorKind::MissingHeader));
            };
            let value: i64 = tok.parse().map_err(|_| {
                CnfError::new(lineno, col, CnfErrorKind::NotAnInteger(tok.to_string()))
            })?;
            last_pos = (lineno, col);
            if value == 0 {
                clauses.push(Clause::new(std::mem::take(&mut current)));
                continue;
            }
            let lit = Lit::new(value).ok_or_else(|| {
                CnfError::new(lineno, col, CnfErrorKind::NotAnInteger(tok.to_string()))
            })?;
            if lit.var().index() > nvars {
                return Err(CnfError::new(
                    lineno,
                    col,
                    CnfErrorKind::VarOutOfRange {
                        var: lit.var().index(),
                        declared: nvars,
                    },
                ));
            }
            current.push(lit);
        }
    }

    let Some((nvars, ncls)) = header else {
        return Err(CnfError::new(0, 0, CnfErrorKind::MissingHeader));
    };
    if !current.is_empty() {
        return Err(CnfError::new(
            last_pos.0,
            last_pos.1,
            CnfErrorKind::UnterminatedClause,
        ));
    }
    if clauses.len() as u64 != ncls {
        return Err(CnfError::new(
            last_pos.0,
            last_pos.1,
            CnfErrorKind::ClauseCountMismatch {
                declared: ncls,
                found: clauses.len() as u64,
            },
        ));
    }
    for lit in weights.keys() {
        if lit.var().index() > nvars {
            return Err(CnfError::new(
                0,
                0,
                CnfErrorKind::BadWeight(format!("weight for undeclared literal {lit}")),
            ));
        }
    }
    Ok(CnfFormula {
        var_count: nvars,
        clauses,
        weights,
    })
}

/// Recognizes `c p weight <lit> <decimal> 0`. Other comments yield `Ok(None)`.
fn parse_weight_comment(line: &str) -> Result<Option<(Lit, String)>, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 3 || toks[0] != "c" || toks[1] != "p" || toks[2] != "weight" {
        return Ok(None);
    }
    if toks.len() != 6 || toks[5] != "0" {
        return Err(line.to_string());
    }
    let lit = toks[3]
        .parse::<i64>()
        .ok()
        .and_then(Lit::new)
        .ok_or_else(|| line.to_string())?;
    if !is_decimal(toks[4]) {
        return Err(line.to_string());
    }
    Ok(Some((lit, toks[4].to_string())))
}

fn is_decimal(s: &str) -> bool {
    crate::evaluator::Q25::parse_decimal(s).is_ok()
}

pub fn write_dimacs<W: Write>(f: &CnfFormula, mut out: W) -> io::Result<()> {
    for (lit, w) in &f.weights {
        writeln!(out, "c p weight {lit} {w} 0")?;
    }
    writeln!(out, "p cnf {} {}", f.var_count, f.clauses.len())?;
    let mut line = String::new();
    for c in &f.clauses {
        line.clear();
        for l in c.lits() {
            line.push_str(&l.value().to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn format_dimacs(f: &CnfFormula) -> String {
    let mut buf = Vec::new();
    write_dimacs(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("DIMACS output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = "p cnf 4 5\n-1 3 -4 0\n-1 -3 4 0\n3 -4 0\n1 -3 4 0\n-1 -2 0\n";

    #[test]
    fn parses_worked_example() {
        let f = parse_dimacs(WORKED).unwrap();
        assert_eq!(f.var_count(), 4);
        assert_eq!(f.clause_count(), 5);
        assert_eq!(f.clause(1).unwrap(), &Clause::from_dimacs(&[-1, 3, -4]));
        assert_eq!(f.clause(5).unwrap(), &Clause::from_dimacs(&[-1, -2]));
        assert!(f.clause(6).is_none());
    }

    #[test]
    fn empty_formula() {
        let f = parse_dimacs("p cnf 0 0\n").unwrap();
        assert_eq!(f.var_count(), 0);
        assert_eq!(f.clause_count(), 0);
        assert_eq!(format_dimacs(&f), "p cnf 0 0\n");
    }

    #[test]
    fn tautological_clause_is_flagged() {
        let f = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap();
        assert_eq!(f.tautological_clauses(), vec![1]);
    }

    #[test]
    fn tautology_detection() {
        assert!(Clause::from_dimacs(&[1, -1]).is_tautology());
        assert!(!Clause::from_dimacs(&[1, 3, -4]).is_tautology());
        assert!(!Clause::default().is_tautology());
        assert!(Clause::from_dimacs(&[2, 5, -7, 3, -2]).is_tautology());
    }

    #[test]
    fn duplicates_are_preserved() {
        let f = parse_dimacs("p cnf 3 1\n2 2 -3 0\n").unwrap();
        assert_eq!(f.clause(1).unwrap().len(), 3);
        assert_eq!(f.clauses_with_duplicates(), vec![1]);
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_dimacs("c hello\np cnf 3 2\n1 2\n 3 0 -1\n0\n").unwrap();
        assert_eq!(f.clause(1).unwrap(), &Clause::from_dimacs(&[1, 2, 3]));
        assert_eq!(f.clause(2).unwrap(), &Clause::from_dimacs(&[-1]));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(matches!(e.kind, CnfErrorKind::VarOutOfRange { var: 3, .. }));

        let e = parse_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(matches!(e.kind, CnfErrorKind::NotAnInteger(_)));

        let e = parse_dimacs("1 2 0\n").unwrap_err();
        assert_eq!(e.kind, CnfErrorKind::MissingHeader);

        let e = parse_dimacs("p cnf 2\n").unwrap_err();
        assert!(matches!(e.kind, CnfErrorKind::BadHeader(_)));

        let e = parse_dimacs("p cnf 2 2\n1 2 0\n").unwrap_err();
        assert!(matches!(
            e.kind,
            CnfErrorKind::ClauseCountMismatch { declared: 2, found: 1 }
        ));

        let e = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert_eq!(e.kind, CnfErrorKind::UnterminatedClause);
    }

    #[test]
    fn weight_annotations() {
        let text = "c p weight 1 0.8 0\nc p weight -1 0.2 0\np cnf 2 1\n1 2 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.weight_annotations().get(&Lit::from_dimacs(1)).unwrap(), "0.8");
        assert_eq!(f.weight_annotations().get(&Lit::from_dimacs(-1)).unwrap(), "0.2");
        assert_eq!(parse_dimacs(&format_dimacs(&f)).unwrap(), f);

        let e = parse_dimacs("c p weight 1 abc 0\np cnf 1 0\n").unwrap_err();
        assert!(matches!(e.kind, CnfErrorKind::BadWeight(_)));
    }

    #[test]
    fn worked_example_round_trips() {
        let f = parse_dimacs(WORKED).unwrap();
        assert_eq!(format_dimacs(&f), WORKED);
        assert_eq!(parse_dimacs(&format_dimacs(&f)).unwrap(), f);
    }

    #[test]
    fn token_columns() {
        let toks: Vec<_> = tokens("  12 a  -3").collect();
        assert_eq!(toks, vec![(3, "12"), (6, "a"), (9, "-3")]);
    }
}

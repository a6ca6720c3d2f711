//! Ring evaluation of POGs: model counts, weighted counts, and function hashing.

mod field;
mod q25;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use field::{is_prime, FieldError, PrimeField};
pub use q25::{DecimalError, Q25};

use crate::cnf::{Lit, Var};
use crate::pog::{Pog, PogNode};

/// A commutative ring with its operations supplied by a context value.
pub trait Ring {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
}

/// Exact arithmetic over [`Q25`].
#[derive(Copy, Clone, Debug, Default)]
pub struct Q25Ring;

impl Ring for Q25Ring {
    type Elem = Q25;
    fn zero(&self) -> Q25 {
        Q25::zero()
    }
    fn one(&self) -> Q25 {
        Q25::one()
    }
    fn add(&self, x: &Q25, y: &Q25) -> Q25 {
        x.add(y)
    }
    fn sub(&self, x: &Q25, y: &Q25) -> Q25 {
        x.sub(y)
    }
    fn mul(&self, x: &Q25, y: &Q25) -> Q25 {
        x.mul(y)
    }
}

impl Ring for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, x: &u64, y: &u64) -> u64 {
        PrimeField::add(self, *x, *y)
    }
    fn sub(&self, x: &u64, y: &u64) -> u64 {
        PrimeField::sub(self, *x, *y)
    }
    fn mul(&self, x: &u64, y: &u64) -> u64 {
        PrimeField::mul(self, *x, *y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not declared in the POG")]
    Undeclared(u64),
    #[error("weights for variable {0} sum to zero")]
    ZeroNormalizer(u64),
    #[error("normalized weight of variable {0} is not a finite decimal")]
    NotRepresentable(u64),
    #[error("count is not a nonnegative integer: {0}")]
    NotAnInteger(String),
    #[error("POG has no root")]
    NoRoot,
}

/// Evaluates every node bottom-up, one value per node.
///
/// `weights[i]` is w(x) for input variable `i + 1`; w(x̄) is taken as 1 - w(x).
pub fn ring_eval_nodes<R: Ring>(pog: &Pog, ring: &R, weights: &[R::Elem]) -> Vec<R::Elem> {
    let mut values: Vec<R::Elem> = Vec::with_capacity(pog.nodes().len());
    for node in pog.nodes() {
        let v = match node {
            PogNode::Product { args, .. } => {
                let mut acc = ring.one();
                for &a in args {
                    acc = ring.mul(&acc, &lit_value(pog, ring, weights, &values, a));
                }
                acc
            }
            PogNode::Sum { left, right, .. } => ring.add(
                &lit_value(pog, ring, weights, &values, *left),
                &lit_value(pog, ring, weights, &values, *right),
            ),
        };
        values.push(v);
    }
    values
}

fn lit_value<R: Ring>(
    pog: &Pog,
    ring: &R,
    weights: &[R::Elem],
    values: &[R::Elem],
    lit: Lit,
) -> R::Elem {
    let base = match pog.node_index(lit.var()) {
        Some(i) => values[i].clone(),
        None => weights[lit.var().index() as usize - 1].clone(),
    };
    if lit.is_positive() {
        base
    } else {
        ring.sub(&ring.one(), &base)
    }
}

pub fn ring_eval<R: Ring>(
    pog: &Pog,
    lit: Lit,
    ring: &R,
    weights: &[R::Elem],
) -> Result<R::Elem, EvalError> {
    let v = lit.var();
    if !pog.is_input(v) && pog.node_index(v).is_none() {
        return Err(EvalError::Undeclared(v.index()));
    }
    let values = ring_eval_nodes(pog, ring, weights);
    Ok(lit_value(pog, ring, weights, &values, lit))
}

fn root_of(pog: &Pog) -> Result<Lit, EvalError> {
    pog.root().ok_or(EvalError::NoRoot)
}

/// Fraction of assignments over the declared inputs that satisfy the root.
pub fn density(pog: &Pog) -> Result<Q25, EvalError> {
    let weights = vec![Q25::half(); pog.input_var_count() as usize];
    ring_eval(pog, root_of(pog)?, &Q25Ring, &weights)
}

/// Number of models of the root over all declared input variables.
pub fn unweighted_count(pog: &Pog) -> Result<BigUint, EvalError> {
    let d = density(pog)?;
    let scaled = d.mul(&Q25::pow2(pog.input_var_count() as i64));
    match scaled.to_bigint() {
        Some(n) if !n.is_negative() => Ok(n.to_biguint().expect("nonnegative")),
        _ => Err(EvalError::NotAnInteger(scaled.to_decimal())),
    }
}

/// Literal weights with per-variable defaults: an absent pair means 1/2 each,
/// and a single given literal leaves 1 - W for its complement.
pub fn complete_weights(
    weights: &BTreeMap<Lit, Q25>,
    var_count: u64,
) -> Vec<(Q25, Q25)> {
    (1..=var_count)
        .map(|v| {
            let x = Var::new(v).expect("positive");
            let pos = weights.get(&x.positive()).cloned();
            let neg = weights.get(&x.negative()).cloned();
            match (pos, neg) {
                (Some(p), Some(n)) => (p, n),
                (Some(p), None) => {
                    let n = Q25::one().sub(&p);
                    (p, n)
                }
                (None, Some(n)) => (Q25::one().sub(&n), n),
                (None, None) => (Q25::half(), Q25::half()),
            }
        })
        .collect()
}

/// Sum over models of the product of literal weights W.
pub fn weighted_count(pog: &Pog, weights: &BTreeMap<Lit, Q25>) -> Result<Q25, EvalError> {
    let root = root_of(pog)?;
    let pairs = complete_weights(weights, pog.input_var_count());
    let mut normalized = Vec::with_capacity(pairs.len());
    let mut scale = Q25::one();
    for (i, (p, n)) in pairs.iter().enumerate() {
        let v = i as u64 + 1;
        let r = p.add(n);
        if r.is_zero() {
            return Err(EvalError::ZeroNormalizer(v));
        }
        normalized.push(p.checked_div(&r).ok_or(EvalError::NotRepresentable(v))?);
        scale = scale.mul(&r);
    }
    Ok(ring_eval(pog, root, &Q25Ring, &normalized)?.mul(&scale))
}

/// Pseudorandom field weights for variables `1..=var_count`, derived from `seed`.
pub fn hash_weights(field: &PrimeField, seed: u64, var_count: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..var_count)
        .map(|_| rng.gen_range(0..field.modulus()))
        .collect()
}

/// Ring evaluation of the root over a prime field with seeded random weights.
pub fn function_hash(pog: &Pog, field: &PrimeField, seed: u64) -> Result<u64, EvalError> {
    let weights = hash_weights(field, seed, pog.input_var_count());
    ring_eval(pog, root_of(pog)?, field, &weights)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct WeightParseError {
    pub line: usize,
    pub message: String,
}

/// Reads `<lit> <decimal>` lines. Lines in the `c p weight <lit> <decimal> 0` form are
/// also accepted; other `c` lines are comments.
pub fn parse_weights(text: &str) -> Result<BTreeMap<Lit, Q25>, WeightParseError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| WeightParseError {
            line: i + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let body: &[&str] = match toks.as_slice() {
            [] => continue,
            ["c", "p", "weight", rest @ ..] => match rest {
                [l, w, "0"] => &[l, w],
                _ => return Err(err(format!("malformed weight line `{line}`"))),
            },
            [first, ..] if first.starts_with('c') => continue,
            [l, w] => &[l, w],
            _ => return Err(err(format!("expected `<lit> <decimal>`, found `{line}`"))),
        };
        let lit = body[0]
            .parse::<i64>()
            .ok()
            .and_then(Lit::new)
            .ok_or_else(|| err(format!("bad literal `{}`", body[0])))?;
        let w = Q25::parse_decimal(body[1]).map_err(|e| err(e.to_string()))?;
        out.insert(lit, w);
    }
    Ok(out)
}

/// Converts the decimal strings attached to a CNF into weights.
pub fn weights_from_annotations(
    annotations: &BTreeMap<Lit, String>,
) -> Result<BTreeMap<Lit, Q25>, DecimalError> {
    annotations
        .iter()
        .map(|(l, s)| Ok((*l, Q25::parse_decimal(s)?)))
        .collect()
}

//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so iteration order
//! (and therefore everything built on top) is deterministic. Printing uses
//! degrevlex with the ring's declared variable order.

mod order;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{Field, ScalarError};

pub use order::{MonomialOrder, OrderKind};
pub use parse::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable {name:?}")]
    UnknownVariable { name: String },
    #[error("division by a non-constant at byte {pos}")]
    NonConstantDivision { pos: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("elementary symmetric degree {k} out of range for {n} variables")]
    DegreeOutOfRange { k: usize, n: usize },
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("no image given for variable {name:?}")]
    MissingAssignment { name: String },
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("{0:?} is not a permutation of the variables")]
    BadPrecedence(Vec<usize>),
    #[error("division is not exact")]
    NotDivisible,
}

/// Exponent vector, one slot per ring variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// `Some(v)` when this is a pure power `x_v^k`, `k ≥ 1`.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (v, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(v);
            }
        }
        found
    }

    pub fn render(&self, vars: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| if e == 1 { vars[v].clone() } else { format!("{}^{}", vars[v], e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// A coefficient field plus an ordered list of variable names.
#[derive(Clone, Debug)]
pub struct PolyRing<F: Field> {
    field: F,
    vars: Arc<Vec<String>>,
}

impl<F: Field> PartialEq for PolyRing<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars)
    }
}

impl<F: Field> PolyRing<F> {
    pub fn new<S: Into<String>>(field: F, vars: impl IntoIterator<Item = S>) -> Self {
        PolyRing { field, vars: Arc::new(vars.into_iter().map(Into::into).collect()) }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable { name: name.to_string() })
    }

    pub fn zero(&self) -> Polynomial<F> {
        Polynomial { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Polynomial<F> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: F::Elem) -> Polynomial<F> {
        self.term(Monomial::one(self.nvars()), c)
    }

    pub fn int(&self, n: i64) -> Polynomial<F> {
        self.constant(self.field.from_int(n))
    }

    pub fn term(&self, m: Monomial, c: F::Elem) -> Polynomial<F> {
        let mut terms = BTreeMap::new();
        if !self.field.is_zero(&c) {
            terms.insert(m, c);
        }
        Polynomial { ring: self.clone(), terms }
    }

    pub fn var(&self, v: usize) -> Polynomial<F> {
        self.term(Monomial::var(self.nvars(), v), self.field.one())
    }

    pub fn var_named(&self, name: &str) -> Result<Polynomial<F>, PolyError> {
        Ok(self.var(self.var_index(name)?))
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial<F>, PolyError> {
        parse_poly(text, self)
    }

    /// `e_k` of the given variables; `e_0 = 1`.
    pub fn elementary_symmetric(&self, k: usize, vars: &[usize]) -> Result<Polynomial<F>, PolyError> {
        let polys: Vec<Polynomial<F>> = vars.iter().map(|&v| self.var(v)).collect();
        elementary_symmetric_of(self, k, &polys)
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Polynomial<F> {
        let mut p = self.zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }
}

/// `e_k(p_1, …, p_m)` for arbitrary polynomials: the sum over all
/// `k`-element subsets of the product of their members.
pub fn elementary_symmetric_of<F: Field>(
    ring: &PolyRing<F>,
    k: usize,
    polys: &[Polynomial<F>],
) -> Result<Polynomial<F>, PolyError> {
    fn go<F: Field>(polys: &[Polynomial<F>], k: usize, prefix: &Polynomial<F>, acc: &mut Polynomial<F>) {
        if k == 0 {
            *acc = &*acc + prefix;
            return;
        }
        if polys.len() < k {
            return;
        }
        for i in 0..=polys.len() - k {
            go(&polys[i + 1..], k - 1, &(prefix * &polys[i]), acc);
        }
    }
    if k > polys.len() {
        return Err(PolyError::DegreeOutOfRange { k, n: polys.len() });
    }
    let mut acc = ring.zero();
    go(polys, k, &ring.one(), &mut acc);
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct Polynomial<F: Field> {
    ring: PolyRing<F>,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> PartialEq for Polynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl<F: Field> Polynomial<F> {
    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lex order of exponent vectors.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F::Elem)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.field.zero())
    }

    pub fn constant_term(&self) -> F::Elem {
        self.coefficient(&Monomial::one(self.ring.nvars()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Leading monomial and coefficient under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &F::Elem) {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = f.add(existing, c);
                if f.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Polynomial<F> {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return self.ring.zero();
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), f.mul(a, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Polynomial<F> {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return self.ring.zero();
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), f.mul(a, c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial<F> {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial_derivative(&self, v: usize) -> Polynomial<F> {
        let f = &self.ring.field;
        let mut out = self.ring.zero();
        for (m, c) in &self.terms {
            let e = m.exponents()[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[v] -= 1;
            out.add_term(Monomial::new(exps), &f.mul(c, &f.from_int(e as i64)));
        }
        out
    }

    pub fn partial_derivative_named(&self, name: &str) -> Result<Polynomial<F>, PolyError> {
        Ok(self.partial_derivative(self.ring.var_index(name)?))
    }

    /// Full composition `self(images[0], …, images[n-1])`; every image must
    /// live in `target`.
    pub fn compose(&self, images: &[Polynomial<F>], target: &PolyRing<F>) -> Result<Polynomial<F>, PolyError> {
        if images.len() != self.ring.nvars() {
            let name = self.ring.vars.get(images.len()).cloned().unwrap_or_default();
            return Err(PolyError::MissingAssignment { name });
        }
        if images.iter().any(|g| g.ring != *target) {
            return Err(PolyError::RingMismatch);
        }
        let assignment: Vec<Option<&Polynomial<F>>> = images.iter().map(Some).collect();
        self.compose_partial(&assignment, target)
    }

    /// Substitution by variable name. Variables of `self` that actually occur
    /// must all be assigned.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, Polynomial<F>>,
        target: &PolyRing<F>,
    ) -> Result<Polynomial<F>, PolyError> {
        if assignment.values().any(|g| g.ring != *target) {
            return Err(PolyError::RingMismatch);
        }
        let slots: Vec<Option<&Polynomial<F>>> = self.ring.vars.iter().map(|v| assignment.get(v)).collect();
        self.compose_partial(&slots, target)
    }

    fn compose_partial(
        &self,
        images: &[Option<&Polynomial<F>>],
        target: &PolyRing<F>,
    ) -> Result<Polynomial<F>, PolyError> {
        let n = self.ring.nvars();
        // powers[v][e] = images[v]^e, filled lazily
        let mut powers: Vec<Vec<Polynomial<F>>> = vec![vec![target.one()]; n];
        let mut out = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = images[v].ok_or_else(|| PolyError::MissingAssignment { name: self.ring.vars[v].clone() })?;
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().expect("nonempty") * img;
                    powers[v].push(next);
                }
                t = &t * &powers[v][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`; fails when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Polynomial<F>) -> Result<Polynomial<F>, PolyError> {
        let f = &self.ring.field;
        let (dm, dc) = divisor.terms.iter().next_back().ok_or(PolyError::NotDivisible)?;
        let dc_inv = f.inv(dc).ok_or(PolyError::NotDivisible)?;
        let mut rest = self.clone();
        let mut quot = self.ring.zero();
        // Lex order on exponent vectors is a monomial order, so the last map
        // entry is the leading term.
        while let Some((m, c)) = rest.terms.iter().next_back() {
            if !dm.divides(m) {
                return Err(PolyError::NotDivisible);
            }
            let qm = m.div(dm);
            let qc = f.mul(c, &dc_inv);
            rest = &rest - &divisor.mul_monomial(&qm, &qc);
            quot.add_term(qm, &qc);
        }
        Ok(quot)
    }

    /// Canonical text: terms in decreasing degrevlex order.
    pub fn to_canonical_string(&self) -> String {
        self.render(&MonomialOrder::degrevlex(self.ring.nvars()))
    }

    pub fn render(&self, order: &MonomialOrder) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &F::Elem)> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.compare(b.0, a.0));
        let f = &self.ring.field;
        let mut out = String::new();
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = f.is_negative(c);
            let mag = if negative { f.neg(c) } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if f.is_one(&mag) {
                out.push_str(&m.render(&self.ring.vars));
            } else {
                out.push_str(&format!("{}*{}", mag, m.render(&self.ring.vars)));
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl<F: Field> Add<&Polynomial<F>> for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        assert!(self.ring == rhs.ring, "ring mismatch in polynomial addition");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<F: Field> Sub<&Polynomial<F>> for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        assert!(self.ring == rhs.ring, "ring mismatch in polynomial subtraction");
        let f = &self.ring.field;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &f.neg(c));
        }
        out
    }
}

impl<F: Field> Mul<&Polynomial<F>> for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, rhs: &Polynomial<F>) -> Polynomial<F> {
        assert!(self.ring == rhs.ring, "ring mismatch in polynomial multiplication");
        let f = &self.ring.field;
        let mut out = self.ring.zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &f.mul(ca, cb));
            }
        }
        out
    }
}

impl<F: Field> Neg for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn neg(self) -> Polynomial<F> {
        let f = &self.ring.field;
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(c))).collect(),
        }
    }
}

/// Determinant of a square polynomial matrix by fraction-free (Bareiss)
/// elimination.
pub fn poly_det<F: Field>(ring: &PolyRing<F>, m: &[Vec<Polynomial<F>>]) -> Result<Polynomial<F>, PolyError> {
    let n = m.len();
    for (row, r) in m.iter().enumerate() {
        if r.len() != n {
            return Err(PolyError::Ragged { row, len: r.len(), expected: n });
        }
        if r.iter().any(|p| p.ring != *ring) {
            return Err(PolyError::RingMismatch);
        }
    }
    if n == 0 {
        return Ok(ring.one());
    }
    let mut a: Vec<Vec<Polynomial<F>>> = m.to_vec();
    let mut negate = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(ring.zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{PrimeField, Rational, Rationals};
    use proptest::prelude::*;

    fn ring(vars: &[&str]) -> PolyRing<Rationals> {
        PolyRing::new(Rationals, vars.iter().copied())
    }

    fn leibniz_det<F: Field>(ring: &PolyRing<F>, m: &[Vec<Polynomial<F>>]) -> Polynomial<F> {
        fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 0 {
                return vec![(vec![], false)];
            }
            let mut out = Vec::new();
            for (p, odd) in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    // Inserting the largest element at `pos` adds n-1-pos inversions.
                    out.push((q, odd ^ ((n - 1 - pos) % 2 == 1)));
                }
            }
            out
        }
        let mut acc = ring.zero();
        for (p, odd) in perms(m.len()) {
            let mut t = ring.one();
            for (i, &j) in p.iter().enumerate() {
                t = &t * &m[i][j];
            }
            acc = if odd { &acc - &t } else { &acc + &t };
        }
        acc
    }

    #[test]
    fn parse_examples() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        assert_eq!(r.parse("x + y").unwrap(), &x + &y);
        assert_eq!(r.parse("(x+y)^2 - x^2 - y^2").unwrap(), r.int(2).mul_monomial(&Monomial::new(vec![1, 1]), &Rational::one()));
        let expect = &(&x * &y) - &(&y * &y).scale(&"3/2".parse().unwrap());
        assert_eq!(r.parse("x*y - 3/2*y^2").unwrap(), expect);
    }

    #[test]
    fn canonical_printing() {
        let r = ring(&["x", "y"]);
        assert_eq!(r.parse("x*y - 3/2*y^2").unwrap().to_string(), "x*y - 3/2*y^2");
        assert_eq!(r.parse("1 - x^2 + y").unwrap().to_string(), "-x^2 + y + 1");
        assert_eq!(r.zero().to_string(), "0");
        assert_eq!(r.parse("-2/3").unwrap().to_string(), "-2/3");
    }

    #[test]
    fn elementary_symmetric_examples() {
        let r = ring(&["x", "y", "z"]);
        assert_eq!(r.elementary_symmetric(1, &[0, 1, 2]).unwrap(), r.parse("x+y+z").unwrap());
        assert_eq!(r.elementary_symmetric(2, &[0, 1, 2]).unwrap(), r.parse("x*y+x*z+y*z").unwrap());
        assert_eq!(r.elementary_symmetric(0, &[0, 1]).unwrap(), r.one());
        assert!(matches!(r.elementary_symmetric(3, &[0, 1]), Err(PolyError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn generating_function_identity() {
        for n in 0..=6usize {
            let mut names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            names.push("t".into());
            let r = PolyRing::new(Rationals, names);
            let t = r.var(n);
            let vars: Vec<usize> = (0..n).collect();
            let mut lhs = r.zero();
            for k in 0..=n {
                lhs = &lhs + &(&r.elementary_symmetric(k, &vars).unwrap() * &t.pow(k as u32));
            }
            let mut rhs = r.one();
            for v in 0..n {
                rhs = &rhs * &(&r.one() + &(&r.var(v) * &t));
            }
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn det_examples() {
        let r = ring(&["x", "y"]);
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(poly_det(&r, &[vec![p("1"), p("1")], vec![p("y"), p("0")]]).unwrap(), p("-y"));
        let id: Vec<Vec<_>> = (0..3).map(|i| (0..3).map(|j| r.int((i == j) as i64)).collect()).collect();
        assert_eq!(poly_det(&r, &id).unwrap(), r.one());
        assert_eq!(poly_det(&r, &[vec![p("x"), p("0")], vec![p("0"), p("y")]]).unwrap(), p("x*y"));
        assert!(matches!(poly_det(&r, &[vec![p("x"), p("0")], vec![p("0")]]), Err(PolyError::Ragged { .. })));
    }

    #[test]
    fn derivative_examples() {
        let r = ring(&["x", "y"]);
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(p("x^2*y").partial_derivative_named("x").unwrap(), p("2*x*y"));
        assert_eq!(p("y^3").partial_derivative_named("x").unwrap(), r.zero());
        assert_eq!(p("x*y").partial_derivative_named("y").unwrap(), p("x"));
        assert!(p("x").partial_derivative_named("z").is_err());
    }

    #[test]
    fn derivative_in_small_characteristic() {
        let r = PolyRing::new(PrimeField::new(3).unwrap(), ["x"]);
        assert!(r.parse("x^3").unwrap().partial_derivative(0).is_zero());
    }

    #[test]
    fn substitute_examples() {
        let r = ring(&["x", "y"]);
        let p = |s: &str| r.parse(s).unwrap();
        let mut a = BTreeMap::new();
        a.insert("x".to_string(), p("x+y"));
        assert_eq!(p("x^2").substitute(&a, &r).unwrap(), p("x^2 + 2*x*y + y^2"));

        let mut id = BTreeMap::new();
        id.insert("x".to_string(), p("x"));
        id.insert("y".to_string(), p("y"));
        assert_eq!(p("x+y").substitute(&id, &r).unwrap(), p("x+y"));

        let s = ring(&["u", "v"]);
        let mut uv = BTreeMap::new();
        uv.insert("x".to_string(), s.parse("u+v").unwrap());
        uv.insert("y".to_string(), s.parse("u-v").unwrap());
        assert_eq!(p("x*y").substitute(&uv, &s).unwrap(), s.parse("u^2 - v^2").unwrap());

        assert!(matches!(p("x*y").substitute(&a, &r), Err(PolyError::MissingAssignment { .. })));
    }

    #[test]
    fn exact_division() {
        let r = ring(&["x", "y"]);
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(p("x^2 - y^2").exact_div(&p("x - y")).unwrap(), p("x + y"));
        assert_eq!(p("x^2 + 1").exact_div(&p("x")), Err(PolyError::NotDivisible));
    }

    fn small_poly(r: PolyRing<Rationals>) -> impl Strategy<Value = Polynomial<Rationals>> {
        proptest::collection::vec((0u32..3, 0u32..3, -4i64..5), 0..5).prop_map(move |ts| {
            r.from_terms(ts.into_iter().map(|(a, b, c)| (Monomial::new(vec![a, b]), Rational::from(c))))
        })
    }

    fn matrix(r: PolyRing<Rationals>, n: usize) -> impl Strategy<Value = Vec<Vec<Polynomial<Rationals>>>> {
        proptest::collection::vec(proptest::collection::vec(small_poly(r), n), n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in small_poly(ring(&["x","y"])), b in small_poly(ring(&["x","y"])), c in small_poly(ring(&["x","y"]))) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn bareiss_matches_leibniz(m in (1usize..=4).prop_flat_map(|n| matrix(ring(&["x","y"]), n))) {
            let r = m[0][0].ring().clone();
            prop_assert_eq!(poly_det(&r, &m).unwrap(), leibniz_det(&r, &m));
        }

        #[test]
        fn substitution_composes(f in small_poly(ring(&["x","y"])), g0 in small_poly(ring(&["x","y"])), g1 in small_poly(ring(&["x","y"])), h0 in small_poly(ring(&["x","y"])), h1 in small_poly(ring(&["x","y"]))) {
            let r = f.ring().clone();
            let g = [g0, g1];
            let h = [h0, h1];
            let lhs = f.compose(&g, &r).unwrap().compose(&h, &r).unwrap();
            let gh: Vec<_> = g.iter().map(|gi| gi.compose(&h, &r).unwrap()).collect();
            prop_assert_eq!(lhs, f.compose(&gh, &r).unwrap());
        }

        #[test]
        fn print_parse_round_trip(p in small_poly(ring(&["x","y"]))) {
            let r = p.ring().clone();
            prop_assert_eq!(r.parse(&p.to_string()).unwrap(), p);
        }
    }
}

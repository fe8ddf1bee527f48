//! Symmetric bilinear forms and their classes in the Grothendieck-Witt ring.
//!
//! Over `Q` a class is pinned down by rank, signature, discriminant and the
//! Hasse invariants; over `F_p` (odd) by rank and discriminant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{
    factor_with_bound, is_prime, legendre_big, squarefree_part, BaseField, Field, PrimeField, Rational, ScalarError,
    SquareClass, DEFAULT_FACTOR_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GwError {
    #[error("the form is degenerate")]
    Degenerate,
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("classes live over different fields ({0} and {1})")]
    FieldMismatch(BaseField, BaseField),
    #[error("{0} is not a place of Q")]
    InvalidPlace(u64),
    #[error("Hilbert symbol of zero")]
    ZeroArgument,
    #[error("bad Gram matrix file: {0}")]
    Json(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A place of `Q`. Primes sort before infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A symmetric matrix over a field of characteristic other than 2.
#[derive(Clone, Debug, PartialEq)]
pub struct GramForm<F: Field> {
    field: F,
    entries: Vec<Vec<F::Elem>>,
}

impl<F: Field> GramForm<F> {
    pub fn new(field: F, entries: Vec<Vec<F::Elem>>) -> Result<Self, GwError> {
        let n = entries.len();
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(GwError::Ragged { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(GwError::NotSymmetric { i, j });
                }
            }
        }
        Ok(GramForm { field, entries })
    }

    pub fn from_integers(field: F, rows: &[Vec<i64>]) -> Result<Self, GwError> {
        let entries = rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect();
        GramForm::new(field, entries)
    }

    pub fn diagonal(field: F, diag: Vec<F::Elem>) -> Self {
        let n = diag.len();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i].clone() } else { field.zero() }).collect())
            .collect();
        GramForm { field, entries }
    }

    /// Parses a JSON array of arrays whose entries are integers or strings
    /// holding rationals such as `"-3/2"`.
    pub fn from_json(field: F, text: &str) -> Result<Self, GwError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| GwError::Json(e.to_string()))?;
        let rows = value.as_array().ok_or_else(|| GwError::Json("expected an array of rows".into()))?;
        let mut entries = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| GwError::Json(format!("row {i} is not an array")))?;
            let mut out = Vec::with_capacity(row.len());
            for (j, x) in row.iter().enumerate() {
                let q: Rational = match x {
                    serde_json::Value::Number(n) => match n.as_i64() {
                        Some(k) => Rational::from(k),
                        None => return Err(GwError::Json(format!("entry ({i}, {j}) is not an integer; quote rationals as strings"))),
                    },
                    serde_json::Value::String(s) => {
                        s.trim().parse().map_err(|e: ScalarError| GwError::Json(format!("entry ({i}, {j}): {e}")))?
                    }
                    _ => return Err(GwError::Json(format!("entry ({i}, {j}) is neither a number nor a string"))),
                };
                out.push(field.from_rational(&q)?);
            }
            entries.push(out);
        }
        GramForm::new(field, entries)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn entries(&self) -> &[Vec<F::Elem>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// `T·G·Tᵀ`.
    pub fn congruent(&self, t: &[Vec<F::Elem>]) -> Self {
        let f = &self.field;
        let n = self.size();
        let dot = |a: &dyn Fn(usize) -> F::Elem, b: &dyn Fn(usize) -> F::Elem| {
            (0..n).fold(f.zero(), |acc, k| f.add(&acc, &f.mul(&a(k), &b(k))))
        };
        let tg: Vec<Vec<F::Elem>> =
            (0..n).map(|i| (0..n).map(|j| dot(&|k| t[i][k].clone(), &|k| self.entries[k][j].clone())).collect()).collect();
        let entries = (0..n).map(|i| (0..n).map(|j| dot(&|k| tg[i][k].clone(), &|k| t[j][k].clone())).collect()).collect();
        GramForm { field: self.field.clone(), entries }
    }
}

/// Diagonal entries of a diagonal matrix congruent to `g`.
pub fn diagonalize<F: Field>(g: &GramForm<F>) -> Result<Vec<F::Elem>, GwError> {
    let f = &g.field;
    let n = g.size();
    let mut m = g.entries.clone();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = (k..n).find(|&i| !f.is_zero(&m[i][i]));
        let pivot = match pivot {
            Some(i) => i,
            None => {
                let Some((i, j)) = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| i != j && !f.is_zero(&m[i][j]))
                else {
                    return Err(GwError::Degenerate);
                };
                // b_i <- b_i + b_j
                for c in 0..n {
                    m[i][c] = f.add(&m[i][c], &m[j][c]);
                }
                for r in 0..n {
                    m[r][i] = f.add(&m[r][i], &m[r][j]);
                }
                i
            }
        };
        m.swap(k, pivot);
        for row in m.iter_mut() {
            row.swap(k, pivot);
        }
        let d = m[k][k].clone();
        let dinv = f.inv(&d).expect("pivot is nonzero");
        for r in k + 1..n {
            if f.is_zero(&m[r][k]) {
                continue;
            }
            let factor = f.mul(&m[r][k], &dinv);
            for c in k..n {
                let v = f.mul(&factor, &m[k][c]);
                m[r][c] = f.sub(&m[r][c], &v);
            }
        }
        for r in k + 1..n {
            m[r][k] = f.zero();
            m[k][r] = f.zero();
        }
        out.push(d);
    }
    Ok(out)
}

/// Hilbert symbol `(a, b)_v` over `Q`. No factoring is needed.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> Result<i8, GwError> {
    if a.is_zero() || b.is_zero() {
        return Err(GwError::ZeroArgument);
    }
    match place {
        Place::Infinity => Ok(if a.signum() < 0 && b.signum() < 0 { -1 } else { 1 }),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(GwError::InvalidPlace(p));
            }
            Ok(hilbert_local(unit_part(a, p), unit_part(b, p), p))
        }
    }
}

/// Writes `a = p^k·u` with `u` a `p`-adic unit and returns `(k mod 2, u')`
/// where `u'` is an integer in the same class as `u` modulo squares of units.
fn unit_part(a: &Rational, p: u64) -> (u32, BigInt) {
    let bp = BigInt::from(p);
    let mut k = 0i64;
    let mut strip = |mut n: BigInt, step: i64| {
        while n.is_multiple_of(&bp) {
            n /= &bp;
            k += step;
        }
        n
    };
    let num = strip(a.numer().clone(), 1);
    let den = strip(a.denom().clone(), -1);
    // num/den and num·den differ by the square of a unit
    (k.rem_euclid(2) as u32, num * den)
}

fn mod8(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(8)).to_u64().expect("residue fits")
}

/// `(p^α·u, p^β·v)_p` for units `u`, `v` and `α, β ∈ {0, 1}`.
fn hilbert_local((alpha, u): (u32, BigInt), (beta, v): (u32, BigInt), p: u64) -> i8 {
    if p == 2 {
        let eps = |x: &BigInt| ((mod8(x) - 1) / 2) % 2;
        let omega = |x: &BigInt| {
            let r = mod8(x);
            ((r * r - 1) / 8) % 2
        };
        let e = eps(&u) * eps(&v) + alpha as u64 * omega(&v) + beta as u64 * omega(&u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let mut s: i8 = 1;
    if alpha == 1 && beta == 1 && (p - 1) / 2 % 2 == 1 {
        s = -s;
    }
    if beta == 1 {
        s *= legendre_big(&u, p).expect("odd prime");
    }
    if alpha == 1 {
        s *= legendre_big(&v, p).expect("odd prime");
    }
    s
}

/// Hilbert symbol on square-class representatives.
pub fn hilbert_classes(a: &SquareClass, b: &SquareClass, place: Place) -> Result<i8, GwError> {
    hilbert_symbol(&a.as_rational(), &b.as_rational(), place)
}

/// Hasse invariant `Π_{i<j} (d_i, d_j)_v` of a rational diagonal.
fn hasse_of(diag: &[Rational], place: Place) -> Result<i8, GwError> {
    let mut h = 1i8;
    match place {
        Place::Infinity => {
            let neg = diag.iter().filter(|d| d.signum() < 0).count();
            if (neg * neg.saturating_sub(1) / 2) % 2 == 1 {
                h = -1;
            }
        }
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(GwError::InvalidPlace(p));
            }
            let parts: Vec<(u32, BigInt)> = diag.iter().map(|d| unit_part(d, p)).collect();
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    h *= hilbert_local(parts[i].clone(), parts[j].clone(), p);
                }
            }
        }
    }
    Ok(h)
}

/// A class in GW(K), stored with its diagonal square classes and invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GWClass {
    pub base: BaseField,
    pub diagonal: Vec<SquareClass>,
    pub rank: usize,
    /// Present over `Q` only.
    pub signature: Option<i64>,
    pub discriminant: SquareClass,
    /// Hasse invariants at 2, infinity and odd primes dividing a diagonal
    /// entry; every other place has invariant 1. Empty over `F_p`.
    pub hasse: BTreeMap<Place, i8>,
}

/// Places where a diagonal over `Q` can have nontrivial Hasse invariant.
fn relevant_places(diag: &[SquareClass]) -> BTreeSet<Place> {
    let mut places: BTreeSet<Place> = [Place::Prime(2), Place::Infinity].into_iter().collect();
    for d in diag {
        places.extend(d.primes().iter().map(|&p| Place::Prime(p)));
    }
    places
}

fn f_p_minus_one(p: u64) -> SquareClass {
    let f = PrimeField::new(p).expect("valid prime field");
    f.square_class(&f.element(-1)).expect("nonzero")
}

impl GWClass {
    /// Builds the class of `⟨d_1, …, d_n⟩`.
    pub fn from_diagonal(base: BaseField, diagonal: Vec<SquareClass>) -> Result<Self, GwError> {
        let rank = diagonal.len();
        let discriminant = diagonal.iter().fold(SquareClass::one(), |acc, d| acc.mul(d));
        match base {
            BaseField::Rationals => {
                let signature = diagonal.iter().map(|d| d.sign() as i64).sum();
                let mut hasse = BTreeMap::new();
                for place in relevant_places(&diagonal) {
                    let mut h = 1i8;
                    for i in 0..rank {
                        for j in i + 1..rank {
                            h *= hilbert_classes(&diagonal[i], &diagonal[j], place)?;
                        }
                    }
                    hasse.insert(place, h);
                }
                Ok(GWClass { base, diagonal, rank, signature: Some(signature), discriminant, hasse })
            }
            BaseField::Prime(p) => {
                let nonres = PrimeField::new(p)?.nonresidue();
                for d in &diagonal {
                    if !(d.is_one() || (d.sign() > 0 && d.primes() == [nonres])) {
                        return Err(GwError::Json(format!("{d} is not a square-class representative of F_{p}")));
                    }
                }
                Ok(GWClass { base, diagonal, rank, signature: None, discriminant, hasse: BTreeMap::new() })
            }
        }
    }

    /// `m·⟨1⟩ + n·⟨−1⟩`.
    pub fn units(base: BaseField, plus: usize, minus: usize) -> Self {
        let minus_one = match base {
            BaseField::Rationals => SquareClass::minus_one(),
            BaseField::Prime(p) => f_p_minus_one(p),
        };
        let mut diag = vec![SquareClass::one(); plus];
        diag.extend(std::iter::repeat(minus_one).take(minus));
        GWClass::from_diagonal(base, diag).expect("unit classes are valid")
    }

    /// The hyperbolic form `⟨1⟩ + ⟨−1⟩`.
    pub fn hyperbolic(base: BaseField) -> Self {
        GWClass::units(base, 1, 1)
    }

    pub fn zero(base: BaseField) -> Self {
        GWClass::units(base, 0, 0)
    }

    /// `⟨1⟩` repeated `plus` times, `⟨−1⟩` repeated `minus` times, plus the
    /// residual classes.
    pub fn from_shape(base: BaseField, plus: usize, minus: usize, residual: &[SquareClass]) -> Result<Self, GwError> {
        let mut c = GWClass::units(base, plus, minus).diagonal;
        c.extend(residual.iter().cloned());
        GWClass::from_diagonal(base, c)
    }

    pub fn hasse_at(&self, place: Place) -> i8 {
        self.hasse.get(&place).copied().unwrap_or(1)
    }

    /// `(p, q, residual)` as described by [`recognize_units`].
    pub fn recognize_units(&self) -> Option<UnitDecomposition> {
        recognize_units(self)
    }

    /// `"p<1> + q<-1> + r<a>"`, omitting zero counts. `None` when
    /// [`recognize_units`] fails or there are no unit summands.
    pub fn named(&self) -> Option<String> {
        let dec = self.recognize_units()?;
        if dec.plus == 0 && dec.minus == 0 && !dec.residual.is_empty() {
            return None;
        }
        Some(dec.to_string())
    }

    /// `"<d1, d2, ...>"`.
    pub fn diagonal_string(&self) -> String {
        let parts: Vec<String> = self.diagonal.iter().map(|d| d.to_string()).collect();
        format!("<{}>", parts.join(", "))
    }

    pub fn invariants_string(&self) -> String {
        let mut s = format!("rank {}", self.rank);
        if let Some(sig) = self.signature {
            s.push_str(&format!(", signature {sig}"));
        }
        s.push_str(&format!(", discriminant {}", self.discriminant));
        if !self.hasse.is_empty() {
            let h: Vec<String> = self.hasse.iter().map(|(p, v)| format!("{p}: {v}")).collect();
            s.push_str(&format!(", hasse {{{}}}", h.join(", ")));
        }
        s
    }
}

impl fmt::Display for GWClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.named() {
            Some(n) => f.write_str(&n),
            None => write!(f, "{} ({})", self.diagonal_string(), self.invariants_string()),
        }
    }
}

/// Classifies a nondegenerate symmetric form.
///
/// Over `Q`, when a diagonal entry resists factoring, the invariants are read
/// off the unit parts of the entries at the primes of the entry denominators
/// and of the determinant, and the stored diagonal is a small one with the
/// same invariants.
pub fn classify<F: Field>(g: &GramForm<F>) -> Result<GWClass, GwError> {
    let f = g.field();
    let diag = diagonalize(g)?;
    let classes = diag.iter().map(|d| f.square_class(d)).collect::<Result<Vec<_>, _>>();
    match classes {
        Ok(classes) => GWClass::from_diagonal(f.base(), classes),
        Err(err @ ScalarError::FactorBoundExceeded { .. }) => {
            let to_q = |x: &F::Elem| f.to_rational(x);
            let entries: Option<Vec<Vec<Rational>>> =
                g.entries().iter().map(|row| row.iter().map(to_q).collect()).collect();
            let diag: Option<Vec<Rational>> = diag.iter().map(to_q).collect();
            match (entries, diag) {
                (Some(entries), Some(diag)) => classify_unfactored(&entries, &diag).ok_or(GwError::Scalar(err)),
                _ => Err(err.into()),
            }
        }
        Err(err) => Err(err.into()),
    }
}

/// Invariants of `⟨diag⟩`, where `diag` diagonalizes `entries`, found
/// without factoring the diagonal entries.
fn classify_unfactored(entries: &[Vec<Rational>], diag: &[Rational]) -> Option<GWClass> {
    let n = diag.len();
    let mut lcm = BigInt::one();
    for x in entries.iter().flatten() {
        lcm = lcm.lcm(x.denom());
    }
    let det = diag.iter().fold(Rational::one(), |acc, d| &acc * d);
    // the form is unimodular at every odd prime not dividing these
    let mut primes: BTreeSet<u64> = [2].into_iter().collect();
    for m in [&lcm, det.numer()] {
        let factors = factor_with_bound(m.magnitude(), DEFAULT_FACTOR_BOUND).ok()?;
        primes.extend(factors.into_iter().map(|(p, _)| p));
    }
    let discriminant = squarefree_part(&det).ok()?;
    let signature: i64 = diag.iter().map(|d| d.signum() as i64).sum();
    let mut places: BTreeSet<Place> = primes.iter().map(|&p| Place::Prime(p)).collect();
    places.insert(Place::Infinity);
    let target: BTreeMap<Place, i8> =
        places.iter().map(|&v| hasse_of(diag, v).map(|h| (v, h))).collect::<Result<_, _>>().ok()?;
    let matches = |c: &GWClass| {
        c.signature == Some(signature)
            && c.discriminant == discriminant
            && c.hasse.keys().chain(target.keys()).all(|v| c.hasse_at(*v) == target.get(v).copied().unwrap_or(1))
    };
    if n <= 1 {
        let c = GWClass::from_diagonal(BaseField::Rationals, vec![discriminant.clone(); n]).ok()?;
        return matches(&c).then_some(c);
    }
    // k⟨1⟩ + l⟨−1⟩ + ⟨a, b⟩ with the binary part fixing disc and Hasse
    let base: Vec<u64> = primes.iter().copied().collect();
    let mut alphas = signed_products(&base);
    alphas.push(SquareClass::one());
    alphas.push(SquareClass::minus_one());
    for q in (3..AUXILIARY_PRIME_LIMIT).filter(|&q| is_prime(q) && !primes.contains(&q)) {
        let aux = SquareClass::from_parts(1, vec![q]);
        alphas.extend(signed_products(&base).iter().map(|a| a.mul(&aux)));
        alphas.push(aux.clone());
        alphas.push(aux.negate());
    }
    for a in &alphas {
        for l in 0..=n - 2 {
            let k = n - 2 - l;
            let mut b = discriminant.mul(a);
            if l % 2 == 1 {
                b = b.negate();
            }
            if k as i64 - l as i64 + a.sign() as i64 + b.sign() as i64 != signature {
                continue;
            }
            let c = GWClass::from_shape(BaseField::Rationals, k, l, &[a.clone(), b]).ok()?;
            if matches(&c) {
                return Some(c);
            }
        }
    }
    None
}

const AUXILIARY_PRIME_LIMIT: u64 = 200;

/// `±Π S` over subsets `S` of `primes`, including `±1`; empty when there are
/// too many primes to enumerate.
fn signed_products(primes: &[u64]) -> Vec<SquareClass> {
    let mut out = Vec::new();
    if primes.len() > MAX_SUBSET_PRIMES {
        return out;
    }
    for mask in 0u32..(1 << primes.len()) {
        let chosen: Vec<u64> = (0..primes.len()).filter(|&i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        out.push(SquareClass::from_parts(1, chosen.clone()));
        out.push(SquareClass::from_parts(-1, chosen));
    }
    out
}

/// Equality in GW(K), decided by invariants.
pub fn gw_equal(a: &GWClass, b: &GWClass) -> Result<bool, GwError> {
    if a.base != b.base {
        return Err(GwError::FieldMismatch(a.base, b.base));
    }
    if a.rank != b.rank || a.discriminant != b.discriminant || a.signature != b.signature {
        return Ok(false);
    }
    let places: BTreeSet<Place> = a.hasse.keys().chain(b.hasse.keys()).copied().collect();
    Ok(places.into_iter().all(|p| a.hasse_at(p) == b.hasse_at(p)))
}

pub fn gw_sum(a: &GWClass, b: &GWClass) -> Result<GWClass, GwError> {
    if a.base != b.base {
        return Err(GwError::FieldMismatch(a.base, b.base));
    }
    let mut d = a.diagonal.clone();
    d.extend(b.diagonal.iter().cloned());
    GWClass::from_diagonal(a.base, d)
}

pub fn gw_product(a: &GWClass, b: &GWClass) -> Result<GWClass, GwError> {
    if a.base != b.base {
        return Err(GwError::FieldMismatch(a.base, b.base));
    }
    let mut d = Vec::with_capacity(a.rank * b.rank);
    for x in &a.diagonal {
        for y in &b.diagonal {
            d.push(reduce_class(a.base, &x.mul(y))?);
        }
    }
    GWClass::from_diagonal(a.base, d)
}

/// Canonical representative of a square class over `base`.
fn reduce_class(base: BaseField, c: &SquareClass) -> Result<SquareClass, GwError> {
    match base {
        BaseField::Rationals => Ok(c.clone()),
        BaseField::Prime(p) => {
            let f = PrimeField::new(p)?;
            let v = f.from_rational(&c.as_rational())?;
            Ok(f.square_class(&v)?)
        }
    }
}

/// `plus·⟨1⟩ + minus·⟨−1⟩ + Σ residual`, with the residual empty or `r`
/// copies of one class other than `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitDecomposition {
    pub plus: usize,
    pub minus: usize,
    pub residual: Vec<SquareClass>,
}

impl fmt::Display for UnitDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.plus > 0 {
            parts.push(format!("{}<1>", self.plus));
        }
        if self.minus > 0 {
            parts.push(format!("{}<-1>", self.minus));
        }
        if let Some(a) = self.residual.first() {
            parts.push(format!("{}<{a}>", self.residual.len()));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

const MAX_SUBSET_PRIMES: usize = 12;

fn candidate_alphas(c: &GWClass) -> Vec<SquareClass> {
    let mut set: BTreeSet<SquareClass> = BTreeSet::new();
    set.extend(c.diagonal.iter().cloned());
    set.insert(c.discriminant.clone());
    set.insert(c.discriminant.negate());
    let mut primes: BTreeSet<u64> = [2].into_iter().collect();
    for d in &c.diagonal {
        primes.extend(d.primes().iter().copied());
    }
    let primes: Vec<u64> = primes.into_iter().collect();
    set.extend(signed_products(&primes));
    let mut out: Vec<SquareClass> = set.into_iter().filter(|a| !(a.primes().is_empty())).collect();
    out.sort_by(|a, b| a.value().abs().cmp(&b.value().abs()).then(b.sign().cmp(&a.sign())));
    out
}

/// Writes a class over `Q` as `p⟨1⟩ + q⟨−1⟩ + r⟨α⟩` with `r` as small as
/// possible. `None` over `F_p` or when no such shape fits.
pub fn recognize_units(c: &GWClass) -> Option<UnitDecomposition> {
    if c.base != BaseField::Rationals {
        return None;
    }
    let n = c.rank as i64;
    let sig = c.signature?;
    let try_shape = |r: i64, alpha: Option<&SquareClass>| -> Option<UnitDecomposition> {
        let sa = alpha.map_or(0, |a| a.sign() as i64);
        let twice_p = n - r + sig - r * sa;
        if twice_p < 0 || twice_p % 2 != 0 {
            return None;
        }
        let p = twice_p / 2;
        let q = n - r - p;
        if q < 0 {
            return None;
        }
        let residual: Vec<SquareClass> = alpha.map_or(Vec::new(), |a| vec![a.clone(); r as usize]);
        let candidate = GWClass::from_shape(BaseField::Rationals, p as usize, q as usize, &residual).ok()?;
        gw_equal(&candidate, c)
            .ok()?
            .then_some(UnitDecomposition { plus: p as usize, minus: q as usize, residual })
    };
    if let Some(d) = try_shape(0, None) {
        return Some(d);
    }
    let alphas = candidate_alphas(c);
    for r in 1..=n {
        for a in &alphas {
            if let Some(d) = try_shape(r, Some(a)) {
                return Some(d);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rationals;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn sc(n: i64) -> SquareClass {
        SquareClass::of_integer(n).unwrap()
    }

    fn diag_q(ds: &[i64]) -> GWClass {
        GWClass::from_diagonal(BaseField::Rationals, ds.iter().map(|&d| sc(d)).collect()).unwrap()
    }

    fn form(rows: &[Vec<i64>]) -> GramForm<Rationals> {
        GramForm::from_integers(Rationals, rows).unwrap()
    }

    #[test]
    fn diagonalize_examples() {
        let d = diagonalize(&form(&[vec![0, 1], vec![1, 0]])).unwrap();
        let classes: Vec<SquareClass> = d.iter().map(|x| squarefree_part(x).unwrap()).collect();
        assert_eq!(classes, vec![sc(2), sc(-2)]);
        assert_eq!(diagonalize(&form(&[vec![1, 0], vec![0, -1]])).unwrap(), vec![q(1), q(-1)]);
        assert_eq!(diagonalize(&form(&[vec![2]])).unwrap(), vec![q(2)]);
        assert_eq!(diagonalize(&form(&[vec![1, 1], vec![1, 1]])).unwrap_err(), GwError::Degenerate);
        assert_eq!(diagonalize(&form(&[vec![0, 0], vec![0, 0]])).unwrap_err(), GwError::Degenerate);
        assert!(matches!(GramForm::from_integers(Rationals, &[vec![0, 1], vec![2, 0]]), Err(GwError::NotSymmetric { .. })));
    }

    #[test]
    fn hilbert_symbol_examples() {
        for place in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5)] {
            for b in [-6, -1, 2, 3, 7] {
                assert_eq!(hilbert_symbol(&q(1), &q(b), place).unwrap(), 1);
            }
        }
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(3)).unwrap(), 1);
        assert_eq!(hilbert_symbol(&q(2), &q(3), Place::Prime(4)).unwrap_err(), GwError::InvalidPlace(4));
        assert_eq!(hilbert_symbol(&q(0), &q(3), Place::Prime(3)).unwrap_err(), GwError::ZeroArgument);
    }

    /// Brute force: a primitive solution of z² = a x² + b y² modulo `m`.
    fn brute_symbol(a: i64, b: i64, p: u64, m: i64) -> i8 {
        let p = p as i64;
        let sq: Vec<i64> = (0..m).map(|t| t * t % m).collect();
        for x in 0..m {
            for y in 0..m {
                let rhs = (a * sq[x as usize] + b * sq[y as usize]).rem_euclid(m);
                for z in 0..m {
                    if (x % p != 0 || y % p != 0 || z % p != 0) && sq[z as usize] == rhs {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn hilbert_symbol_matches_brute_force() {
        let squarefree: Vec<i64> = (-15i64..=15)
            .filter(|&n| n != 0 && sc(n).value() == BigInt::from(n))
            .collect();
        for (p, m) in [(2u64, 64i64), (3, 9), (5, 25), (7, 49)] {
            for &a in &squarefree {
                for &b in &squarefree {
                    if p == 2 && (a.abs() > 10 || b.abs() > 10) {
                        continue;
                    }
                    let got = hilbert_symbol(&q(a), &q(b), Place::Prime(p)).unwrap();
                    assert_eq!(got, brute_symbol(a, b, p, m), "({a}, {b})_{p}");
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let h = classify(&form(&[vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!((h.rank, h.signature, h.discriminant.clone()), (2, Some(0), sc(-1)));
        assert!(gw_equal(&h, &GWClass::hyperbolic(BaseField::Rationals)).unwrap());
        let one = classify(&form(&[vec![1]])).unwrap();
        assert_eq!((one.rank, one.signature, one.discriminant), (1, Some(1), sc(1)));
        let c = classify(&form(&[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, -3]])).unwrap();
        assert_eq!((c.rank, c.signature, c.discriminant), (3, Some(1), sc(-6)));
    }

    #[test]
    fn equality_examples() {
        assert!(gw_equal(&diag_q(&[2, -2]), &diag_q(&[1, -1])).unwrap());
        assert!(!gw_equal(&diag_q(&[1, 1]), &diag_q(&[1, -1])).unwrap());
        assert!(!gw_equal(&diag_q(&[2]), &diag_q(&[1])).unwrap());
        // same rank, signature and discriminant; differ at the Hasse invariant
        assert!(!gw_equal(&diag_q(&[1, 1]), &diag_q(&[3, 3])).unwrap());
        assert!(gw_equal(&diag_q(&[1, 1]), &diag_q(&[2, 2])).unwrap());
        assert!(gw_equal(&diag_q(&[1, 1]), &diag_q(&[5, 5])).unwrap());
        let fp = GWClass::units(BaseField::Prime(5), 1, 0);
        assert!(matches!(gw_equal(&fp, &diag_q(&[1])), Err(GwError::FieldMismatch(..))));
    }

    #[test]
    fn recognize_examples() {
        let h2 = gw_sum(&GWClass::hyperbolic(BaseField::Rationals), &GWClass::hyperbolic(BaseField::Rationals)).unwrap();
        let h4 = gw_sum(&h2, &h2).unwrap();
        let got = recognize_units(&h4).unwrap();
        assert_eq!((got.plus, got.minus, got.residual.len()), (4, 4, 0));
        let d = recognize_units(&diag_q(&[1, 1, -1, 2, -2, 1])).unwrap();
        assert_eq!(d, UnitDecomposition { plus: 4, minus: 2, residual: vec![] });
        assert_eq!(d.to_string(), "4<1> + 2<-1>");
        let d = recognize_units(&diag_q(&[1, 2, 2, -1, 3, 6])).unwrap();
        assert_eq!((d.plus, d.minus, d.residual.len()), (4, 1, 1));
        assert!(gw_equal(&GWClass::from_shape(BaseField::Rationals, d.plus, d.minus, &d.residual).unwrap(), &diag_q(&[1, 2, 2, -1, 3, 6])).unwrap());
        assert_eq!(recognize_units(&diag_q(&[3, 3])).unwrap(), UnitDecomposition { plus: 0, minus: 0, residual: vec![sc(3), sc(3)] });
        assert_eq!(diag_q(&[2]).to_string(), "<2> (rank 1, signature 1, discriminant 2, hasse {2: 1, inf: 1})");
        assert_eq!(diag_q(&[1, 1, -1]).to_string(), "2<1> + 1<-1>");
    }

    #[test]
    fn prime_field_classes() {
        let f = PrimeField::new(5).unwrap();
        let g = GramForm::from_integers(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        let c = classify(&g).unwrap();
        assert_eq!(c.signature, None);
        assert!(gw_equal(&c, &GWClass::hyperbolic(BaseField::Prime(5))).unwrap());
        // -1 is a square mod 5, so H = 2<1>
        assert!(gw_equal(&c, &GWClass::units(BaseField::Prime(5), 2, 0)).unwrap());
        let f7 = PrimeField::new(7).unwrap();
        let g = GramForm::from_integers(f7, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!gw_equal(&classify(&g).unwrap(), &GWClass::hyperbolic(BaseField::Prime(7))).unwrap());
        assert_eq!(recognize_units(&c), None);
    }

    #[test]
    fn unfactorable_pivots_still_classify() {
        // N is a product of two primes near 2^40 and 2^41, so <N> has no
        // computable square class, but the forms below are unimodular away
        // from 2 and 5
        let n = BigInt::from(1_099_511_627_791u64) * BigInt::from(2_199_023_255_579u64);
        let big = Rational::from_integer(n);
        let z = Rational::zero;
        let g = GramForm::new(Rationals, vec![vec![big.clone(), q(1)], vec![q(1), z()]]).unwrap();
        assert!(matches!(squarefree_part(&diagonalize(&g).unwrap()[0]), Err(ScalarError::FactorBoundExceeded { .. })));
        assert!(gw_equal(&classify(&g).unwrap(), &GWClass::hyperbolic(BaseField::Rationals)).unwrap());
        let rows = vec![vec![big, q(1), z()], vec![q(1), z(), z()], vec![z(), z(), q(5)]];
        let c = classify(&GramForm::new(Rationals, rows).unwrap()).unwrap();
        assert!(gw_equal(&c, &diag_q(&[1, -1, 5])).unwrap());
        assert_eq!(c.to_string(), "1<1> + 1<-1> + 1<5>");
    }

    #[test]
    fn json_input() {
        let g = GramForm::from_json(Rationals, r#"[[0, "1/2"], ["1/2", 0]]"#).unwrap();
        assert_eq!(g.entries()[0][1], Rational::new(1, 2).unwrap());
        assert!(matches!(GramForm::from_json(Rationals, "[[1.5]]"), Err(GwError::Json(_))));
        assert!(matches!(GramForm::from_json(Rationals, "[[1, 2]]"), Err(GwError::Ragged { .. })));
        assert!(matches!(GramForm::from_json(Rationals, "{"), Err(GwError::Json(_))));
    }

    #[test]
    fn reciprocity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut pick = || {
                let n: i64 = rng.gen_range(1..5000) * if rng.gen_bool(0.5) { -1 } else { 1 };
                let d: i64 = rng.gen_range(1..300);
                Rational::new(n, d).unwrap()
            };
            let (a, b) = (pick(), pick());
            let (ca, cb) = (squarefree_part(&a).unwrap(), squarefree_part(&b).unwrap());
            let mut places: BTreeSet<Place> = relevant_places(&[ca.clone(), cb.clone()]);
            places.insert(Place::Prime(3));
            let product: i8 = places.iter().map(|&v| hilbert_symbol(&a, &b, v).unwrap()).product();
            assert_eq!(product, 1, "reciprocity fails for ({a}, {b})");
            // symmetry and (a, b c) = (a, b)(a, c)
            let c = pick();
            for &v in &places {
                assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), hilbert_symbol(&b, &a, v).unwrap());
                let bc = &b * &c;
                assert_eq!(
                    hilbert_symbol(&a, &bc, v).unwrap(),
                    hilbert_symbol(&a, &b, v).unwrap() * hilbert_symbol(&a, &c, v).unwrap()
                );
            }
        }
    }

    fn arb_nonzero() -> impl Strategy<Value = i64> {
        prop_oneof![-60i64..=-1, 1i64..=60]
    }

    fn arb_unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        // product of a unit lower and a unit upper triangular matrix
        (
            proptest::collection::vec(-2i64..=2, n * n),
            proptest::collection::vec(-2i64..=2, n * n),
        )
            .prop_map(move |(l, u)| {
                let lower = |i: usize, j: usize| if i == j { 1 } else if i > j { l[i * n + j] } else { 0 };
                let upper = |i: usize, j: usize| if i == j { 1 } else if i < j { u[i * n + j] } else { 0 };
                (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| lower(i, k) * upper(k, j)).sum()).collect()).collect()
            })
    }

    proptest! {
        #[test]
        fn congruence_leaves_class_unchanged(
            diag in proptest::collection::vec(arb_nonzero(), 4),
            t in arb_unimodular(4)
        ) {
            let g = GramForm::diagonal(Rationals, diag.iter().map(|&d| q(d)).collect());
            let tq: Vec<Vec<Rational>> = t.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let h = g.congruent(&tq);
            prop_assert!(gw_equal(&classify(&g).unwrap(), &classify(&h).unwrap()).unwrap());
        }

        #[test]
        fn hyperbolic_absorbs(diag in proptest::collection::vec(arb_nonzero(), 1..5)) {
            let c = GWClass::from_diagonal(BaseField::Rationals, diag.iter().map(|&d| sc(d)).collect()).unwrap();
            let h = GWClass::hyperbolic(BaseField::Rationals);
            let prod = gw_product(&h, &c).unwrap();
            let copies = (0..c.rank).fold(GWClass::zero(BaseField::Rationals), |acc, _| gw_sum(&acc, &h).unwrap());
            prop_assert!(gw_equal(&prod, &copies).unwrap());
        }

        #[test]
        fn a_plus_minus_a_is_hyperbolic(a in arb_nonzero(), den in 1i64..50) {
            let r = Rational::new(a, den).unwrap();
            let c = GWClass::from_diagonal(
                BaseField::Rationals,
                vec![squarefree_part(&r).unwrap(), squarefree_part(&-&r).unwrap()],
            ).unwrap();
            prop_assert!(gw_equal(&c, &GWClass::hyperbolic(BaseField::Rationals)).unwrap());
        }

        #[test]
        fn recognition_round_trips(p in 0usize..4, m in 0usize..4, r in 0usize..3, alpha in arb_nonzero()) {
            let a = sc(alpha);
            let c = GWClass::from_shape(BaseField::Rationals, p, m, &vec![a; r]).unwrap();
            let d = recognize_units(&c).unwrap();
            prop_assert!(d.residual.len() <= r);
            let back = GWClass::from_shape(BaseField::Rationals, d.plus, d.minus, &d.residual).unwrap();
            prop_assert!(gw_equal(&back, &c).unwrap());
        }
    }
}

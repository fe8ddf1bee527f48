//! Gröbner bases and finite-dimensional quotient algebras `K[x]/I`.
//!
//! Buchberger's algorithm with the product and chain criteria and normal
//! pair selection. Inside the engine a polynomial is a vector of terms sorted
//! by decreasing order key; reduction uses a `BTreeMap` keyed by order key as
//! a max-heap that also merges equal monomials.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::poly::{Monomial, MonomialOrder, PolyError, PolyRing, Polynomial};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalgError {
    #[error("no generators given")]
    Empty,
    #[error("the ideal is the unit ideal; the quotient is zero")]
    UnitIdeal,
    #[error("quotient is infinite-dimensional: no leading monomial is a pure power of {variable}")]
    Infinite { variable: String },
    #[error("monomial order has {order} variables but the ring has {ring}")]
    OrderMismatch { order: usize, ring: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type Key = Vec<i32>;

#[derive(Clone, Debug)]
struct Term<E> {
    key: Key,
    mono: Monomial,
    coeff: E,
}

/// Terms sorted by decreasing key; the first term is the leading one.
#[derive(Clone, Debug)]
struct SPoly<E> {
    terms: Vec<Term<E>>,
}

impl<E> SPoly<E> {
    fn lead(&self) -> &Term<E> {
        &self.terms[0]
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn add_keys(a: &[i32], b: &[i32]) -> Key {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

struct Engine<'a, F: Field> {
    field: &'a F,
    order: &'a MonomialOrder,
}

impl<F: Field> Engine<'_, F> {
    fn convert(&self, p: &Polynomial<F>) -> SPoly<F::Elem> {
        let mut terms: Vec<Term<F::Elem>> = p
            .terms()
            .map(|(m, c)| Term { key: self.order.sort_key(m), mono: m.clone(), coeff: c.clone() })
            .collect();
        terms.sort_by(|a, b| b.key.cmp(&a.key));
        SPoly { terms }
    }

    fn make_monic(&self, s: &mut SPoly<F::Elem>) {
        let inv = self.field.inv(&s.lead().coeff).expect("leading coefficient is nonzero");
        if self.field.is_one(&inv) {
            return;
        }
        for t in &mut s.terms {
            t.coeff = self.field.mul(&t.coeff, &inv);
        }
    }

    /// `c·q·p` with `q` a monomial.
    fn shifted(&self, p: &SPoly<F::Elem>, q: &Monomial, c: &F::Elem) -> SPoly<F::Elem> {
        let qkey = self.order.sort_key(q);
        SPoly {
            terms: p
                .terms
                .iter()
                .map(|t| Term { key: add_keys(&t.key, &qkey), mono: t.mono.mul(q), coeff: self.field.mul(&t.coeff, c) })
                .collect(),
        }
    }

    fn s_polynomial(&self, f: &SPoly<F::Elem>, g: &SPoly<F::Elem>) -> SPoly<F::Elem> {
        let l = f.lead().mono.lcm(&g.lead().mono);
        let one = self.field.one();
        let a = self.shifted(f, &l.div(&f.lead().mono), &one);
        let b = self.shifted(g, &l.div(&g.lead().mono), &self.field.neg(&one));
        // merge, dropping the cancelled leading terms
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            let take = match (a.terms.get(i), b.terms.get(j)) {
                (Some(x), Some(y)) => x.key.cmp(&y.key),
                (Some(_), None) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Less,
            };
            match take {
                std::cmp::Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = self.field.add(&a.terms[i].coeff, &b.terms[j].coeff);
                    if !self.field.is_zero(&c) {
                        out.push(Term { coeff: c, ..a.terms[i].clone() });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        SPoly { terms: out }
    }

    /// Fully reduces `p` modulo the monic polynomials `basis`. With
    /// `tail_only` the leading term of `p` is kept and only lower terms are
    /// reduced.
    fn reduce(&self, p: &SPoly<F::Elem>, basis: &[&SPoly<F::Elem>], tail_only: bool) -> SPoly<F::Elem> {
        let field = self.field;
        let mut work: BTreeMap<Key, (Monomial, F::Elem)> = BTreeMap::new();
        let mut out = Vec::new();
        let mut iter = p.terms.iter();
        if tail_only {
            if let Some(t) = iter.next() {
                out.push(t.clone());
            }
        }
        for t in iter {
            work.insert(t.key.clone(), (t.mono.clone(), t.coeff.clone()));
        }
        while let Some((key, (mono, coeff))) = work.pop_last() {
            let Some(g) = basis.iter().find(|g| g.lead().mono.divides(&mono)) else {
                out.push(Term { key, mono, coeff });
                continue;
            };
            let q = mono.div(&g.lead().mono);
            let qkey: Key = key.iter().zip(&g.lead().key).map(|(a, b)| a - b).collect();
            for t in &g.terms[1..] {
                let c = field.mul(&t.coeff, &coeff);
                match work.entry(add_keys(&t.key, &qkey)) {
                    Entry::Occupied(mut e) => {
                        let s = field.sub(&e.get().1, &c);
                        if field.is_zero(&s) {
                            e.remove();
                        } else {
                            e.get_mut().1 = s;
                        }
                    }
                    Entry::Vacant(e) => {
                        e.insert((t.mono.mul(&q), field.neg(&c)));
                    }
                }
            }
        }
        SPoly { terms: out }
    }
}

/// A reduced Gröbner basis: monic generators sorted by decreasing leading
/// monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    ring: PolyRing<F>,
    order: MonomialOrder,
    generators: Vec<Polynomial<F>>,
    internal: Arc<Vec<SPoly<F::Elem>>>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn generators(&self) -> &[Polynomial<F>] {
        &self.generators
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.internal.iter().map(|g| g.lead().mono.clone()).collect()
    }

    fn engine(&self) -> Engine<'_, F> {
        Engine { field: self.ring.field(), order: &self.order }
    }

    pub fn normal_form(&self, p: &Polynomial<F>) -> Polynomial<F> {
        assert!(p.ring() == &self.ring, "polynomial is not over the basis ring");
        let e = self.engine();
        let refs: Vec<&SPoly<F::Elem>> = self.internal.iter().collect();
        let r = e.reduce(&e.convert(p), &refs, false);
        self.ring.from_terms(r.terms.into_iter().map(|t| (t.mono, t.coeff)))
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.internal.iter().any(|g| g.lead().mono.divides(m))
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner<F: Field>(gens: &[Polynomial<F>], order: &MonomialOrder) -> Result<GroebnerBasis<F>, LocalgError> {
    let ring = gens.first().ok_or(LocalgError::Empty)?.ring().clone();
    if gens.iter().any(|g| g.ring() != &ring) {
        return Err(PolyError::RingMismatch.into());
    }
    if order.nvars() != ring.nvars() {
        return Err(LocalgError::OrderMismatch { order: order.nvars(), ring: ring.nvars() });
    }
    let e = Engine { field: ring.field(), order };
    let mut basis: Vec<SPoly<F::Elem>> = Vec::new();
    // pending pairs, ordered by lcm key then indices (normal selection)
    let mut queue: BTreeSet<(Key, usize, usize)> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let insert = |h: SPoly<F::Elem>,
                      basis: &mut Vec<SPoly<F::Elem>>,
                      queue: &mut BTreeSet<(Key, usize, usize)>,
                      pending: &mut HashSet<(usize, usize)>|
     -> Result<(), LocalgError> {
        if h.lead().mono.is_one() {
            return Err(LocalgError::UnitIdeal);
        }
        let n = basis.len();
        for (i, g) in basis.iter().enumerate() {
            if g.lead().mono.is_coprime(&h.lead().mono) {
                continue;
            }
            let l = g.lead().mono.lcm(&h.lead().mono);
            queue.insert((order.sort_key(&l), i, n));
            pending.insert((i, n));
        }
        basis.push(h);
        Ok(())
    };

    for g in gens {
        let refs: Vec<&SPoly<F::Elem>> = basis.iter().collect();
        let mut h = e.reduce(&e.convert(g), &refs, false);
        if h.is_zero() {
            continue;
        }
        e.make_monic(&mut h);
        insert(h, &mut basis, &mut queue, &mut pending)?;
    }
    if basis.is_empty() {
        // the zero ideal; nothing to reduce against
        return Ok(GroebnerBasis { ring, order: order.clone(), generators: Vec::new(), internal: Arc::new(Vec::new()) });
    }

    while let Some((_, i, j)) = queue.pop_first() {
        pending.remove(&(i, j));
        let l = basis[i].lead().mono.lcm(&basis[j].lead().mono);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lead().mono.divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = e.s_polynomial(&basis[i], &basis[j]);
        let refs: Vec<&SPoly<F::Elem>> = basis.iter().collect();
        let mut h = e.reduce(&s, &refs, false);
        if h.is_zero() {
            continue;
        }
        e.make_monic(&mut h);
        insert(h, &mut basis, &mut queue, &mut pending)?;
    }

    // minimal basis: drop elements whose leading monomial is divisible by
    // another's (on ties keep the earliest)
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|k| {
                k != i && basis[k].lead().mono.divides(&basis[i].lead().mono) && (basis[k].lead().mono != basis[i].lead().mono || k < i)
            })
        })
        .collect();
    let minimal: Vec<&SPoly<F::Elem>> = keep.iter().map(|&i| &basis[i]).collect();
    let mut reduced: Vec<SPoly<F::Elem>> = minimal
        .iter()
        .enumerate()
        .map(|(idx, g)| {
            let others: Vec<&SPoly<F::Elem>> =
                minimal.iter().enumerate().filter(|&(k, _)| k != idx).map(|(_, h)| *h).collect();
            e.reduce(g, &others, true)
        })
        .collect();
    reduced.sort_by(|a, b| b.lead().key.cmp(&a.lead().key));
    let generators = reduced.iter().map(|s| ring.from_terms(s.terms.iter().map(|t| (t.mono.clone(), t.coeff.clone())))).collect();
    Ok(GroebnerBasis { ring, order: order.clone(), generators, internal: Arc::new(reduced) })
}

pub fn normal_form<F: Field>(p: &Polynomial<F>, gb: &GroebnerBasis<F>) -> Polynomial<F> {
    gb.normal_form(p)
}

/// A residue class in a [`QuotientPresentation`], as coordinates over the
/// standard monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement<F: Field> {
    coords: Vec<F::Elem>,
}

impl<F: Field> AlgebraElement<F> {
    pub fn coordinates(&self) -> &[F::Elem] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self, field: &F) -> bool {
        self.coords.iter().all(|c| field.is_zero(c))
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        AlgebraElement { coords: self.coords.iter().map(|a| field.mul(a, c)).collect() }
    }
}

/// `K[x]/I` for a zero-dimensional ideal, with standard monomials listed in
/// increasing order (so `1` comes first).
#[derive(Debug)]
pub struct QuotientPresentation<F: Field> {
    basis: GroebnerBasis<F>,
    standard: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    cache: Mutex<HashMap<Monomial, Arc<Vec<F::Elem>>>>,
}

pub fn quotient_presentation<F: Field>(gb: &GroebnerBasis<F>) -> Result<QuotientPresentation<F>, LocalgError> {
    let ring = gb.ring();
    let n = ring.nvars();
    let leads = gb.leading_monomials();
    if leads.iter().any(Monomial::is_one) {
        return Err(LocalgError::UnitIdeal);
    }
    for v in 0..n {
        if !leads.iter().any(|m| m.pure_power_var() == Some(v)) {
            return Err(LocalgError::Infinite { variable: ring.vars()[v].clone() });
        }
    }
    let mut seen: HashSet<Monomial> = HashSet::new();
    let mut queue = VecDeque::from([Monomial::one(n)]);
    seen.insert(Monomial::one(n));
    let mut standard = Vec::new();
    while let Some(m) = queue.pop_front() {
        for v in 0..n {
            let next = m.mul(&Monomial::var(n, v));
            if !seen.contains(&next) && gb.is_standard(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
        standard.push(m);
    }
    let order = gb.order();
    standard.sort_by_key(|m| order.sort_key(m));
    let index = standard.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    Ok(QuotientPresentation { basis: gb.clone(), standard, index, cache: Mutex::new(HashMap::new()) })
}

pub fn origin_supported<F: Field>(q: &QuotientPresentation<F>) -> bool {
    q.origin_supported()
}

impl<F: Field> QuotientPresentation<F> {
    /// Gröbner basis of `gens` under `order`, then its quotient.
    pub fn of_ideal(gens: &[Polynomial<F>], order: &MonomialOrder) -> Result<Self, LocalgError> {
        quotient_presentation(&groebner(gens, order)?)
    }

    pub fn basis(&self) -> &GroebnerBasis<F> {
        &self.basis
    }

    pub fn ring(&self) -> &PolyRing<F> {
        self.basis.ring()
    }

    pub fn field(&self) -> &F {
        self.basis.ring().field()
    }

    pub fn standard_monomials(&self) -> &[Monomial] {
        &self.standard
    }

    pub fn dimension(&self) -> usize {
        self.standard.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn normal_form(&self, p: &Polynomial<F>) -> Polynomial<F> {
        self.basis.normal_form(p)
    }

    fn monomial_coords(&self, m: &Monomial) -> Arc<Vec<F::Elem>> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(m) {
            return hit.clone();
        }
        let field = self.field();
        let mut coords = vec![field.zero(); self.dimension()];
        match self.index.get(m) {
            Some(&i) => coords[i] = field.one(),
            None => {
                let nf = self.basis.normal_form(&self.ring().term(m.clone(), field.one()));
                for (mono, c) in nf.terms() {
                    coords[self.index[mono]] = c.clone();
                }
            }
        }
        let coords = Arc::new(coords);
        self.cache.lock().expect("cache lock").insert(m.clone(), coords.clone());
        coords
    }

    pub fn element(&self, p: &Polynomial<F>) -> AlgebraElement<F> {
        assert!(p.ring() == self.ring(), "polynomial is not over the quotient ring");
        let field = self.field();
        let mut coords = vec![field.zero(); self.dimension()];
        for (m, c) in p.terms() {
            for (slot, x) in coords.iter_mut().zip(self.monomial_coords(m).iter()) {
                if !field.is_zero(x) {
                    *slot = field.add(slot, &field.mul(c, x));
                }
            }
        }
        AlgebraElement { coords }
    }

    pub fn to_polynomial(&self, a: &AlgebraElement<F>) -> Polynomial<F> {
        self.ring().from_terms(self.standard.iter().cloned().zip(a.coords.iter().cloned()))
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement<F> {
        let field = self.field();
        let mut coords = vec![field.zero(); self.dimension()];
        coords[i] = field.one();
        AlgebraElement { coords }
    }

    /// Coordinates of `b_i·b_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> AlgebraElement<F> {
        let m = self.standard[i].mul(&self.standard[j]);
        AlgebraElement { coords: self.monomial_coords(&m).as_ref().clone() }
    }

    pub fn mul(&self, a: &AlgebraElement<F>, b: &AlgebraElement<F>) -> AlgebraElement<F> {
        let field = self.field();
        let mut coords = vec![field.zero(); self.dimension()];
        for (i, x) in a.coords.iter().enumerate().filter(|(_, x)| !field.is_zero(x)) {
            for (j, y) in b.coords.iter().enumerate().filter(|(_, y)| !field.is_zero(y)) {
                let xy = field.mul(x, y);
                let m = self.standard[i].mul(&self.standard[j]);
                for (slot, z) in coords.iter_mut().zip(self.monomial_coords(&m).iter()) {
                    if !field.is_zero(z) {
                        *slot = field.add(slot, &field.mul(&xy, z));
                    }
                }
            }
        }
        AlgebraElement { coords }
    }

    /// Every variable is nilpotent, i.e. the zero set of the ideal is the
    /// origin alone.
    pub fn origin_supported(&self) -> bool {
        let n = self.ring().nvars();
        let d = self.dimension() as u32;
        (0..n).all(|v| {
            let mut e = vec![0; n];
            e[v] = d;
            self.monomial_coords(&Monomial::new(e)).iter().all(|c| self.field().is_zero(c))
        })
    }

    pub fn staircase_report(&self) -> String {
        self.to_string()
    }
}

impl<F: Field> fmt::Display for QuotientPresentation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.ring().vars();
        let leads: Vec<String> = self.basis.leading_monomials().iter().map(|m| m.render(vars)).collect();
        let std: Vec<String> = self.standard.iter().map(|m| m.render(vars)).collect();
        writeln!(f, "leading monomials: {}", leads.join(", "))?;
        write!(f, "standard monomials ({}): {}", self.dimension(), std.join(", "))
    }
}

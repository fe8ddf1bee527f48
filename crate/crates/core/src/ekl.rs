//! The EKL pipeline: socle element `E = det(a_ij)`, a functional `φ` with
//! `φ(E) = 1`, and the class of the bilinear form `(a, b) ↦ φ(ab)` on the
//! local algebra.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gw::{classify, GWClass, GramForm, GwError};
use crate::localg::{AlgebraElement, LocalgError, QuotientPresentation};
use crate::poly::{poly_det, Monomial, MonomialOrder, PolyError, PolyRing, Polynomial};
use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EklError {
    #[error("component {component} has a nonzero constant term")]
    ConstantTerm { component: usize },
    #[error("{components} components for {variables} variables; the map must be square")]
    NotSquare { components: usize, variables: usize },
    #[error("maps live over different rings")]
    RingMismatch,
    #[error("the zero set of the map is not concentrated at the origin")]
    NotSupportedAtOrigin,
    #[error("the socle element vanishes in the local algebra")]
    ZeroSocle,
    #[error("the functional does not see the socle element at standard monomial {index}")]
    BadFunctional { index: usize },
    #[error("the bilinear form is degenerate")]
    Degenerate,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Localg(#[from] LocalgError),
    #[error(transparent)]
    Gw(GwError),
}

impl From<GwError> for EklError {
    fn from(e: GwError) -> Self {
        match e {
            GwError::Degenerate => EklError::Degenerate,
            other => EklError::Gw(other),
        }
    }
}

/// A polynomial map `K^n → K^n` vanishing at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec<F: Field> {
    ring: PolyRing<F>,
    components: Vec<Polynomial<F>>,
}

impl<F: Field> MapSpec<F> {
    pub fn new(ring: PolyRing<F>, components: Vec<Polynomial<F>>) -> Result<Self, EklError> {
        if components.len() != ring.nvars() {
            return Err(EklError::NotSquare { components: components.len(), variables: ring.nvars() });
        }
        for (i, c) in components.iter().enumerate() {
            if c.ring() != &ring {
                return Err(EklError::RingMismatch);
            }
            if !ring.field().is_zero(&c.constant_term()) {
                return Err(EklError::ConstantTerm { component: i });
            }
        }
        Ok(MapSpec { ring, components })
    }

    pub fn parse<S: AsRef<str>>(field: F, variables: &[S], components: &[S]) -> Result<Self, EklError> {
        let ring = PolyRing::new(field, variables.iter().map(|v| v.as_ref().to_string()));
        let comps = components.iter().map(|c| ring.parse(c.as_ref())).collect::<Result<Vec<_>, _>>()?;
        MapSpec::new(ring, comps)
    }

    /// `x ↦ A·x`.
    pub fn linear(ring: PolyRing<F>, a: &[Vec<F::Elem>]) -> Result<Self, EklError> {
        let comps = a
            .iter()
            .map(|row| {
                ring.from_terms(row.iter().enumerate().map(|(j, c)| (Monomial::var(ring.nvars(), j), c.clone())))
            })
            .collect();
        MapSpec::new(ring, comps)
    }

    pub fn identity(ring: PolyRing<F>) -> Self {
        let comps = (0..ring.nvars()).map(|v| ring.var(v)).collect();
        MapSpec { ring, components: comps }
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn components(&self) -> &[Polynomial<F>] {
        &self.components
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn to_file(&self) -> MapSpecFile {
        MapSpecFile {
            variables: self.ring.vars().to_vec(),
            components: self.components.iter().map(Polynomial::to_canonical_string).collect(),
            comment: None,
        }
    }
}

/// JSON form of a map: `{"variables": [...], "components": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecFile {
    pub variables: Vec<String>,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

impl MapSpecFile {
    pub fn to_map<F: Field>(&self, field: F) -> Result<MapSpec<F>, EklError> {
        MapSpec::parse(field, &self.variables, &self.components)
    }
}

/// Which variable a monomial is charged to when splitting `f_i = Σ a_ij x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SplitRule {
    /// The smallest-index variable occurring in the monomial.
    #[default]
    Smallest,
    /// The largest-index variable occurring in the monomial.
    Largest,
}

pub fn linear_decompose<F: Field>(f: &MapSpec<F>) -> Result<Vec<Vec<Polynomial<F>>>, EklError> {
    linear_decompose_with(f, SplitRule::Smallest)
}

pub fn linear_decompose_with<F: Field>(f: &MapSpec<F>, rule: SplitRule) -> Result<Vec<Vec<Polynomial<F>>>, EklError> {
    let ring = &f.ring;
    let n = ring.nvars();
    let mut out = Vec::with_capacity(n);
    for (i, comp) in f.components.iter().enumerate() {
        let mut row: Vec<Vec<(Monomial, F::Elem)>> = vec![Vec::new(); n];
        for (m, c) in comp.terms() {
            let e = m.exponents();
            let mut support = (0..n).filter(|&j| e[j] > 0);
            let j = match rule {
                SplitRule::Smallest => support.next(),
                SplitRule::Largest => support.last(),
            }
            .ok_or(EklError::ConstantTerm { component: i })?;
            row[j].push((m.div(&Monomial::var(n, j)), c.clone()));
        }
        out.push(row.into_iter().map(|ts| ring.from_terms(ts)).collect());
    }
    Ok(out)
}

pub fn jacobian_matrix<F: Field>(f: &MapSpec<F>) -> Vec<Vec<Polynomial<F>>> {
    f.components.iter().map(|c| (0..f.nvars()).map(|j| c.partial_derivative(j)).collect()).collect()
}

/// The coefficient matrix together with `E` and `J` in the local algebra.
#[derive(Clone, Debug)]
pub struct SocleData<F: Field> {
    pub coefficient_matrix: Vec<Vec<Polynomial<F>>>,
    pub socle: AlgebraElement<F>,
    pub jacobian: AlgebraElement<F>,
}

impl<F: Field> SocleData<F> {
    /// Whether `J = dim·E`. Returns `None` when the characteristic divides
    /// the dimension, where the relation carries no information.
    pub fn jacobian_relation(&self, field: &F) -> Option<bool> {
        let dim = self.socle.dimension() as u64;
        let p = field.characteristic();
        if p != 0 && dim % p == 0 {
            return None;
        }
        let d = field.from_int(dim as i64);
        Some(self.socle.scale(field, &d) == self.jacobian)
    }
}

pub fn socle_element<F: Field>(f: &MapSpec<F>, q: &QuotientPresentation<F>) -> Result<AlgebraElement<F>, EklError> {
    let e = q.element(&poly_det(&f.ring, &linear_decompose(f)?)?);
    if e.is_zero(f.ring.field()) {
        return Err(EklError::ZeroSocle);
    }
    Ok(e)
}

pub fn jacobian_element<F: Field>(f: &MapSpec<F>, q: &QuotientPresentation<F>) -> Result<AlgebraElement<F>, EklError> {
    Ok(q.element(&poly_det(&f.ring, &jacobian_matrix(f))?))
}

pub fn socle_data<F: Field>(f: &MapSpec<F>, q: &QuotientPresentation<F>) -> Result<SocleData<F>, EklError> {
    let coefficient_matrix = linear_decompose(f)?;
    let socle = q.element(&poly_det(&f.ring, &coefficient_matrix)?);
    if socle.is_zero(f.ring.field()) {
        return Err(EklError::ZeroSocle);
    }
    let jacobian = jacobian_element(f, q)?;
    Ok(SocleData { coefficient_matrix, socle, jacobian })
}

#[derive(Clone, Debug, Default)]
pub struct EklOptions {
    /// Monomial order for the Gröbner basis; degrevlex when `None`.
    pub order: Option<MonomialOrder>,
    /// Compute Gram entries on the rayon pool.
    pub parallel: bool,
}

#[derive(Debug)]
pub struct EklResult<F: Field> {
    pub quotient: QuotientPresentation<F>,
    pub socle: SocleData<F>,
    /// Index of the standard monomial dual to `φ`.
    pub functional_index: usize,
    pub gram: GramForm<F>,
    pub gw_class: GWClass,
}

impl<F: Field> EklResult<F> {
    pub fn dimension(&self) -> usize {
        self.quotient.dimension()
    }
}

pub fn ekl_degree<F: Field>(f: &MapSpec<F>) -> Result<EklResult<F>, EklError> {
    ekl_degree_with(f, &EklOptions::default())
}

pub fn ekl_degree_with<F: Field>(f: &MapSpec<F>, opts: &EklOptions) -> Result<EklResult<F>, EklError> {
    ekl_degree_inner(f, opts, None)
}

/// As [`ekl_degree_with`], with `φ` dual to standard monomial `index`.
pub fn ekl_degree_with_functional<F: Field>(
    f: &MapSpec<F>,
    opts: &EklOptions,
    index: usize,
) -> Result<EklResult<F>, EklError> {
    ekl_degree_inner(f, opts, Some(index))
}

fn ekl_degree_inner<F: Field>(f: &MapSpec<F>, opts: &EklOptions, index: Option<usize>) -> Result<EklResult<F>, EklError> {
    let order = opts.order.clone().unwrap_or_else(|| MonomialOrder::degrevlex(f.nvars()));
    let quotient = QuotientPresentation::of_ideal(&f.components, &order)?;
    if !quotient.origin_supported() {
        return Err(EklError::NotSupportedAtOrigin);
    }
    let socle = socle_data(f, &quotient)?;
    let field = f.ring.field();
    let e = socle.socle.coordinates();
    let functional_index = match index {
        Some(i) if i < e.len() && !field.is_zero(&e[i]) => i,
        Some(i) => return Err(EklError::BadFunctional { index: i }),
        None => (0..e.len()).rev().find(|&i| !field.is_zero(&e[i])).ok_or(EklError::ZeroSocle)?,
    };
    let scale = field.inv(&e[functional_index]).expect("nonzero coordinate");
    let gram = gram_matrix(&quotient, functional_index, &scale, opts.parallel)?;
    let gw_class = classify(&gram)?;
    Ok(EklResult { quotient, socle, functional_index, gram, gw_class })
}

fn gram_matrix<F: Field>(
    q: &QuotientPresentation<F>,
    index: usize,
    scale: &F::Elem,
    parallel: bool,
) -> Result<GramForm<F>, EklError> {
    let field = q.field();
    let d = q.dimension();
    let row = |i: usize| -> Vec<F::Elem> {
        (0..d).map(|j| field.mul(&q.product_of_basis(i, j).coordinates()[index], scale)).collect()
    };
    let entries: Vec<Vec<F::Elem>> =
        if parallel { (0..d).into_par_iter().map(row).collect() } else { (0..d).map(row).collect() };
    Ok(GramForm::new(field.clone(), entries)?)
}

/// `f ∘ g`.
pub fn compose_maps<F: Field>(f: &MapSpec<F>, g: &MapSpec<F>) -> Result<MapSpec<F>, EklError> {
    if f.nvars() != g.nvars() || f.ring.field() != g.ring.field() {
        return Err(EklError::RingMismatch);
    }
    let comps = f
        .components
        .iter()
        .map(|c| c.compose(&g.components, &g.ring))
        .collect::<Result<Vec<_>, _>>()?;
    MapSpec::new(g.ring.clone(), comps)
}

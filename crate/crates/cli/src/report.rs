//! Printable reports. Every number is an exact string.

use std::fmt;

use serde::Serialize;

use ekl_core::ekl::{EklResult, MapSpec, MapSpecFile};
use ekl_core::gw::GWClass;
use ekl_core::localg::{AlgebraElement, QuotientPresentation};
use ekl_core::quotmap::{ExpectedGw, QuotientSpec};
use ekl_core::scalar::{Field, SquareClass};

fn coords<F: Field>(a: &AlgebraElement<F>) -> Vec<String> {
    a.coordinates().iter().map(|c| c.to_string()).collect()
}

fn monomials<F: Field>(q: &QuotientPresentation<F>) -> Vec<String> {
    q.standard_monomials().iter().map(|m| m.render(q.ring().vars())).collect()
}

/// The full result of `ekl degree`.
#[derive(Serialize, Debug)]
pub struct DegreeReport {
    pub field: String,
    pub input: MapSpecFile,
    pub dimension: usize,
    pub standard_monomials: Vec<String>,
    /// `E` in standard-monomial coordinates.
    pub socle: Vec<String>,
    /// `J` in standard-monomial coordinates.
    pub jacobian: Vec<String>,
    /// The standard monomial whose dual coordinate is `φ`.
    pub functional: String,
    pub gram: Vec<Vec<String>>,
    pub class: GWClass,
    /// Present exactly when the class was recognized as a sum of units.
    pub named: Option<String>,
}

impl DegreeReport {
    pub fn new<F: Field>(map: &MapSpec<F>, r: &EklResult<F>) -> Self {
        let standard_monomials = monomials(&r.quotient);
        DegreeReport {
            field: r.gw_class.base.to_string(),
            input: map.to_file(),
            dimension: r.dimension(),
            functional: standard_monomials[r.functional_index].clone(),
            standard_monomials,
            socle: coords(&r.socle.socle),
            jacobian: coords(&r.socle.jacobian),
            gram: r.gram.entries().iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect(),
            named: r.gw_class.named(),
            class: r.gw_class.clone(),
        }
    }
}

/// The result of `ekl quotient`: computed class, prediction and verdict.
#[derive(Serialize, Debug)]
pub struct QuotientReport {
    pub family: String,
    pub field: String,
    pub map: MapSpecFile,
    pub expected_degree: u64,
    pub dimension: usize,
    pub computed: String,
    pub invariants: String,
    pub predicted: String,
    pub expected: ExpectedGw,
    /// The square class `α` that makes the prediction hold.
    pub alpha: Option<SquareClass>,
    pub matches: bool,
}

impl QuotientReport {
    pub fn new<F: Field>(spec: &QuotientSpec<F>, r: &EklResult<F>) -> Self {
        let expected = spec.expected_gw();
        let alpha = expected.matches(&r.gw_class);
        QuotientReport {
            family: spec.family().to_string(),
            field: r.gw_class.base.to_string(),
            map: spec.to_file(),
            expected_degree: spec.expected_degree(),
            dimension: r.dimension(),
            computed: r.gw_class.to_string(),
            invariants: r.gw_class.invariants_string(),
            predicted: expected.to_string(),
            expected,
            matches: alpha.is_some() && r.dimension() as u64 == spec.expected_degree(),
            alpha,
        }
    }
}

impl fmt::Display for QuotientReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family: {}", self.family)?;
        writeln!(f, "field: {}", self.field)?;
        writeln!(f, "variables: {}", self.map.variables.join(", "))?;
        for (i, c) in self.map.components.iter().enumerate() {
            writeln!(f, "p{}: {c}", i + 1)?;
        }
        writeln!(f, "degree: {} (expected {})", self.dimension, self.expected_degree)?;
        writeln!(f, "computed: {}", self.computed)?;
        writeln!(f, "invariants: {}", self.invariants)?;
        writeln!(f, "predicted: {}", self.predicted)?;
        if let (false, Some(a)) = (self.expected.alpha_known, &self.alpha) {
            writeln!(f, "alpha: {a}")?;
        }
        write!(f, "verdict: {}", if self.matches { "MATCH" } else { "MISMATCH" })
    }
}

/// The result of `ekl gw classify`.
#[derive(Serialize, Debug)]
pub struct GramReport {
    pub diagonal: String,
    pub invariants: String,
    pub named: Option<String>,
    pub class: GWClass,
}

impl GramReport {
    pub fn new(c: &GWClass) -> Self {
        GramReport {
            diagonal: c.diagonal_string(),
            invariants: c.invariants_string(),
            named: c.named(),
            class: c.clone(),
        }
    }
}

impl fmt::Display for GramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "diagonal: {}", self.diagonal)?;
        write!(f, "invariants: {}", self.invariants)?;
        if let Some(n) = &self.named {
            write!(f, "\nnamed: {n}")?;
        }
        Ok(())
    }
}

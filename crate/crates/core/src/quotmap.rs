//! Quotient maps between invariant rings, written as polynomial maps in
//! generator coordinates: `Spec K[V]^{W_P} → Spec K[V]^W`.
//!
//! Source generators are listed block-major in ascending degree, and the map
//! expresses each target generator in those source coordinates.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ekl::{jacobian_matrix, EklError, MapSpec};
use crate::gw::{gw_equal, GWClass};
use crate::poly::{elementary_symmetric_of, poly_det, PolyError, PolyRing, Polynomial};
use crate::scalar::{Field, SquareClass};
use crate::weyl::ap_formula_type_a;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotmapError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Ekl(#[from] EklError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientFamily {
    /// `S_{n_1} × ⋯ × S_{n_r} ⊂ S_n`.
    APartial { blocks: Vec<usize> },
    /// `{1} ⊂ S_n`.
    SnFull { n: usize },
    /// `{1} ⊂ W(B_n) = W(C_n)`.
    BCFull { n: usize },
    /// `{1} ⊂ W(D_n)`.
    DFull { n: usize },
    /// `W(D_{2m}) ⊂ W(D_{2m+1})`.
    DOddPartial { m: usize },
}

impl fmt::Display for QuotientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |b: &[usize]| b.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match self {
            QuotientFamily::APartial { blocks } => write!(f, "A-partial blocks {}", join(blocks)),
            QuotientFamily::SnFull { n } => write!(f, "S{n} full"),
            QuotientFamily::BCFull { n } => write!(f, "B{n}/C{n} full"),
            QuotientFamily::DFull { n } => write!(f, "D{n} full"),
            QuotientFamily::DOddPartial { m } => write!(f, "D{}/D{} partial", 2 * m + 1, 2 * m),
        }
    }
}

/// A quotient map with the data needed to check it.
#[derive(Clone, Debug)]
pub struct QuotientSpec<F: Field> {
    family: QuotientFamily,
    ambient: PolyRing<F>,
    source_generators: Vec<Polynomial<F>>,
    target_generators: Vec<Polynomial<F>>,
    map: MapSpec<F>,
    expected_degree: u64,
}

impl<F: Field> QuotientSpec<F> {
    pub fn family(&self) -> &QuotientFamily {
        &self.family
    }

    /// The ring of the ambient coordinates `x_1, …, x_n`.
    pub fn ambient(&self) -> &PolyRing<F> {
        &self.ambient
    }

    /// Source generators as polynomials in the ambient variables.
    pub fn source_generators(&self) -> &[Polynomial<F>] {
        &self.source_generators
    }

    /// Target generators as polynomials in the ambient variables.
    pub fn target_generators(&self) -> &[Polynomial<F>] {
        &self.target_generators
    }

    /// The map in source-generator coordinates.
    pub fn map(&self) -> &MapSpec<F> {
        &self.map
    }

    /// `|W| / |W_P|`, also the ratio of generator degree products.
    pub fn expected_degree(&self) -> u64 {
        self.expected_degree
    }

    /// Each map component with the source generators substituted, in the
    /// ambient variables.
    pub fn composed(&self) -> Result<Vec<Polynomial<F>>, QuotmapError> {
        self.map
            .components()
            .iter()
            .map(|p| p.compose(&self.source_generators, &self.ambient).map_err(QuotmapError::from))
            .collect()
    }

    /// Whether substituting the source generators into the map gives the
    /// target generators exactly.
    pub fn substitution_holds(&self) -> Result<bool, QuotmapError> {
        Ok(self.composed()? == self.target_generators)
    }

    /// `det(∂p_k/∂y_j)` with the source generators substituted.
    pub fn jacobian_in_ambient(&self) -> Result<Polynomial<F>, QuotmapError> {
        let j = poly_det(self.map.ring(), &jacobian_matrix(&self.map))?;
        Ok(j.compose(&self.source_generators, &self.ambient)?)
    }

    /// JSON form of the map, with a comment naming the family.
    pub fn to_file(&self) -> crate::ekl::MapSpecFile {
        let mut file = self.map.to_file();
        file.comment = Some(format!("quotient map: {}", self.family));
        file
    }

    /// The class predicted for this map.
    pub fn expected_gw(&self) -> ExpectedGw {
        let deg = self.expected_degree;
        let (a_p, alpha_known) = match &self.family {
            QuotientFamily::APartial { blocks } => (ap_formula_type_a(blocks), true),
            QuotientFamily::SnFull { .. } | QuotientFamily::BCFull { .. } | QuotientFamily::DFull { .. } => (0, true),
            QuotientFamily::DOddPartial { .. } => (2, false),
        };
        ExpectedGw { rank: deg, a_p, hyperbolic: (deg - a_p) / 2, alpha_known }
    }
}

/// `hyperbolic·(⟨1⟩ + ⟨−1⟩) + a_P·⟨α⟩`, with `α = 1` when `alpha_known`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedGw {
    pub rank: u64,
    pub a_p: u64,
    pub hyperbolic: u64,
    pub alpha_known: bool,
}

impl ExpectedGw {
    /// A square class `α` for which `class` has the predicted shape, or
    /// `None`. Only `α = 1` is tried when `alpha_known`.
    pub fn matches(&self, class: &GWClass) -> Option<SquareClass> {
        if class.rank as u64 != self.rank {
            return None;
        }
        let base = class.base;
        let (h, a) = (self.hyperbolic as usize, self.a_p as usize);
        let one = SquareClass::one();
        let mut alphas = vec![one];
        if !self.alpha_known {
            alphas.push(GWClass::units(base, 0, 1).diagonal[0].clone());
            if let Some(d) = class.recognize_units() {
                alphas.extend(d.residual.first().cloned());
            }
        }
        alphas.into_iter().find(|alpha| {
            GWClass::from_shape(base, h, h, &vec![alpha.clone(); a])
                .and_then(|c| gw_equal(&c, class))
                .unwrap_or(false)
        })
    }
}

impl fmt::Display for ExpectedGw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, a) = (self.hyperbolic, self.a_p);
        if self.alpha_known {
            return write!(f, "{}", crate::gw::UnitDecomposition {
                plus: (h + a) as usize,
                minus: h as usize,
                residual: Vec::new(),
            });
        }
        match (h, a) {
            (_, 0) => write!(f, "{h}(<1> + <-1>)"),
            (0, _) => write!(f, "{a}<alpha>"),
            _ => write!(f, "{h}(<1> + <-1>) + {a}<alpha>"),
        }
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn ambient_ring<F: Field>(field: &F, n: usize) -> PolyRing<F> {
    PolyRing::new(field.clone(), (1..=n).map(|i| format!("x{i}")))
}

fn elementary<F: Field>(ring: &PolyRing<F>, polys: &[Polynomial<F>]) -> Result<Vec<Polynomial<F>>, PolyError> {
    (1..=polys.len()).map(|k| elementary_symmetric_of(ring, k, polys)).collect()
}

/// `S_{n_1} × ⋯ × S_{n_r} ⊂ S_n`. The source coordinate `y{i}_{j}` is
/// `e_j` of the variables of block `i`, and the target component `p_k` is
/// the coefficient of `t^k` in `Π_i (1 + y{i}_1 t + ⋯ + y{i}_{n_i} t^{n_i})`.
pub fn build_type_a_partial<F: Field>(field: &F, blocks: &[usize]) -> Result<QuotientSpec<F>, QuotmapError> {
    if blocks.is_empty() || blocks.contains(&0) {
        return Err(QuotmapError::Unsupported(format!("blocks must be positive and nonempty, got {blocks:?}")));
    }
    let n: usize = blocks.iter().sum();
    let ambient = ambient_ring(field, n);
    let names: Vec<String> =
        blocks.iter().enumerate().flat_map(|(i, &b)| (1..=b).map(move |j| format!("y{}_{j}", i + 1))).collect();
    let source = PolyRing::new(field.clone(), names);
    let mut source_generators = Vec::with_capacity(n);
    let mut series: Vec<Polynomial<F>> = vec![source.one()];
    let (mut start, mut var) = (0, 0);
    for &b in blocks {
        let xs: Vec<Polynomial<F>> = (start..start + b).map(|v| ambient.var(v)).collect();
        source_generators.extend(elementary(&ambient, &xs)?);
        let mut factor = vec![source.one()];
        factor.extend((0..b).map(|j| source.var(var + j)));
        series = convolve(&source, &series, &factor);
        start += b;
        var += b;
    }
    let components = series[1..].to_vec();
    let xs: Vec<Polynomial<F>> = (0..n).map(|v| ambient.var(v)).collect();
    let target_generators = elementary(&ambient, &xs)?;
    let expected_degree = factorial(n) / blocks.iter().map(|&b| factorial(b)).product::<u64>();
    Ok(QuotientSpec {
        family: QuotientFamily::APartial { blocks: blocks.to_vec() },
        ambient,
        source_generators,
        target_generators,
        map: MapSpec::new(source, components)?,
        expected_degree,
    })
}

fn convolve<F: Field>(ring: &PolyRing<F>, a: &[Polynomial<F>], b: &[Polynomial<F>]) -> Vec<Polynomial<F>> {
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(p * q);
        }
    }
    out
}

/// A full quotient `A^n → A^n/W` with source generators the coordinates.
fn full<F: Field>(
    family: QuotientFamily,
    ambient: PolyRing<F>,
    targets: Vec<Polynomial<F>>,
    expected_degree: u64,
) -> Result<QuotientSpec<F>, QuotmapError> {
    let source_generators = (0..ambient.nvars()).map(|v| ambient.var(v)).collect();
    Ok(QuotientSpec {
        family,
        map: MapSpec::new(ambient.clone(), targets.clone())?,
        ambient,
        source_generators,
        target_generators: targets,
        expected_degree,
    })
}

/// `A^n → A^n/S_n`, `x ↦ (e_1, …, e_n)`.
pub fn build_sn_full<F: Field>(field: &F, n: usize) -> Result<QuotientSpec<F>, QuotmapError> {
    if n == 0 {
        return Err(QuotmapError::Unsupported("n must be positive".into()));
    }
    let ambient = ambient_ring(field, n);
    let xs: Vec<Polynomial<F>> = (0..n).map(|v| ambient.var(v)).collect();
    let targets = elementary(&ambient, &xs)?;
    full(QuotientFamily::SnFull { n }, ambient, targets, factorial(n))
}

/// `A^n → A^n/W(B_n)`, `x ↦ (e_k(x_1², …, x_n²))_k`.
pub fn build_type_bc_full<F: Field>(field: &F, n: usize) -> Result<QuotientSpec<F>, QuotmapError> {
    if n == 0 {
        return Err(QuotmapError::Unsupported("n must be positive".into()));
    }
    let ambient = ambient_ring(field, n);
    let squares: Vec<Polynomial<F>> = (0..n).map(|v| ambient.var(v).pow(2)).collect();
    let targets = elementary(&ambient, &squares)?;
    full(QuotientFamily::BCFull { n }, ambient, targets, (1u64 << n) * factorial(n))
}

/// `A^n → A^n/W(D_n)`, `x ↦ (e_1(x²), …, e_{n-1}(x²), x_1⋯x_n)`.
pub fn build_type_d_full<F: Field>(field: &F, n: usize) -> Result<QuotientSpec<F>, QuotmapError> {
    if n < 3 {
        return Err(QuotmapError::Unsupported(format!("D_n needs n >= 3, got {n}")));
    }
    let ambient = ambient_ring(field, n);
    let squares: Vec<Polynomial<F>> = (0..n).map(|v| ambient.var(v).pow(2)).collect();
    let mut targets = elementary(&ambient, &squares)?;
    targets.pop();
    targets.push((0..n).fold(ambient.one(), |acc, v| &acc * &ambient.var(v)));
    full(QuotientFamily::DFull { n }, ambient, targets, (1u64 << (n - 1)) * factorial(n))
}

/// `A^{2m+1}/W(D_{2m}) → A^{2m+1}/W(D_{2m+1})` with source coordinates
/// `u0 = x_1`, `u_k = e_k(x_2², …, x_{2m+1}²)` for `k < 2m` and
/// `u_{2m} = x_2⋯x_{2m+1}`. The target components are
/// `p_k = u_k + u0²·u_{k-1}` (with `u_{k-1} = 1` at `k = 1`) for `k < 2m`,
/// `p_{2m} = u_{2m}² + u0²·u_{2m-1}` and `p_{2m+1} = u0·u_{2m}`.
pub fn build_d_odd_partial<F: Field>(field: &F, m: usize) -> Result<QuotientSpec<F>, QuotmapError> {
    if m < 2 {
        return Err(QuotmapError::Unsupported(format!("m must be at least 2, got {m}")));
    }
    let n = 2 * m + 1;
    let ambient = ambient_ring(field, n);
    let source = PolyRing::new(field.clone(), (0..n).map(|k| format!("u{k}")));
    let u = |k: usize| source.var(k);
    let u0sq = u(0).pow(2);
    let mut components: Vec<Polynomial<F>> = (1..2 * m)
        .map(|k| {
            let prev = if k == 1 { source.one() } else { u(k - 1) };
            &u(k) + &(&u0sq * &prev)
        })
        .collect();
    components.push(&u(2 * m).pow(2) + &(&u0sq * &u(2 * m - 1)));
    components.push(&u(0) * &u(2 * m));

    let rest_squares: Vec<Polynomial<F>> = (1..n).map(|v| ambient.var(v).pow(2)).collect();
    let mut source_generators = vec![ambient.var(0)];
    for k in 1..2 * m {
        source_generators.push(elementary_symmetric_of(&ambient, k, &rest_squares)?);
    }
    source_generators.push((1..n).fold(ambient.one(), |acc, v| &acc * &ambient.var(v)));

    let all_squares: Vec<Polynomial<F>> = (0..n).map(|v| ambient.var(v).pow(2)).collect();
    let mut target_generators: Vec<Polynomial<F>> =
        (1..n).map(|k| elementary_symmetric_of(&ambient, k, &all_squares)).collect::<Result<_, _>>()?;
    target_generators.push((0..n).fold(ambient.one(), |acc, v| &acc * &ambient.var(v)));
    Ok(QuotientSpec {
        family: QuotientFamily::DOddPartial { m },
        ambient,
        source_generators,
        target_generators,
        map: MapSpec::new(source, components)?,
        expected_degree: 2 * n as u64,
    })
}

/// `Π (x_i − x_j)` over `i < j` with `i` and `j` in different blocks.
pub fn cross_block_product<F: Field>(ring: &PolyRing<F>, blocks: &[usize]) -> Polynomial<F> {
    let owner: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &len)| std::iter::repeat(b).take(len)).collect();
    let mut out = ring.one();
    for i in 0..owner.len() {
        for j in i + 1..owner.len() {
            if owner[i] != owner[j] {
                out = &out * &(&ring.var(i) - &ring.var(j));
            }
        }
    }
    out
}

/// `Π (x_i − x_j)` over `i < j` within `vars`.
pub fn vandermonde<F: Field>(ring: &PolyRing<F>, vars: &[usize]) -> Polynomial<F> {
    let mut out = ring.one();
    for (a, &i) in vars.iter().enumerate() {
        for &j in &vars[a + 1..] {
            out = &out * &(&ring.var(i) - &ring.var(j));
        }
    }
    out
}

//! Finite Weyl groups acting on their root systems: length, longest element,
//! parabolic subgroups, minimal coset representatives and the count `a_P` of
//! cosets `ωW_P` with `ω⁻¹ω₀ω ∈ W_P`.
//!
//! Nodes are numbered from 1. `B_n`, `C_n`, `E_n`, `F_4` and `G_2` use the
//! Bourbaki numbering (`E_6`: chain 1-3-4-5-6 with node 2 on node 4). `D_n`
//! puts the fork at nodes 1 and 2, both joined to node 3, followed by the
//! chain 3-4-…-n, so that removing node `n` leaves `D_{n-1}`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Default cap on the number of group elements an enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_BUDGET`].
pub const ENUM_BUDGET_VAR: &str = "EKL_ENUM_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("invalid Cartan type {0:?}")]
    InvalidType(String),
    #[error("node {node} is not in 1..={rank}")]
    NodeOutOfRange { node: usize, rank: usize },
    #[error("the parabolic keeps every node; a proper subset is required")]
    Improper,
    #[error("enumeration needs {needed} elements, over the budget of {budget} (set {ENUM_BUDGET_VAR} to raise it)")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// Reads the enumeration budget from the environment, falling back to the
/// default when unset or unparsable.
pub fn enumeration_budget() -> u64 {
    std::env::var(ENUM_BUDGET_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUM_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A Cartan type such as `E6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, WeylError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        let t = CartanType { family, rank };
        if ok {
            Ok(t)
        } else {
            Err(WeylError::InvalidType(t.to_string()))
        }
    }

    /// Order of the Weyl group.
    pub fn group_order(&self) -> u64 {
        let n = self.rank as u64;
        let fact = |k: u64| (1..=k).product::<u64>();
        match self.family {
            Family::A => fact(n + 1),
            Family::B | Family::C => (1u64 << n) * fact(n),
            Family::D => (1u64 << (n - 1)) * fact(n),
            Family::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
            Family::G => 12,
        }
    }

    /// Number of positive roots.
    pub fn positive_root_count(&self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * n - n,
            Family::E => [36, 63, 120][n - 6],
            Family::F => 24,
            Family::G => 6,
        }
    }

    /// Gram matrix of the simple roots, scaled to integers.
    fn form(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut b = vec![vec![0i64; n]; n];
        let mut link = |i: usize, j: usize, v: i64| {
            b[i - 1][j - 1] = v;
            b[j - 1][i - 1] = v;
        };
        match self.family {
            Family::A => (1..n).for_each(|i| link(i, i + 1, -1)),
            Family::B => (1..n).for_each(|i| link(i, i + 1, -2)),
            Family::C => {
                (1..n - 1).for_each(|i| link(i, i + 1, -1));
                link(n - 1, n, -2);
            }
            Family::D => {
                link(1, 3, -1);
                link(2, 3, -1);
                (3..n).for_each(|i| link(i, i + 1, -1));
            }
            Family::E => {
                link(1, 3, -1);
                link(2, 4, -1);
                (3..n).for_each(|i| link(i, i + 1, -1));
            }
            Family::F => {
                link(1, 2, -2);
                link(2, 3, -2);
                link(3, 4, -1);
            }
            Family::G => link(1, 2, -3),
        }
        let diag: Vec<i64> = match self.family {
            Family::A | Family::D | Family::E => vec![2; n],
            Family::B => (1..=n).map(|i| if i == n { 2 } else { 4 }).collect(),
            Family::C => (1..=n).map(|i| if i == n { 4 } else { 2 }).collect(),
            Family::F => vec![4, 4, 2, 2],
            Family::G => vec![2, 6],
        };
        for (i, d) in diag.into_iter().enumerate() {
            b[i][i] = d;
        }
        b
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self, WeylError> {
        let bad = || WeylError::InvalidType(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        CartanType::new(family, rank).map_err(|_| bad())
    }
}

/// Roots in simple-root coordinates. Indices `0..N` are the positive roots
/// (simple roots first, then by height), and `N + k` is the negative of root
/// `k`.
#[derive(Debug)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Vec<i64>>,
    reflections: Vec<WeylElement>,
}

impl RootSystem {
    pub fn new(cartan_type: CartanType) -> Result<Arc<Self>, WeylError> {
        let t = CartanType::new(cartan_type.family, cartan_type.rank)?;
        let n = t.rank;
        let b = t.form();
        // C[i][j] = ⟨α_j, α_i^∨⟩
        let cartan: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| 2 * b[i][j] / b[i][i]).collect()).collect();
        let reflect = |i: usize, beta: &[i64]| -> Vec<i64> {
            let pairing: i64 = (0..n).map(|j| beta[j] * cartan[i][j]).sum();
            let mut out = beta.to_vec();
            out[i] -= pairing;
            out
        };
        let simple: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
        let mut positive = simple.clone();
        let mut frontier = simple;
        // s_i permutes the positive roots other than α_i
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                for i in 0..n {
                    let gamma = reflect(i, beta);
                    if gamma.iter().all(|&c| c >= 0) && seen.insert(gamma.clone()) {
                        next.push(gamma);
                    }
                }
            }
            positive.extend(next.iter().cloned());
            frontier = next;
        }
        positive.sort_by_key(|r| (r.iter().sum::<i64>(), std::cmp::Reverse(r.clone())));
        let count = positive.len();
        let index: HashMap<Vec<i64>, usize> = positive.iter().cloned().enumerate().map(|(k, r)| (r, k)).collect();
        let lookup = |r: &[i64]| -> usize {
            if let Some(&k) = index.get(r) {
                return k;
            }
            let neg: Vec<i64> = r.iter().map(|c| -c).collect();
            index[&neg] + count
        };
        let reflections = (0..n)
            .map(|i| {
                let perm: Vec<u8> = (0..2 * count)
                    .map(|k| {
                        let root = if k < count { positive[k].clone() } else { positive[k - count].iter().map(|c| -c).collect() };
                        lookup(&reflect(i, &root)) as u8
                    })
                    .collect();
                WeylElement::from_perm(perm, count)
            })
            .collect();
        Ok(Arc::new(RootSystem { cartan_type: t, cartan, positive, reflections }))
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    /// `C[i][j] = ⟨α_j, α_i^∨⟩`, 0-based.
    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Positive roots in simple-root coordinates.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn group_order(&self) -> u64 {
        self.cartan_type.group_order()
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement::from_perm((0..2 * self.positive.len()).map(|k| k as u8).collect(), self.positive.len())
    }

    /// The simple reflection at `node` (1-based).
    pub fn simple_reflection(&self, node: usize) -> Result<&WeylElement, WeylError> {
        self.check_node(node)?;
        Ok(&self.reflections[node - 1])
    }

    /// Product of simple reflections `s_{w[0]} s_{w[1]} ⋯` (1-based nodes).
    pub fn from_word(&self, word: &[usize]) -> Result<WeylElement, WeylError> {
        let mut w = self.identity();
        for &node in word {
            w = w.mul(self.simple_reflection(node)?);
        }
        Ok(w)
    }

    fn check_node(&self, node: usize) -> Result<(), WeylError> {
        if node == 0 || node > self.rank() {
            return Err(WeylError::NodeOutOfRange { node, rank: self.rank() });
        }
        Ok(())
    }
}

/// A group element, stored as its permutation of the signed root list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Box<[u8]>,
    length: u32,
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement(length {})", self.length)
    }
}

impl WeylElement {
    fn from_perm(perm: Vec<u8>, positive: usize) -> Self {
        let length = perm[..positive].iter().filter(|&&k| k as usize >= positive).count() as u32;
        WeylElement { perm: perm.into_boxed_slice(), length }
    }

    fn positive(&self) -> usize {
        self.perm.len() / 2
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        self.length as usize
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// Index of `w(root k)`.
    pub fn apply(&self, k: usize) -> usize {
        self.perm[k] as usize
    }

    /// The product `self · other`, acting as `other` first.
    pub fn mul(&self, other: &WeylElement) -> WeylElement {
        let perm = other.perm.iter().map(|&k| self.perm[k as usize]).collect();
        WeylElement::from_perm(perm, self.positive())
    }

    pub fn inverse(&self) -> WeylElement {
        let mut perm = vec![0u8; self.perm.len()];
        for (k, &v) in self.perm.iter().enumerate() {
            perm[v as usize] = k as u8;
        }
        WeylElement::from_perm(perm, self.positive())
    }

    /// `ℓ(w s) < ℓ(w)` for the simple reflection at 0-based `i`.
    fn right_descent(&self, i: usize) -> bool {
        self.perm[i] as usize >= self.positive()
    }

    /// `ℓ(s w) < ℓ(w)`: `w⁻¹(α_i)` is negative.
    fn left_descent(&self, i: usize) -> bool {
        self.perm.iter().position(|&v| v as usize == i).is_some_and(|k| k >= self.positive())
    }

    /// A reduced word in 1-based nodes, read left to right.
    pub fn reduced_word(&self, rs: &RootSystem) -> Vec<usize> {
        let mut word = Vec::new();
        let mut w = self.clone();
        while !w.is_identity() {
            let i = (0..rs.rank()).find(|&i| w.left_descent(i)).expect("nonidentity has a descent");
            word.push(i + 1);
            w = rs.reflections[i].mul(&w);
        }
        word
    }
}

/// The element of maximal length, built greedily by right multiplication.
pub fn longest_element(rs: &RootSystem) -> WeylElement {
    let mut w = rs.identity();
    while let Some(i) = (0..rs.rank()).find(|&i| !w.right_descent(i)) {
        w = w.mul(&rs.reflections[i]);
    }
    w
}

/// Whether `ω₀` is central, equivalently acts as `−1` on the roots.
pub fn is_central_longest(rs: &RootSystem) -> bool {
    let w0 = longest_element(rs);
    let n = rs.num_positive();
    (0..n).all(|k| w0.apply(k) == k + n)
}

/// A set `Σ_P` of kept Dynkin nodes (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolicSpec {
    rank: usize,
    kept: BTreeSet<usize>,
}

impl ParabolicSpec {
    pub fn keep(rank: usize, nodes: impl IntoIterator<Item = usize>) -> Result<Self, WeylError> {
        let kept: BTreeSet<usize> = nodes.into_iter().collect();
        if let Some(&node) = kept.iter().find(|&&v| v == 0 || v > rank) {
            return Err(WeylError::NodeOutOfRange { node, rank });
        }
        Ok(ParabolicSpec { rank, kept })
    }

    pub fn remove(rank: usize, nodes: impl IntoIterator<Item = usize>) -> Result<Self, WeylError> {
        let removed: BTreeSet<usize> = nodes.into_iter().collect();
        if let Some(&node) = removed.iter().find(|&&v| v == 0 || v > rank) {
            return Err(WeylError::NodeOutOfRange { node, rank });
        }
        ParabolicSpec::keep(rank, (1..=rank).filter(|v| !removed.contains(v)))
    }

    /// The Young subgroup `S_{n_1} × ⋯ × S_{n_r}` of `S_n`, as a parabolic of
    /// `A_{n-1}`: every node except the block boundaries `n_1 + ⋯ + n_i`.
    pub fn type_a_blocks(blocks: &[usize]) -> Result<(CartanType, Self), WeylError> {
        let n: usize = blocks.iter().sum();
        if blocks.is_empty() || blocks.contains(&0) || n < 2 {
            return Err(WeylError::InvalidType(format!("A with blocks {blocks:?}")));
        }
        let t = CartanType::new(Family::A, n - 1)?;
        let cuts: Vec<usize> = blocks.iter().scan(0, |m, &b| {
            *m += b;
            Some(*m)
        }).filter(|&m| m < n).collect();
        Ok((t, ParabolicSpec::remove(n - 1, cuts)?))
    }

    pub fn kept_nodes(&self) -> &BTreeSet<usize> {
        &self.kept
    }

    pub fn is_proper(&self) -> bool {
        self.kept.len() < self.rank
    }

    fn contains0(&self, i: usize) -> bool {
        self.kept.contains(&(i + 1))
    }

    /// Order of `W_P`, from the types of the connected components of `Σ_P`.
    pub fn order(&self, rs: &RootSystem) -> u64 {
        let kept: Vec<usize> = self.kept.iter().map(|v| v - 1).collect();
        let c = rs.cartan_matrix();
        let mut seen = HashSet::new();
        let mut total = 1u64;
        for &start in &kept {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for &j in &kept {
                    if c[i][j] != 0 && seen.insert(j) {
                        comp.push(j);
                        stack.push(j);
                    }
                }
            }
            let roots = rs
                .positive_roots()
                .iter()
                .filter(|r| r.iter().enumerate().all(|(k, &x)| x == 0 || comp.contains(&k)))
                .count();
            let laced = comp.iter().all(|&i| comp.iter().all(|&j| i == j || c[i][j] >= -1 && c[j][i] >= -1));
            total *= component_order(comp.len(), roots, laced);
        }
        total
    }
}

/// Weyl-group order of an irreducible system with the given rank, number
/// of positive roots and lacing.
fn component_order(rank: usize, roots: usize, simply_laced: bool) -> u64 {
    let fam = if rank * (rank + 1) / 2 == roots {
        Family::A
    } else if !simply_laced {
        match (rank, roots) {
            (2, 6) => Family::G,
            (4, 24) => Family::F,
            _ => Family::B,
        }
    } else if rank * rank - rank == roots {
        Family::D
    } else {
        Family::E
    };
    CartanType { family: fam, rank }.group_order()
}

/// Whether `w ∈ W_P`: strip left descents from `Σ_P` until none remain.
pub fn in_parabolic(rs: &RootSystem, w: &WeylElement, p: &ParabolicSpec) -> bool {
    let mut x = w.clone();
    while !x.is_identity() {
        match (0..rs.rank()).find(|&i| p.contains0(i) && x.left_descent(i)) {
            Some(i) => x = rs.reflections[i].mul(&x),
            None => return false,
        }
    }
    true
}

/// Minimal-length representatives of the cosets `wW_P`, by breadth-first
/// search from the identity, in order of length.
pub fn min_coset_reps(rs: &RootSystem, p: &ParabolicSpec, budget: u64) -> Result<Vec<WeylElement>, WeylError> {
    let needed = rs.group_order() / p.order(rs);
    if needed > budget {
        return Err(WeylError::BudgetExceeded { needed, budget });
    }
    let is_minimal = |w: &WeylElement| (0..rs.rank()).all(|i| !(p.contains0(i) && w.right_descent(i)));
    let mut seen: HashSet<WeylElement> = HashSet::new();
    let id = rs.identity();
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut start = 0;
    while start < out.len() {
        let end = out.len();
        for k in start..end {
            for s in &rs.reflections {
                let w = s.mul(&out[k]);
                if w.length() > out[k].length() && is_minimal(&w) && seen.insert(w.clone()) {
                    out.push(w);
                }
            }
        }
        start = end;
    }
    Ok(out)
}

/// `#{u minimal : u⁻¹ω₀u ∈ W_P}` by enumeration, never using the central
/// shortcut.
pub fn compute_ap_enumerated(
    rs: &RootSystem,
    p: &ParabolicSpec,
    budget: u64,
    parallel: bool,
) -> Result<usize, WeylError> {
    if !p.is_proper() {
        return Err(WeylError::Improper);
    }
    let reps = min_coset_reps(rs, p, budget)?;
    let w0 = longest_element(rs);
    let test = |u: &WeylElement| in_parabolic(rs, &u.inverse().mul(&w0).mul(u), p);
    Ok(if parallel { reps.par_iter().filter(|u| test(u)).count() } else { reps.iter().filter(|u| test(u)).count() })
}

/// `a_P`, returning 0 at once when `ω₀` is central (its support is full, so
/// it lies in no proper parabolic).
pub fn compute_ap(rs: &RootSystem, p: &ParabolicSpec, budget: u64) -> Result<usize, WeylError> {
    Ok(ap_report(rs, p, budget, false)?.a_p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApReport {
    pub cartan_type: String,
    pub kept_nodes: Vec<usize>,
    pub group_order: u64,
    pub parabolic_order: u64,
    pub cosets: u64,
    pub a_p: usize,
    pub shortcut: bool,
}

impl fmt::Display for ApReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kept: Vec<String> = self.kept_nodes.iter().map(|v| v.to_string()).collect();
        writeln!(f, "type: {}", self.cartan_type)?;
        writeln!(f, "kept nodes: {{{}}}", kept.join(", "))?;
        writeln!(f, "|W|: {}", self.group_order)?;
        writeln!(f, "|W_P|: {}", self.parabolic_order)?;
        writeln!(f, "cosets: {}", self.cosets)?;
        writeln!(f, "a_P: {}", self.a_p)?;
        write!(f, "central shortcut: {}", if self.shortcut { "yes" } else { "no" })
    }
}

pub fn ap_report(rs: &RootSystem, p: &ParabolicSpec, budget: u64, parallel: bool) -> Result<ApReport, WeylError> {
    if !p.is_proper() {
        return Err(WeylError::Improper);
    }
    let parabolic_order = p.order(rs);
    let shortcut = is_central_longest(rs);
    let a_p = if shortcut { 0 } else { compute_ap_enumerated(rs, p, budget, parallel)? };
    Ok(ApReport {
        cartan_type: rs.cartan_type().to_string(),
        kept_nodes: p.kept.iter().copied().collect(),
        group_order: rs.group_order(),
        parabolic_order,
        cosets: rs.group_order() / parabolic_order,
        a_p,
        shortcut,
    })
}

/// `⌊n/2⌋! / Π⌊n_i/2⌋!` when at most one block is odd, else 0.
pub fn ap_formula_type_a(blocks: &[usize]) -> u64 {
    let fact = |k: usize| (1..=k as u64).product::<u64>();
    if blocks.iter().filter(|&&b| b % 2 == 1).count() > 1 {
        return 0;
    }
    let n: usize = blocks.iter().sum();
    fact(n / 2) / blocks.iter().map(|&b| fact(b / 2)).product::<u64>()
}

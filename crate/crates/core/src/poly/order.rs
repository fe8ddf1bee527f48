use std::cmp::Ordering;

use super::{Monomial, PolyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    DegRevLex,
}

/// A monomial order together with a variable precedence. `precedence[0]` is
/// the index of the largest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, precedence: Vec<usize>) -> Result<Self, PolyError> {
        let mut seen = vec![false; precedence.len()];
        for &v in &precedence {
            if v >= seen.len() || seen[v] {
                return Err(PolyError::BadPrecedence(precedence.clone()));
            }
            seen[v] = true;
        }
        Ok(MonomialOrder { kind, precedence })
    }

    /// Lex with the declared variable order `x_0 > x_1 > …`.
    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, precedence: (0..nvars).collect() }
    }

    /// Degree-reverse-lex with the declared variable order.
    pub fn degrevlex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::DegRevLex, precedence: (0..nvars).collect() }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn nvars(&self) -> usize {
        self.precedence.len()
    }

    /// An integer vector whose lexicographic order is this monomial order.
    /// The map is additive: `key(a·b) = key(a) + key(b)`.
    pub fn sort_key(&self, m: &Monomial) -> Vec<i32> {
        let e = m.exponents();
        match self.kind {
            OrderKind::Lex => self.precedence.iter().map(|&v| e[v] as i32).collect(),
            OrderKind::DegRevLex => {
                let mut key = Vec::with_capacity(e.len());
                key.push(m.degree() as i32);
                key.extend(self.precedence.iter().skip(1).rev().map(|&v| -(e[v] as i32)));
                key
            }
        }
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exponents(), b.exponents());
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.precedence {
                    match ea[v].cmp(&eb[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex => match a.degree().cmp(&b.degree()) {
                Ordering::Equal => {
                    for &v in self.precedence.iter().rev() {
                        match ea[v].cmp(&eb[v]) {
                            Ordering::Equal => continue,
                            o => return o.reverse(),
                        }
                    }
                    Ordering::Equal
                }
                o => o,
            },
        }
    }
}

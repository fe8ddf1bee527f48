//! Exact coefficient arithmetic.
//!
//! Two coefficient fields are supported: the rationals (arbitrary precision)
//! and prime fields `F_p` for odd `p`. Both implement [`Field`], which is the
//! context object the polynomial and Gröbner layers are generic over.
//! [`SquareClass`] canonicalizes elements of `K^× / (K^×)²`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default trial-division bound used when extracting square classes.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("square class of zero is undefined")]
    ZeroInput,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("cofactor {cofactor} has no prime factor below {bound}; refusing to guess its square class")]
    FactorBoundExceeded { cofactor: String, bound: u64 },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator of {value} vanishes modulo {modulus}")]
    DenominatorVanishes { value: String, modulus: u64 },
}

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ScalarError> {
        let d: BigInt = denom.into();
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ScalarError::Parse(s.to_string());
        match t.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Element of `F_p`, `p` an odd prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeFieldElement {
    residue: u64,
    modulus: u64,
}

impl PrimeFieldElement {
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// Which field a quadratic-form computation lives over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum BaseField {
    Rationals,
    Prime(u64),
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rationals => write!(f, "Q"),
            BaseField::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// A coefficient field, used as a context object: elements are plain values
/// and every operation goes through the field.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Result<Self::Elem, ScalarError>;
    fn characteristic(&self) -> u64;
    fn base(&self) -> BaseField;
    /// Square class of a nonzero element.
    fn square_class(&self, a: &Self::Elem) -> Result<SquareClass, ScalarError>;

    /// The element as a rational number, for fields embedded in `Q`.
    fn to_rational(&self, _a: &Self::Elem) -> Option<Rational> {
        None
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Only meaningful for ordered fields; prime fields report `false`.
    fn is_negative(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}

/// The field of rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Option<Rational> {
        a.inv()
    }
    fn from_int(&self, n: i64) -> Rational {
        Rational::from(n)
    }
    fn from_rational(&self, r: &Rational) -> Result<Rational, ScalarError> {
        Ok(r.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn base(&self) -> BaseField {
        BaseField::Rationals
    }
    fn square_class(&self, a: &Rational) -> Result<SquareClass, ScalarError> {
        squarefree_part(a)
    }
    fn to_rational(&self, a: &Rational) -> Option<Rational> {
        Some(a.clone())
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
    fn is_negative(&self, a: &Rational) -> bool {
        a.signum() < 0
    }
}

/// The prime field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if p == 2 || !is_prime(p) || p >= (1 << 32) {
            return Err(ScalarError::NotOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn element(&self, n: i64) -> PrimeFieldElement {
        PrimeFieldElement { residue: n.rem_euclid(self.p as i64) as u64, modulus: self.p }
    }

    fn wrap(&self, r: u64) -> PrimeFieldElement {
        PrimeFieldElement { residue: r, modulus: self.p }
    }

    /// Smallest quadratic non-residue; it is always prime.
    pub fn nonresidue(&self) -> u64 {
        (2..self.p)
            .find(|&a| legendre(a as i64, self.p) == Ok(-1))
            .expect("every odd prime field has a non-residue")
    }
}

impl Field for PrimeField {
    type Elem = PrimeFieldElement;

    fn zero(&self) -> PrimeFieldElement {
        self.wrap(0)
    }
    fn one(&self) -> PrimeFieldElement {
        self.wrap(1)
    }
    fn is_zero(&self, a: &PrimeFieldElement) -> bool {
        a.residue == 0
    }
    fn add(&self, a: &PrimeFieldElement, b: &PrimeFieldElement) -> PrimeFieldElement {
        self.wrap((a.residue + b.residue) % self.p)
    }
    fn sub(&self, a: &PrimeFieldElement, b: &PrimeFieldElement) -> PrimeFieldElement {
        self.wrap((a.residue + self.p - b.residue) % self.p)
    }
    fn mul(&self, a: &PrimeFieldElement, b: &PrimeFieldElement) -> PrimeFieldElement {
        self.wrap(a.residue * b.residue % self.p)
    }
    fn neg(&self, a: &PrimeFieldElement) -> PrimeFieldElement {
        self.wrap((self.p - a.residue) % self.p)
    }
    fn inv(&self, a: &PrimeFieldElement) -> Option<PrimeFieldElement> {
        if a.residue == 0 {
            None
        } else {
            Some(self.wrap(pow_mod(a.residue, self.p - 2, self.p)))
        }
    }
    fn from_int(&self, n: i64) -> PrimeFieldElement {
        self.element(n)
    }
    fn from_rational(&self, r: &Rational) -> Result<PrimeFieldElement, ScalarError> {
        let p = BigInt::from(self.p);
        let n = r.numer().mod_floor(&p).to_u64().expect("reduced residue fits");
        let d = r.denom().mod_floor(&p).to_u64().expect("reduced residue fits");
        if d == 0 {
            return Err(ScalarError::DenominatorVanishes { value: r.to_string(), modulus: self.p });
        }
        Ok(self.wrap(n * pow_mod(d, self.p - 2, self.p) % self.p))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn base(&self) -> BaseField {
        BaseField::Prime(self.p)
    }
    fn square_class(&self, a: &PrimeFieldElement) -> Result<SquareClass, ScalarError> {
        match legendre(a.residue as i64, self.p)? {
            0 => Err(ScalarError::ZeroInput),
            1 => Ok(SquareClass::one()),
            _ => Ok(SquareClass::from_parts(1, vec![self.nonresidue()])),
        }
    }
}

/// A square class represented by its signed squarefree integer
/// `sign · Π primes`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    sign: i8,
    primes: Vec<u64>,
}

impl SquareClass {
    pub fn one() -> Self {
        SquareClass { sign: 1, primes: Vec::new() }
    }

    pub fn minus_one() -> Self {
        SquareClass { sign: -1, primes: Vec::new() }
    }

    /// `primes` need not be sorted but must be distinct primes.
    pub fn from_parts(sign: i8, mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        SquareClass { sign: if sign < 0 { -1 } else { 1 }, primes }
    }

    /// Square class of a nonzero integer.
    pub fn of_integer(n: i64) -> Result<Self, ScalarError> {
        squarefree_part(&Rational::from(n))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.primes.is_empty()
    }

    /// The squarefree representative as an integer.
    pub fn value(&self) -> BigInt {
        let mag = self.primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        if self.sign < 0 {
            -mag
        } else {
            mag
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.value().to_i64()
    }

    /// Product of square classes over `Q`: signs multiply, primes cancel in pairs.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let mut primes = Vec::with_capacity(self.primes.len() + other.primes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.primes.len() || j < other.primes.len() {
            match (self.primes.get(i), other.primes.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    primes.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    primes.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    primes.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    primes.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SquareClass { sign: self.sign * other.sign, primes }
    }

    pub fn negate(&self) -> SquareClass {
        SquareClass { sign: -self.sign, primes: self.primes.clone() }
    }

    pub fn as_rational(&self) -> Rational {
        Rational::from_integer(self.value())
    }
}

impl Ord for SquareClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value().cmp(&other.value())
    }
}

impl PartialOrd for SquareClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl fmt::Debug for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquareClass({})", self.value())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Trial division by candidates up to `bound`, then Pollard's rho on a
/// cofactor that fits in 64 bits or is the square of one that does. Returns
/// the prime powers found and the unresolved cofactor (1 when the
/// factorization is complete).
fn trial_divide(n: &BigUint, bound: u64) -> (Vec<(u64, u32)>, BigUint) {
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p <= bound && !rest.is_one() {
        if rest.to_u64().is_some() {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let (small, mult) = match rest.to_u64() {
        Some(m) => (m, 1),
        None => match rest.sqrt() {
            r if &r * &r == rest => match r.to_u64() {
                Some(m) => (m, 2),
                None => return (merge(out), rest),
            },
            _ => return (merge(out), rest),
        },
    };
    for q in factor_u64(small) {
        out.push((q, mult));
    }
    (merge(out), BigUint::one())
}

/// Sorts prime powers and merges repeated primes.
fn merge(mut v: Vec<(u64, u32)>) -> Vec<(u64, u32)> {
    v.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::with_capacity(v.len());
    for (p, e) in v {
        match out.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => out.push((p, e)),
        }
    }
    out
}

/// Prime factors of `n` with multiplicity.
fn factor_u64(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut stack = vec![n];
    while let Some(mut m) = stack.pop() {
        for q in [2u64, 3, 5, 7, 11, 13] {
            while m % q == 0 {
                out.push(q);
                m /= q;
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            out.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// A nontrivial divisor of the odd composite `n` (Brent's variant).
fn pollard_rho(n: u64) -> u64 {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("every odd composite has a rho divisor for some c")
}

/// Prime factorization by trial division up to `bound`, finished by
/// Pollard's rho when the cofactor fits in 64 bits (or is such a square).
pub fn factor_with_bound(n: &BigUint, bound: u64) -> Result<Vec<(u64, u32)>, ScalarError> {
    if n.is_zero() {
        return Err(ScalarError::ZeroInput);
    }
    let (out, rest) = trial_divide(n, bound);
    if !rest.is_one() {
        return Err(ScalarError::FactorBoundExceeded { cofactor: rest.to_string(), bound });
    }
    Ok(out)
}

/// Unique squarefree integer `d` with `r = d·s²`, using the default
/// factorization bound.
pub fn squarefree_part(r: &Rational) -> Result<SquareClass, ScalarError> {
    squarefree_part_with_bound(r, DEFAULT_FACTOR_BOUND)
}

pub fn squarefree_part_with_bound(r: &Rational, bound: u64) -> Result<SquareClass, ScalarError> {
    if r.is_zero() {
        return Err(ScalarError::ZeroInput);
    }
    // n/d and n·d share a square class.
    let mut primes = Vec::new();
    for part in [r.numer(), r.denom()] {
        let (factors, rest) = trial_divide(part.magnitude(), bound);
        // a perfect-square cofactor does not change the class
        if !rest.is_one() && rest.sqrt().pow(2) != rest {
            return Err(ScalarError::FactorBoundExceeded { cofactor: rest.to_string(), bound });
        }
        primes.extend(factors.into_iter().filter(|&(_, e)| e % 2 == 1).map(|(p, _)| p));
    }
    Ok(SquareClass::from_parts(r.signum(), primes))
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> Result<i8, ScalarError> {
    if p == 2 || !is_prime(p) {
        return Err(ScalarError::NotOddPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    Ok(legendre_residue(r, p))
}

/// Legendre symbol for an arbitrary-precision integer.
pub fn legendre_big(a: &BigInt, p: u64) -> Result<i8, ScalarError> {
    if p == 2 || !is_prime(p) {
        return Err(ScalarError::NotOddPrime(p));
    }
    let r = a.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
    Ok(legendre_residue(r, p))
}

fn legendre_residue(r: u64, p: u64) -> i8 {
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

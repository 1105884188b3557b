//! Exact arithmetic in GF(p^m).
//!
//! Elements are polynomial residues modulo a fixed monic irreducible
//! polynomial, stored as coefficient vectors with the constant term first.
//! The modulus is the first irreducible polynomial in ascending base-p
//! encoding, and the designated generator `alpha` is the least-encoded
//! element of full multiplicative order, so every field built from the same
//! `(p, m)` is identical on every run.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest field order accepted by [`FiniteField::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the enumeration guard {MAX_FIELD_ORDER}")]
    TooLarge(u128),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("field of order {order} is not GF(q^2) for q = {q}")]
    NotQuadratic { order: u64, q: u64 },
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
}

/// Trial-division primality test; inputs here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, m)` with `q = p^m` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over Z_p as coefficient vectors, constant first, no trailing zeros.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime and a != 0
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Remainder and quotient of `a / b` over Z_p. `b` must be nonzero.
fn poly_divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod_p(*b.last().unwrap(), p) as u64;
    let mut quot = vec![0u32; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u64 * lead_inv % p as u64) as u32;
        quot[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            let sub = (c as u64 * bc as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    (trim(quot), r)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Decodes the base-p integer encoding of a polynomial (constant least significant).
fn decode(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

/// Irreducibility by trial division against every monic polynomial of
/// degree at most `deg / 2`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = decode(low, p, d);
            divisor.push(1);
            let (_, rem) = poly_divrem(poly, &divisor, p);
            if rem.is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, PartialEq, Eq)]
struct FieldInner {
    p: u32,
    m: usize,
    order: u64,
    /// Monic, length m + 1, constant first.
    modulus: Vec<u32>,
    alpha: Vec<u32>,
}

/// GF(p^m) with a fixed modulus and primitive element. Cheap to clone.
#[derive(Debug, Clone)]
pub struct FiniteField {
    inner: Arc<FieldInner>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    pub fn new(p: u64, m: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if m < 1 {
            return Err(GfError::ZeroDegree);
        }
        let order = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if order > MAX_FIELD_ORDER as u128 {
            return Err(GfError::TooLarge(order));
        }
        let order = order as u64;
        let p32 = p as u32;
        let m = m as usize;

        let modulus = (0..order)
            .map(|low| {
                let mut poly = decode(low, p32, m);
                poly.push(1);
                poly
            })
            .find(|poly| is_irreducible(poly, p32))
            .expect("an irreducible polynomial of every degree exists");

        let mut field = FiniteField {
            inner: Arc::new(FieldInner {
                p: p32,
                m,
                order,
                modulus,
                alpha: Vec::new(),
            }),
        };
        let group_order = order - 1;
        let factors = prime_factors(group_order);
        let alpha = (1..order)
            .map(|code| field.element_from_index(code))
            .find(|x| group_order == 1 || factors.iter().all(|&l| !x.pow(group_order / l).is_one()))
            .expect("the multiplicative group of a finite field is cyclic");
        let coeffs = alpha.coeffs.clone();
        drop(alpha);
        Arc::get_mut(&mut field.inner)
            .expect("field not yet shared")
            .alpha = coeffs;
        Ok(field)
    }

    /// GF(q) for a prime power `q`.
    pub fn with_order(q: u64) -> Result<Self, GfError> {
        let (p, m) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
        Self::new(p, m)
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p as u64
    }

    pub fn degree(&self) -> usize {
        self.inner.m
    }

    pub fn order(&self) -> u64 {
        self.inner.order
    }

    /// Monic modulus polynomial, constant coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.inner.m],
            field: self.clone(),
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    /// The designated generator of the multiplicative group.
    pub fn alpha(&self) -> FieldElement {
        FieldElement {
            coeffs: self.inner.alpha.clone(),
            field: self.clone(),
        }
    }

    pub fn primitive_element(&self) -> FieldElement {
        self.alpha()
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement, GfError> {
        if coeffs.len() != self.inner.m {
            return Err(GfError::BadLength {
                got: coeffs.len(),
                expected: self.inner.m,
            });
        }
        Ok(FieldElement {
            coeffs: coeffs.iter().map(|&c| c % self.inner.p).collect(),
            field: self.clone(),
        })
    }

    /// Element whose coefficients are the base-p digits of `code`.
    pub fn element_from_index(&self, code: u64) -> FieldElement {
        FieldElement {
            coeffs: decode(code % self.inner.order, self.inner.p, self.inner.m),
            field: self.clone(),
        }
    }

    /// Image of an integer under Z -> GF(p^m).
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.inner.p as i64;
        let mut e = self.zero();
        e.coeffs[0] = n.rem_euclid(p) as u32;
        e
    }

    /// All elements in the order 0, 1, alpha, alpha^2, ..., alpha^(order-2).
    pub fn elements(&self) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.order() as usize);
        out.push(self.zero());
        let alpha = self.alpha();
        let mut x = self.one();
        for _ in 0..self.order() - 1 {
            out.push(x.clone());
            x = &x * &alpha;
        }
        out
    }

    /// Elements in ascending integer encoding.
    pub fn elements_by_index(&self) -> Vec<FieldElement> {
        (0..self.order())
            .map(|c| self.element_from_index(c))
            .collect()
    }

    fn check_quadratic(&self, q: u64) -> Result<(), GfError> {
        if q.checked_mul(q) != Some(self.order()) {
            return Err(GfError::NotQuadratic {
                order: self.order(),
                q,
            });
        }
        Ok(())
    }

    /// `beta = alpha^(q-1)`, a generator of the (q+1)-th roots of unity in GF(q^2).
    pub fn beta(&self, q: u64) -> Result<FieldElement, GfError> {
        self.check_quadratic(q)?;
        Ok(self.alpha().pow(q - 1))
    }

    fn reduce(&self, poly: Vec<u32>) -> Vec<u32> {
        let (_, mut rem) = poly_divrem(&poly, &self.inner.modulus, self.inner.p);
        rem.resize(self.inner.m, 0);
        rem
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.inner.modulus.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "GF({}^{}) modulus=[{}]",
            self.inner.p,
            self.inner.m,
            coeffs.join(",")
        )
    }
}

/// A residue in GF(p^m): `m` coefficients in `[0, p)`, constant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Vec<u32>,
    field: FiniteField,
}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// Base-p integer encoding (constant coefficient least significant).
    pub fn index(&self) -> u64 {
        let p = self.field.inner.p as u64;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * p + c as u64)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &Self) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        let p = self.field.inner.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        Ok(Self {
            coeffs,
            field: self.field.clone(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        let p = self.field.inner.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        Ok(Self {
            coeffs,
            field: self.field.clone(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GfError> {
        self.same_field(other)?;
        let p = self.field.inner.p;
        let prod = poly_mul(&trim(self.coeffs.clone()), &trim(other.coeffs.clone()), p);
        Ok(Self {
            coeffs: self.field.reduce(prod),
            field: self.field.clone(),
        })
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Self, GfError> {
        if self.is_zero() {
            return Err(GfError::InverseOfZero);
        }
        let p = self.field.inner.p;
        // invariant: s_i * self == r_i (mod modulus)
        let mut r0 = self.field.inner.modulus.clone();
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<u32> = Vec::new();
        let mut s1: Vec<u32> = vec![1];
        while !r1.is_empty() {
            let (quot, rem) = poly_divrem(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible
        let scale = inv_mod_p(r0[0], p);
        let inv = poly_mul(&s0, &[scale], p);
        Ok(Self {
            coeffs: self.field.reduce(inv),
            field: self.field.clone(),
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// `x^q` on GF(q^2).
    pub fn frobenius(&self, q: u64) -> Result<Self, GfError> {
        self.field.check_quadratic(q)?;
        Ok(self.pow(q))
    }

    /// Field norm `x^(q+1)` from GF(q^2) onto GF(q).
    pub fn norm(&self, q: u64) -> Result<Self, GfError> {
        self.field.check_quadratic(q)?;
        Ok(self.pow(q + 1))
    }

    /// Multiplicative order; `None` for zero.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_one() {
            x = &x * self;
            k += 1;
        }
        Some(k)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct FieldWire {
    p: u32,
    m: usize,
    modulus: Vec<u32>,
}

impl Serialize for FiniteField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldWire {
            p: self.inner.p,
            m: self.inner.m,
            modulus: self.inner.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = FieldWire::deserialize(d)?;
        let field = FiniteField::new(w.p as u64, w.m as u32).map_err(serde::de::Error::custom)?;
        if field.modulus() != w.modulus.as_slice() {
            return Err(serde::de::Error::custom(format!(
                "modulus {:?} is not the canonical modulus {:?}",
                w.modulus,
                field.modulus()
            )));
        }
        Ok(field)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementWire {
    field: FiniteField,
    coeffs: Vec<u32>,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementWire {
            field: self.field.clone(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = ElementWire::deserialize(d)?;
        w.field.element(&w.coeffs).map_err(serde::de::Error::custom)
    }
}

// Operator forms panic on field mismatch, like dimension mismatches in matrix crates.

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch in addition")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.checked_sub(rhs)
            .expect("field mismatch in subtraction")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.checked_mul(rhs)
            .expect("field mismatch in multiplication")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        &self.field.zero() - self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let f = FiniteField::with_order(9).unwrap();
        let a = f.alpha().pow(5);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<FieldElement>(&s).unwrap(), a);
        assert!(serde_json::from_str::<FiniteField>(r#"{"p":3,"m":2,"modulus":[2,0,1]}"#).is_err());
    }

    #[test]
    fn prime_field_three() {
        let f = FiniteField::new(3, 1).unwrap();
        assert_eq!(f.order(), 3);
        assert_eq!(f.alpha().coeffs(), &[2]);
    }

    #[test]
    fn gf9_modulus_is_x2_plus_1() {
        let f = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // x * x = -1 = 2
        let x = f.element(&[0, 1]).unwrap();
        assert_eq!((&x * &x).coeffs(), &[2, 0]);
    }

    #[test]
    fn gf4_modulus_and_alpha_square() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let a = f.alpha();
        assert_eq!(a.coeffs(), &[0, 1]);
        assert_eq!((&a * &a).coeffs(), &[1, 1]);
        assert_eq!(f.to_string(), "GF(2^2) modulus=[1,1,1]");
        assert_eq!((&a * &a).to_string(), "(1,1)");
    }

    #[test]
    fn gf9_alpha_and_beta() {
        let f = FiniteField::new(3, 2).unwrap();
        let a = f.alpha();
        assert_eq!(a.multiplicative_order(), Some(8));
        // least-encoded generator under modulus x^2+1 is 1+x
        assert_eq!(a.coeffs(), &[1, 1]);
        let beta = f.beta(3).unwrap();
        assert_eq!(beta, a.pow(2));
        assert_eq!(beta.multiplicative_order(), Some(4));
        assert_eq!(a.norm(3).unwrap(), f.from_int(2));
        // frobenius(alpha) equals alpha^3 by repeated multiplication
        assert_eq!(a.frobenius(3).unwrap(), &(&a * &a) * &a);
    }

    #[test]
    fn gf4_beta_has_order_three() {
        let f = FiniteField::new(2, 2).unwrap();
        let beta = f.beta(2).unwrap();
        assert_eq!(beta, f.alpha());
        assert_eq!(beta.multiplicative_order(), Some(3));
    }

    #[test]
    fn inverse_and_errors() {
        let f = FiniteField::new(5, 2).unwrap();
        for x in f.elements_by_index().into_iter().skip(1) {
            assert!((&x * &x.inv().unwrap()).is_one());
        }
        assert!(f.one().inv().unwrap().is_one());
        assert_eq!(f.zero().inv(), Err(GfError::InverseOfZero));
        let g = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.one().checked_add(&g.one()), Err(GfError::FieldMismatch));
        assert!(matches!(
            f.one().frobenius(3),
            Err(GfError::NotQuadratic { .. })
        ));
    }

    #[test]
    fn creation_errors() {
        assert_eq!(FiniteField::new(4, 1), Err(GfError::NotPrime(4)));
        assert_eq!(FiniteField::new(3, 0), Err(GfError::ZeroDegree));
        assert!(matches!(FiniteField::new(2, 21), Err(GfError::TooLarge(_))));
        assert_eq!(FiniteField::with_order(6), Err(GfError::NotPrimePower(6)));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn alpha_enumerates_all_nonzero_elements() {
        for (p, m) in [(2, 1), (2, 3), (3, 2), (5, 2), (7, 2), (2, 4)] {
            let f = FiniteField::new(p, m).unwrap();
            let mut seen: Vec<u64> = f.elements().iter().map(FieldElement::index).collect();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len() as u64, f.order());
        }
    }

    #[test]
    fn norm_fibres_and_frobenius_fixed_points() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = FiniteField::with_order(q * q).unwrap();
            let elems = f.elements_by_index();
            let fixed = elems
                .iter()
                .filter(|x| x.frobenius(q).unwrap() == **x)
                .count();
            assert_eq!(fixed as u64, q);
            let mut counts = std::collections::HashMap::new();
            for x in &elems {
                let n = x.norm(q).unwrap();
                assert_eq!(n.frobenius(q).unwrap(), n, "norm lands in the subfield");
                *counts.entry(n.index()).or_insert(0u64) += 1;
            }
            assert_eq!(counts[&0], 1);
            assert_eq!(counts.len() as u64, q);
            assert!(counts.iter().all(|(&k, &c)| k == 0 || c == q + 1));
            let beta = f.beta(q).unwrap();
            assert_eq!(beta.multiplicative_order(), Some(q + 1));
        }
    }

    #[test]
    fn norm_multiplicative_and_frobenius_automorphism() {
        for q in [2u64, 3, 4, 5] {
            let f = FiniteField::with_order(q * q).unwrap();
            let elems = f.elements_by_index();
            for x in &elems {
                for y in &elems {
                    let s = |e: &FieldElement| e.frobenius(q).unwrap();
                    assert_eq!(s(&(x + y)), &s(x) + &s(y));
                    assert_eq!(s(&(x * y)), &s(x) * &s(y));
                    let n = |e: &FieldElement| e.norm(q).unwrap();
                    assert_eq!(n(&(x * y)), &n(x) * &n(y));
                }
            }
        }
    }
}

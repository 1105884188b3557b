//! Finite abelian groups in invariant-factor form, their integer group rings,
//! and characters.
//!
//! Group elements are tuples `(g_1, ..., g_j)` with `g_i` in `[0, q_i)`, and
//! are addressed by their mixed-radix index (row-major, first factor most
//! significant). Group-ring elements are dense integer coefficient arrays
//! indexed the same way; complex numbers only show up after evaluating at a
//! character.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Largest group order accepted; addition tables are precomputed.
pub const MAX_GROUP_ORDER: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group needs at least one factor")]
    Empty,
    #[error("cyclic factor {0} is smaller than 2")]
    FactorTooSmall(usize),
    #[error("group order exceeds {MAX_GROUP_ORDER}")]
    TooLarge,
    #[error("operands live over different groups ({0} vs {1})")]
    GroupMismatch(String, String),
    #[error("group element {0:?} is out of range")]
    BadElement(Vec<usize>),
    #[error("cannot parse group {0:?}")]
    Parse(String),
}

#[derive(Debug, PartialEq, Eq)]
struct GroupInner {
    factors: Vec<usize>,
    order: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
}

/// `Z_{q1} x ... x Z_{qj}`. Cheap to clone.
#[derive(Debug, Clone)]
pub struct AbelianGroup {
    inner: Arc<GroupInner>,
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.factors == other.inner.factors
    }
}

impl Eq for AbelianGroup {}

impl AbelianGroup {
    pub fn new(factors: &[usize]) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::Empty);
        }
        if let Some(&q) = factors.iter().find(|&&q| q < 2) {
            return Err(GroupError::FactorTooSmall(q));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &q| acc.checked_mul(q))
            .filter(|&f| f <= MAX_GROUP_ORDER)
            .ok_or(GroupError::TooLarge)?;
        let decode = |mut idx: usize| {
            let mut t = vec![0; factors.len()];
            for (slot, &q) in t.iter_mut().zip(factors).rev() {
                *slot = idx % q;
                idx /= q;
            }
            t
        };
        let encode = |t: &[usize]| t.iter().zip(factors).fold(0, |acc, (&g, &q)| acc * q + g);
        let tuples: Vec<Vec<usize>> = (0..order).map(decode).collect();
        let mut add = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                let sum: Vec<usize> = tuples[a]
                    .iter()
                    .zip(&tuples[b])
                    .zip(factors)
                    .map(|((x, y), q)| (x + y) % q)
                    .collect();
                add[a * order + b] = encode(&sum);
            }
        }
        let neg = tuples
            .iter()
            .map(|t| {
                let n: Vec<usize> = t.iter().zip(factors).map(|(x, q)| (q - x) % q).collect();
                encode(&n)
            })
            .collect();
        Ok(Self {
            inner: Arc::new(GroupInner {
                factors: factors.to_vec(),
                order,
                add,
                neg,
            }),
        })
    }

    pub fn cyclic(q: usize) -> Result<Self, GroupError> {
        Self::new(&[q])
    }

    pub fn factors(&self) -> &[usize] {
        &self.inner.factors
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.inner.add[a * self.inner.order + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.inner.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn encode(&self, tuple: &[usize]) -> Result<usize, GroupError> {
        if tuple.len() != self.factors().len()
            || tuple.iter().zip(self.factors()).any(|(g, q)| g >= q)
        {
            return Err(GroupError::BadElement(tuple.to_vec()));
        }
        Ok(tuple
            .iter()
            .zip(self.factors())
            .fold(0, |acc, (&g, &q)| acc * q + g))
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.factors().len()];
        for (slot, &q) in t.iter_mut().zip(self.factors()).rev() {
            *slot = idx % q;
            idx /= q;
        }
        t
    }

    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let factors = s
            .split('x')
            .map(|part| {
                part.strip_prefix('Z')
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| GroupError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&factors)
    }

    fn check_same(&self, other: &Self) -> Result<(), GroupError> {
        if self == other {
            Ok(())
        } else {
            Err(GroupError::GroupMismatch(
                self.to_string(),
                other.to_string(),
            ))
        }
    }

    /// The designated real-valued nontrivial character: exponent `q_i / 2` in
    /// the first even factor, zero elsewhere. `None` when the order is odd.
    pub fn real_character(&self) -> Option<Character> {
        let pos = self.factors().iter().position(|q| q % 2 == 0)?;
        let mut exponents = vec![0; self.factors().len()];
        exponents[pos] = self.factors()[pos] / 2;
        Some(Character {
            group: self.clone(),
            exponents,
        })
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().iter().map(|q| format!("Z{q}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Integer-coefficient element of the group ring, `sum_g x(g) z^g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupRingWire")]
pub struct GroupRingElement {
    group: AbelianGroup,
    coeffs: Vec<i64>,
}

#[derive(Deserialize)]
struct GroupRingWire {
    group: AbelianGroup,
    coeffs: Vec<i64>,
}

impl TryFrom<GroupRingWire> for GroupRingElement {
    type Error = GroupError;

    fn try_from(w: GroupRingWire) -> Result<Self, GroupError> {
        Self::from_coeffs(&w.group, w.coeffs)
    }
}

impl GroupRingElement {
    pub fn zero(group: &AbelianGroup) -> Self {
        Self {
            group: group.clone(),
            coeffs: vec![0; group.order()],
        }
    }

    /// `delta_g`, i.e. the monomial `z^g`.
    pub fn monomial(group: &AbelianGroup, g: usize) -> Self {
        let mut x = Self::zero(group);
        x.coeffs[g] = 1;
        x
    }

    pub fn identity(group: &AbelianGroup) -> Self {
        Self::monomial(group, 0)
    }

    pub fn scalar(group: &AbelianGroup, c: i64) -> Self {
        let mut x = Self::zero(group);
        x.coeffs[0] = c;
        x
    }

    /// The geometric sum `1(z)`: every coefficient equal to one.
    pub fn geometric_sum(group: &AbelianGroup) -> Self {
        Self {
            group: group.clone(),
            coeffs: vec![1; group.order()],
        }
    }

    pub fn from_coeffs(group: &AbelianGroup, coeffs: Vec<i64>) -> Result<Self, GroupError> {
        if coeffs.len() != group.order() {
            return Err(GroupError::BadElement(vec![coeffs.len()]));
        }
        Ok(Self {
            group: group.clone(),
            coeffs,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> i64 {
        self.coeffs[g]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The group element `g` when this is exactly `z^g`.
    pub fn as_monomial(&self) -> Option<usize> {
        let mut found = None;
        for (g, &c) in self.coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 if found.is_none() => found = Some(g),
                _ => return None,
            }
        }
        found
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupError> {
        self.group.check_same(&other.group)?;
        Ok(Self {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GroupError> {
        self.group.check_same(&other.group)?;
        Ok(Self {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Convolution `(x*y)(g) = sum_{g'} x(g') y(g - g')`.
    pub fn convolve(&self, other: &Self) -> Result<Self, GroupError> {
        self.group.check_same(&other.group)?;
        let mut out = vec![0; self.group.order()];
        convolve_into(&self.group, &self.coeffs, &other.coeffs, &mut out);
        Ok(Self {
            group: self.group.clone(),
            coeffs: out,
        })
    }

    /// `x~(g) = x(-g)`; integer coefficients are their own conjugates.
    pub fn involution(&self) -> Self {
        let mut out = vec![0; self.group.order()];
        for (g, &c) in self.coeffs.iter().enumerate() {
            out[self.group.neg(g)] = c;
        }
        Self {
            group: self.group.clone(),
            coeffs: out,
        }
    }

    /// `x(gamma) = sum_g x(g) gamma(g)`.
    pub fn evaluate(&self, gamma: &Character) -> Result<C64, GroupError> {
        self.group.check_same(&gamma.group)?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(g, &c)| gamma.value(g) * c as f64)
            .sum())
    }

    /// The filter `x(T) = sum_g x(g) T^g` as a dense `f x f` integer matrix,
    /// where `(T^g y)(g') = y(g' - g)`; entry `(a, b)` is `x(a - b)`.
    pub fn translation_lift(&self) -> Vec<Vec<i64>> {
        let f = self.group.order();
        (0..f)
            .map(|a| (0..f).map(|b| self.coeffs[self.group.sub(a, b)]).collect())
            .collect()
    }
}

/// `out += x * y` on raw coefficient slices.
pub(crate) fn convolve_into(group: &AbelianGroup, x: &[i64], y: &[i64], out: &mut [i64]) {
    for (a, &xa) in x.iter().enumerate() {
        if xa == 0 {
            continue;
        }
        for (b, &yb) in y.iter().enumerate() {
            if yb != 0 {
                out[group.add(a, b)] += xa * yb;
            }
        }
    }
}

impl fmt::Display for GroupRingElement {
    /// Sparse form `c*z^(g1,...,gj) + ...`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(g, &c)| {
                let t: Vec<String> = self.group.decode(g).iter().map(|x| x.to_string()).collect();
                format!("{c}*z^({})", t.join(","))
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// `e^{2 pi i num / den}`, exact on the quarter turns.
pub fn root_of_unity(num: u64, den: u64) -> C64 {
    let num = num % den;
    if (4 * num).is_multiple_of(den) {
        return match 4 * num / den {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * num as f64 / den as f64;
    C64::new(theta.cos(), theta.sin())
}

/// `gamma(g) = prod_i exp(2 pi i e_i g_i / q_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CharacterWire")]
pub struct Character {
    group: AbelianGroup,
    exponents: Vec<usize>,
}

#[derive(Deserialize)]
struct CharacterWire {
    group: AbelianGroup,
    exponents: Vec<usize>,
}

impl TryFrom<CharacterWire> for Character {
    type Error = GroupError;

    fn try_from(w: CharacterWire) -> Result<Self, GroupError> {
        Self::new(&w.group, &w.exponents)
    }
}

impl Character {
    pub fn new(group: &AbelianGroup, exponents: &[usize]) -> Result<Self, GroupError> {
        group.encode(exponents)?;
        Ok(Self {
            group: group.clone(),
            exponents: exponents.to_vec(),
        })
    }

    pub fn trivial(group: &AbelianGroup) -> Self {
        Self {
            group: group.clone(),
            exponents: vec![0; group.factors().len()],
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Position in [`characters_of`] order.
    pub fn index(&self) -> usize {
        self.group.encode(&self.exponents).expect("valid exponents")
    }

    /// `gamma(g)` for the group element with index `g`.
    pub fn value(&self, g: usize) -> C64 {
        root_of_unity(self.phase(g), self.group.order() as u64)
    }

    /// `gamma(g) = exp(2 pi i phase / f)`, phase reduced mod `f`.
    fn phase(&self, g: usize) -> u64 {
        let f = self.group.order() as u64;
        let num: u64 = self
            .group
            .decode(g)
            .iter()
            .zip(&self.exponents)
            .zip(self.group.factors())
            .map(|((&gi, &ei), &qi)| ((gi * ei) % qi) as u64 * (f / qi as u64))
            .sum();
        num % f
    }

    /// True when every value is real.
    pub fn is_real(&self) -> bool {
        self.exponents
            .iter()
            .zip(self.group.factors())
            .all(|(&e, &q)| (2 * e) % q == 0)
    }

    /// True when `g -> gamma(g)` is injective.
    pub fn is_faithful(&self) -> bool {
        (1..self.group.order()).all(|g| self.phase(g) != 0)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        write!(f, "chi({})", parts.join(","))
    }
}

/// All `f` characters, trivial first, lexicographic in the exponent tuple.
pub fn characters_of(group: &AbelianGroup) -> Vec<Character> {
    (0..group.order())
        .map(|idx| Character {
            group: group.clone(),
            exponents: group.decode(idx),
        })
        .collect()
}

pub fn geometric_sum(group: &AbelianGroup) -> GroupRingElement {
    GroupRingElement::geometric_sum(group)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> AbelianGroup {
        AbelianGroup::cyclic(n).unwrap()
    }

    #[test]
    fn monomials_multiply_by_adding_exponents() {
        let g = AbelianGroup::new(&[2, 3]).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let p = GroupRingElement::monomial(&g, a)
                    .convolve(&GroupRingElement::monomial(&g, b))
                    .unwrap();
                assert_eq!(p.as_monomial(), Some(g.add(a, b)));
            }
        }
    }

    #[test]
    fn geometric_sum_squares_to_order_times_itself() {
        let g = z(3);
        let one = geometric_sum(&g);
        assert_eq!(one.convolve(&one).unwrap(), one.scale(3));
    }

    #[test]
    fn involution_cases() {
        let g = z(4);
        let x = GroupRingElement::from_coeffs(&g, vec![0, 2, 0, 3]).unwrap();
        assert_eq!(x.involution().coeffs(), &[0, 3, 0, 2]);
        assert_eq!(geometric_sum(&g).involution(), geometric_sum(&g));
        assert_eq!(
            GroupRingElement::monomial(&g, 1).involution().as_monomial(),
            Some(3)
        );
        assert_eq!(x.to_string(), "2*z^(1) + 3*z^(3)");
        assert_eq!(GroupRingElement::zero(&g).to_string(), "0");
    }

    #[test]
    fn characters_listing() {
        let cs = characters_of(&z(2));
        assert_eq!(cs.len(), 2);
        assert!(cs[0].is_trivial());
        assert_eq!(cs[1].value(1), C64::new(-1.0, 0.0));
        let cs = characters_of(&z(3));
        let w = cs[1].value(1);
        assert!((w - C64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);
        assert!((cs[2].value(1) - w.conj()).norm() < 1e-12);
        assert_eq!(characters_of(&AbelianGroup::new(&[2, 2]).unwrap()).len(), 4);
    }

    #[test]
    fn geometric_sum_evaluations() {
        for factors in [
            vec![2],
            vec![3],
            vec![4],
            vec![2, 2],
            vec![3, 3],
            vec![2, 4],
        ] {
            let g = AbelianGroup::new(&factors).unwrap();
            let one = geometric_sum(&g);
            for gamma in characters_of(&g) {
                let v = one.evaluate(&gamma).unwrap();
                if gamma.is_trivial() {
                    assert_eq!(v, C64::new(g.order() as f64, 0.0));
                } else {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn character_homomorphism_and_unimodularity() {
        let g = AbelianGroup::new(&[2, 6]).unwrap();
        for gamma in characters_of(&g) {
            for a in 0..g.order() {
                assert!((gamma.value(a).norm() - 1.0).abs() < 1e-12);
                for b in 0..g.order() {
                    let lhs = gamma.value(g.add(a, b));
                    assert!((lhs - gamma.value(a) * gamma.value(b)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parseval_rows() {
        let g = AbelianGroup::new(&[2, 3]).unwrap();
        let cs = characters_of(&g);
        for a in 0..g.order() {
            for b in 0..g.order() {
                let s: C64 = cs.iter().map(|c| c.value(a) * c.value(b).conj()).sum();
                let want = if a == b { g.order() as f64 } else { 0.0 };
                assert!((s - C64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn lifts() {
        let g = AbelianGroup::new(&[2, 2]).unwrap();
        let id = GroupRingElement::identity(&g).translation_lift();
        for (a, row) in id.iter().enumerate() {
            for (b, &x) in row.iter().enumerate() {
                assert_eq!(x, (a == b) as i64);
            }
        }
        assert!(geometric_sum(&g)
            .translation_lift()
            .iter()
            .all(|row| row.iter().all(|&x| x == 1)));
    }

    #[test]
    fn real_character_choice() {
        let g = AbelianGroup::new(&[3, 4, 2]).unwrap();
        let c = g.real_character().unwrap();
        assert_eq!(c.exponents(), &[0, 2, 0]);
        assert!(c.is_real());
        assert!(z(3).real_character().is_none());
    }

    #[test]
    fn group_parse_and_errors() {
        let g = AbelianGroup::parse("Z2xZ4").unwrap();
        assert_eq!(g.to_string(), "Z2xZ4");
        assert!(AbelianGroup::parse("Z2*Z4").is_err());
        assert_eq!(AbelianGroup::new(&[1]), Err(GroupError::FactorTooSmall(1)));
        let a = GroupRingElement::zero(&z(2));
        assert!(a.convolve(&GroupRingElement::zero(&z(3))).is_err());
        assert!(a.evaluate(&Character::trivial(&z(3))).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = AbelianGroup::new(&[2, 3]).unwrap();
        let x = GroupRingElement::from_coeffs(&g, vec![1, 0, -2, 0, 0, 7]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<GroupRingElement>(&s).unwrap(), x);
        let c = Character::new(&g, &[1, 2]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Character>(&s).unwrap(), c);
        assert!(
            serde_json::from_str::<GroupRingElement>(r#"{"group":"Z2","coeffs":[1]}"#).is_err()
        );
    }
}

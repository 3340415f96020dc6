//! Arithmetic in prime and extension fields F_{p^k}.
//!
//! An element is stored as the integer `sum c_i p^i` of its coefficient
//! vector `(c_0, .., c_{k-1})` in the polynomial basis `1, x, .., x^{k-1}`
//! modulo the field's modulus. The same integer is the element's index
//! in every enumeration performed by this crate, and its hex form is what
//! reports and CSV dumps print.
//!
//! Multiplication picks one of three backends at construction time: a
//! full product table for q <= 256, log/antilog tables up to 2^16 and
//! schoolbook polynomial multiplication otherwise.

mod extension;
pub(crate) mod fp_poly;

pub use extension::Extension;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest field size (as a bit count) accepted unless a caller asks for more.
pub const DEFAULT_FIELD_BITS: u32 = 40;

const MUL_TABLE_MAX: u64 = 256;
const LOG_TABLE_MAX: u64 = 1 << 16;

/// A field element in integer encoding. Only meaningful together with its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u64);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Defining data of a finite field: characteristic, degree, modulus and generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    /// Monic irreducible modulus, coefficients low-to-high (length k+1).
    pub modulus: Vec<u64>,
    /// Generator of the multiplicative group.
    pub zeta: Elem,
}

impl FieldSpec {
    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// Text form `p^k:c0,c1,...,ck`.
    pub fn to_text(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(u64::to_string).collect();
        format!("{}^{}:{}", self.p, self.k, coeffs.join(","))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

enum Arith {
    Table { mul: Vec<u32>, inv: Vec<u32> },
    Log { log: Vec<u32>, exp: Vec<u32> },
    Generic,
}

struct Inner {
    spec: FieldSpec,
    q: u64,
    arith: Arith,
}

/// A constructed finite field. Cheap to clone; immutable.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.inner.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.spec.p == other.inner.spec.p
                && self.inner.spec.k == other.inner.spec.k
                && self.inner.spec.modulus == other.inner.spec.modulus)
    }
}

impl Eq for Field {}

impl Field {
    /// `make_field`: smallest monic irreducible modulus and smallest generator.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        Self::with_limit(p, k, DEFAULT_FIELD_BITS)
    }

    pub fn with_limit(p: u64, k: u32, limit_bits: u32) -> Result<Field> {
        check_size(p, k, limit_bits)?;
        let modulus = smallest_irreducible(p, k);
        Self::from_modulus_unchecked(p, k, modulus)
    }

    /// Builds F_{p^k} from an explicit modulus, which is validated.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        let k = modulus.len().checked_sub(1).ok_or(Error::BadModulus(0))? as u32;
        check_size(p, k, DEFAULT_FIELD_BITS)?;
        if modulus.last() != Some(&1)
            || modulus.iter().any(|&c| c >= p)
            || !fp_poly::is_irreducible(&modulus, p)
        {
            return Err(Error::BadModulus(k));
        }
        Self::from_modulus_unchecked(p, k, modulus)
    }

    /// Builds the prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Self::new(p, 1)
    }

    /// Accepts `q` as a prime power (`16`), `p^k` (`2^4`) or the full text
    /// form `p^k:c0,...,ck`.
    pub fn parse(text: &str) -> Result<Field> {
        let text = text.trim();
        let (head, modulus) = match text.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (text, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (parse_u64(p)?, parse_u64(k)? as u32),
            None => prime_power(parse_u64(head)?)?,
        };
        match modulus {
            None => Field::new(p, k),
            Some(m) => {
                let coeffs = m
                    .split(',')
                    .map(parse_u64)
                    .collect::<Result<Vec<u64>>>()?;
                if coeffs.len() != k as usize + 1 {
                    return Err(Error::Parse(format!(
                        "modulus of F_{p}^{k} needs {} coefficients",
                        k + 1
                    )));
                }
                if !fp_poly::is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                Field::with_modulus(p, coeffs)
            }
        }
    }

    fn from_modulus_unchecked(p: u64, k: u32, modulus: Vec<u64>) -> Result<Field> {
        let q = p.pow(k);
        let mut inner = Inner {
            spec: FieldSpec { p, k, modulus, zeta: Elem::ZERO },
            q,
            arith: Arith::Generic,
        };
        let zeta = find_generator(&inner);
        inner.spec.zeta = zeta;
        inner.arith = build_tables(&inner);
        Ok(Field { inner: Arc::new(inner) })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    pub fn p(&self) -> u64 {
        self.inner.spec.p
    }

    pub fn k(&self) -> u32 {
        self.inner.spec.k
    }

    pub fn zeta(&self) -> Elem {
        self.inner.spec.zeta
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.inner.q
    }

    /// Checked conversion from an integer index.
    pub fn elem(&self, v: u64) -> Result<Elem> {
        if v < self.inner.q {
            Ok(Elem(v))
        } else {
            Err(Error::Param(format!("{v} is not an element of F_{}", self.inner.q)))
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.inner.q).map(Elem)
    }

    pub fn digits(&self, a: Elem) -> Vec<u64> {
        let p = self.p();
        let mut v = a.0;
        (0..self.k())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> Elem {
        let p = self.p();
        Elem(digits.iter().rev().fold(0u64, |acc, &d| acc * p + d % p))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.inner.spec.p;
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.inner.spec.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u64, 1u64);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.inner.spec.p;
        if p == 2 {
            return a;
        }
        if self.inner.spec.k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u64, 1u64);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            place *= p;
            x /= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.arith {
            Arith::Table { mul, .. } => Elem(mul[(a.0 * self.inner.q + b.0) as usize] as u64),
            Arith::Log { log, exp } => {
                if a.0 == 0 || b.0 == 0 {
                    Elem::ZERO
                } else {
                    Elem(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize] as u64)
                }
            }
            Arith::Generic => generic_mul(&self.inner, a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.inner.arith {
            Arith::Table { inv, .. } => Elem(inv[a.0 as usize] as u64),
            Arith::Log { log, exp } => {
                let order = (self.inner.q - 1) as u32;
                let l = log[a.0 as usize];
                Elem(exp[((order - l) % order) as usize] as u64)
            }
            Arith::Generic => self.pow(a, self.inner.q - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        pow_with(a, e, |x, y| self.mul(x, y))
    }

    /// Embeds an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        let p = self.p() as i64;
        Elem(v.rem_euclid(p) as u64)
    }

    /// Evaluates `sum coeffs[i] z^i` by Horner's rule.
    #[inline]
    pub fn horner(&self, coeffs: &[Elem], z: Elem) -> Elem {
        coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| self.add(self.mul(acc, z), c))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: Elem) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let mut order = self.q() - 1;
        for r in fp_poly::prime_factors(order) {
            while order % r == 0 && self.pow(a, order / r) == Elem::ONE {
                order /= r;
            }
        }
        Ok(order)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec().to_text())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Field, D::Error> {
        let s = String::deserialize(d)?;
        Field::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        Field::parse(s)
    }
}

/// Checked arithmetic operation kinds, for callers working with tagged elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u64),
}

/// An element bound to its field; arithmetic checks that operands agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub field: Field,
    pub value: Elem,
}

impl FieldElement {
    pub fn new(field: &Field, value: u64) -> Result<Self> {
        Ok(FieldElement { value: field.elem(value)?, field: field.clone() })
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn wrap(&self, value: Elem) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.wrap(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.wrap(self.field.pow(self.value, e))
    }
}

/// Applies `op` to one (inv, pow) or two (add, sub, mul) operands.
pub fn arith(op: ArithOp, operands: &[FieldElement]) -> Result<FieldElement> {
    let arity = match op {
        ArithOp::Inv | ArithOp::Pow(_) => 1,
        _ => 2,
    };
    if operands.len() != arity {
        return Err(Error::Param(format!("{op:?} takes {arity} operand(s)")));
    }
    let a = &operands[0];
    match op {
        ArithOp::Add => a.add(&operands[1]),
        ArithOp::Sub => a.sub(&operands[1]),
        ArithOp::Mul => a.mul(&operands[1]),
        ArithOp::Inv => a.inv(),
        ArithOp::Pow(e) => Ok(a.pow(e)),
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Splits q into (p, k) with q = p^k.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    let factors = fp_poly::prime_factors(q);
    if factors.len() != 1 {
        return Err(Error::Param(format!("{q} is not a prime power")));
    }
    let p = factors[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Ok((p, k))
}

fn check_size(p: u64, k: u32, limit_bits: u32) -> Result<()> {
    if !fp_poly::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k < 1 {
        return Err(Error::InvalidDegree(k));
    }
    let bits = (k as f64) * (p as f64).log2();
    if bits > limit_bits.min(62) as f64 {
        return Err(Error::FieldTooLarge { p, k, limit_bits });
    }
    Ok(())
}

/// First monic irreducible of degree k when the non-leading coefficients
/// are read as the integer `sum c_i p^i`.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let count = p.pow(k);
    for idx in 0..count {
        let mut f = Vec::with_capacity(k as usize + 1);
        let mut v = idx;
        for _ in 0..k {
            f.push(v % p);
            v /= p;
        }
        f.push(1);
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn pow_with(a: Elem, mut e: u64, mul: impl Fn(Elem, Elem) -> Elem) -> Elem {
    let mut acc = Elem::ONE;
    let mut b = a;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    acc
}

fn generic_mul(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let spec = &inner.spec;
    let k = spec.k as usize;
    if spec.p == 2 {
        // carry-less product then reduction by the modulus bits
        let modbits: u128 = spec
            .modulus
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << i));
        let mut prod: u128 = 0;
        let (x, mut y) = (a.0 as u128, b.0);
        let mut shift = 0;
        while y > 0 {
            if y & 1 == 1 {
                prod ^= x << shift;
            }
            y >>= 1;
            shift += 1;
        }
        for bit in (k..2 * k).rev() {
            if prod >> bit & 1 == 1 {
                prod ^= modbits << (bit - k);
            }
        }
        return Elem(prod as u64);
    }
    if k == 1 {
        return Elem(fp_poly::mulp(a.0, b.0, spec.p));
    }
    let p = spec.p;
    let split = |mut v: u64| -> Vec<u64> {
        (0..k)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let r = fp_poly::mulmod(&split(a.0), &split(b.0), &spec.modulus, p);
    Elem(r.iter().rev().fold(0u64, |acc, &d| acc * p + d))
}

fn find_generator(inner: &Inner) -> Elem {
    let q = inner.q;
    let factors = fp_poly::prime_factors(q - 1);
    let mul = |x, y| generic_mul(inner, x, y);
    (1..q)
        .map(Elem)
        .find(|&c| {
            factors
                .iter()
                .all(|&r| pow_with(c, (q - 1) / r, mul) != Elem::ONE)
        })
        .expect("multiplicative group of a finite field is cyclic")
}

fn build_tables(inner: &Inner) -> Arith {
    let q = inner.q;
    if q > LOG_TABLE_MAX {
        return Arith::Generic;
    }
    let order = (q - 1) as usize;
    let mut log = vec![0u32; q as usize];
    let mut exp = vec![0u32; 2 * order.max(1)];
    let mut cur = Elem::ONE;
    for i in 0..order {
        exp[i] = cur.0 as u32;
        log[cur.0 as usize] = i as u32;
        cur = generic_mul(inner, cur, inner.spec.zeta);
    }
    for i in order..2 * order {
        exp[i] = exp[i - order];
    }
    if q > MUL_TABLE_MAX {
        return Arith::Log { log, exp };
    }
    let qs = q as usize;
    let mut mul = vec![0u32; qs * qs];
    let mut inv = vec![0u32; qs];
    for a in 1..qs {
        for b in 1..qs {
            mul[a * qs + b] = exp[(log[a] + log[b]) as usize];
        }
        inv[a] = exp[(order - log[a] as usize) % order];
    }
    Arith::Table { mul, inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force oracle: order of each element by repeated multiplication mod p.
    fn order_by_enumeration(a: u64, p: u64) -> u64 {
        let mut x = a % p;
        let mut k = 1;
        while x != 1 {
            x = x * a % p;
            k += 1;
        }
        k
    }

    #[test]
    fn generator_of_f5_is_two() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(order_by_enumeration(2, 5), 4);
        assert_eq!(f.zeta(), Elem(2));
    }

    #[test]
    fn generator_of_f7_is_three() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(order_by_enumeration(2, 7), 3);
        assert_eq!(order_by_enumeration(3, 7), 6);
        assert_eq!(f.zeta(), Elem(3));
    }

    #[test]
    fn f4_modulus_and_product() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.spec().modulus, vec![1, 1, 1]);
        // x * x = x + 1
        assert_eq!(f.mul(Elem(2), Elem(2)), Elem(3));
        assert_eq!(f.spec().to_text(), "2^2:1,1,1");
    }

    #[test]
    fn inverse_in_f5() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.inv(Elem(2)).unwrap(), Elem(3));
        assert_eq!(f.inv(Elem(0)), Err(Error::ZeroInverse));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(6, 1).unwrap_err(), Error::NotPrime(6));
        assert_eq!(Field::new(5, 0).unwrap_err(), Error::InvalidDegree(0));
        assert!(matches!(Field::new(2, 63), Err(Error::FieldTooLarge { .. })));
        assert!(matches!(Field::with_modulus(2, vec![1, 0, 1]), Err(Error::BadModulus(2))));
    }

    #[test]
    fn mixed_field_operands_rejected() {
        let f5 = Field::new(5, 1).unwrap();
        let f7 = Field::new(7, 1).unwrap();
        let a = FieldElement::new(&f5, 1).unwrap();
        let b = FieldElement::new(&f7, 1).unwrap();
        assert_eq!(arith(ArithOp::Add, &[a.clone(), b]), Err(Error::FieldMismatch));
        let zero = FieldElement::new(&f5, 0).unwrap();
        assert_eq!(arith(ArithOp::Inv, &[zero]), Err(Error::ZeroInverse));
        let three = arith(ArithOp::Pow(3), &[FieldElement::new(&f5, 2).unwrap()]).unwrap();
        assert_eq!(three.value, Elem(3));
        assert_eq!(arith(ArithOp::Add, &[a.clone(), FieldElement::new(&f5, 0).unwrap()]).unwrap(), a);
    }

    #[test]
    fn parse_forms_agree() {
        let a = Field::parse("16").unwrap();
        let b = Field::parse("2^4").unwrap();
        let c = Field::parse(&a.spec().to_text()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.zeta(), c.zeta());
        assert!(Field::parse("12").is_err());
        assert!(Field::parse("2^2:1,0,1").is_err());
        assert!(Field::parse("2^2:1,1").is_err());
    }

    fn fields_up_to_64() -> Vec<Field> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (17, 1), (5, 2), (2, 5), (2, 6)]
            .into_iter()
            .map(|(p, k)| Field::new(p, k).unwrap())
            .collect()
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in fields_up_to_64() {
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, Elem::ZERO), a);
                assert_eq!(f.mul(a, Elem::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.mul(a, b), generic_mul(&f.inner, a, b));
                    for &c in els.iter().step_by(3) {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn generator_has_full_order() {
        for f in fields_up_to_64()
            .into_iter()
            .chain([Field::new(2, 8).unwrap(), Field::new(2, 16).unwrap(), Field::new(3, 5).unwrap()])
        {
            let q = f.q();
            assert_eq!(f.pow(f.zeta(), q - 1), Elem::ONE);
            for r in fp_poly::prime_factors(q - 1) {
                assert_ne!(f.pow(f.zeta(), (q - 1) / r), Elem::ONE, "{f:?}");
            }
            assert_eq!(f.order_of(f.zeta()).unwrap(), q - 1);
        }
    }

    #[test]
    fn backends_agree_on_large_field() {
        // F_{2^16} uses log tables; F_{2^20} and F_{3^11} use the generic path
        let f = Field::new(2, 16).unwrap();
        for a in (1..65536u64).step_by(977) {
            for b in (1..65536u64).step_by(1231) {
                assert_eq!(f.mul(Elem(a), Elem(b)), generic_mul(&f.inner, Elem(a), Elem(b)));
            }
        }
        for (p, k) in [(2, 20), (3, 11)] {
            let g = Field::new(p, k).unwrap();
            let z = g.zeta();
            assert_eq!(g.pow(z, g.q() - 1), Elem::ONE);
            let a = g.pow(z, 12345);
            assert_eq!(g.mul(a, g.inv(a).unwrap()), Elem::ONE);
        }
    }

    #[test]
    fn digits_roundtrip() {
        let f = Field::new(3, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_digits(&f.digits(a)), a);
        }
    }
}

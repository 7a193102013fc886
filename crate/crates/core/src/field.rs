//! GF(2^w) arithmetic for `w <= 32` and polynomials over such fields.
//!
//! Elements are `u64` values below `2^w`; bit `i` is the coefficient of
//! `x^i` in the polynomial basis. The default modulus for each degree is the
//! numerically smallest irreducible polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest irreducible polynomial over GF(2) for each degree 1..=32
/// (index `w - 1`), bit `i` = coefficient of `x^i`.
pub const IRREDUCIBLE_TABLE: [u64; 32] = [
    0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b, 0x20009, 0x40009, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021,
    0x100001b, 0x2000009, 0x400001b, 0x8000027, 0x10000003, 0x20000005, 0x40000003, 0x80000009,
    0x10000008d,
];

/// Binary polynomial product (no reduction). Inputs must have degree < 32.
pub fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
    }
    acc
}

/// Remainder of binary polynomial `a` modulo `m` (`m != 0`).
pub fn binary_poly_rem(mut a: u64, m: u64) -> u64 {
    assert!(m != 0, "division by the zero polynomial");
    let dm = 63 - m.leading_zeros();
    while a != 0 {
        let da = 63 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

fn binary_poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = binary_poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `m` of degree `w` is irreducible over GF(2) iff
/// `x^(2^w) = x (mod m)` and `gcd(x^(2^(w/p)) - x, m) = 1` for every prime `p | w`.
pub fn is_irreducible_binary(m: u64, w: u32) -> bool {
    if w == 0 || w > 32 || 63 - m.leading_zeros() != w {
        return false;
    }
    let mulmod = |a: u64, b: u64| binary_poly_rem(clmul(a, b), m);
    let x = binary_poly_rem(0b10, m);
    let frobenius = |k: u32| {
        let mut v = x;
        for _ in 0..k {
            v = mulmod(v, v);
        }
        v
    };
    if frobenius(w) != x {
        return false;
    }
    prime_divisors(w)
        .into_iter()
        .all(|p| binary_poly_gcd(m, frobenius(w / p) ^ x) == 1)
}

/// The field GF(2^w) with a fixed irreducible modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtField {
    w: u32,
    modulus: u64,
}

impl ExtField {
    /// GF(2^w) with the table modulus.
    pub fn new(w: u32) -> Result<Self> {
        if !(1..=32).contains(&w) {
            return Err(Error::UnsupportedDegree(w));
        }
        Self::with_modulus(w, IRREDUCIBLE_TABLE[w as usize - 1])
    }

    pub fn with_modulus(w: u32, modulus: u64) -> Result<Self> {
        if !(1..=32).contains(&w) {
            return Err(Error::UnsupportedDegree(w));
        }
        if !is_irreducible_binary(modulus, w) {
            return Err(Error::ReducibleModulus { degree: w, modulus });
        }
        Ok(Self { w, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.w
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of elements, `2^w`.
    pub fn order(&self) -> u64 {
        1u64 << self.w
    }

    pub fn mask(&self) -> u64 {
        self.order() - 1
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.order()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(self.contains(a) && self.contains(b));
        let top = 1u64 << self.w;
        let mut acc = 0u64;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, u128::from(self.order()) - 2))
        }
    }

    /// Hex serialization of an element.
    pub fn format_element(&self, a: u64) -> String {
        format!("{a:x}")
    }

    pub fn parse_element(&self, s: &str) -> Result<u64> {
        let v = u64::from_str_radix(s.trim().trim_start_matches("0x"), 16)
            .map_err(|e| Error::Parse(format!("bad field element {s:?}: {e}")))?;
        if !self.contains(v) {
            return Err(Error::Parse(format!("element {v:#x} outside GF(2^{})", self.w)));
        }
        Ok(v)
    }
}

/// Polynomial over an [`ExtField`], coefficients low degree first, with no
/// trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    field: ExtField,
    coeffs: Vec<u64>,
}

impl FieldPoly {
    pub fn new(field: ExtField, mut coeffs: Vec<u64>) -> Self {
        assert!(coeffs.iter().all(|&c| field.contains(c)), "coefficient outside field");
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn zero(field: ExtField) -> Self {
        Self { field, coeffs: Vec::new() }
    }

    pub fn one(field: ExtField) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: ExtField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// `X` itself.
    pub fn x(field: ExtField) -> Self {
        Self::new(field, vec![0, 1])
    }

    /// Lifts a binary polynomial (bit `i` = coefficient of `X^i`) into `field`.
    pub fn from_binary(field: ExtField, bits: u64) -> Self {
        let len = 64 - bits.leading_zeros() as usize;
        Self::new(field, (0..len).map(|i| bits >> i & 1).collect())
    }

    pub fn field(&self) -> ExtField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` standing for the degree of the zero polynomial (−∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &FieldPoly) -> FieldPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        FieldPoly::new(
            self.field,
            (0..len).map(|i| self.coeff(i) ^ other.coeff(i)).collect(),
        )
    }

    pub fn mul(&self, other: &FieldPoly) -> FieldPoly {
        if self.is_zero() || other.is_zero() {
            return FieldPoly::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= f.mul(a, b);
            }
        }
        FieldPoly::new(f, out)
    }

    pub fn scale(&self, c: u64) -> FieldPoly {
        FieldPoly::new(
            self.field,
            self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &FieldPoly) -> (FieldPoly, FieldPoly) {
        let f = self.field;
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.coeffs[dd]).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(dr) = self.degree().filter(|&d| d >= dd) else {
            return (FieldPoly::zero(f), self.clone());
        };
        let mut quot = vec![0u64; dr - dd + 1];
        for top in (dd..=dr).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[top - dd] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[top - dd + j] ^= f.mul(q, d);
            }
        }
        (FieldPoly::new(f, quot), FieldPoly::new(f, rem))
    }

    pub fn rem(&self, divisor: &FieldPoly) -> FieldPoly {
        self.div_rem(divisor).1
    }

    /// `self^e mod modulus` by square-and-multiply, reducing after every step.
    pub fn pow_mod(&self, mut e: u128, modulus: &FieldPoly) -> FieldPoly {
        assert!(!modulus.is_zero(), "modulus must be nonzero");
        let mut base = self.rem(modulus);
        let mut acc = FieldPoly::one(self.field).rem(modulus);
        while e != 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            e >>= 1;
            if e != 0 {
                base = base.mul(&base).rem(modulus);
            }
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, z: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| self.field.mul(acc, z) ^ c)
    }

    pub fn monic(&self) -> FieldPoly {
        match self.degree() {
            None => self.clone(),
            Some(d) => self.scale(self.field.inv(self.coeffs[d]).expect("nonzero")),
        }
    }

    pub fn gcd(&self, other: &FieldPoly) -> FieldPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Ben-Or irreducibility test over GF(q): `self` of degree `n` is
    /// irreducible iff `gcd(X^(q^i) - X, self) = 1` for `1 <= i <= n/2`.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        let q = u128::from(self.field.order());
        let x = FieldPoly::x(self.field).rem(self);
        let mut frob = x.clone();
        for _ in 1..=n / 2 {
            frob = frob.pow_mod(q, self);
            let g = frob.add(&x).gcd(self);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }
}

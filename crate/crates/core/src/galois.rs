//! Arithmetic over prime fields GF(q).

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Largest modulus accepted. Products of two elements must fit in `u64`
/// with room to spare, and symbol tables are indexed by `u32`.
pub const MAX_MODULUS: u32 = 1 << 16;

/// The prime field GF(q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

/// An element of a [`PrimeField`].
///
/// The element remembers the modulus of the field it was created in;
/// combining elements of different fields panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    q: u32,
}

/// The operation selector of [`PrimeField::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2u32;
    while f * f <= q {
        if q.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::config(alloc::format!(
                "field modulus q={q} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        if !is_prime(q) {
            return Err(Error::config(alloc::format!(
                "field modulus q={q} is not prime"
            )));
        }
        Ok(PrimeField { q })
    }

    /// Binary field GF(2).
    pub fn binary() -> Self {
        PrimeField { q: 2 }
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Element with the given representative, reduced modulo q.
    #[inline]
    pub fn elem(&self, value: u32) -> FieldElement {
        FieldElement {
            value: value % self.q,
            q: self.q,
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All elements in increasing order of their representative.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.q != self.q {
            return Err(Error::contract(alloc::format!(
                "element of GF({}) used in GF({})",
                a.q,
                self.q
            )));
        }
        Ok(())
    }

    /// Single entry point for the field operations. `b` is required for the
    /// binary operations and ignored for `Inv` and `Neg`.
    pub fn arith(
        &self,
        op: ArithOp,
        a: FieldElement,
        b: Option<FieldElement>,
    ) -> Result<FieldElement> {
        self.check(a)?;
        let rhs = || -> Result<FieldElement> {
            let b = b.ok_or_else(|| Error::contract("binary field operation without operand"))?;
            self.check(b)?;
            Ok(b)
        };
        match op {
            ArithOp::Add => Ok(a + rhs()?),
            ArithOp::Sub => Ok(a - rhs()?),
            ArithOp::Mul => Ok(a * rhs()?),
            ArithOp::Neg => Ok(-a),
            ArithOp::Inv => a.inv(),
        }
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.q - b % self.q)
    }
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::Domain("inverse of zero"));
        }
        Ok(self.pow(self.q - 2))
    }

    pub fn pow(self, mut exp: u32) -> FieldElement {
        let q = self.q as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64 % q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            exp >>= 1;
        }
        FieldElement {
            value: acc as u32,
            q: self.q,
        }
    }

    #[inline]
    fn same_field(self, other: FieldElement) {
        assert_eq!(
            self.q, other.q,
            "combining elements of GF({}) and GF({})",
            self.q, other.q
        );
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: FieldElement) -> FieldElement {
        self.same_field(rhs);
        let v = (self.value as u64 + rhs.value as u64) % self.q as u64;
        FieldElement {
            value: v as u32,
            q: self.q,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            value: (self.q - self.value) % self.q,
            q: self.q,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.same_field(rhs);
        let v = (self.value as u64 * rhs.value as u64) % self.q as u64;
        FieldElement {
            value: v as u32,
            q: self.q,
        }
    }
}

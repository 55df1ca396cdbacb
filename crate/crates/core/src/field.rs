//! Arithmetic in GF(q), q = r^k, and polynomials over it.
//!
//! Extension fields use the polynomial basis over GF(r). An element is
//! identified by the integer `c_0 + c_1 r + ... + c_{k-1} r^{k-1}` of its
//! coefficient list, which is also its base-`q` digit when elements are
//! packed into vertex indices.

use std::fmt;

use crate::error::{capacity, domain, Result};

/// Largest field order accepted (desk scale, exhaustive tests stay cheap).
pub const MAX_FIELD_ORDER: u32 = 512;

/// Largest number of monic candidates `find_irreducible_over` will scan.
pub const MAX_IRREDUCIBLE_CANDIDATES: u64 = 1 << 20;

pub fn is_prime(r: u32) -> bool {
    if r < 2 {
        return false;
    }
    let mut i = 2u32;
    while i * i <= r {
        if r % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Splits a prime power `q` into `(r, k)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let r = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % r == 0 {
        rest /= r;
        k += 1;
    }
    (rest == 1).then_some((r, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of GF(r^k): characteristic, degree and a monic irreducible
/// modulus over GF(r) (coefficients low to high, length `k + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    characteristic: u32,
    degree: u32,
    modulus: Vec<u32>,
    order: u32,
}

/// Operation selector for [`FieldSpec::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add(FieldElement),
    Mul(FieldElement),
    Inv,
    Pow(u64),
}

impl FieldSpec {
    /// GF(r^k) with the lexicographically smallest irreducible modulus.
    pub fn new(r: u32, k: u32) -> Result<Self> {
        let modulus = find_irreducible(r, k)?;
        Self::with_modulus(r, modulus)
    }

    /// GF(q) for a prime power `q`.
    pub fn from_order(q: u32) -> Result<Self> {
        match prime_power(q) {
            Some((r, k)) => Self::new(r, k),
            None => domain(format!("{q} is not a prime power")),
        }
    }

    /// GF(r^k) with a caller-chosen modulus, checked monic and irreducible.
    pub fn with_modulus(r: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(r) {
            return domain(format!("characteristic {r} is not prime"));
        }
        if modulus.len() < 2 {
            return domain("modulus must have degree at least 1");
        }
        let k = (modulus.len() - 1) as u32;
        if *modulus.last().unwrap() != 1 {
            return domain("modulus must be monic");
        }
        if modulus.iter().any(|&c| c >= r) {
            return domain("modulus coefficient out of range");
        }
        let order = checked_order(r, k)?;
        let prime = Self::prime_unchecked(r);
        let as_poly = FieldPoly::new(modulus.iter().map(|&c| FieldElement(c)).collect());
        if !prime.is_irreducible(&as_poly) {
            return domain("modulus is reducible");
        }
        Ok(Self {
            characteristic: r,
            degree: k,
            modulus,
            order,
        })
    }

    fn prime_unchecked(r: u32) -> Self {
        Self {
            characteristic: r,
            degree: 1,
            modulus: vec![0, 1],
            order: r,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients over GF(r), low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index >= self.order {
            return domain(format!("element {index} outside GF({})", self.order));
        }
        Ok(FieldElement(index))
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.degree as usize || coeffs.iter().any(|&c| c >= self.characteristic) {
            return domain("invalid coefficient list");
        }
        Ok(FieldElement(self.pack(coeffs)))
    }

    /// Coefficient list of length `k`, low degree first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut out = vec![0; self.degree as usize];
        let mut x = a.0;
        for c in out.iter_mut() {
            *c = x % self.characteristic;
            x /= self.characteristic;
        }
        out
    }

    fn pack(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.characteristic + c)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.degree == 1 {
            return FieldElement((a.0 + b.0) % self.characteristic);
        }
        let r = self.characteristic;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % r).collect();
        FieldElement(self.pack(&sum))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let r = self.characteristic;
        let c: Vec<u32> = self.coeffs(a).iter().map(|&x| (r - x) % r).collect();
        FieldElement(self.pack(&c))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let r = self.characteristic as u64;
        if self.degree == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % r) as u32);
        }
        let k = self.degree as usize;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % r;
            }
        }
        // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for top in (k..prod.len()).rev() {
            let lead = prod[top];
            if lead == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let t = &mut prod[top - k + i];
                *t = (*t + lead * (r - m as u64)) % r;
            }
        }
        let low: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        FieldElement(self.pack(&low))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return domain("inverse of zero");
        }
        // a^(q-2) = a^-1 in the multiplicative group of order q-1
        Ok(self.pow(a, self.order as u64 - 2))
    }

    pub fn apply(&self, a: FieldElement, op: FieldOp) -> Result<FieldElement> {
        for x in [Some(a), operand(op)].into_iter().flatten() {
            self.element(x.0)?;
        }
        match op {
            FieldOp::Add(b) => Ok(self.add(a, b)),
            FieldOp::Mul(b) => Ok(self.mul(a, b)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow(e) => Ok(self.pow(a, e)),
        }
    }

    // ---- polynomials over this field ----

    pub fn poly_add(&self, f: &FieldPoly, g: &FieldPoly) -> FieldPoly {
        let len = f.coeffs.len().max(g.coeffs.len());
        let c = (0..len).map(|i| self.add(f.coeff(i), g.coeff(i))).collect();
        FieldPoly::new(c)
    }

    pub fn poly_sub(&self, f: &FieldPoly, g: &FieldPoly) -> FieldPoly {
        let len = f.coeffs.len().max(g.coeffs.len());
        let c = (0..len).map(|i| self.sub(f.coeff(i), g.coeff(i))).collect();
        FieldPoly::new(c)
    }

    pub fn poly_mul(&self, f: &FieldPoly, g: &FieldPoly) -> FieldPoly {
        if f.is_zero() || g.is_zero() {
            return FieldPoly::zero();
        }
        let mut c = vec![self.zero(); f.coeffs.len() + g.coeffs.len() - 1];
        for (i, &a) in f.coeffs.iter().enumerate() {
            for (j, &b) in g.coeffs.iter().enumerate() {
                c[i + j] = self.add(c[i + j], self.mul(a, b));
            }
        }
        FieldPoly::new(c)
    }

    /// Remainder of `f` modulo a nonzero `g`.
    pub fn poly_rem(&self, f: &FieldPoly, g: &FieldPoly) -> Result<FieldPoly> {
        let gd = match g.degree() {
            Some(d) => d,
            None => return domain("division by the zero polynomial"),
        };
        let lead_inv = self.inv(g.leading())?;
        let mut r = f.coeffs.clone();
        while r.len() > gd {
            let top = r.len() - 1;
            let factor = self.mul(r[top], lead_inv);
            if !factor.is_zero() {
                for (i, &gc) in g.coeffs.iter().enumerate() {
                    let idx = top - gd + i;
                    r[idx] = self.sub(r[idx], self.mul(factor, gc));
                }
            }
            r.pop();
        }
        Ok(FieldPoly::new(r))
    }

    /// Horner evaluation.
    pub fn poly_eval(&self, f: &FieldPoly, y: FieldElement) -> FieldElement {
        f.coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, &c| self.add(self.mul(acc, y), c))
    }

    /// `f^e mod modulus` by square-and-multiply, reducing after every product.
    pub fn poly_mod_pow(&self, f: &FieldPoly, mut e: u64, modulus: &FieldPoly) -> Result<FieldPoly> {
        match modulus.degree() {
            Some(d) if d >= 1 && modulus.leading() == self.one() => {}
            _ => return domain("modulus must be monic of degree >= 1"),
        }
        let mut base = self.poly_rem(f, modulus)?;
        let mut acc = self.poly_rem(&FieldPoly::constant(self.one()), modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_rem(&self.poly_mul(&acc, &base), modulus)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.poly_rem(&self.poly_mul(&base, &base), modulus)?;
            }
        }
        Ok(acc)
    }

    /// Exhaustive irreducibility test by trial division with every monic
    /// polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(&self, f: &FieldPoly) -> bool {
        let deg = match f.degree() {
            Some(d) if d >= 1 => d,
            _ => return false,
        };
        (1..=deg / 2)
            .all(|dd| monic_polys(self, dd).all(|g| !self.poly_rem(f, &g).map(|r| r.is_zero()).unwrap_or(false)))
    }
}

fn operand(op: FieldOp) -> Option<FieldElement> {
    match op {
        FieldOp::Add(b) | FieldOp::Mul(b) => Some(b),
        _ => None,
    }
}

fn checked_order(r: u32, k: u32) -> Result<u32> {
    match (r as u64).checked_pow(k) {
        Some(q) if q <= MAX_FIELD_ORDER as u64 => Ok(q as u32),
        _ => capacity(format!("field order {r}^{k} exceeds {MAX_FIELD_ORDER}")),
    }
}

/// All monic polynomials of degree `deg`, lower coefficients enumerated as
/// base-q integers with the constant term least significant.
fn monic_polys(field: &FieldSpec, deg: usize) -> impl Iterator<Item = FieldPoly> + '_ {
    let q = field.order as u64;
    let count = q.pow(deg as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            c.push(FieldElement((idx % q) as u32));
            idx /= q;
        }
        c.push(field.one());
        FieldPoly::new(c)
    })
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`
/// over the given field. Ordering compares coefficients from `x^{k-1}` down
/// to the constant term.
pub fn find_irreducible_over(field: &FieldSpec, k: usize) -> Result<FieldPoly> {
    if k == 0 {
        return domain("degree must be at least 1");
    }
    match (field.order as u64).checked_pow(k as u32) {
        Some(c) if c <= MAX_IRREDUCIBLE_CANDIDATES => {}
        _ => return capacity(format!("{}^{k} candidates exceed the search limit", field.order)),
    }
    match monic_polys(field, k).find(|f| field.is_irreducible(f)) {
        Some(f) => Ok(f),
        None => unreachable!("irreducible polynomials exist in every degree"),
    }
}

/// Monic irreducible polynomial of degree `k` over GF(r), coefficients low
/// to high. For `k = 1` this is `x`.
pub fn find_irreducible(r: u32, k: u32) -> Result<Vec<u32>> {
    if !is_prime(r) {
        return domain(format!("{r} is not prime"));
    }
    if k == 0 {
        return domain("degree must be at least 1");
    }
    checked_order(r, k)?;
    let prime = FieldSpec::prime_unchecked(r);
    let f = find_irreducible_over(&prime, k as usize)?;
    Ok(f.coeffs.iter().map(|c| c.0).collect())
}

/// Polynomial over GF(q), coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    coeffs: Vec<FieldElement>,
}

impl FieldPoly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    /// Builds a polynomial from element indices, low degree first.
    pub fn from_indices(field: &FieldSpec, idx: &[u32]) -> Result<Self> {
        let c = idx.iter().map(|&i| field.element(i)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(c))
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement(0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement(0))
    }
}

impl fmt::Display for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c.0) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "x")?,
                (1, v) => write!(f, "{v}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                (_, v) => write!(f, "{v}x^{i}")?,
            }
        }
        Ok(())
    }
}

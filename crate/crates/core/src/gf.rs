//! Arithmetic in GF(p^m).
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits are the
//! polynomial coefficients, constant term first. For a prime field this is the
//! ordinary residue. Fields with `q <= 2^12` carry log/antilog tables built from
//! a primitive element; larger fields multiply polynomials directly.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order get log/antilog tables.
pub const TABLE_ORDER_LIMIT: u32 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field order {0} exceeds the supported maximum 2^16")]
    OrderTooLarge(u32),
    #[error("modulus {0:?} is not a monic irreducible polynomial of degree {1}")]
    ReducibleModulus(Vec<u32>, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {value} is outside GF({q})")]
    OutOfRange { value: u64, q: u32 },
    #[error("cannot parse field declaration {0:?}")]
    BadFieldName(String),
}

/// A field element in the base-p digit encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FFElem(pub u16);

impl FFElem {
    pub const ZERO: FFElem = FFElem(0);
    pub const ONE: FFElem = FFElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0 as u32
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    /// `exp[i] = g^i` for `i` in `0..2(q-1)`, doubled to skip a modulo.
    exp: Vec<u16>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u16>,
}

/// The finite field GF(q), q = p^m.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Monic, degree `m`, coefficients constant term first (length `m + 1`).
    modulus: Vec<u32>,
    tables: Option<Arc<Tables>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// Builds GF(q). With `m > 1` and no modulus, the lowest encoded monic
/// irreducible polynomial of degree `m` is used.
pub fn make_field(q: u32, modulus: Option<&[u32]>) -> Result<FieldSpec, GfError> {
    FieldSpec::new(q, modulus)
}

impl FieldSpec {
    pub fn new(q: u32, modulus: Option<&[u32]>) -> Result<Self, GfError> {
        if q > MAX_ORDER {
            return Err(GfError::OrderTooLarge(q));
        }
        let (p, m) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
        let modulus = if m == 1 {
            if let Some(given) = modulus {
                if given.len() != 2 || given[1] != 1 || given[0] >= p {
                    return Err(GfError::ReducibleModulus(given.to_vec(), m));
                }
            }
            vec![0, 1]
        } else {
            match modulus {
                Some(given) => {
                    let ok = given.len() == m as usize + 1
                        && given[m as usize] == 1
                        && given.iter().all(|&c| c < p)
                        && is_irreducible(given, p);
                    if !ok {
                        return Err(GfError::ReducibleModulus(given.to_vec(), m));
                    }
                    given.to_vec()
                }
                None => default_modulus(p, m),
            }
        };
        let mut field = FieldSpec {
            p,
            m,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_ORDER_LIMIT && q > 2 {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    /// GF(2), the common case.
    pub fn binary() -> Self {
        FieldSpec::new(2, None).expect("GF(2)")
    }

    /// Parses `GF(q)`, `GF(p^m)` or a bare integer.
    pub fn parse_name(text: &str) -> Result<Self, GfError> {
        let bad = || GfError::BadFieldName(text.to_string());
        let t = text.trim();
        let inner = if let Some(rest) = t.strip_prefix("GF(").or_else(|| t.strip_prefix("gf(")) {
            rest.strip_suffix(')').ok_or_else(bad)?
        } else {
            t
        };
        let q = match inner.split_once('^') {
            Some((base, exp)) => {
                let base: u32 = base.trim().parse().map_err(|_| bad())?;
                let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
                base.checked_pow(exp)
                    .ok_or(GfError::OrderTooLarge(u32::MAX))?
            }
            None => inner.trim().parse().map_err(|_| bad())?,
        };
        FieldSpec::new(q, None)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// True for GF(2), where matrices are bit-packed internally.
    #[inline]
    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    pub fn elem(&self, value: u64) -> Result<FFElem, GfError> {
        if value < self.q as u64 {
            Ok(FFElem(value as u16))
        } else {
            Err(GfError::OutOfRange { value, q: self.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.q).map(|v| FFElem(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        debug_assert!(a.value() < self.q && b.value() < self.q);
        if self.p == 2 {
            return FFElem(a.0 ^ b.0);
        }
        if self.m == 1 {
            return FFElem(((a.value() + b.value()) % self.p) as u16);
        }
        let (mut x, mut y) = (a.value(), b.value());
        let mut out = 0;
        let mut place = 1;
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FFElem(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: FFElem) -> FFElem {
        if self.p == 2 {
            return a;
        }
        if self.m == 1 {
            return FFElem(((self.p - a.value()) % self.p) as u16);
        }
        let mut x = a.value();
        let mut out = 0;
        let mut place = 1;
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FFElem(out as u16)
    }

    #[inline]
    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        debug_assert!(a.value() < self.q && b.value() < self.q);
        if a.is_zero() || b.is_zero() {
            return FFElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return FFElem(t.exp[i]);
        }
        if self.m == 1 {
            return FFElem(((a.value() as u64 * b.value() as u64) % self.p as u64) as u16);
        }
        self.poly_mul(a, b)
    }

    pub fn inv(&self, a: FFElem) -> Result<FFElem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let order = self.q as usize - 1;
            let l = t.log[a.0 as usize] as usize;
            return Ok(FFElem(t.exp[(order - l) % order]));
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FFElem, b: FFElem) -> Result<FFElem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FFElem, mut e: u64) -> FFElem {
        let mut base = a;
        let mut acc = FFElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn digits(&self, mut v: u32) -> Vec<u32> {
        let mut out = vec![0; self.m as usize];
        for d in out.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn poly_mul(&self, a: FFElem, b: FFElem) -> FFElem {
        let m = self.m as usize;
        let p = self.p as u64;
        let x = self.digits(a.value());
        let y = self.digits(b.value());
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        // reduce by the monic modulus from the top degree down
        for deg in (m..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (k, &mk) in self.modulus[..m].iter().enumerate() {
                let idx = deg - m + k;
                prod[idx] = (prod[idx] + (p - c) * mk as u64) % p;
            }
            prod[deg] = 0;
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&d| d as u32).collect();
        FFElem(self.undigits(&digits) as u16)
    }

    /// Raw multiplication that never consults the tables.
    fn mul_untabled(&self, a: FFElem, b: FFElem) -> FFElem {
        if a.is_zero() || b.is_zero() {
            return FFElem::ZERO;
        }
        if self.m == 1 {
            FFElem(((a.value() as u64 * b.value() as u64) % self.p as u64) as u16)
        } else {
            self.poly_mul(a, b)
        }
    }

    fn pow_untabled(&self, a: FFElem, mut e: u64) -> FFElem {
        let mut base = a;
        let mut acc = FFElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_untabled(acc, base);
            }
            base = self.mul_untabled(base, base);
            e >>= 1;
        }
        acc
    }

    fn primitive_element(&self) -> FFElem {
        let order = self.q as u64 - 1;
        let factors = prime_factors(order);
        (1..self.q)
            .map(|v| FFElem(v as u16))
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_untabled(g, order / r) != FFElem::ONE)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let order = self.q as usize - 1;
        let g = self.primitive_element();
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; self.q as usize];
        let mut x = FFElem::ONE;
        for i in 0..order {
            exp[i] = x.0;
            exp[i + order] = x.0;
            log[x.0 as usize] = i as u16;
            x = self.mul_untabled(x, g);
        }
        Tables { exp, log }
    }
}

/// Returns `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
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

/// Remainder of `a` modulo monic `b` over GF(p); both constant term first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (k, &bk) in b.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p - lead) * bk as u64) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Monic `f` of degree m is irreducible iff no monic polynomial of degree
/// `1..=m/2` divides it.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem(f, &divisor, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Lowest monic irreducible of degree `m`, scanning the lower coefficients as
/// a base-p integer (constant term least significant).
fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    let count = (p as u64).pow(m);
    for code in 0..count {
        let mut f = Vec::with_capacity(m as usize + 1);
        let mut c = code;
        for _ in 0..m {
            f.push((c % p as u64) as u32);
            c /= p as u64;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

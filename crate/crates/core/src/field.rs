//! The finite field F_q, q = p^e.
//!
//! Elements are encoded as integers `0..q`: the element
//! `d_0 + d_1·θ + … + d_{e-1}·θ^{e-1}` (θ a root of the modulus) is stored as
//! `d_0 + d_1·p + … + d_{e-1}·p^{e-1}`. For `e = 1` this is the usual residue
//! representation of F_p. The modulus for `e > 1` is the lexicographically
//! smallest monic irreducible of degree `e` over F_p, so encodings are stable
//! across runs and machines.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};

/// Largest field order accepted.
pub const MAX_ORDER: u64 = 1 << 31;

/// Fields up to this order get precomputed multiplication and inverse tables.
const TABLE_LIMIT: u64 = 256;

/// Encoded element of F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FqElem(pub u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characteristic, degree and modulus of F_q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqConfig {
    pub p: u32,
    pub e: u32,
    /// Modulus digits over F_p, low degree first, monic of degree `e`.
    /// For `e = 1` this is `[0, 1]` (the polynomial `x`).
    pub modulus: Vec<u32>,
    pub q: u32,
}

struct Tables {
    mul: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    config: FqConfig,
    tables: Option<Tables>,
}

/// Handle to F_q. Cheap to clone; equality compares `(p, e)`.
#[derive(Clone)]
pub struct Fq(Arc<Inner>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.e() == other.e()
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Fq> {
        Fq::new(p, 1)
    }

    /// F_{p^e} in the polynomial basis over the smallest monic irreducible.
    pub fn new(p: u32, e: u32) -> Result<Fq> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::ZeroExtensionDegree);
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_ORDER);
        let q = q.ok_or(Error::FieldTooLarge { p: p as u64, e })? as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, e as usize)?
        };
        let mut inner = Inner {
            config: FqConfig { p, e, modulus, q },
            tables: None,
        };
        if (q as u64) <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner.config));
        }
        Ok(Fq(Arc::new(inner)))
    }

    pub fn config(&self) -> &FqConfig {
        &self.0.config
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.config.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.config.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.config.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.e() == 1
    }

    /// Element from its integer code; `None` when out of range.
    pub fn elem(&self, code: u32) -> Option<FqElem> {
        (code < self.q()).then_some(FqElem(code))
    }

    /// Image of an integer under Z → F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p() as i64) as u32)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q()).map(FqElem)
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.p();
        if self.e() == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        let p = self.p();
        if self.e() == 1 {
            return FqElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            let d = x % p;
            out += ((p - d) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        if let Some(t) = &self.0.tables {
            return FqElem(t.mul[(a.0 * self.q() + b.0) as usize]);
        }
        FqElem(mul_raw(&self.0.config, a.0, b.0))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.0.tables {
            return Some(FqElem(t.inv[a.0 as usize]));
        }
        Some(self.pow(a, self.q() as u64 - 2))
    }

    pub fn pow(&self, a: FqElem, mut n: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }
}

fn digits(cfg: &FqConfig, mut x: u32) -> Vec<u32> {
    let mut d = vec![0u32; cfg.e as usize];
    for slot in d.iter_mut() {
        *slot = x % cfg.p;
        x /= cfg.p;
    }
    d
}

fn undigits(cfg: &FqConfig, d: &[u32]) -> u32 {
    d.iter().rev().fold(0u32, |acc, &x| acc * cfg.p + x)
}

fn mul_raw(cfg: &FqConfig, a: u32, b: u32) -> u32 {
    let p = cfg.p as u64;
    if cfg.e == 1 {
        return ((a as u64 * b as u64) % p) as u32;
    }
    let e = cfg.e as usize;
    let (da, db) = (digits(cfg, a), digits(cfg, b));
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    // reduce by the monic modulus from the top
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (j, &m) in cfg.modulus[..e].iter().enumerate() {
            let idx = k - e + j;
            prod[idx] = (prod[idx] + (p - c) * m as u64 % p) % p;
        }
    }
    let low: Vec<u32> = prod[..e].iter().map(|&x| x as u32).collect();
    undigits(cfg, &low)
}

fn build_tables(cfg: &FqConfig) -> Tables {
    let q = cfg.q as usize;
    let mut mul = vec![0u32; q * q];
    let mut inv = vec![0u32; q];
    for a in 1..q {
        for b in a..q {
            let c = mul_raw(cfg, a as u32, b as u32);
            mul[a * q + b] = c;
            mul[b * q + a] = c;
            if c == 1 {
                inv[a] = b as u32;
                inv[b] = a as u32;
            }
        }
    }
    Tables { mul, inv }
}

/// Lexicographically smallest monic irreducible of degree `e` over F_p,
/// comparing coefficient vectors from the top degree down.
fn smallest_irreducible(p: u32, e: usize) -> Result<Vec<u32>> {
    let ring = PolyRing::new(Fq::prime(p)?);
    let count = (p as u64).pow(e as u32);
    for idx in 0..count {
        let f = Poly::monic_from_index(ring.field(), e, idx as u128);
        if ring.is_irreducible(&f)? {
            return Ok(f.coeffs().iter().map(|c| c.0).collect());
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

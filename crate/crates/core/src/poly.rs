//! Polynomials over F_q: the ring A = F_q[t].
//!
//! [`Poly`] is plain data (coefficients low degree first, no trailing zeros);
//! arithmetic goes through a [`PolyRing`] which carries the field and a
//! shared cache of monic irreducibles used by factorization.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};

/// An element of F_q[t]. The zero polynomial has an empty coefficient
/// vector and degree `None` (the −∞ sentinel).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<FqElem>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn one() -> Poly {
        Poly(vec![FqElem::ONE])
    }

    /// The variable `t`.
    pub fn t() -> Poly {
        Poly::monomial(FqElem::ONE, 1)
    }

    pub fn constant(c: FqElem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// `c·t^k`.
    pub fn monomial(c: FqElem, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![FqElem::ZERO; k + 1];
        v[k] = c;
        Poly(v)
    }

    /// Builds a polynomial from coefficients (low degree first), trimming
    /// trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<FqElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    /// The polynomial of degree `< len` whose coefficients are the base-`q`
    /// digits of `idx`. Index order agrees with [`Ord`] on `Poly`.
    pub fn from_index(q: u32, len: usize, mut idx: u128) -> Poly {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(FqElem((idx % q as u128) as u32));
            idx /= q as u128;
        }
        Poly::from_coeffs(v)
    }

    /// `t^deg + from_index(q, deg, idx)`.
    pub fn monic_from_index(field: &Fq, deg: usize, idx: u128) -> Poly {
        let mut p = Poly::from_index(field.q(), deg, idx).0;
        p.resize(deg + 1, FqElem::ZERO);
        p[deg] = FqElem::ONE;
        Poly(p)
    }

    /// Inverse of [`Poly::from_index`].
    pub fn index(&self, q: u32) -> u128 {
        self.0
            .iter()
            .rev()
            .fold(0u128, |acc, c| acc * q as u128 + c.0 as u128)
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<FqElem> {
        self.0
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> FqElem {
        self.0.get(k).copied().unwrap_or(FqElem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`; only for comparisons
    /// of the form `deg(f) < n` where zero must pass.
    pub fn degree_or_neg(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0] == FqElem::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Some(FqElem::ONE)
    }

    pub fn lead(&self) -> Option<FqElem> {
        self.0.last().copied()
    }

    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, FqElem)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (k, c))
    }
}

impl Ord for Poly {
    /// Degree first (zero lowest), then coefficients compared from the top
    /// degree down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Terms `c*t^k` highest degree first, coefficient codes as integers.
/// Over a prime field this is the text interchange format.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.0.len()).rev() {
            let c = self.0[k];
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c.0) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, c) => write!(f, "{c}*t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Irreducible monic `c` with multiplicity `e ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePower {
    pub prime: Poly,
    pub exp: u32,
}

/// `f = unit · Π prime^exp`, primes distinct, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElem,
    pub factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|f| &f.prime)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|f| f.exp == 1)
    }

    /// Number of monic divisors, Π (e_i + 1).
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|f| f.exp as u64 + 1).product()
    }
}

/// F_q[t] with its field and a lazily grown table of monic irreducibles.
///
/// The table sits behind a lock with a single writer; readers never block
/// each other once the degrees they need are present. Call
/// [`PolyRing::warm_irreducibles`] before fanning out to many workers.
#[derive(Clone)]
pub struct PolyRing {
    field: Fq,
    irreducibles: Arc<RwLock<Vec<Vec<Poly>>>>,
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[t]", self.field)
    }
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
    }
}
impl Eq for PolyRing {}

impl PolyRing {
    pub fn new(field: Fq) -> PolyRing {
        PolyRing {
            field,
            irreducibles: Arc::new(RwLock::new(vec![Vec::new()])),
        }
    }

    /// F_p[t].
    pub fn prime(p: u32) -> Result<PolyRing> {
        Ok(PolyRing::new(Fq::prime(p)?))
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let f = &self.field;
        let (long, short) = if a.0.len() >= b.0.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut v = long.0.clone();
        for (x, &y) in v.iter_mut().zip(short.0.iter()) {
            *x = f.add(*x, y);
        }
        Poly::from_coeffs(v)
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly(a.0.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: FqElem) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(a.0.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    /// `a · t^k`.
    pub fn shift(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![FqElem::ZERO; k];
        v.extend_from_slice(&a.0);
        Poly(v)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut v = vec![FqElem::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] = f.add(v[i + j], f.mul(x, y));
                }
            }
        }
        Poly::from_coeffs(v)
    }

    /// `acc += a(t) · b(t^stride)` on a raw dense coefficient buffer
    /// (growing it as needed, no trimming).
    pub fn mul_substituted_acc(&self, acc: &mut Vec<FqElem>, a: &Poly, b: &Poly, stride: usize) {
        let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
            return;
        };
        let need = da + db * stride + 1;
        if acc.len() < need {
            acc.resize(need, FqElem::ZERO);
        }
        let f = &self.field;
        let a_terms: Vec<(usize, FqElem)> = a.nonzero_terms().collect();
        for (l, y) in b.nonzero_terms() {
            let base = l * stride;
            for &(k, x) in &a_terms {
                let slot = &mut acc[base + k];
                *slot = f.add(*slot, f.mul(x, y));
            }
        }
    }

    /// `b(t^stride)`.
    pub fn substitute_power(&self, b: &Poly, stride: usize) -> Poly {
        let mut acc = Vec::new();
        self.mul_substituted_acc(&mut acc, &Poly::one(), b, stride);
        Poly::from_coeffs(acc)
    }

    pub fn pow(&self, a: &Poly, mut n: u64) -> Poly {
        let mut base = a.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `(quotient, remainder)` with `a = quotient·b + remainder` and
    /// `deg(remainder) < deg(b)`.
    pub fn divmod(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let Some(da) = a.degree().filter(|&da| da >= db) else {
            return Ok((Poly::zero(), a.clone()));
        };
        let inv_lead = f.inv(b.0[db]).expect("leading coefficient is nonzero");
        let mut rem = a.0.clone();
        let mut quo = vec![FqElem::ZERO; da - db + 1];
        for k in (db..=da).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, inv_lead);
            quo[k - db] = factor;
            for (j, &y) in b.0.iter().enumerate() {
                if !y.is_zero() {
                    let idx = k - db + j;
                    rem[idx] = f.sub(rem[idx], f.mul(factor, y));
                }
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quo), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divmod(a, b)?.1)
    }

    pub fn divides(&self, d: &Poly, a: &Poly) -> Result<bool> {
        Ok(self.rem(a, d)?.is_zero())
    }

    /// Exact quotient; panics in debug builds if `b` does not divide `a`.
    pub fn exact_div(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(a, b)?;
        debug_assert!(r.is_zero(), "exact_div with nonzero remainder");
        Ok(q)
    }

    /// Scales a nonzero polynomial to be monic; zero stays zero.
    pub fn monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => Poly::zero(),
            Some(l) if l == FqElem::ONE => a.clone(),
            Some(l) => self.scale(a, self.field.inv(l).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.monic(&x))
    }

    /// Monic gcd of a list; errors when every entry is zero.
    pub fn gcd_all<'a>(&self, items: impl IntoIterator<Item = &'a Poly>) -> Result<Poly> {
        let mut acc = Poly::zero();
        for p in items {
            if acc.is_one() {
                break;
            }
            if !p.is_zero() {
                acc = if acc.is_zero() {
                    self.monic(p)
                } else {
                    self.gcd(&acc, p)?
                };
            }
        }
        if acc.is_zero() {
            Err(Error::GcdOfZeros)
        } else {
            Ok(acc)
        }
    }

    /// Every monic polynomial of exact degree `deg`, ascending.
    pub fn monics_of_degree(&self, deg: usize) -> impl Iterator<Item = Poly> + '_ {
        let count = (self.q() as u128).pow(deg as u32);
        (0..count).map(move |i| Poly::monic_from_index(&self.field, deg, i))
    }

    /// Every monic polynomial of degree `≤ max_deg`, ascending (starting at 1).
    pub fn monics_up_to(&self, max_deg: usize) -> impl Iterator<Item = Poly> + '_ {
        (0..=max_deg).flat_map(move |d| self.monics_of_degree(d))
    }

    /// Ensures the irreducible table covers degrees `1..=deg`.
    pub fn warm_irreducibles(&self, deg: usize) {
        if self.irreducibles.read().expect("lock").len() > deg {
            return;
        }
        let mut table = self.irreducibles.write().expect("lock");
        while table.len() <= deg {
            let d = table.len();
            let found: Vec<Poly> = self
                .monics_of_degree(d)
                .filter(|f| {
                    !(1..=d / 2).any(|k| {
                        table[k]
                            .iter()
                            .any(|c| self.rem(f, c).expect("nonzero").is_zero())
                    })
                })
                .collect();
            table.push(found);
        }
    }

    /// Monic irreducibles of exact degree `deg`, ascending.
    pub fn irreducibles_of_degree(&self, deg: usize) -> Vec<Poly> {
        if deg == 0 {
            return Vec::new();
        }
        self.warm_irreducibles(deg);
        self.irreducibles.read().expect("lock")[deg].clone()
    }

    /// Smallest monic irreducible of degree `deg`.
    pub fn first_irreducible(&self, deg: usize) -> Option<Poly> {
        if deg == 0 {
            return None;
        }
        self.monics_of_degree(deg)
            .find(|f| self.is_irreducible(f).unwrap_or(false))
    }

    fn with_irreducibles<R>(&self, deg: usize, body: impl FnOnce(&[Vec<Poly>]) -> R) -> R {
        self.warm_irreducibles(deg);
        let table = self.irreducibles.read().expect("lock");
        body(&table)
    }

    /// Non-constant with no monic divisor of degree strictly between 0 and
    /// its own degree. Nonzero constants are units and return `false`.
    pub fn is_irreducible(&self, f: &Poly) -> Result<bool> {
        let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
        if deg == 0 {
            return Ok(false);
        }
        let half = deg / 2;
        Ok(self.with_irreducibles(half, |table| {
            !table[1..=half]
                .iter()
                .flatten()
                .any(|c| self.rem(f, c).expect("nonzero").is_zero())
        }))
    }

    /// Trial division against monic irreducibles by increasing degree.
    pub fn factor(&self, f: &Poly) -> Result<Factorization> {
        let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
        if deg == 0 {
            return Err(Error::ConstantPolynomial(f.to_string()));
        }
        let unit = f.lead().expect("nonzero");
        let mut rest = self.monic(f);
        let mut factors = Vec::new();
        let mut d = 1;
        while 2 * d <= rest.degree().unwrap_or(0) {
            let candidates = self.irreducibles_of_degree(d);
            for c in &candidates {
                let mut exp = 0;
                loop {
                    let (quo, r) = self.divmod(&rest, c)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = quo;
                    exp += 1;
                }
                if exp > 0 {
                    factors.push(PrimePower {
                        prime: c.clone(),
                        exp,
                    });
                }
                if 2 * d > rest.degree().unwrap_or(0) {
                    break;
                }
            }
            d += 1;
        }
        if rest.degree().is_some_and(|d| d >= 1) {
            factors.push(PrimePower {
                prime: rest,
                exp: 1,
            });
        }
        Ok(Factorization { unit, factors })
    }

    /// The distinct monic irreducible divisors of `f` (empty for constants).
    pub fn prime_divisors(&self, f: &Poly) -> Result<Vec<Poly>> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.is_constant() {
            return Ok(Vec::new());
        }
        Ok(self
            .factor(f)?
            .factors
            .into_iter()
            .map(|p| p.prime)
            .collect())
    }

    /// All monic divisors of `f`, each once, ordered by degree then
    /// coefficients from the top.
    pub fn monic_divisors(&self, f: &Poly) -> Result<Vec<Poly>> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut divisors = vec![Poly::one()];
        if f.is_constant() {
            return Ok(divisors);
        }
        for pp in self.factor(f)?.factors {
            let mut next = Vec::with_capacity(divisors.len() * (pp.exp as usize + 1));
            for d in &divisors {
                let mut cur = d.clone();
                next.push(cur.clone());
                for _ in 0..pp.exp {
                    cur = self.mul(&cur, &pp.prime);
                    next.push(cur.clone());
                }
            }
            divisors = next;
        }
        divisors.sort();
        Ok(divisors)
    }

    /// Polynomial Möbius function of the monic normalization of `f`.
    pub fn moebius(&self, f: &Poly) -> Result<i8> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.is_constant() {
            return Ok(1);
        }
        let fac = self.factor(f)?;
        if !fac.is_squarefree() {
            return Ok(0);
        }
        Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
    }

    /// Parses the prime-field text format, e.g. `t^3+2*t+1` over F_3.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        if !self.field.is_prime_field() {
            return Err(Error::Parse(format!(
                "text polynomials are only supported over prime fields, not F_{}",
                self.q()
            )));
        }
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let p = self.field.p();
        let mut acc: Vec<FqElem> = Vec::new();
        for term in s.split('+') {
            let bad = || Error::Parse(format!("malformed term {term:?} in {s:?}"));
            if term.is_empty() {
                return Err(bad());
            }
            let (coef_str, power) = match term.find('t') {
                None => (term, 0usize),
                Some(pos) => {
                    let head = &term[..pos];
                    let tail = &term[pos + 1..];
                    let coef = if head.is_empty() {
                        "1"
                    } else {
                        head.strip_suffix('*')
                            .filter(|h| !h.is_empty())
                            .ok_or_else(bad)?
                    };
                    let power = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .and_then(|k| k.parse::<usize>().ok())
                            .ok_or_else(bad)?
                    };
                    (coef, power)
                }
            };
            let c: u64 = coef_str.parse().map_err(|_| bad())?;
            if c >= p as u64 {
                return Err(Error::Parse(format!(
                    "coefficient {c} out of range 0..{p} in {s:?}"
                )));
            }
            if acc.len() <= power {
                acc.resize(power + 1, FqElem::ZERO);
            }
            acc[power] = self.field.add(acc[power], FqElem(c as u32));
        }
        Ok(Poly::from_coeffs(acc))
    }
}

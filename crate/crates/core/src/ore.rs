//! The twisted polynomial ring K{τ} over K = F_q(t), and Drinfeld modules
//! φ: F_q[t] → K{τ} in generic characteristic.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::poly::{Poly, PolyRing};
use crate::ratfn::RationalFn;

/// `Σ c_i τ^i` with `c_i ∈ F_q(t)`; index `i` holds the coefficient of τ^i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TauPoly(Vec<RationalFn>);

impl TauPoly {
    pub fn zero() -> TauPoly {
        TauPoly(Vec::new())
    }

    pub fn one() -> TauPoly {
        TauPoly(vec![RationalFn::one()])
    }

    /// The element `τ`.
    pub fn tau() -> TauPoly {
        TauPoly(vec![RationalFn::zero(), RationalFn::one()])
    }

    pub fn constant(c: RationalFn) -> TauPoly {
        TauPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<RationalFn>) -> TauPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TauPoly(coeffs)
    }

    /// Coefficients in A = F_q[t].
    pub fn from_polys(coeffs: Vec<Poly>) -> TauPoly {
        TauPoly::from_coeffs(coeffs.into_iter().map(RationalFn::from_poly).collect())
    }

    pub fn coeffs(&self) -> &[RationalFn] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> RationalFn {
        self.0.get(i).cloned().unwrap_or_else(RationalFn::zero)
    }

    /// τ-degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, ring: &PolyRing, other: &TauPoly) -> TauPoly {
        let n = self.0.len().max(other.0.len());
        let coeffs = (0..n)
            .map(|i| match (self.0.get(i), other.0.get(i)) {
                (Some(a), Some(b)) => a.add(ring, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        TauPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self, ring: &PolyRing) -> TauPoly {
        TauPoly(self.0.iter().map(|c| c.neg(ring)).collect())
    }

    pub fn sub(&self, ring: &PolyRing, other: &TauPoly) -> TauPoly {
        self.add(ring, &other.neg(ring))
    }

    /// Left multiplication by a scalar of F_q.
    pub fn scale(&self, ring: &PolyRing, c: FqElem) -> TauPoly {
        let c = RationalFn::from_poly(Poly::constant(c));
        TauPoly::from_coeffs(self.0.iter().map(|x| x.mul(ring, &c)).collect())
    }

    /// Composition: `(a·τ^i)(b·τ^j) = a·b^{q^i}·τ^{i+j}`.
    pub fn mul(&self, ring: &PolyRing, other: &TauPoly) -> TauPoly {
        tau_mul(ring, self, other)
    }

    /// `"(<c_0>)*tau^0+(<c_1>)*tau^1+…"`, zero terms omitted, `"0"` for zero.
    pub fn parse(ring: &PolyRing, s: &str) -> Result<TauPoly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(TauPoly::zero());
        }
        let mut coeffs: Vec<RationalFn> = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let bad = || Error::Parse(format!("malformed tau polynomial {s:?}"));
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let c = RationalFn::parse(ring, &body[..close])?;
            let after = body[close + 1..].strip_prefix("*tau^").ok_or_else(bad)?;
            let end = after.find('+').unwrap_or(after.len());
            let i: usize = after[..end].parse().map_err(|_| bad())?;
            if coeffs.len() <= i {
                coeffs.resize(i + 1, RationalFn::zero());
            }
            coeffs[i] = coeffs[i].add(ring, &c);
            rest = after[end..].strip_prefix('+').unwrap_or(&after[end..]);
            if after[end..].starts_with('+') && rest.is_empty() {
                return Err(bad());
            }
        }
        Ok(TauPoly::from_coeffs(coeffs))
    }
}

impl fmt::Display for TauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "({c})*tau^{i}")?;
        }
        Ok(())
    }
}

/// Product in K{τ}. Pure-polynomial coefficients take a sparse fast path:
/// `a·b^{q^i}` is accumulated as `a(t)·b(t^{q^i})` without materializing the
/// substituted factor.
pub fn tau_mul(ring: &PolyRing, f: &TauPoly, g: &TauPoly) -> TauPoly {
    if f.is_zero() || g.is_zero() {
        return TauPoly::zero();
    }
    let out_len = f.0.len() + g.0.len() - 1;
    let all_poly = f.0.iter().chain(g.0.iter()).all(RationalFn::is_poly);
    let q = ring.q() as usize;
    if all_poly {
        let mut acc: Vec<Vec<FqElem>> = vec![Vec::new(); out_len];
        let mut stride = 1usize;
        for (i, a) in f.0.iter().enumerate() {
            if i > 0 {
                stride = stride.checked_mul(q).expect("Frobenius stride overflow");
            }
            let a = a.num();
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.0.iter().enumerate() {
                ring.mul_substituted_acc(&mut acc[i + j], a, b.num(), stride);
            }
        }
        return TauPoly::from_polys(acc.into_iter().map(Poly::from_coeffs).collect());
    }
    let mut out = vec![RationalFn::zero(); out_len];
    for (i, a) in f.0.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.0.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let term = a.mul(ring, &b.frobenius(ring, i as u32));
            out[i + j] = out[i + j].add(ring, &term);
        }
    }
    TauPoly::from_coeffs(out)
}

/// A Drinfeld module of generic characteristic, given by `φ_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrinfeldModule {
    ring: PolyRing,
    phi_t: TauPoly,
    /// Recorded, never computed: a finite certificate does not exist at
    /// this level.
    pub modular_transcendence_degree: Option<u32>,
}

impl DrinfeldModule {
    /// Requires τ-degree ≥ 1 and τ^0-coefficient equal to `t`.
    pub fn new(ring: PolyRing, phi_t: TauPoly) -> Result<DrinfeldModule> {
        if phi_t.degree().unwrap_or(0) < 1 {
            return Err(Error::InvalidModel(format!(
                "phi_t = {phi_t} must have tau-degree at least 1"
            )));
        }
        if phi_t.coeff(0) != RationalFn::from_poly(Poly::t()) {
            return Err(Error::InvalidModel(format!(
                "phi_t = {phi_t} must have constant term t"
            )));
        }
        Ok(DrinfeldModule {
            ring,
            phi_t,
            modular_transcendence_degree: None,
        })
    }

    /// The Carlitz module `φ_t = t + τ`.
    pub fn carlitz(ring: PolyRing) -> DrinfeldModule {
        let phi_t = TauPoly::from_polys(vec![Poly::t(), Poly::one()]);
        DrinfeldModule::new(ring, phi_t).expect("valid")
    }

    /// `φ_t = t + g_1 τ + … + g_r τ^r` with polynomial coefficients.
    pub fn from_coefficients(ring: PolyRing, higher: Vec<Poly>) -> Result<DrinfeldModule> {
        let mut coeffs = vec![Poly::t()];
        coeffs.extend(higher);
        DrinfeldModule::new(ring, TauPoly::from_polys(coeffs))
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn phi_t(&self) -> &TauPoly {
        &self.phi_t
    }

    pub fn rank(&self) -> usize {
        self.phi_t.degree().expect("nonzero")
    }

    /// `φ_a`, computed fresh. Use [`PhiCache`] for repeated evaluation.
    pub fn phi_of(&self, a: &Poly) -> TauPoly {
        PhiCache::new(self).phi_of(a)
    }

    /// `#φ[a] = q^{r·deg a}`: φ_a is separable because its constant term
    /// `a` is nonzero.
    pub fn torsion_cardinality(&self, a: &Poly) -> Result<num_bigint::BigUint> {
        let deg = a.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(num_bigint::BigUint::from(self.ring.q()).pow((self.rank() * deg) as u32))
    }
}

/// Memoized powers `φ_{t^i}` for one module; confine to a single worker.
pub struct PhiCache<'m> {
    module: &'m DrinfeldModule,
    powers: Vec<TauPoly>,
}

impl<'m> PhiCache<'m> {
    pub fn new(module: &'m DrinfeldModule) -> PhiCache<'m> {
        PhiCache {
            module,
            powers: vec![TauPoly::one()],
        }
    }

    /// `φ_{t^i}`, extending the table by `φ_{t^{i+1}} = φ_t ∘ φ_{t^i}`.
    pub fn power(&mut self, i: usize) -> &TauPoly {
        let ring = self.module.ring();
        while self.powers.len() <= i {
            let next = tau_mul(
                ring,
                self.module.phi_t(),
                self.powers.last().expect("nonempty"),
            );
            self.powers.push(next);
        }
        &self.powers[i]
    }

    /// `φ_a = Σ c_i φ_{t^i}` for `a = Σ c_i t^i`.
    pub fn phi_of(&mut self, a: &Poly) -> TauPoly {
        let ring = self.module.ring().clone();
        let mut acc = TauPoly::zero();
        for (i, c) in a.nonzero_terms() {
            let term = self.power(i).scale(&ring, c);
            acc = acc.add(&ring, &term);
        }
        acc
    }
}

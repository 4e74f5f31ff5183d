//! Rational functions over F_q in canonical form.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};

/// `num / den` with `den` monic and `gcd(num, den) = 1`. Zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn zero() -> RationalFn {
        RationalFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RationalFn {
        RationalFn::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> RationalFn {
        RationalFn {
            num,
            den: Poly::one(),
        }
    }

    /// Canonicalizes `num / den`.
    pub fn new(ring: &PolyRing, num: Poly, den: Poly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFn::zero());
        }
        let g = ring.gcd(&num, &den)?;
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (ring.exact_div(&num, &g)?, ring.exact_div(&den, &g)?)
        };
        let lead = den.lead().expect("nonzero");
        if !den.is_monic() {
            let inv = ring.field().inv(lead).expect("nonzero");
            num = ring.scale(&num, inv);
            den = ring.scale(&den, inv);
        }
        Ok(RationalFn { num, den })
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn add(&self, ring: &PolyRing, other: &RationalFn) -> RationalFn {
        if self.is_poly() && other.is_poly() {
            return RationalFn::from_poly(ring.add(&self.num, &other.num));
        }
        if self.den == other.den {
            let num = ring.add(&self.num, &other.num);
            return RationalFn::new(ring, num, self.den.clone()).expect("den nonzero");
        }
        let num = ring.add(
            &ring.mul(&self.num, &other.den),
            &ring.mul(&other.num, &self.den),
        );
        let den = ring.mul(&self.den, &other.den);
        RationalFn::new(ring, num, den).expect("den nonzero")
    }

    pub fn neg(&self, ring: &PolyRing) -> RationalFn {
        RationalFn {
            num: ring.neg(&self.num),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, ring: &PolyRing, other: &RationalFn) -> RationalFn {
        self.add(ring, &other.neg(ring))
    }

    pub fn mul(&self, ring: &PolyRing, other: &RationalFn) -> RationalFn {
        if self.is_zero() || other.is_zero() {
            return RationalFn::zero();
        }
        if self.is_poly() && other.is_poly() {
            return RationalFn::from_poly(ring.mul(&self.num, &other.num));
        }
        // cross-cancel so the product stays reduced
        let g1 = ring.gcd(&self.num, &other.den).expect("nonzero");
        let g2 = ring.gcd(&other.num, &self.den).expect("nonzero");
        let ok = "gcd divides";
        let n1 = ring.exact_div(&self.num, &g1).expect(ok);
        let d2 = ring.exact_div(&other.den, &g1).expect(ok);
        let n2 = ring.exact_div(&other.num, &g2).expect(ok);
        let d1 = ring.exact_div(&self.den, &g2).expect(ok);
        let num = ring.mul(&n1, &n2);
        let den = ring.mul(&d1, &d2);
        RationalFn::new(ring, num, den).expect("den nonzero")
    }

    pub fn inv(&self, ring: &PolyRing) -> Result<RationalFn> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFn::new(ring, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, ring: &PolyRing, other: &RationalFn) -> Result<RationalFn> {
        Ok(self.mul(ring, &other.inv(ring)?))
    }

    /// The `q^i`-power Frobenius, realized as `t ↦ t^{q^i}` on numerator and
    /// denominator. Coprimality and monicity survive the substitution, so no
    /// re-reduction is needed.
    pub fn frobenius(&self, ring: &PolyRing, i: u32) -> RationalFn {
        if i == 0 || self.num.is_constant() && self.den.is_one() {
            return self.clone();
        }
        let stride = (ring.q() as usize).pow(i);
        RationalFn {
            num: ring.substitute_power(&self.num, stride),
            den: ring.substitute_power(&self.den, stride),
        }
    }

    /// `"<poly>"` or `"<poly>/<poly>"`.
    pub fn parse(ring: &PolyRing, s: &str) -> Result<RationalFn> {
        match s.split_once('/') {
            None => Ok(RationalFn::from_poly(ring.parse(s)?)),
            Some((n, d)) => RationalFn::new(ring, ring.parse(n)?, ring.parse(d)?),
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

//! The compact group G = (1/t·F_q[[1/t]])^r, the map σ that drops the
//! polynomial part of a Laurent series in 1/t, cylinder balls and their
//! Haar measure.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::poly::{Poly, PolyRing};
use crate::ratfn::RationalFn;
use crate::torsion::TorsionPoint;

/// Tails are shown to at least this many terms.
pub const MIN_DISPLAY_PRECISION: usize = 8;

/// `v_∞(f/g) = deg g − deg f`.
pub fn v_infty(x: &RationalFn) -> Result<i64> {
    let num = x.num().degree().ok_or(Error::ZeroValuation)?;
    let den = x.den().degree().expect("nonzero");
    Ok(den as i64 - num as i64)
}

/// `Σ_{i=1}^{N} α_i (1/t)^i`, known modulo `(1/t)^{N+1}`.
/// `coeffs()[0]` is `α_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentTail {
    coeffs: Vec<FqElem>,
}

impl LaurentTail {
    pub fn new(coeffs: Vec<FqElem>) -> LaurentTail {
        LaurentTail { coeffs }
    }

    pub fn zero(precision: usize) -> LaurentTail {
        LaurentTail {
            coeffs: vec![FqElem::ZERO; precision],
        }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// `α_i` for `1 ≤ i ≤ precision`.
    pub fn coeff(&self, i: usize) -> Option<FqElem> {
        i.checked_sub(1).and_then(|k| self.coeffs.get(k).copied())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Sum at the smaller of the two precisions.
    pub fn add(&self, field: &Fq, other: &LaurentTail) -> LaurentTail {
        LaurentTail {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn truncate(&self, precision: usize) -> LaurentTail {
        LaurentTail {
            coeffs: self.coeffs[..precision.min(self.coeffs.len())].to_vec(),
        }
    }
}

/// `a1/t + a2/t^2 + … + O(1/t^{N+1})`, zero terms omitted.
impl fmt::Display for LaurentTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match (k + 1, c.0) {
                (1, 1) => write!(f, "1/t + ")?,
                (1, c) => write!(f, "{c}/t + ")?,
                (i, c) => write!(f, "{c}/t^{i} + ")?,
            }
        }
        write!(f, "O(1/t^{})", self.coeffs.len() + 1)
    }
}

/// σ(num/den) to precision `n`: long division in 1/t keeping only the
/// coefficients of `(1/t)^1..(1/t)^n`.
pub fn sigma_expand(ring: &PolyRing, num: &Poly, den: &Poly, n: usize) -> Result<LaurentTail> {
    let d = den.degree().ok_or(Error::DivisionByZero)?;
    if d == 0 {
        return Ok(LaurentTail::zero(n));
    }
    let field = ring.field();
    // σ kills the polynomial part
    let mut rem: Vec<FqElem> = ring.rem(num, den)?.into_coeffs();
    rem.resize(d + 1, FqElem::ZERO);
    let inv_lead = field.inv(den.coeffs()[d]).expect("nonzero");
    let den = den.coeffs();
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        // rem ← t·rem; α = rem_d / lead; rem ← rem − α·den, leaving deg rem < d
        rem.rotate_right(1);
        let alpha = field.mul(rem[d], inv_lead);
        if !alpha.is_zero() {
            for (j, &c) in den.iter().enumerate() {
                rem[j] = field.sub(rem[j], field.mul(alpha, c));
            }
        }
        debug_assert!(rem[d].is_zero());
        coeffs.push(alpha);
    }
    Ok(LaurentTail { coeffs })
}

/// A point of G, optionally backed by the exact torsion tuple it came from
/// so precision can be raised losslessly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPoint {
    coords: Vec<LaurentTail>,
    exact: Option<TorsionPoint>,
}

impl GPoint {
    /// All coordinates must share one precision.
    pub fn new(coords: Vec<LaurentTail>) -> Result<GPoint> {
        if let Some(first) = coords.first() {
            if coords.iter().any(|c| c.precision() != first.precision()) {
                return Err(Error::InvalidPoint(
                    "coordinates differ in precision".into(),
                ));
            }
        }
        Ok(GPoint {
            coords,
            exact: None,
        })
    }

    pub fn coords(&self) -> &[LaurentTail] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn precision(&self) -> usize {
        self.coords.first().map_or(0, LaurentTail::precision)
    }

    pub fn exact(&self) -> Option<&TorsionPoint> {
        self.exact.as_ref()
    }

    /// Re-expands from the exact backing; fails without one when the
    /// requested precision exceeds the stored one.
    pub fn with_precision(&self, ring: &PolyRing, n: usize) -> Result<GPoint> {
        match &self.exact {
            Some(x) => torsion_to_g(ring, x, n),
            None if n <= self.precision() => Ok(GPoint {
                coords: self.coords.iter().map(|c| c.truncate(n)).collect(),
                exact: None,
            }),
            None => Err(Error::InsufficientPrecision {
                have: self.precision(),
                need: n,
            }),
        }
    }
}

/// Coordinate `i` is `σ(b_i / b)`.
pub fn torsion_to_g(ring: &PolyRing, x: &TorsionPoint, n: usize) -> Result<GPoint> {
    let coords = x
        .nums()
        .iter()
        .map(|bi| sigma_expand(ring, bi, x.order(), n))
        .collect::<Result<Vec<_>>>()?;
    Ok(GPoint {
        coords,
        exact: Some(x.clone()),
    })
}

/// The cylinder `(a_1, …, a_r) + (t^{-n_1-1}F_q[[1/t]], …)`.
///
/// `centers[i]` lists the coefficients of `(1/t)^1..(1/t)^{n_i}` of `a_i`;
/// any such truncated tail is a valid center, so for fixed radii the balls
/// partition G. Ordering is by radii, then centers, lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    radii: Vec<usize>,
    centers: Vec<Vec<FqElem>>,
}

impl Ball {
    pub fn new(field: &Fq, radii: Vec<usize>, centers: Vec<Vec<FqElem>>) -> Result<Ball> {
        if radii.is_empty() {
            return Err(Error::InvalidBall(
                "at least one coordinate required".into(),
            ));
        }
        if radii.len() != centers.len() {
            return Err(Error::DimensionMismatch {
                expected: radii.len(),
                got: centers.len(),
            });
        }
        for (i, (&n, c)) in radii.iter().zip(&centers).enumerate() {
            if n == 0 {
                return Err(Error::InvalidBall(format!(
                    "radius n_{} must be ≥ 1",
                    i + 1
                )));
            }
            if c.len() != n {
                return Err(Error::InvalidBall(format!(
                    "center {} lists {} coefficients, radius is {n}",
                    i + 1,
                    c.len()
                )));
            }
            if c.iter().any(|x| x.0 >= field.q()) {
                return Err(Error::InvalidBall("center coefficient out of range".into()));
            }
        }
        Ok(Ball { radii, centers })
    }

    /// The ball of the given radii centered at 0.
    pub fn at_zero(radii: Vec<usize>) -> Result<Ball> {
        let centers = radii.iter().map(|&n| vec![FqElem::ZERO; n]).collect();
        if radii.is_empty() || radii.contains(&0) {
            return Err(Error::InvalidBall("radii must be ≥ 1".into()));
        }
        Ok(Ball { radii, centers })
    }

    /// Center from its index among the `q^{Σn_i}` balls of these radii; the
    /// first coefficient of the first coordinate is the most significant
    /// digit, so index order equals [`Ord`] order.
    pub fn from_index(q: u32, radii: &[usize], mut idx: u128) -> Ball {
        let total: usize = radii.iter().sum();
        let mut digits = vec![FqElem::ZERO; total];
        for slot in digits.iter_mut().rev() {
            *slot = FqElem((idx % q as u128) as u32);
            idx /= q as u128;
        }
        let mut centers = Vec::with_capacity(radii.len());
        let mut at = 0;
        for &n in radii {
            centers.push(digits[at..at + n].to_vec());
            at += n;
        }
        Ball {
            radii: radii.to_vec(),
            centers,
        }
    }

    /// Inverse of [`Ball::from_index`].
    pub fn index(&self, q: u32) -> u128 {
        self.centers
            .iter()
            .flatten()
            .fold(0u128, |acc, c| acc * q as u128 + c.0 as u128)
    }

    pub fn radii(&self) -> &[usize] {
        &self.radii
    }

    pub fn centers(&self) -> &[Vec<FqElem>] {
        &self.centers
    }

    pub fn rank(&self) -> usize {
        self.radii.len()
    }

    pub fn radius_sum(&self) -> usize {
        self.radii.iter().sum()
    }

    pub fn max_radius(&self) -> usize {
        self.radii.iter().copied().max().unwrap_or(0)
    }

    /// `a'_i(t) = t^{n_i}·a_i(1/t)`, a polynomial of degree `< n_i`.
    pub fn reversed_center(&self, i: usize) -> Poly {
        let n = self.radii[i];
        let c = &self.centers[i];
        // coefficient of (1/t)^j becomes the coefficient of t^{n-j}
        Poly::from_coeffs((0..n).map(|k| c[n - 1 - k]).collect())
    }

    /// `"n=<n_1,..,n_r>;c=<coords separated by |, coefficients by ,>"`.
    pub fn parse(field: &Fq, s: &str) -> Result<Ball> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("malformed ball {s:?}"));
        let (n_part, c_part) = s.split_once(';').ok_or_else(bad)?;
        let radii = n_part
            .strip_prefix("n=")
            .ok_or_else(bad)?
            .split(',')
            .map(|x| x.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let centers = c_part
            .strip_prefix("c=")
            .ok_or_else(bad)?
            .split('|')
            .map(|coord| {
                coord
                    .split(',')
                    .map(|x| x.parse::<u32>().map(FqElem).map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ball::new(field, radii, centers)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let radii: Vec<String> = self.radii.iter().map(usize::to_string).collect();
        let centers: Vec<String> = self
            .centers
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| x.0.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "n={};c={}", radii.join(","), centers.join("|"))
    }
}

/// Every radii vector `(n_1..n_r)`, `n_i ≥ 1`, with `Σ n_i ≤ max_sum`,
/// in lexicographic order.
pub fn radii_vectors(r: usize, max_sum: usize) -> Vec<Vec<usize>> {
    fn go(r: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == r {
            out.push(prefix.clone());
            return;
        }
        let remaining = r - prefix.len() - 1;
        for n in 1..=budget.saturating_sub(remaining) {
            prefix.push(n);
            go(r, budget - n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 && max_sum >= r {
        go(r, max_sum, &mut Vec::new(), &mut out);
    }
    out
}

/// All balls with `Σ n_i ≤ max_sum`, sorted.
pub fn ball_family(field: &Fq, r: usize, max_sum: usize) -> Vec<Ball> {
    let q = field.q();
    let mut out = Vec::new();
    for radii in radii_vectors(r, max_sum) {
        let count = (q as u128).pow(radii.iter().sum::<usize>() as u32);
        out.extend((0..count).map(|i| Ball::from_index(q, &radii, i)));
    }
    out
}

/// Degree test: `deg(t^{n_i}·b_i − b·a'_i) ≤ deg b − 1` for every `i`.
pub fn ball_contains_exact(ring: &PolyRing, x: &TorsionPoint, ball: &Ball) -> Result<bool> {
    if x.rank() != ball.rank() {
        return Err(Error::DimensionMismatch {
            expected: ball.rank(),
            got: x.rank(),
        });
    }
    let b = x.order();
    let deg_b = b.degree().expect("nonconstant") as isize;
    for (i, bi) in x.nums().iter().enumerate() {
        let lhs = ring.shift(bi, ball.radii[i]);
        let diff = ring.sub(&lhs, &ring.mul(b, &ball.reversed_center(i)));
        if diff.degree_or_neg() > deg_b - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tail test: the first `n_i` coefficients of coordinate `i` equal the
/// center's.
pub fn ball_contains_tail(x: &GPoint, ball: &Ball) -> Result<bool> {
    if x.rank() != ball.rank() {
        return Err(Error::DimensionMismatch {
            expected: ball.rank(),
            got: x.rank(),
        });
    }
    let need = ball.max_radius();
    if x.precision() < need {
        return Err(Error::InsufficientPrecision {
            have: x.precision(),
            need,
        });
    }
    Ok(x.coords
        .iter()
        .zip(&ball.centers)
        .all(|(tail, center)| tail.coeffs()[..center.len()] == center[..]))
}

/// `μ(U) = q^{−Σ n_i}`.
pub fn haar(q: u32, ball: &Ball) -> BigRational {
    BigRational::new(
        BigInt::from(1),
        BigInt::from(q).pow(ball.radius_sum() as u32),
    )
}

//! Closed-form orbit and ball counts, their certified error bound, the Euler
//! product and the pointwise lower bound. Everything is exact rational
//! arithmetic.
//!
//! With `b' = gcd(b, P)` and `μ` the polynomial Möbius function, the
//! per-coset orbit size is
//!
//! ```text
//! q^{r(deg b − deg b')} · Σ_{d | b, (d, b') = 1} μ(d) q^{−r·deg d}
//! ```
//!
//! and the per-coset count inside a ball of radii `n_1..n_r` is that value
//! times `q^{−Σ n_i}` up to a bounded error coming from divisors `d` of
//! large degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::laurent::{haar, Ball};
use crate::poly::{Poly, PolyRing};
use crate::torsion::GaloisImageModel;

fn q_pow(q: u32, k: usize) -> BigInt {
    BigInt::from(q).pow(k as u32)
}

fn q_pow_neg(q: u32, k: usize) -> BigRational {
    BigRational::new(BigInt::one(), q_pow(q, k))
}

fn deg(p: &Poly) -> usize {
    p.degree().expect("nonzero polynomial")
}

fn check_order(b: &Poly) -> Result<()> {
    match b.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ConstantPolynomial(b.to_string())),
        Some(_) => Ok(()),
    }
}

/// Monic divisors `d | b` with `gcd(d, b') = 1`.
fn divisors_coprime_to(ring: &PolyRing, b: &Poly, b_prime: &Poly) -> Result<Vec<Poly>> {
    let all = ring.monic_divisors(b)?;
    if b_prime.is_one() {
        return Ok(all);
    }
    let mut out = Vec::with_capacity(all.len());
    for d in all {
        if ring.gcd(&d, b_prime)?.is_one() {
            out.push(d);
        }
    }
    Ok(out)
}

/// `Σ_{d | b, (d, b')=1} μ(d) q^{−r·deg d}`.
fn coprime_moebius_sum(ring: &PolyRing, b: &Poly, b_prime: &Poly, r: usize) -> Result<BigRational> {
    let q = ring.q();
    let mut acc = BigRational::zero();
    for d in divisors_coprime_to(ring, b, b_prime)? {
        match ring.moebius(&d)? {
            0 => {}
            1 => acc += q_pow_neg(q, r * deg(&d)),
            _ => acc -= q_pow_neg(q, r * deg(&d)),
        }
    }
    Ok(acc)
}

/// Per-coset orbit cardinality. In full mode `b' = 1`, giving the number of
/// exact-order-`b` points.
pub fn orbit_size_closed(
    ring: &PolyRing,
    b: &Poly,
    r: usize,
    model: &GaloisImageModel,
) -> Result<BigRational> {
    check_order(b)?;
    let bp = model.effective_b_prime(ring, b)?;
    let sum = coprime_moebius_sum(ring, b, &bp, r)?;
    Ok(BigRational::from_integer(q_pow(ring.q(), r * (deg(b) - deg(&bp)))) * sum)
}

/// Main term of the per-coset count inside `ball`:
/// `orbit_size_closed × q^{−Σ n_i}`.
pub fn ball_count_main_term(
    ring: &PolyRing,
    b: &Poly,
    r: usize,
    model: &GaloisImageModel,
    ball: &Ball,
) -> Result<BigRational> {
    check_ball_rank(ball, r)?;
    Ok(orbit_size_closed(ring, b, r, model)? * haar(ring.q(), ball))
}

fn check_ball_rank(ball: &Ball, r: usize) -> Result<()> {
    if ball.rank() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: ball.rank(),
        });
    }
    Ok(())
}

/// `2·D·q^{r(L + n_0)}` with `n_0 = max n_i + 1` and
/// `D = #{d | b monic : (d, b') = 1, deg d > deg b − L − n_0}`.
///
/// Divisors at or below the threshold contribute exactly their main-term
/// share; each divisor above it contributes at most `q^{r(L+n_0)}` to the
/// exact count and at most as much to the main term.
pub fn ball_count_error_bound(
    ring: &PolyRing,
    b: &Poly,
    r: usize,
    model: &GaloisImageModel,
    ball: &Ball,
) -> Result<BigRational> {
    check_order(b)?;
    check_ball_rank(ball, r)?;
    let bp = model.effective_b_prime(ring, b)?;
    let level = model.effective_level_degree();
    let n0 = ball.max_radius() + 1;
    let threshold = deg(b) as isize - level as isize - n0 as isize;
    let large = divisors_coprime_to(ring, b, &bp)?
        .iter()
        .filter(|d| deg(d) as isize > threshold)
        .count();
    let bound = BigInt::from(2 * large) * q_pow(ring.q(), r * (level + n0));
    Ok(BigRational::from_integer(bound))
}

/// `Π_{c | b0 irreducible} (1 − q^{−r·deg c})`.
pub fn euler_product(ring: &PolyRing, b0: &Poly, r: usize) -> Result<BigRational> {
    let q = ring.q();
    let mut acc = BigRational::one();
    for c in ring.prime_divisors(b0)? {
        acc *= BigRational::one() - q_pow_neg(q, r * deg(&c));
    }
    Ok(acc)
}

/// Result of [`lower_bound_check`]. The bound `q^{r·deg b / 2}` may be
/// irrational, so it is carried squared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBound {
    /// `Π q^{r(e_i−1)deg c_i}(q^{r·deg c_i} − 1)`.
    pub value: BigInt,
    /// `q^{r·deg b}`, the square of the bound.
    pub bound_squared: BigInt,
    /// `value² ≥ bound_squared`.
    pub holds: bool,
}

/// The pointwise lower bound for the number of exact-order points, `r ≥ 2`.
pub fn lower_bound_check(ring: &PolyRing, b: &Poly, r: usize) -> Result<LowerBound> {
    if r < 2 {
        return Err(Error::RankTooSmall { min: 2, got: r });
    }
    check_order(b)?;
    let q = ring.q();
    let mut value = BigInt::one();
    for pp in ring.factor(b)?.factors {
        let dc = deg(&pp.prime);
        value *= q_pow(q, r * (pp.exp as usize - 1) * dc) * (q_pow(q, r * dc) - 1);
    }
    let bound_squared = q_pow(q, r * deg(b));
    let holds = &value * &value >= bound_squared;
    Ok(LowerBound {
        value,
        bound_squared,
        holds,
    })
}

/// A closed form next to its brute-force counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub closed_form: BigRational,
    pub brute_force: Option<BigInt>,
    pub error_bound: Option<BigRational>,
    pub b: String,
    pub r: usize,
    pub model: String,
    pub ball: Option<String>,
}

impl CountReport {
    pub const CSV_HEADER: [&'static str; 8] = [
        "b",
        "r",
        "model",
        "ball",
        "closed_form",
        "brute_force",
        "error_bound",
        "consistent",
    ];

    /// Exact equality without a bound, `|closed − brute| ≤ bound` with one;
    /// vacuously true without a brute-force value.
    pub fn is_consistent(&self) -> bool {
        let Some(brute) = &self.brute_force else {
            return true;
        };
        let diff = (&self.closed_form - BigRational::from_integer(brute.clone())).abs();
        match &self.error_bound {
            None => diff.is_zero(),
            Some(bound) => diff <= *bound,
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.b.clone(),
            self.r.to_string(),
            self.model.clone(),
            self.ball.clone().unwrap_or_default(),
            self.closed_form.to_string(),
            self.brute_force
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default(),
            self.error_bound
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default(),
            self.is_consistent().to_string(),
        ]
    }
}

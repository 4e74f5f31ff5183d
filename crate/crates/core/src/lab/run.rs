use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::counting::{
    ball_count_error_bound, ball_count_main_term, euler_product, orbit_size_closed,
};
use crate::error::{Error, Result};
use crate::laurent::{ball_family, haar, sigma_expand, Ball};
use crate::poly::{Poly, PolyRing};
use crate::torsion::{orbit, GaloisImageModel, Mode, Orbit, TorsionPoint};

use super::config::{generate_orders, ExperimentConfig};

/// One (order, ball) comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub q: u32,
    pub r: usize,
    pub mode: Mode,
    pub b: Poly,
    pub deg_b: usize,
    pub ball: Ball,
    pub sum_n: usize,
    pub orbit_size: u128,
    pub orbit_size_closed: BigRational,
    pub in_ball_count: u128,
    pub empirical: BigRational,
    pub haar: BigRational,
    pub abs_err: BigRational,
    /// Bound on `|in_ball_count − orbit_size_closed·haar|`.
    pub error_bound: BigRational,
    /// Largest `abs_err` among rows of the same degree.
    pub discrepancy_for_deg: BigRational,
}

pub const CSV_HEADER: [&str; 16] = [
    "q",
    "r",
    "mode",
    "b",
    "deg_b",
    "ball",
    "sum_n",
    "orbit_size",
    "orbit_size_closed",
    "in_ball_count",
    "empirical",
    "empirical_decimal",
    "haar",
    "abs_err",
    "error_bound",
    "discrepancy_for_deg",
];

impl ResultRow {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.r.to_string(),
            self.mode.to_string(),
            self.b.to_string(),
            self.deg_b.to_string(),
            self.ball.to_string(),
            self.sum_n.to_string(),
            self.orbit_size.to_string(),
            self.orbit_size_closed.to_string(),
            self.in_ball_count.to_string(),
            self.empirical.to_string(),
            decimal(&self.empirical),
            self.haar.to_string(),
            decimal(&self.abs_err),
            self.error_bound.to_string(),
            decimal(&self.discrepancy_for_deg),
        ]
    }
}

/// Significant digits in decimal renderings.
pub const DECIMAL_DIGITS: usize = 12;

/// `x` rounded half-to-even to [`DECIMAL_DIGITS`] significant digits, in
/// positional notation with trailing zeros removed.
pub fn decimal(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let ten = BigInt::from(10);
    let neg = x.is_negative();
    let x = x.abs();
    // 10^e ≤ x < 10^{e+1}
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while x < pow10(e) {
        e -= 1;
    }
    while x >= pow10(e + 1) {
        e += 1;
    }
    let shift = DECIMAL_DIGITS as i64 - 1 - e;
    let mut digits = round_half_even(&(&x * pow10(shift)));
    let mut scale = shift;
    if digits == ten.pow(DECIMAL_DIGITS as u32) {
        digits /= &ten;
        scale -= 1;
    }
    let mut s = digits.to_string();
    let body = if scale <= 0 {
        s.push_str(&"0".repeat((-scale) as usize));
        s
    } else {
        let scale = scale as usize;
        if s.len() <= scale {
            s = format!("{}{s}", "0".repeat(scale - s.len() + 1));
        }
        let (int, frac) = s.split_at(s.len() - scale);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn round_half_even(x: &BigRational) -> BigInt {
    let (floor, rem) = x.numer().div_mod_floor(x.denom());
    let twice: BigInt = rem * 2;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal if floor.is_even() => floor,
        std::cmp::Ordering::Equal => floor + 1,
    }
}

/// Orbit cardinality and the number of orbit points in each ball of
/// `family`, from one streaming pass.
pub fn ball_counts(orbit: &Orbit, family: &[Ball]) -> Result<(u128, Vec<u128>)> {
    let ring = orbit.ring();
    let q = ring.q();
    for ball in family {
        if ball.rank() != orbit.rank() {
            return Err(Error::DimensionMismatch {
                expected: orbit.rank(),
                got: ball.rank(),
            });
        }
    }
    let mut shapes: BTreeMap<&[usize], HashMap<u128, u128>> = BTreeMap::new();
    for ball in family {
        shapes.entry(ball.radii()).or_default();
    }
    let depth = family.iter().map(Ball::max_radius).max().unwrap_or(0);
    let b = orbit.order();
    let mut size = 0u128;
    for x in orbit.iter() {
        size += 1;
        let tails = x
            .nums()
            .iter()
            .map(|n| sigma_expand(ring, n, b, depth))
            .collect::<Result<Vec<_>>>()?;
        for (radii, counts) in shapes.iter_mut() {
            let mut idx = 0u128;
            for (tail, &n) in tails.iter().zip(radii.iter()) {
                for c in &tail.coeffs()[..n] {
                    idx = idx * q as u128 + c.0 as u128;
                }
            }
            *counts.entry(idx).or_default() += 1;
        }
    }
    let counts = family
        .iter()
        .map(|ball| {
            shapes[ball.radii()]
                .get(&ball.index(q))
                .copied()
                .unwrap_or(0)
        })
        .collect();
    Ok((size, counts))
}

/// `max_U |empirical(U) − haar(U)|` over `family`.
pub fn discrepancy(orbit: &Orbit, family: &[Ball]) -> Result<BigRational> {
    if family.is_empty() {
        return Err(Error::InvalidBall("empty ball family".into()));
    }
    let (size, counts) = ball_counts(orbit, family)?;
    let q = orbit.ring().q();
    let size = BigInt::from(size);
    Ok(family
        .iter()
        .zip(counts)
        .map(|(ball, c)| (BigRational::new(BigInt::from(c), size.clone()) - haar(q, ball)).abs())
        .max()
        .expect("nonempty"))
}

/// The base point for order `b`: configured numerators reduced modulo `b`.
pub fn base_point(ring: &PolyRing, nums: &[Poly], b: &Poly) -> Result<TorsionPoint> {
    let reduced = nums
        .iter()
        .map(|n| ring.rem(n, b))
        .collect::<Result<Vec<_>>>()?;
    TorsionPoint::new(ring, reduced.clone(), b.clone()).map_err(|_| Error::UnsatisfiableBase {
        point: format!(
            "({})",
            reduced
                .iter()
                .map(Poly::to_string)
                .collect::<Vec<_>>()
                .join(",")
        ),
        order: b.to_string(),
    })
}

fn rows_for_order(
    ring: &PolyRing,
    model: &GaloisImageModel,
    base: &[Poly],
    family: &[Ball],
    b: &Poly,
) -> Result<Vec<ResultRow>> {
    let q = ring.q();
    let r = base.len();
    let x = base_point(ring, base, b)?;
    let orb = orbit(ring, &x, model)?;
    let (size, counts) = ball_counts(&orb, family)?;
    let closed = orbit_size_closed(ring, b, r, model)?;
    if closed != BigRational::from_integer(size.into()) {
        return Err(Error::Inconsistent(format!(
            "orbit of {x} has {size} points, closed form gives {closed}"
        )));
    }
    if model.mode() == Mode::Full {
        let deg_b = b.degree().expect("nonconstant");
        let expected = BigRational::from_integer(BigInt::from(q).pow((r * deg_b) as u32))
            * euler_product(ring, b, r)?;
        if expected != closed {
            return Err(Error::Inconsistent(format!(
                "exact-order count for {b}: {closed} against Euler product {expected}"
            )));
        }
    }
    let size_int = BigInt::from(size);
    let mut rows = Vec::with_capacity(family.len());
    for (ball, count) in family.iter().zip(counts) {
        let main = ball_count_main_term(ring, b, r, model, ball)?;
        let bound = ball_count_error_bound(ring, b, r, model, ball)?;
        let count_q = BigRational::from_integer(count.into());
        if (&count_q - &main).abs() > bound {
            return Err(Error::Inconsistent(format!(
                "{b}, ball {ball}: count {count} is farther than {bound} from {main}"
            )));
        }
        let empirical = BigRational::new(count.into(), size_int.clone());
        let h = haar(q, ball);
        rows.push(ResultRow {
            q,
            r,
            mode: model.mode(),
            b: b.clone(),
            deg_b: b.degree().expect("nonconstant"),
            ball: ball.clone(),
            sum_n: ball.radius_sum(),
            orbit_size: size,
            orbit_size_closed: closed.clone(),
            in_ball_count: count,
            abs_err: (&empirical - &h).abs(),
            empirical,
            haar: h,
            error_bound: bound,
            discrepancy_for_deg: BigRational::zero(),
        });
    }
    Ok(rows)
}

/// Runs every order in the config and returns its rows sorted by
/// `(deg b, b, ball)`. Orders are processed concurrently on `workers`
/// threads; the first failing order in sequence order is reported.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let ring = config.ring()?;
    let model = config.resolve_model(&ring)?;
    let base = config.base_numerators(&ring)?;
    let orders = generate_orders(&ring, &config.orders)?;
    let family = ball_family(ring.field(), config.rank, config.balls.max_sum);
    if family.is_empty() {
        return Err(Error::Config(format!(
            "{} admits no ball of rank {}",
            config.balls, config.rank
        )));
    }
    let max_deg = orders.iter().filter_map(Poly::degree).max().unwrap_or(0);
    ring.warm_irreducibles(max_deg.max(model.level_degree()));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let per_order: Vec<Result<Vec<ResultRow>>> = pool.install(|| {
        orders
            .par_iter()
            .map(|b| rows_for_order(&ring, &model, &base, &family, b))
            .collect()
    });
    let mut rows = Vec::new();
    for res in per_order {
        rows.extend(res?);
    }
    rows.sort_by(|a, b| (a.deg_b, &a.b, &a.ball).cmp(&(b.deg_b, &b.b, &b.ball)));

    let mut worst: BTreeMap<usize, BigRational> = BTreeMap::new();
    for row in &rows {
        let w = worst.entry(row.deg_b).or_insert_with(BigRational::zero);
        if row.abs_err > *w {
            *w = row.abs_err.clone();
        }
    }
    for row in &mut rows {
        row.discrepancy_for_deg = worst[&row.deg_b].clone();
    }
    Ok(rows)
}

/// `#` lines echoing the config, the header, then one line per row.
pub fn write_csv<W: Write>(
    config: &ExperimentConfig,
    rows: &[ResultRow],
    mut out: W,
) -> Result<()> {
    for (key, value) in config.echo() {
        writeln!(out, "# {key} = {value}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the experiment and renders it as CSV text.
pub fn run_to_string(config: &ExperimentConfig) -> Result<String> {
    let rows = run_experiment(config)?;
    let mut buf = Vec::new();
    write_csv(config, &rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

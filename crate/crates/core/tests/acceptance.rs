//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Expected values come from brute-force enumeration written here,
//! independent of the library's closed forms.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use equidist_core::lab::{run_experiment, run_to_string, ExperimentConfig};
use equidist_core::ore::tau_mul;
use equidist_core::{
    ball_contains_exact, ball_contains_tail, ball_count_error_bound, ball_count_main_term,
    ball_family, euler_product, lower_bound_check, orbit, orbit_size_closed, torsion_to_g, v_infty,
    Ball, DrinfeldModule, GaloisImageModel, Mode, Orbit, PhiCache, Poly, PolyRing, RationalFn,
    TorsionPoint,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ring(p: u32) -> PolyRing {
    PolyRing::prime(p).unwrap()
}

fn rat_pow(q: u32, k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(k as u32))
}

/// Monic polynomials dividing `b` with degree ≥ 1, by trial over all monics.
fn nontrivial_divisors(ring: &PolyRing, b: &Poly) -> Vec<Poly> {
    let d = b.degree().unwrap();
    (1..=d)
        .flat_map(|k| ring.monics_of_degree(k).collect::<Vec<_>>())
        .filter(|g| ring.rem(b, g).unwrap().is_zero())
        .collect()
}

/// The exact-order-`b` numerator tuples of rank `r`, by trial: no common
/// nontrivial divisor with `b`.
fn brute_exact_order(ring: &PolyRing, b: &Poly, r: usize) -> Vec<Vec<Poly>> {
    let q = ring.q();
    let deg = b.degree().unwrap();
    let divs = nontrivial_divisors(ring, b);
    let per = (q as u128).pow(deg as u32);
    let total = per.pow(r as u32);
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut nums = Vec::with_capacity(r);
        for _ in 0..r {
            nums.push(Poly::from_index(q, deg, idx % per));
            idx /= per;
        }
        let shared = divs
            .iter()
            .any(|g| nums.iter().all(|n| ring.rem(n, g).unwrap().is_zero()));
        if !shared {
            out.push(nums);
        }
    }
    out
}

/// `v_∞(b_i/b − a_i) ≥ n_i + 1` for all `i`, through rational arithmetic.
fn oracle_in_ball(ring: &PolyRing, nums: &[Poly], b: &Poly, ball: &Ball) -> bool {
    nums.iter().enumerate().all(|(i, n)| {
        let n_i = ball.radii()[i];
        let center = RationalFn::new(
            ring,
            ball.reversed_center(i),
            ring.pow(&Poly::t(), n_i as u64),
        )
        .unwrap();
        let x = RationalFn::new(ring, n.clone(), b.clone()).unwrap();
        let diff = x.sub(ring, &center);
        diff.is_zero() || v_infty(&diff).unwrap() > n_i as i64
    })
}

fn moebius_sum(ring: &PolyRing, b0: &Poly, r: usize) -> BigRational {
    let q = ring.q();
    let mut acc = BigRational::zero();
    for d in ring.monic_divisors(b0).unwrap() {
        let w = BigRational::one() / rat_pow(q, r * d.degree().unwrap());
        match ring.moebius(&d).unwrap() {
            1 => acc += w,
            -1 => acc -= w,
            _ => {}
        }
    }
    acc
}

fn models(ring: &PolyRing) -> Vec<GaloisImageModel> {
    let t = Poly::t();
    let t1 = ring.parse("t+1").unwrap();
    let mut out = Vec::new();
    for primes in [vec![], vec![t.clone()], vec![t1.clone()], vec![t, t1]] {
        for m in [1, 2] {
            for mode in [Mode::Minimal, Mode::Full] {
                out.push(GaloisImageModel::new(ring, primes.clone(), m, mode).unwrap());
            }
        }
    }
    out
}

fn c1_moebius_identity() -> Outcome {
    let mut checked = 0;
    for p in [2, 3] {
        let r = ring(p);
        for f in r.monics_up_to(6) {
            let s: i64 = r
                .monic_divisors(&f)
                .unwrap()
                .iter()
                .map(|g| r.moebius(g).unwrap() as i64)
                .sum();
            let expect = i64::from(f.degree() == Some(0));
            ensure(s == expect, || format!("q={p}, f={f}: sum {s}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} polynomials"))
}

fn c2_euler_product() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for p in [2u32, 3] {
        let r = ring(p);
        for _ in 0..200 {
            let deg = rng.gen_range(0..=8usize);
            let idx = rng.gen_range(0..(p as u128).pow(deg as u32));
            let b0 = Poly::monic_from_index(r.field(), deg, idx);
            for rank in 1..=3 {
                let lhs = euler_product(&r, &b0, rank).unwrap();
                let rhs = moebius_sum(&r, &b0, rank);
                ensure(lhs == rhs, || {
                    format!("q={p}, b0={b0}, r={rank}: {lhs} vs {rhs}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (b0, r) pairs"))
}

fn c3_orbit_size() -> Outcome {
    let r = ring(2);
    let mut checked = 0;
    for b in r.monics_up_to(3).filter(|b| b.degree() != Some(0)) {
        for rank in [1, 2] {
            let points = brute_exact_order(&r, &b, rank);
            for model in models(&r) {
                let b_prime = match model.mode() {
                    Mode::Full => Poly::one(),
                    Mode::Minimal => r.gcd(&b, model.conductor()).unwrap(),
                };
                let closed = orbit_size_closed(&r, &b, rank, &model).unwrap();
                for x in &points {
                    let residue = |v: &[Poly]| -> Vec<Poly> {
                        v.iter().map(|n| r.rem(n, &b_prime).unwrap()).collect()
                    };
                    let rx = residue(x);
                    let brute = points.iter().filter(|y| residue(y) == rx).count();
                    ensure(closed == BigRational::from_integer(brute.into()), || {
                        format!("b={b}, r={rank}, {model}, x={x:?}: closed {closed}, brute {brute}")
                    })?;
                    let base = TorsionPoint::new(&r, x.clone(), b.clone()).unwrap();
                    let lib = orbit(&r, &base, &model).unwrap().count();
                    ensure(lib == brute as u128, || {
                        format!("b={b}, {model}: enumerated {lib}, brute {brute}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (b, r, model, base) cases"))
}

fn c4_exact_order_count() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        let r = ring(p);
        for b in r.monics_up_to(3).filter(|b| b.degree() != Some(0)) {
            for rank in [1, 2] {
                let brute = brute_exact_order(&r, &b, rank).len();
                let closed =
                    rat_pow(p, rank * b.degree().unwrap()) * euler_product(&r, &b, rank).unwrap();
                ensure(closed == BigRational::from_integer(brute.into()), || {
                    format!("q={p}, b={b}, r={rank}: closed {closed}, brute {brute}")
                })?;
                let lib = Orbit::all_of_order(&r, &b, rank).unwrap().count();
                ensure(lib == brute as u128, || {
                    format!("q={p}, b={b}: enumerated {lib}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (q, b, r) cases"))
}

/// Criteria 5 and 6 share one enumeration.
fn c5_c6_ball_counts() -> (Outcome, Outcome) {
    let r = ring(2);
    let rank = 2;
    let family = ball_family(r.field(), rank, 3);
    let t = Poly::t();
    let t1 = r.parse("t+1").unwrap();
    let mut bracket = vec![GaloisImageModel::unrestricted(Mode::Full)];
    for primes in [
        vec![t.clone()],
        vec![t1.clone()],
        vec![t.clone(), t1.clone()],
    ] {
        for m in [1, 2] {
            bracket.push(GaloisImageModel::new(&r, primes.clone(), m, Mode::Minimal).unwrap());
            bracket.push(GaloisImageModel::new(&r, primes.clone(), m, Mode::Full).unwrap());
        }
    }
    let mut coset_checks = 0u64;
    let mut pairs = 0u64;
    let mut c5: Result<(), String> = Ok(());
    let mut c6: Result<(), String> = Ok(());
    for b in r.monics_up_to(6).filter(|b| b.degree() != Some(0)) {
        let points = brute_exact_order(&r, &b, rank);
        // membership[k][j]: point k in ball j
        let mut membership = Vec::with_capacity(points.len());
        for nums in &points {
            let x = TorsionPoint::new(&r, nums.clone(), b.clone()).unwrap();
            let g = torsion_to_g(&r, &x, 3).unwrap();
            let mut row = Vec::with_capacity(family.len());
            for ball in &family {
                let oracle = oracle_in_ball(&r, nums, &b, ball);
                let exact = ball_contains_exact(&r, &x, ball).unwrap();
                let tail = ball_contains_tail(&g, ball).unwrap();
                pairs += 1;
                if c6.is_ok() && (exact != tail || exact != oracle) {
                    c6 = Err(format!(
                        "x={x}, ball {ball}: degree {exact}, tail {tail}, valuation {oracle}"
                    ));
                }
                row.push(oracle);
            }
            membership.push(row);
        }
        for model in &bracket {
            let (b_prime, level) = match model.mode() {
                Mode::Full => (Poly::one(), 0),
                Mode::Minimal => (r.gcd(&b, model.conductor()).unwrap(), model.level_degree()),
            };
            let mut cosets: BTreeMap<Vec<Poly>, Vec<usize>> = BTreeMap::new();
            for (k, nums) in points.iter().enumerate() {
                let res = nums.iter().map(|n| r.rem(n, &b_prime).unwrap()).collect();
                cosets.entry(res).or_default().push(k);
            }
            let cap = BigInt::from(2).pow((level * rank) as u32);
            if c5.is_ok() && BigInt::from(cosets.len()) > cap {
                c5 = Err(format!(
                    "b={b}, {model}: {} cosets above q^(L r) = {cap}",
                    cosets.len()
                ));
            }
            for (j, ball) in family.iter().enumerate() {
                let main = ball_count_main_term(&r, &b, rank, model, ball).unwrap();
                let bound = ball_count_error_bound(&r, &b, rank, model, ball).unwrap();
                for members in cosets.values() {
                    let count = members.iter().filter(|&&k| membership[k][j]).count();
                    let diff = (BigRational::from_integer(count.into()) - &main).abs();
                    coset_checks += 1;
                    if c5.is_ok() && diff > bound {
                        c5 = Err(format!(
                            "b={b}, {model}, ball {ball}: |{count} - {main}| > {bound}"
                        ));
                    }
                }
            }
        }
    }
    (
        c5.map(|_| format!("{coset_checks} (b, model, coset, ball) counts")),
        c6.map(|_| format!("{pairs} (point, ball) pairs")),
    )
}

fn c7_morphism_laws() -> Outcome {
    let mut checked = 0u64;
    for (p, higher) in [
        (2u32, vec!["1"]),
        (2, vec!["t", "1"]),
        (3, vec!["1"]),
        (3, vec!["1", "1"]),
    ] {
        let r = ring(p);
        let rank = higher.len();
        let higher = higher.iter().map(|s| r.parse(s).unwrap()).collect();
        let module = DrinfeldModule::from_coefficients(r.clone(), higher).unwrap();
        let mut cache = PhiCache::new(&module);
        let polys: Vec<Poly> = (0..(p as u128).pow(4))
            .map(|i| Poly::from_index(p, 4, i))
            .collect();
        let phis: Vec<_> = polys.iter().map(|a| cache.phi_of(a)).collect();
        for (a, fa) in polys.iter().zip(&phis) {
            ensure(fa.degree() == a.degree().map(|d| rank * d), || {
                format!("q={p}, r={rank}, a={a}: tau-degree {:?}", fa.degree())
            })?;
            ensure(fa.coeff(0) == RationalFn::from_poly(a.clone()), || {
                format!("q={p}, r={rank}, a={a}: constant term {}", fa.coeff(0))
            })?;
            for (b, fb) in polys.iter().zip(&phis) {
                let lhs = cache.phi_of(&r.mul(a, b));
                ensure(lhs == tau_mul(&r, fa, fb), || {
                    format!("q={p}, r={rank}: phi_(ab) != phi_a phi_b for a={a}, b={b}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (module, a, b) triples"))
}

fn c8_lower_bound() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        let r = ring(p);
        for b in r.monics_up_to(8).filter(|b| b.degree() != Some(0)) {
            for rank in [2, 3] {
                let lb = lower_bound_check(&r, &b, rank).unwrap();
                let deg = b.degree().unwrap();
                ensure(
                    lb.bound_squared == BigInt::from(p).pow((rank * deg) as u32),
                    || format!("q={p}, b={b}: bound"),
                )?;
                ensure(
                    lb.holds && &lb.value * &lb.value >= lb.bound_squared,
                    || format!("q={p}, b={b}, r={rank}: value {}", lb.value),
                )?;
                let count = rat_pow(p, rank * deg) * euler_product(&r, &b, rank).unwrap();
                ensure(count == BigRational::from_integer(lb.value.clone()), || {
                    format!(
                        "q={p}, b={b}, r={rank}: value {} but count {count}",
                        lb.value
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (q, b, r) cases"))
}

fn trend_config() -> ExperimentConfig {
    ExperimentConfig::from_text(
        "p = 2\nrank = 2\nmodel = P=;m=1\nmode = full\norders = list:t^2;t^4;t^6;t^8;t^10\nballs = sum<=2\n",
    )
    .unwrap()
}

fn c9_trend() -> Outcome {
    let rows = run_experiment(&trend_config()).map_err(|e| e.to_string())?;
    let mut per_deg: BTreeMap<usize, BigRational> = BTreeMap::new();
    for row in &rows {
        let w = per_deg.entry(row.deg_b).or_insert_with(BigRational::zero);
        if row.abs_err > *w {
            *w = row.abs_err.clone();
        }
    }
    for row in &rows {
        ensure(row.discrepancy_for_deg == per_deg[&row.deg_b], || {
            format!("per-degree column wrong at {}", row.b)
        })?;
    }
    let seq: Vec<BigRational> = per_deg.values().cloned().collect();
    ensure(per_deg.keys().copied().eq([2, 4, 6, 8, 10]), || {
        "missing degrees".into()
    })?;
    ensure(seq.windows(2).all(|w| w[1] <= w[0]), || {
        format!("not non-increasing: {seq:?}")
    })?;
    let last = seq.last().unwrap();
    let threshold = BigRational::new(1.into(), 50.into());
    ensure(*last <= threshold, || {
        format!("final discrepancy {last} above 0.02")
    })?;
    let shown: Vec<String> = seq.iter().map(ToString::to_string).collect();
    Ok(format!("discrepancies [{}]", shown.join(", ")))
}

fn c10_determinism() -> Outcome {
    let cfg = trend_config();
    let a = run_to_string(&cfg).map_err(|e| e.to_string())?;
    let b = run_to_string(&cfg).map_err(|e| e.to_string())?;
    ensure(a.as_bytes() == b.as_bytes(), || "CSV outputs differ".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn timed<T>(f: impl FnOnce() -> T) -> (Result<T, String>, Duration) {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())
    });
    (res, start.elapsed())
}

fn report(id: u32, name: &str, limit: Duration, outcome: Outcome, elapsed: Duration) -> bool {
    let outcome = outcome.and_then(|detail| {
        if elapsed <= limit {
            Ok(detail)
        } else {
            Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
        }
    });
    let ok = outcome.is_ok();
    let detail = outcome.unwrap_or_else(|e| e);
    println!(
        "{} criterion {id:>2}: {name} [{elapsed:.2?} / {limit:?}] {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;
    let single: [Criterion; 4] = [
        (
            1,
            "Moebius identity over F_2, F_3 up to degree 6",
            secs(1),
            c1_moebius_identity,
        ),
        (
            2,
            "Euler product equals Moebius sum",
            secs(5),
            c2_euler_product,
        ),
        (
            3,
            "closed orbit size equals brute-force orbit",
            secs(60),
            c3_orbit_size,
        ),
        (
            4,
            "exact-order count equals q^(r deg b) times Euler product",
            secs(30),
            c4_exact_order_count,
        ),
    ];
    for (id, name, limit, f) in single {
        let (res, el) = timed(f);
        all &= report(id, name, limit, res.and_then(|o| o), el);
    }

    let (res, el) = timed(c5_c6_ball_counts);
    let (r5, r6) = match res {
        Ok(pair) => pair,
        Err(e) => (Err(e.clone()), Err(e)),
    };
    all &= report(5, "certified ball-count error bound", secs(300), r5, el);
    all &= report(6, "tail test agrees with degree test", secs(300), r6, el);

    let rest: [Criterion; 4] = [
        (7, "Drinfeld morphism laws", secs(10), c7_morphism_laws),
        (
            8,
            "lower-bound inequality in exact integers",
            secs(10),
            c8_lower_bound,
        ),
        (
            9,
            "discrepancy trend for t-power orders",
            secs(600),
            c9_trend,
        ),
        (
            10,
            "byte-identical CSV across runs",
            secs(1200),
            c10_determinism,
        ),
    ];
    for (id, name, limit, f) in rest {
        let (res, el) = timed(f);
        all &= report(id, name, limit, res.and_then(|o| o), el);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use equidist_core::ore::tau_mul;
use equidist_core::{
    ball_contains_exact, ball_contains_tail, euler_product, orbit_size_closed, sigma_expand,
    torsion_to_g, v_infty, Ball, DrinfeldModule, GaloisImageModel, Mode, PhiCache, Poly, PolyRing,
    RationalFn, TorsionPoint,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ring(p: u32) -> PolyRing {
    PolyRing::prime(p).unwrap()
}

fn poly(p: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..p, 0..=max_deg + 1)
        .prop_map(|c| Poly::from_coeffs(c.into_iter().map(equidist_core::FqElem).collect()))
}

fn nonzero(p: u32, max_deg: usize) -> impl Strategy<Value = Poly> {
    poly(p, max_deg).prop_filter("nonzero", |f| !f.is_zero())
}

fn monic(p: u32, min_deg: usize, max_deg: usize) -> impl Strategy<Value = Poly> {
    (min_deg..=max_deg).prop_flat_map(move |d| {
        (0..(p as u128).pow(d as u32))
            .prop_map(move |i| Poly::monic_from_index(ring(p).field(), d, i))
    })
}

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

proptest! {
    #[test]
    fn divmod_reconstructs((p, a, b) in prime().prop_flat_map(|p| (Just(p), poly(p, 8), nonzero(p, 4)))) {
        let r = ring(p);
        let (quo, rem) = r.divmod(&a, &b).unwrap();
        prop_assert_eq!(r.add(&r.mul(&quo, &b), &rem), a);
        prop_assert!(rem.degree_or_neg() < b.degree_or_neg());
    }

    #[test]
    fn gcd_is_associative_and_divides(a in nonzero(3, 6), b in nonzero(3, 6), c in nonzero(3, 6)) {
        let r = ring(3);
        let g1 = r.gcd(&r.gcd(&a, &b).unwrap(), &c).unwrap();
        let g2 = r.gcd(&a, &r.gcd(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&g1, &g2);
        prop_assert!(g1.is_monic());
        for f in [&a, &b, &c] {
            prop_assert!(r.divides(&g1, f).unwrap());
        }
    }

    #[test]
    fn factorization_round_trips(f in monic(2, 1, 12)) {
        let r = ring(2);
        let fac = r.factor(&f).unwrap();
        let mut prod = Poly::one();
        for pp in &fac.factors {
            prop_assert!(r.is_irreducible(&pp.prime).unwrap());
            prod = r.mul(&prod, &r.pow(&pp.prime, pp.exp as u64));
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn moebius_sums_vanish(f in monic(3, 1, 6)) {
        let r = ring(3);
        let s: i64 = r.monic_divisors(&f).unwrap().iter().map(|g| r.moebius(g).unwrap() as i64).sum();
        prop_assert_eq!(s, 0);
    }

    #[test]
    fn moebius_is_multiplicative(f in monic(2, 1, 6), g in monic(2, 1, 6)) {
        let r = ring(2);
        prop_assume!(r.gcd(&f, &g).unwrap().is_one());
        let fg = r.mul(&f, &g);
        prop_assert_eq!(r.moebius(&fg).unwrap(), r.moebius(&f).unwrap() * r.moebius(&g).unwrap());
    }

    #[test]
    fn sigma_is_additive(a in poly(3, 5), c in poly(3, 5), b in monic(3, 1, 5), n in 1usize..10) {
        let r = ring(3);
        let lhs = sigma_expand(&r, &r.add(&a, &c), &b, n).unwrap();
        let rhs = sigma_expand(&r, &a, &b, n).unwrap().add(r.field(), &sigma_expand(&r, &c, &b, n).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma_agrees_with_valuation(a in nonzero(2, 6), b in monic(2, 1, 6)) {
        let r = ring(2);
        let rem = r.rem(&a, &b).unwrap();
        prop_assume!(!rem.is_zero());
        let tail = sigma_expand(&r, &a, &b, 16).unwrap();
        let first = tail.coeffs().iter().position(|c| !c.is_zero()).map(|i| i as i64 + 1);
        let v = v_infty(&RationalFn::new(&r, rem, b).unwrap()).unwrap();
        prop_assert_eq!(first, Some(v));
    }

    #[test]
    fn valuation_laws(a in nonzero(3, 5), b in nonzero(3, 5), c in nonzero(3, 5), d in nonzero(3, 5)) {
        let r = ring(3);
        let x = RationalFn::new(&r, a, b).unwrap();
        let y = RationalFn::new(&r, c, d).unwrap();
        let vx = v_infty(&x).unwrap();
        let vy = v_infty(&y).unwrap();
        prop_assert_eq!(v_infty(&x.mul(&r, &y)).unwrap(), vx + vy);
        let s = x.add(&r, &y);
        if !s.is_zero() {
            prop_assert!(v_infty(&s).unwrap() >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(v_infty(&s).unwrap(), vx.min(vy));
            }
        }
    }

    #[test]
    fn membership_tests_agree(nums in prop::collection::vec(poly(2, 5), 2), b in monic(2, 1, 6), idx in any::<u64>(), n1 in 1usize..4, n2 in 1usize..4) {
        let r = ring(2);
        let nums: Vec<Poly> = nums.iter().map(|n| r.rem(n, &b).unwrap()).collect();
        let Ok(x) = TorsionPoint::new(&r, nums, b) else { return Ok(()) };
        let radii = vec![n1, n2];
        let ball = Ball::from_index(2, &radii, idx as u128 % (1u128 << (n1 + n2)));
        let g = torsion_to_g(&r, &x, 3).unwrap();
        prop_assert_eq!(ball_contains_exact(&r, &x, &ball).unwrap(), ball_contains_tail(&g, &ball).unwrap());
    }

    #[test]
    fn euler_product_bounds(b in monic(3, 0, 8), rank in 1usize..4) {
        let r = ring(3);
        let e = euler_product(&r, &b, rank).unwrap();
        prop_assert!(e > BigRational::from_integer(0.into()));
        prop_assert!(e <= BigRational::from_integer(1.into()));
    }

    #[test]
    fn morphism_laws(a in poly(3, 3), b in poly(3, 3)) {
        let r = ring(3);
        let m = DrinfeldModule::from_coefficients(r.clone(), vec![Poly::t(), Poly::one()]).unwrap();
        let mut cache = PhiCache::new(&m);
        let fa = cache.phi_of(&a);
        let fb = cache.phi_of(&b);
        prop_assert_eq!(cache.phi_of(&r.mul(&a, &b)), tau_mul(&r, &fa, &fb));
        prop_assert_eq!(cache.phi_of(&r.add(&a, &b)), fa.add(&r, &fb));
    }
}

#[test]
fn t_power_driver_is_increasing() {
    let r = ring(2);
    let model = GaloisImageModel::new(&r, vec![Poly::t()], 1, Mode::Minimal).unwrap();
    for rank in [2usize, 3] {
        let mut prev: Option<BigRational> = None;
        for k in 1..=12u64 {
            let b = r.pow(&Poly::t(), k);
            let size = orbit_size_closed(&r, &b, rank, &model).unwrap();
            if let Some(p) = &prev {
                assert!(&size > p, "r={rank}, k={k}");
            }
            prev = Some(size);
        }
        let last = prev.unwrap();
        assert_eq!(
            last,
            BigRational::from_integer(BigInt::from(2).pow((11 * rank) as u32))
        );
    }
}

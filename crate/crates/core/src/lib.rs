//! Equidistribution of Galois orbits of Drinfeld-module torsion points.
//!
//! Arithmetic over `F_q[t]` and `F_q(t)`, Ore polynomials and Drinfeld
//! modules, the abstract torsion module with its Galois-image model, the
//! compact group `G = (F_q((1/t))/F_q[t])^r` with its cylinder balls, the
//! polynomial Möbius closed forms, and an experiment runner comparing
//! empirical orbit measures with Haar measure.

pub mod counting;
pub mod error;
pub mod field;
pub mod lab;
pub mod laurent;
pub mod ore;
pub mod poly;
pub mod ratfn;
pub mod torsion;

pub use counting::{
    ball_count_error_bound, ball_count_main_term, euler_product, lower_bound_check,
    orbit_size_closed, CountReport, LowerBound,
};
pub use error::{Error, Result};
pub use field::{Fq, FqConfig, FqElem};
pub use laurent::{
    ball_contains_exact, ball_contains_tail, ball_family, haar, sigma_expand, torsion_to_g,
    v_infty, Ball, GPoint, LaurentTail,
};
pub use ore::{DrinfeldModule, PhiCache, TauPoly};
pub use poly::{Factorization, Poly, PolyRing, PrimePower};
pub use ratfn::RationalFn;
pub use torsion::{
    b_prime, coset_of, exact_order_points, orbit, point_order, CosetResidue, GaloisImageModel,
    Mode, Orbit, TorsionPoint,
};

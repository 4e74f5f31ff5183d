//! The abstract torsion module `(A/b)^r`, the Galois-image model and orbit
//! enumeration.
//!
//! A torsion point of exact order `b` is the tuple `(b_1/b, …, b_r/b)` with
//! `deg b_i < deg b` and `gcd(b_1, …, b_r, b) = 1`. The Galois image is
//! modelled by a finite set of exceptional primes `P_1..P_l` and a level `m`:
//! the image contains every matrix congruent to the identity modulo
//! `P = (P_1⋯P_l)^m`, so in [`Mode::Minimal`] the orbit of `x` is the set of
//! exact-order points congruent to `x` modulo `b' = gcd(b, P)`. In
//! [`Mode::Full`] the image is everything and the orbit is every exact-order
//! point. Images strictly between the two are not modelled.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};

/// `(b_1/b, …, b_r/b)` of exact order `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    order: Poly,
    nums: Vec<Poly>,
}

impl TorsionPoint {
    /// Validates monic non-constant order, `deg b_i < deg b` and exact order.
    pub fn new(ring: &PolyRing, nums: Vec<Poly>, order: Poly) -> Result<TorsionPoint> {
        check_order(&order)?;
        if nums.is_empty() {
            return Err(Error::InvalidPoint("rank must be at least 1".into()));
        }
        let d = order.degree().expect("nonconstant");
        if let Some(bad) = nums.iter().find(|n| n.degree_or_neg() >= d as isize) {
            return Err(Error::InvalidPoint(format!(
                "numerator {bad} has degree not below deg({order})"
            )));
        }
        if !ring
            .gcd_all(nums.iter().chain(std::iter::once(&order)))?
            .is_one()
        {
            return Err(Error::InvalidPoint(format!(
                "({}) / {order} does not have exact order {order}",
                join(&nums)
            )));
        }
        Ok(TorsionPoint { order, nums })
    }

    /// For callers that already established the invariants.
    pub(crate) fn from_parts(nums: Vec<Poly>, order: Poly) -> TorsionPoint {
        TorsionPoint { order, nums }
    }

    /// `(1, 0, …, 0) / b`, always of exact order `b`.
    pub fn unit_vector(order: Poly, rank: usize) -> Result<TorsionPoint> {
        check_order(&order)?;
        let mut nums = vec![Poly::zero(); rank.max(1)];
        nums[0] = Poly::one();
        Ok(TorsionPoint { order, nums })
    }

    pub fn order(&self) -> &Poly {
        &self.order
    }

    pub fn nums(&self) -> &[Poly] {
        &self.nums
    }

    pub fn rank(&self) -> usize {
        self.nums.len()
    }

    /// `"(<b_1>,…,<b_r>)/<b>"`.
    pub fn parse(ring: &PolyRing, s: &str) -> Result<TorsionPoint> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("malformed torsion point {s:?}"));
        let (tuple, order) = s.rsplit_once('/').ok_or_else(bad)?;
        let nums = parse_tuple(ring, tuple)?;
        TorsionPoint::new(ring, nums, ring.parse(order)?)
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/{}", join(&self.nums), self.order)
    }
}

pub(crate) fn join(polys: &[Poly]) -> String {
    polys
        .iter()
        .map(Poly::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses `"(<poly>,…,<poly>)"`.
pub fn parse_tuple(ring: &PolyRing, s: &str) -> Result<Vec<Poly>> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected a parenthesized tuple, got {s:?}")))?;
    inner.split(',').map(|p| ring.parse(p)).collect()
}

fn check_order(order: &Poly) -> Result<()> {
    match order.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ConstantPolynomial(order.to_string())),
        Some(_) if !order.is_monic() => {
            Err(Error::InvalidPoint(format!("order {order} must be monic")))
        }
        Some(_) => Ok(()),
    }
}

/// Which end of the bracket the Galois image is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Exactly the congruence subgroup: orbits are single `b'`-cosets.
    Minimal,
    /// The whole group: orbits are all exact-order points.
    Full,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Minimal => "minimal",
            Mode::Full => "full",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.trim() {
            "minimal" => Ok(Mode::Minimal),
            "full" => Ok(Mode::Full),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Exceptional primes `P_1..P_l`, level `m ≥ 1` and a [`Mode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisImageModel {
    primes: Vec<Poly>,
    m: u32,
    mode: Mode,
    conductor: Poly,
}

impl GaloisImageModel {
    pub fn new(ring: &PolyRing, mut primes: Vec<Poly>, m: u32, mode: Mode) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidModel("m must be at least 1".into()));
        }
        for p in &primes {
            if !p.is_monic() || !ring.is_irreducible(p)? {
                return Err(Error::InvalidModel(format!("{p} is not monic irreducible")));
            }
        }
        primes.sort();
        if primes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel(
                "exceptional primes must be distinct".into(),
            ));
        }
        let radical = primes.iter().fold(Poly::one(), |acc, p| ring.mul(&acc, p));
        let conductor = ring.pow(&radical, m as u64);
        Ok(GaloisImageModel {
            primes,
            m,
            mode,
            conductor,
        })
    }

    /// No exceptional primes.
    pub fn unrestricted(mode: Mode) -> GaloisImageModel {
        GaloisImageModel {
            primes: Vec::new(),
            m: 1,
            mode,
            conductor: Poly::one(),
        }
    }

    pub fn primes(&self) -> &[Poly] {
        &self.primes
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(&self, mode: Mode) -> GaloisImageModel {
        GaloisImageModel {
            mode,
            ..self.clone()
        }
    }

    /// `P = (P_1⋯P_l)^m`.
    pub fn conductor(&self) -> &Poly {
        &self.conductor
    }

    /// `L = deg P`.
    pub fn level_degree(&self) -> usize {
        self.conductor.degree().expect("nonzero")
    }

    /// `b'` governing orbits: `gcd(b, P)` in minimal mode, `1` in full mode.
    pub fn effective_b_prime(&self, ring: &PolyRing, b: &Poly) -> Result<Poly> {
        match self.mode {
            Mode::Minimal => b_prime(ring, b, self),
            Mode::Full => Ok(Poly::one()),
        }
    }

    /// `L` governing counts: `deg P` in minimal mode, `0` in full mode.
    pub fn effective_level_degree(&self) -> usize {
        match self.mode {
            Mode::Minimal => self.level_degree(),
            Mode::Full => 0,
        }
    }

    /// `"P=<poly>,<poly>;m=<int>[;mode=minimal|full]"`; mode defaults to
    /// minimal when omitted.
    pub fn parse(ring: &PolyRing, s: &str) -> Result<GaloisImageModel> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut primes = None;
        let mut m = None;
        let mut mode = Mode::Minimal;
        for part in s.split(';').filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed model field {part:?}")))?;
            match key {
                "P" => {
                    primes = Some(if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|p| ring.parse(p))
                            .collect::<Result<_>>()?
                    })
                }
                "m" => {
                    m = Some(
                        value
                            .parse::<u32>()
                            .map_err(|_| Error::Parse(format!("malformed level m={value:?}")))?,
                    )
                }
                "mode" => mode = value.parse()?,
                other => return Err(Error::Parse(format!("unknown model field {other:?}"))),
            }
        }
        let primes = primes.ok_or_else(|| Error::Parse(format!("model {s:?} lacks P=")))?;
        GaloisImageModel::new(ring, primes, m.unwrap_or(1), mode)
    }
}

impl fmt::Display for GaloisImageModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={};m={};mode={}",
            join(&self.primes),
            self.m,
            self.mode
        )
    }
}

/// `α ≡ (b_1, …, b_r) mod b'` with `deg α_i < deg b'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetResidue {
    pub modulus: Poly,
    pub alphas: Vec<Poly>,
}

/// `gcd(b, P)`; `1` when the model has no exceptional primes.
pub fn b_prime(ring: &PolyRing, b: &Poly, model: &GaloisImageModel) -> Result<Poly> {
    check_order(b)?;
    ring.gcd(b, model.conductor())
}

/// Reduction of `x` modulo `b' = gcd(b, P)` of the model (whatever its mode).
pub fn coset_of(
    ring: &PolyRing,
    x: &TorsionPoint,
    model: &GaloisImageModel,
) -> Result<CosetResidue> {
    let modulus = b_prime(ring, x.order(), model)?;
    let alphas = x
        .nums()
        .iter()
        .map(|n| ring.rem(n, &modulus))
        .collect::<Result<_>>()?;
    Ok(CosetResidue { modulus, alphas })
}

/// `b / gcd(b_1, …, b_r, b)`.
pub fn point_order(ring: &PolyRing, nums: &[Poly], b: &Poly) -> Result<Poly> {
    check_order(b)?;
    let g = ring.gcd_all(nums.iter().chain(std::iter::once(b)))?;
    ring.exact_div(b, &g)
}

/// Every exact-order-`b` point of rank `r`, lexicographic in the coefficient
/// vectors (first coordinate most significant).
pub fn exact_order_points(ring: &PolyRing, b: &Poly, r: usize) -> Result<OrbitIter> {
    Ok(Orbit::all_of_order(ring, b, r)?.into_iter())
}

/// The orbit of `x` under the model.
pub fn orbit(ring: &PolyRing, x: &TorsionPoint, model: &GaloisImageModel) -> Result<Orbit> {
    let b = x.order().clone();
    let modulus = model.effective_b_prime(ring, &b)?;
    let residue = x
        .nums()
        .iter()
        .map(|n| ring.rem(n, &modulus))
        .collect::<Result<Vec<_>>>()?;
    let mut o = Orbit::build(ring, b, x.rank(), modulus, residue)?;
    o.mode = model.mode();
    o.base = Some(x.clone());
    Ok(o)
}

/// Default materialization cap for [`Orbit::materialize`].
pub const DEFAULT_MATERIALIZE_CAP: u128 = 1 << 22;

/// A Galois orbit of exact-order-`b` points: all exact-order tuples
/// `(α_i + b'·q_i)/b` for a fixed residue `α` mod `b'`.
///
/// Enumeration walks candidate indices `0..candidate_count()` and filters by
/// the exact-order condition, so disjoint index ranges can be scanned
/// independently.
#[derive(Debug, Clone)]
pub struct Orbit {
    ring: PolyRing,
    order: Poly,
    rank: usize,
    mode: Mode,
    base: Option<TorsionPoint>,
    modulus: Poly,
    residue: Vec<Poly>,
    free_len: usize,
    block: u128,
    order_primes: Vec<Poly>,
}

impl Orbit {
    /// All exact-order-`b` points (the full-mode orbit).
    pub fn all_of_order(ring: &PolyRing, b: &Poly, r: usize) -> Result<Orbit> {
        if r == 0 {
            return Err(Error::RankTooSmall { min: 1, got: 0 });
        }
        check_order(b)?;
        let mut o = Orbit::build(ring, b.clone(), r, Poly::one(), vec![Poly::zero(); r])?;
        o.mode = Mode::Full;
        Ok(o)
    }

    fn build(
        ring: &PolyRing,
        order: Poly,
        rank: usize,
        modulus: Poly,
        residue: Vec<Poly>,
    ) -> Result<Orbit> {
        let deg_b = order.degree().expect("checked");
        let free_len = deg_b - modulus.degree().expect("nonzero");
        let block = (ring.q() as u128)
            .checked_pow(free_len as u32)
            .filter(|b| b.checked_pow(rank as u32).is_some())
            .ok_or(Error::OrbitTooLarge {
                size: u128::MAX,
                cap: u128::MAX,
            })?;
        let order_primes = ring.prime_divisors(&order)?;
        Ok(Orbit {
            ring: ring.clone(),
            order,
            rank,
            mode: Mode::Minimal,
            base: None,
            modulus,
            residue,
            free_len,
            block,
            order_primes,
        })
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn order(&self) -> &Poly {
        &self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn base(&self) -> Option<&TorsionPoint> {
        self.base.as_ref()
    }

    /// The `b'` used for enumeration (`1` in full mode).
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn residue(&self) -> &[Poly] {
        &self.residue
    }

    /// `q^{r·(deg b − deg b')}` tuples before the exact-order filter.
    pub fn candidate_count(&self) -> u128 {
        self.block.pow(self.rank as u32)
    }

    /// Numerators of candidate `idx`.
    pub fn candidate(&self, mut idx: u128) -> Vec<Poly> {
        let q = self.ring.q();
        let mut nums = vec![Poly::zero(); self.rank];
        for i in (0..self.rank).rev() {
            let digit = idx % self.block;
            idx /= self.block;
            let free = Poly::from_index(q, self.free_len, digit);
            nums[i] = if self.modulus.is_one() {
                free
            } else {
                self.ring
                    .add(&self.residue[i], &self.ring.mul(&self.modulus, &free))
            };
        }
        nums
    }

    /// `gcd(nums, b) = 1`, tested prime by prime.
    pub fn is_exact_order(&self, nums: &[Poly]) -> bool {
        self.order_primes.iter().all(|c| {
            nums.iter()
                .any(|n| !self.ring.rem(n, c).expect("nonzero").is_zero())
        })
    }

    pub fn contains(&self, x: &TorsionPoint) -> bool {
        x.order() == &self.order
            && x.rank() == self.rank
            && x.nums()
                .iter()
                .zip(&self.residue)
                .all(|(n, a)| self.ring.rem(n, &self.modulus).expect("nonzero") == *a)
            && self.is_exact_order(x.nums())
    }

    pub fn iter(&self) -> OrbitIter {
        self.clone().into_iter()
    }

    /// Elements whose candidate index falls in `range`.
    pub fn iter_range(&self, range: Range<u128>) -> OrbitIter {
        let end = range.end.min(self.candidate_count());
        OrbitIter {
            orbit: self.clone(),
            next: range.start,
            end,
        }
    }

    /// Exact cardinality by streaming enumeration.
    pub fn count(&self) -> u128 {
        self.iter().count() as u128
    }

    /// Collects the orbit when it has at most `cap` candidates.
    pub fn materialize(&self, cap: u128) -> Result<Vec<TorsionPoint>> {
        let size = self.candidate_count();
        if size > cap {
            return Err(Error::OrbitTooLarge { size, cap });
        }
        Ok(self.iter().collect())
    }
}

impl IntoIterator for Orbit {
    type Item = TorsionPoint;
    type IntoIter = OrbitIter;

    fn into_iter(self) -> OrbitIter {
        let end = self.candidate_count();
        OrbitIter {
            orbit: self,
            next: 0,
            end,
        }
    }
}

/// Streaming enumeration of an [`Orbit`].
#[derive(Debug, Clone)]
pub struct OrbitIter {
    orbit: Orbit,
    next: u128,
    end: u128,
}

impl Iterator for OrbitIter {
    type Item = TorsionPoint;

    fn next(&mut self) -> Option<TorsionPoint> {
        while self.next < self.end {
            let nums = self.orbit.candidate(self.next);
            self.next += 1;
            if self.orbit.is_exact_order(&nums) {
                return Some(TorsionPoint::from_parts(nums, self.orbit.order.clone()));
            }
        }
        None
    }
}

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::poly::{Poly, PolyRing};
use crate::torsion::{parse_tuple, GaloisImageModel, Mode};

/// How the sequence of orders `b_1, b_2, …` is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderSpec {
    /// `t, t^2, …, t^max`.
    TPowers(usize),
    /// The lexicographically first monic irreducible of each degree `1..=max`.
    Irreducible(usize),
    /// Polynomials in the prime-field text format, kept in the given order.
    List(Vec<String>),
    /// `count` distinct seeded random monics of each degree `1..=max_deg`.
    Random {
        count: usize,
        max_deg: usize,
        seed: u64,
    },
}

impl FromStr for OrderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<OrderSpec> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed order spec {s:?}"));
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "tpowers" => Ok(OrderSpec::TPowers(num(rest)?)),
            "irred" => Ok(OrderSpec::Irreducible(num(rest)?)),
            "list" => {
                let items: Vec<String> = rest
                    .split(';')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(String::from)
                    .collect();
                if items.is_empty() {
                    return Err(bad());
                }
                Ok(OrderSpec::List(items))
            }
            "random" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [count, max_deg, seed] = parts[..] else {
                    return Err(bad());
                };
                Ok(OrderSpec::Random {
                    count: num(count)?,
                    max_deg: num(max_deg)?,
                    seed: seed.trim().parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::TPowers(n) => write!(f, "tpowers:{n}"),
            OrderSpec::Irreducible(n) => write!(f, "irred:{n}"),
            OrderSpec::List(items) => write!(f, "list:{}", items.join(";")),
            OrderSpec::Random {
                count,
                max_deg,
                seed,
            } => {
                write!(f, "random:{count}:{max_deg}:{seed}")
            }
        }
    }
}

/// Expands an [`OrderSpec`] into monic non-constant orders.
pub fn generate_orders(ring: &PolyRing, spec: &OrderSpec) -> Result<Vec<Poly>> {
    match spec {
        OrderSpec::TPowers(max) => Ok((1..=*max).map(|k| Poly::monomial(FqElem::ONE, k)).collect()),
        OrderSpec::Irreducible(max) => Ok((1..=*max)
            .map(|d| {
                ring.first_irreducible(d)
                    .expect("irreducibles exist in every degree")
            })
            .collect()),
        OrderSpec::List(items) => items
            .iter()
            .map(|s| {
                let b = ring.parse(s)?;
                match b.degree() {
                    None => Err(Error::ZeroPolynomial),
                    Some(0) => Err(Error::ConstantPolynomial(b.to_string())),
                    Some(_) if !b.is_monic() => {
                        Err(Error::Config(format!("order {b} is not monic")))
                    }
                    Some(_) => Ok(b),
                }
            })
            .collect(),
        OrderSpec::Random {
            count,
            max_deg,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let q = ring.q() as u128;
            let mut out = Vec::new();
            for d in 1..=*max_deg {
                let available = q
                    .checked_pow(d as u32)
                    .ok_or_else(|| Error::Config(format!("degree {d} is too large to sample")))?;
                let mut picked = BTreeSet::new();
                if *count as u128 >= available {
                    picked.extend(0..available);
                } else {
                    while picked.len() < *count {
                        picked.insert(rng.gen_range(0..available));
                    }
                }
                out.extend(
                    picked
                        .into_iter()
                        .map(|i| Poly::monic_from_index(ring.field(), d, i)),
                );
            }
            Ok(out)
        }
    }
}

/// `"sum<=N"`: every ball with radii `n_i ≥ 1` and `Σ n_i ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallSpec {
    pub max_sum: usize,
}

impl FromStr for BallSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<BallSpec> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        s.strip_prefix("sum<=")
            .and_then(|n| n.parse().ok())
            .filter(|&n| n >= 1)
            .map(|max_sum| BallSpec { max_sum })
            .ok_or_else(|| Error::Parse(format!("malformed ball spec {s:?}")))
    }
}

impl fmt::Display for BallSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sum<={}", self.max_sum)
    }
}

/// Everything a run depends on. Built from defaults, then `key = value`
/// pairs from a file, then command-line flags, all through [`ExperimentConfig::set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub p: u32,
    pub e: u32,
    pub rank: usize,
    /// `"P=<polys>;m=<int>"`.
    pub model: String,
    /// Overrides a `mode=` field inside `model` when set.
    pub mode: Option<Mode>,
    pub orders: OrderSpec,
    pub balls: BallSpec,
    /// Numerator tuple `"(b_1,…,b_r)"` reduced modulo each order; `(1,0,…,0)`
    /// when unset.
    pub base: Option<String>,
    pub precision: usize,
    pub out: Option<PathBuf>,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: 2,
            e: 1,
            rank: 2,
            model: "P=;m=1".into(),
            mode: None,
            orders: OrderSpec::TPowers(4),
            balls: BallSpec { max_sum: 2 },
            base: None,
            precision: 8,
            out: None,
            workers: 1,
        }
    }
}

/// The recognised keys.
pub const CONFIG_KEYS: [&str; 11] = [
    "p",
    "e",
    "rank",
    "model",
    "mode",
    "orders",
    "balls",
    "base",
    "precision",
    "out",
    "workers",
];

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Config(format!("{key} expects an integer, got {v:?}")))
        };
        match key.trim() {
            "p" => {
                self.p = u32::try_from(int(value)?)
                    .map_err(|_| Error::Config("p is too large".into()))?
            }
            "e" => self.e = int(value)? as u32,
            "rank" => self.rank = int(value)? as usize,
            "model" => self.model = value.to_string(),
            "mode" => self.mode = Some(value.parse()?),
            "orders" => self.orders = value.parse()?,
            "balls" => self.balls = value.parse()?,
            "base" => self.base = Some(value.to_string()),
            "precision" => self.precision = int(value)? as usize,
            "out" => self.out = Some(PathBuf::from(value)),
            "workers" => self.workers = int(value)? as usize,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn from_text(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Every key but `out` with its current value; the output path does not
    /// influence results, so it is left out of the CSV echo.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        vec![
            ("p", self.p.to_string()),
            ("e", self.e.to_string()),
            ("rank", self.rank.to_string()),
            ("model", self.model.clone()),
            (
                "mode",
                self.mode
                    .map(|m| m.to_string())
                    .unwrap_or_else(|| "model".into()),
            ),
            ("orders", self.orders.to_string()),
            ("balls", self.balls.to_string()),
            (
                "base",
                self.base.clone().unwrap_or_else(|| "default".into()),
            ),
            ("precision", self.precision.to_string()),
            ("workers", self.workers.to_string()),
        ]
    }

    pub fn field(&self) -> Result<Fq> {
        Fq::new(self.p, self.e)
    }

    pub fn ring(&self) -> Result<PolyRing> {
        Ok(PolyRing::new(self.field()?))
    }

    /// The model with the `mode` key applied.
    pub fn resolve_model(&self, ring: &PolyRing) -> Result<GaloisImageModel> {
        let model = GaloisImageModel::parse(ring, &self.model)?;
        Ok(match self.mode {
            Some(mode) => model.with_mode(mode),
            None => model,
        })
    }

    /// Base numerators before reduction modulo the order.
    pub fn base_numerators(&self, ring: &PolyRing) -> Result<Vec<Poly>> {
        match &self.base {
            None => {
                let mut v = vec![Poly::zero(); self.rank];
                v[0] = Poly::one();
                Ok(v)
            }
            Some(s) => {
                let nums = parse_tuple(ring, s)?;
                if nums.len() != self.rank {
                    return Err(Error::DimensionMismatch {
                        expected: self.rank,
                        got: nums.len(),
                    });
                }
                Ok(nums)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::RankTooSmall { min: 1, got: 0 });
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        // the deepest ball has every other radius at 1
        let need = (self.balls.max_sum + 1).saturating_sub(self.rank).max(1);
        if self.precision < need {
            return Err(Error::InsufficientPrecision {
                have: self.precision,
                need,
            });
        }
        Ok(())
    }
}

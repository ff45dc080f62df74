//! Triangular fuzzy numbers and the linguistic 1..9 judgment scale.
//!
//! A judgment "item A is *weakly important* over item B" maps to precise
//! score 3 and the fuzzy triple (2, 3, 4). The reverse direction uses the
//! reciprocal triple (1/4, 1/3, 1/2), computed from exact fractions.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("precise score {0} is outside the scale 1..=9")]
    ScoreOutOfRange(i64),
    #[error("invalid triangular fuzzy number ({l}, {m}, {u}): need 0 < l <= m <= u")]
    InvalidTriple { l: f64, m: f64, u: f64 },
    #[error("root degree must be at least 1")]
    ZeroRoot,
}

/// Triangular fuzzy number `(l, m, u)` with `0 < l <= m <= u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Tfn {
    l: f64,
    m: f64,
    u: f64,
}

impl Tfn {
    pub const ONE: Tfn = Tfn {
        l: 1.0,
        m: 1.0,
        u: 1.0,
    };

    pub fn new(l: f64, m: f64, u: f64) -> Result<Self, FuzzyError> {
        let finite = l.is_finite() && m.is_finite() && u.is_finite();
        if !finite || l <= 0.0 || l > m || m > u {
            return Err(FuzzyError::InvalidTriple { l, m, u });
        }
        Ok(Tfn { l, m, u })
    }

    /// Crisp value embedded as a degenerate triple `(x, x, x)`.
    pub fn crisp(x: f64) -> Result<Self, FuzzyError> {
        Tfn::new(x, x, x)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn components(&self) -> [f64; 3] {
        [self.l, self.m, self.u]
    }

    /// `(1/u, 1/m, 1/l)`.
    pub fn reciprocal(&self) -> Tfn {
        Tfn {
            l: 1.0 / self.u,
            m: 1.0 / self.m,
            u: 1.0 / self.l,
        }
    }

    /// Componentwise `n`-th root.
    pub fn nth_root(&self, n: u32) -> Result<Tfn, FuzzyError> {
        if n == 0 {
            return Err(FuzzyError::ZeroRoot);
        }
        let p = 1.0 / f64::from(n);
        Ok(Tfn {
            l: self.l.powf(p),
            m: self.m.powf(p),
            u: self.u.powf(p),
        })
    }

    pub fn defuzzify(&self, method: Defuzz) -> f64 {
        match method {
            Defuzz::Middle => self.m,
            Defuzz::Centroid => (self.l + self.m + self.u) / 3.0,
        }
    }

    /// Componentwise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Tfn, tol: f64) -> bool {
        (self.l - other.l).abs() <= tol
            && (self.m - other.m).abs() <= tol
            && (self.u - other.u).abs() <= tol
    }
}

impl Mul for Tfn {
    type Output = Tfn;

    fn mul(self, rhs: Tfn) -> Tfn {
        Tfn {
            l: self.l * rhs.l,
            m: self.m * rhs.m,
            u: self.u * rhs.u,
        }
    }
}

impl TryFrom<[f64; 3]> for Tfn {
    type Error = FuzzyError;

    fn try_from([l, m, u]: [f64; 3]) -> Result<Self, Self::Error> {
        Tfn::new(l, m, u)
    }
}

impl From<Tfn> for [f64; 3] {
    fn from(t: Tfn) -> Self {
        t.components()
    }
}

impl fmt::Display for Tfn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.m, self.u)
    }
}

/// Defuzzification rule used to collapse a triple to a crisp ratio.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Defuzz {
    /// Modal value `m`.
    #[default]
    Middle,
    /// `(l + m + u) / 3`.
    Centroid,
}

impl Defuzz {
    pub fn as_str(&self) -> &'static str {
        match self {
            Defuzz::Middle => "middle",
            Defuzz::Centroid => "centroid",
        }
    }
}

/// A point on the 1..=9 precise judgment scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct PreciseScore(u8);

impl PreciseScore {
    pub const EQUAL: PreciseScore = PreciseScore(1);

    pub fn new(value: i64) -> Result<Self, FuzzyError> {
        if (1..=9).contains(&value) {
            Ok(PreciseScore(value as u8))
        } else {
            Err(FuzzyError::ScoreOutOfRange(value))
        }
    }

    pub fn value(&self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = PreciseScore> {
        (1..=9).map(PreciseScore)
    }

    pub fn linguistic_term(&self) -> &'static str {
        match self.0 {
            1 => "Equally important",
            3 => "Weakly important",
            5 => "Essentially important",
            7 => "Very strongly important",
            9 => "Absolutely important",
            _ => "Intermediate values",
        }
    }
}

impl TryFrom<i64> for PreciseScore {
    type Error = FuzzyError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        PreciseScore::new(value)
    }
}

impl From<PreciseScore> for i64 {
    fn from(s: PreciseScore) -> Self {
        i64::from(s.0)
    }
}

/// Fuzzy triple for a precise score.
pub fn scale_lookup(score: PreciseScore) -> Tfn {
    let k = f64::from(score.0);
    match score.0 {
        1 => Tfn::ONE,
        9 => Tfn {
            l: 8.0,
            m: 9.0,
            u: 9.0,
        },
        _ => Tfn {
            l: k - 1.0,
            m: k,
            u: k + 1.0,
        },
    }
}

/// A directed judgment: `score` in favour of the row item, or of the column
/// item when `reciprocal` is set. Serialized as a signed integer where a
/// negative sign selects the reciprocal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct SignedScore {
    pub score: PreciseScore,
    pub reciprocal: bool,
}

impl SignedScore {
    pub fn new(value: i64) -> Result<Self, FuzzyError> {
        let score =
            PreciseScore::new(value.abs()).map_err(|_| FuzzyError::ScoreOutOfRange(value))?;
        Ok(SignedScore {
            score,
            reciprocal: value < 0 && score != PreciseScore::EQUAL,
        })
    }

    pub fn value(&self) -> i64 {
        let v = i64::from(self.score.0);
        if self.reciprocal {
            -v
        } else {
            v
        }
    }

    pub fn tfn(&self) -> Tfn {
        let t = scale_lookup(self.score);
        if self.reciprocal {
            t.reciprocal()
        } else {
            t
        }
    }

    /// Crisp ratio under `Middle` defuzzification (`k` or `1/k`).
    pub fn ratio(&self) -> f64 {
        self.tfn().m
    }

    /// Inverse of [`SignedScore::tfn`]: the scale entry equal to `t` within `tol`.
    pub fn from_tfn(t: &Tfn, tol: f64) -> Option<SignedScore> {
        Self::candidates().find(|s| s.tfn().approx_eq(t, tol))
    }

    /// Scale entry whose crisp ratio is closest to `ratio` on a log scale.
    pub fn nearest(ratio: f64) -> SignedScore {
        let target = ratio.ln();
        Self::candidates()
            .min_by(|a, b| {
                let da = (a.ratio().ln() - target).abs();
                let db = (b.ratio().ln() - target).abs();
                da.total_cmp(&db)
            })
            .expect("scale is non-empty")
    }
}

impl SignedScore {
    /// The 17 distinct directed judgments.
    fn candidates() -> impl Iterator<Item = SignedScore> {
        (-9..=9)
            .filter(|v: &i64| *v != 0 && *v != -1)
            .map(|v| SignedScore::new(v).expect("in range"))
    }
}

impl TryFrom<i64> for SignedScore {
    type Error = FuzzyError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        SignedScore::new(value)
    }
}

impl From<SignedScore> for i64 {
    fn from(s: SignedScore) -> Self {
        s.value()
    }
}

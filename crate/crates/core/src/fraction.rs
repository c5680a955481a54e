//! Continued fractions and the fraction invariant of rational tangles.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{DecompositionError, FractionError};
use crate::tangle::{gcd, normalize, Tangle};

/// A reduced fraction `r/s` with `r >= 0`, `gcd(r, |s|) = 1` and the sign
/// carried by `s`, or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fraction {
    Finite { r: i64, s: i64 },
    Infinity,
}

impl Fraction {
    /// Normalizes `p/q`; `q = 0` gives `∞`.
    pub fn new(p: i64, q: i64) -> Self {
        Self::from_pair(p as i128, q as i128).expect("i64 input stays in range")
    }

    pub(crate) fn from_pair(p: i128, q: i128) -> Result<Self, FractionError> {
        let (r, s) = normalize(p, q);
        if s == 0 {
            return Ok(Fraction::Infinity);
        }
        let r = i64::try_from(r).map_err(|_| FractionError::Overflow)?;
        let s = i64::try_from(s).map_err(|_| FractionError::Overflow)?;
        Ok(Fraction::Finite { r, s })
    }

    pub fn integer(n: i64) -> Self {
        Fraction::new(n, 1)
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Fraction::Finite { s: 1 | -1, .. } | Fraction::Finite { r: 0, .. })
    }

    /// Numerator and denominator of the value, with the sign in the numerator.
    pub fn as_ratio(self) -> Option<(i64, i64)> {
        match self {
            Fraction::Finite { r, s } if s < 0 => Some((-r, -s)),
            Fraction::Finite { r, s } => Some((r, s)),
            Fraction::Infinity => None,
        }
    }

    /// Fraction of the mirror image.
    pub fn negate(self) -> Self {
        match self {
            Fraction::Finite { r, s } if r != 0 => Fraction::Finite { r, s: -s },
            f => f,
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_ratio() {
            None => write!(f, "inf"),
            Some((p, 1)) => write!(f, "{p}"),
            Some((p, q)) => write!(f, "{p}/{q}"),
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if matches!(t, "inf" | "∞" | "infinity") {
            return Ok(Fraction::Infinity);
        }
        let bad = || FractionError::Parse(t.to_string());
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim().trim_start_matches('(').trim_end_matches(')')),
            None => (t, "1"),
        };
        let p: i64 = p.parse().map_err(|_| bad())?;
        let q: i64 = q.parse().map_err(|_| bad())?;
        if q == 0 && p == 0 {
            return Err(bad());
        }
        Ok(Fraction::new(p, q))
    }
}

/// A continued fraction `[a0, a1, ..., am]`, or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ContinuedFraction {
    Terms(Vec<i64>),
    Infinity,
}

impl ContinuedFraction {
    pub fn terms(&self) -> Option<&[i64]> {
        match self {
            ContinuedFraction::Terms(t) => Some(t),
            ContinuedFraction::Infinity => None,
        }
    }

    /// All nonzero terms share one sign.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            ContinuedFraction::Infinity => true,
            ContinuedFraction::Terms(t) => !(t.iter().any(|&a| a > 0) && t.iter().any(|&a| a < 0)),
        }
    }

    /// Homogeneous, with neither end term equal to `±1`.
    pub fn is_strictly_homogeneous(&self) -> bool {
        match self {
            ContinuedFraction::Infinity => true,
            ContinuedFraction::Terms(t) => self.is_homogeneous() && t.first().is_none_or(|a| a.abs() != 1) && t.last().is_none_or(|a| a.abs() != 1),
        }
    }

    /// Band weights `b_i = (-1)^i a_i`.
    pub fn band_weights(&self) -> Vec<i64> {
        self.terms()
            .unwrap_or(&[])
            .iter()
            .enumerate()
            .map(|(i, &a)| if i % 2 == 0 { a } else { -a })
            .collect()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuedFraction::Infinity => write!(f, "inf"),
            ContinuedFraction::Terms(t) => {
                let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl FromStr for ContinuedFraction {
    type Err = FractionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if matches!(t, "inf" | "∞" | "[inf]") {
            return Ok(ContinuedFraction::Infinity);
        }
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| FractionError::Parse(t.to_string()))?;
        let terms = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<i64>().map_err(|_| FractionError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if terms.is_empty() {
            return Err(FractionError::InvalidTerms("no terms".into()));
        }
        Ok(ContinuedFraction::Terms(terms))
    }
}

/// Evaluates `a0 + 1/(a1 + 1/(... + 1/am))`.
pub fn eval_cf(cf: &ContinuedFraction) -> Result<Fraction, FractionError> {
    let terms = match cf {
        ContinuedFraction::Infinity => return Ok(Fraction::Infinity),
        ContinuedFraction::Terms(t) if t.is_empty() => return Err(FractionError::InvalidTerms("no terms".into())),
        ContinuedFraction::Terms(t) => t,
    };
    let m = terms.len() - 1;
    let (mut p, mut q) = (terms[m] as i128, 1i128);
    for i in (0..m).rev() {
        if p == 0 {
            return Err(FractionError::DivisionCollapse(i + 1));
        }
        // a_i + q/p
        let np = (terms[i] as i128)
            .checked_mul(p)
            .and_then(|x| x.checked_add(q))
            .ok_or(FractionError::Overflow)?;
        (p, q) = (np, p);
        let g = gcd(p.abs(), q.abs());
        if g > 1 {
            (p, q) = (p / g, q / g);
        }
    }
    Fraction::from_pair(p, q)
}

/// Homogeneous expansion by sign-uniform Euclidean steps: positive terms for
/// positive fractions, negative terms for negative ones.
pub fn expand_homogeneous(f: Fraction) -> Result<ContinuedFraction, FractionError> {
    let (p, q) = f
        .as_ratio()
        .ok_or_else(|| FractionError::InvalidTerms("infinity has no finite expansion".into()))?;
    let sign = if p < 0 { -1 } else { 1 };
    let (mut a, mut b) = (p.abs(), q);
    let mut terms = Vec::new();
    loop {
        terms.push(sign * (a / b));
        let r = a % b;
        if r == 0 {
            break;
        }
        (a, b) = (b, r);
    }
    Ok(ContinuedFraction::Terms(terms))
}

/// Equality of normalized fractions.
pub fn fractions_equal(a: Fraction, b: Fraction) -> bool {
    a == b
}

/// The cardan tangle `T[a0, ..., am]`: the band with weight `b0` is
/// horizontal and each deeper band is turned a quarter relative to the last.
pub fn cardan_to_diagram(cf: &ContinuedFraction) -> Result<Tangle, FractionError> {
    let terms = match cf {
        ContinuedFraction::Infinity => return Ok(Tangle::infinity()),
        ContinuedFraction::Terms(t) => t,
    };
    if terms.is_empty() {
        return Err(FractionError::InvalidTerms("no terms".into()));
    }
    if terms[1..].contains(&0) {
        return Err(FractionError::InvalidTerms("only the first term may be zero".into()));
    }
    let b = cf.band_weights();
    let m = b.len() - 1;
    let mut t = Tangle::horizontal(b[m]);
    for i in (0..m).rev() {
        t = Tangle::horizontal(b[i]).add(&t.rotate());
    }
    Ok(t)
}

/// Fraction of a tangle diagram read from its outer frame.
pub fn tangle_fraction(t: &Tangle) -> Result<Fraction, DecompositionError> {
    let (p, q) = t.fraction()?;
    Fraction::from_pair(p, q).map_err(|e| DecompositionError::NotRational(e.to_string()))
}

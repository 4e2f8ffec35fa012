//! Exact arithmetic substrate: big rationals, folded residues, piecewise-linear
//! functions on `[0,2]`, and rank-2 symmetric bilinear forms `[[a,b],[b,a]]`.
//!
//! Everything here is exact; no floating point is used anywhere. Mod-2
//! congruences between d-invariants and covector minima are meaningless under
//! rounding, so all consumers stay on `Rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;

pub type Rational = BigRational;

/// Builds `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("residue modulus must be at least 2, got {0}")]
    ModulusTooSmall(i64),
    #[error("{0}")]
    Domain(String),
}

/// Least nonnegative residue: the unique `a_n` in `[0, n)` with `a - a_n`
/// divisible by `n`. Rational inputs are permitted; divisibility means the
/// difference is an integer multiple of `n`.
pub fn residue(a: &Rational, n: i64) -> Result<Rational, NumericError> {
    if n < 2 {
        return Err(NumericError::ModulusTooSmall(n));
    }
    let n = int(n);
    let q = (a / &n).floor();
    Ok(a - q * n)
}

/// Folded residue `[a]_n = |(a + (n-1)/2)_n - (n-1)/2|`.
///
/// For even `n` the shift `(n-1)/2` is a half-integer, so the whole
/// computation runs over rationals; the result is an integer whenever the
/// input is. Always lands in `[0, n/2]`.
pub fn bracket(a: &Rational, n: i64) -> Result<Rational, NumericError> {
    let half_shift = rat(n - 1, 2);
    let r = residue(&(a + &half_shift), n)?;
    Ok((r - half_shift).abs())
}

/// Integer convenience wrapper for [`bracket`].
pub fn bracket_int(a: i64, n: i64) -> Result<i64, NumericError> {
    let b = bracket(&int(a), n)?;
    debug_assert!(b.is_integer());
    Ok(int_value(&b))
}

/// Extracts an integer rational as `i64`; panics if it does not fit.
pub fn int_value(r: &Rational) -> i64 {
    assert!(r.is_integer(), "expected integer rational, got {r}");
    let v = r.to_integer();
    i64::try_from(&v).expect("integer rational out of i64 range")
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, NumericError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| NumericError::Domain(format!("bad rational {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| NumericError::Domain(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(NumericError::Domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers), the encoding used
/// by the dataset and the JSON output.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Piecewise-linear functions on [0, 2]
// ---------------------------------------------------------------------------

/// Exact piecewise-linear function on `[0, 2]`, stored as breakpoints with
/// linear interpolation between them. Breakpoints are strictly increasing in
/// `t`, starting at `t = 0` and ending at `t = 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    breakpoints: Vec<(Rational, Rational)>,
}

impl PLFunction {
    /// Builds from breakpoints, validating the domain invariants.
    pub fn new(breakpoints: Vec<(Rational, Rational)>) -> Result<Self, NumericError> {
        if breakpoints.len() < 2 {
            return Err(NumericError::Domain("need at least two breakpoints".into()));
        }
        if breakpoints[0].0 != Rational::zero() {
            return Err(NumericError::Domain(
                "first breakpoint must be t = 0".into(),
            ));
        }
        if breakpoints[breakpoints.len() - 1].0 != int(2) {
            return Err(NumericError::Domain("last breakpoint must be t = 2".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(NumericError::Domain(
                    "breakpoints must strictly increase".into(),
                ));
            }
        }
        Ok(Self { breakpoints }.simplified())
    }

    /// The constant zero function.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![(int(0), int(0)), (int(2), int(0))],
        }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    /// Drops breakpoints interior to a single linear piece.
    fn simplified(self) -> Self {
        let bp = &self.breakpoints;
        let mut out: Vec<(Rational, Rational)> = vec![bp[0].clone()];
        for i in 1..bp.len() - 1 {
            let (ref t0, ref v0) = out[out.len() - 1];
            let (ref t1, ref v1) = bp[i];
            let (ref t2, ref v2) = bp[i + 1];
            // collinear iff (v1-v0)(t2-t1) == (v2-v1)(t1-t0)
            let lhs = (v1 - v0) * (t2 - t1);
            let rhs = (v2 - v1) * (t1 - t0);
            if lhs != rhs {
                out.push(bp[i].clone());
            }
        }
        out.push(bp[bp.len() - 1].clone());
        Self { breakpoints: out }
    }

    /// Evaluates at `t` in `[0, 2]` by linear interpolation.
    pub fn eval(&self, t: &Rational) -> Rational {
        assert!(
            *t >= Rational::zero() && *t <= int(2),
            "t = {t} outside [0, 2]"
        );
        let bp = &self.breakpoints;
        let idx = match bp.iter().position(|(bt, _)| bt >= t) {
            Some(0) => return bp[0].1.clone(),
            Some(i) => i,
            None => unreachable!("domain ends at 2"),
        };
        let (ref t0, ref v0) = bp[idx - 1];
        let (ref t1, ref v1) = bp[idx];
        if t == t1 {
            return v1.clone();
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Exact pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let ts = merge_ts(self, other, false);
        let bp = ts
            .into_iter()
            .map(|t| {
                let v = self.eval(&t) + other.eval(&t);
                (t, v)
            })
            .collect();
        Self { breakpoints: bp }.simplified()
    }

    /// Exact pointwise negation.
    pub fn negate(&self) -> Self {
        Self {
            breakpoints: self
                .breakpoints
                .iter()
                .map(|(t, v)| (t.clone(), -v))
                .collect(),
        }
    }

    /// Exact pointwise maximum; inserts crossing points where the graphs meet
    /// inside a segment.
    pub fn max(&self, other: &Self) -> Self {
        let ts = merge_ts(self, other, true);
        let bp = ts
            .into_iter()
            .map(|t| {
                let v = self.eval(&t).max(other.eval(&t));
                (t, v)
            })
            .collect();
        Self { breakpoints: bp }.simplified()
    }

    /// Exact pointwise minimum.
    pub fn min(&self, other: &Self) -> Self {
        self.negate().max(&other.negate()).negate()
    }

    /// `true` iff `self(t) >= other(t)` on all of `[0, 2]`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.first_violation(other).is_none()
    }

    /// First `t` (in the refined breakpoint set, including crossings) where
    /// `self(t) < other(t)`, with the two values.
    pub fn first_violation(&self, other: &Self) -> Option<(Rational, Rational, Rational)> {
        for t in merge_ts(self, other, true) {
            let a = self.eval(&t);
            let b = other.eval(&t);
            if a < b {
                return Some((t, a, b));
            }
        }
        None
    }

    /// Upper envelope of the lines `v(t) = slope * t + intercept` restricted
    /// to `[0, 1]`, extended to `[1, 2]` by the reflection `f(2 - t) = f(t)`.
    pub fn reflected_envelope(lines: &[(Rational, Rational)]) -> Self {
        assert!(!lines.is_empty());
        let one = int(1);
        // candidate breakpoints: 0, 1, and pairwise crossings inside (0,1)
        let mut ts: Vec<Rational> = vec![int(0), one.clone()];
        for (i, (s1, c1)) in lines.iter().enumerate() {
            for (s2, c2) in lines.iter().skip(i + 1) {
                if s1 != s2 {
                    let t = (c2 - c1) / (s1 - s2);
                    if t > Rational::zero() && t < one {
                        ts.push(t);
                    }
                }
            }
        }
        ts.sort();
        ts.dedup();
        let eval_env = |t: &Rational| -> Rational {
            lines
                .iter()
                .map(|(s, c)| s * t + c)
                .max()
                .expect("nonempty lines")
        };
        let mut bp: Vec<(Rational, Rational)> =
            ts.iter().map(|t| (t.clone(), eval_env(t))).collect();
        // mirror across t = 1
        let left: Vec<(Rational, Rational)> = bp.clone();
        for (t, v) in left.into_iter().rev().skip(1) {
            bp.push((int(2) - t, v));
        }
        Self { breakpoints: bp }.simplified()
    }
}

impl fmt::Display for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .breakpoints
            .iter()
            .map(|(t, v)| format!("({}, {})", format_rational(t), format_rational(v)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Union of breakpoint abscissas; with `crossings`, also every t where the
/// two graphs intersect inside a common segment.
fn merge_ts(f: &PLFunction, g: &PLFunction, crossings: bool) -> Vec<Rational> {
    let mut ts: Vec<Rational> = f
        .breakpoints
        .iter()
        .chain(g.breakpoints.iter())
        .map(|(t, _)| t.clone())
        .collect();
    ts.sort();
    ts.dedup();
    if crossings {
        let mut extra = Vec::new();
        for w in ts.windows(2) {
            let (t0, t1) = (&w[0], &w[1]);
            let (f0, f1) = (f.eval(t0), f.eval(t1));
            let (g0, g1) = (g.eval(t0), g.eval(t1));
            let d0 = &f0 - &g0;
            let d1 = &f1 - &g1;
            if d0.is_positive() && d1.is_negative() || d0.is_negative() && d1.is_positive() {
                // linear difference crosses zero inside (t0, t1)
                let t = t0 + (t1 - t0) * &d0 / (&d0 - &d1);
                extra.push(t);
            }
        }
        ts.extend(extra);
        ts.sort();
        ts.dedup();
    }
    ts
}

// ---------------------------------------------------------------------------
// Rank-2 symmetric forms [[a, b], [b, a]]
// ---------------------------------------------------------------------------

/// Symmetric rank-2 integer bilinear form with equal diagonal entries,
/// `[[a, b], [b, a]]`. The change of basis `e2 -> -e2` identifies `(a, b)`
/// with `(a, -b)`, so representatives keep `b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form2 {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
}

impl Form2 {
    pub fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    /// `det = a^2 - b^2`.
    pub fn det(&self) -> i64 {
        self.a * self.a - self.b * self.b
    }

    /// Eigenvalues are `a + b` and `a - b`.
    pub fn definiteness(&self) -> Definiteness {
        let d = self.det();
        if d > 0 {
            if self.a > 0 {
                Definiteness::Positive
            } else {
                Definiteness::Negative
            }
        } else {
            Definiteness::Indefinite
        }
    }

    /// Smith-type invariants of the cokernel `Z^2 / Q Z^2`: `(d1, d2)` with
    /// `d1 | d2` and `d1 * d2 = |det|`. Cyclic iff `d1 == 1`.
    pub fn group_invariants(&self) -> (i64, i64) {
        let g = num_integer::gcd(self.a, self.b);
        let d = self.det().abs();
        // entries' gcd divides every elementary divisor of the 2x2 matrix
        let d1 = num_integer::gcd(g, d);
        (d1, d / d1)
    }

    /// `true` iff the cokernel is cyclic of order `|det|`.
    pub fn is_cyclic(&self) -> bool {
        self.group_invariants().0 == 1
    }

    /// Negated form, the intersection form of the reversed orientation.
    pub fn negate(&self) -> Self {
        Self {
            a: -self.a,
            b: self.b.abs(),
        }
    }
}

impl fmt::Display for Form2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{a},{b}],[{b},{a}]]", a = self.a, b = self.b)
    }
}

/// One representative per basis-change class of forms `[[a,b],[b,a]]` with
/// `|a^2 - b^2| = d`, the stated parity of `a`, and the stated definiteness.
///
/// Definite forms come from factor pairs `d = d1 * d2` (`d1 <= d2`, equal
/// parity) via `a = ±(d1 + d2)/2`, `b = (d2 - d1)/2`. Indefinite forms solve
/// `b^2 - a^2 = d` and are canonicalized with `a >= 0`; whether `(a, b)` and
/// `(-a, -b)` are distinct classes is not needed here, so one is kept.
pub fn enumerate_forms(d: i64, parity_a: Parity, definiteness: Definiteness) -> Vec<Form2> {
    assert!(d >= 1, "determinant must be positive");
    let mut out = Vec::new();
    for d1 in 1..=d {
        if d % d1 != 0 {
            continue;
        }
        let d2 = d / d1;
        if d1 > d2 || (d1 + d2) % 2 != 0 {
            continue;
        }
        let (half_sum, half_diff) = ((d1 + d2) / 2, (d2 - d1) / 2);
        let (a, b) = match definiteness {
            Definiteness::Positive => (half_sum, half_diff),
            Definiteness::Negative => (-half_sum, half_diff),
            Definiteness::Indefinite => (half_diff, half_sum),
        };
        let want_even = matches!(parity_a, Parity::Even);
        if (a % 2 == 0) == want_even {
            out.push(Form2::new(a, b));
        }
    }
    out.sort();
    out
}

//! Obstructions from classical invariants: the Arf condition on odd linking
//! numbers, the signature-function constraints, pairwise gcd consistency,
//! the genus bound for consecutive opposite twists, and homological bounds
//! from branched covers.

use crate::knot_model::{KnotRecord, Sign, TwistIndex};
use crate::numeric::{int, rat, Rational};
use crate::signature_engine::signature_at;
use std::collections::BTreeSet;

/// Outcome of one obstruction check on one candidate. A check that does not
/// apply passes vacuously; a check that lacks the data it needs reports
/// itself inconclusive rather than obstructing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionResult {
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

impl ObstructionResult {
    pub fn not_applicable(detail: impl Into<String>) -> Self {
        Self {
            applicable: false,
            passed: true,
            detail: detail.into(),
        }
    }

    pub fn passed(detail: impl Into<String>) -> Self {
        Self {
            applicable: true,
            passed: true,
            detail: detail.into(),
        }
    }

    pub fn inconclusive(detail: impl Into<String>) -> Self {
        Self {
            applicable: true,
            passed: true,
            detail: format!("inconclusive: {}", detail.into()),
        }
    }

    pub fn obstructed(detail: impl Into<String>) -> Self {
        Self {
            applicable: true,
            passed: false,
            detail: detail.into(),
        }
    }
}

/// Arf obstruction: a twist of odd linking number `l` forces `l = ±1 mod 8`
/// when Arf is 0 and `l = ±3 mod 8` when Arf is 1, for either sign of twist.
pub fn arf_check(k: &KnotRecord, idx: TwistIndex) -> ObstructionResult {
    if idx.l.is_multiple_of(2) {
        return ObstructionResult::not_applicable("even linking number");
    }
    let r = idx.l % 8;
    let ok = match k.arf {
        0 => r == 1 || r == 7,
        _ => r == 3 || r == 5,
    };
    if ok {
        ObstructionResult::passed(format!(
            "l = {} mod 8 is consistent with arf = {}",
            r, k.arf
        ))
    } else {
        ObstructionResult::obstructed(format!(
            "arf = {} forces l = ±{} mod 8, but l = {}",
            k.arf,
            if k.arf == 0 { 1 } else { 3 },
            idx.l
        ))
    }
}

/// Allowed values of the signature function at `r/l` for a twist of the
/// given sign (calibrated so that the trefoil's indices 2^-, 3^-, 0^+ pass):
/// negative twists allow `{-2r(l-r), -2r(l-r) + 2}`, positive twists the
/// negated pair.
pub fn allowed_sigma(sign: Sign, r: u32, l: u32) -> (i64, i64) {
    let base = 2 * i64::from(r) * i64::from(l - r);
    match sign {
        Sign::Neg => (-base, -base + 2),
        Sign::Pos => (base - 2, base),
    }
}

/// Signature-function obstruction for a twist `l^s`.
///
/// For `l >= 2` every known value at `r/l` must land in [`allowed_sigma`];
/// for `l = 0` the whole signature function must stay in `{-2, 0}` (positive
/// twist) or `{0, 2}` (negative twist). Unknown samples are inconclusive for
/// that `r`, never obstructing. `l = 1` carries no constraint.
pub fn signature_twist_check(k: &KnotRecord, idx: TwistIndex) -> ObstructionResult {
    match idx.l {
        0 => {
            let (lo, hi) = match idx.sign {
                Sign::Pos => (-2i64, 0i64),
                Sign::Neg => (0, 2),
            };
            let mut checked = 0;
            let within = |v: i64| v >= lo && v <= hi;
            if !within(k.signature) {
                return ObstructionResult::obstructed(format!(
                    "sigma(K) = {} is outside [{lo}, {hi}] required for 0{}",
                    k.signature,
                    sign_str(idx.sign)
                ));
            }
            checked += 1;
            for (x, v) in &k.signature_samples {
                if !within(*v) {
                    return ObstructionResult::obstructed(format!(
                        "sigma_{x}(K) = {v} is outside [{lo}, {hi}] required for 0{}",
                        sign_str(idx.sign)
                    ));
                }
                checked += 1;
            }
            if let Some((min, max)) = k.signature_range {
                if min < lo || max > hi {
                    return ObstructionResult::obstructed(format!(
                        "signature range [{min}, {max}] leaves [{lo}, {hi}] required for 0{}",
                        sign_str(idx.sign)
                    ));
                }
                return ObstructionResult::passed(format!(
                    "signature function stays within [{lo}, {hi}]"
                ));
            }
            ObstructionResult::inconclusive(format!(
                "{checked} signature value(s) within [{lo}, {hi}]; full range unknown"
            ))
        }
        1 => ObstructionResult::not_applicable("no interior r for l = 1"),
        l => {
            let mut unknown = Vec::new();
            for r in 1..l {
                let x = rat(i64::from(r), i64::from(l));
                match signature_at(k, &x) {
                    Some(v) => {
                        let (a, b) = allowed_sigma(idx.sign, r, l);
                        if v != a && v != b {
                            return ObstructionResult::obstructed(format!(
                                "sigma_{r}/{l}(K) = {v} is not in {{{a}, {b}}} required for {l}{}",
                                sign_str(idx.sign)
                            ));
                        }
                    }
                    None => unknown.push(r),
                }
            }
            if unknown.is_empty() {
                ObstructionResult::passed(format!("all signature values at r/{l} are consistent"))
            } else if unknown.len() == (l - 1) as usize {
                ObstructionResult::inconclusive(format!("no signature samples at r/{l}"))
            } else {
                ObstructionResult::inconclusive(format!(
                    "consistent where known; no samples at r = {unknown:?}"
                ))
            }
        }
    }
}

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Neg => "-",
        Sign::Pos => "+",
    }
}

/// Pairwise consistency of twist indices with `l >= 2`: any two must have
/// coprime linking numbers, or be `{2^-, 2^+}`, or agree in both linking
/// number and sign.
pub fn gcd_pair_check(indices: &BTreeSet<TwistIndex>) -> bool {
    violating_pairs(indices).is_empty()
}

/// The pairs violating [`gcd_pair_check`]'s trichotomy.
pub fn violating_pairs(indices: &BTreeSet<TwistIndex>) -> Vec<(TwistIndex, TwistIndex)> {
    let items: Vec<_> = indices.iter().filter(|i| i.l >= 2).collect();
    let mut out = Vec::new();
    for (n, a) in items.iter().enumerate() {
        for b in items.iter().skip(n + 1) {
            let g = num_integer::gcd(a.l, b.l);
            let ok = g == 1
                || (a.l == 2 && b.l == 2 && a.sign != b.sign)
                || (a.l == b.l && a.sign == b.sign);
            if !ok {
                out.push((**a, **b));
            }
        }
    }
    out
}

/// Minimum genus forced by `{k^-, (k+1)^+}` both unknotting:
/// `(2k^3 + 3k^2 - 11k + 6) / 6`.
pub fn genus_pair_bound(k: u32) -> u64 {
    assert!(k >= 1);
    let k = i64::from(k);
    let num = 2 * k * k * k + 3 * k * k - 11 * k + 6;
    assert!(num % 6 == 0, "cubic bound must be integral");
    (num / 6) as u64
}

/// Homological obstruction from cyclic branched covers: a twist of linking
/// number divisible by `q` forces `H_1(M_q(K))` to be generated by `q`
/// elements, and a linking-number-zero twist forces the infinite cyclic
/// cover to have cyclic Alexander module (trivial second Alexander ideal).
pub fn branched_rank_check(k: &KnotRecord, idx: TwistIndex, q: u32) -> ObstructionResult {
    if idx.l == 0 {
        if let Some(false) = k.e1_trivial {
            return ObstructionResult::obstructed(
                "second Alexander ideal is nontrivial, so the infinite cyclic cover is not cyclic",
            );
        }
    }
    if q < 2 || !idx.l.is_multiple_of(q) {
        return ObstructionResult::not_applicable(format!("{q} does not divide l = {}", idx.l));
    }
    match k.branched_ranks.get(&q) {
        Some(rank) if *rank > q => ObstructionResult::obstructed(format!(
            "H_1 of the {q}-fold branched cover needs {rank} generators, more than {q}"
        )),
        Some(rank) => ObstructionResult::passed(format!(
            "{q}-fold branched cover homology has rank {rank} <= {q}"
        )),
        None => ObstructionResult::inconclusive(format!("no rank data for q = {q}")),
    }
}

/// Runs [`branched_rank_check`] over every modulus with stored rank data,
/// plus the infinite-cover test for `l = 0`.
pub fn branched_rank_check_all(k: &KnotRecord, idx: TwistIndex) -> ObstructionResult {
    if idx.l == 0 {
        if let Some(false) = k.e1_trivial {
            return ObstructionResult::obstructed(
                "second Alexander ideal is nontrivial, so the infinite cyclic cover is not cyclic",
            );
        }
    }
    let mut applicable = false;
    for q in k.branched_ranks.keys() {
        if *q >= 2 && idx.l.is_multiple_of(*q) {
            let res = branched_rank_check(k, idx, *q);
            if !res.passed {
                return res;
            }
            applicable = true;
        }
    }
    if applicable {
        ObstructionResult::passed("branched cover ranks are small enough")
    } else {
        ObstructionResult::not_applicable("no applicable branched-cover data")
    }
}

/// Convenience: evaluates the signature function of a record at `x`,
/// exposed for report generation.
pub fn sigma_sample(k: &KnotRecord, x: &Rational) -> Option<i64> {
    if *x == rat(1, 2) {
        return Some(k.signature);
    }
    if *x <= int(0) || *x >= int(1) {
        return None;
    }
    signature_at(k, x)
}

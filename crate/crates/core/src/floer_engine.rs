//! V-sequence machinery and the obstructions derived from it: values forced
//! by an unknotting twist, the interval of admissible linking numbers, the
//! partner-knot feasibility system, Upsilon bounds, and the table of
//! admissible indices for alternating (more generally, thin) knots.

use crate::classical_obstructions::ObstructionResult;
use crate::knot_model::TwistIndex;
use crate::numeric::{bracket, int, int_value, rat, PLFunction, Rational};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FloerError {
    #[error("invalid V-sequence: {0}")]
    BadSequence(String),
    #[error("signature must be even, got {0}")]
    OddSignature(i64),
}

/// Nonincreasing sequence of nonnegative integers `V_0, V_1, ...` with steps
/// at most 1, eventually zero. Stored trimmed; indices past the stored prefix
/// are implicitly zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VSequence {
    values: Vec<u64>,
}

impl VSequence {
    /// Validates `V_k >= V_{k+1} >= V_k - 1` and nonnegativity.
    pub fn new(values: &[i64]) -> Result<Self, FloerError> {
        for w in values.windows(2) {
            if w[1] > w[0] || w[1] < w[0] - 1 {
                return Err(FloerError::BadSequence(format!(
                    "step {} -> {} violates monotonicity",
                    w[0], w[1]
                )));
            }
        }
        if let Some(last) = values.last() {
            if *last < 0 {
                return Err(FloerError::BadSequence(format!("negative entry {last}")));
            }
        }
        let mut vals: Vec<u64> = values.iter().map(|v| *v as u64).collect();
        while vals.last() == Some(&0) {
            vals.pop();
        }
        // the implicit zero tail is one more unit step
        if let Some(last) = vals.last() {
            if *last > 1 {
                return Err(FloerError::BadSequence(format!(
                    "sequence ends at {last}, cannot step down to the zero tail"
                )));
            }
        }
        Ok(Self { values: vals })
    }

    /// The all-zero sequence.
    pub fn zero() -> Self {
        Self { values: Vec::new() }
    }

    pub fn get(&self, i: usize) -> u64 {
        self.values.get(i).copied().unwrap_or(0)
    }

    /// First index where the sequence vanishes.
    pub fn nu_plus(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Trimmed nonzero prefix.
    pub fn to_vec(&self) -> Vec<u64> {
        self.values.clone()
    }
}

/// Partially known V-data: pinned values plus bounds `lo <= V_i - V_j <= hi`.
/// With `complete` set, indices outside `known` are zero.
#[derive(Debug, Clone, Default)]
pub struct PartialV {
    pub known: BTreeMap<usize, u64>,
    pub diff_bounds: Vec<(usize, usize, i64, i64)>,
    pub complete: bool,
}

impl PartialV {
    pub fn value(&self, i: usize) -> Option<u64> {
        match self.known.get(&i) {
            Some(v) => Some(*v),
            None if self.complete => Some(0),
            None => None,
        }
    }
}

impl From<&VSequence> for PartialV {
    fn from(v: &VSequence) -> Self {
        let known = (0..v.nu_plus()).map(|i| (i, v.get(i))).collect();
        PartialV {
            known,
            diff_bounds: Vec::new(),
            complete: true,
        }
    }
}

/// V-sequence of a thin knot from its signature:
/// `V_k = max(floor((-sigma + 2(1 - k)) / 4), 0)`, all zero when `sigma >= 0`.
pub fn alternating_v(sigma: i64) -> Result<VSequence, FloerError> {
    if sigma % 2 != 0 {
        return Err(FloerError::OddSignature(sigma));
    }
    if sigma >= 0 {
        return Ok(VSequence::zero());
    }
    let mut vals = Vec::new();
    let mut k = 0i64;
    loop {
        let v = (-sigma + 2 * (1 - k)).div_euclid(4).max(0);
        if v == 0 {
            break;
        }
        vals.push(v);
        k += 1;
    }
    VSequence::new(&vals)
}

/// V-values forced by a negative twist of linking number `l`:
/// for odd `l = 2a+1`, `V_{kl} = (a-k)(a-k+1)/2`; for even `l = 2b+2`,
/// `V_{(k+1/2)l} = (b-k)(b-k+1)/2`.
pub fn required_v(l: u32) -> Vec<(u64, u64)> {
    let l = u64::from(l);
    let mut out = Vec::new();
    if l == 0 {
        return out;
    }
    if l % 2 == 1 {
        let alpha = (l - 1) / 2;
        for k in 0..=alpha {
            let d = alpha - k;
            out.push((k * l, d * (d + 1) / 2));
        }
    } else {
        let beta = (l - 2) / 2;
        for k in 0..=beta {
            let d = beta - k;
            out.push(((2 * k + 1) * l / 2, d * (d + 1) / 2));
        }
    }
    out
}

/// Integers `l` admissible for a negative twist when `nu_lo <= nu+ <= nu_hi`:
/// `(1 + sqrt(1 + 8 nu_lo)) / 2 <= l < (3 + sqrt(9 + 8 nu_hi)) / 2`,
/// decided by the equivalent integer comparisons `l(l-1)/2 >= nu_lo` and
/// `l(l-3) < 2 nu_hi` (the latter vacuous for `l = 1`).
pub fn l_interval(nu_lo: u64, nu_hi: u64) -> Vec<u32> {
    assert!(nu_lo <= nu_hi, "interval bounds out of order");
    let mut out = Vec::new();
    let mut l: u64 = 1;
    loop {
        let above = l * (l - 1) / 2 >= nu_lo;
        let below = l < 2 || (l * l).saturating_sub(3 * l) < 2 * nu_hi || 3 * l > l * l;
        if above && below {
            out.push(l as u32);
        }
        if l >= 2 && !below {
            break;
        }
        l += 1;
    }
    out
}

/// The index pair/value tables of the `l^2 + 1` surgery comparison:
/// `j(i) = [l i + beta]_n` and
/// `s(i) = -1/4 - i/2 - j/2 + i^2/(2n) + j^2/(2n) + n/4`, for `0 <= i <= n/2`
/// with `n = l^2 + 1` and `beta = 0` (`l` even) or `n/2` (`l` odd).
pub fn partner_tables(l: u32) -> (Vec<u64>, Vec<Rational>) {
    let l = i64::from(l);
    let n = l * l + 1;
    let beta = if l % 2 == 0 { rat(0, 1) } else { rat(n, 2) };
    let m = (n / 2) as usize;
    let mut js = Vec::with_capacity(m + 1);
    let mut ss = Vec::with_capacity(m + 1);
    for i in 0..=m as i64 {
        let arg = int(l * i) + &beta;
        let j = bracket(&arg, n).expect("n >= 2");
        let s = rat(-1, 4) - rat(i, 2) - &j / int(2)
            + rat(i * i, 2 * n)
            + &j * &j / int(2 * n)
            + rat(n, 4);
        debug_assert!(j.is_integer());
        js.push(int_value(&j) as u64);
        ss.push(s);
    }
    (js, ss)
}

/// Checks the values forced by `required_v(l)` against (partially) known
/// V-data. Sound: missing values are inconclusive, never obstructing.
pub fn required_v_check(v: &PartialV, l: u32) -> ObstructionResult {
    if l == 0 {
        return ObstructionResult::not_applicable("forced values exist only for l >= 1");
    }
    for (idx, val) in required_v(l) {
        if let Some(actual) = v.value(idx as usize) {
            if actual != val {
                return ObstructionResult::obstructed(format!(
                    "a negative twist of linking number {l} forces V_{idx} = {val}, but V_{idx} = {actual}"
                ));
            }
        }
    }
    ObstructionResult::passed("all forced V-values are consistent")
}

/// Feasibility of the partner-knot system for a negative twist of linking
/// number `l`: the derived values `V_{j(i)}(J') = s(i) - V_i(K)` must be
/// nonnegative integers forming, together with the V-sequence axioms and any
/// extra difference bounds, a feasible system. Infeasibility is decided by
/// negative-cycle detection on the difference-constraint graph.
///
/// `l = 0` reduces to the vanishing of `V_0(K)`.
pub fn partner_v_check(v: &PartialV, l: u32) -> ObstructionResult {
    if l == 0 {
        return match v.value(0) {
            Some(0) => ObstructionResult::passed("V_0(K) = 0"),
            Some(x) => ObstructionResult::obstructed(format!(
                "a twist of linking number 0 forces V_0(K) = 0, but V_0(K) = {x}"
            )),
            None => ObstructionResult::inconclusive("V_0(K) unknown"),
        };
    }
    let (js, ss) = partner_tables(l);
    let m = js.len() - 1;
    // the partner indices must exhaust 0..=m
    debug_assert_eq!(js.iter().copied().collect::<BTreeSet<_>>().len(), m + 1);
    for s in &ss {
        if !s.is_integer() {
            return ObstructionResult::obstructed(format!(
                "non-integral partner value {s} in the l = {l} comparison"
            ));
        }
    }
    let svals: Vec<i64> = ss.iter().map(int_value).collect();

    if v.complete && v.diff_bounds.is_empty() {
        return partner_check_complete(v, l, &js, &svals, m);
    }
    partner_check_partial(v, l, &js, &svals, m)
}

/// Fast path with every `V_i(K)` known: evaluate the partner sequence and
/// check the axioms directly, naming the violated difference when one occurs.
fn partner_check_complete(
    v: &PartialV,
    l: u32,
    js: &[u64],
    ss: &[i64],
    m: usize,
) -> ObstructionResult {
    let mut partner = vec![0i64; m + 1];
    let mut pre = vec![0usize; m + 1];
    for i in 0..=m {
        let vi = v.value(i).expect("complete") as i64;
        let j = js[i] as usize;
        partner[j] = ss[i] - vi;
        pre[j] = i;
    }
    for (j, val) in partner.iter().enumerate() {
        if *val < 0 {
            let i = pre[j];
            return ObstructionResult::obstructed(format!(
                "partner value V_{j}(J') = s({i}) - V_{i}(K) = {val} is negative"
            ));
        }
    }
    for j in 0..m {
        let (i, i2) = (pre[j], pre[j + 1]);
        let diff = partner[j] - partner[j + 1];
        if diff < 0 {
            // V_j(J') >= V_{j+1}(J') <=> V_i(K) - V_{i'}(K) <= s(i) - s(i')
            let bound = ss[i] - ss[i2];
            let actual = v.value(i).unwrap() as i64 - v.value(i2).unwrap() as i64;
            return ObstructionResult::obstructed(format!(
                "V_{i}(K) - V_{i2}(K) = {actual} violates the derived bound <= {bound} \
                 (partner V_{j}(J') < V_{}(J'))",
                j + 1
            ));
        }
        if diff > 1 {
            let bound = ss[i2] - ss[i] + 1;
            let actual = v.value(i2).unwrap() as i64 - v.value(i).unwrap() as i64;
            return ObstructionResult::obstructed(format!(
                "V_{i2}(K) - V_{i}(K) = {actual} violates the derived bound <= {bound} \
                 (partner V_{j}(J') - V_{}(J') > 1)",
                j + 1
            ));
        }
    }
    ObstructionResult::passed(format!("partner V-sequence for l = {l} is realizable"))
}

/// General path: difference-constraint graph over the variables `V_i(K)`,
/// `-V_j(J')` and a zero node, infeasible iff a negative cycle exists.
fn partner_check_partial(
    v: &PartialV,
    l: u32,
    js: &[u64],
    ss: &[i64],
    m: usize,
) -> ObstructionResult {
    let max_known = v.known.keys().copied().max().unwrap_or(0);
    let max_bound = v
        .diff_bounds
        .iter()
        .map(|(i, j, _, _)| *i.max(j))
        .max()
        .unwrap_or(0);
    let top = m.max(max_known).max(max_bound);
    // node ids: 0..=top for V(K), then the -V(J') block, then a zero node
    let yj = |j: usize| top + 1 + j;
    let zero = top + m + 2;
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    let mut add = |u: usize, vv: usize, w: i64| edges.push((u, vv, w));

    // V(K) axioms on 0..=top: 0 <= x_i - x_{i+1} <= 1, x_i >= 0
    for i in 0..top {
        add(i + 1, i, 1); // x_i - x_{i+1} <= 1
        add(i, i + 1, 0); // x_{i+1} - x_i <= 0
    }
    for i in 0..=top {
        add(i, zero, 0); // 0 - x_i <= 0
    }
    // pinned values
    for (i, val) in &v.known {
        add(zero, *i, *val as i64); // x_i - 0 <= val
        add(*i, zero, -(*val as i64)); // 0 - x_i <= -val
    }
    // values forced by the l^2 surgery (indices never exceed m)
    for (idx, val) in required_v(l) {
        add(zero, idx as usize, val as i64);
        add(idx as usize, zero, -(val as i64));
    }
    // extra difference bounds: lo <= x_i - x_j <= hi
    for (i, j, lo, hi) in &v.diff_bounds {
        add(*j, *i, *hi);
        add(*i, *j, -*lo);
    }
    // partner axioms: y_{j+1} - y_j in [0, 1], y_j <= 0
    for j in 0..m {
        add(yj(j), yj(j + 1), 1);
        add(yj(j + 1), yj(j), 0);
    }
    for j in 0..=m {
        add(zero, yj(j), 0);
    }
    // coupling x_i - y_{j(i)} = s(i)
    for i in 0..=m {
        let j = js[i] as usize;
        add(yj(j), i, ss[i]);
        add(i, yj(j), -ss[i]);
    }

    let node_count = zero + 1;
    if has_negative_cycle(node_count, &edges) {
        ObstructionResult::obstructed(format!(
            "the combined V-sequence system for l = {l} is infeasible"
        ))
    } else {
        ObstructionResult::passed(format!(
            "the combined V-sequence system for l = {l} is feasible"
        ))
    }
}

/// Bellman-Ford negative-cycle detection with a virtual zero-distance source.
fn has_negative_cycle(nodes: usize, edges: &[(usize, usize, i64)]) -> bool {
    let mut dist = vec![0i64; nodes];
    for round in 0..=nodes {
        let mut changed = false;
        for (u, v, w) in edges {
            if dist[*u] + w < dist[*v] {
                dist[*v] = dist[*u] + w;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
        if round == nodes {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Upsilon
// ---------------------------------------------------------------------------

/// Upsilon of a staircase (torus or thin) knot from its V-sequence:
/// the upper envelope of the lines `-s t - 2 V_s` on `[0, 1]`, extended to
/// `[1, 2]` by the symmetry `f(2 - t) = f(t)`.
pub fn upsilon_from_v(v: &VSequence, genus: Option<u32>) -> PLFunction {
    let nu = v.nu_plus();
    if let Some(g) = genus {
        debug_assert!(nu as u64 <= u64::from(g).max(1));
    }
    let lines: Vec<(Rational, Rational)> = (0..=nu)
        .map(|s| (int(-(s as i64)), int(-2 * v.get(s) as i64)))
        .collect();
    PLFunction::reflected_envelope(&lines)
}

/// Lower bound forced on Upsilon by a negative twist of linking number `l`:
/// the envelope of `-s t - 2 V_s` over the forced pairs `(s, V_s)`.
pub fn upsilon_lower_bound(l: u32) -> PLFunction {
    let lines: Vec<(Rational, Rational)> = required_v(l)
        .into_iter()
        .map(|(s, val)| (int(-(s as i64)), int(-2 * val as i64)))
        .collect();
    PLFunction::reflected_envelope(&lines)
}

/// Compares a knot's Upsilon against [`upsilon_lower_bound`]; any point
/// where Upsilon drops below the bound obstructs the twist.
pub fn upsilon_check(upsilon: &PLFunction, l: u32) -> ObstructionResult {
    upsilon_check_with_genus(upsilon, l, None)
}

/// As [`upsilon_check`], additionally testing the genus-dependent upper
/// bound when the genus is known exactly.
pub fn upsilon_check_with_genus(
    upsilon: &PLFunction,
    l: u32,
    genus: Option<u32>,
) -> ObstructionResult {
    if l == 0 {
        return ObstructionResult::not_applicable("no Upsilon bound for l = 0");
    }
    let bound = upsilon_lower_bound(l);
    if let Some((t, got, need)) = upsilon.first_violation(&bound) {
        return ObstructionResult::obstructed(format!(
            "Upsilon({t}) = {got} is below the forced bound {need} for l = {l}"
        ));
    }
    if let Some(g) = genus {
        if g >= 1 {
            let upper = upsilon_upper_envelope(&required_v(l), g);
            if let Some((t, need, got)) = upper.first_violation(upsilon) {
                return ObstructionResult::obstructed(format!(
                    "Upsilon({t}) = {got} exceeds the forced upper bound {need} for l = {l}"
                ));
            }
        }
    }
    ObstructionResult::passed(format!("Upsilon respects the l = {l} bounds"))
}

/// Genus-dependent upper bound on Upsilon from value pairs `(s, V_s)`:
/// the pointwise minimum over pairs of
/// `-g t - 2 V_s - 2s + 2g + 2` for `t <= 1 - s/g` and `g t - 2 V_s + 2`
/// beyond, a tent with apex at `t = 1 - s/g`.
pub fn upsilon_upper_envelope(pairs: &[(u64, u64)], genus: u32) -> PLFunction {
    assert!(genus >= 1);
    let g = i64::from(genus);
    let mut out: Option<PLFunction> = None;
    for (s, v) in pairs {
        let (s, v) = (*s as i64, *v as i64);
        let rise = int(-2 * v - 2 * s + 2 * g + 2); // value at t = 0
        let fall_end = int(2 * g - 2 * v + 2); // value of g t - 2 V_s + 2 at t = 2
        let tent = if s >= g {
            PLFunction::new(vec![(int(0), int(-2 * v + 2)), (int(2), fall_end)]).unwrap()
        } else {
            let kink = int(1) - rat(s, g);
            let apex = int(g - s - 2 * v + 2);
            PLFunction::new(vec![(int(0), rise), (kink, apex), (int(2), fall_end)]).unwrap()
        };
        out = Some(match out {
            None => tent,
            Some(acc) => acc.min(&tent),
        });
    }
    out.expect("at least one pair")
}

// ---------------------------------------------------------------------------
// Alternating (thin) knots
// ---------------------------------------------------------------------------

/// Indices an alternating (or thin) knot with the given signature can still
/// admit. Everything outside this set is obstructed.
pub fn alternating_allowed(sigma: i64) -> Result<BTreeSet<TwistIndex>, FloerError> {
    if sigma % 2 != 0 {
        return Err(FloerError::OddSignature(sigma));
    }
    use TwistIndex as I;
    let set: Vec<I> = match sigma {
        0 => vec![
            I::neg(2),
            I::neg(1),
            I::neg(0),
            I::pos(0),
            I::pos(1),
            I::pos(2),
        ],
        2 => vec![I::neg(1), I::neg(0), I::pos(2), I::pos(3)],
        -2 => vec![I::pos(1), I::pos(0), I::neg(2), I::neg(3)],
        4 => vec![I::neg(1), I::pos(3)],
        -4 => vec![I::pos(1), I::neg(3)],
        6 | 8 => vec![I::neg(1), I::pos(4)],
        -6 | -8 => vec![I::pos(1), I::neg(4)],
        s if s > 8 => vec![I::neg(1)],
        _ => vec![I::pos(1)],
    };
    Ok(set.into_iter().collect())
}

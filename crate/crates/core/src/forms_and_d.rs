//! Double-branched-cover obstructions: linking-form comparison, lens-space
//! d-invariants, characteristic covector minimization `m_Q`, and the
//! d-invariant matching test, plus the surgery d-invariant formula.

use crate::classical_obstructions::ObstructionResult;
use crate::floer_engine::VSequence;
use crate::knot_model::{KnotRecord, TwistIndex};
use crate::numeric::{int, rat, Definiteness, Form2, Parity, Rational};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormsError {
    #[error("arguments must be coprime: gcd({0}, {1}) != 1")]
    NotCoprime(i64, i64),
    #[error("index {0} out of range for order {1}")]
    IndexOutOfRange(u64, u64),
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(Form2),
    #[error("form {0} has even determinant; characteristic cosets are incomplete")]
    EvenDeterminant(Form2),
    #[error("spectrum size {0} does not match form order {1}")]
    SizeMismatch(usize, u64),
}

// ---------------------------------------------------------------------------
// Linking forms
// ---------------------------------------------------------------------------

/// Self-linking values of all generators of a cyclic linking form of order
/// `d` whose chosen generator has self-linking `a/d`:
/// `{a i^2 mod d : gcd(i, d) = 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingSet {
    pub order: u64,
    pub selflinks: BTreeSet<u64>,
}

pub fn selflink_set(a: i64, d: u64) -> Result<LinkingSet, FormsError> {
    if num_integer::gcd(a.rem_euclid(d as i64), d as i64) != 1 {
        return Err(FormsError::NotCoprime(a, d as i64));
    }
    let selflinks = (1..d)
        .filter(|i| num_integer::gcd(*i, d) == 1)
        .map(|i| (a * (i * i) as i64).rem_euclid(d as i64) as u64)
        .collect();
    Ok(LinkingSet {
        order: d,
        selflinks,
    })
}

// ---------------------------------------------------------------------------
// Lens space d-invariants
// ---------------------------------------------------------------------------

/// The Ozsvath-Szabo recursion
/// `R(p, q, i) = ((2i + 1 - p - q)^2 - pq) / (4pq) - R(q, p mod q, i mod q)`
/// with `R(1, _, _) = 0`, computing `d(L(p,q), i)`; the spectrum of the
/// reversed orientation `-L(p,q)` is the negation.
pub fn lens_d(p: u64, q: u64, i: u64) -> Result<Rational, FormsError> {
    if p == 0 || num_integer::gcd(p, q) != 1 {
        return Err(FormsError::NotCoprime(p as i64, q as i64));
    }
    if i >= p {
        return Err(FormsError::IndexOutOfRange(i, p));
    }
    Ok(lens_d_raw(p, q, i))
}

fn lens_d_raw(p: u64, q: u64, i: u64) -> Rational {
    if p == 1 {
        return int(0);
    }
    let (pi, qi, ii) = (p as i64, q as i64, i as i64);
    let top = 2 * ii + 1 - pi - qi;
    let head = rat(top * top - pi * qi, 4 * pi * qi);
    head - lens_d_raw(q, p % q, i % q)
}

/// Multiset of d-invariants of a lens space or of surgery on a knot,
/// indexed by the integer Spin^c labels `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSpectrum {
    pub values: Vec<Rational>,
}

impl DSpectrum {
    pub fn order(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn negate(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn sorted(&self) -> Vec<Rational> {
        let mut v = self.values.clone();
        v.sort();
        v
    }
}

/// Full d-spectrum `{d(L(p,q), i) : 0 <= i < p}`.
pub fn lens_spectrum(p: u64, q: u64) -> Result<DSpectrum, FormsError> {
    if p == 0 || num_integer::gcd(p, q) != 1 {
        return Err(FormsError::NotCoprime(p as i64, q as i64));
    }
    Ok(DSpectrum {
        values: (0..p).map(|i| lens_d_raw(p, q, i)).collect(),
    })
}

/// d-invariant of the unique spin structure of `L(p,q)` for odd `p`: the
/// label fixed by the conjugation `i -> p + q - 1 - i`.
pub fn lens_spin_d(p: u64, q: u64) -> Rational {
    assert!(p % 2 == 1, "spin structure is unique only for odd order");
    let inv2 = p.div_ceil(2);
    let i0 = ((p + q - 1) % p) * inv2 % p;
    lens_d_raw(p, q, i0)
}

/// `d(S^3_n(K), i) = ((2i - n)^2 - n) / (4n) - 2 V_i(K)` for `0 <= i <= n/2`.
pub fn surgery_d(v: &VSequence, n: u64, i: u64) -> Result<Rational, FormsError> {
    if 2 * i > n {
        return Err(FormsError::IndexOutOfRange(i, n / 2 + 1));
    }
    let (ni, ii) = (n as i64, i as i64);
    let top = 2 * ii - ni;
    Ok(rat(top * top - ni, 4 * ni) - int(2 * v.get(i as usize) as i64))
}

// ---------------------------------------------------------------------------
// Characteristic covector minimization
// ---------------------------------------------------------------------------

/// Per-coset minimum of `(xi^T Q^{-1} xi - 2) / 4` over characteristic
/// covectors of a positive-definite form `Q = [[a,b],[b,a]]`, the upper
/// bound for d-invariants of any manifold the form fills in.
///
/// Cosets of `Z^2 / Q Z^2` are labeled canonically so that the vectors
/// `(0, i)` receive label `(0, i)`; for cyclic quotients the second entry
/// is the usual `g_i` index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovectorMinima {
    pub form: Form2,
    pub values: BTreeMap<(u64, u64), Rational>,
}

impl CovectorMinima {
    /// Minimum for the coset containing the integer vector `(x, y)`.
    pub fn at_vector(&self, x: i64, y: i64) -> &Rational {
        let label = coset_label(&self.form, x, y);
        &self.values[&label]
    }

    /// Minimum over the coset of the zero vector; when the diagonal is even
    /// this coset is characteristic and maps to the spin structure.
    pub fn spin(&self) -> &Rational {
        &self.values[&(0, 0)]
    }

    pub fn multiset(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.values.values().cloned().collect();
        v.sort();
        v
    }
}

/// Canonical coset label of `(x, y)` in `Z^2 / Q Z^2`, reducing against the
/// Hermite basis `(g, t), (0, D/g)` of the column lattice, where
/// `g = gcd(a, b)`.
fn coset_label(q: &Form2, x: i64, y: i64) -> (u64, u64) {
    let d = q.det().abs();
    let g = num_integer::gcd(q.a, q.b);
    let egcd = num_integer::Integer::extended_gcd(&q.a, &q.b);
    let (alpha, beta) = (egcd.x, egcd.y);
    let t = alpha * q.b + beta * q.a;
    let r = x.rem_euclid(g);
    let k = (x - r) / g;
    let y1 = y - k * t;
    let second = d / g;
    (r as u64, y1.rem_euclid(second) as u64)
}

/// Computes [`CovectorMinima`] over the standard box
/// `-Q_ii <= xi_i <= Q_ii - 2`; `widen` extends the box by `2 * widen` on
/// each side (the minima must not change, which the tests verify).
pub fn m_q_widened(form: &Form2, widen: u32) -> Result<CovectorMinima, FormsError> {
    if form.definiteness() != Definiteness::Positive {
        return Err(FormsError::NotPositiveDefinite(*form));
    }
    if form.det() % 2 == 0 {
        // doubling is invertible only in odd order, and only then does every
        // coset contain characteristic covectors
        return Err(FormsError::EvenDeterminant(*form));
    }
    let a = form.a;
    let b = form.b;
    let d = form.det();
    let w = 2 * i64::from(widen);
    let lo = -a - w;
    let hi = a - 2 + w;
    let mut values: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
    let mut xi1 = lo;
    while xi1 <= hi {
        let mut xi2 = lo;
        while xi2 <= hi {
            // xi^T Q^{-1} xi = (a xi1^2 - 2 b xi1 xi2 + a xi2^2) / det
            let quad = rat(a * (xi1 * xi1 + xi2 * xi2) - 2 * b * xi1 * xi2, d);
            let m = (quad - int(2)) / int(4);
            let label = coset_label(form, xi1, xi2);
            match values.get(&label) {
                Some(cur) if *cur <= m => {}
                _ => {
                    values.insert(label, m);
                }
            }
            xi2 += 2;
        }
        xi1 += 2;
    }
    assert_eq!(
        values.len() as i64,
        d,
        "covector box must represent every coset of {form}"
    );
    Ok(CovectorMinima {
        form: *form,
        values,
    })
}

/// [`m_q_widened`] with the standard box.
pub fn m_q(form: &Form2) -> Result<CovectorMinima, FormsError> {
    m_q_widened(form, 0)
}

// ---------------------------------------------------------------------------
// d-invariant matching
// ---------------------------------------------------------------------------

fn congruent_mod_2z(a: &Rational, b: &Rational) -> bool {
    let diff = a - b;
    diff.is_integer() && diff.to_integer() % 2 == 0.into()
}

/// Matches a d-spectrum against per-coset covector minima without choosing
/// the group isomorphism: every coset needs a spectrum value congruent mod 2
/// and at most the minimum (tier 1), and a perfect matching of cosets to
/// spectrum values under that relation must exist (tier 2). Both conditions
/// are necessary, so failure soundly obstructs.
pub fn d_match_check(
    spectrum: &DSpectrum,
    mq: &CovectorMinima,
) -> Result<ObstructionResult, FormsError> {
    let order = mq.form.det().unsigned_abs();
    if spectrum.order() != order {
        return Err(FormsError::SizeMismatch(spectrum.values.len(), order));
    }
    let labels: Vec<&(u64, u64)> = mq.values.keys().collect();
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(labels.len());
    for label in &labels {
        let m = &mq.values[*label];
        let compatible: Vec<usize> = spectrum
            .values
            .iter()
            .enumerate()
            .filter(|(_, d)| congruent_mod_2z(d, m) && *d <= m)
            .map(|(i, _)| i)
            .collect();
        if compatible.is_empty() {
            let congruent: Vec<String> = spectrum
                .values
                .iter()
                .filter(|d| congruent_mod_2z(d, m))
                .map(|d| d.to_string())
                .collect();
            let name = coset_name(label);
            return Ok(ObstructionResult::obstructed(format!(
                "for form {} the candidate set at {name} is empty: m_Q({name}) = {m}, \
                 and the spectrum values congruent mod 2 are [{}], all larger",
                mq.form,
                congruent.join(", ")
            )));
        }
        adj.push(compatible);
    }
    // Kuhn's augmenting paths for a perfect matching
    let n = labels.len();
    let mut matched: Vec<Option<usize>> = vec![None; spectrum.values.len()];
    for coset in 0..n {
        let mut seen = vec![false; spectrum.values.len()];
        if !augment(coset, &adj, &mut matched, &mut seen) {
            return Ok(ObstructionResult::obstructed(format!(
                "for form {} no assignment of spectrum values to cosets satisfies \
                 the bound and congruence at once",
                mq.form
            )));
        }
    }
    Ok(ObstructionResult::passed(format!(
        "spectrum is compatible with m_Q of {}",
        mq.form
    )))
}

fn coset_name(label: &(u64, u64)) -> String {
    if label.0 == 0 {
        format!("g_{}", label.1)
    } else {
        format!("g_({},{})", label.0, label.1)
    }
}

fn augment(
    coset: usize,
    adj: &[Vec<usize>],
    matched: &mut Vec<Option<usize>>,
    seen: &mut Vec<bool>,
) -> bool {
    for &v in &adj[coset] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if matched[v].is_none() || augment(matched[v].unwrap(), adj, matched, seen) {
            matched[v] = Some(coset);
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Twist-specific setup and the two branched-cover checks
// ---------------------------------------------------------------------------

/// What an even twist `l = 2k` of sign `s` forces on the double branched
/// cover: the bounding form's signature `sigma(K) + 2s(1 - k^2)` picks
/// negative definite, indefinite, or positive definite, and `a = k + 1 mod 2`
/// fixes the diagonal parity.
pub enum BranchedSetup {
    NotApplicable(String),
    /// The forced signature cannot be realized by a rank-2 form at all.
    SignatureImpossible(String),
    Indefinite,
    Definite {
        /// Positive-definite candidate intersection forms.
        forms: Vec<Form2>,
        /// The cover bounding them: `L(p, q)`, oriented accordingly.
        lens: Option<(u64, u64)>,
        /// d-invariant of that cover's spin structure, when known.
        spin_d: Option<Rational>,
    },
}

pub fn branched_setup(k: &KnotRecord, idx: TwistIndex) -> BranchedSetup {
    if !idx.l.is_multiple_of(2) {
        return BranchedSetup::NotApplicable("odd linking number".into());
    }
    let half = i64::from(idx.l / 2);
    let s = idx.sign.value();
    let sigma_n = k.signature + 2 * s * (1 - half * half);
    if sigma_n.abs() > 2 {
        return BranchedSetup::SignatureImpossible(format!(
            "the bounding form would need signature {sigma_n}, impossible at rank 2"
        ));
    }
    if sigma_n == 0 {
        return BranchedSetup::Indefinite;
    }
    let parity = if half % 2 == 0 {
        Parity::Odd
    } else {
        Parity::Even
    };
    let forms =
        crate::numeric::enumerate_forms(k.determinant as i64, parity, Definiteness::Positive);
    // sigma_n = +2: M_2(K) itself bounds the positive-definite side;
    // sigma_n = -2: pass to the mirror, M_2(-K) = L(p, p - q).
    let lens = k
        .two_bridge
        .map(|(p, q)| if sigma_n > 0 { (p, q) } else { (p, p - q) });
    let spin_d = crate::knot_model::spin_d(k).map(|d| if sigma_n > 0 { d } else { -d });
    BranchedSetup::Definite {
        forms,
        lens,
        spin_d,
    }
}

/// Linking-form obstruction: some candidate form's generator self-linking
/// set must reproduce the cover's. Applies to even twists forcing a definite
/// form on a knot with known (lens) double cover.
pub fn linking_form_check(k: &KnotRecord, idx: TwistIndex) -> ObstructionResult {
    match branched_setup(k, idx) {
        BranchedSetup::NotApplicable(why) => ObstructionResult::not_applicable(why),
        BranchedSetup::SignatureImpossible(why) => ObstructionResult::obstructed(why),
        BranchedSetup::Indefinite => {
            ObstructionResult::not_applicable("bounding form is indefinite")
        }
        BranchedSetup::Definite { forms, lens, .. } => {
            if forms.is_empty() {
                return ObstructionResult::obstructed(format!(
                    "no rank-2 form with determinant {} and the required parity exists",
                    k.determinant
                ));
            }
            let Some((p, q)) = lens else {
                return ObstructionResult::inconclusive("no double-cover description");
            };
            let cover = selflink_set(q as i64, p).expect("reduced fraction");
            for form in &forms {
                if !form.is_cyclic() {
                    continue; // cannot present a cyclic group
                }
                let candidate = selflink_set(form.a, p).expect("cyclic form");
                if candidate.selflinks == cover.selflinks {
                    return ObstructionResult::passed(format!(
                        "form {form} reproduces the linking form of L({p},{q})"
                    ));
                }
            }
            let sets: Vec<String> = forms
                .iter()
                .filter(|f| f.is_cyclic())
                .map(|f| {
                    let s = selflink_set(f.a, p).expect("cyclic form");
                    format!("{f} -> {:?}", s.selflinks)
                })
                .collect();
            ObstructionResult::obstructed(format!(
                "no candidate form matches the self-linking set {:?} of L({p},{q}); \
                 candidates: {}",
                cover.selflinks,
                sets.join("; ")
            ))
        }
    }
}

/// d-invariant obstruction: some candidate form's covector minima must
/// dominate the cover's d-spectrum coset-by-coset (full matching when the
/// cover is a lens space, spin-structure comparison when only the spin
/// d-invariant is known).
pub fn d_invariant_check(k: &KnotRecord, idx: TwistIndex) -> ObstructionResult {
    match branched_setup(k, idx) {
        BranchedSetup::NotApplicable(why) => ObstructionResult::not_applicable(why),
        BranchedSetup::SignatureImpossible(why) => ObstructionResult::obstructed(why),
        BranchedSetup::Indefinite => {
            ObstructionResult::not_applicable("bounding form is indefinite")
        }
        BranchedSetup::Definite {
            forms,
            lens,
            spin_d,
        } => {
            if forms.is_empty() {
                return ObstructionResult::obstructed(format!(
                    "no rank-2 form with determinant {} and the required parity exists",
                    k.determinant
                ));
            }
            if let Some((p, q)) = lens {
                let spectrum = lens_spectrum(p, q).expect("reduced fraction");
                let mut failures = Vec::new();
                for form in &forms {
                    if !form.is_cyclic() {
                        failures.push(format!("{form} presents a non-cyclic group"));
                        continue;
                    }
                    let mq = m_q(form).expect("positive definite");
                    match d_match_check(&spectrum, &mq).expect("sizes agree") {
                        r if r.passed => return r,
                        r => failures.push(r.detail),
                    }
                }
                return ObstructionResult::obstructed(format!(
                    "every candidate form fails against the d-invariants of L({p},{q}): {}",
                    failures.join("; ")
                ));
            }
            if let Some(d_spin) = spin_d {
                let mut testable = false;
                for form in &forms {
                    if form.a % 2 != 0 {
                        continue; // zero coset not characteristic; no spin pin
                    }
                    testable = true;
                    let mq = m_q(form).expect("positive definite");
                    let m = mq.spin();
                    if congruent_mod_2z(m, &d_spin) && d_spin <= *m {
                        return ObstructionResult::passed(format!(
                            "spin d-invariant {d_spin} is dominated by m_Q = {m} of {form}"
                        ));
                    }
                }
                if testable {
                    return ObstructionResult::obstructed(format!(
                        "spin d-invariant {d_spin} of the cover exceeds (or is incongruent to) \
                         every candidate form's spin covector minimum"
                    ));
                }
            }
            ObstructionResult::inconclusive("no d-invariant data for the double cover")
        }
    }
}

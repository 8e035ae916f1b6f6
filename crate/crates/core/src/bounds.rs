//! Threshold and degree bounds for r-colorability, evaluated in log-space,
//! and the feasibility checks of the random recoloring argument: the
//! parameter conditions, the four-summand sufficient condition, the full
//! dependency sum `W`, and the symmetric Local Lemma criterion.
//!
//! Threshold bounds are values of `p` and include the `n / C(n, k)` factor.
//! Degree bounds are bounds on the minimum maximum vertex degree of a
//! non-r-colorable k-uniform hypergraph.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{ln_choose, ln_factorial};
use crate::logspace::LogValue;

/// Default for the unnamed constant `c` in the `c r^(k-1)/k^2` bounds.
pub const DEFAULT_C: f64 = 1.0;
/// Default slack `ε` for the `(1 ± ε)` bounds.
pub const DEFAULT_EPS: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("unknown bound id {0:?}")]
    UnknownBound(String),
    #[error("bound {bound} requires input {input}")]
    MissingInput { bound: &'static str, input: &'static str },
    #[error("{0}")]
    Domain(String),
}

fn domain(msg: impl Into<String>) -> BoundsError {
    BoundsError::Domain(msg.into())
}

/// `⌊√(ln k / ln(α ln k))⌋`; requires `α ln k > 1`.
pub fn t_param(k: f64, alpha: f64) -> Result<u64, BoundsError> {
    let inner = alpha * k.ln();
    if !(inner > 1.0) {
        return Err(domain(format!("alpha * ln k must exceed 1 (alpha = {alpha}, k = {k})")));
    }
    Ok((k.ln() / inner.ln()).sqrt().floor() as u64)
}

/// `φ(k) = 4 / ⌊√(ln k / ln(2 ln k))⌋`.
pub fn phi(k: f64) -> Result<f64, BoundsError> {
    match t_param(k, 2.0)? {
        0 => Err(domain(format!("phi undefined at k = {k}"))),
        t => Ok(4.0 / t as f64),
    }
}

/// Largest admissible ω for the class with few 3-cycles:
/// `⌊√(ln k / ln ln k)⌋`, clamped to at least 1 where `ln ln k <= 0`.
pub fn omega_max(k: f64) -> u64 {
    let lnln = k.ln().ln();
    if !(lnln > 0.0) {
        return 1;
    }
    ((k.ln() / lnln).sqrt().floor() as u64).max(1)
}

// ---------------------------------------------------------------------------
// Bound identifiers and inputs
// ---------------------------------------------------------------------------

macro_rules! bound_ids {
    ($($variant:ident => $name:literal, $kind:ident;)*) => {
        /// Every named bound the crate can evaluate.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
        pub enum BoundId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl BoundId {
            pub const ALL: &'static [BoundId] = &[$(BoundId::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(BoundId::$variant => $name,)* }
            }

            pub fn kind(self) -> BoundKind {
                match self { $(BoundId::$variant => BoundKind::$kind,)* }
            }
        }
    };
}

bound_ids! {
    Lemma1 => "lemma1", Threshold;
    Lemma2 => "lemma2", Threshold;
    Akkt => "akkt", Threshold;
    AlonSpencerLower => "alon_spencer_lower", Threshold;
    AlonSpencerUpper => "alon_spencer_upper", Threshold;
    Akkt2Color => "akkt_2color", Threshold;
    AchMoore => "ach_moore", Threshold;
    Lemma3 => "lemma3", Threshold;
    Cor1Part1 => "cor1_1", Threshold;
    Cor1Part2 => "cor1_2", Threshold;
    Thm2 => "thm2", Threshold;
    Lemma4 => "lemma4", Threshold;
    CorKrivVu => "cor_krivvu", Threshold;
    ListThm1 => "list_thm1", Threshold;
    ListThm2 => "list_thm2", Threshold;
    ErdLovLower => "erdlov_lower", Degree;
    ErdLovUpper => "erdlov_upper", Degree;
    KostRodl => "kost_rodl", Degree;
    RadhSrin => "radh_srin", Degree;
    Shabanov => "shabanov", Degree;
    Kkr => "kkr", Degree;
    Thm3 => "thm3", Degree;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// A value of the edge probability `p`.
    Threshold,
    /// A value of the maximum vertex degree.
    Degree,
}

impl FromStr for BoundId {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundId::ALL
            .iter()
            .copied()
            .find(|b| b.name() == s)
            .ok_or_else(|| BoundsError::UnknownBound(s.to_string()))
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters a bound may consume. Which ones are required depends on the
/// bound; see [`BoundReport::evaluate`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Value of `Δ(k, r)` substituted into the degree-to-threshold lemma.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Edge probability to test against a threshold bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

/// An evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub kind: BoundKind,
    pub inputs: BoundInputs,
    pub value: LogValue,
    /// For threshold bounds with `p` supplied: whether `p <= value`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
}

impl BoundReport {
    /// Evaluates `id`, rejecting missing inputs. `eps` and `c` fall back to
    /// [`DEFAULT_EPS`] and [`DEFAULT_C`].
    pub fn evaluate(id: BoundId, inputs: &BoundInputs) -> Result<Self, BoundsError> {
        let name = id.name();
        let need = |v: Option<u64>, input: &'static str| v.ok_or(BoundsError::MissingInput { bound: name, input });
        let k = need(inputs.k, "k")?;
        let value = match id.kind() {
            BoundKind::Threshold => {
                let n = need(inputs.n, "n")?;
                let r = match id {
                    BoundId::AlonSpencerLower | BoundId::AlonSpencerUpper | BoundId::Akkt2Color | BoundId::AchMoore => {
                        inputs.r.unwrap_or(2)
                    }
                    _ => need(inputs.r, "r")?,
                };
                let mut params = ThresholdParams::new(n, k, r);
                params.eps = inputs.eps.unwrap_or(DEFAULT_EPS);
                params.c = inputs.c.unwrap_or(DEFAULT_C);
                if id == BoundId::Lemma3 {
                    let delta = inputs.delta.ok_or(BoundsError::MissingInput { bound: name, input: "delta" })?;
                    params.delta = Some(LogValue::try_from_value(delta).ok_or_else(|| domain("delta must be >= 0"))?);
                }
                evaluate_threshold_bound(id, &params)?
            }
            BoundKind::Degree => evaluate_degree_bound(id, k, need(inputs.r, "r")?)?,
        };
        let satisfied = match (id.kind(), inputs.p) {
            (BoundKind::Threshold, Some(p)) => Some(p.ln() <= value.ln()),
            _ => None,
        };
        Ok(BoundReport { bound_id: id, kind: id.kind(), inputs: inputs.clone(), value, satisfied })
    }
}

/// Arguments of [`evaluate_threshold_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub eps: f64,
    pub c: f64,
    pub delta: Option<LogValue>,
}

impl ThresholdParams {
    pub fn new(n: u64, k: u64, r: u64) -> Self {
        ThresholdParams { n, k, r, eps: DEFAULT_EPS, c: DEFAULT_C, delta: None }
    }
}

/// `ln(n / C(n, k))`.
pub fn ln_density_factor(n: u64, k: u64) -> f64 {
    (n as f64).ln() - ln_choose(n as f64, k as f64)
}

fn log2_floor(r: u64) -> f64 {
    (63 - r.leading_zeros()) as f64
}

/// Exponent `⌊log₂ r⌋ / (⌊log₂ r⌋ + 1)` of the `k / ln k` factor.
fn kkr_exponent(r: u64) -> f64 {
    let l = log2_floor(r);
    l / (l + 1.0)
}

/// Threshold bound `id` as a value of `p`, in log-space.
pub fn evaluate_threshold_bound(id: BoundId, params: &ThresholdParams) -> Result<LogValue, BoundsError> {
    let ThresholdParams { n, k, r, eps, c, delta } = *params;
    if id.kind() != BoundKind::Threshold {
        return Err(domain(format!("{id} is a degree bound")));
    }
    if n < k {
        return Err(domain(format!("n = {n} must be at least k = {k}")));
    }
    let min_k = if id == BoundId::Lemma3 { 2 } else { 3 };
    if k < min_k {
        return Err(domain(format!("{id} requires k >= {min_k}, got {k}")));
    }
    let two_color_only = matches!(
        id,
        BoundId::AlonSpencerLower | BoundId::AlonSpencerUpper | BoundId::Akkt2Color | BoundId::AchMoore
    );
    if two_color_only && r != 2 {
        return Err(domain(format!("{id} is a 2-coloring bound; r must be 2, got {r}")));
    }
    let min_r = if matches!(id, BoundId::Cor1Part1 | BoundId::ListThm1) { 3 } else { 2 };
    if r < min_r {
        return Err(domain(format!("{id} requires r >= {min_r}, got {r}")));
    }
    let needs_c = matches!(id, BoundId::Lemma1 | BoundId::Lemma4 | BoundId::AlonSpencerLower);
    if needs_c && !(c > 0.0) {
        return Err(domain(format!("constant c must be positive, got {c}")));
    }
    let minus_eps = matches!(id, BoundId::AchMoore | BoundId::CorKrivVu);
    let plus_eps = matches!(id, BoundId::Lemma2 | BoundId::AlonSpencerUpper);
    if (minus_eps && !(0.0..1.0).contains(&eps)) || (plus_eps && !(eps >= 0.0)) {
        return Err(domain(format!("eps = {eps} outside the admissible range for {id}")));
    }

    let (kf, rf) = (k as f64, r as f64);
    let (ln_k, ln_r) = (kf.ln(), rf.ln());
    let base = ln_density_factor(n, k);
    let r_pow = (kf - 1.0) * ln_r;
    let ln = match id {
        BoundId::Lemma1 | BoundId::Lemma4 | BoundId::AlonSpencerLower => c.ln() + r_pow - 2.0 * ln_k,
        BoundId::Lemma2 | BoundId::AlonSpencerUpper => eps.ln_1p() + r_pow + ln_r.ln(),
        BoundId::AchMoore => (-eps).ln_1p() + r_pow + ln_r.ln(),
        BoundId::Akkt => {
            let constant = ln_r + ln_factorial(r + 1) - 2.0 * (rf + 1.0) * (rf + 1.0).ln();
            constant + r_pow - ln_k
        }
        BoundId::Akkt2Color => -(25f64.ln()) + r_pow - ln_k,
        BoundId::Lemma3 => {
            let delta = delta.ok_or(BoundsError::MissingInput { bound: "lemma3", input: "delta" })?;
            if delta.is_zero() {
                return Ok(LogValue::ZERO);
            }
            -std::f64::consts::LN_2 + delta.ln() - ln_k
        }
        BoundId::Cor1Part1 | BoundId::ListThm1 => (3.0f64 / 32.0).ln() + r_pow - 1.5 * ln_k,
        BoundId::Cor1Part2 => {
            (3.0f64 / 16.0).ln() - 4.0 * rf * rf + kkr_exponent(r) * (ln_k - ln_k.ln()) + kf * ln_r - 2.0 * ln_k
        }
        BoundId::Thm2 | BoundId::ListThm2 => -std::f64::consts::LN_2 + r_pow - (1.0 + phi(kf)?) * ln_k,
        BoundId::CorKrivVu => (-eps).ln_1p() + r_pow + ln_r.ln() - ln_k,
        _ => unreachable!("degree bounds rejected above"),
    };
    Ok(LogValue::from_ln(ln + base))
}

/// Degree bound `id` on `Δ(k, r)` (or on the 2-simple class), in log-space.
pub fn evaluate_degree_bound(id: BoundId, k: u64, r: u64) -> Result<LogValue, BoundsError> {
    if id.kind() != BoundKind::Degree {
        return Err(domain(format!("{id} is a threshold bound")));
    }
    let min_k = match id {
        BoundId::ErdLovLower | BoundId::ErdLovUpper | BoundId::KostRodl | BoundId::RadhSrin => 2,
        _ => 3,
    };
    if k < min_k {
        return Err(domain(format!("{id} requires k >= {min_k}, got {k}")));
    }
    match id {
        BoundId::RadhSrin if r != 2 => return Err(domain(format!("radh_srin is a 2-coloring bound; got r = {r}"))),
        BoundId::Shabanov if r < 3 => return Err(domain(format!("shabanov requires r >= 3, got {r}"))),
        _ if r < 2 => return Err(domain(format!("{id} requires r >= 2, got {r}"))),
        _ => {}
    }
    let (kf, rf) = (k as f64, r as f64);
    let (ln_k, ln_r) = (kf.ln(), rf.ln());
    let ln = match id {
        BoundId::ErdLovLower => (kf - 1.0) * ln_r - 4f64.ln() - ln_k,
        BoundId::ErdLovUpper => 20f64.ln() + 2.0 * ln_k + (kf + 1.0) * ln_r,
        BoundId::KostRodl => {
            let raw = ln_k + (kf - 1.0) * ln_r + ln_r.ln();
            // the ceiling only matters while the value is a modest integer
            if raw < 36.0 {
                raw.exp().ceil().ln()
            } else {
                raw
            }
        }
        BoundId::RadhSrin => 0.17f64.ln() + kf * ln_r - 0.5 * (ln_k + ln_k.ln()),
        BoundId::Shabanov => -(8f64.ln()) - 0.5 * ln_k + (kf - 1.0) * ln_r,
        BoundId::Kkr => -4.0 * rf * rf + kkr_exponent(r) * (ln_k - ln_k.ln()) + kf * ln_r - ln_k,
        BoundId::Thm3 => (kf - 1.0) * ln_r - phi(kf)? * ln_k,
        _ => unreachable!("threshold bounds rejected above"),
    };
    Ok(LogValue::from_ln(ln))
}

/// Largest admissible edge degree `r^(k-1) k^(1 - b/t) - 1`, clamped at 0.
pub fn d_max(k: u64, r: u64, t: u64, b: f64) -> Result<LogValue, BoundsError> {
    if t == 0 {
        return Err(domain("t must be positive"));
    }
    let (kf, rf) = (k as f64, r as f64);
    let main = LogValue::from_ln((kf - 1.0) * rf.ln() + (1.0 - b / t as f64) * kf.ln());
    Ok(main.saturating_sub(LogValue::ONE))
}

// ---------------------------------------------------------------------------
// Feasibility of the recoloring argument
// ---------------------------------------------------------------------------

/// The four summands of the sufficient condition and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition3 {
    pub k: u64,
    pub omega: u64,
    pub alpha: f64,
    pub b: f64,
    pub t: u64,
    pub q: f64,
    /// `None` where a summand is undefined (the fourth needs `t >= 2`).
    pub summands: [Option<LogValue>; 4],
    pub total: Option<LogValue>,
    /// `total < 1/4`, false when any summand is undefined.
    pub holds: bool,
}

impl Condition3 {
    /// 1-based index of the largest defined summand.
    pub fn dominant(&self) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, s) in self.summands.iter().enumerate() {
            if let Some(s) = s {
                if s.ln() > best.1 {
                    best = (i + 1, s.ln());
                }
            }
        }
        best.0
    }
}

/// Evaluates the four-summand sufficient condition at `(k, ω, α, b)`.
pub fn condition3(k: u64, omega: u64, alpha: f64, b: f64) -> Result<Condition3, BoundsError> {
    if k < 3 {
        return Err(domain(format!("k must be at least 3, got {k}")));
    }
    let kf = k as f64;
    let t = t_param(kf, alpha)?;
    let ln_k = kf.ln();
    let a_ln_k = alpha * ln_k;
    let (tf, wf) = (t as f64, omega as f64);

    let s1 = 2.0 * ln_k - kf * std::f64::consts::LN_2;
    let s2 = (tf + 1.0).ln() + (1.0 - alpha) * ln_k + a_ln_k * (tf + wf) / kf + (tf + wf) * a_ln_k.ln();
    let s3 = 2.0 * (tf + 1.0).ln() - ln_factorial(t) + (2.0 - b) * ln_k + tf * wf * a_ln_k.ln();
    let s4 = (t >= 2).then(|| {
        (tf + 1.0).ln()
            + tf.ln()
            + (tf - 1.0) * ((2.0 * std::f64::consts::E * a_ln_k).ln() - (tf - 1.0).ln())
            + (1.0 + alpha - b) * ln_k
    });
    let summands = [
        Some(LogValue::from_ln(s1)),
        Some(LogValue::from_ln(s2)),
        Some(LogValue::from_ln(s3)),
        s4.map(LogValue::from_ln),
    ];
    let total = summands.iter().copied().collect::<Option<Vec<_>>>().map(|v| v.into_iter().sum::<LogValue>());
    let holds = total.is_some_and(|s| s.ln() < 0.25f64.ln());
    Ok(Condition3 { k, omega, alpha, b, t, q: a_ln_k / kf, summands, total, holds })
}

/// Everything the multiparameter recoloring theorem asks of `(k, r, ω, α, b, d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem4Report {
    pub k: u64,
    pub r: u64,
    pub omega: u64,
    pub alpha: f64,
    pub b: f64,
    pub d: u64,
    pub t: u64,
    pub q: f64,
    /// `q / (r - 1)`.
    pub p_recolor: f64,
    /// `b <= t < k - ω`.
    pub condition1: bool,
    /// `2/k <= q <= 1/2`.
    pub condition2: bool,
    pub condition3: Condition3,
    pub d_max: LogValue,
    /// `d <= d_max`.
    pub d_admissible: bool,
    /// The dependency sum at `p = q/(r-1)`, when it is defined.
    pub w: Option<WReport>,
    /// All conditions hold: every H in the class with edge degree `<= d` is r-colorable.
    pub guarantees_colorable: bool,
}

/// Evaluates the parameter conditions, the summand condition, the edge-degree
/// admissibility of `d`, and the W-sum.
pub fn check_theorem4(k: u64, r: u64, omega: u64, alpha: f64, b: f64, d: u64) -> Result<Theorem4Report, BoundsError> {
    if r < 2 {
        return Err(domain(format!("r must be at least 2, got {r}")));
    }
    let c3 = condition3(k, omega, alpha, b)?;
    let (t, q) = (c3.t, c3.q);
    let kf = k as f64;
    let condition1 = b <= t as f64 && t + omega < k;
    let condition2 = 2.0 / kf <= q && q <= 0.5;
    let d_max = if t > 0 { d_max(k, r, t, b)? } else { LogValue::ZERO };
    let d_admissible = (d as f64).ln() <= d_max.ln() || d == 0 && !d_max.is_zero() || d == 0 && d_max.is_zero();
    let p_recolor = q / (r - 1) as f64;
    let w = (t >= 2 && d >= t && q < 1.0 && r as f64 * p_recolor <= 1.0)
        .then(|| eval_w(&WParams { k, r, omega, t, q, p: p_recolor, d }).ok())
        .flatten();
    let guarantees_colorable = condition1 && condition2 && c3.holds && d_admissible;
    Ok(Theorem4Report {
        k,
        r,
        omega,
        alpha,
        b,
        d,
        t,
        q,
        p_recolor,
        condition1,
        condition2,
        condition3: c3,
        d_max,
        d_admissible,
        w,
        guarantees_colorable,
    })
}

/// Arguments of [`eval_w`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WParams {
    pub k: u64,
    pub r: u64,
    pub omega: u64,
    pub t: u64,
    pub q: f64,
    pub p: f64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WReport {
    pub value: LogValue,
    /// The four summands in order: the two `(d+1)` terms, the first-type
    /// configuration term and the second-type configuration term.
    pub terms: [LogValue; 4],
    /// `W <= 1/4`.
    pub within_quarter: bool,
}

/// The full Local Lemma dependency sum `W` with its combinatorial
/// multiplicities, in log-space.
pub fn eval_w(params: &WParams) -> Result<WReport, BoundsError> {
    let WParams { k, r, omega, t, q, p, d } = *params;
    if t < 2 {
        return Err(domain(format!("W needs t >= 2, got t = {t}")));
    }
    if d < t {
        return Err(domain(format!("W needs d >= t, got d = {d}, t = {t}")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("q must lie in (0, 1), got {q}")));
    }
    if r < 2 {
        return Err(domain(format!("r must be at least 2, got {r}")));
    }
    if !(p >= 0.0) || r as f64 * p > 1.0 {
        return Err(domain(format!("need 0 <= p and r p <= 1, got p = {p}")));
    }
    let (kf, rf, tf, wf, df) = (k as f64, r as f64, t as f64, omega as f64, d as f64);
    let (ln_r, ln_q, ln_kq) = (rf.ln(), q.ln(), (kf * q).ln());
    let lv = LogValue::from_ln;

    let outer = lv((tf + 1.0).ln());
    let d1 = lv((df + 1.0).ln());
    let dd1 = lv((df + 1.0).ln() + df.ln());
    let choose = |a: f64, b: f64| lv(ln_choose(a, b));

    // r (r-1) (p/r)^k
    let q0 = if p == 0.0 { LogValue::ZERO } else { lv(ln_r + (rf - 1.0).ln() + kf * (p.ln() - ln_r)) };
    // r^(1-k) (1-q)^(k-t-ω) (kq)^(t+ω)
    let q1 = lv((1.0 - kf) * ln_r + (kf - tf - wf) * (-q).ln_1p() + (tf + wf) * ln_kq);
    // r^(-(t+1)(k-1)) q^t (kq)^(t(t+ω-2))
    let q2 = lv(-(tf + 1.0) * (kf - 1.0) * ln_r + tf * ln_q + tf * (tf + wf - 2.0) * ln_kq);
    // r^(-t(k-1)) (1+q)^k (2q)^(t-1)
    let q3 = lv(-tf * (kf - 1.0) * ln_r + kf * q.ln_1p() + (tf - 1.0) * (2.0 * q).ln());

    let mult_first = d1 * choose(df, tf) + dd1 * choose(df - 1.0, tf - 1.0);
    let mult_second = d1 * choose(df, tf - 1.0) + dd1 * choose(df - 1.0, tf - 2.0);

    let terms = [outer * d1 * q0, outer * d1 * q1, outer * mult_first * q2, outer * mult_second * q3];
    let value: LogValue = terms.iter().copied().sum();
    Ok(WReport { value, terms, within_quarter: value.ln() <= 0.25f64.ln() })
}

/// Outcome of the symmetric Local Lemma check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalLemmaReport {
    pub sum: LogValue,
    /// `sum <= 1/4`.
    pub satisfied: bool,
    /// `∏ (1 - 2 p_j)`, zero when some `p_j >= 1/2`.
    pub product_lower_bound: LogValue,
}

/// Sums the neighbourhood probabilities and reports the product lower bound
/// on avoiding every bad event.
pub fn local_lemma_margin(probabilities: &[LogValue]) -> Result<LocalLemmaReport, BoundsError> {
    if let Some(bad) = probabilities.iter().find(|p| p.ln() > 1e-12 || p.ln().is_nan()) {
        return Err(domain(format!("probability {} exceeds 1", bad.value())));
    }
    let sum: LogValue = probabilities.iter().copied().sum();
    let satisfied = sum.ln() <= 0.25f64.ln();
    let product_lower_bound = if probabilities.iter().any(|p| p.ln() >= 0.5f64.ln()) {
        LogValue::ZERO
    } else {
        LogValue::from_ln(probabilities.iter().map(|p| (-2.0 * p.value()).ln_1p()).sum())
    };
    Ok(LocalLemmaReport { sum, satisfied, product_lower_bound })
}

/// How ω is chosen as a function of k in [`find_min_k_condition3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaRule {
    /// `⌊√(ln k / ln ln k)⌋`, see [`omega_max`].
    LogRatio,
    Constant(u64),
}

impl OmegaRule {
    pub fn omega(self, k: u64) -> u64 {
        match self {
            OmegaRule::LogRatio => omega_max(k as f64),
            OmegaRule::Constant(w) => w,
        }
    }
}

/// Ranges at most this wide are scanned exhaustively.
const FULL_SCAN_WIDTH: u64 = 1 << 20;
const GRID_POINTS_PER_DECADE: f64 = 256.0;
const VERIFY_SAMPLES: u64 = 4096;

/// Smallest `k` in `[k_lo, k_hi]` at which the summand condition holds with
/// `ω = rule(k)`, or `None` if it holds nowhere on the search grid.
///
/// Narrow ranges are scanned exhaustively. Wide ranges are scanned on a
/// log-spaced grid augmented with every jump point of `t(k)` and `ω(k)`, then
/// the first failing-to-holding gap is bisected; between jump points the
/// summands vary smoothly. The result is re-verified: the condition holds at
/// it and fails at its predecessor and at evenly spaced points of the gap.
pub fn find_min_k_condition3(
    rule: OmegaRule,
    alpha: f64,
    b: f64,
    k_lo: u64,
    k_hi: u64,
) -> Result<Option<u64>, BoundsError> {
    if k_lo >= k_hi {
        return Err(domain(format!("need k_lo < k_hi, got [{k_lo}, {k_hi}]")));
    }
    let k_lo = k_lo.max(3);
    let holds = |k: u64| condition3(k, rule.omega(k), alpha, b).map(|c| c.holds);
    holds(k_lo)?;
    if holds(k_lo)? {
        return Ok(Some(k_lo));
    }
    if k_hi - k_lo <= FULL_SCAN_WIDTH {
        for k in k_lo + 1..=k_hi {
            if holds(k)? {
                return Ok(Some(k));
            }
        }
        return Ok(None);
    }

    let mut grid = log_grid(k_lo, k_hi);
    grid.extend(step_points(k_lo, k_hi, |k| t_param(k as f64, alpha).unwrap_or(0)));
    grid.extend(step_points(k_lo, k_hi, |k| rule.omega(k)));
    grid.sort_unstable();
    grid.dedup();

    let mut prev = k_lo;
    for &g in &grid {
        if g <= prev {
            continue;
        }
        if holds(g)? {
            // holds(prev) is false, holds(g) is true: bisect the gap
            let (mut lo, mut hi) = (prev, g);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            debug_assert!(holds(hi)? && !holds(hi - 1)?);
            let stride = ((hi - prev) / VERIFY_SAMPLES).max(1);
            let mut k = prev;
            while k < hi {
                if holds(k)? {
                    // a holding point inside the gap: restart the search below it
                    return find_min_k_condition3(rule, alpha, b, prev, k).map(|r| r.or(Some(k)));
                }
                k += stride;
            }
            return Ok(Some(hi));
        }
        prev = g;
    }
    Ok(None)
}

fn log_grid(lo: u64, hi: u64) -> Vec<u64> {
    let (a, b) = ((lo as f64).log10(), (hi as f64).log10());
    let steps = ((b - a) * GRID_POINTS_PER_DECADE).ceil().max(1.0) as u64;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64).round() as u64)
        .map(|k| k.clamp(lo, hi))
        .collect();
    out.push(hi);
    out
}

/// Every `k` in `(lo, hi]` where the nondecreasing step function `f` changes,
/// found by bisection for each value it takes.
fn step_points(lo: u64, hi: u64, f: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut start = lo;
    while start < hi {
        let v = f(start);
        if f(hi) <= v {
            break;
        }
        // first k > start with f(k) > v
        let (mut a, mut b) = (start, hi);
        while b - a > 1 {
            let mid = a + (b - a) / 2;
            if f(mid) > v {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(a);
        out.push(b);
        start = b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(100.0).unwrap(), 4.0);
        assert_eq!(phi(1e6).unwrap(), 2.0);
        assert_eq!(t_param(1e6, 2.0).unwrap(), 2);
        assert_eq!(t_param(100.0, 2.0).unwrap(), 1);
        assert!(t_param(1.5, 1.0).is_err());
    }

    #[test]
    fn omega_rule() {
        assert_eq!(omega_max(1e6), 2);
        assert_eq!(omega_max(1e13), 2);
        assert_eq!(omega_max(2.0), 1);
        assert_eq!(omega_max(3.0), 3);
    }

    #[test]
    fn names_round_trip() {
        for &id in BoundId::ALL {
            assert_eq!(id.name().parse::<BoundId>().unwrap(), id);
        }
        assert_eq!("nope".parse::<BoundId>(), Err(BoundsError::UnknownBound("nope".into())));
    }

    #[test]
    fn degree_bound_substitutions() {
        let v = evaluate_degree_bound(BoundId::ErdLovLower, 10, 2).unwrap();
        assert!(close(v.value(), 12.8, 1e-12));
        let v = evaluate_degree_bound(BoundId::Shabanov, 4, 3).unwrap();
        assert!(close(v.value(), 1.6875, 1e-12));
        let v = evaluate_degree_bound(BoundId::KostRodl, 3, 2).unwrap();
        // ⌈3 · 4 · ln 2⌉ = ⌈8.317⌉ = 9
        assert!(close(v.value(), 9.0, 1e-12));
        let v = evaluate_degree_bound(BoundId::ErdLovUpper, 3, 2).unwrap();
        assert!(close(v.value(), 20.0 * 9.0 * 16.0, 1e-12));
        let v = evaluate_degree_bound(BoundId::Thm3, 1_000_000, 2).unwrap();
        assert!(close(v.ln(), 999_999.0 * 2f64.ln() - 12.0 * 10f64.ln(), 1e-13));
        assert!(evaluate_degree_bound(BoundId::RadhSrin, 10, 3).is_err());
        assert!(evaluate_degree_bound(BoundId::Shabanov, 10, 2).is_err());
        assert!(evaluate_degree_bound(BoundId::Kkr, 10, 1).is_err());
        assert!(evaluate_degree_bound(BoundId::Thm2, 10, 2).is_err());
    }

    #[test]
    fn radh_srin_and_kkr_by_hand() {
        let k = 20.0f64;
        let v = evaluate_degree_bound(BoundId::RadhSrin, 20, 2).unwrap();
        assert!(close(v.value(), 0.17 * 2f64.powi(20) / (k * k.ln()).sqrt(), 1e-12));
        let v = evaluate_degree_bound(BoundId::Kkr, 20, 4).unwrap();
        let direct = (-64f64).exp() * (k / k.ln()).powf(2.0 / 3.0) * 4f64.powi(20) / k;
        assert!(close(v.value(), direct, 1e-12));
    }

    #[test]
    fn threshold_bounds_by_hand() {
        // n = 10, k = 3: n / C(n, k) = 10 / 120
        let x = 10.0 / 120.0;
        let params = ThresholdParams::new(10, 3, 2);
        let v = evaluate_threshold_bound(BoundId::Lemma1, &params).unwrap();
        assert!(close(v.value(), 4.0 / 9.0 * x, 1e-12));
        let v = evaluate_threshold_bound(BoundId::Akkt2Color, &params).unwrap();
        assert!(close(v.value(), 4.0 / 75.0 * x, 1e-12));
        let v = evaluate_threshold_bound(BoundId::Lemma2, &params).unwrap();
        assert!(close(v.value(), 1.01 * 4.0 * 2f64.ln() * x, 1e-12));
        let v = evaluate_threshold_bound(BoundId::Akkt, &ThresholdParams::new(10, 3, 2)).unwrap();
        // r (r+1)! / (r+1)^(2(r+1)) = 2 · 6 / 3^6
        assert!(close(v.value(), 12.0 / 729.0 * 4.0 / 3.0 * x, 1e-12));
        let mut with_delta = ThresholdParams::new(10, 3, 2);
        with_delta.delta = Some(LogValue::from_value(9.0));
        let v = evaluate_threshold_bound(BoundId::Lemma3, &with_delta).unwrap();
        assert!(close(v.value(), 0.5 * 9.0 / 3.0 * x, 1e-12));
        let v = evaluate_threshold_bound(BoundId::Cor1Part1, &ThresholdParams::new(10, 3, 3)).unwrap();
        assert!(close(v.value(), 3.0 / 32.0 * 9.0 / 3f64.powf(1.5) * x, 1e-12));
        let v = evaluate_threshold_bound(BoundId::Thm2, &ThresholdParams::new(10, 3, 2)).unwrap();
        assert!(close(v.value(), 0.5 * 4.0 / 3f64.powi(5) * x, 1e-12));
    }

    #[test]
    fn threshold_domain_errors() {
        assert!(evaluate_threshold_bound(BoundId::Cor1Part1, &ThresholdParams::new(10, 3, 2)).is_err());
        assert!(evaluate_threshold_bound(BoundId::AchMoore, &ThresholdParams::new(10, 3, 3)).is_err());
        assert!(evaluate_threshold_bound(BoundId::Thm2, &ThresholdParams::new(2, 3, 2)).is_err());
        assert!(evaluate_threshold_bound(BoundId::Thm2, &ThresholdParams::new(10, 2, 2)).is_err());
        assert!(evaluate_threshold_bound(BoundId::Lemma3, &ThresholdParams::new(10, 3, 2)).is_err());
        assert!(evaluate_threshold_bound(BoundId::Thm2, &ThresholdParams::new(10, 3, 1)).is_err());
    }

    #[test]
    fn report_requires_inputs() {
        let inputs = BoundInputs { k: Some(5), r: Some(2), ..Default::default() };
        assert_eq!(
            BoundReport::evaluate(BoundId::Lemma1, &inputs),
            Err(BoundsError::MissingInput { bound: "lemma1", input: "n" })
        );
        let inputs = BoundInputs { n: Some(50), k: Some(5), r: Some(2), ..Default::default() };
        assert_eq!(
            BoundReport::evaluate(BoundId::Lemma3, &inputs),
            Err(BoundsError::MissingInput { bound: "lemma3", input: "delta" })
        );
        let inputs = BoundInputs { n: Some(50), k: Some(5), r: Some(2), p: Some(1e-9), ..Default::default() };
        let report = BoundReport::evaluate(BoundId::Lemma1, &inputs).unwrap();
        assert_eq!(report.satisfied, Some(true));
        let inputs = BoundInputs { k: Some(10), r: Some(2), ..Default::default() };
        let report = BoundReport::evaluate(BoundId::ErdLovLower, &inputs).unwrap();
        assert!(close(report.value.value(), 12.8, 1e-12));
        assert_eq!(report.satisfied, None);
    }

    #[test]
    fn lemma1_increases_with_r() {
        let a = evaluate_threshold_bound(BoundId::Lemma1, &ThresholdParams::new(50, 5, 2)).unwrap();
        let b = evaluate_threshold_bound(BoundId::Lemma1, &ThresholdParams::new(50, 5, 3)).unwrap();
        assert!(a < b);
    }

    #[test]
    fn d_max_cases() {
        let v = d_max(20, 2, 2, 4.0).unwrap();
        assert!(close(v.value(), 26213.4, 1e-12));
        let v = d_max(10, 3, 4, 4.0).unwrap();
        assert!(close(v.value(), 3f64.powi(9) - 1.0, 1e-12));
        assert!(d_max(3, 2, 1, 4.0).unwrap().is_zero());
        assert!(d_max(3, 2, 0, 4.0).is_err());
    }

    #[test]
    fn theorem4_small_t_flags() {
        let rep = check_theorem4(100, 3, 1, 2.0, 4.0, 10).unwrap();
        assert_eq!(rep.t, 1);
        assert!(!rep.condition1);
        assert_eq!(rep.condition3.summands[3], None);
        assert!(!rep.condition3.holds);
        assert!(rep.w.is_none());
        assert!(!rep.guarantees_colorable);
        assert!(check_theorem4(3, 2, 1, 0.5, 4.0, 1).is_err());
    }

    #[test]
    fn local_lemma_examples() {
        let rep = local_lemma_margin(&[]).unwrap();
        assert!(rep.sum.is_zero());
        assert_eq!(rep.product_lower_bound, LogValue::ONE);
        assert!(rep.satisfied);

        let p = LogValue::from_value(0.1);
        let rep = local_lemma_margin(&[p, p]).unwrap();
        assert!(close(rep.sum.value(), 0.2, 1e-14));
        assert!(rep.satisfied);
        assert!(close(rep.product_lower_bound.value(), 0.64, 1e-14));

        let rep = local_lemma_margin(&[LogValue::from_value(0.3)]).unwrap();
        assert!(!rep.satisfied);
        assert!(close(rep.product_lower_bound.value(), 0.4, 1e-14));

        let rep = local_lemma_margin(&[LogValue::from_value(0.6)]).unwrap();
        assert!(rep.product_lower_bound.is_zero());
        assert!(local_lemma_margin(&[LogValue::from_value(1.5)]).is_err());
    }

    #[test]
    fn w_rejects_small_t() {
        let params = WParams { k: 30, r: 2, omega: 1, t: 1, q: 0.2, p: 0.2, d: 100 };
        assert!(eval_w(&params).is_err());
        let params = WParams { t: 2, d: 1, ..params };
        assert!(eval_w(&params).is_err());
        let params = WParams { d: 100, p: 0.6, ..params };
        assert!(eval_w(&params).is_err());
    }

    #[test]
    fn min_k_edge_cases() {
        // already holds at the low end
        assert_eq!(find_min_k_condition3(OmegaRule::LogRatio, 2.0, 4.0, 10_000_000_000, 10_000_000_100).unwrap(), Some(10_000_000_000));
        // fails everywhere in range
        assert_eq!(find_min_k_condition3(OmegaRule::LogRatio, 2.0, 4.0, 1_000, 100_000).unwrap(), None);
        assert!(find_min_k_condition3(OmegaRule::LogRatio, 2.0, 4.0, 10, 10).is_err());
    }

    #[test]
    fn step_points_find_jumps() {
        let pts = step_points(1, 100, |k| k / 10);
        assert!(pts.contains(&9) && pts.contains(&10) && pts.contains(&99) && pts.contains(&100));
    }
}

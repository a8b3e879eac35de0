//! Theorem-shaped implication trials: check the hypotheses, then the premise
//! subordination, then the conclusion, and classify the outcome.
//!
//! Trials run in `f64`. A fuzz run draws its test functions from two seeded
//! generators: small random perturbations of the pole ([`random_sigma_function`])
//! and functions whose principal expression is designed to sweep a large part
//! of the dominant's range ([`boundary_probe_function`]).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::disk::{
    convex_probe, min_real_on_disk, nonvanishing_probe, starlike_probe, subordination_probe, univalence_probe,
    Status, Witness, DECISION_TOL,
};
use crate::error::{Error, Result};
use crate::forms::{
    base_series, hypothesis_value, k_series, macovei_condition, p_series, phi_series, psi_series, q_family,
    rhs_builder, shrink_toward_one, BaseMode, HypothesisKind, RhsKind,
};
use crate::lashin::multiplier;
use crate::presets::Preset;
use crate::series::MeromorphicSeries;
use crate::{Grid, Meromorphic, Params, QSpec, Series, Verdict, C64};

/// Decay of the random tail coefficients.
pub const GENERATOR_DECAY: f64 = 0.5;
/// Largest accepted `sup |z P f - 1|` bound on the 0.95-disk.
pub const GENERATOR_SPREAD: f64 = 0.5;
pub const GENERATOR_ATTEMPTS: usize = 10;
pub const DEFAULT_AMPLITUDE: f64 = 0.1;
/// Half-width of the multiplicative parameter jitter.
pub const JITTER: f64 = 0.2;
pub const JITTER_ATTEMPTS: usize = 8;
/// Shrink factor of the mutated dominant.
pub const MUTATION_FACTOR: f64 = 0.5;
/// Largest `|c_n| 0.95^n` over the last coefficients of a derived series
/// for its samples to be trusted.
pub const TAIL_TOL: f64 = 1e-9;
const TAIL_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    T31,
    T35,
    T38,
    T41,
    T43,
    T51,
    T52,
    /// The Macovei lemma chain.
    L26,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T31,
        TheoremId::T35,
        TheoremId::T38,
        TheoremId::T41,
        TheoremId::T43,
        TheoremId::T51,
        TheoremId::T52,
        TheoremId::L26,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T31 => "3.1",
            TheoremId::T35 => "3.5",
            TheoremId::T38 => "3.8",
            TheoremId::T41 => "4.1",
            TheoremId::T43 => "4.3",
            TheoremId::T51 => "5.1",
            TheoremId::T52 => "5.2",
            TheoremId::L26 => "lemma-2.6",
        }
    }

    pub fn is_sandwich(self) -> bool {
        matches!(self, TheoremId::T51 | TheoremId::T52)
    }

    /// Whether the conclusion places the `f`-side expression as the dominant.
    pub fn is_superordination(self) -> bool {
        matches!(self, TheoremId::T41 | TheoremId::T43 | TheoremId::T51 | TheoremId::T52)
    }

    /// Whether the principal expression is `k` (the lambda base) rather than `p`.
    pub fn uses_k(self) -> bool {
        matches!(self, TheoremId::T31 | TheoremId::T38 | TheoremId::T43 | TheoremId::T52)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = match s.trim() {
            "3.1" => TheoremId::T31,
            "3.5" => TheoremId::T35,
            "3.8" => TheoremId::T38,
            "4.1" => TheoremId::T41,
            "4.3" => TheoremId::T43,
            "5.1" => TheoremId::T51,
            "5.2" => TheoremId::T52,
            "2.6" | "lemma-2.6" | "lem-2.6" => TheoremId::L26,
            other => return Err(Error::Usage(format!("unknown theorem id '{other}'"))),
        };
        Ok(t)
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Confirming,
    Vacuous,
    Counterexample,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    /// Supplied by the caller.
    Given,
    Random,
    BoundaryProbe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisEntry {
    pub condition: &'static str,
    pub margin: Option<f64>,
    #[serde(serialize_with = "ser_opt_c64")]
    pub argmin: Option<C64>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

impl HypothesisEntry {
    fn status(&self) -> Status {
        self.verdict.as_ref().map_or(Status::Fails, |v| v.status)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.status() == Status::Holds)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.entries.iter().any(|e| e.status() == Status::Inconclusive)
    }

    pub fn get(&self, condition: &str) -> Option<&HypothesisEntry> {
        self.entries.iter().find(|e| e.condition == condition)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub theorem: TheoremId,
    pub preset: Option<String>,
    pub trial: usize,
    pub seed: u64,
    pub generator: Generator,
    pub mode: BaseMode,
    pub mutated: bool,
    pub params: Params,
    pub params_digest: String,
    pub hypotheses: HypothesisReport,
    pub premise: Option<Verdict>,
    pub conclusion: Option<Verdict>,
    pub classification: Classification,
    pub note: Option<String>,
    /// Tail coefficients `a_1, a_2, ...` of `f`; recorded for counterexamples.
    #[serde(serialize_with = "ser_opt_coeffs")]
    pub function: Option<Vec<C64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub confirming: usize,
    pub vacuous: usize,
    pub counterexample: usize,
    pub inconclusive: usize,
}

impl ClassCounts {
    fn add(&mut self, c: Classification) {
        match c {
            Classification::Confirming => self.confirming += 1,
            Classification::Vacuous => self.vacuous += 1,
            Classification::Counterexample => self.counterexample += 1,
            Classification::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.confirming + self.vacuous + self.counterexample + self.inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub theorem: TheoremId,
    pub preset: String,
    pub seed: u64,
    pub trials: usize,
    pub mode: BaseMode,
    pub mutated: bool,
    pub amplitude: f64,
    pub order: usize,
    pub counts: ClassCounts,
    pub vacuous_rate: f64,
    /// Most frequent reason for a vacuous trial, with its count.
    pub vacuous_reasons: Vec<(String, usize)>,
    /// Classification of every trial, by index.
    pub classes: Vec<Classification>,
    pub counterexamples: Vec<TrialReport>,
    pub wall_time: Option<f64>,
}

fn ser_opt_c64<S: Serializer>(c: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.map(|c| [c.re, c.im]).serialize(s)
}

fn ser_opt_coeffs<S: Serializer>(c: &Option<Vec<C64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.as_ref()
        .map(|v| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
        .serialize(s)
}

/// Stable 64-bit FNV-1a digest, rendered as hex.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn params_digest(prm: &Params) -> String {
    digest(serde_json::to_string(prm).expect("parameters serialize").as_bytes())
}

/// SplitMix64 step, used to derive per-trial seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit_disk_sample(rng: &mut ChaCha20Rng) -> C64 {
    let r: f64 = rng.gen::<f64>().sqrt();
    let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex::from_polar(r, t)
}

/// Seeded `f = 1/z + sum a_k z^k` with `a_k = amplitude c_k 0.5^k`, `|c_k| <= 1`.
///
/// A draw is accepted when `sum |a_k| 0.95^{k+1} < 0.5`, which bounds
/// `|z P f - 1|` on the 0.95-disk for every operator exponent `alpha >= 0`.
pub fn random_sigma_function(seed: u64, order: usize, amplitude: f64) -> Result<Meromorphic> {
    if !(amplitude > 0.0 && amplitude <= 0.5) {
        return Err(Error::Usage(format!("amplitude {amplitude} outside (0, 0.5]")));
    }
    if order < 8 {
        return Err(Error::Usage(format!("order {order} below 8")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..GENERATOR_ATTEMPTS {
        let tail: Vec<C64> = (1..=order)
            .map(|k| unit_disk_sample(&mut rng) * (amplitude * GENERATOR_DECAY.powi(k as i32)))
            .collect();
        let spread: f64 = tail
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm() * 0.95f64.powi(i as i32 + 2))
            .sum();
        if spread < GENERATOR_SPREAD {
            return MeromorphicSeries::new(tail);
        }
    }
    Err(Error::GeneratorStuck(GENERATOR_ATTEMPTS))
}

/// `f` whose principal expression is `q(s z^2)^t` up to truncation, with `s`
/// and `t` drawn from the seed.
///
/// The principal expression is `k` (the lambda base raised to `mu`) or
/// `p = (z P^alpha f)^mu`. Since `q(s z^2)` is subordinate to `q`, these
/// functions sit near the edge of the conclusion while typically keeping the
/// premise.
pub fn boundary_probe_function(
    seed: u64,
    order: usize,
    q: &Series,
    prm: &Params,
    principal_is_k: bool,
) -> Result<Meromorphic> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let s: f64 = rng.gen_range(0.5..0.85);
    let t: f64 = rng.gen_range(0.3..1.0);
    let n = order + 1;
    let mut coeffs = vec![C64::zero(); n + 1];
    let mut scale = 1.0;
    for j in 0..=n / 2 {
        coeffs[2 * j] = q.coeff(j) * scale;
        scale *= s;
    }
    let target = Series::new(coeffs, 1.0)?.complex_power(Complex::new(t, 0.0))?;
    let base = target.complex_power(prm.mu.inv())?;
    let tail = (1..=order)
        .map(|k| {
            let up = multiplier(k, prm.beta, prm.alpha);
            let weight = if principal_is_k {
                let low = multiplier(k, prm.beta, prm.alpha - 1.0);
                (C64::new(1.0, 0.0) - prm.lambda) * low + prm.lambda * up
            } else {
                Complex::new(up, 0.0)
            };
            if weight.norm() < 1e-12 {
                return Err(Error::DegenerateDivision(weight.norm()));
            }
            Ok(base.coeff(k + 1) / weight)
        })
        .collect::<Result<Vec<_>>>()?;
    MeromorphicSeries::new(tail)
}

/// Everything about a dominant that does not depend on `f` or the jittered
/// parameters, computed once per run.
#[derive(Debug, Clone)]
pub struct Dominant {
    pub series: Series,
    zq: Series,
    log_deriv: Series,
    square: Series,
    univalent: Result<Verdict>,
    nonvanishing: Result<Verdict>,
    log_starlike: Result<Verdict>,
    convex: Result<Verdict>,
    /// `min Re(1 + z q''/q')` over the grid and where it occurs.
    convexity_min: Result<(f64, C64)>,
    log_deriv_convexity: Result<Verdict>,
    values: Vec<C64>,
    derivative_values: Vec<C64>,
    points: Vec<C64>,
}

impl Dominant {
    pub fn new(series: Series, grid: &Grid) -> Result<Self> {
        let zq = series.z_derivative();
        let log_deriv = zq.divide(&series)?;
        let square = series.multiply(&series);
        let neutral = Params::new(crate::Lashin::new(1.0, 1.0)?);
        let convexity_min = hypothesis_value(HypothesisKind::Convexity, &series, &neutral)
            .and_then(|(s, _)| min_real_on_disk(&s, grid));
        let log_deriv_convexity = hypothesis_value(HypothesisKind::LogDerivConvexity, &series, &neutral)
            .and_then(|(s, b)| crate::disk::real_part_verdict(&s, b, grid));
        let points = grid.points();
        let derivative = series.differentiate();
        Ok(Self {
            univalent: univalence_probe(&series, grid),
            nonvanishing: nonvanishing_probe(&series, grid),
            log_starlike: starlike_probe(&log_deriv, grid),
            convex: convex_probe(&series, grid),
            convexity_min,
            log_deriv_convexity,
            values: points.iter().map(|&z| series.evaluate(z)).collect::<Result<_>>()?,
            derivative_values: points.iter().map(|&z| derivative.evaluate(z)).collect::<Result<_>>()?,
            points,
            series,
            zq,
            log_deriv,
            square,
        })
    }

    pub fn from_spec(spec: &QSpec, grid: &Grid) -> Result<Self> {
        Self::new(q_family(spec)?, grid)
    }

    /// Right-hand side of a chain, assembled from the cached pieces.
    pub fn rhs(&self, kind: RhsKind, prm: &Params) -> Result<Series> {
        let one = C64::new(1.0, 0.0);
        match kind {
            RhsKind::LogDeriv => Ok(self.log_deriv.scale(prm.gamma).offset(one)),
            RhsKind::Quadratic | RhsKind::Macovei => {
                let w = if kind == RhsKind::Quadratic { prm.gamma } else { Complex::new(prm.sigma, 0.0) };
                crate::series::linear_combine(&[(prm.delta, &self.square), (prm.eta, &self.series), (w, &self.zq)])
            }
            RhsKind::Linear => rhs_builder(kind, &self.series, prm),
        }
    }

    /// Minimum over the grid of `Re(g(q(z), q'(z)))`.
    fn pointwise(&self, g: impl Fn(C64, C64) -> C64) -> (f64, C64, C64) {
        let mut best = (f64::INFINITY, C64::zero(), C64::zero());
        for ((&z, &q), &dq) in self.points.iter().zip(&self.values).zip(&self.derivative_values) {
            let v = g(q, dq);
            if v.re < best.0 {
                best = (v.re, z, v);
            }
        }
        best
    }
}

fn entry(condition: &'static str, verdict: Result<Verdict>) -> HypothesisEntry {
    match verdict {
        Ok(v) => HypothesisEntry {
            condition,
            margin: Some(v.margin),
            argmin: v.witness.as_ref().map(|w| w.z),
            verdict: Some(v),
            error: None,
        },
        Err(e) => HypothesisEntry { condition, margin: None, argmin: None, verdict: None, error: Some(e.to_string()) },
    }
}

fn real_entry(condition: &'static str, min: f64, bound: f64, at: C64, value: C64) -> HypothesisEntry {
    let v = Verdict::from_margin(min - bound, DECISION_TOL, Witness::at(at, value));
    HypothesisEntry { argmin: Some(at), ..entry(condition, Ok(v)) }
}

fn scalar_entry(condition: &'static str, margin: f64, value: C64) -> HypothesisEntry {
    entry(condition, Ok(Verdict::from_margin(margin, DECISION_TOL, Witness::at(C64::zero(), value))))
}

fn gamma_positive(prm: &Params) -> HypothesisEntry {
    let g = prm.gamma;
    let margin = if g.im == 0.0 { g.re } else { -g.im.abs() };
    scalar_entry("gamma_positive", margin, g)
}

fn quadratic_weight(condition: &'static str, q: &Dominant, prm: &Params) -> HypothesisEntry {
    if prm.gamma.is_zero() {
        return entry(condition, Err(Error::Usage("gamma must be non-zero".into())));
    }
    let (a, b) = (prm.eta / prm.gamma, prm.delta * 2.0 / prm.gamma);
    let (min, at, value) = q.pointwise(|v, _| a + b * v);
    real_entry(condition, min, 0.0, at, value)
}

fn superordination_weight(condition: &'static str, q: &Dominant, prm: &Params) -> HypothesisEntry {
    if prm.gamma.is_zero() {
        return entry(condition, Err(Error::Usage("gamma must be non-zero".into())));
    }
    let (a, b) = (prm.eta / prm.gamma, prm.delta * 2.0 / prm.gamma);
    let (min, at, value) = q.pointwise(|v, dv| (a + b * v) * dv);
    real_entry(condition, min, 0.0, at, value)
}

fn linear_convexity(condition: &'static str, q: &Dominant, prm: &Params) -> HypothesisEntry {
    if prm.ell.is_zero() {
        return entry(condition, Err(Error::Usage("ell must be non-zero".into())));
    }
    let bound = (prm.m * prm.beta / prm.ell).re.max(0.0);
    match &q.convexity_min {
        Ok((min, at)) => real_entry(condition, *min, bound, *at, Complex::new(*min, 0.0)),
        Err(e) => entry(condition, Err(e.clone())),
    }
}

fn m_beta_over_ell_negative(prm: &Params) -> HypothesisEntry {
    if prm.ell.is_zero() {
        return entry("m_beta_over_ell_negative", Err(Error::Usage("ell must be non-zero".into())));
    }
    let v = prm.m * prm.beta / prm.ell;
    scalar_entry("m_beta_over_ell_negative", -v.re, v)
}

fn series_entry(condition: &'static str, s: Result<Series>, probe: fn(&Series, &Grid) -> Result<Verdict>, grid: &Grid) -> HypothesisEntry {
    entry(condition, s.and_then(|s| probe(&s, grid)))
}

/// Dominants of a trial: a single `q`, or the `(q1, q2)` pair of a sandwich.
#[derive(Debug, Clone, Copy)]
pub struct Dominants<'a> {
    pub q: &'a Dominant,
    pub lower: Option<&'a Dominant>,
}

fn lower_of<'a>(d: &Dominants<'a>) -> Result<&'a Dominant> {
    d.lower.ok_or_else(|| Error::Usage("sandwich theorems need a lower dominant q1".into()))
}

fn cached(condition: &'static str, v: &Result<Verdict>) -> HypothesisEntry {
    entry(condition, v.clone())
}

/// One entry per condition the theorem states.
pub fn check_hypotheses(
    theorem: TheoremId,
    f: &Meromorphic,
    dominants: Dominants<'_>,
    prm: &Params,
    grid: &Grid,
    mode: BaseMode,
) -> Result<HypothesisReport> {
    let q = dominants.q;
    let zpf = || Ok(crate::forms::shifted_times_z(f, prm, 0));
    let entries = match theorem {
        TheoremId::T31 => vec![
            cached("q_univalent", &q.univalent),
            cached("q_nonvanishing", &q.nonvanishing),
            cached("log_derivative_starlike", &q.log_starlike),
            series_entry("base_nonvanishing", base_series(f, prm, mode), nonvanishing_probe, grid),
            cached("log_derivative_convexity", &q.log_deriv_convexity),
        ],
        TheoremId::T35 => vec![
            series_entry("zpf_nonvanishing", zpf(), nonvanishing_probe, grid),
            quadratic_weight("quadratic_weight", q, prm),
            cached("q_convex", &q.convex),
            gamma_positive(prm),
        ],
        TheoremId::T38 => vec![linear_convexity("linear_convexity", q, prm), cached("q_univalent", &q.univalent)],
        TheoremId::T41 => vec![
            superordination_weight("superordination_weight", q, prm),
            series_entry("zpf_nonvanishing", zpf(), nonvanishing_probe, grid),
            series_entry("p_univalent", p_series(f, prm), univalence_probe, grid),
            series_entry("psi_univalent", psi_series(f, prm), univalence_probe, grid),
            cached("q_convex", &q.convex),
            gamma_positive(prm),
        ],
        TheoremId::T43 => vec![
            m_beta_over_ell_negative(prm),
            series_entry("base_nonvanishing", base_series(f, prm, mode), nonvanishing_probe, grid),
            series_entry("k_univalent", k_series(f, prm, mode), univalence_probe, grid),
            series_entry("phi_univalent", phi_series(f, prm, mode), univalence_probe, grid),
            cached("q_convex", &q.convex),
        ],
        TheoremId::T51 => {
            let q1 = lower_of(&dominants)?;
            vec![
                cached("q1_convex", &q1.convex),
                superordination_weight("q1_superordination_weight", q1, prm),
                cached("q2_univalent", &q.univalent),
                quadratic_weight("q2_quadratic_weight", q, prm),
                gamma_positive(prm),
                series_entry("zpf_nonvanishing", zpf(), nonvanishing_probe, grid),
                series_entry("p_univalent", p_series(f, prm), univalence_probe, grid),
                series_entry("psi_univalent", psi_series(f, prm), univalence_probe, grid),
            ]
        }
        TheoremId::T52 => {
            let q1 = lower_of(&dominants)?;
            vec![
                cached("q1_convex", &q1.convex),
                cached("q2_univalent", &q.univalent),
                m_beta_over_ell_negative(prm),
                linear_convexity("q2_linear_convexity", q, prm),
                series_entry("k_univalent", k_series(f, prm, mode), univalence_probe, grid),
                series_entry("phi_univalent", phi_series(f, prm, mode), univalence_probe, grid),
            ]
        }
        TheoremId::L26 => {
            let a = q.series.coeff(1).re / 2.0;
            let value = macovei_condition(prm.delta.re, prm.eta.re, prm.sigma, a);
            let real = prm.delta.im == 0.0 && prm.eta.im == 0.0 && prm.delta.re > 0.0 && prm.eta.re > 0.0;
            let margin = if real { value } else { -1.0 };
            vec![scalar_entry("macovei_condition", margin, Complex::new(value, 0.0))]
        }
    };
    Ok(HypothesisReport { entries })
}

/// Subordination verdict, or the error that prevented it.
type Probe = Result<Verdict>;

fn sub(g: &Series, f: &Series, grid: &Grid) -> Probe {
    subordination_probe(g, f, grid)
}

fn tail(s: &Series) -> f64 {
    s.tail_magnitude(0.95, TAIL_WINDOW)
}

struct Sides {
    premise: Probe,
    conclusion: Probe,
    /// For superordination conclusions: univalence of the `f`-side dominant.
    dominant_univalent: Option<Status>,
    /// Largest tail magnitude of the `f`-side series involved.
    tail: f64,
}

fn meet(a: Probe, b: Probe) -> Probe {
    Ok(a?.meet(b?))
}

fn sides(
    theorem: TheoremId,
    f: &Meromorphic,
    d: Dominants<'_>,
    prm: &Params,
    grid: &Grid,
    mode: BaseMode,
    mutate: bool,
) -> Result<Sides> {
    let q = d.q;
    let shrink = |s: &Series| if mutate { shrink_toward_one(s, MUTATION_FACTOR) } else { s.clone() };
    let principal = if theorem.uses_k() { k_series(f, prm, mode)? } else { p_series(f, prm)? };
    let out = match theorem {
        TheoremId::T31 => {
            let lhs = crate::forms::lhs_31(f, prm, mode)?;
            Sides {
                premise: sub(&lhs, &q.rhs(RhsKind::LogDeriv, prm)?, grid),
                conclusion: sub(&principal, &shrink(&q.series), grid),
                dominant_univalent: None,
                tail: tail(&lhs).max(tail(&principal)),
            }
        }
        TheoremId::T35 | TheoremId::L26 => {
            let (kind, prm_lhs) = if theorem == TheoremId::T35 {
                (RhsKind::Quadratic, *prm)
            } else {
                (RhsKind::Macovei, Params { gamma: Complex::new(prm.sigma, 0.0), ..*prm })
            };
            let psi = psi_series(f, &prm_lhs)?;
            Sides {
                premise: sub(&psi, &q.rhs(kind, prm)?, grid),
                conclusion: sub(&principal, &shrink(&q.series), grid),
                dominant_univalent: None,
                tail: tail(&psi).max(tail(&principal)),
            }
        }
        TheoremId::T38 => {
            let phi = phi_series(f, prm, mode)?;
            Sides {
                premise: sub(&phi, &q.rhs(RhsKind::Linear, prm)?, grid),
                conclusion: sub(&principal, &shrink(&q.series), grid),
                dominant_univalent: None,
                tail: tail(&phi).max(tail(&principal)),
            }
        }
        TheoremId::T41 | TheoremId::T43 => {
            let (side, kind) = if theorem == TheoremId::T41 {
                (psi_series(f, prm)?, RhsKind::Quadratic)
            } else {
                (phi_series(f, prm, mode)?, RhsKind::Linear)
            };
            let dominant = shrink(&principal);
            Sides {
                premise: sub(&q.rhs(kind, prm)?, &side, grid),
                conclusion: sub(&q.series, &dominant, grid),
                dominant_univalent: Some(univalence_probe(&dominant, grid).map_or(Status::Fails, |v| v.status)),
                tail: tail(&side).max(tail(&principal)),
            }
        }
        TheoremId::T51 | TheoremId::T52 => {
            let q1 = lower_of(&d)?;
            let (side, kind) = if theorem == TheoremId::T51 {
                (psi_series(f, prm)?, RhsKind::Quadratic)
            } else {
                (phi_series(f, prm, mode)?, RhsKind::Linear)
            };
            let premise = meet(sub(&q1.rhs(kind, prm)?, &side, grid), sub(&side, &q.rhs(kind, prm)?, grid));
            let conclusion = meet(sub(&q1.series, &principal, grid), sub(&principal, &shrink(&q.series), grid));
            Sides {
                premise,
                conclusion,
                dominant_univalent: Some(univalence_probe(&principal, grid).map_or(Status::Fails, |v| v.status)),
                tail: tail(&side).max(tail(&principal)),
            }
        }
    };
    Ok(out)
}

/// Outcome of one trial before the run metadata is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub hypotheses: HypothesisReport,
    pub premise: Option<Verdict>,
    pub conclusion: Option<Verdict>,
    pub classification: Classification,
    pub note: Option<String>,
}

fn first_failure(h: &HypothesisReport) -> String {
    h.entries
        .iter()
        .find(|e| e.status() != Status::Holds)
        .map(|e| match &e.error {
            Some(err) => format!("hypothesis {} errored: {err}", e.condition),
            None => format!("hypothesis {} does not hold", e.condition),
        })
        .unwrap_or_default()
}

/// Runs one implication trial with precomputed dominants.
///
/// Classification: a hypothesis that does not hold, or a premise that fails,
/// makes the trial vacuous; an inconclusive premise or conclusion makes it
/// inconclusive; otherwise the conclusion decides. A superordination
/// conclusion whose `f`-side dominant is not numerically univalent can only
/// refute, never confirm.
pub fn run_trial(
    theorem: TheoremId,
    f: &Meromorphic,
    dominants: Dominants<'_>,
    prm: &Params,
    grid: &Grid,
    mode: BaseMode,
    mutate: bool,
) -> Result<TrialOutcome> {
    let hypotheses = check_hypotheses(theorem, f, dominants, prm, grid, mode)?;
    let vacuous = |hypotheses, premise, note| TrialOutcome {
        hypotheses,
        premise,
        conclusion: None,
        classification: Classification::Vacuous,
        note: Some(note),
    };
    if !hypotheses.all_hold() {
        let note = first_failure(&hypotheses);
        return Ok(vacuous(hypotheses, None, note));
    }
    let sides = match sides(theorem, f, dominants, prm, grid, mode, mutate) {
        Ok(s) => s,
        Err(e) => return Ok(vacuous(hypotheses, None, format!("premise could not be built: {e}"))),
    };
    let premise = match sides.premise {
        Ok(v) => v,
        Err(e) => return Ok(vacuous(hypotheses, None, format!("premise probe errored: {e}"))),
    };
    match premise.status {
        Status::Fails => return Ok(vacuous(hypotheses, Some(premise), "premise fails".into())),
        Status::Inconclusive => {
            return Ok(TrialOutcome {
                hypotheses,
                premise: Some(premise),
                conclusion: None,
                classification: Classification::Inconclusive,
                note: Some("premise inconclusive".into()),
            })
        }
        Status::Holds => {}
    }
    let (conclusion, err) = match sides.conclusion {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(format!("conclusion probe errored: {e}"))),
    };
    let (classification, note) = if sides.tail > TAIL_TOL {
        (Classification::Inconclusive, Some(format!("series tail {:.3e} exceeds {TAIL_TOL:e}", sides.tail)))
    } else {
        match (&conclusion, sides.dominant_univalent) {
            (None, _) => (Classification::Inconclusive, err),
            (Some(v), _) if v.status == Status::Fails => (
                Classification::Counterexample,
                Some(format!("conclusion fails with margin {:.6e}", v.margin)),
            ),
            (Some(v), _) if v.status == Status::Inconclusive => {
                (Classification::Inconclusive, Some("conclusion inconclusive".into()))
            }
            (Some(_), Some(s)) if s != Status::Holds => (
                Classification::Inconclusive,
                Some("f-side dominant not numerically univalent; only necessary conditions checked".into()),
            ),
            (Some(_), _) => (Classification::Confirming, None),
        }
    };
    Ok(TrialOutcome { hypotheses, premise: Some(premise), conclusion, classification, note })
}

/// Runs one trial on a caller-supplied sandwich pair. `q1` is the lower
/// subordinant and `q2` the upper dominant.
pub fn sandwich_trial(
    theorem: TheoremId,
    f: &Meromorphic,
    q1: &Dominant,
    q2: &Dominant,
    prm: &Params,
    grid: &Grid,
    mode: BaseMode,
) -> Result<TrialOutcome> {
    if !theorem.is_sandwich() {
        return Err(Error::Usage(format!("theorem {theorem} is not a sandwich theorem")));
    }
    run_trial(theorem, f, Dominants { q: q2, lower: Some(q1) }, prm, grid, mode, false)
}

/// Settings of a fuzz run.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub order: usize,
    pub mode: BaseMode,
    pub mutate: bool,
    pub grid: Grid,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 0,
            amplitude: DEFAULT_AMPLITUDE,
            order: crate::series::DEFAULT_ORDER,
            mode: BaseMode::ConvexCombination,
            mutate: false,
            grid: Grid::default(),
            threads: 0,
        }
    }
}

/// Thread count from `MEROSUB_THREADS` (0 or unset means automatic).
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("MEROSUB_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("MEROSUB_THREADS='{v}' is not a non-negative integer"))),
        Err(_) => Ok(0),
    }
}

fn jitter(prm: &Params, rng: &mut ChaCha20Rng) -> Params {
    let mut draw = || 1.0 + rng.gen_range(-JITTER..=JITTER);
    let mut out = *prm;
    out.alpha *= draw();
    out.beta *= draw();
    out.sigma = (out.sigma * draw()).min(1.0);
    for slot in [&mut out.mu, &mut out.gamma, &mut out.eta, &mut out.delta, &mut out.m, &mut out.ell] {
        if slot.im == 0.0 {
            *slot *= draw();
        }
    }
    out
}

/// Builds the cached dominants of a preset.
pub fn preset_dominants(preset: &Preset, grid: &Grid) -> Result<(Dominant, Option<Dominant>)> {
    let q = Dominant::from_spec(&preset.q, grid)?;
    let lower = preset.q_lower.as_ref().map(|s| Dominant::from_spec(s, grid)).transpose()?;
    Ok((q, lower))
}

/// The test function and parameters of trial `index` of a run.
pub fn trial_inputs(
    preset: &Preset,
    config: &FuzzConfig,
    index: usize,
    q: &Dominant,
) -> Result<(u64, Generator, Meromorphic, Params)> {
    let seed = mix_seed(config.seed, index as u64);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let prm = jitter(&preset.params, &mut rng);
    let (generator, f) = if index % 2 == 0 {
        (Generator::Random, random_sigma_function(seed, config.order, config.amplitude)?)
    } else {
        let f = boundary_probe_function(seed, config.order, &q.series, &prm, preset.theorem.uses_k())
            .or_else(|_| random_sigma_function(seed, config.order, config.amplitude));
        (Generator::BoundaryProbe, f?)
    };
    Ok((seed, generator, f, prm))
}

fn one_trial(preset: &Preset, config: &FuzzConfig, index: usize, q: &Dominant, lower: Option<&Dominant>) -> TrialReport {
    let dominants = Dominants { q, lower };
    let seed = mix_seed(config.seed, index as u64);
    let mut report = TrialReport {
        theorem: preset.theorem,
        preset: Some(preset.id.to_string()),
        trial: index,
        seed,
        generator: Generator::Random,
        mode: config.mode,
        mutated: config.mutate,
        params: preset.params,
        params_digest: params_digest(&preset.params),
        hypotheses: HypothesisReport { entries: Vec::new() },
        premise: None,
        conclusion: None,
        classification: Classification::Vacuous,
        note: None,
        function: None,
    };
    let (_, generator, f, first) = match trial_inputs(preset, config, index, q) {
        Ok(v) => v,
        Err(e) => {
            report.note = Some(format!("generator: {e}"));
            return report;
        }
    };
    report.generator = generator;

    // Re-jitter while a hypothesis sits in its undecided band.
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut prm = first;
    for attempt in 0..JITTER_ATTEMPTS {
        match check_hypotheses(preset.theorem, &f, dominants, &prm, &config.grid, config.mode) {
            Ok(h) if h.any_inconclusive() && attempt + 1 < JITTER_ATTEMPTS => prm = jitter(&preset.params, &mut rng),
            _ => break,
        }
    }
    report.params = prm;
    report.params_digest = params_digest(&prm);
    match run_trial(preset.theorem, &f, dominants, &prm, &config.grid, config.mode, config.mutate) {
        Ok(out) => {
            report.hypotheses = out.hypotheses;
            report.premise = out.premise;
            report.conclusion = out.conclusion;
            report.classification = out.classification;
            report.note = out.note;
        }
        Err(e) => report.note = Some(e.to_string()),
    }
    if report.classification == Classification::Counterexample {
        report.function = Some(f.tail().to_vec());
    }
    report
}

/// Runs `config.trials` seeded trials of a preset's theorem.
///
/// Trials run on a rayon pool and are merged by index, so the summary does
/// not depend on the thread count.
pub fn fuzz_theorem(preset: &Preset, config: &FuzzConfig) -> Result<FuzzSummary> {
    if config.trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    preset.params.validate()?;
    let (q, lower) = preset_dominants(preset, &config.grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let reports: Vec<TrialReport> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| one_trial(preset, config, i, &q, lower.as_ref()))
            .collect()
    });
    let mut counts = ClassCounts::default();
    let mut reasons: Vec<(String, usize)> = Vec::new();
    for r in &reports {
        counts.add(r.classification);
        if r.classification == Classification::Vacuous {
            let reason = r.note.clone().unwrap_or_default();
            match reasons.iter_mut().find(|(k, _)| *k == reason) {
                Some((_, n)) => *n += 1,
                None => reasons.push((reason, 1)),
            }
        }
    }
    reasons.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(FuzzSummary {
        theorem: preset.theorem,
        preset: preset.id.to_string(),
        seed: config.seed,
        trials: config.trials,
        mode: config.mode,
        mutated: config.mutate,
        amplitude: config.amplitude,
        order: config.order,
        vacuous_rate: counts.vacuous as f64 / config.trials as f64,
        counts,
        vacuous_reasons: reasons,
        classes: reports.iter().map(|r| r.classification).collect(),
        counterexamples: reports.into_iter().filter(|r| r.classification == Classification::Counterexample).collect(),
        wall_time: None,
    })
}

/// Runs a single trial of a preset on `f` with the preset's own parameters.
pub fn verify_preset(
    preset: &Preset,
    f: &Meromorphic,
    generator: Generator,
    config: &FuzzConfig,
) -> Result<TrialReport> {
    preset.params.validate()?;
    let (q, lower) = preset_dominants(preset, &config.grid)?;
    let out = run_trial(
        preset.theorem,
        f,
        Dominants { q: &q, lower: lower.as_ref() },
        &preset.params,
        &config.grid,
        config.mode,
        config.mutate,
    )?;
    let function = (out.classification == Classification::Counterexample).then(|| f.tail().to_vec());
    Ok(TrialReport {
        theorem: preset.theorem,
        preset: Some(preset.id.to_string()),
        trial: 0,
        seed: config.seed,
        generator,
        mode: config.mode,
        mutated: config.mutate,
        params: preset.params,
        params_digest: params_digest(&preset.params),
        hypotheses: out.hypotheses,
        premise: out.premise,
        conclusion: out.conclusion,
        classification: out.classification,
        note: out.note,
        function,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::QFamilySpec;
    use crate::presets::{find_preset, Preset};

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    fn grid() -> Grid {
        Grid::default()
    }

    fn dominant(spec: QSpec) -> Dominant {
        Dominant::from_spec(&spec, &grid()).unwrap()
    }

    fn single(q: &Dominant) -> Dominants<'_> {
        Dominants { q, lower: None }
    }

    fn prm() -> Params {
        Params::new(crate::Lashin::new(1.5, 1.0).unwrap())
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!(matches!("bogus".parse::<TheoremId>(), Err(Error::Usage(_))));
    }

    #[test]
    fn generator_is_deterministic_and_small() {
        let a = random_sigma_function(7, 16, 0.1).unwrap();
        let b = random_sigma_function(7, 16, 0.1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_sigma_function(8, 16, 0.1).unwrap());
        for k in 1..=16 {
            assert!(a.coeff(k).norm() <= 0.1 * 0.5f64.powi(k as i32) + 1e-18);
        }
        let tiny = random_sigma_function(3, 16, 1e-12).unwrap();
        assert!(tiny.tail().iter().all(|a| a.norm() < 1e-12));
        assert!(random_sigma_function(1, 16, 0.0).is_err());
        assert!(random_sigma_function(1, 16, 0.6).is_err());
        assert!(random_sigma_function(1, 4, 0.1).is_err());
    }

    #[test]
    fn seeded_sample_satisfies_nonvanishing_conditions() {
        let f = random_sigma_function(11, 64, 0.1).unwrap();
        let q = dominant(QFamilySpec::exponential(c(1.0)));
        let h = check_hypotheses(TheoremId::T35, &f, single(&q), &prm(), &grid(), BaseMode::ConvexCombination)
            .unwrap();
        assert!(h.get("zpf_nonvanishing").unwrap().verdict.as_ref().unwrap().holds());
        let h = check_hypotheses(TheoremId::T31, &f, single(&q), &prm(), &grid(), BaseMode::ConvexCombination)
            .unwrap();
        assert!(h.get("base_nonvanishing").unwrap().verdict.as_ref().unwrap().holds());
    }

    #[test]
    fn hypothesis_lists_match_the_statements() {
        let f = MeromorphicSeries::<f64>::pole(16);
        let q = dominant(QFamilySpec::macovei(0.5));
        let q1 = dominant(QFamilySpec::macovei(0.2));
        let both = Dominants { q: &q, lower: Some(&q1) };
        let expect: [(TheoremId, usize); 8] = [
            (TheoremId::T31, 5),
            (TheoremId::T35, 4),
            (TheoremId::T38, 2),
            (TheoremId::T41, 6),
            (TheoremId::T43, 5),
            (TheoremId::T51, 8),
            (TheoremId::T52, 6),
            (TheoremId::L26, 1),
        ];
        for (t, n) in expect {
            let h = check_hypotheses(t, &f, both, &prm(), &grid(), BaseMode::ConvexCombination).unwrap();
            assert_eq!(h.entries.len(), n, "{t}");
        }
        assert!(check_hypotheses(TheoremId::T51, &f, single(&q), &prm(), &grid(), BaseMode::ConvexCombination)
            .is_err());
    }

    #[test]
    fn quadratic_weight_example() {
        let f = MeromorphicSeries::<f64>::pole(16);
        let q = dominant(QFamilySpec::half_plane_power(1.0));
        let p = Params { eta: c(1.0), gamma: c(1.0), delta: c(0.0), ..prm() };
        let h = check_hypotheses(TheoremId::T35, &f, single(&q), &p, &grid(), BaseMode::ConvexCombination).unwrap();
        assert!(h.get("zpf_nonvanishing").unwrap().verdict.as_ref().unwrap().holds());
        let w = h.get("quadratic_weight").unwrap();
        assert!((w.margin.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_convexity_examples() {
        let f = MeromorphicSeries::<f64>::pole(16);
        let q = dominant(QFamilySpec::exponential(c(1.0)));
        let p = Params { m: c(-1.0), ell: c(1.0), ..prm() };
        let p = Params { beta: 1.0, ..p };
        let h = check_hypotheses(TheoremId::T38, &f, single(&q), &p, &grid(), BaseMode::ConvexCombination).unwrap();
        // Re(1 + z) > 0 on the 0.95-disk, smallest at z = -0.95.
        let e = h.get("linear_convexity").unwrap();
        assert!((e.margin.unwrap() - 0.05).abs() < 1e-9);
        assert!(e.verdict.as_ref().unwrap().holds());

        let p = Params { m: c(1.0), ell: c(1.0), beta: 1.0, ..prm() };
        let h = check_hypotheses(TheoremId::T43, &f, single(&q), &p, &grid(), BaseMode::ConvexCombination).unwrap();
        let e = h.get("m_beta_over_ell_negative").unwrap();
        assert_eq!(e.verdict.as_ref().unwrap().status, Status::Fails);
        assert!((e.margin.unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pole_confirms_subordination_theorems() {
        let f = MeromorphicSeries::<f64>::pole(16);
        for id in ["cor-3.2", "cor-3.3", "cor-3.4", "cor-3.7", "cor-3.9", "cor-3.10", "lem-2.6"] {
            let preset = find_preset(id).unwrap();
            let (q, _) = preset_dominants(&preset, &grid()).unwrap();
            let out = run_trial(preset.theorem, &f, single(&q), &preset.params, &grid(), BaseMode::ConvexCombination, false)
                .unwrap();
            assert_eq!(out.classification, Classification::Confirming, "{id}: {:?}", out.note);
        }
    }

    #[test]
    fn sandwich_examples() {
        let q1 = dominant(QFamilySpec::macovei(0.2));
        let q2 = dominant(QFamilySpec::macovei(0.8));
        let f = random_sigma_function(5, 32, 0.05).unwrap();
        let p = Params { gamma: c(0.5), eta: c(1.5), delta: c(0.2), ..prm() };
        let out = sandwich_trial(TheoremId::T51, &f, &q1, &q2, &p, &grid(), BaseMode::ConvexCombination).unwrap();
        assert_ne!(out.classification, Classification::Counterexample);
        let swapped = sandwich_trial(TheoremId::T51, &f, &q2, &q1, &p, &grid(), BaseMode::ConvexCombination).unwrap();
        assert_eq!(swapped.classification, Classification::Vacuous);
        assert!(sandwich_trial(TheoremId::T35, &f, &q1, &q2, &p, &grid(), BaseMode::ConvexCombination).is_err());
    }

    #[test]
    fn boundary_probe_reaches_its_target() {
        let q = dominant(QFamilySpec::exponential(c(1.0)));
        let p = Params { lambda: c(0.5), mu: c(1.3), ..prm() };
        let f = boundary_probe_function(9, 64, &q.series, &p, true).unwrap();
        let k = k_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        // The target q(s z^2)^t has no odd coefficients.
        for n in (1..40).step_by(2) {
            assert!(k.coeff(n).norm() < 1e-12);
        }
        assert!(k.coeff(2).norm() > 0.1);
    }

    fn small_config(trials: usize) -> FuzzConfig {
        FuzzConfig { trials, seed: 3, order: 32, ..FuzzConfig::default() }
    }

    #[test]
    fn fuzz_is_deterministic_across_thread_counts() {
        let preset: Preset = find_preset("cor-3.3").unwrap();
        let a = fuzz_theorem(&preset, &FuzzConfig { threads: 1, ..small_config(6) }).unwrap();
        let b = fuzz_theorem(&preset, &FuzzConfig { threads: 3, ..small_config(6) }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.counts.total(), 6);
    }

    #[test]
    fn one_tiny_trial_confirms() {
        let preset = find_preset("cor-3.3").unwrap();
        let s = fuzz_theorem(&preset, &FuzzConfig { amplitude: 1e-12, ..small_config(1) }).unwrap();
        assert_eq!(s.counts.confirming, 1, "{s:?}");
        assert!(fuzz_theorem(&preset, &small_config(0)).is_err());
    }

    #[test]
    fn mix_seed_spreads() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
        assert_eq!(digest(b""), "cbf29ce484222325");
    }
}

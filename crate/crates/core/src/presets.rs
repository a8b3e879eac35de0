//! Named parameter sets: one per printed corollary, plus one each for the two
//! sandwich theorems and the Macovei lemma path.

use num_complex::Complex;
use serde::Serialize;

use crate::forms::{QFamilySpec, TheoremParams};
use crate::lashin::LashinParams;
use crate::verifier::TheoremId;
use crate::{Params, QSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub id: &'static str,
    pub theorem: TheoremId,
    /// The dominant; the upper dominant for the sandwich theorems.
    pub q: QSpec,
    /// The lower subordinant of the sandwich theorems.
    pub q_lower: Option<QSpec>,
    pub params: Params,
    pub note: &'static str,
}

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn base(alpha: f64, beta: f64) -> Params {
    TheoremParams::new(LashinParams::new(alpha, beta).expect("preset operator parameters are valid"))
}

fn subordination(lambda: f64, mu: f64, gamma: f64) -> Params {
    Params { lambda: c(lambda), mu: c(mu), gamma: c(gamma), ..base(1.5, 1.0) }
}

fn quadratic(mu: f64, gamma: f64, eta: f64, delta: f64) -> Params {
    Params { mu: c(mu), gamma: c(gamma), eta: c(eta), delta: c(delta), ..base(1.5, 1.0) }
}

fn linear(lambda: f64, mu: f64, m: f64, ell: f64) -> Params {
    Params { lambda: c(lambda), mu: c(mu), m: c(m), ell: c(ell), ..base(1.5, 1.0) }
}

/// Every registered preset, in listing order.
pub fn all_presets() -> Vec<Preset> {
    vec![
        Preset {
            id: "cor-3.2",
            theorem: TheoremId::T31,
            q: QFamilySpec::exponential(c(1.0)),
            q_lower: None,
            params: subordination(0.5, 1.0, 1.0),
            note: "exponential dominant, general lambda",
        },
        Preset {
            id: "cor-3.3",
            theorem: TheoremId::T31,
            q: QFamilySpec::exponential(c(1.0)),
            q_lower: None,
            params: subordination(1.0, 1.0, 1.0),
            note: "exponential dominant with tau = lambda = 1",
        },
        Preset {
            id: "cor-3.4",
            theorem: TheoremId::T31,
            q: QFamilySpec::half_plane_power(0.5),
            q_lower: None,
            params: subordination(1.0, 1.0, 1.0),
            note: "half-plane power dominant, lambda = 1",
        },
        Preset {
            id: "cor-3.6",
            theorem: TheoremId::T35,
            q: QFamilySpec::macovei(0.5),
            q_lower: None,
            params: quadratic(1.0, 0.5, 1.5, 0.2),
            note: "Moebius dominant (1+Az)/(1-Az)",
        },
        Preset {
            id: "cor-3.7",
            theorem: TheoremId::T35,
            q: QFamilySpec::exponential(c(1.0)),
            q_lower: None,
            params: quadratic(1.0, 0.5, 1.5, 0.2),
            note: "exponential dominant",
        },
        Preset {
            id: "cor-3.9",
            theorem: TheoremId::T38,
            q: QFamilySpec::half_plane_power(0.5),
            q_lower: None,
            params: linear(1.0, 1.0, -1.0, 1.0),
            note: "half-plane power dominant, lambda = 1; the printed convexity condition \
                   coincides with 1 + zq''/q' for this family",
        },
        Preset {
            id: "cor-3.10",
            theorem: TheoremId::T38,
            q: QFamilySpec::janowski(0.5, -0.5),
            q_lower: None,
            params: linear(1.0, 1.0, -1.0, 1.0),
            note: "Janowski dominant, lambda = 1",
        },
        Preset {
            id: "cor-4.2",
            theorem: TheoremId::T41,
            q: QFamilySpec::exponential(c(1.0)),
            q_lower: None,
            params: quadratic(1.0, 0.5, 1.5, 0.2),
            note: "exponential subordinant",
        },
        Preset {
            id: "cor-4.4",
            theorem: TheoremId::T43,
            q: QFamilySpec::janowski(0.5, -0.5),
            q_lower: None,
            params: linear(1.0, 1.0, -1.0, 1.0),
            note: "Janowski subordinant, lambda = 1; built from the general form, which \
                   carries (1 - ratio) where the corollary prints (1 + ratio)",
        },
        Preset {
            id: "cor-4.5",
            theorem: TheoremId::T43,
            q: QFamilySpec::half_plane_power(0.5),
            q_lower: None,
            params: linear(1.0, 1.0, -1.0, 1.0),
            note: "half-plane power subordinant, lambda = 1",
        },
        Preset {
            id: "thm-5.1",
            theorem: TheoremId::T51,
            q: QFamilySpec::macovei(0.8),
            q_lower: Some(QFamilySpec::macovei(0.2)),
            params: quadratic(1.0, 0.5, 1.5, 0.2),
            note: "nested Moebius pair",
        },
        Preset {
            id: "thm-5.2",
            theorem: TheoremId::T52,
            q: QFamilySpec::macovei(0.8),
            q_lower: Some(QFamilySpec::macovei(0.2)),
            params: linear(1.0, 1.0, -1.0, 1.0),
            note: "nested Moebius pair, lambda = 1",
        },
        Preset {
            id: "lem-2.6",
            theorem: TheoremId::L26,
            q: QFamilySpec::macovei(0.5),
            q_lower: None,
            params: Params { delta: c(0.5), eta: c(1.0), sigma: 0.8, ..base(1.5, 1.0) },
            note: "Macovei chain: its alpha, beta, sigma sit in the delta, eta, sigma slots",
        },
    ]
}

pub fn find_preset(id: &str) -> Option<Preset> {
    all_presets().into_iter().find(|p| p.id == id)
}

/// The first preset registered for a theorem.
pub fn default_preset(theorem: TheoremId) -> Preset {
    all_presets()
        .into_iter()
        .find(|p| p.theorem == theorem)
        .expect("every theorem has a preset")
}

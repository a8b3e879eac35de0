//! The Lashin integral operator `P^alpha_beta` on meromorphic series.
//!
//! On `f = z^{-1} + sum a_k z^k` the operator keeps the pole and multiplies
//! `a_k` by `(beta / (k + beta + 1))^alpha`. The multiplier is defined for
//! every real exponent, which is how `P^{alpha-1}` and `P^{alpha-2}` are
//! formed when `alpha < 2`.
//!
//! [`lashin_quadrature`] evaluates the integral definition directly and serves
//! as an independent check of the coefficient map.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::quadrature::GaussLaguerre;
use crate::scalar::{usize_lit, Cx, Scalar};
use crate::series::{AnalyticSeries, MeromorphicSeries};

/// Node count of the primary quadrature rule.
pub const QUADRATURE_NODES: usize = 96;
/// Node count of the refinement rule used for the error estimate.
pub const QUADRATURE_REFINED_NODES: usize = 128;
/// Largest accepted difference between the two rules.
pub const QUADRATURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LashinParams<T: Scalar> {
    alpha: T,
    beta: T,
}

impl<T: Scalar> LashinParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if alpha > T::zero() && beta > T::zero() && alpha.is_finite() && beta.is_finite() {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::InvalidParams { alpha: alpha.as_f64(), beta: beta.as_f64() })
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

/// `(beta / (k + beta + 1))^exponent`.
pub fn multiplier<T: Scalar>(k: usize, beta: T, exponent: T) -> T {
    (beta / (usize_lit::<T>(k) + beta + T::one())).powf(exponent)
}

/// Applies the coefficient map with an arbitrary real exponent.
pub fn apply_multiplier<T: Scalar>(f: &MeromorphicSeries<T>, beta: T, exponent: T) -> MeromorphicSeries<T> {
    let tail = f
        .tail()
        .iter()
        .enumerate()
        .map(|(i, &a)| a * multiplier(i + 1, beta, exponent))
        .collect();
    MeromorphicSeries::new(tail).expect("scaling keeps a finite non-empty tail")
}

pub fn apply_lashin<T: Scalar>(f: &MeromorphicSeries<T>, prm: &LashinParams<T>) -> MeromorphicSeries<T> {
    apply_multiplier(f, prm.beta, prm.alpha)
}

/// `z P^{exponent}_beta f(z)` as an analytic series of order at least `order`.
pub fn lashin_times_z<T: Scalar>(
    f: &MeromorphicSeries<T>,
    beta: T,
    exponent: T,
    order: usize,
) -> AnalyticSeries<T> {
    apply_multiplier(f, beta, exponent).times_z(order)
}

type RulePair = Arc<(GaussLaguerre, GaussLaguerre)>;

fn rules(alpha: f64) -> Result<RulePair> {
    static CACHE: OnceLock<Mutex<HashMap<u64, RulePair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(pair) = cache.lock().expect("rule cache poisoned").get(&alpha.to_bits()) {
        return Ok(pair.clone());
    }
    let build = |n| GaussLaguerre::new(n, alpha - 1.0).ok_or(Error::OracleUnstable(f64::INFINITY));
    let pair = Arc::new((build(QUADRATURE_NODES)?, build(QUADRATURE_REFINED_NODES)?));
    let mut guard = cache.lock().expect("rule cache poisoned");
    if guard.len() > 256 {
        guard.clear();
    }
    guard.insert(alpha.to_bits(), pair.clone());
    Ok(pair)
}

/// Evaluates `P^alpha_beta f(z)` from the integral definition.
///
/// With `t = z u` and `u = e^{-s}` the operator becomes
/// `(beta^alpha / Gamma(alpha)) int_0^inf s^{alpha-1} e^{-beta s} [e^{-s} f(z e^{-s})] ds`.
/// The bracket stays bounded (it tends to `1/z`), so after `x = beta s` a
/// Gauss-Laguerre rule for `x^{alpha-1} e^{-x}` integrates it directly.
/// Requires `1e-3 <= |z| <= 0.9`.
pub fn lashin_quadrature<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &LashinParams<T>,
    z: Cx<T>,
) -> Result<Cx<T>> {
    let modulus = z.norm().as_f64();
    if !(1e-3..=0.9).contains(&modulus) {
        return Err(Error::Domain { modulus, lower: 1e-3, upper: 0.9 });
    }
    let alpha = prm.alpha.as_f64();
    let beta = prm.beta.as_f64();
    let zf = Complex::new(z.re.as_f64(), z.im.as_f64());
    let tail: Vec<Complex<f64>> = f
        .tail()
        .iter()
        .map(|a| Complex::new(a.re.as_f64(), a.im.as_f64()))
        .collect();

    // e^{-s} f(z e^{-s}) = 1/z + sum a_k z^k e^{-(k+1) s}
    let bracket = |x: f64| -> Complex<f64> {
        let damp = (-x / beta).exp();
        let w = zf * damp;
        let poly = tail.iter().rev().fold(Complex::<f64>::zero(), |acc, &a| acc * w + a);
        zf.inv() + poly * w * damp
    };

    let pair = rules(alpha)?;
    let norm = gamma(alpha);
    let coarse_val: Complex<f64> = pair.0.integrate(bracket) / norm;
    let fine_val: Complex<f64> = pair.1.integrate(bracket) / norm;
    let estimate = (fine_val - coarse_val).norm();
    if !(estimate <= QUADRATURE_TOL) {
        return Err(Error::OracleUnstable(estimate));
    }
    Ok(Complex::new(T::lit(fine_val.re), T::lit(fine_val.im)))
}

/// Largest coefficient residual of `z (P^a f)' - beta P^{a-1} f + (beta+1) P^a f`,
/// pole coefficient included.
pub fn check_recurrence<T: Scalar>(f: &MeromorphicSeries<T>, prm: &LashinParams<T>) -> T {
    let beta = prm.beta;
    let upper = apply_multiplier(f, beta, prm.alpha);
    let lower = apply_multiplier(f, beta, prm.alpha - T::one());
    let beta_c = Cx::from(beta);
    let beta1_c = Cx::from(beta + T::one());

    // z (z^{-1})' = -z^{-1}; both operator images keep the pole coefficient 1.
    let pole = -Cx::<T>::one() - beta_c * Cx::one() + beta1_c * Cx::one();
    let mut worst = pole.norm();
    for k in 1..=f.order() {
        let kc = Cx::from(usize_lit::<T>(k));
        let r = kc * upper.coeff(k) - beta_c * lower.coeff(k) + beta1_c * upper.coeff(k);
        worst = worst.max(r.norm());
    }
    worst
}

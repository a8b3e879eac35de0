//! Composite expressions built from the operator: the base and its power,
//! the subordination left-hand sides, the dominant families and the
//! right-hand sides and hypothesis integrands derived from a dominant.
//!
//! All `f`-side builders work at [`working_order`], twice the truncation
//! order of `f`, so that ratios and powers keep their tails below sampling
//! noise on the 0.95-disk.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::disk::ser_cx;
use crate::error::{Error, Result};
use crate::lashin::{lashin_times_z, LashinParams};
use crate::scalar::{usize_lit, Cx, Scalar};
use crate::series::{linear_combine, AnalyticSeries, MeromorphicSeries, DIVIDE_FLOOR};

/// Largest order used when truncating a dominant family.
pub const MAX_DOMINANT_ORDER: usize = 2048;
/// Truncation of dominants stops once `n^2 |c_n| 0.95^n` drops below this.
pub const DOMINANT_TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremParams<T: Scalar> {
    pub alpha: T,
    pub beta: T,
    #[serde(serialize_with = "ser_cx")]
    pub lambda: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub mu: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub gamma: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub eta: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub delta: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub m: Cx<T>,
    #[serde(serialize_with = "ser_cx")]
    pub ell: Cx<T>,
    pub sigma: T,
}

impl<T: Scalar> TheoremParams<T> {
    /// Parameters with every optional slot neutral: `lambda = mu = gamma = eta = ell = 1`,
    /// `delta = m = 0`, `sigma = 1`.
    pub fn new(lashin: LashinParams<T>) -> Self {
        let one = Cx::one();
        Self {
            alpha: lashin.alpha(),
            beta: lashin.beta(),
            lambda: one,
            mu: one,
            gamma: one,
            eta: one,
            delta: Cx::zero(),
            m: Cx::zero(),
            ell: one,
            sigma: T::one(),
        }
    }

    pub fn lashin(&self) -> Result<LashinParams<T>> {
        LashinParams::new(self.alpha, self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        self.lashin()?;
        if self.mu.is_zero() || self.lambda.is_zero() {
            return Err(Error::Usage("mu and lambda must be non-zero".into()));
        }
        if !(self.sigma > T::zero() && self.sigma <= T::one()) {
            return Err(Error::Usage(format!("sigma = {} outside (0, 1]", self.sigma)));
        }
        let all = [self.lambda, self.mu, self.gamma, self.eta, self.delta, self.m, self.ell];
        if all.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Usage("non-finite parameter".into()));
        }
        Ok(())
    }
}

/// How the base expression `((1-l) z P^{a-1} f + l z P^a f) / l` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum BaseMode {
    /// Literal quotient by lambda; constant term `1/lambda`.
    AsWritten,
    /// `(1-l) z P^{a-1} f + l z P^a f`; constant term 1.
    #[default]
    ConvexCombination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QKind {
    Exponential,
    HalfPlanePower,
    MacoveiMobius,
    Janowski,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QFamilySpec<T: Scalar> {
    pub kind: QKind,
    #[serde(serialize_with = "ser_cx")]
    pub tau: Cx<T>,
    pub rho: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> QFamilySpec<T> {
    fn blank(kind: QKind) -> Self {
        Self { kind, tau: Cx::zero(), rho: T::one(), a: T::zero(), b: T::zero() }
    }

    /// `e^{tau z}`.
    pub fn exponential(tau: Cx<T>) -> Self {
        Self { tau, ..Self::blank(QKind::Exponential) }
    }

    /// `((1+z)/(1-z))^rho`.
    pub fn half_plane_power(rho: T) -> Self {
        Self { rho, ..Self::blank(QKind::HalfPlanePower) }
    }

    /// `(1+Az)/(1-Az)`.
    pub fn macovei(a: T) -> Self {
        Self { a, ..Self::blank(QKind::MacoveiMobius) }
    }

    /// `(1+Az)/(1+Bz)`.
    pub fn janowski(a: T, b: T) -> Self {
        Self { a, b, ..Self::blank(QKind::Janowski) }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            QKind::Exponential => self.tau.norm() <= T::one(),
            QKind::HalfPlanePower => self.rho > T::zero() && self.rho <= T::one(),
            QKind::MacoveiMobius => self.a > -T::one() && self.a < T::one() && self.a != T::zero(),
            QKind::Janowski => -T::one() <= self.b && self.b < self.a && self.a <= T::one(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Spec(format!("{self:?} violates the family's parameter range")))
        }
    }
}

/// Order at which `f`-side expressions are built.
pub fn working_order<T: Scalar>(f: &MeromorphicSeries<T>) -> usize {
    2 * (f.order() + 1)
}

/// `z P^{alpha - shift}_beta f(z)` at the working order.
pub fn shifted_times_z<T: Scalar>(f: &MeromorphicSeries<T>, prm: &TheoremParams<T>, shift: usize) -> AnalyticSeries<T> {
    lashin_times_z(f, prm.beta, prm.alpha - usize_lit::<T>(shift), working_order(f))
}

fn base_convex<T: Scalar>(f: &MeromorphicSeries<T>, prm: &TheoremParams<T>) -> Result<AnalyticSeries<T>> {
    let lower = shifted_times_z(f, prm, 1);
    let upper = shifted_times_z(f, prm, 0);
    linear_combine(&[(Cx::<T>::one() - prm.lambda, &lower), (prm.lambda, &upper)])
}

pub fn base_series<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &TheoremParams<T>,
    mode: BaseMode,
) -> Result<AnalyticSeries<T>> {
    let base = base_convex(f, prm)?;
    let base = match mode {
        BaseMode::ConvexCombination => base,
        BaseMode::AsWritten => base.scale(prm.lambda.inv()),
    };
    let c0 = base.coeff(0).norm();
    if !(c0 > T::lit(DIVIDE_FLOOR)) {
        return Err(Error::DegenerateBase(format!("base constant term {:e}", c0.as_f64())));
    }
    Ok(base)
}

/// `k = base^mu`. In as-written mode the constant `1/lambda` is split off
/// and raised separately with the principal branch.
pub fn k_series<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &TheoremParams<T>,
    mode: BaseMode,
) -> Result<AnalyticSeries<T>> {
    let unit = base_series(f, prm, BaseMode::ConvexCombination)?.complex_power(prm.mu)?;
    Ok(match mode {
        BaseMode::ConvexCombination => unit,
        BaseMode::AsWritten => unit.scale(prm.lambda.inv().powc(prm.mu)),
    })
}

/// `p = (z P^alpha f)^mu`.
pub fn p_series<T: Scalar>(f: &MeromorphicSeries<T>, prm: &TheoremParams<T>) -> Result<AnalyticSeries<T>> {
    shifted_times_z(f, prm, 0).complex_power(prm.mu)
}

/// Numerator and denominator of the three-level ratio, both multiplied by `z`:
/// `l P^a + (1-2l) P^{a-1} + (l-1) P^{a-2}` over `(l-1) P^{a-1} - l P^a`.
fn three_level<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &TheoremParams<T>,
) -> Result<(AnalyticSeries<T>, AnalyticSeries<T>)> {
    let p0 = shifted_times_z(f, prm, 0);
    let p1 = shifted_times_z(f, prm, 1);
    let p2 = shifted_times_z(f, prm, 2);
    let l = prm.lambda;
    let one = Cx::<T>::one();
    let two = one + one;
    let num = linear_combine(&[(l, &p0), (one - two * l, &p1), (l - one, &p2)])?;
    let den = linear_combine(&[(l - one, &p1), (-l, &p0)])?;
    Ok((num, den))
}

/// `1 + gamma beta mu N / D`, the left-hand side of the first theorem.
pub fn lhs_31<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &TheoremParams<T>,
    mode: BaseMode,
) -> Result<AnalyticSeries<T>> {
    base_series(f, prm, mode)?;
    let (num, den) = three_level(f, prm)?;
    let ratio = num.divide(&den)?;
    Ok(ratio.scale(prm.gamma * prm.mu * prm.beta).offset(Cx::one()))
}

/// `p (delta p + gamma mu beta (P^{a-1} f / P^a f - 1) + eta)`.
pub fn psi_series<T: Scalar>(f: &MeromorphicSeries<T>, prm: &TheoremParams<T>) -> Result<AnalyticSeries<T>> {
    let p = p_series(f, prm)?;
    let ratio = shifted_times_z(f, prm, 1).divide(&shifted_times_z(f, prm, 0))?;
    let bracket = linear_combine(&[(prm.delta, &p), (prm.gamma * prm.mu * prm.beta, &ratio)])?
        .offset(prm.eta - prm.gamma * prm.mu * prm.beta);
    Ok(p.multiply(&bracket))
}

/// `k [m + mu ell N / ((1-l) P^{a-1} + l P^a)]`.
pub fn phi_series<T: Scalar>(
    f: &MeromorphicSeries<T>,
    prm: &TheoremParams<T>,
    mode: BaseMode,
) -> Result<AnalyticSeries<T>> {
    if prm.ell.is_zero() {
        return Err(Error::Usage("ell must be non-zero".into()));
    }
    let k = k_series(f, prm, mode)?;
    let (num, den) = three_level(f, prm)?;
    let ratio = num.divide(&den.scale(-Cx::<T>::one()))?;
    let bracket = ratio.scale(prm.mu * prm.ell).offset(prm.m);
    Ok(k.multiply(&bracket))
}

fn raw_family<T: Scalar>(spec: &QFamilySpec<T>, order: usize) -> Vec<Cx<T>> {
    let mut c = vec![Cx::<T>::zero(); order + 1];
    c[0] = Cx::one();
    match spec.kind {
        QKind::Exponential => {
            for n in 1..=order {
                c[n] = c[n - 1] * spec.tau / usize_lit::<T>(n);
            }
        }
        QKind::HalfPlanePower => {
            // exp(rho log((1+z)/(1-z))), log = 2 sum_{odd n} z^n / n.
            let mut log = vec![Cx::<T>::zero(); order + 1];
            for n in (1..=order).step_by(2) {
                log[n] = Cx::from(T::lit(2.0) * spec.rho / usize_lit::<T>(n));
            }
            let log = AnalyticSeries::new(log, T::one()).expect("finite log series");
            return log.exp().coeffs().to_vec();
        }
        QKind::MacoveiMobius => {
            let mut pow = Cx::from(spec.a);
            for coeff in c.iter_mut().skip(1) {
                *coeff = pow * T::lit(2.0);
                pow = pow * spec.a;
            }
        }
        QKind::Janowski => {
            let diff = spec.a - spec.b;
            let mut pow = T::one();
            for coeff in c.iter_mut().skip(1) {
                *coeff = Cx::from(diff * pow);
                pow = pow * -spec.b;
            }
        }
    }
    c
}

/// The dominant family as a truncated series with `q(0) = 1`.
///
/// The order adapts to the family: it is the smallest order (at least 64)
/// beyond which `n^2 |c_n| 0.95^n` stays below `DOMINANT_TAIL_TOL`, capped at
/// `MAX_DOMINANT_ORDER`.
pub fn q_family<T: Scalar>(spec: &QFamilySpec<T>) -> Result<AnalyticSeries<T>> {
    spec.validate()?;
    let full = raw_family(spec, MAX_DOMINANT_ORDER);
    let r = T::lit(0.95);
    let tol = T::lit(DOMINANT_TAIL_TOL);
    let last = (0..full.len())
        .rev()
        .find(|&n| {
            let nf = usize_lit::<T>(n.max(1));
            nf * nf * full[n].norm() * r.powi(n as i32) >= tol
        })
        .unwrap_or(0);
    let order = (last + 1).clamp(64, MAX_DOMINANT_ORDER);
    AnalyticSeries::new(full[..=order].to_vec(), T::one())
}

/// Right-hand sides of the subordination chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RhsKind {
    /// `1 + gamma z q'/q`
    LogDeriv,
    /// `delta q^2 + eta q + gamma z q'`
    Quadratic,
    /// `m q - (ell/beta) z q'`
    Linear,
    /// `delta q^2 + eta q + sigma z q'` (the Macovei chain with its
    /// coefficients bound to the delta / eta / sigma slots)
    Macovei,
}

pub fn rhs_builder<T: Scalar>(kind: RhsKind, q: &AnalyticSeries<T>, prm: &TheoremParams<T>) -> Result<AnalyticSeries<T>> {
    let zq = q.z_derivative();
    match kind {
        RhsKind::LogDeriv => Ok(zq.divide(q)?.scale(prm.gamma).offset(Cx::one())),
        RhsKind::Quadratic | RhsKind::Macovei => {
            let weight = if kind == RhsKind::Quadratic { prm.gamma } else { Cx::from(prm.sigma) };
            let sq = q.multiply(q);
            linear_combine(&[(prm.delta, &sq), (prm.eta, q), (weight, &zq)])
        }
        RhsKind::Linear => {
            if prm.ell.is_zero() {
                return Err(Error::Usage("ell must be non-zero".into()));
            }
            linear_combine(&[(prm.m, q), (-prm.ell / prm.beta, &zq)])
        }
    }
}

/// Hypotheses of the form `Re(series) > bound` on the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HypothesisKind {
    /// `Re(z q''/q' - z q'/q + 1) > 0`
    LogDerivConvexity,
    /// `Re(eta/gamma + (2 delta/gamma) q) > 0`
    QuadraticWeight,
    /// `Re(1 + z q''/q') > 0`
    Convexity,
    /// `Re(1 + z q''/q') > max{0, Re(m beta / ell)}`
    LinearConvexity,
    /// `Re((eta/gamma + (2 delta/gamma) q) q') > 0`
    SuperordinationWeight,
}

fn convexity_series<T: Scalar>(q: &AnalyticSeries<T>) -> Result<AnalyticSeries<T>> {
    let d1 = q.differentiate();
    if d1.coeff(0).norm() <= T::lit(DIVIDE_FLOOR) {
        return Err(Error::DegenerateDerivative(d1.coeff(0).norm().as_f64()));
    }
    Ok(d1.z_derivative().divide(&d1)?.offset(Cx::one()))
}

/// The integrand and comparison bound of a hypothesis.
pub fn hypothesis_value<T: Scalar>(
    kind: HypothesisKind,
    q: &AnalyticSeries<T>,
    prm: &TheoremParams<T>,
) -> Result<(AnalyticSeries<T>, T)> {
    let zero = T::zero();
    match kind {
        HypothesisKind::LogDerivConvexity => {
            let conv = convexity_series(q)?;
            let logd = q.z_derivative().divide(q)?;
            Ok((conv.sub(&logd.resized(conv.order())), zero))
        }
        HypothesisKind::QuadraticWeight => {
            if prm.gamma.is_zero() {
                return Err(Error::Usage("gamma must be non-zero".into()));
            }
            let two = T::lit(2.0);
            Ok((q.scale(prm.delta * two / prm.gamma).offset(prm.eta / prm.gamma), zero))
        }
        HypothesisKind::Convexity => Ok((convexity_series(q)?, zero)),
        HypothesisKind::LinearConvexity => {
            if prm.ell.is_zero() {
                return Err(Error::Usage("ell must be non-zero".into()));
            }
            let bound = (prm.m * prm.beta / prm.ell).re.max(zero);
            Ok((convexity_series(q)?, bound))
        }
        HypothesisKind::SuperordinationWeight => {
            if prm.gamma.is_zero() {
                return Err(Error::Usage("gamma must be non-zero".into()));
            }
            let two = T::lit(2.0);
            let weight = q.scale(prm.delta * two / prm.gamma).offset(prm.eta / prm.gamma);
            Ok((weight.multiply(&q.differentiate()), zero))
        }
    }
}

/// The scalar precondition of the Macovei lemma, transcribed term for term:
/// `(2 a / s)(1+A)/(1-A) + (b / s)(1+A)/(1-A)`.
pub fn macovei_condition<T: Scalar>(a_coef: T, b_coef: T, sigma: T, a: T) -> T {
    let ratio = (T::one() + a) / (T::one() - a);
    T::lit(2.0) * a_coef / sigma * ratio + b_coef / sigma * ratio
}

/// Shrinks a dominant's range toward 1: `1 + factor (q - 1)`.
pub fn shrink_toward_one<T: Scalar>(q: &AnalyticSeries<T>, factor: T) -> AnalyticSeries<T> {
    q.scale(Complex::from(factor)).offset(Complex::from(T::one() - factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = AnalyticSeries<f64>;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn params(alpha: f64, beta: f64) -> TheoremParams<f64> {
        TheoremParams::new(LashinParams::new(alpha, beta).unwrap())
    }

    fn sample_f() -> MeromorphicSeries<f64> {
        MeromorphicSeries::new(vec![
            Complex::new(0.05, -0.02),
            c(0.02),
            Complex::new(-0.01, 0.01),
            c(0.004),
        ])
        .unwrap()
        .resized(16)
    }

    fn max_dev(a: &S, b: &S, r: f64) -> f64 {
        crate::series::circle_points(r, 64)
            .into_iter()
            .map(|z| (a.evaluate(z).unwrap() - b.evaluate(z).unwrap()).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn pole_gives_unit_base() {
        let f = MeromorphicSeries::<f64>::pole(8);
        let mut p = params(1.5, 2.0);
        p.lambda = c(0.3);
        let b = base_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        assert_eq!(b, S::one(b.order()));
        let k = k_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        assert!((k.coeff(0) - c(1.0)).norm() < 1e-15);
        assert!(k.coeffs()[1..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn lambda_one_modes_agree() {
        let f = sample_f();
        let p = params(2.0, 1.0);
        let a = base_series(&f, &p, BaseMode::AsWritten).unwrap();
        let b = base_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, shifted_times_z(&f, &p, 0));
    }

    #[test]
    fn as_written_constant_is_inverse_lambda() {
        let f = MeromorphicSeries::<f64>::pole(4);
        let mut p = params(1.0, 1.0);
        p.lambda = c(2.0);
        let b = base_series(&f, &p, BaseMode::AsWritten).unwrap();
        assert!((b.coeff(0) - c(0.5)).norm() < 1e-15);
        p.mu = c(1.5);
        let k = k_series(&f, &p, BaseMode::AsWritten).unwrap();
        assert!((k.coeff(0) - c(0.5f64.powf(1.5))).norm() < 1e-14);
    }

    #[test]
    fn k_with_unit_powers_is_the_base() {
        let f = sample_f();
        let p = params(1.2, 0.8);
        let k = k_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        let b = shifted_times_z(&f, &p, 0);
        for n in 0..=k.order() {
            assert!((k.coeff(n) - b.coeff(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn lhs_on_the_pole_is_one() {
        let f = MeromorphicSeries::<f64>::pole(6);
        let mut p = params(0.7, 1.3);
        p.lambda = Complex::new(0.4, 0.2);
        p.gamma = c(2.0);
        let lhs = lhs_31(&f, &p, BaseMode::ConvexCombination).unwrap();
        assert!((lhs.coeff(0) - c(1.0)).norm() < 1e-15);
        assert!(lhs.coeffs()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn lhs_lambda_one_matches_ratio_form() {
        let f = sample_f();
        let mut p = params(2.5, 1.5);
        p.gamma = c(0.8);
        p.mu = Complex::new(1.2, -0.3);
        let lhs = lhs_31(&f, &p, BaseMode::ConvexCombination).unwrap();
        let ratio = shifted_times_z(&f, &p, 1).divide(&shifted_times_z(&f, &p, 0)).unwrap();
        let expected = ratio
            .offset(c(-1.0))
            .scale(p.gamma * p.mu * p.beta)
            .offset(c(1.0));
        for n in 0..=lhs.order() {
            assert!((lhs.coeff(n) - expected.coeff(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn lhs_equals_log_derivative_form() {
        let f = sample_f();
        let mut p = params(0.8, 2.0);
        p.lambda = c(0.6);
        p.gamma = c(1.7);
        p.mu = c(0.9);
        let lhs = lhs_31(&f, &p, BaseMode::ConvexCombination).unwrap();
        let k = k_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        let other = k.z_derivative().divide(&k).unwrap().scale(p.gamma).offset(c(1.0));
        assert!(max_dev(&lhs, &other, 0.9) < 1e-9);
    }

    #[test]
    fn psi_examples() {
        let pole = MeromorphicSeries::<f64>::pole(6);
        let mut p = params(1.0, 1.0);
        p.delta = c(0.4);
        p.eta = c(1.1);
        p.gamma = c(0.7);
        let psi = psi_series(&pole, &p).unwrap();
        assert!((psi.coeff(0) - c(1.5)).norm() < 1e-15);
        assert!(psi.coeffs()[1..].iter().all(|v| v.norm() < 1e-15));

        let f = sample_f();
        let mut q = p;
        q.delta = c(0.0);
        q.gamma = c(0.0);
        let psi = psi_series(&f, &q).unwrap();
        let pf = p_series(&f, &q).unwrap().scale(q.eta);
        assert!(max_dev(&psi, &pf, 0.9) < 1e-14);

        let psi = psi_series(&f, &p).unwrap();
        let pf = p_series(&f, &p).unwrap();
        let other = linear_combine(&[(p.delta, &pf.multiply(&pf)), (p.eta, &pf), (p.gamma, &pf.z_derivative())]).unwrap();
        assert!(max_dev(&psi, &other, 0.95) < 1e-9);
    }

    #[test]
    fn phi_examples() {
        let pole = MeromorphicSeries::<f64>::pole(6);
        let mut p = params(1.4, 0.6);
        p.m = c(-2.0);
        p.ell = c(0.5);
        p.lambda = c(0.7);
        let phi = phi_series(&pole, &p, BaseMode::ConvexCombination).unwrap();
        assert!((phi.coeff(0) - c(-2.0)).norm() < 1e-14);
        assert!(phi.coeffs()[1..].iter().all(|v| v.norm() < 1e-14));

        let f = sample_f();
        let phi = phi_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        let k = k_series(&f, &p, BaseMode::ConvexCombination).unwrap();
        let other = linear_combine(&[(p.m, &k), (-p.ell / p.beta, &k.z_derivative())]).unwrap();
        assert!(max_dev(&phi, &other, 0.95) < 1e-9);

        p.ell = c(0.0);
        assert!(phi_series(&f, &p, BaseMode::ConvexCombination).is_err());
    }

    #[test]
    fn q_family_examples() {
        let e = q_family(&QFamilySpec::exponential(c(0.0))).unwrap();
        assert_eq!(e.coeff(0), c(1.0));
        assert!(e.coeffs()[1..].iter().all(|v| v.norm() == 0.0));

        let h = q_family(&QFamilySpec::half_plane_power(1.0)).unwrap();
        for n in 1..40 {
            assert!((h.coeff(n) - c(2.0)).norm() < 1e-12, "n = {n}: {}", h.coeff(n));
        }

        let j = q_family(&QFamilySpec::janowski(0.5, -0.5)).unwrap();
        assert!((j.evaluate(c(0.5)).unwrap() - c(5.0 / 3.0)).norm() < 1e-12);

        let m = q_family(&QFamilySpec::macovei(-0.4)).unwrap();
        let z = Complex::new(0.3, 0.6);
        let want = (c(1.0) - z * 0.4) / (c(1.0) + z * 0.4);
        assert!((m.evaluate(z).unwrap() - want).norm() < 1e-13);

        let e = q_family(&QFamilySpec::exponential(Complex::new(0.6, 0.8))).unwrap();
        let want = (Complex::new(0.6, 0.8) * z).exp();
        assert!((e.evaluate(z).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn q_family_rejects_bad_specs() {
        assert!(q_family(&QFamilySpec::exponential(c(1.5))).is_err());
        assert!(q_family(&QFamilySpec::half_plane_power(0.0)).is_err());
        assert!(q_family(&QFamilySpec::half_plane_power(1.2)).is_err());
        assert!(q_family(&QFamilySpec::macovei(0.0)).is_err());
        assert!(q_family(&QFamilySpec::macovei(1.0)).is_err());
        assert!(q_family(&QFamilySpec::janowski(0.2, 0.5)).is_err());
        assert!(q_family(&QFamilySpec::janowski(0.5, -1.5)).is_err());
    }

    #[test]
    fn half_plane_power_stays_in_sector() {
        let rho = 0.6;
        let q = q_family(&QFamilySpec::half_plane_power(rho)).unwrap();
        let bound = rho * std::f64::consts::FRAC_PI_2;
        for r in [0.3, 0.7, 0.95] {
            for v in q.sample_circle(r, 512).unwrap() {
                assert!(v.arg().abs() < bound);
            }
        }
        let z = Complex::new(-0.2, 0.9);
        let want = ((c(1.0) + z) / (c(1.0) - z)).powc(c(rho));
        assert!((q.evaluate(z).unwrap() - want).norm() < 1e-10);
    }

    #[test]
    fn rhs_examples() {
        let mut p = params(1.0, 1.0);
        p.gamma = c(0.7);
        let tau = c(0.8);
        let q = q_family(&QFamilySpec::exponential(tau)).unwrap();
        let r = rhs_builder(RhsKind::LogDeriv, &q, &p).unwrap();
        assert!((r.coeff(1) - p.gamma * tau).norm() < 1e-14);
        assert!(r.coeffs()[2..].iter().all(|v| v.norm() < 1e-14));

        let rho = 0.5;
        let q = q_family(&QFamilySpec::half_plane_power(rho)).unwrap();
        let r = rhs_builder(RhsKind::LogDeriv, &q, &p).unwrap();
        let z = Complex::new(0.4, -0.5);
        let want = c(1.0) + p.gamma * z * 2.0 * rho / (c(1.0) - z * z);
        assert!((r.evaluate(z).unwrap() - want).norm() < 1e-10);

        p.delta = c(0.3);
        p.eta = c(0.9);
        let r = rhs_builder(RhsKind::Quadratic, &S::one(8), &p).unwrap();
        assert!((r.coeff(0) - c(1.2)).norm() < 1e-15);
    }

    #[test]
    fn hypothesis_examples() {
        let mut p = params(1.0, 1.0);
        let tau = Complex::new(0.3, 0.5);
        let q = q_family(&QFamilySpec::exponential(tau)).unwrap();
        let (s, bound) = hypothesis_value(HypothesisKind::LogDerivConvexity, &q, &p).unwrap();
        assert_eq!(bound, 0.0);
        assert!((s.coeff(0) - c(1.0)).norm() < 1e-14);
        assert!(s.coeffs()[1..].iter().all(|v| v.norm() < 1e-12));

        let a = 0.6;
        let q = q_family(&QFamilySpec::macovei(a)).unwrap();
        let (s, _) = hypothesis_value(HypothesisKind::Convexity, &q, &p).unwrap();
        let z = Complex::new(-0.5, 0.3);
        assert!((s.evaluate(z).unwrap() - (c(1.0) + z * a) / (c(1.0) - z * a)).norm() < 1e-12);

        p.delta = c(0.0);
        p.eta = c(1.5);
        p.gamma = c(0.5);
        let (s, _) = hypothesis_value(HypothesisKind::QuadraticWeight, &q, &p).unwrap();
        assert!((s.coeff(0) - c(3.0)).norm() < 1e-15);
        assert!(s.coeffs()[1..].iter().all(|v| v.norm() == 0.0));

        p.m = c(1.0);
        p.ell = c(1.0);
        let (_, bound) = hypothesis_value(HypothesisKind::LinearConvexity, &q, &p).unwrap();
        assert_eq!(bound, 1.0);
        p.m = c(-1.0);
        let (_, bound) = hypothesis_value(HypothesisKind::LinearConvexity, &q, &p).unwrap();
        assert_eq!(bound, 0.0);
    }

    #[test]
    fn macovei_condition_transcription() {
        let v: f64 = macovei_condition(1.0, 2.0, 0.5, 0.5);
        assert!((v - (4.0 * 3.0 + 4.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn shrink_moves_toward_one() {
        let q = S::from_real(&[1.0, 2.0, 2.0]).unwrap();
        let s = shrink_toward_one(&q, 0.5);
        assert_eq!(s.coeffs(), &[c(1.0), c(1.0), c(1.0)]);
    }
}

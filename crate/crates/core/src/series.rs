//! Truncated power series with complex coefficients.
//!
//! [`AnalyticSeries`] stores `c_0..c_K` densely, lowest order first, together
//! with the radius inside which evaluation is permitted. [`MeromorphicSeries`]
//! stores the tail `a_1..a_K` of `z^{-1} + sum a_k z^k`; the pole coefficient
//! is implicit and always 1.
//!
//! Binary operations pad the shorter operand with zeros, so the result has the
//! larger truncation order and the smaller validity radius.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, usize_lit, Cx, Scalar};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
/// Smallest admissible `|s2(0)|` in [`AnalyticSeries::divide`].
pub const DIVIDE_FLOOR: f64 = 1e-8;
/// Allowed distance of a power base's constant term from 1.
pub const POWER_BASE_TOL: f64 = 1e-9;
/// Smallest `|z|` at which a meromorphic series may be evaluated.
/// Circle on which inner functions are checked to map into the disk.
pub const SCHWARZ_CHECK_RADIUS: f64 = 0.95;
pub const POLE_GUARD: f64 = 1e-3;

const RADIUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSeries<T: Scalar> {
    coeffs: Vec<Cx<T>>,
    radius: T,
}

impl<T: Scalar> AnalyticSeries<T> {
    /// Builds a series from `c_0..c_K`; needs `K >= 1`, finite coefficients and
    /// a validity radius in `(0, 1]`.
    pub fn new(coeffs: Vec<Cx<T>>, radius: T) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "truncation order must be at least 1, got {} coefficient(s)",
                coeffs.len()
            )));
        }
        if let Some(n) = coeffs.iter().position(|c| !is_finite(c)) {
            return Err(Error::InvalidSeries(format!("coefficient {n} is not finite")));
        }
        if !(radius > T::zero() && radius <= T::one()) {
            return Err(Error::InvalidSeries(format!(
                "validity radius {radius} outside (0, 1]"
            )));
        }
        Ok(Self { coeffs, radius })
    }

    /// Real coefficients, radius 1.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| Complex::new(T::lit(c), T::zero())).collect(),
            T::one(),
        )
    }

    pub fn constant(value: Cx<T>, order: usize) -> Self {
        let mut coeffs = vec![Cx::zero(); order.max(1) + 1];
        coeffs[0] = value;
        Self { coeffs, radius: T::one() }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Cx::one(), order)
    }

    /// The identity map `z`.
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![Cx::zero(); order.max(1) + 1];
        coeffs[1] = Cx::one();
        Self { coeffs, radius: T::one() }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Coefficient `n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Cx<T> {
        self.coeffs.get(n).copied().unwrap_or_else(Cx::zero)
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn with_radius(mut self, radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius <= T::one()) {
            return Err(Error::InvalidSeries(format!(
                "validity radius {radius} outside (0, 1]"
            )));
        }
        self.radius = radius;
        Ok(self)
    }

    /// Zero-pads (or truncates) to order `order`.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(1) + 1, Cx::zero());
        Self { coeffs, radius: self.radius }
    }

    fn map_coeffs(&self, f: impl Fn(usize, Cx<T>) -> Cx<T>) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(n, &c)| f(n, c)).collect(),
            radius: self.radius,
        }
    }

    pub fn scale(&self, factor: Cx<T>) -> Self {
        self.map_coeffs(|_, c| c * factor)
    }

    /// Adds a constant to `c_0`.
    pub fn offset(&self, value: Cx<T>) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + value;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        linear_combine(&[(Cx::one(), self), (Cx::one(), other)])
            .expect("two-term combination is never empty")
    }

    pub fn sub(&self, other: &Self) -> Self {
        linear_combine(&[(Cx::one(), self), (-Cx::<T>::one(), other)])
            .expect("two-term combination is never empty")
    }

    /// Cauchy product truncated at the larger order.
    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order().max(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let mut out = vec![Cx::zero(); order + 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j] + ai * bj;
            }
        }
        Self { coeffs: out, radius: self.radius.min(other.radius) }
    }

    /// Series quotient `self / other`.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        let order = self.order().max(other.order());
        let b0 = other.coeffs[0];
        if b0.norm() <= T::lit(DIVIDE_FLOOR) {
            return Err(Error::DegenerateDivision(b0.norm().as_f64()));
        }
        let inv_b0 = b0.inv();
        let mut out: Vec<Cx<T>> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.coeff(n);
            for j in 1..=n.min(other.order()) {
                acc = acc - other.coeffs[j] * out[n - j];
            }
            out.push(acc * inv_b0);
        }
        Ok(Self { coeffs: out, radius: self.radius.min(other.radius) })
    }

    /// Term-wise derivative; the output has order `K - 1`.
    pub fn differentiate(&self) -> Self {
        let mut coeffs: Vec<Cx<T>> = (1..self.coeffs.len())
            .map(|n| self.coeffs[n] * usize_lit::<T>(n))
            .collect();
        if coeffs.len() < 2 {
            coeffs.resize(2, Cx::zero());
        }
        Self { coeffs, radius: self.radius }
    }

    /// `z * s'(z)` at the same order as `s`.
    pub fn z_derivative(&self) -> Self {
        self.map_coeffs(|n, c| c * usize_lit::<T>(n))
    }

    /// `z * s(z)`, keeping the truncation order.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Cx::zero());
        coeffs.extend_from_slice(&self.coeffs[..self.order()]);
        Self { coeffs, radius: self.radius }
    }

    /// `s(z) / z` for a series with `s(0) = 0`; the top coefficient becomes zero.
    pub fn div_z(&self) -> Result<Self> {
        if self.coeffs[0].norm() > T::lit(DIVIDE_FLOOR) {
            return Err(Error::DegenerateDivision(self.coeffs[0].norm().as_f64()));
        }
        let mut coeffs = self.coeffs[1..].to_vec();
        coeffs.push(Cx::zero());
        Ok(Self { coeffs, radius: self.radius })
    }

    /// Principal power `s^mu` for a series with `s(0) = 1`.
    ///
    /// Uses the recurrence `s_0 w_n = (1/n) sum_{k=1..n} (mu k - (n - k)) s_k w_{n-k}`
    /// which is the coefficient form of `s w' = mu s' w`.
    pub fn complex_power(&self, mu: Cx<T>) -> Result<Self> {
        let s0 = self.coeffs[0];
        if (s0 - Cx::one()).norm() > T::lit(POWER_BASE_TOL) {
            return Err(Error::BranchRisk { re: s0.re.as_f64(), im: s0.im.as_f64() });
        }
        let order = self.order();
        let mut w: Vec<Cx<T>> = Vec::with_capacity(order + 1);
        w.push((mu * s0.ln()).exp());
        let inv_s0 = s0.inv();
        for n in 1..=order {
            let nf = usize_lit::<T>(n);
            let mut acc = Cx::<T>::zero();
            for k in 1..=n {
                let kf = usize_lit::<T>(k);
                let weight = mu * kf - Cx::from(nf - kf);
                acc = acc + self.coeffs[k] * w[n - k] * weight;
            }
            w.push(acc * inv_s0 / nf);
        }
        Ok(Self { coeffs: w, radius: self.radius })
    }

    /// Principal logarithm for a series with `s(0) = 1`.
    pub fn log(&self) -> Result<Self> {
        let s0 = self.coeffs[0];
        if (s0 - Cx::one()).norm() > T::lit(POWER_BASE_TOL) {
            return Err(Error::BranchRisk { re: s0.re.as_f64(), im: s0.im.as_f64() });
        }
        let order = self.order();
        let mut out: Vec<Cx<T>> = Vec::with_capacity(order + 1);
        out.push(s0.ln());
        for n in 1..=order {
            let nf = usize_lit::<T>(n);
            let mut acc = self.coeffs[n] * nf;
            for k in 1..n {
                acc = acc - out[k] * self.coeffs[n - k] * usize_lit::<T>(k);
            }
            out.push(acc / (s0 * nf));
        }
        Ok(Self { coeffs: out, radius: self.radius })
    }

    /// `exp(s)` as a truncated series.
    pub fn exp(&self) -> Self {
        let order = self.order();
        let mut out: Vec<Cx<T>> = Vec::with_capacity(order + 1);
        out.push(self.coeffs[0].exp());
        for n in 1..=order {
            let mut acc = Cx::zero();
            for k in 1..=n {
                acc = acc + self.coeffs[k] * out[n - k] * usize_lit::<T>(k);
            }
            out.push(acc / usize_lit::<T>(n));
        }
        Self { coeffs: out, radius: self.radius }
    }

    /// Horner evaluation; `|z|` must not exceed the validity radius.
    pub fn evaluate(&self, z: Cx<T>) -> Result<Cx<T>> {
        let modulus = z.norm();
        if !(modulus <= self.radius * (T::one() + T::lit(RADIUS_SLACK))) {
            return Err(Error::Domain {
                modulus: modulus.as_f64(),
                lower: 0.0,
                upper: self.radius.as_f64(),
            });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::zero(), |acc, &c| acc * z + c)
    }

    /// Values at `r e^{2 pi i j / n}`, `j = 0..n`.
    pub fn sample_circle(&self, r: T, n: usize) -> Result<Vec<Cx<T>>> {
        if n == 0 {
            return Err(Error::InvalidSeries("sample count must be positive".into()));
        }
        if !(r > T::zero() && r <= self.radius * (T::one() + T::lit(RADIUS_SLACK))) {
            return Err(Error::Domain {
                modulus: r.as_f64(),
                lower: 0.0,
                upper: self.radius.as_f64(),
            });
        }
        Ok(circle_points(r, n)
            .into_iter()
            .map(|z| self.eval_unchecked(z))
            .collect())
    }

    /// Truncated composition `self(w(z))` for a Schwarz-type inner function.
    ///
    /// `w(0)` must vanish and `max |w|` on `|z| = min(w.radius(), 0.95)`
    /// (256 samples) must stay below 1. The result has the larger of the two orders and the
    /// radius of `w`.
    pub fn compose_schwarz(&self, w: &Self) -> Result<Self> {
        if w.coeffs[0].norm() > T::lit(1e-12) {
            return Err(Error::NotSchwarz(format!(
                "w(0) = {} + {}i",
                w.coeffs[0].re, w.coeffs[0].im
            )));
        }
        let peak = w
            .sample_circle(w.radius.min(T::lit(SCHWARZ_CHECK_RADIUS)), 256)?
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max);
        if !(peak < T::one()) {
            return Err(Error::NotSchwarz(format!("max |w| = {peak} on the validity circle")));
        }
        let order = self.order().max(w.order());
        let inner = w.resized(order);
        let mut acc = Self::constant(self.coeff(order), order);
        for k in (0..order).rev() {
            acc = acc.multiply(&inner).offset(self.coeff(k));
        }
        acc.radius = w.radius;
        Ok(acc)
    }

    /// Maximum of `|c_k| r^k` over the last `window` coefficients; a cheap
    /// estimate of the truncation error at radius `r`.
    pub fn tail_magnitude(&self, r: T, window: usize) -> T {
        let k = self.order();
        let start = k.saturating_sub(window.max(1) - 1);
        (start..=k)
            .map(|n| self.coeffs[n].norm() * r.powi(n as i32))
            .fold(T::zero(), T::max)
    }
}

/// Points `r e^{2 pi i j / n}`, `j = 0..n`.
pub fn circle_points<T: Scalar>(r: T, n: usize) -> Vec<Cx<T>> {
    let step = T::TAU() / usize_lit::<T>(n);
    (0..n)
        .map(|j| Complex::from_polar(r, step * usize_lit::<T>(j)))
        .collect()
}

/// Coefficient-wise weighted sum; shorter terms are zero-padded.
pub fn linear_combine<T: Scalar>(terms: &[(Cx<T>, &AnalyticSeries<T>)]) -> Result<AnalyticSeries<T>> {
    let order = terms
        .iter()
        .map(|(_, s)| s.order())
        .max()
        .ok_or(Error::EmptyCombination)?;
    let radius = terms.iter().map(|(_, s)| s.radius).fold(T::one(), T::min);
    let mut coeffs = vec![Cx::zero(); order + 1];
    for (weight, s) in terms {
        for (out, &c) in coeffs.iter_mut().zip(&s.coeffs) {
            *out = *out + *weight * c;
        }
    }
    Ok(AnalyticSeries { coeffs, radius })
}

/// `z^{-1} + sum_{k=1..K} a_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicSeries<T: Scalar> {
    tail: Vec<Cx<T>>,
}

impl<T: Scalar> MeromorphicSeries<T> {
    /// Builds from `a_1..a_K`, `K >= 1`.
    pub fn new(tail: Vec<Cx<T>>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::InvalidSeries("meromorphic tail needs K >= 1".into()));
        }
        if let Some(n) = tail.iter().position(|c| !is_finite(c)) {
            return Err(Error::InvalidSeries(format!("tail coefficient a_{} is not finite", n + 1)));
        }
        Ok(Self { tail })
    }

    /// The pure pole `z^{-1}` with a zero tail of order `order`.
    pub fn pole(order: usize) -> Self {
        Self { tail: vec![Cx::zero(); order.max(1)] }
    }

    pub fn order(&self) -> usize {
        self.tail.len()
    }

    /// `a_1..a_K`.
    pub fn tail(&self) -> &[Cx<T>] {
        &self.tail
    }

    /// `a_k` for `k >= 1`, zero beyond `K`.
    pub fn coeff(&self, k: usize) -> Cx<T> {
        assert!(k >= 1, "meromorphic tail starts at k = 1");
        self.tail.get(k - 1).copied().unwrap_or_else(Cx::zero)
    }

    pub fn resized(&self, order: usize) -> Self {
        let mut tail = self.tail.clone();
        tail.resize(order.max(1), Cx::zero());
        Self { tail }
    }

    pub fn scale_tail(&self, factor: Cx<T>) -> Self {
        Self { tail: self.tail.iter().map(|&a| a * factor).collect() }
    }

    /// Evaluates at `POLE_GUARD <= |z| <= 1`.
    pub fn evaluate(&self, z: Cx<T>) -> Result<Cx<T>> {
        let modulus = z.norm();
        let guard = T::lit(POLE_GUARD);
        if !(modulus >= guard && modulus <= T::one() + T::lit(RADIUS_SLACK)) {
            return Err(Error::Domain { modulus: modulus.as_f64(), lower: POLE_GUARD, upper: 1.0 });
        }
        let poly = self
            .tail
            .iter()
            .rev()
            .fold(Cx::<T>::zero(), |acc, &a| acc * z + a);
        Ok(z.inv() + poly * z)
    }

    /// `z f(z) = 1 + sum a_k z^{k+1}` as an analytic series of order
    /// `max(order, K + 1)`.
    pub fn times_z(&self, order: usize) -> AnalyticSeries<T> {
        let order = order.max(self.order() + 1);
        let mut coeffs = vec![Cx::zero(); order + 1];
        coeffs[0] = Cx::one();
        for (k, &a) in self.tail.iter().enumerate() {
            coeffs[k + 2] = a;
        }
        AnalyticSeries { coeffs, radius: T::one() }
    }
}

/// Inverse of [`MeromorphicSeries::times_z`]: reads `a_k` from coefficient
/// `k + 1` of `z f(z)`. The constant term must be 1 and the linear term 0.
pub fn meromorphic_from_times_z<T: Scalar>(zf: &AnalyticSeries<T>) -> Result<MeromorphicSeries<T>> {
    let tol = T::lit(POWER_BASE_TOL);
    if (zf.coeffs[0] - Cx::one()).norm() > tol || zf.coeff(1).norm() > tol {
        return Err(Error::InvalidSeries("z f(z) must start 1 + 0 z".into()));
    }
    if zf.order() < 2 {
        return Err(Error::InvalidSeries("z f(z) needs order >= 2".into()));
    }
    MeromorphicSeries::new(zf.coeffs[2..].to_vec())
}

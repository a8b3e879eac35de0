//! Generalized Gauss-Laguerre quadrature for `int_0^inf x^a e^{-x} g(x) dx`.

use crate::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl GaussLaguerre {
    /// Nodes and weights of the `n`-point rule for weight `x^alpha e^{-x}`,
    /// `alpha > -1`. Eigenvalues of the Jacobi matrix seed a Newton polish on
    /// the three-term recurrence.
    pub fn new(n: usize, alpha: f64) -> Option<Self> {
        if n < 2 || !(alpha > -1.0) || !alpha.is_finite() {
            return None;
        }
        let nf = n as f64;
        let mut seeds = jacobi_eigenvalues(n, alpha)?;
        seeds.sort_by(|a, b| a.total_cmp(b));
        let log_scale = ln_gamma(alpha + nf) - ln_gamma(nf);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for mut z in seeds {
            for _ in 0..8 {
                let (p, pp, _) = laguerre(n, alpha, z);
                let step = p / pp;
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.abs() <= 1e-16 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, pp, p2) = laguerre(n, alpha, z);
            let w = -(log_scale.exp()) / (pp * nf * p2);
            if !(z.is_finite() && z > 0.0 && w.is_finite() && w >= 0.0) {
                return None;
            }
            nodes.push(z);
            weights.push(w);
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        Some(Self { nodes, weights, alpha })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<V, F>(&self, mut g: F) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V> + Default,
        F: FnMut(f64) -> V,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(V::default(), |acc, (&x, &w)| acc + g(x) * w)
    }
}

/// Eigenvalues of the symmetric tridiagonal Jacobi matrix of the weight,
/// by implicit QL with Wilkinson shifts.
fn jacobi_eigenvalues(n: usize, alpha: f64) -> Option<Vec<f64>> {
    let mut d: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let mut e: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { ((i as f64 + 1.0) * (i as f64 + 1.0 + alpha)).sqrt() } else { 0.0 })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return None;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Some(d)
}

/// Returns `(L_n(x), L_n'(x), L_{n-1}(x))` for the generalized Laguerre
/// polynomial with parameter `alpha`.
fn laguerre(n: usize, alpha: f64, x: f64) -> (f64, f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 + alpha - x) * p2 - (jf - 1.0 + alpha) * p3) / jf;
    }
    let nf = n as f64;
    let pp = (nf * p1 - (nf + alpha) * p2) / x;
    (p1, pp, p2)
}

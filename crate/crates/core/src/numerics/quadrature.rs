use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of a Gauss–Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre rule of `order` points on `[a, b]`, exact for polynomials
/// of degree `2 * order - 1`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(2..=512).contains(&order) {
        return Err(Error::Domain(format!(
            "Gauss-Legendre order {order} outside [2, 512]"
        )));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    let (unit_nodes, unit_weights) = unit_rule(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: unit_nodes.iter().map(|&x| mid + half * x).collect(),
        weights: unit_weights.iter().map(|&w| half * w).collect(),
        order,
    })
}

/// Newton iteration on `P_n` from the Tricomi initial guesses.
fn unit_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // descending x for i; store ascending
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equal-weight sum `(2pi/n) * sum f(2pi k/n)` for a 2pi-periodic integrand.
pub fn periodic_trapezoid<F>(mut f: F, n_points: usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if n_points < 8 {
        return Err(Error::Domain(format!(
            "periodic trapezoid needs at least 8 points, got {n_points}"
        )));
    }
    let h = 2.0 * PI / n_points as f64;
    let sum: Complex64 = (0..n_points).map(|k| f(k as f64 * h)).sum();
    Ok(sum * h)
}

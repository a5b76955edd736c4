use crate::error::{Error, Result};

/// Largest radial order accepted. The binomials of the finite sum stay exact
/// in `f64` well past this, but nothing in the link model needs more.
pub const MAX_ORDER: u32 = 12;

/// Associated Laguerre polynomial `L_p^alpha` stored as its power-series
/// coefficients, so repeated evaluation inside field integrals is a Horner
/// pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Laguerre {
    order: u32,
    alpha: u32,
    coeffs: Vec<f64>,
}

impl Laguerre {
    pub fn new(order: u32, alpha: u32) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Domain(format!(
                "Laguerre order {order} exceeds guard {MAX_ORDER}"
            )));
        }
        let p = order as usize;
        let n = (order + alpha) as usize;
        // c_m = (-1)^m / m! * C(p + alpha, p - m)
        let coeffs = (0..=p)
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(n, p - m) / factorial(m)
            })
            .collect();
        Ok(Self {
            order,
            alpha,
            coeffs,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// `L_p^alpha(x)` by the explicit finite sum.
pub fn laguerre(p: u32, alpha: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Laguerre argument {x} is not finite")));
    }
    Ok(Laguerre::new(p, alpha)?.eval(x))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

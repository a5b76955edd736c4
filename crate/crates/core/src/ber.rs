//! Error probability of two OOK streams under joint ML detection.
//!
//! The receiver sees `y = h1 a1 + h2 a2 + n` with `a_i` in {0, 1} and real
//! Gaussian noise of variance `N0` per filter branch. Summing the pairwise
//! error terms over the four equally likely hypotheses gives
//!
//! ```text
//! P = Q(|h1|/2s) + Q(|h2|/2s) + Q(|h1+h2|/2s)/2 + Q(|h1-h2|/2s)/2,   s = sqrt(N0)
//! ```
//!
//! This is a union bound on the vector (symbol-interval) error probability,
//! so it can exceed one: its ceiling is 1.5. [`clamped`] caps it at 0.5 for
//! plotting.

use rayon::prelude::*;

use crate::beam::{LinkGeometry, ModeSet, PointingState};
use crate::crosstalk::{CrosstalkMatrix, CrosstalkModel, Method, ReceiverConfig, Status};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, q_function};

/// Rayleigh support is truncated at this many `sigma_r`; the mass beyond
/// is `exp(-32)`.
pub const TAIL_SIGMAS: f64 = 8.0;

/// Tracking jitter and the radial offset law it induces at the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingStats {
    pub sigma_theta: f64,
    pub distance: f64,
}

impl PointingStats {
    pub fn new(sigma_theta: f64, distance: f64) -> Result<Self> {
        if !(sigma_theta.is_finite() && sigma_theta > 0.0) {
            return Err(Error::Domain(format!(
                "sigma_theta must be positive, got {sigma_theta}"
            )));
        }
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::Domain(format!(
                "distance must be positive, got {distance}"
            )));
        }
        Ok(Self {
            sigma_theta,
            distance,
        })
    }

    /// `sigma_r = sigma_theta Z`.
    pub fn rayleigh_scale(&self) -> f64 {
        self.sigma_theta * self.distance
    }

    pub fn pdf(&self, r: f64) -> f64 {
        let s2 = self.rayleigh_scale().powi(2);
        r / s2 * (-r * r / (2.0 * s2)).exp()
    }

    /// `P(r_ch < r)`.
    pub fn cdf(&self, r: f64) -> f64 {
        let s2 = self.rayleigh_scale().powi(2);
        -(-r * r / (2.0 * s2)).exp_m1()
    }

    /// Rayleigh mass beyond the integration cutoff.
    pub fn tail_mass(&self) -> f64 {
        (-0.5 * TAIL_SIGMAS * TAIL_SIGMAS).exp()
    }
}

/// Amplitude signatures of the two data streams across the filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVectors {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

impl ChannelVectors {
    pub fn new(h1: Vec<f64>, h2: Vec<f64>) -> Result<Self> {
        if h1.len() != h2.len() || h1.is_empty() {
            return Err(Error::Dimension {
                expected: "two vectors of equal, nonzero length".into(),
                found: format!("{} and {}", h1.len(), h2.len()),
            });
        }
        if h1.iter().chain(&h2).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("channel amplitudes must be finite and >= 0".into()));
        }
        Ok(Self { h1, h2 })
    }

    /// Filter-bank dimension.
    pub fn dim(&self) -> usize {
        self.h1.len()
    }
}

/// Columns of the element-wise square root of a 2 x 2 crosstalk matrix.
pub fn channel_vectors(m: &CrosstalkMatrix) -> Result<ChannelVectors> {
    if m.n_tx() != 2 || m.n_filters() != 2 {
        return Err(Error::Dimension {
            expected: "2 x 2".into(),
            found: format!("{} x {}", m.n_filters(), m.n_tx()),
        });
    }
    ChannelVectors::new(m.column(0), m.column(1))
}

/// Per-mode amplitude weights that give each stream unit power.
pub fn equal_power_weights(grouping: &[Vec<i32>]) -> Vec<Vec<f64>> {
    grouping
        .iter()
        .map(|g| vec![1.0 / (g.len() as f64).sqrt(); g.len()])
        .collect()
}

/// Stream signatures when each stream drives several transmit modes:
/// `h_s = sum over modes in s of weight * sqrt(C column)`.
pub fn grouped_channel_vectors(
    m: &CrosstalkMatrix,
    grouping: &[Vec<i32>],
    power_split: &[Vec<f64>],
) -> Result<ChannelVectors> {
    if grouping.len() != 2 {
        return Err(Error::Dimension {
            expected: "2 streams".into(),
            found: format!("{} streams", grouping.len()),
        });
    }
    let mut seen: Vec<i32> = grouping.iter().flatten().copied().collect();
    seen.sort_unstable();
    let mut want = m.tx_modes.clone();
    want.sort_unstable();
    if seen != want {
        return Err(Error::Domain(format!(
            "grouping {grouping:?} does not partition transmit modes {:?}",
            m.tx_modes
        )));
    }
    if power_split.len() != 2 || power_split.iter().zip(grouping).any(|(w, g)| w.len() != g.len()) {
        return Err(Error::Dimension {
            expected: "one weight per grouped mode".into(),
            found: format!("{power_split:?}"),
        });
    }
    for w in power_split {
        let p: f64 = w.iter().map(|a| a * a).sum();
        if (p - 1.0).abs() > 1e-9 || w.iter().any(|a| *a < 0.0) {
            return Err(Error::Domain(format!(
                "stream weights {w:?} carry power {p}, expected 1"
            )));
        }
    }
    let stream = |s: usize| {
        let mut h = vec![0.0; m.n_filters()];
        for (&mode, &a) in grouping[s].iter().zip(&power_split[s]) {
            let n = m.tx_modes.iter().position(|&t| t == mode).expect("checked partition");
            for (hj, cj) in h.iter_mut().zip(m.column(n)) {
                *hj += a * cj;
            }
        }
        h
    };
    ChannelVectors::new(stream(0), stream(1))
}

/// Stream vectors for a mode set: grouped with equal power when the set has
/// a grouping, plain columns otherwise.
pub fn vectors_for(m: &CrosstalkMatrix, modes: &ModeSet) -> Result<ChannelVectors> {
    match modes.grouping() {
        Some(g) => grouped_channel_vectors(m, g, &equal_power_weights(g)),
        None => channel_vectors(m),
    }
}

fn norm_sq(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum()
}

fn check_n0(n0: f64) -> Result<()> {
    if n0.is_finite() && n0 > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("N0 must be positive, got {n0}")))
    }
}

fn tail(d2: f64, n0: f64) -> f64 {
    q_function((d2 / (4.0 * n0)).sqrt())
}

/// Union-bound error probability of the four-hypothesis ML detector.
pub fn conditional_ber(h: &ChannelVectors, n0: f64) -> Result<f64> {
    check_n0(n0)?;
    let a = norm_sq(h.h1.iter().copied());
    let b = norm_sq(h.h2.iter().copied());
    let sum = norm_sq(h.h1.iter().zip(&h.h2).map(|(x, y)| x + y));
    let diff = norm_sq(h.h1.iter().zip(&h.h2).map(|(x, y)| x - y));
    Ok(tail(a, n0) + tail(b, n0) + 0.5 * tail(sum, n0) + 0.5 * tail(diff, n0))
}

/// The `|h1 - h2|` term alone, which dominates when the two signatures
/// nearly coincide.
pub fn symmetric_mode_approx(h: &ChannelVectors, n0: f64) -> Result<f64> {
    check_n0(n0)?;
    let diff = norm_sq(h.h1.iter().zip(&h.h2).map(|(x, y)| x - y));
    Ok(0.5 * tail(diff, n0))
}

/// `min(value, 0.5)`, for plotting on BER axes.
pub fn clamped(value: f64) -> f64 {
    value.min(0.5)
}

/// Conditional error probability at one pointing offset.
pub fn ber_at(
    model: &CrosstalkModel,
    modes: &ModeSet,
    pointing: &PointingState,
    method: Method,
) -> Result<(f64, Status)> {
    let m = model.matrix(modes, pointing, method)?;
    let h = vectors_for(&m, modes)?;
    Ok((conditional_ber(&h, model.receiver().noise_level)?, m.status))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    /// Conditional value at `r_ch = sigma_r`.
    pub conditional: f64,
    /// Rayleigh-averaged value at `quad_order`.
    pub averaged: f64,
    /// Same average at twice the order.
    pub averaged_check: f64,
    pub quad_order: usize,
    /// `|averaged - averaged_check| <= 1% of averaged_check`.
    pub quad_converged: bool,
    /// Worst crosstalk status over all quadrature nodes.
    pub status: Status,
    /// Rayleigh mass below the validity floor of the center-envelope methods.
    pub small_offset_mass: f64,
    pub tail_mass: f64,
    pub method: Method,
    pub geometry: LinkGeometry,
    pub receiver: ReceiverConfig,
    pub modes: ModeSet,
    pub stats: PointingStats,
}

impl BerResult {
    pub fn clamped(&self) -> f64 {
        clamped(self.averaged)
    }

    /// Short status token for tables.
    pub fn status_label(&self) -> String {
        let mut s = self.status.to_string();
        if !self.quad_converged {
            s.push_str(";quad_unconverged");
        }
        s
    }
}

/// Rayleigh average of [`conditional_ber`] over `[0, 8 sigma_r]` by
/// Gauss-Legendre, with a doubled-order self-check.
pub fn average_ber(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    modes: &ModeSet,
    stats: &PointingStats,
    method: Method,
    quad_order: usize,
) -> Result<BerResult> {
    let model = CrosstalkModel::new(geom, rx)?;
    average_ber_with(&model, modes, stats, method, quad_order)
}

pub fn average_ber_with(
    model: &CrosstalkModel,
    modes: &ModeSet,
    stats: &PointingStats,
    method: Method,
    quad_order: usize,
) -> Result<BerResult> {
    if !(16..=256).contains(&quad_order) {
        return Err(Error::Domain(format!(
            "quad_order {quad_order} outside [16, 256]"
        )));
    }
    let (averaged, s1) = rayleigh_average(model, modes, stats, method, quad_order)?;
    let (averaged_check, s2) = rayleigh_average(model, modes, stats, method, 2 * quad_order)?;
    let (conditional, s3) = ber_at(
        model,
        modes,
        &PointingState::radial(stats.rayleigh_scale()),
        method,
    )?;
    Ok(BerResult {
        conditional,
        averaged,
        averaged_check,
        quad_order,
        quad_converged: (averaged - averaged_check).abs() <= 0.01 * averaged_check.abs(),
        status: s1.max(s2).max(s3),
        small_offset_mass: stats.cdf(model.quadrature().validity_floor),
        tail_mass: stats.tail_mass(),
        method,
        geometry: *model.geometry(),
        receiver: *model.receiver(),
        modes: modes.clone(),
        stats: *stats,
    })
}

fn rayleigh_average(
    model: &CrosstalkModel,
    modes: &ModeSet,
    stats: &PointingStats,
    method: Method,
    order: usize,
) -> Result<(f64, Status)> {
    let rule = gauss_legendre(order, 0.0, TAIL_SIGMAS * stats.rayleigh_scale())?;
    let terms: Vec<(f64, Status)> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(&r, &w)| {
            let (p, s) = ber_at(model, modes, &PointingState::radial(r), method)?;
            Ok((w * stats.pdf(r) * p, s))
        })
        .collect::<Result<_>>()?;
    // fixed left-to-right order keeps the sum independent of scheduling
    let total = terms.iter().map(|t| t.0).sum();
    let status = terms.iter().map(|t| t.1).max().unwrap_or_default();
    Ok((total, status))
}

//! A complete parameter point: everything needed to evaluate one link.

use crate::beam::{LinkGeometry, ModeSet, PointingState};
use crate::ber::{average_ber_with, ber_at, BerResult, PointingStats};
use crate::crosstalk::{CrosstalkModel, Method, Quadrature, ReceiverConfig, Status};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointingModel {
    /// Gaussian angular jitter, Rayleigh radial offset.
    Stochastic(PointingStats),
    /// One deterministic offset.
    Fixed(PointingState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: LinkGeometry,
    pub receiver: ReceiverConfig,
    pub modes: ModeSet,
    pub pointing: PointingModel,
    pub method: Method,
    pub quad_order: usize,
    /// Transmit power for dBm reporting, watts.
    pub tx_power: f64,
    pub quadrature: Quadrature,
}

/// Error probability at one scenario, with whatever the pointing model
/// supports.
#[derive(Debug, Clone, PartialEq)]
pub enum BerPoint {
    Averaged(BerResult),
    Conditional { value: f64, status: Status },
}

impl BerPoint {
    pub fn value(&self) -> f64 {
        match self {
            BerPoint::Averaged(r) => r.averaged,
            BerPoint::Conditional { value, .. } => *value,
        }
    }

    pub fn status_label(&self) -> String {
        match self {
            BerPoint::Averaged(r) => r.status_label(),
            BerPoint::Conditional { status, .. } => status.to_string(),
        }
    }
}

impl Scenario {
    pub fn model(&self) -> Result<CrosstalkModel> {
        Ok(CrosstalkModel::new(&self.geometry, &self.receiver)?.with_quadrature(self.quadrature))
    }

    pub fn stats(&self) -> Result<PointingStats> {
        match self.pointing {
            PointingModel::Stochastic(s) => Ok(s),
            PointingModel::Fixed(_) => Err(Error::Config(
                "this quantity needs a stochastic pointing model (pointing.sigma_theta_rad)".into(),
            )),
        }
    }

    pub fn with_waist(&self, w0: f64) -> Result<Self> {
        let mut s = self.clone();
        s.geometry = self.geometry.with_waist(w0)?;
        Ok(s)
    }

    /// Changes the link distance and keeps the pointing statistics on the
    /// same distance.
    pub fn with_distance(&self, z: f64) -> Result<Self> {
        let mut s = self.clone();
        s.geometry = self.geometry.with_distance(z)?;
        if let PointingModel::Stochastic(st) = self.pointing {
            s.pointing = PointingModel::Stochastic(PointingStats::new(st.sigma_theta, z)?);
        }
        Ok(s)
    }

    pub fn with_sigma_theta(&self, sigma: f64) -> Result<Self> {
        let mut s = self.clone();
        s.pointing = PointingModel::Stochastic(PointingStats::new(sigma, self.geometry.distance())?);
        Ok(s)
    }

    pub fn with_offset(&self, r_ch: f64) -> Result<Self> {
        if !(r_ch.is_finite() && r_ch >= 0.0) {
            return Err(Error::Domain(format!("offset {r_ch} must be >= 0")));
        }
        let mut s = self.clone();
        s.pointing = PointingModel::Fixed(PointingState::radial(r_ch));
        Ok(s)
    }

    pub fn with_modes(&self, modes: ModeSet) -> Self {
        let mut s = self.clone();
        s.modes = modes;
        s
    }

    pub fn with_method(&self, method: Method) -> Self {
        let mut s = self.clone();
        s.method = method;
        s
    }

    pub fn ber(&self) -> Result<BerPoint> {
        let model = self.model()?;
        match self.pointing {
            PointingModel::Stochastic(stats) => Ok(BerPoint::Averaged(average_ber_with(
                &model,
                &self.modes,
                &stats,
                self.method,
                self.quad_order,
            )?)),
            PointingModel::Fixed(p) => {
                let (value, status) = ber_at(&model, &self.modes, &p, self.method)?;
                Ok(BerPoint::Conditional { value, status })
            }
        }
    }

    /// Averaged BER, failing for a fixed pointing model.
    pub fn averaged_ber(&self) -> Result<BerResult> {
        match self.ber()? {
            BerPoint::Averaged(r) => Ok(r),
            BerPoint::Conditional { .. } => Err(Error::Config(
                "averaged BER needs a stochastic pointing model".into(),
            )),
        }
    }
}

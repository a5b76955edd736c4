//! Link geometry and Laguerre-Gaussian field evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{factorial, Laguerre};

/// Largest |l| accepted anywhere in a mode set.
pub const MAX_ABS_MODE: i32 = 16;

/// Transmitter/receiver geometry of one link. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    wavelength: f64,
    waist: f64,
    radial_index: u32,
    distance: f64,
}

impl LinkGeometry {
    pub fn new(wavelength: f64, waist: f64, radial_index: u32, distance: f64) -> Result<Self> {
        for (name, v) in [
            ("wavelength", wavelength),
            ("waist", waist),
            ("distance", distance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if radial_index > crate::numerics::LAGUERRE_MAX_ORDER {
            return Err(Error::Domain(format!(
                "radial index {radial_index} exceeds guard {}",
                crate::numerics::LAGUERRE_MAX_ORDER
            )));
        }
        Ok(Self {
            wavelength,
            waist,
            radial_index,
            distance,
        })
    }

    pub fn with_waist(&self, waist: f64) -> Result<Self> {
        Self::new(self.wavelength, waist, self.radial_index, self.distance)
    }

    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.wavelength, self.waist, self.radial_index, distance)
    }

    pub fn with_radial_index(&self, p: u32) -> Result<Self> {
        Self::new(self.wavelength, self.waist, p, self.distance)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn radial_index(&self) -> u32 {
        self.radial_index
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Standard Gaussian-beam Rayleigh range `pi w0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    pub fn beam_radius_at_rx(&self) -> f64 {
        radius(self, self.distance)
    }

    pub fn curvature_at_rx(&self) -> f64 {
        curvature(self, self.distance)
    }
}

fn radius(geom: &LinkGeometry, z: f64) -> f64 {
    let t = z / geom.rayleigh_range();
    geom.waist * (1.0 + t * t).sqrt()
}

fn curvature(geom: &LinkGeometry, z: f64) -> f64 {
    let t = geom.rayleigh_range() / z;
    z * (1.0 + t * t)
}

fn check_z(z: f64, allow_zero: bool) -> Result<()> {
    let ok = z.is_finite() && if allow_zero { z >= 0.0 } else { z > 0.0 };
    if ok {
        Ok(())
    } else if z == 0.0 {
        Err(Error::Domain(
            "wavefront curvature is singular at z = 0".to_string(),
        ))
    } else {
        Err(Error::Domain(format!("propagation distance {z} out of range")))
    }
}

/// `w(z) = w0 sqrt(1 + (z/z_R)^2)`.
pub fn beam_radius(geom: &LinkGeometry, z: f64) -> Result<f64> {
    check_z(z, true)?;
    Ok(radius(geom, z))
}

/// `R(z) = z (1 + (z_R/z)^2)`. Rejects `z = 0`.
pub fn curvature_radius(geom: &LinkGeometry, z: f64) -> Result<f64> {
    check_z(z, false)?;
    Ok(curvature(geom, z))
}

/// `(2p + |l| + 1) atan(z / z_R)`.
pub fn gouy_phase(geom: &LinkGeometry, ell: i32, z: f64) -> Result<f64> {
    check_z(z, true)?;
    Ok(gouy(geom, ell, z))
}

fn gouy(geom: &LinkGeometry, ell: i32, z: f64) -> f64 {
    let order = 2 * geom.radial_index + ell.unsigned_abs() + 1;
    order as f64 * (z / geom.rayleigh_range()).atan()
}

/// Complex LG amplitude at polar point `(r, phi)` in the plane `z`.
pub fn lg_field(geom: &LinkGeometry, ell: i32, r: f64, phi: f64, z: f64) -> Result<Complex64> {
    if !(r.is_finite() && r >= 0.0) || !phi.is_finite() {
        return Err(Error::Domain(format!("bad polar point ({r}, {phi})")));
    }
    let mode = LgMode::new(geom, ell, z)?;
    Ok(mode.polar(r, phi))
}

/// Field of mode `ell` seen at aperture point `(r', phi')` when the beam
/// center sits at `(x_ch, y_ch)` relative to the aperture center.
pub fn shifted_aperture_field(
    geom: &LinkGeometry,
    ell: i32,
    r_prime: f64,
    phi_prime: f64,
    pointing: &PointingState,
) -> Result<Complex64> {
    if !(r_prime.is_finite() && r_prime >= 0.0) || !phi_prime.is_finite() {
        return Err(Error::Domain(format!(
            "bad aperture point ({r_prime}, {phi_prime})"
        )));
    }
    let mode = LgMode::new(geom, ell, geom.distance)?;
    Ok(mode.shifted(r_prime, phi_prime, pointing))
}

/// One LG mode with every z-dependent factor precomputed, for evaluating
/// many points in the same plane.
#[derive(Debug, Clone)]
pub struct LgMode {
    ell: i32,
    abs_ell: i32,
    inv_w2: f64,
    amp: f64,
    sqrt2_over_w: f64,
    half_k_over_r: f64,
    gouy: f64,
    poly: Laguerre,
}

impl LgMode {
    pub fn new(geom: &LinkGeometry, ell: i32, z: f64) -> Result<Self> {
        check_mode(ell)?;
        check_z(z, false)?;
        let p = geom.radial_index;
        let abs_ell = ell.abs();
        let w = radius(geom, z);
        let norm =
            (2.0 * factorial(p as usize) / (PI * factorial((p + abs_ell as u32) as usize))).sqrt();
        Ok(Self {
            ell,
            abs_ell,
            inv_w2: 1.0 / (w * w),
            amp: norm / w,
            sqrt2_over_w: 2f64.sqrt() / w,
            half_k_over_r: 0.5 * geom.wavenumber() / curvature(geom, z),
            gouy: gouy(geom, ell, z),
            poly: Laguerre::new(p, abs_ell as u32)?,
        })
    }

    pub fn ell(&self) -> i32 {
        self.ell
    }

    /// Field at polar point `(r, phi)` of the beam's own frame.
    #[inline]
    pub fn polar(&self, r: f64, phi: f64) -> Complex64 {
        let r2 = r * r;
        let envelope = self.amp
            * (self.sqrt2_over_w * r).powi(self.abs_ell)
            * self.poly.eval(2.0 * r2 * self.inv_w2)
            * (-r2 * self.inv_w2).exp();
        let phase = -(self.ell as f64) * phi - self.half_k_over_r * r2 + self.gouy;
        Complex64::from_polar(envelope, phase)
    }

    /// Field at Cartesian point `(x, y)` of the beam's own frame; the
    /// helical phase uses the quadrant-correct `atan2`.
    #[inline]
    pub fn cartesian(&self, x: f64, y: f64) -> Complex64 {
        self.polar(x.hypot(y), y.atan2(x))
    }

    #[inline]
    pub fn shifted(&self, r_prime: f64, phi_prime: f64, pointing: &PointingState) -> Complex64 {
        let (s, c) = phi_prime.sin_cos();
        self.cartesian(r_prime * c + pointing.x_ch, r_prime * s + pointing.y_ch)
    }
}

fn check_mode(ell: i32) -> Result<()> {
    if ell.abs() > MAX_ABS_MODE {
        return Err(Error::Domain(format!(
            "OAM order {ell} exceeds guard |l| <= {MAX_ABS_MODE}"
        )));
    }
    Ok(())
}

/// Transmitted modes, receiver filter modes, and an optional split of the
/// transmitted modes into data streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSet {
    tx_modes: Vec<i32>,
    filter_modes: Vec<i32>,
    grouping: Option<Vec<Vec<i32>>>,
}

impl ModeSet {
    /// Receiver filters matched one-to-one to the transmitted modes.
    pub fn matched(tx_modes: &[i32]) -> Result<Self> {
        Self::new(tx_modes.to_vec(), tx_modes.to_vec(), None)
    }

    pub fn new(
        tx_modes: Vec<i32>,
        filter_modes: Vec<i32>,
        grouping: Option<Vec<Vec<i32>>>,
    ) -> Result<Self> {
        if tx_modes.is_empty() || filter_modes.is_empty() {
            return Err(Error::Domain("mode lists must not be empty".into()));
        }
        for &l in tx_modes.iter().chain(&filter_modes) {
            check_mode(l)?;
        }
        for (i, a) in tx_modes.iter().enumerate() {
            if tx_modes[..i].contains(a) {
                return Err(Error::Domain(format!("transmit mode {a} repeated")));
            }
        }
        if let Some(groups) = &grouping {
            let mut seen: Vec<i32> = groups.iter().flatten().copied().collect();
            seen.sort_unstable();
            let mut want = tx_modes.clone();
            want.sort_unstable();
            if seen != want || groups.iter().any(|g| g.is_empty()) {
                return Err(Error::Domain(format!(
                    "grouping {groups:?} does not partition transmit modes {tx_modes:?}"
                )));
            }
        }
        Ok(Self {
            tx_modes,
            filter_modes,
            grouping,
        })
    }

    pub fn tx_modes(&self) -> &[i32] {
        &self.tx_modes
    }

    pub fn filter_modes(&self) -> &[i32] {
        &self.filter_modes
    }

    pub fn grouping(&self) -> Option<&[Vec<i32>]> {
        self.grouping.as_deref()
    }

    /// Number of simultaneously transmitted modes, `N_m`.
    pub fn n_m(&self) -> usize {
        self.tx_modes.len()
    }

    /// Short label such as `-4,-2|1,3` or `-2,1`.
    pub fn label(&self) -> String {
        let join = |v: &[i32]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.grouping {
            Some(g) => g.iter().map(|s| join(s)).collect::<Vec<_>>().join("|"),
            None => join(&self.tx_modes),
        }
    }
}

/// Displacement of the beam center from the aperture center at the
/// receiver plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointingState {
    pub x_ch: f64,
    pub y_ch: f64,
}

impl PointingState {
    pub fn new(x_ch: f64, y_ch: f64) -> Self {
        Self { x_ch, y_ch }
    }

    pub fn aligned() -> Self {
        Self::default()
    }

    /// Offset of length `r_ch` along the x axis.
    pub fn radial(r_ch: f64) -> Self {
        Self::new(r_ch, 0.0)
    }

    pub fn polar(r_ch: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(r_ch * c, r_ch * s)
    }

    pub fn r_ch(&self) -> f64 {
        self.x_ch.hypot(self.y_ch)
    }
}

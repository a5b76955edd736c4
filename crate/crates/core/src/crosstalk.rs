//! Intermodal crosstalk `C(l_n -> l'_j)` at the receiver filter bank.
//!
//! Five evaluators of decreasing cost:
//!
//! | method   | radial            | azimuthal                  |
//! |----------|-------------------|----------------------------|
//! | Exact2D  | Gauss-Legendre    | periodic trapezoid, doubled until converged |
//! | Prop1    | `K_r` nodes       | periodic trapezoid         |
//! | Prop2    | Gauss-Legendre    | closed form, `J_l'^2`      |
//! | Prop3    | `K_r` nodes       | closed form, `J_l'^2`      |
//! | Prop4    | closed form       | large-argument asymptote   |
//!
//! Props 2-4 replace the field envelope by its value at the aperture
//! center, so they lose accuracy when the beam center comes within about a
//! meter of the aperture; results there carry [`Status::SmallOffset`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::beam::{LgMode, LinkGeometry, ModeSet, PointingState};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j, factorial, gauss_legendre, Laguerre};

/// Largest |l'| accepted by [`filter_spectrum`].
pub const MAX_SPECTRUM_ORDER: i32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Exact2D,
    Prop1,
    Prop2,
    Prop3,
    Prop4,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Exact2D,
        Method::Prop1,
        Method::Prop2,
        Method::Prop3,
        Method::Prop4,
    ];

    /// Methods that integrate the field on a 2D grid and are worth
    /// spreading over worker threads.
    pub fn is_expensive(self) -> bool {
        matches!(self, Method::Exact2D | Method::Prop1)
    }

    fn uses_center_envelope(self) -> bool {
        matches!(self, Method::Prop2 | Method::Prop3 | Method::Prop4)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Exact2D => "exact2d",
            Method::Prop1 => "prop1",
            Method::Prop2 => "prop2",
            Method::Prop3 => "prop3",
            Method::Prop4 => "prop4",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact2d" | "exact" => Ok(Method::Exact2D),
            "prop1" => Ok(Method::Prop1),
            "prop2" => Ok(Method::Prop2),
            "prop3" => Ok(Method::Prop3),
            "prop4" => Ok(Method::Prop4),
            other => Err(Error::Config(format!("unknown crosstalk method '{other}'"))),
        }
    }
}

/// Placement of the `K_r` radial samples used by Prop1 and Prop3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialRule {
    /// `K_r`-point Gauss-Legendre rule on `[0, r_a]`.
    GaussLegendre,
    /// `r'_k = r_a k / K_r` with equal weights `r_a / K_r`.
    RightEndpoint,
}

impl fmt::Display for RadialRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadialRule::GaussLegendre => "gauss-legendre",
            RadialRule::RightEndpoint => "right-endpoint",
        })
    }
}

impl FromStr for RadialRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gauss-legendre" | "gl" => Ok(RadialRule::GaussLegendre),
            "right-endpoint" | "right" => Ok(RadialRule::RightEndpoint),
            other => Err(Error::Config(format!("unknown radial rule '{other}'"))),
        }
    }
}

/// Receiver aperture and detection chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverConfig {
    pub aperture_radius: f64,
    pub responsivity: f64,
    pub apd_gain: f64,
    /// Variance of the real Gaussian noise on each filter branch.
    pub noise_level: f64,
    pub k_r: usize,
    pub radial_rule: RadialRule,
}

impl ReceiverConfig {
    pub fn new(
        aperture_radius: f64,
        responsivity: f64,
        apd_gain: f64,
        noise_level: f64,
        k_r: usize,
    ) -> Result<Self> {
        let rx = Self {
            aperture_radius,
            responsivity,
            apd_gain,
            noise_level,
            k_r,
            radial_rule: RadialRule::GaussLegendre,
        };
        rx.validate()?;
        Ok(rx)
    }

    pub fn with_radial_rule(mut self, rule: RadialRule) -> Self {
        self.radial_rule = rule;
        self
    }

    pub fn with_k_r(mut self, k_r: usize) -> Result<Self> {
        self.k_r = k_r;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise_level(mut self, n0: f64) -> Result<Self> {
        self.noise_level = n0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        pos("aperture radius", self.aperture_radius)?;
        pos("responsivity", self.responsivity)?;
        pos("noise level", self.noise_level)?;
        if !(self.apd_gain.is_finite() && self.apd_gain >= 1.0) {
            return Err(Error::Domain(format!(
                "APD gain must be >= 1, got {}",
                self.apd_gain
            )));
        }
        if !(2..=64).contains(&self.k_r) {
            return Err(Error::Domain(format!("K_r = {} outside [2, 64]", self.k_r)));
        }
        Ok(())
    }

    /// Combined electrical gain `eta G`.
    pub fn gain(&self) -> f64 {
        self.responsivity * self.apd_gain
    }
}

/// Grid sizes and tolerances behind the evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub exact_radial: usize,
    pub exact_azimuthal: usize,
    /// Relative change between a grid and its doubling that counts as converged.
    pub exact_tol: f64,
    pub exact_max_doublings: u32,
    pub prop1_azimuthal: usize,
    pub prop2_min_order: usize,
    /// Offsets below this (meters) flag Props 2-4 as degraded.
    pub validity_floor: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            exact_radial: 128,
            exact_azimuthal: 512,
            exact_tol: 1e-3,
            exact_max_doublings: 2,
            prop1_azimuthal: 512,
            prop2_min_order: 64,
            validity_floor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Status {
    #[default]
    Ok,
    /// Offset below the validity floor of the center-envelope methods.
    SmallOffset,
    /// The exact integral still moved by more than the tolerance on the
    /// finest grid allowed.
    NotConverged,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::SmallOffset => "small_offset",
            Status::NotConverged => "not_converged",
        })
    }
}

/// One crosstalk value with the grid that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosstalk {
    /// Watts per unit modulation power.
    pub watts: f64,
    pub status: Status,
    pub radial_nodes: usize,
    pub azimuthal_points: usize,
}

impl Crosstalk {
    pub fn dbm(&self, tx_power: f64) -> f64 {
        to_dbm(self.watts, tx_power)
    }
}

/// `10 log10(C P_tx / 1 mW)`.
pub fn to_dbm(c: f64, tx_power: f64) -> f64 {
    10.0 * (c * tx_power / 1.0e-3).log10()
}

/// Evaluators bound to one geometry and receiver.
#[derive(Debug, Clone)]
pub struct CrosstalkModel {
    geom: LinkGeometry,
    rx: ReceiverConfig,
    quad: Quadrature,
}

impl CrosstalkModel {
    pub fn new(geom: &LinkGeometry, rx: &ReceiverConfig) -> Result<Self> {
        rx.validate()?;
        Ok(Self {
            geom: *geom,
            rx: *rx,
            quad: Quadrature::default(),
        })
    }

    pub fn with_quadrature(mut self, quad: Quadrature) -> Self {
        self.quad = quad;
        self
    }

    pub fn geometry(&self) -> &LinkGeometry {
        &self.geom
    }

    pub fn receiver(&self) -> &ReceiverConfig {
        &self.rx
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn evaluate(
        &self,
        method: Method,
        n_m: usize,
        ell_n: i32,
        ell_j: i32,
        pointing: &PointingState,
    ) -> Result<Crosstalk> {
        match method {
            Method::Exact2D => Ok(self.exact_many(n_m, ell_n, &[ell_j], pointing)?[0]),
            Method::Prop1 => self.prop1(n_m, ell_n, ell_j, pointing),
            Method::Prop2 | Method::Prop3 | Method::Prop4 => {
                let a = self.a1a5(n_m, ell_n, pointing)?;
                let (f, nodes) = self.radial_factor(method, ell_j, pointing)?;
                Ok(self.center_envelope_result(method, a * f, nodes, pointing))
            }
        }
    }

    /// Exact crosstalk from `ell_n` into each filter in `filters`, sharing
    /// one sampling of the aperture field.
    pub fn exact_many(
        &self,
        n_m: usize,
        ell_n: i32,
        filters: &[i32],
        pointing: &PointingState,
    ) -> Result<Vec<Crosstalk>> {
        check_n_m(n_m)?;
        let mode = LgMode::new(&self.geom, ell_n, self.geom.distance())?;
        let scale = self.rx.gain() / (n_m * n_m) as f64;

        let mut nr = self.quad.exact_radial;
        let mut nphi = self.quad.exact_azimuthal;
        let mut prev = ExactPass::run(&mode, self.rx.aperture_radius, nr, nphi, filters, pointing)?;
        let mut status = vec![Status::NotConverged; filters.len()];
        for _ in 0..self.quad.exact_max_doublings {
            let (nr2, nphi2) = ((2 * nr).min(512), 2 * nphi);
            let next =
                ExactPass::run(&mode, self.rx.aperture_radius, nr2, nphi2, filters, pointing)?;
            // anything below this is numerically zero next to the
            // captured power (azimuthal orthogonality)
            let floor = 1e-13 * next.total;
            let mut all = true;
            for (i, s) in status.iter_mut().enumerate() {
                let (a, b) = (prev.values[i], next.values[i]);
                let ok = (a - b).abs() <= self.quad.exact_tol * b.abs() || (a - b).abs() <= floor;
                *s = if ok { Status::Ok } else { Status::NotConverged };
                all &= ok;
            }
            prev = next;
            nr = nr2;
            nphi = nphi2;
            if all {
                break;
            }
        }
        Ok(prev
            .values
            .iter()
            .zip(status)
            .map(|(&v, status)| Crosstalk {
                watts: scale * v,
                status,
                radial_nodes: nr,
                azimuthal_points: nphi,
            })
            .collect())
    }

    fn prop1(&self, n_m: usize, ell_n: i32, ell_j: i32, pointing: &PointingState) -> Result<Crosstalk> {
        check_n_m(n_m)?;
        let g = &self.geom;
        let z = g.distance();
        let w = g.beam_radius_at_rx();
        let r_curv = g.curvature_at_rx();
        let k = g.wavenumber();
        let p = g.radial_index();
        let abs_ell = ell_n.unsigned_abs();
        let psi = crate::beam::gouy_phase(g, ell_n, z)?;
        let poly = Laguerre::new(p, abs_ell)?;
        let a1 = self.a1(n_m, ell_n, w);

        let nphi = self.quad.prop1_azimuthal;
        let h = 2.0 * PI / nphi as f64;
        let (nodes, weights) = self.k_r_nodes()?;
        let mut sum = 0.0;
        for (&r, &wk) in nodes.iter().zip(&weights) {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..nphi {
                let phi = m as f64 * h;
                let (s, c) = phi.sin_cos();
                let xs = r * c + pointing.x_ch;
                let ys = r * s + pointing.y_ch;
                let a2 = (xs * xs + ys * ys) / (w * w);
                let a4 = (xs * xs + ys * ys) / (2.0 * r_curv);
                let t1 = (2.0 * a2).sqrt().powi(abs_ell as i32) * poly.eval(2.0 * a2) * (-a2).exp();
                let phase = -(ell_n as f64) * ys.atan2(xs) - k * a4 + psi + ell_j as f64 * phi;
                acc += Complex64::from_polar(t1, phase);
            }
            let inner = acc * h;
            sum += wk * r * inner.norm_sqr();
        }
        Ok(Crosstalk {
            watts: a1 * sum,
            status: Status::Ok,
            radial_nodes: nodes.len(),
            azimuthal_points: nphi,
        })
    }

    fn a1(&self, n_m: usize, ell_n: i32, w: f64) -> f64 {
        let p = self.geom.radial_index() as usize;
        let al = ell_n.unsigned_abs() as usize;
        self.rx.gain() / ((n_m * n_m) as f64 * w * w) * 2.0 * factorial(p)
            / (PI * factorial(p + al))
    }

    /// `A1 A5`: everything that depends on the transmitted mode.
    pub fn a1a5(&self, n_m: usize, ell_n: i32, pointing: &PointingState) -> Result<f64> {
        check_n_m(n_m)?;
        crate::beam::LgMode::new(&self.geom, ell_n, self.geom.distance())?;
        let w = self.geom.beam_radius_at_rx();
        let rch = pointing.r_ch();
        let al = ell_n.unsigned_abs();
        let poly = Laguerre::new(self.geom.radial_index(), al)?;
        let x = rch * rch / (w * w);
        let a5 = (2.0 * PI * (2f64.sqrt() * rch / w).powi(al as i32) * poly.eval(2.0 * x) * (-x).exp())
            .powi(2);
        Ok(self.a1(n_m, ell_n, w) * a5)
    }

    /// The filter-dependent factor of Props 2-4 and the number of radial
    /// nodes behind it.
    pub fn radial_factor(
        &self,
        method: Method,
        ell_j: i32,
        pointing: &PointingState,
    ) -> Result<(f64, usize)> {
        crate::beam::LgMode::new(&self.geom, ell_j, self.geom.distance())?;
        let rch = pointing.r_ch();
        let ra = self.rx.aperture_radius;
        let big_r = self.geom.curvature_at_rx();
        let k = self.geom.wavenumber();
        let arg = k * rch / big_r;
        match method {
            Method::Prop2 => {
                // about eight nodes per half-oscillation of J^2
                let span = arg * ra;
                let order = ((8.0 * span / PI) as usize)
                    .max(self.quad.prop2_min_order)
                    .min(512);
                let rule = gauss_legendre(order, 0.0, ra)?;
                let mut s = 0.0;
                for (&r, &wt) in rule.nodes.iter().zip(&rule.weights) {
                    s += wt * r * bessel_j(ell_j, arg * r)?.powi(2);
                }
                Ok((s, order))
            }
            Method::Prop3 => {
                let (nodes, weights) = self.k_r_nodes()?;
                let mut s = 0.0;
                for (&r, &wt) in nodes.iter().zip(&weights) {
                    s += wt * r * bessel_j(ell_j, arg * r)?.powi(2);
                }
                Ok((s, nodes.len()))
            }
            Method::Prop4 => {
                if rch <= 0.0 {
                    return Err(Error::Domain(
                        "the asymptotic form needs a nonzero pointing offset".into(),
                    ));
                }
                Ok((big_r * ra / (PI * k * rch), 0))
            }
            _ => Err(Error::Domain(format!("{method} has no radial factor"))),
        }
    }

    fn center_envelope_result(
        &self,
        method: Method,
        watts: f64,
        radial_nodes: usize,
        pointing: &PointingState,
    ) -> Crosstalk {
        let status = if method.uses_center_envelope() && pointing.r_ch() < self.quad.validity_floor {
            Status::SmallOffset
        } else {
            Status::Ok
        };
        Crosstalk {
            watts,
            status,
            radial_nodes,
            azimuthal_points: 0,
        }
    }

    fn k_r_nodes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let kr = self.rx.k_r;
        let ra = self.rx.aperture_radius;
        Ok(match self.rx.radial_rule {
            RadialRule::GaussLegendre => {
                let rule = gauss_legendre(kr, 0.0, ra)?;
                (rule.nodes, rule.weights)
            }
            RadialRule::RightEndpoint => (
                (1..=kr).map(|k| ra * k as f64 / kr as f64).collect(),
                vec![ra / kr as f64; kr],
            ),
        })
    }

    /// Full `N_f x N_t` matrix for `modes` at one pointing offset.
    pub fn matrix(&self, modes: &ModeSet, pointing: &PointingState, method: Method) -> Result<CrosstalkMatrix> {
        let n_m = modes.n_m();
        let tx = modes.tx_modes();
        let filters = modes.filter_modes();
        // columns[n][j]
        let columns: Vec<Vec<Crosstalk>> = match method {
            Method::Exact2D => tx
                .par_iter()
                .map(|&l| self.exact_many(n_m, l, filters, pointing))
                .collect::<Result<_>>()?,
            Method::Prop1 => tx
                .par_iter()
                .map(|&l| {
                    filters
                        .iter()
                        .map(|&j| self.prop1(n_m, l, j, pointing))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?,
            _ => {
                let a: Vec<f64> = tx
                    .iter()
                    .map(|&l| self.a1a5(n_m, l, pointing))
                    .collect::<Result<_>>()?;
                let f: Vec<(f64, usize)> = filters
                    .iter()
                    .map(|&j| self.radial_factor(method, j, pointing))
                    .collect::<Result<_>>()?;
                a.iter()
                    .map(|&an| {
                        f.iter()
                            .map(|&(fj, nodes)| self.center_envelope_result(method, an * fj, nodes, pointing))
                            .collect()
                    })
                    .collect()
            }
        };
        let values = (0..filters.len())
            .map(|j| columns.iter().map(|col| col[j].watts).collect())
            .collect();
        let status = columns.iter().flatten().map(|c| c.status).max().unwrap_or_default();
        let radial_nodes = columns.iter().flatten().map(|c| c.radial_nodes).max().unwrap_or(0);
        let azimuthal_points = columns.iter().flatten().map(|c| c.azimuthal_points).max().unwrap_or(0);
        Ok(CrosstalkMatrix {
            values,
            tx_modes: tx.to_vec(),
            filter_modes: filters.to_vec(),
            method,
            pointing: *pointing,
            status,
            radial_nodes,
            azimuthal_points,
        })
    }
}

fn check_n_m(n_m: usize) -> Result<()> {
    if n_m == 0 {
        return Err(Error::Domain("N_m must be at least 1".into()));
    }
    Ok(())
}

/// `sum_k w_k r_k |int u e^{i l' phi} dphi|^2` for every filter on one grid.
struct ExactPass {
    values: Vec<f64>,
    /// `sum_k w_k r_k 2 pi int |u|^2 dphi`, the Parseval total over all filters.
    total: f64,
}

impl ExactPass {
    fn run(
        mode: &LgMode,
        ra: f64,
        nr: usize,
        nphi: usize,
        filters: &[i32],
        pointing: &PointingState,
    ) -> Result<Self> {
        let rule = gauss_legendre(nr, 0.0, ra)?;
        let h = 2.0 * PI / nphi as f64;
        let twiddle: Vec<Complex64> = (0..nphi)
            .map(|m| Complex64::from_polar(1.0, m as f64 * h))
            .collect();
        let mut values = vec![0.0; filters.len()];
        let mut total = 0.0;
        let mut row = vec![Complex64::new(0.0, 0.0); nphi];
        for (&r, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let mut energy = 0.0;
            for (m, u) in row.iter_mut().enumerate() {
                *u = mode.shifted(r, m as f64 * h, pointing);
                energy += u.norm_sqr();
            }
            total += wt * r * 2.0 * PI * energy * h;
            for (v, &lj) in values.iter_mut().zip(filters) {
                let step = lj.rem_euclid(nphi as i32) as usize;
                let mut idx = 0usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for u in &row {
                    acc += u * twiddle[idx];
                    idx += step;
                    if idx >= nphi {
                        idx -= nphi;
                    }
                }
                *v += wt * r * (acc * h).norm_sqr();
            }
        }
        Ok(Self { values, total })
    }
}

/// Crosstalk grid; `values[j][n]` is transmit mode `n` into filter `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosstalkMatrix {
    pub values: Vec<Vec<f64>>,
    pub tx_modes: Vec<i32>,
    pub filter_modes: Vec<i32>,
    pub method: Method,
    pub pointing: PointingState,
    /// Worst entry status.
    pub status: Status,
    pub radial_nodes: usize,
    pub azimuthal_points: usize,
}

impl CrosstalkMatrix {
    /// Element-wise square root, the amplitude channel matrix `H`.
    pub fn amplitudes(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|row| row.iter().map(|c| c.sqrt()).collect())
            .collect()
    }

    /// Amplitude column of transmit mode index `n`.
    pub fn column(&self, n: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[n].sqrt()).collect()
    }

    pub fn n_filters(&self) -> usize {
        self.filter_modes.len()
    }

    pub fn n_tx(&self) -> usize {
        self.tx_modes.len()
    }
}

pub fn crosstalk_exact(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    ell_j: i32,
    pointing: &PointingState,
) -> Result<Crosstalk> {
    CrosstalkModel::new(geom, rx)?.evaluate(Method::Exact2D, n_m, ell_n, ell_j, pointing)
}

pub fn crosstalk_prop1(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    ell_j: i32,
    pointing: &PointingState,
) -> Result<Crosstalk> {
    CrosstalkModel::new(geom, rx)?.evaluate(Method::Prop1, n_m, ell_n, ell_j, pointing)
}

pub fn crosstalk_prop2(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    ell_j: i32,
    pointing: &PointingState,
) -> Result<Crosstalk> {
    CrosstalkModel::new(geom, rx)?.evaluate(Method::Prop2, n_m, ell_n, ell_j, pointing)
}

pub fn crosstalk_prop3(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    ell_j: i32,
    pointing: &PointingState,
) -> Result<Crosstalk> {
    CrosstalkModel::new(geom, rx)?.evaluate(Method::Prop3, n_m, ell_n, ell_j, pointing)
}

pub fn crosstalk_prop4(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    ell_j: i32,
    pointing: &PointingState,
) -> Result<Crosstalk> {
    CrosstalkModel::new(geom, rx)?.evaluate(Method::Prop4, n_m, ell_n, ell_j, pointing)
}

pub fn crosstalk_matrix(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    modes: &ModeSet,
    pointing: &PointingState,
    method: Method,
) -> Result<CrosstalkMatrix> {
    CrosstalkModel::new(geom, rx)?.matrix(modes, pointing, method)
}

/// Exact crosstalk from `ell_n` into every filter order in `range`.
pub fn filter_spectrum(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    n_m: usize,
    ell_n: i32,
    pointing: &PointingState,
    range: std::ops::RangeInclusive<i32>,
) -> Result<Vec<(i32, Crosstalk)>> {
    if range.start().abs() > MAX_SPECTRUM_ORDER || range.end().abs() > MAX_SPECTRUM_ORDER {
        return Err(Error::Domain(format!(
            "filter range {range:?} exceeds |l'| <= {MAX_SPECTRUM_ORDER}"
        )));
    }
    let filters: Vec<i32> = range.collect();
    let values = CrosstalkModel::new(geom, rx)?.exact_many(n_m, ell_n, &filters, pointing)?;
    Ok(filters.into_iter().zip(values).collect())
}

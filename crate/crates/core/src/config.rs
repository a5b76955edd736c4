//! Flat `section.key = value` run configuration.
//!
//! Files are layered: later layers override earlier ones key by key, and
//! `--set key=value` overrides come last. Keys under `run.` are written by
//! the manifest and ignored on input, so a manifest is itself a valid
//! configuration. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::beam::{LinkGeometry, ModeSet};
use crate::ber::PointingStats;
use crate::crosstalk::{Method, Quadrature, RadialRule, ReceiverConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{ChannelRefresh, TrialConfig};
use crate::scenario::{PointingModel, Scenario};
use crate::sweep::Axis;

/// Every accepted key with its unit or format, in schema order.
pub const KEYS: &[(&str, &str)] = &[
    ("geometry.wavelength_m", "m"),
    ("geometry.w0_m", "m"),
    ("geometry.radial_index", "integer"),
    ("geometry.distance_m", "m"),
    ("receiver.aperture_radius_m", "m"),
    ("receiver.responsivity_a_per_w", "A/W"),
    ("receiver.apd_gain", "1"),
    ("receiver.n0", "noise variance per branch"),
    ("receiver.k_r", "integer"),
    ("receiver.radial_rule", "gauss-legendre | right-endpoint"),
    ("receiver.tx_power_w", "W"),
    ("modes.tx", "integer list"),
    ("modes.filter", "integer list, empty = same as tx"),
    ("modes.grouping", "streams separated by |, empty = one mode per stream"),
    ("pointing.sigma_theta_rad", "rad, empty when r_ch_m is set"),
    ("pointing.r_ch_m", "m, empty when sigma_theta_rad is set"),
    ("crosstalk.method", "exact2d | prop1 | prop2 | prop3 | prop4"),
    ("crosstalk.validity_floor_m", "m"),
    ("crosstalk.exact_radial", "integer"),
    ("crosstalk.exact_azimuthal", "integer"),
    ("crosstalk.exact_tol", "relative"),
    ("crosstalk.exact_max_doublings", "integer"),
    ("crosstalk.prop1_azimuthal", "integer"),
    ("ber.quad_order", "integer"),
    ("curve.r_ch_m", "m list"),
    ("curve.methods", "method list"),
    ("sweep.axis", "w0 | r_ch | sigma_theta | z"),
    ("sweep.values", "list in SI units of the axis"),
    ("sweep.mode_sets", "mode sets separated by ;, empty = modes section"),
    ("mc.trials", "integer"),
    ("mc.seed", "integer"),
    ("mc.refresh", "per-symbol | block:N"),
    ("mc.allow_degraded", "bool"),
    ("optimize.w0_lo_m", "m"),
    ("optimize.w0_hi_m", "m"),
    ("optimize.tol_m", "m"),
    ("optimize.sigma_theta_rad", "rad list, empty = pointing.sigma_theta_rad"),
    ("optimize.distance_m", "m list, empty = geometry.distance_m"),
    ("rank.candidates", "mode sets separated by ;"),
    ("bench.repetitions", "integer"),
    ("bench.grid_points", "integer"),
    ("bench.r_lo_m", "m"),
    ("bench.r_hi_m", "m"),
    ("bench.methods", "method list"),
    ("bench.trials", "integer, 0 = skip the Monte Carlo comparison"),
    ("output.path", "path"),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses one layer of `key = value` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find(" #").or_else(|| raw.trim_start().starts_with('#').then_some(0)) {
                Some(0) if raw.trim_start().starts_with('#') => "",
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if seen.insert(k.to_string(), i + 1).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {k}", i + 1)));
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key; `run.*` keys are dropped.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key.starts_with("run.") {
            return Ok(());
        }
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{pair}' is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    /// `other` wins on every key it defines.
    pub fn merge(&mut self, other: &RunConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Sorted `key = value` lines.
    pub fn echo(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str()).filter(|s| !s.is_empty())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| Error::Config(format!("missing value for {key}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let s = self.require(key)?;
        s.parse()
            .map_err(|_| Error::Config(format!("{key}: '{s}' is not a number")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let s = self.require(key)?;
        // accept 1e6-style counts as long as they are whole
        if let Ok(v) = s.parse::<u64>() {
            return Ok(v);
        }
        match s.parse::<f64>() {
            Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
            _ => Err(Error::Config(format!("{key}: '{s}' is not a non-negative integer"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        Ok(self.u64(key)? as usize)
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.require(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            s => Err(Error::Config(format!("{key}: '{s}' is not a bool"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{key}: '{t}' is not a number")))
                })
                .collect(),
        }
    }

    pub fn methods(&self, key: &str) -> Result<Vec<Method>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(s) => s.split(',').map(|t| t.parse()).collect(),
        }
    }

    pub fn method(&self) -> Result<Method> {
        self.require("crosstalk.method")?.parse()
    }

    pub fn geometry(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(
            self.f64("geometry.wavelength_m")?,
            self.f64("geometry.w0_m")?,
            self.u64("geometry.radial_index")? as u32,
            self.f64("geometry.distance_m")?,
        )
    }

    pub fn receiver(&self) -> Result<ReceiverConfig> {
        let rule: RadialRule = match self.raw("receiver.radial_rule") {
            Some(s) => s.parse()?,
            None => RadialRule::GaussLegendre,
        };
        Ok(ReceiverConfig::new(
            self.f64("receiver.aperture_radius_m")?,
            self.f64("receiver.responsivity_a_per_w")?,
            self.f64("receiver.apd_gain")?,
            self.f64("receiver.n0")?,
            self.usize("receiver.k_r")?,
        )?
        .with_radial_rule(rule))
    }

    pub fn quadrature(&self) -> Result<Quadrature> {
        let mut q = Quadrature::default();
        let set_usize = |key: &str, slot: &mut usize| -> Result<()> {
            if self.raw(key).is_some() {
                *slot = self.usize(key)?;
            }
            Ok(())
        };
        set_usize("crosstalk.exact_radial", &mut q.exact_radial)?;
        set_usize("crosstalk.exact_azimuthal", &mut q.exact_azimuthal)?;
        set_usize("crosstalk.prop1_azimuthal", &mut q.prop1_azimuthal)?;
        if self.raw("crosstalk.exact_max_doublings").is_some() {
            q.exact_max_doublings = self.u64("crosstalk.exact_max_doublings")? as u32;
        }
        if self.raw("crosstalk.exact_tol").is_some() {
            q.exact_tol = self.f64("crosstalk.exact_tol")?;
        }
        if self.raw("crosstalk.validity_floor_m").is_some() {
            q.validity_floor = self.f64("crosstalk.validity_floor_m")?;
        }
        if !(2..=512).contains(&q.exact_radial) || q.exact_azimuthal < 8 || q.prop1_azimuthal < 8 {
            return Err(Error::Config("crosstalk quadrature sizes out of range".into()));
        }
        Ok(q)
    }

    pub fn modes(&self) -> Result<ModeSet> {
        let tx = parse_ints("modes.tx", self.require("modes.tx")?)?;
        let filter = match self.raw("modes.filter") {
            Some(s) => parse_ints("modes.filter", s)?,
            None => tx.clone(),
        };
        let grouping = self
            .raw("modes.grouping")
            .map(|s| parse_groups("modes.grouping", s))
            .transpose()?;
        ModeSet::new(tx, filter, grouping)
    }

    /// Mode sets listed under `rank.candidates`, each with matched filters.
    pub fn candidates(&self) -> Result<Vec<ModeSet>> {
        let s = self.require("rank.candidates")?;
        s.split(';').map(|c| parse_mode_set("rank.candidates", c)).collect()
    }

    pub fn pointing(&self) -> Result<PointingModel> {
        match (self.raw("pointing.sigma_theta_rad"), self.raw("pointing.r_ch_m")) {
            (Some(_), None) => Ok(PointingModel::Stochastic(PointingStats::new(
                self.f64("pointing.sigma_theta_rad")?,
                self.f64("geometry.distance_m")?,
            )?)),
            (None, Some(_)) => {
                let r = self.f64("pointing.r_ch_m")?;
                if !(r >= 0.0) {
                    return Err(Error::Config(format!("pointing.r_ch_m = {r} must be >= 0")));
                }
                Ok(PointingModel::Fixed(crate::beam::PointingState::radial(r)))
            }
            _ => Err(Error::Config(
                "set exactly one of pointing.sigma_theta_rad and pointing.r_ch_m".into(),
            )),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario {
            geometry: self.geometry()?,
            receiver: self.receiver()?,
            modes: self.modes()?,
            pointing: self.pointing()?,
            method: self.method()?,
            quad_order: self.usize("ber.quad_order")?,
            tx_power: self.f64("receiver.tx_power_w")?,
            quadrature: self.quadrature()?,
        })
    }

    pub fn trials(&self) -> Result<TrialConfig> {
        let refresh = match self.raw("mc.refresh").unwrap_or("per-symbol") {
            "per-symbol" => ChannelRefresh::PerSymbol,
            s => match s.strip_prefix("block:").map(|n| n.trim().parse::<u64>()) {
                Some(Ok(n)) => ChannelRefresh::PerBlock(n),
                _ => return Err(Error::Config(format!("mc.refresh: '{s}' not understood"))),
            },
        };
        let allow = if self.raw("mc.allow_degraded").is_some() {
            self.bool("mc.allow_degraded")?
        } else {
            false
        };
        Ok(TrialConfig::new(self.u64("mc.trials")?, self.u64("mc.seed")?, self.method()?)?
            .with_refresh(refresh)?
            .allowing_degraded(allow))
    }

    pub fn axis(&self) -> Result<(Axis, Vec<f64>)> {
        let axis: Axis = self.require("sweep.axis")?.parse()?;
        let values = self.f64_list("sweep.values")?;
        if values.is_empty() {
            return Err(Error::Config("sweep.values is empty".into()));
        }
        Ok((axis, values))
    }
}

fn parse_ints(key: &str, s: &str) -> Result<Vec<i32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Config(format!("{key}: '{}' is not an integer", t.trim())))
        })
        .collect()
}

fn parse_groups(key: &str, s: &str) -> Result<Vec<Vec<i32>>> {
    s.split('|').map(|g| parse_ints(key, g)).collect()
}

/// `-2,1` or `-4,-2|1,3`.
pub fn parse_mode_set(key: &str, s: &str) -> Result<ModeSet> {
    let groups = parse_groups(key, s)?;
    let tx: Vec<i32> = groups.iter().flatten().copied().collect();
    let grouping = (groups.len() > 1 && groups.iter().any(|g| g.len() > 1)).then_some(groups);
    ModeSet::new(tx.clone(), tx, grouping)
}

//! Parameter sweeps, waist optimization, mode-set ranking and timing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::beam::{ModeSet, PointingState};
use crate::ber::average_ber_with;
use crate::crosstalk::{CrosstalkModel, Method};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_ber_with, simulate_fixed_channel, TrialConfig};
use crate::scenario::{BerPoint, PointingModel, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    W0,
    RCh,
    SigmaTheta,
    Z,
}

impl Axis {
    /// Column name including the unit.
    pub fn column(self) -> &'static str {
        match self {
            Axis::W0 => "w0_m",
            Axis::RCh => "r_ch_m",
            Axis::SigmaTheta => "sigma_theta_rad",
            Axis::Z => "z_m",
        }
    }

    pub fn column_unit(self) -> &'static str {
        match self {
            Axis::W0 | Axis::RCh | Axis::Z => "m",
            Axis::SigmaTheta => "rad",
        }
    }

    pub fn apply(self, s: &Scenario, v: f64) -> Result<Scenario> {
        match self {
            Axis::W0 => s.with_waist(v),
            Axis::RCh => s.with_offset(v),
            Axis::SigmaTheta => s.with_sigma_theta(v),
            Axis::Z => s.with_distance(v),
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "w0" => Ok(Axis::W0),
            "r_ch" => Ok(Axis::RCh),
            "sigma_theta" => Ok(Axis::SigmaTheta),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::W0 => "w0",
            Axis::RCh => "r_ch",
            Axis::SigmaTheta => "sigma_theta",
            Axis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// One row per (transmit, filter) pair.
    Crosstalk,
    ConditionalBer,
    AveragedBer,
    MonteCarloBer,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Crosstalk => "crosstalk",
            Quantity::ConditionalBer => "ber_conditional",
            Quantity::AveragedBer => "ber_averaged",
            Quantity::MonteCarloBer => "ber_monte_carlo",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub fixed: Scenario,
    pub methods: Vec<Method>,
    pub outputs: Vec<Quantity>,
    /// Required when `outputs` contains [`Quantity::MonteCarloBer`].
    pub trials: Option<TrialConfig>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep grid must be strictly increasing".into()));
        }
        if self.methods.is_empty() || self.outputs.is_empty() {
            return Err(Error::Config("sweep needs at least one method and one output".into()));
        }
        if self.outputs.contains(&Quantity::MonteCarloBer) && self.trials.is_none() {
            return Err(Error::Config("Monte Carlo output requested without trial settings".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub method: Method,
    pub quantity: Quantity,
    /// Transmit and filter mode for crosstalk rows.
    pub pair: Option<(i32, i32)>,
    pub value: f64,
    /// 95% half-width for Monte Carlo rows.
    pub ci95: Option<f64>,
    pub status: String,
}

/// Every grid point x method x quantity, grid-major. Points that fail carry
/// the error in `status` and a NaN value.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let per_point: Vec<Vec<SweepRow>> = spec
        .grid
        .par_iter()
        .map(|&x| {
            let mut rows = Vec::new();
            for &method in &spec.methods {
                for &q in &spec.outputs {
                    rows.extend(point_rows(spec, x, method, q));
                }
            }
            rows
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

fn failed(x: f64, method: Method, quantity: Quantity, pair: Option<(i32, i32)>, e: Error) -> SweepRow {
    SweepRow {
        axis_value: x,
        method,
        quantity,
        pair,
        value: f64::NAN,
        ci95: None,
        status: format!("error: {e}"),
    }
}

fn point_rows(spec: &SweepSpec, x: f64, method: Method, q: Quantity) -> Vec<SweepRow> {
    let scenario = match spec.axis.apply(&spec.fixed, x) {
        Ok(s) => s.with_method(method),
        Err(e) => return vec![failed(x, method, q, None, e)],
    };
    let row = |value: f64, ci95: Option<f64>, status: String| SweepRow {
        axis_value: x,
        method,
        quantity: q,
        pair: None,
        value,
        ci95,
        status,
    };
    match q {
        Quantity::Crosstalk => crosstalk_rows(&scenario, x, method),
        Quantity::AveragedBer => match scenario.averaged_ber() {
            Ok(r) => vec![row(r.averaged, None, r.status_label())],
            Err(e) => vec![failed(x, method, q, None, e)],
        },
        Quantity::ConditionalBer => {
            let res = scenario.ber().map(|b| match b {
                BerPoint::Averaged(r) => (r.conditional, r.status.to_string()),
                BerPoint::Conditional { value, status } => (value, status.to_string()),
            });
            match res {
                Ok((v, s)) => vec![row(v, None, s)],
                Err(e) => vec![failed(x, method, q, None, e)],
            }
        }
        Quantity::MonteCarloBer => {
            let mut cfg = spec.trials.expect("validated");
            cfg.method = method;
            match monte_carlo(&scenario, &cfg) {
                Ok(o) => vec![row(o.ber_hat, Some(o.ci95_halfwidth), "ok".into())],
                Err(e) => vec![failed(x, method, q, None, e)],
            }
        }
    }
}

/// Monte Carlo at a scenario, stochastic or frozen pointing.
pub fn monte_carlo(s: &Scenario, cfg: &TrialConfig) -> Result<crate::montecarlo::TrialOutcome> {
    let model = s.model()?;
    match s.pointing {
        PointingModel::Stochastic(stats) => simulate_ber_with(&model, &s.modes, &stats, cfg),
        PointingModel::Fixed(p) => {
            let m = model.matrix(&s.modes, &p, cfg.method)?;
            let h = crate::ber::vectors_for(&m, &s.modes)?;
            simulate_fixed_channel(&h, s.receiver.noise_level, cfg)
        }
    }
}

fn crosstalk_rows(s: &Scenario, x: f64, method: Method) -> Vec<SweepRow> {
    let pointing = match s.pointing {
        PointingModel::Fixed(p) => p,
        PointingModel::Stochastic(st) => PointingState::radial(st.rayleigh_scale()),
    };
    let res = s.model().and_then(|m| m.matrix(&s.modes, &pointing, method));
    match res {
        Ok(m) => {
            let mut rows = Vec::new();
            for (n, &ln) in m.tx_modes.iter().enumerate() {
                for (j, &lj) in m.filter_modes.iter().enumerate() {
                    rows.push(SweepRow {
                        axis_value: x,
                        method,
                        quantity: Quantity::Crosstalk,
                        pair: Some((ln, lj)),
                        value: m.values[j][n],
                        ci95: None,
                        status: m.status.to_string(),
                    });
                }
            }
            rows
        }
        Err(e) => vec![failed(x, method, Quantity::Crosstalk, None, e)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

/// Result of a bracketed 1-D minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
    /// Three evaluated points, middle lowest, when the minimum is interior.
    pub bracket: Option<[(f64, f64); 3]>,
    /// Set when the pre-grid minimum sits on a bound.
    pub boundary: Option<Boundary>,
    pub evaluations: usize,
}

impl Optimum {
    pub fn is_interior(&self) -> bool {
        self.boundary.is_none() && self.bracket.is_some()
    }
}

/// Points in the coarse grid that seeds the bracket.
pub const PRE_GRID: usize = 8;

/// Golden-section minimization of `f` over `[lo, hi]`, seeded by an
/// 8-point grid. When the grid minimum sits on an end, the end cell is
/// refined as well; only if nothing inside beats the end value is the
/// result reported as a boundary optimum.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Optimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"
        )));
    }
    let grid: Vec<f64> = (0..PRE_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (PRE_GRID - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut evaluations = PRE_GRID;
    let mut best = 0;
    for i in 1..PRE_GRID {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    let last = PRE_GRID - 1;
    let (ia, ib) = match best {
        0 => (0, 1),
        b if b == last => (last - 1, last),
        b => (b - 1, b + 1),
    };
    let (a, fa, b, fb, x, value, n) = refine(&mut f, (grid[ia], vals[ia]), (grid[ib], vals[ib]), tol)?;
    evaluations += n;

    // the pre-grid point may still be the lowest seen
    let (x, value) = if vals[best] <= value { (grid[best], vals[best]) } else { (x, value) };
    let on_edge = (best == 0 || best == last) && x == grid[best];
    if on_edge {
        return Ok(Optimum {
            x,
            value,
            bracket: None,
            boundary: Some(if best == 0 { Boundary::Lower } else { Boundary::Upper }),
            evaluations,
        });
    }
    let bracket = if x > a && x < b && value <= fa && value <= fb {
        Some([(a, fa), (x, value), (b, fb)])
    } else {
        None
    };
    Ok(Optimum {
        x,
        value,
        bracket,
        boundary: None,
        evaluations,
    })
}

type Refined = (f64, f64, f64, f64, f64, f64, usize);

/// Golden-section shrink of `[a, b]`. Returns the final interval ends, the
/// best interior point and the number of evaluations.
fn refine<F>(f: &mut F, (mut a, mut fa): (f64, f64), (mut b, mut fb): (f64, f64), tol: f64) -> Result<Refined>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut n = 2;
    while b - a > tol {
        if fc <= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        n += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok((a, fa, b, fb, x, value, n))
}

/// Waist minimizing the Rayleigh-averaged BER of `fixed`.
pub fn optimize_w0(fixed: &Scenario, bounds: (f64, f64), tol: f64) -> Result<Optimum> {
    fixed.stats()?;
    golden_section(
        |w0| Ok(fixed.with_waist(w0)?.averaged_ber()?.averaged),
        bounds.0,
        bounds.1,
        tol,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub label: String,
    pub modes: ModeSet,
    pub ber: f64,
    pub method: Method,
    pub status: String,
}

/// Candidates sorted by averaged BER, best first. Every candidate must
/// carry exactly two data streams so the total transmit power is equal.
pub fn rank_mode_sets(candidates: &[ModeSet], fixed: &Scenario) -> Result<Vec<RankEntry>> {
    let stats = fixed.stats()?;
    for c in candidates {
        let streams = c.grouping().map_or(c.n_m(), |g| g.len());
        if streams != 2 {
            return Err(Error::Config(format!(
                "mode set {} has {streams} streams, ranking needs 2",
                c.label()
            )));
        }
    }
    let model = fixed.model()?;
    let mut out: Vec<RankEntry> = candidates
        .par_iter()
        .map(|c| {
            let r = average_ber_with(&model, c, &stats, fixed.method, fixed.quad_order)?;
            Ok(RankEntry {
                label: c.label(),
                modes: c.clone(),
                ber: r.averaged,
                method: fixed.method,
                status: r.status_label(),
            })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.ber.total_cmp(&b.ber).then_with(|| a.label.cmp(&b.label)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchEntry {
    pub name: String,
    /// Median wall time of one pass, seconds.
    pub median_s: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub entries: Vec<BenchEntry>,
    pub grid_points: usize,
    pub repetitions: usize,
    pub trials: u64,
}

impl BenchReport {
    pub fn median(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.median_s)
    }

    /// `time(slow) / time(fast)`.
    pub fn ratio(&self, slow: &str, fast: &str) -> Option<f64> {
        Some(self.median(slow)? / self.median(fast)?)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn time_it<F: FnMut() -> Result<()>>(repetitions: usize, mut f: F) -> Result<Vec<f64>> {
    (0..repetitions)
        .map(|_| {
            let t = Instant::now();
            f()?;
            Ok(t.elapsed().as_secs_f64().max(1e-9))
        })
        .collect()
}

/// Single-worker timings of each crosstalk method over the same grid of
/// `(r_ch, (l_n, l'_j))` points, plus analytic vs Monte Carlo BER at
/// `scenario` when `trials` is given.
pub fn bench_methods(
    scenario: &Scenario,
    grid: &[(f64, (i32, i32))],
    repetitions: usize,
    methods: &[Method],
    trials: Option<&TrialConfig>,
) -> Result<BenchReport> {
    if repetitions < 3 {
        return Err(Error::Config("benchmark needs at least 3 repetitions".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let model: CrosstalkModel = scenario.model()?;
    let n_m = scenario.modes.n_m();
    pool.install(|| {
        let mut entries = Vec::new();
        for &m in methods {
            let samples = time_it(repetitions, || {
                for &(r, (ln, lj)) in grid {
                    std::hint::black_box(model.evaluate(m, n_m, ln, lj, &PointingState::radial(r))?);
                }
                Ok(())
            })?;
            entries.push(BenchEntry {
                name: m.to_string(),
                median_s: median(samples.clone()),
                samples,
            });
        }
        if let Some(cfg) = trials {
            let stats = scenario.stats()?;
            let samples = time_it(repetitions, || {
                std::hint::black_box(average_ber_with(
                    &model,
                    &scenario.modes,
                    &stats,
                    cfg.method,
                    scenario.quad_order,
                )?);
                Ok(())
            })?;
            entries.push(BenchEntry {
                name: "ber_analytic".into(),
                median_s: median(samples.clone()),
                samples,
            });
            let samples = time_it(repetitions, || {
                std::hint::black_box(simulate_ber_with(&model, &scenario.modes, &stats, cfg)?);
                Ok(())
            })?;
            entries.push(BenchEntry {
                name: "ber_monte_carlo".into(),
                median_s: median(samples.clone()),
                samples,
            });
        }
        Ok(BenchReport {
            entries,
            grid_points: grid.len(),
            repetitions,
            trials: trials.map_or(0, |c| c.trials),
        })
    })
}

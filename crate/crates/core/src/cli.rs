//! Command implementations behind the `oamlink` binary.
//!
//! Each command reads a [`RunConfig`], writes one CSV table to the output
//! path and a `<output>.manifest` sidecar, and returns the process exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::beam::PointingState;
use crate::config::RunConfig;
use crate::crosstalk::{to_dbm, Method};
use crate::error::{Error, Result};
use crate::scenario::PointingModel;
use crate::sweep::{
    bench_methods, monte_carlo, optimize_w0, rank_mode_sets, run_sweep, Boundary, Quantity, SweepSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "OAMLINK_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CrosstalkCurve,
    /// `monte_carlo` adds simulated BER and its 95% half-width per point.
    BerCurve { monte_carlo: bool },
    MonteCarlo,
    Optimize,
    RankModes,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CrosstalkCurve => "crosstalk-curve",
            Command::BerCurve { .. } => "ber-curve",
            Command::MonteCarlo => "monte-carlo",
            Command::Optimize => "optimize",
            Command::RankModes => "rank-modes",
            Command::Bench => "bench",
        }
    }
}

/// A finished table plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    /// Column name and unit.
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<String>>,
    pub exit_code: i32,
    /// Extra manifest lines, `run.` prefix added on write.
    pub notes: Vec<(String, String)>,
}

impl Table {
    fn new(name: &'static str, columns: Vec<(&'static str, &'static str)>) -> Self {
        Table {
            name,
            columns,
            rows: Vec::new(),
            exit_code: EXIT_OK,
            notes: Vec::new(),
        }
    }

    fn escalate(&mut self, code: i32) {
        let rank = |c: i32| [EXIT_OK, EXIT_NOT_CONVERGED, EXIT_BOUNDARY, EXIT_CONFIG].iter().position(|&x| x == c);
        if rank(code) > rank(self.exit_code) {
            self.exit_code = code;
        }
    }

    fn check_status(&mut self, status: &str) {
        if status.contains("not_converged") || status.contains("unconverged") || status.contains("did not converge") {
            self.escalate(EXIT_NOT_CONVERGED);
        } else if status.starts_with("error") {
            self.escalate(EXIT_CONFIG);
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| *c == name)
    }

    /// `# schema` line followed by a CSV header and the rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let cols: Vec<String> = self.columns.iter().map(|(c, u)| format!("{c}[{u}]")).collect();
        writeln!(w, "# schema oamlink.{}/1 {}", self.name, cols.join(" "))?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(self.columns.iter().map(|(c, _)| *c))?;
        for r in &self.rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:e}")
    }
}

/// Worker count from the environment; `None` when unset.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{WORKERS_ENV}='{s}' is not a positive integer"))),
        },
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        Error::Io(_) | Error::Csv(_) => 1,
        _ => EXIT_CONFIG,
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Builds the table for `cmd` without touching the filesystem.
pub fn build(cmd: Command, cfg: &RunConfig) -> Result<Table> {
    match cmd {
        Command::CrosstalkCurve => crosstalk_curve(cfg),
        Command::BerCurve { monte_carlo } => ber_curve(cfg, monte_carlo),
        Command::MonteCarlo => monte_carlo_cmd(cfg),
        Command::Optimize => optimize(cfg),
        Command::RankModes => rank_modes(cfg),
        Command::Bench => bench(cfg),
    }
}

/// Runs `cmd`, writes the CSV and its manifest, and returns the exit code.
pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<i32> {
    let start = Instant::now();
    let table = build(cmd, cfg)?;
    let wall = start.elapsed().as_secs_f64();

    let mut w = BufWriter::new(File::create(out)?);
    table.write_csv(&mut w)?;
    w.flush()?;

    let mut m = BufWriter::new(File::create(manifest_path(out))?);
    write!(m, "{}", cfg.echo())?;
    let q = cfg.quadrature()?;
    let env_workers = workers_from_env()?;
    let mut run: Vec<(String, String)> = vec![
        ("command".into(), cmd.name().into()),
        ("tool_version".into(), env!("CARGO_PKG_VERSION").into()),
        ("output".into(), out.display().to_string()),
        ("rows".into(), table.rows.len().to_string()),
        ("exit_code".into(), table.exit_code.to_string()),
        ("wall_time_s".into(), format!("{wall:.3}")),
        ("workers".into(), rayon::current_num_threads().to_string()),
        (
            "workers_source".into(),
            if env_workers.is_some() { WORKERS_ENV } else { "default" }.into(),
        ),
        ("exact_radial".into(), q.exact_radial.to_string()),
        ("exact_azimuthal".into(), q.exact_azimuthal.to_string()),
        ("exact_max_doublings".into(), q.exact_max_doublings.to_string()),
        ("prop1_azimuthal".into(), q.prop1_azimuthal.to_string()),
    ];
    run.extend(table.notes.iter().cloned());
    for (k, v) in run {
        writeln!(m, "run.{k} = {v}")?;
    }
    m.flush()?;
    Ok(table.exit_code)
}

fn crosstalk_curve(cfg: &RunConfig) -> Result<Table> {
    let fixed = cfg.scenario_for_offsets()?;
    let grid = cfg.f64_list("curve.r_ch_m")?;
    let mut methods = cfg.methods("curve.methods")?;
    if methods.is_empty() {
        methods.push(fixed.method);
    }
    let rows = run_sweep(&SweepSpec {
        axis: crate::sweep::Axis::RCh,
        grid,
        fixed: fixed.clone(),
        methods,
        outputs: vec![Quantity::Crosstalk],
        trials: None,
    })?;
    let mut t = Table::new(
        "crosstalk-curve",
        vec![
            ("r_ch_m", "m"),
            ("ell_n", "1"),
            ("ell_j", "1"),
            ("method", "text"),
            ("C_watts", "W"),
            ("C_dBm", "dBm"),
            ("status", "text"),
        ],
    );
    for r in rows {
        t.check_status(&r.status);
        let (ln, lj) = r
            .pair
            .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        t.rows.push(vec![
            num(r.axis_value),
            ln,
            lj,
            r.method.to_string(),
            num(r.value),
            num(to_dbm(r.value, fixed.tx_power)),
            r.status,
        ]);
    }
    t.notes.push(("methods".into(), cfg.raw("curve.methods").unwrap_or("").into()));
    Ok(t)
}

fn ber_curve(cfg: &RunConfig, with_mc: bool) -> Result<Table> {
    let fixed = cfg.scenario_for_axis()?;
    let (axis, grid) = cfg.axis()?;
    let sets = match cfg.raw("sweep.mode_sets") {
        Some(s) => s
            .split(';')
            .map(|c| crate::config::parse_mode_set("sweep.mode_sets", c))
            .collect::<Result<Vec<_>>>()?,
        None => vec![fixed.modes.clone()],
    };
    let trials = if with_mc { Some(cfg.trials()?) } else { None };
    let quantity = if axis == crate::sweep::Axis::RCh {
        Quantity::ConditionalBer
    } else {
        Quantity::AveragedBer
    };
    let mut columns = vec![
        ("axis_value", axis.column_unit()),
        ("mode_set_id", "text"),
        ("method", "text"),
        ("ber_avg_raw", "1"),
        ("ber_avg_clamped", "1"),
        ("status", "text"),
    ];
    if with_mc {
        columns.push(("ber_mc", "1"));
        columns.push(("ci95", "1"));
    }
    let mut t = Table::new("ber-curve", columns);
    t.notes.push(("axis".into(), axis.column().into()));
    t.notes.push(("quantity".into(), quantity.to_string()));
    t.notes.push(("quad_order".into(), fixed.quad_order.to_string()));
    if let Some(c) = &trials {
        t.notes.push(("seed".into(), c.seed.to_string()));
        t.notes.push(("trials".into(), c.trials.to_string()));
    }
    for set in sets {
        let mut outputs = vec![quantity];
        if with_mc {
            outputs.push(Quantity::MonteCarloBer);
        }
        let rows = run_sweep(&SweepSpec {
            axis,
            grid: grid.clone(),
            fixed: fixed.with_modes(set.clone()),
            methods: vec![fixed.method],
            outputs,
            trials,
        })?;
        let label = set.label();
        let mut it = rows.into_iter().peekable();
        while let Some(r) = it.next() {
            t.check_status(&r.status);
            let mut row = vec![
                num(r.axis_value),
                label.clone(),
                r.method.to_string(),
                num(r.value),
                num(crate::ber::clamped(r.value)),
                r.status.clone(),
            ];
            if with_mc {
                let mc = it.next().expect("one Monte Carlo row per analytic row");
                if mc.status != "ok" {
                    t.check_status(&mc.status);
                    row[5] = format!("{};mc {}", r.status, mc.status);
                }
                row.push(num(mc.value));
                row.push(num(mc.ci95.unwrap_or(f64::NAN)));
            }
            t.rows.push(row);
        }
    }
    Ok(t)
}

fn monte_carlo_cmd(cfg: &RunConfig) -> Result<Table> {
    let s = cfg.scenario()?;
    let trials = cfg.trials()?;
    let outcome = monte_carlo(&s, &trials)?;
    let analytic = s.ber()?;
    let mut t = Table::new(
        "monte-carlo",
        vec![
            ("mode_set_id", "text"),
            ("method", "text"),
            ("seed", "1"),
            ("trials", "1"),
            ("errors", "1"),
            ("bit_errors", "1"),
            ("ber_mc", "1"),
            ("ci95", "1"),
            ("ber_analytic_raw", "1"),
            ("flagged_draws", "1"),
            ("channel_draws", "1"),
            ("status", "text"),
        ],
    );
    let status = analytic.status_label();
    t.check_status(&status);
    t.rows.push(vec![
        s.modes.label(),
        trials.method.to_string(),
        trials.seed.to_string(),
        outcome.trials.to_string(),
        outcome.errors.to_string(),
        outcome.bit_errors.to_string(),
        num(outcome.ber_hat),
        num(outcome.ci95_halfwidth),
        num(analytic.value()),
        outcome.flagged.to_string(),
        outcome.channel_draws.to_string(),
        status,
    ]);
    t.notes.push(("seed".into(), trials.seed.to_string()));
    Ok(t)
}

fn optimize(cfg: &RunConfig) -> Result<Table> {
    let base = cfg.scenario()?;
    base.stats()?;
    let lo = cfg.f64("optimize.w0_lo_m")?;
    let hi = cfg.f64("optimize.w0_hi_m")?;
    let tol = cfg.f64("optimize.tol_m")?;
    let mut sigmas = cfg.f64_list("optimize.sigma_theta_rad")?;
    if sigmas.is_empty() {
        sigmas.push(base.stats()?.sigma_theta);
    }
    let mut zs = cfg.f64_list("optimize.distance_m")?;
    if zs.is_empty() {
        zs.push(base.geometry.distance());
    }
    let mut t = Table::new(
        "optimize",
        vec![
            ("sigma_theta_rad", "rad"),
            ("z_m", "m"),
            ("mode_set_id", "text"),
            ("method", "text"),
            ("w0_opt_m", "m"),
            ("ber_opt", "1"),
            ("bracket_lo_m", "m"),
            ("bracket_mid_m", "m"),
            ("bracket_hi_m", "m"),
            ("ber_lo", "1"),
            ("ber_mid", "1"),
            ("ber_hi", "1"),
            ("boundary", "text"),
            ("evaluations", "1"),
        ],
    );
    for &z in &zs {
        for &sigma in &sigmas {
            let s = base.with_distance(z)?.with_sigma_theta(sigma)?;
            let opt = optimize_w0(&s, (lo, hi), tol)?;
            let mut row = vec![
                num(sigma),
                num(z),
                s.modes.label(),
                s.method.to_string(),
                num(opt.x),
                num(opt.value),
            ];
            match opt.bracket {
                Some(b) => {
                    row.extend(b.iter().map(|p| num(p.0)));
                    row.extend(b.iter().map(|p| num(p.1)));
                }
                None => row.extend(std::iter::repeat(String::new()).take(6)),
            }
            row.push(match opt.boundary {
                Some(Boundary::Lower) => "lower".into(),
                Some(Boundary::Upper) => "upper".into(),
                None if opt.bracket.is_none() => {
                    t.escalate(EXIT_NOT_CONVERGED);
                    "no_bracket".into()
                }
                None => "interior".into(),
            });
            if opt.boundary.is_some() {
                t.escalate(EXIT_BOUNDARY);
            }
            row.push(opt.evaluations.to_string());
            t.rows.push(row);
        }
    }
    t.notes.push(("bounds_m".into(), format!("{lo:e},{hi:e}")));
    t.notes.push(("tol_m".into(), format!("{tol:e}")));
    Ok(t)
}

fn rank_modes(cfg: &RunConfig) -> Result<Table> {
    let s = cfg.scenario()?;
    let ranked = rank_mode_sets(&cfg.candidates()?, &s)?;
    let mut t = Table::new(
        "rank-modes",
        vec![
            ("rank", "1"),
            ("mode_set_id", "text"),
            ("method", "text"),
            ("ber_avg_raw", "1"),
            ("ber_avg_clamped", "1"),
            ("status", "text"),
        ],
    );
    for (i, e) in ranked.into_iter().enumerate() {
        t.check_status(&e.status);
        t.rows.push(vec![
            (i + 1).to_string(),
            e.label,
            e.method.to_string(),
            num(e.ber),
            num(crate::ber::clamped(e.ber)),
            e.status,
        ]);
    }
    Ok(t)
}

fn bench(cfg: &RunConfig) -> Result<Table> {
    let s = cfg.scenario()?;
    let reps = cfg.usize("bench.repetitions")?;
    let points = cfg.usize("bench.grid_points")?;
    let (r_lo, r_hi) = (cfg.f64("bench.r_lo_m")?, cfg.f64("bench.r_hi_m")?);
    if points < 1 || !(r_lo < r_hi) {
        return Err(Error::Config("bench needs grid_points >= 1 and r_lo_m < r_hi_m".into()));
    }
    let mut methods = cfg.methods("bench.methods")?;
    if methods.is_empty() {
        methods = Method::ALL.to_vec();
    }
    let pairs: Vec<(i32, i32)> = s
        .modes
        .tx_modes()
        .iter()
        .flat_map(|&n| s.modes.filter_modes().iter().map(move |&j| (n, j)))
        .collect();
    let grid: Vec<(f64, (i32, i32))> = (0..points)
        .map(|i| {
            let r = if points == 1 {
                r_lo
            } else {
                r_lo + (r_hi - r_lo) * i as f64 / (points - 1) as f64
            };
            (r, pairs[i % pairs.len()])
        })
        .collect();
    let n_trials = cfg.u64("bench.trials")?;
    let trials = if n_trials > 0 {
        let mut c = cfg.trials()?;
        c.trials = n_trials;
        c.validate()?;
        Some(c)
    } else {
        None
    };
    let report = bench_methods(&s, &grid, reps, &methods, trials.as_ref())?;
    let mut t = Table::new(
        "bench",
        vec![
            ("name", "text"),
            ("median_s", "s"),
            ("reference", "text"),
            ("speedup", "1"),
        ],
    );
    for e in &report.entries {
        let reference = match e.name.as_str() {
            "ber_analytic" => "ber_monte_carlo",
            "ber_monte_carlo" => "",
            _ if report.median("exact2d").is_some() => "exact2d",
            _ => "",
        };
        let speedup = if reference.is_empty() {
            f64::NAN
        } else {
            report.ratio(reference, &e.name).unwrap_or(f64::NAN)
        };
        t.rows.push(vec![e.name.clone(), num(e.median_s), reference.into(), num(speedup)]);
    }
    t.notes.push(("bench_grid_points".into(), report.grid_points.to_string()));
    t.notes.push(("bench_repetitions".into(), report.repetitions.to_string()));
    t.notes.push(("bench_trials".into(), report.trials.to_string()));
    t.notes.push(("bench_workers".into(), "1".into()));
    Ok(t)
}

impl RunConfig {
    /// Scenario with the offset pinned at zero; commands that sweep the
    /// offset ignore the pointing section.
    fn scenario_for_offsets(&self) -> Result<crate::scenario::Scenario> {
        let mut c = self.clone();
        c.set("pointing.sigma_theta_rad", "")?;
        c.set("pointing.r_ch_m", "0")?;
        let mut s = c.scenario()?;
        s.pointing = PointingModel::Fixed(PointingState::aligned());
        Ok(s)
    }

    fn scenario_for_axis(&self) -> Result<crate::scenario::Scenario> {
        let axis: crate::sweep::Axis = self
            .raw("sweep.axis")
            .ok_or_else(|| Error::Config("missing value for sweep.axis".into()))?
            .parse()?;
        if axis == crate::sweep::Axis::RCh {
            self.scenario_for_offsets()
        } else {
            self.scenario()
        }
    }
}

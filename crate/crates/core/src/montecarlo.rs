//! Monte Carlo estimate of the ML detector's vector error rate.
//!
//! Trials are cut into fixed-size chunks. Chunk `c` draws from a ChaCha
//! stream keyed by `(seed, c)`, so the outcome depends only on the seed and
//! the configuration, never on how many threads ran the chunks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::beam::{LinkGeometry, ModeSet, PointingState};
use crate::ber::{vectors_for, ChannelVectors, PointingStats};
use crate::crosstalk::{CrosstalkModel, Method, ReceiverConfig, Status};
use crate::error::{Error, Result};

/// Trials per RNG stream.
pub const CHUNK_TRIALS: u64 = 4096;

/// Smallest trial count accepted.
pub const MIN_TRIALS: u64 = 1000;

/// All OOK hypotheses for two streams, in tie-break order.
pub const HYPOTHESES: [[u8; 2]; 4] = [[0, 0], [1, 0], [0, 1], [1, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelRefresh {
    /// New pointing draw for every symbol interval.
    PerSymbol,
    /// One pointing draw held for this many consecutive symbols.
    PerBlock(u64),
}

impl ChannelRefresh {
    fn block_len(self) -> u64 {
        match self {
            ChannelRefresh::PerSymbol => 1,
            ChannelRefresh::PerBlock(b) => b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub method: Method,
    pub refresh: ChannelRefresh,
    /// Accept runs where more than 0.1% of channel draws carry an evaluator
    /// warning.
    pub allow_degraded: bool,
}

impl TrialConfig {
    pub fn new(trials: u64, seed: u64, method: Method) -> Result<Self> {
        let cfg = Self {
            trials,
            seed,
            method,
            refresh: ChannelRefresh::PerSymbol,
            allow_degraded: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_refresh(mut self, refresh: ChannelRefresh) -> Result<Self> {
        self.refresh = refresh;
        self.validate()?;
        Ok(self)
    }

    pub fn allowing_degraded(mut self, allow: bool) -> Self {
        self.allow_degraded = allow;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::Domain(format!(
                "{} trials requested, at least {MIN_TRIALS} required",
                self.trials
            )));
        }
        if self.refresh.block_len() == 0 {
            return Err(Error::Domain("block length must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Symbol intervals with at least one wrong stream.
    pub errors: u64,
    /// Wrong stream decisions, two per interval at most.
    pub bit_errors: u64,
    pub trials: u64,
    pub ber_hat: f64,
    pub ci95_halfwidth: f64,
    /// Channel draws whose crosstalk evaluation carried a warning.
    pub flagged: u64,
    pub channel_draws: u64,
}

impl TrialOutcome {
    fn from_counts(c: Counts, trials: u64) -> Self {
        let p = c.errors as f64 / trials as f64;
        Self {
            errors: c.errors,
            bit_errors: c.bit_errors,
            trials,
            ber_hat: p,
            ci95_halfwidth: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            flagged: c.flagged,
            channel_draws: c.draws,
        }
    }

    pub fn bit_error_rate(&self) -> f64 {
        self.bit_errors as f64 / (2 * self.trials) as f64
    }
}

/// Beam-center offset from per-axis Gaussian angular jitter.
pub fn draw_pointing<R: Rng + ?Sized>(stats: &PointingStats, rng: &mut R) -> PointingState {
    let tx: f64 = rng.sample(StandardNormal);
    let ty: f64 = rng.sample(StandardNormal);
    PointingState::new(
        tx * stats.sigma_theta * stats.distance,
        ty * stats.sigma_theta * stats.distance,
    )
}

/// Hypothesis minimizing `|y - sum_s a_s h_s|^2`; `columns[s]` is the
/// signature of stream `s`. Ties go to the earliest hypothesis.
pub fn ml_detect<'a>(y: &[f64], columns: &[Vec<f64>], hypotheses: &'a [Vec<u8>]) -> Result<&'a [u8]> {
    if hypotheses.is_empty() {
        return Err(Error::Domain("empty hypothesis list".into()));
    }
    for c in columns {
        if c.len() != y.len() {
            return Err(Error::Dimension {
                expected: format!("columns of length {}", y.len()),
                found: format!("{}", c.len()),
            });
        }
    }
    let mut best = 0;
    let mut best_metric = f64::INFINITY;
    for (i, a) in hypotheses.iter().enumerate() {
        if a.len() != columns.len() {
            return Err(Error::Dimension {
                expected: format!("hypotheses of length {}", columns.len()),
                found: format!("{}", a.len()),
            });
        }
        let metric: f64 = y
            .iter()
            .enumerate()
            .map(|(j, &yj)| {
                let mean: f64 = columns.iter().zip(a).map(|(c, &s)| s as f64 * c[j]).sum();
                (yj - mean).powi(2)
            })
            .sum();
        if metric < best_metric {
            best_metric = metric;
            best = i;
        }
    }
    Ok(&hypotheses[best])
}

/// Two-stream detector used inside the trial loop.
fn detect2(y: &[f64], h: &ChannelVectors) -> usize {
    let mut best = 0;
    let mut best_metric = f64::INFINITY;
    for (i, a) in HYPOTHESES.iter().enumerate() {
        let (a1, a2) = (a[0] as f64, a[1] as f64);
        let metric: f64 = y
            .iter()
            .zip(h.h1.iter().zip(&h.h2))
            .map(|(&yj, (&p, &q))| (yj - a1 * p - a2 * q).powi(2))
            .sum();
        if metric < best_metric {
            best_metric = metric;
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    errors: u64,
    bit_errors: u64,
    flagged: u64,
    draws: u64,
}

/// Runs `trials` symbol intervals. `channel` is asked for a fresh channel
/// at the start of each refresh block.
fn run_trials<F>(cfg: &TrialConfig, n0: f64, channel: F) -> Result<TrialOutcome>
where
    F: Fn(&mut ChaCha12Rng) -> Result<(ChannelVectors, Status)> + Sync,
{
    cfg.validate()?;
    if !(n0.is_finite() && n0 >= 0.0) {
        return Err(Error::Domain(format!("noise level {n0} invalid")));
    }
    let sigma = n0.sqrt();
    let block = cfg.refresh.block_len();
    // whole blocks per chunk so no block straddles two streams
    let chunk = CHUNK_TRIALS.div_ceil(block) * block;
    let n_chunks = cfg.trials.div_ceil(chunk);

    let per_chunk: Vec<Counts> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let start = c * chunk;
            let len = chunk.min(cfg.trials - start);
            let mut counts = Counts::default();
            let mut h: Option<ChannelVectors> = None;
            let mut y = Vec::new();
            for t in 0..len {
                if t % block == 0 {
                    let (v, status) = channel(&mut rng)?;
                    counts.draws += 1;
                    if status != Status::Ok {
                        counts.flagged += 1;
                    }
                    y.resize(v.dim(), 0.0);
                    h = Some(v);
                }
                let h = h.as_ref().expect("drawn at block start");
                let truth = rng.gen_range(0..4usize);
                let (a1, a2) = (HYPOTHESES[truth][0] as f64, HYPOTHESES[truth][1] as f64);
                for (j, yj) in y.iter_mut().enumerate() {
                    let n: f64 = rng.sample(StandardNormal);
                    *yj = a1 * h.h1[j] + a2 * h.h2[j] + sigma * n;
                }
                let got = detect2(&y, h);
                if got != truth {
                    counts.errors += 1;
                    counts.bit_errors += HYPOTHESES[got]
                        .iter()
                        .zip(&HYPOTHESES[truth])
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let total = per_chunk.iter().fold(Counts::default(), |acc, c| Counts {
        errors: acc.errors + c.errors,
        bit_errors: acc.bit_errors + c.bit_errors,
        flagged: acc.flagged + c.flagged,
        draws: acc.draws + c.draws,
    });
    if !cfg.allow_degraded && total.flagged * 1000 > total.draws {
        return Err(Error::DegradedTrials {
            flagged: total.flagged,
            trials: total.draws,
        });
    }
    Ok(TrialOutcome::from_counts(total, cfg.trials))
}

/// Full stochastic link: random pointing, crosstalk by `cfg.method`, random
/// OOK symbols, real Gaussian noise of variance `rx.noise_level`.
pub fn simulate_ber(
    geom: &LinkGeometry,
    rx: &ReceiverConfig,
    modes: &ModeSet,
    stats: &PointingStats,
    cfg: &TrialConfig,
) -> Result<TrialOutcome> {
    let model = CrosstalkModel::new(geom, rx)?;
    simulate_ber_with(&model, modes, stats, cfg)
}

pub fn simulate_ber_with(
    model: &CrosstalkModel,
    modes: &ModeSet,
    stats: &PointingStats,
    cfg: &TrialConfig,
) -> Result<TrialOutcome> {
    run_trials(cfg, model.receiver().noise_level, |rng| {
        let pointing = draw_pointing(stats, rng);
        let m = model.matrix(modes, &pointing, cfg.method)?;
        Ok((vectors_for(&m, modes)?, m.status))
    })
}

/// Trials over one fixed channel, for synthetic or frozen-pointing checks.
pub fn simulate_fixed_channel(h: &ChannelVectors, n0: f64, cfg: &TrialConfig) -> Result<TrialOutcome> {
    run_trials(cfg, n0, |_| Ok((h.clone(), Status::Ok)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(trials: u64, seed: u64) -> TrialConfig {
        TrialConfig::new(trials, seed, Method::Prop3).unwrap()
    }

    #[test]
    fn config_guards() {
        assert!(TrialConfig::new(999, 1, Method::Prop3).is_err());
        assert!(cfg(1000, 1).with_refresh(ChannelRefresh::PerBlock(0)).is_err());
    }

    #[test]
    fn detector_basics() {
        let hyps: Vec<Vec<u8>> = HYPOTHESES.iter().map(|h| h.to_vec()).collect();
        let g = 3.0;
        let cols = vec![vec![g, 0.0], vec![0.0, g]];
        assert_eq!(ml_detect(&[g, 0.0], &cols, &hyps).unwrap(), &[1, 0]);
        assert_eq!(ml_detect(&[0.0, 0.0], &cols, &hyps).unwrap(), &[0, 0]);
        assert_eq!(ml_detect(&[g, g], &cols, &hyps).unwrap(), &[1, 1]);
        assert!(ml_detect(&[0.0], &cols, &hyps).is_err());
    }

    #[test]
    fn pointing_sampler_moments() {
        let stats = PointingStats::new(20e-6, 1e6).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 1_000_000;
        let (mut sx, mut sr, mut sr2) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let p = draw_pointing(&stats, &mut rng);
            sx += p.x_ch;
            sr += p.r_ch();
            sr2 += p.r_ch() * p.r_ch();
        }
        let nf = n as f64;
        let se = 20.0 / nf.sqrt();
        assert!((sx / nf).abs() < 4.0 * se);
        let mean = sr / nf;
        let sd = (sr2 / nf - mean * mean).sqrt();
        let want = 20.0 * (2.0 - std::f64::consts::PI / 2.0).sqrt();
        assert!((sd / want - 1.0).abs() < 0.01, "{sd} vs {want}");
    }

    #[test]
    fn sampler_is_reproducible() {
        let stats = PointingStats::new(20e-6, 1e6).unwrap();
        let mut a = ChaCha12Rng::seed_from_u64(99);
        let mut b = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..100 {
            assert_eq!(draw_pointing(&stats, &mut a), draw_pointing(&stats, &mut b));
        }
    }

    #[test]
    fn noiseless_separable_channel_is_error_free() {
        let h = ChannelVectors::new(vec![1.0, 0.1], vec![0.05, 0.8]).unwrap();
        let out = simulate_fixed_channel(&h, 0.0, &cfg(10_000, 3)).unwrap();
        assert_eq!(out.errors, 0);
        assert_eq!(out.ber_hat, 0.0);
    }

    #[test]
    fn coincident_signatures_give_quarter() {
        let h = ChannelVectors::new(vec![1.0, 0.5], vec![1.0, 0.5]).unwrap();
        let out = simulate_fixed_channel(&h, 1e-6, &cfg(100_000, 11)).unwrap();
        assert!((out.ber_hat - 0.25).abs() <= 3.0 * out.ci95_halfwidth, "{out:?}");
    }

    #[test]
    fn independent_of_worker_count() {
        let h = ChannelVectors::new(vec![1.0, 0.4], vec![0.3, 0.9]).unwrap();
        let c = cfg(50_000, 5);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_fixed_channel(&h, 0.1, &c).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
        assert!(one.errors > 0);
    }

    #[test]
    fn ci_shrinks_by_sqrt_two() {
        let h = ChannelVectors::new(vec![1.0, 0.4], vec![0.3, 0.9]).unwrap();
        let a = simulate_fixed_channel(&h, 0.2, &cfg(200_000, 1)).unwrap();
        let b = simulate_fixed_channel(&h, 0.2, &cfg(400_000, 1)).unwrap();
        let ratio = a.ci95_halfwidth / b.ci95_halfwidth;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn block_refresh_draws_fewer_channels() {
        let g = LinkGeometry::new(1550e-9, 0.025, 0, 1e6).unwrap();
        let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.7e-15, 6).unwrap();
        let modes = ModeSet::matched(&[-2, 1]).unwrap();
        let stats = PointingStats::new(20e-6, 1e6).unwrap();
        let c = cfg(10_000, 2).allowing_degraded(true).with_refresh(ChannelRefresh::PerBlock(100)).unwrap();
        let out = simulate_ber(&g, &rx, &modes, &stats, &c).unwrap();
        assert_eq!(out.channel_draws, 100);
        let per = simulate_ber(&g, &rx, &modes, &stats, &cfg(10_000, 2).allowing_degraded(true)).unwrap();
        assert_eq!(per.channel_draws, 10_000);
    }

    #[test]
    fn degraded_runs_abort_without_override() {
        // sigma_r = 2 m puts ~12% of draws under the 1 m floor
        let g = LinkGeometry::new(1550e-9, 0.025, 0, 1e6).unwrap();
        let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.7e-15, 6).unwrap();
        let modes = ModeSet::matched(&[-2, 1]).unwrap();
        let stats = PointingStats::new(2e-6, 1e6).unwrap();
        let err = simulate_ber(&g, &rx, &modes, &stats, &cfg(2000, 4)).unwrap_err();
        assert!(matches!(err, Error::DegradedTrials { .. }));
        assert!(simulate_ber(&g, &rx, &modes, &stats, &cfg(2000, 4).allowing_degraded(true)).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn detector_matches_brute_force(
            y in prop::collection::vec(-2.0f64..3.0, 3),
            h1 in prop::collection::vec(0.0f64..2.0, 3),
            h2 in prop::collection::vec(0.0f64..2.0, 3),
        ) {
            let hyps: Vec<Vec<u8>> = HYPOTHESES.iter().map(|h| h.to_vec()).collect();
            let cols = vec![h1.clone(), h2.clone()];
            let got = ml_detect(&y, &cols, &hyps).unwrap().to_vec();
            // brute force, written out per hypothesis
            let dist = |a: f64, b: f64| -> f64 {
                (0..3).map(|j| { let d = y[j] - a * h1[j] - b * h2[j]; d * d }).sum()
            };
            let d = [dist(0.0, 0.0), dist(1.0, 0.0), dist(0.0, 1.0), dist(1.0, 1.0)];
            let mut k = 0;
            for i in 1..4 { if d[i] < d[k] { k = i; } }
            prop_assert_eq!(got, hyps[k].clone());
            let v = ChannelVectors::new(h1, h2).unwrap();
            prop_assert_eq!(detect2(&y, &v), k);
        }

        #[test]
        fn errors_monotone_in_noise(seed in 0u64..1000, n0 in 0.01f64..1.0, f in 1.0f64..4.0) {
            let h = ChannelVectors::new(vec![1.0, 0.4], vec![0.3, 0.9]).unwrap();
            let c = cfg(5000, seed);
            let lo = simulate_fixed_channel(&h, n0, &c).unwrap();
            let hi = simulate_fixed_channel(&h, n0 * f, &c).unwrap();
            prop_assert!(hi.errors >= lo.errors);
        }
    }
}

//! Simulated BER next to the analytic union bound at a few waists.

use oamlink::beam::{LinkGeometry, ModeSet};
use oamlink::ber::{average_ber, PointingStats};
use oamlink::crosstalk::{Method, ReceiverConfig};
use oamlink::montecarlo::{simulate_ber, TrialConfig};

fn main() -> oamlink::Result<()> {
    let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.71e-15, 6)?;
    let modes = ModeSet::matched(&[-2, 1])?;
    let stats = PointingStats::new(20e-6, 1.0e6)?;
    let cfg = TrialConfig::new(200_000, 11, Method::Prop3)?.allowing_degraded(true);

    println!("{:>8} {:>12} {:>12} {:>10}", "w0[cm]", "analytic", "simulated", "ci95");
    for w0 in [0.015, 0.025, 0.035] {
        let geom = LinkGeometry::new(1.55e-6, w0, 0, 1.0e6)?;
        let a = average_ber(&geom, &rx, &modes, &stats, Method::Prop3, 128)?;
        let mc = simulate_ber(&geom, &rx, &modes, &stats, &cfg)?;
        println!(
            "{:>8.1} {:>12.4e} {:>12.4e} {:>10.2e}",
            w0 * 100.0,
            a.averaged,
            mc.ber_hat,
            mc.ci95_halfwidth
        );
    }
    Ok(())
}

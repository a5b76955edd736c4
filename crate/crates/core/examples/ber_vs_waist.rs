//! Averaged BER against transmit waist at three jitter levels.

use oamlink::beam::{LinkGeometry, ModeSet};
use oamlink::ber::{average_ber, PointingStats};
use oamlink::crosstalk::{Method, ReceiverConfig};

fn main() -> oamlink::Result<()> {
    let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.71e-15, 6)?;
    let modes = ModeSet::matched(&[-2, 1])?;
    let waists = [0.01, 0.015, 0.02, 0.025, 0.03, 0.04, 0.05];

    print!("{:>10}", "w0 [cm]");
    for w0 in waists {
        print!("{:>11.1}", w0 * 100.0);
    }
    println!();
    for sigma in [10e-6, 20e-6, 30e-6] {
        let stats = PointingStats::new(sigma, 1.0e6)?;
        print!("{:>7.0} ur", sigma * 1e6);
        for w0 in waists {
            let geom = LinkGeometry::new(1.55e-6, w0, 0, 1.0e6)?;
            let r = average_ber(&geom, &rx, &modes, &stats, Method::Prop3, 128)?;
            print!("{:>11.3e}", r.clamped());
        }
        println!();
    }
    Ok(())
}

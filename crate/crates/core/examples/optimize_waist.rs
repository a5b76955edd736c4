//! Best transmit waist for each jitter level.

use oamlink::config::RunConfig;
use oamlink::sweep::optimize_w0;

const BASE: &str = include_str!("../configs/default.conf");

fn main() -> oamlink::Result<()> {
    let base = RunConfig::parse(BASE)?.scenario()?;
    for sigma in [10e-6, 20e-6, 30e-6] {
        let s = base.with_sigma_theta(sigma)?;
        let opt = optimize_w0(&s, (0.01, 0.06), 1e-4)?;
        match opt.bracket {
            Some([(a, _), _, (b, _)]) => println!(
                "sigma {:>4.0} urad: w0* = {:.2} cm, BER {:.3e}, bracket [{:.3}, {:.3}] cm",
                sigma * 1e6,
                opt.x * 100.0,
                opt.value,
                a * 100.0,
                b * 100.0
            ),
            None => println!("sigma {:>4.0} urad: boundary optimum {:?} at {:.2} cm", sigma * 1e6, opt.boundary, opt.x * 100.0),
        }
    }
    Ok(())
}

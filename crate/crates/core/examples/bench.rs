//! Single-worker timing of every crosstalk evaluator on a small grid.

use oamlink::config::RunConfig;
use oamlink::crosstalk::Method;
use oamlink::sweep::bench_methods;

fn main() -> oamlink::Result<()> {
    let s = RunConfig::parse(include_str!("../configs/default.conf"))?.scenario()?;
    let grid: Vec<_> = (0..10)
        .map(|i| (4.0 + 2.0 * i as f64, if i % 2 == 0 { (-2, 1) } else { (1, 1) }))
        .collect();
    let report = bench_methods(&s, &grid, 3, &Method::ALL, None)?;
    for e in &report.entries {
        let speedup = report.ratio("exact2d", &e.name).unwrap_or(f64::NAN);
        println!("{:<8} {:>10.3e} s  x{:.0}", e.name, e.median_s, speedup);
    }
    Ok(())
}

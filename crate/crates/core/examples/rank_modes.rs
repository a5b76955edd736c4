//! Which two-stream mode set survives pointing jitter best.

use oamlink::config::{parse_mode_set, RunConfig};
use oamlink::sweep::rank_mode_sets;

fn main() -> oamlink::Result<()> {
    let base = RunConfig::parse(include_str!("../configs/default.conf"))?.scenario()?;
    let candidates = ["-2,1", "-1,1", "-2,2", "-3,3", "1,3", "-4,-2|1,3"]
        .iter()
        .map(|s| parse_mode_set("candidates", s))
        .collect::<oamlink::Result<Vec<_>>>()?;

    for w0 in [0.015, 0.025] {
        println!("w0 = {:.1} cm", w0 * 100.0);
        for (i, e) in rank_mode_sets(&candidates, &base.with_waist(w0)?)?.iter().enumerate() {
            println!("  {:>2}. {:<12} {:.3e}", i + 1, e.label, e.ber);
        }
    }
    Ok(())
}

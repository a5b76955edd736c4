//! Propagate an LG beam to the receiver and print a radial intensity cut.

use oamlink::beam::{LgMode, LinkGeometry};

fn main() -> oamlink::Result<()> {
    let geom = LinkGeometry::new(1.55e-6, 0.025, 0, 1.0e6)?;
    println!(
        "z_R = {:.1} m, w(Z) = {:.2} m, R(Z) = {:.4e} m",
        geom.rayleigh_range(),
        geom.beam_radius_at_rx(),
        geom.curvature_at_rx()
    );

    let w = geom.beam_radius_at_rx();
    for ell in [1, 2, 4] {
        let mode = LgMode::new(&geom, ell, geom.distance())?;
        // intensity peaks near r = w sqrt(|l|/2) for p = 0
        let peak = w * (ell as f64 / 2.0).sqrt();
        print!("l = {ell}: peak expected at {peak:.2} m |");
        for i in 0..=8 {
            let r = w * i as f64 / 4.0;
            print!(" {:.2e}", mode.polar(r, 0.0).norm_sqr());
        }
        println!();
    }
    Ok(())
}

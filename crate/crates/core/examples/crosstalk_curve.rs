//! Crosstalk of a two-mode link against lateral offset, exact and closed form.

use oamlink::beam::{LinkGeometry, ModeSet, PointingState};
use oamlink::crosstalk::{to_dbm, CrosstalkModel, Method, ReceiverConfig};

fn main() -> oamlink::Result<()> {
    let geom = LinkGeometry::new(1.55e-6, 0.025, 0, 1.0e6)?;
    let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.71e-15, 6)?;
    let model = CrosstalkModel::new(&geom, &rx)?;
    let modes = ModeSet::matched(&[-2, 1])?;

    println!("{:>6} {:>6} {:>12} {:>12} {:>12}", "r_ch", "pair", "exact2d", "prop1", "prop3");
    for r in [2.0, 5.0, 10.0, 20.0] {
        let p = PointingState::radial(r);
        let m: Vec<_> = [Method::Exact2D, Method::Prop1, Method::Prop3]
            .iter()
            .map(|&method| model.matrix(&modes, &p, method))
            .collect::<oamlink::Result<_>>()?;
        for (n, &ln) in modes.tx_modes().iter().enumerate() {
            for (j, &lj) in modes.filter_modes().iter().enumerate() {
                print!("{r:>6.1} {:>6}", format!("{ln}->{lj}"));
                for mat in &m {
                    print!(" {:>12.2}", to_dbm(mat.values[j][n], 1.0));
                }
                println!();
            }
        }
    }
    Ok(())
}

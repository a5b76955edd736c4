//! Pick the noise level that puts the weakest aligned diagonal at a target
//! SNR for a given offset.

use oamlink::beam::{LinkGeometry, ModeSet, PointingState};
use oamlink::crosstalk::{CrosstalkModel, Method, ReceiverConfig};

fn main() -> oamlink::Result<()> {
    let geom = LinkGeometry::new(1.55e-6, 0.025, 0, 1.0e6)?;
    let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 1.0, 6)?;
    let model = CrosstalkModel::new(&geom, &rx)?;
    let modes = ModeSet::matched(&[-2, 1])?;
    let target_snr = 36.0;

    for r in [0.0, 2.0, 5.0] {
        let m = model.matrix(&modes, &PointingState::radial(r), Method::Exact2D)?;
        let weakest = (0..modes.n_m()).map(|i| m.values[i][i]).fold(f64::INFINITY, f64::min);
        println!("r_ch = {r:>3} m: weakest diagonal {weakest:.3e} W -> N0 = {:.3e}", weakest / (4.0 * target_snr));
    }
    Ok(())
}

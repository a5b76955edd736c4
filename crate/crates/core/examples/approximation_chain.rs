//! How each closed-form step tracks the exact integral at one offset.

use oamlink::beam::{LinkGeometry, PointingState};
use oamlink::crosstalk::{CrosstalkModel, Method, ReceiverConfig};

fn main() -> oamlink::Result<()> {
    let geom = LinkGeometry::new(1.55e-6, 0.025, 0, 1.0e6)?;
    let rx = ReceiverConfig::new(0.05, 1.0, 1.0, 4.71e-15, 6)?;
    let model = CrosstalkModel::new(&geom, &rx)?;

    for (ln, lj) in [(4, 4), (1, -2), (-2, 1)] {
        for r in [4.0, 10.0, 25.0] {
            let p = PointingState::radial(r);
            let exact = model.evaluate(Method::Exact2D, 2, ln, lj, &p)?;
            print!("l={ln:>2} l'={lj:>2} r={r:>4.0} exact {:.4e}", exact.watts);
            for m in [Method::Prop1, Method::Prop2, Method::Prop3, Method::Prop4] {
                let c = model.evaluate(m, 2, ln, lj, &p)?;
                print!("  {m} x{:.3}", c.watts / exact.watts);
            }
            println!();
        }
    }
    Ok(())
}

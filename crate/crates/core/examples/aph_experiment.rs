//! Access-pattern hiding: honest runs sit at a coin flip, broken variants do not.

use propyla::harness::aph::{run_propyla_aph, PropylaAphParams, PropylaControl, PropylaDistinguisher};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = 200;
    for d in PropylaDistinguisher::ALL {
        let o = run_propyla_aph(&PropylaAphParams::desk(d, PropylaControl::None, trials))?;
        println!("{d:?}: {:.3}", o.rate);
    }
    let broken = [
        (PropylaDistinguisher::ByteComparison, PropylaControl::RefreshDisabled),
        (PropylaDistinguisher::ShareReconstruction, PropylaControl::ThresholdViolated),
    ];
    for (d, c) in broken {
        let o = run_propyla_aph(&PropylaAphParams::desk(d, c, trials))?;
        println!("{d:?} with {c:?}: {:.3}", o.rate);
    }
    Ok(())
}

//! Store a block, let renewals run for twelve years and verify what comes back.

use propyla::evidence::{verify_int, verify_int_report};
use propyla::parties::{Config, System};
use propyla::time::Day;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut sys = System::init(Config::tiny())?;
    sys.write(2, b"deed of sale")?;
    for e in sys.advance(Day::from_years(12))? {
        println!("day {:>5}: {:?}", e.at.0, e.kind);
    }
    let r = sys.read(2)?;
    println!("read back {:?}, {} evidence entries", String::from_utf8_lossy(&r.dat), r.evidence.len());
    for (i, e) in r.evidence.entries.iter().enumerate() {
        let t = e.ts.as_ref().map(|ts| ts.t.0);
        println!("  {}: {:?} stamped {:?}", i + 1, e.op, t);
    }
    let ta = sys.trust_anchor();
    println!("verifies: {}", verify_int(ta, &r.dat, Day::ZERO, &r.evidence, sys.now()));
    let forged = verify_int_report(ta, b"deed of gift", Day::ZERO, &r.evidence, sys.now());
    println!("altered data: {}", forged.failure.map(|f| f.to_string()).unwrap_or_default());
    Ok(())
}

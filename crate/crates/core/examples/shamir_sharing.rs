//! Split a secret 3-of-5, rebuild it from any three shares, then reshare.

use propyla::crypto::make_rng;
use propyla::sharing::{reconstruct, reshare, share};

fn main() {
    let mut rng = make_rng(Some(7));
    let secret = b"meet at the old lighthouse";
    let set = share(secret, 5, 3, &mut rng).expect("valid parameters");
    for s in &set.shares {
        println!("share x={} y={}", s.x, hex::encode(&s.y));
    }

    let picked = [set.shares[0].clone(), set.shares[2].clone(), set.shares[4].clone()];
    let back = reconstruct(&picked, 3).expect("three shares suffice");
    println!("from shares 1,3,5: {}", String::from_utf8_lossy(&back));

    let fresh = reshare(&set, &mut rng);
    let again = reconstruct(&fresh.shares[1..4], 3).expect("three shares suffice");
    println!("after resharing, share 1 changed: {}", fresh.shares[0].y != set.shares[0].y);
    println!("secret kept: {}", again == secret);
}

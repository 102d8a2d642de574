//! Commit to a message, open it, and watch a wrong opening fail.

use propyla::codec::encode_bytes;
use propyla::crypto::{commit, make_rng, ver_com, HashBits, SchemeInstance, SchemeParams, TrustAnchor};
use propyla::time::{Day, Window};

fn main() {
    let mut rng = make_rng(Some(11));
    let w = Window::new(Day(0), Day::from_years(10));
    let csi = SchemeInstance {
        instance_id: "HM-256-demo".into(),
        params: SchemeParams::Commitment { name: "HM-256".into(), hash: HashBits::H256 },
        usage: w,
        validity: w,
    };
    let mut ta = TrustAnchor::default();
    ta.insert_commitment(csi.clone());

    let m = encode_bytes(b"ledger page 42");
    let (c, d) = commit(&csi, &m, &mut rng).expect("commitment instance");
    println!("commitment body: {} bytes", c.body().len());
    println!("opens to the message: {}", ver_com(&ta, &m, &c, &d, Day(100)));

    let other = encode_bytes(b"ledger page 43");
    println!("opens to another message: {}", ver_com(&ta, &other, &c, &d, Day(100)));
    println!("checked after expiry: {}", ver_com(&ta, &m, &c, &d, Day::from_years(11)));
}

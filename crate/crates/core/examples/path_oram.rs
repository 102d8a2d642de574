//! Access patterns of the tree ORAM: every access reads and rewrites one random path.

use propyla::crypto::make_rng;
use propyla::oram::OramState;

fn main() {
    let mut rng = make_rng(Some(3));
    let (mut oram, slots) = OramState::setup(16, 5, &mut rng).expect("valid parameters");
    println!("16 blocks, height {}, {} slots, {} per path", oram.height(), slots, oram.path_len());
    for id in [1, 1, 2, 1, 9] {
        let ap = oram.gen_ap(id, &mut rng).expect("id in range");
        let leaf_bucket: Vec<usize> = ap.pairs[ap.pairs.len() - oram.z()..].iter().map(|p| p.0).collect();
        println!("access {id}: leaf {:>2}, leaf bucket slots {leaf_bucket:?}, new: {}", ap.leaf, ap.created);
    }
    println!("largest stash so far: {}", oram.max_stash());
}

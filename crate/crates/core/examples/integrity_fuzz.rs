//! Tamper with honest proofs in every structured way and count what gets through.

use propyla::crypto::make_rng;
use propyla::harness::fuzz::{integrity_fuzz, Corpus, Mutation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::standard(1)?;
    println!("{} honest proofs checked at day {}", corpus.proofs.len(), corpus.t_ver.0);
    let mut classes = vec![Mutation::Identity];
    classes.extend(Mutation::HOSTILE);
    let rep = integrity_fuzz(&corpus, &classes, 100, &mut make_rng(Some(1)));
    print!("{}", rep.to_csv());
    println!("sound: {}", rep.sound());
    Ok(())
}

//! Structured mutations of honest proofs, counted against the verifier.

use crate::crypto::TrustAnchor;
use crate::evidence::{verify_int, EvidenceEntry};
use crate::parties::{Config, Proof, System, SystemError};
use crate::time::Day;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    Identity,
    FlipDat,
    FlipCommitment,
    FlipDecommitment,
    FlipTimestamp,
    DeleteEntry,
    StaleTruncation,
    Reorder,
    ShiftClaimedTime,
    Transplant,
    ReplayTimestamp,
}

impl Mutation {
    /// Every class that must be rejected.
    pub const HOSTILE: [Mutation; 10] = [
        Mutation::FlipDat,
        Mutation::FlipCommitment,
        Mutation::FlipDecommitment,
        Mutation::FlipTimestamp,
        Mutation::DeleteEntry,
        Mutation::StaleTruncation,
        Mutation::Reorder,
        Mutation::ShiftClaimedTime,
        Mutation::Transplant,
        Mutation::ReplayTimestamp,
    ];
}

/// Honest proofs plus the context they verify in.
pub struct Corpus {
    pub ta: TrustAnchor,
    pub t_ver: Day,
    pub proofs: Vec<Proof>,
}

impl Corpus {
    /// Every slot of `sys` as an honest proof at the current time.
    pub fn from_system(sys: &System) -> Result<Corpus, SystemError> {
        let proofs = (0..sys.num_slots()).map(|i| sys.slot_proof(i)).collect::<Result<_, _>>()?;
        Ok(Corpus { ta: sys.trust_anchor().clone(), t_ver: sys.now(), proofs })
    }

    /// A small system run past the first signature instance's expiry, with a
    /// workload, so chains mix every operation and several instances.
    pub fn standard(seed: u64) -> Result<Corpus, SystemError> {
        let mut sys = System::init(Config { seed, ..Config::tiny() })?;
        let mut rng = crate::crypto::make_rng(Some(seed));
        let mut t = Day::ZERO;
        for step in 0..40u64 {
            t = t.plus_days(rng.gen_range(30..=182));
            if t > sys.config().horizon() {
                break;
            }
            sys.advance(t)?;
            let id = rng.gen_range(1..=sys.config().N as u32);
            if step % 3 == 0 {
                sys.write(id, &step.to_be_bytes())?;
            } else {
                sys.read(id)?;
            }
        }
        if sys.now() < sys.config().horizon() {
            sys.advance(sys.config().horizon())?;
        }
        Corpus::from_system(&sys)
    }

    pub fn accepts(&self, p: &Proof) -> bool {
        verify_int(&self.ta, &p.dat, p.t, &p.evidence, self.t_ver)
    }
}

fn flip(bytes: &mut [u8], rng: &mut impl Rng) -> bool {
    if bytes.is_empty() {
        return false;
    }
    let i = rng.gen_range(0..bytes.len() * 8);
    bytes[i / 8] ^= 1 << (i % 8);
    true
}

/// Applies one mutation of class `m`, or returns `None` if `base` offers no
/// place for it (e.g. a single-entry chain cannot be reordered).
pub fn mutate(m: Mutation, corpus: &Corpus, base: usize, rng: &mut impl Rng) -> Option<Proof> {
    let mut p = corpus.proofs[base].clone();
    let n = p.evidence.len();
    let entries = &mut p.evidence.entries;
    let ok = match m {
        Mutation::Identity => true,
        Mutation::FlipDat => flip(&mut p.dat, rng),
        Mutation::FlipCommitment => {
            let c = entries[rng.gen_range(0..n)].c.as_mut()?;
            let field = [&mut c.y, &mut c.a, &mut c.b].into_iter().max_by_key(|_| rng.gen::<u32>())?;
            flip(field, rng)
        }
        Mutation::FlipDecommitment => flip(&mut entries[rng.gen_range(0..n)].d.as_mut()?.r, rng),
        Mutation::FlipTimestamp => {
            let ts = entries[rng.gen_range(0..n)].ts.as_mut()?;
            if rng.gen_bool(0.2) {
                ts.t.0 ^= 1 << rng.gen_range(0..12);
                true
            } else {
                flip(&mut ts.sig, rng)
            }
        }
        Mutation::DeleteEntry => {
            if n < 2 {
                return None;
            }
            entries.remove(rng.gen_range(0..n - 1));
            true
        }
        Mutation::StaleTruncation => {
            // a prefix whose last timestamp expired before the verification time
            let stale: Vec<usize> = (0..n - 1)
                .filter(|&i| {
                    let id = &entries[i].ts.as_ref().map(|t| t.instance_id.clone()).unwrap_or_default();
                    corpus.ta.get(id).is_some_and(|e| e.instance.validity.end < corpus.t_ver)
                })
                .collect();
            let &cut = stale.choose(rng)?;
            entries.truncate(cut + 1);
            true
        }
        Mutation::Reorder => {
            if n < 2 {
                return None;
            }
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            entries.swap(i, j);
            true
        }
        Mutation::ShiftClaimedTime => {
            let d = rng.gen_range(1..=400u64);
            p.t = if rng.gen_bool(0.5) || p.t.0 < d { Day(p.t.0 + d) } else { Day(p.t.0 - d) };
            true
        }
        Mutation::Transplant => {
            let other = donor(corpus, base, rng)?;
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..other.len());
            entries[i] = other[j].clone();
            true
        }
        Mutation::ReplayTimestamp => {
            let other = donor(corpus, base, rng)?;
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..other.len());
            entries[i].ts = other[j].ts.clone();
            entries[i].ts != corpus.proofs[base].evidence.entries[i].ts
        }
    };
    ok.then_some(p)
}

fn donor<'a>(corpus: &'a Corpus, base: usize, rng: &mut impl Rng) -> Option<&'a [EvidenceEntry]> {
    if corpus.proofs.len() < 2 {
        return None;
    }
    let mut j = rng.gen_range(0..corpus.proofs.len() - 1);
    if j >= base {
        j += 1;
    }
    Some(&corpus.proofs[j].evidence.entries)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassResult {
    pub mutations: usize,
    pub acceptances: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub classes: BTreeMap<Mutation, ClassResult>,
}

impl FuzzReport {
    /// No hostile mutation was accepted and the identity mutation always was.
    pub fn sound(&self) -> bool {
        self.classes.iter().all(|(m, r)| match m {
            Mutation::Identity => r.acceptances == r.mutations,
            _ => r.acceptances == 0,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("class,mutations,acceptances\n");
        for (m, r) in &self.classes {
            let name = serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            s.push_str(&format!("{name},{},{}\n", r.mutations, r.acceptances));
        }
        s
    }
}

/// Runs `per_class` mutations of each listed class against the corpus.
pub fn integrity_fuzz(corpus: &Corpus, classes: &[Mutation], per_class: usize, rng: &mut impl Rng) -> FuzzReport {
    let mut rep = FuzzReport::default();
    for &m in classes {
        let mut r = ClassResult::default();
        let mut attempts = 0;
        while r.mutations < per_class && attempts < per_class * 50 {
            attempts += 1;
            let base = rng.gen_range(0..corpus.proofs.len());
            if let Some(p) = mutate(m, corpus, base, rng) {
                r.mutations += 1;
                if corpus.accepts(&p) {
                    r.acceptances += 1;
                }
            }
        }
        rep.classes.insert(m, r);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::make_rng;

    #[test]
    fn corpus_is_honest_and_varied() {
        let c = Corpus::standard(3).unwrap();
        assert!(c.proofs.iter().all(|p| c.accepts(p)));
        let longest = c.proofs.iter().map(|p| p.evidence.len()).max().unwrap();
        assert!(longest >= 10);
    }

    #[test]
    fn small_fuzz_run() {
        let c = Corpus::standard(4).unwrap();
        let mut rng = make_rng(Some(1));
        let mut classes = vec![Mutation::Identity];
        classes.extend(Mutation::HOSTILE);
        let rep = integrity_fuzz(&c, &classes, 40, &mut rng);
        assert!(rep.classes.values().all(|r| r.mutations == 40), "{rep:?}");
        assert!(rep.sound(), "{rep:?}");
    }

    #[test]
    fn shifted_claim_by_one_day_is_rejected() {
        let c = Corpus::standard(5).unwrap();
        let mut p = c.proofs[0].clone();
        p.t = Day(p.t.0 + 1);
        assert!(!c.accepts(&p));
    }
}

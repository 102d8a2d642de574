//! Access-pattern hiding experiments.
//!
//! Two games. The ORAM game hands the adversary the access patterns of one
//! of two equal-length id sequences. The full-system game hands it every
//! message the evidence service and a set of corrupted shareholders
//! received during warm-up accesses and one of two challenge writes. In
//! both, a scripted distinguisher guesses which side ran.

use crate::codec::{Decode, Reader};
use crate::crypto::{make_rng, SimRng};
use crate::evidence::EsBlock;
use crate::oram::{AccessPattern, BlockId, OramState};
use crate::parties::{decode_payload, AccessOp, Config, MsgKind, Party, System, SystemError};
use crate::sharing::{reconstruct, Share};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AphError {
    #[error("{0} corrupted shareholders reach the threshold {1}; the experiment needs fewer")]
    ThresholdReached(usize, usize),
    #[error("need at least one trial")]
    NoTrials,
    #[error("shareholder {0} does not exist")]
    UnknownShareholder(u8),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Result of a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AphOutcome {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

impl AphOutcome {
    fn from_counts(trials: usize, successes: usize) -> Self {
        AphOutcome { trials, successes, rate: successes as f64 / trials as f64 }
    }

    /// Inside `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        (lo..=hi).contains(&self.rate)
    }
}

fn trial_rng(seed: u64, trial: usize, stream: u64) -> SimRng {
    let mut r = make_rng(Some(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    r.set_stream(stream);
    r
}

// ---------------------------------------------------------------- ORAM game

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OramDistinguisher {
    /// Ignores the view.
    RandomGuess,
    /// Challenge `[1, 1]` vs `[1, N/2 + 1]`: guess the repeat when both leaves match.
    PathEquality,
    /// Same challenge: guess the repeat when the two paths share more than half their buckets.
    PathOverlap,
}

impl OramDistinguisher {
    pub const ALL: [OramDistinguisher; 3] =
        [OramDistinguisher::RandomGuess, OramDistinguisher::PathEquality, OramDistinguisher::PathOverlap];

    fn guess(self, view: &[AccessPattern], coin: &mut impl Rng) -> usize {
        let (a, b) = (&view[view.len() - 2], &view[view.len() - 1]);
        match self {
            OramDistinguisher::RandomGuess => coin.gen_range(0..2),
            OramDistinguisher::PathEquality => usize::from(a.leaf != b.leaf),
            OramDistinguisher::PathOverlap => {
                let sa: BTreeSet<usize> = a.pairs.iter().map(|p| p.0).collect();
                let shared = b.pairs.iter().filter(|p| sa.contains(&p.0)).count();
                usize::from(2 * shared <= a.pairs.len())
            }
        }
    }
}

/// Which ORAM the challenger runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OramKind {
    Path,
    /// Fixed leaves and no remapping: the negative control.
    Identity,
}

/// Runs the ORAM game `trials` times over `n` blocks and returns the success rate.
pub fn run_oram_aph(
    n: usize,
    kind: OramKind,
    distinguisher: OramDistinguisher,
    trials: usize,
    seed: u64,
) -> Result<AphOutcome, AphError> {
    if trials == 0 {
        return Err(AphError::NoTrials);
    }
    if n < 2 {
        return Err(SystemError::BadRequest("the ORAM game needs two distinct ids".into()).into());
    }
    let mut wins = 0;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial, 1);
        let mut adv = trial_rng(seed, trial, 2);
        let b = rng.gen_range(0..2usize);
        let (mut oram, _) = match kind {
            OramKind::Path => OramState::setup(n, crate::oram::DEFAULT_Z, &mut rng),
            OramKind::Identity => OramState::identity_control(n, crate::oram::DEFAULT_Z),
        }
        .map_err(SystemError::from)?;
        let warm: Vec<BlockId> = (1..=n as BlockId).collect();
        let far = n as BlockId / 2 + 1;
        let challenge: [[BlockId; 2]; 2] = [[1, 1], [1, far]];
        let mut view = Vec::new();
        for id in warm.iter().chain(challenge[b].iter()) {
            view.push(oram.gen_ap(*id, &mut rng).map_err(SystemError::from)?);
        }
        if distinguisher.guess(&view, &mut adv) == b {
            wins += 1;
        }
    }
    Ok(AphOutcome::from_counts(trials, wins))
}

/// Chi-square p-value of the accessed leaves over `accesses` uniformly chosen ids.
pub fn leaf_uniformity(n: usize, accesses: usize, seed: u64) -> Result<f64, AphError> {
    let mut rng = make_rng(Some(seed));
    let (mut oram, _) = OramState::setup(n, crate::oram::DEFAULT_Z, &mut rng).map_err(SystemError::from)?;
    let mut counts = vec![0u64; oram.leaves()];
    for _ in 0..accesses {
        let id = rng.gen_range(1..=n as BlockId);
        counts[oram.gen_ap(id, &mut rng).map_err(SystemError::from)?.leaf] += 1;
    }
    Ok(super::stats::chi_square_uniform(&counts))
}

// ---------------------------------------------------------- full-system game

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropylaDistinguisher {
    RandomGuess,
    /// Labels every commitment by the access in which the evidence service
    /// first received it, then scores each challenge id by how many of its
    /// labelled commitments were read and never written back.
    ByteComparison,
    /// Scores each challenge id by how many challenge-read slots its warm-up write touched.
    PathOverlap,
    /// Rebuilds every challenge payload from the corrupted shares and looks for the challenge data.
    ShareReconstruction,
}

impl PropylaDistinguisher {
    pub const ALL: [PropylaDistinguisher; 4] = [
        PropylaDistinguisher::RandomGuess,
        PropylaDistinguisher::ByteComparison,
        PropylaDistinguisher::PathOverlap,
        PropylaDistinguisher::ShareReconstruction,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropylaControl {
    None,
    /// The client re-sends old commitments instead of refreshing them.
    RefreshDisabled,
    /// The adversary holds `k` shares; the corrupted set must reach the threshold.
    ThresholdViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropylaAphParams {
    pub config: Config,
    pub distinguisher: PropylaDistinguisher,
    pub corrupted: Vec<u8>,
    pub control: PropylaControl,
    pub warmup_reads: usize,
    pub trials: usize,
    pub seed: u64,
}

impl PropylaAphParams {
    /// Small system, ES plus `k − 1` shareholders observed.
    pub fn desk(distinguisher: PropylaDistinguisher, control: PropylaControl, trials: usize) -> Self {
        let config = Config { N: 8, block_size_L: 32, horizon_years: 10, ..Config::tiny() };
        let k = config.threshold_k;
        let corrupted = match control {
            PropylaControl::ThresholdViolated => (1..=k as u8).collect(),
            _ => (1..k as u8).collect(),
        };
        PropylaAphParams { config, distinguisher, corrupted, control, warmup_reads: 12, trials, seed: 1 }
    }
}

/// One trial as the adversary scripted it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AphTrialRecord {
    pub challenge: [(BlockId, Vec<u8>); 2],
    pub b: usize,
    pub guess: usize,
    pub view_messages: usize,
    pub view_bytes: usize,
}

/// A message in the adversary's view.
#[derive(Clone, Debug)]
struct Seen {
    phase: usize,
    to: Party,
    kind: MsgKind,
    payload: Vec<u8>,
}

/// Parses `list[u64 slot, rest]`, returning the slot and the raw remainder.
fn slot_and_rest(p: &[u8]) -> Option<(u64, &[u8])> {
    let mut r = Reader::new(p);
    if r.list_len().ok()? != 2 {
        return None;
    }
    let slot = r.u64().ok()?;
    Some((slot, &p[p.len() - r.remaining()..]))
}

fn share_body(p: &[u8]) -> Option<(u64, Vec<u8>)> {
    let (slot, rest) = slot_and_rest(p)?;
    let mut r = Reader::new(rest);
    Some((slot, r.bytes().ok()?.to_vec()))
}

fn es_read_commitments(view: &[Seen], phase: usize) -> Vec<Vec<u8>> {
    use crate::codec::Encode;
    view.iter()
        .filter(|m| m.phase == phase && m.kind == MsgKind::EsReadReply)
        .filter_map(|m| EsBlock::decode(&m.payload).ok())
        .map(|b| b.c.encode().into_bytes())
        .collect()
}

fn es_written_commitments(view: &[Seen], phase: usize) -> Vec<(u64, Vec<u8>)> {
    view.iter()
        .filter(|m| m.phase == phase && m.kind == MsgKind::EsWrite)
        .filter_map(|m| slot_and_rest(&m.payload).map(|(s, c)| (s, c.to_vec())))
        .collect()
}

fn es_read_slots(view: &[Seen], phase: usize) -> Vec<u64> {
    view.iter()
        .filter(|m| m.phase == phase && m.kind == MsgKind::EsRead)
        .filter_map(|m| crate::codec::decode_bytes(&m.payload).ok())
        .filter_map(|b| b.try_into().ok().map(u64::from_be_bytes))
        .collect()
}

fn pick(scores: [usize; 2], coin: &mut impl Rng) -> usize {
    match scores[0].cmp(&scores[1]) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => coin.gen_range(0..2),
    }
}

/// Phases: 0 = first warm-up write, 1 = second warm-up write, 2 = other
/// warm-up accesses, 3 = the challenge.
fn guess(
    d: PropylaDistinguisher,
    view: &[Seen],
    challenge: &[(BlockId, Vec<u8>); 2],
    k: usize,
    coin: &mut impl Rng,
) -> usize {
    match d {
        PropylaDistinguisher::RandomGuess => coin.gen_range(0..2),
        PropylaDistinguisher::ByteComparison => {
            let mut first_seen: HashMap<Vec<u8>, usize> = HashMap::new();
            for phase in 0..3 {
                for (_, c) in es_written_commitments(view, phase) {
                    first_seen.entry(c).or_insert(phase);
                }
            }
            let written: BTreeSet<Vec<u8>> = es_written_commitments(view, 3).into_iter().map(|x| x.1).collect();
            let mut scores = [0usize; 2];
            for c in es_read_commitments(view, 3) {
                if written.contains(&c) {
                    continue;
                }
                match first_seen.get(&c) {
                    Some(0) => scores[0] += 1,
                    Some(1) => scores[1] += 1,
                    _ => {}
                }
            }
            pick(scores, coin)
        }
        PropylaDistinguisher::PathOverlap => {
            let read: BTreeSet<u64> = es_read_slots(view, 3).into_iter().collect();
            let mut scores = [0usize; 2];
            for (side, score) in scores.iter_mut().enumerate() {
                *score = es_written_commitments(view, side).iter().filter(|(s, _)| read.contains(s)).count();
            }
            pick(scores, coin)
        }
        PropylaDistinguisher::ShareReconstruction => {
            let mut by_slot: BTreeMap<u64, Vec<Share>> = BTreeMap::new();
            for m in view.iter().filter(|m| m.phase == 3 && m.kind == MsgKind::ShWrite) {
                if let (Party::Shareholder(x), Some((slot, y))) = (m.to, share_body(&m.payload)) {
                    by_slot.entry(slot).or_default().push(Share { x, y });
                }
            }
            let mut scores = [0usize; 2];
            for shares in by_slot.values() {
                let have = shares.len().min(k);
                let Some(payload) = reconstruct(&shares[..have], have) else { continue };
                if let Ok(rec) = decode_payload(&payload) {
                    for (side, (_, dat)) in challenge.iter().enumerate() {
                        if &rec.dat == dat {
                            scores[side] += 1;
                        }
                    }
                }
            }
            pick(scores, coin)
        }
    }
}

/// Runs the full-system game and returns the success rate.
pub fn run_propyla_aph(p: &PropylaAphParams) -> Result<AphOutcome, AphError> {
    run_propyla_aph_records(p).map(|(o, _)| o)
}

/// As [`run_propyla_aph`], also returning one record per trial.
pub fn run_propyla_aph_records(p: &PropylaAphParams) -> Result<(AphOutcome, Vec<AphTrialRecord>), AphError> {
    if p.trials == 0 {
        return Err(AphError::NoTrials);
    }
    let k = p.config.threshold_k;
    if let Some(&x) = p.corrupted.iter().find(|&&x| x == 0 || x as usize > p.config.shareholders_n) {
        return Err(AphError::UnknownShareholder(x));
    }
    let observed: BTreeSet<u8> = p.corrupted.iter().copied().collect();
    let violating = p.control == PropylaControl::ThresholdViolated;
    if observed.len() >= k && !violating {
        return Err(AphError::ThresholdReached(observed.len(), k));
    }
    let n_ids = p.config.N as BlockId;
    if n_ids < 3 {
        return Err(SystemError::BadRequest("the game needs at least three ids".into()).into());
    }
    let l = p.config.block_size_L;
    let sees = |q: Party| match q {
        Party::EvidenceService => true,
        Party::Shareholder(x) => observed.contains(&x),
        _ => false,
    };

    let mut wins = 0;
    let mut records = Vec::with_capacity(p.trials);
    for trial in 0..p.trials {
        let mut adv = trial_rng(p.seed, trial, 2);
        let mut challenger = trial_rng(p.seed, trial, 3);
        let cfg = Config { seed: challenger.next_u64(), ..p.config.clone() };
        let mut sys = System::init(cfg)?;
        sys.set_refresh_commitments(p.control != PropylaControl::RefreshDisabled);
        let b = challenger.gen_range(0..2usize);

        let rand_block = |r: &mut SimRng| {
            let mut v = vec![0u8; l];
            r.fill_bytes(&mut v);
            v
        };
        let challenge = [(1, rand_block(&mut adv)), (2, rand_block(&mut adv))];
        let warm = [rand_block(&mut adv), rand_block(&mut adv)];

        let mut view: Vec<Seen> = Vec::new();
        let mut run = |sys: &mut System, phase: usize, op: AccessOp, id: BlockId, dat: Option<&[u8]>| {
            sys.net_mut().start_capture();
            let r = sys.access(op, id, dat);
            for m in sys.net_mut().take_capture() {
                if sees(m.from) || sees(m.to) {
                    view.push(Seen { phase, to: m.to, kind: m.kind, payload: m.payload.into_bytes() });
                }
            }
            r.map(|_| ())
        };
        run(&mut sys, 0, AccessOp::Write, 1, Some(&warm[0]))?;
        run(&mut sys, 1, AccessOp::Write, 2, Some(&warm[1]))?;
        sys.advance(sys.now().plus_days(1))?;
        for _ in 0..p.warmup_reads {
            let id = adv.gen_range(3..=n_ids);
            run(&mut sys, 2, AccessOp::Read, id, None)?;
        }
        let (id, dat) = &challenge[b];
        run(&mut sys, 3, AccessOp::Write, *id, Some(dat))?;

        let g = guess(p.distinguisher, &view, &challenge, k, &mut adv);
        if g == b {
            wins += 1;
        }
        records.push(AphTrialRecord {
            challenge: challenge.clone(),
            b,
            guess: g,
            view_messages: view.len(),
            view_bytes: view.iter().map(|m| m.payload.len()).sum(),
        });
    }
    Ok((AphOutcome::from_counts(p.trials, wins), records))
}

/// Seeds a generator from a string label, for reproducible named runs.
pub fn labelled_seed(label: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let h = Sha256::digest(label.as_bytes());
    u64::from_be_bytes(h[..8].try_into().expect("8 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oram_random_guess_is_near_half() {
        let o = run_oram_aph(8, OramKind::Path, OramDistinguisher::RandomGuess, 400, 3).unwrap();
        assert!(o.within(0.4, 0.6), "{o:?}");
    }

    #[test]
    fn identity_oram_is_caught() {
        for d in [OramDistinguisher::PathEquality, OramDistinguisher::PathOverlap] {
            let o = run_oram_aph(8, OramKind::Identity, d, 200, 3).unwrap();
            assert!(o.rate >= 0.95, "{d:?}: {o:?}");
        }
    }

    #[test]
    fn path_oram_hides_repeats() {
        let o = run_oram_aph(8, OramKind::Path, OramDistinguisher::PathEquality, 400, 5).unwrap();
        assert!(o.within(0.4, 0.6), "{o:?}");
    }

    #[test]
    fn leaf_uniformity_passes() {
        assert!(leaf_uniformity(64, 4000, 9).unwrap() > 0.001);
    }

    #[test]
    fn threshold_is_enforced() {
        let mut p = PropylaAphParams::desk(PropylaDistinguisher::RandomGuess, PropylaControl::None, 1);
        p.corrupted = vec![1, 2];
        assert!(matches!(run_propyla_aph(&p), Err(AphError::ThresholdReached(2, 2))));
        p.corrupted = vec![9];
        assert!(matches!(run_propyla_aph(&p), Err(AphError::UnknownShareholder(9))));
        p.corrupted = vec![1];
        p.trials = 0;
        assert!(matches!(run_propyla_aph(&p), Err(AphError::NoTrials)));
    }

    #[test]
    fn controls_are_caught_quickly() {
        let p = PropylaAphParams::desk(PropylaDistinguisher::ByteComparison, PropylaControl::RefreshDisabled, 40);
        assert!(run_propyla_aph(&p).unwrap().rate >= 0.9);
        let p = PropylaAphParams::desk(PropylaDistinguisher::ShareReconstruction, PropylaControl::ThresholdViolated, 40);
        assert!(run_propyla_aph(&p).unwrap().rate >= 0.9);
    }

    #[test]
    fn records_match_the_outcome() {
        let p = PropylaAphParams::desk(PropylaDistinguisher::PathOverlap, PropylaControl::None, 10);
        let (o, recs) = run_propyla_aph_records(&p).unwrap();
        assert_eq!(recs.len(), 10);
        assert_eq!(recs.iter().filter(|r| r.b == r.guess).count(), o.successes);
        // the view only ever holds evidence-service and shareholder-1 traffic
        assert!(recs.iter().all(|r| r.view_messages > 0));
    }
}

//! The integrity verifier.

use super::{chain_message, data_message, EvidenceBlock, Op};
use crate::codec::{put_bytes, put_count, Encode, Encoded};
use crate::crypto::{ver_com, ver_ts, TrustAnchor};
use crate::time::Day;
use std::fmt;

/// The assertion that failed. Indices are 1-based chain positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    EmptyChain,
    MissingTimestamp(usize),
    MissingCommitment(usize),
    Timestamp(usize),
    Commitment(usize),
    /// Write after position 1, or Read/ReTs at position 1.
    OpPosition(usize),
    ClaimedTime { claimed: Day, stamped: Day },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::EmptyChain => write!(f, "empty evidence chain"),
            Check::MissingTimestamp(i) => write!(f, "entry {i}: no timestamp"),
            Check::MissingCommitment(i) => write!(f, "entry {i}: no commitment or decommitment"),
            Check::Timestamp(i) => write!(f, "entry {i}: timestamp check failed"),
            Check::Commitment(i) => write!(f, "entry {i}: commitment check failed"),
            Check::OpPosition(i) => write!(f, "entry {i}: operation not allowed at this position"),
            Check::ClaimedTime { claimed, stamped } => write!(f, "claimed {claimed} but first stamp is {stamped}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub failure: Option<Check>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Whether `e` shows that `dat` existed at time `t`, judged at `t_ver`.
pub fn verify_int(ta: &TrustAnchor, dat: &[u8], t: Day, e: &EvidenceBlock, t_ver: Day) -> bool {
    verify_int_report(ta, dat, t, e, t_ver).ok()
}

/// `[dat, E_{i-1}]` built from pre-encoded entries.
fn recom_message_from(dat: &[u8], encoded: &[Encoded], prefix: usize) -> Encoded {
    let body: usize = encoded[..prefix].iter().map(Encoded::len).sum();
    let mut out = Vec::with_capacity(32 + dat.len() + body);
    put_count(&mut out, 2);
    put_bytes(&mut out, dat);
    put_count(&mut out, prefix);
    for x in &encoded[..prefix] {
        out.extend_from_slice(x.as_bytes());
    }
    Encoded::from_raw(out)
}

pub fn verify_int_report(ta: &TrustAnchor, dat: &[u8], t: Day, e: &EvidenceBlock, t_ver: Day) -> VerifyReport {
    let fail = |c| VerifyReport { failure: Some(c) };
    let n = e.len();
    if n == 0 {
        return fail(Check::EmptyChain);
    }
    // times[i] = t_{i+1} in 1-based terms; times[n] = t_ver
    let mut times = Vec::with_capacity(n + 1);
    for (i, x) in e.entries.iter().enumerate() {
        match &x.ts {
            Some(ts) => times.push(ts.t),
            None => return fail(Check::MissingTimestamp(i + 1)),
        }
        if x.c.is_none() || x.d.is_none() {
            return fail(Check::MissingCommitment(i + 1));
        }
    }
    times.push(t_ver);

    // next_recom[i]: min over later ReCom entries of their time, else t_ver
    let mut next_recom = vec![t_ver; n];
    let mut acc = t_ver;
    for i in (0..n).rev() {
        next_recom[i] = acc;
        if e.entries[i].op == Op::ReCom {
            acc = acc.min(times[i]);
        }
    }

    let needs_prefixes = e.entries.iter().any(|x| x.op == Op::ReCom);
    let encoded: Vec<Encoded> = if needs_prefixes { e.entries.iter().map(Encode::encode).collect() } else { Vec::new() };

    for i in (0..n).rev() {
        let x = &e.entries[i];
        let (c, d, ts) = (x.c.as_ref().unwrap(), x.d.as_ref().unwrap(), x.ts.as_ref().unwrap());
        if !ver_ts(ta, &c.encode(), ts, times[i + 1]) {
            return fail(Check::Timestamp(i + 1));
        }
        let msg = match x.op {
            Op::Write if i == 0 => data_message(dat),
            Op::Read | Op::ReTs if i > 0 => {
                let prev = &e.entries[i - 1];
                chain_message(prev.c.as_ref().unwrap(), prev.ts.as_ref().unwrap())
            }
            Op::ReCom => recom_message_from(dat, &encoded, i),
            _ => return fail(Check::OpPosition(i + 1)),
        };
        if !ver_com(ta, &msg, c, d, next_recom[i]) {
            return fail(Check::Commitment(i + 1));
        }
    }

    let stamped = times[0];
    if stamped != t {
        return fail(Check::ClaimedTime { claimed: t, stamped });
    }
    VerifyReport { failure: None }
}

#[cfg(test)]
mod tests {
    use super::super::testkit::Kit;
    use super::super::*;
    use super::*;
    use crate::crypto::commit;

    fn write_chain(kit: &mut Kit, dat: &[u8], t: Day) -> EvidenceBlock {
        let (c, d) = commit(&kit.csi, &data_message(dat), &mut kit.rng).unwrap();
        let ts = kit.stamp(&c, t);
        EvidenceBlock::new(vec![EvidenceEntry::new(Op::Write, c, d, Some(ts))])
    }

    fn push_renewal(kit: &mut Kit, e: &mut EvidenceBlock, op: Op, dat: &[u8], t: Day) {
        let csi = kit.csi.clone();
        match op {
            Op::ReCom => append_recom(dat, e, &csi, &mut kit.rng).unwrap(),
            Op::Read => refresh_commit(e, &csi, &mut kit.rng).unwrap(),
            _ => {
                let last = e.last().unwrap();
                let (c, d) = renew_ts_entry(last.c.as_ref().unwrap(), last.ts.as_ref().unwrap(), &csi, &mut kit.rng).unwrap();
                e.entries.push(EvidenceEntry::new(Op::ReTs, c, d, None));
            }
        }
        let c = e.last().unwrap().c.clone().unwrap();
        e.entries.last_mut().unwrap().ts = Some(kit.stamp(&c, t));
    }

    #[test]
    fn single_write_accepts() {
        let mut kit = Kit::new(10);
        let e = write_chain(&mut kit, b"hello", Day(7));
        assert!(verify_int(&kit.ta, b"hello", Day(7), &e, Day(100)));
    }

    #[test]
    fn claimed_time_must_match() {
        let mut kit = Kit::new(11);
        let e = write_chain(&mut kit, b"hello", Day(7));
        let r = verify_int_report(&kit.ta, b"hello", Day(8), &e, Day(100));
        assert_eq!(r.failure, Some(Check::ClaimedTime { claimed: Day(8), stamped: Day(7) }));
    }

    #[test]
    fn mixed_chain_accepts() {
        let mut kit = Kit::new(12);
        let dat = b"long-lived record";
        let mut e = write_chain(&mut kit, dat, Day(0));
        push_renewal(&mut kit, &mut e, Op::ReTs, dat, Day(730));
        push_renewal(&mut kit, &mut e, Op::Read, dat, Day(800));
        push_renewal(&mut kit, &mut e, Op::ReTs, dat, Day(1460));
        push_renewal(&mut kit, &mut e, Op::ReCom, dat, Day(3650));
        push_renewal(&mut kit, &mut e, Op::ReTs, dat, Day(4380));
        let r = verify_int_report(&kit.ta, dat, Day(0), &e, Day(5000));
        assert!(r.ok(), "{:?}", r.failure);
        assert!(!verify_int(&kit.ta, b"other", Day(0), &e, Day(5000)));
    }

    #[test]
    fn write_only_at_first_position() {
        let mut kit = Kit::new(13);
        let mut e = write_chain(&mut kit, b"a", Day(0));
        let second = write_chain(&mut kit, b"a", Day(1));
        e.entries.extend(second.entries);
        assert_eq!(verify_int_report(&kit.ta, b"a", Day(0), &e, Day(2)).failure, Some(Check::OpPosition(2)));
    }

    #[test]
    fn pending_entry_fails() {
        let mut kit = Kit::new(14);
        let mut e = write_chain(&mut kit, b"a", Day(0));
        let csi = kit.csi.clone();
        refresh_commit(&mut e, &csi, &mut kit.rng).unwrap();
        assert_eq!(verify_int_report(&kit.ta, b"a", Day(0), &e, Day(2)).failure, Some(Check::MissingTimestamp(2)));
    }

    #[test]
    fn read_first_fails() {
        let mut kit = Kit::new(15);
        let mut e = write_chain(&mut kit, b"a", Day(0));
        push_renewal(&mut kit, &mut e, Op::Read, b"a", Day(1));
        e.entries.remove(0);
        assert_eq!(verify_int_report(&kit.ta, b"a", Day(1), &e, Day(2)).failure, Some(Check::OpPosition(1)));
    }

    #[test]
    fn deterministic() {
        let mut kit = Kit::new(16);
        let e = write_chain(&mut kit, b"a", Day(0));
        let a = verify_int_report(&kit.ta, b"b", Day(0), &e, Day(2));
        let b = verify_int_report(&kit.ta, b"b", Day(0), &e, Day(2));
        assert_eq!(a, b);
    }

    #[test]
    fn prefix_message_matches_generic_encoder() {
        let mut kit = Kit::new(17);
        let mut e = write_chain(&mut kit, b"q", Day(0));
        push_renewal(&mut kit, &mut e, Op::ReTs, b"q", Day(5));
        let enc: Vec<Encoded> = e.entries.iter().map(Encode::encode).collect();
        for p in 0..=e.len() {
            let prefix = EvidenceBlock::new(e.entries[..p].to_vec());
            assert_eq!(recom_message_from(b"q", &enc, p), recom_message(b"q", &prefix));
        }
    }
}

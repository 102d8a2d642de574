//! The four roles wired over a byte-counting network and driven by a simulated clock.
//!
//! [`System`] owns every party. The client runs accesses and commitment
//! renewals, the evidence service stamps and renews timestamps, the
//! shareholders store shares and the timestamp service signs.

mod client;
pub mod config;
pub mod net;
pub mod schedule;
mod servers;
pub mod store;

pub use client::{decode_payload, encode_payload, Client, Record, SlotMeta};
pub use config::{Config, ConfigError, InstanceRow, OpCosts, Padding};
pub use net::{Channel, Counter, MsgKind, NetLedger, Party};
pub use schedule::{Clock, Event, EventKind, Schedule};
pub use servers::{EvidenceService, Shareholder, TimestampService};

use crate::codec::{encode_bytes, encode_list, encode_u64, CodecError, Encode, Encoded};
use crate::crypto::{
    commit, fresh_instance_id, make_rng, ts_setup, Commitment, CryptoError, Decommitment, SchemeInstance,
    SchemeParams, SimRng, Timestamp, TrustAnchor,
};
use crate::evidence::{
    append_recom, data_message, merge_es_evidence, refresh_commit, renew_ts_entry, verify_int_report, Check,
    EvidenceBlock, EvidenceEntry, EvidenceError, Op,
};
use crate::oram::{BlockId, OramError, OramState};
use crate::sharing::{reconstruct, share, zero_sharing, Share, SharingError};
use crate::time::{Day, Window};
use config::PlannedKind;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Oram(#[from] OramError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Sharing(#[from] SharingError),
    #[error("slot {0} out of range")]
    SlotOutOfRange(usize),
    #[error("storage fault at slot {slot}: {reason}")]
    StorageFault { slot: usize, reason: String },
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("time {t} is not after the current time {now}")]
    TimeNotAfter { now: Day, t: Day },
    #[error("time {t} is beyond the horizon {horizon}")]
    BeyondHorizon { t: Day, horizon: Day },
    #[error("state directory: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessOp {
    Write,
    Read,
}

/// Data and evidence returned by a read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadResult {
    pub dat: Vec<u8>,
    pub evidence: EvidenceBlock,
}

impl ReadResult {
    /// The time the evidence attests: the first entry's timestamp.
    pub fn written_at(&self) -> Option<Day> {
        self.evidence.entries.first().and_then(|e| e.ts.as_ref()).map(|ts| ts.t)
    }
}

/// Cryptographic operation counts, for the compute-cost columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub commits: u64,
    pub stamps: u64,
    pub share_bytes: u64,
    pub reconstruct_bytes: u64,
    pub accesses: u64,
}

impl OpCounts {
    pub fn minus(&self, o: &OpCounts) -> OpCounts {
        OpCounts {
            commits: self.commits - o.commits,
            stamps: self.stamps - o.stamps,
            share_bytes: self.share_bytes - o.share_bytes,
            reconstruct_bytes: self.reconstruct_bytes - o.reconstruct_bytes,
            accesses: self.accesses - o.accesses,
        }
    }

    /// Milliseconds under the given per-operation costs.
    pub fn cost_ms(&self, c: &OpCosts) -> f64 {
        self.commits as f64 * c.commit_ms
            + self.stamps as f64 * c.stamp_ms
            + self.share_bytes as f64 / 1024.0 * c.share_ms_per_kb
            + self.reconstruct_bytes as f64 / 1024.0 * c.reconstruct_ms_per_kb
    }
}

/// Where an audited chain lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Slot(usize),
    Stash(BlockId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub checked: usize,
    pub failures: Vec<(Location, Check)>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A proof taken straight from storage: data, attested time and evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub dat: Vec<u8>,
    pub t: Day,
    pub evidence: EvidenceBlock,
}

pub struct System {
    cfg: Config,
    schedule: Schedule,
    ta: TrustAnchor,
    row_windows: Vec<Window>,
    com_by_name: BTreeMap<String, SchemeInstance>,
    sig_by_name: BTreeMap<String, String>,
    active_com: String,
    active_sig: String,
    clock: Clock,
    client: Client,
    es: EvidenceService,
    shareholders: Vec<Shareholder>,
    tss: TimestampService,
    net: NetLedger,
    rng: SimRng,
    refresh_commitments: bool,
    ops: OpCounts,
    renewals: Vec<Day>,
    share_msg_overhead: usize,
}

impl System {
    /// Sets up instances, the ORAM and M dummy blocks at time zero.
    pub fn init(cfg: Config) -> Result<System, SystemError> {
        cfg.validate()?;
        let mut rng = make_rng(Some(cfg.seed));
        let mut ta = TrustAnchor::default();
        let mut tss = TimestampService::default();
        let mut com_by_name = BTreeMap::new();
        let mut sig_by_name = BTreeMap::new();
        for p in cfg.planned_instances() {
            match p.kind {
                PlannedKind::Signature { sig_bytes } => {
                    let key = ts_setup(&p.name, sig_bytes, p.usage, p.validity, &mut rng)?;
                    ta.insert_signature(key.instance.clone(), key.verifying_key());
                    sig_by_name.insert(p.name.clone(), key.instance.instance_id.clone());
                    tss.insert(key);
                }
                PlannedKind::Commitment { hash } => {
                    let inst = SchemeInstance {
                        instance_id: fresh_instance_id(&p.name, &mut rng),
                        params: SchemeParams::Commitment { name: p.name.clone(), hash },
                        usage: p.usage,
                        validity: p.validity,
                    };
                    ta.insert_commitment(inst.clone());
                    com_by_name.insert(p.name.clone(), inst);
                }
            }
        }
        let (oram, m) = OramState::setup(cfg.N, cfg.bucket_Z, &mut rng)?;
        let shareholders = (1..=cfg.shareholders_n as u8).map(|x| Shareholder::new(x, m)).collect();
        let share_msg_overhead = encode_list(&[encode_u64(0), encode_bytes(&[])]).len();
        let mut sys = System {
            schedule: Schedule::from_config(&cfg),
            row_windows: cfg.row_windows(),
            ta,
            com_by_name,
            sig_by_name,
            active_com: String::new(),
            active_sig: String::new(),
            clock: Clock::default(),
            client: Client { oram, stash: BTreeMap::new(), meta: vec![SlotMeta::default(); m] },
            es: EvidenceService::new(m),
            shareholders,
            tss,
            net: NetLedger::default(),
            rng,
            refresh_commitments: true,
            ops: OpCounts::default(),
            renewals: Vec::new(),
            share_msg_overhead,
            cfg,
        };
        sys.set_now(Day::ZERO);
        for i in 0..m {
            let rec = sys.fresh_dummy()?;
            let c = rec.e.last().and_then(|x| x.c.clone()).expect("fresh write entry");
            sys.es_write(i, c)?;
            sys.sh_write(i, &rec)?;
        }
        Ok(sys)
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn trust_anchor(&self) -> &TrustAnchor {
        &self.ta
    }

    pub fn now(&self) -> Day {
        self.clock.now
    }

    pub fn net(&self) -> &NetLedger {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut NetLedger {
        &mut self.net
    }

    pub fn client(&self) -> &Client {
        &self.client
    }

    pub fn evidence_service(&self) -> &EvidenceService {
        &self.es
    }

    pub fn shareholders(&self) -> &[Shareholder] {
        &self.shareholders
    }

    pub fn num_slots(&self) -> usize {
        self.es.num_slots()
    }

    pub fn ops(&self) -> OpCounts {
        self.ops
    }

    /// Renewal events executed so far.
    pub fn renewals(&self) -> &[Day] {
        &self.renewals
    }

    /// Turns the per-access commitment refresh on or off. Off is insecure and
    /// exists only as an experimental control.
    pub fn set_refresh_commitments(&mut self, on: bool) {
        self.refresh_commitments = on;
    }

    pub fn refresh_commitments(&self) -> bool {
        self.refresh_commitments
    }

    fn set_now(&mut self, t: Day) {
        self.clock.now = t;
        let row = &self.cfg.instances[self.row_windows.iter().rposition(|w| w.start <= t).unwrap_or(0)];
        self.active_com = row.commitment.name.clone();
        self.active_sig = self.sig_by_name[&row.signature.name].clone();
    }

    /// The commitment instance in use now.
    pub fn active_commitment(&self) -> &SchemeInstance {
        &self.com_by_name[&self.active_com]
    }

    fn commit_now(&mut self, m: &Encoded) -> Result<(Commitment, Decommitment), SystemError> {
        self.ops.commits += 1;
        Ok(commit(&self.com_by_name[&self.active_com], m, &mut self.rng)?)
    }

    fn stamp_for(&mut self, requester: Party, m: &Encoded) -> Result<Timestamp, SystemError> {
        self.net.send(requester, Party::TimestampService, MsgKind::StampRequest, m);
        let ts = self.tss.stamp(&self.active_sig, m, self.clock.now)?;
        self.net.send(Party::TimestampService, requester, MsgKind::StampReply, &ts.encode());
        self.ops.stamps += 1;
        Ok(ts)
    }

    fn fresh_dummy(&mut self) -> Result<Record, SystemError> {
        let mut dat = vec![0u8; self.cfg.block_size_L];
        self.rng.fill_bytes(&mut dat);
        let (c, d) = self.commit_now(&data_message(&dat))?;
        Ok(Record { dat, e: EvidenceBlock::new(vec![EvidenceEntry::new(Op::Write, c, d, None)]) })
    }

    // --- evidence service and shareholder protocol steps ---

    fn es_read(&mut self, i: usize) -> Result<crate::evidence::EsBlock, SystemError> {
        self.net.send(Party::Client, Party::EvidenceService, MsgKind::EsRead, &encode_u64(i as u64));
        let block = self.es.read(i)?.clone();
        self.net.send(Party::EvidenceService, Party::Client, MsgKind::EsReadReply, &block.encode());
        Ok(block)
    }

    fn es_write(&mut self, j: usize, c: Commitment) -> Result<(), SystemError> {
        let enc = c.encode();
        self.net.send(Party::Client, Party::EvidenceService, MsgKind::EsWrite, &encode_list(&[encode_u64(j as u64), enc.clone()]));
        if j >= self.es.num_slots() {
            return Err(SystemError::SlotOutOfRange(j));
        }
        let ts = self.stamp_for(Party::EvidenceService, &enc)?;
        self.es.write(j, c, ts)
    }

    fn share_message(&mut self, from: Party, to: Party, kind: MsgKind, slot: usize, y: &[u8]) {
        if self.net.is_capturing() {
            let msg = encode_list(&[encode_u64(slot as u64), encode_bytes(y)]);
            self.net.send(from, to, kind, &msg);
        } else {
            self.net.count(from, to, kind, self.share_msg_overhead + y.len());
        }
    }

    fn sh_read(&mut self, i: usize) -> Result<Record, SystemError> {
        let mut shares = Vec::with_capacity(self.shareholders.len());
        for x in 0..self.shareholders.len() {
            let p = Party::Shareholder(self.shareholders[x].x);
            self.net.send(Party::Client, p, MsgKind::ShRead, &encode_u64(i as u64));
            let y = self.shareholders[x].read(i)?.to_vec();
            self.share_message(p, Party::Client, MsgKind::ShReadReply, i, &y);
            shares.push(Share { x: self.shareholders[x].x, y });
        }
        let k = self.cfg.threshold_k;
        self.ops.reconstruct_bytes += shares.iter().take(k).map(|s| s.y.len() as u64).sum::<u64>();
        let payload = reconstruct(&shares[..k], k)
            .ok_or_else(|| SystemError::StorageFault { slot: i, reason: "reconstruction failed".into() })?;
        decode_payload(&payload).map_err(|e| SystemError::StorageFault { slot: i, reason: e.to_string() })
    }

    fn sh_write(&mut self, j: usize, rec: &Record) -> Result<(), SystemError> {
        let cap = self.payload_capacity(self.clock.now);
        let payload = encode_payload(rec, cap).map_err(|len| SystemError::StorageFault {
            slot: j,
            reason: format!("payload of {len} bytes exceeds capacity {}", cap.unwrap_or(0)),
        })?;
        let set = share(&payload, self.cfg.shareholders_n, self.cfg.threshold_k, &mut self.rng)?;
        self.ops.share_bytes += payload.len() as u64;
        for (x, s) in set.shares.into_iter().enumerate() {
            let p = Party::Shareholder(s.x);
            self.share_message(Party::Client, p, MsgKind::ShWrite, j, &s.y);
            self.shareholders[x].write(j, s.y)?;
        }
        let e_len = rec.e.encode().len() as u64;
        self.client.meta[j] =
            SlotMeta { evidence_entries: rec.e.len() as u64, evidence_bytes: e_len, payload_bytes: payload.len() as u64 };
        Ok(())
    }

    /// Reads slot `i` from the servers and merges evidence-service evidence.
    fn read_slot(&mut self, i: usize) -> Result<Record, SystemError> {
        let es = self.es_read(i)?;
        let mut rec = self.sh_read(i)?;
        merge_es_evidence(&mut rec.e, &es).map_err(|e| SystemError::StorageFault { slot: i, reason: e.to_string() })?;
        Ok(rec)
    }

    /// Stamps a pending client-held record directly at the timestamp service.
    fn stamp_pending(&mut self, rec: &mut Record) -> Result<(), SystemError> {
        let Some(last) = rec.e.entries.last() else { return Ok(()) };
        if last.ts.is_some() {
            return Ok(());
        }
        let c = last.c.as_ref().ok_or(EvidenceError::Incomplete(rec.e.len()))?.encode();
        let ts = self.stamp_for(Party::Client, &c)?;
        rec.e.entries.last_mut().expect("nonempty").ts = Some(ts);
        Ok(())
    }

    /// Prepares a record for write-back: refresh the commitment, or in the
    /// control setting re-send the previous one.
    fn prepare_writeback(&mut self, rec: &mut Record) -> Result<(), SystemError> {
        if rec.e.is_pending() {
            return Ok(());
        }
        if self.refresh_commitments {
            refresh_commit(&mut rec.e, &self.com_by_name[&self.active_com], &mut self.rng)?;
            self.ops.commits += 1;
        } else if let Some(last) = rec.e.entries.last_mut() {
            last.ts = None;
        }
        Ok(())
    }

    // --- client operations ---

    /// One oblivious access. Returns the block's data and evidence for reads.
    pub fn access(&mut self, op: AccessOp, id: BlockId, dat: Option<&[u8]>) -> Result<Option<ReadResult>, SystemError> {
        match (op, dat) {
            (AccessOp::Write, Some(d)) if d.len() > self.cfg.block_size_L => {
                return Err(SystemError::BadRequest(format!("data of {} bytes exceeds L = {}", d.len(), self.cfg.block_size_L)))
            }
            (AccessOp::Write, None) => return Err(SystemError::BadRequest("write needs data".into())),
            (AccessOp::Read, Some(_)) => return Err(SystemError::BadRequest("read takes no data".into())),
            _ => {}
        }
        let ap = self.client.oram.gen_ap(id, &mut self.rng)?;
        self.ops.accesses += 1;

        let mut pool: Vec<Record> = Vec::new();
        for (&(i, _), rid) in ap.pairs.iter().zip(&ap.read_ids) {
            let rec = self.read_slot(i)?;
            match rid {
                Some(b) => {
                    self.client.stash.insert(*b, rec);
                }
                None => pool.push(rec),
            }
        }
        if ap.created {
            let rec = match pool.pop() {
                Some(r) => r,
                None => {
                    let mut r = self.fresh_dummy()?;
                    self.stamp_pending(&mut r)?;
                    r
                }
            };
            self.client.stash.insert(id, rec);
        }

        let mut out = None;
        match op {
            AccessOp::Write => {
                let dat = dat.expect("checked").to_vec();
                let (c, d) = self.commit_now(&data_message(&dat))?;
                let e = EvidenceBlock::new(vec![EvidenceEntry::new(Op::Write, c, d, None)]);
                self.client.stash.insert(id, Record { dat, e });
            }
            AccessOp::Read => {
                let rec = &self.client.stash[&id];
                out = Some(ReadResult { dat: rec.dat.clone(), evidence: rec.e.clone() });
            }
        }

        for (&(_, j), wid) in ap.pairs.iter().zip(&ap.write_ids) {
            let mut rec = match wid {
                Some(b) => self.client.stash.remove(b).ok_or_else(|| SystemError::StorageFault {
                    slot: j,
                    reason: format!("block {b} missing from client stash"),
                })?,
                None => match pool.pop() {
                    Some(r) => r,
                    None => self.fresh_dummy()?,
                },
            };
            self.prepare_writeback(&mut rec)?;
            let c = rec.e.last().and_then(|x| x.c.clone()).ok_or(EvidenceError::Empty)?;
            self.es_write(j, c)?;
            self.sh_write(j, &rec)?;
        }

        let pending: Vec<BlockId> =
            self.client.stash.iter().filter(|(_, r)| r.e.is_pending()).map(|(&b, _)| b).collect();
        for b in pending {
            let mut rec = self.client.stash.remove(&b).expect("listed");
            self.stamp_pending(&mut rec)?;
            self.client.stash.insert(b, rec);
        }
        Ok(out)
    }

    pub fn write(&mut self, id: BlockId, dat: &[u8]) -> Result<(), SystemError> {
        self.access(AccessOp::Write, id, Some(dat)).map(|_| ())
    }

    pub fn read(&mut self, id: BlockId) -> Result<ReadResult, SystemError> {
        Ok(self.access(AccessOp::Read, id, None)?.expect("reads return data"))
    }

    // --- renewals ---

    /// Evidence-service timestamp renewal over every slot, plus the client's stash.
    pub fn renew_ts(&mut self) -> Result<(), SystemError> {
        self.renewals.push(self.clock.now);
        for i in 0..self.es.num_slots() {
            let (c, d) = {
                let block = self.es.read(i)?;
                let (tc, tts) = block.tip();
                self.ops.commits += 1;
                renew_ts_entry(tc, tts, &self.com_by_name[&self.active_com], &mut self.rng)?
            };
            let ts = self.stamp_for(Party::EvidenceService, &c.encode())?;
            self.es.append(i, EvidenceEntry::new(Op::ReTs, c, d, Some(ts)))?;
        }
        let ids: Vec<BlockId> = self.client.stash.keys().copied().collect();
        for b in ids {
            let mut rec = self.client.stash.remove(&b).expect("listed");
            let last = rec.e.last().ok_or(EvidenceError::Empty)?;
            let (Some(tc), Some(tts)) = (&last.c, &last.ts) else {
                return Err(EvidenceError::Incomplete(rec.e.len()).into());
            };
            self.ops.commits += 1;
            let (c, d) = renew_ts_entry(tc, tts, &self.com_by_name[&self.active_com], &mut self.rng)?;
            rec.e.entries.push(EvidenceEntry::new(Op::ReTs, c, d, None));
            self.stamp_pending(&mut rec)?;
            self.client.stash.insert(b, rec);
        }
        Ok(())
    }

    /// Client commitment renewal over every slot, plus the stash.
    pub fn renew_com(&mut self) -> Result<(), SystemError> {
        self.renewals.push(self.clock.now);
        for i in 0..self.es.num_slots() {
            let mut rec = self.read_slot(i)?;
            append_recom(&rec.dat, &mut rec.e, &self.com_by_name[&self.active_com], &mut self.rng)?;
            self.ops.commits += 1;
            let c = rec.e.last().and_then(|x| x.c.clone()).ok_or(EvidenceError::Empty)?;
            self.es_write(i, c)?;
            self.sh_write(i, &rec)?;
        }
        let ids: Vec<BlockId> = self.client.stash.keys().copied().collect();
        for b in ids {
            let mut rec = self.client.stash.remove(&b).expect("listed");
            append_recom(&rec.dat, &mut rec.e, &self.com_by_name[&self.active_com], &mut self.rng)?;
            self.ops.commits += 1;
            self.stamp_pending(&mut rec)?;
            self.client.stash.insert(b, rec);
        }
        Ok(())
    }

    /// Proactive resharing: every shareholder deals a zero-sharing per slot.
    pub fn reshare(&mut self) -> Result<(), SystemError> {
        let n = self.shareholders.len();
        let k = self.cfg.threshold_k;
        for i in 0..self.es.num_slots() {
            let len = self.shareholders[0].read(i)?.len();
            for dealer in 0..n {
                let dealt = zero_sharing(len, n, k, &mut self.rng);
                self.ops.share_bytes += len as u64;
                for (to, z) in dealt.into_iter().enumerate() {
                    if to != dealer {
                        let (a, b) = (Party::Shareholder(self.shareholders[dealer].x), Party::Shareholder(self.shareholders[to].x));
                        self.share_message(a, b, MsgKind::ReshareDeal, i, &z);
                    }
                    for (s, v) in self.shareholders[to].slot_mut(i)?.iter_mut().zip(&z) {
                        *s ^= v;
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs every scheduled event in `(now, t]`, then sets the clock to `t`.
    pub fn advance(&mut self, t: Day) -> Result<Vec<Event>, SystemError> {
        if t <= self.clock.now {
            return Err(SystemError::TimeNotAfter { now: self.clock.now, t });
        }
        let horizon = self.cfg.horizon();
        if t > horizon {
            return Err(SystemError::BeyondHorizon { t, horizon });
        }
        let events = self.schedule.events_between(self.clock.now, t);
        for ev in &events {
            self.set_now(ev.at);
            match ev.kind {
                EventKind::RenewTs => self.renew_ts()?,
                EventKind::RenewCom => self.renew_com()?,
                EventKind::Reshare => self.reshare()?,
            }
        }
        self.set_now(t);
        Ok(events)
    }

    // --- public padding bound ---

    fn entry_bound(&self, t: Day) -> usize {
        let com = self
            .com_by_name
            .values()
            .filter(|c| c.usage.start <= t)
            .map(|c| {
                let n = c.hash().expect("commitment").field().byte_len();
                let h = c.hash().expect("commitment").bytes();
                let cm = Commitment { instance_id: c.instance_id.clone(), y: vec![0; h], a: vec![0; n], b: vec![0; n] };
                (cm.encode().len(), Decommitment { r: vec![0; n] }.encode().len())
            })
            .map(|(a, b)| a + b)
            .max()
            .unwrap_or(0);
        let sig = self
            .tss
            .keys
            .values()
            .filter(|k| k.instance.usage.start <= t)
            .map(|k| {
                let sig_len = k.instance.sig_bytes().expect("signature");
                Timestamp { t, instance_id: k.instance.instance_id.clone(), sig: vec![0; sig_len] }.encode().len()
            })
            .max()
            .unwrap_or(0);
        // op byte, three presence flags and three length prefixes
        1 + 3 * 9 + com + sig
    }

    /// Public payload length at time `t`, or `None` without padding.
    ///
    /// An untouched chain gains at most one renewal entry and one surviving
    /// Read per renewal; on top of that come the Write and a trailing Read.
    pub fn payload_capacity(&self, t: Day) -> Option<usize> {
        match self.cfg.padding {
            Padding::None => None,
            Padding::WorstCase => {
                let now = self.entry_bound(t);
                let past: usize = self.renewals.iter().filter(|&&e| e <= t).map(|&e| 2 * self.entry_bound(e)).sum();
                let evidence = 8 + 2 * now + past;
                Some(8 + 8 + 8 + self.cfg.block_size_L + evidence)
            }
        }
    }

    // --- inspection ---

    /// Data and merged evidence of slot `i`, read directly from storage.
    pub fn slot_proof(&self, i: usize) -> Result<Proof, SystemError> {
        let es = self.es.read(i)?;
        let k = self.cfg.threshold_k;
        let shares: Vec<Share> = self.shareholders[..k]
            .iter()
            .map(|s| Ok(Share { x: s.x, y: s.read(i)?.to_vec() }))
            .collect::<Result<_, SystemError>>()?;
        let payload = reconstruct(&shares, k)
            .ok_or_else(|| SystemError::StorageFault { slot: i, reason: "reconstruction failed".into() })?;
        let mut rec = decode_payload(&payload)?;
        merge_es_evidence(&mut rec.e, es).map_err(|e| SystemError::StorageFault { slot: i, reason: e.to_string() })?;
        proof_of(rec).ok_or(SystemError::StorageFault { slot: i, reason: "chain has no first timestamp".into() })
    }

    /// Shareholder-side record of slot `i` without the evidence-service merge.
    pub fn slot_record(&self, i: usize) -> Result<Record, SystemError> {
        let k = self.cfg.threshold_k;
        let shares: Vec<Share> = self.shareholders[..k]
            .iter()
            .map(|s| Ok(Share { x: s.x, y: s.read(i)?.to_vec() }))
            .collect::<Result<_, SystemError>>()?;
        let payload = reconstruct(&shares, k)
            .ok_or_else(|| SystemError::StorageFault { slot: i, reason: "reconstruction failed".into() })?;
        Ok(decode_payload(&payload)?)
    }

    /// Verifies every chain held by the servers and the client stash at `t_ver`.
    pub fn audit(&self, t_ver: Day) -> Result<AuditReport, SystemError> {
        let mut rep = AuditReport::default();
        for i in 0..self.num_slots() {
            let p = self.slot_proof(i)?;
            rep.checked += 1;
            if let Some(f) = verify_int_report(&self.ta, &p.dat, p.t, &p.evidence, t_ver).failure {
                rep.failures.push((Location::Slot(i), f));
            }
        }
        for (&b, rec) in &self.client.stash {
            rep.checked += 1;
            match proof_of(rec.clone()) {
                Some(p) => {
                    if let Some(f) = verify_int_report(&self.ta, &p.dat, p.t, &p.evidence, t_ver).failure {
                        rep.failures.push((Location::Stash(b), f));
                    }
                }
                None => rep.failures.push((Location::Stash(b), Check::MissingTimestamp(1))),
            }
        }
        Ok(rep)
    }

    /// Encoded bytes held by the evidence service for slot `i`.
    pub fn es_slot_bytes(&self, i: usize) -> Result<usize, SystemError> {
        Ok(self.es.read(i)?.encode().len())
    }
}

fn proof_of(rec: Record) -> Option<Proof> {
    let t = rec.e.entries.first()?.ts.as_ref()?.t;
    Some(Proof { dat: rec.dat, t, evidence: rec.e })
}

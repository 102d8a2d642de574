//! State directory: one file per party, codec bytes where the data is binary.
//!
//! | file | contents |
//! |---|---|
//! | `config.json` | the configuration |
//! | `trust_anchor.json` | the verifier's instance table |
//! | `ts.bin` | `list[ list[bytes(id), bytes(secret)] ]` signing keys |
//! | `es.bin` | `list[ bytes(EsBlock) ]`, one per slot |
//! | `sh-<x>.bin` | `list[ bytes(share) ]`, one per slot |
//! | `client.bin` | `list[ bytes(oram json), list[ list[u64 id, Record] ], bytes(meta json) ]` |
//! | `system.json` | clock, generator position, flags and counters |
//! | `ledger.csv` | network counters |

use super::{
    Client, Clock, Config, EvidenceService, NetLedger, OpCounts, Record, Schedule, Shareholder, SlotMeta, System,
    SystemError, TimestampService,
};
use crate::codec::{decode_byte_list, encode_bytes, encode_list, encode_u64, Decode, Encode, Encoded, Reader};
use crate::crypto::{PaddedEd25519, SchemeKind, SchemeParams, SimRng, TimestampKey, TrustAnchor};
use crate::evidence::EsBlock;
use crate::oram::OramState;
use crate::time::Day;
use ed25519_dalek::SigningKey;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct SystemFile {
    now: Day,
    rng_seed: String,
    rng_stream: u64,
    rng_word_pos: String,
    refresh_commitments: bool,
    ops: OpCounts,
    renewals: Vec<Day>,
}

fn io<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> SystemError + '_ {
    move |e| SystemError::Io(format!("{what}: {e}"))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), SystemError> {
    fs::write(dir.join(name), bytes).map_err(io(name))
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>, SystemError> {
    fs::read(dir.join(name)).map_err(io(name))
}

fn read_string(dir: &Path, name: &str) -> Result<String, SystemError> {
    fs::read_to_string(dir.join(name)).map_err(io(name))
}

fn byte_list<'a>(items: impl Iterator<Item = &'a [u8]>) -> Encoded {
    encode_list(&items.map(encode_bytes).collect::<Vec<_>>())
}

/// Writes the full system state into `dir`, creating it if needed.
pub fn save(sys: &System, dir: &Path) -> Result<(), SystemError> {
    fs::create_dir_all(dir).map_err(io("state dir"))?;
    write(dir, "config.json", sys.cfg.to_json().as_bytes())?;
    write(dir, "trust_anchor.json", sys.ta.to_json().as_bytes())?;

    let keys: Vec<Encoded> = sys
        .tss
        .keys
        .values()
        .map(|k| encode_list(&[encode_bytes(k.instance.instance_id.as_bytes()), encode_bytes(&k.signing_key.to_bytes())]))
        .collect();
    write(dir, "ts.bin", encode_list(&keys).as_bytes())?;

    let es: Vec<Encoded> = (0..sys.es.num_slots()).map(|i| Ok(sys.es.read(i)?.encode())).collect::<Result<_, SystemError>>()?;
    write(dir, "es.bin", byte_list(es.iter().map(Encoded::as_bytes)).as_bytes())?;

    for sh in &sys.shareholders {
        write(dir, &format!("sh-{}.bin", sh.x), byte_list(sh.slots.iter().map(Vec::as_slice)).as_bytes())?;
    }

    let stash: Vec<Encoded> =
        sys.client.stash.iter().map(|(&b, r)| encode_list(&[encode_u64(b as u64), r.encode()])).collect();
    let oram = serde_json::to_vec(&sys.client.oram).map_err(io("oram"))?;
    let meta = serde_json::to_vec(&sys.client.meta).map_err(io("meta"))?;
    let client = encode_list(&[encode_bytes(&oram), encode_list(&stash), encode_bytes(&meta)]);
    write(dir, "client.bin", client.as_bytes())?;

    let f = SystemFile {
        now: sys.clock.now,
        rng_seed: hex::encode(sys.rng.get_seed()),
        rng_stream: sys.rng.get_stream(),
        rng_word_pos: sys.rng.get_word_pos().to_string(),
        refresh_commitments: sys.refresh_commitments,
        ops: sys.ops,
        renewals: sys.renewals.clone(),
    };
    write(dir, "system.json", serde_json::to_string_pretty(&f).map_err(io("system"))?.as_bytes())?;
    write(dir, "ledger.csv", sys.net.to_csv().as_bytes())
}

/// Restores a system saved with [`save`].
pub fn load(dir: &Path) -> Result<System, SystemError> {
    let cfg = Config::from_json(&read_string(dir, "config.json")?)?;
    let ta = TrustAnchor::from_json(&read_string(dir, "trust_anchor.json")?)?;

    let mut tss = TimestampService::default();
    let bad = |what: &str| SystemError::Io(format!("malformed {what}"));
    let ts_bin = read(dir, "ts.bin")?;
    let mut r = Reader::new(&ts_bin);
    for _ in 0..r.list_len()? {
        if r.list_len()? != 2 {
            return Err(bad("ts.bin"));
        }
        let id = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| bad("ts.bin"))?;
        let secret: [u8; 32] = r.bytes()?.try_into().map_err(|_| bad("ts.bin"))?;
        let instance = ta.get(&id).ok_or_else(|| bad("ts.bin"))?.instance.clone();
        let scheme = PaddedEd25519::new(instance.sig_bytes().ok_or_else(|| bad("ts.bin"))?)?;
        tss.insert(TimestampKey { instance, scheme, signing_key: SigningKey::from_bytes(&secret) });
    }
    r.finish()?;

    let mut com_by_name = BTreeMap::new();
    let mut sig_by_name = BTreeMap::new();
    for inst in ta.instances() {
        match (&inst.params, inst.kind()) {
            (SchemeParams::Commitment { name, .. }, SchemeKind::Commitment) => {
                com_by_name.insert(name.clone(), inst.clone());
            }
            (SchemeParams::Signature { name, .. }, _) => {
                sig_by_name.insert(name.clone(), inst.instance_id.clone());
            }
            _ => return Err(bad("trust anchor")),
        }
    }

    let mut es = EvidenceService::default();
    for b in decode_byte_list(&read(dir, "es.bin")?)? {
        es.slots.push(Some(EsBlock::decode(&b)?));
    }
    let m = es.num_slots();
    let mut shareholders = Vec::new();
    for x in 1..=cfg.shareholders_n as u8 {
        let slots = decode_byte_list(&read(dir, &format!("sh-{x}.bin"))?)?;
        if slots.len() != m {
            return Err(bad("shareholder file"));
        }
        shareholders.push(Shareholder { x, slots });
    }

    let client_bin = read(dir, "client.bin")?;
    let mut r = Reader::new(&client_bin);
    if r.list_len()? != 3 {
        return Err(bad("client.bin"));
    }
    let oram: OramState = serde_json::from_slice(r.bytes()?).map_err(io("oram"))?;
    let mut stash = BTreeMap::new();
    for _ in 0..r.list_len()? {
        if r.list_len()? != 2 {
            return Err(bad("client.bin"));
        }
        let id = r.u64()? as u32;
        stash.insert(id, Record::decode_from(&mut r)?);
    }
    let meta: Vec<SlotMeta> = serde_json::from_slice(r.bytes()?).map_err(io("meta"))?;
    r.finish()?;
    if oram.num_slots() != m || meta.len() != m {
        return Err(bad("client.bin"));
    }

    let f: SystemFile = serde_json::from_str(&read_string(dir, "system.json")?).map_err(io("system.json"))?;
    let seed: [u8; 32] = hex::decode(&f.rng_seed).ok().and_then(|v| v.try_into().ok()).ok_or_else(|| bad("system.json"))?;
    let mut rng = SimRng::from_seed(seed);
    rng.set_stream(f.rng_stream);
    rng.set_word_pos(f.rng_word_pos.parse().map_err(|_| bad("system.json"))?);
    let net = NetLedger::from_csv(&read_string(dir, "ledger.csv")?).ok_or_else(|| bad("ledger.csv"))?;

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
        client: Client { oram, stash, meta },
        es,
        shareholders,
        tss,
        net,
        rng,
        refresh_commitments: f.refresh_commitments,
        ops: f.ops,
        renewals: f.renewals,
        share_msg_overhead,
        cfg,
    };
    sys.set_now(f.now);
    Ok(sys)
}

impl System {
    pub fn save(&self, dir: &Path) -> Result<(), SystemError> {
        save(self, dir)
    }

    pub fn load(dir: &Path) -> Result<System, SystemError> {
        load(dir)
    }
}

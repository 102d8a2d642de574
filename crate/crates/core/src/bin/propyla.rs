//! Command-line front end over a state directory.
//!
//! Exit codes: 0 success or accept, 1 reject or failed check, 2 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use propyla::codec::{Decode, Encode};
use propyla::crypto::TrustAnchor;
use propyla::evidence::{verify_int_report, EvidenceBlock};
use propyla::harness::aph::{
    run_oram_aph, run_propyla_aph, OramDistinguisher, OramKind, PropylaAphParams, PropylaControl, PropylaDistinguisher,
};
use propyla::harness::cost::{simulate_schedule, Workload};
use propyla::harness::fuzz::{integrity_fuzz, Corpus, Mutation};
use propyla::oram::OramError;
use propyla::parties::{Config, System, SystemError};
use propyla::time::Day;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "propyla", version, about = "Long-term confidential storage with hidden access patterns")]
struct Cli {
    /// Configuration JSON; defaults to the 16-block evaluation setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "propyla-state")]
    state_dir: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Out::Json)]
    out: Out,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Create a fresh system in the state directory.
    Init {
        #[arg(long)]
        force: bool,
    },
    /// Write a block.
    Write {
        id: u32,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        data: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Read a block, optionally saving its data and evidence.
    Read {
        id: u32,
        #[arg(long)]
        data_out: Option<PathBuf>,
        #[arg(long)]
        evidence_out: Option<PathBuf>,
    },
    /// Timestamp renewal now.
    RenewTs,
    /// Commitment renewal now.
    RenewCom,
    /// Proactive resharing now.
    Reshare,
    /// Check data, claimed time and evidence against a trust anchor.
    Verify {
        #[arg(long)]
        data: PathBuf,
        /// Claimed storage time, in days.
        #[arg(long)]
        time: u64,
        #[arg(long)]
        evidence: PathBuf,
        #[arg(long)]
        trust_anchor: PathBuf,
        /// Verification time in days; defaults to the state directory's clock.
        #[arg(long)]
        at: Option<u64>,
    },
    /// Move the clock forward, running due renewals.
    Advance {
        #[arg(long, conflicts_with = "years", required_unless_present = "years")]
        days: Option<u64>,
        #[arg(long)]
        years: Option<u64>,
    },
    /// Run the whole horizon on a fresh system and report yearly costs.
    Simulate {
        #[arg(long, default_value_t = 0)]
        reads_per_year: usize,
    },
    /// Run an access-pattern-hiding experiment.
    AphTest {
        #[arg(long, value_enum, default_value_t = Game::Propyla)]
        game: Game,
        /// Distinguisher name, e.g. byte-comparison or path-overlap.
        #[arg(long, default_value = "random-guess")]
        distinguisher: String,
        /// none, refresh-disabled or threshold-violated.
        #[arg(long, default_value = "none")]
        control: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Use the trivial ORAM in the ORAM game.
        #[arg(long)]
        identity: bool,
    },
    /// Mutate honest proofs and count acceptances.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        per_class: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Game {
    Oram,
    Propyla,
}

/// Failure with the exit code it maps to.
struct Fail(u8, String);

impl From<SystemError> for Fail {
    fn from(e: SystemError) -> Self {
        let code = match e {
            SystemError::Config(_)
            | SystemError::BadRequest(_)
            | SystemError::SlotOutOfRange(_)
            | SystemError::TimeNotAfter { .. }
            | SystemError::BeyondHorizon { .. }
            | SystemError::Oram(OramError::IdOutOfRange(..))
            | SystemError::Io(_) => 2,
            _ => 1,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl std::fmt::Display) -> Fail {
    Fail(2, msg.to_string())
}

fn config(cli: &Cli) -> Result<Config, Fail> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Config::from_json(&s).map_err(usage)?
        }
        None => Config::paper(16),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn named<T: serde::de::DeserializeOwned>(what: &str, name: &str) -> Result<T, Fail> {
    serde_json::from_value(json!(name)).map_err(|_| usage(format!("unknown {what} `{name}`")))
}

/// Prints a flat record as a one-row CSV or a JSON object.
fn emit(out: Out, fields: &[(&str, serde_json::Value)]) {
    match out {
        Out::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            println!("{}", serde_json::Value::Object(map));
        }
        Out::Csv => {
            let head: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let row: Vec<String> = fields
                .iter()
                .map(|f| match &f.1 {
                    serde_json::Value::String(s) => s.clone(),
                    v => v.to_string(),
                })
                .collect();
            println!("{}\n{}", head.join(","), row.join(","));
        }
    }
}

fn load(dir: &Path) -> Result<System, Fail> {
    Ok(System::load(dir)?)
}

fn write_file(p: &Path, bytes: &[u8]) -> Result<(), Fail> {
    std::fs::write(p, bytes).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn read_file(p: &Path) -> Result<Vec<u8>, Fail> {
    std::fs::read(p).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    let dir = cli.state_dir.as_path();
    match &cli.cmd {
        Cmd::Init { force } => {
            if dir.join("system.json").exists() && !force {
                return Err(usage(format!("{} already holds a system; pass --force", dir.display())));
            }
            let sys = System::init(config(cli)?)?;
            std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            sys.save(dir)?;
            emit(
                cli.out,
                &[
                    ("blocks", json!(sys.config().N)),
                    ("slots", json!(sys.num_slots())),
                    ("shareholders", json!(sys.shareholders().len())),
                    ("now", json!(sys.now().0)),
                ],
            );
        }
        Cmd::Write { id, data, file } => {
            let dat = match (data, file) {
                (Some(d), _) => d.clone().into_bytes(),
                (_, Some(f)) => read_file(f)?,
                _ => unreachable!("clap requires one"),
            };
            let mut sys = load(dir)?;
            sys.write(*id, &dat)?;
            sys.save(dir)?;
            emit(cli.out, &[("id", json!(id)), ("bytes", json!(dat.len())), ("now", json!(sys.now().0))]);
        }
        Cmd::Read { id, data_out, evidence_out } => {
            let mut sys = load(dir)?;
            let r = sys.read(*id)?;
            sys.save(dir)?;
            if let Some(p) = data_out {
                write_file(p, &r.dat)?;
            }
            if let Some(p) = evidence_out {
                write_file(p, r.evidence.encode().as_bytes())?;
            }
            emit(
                cli.out,
                &[
                    ("id", json!(id)),
                    ("data_hex", json!(hex::encode(&r.dat))),
                    ("written_at", json!(r.written_at().map(|d| d.0))),
                    ("evidence_entries", json!(r.evidence.len())),
                ],
            );
        }
        Cmd::RenewTs | Cmd::RenewCom | Cmd::Reshare => {
            let mut sys = load(dir)?;
            let what = match cli.cmd {
                Cmd::RenewTs => {
                    sys.renew_ts()?;
                    "renew-ts"
                }
                Cmd::RenewCom => {
                    sys.renew_com()?;
                    "renew-com"
                }
                _ => {
                    sys.reshare()?;
                    "reshare"
                }
            };
            sys.save(dir)?;
            emit(cli.out, &[("done", json!(what)), ("now", json!(sys.now().0))]);
        }
        Cmd::Verify { data, time, evidence, trust_anchor, at } => {
            let dat = read_file(data)?;
            let e = EvidenceBlock::decode(&read_file(evidence)?).map_err(|e| Fail(1, format!("evidence: {e}")))?;
            let ta_json = String::from_utf8(read_file(trust_anchor)?).map_err(usage)?;
            let ta = TrustAnchor::from_json(&ta_json).map_err(usage)?;
            let t_ver = match at {
                Some(d) => Day(*d),
                None => load(dir)?.now(),
            };
            let rep = verify_int_report(&ta, &dat, Day(*time), &e, t_ver);
            let accept = rep.ok();
            emit(
                cli.out,
                &[
                    ("accept", json!(accept)),
                    ("entries", json!(e.len())),
                    ("t_ver", json!(t_ver.0)),
                    ("failure", json!(rep.failure.map(|f| f.to_string()))),
                ],
            );
            return Ok(if accept { 0 } else { 1 });
        }
        Cmd::Advance { days, years } => {
            let mut sys = load(dir)?;
            let t = match (days, years) {
                (Some(d), _) => Day(*d),
                (_, Some(y)) => Day::from_years(*y),
                _ => unreachable!("clap requires one"),
            };
            let events = sys.advance(t)?;
            sys.save(dir)?;
            let kinds: Vec<String> = events.iter().map(|e| format!("{:?}@{}", e.kind, e.at.0)).collect();
            emit(cli.out, &[("now", json!(sys.now().0)), ("events", json!(kinds.join(";")))]);
        }
        Cmd::Simulate { reads_per_year } => {
            let rep = simulate_schedule(config(cli)?, Workload { reads_per_year: *reads_per_year })?;
            match cli.out {
                Out::Csv => print!("{}", rep.to_csv()),
                Out::Json => println!("{}", serde_json::to_string(&rep).map_err(usage)?),
            }
        }
        Cmd::AphTest { game, distinguisher, control, trials, identity } => {
            let seed = cli.seed.unwrap_or(1);
            let outcome = match game {
                Game::Oram => {
                    let d: OramDistinguisher = named("distinguisher", distinguisher)?;
                    let kind = if *identity { OramKind::Identity } else { OramKind::Path };
                    run_oram_aph(16, kind, d, *trials, seed)
                }
                Game::Propyla => {
                    let d: PropylaDistinguisher = named("distinguisher", distinguisher)?;
                    let c: PropylaControl = named("control", control)?;
                    let mut p = PropylaAphParams::desk(d, c, *trials);
                    p.seed = seed;
                    if cli.config.is_some() {
                        p.config = config(cli)?;
                    }
                    run_propyla_aph(&p)
                }
            }
            .map_err(usage)?;
            emit(
                cli.out,
                &[
                    ("distinguisher", json!(distinguisher)),
                    ("control", json!(control)),
                    ("trials", json!(outcome.trials)),
                    ("successes", json!(outcome.successes)),
                    ("rate", json!(outcome.rate)),
                ],
            );
        }
        Cmd::Fuzz { per_class } => {
            let seed = cli.seed.unwrap_or(1);
            let corpus = Corpus::standard(seed)?;
            let mut rng = propyla::crypto::make_rng(Some(seed));
            let mut classes = vec![Mutation::Identity];
            classes.extend(Mutation::HOSTILE);
            let rep = integrity_fuzz(&corpus, &classes, *per_class, &mut rng);
            match cli.out {
                Out::Csv => print!("{}", rep.to_csv()),
                Out::Json => println!("{}", serde_json::to_string(&rep).map_err(usage)?),
            }
            return Ok(if rep.sound() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("propyla: {msg}");
            ExitCode::from(code)
        }
    }
}

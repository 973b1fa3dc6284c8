//! Command-line front end. Exit status: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::analysis::{rate_table, render_cost, render_rate_table, xor_cost};
use crate::error::{Error, Result};
use crate::netsim::{fetch, Server};
use crate::privacy::{audit_privacy, obfuscate, synthesize_code};
use crate::retrieve::{answer_query, decode_demand, MessageStore, SideInfo};
use crate::storage::{
    audit_to_json, audit_to_text, code_to_json, decode_answer, decode_side_info, encode_answer, encode_side_info, load_code,
    load_messages, save_code, save_messages,
};
use crate::types::{render, MessageId, SchemeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DbArg {
    N1,
    N2,
}

#[derive(Debug, Parser)]
#[command(name = "pirpsi", version, about = "XOR-based two-server PIR with private side information")]
pub struct CliConfig {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

fn pair<T: std::str::FromStr>(s: &str) -> std::result::Result<[T; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.trim().parse().map_err(|_| format!("bad value {a:?}"))?,
            b.trim().parse().map_err(|_| format!("bad value {b:?}"))?,
        ]),
        _ => Err("expected two comma-separated values".into()),
    }
}

fn k_arg() -> clap::builder::RangedI64ValueParser<u8> {
    clap::value_parser!(u8).range(3..=20)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code and write it as a JSON document.
    Build {
        #[arg(long, value_parser = k_arg())]
        k: u8,
        #[arg(long, requires = "si")]
        demand: Option<MessageId>,
        #[arg(long, value_parser = pair::<MessageId>, requires = "demand")]
        si: Option<[MessageId; 2]>,
        #[arg(long)]
        out: PathBuf,
        /// Shuffle codeword order and rename byproduct indexes.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute one database's answer to its query.
    Answer {
        #[arg(long, value_enum)]
        db: DbArg,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode the demand from both answers and the side information.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_parser = pair::<PathBuf>)]
        answers: [PathBuf; 2],
        #[arg(long)]
        si_bits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check both privacy conditions for every demand and side-information choice.
    Audit {
        #[arg(long, value_parser = clap::value_parser!(u8).range(4..=7))]
        k: u8,
        /// Use the search witness instead of the case scripts (K=4 or 5).
        #[arg(long)]
        oracle: bool,
    },
    /// Rate comparison table.
    Rates {
        #[arg(long, value_parser = k_arg())]
        k_min: u8,
        #[arg(long, value_parser = k_arg())]
        k_max: u8,
    },
    /// Decoding cost of a stored code.
    Cost {
        #[arg(long)]
        code: PathBuf,
    },
    /// Write a random message file, and optionally the side information drawn from it.
    Messages {
        #[arg(long, value_parser = k_arg())]
        k: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = pair::<MessageId>, requires = "si_out")]
        si: Option<[MessageId; 2]>,
        #[arg(long)]
        si_out: Option<PathBuf>,
    },
    /// Serve a message file over TCP until killed.
    Serve {
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        endpoint: String,
    },
    /// Retrieve a demand from two running servers.
    Fetch {
        #[arg(long, value_parser = pair::<String>)]
        endpoints: [String; 2],
        #[arg(long, value_parser = k_arg())]
        k: u8,
        #[arg(long)]
        demand: MessageId,
        #[arg(long, value_parser = pair::<MessageId>)]
        si: [MessageId; 2],
        #[arg(long)]
        si_bits: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn params(k: u8, demand: MessageId, si: [MessageId; 2]) -> std::result::Result<SchemeParams, Failure> {
    SchemeParams::new(k, demand, si).map_err(|e| Failure::Usage(e.to_string()))
}

fn hex(bits: &[bool]) -> String {
    crate::storage::pack_bits(bits).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_demand(path: &std::path::Path, bits: Vec<bool>) -> Result<()> {
    save_messages(path, &MessageStore::from_rows(vec![bits])?)
}

fn execute(cfg: CliConfig) -> std::result::Result<String, Failure> {
    let fmt = cfg.format;
    Ok(match cfg.command {
        Command::Build { k, demand, si, out, seed } => {
            let p = match (demand, si) {
                (Some(g), Some(si)) => params(k, g, si)?,
                _ => SchemeParams::canonical(k).map_err(|e| Failure::Usage(e.to_string()))?,
            };
            let mut code = synthesize_code(k, p.demand, p.si())?;
            if let Some(s) = seed {
                code = obfuscate(&code, s)?;
            }
            save_code(&out, &code)?;
            match fmt {
                Format::Text => format!("N1\n{}N2\n{}", render(&code.query_n1), render(&code.query_n2)),
                Format::Json => code_to_json(&code) + "\n",
            }
        }
        Command::Answer { db, code, messages, out } => {
            let code = load_code(&code)?;
            let store = load_messages(&messages)?;
            let q = match db {
                DbArg::N1 => &code.query_n1,
                DbArg::N2 => &code.query_n2,
            };
            let ans = answer_query(&store, q)?;
            fs::write(&out, encode_answer(&ans)?).map_err(Error::from)?;
            match fmt {
                Format::Text => format!("{} answer bits\n", ans.bits.len()),
                Format::Json => json!({ "bits": ans.bits.len() }).to_string() + "\n",
            }
        }
        Command::Decode { code, answers, si_bits, out } => {
            let code = load_code(&code)?;
            let a1 = decode_answer(&fs::read(&answers[0]).map_err(Error::from)?)?;
            let a2 = decode_answer(&fs::read(&answers[1]).map_err(Error::from)?)?;
            let si = decode_side_info(&fs::read(&si_bits).map_err(Error::from)?, code.params.si())?;
            let (bits, trace) = decode_demand(&code, &a1, &a2, &si)?;
            let n = bits.len();
            let h = hex(&bits);
            write_demand(&out, bits)?;
            match fmt {
                Format::Text => format!("decoded {n} bits with {} XORs: {h}\n", trace.xor_count),
                Format::Json => json!({ "bits": n, "xor_count": trace.xor_count, "hex": h }).to_string() + "\n",
            }
        }
        Command::Audit { k, oracle } => {
            if oracle && k > 5 {
                return Err(Failure::Usage("--oracle supports K=4 or 5".into()));
            }
            let report = audit_privacy(k, oracle)?;
            let text = match fmt {
                Format::Text => audit_to_text(&report),
                Format::Json => audit_to_json(&report) + "\n",
            };
            if !report.all_pass() {
                print!("{text}");
                return Err(Failure::Domain(Error::Synthesis(format!(
                    "{} of {} assignments failed",
                    report.entries.len() - report.passed(),
                    report.entries.len()
                ))));
            }
            text
        }
        Command::Rates { k_min, k_max } => {
            if k_min > k_max {
                return Err(Failure::Usage("--k-min exceeds --k-max".into()));
            }
            let rows = rate_table(k_min, k_max);
            match fmt {
                Format::Text => render_rate_table(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
            }
        }
        Command::Cost { code } => {
            let c = xor_cost(&load_code(&code)?)?;
            match fmt {
                Format::Text => render_cost(&c),
                Format::Json => serde_json::to_string_pretty(&c).expect("report serializes") + "\n",
            }
        }
        Command::Messages { k, seed, out, si, si_out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let store = MessageStore::random(k, 2 * crate::types::demand_bits_per_db(k), &mut rng);
            save_messages(&out, &store)?;
            if let (Some(si), Some(path)) = (si, si_out) {
                if si.iter().any(|&m| m == 0 || m > k) || si[0] == si[1] {
                    return Err(Failure::Usage("side information ids must be distinct and in 1..=K".into()));
                }
                let mut ids = si;
                ids.sort_unstable();
                let side = SideInfo { ids, bits: [store.row(ids[0]).to_vec(), store.row(ids[1]).to_vec()] };
                fs::write(path, encode_side_info(&side)).map_err(Error::from)?;
            }
            format!("wrote {k} messages of {} bits\n", store.message_len())
        }
        Command::Serve { messages, endpoint } => {
            let store = Arc::new(load_messages(&messages)?);
            let server = Server::bind(store, endpoint.as_str())?;
            eprintln!("serving on {}", server.local_addr());
            server.wait();
            String::new()
        }
        Command::Fetch { endpoints, k, demand, si, si_bits, out } => {
            let p = params(k, demand, si)?;
            let side = decode_side_info(&fs::read(&si_bits).map_err(Error::from)?, p.si())?;
            let r = fetch([endpoints[0].as_str(), endpoints[1].as_str()], &p, &side)?;
            let n = r.demand.len();
            let h = hex(&r.demand);
            if let Some(path) = out {
                write_demand(&path, r.demand)?;
            }
            match fmt {
                Format::Text => format!("retrieved {n} bits from {} downloaded: {h}\n", r.downloaded_bits),
                Format::Json => json!({ "bits": n, "downloaded_bits": r.downloaded_bits, "hex": h }).to_string() + "\n",
            }
        }
    })
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cfg) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["pirpsi", "build", "--k", "2", "--out", "x"]), 2);
        assert_eq!(run(["pirpsi", "rates", "--k-min", "5", "--k-max", "4"]), 2);
        assert_eq!(run(["pirpsi", "nope"]), 2);
    }

    #[test]
    fn rates_ok() {
        assert_eq!(run(["pirpsi", "rates", "--k-min", "7", "--k-max", "7"]), 0);
    }
}

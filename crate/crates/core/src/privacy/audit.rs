use serde::Serialize;

use crate::construct::build_query_n1;
use crate::error::{Error, Result};
use crate::retrieve::decodability_oracle;
use crate::types::{Code, MessageId, Query, SchemeParams};

use super::{layout_structure, query_structure, search_synthesize_n2, synthesize_n2_traced, Route};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub demand: MessageId,
    pub si: [MessageId; 2],
    pub case: Option<u8>,
    pub route: Option<Route>,
    pub structure_ok: bool,
    pub decodable: bool,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub k: u8,
    pub method: String,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

pub fn triples(k: u8) -> Vec<(MessageId, [MessageId; 2])> {
    let mut out = Vec::new();
    for g in 1..=k {
        for a in 1..=k {
            for b in a + 1..=k {
                if a != g && b != g {
                    out.push((g, [a, b]));
                }
            }
        }
    }
    out
}

/// Result of one synthesis attempt: the query plus its case and route, when known.
pub type Synthesized = Result<(Query, Option<u8>, Option<Route>)>;

/// Audits every assignment for `k` with a caller-supplied synthesizer.
/// N1 is built once and shared read-only across worker threads.
pub fn audit_privacy_with<F>(k: u8, method: &str, synth: F) -> AuditReport
where
    F: Fn(&Query, SchemeParams) -> Synthesized + Sync,
{
    let n1 = build_query_n1(k).expect("k validated by caller");
    let reference = query_structure(&n1);
    let all = triples(k);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(all.len().max(1));
    let chunk = all.len().div_ceil(workers);
    let entries: Vec<AuditEntry> = std::thread::scope(|s| {
        let handles: Vec<_> = all
            .chunks(chunk.max(1))
            .map(|part| {
                let n1 = &n1;
                let reference = &reference;
                let synth = &synth;
                s.spawn(move || {
                    part.iter()
                        .map(|&(g, si)| {
                            let params = SchemeParams::new(k, g, si).expect("valid triple");
                            match synth(n1, params) {
                                Ok((n2, case, route)) => {
                                    let structure_ok =
                                        query_structure(&n2) == *reference && layout_structure(&n2.layout()) == *reference;
                                    let code = Code { params, query_n1: n1.clone(), query_n2: n2 };
                                    let decodable = decodability_oracle(&code).decodable;
                                    AuditEntry {
                                        demand: g,
                                        si,
                                        case,
                                        route,
                                        structure_ok,
                                        decodable,
                                        pass: structure_ok && decodable,
                                        error: None,
                                    }
                                }
                                Err(e) => AuditEntry {
                                    demand: g,
                                    si,
                                    case: None,
                                    route: None,
                                    structure_ok: false,
                                    decodable: false,
                                    pass: false,
                                    error: Some(e.to_string()),
                                },
                            }
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("audit worker panicked")).collect()
    });
    AuditReport { k, method: method.to_string(), entries }
}

/// Checks both privacy conditions for every (demand, side information) triple.
/// With `use_oracle` the independent search replaces the case scripts.
pub fn audit_privacy(k: u8, use_oracle: bool) -> Result<AuditReport> {
    if use_oracle {
        if !(4..=5).contains(&k) {
            return Err(Error::UnsupportedK(k));
        }
        return Ok(audit_privacy_with(k, "search", |n1, p| {
            search_synthesize_n2(n1, p.k, p.demand, p.si())
                .map(|q| (q, None, None))
                .ok_or_else(|| Error::Synthesis("search found no witness".into()))
        }));
    }
    if !(4..=7).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    Ok(audit_privacy_with(k, "cases", |n1, p| {
        synthesize_n2_traced(n1, p.k, p.demand, p.si()).map(|s| (s.query, s.case.map(|c| c.id), Some(s.route)))
    }))
}

//! File formats: JSON code documents, the binary message file, answer files
//! and the text form of queries.
//!
//! Integers are big-endian and bits are packed most-significant-bit first.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::privacy::{query_structure, AuditReport};
use crate::retrieve::{AnswerVector, MessageStore, SideInfo};
use crate::types::{BitRef, Code, Codeword, MessageId, Query, SchemeParams};

pub const FORMAT_VERSION: u32 = 1;
pub const MESSAGE_MAGIC: &[u8; 4] = b"PMSG";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDocument {
    pub format_version: u32,
    pub k: u8,
    pub demand: MessageId,
    pub si: [MessageId; 2],
    /// N1 then N2; each codeword is a list of `[message_id, bit_index]`.
    pub queries: Vec<Vec<Vec<[u32; 2]>>>,
}

fn query_doc(q: &Query) -> Vec<Vec<[u32; 2]>> {
    q.codewords().iter().map(|c| c.terms().iter().map(|t| [t.msg as u32, t.index]).collect()).collect()
}

fn doc_query(rows: &[Vec<[u32; 2]>]) -> Result<Query> {
    let mut cws = Vec::with_capacity(rows.len());
    for row in rows {
        let mut terms = Vec::with_capacity(row.len());
        for &[m, i] in row {
            let m = u8::try_from(m).map_err(|_| Error::Format(format!("message id {m} out of range")))?;
            terms.push(BitRef::new(m, i));
        }
        cws.push(Codeword::new(terms)?);
    }
    Query::new(cws)
}

impl CodeDocument {
    pub fn from_code(code: &Code) -> CodeDocument {
        CodeDocument {
            format_version: FORMAT_VERSION,
            k: code.params.k,
            demand: code.params.demand,
            si: code.params.si(),
            queries: vec![query_doc(&code.query_n1), query_doc(&code.query_n2)],
        }
    }

    pub fn to_code(&self) -> Result<Code> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format_version {}", self.format_version)));
        }
        if self.queries.len() != 2 {
            return Err(Error::Format(format!("expected 2 queries, found {}", self.queries.len())));
        }
        let params = SchemeParams::new(self.k, self.demand, self.si)?;
        let code = Code { params, query_n1: doc_query(&self.queries[0])?, query_n2: doc_query(&self.queries[1])? };
        validate_code(&code)?;
        Ok(code)
    }
}

/// Checks the invariants every stored code must satisfy. Never repairs.
pub fn validate_code(code: &Code) -> Result<()> {
    let p = &code.params;
    let half = p.half();
    let bad = |msg: String| Err(Error::Format(msg));
    if query_structure(&code.query_n1) != query_structure(&code.query_n2) {
        return bad("queries differ in structure".into());
    }
    let mut si_refs: [Vec<BitRef>; 2] = [Vec::new(), Vec::new()];
    for (d, q) in [&code.query_n1, &code.query_n2].into_iter().enumerate() {
        for t in q.codewords().iter().flat_map(|c| c.terms()) {
            if t.msg > p.k {
                return bad(format!("message {} exceeds K={}", t.msg, p.k));
            }
            let ok = if t.msg == p.demand {
                let lo = d as u32 * half;
                t.index > lo && t.index <= lo + half
            } else {
                t.index <= half
            };
            if !ok {
                return bad(format!("bit {}:{} outside its allowed range in N{}", t.msg, t.index, d + 1));
            }
            if p.is_si(t.msg) {
                si_refs[d].push(*t);
            }
        }
    }
    let [mut a, mut b] = si_refs;
    a.sort();
    b.sort();
    if a != b {
        return bad("side-information bits differ between the queries".into());
    }
    Ok(())
}

pub fn code_to_json(code: &Code) -> String {
    serde_json::to_string_pretty(&CodeDocument::from_code(code)).expect("document serializes")
}

pub fn code_from_json(text: &str) -> Result<Code> {
    let doc: CodeDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    doc.to_code()
}

pub fn save_code(path: &Path, code: &Code) -> Result<()> {
    fs::write(path, code_to_json(code))?;
    Ok(())
}

pub fn load_code(path: &Path) -> Result<Code> {
    code_from_json(&fs::read_to_string(path)?)
}

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

pub fn unpack_bits(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect()
}

pub fn encode_messages(store: &MessageStore) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MESSAGE_MAGIC);
    out.extend_from_slice(&(store.k() as u16).to_be_bytes());
    out.extend_from_slice(&store.message_len().to_be_bytes());
    for row in store.rows() {
        out.extend(pack_bits(row));
    }
    out
}

pub fn decode_messages(bytes: &[u8]) -> Result<MessageStore> {
    if bytes.len() < 10 || &bytes[..4] != MESSAGE_MAGIC {
        return Err(Error::Format("not a message file".into()));
    }
    let k = u16::from_be_bytes([bytes[4], bytes[5]]) as usize;
    let len = u32::from_be_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    let row_bytes = len.div_ceil(8);
    if bytes.len() != 10 + k * row_bytes {
        return Err(Error::Format(format!("message file is {} bytes, expected {}", bytes.len(), 10 + k * row_bytes)));
    }
    let rows = bytes[10..].chunks(row_bytes.max(1)).take(k).map(|r| unpack_bits(r, len)).collect();
    MessageStore::from_rows(rows)
}

pub fn save_messages(path: &Path, store: &MessageStore) -> Result<()> {
    fs::write(path, encode_messages(store))?;
    Ok(())
}

pub fn load_messages(path: &Path) -> Result<MessageStore> {
    decode_messages(&fs::read(path)?)
}

/// Side information is stored as a two-row message file, lower id first.
pub fn encode_side_info(si: &SideInfo) -> Vec<u8> {
    let store = MessageStore::from_rows(si.bits.to_vec()).expect("two equal rows");
    encode_messages(&store)
}

pub fn decode_side_info(bytes: &[u8], ids: [MessageId; 2]) -> Result<SideInfo> {
    let store = decode_messages(bytes)?;
    if store.k() != 2 {
        return Err(Error::Format(format!("side-information file holds {} rows, expected 2", store.k())));
    }
    Ok(SideInfo { ids, bits: [store.row(1).to_vec(), store.row(2).to_vec()] })
}

/// Bit count (16-bit) followed by the packed answer bits.
pub fn encode_answer(ans: &AnswerVector) -> Result<Vec<u8>> {
    let n = u16::try_from(ans.bits.len()).map_err(|_| Error::Format("answer longer than 65535 bits".into()))?;
    let mut out = n.to_be_bytes().to_vec();
    out.extend(pack_bits(&ans.bits));
    Ok(out)
}

pub fn decode_answer(bytes: &[u8]) -> Result<AnswerVector> {
    if bytes.len() < 2 {
        return Err(Error::Format("answer too short".into()));
    }
    let n = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    if bytes.len() != 2 + n.div_ceil(8) {
        return Err(Error::Format("answer length does not match its bit count".into()));
    }
    Ok(AnswerVector { bits: unpack_bits(&bytes[2..], n) })
}

pub fn audit_to_json(report: &AuditReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn audit_to_text(report: &AuditReport) -> String {
    let mut out = format!("K={} method={} passed {}/{}\n", report.k, report.method, report.passed(), report.entries.len());
    for e in &report.entries {
        let case = e.case.map_or("-".to_string(), |c| c.to_string());
        let route = e.route.map_or("-".to_string(), |r| format!("{r:?}"));
        out.push_str(&format!(
            "{} demand={} si={},{} case={} route={} structure={} decodable={}",
            if e.pass { "PASS" } else { "FAIL" },
            e.demand,
            e.si[0],
            e.si[1],
            case,
            route,
            e.structure_ok,
            e.decodable
        ));
        if let Some(err) = &e.error {
            out.push_str(&format!(" error={err}"));
        }
        out.push('\n');
    }
    out
}

fn letter_id(c: char) -> Option<MessageId> {
    ('A'..='G').contains(&c).then(|| c as u8 - b'A' + 1)
}

fn parse_term(term: &str, line: usize) -> Result<BitRef> {
    let err = |msg: String| Error::Parse { line, msg };
    let (msg, digits) = if let Some(rest) = term.strip_prefix('M') {
        let (id, idx) = rest.split_once('_').ok_or_else(|| err(format!("term {term:?} needs M<id>_<index>")))?;
        let id: MessageId = id.parse().map_err(|_| err(format!("bad message id in {term:?}")))?;
        (id, idx)
    } else {
        let mut chars = term.chars();
        let c = chars.next().ok_or_else(|| err("empty term".into()))?;
        let id = letter_id(c).ok_or_else(|| err(format!("unknown message letter {c:?}")))?;
        (id, chars.as_str())
    };
    if digits.is_empty() {
        return Err(err(format!("term {term:?} has no index")));
    }
    let index: u32 = digits.parse().map_err(|_| err(format!("bad index in {term:?}")))?;
    Ok(BitRef::new(msg, index))
}

/// Parses one codeword per line, e.g. `A2+B1` or `M8_3+A1`. Blank lines are skipped.
pub fn parse_query_text(text: &str) -> Result<Query> {
    let mut cws = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let terms = line.split('+').map(|t| parse_term(t.trim(), n + 1)).collect::<Result<Vec<_>>>()?;
        cws.push(Codeword::new(terms).map_err(|e| Error::Parse { line: n + 1, msg: e.to_string() })?);
    }
    Query::new(cws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_query_n1, canonical_code};
    use crate::types::render;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn code_round_trip() {
        let c = canonical_code(4).unwrap();
        assert_eq!(code_from_json(&code_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn duplicate_bit_rejected() {
        let c = canonical_code(4).unwrap();
        let mut doc = CodeDocument::from_code(&c);
        doc.queries[0][1] = vec![[1, 1]];
        assert!(doc.to_code().is_err());
    }

    #[test]
    fn version_rejected() {
        let mut doc = CodeDocument::from_code(&canonical_code(4).unwrap());
        doc.format_version = 2;
        assert!(doc.to_code().is_err());
    }

    #[test]
    fn k7_document_sizes() {
        let doc = CodeDocument::from_code(&canonical_code(7).unwrap());
        assert_eq!(doc.queries[0].len(), 63);
        assert_eq!(doc.queries[1].len(), 63);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_query_text("A1\nA2+B1").unwrap().len(), 2);
        assert!(parse_query_text("A+B").is_err());
        assert!(parse_query_text("Z1").is_err());
        let text = "A1\nA2+B1\nB2+C1\nB3+D1\nC2+D2\nA3+C3+D3\nA4+B4+C4+D4\n";
        assert_eq!(parse_query_text(text).unwrap(), build_query_n1(4).unwrap());
    }

    #[test]
    fn wide_ids_round_trip() {
        let q = build_query_n1(9).unwrap();
        assert_eq!(parse_query_text(&render(&q)).unwrap(), q);
    }

    #[test]
    fn message_file_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let store = MessageStore::random(4, 8, &mut rng);
        let bytes = encode_messages(&store);
        assert_eq!(bytes.len(), 10 + 4);
        assert_eq!(&bytes[..10], b"PMSG\x00\x04\x00\x00\x00\x08");
        assert_eq!(decode_messages(&bytes).unwrap(), store);
    }

    #[test]
    fn answer_layout() {
        let a = AnswerVector { bits: vec![true, false, false, false, false, false, false] };
        assert_eq!(encode_answer(&a).unwrap(), vec![0, 7, 0x80]);
        assert_eq!(decode_answer(&[0, 7, 0x80]).unwrap(), a);
    }
}

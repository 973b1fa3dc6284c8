//! Database answers, demand decoding and the GF(2) span oracle.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{Basis, BitRow};
use crate::types::{BitRef, Code, Db, MessageId, Query, SchemeParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageStore {
    k: u8,
    message_len: u32,
    rows: Vec<Vec<bool>>,
}

impl MessageStore {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<MessageStore> {
        let k = u8::try_from(rows.len()).map_err(|_| Error::InvalidParams("too many messages".into()))?;
        let message_len = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != message_len) {
            return Err(Error::InvalidParams("messages differ in length".into()));
        }
        Ok(MessageStore { k, message_len: message_len as u32, rows })
    }

    pub fn zeros(k: u8, message_len: u32) -> MessageStore {
        MessageStore { k, message_len, rows: vec![vec![false; message_len as usize]; k as usize] }
    }

    pub fn random<R: Rng>(k: u8, message_len: u32, rng: &mut R) -> MessageStore {
        let rows = (0..k).map(|_| (0..message_len).map(|_| rng.random()).collect()).collect();
        MessageStore { k, message_len, rows }
    }

    /// A store sized for `params` (L bits per message).
    pub fn random_for<R: Rng>(params: &SchemeParams, rng: &mut R) -> MessageStore {
        MessageStore::random(params.k, params.message_len(), rng)
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn message_len(&self) -> u32 {
        self.message_len
    }

    pub fn row(&self, msg: MessageId) -> &[bool] {
        &self.rows[msg as usize - 1]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn set(&mut self, b: BitRef, v: bool) {
        self.rows[b.msg as usize - 1][b.index as usize - 1] = v;
    }

    pub fn get(&self, b: BitRef) -> Result<bool> {
        if b.msg == 0 || b.msg > self.k || b.index == 0 || b.index > self.message_len {
            return Err(Error::OutOfBounds { msg: b.msg, index: b.index });
        }
        Ok(self.rows[b.msg as usize - 1][b.index as usize - 1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AnswerVector {
    pub bits: Vec<bool>,
}

pub fn answer_query(store: &MessageStore, query: &Query) -> Result<AnswerVector> {
    let mut bits = Vec::with_capacity(query.len());
    for cw in query.codewords() {
        let mut v = false;
        for t in cw.terms() {
            v ^= store.get(*t)?;
        }
        bits.push(v);
    }
    Ok(AnswerVector { bits })
}

/// The two side-information messages, in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideInfo {
    pub ids: [MessageId; 2],
    pub bits: [Vec<bool>; 2],
}

impl SideInfo {
    pub fn from_store(store: &MessageStore, params: &SchemeParams) -> SideInfo {
        let ids = params.si();
        SideInfo { ids, bits: [store.row(ids[0]).to_vec(), store.row(ids[1]).to_vec()] }
    }

    pub fn get(&self, b: BitRef) -> Result<bool> {
        let slot = self.ids.iter().position(|&m| m == b.msg).ok_or(Error::OutOfBounds { msg: b.msg, index: b.index })?;
        self.bits[slot].get(b.index as usize - 1).copied().ok_or(Error::OutOfBounds { msg: b.msg, index: b.index })
    }
}

/// A downloaded bit used to cancel byproducts, with the side-information bits inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Helper {
    pub db: Db,
    pub position: usize,
    pub si: Vec<BitRef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandBitPlan {
    pub demand_index: u32,
    pub db: Db,
    pub position: usize,
    pub si: Vec<BitRef>,
    pub helpers: Vec<Helper>,
}

impl DemandBitPlan {
    pub fn xor_count(&self) -> usize {
        self.si.len() + self.helpers.iter().map(|h| 1 + h.si.len()).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeTrace {
    pub bits: Vec<DemandBitPlan>,
    pub xor_count: usize,
}

impl DecodeTrace {
    pub fn from_db(&self, db: Db) -> usize {
        self.bits.iter().filter(|b| b.db == db).count()
    }
}

fn both(code: &Code) -> [(Db, &Query); 2] {
    [(Db::N1, &code.query_n1), (Db::N2, &code.query_n2)]
}

fn other(db: Db) -> Db {
    match db {
        Db::N1 => Db::N2,
        Db::N2 => Db::N1,
    }
}

/// Linear system over every bit referenced by the code, with side information as unit rows.
struct System {
    basis: Basis,
    col: HashMap<BitRef, usize>,
    tags: Vec<Tag>,
}

#[derive(Clone, Copy)]
enum Tag {
    Row(Db, usize),
    Si(BitRef),
}

impl System {
    fn build(code: &Code, tagged: bool) -> System {
        let p = &code.params;
        let mut col = HashMap::new();
        for (_, q) in both(code) {
            for cw in q.codewords() {
                for t in cw.terms() {
                    let n = col.len();
                    col.entry(*t).or_insert(n);
                }
            }
        }
        let mut si_bits = Vec::new();
        for m in p.si() {
            for j in 1..=p.half() {
                let b = BitRef::new(m, j);
                let n = col.len();
                col.entry(b).or_insert(n);
                si_bits.push(b);
            }
        }
        for j in 1..=p.message_len() {
            let n = col.len();
            col.entry(BitRef::new(p.demand, j)).or_insert(n);
        }
        let mut tags = Vec::new();
        for (db, q) in both(code) {
            for pos in 0..q.len() {
                tags.push(Tag::Row(db, pos));
            }
        }
        tags.extend(si_bits.iter().map(|&b| Tag::Si(b)));
        let mut basis = Basis::new(col.len(), if tagged { tags.len() } else { 0 });
        let mut t = 0;
        for (_, q) in both(code) {
            for cw in q.codewords() {
                let mut r = BitRow::zeros(col.len());
                for term in cw.terms() {
                    r.set(col[term]);
                }
                basis.insert(r, tagged.then_some(t));
                t += 1;
            }
        }
        for b in si_bits {
            let mut r = BitRow::zeros(col.len());
            r.set(col[&b]);
            basis.insert(r, tagged.then_some(t));
            t += 1;
        }
        System { basis, col, tags }
    }

    fn unit(&self, b: BitRef) -> BitRow {
        let mut r = BitRow::zeros(self.col.len());
        r.set(self.col[&b]);
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub decodable: bool,
    pub rank: usize,
    pub rows: usize,
    pub columns: usize,
    /// Demand indexes whose unit vector is outside the span.
    pub missing: Vec<u32>,
}

pub fn decodability_oracle(code: &Code) -> OracleReport {
    let p = &code.params;
    let sys = System::build(code, false);
    let missing: Vec<u32> = (1..=p.message_len()).filter(|&j| !sys.basis.contains(&sys.unit(BitRef::new(p.demand, j)))).collect();
    OracleReport { decodable: missing.is_empty(), rank: sys.basis.rank(), rows: sys.tags.len(), columns: sys.col.len(), missing }
}

/// Precomputes how every demand bit is isolated. Each demand-bearing codeword
/// is cancelled with its side-information bits and with codewords of the other
/// database that carry its byproduct bits; general elimination is the fallback.
pub fn decode_plan(code: &Code) -> Result<DecodeTrace> {
    let p = &code.params;
    let mut where_is: HashMap<(Db, BitRef), usize> = HashMap::new();
    for (db, q) in both(code) {
        for (pos, cw) in q.codewords().iter().enumerate() {
            for t in cw.terms() {
                where_is.insert((db, *t), pos);
            }
        }
    }
    let mut system: Option<System> = None;
    let mut bits = Vec::with_capacity(p.message_len() as usize);
    for j in 1..=p.message_len() {
        let target = BitRef::new(p.demand, j);
        let (db, pos) = [Db::N1, Db::N2]
            .into_iter()
            .find_map(|db| where_is.get(&(db, target)).map(|&pos| (db, pos)))
            .ok_or(Error::Undecodable(j))?;
        let cw = &code.query(db).codewords()[pos];
        if cw.terms().iter().any(|t| t.msg > p.k) {
            return Err(Error::Undecodable(j));
        }
        let si: Vec<BitRef> = cw.terms().iter().copied().filter(|t| p.is_si(t.msg)).collect();
        let si_known = si.iter().all(|t| t.index <= p.half());
        let plan = cover_plan(code, db, pos, &where_is).filter(|_| si_known).map(|helpers| DemandBitPlan {
            demand_index: j,
            db,
            position: pos,
            si: si.clone(),
            helpers,
        });
        let plan = match plan {
            Some(pl) => pl,
            None => {
                let sys = system.get_or_insert_with(|| System::build(code, true));
                elimination_plan(sys, j, target, db, pos)?
            }
        };
        bits.push(plan);
    }
    let xor_count = bits.iter().map(DemandBitPlan::xor_count).sum();
    Ok(DecodeTrace { bits, xor_count })
}

fn cover_plan(code: &Code, db: Db, pos: usize, where_is: &HashMap<(Db, BitRef), usize>) -> Option<Vec<Helper>> {
    let p = &code.params;
    let cw = &code.query(db).codewords()[pos];
    let mut remaining: Vec<BitRef> = cw.terms().iter().copied().filter(|t| p.is_byproduct(t.msg)).collect();
    let od = other(db);
    let mut helpers = Vec::new();
    while let Some(&b) = remaining.first() {
        let hpos = *where_is.get(&(od, b))?;
        let h = &code.query(od).codewords()[hpos];
        if h.contains(p.demand) {
            return None;
        }
        let mut hsi = Vec::new();
        for t in h.terms() {
            if p.is_si(t.msg) {
                if t.index > p.half() {
                    return None;
                }
                hsi.push(*t);
            } else {
                let i = remaining.iter().position(|r| r == t)?;
                remaining.swap_remove(i);
            }
        }
        helpers.push(Helper { db: od, position: hpos, si: hsi });
    }
    Some(helpers)
}

fn elimination_plan(sys: &System, j: u32, target: BitRef, db: Db, pos: usize) -> Result<DemandBitPlan> {
    let tag = sys.basis.express(&sys.unit(target)).ok_or(Error::Undecodable(j))?;
    let mut plan = DemandBitPlan { demand_index: j, db, position: pos, si: Vec::new(), helpers: Vec::new() };
    let mut source_seen = false;
    for t in tag.ones() {
        match sys.tags[t] {
            Tag::Row(d, p) if d == db && p == pos => source_seen = true,
            Tag::Row(d, p) => plan.helpers.push(Helper { db: d, position: p, si: Vec::new() }),
            Tag::Si(b) => plan.si.push(b),
        }
    }
    if !source_seen {
        return Err(Error::Undecodable(j));
    }
    Ok(plan)
}

fn answer_bit(ans: [&AnswerVector; 2], db: Db, pos: usize) -> Result<bool> {
    let a = match db {
        Db::N1 => ans[0],
        Db::N2 => ans[1],
    };
    a.bits.get(pos).copied().ok_or_else(|| Error::Protocol(format!("answer shorter than query at {pos}")))
}

/// Runs a precomputed plan against downloaded answers.
pub fn execute_plan(trace: &DecodeTrace, ans1: &AnswerVector, ans2: &AnswerVector, si: &SideInfo) -> Result<Vec<bool>> {
    let ans = [ans1, ans2];
    let mut out = vec![false; trace.bits.len()];
    for b in &trace.bits {
        let mut v = answer_bit(ans, b.db, b.position)?;
        for s in &b.si {
            v ^= si.get(*s)?;
        }
        for h in &b.helpers {
            v ^= answer_bit(ans, h.db, h.position)?;
            for s in &h.si {
                v ^= si.get(*s)?;
            }
        }
        out[b.demand_index as usize - 1] = v;
    }
    Ok(out)
}

pub fn decode_demand(code: &Code, ans1: &AnswerVector, ans2: &AnswerVector, si: &SideInfo) -> Result<(Vec<bool>, DecodeTrace)> {
    if ans1.bits.len() != code.query_n1.len() || ans2.bits.len() != code.query_n2.len() {
        return Err(Error::Protocol("answer length does not match query".into()));
    }
    if si.ids != code.params.si() {
        return Err(Error::InvalidParams("side information ids do not match the code".into()));
    }
    let trace = decode_plan(code)?;
    let demand = execute_plan(&trace, ans1, ans2, si)?;
    Ok((demand, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::canonical_code;
    use crate::types::Codeword;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_store_answers_zero() {
        let c = canonical_code(5).unwrap();
        let s = MessageStore::zeros(5, 16);
        assert!(answer_query(&s, &c.query_n1).unwrap().bits.iter().all(|b| !b));
    }

    #[test]
    fn unit_store_answer() {
        let c = canonical_code(4).unwrap();
        let mut s = MessageStore::zeros(4, 8);
        s.set(BitRef::new(1, 1), true);
        let a = answer_query(&s, &c.query_n1).unwrap();
        assert_eq!(a.bits, vec![true, false, false, false, false, false, false]);
    }

    #[test]
    fn answer_matches_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = canonical_code(6).unwrap();
        let s = MessageStore::random(6, 32, &mut rng);
        let a = answer_query(&s, &c.query_n2).unwrap();
        for (i, cw) in c.query_n2.codewords().iter().enumerate() {
            let mut v = 0u8;
            for t in cw.terms() {
                v ^= s.rows()[t.msg as usize - 1][t.index as usize - 1] as u8;
            }
            assert_eq!(a.bits[i], v == 1);
        }
    }

    #[test]
    fn out_of_bounds_answer() {
        let s = MessageStore::zeros(4, 8);
        let q = Query::new(vec![Codeword::new(vec![BitRef::new(1, 9)]).unwrap()]).unwrap();
        assert_eq!(answer_query(&s, &q), Err(Error::OutOfBounds { msg: 1, index: 9 }));
    }

    #[test]
    fn oracle_small_codes() {
        assert!(decodability_oracle(&canonical_code(3).unwrap()).decodable);
        assert!(decodability_oracle(&canonical_code(4).unwrap()).decodable);
    }

    #[test]
    fn oracle_detects_deleted_swapped_row() {
        let mut c = canonical_code(4).unwrap();
        let mut cws = c.query_n2.codewords().to_vec();
        cws.remove(3);
        c.query_n2 = Query::new(cws).unwrap();
        assert!(!decodability_oracle(&c).decodable);
        assert!(decode_plan(&c).is_err());
    }

    #[test]
    fn decode_round_trip_k7() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = canonical_code(7).unwrap();
        let s = MessageStore::random_for(&c.params, &mut rng);
        let a1 = answer_query(&s, &c.query_n1).unwrap();
        let a2 = answer_query(&s, &c.query_n2).unwrap();
        assert_eq!(a1.bits.len() + a2.bits.len(), 126);
        let (d, trace) = decode_demand(&c, &a1, &a2, &SideInfo::from_store(&s, &c.params)).unwrap();
        assert_eq!(d.len(), 64);
        assert_eq!(d, s.row(1));
        assert_eq!(trace.from_db(Db::N1), 32);
        assert_eq!(trace.from_db(Db::N2), 32);
    }

    #[test]
    fn k4_xor_count_fixture() {
        let c = canonical_code(4).unwrap();
        assert_eq!(decode_plan(&c).unwrap().xor_count, 16);
    }
}

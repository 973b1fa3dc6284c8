//! Domain types shared by every module.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest message count accepted by the constructions.
pub const MAX_K: u8 = 20;

pub type MessageId = u8;

/// A set of message ids, stored as a bitmask indexed by id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MsgSet(pub u32);

impl MsgSet {
    pub const EMPTY: MsgSet = MsgSet(0);

    pub fn from_ids<I: IntoIterator<Item = MessageId>>(ids: I) -> MsgSet {
        let mut s = 0u32;
        for id in ids {
            s |= 1 << id;
        }
        MsgSet(s)
    }

    pub fn single(id: MessageId) -> MsgSet {
        MsgSet(1 << id)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, id: MessageId) -> bool {
        self.0 >> id & 1 == 1
    }

    pub fn union(self, o: MsgSet) -> MsgSet {
        MsgSet(self.0 | o.0)
    }

    pub fn minus(self, o: MsgSet) -> MsgSet {
        MsgSet(self.0 & !o.0)
    }

    pub fn intersect(self, o: MsgSet) -> MsgSet {
        MsgSet(self.0 & o.0)
    }

    pub fn is_subset(self, o: MsgSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn with(self, id: MessageId) -> MsgSet {
        MsgSet(self.0 | 1 << id)
    }

    pub fn without(self, id: MessageId) -> MsgSet {
        MsgSet(self.0 & !(1 << id))
    }

    pub fn min(self) -> Option<MessageId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as MessageId)
    }

    pub fn ids(self) -> impl Iterator<Item = MessageId> {
        let mut s = self.0;
        std::iter::from_fn(move || {
            if s == 0 {
                return None;
            }
            let id = s.trailing_zeros();
            s &= s - 1;
            Some(id as MessageId)
        })
    }

    /// Applies a relabeling `perm[id]`; ids beyond the table are kept.
    pub fn map(self, perm: &[MessageId]) -> MsgSet {
        MsgSet::from_ids(self.ids().map(|m| perm.get(m as usize).copied().unwrap_or(m)))
    }

    /// Size first, then the ascending id sequence.
    pub fn canonical_cmp(self, o: MsgSet) -> Ordering {
        self.len().cmp(&o.len()).then_with(|| self.ids().cmp(o.ids()))
    }
}

impl fmt::Debug for MsgSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "φ");
        }
        let parts: Vec<String> = self.ids().map(message_name).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// One bit of one message; indexes are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRef {
    pub msg: MessageId,
    pub index: u32,
}

impl BitRef {
    pub fn new(msg: MessageId, index: u32) -> BitRef {
        BitRef { msg, index }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    terms: Vec<BitRef>,
}

impl Codeword {
    pub fn new(mut terms: Vec<BitRef>) -> Result<Codeword> {
        if terms.is_empty() {
            return Err(Error::MalformedQuery("empty codeword".into()));
        }
        terms.sort();
        for w in terms.windows(2) {
            if w[0].msg == w[1].msg {
                return Err(Error::MalformedQuery(format!("message {} appears twice in one codeword", message_name(w[0].msg))));
            }
        }
        if terms.iter().any(|t| t.msg == 0 || t.msg > 31 || t.index == 0) {
            return Err(Error::MalformedQuery("message id or index out of range".into()));
        }
        Ok(Codeword { terms })
    }

    pub fn terms(&self) -> &[BitRef] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ids(&self) -> MsgSet {
        MsgSet::from_ids(self.terms.iter().map(|t| t.msg))
    }

    pub fn index_of(&self, msg: MessageId) -> Option<u32> {
        self.terms.iter().find(|t| t.msg == msg).map(|t| t.index)
    }

    pub fn contains(&self, msg: MessageId) -> bool {
        self.index_of(msg).is_some()
    }

    pub fn canonical_cmp(&self, o: &Codeword) -> Ordering {
        self.len()
            .cmp(&o.len())
            .then_with(|| self.terms.iter().map(|t| t.msg).cmp(o.terms.iter().map(|t| t.msg)))
            .then_with(|| self.terms.iter().map(|t| t.index).cmp(o.terms.iter().map(|t| t.index)))
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.msg <= 7 {
                write!(f, "{}{}", message_name(t.msg), t.index)?;
            } else {
                write!(f, "M{}_{}", t.msg, t.index)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Query {
    codewords: Vec<Codeword>,
}

impl Query {
    pub fn new(codewords: Vec<Codeword>) -> Result<Query> {
        let mut seen = std::collections::HashSet::new();
        for cw in &codewords {
            for t in cw.terms() {
                if !seen.insert(*t) {
                    return Err(Error::MalformedQuery(format!("bit {}{} used twice", message_name(t.msg), t.index)));
                }
            }
        }
        Ok(Query { codewords })
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn layout(&self) -> Vec<MsgSet> {
        self.codewords.iter().map(Codeword::ids).collect()
    }

    pub fn max_msg(&self) -> MessageId {
        self.codewords.iter().flat_map(|c| c.terms().iter().map(|t| t.msg)).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    pub k: u8,
    pub demand: MessageId,
    si: [MessageId; 2],
}

impl SchemeParams {
    pub fn new(k: u8, demand: MessageId, si: [MessageId; 2]) -> Result<SchemeParams> {
        if k < 3 {
            return Err(Error::InvalidParams(format!("K must be at least 3, got {k}")));
        }
        if k > MAX_K {
            return Err(Error::UnsupportedK(k));
        }
        let ids = [demand, si[0], si[1]];
        if ids.iter().any(|&m| m == 0 || m > k) {
            return Err(Error::InvalidParams(format!("message ids must lie in 1..={k}")));
        }
        if demand == si[0] || demand == si[1] || si[0] == si[1] {
            return Err(Error::InvalidParams("demand and side information must be distinct".into()));
        }
        let mut si = si;
        si.sort_unstable();
        Ok(SchemeParams { k, demand, si })
    }

    /// Demand X1 with side information {X2, X3}.
    pub fn canonical(k: u8) -> Result<SchemeParams> {
        SchemeParams::new(k, 1, [2, 3])
    }

    pub fn si(&self) -> [MessageId; 2] {
        self.si
    }

    pub fn si_set(&self) -> MsgSet {
        MsgSet::from_ids(self.si)
    }

    pub fn is_si(&self, m: MessageId) -> bool {
        self.si.contains(&m)
    }

    pub fn is_byproduct(&self, m: MessageId) -> bool {
        m != self.demand && !self.is_si(m)
    }

    /// Demand bits recovered from each database.
    pub fn half(&self) -> u32 {
        demand_bits_per_db(self.k)
    }

    pub fn message_len(&self) -> u32 {
        2 * self.half()
    }

    pub fn codewords_per_query(&self) -> usize {
        codewords_per_query(self.k)
    }
}

pub fn demand_bits_per_db(k: u8) -> u32 {
    if k <= 3 {
        1
    } else {
        1 << (k - 2)
    }
}

pub fn codewords_per_query(k: u8) -> usize {
    if k <= 3 {
        1
    } else {
        (1usize << (k - 1)) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code {
    pub params: SchemeParams,
    pub query_n1: Query,
    pub query_n2: Query,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Db {
    N1,
    N2,
}

impl Code {
    pub fn query(&self, db: Db) -> &Query {
        match db {
            Db::N1 => &self.query_n1,
            Db::N2 => &self.query_n2,
        }
    }
}

pub fn message_name(m: MessageId) -> String {
    if (1..=7).contains(&m) {
        ((b'A' + m - 1) as char).to_string()
    } else {
        format!("M{m}")
    }
}

pub fn canonical_order(query: &Query) -> Query {
    let mut cws = query.codewords.clone();
    cws.sort_by(Codeword::canonical_cmp);
    Query { codewords: cws }
}

pub fn render(query: &Query) -> String {
    let mut out = String::new();
    for cw in query.codewords() {
        out.push_str(&cw.to_string());
        out.push('\n');
    }
    out
}

//! Query construction for the canonical assignment (demand X1, side information {X2, X3}).

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::types::{canonical_order, BitRef, Code, Codeword, MessageId, MsgSet, Query, SchemeParams, MAX_K};

/// One element of a skeleton: a formal XOR of the listed messages (empty is φ).
pub type SkeletonElement = MsgSet;

/// All subsets of `ids`, φ first, ordered by size and then lexicographically.
pub fn power_set_skeleton(ids: &[MessageId]) -> Vec<SkeletonElement> {
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut out: Vec<MsgSet> = (0u64..1 << ids.len())
        .map(|mask| MsgSet::from_ids(ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &m)| m)))
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(*b));
    out
}

fn support(s: &[SkeletonElement]) -> MsgSet {
    s.iter().fold(MsgSet::EMPTY, |acc, e| acc.union(*e))
}

pub fn tensor_sum(m1: &[SkeletonElement], m2: &[SkeletonElement]) -> Result<Vec<SkeletonElement>> {
    let overlap = support(m1).intersect(support(m2));
    if let Some(m) = overlap.min() {
        return Err(Error::SkeletonOverlap(m));
    }
    Ok(tensor(m1, m2))
}

fn tensor(m1: &[MsgSet], m2: &[MsgSet]) -> Vec<MsgSet> {
    m1.iter().flat_map(|a| m2.iter().map(move |b| a.union(*b))).collect()
}

fn blocks(col: &[MsgSet], n: usize) -> Vec<MsgSet> {
    col.iter().copied().filter(|s| s.len() == n).collect()
}

/// Message-id sets of the N1 query, before ordering and indexing.
pub fn n1_layout(k: u8) -> Result<Vec<MsgSet>> {
    if k < 3 {
        return Err(Error::InvalidParams(format!("K must be at least 3, got {k}")));
    }
    if k > MAX_K {
        return Err(Error::UnsupportedK(k));
    }
    if k == 3 {
        return Ok(vec![MsgSet::from_ids([1, 2, 3])]);
    }
    let mid: Vec<MessageId> = (3..k).collect();
    let s: Vec<MsgSet> = power_set_skeleton(&mid).into_iter().filter(|e| !e.is_empty()).collect();
    let col1: Vec<MsgSet> = s.iter().map(|e| e.with(k)).collect();
    let col2 = s;

    let phi_ab = [MsgSet::EMPTY, MsgSet::from_ids([1, 2])];
    let a_b = [MsgSet::single(1), MsgSet::single(2)];
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for n in [2, 3] {
        c1.extend(tensor(&blocks(&col1, n), &phi_ab));
    }
    for n in [1, 2] {
        c2.extend(tensor(&blocks(&col2, n), &a_b));
    }
    let k = k as usize;
    if k == 6 || k == 7 {
        for n in 4..=k - 2 {
            c1.extend(tensor(&blocks(&col1, n), &a_b));
        }
        for n in 3..=k - 3 {
            c2.extend(tensor(&blocks(&col2, n), &phi_ab));
        }
    } else if k > 7 {
        for n in 4..=k - 3 {
            c1.extend(tensor(&blocks(&col1, n), &a_b));
        }
        for n in 3..=k - 4 {
            c2.extend(tensor(&blocks(&col2, n), &phi_ab));
        }
        c1.extend(tensor(&blocks(&col1, k - 2), &phi_ab));
        c2.extend(tensor(&blocks(&col2, k - 3), &a_b));
    }
    let k = k as u8;
    let mut q = c1;
    q.extend(c2);
    q.extend([MsgSet::single(1), MsgSet::from_ids([2, k]), MsgSet::from_ids([1, 2])]);
    let ac = MsgSet::from_ids([1, 3]);
    let pos = q.iter().position(|s| *s == ac).ok_or_else(|| Error::InvalidParams("X1+X3 missing from skeleton".into()))?;
    q[pos] = ac.with(k);
    Ok(q)
}

/// Gives each message its next unused index while walking the layout in order.
pub fn index_layout(layout: &[MsgSet]) -> Result<Query> {
    let mut next: HashMap<MessageId, u32> = HashMap::new();
    let mut cws = Vec::with_capacity(layout.len());
    for s in layout {
        let terms = s
            .ids()
            .map(|m| {
                let n = next.entry(m).or_insert(0);
                *n += 1;
                BitRef::new(m, *n)
            })
            .collect();
        cws.push(Codeword::new(terms)?);
    }
    Query::new(cws)
}

pub fn build_query_n1(k: u8) -> Result<Query> {
    let mut layout = n1_layout(k)?;
    layout.sort_by(|a, b| a.canonical_cmp(*b));
    let q = index_layout(&layout)?;
    Ok(canonical_order(&q))
}

/// Byproduct part of codeword `pos`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub position: usize,
    pub terms: Vec<BitRef>,
}

impl Combination {
    pub fn ids(&self) -> MsgSet {
        MsgSet::from_ids(self.terms.iter().map(|t| t.msg))
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match Codeword::new(self.terms.clone()) {
            Ok(c) => write!(f, "{c}"),
            Err(_) => f.write_str("φ"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ByproductPair {
    pub unknown: Combination,
    pub known: Combination,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ByproductLedger {
    pub pairs: Vec<ByproductPair>,
}

/// Splits the byproduct combinations of a query into (unknown, known) lists,
/// each sorted by length, ids and indexes.
pub fn split_byproducts(query: &Query, params: &SchemeParams) -> (Vec<Combination>, Vec<Combination>) {
    let mut unknown = Vec::new();
    let mut known = Vec::new();
    for (position, cw) in query.codewords().iter().enumerate() {
        let terms: Vec<BitRef> = cw.terms().iter().copied().filter(|t| params.is_byproduct(t.msg)).collect();
        if terms.is_empty() {
            continue;
        }
        let c = Combination { position, terms };
        if cw.contains(params.demand) {
            unknown.push(c);
        } else {
            known.push(c);
        }
    }
    let key = |c: &Combination| {
        (c.terms.len(), c.terms.iter().map(|t| t.msg).collect::<Vec<_>>(), c.terms.iter().map(|t| t.index).collect::<Vec<_>>())
    };
    unknown.sort_by_key(key);
    known.sort_by_key(key);
    (unknown, known)
}

pub fn classify_byproducts(query: &Query, params: &SchemeParams) -> Result<ByproductLedger> {
    let (unknown, known) = split_byproducts(query, params);
    let mut known_by_set: HashMap<MsgSet, std::collections::VecDeque<Combination>> = HashMap::new();
    for c in known {
        known_by_set.entry(c.ids()).or_default().push_back(c);
    }
    let mut pairs = Vec::with_capacity(unknown.len());
    for u in unknown {
        let k = known_by_set
            .get_mut(&u.ids())
            .and_then(|q| q.pop_front())
            .ok_or_else(|| Error::UnpairedCombination(format!("{:?} (unknown)", u.ids())))?;
        pairs.push(ByproductPair { unknown: u, known: k });
    }
    if let Some((s, _)) = known_by_set.iter().find(|(_, q)| !q.is_empty()) {
        return Err(Error::UnpairedCombination(format!("{s:?} (known)")));
    }
    Ok(ByproductLedger { pairs })
}

pub fn build_query_n2(query_n1: &Query, params: &SchemeParams) -> Result<Query> {
    let ledger = classify_byproducts(query_n1, params)?;
    let half = params.half();
    let mut rows: Vec<Vec<BitRef>> = query_n1.codewords().iter().map(|c| c.terms().to_vec()).collect();
    for row in rows.iter_mut() {
        for t in row.iter_mut() {
            if t.msg == params.demand {
                t.index += half;
            }
        }
    }
    for p in &ledger.pairs {
        if p.unknown.ids() != p.known.ids() {
            return Err(Error::UnpairedCombination(format!("{:?}", p.unknown.ids())));
        }
        for (u, k) in p.unknown.terms.iter().zip(&p.known.terms) {
            set_index(&mut rows[p.unknown.position], u.msg, k.index);
            set_index(&mut rows[p.known.position], k.msg, u.index);
        }
    }
    let cws = rows.into_iter().map(Codeword::new).collect::<Result<Vec<_>>>()?;
    Query::new(cws)
}

fn set_index(row: &mut [BitRef], msg: MessageId, index: u32) {
    if let Some(t) = row.iter_mut().find(|t| t.msg == msg) {
        t.index = index;
    }
}

/// N1 and N2 for demand X1 with side information {X2, X3}.
pub fn canonical_code(k: u8) -> Result<Code> {
    let params = SchemeParams::canonical(k)?;
    let query_n1 = build_query_n1(k)?;
    let query_n2 = build_query_n2(&query_n1, &params)?;
    Ok(Code { params, query_n1, query_n2 })
}

//! Index assignment for a synthesized N2 layout against a fixed N1.
//!
//! Every unknown byproduct combination of one database is split into known
//! combinations of the other database, each used once. Exact matches are
//! taken first, in query order, which reproduces the ledger pairing.

use std::collections::{BTreeMap, HashMap};

use crate::types::{BitRef, Codeword, MessageId, MsgSet, Query, SchemeParams};

const NODE_BUDGET: usize = 200_000;

/// Chooses, for every target, disjoint pieces whose union is the target.
fn exact_cover(targets: &[MsgSet], pieces: &[MsgSet]) -> Option<Vec<Vec<usize>>> {
    let mut used = vec![false; pieces.len()];
    let mut res: Vec<Vec<usize>> = vec![Vec::new(); targets.len()];
    let mut by_set: HashMap<MsgSet, Vec<usize>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        by_set.entry(*p).or_default().push(i);
    }
    let mut rest = Vec::new();
    for (t, target) in targets.iter().enumerate() {
        let hit = by_set.get(target).and_then(|v| v.iter().copied().find(|&i| !used[i]));
        match hit {
            Some(i) => {
                used[i] = true;
                res[t] = vec![i];
            }
            None => rest.push(t),
        }
    }
    rest.sort_by_key(|&t| std::cmp::Reverse(targets[t].len()));
    let mut search = Cover { targets, pieces, used, res, rest, nodes: 0 };
    search.solve(0).then_some(search.res)
}

struct Cover<'a> {
    targets: &'a [MsgSet],
    pieces: &'a [MsgSet],
    used: Vec<bool>,
    res: Vec<Vec<usize>>,
    rest: Vec<usize>,
    nodes: usize,
}

impl Cover<'_> {
    fn solve(&mut self, k: usize) -> bool {
        if k == self.rest.len() {
            return true;
        }
        let t = self.rest[k];
        self.partition(k, t, self.targets[t], &mut Vec::new())
    }

    fn partition(&mut self, k: usize, t: usize, left: MsgSet, chosen: &mut Vec<usize>) -> bool {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return false;
        }
        let Some(m) = left.min() else {
            self.res[t] = chosen.clone();
            return self.solve(k + 1);
        };
        let mut tried: Vec<MsgSet> = Vec::new();
        for i in 0..self.pieces.len() {
            let p = self.pieces[i];
            if self.used[i] || !p.contains(m) || !p.is_subset(left) || tried.contains(&p) {
                continue;
            }
            tried.push(p);
            self.used[i] = true;
            chosen.push(i);
            if self.partition(k, t, left.minus(p), chosen) {
                return true;
            }
            self.used[i] = false;
            chosen.pop();
        }
        false
    }
}

fn byproducts(s: MsgSet, params: &SchemeParams) -> MsgSet {
    s.without(params.demand).minus(params.si_set())
}

/// Indexes `layout` so that, with `n1` fixed, every byproduct bit next to the
/// demand can be cancelled by known bits of the other database. Returns None
/// when no such cover exists or the layout has the wrong message counts.
pub fn assign_indexes(n1: &Query, layout: &[MsgSet], params: &SchemeParams) -> Option<Query> {
    let g = params.demand;
    let half = params.half();
    let mut u1: Vec<Vec<BitRef>> = Vec::new();
    let mut k1: Vec<Vec<BitRef>> = Vec::new();
    for cw in n1.codewords() {
        let w: Vec<BitRef> = cw.terms().iter().copied().filter(|t| params.is_byproduct(t.msg)).collect();
        if w.is_empty() {
            continue;
        }
        if cw.contains(g) {
            u1.push(w);
        } else {
            k1.push(w);
        }
    }
    let set_of = |w: &[BitRef]| MsgSet::from_ids(w.iter().map(|t| t.msg));
    let mut u2 = Vec::new();
    let mut k2 = Vec::new();
    for (p, s) in layout.iter().enumerate() {
        if byproducts(*s, params).is_empty() {
            continue;
        }
        if s.contains(g) {
            u2.push(p);
        } else {
            k2.push(p);
        }
    }
    let u1_sets: Vec<MsgSet> = u1.iter().map(|w| set_of(w)).collect();
    let k1_sets: Vec<MsgSet> = k1.iter().map(|w| set_of(w)).collect();
    let k2_sets: Vec<MsgSet> = k2.iter().map(|&p| byproducts(layout[p], params)).collect();
    let u2_sets: Vec<MsgSet> = u2.iter().map(|&p| byproducts(layout[p], params)).collect();
    let c1 = exact_cover(&u1_sets, &k2_sets)?;
    let c2 = exact_cover(&u2_sets, &k1_sets)?;

    let mut rows: Vec<BTreeMap<MessageId, u32>> = vec![BTreeMap::new(); layout.len()];
    let mut k2_used = vec![false; k2.len()];
    for (u, cover) in u1.iter().zip(&c1) {
        for &i in cover {
            k2_used[i] = true;
            for m in k2_sets[i].ids() {
                let idx = u.iter().find(|t| t.msg == m)?.index;
                rows[k2[i]].insert(m, idx);
            }
        }
    }
    let mut k1_used = vec![false; k1.len()];
    for (&p, cover) in u2.iter().zip(&c2) {
        for &i in cover {
            k1_used[i] = true;
            for t in &k1[i] {
                rows[p].insert(t.msg, t.index);
            }
        }
    }
    let mut left: HashMap<MessageId, std::collections::VecDeque<u32>> = HashMap::new();
    for (i, w) in k1.iter().enumerate() {
        if !k1_used[i] {
            for t in w {
                left.entry(t.msg).or_default().push_back(t.index);
            }
        }
    }
    for v in left.values_mut() {
        v.make_contiguous().sort_unstable();
    }
    for (i, &p) in k2.iter().enumerate() {
        if k2_used[i] {
            continue;
        }
        for m in k2_sets[i].ids() {
            let idx = left.get_mut(&m)?.pop_front()?;
            rows[p].insert(m, idx);
        }
    }
    if left.values().any(|v| !v.is_empty()) {
        return None;
    }
    for m in params.si() {
        let mut it = n1.codewords().iter().filter_map(|c| c.index_of(m));
        for (p, s) in layout.iter().enumerate() {
            if s.contains(m) {
                rows[p].insert(m, it.next()?);
            }
        }
        if it.next().is_some() {
            return None;
        }
    }
    let mut next = half;
    for (p, s) in layout.iter().enumerate() {
        if s.contains(g) {
            next += 1;
            rows[p].insert(g, next);
        }
    }
    if next != 2 * half {
        return None;
    }
    let cws = rows
        .into_iter()
        .zip(layout)
        .map(|(r, s)| {
            if MsgSet::from_ids(r.keys().copied()) != *s {
                return None;
            }
            Codeword::new(r.into_iter().map(|(m, i)| BitRef::new(m, i)).collect()).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Query::new(cws).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_query_n2, canonical_code};

    #[test]
    fn reproduces_canonical_n2() {
        for k in 3..=9 {
            let c = canonical_code(k).unwrap();
            let got = assign_indexes(&c.query_n1, &c.query_n1.layout(), &c.params).unwrap();
            assert_eq!(got, build_query_n2(&c.query_n1, &c.params).unwrap(), "K={k}");
        }
    }

    #[test]
    fn cover_splits_targets() {
        let s = |ids: &[u8]| MsgSet::from_ids(ids.iter().copied());
        let c = exact_cover(&[s(&[3, 7]), s(&[4])], &[s(&[4]), s(&[7]), s(&[3])]).unwrap();
        assert_eq!(c, vec![vec![2, 1], vec![0]]);
        assert!(exact_cover(&[s(&[3])], &[s(&[3, 4])]).is_none());
    }

    #[test]
    fn wrong_frequency_rejected() {
        let c = canonical_code(4).unwrap();
        let mut lay = c.query_n1.layout();
        lay[0] = MsgSet::single(2);
        assert!(assign_indexes(&c.query_n1, &lay, &c.params).is_none());
    }
}

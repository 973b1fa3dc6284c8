//! Constructive fallback: builds an N2 layout that mirrors N1's byproduct
//! combinations (known on one side, unknown on the other) and distributes the
//! side information so the block histogram and message frequencies match N1.

use std::collections::{BTreeMap, HashMap};

use crate::types::{MsgSet, Query, SchemeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Group {
    base_len: usize,
    allow_empty: bool,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    base: MsgSet,
    allow_empty: bool,
}

impl Slot {
    fn group(&self) -> Group {
        Group { base_len: self.base.len(), allow_empty: self.allow_empty }
    }
}

/// How many slots of a group get no SI, only α, only β, or both.
type Split = [usize; 4];

struct Problem {
    slots: Vec<Slot>,
    target: BTreeMap<usize, usize>,
    half: usize,
    a: u8,
    b: u8,
    width: usize,
}

impl Problem {
    fn hist_vec(&self, fixed: &HashMap<usize, (MsgSet, usize)>) -> Option<(Vec<i64>, i64, i64)> {
        let mut hist = vec![0i64; self.width];
        for (&n, &c) in &self.target {
            hist[n] = c as i64;
        }
        let (mut ra, mut rb) = (self.half as i64, self.half as i64);
        for (&i, &(h, _)) in fixed {
            hist[self.slots[i].base.len() + h.len()] -= 1;
            ra -= h.contains(self.a) as i64;
            rb -= h.contains(self.b) as i64;
        }
        (hist.iter().all(|&v| v >= 0) && ra >= 0 && rb >= 0).then_some((hist, ra, rb))
    }

    fn solve(&self, fixed: &HashMap<usize, (MsgSet, usize)>) -> Option<Vec<(Group, Split)>> {
        let (hist, ra, rb) = self.hist_vec(fixed)?;
        let mut counts: BTreeMap<Group, usize> = BTreeMap::new();
        for (i, s) in self.slots.iter().enumerate() {
            if !fixed.contains_key(&i) {
                *counts.entry(s.group()).or_insert(0) += 1;
            }
        }
        let groups: Vec<(Group, usize)> = counts.into_iter().collect();
        let mut memo = HashMap::new();
        let splits = go(&groups, 0, hist, ra, rb, &mut memo)?;
        Some(groups.into_iter().map(|(g, _)| g).zip(splits).collect())
    }
}

type Memo = HashMap<(usize, Vec<i64>, i64, i64), Option<Vec<Split>>>;

fn go(groups: &[(Group, usize)], gi: usize, hist: Vec<i64>, ra: i64, rb: i64, memo: &mut Memo) -> Option<Vec<Split>> {
    if gi == groups.len() {
        return (hist.iter().all(|&v| v == 0) && ra == 0 && rb == 0).then(Vec::new);
    }
    let key = (gi, hist.clone(), ra, rb);
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    let (g, n) = groups[gi];
    let s = g.base_len;
    let mut found = None;
    'outer: for n2 in 0..=n {
        for na in 0..=n - n2 {
            for nb in 0..=n - n2 - na {
                let n0 = n - n2 - na - nb;
                if n0 > 0 && !g.allow_empty {
                    continue;
                }
                if (na + n2) as i64 > ra || (nb + n2) as i64 > rb {
                    continue;
                }
                if s + 2 >= hist.len() && n2 > 0 || s + 1 >= hist.len() && na + nb > 0 {
                    continue;
                }
                let mut h = hist.clone();
                h[s] -= n0 as i64;
                if s + 1 < h.len() {
                    h[s + 1] -= (na + nb) as i64;
                }
                if s + 2 < h.len() {
                    h[s + 2] -= n2 as i64;
                }
                if h.iter().any(|&v| v < 0) {
                    continue;
                }
                if let Some(mut rest) = go(groups, gi + 1, h, ra - (na + n2) as i64, rb - (nb + n2) as i64, memo) {
                    rest.insert(0, [n0, na, nb, n2]);
                    found = Some(rest);
                    break 'outer;
                }
            }
        }
    }
    memo.insert(key, found.clone());
    found
}

/// Returns an N2 layout for `params` that keeps as many codewords of
/// `start` in place as possible, or None when N1 is too lopsided to mirror.
pub fn rebalance(n1: &Query, start: &[MsgSet], params: &SchemeParams) -> Option<Vec<MsgSet>> {
    let g = params.demand;
    let [a, b] = params.si();
    let si = params.si_set();
    let half = params.half() as usize;
    let rows = n1.len();
    if start.len() != rows {
        return None;
    }
    let mut target: BTreeMap<usize, usize> = BTreeMap::new();
    for cw in n1.codewords() {
        *target.entry(cw.len()).or_insert(0) += 1;
    }
    let mut unknown = Vec::new();
    let mut known = Vec::new();
    for cw in n1.codewords() {
        let w = cw.ids().without(g).minus(si);
        if w.is_empty() {
            continue;
        }
        if cw.contains(g) {
            unknown.push(w);
        } else {
            known.push(w);
        }
    }
    if known.len() > half || unknown.len() + 1 > half {
        return None;
    }
    let mut slots = Vec::with_capacity(rows);
    for w in &known {
        slots.push(Slot { base: w.with(g), allow_empty: true });
    }
    for _ in known.len()..half {
        slots.push(Slot { base: MsgSet::single(g), allow_empty: true });
    }
    for w in &unknown {
        slots.push(Slot { base: *w, allow_empty: true });
    }
    for _ in unknown.len()..half - 1 {
        slots.push(Slot { base: MsgSet::EMPTY, allow_empty: false });
    }
    let width = params.k as usize + 3;
    let problem = Problem { slots, target, half, a, b, width };

    let mut fixed: HashMap<usize, (MsgSet, usize)> = HashMap::new();
    let mut free_by_base: HashMap<MsgSet, Vec<usize>> = HashMap::new();
    for (i, s) in problem.slots.iter().enumerate().rev() {
        free_by_base.entry(s.base).or_default().push(i);
    }
    for (pos, s) in start.iter().enumerate() {
        let base = s.minus(si);
        let h = s.intersect(si);
        let Some(&i) = free_by_base.get(&base).and_then(|v| v.last()) else { continue };
        if !problem.slots[i].allow_empty && h.is_empty() {
            continue;
        }
        fixed.insert(i, (h, pos));
        if problem.solve(&fixed).is_some() {
            free_by_base.get_mut(&base)?.pop();
        } else {
            fixed.remove(&i);
        }
    }
    let plan = problem.solve(&fixed)?;
    let mut out: Vec<Option<MsgSet>> = vec![None; rows];
    for (&i, &(h, pos)) in &fixed {
        out[pos] = Some(problem.slots[i].base.union(h));
    }
    let options = [MsgSet::EMPTY, MsgSet::single(a), MsgSet::single(b), MsgSet::from_ids([a, b])];
    let mut rest: Vec<MsgSet> = Vec::new();
    for (group, split) in plan {
        let idx = (0..problem.slots.len()).filter(|i| !fixed.contains_key(i) && problem.slots[*i].group() == group);
        let hs = split.iter().enumerate().flat_map(|(o, &n)| std::iter::repeat_n(options[o], n));
        rest.extend(idx.zip(hs).map(|(i, h)| problem.slots[i].base.union(h)));
    }
    for (pos, slot) in out.iter_mut().enumerate() {
        if slot.is_none() {
            let j = rest.iter().position(|s| s.len() == start[pos].len()).unwrap_or(0);
            if j >= rest.len() {
                return None;
            }
            *slot = Some(rest.remove(j));
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_query_n1, canonical_code};
    use crate::privacy::{assign_indexes, layout_structure};
    use crate::retrieve::decodability_oracle;
    use crate::types::Code;

    #[test]
    fn canonical_layout_kept() {
        let c = canonical_code(6).unwrap();
        let lay = c.query_n1.layout();
        assert_eq!(rebalance(&c.query_n1, &lay, &c.params).unwrap(), lay);
    }

    #[test]
    fn all_triples_k4_k5() {
        for k in 4..=5u8 {
            let n1 = build_query_n1(k).unwrap();
            let lay = n1.layout();
            for g in 1..=k {
                for a in 1..=k {
                    for b in a + 1..=k {
                        if a == g || b == g {
                            continue;
                        }
                        let params = SchemeParams::new(k, g, [a, b]).unwrap();
                        let out = rebalance(&n1, &lay, &params).unwrap();
                        assert_eq!(layout_structure(&out), layout_structure(&lay));
                        let n2 = assign_indexes(&n1, &out, &params).unwrap();
                        let code = Code { params, query_n1: n1.clone(), query_n2: n2 };
                        assert!(decodability_oracle(&code).decodable, "K={k} {g};{a}{b}");
                    }
                }
            }
        }
    }
}

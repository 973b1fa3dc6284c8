use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::types::{BitRef, Codeword, Db, MessageId, MsgSet, Query, SchemeParams};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TransformStep {
    /// Relabels two messages everywhere.
    Swap(MessageId, MessageId),
    /// Sends the first pair onto the second, position by position; messages
    /// displaced by the move take the vacated labels in ascending order.
    SwapPair([MessageId; 2], [MessageId; 2]),
    /// Replaces the codeword whose message set is `from` (at `at` when given).
    Replace { from: MsgSet, to: MsgSet, at: Option<usize> },
}

impl TransformStep {
    pub fn replace(from: &[MessageId], to: &[MessageId]) -> TransformStep {
        TransformStep::Replace {
            from: MsgSet::from_ids(from.iter().copied()),
            to: MsgSet::from_ids(to.iter().copied()),
            at: None,
        }
    }

    pub fn replace_at(at: usize, from: MsgSet, to: MsgSet) -> TransformStep {
        TransformStep::Replace { from, to, at: Some(at) }
    }

    /// Relabeling table indexed by message id, for Swap and SwapPair.
    pub fn permutation(&self) -> Result<Option<Vec<MessageId>>> {
        let mut perm: Vec<MessageId> = (0..32).collect();
        match *self {
            TransformStep::Swap(a, b) => {
                if a == b || a == 0 || b == 0 || a > 31 || b > 31 {
                    return Err(Error::Transform(format!("bad swap {a}⇌{b}")));
                }
                perm[a as usize] = b;
                perm[b as usize] = a;
            }
            TransformStep::SwapPair(from, to) => {
                if from[0] == from[1] || to[0] == to[1] || from.iter().chain(&to).any(|&m| m == 0 || m > 31) {
                    return Err(Error::Transform("bad pair swap".into()));
                }
                perm[from[0] as usize] = to[0];
                perm[from[1] as usize] = to[1];
                let displaced: Vec<MessageId> =
                    to.iter().copied().filter(|m| !from.contains(m)).collect::<BTreeSet<_>>().into_iter().collect();
                let vacated: Vec<MessageId> =
                    from.iter().copied().filter(|m| !to.contains(m)).collect::<BTreeSet<_>>().into_iter().collect();
                for (d, v) in displaced.into_iter().zip(vacated) {
                    perm[d as usize] = v;
                }
            }
            TransformStep::Replace { .. } => return Ok(None),
        }
        Ok(Some(perm))
    }
}

fn set_name(s: MsgSet) -> String {
    format!("{s:?}")
}

impl fmt::Display for TransformStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |m: MessageId| set_name(MsgSet::single(m));
        match self {
            TransformStep::Swap(a, b) => write!(f, "{}⇌{}", n(*a), n(*b)),
            TransformStep::SwapPair(a, b) => write!(f, "{}{}⇌{}{}", n(a[0]), n(a[1]), n(b[0]), n(b[1])),
            TransformStep::Replace { from, to, at: None } => write!(f, "{}⇒{}", set_name(*from), set_name(*to)),
            TransformStep::Replace { from, to, at: Some(p) } => write!(f, "{}⇒{}@{}", set_name(*from), set_name(*to), p + 1),
        }
    }
}

fn locate(layout: &[MsgSet], from: MsgSet, at: Option<usize>) -> Result<usize> {
    match at {
        Some(p) => {
            if layout.get(p) == Some(&from) {
                Ok(p)
            } else {
                Err(Error::Transform(format!("codeword {} is not {}", p + 1, set_name(from))))
            }
        }
        None => {
            let hits: Vec<usize> = layout.iter().enumerate().filter(|(_, s)| **s == from).map(|(i, _)| i).collect();
            match hits.as_slice() {
                [p] => Ok(*p),
                [] => Err(Error::Transform(format!("no codeword matches {}", set_name(from)))),
                _ => Err(Error::Transform(format!("{} codewords match {}", hits.len(), set_name(from)))),
            }
        }
    }
}

/// Applies one step to a message-id layout.
pub fn apply_to_layout(layout: &mut [MsgSet], step: &TransformStep) -> Result<()> {
    if let Some(perm) = step.permutation()? {
        for s in layout.iter_mut() {
            *s = s.map(&perm);
        }
        return Ok(());
    }
    if let TransformStep::Replace { from, to, at } = *step {
        if to.is_empty() {
            return Err(Error::Transform("replacement must be nonempty".into()));
        }
        let p = locate(layout, from, at)?;
        layout[p] = to;
    }
    Ok(())
}

/// Applies steps to an indexed query. Relabeling carries indexes along;
/// a Replace frees the indexes of dropped terms and introduced terms take
/// the smallest freed index of their message, possibly one freed by a later step.
pub fn apply_transform(query: &Query, steps: &[TransformStep]) -> Result<Query> {
    let mut rows: Vec<Vec<BitRef>> = query.codewords().iter().map(|c| c.terms().to_vec()).collect();
    let mut pool: BTreeMap<MessageId, BTreeSet<u32>> = BTreeMap::new();
    let mut debts: Vec<(usize, MessageId)> = Vec::new();
    for step in steps {
        if let Some(perm) = step.permutation()? {
            for r in rows.iter_mut() {
                for t in r.iter_mut() {
                    t.msg = perm[t.msg as usize];
                }
            }
            for (_, m) in debts.iter_mut() {
                *m = perm[*m as usize];
            }
            pool = pool.into_iter().map(|(m, s)| (perm[m as usize], s)).collect();
            continue;
        }
        let TransformStep::Replace { from, to, at } = *step else { continue };
        if to.is_empty() {
            return Err(Error::Transform("replacement must be nonempty".into()));
        }
        let layout: Vec<MsgSet> = rows.iter().map(|r| MsgSet::from_ids(r.iter().map(|t| t.msg))).collect();
        let p = locate(&layout, from, at)?;
        let row = &mut rows[p];
        for t in row.iter().filter(|t| !to.contains(t.msg)) {
            pool.entry(t.msg).or_default().insert(t.index);
        }
        row.retain(|t| to.contains(t.msg));
        for m in to.minus(from).ids() {
            let idx = pool.get_mut(&m).and_then(|s| s.pop_first());
            match idx {
                Some(i) => row.push(BitRef::new(m, i)),
                None => {
                    row.push(BitRef::new(m, 0));
                    debts.push((p, m));
                }
            }
        }
    }
    for (p, m) in debts {
        let idx = pool
            .get_mut(&m)
            .and_then(|s| s.pop_first())
            .ok_or_else(|| Error::Transform(format!("no freed index left for {}", set_name(MsgSet::single(m)))))?;
        if let Some(t) = rows[p].iter_mut().find(|t| t.msg == m && t.index == 0) {
            t.index = idx;
        }
    }
    if let Some((m, _)) = pool.iter().find(|(_, s)| !s.is_empty()) {
        return Err(Error::Transform(format!("freed index of {} never reused", set_name(MsgSet::single(*m)))));
    }
    let cws = rows.into_iter().map(Codeword::new).collect::<Result<Vec<_>>>()?;
    Query::new(cws)
}

/// Checks that every message uses exactly the index set its role requires
/// in the query sent to `db`.
pub fn validate_index_sets(query: &Query, params: &SchemeParams, db: Db) -> Result<()> {
    let half = params.half();
    let mut seen: BTreeMap<MessageId, BTreeSet<u32>> = BTreeMap::new();
    for cw in query.codewords() {
        for t in cw.terms() {
            seen.entry(t.msg).or_default().insert(t.index);
        }
    }
    for m in 1..=params.k {
        let want: BTreeSet<u32> =
            if m == params.demand && db == Db::N2 { (half + 1..=2 * half).collect() } else { (1..=half).collect() };
        let got = seen.remove(&m).unwrap_or_default();
        if got != want {
            return Err(Error::Transform(format!("index set of {} is not the expected range", set_name(MsgSet::single(m)))));
        }
    }
    if let Some(m) = seen.keys().next() {
        return Err(Error::Transform(format!("unexpected message {m}")));
    }
    Ok(())
}

//! Breadth-first search for an N2 query, independent of the case scripts.
//!
//! Starting from N1's layout, each move exchanges one message between two
//! codewords (two position-qualified replacements), which keeps the block
//! histogram and message frequencies fixed. Every candidate layout is indexed
//! by the cover solver and checked by the span oracle.

use std::collections::HashSet;

use crate::retrieve::decodability_oracle;
use crate::types::{Code, MessageId, MsgSet, Query, SchemeParams};

use super::{assign_indexes, layout_structure, QueryStructure, TransformStep};

const MAX_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchWitness {
    pub query: Query,
    pub steps: Vec<TransformStep>,
    pub explored: usize,
}

fn accept(n1: &Query, layout: &[MsgSet], params: &SchemeParams) -> Option<Query> {
    let n2 = assign_indexes(n1, layout, params)?;
    let code = Code { params: *params, query_n1: n1.clone(), query_n2: n2 };
    decodability_oracle(&code).decodable.then_some(code.query_n2)
}

fn key(layout: &[MsgSet]) -> Vec<u32> {
    let mut k: Vec<u32> = layout.iter().map(|s| s.0).collect();
    k.sort_unstable();
    k
}

pub fn search_with_target(n1: &Query, params: &SchemeParams, target: &QueryStructure, max_depth: usize) -> Option<SearchWitness> {
    let start = n1.layout();
    if layout_structure(&start) != *target {
        return None;
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(key(&start));
    let mut explored = 1;
    if let Some(query) = accept(n1, &start, params) {
        return Some(SearchWitness { query, steps: Vec::new(), explored });
    }
    let mut frontier: Vec<(Vec<MsgSet>, Vec<TransformStep>)> = vec![(start, Vec::new())];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for (lay, steps) in &frontier {
            let n = lay.len();
            for r1 in 0..n {
                for r2 in r1 + 1..n {
                    let only1 = lay[r1].minus(lay[r2]);
                    let only2 = lay[r2].minus(lay[r1]);
                    for x in only1.ids() {
                        for y in only2.ids() {
                            let mut cand = lay.clone();
                            cand[r1] = lay[r1].without(x).with(y);
                            cand[r2] = lay[r2].without(y).with(x);
                            if !seen.insert(key(&cand)) {
                                continue;
                            }
                            explored += 1;
                            let mut s = steps.clone();
                            s.push(TransformStep::replace_at(r1, lay[r1], cand[r1]));
                            s.push(TransformStep::replace_at(r2, lay[r2], cand[r2]));
                            if let Some(query) = accept(n1, &cand, params) {
                                return Some(SearchWitness { query, steps: s, explored });
                            }
                            next.push((cand, s));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    None
}

/// Searches for an N2 query satisfying both privacy conditions; K must be 4 or 5.
pub fn search_synthesize_n2(query_n1: &Query, k: u8, demand: MessageId, si: [MessageId; 2]) -> Option<Query> {
    if !(4..=5).contains(&k) {
        return None;
    }
    let params = SchemeParams::new(k, demand, si).ok()?;
    let target = layout_structure(&query_n1.layout());
    search_with_target(query_n1, &params, &target, MAX_DEPTH).map(|w| w.query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::canonical_code;

    #[test]
    fn finds_canonical_n2() {
        let c = canonical_code(4).unwrap();
        assert_eq!(search_synthesize_n2(&c.query_n1, 4, 1, [2, 3]).unwrap(), c.query_n2);
    }

    #[test]
    fn wrong_census_has_no_witness() {
        let c = canonical_code(4).unwrap();
        let mut target = layout_structure(&c.query_n1.layout());
        *target.block_histogram.get_mut(&2).unwrap() -= 1;
        *target.block_histogram.entry(3).or_insert(0) += 1;
        assert!(search_with_target(&c.query_n1, &c.params, &target, MAX_DEPTH).is_none());
    }
}

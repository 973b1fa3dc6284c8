//! Query transformations, synthesis of N2 for any demand/side-information
//! assignment, and the structural privacy audit.

mod audit;
mod cases;
mod rebalance;
mod search;
mod shuffle;
mod solver;
mod synth;
mod transform;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{MessageId, MsgSet, Query};

pub use audit::{audit_privacy, audit_privacy_with, AuditEntry, AuditReport};
pub use cases::{dispatch, SynthesisCase, XkRole};
pub use rebalance::rebalance;
pub use search::{search_synthesize_n2, search_with_target, SearchWitness};
pub use shuffle::obfuscate;
pub use solver::assign_indexes;
pub use synth::{synthesize_code, synthesize_n2, synthesize_n2_traced, Route, Synthesis};
pub use transform::{apply_to_layout, apply_transform, validate_index_sets, TransformStep};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QueryStructure {
    pub block_histogram: BTreeMap<usize, usize>,
    pub message_frequency: BTreeMap<MessageId, usize>,
}

pub fn query_structure(query: &Query) -> QueryStructure {
    layout_structure(&query.layout())
}

pub fn layout_structure(layout: &[MsgSet]) -> QueryStructure {
    let mut s = QueryStructure::default();
    for set in layout {
        *s.block_histogram.entry(set.len()).or_insert(0) += 1;
        for m in set.ids() {
            *s.message_frequency.entry(m).or_insert(0) += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_query_n1;

    #[test]
    fn structure_k4() {
        let s = query_structure(&build_query_n1(4).unwrap());
        assert_eq!(s.block_histogram, BTreeMap::from([(1, 1), (2, 4), (3, 1), (4, 1)]));
        assert!(s.message_frequency.values().all(|&f| f == 4));
        assert_eq!(s.message_frequency.len(), 4);
    }

    #[test]
    fn structure_empty() {
        assert_eq!(query_structure(&Query::default()), QueryStructure::default());
    }

    #[test]
    fn structure_k7() {
        let s = query_structure(&build_query_n1(7).unwrap());
        assert_eq!(s.block_histogram.values().sum::<usize>(), 63);
        assert!(s.message_frequency.values().all(|&f| f == 32));
        assert_eq!(s.block_histogram, BTreeMap::from([(1, 1), (2, 13), (3, 23), (4, 5), (5, 18), (6, 3)]));
    }
}

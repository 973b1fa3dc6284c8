use serde::Serialize;

use crate::construct::{build_query_n1, build_query_n2};
use crate::error::{Error, Result};
use crate::retrieve::decodability_oracle;
use crate::types::{Code, MessageId, MsgSet, Query, SchemeParams};

use super::cases::{dispatch, script, Base, SynthesisCase};
use super::{apply_to_layout, assign_indexes, layout_structure, rebalance, TransformStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Route {
    /// The case script produced a valid layout as written.
    Literal,
    /// The script did not apply or did not validate; the layout was rebuilt.
    Rebalanced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesis {
    pub query: Query,
    pub case: Option<SynthesisCase>,
    pub route: Route,
    pub steps: Vec<TransformStep>,
}

/// Indexes `layout` and checks both conditions against `n1`.
pub(crate) fn validate(n1: &Query, layout: &[MsgSet], params: &SchemeParams) -> Option<Query> {
    if layout_structure(layout) != layout_structure(&n1.layout()) {
        return None;
    }
    let n2 = assign_indexes(n1, layout, params)?;
    let code = Code { params: *params, query_n1: n1.clone(), query_n2: n2 };
    decodability_oracle(&code).decodable.then_some(code.query_n2)
}

struct Stage {
    layout: Vec<MsgSet>,
    route: Route,
    steps: Vec<TransformStep>,
    case: Option<SynthesisCase>,
    query: Query,
}

fn stage(n1: &Query, params: &SchemeParams) -> Result<Stage> {
    if params.si() == [2, 3] && params.demand == 1 {
        let query = build_query_n2(n1, params)?;
        return Ok(Stage { layout: n1.layout(), route: Route::Literal, steps: Vec::new(), case: None, query });
    }
    let case = dispatch(params)?;
    let sc = script(case, params)?;
    let (mut layout, mut route, mut steps) = match sc.base {
        Base::N1 => (n1.layout(), Route::Literal, Vec::new()),
        Base::Prior(p) => {
            let s = stage(n1, &p)?;
            (s.layout, s.route, s.steps)
        }
    };
    for t in &sc.transform {
        apply_to_layout(&mut layout, t)?;
        steps.push(t.clone());
    }
    let transformed = layout.clone();
    let mut applied = true;
    for m in &sc.manipulations {
        if apply_to_layout(&mut layout, m).is_err() {
            applied = false;
            break;
        }
    }
    if applied {
        if let Some(query) = validate(n1, &layout, params) {
            steps.extend(sc.manipulations.iter().cloned());
            return Ok(Stage { layout, route, steps, case: Some(case), query });
        }
    }
    route = Route::Rebalanced;
    let fixed = rebalance(n1, &transformed, params)
        .ok_or_else(|| Error::Synthesis(format!("no balanced layout for case {}", case.id)))?;
    let query =
        validate(n1, &fixed, params).ok_or_else(|| Error::Synthesis(format!("rebalanced layout fails for case {}", case.id)))?;
    for (p, (old, new)) in transformed.iter().zip(&fixed).enumerate() {
        if old != new {
            steps.push(TransformStep::replace_at(p, *old, *new));
        }
    }
    Ok(Stage { layout: fixed, route, steps, case: Some(case), query })
}

/// Synthesizes the N2 query for an arbitrary assignment with N1 fixed, and
/// reports which case handled it and whether its script applied literally.
pub fn synthesize_n2_traced(query_n1: &Query, k: u8, demand: MessageId, si: [MessageId; 2]) -> Result<Synthesis> {
    if !(4..=7).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    let params = SchemeParams::new(k, demand, si)?;
    let s = stage(query_n1, &params)?;
    Ok(Synthesis { query: s.query, case: s.case, route: s.route, steps: s.steps })
}

pub fn synthesize_n2(query_n1: &Query, k: u8, demand: MessageId, si: [MessageId; 2]) -> Result<Query> {
    synthesize_n2_traced(query_n1, k, demand, si).map(|s| s.query)
}

/// Canonical N1 paired with a synthesized N2. The canonical assignment and
/// K=3 use the construction directly.
pub fn synthesize_code(k: u8, demand: MessageId, si: [MessageId; 2]) -> Result<Code> {
    let params = SchemeParams::new(k, demand, si)?;
    let query_n1 = build_query_n1(k)?;
    let query_n2 = if params == SchemeParams::canonical(k)? {
        build_query_n2(&query_n1, &params)?
    } else {
        synthesize_n2(&query_n1, k, demand, si)?
    };
    Ok(Code { params, query_n1, query_n2 })
}

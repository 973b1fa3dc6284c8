//! Case dispatch over (demand, side information) and the scripts that derive
//! each case's N2 layout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{MessageId, SchemeParams};

use super::TransformStep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum XkRole {
    SideInfo,
    Demand,
    Byproduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SynthesisCase {
    pub id: u8,
    pub role: XkRole,
}

impl SynthesisCase {
    pub fn summary(&self) -> &'static str {
        match self.id {
            1 => "X_K side information: swap known and unknown byproducts",
            2 => "X_K demand, SI X1X3 or X2X3: swap known and unknown byproducts",
            3 => "X_K demand, SI X1Xi: Xi⇌X3 then move the singleton",
            4 => "X_K demand, SI X2Xi: X1X3⇌X2Xi then three replacements",
            5 => "X_K demand, SI X3Xi: X1⇌X4 then the long replacement list",
            6 => "X_K demand, SI XpXq above X3: from case 5",
            9 => "X1 demand, SI X2Xi: swap known and unknown byproducts",
            10 => "X1 demand, SI XpXq: from case 5 with X1⇌X_K",
            11 => "X2 demand, SI X1Xi: swap known and unknown byproducts",
            12 => "X2 demand, SI XpXq: from case 5 with X2⇌X_K",
            13 => "X3 demand, SI X1Xi: from case 3 with X3⇌X_K",
            14 => "X3 demand, SI X2Xi: from case 4 with X3⇌X_K",
            15 => "X3 demand, SI XiXj: X2⇌X3 then eight replacements",
            16 => "middle demand, SI touching X1 or X2: swap known and unknown byproducts",
            17 => "middle demand, SI X3Xq: from case 5 with Xδ⇌X_K",
            18 => "middle demand, SI XpXq above X3: from case 5 with Xδ⇌X_K and three replacements",
            _ => "unknown case",
        }
    }
}

pub fn dispatch(params: &SchemeParams) -> Result<SynthesisCase> {
    let k = params.k;
    let g = params.demand;
    let [a, b] = params.si();
    let has = |m: MessageId| a == m || b == m;
    let (id, role) = if has(k) {
        (1, XkRole::SideInfo)
    } else if g == k {
        let id = match (a, b) {
            (1, 3) | (2, 3) => 2,
            (1, _) => 3,
            (2, _) => 4,
            (3, _) => 5,
            _ => 6,
        };
        (id, XkRole::Demand)
    } else {
        let id = match g {
            1 if has(2) => 9,
            1 => 10,
            2 if has(1) => 11,
            2 => 12,
            3 if has(1) => 13,
            3 if has(2) => 14,
            3 => 15,
            _ if has(1) || has(2) => 16,
            _ if has(3) => 17,
            _ => 18,
        };
        (id, XkRole::Byproduct)
    };
    if k < 4 {
        return Err(Error::NoCase { demand: g, si: [a, b] });
    }
    Ok(SynthesisCase { id, role })
}

pub(crate) enum Base {
    N1,
    Prior(SchemeParams),
}

pub(crate) struct Script {
    pub base: Base,
    pub transform: Vec<TransformStep>,
    pub manipulations: Vec<TransformStep>,
}

fn r(from: &[MessageId], to: &[MessageId]) -> TransformStep {
    TransformStep::replace(from, to)
}

fn case5_list(k: MessageId) -> Vec<TransformStep> {
    vec![
        r(&[4], &[k]),
        r(&[2, 4], &[3, 4]),
        r(&[2, 3], &[5, 3]),
        r(&[2, 6], &[5, 6]),
        r(&[2, k], &[4, k]),
        r(&[5, k], &[5, 1]),
        r(&[6, k], &[6, 3]),
        r(&[4, 1, 5], &[4, 1, 2]),
        r(&[4, 5, 6], &[4, k, 6]),
        r(&[3, 1, 5], &[2, k, 5]),
        r(&[3, 1, 6], &[2, k, 4]),
        r(&[3, 1, k], &[2, k, 3]),
        r(&[3, 5, 6], &[3, 2, 4]),
        r(&[3, 6, k], &[2, 6, k]),
        r(&[4, 2, 3, k], &[1, 5, 3, k]),
        r(&[4, 2, 1, k], &[1, 2, 6, 4]),
        r(&[4, 2, 5, k], &[4, 2, 5, 6]),
        r(&[4, 2, 6, k], &[4, 1, 6, k]),
        r(&[4, 2, 1, 5, 6], &[4, 3, 1, 5, 6]),
        r(&[4, 1, 5, 6, k], &[3, 1, 5, 6, k]),
        r(&[4, 3, 1, 5, 6, k], &[4, 2, 1, 5, 6, k]),
    ]
}

fn prior(k: u8, demand: MessageId, si: [MessageId; 2]) -> Result<Base> {
    Ok(Base::Prior(SchemeParams::new(k, demand, si)?))
}

/// Case-5 base (demand X_K, SI {X3, Xi}) and the relabeling onto {p, q}.
fn from_case5(k: u8, p: MessageId, q: MessageId) -> Result<(Base, Vec<TransformStep>)> {
    if p == 3 {
        return Ok((prior(k, k, [3, q])?, Vec::new()));
    }
    Ok((prior(k, k, [3, 4])?, vec![TransformStep::SwapPair([3, 4], [p, q])]))
}

pub(crate) fn script(case: SynthesisCase, params: &SchemeParams) -> Result<Script> {
    let k = params.k;
    let g = params.demand;
    let [a, b] = params.si();
    let plain = |transform, manipulations| Script { base: Base::N1, transform, manipulations };
    Ok(match case.id {
        1 | 2 | 9 | 11 | 16 => plain(Vec::new(), Vec::new()),
        3 => plain(vec![TransformStep::Swap(b, 3)], vec![r(&[1], &[3]), r(&[3, k], &[1, k])]),
        4 => plain(
            vec![TransformStep::SwapPair([1, 3], [2, b])],
            vec![r(&[3, k], &[2, k]), r(&[2], &[k]), r(&[2, 1, b, k], &[2, 1, b, 3])],
        ),
        5 => {
            let mut t = vec![TransformStep::Swap(1, 4)];
            if b != 4 {
                t.push(TransformStep::Swap(4, b));
            }
            plain(t, if k <= 7 { case5_list(k) } else { Vec::new() })
        }
        6 => {
            let (p, q) = (a, b);
            Script {
                base: prior(k, k, [3, 4])?,
                transform: vec![TransformStep::SwapPair([3, 4], [p, q])],
                manipulations: vec![r(&[1, p, q], &[1, 3, p]), r(&[1, 3, p, k], &[1, p, q, k])],
            }
        }
        10 => {
            let (base, mut transform) = from_case5(k, a, b)?;
            transform.push(TransformStep::Swap(1, k));
            Script { base, transform, manipulations: Vec::new() }
        }
        12 if k == 7 && a >= 4 => {
            let (p, q) = (a, b);
            Script {
                base: prior(k, k, [p, q])?,
                transform: vec![TransformStep::Swap(2, k)],
                manipulations: vec![r(&[1, 3], &[1, p]), r(&[1, 2, p, q], &[2, 3, q, k]), r(&[2, q, k], &[1, 2, q])],
            }
        }
        12 => {
            let (base, mut transform) = from_case5(k, a, b)?;
            transform.push(TransformStep::Swap(2, k));
            Script { base, transform, manipulations: Vec::new() }
        }
        13 => Script { base: prior(k, k, [1, b])?, transform: vec![TransformStep::Swap(3, k)], manipulations: Vec::new() },
        14 => Script { base: prior(k, k, [2, b])?, transform: vec![TransformStep::Swap(3, k)], manipulations: Vec::new() },
        15 => {
            let (i, j) = (a, b);
            let base = if k == 7 { prior(k, 2, [i, j])? } else { prior(k, 1, [i, j])? };
            Script {
                base,
                transform: vec![TransformStep::Swap(2, 3)],
                manipulations: vec![
                    r(&[i, j], &[k, j]),
                    r(&[k, 1], &[k, i]),
                    r(&[k, 2], &[3, 2]),
                    r(&[k, 3, 2], &[j, 3, 2]),
                    r(&[2, k, j, 3], &[1, 4, i, 3]),
                    r(&[j, 1, 4, 3], &[j, 1, 2, k]),
                    r(&[j, i, 1, 2, 3], &[1, k, 2, 4, j]),
                    r(&[j, k, i, 1, 2, 4], &[1, 2, k, 3, i, j]),
                ],
            }
        }
        17 => {
            let (base, mut transform) = from_case5(k, a, b)?;
            transform.push(TransformStep::Swap(g, k));
            Script { base, transform, manipulations: Vec::new() }
        }
        18 => {
            let (p, q) = (a, b);
            let (base, mut transform) = from_case5(k, p, q)?;
            transform.push(TransformStep::Swap(g, k));
            Script {
                base,
                transform,
                manipulations: vec![r(&[1, g], &[2, g]), r(&[2, g, p], &[1, k, g]), r(&[1, k, q], &[1, q, p])],
            }
        }
        _ => return Err(Error::NoCase { demand: g, si: [a, b] }),
    })
}

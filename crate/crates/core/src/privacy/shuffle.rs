use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::types::{BitRef, Code, Codeword, Query};

fn relabel(q: &Query, perms: &[Vec<u32>], rng: &mut ChaCha8Rng) -> Result<Query> {
    let mut cws = q
        .codewords()
        .iter()
        .map(|c| {
            let terms = c
                .terms()
                .iter()
                .map(|t| match perms.get(t.msg as usize) {
                    Some(p) if !p.is_empty() => BitRef::new(t.msg, p[t.index as usize - 1]),
                    _ => *t,
                })
                .collect();
            Codeword::new(terms)
        })
        .collect::<Result<Vec<_>>>()?;
    cws.shuffle(rng);
    Query::new(cws)
}

/// Shuffles each query's codeword order and renames byproduct bit indexes
/// by one random permutation per message, applied to both queries alike.
pub fn obfuscate(code: &Code, seed: u64) -> Result<Code> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = code.params.half();
    let perms: Vec<Vec<u32>> = (0..=code.params.k)
        .map(|m| {
            if m == 0 || !code.params.is_byproduct(m) {
                return Vec::new();
            }
            let mut p: Vec<u32> = (1..=half).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    Ok(Code {
        params: code.params,
        query_n1: relabel(&code.query_n1, &perms, &mut rng)?,
        query_n2: relabel(&code.query_n2, &perms, &mut rng)?,
    })
}

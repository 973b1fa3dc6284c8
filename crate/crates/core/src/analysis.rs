//! Closed-form rates and decoding cost, in exact rationals.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::retrieve::decode_plan;
use crate::types::{demand_bits_per_db, Code};

/// Finite-field operations a Reed-Solomon encoder needs in the three-message
/// MDS example this scheme is compared against. Cited, not recomputed.
pub const MDS_REFERENCE_MULTIPLICATIONS: u32 = 91;
pub const MDS_REFERENCE_ADDITIONS: u32 = 78;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }
}

impl Ord for Ratio {
    fn cmp(&self, o: &Ratio) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, o: &Ratio) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn pow2(e: u8) -> u128 {
    1u128 << e
}

/// Rate of this scheme: 2^(K-2) / (2^(K-1) - 1), and 1 for K=3.
pub fn rate_this_scheme(k: u8) -> Ratio {
    if k <= 3 {
        return Ratio::new(1, 1);
    }
    Ratio::new(pow2(k - 2), pow2(k - 1) - 1)
}

/// Capacity of PIR with private side information over MDS codes, N=2, M=2.
pub fn rate_mds_psi(k: u8) -> Ratio {
    Ratio::new(pow2(k - 3), pow2(k - 2) - 1)
}

/// Capacity of PIR without side information, N=2.
pub fn rate_no_si(k: u8) -> Ratio {
    Ratio::new(pow2(k - 1), pow2(k) - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateRow {
    pub k: u8,
    pub rate_this_scheme: Ratio,
    pub rate_mds_psi: Ratio,
    pub rate_no_si: Ratio,
    pub download_bits: u128,
    pub demand_bits: u128,
}

pub fn rate_row(k: u8) -> RateRow {
    let demand_bits = 2 * demand_bits_per_db(k) as u128;
    let download_bits = if k <= 3 { 2 } else { 2 * (pow2(k - 1) - 1) };
    RateRow {
        k,
        rate_this_scheme: rate_this_scheme(k),
        rate_mds_psi: rate_mds_psi(k),
        rate_no_si: rate_no_si(k),
        download_bits,
        demand_bits,
    }
}

/// Rows for every K in `k_min..=k_max`; empty when the range is empty or K < 3.
pub fn rate_table(k_min: u8, k_max: u8) -> Vec<RateRow> {
    (k_min.max(3)..=k_max.min(64)).map(rate_row).collect()
}

/// Demand bits over downloaded bits, counted on an actual code.
pub fn measured_rate(code: &Code) -> Ratio {
    let download = (code.query_n1.len() + code.query_n2.len()) as u128;
    Ratio::new(code.params.message_len() as u128, download)
}

pub fn render_rate_table(rows: &[RateRow]) -> String {
    let mut out = format!(
        "{:>3}  {:>22}  {:>22}  {:>22}  {:>10}  {:>10}\n",
        "K", "this scheme", "MDS PIR-PSI", "no SI", "download", "demand"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>3}  {:>22}  {:>22}  {:>22}  {:>10}  {:>10}\n",
            r.k,
            r.rate_this_scheme.to_string(),
            r.rate_mds_psi.to_string(),
            r.rate_no_si.to_string(),
            r.download_bits,
            r.demand_bits
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub k: u8,
    pub xor_count: usize,
    pub multiplications: usize,
    pub download_bits: usize,
    pub mds_reference_multiplications: u32,
    pub mds_reference_additions: u32,
}

pub fn xor_cost(code: &Code) -> Result<CostReport> {
    let trace = decode_plan(code)?;
    Ok(CostReport {
        k: code.params.k,
        xor_count: trace.xor_count,
        multiplications: 0,
        download_bits: code.query_n1.len() + code.query_n2.len(),
        mds_reference_multiplications: MDS_REFERENCE_MULTIPLICATIONS,
        mds_reference_additions: MDS_REFERENCE_ADDITIONS,
    })
}

pub fn render_cost(c: &CostReport) -> String {
    format!(
        "K={} downloads={} xor={} multiplications={}\nMDS reference (three messages, 8-bit): {} multiplications, {} additions\n",
        c.k, c.download_bits, c.xor_count, c.multiplications, c.mds_reference_multiplications, c.mds_reference_additions
    )
}

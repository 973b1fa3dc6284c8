//! Acceptance run: one line per criterion. Exits nonzero when a criterion
//! fails unless that failure is listed in `KNOWN_FAILURES` with its reason.

use std::sync::Arc;
use std::time::{Duration, Instant};

use pirpsi::analysis::{measured_rate, rate_mds_psi, rate_no_si, rate_table, rate_this_scheme, render_cost, xor_cost, Ratio};
use pirpsi::construct::{build_query_n1, build_query_n2, canonical_code, classify_byproducts};
use pirpsi::netsim::frame::{read_frame, write_frame};
use pirpsi::netsim::{fetch_code, serve_in_memory, ErrorReason, Frame, MsgType, QueryPayload};
use pirpsi::privacy::{audit_privacy, query_structure, search_synthesize_n2, synthesize_n2};
use pirpsi::retrieve::{answer_query, decodability_oracle, decode_demand, decode_plan, MessageStore, SideInfo};
use pirpsi::storage::parse_query_text;
use pirpsi::types::{render, Code, Db, MsgSet, Query, SchemeParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail: id, the detail text the failure must carry,
/// and the reason. A listed criterion that passes or fails differently is
/// reported as unexpected.
const KNOWN_FAILURES: &[(u8, &str, &str)] = &[(
    6,
    r#"all pass; layout rows differing from reference: ["k7_g_cd.txt:26", "k7_c_ef.txt:26", "k7_c_ef.txt:29"]"#,
    "three printed rows of the reference layouts (G;CD row 26, C;EF rows 26 and 29) break the frequency condition; ours differ exactly there",
)];

type Criterion = (u8, &'static str, Option<Duration>, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass: cond, detail: detail.into() }
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn column(name: &str, col: usize) -> String {
    fixture(name).lines().map(|l| l.split_whitespace().nth(col).unwrap().to_string() + "\n").collect()
}

fn ledger_lines(q: &Query, p: &SchemeParams) -> String {
    classify_byproducts(q, p).unwrap().pairs.iter().map(|p| format!("{} {}\n", p.unknown, p.known)).collect()
}

fn triples(k: u8) -> Vec<(u8, [u8; 2])> {
    let mut v = Vec::new();
    for g in 1..=k {
        for a in 1..=k {
            for b in a + 1..=k {
                if a != g && b != g {
                    v.push((g, [a, b]));
                }
            }
        }
    }
    v
}

fn c1() -> Outcome {
    let n1 = build_query_n1(4).unwrap();
    let n2 = build_query_n2(&n1, &SchemeParams::canonical(4).unwrap()).unwrap();
    let exact = render(&n1) == fixture("k4_n1.txt")
        && n1 == parse_query_text(&column("k4_code.txt", 0)).unwrap()
        && n2 == parse_query_text(&column("k4_code.txt", 1)).unwrap()
        && ledger_lines(&n1, &SchemeParams::canonical(4).unwrap()) == fixture("k4_ledger.txt");
    let demand: Vec<u32> = n2.codewords().iter().filter_map(|c| c.index_of(1)).collect();
    check(exact && demand == vec![5, 6, 7, 8], format!("7+7 codewords, N2 demand indexes {demand:?}"))
}

fn c2() -> Outcome {
    let c = canonical_code(7).unwrap();
    let n1 = render(&c.query_n1);
    let n2: Vec<String> = render(&c.query_n2).lines().map(str::to_string).collect();
    let table: Vec<Vec<String>> =
        fixture("k7_code.txt").lines().map(|l| l.split_whitespace().map(str::to_string).collect()).collect();
    let n1_lines: Vec<&str> = n1.lines().collect();
    let mut diffs = Vec::new();
    for (i, r) in table.iter().enumerate() {
        // Row 60 of the reference listing has its two cells transposed.
        let (want1, want2) = if i == 59 { (&r[1], &r[0]) } else { (&r[0], &r[1]) };
        if n1_lines[i] != want1 || n2[i] != *want2 {
            diffs.push(i + 1);
        }
    }
    let ledger = ledger_lines(&c.query_n1, &c.params) == fixture("k7_ledger.txt");
    check(
        n1 == fixture("k7_n1.txt") && diffs.is_empty() && ledger && c.query_n1.len() == 63,
        format!("63+63 codewords, ledger 30 pairs, first {} last {}, row 60 read transposed", n1_lines[0], n1_lines[62]),
    )
}

fn c3() -> Outcome {
    let r7 = &rate_table(7, 7)[0];
    let k7 = r7.rate_this_scheme == Ratio::new(32, 63)
        && r7.rate_mds_psi == Ratio::new(16, 31)
        && r7.rate_no_si == Ratio::new(64, 127);
    let closed = rate_table(3, 20).iter().all(|r| {
        let k = r.k as u32;
        let this = if k == 3 { Ratio::new(1, 1) } else { Ratio::new(1 << (k - 2), (1 << (k - 1)) - 1) };
        r.rate_this_scheme == this
            && r.rate_mds_psi == Ratio::new(1 << (k - 3), (1 << (k - 2)) - 1)
            && r.rate_no_si == Ratio::new(1 << (k - 1), (1 << k) - 1)
            && Ratio::new(r.demand_bits, r.download_bits) == r.rate_this_scheme
            && (k < 4 || (r.rate_mds_psi > r.rate_this_scheme && r.rate_this_scheme > r.rate_no_si))
    });
    let measured = (3..=12).all(|k| measured_rate(&canonical_code(k).unwrap()) == rate_this_scheme(k));
    check(
        k7 && closed && measured,
        format!(
            "K=7: {} / MDS {} / no-SI {}; closed forms K=3..20; measured K=3..12",
            rate_this_scheme(7),
            rate_mds_psi(7),
            rate_no_si(7)
        ),
    )
}

fn c4() -> Outcome {
    let mut runs = 0;
    for k in 3..=10u8 {
        let c = canonical_code(k).unwrap();
        let half = c.params.half() as usize;
        let per_db = c.params.codewords_per_query();
        if c.query_n1.len() != per_db || c.query_n2.len() != per_db {
            return check(false, format!("K={k}: wrong download size"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for _ in 0..200 {
            let s = MessageStore::random_for(&c.params, &mut rng);
            let a1 = answer_query(&s, &c.query_n1).unwrap();
            let a2 = answer_query(&s, &c.query_n2).unwrap();
            let (bits, trace) = decode_demand(&c, &a1, &a2, &SideInfo::from_store(&s, &c.params)).unwrap();
            if bits != s.row(1) || trace.from_db(Db::N1) != half || trace.from_db(Db::N2) != half {
                return check(false, format!("K={k}: decode mismatch"));
            }
            runs += 1;
        }
    }
    ok(format!("{runs} random stores, K=3..10, yield 2^(K-2) per database"))
}

fn c5() -> Outcome {
    let mut pairs = Vec::new();
    for k in 4..=12u8 {
        match classify_byproducts(&build_query_n1(k).unwrap(), &SchemeParams::canonical(k).unwrap()) {
            Ok(l) if l.pairs.iter().all(|p| p.unknown.ids() == p.known.ids()) => pairs.push(l.pairs.len()),
            Ok(_) => return check(false, format!("K={k}: mismatched pair")),
            Err(e) => return check(false, format!("K={k}: {e}")),
        }
    }
    ok(format!("pairs per K=4..12: {pairs:?}"))
}

fn letters(cell: &str) -> MsgSet {
    MsgSet::from_ids(cell.split('+').map(|t| t.as_bytes()[0] - b'A' + 1))
}

fn c6() -> Outcome {
    let mut counts = Vec::new();
    for k in 4..=7 {
        let r = audit_privacy(k, false).unwrap();
        if !r.all_pass() {
            return check(false, format!("K={k}: {} of {} fail", r.entries.len() - r.passed(), r.entries.len()));
        }
        counts.push(r.entries.len());
    }
    let n1 = build_query_n1(7).unwrap();
    let mut mismatched = Vec::new();
    for (file, g, si) in
        [("k7_g_ab.txt", 7, [1, 2]), ("k7_g_bd.txt", 7, [2, 4]), ("k7_g_cd.txt", 7, [3, 4]), ("k7_c_ef.txt", 3, [5, 6])]
    {
        let q = synthesize_n2(&n1, 7, g, si).unwrap();
        for (i, line) in fixture(file).lines().enumerate() {
            let want = letters(line.split_whitespace().nth(3).unwrap());
            if q.layout()[i] != want {
                mismatched.push(format!("{file}:{}", i + 1));
            }
        }
    }
    check(
        counts == [12, 30, 60, 105] && mismatched.is_empty(),
        format!("audit {counts:?} all pass; layout rows differing from reference: {mismatched:?}"),
    )
}

fn c7() -> Outcome {
    for k in 4..=5u8 {
        let n1 = build_query_n1(k).unwrap();
        for (g, si) in triples(k) {
            let Some(q) = search_synthesize_n2(&n1, k, g, si) else {
                return check(false, format!("K={k} {g};{si:?}: no witness"));
            };
            let code = Code { params: SchemeParams::new(k, g, si).unwrap(), query_n1: n1.clone(), query_n2: q };
            let table = synthesize_n2(&n1, k, g, si).unwrap();
            if !decodability_oracle(&code).decodable || query_structure(&code.query_n2) != query_structure(&table) {
                return check(false, format!("K={k} {g};{si:?}: witness disagrees"));
            }
        }
    }
    ok("witnesses for 12 (K=4) and 30 (K=5) assignments, structures agree")
}

fn agree(code: &Code, rng: &mut ChaCha8Rng) -> bool {
    let oracle = decodability_oracle(code).decodable;
    let decoded = decode_plan(code).is_ok() && {
        let s = MessageStore::random_for(&code.params, rng);
        let a1 = answer_query(&s, &code.query_n1).unwrap();
        let a2 = answer_query(&s, &code.query_n2).unwrap();
        decode_demand(code, &a1, &a2, &SideInfo::from_store(&s, &code.params)).is_ok_and(|(b, _)| b == s.row(code.params.demand))
    };
    oracle == decoded
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut codes = Vec::new();
    for k in 3..=10u8 {
        codes.push(canonical_code(k).unwrap());
    }
    for k in 4..=7u8 {
        let n1 = build_query_n1(k).unwrap();
        for (g, si) in triples(k) {
            codes.push(Code {
                params: SchemeParams::new(k, g, si).unwrap(),
                query_n1: n1.clone(),
                query_n2: synthesize_n2(&n1, k, g, si).unwrap(),
            });
        }
    }
    let (mut checked, mut flipped) = (0, 0);
    for c in &codes {
        if !agree(c, &mut rng) {
            return check(false, "disagreement on an unmutated code");
        }
        checked += 1;
    }
    for k in 3..=10u8 {
        let base = canonical_code(k).unwrap();
        for _ in 0..20 {
            let mut m = base.clone();
            let q = if rng.random() { &mut m.query_n1 } else { &mut m.query_n2 };
            let mut cws = q.codewords().to_vec();
            cws.remove(rng.random_range(0..cws.len()));
            *q = Query::new(cws).unwrap();
            if !agree(&m, &mut rng) {
                return check(false, format!("K={k}: mutant disagreement"));
            }
            flipped += usize::from(!decodability_oracle(&m).decodable);
            checked += 1;
        }
    }
    ok(format!("{checked} codes agree; {flipped} of 160 deletion mutants undecodable"))
}

fn c9() -> Outcome {
    let mut codes: Vec<Code> = (3..=10).map(|k| canonical_code(k).unwrap()).collect();
    for k in 4..=7u8 {
        let n1 = build_query_n1(k).unwrap();
        for (g, si) in triples(k) {
            codes.push(Code {
                params: SchemeParams::new(k, g, si).unwrap(),
                query_n1: n1.clone(),
                query_n2: synthesize_n2(&n1, k, g, si).unwrap(),
            });
        }
    }
    let zero = codes.iter().all(|c| xor_cost(c).unwrap().multiplications == 0);
    let k7 = xor_cost(&canonical_code(7).unwrap()).unwrap();
    let report = render_cost(&k7);
    check(
        zero && k7.download_bits == 126 && report.contains("91 multiplications, 78 additions"),
        format!(
            "{} codes XOR-only; K=7 downloads {} with {} XORs; MDS reference 91/78 cited",
            codes.len(),
            k7.download_bits,
            k7.xor_count
        ),
    )
}

fn c10() -> Outcome {
    for k in 3..=7u8 {
        let code = canonical_code(k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
        for _ in 0..50 {
            let s = Arc::new(MessageStore::random_for(&code.params, &mut rng));
            let si = SideInfo::from_store(&s, &code.params);
            let (mut a, _) = serve_in_memory(s.clone());
            let (mut b, _) = serve_in_memory(s.clone());
            let got = fetch_code(&mut a, &mut b, &code, &si).unwrap();
            let a1 = answer_query(&s, &code.query_n1).unwrap();
            let a2 = answer_query(&s, &code.query_n2).unwrap();
            if got.demand != decode_demand(&code, &a1, &a2, &si).unwrap().0
                || got.downloaded_bits != 2 * code.params.codewords_per_query()
            {
                return check(false, format!("K={k}: network result differs"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let len = rng.random_range(0..300);
        let f = Frame { version: 1, msg_type: rng.random_range(1..=3), payload: (0..len).map(|_| rng.random()).collect() };
        if Frame::decode(&f.encode()) != Ok(f) {
            return check(false, "frame round trip failed");
        }
    }
    let store = Arc::new(MessageStore::zeros(4, 8));
    let (mut c, _) = serve_in_memory(store);
    let q = build_query_n1(4).unwrap();
    let mut reasons = Vec::new();
    let mut oob = QueryPayload::from_query(4, &q);
    oob.codewords[0][0].index = 9;
    write_frame(&mut c, &Frame::new(MsgType::Query, oob.encode().unwrap())).unwrap();
    reasons.push(read_frame(&mut c).unwrap().payload[0]);
    let mut v = Frame::new(MsgType::Query, QueryPayload::from_query(4, &q).encode().unwrap());
    v.version = 7;
    write_frame(&mut c, &v).unwrap();
    reasons.push(read_frame(&mut c).unwrap().payload[0]);
    let mut bad = Frame::new(MsgType::Query, vec![]).encode();
    bad[..4].copy_from_slice(b"XXXX");
    std::io::Write::write_all(&mut c, &bad).unwrap();
    reasons.push(read_frame(&mut c).unwrap().payload[0]);
    let want = [ErrorReason::OutOfBounds as u8, ErrorReason::BadVersion as u8, ErrorReason::BadMagic as u8];
    check(reasons == want, format!("250 fetches match; 1000 frames round-trip; error reasons {reasons:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "K=4 construction golden", Some(Duration::from_millis(1)), c1),
        (2, "K=7 construction golden", Some(Duration::from_millis(10)), c2),
        (3, "rates exact", None, c3),
        (4, "end-to-end decoding", Some(Duration::from_secs(30)), c4),
        (5, "byproduct pairing K=4..12", None, c5),
        (6, "joint-privacy audit and reference layouts", Some(Duration::from_secs(60)), c6),
        (7, "independent search witness", Some(Duration::from_secs(300)), c7),
        (8, "oracle/decoder agreement", None, c8),
        (9, "XOR-only cost", None, c9),
        (10, "network equivalence", Some(Duration::from_secs(30)), c10),
    ];
    let mut unexpected = 0;
    for (id, name, limit, f) in criteria {
        let t = Instant::now();
        let mut o = f();
        let el = t.elapsed();
        if let Some(l) = limit {
            if el > l {
                o.pass = false;
                o.detail = format!("{} (over time limit)", o.detail);
            }
        }
        let known = KNOWN_FAILURES.iter().find(|(k, _, _)| *k == id);
        let limit_txt = limit.map_or("no limit".to_string(), |l| format!("limit {l:?}"));
        println!("criterion {id:>2} {} [{name}] {el:.2?} ({limit_txt}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        match (o.pass, known) {
            (false, Some((_, detail, why))) if o.detail.ends_with(detail) => println!("             known failure: {why}"),
            (false, Some(_)) => {
                println!("             differs from the documented failure");
                unexpected += 1;
            }
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("             listed as a known failure but passed");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected acceptance result(s)");
        std::process::exit(1);
    }
}

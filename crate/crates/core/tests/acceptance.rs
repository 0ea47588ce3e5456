//! Acceptance gate: one PASS/FAIL line per criterion, thresholds pinned here.
//!
//! Criterion 4 cannot hold: direct sums do not determine their summands in
//! this category (see `witness_of_non_unique_summands` in `tests/algebra.rs`),
//! so two different multisets with isomorphic sums must decompose alike and
//! at least one of them is not recovered. It stays red and is listed in
//! `KNOWN_RED`; the gate fails if it ever turns green without review.

use std::time::{Duration, Instant};

use polyform::block_matrix::{BlockMatrix, StripProfile};
use polyform::catalog::{catalog_entries, matrix_of, Catalog, IndecName};
use polyform::par;
use polyform::orbit_oracle::{census, count_orbits, profiles_up_to, StateSpace};
use polyform::reducer::{crt_decompose, crt_merge, crt_split, decompose, isomorphic, verify_certificate, ReduceError};
use polyform::ring_core::{l12_split, l24_split, t4_merge, t8_merge, Modulus, Residue};
use polyform::schema::{ColStrip, MooreCaps, RowStrip, SchemaId};
use polyform::topology::{cw_of, homology, split_free_part, TopologyError};
use polyform::transform_engine::random_scramble;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const CRT_BUDGET: Duration = Duration::from_secs(1);
const CENSUS_BUDGET: Duration = Duration::from_secs(10);
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(60);

const CENSUS_CAP: u8 = 2;
const CENSUS_MAX_ROWS: usize = 3;
const CENSUS_MAX_COLS: usize = 2;
const CENSUS_STATE_BOUND: u64 = 1_000_000;

const ROUND_TRIP_TRIALS: u64 = 500;
const ROUND_TRIP_MAX_PARTS: usize = 4;
const ROUND_TRIP_MOVES: usize = 50;
const ROUND_TRIP_REQUIRED: f64 = 1.0;

const PRIMARY_TRIALS: u64 = 200;
const PRIMARY_MOVES: usize = 50;

/// Frozen size of the Aprime catalog at caps r, s = 2.
const GOLDEN_APRIME_CATALOG: usize = 239;

/// Criteria expected to fail, with the reason recorded alongside the code.
const KNOWN_RED: &[u8] = &[4];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn residue(x: i64, m: u32) -> Residue {
    Residue::new(x, Modulus::new(m).unwrap())
}

fn crt_exactness() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (n, split, merge) in [
        (24u32, l24_split as fn(Residue) -> _, t8_merge as fn(Residue, Residue) -> _),
        (12, l12_split, t4_merge),
    ] {
        for x in 0..n as i64 {
            let (a, b) = split(residue(x, n)).unwrap();
            if merge(a, b).unwrap() != residue(x, n) {
                bad.push(format!("merge(split({x})) mod {n}"));
            }
            for y in 0..n as i64 {
                let (c, d) = split(residue(y, n)).unwrap();
                let (s, p) = (split(residue(x + y, n)).unwrap(), split(residue(x * y, n)).unwrap());
                let sum = (a.checked_add(c).unwrap(), b.checked_add(d).unwrap());
                let prod = (a.checked_mul(c).unwrap(), b.checked_mul(d).unwrap());
                if s != sum || p != prod {
                    bad.push(format!("split not a homomorphism at ({x}, {y}) mod {n}"));
                }
            }
        }
        let one = split(residue(1, n)).unwrap();
        if one.0.value() != 1 || one.1.value() != 1 {
            bad.push(format!("split(1) mod {n} is not the unit"));
        }
    }
    let took = start.elapsed();
    Outcome {
        id: 1,
        title: "CRT split/merge exactness",
        pass: bad.is_empty() && took < CRT_BUDGET,
        detail: format!("{} defects, {took:.2?} (budget {CRT_BUDGET:?})", bad.len()),
    }
}

fn one_by_one(row: RowStrip, col: ColStrip) -> StripProfile {
    StripProfile::new(vec![(row, 1)], vec![(col, 1)]).unwrap()
}

fn census_counts() -> Outcome {
    let start = Instant::now();
    let cases = [
        (RowStrip::Sn, SchemaId::APRIME, 12),
        (RowStrip::Ceta, SchemaId::APRIME, 6),
        (RowStrip::Sn, SchemaId::APRIME2_PLUS, 7),
        (RowStrip::Sn, SchemaId::APRIME3_PLUS, 2),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (row, schema, want) in cases {
        let report = count_orbits(&one_by_one(row, ColStrip::S3), schema, 1 << 20).unwrap();
        let got = report.representatives.iter().filter(|m| !m.is_zero()).count();
        ok &= got == want;
        details.push(format!("{row}x{} {schema}: {got}/{want}", ColStrip::S3));
    }
    let took = start.elapsed();
    Outcome {
        id: 2,
        title: "orbit census of 1x1 profiles",
        pass: ok && took < CENSUS_BUDGET,
        detail: format!("{}; {took:.2?}", details.join(", ")),
    }
}

fn catalog_completeness() -> Outcome {
    let start = Instant::now();
    let schemas =
        [SchemaId::APRIME, SchemaId::A0, SchemaId::APRIME2, SchemaId::APRIME3, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS];
    let mut jobs = Vec::new();
    for schema in schemas {
        let catalog = Catalog::new(schema, MooreCaps::new(CENSUS_CAP, CENSUS_CAP));
        for p in profiles_up_to(schema, CENSUS_CAP, CENSUS_MAX_ROWS, CENSUS_MAX_COLS) {
            let entries: Vec<IndecName> = catalog.with_profile(&p).into_iter().map(|(n, _)| *n).collect();
            jobs.push((schema, p, entries));
        }
    }
    // None when the state space is over the bound, else the defects found.
    let results: Vec<Option<Vec<String>>> = par::map_slice(&jobs, |(schema, p, entries)| {
        let space = StateSpace::new(*schema, p, CENSUS_STATE_BOUND).ok()?;
        let report = census(&space);
        let reps = report.nonzero_indecomposable();
        let mut defects = Vec::new();
        if reps.len() != entries.len() {
            defects.push(format!("{schema} {p}: {} orbits vs {} entries", reps.len(), entries.len()));
        }
        for m in reps {
            match decompose(m) {
                Ok(d) if d.parts.len() == 1 && entries.contains(&d.parts[0]) => {}
                other => defects.push(format!("{schema} {p}: representative gives {other:?}")),
            }
        }
        Some(defects)
    });
    let profiles = results.iter().flatten().count();
    let skipped = results.len() - profiles;
    let defects: Vec<String> = results.into_iter().flatten().flatten().collect();
    for d in defects.iter().take(5) {
        println!("    {d}");
    }
    Outcome {
        id: 3,
        title: "catalog soundness and completeness, caps <= 2",
        pass: defects.is_empty() && profiles > 0,
        detail: format!(
            "{profiles} profiles checked, {skipped} over {CENSUS_STATE_BOUND} states, {} defects, {:.1?}",
            defects.len(),
            start.elapsed()
        ),
    }
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let names = catalog_entries(SchemaId::APRIME, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials: Vec<Vec<IndecName>> = (0..ROUND_TRIP_TRIALS)
        .map(|_| {
            let k = rng.gen_range(1..=ROUND_TRIP_MAX_PARTS);
            let mut picked: Vec<IndecName> = (0..k).map(|_| *names.choose(&mut rng).unwrap()).collect();
            picked.sort();
            picked
        })
        .collect();
    // Some(true) exact, Some(false) another certified sum, None error.
    let results: Vec<(Option<bool>, Vec<IndecName>)> = par::map_range(trials.len(), |t| {
        let picked = &trials[t];
        let mats: Vec<BlockMatrix> = picked.iter().map(|n| matrix_of(n).unwrap()).collect();
        let m = BlockMatrix::direct_sum_all(SchemaId::APRIME, &mats).unwrap();
        let (s, _) = random_scramble(&m, t as u64, ROUND_TRIP_MOVES);
        match decompose(&s) {
            Ok(d) => {
                let mut got = d.parts.clone();
                got.sort();
                let outcome = if got == *picked { Some(true) } else { verify_certificate(&s, &d).then_some(false) };
                (outcome, got)
            }
            Err(_) => (None, vec![]),
        }
    });
    let exact = results.iter().filter(|r| r.0 == Some(true)).count() as u64;
    let equivalent = results.iter().filter(|r| r.0 == Some(false)).count() as u64;
    let errors = ROUND_TRIP_TRIALS - exact - equivalent;
    let show = |v: &[IndecName]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" + ");
    let example = results
        .iter()
        .zip(&trials)
        .find(|(r, _)| r.0 == Some(false))
        .map(|(r, picked)| format!("{} -> {}", show(picked), show(&r.1)));
    let took = start.elapsed();
    let rate = exact as f64 / ROUND_TRIP_TRIALS as f64;
    if let Some(e) = example {
        println!("    first non-exact (certified isomorphic) case: {e}");
    }
    Outcome {
        id: 4,
        title: "round trip recovers the exact multiset",
        pass: rate >= ROUND_TRIP_REQUIRED && took < ROUND_TRIP_BUDGET,
        detail: format!(
            "exact {exact}/{ROUND_TRIP_TRIALS} ({:.1}%, need {:.0}%), another certified sum {equivalent}, errors {errors}, {took:.1?}",
            rate * 100.0,
            ROUND_TRIP_REQUIRED * 100.0
        ),
    }
}

/// A uniformly random Aprime matrix on a random profile with Moore caps 2.
fn random_aprime(rng: &mut ChaCha8Rng) -> BlockMatrix {
    let row_pool = SchemaId::APRIME.row_strips(2);
    let col_pool = SchemaId::APRIME.col_strips(2);
    loop {
        let mut rows: Vec<(RowStrip, usize)> = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let s = *row_pool.choose(rng).unwrap();
            match rows.iter_mut().find(|(r, _)| *r == s) {
                Some(e) => e.1 += 1,
                None => rows.push((s, 1)),
            }
        }
        let mut cols: Vec<(ColStrip, usize)> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let s = *col_pool.choose(rng).unwrap();
            match cols.iter_mut().find(|(c, _)| *c == s) {
                Some(e) => e.1 += 1,
                None => cols.push((s, 1)),
            }
        }
        let Ok(p) = StripProfile::new(rows, cols) else { continue };
        let Ok(zero) = BlockMatrix::zero(SchemaId::APRIME, p.clone()) else { continue };
        let values: Vec<i64> = (0..zero.num_rows() * zero.num_cols()).map(|_| rng.gen_range(0..24)).collect();
        return BlockMatrix::from_integers(SchemaId::APRIME, p, &values).unwrap();
    }
}

fn primary_parts() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let inputs: Vec<BlockMatrix> = (0..PRIMARY_TRIALS).map(|_| random_aprime(&mut rng)).collect();
    let results = par::map_range(inputs.len(), |t| -> Result<(bool, bool), ReduceError> {
        let m = &inputs[t];
        let t = t as u64;
        let (two, three) = crt_split(m)?;
        let (two, _) = random_scramble(&two, 2 * t, PRIMARY_MOVES);
        let (three, _) = random_scramble(&three, 2 * t + 1, PRIMARY_MOVES);
        let merged = crt_merge(&two, &three)?;
        Ok((isomorphic(m, &merged)?, crt_decompose(m)?.parts == decompose(m)?.parts))
    });
    let (mut iso, mut agree, mut errors) = (0u64, 0u64, 0u64);
    for (m, r) in inputs.iter().zip(&results) {
        match r {
            Ok((i, a)) => {
                iso += *i as u64;
                agree += *a as u64;
            }
            Err(e) => {
                errors += 1;
                if errors <= 3 {
                    println!("    error on\n{m}    {e}");
                }
            }
        }
    }
    Outcome {
        id: 5,
        title: "independent primary scrambles merge to an isomorphic matrix",
        pass: iso == PRIMARY_TRIALS && agree == PRIMARY_TRIALS,
        detail: format!(
            "isomorphic {iso}/{PRIMARY_TRIALS}, crt agrees {agree}/{PRIMARY_TRIALS}, errors {errors}, {:.1?}",
            start.elapsed()
        ),
    }
}

fn topology_checks() -> Outcome {
    let schemas = [SchemaId::APRIME, SchemaId::A0];
    let (mut checked, mut bad) = (0usize, Vec::new());
    for schema in schemas {
        for name in catalog_entries(schema, 2, 2) {
            let cw = cw_of(&name, 5).unwrap();
            let h = homology(&cw);
            checked += 1;
            if !h.odd_torsion_only() || h.euler_characteristic() != cw.euler_characteristic() {
                bad.push(format!("{schema} {name}: {h}"));
            }
        }
    }
    // Every even divisor from 2 to 24 must be refused, alone or beside units and odd torsion.
    let residual = BlockMatrix::zero(
        SchemaId::APRIME,
        StripProfile::new(vec![(RowStrip::Sn2, 2)], vec![(ColStrip::S2, 2)]).unwrap(),
    )
    .unwrap();
    let mut rejected = 0;
    for d in (2..=24).step_by(2) {
        for block in [vec![vec![d, 0], vec![0, 1]], vec![vec![3, 0], vec![0, 3 * d]], vec![vec![d, d], vec![0, 3 * d]]] {
            match split_free_part(&block, &residual) {
                Err(TopologyError::Not2TorsionFree(_)) => rejected += 1,
                other => bad.push(format!("{block:?} gave {other:?}")),
            }
        }
    }
    let odd_ok = split_free_part(&[vec![3, 0], vec![0, 9]], &residual).is_ok_and(|(atoms, _)| atoms.len() == 2);
    if !odd_ok {
        bad.push("odd divisors 3, 9 were not split off".into());
    }
    Outcome {
        id: 6,
        title: "odd torsion, Euler characteristic and even-divisor rejection",
        pass: bad.is_empty(),
        detail: format!("{checked} entries, {rejected} even blocks rejected, {} defects", bad.len()),
    }
}

fn golden_census() -> Outcome {
    let got = catalog_entries(SchemaId::APRIME, 2, 2).len();
    Outcome {
        id: 7,
        title: "golden Aprime catalog size at caps 2",
        pass: got == GOLDEN_APRIME_CATALOG,
        detail: format!("{got} entries, frozen {GOLDEN_APRIME_CATALOG}"),
    }
}

fn main() {
    let checks: [fn() -> Outcome; 7] =
        [crt_exactness, census_counts, catalog_completeness, round_trip, primary_parts, topology_checks, golden_census];
    let mut unexpected = Vec::new();
    for check in checks {
        let o = check();
        println!("{} [{}] {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
        if o.pass == KNOWN_RED.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}

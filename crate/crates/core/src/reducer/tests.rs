use std::collections::HashMap;

use super::*;
use crate::block_matrix::StripProfile;
use crate::catalog::{catalog_entries, parse_name};
use crate::orbit_oracle::{orbit_labels, profiles_up_to, same_orbit, StateSpace};
use crate::transform_engine::random_scramble;

fn name(s: &str, schema: SchemaId) -> IndecName {
    parse_name(s, schema).unwrap()
}

fn texts(parts: &[IndecName]) -> Vec<String> {
    parts.iter().map(|p| p.to_string()).collect()
}

fn single(schema: SchemaId, rows: Vec<(RowStrip, usize)>, cols: Vec<(ColStrip, usize)>, vals: &[i64]) -> BlockMatrix {
    BlockMatrix::from_integers(schema, StripProfile::new(rows, cols).unwrap(), vals).unwrap()
}

#[test]
fn catalog_entries_are_fixed_points() {
    for schema in [SchemaId::APRIME, SchemaId::A0, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS] {
        for n in catalog_entries(schema, 2, 2) {
            let m = matrix_of(&n).unwrap();
            let d = decompose(&m).unwrap();
            assert_eq!(d.parts, vec![n], "{schema} {n}");
            assert_eq!(apply_log(&m, &d.certificate).unwrap(), m, "{schema} {n}");
        }
    }
}

#[test]
fn nineteen_is_minus_five() {
    let m = single(SchemaId::APRIME, vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)], &[19]);
    let d = decompose(&m).unwrap();
    assert_eq!(texts(&d.parts), ["X(5)"]);
    assert!(verify_certificate(&m, &d));
}

#[test]
fn moore_row_clears_against_a_unit() {
    let m = single(SchemaId::APRIME, vec![(RowStrip::Sn, 1), (RowStrip::Moore(1), 1)], vec![(ColStrip::S3, 1)], &[5, 1]);
    let d = decompose(&m).unwrap();
    let mut got = d.parts.clone();
    got.sort();
    let mut want = vec![name("X(5)", SchemaId::APRIME), IndecName::atom(SchemaId::APRIME, StripId::Row(RowStrip::Moore(1)))];
    want.sort();
    assert_eq!(got, want);
    let sum = BlockMatrix::direct_sum_all(SchemaId::APRIME, &want.iter().map(|n| matrix_of(n).unwrap()).collect::<Vec<_>>()).unwrap();
    assert!(same_orbit(&m, &sum, 1 << 20).unwrap());
}

#[test]
fn distinct_values_stay_distinct() {
    let one = matrix_of(&name("X(1)", SchemaId::APRIME)).unwrap();
    let two = matrix_of(&name("X(2)", SchemaId::APRIME)).unwrap();
    assert!(isomorphic(&one, &one).unwrap());
    assert!(!isomorphic(&one, &two).unwrap());
}

#[test]
fn empty_matrix_has_empty_certificate() {
    let m = BlockMatrix::zero(SchemaId::APRIME, StripProfile::empty()).unwrap();
    let d = decompose(&m).unwrap();
    assert!(d.parts.is_empty());
    assert!(d.certificate.is_empty());
    assert!(verify_certificate(&m, &d));
    assert!(crt_decompose(&m).unwrap().parts.is_empty());
}

#[test]
fn zero_matrix_splits_into_atoms() {
    let m = single(SchemaId::APRIME, vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)], &[0]);
    let d = decompose(&m).unwrap();
    assert!(d.parts.iter().all(IndecName::is_atom));
    assert_eq!(d.parts.len(), 2);
}

#[test]
fn tampered_certificate_fails() {
    let names = catalog_entries(SchemaId::APRIME, 1, 1);
    let parts: Vec<BlockMatrix> = names.iter().take(40).step_by(13).map(|n| matrix_of(n).unwrap()).collect();
    let m = BlockMatrix::direct_sum_all(SchemaId::APRIME, &parts).unwrap();
    let (s, _) = random_scramble(&m, 3, 60);
    let mut d = decompose(&s).unwrap();
    assert!(verify_certificate(&s, &d));
    assert_ne!(s, apply_log(&s, &d.certificate).unwrap());
    // Undoing the whole word lands back on the scrambled matrix.
    let mut tampered = d.certificate.clone();
    tampered.extend(&d.certificate.inverse());
    d.certificate = tampered;
    assert!(!verify_certificate(&s, &d));
}

/// Every state of every small profile decomposes with a valid certificate,
/// and the parts depend only on the orbit.
#[test]
fn parts_are_an_orbit_invariant() {
    for schema in [SchemaId::A0, SchemaId::APRIME, SchemaId::APRIME2, SchemaId::APRIME3, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS] {
        for p in profiles_up_to(schema, 1, 2, 2) {
            let Ok(space) = StateSpace::new(schema, &p, 20_000) else { continue };
            let labels = orbit_labels(&space);
            let mut seen: HashMap<u32, Vec<IndecName>> = HashMap::new();
            let mut by_parts: HashMap<Vec<IndecName>, u32> = HashMap::new();
            for s in 0..space.size() {
                let m = space.decode(s);
                let d = decompose(&m).unwrap();
                assert!(verify_certificate(&m, &d), "{schema} {p}\n{m}");
                let label = labels[s as usize];
                let prev = seen.entry(label).or_insert_with(|| d.parts.clone());
                assert_eq!(*prev, d.parts, "{schema} {p}\n{m}");
                assert_eq!(*by_parts.entry(d.parts).or_insert(label), label, "{schema} {p}");
            }
        }
    }
}

#[test]
fn scrambles_decompose_alike() {
    for schema in [SchemaId::A0, SchemaId::APRIME, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS] {
        let names = catalog_entries(schema, 2, 2);
        for t in 0..20u64 {
            let picks: Vec<BlockMatrix> =
                (0..3).map(|i| matrix_of(&names[((t * 7 + i * 31) as usize) % names.len()]).unwrap()).collect();
            let m = BlockMatrix::direct_sum_all(schema, &picks).unwrap();
            let (s, _) = random_scramble(&m, t, 100);
            let (a, b) = (decompose(&m).unwrap(), decompose(&s).unwrap());
            assert_eq!(a.parts, b.parts, "{schema} trial {t}");
            assert!(verify_certificate(&s, &b));
        }
    }
}

#[test]
fn crt_path_agrees_with_direct_path() {
    let names = catalog_entries(SchemaId::APRIME, 2, 2);
    for t in 0..20u64 {
        let picks: Vec<BlockMatrix> =
            (0..3).map(|i| matrix_of(&names[((t * 11 + i * 53) as usize) % names.len()]).unwrap()).collect();
        let m = BlockMatrix::direct_sum_all(SchemaId::APRIME, &picks).unwrap();
        let (s, _) = random_scramble(&m, t, 80);
        let (two, three) = crt_split(&s).unwrap();
        assert_eq!(crt_merge(&two, &three).unwrap(), s);
        let c = crt_decompose(&s).unwrap();
        assert_eq!(c.parts, decompose(&s).unwrap().parts, "trial {t}");
        assert!(verify_certificate(&s, &c));
    }
}

#[test]
fn schema_mismatch_is_reported() {
    let a = single(SchemaId::APRIME, vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)], &[1]);
    let b = single(SchemaId::A0, vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)], &[1]);
    assert!(matches!(isomorphic(&a, &b), Err(ReduceError::SchemaMismatch(..))));
    assert!(matches!(crt_decompose(&b), Err(ReduceError::NotAprime(_))));
}

use polyform::block_matrix::{BlockMatrix, StripProfile};
use polyform::catalog::{catalog_entries, matrix_of, parse_name};
use polyform::orbit_oracle::same_orbit;
use polyform::reducer::{crt_merge, crt_split, decompose, isomorphic, verify_certificate};
use polyform::schema::{ColStrip, RowStrip, SchemaId};
use polyform::transform_engine::random_scramble;
use proptest::prelude::*;

fn entry(text: &str) -> BlockMatrix {
    matrix_of(&parse_name(text, SchemaId::APRIME).unwrap()).unwrap()
}

/// Two copies of X(5) are equivalent to two copies of X(1): diag(5, 5) has
/// unit determinant, so summands are not determined by the sum.
#[test]
fn witness_of_non_unique_summands() {
    let fives = entry("X(5)").direct_sum(&entry("X(5)")).unwrap();
    let ones = entry("X(1)").direct_sum(&entry("X(1)")).unwrap();
    assert!(same_orbit(&fives, &ones, 1 << 20).unwrap());
    assert!(isomorphic(&fives, &ones).unwrap());
    assert_ne!(entry("X(5)"), entry("X(1)"));
    assert!(!isomorphic(&entry("X(5)"), &entry("X(1)")).unwrap());
}

#[test]
fn direct_sum_unit_and_associativity() {
    let (a, b, c) = (entry("X(3)"), entry("X(eta 3 eta)^1_1"), entry("X(eta_1)"));
    let unit = BlockMatrix::zero(SchemaId::APRIME, StripProfile::empty()).unwrap();
    assert_eq!(a.direct_sum(&unit).unwrap(), a);
    assert_eq!(unit.direct_sum(&a).unwrap(), a);
    let left = a.direct_sum(&b).unwrap().direct_sum(&c).unwrap();
    let right = a.direct_sum(&b.direct_sum(&c).unwrap()).unwrap();
    assert_eq!(left, right);
}

fn sum_of(schema: SchemaId, picks: &[usize]) -> BlockMatrix {
    let names = catalog_entries(schema, 2, 2);
    let mats: Vec<BlockMatrix> = picks.iter().map(|&i| matrix_of(&names[i % names.len()]).unwrap()).collect();
    BlockMatrix::direct_sum_all(schema, &mats).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Decomposition is a function of the equivalence class, with a replayable certificate.
    #[test]
    fn decomposition_is_scramble_invariant(
        schema in prop::sample::select(vec![SchemaId::APRIME, SchemaId::A0, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS]),
        picks in prop::collection::vec(0usize..1000, 1..4),
        seed in any::<u64>(),
    ) {
        let m = sum_of(schema, &picks);
        let (s, _) = random_scramble(&m, seed, 60);
        let (a, b) = (decompose(&m).unwrap(), decompose(&s).unwrap());
        prop_assert_eq!(a.parts, b.parts.clone());
        prop_assert!(verify_certificate(&s, &b));
    }

    /// Splitting into primary parts and merging back is the identity.
    #[test]
    fn primary_split_merge_is_identity(
        sn in 0usize..3, ceta in 0usize..2, moore in 0usize..2,
        s2 in 0usize..2, s3 in 1usize..3,
        seed in any::<u64>(),
    ) {
        let p = StripProfile::new(
            vec![(RowStrip::Sn, sn), (RowStrip::Ceta, ceta), (RowStrip::Moore(1), moore)],
            vec![(ColStrip::S2, s2), (ColStrip::S3, s3)],
        ).unwrap();
        let n = p.num_rows() * p.num_cols();
        let values: Vec<i64> = (0..n as u64).map(|i| (seed.rotate_left(i as u32 * 5) % 24) as i64).collect();
        let m = BlockMatrix::from_integers(SchemaId::APRIME, p, &values).unwrap();
        let (two, three) = crt_split(&m).unwrap();
        prop_assert_eq!(crt_merge(&two, &three).unwrap(), m);
    }
}

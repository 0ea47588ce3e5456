//! Decomposition of a matrix into catalog entries, with a replayable certificate.
//!
//! The pipeline: eliminate the 2-part and the 3-part separately with moves
//! that act on one part only, line the 3-part pivots up with the 2-part
//! blocks, normalize each connected block against an exhaustive orbit
//! table, rewrite pairs of blocks into their least isomorphic form and
//! finally permute everything into the order of the sorted parts.

mod place;
mod signs;
pub(crate) mod table;
mod three;
mod two;
mod work;

use thiserror::Error;

use crate::block_matrix::{BlockMatrix, MatrixError};
use crate::catalog::{matrix_of, IndecName};
use crate::orbit_oracle::OracleError;
use crate::ring_core::{l12_split, l24_split, t4_merge, t8_merge, Modulus, Residue};
use std::collections::HashMap;

use crate::schema::{scale_swap_restricted, CellDomain, ColStrip, RowStrip, SchemaId, SchemaKind, StripId};
use crate::transform_engine::{apply_log, Move, MoveLog, SwapSign};

use table::{direct_sum_of, state_count, TABLE_BOUND};
use signs::{Flip, Signs};
use work::{Part, Work};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("schemas {0} and {1} differ")]
    SchemaMismatch(SchemaId, SchemaId),
    #[error("the CRT pipeline needs schema Aprime, got {0}")]
    NotAprime(SchemaId),
    #[error("block of profile {profile} is too large to normalize ({states} states)")]
    BlockTooLarge { profile: String, states: u128 },
    #[error("internal reduction failure: {0}")]
    Internal(String),
}

impl From<OracleError> for ReduceError {
    fn from(e: OracleError) -> Self {
        ReduceError::Internal(e.to_string())
    }
}

/// A matrix written as a direct sum of catalog entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Summands in the order in which the certificate lays them out.
    pub parts: Vec<IndecName>,
    pub certificate: MoveLog,
    /// Whether replaying the certificate was checked to give the direct sum.
    pub residual_check: bool,
}

/// A catalog entry sitting on given global lines, in normal form.
#[derive(Debug, Clone)]
struct Piece {
    name: IndecName,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// Largest pair of blocks whose joint orbit table is consulted.
const PAIR_BOUND: u128 = 300_000;

/// Splits `rows` and `cols` among `names` in direct-sum order.
fn layout(w: &Work, names: &[IndecName], rows: &[usize], cols: &[usize]) -> Vec<Piece> {
    let mut rows = rows.to_vec();
    let mut cols = cols.to_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    let mut row_used = vec![false; rows.len()];
    let mut col_used = vec![false; cols.len()];
    let mut out = Vec::new();
    for &name in names {
        let m = matrix_of(&name).expect("catalog entry");
        let mut pr = Vec::new();
        for &(strip, d) in m.profile().rows() {
            for _ in 0..d {
                let k = (0..rows.len()).find(|&k| !row_used[k] && w.rows[rows[k]] == strip).expect("row available");
                row_used[k] = true;
                pr.push(rows[k]);
            }
        }
        let mut pc = Vec::new();
        for &(strip, d) in m.profile().cols() {
            for _ in 0..d {
                let k = (0..cols.len()).find(|&k| !col_used[k] && w.cols[cols[k]] == strip).expect("col available");
                col_used[k] = true;
                pc.push(cols[k]);
            }
        }
        out.push(Piece { name, rows: pr, cols: pc });
    }
    out
}

/// Brings the submatrix on the given lines to its table representative.
fn normalize_lines(w: &mut Work, rows: &[usize], cols: &[usize]) -> Result<Vec<Piece>, ReduceError> {
    let mut rows = rows.to_vec();
    let mut cols = cols.to_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    let sub = w.m.submatrix(&rows, &cols);
    let states = state_count(w.schema(), sub.profile());
    if states > TABLE_BOUND as u128 {
        return Err(ReduceError::BlockTooLarge { profile: sub.profile().to_string(), states });
    }
    let t = table::table(w.schema(), sub.profile())?;
    let (moves, names) = t
        .normalize(&sub)
        .ok_or_else(|| ReduceError::Internal(format!("block outside every catalog orbit:\n{sub}")))?;
    let names = names.to_vec();
    for mv in moves {
        let g = w.globalize(mv, &rows, &cols);
        w.apply(g);
    }
    Ok(layout(w, &names, &rows, &cols))
}

/// Connected components of the support, each as (rows, cols).
fn components(w: &Work) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (nr, nc) = (w.nrows(), w.ncols());
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..nr {
        for c in 0..nc {
            if w.get(r, c) != 0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, nr + c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for x in 0..nr + nc {
        let root = find(&mut parent, x);
        let e = groups.entry(root).or_default();
        if x < nr {
            e.0.push(x);
        } else {
            e.1.push(x - nr);
        }
    }
    groups.into_values().collect()
}

fn is_mixed(schema: SchemaId) -> bool {
    matches!(schema.kind(), SchemaKind::A0 | SchemaKind::Aprime)
}

fn has_two_part(schema: SchemaId) -> bool {
    schema.kind() != SchemaKind::Aprime3
}

fn has_three_part(schema: SchemaId) -> bool {
    schema.kind() != SchemaKind::Aprime2
}

/// Rewrites pairs of pieces into the least decomposition of their joint orbit.
fn canonicalize(w: &mut Work, pieces: &mut Vec<Piece>) -> Result<(), ReduceError> {
    let schema = w.schema();
    loop {
        pieces.sort_by(|a, b| a.name.cmp(&b.name).then(a.rows.cmp(&b.rows)).then(a.cols.cmp(&b.cols)));
        let mut rewrite = None;
        'pairs: for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                let rows: Vec<usize> = pieces[i].rows.iter().chain(&pieces[j].rows).copied().collect();
                let cols: Vec<usize> = pieces[i].cols.iter().chain(&pieces[j].cols).copied().collect();
                let mut sr = rows.clone();
                let mut sc = cols.clone();
                sr.sort_unstable();
                sc.sort_unstable();
                let sub = w.m.submatrix(&sr, &sc);
                if state_count(schema, sub.profile()) > PAIR_BOUND {
                    continue;
                }
                let t = table::table(schema, sub.profile())?;
                let Some(orbit) = t.orbit_of(&sub) else { continue };
                let best = &t.orbit(orbit).decompositions[0];
                let mut current = vec![pieces[i].name, pieces[j].name];
                current.sort();
                if sorted(best) < current {
                    rewrite = Some((i, j, sr, sc));
                    break 'pairs;
                }
            }
        }
        let Some((i, j, rows, cols)) = rewrite else { return Ok(()) };
        let fresh = normalize_lines(w, &rows, &cols)?;
        pieces.remove(j);
        pieces.remove(i);
        pieces.extend(fresh);
    }
}

fn sorted(v: &[IndecName]) -> Vec<IndecName> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Permutes lines so that the pieces appear in sorted direct-sum order.
fn arrange(w: &mut Work, pieces: &mut [Piece]) -> Result<(), ReduceError> {
    pieces.sort_by(|a, b| a.name.cmp(&b.name).then(a.rows.cmp(&b.rows)).then(a.cols.cmp(&b.cols)));
    let (nr, nc) = (w.nrows(), w.ncols());
    let mut row_target = vec![usize::MAX; nr];
    let mut col_target = vec![usize::MAX; nc];
    let mut next_row: HashMap<RowStrip, usize> = HashMap::new();
    let mut next_col: HashMap<ColStrip, usize> = HashMap::new();
    for p in pieces.iter() {
        for &r in &p.rows {
            let s = w.rows[r];
            let k = next_row.entry(s).or_insert(0);
            row_target[r] = w.row_index(s, *k);
            *k += 1;
        }
        for &c in &p.cols {
            let s = w.cols[c];
            let k = next_col.entry(s).or_insert(0);
            col_target[c] = w.col_index(s, *k);
            *k += 1;
        }
    }
    if row_target.contains(&usize::MAX) || col_target.contains(&usize::MAX) {
        return Err(ReduceError::Internal("pieces do not cover every line".into()));
    }
    permute(w, &row_target, true);
    permute(w, &col_target, false);
    for p in pieces.iter_mut() {
        p.rows = p.rows.iter().map(|&r| row_target[r]).collect();
        p.cols = p.cols.iter().map(|&c| col_target[c]).collect();
    }
    Ok(())
}

/// Moves line `x` to `target[x]` by plain swaps within strips.
fn permute(w: &mut Work, target: &[usize], rows: bool) {
    let n = target.len();
    let mut content: Vec<usize> = (0..n).collect();
    let mut where_is: Vec<usize> = (0..n).collect();
    let mut want = vec![0; n];
    for (line, &t) in target.iter().enumerate() {
        want[t] = line;
    }
    for pos in 0..n {
        let cur = where_is[want[pos]];
        if cur == pos {
            continue;
        }
        let (a, b) = (pos.min(cur), pos.max(cur));
        let mv = if rows {
            let s = w.rows[a];
            let off = w.row_index(s, 0);
            Move::RowSwap { strip: s, i: a - off, j: b - off, sign: SwapSign::Plain }
        } else {
            let s = w.cols[a];
            let off = w.col_index(s, 0);
            Move::ColSwap { strip: s, i: a - off, j: b - off, sign: SwapSign::Plain }
        };
        w.apply(mv);
        let (ca, cb) = (content[a], content[b]);
        content.swap(a, b);
        where_is[cb] = a;
        where_is[ca] = b;
    }
}

/// Lines the 3-part pivots up with the 2-part blocks, then cuts into connected blocks.
fn pieces_of(w: &mut Work) -> Result<Vec<Piece>, ReduceError> {
    let schema = w.schema();
    let blocks = if has_two_part(schema) { two::reduce2(w) } else { Vec::new() };
    if !two::supported_by(w, &blocks) {
        return Err(ReduceError::Internal("2-part reduction left entries outside its blocks".into()));
    }
    let pivots = if has_three_part(schema) { three::reduce3(w) } else { Vec::new() };
    if is_mixed(schema) {
        place::place(w, &blocks, &pivots);
    }
    let mut pieces = Vec::new();
    for (rows, cols) in components(w) {
        pieces.extend(normalize_lines(w, &rows, &cols)?);
    }
    Ok(pieces)
}

/// Reduces, normalizes blocks, canonicalizes pairs and arranges; for schemas whose moves include every sign change.
fn finish(w: &mut Work) -> Result<Vec<IndecName>, ReduceError> {
    let mut pieces = pieces_of(w)?;
    canonicalize(w, &mut pieces)?;
    arrange(w, &mut pieces)?;
    Ok(pieces.iter().map(|p| p.name).collect())
}

/// Strips whose lines the 2-part and the 3-part share.
const MIXED: [StripId; 3] = [StripId::Row(RowStrip::Sn), StripId::Row(RowStrip::Ceta), StripId::Col(ColStrip::S3)];

fn carries(strip: StripId, part: Part) -> bool {
    match strip {
        StripId::Row(RowStrip::Moore(_)) | StripId::Col(ColStrip::Moore(_)) => part == Part::Three,
        StripId::Row(RowStrip::Sn1 | RowStrip::Sn2) | StripId::Col(ColStrip::S2) => part == Part::Two,
        _ => true,
    }
}

fn scale(strip: StripId, i: usize) -> Move {
    match strip {
        StripId::Row(strip) => Move::RowScale { strip, i },
        StripId::Col(strip) => Move::ColScale { strip, i },
    }
}

/// Removes what signs it can from a mixed work matrix tracked as
/// `merge(D2·Y2, D3·Y3)`: full-line scalings clear `D2` and the pure 3-strips
/// of `D3`, signed swaps leave at most line 0 of each shared strip negated in `D3`.
fn settle_mixed(w: &mut Work, s2: &mut Signs, s3: &mut Signs) {
    let p = w.m.profile().clone();
    for strip in signs::strips_of(&p) {
        if !carries(strip, Part::Two) {
            s2.clear(&p, strip);
        }
        if !carries(strip, Part::Three) {
            s3.clear(&p, strip);
        }
        for i in s2.negated(&p, strip) {
            w.apply(scale(strip, i));
            s2.clear(&p, strip);
            if carries(strip, Part::Three) {
                let mut one = Signs::new(&p);
                match strip {
                    StripId::Row(s) => one.rows[p.row_offset(s) + i] = true,
                    StripId::Col(s) => one.cols[p.col_offset(s) + i] = true,
                }
                for (x, y) in s3.rows.iter_mut().zip(&one.rows).chain(s3.cols.iter_mut().zip(&one.cols)) {
                    *x ^= *y;
                }
            }
        }
        if !MIXED.contains(&strip) {
            for i in s3.negated(&p, strip) {
                w.apply(scale(strip, i));
            }
            s3.clear(&p, strip);
        }
    }
    for strip in MIXED {
        signs::settle(&p, s3, strip, &mut |mv| lift_move(w, mv, Part::Three));
    }
}

/// Brings a matrix of a mixed schema to the canonical member of its orbit,
/// built from the canonical forms of its two primary parts, then decomposes it.
///
/// The 2-part and 3-part reductions are replayed with sign-free moves, so
/// only the parities of line negations on the shared strips are left over.
/// Those are reduced modulo the parities of automorphisms of either part.
fn decompose_mixed(m: &BlockMatrix) -> Result<Decomposition, ReduceError> {
    let (m2, m3) = split_parts(m, false)?;
    let d2 = decompose(&m2)?;
    let d3 = decompose(&m3)?;
    let p = m.profile().clone();
    let mut w = Work::new(m);
    let mut s2 = Signs::new(&p);
    let mut s3 = Signs::new(&p);
    for mv in &d2.certificate.moves {
        signs::emulate(&p, &mut s2, *mv, &mut |x| lift_move(&mut w, x, Part::Two));
    }
    for mv in &d3.certificate.moves {
        signs::emulate(&p, &mut s3, *mv, &mut |x| lift_move(&mut w, x, Part::Three));
    }
    settle_mixed(&mut w, &mut s2, &mut s3);
    let flips2 = signs::flips(m2.schema(), &p, &d2.parts, &MIXED);
    let flips3 = signs::flips(m3.schema(), &p, &d3.parts, &MIXED);
    let all: Vec<(Part, &Flip)> =
        flips2.iter().map(|f| (Part::Two, f)).chain(flips3.iter().map(|f| (Part::Three, f))).collect();
    let owned: Vec<Flip> = all.iter().map(|(_, f)| (*f).clone()).collect();
    let (target, used) = signs::reduce_bits(s3.parity(&p, &MIXED), &owned);
    for t in used {
        let (part, f) = all[t];
        let s = if part == Part::Two { &mut s2 } else { &mut s3 };
        for mv in &f.word {
            signs::emulate(&p, s, *mv, &mut |x| lift_move(&mut w, x, part));
        }
        settle_mixed(&mut w, &mut s2, &mut s3);
    }
    if s3.parity(&p, &MIXED) != target {
        return Err(ReduceError::Internal("sign reduction missed its target".into()));
    }
    let parts = finish(&mut w)?;
    Ok(Decomposition { parts, certificate: w.log, residual_check: false })
}

/// Canonical form under a group without scalings: the canonical form under
/// the full group with as few negated lines as the automorphisms allow.
fn decompose_plus(m: &BlockMatrix) -> Result<Decomposition, ReduceError> {
    let schema = m.schema();
    let base = schema.with_plus(false).expect("every schema has a full group");
    let d0 = decompose(&m.map_schema(base, |v, _, _| v)?)?;
    let p = m.profile().clone();
    let tracked: Vec<StripId> =
        signs::strips_of(&p).into_iter().filter(|&s| scale_swap_restricted(schema, s)).collect();
    let mut w = Work::new(m);
    let mut d = Signs::new(&p);
    let settle_all = |w: &mut Work, d: &mut Signs| {
        for strip in signs::strips_of(&p) {
            if tracked.contains(&strip) {
                signs::settle(&p, d, strip, &mut |mv| w.apply(mv));
            } else {
                for i in d.negated(&p, strip) {
                    w.apply(scale(strip, i));
                }
                d.clear(&p, strip);
            }
        }
    };
    for mv in &d0.certificate.moves {
        signs::emulate(&p, &mut d, *mv, &mut |x| w.apply(x));
    }
    settle_all(&mut w, &mut d);
    let flips = signs::flips(base, &p, &d0.parts, &tracked);
    let (target, used) = signs::reduce_bits(d.parity(&p, &tracked), &flips);
    for t in used {
        for mv in &flips[t].word {
            signs::emulate(&p, &mut d, *mv, &mut |x| w.apply(x));
        }
        settle_all(&mut w, &mut d);
    }
    if d.parity(&p, &tracked) != target {
        return Err(ReduceError::Internal("sign reduction missed its target".into()));
    }
    let mut parts = Vec::with_capacity(d0.parts.len());
    for (name, (rows, cols)) in d0.parts.iter().zip(signs::part_lines(&p, &d0.parts)) {
        let fresh = normalize_lines(&mut w, &rows, &cols)?;
        match fresh.as_slice() {
            [one] => parts.push(one.name),
            _ => return Err(ReduceError::Internal(format!("a negated {name} split"))),
        }
    }
    Ok(Decomposition { parts, certificate: w.log, residual_check: false })
}

/// Decomposes `m` into catalog entries, returning a certificate whose
/// replay turns `m` into the direct sum of the parts.
///
/// The parts depend only on the orbit of `m`. Where sums of catalog entries
/// are isomorphic in several ways the parts are one fixed choice among them.
pub fn decompose(m: &BlockMatrix) -> Result<Decomposition, ReduceError> {
    m.validate()?;
    let schema = m.schema();
    let mut d = if schema.plus() {
        decompose_plus(m)?
    } else if is_mixed(schema) {
        decompose_mixed(m)?
    } else {
        let mut w = Work::new(m);
        let parts = finish(&mut w)?;
        Decomposition { parts, certificate: w.log, residual_check: false }
    };
    let out = apply_log(m, &d.certificate).map_err(|e| ReduceError::Internal(e.to_string()))?;
    if out != direct_sum_of(schema, &d.parts) {
        return Err(ReduceError::Internal(format!("certificate does not reach the direct sum of {:?}", d.parts)));
    }
    d.residual_check = true;
    Ok(d)
}

/// Compares two decompositions' parts; the order matters only where direct
/// sums fail to commute.
pub fn isomorphic(a: &BlockMatrix, b: &BlockMatrix) -> Result<bool, ReduceError> {
    if a.schema() != b.schema() {
        return Err(ReduceError::SchemaMismatch(a.schema(), b.schema()));
    }
    if a.profile() != b.profile() {
        return Ok(false);
    }
    Ok(decompose(a)?.parts == decompose(b)?.parts)
}

/// Replays the certificate and compares with the direct sum of the parts.
pub fn verify_certificate(m: &BlockMatrix, d: &Decomposition) -> bool {
    let Ok(out) = apply_log(m, &d.certificate) else { return false };
    let mats: Result<Vec<BlockMatrix>, _> = d.parts.iter().map(matrix_of).collect();
    let Ok(mats) = mats else { return false };
    match BlockMatrix::direct_sum_all(m.schema(), &mats) {
        Ok(sum) => sum == out,
        Err(_) => false,
    }
}

/// Splits an Aprime matrix into its 2-part (Aprime2+) and 3-part (Aprime3+).
pub fn crt_split(m: &BlockMatrix) -> Result<(BlockMatrix, BlockMatrix), ReduceError> {
    if m.schema() != SchemaId::APRIME {
        return Err(ReduceError::NotAprime(m.schema()));
    }
    split_parts(m, true)
}

/// Primary parts of a mixed matrix, under the sign-restricted groups if `plus`.
fn split_parts(m: &BlockMatrix, plus: bool) -> Result<(BlockMatrix, BlockMatrix), ReduceError> {
    let part = |keep_two: bool| {
        move |v: u32, old: CellDomain, _new: CellDomain| -> u32 {
            let Some(md) = old.modulus() else { return 0 };
            let x = Residue::new(v as i64, md);
            let split = match md.get() {
                24 => l24_split(x).ok(),
                12 => l12_split(x).ok(),
                _ => None,
            };
            match (split, md.get(), keep_two) {
                (Some((a, _)), _, true) => a.value(),
                (Some((_, b)), _, false) => b.value(),
                (None, 2, true) | (None, 3, false) => v,
                _ => 0,
            }
        }
    };
    let (s2, s3) = if plus {
        (SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS)
    } else {
        (SchemaId::APRIME2, SchemaId::APRIME3)
    };
    let two = m.map_schema(s2, part(true))?;
    let three = m.map_schema(s3, part(false))?;
    Ok((two, three))
}

/// Entrywise merge of a 2-part and a 3-part into an Aprime matrix.
pub fn crt_merge(two: &BlockMatrix, three: &BlockMatrix) -> Result<BlockMatrix, ReduceError> {
    if two.profile() != three.profile() {
        return Err(ReduceError::Internal("parts have different profiles".into()));
    }
    let mut out = BlockMatrix::zero(SchemaId::APRIME, two.profile().clone())?;
    for r in 0..out.num_rows() {
        for c in 0..out.num_cols() {
            let (a, b) = (two.get(r, c) as i64, three.get(r, c) as i64);
            let v = match out.domain(r, c).modulus().map(Modulus::get) {
                Some(24) => t8_merge(Residue::new(a, Modulus::EIGHT), Residue::new(b, Modulus::THREE))
                    .map_err(|e| ReduceError::Internal(e.to_string()))?
                    .value() as i64,
                Some(12) => t4_merge(Residue::new(a, Modulus::FOUR), Residue::new(b, Modulus::THREE))
                    .map_err(|e| ReduceError::Internal(e.to_string()))?
                    .value() as i64,
                Some(2) => a,
                Some(3) => b,
                _ => 0,
            };
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// Lifts a move of the 2-part or 3-part problem to Aprime moves acting on that part only.
fn lift_move(w: &mut Work, mv: Move, part: Part) {
    let touches = |strip: StripId| match part {
        Part::Two => !matches!(strip, StripId::Row(RowStrip::Moore(_)) | StripId::Col(ColStrip::Moore(_))),
        Part::Three => !matches!(
            strip,
            StripId::Row(RowStrip::Sn1 | RowStrip::Sn2) | StripId::Col(ColStrip::S2)
        ),
    };
    let mixed_strip = |strip: StripId| {
        matches!(strip, StripId::Row(RowStrip::Sn | RowStrip::Ceta) | StripId::Col(ColStrip::S3))
    };
    match mv {
        Move::RowAdd { src, i, dst, j, k } => {
            let (a, b) = (w.row_index(src, i), w.row_index(dst, j));
            w.row_add(a, b, k, part);
        }
        Move::ColAdd { src, i, dst, j, k } => {
            let (a, b) = (w.col_index(src, i), w.col_index(dst, j));
            w.col_add(a, b, k, part);
        }
        Move::RowScale { strip, .. } | Move::RowSwap { strip, .. } if !touches(StripId::Row(strip)) => {}
        Move::ColScale { strip, .. } | Move::ColSwap { strip, .. } if !touches(StripId::Col(strip)) => {}
        Move::RowSwap { strip, i, j, sign } if mixed_strip(StripId::Row(strip)) => {
            let (a, b) = (w.row_index(strip, i), w.row_index(strip, j));
            shear_swap(w, a, b, sign, part, true);
        }
        Move::ColSwap { strip, i, j, sign } if mixed_strip(StripId::Col(strip)) => {
            let (a, b) = (w.col_index(strip, i), w.col_index(strip, j));
            shear_swap(w, a, b, sign, part, false);
        }
        other => w.apply(other),
    }
}

/// Signed swap of lines `a`, `b` as three shears acting on `part` only.
fn shear_swap(w: &mut Work, a: usize, b: usize, sign: SwapSign, part: Part, rows: bool) {
    let add = |w: &mut Work, s: usize, d: usize, k: i64| {
        if rows {
            w.row_add(s, d, k, part)
        } else {
            w.col_add(s, d, k, part)
        }
    };
    match sign {
        // (a, b) -> (b, -a)
        SwapSign::NegSecond => {
            add(w, b, a, 1);
            add(w, a, b, -1);
            add(w, b, a, 1);
        }
        SwapSign::NegFirst => {
            add(w, b, a, -1);
            add(w, a, b, 1);
            add(w, b, a, -1);
        }
        SwapSign::Plain => unreachable!("plain swaps are not lifted on mixed strips"),
    }
}

/// Reduces the 2-part and the 3-part separately under the sign-restricted
/// groups, merges the two normal forms and finishes under the full group.
pub fn crt_decompose(m: &BlockMatrix) -> Result<Decomposition, ReduceError> {
    m.validate()?;
    let (two, three) = crt_split(m)?;
    let d2 = decompose(&two)?;
    let d3 = decompose(&three)?;
    let mut w = Work::new(m);
    for mv in d2.certificate.moves.iter() {
        lift_move(&mut w, *mv, Part::Two);
    }
    for mv in d3.certificate.moves.iter() {
        lift_move(&mut w, *mv, Part::Three);
    }
    let merged = crt_merge(&direct_sum_of(two.schema(), &d2.parts), &direct_sum_of(three.schema(), &d3.parts))?;
    if w.m != merged {
        return Err(ReduceError::Internal("lifted certificates do not reach the merged normal forms".into()));
    }
    let rest = decompose(&merged)?;
    let mut certificate = w.log;
    certificate.extend(&rest.certificate);
    Ok(Decomposition { parts: rest.parts, certificate, residual_check: rest.residual_check })
}

#[cfg(test)]
mod tests;

//! Emulation of a group by its subgroup without line negations.
//!
//! Every move of a schema with scalings and plain swaps can be written as a
//! move of the restricted group followed by negating some lines. The work
//! matrix is therefore kept as `D·Y`, where `Y` is the matrix the original
//! moves act on and `D` negates a set of rows and columns. The parity of
//! `D` on each strip is what the restricted group cannot remove, up to the
//! parities realized by automorphisms of the target.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::block_matrix::{BlockMatrix, StripProfile};
use crate::catalog::{matrix_of, IndecName};
use crate::orbit_oracle::StateSpace;
use crate::schema::{SchemaId, StripId};
use crate::transform_engine::{compile, move_templates, Move, SwapSign};

use super::table::direct_sum_of;

/// Negated lines of the work matrix relative to the tracked matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Signs {
    pub rows: Vec<bool>,
    pub cols: Vec<bool>,
}

impl Signs {
    pub fn new(p: &StripProfile) -> Self {
        Signs { rows: vec![false; p.num_rows()], cols: vec![false; p.num_cols()] }
    }

    fn line(&mut self, p: &StripProfile, strip: StripId, i: usize) -> &mut bool {
        match strip {
            StripId::Row(s) => &mut self.rows[p.row_offset(s) + i],
            StripId::Col(s) => &mut self.cols[p.col_offset(s) + i],
        }
    }

    /// Indices within `strip` of the negated lines.
    pub fn negated(&self, p: &StripProfile, strip: StripId) -> Vec<usize> {
        let (v, off, dim) = match strip {
            StripId::Row(s) => (&self.rows, p.row_offset(s), p.row_dim(s)),
            StripId::Col(s) => (&self.cols, p.col_offset(s), p.col_dim(s)),
        };
        (0..dim).filter(|&i| v[off + i]).collect()
    }

    /// Forgets the signs of every line in `strip`.
    pub fn clear(&mut self, p: &StripProfile, strip: StripId) {
        for i in self.negated(p, strip) {
            *self.line(p, strip, i) = false;
        }
    }

    /// Bit `t` is the parity of negated lines in `tracked[t]`.
    pub fn parity(&self, p: &StripProfile, tracked: &[StripId]) -> u32 {
        tracked
            .iter()
            .enumerate()
            .filter(|(_, &s)| self.negated(p, s).len() % 2 == 1)
            .fold(0, |acc, (t, _)| acc | 1 << t)
    }
}

/// Strips of the profile, rows first.
pub(crate) fn strips_of(p: &StripProfile) -> Vec<StripId> {
    p.rows().iter().map(|&(s, _)| StripId::Row(s)).chain(p.cols().iter().map(|&(s, _)| StripId::Col(s))).collect()
}

/// Parities a single move changes among the tracked strips.
pub(crate) fn move_bits(mv: &Move, tracked: &[StripId]) -> u32 {
    let strip = match *mv {
        Move::RowScale { strip, .. } | Move::RowSwap { strip, sign: SwapSign::Plain, .. } => StripId::Row(strip),
        Move::ColScale { strip, .. } | Move::ColSwap { strip, sign: SwapSign::Plain, .. } => StripId::Col(strip),
        _ => return 0,
    };
    tracked.iter().position(|&s| s == strip).map_or(0, |t| 1 << t)
}

fn signed_swap(strip: StripId, i: usize, j: usize) -> Move {
    match strip {
        StripId::Row(strip) => Move::RowSwap { strip, i, j, sign: SwapSign::NegSecond },
        StripId::Col(strip) => Move::ColSwap { strip, i, j, sign: SwapSign::NegSecond },
    }
}

/// Rewrites `mv`, meant for `Y`, as sign-free moves on `D·Y` and updates `D`.
pub(crate) fn emulate(p: &StripProfile, d: &mut Signs, mv: Move, emit: &mut impl FnMut(Move)) {
    match mv {
        Move::RowAdd { src, i, dst, j, k } => {
            let flip = d.rows[p.row_offset(src) + i] != d.rows[p.row_offset(dst) + j];
            emit(Move::RowAdd { src, i, dst, j, k: if flip { -k } else { k } });
        }
        Move::ColAdd { src, i, dst, j, k } => {
            let flip = d.cols[p.col_offset(src) + i] != d.cols[p.col_offset(dst) + j];
            emit(Move::ColAdd { src, i, dst, j, k: if flip { -k } else { k } });
        }
        Move::RowScale { strip, i } => {
            let x = d.line(p, StripId::Row(strip), i);
            *x = !*x;
        }
        Move::ColScale { strip, i } => {
            let x = d.line(p, StripId::Col(strip), i);
            *x = !*x;
        }
        Move::RowSwap { strip, i, j, sign } => swap(p, d, StripId::Row(strip), i, j, sign, emit),
        Move::ColSwap { strip, i, j, sign } => swap(p, d, StripId::Col(strip), i, j, sign, emit),
    }
}

/// `Y` swaps as `(a, b) -> (s_a b, s_b a)`; the work matrix takes a
/// negating swap and `D` absorbs the difference.
fn swap(p: &StripProfile, d: &mut Signs, strip: StripId, i: usize, j: usize, sign: SwapSign, emit: &mut impl FnMut(Move)) {
    let (neg_a, neg_b) = match sign {
        SwapSign::Plain => (false, false),
        SwapSign::NegSecond => (false, true),
        SwapSign::NegFirst => (true, false),
    };
    let da = *d.line(p, strip, i);
    let db = *d.line(p, strip, j);
    *d.line(p, strip, i) = db ^ neg_a;
    *d.line(p, strip, j) = !(da ^ neg_b);
    emit(signed_swap(strip, i, j));
}

/// Negates lines `i` and `j` of the work matrix by two signed swaps.
pub(crate) fn negate_pair(p: &StripProfile, d: &mut Signs, strip: StripId, i: usize, j: usize, emit: &mut impl FnMut(Move)) {
    let (a, b) = (i.min(j), i.max(j));
    emit(signed_swap(strip, a, b));
    emit(signed_swap(strip, a, b));
    for x in [a, b] {
        let l = d.line(p, strip, x);
        *l = !*l;
    }
}

/// Cancels negations in pairs so that at most line 0 of the strip stays negated.
pub(crate) fn settle(p: &StripProfile, d: &mut Signs, strip: StripId, emit: &mut impl FnMut(Move)) {
    let mut neg = d.negated(p, strip);
    while neg.len() >= 2 {
        let (a, b) = (neg[neg.len() - 2], neg[neg.len() - 1]);
        negate_pair(p, d, strip, a, b, emit);
        neg.truncate(neg.len() - 2);
    }
    if let Some(&x) = neg.first() {
        if x != 0 {
            negate_pair(p, d, strip, 0, x, emit);
        }
    }
}

/// An automorphism of a direct sum: a word fixing it whose strip parities are `bits`.
#[derive(Debug, Clone)]
pub(crate) struct Flip {
    pub bits: u32,
    pub word: Vec<Move>,
}

/// Largest (state, parity) graph explored for the automorphisms of a pair.
const FLIP_SEARCH_BOUND: usize = 2_000_000;

type FlipKey = (SchemaId, Vec<IndecName>, Vec<StripId>);

fn flip_cache() -> &'static Mutex<HashMap<FlipKey, Arc<Vec<Flip>>>> {
    static CACHE: OnceLock<Mutex<HashMap<FlipKey, Arc<Vec<Flip>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Adds `bits` to the basis in `span`; false if already spanned.
fn extend_span(span: &mut Vec<u32>, bits: u32) -> bool {
    let mut x = bits;
    for &b in span.iter() {
        x = x.min(x ^ b);
    }
    if x == 0 {
        return false;
    }
    span.push(x);
    span.sort_unstable_by(|a, b| b.cmp(a));
    true
}

/// Parities of the automorphisms of `direct_sum(names)`, each with a word
/// realizing it, found by a breadth-first search on (matrix, parity).
fn local_flips(schema: SchemaId, names: &[IndecName], tracked: &[StripId]) -> Arc<Vec<Flip>> {
    let key = (schema, names.to_vec(), tracked.to_vec());
    if let Some(hit) = flip_cache().lock().expect("flip cache poisoned").get(&key) {
        return hit.clone();
    }
    let c = direct_sum_of(schema, names);
    let flips = Arc::new(search_flips(&c, tracked));
    flip_cache().lock().expect("flip cache poisoned").insert(key, flips.clone());
    flips
}

fn search_flips(c: &BlockMatrix, tracked: &[StripId]) -> Vec<Flip> {
    let schema = c.schema();
    let p = c.profile();
    let present: u32 = tracked
        .iter()
        .enumerate()
        .filter(|(_, s)| strips_of(p).contains(s))
        .fold(0, |acc, (t, _)| acc | 1 << t);
    let Ok(space) = StateSpace::new(schema, p, u64::MAX) else { return Vec::new() };
    let gens = space.generator_moves();
    // Moves acting trivially only change parities.
    let trivial: Vec<Move> = move_templates(schema, p)
        .into_iter()
        .filter(|mv| compile(schema, p, mv).is_ok_and(|op| op.is_identity()) && move_bits(mv, tracked) != 0)
        .collect();
    let start = space.encode(c);
    let mut parent: HashMap<(u64, u32), (u64, u32, Move)> = HashMap::new();
    let mut queue = VecDeque::from([(start, 0u32)]);
    parent.insert((start, 0), (start, 0, Move::RowScale { strip: crate::schema::RowStrip::Sn, i: 0 }));
    let mut span = Vec::new();
    let mut out = Vec::new();
    let path = |parent: &HashMap<(u64, u32), (u64, u32, Move)>, mut node: (u64, u32)| {
        let mut word = Vec::new();
        while node != (start, 0) {
            let (s, b, mv) = parent[&node];
            word.push(mv);
            node = (s, b);
        }
        word.reverse();
        word
    };
    while let Some((s, b)) = queue.pop_front() {
        if s == start && b != 0 && extend_span(&mut span, b) {
            out.push(Flip { bits: b, word: path(&parent, (s, b)) });
            if span.len() == present.count_ones() as usize {
                break;
            }
        }
        if parent.len() > FLIP_SEARCH_BOUND {
            break;
        }
        let next = (0..gens.len())
            .map(|g| (space.step(s, g), b ^ move_bits(&gens[g], tracked), gens[g]))
            .chain(trivial.iter().map(|mv| (s, b ^ move_bits(mv, tracked), *mv)));
        for (t, tb, mv) in next {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((t, tb)) {
                e.insert((s, b, mv));
                queue.push_back((t, tb));
            }
        }
    }
    out
}

/// Global lines of each part of a direct sum laid out in order.
pub(crate) fn part_lines(p: &StripProfile, names: &[IndecName]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut next_row: HashMap<crate::schema::RowStrip, usize> = HashMap::new();
    let mut next_col: HashMap<crate::schema::ColStrip, usize> = HashMap::new();
    names
        .iter()
        .map(|n| {
            let m = matrix_of(n).expect("catalog entry");
            let mut rows = Vec::new();
            for &(s, d) in m.profile().rows() {
                let k = next_row.entry(s).or_insert(0);
                rows.extend((0..d).map(|x| p.row_offset(s) + *k + x));
                *k += d;
            }
            let mut cols = Vec::new();
            for &(s, d) in m.profile().cols() {
                let k = next_col.entry(s).or_insert(0);
                cols.extend((0..d).map(|x| p.col_offset(s) + *k + x));
                *k += d;
            }
            (rows, cols)
        })
        .collect()
}

/// Maps a move on the submatrix on sorted global `rows` and `cols` to the whole matrix.
fn globalize(p: &StripProfile, mv: Move, rows: &[usize], cols: &[usize]) -> Move {
    let grow = |s: crate::schema::RowStrip, i: usize| {
        let off = p.row_offset(s);
        rows.iter().filter(|&&r| r >= off && r < off + p.row_dim(s)).nth(i).expect("local row") - off
    };
    let gcol = |s: crate::schema::ColStrip, i: usize| {
        let off = p.col_offset(s);
        cols.iter().filter(|&&c| c >= off && c < off + p.col_dim(s)).nth(i).expect("local col") - off
    };
    match mv {
        Move::RowAdd { src, i, dst, j, k } => Move::RowAdd { src, i: grow(src, i), dst, j: grow(dst, j), k },
        Move::ColAdd { src, i, dst, j, k } => Move::ColAdd { src, i: gcol(src, i), dst, j: gcol(dst, j), k },
        Move::RowScale { strip, i } => Move::RowScale { strip, i: grow(strip, i) },
        Move::ColScale { strip, i } => Move::ColScale { strip, i: gcol(strip, i) },
        Move::RowSwap { strip, i, j, sign } => Move::RowSwap { strip, i: grow(strip, i), j: grow(strip, j), sign },
        Move::ColSwap { strip, i, j, sign } => Move::ColSwap { strip, i: gcol(strip, i), j: gcol(strip, j), sign },
    }
}

/// Automorphisms of the direct sum of `names` (laid out on profile `p`)
/// whose parities span those of all automorphisms supported on at most two parts.
pub(crate) fn flips(schema: SchemaId, p: &StripProfile, names: &[IndecName], tracked: &[StripId]) -> Vec<Flip> {
    let lines = part_lines(p, names);
    let mut span = Vec::new();
    let mut out = Vec::new();
    let full = tracked.len();
    for i in 0..names.len() {
        for j in i..names.len() {
            if span.len() == full {
                return out;
            }
            let (pair, rows, cols) = if i == j {
                (vec![names[i]], lines[i].0.clone(), lines[i].1.clone())
            } else {
                let mut rows: Vec<usize> = lines[i].0.iter().chain(&lines[j].0).copied().collect();
                let mut cols: Vec<usize> = lines[i].1.iter().chain(&lines[j].1).copied().collect();
                rows.sort_unstable();
                cols.sort_unstable();
                (vec![names[i], names[j]], rows, cols)
            };
            for f in local_flips(schema, &pair, tracked).iter() {
                if extend_span(&mut span, f.bits) {
                    let word = f.word.iter().map(|&mv| globalize(p, mv, &rows, &cols)).collect();
                    out.push(Flip { bits: f.bits, word });
                }
            }
        }
    }
    out
}

/// The least element of `bits + span(flips)`, with the flips that reach it.
pub(crate) fn reduce_bits(bits: u32, flips: &[Flip]) -> (u32, Vec<usize>) {
    let mut best = (bits, Vec::new());
    for mask in 0u32..1 << flips.len() {
        let mut x = bits;
        let mut used = Vec::new();
        for (t, f) in flips.iter().enumerate() {
            if mask >> t & 1 == 1 {
                x ^= f.bits;
                used.push(t);
            }
        }
        if x < best.0 {
            best = (x, used);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{ColStrip, RowStrip};
    use crate::transform_engine::{apply_move, random_scramble};

    fn negate(m: &BlockMatrix, d: &Signs) -> BlockMatrix {
        let mut out = m.clone();
        for r in 0..m.num_rows() {
            for c in 0..m.num_cols() {
                if d.rows[r] != d.cols[c] {
                    out.set(r, c, -(m.get(r, c) as i64));
                }
            }
        }
        out
    }

    #[test]
    fn emulation_tracks_the_original_word() {
        let p = StripProfile::new(
            vec![(RowStrip::Sn, 2), (RowStrip::Sn1, 1), (RowStrip::Ceta, 2)],
            vec![(ColStrip::S2, 1), (ColStrip::S3, 2)],
        )
        .unwrap();
        let schema = SchemaId::APRIME2;
        let y0 = BlockMatrix::from_integers(schema, p.clone(), &[1, 3, 2, 0, 1, 1, 0, 6, 1, 0, 3, 2, 0, 1, 1]).unwrap();
        let (_, word) = random_scramble(&y0, 11, 80);
        let mut y = y0.clone();
        let mut work = y0.clone();
        let mut d = Signs::new(&p);
        for mv in word.moves {
            y = apply_move(&y, &mv).unwrap();
            let mut emitted = Vec::new();
            emulate(&p, &mut d, mv, &mut |x| emitted.push(x));
            for e in emitted {
                assert!(e.rule(SchemaId::APRIME2_PLUS, 1).is_some(), "{e:?} must be sign-free");
                work = apply_move(&work, &e).unwrap();
            }
            assert_eq!(work, negate(&y, &d));
        }
    }

    #[test]
    fn reduction_picks_least_coset_member() {
        let flips = [Flip { bits: 0b110, word: vec![] }, Flip { bits: 0b011, word: vec![] }];
        assert_eq!(reduce_bits(0b111, &flips).0, 0b001);
        assert_eq!(reduce_bits(0b101, &flips).0, 0b000);
    }
}

//! A matrix under reduction together with the log of every move applied to it.

use std::collections::HashMap;

use crate::block_matrix::BlockMatrix;
use crate::schema::{
    admissible_moves, cell_domain, effect_factor, ColStrip, RowStrip, RuleKind, SchemaId, SchemaKind, StripId,
};
use crate::transform_engine::{apply_move_mut, Move, MoveLog, SwapSign};

/// Which primary part of an entry a computation looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Part {
    Two,
    Three,
}

/// Largest power of `p` dividing `m`.
fn p_power(m: u32, p: u32) -> u32 {
    let mut q = 1;
    let mut m = m;
    while m.is_multiple_of(p) {
        m /= p;
        q *= p;
    }
    q
}

pub(crate) struct Work {
    pub m: BlockMatrix,
    pub log: MoveLog,
    pub rows: Vec<RowStrip>,
    pub cols: Vec<ColStrip>,
    row_pos: Vec<usize>,
    col_pos: Vec<usize>,
    /// True when cells carry both a 2- and a 3-primary part.
    mixed: bool,
    multipliers: HashMap<(RuleKind, StripId, StripId), i64>,
}

impl Work {
    pub fn new(m: &BlockMatrix) -> Self {
        fn pos<T: PartialEq>(labels: &[T]) -> Vec<usize> {
            let mut out: Vec<usize> = Vec::with_capacity(labels.len());
            for (idx, s) in labels.iter().enumerate() {
                out.push(if idx > 0 && labels[idx - 1] == *s { out[idx - 1] + 1 } else { 0 });
            }
            out
        }
        let rows = m.profile().row_labels();
        let cols = m.profile().col_labels();
        let row_pos = pos(&rows);
        let col_pos = pos(&cols);
        let cap = m.profile().max_moore().max(1);
        let multipliers = admissible_moves(m.schema(), cap)
            .into_iter()
            .map(|r| ((r.kind, r.src, r.dst), r.multiplier()))
            .collect();
        let mixed = matches!(m.schema().kind(), SchemaKind::A0 | SchemaKind::Aprime);
        Work { m: m.clone(), log: MoveLog::new(), rows, cols, row_pos, col_pos, mixed, multipliers }
    }

    pub fn schema(&self) -> SchemaId {
        self.m.schema()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&mut self, mv: Move) {
        apply_move_mut(&mut self.m, &mv).unwrap_or_else(|e| panic!("reducer produced an inadmissible move: {e}"));
        self.log.push(mv);
    }

    pub fn modulus(&self, r: usize, c: usize) -> u32 {
        self.m.domain(r, c).modulus().map_or(0, |m| m.get())
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.m.get(r, c)
    }

    /// Modulus of the `part` component of cell `(r, c)`; 1 when that part is trivial.
    pub fn part_modulus(&self, r: usize, c: usize, part: Part) -> u32 {
        let m = self.modulus(r, c);
        if m == 0 {
            return 1;
        }
        match part {
            Part::Two => p_power(m, 2),
            Part::Three => p_power(m, 3),
        }
    }

    pub fn part(&self, r: usize, c: usize, part: Part) -> u32 {
        self.get(r, c) % self.part_modulus(r, c, part)
    }

    pub fn p2(&self, r: usize, c: usize) -> u32 {
        self.part(r, c, Part::Two)
    }

    pub fn p3(&self, r: usize, c: usize) -> u32 {
        self.part(r, c, Part::Three)
    }

    /// Coefficient that acts as `k` on `part` and as zero on the other part.
    pub fn lift(&self, part: Part, k: i64) -> i64 {
        if !self.mixed {
            return k;
        }
        match part {
            Part::Two => (9 * k).rem_euclid(24),
            Part::Three => (16 * k).rem_euclid(24),
        }
    }

    fn row_multiplier(&self, src: usize, dst: usize) -> i64 {
        let key = (RuleKind::RowAdd, StripId::Row(self.rows[src]), StripId::Row(self.rows[dst]));
        *self.multipliers.get(&key).unwrap_or(&0)
    }

    fn col_multiplier(&self, src: usize, dst: usize) -> i64 {
        let key = (RuleKind::ColAdd, StripId::Col(self.cols[src]), StripId::Col(self.cols[dst]));
        *self.multipliers.get(&key).unwrap_or(&0)
    }

    pub fn row_add_allowed(&self, src: usize, dst: usize) -> bool {
        src != dst && self.row_multiplier(src, dst) != 0
    }

    pub fn col_add_allowed(&self, src: usize, dst: usize) -> bool {
        src != dst && self.col_multiplier(src, dst) != 0
    }

    /// Value of entry `(r, c)` after the row move `src -> r` with coefficient `k`.
    fn after_row_add(&self, src: usize, r: usize, c: usize, k: i64) -> u32 {
        let schema = self.schema();
        let d = cell_domain(schema, self.rows[r], self.cols[c]).expect("valid");
        let s = cell_domain(schema, self.rows[src], self.cols[c]).expect("valid");
        match (d.modulus(), effect_factor(s, d)) {
            (Some(m), Some(f)) => {
                let m = m.get() as i64;
                let x = self.get(r, c) as i64 + self.row_multiplier(src, r) * (k % 24) * f as i64 * self.get(src, c) as i64;
                x.rem_euclid(m) as u32
            }
            _ => self.get(r, c),
        }
    }

    fn after_col_add(&self, src: usize, c: usize, r: usize, k: i64) -> u32 {
        let schema = self.schema();
        let d = cell_domain(schema, self.rows[r], self.cols[c]).expect("valid");
        let s = cell_domain(schema, self.rows[r], self.cols[src]).expect("valid");
        match (d.modulus(), effect_factor(s, d)) {
            (Some(m), Some(f)) => {
                let m = m.get() as i64;
                let x = self.get(r, c) as i64 + self.col_multiplier(src, c) * (k % 24) * f as i64 * self.get(r, src) as i64;
                x.rem_euclid(m) as u32
            }
            _ => self.get(r, c),
        }
    }

    /// Smallest `k` such that the row move `src -> dst` with `lift(part, k)` kills the `part` of `(dst, col)`.
    pub fn solve_row(&self, src: usize, dst: usize, col: usize, part: Part) -> Option<i64> {
        if !self.row_add_allowed(src, dst) {
            return None;
        }
        let q = self.part_modulus(dst, col, part);
        (0..24).find(|&k| self.after_row_add(src, dst, col, self.lift(part, k)).is_multiple_of(q))
    }

    pub fn solve_col(&self, src: usize, dst: usize, row: usize, part: Part) -> Option<i64> {
        if !self.col_add_allowed(src, dst) {
            return None;
        }
        let q = self.part_modulus(row, dst, part);
        (0..24).find(|&k| self.after_col_add(src, dst, row, self.lift(part, k)).is_multiple_of(q))
    }

    /// Row move `src -> dst` whose coefficient acts as `k` on `part` only.
    pub fn row_add(&mut self, src: usize, dst: usize, k: i64, part: Part) {
        let k = self.lift(part, k);
        if k.rem_euclid(24) == 0 {
            return;
        }
        self.apply(Move::RowAdd { src: self.rows[src], i: self.row_pos[src], dst: self.rows[dst], j: self.row_pos[dst], k });
    }

    pub fn col_add(&mut self, src: usize, dst: usize, k: i64, part: Part) {
        let k = self.lift(part, k);
        if k.rem_euclid(24) == 0 {
            return;
        }
        self.apply(Move::ColAdd { src: self.cols[src], i: self.col_pos[src], dst: self.cols[dst], j: self.col_pos[dst], k });
    }

    /// Kills the `part` of `(dst, col)` with a row move from `src`; false if impossible.
    pub fn clear_by_row(&mut self, src: usize, dst: usize, col: usize, part: Part) -> bool {
        if self.part(dst, col, part) == 0 {
            return true;
        }
        match self.solve_row(src, dst, col, part) {
            Some(k) => {
                self.row_add(src, dst, k, part);
                true
            }
            None => false,
        }
    }

    pub fn clear_by_col(&mut self, src: usize, dst: usize, row: usize, part: Part) -> bool {
        if self.part(row, dst, part) == 0 {
            return true;
        }
        match self.solve_col(src, dst, row, part) {
            Some(k) => {
                self.col_add(src, dst, k, part);
                true
            }
            None => false,
        }
    }

    /// Whether every cell of the strip lives in a single primary part.
    fn pure_strip(&self, strip: StripId) -> bool {
        !self.mixed
            || matches!(
                strip,
                StripId::Row(RowStrip::Sn1 | RowStrip::Sn2 | RowStrip::Moore(_))
                    | StripId::Col(ColStrip::S2 | ColStrip::Moore(_))
            )
    }

    /// Exchanges the `part` of rows `a` and `b`, possibly negating one, leaving the other part alone.
    ///
    /// Rows of S_n and C_eta are exchanged through the mutual additions,
    /// which works because 2 is a unit modulo 3.
    pub fn swap_rows(&mut self, a: usize, b: usize, part: Part) {
        if a == b {
            return;
        }
        let strip = StripId::Row(self.rows[a]);
        if self.rows[a] == self.rows[b] && self.pure_strip(strip) && self.plain_swap_ok(strip) {
            self.apply(Move::RowSwap { strip: self.rows[a], i: self.row_pos[a], j: self.row_pos[b], sign: SwapSign::Plain });
            return;
        }
        let (x, y) = if self.rows[a] == RowStrip::Ceta && self.rows[b] == RowStrip::Sn { (b, a) } else { (a, b) };
        let middle = if self.rows[x] == self.rows[y] { -1 } else { 1 };
        self.row_add(x, y, 1, part);
        self.row_add(y, x, middle, part);
        self.row_add(x, y, 1, part);
    }

    pub fn swap_cols(&mut self, a: usize, b: usize, part: Part) {
        if a == b {
            return;
        }
        let strip = StripId::Col(self.cols[a]);
        if self.pure_strip(strip) && self.plain_swap_ok(strip) {
            self.apply(Move::ColSwap { strip: self.cols[a], i: self.col_pos[a], j: self.col_pos[b], sign: SwapSign::Plain });
            return;
        }
        self.col_add(a, b, 1, part);
        self.col_add(b, a, -1, part);
        self.col_add(a, b, 1, part);
    }

    pub fn plain_swap_ok(&self, strip: StripId) -> bool {
        let cap = self.m.profile().max_moore().max(1);
        admissible_moves(self.schema(), cap).iter().any(|r| {
            r.src == strip
                && matches!(r.kind, RuleKind::RowSwap | RuleKind::ColSwap)
                && r.coefficient == crate::schema::Coefficient::AnySwap
        })
    }

    /// Maps a move on a submatrix (given by its sorted global rows and columns) to a global move.
    pub fn globalize(&self, mv: Move, rows: &[usize], cols: &[usize]) -> Move {
        let grow = |strip: RowStrip, i: usize| -> usize {
            let g = rows.iter().copied().filter(|&r| self.rows[r] == strip).nth(i).expect("local row exists");
            self.row_pos[g]
        };
        let gcol = |strip: ColStrip, i: usize| -> usize {
            let g = cols.iter().copied().filter(|&c| self.cols[c] == strip).nth(i).expect("local col exists");
            self.col_pos[g]
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

    pub fn row_index(&self, strip: RowStrip, i: usize) -> usize {
        self.m.profile().row_offset(strip) + i
    }

    pub fn col_index(&self, strip: ColStrip, i: usize) -> usize {
        self.m.profile().col_offset(strip) + i
    }
}

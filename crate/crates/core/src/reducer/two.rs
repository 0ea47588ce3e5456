//! Reduction of the 2-primary part to a direct sum of chain and eta blocks.
//!
//! Entries are compared in a common `Z/8` scale: the `S_n x S^{n+3}` cell as
//! is, the `C_eta` cell doubled and the `Z/2` cells multiplied by 4. The
//! core (`S_n`, `C_eta` rows against `S^{n+3}`) is reduced first; what is
//! left of it is a problem over F2 coupled to the eta cells.

use super::work::{Part, Work};
use crate::schema::{ColStrip, RowStrip};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Class {
    /// `S_n` row, unit pivot.
    Unit,
    /// `S_n` row, pivot of the form `2u`.
    Twice,
    /// `C_eta` row, unit pivot.
    Ceta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Link {
    None,
    /// Through an `S^{n+1}` row.
    D(usize),
    /// Through an `S^{n+2}` row.
    E(usize),
}

impl Link {
    fn rank(self) -> u8 {
        match self {
            Link::None => 0,
            Link::D(_) => 1,
            Link::E(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
struct Main {
    row: usize,
    col: usize,
    class: Class,
    right: Link,
    left: Option<usize>,
}

/// A finished block of the 2-part.
#[derive(Debug, Clone)]
pub(crate) struct Block2 {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Row and column of the parameter cell of a chain block.
    pub core: Option<(usize, usize)>,
}

struct Reducer<'a> {
    w: &'a mut Work,
    mains: Vec<Main>,
    blocks: Vec<Block2>,
    row_done: Vec<bool>,
    col_done: Vec<bool>,
    is_main_row: Vec<bool>,
    is_main_col: Vec<bool>,
}

fn valuation(x: u32) -> u32 {
    if x.is_multiple_of(8) {
        3
    } else {
        x.trailing_zeros()
    }
}

impl<'a> Reducer<'a> {
    fn rows_of(&self, strip: RowStrip) -> Vec<usize> {
        (0..self.w.nrows()).filter(|&r| self.w.rows[r] == strip).collect()
    }

    fn cols_of(&self, strip: ColStrip) -> Vec<usize> {
        (0..self.w.ncols()).filter(|&c| self.w.cols[c] == strip).collect()
    }

    fn is_core_row(&self, r: usize) -> bool {
        matches!(self.w.rows[r], RowStrip::Sn | RowStrip::Ceta)
    }

    /// The 2-part of `(r, c)` on the common `Z/8` scale.
    fn scaled(&self, r: usize, c: usize) -> u32 {
        let q = self.w.part_modulus(r, c, Part::Two);
        (self.w.p2(r, c) * (8 / q.max(1))) % 8
    }

    fn free_row(&self, r: usize) -> bool {
        !self.row_done[r] && !self.is_main_row[r]
    }

    fn free_col(&self, c: usize) -> bool {
        !self.col_done[c] && !self.is_main_col[c]
    }

    /// Stage one: pivots of scaled valuation at most one in the core.
    fn core_pivots(&mut self) {
        let core_rows: Vec<usize> = (0..self.w.nrows()).filter(|&r| self.is_core_row(r)).collect();
        let s3 = self.cols_of(ColStrip::S3);
        loop {
            let mut best: Option<(u32, bool, usize, usize)> = None;
            for &r in &core_rows {
                if !self.free_row(r) {
                    continue;
                }
                for &c in &s3 {
                    if !self.free_col(c) {
                        continue;
                    }
                    let v = valuation(self.scaled(r, c));
                    if v > 1 {
                        continue;
                    }
                    // Ties prefer C_eta rows, whose pivots cannot clear them otherwise.
                    let key = (v, self.w.rows[r] != RowStrip::Ceta, r, c);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
            let Some((v, _, i, j)) = best else { break };
            for &c in &s3 {
                if c != j {
                    let ok = self.w.clear_by_col(j, c, i, Part::Two);
                    assert!(ok, "core row clearing");
                }
            }
            for &r in &core_rows {
                if r != i {
                    let ok = self.w.clear_by_row(i, r, j, Part::Two);
                    assert!(ok, "core column clearing");
                }
            }
            let class = match (self.w.rows[i], v) {
                (RowStrip::Ceta, _) => Class::Ceta,
                (_, 0) => Class::Unit,
                _ => Class::Twice,
            };
            self.is_main_row[i] = true;
            self.is_main_col[j] = true;
            self.mains.push(Main { row: i, col: j, class, right: Link::None, left: None });
        }
    }

    /// Clears core entries in main rows and columns away from the pivots.
    ///
    /// Only entries of scaled valuation at least two are expected here, so
    /// every correcting coefficient is even and leaves the F2 cells alone.
    fn fix_core(&mut self) {
        let core_rows: Vec<usize> = (0..self.w.nrows()).filter(|&r| self.is_core_row(r)).collect();
        let s3 = self.cols_of(ColStrip::S3);
        for _ in 0..64 {
            let mut changed = false;
            for t in 0..self.mains.len() {
                let (rt, ct) = (self.mains[t].row, self.mains[t].col);
                for &c in &s3 {
                    if c != ct && self.w.p2(rt, c) != 0 {
                        let ok = self.w.clear_by_col(ct, c, rt, Part::Two);
                        assert!(ok, "core fix along a main row");
                        changed = true;
                    }
                }
                for &r in &core_rows {
                    if r != rt && self.w.p2(r, ct) != 0 {
                        let ok = self.w.clear_by_row(rt, r, ct, Part::Two);
                        assert!(ok, "core fix along a main column");
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
        panic!("core fix did not settle");
    }

    fn finish(&mut self, rows: Vec<usize>, cols: Vec<usize>, core: Option<(usize, usize)>) {
        for &r in &rows {
            self.row_done[r] = true;
        }
        for &c in &cols {
            self.col_done[c] = true;
        }
        self.blocks.push(Block2 { rows, cols, core });
    }

    fn first_nonzero(&self, rows: &[usize], cols: &[usize]) -> Option<(usize, usize)> {
        rows.iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .find(|&(r, c)| self.w.p2(r, c) != 0)
    }

    /// `S^{n+1} x S^{n+2}` pivots, isolated as `X(eta_1)`.
    fn eta1_blocks(&mut self) {
        let sn1 = self.rows_of(RowStrip::Sn1);
        let s2 = self.cols_of(ColStrip::S2);
        loop {
            let rows: Vec<usize> = sn1.iter().copied().filter(|&r| !self.row_done[r]).collect();
            let cols: Vec<usize> = s2.iter().copied().filter(|&c| !self.col_done[c]).collect();
            let Some((i, s)) = self.first_nonzero(&rows, &cols) else { break };
            for r in 0..self.w.nrows() {
                if r != i && self.w.p2(r, s) != 0 {
                    self.w.row_add(i, r, 1, Part::Two);
                }
            }
            self.fix_core();
            for c in 0..self.w.ncols() {
                if c != s && self.w.p2(i, c) != 0 {
                    self.w.col_add(s, c, 1, Part::Two);
                }
            }
            self.fix_core();
            self.finish(vec![i], vec![s], None);
        }
    }

    /// Non-main `S_n` rows against `S^{n+2}`, isolated as `X(eta eta)_0`.
    fn etaeta0_blocks(&mut self) {
        let sn = self.rows_of(RowStrip::Sn);
        let s2 = self.cols_of(ColStrip::S2);
        loop {
            let rows: Vec<usize> = sn.iter().copied().filter(|&r| self.free_row(r)).collect();
            let cols: Vec<usize> = s2.iter().copied().filter(|&c| !self.col_done[c]).collect();
            let Some((z, s)) = self.first_nonzero(&rows, &cols) else { break };
            for &r in &sn {
                if r != z && self.w.p2(r, s) != 0 {
                    self.w.row_add(z, r, 1, Part::Two);
                }
            }
            self.fix_core();
            for c in 0..self.w.ncols() {
                if c != s && self.w.p2(z, c) != 0 {
                    self.w.col_add(s, c, 1, Part::Two);
                }
            }
            self.fix_core();
            self.finish(vec![z], vec![s], None);
        }
    }

    fn free_rows_of(&self, strip: RowStrip) -> Vec<usize> {
        self.rows_of(strip).into_iter().filter(|&r| self.free_row(r)).collect()
    }

    fn free_s3(&self) -> Vec<usize> {
        self.cols_of(ColStrip::S3).into_iter().filter(|&c| self.free_col(c)).collect()
    }

    /// Clears row `r` outside column `keep` with column moves from `keep`.
    fn clear_row_from(&mut self, r: usize, keep: usize) {
        for c in 0..self.w.ncols() {
            if c != keep && self.w.p2(r, c) != 0 && self.w.cols[c] == ColStrip::S3 {
                let ok = self.w.clear_by_col(keep, c, r, Part::Two);
                assert!(ok, "row clearing in the residual");
            }
        }
        self.fix_core();
    }

    /// The part of the core outside main lines together with the eta rows.
    fn residual(&mut self) {
        // Pivots in S^{n+2} rows become X(eta_2).
        loop {
            let rows = self.free_rows_of(RowStrip::Sn2);
            let cols = self.free_s3();
            let Some((e, z)) = self.first_nonzero(&rows, &cols) else { break };
            self.clear_row_from(e, z);
            for r in 0..self.w.nrows() {
                if r != e && !self.is_main_row[r] && self.w.p2(r, z) != 0 {
                    let ok = self.w.clear_by_row(e, r, z, Part::Two);
                    assert!(ok, "eta_2 column clearing");
                }
            }
            self.finish(vec![e], vec![z], None);
        }
        // Pivots in S^{n+1} rows; C_eta rows may still meet their columns.
        let mut d_pivots: Vec<(usize, usize)> = Vec::new();
        loop {
            let rows: Vec<usize> =
                self.free_rows_of(RowStrip::Sn1).into_iter().filter(|r| d_pivots.iter().all(|p| p.0 != *r)).collect();
            let cols: Vec<usize> = self.free_s3().into_iter().filter(|c| d_pivots.iter().all(|p| p.1 != *c)).collect();
            let Some((i, z)) = self.first_nonzero(&rows, &cols) else { break };
            self.clear_row_from(i, z);
            for r in 0..self.w.nrows() {
                if r != i && !self.is_main_row[r] && self.w.rows[r] != RowStrip::Ceta && self.w.p2(r, z) != 0 {
                    let ok = self.w.clear_by_row(i, r, z, Part::Two);
                    assert!(ok, "eta eta column clearing");
                }
            }
            d_pivots.push((i, z));
        }
        let d_cols: Vec<usize> = d_pivots.iter().map(|p| p.1).collect();
        // C_eta rows against columns without an S^{n+1} pivot become X(eta 2).
        loop {
            let rows = self.free_rows_of(RowStrip::Ceta);
            let cols: Vec<usize> = self.free_s3().into_iter().filter(|c| !d_cols.contains(c)).collect();
            let Some((f, z)) = self.first_nonzero(&rows, &cols) else { break };
            self.clear_row_from(f, z);
            for r in 0..self.w.nrows() {
                if r != f && !self.is_main_row[r] && self.w.p2(r, z) != 0 {
                    let ok = self.w.clear_by_row(f, r, z, Part::Two);
                    assert!(ok, "eta v column clearing");
                }
            }
            self.finish(vec![f], vec![z], Some((f, z)));
        }
        // C_eta rows against S^{n+1} pivot columns become X(eta 2 eta eta).
        loop {
            let rows = self.free_rows_of(RowStrip::Ceta);
            let cols: Vec<usize> = d_pivots.iter().map(|p| p.1).filter(|&c| self.free_col(c)).collect();
            let Some((f, z)) = self.first_nonzero(&rows, &cols) else { break };
            let i = d_pivots.iter().find(|p| p.1 == z).expect("pivot column").0;
            for &(i2, z2) in &d_pivots {
                if z2 != z && self.free_col(z2) && self.w.p2(f, z2) != 0 {
                    self.w.col_add(z, z2, 1, Part::Two);
                    self.w.row_add(i2, i, 1, Part::Two);
                }
            }
            self.fix_core();
            for r in 0..self.w.nrows() {
                if r == f || r == i || self.is_main_row[r] || self.w.p2(r, z) == 0 {
                    continue;
                }
                let src = if self.w.rows[r] == RowStrip::Ceta { f } else { i };
                let ok = self.w.clear_by_row(src, r, z, Part::Two);
                assert!(ok, "eta v eta eta column clearing");
            }
            self.finish(vec![i, f], vec![z], Some((f, z)));
        }
        // Remaining S^{n+1} pivots become X(eta eta)_1.
        for &(i, z) in &d_pivots {
            if !self.free_col(z) {
                continue;
            }
            for r in 0..self.w.nrows() {
                if r != i && !self.is_main_row[r] && self.w.p2(r, z) != 0 {
                    let ok = self.w.clear_by_row(i, r, z, Part::Two);
                    assert!(ok, "eta eta_1 column clearing");
                }
            }
            self.finish(vec![i], vec![z], None);
        }
        // What is left of S_n against S^{n+3} is a multiple of 4: X(4).
        loop {
            let rows = self.free_rows_of(RowStrip::Sn);
            let cols = self.free_s3();
            let Some((z, c)) = self.first_nonzero(&rows, &cols) else { break };
            for &r in &rows {
                if r != z && self.w.p2(r, c) != 0 {
                    self.w.row_add(z, r, 1, Part::Two);
                }
            }
            self.clear_row_from(z, c);
            self.finish(vec![z], vec![c], Some((z, c)));
        }
    }

    /// Column move from main `t` into main `u` plus the row move that restores the core.
    fn couple_cols(&mut self, t: usize, u: usize) {
        let (rt, ct) = (self.mains[t].row, self.mains[t].col);
        let (ru, cu) = (self.mains[u].row, self.mains[u].col);
        self.w.col_add(ct, cu, 1, Part::Two);
        let ok = self.w.clear_by_row(ru, rt, cu, Part::Two);
        assert!(ok, "coupled column move");
        self.fix_core();
    }

    const ORDER: [Class; 3] = [Class::Twice, Class::Ceta, Class::Unit];

    /// Attaches `S^{n+2}` then `S^{n+1}` rows to main columns.
    fn right_links(&mut self) {
        for strip in [RowStrip::Sn2, RowStrip::Sn1] {
            for class in Self::ORDER {
                loop {
                    let rows = self.free_rows_of(strip);
                    let found = rows.iter().find_map(|&e| {
                        self.mains
                            .iter()
                            .position(|m| m.class == class && m.right == Link::None && self.w.p2(e, m.col) != 0)
                            .map(|t| (e, t))
                    });
                    let Some((e, t)) = found else { break };
                    for u in 0..self.mains.len() {
                        if u != t && self.mains[u].right == Link::None && self.w.p2(e, self.mains[u].col) != 0 {
                            self.couple_cols(t, u);
                        }
                    }
                    let ct = self.mains[t].col;
                    for r in 0..self.w.nrows() {
                        if r != e && matches!(self.w.rows[r], RowStrip::Sn1 | RowStrip::Sn2) && self.w.p2(r, ct) != 0 {
                            self.w.row_add(e, r, 1, Part::Two);
                        }
                    }
                    self.row_done[e] = true;
                    self.mains[t].right = if strip == RowStrip::Sn2 { Link::E(e) } else { Link::D(e) };
                }
            }
        }
    }

    /// Attaches `S^{n+2}` columns to main `S_n` rows, along the chain order.
    fn left_links(&mut self) {
        let s2 = self.cols_of(ColStrip::S2);
        let mut order: Vec<usize> = (0..self.mains.len()).filter(|&t| self.mains[t].class != Class::Ceta).collect();
        order.sort_by_key(|&t| (self.mains[t].class == Class::Unit, std::cmp::Reverse(self.mains[t].right.rank()), t));
        loop {
            let cols: Vec<usize> = s2.iter().copied().filter(|&c| !self.col_done[c]).collect();
            let found = order.iter().find_map(|&t| {
                if self.mains[t].left.is_some() {
                    return None;
                }
                cols.iter().find(|&&s| self.w.p2(self.mains[t].row, s) != 0).map(|&s| (t, s))
            });
            let Some((t, s)) = found else { break };
            let rt = self.mains[t].row;
            for &c in &cols {
                if c != s && self.w.p2(rt, c) != 0 {
                    self.w.col_add(s, c, 1, Part::Two);
                }
            }
            for u in 0..self.mains.len() {
                let ru = self.mains[u].row;
                if u == t || self.w.p2(ru, s) == 0 {
                    continue;
                }
                self.w.row_add(rt, ru, 1, Part::Two);
                let (ct, cu) = (self.mains[t].col, self.mains[u].col);
                let ok = self.w.clear_by_col(cu, ct, ru, Part::Two);
                assert!(ok, "left link core repair");
                // The repair may carry u's right link into t's column.
                let link_row = match self.mains[u].right {
                    Link::E(e) | Link::D(e) => Some(e),
                    Link::None => None,
                };
                if let Some(lu) = link_row {
                    if self.w.p2(lu, ct) != 0 {
                        let src = match self.mains[t].right {
                            Link::E(e) | Link::D(e) => e,
                            Link::None => panic!("chain order violated"),
                        };
                        self.w.row_add(src, lu, 1, Part::Two);
                    }
                }
                self.fix_core();
            }
            self.col_done[s] = true;
            self.mains[t].left = Some(s);
        }
    }

    fn main_blocks(&mut self) {
        for t in 0..self.mains.len() {
            let m = self.mains[t].clone();
            let mut rows = vec![m.row];
            if let Link::E(e) | Link::D(e) = m.right {
                rows.push(e);
            }
            let mut cols = vec![m.col];
            cols.extend(m.left);
            self.row_done[m.row] = true;
            self.col_done[m.col] = true;
            self.finish(rows, cols, Some((m.row, m.col)));
        }
    }
}

/// Reduces the 2-part; returns the blocks that carry nonzero 2-part entries.
pub(crate) fn reduce2(w: &mut Work) -> Vec<Block2> {
    let (nr, nc) = (w.nrows(), w.ncols());
    let mut red = Reducer {
        w,
        mains: Vec::new(),
        blocks: Vec::new(),
        row_done: vec![false; nr],
        col_done: vec![false; nc],
        is_main_row: vec![false; nr],
        is_main_col: vec![false; nc],
    };
    red.core_pivots();
    red.fix_core();
    red.eta1_blocks();
    red.etaeta0_blocks();
    red.residual();
    red.right_links();
    red.left_links();
    red.main_blocks();
    red.fix_core();
    let blocks = red.blocks;
    debug_assert!(supported_by(w, &blocks), "2-part left outside its blocks");
    blocks
}

/// True when every nonzero 2-part entry lies inside one block.
pub(crate) fn supported_by(w: &Work, blocks: &[Block2]) -> bool {
    let mut row_block = vec![usize::MAX; w.nrows()];
    let mut col_block = vec![usize::MAX; w.ncols()];
    for (b, blk) in blocks.iter().enumerate() {
        for &r in &blk.rows {
            row_block[r] = b;
        }
        for &c in &blk.cols {
            col_block[c] = b;
        }
    }
    (0..w.nrows()).all(|r| {
        (0..w.ncols()).all(|c| w.p2(r, c) == 0 || (row_block[r] != usize::MAX && row_block[r] == col_block[c]))
    })
}

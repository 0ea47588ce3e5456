//! Elimination of the 3-primary part, which is a problem over F3.

use super::work::{Part, Work};
use crate::schema::{ColStrip, RowStrip};

/// Rank of a row in the order in which rows may be added downwards.
pub(crate) fn row_level(strip: RowStrip) -> Option<u8> {
    match strip {
        RowStrip::Sn | RowStrip::Ceta => Some(u8::MAX),
        RowStrip::Moore(s) => Some(s),
        RowStrip::Sn1 | RowStrip::Sn2 => None,
    }
}

pub(crate) fn col_level(strip: ColStrip) -> Option<u8> {
    match strip {
        ColStrip::S3 => Some(u8::MAX),
        ColStrip::Moore(r) => Some(r),
        ColStrip::S2 => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pivot {
    pub row: usize,
    pub col: usize,
}

/// Reduces the 3-part to isolated unit pivots using moves that fix the 2-part.
///
/// Columns are taken from the top level down, and within a column the pivot
/// row is the highest available, so every clearing move goes downwards.
pub(crate) fn reduce3(w: &mut Work) -> Vec<Pivot> {
    let rows: Vec<usize> = (0..w.nrows()).filter(|&r| row_level(w.rows[r]).is_some()).collect();
    let mut cols: Vec<usize> = (0..w.ncols()).filter(|&c| col_level(w.cols[c]).is_some()).collect();
    cols.sort_by_key(|&c| (std::cmp::Reverse(col_level(w.cols[c])), c));
    let mut row_done = vec![false; w.nrows()];
    let mut col_done = vec![false; w.ncols()];
    let mut pivots = Vec::new();
    loop {
        let mut found = None;
        'search: for &c in &cols {
            if col_done[c] {
                continue;
            }
            let best = rows
                .iter()
                .copied()
                .filter(|&r| !row_done[r] && w.p3(r, c) != 0)
                .min_by_key(|&r| (std::cmp::Reverse(row_level(w.rows[r])), r));
            if let Some(r) = best {
                found = Some((r, c));
                break 'search;
            }
        }
        let Some((i, j)) = found else { break };
        for &c in &cols {
            if c != j && !col_done[c] {
                let ok = w.clear_by_col(j, c, i, Part::Three);
                assert!(ok, "3-part column clearing must succeed");
            }
        }
        for &r in &rows {
            if r != i && !row_done[r] {
                let ok = w.clear_by_row(i, r, j, Part::Three);
                assert!(ok, "3-part row clearing must succeed");
            }
        }
        row_done[i] = true;
        col_done[j] = true;
        pivots.push(Pivot { row: i, col: j });
    }
    pivots
}

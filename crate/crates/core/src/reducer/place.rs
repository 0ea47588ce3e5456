//! Moves the 3-part pivots onto lines of the 2-part blocks they combine with.
//!
//! Every swap here acts on the 3-part only, so the 2-part blocks stay put.
//! A pivot on an S^{n+3} column and a row of S_n or C_eta prefers the core
//! of a chain block, then lines no block uses.

use super::three::Pivot;
use super::two::Block2;
use super::work::{Part, Work};
use crate::schema::{ColStrip, RowStrip};

fn is_j(strip: RowStrip) -> bool {
    matches!(strip, RowStrip::Sn | RowStrip::Ceta)
}

pub(crate) fn place(w: &mut Work, blocks: &[Block2], pivots: &[Pivot]) {
    let (nr, nc) = (w.nrows(), w.ncols());
    let mut row_block: Vec<Option<usize>> = vec![None; nr];
    let mut col_block: Vec<Option<usize>> = vec![None; nc];
    for (b, blk) in blocks.iter().enumerate() {
        for &r in &blk.rows {
            row_block[r] = Some(b);
        }
        for &c in &blk.cols {
            col_block[c] = Some(b);
        }
    }
    let block_size = |b: usize| blocks[b].rows.len() + blocks[b].cols.len();
    let cores: Vec<(usize, usize)> =
        blocks.iter().filter_map(|b| b.core).filter(|&(r, c)| is_j(w.rows[r]) && w.cols[c] == ColStrip::S3).collect();
    let core_row = |r: usize| cores.iter().any(|&(cr, _)| cr == r);
    let core_col = |c: usize| cores.iter().any(|&(_, cc)| cc == c);
    // Rank of a line for a pivot without a core: atoms first, then the smallest block.
    let row_rank = |r: usize| row_block[r].map_or(0, block_size);
    let col_rank = |c: usize| col_block[c].map_or(0, block_size);

    let mut pos: Vec<(usize, usize)> = pivots.iter().map(|p| (p.row, p.col)).collect();
    let mut row_locked = vec![false; nr];
    let mut col_locked = vec![false; nc];
    let kind = |w: &Work, (r, c): (usize, usize)| (is_j(w.rows[r]), w.cols[c] == ColStrip::S3);

    // Moves pivot `k` to (tr, tc); a pivot met on the way takes the vacated line.
    let go = |w: &mut Work, pos: &mut Vec<(usize, usize)>, k: usize, tr: usize, tc: usize| {
        let (r, c) = pos[k];
        if tr != r {
            w.swap_rows(r, tr, Part::Three);
            for p in pos.iter_mut() {
                if p.0 == tr {
                    p.0 = r;
                }
            }
            pos[k].0 = tr;
        }
        if tc != c {
            w.swap_cols(c, tc, Part::Three);
            for p in pos.iter_mut() {
                if p.1 == tc {
                    p.1 = c;
                }
            }
            pos[k].1 = tc;
        }
    };
    let lock = |pos: &[(usize, usize)], k: usize, row_locked: &mut Vec<bool>, col_locked: &mut Vec<bool>| {
        row_locked[pos[k].0] = true;
        col_locked[pos[k].1] = true;
    };

    let n = pos.len();
    let mut done = vec![false; n];
    for k in 0..n {
        if kind(w, pos[k]) == (true, true) && cores.contains(&pos[k]) {
            lock(&pos, k, &mut row_locked, &mut col_locked);
            done[k] = true;
        }
    }
    for k in 0..n {
        if done[k] || kind(w, pos[k]) != (true, true) {
            continue;
        }
        if let Some(&(cr, cc)) = cores.iter().find(|&&(cr, cc)| !row_locked[cr] && !col_locked[cc]) {
            go(w, &mut pos, k, cr, cc);
            lock(&pos, k, &mut row_locked, &mut col_locked);
            done[k] = true;
        }
    }
    for k in 0..n {
        if done[k] {
            continue;
        }
        let (r, c) = pos[k];
        let (mut tr, mut tc) = (r, c);
        match kind(w, pos[k]) {
            (true, true) => {
                tr = (0..nr)
                    .filter(|&x| is_j(w.rows[x]) && !row_locked[x] && !core_row(x))
                    .min_by_key(|&x| (row_rank(x), x != r, x))
                    .unwrap_or(r);
                tc = (0..nc)
                    .filter(|&x| w.cols[x] == ColStrip::S3 && !col_locked[x] && !core_col(x))
                    .min_by_key(|&x| (col_rank(x), x != c, x))
                    .unwrap_or(c);
            }
            (false, true) => {
                // Chain columns, then other block columns, then atoms.
                let rank = |x: usize| match col_block[x] {
                    _ if core_col(x) => 0,
                    Some(b) if blocks[b].core.is_none() => 1,
                    None => 2,
                    Some(_) => 3,
                };
                tc = (0..nc)
                    .filter(|&x| w.cols[x] == ColStrip::S3 && !col_locked[x])
                    .min_by_key(|&x| (rank(x), x != c, x))
                    .unwrap_or(c);
            }
            (true, false) => {
                let rank = |x: usize| match row_block[x] {
                    _ if core_row(x) => 0,
                    Some(b) if blocks[b].core.is_none() => 1,
                    None => 2,
                    Some(_) => 3,
                };
                tr = (0..nr)
                    .filter(|&x| is_j(w.rows[x]) && !row_locked[x])
                    .min_by_key(|&x| (rank(x), x != r, x))
                    .unwrap_or(r);
            }
            (false, false) => {}
        }
        go(w, &mut pos, k, tr, tc);
        lock(&pos, k, &mut row_locked, &mut col_locked);
        done[k] = true;
    }
}

//! CW structures of the classified polyhedra, their cellular homology and
//! the splitting of odd Moore spaces off an integral `H_{n+2}` block.
//!
//! A matrix with row spaces `B` and column spaces `A` stands for the cone of
//! a map `A -> B`. Its cells are those of `B` plus one cell per cell of `A`,
//! one dimension up. Matrix entries lie in the kernel of homology, so they
//! never contribute to the cellular boundary; only the degree attachments
//! inside Moore spaces do.

use std::fmt;

use thiserror::Error;

use crate::block_matrix::{BlockMatrix, MatrixError};
use crate::catalog::{matrix_of, CatalogError, IndecName};
use crate::reducer::{decompose, ReduceError};
use crate::schema::{ColStrip, RowStrip};
use crate::transform_engine::{apply_move_mut, Move, MoveError, SwapSign};

/// Smallest `n` for which the classification is stable.
pub const MIN_N: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("n must be at least {MIN_N}, got {0}")]
    SmallN(u32),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("elementary divisor {0} is even: the polyhedron has 2-torsion")]
    Not2TorsionFree(u64),
    #[error("block is {rows}x{cols} but the residual has {sn2} S^(n+2) rows and {s2} S^(n+2) columns")]
    Shape { rows: usize, cols: usize, sn2: usize, s2: usize },
}

/// How a cell is glued onto a lower sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachLabel {
    Eta,
    EtaEta,
    /// A map of the given degree between spheres of equal dimension.
    Degree(u64),
    /// Any other stable class, by its residue.
    Class(u32),
}

impl fmt::Display for AttachLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttachLabel::Eta => f.write_str("η"),
            AttachLabel::EtaEta => f.write_str("ηη"),
            AttachLabel::Degree(d) => write!(f, "{d}"),
            AttachLabel::Class(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Offset of the dimension from `n`, in `0..=4`.
    pub offset: u32,
    /// Lower cells (always bottom spheres) and the classes of the attaching map.
    pub attach: Vec<(usize, AttachLabel)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CWDescription {
    pub n: u32,
    pub cells: Vec<Cell>,
    pub name: String,
}

/// Homology in degrees `n..=n+4`: free rank and torsion orders per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyProfile {
    pub n: u32,
    pub groups: [(usize, Vec<u64>); 5],
}

impl HomologyProfile {
    pub fn odd_torsion_only(&self) -> bool {
        self.groups.iter().all(|(_, t)| t.iter().all(|d| d % 2 == 1))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups.iter().enumerate().map(|(k, (r, _))| if k % 2 == 0 { *r as i64 } else { -(*r as i64) }).sum()
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, (rank, torsion)) in self.groups.iter().enumerate() {
            let mut terms: Vec<String> = (0..*rank).map(|_| "Z".to_string()).collect();
            terms.extend(torsion.iter().map(|d| format!("Z/{d}")));
            if terms.is_empty() {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "H_{} = {}", self.n + k as u32, terms.join(" + "))?;
        }
        if first {
            f.write_str("all reduced homology vanishes")?;
        }
        Ok(())
    }
}

impl CWDescription {
    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.offset % 2 == 0 { 1 } else { -1 }).sum()
    }
}

fn dim(offset: u32) -> String {
    match offset {
        0 => "n".to_string(),
        k => format!("n+{k}"),
    }
}

/// Class of an entry by the stem it lives in.
fn entry_label(value: u32, stem: u32, three_primary: bool) -> AttachLabel {
    match (stem, value, three_primary) {
        (_, v, true) => AttachLabel::Class(v),
        (1, 1, _) => AttachLabel::Eta,
        (2, 1, _) => AttachLabel::EtaEta,
        (_, v, _) => AttachLabel::Class(v),
    }
}

/// The cell structure of the cone of the map a matrix represents.
pub fn cw_of_matrix(m: &BlockMatrix, n: u32, title: &str) -> Result<CWDescription, TopologyError> {
    if n < MIN_N {
        return Err(TopologyError::SmallN(n));
    }
    let mut cells = Vec::new();
    // Bottom cell of every row space, for the entries to attach to.
    let mut row_bottom = Vec::new();
    for r in 0..m.num_rows() {
        let strip = m.row_strip(r);
        let offset = match strip {
            RowStrip::Sn | RowStrip::Ceta | RowStrip::Moore(_) => 0,
            RowStrip::Sn1 => 1,
            RowStrip::Sn2 => 2,
        };
        row_bottom.push((cells.len(), offset));
        let bottom = cells.len();
        cells.push(Cell { offset, attach: vec![] });
        match strip {
            RowStrip::Ceta => cells.push(Cell { offset: 2, attach: vec![(bottom, AttachLabel::Eta)] }),
            RowStrip::Moore(s) => {
                cells.push(Cell { offset: 1, attach: vec![(bottom, AttachLabel::Degree(3u64.pow(s as u32)))] })
            }
            _ => {}
        }
    }
    for c in 0..m.num_cols() {
        let strip = m.col_strip(c);
        let (top, own) = match strip {
            ColStrip::S2 => (3, None),
            ColStrip::S3 => (4, None),
            ColStrip::Moore(r) => {
                let bottom = cells.len();
                cells.push(Cell { offset: 3, attach: vec![] });
                (4, Some((bottom, AttachLabel::Degree(3u64.pow(r as u32)))))
            }
        };
        let mut attach = Vec::new();
        for (r, &(bottom, offset)) in row_bottom.iter().enumerate() {
            let v = m.get(r, c);
            if v != 0 {
                let three = m.domain(r, c).modulus().is_some_and(|md| md.get() == 3);
                attach.push((bottom, entry_label(v, top - 1 - offset, three)));
            }
        }
        attach.extend(own);
        cells.push(Cell { offset: top, attach });
    }
    let name = render(title, &cells);
    Ok(CWDescription { n, cells, name })
}

/// `title = S^a ∨ ... ∪_{...} e^{...} ...`, spheres and cells by ascending
/// dimension, with `i_{t}` naming the t-th sphere of the wedge.
fn render(title: &str, cells: &[Cell]) -> String {
    let mut bottoms: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].attach.is_empty()).collect();
    bottoms.sort_by_key(|&i| cells[i].offset);
    let spheres: Vec<String> = bottoms.iter().map(|&i| format!("S^{{{}}}", dim(cells[i].offset))).collect();
    let mut out = match spheres.len() {
        0 => "*".to_string(),
        _ => spheres.join(" ∨ "),
    }
    .replace("S^{n}", "S^n");
    let mut attached: Vec<&Cell> = cells.iter().filter(|c| !c.attach.is_empty()).collect();
    attached.sort_by_key(|c| c.offset);
    for cell in attached {
        let terms: Vec<String> = cell
            .attach
            .iter()
            .map(|(target, label)| {
                if bottoms.len() == 1 {
                    label.to_string()
                } else {
                    let t = bottoms.iter().position(|b| b == target).expect("attachments hit bottom cells") + 1;
                    format!("i_{{{t}}}{label}")
                }
            })
            .collect();
        out.push_str(&format!(" ∪_{{{}}} e^{{{}}}", terms.join("+"), dim(cell.offset)));
    }
    if title.is_empty() {
        out
    } else {
        format!("{title} = {out}")
    }
}

pub fn cw_of(name: &IndecName, n: u32) -> Result<CWDescription, TopologyError> {
    let m = matrix_of(name)?;
    cw_of_matrix(&m, n, &name.to_string())
}

/// Smith normal form with the unimodular row and column operations that produce it.
#[derive(Debug, Clone)]
pub struct Smith {
    pub divisors: Vec<u64>,
    pub row_ops: Vec<Elementary>,
    pub col_ops: Vec<Elementary>,
}

/// One integral elementary operation on lines of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    /// Line `dst` += `k` times line `src`.
    Add { src: usize, dst: usize, k: i64 },
    Swap(usize, usize),
    Negate(usize),
}

/// Diagonalizes `a` (rows x cols) in place over the integers.
pub fn smith(a: &mut [Vec<i64>]) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut row_ops = Vec::new();
    let mut col_ops = Vec::new();
    let row_op = |a: &mut [Vec<i64>], op: Elementary, log: &mut Vec<Elementary>| {
        match op {
            Elementary::Add { src, dst, k } => {
                let src_row = a[src].clone();
                a[dst].iter_mut().zip(src_row).for_each(|(d, s)| *d += k * s);
            }
            Elementary::Swap(x, y) => a.swap(x, y),
            Elementary::Negate(x) => a[x].iter_mut().for_each(|v| *v = -*v),
        }
        log.push(op);
    };
    let col_op = |a: &mut [Vec<i64>], op: Elementary, log: &mut Vec<Elementary>| {
        for row in a.iter_mut() {
            match op {
                Elementary::Add { src, dst, k } => row[dst] += k * row[src],
                Elementary::Swap(x, y) => row.swap(x, y),
                Elementary::Negate(x) => row[x] = -row[x],
            }
        }
        log.push(op);
    };
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: the least nonzero magnitude in the remaining block.
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| a[r][c] != 0)
            .min_by_key(|&(r, c)| (a[r][c].abs(), r, c))
        else {
            break;
        };
        if pr != t {
            row_op(a, Elementary::Swap(pr, t), &mut row_ops);
        }
        if pc != t {
            col_op(a, Elementary::Swap(pc, t), &mut col_ops);
        }
        let mut clean = true;
        for r in t + 1..rows {
            let q = a[r][t].div_euclid(a[t][t]);
            if q != 0 {
                row_op(a, Elementary::Add { src: t, dst: r, k: -q }, &mut row_ops);
            }
            clean &= a[r][t] == 0;
        }
        for c in t + 1..cols {
            let q = a[t][c].div_euclid(a[t][t]);
            if q != 0 {
                col_op(a, Elementary::Add { src: t, dst: c, k: -q }, &mut col_ops);
            }
            clean &= a[t][c] == 0;
        }
        if !clean {
            continue;
        }
        // The pivot must divide the rest of the block.
        if let Some((r, _)) = (t + 1..rows)
            .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
            .find(|&(r, c)| a[r][c] % a[t][t] != 0)
        {
            row_op(a, Elementary::Add { src: r, dst: t, k: 1 }, &mut row_ops);
            continue;
        }
        if a[t][t] < 0 {
            row_op(a, Elementary::Negate(t), &mut row_ops);
        }
        t += 1;
    }
    let divisors = (0..t).map(|i| a[i][i] as u64).collect();
    Smith { divisors, row_ops, col_ops }
}

pub fn homology(cw: &CWDescription) -> HomologyProfile {
    let idx: Vec<Vec<usize>> =
        (0..5).map(|k| (0..cw.cells.len()).filter(|&i| cw.cells[i].offset == k as u32).collect()).collect();
    // boundary[k]: C_k -> C_{k-1} as a matrix with rows indexed by C_{k-1}.
    let mut ranks = [0usize; 6];
    let mut torsion: [Vec<u64>; 5] = Default::default();
    for k in 1..5 {
        let mut a: Vec<Vec<i64>> = idx[k - 1]
            .iter()
            .map(|&lower| {
                idx[k]
                    .iter()
                    .map(|&upper| {
                        cw.cells[upper]
                            .attach
                            .iter()
                            .filter(|(t, _)| *t == lower)
                            .map(|(_, l)| if let AttachLabel::Degree(d) = l { *d as i64 } else { 0 })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        if a.is_empty() || a[0].is_empty() {
            continue;
        }
        let s = smith(&mut a);
        ranks[k] = s.divisors.len();
        torsion[k - 1] = s.divisors.into_iter().filter(|&d| d > 1).collect();
    }
    let groups = std::array::from_fn(|k| (idx[k].len() - ranks[k] - ranks[k + 1], torsion[k].clone()));
    HomologyProfile { n: cw.n, groups }
}

/// A Moore space `M(Z/d, n+2)` split off by the `H_{n+2}` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MooreAtom {
    pub order: u64,
}

/// Splits the integral `H_{n+2}` part of a map off a Γ′ matrix.
///
/// `h_block` has one row per `S^{n+2}` row space and one column per
/// `S^{n+2}` column space of `residual`, in order. Its Smith form is
/// realized on the residual by the same line operations; unit divisors
/// cancel a row against a column, odd divisors `d > 1` become `M(Z/d, n+2)`,
/// and the lines of zero divisors stay in the residual.
pub fn split_free_part(
    h_block: &[Vec<i64>],
    residual: &BlockMatrix,
) -> Result<(Vec<MooreAtom>, BlockMatrix), TopologyError> {
    let rows = h_block.len();
    let cols = h_block.first().map_or(0, Vec::len);
    let p = residual.profile();
    let (sn2, s2) = (p.row_dim(RowStrip::Sn2), p.col_dim(ColStrip::S2));
    if rows != sn2 || cols != s2 || h_block.iter().any(|r| r.len() != cols) {
        return Err(TopologyError::Shape { rows, cols, sn2, s2 });
    }
    let mut a = h_block.to_vec();
    let s = smith(&mut a);
    if let Some(&d) = s.divisors.iter().find(|&&d| d % 2 == 0) {
        return Err(TopologyError::Not2TorsionFree(d));
    }
    let mut out = residual.clone();
    for op in &s.row_ops {
        let mv = match *op {
            Elementary::Add { src, dst, k } => Move::RowAdd { src: RowStrip::Sn2, i: src, dst: RowStrip::Sn2, j: dst, k },
            Elementary::Swap(i, j) => Move::RowSwap { strip: RowStrip::Sn2, i, j, sign: SwapSign::Plain },
            Elementary::Negate(i) => Move::RowScale { strip: RowStrip::Sn2, i },
        };
        apply_move_mut(&mut out, &mv)?;
    }
    for op in &s.col_ops {
        let mv = match *op {
            Elementary::Add { src, dst, k } => Move::ColAdd { src: ColStrip::S2, i: src, dst: ColStrip::S2, j: dst, k },
            Elementary::Swap(i, j) => Move::ColSwap { strip: ColStrip::S2, i, j, sign: SwapSign::Plain },
            Elementary::Negate(i) => Move::ColScale { strip: ColStrip::S2, i },
        };
        apply_move_mut(&mut out, &mv)?;
    }
    let atoms = s.divisors.iter().filter(|&&d| d > 1).map(|&order| MooreAtom { order }).collect();
    let rank = s.divisors.len();
    let (ro, co) = (p.row_offset(RowStrip::Sn2), p.col_offset(ColStrip::S2));
    let keep_rows: Vec<usize> = (0..p.num_rows()).filter(|&r| r < ro || r >= ro + rank).collect();
    let keep_cols: Vec<usize> = (0..p.num_cols()).filter(|&c| c < co || c >= co + rank).collect();
    Ok((atoms, out.submatrix(&keep_rows, &keep_cols)))
}

/// Names every summand of `m` with its CW structure and homology.
pub fn classify(m: &BlockMatrix, n: u32) -> Result<String, TopologyError> {
    if n < MIN_N {
        return Err(TopologyError::SmallN(n));
    }
    let d = decompose(m)?;
    let mut out = String::new();
    for part in &d.parts {
        let cw = cw_of(part, n)?;
        out.push_str(&format!("{}\n  {}\n", cw.name, homology(&cw)));
    }
    out.push_str(
        "note: spheres and Moore spaces at primes other than 2 and 3 are further indecomposables; \
         they never arise from these matrices and appear only when given as atoms\n",
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_entries, parse_name};
    use crate::schema::SchemaId;

    fn name(s: &str) -> IndecName {
        parse_name(s, SchemaId::APRIME).unwrap()
    }

    #[test]
    fn single_cell_attachment() {
        let cw = cw_of(&name("X(1)"), 5).unwrap();
        assert_eq!(cw.name, "X(1) = S^n ∪_{1} e^{n+4}");
        let h = homology(&cw);
        assert_eq!(h.groups[0], (1, vec![]));
        assert_eq!(h.groups[4], (1, vec![]));
        assert_eq!(h.groups[1..4].iter().map(|g| g.0).sum::<usize>(), 0);
    }

    #[test]
    fn moore_atom_has_cyclic_homology() {
        let m = catalog_entries(SchemaId::APRIME, 2, 2)
            .into_iter()
            .find(|n| n.to_string() == "M(3^2)^n")
            .expect("Moore row atom in the catalog");
        let cw = cw_of(&m, 6).unwrap();
        assert_eq!(cw.name, "M(3^2)^n = S^n ∪_{9} e^{n+1}");
        let h = homology(&cw);
        assert_eq!(h.groups[0], (0, vec![9]));
    }

    #[test]
    fn small_n_is_rejected() {
        assert_eq!(cw_of(&name("X(1)"), 4), Err(TopologyError::SmallN(4)));
    }

    #[test]
    fn smith_form_divides() {
        let mut a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&mut a);
        assert_eq!(s.divisors, vec![2, 6, 12]);
    }

    #[test]
    fn divisor_kinds_in_the_split() {
        let p = crate::block_matrix::StripProfile::new(
            vec![(RowStrip::Sn, 1), (RowStrip::Sn2, 1)],
            vec![(ColStrip::S2, 1), (ColStrip::S3, 1)],
        )
        .unwrap();
        let res = BlockMatrix::zero(SchemaId::APRIME, p).unwrap();
        let (atoms, rest) = split_free_part(&[vec![3]], &res).unwrap();
        assert_eq!(atoms, vec![MooreAtom { order: 3 }]);
        assert_eq!(rest.profile().row_dim(RowStrip::Sn2), 0);
        let (atoms, rest) = split_free_part(&[vec![1]], &res).unwrap();
        assert!(atoms.is_empty());
        assert_eq!(rest.profile().col_dim(ColStrip::S2), 0);
        assert_eq!(split_free_part(&[vec![2]], &res).unwrap_err(), TopologyError::Not2TorsionFree(2));
        let (atoms, rest) = split_free_part(&[vec![0]], &res).unwrap();
        assert!(atoms.is_empty());
        assert_eq!(rest, res);
    }
}

//! Strip-profiled block matrices whose cells carry schema-determined rings.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ring_core::Modulus;
use crate::schema::{cell_domain, CellDomain, ColStrip, RowStrip, SchemaError, SchemaId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("strip {0} listed twice")]
    DuplicateStrip(String),
    #[error("schemas {0} and {1} differ")]
    SchemaMismatch(SchemaId, SchemaId),
    #[error("entry ({row}, {col}) is in a zero cell but holds {value}")]
    NonzeroInZeroCell { row: String, col: String, value: u32 },
    #[error("entry ({row}, {col}) = {value} is not canonical modulo {modulus}")]
    NonCanonical { row: String, col: String, value: u32, modulus: u32 },
    #[error("entry buffer has length {found}, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("strip {strip} has no index {index}")]
    IndexOutOfRange { strip: String, index: usize },
}

/// Row and column strips with their dimensions, in the fixed strip order.
/// Strips of dimension zero are dropped so equal shapes compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StripProfile {
    rows: Vec<(RowStrip, usize)>,
    cols: Vec<(ColStrip, usize)>,
}

impl StripProfile {
    pub fn new(
        mut rows: Vec<(RowStrip, usize)>,
        mut cols: Vec<(ColStrip, usize)>,
    ) -> Result<Self, MatrixError> {
        rows.retain(|&(_, d)| d > 0);
        cols.retain(|&(_, d)| d > 0);
        rows.sort_by_key(|&(s, _)| s);
        cols.sort_by_key(|&(s, _)| s);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MatrixError::DuplicateStrip(w[0].0.to_string()));
        }
        if let Some(w) = cols.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(MatrixError::DuplicateStrip(w[0].0.to_string()));
        }
        for &(s, _) in &rows {
            if let RowStrip::Moore(0) = s {
                return Err(SchemaError::ZeroMooreParameter.into());
            }
        }
        for &(s, _) in &cols {
            if let ColStrip::Moore(0) = s {
                return Err(SchemaError::ZeroMooreParameter.into());
            }
        }
        Ok(StripProfile { rows, cols })
    }

    pub fn empty() -> Self {
        StripProfile::default()
    }

    pub fn rows(&self) -> &[(RowStrip, usize)] {
        &self.rows
    }

    pub fn cols(&self) -> &[(ColStrip, usize)] {
        &self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.iter().map(|&(_, d)| d).sum()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.iter().map(|&(_, d)| d).sum()
    }

    pub fn row_dim(&self, strip: RowStrip) -> usize {
        self.rows.iter().find(|&&(s, _)| s == strip).map_or(0, |&(_, d)| d)
    }

    pub fn col_dim(&self, strip: ColStrip) -> usize {
        self.cols.iter().find(|&&(s, _)| s == strip).map_or(0, |&(_, d)| d)
    }

    /// Global index of the first row of `strip`.
    pub fn row_offset(&self, strip: RowStrip) -> usize {
        self.rows.iter().take_while(|&&(s, _)| s < strip).map(|&(_, d)| d).sum()
    }

    pub fn col_offset(&self, strip: ColStrip) -> usize {
        self.cols.iter().take_while(|&&(s, _)| s < strip).map(|&(_, d)| d).sum()
    }

    /// Strip of every global row, in order.
    pub fn row_labels(&self) -> Vec<RowStrip> {
        self.rows.iter().flat_map(|&(s, d)| std::iter::repeat_n(s, d)).collect()
    }

    pub fn col_labels(&self) -> Vec<ColStrip> {
        self.cols.iter().flat_map(|&(s, d)| std::iter::repeat_n(s, d)).collect()
    }

    pub fn sum(&self, other: &StripProfile) -> StripProfile {
        let mut rows = self.rows.clone();
        for &(s, d) in &other.rows {
            match rows.iter_mut().find(|(t, _)| *t == s) {
                Some(e) => e.1 += d,
                None => rows.push((s, d)),
            }
        }
        let mut cols = self.cols.clone();
        for &(s, d) in &other.cols {
            match cols.iter_mut().find(|(t, _)| *t == s) {
                Some(e) => e.1 += d,
                None => cols.push((s, d)),
            }
        }
        StripProfile::new(rows, cols).expect("sum of valid profiles is valid")
    }

    pub fn max_moore(&self) -> u8 {
        let r = self.rows.iter().filter_map(|&(s, _)| match s {
            RowStrip::Moore(p) => Some(p),
            _ => None,
        });
        let c = self.cols.iter().filter_map(|&(s, _)| match s {
            ColStrip::Moore(p) => Some(p),
            _ => None,
        });
        r.chain(c).max().unwrap_or(0)
    }
}

impl fmt::Display for StripProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: Vec<String>| if v.is_empty() { "-".to_string() } else { v.join(" ") };
        let rows = side(self.rows.iter().map(|(s, d)| format!("{s}:{d}")).collect());
        let cols = side(self.cols.iter().map(|(s, d)| format!("{s}:{d}")).collect());
        write!(f, "{rows} x {cols}")
    }
}

/// A dense block matrix; entries are stored row-major over global indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockMatrix {
    schema: SchemaId,
    profile: StripProfile,
    entries: Vec<u32>,
}

/// Stable digest of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixDigest(pub [u8; 32]);

impl fmt::Display for MatrixDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl BlockMatrix {
    pub fn zero(schema: SchemaId, profile: StripProfile) -> Result<Self, MatrixError> {
        for &(r, _) in profile.rows() {
            for &(c, _) in profile.cols() {
                cell_domain(schema, r, c)?;
            }
        }
        if profile.cols().is_empty() {
            for &(r, _) in profile.rows() {
                schema.check_strip(crate::schema::StripId::Row(r))?;
            }
        }
        if profile.rows().is_empty() {
            for &(c, _) in profile.cols() {
                schema.check_strip(crate::schema::StripId::Col(c))?;
            }
        }
        let n = profile.num_rows() * profile.num_cols();
        Ok(BlockMatrix { schema, profile, entries: vec![0; n] })
    }

    /// Builds a matrix from a raw row-major buffer without reducing; check with [`validate`].
    ///
    /// [`validate`]: BlockMatrix::validate
    pub fn from_raw(schema: SchemaId, profile: StripProfile, entries: Vec<u32>) -> Result<Self, MatrixError> {
        let mut m = BlockMatrix::zero(schema, profile)?;
        if entries.len() != m.entries.len() {
            return Err(MatrixError::Shape { expected: m.entries.len(), found: entries.len() });
        }
        m.entries = entries;
        Ok(m)
    }

    /// Builds a matrix from a row-major buffer of integers, reducing each into its cell ring.
    pub fn from_integers(schema: SchemaId, profile: StripProfile, values: &[i64]) -> Result<Self, MatrixError> {
        let mut m = BlockMatrix::zero(schema, profile)?;
        if values.len() != m.entries.len() {
            return Err(MatrixError::Shape { expected: m.entries.len(), found: values.len() });
        }
        let nc = m.num_cols();
        for (idx, &x) in values.iter().enumerate() {
            let (r, c) = (idx / nc, idx % nc);
            m.entries[idx] = m.domain(r, c).modulus().map_or(0, |md| md.reduce(x));
        }
        Ok(m)
    }

    pub fn schema(&self) -> SchemaId {
        self.schema
    }

    pub fn profile(&self) -> &StripProfile {
        &self.profile
    }

    pub fn num_rows(&self) -> usize {
        self.profile.num_rows()
    }

    pub fn num_cols(&self) -> usize {
        self.profile.num_cols()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.num_cols() + c]
    }

    pub fn row_strip(&self, r: usize) -> RowStrip {
        self.profile.row_labels()[r]
    }

    pub fn col_strip(&self, c: usize) -> ColStrip {
        self.profile.col_labels()[c]
    }

    pub fn domain(&self, r: usize, c: usize) -> CellDomain {
        let rs = self.profile.row_labels()[r];
        let cs = self.profile.col_labels()[c];
        cell_domain(self.schema, rs, cs).expect("profile checked at construction")
    }

    /// Sets the global entry `(r, c)` to `x` reduced into its ring; zero cells ignore the write.
    pub fn set(&mut self, r: usize, c: usize, x: i64) {
        let nc = self.num_cols();
        self.entries[r * nc + c] = self.domain(r, c).modulus().map_or(0, |m| m.reduce(x));
    }

    /// Sets entry `i, j` of the block `(row, col)`.
    pub fn set_block_entry(
        &mut self,
        row: RowStrip,
        i: usize,
        col: ColStrip,
        j: usize,
        x: i64,
    ) -> Result<(), MatrixError> {
        if i >= self.profile.row_dim(row) {
            return Err(MatrixError::IndexOutOfRange { strip: row.to_string(), index: i });
        }
        if j >= self.profile.col_dim(col) {
            return Err(MatrixError::IndexOutOfRange { strip: col.to_string(), index: j });
        }
        let r = self.profile.row_offset(row) + i;
        let c = self.profile.col_offset(col) + j;
        self.set(r, c, x);
        Ok(())
    }

    pub fn block(&self, row: RowStrip, col: ColStrip) -> Vec<Vec<u32>> {
        let (r0, c0) = (self.profile.row_offset(row), self.profile.col_offset(col));
        (0..self.profile.row_dim(row))
            .map(|i| (0..self.profile.col_dim(col)).map(|j| self.get(r0 + i, c0 + j)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        let rows = self.profile.row_labels();
        let cols = self.profile.col_labels();
        if self.entries.len() != rows.len() * cols.len() {
            return Err(MatrixError::Shape { expected: rows.len() * cols.len(), found: self.entries.len() });
        }
        for (r, &rs) in rows.iter().enumerate() {
            for (c, &cs) in cols.iter().enumerate() {
                let value = self.entries[r * cols.len() + c];
                match cell_domain(self.schema, rs, cs)? {
                    CellDomain::Zero if value != 0 => {
                        return Err(MatrixError::NonzeroInZeroCell { row: rs.to_string(), col: cs.to_string(), value })
                    }
                    CellDomain::Mod(m) if value >= m.get() => {
                        return Err(MatrixError::NonCanonical {
                            row: rs.to_string(),
                            col: cs.to_string(),
                            value,
                            modulus: m.get(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Block-diagonal sum; within each strip the rows of `self` come first.
    pub fn direct_sum(&self, other: &BlockMatrix) -> Result<BlockMatrix, MatrixError> {
        if self.schema != other.schema {
            return Err(MatrixError::SchemaMismatch(self.schema, other.schema));
        }
        let profile = self.profile.sum(&other.profile);
        let mut out = BlockMatrix::zero(self.schema, profile.clone())?;
        let place = |m: &BlockMatrix, first: bool, out: &mut BlockMatrix| {
            for &(rs, rd) in m.profile.rows() {
                let rbase = profile.row_offset(rs) + if first { 0 } else { profile.row_dim(rs) - rd };
                for &(cs, cd) in m.profile.cols() {
                    let cbase = profile.col_offset(cs) + if first { 0 } else { profile.col_dim(cs) - cd };
                    let (mr, mc) = (m.profile.row_offset(rs), m.profile.col_offset(cs));
                    for i in 0..rd {
                        for j in 0..cd {
                            let v = m.get(mr + i, mc + j);
                            let nc = out.num_cols();
                            out.entries[(rbase + i) * nc + cbase + j] = v;
                        }
                    }
                }
            }
        };
        place(self, true, &mut out);
        place(other, false, &mut out);
        Ok(out)
    }

    pub fn direct_sum_all<'a>(
        schema: SchemaId,
        parts: impl IntoIterator<Item = &'a BlockMatrix>,
    ) -> Result<BlockMatrix, MatrixError> {
        let mut acc = BlockMatrix::zero(schema, StripProfile::empty())?;
        for p in parts {
            acc = acc.direct_sum(p)?;
        }
        Ok(acc)
    }

    /// Canonical text used for hashing and golden files.
    pub fn canonical_text(&self) -> String {
        let mut s = format!("{}|{}|", self.schema, self.profile);
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&v.to_string());
        }
        s
    }

    pub fn canonical_hash(&self) -> MatrixDigest {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        MatrixDigest(digest.into())
    }

    /// Copy with the entries replaced by `entries` (already canonical).
    pub(crate) fn with_entries(&self, entries: Vec<u32>) -> BlockMatrix {
        debug_assert_eq!(entries.len(), self.entries.len());
        BlockMatrix { schema: self.schema, profile: self.profile.clone(), entries }
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u32] {
        &mut self.entries
    }

    /// Reinterprets the entries under another schema with the same strips,
    /// mapping each entry through `f(value, old ring, new ring)`.
    pub fn map_schema(
        &self,
        schema: SchemaId,
        f: impl Fn(u32, CellDomain, CellDomain) -> u32,
    ) -> Result<BlockMatrix, MatrixError> {
        let mut out = BlockMatrix::zero(schema, self.profile.clone())?;
        let nc = self.num_cols();
        for r in 0..self.num_rows() {
            for c in 0..nc {
                let (old, new) = (self.domain(r, c), out.domain(r, c));
                let v = f(self.get(r, c), old, new);
                out.entries[r * nc + c] = new.modulus().map_or(0, |m| m.reduce(v as i64));
            }
        }
        Ok(out)
    }

    /// Submatrix on the given global rows and columns (kept in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BlockMatrix {
        let rl = self.profile.row_labels();
        let cl = self.profile.col_labels();
        let mut rd: Vec<(RowStrip, usize)> = Vec::new();
        for &r in rows {
            match rd.iter_mut().find(|(s, _)| *s == rl[r]) {
                Some(e) => e.1 += 1,
                None => rd.push((rl[r], 1)),
            }
        }
        let mut cd: Vec<(ColStrip, usize)> = Vec::new();
        for &c in cols {
            match cd.iter_mut().find(|(s, _)| *s == cl[c]) {
                Some(e) => e.1 += 1,
                None => cd.push((cl[c], 1)),
            }
        }
        let profile = StripProfile::new(rd, cd).expect("sub-profile is valid");
        let mut sorted_rows = rows.to_vec();
        sorted_rows.sort_by_key(|&r| (rl[r], r));
        let mut sorted_cols = cols.to_vec();
        sorted_cols.sort_by_key(|&c| (cl[c], c));
        let entries = sorted_rows
            .iter()
            .flat_map(|&r| sorted_cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        BlockMatrix { schema: self.schema, profile, entries }
    }
}

impl fmt::Display for BlockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "schema {} profile {}", self.schema, self.profile)?;
        let rl = self.profile.row_labels();
        for (r, s) in rl.iter().enumerate() {
            let row: Vec<String> = (0..self.num_cols()).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  {:<6} [{}]", s.to_string(), row.join(" "))?;
        }
        Ok(())
    }
}

/// Modulus of a cell as a plain integer (1 for zero cells).
pub fn cell_size(domain: CellDomain) -> u32 {
    domain.modulus().map_or(1, Modulus::get)
}

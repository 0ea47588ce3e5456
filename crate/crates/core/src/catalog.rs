//! Indecomposable normal forms of each schema, their names and matrices.
//!
//! Names use an ASCII rendering of the usual notation: `X(eta 3 eta)^2_1`
//! carries a Moore column of parameter 2 and a Moore row of parameter 1.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::block_matrix::{BlockMatrix, MatrixDigest, MatrixError, StripProfile};
use crate::schema::{ColStrip, MooreCaps, RowStrip, SchemaId, SchemaKind, StripId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("cannot parse catalog name `{0}`")]
    Parse(String),
    #[error("{name} is not an indecomposable of schema {schema}: {reason}")]
    Invalid { name: String, schema: SchemaId, reason: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Shape family of an indecomposable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `X(eta v eta)`: rows S_n2, C_eta over S_n3.
    EtaVEta,
    /// `X(eta eta v eta eta)`: rows S_n, S_n1 over S_n2, S_n3.
    EtaEtaVEtaEta,
    /// `X(eta eta v eta)`: rows S_n, S_n2 over S_n2, S_n3.
    EtaEtaVEta,
    /// `X(eta v eta eta)`: rows S_n1, C_eta over S_n3.
    EtaVEtaEta,
    /// `X(eta eta v)`: row S_n over S_n2, S_n3.
    EtaEtaV,
    /// `X(v eta eta)`: rows S_n, S_n1 over S_n3.
    VEtaEta,
    /// `X(eta v)`: row C_eta over S_n3.
    EtaV,
    /// `X(v eta)`: rows S_n, S_n2 over S_n3.
    VEta,
    /// `X(v)`: row S_n over S_n3.
    V,
    Eta1,
    Eta2,
    EtaEta0,
    EtaEta1,
    /// A single unit in a 3-primary cell; `v` is set only where `1` and `-1` differ.
    Pure3 { row: RowStrip, col: ColStrip },
    /// A 1x0 or 0x1 summand.
    Atom(StripId),
}

const CHAIN_FAMILIES: [Family; 9] = [
    Family::EtaVEta,
    Family::EtaEtaVEtaEta,
    Family::EtaEtaVEta,
    Family::EtaVEtaEta,
    Family::EtaEtaV,
    Family::VEtaEta,
    Family::EtaV,
    Family::VEta,
    Family::V,
];

const ETA_FAMILIES: [Family; 4] = [Family::Eta1, Family::Eta2, Family::EtaEta0, Family::EtaEta1];

impl Family {
    /// Number of `eta` tokens before and after `v` in the rendered name.
    fn eta_pattern(self) -> Option<(usize, usize)> {
        Some(match self {
            Family::EtaVEta => (1, 1),
            Family::EtaEtaVEtaEta => (2, 2),
            Family::EtaEtaVEta => (2, 1),
            Family::EtaVEtaEta => (1, 2),
            Family::EtaEtaV => (2, 0),
            Family::VEtaEta => (0, 2),
            Family::EtaV => (1, 0),
            Family::VEta => (0, 1),
            Family::V => (0, 0),
            _ => return None,
        })
    }

    /// Base shape as (rows, cols, row-major entries); `v` fills the parameter slot.
    fn base_shape(self, v: i64) -> (Vec<RowStrip>, Vec<ColStrip>, Vec<i64>) {
        use ColStrip as C;
        use RowStrip as R;
        match self {
            Family::EtaVEta => (vec![R::Sn2, R::Ceta], vec![C::S3], vec![1, v]),
            Family::EtaEtaVEtaEta => (vec![R::Sn, R::Sn1], vec![C::S2, C::S3], vec![1, v, 0, 1]),
            Family::EtaEtaVEta => (vec![R::Sn, R::Sn2], vec![C::S2, C::S3], vec![1, v, 0, 1]),
            Family::EtaVEtaEta => (vec![R::Sn1, R::Ceta], vec![C::S3], vec![1, v]),
            Family::EtaEtaV => (vec![R::Sn], vec![C::S2, C::S3], vec![1, v]),
            Family::VEtaEta => (vec![R::Sn, R::Sn1], vec![C::S3], vec![v, 1]),
            Family::EtaV => (vec![R::Ceta], vec![C::S3], vec![v]),
            Family::VEta => (vec![R::Sn, R::Sn2], vec![C::S3], vec![v, 1]),
            Family::V => (vec![R::Sn], vec![C::S3], vec![v]),
            Family::Eta1 => (vec![R::Sn1], vec![C::S2], vec![1]),
            Family::Eta2 => (vec![R::Sn2], vec![C::S3], vec![1]),
            Family::EtaEta0 => (vec![R::Sn], vec![C::S2], vec![1]),
            Family::EtaEta1 => (vec![R::Sn1], vec![C::S3], vec![1]),
            Family::Pure3 { row, col } => (vec![row], vec![col], vec![v]),
            Family::Atom(StripId::Row(r)) => (vec![r], vec![], vec![]),
            Family::Atom(StripId::Col(c)) => (vec![], vec![c], vec![]),
        }
    }

    /// Row that receives the unit of an added Moore column.
    fn moore_col_anchor(self) -> Option<RowStrip> {
        match self {
            Family::EtaVEta | Family::EtaVEtaEta | Family::EtaV => Some(RowStrip::Ceta),
            Family::EtaEtaVEtaEta
            | Family::EtaEtaVEta
            | Family::EtaEtaV
            | Family::VEtaEta
            | Family::VEta
            | Family::V
            | Family::EtaEta0 => Some(RowStrip::Sn),
            _ => None,
        }
    }

    /// Whether an added Moore row (unit in the S_n3 column) is allowed.
    fn takes_moore_row(self) -> bool {
        !matches!(self, Family::Eta1 | Family::EtaEta0 | Family::Pure3 { .. } | Family::Atom(_))
    }

    fn has_value(self) -> bool {
        self.eta_pattern().is_some()
    }
}

/// A named indecomposable of one schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndecName {
    pub schema: SchemaId,
    pub family: Family,
    pub v: Option<u32>,
    /// Parameter of the Moore column, if decorated.
    pub r: Option<u8>,
    /// Parameter of the Moore row, if decorated.
    pub s: Option<u8>,
}

/// Legal values of `v` for an undecorated member of `family`.
fn base_values(schema: SchemaId, family: Family) -> Vec<u32> {
    match (schema.kind(), schema.plus(), family) {
        (SchemaKind::A0 | SchemaKind::Aprime, _, Family::EtaVEta) => vec![1, 2, 3],
        (SchemaKind::A0 | SchemaKind::Aprime, _, Family::V) => (1..=12).collect(),
        (SchemaKind::A0 | SchemaKind::Aprime, _, _) => (1..=6).collect(),
        (SchemaKind::Aprime2, _, Family::EtaVEta) => vec![1],
        (SchemaKind::Aprime2, false, Family::V) => vec![1, 2, 3, 4],
        (SchemaKind::Aprime2, true, Family::V) => (1..=7).collect(),
        (SchemaKind::Aprime2, false, _) => vec![1, 2],
        (SchemaKind::Aprime2, true, _) => vec![1, 2, 3],
        (SchemaKind::Aprime3, _, _) => vec![],
    }
}

/// Legal values of `v` when a Moore strip is attached (Aprime only).
fn decorated_values(family: Family) -> Vec<u32> {
    match family {
        Family::EtaVEta => vec![3],
        Family::V => vec![3, 6, 9, 12],
        f if f.has_value() => vec![3, 6],
        _ => vec![],
    }
}

/// 3-primary 1x1 pieces of a schema at the given caps.
fn pure3_entries(schema: SchemaId, caps: MooreCaps) -> Vec<IndecName> {
    let mut out = Vec::new();
    let mut push = |row, col, v| {
        out.push(IndecName { schema, family: Family::Pure3 { row, col }, v, r: None, s: None });
    };
    if schema.kind() == SchemaKind::Aprime3 {
        let signs: Vec<Option<u32>> = if schema.plus() { vec![Some(1), Some(2)] } else { vec![None] };
        for row in [RowStrip::Sn, RowStrip::Ceta] {
            for &v in &signs {
                push(row, ColStrip::S3, v);
            }
        }
    }
    for s in 1..=caps.s {
        push(RowStrip::Moore(s), ColStrip::S3, None);
        for r in 1..=caps.r {
            push(RowStrip::Moore(s), ColStrip::Moore(r), None);
        }
    }
    for row in [RowStrip::Sn, RowStrip::Ceta] {
        for r in 1..=caps.r {
            push(row, ColStrip::Moore(r), None);
        }
    }
    out
}

impl IndecName {
    pub fn plain(schema: SchemaId, family: Family, v: Option<u32>) -> Self {
        IndecName { schema, family, v, r: None, s: None }
    }

    pub fn atom(schema: SchemaId, strip: StripId) -> Self {
        IndecName::plain(schema, Family::Atom(strip), None)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.family, Family::Atom(_))
    }

    /// Entries found by the orbit census at small caps but absent from the printed
    /// Aprime classification: `X(12)` with a Moore strip, and the 3-primary 1x1 pieces.
    pub fn is_supplement(&self) -> bool {
        self.schema.kind() == SchemaKind::Aprime
            && (matches!(self.family, Family::Pure3 { .. })
                || (self.family == Family::V && self.v == Some(12) && (self.r.is_some() || self.s.is_some())))
    }

    fn invalid(&self, reason: impl Into<String>) -> CatalogError {
        CatalogError::Invalid { name: self.to_string(), schema: self.schema, reason: reason.into() }
    }

    /// Checks the parameters against the schema's legal sets.
    pub fn check(&self) -> Result<(), CatalogError> {
        let schema = self.schema;
        if self.r == Some(0) || self.s == Some(0) {
            return Err(self.invalid("Moore parameters start at 1"));
        }
        let decorated = self.r.is_some() || self.s.is_some();
        if decorated && schema.kind() != SchemaKind::Aprime {
            return Err(self.invalid("Moore decorations exist only in Aprime"));
        }
        if self.r.is_some() && self.family.moore_col_anchor().is_none() {
            return Err(self.invalid("family takes no Moore column"));
        }
        if self.s.is_some() && !self.family.takes_moore_row() {
            return Err(self.invalid("family takes no Moore row"));
        }
        match self.family {
            Family::Atom(strip) => {
                if self.v.is_some() || decorated {
                    return Err(self.invalid("atoms carry no parameters"));
                }
                schema.check_strip(strip).map_err(|e| self.invalid(e.to_string()))
            }
            Family::Pure3 { row, col } => {
                let sign_split = schema == SchemaId::APRIME3_PLUS;
                let legal = match (row, col) {
                    (RowStrip::Sn | RowStrip::Ceta, ColStrip::S3) => schema.kind() == SchemaKind::Aprime3,
                    (RowStrip::Moore(_), ColStrip::S3 | ColStrip::Moore(_))
                    | (RowStrip::Sn | RowStrip::Ceta, ColStrip::Moore(_)) => schema.has_moore()
                        && matches!(schema.kind(), SchemaKind::Aprime | SchemaKind::Aprime3),
                    _ => false,
                };
                if !legal || decorated {
                    return Err(self.invalid("no such 3-primary piece"));
                }
                let wants_sign = sign_split && col == ColStrip::S3 && !matches!(row, RowStrip::Moore(_));
                match (wants_sign, self.v) {
                    (true, Some(1 | 2)) | (false, None) => Ok(()),
                    _ => Err(self.invalid("sign parameter mismatch")),
                }
            }
            f if ETA_FAMILIES.contains(&f) => {
                if self.v.is_some() {
                    return Err(self.invalid("family carries no value"));
                }
                if schema.kind() == SchemaKind::Aprime3 {
                    return Err(self.invalid("2-primary family in a 3-primary schema"));
                }
                Ok(())
            }
            f => {
                let Some(v) = self.v else {
                    return Err(self.invalid("missing value"));
                };
                let legal = if decorated { decorated_values(f) } else { base_values(schema, f) };
                if legal.contains(&v) {
                    Ok(())
                } else {
                    Err(self.invalid(format!("v = {v} outside {legal:?}")))
                }
            }
        }
    }
}

/// Every indecomposable of `schema` with Moore parameters up to the caps, atoms last.
pub fn catalog_entries(schema: SchemaId, r_cap: u8, s_cap: u8) -> Vec<IndecName> {
    let caps = MooreCaps::new(r_cap, s_cap);
    let mut out = Vec::new();
    let decorate = schema.kind() == SchemaKind::Aprime;
    for family in CHAIN_FAMILIES {
        for v in base_values(schema, family) {
            out.push(IndecName::plain(schema, family, Some(v)));
        }
        if decorate {
            for v in decorated_values(family) {
                push_decorated(&mut out, IndecName::plain(schema, family, Some(v)), caps);
            }
        }
    }
    if schema.kind() != SchemaKind::Aprime3 {
        for family in ETA_FAMILIES {
            let base = IndecName::plain(schema, family, None);
            out.push(base);
            if decorate {
                push_decorated(&mut out, base, caps);
            }
        }
    }
    if schema.has_moore() && matches!(schema.kind(), SchemaKind::Aprime | SchemaKind::Aprime3) {
        out.extend(pure3_entries(schema, caps));
    }
    for row in schema.row_strips(s_cap) {
        out.push(IndecName::atom(schema, StripId::Row(row)));
    }
    for col in schema.col_strips(r_cap) {
        out.push(IndecName::atom(schema, StripId::Col(col)));
    }
    out
}

fn push_decorated(out: &mut Vec<IndecName>, base: IndecName, caps: MooreCaps) {
    let col = base.family.moore_col_anchor().is_some();
    let row = base.family.takes_moore_row();
    if col {
        for r in 1..=caps.r {
            out.push(IndecName { r: Some(r), ..base });
        }
    }
    if row {
        for s in 1..=caps.s {
            out.push(IndecName { s: Some(s), ..base });
        }
    }
    if col && row {
        for r in 1..=caps.r {
            for s in 1..=caps.s {
                out.push(IndecName { r: Some(r), s: Some(s), ..base });
            }
        }
    }
}

/// The normal-form matrix of a catalog entry.
pub fn matrix_of(name: &IndecName) -> Result<BlockMatrix, CatalogError> {
    name.check()?;
    let v = name.v.map_or(1, i64::from);
    let (mut rows, mut cols, values) = name.family.base_shape(v);
    let (nr, nc) = (rows.len(), cols.len());
    let mut cells: Vec<(RowStrip, ColStrip, i64)> = Vec::new();
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            cells.push((r, c, values[i * nc + j]));
        }
    }
    if let Some(r) = name.r {
        let anchor = name.family.moore_col_anchor().expect("checked");
        cols.push(ColStrip::Moore(r));
        cells.push((anchor, ColStrip::Moore(r), 1));
    }
    if let Some(s) = name.s {
        rows.push(RowStrip::Moore(s));
        cells.push((RowStrip::Moore(s), ColStrip::S3, 1));
    }
    debug_assert!(rows.len() >= nr);
    let profile = StripProfile::new(
        rows.iter().map(|&r| (r, 1)).collect(),
        cols.iter().map(|&c| (c, 1)).collect(),
    )?;
    let mut m = BlockMatrix::zero(name.schema, profile)?;
    for (r, c, x) in cells {
        m.set_block_entry(r, 0, c, 0, x)?;
    }
    m.validate()?;
    Ok(m)
}

/// A schema's catalog with matrices, indexed by strip profile and by matrix.
#[derive(Debug, Clone)]
pub struct Catalog {
    schema: SchemaId,
    caps: MooreCaps,
    entries: Vec<(IndecName, BlockMatrix)>,
    by_matrix: HashMap<MatrixDigest, usize>,
    by_profile: HashMap<StripProfile, Vec<usize>>,
}

impl Catalog {
    pub fn new(schema: SchemaId, caps: MooreCaps) -> Self {
        let mut entries = Vec::new();
        let mut by_matrix = HashMap::new();
        let mut by_profile: HashMap<StripProfile, Vec<usize>> = HashMap::new();
        for name in catalog_entries(schema, caps.r, caps.s) {
            let m = matrix_of(&name).expect("catalog entries are valid");
            by_matrix.insert(m.canonical_hash(), entries.len());
            by_profile.entry(m.profile().clone()).or_default().push(entries.len());
            entries.push((name, m));
        }
        Catalog { schema, caps, entries, by_matrix, by_profile }
    }

    pub fn schema(&self) -> SchemaId {
        self.schema
    }

    pub fn caps(&self) -> MooreCaps {
        self.caps
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(IndecName, BlockMatrix)] {
        &self.entries
    }

    /// The entry whose normal form is exactly `m`.
    pub fn lookup(&self, m: &BlockMatrix) -> Option<IndecName> {
        self.by_matrix.get(&m.canonical_hash()).map(|&i| self.entries[i].0)
    }

    /// Entries whose normal form has exactly this profile.
    pub fn with_profile(&self, profile: &StripProfile) -> Vec<&(IndecName, BlockMatrix)> {
        self.by_profile.get(profile).map_or_else(Vec::new, |ix| ix.iter().map(|&i| &self.entries[i]).collect())
    }
}

fn atom_text(strip: StripId) -> String {
    match strip {
        StripId::Row(RowStrip::Sn) => "S^n".into(),
        StripId::Row(RowStrip::Sn1) => "S^{n+1}".into(),
        StripId::Row(RowStrip::Sn2) => "S^{n+2}".into(),
        StripId::Row(RowStrip::Ceta) => "C_eta".into(),
        StripId::Row(RowStrip::Moore(s)) => format!("M(3^{s})^n"),
        StripId::Col(ColStrip::S2) => "S^{n+3}".into(),
        StripId::Col(ColStrip::S3) => "S^{n+4}".into(),
        StripId::Col(ColStrip::Moore(r)) => format!("M(3^{r})^{{n+3}}"),
    }
}

fn parse_atom(text: &str) -> Option<StripId> {
    let fixed = [
        StripId::Row(RowStrip::Sn),
        StripId::Row(RowStrip::Sn1),
        StripId::Row(RowStrip::Sn2),
        StripId::Row(RowStrip::Ceta),
        StripId::Col(ColStrip::S2),
        StripId::Col(ColStrip::S3),
    ];
    if let Some(&s) = fixed.iter().find(|&&s| atom_text(s) == text) {
        return Some(s);
    }
    let rest = text.strip_prefix("M(3^")?;
    let (num, tail) = rest.split_once(')')?;
    let p: u8 = num.parse().ok()?;
    match tail {
        "^n" => Some(StripId::Row(RowStrip::Moore(p))),
        "^{n+3}" => Some(StripId::Col(ColStrip::Moore(p))),
        _ => None,
    }
}

impl fmt::Display for IndecName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Atom(strip) => return f.write_str(&atom_text(strip)),
            Family::Pure3 { row, col } => {
                write!(f, "X3({row}; {col}")?;
                match self.v {
                    Some(2) => f.write_str("; -1")?,
                    Some(v) => write!(f, "; {v}")?,
                    None => {}
                }
                return f.write_str(")");
            }
            Family::Eta1 => f.write_str("X(eta_1)")?,
            Family::Eta2 => f.write_str("X(eta_2)")?,
            Family::EtaEta0 => f.write_str("X(eta eta)_0")?,
            Family::EtaEta1 => f.write_str("X(eta eta)_1")?,
            fam => {
                let (before, after) = fam.eta_pattern().expect("chain family");
                let mut tokens = vec!["eta".to_string(); before];
                tokens.push(self.v.map_or_else(|| "v".to_string(), |v| v.to_string()));
                tokens.extend(std::iter::repeat_n("eta".to_string(), after));
                write!(f, "X({})", tokens.join(" "))?;
            }
        }
        if let Some(r) = self.r {
            write!(f, "^{r}")?;
        }
        if let Some(s) = self.s {
            write!(f, "_{s}")?;
        }
        Ok(())
    }
}

/// Parses a rendered name in the context of `schema` and checks its parameters.
pub fn parse_name(text: &str, schema: SchemaId) -> Result<IndecName, CatalogError> {
    let err = || CatalogError::Parse(text.to_string());
    let text = text.trim();
    if let Some(strip) = parse_atom(text) {
        let name = IndecName::atom(schema, strip);
        name.check()?;
        return Ok(name);
    }
    if let Some(inner) = text.strip_prefix("X3(").and_then(|t| t.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
        let (row, col, v) = match parts.as_slice() {
            [r, c] => (r, c, None),
            [r, c, "1"] => (r, c, Some(1)),
            [r, c, "-1"] => (r, c, Some(2)),
            _ => return Err(err()),
        };
        let row = RowStrip::from_str(row).map_err(|_| err())?;
        let col = ColStrip::from_str(col).map_err(|_| err())?;
        let name = IndecName::plain(schema, Family::Pure3 { row, col }, v);
        name.check()?;
        return Ok(name);
    }
    let inner_start = text.strip_prefix("X(").ok_or_else(err)?;
    let close = inner_start.find(')').ok_or_else(err)?;
    let (inner, mut rest) = (&inner_start[..close], &inner_start[close + 1..]);
    let tokens: Vec<&str> = inner.split_whitespace().collect();
    let (family, v) = match tokens.as_slice() {
        ["eta_1"] => (Family::Eta1, None),
        ["eta_2"] => (Family::Eta2, None),
        ["eta", "eta"] => {
            let fam = if let Some(r) = rest.strip_prefix("_0") {
                rest = r;
                Family::EtaEta0
            } else if let Some(r) = rest.strip_prefix("_1") {
                rest = r;
                Family::EtaEta1
            } else {
                return Err(err());
            };
            (fam, None)
        }
        _ => {
            let pos = tokens.iter().position(|&t| t != "eta").ok_or_else(err)?;
            if tokens[pos + 1..].iter().any(|&t| t != "eta") {
                return Err(err());
            }
            let v: u32 = tokens[pos].parse().map_err(|_| err())?;
            let pattern = (pos, tokens.len() - pos - 1);
            let fam = CHAIN_FAMILIES.into_iter().find(|f| f.eta_pattern() == Some(pattern)).ok_or_else(err)?;
            (fam, Some(v))
        }
    };
    let (r, s) = parse_decorations(rest).ok_or_else(err)?;
    let name = IndecName { schema, family, v, r, s };
    name.check()?;
    Ok(name)
}

fn parse_decorations(mut rest: &str) -> Option<(Option<u8>, Option<u8>)> {
    let mut take = |prefix: char| -> Option<Option<u8>> {
        let Some(t) = rest.strip_prefix(prefix) else {
            return Some(None);
        };
        let end = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
        let n: u8 = t[..end].parse().ok()?;
        rest = &t[end..];
        Some(Some(n))
    };
    let r = take('^')?;
    let s = take('_')?;
    rest.is_empty().then_some((r, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aprime(text: &str) -> IndecName {
        parse_name(text, SchemaId::APRIME).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for schema in [
            SchemaId::A0,
            SchemaId::APRIME,
            SchemaId::APRIME2,
            SchemaId::APRIME2_PLUS,
            SchemaId::APRIME3,
            SchemaId::APRIME3_PLUS,
        ] {
            for name in catalog_entries(schema, 2, 2) {
                let text = name.to_string();
                assert_eq!(parse_name(&text, schema).unwrap(), name, "{text}");
            }
        }
        assert_eq!(aprime("X(eta 3 eta)^2_1").to_string(), "X(eta 3 eta)^2_1");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(parse_name("X(eta 5 eta)", SchemaId::APRIME).is_err());
        assert!(parse_name("X(13)", SchemaId::APRIME).is_err());
        assert!(parse_name("X(8)", SchemaId::APRIME2_PLUS).is_err());
        assert!(parse_name("X(5)^1", SchemaId::APRIME).is_err());
        assert!(parse_name("X(3)^1", SchemaId::A0).is_err());
        assert!(parse_name("X(eta_1)^1", SchemaId::APRIME).is_err());
        assert!(parse_name("X(7)", SchemaId::APRIME).is_ok());
    }

    #[test]
    fn family_sizes() {
        let count = |schema, fam| catalog_entries(schema, 1, 1).iter().filter(|n| n.family == fam && n.r.is_none() && n.s.is_none()).count();
        assert_eq!(count(SchemaId::A0, Family::V), 12);
        assert_eq!(count(SchemaId::APRIME2_PLUS, Family::V), 7);
        assert_eq!(count(SchemaId::APRIME2, Family::V), 4);
        assert_eq!(count(SchemaId::APRIME, Family::EtaVEta), 3);
    }

    #[test]
    fn example_matrices() {
        let m = matrix_of(&aprime("X(5)")).unwrap();
        assert_eq!(m.entries(), &[5]);
        let m = matrix_of(&aprime("X(eta 3 eta)^1_1")).unwrap();
        assert_eq!(m.profile().to_string(), "S_n2:1 C_eta:1 M3^1:1 x S_n3:1 M3^1:1");
        assert_eq!(m.entries(), &[1, 0, 3, 1, 1, 0]);
        let m = matrix_of(&aprime("X(eta_1)")).unwrap();
        assert_eq!(m.profile().rows(), &[(RowStrip::Sn1, 1)]);
        assert_eq!(m.profile().cols(), &[(ColStrip::S2, 1)]);
    }

    #[test]
    fn every_entry_validates() {
        for schema in [SchemaId::A0, SchemaId::APRIME, SchemaId::APRIME2_PLUS, SchemaId::APRIME3_PLUS] {
            let cat = Catalog::new(schema, MooreCaps::new(2, 2));
            for (name, m) in cat.entries() {
                assert_eq!(cat.lookup(m), Some(*name));
            }
        }
    }
}

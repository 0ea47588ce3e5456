//! The four matrix problems as data: strips, cell rings and admissible moves.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ring_core::Modulus;

pub const DEFAULT_MOORE_CAP: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("strip {strip} does not exist in schema {schema}")]
    StripNotInSchema { strip: String, schema: SchemaId },
    #[error("Moore parameter must be at least 1")]
    ZeroMooreParameter,
    #[error("Moore parameter {param} exceeds the cap {cap}")]
    MooreAboveCap { param: u8, cap: u8 },
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("unknown strip `{0}`")]
    UnknownStrip(String),
    #[error("the plus restriction only applies to Aprime2 and Aprime3")]
    PlusNotApplicable,
}

/// Horizontal strips, in the fixed global order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowStrip {
    Sn,
    Sn1,
    Sn2,
    Ceta,
    Moore(u8),
}

/// Vertical strips, in the fixed global order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColStrip {
    S2,
    S3,
    Moore(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Row,
    Col,
}

/// A strip on either side of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StripId {
    Row(RowStrip),
    Col(ColStrip),
}

impl StripId {
    pub fn side(self) -> Side {
        match self {
            StripId::Row(_) => Side::Row,
            StripId::Col(_) => Side::Col,
        }
    }

    pub fn moore_parameter(self) -> Option<u8> {
        match self {
            StripId::Row(RowStrip::Moore(s)) | StripId::Col(ColStrip::Moore(s)) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for RowStrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStrip::Sn => f.write_str("S_n"),
            RowStrip::Sn1 => f.write_str("S_n1"),
            RowStrip::Sn2 => f.write_str("S_n2"),
            RowStrip::Ceta => f.write_str("C_eta"),
            RowStrip::Moore(s) => write!(f, "M3^{s}"),
        }
    }
}

impl fmt::Display for ColStrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColStrip::S2 => f.write_str("S_n2"),
            ColStrip::S3 => f.write_str("S_n3"),
            ColStrip::Moore(r) => write!(f, "M3^{r}"),
        }
    }
}

impl fmt::Display for StripId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StripId::Row(r) => r.fmt(f),
            StripId::Col(c) => c.fmt(f),
        }
    }
}

fn parse_moore(text: &str) -> Option<Result<u8, SchemaError>> {
    let rest = text
        .strip_prefix("M3^")
        .or_else(|| text.strip_prefix("Moore3_n(").and_then(|t| t.strip_suffix(')')))
        .or_else(|| text.strip_prefix("Moore3_n2(").and_then(|t| t.strip_suffix(')')))?;
    Some(match rest.parse::<u8>() {
        Ok(0) => Err(SchemaError::ZeroMooreParameter),
        Ok(p) => Ok(p),
        Err(_) => Err(SchemaError::UnknownStrip(text.to_string())),
    })
}

impl FromStr for RowStrip {
    type Err = SchemaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S_n" => Ok(RowStrip::Sn),
            "S_n1" => Ok(RowStrip::Sn1),
            "S_n2" => Ok(RowStrip::Sn2),
            "C_eta" => Ok(RowStrip::Ceta),
            _ => match parse_moore(s) {
                Some(p) => p.map(RowStrip::Moore),
                None => Err(SchemaError::UnknownStrip(s.to_string())),
            },
        }
    }
}

impl FromStr for ColStrip {
    type Err = SchemaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S_n2" | "S_n2_col" => Ok(ColStrip::S2),
            "S_n3" | "S_n3_col" => Ok(ColStrip::S3),
            _ => match parse_moore(s) {
                Some(p) => p.map(ColStrip::Moore),
                None => Err(SchemaError::UnknownStrip(s.to_string())),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemaKind {
    A0,
    Aprime,
    Aprime2,
    Aprime3,
}

/// A matrix problem together with the optional sign restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemaId {
    kind: SchemaKind,
    plus: bool,
}

impl SchemaId {
    pub const A0: SchemaId = SchemaId { kind: SchemaKind::A0, plus: false };
    pub const APRIME: SchemaId = SchemaId { kind: SchemaKind::Aprime, plus: false };
    pub const APRIME2: SchemaId = SchemaId { kind: SchemaKind::Aprime2, plus: false };
    pub const APRIME3: SchemaId = SchemaId { kind: SchemaKind::Aprime3, plus: false };
    pub const APRIME2_PLUS: SchemaId = SchemaId { kind: SchemaKind::Aprime2, plus: true };
    pub const APRIME3_PLUS: SchemaId = SchemaId { kind: SchemaKind::Aprime3, plus: true };

    pub fn new(kind: SchemaKind, plus: bool) -> Result<Self, SchemaError> {
        if plus && !matches!(kind, SchemaKind::Aprime2 | SchemaKind::Aprime3) {
            return Err(SchemaError::PlusNotApplicable);
        }
        Ok(SchemaId { kind, plus })
    }

    pub fn kind(self) -> SchemaKind {
        self.kind
    }

    pub fn plus(self) -> bool {
        self.plus
    }

    pub fn has_moore(self) -> bool {
        self.kind != SchemaKind::A0
    }

    pub fn with_plus(self, plus: bool) -> Result<Self, SchemaError> {
        SchemaId::new(self.kind, plus)
    }

    /// Row strips of the schema in the fixed order.
    pub fn row_strips(self, cap: u8) -> Vec<RowStrip> {
        let mut v = vec![RowStrip::Sn, RowStrip::Sn1, RowStrip::Sn2, RowStrip::Ceta];
        if self.has_moore() {
            v.extend((1..=cap).map(RowStrip::Moore));
        }
        v
    }

    pub fn col_strips(self, cap: u8) -> Vec<ColStrip> {
        let mut v = vec![ColStrip::S2, ColStrip::S3];
        if self.has_moore() {
            v.extend((1..=cap).map(ColStrip::Moore));
        }
        v
    }

    pub fn check_strip(self, strip: StripId) -> Result<(), SchemaError> {
        match strip.moore_parameter() {
            Some(0) => Err(SchemaError::ZeroMooreParameter),
            Some(_) if !self.has_moore() => {
                Err(SchemaError::StripNotInSchema { strip: strip.to_string(), schema: self })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            SchemaKind::A0 => "A0",
            SchemaKind::Aprime => "Aprime",
            SchemaKind::Aprime2 => "Aprime2",
            SchemaKind::Aprime3 => "Aprime3",
        };
        f.write_str(name)?;
        if self.plus {
            f.write_str("+")?;
        }
        Ok(())
    }
}

impl FromStr for SchemaId {
    type Err = SchemaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, plus) = match s.strip_suffix('+') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let kind = match base {
            "A0" => SchemaKind::A0,
            "Aprime" => SchemaKind::Aprime,
            "Aprime2" => SchemaKind::Aprime2,
            "Aprime3" => SchemaKind::Aprime3,
            _ => return Err(SchemaError::UnknownSchema(s.to_string())),
        };
        SchemaId::new(kind, plus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellDomain {
    Zero,
    Mod(Modulus),
}

impl CellDomain {
    pub fn modulus(self) -> Option<Modulus> {
        match self {
            CellDomain::Zero => None,
            CellDomain::Mod(m) => Some(m),
        }
    }

    /// Number of possible values (1 for a zero cell).
    pub fn size(self) -> u32 {
        self.modulus().map_or(1, Modulus::get)
    }
}

/// The full ring `Z/24` table; the primary schemas are obtained by reduction.
fn full_table(row: RowStrip, col: ColStrip) -> u32 {
    use ColStrip as C;
    use RowStrip as R;
    match (row, col) {
        (R::Sn, C::S2) => 2,
        (R::Sn, C::S3) => 24,
        (R::Sn, C::Moore(_)) => 3,
        (R::Sn1, C::S2) | (R::Sn1, C::S3) => 2,
        (R::Sn1, C::Moore(_)) => 0,
        (R::Sn2, C::S2) => 0,
        (R::Sn2, C::S3) => 2,
        (R::Sn2, C::Moore(_)) => 0,
        (R::Ceta, C::S2) => 0,
        (R::Ceta, C::S3) => 12,
        (R::Ceta, C::Moore(_)) => 3,
        (R::Moore(_), C::S2) => 0,
        (R::Moore(_), C::S3) | (R::Moore(_), C::Moore(_)) => 3,
    }
}

pub fn cell_domain(schema: SchemaId, row: RowStrip, col: ColStrip) -> Result<CellDomain, SchemaError> {
    schema.check_strip(StripId::Row(row))?;
    schema.check_strip(StripId::Col(col))?;
    let m = match schema.kind {
        SchemaKind::A0 | SchemaKind::Aprime => full_table(row, col),
        SchemaKind::Aprime2 => match full_table(row, col) {
            24 => 8,
            12 => 4,
            3 => 0,
            m => m,
        },
        SchemaKind::Aprime3 => match full_table(row, col) {
            24 | 12 | 3 => 3,
            _ => 0,
        },
    };
    Ok(if m == 0 {
        CellDomain::Zero
    } else {
        CellDomain::Mod(Modulus::new(m).expect("table moduli are admissible"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    RowAdd,
    RowScale,
    RowSwap,
    ColAdd,
    ColScale,
    ColSwap,
}

impl RuleKind {
    pub fn side(self) -> Side {
        match self {
            RuleKind::RowAdd | RuleKind::RowScale | RuleKind::RowSwap => Side::Row,
            _ => Side::Col,
        }
    }
}

/// What the integer attached to a move may be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    /// Any integer `k`.
    Free,
    /// Only `a*k`; moves store `k` and the engine multiplies.
    Multiple(u32),
    /// Scaling by `-1`.
    MinusOne,
    /// Plain and signed transpositions.
    AnySwap,
    /// Only the signed transpositions `(i,-j)` and `(-i,j)`.
    SignedSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MoveRule {
    pub kind: RuleKind,
    pub src: StripId,
    pub dst: StripId,
    pub coefficient: Coefficient,
    /// The source item of the transformation lists, e.g. `(f2)`.
    pub label: &'static str,
}

impl MoveRule {
    /// Multiplier applied to the move's `k` before it acts on entries.
    pub fn multiplier(&self) -> i64 {
        match self.coefficient {
            Coefficient::Multiple(a) => a as i64,
            _ => 1,
        }
    }
}

/// Factor with which a source entry enters the destination cell.
///
/// A `Z/2` entry composed into `Z/24` (or `Z/8`) is `eta^3 = 12`; all other
/// composites act through the reduction or lift of the source value.
pub fn effect_factor(src: CellDomain, dst: CellDomain) -> Option<u32> {
    match (src, dst) {
        (CellDomain::Mod(s), CellDomain::Mod(d)) => {
            if s.get() == 2 && (d.get() == 24 || d.get() == 8) {
                Some(12 % d.get())
            } else {
                Some(1)
            }
        }
        _ => None,
    }
}

pub fn scale_swap_restricted(schema: SchemaId, strip: StripId) -> bool {
    match (schema.kind, schema.plus) {
        (SchemaKind::Aprime2, true) => true,
        (SchemaKind::Aprime3, true) => matches!(
            strip,
            StripId::Col(ColStrip::S3) | StripId::Row(RowStrip::Sn) | StripId::Row(RowStrip::Ceta)
        ),
        _ => false,
    }
}

/// The complete rule list for a schema with Moore strips up to `cap`.
pub fn admissible_moves(schema: SchemaId, cap: u8) -> Vec<MoveRule> {
    use ColStrip as C;
    use RowStrip as R;
    let mut out = Vec::new();
    let rows = schema.row_strips(cap);
    let cols = schema.col_strips(cap);
    let all: Vec<StripId> = rows
        .iter()
        .map(|&r| StripId::Row(r))
        .chain(cols.iter().map(|&c| StripId::Col(c)))
        .collect();
    for &strip in &all {
        let (add, scale, swap) = match strip.side() {
            Side::Row => (RuleKind::RowAdd, RuleKind::RowScale, RuleKind::RowSwap),
            Side::Col => (RuleKind::ColAdd, RuleKind::ColScale, RuleKind::ColSwap),
        };
        out.push(MoveRule { kind: add, src: strip, dst: strip, coefficient: Coefficient::Free, label: "el" });
        let restricted = scale_swap_restricted(schema, strip);
        if !restricted {
            out.push(MoveRule { kind: scale, src: strip, dst: strip, coefficient: Coefficient::MinusOne, label: "el" });
        }
        let swap_coeff = if restricted { Coefficient::SignedSwap } else { Coefficient::AnySwap };
        out.push(MoveRule { kind: swap, src: strip, dst: strip, coefficient: swap_coeff, label: "el" });
    }
    let row = |src: R, dst: R, coefficient: Coefficient, label: &'static str| MoveRule {
        kind: RuleKind::RowAdd,
        src: StripId::Row(src),
        dst: StripId::Row(dst),
        coefficient,
        label,
    };
    let col = |src: C, dst: C, label: &'static str| MoveRule {
        kind: RuleKind::ColAdd,
        src: StripId::Col(src),
        dst: StripId::Col(dst),
        coefficient: Coefficient::Free,
        label,
    };
    let two_primary = matches!(schema.kind, SchemaKind::A0 | SchemaKind::Aprime | SchemaKind::Aprime2);
    if two_primary {
        out.push(col(C::S2, C::S3, "(c)"));
        out.push(row(R::Sn1, R::Sn, Coefficient::Free, "(d)"));
        out.push(row(R::Sn2, R::Sn, Coefficient::Free, "(d)"));
        out.push(row(R::Sn2, R::Sn1, Coefficient::Free, "(e)"));
        out.push(row(R::Sn2, R::Ceta, Coefficient::Multiple(6), "(g)"));
    }
    out.push(row(R::Sn, R::Ceta, Coefficient::Free, "(f1)"));
    out.push(row(R::Ceta, R::Sn, Coefficient::Multiple(2), "(f2)"));
    if matches!(schema.kind, SchemaKind::Aprime | SchemaKind::Aprime3) {
        for s in 1..=cap {
            out.push(row(R::Sn, R::Moore(s), Coefficient::Free, "ro(ii)"));
            out.push(row(R::Ceta, R::Moore(s), Coefficient::Free, "ro(ii)"));
            for t in s + 1..=cap {
                out.push(row(R::Moore(t), R::Moore(s), Coefficient::Free, "ro(ii)"));
            }
        }
        for r in 1..=cap {
            out.push(col(C::S3, C::Moore(r), "co(ii)"));
            for t in r + 1..=cap {
                out.push(col(C::Moore(t), C::Moore(r), "co(ii)"));
            }
        }
    }
    out
}

/// Moore caps for rows (`s`) and columns (`r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MooreCaps {
    pub r: u8,
    pub s: u8,
}

impl MooreCaps {
    pub fn new(r: u8, s: u8) -> Self {
        MooreCaps { r, s }
    }

    pub fn max(self) -> u8 {
        self.r.max(self.s)
    }
}

impl Default for MooreCaps {
    fn default() -> Self {
        MooreCaps { r: DEFAULT_MOORE_CAP, s: DEFAULT_MOORE_CAP }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(x: u32) -> CellDomain {
        CellDomain::Mod(Modulus::new(x).unwrap())
    }

    #[test]
    fn table_examples() {
        assert_eq!(cell_domain(SchemaId::APRIME, RowStrip::Sn, ColStrip::S3).unwrap(), m(24));
        assert_eq!(cell_domain(SchemaId::APRIME, RowStrip::Sn1, ColStrip::Moore(2)).unwrap(), CellDomain::Zero);
        assert_eq!(cell_domain(SchemaId::A0, RowStrip::Ceta, ColStrip::S3).unwrap(), m(12));
        assert_eq!(cell_domain(SchemaId::APRIME2, RowStrip::Ceta, ColStrip::S3).unwrap(), m(4));
        assert_eq!(cell_domain(SchemaId::APRIME3, RowStrip::Sn1, ColStrip::S3).unwrap(), CellDomain::Zero);
        assert!(cell_domain(SchemaId::A0, RowStrip::Moore(1), ColStrip::S3).is_err());
        assert!(cell_domain(SchemaId::APRIME, RowStrip::Moore(0), ColStrip::S3).is_err());
    }

    #[test]
    fn strip_names_round_trip() {
        for r in [RowStrip::Sn, RowStrip::Sn1, RowStrip::Sn2, RowStrip::Ceta, RowStrip::Moore(3)] {
            assert_eq!(r.to_string().parse::<RowStrip>().unwrap(), r);
        }
        for c in [ColStrip::S2, ColStrip::S3, ColStrip::Moore(2)] {
            assert_eq!(c.to_string().parse::<ColStrip>().unwrap(), c);
        }
        assert_eq!("S_n3_col".parse::<ColStrip>().unwrap(), ColStrip::S3);
        assert!("M3^0".parse::<RowStrip>().is_err());
    }

    #[test]
    fn schema_names() {
        for s in ["A0", "Aprime", "Aprime2", "Aprime3", "Aprime2+", "Aprime3+"] {
            assert_eq!(s.parse::<SchemaId>().unwrap().to_string(), s);
        }
        assert!("Aprime+".parse::<SchemaId>().is_err());
    }

    #[test]
    fn plus_rules_are_subset() {
        for (plus, base) in [(SchemaId::APRIME2_PLUS, SchemaId::APRIME2), (SchemaId::APRIME3_PLUS, SchemaId::APRIME3)] {
            let full = admissible_moves(base, 2);
            for rule in admissible_moves(plus, 2) {
                let ok = full.iter().any(|f| {
                    f.kind == rule.kind
                        && f.src == rule.src
                        && f.dst == rule.dst
                        && (f.coefficient == rule.coefficient
                            || (rule.coefficient == Coefficient::SignedSwap && f.coefficient == Coefficient::AnySwap))
                });
                assert!(ok, "{rule:?}");
            }
        }
        assert!(!admissible_moves(SchemaId::APRIME2_PLUS, 2).iter().any(|r| r.coefficient == Coefficient::MinusOne));
        let a3 = admissible_moves(SchemaId::APRIME3_PLUS, 2);
        assert!(a3.iter().any(|r| r.kind == RuleKind::RowScale && r.src == StripId::Row(RowStrip::Moore(1))));
        assert!(!a3.iter().any(|r| r.kind == RuleKind::RowScale && r.src == StripId::Row(RowStrip::Sn)));
    }

    #[test]
    fn composite_effects_are_well_defined() {
        // k * a * f * |src| must vanish in the destination ring.
        for schema in [SchemaId::A0, SchemaId::APRIME, SchemaId::APRIME2, SchemaId::APRIME3] {
            for rule in admissible_moves(schema, 2) {
                if !matches!(rule.kind, RuleKind::RowAdd | RuleKind::ColAdd) || rule.src == rule.dst {
                    continue;
                }
                let pairs: Vec<(CellDomain, CellDomain)> = match (rule.src, rule.dst) {
                    (StripId::Row(a), StripId::Row(b)) => schema
                        .col_strips(2)
                        .into_iter()
                        .map(|c| (cell_domain(schema, a, c).unwrap(), cell_domain(schema, b, c).unwrap()))
                        .collect(),
                    (StripId::Col(a), StripId::Col(b)) => schema
                        .row_strips(2)
                        .into_iter()
                        .map(|r| (cell_domain(schema, r, a).unwrap(), cell_domain(schema, r, b).unwrap()))
                        .collect(),
                    _ => unreachable!(),
                };
                for (s, d) in pairs {
                    if let (Some(f), CellDomain::Mod(sm), CellDomain::Mod(dm)) = (effect_factor(s, d), s, d) {
                        let total = rule.multiplier() * f as i64 * sm.get() as i64;
                        assert_eq!(total % dm.get() as i64, 0, "{schema} {rule:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn a0_rule_labels() {
        let mut labels: Vec<&str> = admissible_moves(SchemaId::A0, 0)
            .iter()
            .filter(|r| r.label != "el")
            .map(|r| r.label)
            .collect();
        labels.sort();
        assert_eq!(labels, ["(c)", "(d)", "(d)", "(e)", "(f1)", "(f2)", "(g)"]);
    }
}

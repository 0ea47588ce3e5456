//! Single admissible moves, move logs and their action on block matrices.
//!
//! Every move acts linearly on the flat entry buffer. A move is first compiled
//! into a [`LinearOp`] for a fixed profile; the same compiled form drives both
//! [`apply_move`] and the orbit oracle.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::block_matrix::{BlockMatrix, StripProfile};
use crate::schema::{
    admissible_moves, cell_domain, effect_factor, CellDomain, Coefficient, ColStrip, MoveRule, RowStrip, RuleKind,
    SchemaError, SchemaId, StripId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move `{0}` is not admissible in schema {1}")]
    Inadmissible(String, SchemaId),
    #[error("index {index} out of range for strip {strip} of dimension {dim}")]
    IndexOutOfRange { strip: String, index: usize, dim: usize },
    #[error("same-strip move needs distinct indices, got {0} twice")]
    SameIndex(usize),
    #[error("move {position}: {source}")]
    AtPosition { position: usize, source: Box<MoveError> },
    #[error("cannot parse move `{0}`")]
    Parse(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Which row (column) of a signed transposition is negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwapSign {
    Plain,
    /// `(i, -j)`: new `i` is old `j`, new `j` is minus old `i`.
    NegSecond,
    /// `(-i, j)`: new `i` is minus old `j`, new `j` is old `i`.
    NegFirst,
}

impl SwapSign {
    fn inverse(self) -> SwapSign {
        match self {
            SwapSign::Plain => SwapSign::Plain,
            SwapSign::NegSecond => SwapSign::NegFirst,
            SwapSign::NegFirst => SwapSign::NegSecond,
        }
    }

    fn text(self) -> &'static str {
        match self {
            SwapSign::Plain => "plain",
            SwapSign::NegSecond => "neg_j",
            SwapSign::NegFirst => "neg_i",
        }
    }
}

/// One admissible transformation. For restricted rules `k` is the free
/// integer; the rule's multiple (2 or 6) is applied by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    RowAdd { src: RowStrip, i: usize, dst: RowStrip, j: usize, k: i64 },
    RowScale { strip: RowStrip, i: usize },
    RowSwap { strip: RowStrip, i: usize, j: usize, sign: SwapSign },
    ColAdd { src: ColStrip, i: usize, dst: ColStrip, j: usize, k: i64 },
    ColScale { strip: ColStrip, i: usize },
    ColSwap { strip: ColStrip, i: usize, j: usize, sign: SwapSign },
}

impl Move {
    pub fn inverse(self) -> Move {
        match self {
            Move::RowAdd { src, i, dst, j, k } => Move::RowAdd { src, i, dst, j, k: -k },
            Move::ColAdd { src, i, dst, j, k } => Move::ColAdd { src, i, dst, j, k: -k },
            Move::RowSwap { strip, i, j, sign } => Move::RowSwap { strip, i, j, sign: sign.inverse() },
            Move::ColSwap { strip, i, j, sign } => Move::ColSwap { strip, i, j, sign: sign.inverse() },
            m => m,
        }
    }

    fn rule_key(&self) -> (RuleKind, StripId, StripId) {
        match *self {
            Move::RowAdd { src, dst, .. } => (RuleKind::RowAdd, StripId::Row(src), StripId::Row(dst)),
            Move::RowScale { strip, .. } => (RuleKind::RowScale, StripId::Row(strip), StripId::Row(strip)),
            Move::RowSwap { strip, .. } => (RuleKind::RowSwap, StripId::Row(strip), StripId::Row(strip)),
            Move::ColAdd { src, dst, .. } => (RuleKind::ColAdd, StripId::Col(src), StripId::Col(dst)),
            Move::ColScale { strip, .. } => (RuleKind::ColScale, StripId::Col(strip), StripId::Col(strip)),
            Move::ColSwap { strip, .. } => (RuleKind::ColSwap, StripId::Col(strip), StripId::Col(strip)),
        }
    }

    /// The rule licensing this move, if any.
    pub fn rule(&self, schema: SchemaId, cap: u8) -> Option<MoveRule> {
        let (kind, src, dst) = self.rule_key();
        let rule = admissible_moves(schema, cap)
            .into_iter()
            .find(|r| r.kind == kind && r.src == src && r.dst == dst)?;
        match (*self, rule.coefficient) {
            (Move::RowSwap { sign: SwapSign::Plain, .. }, Coefficient::SignedSwap)
            | (Move::ColSwap { sign: SwapSign::Plain, .. }, Coefficient::SignedSwap) => None,
            _ => Some(rule),
        }
    }
}

fn strip_ref(s: impl fmt::Display, i: usize) -> String {
    format!("{s}[{i}]")
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::RowAdd { src, i, dst, j, k } => {
                write!(f, "ROWADD src={} dst={} k={k}", strip_ref(src, i), strip_ref(dst, j))
            }
            Move::ColAdd { src, i, dst, j, k } => {
                write!(f, "COLADD src={} dst={} k={k}", strip_ref(src, i), strip_ref(dst, j))
            }
            Move::RowScale { strip, i } => write!(f, "ROWSCALE at={}", strip_ref(strip, i)),
            Move::ColScale { strip, i } => write!(f, "COLSCALE at={}", strip_ref(strip, i)),
            Move::RowSwap { strip, i, j, sign } => {
                write!(f, "ROWSWAP a={} b={} sign={}", strip_ref(strip, i), strip_ref(strip, j), sign.text())
            }
            Move::ColSwap { strip, i, j, sign } => {
                write!(f, "COLSWAP a={} b={} sign={}", strip_ref(strip, i), strip_ref(strip, j), sign.text())
            }
        }
    }
}

fn parse_ref(text: &str) -> Option<(&str, usize)> {
    let open = text.rfind('[')?;
    let idx = text[open + 1..].strip_suffix(']')?.parse().ok()?;
    Some((&text[..open], idx))
}

impl FromStr for Move {
    type Err = MoveError;
    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || MoveError::Parse(line.to_string());
        let mut parts = line.split_whitespace();
        let op = parts.next().ok_or_else(bad)?;
        let mut fields = std::collections::BTreeMap::new();
        for p in parts {
            let (key, value) = p.split_once('=').ok_or_else(bad)?;
            if fields.insert(key, value).is_some() {
                return Err(bad());
            }
        }
        let get = |key: &str| fields.get(key).copied().ok_or_else(bad);
        let sign = |text: &str| match text {
            "plain" => Ok(SwapSign::Plain),
            "neg_j" => Ok(SwapSign::NegSecond),
            "neg_i" => Ok(SwapSign::NegFirst),
            _ => Err(bad()),
        };
        let expect_keys = |keys: &[&str]| {
            if fields.len() == keys.len() && keys.iter().all(|k| fields.contains_key(k)) {
                Ok(())
            } else {
                Err(bad())
            }
        };
        match op {
            "ROWADD" | "COLADD" => {
                expect_keys(&["src", "dst", "k"])?;
                let (s, i) = parse_ref(get("src")?).ok_or_else(bad)?;
                let (d, j) = parse_ref(get("dst")?).ok_or_else(bad)?;
                let k: i64 = get("k")?.parse().map_err(|_| bad())?;
                if op == "ROWADD" {
                    Ok(Move::RowAdd { src: s.parse()?, i, dst: d.parse()?, j, k })
                } else {
                    Ok(Move::ColAdd { src: s.parse()?, i, dst: d.parse()?, j, k })
                }
            }
            "ROWSCALE" | "COLSCALE" => {
                expect_keys(&["at"])?;
                let (s, i) = parse_ref(get("at")?).ok_or_else(bad)?;
                if op == "ROWSCALE" {
                    Ok(Move::RowScale { strip: s.parse()?, i })
                } else {
                    Ok(Move::ColScale { strip: s.parse()?, i })
                }
            }
            "ROWSWAP" | "COLSWAP" => {
                expect_keys(&["a", "b", "sign"])?;
                let (s, i) = parse_ref(get("a")?).ok_or_else(bad)?;
                let (t, j) = parse_ref(get("b")?).ok_or_else(bad)?;
                if s != t {
                    return Err(bad());
                }
                let sign = sign(get("sign")?)?;
                if op == "ROWSWAP" {
                    Ok(Move::RowSwap { strip: s.parse()?, i, j, sign })
                } else {
                    Ok(Move::ColSwap { strip: s.parse()?, i, j, sign })
                }
            }
            _ => Err(bad()),
        }
    }
}

/// A replayable sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct MoveLog {
    pub moves: Vec<Move>,
}

impl MoveLog {
    pub fn new() -> Self {
        MoveLog::default()
    }

    pub fn push(&mut self, mv: Move) {
        self.moves.push(mv);
    }

    pub fn extend(&mut self, other: &MoveLog) {
        self.moves.extend_from_slice(&other.moves);
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The log undoing this one.
    pub fn inverse(&self) -> MoveLog {
        MoveLog { moves: self.moves.iter().rev().map(|m| m.inverse()).collect() }
    }
}

impl fmt::Display for MoveLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for MoveLog {
    type Err = MoveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut moves = Vec::new();
        for (n, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mv = line
                .parse()
                .map_err(|e| MoveError::AtPosition { position: n + 1, source: Box::new(e) })?;
            moves.push(mv);
        }
        Ok(MoveLog { moves })
    }
}

/// `(dst, modulus, terms)`: `new[dst] = sum coef * old[src] mod modulus`.
pub type CellUpdate = (usize, u32, Vec<(usize, u32)>);

/// Replacement of some entries by linear combinations of the old buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOp {
    pub updates: Vec<CellUpdate>,
}

impl LinearOp {
    pub fn apply(&self, entries: &mut [u32]) {
        let new: Vec<u32> = self
            .updates
            .iter()
            .map(|(_, m, terms)| terms.iter().map(|&(s, c)| c * entries[s]).sum::<u32>() % m)
            .collect();
        for ((dst, _, _), v) in self.updates.iter().zip(new) {
            entries[*dst] = v;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.updates.iter().all(|(d, _, t)| t.len() == 1 && t[0] == (*d, 1))
    }
}

fn check_index(strip: impl fmt::Display, index: usize, dim: usize) -> Result<(), MoveError> {
    if index >= dim {
        return Err(MoveError::IndexOutOfRange { strip: strip.to_string(), index, dim });
    }
    Ok(())
}

fn reduce(x: i64, m: u32) -> u32 {
    x.rem_euclid(m as i64) as u32
}

/// Compiles `mv` for matrices of `profile` under `schema`.
pub fn compile(schema: SchemaId, profile: &StripProfile, mv: &Move) -> Result<LinearOp, MoveError> {
    let cap = profile.max_moore().max(1);
    let rule = mv.rule(schema, cap).ok_or_else(|| MoveError::Inadmissible(mv.to_string(), schema))?;
    let rows = profile.row_labels();
    let cols = profile.col_labels();
    let nc = cols.len();
    let dom = |r: usize, c: usize| cell_domain(schema, rows[r], cols[c]).expect("profile valid for schema");
    let mut updates = Vec::new();
    match *mv {
        Move::RowAdd { src, i, dst, j, k } => {
            check_index(src, i, profile.row_dim(src))?;
            check_index(dst, j, profile.row_dim(dst))?;
            if src == dst && i == j {
                return Err(MoveError::SameIndex(i));
            }
            let (a, b) = (profile.row_offset(src) + i, profile.row_offset(dst) + j);
            for c in 0..nc {
                if let (CellDomain::Mod(m), Some(f)) = (dom(b, c), effect_factor(dom(a, c), dom(b, c))) {
                    let coef = reduce(rule.multiplier() * (k % 24) * f as i64, m.get());
                    if coef != 0 {
                        updates.push((b * nc + c, m.get(), vec![(b * nc + c, 1), (a * nc + c, coef)]));
                    }
                }
            }
        }
        Move::ColAdd { src, i, dst, j, k } => {
            check_index(src, i, profile.col_dim(src))?;
            check_index(dst, j, profile.col_dim(dst))?;
            if src == dst && i == j {
                return Err(MoveError::SameIndex(i));
            }
            let (a, b) = (profile.col_offset(src) + i, profile.col_offset(dst) + j);
            for r in 0..rows.len() {
                if let (CellDomain::Mod(m), Some(f)) = (dom(r, b), effect_factor(dom(r, a), dom(r, b))) {
                    let coef = reduce(rule.multiplier() * (k % 24) * f as i64, m.get());
                    if coef != 0 {
                        updates.push((r * nc + b, m.get(), vec![(r * nc + b, 1), (r * nc + a, coef)]));
                    }
                }
            }
        }
        Move::RowScale { strip, i } => {
            check_index(strip, i, profile.row_dim(strip))?;
            let a = profile.row_offset(strip) + i;
            for c in 0..nc {
                if let CellDomain::Mod(m) = dom(a, c) {
                    updates.push((a * nc + c, m.get(), vec![(a * nc + c, m.get() - 1)]));
                }
            }
        }
        Move::ColScale { strip, i } => {
            check_index(strip, i, profile.col_dim(strip))?;
            let a = profile.col_offset(strip) + i;
            for r in 0..rows.len() {
                if let CellDomain::Mod(m) = dom(r, a) {
                    updates.push((r * nc + a, m.get(), vec![(r * nc + a, m.get() - 1)]));
                }
            }
        }
        Move::RowSwap { strip, i, j, sign } => {
            check_index(strip, i, profile.row_dim(strip))?;
            check_index(strip, j, profile.row_dim(strip))?;
            if i == j {
                return Err(MoveError::SameIndex(i));
            }
            let (a, b) = (profile.row_offset(strip) + i, profile.row_offset(strip) + j);
            for c in 0..nc {
                if let CellDomain::Mod(m) = dom(a, c) {
                    let m = m.get();
                    let (sa, sb) = match sign {
                        SwapSign::Plain => (1, 1),
                        SwapSign::NegSecond => (1, m - 1),
                        SwapSign::NegFirst => (m - 1, 1),
                    };
                    updates.push((a * nc + c, m, vec![(b * nc + c, sa)]));
                    updates.push((b * nc + c, m, vec![(a * nc + c, sb)]));
                }
            }
        }
        Move::ColSwap { strip, i, j, sign } => {
            check_index(strip, i, profile.col_dim(strip))?;
            check_index(strip, j, profile.col_dim(strip))?;
            if i == j {
                return Err(MoveError::SameIndex(i));
            }
            let (a, b) = (profile.col_offset(strip) + i, profile.col_offset(strip) + j);
            for r in 0..rows.len() {
                if let CellDomain::Mod(m) = dom(r, a) {
                    let m = m.get();
                    let (sa, sb) = match sign {
                        SwapSign::Plain => (1, 1),
                        SwapSign::NegSecond => (1, m - 1),
                        SwapSign::NegFirst => (m - 1, 1),
                    };
                    updates.push((r * nc + a, m, vec![(r * nc + b, sa)]));
                    updates.push((r * nc + b, m, vec![(r * nc + a, sb)]));
                }
            }
        }
    }
    Ok(LinearOp { updates })
}

pub fn apply_move(m: &BlockMatrix, mv: &Move) -> Result<BlockMatrix, MoveError> {
    let op = compile(m.schema(), m.profile(), mv)?;
    let mut out = m.clone();
    op.apply(out.entries_mut());
    Ok(out)
}

/// In-place variant of [`apply_move`].
pub fn apply_move_mut(m: &mut BlockMatrix, mv: &Move) -> Result<(), MoveError> {
    let op = compile(m.schema(), m.profile(), mv)?;
    op.apply(m.entries_mut());
    Ok(())
}

pub fn apply_log(m: &BlockMatrix, log: &MoveLog) -> Result<BlockMatrix, MoveError> {
    let mut out = m.clone();
    for (position, mv) in log.moves.iter().enumerate() {
        apply_move_mut(&mut out, mv).map_err(|e| MoveError::AtPosition { position, source: Box::new(e) })?;
    }
    Ok(out)
}

/// Every concrete move of the profile with unit coefficient (adds use `k = 1`).
pub fn move_templates(schema: SchemaId, profile: &StripProfile) -> Vec<Move> {
    let cap = profile.max_moore().max(1);
    let mut out = Vec::new();
    for rule in admissible_moves(schema, cap) {
        match (rule.kind, rule.src, rule.dst) {
            (RuleKind::RowAdd, StripId::Row(s), StripId::Row(d)) => {
                for i in 0..profile.row_dim(s) {
                    for j in 0..profile.row_dim(d) {
                        if s != d || i != j {
                            out.push(Move::RowAdd { src: s, i, dst: d, j, k: 1 });
                        }
                    }
                }
            }
            (RuleKind::ColAdd, StripId::Col(s), StripId::Col(d)) => {
                for i in 0..profile.col_dim(s) {
                    for j in 0..profile.col_dim(d) {
                        if s != d || i != j {
                            out.push(Move::ColAdd { src: s, i, dst: d, j, k: 1 });
                        }
                    }
                }
            }
            (RuleKind::RowScale, StripId::Row(s), _) => {
                out.extend((0..profile.row_dim(s)).map(|i| Move::RowScale { strip: s, i }));
            }
            (RuleKind::ColScale, StripId::Col(s), _) => {
                out.extend((0..profile.col_dim(s)).map(|i| Move::ColScale { strip: s, i }));
            }
            (RuleKind::RowSwap, StripId::Row(s), _) => {
                for i in 0..profile.row_dim(s) {
                    for j in i + 1..profile.row_dim(s) {
                        for &sign in swap_signs(rule.coefficient) {
                            out.push(Move::RowSwap { strip: s, i, j, sign });
                        }
                    }
                }
            }
            (RuleKind::ColSwap, StripId::Col(s), _) => {
                for i in 0..profile.col_dim(s) {
                    for j in i + 1..profile.col_dim(s) {
                        for &sign in swap_signs(rule.coefficient) {
                            out.push(Move::ColSwap { strip: s, i, j, sign });
                        }
                    }
                }
            }
            _ => {}
        }
    }
    out
}

fn swap_signs(c: Coefficient) -> &'static [SwapSign] {
    match c {
        Coefficient::SignedSwap => &[SwapSign::NegSecond, SwapSign::NegFirst],
        _ => &[SwapSign::Plain, SwapSign::NegSecond, SwapSign::NegFirst],
    }
}

/// Applies `count` uniformly drawn admissible moves with `k` in `[-12, 12]`.
pub fn random_scramble(m: &BlockMatrix, seed: u64, count: usize) -> (BlockMatrix, MoveLog) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates = move_templates(m.schema(), m.profile());
    let mut log = MoveLog::new();
    let mut out = m.clone();
    if templates.is_empty() {
        return (out, log);
    }
    for _ in 0..count {
        let mut mv = *templates.choose(&mut rng).expect("nonempty");
        match &mut mv {
            Move::RowAdd { k, .. } | Move::ColAdd { k, .. } => *k = rng.gen_range(-12..=12),
            _ => {}
        }
        apply_move_mut(&mut out, &mv).expect("templates are admissible");
        log.push(mv);
    }
    (out, log)
}

//! Exhaustive orbit tables for small profiles, used to normalize blocks.
//!
//! A table labels every orbit that contains a direct sum of catalog entries,
//! remembers the first such sum in lexicographic order as the orbit's
//! representative and keeps a breadth-first tree leading back to it.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::block_matrix::{BlockMatrix, StripProfile};
use crate::catalog::{matrix_of, Catalog, IndecName};
use crate::orbit_oracle::{OracleError, StateSpace};
use crate::schema::{ColStrip, MooreCaps, RowStrip, SchemaId};
use crate::transform_engine::Move;

const UNSEEN: u32 = u32::MAX;

pub(crate) struct ProfileTable {
    space: StateSpace,
    label: Vec<u32>,
    parent: Vec<u32>,
    via: Vec<u16>,
    orbits: Vec<OrbitEntry>,
}

pub(crate) struct OrbitEntry {
    pub root: u64,
    /// Every enumerated decomposition landing in this orbit, the representative first.
    pub decompositions: Vec<Vec<IndecName>>,
}

/// Strip dimensions of a profile as a flat multiset key.
#[derive(Clone, PartialEq, Eq)]
struct Dims {
    rows: Vec<(RowStrip, usize)>,
    cols: Vec<(ColStrip, usize)>,
}

impl Dims {
    fn of(p: &StripProfile) -> Self {
        Dims { rows: p.rows().to_vec(), cols: p.cols().to_vec() }
    }

    /// `self - other`, or `None` if `other` does not fit.
    fn minus(&self, other: &StripProfile) -> Option<Dims> {
        let mut out = self.clone();
        for &(s, d) in other.rows() {
            let e = out.rows.iter_mut().find(|(t, _)| *t == s)?;
            e.1 = e.1.checked_sub(d)?;
        }
        for &(s, d) in other.cols() {
            let e = out.cols.iter_mut().find(|(t, _)| *t == s)?;
            e.1 = e.1.checked_sub(d)?;
        }
        Some(out)
    }

    fn is_empty(&self) -> bool {
        self.rows.iter().all(|&(_, d)| d == 0) && self.cols.iter().all(|&(_, d)| d == 0)
    }
}

/// Every multiset of catalog entries whose direct sum has profile `p`, in lexicographic order.
pub(crate) fn multisets_with_profile(schema: SchemaId, p: &StripProfile) -> Vec<Vec<IndecName>> {
    let mut r_cap = 0;
    let mut s_cap = 0;
    for &(s, _) in p.rows() {
        if let RowStrip::Moore(x) = s {
            s_cap = s_cap.max(x);
        }
    }
    for &(c, _) in p.cols() {
        if let ColStrip::Moore(x) = c {
            r_cap = r_cap.max(x);
        }
    }
    let catalog = Catalog::new(schema, MooreCaps::new(r_cap, s_cap));
    let target = Dims::of(p);
    let mut entries: Vec<(IndecName, StripProfile)> = catalog
        .entries()
        .iter()
        .filter(|(_, m)| target.minus(m.profile()).is_some())
        .map(|(n, m)| (*n, m.profile().clone()))
        .collect();
    entries.sort_by_key(|a| a.0);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    fn rec(
        entries: &[(IndecName, StripProfile)],
        start: usize,
        left: &Dims,
        stack: &mut Vec<IndecName>,
        out: &mut Vec<Vec<IndecName>>,
    ) {
        if left.is_empty() {
            out.push(stack.clone());
            return;
        }
        for i in start..entries.len() {
            if let Some(rest) = left.minus(&entries[i].1) {
                stack.push(entries[i].0);
                rec(entries, i, &rest, stack, out);
                stack.pop();
            }
        }
    }
    rec(&entries, 0, &target, &mut stack, &mut out);
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn direct_sum_of(schema: SchemaId, parts: &[IndecName]) -> BlockMatrix {
    let mats: Vec<BlockMatrix> = parts.iter().map(|n| matrix_of(n).expect("catalog entry")).collect();
    BlockMatrix::direct_sum_all(schema, &mats).expect("same schema")
}

impl ProfileTable {
    pub fn build(schema: SchemaId, profile: &StripProfile, bound: u64) -> Result<Self, OracleError> {
        let space = StateSpace::new(schema, profile, bound)?;
        let n = space.size() as usize;
        let mut table =
            ProfileTable { label: vec![UNSEEN; n], parent: vec![UNSEEN; n], via: vec![0; n], orbits: Vec::new(), space };
        for multiset in multisets_with_profile(schema, profile) {
            let mut seq = multiset;
            loop {
                table.add_candidate(&seq);
                // Direct sums need not commute up to isomorphism once sign changes are forbidden.
                if !schema.plus() || !next_permutation(&mut seq) {
                    break;
                }
            }
        }
        Ok(table)
    }

    fn add_candidate(&mut self, seq: &[IndecName]) {
        let m = direct_sum_of(self.space.schema(), seq);
        let s = self.space.encode(&m);
        let l = self.label[s as usize];
        if l != UNSEEN {
            let entry = &mut self.orbits[l as usize];
            if !entry.decompositions.iter().any(|d| d == seq) {
                entry.decompositions.push(seq.to_vec());
            }
            return;
        }
        let id = self.orbits.len() as u32;
        self.orbits.push(OrbitEntry { root: s, decompositions: vec![seq.to_vec()] });
        self.label[s as usize] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for g in 0..self.space.num_generators() {
                let y = self.space.step(x, g);
                if self.label[y as usize] == UNSEEN {
                    self.label[y as usize] = id;
                    self.parent[y as usize] = x as u32;
                    self.via[y as usize] = g as u16;
                    queue.push_back(y);
                }
            }
        }
    }

    pub fn orbit_of(&self, m: &BlockMatrix) -> Option<usize> {
        match self.label[self.space.encode(m) as usize] {
            UNSEEN => None,
            l => Some(l as usize),
        }
    }

    pub fn orbit(&self, id: usize) -> &OrbitEntry {
        &self.orbits[id]
    }

    /// Moves carrying `m` to its orbit representative, with that representative's parts.
    pub fn normalize(&self, m: &BlockMatrix) -> Option<(Vec<Move>, &[IndecName])> {
        let mut s = self.space.encode(m);
        let l = self.label[s as usize];
        if l == UNSEEN {
            return None;
        }
        let entry = &self.orbits[l as usize];
        let mut moves = Vec::new();
        while s != entry.root {
            moves.push(self.space.generator(self.via[s as usize] as usize).inverse());
            s = self.parent[s as usize] as u64;
        }
        Some((moves, &entry.decompositions[0]))
    }
}

type Slot = Arc<OnceLock<Result<Arc<ProfileTable>, OracleError>>>;

fn cache() -> &'static Mutex<HashMap<(SchemaId, StripProfile), Slot>> {
    static CACHE: OnceLock<Mutex<HashMap<(SchemaId, StripProfile), Slot>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Largest state space a table is built for.
pub(crate) const TABLE_BOUND: u64 = 4_000_000;

/// Number of matrices with this profile.
pub(crate) fn state_count(schema: SchemaId, profile: &StripProfile) -> u128 {
    let mut n: u128 = 1;
    for r in profile.row_labels() {
        for c in profile.col_labels() {
            let d = crate::schema::cell_domain(schema, r, c).expect("profile valid for schema");
            n = n.saturating_mul(d.size() as u128);
        }
    }
    n
}

/// The memoized table of a profile; tables are immutable once built, so the
/// memo never changes an answer.
pub(crate) fn table(schema: SchemaId, profile: &StripProfile) -> Result<Arc<ProfileTable>, OracleError> {
    let slot = {
        let mut map = cache().lock().expect("table cache poisoned");
        map.entry((schema, profile.clone())).or_default().clone()
    };
    slot.get_or_init(|| ProfileTable::build(schema, profile, TABLE_BOUND).map(Arc::new)).clone()
}

//! Exhaustive orbit enumeration over all matrices of a small profile.
//!
//! States are mixed-radix encodings of the nonzero cells. The group is
//! generated by every concrete move with unit coefficient; since each
//! generator permutes a finite set, the orbits under the generated monoid
//! are the group orbits, and powers of a unit add cover every `k`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::block_matrix::{BlockMatrix, MatrixError, StripProfile};
use crate::par;
use crate::schema::{cell_domain, CellDomain, SchemaId};
use crate::transform_engine::{compile, move_templates, LinearOp, Move, MoveError};

pub const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("state space of {size} matrices exceeds the bound {bound}")]
    BoundExceeded { size: u128, bound: u64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// A generator compiled to act on cell digits.
#[derive(Debug, Clone)]
struct Generator {
    mv: Move,
    updates: Vec<crate::transform_engine::CellUpdate>,
}

/// The finite set of matrices of one profile, with the group generators.
#[derive(Debug, Clone)]
pub struct StateSpace {
    schema: SchemaId,
    profile: StripProfile,
    template: BlockMatrix,
    /// Global buffer position of each nonzero cell.
    cells: Vec<usize>,
    radices: Vec<u32>,
    strides: Vec<u64>,
    size: u64,
    generators: Vec<Generator>,
    /// Row and column of each cell, for the connectivity test.
    cell_rc: Vec<(usize, usize)>,
}

impl StateSpace {
    pub fn new(schema: SchemaId, profile: &StripProfile, bound: u64) -> Result<Self, OracleError> {
        let template = BlockMatrix::zero(schema, profile.clone())?;
        let rows = profile.row_labels();
        let cols = profile.col_labels();
        let nc = cols.len();
        let mut cells = Vec::new();
        let mut radices = Vec::new();
        let mut cell_rc = Vec::new();
        let mut size: u128 = 1;
        for (r, &rs) in rows.iter().enumerate() {
            for (c, &cs) in cols.iter().enumerate() {
                if let CellDomain::Mod(m) = cell_domain(schema, rs, cs).expect("checked by zero()") {
                    cells.push(r * nc + c);
                    radices.push(m.get());
                    cell_rc.push((r, c));
                    size *= m.get() as u128;
                }
            }
        }
        if size > bound as u128 {
            return Err(OracleError::BoundExceeded { size, bound });
        }
        let mut strides = vec![1u64; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1] as u64;
        }
        let pos_of = |global: usize| cells.iter().position(|&g| g == global);
        let mut generators = Vec::new();
        for mv in move_templates(schema, profile) {
            let op: LinearOp = compile(schema, profile, &mv)?;
            if op.is_identity() {
                continue;
            }
            let updates = op
                .updates
                .iter()
                .map(|(d, m, terms)| {
                    let d = pos_of(*d).expect("updates touch nonzero cells");
                    let t = terms.iter().map(|&(s, c)| (pos_of(s).expect("nonzero source"), c)).collect();
                    (d, *m, t)
                })
                .collect();
            generators.push(Generator { mv, updates });
        }
        Ok(StateSpace {
            schema,
            profile: profile.clone(),
            template,
            cells,
            radices,
            strides,
            size: size as u64,
            generators,
            cell_rc,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn schema(&self) -> SchemaId {
        self.schema
    }

    pub fn profile(&self) -> &StripProfile {
        &self.profile
    }

    pub fn generator_moves(&self) -> Vec<Move> {
        self.generators.iter().map(|g| g.mv).collect()
    }

    fn digits(&self, mut index: u64, out: &mut [u32]) {
        for i in (0..self.radices.len()).rev() {
            let r = self.radices[i] as u64;
            out[i] = (index % r) as u32;
            index /= r;
        }
    }

    fn index_of(&self, digits: &[u32]) -> u64 {
        digits.iter().zip(&self.strides).map(|(&d, &s)| d as u64 * s).sum()
    }

    pub fn encode(&self, m: &BlockMatrix) -> u64 {
        let d: Vec<u32> = self.cells.iter().map(|&g| m.entries()[g]).collect();
        self.index_of(&d)
    }

    pub fn decode(&self, index: u64) -> BlockMatrix {
        let mut d = vec![0; self.cells.len()];
        self.digits(index, &mut d);
        let mut e = vec![0; self.template.entries().len()];
        for (i, &g) in self.cells.iter().enumerate() {
            e[g] = d[i];
        }
        self.template.with_entries(e)
    }

    /// Image of `index` under generator `g`.
    pub fn step(&self, index: u64, g: usize) -> u64 {
        let mut d = [0u32; 64];
        let n = self.cells.len();
        let d = &mut d[..n];
        self.digits(index, d);
        let gen = &self.generators[g];
        let mut delta: i64 = 0;
        for (dst, m, terms) in &gen.updates {
            let v = terms.iter().map(|&(s, c)| c * d[s]).sum::<u32>() % m;
            delta += (v as i64 - d[*dst] as i64) * self.strides[*dst] as i64;
        }
        (index as i64 + delta) as u64
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, g: usize) -> Move {
        self.generators[g].mv
    }

    /// True iff the bipartite support graph on all rows and columns is connected.
    pub fn is_connected(&self, index: u64) -> bool {
        let (nr, nc) = (self.profile.num_rows(), self.profile.num_cols());
        let n = nr + nc;
        if n <= 1 {
            return true;
        }
        let mut d = [0u32; 64];
        let k = self.cells.len();
        self.digits(index, &mut d[..k]);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = n;
        for (i, &(r, c)) in self.cell_rc.iter().enumerate() {
            if d[i] != 0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, nr + c));
                if a != b {
                    parent[a] = b;
                    comps -= 1;
                }
            }
        }
        comps == 1
    }
}

/// Result of a full orbit census of one profile.
#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub schema: SchemaId,
    pub profile: StripProfile,
    pub state_count: u64,
    pub orbit_count: usize,
    /// Minimal-encoding member of each orbit, ordered by encoding.
    pub representatives: Vec<BlockMatrix>,
    pub orbit_sizes: Vec<u64>,
    pub indecomposable: Vec<bool>,
}

impl OrbitReport {
    pub fn indecomposable_count(&self) -> usize {
        self.indecomposable.iter().filter(|&&b| b).count()
    }

    /// Indecomposable orbits with a nonzero representative.
    pub fn nonzero_indecomposable(&self) -> Vec<&BlockMatrix> {
        self.representatives
            .iter()
            .zip(&self.indecomposable)
            .filter(|(m, &ind)| ind && !m.is_zero())
            .map(|(m, _)| m)
            .collect()
    }
}

/// Orbit label of every state: the minimal encoding in its orbit.
pub fn orbit_labels(space: &StateSpace) -> Vec<u32> {
    let n = space.size() as usize;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            let g = p[p[x as usize] as usize];
            p[x as usize] = g;
            x = g;
        }
        x
    }
    for g in 0..space.num_generators() {
        let images: Vec<u32> = par::map_range(n, |s| space.step(s as u64, g) as u32);
        for (s, &t) in images.iter().enumerate() {
            let (a, b) = (find(&mut parent, s as u32), find(&mut parent, t));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..n as u32).map(|s| find(&mut parent, s)).collect()
}

pub fn count_orbits(profile: &StripProfile, schema: SchemaId, bound: u64) -> Result<OrbitReport, OracleError> {
    let space = StateSpace::new(schema, profile, bound)?;
    Ok(census(&space))
}

pub fn census(space: &StateSpace) -> OrbitReport {
    let labels = orbit_labels(space);
    let connected: Vec<bool> = par::map_range(labels.len(), |s| space.is_connected(s as u64));
    let mut reps: Vec<u32> = labels.iter().enumerate().filter(|(s, &l)| l as usize == *s).map(|(_, &l)| l).collect();
    reps.sort_unstable();
    let slot = |l: u32| reps.binary_search(&l).expect("label is a representative");
    let mut sizes = vec![0u64; reps.len()];
    let mut indecomposable = vec![true; reps.len()];
    for (s, &l) in labels.iter().enumerate() {
        let i = slot(l);
        sizes[i] += 1;
        if !connected[s] {
            indecomposable[i] = false;
        }
    }
    OrbitReport {
        schema: space.schema(),
        profile: space.profile().clone(),
        state_count: space.size(),
        orbit_count: reps.len(),
        representatives: reps.iter().map(|&r| space.decode(r as u64)).collect(),
        orbit_sizes: sizes,
        indecomposable,
    }
}

/// Every profile with at least one row and one column, Moore parameters up to
/// `cap`, at most `max_rows` rows and `max_cols` columns in total.
pub fn profiles_up_to(schema: SchemaId, cap: u8, max_rows: usize, max_cols: usize) -> Vec<StripProfile> {
    fn dims(n: usize, max: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for d in 0..=max {
            for mut rest in dims(n - 1, max - d) {
                rest.insert(0, d);
                out.push(rest);
            }
        }
        out
    }
    let rs = schema.row_strips(cap);
    let cs = schema.col_strips(cap);
    let mut out = Vec::new();
    for rd in dims(rs.len(), max_rows) {
        if rd.iter().all(|&d| d == 0) {
            continue;
        }
        for cd in dims(cs.len(), max_cols) {
            if cd.iter().all(|&d| d == 0) {
                continue;
            }
            let rows = rs.iter().copied().zip(rd.iter().copied()).collect();
            let cols = cs.iter().copied().zip(cd.iter().copied()).collect();
            out.push(StripProfile::new(rows, cols).expect("distinct strips"));
        }
    }
    out
}

/// Breadth-first orbit of `start`, as sorted encodings.
pub fn orbit_indices(space: &StateSpace, start: u64) -> Vec<u64> {
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start);
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        for g in 0..space.num_generators() {
            let t = space.step(s, g);
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

pub fn orbit(m: &BlockMatrix, bound: u64) -> Result<Vec<BlockMatrix>, OracleError> {
    let space = StateSpace::new(m.schema(), m.profile(), bound)?;
    Ok(orbit_indices(&space, space.encode(m)).into_iter().map(|i| space.decode(i)).collect())
}

pub fn is_decomposable(m: &BlockMatrix, bound: u64) -> Result<bool, OracleError> {
    let space = StateSpace::new(m.schema(), m.profile(), bound)?;
    Ok(orbit_indices(&space, space.encode(m)).into_iter().any(|i| !space.is_connected(i)))
}

pub fn same_orbit(a: &BlockMatrix, b: &BlockMatrix, bound: u64) -> Result<bool, OracleError> {
    if a.schema() != b.schema() || a.profile() != b.profile() {
        return Ok(false);
    }
    let space = StateSpace::new(a.schema(), a.profile(), bound)?;
    let target = space.encode(b);
    Ok(orbit_indices(&space, space.encode(a)).binary_search(&target).is_ok())
}

/// Shortest move sequence from `from` to `to` within one orbit, if any.
pub fn find_path(from: &BlockMatrix, to: &BlockMatrix, bound: u64) -> Result<Option<Vec<Move>>, OracleError> {
    let space = StateSpace::new(from.schema(), from.profile(), bound)?;
    let (s, t) = (space.encode(from), space.encode(to));
    let mut prev = std::collections::HashMap::new();
    prev.insert(s, (s, usize::MAX));
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if x == t {
            let mut path = Vec::new();
            let mut cur = t;
            while cur != s {
                let (p, g) = prev[&cur];
                path.push(space.generator(g));
                cur = p;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for g in 0..space.num_generators() {
            let y = space.step(x, g);
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(y) {
                e.insert((x, g));
                queue.push_back(y);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{ColStrip, RowStrip};
    use crate::transform_engine::{apply_move, random_scramble};

    fn p(rows: Vec<(RowStrip, usize)>, cols: Vec<(ColStrip, usize)>) -> StripProfile {
        StripProfile::new(rows, cols).unwrap()
    }

    #[test]
    fn one_by_one_censuses() {
        let sn = p(vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)]);
        let ce = p(vec![(RowStrip::Ceta, 1)], vec![(ColStrip::S3, 1)]);
        assert_eq!(count_orbits(&sn, SchemaId::APRIME, DEFAULT_BOUND).unwrap().orbit_count, 13);
        assert_eq!(count_orbits(&ce, SchemaId::APRIME, DEFAULT_BOUND).unwrap().orbit_count, 7);
        assert_eq!(count_orbits(&sn, SchemaId::APRIME2_PLUS, DEFAULT_BOUND).unwrap().orbit_count, 8);
        assert_eq!(count_orbits(&sn, SchemaId::APRIME3_PLUS, DEFAULT_BOUND).unwrap().orbit_count, 3);
    }

    #[test]
    fn sign_orbit_and_bound() {
        let sn = p(vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)]);
        let five = BlockMatrix::from_integers(SchemaId::APRIME, sn.clone(), &[5]).unwrap();
        let nineteen = BlockMatrix::from_integers(SchemaId::APRIME, sn.clone(), &[19]).unwrap();
        let two = BlockMatrix::from_integers(SchemaId::APRIME, sn.clone(), &[2]).unwrap();
        assert!(same_orbit(&five, &nineteen, DEFAULT_BOUND).unwrap());
        assert!(!same_orbit(&five, &two, DEFAULT_BOUND).unwrap());
        let zero = BlockMatrix::zero(SchemaId::APRIME, sn.clone()).unwrap();
        assert_eq!(orbit(&zero, DEFAULT_BOUND).unwrap().len(), 1);
        assert!(matches!(StateSpace::new(SchemaId::APRIME, &sn, 10), Err(OracleError::BoundExceeded { .. })));
    }

    #[test]
    fn step_matches_engine() {
        let prof = p(vec![(RowStrip::Sn, 1), (RowStrip::Ceta, 1)], vec![(ColStrip::S3, 1), (ColStrip::Moore(1), 1)]);
        let space = StateSpace::new(SchemaId::APRIME, &prof, DEFAULT_BOUND).unwrap();
        for s in (0..space.size()).step_by(97) {
            let m = space.decode(s);
            assert_eq!(space.encode(&m), s);
            for g in 0..space.num_generators() {
                let via_engine = apply_move(&m, &space.generator(g)).unwrap();
                assert_eq!(space.decode(space.step(s, g)), via_engine);
            }
        }
    }

    #[test]
    fn decomposability() {
        let prof = p(vec![(RowStrip::Sn, 2)], vec![(ColStrip::S3, 1)]);
        let m = BlockMatrix::from_integers(SchemaId::APRIME, prof, &[1, 0]).unwrap();
        assert!(is_decomposable(&m, DEFAULT_BOUND).unwrap());
        let prof = p(vec![(RowStrip::Sn, 1)], vec![(ColStrip::S3, 1)]);
        let m = BlockMatrix::from_integers(SchemaId::APRIME, prof, &[3]).unwrap();
        assert!(!is_decomposable(&m, DEFAULT_BOUND).unwrap());
    }

    #[test]
    fn scramble_stays_in_orbit() {
        let prof = p(vec![(RowStrip::Sn, 1), (RowStrip::Moore(1), 1)], vec![(ColStrip::S3, 1), (ColStrip::Moore(1), 1)]);
        let m = BlockMatrix::from_integers(SchemaId::APRIME, prof, &[5, 1, 1, 2]).unwrap();
        let (s, _) = random_scramble(&m, 3, 30);
        assert!(same_orbit(&m, &s, DEFAULT_BOUND).unwrap());
        let path = find_path(&m, &s, DEFAULT_BOUND).unwrap().unwrap();
        let mut x = m.clone();
        for mv in &path {
            x = apply_move(&x, mv).unwrap();
        }
        assert_eq!(x, s);
    }
}

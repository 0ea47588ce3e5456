//! Matrix problems over mixed residue rings for 2-torsion-free (n+4)-dimensional polyhedra.

pub mod block_matrix;
pub mod catalog;
pub mod cli;
pub mod orbit_oracle;
pub mod reducer;
pub mod par;
pub mod ring_core;
pub mod schema;
pub mod topology;
pub mod transform_engine;

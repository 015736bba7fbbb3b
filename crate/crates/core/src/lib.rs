//! Oriented tangle diagrams as planar combinatorial maps, the oriented
//! Reidemeister moves of types 2 and 3 as local rewrites, bounded
//! derivation search, and replayable derivation certificates.

pub mod cli;
pub mod codec;
pub mod diagram;
pub mod geometry;
pub mod moves;
pub mod search;
pub mod theorem;
pub mod theta;

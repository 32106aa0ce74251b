//! Exact Atiyah-Hirzebruch spectral sequences for ordinary, flat and
//! differential cohomology theories on finite simplicial complexes.

pub mod abgroup;
pub mod cochains;
pub mod forms;
pub mod simpcomplex;
pub mod steenrod;
pub mod sseq;

//! Exact computations in the isometry group G_n of the Baumslag–Solitar model
//! space X_n: BS(1,N) normal forms, the tree T_{1,n} in n-adic ball
//! coordinates, arithmetic isometries, classification of lattice embeddings
//! by the invariant (s, m), covolumes, and a brute-force lab for the finite
//! groups H_k.

pub mod exactnum;
pub mod bsgroup;
pub mod tree;
pub mod isometry;
pub mod lattice;
pub mod lab;
pub mod cli;

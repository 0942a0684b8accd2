//! Dense covering curves on closed genus-g triangle meshes.
//!
//! The pipeline turns a closed oriented triangle mesh of genus g ≥ 1 into a
//! curve that progressively covers the whole surface, and then into a discrete
//! walking path over the mesh (or unit-disk) communication graph:
//!
//! 1. [`topology`] — cut graph and a 2g-loop homology basis (tree-cotree).
//! 2. [`forms`] — closed 1-forms dual to the basis loops (cohomology basis).
//! 3. [`hodge`] — harmonic representatives via the cotangent Laplacian and
//!    conjugate forms via the wedge-product system; together a holomorphic
//!    1-form basis.
//! 4. [`covering`] — integrating a holomorphic form develops the surface
//!    into g flat tori glued along horizontal slits (a branched covering);
//!    the 2g−2 form zeros are the branch points.
//! 5. [`curve`] — a straight line of irrational slope traced across the
//!    glued tori is aperiodic and fills the surface densely; it is pulled
//!    back to the mesh and discretized into a vertex path.
//! 6. [`sim`] — coverage-rate and distance metrics for that path against
//!    Eulerian-tour and random-walk baselines, with multi-agent support.
//! 7. [`distsim`] — round-based message-passing versions of the pipeline
//!    steps (flooding, diffusion), checked against the centralized results.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `densecurve-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod covering;
pub mod curve;
pub mod distsim;
pub mod forms;
pub mod graph;
pub mod hodge;
pub mod math;
pub mod mesh;
pub mod rng;
pub mod sim;
pub mod sparse;
pub mod topology;

pub use mesh::TriMesh;

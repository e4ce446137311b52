//! Landau–Ginzburg critical points, monodromy and exceptional collections of
//! Fano projective bundles `X = P(O ⊕ O(a_1) ⊕ ... ⊕ O(a_r))` over `P^s`.
//!
//! The crate is `no_std` (with `alloc`). Everything here is pure computation:
//!
//! * [`bundle`]: the bundle data, polytope vertices, Picard classes and the
//!   exceptional collection `E_kl = k·π*H + l·ξ`.
//! * [`sections`]: `dim H^0` by lattice-point counting and the Hom table.
//! * [`lg`], [`solver`]: the gradient system of the potential, its reduction to
//!   two variables, and an all-roots solver.
//! * [`tracker`]: predictor–corrector continuation along segments and loops.
//! * [`labeling`]: the argument map, the roots-of-unity limit grid and labels.
//! * [`monodromy`]: the combinatorial action, `Div^+` and the Hom comparison.
//! * [`quiver`]: the quiver on the collection with generator-tagged arrows.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bundle;
pub mod error;
pub mod labeling;
pub mod lg;
pub mod linalg;
pub mod monodromy;
pub mod poly;
pub mod quiver;
pub mod sections;
pub mod solver;
pub mod tracker;

pub use bundle::{
    divisor_class, exceptional_collection, polytope_vertices, BundleSpec, Generator, LabelPoint, LatticeVector,
    PicClass, ToricDivisor,
};
pub use error::{Error, Result};
pub use labeling::TorusPoint;
pub use lg::{CoeffVector, CritPoint, CritSet};
pub use num_complex::Complex64;
pub use quiver::Quiver;
pub use sections::HomTable;
pub use tracker::{PathSpec, Permutation};

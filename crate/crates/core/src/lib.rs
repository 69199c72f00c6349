//! Integral zonotopes in convex cones.
//!
//! Deterministic objects (minimal caps, Laplace transforms of cones, the
//! limiting zonoid, exact partition counts) and the Boltzmann model of random
//! integral zonotopes with endpoint `n·k`.

pub mod arith;
pub mod cap;
pub mod cone;
pub mod count;
pub mod error;
pub mod faces;
pub mod gibbs;
pub mod hull;
pub mod latt;
pub mod linalg;
pub mod multiset;
pub mod rng;
pub mod shape;
pub mod simplex;
pub mod verify;
pub mod zeta;

pub use arith::{rat, Rational};
pub use cone::PolyhedralCone;
pub use error::{Error, Result};
pub use multiset::GeneratorMultiset;

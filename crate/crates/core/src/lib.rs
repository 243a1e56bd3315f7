//! Geodesic spheres and domes from triangular seed polyhedra.
//!
//! The pipeline is: pick a [`mesh::seed`], tessellate each face with an
//! `(m, n)` triangular lattice ([`tessellate::subdivide`]), push the lattice
//! points onto the circumsphere ([`tessellate::project_to_sphere`]), then
//! derive Goldberg duals, gemmated solids or dome caps ([`transforms`]) and
//! check their combinatorics, strut tables and rigidity ([`analysis`]).
//! [`io`] reads and writes OBJ meshes, JSON strut schedules and CSV reports.
//!
//! ```
//! use geodome::analysis::{edge_length_classes, is_infinitesimally_rigid, Framework};
//! use geodome::transforms::dual;
//! use geodome::{geodesic_sphere, TolerancePolicy};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let tol = TolerancePolicy::default();
//! let sphere = geodesic_sphere(3, 0, 1.0)?;
//! assert_eq!(sphere.counts(), (92, 270, 180));
//! assert_eq!(edge_length_classes(&sphere, 1e-9).len(), 3);
//! let goldberg = dual(&sphere)?;
//! assert_eq!(goldberg.faces().iter().filter(|f| f.len() == 5).count(), 12);
//! assert!(is_infinitesimally_rigid(&Framework::from(&sphere), &tol)?.rigid);
//! # Ok(())
//! # }
//! ```

pub mod analysis;
pub mod io;
pub mod mesh;
pub mod tessellate;
pub mod transforms;

pub use mesh::{build_mesh, mesh_counts, seed, Mesh, MeshError, SeedKind, TolerancePolicy, Vec3};
pub use tessellate::{geodesic_sphere, TessellationSpec};

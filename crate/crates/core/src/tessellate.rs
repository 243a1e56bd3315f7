//! `(m, n)` lattice tessellation of triangular faces and central projection.
//!
//! Each base face `(a, b, c)` is laid over a planar triangular lattice with
//! corners at lattice coordinates `A = (0, 0)`, `B = (m, n)` and
//! `C = (-n, m + n)` (the 60° rotation of `B`). A lattice point `q` has integer
//! barycentric weights over `(A, B, C)` that sum to `T = m² + mn + n²`, so
//! points are identified across faces exactly, by their weights over the base
//! vertices, with no floating-point welding.
//!
//! A small lattice triangle is emitted by the base face containing its
//! centroid. When the triangle straddles a base edge (class II and III), its
//! outside corners are re-expressed in the neighbouring face, which in the
//! unfolded net is the point reflection of the base triangle through the
//! midpoint of the shared edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::mesh::{seed, Mesh, MeshError, SeedKind, Topology, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TessellationError {
    #[error("invalid tessellation ({0}, {1}): need m, n >= 0 and not both zero")]
    InvalidSpec(i64, i64),
    #[error("face {0} of the seed is not a triangle")]
    NonTriangularSeed(usize),
    #[error("seed is not inscribed in a sphere")]
    NotInscribed,
    #[error("vertex {0} coincides with the projection centre")]
    VertexAtCenter(usize),
    #[error("tessellation requires a closed seed")]
    OpenSeed,
    #[error("mesh is not a regular icosahedron")]
    NotIcosahedron,
    #[error("no Schwarz tiling for {0}")]
    UnsupportedSeed(SeedKind),
    #[error("stepping projection needs at least one level")]
    ZeroLevels,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Icosahedral subdivision class of an `(m, n)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubdivisionClass {
    /// `(m, 0)` or `(0, n)`.
    I,
    /// `(n, n)`.
    II,
    /// Everything else; chiral.
    III,
}

impl fmt::Display for SubdivisionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubdivisionClass::I => "I",
            SubdivisionClass::II => "II",
            SubdivisionClass::III => "III",
        })
    }
}

/// A validated lattice step `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TessellationSpec {
    m: u32,
    n: u32,
}

impl TessellationSpec {
    pub fn new(m: i64, n: i64) -> Result<Self, TessellationError> {
        if m < 0 || n < 0 || (m == 0 && n == 0) || m > u32::MAX as i64 || n > u32::MAX as i64 {
            return Err(TessellationError::InvalidSpec(m, n));
        }
        Ok(Self {
            m: m as u32,
            n: n as u32,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Triangulation number `m² + mn + n²`.
    pub fn t(&self) -> u64 {
        let (m, n) = (self.m as u64, self.n as u64);
        m * m + m * n + n * n
    }

    pub fn class(&self) -> SubdivisionClass {
        if self.m == 0 || self.n == 0 {
            SubdivisionClass::I
        } else if self.m == self.n {
            SubdivisionClass::II
        } else {
            SubdivisionClass::III
        }
    }
}

impl fmt::Display for TessellationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

pub fn triangulation_number(m: i64, n: i64) -> Result<u64, TessellationError> {
    TessellationSpec::new(m, n).map(|s| s.t())
}

/// Lattice points and small triangles laid on the flat faces of a seed.
#[derive(Debug, Clone)]
pub struct FlatTessellation {
    pub base: Mesh,
    pub spec: TessellationSpec,
    pub points: Vec<Vec3>,
    pub small_faces: Vec<[usize; 3]>,
}

type Lattice = (i64, i64);

#[inline]
fn cross(u: Lattice, v: Lattice) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

#[inline]
fn sub(u: Lattice, v: Lattice) -> Lattice {
    (u.0 - v.0, u.1 - v.1)
}

/// Barycentric weights of `q` over the corners, scaled so they sum to `cross(B-A, C-A)`.
fn barycentric(q: Lattice, corners: [Lattice; 3]) -> [i64; 3] {
    let [a, b, c] = corners;
    [
        cross(sub(b, q), sub(c, q)),
        cross(sub(c, q), sub(a, q)),
        cross(sub(a, q), sub(b, q)),
    ]
}

/// Tessellates every (triangular) face of `base` with the `(m, n)` lattice.
pub fn subdivide(base: &Mesh, m: i64, n: i64) -> Result<FlatTessellation, TessellationError> {
    let spec = TessellationSpec::new(m, n)?;
    if let Some(f) = base.faces().iter().position(|f| f.len() != 3) {
        return Err(TessellationError::NonTriangularSeed(f));
    }
    if !base.is_closed() {
        return Err(TessellationError::OpenSeed);
    }
    let (m, n) = (spec.m as i64, spec.n as i64);
    let t = spec.t() as i64;
    let corners: [Lattice; 3] = [(0, 0), (m, n), (-n, m + n)];
    let corners3 = corners.map(|(x, y)| (3 * x, 3 * y));

    let owner = base.directed_edge_faces();
    // For directed edge (a, b) of face f: the neighbouring face and its far vertex.
    let across = |a: usize, b: usize| -> (usize, usize) {
        let g = owner[&(b, a)];
        let far = *base.faces()[g]
            .iter()
            .find(|&&v| v != a && v != b)
            .expect("triangular neighbour");
        (g, far)
    };

    let mut index: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut small_faces = Vec::with_capacity(base.faces().len() * t as usize);

    let (imin, imax) = (-n - 1, m + 1);
    let (jmin, jmax) = (-1, m + n + 1);

    for (fi, face) in base.faces().iter().enumerate() {
        let (va, vb, vc) = (face[0], face[1], face[2]);
        // Vertex opposite each corner lies across the edge not containing it.
        let opposite = [across(vb, vc), across(vc, va), across(va, vb)];

        let mut resolve = |q: Lattice| -> usize {
            let [la, lb, lc] = barycentric(q, corners);
            let weights: Vec<(usize, i64)> = if la < 0 {
                let (_, e) = opposite[0];
                vec![(vb, lb + la), (vc, lc + la), (e, -la)]
            } else if lb < 0 {
                let (_, e) = opposite[1];
                vec![(vc, lc + lb), (va, la + lb), (e, -lb)]
            } else if lc < 0 {
                let (_, e) = opposite[2];
                vec![(va, la + lc), (vb, lb + lc), (e, -lc)]
            } else {
                vec![(va, la), (vb, lb), (vc, lc)]
            };
            debug_assert!(weights.iter().all(|&(_, w)| w >= 0));
            let mut key: BTreeMap<usize, i64> = BTreeMap::new();
            for (v, w) in weights {
                if w != 0 {
                    *key.entry(v).or_default() += w;
                }
            }
            let key: Vec<(usize, i64)> = key.into_iter().collect();
            *index.entry(key).or_insert_with_key(|key| {
                let sum = key.iter().fold(Vec3::ZERO, |acc, &(v, w)| {
                    acc + base.vertices()[v] * w as f64
                });
                points.push(sum / t as f64);
                points.len() - 1
            })
        };

        for i in imin..=imax {
            for j in jmin..=jmax {
                let up = [(i, j), (i + 1, j), (i, j + 1)];
                let down = [(i + 1, j), (i + 1, j + 1), (i, j + 1)];
                for (tri, centroid3) in
                    [(up, (3 * i + 1, 3 * j + 1)), (down, (3 * i + 2, 3 * j + 2))]
                {
                    let bary = barycentric(centroid3, corners3);
                    if bary.iter().any(|&w| w < 0) {
                        continue;
                    }
                    // Centroid on a base edge: the lower-indexed face owns it.
                    if let Some(k) = bary.iter().position(|&w| w == 0) {
                        let (g, _) = opposite[k];
                        if g < fi {
                            continue;
                        }
                    }
                    small_faces.push(tri.map(&mut resolve));
                }
            }
        }
    }

    Ok(FlatTessellation {
        base: base.clone(),
        spec,
        points,
        small_faces,
    })
}

/// Pushes every lattice point radially onto the seed's circumsphere.
pub fn project_to_sphere(flat: &FlatTessellation) -> Result<Mesh, TessellationError> {
    let r = flat.base.radius().ok_or(TessellationError::NotInscribed)?;
    let c = flat.base.center();
    let eps = 1e-12 * r;
    let vertices = flat
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let d = p - c;
            if d.norm() <= eps {
                return Err(TessellationError::VertexAtCenter(i));
            }
            Ok(c + d.normalized().ok_or(TessellationError::VertexAtCenter(i))? * r)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let faces = flat.small_faces.iter().map(|f| f.to_vec()).collect();
    Ok(Mesh::builder(vertices, faces)
        .center(c)
        .reference_radius(r)
        .topology(Topology::Closed)
        .build()?)
}

/// Geodesic sphere of type `(m, n)` on the icosahedron of the given radius.
pub fn geodesic_sphere(m: i64, n: i64, radius: f64) -> Result<Mesh, TessellationError> {
    project_to_sphere(&subdivide(&seed(SeedKind::Icosahedron, radius), m, n)?)
}

/// Repeated 2-frequency subdivision, projecting after each step.
pub fn stepping_projection(base: &Mesh, levels: u32) -> Result<Mesh, TessellationError> {
    if levels == 0 {
        return Err(TessellationError::ZeroLevels);
    }
    let mut mesh = base.clone();
    for _ in 0..levels {
        mesh = project_to_sphere(&subdivide(&mesh, 2, 0)?)?;
    }
    Ok(mesh)
}

/// Which kind of rotation axis a great circle is perpendicular to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    Vertex,
    Edge,
    Face,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircle {
    /// Unit normal of the equatorial plane (the rotation axis).
    pub normal: Vec3,
    pub axis: AxisKind,
}

fn is_regular_icosahedron(p: &Mesh) -> bool {
    if p.counts() != (12, 30, 20) || p.radius().is_none() || !p.is_triangular() {
        return false;
    }
    let l0 = p.edge_length(p.edges()[0]);
    p.edges()
        .iter()
        .all(|&e| (p.edge_length(e) - l0).abs() <= 1e-9 * l0)
}

/// Equatorial planes of the icosahedron's rotation axes: 6 through opposite
/// vertices, 15 through opposite edge midpoints, 10 through opposite face centres.
pub fn great_circles(p: &Mesh) -> Result<Vec<GreatCircle>, TessellationError> {
    if !is_regular_icosahedron(p) {
        return Err(TessellationError::NotIcosahedron);
    }
    let c = p.center();
    let candidates = p
        .vertices()
        .iter()
        .map(|&v| (v, AxisKind::Vertex))
        .chain(
            p.edges()
                .iter()
                .map(|&(a, b)| ((p.vertices()[a] + p.vertices()[b]) * 0.5, AxisKind::Edge)),
        )
        .chain((0..p.faces().len()).map(|f| (p.face_centroid(f), AxisKind::Face)));

    let mut circles: Vec<GreatCircle> = Vec::new();
    for (point, axis) in candidates {
        let normal = (point - c)
            .normalized()
            .ok_or(TessellationError::NotIcosahedron)?;
        let duplicate = circles.iter().any(|g| g.normal.cross(normal).norm() < 1e-9);
        if !duplicate {
            circles.push(GreatCircle { normal, axis });
        }
    }
    Ok(circles)
}

/// A triangle on a sphere, corners counter-clockwise seen from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalTriangle {
    pub corners: [Vec3; 3],
}

impl SphericalTriangle {
    /// Spherical area on a sphere of radius `r` about the origin.
    pub fn area(&self, r: f64) -> f64 {
        let [a, b, c] = self.corners.map(|p| p.normalized().unwrap_or(Vec3::ZERO));
        let num = a.dot(b.cross(c)).abs();
        let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
        2.0 * num.atan2(den) * r * r
    }

    /// Whether direction `p` falls inside (or on) the triangle.
    pub fn contains_direction(&self, p: Vec3) -> bool {
        let [a, b, c] = self.corners;
        a.cross(b).dot(p) >= 0.0 && b.cross(c).dot(p) >= 0.0 && c.cross(a).dot(p) >= 0.0
    }
}

/// Projected Schwarz triangles of a regular seed: every face is cut by its
/// three altitudes into six 30-60-90 triangles, each pushed onto the sphere.
pub fn schwarz_tiling(
    kind: SeedKind,
    radius: f64,
) -> Result<Vec<SphericalTriangle>, TessellationError> {
    if !matches!(
        kind,
        SeedKind::Tetrahedron | SeedKind::Octahedron | SeedKind::Icosahedron
    ) {
        return Err(TessellationError::UnsupportedSeed(kind));
    }
    let p = seed(kind, radius);
    let onto = |v: Vec3| v.normalized().expect("non-zero") * radius;
    let mut tiles = Vec::with_capacity(p.faces().len() * 6);
    for (fi, f) in p.faces().iter().enumerate() {
        let g = onto(p.face_centroid(fi));
        for k in 0..3 {
            let a = p.vertices()[f[k]];
            let b = p.vertices()[f[(k + 1) % 3]];
            let mid = onto((a + b) * 0.5);
            tiles.push(SphericalTriangle {
                corners: [onto(a), mid, g],
            });
            tiles.push(SphericalTriangle {
                corners: [mid, onto(b), g],
            });
        }
    }
    Ok(tiles)
}

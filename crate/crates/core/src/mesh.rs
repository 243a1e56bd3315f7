//! Indexed polygon meshes, tolerances and the canonical seed polyhedra.
//!
//! A [`Mesh`] is validated once at construction and never mutated afterwards;
//! every transform in this crate returns a new mesh.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no vertices or no faces")]
    Empty,
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("face {face} references vertex {index}, but only {len} vertices exist")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        len: usize,
    },
    #[error("face {0} has fewer than 3 distinct vertices")]
    DegenerateFace(usize),
    #[error("edge ({0}, {1}) belongs to {2} faces")]
    NonManifoldEdge(usize, usize, usize),
    #[error("directed edge ({0}, {1}) appears twice; faces are not consistently oriented")]
    InconsistentOrientation(usize, usize),
    #[error("faces are oriented inwards (negative enclosed volume)")]
    InwardOrientation,
    #[error("Euler characteristic is {0}, expected 2")]
    EulerViolation(i64),
}

/// A point or direction in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction. Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Numerical tolerances shared by construction and analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    /// Distance tolerance, relative to the sphere radius.
    pub metric_eps: f64,
    /// Singular value cutoff, relative to the largest singular value.
    pub rank_eps: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            metric_eps: 1e-9,
            rank_eps: 1e-10,
        }
    }
}

impl TolerancePolicy {
    /// Returns `None` unless both tolerances are strictly positive and finite.
    pub fn new(metric_eps: f64, rank_eps: f64) -> Option<Self> {
        let ok = |e: f64| e > 0.0 && e.is_finite();
        (ok(metric_eps) && ok(rank_eps)).then_some(Self {
            metric_eps,
            rank_eps,
        })
    }
}

/// Whether a mesh must be a closed surface or may have boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Closed,
    Open,
}

/// A validated polygon mesh.
///
/// Faces are vertex-index cycles, counter-clockwise seen from outside. Edges
/// are derived from faces and stored as sorted index pairs in lexicographic
/// order. The mesh carries a reference sphere: `center` plus a radius that is
/// used for polarity and chord factors. When every vertex lies on that sphere
/// the mesh is *inscribed* and [`Mesh::radius`] returns it.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    center: Vec3,
    reference_radius: f64,
    inscribed: bool,
    topology: Topology,
}

/// Builds and validates a closed mesh centred on the origin.
pub fn build_mesh(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Mesh, MeshError> {
    Mesh::builder(vertices, faces).build()
}

/// Builds and validates an open mesh (every edge in one or two faces).
pub fn build_open_mesh(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Mesh, MeshError> {
    Mesh::builder(vertices, faces)
        .topology(Topology::Open)
        .build()
}

/// Returns `(V, S, F)`: vertex, edge and face counts.
pub fn mesh_counts(mesh: &Mesh) -> (usize, usize, usize) {
    mesh.counts()
}

pub struct MeshBuilder {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    center: Vec3,
    reference_radius: Option<f64>,
    topology: Topology,
    tol: TolerancePolicy,
}

impl MeshBuilder {
    pub fn center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    /// Sphere radius used for polarity when the mesh is not inscribed.
    pub fn reference_radius(mut self, r: f64) -> Self {
        self.reference_radius = Some(r);
        self
    }

    pub fn topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn tolerance(mut self, tol: TolerancePolicy) -> Self {
        self.tol = tol;
        self
    }

    pub fn build(self) -> Result<Mesh, MeshError> {
        let MeshBuilder {
            vertices,
            faces,
            center,
            reference_radius,
            topology,
            tol,
        } = self;
        if vertices.is_empty() || faces.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFinite(i));
        }
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&index) = f.iter().find(|&&i| i >= vertices.len()) {
                return Err(MeshError::IndexOutOfRange {
                    face: fi,
                    index,
                    len: vertices.len(),
                });
            }
            let mut sorted = f.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() < 3 || sorted.len() != f.len() {
                return Err(MeshError::DegenerateFace(fi));
            }
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        let mut undirected: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &faces {
            for (a, b) in cycle_pairs(f) {
                if directed.insert((a, b), 1).is_some() {
                    return Err(MeshError::InconsistentOrientation(a, b));
                }
                *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some((&(a, b), &count)) = undirected.iter().find(|(_, &c)| c > 2) {
            return Err(MeshError::NonManifoldEdge(a, b, count));
        }
        if topology == Topology::Closed {
            let chi = vertices.len() as i64 - undirected.len() as i64 + faces.len() as i64;
            if chi != 2 {
                return Err(MeshError::EulerViolation(chi));
            }
            if let Some((&(a, b), &count)) = undirected.iter().find(|(_, &c)| c != 2) {
                return Err(MeshError::NonManifoldEdge(a, b, count));
            }
        }
        let edges: Vec<(usize, usize)> = undirected.into_keys().collect();

        if topology == Topology::Closed {
            let volume: f64 = faces
                .iter()
                .map(|f| {
                    let p0 = vertices[f[0]] - center;
                    (1..f.len() - 1)
                        .map(|k| {
                            p0.dot((vertices[f[k]] - center).cross(vertices[f[k + 1]] - center))
                        })
                        .sum::<f64>()
                })
                .sum();
            if volume <= 0.0 {
                return Err(MeshError::InwardOrientation);
            }
        }

        let dists: Vec<f64> = vertices.iter().map(|v| v.distance(center)).collect();
        let max_d = dists.iter().cloned().fold(0.0, f64::max);
        let min_d = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let inscribed_radius = 0.5 * (max_d + min_d);
        let inscribed = match reference_radius {
            Some(r) => dists.iter().all(|d| (d - r).abs() <= tol.metric_eps * r),
            None => max_d > 0.0 && (max_d - min_d) <= tol.metric_eps * inscribed_radius,
        };
        let reference_radius =
            reference_radius.unwrap_or(if inscribed { inscribed_radius } else { max_d });

        Ok(Mesh {
            vertices,
            faces,
            edges,
            center,
            reference_radius,
            inscribed,
            topology,
        })
    }
}

impl Mesh {
    pub fn builder(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> MeshBuilder {
        MeshBuilder {
            vertices,
            faces,
            center: Vec3::ZERO,
            reference_radius: None,
            topology: Topology::Closed,
            tol: TolerancePolicy::default(),
        }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    /// Circumsphere radius, present only when every vertex lies on the sphere.
    pub fn radius(&self) -> Option<f64> {
        self.inscribed.then_some(self.reference_radius)
    }

    /// Radius of the reference sphere, whether or not the mesh is inscribed.
    pub fn reference_radius(&self) -> f64 {
        self.reference_radius
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_closed(&self) -> bool {
        self.topology == Topology::Closed
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.faces.len())
    }

    pub fn is_triangular(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }

    pub fn edge_length(&self, e: (usize, usize)) -> f64 {
        self.vertices[e.0].distance(self.vertices[e.1])
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let face = &self.faces[f];
        face.iter()
            .fold(Vec3::ZERO, |acc, &i| acc + self.vertices[i])
            / face.len() as f64
    }

    /// Newell normal of a face (unit length, outward for CCW faces).
    pub fn face_normal(&self, f: usize) -> Vec3 {
        let mut n = Vec3::ZERO;
        for (a, b) in cycle_pairs(&self.faces[f]) {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            n += Vec3::new(
                (p.y - q.y) * (p.z + q.z),
                (p.z - q.z) * (p.x + q.x),
                (p.x - q.x) * (p.y + q.y),
            );
        }
        n.normalized().unwrap_or(Vec3::ZERO)
    }

    /// Number of edges incident to each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Maps each directed edge `(a, b)` to the face that traverses it.
    pub fn directed_edge_faces(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::with_capacity(self.edges.len() * 2);
        for (fi, f) in self.faces.iter().enumerate() {
            for (a, b) in cycle_pairs(f) {
                map.insert((a, b), fi);
            }
        }
        map
    }

    /// Faces around each vertex, counter-clockwise seen from outside.
    ///
    /// Only meaningful for closed meshes, where every vertex has a full fan.
    pub fn vertex_face_cycles(&self) -> Vec<Vec<usize>> {
        let owner = self.directed_edge_faces();
        let mut first = vec![usize::MAX; self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                if first[v] == usize::MAX {
                    first[v] = fi;
                }
            }
        }
        first
            .iter()
            .enumerate()
            .map(|(v, &start)| {
                let mut cycle = Vec::new();
                if start == usize::MAX {
                    return cycle;
                }
                let mut f = start;
                loop {
                    cycle.push(f);
                    // In face f the fan continues across the edge that enters v.
                    let face = &self.faces[f];
                    let k = face.iter().position(|&x| x == v).unwrap();
                    let prev = face[(k + face.len() - 1) % face.len()];
                    match owner.get(&(v, prev)) {
                        Some(&g) if g != start => f = g,
                        _ => break,
                    }
                }
                cycle
            })
            .collect()
    }

    /// Neighbouring vertices of each vertex, counter-clockwise seen from outside.
    pub fn vertex_neighbor_cycles(&self) -> Vec<Vec<usize>> {
        self.vertex_face_cycles()
            .iter()
            .enumerate()
            .map(|(v, cycle)| {
                cycle
                    .iter()
                    .map(|&f| {
                        let face = &self.faces[f];
                        let k = face.iter().position(|&x| x == v).unwrap();
                        face[(k + 1) % face.len()]
                    })
                    .collect()
            })
            .collect()
    }

    /// Boundary loops of an open mesh, each as a vertex cycle.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let owner = self.directed_edge_faces();
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in owner.keys() {
            if !owner.contains_key(&(b, a)) {
                next.insert(a, b);
            }
        }
        let mut loops = Vec::new();
        while let Some((&start, _)) = next.iter().next() {
            let mut ring = vec![start];
            let mut cur = next.remove(&start).unwrap();
            while cur != start {
                ring.push(cur);
                match next.remove(&cur) {
                    Some(n) => cur = n,
                    None => break,
                }
            }
            loops.push(ring);
        }
        loops
    }

    /// Maximum of `| |v - center| - r | / r` over all vertices.
    pub fn sphere_deviation(&self, r: f64) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v.distance(self.center) - r).abs() / r)
            .fold(0.0, f64::max)
    }

    /// Same topology with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Mesh, MeshError> {
        Mesh::builder(
            self.vertices.iter().map(|&v| f(v)).collect(),
            self.faces.clone(),
        )
        .center(f(self.center))
        .topology(self.topology)
        .build()
    }
}

/// Consecutive `(a, b)` pairs of a closed index cycle.
pub(crate) fn cycle_pairs(f: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()]))
}

/// Merges points closer than a fixed distance using a uniform grid.
pub struct VertexWelder {
    cell: f64,
    grid: HashMap<(i64, i64, i64), Vec<usize>>,
    points: Vec<Vec3>,
}

impl VertexWelder {
    pub fn new(eps: f64) -> Self {
        Self {
            cell: eps,
            grid: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, p: Vec3) -> (i64, i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        )
    }

    /// Index of an existing point within `eps` of `p`, if any.
    pub fn find(&self, p: Vec3) -> Option<usize> {
        let (kx, ky, kz) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = self.grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        if let Some(&i) = bucket
                            .iter()
                            .find(|&&i| self.points[i].distance(p) < self.cell)
                        {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    /// Returns the index of `p`, inserting it if no point is within `eps`.
    pub fn insert(&mut self, p: Vec3) -> usize {
        if let Some(i) = self.find(p) {
            return i;
        }
        let i = self.points.len();
        self.points.push(p);
        let k = self.key(p);
        self.grid.entry(k).or_default().push(i);
        i
    }

    pub fn into_points(self) -> Vec<Vec3> {
        self.points
    }
}

/// The seed polyhedra this crate can build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedKind {
    Tetrahedron,
    Octahedron,
    Icosahedron,
    Dodecahedron,
    TruncatedIcosahedron,
}

impl fmt::Display for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedKind::Tetrahedron => "tetrahedron",
            SeedKind::Octahedron => "octahedron",
            SeedKind::Icosahedron => "icosahedron",
            SeedKind::Dodecahedron => "dodecahedron",
            SeedKind::TruncatedIcosahedron => "truncated_icosahedron",
        })
    }
}

impl FromStr for SeedKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "tetra" | "tetrahedron" => Ok(SeedKind::Tetrahedron),
            "octa" | "octahedron" => Ok(SeedKind::Octahedron),
            "icosa" | "icosahedron" => Ok(SeedKind::Icosahedron),
            "dodeca" | "dodecahedron" => Ok(SeedKind::Dodecahedron),
            "trunc_icosa" | "truncated_icosahedron" => Ok(SeedKind::TruncatedIcosahedron),
            other => Err(format!("unknown seed polyhedron `{other}`")),
        }
    }
}

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Builds a seed polyhedron inscribed in the sphere of `radius` about the origin.
///
/// The icosahedron starts from the cyclic permutations of `(0, ±1, ±φ)` and is
/// rotated about the x axis by `atan(1/φ)`, which carries the vertex
/// `(0, 1, φ)` onto the +z axis. The dodecahedron and truncated icosahedron
/// are derived from that icosahedron (face centres, edge trisection points),
/// so all three share its orientation. Output is `radius` times the unit seed.
///
/// # Panics
/// If `radius` is not strictly positive and finite.
pub fn seed(kind: SeedKind, radius: f64) -> Mesh {
    assert!(
        radius > 0.0 && radius.is_finite(),
        "seed radius must be positive, got {radius}"
    );
    let unit = unit_seed(kind);
    let vertices = unit.vertices.iter().map(|&v| v * radius).collect();
    Mesh::builder(vertices, unit.faces)
        .build()
        .expect("scaled seed stays valid")
}

fn unit_seed(kind: SeedKind) -> Mesh {
    match kind {
        SeedKind::Tetrahedron => {
            let s = 1.0 / 3f64.sqrt();
            let v = vec![
                Vec3::new(s, s, s),
                Vec3::new(s, -s, -s),
                Vec3::new(-s, s, -s),
                Vec3::new(-s, -s, s),
            ];
            let f = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
            oriented(v, f)
        }
        SeedKind::Octahedron => {
            let v = vec![
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(-1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, -1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(0.0, 0.0, -1.0),
            ];
            let mut f = Vec::new();
            for &a in &[0, 1] {
                for &b in &[2, 3] {
                    for &c in &[4, 5] {
                        f.push(vec![a, b, c]);
                    }
                }
            }
            oriented(v, f)
        }
        SeedKind::Icosahedron => unit_icosahedron(),
        SeedKind::Dodecahedron => {
            let ico = unit_icosahedron();
            let v = (0..ico.faces.len())
                .map(|f| ico.face_centroid(f).normalized().unwrap())
                .collect();
            build_mesh(v, ico.vertex_face_cycles()).expect("dodecahedron is valid")
        }
        SeedKind::TruncatedIcosahedron => {
            let ico = unit_icosahedron();
            let mut index = HashMap::new();
            let mut v = Vec::new();
            // Trisection point of directed edge a->b nearest to a.
            let mut point = |a: usize, b: usize| {
                *index.entry((a, b)).or_insert_with(|| {
                    let p = (ico.vertices[a] * 2.0 + ico.vertices[b]) / 3.0;
                    v.push(p.normalized().unwrap());
                    v.len() - 1
                })
            };
            let mut faces = Vec::new();
            for (a, ring) in ico.vertex_neighbor_cycles().into_iter().enumerate() {
                faces.push(ring.into_iter().map(|b| point(a, b)).collect());
            }
            for f in &ico.faces {
                let (a, b, c) = (f[0], f[1], f[2]);
                faces.push(vec![
                    point(a, b),
                    point(b, a),
                    point(b, c),
                    point(c, b),
                    point(c, a),
                    point(a, c),
                ]);
            }
            build_mesh(v, faces).expect("truncated icosahedron is valid")
        }
    }
}

fn unit_icosahedron() -> Mesh {
    let mut raw = Vec::with_capacity(12);
    for a in [-1.0, 1.0] {
        for b in [-PHI, PHI] {
            raw.push(Vec3::new(0.0, a, b));
            raw.push(Vec3::new(a, b, 0.0));
            raw.push(Vec3::new(b, 0.0, a));
        }
    }
    let r = (1.0 + PHI * PHI).sqrt();
    let (c, s) = (PHI / r, 1.0 / r);
    let v: Vec<Vec3> = raw
        .into_iter()
        .map(|p| Vec3::new(p.x, p.y * c - p.z * s, p.y * s + p.z * c) / r)
        .collect();

    // Faces are the mutually adjacent triples (edge length 2 before scaling).
    let edge = 2.0 / r;
    let adj = |i: usize, j: usize| (v[i].distance(v[j]) - edge).abs() < 1e-9;
    let mut f = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adj(i, j) && adj(j, k) && adj(i, k) {
                    f.push(vec![i, j, k]);
                }
            }
        }
    }
    oriented(v, f)
}

/// Reverses any face whose normal points towards the origin.
fn oriented(v: Vec<Vec3>, mut f: Vec<Vec<usize>>) -> Mesh {
    for face in &mut f {
        let n = (v[face[1]] - v[face[0]]).cross(v[face[2]] - v[face[0]]);
        if n.dot(v[face[0]]) < 0.0 {
            face.reverse();
        }
    }
    build_mesh(v, f).expect("seed data is a valid closed polyhedron")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tetra_faces() -> Vec<Vec<usize>> {
        seed(SeedKind::Tetrahedron, 1.0).faces().to_vec()
    }

    #[test]
    fn tetrahedron_counts() {
        let t = seed(SeedKind::Tetrahedron, 1.0);
        assert_eq!(mesh_counts(&t), (4, 6, 4));
        assert_eq!(t.radius(), Some(1.0));
    }

    #[test]
    fn removing_a_face_breaks_closure() {
        let t = seed(SeedKind::Tetrahedron, 1.0);
        let mut faces = tetra_faces();
        faces.pop();
        let err = build_mesh(t.vertices().to_vec(), faces).unwrap_err();
        assert_eq!(err, MeshError::EulerViolation(1));
    }

    #[test]
    fn open_tetrahedron_is_accepted_as_open_mesh() {
        let t = seed(SeedKind::Tetrahedron, 1.0);
        let mut faces = tetra_faces();
        faces.pop();
        let open = build_open_mesh(t.vertices().to_vec(), faces).unwrap();
        assert_eq!(open.boundary_loops().len(), 1);
        assert_eq!(open.boundary_loops()[0].len(), 3);
    }

    #[test]
    fn degenerate_and_out_of_range_faces() {
        let t = seed(SeedKind::Tetrahedron, 1.0);
        let mut faces = tetra_faces();
        faces[0] = vec![0, 0, 1];
        assert_eq!(
            build_mesh(t.vertices().to_vec(), faces),
            Err(MeshError::DegenerateFace(0))
        );
        let mut faces = tetra_faces();
        faces[2][1] = 9;
        assert!(matches!(
            build_mesh(t.vertices().to_vec(), faces),
            Err(MeshError::IndexOutOfRange {
                face: 2,
                index: 9,
                ..
            })
        ));
    }

    #[test]
    fn flipped_faces_are_rejected() {
        let t = seed(SeedKind::Tetrahedron, 1.0);
        let mut faces = tetra_faces();
        faces[1].reverse();
        assert!(matches!(
            build_mesh(t.vertices().to_vec(), faces),
            Err(MeshError::InconsistentOrientation(..))
        ));
        let all_flipped = tetra_faces()
            .into_iter()
            .map(|mut f| {
                f.reverse();
                f
            })
            .collect();
        assert_eq!(
            build_mesh(t.vertices().to_vec(), all_flipped),
            Err(MeshError::InwardOrientation)
        );
    }

    #[test]
    fn seed_counts() {
        let expect = [
            (SeedKind::Tetrahedron, (4, 6, 4)),
            (SeedKind::Octahedron, (6, 12, 8)),
            (SeedKind::Icosahedron, (12, 30, 20)),
            (SeedKind::Dodecahedron, (20, 30, 12)),
            (SeedKind::TruncatedIcosahedron, (60, 90, 32)),
        ];
        for (kind, counts) in expect {
            let m = seed(kind, 2.5);
            assert_eq!(m.counts(), counts, "{kind}");
            assert!(m.sphere_deviation(2.5) < 1e-12, "{kind}");
        }
        let ti = seed(SeedKind::TruncatedIcosahedron, 1.0);
        let pent = ti.faces().iter().filter(|f| f.len() == 5).count();
        let hex = ti.faces().iter().filter(|f| f.len() == 6).count();
        assert_eq!((pent, hex), (12, 20));
    }

    #[test]
    fn icosahedron_edge_length_and_orientation() {
        // Oracle: nearest-neighbour distance among normalized (0, ±1, ±φ) permutations.
        let mut raw = Vec::new();
        for a in [-1.0, 1.0] {
            for b in [-PHI, PHI] {
                raw.push(Vec3::new(0.0, a, b));
                raw.push(Vec3::new(a, b, 0.0));
                raw.push(Vec3::new(b, 0.0, a));
            }
        }
        let raw: Vec<Vec3> = raw.iter().map(|v| v.normalized().unwrap()).collect();
        let oracle = (1..12)
            .map(|j| raw[0].distance(raw[j]))
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(oracle, 1.0514622242, epsilon = 1e-10);

        let ico = seed(SeedKind::Icosahedron, 1.0);
        for &e in ico.edges() {
            assert_relative_eq!(ico.edge_length(e), oracle, epsilon = 1e-12);
        }
        assert!(ico.vertices().iter().any(|v| v.distance(Vec3::Z) < 1e-15));
    }

    #[test]
    fn dodecahedron_edge_length() {
        let d = seed(SeedKind::Dodecahedron, 1.0);
        let expect = (5f64.sqrt() - 1.0) / 3f64.sqrt();
        for &e in d.edges() {
            assert_relative_eq!(d.edge_length(e), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn edges_are_sorted_pairs() {
        let m = seed(SeedKind::TruncatedIcosahedron, 1.0);
        assert!(m.edges().iter().all(|&(a, b)| a < b));
        assert!(m.edges().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn seed_scale_covariance() {
        for kind in [
            SeedKind::Tetrahedron,
            SeedKind::Octahedron,
            SeedKind::Icosahedron,
            SeedKind::Dodecahedron,
            SeedKind::TruncatedIcosahedron,
        ] {
            let a = seed(kind, 1.0);
            let b = seed(kind, 3.75);
            assert_eq!(a.faces(), b.faces());
            for (p, q) in a.vertices().iter().zip(b.vertices()) {
                assert_eq!(*p * 3.75, *q);
            }
        }
    }

    #[test]
    fn face_cycles_wind_counter_clockwise() {
        let ico = seed(SeedKind::Icosahedron, 1.0);
        for (v, ring) in ico.vertex_neighbor_cycles().iter().enumerate() {
            assert_eq!(ring.len(), 5);
            let p = ico.vertices()[v];
            for w in 0..5 {
                let a = ico.vertices()[ring[w]] - p;
                let b = ico.vertices()[ring[(w + 1) % 5]] - p;
                assert!(a.cross(b).dot(p) > 0.0);
            }
        }
    }

    #[test]
    fn welder_merges_close_points() {
        let mut w = VertexWelder::new(1e-9);
        let a = w.insert(Vec3::new(1.0, 0.0, 0.0));
        let b = w.insert(Vec3::new(1.0 + 1e-12, 0.0, 0.0));
        let c = w.insert(Vec3::new(1.0, 1e-6, 0.0));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(w.into_points().len(), 2);
    }

    #[test]
    fn tolerance_policy_rejects_non_positive() {
        assert!(TolerancePolicy::new(0.0, 1e-10).is_none());
        assert!(TolerancePolicy::new(1e-9, -1.0).is_none());
        assert!(TolerancePolicy::new(1e-9, 1e-10).is_some());
    }
}

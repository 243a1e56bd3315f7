//! Polar duality, gemmation and dome truncation.

use thiserror::Error;

use crate::mesh::{Mesh, MeshError, TolerancePolicy, Topology, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("face {0} passes through the sphere centre")]
    FaceThroughCenter(usize),
    #[error("face {0} is a triangle; gemmation needs non-triangular faces")]
    TriangularFacePresent(usize),
    #[error("mesh is not inscribed in a sphere")]
    NotInscribed,
    #[error("operation needs a closed mesh")]
    OpenMesh,
    #[error("height fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("dome cut keeps no faces")]
    EmptyDome,
    #[error("kept face {0} has a vertex below the cut plane")]
    StrictCutViolation(usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Foot of the perpendicular from `center` to the plane of face `f`, and its distance.
fn face_foot(p: &Mesh, f: usize) -> (Vec3, f64) {
    let n = p.face_normal(f);
    let face = &p.faces()[f];
    let d = face
        .iter()
        .map(|&i| n.dot(p.vertices()[i] - p.center()))
        .sum::<f64>()
        / face.len() as f64;
    (p.center() + n * d, d)
}

/// Polar dual with respect to the mesh's reference sphere.
///
/// Vertex `f` of the dual is the pole of primal face `f`; face `v` of the dual
/// collects the poles of the faces around primal vertex `v`, in the same
/// counter-clockwise order. Applying it twice returns the original vertices.
pub fn dual(p: &Mesh) -> Result<Mesh, TransformError> {
    if !p.is_closed() {
        return Err(TransformError::OpenMesh);
    }
    let r = p.reference_radius();
    let c = p.center();
    let eps = TolerancePolicy::default().metric_eps * r;
    let poles = (0..p.faces().len())
        .map(|f| {
            let (foot, d) = face_foot(p, f);
            if d <= eps {
                return Err(TransformError::FaceThroughCenter(f));
            }
            Ok(c + (foot - c) * (r * r / (d * d)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Mesh::builder(poles, p.vertex_face_cycles())
        .center(c)
        .reference_radius(r)
        .build()?)
}

/// Erects a right pyramid on every face, apex on the reference sphere above the face centre.
pub fn gemmate(p: &Mesh) -> Result<Mesh, TransformError> {
    let r = p.reference_radius();
    if !p.is_closed() {
        return Err(TransformError::OpenMesh);
    }
    if let Some(f) = p.faces().iter().position(|f| f.len() == 3) {
        return Err(TransformError::TriangularFacePresent(f));
    }
    let c = p.center();
    let eps = TolerancePolicy::default().metric_eps * r;
    let mut vertices = p.vertices().to_vec();
    let mut faces = Vec::new();
    for (fi, face) in p.faces().iter().enumerate() {
        let (foot, d) = face_foot(p, fi);
        if d <= eps {
            return Err(TransformError::FaceThroughCenter(fi));
        }
        let apex = vertices.len();
        vertices.push(c + (foot - c) * (r / d));
        for k in 0..face.len() {
            faces.push(vec![face[k], face[(k + 1) % face.len()], apex]);
        }
    }
    Ok(Mesh::builder(vertices, faces)
        .center(c)
        .reference_radius(r)
        .build()?)
}

/// Reflection through the plane with the given normal, passing through the centre.
pub fn mirror(p: &Mesh, plane_normal: Vec3) -> Result<Mesh, TransformError> {
    let n = plane_normal
        .normalized()
        .ok_or(TransformError::Mesh(MeshError::NonFinite(0)))?;
    let c = p.center();
    let vertices = p
        .vertices()
        .iter()
        .map(|&v| v - n * (2.0 * n.dot(v - c)))
        .collect();
    let faces = p
        .faces()
        .iter()
        .map(|f| f.iter().rev().copied().collect())
        .collect();
    Ok(Mesh::builder(vertices, faces)
        .center(c)
        .reference_radius(p.reference_radius())
        .topology(p.topology())
        .build()?)
}

/// Parameters of a horizontal dome cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomeCut {
    /// Fraction of the sphere's height kept, in `(0, 1]`.
    pub height_fraction: f64,
    /// Direction of the dome's apex. Defaults to +z.
    pub up: Vec3,
    /// Fail instead of keeping faces that dip below the cut plane.
    pub strict: bool,
}

impl DomeCut {
    pub fn new(height_fraction: f64) -> Self {
        Self {
            height_fraction,
            up: Vec3::Z,
            strict: false,
        }
    }
}

/// A cap of a sphere mesh.
#[derive(Debug, Clone)]
pub struct Dome {
    pub mesh: Mesh,
    /// Boundary loops (vertex cycles); empty when nothing was cut.
    pub boundary: Vec<Vec<usize>>,
    /// Indices of the source faces that were kept, ascending.
    pub kept_faces: Vec<usize>,
    /// Cut height along `up` relative to the centre.
    pub cut_height: f64,
}

/// Keeps the faces whose centroid lies at or above `R·(1 − 2·fraction)` along `up`.
///
/// Whole faces are kept or dropped, so no new vertices are created.
pub fn truncate_dome(p: &Mesh, cut: DomeCut) -> Result<Dome, TransformError> {
    let r = p.radius().ok_or(TransformError::NotInscribed)?;
    let f = cut.height_fraction;
    if !(f > 0.0 && f <= 1.0) {
        return Err(TransformError::InvalidFraction(f));
    }
    let up = cut.up.normalized().ok_or(TransformError::EmptyDome)?;
    let c = p.center();
    let z_cut = r * (1.0 - 2.0 * f);
    if f == 1.0 {
        return Ok(Dome {
            mesh: p.clone(),
            boundary: Vec::new(),
            kept_faces: (0..p.faces().len()).collect(),
            cut_height: z_cut,
        });
    }
    let height = |v: Vec3| up.dot(v - c);
    let eps = TolerancePolicy::default().metric_eps * r;

    let mut kept = Vec::new();
    for fi in 0..p.faces().len() {
        if height(p.face_centroid(fi)) >= z_cut {
            if cut.strict
                && p.faces()[fi]
                    .iter()
                    .any(|&v| height(p.vertices()[v]) < z_cut - eps)
            {
                return Err(TransformError::StrictCutViolation(fi));
            }
            kept.push(fi);
        }
    }
    if kept.is_empty() {
        return Err(TransformError::EmptyDome);
    }

    let mut remap = vec![usize::MAX; p.vertices().len()];
    let mut vertices = Vec::new();
    for &fi in &kept {
        for &v in &p.faces()[fi] {
            if remap[v] == usize::MAX {
                remap[v] = 0;
            }
        }
    }
    for (v, slot) in remap.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(p.vertices()[v]);
        }
    }
    let faces = kept
        .iter()
        .map(|&fi| p.faces()[fi].iter().map(|&v| remap[v]).collect())
        .collect();
    let topology = if kept.len() == p.faces().len() {
        Topology::Closed
    } else {
        Topology::Open
    };
    let mesh = Mesh::builder(vertices, faces)
        .center(c)
        .reference_radius(r)
        .topology(topology)
        .build()?;
    let boundary = mesh.boundary_loops();
    Ok(Dome {
        mesh,
        boundary,
        kept_faces: kept,
        cut_height: z_cut,
    })
}

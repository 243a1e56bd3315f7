//! Combinatorial and metric checks on generated meshes.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Mesh, TolerancePolicy, Vec3, VertexWelder};
use crate::tessellate::TessellationSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("face {0} is not a triangle")]
    NonTriangularFace(usize),
    #[error("mesh is not a class I icosahedral geodesic sphere")]
    NotClassI,
    #[error("degenerate framework: {0}")]
    DegenerateGeometry(&'static str),
}

/// Whether `(V, S, F)` match `(10T + 2, 30T, 20T)`.
pub fn verify_counts(p: &Mesh, spec: &TessellationSpec) -> bool {
    let t = spec.t() as usize;
    p.counts() == (10 * t + 2, 30 * t, 20 * t)
}

/// One strut length class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeClass {
    /// Mean edge length of the class divided by the sphere radius.
    pub chord_factor: f64,
    pub count: usize,
}

/// Distinct chord factors with multiplicities, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClassTable {
    pub entries: Vec<EdgeClass>,
    pub tolerance: f64,
}

impl EdgeClassTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }
}

/// Groups chord factors by single linkage: a gap larger than `tol` between
/// consecutive sorted values starts a new class. Also returns each edge's class.
pub fn classify_edges(p: &Mesh, tol: f64) -> (EdgeClassTable, Vec<usize>) {
    let r = p.reference_radius();
    let chords: Vec<f64> = p.edges().iter().map(|&e| p.edge_length(e) / r).collect();
    let mut order: Vec<usize> = (0..chords.len()).collect();
    order.sort_by(|&a, &b| chords[a].total_cmp(&chords[b]).then(a.cmp(&b)));

    let mut labels = vec![0; chords.len()];
    let mut entries: Vec<EdgeClass> = Vec::new();
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for &i in &order {
        let c = chords[i];
        if prev.is_none_or(|p| c - p > tol) {
            if let Some(last) = entries.last_mut() {
                last.chord_factor = sum / last.count as f64;
            }
            entries.push(EdgeClass {
                chord_factor: c,
                count: 0,
            });
            sum = 0.0;
        }
        let last = entries.last_mut().unwrap();
        last.count += 1;
        sum += c;
        labels[i] = entries.len() - 1;
        prev = Some(c);
    }
    if let Some(last) = entries.last_mut() {
        last.chord_factor = sum / last.count as f64;
    }
    (
        EdgeClassTable {
            entries,
            tolerance: tol,
        },
        labels,
    )
}

pub fn edge_length_classes(p: &Mesh, tol: f64) -> EdgeClassTable {
    classify_edges(p, tol).0
}

pub fn vertex_degree_histogram(p: &Mesh) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in p.vertex_degrees() {
        *h.entry(d).or_default() += 1;
    }
    h
}

fn circumcenter(a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let u = b - a;
    let v = c - a;
    let w = u.cross(v);
    a + (w.cross(u) * v.dot(v) + v.cross(w) * u.dot(u)) / (2.0 * w.dot(w))
}

/// Largest distance, relative to the radius, between a face's circumcentre and
/// the foot of the perpendicular dropped from the sphere centre onto it.
pub fn circumcenter_deviation(p: &Mesh) -> Result<f64, AnalysisError> {
    let c = p.center();
    let r = p.reference_radius();
    let mut worst: f64 = 0.0;
    for (fi, f) in p.faces().iter().enumerate() {
        if f.len() != 3 {
            return Err(AnalysisError::NonTriangularFace(fi));
        }
        let [a, b, d] = [f[0], f[1], f[2]].map(|i| p.vertices()[i]);
        let n = (b - a).cross(d - a).normalized().unwrap_or(Vec3::ZERO);
        let foot = c + n * n.dot(a - c);
        worst = worst.max(foot.distance(circumcenter(a, b, d)) / r);
    }
    Ok(worst)
}

/// An angle, printable in degrees, minutes and seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0 * 180.0 / PI
    }

    pub fn from_dms(d: u32, m: u32, s: f64) -> Self {
        Angle((d as f64 + m as f64 / 60.0 + s / 3600.0) * PI / 180.0)
    }

    /// Whole degrees, whole minutes and (fractional) seconds.
    pub fn dms(self) -> (u32, u32, f64) {
        Self::split_seconds(self.degrees() * 3600.0)
    }

    fn split_seconds(total: f64) -> (u32, u32, f64) {
        let d = (total / 3600.0).floor();
        let m = ((total - d * 3600.0) / 60.0).floor();
        let s = total - d * 3600.0 - m * 60.0;
        (d as u32, m as u32, s)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hundredths = (self.degrees() * 360_000.0).round() / 100.0;
        let (d, m, s) = Self::split_seconds(hundredths);
        write!(f, "{d}°{m:02}′{s:05.2}″")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceShape {
    Equilateral,
    /// `base` is the face-local index `k` of edge `(f[k], f[k+1])`.
    Isosceles {
        base: usize,
        apex: Angle,
        leg_base_ratio: f64,
    },
    Scalene,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceMetric {
    pub face: usize,
    pub shape: FaceShape,
}

impl FaceMetric {
    /// Apex angle and leg/base ratio; `(60°, 1)` for equilateral faces.
    pub fn apex_and_ratio(&self) -> Option<(Angle, f64)> {
        match self.shape {
            FaceShape::Equilateral => Some((Angle(PI / 3.0), 1.0)),
            FaceShape::Isosceles {
                apex,
                leg_base_ratio,
                ..
            } => Some((apex, leg_base_ratio)),
            FaceShape::Scalene => None,
        }
    }
}

/// Classifies each triangular face and measures isosceles ones.
///
/// Two sides are equal when they differ by at most `metric_eps` times the
/// reference radius; the base is the side that differs from the other two.
pub fn face_metrics(p: &Mesh, tol: &TolerancePolicy) -> Result<Vec<FaceMetric>, AnalysisError> {
    let eps = tol.metric_eps * p.reference_radius();
    p.faces()
        .iter()
        .enumerate()
        .map(|(fi, f)| {
            if f.len() != 3 {
                return Err(AnalysisError::NonTriangularFace(fi));
            }
            let side = |k: usize| p.vertices()[f[k]].distance(p.vertices()[f[(k + 1) % 3]]);
            let l = [side(0), side(1), side(2)];
            let eq = |i: usize, j: usize| (l[i] - l[j]).abs() <= eps;
            let shape = if eq(0, 1) && eq(1, 2) && eq(0, 2) {
                FaceShape::Equilateral
            } else if let Some(base) = (0..3).find(|&k| eq((k + 1) % 3, (k + 2) % 3)) {
                let leg = 0.5 * (l[(base + 1) % 3] + l[(base + 2) % 3]);
                FaceShape::Isosceles {
                    base,
                    apex: Angle(2.0 * (0.5 * l[base] / leg).asin()),
                    leg_base_ratio: leg / l[base],
                }
            } else {
                FaceShape::Scalene
            };
            Ok(FaceMetric { face: fi, shape })
        })
        .collect()
}

/// Distances and shortest-path counts from `src` by breadth-first search.
fn bfs_paths(adj: &[Vec<usize>], src: usize) -> (Vec<usize>, Vec<u64>) {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut paths = vec![0u64; adj.len()];
    dist[src] = 0;
    paths[src] = 1;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[u] + 1 {
                paths[w] = paths[w].saturating_add(paths[u]);
            }
        }
    }
    (dist, paths)
}

/// Frequency of a class I icosahedral geodesic sphere: the number of edges on
/// the straight path between neighbouring degree-5 vertices.
///
/// Every degree-5 vertex must see exactly five others at the common minimum
/// distance, each joined by a unique shortest path.
pub fn detect_frequency(p: &Mesh) -> Result<u32, AnalysisError> {
    let deg = p.vertex_degrees();
    let fives: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 5).collect();
    if fives.len() != 12 {
        return Err(AnalysisError::NotClassI);
    }
    let adj = p.adjacency();
    let mut freq = None;
    for &v in &fives {
        let (dist, paths) = bfs_paths(&adj, v);
        let nearest = fives
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| dist[w])
            .min()
            .ok_or(AnalysisError::NotClassI)?;
        let near: Vec<usize> = fives
            .iter()
            .copied()
            .filter(|&w| w != v && dist[w] == nearest)
            .collect();
        if near.len() != 5 || near.iter().any(|&w| paths[w] != 1) {
            return Err(AnalysisError::NotClassI);
        }
        match freq {
            None => freq = Some(nearest),
            Some(f) if f != nearest => return Err(AnalysisError::NotClassI),
            _ => {}
        }
    }
    Ok(freq.unwrap() as u32)
}

/// Orthonormal frame from a point and a second point, with an optional flip.
fn frame(c: Vec3, p0: Vec3, p1: Vec3, flip: bool) -> Option<[Vec3; 3]> {
    let e1 = (p0 - c).normalized()?;
    let q = p1 - c;
    let e2 = (q - e1 * e1.dot(q)).normalized()?;
    let e3 = e1.cross(e2);
    Some([e1, e2, if flip { -e3 } else { e3 }])
}

/// Whether an isometry about the centres maps the vertex set of `p` onto `q`.
///
/// Candidate isometries send one reference vertex of `p` (of the rarest
/// degree) and one of its neighbours onto every compatible vertex/neighbour
/// pair of `q`; reflections are tried too when `allow_reflection` is set.
pub fn congruent(p: &Mesh, q: &Mesh, allow_reflection: bool, tol: &TolerancePolicy) -> bool {
    let (Some(rp), Some(rq)) = (p.radius(), q.radius()) else {
        return false;
    };
    if p.counts() != q.counts() || (rp - rq).abs() > tol.metric_eps * rp {
        return false;
    }
    let eps = tol.metric_eps * rp;
    let (dp, dq) = (p.vertex_degrees(), q.vertex_degrees());
    let hp = vertex_degree_histogram(p);
    if hp != vertex_degree_histogram(q) {
        return false;
    }
    let rare = hp
        .iter()
        .min_by_key(|&(d, c)| (*c, *d))
        .map(|(&d, _)| d)
        .unwrap();

    let (adj_p, adj_q) = (p.adjacency(), q.adjacency());
    let p0 = (0..dp.len()).find(|&v| dp[v] == rare).unwrap();
    let p1 = adj_p[p0][0];
    let link = p.vertices()[p0].distance(p.vertices()[p1]);
    let (cp, cq) = (p.center(), q.center());

    let mut lookup = VertexWelder::new(eps);
    for &v in q.vertices() {
        lookup.insert(v - cq);
    }

    let flips: &[bool] = if allow_reflection {
        &[false, true]
    } else {
        &[false]
    };
    for &flip in flips {
        let Some(fp) = frame(cp, p.vertices()[p0], p.vertices()[p1], false) else {
            return false;
        };
        for q0 in (0..dq.len()).filter(|&v| dq[v] == rare) {
            for &q1 in &adj_q[q0] {
                if dq[q1] != dp[p1]
                    || (q.vertices()[q0].distance(q.vertices()[q1]) - link).abs() > eps
                {
                    continue;
                }
                let Some(fq) = frame(cq, q.vertices()[q0], q.vertices()[q1], flip) else {
                    continue;
                };
                let map = |v: Vec3| {
                    let d = v - cp;
                    fq[0] * fp[0].dot(d) + fq[1] * fp[1].dot(d) + fq[2] * fp[2].dot(d)
                };
                if p.vertices().iter().all(|&v| lookup.find(map(v)).is_some()) {
                    return true;
                }
            }
        }
    }
    false
}

/// Whether two closed meshes have isomorphic face structures, orientation included.
///
/// Tries every directed edge of `q` as the image of one fixed directed edge
/// of `p`, then propagates the correspondence face by face.
pub fn combinatorially_equivalent(p: &Mesh, q: &Mesh) -> bool {
    if p.counts() != q.counts()
        || vertex_degree_histogram(p) != vertex_degree_histogram(q)
        || !p.is_closed()
        || !q.is_closed()
    {
        return false;
    }
    let (op, oq) = (p.directed_edge_faces(), q.directed_edge_faces());
    let f0 = &p.faces()[0];
    let start = (f0[0], f0[1]);
    'candidates: for &(a, b) in oq.keys() {
        let mut vmap = vec![usize::MAX; p.vertices().len()];
        let mut fmap = vec![usize::MAX; p.faces().len()];
        let mut stack = vec![(start, (a, b))];
        while let Some(((u, v), (x, y))) = stack.pop() {
            let (fp, fq) = (op[&(u, v)], oq[&(x, y)]);
            if fmap[fp] != usize::MAX {
                if fmap[fp] != fq || vmap[u] != x || vmap[v] != y {
                    continue 'candidates;
                }
                continue;
            }
            let (pf, qf) = (&p.faces()[fp], &q.faces()[fq]);
            if pf.len() != qf.len() {
                continue 'candidates;
            }
            fmap[fp] = fq;
            let i = pf.iter().position(|&w| w == u).unwrap();
            let j = qf.iter().position(|&w| w == x).unwrap();
            let k = pf.len();
            for s in 0..k {
                let (pu, qu) = (pf[(i + s) % k], qf[(j + s) % k]);
                if vmap[pu] == usize::MAX {
                    vmap[pu] = qu;
                } else if vmap[pu] != qu {
                    continue 'candidates;
                }
                let (pv, qv) = (pf[(i + s + 1) % k], qf[(j + s + 1) % k]);
                stack.push(((pv, pu), (qv, qu)));
            }
        }
        if fmap.iter().all(|&f| f != usize::MAX) {
            let mut seen = vec![false; q.vertices().len()];
            if vmap.iter().all(|&w| !std::mem::replace(&mut seen[w], true)) {
                return true;
            }
        }
    }
    false
}

/// Bar-and-joint framework: points joined by fixed-length bars.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    pub points: Vec<Vec3>,
    pub bars: Vec<(usize, usize)>,
}

impl From<&Mesh> for Framework {
    fn from(m: &Mesh) -> Self {
        Framework {
            points: m.vertices().to_vec(),
            bars: m.edges().to_vec(),
        }
    }
}

/// S × 3V matrix; the row of bar (i, j) holds `p_i − p_j` in block i and `p_j − p_i` in block j.
pub fn rigidity_matrix(fw: &Framework) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(fw.bars.len(), 3 * fw.points.len());
    for (row, &(i, j)) in fw.bars.iter().enumerate() {
        let d = (fw.points[i] - fw.points[j]).to_array();
        for k in 0..3 {
            r[(row, 3 * i + k)] = d[k];
            r[(row, 3 * j + k)] = -d[k];
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub edge_rows: usize,
    pub dof_cols: usize,
    pub rank: usize,
    pub required_rank: usize,
    pub rigid: bool,
    pub largest_singular_value: f64,
}

fn check_geometry(fw: &Framework) -> Result<(), AnalysisError> {
    if fw.points.len() < 3 {
        return Err(AnalysisError::DegenerateGeometry("fewer than 3 joints"));
    }
    let scale = fw
        .points
        .iter()
        .flat_map(|a| fw.points.iter().map(move |b| a.distance(*b)))
        .fold(0.0, f64::max);
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    if fw
        .bars
        .iter()
        .any(|&(i, j)| fw.points[i].distance(fw.points[j]) <= eps)
    {
        return Err(AnalysisError::DegenerateGeometry("coincident joints"));
    }
    let p0 = fw.points[0];
    let far = fw
        .points
        .iter()
        .copied()
        .max_by(|a, b| a.distance(p0).total_cmp(&b.distance(p0)))
        .unwrap();
    let axis = far - p0;
    let spread = fw
        .points
        .iter()
        .map(|&p| (p - p0).cross(axis).norm())
        .fold(0.0, f64::max);
    if axis.norm() <= eps || spread <= eps * scale {
        return Err(AnalysisError::DegenerateGeometry("joints are collinear"));
    }
    Ok(())
}

/// Infinitesimal rigidity by numerical rank of the rigidity matrix.
///
/// Singular values above `rank_eps · σ_max` count towards the rank; the
/// framework is rigid when the rank equals `3V − 6`.
pub fn is_infinitesimally_rigid(
    fw: &Framework,
    tol: &TolerancePolicy,
) -> Result<RigidityReport, AnalysisError> {
    check_geometry(fw)?;
    let r = rigidity_matrix(fw);
    let sv = r.singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > tol.rank_eps * sigma_max).count();
    let required_rank = 3 * fw.points.len() - 6;
    Ok(RigidityReport {
        edge_rows: r.nrows(),
        dof_cols: r.ncols(),
        rank,
        required_rank,
        rigid: rank == required_rank,
        largest_singular_value: sigma_max,
    })
}

/// Summary of a mesh, as printed by `geodome analyze`.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub counts: (usize, usize, usize),
    pub spec: Option<TessellationSpec>,
    pub counts_match: Option<bool>,
    pub radius: f64,
    pub inscribed: bool,
    pub classes: EdgeClassTable,
    pub degrees: BTreeMap<usize, usize>,
    pub circumcenter_deviation: Option<f64>,
    /// Distinct isosceles or equilateral face shapes: `(apex, leg/base, faces)`.
    pub face_shapes: Vec<(Angle, f64, usize)>,
    pub scalene_faces: usize,
    pub frequency: Option<u32>,
}

impl AnalysisReport {
    pub fn compute(p: &Mesh, spec: Option<TessellationSpec>, tol: &TolerancePolicy) -> Self {
        let circumcenter_deviation = circumcenter_deviation(p).ok();
        let mut face_shapes: Vec<(Angle, f64, usize)> = Vec::new();
        let mut scalene_faces = 0;
        if let Ok(metrics) = face_metrics(p, tol) {
            let mut shapes: Vec<(Angle, f64)> = Vec::new();
            for m in &metrics {
                match m.apex_and_ratio() {
                    Some(s) => shapes.push(s),
                    None => scalene_faces += 1,
                }
            }
            shapes.sort_by(|a, b| a.1.total_cmp(&b.1));
            for (apex, ratio) in shapes {
                match face_shapes.last_mut() {
                    Some(last) if ratio - last.1 <= tol.metric_eps => last.2 += 1,
                    _ => face_shapes.push((apex, ratio, 1)),
                }
            }
        }
        AnalysisReport {
            counts: p.counts(),
            spec,
            counts_match: spec.map(|s| verify_counts(p, &s)),
            radius: p.reference_radius(),
            inscribed: p.radius().is_some(),
            classes: edge_length_classes(p, tol.metric_eps),
            degrees: vertex_degree_histogram(p),
            circumcenter_deviation,
            face_shapes,
            scalene_faces,
            frequency: detect_frequency(p).ok(),
        }
    }

    /// `(quantity, value)` rows in a fixed order.
    pub fn rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("vertices".to_string(), self.counts.0.to_string()),
            ("edges".to_string(), self.counts.1.to_string()),
            ("faces".to_string(), self.counts.2.to_string()),
            (
                "euler_characteristic".to_string(),
                (self.counts.0 as i64 - self.counts.1 as i64 + self.counts.2 as i64).to_string(),
            ),
            ("radius".to_string(), format!("{}", self.radius)),
            ("inscribed".to_string(), self.inscribed.to_string()),
        ];
        if let Some(spec) = self.spec {
            rows.push(("m".into(), spec.m().to_string()));
            rows.push(("n".into(), spec.n().to_string()));
            rows.push(("T".into(), spec.t().to_string()));
            rows.push(("class".into(), spec.class().to_string()));
        }
        if let Some(ok) = self.counts_match {
            rows.push(("counts_match_T".into(), ok.to_string()));
        }
        if let Some(f) = self.frequency {
            rows.push(("frequency".into(), f.to_string()));
        }
        for (d, c) in &self.degrees {
            rows.push((format!("degree_{d}"), c.to_string()));
        }
        rows.push(("edge_classes".into(), self.classes.len().to_string()));
        for (k, e) in self.classes.entries.iter().enumerate() {
            rows.push((
                format!("class_{k}_chord_factor"),
                format!("{}", e.chord_factor),
            ));
            rows.push((format!("class_{k}_count"), e.count.to_string()));
        }
        if let Some(dev) = self.circumcenter_deviation {
            rows.push(("circumcenter_deviation".into(), format!("{dev:e}")));
        }
        for (k, (apex, ratio, count)) in self.face_shapes.iter().enumerate() {
            rows.push((format!("shape_{k}_leg_base_ratio"), format!("{ratio}")));
            rows.push((format!("shape_{k}_apex_deg"), format!("{}", apex.degrees())));
            rows.push((format!("shape_{k}_apex_dms"), apex.to_string()));
            rows.push((format!("shape_{k}_faces"), count.to_string()));
        }
        rows.push(("scalene_faces".into(), self.scalene_faces.to_string()));
        rows
    }
}

//! OBJ meshes, JSON strut schedules and CSV analysis tables.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{classify_edges, AnalysisReport, EdgeClass, EdgeClassTable};
use crate::mesh::{Mesh, MeshError, TolerancePolicy, Topology, Vec3};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("mesh is not inscribed in a sphere")]
    NotInscribed,
    #[error("invalid strut schedule: {0}")]
    InvalidSchedule(String),
}

impl IoError {
    /// Validation failures as opposed to parse or filesystem failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            IoError::Mesh(_) | IoError::NotInscribed | IoError::InvalidSchedule(_)
        )
    }
}

/// Writes `v` lines (17 significant digits) then 1-based `f` lines.
pub fn write_obj<W: Write>(p: &Mesh, mut w: W) -> io::Result<()> {
    for v in p.vertices() {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
    }
    for f in p.faces() {
        write!(w, "f")?;
        for &i in f {
            write!(w, " {}", i + 1)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn export_obj(p: &Mesh, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_obj(p, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads `v` and `f` lines; every other line type is ignored.
pub fn read_obj<R: BufRead>(r: R, topology: Topology) -> Result<Mesh, IoError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|e| parse_err(lineno, format!("bad coordinate `{t}`: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != 3 {
                    return Err(parse_err(lineno, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let face = tokens
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let i: i64 = head
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad index `{t}`: {e}")))?;
                        if i < 1 {
                            return Err(parse_err(lineno, format!("index {i} is not 1-based")));
                        }
                        Ok(i as usize - 1)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(&i) = face.iter().find(|&&i| i >= vertices.len()) {
                    return Err(parse_err(
                        lineno,
                        format!("index {} refers to an undefined vertex", i + 1),
                    ));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok(Mesh::builder(vertices, faces).topology(topology).build()?)
}

pub fn import_obj(path: impl AsRef<Path>, topology: Topology) -> Result<Mesh, IoError> {
    read_obj(BufReader::new(fs::File::open(path)?), topology)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strut {
    pub id: usize,
    pub node_a: usize,
    pub node_b: usize,
    pub chord_factor: f64,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrutClass {
    pub label: usize,
    pub chord_factor: f64,
    pub count: usize,
}

/// Node coordinates, struts and their length classes, ready for a builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrutSchedule {
    pub radius: f64,
    pub nodes: Vec<Node>,
    pub struts: Vec<Strut>,
    pub classes: Vec<StrutClass>,
    pub tolerance: f64,
}

impl StrutSchedule {
    pub fn from_mesh(p: &Mesh, tol: &TolerancePolicy) -> Result<Self, IoError> {
        let r = p.radius().ok_or(IoError::NotInscribed)?;
        let (table, labels) = classify_edges(p, tol.metric_eps);
        let nodes = p
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, v)| Node {
                id,
                x: v.x,
                y: v.y,
                z: v.z,
            })
            .collect();
        let struts = p
            .edges()
            .iter()
            .zip(&labels)
            .enumerate()
            .map(|(id, (&(a, b), &class))| Strut {
                id,
                node_a: a,
                node_b: b,
                chord_factor: p.edge_length((a, b)) / r,
                class,
            })
            .collect();
        let classes = table
            .entries
            .iter()
            .enumerate()
            .map(|(label, e)| StrutClass {
                label,
                chord_factor: e.chord_factor,
                count: e.count,
            })
            .collect();
        Ok(StrutSchedule {
            radius: r,
            nodes,
            struts,
            classes,
            tolerance: table.tolerance,
        })
    }

    pub fn class_table(&self) -> EdgeClassTable {
        EdgeClassTable {
            entries: self
                .classes
                .iter()
                .map(|c| EdgeClass {
                    chord_factor: c.chord_factor,
                    count: c.count,
                })
                .collect(),
            tolerance: self.tolerance,
        }
    }

    /// Checks node references, chord factors and class labels.
    pub fn validate(&self, tol: &TolerancePolicy) -> Result<(), IoError> {
        let bad = |m: String| Err(IoError::InvalidSchedule(m));
        if self.radius.is_nan() || self.radius <= 0.0 {
            return bad(format!("radius {} is not positive", self.radius));
        }
        let pos = |id: usize| {
            self.nodes
                .get(id)
                .filter(|n| n.id == id)
                .map(|n| Vec3::new(n.x, n.y, n.z))
        };
        let mut per_class = vec![0usize; self.classes.len()];
        for s in &self.struts {
            let (Some(a), Some(b)) = (pos(s.node_a), pos(s.node_b)) else {
                return bad(format!("strut {} references a missing node", s.id));
            };
            if (a.distance(b) / self.radius - s.chord_factor).abs() > tol.metric_eps {
                return bad(format!("strut {} chord factor disagrees with nodes", s.id));
            }
            match per_class.get_mut(s.class) {
                Some(c) => *c += 1,
                None => return bad(format!("strut {} has unknown class {}", s.id, s.class)),
            }
        }
        for (c, n) in self.classes.iter().zip(&per_class) {
            if c.count != *n {
                return bad(format!(
                    "class {} lists {} struts, found {n}",
                    c.label, c.count
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, IoError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn export_schedule(
    p: &Mesh,
    path: impl AsRef<Path>,
    tol: &TolerancePolicy,
) -> Result<(), IoError> {
    let schedule = StrutSchedule::from_mesh(p, tol)?;
    fs::write(path, schedule.to_json()?)?;
    Ok(())
}

pub fn import_schedule(path: impl AsRef<Path>) -> Result<StrutSchedule, IoError> {
    StrutSchedule::from_json(&fs::read_to_string(path)?)
}

/// Two-column `quantity,value` table.
pub fn write_csv<W: Write>(rows: &[(String, String)], mut w: W) -> io::Result<()> {
    writeln!(w, "quantity,value")?;
    for (q, v) in rows {
        writeln!(w, "{q},{v}")?;
    }
    Ok(())
}

pub fn export_csv(report: &AnalysisReport, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_csv(&report.rows(), &mut w)?;
    w.flush()?;
    Ok(())
}

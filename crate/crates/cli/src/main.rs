//! `geodome` command line: generate, transform, analyze and export meshes.
//!
//! Commands hand meshes to each other through OBJ files. Exit status is 0 on
//! success, 2 on a validation error and 3 on a parse or I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use geodome::analysis::{is_infinitesimally_rigid, AnalysisReport, Framework};
use geodome::io::{self, IoError};
use geodome::mesh::{seed, Mesh, SeedKind, TolerancePolicy, Topology, Vec3};
use geodome::tessellate::{project_to_sphere, stepping_projection, subdivide, TessellationSpec};
use geodome::transforms::{dual, gemmate, truncate_dome, DomeCut};

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Io(m) => write!(f, "error: {m}"),
        }
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}

validation_from!(
    geodome::mesh::MeshError,
    geodome::tessellate::TessellationError,
    geodome::transforms::TransformError,
    geodome::analysis::AnalysisError
);

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "geodome",
    version,
    about = "Geodesic spheres, Goldberg duals and dome strut tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input mesh (OBJ).
    #[arg(long, short)]
    input: PathBuf,
    /// Accept meshes with boundary edges, such as domes.
    #[arg(long)]
    open: bool,
}

impl Input {
    fn load(&self) -> Result<Mesh, CliError> {
        let topology = if self.open {
            Topology::Open
        } else {
            Topology::Closed
        };
        Ok(io::import_obj(&self.input, topology)?)
    }
}

#[derive(Args)]
struct LatticeArgs {
    /// Lattice step m, recorded in reports.
    #[arg(long)]
    m: Option<i64>,
    /// Lattice step n, recorded in reports.
    #[arg(long)]
    n: Option<i64>,
}

impl LatticeArgs {
    fn spec(&self) -> Result<Option<TessellationSpec>, CliError> {
        match (self.m, self.n) {
            (None, None) => Ok(None),
            (m, n) => Ok(Some(TessellationSpec::new(m.unwrap_or(0), n.unwrap_or(0))?)),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a geodesic sphere from a triangular seed.
    Generate {
        /// tetra, octa or icosa.
        #[arg(long, default_value = "icosa")]
        seed: SeedKind,
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 0)]
        n: i64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Reach frequency m (a power of two, n = 0) by repeated 2v steps.
        #[arg(long)]
        stepping: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Polar dual about the circumsphere, or the sphere of --radius.
    Dual {
        #[command(flatten)]
        input: Input,
        /// Polarity sphere radius, needed when the input is not inscribed.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Raise a pyramid on every non-triangular face.
    Gemmate {
        #[command(flatten)]
        input: Input,
        /// Reference sphere radius, needed when the input is not inscribed.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Cut a dome keeping faces whose centroid is above R(1 - 2F).
    Truncate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        fraction: f64,
        /// Apex direction as x,y,z.
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        up: Vec3,
        /// Fail if a kept face dips below the cut.
        #[arg(long)]
        strict: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print counts, strut classes, degrees and face shapes.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rank test of the bar-and-joint framework formed by the edges.
    Rigidity {
        #[command(flatten)]
        input: Input,
    },
    /// Write a mesh as OBJ, a JSON strut schedule or a CSV analysis table.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        format: Format,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        &[x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err("expected three comma-separated numbers".into()),
    }
}

/// Prints lines to stdout, stopping quietly if the reader goes away.
fn emit(lines: impl IntoIterator<Item = String>) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    for line in lines {
        match writeln!(out, "{line}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            r => r?,
        }
    }
    Ok(())
}

fn save(mesh: &Mesh, out: &Path) -> Result<(), CliError> {
    io::export_obj(mesh, out)?;
    let (v, s, f) = mesh.counts();
    emit([format!("wrote {}: V={v} S={s} F={f}", out.display())])
}

/// Attaches the reference sphere that polar constructions need.
fn with_sphere(mesh: Mesh, radius: Option<f64>) -> Result<Mesh, CliError> {
    match (radius, mesh.radius()) {
        (Some(r), _) => Ok(
            Mesh::builder(mesh.vertices().to_vec(), mesh.faces().to_vec())
                .reference_radius(r)
                .build()?,
        ),
        (None, Some(_)) => Ok(mesh),
        (None, None) => Err(CliError::Validation(
            "input is not inscribed; pass --radius for the reference sphere".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = TolerancePolicy::default();
    match cli.command {
        Command::Generate {
            seed: kind,
            m,
            n,
            radius,
            stepping,
            out,
        } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(CliError::Validation(format!(
                    "radius {radius} must be positive"
                )));
            }
            let base = seed(kind, radius);
            let mesh = if stepping {
                if n != 0 || m < 2 || (m & (m - 1)) != 0 {
                    return Err(CliError::Validation(
                        "--stepping needs n = 0 and m a power of two".into(),
                    ));
                }
                stepping_projection(&base, m.trailing_zeros())?
            } else {
                project_to_sphere(&subdivide(&base, m, n)?)?
            };
            save(&mesh, &out)
        }
        Command::Dual { input, radius, out } => {
            save(&dual(&with_sphere(input.load()?, radius)?)?, &out)
        }
        Command::Gemmate { input, radius, out } => {
            save(&gemmate(&with_sphere(input.load()?, radius)?)?, &out)
        }
        Command::Truncate {
            input,
            fraction,
            up,
            strict,
            out,
        } => {
            let dome = truncate_dome(
                &input.load()?,
                DomeCut {
                    height_fraction: fraction,
                    up,
                    strict,
                },
            )?;
            let rings: Vec<usize> = dome.boundary.iter().map(Vec::len).collect();
            save(&dome.mesh, &out)?;
            emit([format!("boundary loops: {rings:?}")])
        }
        Command::Analyze {
            input,
            lattice,
            csv,
        } => {
            let report = AnalysisReport::compute(&input.load()?, lattice.spec()?, &tol);
            let rows = report.rows();
            if let Some(path) = csv {
                io::export_csv(&report, path)?;
            }
            let width = rows.iter().map(|(q, _)| q.len()).max().unwrap_or(0);
            emit(rows.iter().map(|(q, v)| format!("{q:<width$}  {v}")))
        }
        Command::Rigidity { input } => {
            let mesh = input.load()?;
            let r = is_infinitesimally_rigid(&Framework::from(&mesh), &tol)?;
            emit([
                format!("rows           {}", r.edge_rows),
                format!("columns        {}", r.dof_cols),
                format!("rank           {}", r.rank),
                format!("required_rank  {}", r.required_rank),
                format!("rigid          {}", r.rigid),
            ])
        }
        Command::Export {
            input,
            format,
            lattice,
            out,
        } => {
            let mesh = input.load()?;
            match format {
                Format::Obj => io::export_obj(&mesh, &out)?,
                Format::Json => io::export_schedule(&mesh, &out, &tol)?,
                Format::Csv => {
                    io::export_csv(&AnalysisReport::compute(&mesh, lattice.spec()?, &tol), &out)?
                }
            }
            emit([format!("wrote {}", out.display())])
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

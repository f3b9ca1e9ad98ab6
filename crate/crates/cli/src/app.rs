//! Argument handling and the top-level run loop.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser};

use crate::input::{parse_list, parse_repeated, read_file, InputError};
use crate::mesh::{write_mesh, Mesh, MeshFormat};
use crate::pipeline::{run_pipeline, Artifact, ExitKind, Mode, PipelineOptions};
use crate::report::{residual_csv, write_report, SolveReport};

/// Build a closed convex polyhedron whose face areas are the given numbers.
#[derive(Debug, Parser)]
#[command(name = "facetarea", version)]
#[command(group(ArgGroup::new("source").required(true).args(["areas", "area", "input"])))]
pub struct Cli {
    /// Comma-separated areas, e.g. `9,6,5,4,3,2,1,1`.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub areas: Option<String>,
    /// A single area; repeat for more.
    #[arg(long, value_name = "AREA", allow_hyphen_values = true)]
    pub area: Vec<String>,
    /// File with one area per line (`#` comments) or a JSON array.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// How the planar polygon is lifted into space.
    #[arg(long, value_enum, default_value_t = Mode::HalfFold)]
    pub mode: Mode,
    /// Number of edges folded in half-fold mode [default: n/2].
    #[arg(long)]
    pub k: Option<usize>,
    /// Seed for balanced mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative area tolerance of the solver.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_area: f64,
    /// Relative tolerance for treating the largest area as equal to the rest.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_eq: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Mesh output path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Mesh format [default: from the --out extension, else off].
    #[arg(long, value_enum)]
    pub format: Option<MeshFormat>,
    /// JSON report path.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// CSV of the solver's max relative area error per iteration.
    #[arg(long, value_name = "PATH")]
    pub residual_csv: Option<PathBuf>,
    /// Also write a zero-volume mesh for flat inputs.
    #[arg(long)]
    pub allow_degenerate_mesh: bool,
}

impl Cli {
    fn raw_areas(&self) -> Result<Vec<f64>, InputError> {
        if let Some(list) = &self.areas {
            parse_list("--areas", list).map_err(InputError::Parse)
        } else if let Some(path) = &self.input {
            read_file(path)
        } else {
            parse_repeated("--area", &self.area).map_err(InputError::Parse)
        }
    }

    fn options(&self) -> Result<PipelineOptions, String> {
        if !(self.tol_area > 0.0) {
            return Err(format!("--tol-area must be positive, got {}", self.tol_area));
        }
        if !(self.tol_eq >= 0.0) {
            return Err(format!("--tol-eq must be non-negative, got {}", self.tol_eq));
        }
        if self.max_iter == 0 {
            return Err("--max-iter must be at least 1".into());
        }
        Ok(PipelineOptions {
            mode: self.mode,
            k: self.k,
            seed: self.seed,
            tol_area: self.tol_area,
            tol_eq: self.tol_eq,
            max_iter: self.max_iter,
        })
    }

    fn mesh_format(&self) -> MeshFormat {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")) => MeshFormat::Obj,
            _ => MeshFormat::Off,
        })
    }
}

fn write_extras(cli: &Cli, report: Option<&SolveReport>, history: &[f64]) -> Result<(), String> {
    if let (Some(path), Some(report)) = (&cli.report, report) {
        write_report(report, path)?;
    }
    if let Some(path) = &cli.residual_csv {
        std::fs::write(path, residual_csv(history)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

/// Runs the command line; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitKind::Usage } else { ExitKind::Success };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code.code();
        }
    };
    let raw = match cli.raw_areas() {
        Ok(raw) => raw,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                InputError::Parse(_) => ExitKind::Usage,
                InputError::Io(_) => ExitKind::Io,
            }
            .code();
        }
    };
    let opts = match cli.options() {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return ExitKind::Usage.code();
        }
    };

    let outcome = match run_pipeline(&raw, &opts) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            if let Err(io) = write_extras(&cli, e.report.as_deref(), &e.history) {
                let _ = writeln!(err, "error: {io}");
                return ExitKind::Io.code();
            }
            return e.kind.code();
        }
    };

    let report = &outcome.report;
    let c = &report.classification;
    let _ = writeln!(out, "classification: {} (slack {})", c.tag, c.slack);
    let written = match &outcome.artifact {
        Artifact::Solid { poly, history } => {
            let radius = report.radius.unwrap_or(f64::NAN);
            let branch = report.branch.as_deref().unwrap_or("?");
            let _ = writeln!(out, "radius: {radius:.16e} (center {branch})");
            if let Some(lift) = &report.lift {
                match (lift.k, lift.seed) {
                    (Some(k), _) => writeln!(out, "lift: {} k={k}", lift.mode),
                    (_, Some(seed)) => writeln!(out, "lift: {} seed={seed}", lift.mode),
                    _ => writeln!(out, "lift: {}", lift.mode),
                }
                .ok();
            }
            if let Some(s) = &report.solver {
                let _ = writeln!(
                    out,
                    "solver: {} iterations, max relative area error {:e}",
                    s.iterations, s.residual
                );
            }
            let _ = writeln!(out, "faces: {}, vertices: {}", poly.present_facets(), poly.vertices.len());
            let mesh = cli
                .out
                .as_ref()
                .map(|path| write_mesh(&Mesh::from_polyhedron(poly), cli.mesh_format(), path).map(|_| path));
            mesh.transpose().and_then(|p| write_extras(&cli, Some(report), history).map(|_| p))
        }
        Artifact::Flat(flat) => {
            let _ = writeln!(
                out,
                "flat: square of side {:.16e}, strip widths {:?}",
                flat.side, flat.strip_widths
            );
            let mesh = match &cli.out {
                Some(path) if cli.allow_degenerate_mesh => {
                    Some(write_mesh(&Mesh::from_flat(flat), cli.mesh_format(), path).map(|_| path))
                }
                Some(_) => {
                    let _ = writeln!(err, "note: flat input, no mesh written (use --allow-degenerate-mesh)");
                    None
                }
                None => None,
            };
            mesh.transpose().and_then(|p| write_extras(&cli, Some(report), &[]).map(|_| p))
        }
    };
    match written {
        Ok(Some(path)) => {
            let _ = writeln!(out, "mesh: {}", path.display());
            ExitKind::Success.code()
        }
        Ok(None) => ExitKind::Success.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitKind::Io.code()
        }
    }
}

//! Command-line front end for [`facetarea`]: reads areas, runs the pipeline and
//! writes meshes and reports.

pub mod app;
pub mod input;
pub mod mesh;
pub mod pipeline;
pub mod report;

pub use app::{run, Cli};
pub use input::{parse_list, parse_text, ParseError};
pub use mesh::{read_obj, read_off, write_mesh, Mesh, MeshFormat};
pub use pipeline::{run_pipeline, Artifact, ExitKind, Mode, Outcome, PipelineError, PipelineOptions};
pub use report::{residual_csv, write_report, SolveReport};

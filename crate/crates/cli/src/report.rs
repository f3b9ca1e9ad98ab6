//! The JSON solve report.
//!
//! Keys appear in declaration order and every float is written with 17
//! significant digits, so equal runs give byte-identical reports apart from
//! `timing`.

use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub input: InputEcho,
    pub classification: ClassificationEcho,
    pub radius: Option<f64>,
    pub branch: Option<String>,
    pub lift: Option<LiftEcho>,
    pub solver: Option<SolverEcho>,
    pub verification: Option<VerificationEcho>,
    pub flat: Option<FlatEcho>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputEcho {
    /// Areas in the order given.
    pub areas: Vec<f64>,
    /// Areas sorted descending; mesh faces follow this order.
    pub sorted: Vec<f64>,
    /// `sorted[i] = areas[permutation[i]]`.
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationEcho {
    pub tag: String,
    pub slack: f64,
    pub tol_eq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftEcho {
    pub mode: String,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub attempts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverEcho {
    pub tol_area: f64,
    pub max_iter: usize,
    pub iterations: usize,
    pub fallback_iterations: usize,
    pub residual: f64,
    pub support: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationEcho {
    pub passed: bool,
    pub max_error: f64,
    pub face_errors: Vec<f64>,
    pub closure_norm: f64,
    pub max_violation: f64,
    pub euler_characteristic: i64,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatEcho {
    pub side: f64,
    pub strip_widths: Vec<f64>,
    pub top_face_area: f64,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timing {
    pub radius: f64,
    pub lift: f64,
    pub solve: f64,
    pub verify: f64,
    pub total: f64,
}

/// Pretty JSON with floats printed as `{:.16e}`.
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
        self.serialize(&mut ser).expect("report serialization cannot fail");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

pub fn write_report(report: &SolveReport, path: &Path) -> Result<(), String> {
    std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))
}

/// `iteration,max_relative_error` rows, starting with the initial guess.
pub fn residual_csv(history: &[f64]) -> String {
    let mut s = String::from("iteration,max_relative_error\n");
    for (i, r) in history.iter().enumerate() {
        s.push_str(&format!("{i},{r:.16e}\n"));
    }
    s
}

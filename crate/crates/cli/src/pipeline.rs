//! Areas in, polyhedron (or flat description) and report out.

use std::time::Instant;

use facetarea::cyclic::DEFAULT_RADIUS_TOL;
use facetarea::{
    balanced_spins, classify, construct_flat, half_fold, layout_polygon, make_area_spec, solve_minkowski, solve_radius,
    verify_solution, Branch, Error, FlatPolyhedron, LiftMode, Polyhedron, SolveOptions, Tag, DEFAULT_TOL_EQ,
};

use crate::report::{
    ClassificationEcho, FlatEcho, InputEcho, LiftEcho, SolveReport, SolverEcho, Timing, VerificationEcho, SCHEMA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    HalfFold,
    Balanced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub mode: Mode,
    /// Fold index; `None` means `n / 2`.
    pub k: Option<usize>,
    pub seed: u64,
    pub tol_area: f64,
    pub tol_eq: f64,
    pub max_iter: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode: Mode::HalfFold,
            k: None,
            seed: 0,
            tol_area: 1e-7,
            tol_eq: DEFAULT_TOL_EQ,
            max_iter: 200,
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Success = 0,
    Usage = 1,
    Infeasible = 2,
    Numerical = 3,
    Io = 4,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Solid { poly: Polyhedron, history: Vec<f64> },
    Flat(FlatPolyhedron),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: SolveReport,
    pub artifact: Artifact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub kind: ExitKind,
    pub message: String,
    /// As much of the report as was filled in before the failure.
    pub report: Option<Box<SolveReport>>,
    /// Solver residual history, when the failure came from the solver.
    pub history: Vec<f64>,
}

impl PipelineError {
    fn new(kind: ExitKind, message: String, report: Option<&SolveReport>) -> Self {
        PipelineError {
            kind,
            message,
            report: report.map(|r| Box::new(r.clone())),
            history: Vec::new(),
        }
    }

    fn from_core(e: Error, report: Option<&SolveReport>) -> Self {
        let kind = match e {
            Error::EmptyInput
            | Error::NonPositiveArea { .. }
            | Error::NonFiniteArea { .. }
            | Error::UnsupportedCount { .. }
            | Error::BadK { .. } => ExitKind::Usage,
            _ => ExitKind::Numerical,
        };
        let mut err = PipelineError::new(kind, e.to_string(), report);
        if let Error::NoConvergence { history, .. } | Error::FacetCollapse { history, .. } = e {
            err.history = history;
        }
        err
    }
}

fn tag_name(tag: Tag) -> &'static str {
    match tag {
        Tag::Infeasible => "Infeasible",
        Tag::Flat => "Flat",
        Tag::Solid => "Solid",
        Tag::TriangleOnly => "TriangleOnly",
        Tag::TwoFaceFlat => "TwoFaceFlat",
    }
}

fn seconds_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

pub fn run_pipeline(raw: &[f64], opts: &PipelineOptions) -> Result<Outcome, PipelineError> {
    let start = Instant::now();
    let spec = make_area_spec(raw).map_err(|e| PipelineError::from_core(e, None))?;
    let class = classify(&spec, opts.tol_eq).map_err(|e| PipelineError::from_core(e, None))?;
    let mut report = SolveReport {
        schema: SCHEMA,
        input: InputEcho {
            areas: raw.to_vec(),
            sorted: spec.areas().to_vec(),
            permutation: spec.permutation().to_vec(),
        },
        classification: ClassificationEcho {
            tag: tag_name(class.tag).into(),
            slack: class.slack,
            tol_eq: opts.tol_eq,
        },
        radius: None,
        branch: None,
        lift: None,
        solver: None,
        verification: None,
        flat: None,
        timing: Timing::default(),
    };
    let areas = spec.areas();

    match class.tag {
        Tag::Infeasible => {
            let message = if spec.n() == 2 {
                format!("infeasible: two faces must have equal areas (slack {})", class.slack)
            } else {
                format!(
                    "infeasible: largest area {} exceeds the sum of the others {} (slack {})",
                    areas[0],
                    areas[1..].iter().sum::<f64>(),
                    class.slack
                )
            };
            report.timing.total = seconds_since(start);
            return Err(PipelineError::new(ExitKind::Infeasible, message, Some(&report)));
        }
        Tag::TriangleOnly => {
            let message = format!(
                "no closed convex polyhedron has exactly three faces; {}, {}, {} are the side lengths of a triangle \
                 (slack {})",
                areas[0], areas[1], areas[2], class.slack
            );
            report.timing.total = seconds_since(start);
            return Err(PipelineError::new(ExitKind::Infeasible, message, Some(&report)));
        }
        Tag::Flat | Tag::TwoFaceFlat => {
            let flat = construct_flat(&spec, opts.tol_eq).map_err(|e| PipelineError::from_core(e, Some(&report)))?;
            report.flat = Some(FlatEcho {
                side: flat.side,
                strip_widths: flat.strip_widths.clone(),
                top_face_area: flat.top_face_area,
            });
            report.timing.total = seconds_since(start);
            return Ok(Outcome {
                report,
                artifact: Artifact::Flat(flat),
            });
        }
        Tag::Solid => {}
    }

    let t = Instant::now();
    let (radius, branch) =
        solve_radius(&spec, DEFAULT_RADIUS_TOL).map_err(|e| PipelineError::from_core(e, Some(&report)))?;
    let polygon = layout_polygon(&spec, radius, branch).map_err(|e| PipelineError::from_core(e, Some(&report)))?;
    report.radius = Some(radius);
    report.branch = Some(
        match branch {
            Branch::Inside => "inside",
            Branch::Outside => "outside",
        }
        .into(),
    );
    report.timing.radius = seconds_since(t);

    let t = Instant::now();
    let lifted = match opts.mode {
        Mode::HalfFold => {
            let k = opts.k.unwrap_or(spec.n() / 2);
            report.lift = Some(LiftEcho {
                mode: "half-fold".into(),
                k: Some(k),
                seed: None,
                attempts: None,
            });
            half_fold(&polygon, k)
        }
        Mode::Balanced => {
            report.lift = Some(LiftEcho {
                mode: "balanced".into(),
                k: None,
                seed: Some(opts.seed),
                attempts: None,
            });
            balanced_spins(&polygon, opts.seed)
        }
    };
    let sys = lifted.map_err(|e| PipelineError::from_core(e, Some(&report)))?;
    if let (LiftMode::BalancedSpins { attempts, .. }, Some(lift)) = (sys.mode, report.lift.as_mut()) {
        lift.attempts = Some(attempts);
    }
    report.timing.lift = seconds_since(t);

    let t = Instant::now();
    let solve_opts = SolveOptions {
        tol_area: opts.tol_area,
        max_iter: opts.max_iter,
        ..SolveOptions::default()
    };
    let sol = solve_minkowski(&sys, &solve_opts).map_err(|e| PipelineError::from_core(e, Some(&report)))?;
    report.solver = Some(SolverEcho {
        tol_area: opts.tol_area,
        max_iter: opts.max_iter,
        iterations: sol.iterations,
        fallback_iterations: sol.fallback_iterations,
        residual: sol.residual,
        support: sol.support.clone(),
    });
    report.timing.solve = seconds_since(t);

    let t = Instant::now();
    let check = verify_solution(&sol, &sys, opts.tol_area);
    report.verification = Some(VerificationEcho {
        passed: check.passed(),
        max_error: check.max_error,
        face_errors: check.face_errors.clone(),
        closure_norm: check.closure_norm,
        max_violation: check.max_violation,
        euler_characteristic: check.euler_characteristic,
        closed: check.closed,
    });
    report.timing.verify = seconds_since(t);
    report.timing.total = seconds_since(start);
    if !check.passed() {
        let mut err = PipelineError::new(
            ExitKind::Numerical,
            format!("solution failed verification (max relative area error {:e})", check.max_error),
            Some(&report),
        );
        err.history = sol.history;
        return Err(err);
    }
    Ok(Outcome {
        report,
        artifact: Artifact::Solid {
            poly: sol.poly,
            history: sol.history,
        },
    })
}

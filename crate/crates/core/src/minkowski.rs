//! Discrete Minkowski problem: support numbers `h` such that `P(h)` has
//! prescribed facet areas for prescribed normals.
//!
//! The main loop is a damped Newton iteration on `r(h) = A(h) - A_target`
//! using the area Jacobian. The Jacobian is singular along translations
//! (`h -> h + N t`), so each step is projected onto the orthogonal complement
//! of the span of the normal coordinate columns. When Newton stalls, descent on
//! `Phi(h) = sum_i a_i h_i / V(h)^(1/3)` takes over for a while; `V^(1/3)` is
//! concave in `h`, so `Phi` has no spurious stationary points and its
//! minimizers have areas proportional to the targets.

use nalgebra::{DMatrix, DVector};

use crate::geometry::{intersect_halfspaces, Polyhedron};
use crate::lift::{validate_system, EquilibratedSystem};
use crate::{Error, Result, Vec3};

const MAX_CONSECUTIVE_REJECTIONS: usize = 20;
const COLLAPSE_TOL: f64 = 1e-12;
const FALLBACK_STEPS: usize = 25;
/// Facets whose share of the total area is below this fraction of their
/// target share trigger a restoration.
const RESTORE_SHARE: f64 = 1e-2;
/// The descent fallback returns control to Newton below this relative error.
const HANDBACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Target bound on `max_i |A_i(h) - a_i| / a_i`.
    pub tol_area: f64,
    pub max_iter: usize,
    /// Initial Newton step scale; halved on every rejected trial step.
    pub damping: f64,
    /// Starting support numbers. Defaults to all ones.
    pub initial_support: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_area: 1e-7,
            max_iter: 200,
            damping: 1.0,
            initial_support: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiSolution {
    pub support: Vec<f64>,
    /// `intersect_halfspaces(normals, support)`, recomputed after the last update.
    pub poly: Polyhedron,
    /// Max relative area error of `poly`.
    pub residual: f64,
    pub iterations: usize,
    /// Max relative area error after each iteration, starting with the initial guess.
    pub history: Vec<f64>,
    /// Iterations spent in the descent fallback.
    pub fallback_iterations: usize,
}

#[derive(Clone)]
struct State {
    h: Vec<f64>,
    poly: Polyhedron,
    r: DVector<f64>,
    norm: f64,
    max_rel: f64,
}

enum Rejection {
    Kernel,
    Collapse(usize),
    NoDecrease,
}

struct Problem<'a> {
    normals: &'a [Vec3],
    target: &'a [f64],
    total: f64,
    /// Orthonormal basis of the translation directions `(n_1 . e, ..., n_n . e)`.
    gauge: DMatrix<f64>,
}

impl<'a> Problem<'a> {
    fn new(normals: &'a [Vec3], target: &'a [f64]) -> Self {
        let n = normals.len();
        let t = DMatrix::from_fn(n, 3, |i, c| normals[i][c]);
        let gauge = t.qr().q();
        Problem {
            normals,
            target,
            total: target.iter().sum(),
            gauge,
        }
    }

    fn evaluate(&self, h: Vec<f64>) -> Result<State> {
        let poly = intersect_halfspaces(self.normals, &h)?;
        let r = DVector::from_iterator(
            h.len(),
            poly.facet_areas.iter().zip(self.target).map(|(a, t)| a - t),
        );
        let max_rel = r.iter().zip(self.target).map(|(d, t)| d.abs() / t).fold(0.0, f64::max);
        Ok(State {
            norm: r.norm(),
            h,
            poly,
            r,
            max_rel,
        })
    }

    fn project(&self, v: &mut DVector<f64>) {
        let coeff = self.gauge.tr_mul(v);
        *v -= &self.gauge * coeff;
    }

    /// Newton direction `J d = -r` restricted to the complement of translations.
    fn newton_direction(&self, state: &State) -> Result<DVector<f64>> {
        let jac = state.poly.area_jacobian()?;
        let weight = jac.amax().max(f64::MIN_POSITIVE);
        let regular = &jac + &self.gauge * self.gauge.transpose() * weight;
        let rhs = -&state.r;
        let mut d = match regular.clone().lu().solve(&rhs) {
            Some(d) if d.iter().all(|x| x.is_finite()) => d,
            _ => jac
                .svd(true, true)
                .solve(&rhs, 1e-12 * weight)
                .map_err(|_| Error::DegenerateCombinatorics { i: 0, j: 0, length: 0.0 })?,
        };
        self.project(&mut d);
        // no trial step may move a plane by more than the polytope's diameter
        let cap = state.poly.diameter();
        let longest = d.amax();
        if longest > cap {
            d *= cap / longest;
        }
        Ok(d)
    }

    /// Rescales `h` so that the total area matches; areas are quadratic in `h`.
    fn rescaled(&self, state: State) -> Result<State> {
        let sum: f64 = state.poly.facet_areas.iter().sum();
        let c = (self.total / sum).sqrt();
        self.evaluate(state.h.iter().map(|x| x * c).collect())
    }

    /// Translates so the vertex centroid is at the origin.
    fn recentered(&self, state: State) -> Result<State> {
        let c = state.poly.vertex_centroid();
        let h = state.h.iter().zip(self.normals).map(|(h, n)| h - n.dot(&c)).collect();
        self.evaluate(h)
    }

    fn check_trial(&self, current: &State, trial: Result<State>) -> std::result::Result<State, Rejection> {
        let trial = trial.map_err(|_| Rejection::Kernel)?;
        let floor = COLLAPSE_TOL * self.total;
        for (i, (&a, &before)) in trial.poly.facet_areas.iter().zip(&current.poly.facet_areas).enumerate() {
            if a < floor && before >= floor {
                return Err(Rejection::Collapse(i));
            }
        }
        if trial.norm >= current.norm {
            return Err(Rejection::NoDecrease);
        }
        Ok(trial)
    }

    /// Brings back facets that are missing or negligible by offsetting every
    /// plane outward by the same amount, `h -> h + c`. As `c` grows the shape
    /// approaches `P(1)`, which touches its inscribed unit ball on every facet.
    fn restore_facets(&self, state: State) -> Result<State> {
        let healthy = |s: &State| {
            let sum: f64 = s.poly.facet_areas.iter().sum();
            s.poly
                .facet_areas
                .iter()
                .zip(self.target)
                .all(|(a, t)| a / sum >= RESTORE_SHARE * t / self.total)
        };
        if healthy(&state) {
            return Ok(state);
        }
        let mean = state.h.iter().map(|x| x.abs()).sum::<f64>() / state.h.len() as f64;
        let mut c = 0.1 * mean;
        for _ in 0..64 {
            let trial = self.evaluate(state.h.iter().map(|h| h + c).collect())?;
            if healthy(&trial) {
                return self.recentered(self.rescaled(trial)?);
            }
            c *= 2.0;
        }
        Ok(state)
    }

    /// Solves `(P M P + w (I - P) + ridge I) d = g` with the smallest ridge
    /// that makes the matrix numerically positive definite.
    fn ridge_solve(projector: &DMatrix<f64>, m: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
        let n = g.len();
        let weight = m.amax().max(f64::MIN_POSITIVE);
        let system = projector * m * projector + (DMatrix::identity(n, n) - projector) * weight;
        let mut ridge = 1e-10 * weight;
        while ridge <= weight {
            let mut shifted = system.clone();
            for i in 0..n {
                shifted[(i, i)] += ridge;
            }
            if let Some(c) = shifted.cholesky() {
                return Some(c.solve(g));
            }
            ridge *= 100.0;
        }
        None
    }

    fn functional(&self, state: &State) -> f64 {
        let dot: f64 = state.h.iter().zip(self.target).map(|(h, a)| h * a).sum();
        dot / state.poly.volume.cbrt()
    }

    /// Descent on the scale-invariant functional `Phi`; returns the number of
    /// accepted steps.
    ///
    /// `Phi` is minimized by maximizing `log V` on the plane `a . h = const`.
    /// `log V` is concave, so the projected negative Hessian
    /// `P (A A^T / V^2 - J / V) P` is positive semidefinite; a small ridge makes
    /// it definite, which also gives missing facets (zero rows of `J`) a
    /// finite, inward-moving step.
    fn descend(&self, mut state: State, history: &mut Vec<f64>, budget: usize) -> Result<(State, usize)> {
        let n = self.normals.len();
        let a_unit = DVector::from_column_slice(self.target).normalize();
        let mut constrained = self.gauge.clone().insert_column(3, 0.0);
        constrained.set_column(3, &a_unit);
        let projector = DMatrix::identity(n, n) - &constrained * constrained.transpose();

        let mut steps = 0;
        while steps < budget {
            let v = state.poly.volume;
            let areas = DVector::from_column_slice(&state.poly.facet_areas);
            let grad = &projector * (&areas / v);
            if grad.amax() == 0.0 {
                break;
            }
            let cap = state.poly.diameter();
            let capped = |mut d: DVector<f64>| {
                if d.amax() > cap {
                    d *= cap / d.amax();
                }
                d
            };
            let newton = state.poly.area_jacobian().ok().and_then(|jac| {
                let neg_hess = (&areas * areas.transpose()) / (v * v) - jac / v;
                Self::ridge_solve(&projector, neg_hess, &grad)
            });
            let mut candidates = Vec::with_capacity(2);
            if let Some(d) = newton {
                candidates.push(capped(&projector * d));
            }
            // plain gradient when J is undefined or its step fails
            candidates.push(&grad * (cap / grad.amax()));

            let phi = self.functional(&state);
            let mut next = None;
            'search: for dir in candidates {
                let mut t = 1.0;
                for _ in 0..2 * MAX_CONSECUTIVE_REJECTIONS {
                    let h: Vec<f64> = state.h.iter().zip(dir.iter()).map(|(h, d)| h + t * d).collect();
                    if let Ok(trial) = self.evaluate(h) {
                        if self.functional(&trial) < phi {
                            next = Some(trial);
                            break 'search;
                        }
                    }
                    t *= 0.5;
                }
            }
            let Some(trial) = next else { break };
            state = self.recentered(self.rescaled(trial)?)?;
            steps += 1;
            history.push(state.max_rel);
            if state.max_rel < HANDBACK {
                break;
            }
        }
        Ok((state, steps))
    }
}

/// Finds `h` with `A_i(h) = sys.areas[i]` for the normals of `sys`.
///
/// The solution is unique up to translation; the returned one has the vertex
/// centroid at the origin, so every `h_i > 0`.
pub fn solve_minkowski(sys: &EquilibratedSystem, opts: &SolveOptions) -> Result<MinkowskiSolution> {
    let report = validate_system(sys);
    if !report.passed() {
        return Err(Error::NotEquilibrated(report.failures().join("; ")));
    }
    let n = sys.n();
    let problem = Problem::new(&sys.normals, &sys.areas);
    let h0 = opts.initial_support.clone().unwrap_or_else(|| vec![1.0; n]);
    if h0.len() != n {
        return Err(Error::LengthMismatch {
            normals: n,
            supports: h0.len(),
        });
    }
    let mut state = problem.restore_facets(problem.recentered(problem.rescaled(problem.evaluate(h0)?)?)?)?;
    let mut history = vec![state.max_rel];
    let mut iterations = 0;
    let mut fallback_iterations = 0;
    // well below tol_area; reaching it saves callers from conditioning losses
    let polish = (opts.tol_area * 1e-5).max(1e-14);
    let damping_floor = opts.damping * 0.5f64.powi(MAX_CONSECUTIVE_REJECTIONS as i32 - 1);

    while iterations < opts.max_iter && state.max_rel > polish {
        iterations += 1;
        let mut accepted = None;
        let mut last = Rejection::NoDecrease;
        // Newton cannot bring back a missing facet: its row of J is zero
        let missing = state.poly.facet_areas.iter().any(|&a| a < COLLAPSE_TOL * problem.total);
        if missing {
        } else if let Ok(dir) = problem.newton_direction(&state) {
            let mut t = opts.damping;
            while t >= damping_floor {
                let h: Vec<f64> = state.h.iter().zip(dir.iter()).map(|(h, d)| h + t * d).collect();
                match problem.check_trial(&state, problem.evaluate(h)) {
                    Ok(trial) => {
                        debug_assert!(trial.norm < state.norm);
                        accepted = Some(trial);
                        break;
                    }
                    Err(why) => last = why,
                }
                t *= 0.5;
            }
        }
        match accepted {
            Some(trial) => {
                let stalled = trial.norm > 0.5 * state.norm;
                state = problem.recentered(trial)?;
                history.push(state.max_rel);
                // at the noise floor further steps only shuffle rounding errors
                if stalled && state.max_rel <= opts.tol_area {
                    break;
                }
            }
            None if !missing && state.max_rel <= opts.tol_area => break,
            None => {
                let budget = FALLBACK_STEPS.min(opts.max_iter - iterations + 1);
                let state_restored = problem.restore_facets(state)?;
                let (next, steps) = problem.descend(state_restored, &mut history, budget)?;
                state = next;
                fallback_iterations += steps;
                iterations += steps.saturating_sub(1);
                if steps == 0 {
                    if let Rejection::Collapse(facet) = last {
                        return Err(Error::FacetCollapse { facet, history });
                    }
                    return Err(Error::NoConvergence {
                        iterations,
                        residual: state.max_rel,
                        history,
                    });
                }
            }
        }
    }

    // exact quadratic rescale, kept only if it does not hurt
    let rescaled = problem.recentered(problem.rescaled(state.clone())?)?;
    let state = if rescaled.max_rel <= state.max_rel { rescaled } else { state };
    if state.max_rel > opts.tol_area {
        return Err(Error::NoConvergence {
            iterations,
            residual: state.max_rel,
            history,
        });
    }
    Ok(MinkowskiSolution {
        support: state.h,
        poly: state.poly,
        residual: state.max_rel,
        iterations,
        history,
        fallback_iterations,
    })
}

/// Independent re-check of a solution against its system.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub tol_area: f64,
    /// `|A_i(h) - a_i| / a_i` per facet.
    pub face_errors: Vec<f64>,
    pub max_error: f64,
    /// `|sum_i A_i(h) n_i|` over measured areas.
    pub closure_norm: f64,
    pub total_area: f64,
    /// Largest halfspace violation over all vertices.
    pub max_violation: f64,
    pub violation_tol: f64,
    pub euler_characteristic: i64,
    pub closed: bool,
    /// Set when the polyhedron could not be rebuilt from the support numbers.
    pub kernel_error: Option<String>,
}

impl VerificationReport {
    pub fn areas_ok(&self) -> bool {
        self.max_error <= self.tol_area
    }

    pub fn closure_ok(&self) -> bool {
        self.closure_norm <= 1e-8 * self.total_area
    }

    pub fn convex_ok(&self) -> bool {
        self.max_violation <= self.violation_tol
    }

    pub fn euler_ok(&self) -> bool {
        self.euler_characteristic == 2 && self.closed
    }

    pub fn passed(&self) -> bool {
        self.kernel_error.is_none() && self.areas_ok() && self.closure_ok() && self.convex_ok() && self.euler_ok()
    }
}

/// Rebuilds `P(h)` from `sol.support` and compares it with the targets of `sys`.
pub fn verify_solution(sol: &MinkowskiSolution, sys: &EquilibratedSystem, tol_area: f64) -> VerificationReport {
    let total_area = sys.total_area();
    let scale = sol.support.iter().fold(0.0f64, |m, h| m.max(h.abs()));
    let violation_tol = crate::geometry::MEMBERSHIP_TOL * scale;
    match intersect_halfspaces(&sys.normals, &sol.support) {
        Ok(poly) => {
            let face_errors: Vec<f64> = poly
                .facet_areas
                .iter()
                .zip(&sys.areas)
                .map(|(a, t)| (a - t).abs() / t)
                .collect();
            VerificationReport {
                tol_area,
                max_error: face_errors.iter().copied().fold(0.0, f64::max),
                face_errors,
                closure_norm: poly.area_vector_sum().norm(),
                total_area,
                max_violation: poly.max_violation(),
                violation_tol,
                euler_characteristic: poly.euler_characteristic(),
                closed: poly.is_closed(),
                kernel_error: None,
            }
        }
        Err(e) => VerificationReport {
            tol_area,
            face_errors: vec![f64::INFINITY; sys.n()],
            max_error: f64::INFINITY,
            closure_norm: f64::INFINITY,
            total_area,
            max_violation: f64::INFINITY,
            violation_tol,
            euler_characteristic: 0,
            closed: false,
            kernel_error: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{layout_polygon, solve_radius, DEFAULT_RADIUS_TOL};
    use crate::feasibility::make_area_spec;
    use crate::lift::{half_fold, LiftMode};

    fn cube_system(area: f64) -> EquilibratedSystem {
        let normals = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
        EquilibratedSystem::from_vectors(normals.iter().map(|n| n * area).collect(), LiftMode::Explicit)
    }

    fn folded(areas: &[f64], k: usize) -> EquilibratedSystem {
        let s = make_area_spec(areas).unwrap();
        let (r, b) = solve_radius(&s, DEFAULT_RADIUS_TOL).unwrap();
        half_fold(&layout_polygon(&s, r, b).unwrap(), k).unwrap()
    }

    #[test]
    fn cube() {
        let sol = solve_minkowski(&cube_system(1.0), &SolveOptions::default()).unwrap();
        assert!(sol.residual <= 1e-12, "{}", sol.residual);
        for h in &sol.support {
            assert!((h - 0.5).abs() < 1e-12);
        }
        let report = verify_solution(&sol, &cube_system(1.0), 1e-12);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn folded_square_gives_unit_tetrahedron() {
        let sys = folded(&[1.0; 4], 2);
        let sol = solve_minkowski(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(sol.poly.vertices.len(), 4);
        let (areas, _) = crate::geometry::measure(&sol.poly).unwrap();
        for a in areas {
            assert!((a - 1.0).abs() <= 1e-7);
        }
        assert!(sol.support.iter().all(|&h| h > 0.0));
        assert!(verify_solution(&sol, &sys, 1e-7).passed());
    }

    #[test]
    fn perturbed_support_fails_verification() {
        let sys = folded(&[9.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0, 1.0], 4);
        let mut sol = solve_minkowski(&sys, &SolveOptions::default()).unwrap();
        assert!(verify_solution(&sol, &sys, 1e-7).passed());
        for h in sol.support.iter_mut() {
            *h *= 1.01;
        }
        let report = verify_solution(&sol, &sys, 1e-7);
        assert!(!report.passed());
        assert!(!report.areas_ok());
        assert!(report.face_errors.iter().all(|&e| e > 1e-3));
    }

    #[test]
    fn rejects_planar_system() {
        let normals = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y()];
        let sys = EquilibratedSystem::from_vectors(normals.to_vec(), LiftMode::Explicit);
        assert!(matches!(
            solve_minkowski(&sys, &SolveOptions::default()),
            Err(Error::NotEquilibrated(_))
        ));
    }

    #[test]
    fn history_is_recorded() {
        let sys = folded(&[5.0, 4.0, 3.0, 3.0, 2.0], 2);
        let sol = solve_minkowski(&sys, &SolveOptions::default()).unwrap();
        assert!(sol.history.len() >= 2);
        assert!(sol.history[0] > sol.residual);
        assert!(sol.residual <= 1e-7);
    }
}

//! Scenario orchestrators: bind the profile, operator, spectral, and
//! cochain engines into reproducible experiment reports with explicit
//! targets, residuals, and error estimates.

use crate::deformation::{DeformationProfile, ProfileKind};
use crate::findim_torsion::{discrete_witten, mv_complex, DiscreteGeometry};
use crate::operator1d::{BoundarySpec, DegreeBoundaryMap, DiscreteOperator};
use crate::spectral::{eigenvalues, richardson};
use crate::torsion_zeta::{
    analytic_torsion_1d, deformed_partner_logdet_oriented, kernel_diagonal, model_pair,
    profile_exp_integral, truncated_heat_trace, zeta_tilde_prime0, Geometry1d, ZetaTildeConfig,
    ZetaTildeVariant, COUPLING_CAP,
};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// One scenario parameter: numeric or symbolic.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    Text(String),
}

impl ParamValue {
    fn csv(&self) -> String {
        match self {
            ParamValue::Num(x) => {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    format!("{}", *x as i64)
                } else {
                    sig12(*x)
                }
            }
            ParamValue::Text(s) => s.clone(),
        }
    }
}

fn num(x: f64) -> ParamValue {
    ParamValue::Num(x)
}

fn text(s: &str) -> ParamValue {
    ParamValue::Text(s.to_string())
}

/// 12 significant digits, "." decimal, platform-stable.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub parameters: Vec<(String, ParamValue)>,
    pub measured: f64,
    pub target: f64,
    /// Always measured - target.
    pub residual: f64,
    pub error_estimate: f64,
    pub pass: bool,
    /// Flags (coupling cap engaged, Richardson fallback, ...).
    pub note: String,
}

fn row(
    parameters: Vec<(String, ParamValue)>,
    measured: f64,
    target: f64,
    error_estimate: f64,
    tolerance: f64,
) -> ReportRow {
    let residual = measured - target;
    ReportRow {
        parameters,
        measured,
        target,
        residual,
        error_estimate,
        pass: residual.abs() <= tolerance,
        note: String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    fn from_rows(scenario: &str, rows: Vec<ReportRow>) -> Self {
        let verdict = if rows.iter().all(|r| r.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ExperimentReport {
            scenario: scenario.to_string(),
            rows,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// CSV rendering: scenario, param names..., measured, target, residual,
    /// error_estimate. All rows of a report share one parameter schema.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self
            .rows
            .first()
            .map(|r| r.parameters.iter().map(|(n, _)| n.as_str()).collect())
            .unwrap_or_default();
        out.push_str("scenario");
        for n in &names {
            let _ = write!(out, ",{n}");
        }
        out.push_str(",measured,target,residual,error_estimate\n");
        for r in &self.rows {
            out.push_str(&self.scenario);
            for (_, v) in &r.parameters {
                let _ = write!(out, ",{}", v.csv());
            }
            let _ = write!(
                out,
                ",{},{},{},{}\n",
                sig12(r.measured),
                sig12(r.target),
                sig12(r.residual),
                sig12(r.error_estimate)
            );
        }
        out
    }
}

/// Write `<dir>/<scenario>.csv` and `.json`; returns the two paths.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.scenario));
    let json_path = dir.join(format!("{}.json", report.scenario));
    std::fs::write(&csv_path, report.to_csv())?;
    std::fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    Ok((csv_path, json_path))
}

/// Fiber data entering only through its spectrum, Euler characteristic,
/// and the flat-bundle rank.
#[derive(Debug, Clone, Serialize)]
pub struct YModel {
    /// Per degree, eigenvalues with multiplicities for a single bundle copy
    /// (1/length^2 units).
    pub eigenvalues_per_degree: Vec<Vec<f64>>,
    pub euler_characteristic: i64,
    pub rank: usize,
}

impl YModel {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        let chi: i64 = self
            .eigenvalues_per_degree
            .iter()
            .enumerate()
            .map(|(k, evs)| {
                let kernel = evs.iter().filter(|&&l| l.abs() <= 1e-12).count() as i64;
                if k % 2 == 0 {
                    kernel
                } else {
                    -kernel
                }
            })
            .sum();
        if chi != self.euler_characteristic {
            return Err(Error::InvalidInput(format!(
                "Euler characteristic {} does not match supplied kernels (alternating sum {chi})",
                self.euler_characteristic
            )));
        }
        Ok(())
    }

    /// Circle fiber of circumference `l`: spectrum {(2 pi k / l)^2} with
    /// multiplicity 2 (plus the constant) in both degrees.
    pub fn circle(l: f64, modes: usize, rank: usize) -> Self {
        let mut evs = vec![0.0];
        for k in 1..=modes {
            let l2 = (2.0 * PI * k as f64 / l).powi(2);
            evs.push(l2);
            evs.push(l2);
        }
        YModel {
            eigenvalues_per_degree: vec![evs.clone(), evs],
            euler_characteristic: 0,
            rank,
        }
    }

    /// Two-point fiber: two zero modes in degree 0, nothing in degree 1.
    pub fn two_points(rank: usize) -> Self {
        YModel {
            eigenvalues_per_degree: vec![vec![0.0, 0.0], vec![]],
            euler_characteristic: 2,
            rank,
        }
    }

    fn trace(&self, degree: usize, t: f64) -> f64 {
        self.eigenvalues_per_degree
            .get(degree)
            .map(|evs| evs.iter().map(|&l| (-t * l).exp()).sum::<f64>())
            .unwrap_or(0.0)
            * self.rank as f64
    }

    /// Tr_s e^{-t Delta_Y} (rank-weighted).
    fn supertrace(&self, t: f64) -> f64 {
        (0..self.eigenvalues_per_degree.len())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * self.trace(k, t))
            .sum()
    }

    /// Tr_s (N^Y e^{-t Delta_Y}).
    fn number_supertrace(&self, t: f64) -> f64 {
        (0..self.eigenvalues_per_degree.len())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * k as f64 * self.trace(k, t)
            })
            .sum()
    }
}

/// Default heat-time grid: log-spaced 1e-2 ... 10, 60 points.
pub fn default_t_grid() -> Vec<f64> {
    let m = 60;
    let (lo, hi) = (1e-2f64.ln(), 10f64.ln());
    (0..m)
        .map(|i| (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp())
        .collect()
}

/// Default Richardson grid ladder.
pub const DEFAULT_GRIDS: [usize; 3] = [1000, 2000, 4000];

const CIRCLE_LEN: f64 = 8.0;
const CIRCLE_ORIGIN: f64 = -2.0;

/// Periodic potential evaluation with wrap-around (the glued circle's
/// coordinate chart is [-2, 6]).
fn circle_potential(profile: &DeformationProfile, degree: usize) -> impl Fn(f64) -> f64 + '_ {
    move |s: f64| {
        let x = CIRCLE_ORIGIN + (s - CIRCLE_ORIGIN).rem_euclid(CIRCLE_LEN);
        let (_, fp, fpp) = profile.eval(x).expect("wrapped in-domain");
        let sign = if degree == 0 { -1.0 } else { 1.0 };
        fp * fp + sign * fpp
    }
}

/// Richardson over an eigenvalue triple; falls back gracefully when the
/// values sit at rounding scale (the circle's exact zero mode).
fn richardson_eig(vals: [f64; 3]) -> (f64, f64, bool) {
    let spread = (vals[2] - vals[1]).abs().max((vals[1] - vals[0]).abs());
    if vals.iter().all(|v| v.abs() < 1e-9) {
        return (vals[2], spread.max(1e-12), true);
    }
    match richardson(vals) {
        Ok((v, e)) => (v, e, true),
        Err(_) => (vals[2], spread, false),
    }
}

/// Glued-circle eigenvalue convergence to the split absolute/relative
/// spectrum. Rows: one per (T, k) with the Richardson eigenvalue and the
/// flat split target; one per T (k = 0) with the max error over k; one
/// summary row (T = 0, k = 0) with the decay exponent fitted against T.
/// Every (T, k) row also enforces the Dirichlet/Neumann domain-monotonicity
/// bracket from the cut-at-the-collars comparison operators.
pub fn run_eigencon(t_list: &[f64], k_max: usize, grids: [usize; 3]) -> Result<ExperimentReport> {
    if t_list.len() < 2 || k_max == 0 {
        return Err(Error::InvalidInput(
            "eigencon needs at least two strengths and k_max >= 1".into(),
        ));
    }
    // Flat split targets. The deformation is constant outside the two
    // length-2 collars, so the limit spectrum lives on the length-2
    // plateau pieces (the cut arcs minus their half-collars): Neumann
    // {0, (k pi/2)^2} merged with Dirichlet {(k pi/2)^2}.
    let mut targets = vec![0.0];
    let mut k = 1;
    while targets.len() < k_max + 2 {
        let l = (k as f64 * PI / 2.0).powi(2);
        targets.push(l);
        targets.push(l);
        k += 1;
    }
    targets.truncate(k_max);

    let per_t: Vec<Result<(f64, Vec<ReportRow>, f64, f64)>> = t_list
        .par_iter()
        .map(|&t_def| {
            let profile = DeformationProfile::with_default_width(t_def, ProfileKind::CirclePeriodic)?;
            let mut levels: Vec<Vec<f64>> = Vec::new();
            for &n in &grids {
                let (d0, _) =
                    DiscreteOperator::assemble_witten_pair(&profile, n, DegreeBoundaryMap::ABSOLUTE)?;
                levels.push(eigenvalues(&d0, k_max)?.eigenvalues);
            }
            // Bracketing operators: the circle cut at the collar centers
            // s = 0 and s = 4, all-Dirichlet above, all-Neumann below.
            let nn = grids[2];
            let v0 = circle_potential(&profile, 0);
            let mut dirich = Vec::new();
            let mut neum = Vec::new();
            for (a, b) in [(0.0, 4.0), (4.0, 8.0)] {
                let d = DiscreteOperator::assemble_interval(a, b, nn / 2, &v0, BoundarySpec::DIRICHLET)?;
                let nop = DiscreteOperator::assemble_interval(a, b, nn / 2, &v0, BoundarySpec::NEUMANN)?;
                dirich.extend(eigenvalues(&d, k_max)?.eigenvalues);
                neum.extend(eigenvalues(&nop, k_max)?.eigenvalues);
            }
            dirich.sort_by(|a, b| a.partial_cmp(b).unwrap());
            neum.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let h2 = (CIRCLE_LEN / nn as f64).powi(2);

            let mut rows = Vec::new();
            let mut max_err = 0.0f64;
            let mut max_est = 0.0f64;
            for j in 0..k_max {
                let triple = [levels[0][j], levels[1][j], levels[2][j]];
                let (lam, est, converged) = richardson_eig(triple);
                let fine = levels[2][j];
                let slack = 1e-8 + 20.0 * h2 * (1.0 + fine.abs());
                let bracket_ok = fine <= dirich[j] + slack && fine >= neum[j] - slack;
                let mut r = row(
                    vec![("T".into(), num(t_def)), ("k".into(), num((j + 1) as f64))],
                    lam,
                    targets[j],
                    est,
                    f64::INFINITY,
                );
                r.pass = bracket_ok;
                if !converged {
                    r.note.push_str("richardson-fallback;");
                }
                if !bracket_ok {
                    r.note.push_str("bracket-violated;");
                }
                max_err = max_err.max((lam - targets[j]).abs());
                max_est = max_est.max(est);
                rows.push(r);
            }
            Ok((t_def, rows, max_err, max_est))
        })
        .collect();

    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for r in per_t {
        let (t_def, mut rs, max_err, max_est) = r?;
        rows.append(&mut rs);
        maxima.push((t_def, max_err, max_est));
    }
    maxima.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let lam_top = targets[k_max - 1];
    for (i, &(t_def, max_err, max_est)) in maxima.iter().enumerate() {
        let mut r = row(
            vec![("T".into(), num(t_def)), ("k".into(), num(0.0))],
            max_err,
            0.0,
            max_est,
            f64::INFINITY,
        );
        let monotone = i == 0 || max_err <= maxima[i - 1].1;
        let last_ok = i + 1 < maxima.len() || max_err <= 0.05 * (1.0 + lam_top);
        r.pass = monotone && last_ok;
        if !monotone {
            r.note.push_str("not-monotone;");
        }
        rows.push(r);
    }
    // Least-squares slope of log(max error) against log(T); the collar
    // width shrinks like 1/sqrt(T), so the expected exponent is -1/2.
    let pts: Vec<(f64, f64)> = maxima
        .iter()
        .filter(|&&(t, e, _)| t > 0.0 && e > 0.0)
        .map(|&(t, e, _)| (t.ln(), e.ln()))
        .collect();
    let slope = fit_slope(&pts);
    let mut r = row(
        vec![("T".into(), num(0.0)), ("k".into(), num(0.0))],
        slope,
        -0.5,
        0.0,
        f64::INFINITY,
    );
    r.pass = slope <= -0.4;
    r.note = "decay-exponent".into();
    rows.push(r);

    Ok(ExperimentReport::from_rows("eigencon", rows))
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2))
    });
    num / den
}

/// Heat supertraces that must vanish: the discrete vertex/edge complex
/// (supersymmetric pairing, exact) and the finite-difference model pair on
/// [-2, 2] with absolute/relative ends (h^2-small).
pub fn run_supertrace(strength_list: &[f64], t_grid: &[f64], n: usize) -> Result<ExperimentReport> {
    let per_strength: Vec<Result<Vec<ReportRow>>> = strength_list
        .par_iter()
        .map(|&t_def| {
            let mut rows = Vec::new();
            // Discrete engine: cycle (chi = 0) with spectra computed once.
            let profile = DeformationProfile::with_default_width(t_def, ProfileKind::CirclePeriodic)?;
            let cyc = discrete_witten(
                DiscreteGeometry::Cycle {
                    n: 160,
                    length: CIRCLE_LEN,
                    origin: CIRCLE_ORIGIN,
                },
                &profile,
                true,
            )?;
            let [s0, s1] = cyc.spectra()?;
            for &t in t_grid {
                let tr = |s: &[f64]| s.iter().map(|&l| (-t * l.max(0.0)).exp()).sum::<f64>();
                rows.push(row(
                    vec![
                        ("engine".into(), text("discrete")),
                        ("T".into(), num(t_def)),
                        ("t".into(), num(t)),
                    ],
                    tr(&s0) - tr(&s1),
                    0.0,
                    1e-12,
                    1e-10,
                ));
            }
            // Finite-difference engine: odd-profile model pair.
            let odd = DeformationProfile::with_default_width(t_def, ProfileKind::IntervalOdd)?;
            let (d0, d1) = model_pair(&odd, n)?;
            let h2 = (4.0 / n as f64).powi(2);
            for &t in t_grid {
                let sup = truncated_heat_trace(&d0, t)? - truncated_heat_trace(&d1, t)?;
                rows.push(row(
                    vec![
                        ("engine".into(), text("fd")),
                        ("T".into(), num(t_def)),
                        ("t".into(), num(t)),
                    ],
                    sup,
                    0.0,
                    h2 * (1.0 + t_def),
                    5.0 * h2 * (1.0 + t_def),
                ));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_strength {
        rows.append(&mut r?);
    }
    Ok(ExperimentReport::from_rows("supertrace", rows))
}

/// Deformed-circle torsion against the claimed metric drift -log2 - T, the
/// exact chain value -log alpha(T) (independent quadrature), and the
/// alpha(T) / 2e^T collar ratio.
pub fn run_circle_metric(t_list: &[f64], grids: [usize; 3]) -> Result<ExperimentReport> {
    let per_t: Vec<Result<Vec<ReportRow>>> = t_list
        .par_iter()
        .map(|&t_def| {
            let mut rows = Vec::new();
            let profile = DeformationProfile::with_default_width(t_def, ProfileKind::CirclePeriodic)?;
            let tv = analytic_torsion_1d(
                Geometry1d::Circle { length: CIRCLE_LEN },
                if t_def == 0.0 { None } else { Some(&profile) },
                grids,
            )?;
            let alpha = profile_exp_integral(&profile, 2.0)?;
            let target = if t_def == 0.0 {
                -3.0 * 2f64.ln()
            } else {
                -(2f64.ln()) - t_def
            };
            let tol = if t_def == 0.0 { 1e-5 } else { 0.05 };
            rows.push(row(
                vec![("T".into(), num(t_def)), ("check".into(), text("log_torsion"))],
                tv.log_torsion,
                target,
                1e-5 * (1.0 + t_def),
                tol,
            ));
            // Exact chain: log T(T) = -log alpha(T), alpha by quadrature.
            rows.push(row(
                vec![("T".into(), num(t_def)), ("check".into(), text("chain"))],
                tv.log_torsion + alpha.ln(),
                0.0,
                1e-5 * (1.0 + t_def),
                1e-3 * (1.0 + t_def),
            ));
            rows.push(row(
                vec![("T".into(), num(t_def)), ("check".into(), text("alpha_ratio"))],
                alpha / (2.0 * t_def.exp()),
                1.0,
                1e-9,
                0.02,
            ));
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_t {
        rows.append(&mut r?);
    }
    Ok(ExperimentReport::from_rows("circle-metric", rows))
}

/// Deformed-interval torsions (both orientations) against the claimed
/// drift -log2 - T/2, their mutual symmetry, and the exact chain value
/// -(1/2) log(2 alpha(T)).
pub fn run_interval_metric(t_list: &[f64]) -> Result<ExperimentReport> {
    let per_t: Vec<Result<Vec<ReportRow>>> = t_list
        .par_iter()
        .map(|&t_def| {
            let mut rows = Vec::new();
            let profile = DeformationProfile::with_default_width(t_def, ProfileKind::IntervalEven)?;
            let alpha = profile_exp_integral(&profile, 2.0)?;
            let target = if t_def == 0.0 {
                -1.5 * 2f64.ln()
            } else {
                -(2f64.ln()) - 0.5 * t_def
            };
            let tol = if t_def == 0.0 { 1e-5 } else { 0.05 };
            let mut values = [0.0; 2];
            for i in 0..2 {
                let ld = deformed_partner_logdet_oriented(&profile, i == 1)?;
                values[i] = -0.5 * ld.value;
                rows.push(row(
                    vec![
                        ("T".into(), num(t_def)),
                        ("i".into(), num((i + 1) as f64)),
                        ("check".into(), text("log_torsion")),
                    ],
                    values[i],
                    target,
                    1e-5 * (1.0 + t_def),
                    tol,
                ));
                rows.push(row(
                    vec![
                        ("T".into(), num(t_def)),
                        ("i".into(), num((i + 1) as f64)),
                        ("check".into(), text("chain")),
                    ],
                    values[i] + 0.5 * (2.0 * alpha).ln(),
                    0.0,
                    1e-5 * (1.0 + t_def),
                    1e-3 * (1.0 + t_def),
                ));
            }
            rows.push(row(
                vec![
                    ("T".into(), num(t_def)),
                    ("i".into(), num(0.0)),
                    ("check".into(), text("symmetry")),
                ],
                values[0] - values[1],
                0.0,
                1e-10,
                1e-8,
            ));
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_t {
        rows.append(&mut r?);
    }
    Ok(ExperimentReport::from_rows("interval-metric", rows))
}

/// Flat gluing formula on the circle of length `length`: for each cut l1,
/// LHS = log T(M) - log T_1 - log T_2 (determinant arithmetic) against
/// RHS = log T_MV + (1/2) chi(Y) rank log2 (chi(Y) = 2 cut points; T_MV
/// from the six-term complex's singular values).
pub fn run_gluing(length: f64, cuts: &[f64], rank_levels: &[usize]) -> Result<ExperimentReport> {
    let mut rows = Vec::new();
    let circle = analytic_torsion_1d(Geometry1d::Circle { length }, None, DEFAULT_GRIDS)?;
    for &l1 in cuts {
        let l2 = length - l1;
        let t1 = analytic_torsion_1d(
            Geometry1d::Interval {
                a: 0.0,
                b: l1,
                bc: DegreeBoundaryMap::ABSOLUTE,
            },
            None,
            DEFAULT_GRIDS,
        )?;
        let t2 = analytic_torsion_1d(
            Geometry1d::Interval {
                a: 0.0,
                b: l2,
                bc: DegreeBoundaryMap::RELATIVE,
            },
            None,
            DEFAULT_GRIDS,
        )?;
        let mv = mv_complex(length, l1)?.torsion()?;
        for &rank in rank_levels {
            let r = rank as f64;
            let lhs = r * (circle.log_torsion - t1.log_torsion - t2.log_torsion);
            let rhs = r * mv + r * 2f64.ln(); // (1/2) * chi(Y)=2 * rank * log2
            rows.push(row(
                vec![
                    ("l1".into(), num(l1)),
                    ("l2".into(), num(l2)),
                    ("rank".into(), num(r)),
                ],
                lhs,
                rhs,
                1e-9,
                1e-3,
            ));
        }
    }
    Ok(ExperimentReport::from_rows("gluing", rows))
}

/// Effective coupling strength T-tilde = t^{-7} T with the overflow cap.
fn effective_strength(t: f64, strength: f64) -> (f64, bool) {
    let raw = t.powi(-7) * strength;
    if raw > COUPLING_CAP {
        (COUPLING_CAP, true)
    } else {
        (raw, false)
    }
}

/// Trapezoid integral of nodal values on a uniform grid.
fn trapezoid(vals: &[f64], h: f64) -> f64 {
    if vals.len() < 2 {
        return 0.0;
    }
    let inner: f64 = vals[1..vals.len() - 1].iter().sum();
    h * (0.5 * (vals[0] + vals[vals.len() - 1]) + inner)
}

/// Gluing-region heat-kernel shadows over a (t, T) grid: the tube mass of
/// the one-form kernel on [-1, 1] (bounded by C t / sqrt(T-tilde)), the
/// plateau discrepancy against the flat Dirichlet barrier model on
/// [-2, -1], the "integrates to -1" identity of the supertrace on [1, 2],
/// and the coupled zeta continuation against the claimed drift log2 - T.
pub fn run_coupled_trace(
    strength_list: &[f64],
    t_grid: &[f64],
    n: usize,
) -> Result<ExperimentReport> {
    let combos: Vec<(f64, f64)> = strength_list
        .iter()
        .flat_map(|&s| t_grid.iter().map(move |&t| (s, t)))
        .collect();
    let per_combo: Vec<Result<Vec<ReportRow>>> = combos
        .par_iter()
        .map(|&(strength, t)| {
            let mut rows = Vec::new();
            let (eff, capped) = effective_strength(t, strength);
            let profile = DeformationProfile::with_default_width(eff, ProfileKind::IntervalOdd)?;
            let (d0, d1) = model_pair(&profile, n)?;
            let m = 81;
            let grid_on = |a: f64, b: f64| -> Vec<f64> {
                (0..m)
                    .map(|j| a + (b - a) * j as f64 / (m - 1) as f64)
                    .collect()
            };
            let note = if capped { "cap;".to_string() } else { String::new() };

            // Tube mass of the one-form kernel across the coupling wall.
            let pos = grid_on(-1.0, 1.0);
            let (diag1, trunc1) = kernel_diagonal(&d1, t, &pos)?;
            let tube = trapezoid(&diag1.iter().map(|v| v.abs()).collect::<Vec<_>>(), 2.0 / (m - 1) as f64);
            let envelope = t / eff.sqrt();
            let mut r = row(
                vec![
                    ("T".into(), num(strength)),
                    ("t".into(), num(t)),
                    ("check".into(), text("tube_mass")),
                ],
                tube,
                0.0,
                2.0 * trunc1,
                10.0 * envelope,
            );
            r.note = format!("{note}C={:.3e};", tube / envelope);
            rows.push(r);

            // Plateau discrepancy against the flat barrier model.
            let pos_l = grid_on(-2.0, -1.0);
            let (diag_def, trunc_d) = kernel_diagonal(&d1, t, &pos_l)?;
            let barrier = DiscreteOperator::assemble_interval(
                -2.0,
                -1.0,
                n / 4,
                |_| 0.0,
                BoundarySpec::DIRICHLET,
            )?;
            let (diag_flat, trunc_f) = kernel_diagonal(&barrier, t, &pos_l)?;
            let disc: Vec<f64> = diag_def
                .iter()
                .zip(&diag_flat)
                .map(|(a, b)| (a - b).abs())
                .collect();
            let plateau = trapezoid(&disc, 1.0 / (m - 1) as f64);
            let mut r = row(
                vec![
                    ("T".into(), num(strength)),
                    ("t".into(), num(t)),
                    ("check".into(), text("plateau_discrepancy")),
                ],
                plateau,
                0.0,
                2.0 * (trunc_d + trunc_f),
                1.0,
            );
            r.note = note.clone();
            rows.push(r);

            // Pointwise supertrace integrates to -1 on the relative half.
            let pos_r = grid_on(1.0, 2.0);
            let (k0, t0) = kernel_diagonal(&d0, t, &pos_r)?;
            let (k1, t1err) = kernel_diagonal(&d1, t, &pos_r)?;
            let sup: Vec<f64> = k0.iter().zip(&k1).map(|(a, b)| a - b).collect();
            let right = trapezoid(&sup, 1.0 / (m - 1) as f64);
            // The identity's error envelope is C1 e^{-ct} (short-time
            // boundary mass) + C2 t / sqrt(T-tilde) (collar mass of the
            // quasi-zero mode); the pinned (t=1, T=16) row carries the
            // stated 0.02 tolerance instead and fails by the collar term.
            let tol = if (t - 1.0).abs() < 1e-12 && (strength - 16.0).abs() < 1e-12 {
                0.02
            } else {
                2.0 * (-t).exp() + 2.0 * t / eff.sqrt()
            };
            let mut r = row(
                vec![
                    ("T".into(), num(strength)),
                    ("t".into(), num(t)),
                    ("check".into(), text("right_half_supertrace")),
                ],
                right,
                -1.0,
                2.0 * (t0 + t1err),
                tol,
            );
            r.note = note;
            rows.push(r);
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_combo {
        rows.append(&mut r?);
    }

    // Coupled zeta continuation versus the claimed drift.
    for &strength in strength_list {
        if strength > 8.0 {
            continue; // the spectral piece grows like e^T; evaluated where resolvable
        }
        let config = ZetaTildeConfig {
            n: 1600,
            t_points: 32,
            ..ZetaTildeConfig::default()
        };
        let z = zeta_tilde_prime0(ZetaTildeVariant::CircleGluing, strength, config)?;
        let mut r = row(
            vec![
                ("T".into(), num(strength)),
                ("t".into(), num(0.0)),
                ("check".into(), text("zeta_tilde_prime0")),
            ],
            z.definitional,
            2f64.ln() - strength,
            z.error_estimate,
            0.1,
        );
        if z.capped {
            r.note.push_str("cap;");
        }
        rows.push(r);
    }
    Ok(ExperimentReport::from_rows("coupled-trace", rows))
}

/// Product-geometry supertrace decomposition: the number-operator trace of
/// the product splits into the fiber part (killed by the vanishing 1D
/// supertrace) and chi(Y) rank copies of the 1D number trace.
pub fn run_product(y: &YModel, strength: f64, t_grid: &[f64], n: usize) -> Result<ExperimentReport> {
    y.validate()?;
    let profile = DeformationProfile::with_default_width(strength, ProfileKind::IntervalOdd)?;
    let (d0, d1) = model_pair(&profile, n)?;
    let h2 = (4.0 / n as f64).powi(2);
    let rows: Vec<Result<ReportRow>> = t_grid
        .par_iter()
        .map(|&t| {
            let th0 = truncated_heat_trace(&d0, t)?;
            let th1 = truncated_heat_trace(&d1, t)?;
            let line_sup = th0 - th1; // Tr_s e^{-t Delta^R}, zero up to h^2
            let line_num = -th1; // Tr_s (N^R e^{-t Delta^R})
            // Full double sum over product degrees.
            let measured = line_num * y.supertrace(t) + line_sup * y.number_supertrace(t);
            let target = line_num * y.euler_characteristic as f64 * y.rank as f64;
            let tol = 5.0 * h2 * (1.0 + strength) * (1.0 + y.number_supertrace(t).abs()) + 1e-10;
            Ok(row(
                vec![
                    ("chi".into(), num(y.euler_characteristic as f64)),
                    ("rank".into(), num(y.rank as f64)),
                    ("t".into(), num(t)),
                ],
                measured,
                target,
                tol,
                tol,
            ))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport::from_rows("product", rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gluing_report_passes_both_cuts() {
        let report = run_gluing(8.0, &[4.0, 3.0], &[1, 2]).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
        for r in &report.rows {
            assert!(r.residual.abs() < 1e-6, "{:?}", r);
            assert_eq!(r.residual, r.measured - r.target);
        }
    }

    #[test]
    fn product_two_points_doubles_line_trace() {
        let y = YModel::two_points(1);
        let report = run_product(&y, 4.0, &[0.5, 1.0, 5.0], 800).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
    }

    #[test]
    fn product_circle_fiber_vanishes() {
        let y = YModel::circle(1.0, 12, 2);
        let report = run_product(&y, 4.0, &[0.5, 1.0], 800).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
        for r in &report.rows {
            assert_eq!(r.target, 0.0);
        }
    }

    #[test]
    fn invalid_y_model_rejected() {
        let y = YModel {
            eigenvalues_per_degree: vec![vec![0.0], vec![]],
            euler_characteristic: 2,
            rank: 1,
        };
        assert!(y.validate().is_err());
    }

    #[test]
    fn supertrace_report_small() {
        let report = run_supertrace(&[0.0, 4.0], &[0.1, 1.0, 10.0], 600).unwrap();
        assert!(report.passed(), "{:?}", report.rows);
    }

    #[test]
    fn csv_is_deterministic_and_formatted() {
        let report = run_gluing(8.0, &[4.0], &[1]).unwrap();
        let a = report.to_csv();
        let b = run_gluing(8.0, &[4.0], &[1]).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("scenario,l1,l2,rank,measured,target,residual,error_estimate\n"));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn interval_metric_symmetry_and_chain() {
        let report = run_interval_metric(&[0.0, 2.0]).unwrap();
        for r in &report.rows {
            let check = match &r.parameters[2].1 {
                ParamValue::Text(s) => s.clone(),
                _ => String::new(),
            };
            match check.as_str() {
                "symmetry" | "chain" => assert!(r.pass, "{:?}", r),
                "log_torsion" => {
                    let t = match r.parameters[0].1 {
                        ParamValue::Num(x) => x,
                        _ => unreachable!(),
                    };
                    if t == 0.0 {
                        assert!(r.pass, "{:?}", r);
                    }
                }
                _ => {}
            }
        }
    }
}

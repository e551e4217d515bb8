//! Per-orbit analysis: sample the unit annihilator bundle, aggregate first
//! singular and focal radii, evaluate both comparison estimates and extract
//! overtwisted-disk boundaries.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{curvature_bound_from_profiles, kcontact_curvatures, tau_ac, CurvatureProfile};
use crate::error::{Error, Result};
use crate::jacobi::{
    first_singular_radius, fit_schwarzian_bound, focal_radii, jacobi_trace, singular_crossings, JacobiTrace, SchwarzianFit,
    SchwarzianSample, TraceConfig, AXIS_RADIUS,
};
use crate::report::{ser_f64, ser_opt_f64, SCHEMA_VERSION};
use crate::structures::{KContactModel, ReebOrbitSpec, StructureSpec};
use crate::sturm::BoundFit;

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub n_z: usize,
    pub n_theta: usize,
    pub r_max: f64,
    pub trace: TraceConfig,
    /// Radii on which the Schwarzian bound is fitted; the upper end is cut
    /// at each sample's horizon. `None` means [AXIS_RADIUS, r_max].
    pub fit_range: Option<(f64, f64)>,
    /// Schwarzian evaluations per sample for the fit.
    pub fit_points: usize,
    /// Canonical curvature profiles; `None` uses the model's own when known.
    pub curvature: Option<Vec<CurvatureProfile>>,
}

/// Trace settings for grid sweeps: coarser sampling than a single trace,
/// the same refinement near roots.
pub fn sweep_trace_config() -> TraceConfig {
    TraceConfig { samples_per_unit: 256, ..TraceConfig::default() }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { n_z: 8, n_theta: 32, r_max: 6.0, trace: sweep_trace_config(), fit_range: None, fit_points: 64, curvature: None }
    }
}

/// Uniform θ grid on [0, 2π) (the endpoint wraps onto 0).
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n.max(1)).map(|j| 2.0 * PI * j as f64 / n.max(1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleResult {
    pub z: f64,
    pub theta: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub r_o: Option<f64>,
    pub horizon: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub first_focal: Option<f64>,
    pub focal_order: Option<u8>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InjSource {
    Analytic,
    /// First focal radius: an upper bound on the injectivity radius.
    FocalProxy,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InjRadius {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub source: InjSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    /// The comparison radius before taking the minimum with r_inj.
    #[serde(serialize_with = "ser_f64")]
    pub comparison: f64,
    pub bound: BoundFit,
    /// The bound was checked on the samples up to this radius.
    #[serde(serialize_with = "ser_f64")]
    pub validated_to: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// r_o⁺ < r_inj with an analytic r_inj.
    OvertwistedDisk,
    /// r_o⁺ below a focal proxy only.
    CandidateOvertwistedDisk,
    /// No singular radius on any sample: r_tight = r_inj.
    TightUpToInjectivity,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conclusion {
    /// min(r_inj, r_o⁻) ≤ r_tight ≤ min(r_inj, r_o⁺).
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    /// Set when the interval collapses and r_inj is analytic.
    #[serde(serialize_with = "ser_opt_f64")]
    pub r_tight: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct TightnessReport {
    pub schema_version: &'static str,
    pub structure: String,
    pub orbit: ReebOrbitSpec,
    pub grid: [usize; 2],
    pub samples_per_unit: usize,
    pub r_max: f64,
    pub samples: Vec<SampleResult>,
    pub failed_samples: usize,
    pub not_found: usize,
    #[serde(serialize_with = "ser_f64")]
    pub r_o_minus: f64,
    #[serde(serialize_with = "ser_f64")]
    pub r_o_plus: f64,
    /// r_o⁺ covers only the samples where r_o was found.
    pub r_o_plus_partial: bool,
    #[serde(serialize_with = "ser_opt_f64")]
    pub first_focal_min: Option<f64>,
    pub r_inj: InjRadius,
    pub schwarzian_fit: Option<SchwarzianFit>,
    pub rho_thm_b: Option<Estimate>,
    pub rho_thm_c: Option<Estimate>,
    pub conclusion: Conclusion,
    pub notes: Vec<String>,
}

struct SampleWork {
    result: SampleResult,
    schwarzian: Option<SchwarzianSample>,
}

fn fit_window(cfg: &AnalysisConfig) -> (f64, f64) {
    cfg.fit_range.unwrap_or((AXIS_RADIUS, cfg.r_max))
}

fn schwarzian_grid(t: &JacobiTrace, window: (f64, f64), n: usize, focal: &[f64]) -> SchwarzianSample {
    let mut out = SchwarzianSample::default();
    let hi = window.1.min(t.horizon);
    if !(hi > window.0) || n == 0 {
        return out;
    }
    for k in 0..n {
        let r = window.0 + (hi - window.0) * k as f64 / (n - 1).max(1) as f64;
        if r <= 0.0 || focal.iter().any(|f| (r - f).abs() <= 1e-4) {
            continue;
        }
        if let Ok((s, s_reg)) = t.schwarzian_at(r) {
            if s_reg.is_finite() {
                out.r.push(r);
                out.s.push(s);
                out.s_reg.push(s_reg);
            }
        }
    }
    out
}

fn run_sample(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, theta: f64, cfg: &AnalysisConfig) -> SampleWork {
    let blank = |error: Option<String>| SampleResult { z, theta, r_o: None, horizon: 0.0, first_focal: None, focal_order: None, error };
    let t = match jacobi_trace(s, orbit, z, theta, cfg.r_max, &cfg.trace) {
        Ok(t) => t,
        Err(e) => return SampleWork { result: blank(Some(e.to_string())), schwarzian: None },
    };
    let r_o = first_singular_radius(&t).value();
    let focal = focal_radii(&t);
    let focal_r: Vec<f64> = focal.iter().map(|f| f.r).collect();
    let schwarzian = if cfg.fit_points > 0 { Some(schwarzian_grid(&t, fit_window(cfg), cfg.fit_points, &focal_r)) } else { None };
    let result = SampleResult {
        z,
        theta,
        r_o,
        horizon: t.horizon,
        first_focal: focal.first().map(|f| f.r),
        focal_order: focal.first().map(|f| f.order),
        error: None,
    };
    SampleWork { result, schwarzian }
}

fn curvature_profiles(s: &StructureSpec, cfg: &AnalysisConfig) -> Option<Vec<CurvatureProfile>> {
    match &cfg.curvature {
        Some(p) if !p.is_empty() => Some(p.clone()),
        Some(_) => None,
        None => s.constant_curvatures().map(|(ra, rc)| vec![if rc == 0.0 { kcontact_curvatures(ra) } else { CurvatureProfile::constant(ra, rc) }]),
    }
}

/// Sample A¹Γ on an n_z × n_θ grid and assemble the report.
pub fn analyze_orbit(s: &StructureSpec, orbit: &ReebOrbitSpec, cfg: &AnalysisConfig) -> Result<TightnessReport> {
    if cfg.n_z == 0 || cfg.n_theta == 0 || !(cfg.r_max > 0.0) {
        return Err(Error::Invalid("grid sizes and r_max must be positive".into()));
    }
    cfg.trace.integrator.validate()?;
    let pairs: Vec<(f64, f64)> = orbit.grid(cfg.n_z).into_iter().flat_map(|z| theta_grid(cfg.n_theta).into_iter().map(move |th| (z, th))).collect();
    // collect() keeps grid order, so the reduction below does not depend on scheduling
    let work: Vec<SampleWork> = pairs.par_iter().map(|&(z, th)| run_sample(s, orbit, z, th, cfg)).collect();

    let mut notes = Vec::new();
    let ok: Vec<&SampleResult> = work.iter().map(|w| &w.result).filter(|r| r.error.is_none()).collect();
    let failed_samples = work.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::Invalid(format!("all {} samples failed: {}", work.len(), work[0].result.error.clone().unwrap_or_default())));
    }
    let found: Vec<f64> = ok.iter().filter_map(|r| r.r_o).collect();
    let not_found = ok.len() - found.len();
    let (r_o_minus, r_o_plus, r_o_plus_partial) = if found.is_empty() {
        (f64::INFINITY, f64::INFINITY, false)
    } else {
        let lo = found.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = found.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi, not_found > 0)
    };
    if r_o_plus_partial {
        notes.push(format!("{not_found} samples have no singular radius within the horizon; r_o_plus is over found samples only"));
    }
    if failed_samples > 0 {
        notes.push(format!("{failed_samples} samples failed"));
    }
    let first_focal_min = ok.iter().filter_map(|r| r.first_focal).reduce(f64::min);
    let r_inj = match s.analytic_r_inj() {
        Some(v) => InjRadius { value: v, source: InjSource::Analytic },
        None => match first_focal_min {
            Some(v) => InjRadius { value: v, source: InjSource::FocalProxy },
            None => InjRadius { value: f64::INFINITY, source: InjSource::Unknown },
        },
    };
    let min_horizon = ok.iter().map(|r| r.horizon).fold(f64::INFINITY, f64::min);

    // Schwarzian bound
    let window = fit_window(cfg);
    let sch: Vec<SchwarzianSample> = work.iter().filter_map(|w| w.schwarzian.clone()).collect();
    let fit_hi = window.1.min(min_horizon);
    let schwarzian_fit = if sch.iter().any(|x| !x.r.is_empty()) { fit_schwarzian_bound(&sch, (window.0, fit_hi)).ok() } else { None };
    let rho_thm_b = schwarzian_fit.map(|f| Estimate { value: r_inj.value.min(f.r_star), comparison: f.r_star, bound: f.bound(), validated_to: fit_hi });
    if let Some(e) = &rho_thm_b {
        if e.value > e.validated_to {
            notes.push("the Schwarzian bound is only validated below the reported estimate".into());
        }
    }

    // curvature bound
    let rho_thm_c = match curvature_profiles(s, cfg) {
        Some(p) => {
            let bound = curvature_bound_from_profiles(&p, (0.0, cfg.r_max))?;
            let BoundFit::Curvature { a, c } = bound else { unreachable!() };
            let tau = tau_ac(a, c);
            Some(Estimate { value: r_inj.value.min(tau), comparison: tau, bound, validated_to: cfg.r_max })
        }
        None => None,
    };

    let conclusion = conclude(r_inj, r_o_minus, r_o_plus, not_found, found.len());
    if r_inj.source != InjSource::Analytic {
        notes.push("r_inj is not known analytically; the first focal radius is an upper proxy and no r_tight value is claimed".into());
    }
    Ok(TightnessReport {
        schema_version: SCHEMA_VERSION,
        structure: s.id.clone(),
        orbit: orbit.clone(),
        grid: [cfg.n_z, cfg.n_theta],
        samples_per_unit: cfg.trace.samples_per_unit,
        r_max: cfg.r_max,
        samples: work.into_iter().map(|w| w.result).collect(),
        failed_samples,
        not_found,
        r_o_minus,
        r_o_plus,
        r_o_plus_partial,
        first_focal_min,
        r_inj,
        schwarzian_fit,
        rho_thm_b,
        rho_thm_c,
        conclusion,
        notes,
    })
}

fn conclude(r_inj: InjRadius, r_o_minus: f64, r_o_plus: f64, not_found: usize, found: usize) -> Conclusion {
    let lower = r_inj.value.min(r_o_minus);
    let upper = r_inj.value.min(r_o_plus);
    let analytic = r_inj.source == InjSource::Analytic;
    let verdict = if found == 0 {
        if analytic {
            Verdict::TightUpToInjectivity
        } else {
            Verdict::Undecided
        }
    } else if not_found == 0 && r_o_plus < r_inj.value {
        if analytic {
            Verdict::OvertwistedDisk
        } else {
            Verdict::CandidateOvertwistedDisk
        }
    } else {
        Verdict::Undecided
    };
    let collapsed = upper == lower || (upper - lower).abs() <= 1e-8 * lower.abs().max(1.0);
    let r_tight = if analytic && collapsed { Some(if lower.is_finite() { 0.5 * (lower + upper) } else { lower }) } else { None };
    Conclusion { lower, upper, r_tight, verdict }
}

impl TightnessReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }
}

/// Boundary of the candidate disk D_q: the points E(r_o(λ_θ) λ_θ) over one fibre.
#[derive(Clone, Debug, Serialize)]
pub struct DiskBoundary {
    pub z: f64,
    pub theta: Vec<f64>,
    pub r_o: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    /// Distance between the θ = 0 point and the point traced at θ = 2π.
    pub closure_defect: f64,
    /// No two non-adjacent segments cross in the plane transverse to the orbit.
    pub simple: bool,
    /// Samples whose first focal radius precedes r_o.
    pub focal_before_singular: usize,
}

fn boundary_point(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, theta: f64, r_max: f64, cfg: &TraceConfig) -> Result<(f64, [f64; 3], bool)> {
    let t = jacobi_trace(s, orbit, z, theta, r_max, cfg)?;
    let r = first_singular_radius(&t).value().ok_or(Error::NotOvertwistedWithinHorizon { theta, horizon: t.horizon })?;
    let focal_first = focal_radii(&t).first().map(|f| f.r < r).unwrap_or(false);
    Ok((r, t.trajectory().phase(r).q, focal_first))
}

pub fn disk_boundary(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, n_theta: usize, r_max: f64, cfg: &TraceConfig) -> Result<DiskBoundary> {
    if n_theta < 3 {
        return Err(Error::Invalid("need at least three boundary samples".into()));
    }
    let mut thetas = theta_grid(n_theta);
    thetas.push(2.0 * PI);
    let pts: Vec<Result<(f64, [f64; 3], bool)>> = thetas.par_iter().map(|&th| boundary_point(s, orbit, z, th, r_max, cfg)).collect();
    let pts: Vec<(f64, [f64; 3], bool)> = pts.into_iter().collect::<Result<_>>()?;
    let (last, body) = pts.split_last().unwrap();
    let p0 = body[0].1;
    let closure_defect = (0..3).map(|i| (last.1[i] - p0[i]).powi(2)).sum::<f64>().sqrt();
    let points: Vec<[f64; 3]> = body.iter().map(|p| p.1).collect();
    let tangent = s.frame.eval(&orbit_point_or_base(s, orbit, z))[0];
    Ok(DiskBoundary {
        z,
        theta: thetas[..n_theta].to_vec(),
        r_o: body.iter().map(|p| p.0).collect(),
        simple: polyline_simple(&points, &tangent),
        points,
        closure_defect,
        focal_before_singular: body.iter().filter(|p| p.2).count(),
    })
}

fn orbit_point_or_base(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64) -> [f64; 3] {
    crate::flow::orbit_point(s, orbit, z).unwrap_or(orbit.base)
}

fn polyline_simple(pts: &[[f64; 3]], normal: &[f64; 3]) -> bool {
    // orthonormal basis of the plane transverse to `normal`
    let n = {
        let l = (normal[0].powi(2) + normal[1].powi(2) + normal[2].powi(2)).sqrt();
        [normal[0] / l, normal[1] / l, normal[2] / l]
    };
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = crate::linalg::cross(&n, &seed);
    let l1 = crate::linalg::dot(&e1, &e1).sqrt();
    let e1 = [e1[0] / l1, e1[1] / l1, e1[2] / l1];
    let e2 = crate::linalg::cross(&n, &e1);
    let p: Vec<(f64, f64)> = pts.iter().map(|q| (crate::linalg::dot(q, &e1), crate::linalg::dot(q, &e2))).collect();
    let m = p.len();
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    for i in 0..m {
        let (a, b) = (p[i], p[(i + 1) % m]);
        for j in i + 1..m {
            if j == i || (j + 1) % m == i || (i + 1) % m == j {
                continue;
            }
            let (c, d) = (p[j], p[(j + 1) % m]);
            let d1 = orient(a, b, c);
            let d2 = orient(a, b, d);
            let d3 = orient(c, d, a);
            let d4 = orient(c, d, b);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return false;
            }
        }
    }
    true
}

pub fn write_disk_csv<W: Write>(d: &DiskBoundary, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    writeln!(out, "theta,r_o,x,y,z").map_err(io)?;
    for k in 0..d.points.len() {
        let p = d.points[k];
        writeln!(out, "{},{},{},{},{}", d.theta[k], d.r_o[k], p[0], p[1], p[2]).map_err(io)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocusPoint {
    pub z: f64,
    pub theta: f64,
    /// φ(r) = kπ.
    pub k: i64,
    pub r: f64,
}

/// Crossings of φ through nonzero multiples of π on every grid sample.
pub fn singular_locus_sample(s: &StructureSpec, orbit: &ReebOrbitSpec, n_z: usize, n_theta: usize, r_max: f64, cfg: &TraceConfig) -> Result<Vec<LocusPoint>> {
    let pairs: Vec<(f64, f64)> = orbit.grid(n_z).into_iter().flat_map(|z| theta_grid(n_theta).into_iter().map(move |th| (z, th))).collect();
    let per: Vec<Result<Vec<LocusPoint>>> = pairs
        .par_iter()
        .map(|&(z, theta)| {
            let t = jacobi_trace(s, orbit, z, theta, r_max, cfg)?;
            Ok(singular_crossings(&t).into_iter().map(|(k, r)| LocusPoint { z, theta, k, r }).collect())
        })
        .collect();
    let mut out = Vec::new();
    for p in per {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocalCheck {
    pub holds: bool,
    /// π/√κ₊, or +∞ when κ₊ ≤ 0.
    #[serde(serialize_with = "ser_f64")]
    pub bound: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub min_focal: Option<f64>,
    pub samples: usize,
}

/// First focal radius ≥ π/√κ₊ on every sample of a K-contact model with κ ≤ κ₊.
pub fn focal_lower_bound_check(model: KContactModel, kappa_plus: f64, n_z: usize, n_theta: usize, r_max: f64, cfg: &TraceConfig) -> Result<FocalCheck> {
    if model.kappa > kappa_plus {
        return Err(Error::Invalid("kappa must not exceed kappa_plus".into()));
    }
    let s = StructureSpec::kcontact(model.kappa)?;
    let bound = if kappa_plus > 0.0 { PI / kappa_plus.sqrt() } else { f64::INFINITY };
    let pairs: Vec<(f64, f64)> = s.orbit.grid(n_z).into_iter().flat_map(|z| theta_grid(n_theta).into_iter().map(move |th| (z, th))).collect();
    let firsts: Vec<Result<Option<f64>>> = pairs
        .par_iter()
        .map(|&(z, th)| {
            let t = jacobi_trace(&s, &s.orbit, z, th, r_max, cfg)?;
            Ok(focal_radii(&t).first().map(|f| f.r))
        })
        .collect();
    let firsts: Vec<Option<f64>> = firsts.into_iter().collect::<Result<_>>()?;
    let min_focal = firsts.iter().flatten().cloned().reduce(f64::min);
    let holds = match min_focal {
        Some(f) => f >= bound - 1e-6,
        None => true,
    };
    Ok(FocalCheck { holds, bound, min_focal, samples: pairs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conclusion_cases() {
        let an = InjRadius { value: PI, source: InjSource::Analytic };
        let c = conclude(an, f64::INFINITY, f64::INFINITY, 4, 0);
        assert_eq!(c.verdict, Verdict::TightUpToInjectivity);
        assert_eq!(c.r_tight, Some(PI));
        let inf = InjRadius { value: f64::INFINITY, source: InjSource::Analytic };
        let c = conclude(inf, 2.5, 2.5, 0, 4);
        assert_eq!(c.verdict, Verdict::OvertwistedDisk);
        assert_eq!(c.r_tight, Some(2.5));
        let proxy = InjRadius { value: 4.0, source: InjSource::FocalProxy };
        let c = conclude(proxy, 2.0, 3.0, 0, 4);
        assert_eq!(c.verdict, Verdict::CandidateOvertwistedDisk);
        assert_eq!((c.lower, c.upper, c.r_tight), (2.0, 3.0, None));
        let c = conclude(inf, 2.0, 3.0, 1, 3);
        assert_eq!(c.verdict, Verdict::Undecided);
    }

    #[test]
    fn square_is_simple_bowtie_is_not() {
        let n = [0.0, 0.0, 1.0];
        let sq = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(polyline_simple(&sq, &n));
        let bow = [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert!(!polyline_simple(&bow, &n));
    }
}

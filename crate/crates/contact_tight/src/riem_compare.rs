//! Riemannian tube estimate ρ_EKM and the comparison tables against the
//! sub-Riemannian estimates.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::curvature::{curvature_bound_from_profiles, kcontact_curvatures, tau_ac};
use crate::error::{Error, Result};
use crate::report::{fmt_num, ser_f64, ser_opt_f64};
use crate::structures::StructureSpec;
use crate::sturm::BoundFit;
use crate::tightness::{analyze_orbit, AnalysisConfig};

/// Inputs of the Riemannian estimate. Unknown radii are +∞, so they drop out
/// of the minimum and the result is an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EkmInputs {
    #[serde(serialize_with = "ser_f64")]
    pub r_inj_riem: f64,
    #[serde(serialize_with = "ser_f64")]
    pub inj_g: f64,
    /// Bound on |sec|.
    pub sec_abs: f64,
    /// Positive upper bound K on sec.
    pub k_upper: f64,
    /// Minimum of Ric(f₀).
    pub ric_min: f64,
    pub theta_prime: f64,
}

impl EkmInputs {
    pub fn curvature_only(sec_abs: f64, k_upper: f64, ric_min: f64) -> Self {
        EkmInputs { r_inj_riem: f64::INFINITY, inj_g: f64::INFINITY, sec_abs, k_upper, ric_min, theta_prime: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EkmEstimate {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub a: f64,
    pub b: f64,
    /// r_inj^R, inj(g)/2, π/(2√K), 2/(√(2a+b²)+b).
    pub terms: [f64; 4],
    /// Some inputs were unknown (+∞): the value only bounds the estimate from above.
    pub upper_bound: bool,
}

pub fn rho_ekm(inp: &EkmInputs) -> Result<EkmEstimate> {
    if !(inp.sec_abs >= 0.0 && inp.k_upper >= 0.0 && inp.ric_min.is_finite() && inp.theta_prime.is_finite()) {
        return Err(Error::Invalid("inconsistent curvature bounds".into()));
    }
    let a = 4.0 / 3.0 * inp.sec_abs;
    let tp = inp.theta_prime;
    let radicand = tp * tp / 4.0 - 0.5 * inp.ric_min;
    if radicand < 0.0 {
        return Err(Error::ComplexB { radicand });
    }
    let b = tp / 2.0 + radicand.sqrt();
    let k_term = if inp.k_upper > 0.0 { PI / (2.0 * inp.k_upper.sqrt()) } else { f64::INFINITY };
    let terms = [inp.r_inj_riem, inp.inj_g / 2.0, k_term, 2.0 / ((2.0 * a + b * b).sqrt() + b)];
    let value = terms.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper_bound = !inp.r_inj_riem.is_finite() || !inp.inj_g.is_finite();
    Ok(EkmEstimate { value, a, b, terms, upper_bound })
}

/// Sectional curvature of the plane with unit normal n (ω-component n₀) and
/// Ric(f₀) for the Riemannian extension of a K-contact model.
pub fn ksect(kappa: f64, n0: f64) -> (f64, f64) {
    assert!(n0.abs() <= 1.0, "n0 must lie in [-1, 1]");
    (n0 * n0 * (kappa - 1.0) + 0.25, 0.5)
}

/// Curvature bounds of a K-contact model over all planes (sec is affine in n₀²).
pub fn kcontact_ekm_inputs(kappa: f64) -> EkmInputs {
    let (s0, ric) = ksect(kappa, 0.0);
    let (s1, _) = ksect(kappa, 1.0);
    EkmInputs::curvature_only(s0.abs().max(s1.abs()), s0.max(s1).max(0.0), ric)
}

/// sup over s of min(s, ρ(s)) for nonincreasing ρ: the crossing s = ρ(s),
/// bracketed and bisected to 1e-8.
pub fn sup_min_crossing(rho: impl Fn(f64) -> f64) -> f64 {
    let g = |s: f64| s - rho(s);
    let (mut lo, mut hi) = (1e-9, 1.0);
    if g(lo) >= 0.0 {
        return lo.min(rho(lo));
    }
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    while hi - lo > 1e-8 * hi.max(1.0) * 1e-2 {
        let m = 0.5 * (lo + hi);
        if g(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// sup_s min{s, ρ^s_EKM} for inputs computed on tubes of radius s.
pub fn rho_ekm_sup_s(inputs: impl Fn(f64) -> EkmInputs) -> Result<f64> {
    // surface ComplexB before bisecting
    rho_ekm(&inputs(1.0))?;
    Ok(sup_min_crossing(|s| rho_ekm(&inputs(s)).map(|e| e.value).unwrap_or(0.0)))
}

/// (Ric(f₀), sec(span{f₂, f₀})) of the overtwisted model at radius r.
pub fn ot_curvature_profile(r: f64) -> (f64, f64) {
    let r2 = r * r;
    (0.5 * (1.0 - r2 * r2), 0.25 * (r2 - 1.0).powi(2))
}

/// Tube-of-radius-s inputs for the overtwisted model from the known plane
/// f₂∧f₀ only (so |sec| and K are lower estimates of the true bounds and the
/// resulting ρ^s is an upper bound).
pub fn ot_ekm_inputs(s: f64) -> EkmInputs {
    let n = 200;
    let (mut ric_min, mut sec_max) = (f64::INFINITY, 0.0f64);
    for k in 0..=n {
        let (ric, sec) = ot_curvature_profile(s * k as f64 / n as f64);
        ric_min = ric_min.min(ric);
        sec_max = sec_max.max(sec.abs());
    }
    // endpoints are where the extrema sit; include them exactly
    let (ric_s, sec_s) = ot_curvature_profile(s);
    EkmInputs::curvature_only(sec_max.max(sec_s.abs()), sec_max.max(sec_s), ric_min.min(ric_s))
}

/// The closed-form majorant ρ^s ≤ 2/s² of the overtwisted tube estimate.
pub fn ot_ekm_majorant(s: f64) -> f64 {
    2.0 / (s * s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    #[serde(serialize_with = "ser_f64")]
    pub rho_thm_b: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub rho_thm_c: Option<f64>,
    /// Upper bound on ρ_EKM.
    #[serde(serialize_with = "ser_f64")]
    pub rho_ekm_upper: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub r_tight: Option<f64>,
    pub schwarzian_bound: Option<BoundFit>,
    pub curvature_bound: Option<BoundFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub title: String,
    pub rows: Vec<ComparisonRow>,
}

/// Sweep used for table rows: the estimates are θ- and z-independent for the
/// models in the tables, so a small grid is enough.
pub fn table_analysis_config(r_max: f64) -> AnalysisConfig {
    AnalysisConfig { n_z: 2, n_theta: 4, r_max, ..AnalysisConfig::default() }
}

/// Left-invariant K-contact models κ = 0, 1, −1.
pub fn kleft_table() -> Result<ComparisonTable> {
    let mut rows = Vec::new();
    for (name, kappa) in [("Heisenberg (kappa=0)", 0.0), ("SU(2) (kappa=1)", 1.0), ("SL(2) (kappa=-1)", -1.0)] {
        let s = StructureSpec::kcontact(kappa)?;
        let rep = analyze_orbit(&s, &s.orbit, &table_analysis_config(4.0))?;
        let b = rep.rho_thm_b.ok_or_else(|| Error::Invalid("no Schwarzian fit".into()))?;
        let bound = curvature_bound_from_profiles(&[kcontact_curvatures(kappa)], (0.0, rep.r_max))?;
        let BoundFit::Curvature { a, c } = bound else { unreachable!() };
        let rho_c = rep.r_inj.value.min(tau_ac(a, c));
        let ekm = rho_ekm(&kcontact_ekm_inputs(kappa))?;
        rows.push(ComparisonRow {
            model: name.into(),
            rho_thm_b: b.value,
            rho_thm_c: Some(rho_c),
            rho_ekm_upper: ekm.value,
            r_tight: rep.conclusion.r_tight,
            schwarzian_bound: Some(b.bound),
            curvature_bound: Some(bound),
        });
    }
    Ok(ComparisonTable { title: "left-invariant K-contact models".into(), rows })
}

/// Overtwisted model: Schwarzian estimate against the Riemannian tube estimate.
pub fn ot_table() -> Result<ComparisonTable> {
    let s = StructureSpec::overtwisted();
    let rep = analyze_orbit(&s, &s.orbit, &table_analysis_config(4.0))?;
    let b = rep.rho_thm_b.ok_or_else(|| Error::Invalid("no Schwarzian fit".into()))?;
    let row = ComparisonRow {
        model: "overtwisted".into(),
        rho_thm_b: b.value,
        rho_thm_c: None,
        rho_ekm_upper: sup_min_crossing(ot_ekm_majorant),
        r_tight: rep.conclusion.r_tight,
        schwarzian_bound: Some(b.bound),
        curvature_bound: None,
    };
    Ok(ComparisonTable { title: "overtwisted model".into(), rows: vec![row] })
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        Some(x) => fmt_num(x),
        None => "n/a".into(),
    }
}

impl ComparisonTable {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "### {}\n", self.title);
        let _ = writeln!(out, "| model | rho_ThmB | rho_ThmC | rho_EKM | r_tight |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for r in &self.rows {
            let _ = writeln!(out, "| {} | {} | {} | <= {} | {} |", r.model, cell(Some(r.rho_thm_b)), cell(r.rho_thm_c), cell(Some(r.rho_ekm_upper)), cell(r.r_tight));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,rho_thm_b,rho_thm_c,rho_ekm_upper,r_tight\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.model, cell(Some(r.rho_thm_b)), cell(r.rho_thm_c), cell(Some(r.rho_ekm_upper)), cell(r.r_tight));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kcontact_ekm_values() {
        let e = rho_ekm(&kcontact_ekm_inputs(0.0)).unwrap();
        assert_eq!((e.a, e.b), (1.0, 0.5));
        assert!((e.value - 1.0).abs() < 1e-15);
        let e = rho_ekm(&kcontact_ekm_inputs(1.0)).unwrap();
        assert!((e.a - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.value - 4.0 / (1.0 + (11.0f64 / 3.0).sqrt())).abs() < 1e-14);
        let e = rho_ekm(&kcontact_ekm_inputs(-1.0)).unwrap();
        assert!((e.a - 7.0 / 3.0).abs() < 1e-15);
        assert!((e.value - 2.0 / ((59.0f64 / 12.0).sqrt() + 0.5)).abs() < 1e-14);
        assert!(e.upper_bound);
        assert_eq!(kcontact_ekm_inputs(1.0).k_upper, 0.25);
    }

    #[test]
    fn ksect_values() {
        for n0 in [0.0, 0.3, 1.0] {
            assert_eq!(ksect(1.0, n0), (0.25, 0.5));
        }
        assert_eq!(ksect(0.0, 1.0).0, -0.75);
        assert_eq!(ksect(-1.0, 1.0).0, -1.75);
    }

    #[test]
    fn complex_b_reported() {
        let e = rho_ekm(&EkmInputs::curvature_only(1.0, 1.0, 1.0));
        assert!(matches!(e, Err(Error::ComplexB { .. })));
    }

    #[test]
    fn sup_min_cases() {
        assert!((sup_min_crossing(ot_ekm_majorant) - 2.0f64.cbrt()).abs() < 1e-8);
        assert!((sup_min_crossing(|_| 5.0) - 5.0).abs() < 1e-8);
        assert!((sup_min_crossing(|s| 1.0 / s) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ot_profile_and_majorant() {
        assert_eq!(ot_curvature_profile(0.0), (0.5, 0.25));
        assert_eq!(ot_curvature_profile(1.0), (0.0, 0.0));
        let (ric, sec) = ot_curvature_profile(2.0f64.sqrt());
        assert!((ric + 1.5).abs() < 1e-14 && (sec - 0.25).abs() < 1e-14);
        // the profile-based ρ^s never exceeds the closed-form majorant
        for k in 1..=40 {
            let s = 0.1 * k as f64;
            let e = rho_ekm(&ot_ekm_inputs(s)).unwrap();
            assert!(e.value <= ot_ekm_majorant(s) + 1e-12, "s={s}");
            assert!((e.b - 0.5 * (1.0 + s * s)).abs() < 1e-12);
        }
        let v = rho_ekm_sup_s(ot_ekm_inputs).unwrap();
        assert!(v <= 2.0f64.cbrt());
    }
}

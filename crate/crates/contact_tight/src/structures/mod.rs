//! Contact sub-Riemannian structures on chart domains of ℝ³: frames, radial
//! models, constant-curvature K-contact models, structure coefficients and
//! the invariants χ, κ.

mod file;
mod frames;
mod profile;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg;
use crate::scalar::{Jet, Scalar};

pub use file::{load_structure_file, parse_structure_str, StructureFile};
pub use frames::{Frame, FrameMatrix, RadialFrame};
pub use profile::{Profile, ProfileSpec, Spline};

/// Coefficients `c[i][j][k]` of `[f_i, f_j] = Σ_k c_ij^k f_k`.
pub type Coefficients = [[[f64; 3]; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivMode {
    /// Exact derivatives by forward-mode differentiation of the frame formulas.
    Analytic,
    /// Fourth-order central differences with one Richardson step.
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    All,
    Box { lo: [f64; 3], hi: [f64; 3] },
}

#[derive(Clone, Debug)]
pub struct FrameStructure {
    pub label: String,
    pub frame: Frame,
    pub domain: Domain,
    pub h_fd: f64,
    pub deriv: DerivMode,
}

impl FrameStructure {
    pub fn new(label: impl Into<String>, frame: Frame) -> FrameStructure {
        FrameStructure { label: label.into(), frame, domain: Domain::All, h_fd: 1e-5, deriv: DerivMode::Analytic }
    }

    /// Frame from component expressions in x, y, z (rows f0, f1, f2).
    pub fn from_expressions(label: &str, rows: [[&str; 3]; 3]) -> Result<FrameStructure> {
        let mut parsed: Vec<[Expr; 3]> = Vec::with_capacity(3);
        for row in rows {
            let e0 = Expr::parse(row[0], &["x", "y", "z"])?;
            let e1 = Expr::parse(row[1], &["x", "y", "z"])?;
            let e2 = Expr::parse(row[2], &["x", "y", "z"])?;
            parsed.push([e0, e1, e2]);
        }
        let arr: [[Expr; 3]; 3] = [parsed[0].clone(), parsed[1].clone(), parsed[2].clone()];
        Ok(FrameStructure::new(label, Frame::Components(Arc::new(arr))))
    }

    pub fn contains(&self, q: &[f64; 3]) -> bool {
        let in_box = match &self.domain {
            Domain::All => true,
            Domain::Box { lo, hi } => (0..3).all(|a| q[a] >= lo[a] && q[a] <= hi[a]),
        };
        in_box && self.frame.defined_at(q)
    }

    fn check(&self, q: &[f64; 3]) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(*q))
        }
    }

    pub fn eval(&self, q: &[f64; 3]) -> FrameMatrix<f64> {
        self.frame.eval(q)
    }

    /// Frame value and first derivatives `d[i][a][c] = ∂_c f_i^a`.
    pub fn jacobian(&self, q: &[f64; 3]) -> (FrameMatrix<f64>, [[[f64; 3]; 3]; 3]) {
        match self.deriv {
            DerivMode::Analytic => {
                let m = self.frame.eval(&seed1(q));
                (m.map(|row| row.map(|j| j.v)), m.map(|row| row.map(|j| j.d)))
            }
            DerivMode::FiniteDifference => {
                let mut d = [[[0.0; 3]; 3]; 3];
                for c in 0..3 {
                    let g = fd_directional(|p| self.frame.eval(p), q, c, self.h_fd);
                    for i in 0..3 {
                        for a in 0..3 {
                            d[i][a][c] = g[i][a];
                        }
                    }
                }
                (self.frame.eval(q), d)
            }
        }
    }
}

/// Seed a point as independent variables of a first-order jet.
pub fn seed1<S: Scalar>(q: &[S; 3]) -> [Jet<S>; 3] {
    [0, 1, 2].map(|c| {
        let mut d = [S::cst(0.0); 3];
        d[c] = S::cst(1.0);
        Jet { v: q[c], d }
    })
}

/// Seed a point for second derivatives (nested jets).
pub fn seed2<S: Scalar>(q: &[S; 3]) -> [Jet<Jet<S>>; 3] {
    let inner = seed1(q);
    [0, 1, 2].map(|c| {
        let d = [0, 1, 2].map(|k| Jet::constant(S::cst(if k == c { 1.0 } else { 0.0 })));
        Jet { v: inner[c], d }
    })
}

/// Derivative along coordinate `c` by fourth-order central differences,
/// Richardson-extrapolated once.
fn fd_directional<F>(f: F, q: &[f64; 3], c: usize, h: f64) -> FrameMatrix<f64>
where
    F: Fn(&[f64; 3]) -> FrameMatrix<f64>,
{
    let stencil = |h: f64| {
        let at = |t: f64| {
            let mut p = *q;
            p[c] += t;
            f(&p)
        };
        let (a, b, cc, d) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                out[i][k] = (-a[i][k] + 8.0 * b[i][k] - 8.0 * cc[i][k] + d[i][k]) / (12.0 * h);
            }
        }
        out
    };
    let d1 = stencil(h);
    let d2 = stencil(2.0 * h);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = (16.0 * d1[i][k] - d2[i][k]) / 15.0;
        }
    }
    out
}

/// Structure coefficients from a frame evaluated on first-order jets.
fn coefficients_from_jets<S: Scalar>(m: &FrameMatrix<Jet<S>>) -> [[[S; 3]; 3]; 3] {
    let val = m.map(|row| row.map(|j| j.v));
    let nu = linalg::dual(&val);
    let zero = S::cst(0.0);
    let mut c = [[[zero; 3]; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mut br = [zero; 3];
            for (a, b) in br.iter_mut().enumerate() {
                let mut acc = zero;
                for k in 0..3 {
                    acc = acc + val[i][k] * m[j][a].d[k] - val[j][k] * m[i][a].d[k];
                }
                *b = acc;
            }
            for k in 0..3 {
                let ck = linalg::dot(&nu[k], &br);
                c[i][j][k] = ck;
                c[j][i][k] = -ck;
            }
        }
    }
    c
}

pub(crate) fn frame_guard(fs: &FrameStructure, p: &[f64; 3]) -> Result<FrameMatrix<f64>> {
    fs.check(p)?;
    let m = fs.eval(p);
    let cond = linalg::cond1(&m);
    if !(cond <= 1e12) {
        return Err(Error::FrameSingular { point: *p, cond });
    }
    Ok(m)
}

/// `c[i][j][k] = ν_k([f_i, f_j])`, antisymmetric in (i, j).
pub fn structure_coefficients(fs: &FrameStructure, p: &[f64; 3]) -> Result<Coefficients> {
    frame_guard(fs, p)?;
    match fs.deriv {
        DerivMode::Analytic => Ok(coefficients_from_jets(&fs.frame.eval(&seed1(p)))),
        DerivMode::FiniteDifference => {
            let (m, d) = fs.jacobian(p);
            let jets = [0, 1, 2].map(|i| [0, 1, 2].map(|a| Jet { v: m[i][a], d: d[i][a] }));
            Ok(coefficients_from_jets(&jets))
        }
    }
}

fn chi_kappa_from(c: &[[[f64; 3]; 3]; 3], f1_c12: [f64; 2], f2_c12: [f64; 2]) -> (f64, f64) {
    let chi = (c[0][1][1].powi(2) + 0.25 * (c[0][1][2] + c[0][2][1]).powi(2)).sqrt();
    let kappa = f1_c12[1] - f2_c12[0] - c[1][2][1].powi(2) - c[1][2][2].powi(2) + 0.5 * (c[0][2][1] - c[0][1][2]);
    (chi, kappa)
}

/// Metric invariants (χ, κ) at `p`.
pub fn invariants_chi_kappa(fs: &FrameStructure, p: &[f64; 3]) -> Result<(f64, f64)> {
    let m = frame_guard(fs, p)?;
    match fs.deriv {
        DerivMode::Analytic => {
            let cj = coefficients_from_jets(&fs.frame.eval(&seed2(p)));
            let c = cj.map(|a| a.map(|b| b.map(|x| x.v)));
            // derivative of c12^k along f1 and f2
            let along = |i: usize, k: usize| linalg::dot(&cj[1][2][k].d, &m[i]);
            Ok(chi_kappa_from(&c, [along(1, 1), along(1, 2)], [along(2, 1), along(2, 2)]))
        }
        DerivMode::FiniteDifference => {
            let c = structure_coefficients(fs, p)?;
            let h = 1e-4;
            let mut dirs = [[0.0; 2]; 2];
            for (slot, i) in [1usize, 2].iter().enumerate() {
                let step = |t: f64| -> Result<[f64; 2]> {
                    let q = [p[0] + t * m[*i][0], p[1] + t * m[*i][1], p[2] + t * m[*i][2]];
                    let cq = structure_coefficients(fs, &q)?;
                    Ok([cq[1][2][1], cq[1][2][2]])
                };
                let (a, b, cc, d) = (step(2.0 * h)?, step(h)?, step(-h)?, step(-2.0 * h)?);
                for k in 0..2 {
                    dirs[slot][k] = (-a[k] + 8.0 * b[k] - 8.0 * cc[k] + d[k]) / (12.0 * h);
                }
            }
            Ok(chi_kappa_from(&c, dirs[0], dirs[1]))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub max: f64,
    pub worst_probe: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizationReport {
    /// |c12^0 + 1|
    pub c12_0: Violation,
    /// max(|c10^0|, |c20^0|)
    pub c10_c20: Violation,
    /// |c01^1 + c02^2|
    pub trace: Violation,
    pub probes: usize,
}

impl NormalizationReport {
    pub fn max_violation(&self) -> f64 {
        self.c12_0.max.max(self.c10_c20.max).max(self.trace.max)
    }
}

pub fn validate_normalization(fs: &FrameStructure, probes: &[[f64; 3]]) -> Result<NormalizationReport> {
    let empty = || Violation { max: 0.0, worst_probe: None };
    let mut rep = NormalizationReport { c12_0: empty(), c10_c20: empty(), trace: empty(), probes: probes.len() };
    let bump = |v: &mut Violation, x: f64, p: &[f64; 3]| {
        if v.worst_probe.is_none() || x > v.max {
            v.max = x;
            v.worst_probe = Some(*p);
        }
    };
    for p in probes {
        let c = structure_coefficients(fs, p)?;
        bump(&mut rep.c12_0, (c[1][2][0] + 1.0).abs(), p);
        bump(&mut rep.c10_c20, c[1][0][0].abs().max(c[2][0][0].abs()), p);
        bump(&mut rep.trace, (c[0][1][1] + c[0][2][2]).abs(), p);
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Models

#[derive(Clone, Debug)]
pub struct RadialModel {
    pub alpha: Profile,
    pub beta: Profile,
    pub r_max: f64,
}

impl RadialModel {
    pub fn gamma(&self, r: f64) -> f64 {
        self.alpha.eval(r) * self.beta.deriv(r) - self.beta.eval(r) * self.alpha.deriv(r)
    }
}

/// Cartesian frame {f0, e1, e2} of a radial model, (e1, e2) being (N, JN)
/// rotated back by the polar angle.
pub fn radial_to_frame(m: &RadialModel) -> Result<FrameStructure> {
    let n = 400;
    for k in 1..=n {
        let r = m.r_max.min(20.0) * k as f64 / n as f64;
        let g = m.gamma(r);
        if !(g / r > 0.0) {
            return Err(Error::ContactViolation { r });
        }
    }
    let rf = RadialFrame::new(m.alpha.clone(), m.beta.clone(), m.r_max)?;
    Ok(FrameStructure::new("radial", Frame::Radial(Arc::new(rf))))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KContactModel {
    pub kappa: f64,
}

impl KContactModel {
    /// Frame satisfying [f1,f2] = −f0, [f1,f0] = κ f2, [f2,f0] = −κ f1.
    pub fn frame(&self) -> Result<FrameStructure> {
        let k = self.kappa;
        if !k.is_finite() {
            return Err(Error::Invalid("kappa must be finite".into()));
        }
        let frame = if k > 0.0 {
            Frame::Sphere { kappa: k }
        } else if k == 0.0 {
            Frame::Heisenberg
        } else {
            let c = (-k).sqrt();
            let beta = Profile::expr(&format!("(cosh({c}*r) - 1)/{}", -k))?;
            let rf = RadialFrame::new(Profile::Poly(vec![1.0]), beta, f64::INFINITY)?;
            Frame::Rotated { base: Box::new(Frame::Radial(Arc::new(rf))), angle: 0.0, rate: k }
        };
        Ok(FrameStructure::new(format!("kcontact({k})"), frame))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitRange {
    Interval { z0: f64, z1: f64 },
    Circle { period: f64 },
}

/// A piece of Reeb orbit: base point, parameter range, and the trivializing
/// coframe along it. The coframe is the dual of (f1, f2) rotated by the angle
/// `twist * z`; `twist = 0` uses the structure's own frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReebOrbitSpec {
    pub base: [f64; 3],
    pub range: OrbitRange,
    pub twist: f64,
}

impl ReebOrbitSpec {
    pub fn interval(base: [f64; 3], z0: f64, z1: f64) -> Self {
        ReebOrbitSpec { base, range: OrbitRange::Interval { z0, z1 }, twist: 0.0 }
    }

    /// Uniform grid of `n` orbit parameters (periodic ranges wrap).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(1);
        match self.range {
            OrbitRange::Interval { z0, z1 } => {
                if n == 1 {
                    vec![0.5 * (z0 + z1)]
                } else {
                    (0..n).map(|i| z0 + (z1 - z0) * i as f64 / (n - 1) as f64).collect()
                }
            }
            OrbitRange::Circle { period } => (0..n).map(|i| period * i as f64 / n as f64).collect(),
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        match self.range {
            OrbitRange::Interval { z0, z1 } => z >= z0 - 1e-12 && z <= z1 + 1e-12,
            OrbitRange::Circle { .. } => z.is_finite(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ModelKind {
    Frame,
    Radial(RadialModel),
    KContact(KContactModel),
    Perturbed { eps: f64 },
}

/// A structure together with its default Reeb orbit.
#[derive(Clone, Debug)]
pub struct StructureSpec {
    pub id: String,
    pub kind: ModelKind,
    pub frame: FrameStructure,
    pub orbit: ReebOrbitSpec,
}

impl StructureSpec {
    pub fn heisenberg() -> StructureSpec {
        StructureSpec {
            id: "heisenberg".into(),
            kind: ModelKind::KContact(KContactModel { kappa: 0.0 }),
            frame: FrameStructure::new("heisenberg", Frame::Heisenberg),
            orbit: ReebOrbitSpec::interval([0.0; 3], -1.0, 1.0),
        }
    }

    /// α = cos(r²/2), β = sin(r²/2).
    pub fn overtwisted() -> StructureSpec {
        let model = RadialModel {
            alpha: Profile::Trig { sine: false, amp: 1.0, freq: 0.5, phase: 0.0 },
            beta: Profile::Trig { sine: true, amp: 1.0, freq: 0.5, phase: 0.0 },
            r_max: f64::INFINITY,
        };
        let rf = RadialFrame::new(model.alpha.clone(), model.beta.clone(), model.r_max).expect("overtwisted profiles");
        StructureSpec {
            id: "overtwisted".into(),
            kind: ModelKind::Radial(model),
            frame: FrameStructure::new("overtwisted", Frame::Radial(Arc::new(rf))),
            orbit: ReebOrbitSpec::interval([0.0; 3], -1.0, 1.0),
        }
    }

    pub fn kcontact(kappa: f64) -> Result<StructureSpec> {
        let model = KContactModel { kappa };
        let frame = model.frame()?;
        let orbit = if kappa > 0.0 {
            // base at u = −k; the interval keeps the orbit inside the chart
            let half = PI / (2.0 * kappa);
            ReebOrbitSpec::interval([0.0, 0.0, -1.0], -half, half)
        } else {
            ReebOrbitSpec::interval([0.0; 3], -1.0, 1.0)
        };
        Ok(StructureSpec { id: format!("kcontact(kappa={kappa})"), kind: ModelKind::KContact(model), frame, orbit })
    }

    pub fn radial(model: RadialModel) -> Result<StructureSpec> {
        let frame = radial_to_frame(&model)?;
        let half = 1.0;
        Ok(StructureSpec {
            id: "radial".into(),
            kind: ModelKind::Radial(model),
            frame,
            orbit: ReebOrbitSpec::interval([0.0; 3], -half, half),
        })
    }

    pub fn perturbed(eps: f64) -> StructureSpec {
        StructureSpec {
            id: format!("perturbed(eps={eps})"),
            kind: ModelKind::Perturbed { eps },
            frame: FrameStructure::new("perturbed", Frame::Perturbed { eps }),
            orbit: ReebOrbitSpec::interval([0.0; 3], -1.0, 1.0),
        }
    }

    pub fn from_frame(fs: FrameStructure, orbit: ReebOrbitSpec) -> StructureSpec {
        StructureSpec { id: fs.label.clone(), kind: ModelKind::Frame, frame: fs, orbit }
    }

    /// Injectivity radius of the default orbit when known in closed form.
    pub fn analytic_r_inj(&self) -> Option<f64> {
        match &self.kind {
            ModelKind::Frame => None,
            ModelKind::Radial(_) | ModelKind::Perturbed { .. } => Some(f64::INFINITY),
            ModelKind::KContact(k) => Some(if k.kappa > 0.0 { PI / k.kappa.sqrt() } else { f64::INFINITY }),
        }
    }

    /// Canonical curvatures (R_a, R_c) when constant and known.
    pub fn constant_curvatures(&self) -> Option<(f64, f64)> {
        match &self.kind {
            ModelKind::KContact(k) => Some((k.kappa, 0.0)),
            _ => None,
        }
    }

    /// Probe points for validation: a small cylinder around the default orbit.
    pub fn probe_points(&self, n: usize) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(n);
        let rmax = match &self.kind {
            ModelKind::Radial(m) => m.r_max.min(3.0),
            ModelKind::KContact(k) if k.kappa > 0.0 => 0.6,
            _ => 3.0,
        };
        let b = self.orbit.base;
        for i in 0..n {
            // deterministic low-discrepancy points
            let u = (i as f64 * 0.618_033_988_749_895).fract();
            let v = (i as f64 * 0.754_877_666_246_693).fract();
            let w = (i as f64 * 0.569_840_290_998_053).fract();
            let r = 0.1 + (rmax - 0.1) * u;
            let th = 2.0 * PI * v;
            out.push([b[0] + r * th.cos(), b[1] + r * th.sin(), b[2] + (2.0 * w - 1.0) * 0.5]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &Coefficients, b: &Coefficients) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m = m.max((a[i][j][k] - b[i][j][k]).abs());
                }
            }
        }
        m
    }

    #[test]
    fn heisenberg_coefficients() {
        let s = StructureSpec::heisenberg();
        let c = structure_coefficients(&s.frame, &[0.3, -1.2, 4.0]).unwrap();
        let mut want = [[[0.0; 3]; 3]; 3];
        want[1][2][0] = -1.0;
        want[2][1][0] = 1.0;
        assert!(max_abs_diff(&c, &want) < 1e-14);
        let (chi, kappa) = invariants_chi_kappa(&s.frame, &[0.3, -1.2, 4.0]).unwrap();
        assert!(chi.abs() < 1e-14 && kappa.abs() < 1e-14);
    }

    #[test]
    fn kcontact_frames_have_kframe_coefficients() {
        for &k in &[1.0, 0.25, -1.0, -0.3] {
            let s = StructureSpec::kcontact(k).unwrap();
            for p in [[0.1, 0.2, -0.7], [0.4, -0.3, -1.2], [0.0, 0.0, -1.0]] {
                let c = structure_coefficients(&s.frame, &p).unwrap();
                assert!((c[2][1][0] - 1.0).abs() < 1e-12, "k={k} {c:?}");
                assert!((c[1][0][2] - k).abs() < 1e-12, "k={k} {c:?}");
                assert!((c[2][0][1] + k).abs() < 1e-12, "k={k} {c:?}");
                let (chi, kap) = invariants_chi_kappa(&s.frame, &p).unwrap();
                assert!(chi.abs() < 1e-10 && (kap - k).abs() < 1e-9, "k={k}: chi={chi} kappa={kap}");
            }
        }
    }

    #[test]
    fn overtwisted_invariants() {
        let s = StructureSpec::overtwisted();
        for &r in &[0.05, 0.2, 1.0, 2.5] {
            let p = [r * 0.6, r * 0.8, 0.3];
            let (chi, kappa) = invariants_chi_kappa(&s.frame, &p).unwrap();
            // polar frame: [f1,f0] = r² f2, [f2,f0] = 0
            assert!((chi - r * r / 2.0).abs() < 1e-10, "r={r} chi={chi}");
            assert!((kappa - r * r / 2.0).abs() < 1e-10, "r={r} kappa={kappa}");
        }
    }

    #[test]
    fn finite_difference_mode_agrees_with_analytic() {
        let mut s = StructureSpec::overtwisted();
        let p = [0.7, -0.4, 0.1];
        let exact = structure_coefficients(&s.frame, &p).unwrap();
        let (chi_a, k_a) = invariants_chi_kappa(&s.frame, &p).unwrap();
        s.frame.deriv = DerivMode::FiniteDifference;
        let fd = structure_coefficients(&s.frame, &p).unwrap();
        assert!(max_abs_diff(&exact, &fd) < 1e-9);
        let (chi_f, k_f) = invariants_chi_kappa(&s.frame, &p).unwrap();
        assert!((chi_a - chi_f).abs() < 1e-7 && (k_a - k_f).abs() < 1e-6);
    }

    #[test]
    fn scaled_reeb_field_is_reported() {
        let fs = FrameStructure::from_expressions("scaled", [["0", "0", "2"], ["1", "0", "y/2"], ["0", "1", "-x/2"]]).unwrap();
        let probes = [[0.1, 0.2, 0.3], [1.0, -1.0, 0.0]];
        let rep = validate_normalization(&fs, &probes).unwrap();
        assert!((rep.c12_0.max - 0.5).abs() < 1e-14);
        assert!(rep.c10_c20.max < 1e-14 && rep.trace.max < 1e-14);
    }

    #[test]
    fn singular_frame_is_rejected() {
        let fs = FrameStructure::from_expressions("degenerate", [["0", "0", "1"], ["1", "0", "0"], ["1", "0", "0"]]).unwrap();
        assert!(matches!(structure_coefficients(&fs, &[0.0; 3]), Err(Error::FrameSingular { .. })));
    }

    #[test]
    fn contact_violation_detected() {
        // γ = β′ changes sign at r = π
        let m = RadialModel { alpha: Profile::Poly(vec![1.0]), beta: Profile::expr("1 - cos(r)").unwrap(), r_max: 4.0 };
        assert!(matches!(radial_to_frame(&m), Err(Error::ContactViolation { .. })));
    }

    #[test]
    fn perturbed_model_is_normalized() {
        let s = StructureSpec::perturbed(0.01);
        let rep = validate_normalization(&s.frame, &s.probe_points(60)).unwrap();
        assert!(rep.max_violation() < 1e-10, "{rep:?}");
        // also through the axis
        let rep = validate_normalization(&s.frame, &[[0.0, 0.0, 0.0], [1e-3, -2e-3, 0.5]]).unwrap();
        assert!(rep.max_violation() < 1e-10);
    }

    #[test]
    fn rotation_leaves_invariants_unchanged() {
        let base = StructureSpec::perturbed(0.05);
        let rot = FrameStructure::new("rot", Frame::Rotated { base: Box::new(base.frame.frame.clone()), angle: 0.9, rate: 0.0 });
        for p in [[0.3, 0.4, 0.0], [1.1, -0.5, 2.0]] {
            let a = invariants_chi_kappa(&base.frame, &p).unwrap();
            let b = invariants_chi_kappa(&rot, &p).unwrap();
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }
}

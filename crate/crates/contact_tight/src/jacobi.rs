//! Contact Jacobi curves: ω_r evaluated on the θ- and z-variations along a
//! geodesic leaving the Reeb orbit, the angle φ, singular and focal radii,
//! and Schwarzian derivatives.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, omega_pair, taylor_state, taylor_state3, taylor_state4, Trajectory, STATE_DIM};
use crate::ode::IntegratorConfig;
use crate::report::fmt_num;
use crate::roots::{sampled_zeros, Zero};
use crate::scalar::Series;
use crate::structures::{Frame, ReebOrbitSpec, StructureSpec};
use crate::sturm::{r_star, BoundFit};

/// Taylor order of the expansion at r = 0 used for the regularized Schwarzian.
const AXIS_N: usize = 16;
/// Below this radius the regularized Schwarzian comes from the axis expansion.
pub const AXIS_RADIUS: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceConfig {
    pub samples_per_unit: usize,
    pub refine_factor: usize,
    pub refine_radius: f64,
    pub integrator: IntegratorConfig,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { samples_per_unit: 2048, refine_factor: 8, refine_radius: 0.05, integrator: IntegratorConfig::default() }
    }
}

/// Values and first three r-derivatives of (wθ, wz) at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceJet {
    pub r: f64,
    pub w_theta: [f64; 4],
    pub w_z: [f64; 4],
}

impl TraceJet {
    fn from_series(r: f64, wt: &Series<4>, wz: &Series<4>) -> TraceJet {
        TraceJet { r, w_theta: [0, 1, 2, 3].map(|k| wt.deriv_at(k)), w_z: [0, 1, 2, 3].map(|k| wz.deriv_at(k)) }
    }

    /// a = wz ẇθ − wθ ẇz.
    pub fn a(&self) -> f64 {
        let (t, z) = (&self.w_theta, &self.w_z);
        z[0] * t[1] - t[0] * z[1]
    }

    pub fn a_dot(&self) -> f64 {
        let (t, z) = (&self.w_theta, &self.w_z);
        z[0] * t[2] - t[0] * z[2]
    }

    pub fn a_ddot(&self) -> f64 {
        let (t, z) = (&self.w_theta, &self.w_z);
        z[1] * t[2] + z[0] * t[3] - t[1] * z[2] - t[0] * z[3]
    }

    /// φ' = a / (wθ² + wz²).
    pub fn phi_dot(&self) -> f64 {
        self.a() / (self.w_theta[0].powi(2) + self.w_z[0].powi(2))
    }

    /// Homogeneous coordinate v (wθ/wz or its reciprocal, whichever has the
    /// larger denominator) with its derivatives.
    pub fn v_series(&self) -> Series<4> {
        let fact = [1.0, 1.0, 2.0, 6.0];
        let t = Series { c: [0, 1, 2, 3].map(|k| self.w_theta[k] / fact[k]) };
        let z = Series { c: [0, 1, 2, 3].map(|k| self.w_z[k] / fact[k]) };
        if self.w_z[0].abs() >= self.w_theta[0].abs() {
            t / z
        } else {
            z / t
        }
    }

    /// Schwarzian 𝒮(v) = v⃛/v̇ − (3/2)(v̈/v̇)².
    pub fn schwarzian(&self) -> Result<f64> {
        schwarzian_of(&self.v_series(), self.r)
    }

    /// Adapted-frame coefficients (A, B) with ½S = B − Ȧ/2 − A²/4.
    pub fn frame_coefficients(&self) -> (f64, f64, f64) {
        let (t, z) = (&self.w_theta, &self.w_z);
        let a = self.a();
        let na = t[0] * z[2] - z[0] * t[2];
        let na_dot = t[1] * z[2] + t[0] * z[3] - z[1] * t[2] - z[0] * t[3];
        let big_a = na / a;
        let big_b = -(t[1] * z[2] - z[1] * t[2]) / a;
        // ȧ = −N_A
        let a_dot_coef = na_dot / a + na * na / (a * a);
        (big_a, big_b, a_dot_coef)
    }

    /// Schwarzian from the adapted-frame formula.
    pub fn schwarzian_frame(&self) -> f64 {
        let (a, b, ad) = self.frame_coefficients();
        2.0 * (b - 0.5 * ad - 0.25 * a * a)
    }
}

/// 𝒮 of a series given its derivatives at the expansion point.
pub fn schwarzian_of(v: &Series<4>, r: f64) -> Result<f64> {
    let (v1, v2, v3) = (v.deriv_at(1), v.deriv_at(2), v.deriv_at(3));
    if !(v1.abs() > 1e-300) {
        return Err(Error::ImmersionFailure { r });
    }
    Ok(v3 / v1 - 1.5 * (v2 / v1).powi(2))
}

/// Sampled contact Jacobi curve along one geodesic.
#[derive(Clone, Debug)]
pub struct JacobiTrace {
    pub z: f64,
    pub theta: f64,
    pub r: Vec<f64>,
    pub w_theta: Vec<f64>,
    pub w_z: Vec<f64>,
    pub dw_theta: Vec<f64>,
    pub dw_z: Vec<f64>,
    pub ddw_theta: Vec<f64>,
    pub ddw_z: Vec<f64>,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    /// Largest radius covered (r_max or the domain exit).
    pub horizon: f64,
    pub exit: Option<f64>,
    frame: Frame,
    traj: Trajectory,
    axis_wt: Series<AXIS_N>,
    axis_wz: Series<AXIS_N>,
    axis_sreg: Series<AXIS_N>,
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Regularized Schwarzian S + 3/(2r²) as a series at r = 0, written through
/// g = v̇/r: S_reg = g″/g − g′/(r g) − (3/2)(g′/g)².
fn axis_sreg(wt: &Series<AXIS_N>, wz: &Series<AXIS_N>) -> Series<AXIS_N> {
    let v = *wt / *wz;
    let g = v.derivative().shift_down(1);
    let g1 = g.derivative();
    let g2 = g1.derivative();
    let q = g1 / g;
    g2 / g - g1.shift_down(1) / g - q * q * 1.5
}

impl JacobiTrace {
    /// Exact jet at radius r (Taylor mode at the interpolated state).
    pub fn jet(&self, r: f64) -> TraceJet {
        if r == 0.0 {
            let fact = |k: usize| [1.0, 1.0, 2.0, 6.0][k];
            return TraceJet {
                r,
                w_theta: [0, 1, 2, 3].map(|k| self.axis_wt.c[k] * fact(k)),
                w_z: [0, 1, 2, 3].map(|k| self.axis_wz.c[k] * fact(k)),
            };
        }
        let y = self.state(r);
        let ys = taylor_state4(&self.frame, &y);
        let (wt, wz) = omega_pair(&self.frame, &ys);
        TraceJet::from_series(r, &wt, &wz)
    }

    /// Values and first two derivatives of (wθ, wz); the third slot is NaN.
    pub fn jet2(&self, r: f64) -> TraceJet {
        if r == 0.0 {
            return self.jet(0.0);
        }
        let y = self.state(r);
        let ys = taylor_state3(&self.frame, &y);
        let (wt, wz) = omega_pair(&self.frame, &ys);
        let d = |s: &Series<3>| [s.c[0], s.c[1], 2.0 * s.c[2], f64::NAN];
        TraceJet { r, w_theta: d(&wt), w_z: d(&wz) }
    }

    fn state(&self, r: f64) -> [f64; STATE_DIM] {
        let mut y = [0.0; STATE_DIM];
        self.traj.sol.eval_into(r, &mut y);
        y
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    /// (wθ, wz) at radius r.
    pub fn w(&self, r: f64) -> (f64, f64) {
        if r < 1e-3 {
            return (self.axis_wt.eval(r), self.axis_wz.eval(r));
        }
        omega_pair(&self.frame, &self.state(r))
    }

    fn nearest(&self, r: f64) -> usize {
        match self.r.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.r.len() => self.r.len() - 1,
            Err(i) => {
                if r - self.r[i - 1] < self.r[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Unwrapped angle φ = atan2(wθ, wz) continued from the nearest sample.
    pub fn phi_at(&self, r: f64) -> f64 {
        let k = self.nearest(r);
        let (wt, wz) = self.w(r);
        self.phi[k] + wrap(wt.atan2(wz) - self.phi[k])
    }

    /// Regularized Schwarzian S + 3/(2r²) and S itself.
    pub fn schwarzian_at(&self, r: f64) -> Result<(f64, f64)> {
        if r <= 0.0 {
            return Ok((f64::NEG_INFINITY, self.axis_sreg.c[0]));
        }
        if r < AXIS_RADIUS {
            let s_reg = self.axis_sreg.eval(r);
            return Ok((s_reg - 1.5 / (r * r), s_reg));
        }
        let s = self.jet(r).schwarzian()?;
        Ok((s, s + 1.5 / (r * r)))
    }

    /// Taylor coefficients of (wθ, wz) at r = 0.
    pub fn axis_jet(&self) -> (&[f64], &[f64]) {
        (&self.axis_wt.c, &self.axis_wz.c)
    }
}

fn fill_samples(t: &mut JacobiTrace, rs: Vec<f64>) {
    let n = rs.len();
    t.w_theta = Vec::with_capacity(n);
    t.w_z = Vec::with_capacity(n);
    t.dw_theta = Vec::with_capacity(n);
    t.dw_z = Vec::with_capacity(n);
    t.ddw_theta = Vec::with_capacity(n);
    t.ddw_z = Vec::with_capacity(n);
    t.a = Vec::with_capacity(n);
    t.phi = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &r in &rs {
        let j = t.jet2(r);
        t.w_theta.push(j.w_theta[0]);
        t.w_z.push(j.w_z[0]);
        t.dw_theta.push(j.w_theta[1]);
        t.dw_z.push(j.w_z[1]);
        t.ddw_theta.push(j.w_theta[2]);
        t.ddw_z.push(j.w_z[2]);
        t.a.push(j.a());
        let ph = prev + wrap(j.w_theta[0].atan2(j.w_z[0]) - prev);
        t.phi.push(ph);
        prev = ph;
    }
    t.r = rs;
}

fn uniform_grid(horizon: f64, per_unit: usize) -> Vec<f64> {
    let n = ((horizon * per_unit as f64).ceil() as usize).max(2);
    (0..=n).map(|k| horizon * k as f64 / n as f64).collect()
}

/// Trace (wθ, wz) along the geodesic with initial covector at angle θ over γ(z).
pub fn jacobi_trace(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, theta: f64, r_max: f64, cfg: &TraceConfig) -> Result<JacobiTrace> {
    if !(r_max > 0.0) || cfg.samples_per_unit == 0 {
        return Err(Error::Invalid("r_max and sampling density must be positive".into()));
    }
    let v0 = flow::initial_variation(s, orbit, z, theta)?;
    let y0 = v0.to_array();
    let frame = s.frame.frame.clone();
    let traj = flow::integrate_state(&s.frame, &y0, r_max, &cfg.integrator)?;
    let horizon = traj.r_end();
    let ys = taylor_state::<AXIS_N>(&frame, &y0);
    let (axis_wt, axis_wz) = omega_pair(&frame, &ys);
    let axis_sreg = axis_sreg(&axis_wt, &axis_wz);
    let mut t = JacobiTrace {
        z,
        theta,
        r: Vec::new(),
        w_theta: Vec::new(),
        w_z: Vec::new(),
        dw_theta: Vec::new(),
        dw_z: Vec::new(),
        ddw_theta: Vec::new(),
        ddw_z: Vec::new(),
        phi: Vec::new(),
        a: Vec::new(),
        horizon,
        exit: traj.exit,
        frame,
        traj,
        axis_wt,
        axis_wz,
        axis_sreg,
    };
    fill_samples(&mut t, uniform_grid(horizon, cfg.samples_per_unit));

    // refine near roots of wθ, wz, a and crossings of φ through multiples of π
    if cfg.refine_factor > 1 {
        let mut marks: Vec<f64> = Vec::new();
        let n = t.r.len();
        for k in 1..n - 1 {
            let ch = |v: &Vec<f64>| v[k] == 0.0 || v[k].signum() != v[k + 1].signum();
            let pk = (t.phi[k] / PI).floor() != (t.phi[k + 1] / PI).floor();
            if ch(&t.w_theta) || ch(&t.w_z) || ch(&t.a) || pk {
                marks.push(t.r[k]);
            }
        }
        if !marks.is_empty() {
            let h = t.r[1] - t.r[0];
            let fine = h / cfg.refine_factor as f64;
            let mut rs = t.r.clone();
            for m in &marks {
                let lo = (m - cfg.refine_radius).max(0.0);
                let hi = (m + cfg.refine_radius).min(horizon);
                let mut x = lo;
                while x < hi {
                    rs.push(x);
                    x += fine;
                }
            }
            rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            rs.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * fine);
            fill_samples(&mut t, rs);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SingularRadius {
    Found { r: f64 },
    NotFound { horizon: f64 },
}

impl SingularRadius {
    pub fn value(&self) -> Option<f64> {
        match self {
            SingularRadius::Found { r } => Some(*r),
            SingularRadius::NotFound { .. } => None,
        }
    }
}

const ROOT_TOL: f64 = 1e-12;

fn level_crossings(t: &JacobiTrace, level: f64) -> Vec<Zero> {
    let vs: Vec<f64> = t.phi.iter().map(|p| p - level).collect();
    sampled_zeros(&t.r[1..], &vs[1..], |r| t.phi_at(r) - level, |r| t.jet2(r).phi_dot(), ROOT_TOL, 1e-10)
}

/// First r > 0 with φ(r) = π.
pub fn first_singular_radius(t: &JacobiTrace) -> SingularRadius {
    match level_crossings(t, PI).first() {
        Some(z) => SingularRadius::Found { r: z.t },
        None => SingularRadius::NotFound { horizon: t.horizon },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocalRadius {
    pub r: f64,
    /// Observed vanishing order of a at r (3 means at least 3).
    pub order: u8,
}

/// Zeros of a on (0, horizon] with their observed vanishing order.
pub fn focal_radii(t: &JacobiTrace) -> Vec<FocalRadius> {
    let zs = sampled_zeros(&t.r[1..], &t.a[1..], |r| t.jet2(r).a(), |r| t.jet2(r).a_dot(), ROOT_TOL, 1e-9);
    zs.into_iter()
        .map(|z| {
            let j = t.jet(z.t);
            let order = if j.a_dot().abs() > 1e-6 {
                1
            } else if j.a_ddot().abs() > 1e-6 {
                2
            } else {
                3
            };
            FocalRadius { r: z.t, order }
        })
        .collect()
}

/// All crossings of φ through nonzero multiples of π, as (k, r).
pub fn singular_crossings(t: &JacobiTrace) -> Vec<(i64, f64)> {
    let (lo, hi) = t.phi.iter().fold((0.0f64, 0.0f64), |(a, b), &p| (a.min(p), b.max(p)));
    let mut out = Vec::new();
    let kmin = (lo / PI).floor() as i64;
    let kmax = (hi / PI).ceil() as i64;
    for k in kmin..=kmax {
        if k == 0 {
            continue;
        }
        for z in level_crossings(t, k as f64 * PI) {
            out.push((k, z.t));
        }
    }
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InitialJet {
    /// (wθ, ẇθ, ẅθ, w⃛θ, wz, ẇz) at r = 0.
    pub values: [f64; 6],
    pub deviation: [f64; 6],
    pub max_deviation: f64,
}

pub const EXPECTED_JET: [f64; 6] = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0];

pub fn check_initial_jet(t: &JacobiTrace) -> InitialJet {
    let (wt, wz) = t.axis_jet();
    let values = [wt[0], wt[1], 2.0 * wt[2], 6.0 * wt[3], wz[0], wz[1]];
    let deviation = [0, 1, 2, 3, 4, 5].map(|i| values[i] - EXPECTED_JET[i]);
    let max_deviation = deviation.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    InitialJet { values, deviation, max_deviation }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SchwarzianSample {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// S + 3/(2r²).
    pub s_reg: Vec<f64>,
}

fn window_radii(t: &JacobiTrace, window: (f64, f64)) -> Vec<f64> {
    let focal: Vec<f64> = focal_radii(t).iter().map(|f| f.r).collect();
    t.r.iter()
        .copied()
        .filter(|&r| r > 0.0 && r >= window.0 && r <= window.1)
        .filter(|r| focal.iter().all(|f| (r - f).abs() > 1e-4))
        .collect()
}

/// Schwarzian of the homogeneous coordinate on the trace grid within `window`
/// (samples within 1e-4 of a focal radius are skipped).
pub fn schwarzian_numeric(t: &JacobiTrace, window: (f64, f64)) -> Result<SchwarzianSample> {
    let mut out = SchwarzianSample::default();
    for r in window_radii(t, window) {
        let (s, s_reg) = t.schwarzian_at(r)?;
        out.r.push(r);
        out.s.push(s);
        out.s_reg.push(s_reg);
    }
    Ok(out)
}

/// Schwarzian from the adapted-frame identity ½S = B − Ȧ/2 − A²/4.
pub fn schwarzian_frame_formula(t: &JacobiTrace, window: (f64, f64)) -> Result<SchwarzianSample> {
    let mut out = SchwarzianSample::default();
    for r in window_radii(t, window) {
        let j = t.jet(r);
        if j.a().abs() < 1e-300 {
            return Err(Error::ImmersionFailure { r });
        }
        let s = j.schwarzian_frame();
        out.r.push(r);
        out.s.push(s);
        out.s_reg.push(s + 1.5 / (r * r));
    }
    Ok(out)
}

/// Result of fitting ½S ≤ −3/(4r²) + k₁r + k₂r² over sampled covectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchwarzianFit {
    pub k1: f64,
    pub k2: f64,
    pub r_star: f64,
    pub points: usize,
    pub samples: usize,
}

impl SchwarzianFit {
    pub fn bound(&self) -> BoundFit {
        BoundFit::Schwarzian { k1: self.k1, k2: self.k2 }
    }
}

/// The constraint reads h(r) = ½S_reg(r)/r ≤ k₁ + k₂ r. Candidate pairs are the
/// lines through consecutive vertices of the upper convex hull of the pooled
/// points (r, h), each tight at two samples; the pair with the largest r*
/// wins, ties broken by the smallest (k₂, k₁).
pub fn fit_schwarzian_bound(samples: &[SchwarzianSample], r_range: (f64, f64)) -> Result<SchwarzianFit> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for s in samples {
        for (r, g) in s.r.iter().zip(&s.s_reg) {
            if *r >= r_range.0 && *r <= r_range.1 && r.is_finite() && g.is_finite() {
                pts.push((*r, 0.5 * g / r));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Invalid("no Schwarzian samples inside the fit range".into()));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // upper hull, left to right
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts.iter().copied() {
        if let Some(last) = hull.last() {
            if (p.0 - last.0).abs() < 1e-15 {
                if p.1 > last.1 {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let snap = |k: f64| if k.abs() < 1e-8 { 0.0 } else { k };
    let mut cands: Vec<(f64, f64)> = Vec::new();
    if hull.len() == 1 {
        cands.push((hull[0].1, 0.0));
    }
    for w in hull.windows(2) {
        let k2 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let k1 = w[0].1 - k2 * w[0].0;
        cands.push((snap(k1), snap(k2)));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for (k1, k2) in cands {
        let rs = r_star(k1, k2);
        let better = match best {
            None => true,
            Some((b1, b2, brs)) => {
                let same = rs == brs || (rs - brs).abs() <= 1e-12 * rs.abs().max(1.0);
                if same {
                    (k2, k1) < (b2, b1)
                } else {
                    rs > brs
                }
            }
        };
        if better {
            best = Some((k1, k2, rs));
        }
    }
    let (k1, k2, rs) = best.expect("at least one candidate");
    Ok(SchwarzianFit { k1, k2, r_star: rs, points: pts.len(), samples: samples.len() })
}

/// CSV with columns r,w_theta,w_z,phi,a,S,S_reg.
pub fn write_trace_csv<W: Write>(t: &JacobiTrace, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    writeln!(out, "r,w_theta,w_z,phi,a,S,S_reg").map_err(io)?;
    for k in 0..t.r.len() {
        let r = t.r[k];
        let (s, s_reg) = if r > 0.0 && t.a[k].abs() > 1e-12 {
            t.schwarzian_at(r).unwrap_or((f64::NAN, f64::NAN))
        } else if r == 0.0 {
            (f64::NAN, t.schwarzian_at(0.0).map(|x| x.1).unwrap_or(f64::NAN))
        } else {
            (f64::NAN, f64::NAN)
        };
        let row = [r, t.w_theta[k], t.w_z[k], t.phi[k], t.a[k], s, s_reg].map(fmt_num);
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

/// CSV with columns r,x,y,z,p1,p2,p3,h0,h1,h2 at the trace radii.
pub fn write_trajectory_csv<W: Write>(s: &StructureSpec, t: &JacobiTrace, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    writeln!(out, "r,x,y,z,p1,p2,p3,h0,h1,h2").map_err(io)?;
    for &r in &t.r {
        let x = t.trajectory().phase(r);
        let h = x.h(&s.frame);
        writeln!(out, "{},{},{},{},{},{},{},{},{},{}", r, x.q[0], x.q[1], x.q[2], x.p[0], x.p[1], x.p[2], h[0], h[1], h[2]).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> TraceConfig {
        TraceConfig { samples_per_unit: 64, ..Default::default() }
    }

    #[test]
    fn heisenberg_trace_is_quadratic() {
        let s = StructureSpec::heisenberg();
        let t = jacobi_trace(&s, &s.orbit, 0.0, 0.7, 4.0, &coarse()).unwrap();
        for k in 0..t.r.len() {
            let r = t.r[k];
            assert!((t.w_theta[k] - r * r / 2.0).abs() < 1e-9 * (1.0 + r * r));
            assert!((t.w_z[k] - 1.0).abs() < 1e-9);
        }
        let j = t.jet(1.3);
        let (a, b, _) = j.frame_coefficients();
        assert!((a + 1.0 / 1.3).abs() < 1e-8 && b.abs() < 1e-8);
    }

    #[test]
    fn wrap_is_principal() {
        assert!((wrap(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
    }
}

//! u″ + q u = 0 with q = −3/(4t²) + q̃: first zeros of the solution vanishing
//! at 0, Sturm–Picone interlacing, and the comparison radius r*(k₁, k₂).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::SchwarzianSample;
use crate::ode::{self, Control, IntegratorConfig};
use crate::roots::brent;
use crate::structures::Spline;

/// Default start of the integration away from the singular point.
pub const SEED_EPS: f64 = 1e-6;

/// Regular part q̃ of the potential.
#[derive(Clone)]
pub struct SingularPotential {
    q_reg: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub label: String,
}

impl fmt::Debug for SingularPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SingularPotential({})", self.label)
    }
}

impl SingularPotential {
    pub fn new(label: impl Into<String>, q_reg: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SingularPotential { q_reg: Arc::new(q_reg), label: label.into() }
    }

    /// q̃ = k₁t + k₂t².
    pub fn comparison(k1: f64, k2: f64) -> Self {
        Self::new(format!("{k1}t+{k2}t^2"), move |t| k1 * t + k2 * t * t)
    }

    /// q̃ = Σ c_k t^k.
    pub fn polynomial(c: Vec<f64>) -> Self {
        Self::new(format!("poly{c:?}"), move |t| c.iter().rev().fold(0.0, |acc, ck| acc * t + ck))
    }

    pub fn regular(&self, t: f64) -> f64 {
        (self.q_reg)(t)
    }

    pub fn total(&self, t: f64) -> f64 {
        -0.75 / (t * t) + self.regular(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FirstZero {
    Found { t: f64 },
    NotFound { horizon: f64 },
}

impl FirstZero {
    pub fn value(&self) -> Option<f64> {
        match self {
            FirstZero::Found { t } => Some(*t),
            FirstZero::NotFound { .. } => None,
        }
    }
}

fn sturm_cfg() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-12, atol: 1e-14, max_step: 0.02, dense: true, max_steps: 5_000_000 }
}

/// Seed of the branch u ~ t^{3/2}.
fn seed_regular(eps: f64) -> [f64; 2] {
    [eps.powf(1.5), 1.5 * eps.sqrt()]
}

/// Seed of the branch u ~ t^{−1/2}.
fn seed_singular(eps: f64) -> [f64; 2] {
    [eps.powf(-0.5), -0.5 * eps.powf(-1.5)]
}

/// Integrate (u, u′) from `eps` to `t_end`; returns the dense solution and
/// every zero of u found on the way (all of them when `all`, else the first).
fn zeros_from(q: &SingularPotential, eps: f64, y0: [f64; 2], t_end: f64, all: bool) -> Result<Vec<f64>> {
    let mut last_u = y0[0];
    let mut brackets = Vec::new();
    let mut prev_t = eps;
    let sol = ode::integrate(
        |t, y, dy| {
            dy[0] = y[1];
            dy[1] = -q.total(t) * y[0];
        },
        eps,
        &y0,
        t_end,
        &sturm_cfg(),
        |t, y| {
            let changed = y[0] == 0.0 || y[0].signum() != last_u.signum();
            if changed {
                brackets.push((prev_t, t));
            }
            last_u = y[0];
            prev_t = t;
            if changed && !all {
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    Ok(brackets.into_iter().filter_map(|(a, b)| brent(|t| sol.eval(t)[0], a, b, 1e-13)).collect())
}

/// First zero of the solution with u(0) = 0, seeded at `eps`.
pub fn singular_first_zero_eps(q: &SingularPotential, t_max: f64, eps: f64) -> Result<FirstZero> {
    if !(t_max > eps) {
        return Err(Error::Invalid("horizon must exceed the seed point".into()));
    }
    Ok(match zeros_from(q, eps, seed_regular(eps), t_max, false)?.first() {
        Some(&t) => FirstZero::Found { t },
        None => FirstZero::NotFound { horizon: t_max },
    })
}

pub fn singular_first_zero(q: &SingularPotential, t_max: f64) -> Result<FirstZero> {
    singular_first_zero_eps(q, t_max, SEED_EPS)
}

/// All zeros on (0, t_max] of the solution with u(0) = 0.
pub fn singular_zeros(q: &SingularPotential, t_max: f64) -> Result<Vec<f64>> {
    zeros_from(q, SEED_EPS, seed_regular(SEED_EPS), t_max, true)
}

/// Maximum deviation of the Wronskian u₁u₂′ − u₁′u₂ of the two singular
/// branches from its initial value (−2) over [eps, t_max].
pub fn wronskian_drift(q: &SingularPotential, t_max: f64) -> Result<f64> {
    let eps = SEED_EPS;
    let (a, b) = (seed_regular(eps), seed_singular(eps));
    let y0 = [a[0], a[1], b[0], b[1]];
    let w0 = a[0] * b[1] - a[1] * b[0];
    let mut drift: f64 = 0.0;
    ode::integrate(
        |t, y, dy| {
            let qt = q.total(t);
            dy[0] = y[1];
            dy[1] = -qt * y[0];
            dy[2] = y[3];
            dy[3] = -qt * y[2];
        },
        eps,
        &y0,
        t_max,
        &IntegratorConfig { dense: false, ..sturm_cfg() },
        |_, y| {
            drift = drift.max((y[0] * y[3] - y[1] * y[2] - w0).abs());
            Control::Continue
        },
    )?;
    Ok(drift)
}

/// Zeros of the regular solution for the seeds `eps` and `eps/2`; the
/// difference measures sensitivity to the seed point.
pub fn seed_sensitivity(q: &SingularPotential, t_max: f64) -> Result<f64> {
    let a = singular_first_zero_eps(q, t_max, SEED_EPS)?;
    let b = singular_first_zero_eps(q, t_max, SEED_EPS / 2.0)?;
    Ok(match (a.value(), b.value()) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    })
}

/// J_ν(x) by its ascending series.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
    let mut sum = term;
    for m in 0..60 {
        let m = m as f64;
        term *= -h * h / ((m + 1.0) * (m + 1.0 + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of J_{2/3}.
pub fn bessel_j23_root() -> f64 {
    brent(|x| bessel_j(2.0 / 3.0, x), 2.0, 5.0, 1e-14).expect("J_{2/3} changes sign on [2,5]")
}

/// Comparison radius r*(k₁, k₂).
pub fn r_star(k1: f64, k2: f64) -> f64 {
    if k1 > 0.0 && k2 > 0.0 {
        (-k1 + (8.0 * PI * k2.powf(1.5) + k1 * k1).sqrt()) / (2.0 * k2)
    } else if k2 > 0.0 {
        (2.0 * PI).sqrt() / k2.powf(0.25)
    } else if k1 > 0.0 {
        (1.5 * bessel_j23_root()).powf(2.0 / 3.0) / k1.cbrt()
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BoundFit {
    /// ½S ≤ −3/(4r²) + k₁r + k₂r².
    Schwarzian { k1: f64, k2: f64 },
    /// Multipliers bounding √(1+R_a²) and √(1+R_c²).
    Curvature { a: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterlaceReport {
    /// q̃ ≤ q̄̃ held on the validation grid.
    pub dominated: bool,
    pub holds: bool,
    pub zeros_q: Vec<f64>,
    pub zeros_qbar: Vec<f64>,
    /// Consecutive zeros of the q-solution with no q̄-zero between them.
    pub counterexample: Option<(f64, f64)>,
}

/// Between consecutive zeros of the q-solution (0 included) lies a zero of
/// the q̄-solution whenever q ≤ q̄.
pub fn sturm_interlace_check(q: &SingularPotential, qbar: &SingularPotential, interval: (f64, f64)) -> Result<InterlaceReport> {
    let (lo, hi) = interval;
    let n = 400;
    let dominated = (0..=n).all(|k| {
        let t = lo.max(1e-3) + (hi - lo.max(1e-3)) * k as f64 / n as f64;
        q.regular(t) <= qbar.regular(t) + 1e-12
    });
    let zq = singular_zeros(q, hi)?;
    let zb = singular_zeros(qbar, hi)?;
    let tol = 1e-9;
    let mut counterexample = None;
    let mut prev = 0.0;
    for &t in &zq {
        if !zb.iter().any(|&s| s >= prev - tol && s <= t + tol && s > 0.0) {
            counterexample = Some((prev, t));
            break;
        }
        prev = t;
    }
    Ok(InterlaceReport { dominated, holds: counterexample.is_none(), zeros_q: zq, zeros_qbar: zb, counterexample })
}

/// q = ½S: the regular part ½S_reg interpolated over the sample radii and
/// held constant beyond them.
pub fn schwarzian_to_potential(s: &SchwarzianSample) -> Result<SingularPotential> {
    let mut pts: Vec<(f64, f64)> = s.r.iter().zip(&s.s_reg).filter(|(r, v)| **r > 0.0 && v.is_finite()).map(|(r, v)| (*r, 0.5 * v)).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts.dedup_by(|a, b| a.0 <= b.0);
    if pts.len() < 3 {
        return Err(Error::Invalid("need at least three Schwarzian samples".into()));
    }
    let r: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let v: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (r0, r1) = (r[0], r[r.len() - 1]);
    let spline = Spline::new(&r, &v)?;
    Ok(SingularPotential::new("schwarzian", move |t| {
        let t = t.clamp(r0, r1);
        spline.eval(t * t)
    }))
}

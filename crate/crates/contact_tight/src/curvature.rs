//! Canonical-curvature comparison: the four-dimensional Jacobi system, the
//! Riccati majorant u̇ = Au² + Cu + 1 and its blow-up time τ(A, C).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::{self, Control, DenseSolution, IntegratorConfig};
use crate::roots::{brent, integrate_gk, sampled_zeros};
use crate::sturm::BoundFit;

/// Canonical curvatures (R_a(r), R_c(r)) along one geodesic.
#[derive(Clone)]
pub struct CurvatureProfile {
    pub label: String,
    r_a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    r_c: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    constant: Option<(f64, f64)>,
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurvatureProfile({})", self.label)
    }
}

impl CurvatureProfile {
    pub fn new(
        label: impl Into<String>,
        r_a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r_c: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CurvatureProfile { label: label.into(), r_a: Arc::new(r_a), r_c: Arc::new(r_c), constant: None }
    }

    pub fn constant(r_a: f64, r_c: f64) -> Self {
        CurvatureProfile {
            label: format!("constant({r_a}, {r_c})"),
            r_a: Arc::new(move |_| r_a),
            r_c: Arc::new(move |_| r_c),
            constant: Some((r_a, r_c)),
        }
    }

    pub fn r_a(&self, r: f64) -> f64 {
        (self.r_a)(r)
    }

    pub fn r_c(&self, r: f64) -> f64 {
        (self.r_c)(r)
    }

    pub fn as_constant(&self) -> Option<(f64, f64)> {
        self.constant
    }
}

/// K-contact structures with invariant κ have R_a = κ and R_c = 0.
pub fn kcontact_curvatures(kappa: f64) -> CurvatureProfile {
    CurvatureProfile::constant(kappa, 0.0)
}

#[derive(Clone, Debug)]
pub struct Jacobi4Solution {
    pub sol: DenseSolution,
    pub first_zero_x0: Option<f64>,
    pub first_zero_x2: Option<f64>,
}

impl Jacobi4Solution {
    pub fn x0(&self, r: f64) -> f64 {
        self.sol.eval(r)[0]
    }

    pub fn x2(&self, r: f64) -> f64 {
        self.sol.eval(r)[2]
    }
}

/// ẋ₀ = x₁, ẋ₁ = x₂, ẋ₂ = x₃ − R_a x₁, ẋ₃ = R_c x₀ with x(0) = (0, 0, 1, 0).
pub fn solve_jacobi4(prof: &CurvatureProfile, r_max: f64, cfg: &IntegratorConfig) -> Result<Jacobi4Solution> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Invalid("r_max must be positive and finite".into()));
    }
    let mut c = *cfg;
    c.dense = true;
    let rhs = |r: f64, x: &[f64], dx: &mut [f64]| {
        dx[0] = x[1];
        dx[1] = x[2];
        dx[2] = x[3] - prof.r_a(r) * x[1];
        dx[3] = prof.r_c(r) * x[0];
    };
    let sol = ode::integrate(rhs, 0.0, &[0.0, 0.0, 1.0, 0.0], r_max, &c, |_, _| Control::Continue)?;

    let n = (256.0 * r_max).ceil() as usize;
    let ts: Vec<f64> = (1..=n).map(|k| r_max * k as f64 / n as f64).collect();
    let ys: Vec<Vec<f64>> = ts.iter().map(|&t| sol.eval(t)).collect();
    let comp = |i: usize| ys.iter().map(|y| y[i]).collect::<Vec<f64>>();
    let first = |i: usize, d: &dyn Fn(f64) -> f64| {
        sampled_zeros(&ts, &comp(i), |t| sol.eval(t)[i], d, 1e-13, 1e-8).first().map(|z| z.t)
    };
    let first_zero_x0 = first(0, &|t| sol.eval(t)[1]);
    let first_zero_x2 = first(2, &|t| {
        let y = sol.eval(t);
        y[3] - prof.r_a(t) * y[1]
    });
    Ok(Jacobi4Solution { sol, first_zero_x0, first_zero_x2 })
}

fn check_ac(a: f64, c: f64) {
    assert!(a > 0.0 && c > 0.0 && a.is_finite() && c.is_finite(), "tau_ac needs A, C > 0");
}

/// τ(A, C) = ∫₀^∞ du/(Au² + Cu + 1) in closed form.
pub fn tau_ac(a: f64, c: f64) -> f64 {
    check_ac(a, c);
    let d = 4.0 * a - c * c;
    if d.abs() <= 1e-14 * (4.0 * a + c * c) {
        2.0 / c
    } else if d > 0.0 {
        let s = d.sqrt();
        2.0 / s * (PI / 2.0 - (c / s).atan())
    } else {
        let s = (-d).sqrt();
        ((c + s) / (c - s)).ln() / s
    }
}

/// τ(A, C) by adaptive quadrature after u = s/(1 − s).
pub fn tau_ac_quadrature(a: f64, c: f64) -> f64 {
    check_ac(a, c);
    integrate_gk(|s| 1.0 / (a * s * s + c * s * (1.0 - s) + (1.0 - s) * (1.0 - s)), 0.0, 1.0, 1e-14)
}

/// Level at which the Riccati integration hands over to the analytic tail.
pub const BLOWUP_LEVEL: f64 = 1e8;

/// Blow-up time of u̇ = Au² + Cu + 1, u(0) = 0: integrate until u reaches
/// 1e8, then add the tail ∫_U^∞ du/(Au²) = 1/(AU).
pub fn riccati_blowup(a: f64, c: f64) -> f64 {
    check_ac(a, c);
    let cfg = IntegratorConfig { rtol: 1e-13, atol: 1e-13, max_step: 0.05, dense: true, max_steps: 1_000_000 };
    let t_cap = 10.0 * tau_upper(a, c);
    let sol = ode::integrate(
        |_, u, du| du[0] = a * u[0] * u[0] + c * u[0] + 1.0,
        0.0,
        &[0.0],
        t_cap,
        &cfg,
        |_, u| if u[0] >= BLOWUP_LEVEL { Control::Stop } else { Control::Continue },
    )
    .expect("riccati integration");
    let t_end = sol.t_end;
    // crossing of u = U inside the last step, from the dense output
    let lo = sol.mesh().iter().rev().nth(1).copied().unwrap_or(0.0);
    let t_hit = brent(|t| sol.eval(t)[0] - BLOWUP_LEVEL, lo, t_end, 1e-15).unwrap_or(t_end);
    t_hit + 1.0 / (a * BLOWUP_LEVEL)
}

// for C ≥ 0, u̇ ≥ Au² + 1 so τ(A, C) ≤ π/(2√A)
fn tau_upper(a: f64, _c: f64) -> f64 {
    PI / (2.0 * a.sqrt())
}

/// A = sup √(1 + R_a²), C = sup √(1 + R_c²) over the profiles on `r_range`.
pub fn curvature_bound_from_profiles(profiles: &[CurvatureProfile], r_range: (f64, f64)) -> Result<BoundFit> {
    if profiles.is_empty() {
        return Err(Error::Invalid("no curvature profiles".into()));
    }
    let (lo, hi) = r_range;
    if !(hi >= lo && lo >= 0.0 && hi.is_finite()) {
        return Err(Error::Invalid("bad curvature range".into()));
    }
    let (mut a, mut c) = (1.0f64, 1.0f64);
    for p in profiles {
        if let Some((ra, rc)) = p.as_constant() {
            a = a.max(ra.hypot(1.0));
            c = c.max(rc.hypot(1.0));
            continue;
        }
        let n = 2000;
        for k in 0..=n {
            let r = lo + (hi - lo) * k as f64 / n as f64;
            a = a.max(p.r_a(r).hypot(1.0));
            c = c.max(p.r_c(r).hypot(1.0));
        }
    }
    Ok(BoundFit::Curvature { a, c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_quadrature_on_grid() {
        for i in 0..10 {
            for j in 0..10 {
                let a = 0.5 + 3.5 * i as f64 / 9.0;
                let c = 0.5 + 3.5 * j as f64 / 9.0;
                let (t, q) = (tau_ac(a, c), tau_ac_quadrature(a, c));
                assert!((t - q).abs() <= 1e-10, "A={a} C={c}: {t} vs {q}");
            }
        }
        // discriminant zero: A = 1, C = 2
        assert!((tau_ac(1.0, 2.0) - 1.0).abs() < 1e-15);
        assert!((tau_ac_quadrature(1.0, 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn riccati_matches_tau() {
        for &(a, c) in &[(1.0, 1.0), (2.0_f64.sqrt(), 1.0), (1.0, 3.0), (3.0, 0.5)] {
            let b = riccati_blowup(a, c);
            assert!((b - tau_ac(a, c)).abs() < 1e-6, "A={a} C={c}: {b}");
        }
        let b = riccati_blowup(1.0, 0.01);
        assert!((b - PI / 2.0).abs() < 0.01 * PI / 2.0);
    }

    #[test]
    fn heisenberg_jacobi4_is_quadratic() {
        let s = solve_jacobi4(&kcontact_curvatures(0.0), 5.0, &IntegratorConfig::default()).unwrap();
        for k in 0..=50 {
            let r = 0.1 * k as f64;
            assert!((s.x0(r) - r * r / 2.0).abs() < 1e-10);
        }
        assert_eq!(s.first_zero_x0, None);
        assert_eq!(s.first_zero_x2, None);
    }

    #[test]
    fn sphere_jacobi4() {
        let s = solve_jacobi4(&kcontact_curvatures(1.0), 7.0, &IntegratorConfig::default()).unwrap();
        for k in 0..=70 {
            let r = 0.1 * k as f64;
            assert!((s.x0(r) - (1.0 - r.cos())).abs() < 1e-9);
        }
        assert!((s.first_zero_x0.unwrap() - 2.0 * PI).abs() < 1e-6);
        assert!((s.first_zero_x2.unwrap() - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn bounds_from_profiles() {
        let b = curvature_bound_from_profiles(&[kcontact_curvatures(1.0)], (0.0, 5.0)).unwrap();
        assert_eq!(b, BoundFit::Curvature { a: 2.0_f64.sqrt(), c: 1.0 });
        let b = curvature_bound_from_profiles(&[kcontact_curvatures(-1.0)], (0.0, 5.0)).unwrap();
        assert_eq!(b, BoundFit::Curvature { a: 2.0_f64.sqrt(), c: 1.0 });
        let b = curvature_bound_from_profiles(&[kcontact_curvatures(0.0)], (0.0, 5.0)).unwrap();
        assert_eq!(b, BoundFit::Curvature { a: 1.0, c: 1.0 });
        let b = curvature_bound_from_profiles(&[CurvatureProfile::constant(3.0, 4.0)], (0.0, 1.0)).unwrap();
        assert_eq!(b, BoundFit::Curvature { a: 10.0_f64.sqrt(), c: 17.0_f64.sqrt() });
        let p = CurvatureProfile::new("ramp", |r| r, |_| 0.0);
        let b = curvature_bound_from_profiles(&[p], (0.0, 2.0)).unwrap();
        assert_eq!(b, BoundFit::Curvature { a: 5.0_f64.sqrt(), c: 1.0 });
    }

    #[test]
    fn tau_known_values() {
        assert!((tau_ac(1.0, 1.0) - 2.0 * PI / (3.0 * 3.0_f64.sqrt())).abs() < 1e-14);
        assert!((tau_ac(2.0_f64.sqrt(), 1.0) - 1.05).abs() < 0.005);
    }
}

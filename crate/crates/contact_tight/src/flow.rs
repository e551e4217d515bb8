//! Geodesic flow of H = ½(h₁² + h₂²) on T*ℝ³ in canonical coordinates, its
//! linearization along two tangent vectors, and Taylor-mode jets of both.

use crate::error::{Error, Result};
use crate::linalg;
use crate::ode::{self, Control, DenseSolution, IntegratorConfig};
use crate::scalar::{Scalar, Series};
use crate::structures::{frame_guard, seed1, seed2, Frame, FrameStructure, OrbitRange, ReebOrbitSpec, StructureSpec};

/// Length of the coupled state: (q, p) followed by V_θ and V_z as (δq, δp).
pub const STATE_DIM: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub q: [f64; 3],
    pub p: [f64; 3],
}

impl PhasePoint {
    /// h_i = ⟨p, f_i(q)⟩.
    pub fn h(&self, fs: &FrameStructure) -> [f64; 3] {
        let m = fs.eval(&self.q);
        [0, 1, 2].map(|i| linalg::dot(&m[i], &self.p))
    }

    pub fn hamiltonian(&self, fs: &FrameStructure) -> f64 {
        let h = self.h(fs);
        0.5 * (h[1] * h[1] + h[2] * h[2])
    }

    fn from_slice(y: &[f64]) -> PhasePoint {
        PhasePoint { q: [y[0], y[1], y[2]], p: [y[3], y[4], y[5]] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationalState {
    pub x: PhasePoint,
    pub v_theta: [f64; 6],
    pub v_z: [f64; 6],
}

impl VariationalState {
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        let mut y = [0.0; STATE_DIM];
        y[..3].copy_from_slice(&self.x.q);
        y[3..6].copy_from_slice(&self.x.p);
        y[6..12].copy_from_slice(&self.v_theta);
        y[12..].copy_from_slice(&self.v_z);
        y
    }

    pub fn from_slice(y: &[f64]) -> VariationalState {
        let mut v_theta = [0.0; 6];
        let mut v_z = [0.0; 6];
        v_theta.copy_from_slice(&y[6..12]);
        v_z.copy_from_slice(&y[12..18]);
        VariationalState { x: PhasePoint::from_slice(y), v_theta, v_z }
    }
}

/// Canonical symplectic pairing σ(U, V) = ⟨δp_U, δq_V⟩ − ⟨δp_V, δq_U⟩.
pub fn symplectic_pairing(u: &[f64; 6], v: &[f64; 6]) -> f64 {
    (0..3).map(|a| u[3 + a] * v[a] - v[3 + a] * u[a]).sum()
}

/// Hamiltonian vector field, plus the linearized field applied to the
/// `(len - 6) / 6` tangent vectors that follow (q, p) in `y`.
pub(crate) fn rhs_generic<S: Scalar>(frame: &Frame, y: &[S], dy: &mut [S]) {
    let nv = (y.len() - 6) / 6;
    let zero = S::cst(0.0);
    let q = [y[0], y[1], y[2]];
    let p = [y[3], y[4], y[5]];
    let mut f = [[zero; 3]; 3];
    let mut df = [[[zero; 3]; 3]; 3];
    let mut ddf = [[[[zero; 3]; 3]; 3]; 3];
    if nv == 0 {
        let m = frame.eval(&seed1(&q));
        for i in 1..3 {
            for a in 0..3 {
                f[i][a] = m[i][a].v;
                df[i][a] = m[i][a].d;
            }
        }
    } else {
        let m = frame.eval(&seed2(&q));
        for i in 1..3 {
            for a in 0..3 {
                f[i][a] = m[i][a].v.v;
                df[i][a] = m[i][a].v.d;
                for c in 0..3 {
                    ddf[i][a][c] = m[i][a].d[c].d;
                }
            }
        }
    }
    let mut h = [zero; 3];
    let mut g = [[zero; 3]; 3];
    for i in 1..3 {
        h[i] = linalg::dot(&p, &f[i]);
        for c in 0..3 {
            g[i][c] = p[0] * df[i][0][c] + p[1] * df[i][1][c] + p[2] * df[i][2][c];
        }
    }
    for a in 0..3 {
        dy[a] = h[1] * f[1][a] + h[2] * f[2][a];
        dy[3 + a] = -(h[1] * g[1][a] + h[2] * g[2][a]);
    }
    for k in 0..nv {
        let o = 6 + 6 * k;
        let dq = [y[o], y[o + 1], y[o + 2]];
        let dp = [y[o + 3], y[o + 4], y[o + 5]];
        let mut dh = [zero; 3];
        for i in 1..3 {
            dh[i] = linalg::dot(&dp, &f[i]) + linalg::dot(&g[i], &dq);
        }
        for a in 0..3 {
            let mut acc = zero;
            for i in 1..3 {
                acc = acc + dh[i] * f[i][a] + h[i] * linalg::dot(&df[i][a], &dq);
            }
            dy[o + a] = acc;
        }
        for c in 0..3 {
            let mut acc = zero;
            for i in 1..3 {
                let mut dg = zero;
                for a in 0..3 {
                    dg = dg + dp[a] * df[i][a][c] + p[a] * linalg::dot(&ddf[i][a][c], &dq);
                }
                acc = acc + dh[i] * g[i][c] + h[i] * dg;
            }
            dy[o + 3 + c] = -acc;
        }
    }
}

/// Phase velocity (q̇, ṗ) of the canonical Hamiltonian system.
pub fn hamiltonian_rhs(s: &StructureSpec, x: &PhasePoint) -> Result<[f64; 6]> {
    frame_guard(&s.frame, &x.q)?;
    let y = [x.q[0], x.q[1], x.q[2], x.p[0], x.p[1], x.p[2]];
    let mut dy = [0.0; 6];
    rhs_generic(&s.frame.frame, &y, &mut dy);
    Ok(dy)
}

/// Point γ(z) of the Reeb orbit, obtained by flowing f₀ from the base point.
pub fn orbit_point(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64) -> Result<[f64; 3]> {
    if !orbit.contains(z) {
        return Err(Error::Invalid(format!("orbit parameter {z} outside the orbit range")));
    }
    let z = match orbit.range {
        OrbitRange::Circle { period } => z.rem_euclid(period),
        OrbitRange::Interval { .. } => z,
    };
    if z == 0.0 {
        return Ok(orbit.base);
    }
    let sign = z.signum();
    let cfg = IntegratorConfig { rtol: 1e-13, atol: 1e-14, max_step: 0.05, dense: false, ..Default::default() };
    let frame = &s.frame;
    let sol = ode::integrate(
        |_, y, dy| {
            let q = [y[0], y[1], y[2]];
            if !frame.contains(&q) {
                dy.fill(f64::NAN);
                return;
            }
            let f0 = frame.eval(&q)[0];
            for a in 0..3 {
                dy[a] = sign * f0[a];
            }
        },
        0.0,
        &orbit.base,
        z.abs(),
        &cfg,
        |_, _| Control::Continue,
    )?;
    Ok([sol.y_end[0], sol.y_end[1], sol.y_end[2]])
}

/// Covector on A¹Γ: ⟨p,f₀⟩ = 0, ⟨p,f₁⟩ = cos ψ, ⟨p,f₂⟩ = sin ψ where ψ = θ + twist·z.
pub fn initial_phase(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, theta: f64) -> Result<PhasePoint> {
    let q = orbit_point(s, orbit, z)?;
    let m = frame_guard(&s.frame, &q)?;
    let psi = theta + orbit.twist * z;
    let p = linalg::solve_rows(&m, &[0.0, psi.cos(), psi.sin()]);
    Ok(PhasePoint { q, p })
}

/// Initial phase point with its θ- and z-variations.
pub fn initial_variation(s: &StructureSpec, orbit: &ReebOrbitSpec, z: f64, theta: f64) -> Result<VariationalState> {
    let x = initial_phase(s, orbit, z, theta)?;
    let (m, dm) = s.frame.jacobian(&x.q);
    let psi = theta + orbit.twist * z;
    let dp_theta = linalg::solve_rows(&m, &[0.0, -psi.sin(), psi.cos()]);
    let f0 = m[0];
    // ḣ − Ṁp with Ṁ the derivative of the frame along f₀
    let mut rhs = [0.0, -orbit.twist * psi.sin(), orbit.twist * psi.cos()];
    for i in 0..3 {
        let mut mdot_p = 0.0;
        for a in 0..3 {
            mdot_p += x.p[a] * linalg::dot(&dm[i][a], &f0);
        }
        rhs[i] -= mdot_p;
    }
    let dp_z = linalg::solve_rows(&m, &rhs);
    Ok(VariationalState {
        x,
        v_theta: [0.0, 0.0, 0.0, dp_theta[0], dp_theta[1], dp_theta[2]],
        v_z: [f0[0], f0[1], f0[2], dp_z[0], dp_z[1], dp_z[2]],
    })
}

/// Dense solution of the geodesic or the coupled variational system.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub sol: DenseSolution,
    /// Radius at which the trajectory left the structure's domain, if it did.
    pub exit: Option<f64>,
}

impl Trajectory {
    pub fn r_end(&self) -> f64 {
        self.sol.t_end
    }

    pub fn phase(&self, r: f64) -> PhasePoint {
        PhasePoint::from_slice(&self.sol.eval(r))
    }

    pub fn state(&self, r: f64) -> VariationalState {
        VariationalState::from_slice(&self.sol.eval(r))
    }
}

/// Integrate from `y0` up to `r_max`, stopping early (without error) if the
/// chart domain is left.
pub(crate) fn integrate_state(fs: &FrameStructure, y0: &[f64], r_max: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let mut exit = None;
    let frame = &fs.frame;
    let sol = ode::integrate(
        |_, y, dy| {
            if !fs.contains(&[y[0], y[1], y[2]]) {
                dy.fill(f64::NAN);
                return;
            }
            rhs_generic(frame, y, dy);
        },
        0.0,
        y0,
        r_max,
        cfg,
        |r, y| {
            if fs.contains(&[y[0], y[1], y[2]]) {
                Control::Continue
            } else {
                exit = Some(r);
                Control::Stop
            }
        },
    );
    Ok(Trajectory { sol: sol?, exit })
}

pub fn integrate_geodesic(s: &StructureSpec, x0: &PhasePoint, r_max: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let y0 = [x0.q[0], x0.q[1], x0.q[2], x0.p[0], x0.p[1], x0.p[2]];
    let t = integrate_state(&s.frame, &y0, r_max, cfg)?;
    match t.exit {
        Some(r) => Err(Error::DomainExit { r }),
        None => Ok(t),
    }
}

pub fn integrate_variational(s: &StructureSpec, v0: &VariationalState, r_max: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let t = integrate_state(&s.frame, &v0.to_array(), r_max, cfg)?;
    match t.exit {
        Some(r) => Err(Error::DomainExit { r }),
        None => Ok(t),
    }
}

/// Taylor coefficients (in r − r₀) of the coupled state through degree N − 1,
/// by Picard iteration on truncated series.
pub fn taylor_state<const N: usize>(frame: &Frame, y0: &[f64; STATE_DIM]) -> [Series<N>; STATE_DIM] {
    let mut y = y0.map(Series::<N>::constant);
    let mut f = [Series::<N>::constant(0.0); STATE_DIM];
    for _ in 1..N {
        rhs_generic(frame, &y, &mut f);
        y = integrate_series(y0, &f);
    }
    y
}

/// y0 + ∫ f, raising the truncation order by one (coefficients beyond M are dropped).
fn integrate_series<const M: usize, const N: usize>(y0: &[f64; STATE_DIM], f: &[Series<M>; STATE_DIM]) -> [Series<N>; STATE_DIM] {
    let mut out = [Series::<N>::constant(0.0); STATE_DIM];
    for k in 0..STATE_DIM {
        out[k].c[0] = y0[k];
        for j in 1..N.min(M + 1) {
            out[k].c[j] = f[k].c[j - 1] / j as f64;
        }
    }
    out
}

/// Degree-2 Taylor expansion of the state, growing the order per iteration.
pub fn taylor_state3(frame: &Frame, y0: &[f64; STATE_DIM]) -> [Series<3>; STATE_DIM] {
    let mut f1 = [0.0; STATE_DIM];
    rhs_generic(frame, y0, &mut f1);
    let y2: [Series<2>; STATE_DIM] = integrate_series(y0, &f1.map(Series::<1>::constant));
    let mut f2 = [Series::<2>::constant(0.0); STATE_DIM];
    rhs_generic(frame, &y2, &mut f2);
    integrate_series(y0, &f2)
}

/// Degree-3 Taylor expansion of the state, growing the order per iteration.
pub fn taylor_state4(frame: &Frame, y0: &[f64; STATE_DIM]) -> [Series<4>; STATE_DIM] {
    let y3 = taylor_state3(frame, y0);
    let mut f3 = [Series::<3>::constant(0.0); STATE_DIM];
    rhs_generic(frame, &y3, &mut f3);
    integrate_series(y0, &f3)
}

/// ω evaluated on the projected variations: (ω(π_*V_θ), ω(π_*V_z)).
pub fn omega_pair<S: Scalar>(frame: &Frame, y: &[S]) -> (S, S) {
    let q = [y[0], y[1], y[2]];
    let m = frame.eval(&q);
    let nu0 = linalg::cross(&m[1], &m[2]);
    let det = linalg::dot(&m[0], &nu0);
    let wt = linalg::dot(&nu0, &[y[6], y[7], y[8]]) / det;
    let wz = linalg::dot(&nu0, &[y[12], y[13], y[14]]) / det;
    (wt, wz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn heisenberg_rhs_at_origin() {
        let s = StructureSpec::heisenberg();
        let x = PhasePoint { q: [0.0; 3], p: [1.0, 0.0, 0.0] };
        let v = hamiltonian_rhs(&s, &x).unwrap();
        assert_eq!(&v[..3], &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn initial_phase_examples() {
        let s = StructureSpec::heisenberg();
        let x = initial_phase(&s, &s.orbit, 1.0, PI / 2.0).unwrap();
        for a in 0..3 {
            assert!((x.q[a] - [0.0, 0.0, 1.0][a]).abs() < 1e-12);
            assert!((x.p[a] - [0.0, 1.0, 0.0][a]).abs() < 1e-12);
        }
        let ot = StructureSpec::overtwisted();
        let x = initial_phase(&ot, &ot.orbit, 0.0, 0.0).unwrap();
        assert_eq!(x.q, [0.0; 3]);
        assert!((x.p[0] - 1.0).abs() < 1e-15 && x.p[1].abs() < 1e-15 && x.p[2].abs() < 1e-15);
    }

    #[test]
    fn initial_variation_projections() {
        let s = StructureSpec::kcontact(1.0).unwrap();
        let v = initial_variation(&s, &s.orbit, 0.3, 1.1).unwrap();
        let f0 = s.frame.eval(&v.x.q)[0];
        for a in 0..3 {
            assert_eq!(v.v_theta[a], 0.0);
            assert!((v.v_z[a] - f0[a]).abs() < 1e-9);
        }
        let h = initial_variation(&StructureSpec::heisenberg(), &StructureSpec::heisenberg().orbit, 0.0, 0.0).unwrap();
        assert!((h.v_theta[3]).abs() < 1e-15 && (h.v_theta[4] - 1.0).abs() < 1e-15 && h.v_theta[5].abs() < 1e-15);
    }

    #[test]
    fn vz_matches_difference_of_initial_phases() {
        let s = StructureSpec::perturbed(0.2);
        let mut orbit = s.orbit.clone();
        orbit.twist = 0.7;
        let (z, th, d) = (0.2, 0.4, 1e-5);
        let v = initial_variation(&s, &orbit, z, th).unwrap();
        let a = initial_phase(&s, &orbit, z + d, th).unwrap();
        let b = initial_phase(&s, &orbit, z - d, th).unwrap();
        for k in 0..3 {
            assert!(((a.p[k] - b.p[k]) / (2.0 * d) - v.v_z[3 + k]).abs() < 1e-7);
            assert!(((a.q[k] - b.q[k]) / (2.0 * d) - v.v_z[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn taylor_state_matches_integrator() {
        let s = StructureSpec::overtwisted();
        let v0 = initial_variation(&s, &s.orbit, 0.0, 0.3).unwrap();
        let cfg = IntegratorConfig { rtol: 1e-12, atol: 1e-13, ..Default::default() };
        let tr = integrate_variational(&s, &v0, 1.2, &cfg).unwrap();
        let y1 = tr.state(1.0).to_array();
        let ser = taylor_state::<6>(&s.frame.frame, &y1);
        let h = 1e-3;
        let y2 = tr.state(1.0 + h).to_array();
        let s4 = taylor_state4(&s.frame.frame, &y1);
        for k in 0..STATE_DIM {
            assert!((ser[k].eval(h) - y2[k]).abs() < 1e-9, "{k}");
            for j in 0..4 {
                assert!((ser[k].c[j] - s4[k].c[j]).abs() < 1e-12 * (1.0 + ser[k].c[j].abs()));
            }
        }
    }
}

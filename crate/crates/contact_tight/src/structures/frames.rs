//! Concrete orthonormal frames (f0, f1, f2) in Cartesian chart coordinates.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::{Scalar, Series};

use super::profile::Profile;

/// Rows are f0, f1, f2; `m[i][a]` is the `a`-th Cartesian component of f_i.
pub type FrameMatrix<S> = [[S; 3]; 3];

#[derive(Clone, Debug)]
pub enum Frame {
    /// f1 = ∂x + y/2 ∂z, f2 = ∂y − x/2 ∂z, f0 = ∂z.
    Heisenberg,
    /// User-supplied component expressions in x, y, z.
    Components(Arc<[[Expr; 3]; 3]>),
    Radial(Arc<RadialFrame>),
    /// Left-invariant frame of constant curvature κ > 0 on SU(2), stereographic chart.
    Sphere { kappa: f64 },
    /// ω = sin f dθ + cos f dz with f = r²/2 + ε r⁵ cosθ /(1+r²).
    Perturbed { eps: f64 },
    /// (f1, f2) rotated by the angle `angle + rate * z`.
    Rotated { base: Box<Frame>, angle: f64, rate: f64 },
}

impl Frame {
    pub fn eval<S: Scalar>(&self, q: &[S; 3]) -> FrameMatrix<S> {
        let zero = S::cst(0.0);
        let one = S::cst(1.0);
        match self {
            Frame::Heisenberg => {
                let [x, y, _] = *q;
                [[zero, zero, one], [one, zero, y * 0.5], [zero, one, -(x * 0.5)]]
            }
            Frame::Components(e) => {
                let v = [q[0], q[1], q[2]];
                let row = |i: usize| [e[i][0].eval(&v), e[i][1].eval(&v), e[i][2].eval(&v)];
                [row(0), row(1), row(2)]
            }
            Frame::Radial(rf) => rf.eval(q),
            Frame::Sphere { kappa } => {
                let a = kappa.sqrt() * 0.5;
                let b = -kappa * 0.5;
                let vi = stereo_field(q, [1.0, 0.0, 0.0]);
                let vj = stereo_field(q, [0.0, 1.0, 0.0]);
                let vk = stereo_field(q, [0.0, 0.0, 1.0]);
                [vk.map(|c| c * b), vi.map(|c| c * a), vj.map(|c| c * a)]
            }
            Frame::Perturbed { eps } => perturbed_frame(*eps, q),
            Frame::Rotated { base, angle, rate } => {
                let m = base.eval(q);
                let psi = q[2] * *rate + *angle;
                let (s, c) = (psi.sin(), psi.cos());
                let f1 = [0, 1, 2].map(|a| c * m[1][a] - s * m[2][a]);
                let f2 = [0, 1, 2].map(|a| s * m[1][a] + c * m[2][a]);
                [m[0], f1, f2]
            }
        }
    }

    /// Whether `q` lies where the frame formulas are defined.
    pub fn defined_at(&self, q: &[f64; 3]) -> bool {
        match self {
            Frame::Radial(rf) => (q[0] * q[0] + q[1] * q[1]).sqrt() <= rf.r_max,
            Frame::Rotated { base, .. } => base.defined_at(q),
            _ => q.iter().all(|c| c.is_finite()),
        }
    }
}

/// Pushforward of the left-invariant field generated by `v` under the
/// stereographic (Cayley) chart u ↦ (1+u)/(1−u) of the unit quaternions.
fn stereo_field<S: Scalar>(u: &[S; 3], v: [f64; 3]) -> [S; 3] {
    let n2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let w = (S::cst(1.0) - n2) * 0.5;
    [0, 1, 2].map(|a| w * v[a] + cross[a] + dot * u[a])
}

fn perturbed_frame<S: Scalar>(eps: f64, q: &[S; 3]) -> FrameMatrix<S> {
    let [x, y, _] = *q;
    let s = x * x + y * y;
    let one = S::cst(1.0);
    let sp1 = s + 1.0;
    let n = s * x * eps / sp1 + 0.5;
    let f = s * n;
    // D = r ∂r f = s m
    let m = s * x * eps * (s * 3.0 + 5.0) / (sp1 * sp1) + 1.0;
    let sinc = f.sinc();
    let sin_over_d = n * sinc / m;
    // (m − cos f)/(s m)
    let p = (x * eps * (s * 3.0 + 5.0) / (sp1 * sp1) + s * n * n * f.cosc()) / m;
    let f_theta = -(s * s * y * eps / sp1);
    let sin_f = f.sin();
    let cos_f = f.cos();
    let f0 = [
        -(sin_over_d * f_theta * x) - y * sin_f,
        -(sin_over_d * f_theta * y) + x * sin_f,
        cos_f,
    ];
    let e1 = [one - y * y * p, x * y * p, y * sin_over_d];
    let e2 = [x * y * p, one - x * x * p, -(x * sin_over_d)];
    [f0, e1, e2]
}

/// Degree in r of the Maclaurin expansion used near the axis.
const AXIS_ORDER: usize = 32;

/// Frame of a radial model, with the removable singularity on the axis
/// handled by series in s = r².
#[derive(Clone, Debug)]
pub struct RadialFrame {
    pub alpha: Profile,
    pub beta: Profile,
    pub r_max: f64,
    r_switch: f64,
    // coefficients in s of P, Q, T, Z (see `eval`)
    axis: [Vec<f64>; 4],
}

impl RadialFrame {
    pub fn new(alpha: Profile, beta: Profile, r_max: f64) -> Result<RadialFrame> {
        let r = Series::<AXIS_ORDER>::var(0.0);
        let a = alpha.eval(r);
        let b = beta.eval(r);
        let da = alpha.deriv(r);
        let db = beta.deriv(r);
        if a.c[0] == 0.0 {
            return Err(Error::Invalid("radial model needs alpha(0) != 0".into()));
        }
        if b.c[0].abs() > 1e-12 || b.c[1].abs() > 1e-12 {
            return Err(Error::Invalid("radial model needs beta = O(r^2) at the axis".into()));
        }
        let gamma = a * db - b * da;
        if gamma.c[1] <= 0.0 {
            return Err(Error::ContactViolation { r: 0.0 });
        }
        let g1 = gamma.shift_down(1);
        let p = (gamma - a * r).shift_down(3) / g1;
        let q = b.shift_down(2) / g1;
        let t = da.shift_down(1) / g1;
        let z = db.shift_down(1) / g1;
        // usable coefficients after the largest shift, even powers only
        let usable = AXIS_ORDER - 4;
        let even = |ser: &Series<AXIS_ORDER>| -> Vec<f64> { (0..usable).step_by(2).map(|k| ser.c[k]).collect() };
        Ok(RadialFrame { alpha, beta, r_max, r_switch: 0.1, axis: [even(&p), even(&q), even(&t), even(&z)] })
    }

    /// γ = αβ′ − βα′.
    pub fn gamma(&self, r: f64) -> f64 {
        self.alpha.eval(r) * self.beta.deriv(r) - self.beta.eval(r) * self.alpha.deriv(r)
    }

    /// Returns (P, Q, T, Z) with P = (γ − αr)/(r²γ), Q = β/(rγ), T = α′/γ, Z = β′/γ.
    fn pqtz<S: Scalar>(&self, s: S) -> [S; 4] {
        if s.value() < self.r_switch * self.r_switch {
            return [0, 1, 2, 3].map(|i| crate::scalar::horner(&self.axis[i], s));
        }
        let r = s.sqrt();
        let a = self.alpha.eval(r);
        let b = self.beta.eval(r);
        let da = self.alpha.deriv(r);
        let db = self.beta.deriv(r);
        let g = a * db - b * da;
        [(g - a * r) / (s * g), b / (r * g), da / g, db / g]
    }

    fn eval<S: Scalar>(&self, q: &[S; 3]) -> FrameMatrix<S> {
        let [x, y, _] = *q;
        let s = x * x + y * y;
        let [p, qq, t, z] = self.pqtz(s);
        let one = S::cst(1.0);
        [
            [t * y, -(t * x), z],
            [one - p * y * y, p * x * y, qq * y],
            [p * x * y, one - p * x * x, -(qq * x)],
        ]
    }
}

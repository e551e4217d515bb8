//! One-dimensional radial profiles α(r), β(r).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::Scalar;

/// Serializable description of a profile, as found in structure files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProfileSpec {
    /// sum coeffs[k] r^k
    Poly { coeffs: Vec<f64> },
    /// amp * f(freq r² + phase) with f = sin or cos
    Trig { func: String, amp: f64, freq: f64, phase: f64 },
    /// cubic spline in s = r² through (r_i, v_i)
    Table { r: Vec<f64>, v: Vec<f64> },
    /// expression in the variable r
    Expr { expr: String },
}

#[derive(Clone, Debug)]
pub enum Profile {
    Poly(Vec<f64>),
    Trig { sine: bool, amp: f64, freq: f64, phase: f64 },
    Table(Spline),
    Expr { f: Expr, df: Expr },
}

impl Profile {
    pub fn from_spec(spec: &ProfileSpec) -> Result<Profile> {
        Ok(match spec {
            ProfileSpec::Poly { coeffs } => Profile::Poly(coeffs.clone()),
            ProfileSpec::Trig { func, amp, freq, phase } => {
                let sine = match func.as_str() {
                    "sin" => true,
                    "cos" => false,
                    other => return Err(Error::Invalid(format!("trig profile function `{other}`"))),
                };
                Profile::Trig { sine, amp: *amp, freq: *freq, phase: *phase }
            }
            ProfileSpec::Table { r, v } => Profile::Table(Spline::new(r, v)?),
            ProfileSpec::Expr { expr } => Profile::expr(expr)?,
        })
    }

    pub fn expr(src: &str) -> Result<Profile> {
        let f = Expr::parse(src, &["r"])?;
        let df = f.diff(0);
        Ok(Profile::Expr { f, df })
    }

    pub fn eval<S: Scalar>(&self, r: S) -> S {
        match self {
            Profile::Poly(c) => crate::scalar::horner(c, r),
            Profile::Trig { sine, amp, freq, phase } => {
                let u = r * r * *freq + *phase;
                if *sine {
                    u.sin() * *amp
                } else {
                    u.cos() * *amp
                }
            }
            Profile::Table(sp) => sp.eval(r * r),
            Profile::Expr { f, .. } => f.eval(&[r]),
        }
    }

    pub fn deriv<S: Scalar>(&self, r: S) -> S {
        match self {
            Profile::Poly(c) => {
                let d: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, ck)| k as f64 * ck).collect();
                if d.is_empty() {
                    S::cst(0.0)
                } else {
                    crate::scalar::horner(&d, r)
                }
            }
            Profile::Trig { sine, amp, freq, phase } => {
                let u = r * r * *freq + *phase;
                let du = r * (2.0 * freq * amp);
                if *sine {
                    u.cos() * du
                } else {
                    -(u.sin() * du)
                }
            }
            Profile::Table(sp) => sp.deriv(r * r) * r * 2.0,
            Profile::Expr { df, .. } => df.eval(&[r]),
        }
    }
}

/// Natural cubic spline in the variable s = r².
#[derive(Clone, Debug)]
pub struct Spline {
    s: Vec<f64>,
    // per-segment coefficients of (s - s_i)^k, k = 0..3
    coef: Vec<[f64; 4]>,
}

impl Spline {
    pub fn new(r: &[f64], v: &[f64]) -> Result<Spline> {
        if r.len() != v.len() || r.len() < 3 {
            return Err(Error::Invalid("table profile needs matching r, v with at least 3 points".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) || r[0] < 0.0 {
            return Err(Error::Invalid("table radii must be nonnegative and increasing".into()));
        }
        let s: Vec<f64> = r.iter().map(|x| x * x).collect();
        let n = s.len();
        let h: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        // second derivatives m_i, natural end conditions, tridiagonal solve
        let mut m = vec![0.0; n];
        if n > 2 {
            let k = n - 2;
            let mut a = vec![0.0; k];
            let mut b = vec![0.0; k];
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                a[i] = h[i];
                b[i] = 2.0 * (h[i] + h[i + 1]);
                c[i] = h[i + 1];
                d[i] = 6.0 * ((v[i + 2] - v[i + 1]) / h[i + 1] - (v[i + 1] - v[i]) / h[i]);
            }
            for i in 1..k {
                let w = a[i] / b[i - 1];
                b[i] -= w * c[i - 1];
                d[i] -= w * d[i - 1];
            }
            m[k] = d[k - 1] / b[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (d[i] - c[i] * m[i + 2]) / b[i];
            }
        }
        let coef = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                [
                    v[i],
                    (v[i + 1] - v[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0,
                    m[i] / 2.0,
                    (m[i + 1] - m[i]) / (6.0 * hi),
                ]
            })
            .collect();
        Ok(Spline { s, coef })
    }

    fn segment(&self, s: f64) -> usize {
        match self.s.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.coef.len() - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.coef.len() - 1),
        }
    }

    pub fn eval<S: Scalar>(&self, s: S) -> S {
        let i = self.segment(s.value());
        let t = s - self.s[i];
        crate::scalar::horner(&self.coef[i], t)
    }

    pub fn deriv<S: Scalar>(&self, s: S) -> S {
        let i = self.segment(s.value());
        let c = self.coef[i];
        let t = s - self.s[i];
        crate::scalar::horner(&[c[1], 2.0 * c[2], 3.0 * c[3]], t)
    }
}

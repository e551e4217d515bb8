//! Dormand–Prince 5(4) integrator with step-size control and the standard
//! fourth-order continuous extension.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Keep per-step interpolation data; without it only the endpoint is stored.
    pub dense: bool,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rtol: 1e-10, atol: 1e-12, max_step: 0.05, dense: true, max_steps: 2_000_000 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_step > 0.0) {
            return Err(Error::Invalid("tolerances and max step must be positive".into()));
        }
        Ok(())
    }
}

/// What the step observer asks the integrator to do after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    /// Stop successfully at the current step.
    Stop,
    /// The state left the admissible region.
    Exit,
}

#[derive(Clone, Debug)]
struct Segment {
    t0: f64,
    h: f64,
    // five blocks of `dim` coefficients
    rc: Vec<f64>,
}

/// Piecewise polynomial solution over the accepted steps.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    pub dim: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
    segs: Vec<Segment>,
    starts: Vec<f64>,
}

impl DenseSolution {
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        if self.segs.is_empty() {
            out.copy_from_slice(&self.y_end);
            return;
        }
        let idx = match self.starts.binary_search_by(|s| s.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let seg = &self.segs[idx.min(self.segs.len() - 1)];
        let th = (t - seg.t0) / seg.h;
        let th1 = 1.0 - th;
        let n = self.dim;
        for i in 0..n {
            let r = &seg.rc;
            out[i] = r[i] + th * (r[n + i] + th1 * (r[2 * n + i] + th * (r[3 * n + i] + th1 * r[4 * n + i])));
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Accepted step boundaries, including the final time.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m = self.starts.clone();
        m.push(self.t_end);
        m
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate y' = f(t, y) from `t0` to `t_end` (forward).
///
/// `observe` runs after every accepted step with the new state.
pub fn integrate<F, O>(mut f: F, t0: f64, y0: &[f64], t_end: f64, cfg: &IntegratorConfig, mut observe: O) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> Control,
{
    cfg.validate()?;
    let n = y0.len();
    let mut sol = DenseSolution {
        dim: n,
        t_start: t0,
        t_end: t0,
        y_end: y0.to_vec(),
        steps: 0,
        rejected: 0,
        segs: Vec::new(),
        starts: Vec::new(),
    };
    if t_end <= t0 {
        return Ok(sol);
    }
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    f(t0, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::DomainExit { r: t0 });
    }

    let mut h = initial_step(&mut f, t0, &y, &k1, cfg).min(cfg.max_step).min(t_end - t0);
    let mut t = t0;
    let mut facold: f64 = 1e-4;
    let mut reject = false;
    let beta = 0.04;
    let expo1 = 0.2 - beta * 0.75;
    let safe = 0.9;
    let (facc1, facc2) = (1.0 / 0.2, 1.0 / 10.0);

    loop {
        if sol.steps + sol.rejected > cfg.max_steps {
            return Err(Error::StepFailure { r: t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepFailure { r: t });
        }
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }
        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ys, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &y1, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y1[i].abs());
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / sc).powi(2);
        }
        err = (err / n as f64).sqrt();
        if !err.is_finite() {
            // stage left the region where f is defined: shrink hard
            sol.rejected += 1;
            reject = true;
            h *= 0.2;
            continue;
        }

        let fac11 = err.powf(expo1);
        let fac = (fac11 / facold.powf(beta)).clamp(facc2, facc1) / safe;
        let fac = fac.clamp(facc2, facc1);
        if err <= 1.0 {
            facold = err.max(1e-4);
            sol.steps += 1;
            if cfg.dense {
                let mut rc = vec![0.0; 5 * n];
                for i in 0..n {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    rc[i] = y[i];
                    rc[n + i] = ydiff;
                    rc[2 * n + i] = bspl;
                    rc[3 * n + i] = ydiff - h * k7[i] - bspl;
                    rc[4 * n + i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                sol.starts.push(t);
                sol.segs.push(Segment { t0: t, h, rc });
            }
            t += h;
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            sol.t_end = t;
            sol.y_end.copy_from_slice(&y);
            match observe(t, &y) {
                Control::Continue => {}
                Control::Stop => return Ok(sol),
                Control::Exit => return Err(Error::DomainExit { r: t }),
            }
            if last || t >= t_end {
                return Ok(sol);
            }
            let mut hnew = h / fac;
            if reject {
                hnew = hnew.min(h);
            }
            reject = false;
            h = hnew.min(cfg.max_step);
        } else {
            sol.rejected += 1;
            reject = true;
            h /= facc1.min(fac11 / safe);
        }
    }
}

fn initial_step<F>(f: &mut F, t0: f64, y0: &[f64], f0: &[f64], cfg: &IntegratorConfig) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|v| cfg.atol + cfg.rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(cfg.max_step);
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h0, &y1, &mut f1);
    let diff: Vec<f64> = (0..n).map(|i| f1[i] - f0[i]).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 || !d2.is_finite() { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_endpoint_and_dense() {
        let cfg = IntegratorConfig { max_step: 1.0, ..Default::default() };
        let sol = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[0.0, 1.0],
            10.0,
            &cfg,
            |_, _| Control::Continue,
        )
        .unwrap();
        assert!((sol.y_end[0] - 10f64.sin()).abs() < 1e-9);
        for k in 0..200 {
            let t = 0.05 * k as f64;
            let y = sol.eval(t);
            assert!((y[0] - t.sin()).abs() < 1e-8, "t={t}: {}", y[0] - t.sin());
        }
    }

    #[test]
    fn stop_and_exit_controls() {
        let cfg = IntegratorConfig::default();
        let sol = integrate(|_, _, dy| dy[0] = 1.0, 0.0, &[0.0], 5.0, &cfg, |_, y| if y[0] > 1.0 { Control::Stop } else { Control::Continue }).unwrap();
        assert!(sol.t_end > 1.0 && sol.t_end < 1.2);
        let err = integrate(|_, _, dy| dy[0] = 1.0, 0.0, &[0.0], 5.0, &cfg, |_, y| if y[0] > 2.0 { Control::Exit } else { Control::Continue });
        assert!(matches!(err, Err(Error::DomainExit { .. })));
    }

    #[test]
    fn fifth_order_convergence() {
        // global error should drop by roughly 2^5 when the step halves
        let run = |h: f64| {
            let cfg = IntegratorConfig { rtol: 1.0, atol: 1.0, max_step: h, ..Default::default() };
            let sol = integrate(|t, y, dy| dy[0] = y[0] * t.cos(), 0.0, &[1.0], 2.0, &cfg, |_, _| Control::Continue).unwrap();
            (sol.y_end[0] - 2f64.sin().exp()).abs()
        };
        let ratio = run(0.2) / run(0.1);
        assert!(ratio > 20.0 && ratio < 50.0, "ratio {ratio}");
    }
}

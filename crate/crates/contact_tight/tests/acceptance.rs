//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contact_tight::curvature::{kcontact_curvatures, solve_jacobi4, tau_ac, tau_ac_quadrature};
use contact_tight::flow::{initial_phase, initial_variation, integrate_variational, symplectic_pairing};
use contact_tight::jacobi::{
    check_initial_jet, first_singular_radius, fit_schwarzian_bound, focal_radii, jacobi_trace, schwarzian_numeric, schwarzian_of,
    TraceConfig,
};
use contact_tight::ode::IntegratorConfig;
use contact_tight::riem_compare::{kleft_table, ot_table};
use contact_tight::scalar::Series;
use contact_tight::structures::{ModelKind, Profile, RadialModel, StructureSpec};
use contact_tight::sturm::{bessel_j23_root, r_star, sturm_interlace_check, wronskian_drift, SingularPotential};
use contact_tight::tightness::{analyze_orbit, disk_boundary, sweep_trace_config, AnalysisConfig};

type Outcome = Result<String, String>;

/// Collects sub-check results; the criterion passes only if all do.
#[derive(Default)]
struct Checks {
    lines: Vec<String>,
    failed: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, msg: String) {
        if !ok {
            self.failed = true;
        }
        self.lines.push(format!("{}{}", if ok { "" } else { "[x] " }, msg));
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{what}={got:.10} (want {want:.10} +/- {tol:e})"));
    }

    fn finish(self) -> Outcome {
        let s = self.lines.join("; ");
        if self.failed {
            Err(s)
        } else {
            Ok(s)
        }
    }
}

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn criterion_1() -> Outcome {
    let mut c = Checks::default();
    let s = StructureSpec::overtwisted();
    let cfg = AnalysisConfig { n_z: 4, n_theta: 16, r_max: 4.0, ..AnalysisConfig::default() };
    let rep = analyze_orbit(&s, &s.orbit, &cfg).map_err(fail)?;
    c.near("r_o-", rep.r_o_minus, sqrt_2pi(), 1e-5);
    c.near("r_o+", rep.r_o_plus, sqrt_2pi(), 1e-5);
    let d = disk_boundary(&s, &s.orbit, 0.0, 64, 4.0, &sweep_trace_config()).map_err(fail)?;
    let radius_err = d.points.iter().map(|p| (p[0].hypot(p[1]) - sqrt_2pi()).abs().max(p[2].abs())).fold(0.0, f64::max);
    c.check(radius_err <= 1e-4, format!("disk radius error {radius_err:.2e} (<= 1e-4)"));
    c.check(d.closure_defect <= 1e-6, format!("closure defect {:.2e}", d.closure_defect));
    c.finish()
}

fn criterion_2() -> Outcome {
    let mut c = Checks::default();
    let s = StructureSpec::heisenberg();
    let cfg = TraceConfig::default();
    let (mut v_err, mut s_err) = (0.0f64, 0.0f64);
    for (z, th) in [(0.0, 0.0), (0.5, 1.1), (-0.7, 4.0)] {
        let t = jacobi_trace(&s, &s.orbit, z, th, 10.0, &cfg).map_err(fail)?;
        c.check(first_singular_radius(&t).value().is_none() && t.horizon >= 10.0, format!("theta={th}: no r_o up to {}", t.horizon));
        for k in 1..t.r.len() {
            let r = t.r[k];
            let v = t.w_theta[k] / t.w_z[k];
            v_err = v_err.max((v - r * r / 2.0).abs() / (r * r / 2.0));
        }
        let sch = schwarzian_numeric(&t, (0.2, 2.0)).map_err(fail)?;
        for (r, sv) in sch.r.iter().zip(&sch.s) {
            let want = -1.5 / (r * r);
            s_err = s_err.max(((sv - want) / want).abs());
        }
    }
    c.check(v_err <= 1e-6, format!("v rel err {v_err:.2e} (<= 1e-6)"));
    c.check(s_err <= 1e-4, format!("S rel err {s_err:.2e} (<= 1e-4)"));
    c.finish()
}

fn criterion_3() -> Outcome {
    let mut c = Checks::default();
    for kappa in [1.0f64, -1.0] {
        let s = StructureSpec::kcontact(kappa).map_err(fail)?;
        let r_max = if kappa > 0.0 { 7.0 } else { 4.0 };
        let t = jacobi_trace(&s, &s.orbit, 0.2, 0.9, r_max, &TraceConfig::default()).map_err(fail)?;
        // θ is oriented so that ẅθ(0) = 1
        let closed = |r: f64| {
            if kappa > 0.0 {
                (2.0 / kappa * (kappa.sqrt() * r / 2.0).sin().powi(2), (kappa.sqrt() * r).cos())
            } else {
                let a = (-kappa).sqrt() * r;
                ((a.cosh() - 1.0) / -kappa, a.cosh())
            }
        };
        let mut err = 0.0f64;
        for k in 0..t.r.len() {
            let (wt, wz) = closed(t.r[k]);
            err = err.max((t.w_theta[k] - wt).abs()).max((t.w_z[k] - wz).abs());
        }
        c.check(err <= 1e-6, format!("kappa={kappa}: trace err {err:.2e}"));
        let sch = schwarzian_numeric(&t, (0.3, 2.5)).map_err(fail)?;
        let mut serr = 0.0f64;
        for (r, sv) in sch.r.iter().zip(&sch.s) {
            let want = if kappa > 0.0 {
                kappa / 4.0 * (1.0 - 3.0 / (kappa.sqrt() * r).sin().powi(2))
            } else {
                kappa / 4.0 * (1.0 + 3.0 / ((-kappa).sqrt() * r).sinh().powi(2))
            };
            serr = serr.max((0.5 * sv - want).abs());
        }
        c.check(serr <= 1e-3, format!("kappa={kappa}: half-Schwarzian err {serr:.2e}"));
        if kappa > 0.0 {
            let f = focal_radii(&t).first().map(|f| f.r).unwrap_or(f64::NAN);
            c.near("first focal", f, PI, 1e-5);
        }
    }
    c.finish()
}

fn criterion_4() -> Outcome {
    let mut c = Checks::default();
    let rs = r_star(0.0, 1.0);
    c.check(rs == sqrt_2pi(), format!("r_star(0,1)={rs:.15}"));
    c.near("j_2/3", bessel_j23_root(), 3.37, 0.005);
    let (t, q) = (tau_ac(1.0, 1.0), tau_ac_quadrature(1.0, 1.0));
    c.check((t - q).abs() <= 1e-8, format!("tau(1,1)={t:.12} quadrature={q:.12}"));
    c.near("tau(1,1) vs 2pi/(3sqrt3)", t, 2.0 * PI / (3.0 * 3f64.sqrt()), 1e-8);
    c.near("tau(sqrt2,1)", tau_ac(2f64.sqrt(), 1.0), 1.05, 0.005);
    c.finish()
}

fn criterion_5() -> Outcome {
    let mut c = Checks::default();
    let kl = kleft_table().map_err(fail)?;
    let want = [(f64::INFINITY, 1.02, 1.0), (PI, 1.05, 1.38), (f64::INFINITY, 1.05, 0.74)];
    for (row, (b, cc, e)) in kl.rows.iter().zip(want) {
        c.check(row.rho_thm_b == b, format!("{} rho_B={}", row.model, row.rho_thm_b));
        c.near(&format!("{} rho_C", row.model), row.rho_thm_c.unwrap_or(f64::NAN), cc, 1e-2);
        c.near(&format!("{} rho_EKM<=", row.model), row.rho_ekm_upper, e, 1e-2);
    }
    let ot = ot_table().map_err(fail)?;
    let row = &ot.rows[0];
    c.near("ot rho_B", row.rho_thm_b, sqrt_2pi(), 1e-2);
    c.near("ot rho_EKM<=", row.rho_ekm_upper, 2f64.cbrt(), 1e-2);
    c.near("ot r_tight", row.r_tight.unwrap_or(f64::NAN), sqrt_2pi(), 1e-2);
    c.finish()
}

fn builtins() -> Vec<StructureSpec> {
    let radial = RadialModel { alpha: Profile::expr("1 - r^2/4").unwrap(), beta: Profile::expr("r^2/2").unwrap(), r_max: 1.5 };
    vec![
        StructureSpec::heisenberg(),
        StructureSpec::overtwisted(),
        StructureSpec::kcontact(1.0).unwrap(),
        StructureSpec::kcontact(-1.0).unwrap(),
        StructureSpec::kcontact(0.25).unwrap(),
        StructureSpec::perturbed(0.01),
        StructureSpec::radial(radial).unwrap(),
    ]
}

fn criterion_6() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let cfg = TraceConfig { samples_per_unit: 64, ..TraceConfig::default() };
    for s in builtins() {
        for &z in &s.orbit.grid(3) {
            for th in [0.0, 1.3, 2.9, 5.0] {
                let t = jacobi_trace(&s, &s.orbit, z, th, 0.5, &cfg).map_err(fail)?;
                let j = check_initial_jet(&t);
                if j.max_deviation >= worst.0 || worst.1.is_empty() {
                    worst = (j.max_deviation, format!("{} z={z:.3} theta={th}", s.id));
                }
            }
        }
    }
    let msg = format!("max jet deviation {:.2e} at {} (<= 1e-6)", worst.0, worst.1);
    if worst.0 <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let s = StructureSpec::kcontact(1.0).map_err(fail)?;
    let t = jacobi_trace(&s, &s.orbit, 0.0, 0.4, 2.0 * PI, &TraceConfig::default()).map_err(fail)?;
    let j4 = solve_jacobi4(&kcontact_curvatures(1.0), 2.0 * PI, &IntegratorConfig::default()).map_err(fail)?;
    let mut err = 0.0f64;
    for k in 0..t.r.len() {
        err = err.max((j4.x0(t.r[k]).abs() - t.w_theta[k].abs()).abs());
    }
    let msg = format!("max ||x0|-|w_theta|| = {err:.2e} on [0, 2pi] ({} radii)", t.r.len());
    if err <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Largest radius the model is defined on, capped at `cap`.
fn domain_cap(s: &StructureSpec, cap: f64) -> f64 {
    match s.kind {
        ModelKind::Radial(ref m) if m.r_max.is_finite() => cap.min(0.9 * m.r_max),
        _ => cap,
    }
}

fn mobius(v: &Series<4>, m: [f64; 4]) -> Series<4> {
    (*v * m[0] + m[1]) / (*v * m[2] + m[3])
}

fn criterion_8() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);

    // Möbius invariance of the Schwarzian of sampled Jacobi curves
    let mut mob = 0.0f64;
    let models = builtins();
    for s in &models {
        let t = jacobi_trace(s, &s.orbit, 0.0, 0.8, domain_cap(s, 2.0), &TraceConfig { samples_per_unit: 64, ..TraceConfig::default() }).map_err(fail)?;
        for _ in 0..6 {
            let r = rng.gen_range(0.2..domain_cap(s, 1.8) - 0.1);
            let v = t.jet(r).v_series();
            let s0 = schwarzian_of(&v, r).map_err(fail)?;
            let mut m = [0.0; 4];
            loop {
                for x in m.iter_mut() {
                    *x = rng.gen_range(-2.0..2.0);
                }
                let det = m[0] * m[3] - m[1] * m[2];
                let den = v.c[0] * m[2] + m[3];
                if det.abs() > 0.3 && den.abs() > 0.3 {
                    break;
                }
            }
            let s1 = schwarzian_of(&mobius(&v, m), r).map_err(fail)?;
            mob = mob.max((s1 - s0).abs() / (1.0 + s0.abs()));
        }
    }
    c.check(mob <= 1e-6, format!("Mobius {mob:.1e}"));

    // Wronskian of the two singular branches
    let mut wr = 0.0f64;
    for _ in 0..8 {
        let q = SingularPotential::comparison(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        wr = wr.max(wronskian_drift(&q, 4.0).map_err(fail)?);
    }
    c.check(wr <= 1e-8, format!("Wronskian drift {wr:.1e}"));

    // Sturm–Picone on dominated pairs
    let mut violations = 0;
    let mut undominated = 0;
    for _ in 0..50 {
        let (k1, k2) = (rng.gen_range(-1.0..2.0), rng.gen_range(0.0..3.0));
        let (d1, d2) = (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5));
        let q = SingularPotential::comparison(k1, k2);
        let qbar = SingularPotential::comparison(k1 + d1, k2 + d2);
        let rep = sturm_interlace_check(&q, &qbar, (0.0, 6.0)).map_err(fail)?;
        undominated += usize::from(!rep.dominated);
        violations += usize::from(!rep.holds);
    }
    c.check(violations == 0 && undominated == 0, format!("Sturm-Picone violations {violations}/50"));

    // energy and symplectic pairing along the variational flow
    let (mut energy, mut pairing) = (0.0f64, 0.0f64);
    let icfg = IntegratorConfig::default();
    for s in &models {
        let (z, th) = (0.1, 2.2);
        let x0 = initial_phase(s, &s.orbit, z, th).map_err(fail)?;
        let v0 = initial_variation(s, &s.orbit, z, th).map_err(fail)?;
        let r_max = domain_cap(s, 3.0);
        let tr = integrate_variational(s, &v0, r_max, &icfg).map_err(fail)?;
        let h0 = x0.hamiltonian(&s.frame);
        let w0 = symplectic_pairing(&v0.v_theta, &v0.v_z);
        for k in 0..=60 {
            let r = r_max * k as f64 / 60.0;
            let st = tr.state(r);
            energy = energy.max((st.x.hamiltonian(&s.frame) - h0).abs());
            pairing = pairing.max((symplectic_pairing(&st.v_theta, &st.v_z) - w0).abs());
        }
    }
    c.check(energy <= 1e-9, format!("energy {energy:.1e}"));
    c.check(pairing <= 1e-8, format!("pairing {pairing:.1e}"));

    // φ nondecreasing before the first focal radius
    let mut mono = true;
    for s in &models {
        let t = jacobi_trace(s, &s.orbit, 0.0, 1.7, domain_cap(s, 4.0), &TraceConfig { samples_per_unit: 256, ..TraceConfig::default() }).map_err(fail)?;
        let stop = focal_radii(&t).first().map(|f| f.r).unwrap_or(f64::INFINITY);
        for k in 1..t.r.len() {
            if t.r[k] < stop && t.phi[k] < t.phi[k - 1] - 1e-12 {
                mono = false;
            }
        }
    }
    c.check(mono, "phi monotone".into());

    // Schwarzian bound fits
    for (s, want) in [(StructureSpec::overtwisted(), (0.0, 1.0)), (StructureSpec::heisenberg(), (0.0, 0.0))] {
        let cfg = AnalysisConfig { n_z: 2, n_theta: 8, r_max: 4.0, ..AnalysisConfig::default() };
        let rep = analyze_orbit(&s, &s.orbit, &cfg).map_err(fail)?;
        let f = rep.schwarzian_fit.ok_or("no fit")?;
        c.check((f.k1 - want.0).abs() <= 1e-3 && (f.k2 - want.1).abs() <= 1e-3, format!("{} fit ({:.2e}, {:.6})", s.id, f.k1, f.k2));
    }
    let s = StructureSpec::perturbed(0.01);
    let t = jacobi_trace(&s, &s.orbit, 0.0, 0.0, 1.2, &TraceConfig::default()).map_err(fail)?;
    let sch = schwarzian_numeric(&t, (0.05, 1.0)).map_err(fail)?;
    let f = fit_schwarzian_bound(&[sch], (0.05, 1.0)).map_err(fail)?;
    c.check((f.k1 - 0.15).abs() <= 0.015, format!("perturbed k1={:.5} (want 0.15 +/- 10%; 2*k1={:.5})", f.k1, 2.0 * f.k1));
    c.finish()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("overtwisted end-to-end", criterion_1),
        ("Heisenberg trace and Schwarzian", criterion_2),
        ("K-contact closed forms and focal radius", criterion_3),
        ("closed-form constants", criterion_4),
        ("comparison tables", criterion_5),
        ("initial jets on built-in models", criterion_6),
        ("Jacobi system vs trace for kappa=1", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = f();
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {} {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

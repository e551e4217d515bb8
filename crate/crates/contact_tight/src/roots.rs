//! Scalar root finding and adaptive quadrature.

/// Brent's method on a bracket with `f(a)` and `f(b)` of opposite sign (or zero).
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub t: f64,
    /// The function touches zero without changing sign.
    pub tangential: bool,
}

/// Zeros of a function sampled at increasing `ts`: sign changes refined by
/// Brent, plus local minima of |f| that touch zero within `touch_tol`
/// (located as zeros of the derivative `df`).
pub fn sampled_zeros<F, D>(ts: &[f64], vs: &[f64], mut f: F, mut df: D, xtol: f64, touch_tol: f64) -> Vec<Zero>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let n = ts.len();
    let mut out: Vec<Zero> = Vec::new();
    let push = |z: Zero, out: &mut Vec<Zero>| {
        if out.last().map(|l| (z.t - l.t).abs() > xtol.max(1e-12) * 10.0).unwrap_or(true) {
            out.push(z);
        }
    };
    for k in 0..n {
        if vs[k] == 0.0 {
            let tangential = k > 0 && k + 1 < n && vs[k - 1].signum() == vs[k + 1].signum();
            push(Zero { t: ts[k], tangential }, &mut out);
            continue;
        }
        if k + 1 < n && vs[k + 1] != 0.0 && vs[k].signum() != vs[k + 1].signum() {
            if let Some(t) = brent(&mut f, ts[k], ts[k + 1], xtol) {
                push(Zero { t, tangential: false }, &mut out);
            }
            continue;
        }
        // touching zero: interior local minimum of |f| with no sign change nearby
        if k > 0 && k + 1 < n && vs[k - 1] != 0.0 && vs[k + 1] != 0.0 {
            let same = vs[k - 1].signum() == vs[k].signum() && vs[k].signum() == vs[k + 1].signum();
            if same && vs[k].abs() <= vs[k - 1].abs() && vs[k].abs() < vs[k + 1].abs() {
                let (lo, hi) = (ts[k - 1], ts[k + 1]);
                let t = brent(&mut df, lo, ts[k], xtol).or_else(|| brent(&mut df, ts[k], hi, xtol));
                if let Some(t) = t {
                    if f(t).abs() <= touch_tol {
                        push(Zero { t, tangential: true }, &mut out);
                    }
                }
            }
        }
    }
    out
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
pub fn integrate_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol.max(1e-15 * v.abs()) || depth >= 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(&mut f, a, b, tol, 0)
}

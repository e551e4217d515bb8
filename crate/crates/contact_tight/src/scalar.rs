//! Scalar types used to evaluate frames: plain `f64`, forward-mode jets in the
//! three chart coordinates, and truncated univariate Taylor series.
//!
//! Every frame and profile is written once against [`Scalar`]; nesting
//! `Jet<Jet<f64>>` yields Hessians and `Series<N>` gives Taylor coefficients
//! along a trajectory.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(c: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan(self) -> Self;

    fn tan(self) -> Self {
        self.sin() / self.cos()
    }
    fn sinh(self) -> Self {
        let e = self.exp();
        let ei = e.recip();
        (e - ei) * 0.5
    }
    fn cosh(self) -> Self {
        let e = self.exp();
        let ei = e.recip();
        (e + ei) * 0.5
    }
    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
    fn sq(self) -> Self {
        self * self
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::cst(1.0);
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
    /// Real power; integer exponents go through `powi` so negative bases work.
    fn powf(self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() < 64.0 {
            self.powi(p as i32)
        } else {
            (self.ln() * p).exp()
        }
    }
    /// sin(x)/x, smooth through 0.
    fn sinc(self) -> Self {
        if self.value().abs() > 0.5 {
            self.sin() / self
        } else {
            // sum (-1)^k x^{2k}/(2k+1)!
            let x2 = self * self;
            let mut c = [0.0; 12];
            let mut fact = 1.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if k > 0 {
                    fact *= ((2 * k) * (2 * k + 1)) as f64;
                }
                *ck = if k % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
            }
            horner(&c, x2)
        }
    }
    /// (1 - cos x)/x², smooth through 0.
    fn cosc(self) -> Self {
        if self.value().abs() > 0.5 {
            (Self::cst(1.0) - self.cos()) / (self * self)
        } else {
            let x2 = self * self;
            let mut c = [0.0; 12];
            let mut fact = 2.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if k > 0 {
                    fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
                }
                *ck = if k % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
            }
            horner(&c, x2)
        }
    }
}

/// Evaluate `sum c[k] x^k`.
pub fn horner<S: Scalar>(c: &[f64], x: S) -> S {
    let mut acc = S::cst(*c.last().unwrap_or(&0.0));
    for &ck in c.iter().rev().skip(1) {
        acc = acc * x + ck;
    }
    acc
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

// ---------------------------------------------------------------------------
// Jet: value and gradient in the three chart coordinates.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: [S; 3],
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S) -> Self {
        Jet { v, d: [S::cst(0.0); 3] }
    }
    /// Independent variable `k` with value `v`.
    pub fn var(v: S, k: usize) -> Self {
        let mut d = [S::cst(0.0); 3];
        d[k] = S::cst(1.0);
        Jet { v, d }
    }
    fn chain(self, f: S, df: S) -> Self {
        Jet { v: f, d: [self.d[0] * df, self.d[1] * df, self.d[2] * df] }
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]] }
    }
}
impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1], self.d[2] - o.d[2]] }
    }
}
impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Jet {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
            ],
        }
    }
}
impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        let q = self.v * inv;
        Jet {
            v: q,
            d: [
                (self.d[0] - q * o.d[0]) * inv,
                (self.d[1] - q * o.d[1]) * inv,
                (self.d[2] - q * o.d[2]) * inv,
            ],
        }
    }
}
impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { v: -self.v, d: [-self.d[0], -self.d[1], -self.d[2]] }
    }
}
impl<S: Scalar> Add<f64> for Jet<S> {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Jet { v: self.v + c, d: self.d }
    }
}
impl<S: Scalar> Sub<f64> for Jet<S> {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        Jet { v: self.v - c, d: self.d }
    }
}
impl<S: Scalar> Mul<f64> for Jet<S> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Jet { v: self.v * c, d: [self.d[0] * c, self.d[1] * c, self.d[2] * c] }
    }
}
impl<S: Scalar> Div<f64> for Jet<S> {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self * (1.0 / c)
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn cst(c: f64) -> Self {
        Jet::constant(S::cst(c))
    }
    fn value(&self) -> f64 {
        self.v.value()
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn atan(self) -> Self {
        self.chain(self.v.atan(), (self.v * self.v + 1.0).recip())
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::cst(1.0);
        }
        self.chain(self.v.powi(n), self.v.powi(n - 1) * n as f64)
    }
}

// ---------------------------------------------------------------------------
// Truncated Taylor series in one variable: c[k] is the coefficient of t^k.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Series<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Series { c }
    }
    /// The variable t + t0 around t0.
    pub fn var(t0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = t0;
        if N > 1 {
            c[1] = 1.0;
        }
        Series { c }
    }
    /// k-th derivative at the expansion point.
    pub fn deriv_at(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.c[k] * f
    }
    /// Termwise derivative (the top coefficient becomes 0).
    pub fn derivative(&self) -> Self {
        let mut c = [0.0; N];
        for k in 1..N {
            c[k - 1] = k as f64 * self.c[k];
        }
        Series { c }
    }
    /// Divide by t^k, discarding the first k coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        let mut c = [0.0; N];
        for j in k..N {
            c[j - k] = self.c[j];
        }
        Series { c }
    }
    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.c, t)
    }
    /// sin and cos together (shared recurrence).
    fn sin_cos(self) -> (Self, Self) {
        let mut s = [0.0; N];
        let mut co = [0.0; N];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..N {
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                a += w * co[k - j];
                b += w * s[k - j];
            }
            s[k] = a / k as f64;
            co[k] = -b / k as f64;
        }
        (Series { c: s }, Series { c: co })
    }
}

impl<const N: usize> Add for Series<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] += o.c[k];
        }
        self
    }
}
impl<const N: usize> Sub for Series<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] -= o.c[k];
        }
        self
    }
}
impl<const N: usize> Mul for Series<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for i in 0..N {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..N - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Series { c }
    }
}
impl<const N: usize> Div for Series<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut c = [0.0; N];
        let inv = 1.0 / o.c[0];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= o.c[j] * c[k - j];
            }
            c[k] = acc * inv;
        }
        Series { c }
    }
}
impl<const N: usize> Neg for Series<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for k in 0..N {
            self.c[k] = -self.c[k];
        }
        self
    }
}
impl<const N: usize> Add<f64> for Series<N> {
    type Output = Self;
    fn add(mut self, v: f64) -> Self {
        self.c[0] += v;
        self
    }
}
impl<const N: usize> Sub<f64> for Series<N> {
    type Output = Self;
    fn sub(mut self, v: f64) -> Self {
        self.c[0] -= v;
        self
    }
}
impl<const N: usize> Mul<f64> for Series<N> {
    type Output = Self;
    fn mul(mut self, v: f64) -> Self {
        for k in 0..N {
            self.c[k] *= v;
        }
        self
    }
}
impl<const N: usize> Div<f64> for Series<N> {
    type Output = Self;
    fn div(self, v: f64) -> Self {
        self * (1.0 / v)
    }
}

impl<const N: usize> Scalar for Series<N> {
    fn cst(v: f64) -> Self {
        Series::constant(v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn exp(self) -> Self {
        let mut e = [0.0; N];
        e[0] = self.c[0].exp();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Series { c: e }
    }
    fn ln(self) -> Self {
        let mut l = [0.0; N];
        l[0] = self.c[0].ln();
        for k in 1..N {
            let mut acc = k as f64 * self.c[k];
            for j in 1..k {
                acc -= j as f64 * l[j] * self.c[k - j];
            }
            l[k] = acc / (k as f64 * self.c[0]);
        }
        Series { c: l }
    }
    fn sqrt(self) -> Self {
        let mut s = [0.0; N];
        s[0] = self.c[0].sqrt();
        for k in 1..N {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Series { c: s }
    }
    fn atan(self) -> Self {
        // d/dt atan(x) = x' / (1 + x²)
        let dx = self.derivative();
        let q = dx / (self * self + 1.0);
        let mut c = [0.0; N];
        c[0] = self.c[0].atan();
        for k in 1..N {
            c[k] = q.c[k - 1] / k as f64;
        }
        Series { c }
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::cst(1.0);
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_product_rule() {
        let x = Jet::var(2.0, 0);
        let y = Jet::var(3.0, 1);
        let f = x * x * y + x.sin();
        assert!((f.v - (12.0 + 2f64.sin())).abs() < 1e-15);
        assert!((f.d[0] - (12.0 + 2f64.cos())).abs() < 1e-14);
        assert!((f.d[1] - 4.0).abs() < 1e-15);
        assert_eq!(f.d[2], 0.0);
    }

    #[test]
    fn nested_jet_gives_hessian() {
        let seed = |v: f64, k: usize| Jet { v: Jet::var(v, k), d: [0, 1, 2].map(|j| Jet::constant(if j == k { 1.0 } else { 0.0 })) };
        let x = seed(0.7, 0);
        let y = seed(-0.3, 1);
        let f = (x * y).exp();
        let e = (0.7f64 * -0.3).exp();
        // d²/dx dy exp(xy) = (1 + xy) exp(xy)
        assert!((f.d[0].d[1] - (1.0 + 0.7 * -0.3) * e).abs() < 1e-14);
        assert!((f.d[0].d[0] - 0.09 * e).abs() < 1e-14);
        assert!((f.v.d[1] - 0.7 * e).abs() < 1e-14);
    }

    #[test]
    fn series_elementary_functions() {
        let t = Series::<8>::var(0.3);
        let s = t.sin();
        for k in 0..8 {
            let exact = match k % 4 {
                0 => 0.3f64.sin(),
                1 => 0.3f64.cos(),
                2 => -0.3f64.sin(),
                _ => -0.3f64.cos(),
            };
            assert!((s.deriv_at(k) - exact).abs() < 1e-12, "k={k}");
        }
        let e = (t * 2.0).exp().ln();
        assert!((e.c[1] - 2.0).abs() < 1e-13);
        assert!(e.c[3].abs() < 1e-13);
        let a = t.atan();
        assert!((a.c[1] - 1.0 / 1.09).abs() < 1e-14);
        let r = (t * t).sqrt();
        assert!((r.c[1] - 1.0).abs() < 1e-13 && r.c[2].abs() < 1e-12);
        let q = Series::<8>::cst(1.0) / (Series::<8>::var(0.0) + 1.0);
        assert!((q.c[5] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sinc_cosc_continuous_across_switch() {
        for &x in &[0.49999, 0.50001, 1e-4, 0.2] {
            assert!((Scalar::sinc(x) - f64::sin(x) / x).abs() < 1e-14);
            let exact = 2.0 * (x / 2.0).sin().powi(2) / (x * x);
            assert!((Scalar::cosc(x) - exact).abs() < 1e-14);
        }
    }
}

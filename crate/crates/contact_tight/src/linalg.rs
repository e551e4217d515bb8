//! 3×3 helpers, generic over the scalar type.

use crate::scalar::Scalar;

pub fn cross<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn det<S: Scalar>(m: &[[S; 3]; 3]) -> S {
    dot(&m[0], &cross(&m[1], &m[2]))
}

/// Dual coframe of the frame with rows f0, f1, f2: row i of the result is ν_i,
/// so that ν_i · f_j = δ_ij.
pub fn dual<S: Scalar>(m: &[[S; 3]; 3]) -> [[S; 3]; 3] {
    let d = det(m).recip();
    let n0 = cross(&m[1], &m[2]);
    let n1 = cross(&m[2], &m[0]);
    let n2 = cross(&m[0], &m[1]);
    [n0.map(|c| c * d), n1.map(|c| c * d), n2.map(|c| c * d)]
}

/// Solve M p = h where M has rows f_i (so h_i = f_i · p).
pub fn solve_rows<S: Scalar>(m: &[[S; 3]; 3], h: &[S; 3]) -> [S; 3] {
    let nu = dual(m);
    [0, 1, 2].map(|a| nu[0][a] * h[0] + nu[1][a] * h[1] + nu[2][a] * h[2])
}

/// Condition number in the 1-norm, infinite when singular.
pub fn cond1(m: &[[f64; 3]; 3]) -> f64 {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return f64::INFINITY;
    }
    let inv = dual(m);
    let norm1 = |a: &[[f64; 3]; 3]| (0..3).map(|j| (0..3).map(|i| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max);
    norm1(m) * norm1(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_inverse_transpose() {
        let m = [[1.0, 2.0, 0.5], [0.0, 1.0, -1.0], [3.0, 0.2, 1.0]];
        let nu = dual(&m);
        for i in 0..3 {
            for j in 0..3 {
                let e = dot(&nu[i], &m[j]);
                assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let p = solve_rows(&m, &[1.0, -2.0, 0.5]);
        assert!((dot(&m[1], &p) + 2.0).abs() < 1e-14);
        assert!(cond1(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1e-13]]) > 1e12);
    }
}

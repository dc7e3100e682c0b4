//! Scalar helpers shared across modules.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Dot product evaluated as if in twice the working precision.
pub(crate) fn dot2(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (p, pe) = two_prod(a, b);
        let (t, te) = two_sum(s, p);
        s = t;
        c += pe + te;
    }
    s + c
}

/// Compensated sum.
pub(crate) fn sum2(x: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in x {
        let (t, e) = two_sum(s, v);
        s = t;
        c += e;
    }
    s + c
}

/// Number of significant bits of `s` (0 for 0).
#[inline]
pub(crate) fn bit_len(s: u64) -> u32 {
    64 - s.leading_zeros()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` for `s > 1`, `a > 0`, by
/// Euler-Maclaurin summation.
pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    // B_{2j} / (2j)!
    const B2J_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let n_direct = if a < 24.0 { (24.0 - a) as usize + 1 } else { 0 };
    let direct = sum2((0..n_direct).map(|k| libm::pow(k as f64 + a, -s)));
    let x = a + n_direct as f64;
    let mut tail = libm::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * libm::pow(x, -s);
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
    let mut rising = s;
    let mut xp = libm::pow(x, -s - 1.0);
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        let t = c * rising * xp;
        tail += t;
        if t.abs() < 1e-18 * tail.abs() {
            break;
        }
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xp /= x * x;
    }
    direct + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // x^12 over [-1,1] = 2/13, degree 12 <= 13
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_matches_reference_values() {
        // Reference values from 50-digit evaluations.
        assert!((hurwitz_zeta(5.0, 1.0) - 1.036_927_755_143_369_926_3).abs() < 1e-15);
        assert!((hurwitz_zeta(2.0, 1.0) - 1.644_934_066_848_226_436_5).abs() < 1e-15);
        assert!((hurwitz_zeta(5.0, 17.0) / 3.362_627_917_076_576_145e-6 - 1.0).abs() < 1e-13);
        assert!((hurwitz_zeta(3.0, 100.0) / 5.050_249_991_667_499_85e-5 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn dot2_recovers_cancelled_sum() {
        let x = [1e16, 1.0, -1e16];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&x, &y), 1.0);
    }
}

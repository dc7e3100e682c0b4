use freudhc_core::spectral::*;
use proptest::prelude::*;

fn mi(k: &[u32]) -> MultiIndex {
    MultiIndex::from(k)
}

fn dense_1d(coeffs: &[f64]) -> CoeffTensor {
    CoeffTensor::from_univariate(coeffs)
}

/// Neumaier summation.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn coeff_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..300)
}

/// Iterates over the box `{0..limit}^d`.
fn for_each_in_box(dim: usize, limit: u32, mut f: impl FnMut(&[u32])) {
    let mut s = vec![0u32; dim];
    loop {
        f(&s);
        let mut j = 0;
        loop {
            if j == dim {
                return;
            }
            s[j] += 1;
            if s[j] < limit {
                break;
            }
            s[j] = 0;
            j += 1;
        }
    }
}

proptest! {
    #[test]
    fn vp_equals_average_of_partial_sums(c in prop::collection::vec(-4.0f64..4.0, 1..300), m in 1u64..=64) {
        let f = dense_1d(&c);
        let direct = Multiplier1D::vp(m).unwrap().apply(&f).unwrap();
        let partial: Vec<CoeffTensor> =
            (m + 1..=2 * m).map(|k| Multiplier1D::fourier(k).unwrap().apply(&f).unwrap()).collect();
        for j in 0..c.len() as u32 {
            let k = mi(&[j]);
            let avg = compensated_sum(partial.iter().map(|p| p.get(&k))) / m as f64;
            let a = direct.get(&k);
            prop_assert!((a - avg).abs() <= 1e-15, "m={} j={}: {} vs {}", m, j, a, avg);
        }
    }

    #[test]
    fn vp_reproduces_polynomials(m in 1u64..=64, seed in prop::collection::vec(-5.0f64..5.0, 65)) {
        let phi = dense_1d(&seed[..=m as usize]);
        let out = Multiplier1D::vp(m).unwrap().apply(&phi).unwrap();
        let res = out.axpy(-1.0, &phi).unwrap().l2_norm();
        prop_assert!(res <= 1e-13);
    }

    #[test]
    fn partial_sums_are_idempotent(c in coeff_vec(), m in 1u64..100) {
        let s = Multiplier1D::fourier(m).unwrap();
        let once = s.apply(&dense_1d(&c)).unwrap();
        prop_assert_eq!(s.apply(&once).unwrap(), once);
    }

    #[test]
    fn tensor_multipliers_commute(
        entries in prop::collection::vec(((0u32..20, 0u32..20), -1.0f64..1.0), 1..40),
        m1 in 1u64..8, m2 in 1u64..8,
    ) {
        let f = CoeffTensor::from_entries(2, entries.into_iter().map(|((a, b), v)| (mi(&[a, b]), v))).unwrap();
        let (a, b) = (Multiplier1D::vp(m1).unwrap(), Multiplier1D::vp(m2).unwrap());
        let id = Multiplier1D::identity();
        let both = tensor_apply(&f, &[a.clone(), b.clone()]).unwrap();
        let ab = tensor_apply(&tensor_apply(&f, &[a.clone(), id.clone()]).unwrap(), &[id.clone(), b.clone()]).unwrap();
        let ba = tensor_apply(&tensor_apply(&f, &[id.clone(), b]).unwrap(), &[a, id]).unwrap();
        for other in [&ab, &ba] {
            prop_assert_eq!(other.len(), both.len());
            for (k, v) in &both {
                prop_assert!((other.get(k) - v).abs() <= 1e-15 * v.abs());
            }
        }
    }

    #[test]
    fn hyperbolic_fourier_is_idempotent(
        entries in prop::collection::vec(((0u32..70, 0u32..70), -1.0f64..1.0), 1..60),
        xi in 0u32..8,
    ) {
        let f = CoeffTensor::from_entries(2, entries.into_iter().map(|((a, b), v)| (mi(&[a, b]), v))).unwrap();
        let once = hyperbolic_fourier_apply(&f, xi).unwrap();
        prop_assert_eq!(hyperbolic_fourier_apply(&once, xi).unwrap(), once);
    }

    #[test]
    fn hyperbolic_vp_output_lies_in_h(
        entries in prop::collection::vec(((0u32..70, 0u32..70), -1.0f64..1.0), 1..60),
        xi in 0u32..6,
    ) {
        let f = CoeffTensor::from_entries(2, entries.into_iter().map(|((a, b), v)| (mi(&[a, b]), v))).unwrap();
        let h = index_set_h(xi, 2);
        for (k, _) in &hyperbolic_vp_apply(&f, xi).unwrap() {
            prop_assert!(h.contains(k));
        }
    }

    #[test]
    fn truncation_error_is_the_coefficient_tail(
        entries in prop::collection::vec(((0u32..30, 0u32..30), -1.0f64..1.0), 1..60),
        xi in 1.0f64..200.0,
    ) {
        let f = CoeffTensor::from_entries(2, entries.into_iter().map(|((a, b), v)| (mi(&[a, b]), v))).unwrap();
        let t = truncate_g(&f, xi, 1.5).unwrap();
        let err = f.axpy(-1.0, &t).unwrap().norm_sq();
        let tail: f64 = f
            .iter()
            .filter(|(k, _)| ((k.shifted_product() as f64).powf(1.5)) > xi)
            .map(|(_, v)| v * v)
            .sum();
        prop_assert!((err - tail).abs() <= 1e-15 * f.norm_sq());
    }
}

#[test]
fn block_families_telescope() {
    for big_k in 0..=12u32 {
        let full_vp = Multiplier1D::vp(1 << big_k).unwrap();
        let full_s = Multiplier1D::fourier(1 << big_k).unwrap();
        for j in 0..(4u64 << big_k) {
            let v: f64 = (0..=big_k).map(|k| dyadic_vp_gain(1, k, j)).sum();
            let s: f64 = (0..=big_k).map(|k| dyadic_fourier_gain(1, k, j)).sum();
            assert_eq!(v, full_vp.gain(j), "K={big_k} j={j}");
            assert_eq!(s, full_s.gain(j), "K={big_k} j={j}");
        }
    }
}

#[test]
fn all_gains_lie_in_unit_interval() {
    for m in 1..40u64 {
        for k in 0..6 {
            for j in 0..(m << 7) {
                for g in [vp_gain(m, j), dyadic_vp_gain(m, k, j), dyadic_fourier_gain(m, k, j)] {
                    assert!((0.0..=1.0).contains(&g));
                }
            }
        }
    }
    for d in 1..=3 {
        for xi in 0..=5 {
            let op = HyperbolicOperator::new(CrossFamily::Vp, xi, d).unwrap();
            for_each_in_box(d, 2 << xi, |s| assert!((0.0..=1.0).contains(&op.gain(s))));
        }
    }
}

#[test]
fn vp_block_support() {
    for m in 1..6u64 {
        for k in 1..6u32 {
            for j in 0..(m << (k + 2)) {
                if dyadic_vp_gain(m, k, j) != 0.0 {
                    assert!(j > m << (k - 1) && j < (m << (k + 1)));
                }
            }
        }
    }
}

#[test]
fn complement_annihilates_polynomials() {
    for k in 0..6u32 {
        let e = Multiplier1D::vp_complement(k);
        let v = Multiplier1D::vp(1 << k).unwrap();
        for j in 0..=(1u64 << k) {
            assert_eq!(e.gain(j), 0.0);
            assert_eq!(e.gain(j) * v.gain(j), 0.0);
        }
    }
    // E_(k1) (x) E_(k2) on P_(2^k1) (x) P_(2^k2)
    let (k1, k2) = (2u32, 3u32);
    let mut f = CoeffTensor::new(2);
    for a in 0..=(1u32 << k1) {
        for b in 0..=(1u32 << k2) {
            f.insert(mi(&[a, b]), 1.0 + f64::from(a) - 0.5 * f64::from(b)).unwrap();
        }
    }
    let out = tensor_apply(&f, &[Multiplier1D::vp_complement(k1), Multiplier1D::vp_complement(k2)]).unwrap();
    assert!(out.is_empty());
}

#[test]
fn vp_cross_reproduces_on_h1() {
    for d in 1..=3usize {
        for xi in 0..=6u32 {
            let op = HyperbolicOperator::new(CrossFamily::Vp, xi, d).unwrap();
            let h = index_set_h(xi, d);
            let h1 = index_set_h1(xi, d);
            let limit = if d == 3 { (2 << xi).min(96) } else { 2 << xi };
            for_each_in_box(d, limit + 2, |s| {
                let log_sum: u32 = s.iter().map(|&sj| if sj <= 1 { 0 } else { 32 - (sj - 1).leading_zeros() }).sum();
                let g = op.gain(s);
                let k = mi(s);
                if log_sum <= xi {
                    assert_eq!(g, 1.0, "d={d} xi={xi} s={s:?}");
                    assert!(h1.contains(&k));
                } else {
                    assert!(!h1.contains(&k));
                }
                assert_eq!(g > 0.0, h.contains(&k), "d={d} xi={xi} s={s:?}");
            });
        }
    }
}

#[test]
fn fourier_cross_is_zero_one() {
    for d in 1..=3usize {
        for xi in 0..=8u32 {
            let limit = if d == 3 { 40 } else { 1 << (xi + 1) };
            for_each_in_box(d, limit, |s| {
                // sum of tensor blocks over |k|_1 <= xi
                let mut total = 0.0;
                for_each_in_box(d, xi + 1, |k| {
                    if k.iter().sum::<u32>() <= xi {
                        total += k
                            .iter()
                            .zip(s)
                            .map(|(&kj, &sj)| dyadic_fourier_gain(1, kj, u64::from(sj)))
                            .product::<f64>();
                    }
                });
                assert!(total == 0.0 || total == 1.0);
                let op = HyperbolicOperator::new(CrossFamily::Fourier, xi, d).unwrap();
                assert_eq!(op.gain(s), total);
            });
        }
    }
}

#[test]
fn one_dimensional_crosses_are_dyadic_means() {
    for xi in 0..8u32 {
        let vcross = HyperbolicOperator::new(CrossFamily::Vp, xi, 1).unwrap();
        let scross = HyperbolicOperator::new(CrossFamily::Fourier, xi, 1).unwrap();
        let v = Multiplier1D::vp(1 << xi).unwrap();
        let s = Multiplier1D::fourier(1 << xi).unwrap();
        for j in 0..(4u32 << xi) {
            assert_eq!(vcross.gain(&[j]), v.gain(u64::from(j)));
            assert_eq!(scross.gain(&[j]), s.gain(u64::from(j)));
        }
    }
}

#[test]
fn rank_growth_of_h() {
    for d in [2usize, 3] {
        let ratios: Vec<f64> = (4..=14u32)
            .map(|xi| {
                let card = rank_of(&OperatorDescriptor::HyperbolicVp { xi, dim: d }).unwrap() as f64;
                card / (2f64.powi(xi as i32) * f64::from(xi).powi(d as i32 - 1))
            })
            .collect();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 10.0, "d={d}: {ratios:?}");
    }
}

#[test]
fn rank_growth_of_g() {
    let ratios: Vec<f64> = (4..=14)
        .map(|e| {
            let xi = f64::from(1u32 << e);
            g_cardinality(xi, 2, 1.0) as f64 / (xi * xi.ln())
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min <= 3.0, "{ratios:?}");
}

#[test]
fn index_sets_are_downward_closed() {
    for d in 1..=3 {
        for xi in 0..=4 {
            assert!(index_set_h(xi, d).is_downward_closed());
            assert!(index_set_h1(xi, d).is_downward_closed());
        }
        for &xi in &[1.0, 5.5, 30.0] {
            assert!(index_set_g(xi, d, 1.0).unwrap().is_downward_closed());
        }
    }
}

#[test]
fn largest_xi_is_monotone_and_admissible() {
    let families = [XiFamily::HyperbolicVp, XiFamily::HyperbolicFourier, XiFamily::TruncateG { r_lambda: 1.5 }];
    for fam in families {
        for d in 1..=3usize {
            let mut prev = f64::MIN;
            for n in 8..400u64 {
                let xi = largest_xi(n, fam, d).unwrap();
                assert!(xi >= prev);
                prev = xi;
                let rank = match fam {
                    XiFamily::HyperbolicVp => rank_of(&OperatorDescriptor::HyperbolicVp { xi: xi as u32, dim: d }),
                    XiFamily::HyperbolicFourier => {
                        rank_of(&OperatorDescriptor::HyperbolicFourier { xi: xi as u32, dim: d })
                    }
                    XiFamily::TruncateG { r_lambda } => {
                        rank_of(&OperatorDescriptor::TruncateG { xi, dim: d, r_lambda })
                    }
                }
                .unwrap();
                assert!(rank <= u128::from(n), "{fam:?} d={d} n={n}");
            }
        }
    }
}

use freudhc_core::analysis::{h_norm, rho};
use freudhc_core::spectral::*;
use freudhc_core::widths::*;
use freudhc_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn one_dimensional_widths_are_reciprocals() {
    for r in [1.0, 1.5] {
        let t = exact_diagonal_widths(1, r, 2048).unwrap();
        for row in &t.rows {
            let scaled = row.d_n * ((row.n + 1) as f64).powf(r);
            assert!((scaled - 1.0).abs() <= 1e-9, "n={}: {scaled}", row.n);
        }
    }
}

#[test]
fn two_dimensional_small_widths() {
    let t = exact_diagonal_widths(2, 1.0, 10).unwrap();
    let expected = [1.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25, 0.25, 0.25];
    for (n, want) in expected.iter().enumerate() {
        assert_eq!(t.d_n(n as u64), Some(*want));
    }
    for dim in 1..=4 {
        assert_eq!(exact_diagonal_widths(dim, 2.5, 3).unwrap().d_n(0), Some(1.0));
    }
}

#[test]
fn widths_are_nonincreasing_and_bound_invariant() {
    for dim in [2, 3] {
        let small = exact_diagonal_widths(dim, 1.5, 300).unwrap();
        let large = exact_diagonal_widths(dim, 1.5, 3000).unwrap();
        assert_eq!(&small.rows[..], &large.rows[..=300]);
        assert!(large.rows.windows(2).all(|w| w[1].d_n <= w[0].d_n));
    }
}

#[test]
fn theory_rate_examples() {
    for n in [2.0, 17.0, 1000.0] {
        assert_eq!(theory_rate(n, 1, 1.5).unwrap(), n.powf(-1.5));
    }
    let e2 = std::f64::consts::E.powi(2);
    assert!((theory_rate(e2, 2, 1.0).unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-15);
    assert!(theory_rate(1.5, 2, 1.0).is_err());
}

#[test]
fn width_ratio_envelope_in_two_dimensions() {
    for r in [1.0, 1.5] {
        let t = exact_diagonal_widths(2, r, 4096).unwrap();
        let ratios: Vec<f64> = t.rows[16..].iter().map(|row| row.ratio.unwrap()).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(lo >= 0.25 && hi <= 4.0, "r={r}: [{lo}, {hi}]");
    }
}

#[test]
fn invalid_width_requests() {
    assert!(exact_diagonal_widths(0, 1.0, 5).is_err());
    assert!(exact_diagonal_widths(2, 0.0, 5).is_err());
    assert!(matches!(exact_diagonal_widths(2, 1.0, 1 << 30), Err(Error::EnumerationBound { .. })));
}

#[test]
fn xi_sequences() {
    let ns: Vec<u64> = (1..=200).collect();
    let g = xi_sequence(&ns, XiFamily::TruncateG { r_lambda: 1.0 }, 1).unwrap();
    for (n, xi) in ns.iter().zip(&g) {
        assert_eq!(*xi, *n as f64);
    }
    let ns: Vec<u64> = (2..=5000).step_by(7).collect();
    let v = xi_sequence(&ns, XiFamily::HyperbolicVp, 1).unwrap();
    for (n, xi) in ns.iter().zip(&v) {
        assert_eq!(*xi, (*n as f64 / 2.0).log2().floor());
    }
    for family in [XiFamily::HyperbolicVp, XiFamily::HyperbolicFourier, XiFamily::TruncateG { r_lambda: 1.5 }] {
        let ns: Vec<u64> = (8..3000).step_by(13).collect();
        let xs = xi_sequence(&ns, family, 3).unwrap();
        assert!(xs.windows(2).all(|w| w[1] >= w[0]));
    }
    assert!(matches!(xi_sequence(&[1], XiFamily::HyperbolicVp, 1), Err(Error::NoAdmissibleXi { .. })));
}

#[test]
fn truncation_extreme_points_attain_the_width() {
    // the worst extreme point rho_k^{-1} p_k left out by S*_{xi_n} is d_n (up to rounding)
    for (dim, r) in [(1usize, 1.0), (2, 1.0), (2, 1.5), (3, 1.0)] {
        let table = exact_diagonal_widths(dim, r, 400).unwrap();
        for n in [1u64, 5, 17, 64, 255, 400] {
            let xi = xi_sequence(&[n], XiFamily::TruncateG { r_lambda: r }, dim).unwrap()[0];
            let g = GTruncation::new(xi, dim, r).unwrap();
            assert!(g.rank() <= u128::from(n));
            let limit = 2 * (g.product_bound() as u32 + 1);
            let mut worst = 0.0f64;
            let mut k = vec![0u32; dim];
            loop {
                if !g.contains(&k) {
                    worst = worst.max(1.0 / rho(&MultiIndex::from(k.as_slice()), r));
                }
                let mut j = 0;
                while j < dim {
                    k[j] += 1;
                    if k[j] < limit {
                        break;
                    }
                    k[j] = 0;
                    j += 1;
                }
                if j == dim {
                    break;
                }
            }
            let d_n = table.d_n(n).unwrap();
            assert!((worst - d_n).abs() <= 1e-15 * d_n, "d={dim}, r={r}, n={n}: {worst} vs {d_n}");
        }
    }
}

#[test]
fn dyadic_blocks_of_the_unit_ball_decay() {
    // v_k is supported on degrees above 2^{k_j - 1}, so for ||f||_H <= 1
    // ||v_k f|| 2^{r |k|_1} <= 2^{r d}
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (dim, r) = (2usize, 1.5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut f = CoeffTensor::new(dim);
        for a in 0..64u32 {
            for b in 0..64u32 {
                let k = MultiIndex::from(&[a, b][..]);
                let c: f64 = rng.random_range(-1.0..1.0) / rho(&k, r);
                f.insert(k, c).unwrap();
            }
        }
        let f = f.scaled(1.0 / h_norm(&f, r));
        for k1 in 0..5u32 {
            for k2 in 0..5u32 {
                let block = [Multiplier1D::dyadic_vp(1, k1).unwrap(), Multiplier1D::dyadic_vp(1, k2).unwrap()];
                let part = tensor_apply(&f, &block).unwrap();
                worst = worst.max(part.l2_norm() * 2f64.powf(r * f64::from(k1 + k2)));
            }
        }
    }
    assert!(worst > 0.0 && worst <= 2f64.powf(r * dim as f64), "{worst}");
}

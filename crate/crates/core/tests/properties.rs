use proptest::prelude::*;
use psinterp::pso::{optimize, optimize_with_anchors};
use psinterp::{
    decimate, dwt2, fuse_details, generate_2x, idwt2, interpolate, psnr, ssim, swt2, DecimationScheme, DetailTriple,
    FusionWeights, Image, PipelineConfig, Plane, PsoConfig, ScaleFactor, WaveletFilter, WaveletKind,
};

fn kind() -> impl Strategy<Value = WaveletKind> {
    prop_oneof![Just(WaveletKind::Db2), Just(WaveletKind::Dmey)]
}

/// Plane with the given dimension ranges and samples in [0, 1].
fn plane(w: std::ops::Range<usize>, h: std::ops::Range<usize>) -> impl Strategy<Value = Plane> {
    (w, h).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0..=1.0f64, w * h).prop_map(move |d| Plane::from_vec(w, h, d).unwrap())
    })
}

fn even_plane(max_half: usize) -> impl Strategy<Value = Plane> {
    (1..max_half, 1..max_half).prop_flat_map(|(hw, hh)| plane(2 * hw..2 * hw + 1, 2 * hh..2 * hh + 1))
}

fn weights() -> impl Strategy<Value = FusionWeights> {
    prop::array::uniform6(0.0..=1.0f64).prop_map(|w| FusionWeights::new(w).unwrap())
}

fn details(w: usize, h: usize) -> impl Strategy<Value = DetailTriple> {
    (plane(w..w + 1, h..h + 1), plane(w..w + 1, h..h + 1), plane(w..w + 1, h..h + 1))
        .prop_map(|(lh, hl, hh)| DetailTriple { lh, hl, hh })
}

fn fast_pso(seed: u64) -> PsoConfig {
    PsoConfig {
        max_iters: 6,
        min_iters_before_early_stop: 3,
        seed,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dwt_roundtrip(p in even_plane(20), k in kind()) {
        let f = WaveletFilter::new(k);
        let back = idwt2(&dwt2(&p, &f).unwrap(), &f).unwrap();
        prop_assert!(back.max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn dwt_is_linear(a in even_plane(12), s in -2.0..2.0f64, k in kind()) {
        let f = WaveletFilter::new(k);
        let b = a.map(|v| (v * 7.3).sin());
        let mut sum = a.scaled(s);
        sum.add_scaled(&b, 1.0).unwrap();
        let (da, db, ds) = (dwt2(&a, &f).unwrap(), dwt2(&b, &f).unwrap(), dwt2(&sum, &f).unwrap());
        for ((x, y), z) in da.bands().iter().zip(db.bands()).zip(ds.bands()) {
            let mut expected = x.scaled(s);
            expected.add_scaled(y, 1.0).unwrap();
            prop_assert!(expected.max_abs_diff(z) < 1e-9);
        }
    }

    #[test]
    fn dwt_preserves_energy(p in even_plane(16), k in kind()) {
        let f = WaveletFilter::new(k);
        let energy = |q: &Plane| q.data().iter().map(|v| v * v).sum::<f64>();
        let total: f64 = dwt2(&p, &f).unwrap().bands().iter().map(|b| energy(b)).sum();
        prop_assert!((total - energy(&p)).abs() < 1e-9 * (1.0 + energy(&p)));
    }

    #[test]
    fn swt_commutes_with_circular_shifts(p in even_plane(10), dx in -20isize..20, dy in -20isize..20, k in kind()) {
        let f = WaveletFilter::new(k);
        let a = swt2(&p, &f).unwrap();
        let b = swt2(&p.circular_shift(dx, dy), &f).unwrap();
        for (x, y) in a.bands().iter().zip(b.bands()) {
            prop_assert!(x.circular_shift(dx, dy).max_abs_diff(y) < 1e-9);
        }
    }

    #[test]
    fn fusion_is_linear_in_weights(
        (coarse, fine) in (1usize..6, 1usize..6).prop_flat_map(|(w, h)| (details(w, h), details(2 * w, 2 * h))),
        w in weights(),
        a in 0.0..=1.0f64,
    ) {
        let scaled = FusionWeights::from_slice(&w.as_array().map(|v| a * v)).unwrap();
        let full = fuse_details(&coarse, &fine, &w).unwrap();
        let part = fuse_details(&coarse, &fine, &scaled).unwrap();
        for (x, y) in [(&full.lh, &part.lh), (&full.hl, &part.hl), (&full.hh, &part.hh)] {
            prop_assert!(x.scaled(a).max_abs_diff(y) < 1e-12);
        }
    }

    #[test]
    fn generation_fixes_constants(c in 0.0..=1.0f64, w in weights(), k in kind(), hw in 1usize..8, hh in 1usize..8) {
        let out = generate_2x(&Plane::filled(2 * hw, 2 * hh, c), &w, &WaveletFilter::new(k)).unwrap();
        prop_assert_eq!(out.dims(), (4 * hw, 4 * hh));
        prop_assert!(out.data().iter().all(|v| (v - c).abs() < 1e-9));
    }

    #[test]
    fn decimation_fixes_constants(c in 0.0..=1.0f64, factor in prop_oneof![Just(2usize), Just(4)], q in 1usize..5) {
        let img = Image::gray(Plane::filled(4 * q * factor, 4 * q * factor, c)).unwrap();
        for scheme in DecimationScheme::ALL {
            let out = decimate(&img, scheme, factor).unwrap();
            prop_assert!(out.plane(0).data().iter().all(|v| (v - c).abs() < 1e-12));
        }
    }

    #[test]
    fn metrics_are_symmetric_and_bounded(a in plane(11..20, 11..20)) {
        let b = a.map(|v| (1.0 - v) * 0.5 + 0.25 * v * v);
        let (ia, ib) = (Image::gray(a).unwrap(), Image::gray(b).unwrap());
        let s = ssim(&ia, &ib).unwrap();
        prop_assert!((-1.0..=1.0).contains(&s));
        prop_assert!((s - ssim(&ib, &ia).unwrap()).abs() < 1e-12);
        prop_assert!((ssim(&ia, &ia).unwrap() - 1.0).abs() < 1e-12);
        let p = psnr(&ia, &ib, 1.0).unwrap();
        prop_assert!(p == psnr(&ib, &ia, 1.0).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pso_invariants(seed in any::<u64>(), target in prop::array::uniform6(0.0..=1.0f64)) {
        let fitness = |x: &[f64]| -x.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let config = PsoConfig::default().with_seed(seed);
        let z = vec![0.5; 6];
        let out = optimize_with_anchors(fitness, &config, std::slice::from_ref(&z)).unwrap();
        prop_assert!(out.history.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(out.best_position.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(out.best_fitness >= fitness(&z));
        prop_assert_eq!(out.best_fitness, fitness(&out.best_position));
        prop_assert!(out.iterations <= config.max_iters);
        prop_assert_eq!(&out, &optimize_with_anchors(fitness, &config, &[z]).unwrap());
    }

    #[test]
    fn pso_stalls_on_flat_fitness(seed in any::<u64>(), min in 1usize..10) {
        let config = PsoConfig { min_iters_before_early_stop: min, max_iters: 15, seed, ..Default::default() };
        let out = optimize(|_: &[f64]| 0.0, &config).unwrap();
        prop_assert_eq!(out.iterations, min + 1);
        prop_assert_eq!(out.best_fitness, 0.0);
    }

    #[test]
    fn interpolate_size_contract(
        p in plane(16..30, 16..30),
        alpha in 1.1..4.5f64,
        seed in 0u64..4,
    ) {
        let (w, h) = p.dims();
        let config = PipelineConfig { pso: fast_pso(seed), ..Default::default() };
        let out = interpolate(&Image::gray(p).unwrap(), ScaleFactor::new(alpha).unwrap(), &config).unwrap();
        let expected = ((alpha * w as f64).round() as usize, (alpha * h as f64).round() as usize);
        prop_assert_eq!(out.image.dims(), expected);
        prop_assert!(out.image.plane(0).data().iter().all(|v| (0.0..=1.0).contains(v)));
        let m = &out.models[0];
        prop_assert!(m.fitness_db.is_finite());
        prop_assert!(m.weights.as_array().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

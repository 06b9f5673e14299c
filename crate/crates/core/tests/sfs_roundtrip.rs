use facerec_core::sfs::{
    estimate_depth, illumination_invariance_gap, mean_residual, render_lambertian, DepthEstimator, LightDirection,
    SfsConfig,
};
use facerec_core::{DepthMap, GrayImage, Plane};
use proptest::prelude::*;

fn hemisphere() -> Plane {
    Plane::from_fn(64, 64, |x, y| {
        let d2 = (x as f64 - 32.0).powi(2) + (y as f64 - 32.0).powi(2);
        (400.0 - d2).max(0.0).sqrt()
    })
}

fn pearson(a: &[f64], b: &[f64], mask: &[bool]) -> f64 {
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((&x, &y), _)| (x, y))
        .collect();
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pairs.iter().map(|p| (p.1 - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

fn recover(slant: f64) -> (GrayImage, DepthMap) {
    let light = LightDirection::new(slant, 0.0).unwrap();
    let img = render_lambertian(&hemisphere(), light);
    let d = estimate_depth(&img, &SfsConfig { iterations: 10, light }).unwrap();
    (img, d)
}

#[test]
fn frontal_hemisphere_round_trip_correlates() {
    let (img, d) = recover(0.0);
    let lit: Vec<bool> = img.data().iter().map(|&e| e > 0.0).collect();
    let r = pearson(d.data(), hemisphere().data(), &lit);
    assert!(r >= 0.9, "pearson {r}");
}

#[test]
fn depth_barely_moves_between_slants() {
    let (_, a) = recover(0.0);
    let (_, b) = recover(0.2);
    let gap = illumination_invariance_gap(&a, &b).unwrap();
    // independent relative L2 after gauging
    let ga: Vec<f64> = a.data().iter().map(|v| v - a.plane().min()).collect();
    let gb: Vec<f64> = b.data().iter().map(|v| v - b.plane().min()).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = ga.iter().zip(&gb).map(|(x, y)| x - y).collect();
    let oracle = norm(&diff) / norm(&ga).max(norm(&gb));
    assert!((gap - oracle).abs() < 1e-12);
    assert!(gap <= 0.15, "gap {gap}");
}

#[test]
fn recovered_depth_is_nearly_a_fixed_point() {
    let (_, d) = recover(0.0);
    let again = render_lambertian(d.plane(), LightDirection::frontal());
    let d2 = estimate_depth(&again, &SfsConfig::default()).unwrap();
    let change = illumination_invariance_gap(&d, &d2).unwrap();
    assert!(change < 0.05, "change {change}");
}

#[test]
fn residual_never_increases() {
    for slant in [0.0, 0.2] {
        let light = LightDirection::new(slant, 0.0).unwrap();
        let img = render_lambertian(&hemisphere(), light);
        let mut est = DepthEstimator::new(&img, light);
        let mut last = est.residual();
        for k in 0..10 {
            est.sweep();
            let r = est.residual();
            assert!(r <= last + 1e-12, "slant {slant} sweep {k}: {r} > {last}");
            last = r;
        }
        let final_residual = mean_residual(&img, est.depth().plane(), light);
        assert!(final_residual < 0.02, "{final_residual}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn output_is_gauged_and_finite(
        w in 1usize..12,
        h in 1usize..12,
        seed in prop::collection::vec(0.0f64..=1.0, 144),
        slant in 0.0f64..1.2,
        tilt in 0.0f64..std::f64::consts::TAU,
    ) {
        let img = GrayImage::new(w, h, seed[..w * h].to_vec()).unwrap();
        let light = LightDirection::new(slant, tilt).unwrap();
        let d = estimate_depth(&img, &SfsConfig { iterations: 4, light }).unwrap();
        prop_assert_eq!(d.plane().extent(), (w, h));
        prop_assert!(d.data().iter().all(|v| v.is_finite()));
        prop_assert_eq!(d.plane().min(), 0.0);
    }

    #[test]
    fn gap_is_symmetric_and_bounded(
        a in prop::collection::vec(-5.0f64..5.0, 16),
        b in prop::collection::vec(-5.0f64..5.0, 16),
    ) {
        let da = DepthMap::new(Plane::new(4, 4, a).unwrap()).unwrap();
        let db = DepthMap::new(Plane::new(4, 4, b).unwrap()).unwrap();
        let g1 = illumination_invariance_gap(&da, &db).unwrap();
        let g2 = illumination_invariance_gap(&db, &da).unwrap();
        prop_assert!((g1 - g2).abs() < 1e-12);
        // both maps are non-negative after gauging, so the gap is at most sqrt(2)
        prop_assert!((0.0..=2f64.sqrt() + 1e-12).contains(&g1));
    }
}

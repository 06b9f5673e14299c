//! Acceptance run: one PASS/FAIL/SKIP line per criterion, nonzero exit if
//! any criterion fails.
//!
//! Criterion 8 needs real databases laid out as `<root>/<subject>/<image>`:
//! set `FACEREC_ORL`, `FACEREC_YALE` and/or `FACEREC_ESSEX` (the grimace
//! set) to their roots. Unset variables skip that part.

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use facerec::config::{Algorithm, DatabaseSource, ExperimentConfig};
use facerec::pipeline::{run_experiment, write_records_csv, RecognitionReport};
use facerec_core::classify::{knn_classify, Gallery, Metric};
use facerec_core::linalg::Matrix;
use facerec_core::radon::{profile_len, radon_projection};
use facerec_core::sfs::{estimate_depth, illumination_invariance_gap, render_lambertian, LightDirection, SfsConfig};
use facerec_core::subspace::{discriminant_spectrum, fit_lda, scatter_matrices, LabeledFeatures};
use facerec_core::wavelet::{dwt2, idwt2, packet_decompose, Family, FilterBank};
use facerec_core::Plane;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

type Check = Result<String, String>;

enum Verdict {
    Pass,
    Fail,
    Skip,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion(n: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Option<Check>) -> Verdict {
    let start = Instant::now();
    let outcome = f();
    let took = start.elapsed();
    let (verdict, detail) = match outcome {
        None => (Verdict::Skip, "no database configured".to_string()),
        Some(Ok(d)) => match budget {
            Some(b) if took > b => (Verdict::Fail, format!("{d}; over the {} s budget", b.as_secs_f64())),
            _ => (Verdict::Pass, d),
        },
        Some(Err(d)) => (Verdict::Fail, d),
    };
    let tag = match verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Skip => "SKIP",
    };
    println!("criterion {n} {tag} {title}: {detail} [{} ms]", took.as_millis());
    verdict
}

fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> Plane {
    Plane::from_fn(w, h, |_, _| rng.gen_range(lo..hi))
}

fn admissibility() -> Check {
    let mut worst: f64 = 0.0;
    for family in Family::all() {
        let h = FilterBank::new(family)
            .map_err(|e| format!("{family}: {e}"))?
            .lowpass()
            .to_vec();
        let sum: f64 = h.iter().sum();
        let sq: f64 = h.iter().map(|v| v * v).sum();
        let mut defect = (sum - SQRT_2).abs().max((sq - 1.0).abs());
        for k in 1..h.len() / 2 {
            let dot: f64 = h.iter().zip(&h[2 * k..]).map(|(a, b)| a * b).sum();
            defect = defect.max(dot.abs());
        }
        ensure(defect <= 1e-10, || format!("{family}: defect {defect:e}"))?;
        worst = worst.max(defect);
    }
    Ok(format!("{} families, worst defect {worst:.1e}", Family::all().count()))
}

fn reconstruction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_pr, mut worst_energy): (f64, f64) = (0.0, 0.0);
    for family in Family::all() {
        let fb = FilterBank::new(family).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let img = random_plane(&mut rng, 64, 64, -1.0, 1.0);
            let back = idwt2(&dwt2(&img, &fb).map_err(|e| e.to_string())?, &fb).map_err(|e| e.to_string())?;
            let pr = img
                .data()
                .iter()
                .zip(back.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let tree = packet_decompose(&img, &fb, 3).map_err(|e| e.to_string())?;
            let leaves: f64 = tree.leaves().iter().map(Plane::energy).sum();
            let rel = (leaves - img.energy()).abs() / img.energy();
            ensure(pr <= 1e-8 && rel <= 1e-8, || {
                format!("{family}: reconstruction {pr:e}, energy {rel:e}")
            })?;
            worst_pr = worst_pr.max(pr);
            worst_energy = worst_energy.max(rel);
        }
    }
    Ok(format!(
        "worst element error {worst_pr:.1e}, worst relative energy error {worst_energy:.1e}"
    ))
}

fn centroid(img: &Plane) -> (f64, f64) {
    let (mut m, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let v = img.get(x, y);
            m += v;
            sx += v * x as f64;
            sy += v * y as f64;
        }
    }
    (sx / m, sy / m)
}

/// Each pixel's mass split between the two nearest bins of its projected
/// offset from the centroid, clamped at the profile ends.
fn exhaustive_projection(img: &Plane, theta: f64) -> Vec<f64> {
    let len = profile_len(img.width(), img.height());
    let half = (len / 2) as f64;
    let (cx, cy) = centroid(img);
    let (c, s) = (theta.cos(), theta.sin());
    let mut out = vec![0.0; len];
    for y in 0..img.height() {
        for x in 0..img.width() {
            let v = img.get(x, y);
            let pos = (x as f64 - cx) * c + (y as f64 - cy) * s + half;
            let lo = pos.floor();
            let frac = pos - lo;
            let lo = lo as isize;
            for (bin, weight) in [(lo, 1.0 - frac), (lo + 1, frac)] {
                out[bin.clamp(0, len as isize - 1) as usize] += v * weight;
            }
        }
    }
    out
}

/// Relative L2 error between a centroid-referenced Radon profile's DFT and
/// the matching radial line of the image's zero-padded 2-D DFT.
fn fourier_slice_error(img: &Plane, theta: f64) -> f64 {
    let (n, big) = (img.width(), 256);
    let (cx, cy) = centroid(img);
    let mut grid = vec![Complex64::new(0.0, 0.0); big * big];
    for y in 0..n {
        for x in 0..n {
            grid[y * big + x] = Complex64::new(img.get(x, y), 0.0);
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(big);
    for row in grid.chunks_mut(big) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); big];
    for x in 0..big {
        for y in 0..big {
            col[y] = grid[y * big + x];
        }
        fft.process(&mut col);
        for y in 0..big {
            grid[y * big + x] = col[y];
        }
    }
    let freq = |i: usize| if i < big / 2 { i as f64 } else { i as f64 - big as f64 };
    let omega = 2.0 * PI / big as f64;
    for v in 0..big {
        for u in 0..big {
            grid[v * big + u] *= Complex64::from_polar(1.0, omega * (freq(u) * cx + freq(v) * cy));
        }
    }
    let at = |u: isize, v: isize| grid[v.rem_euclid(big as isize) as usize * big + u.rem_euclid(big as isize) as usize];
    let bilinear = |fu: f64, fv: f64| {
        let (u0, v0) = (fu.floor(), fv.floor());
        let (a, b) = (fu - u0, fv - v0);
        let (u0, v0) = (u0 as isize, v0 as isize);
        at(u0, v0) * ((1.0 - a) * (1.0 - b))
            + at(u0 + 1, v0) * (a * (1.0 - b))
            + at(u0, v0 + 1) * ((1.0 - a) * b)
            + at(u0 + 1, v0 + 1) * (a * b)
    };
    let p = radon_projection(img, theta);
    let half = (p.len() / 2) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..=big / 4 {
        let w = omega * j as f64;
        let slice: Complex64 = p
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| Complex64::from_polar(v, -w * (k as f64 - half)))
            .sum();
        let radial = bilinear(j as f64 * theta.cos(), j as f64 * theta.sin());
        num += (slice - radial).norm_sqr();
        den += radial.norm_sqr();
    }
    (num / den).sqrt()
}

fn radon() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_mass: f64 = 0.0;
    for _ in 0..20 {
        let img = random_plane(&mut rng, 16, 16, 0.0, 1.0);
        for theta in [0.0, 0.7, 1.9, 3.0, rng.gen_range(0.0..PI)] {
            let p = radon_projection(&img, theta);
            ensure(p.values == exhaustive_projection(&img, theta), || {
                format!("oracle mismatch at theta {theta}")
            })?;
            worst_mass = worst_mass.max((p.mass() - img.sum()).abs());
        }
    }
    ensure(worst_mass <= 1e-6, || format!("mass error {worst_mass:e}"))?;
    let blob =
        |x: f64, y: f64, cx: f64, cy: f64, s: f64| (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp();
    let img = Plane::from_fn(64, 64, |x, y| {
        let (x, y) = (x as f64, y as f64);
        blob(x, y, 28.0, 30.0, 6.0) + 0.6 * blob(x, y, 38.0, 36.0, 4.0) + 0.3 * blob(x, y, 30.0, 40.0, 5.0)
    });
    let mut worst_slice: f64 = 0.0;
    for theta in [0.0, 0.4, 1.1, 2.5] {
        let err = fourier_slice_error(&img, theta);
        ensure(err <= 0.05, || format!("Fourier slice error {err:.4} at theta {theta}"))?;
        worst_slice = worst_slice.max(err);
    }
    Ok(format!(
        "exact oracle match, mass error {worst_mass:.1e}, Fourier slice error {worst_slice:.4}"
    ))
}

fn sfs_round_trip() -> Check {
    let surface = Plane::from_fn(64, 64, |x, y| {
        let d2 = (x as f64 - 32.0).powi(2) + (y as f64 - 32.0).powi(2);
        (400.0 - d2).max(0.0).sqrt()
    });
    let recover = |slant: f64| {
        let light = LightDirection::new(slant, 0.0).unwrap();
        let img = render_lambertian(&surface, light);
        let depth = estimate_depth(&img, &SfsConfig { iterations: 10, light }).unwrap();
        (img, depth)
    };
    let (img, d0) = recover(0.0);
    let pairs: Vec<(f64, f64)> = d0
        .data()
        .iter()
        .zip(surface.data())
        .zip(img.data())
        .filter(|(_, &e)| e > 0.0)
        .map(|((&a, &b), _)| (a, b))
        .collect();
    let n = pairs.len() as f64;
    let (ma, mb) = (
        pairs.iter().map(|p| p.0).sum::<f64>() / n,
        pairs.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sab: f64 = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum();
    let saa: f64 = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum();
    let sbb: f64 = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum();
    let r = sab / (saa * sbb).sqrt();
    let (_, d1) = recover(0.2);
    let gap = illumination_invariance_gap(&d0, &d1).map_err(|e| e.to_string())?;
    ensure(r >= 0.9 && gap <= 0.15, || format!("pearson {r:.4}, gap {gap:.4}"))?;
    Ok(format!("pearson {r:.4}, slant 0 vs 0.2 gap {gap:.4}"))
}

fn clusters(rng: &mut ChaCha8Rng, classes: usize, per: usize, d: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per {
            rows.push(
                center
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m + rng.gen_range(-1.0..1.0) * (1.0 + i as f64 * 0.3))
                    .collect(),
            );
            labels.push(c);
        }
    }
    (rows, labels)
}

fn decisions(rows: &[Vec<f64>], labels: &[usize], queries: &[Vec<f64>], metric: Metric) -> Result<Vec<usize>, String> {
    let data = LabeledFeatures::from_rows(rows.to_vec(), labels.to_vec()).map_err(|e| e.to_string())?;
    let sp = scatter_matrices(&data).map_err(|e| e.to_string())?;
    let model = fit_lda(&sp, 1e-3, sp.classes() - 1).map_err(|e| e.to_string())?;
    let points: Vec<Vec<f64>> = rows.iter().map(|r| model.project_values(r).unwrap()).collect();
    let gallery = match metric {
        Metric::L1 => Gallery::l1(points, labels.to_vec(), 1),
        Metric::Mahalanobis => Gallery::mahalanobis(points, labels.to_vec(), model.pooled_covariance().clone(), 1),
    }
    .map_err(|e| e.to_string())?;
    queries
        .iter()
        .map(|q| {
            Ok(knn_classify(&gallery, &model.project_values(q).unwrap())
                .map_err(|e| e.to_string())?
                .label)
        })
        .collect()
}

fn lda_fixtures() -> Check {
    let one_d = LabeledFeatures::from_rows(vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]], vec![0, 0, 1, 1]).unwrap();
    let sp = scatter_matrices(&one_d).map_err(|e| e.to_string())?;
    ensure(sp.between.data() == [16.0] && sp.within.data() == [4.0], || {
        format!("1-D scatter S_B={:?} S_W={:?}", sp.between.data(), sp.within.data())
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (rows, labels) = clusters(&mut rng, 3, 10, 5);
    let sp = scatter_matrices(&LabeledFeatures::from_rows(rows.clone(), labels.clone()).unwrap())
        .map_err(|e| e.to_string())?;
    let model = fit_lda(&sp, 1e-3, 2).map_err(|e| e.to_string())?;
    let reg = sp.within.shifted(model.mu_reg());
    let ratio = |v: &[f64]| sp.between.quadratic_form(v).unwrap() / reg.quadratic_form(v).unwrap();
    let best = ratio(&model.projection().column(0));
    for _ in 0..100 {
        let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = ratio(&v);
        ensure(r <= best * (1.0 + 1e-9), || {
            format!("random direction ratio {r} beats {best}")
        })?;
    }

    let (rows2, labels2) = clusters(&mut rng, 2, 8, 6);
    let sp2 = scatter_matrices(&LabeledFeatures::from_rows(rows2, labels2).unwrap()).map_err(|e| e.to_string())?;
    let spectrum = discriminant_spectrum(&sp2, 1e-3).map_err(|e| e.to_string())?;
    let nonzero = spectrum.iter().filter(|&&v| v > 1e-9 * spectrum[0]).count();
    ensure(nonzero == 1, || {
        format!("c=2 gave {nonzero} nonzero eigenvalues: {spectrum:?}")
    })?;

    let queries: Vec<Vec<f64>> = clusters(&mut rng, 3, 10, 5).0;
    for metric in [Metric::L1, Metric::Mahalanobis] {
        let base = decisions(&rows, &labels, &queries, metric)?;
        for alpha in [0.1, 10.0] {
            let scale = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                v.iter().map(|r| r.iter().map(|x| x * alpha).collect()).collect()
            };
            let scaled = decisions(&scale(&rows), &labels, &scale(&queries), metric)?;
            ensure(scaled == base, || {
                format!("{metric} decisions change under scaling by {alpha}")
            })?;
        }
    }
    Ok(format!(
        "1-D scatter exact, top ratio {best:.4} beats 100 random directions, c=2 rank 1, scaling invariant"
    ))
}

fn classifier_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect() };
    let points: Vec<Vec<f64>> = (0..200).map(|_| point(&mut rng)).collect();
    let labels: Vec<usize> = (0..200).map(|_| rng.gen_range(0..7)).collect();
    let queries: Vec<Vec<f64>> = (0..200).map(|_| point(&mut rng)).collect();
    let scan = |q: &[f64], dist: &dyn Fn(&[f64], &[f64]) -> f64| {
        let mut best = (f64::INFINITY, 0);
        for (p, &l) in points.iter().zip(&labels) {
            let d = dist(p, q);
            if d < best.0 {
                best = (d, l);
            }
        }
        best.1
    };
    let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let euclid = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let g1 = Gallery::l1(points.clone(), labels.clone(), 1).map_err(|e| e.to_string())?;
    let gm = Gallery::mahalanobis(points.clone(), labels.clone(), Matrix::identity(3), 1).map_err(|e| e.to_string())?;
    for q in &queries {
        let got = knn_classify(&g1, q).map_err(|e| e.to_string())?.label;
        ensure(got == scan(q, &l1), || {
            format!("L1 decision differs from the scan for {q:?}")
        })?;
        let got = knn_classify(&gm, q).map_err(|e| e.to_string())?.label;
        ensure(got == scan(q, &euclid), || {
            format!("identity Mahalanobis differs from Euclidean for {q:?}")
        })?;
    }
    Ok("200 queries over 200 points match the exhaustive scan; identity Mahalanobis equals Euclidean".into())
}

fn synthetic_reports() -> Result<Vec<(Algorithm, Metric, RecognitionReport)>, String> {
    let mut out = Vec::new();
    for algorithm in [Algorithm::CoifPacket, Algorithm::RadonDft] {
        for metric in [Metric::L1, Metric::Mahalanobis] {
            let mut cfg = ExperimentConfig {
                database: DatabaseSource::Synthetic { varied: true },
                algorithm,
                metric,
                ..ExperimentConfig::default()
            };
            cfg.split.n_train_per_class = 3;
            let csv = |r: &RecognitionReport| {
                let mut buf = Vec::new();
                write_records_csv(r, &mut buf).map(|_| buf).map_err(|e| e.to_string())
            };
            let a = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let b = run_experiment(&cfg).map_err(|e| e.to_string())?;
            ensure(csv(&a)? == csv(&b)? && a.model == b.model, || {
                format!("{algorithm} {metric} is not deterministic")
            })?;
            out.push((algorithm, metric, a));
        }
    }
    Ok(out)
}

fn synthetic_recognition(reports: &[(Algorithm, Metric, RecognitionReport)]) -> Check {
    let mut parts = Vec::new();
    let mut failed = false;
    for (algorithm, metric, r) in reports {
        let floor = match algorithm {
            Algorithm::CoifPacket => 95.0,
            Algorithm::RadonDft => 90.0,
        };
        let p = r.recognition_percent();
        failed |= p < floor;
        parts.push(format!("{algorithm}/{metric} {p:.1}% (floor {floor:.0})"));
    }
    let detail = format!("{}; repeat runs byte-identical", parts.join(", "));
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn env_root(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn real_databases() -> Option<Check> {
    // (env var, algorithm, training images, metric, floor)
    let rows = [
        ("FACEREC_ORL", Algorithm::CoifPacket, 4, Metric::L1, 95.0),
        ("FACEREC_ESSEX", Algorithm::CoifPacket, 2, Metric::L1, 100.0),
        ("FACEREC_ESSEX", Algorithm::CoifPacket, 2, Metric::Mahalanobis, 100.0),
        ("FACEREC_YALE", Algorithm::CoifPacket, 2, Metric::L1, 95.0),
        ("FACEREC_YALE", Algorithm::CoifPacket, 2, Metric::Mahalanobis, 95.0),
        ("FACEREC_YALE", Algorithm::RadonDft, 2, Metric::L1, 95.0),
        ("FACEREC_YALE", Algorithm::RadonDft, 2, Metric::Mahalanobis, 95.0),
    ];
    let mut parts = Vec::new();
    let mut failed = false;
    for (var, algorithm, n, metric, floor) in rows {
        let Some(root) = env_root(var) else { continue };
        let mut cfg = ExperimentConfig {
            database: DatabaseSource::Directory(root),
            algorithm,
            metric,
            ..ExperimentConfig::default()
        };
        cfg.split.n_train_per_class = n;
        match run_experiment(&cfg) {
            Ok(r) => {
                let p = r.recognition_percent();
                failed |= p < floor;
                parts.push(format!("{var} {algorithm}/{metric} n={n}: {p:.1}% (floor {floor:.0})"));
            }
            Err(e) => {
                failed = true;
                parts.push(format!("{var} {algorithm}/{metric}: error {e}"));
            }
        }
    }
    if parts.is_empty() {
        return None;
    }
    let detail = parts.join("; ");
    Some(if failed { Err(detail) } else { Ok(detail) })
}

fn constancy(reports: &[(Algorithm, Metric, RecognitionReport)]) -> Check {
    let mut parts = Vec::new();
    let mut failed = false;
    for (algorithm, metric, r) in reports {
        let worst = r.max_training_constancy();
        failed |= worst > 0.1;
        parts.push(format!("{algorithm}/{metric} {worst:.4}"));
    }
    let detail = format!("worst training relative error: {}", parts.join(", "));
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut verdicts = vec![
        criterion(1, "filter-bank admissibility", Some(secs(1)), || Some(admissibility())),
        criterion(2, "perfect reconstruction and Parseval", Some(secs(30)), || {
            Some(reconstruction())
        }),
        criterion(3, "Radon oracles", Some(secs(10)), || Some(radon())),
        criterion(4, "SFS round trip", Some(secs(5)), || Some(sfs_round_trip())),
        criterion(5, "LDA fixtures", None, || Some(lda_fixtures())),
        criterion(6, "classifier oracles", None, || Some(classifier_oracles())),
    ];
    let mut reports = Vec::new();
    verdicts.push(criterion(
        7,
        "synthetic end-to-end recognition",
        Some(secs(120)),
        || {
            Some(synthetic_reports().and_then(|r| {
                let check = synthetic_recognition(&r);
                reports = r;
                check
            }))
        },
    ));
    verdicts.push(criterion(8, "recognition on real databases", None, real_databases));
    verdicts.push(criterion(
        9,
        "class constancy on the synthetic training set",
        None,
        || {
            if reports.is_empty() {
                Some(Err("no synthetic reports available".into()))
            } else {
                Some(constancy(&reports))
            }
        },
    ));
    let failures = verdicts.iter().filter(|v| matches!(v, Verdict::Fail)).count();
    println!("acceptance: {failures} failing criteria");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

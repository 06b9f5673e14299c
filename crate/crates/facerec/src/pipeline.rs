//! End-to-end recognition runs, grids and constancy output.
//!
//! Both algorithms go through [`run_on_database`]; they differ only in the
//! feature extractor picked from the config. Depth recovery and feature
//! extraction run in parallel across images, everything after is serial.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use facerec_core::classify::{knn_classify, Gallery, Metric};
use facerec_core::radon::{radon_coefficients, radon_features};
use facerec_core::sfs::estimate_depth;
use facerec_core::subspace::{class_constancy, fit_lda, fit_lda_pca, scatter_matrices, LabeledFeatures, LdaModel};
use facerec_core::wavelet::{packet_decompose, packet_features, FilterBank};
use facerec_core::{DepthMap, FeatureVector};
use rayon::prelude::*;

use crate::config::{Algorithm, DatabaseSource, ExperimentConfig};
use crate::dataset::{scan_database, split, FaceDatabase, FaceImage};
use crate::error::{Error, Result, Stage};
use crate::image_io::write_depth_pgm;
use crate::synthetic::synthetic_database;

/// Outcome for one test image.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    pub path: PathBuf,
    pub true_label: usize,
    pub predicted: usize,
    /// Distance to the nearest neighbour carrying the predicted label.
    pub distance: f64,
}

impl TestRecord {
    pub fn is_correct(&self) -> bool {
        self.true_label == self.predicted
    }
}

/// Relative distance of one image from its class mean in LDA space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstancyRecord {
    pub class: usize,
    /// Position of the image within its class in the full database.
    pub image_index: usize,
    pub relative_error: f64,
    pub training: bool,
}

#[derive(Debug, Clone)]
pub struct RecognitionReport {
    pub config: ExperimentConfig,
    pub class_names: Vec<String>,
    /// Test images in database order.
    pub records: Vec<TestRecord>,
    pub correct: usize,
    pub total: usize,
    pub duration: Duration,
    /// Training and test images, sorted by class then image index.
    pub constancy: Vec<ConstancyRecord>,
    pub model: LdaModel,
}

impl RecognitionReport {
    pub fn recognition_percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }

    pub fn max_training_constancy(&self) -> f64 {
        self.constancy
            .iter()
            .filter(|r| r.training)
            .map(|r| r.relative_error)
            .fold(0.0, f64::max)
    }
}

pub fn load_database(cfg: &ExperimentConfig) -> Result<FaceDatabase> {
    let db = match &cfg.database {
        DatabaseSource::Directory(root) => scan_database(root),
        source => synthetic_database(&source.synthetic_spec(cfg.split.seed).expect("synthetic source")),
    };
    db.map_err(|e| e.in_stage(Stage::Load))
}

pub fn depth_map(cfg: &ExperimentConfig, image: &FaceImage) -> Result<DepthMap> {
    estimate_depth(&image.image, &cfg.sfs).map_err(|e| Error::core(Some(&image.path), e).in_stage(Stage::Depth))
}

/// The feature stage, the only place the two algorithms differ.
pub fn features_of_depth(cfg: &ExperimentConfig, depth: &DepthMap) -> facerec_core::Result<FeatureVector> {
    match cfg.algorithm {
        Algorithm::CoifPacket => {
            let fb = FilterBank::new(cfg.family)?;
            Ok(packet_features(&packet_decompose(depth.plane(), &fb, cfg.levels)?))
        }
        Algorithm::RadonDft if cfg.radon_spectrum => radon_features(depth.plane(), cfg.radon_mode),
        Algorithm::RadonDft => radon_coefficients(depth.plane(), cfg.radon_mode),
    }
}

fn image_features(cfg: &ExperimentConfig, image: &FaceImage) -> Result<FeatureVector> {
    let depth = depth_map(cfg, image)?;
    features_of_depth(cfg, &depth).map_err(|e| Error::core(Some(&image.path), e).in_stage(Stage::Features))
}

/// Features for every image of `db` in database order. On failure the error
/// of the first failing image (in that order) is returned.
pub fn extract_features(cfg: &ExperimentConfig, db: &FaceDatabase) -> Result<(Vec<FeatureVector>, Vec<usize>)> {
    let items: Vec<(usize, &FaceImage)> = db.iter().collect();
    let results: Vec<Result<FeatureVector>> = items.par_iter().map(|(_, img)| image_features(cfg, img)).collect();
    let features = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((features, items.iter().map(|(l, _)| *l).collect()))
}

/// Fits the discriminant subspace with `m = min(c − 1, d)`.
pub fn fit_model(cfg: &ExperimentConfig, data: &LabeledFeatures) -> Result<LdaModel> {
    let fit = || -> facerec_core::Result<LdaModel> {
        let sp = scatter_matrices(data)?;
        let m = (sp.classes() - 1).min(sp.dim());
        if cfg.pca {
            fit_lda_pca(&sp, cfg.mu_scale, m)
        } else {
            fit_lda(&sp, cfg.mu_scale, m)
        }
    };
    fit().map_err(|e| Error::from(e).in_stage(Stage::Fit))
}

pub fn build_gallery(
    cfg: &ExperimentConfig,
    model: &LdaModel,
    points: Vec<Vec<f64>>,
    labels: Vec<usize>,
) -> Result<Gallery> {
    let gallery = match cfg.metric {
        Metric::L1 => Gallery::l1(points, labels, cfg.k),
        Metric::Mahalanobis => Gallery::mahalanobis(points, labels, model.pooled_covariance().clone(), cfg.k),
    };
    gallery.map_err(|e| Error::from(e).in_stage(Stage::Fit))
}

fn project_all(model: &LdaModel, features: &[FeatureVector], paths: &[&Path], stage: Stage) -> Result<Vec<Vec<f64>>> {
    features
        .iter()
        .zip(paths)
        .map(|(f, p)| {
            model
                .project_values(f.values())
                .map_err(|e| Error::core(Some(p), e).in_stage(stage))
        })
        .collect()
}

/// Runs the configured algorithm on an already loaded database.
pub fn run_on_database(cfg: &ExperimentConfig, db: &FaceDatabase) -> Result<RecognitionReport> {
    let start = Instant::now();
    cfg.validate().map_err(|e| e.in_stage(Stage::Config))?;
    let (train, test) = split(db, &cfg.split).map_err(|e| e.in_stage(Stage::Split))?;

    let (train_features, train_labels) = extract_features(cfg, &train)?;
    let data =
        LabeledFeatures::new(train_features, train_labels.clone()).map_err(|e| Error::from(e).in_stage(Stage::Fit))?;
    let model = fit_model(cfg, &data)?;
    let train_paths: Vec<&Path> = train.iter().map(|(_, img)| img.path.as_path()).collect();
    let gallery_points = project_all(&model, data.features(), &train_paths, Stage::Fit)?;
    let gallery = build_gallery(cfg, &model, gallery_points, train_labels.clone())?;

    let (test_features, test_labels) = extract_features(cfg, &test)?;
    let test_paths: Vec<&Path> = test.iter().map(|(_, img)| img.path.as_path()).collect();
    let queries = project_all(&model, &test_features, &test_paths, Stage::Classify)?;
    let mut records = Vec::with_capacity(queries.len());
    for ((q, &label), path) in queries.iter().zip(&test_labels).zip(&test_paths) {
        let decision = knn_classify(&gallery, q).map_err(|e| Error::core(Some(path), e).in_stage(Stage::Classify))?;
        records.push(TestRecord {
            path: path.to_path_buf(),
            true_label: label,
            predicted: decision.label,
            distance: decision.distance(),
        });
    }
    let correct = records.iter().filter(|r| r.is_correct()).count();
    let total = records.len();

    let test_data =
        LabeledFeatures::new(test_features, test_labels).map_err(|e| Error::from(e).in_stage(Stage::Classify))?;
    let constancy = constancy_records(&model, db, [(&train, &data, true), (&test, &test_data, false)])
        .map_err(|e| e.in_stage(Stage::Fit))?;

    Ok(RecognitionReport {
        config: cfg.clone(),
        class_names: db.class_names(),
        records,
        correct,
        total,
        duration: start.elapsed(),
        constancy,
        model,
    })
}

fn constancy_records(
    model: &LdaModel,
    db: &FaceDatabase,
    parts: [(&FaceDatabase, &LabeledFeatures, bool); 2],
) -> Result<Vec<ConstancyRecord>> {
    let position: HashMap<&Path, usize> = db
        .classes()
        .iter()
        .flat_map(|c| c.images.iter().enumerate().map(|(i, img)| (img.path.as_path(), i)))
        .collect();
    let mut out = Vec::new();
    for (part, data, training) in parts {
        let errors = class_constancy(model, data)?;
        for (class, (c, errs)) in part.classes().iter().zip(&errors).enumerate() {
            for (img, &relative_error) in c.images.iter().zip(errs) {
                out.push(ConstancyRecord {
                    class,
                    image_index: position.get(img.path.as_path()).copied().unwrap_or(usize::MAX),
                    relative_error,
                    training,
                });
            }
        }
    }
    out.sort_by_key(|r| (r.class, r.image_index));
    Ok(out)
}

/// Loads the configured database and runs the configured algorithm.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RecognitionReport> {
    cfg.validate().map_err(|e| e.in_stage(Stage::Config))?;
    let db = load_database(cfg)?;
    run_on_database(cfg, &db)
}

fn require(cfg: &ExperimentConfig, algorithm: Algorithm) -> Result<()> {
    if cfg.algorithm != algorithm {
        return Err(Error::Config {
            line: 0,
            message: format!("config selects {}, expected {algorithm}", cfg.algorithm),
        }
        .in_stage(Stage::Config));
    }
    Ok(())
}

/// Depth, wavelet-packet energies, LDA, k-NN.
pub fn run_algorithm1(cfg: &ExperimentConfig) -> Result<RecognitionReport> {
    require(cfg, Algorithm::CoifPacket)?;
    run_experiment(cfg)
}

/// Depth, principal-axis Radon spectrum, LDA, k-NN.
pub fn run_algorithm2(cfg: &ExperimentConfig) -> Result<RecognitionReport> {
    require(cfg, Algorithm::RadonDft)?;
    run_experiment(cfg)
}

/// Runs every config; a failing config becomes an error row.
pub fn run_grid(configs: &[ExperimentConfig]) -> Vec<Result<RecognitionReport>> {
    configs.iter().map(run_experiment).collect()
}

pub const GRID_HEADER: [&str; 8] = [
    "database",
    "algorithm",
    "family",
    "n_train",
    "metric",
    "recognition_percent",
    "duration_ms",
    "error",
];

/// One row per config in the recognition-table layout. `family` holds the
/// wavelet family for Algorithm 1 and the Radon mode for Algorithm 2.
pub fn write_grid_csv<W: std::io::Write>(
    configs: &[ExperimentConfig],
    results: &[Result<RecognitionReport>],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRID_HEADER)?;
    for (cfg, result) in configs.iter().zip(results) {
        let (percent, ms, error) = match result {
            Ok(r) => (
                format!("{:.1}", r.recognition_percent()),
                r.duration.as_millis().to_string(),
                String::new(),
            ),
            Err(e) => (String::new(), String::new(), e.to_string()),
        };
        w.write_record([
            cfg.database.to_string(),
            cfg.algorithm.to_string(),
            cfg.feature_label(),
            cfg.split.n_train_per_class.to_string(),
            cfg.metric.to_string(),
            percent,
            ms,
            error,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<grid csv>", e))
}

/// Per-test-image decisions. Contains nothing time dependent, so equal
/// configs give byte-identical files.
pub fn write_records_csv<W: std::io::Write>(report: &RecognitionReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "true_class", "predicted_class", "correct", "distance"])?;
    for r in &report.records {
        w.write_record([
            r.path.display().to_string(),
            report.class_names[r.true_label].clone(),
            report.class_names[r.predicted].clone(),
            r.is_correct().to_string(),
            r.distance.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<records csv>", e))
}

pub fn emit_records(report: &RecognitionReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records_csv(report, file)
}

/// `class,image_index,relative_error` rows sorted by class then image.
pub fn write_constancy_csv<W: std::io::Write>(
    records: &[ConstancyRecord],
    class_names: &[String],
    all_images: bool,
    out: W,
) -> Result<()> {
    let mut rows: Vec<&ConstancyRecord> = records.iter().filter(|r| all_images || r.training).collect();
    rows.sort_by_key(|r| (r.class, r.image_index));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["class", "image_index", "relative_error"])?;
    for r in rows {
        let name = class_names.get(r.class).cloned().unwrap_or_else(|| r.class.to_string());
        w.write_record([name, r.image_index.to_string(), r.relative_error.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<constancy csv>", e))
}

/// Writes the constancy data of the training images, or of every image when
/// `all_images` is set.
pub fn emit_constancy(report: &RecognitionReport, path: impl AsRef<Path>, all_images: bool) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e).in_stage(Stage::Output))?;
    write_constancy_csv(&report.constancy, &report.class_names, all_images, file)
}

pub fn emit_grid(
    configs: &[ExperimentConfig],
    results: &[Result<RecognitionReport>],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_grid_csv(configs, results, file)
}

/// Writes every image's recovered depth as `<dir>/<class>/<file stem>.pgm`.
pub fn dump_depths(cfg: &ExperimentConfig, db: &FaceDatabase, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for class in db.classes() {
        let class_dir = dir.join(&class.name);
        fs::create_dir_all(&class_dir).map_err(|e| Error::io(&class_dir, e).in_stage(Stage::Output))?;
        let depths: Vec<Result<DepthMap>> = class.images.par_iter().map(|img| depth_map(cfg, img)).collect();
        for (img, depth) in class.images.iter().zip(depths) {
            let stem = img
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            write_depth_pgm(class_dir.join(format!("{stem}.pgm")), &depth?).map_err(|e| e.in_stage(Stage::Output))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constancy_csv_single_image() {
        let records = [ConstancyRecord {
            class: 0,
            image_index: 0,
            relative_error: 0.0,
            training: true,
        }];
        let mut out = Vec::new();
        write_constancy_csv(&records, &["s1".into()], false, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "class,image_index,relative_error\ns1,0,0\n"
        );
    }

    #[test]
    fn constancy_csv_sorts_and_filters() {
        let rec = |class, image_index, training| ConstancyRecord {
            class,
            image_index,
            relative_error: 0.5,
            training,
        };
        let records = [rec(1, 0, true), rec(0, 3, false), rec(0, 1, true)];
        let names = ["a".to_string(), "b".to_string()];
        let mut train = Vec::new();
        write_constancy_csv(&records, &names, false, &mut train).unwrap();
        assert_eq!(
            String::from_utf8(train).unwrap(),
            "class,image_index,relative_error\na,1,0.5\nb,0,0.5\n"
        );
        let mut all = Vec::new();
        write_constancy_csv(&records, &names, true, &mut all).unwrap();
        assert_eq!(String::from_utf8(all).unwrap().lines().nth(2), Some("a,3,0.5"));
    }

    #[test]
    fn empty_grid_has_only_the_header() {
        let mut out = Vec::new();
        write_grid_csv(&[], &[], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "database,algorithm,family,n_train,metric,recognition_percent,duration_ms,error\n"
        );
    }
}

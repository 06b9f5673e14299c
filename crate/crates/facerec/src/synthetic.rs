//! Built-in dataset of rendered Lambertian bump surfaces.
//!
//! Each class is a shared dome carrying its own layout of Gaussian bumps,
//! rendered in front of a black backdrop.
//! Every image jitters the bump heights slightly and, when illumination is
//! varied, is lit from its own direction.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use facerec_core::sfs::{render_lambertian, LightDirection};
use facerec_core::{GrayImage, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{FaceClass, FaceDatabase, FaceImage};
use crate::error::{Error, Result};
use crate::image_io::write_pgm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Illumination {
    /// Every image lit frontally.
    Fixed,
    /// Slant in `[0, max_slant]`, tilt uniform.
    Varied,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub images_per_class: usize,
    pub width: usize,
    pub height: usize,
    pub bumps_per_class: usize,
    pub illumination: Illumination,
    pub max_slant: f64,
    /// Relative per-image jitter of each bump height.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            classes: 5,
            images_per_class: 8,
            width: 64,
            height: 64,
            bumps_per_class: 6,
            illumination: Illumination::Varied,
            max_slant: 0.1,
            jitter: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bump {
    x: f64,
    y: f64,
    sigma: f64,
    height: f64,
}

/// Squared elliptical radius of the head outline; the subject is where
/// it is below one.
fn head_radius2(spec: &SyntheticSpec, x: usize, y: usize) -> f64 {
    let (cx, cy) = (spec.width as f64 / 2.0, spec.height as f64 / 2.0);
    let (rx, ry) = (0.42 * spec.width as f64, 0.46 * spec.height as f64);
    let (u, v) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
    u * u + v * v
}

fn surface(spec: &SyntheticSpec, bumps: &[Bump], scales: &[f64]) -> Plane {
    Plane::from_fn(spec.width, spec.height, |xi, yi| {
        let r2 = head_radius2(spec, xi, yi);
        let (x, y) = (xi as f64, yi as f64);
        let dome = 8.0 * (1.0 - r2).max(0.0).sqrt();
        let relief: f64 = bumps
            .iter()
            .zip(scales)
            .map(|(b, s)| {
                let d2 = (x - b.x).powi(2) + (y - b.y).powi(2);
                s * b.height * (-d2 / (2.0 * b.sigma * b.sigma)).exp()
            })
            .sum();
        dome + relief
    })
}

/// Generates the dataset in memory; identical specs give identical images.
pub fn synthetic_database(spec: &SyntheticSpec) -> Result<FaceDatabase> {
    if spec.classes == 0 || spec.images_per_class == 0 || spec.width < 8 || spec.height < 8 {
        return Err(Error::Config {
            line: 0,
            message: "synthetic dataset needs at least one class, one image and 8x8 pixels".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let mut classes = Vec::with_capacity(spec.classes);
    for c in 0..spec.classes {
        let bumps: Vec<Bump> = (0..spec.bumps_per_class)
            .map(|_| Bump {
                x: rng.gen_range(0.25 * w..0.75 * w),
                y: rng.gen_range(0.25 * h..0.75 * h),
                sigma: rng.gen_range(0.12..0.2) * w.min(h),
                height: rng.gen_range(2.0..5.0) * if rng.gen_bool(0.3) { -1.0 } else { 1.0 },
            })
            .collect();
        let mut images = Vec::with_capacity(spec.images_per_class);
        for i in 0..spec.images_per_class {
            let scales: Vec<f64> = bumps
                .iter()
                .map(|_| 1.0 + spec.jitter * rng.gen_range(-1.0..1.0))
                .collect();
            let light = match spec.illumination {
                Illumination::Fixed => LightDirection::frontal(),
                Illumination::Varied => {
                    LightDirection::new(rng.gen_range(0.0..=spec.max_slant), rng.gen_range(0.0..TAU))?
                }
            };
            let lit = render_lambertian(&surface(spec, &bumps, &scales), light);
            // zero-albedo backdrop, as in studio face databases
            let masked = Plane::from_fn(spec.width, spec.height, |x, y| {
                if head_radius2(spec, x, y) < 1.0 {
                    lit.plane().get(x, y)
                } else {
                    0.0
                }
            });
            images.push(FaceImage {
                image: GrayImage::from_plane_clamped(masked),
                path: PathBuf::from(format!("synthetic/c{c}/{i:02}.pgm")),
            });
        }
        classes.push(FaceClass {
            name: format!("c{c}"),
            images,
        });
    }
    FaceDatabase::new(classes)
}

/// Writes `<root>/<class>/<nn>.pgm` so the database can be rescanned.
pub fn write_database(db: &FaceDatabase, root: impl AsRef<Path>) -> Result<()> {
    let root = root.as_ref();
    for class in db.classes() {
        let dir = root.join(&class.name);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (i, img) in class.images.iter().enumerate() {
            write_pgm(dir.join(format!("{i:02}.pgm")), &img.image)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let spec = SyntheticSpec::default();
        let a = synthetic_database(&spec).unwrap();
        assert_eq!(a.num_classes(), 5);
        assert_eq!(a.len(), 40);
        assert_eq!(a.extent(), (64, 64));
        assert_eq!(a, synthetic_database(&spec).unwrap());
        let b = synthetic_database(&SyntheticSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn images_within_a_class_differ() {
        let db = synthetic_database(&SyntheticSpec::default()).unwrap();
        let c = &db.classes()[0];
        assert_ne!(c.images[0].image, c.images[1].image);
    }
}

//! Directory-structured face databases and per-class train/test splits.
//!
//! Layout: `<root>/<class>/<image>`, one directory per subject. Files whose
//! extension is not `pgm` or `png` are ignored, as are hidden entries.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use facerec_core::GrayImage;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image_io::load_gray_image;

#[derive(Debug, Clone, PartialEq)]
pub struct FaceImage {
    pub image: GrayImage,
    /// Source file, or a synthetic name for generated images.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceClass {
    pub name: String,
    pub images: Vec<FaceImage>,
}

/// Classes in label order; every class non-empty, one shared image extent.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDatabase {
    classes: Vec<FaceClass>,
    extent: (usize, usize),
}

impl FaceDatabase {
    pub fn new(classes: Vec<FaceClass>) -> Result<Self> {
        let first = classes
            .iter()
            .find_map(|c| c.images.first())
            .ok_or_else(|| Error::EmptyDatabase { path: PathBuf::new() })?;
        let extent = (first.image.width(), first.image.height());
        for class in &classes {
            if class.images.is_empty() {
                return Err(Error::EmptyClass {
                    path: PathBuf::from(&class.name),
                });
            }
            for img in &class.images {
                let actual = (img.image.width(), img.image.height());
                if actual != extent {
                    return Err(Error::ExtentMismatch {
                        path: img.path.clone(),
                        expected: extent,
                        actual,
                    });
                }
            }
        }
        Ok(FaceDatabase { classes, extent })
    }

    pub fn classes(&self) -> &[FaceClass] {
        &self.classes
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Total image count.
    pub fn len(&self) -> usize {
        self.classes.iter().map(|c| c.images.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(width, height)` shared by every image.
    pub fn extent(&self) -> (usize, usize) {
        self.extent
    }

    /// `(label, image)` pairs in class order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &FaceImage)> + '_ {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(l, c)| c.images.iter().map(move |img| (l, img)))
    }
}

fn is_image_file(path: &Path) -> bool {
    let hidden = path
        .file_name()
        .and_then(|n| n.to_str())
        .is_none_or(|n| n.starts_with('.'));
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    !hidden && matches!(ext.as_deref(), Some("pgm" | "png"))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(out)
}

/// Reads every class directory under `root`; classes and images are sorted
/// lexicographically by name.
pub fn scan_database(root: impl AsRef<Path>) -> Result<FaceDatabase> {
    let root = root.as_ref();
    let mut classes = Vec::new();
    let mut extent: Option<(usize, usize)> = None;
    for dir in sorted_entries(root)? {
        let hidden = dir
            .file_name()
            .and_then(|n| n.to_str())
            .is_none_or(|n| n.starts_with('.'));
        if hidden || !dir.is_dir() {
            continue;
        }
        let mut images = Vec::new();
        for path in sorted_entries(&dir)? {
            if !path.is_file() || !is_image_file(&path) {
                continue;
            }
            let image = load_gray_image(&path)?;
            let actual = (image.width(), image.height());
            match extent {
                None => extent = Some(actual),
                Some(expected) if expected != actual => return Err(Error::ExtentMismatch { path, expected, actual }),
                Some(_) => {}
            }
            images.push(FaceImage { image, path });
        }
        if images.is_empty() {
            return Err(Error::EmptyClass { path: dir });
        }
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        classes.push(FaceClass { name, images });
    }
    if classes.is_empty() {
        return Err(Error::EmptyDatabase {
            path: root.to_path_buf(),
        });
    }
    FaceDatabase::new(classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// The first `n` images of each class in file order.
    #[default]
    FirstN,
    /// `n` images per class drawn with a ChaCha8 generator seeded from the
    /// split seed.
    SeededRandom,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::FirstN => "first-n",
            Selection::SeededRandom => "seeded-random",
        })
    }
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "first-n" => Ok(Selection::FirstN),
            "seeded-random" => Ok(Selection::SeededRandom),
            other => Err(format!(
                "unknown selection {other:?}, expected first-n or seeded-random"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub n_train_per_class: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            n_train_per_class: 4,
            seed: 0,
            selection: Selection::FirstN,
        }
    }
}

/// Per class, `n_train` images go to the training set and the rest to the
/// test set; both keep the original file order.
pub fn split(db: &FaceDatabase, spec: &SplitSpec) -> Result<(FaceDatabase, FaceDatabase)> {
    let n = spec.n_train_per_class;
    if n == 0 {
        return Err(Error::Split("at least one training image per class is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in db.classes() {
        let size = class.images.len();
        if n >= size {
            return Err(Error::Split(format!(
                "class {} has {size} images, {n} for training leaves no test image",
                class.name
            )));
        }
        let mut order: Vec<usize> = (0..size).collect();
        if spec.selection == Selection::SeededRandom {
            order.shuffle(&mut rng);
        }
        let mut chosen = vec![false; size];
        for &i in &order[..n] {
            chosen[i] = true;
        }
        let pick = |want: bool| FaceClass {
            name: class.name.clone(),
            images: class
                .images
                .iter()
                .zip(&chosen)
                .filter(|(_, &c)| c == want)
                .map(|(img, _)| img.clone())
                .collect(),
        };
        train.push(pick(true));
        test.push(pick(false));
    }
    Ok((FaceDatabase::new(train)?, FaceDatabase::new(test)?))
}

//! Orthonormal 2-D wavelet transform and full wavelet-packet decomposition.
//!
//! One analysis step filters every row, then every column, with periodic
//! extension and keeps every second sample. With lowpass `h` of length `L`
//! and highpass `g[n] = (−1)ⁿ h[L−1−n]`:
//!
//! ```text
//! low[k]  = Σₙ h[n] x[(2k + n) mod N]
//! high[k] = Σₙ g[n] x[(2k + n) mod N]
//! ```
//!
//! The transform is orthogonal for any even `N`, so synthesis is its
//! transpose. Subbands are named by (x filter, y filter): `LH` is lowpass
//! along rows and highpass along columns.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::feature::{Extractor, FeatureVector};
use crate::plane::Plane;
use crate::{Error, Result};

mod taps;

/// Admissibility tolerance for the embedded taps.
const TAP_TOL: f64 = 1e-10;

/// Shipped filter families. Orders: Coiflet 1–5, Daubechies 1–10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Coiflet(u8),
    Daubechies(u8),
}

impl Family {
    /// Every shipped family, Coiflets first.
    pub fn all() -> impl Iterator<Item = Family> {
        (1..=5).map(Family::Coiflet).chain((1..=10).map(Family::Daubechies))
    }

    fn taps(self) -> Option<&'static [f64]> {
        use taps::*;
        Some(match self {
            Family::Coiflet(1) => &COIF1,
            Family::Coiflet(2) => &COIF2,
            Family::Coiflet(3) => &COIF3,
            Family::Coiflet(4) => &COIF4,
            Family::Coiflet(5) => &COIF5,
            Family::Daubechies(1) => &DB1,
            Family::Daubechies(2) => &DB2,
            Family::Daubechies(3) => &DB3,
            Family::Daubechies(4) => &DB4,
            Family::Daubechies(5) => &DB5,
            Family::Daubechies(6) => &DB6,
            Family::Daubechies(7) => &DB7,
            Family::Daubechies(8) => &DB8,
            Family::Daubechies(9) => &DB9,
            Family::Daubechies(10) => &DB10,
            _ => return None,
        })
    }
}

impl Default for Family {
    fn default() -> Self {
        Family::Coiflet(2)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Coiflet(k) => write!(f, "coif{k}"),
            Family::Daubechies(k) => write!(f, "db{k}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts `coif2`, `coiflet-2`, `db4`, `daubechies-4`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (make, rest): (fn(u8) -> Family, &str) = if let Some(r) = s.strip_prefix("coiflet-") {
            (Family::Coiflet, r)
        } else if let Some(r) = s.strip_prefix("coif") {
            (Family::Coiflet, r)
        } else if let Some(r) = s.strip_prefix("daubechies-") {
            (Family::Daubechies, r)
        } else if let Some(r) = s.strip_prefix("db") {
            (Family::Daubechies, r)
        } else {
            return Err(Error::UnknownWavelet);
        };
        let order: u8 = rest.parse().map_err(|_| Error::UnknownWavelet)?;
        let family = make(order);
        family.taps().ok_or(Error::UnknownWavelet)?;
        Ok(family)
    }
}

/// Quadrature-mirror filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    family: Family,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterBank {
    /// Builds the bank and checks the taps against the admissibility
    /// conditions.
    pub fn new(family: Family) -> Result<Self> {
        let h = family.taps().ok_or(Error::UnknownWavelet)?;
        let fb = Self::from_lowpass(family, h.to_vec());
        if fb.admissibility_defect() > TAP_TOL {
            return Err(Error::InadmissibleFilter);
        }
        Ok(fb)
    }

    fn from_lowpass(family: Family, lowpass: Vec<f64>) -> Self {
        let l = lowpass.len();
        let highpass = (0..l)
            .map(|n| {
                if n % 2 == 0 {
                    lowpass[l - 1 - n]
                } else {
                    -lowpass[l - 1 - n]
                }
            })
            .collect();
        FilterBank {
            family,
            lowpass,
            highpass,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    /// Largest violation among `Σh = √2`, `Σh² = 1` and `Σ h[n]h[n+2m] = 0`.
    pub fn admissibility_defect(&self) -> f64 {
        let h = &self.lowpass;
        let sum: f64 = h.iter().sum();
        let mut worst = (sum - core::f64::consts::SQRT_2).abs();
        for shift in (0..h.len()).step_by(2) {
            let dot: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
            let target = if shift == 0 { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
        worst
    }
}

fn analyze(x: &[f64], fb: &FilterBank, low: &mut [f64], high: &mut [f64]) {
    let n = x.len();
    for k in 0..n / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (&h, &g)) in fb.lowpass.iter().zip(&fb.highpass).enumerate() {
            let v = x[(2 * k + t) % n];
            a += h * v;
            d += g * v;
        }
        low[k] = a;
        high[k] = d;
    }
}

fn synthesize(low: &[f64], high: &[f64], fb: &FilterBank, x: &mut [f64]) {
    let n = x.len();
    x.fill(0.0);
    for k in 0..n / 2 {
        for (t, (&h, &g)) in fb.lowpass.iter().zip(&fb.highpass).enumerate() {
            x[(2 * k + t) % n] += h * low[k] + g * high[k];
        }
    }
}

/// The four subbands of one analysis step, each half the input extent.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl Subbands {
    pub fn energy(&self) -> f64 {
        self.ll.energy() + self.lh.energy() + self.hl.energy() + self.hh.energy()
    }
}

/// One separable analysis step: rows, then columns.
pub fn dwt2(block: &Plane, fb: &FilterBank) -> Result<Subbands> {
    let (w, h) = block.extent();
    if w % 2 != 0 || h % 2 != 0 || w == 0 || h == 0 {
        return Err(Error::OddExtent { width: w, height: h });
    }
    let (hw, hh) = (w / 2, h / 2);
    // rows: left half lowpass, right half highpass
    let mut rows = Plane::zeros(w, h);
    let (mut lo, mut hi) = (vec![0.0; hw], vec![0.0; hw]);
    for y in 0..h {
        analyze(block.row(y), fb, &mut lo, &mut hi);
        for k in 0..hw {
            rows.set(k, y, lo[k]);
            rows.set(hw + k, y, hi[k]);
        }
    }
    let mut out = [(); 4].map(|_| Plane::zeros(hw, hh));
    let mut col = vec![0.0; h];
    let (mut lo, mut hi) = (vec![0.0; hh], vec![0.0; hh]);
    for x in 0..w {
        for (y, c) in col.iter_mut().enumerate() {
            *c = rows.get(x, y);
        }
        analyze(&col, fb, &mut lo, &mut hi);
        let (low_band, high_band, xx) = if x < hw { (0, 1, x) } else { (2, 3, x - hw) };
        for k in 0..hh {
            out[low_band].set(xx, k, lo[k]);
            out[high_band].set(xx, k, hi[k]);
        }
    }
    let [ll, lh, hl, hh] = out;
    Ok(Subbands { ll, lh, hl, hh })
}

/// Inverse of [`dwt2`].
pub fn idwt2(bands: &Subbands, fb: &FilterBank) -> Result<Plane> {
    let (hw, hh) = bands.ll.extent();
    for b in [&bands.lh, &bands.hl, &bands.hh] {
        if b.extent() != (hw, hh) {
            return Err(Error::ExtentMismatch {
                left: (hw, hh),
                right: b.extent(),
            });
        }
    }
    let (w, h) = (2 * hw, 2 * hh);
    let mut rows = Plane::zeros(w, h);
    let mut col = vec![0.0; h];
    let (mut lo, mut hi) = (vec![0.0; hh], vec![0.0; hh]);
    for x in 0..w {
        let (low_band, high_band, xx) = if x < hw {
            (&bands.ll, &bands.lh, x)
        } else {
            (&bands.hl, &bands.hh, x - hw)
        };
        for k in 0..hh {
            lo[k] = low_band.get(xx, k);
            hi[k] = high_band.get(xx, k);
        }
        synthesize(&lo, &hi, fb, &mut col);
        for (y, &c) in col.iter().enumerate() {
            rows.set(x, y, c);
        }
    }
    let mut out = Plane::zeros(w, h);
    let mut line = vec![0.0; w];
    for y in 0..h {
        let r = rows.row(y);
        synthesize(&r[..hw], &r[hw..], fb, &mut line);
        for (x, &v) in line.iter().enumerate() {
            out.set(x, y, v);
        }
    }
    Ok(out)
}

/// Half-sample symmetric extension index into `0..n`.
fn mirror(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Pads symmetrically (edge sample repeated) so both extents become
/// multiples of `multiple`; the extra samples are split between both sides,
/// the odd one going to the right/bottom.
pub fn symmetric_pad(image: &Plane, multiple: usize) -> Plane {
    let (w, h) = image.extent();
    let pw = w.div_ceil(multiple) * multiple;
    let ph = h.div_ceil(multiple) * multiple;
    let (left, top) = ((pw - w) / 2, (ph - h) / 2);
    Plane::from_fn(pw, ph, |x, y| {
        let sx = mirror(x as isize - left as isize, w);
        let sy = mirror(y as isize - top as isize, h);
        image.get(sx, sy)
    })
}

/// Full packet tree. Level `ℓ` holds `4^ℓ` blocks indexed by `(i, j)` in
/// `[0, 2^ℓ)²`, stored row-major; `i` counts highpass steps along y and `j`
/// along x in binary, so the children of `(i, j)` are `(2i + dy, 2j + dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketTree {
    family: Family,
    nodes: Vec<Vec<Plane>>,
}

impl PacketTree {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn levels(&self) -> u32 {
        (self.nodes.len() - 1) as u32
    }

    /// Level 0 is the padded input.
    pub fn level(&self, level: u32) -> &[Plane] {
        &self.nodes[level as usize]
    }

    pub fn node(&self, level: u32, i: usize, j: usize) -> &Plane {
        let side = 1usize << level;
        &self.nodes[level as usize][i * side + j]
    }

    pub fn leaves(&self) -> &[Plane] {
        self.nodes.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Pads the image to a multiple of `2^levels` and splits every node down to
/// `levels`.
pub fn packet_decompose(image: &Plane, fb: &FilterBank, levels: u32) -> Result<PacketTree> {
    if levels == 0 {
        return Err(Error::InvalidArgument("packet levels must be at least 1"));
    }
    if image.is_empty() {
        return Err(Error::Empty);
    }
    let (w, h) = image.extent();
    let too_deep = levels >= usize::BITS || (1usize << levels) > w.min(h);
    if too_deep {
        return Err(Error::TooManyLevels {
            levels,
            width: w,
            height: h,
        });
    }
    let side = 1usize << levels;
    let mut nodes = vec![vec![symmetric_pad(image, side)]];
    for level in 0..levels {
        let parents = &nodes[level as usize];
        let n = 1usize << level;
        let mut children = vec![Plane::zeros(0, 0); 4 * n * n];
        for i in 0..n {
            for j in 0..n {
                let b = dwt2(&parents[i * n + j], fb)?;
                let row = 2 * n;
                children[2 * i * row + 2 * j] = b.ll;
                children[(2 * i + 1) * row + 2 * j] = b.lh;
                children[2 * i * row + 2 * j + 1] = b.hl;
                children[(2 * i + 1) * row + 2 * j + 1] = b.hh;
            }
        }
        nodes.push(children);
    }
    Ok(PacketTree {
        family: fb.family(),
        nodes,
    })
}

/// Leaf energies in row-major `(i, j)` order, then for each coarser level
/// (deepest first, ending with the root) the sums of each 4-sibling group.
/// Length `(4^(L+1) − 1) / 3`.
pub fn packet_features(tree: &PacketTree) -> FeatureVector {
    let levels = tree.levels();
    let mut values: Vec<f64> = tree.leaves().iter().map(Plane::energy).collect();
    let mut start = 0;
    for level in (0..levels).rev() {
        let n = 1usize << level;
        let prev = &values[start..];
        let combined: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let row = 2 * n;
                prev[2 * i * row + 2 * j]
                    + prev[2 * i * row + 2 * j + 1]
                    + prev[(2 * i + 1) * row + 2 * j]
                    + prev[(2 * i + 1) * row + 2 * j + 1]
            })
            .collect();
        start = values.len();
        values.extend(combined);
    }
    FeatureVector::new(
        values,
        Extractor::WaveletPacket {
            family: tree.family(),
            levels,
        },
    )
}

/// Number of entries produced by [`packet_features`].
pub fn feature_len(levels: u32) -> usize {
    ((1usize << (2 * (levels + 1))) - 1) / 3
}

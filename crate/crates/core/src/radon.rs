//! Principal-axis Radon projection and its DFT-magnitude features.
//!
//! Pixel `(x, y)` sits at integer coordinates with `y` pointing down; angles
//! follow `atan2(dy, dx)` in that frame, matching [`Plane::rotate`]. A
//! projection at angle θ bins every pixel's mass by its signed offset
//! `r = (x − cx)·cos θ + (y − cy)·sin θ` from the centroid, splitting it
//! linearly between the two nearest unit-spaced bins.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;
use core::str::FromStr;

use crate::dft::magnitude_spectrum;
use crate::feature::{Extractor, FeatureVector};
use crate::plane::Plane;
use crate::{Error, Result};

/// Samples per profile before the DFT.
pub const RESAMPLED_LEN: usize = 256;
/// DFT bins kept per profile (real-input symmetry).
pub const SPECTRUM_BINS: usize = RESAMPLED_LEN / 2 + 1;
/// Below this eigenvalue ratio the mass cloud counts as isotropic.
const ISOTROPY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadonMode {
    /// One projection along the principal axis.
    #[default]
    AxisOnly,
    /// The principal axis and the perpendicular one.
    AxisPair,
}

impl fmt::Display for RadonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadonMode::AxisOnly => "axis-only",
            RadonMode::AxisPair => "axis-pair",
        })
    }
}

impl FromStr for RadonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "axis-only" => Ok(RadonMode::AxisOnly),
            "axis-pair" => Ok(RadonMode::AxisPair),
            _ => Err(Error::InvalidArgument("radon mode must be axis-only or axis-pair")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalAxis {
    /// Axis angle in `[0, π)`.
    pub theta: f64,
    /// `λ₁ / λ₂` of the mass covariance; infinite for a degenerate line.
    pub anisotropy: f64,
}

/// Mass-weighted centroid, or `None` when the total mass is not positive.
fn centroid(image: &Plane) -> Option<(f64, f64, f64)> {
    let (mut m, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for y in 0..image.height() {
        for (x, &v) in image.row(y).iter().enumerate() {
            m += v;
            sx += v * x as f64;
            sy += v * y as f64;
        }
    }
    (m > 0.0 && m.is_finite()).then(|| (m, sx / m, sy / m))
}

/// Leading eigenvector direction of the intensity-weighted coordinate
/// covariance.
pub fn principal_axis(image: &Plane) -> Result<PrincipalAxis> {
    let (m, cx, cy) = centroid(image).ok_or(Error::ZeroMass)?;
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for y in 0..image.height() {
        let dy = y as f64 - cy;
        for (x, &v) in image.row(y).iter().enumerate() {
            let dx = x as f64 - cx;
            cxx += v * dx * dx;
            cyy += v * dy * dy;
            cxy += v * dx * dy;
        }
    }
    let (cxx, cyy, cxy) = (cxx / m, cyy / m, cxy / m);
    let mean = 0.5 * (cxx + cyy);
    let spread = libm::hypot(0.5 * (cxx - cyy), cxy);
    let (l1, l2) = (mean + spread, mean - spread);
    let anisotropy = if l2 > 0.0 { l1 / l2 } else { f64::INFINITY };
    if anisotropy < 1.0 + ISOTROPY_TOL {
        return Ok(PrincipalAxis { theta: 0.0, anisotropy });
    }
    let mut theta = 0.5 * libm::atan2(2.0 * cxy, cxx - cyy);
    if theta < 0.0 {
        theta += PI;
    }
    if theta >= PI {
        theta -= PI;
    }
    Ok(PrincipalAxis { theta, anisotropy })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadonProfile {
    pub theta: f64,
    /// Bin `k` holds offset `r = k − (len − 1)/2`.
    pub values: Vec<f64>,
}

impl RadonProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `2·⌈√(w²+h²)/2⌉ + 1`.
pub fn profile_len(width: usize, height: usize) -> usize {
    let diag = libm::sqrt((width * width + height * height) as f64);
    2 * (libm::ceil(diag / 2.0) as usize) + 1
}

/// Projection at angle `theta`. Offsets are measured from the centroid
/// (the geometric centre when the image has no mass). Mass that would fall
/// outside the profile is kept in the end bins.
pub fn radon_projection(image: &Plane, theta: f64) -> RadonProfile {
    let (w, h) = image.extent();
    let len = profile_len(w, h);
    let (cx, cy) = match centroid(image) {
        Some((_, cx, cy)) => (cx, cy),
        None => ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0),
    };
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    let half = (len / 2) as f64;
    let last = len - 1;
    let mut values = vec![0.0; len];
    for y in 0..h {
        let base = (y as f64 - cy) * s;
        for (x, &v) in image.row(y).iter().enumerate() {
            let u = (x as f64 - cx) * c + base + half;
            let floor = libm::floor(u);
            let frac = u - floor;
            let i = floor as isize;
            deposit(&mut values, i, v * (1.0 - frac), last);
            deposit(&mut values, i + 1, v * frac, last);
        }
    }
    RadonProfile { theta, values }
}

#[inline]
fn deposit(values: &mut [f64], i: isize, mass: f64, last: usize) {
    let i = i.clamp(0, last as isize) as usize;
    values[i] += mass;
}

/// Linear resampling onto `n` points spanning the whole profile.
pub fn resample(values: &[f64], n: usize) -> Vec<f64> {
    match values.len() {
        0 => vec![0.0; n],
        1 => vec![values[0]; n],
        len => (0..n)
            .map(|j| {
                let pos = if n == 1 {
                    0.0
                } else {
                    j as f64 * (len - 1) as f64 / (n - 1) as f64
                };
                let i = (libm::floor(pos) as usize).min(len - 2);
                let t = pos - i as f64;
                values[i] * (1.0 - t) + values[i + 1] * t
            })
            .collect(),
    }
}

fn axis_profiles(image: &Plane, mode: RadonMode) -> Result<Vec<Vec<f64>>> {
    let axis = principal_axis(image)?;
    let mut angles = vec![axis.theta];
    if mode == RadonMode::AxisPair {
        angles.push(axis.theta + FRAC_PI_2);
    }
    Ok(angles
        .into_iter()
        .map(|t| resample(&radon_projection(image, t).values, RESAMPLED_LEN))
        .collect())
}

/// DFT magnitudes of the resampled principal-axis projection(s):
/// `SPECTRUM_BINS` values per profile.
pub fn radon_features(image: &Plane, mode: RadonMode) -> Result<FeatureVector> {
    let values = axis_profiles(image, mode)?
        .iter()
        .flat_map(|p| magnitude_spectrum(p, SPECTRUM_BINS))
        .collect();
    Ok(FeatureVector::new(values, Extractor::Radon { mode, spectrum: true }))
}

/// The resampled principal-axis projection(s) themselves.
pub fn radon_coefficients(image: &Plane, mode: RadonMode) -> Result<FeatureVector> {
    let values = axis_profiles(image, mode)?.concat();
    Ok(FeatureVector::new(values, Extractor::Radon { mode, spectrum: false }))
}

//! Dense 2-D real arrays and the two image kinds built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major 2-D array of reals. `x` indexes columns, `y` indexes rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Extent {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Plane { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Plane {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn extent(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Sum of squared values.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Plane {
        self.map(|v| v * factor)
    }

    /// Bilinear sample at a fractional position; zero outside the plane.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let x0 = libm::floor(x);
        let y0 = libm::floor(y);
        let fx = x - x0;
        let fy = y - y0;
        let (xi, yi) = (x0 as isize, y0 as isize);
        let at = |xx: isize, yy: isize| -> f64 {
            if xx < 0 || yy < 0 || xx >= self.width as isize || yy >= self.height as isize {
                0.0
            } else {
                self.data[yy as usize * self.width + xx as usize]
            }
        };
        let top = at(xi, yi) * (1.0 - fx) + at(xi + 1, yi) * fx;
        let bottom = at(xi, yi + 1) * (1.0 - fx) + at(xi + 1, yi + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Rotates the content by `angle` radians about the geometric center
    /// using bilinear resampling. A feature at direction `atan2(dy, dx)`
    /// from the center ends up at `atan2(dy, dx) + angle`. Pixels that map
    /// from outside the source are zero.
    pub fn rotate(&self, angle: f64) -> Plane {
        let cx = (self.width as f64 - 1.0) / 2.0;
        let cy = (self.height as f64 - 1.0) / 2.0;
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        Plane::from_fn(self.width, self.height, |x, y| {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            // inverse rotation
            let sx = c * dx + s * dy + cx;
            let sy = -s * dx + c * dy + cy;
            self.sample_bilinear(sx, sy)
        })
    }

    /// Shifts content by integer offsets, filling uncovered pixels with zero.
    pub fn translate(&self, dx: isize, dy: isize) -> Plane {
        Plane::from_fn(self.width, self.height, |x, y| {
            let sx = x as isize - dx;
            let sy = y as isize - dy;
            if sx < 0 || sy < 0 || sx >= self.width as isize || sy >= self.height as isize {
                0.0
            } else {
                self.get(sx as usize, sy as usize)
            }
        })
    }
}

/// Gray-level image with intensities normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage(Plane);

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_plane(Plane::new(width, height, data)?)
    }

    pub fn from_plane(plane: Plane) -> Result<Self> {
        for (index, &value) in plane.data().iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Intensity { index, value });
            }
        }
        Ok(GrayImage(plane))
    }

    /// Clamps every value into `[0, 1]`; NaN becomes 0.
    pub fn from_plane_clamped(plane: Plane) -> Self {
        GrayImage(plane.map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) }))
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn data(&self) -> &[f64] {
        self.0.data()
    }
}

/// Relative surface heights. Depth is defined up to an additive constant,
/// so the stored map is always gauged to `min == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap(Plane);

impl DepthMap {
    /// Validates finiteness and subtracts the minimum.
    pub fn new(plane: Plane) -> Result<Self> {
        if let Some(index) = plane.data().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self::gauged(plane))
    }

    pub(crate) fn gauged(plane: Plane) -> Self {
        if plane.is_empty() {
            return DepthMap(plane);
        }
        let m = plane.min();
        DepthMap(plane.map(|v| v - m))
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn data(&self) -> &[f64] {
        self.0.data()
    }
}

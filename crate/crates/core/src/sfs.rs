//! Lambertian shape from shading.
//!
//! Surface gradients use backward differences
//! `p = Z(x,y) − Z(x−1,y)`, `q = Z(x,y) − Z(x,y−1)`, with `p = q = 0` on the
//! top row and left column. The unit normal is `(−p, −q, 1) / √(1+p²+q²)` and
//! the reflectance is `R(p, q) = n·s`.
//!
//! A lit pixel with brightness `E` admits the gradients
//! `C = {(p, q) : R(p, q) ≥ E}`, a convex set whose boundary is where the
//! image equation holds exactly. [`estimate_depth`] returns the highest
//! surface whose gradients all lie in their sets (and in the slope box
//! `|p|, |q| ≤ MAX_SLOPE`), with `Z = 0` on the seed pixels. Seeds are the
//! image border plus every pixel reachable from it through neighbourhoods
//! that already match a flat surface (`E = R(0, 0)` on the whole 3×3 window).
//!
//! The surface is found by Gauss–Seidel sweeps that alternate among the four
//! diagonal orders. Each visit lowers `Z` to the tightest of three upper
//! bounds, all in closed form:
//!
//! * own set: `max over C of min(Z_left + p, Z_up + q)`;
//! * right neighbour: `Z_right − min{p : (p, q) ∈ C_right}`;
//! * lower neighbour: `Z_down − min{q : (p, q) ∈ C_down}`.
//!
//! Depth only ever decreases, so sweeps converge monotonically. Shadowed
//! pixels (`E ≤ 0`) only carry the slope box and are finally set to the
//! lowest lit depth.

use alloc::vec;
use alloc::vec::Vec;

use crate::plane::{DepthMap, GrayImage, Plane};
use crate::{Error, Result};

/// Largest accepted backward difference in depth units per pixel.
pub const MAX_SLOPE: f64 = 6.0;
/// Brightness tolerance for recognising flat-compatible pixels.
const FLAT_TOL: f64 = 1e-9;

/// Point light direction given as slant (angle from the viewing axis) and
/// tilt (azimuth in the image plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightDirection {
    slant: f64,
    tilt: f64,
}

impl LightDirection {
    pub fn new(slant: f64, tilt: f64) -> Result<Self> {
        if !(slant.is_finite() && (0.0..core::f64::consts::FRAC_PI_2).contains(&slant)) {
            return Err(Error::InvalidArgument("slant must lie in [0, pi/2)"));
        }
        if !(tilt.is_finite() && (0.0..core::f64::consts::TAU).contains(&tilt)) {
            return Err(Error::InvalidArgument("tilt must lie in [0, 2pi)"));
        }
        Ok(LightDirection { slant, tilt })
    }

    pub const fn frontal() -> Self {
        LightDirection { slant: 0.0, tilt: 0.0 }
    }

    pub fn slant(&self) -> f64 {
        self.slant
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// Unit illumination vector.
    pub fn vector(&self) -> [f64; 3] {
        let (ss, cs) = (libm::sin(self.slant), libm::cos(self.slant));
        [libm::cos(self.tilt) * ss, libm::sin(self.tilt) * ss, cs]
    }
}

impl Default for LightDirection {
    fn default() -> Self {
        Self::frontal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfsConfig {
    /// Number of sweeps.
    pub iterations: u32,
    pub light: LightDirection,
}

impl Default for SfsConfig {
    fn default() -> Self {
        SfsConfig {
            iterations: 10,
            light: LightDirection::frontal(),
        }
    }
}

impl SfsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Unclamped Lambertian reflectance for gradient `(p, q)`.
#[inline]
pub fn reflectance(p: f64, q: f64, s: &[f64; 3]) -> f64 {
    (-p * s[0] - q * s[1] + s[2]) / libm::sqrt(1.0 + p * p + q * q)
}

#[inline]
fn gradient(z: &Plane, x: usize, y: usize) -> (f64, f64) {
    if x == 0 || y == 0 {
        (0.0, 0.0)
    } else {
        let c = z.get(x, y);
        (c - z.get(x - 1, y), c - z.get(x, y - 1))
    }
}

/// Renders `max(0, n·s)` for every pixel, clamped to `[0, 1]`.
pub fn render_lambertian(depth: &Plane, light: LightDirection) -> GrayImage {
    let s = light.vector();
    let out = Plane::from_fn(depth.width(), depth.height(), |x, y| {
        let (p, q) = gradient(depth, x, y);
        reflectance(p, q, &s).clamp(0.0, 1.0)
    });
    GrayImage::from_plane_clamped(out)
}

/// Mean absolute difference between the image and the rendering of `depth`.
pub fn mean_residual(image: &GrayImage, depth: &Plane, light: LightDirection) -> f64 {
    let rendered = render_lambertian(depth, light);
    let n = image.data().len().max(1) as f64;
    image
        .data()
        .iter()
        .zip(rendered.data())
        .map(|(e, r)| (e - r).abs())
        .sum::<f64>()
        / n
}

/// `{u : (k − σu) / √(area + w·u²) ≥ e}` for `e > 0`, `area, w > 0`.
///
/// The set is an interval (possibly unbounded). Squaring gives the quadratic
/// `(σ² − e²w)u² − 2kσu + k² − e²·area ≥ 0`, which is intersected with the
/// half-line where the numerator is non-negative.
fn level_set(k: f64, sigma: f64, area: f64, w: f64, e: f64) -> Option<(f64, f64)> {
    let (hl, hh) = if sigma > 0.0 {
        (f64::NEG_INFINITY, k / sigma)
    } else if sigma < 0.0 {
        (k / sigma, f64::INFINITY)
    } else if k >= 0.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        return None;
    };
    let qa = sigma * sigma - e * e * w;
    let qb = -2.0 * k * sigma;
    let qc = k * k - e * e * area;
    let keep = |lo: f64, hi: f64| {
        let (lo, hi) = (lo.max(hl), hi.min(hh));
        (lo <= hi).then_some((lo, hi))
    };
    if qa.abs() < 1e-15 {
        return if qb == 0.0 {
            (qc >= 0.0).then_some((hl, hh))
        } else if qb > 0.0 {
            keep(-qc / qb, f64::INFINITY)
        } else {
            keep(f64::NEG_INFINITY, -qc / qb)
        };
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if qa > 0.0 && disc <= 0.0 {
        // the quadratic never goes negative
        return Some((hl, hh));
    }
    if disc < 0.0 {
        return None;
    }
    let h = -0.5 * (qb + libm::copysign(libm::sqrt(disc), qb));
    let (r1, r2) = if h == 0.0 { (0.0, 0.0) } else { (h / qa, qc / h) };
    let (r1, r2) = (r1.min(r2), r1.max(r2));
    if qa < 0.0 {
        keep(r1, r2)
    } else {
        // outside the roots; the set is convex, so only one piece survives
        match (keep(f64::NEG_INFINITY, r1), keep(r2, f64::INFINITY)) {
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(if sigma > 0.0 { a } else { b }),
            (None, None) => None,
        }
    }
}

fn clip(range: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (lo, hi) = range?;
    let (lo, hi) = (lo.max(-MAX_SLOPE), hi.min(MAX_SLOPE));
    (lo <= hi).then_some((lo, hi))
}

/// Constraint set of one pixel in a frame where `u` is the gradient
/// component paired with light component `lu` and `v` the other one.
#[derive(Debug, Clone, Copy)]
struct Admissible {
    sz: f64,
    lu: f64,
    lv: f64,
    e: f64,
}

impl Admissible {
    fn new(s: &[f64; 3], e: f64) -> Self {
        Admissible {
            sz: s[2],
            lu: s[0],
            lv: s[1],
            e,
        }
    }

    fn transposed(self) -> Self {
        Admissible {
            lu: self.lv,
            lv: self.lu,
            ..self
        }
    }

    fn shadowed(&self) -> bool {
        self.e <= 0.0
    }

    /// Range of `u` over the set.
    fn u_range(&self) -> Option<(f64, f64)> {
        if self.shadowed() {
            return Some((-MAX_SLOPE, MAX_SLOPE));
        }
        // maximizing over v leaves (sz − u·lu) / √(1 + u²) ≥ √(e² − lv²)
        let range = if self.e > self.lv.abs() {
            let e = libm::sqrt(self.e * self.e - self.lv * self.lv);
            level_set(self.sz, self.lu, 1.0, 1.0, e)
        } else if self.lu > 0.0 {
            Some((f64::NEG_INFINITY, self.sz / self.lu))
        } else if self.lu < 0.0 {
            Some((self.sz / self.lu, f64::INFINITY))
        } else {
            Some((f64::NEG_INFINITY, f64::INFINITY))
        };
        clip(range)
    }

    /// Range of `v` with `u` held fixed.
    fn v_range_at(&self, u: f64) -> Option<(f64, f64)> {
        if self.shadowed() {
            return Some((-MAX_SLOPE, MAX_SLOPE));
        }
        clip(level_set(self.sz - u * self.lu, self.lv, 1.0 + u * u, 1.0, self.e))
    }

    /// Highest `v` in the set at the extreme `u`. At a tangency the
    /// cross-section is one point that rounding can lose, so fall back to
    /// where `R` peaks along `v`.
    fn v_top_at_extreme_u(&self, u: f64) -> Option<f64> {
        if let Some((_, v)) = self.v_range_at(u) {
            return Some(v);
        }
        let k = self.sz - u * self.lu;
        (k > 0.0).then(|| (-self.lv * (1.0 + u * u) / k).clamp(-MAX_SLOPE, MAX_SLOPE))
    }

    /// Largest `min(a + u, b + v)` over the set.
    fn own_bound(&self, a: f64, b: f64) -> Option<f64> {
        // optimum at the extreme u point, the extreme v point, or on u − v = b − a
        if let Some((_, u)) = self.u_range() {
            if let Some(v) = self.v_top_at_extreme_u(u) {
                if b + v >= a + u {
                    return Some(a + u);
                }
            }
        }
        let t = self.transposed();
        if let Some((_, v)) = t.u_range() {
            if let Some(u) = t.v_top_at_extreme_u(v) {
                if a + u >= b + v {
                    return Some(b + v);
                }
            }
        }
        if !(a.is_finite() && b.is_finite()) {
            return None;
        }
        // u = t − d, v = t + d with t the offset from the midpoint
        let d = 0.5 * (a - b);
        let (lo, hi) = if self.shadowed() {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            let k = self.sz + d * (self.lu - self.lv);
            level_set(k, self.lu + self.lv, 1.0 + 2.0 * d * d, 2.0, self.e)?
        };
        let hi = hi.min(MAX_SLOPE - d.abs());
        let lo = lo.max(-MAX_SLOPE + d.abs());
        (lo <= hi).then_some(0.5 * (a + b) + hi)
    }
}

/// Border pixels plus the flat-compatible region connected to them.
fn seed_mask(e: &Plane, flat: f64) -> Vec<bool> {
    let (w, h) = e.extent();
    let matches_flat = |x: usize, y: usize| {
        let ys = y.saturating_sub(1)..=(y + 1).min(h - 1);
        ys.into_iter()
            .all(|yy| (x.saturating_sub(1)..=(x + 1).min(w - 1)).all(|xx| (e.get(xx, yy) - flat).abs() <= FLAT_TOL))
    };
    let mut seed = vec![false; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                seed[y * w + x] = true;
                if matches_flat(x, y) {
                    stack.push((x, y));
                }
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        let around = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
        for (nx, ny) in around {
            if nx < w && ny < h && !seed[ny * w + nx] && matches_flat(nx, ny) {
                seed[ny * w + nx] = true;
                stack.push((nx, ny));
            }
        }
    }
    seed
}

/// Incremental estimator; exposes individual sweeps so convergence can be
/// observed. [`estimate_depth`] is the one-shot entry point.
#[derive(Debug, Clone)]
pub struct DepthEstimator<'a> {
    image: &'a GrayImage,
    light: LightDirection,
    sets: Vec<Admissible>,
    /// Lowest admissible `p` and `q` per pixel.
    p_lo: Vec<f64>,
    q_lo: Vec<f64>,
    seed: Vec<bool>,
    z: Plane,
    sweeps: usize,
}

impl<'a> DepthEstimator<'a> {
    pub fn new(image: &'a GrayImage, light: LightDirection) -> Self {
        let s = light.vector();
        let e = image.plane();
        let (w, h) = e.extent();
        let sets: Vec<Admissible> = e.data().iter().map(|&b| Admissible::new(&s, b)).collect();
        let lowest = |r: Option<(f64, f64)>| r.map_or(f64::NEG_INFINITY, |r| r.0);
        let p_lo = sets.iter().map(|c| lowest(c.u_range())).collect();
        let q_lo = sets.iter().map(|c| lowest(c.transposed().u_range())).collect();
        let seed = if e.is_empty() { Vec::new() } else { seed_mask(e, s[2]) };
        let z = Plane::from_fn(w, h, |x, y| if seed[y * w + x] { 0.0 } else { f64::INFINITY });
        DepthEstimator {
            image,
            light,
            sets,
            p_lo,
            q_lo,
            seed,
            z,
            sweeps: 0,
        }
    }

    /// One sweep. Returns the largest depth decrease, infinite while some
    /// pixel is still unbounded before the sweep.
    pub fn sweep(&mut self) -> f64 {
        let (w, h) = self.z.extent();
        let k = self.sweeps;
        self.sweeps += 1;
        if w < 3 || h < 3 {
            return 0.0;
        }
        let xs = 1..w - 1;
        let ys = 1..h - 1;
        let mut largest = 0.0f64;
        let mut visit = |x: usize, y: usize, z: &mut Plane| {
            let i = y * w + x;
            if self.seed[i] {
                return;
            }
            let mut bound = z.get(x, y);
            if let Some(v) = self.sets[i].own_bound(z.get(x - 1, y), z.get(x, y - 1)) {
                bound = bound.min(v);
            }
            bound = bound.min(z.get(x + 1, y) - self.p_lo[i + 1]);
            bound = bound.min(z.get(x, y + 1) - self.q_lo[i + w]);
            let old = z.get(x, y);
            if bound < old {
                largest = largest.max(old - bound);
                z.set(x, y, bound);
            }
        };
        let z = &mut self.z;
        match k % 4 {
            0 => ys.for_each(|y| xs.clone().for_each(|x| visit(x, y, z))),
            1 => ys.for_each(|y| xs.clone().rev().for_each(|x| visit(x, y, z))),
            2 => ys.rev().for_each(|y| xs.clone().for_each(|x| visit(x, y, z))),
            _ => ys.rev().for_each(|y| xs.clone().rev().for_each(|x| visit(x, y, z))),
        }
        largest
    }

    /// Current estimate: unbounded and shadowed pixels take the lowest lit
    /// depth, then the map is gauged to `min = 0`.
    pub fn depth(&self) -> DepthMap {
        let e = self.image.data();
        let lit = |(&v, &b): (&f64, &f64)| v.is_finite() && b > 0.0;
        let floor = self
            .z
            .data()
            .iter()
            .zip(e)
            .filter(|&pair| lit(pair))
            .map(|(&v, _)| v)
            .fold(f64::INFINITY, f64::min);
        let floor = if floor.is_finite() { floor } else { 0.0 };
        let mut z = self.z.clone();
        for (v, &b) in z.data_mut().iter_mut().zip(e) {
            if !(v.is_finite() && b > 0.0) {
                *v = floor;
            }
        }
        DepthMap::gauged(z)
    }

    /// Mean `|E − R|` of the current estimate.
    pub fn residual(&self) -> f64 {
        mean_residual(self.image, self.depth().plane(), self.light)
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn finish(self) -> DepthMap {
        self.depth()
    }
}

/// Recovers a relative depth map from a single gray image.
pub fn estimate_depth(image: &GrayImage, cfg: &SfsConfig) -> Result<DepthMap> {
    cfg.validate()?;
    let mut est = DepthEstimator::new(image, cfg.light);
    for _ in 0..cfg.iterations {
        est.sweep();
    }
    Ok(est.finish())
}

/// Relative L2 distance between two gauged depth maps.
pub fn illumination_invariance_gap(a: &DepthMap, b: &DepthMap) -> Result<f64> {
    if a.plane().extent() != b.plane().extent() {
        return Err(Error::ExtentMismatch {
            left: a.plane().extent(),
            right: b.plane().extent(),
        });
    }
    // re-gauge in case the maps were built by hand
    let ga = DepthMap::gauged(a.plane().clone());
    let gb = DepthMap::gauged(b.plane().clone());
    let norm = |v: &[f64]| libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    let diff: Vec<f64> = ga.data().iter().zip(gb.data()).map(|(x, y)| x - y).collect();
    let denom = norm(ga.data()).max(norm(gb.data())).max(1e-12);
    Ok(norm(&diff) / denom)
}

//! Direct discrete Fourier transform of real sequences.
//!
//! Feature profiles are a few hundred samples long, so the O(N·K) sum is
//! cheap and keeps the crate free of FFT machinery. Twiddles are indexed by
//! `(k·n) mod N`, which keeps the phase argument exact.

use alloc::vec::Vec;

/// `X[k] = Σₙ x[n] e^{−2πikn/N}` for `k < bins`, as `(re, im)` pairs.
pub fn dft(x: &[f64], bins: usize) -> Vec<(f64, f64)> {
    let n = x.len();
    if n == 0 {
        return alloc::vec![(0.0, 0.0); bins];
    }
    let step = core::f64::consts::TAU / n as f64;
    let twiddles: Vec<(f64, f64)> = (0..n)
        .map(|m| {
            let a = step * m as f64;
            (libm::cos(a), -libm::sin(a))
        })
        .collect();
    (0..bins)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let (c, s) = twiddles[(k * i) % n];
                re += v * c;
                im += v * s;
            }
            (re, im)
        })
        .collect()
}

/// Magnitudes of the first `bins` DFT coefficients.
pub fn magnitude_spectrum(x: &[f64], bins: usize) -> Vec<f64> {
    dft(x, bins).into_iter().map(|(re, im)| libm::hypot(re, im)).collect()
}

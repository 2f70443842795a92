use rustfft::FftPlanner;

use crate::C64;

/// In-place `X_n = Σ_j x_j e^{-2πijn/M}` (unnormalised).
pub fn forward(buf: &mut [C64]) {
    if buf.len() <= 1 {
        return;
    }
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// In-place `x_j = Σ_n X_n e^{2πijn/M}` (unnormalised).
pub fn inverse(buf: &mut [C64]) {
    if buf.len() <= 1 {
        return;
    }
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// `e^{2πi k/m}` with the index reduced first so large `k` stays exact.
pub fn root_of_unity(k: i64, m: usize) -> C64 {
    let r = k.rem_euclid(m as i64) as f64 / m as f64;
    turn(r)
}

/// `e^{2πiθ}`.
pub fn turn(theta: f64) -> C64 {
    let a = std::f64::consts::TAU * theta;
    C64::new(a.cos(), a.sin())
}

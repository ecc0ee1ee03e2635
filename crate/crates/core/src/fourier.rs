//! Cosine sums over the odd-length grid period `L = 2m + 1`.
//!
//! Both the encoder (populations → ancilla profile) and the decoder
//! (ancilla profile → populations) reduce to
//! `C_t = Σ_s v_s cos(2π s t / L)` for all `t` in `0..L`, which is the real
//! part of a length-`L` DFT. `L` is odd and never a power of two, so the
//! transform relies on the planner's arbitrary-length algorithms
//! (Rader/Bluestein).

use num_complex::Complex64;
use rustfft::FftPlanner;

/// `C_t = Σ_s values[s] · cos(2π s t / period)` for `t` in `0..outputs`.
///
/// `values.len()` and `outputs` must not exceed `period`.
pub fn cosine_sums(values: &[f64], period: usize, outputs: usize) -> Vec<f64> {
    assert!(values.len() <= period && outputs <= period);
    let mut buf: Vec<Complex64> = Vec::with_capacity(period);
    buf.extend(values.iter().map(|&v| Complex64::new(v, 0.0)));
    buf.resize(period, Complex64::new(0.0, 0.0));
    let fft = FftPlanner::<f64>::new().plan_fft_forward(period);
    fft.process(&mut buf);
    buf.truncate(outputs);
    buf.into_iter().map(|c| c.re).collect()
}

/// `cos(2π t / period)` for `t` in `0..period`.
pub fn cosine_table(period: usize) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / period as f64;
    (0..period).map(|t| (step * t as f64).cos()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let period = 31;
        let values: Vec<f64> = (0..16).map(|s| ((s * 7 + 3) % 11) as f64 / 11.0).collect();
        let fast = cosine_sums(&values, period, period);
        for (t, &c) in fast.iter().enumerate() {
            let direct: f64 = values
                .iter()
                .enumerate()
                .map(|(s, &v)| v * (2.0 * std::f64::consts::PI * (s * t) as f64 / period as f64).cos())
                .sum();
            assert!((c - direct).abs() < 1e-12, "t={t}: {c} vs {direct}");
        }
    }
}

//! Sums of the form `S(ω_k) = Σ_i a_i exp(i ω_k t_i)` on a uniform frequency grid.
//!
//! These dominate the cost of the forward model. Two evaluators are provided: a
//! direct one using phase recurrences, and a binned one that groups the times `t_i`
//! into bins of width `Δt` and expands `exp(i ω δ)` around each bin center as a
//! truncated Taylor series. The truncation order is picked so that the remainder is
//! below `1e-14` of `Σ|a_i|`, so both evaluators agree to rounding.

use num_complex::Complex64;

use super::UniformGrid;

const REANCHOR: usize = 64;
const TAYLOR_TOL: f64 = 1e-14;

fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// Direct evaluation, `O(n · L)`.
pub fn phase_sum_direct(times: &[f64], amps: &[Complex64], omega: &UniformGrid) -> Vec<Complex64> {
    assert_eq!(times.len(), amps.len());
    let l = omega.len;
    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for (&t, &a) in times.iter().zip(amps) {
        let step = cis(omega.step * t);
        let mut j = 0;
        while j < l {
            let mut ph = a * cis(omega.at(j) * t);
            let stop = (j + REANCHOR).min(l);
            for slot in &mut out[j..stop] {
                *slot += ph;
                ph *= step;
            }
            j = stop;
        }
    }
    out
}

/// Binned Taylor evaluation; falls back to the direct sum when that is cheaper.
pub fn phase_sum(times: &[f64], amps: &[Complex64], omega: &UniformGrid) -> Vec<Complex64> {
    assert_eq!(times.len(), amps.len());
    let n = times.len();
    let l = omega.len;
    if n == 0 || l == 0 {
        return vec![Complex64::new(0.0, 0.0); l];
    }
    let w_max = omega.start.abs().max(omega.at(l - 1).abs());
    if w_max == 0.0 {
        let total: Complex64 = amps.iter().sum();
        return vec![total; l];
    }
    let (t_min, t_max) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    let dt = 0.5 / w_max;
    let x = 0.25;
    let mut order = 0usize;
    let mut term = x;
    while term > TAYLOR_TOL {
        order += 1;
        term *= x / (order as f64 + 1.0);
    }
    let m = order + 1;
    let bins = ((t_max - t_min) / dt).round() as usize + 1;
    let direct_cost = n * l;
    let binned_cost = n * m + 2 * bins * l * m;
    if direct_cost <= binned_cost {
        return phase_sum_direct(times, amps, omega);
    }

    let mut factorial = vec![1.0; m];
    for k in 1..m {
        factorial[k] = factorial[k - 1] * k as f64;
    }
    let mut hist = vec![Complex64::new(0.0, 0.0); bins * m];
    for (&t, &a) in times.iter().zip(amps) {
        let k = (((t - t_min) / dt).round() as usize).min(bins - 1);
        let delta = t - (t_min + k as f64 * dt);
        let row = &mut hist[k * m..(k + 1) * m];
        let mut p = 1.0;
        for (slot, f) in row.iter_mut().zip(&factorial) {
            *slot += a * (p / f);
            p *= delta;
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); l];
    for (j, slot) in out.iter_mut().enumerate() {
        let w = omega.at(j);
        let s = Complex64::new(0.0, w);
        let step = cis(w * dt);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut k = 0;
        while k < bins {
            let mut ph = cis(w * (t_min + k as f64 * dt));
            let stop = (k + REANCHOR).min(bins);
            for b in k..stop {
                let row = &hist[b * m..(b + 1) * m];
                let mut poly = row[m - 1];
                for c in row[..m - 1].iter().rev() {
                    poly = poly * s + c;
                }
                acc += poly * ph;
                ph *= step;
            }
            k = stop;
        }
        *slot = acc;
    }
    out
}

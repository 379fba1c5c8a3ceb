use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Analytic signal of a real sequence: positive frequencies doubled, negative removed.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    AnalyticSignal::new(x.len()).process(x)
}

/// Reusable plans for analytic signals of a fixed length.
pub struct AnalyticSignal {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AnalyticSignal {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn process(&self, x: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(x.len(), n);
        if n == 0 {
            return Vec::new();
        }
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let half = n / 2;
        for (k, v) in buf.iter_mut().enumerate() {
            let gain = if k == 0 || (n % 2 == 0 && k == half) {
                1.0
            } else if k <= (n - 1) / 2 {
                2.0
            } else {
                0.0
            };
            *v *= gain / n as f64;
        }
        self.inverse.process(&mut buf);
        buf
    }
}

/// Forward then inverse transform, normalized; used to check plan round trips.
pub fn fft_round_trip(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = x.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|v| v / n as f64).collect()
}

/// In-place 3D transform over a row-major array with the last axis fastest.
pub struct Fft3 {
    dims: [usize; 3],
    plans: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3], inverse: bool) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let mut plan = |n| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        };
        let plans = [plan(dims[0]), plan(dims[1]), plan(dims[2])];
        Self { dims, plans }
    }

    pub fn process(&self, data: &mut [Complex64]) {
        let [n0, n1, n2] = self.dims;
        assert_eq!(data.len(), n0 * n1 * n2);
        // Last axis is contiguous.
        self.plans[2].process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); n0.max(n1)];
        for i in 0..n0 {
            for k in 0..n2 {
                for j in 0..n1 {
                    line[j] = data[(i * n1 + j) * n2 + k];
                }
                self.plans[1].process(&mut line[..n1]);
                for j in 0..n1 {
                    data[(i * n1 + j) * n2 + k] = line[j];
                }
            }
        }
        for j in 0..n1 {
            for k in 0..n2 {
                for i in 0..n0 {
                    line[i] = data[(i * n1 + j) * n2 + k];
                }
                self.plans[0].process(&mut line[..n0]);
                for i in 0..n0 {
                    data[(i * n1 + j) * n2 + k] = line[i];
                }
            }
        }
    }
}

//! Composite Simpson quadrature over a stream of uniformly spaced samples.

use alloc::vec;
use alloc::vec::Vec;

/// Integrates several integrands at once. An odd number of intervals closes
/// with Simpson's 3/8 rule on the last three.
#[derive(Debug, Clone)]
pub struct SimpsonAccumulator {
    dt: f64,
    lanes: usize,
    count: usize,
    /// Integral up to the latest even sample index.
    even: Vec<f64>,
    /// Integral up to the even index before that.
    prev_even: Vec<f64>,
    /// Last four samples, most recent last.
    window: [Vec<f64>; 4],
}

impl SimpsonAccumulator {
    pub fn new(lanes: usize, dt: f64) -> Self {
        Self {
            dt,
            lanes,
            count: 0,
            even: vec![0.0; lanes],
            prev_even: vec![0.0; lanes],
            window: [vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes]],
        }
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn samples(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.lanes);
        self.window.rotate_left(1);
        self.window[3].copy_from_slice(values);
        let k = self.count;
        self.count += 1;
        if k >= 2 && k % 2 == 0 {
            for i in 0..self.lanes {
                let piece = self.dt / 3.0 * (self.window[1][i] + 4.0 * self.window[2][i] + self.window[3][i]);
                self.prev_even[i] = self.even[i];
                self.even[i] += piece;
            }
        }
    }

    pub fn integrals(&self) -> Vec<f64> {
        let intervals = self.count.saturating_sub(1);
        match intervals {
            0 => vec![0.0; self.lanes],
            1 => (0..self.lanes)
                .map(|i| 0.5 * self.dt * (self.window[2][i] + self.window[3][i]))
                .collect(),
            k if k % 2 == 0 => self.even.clone(),
            _ => (0..self.lanes)
                .map(|i| {
                    let w = &self.window;
                    let tail = 3.0 * self.dt / 8.0 * (w[0][i] + 3.0 * w[1][i] + 3.0 * w[2][i] + w[3][i]);
                    // k odd: `even` covers [0, k−1]; `prev_even` covers [0, k−3]
                    self.prev_even[i] + tail
                })
                .collect(),
        }
    }
}

/// Simpson integral of uniformly spaced samples.
pub fn simpson(samples: &[f64], dt: f64) -> f64 {
    let mut acc = SimpsonAccumulator::new(1, dt);
    for &s in samples {
        acc.push(&[s]);
    }
    acc.integrals()[0]
}

//! Real matrix exponential by scaling and squaring of a truncated Taylor series.

use nalgebra::DMatrix;

#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)]
use num_traits::Float;

const TERMS: usize = 24;

fn norm_one(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// exp(a) for a square matrix.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = norm_one(a);
    let mut squarings = 0u32;
    while norm / (1u64 << squarings) as f64 > 0.5 && squarings < 60 {
        squarings += 1;
    }
    let scaled = a / (1u64 << squarings) as f64;
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=TERMS {
        term = &term * &scaled / k as f64;
        result += &term;
        if norm_one(&term) < f64::EPSILON * 1e-3 * norm_one(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.5, 10.0]));
        let e = expm(&a);
        for (i, x) in [-3.0f64, 0.5, 10.0].iter().enumerate() {
            assert!((e[(i, i)] / x.exp() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rotation_generator() {
        let theta = 7.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let e = expm(&a);
        assert!((e[(0, 0)] - theta.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - theta.sin()).abs() < 1e-13);
    }
}

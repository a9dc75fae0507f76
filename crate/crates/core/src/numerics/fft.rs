//! Radix-2 unitary FFT over power-of-two grids, any number of axes.
//!
//! Both directions carry the 1/√N normalization, so forward and inverse
//! are exact adjoints and the transform preserves norms.

use num_complex::Complex64;
use std::f64::consts::TAU;

use super::ComplexVector;
use crate::error::{Error, Result};

/// Discrete Fourier transform of `v` laid out row-major over `shape`.
///
/// Every axis length must be a power of two; the product of the axis
/// lengths must equal `v.dim()`.
pub fn fft_nd(v: &ComplexVector, shape: &[usize], inverse: bool) -> Result<ComplexVector> {
    let mut data = v.data().to_vec();
    fft_nd_in_place(&mut data, shape, inverse)?;
    Ok(ComplexVector::new(data))
}

pub(crate) fn fft_nd_in_place(
    data: &mut [Complex64],
    shape: &[usize],
    inverse: bool,
) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::InvalidArgument("fft shape must be nonempty".into()));
    }
    for &n in shape {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::UnsupportedSize { size: n });
        }
    }
    let total: usize = shape.iter().product();
    if total != data.len() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: data.len(),
        });
    }
    for axis in 0..shape.len() {
        let len = shape[axis];
        if len == 1 {
            continue;
        }
        let stride: usize = shape[axis + 1..].iter().product();
        let block = len * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for t in 0..len {
                    line[t] = data[start + t * stride];
                }
                fft_1d(&mut line, inverse);
                for t in 0..len {
                    data[start + t * stride] = line[t];
                }
            }
        }
    }
    Ok(())
}

fn fft_1d(a: &mut [Complex64], inverse: bool) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * TAU / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // Twiddles from the exact angle each time; accumulating
                // products would lose digits on long lines.
                let w = Complex64::from_polar(1.0, step * k as f64);
                let u = a[start + k];
                let t = w * a[start + k + half];
                a[start + k] = u + t;
                a[start + k + half] = u - t;
            }
        }
        len <<= 1;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for z in a.iter_mut() {
        *z *= scale;
    }
}

//! In-place iterative radix-2 FFT.
//!
//! The forward transform is unnormalized; the inverse carries the 1/N
//! factor, so `inverse(forward(x)) == x` and N·Σ|x|² = Σ|X|².

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FftPlan {
    len: usize,
    log2_len: u32,
    // e^{-2πi t/N} for t in 0..N/2
    twiddles: Vec<Complex64>,
    butterflies: u64,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::domain(format!(
                "FFT length must be a power of two, got {len}"
            )));
        }
        let twiddles = (0..len / 2)
            .map(|t| Complex64::from_polar(1.0, -2.0 * PI * t as f64 / len as f64))
            .collect();
        Ok(FftPlan {
            len,
            log2_len: len.trailing_zeros(),
            twiddles,
            butterflies: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Butterflies executed since the plan was built, (N/2)·log2 N per transform.
    pub fn butterflies(&self) -> u64 {
        self.butterflies
    }

    pub fn forward(&mut self, data: &mut [Complex64]) -> Result<()> {
        self.transform(data, false)
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) -> Result<()> {
        self.transform(data, true)?;
        let scale = 1.0 / self.len as f64;
        data.iter_mut().for_each(|x| *x *= scale);
        Ok(())
    }

    fn transform(&mut self, data: &mut [Complex64], inverse: bool) -> Result<()> {
        if data.len() != self.len {
            return Err(Error::Shape(format!(
                "FFT plan of length {} applied to {} samples",
                self.len,
                data.len()
            )));
        }
        let n = self.len;
        if n == 1 {
            return Ok(());
        }
        let shift = usize::BITS - self.log2_len;
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if j > i {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for block in (0..n).step_by(2 * half) {
                for t in 0..half {
                    let w = self.twiddles[t * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = data[block + t];
                    let b = data[block + t + half] * w;
                    data[block + t] = a + b;
                    data[block + t + half] = a - b;
                    self.butterflies += 1;
                }
            }
            half *= 2;
        }
        Ok(())
    }
}

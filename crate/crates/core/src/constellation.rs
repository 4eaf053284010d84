//! Gray-coded rectangular QAM, normalized to unit average energy.
//!
//! log2 M bits are split between the in-phase axis (the larger half) and
//! the quadrature axis, so M = 2 is BPSK on the real axis, M = 4 is QPSK,
//! M = 8 is 4×2 rectangular and so on.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Qam {
    order: u32,
    bits_i: u32,
    bits_q: u32,
    scale: f64,
    rotation: Complex64,
}

fn pam_level(bits: &[bool]) -> f64 {
    let levels = 1u32 << bits.len();
    let gray = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
    let mut index = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        index ^= shift;
        shift >>= 1;
    }
    (levels - 1) as f64 - 2.0 * index as f64
}

fn pam_slice(amplitude: f64, width: u32, out: &mut Vec<bool>) {
    if width == 0 {
        return;
    }
    let levels = 1i64 << width;
    let index = (((levels - 1) as f64 - amplitude) / 2.0).round() as i64;
    let index = index.clamp(0, levels - 1) as u32;
    let gray = index ^ (index >> 1);
    out.extend((0..width).rev().map(|i| (gray >> i) & 1 == 1));
}

impl Qam {
    pub fn new(order: u32) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::domain(format!(
                "constellation order must be a power of two >= 2, got {order}"
            )));
        }
        let bits = order.trailing_zeros();
        let bits_q = bits / 2;
        let bits_i = bits - bits_q;
        let li = (1u64 << bits_i) as f64;
        let lq = (1u64 << bits_q) as f64;
        let energy = (li * li - 1.0) / 3.0 + (lq * lq - 1.0) / 3.0;
        Ok(Qam {
            order,
            bits_i,
            bits_q,
            scale: energy.sqrt().recip(),
            rotation: Complex64::new(1.0, 0.0),
        })
    }

    /// The same constellation multiplied by a unit-modulus phasor.
    pub fn rotated(mut self, phasor: Complex64) -> Self {
        self.rotation = phasor / phasor.norm();
        self
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        (self.bits_i + self.bits_q) as usize
    }

    pub fn map(&self, bits: &[bool]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        let (bi, bq) = bits.split_at(self.bits_i as usize);
        let i = if self.bits_i > 0 { pam_level(bi) } else { 0.0 };
        let q = if self.bits_q > 0 { pam_level(bq) } else { 0.0 };
        Complex64::new(i, q) * self.scale * self.rotation
    }

    /// Nearest-point decision, appending the decided bits to `out`.
    pub fn demap(&self, y: Complex64, out: &mut Vec<bool>) {
        let z = y * self.rotation.conj() / self.scale;
        pam_slice(z.re, self.bits_i, out);
        pam_slice(z.im, self.bits_q, out);
    }

    /// The constellation point nearest to `y`.
    pub fn nearest(&self, y: Complex64) -> Complex64 {
        let mut bits = Vec::with_capacity(self.bits_per_symbol());
        self.demap(y, &mut bits);
        self.map(&bits)
    }

    pub fn distance_sqr(&self, y: Complex64) -> f64 {
        (y - self.nearest(y)).norm_sqr()
    }

    pub fn points(&self) -> Vec<Complex64> {
        let width = self.bits_per_symbol();
        (0..self.order)
            .map(|v| {
                let bits: Vec<bool> = (0..width).rev().map(|i| (v >> i) & 1 == 1).collect();
                self.map(&bits)
            })
            .collect()
    }

    /// Smallest distance between any point of `self` and any point of `other`.
    pub fn min_cross_distance(&self, other: &Qam) -> f64 {
        let theirs = other.points();
        self.points()
            .iter()
            .flat_map(|a| theirs.iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_bits(width: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << width).map(move |v| (0..width).rev().map(|i| (v >> i) & 1 == 1).collect())
    }

    #[test]
    fn bpsk_maps_zero_to_plus_one() {
        let bpsk = Qam::new(2).unwrap();
        assert_eq!(bpsk.map(&[false]), Complex64::new(1.0, 0.0));
        assert_eq!(bpsk.map(&[true]), Complex64::new(-1.0, 0.0));
        let imag = Qam::new(2).unwrap().rotated(Complex64::i());
        assert!((imag.map(&[false]) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn unit_average_energy_and_roundtrip() {
        for order in [2u32, 4, 8, 16, 32, 64, 256] {
            let qam = Qam::new(order).unwrap();
            let points = qam.points();
            let energy: f64 = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
            assert!((energy - 1.0).abs() < 1e-12, "M={order}");
            for bits in all_bits(qam.bits_per_symbol()) {
                let mut out = Vec::new();
                qam.demap(qam.map(&bits), &mut out);
                assert_eq!(out, bits);
            }
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let qam = Qam::new(16).unwrap();
        let pts: Vec<(Vec<bool>, Complex64)> =
            all_bits(4).map(|b| (b.clone(), qam.map(&b))).collect();
        let step = 2.0 * (0.1f64).sqrt();
        for (a, pa) in &pts {
            for (b, pb) in &pts {
                if ((pa - pb).norm() - step).abs() < 1e-9 {
                    assert_eq!(a.iter().zip(b).filter(|(x, y)| x != y).count(), 1);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(Qam::new(1).is_err());
        assert!(Qam::new(6).is_err());
    }
}

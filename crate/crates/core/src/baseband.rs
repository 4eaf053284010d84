//! Executable transmitter/receiver chain with per-stage cost ledgers.
//!
//! Data subcarriers occupy bins `0..n_data`, split into `g` consecutive
//! subblocks of `n_sub` bins. Within a subblock the bit layout is: index
//! bits, then the symbol bits of the active (mode A) subcarriers in
//! ascending order, then, for DM-OFDM, those of the inactive (mode B)
//! subcarriers.
//!
//! Ledgers charge transforms and detection at the cost-model rates
//! (N log2 N per transform, 1/2/4 units per subcarrier for detection)
//! and the index selector at the steps it actually executed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::constellation::Qam;
use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::ixs::IndexSelector;
use crate::units::CostUnits;
use crate::waveform::{
    bits_per_symbol, detection_cost, transform_cost, WaveformKind, WaveformSpec,
};

/// One time-domain OFDM symbol with its cyclic prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct BasebandFrame {
    pub time_samples: Vec<Complex64>,
    pub cp_len: usize,
}

impl BasebandFrame {
    /// Prepends the last `cp_len` samples of `body`.
    pub fn from_body(body: &[Complex64], cp_len: usize) -> Result<Self> {
        if cp_len > body.len() {
            return Err(Error::Shape(format!(
                "cyclic prefix of {cp_len} samples exceeds a body of {}",
                body.len()
            )));
        }
        let mut time_samples = Vec::with_capacity(body.len() + cp_len);
        time_samples.extend_from_slice(&body[body.len() - cp_len..]);
        time_samples.extend_from_slice(body);
        Ok(BasebandFrame {
            time_samples,
            cp_len,
        })
    }

    pub fn body(&self) -> &[Complex64] {
        &self.time_samples[self.cp_len.min(self.time_samples.len())..]
    }

    /// Whether the prefix repeats the tail of the body exactly.
    pub fn has_cyclic_prefix(&self) -> bool {
        let body = self.body();
        self.cp_len <= body.len()
            && self.time_samples[..self.cp_len] == body[body.len() - self.cp_len..]
    }

    pub fn mean_power(&self) -> f64 {
        if self.time_samples.is_empty() {
            return 0.0;
        }
        self.time_samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.time_samples.len() as f64
    }
}

/// Cost charged to each stage of one transmit or receive call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCostLedger {
    pub ifft_units: CostUnits,
    pub fft_units: CostUnits,
    pub ixs_units: CostUnits,
    pub detect_units: CostUnits,
}

impl StageCostLedger {
    pub fn total(&self) -> CostUnits {
        self.ifft_units + self.fft_units + self.ixs_units + self.detect_units
    }
}

/// Reusable per-spec state: FFT plan, constellations and index selector.
#[derive(Clone, Debug)]
pub struct Transceiver {
    spec: WaveformSpec,
    bits: usize,
    cp_len: usize,
    plan: FftPlan,
    mode_a: Qam,
    mode_b: Qam,
    selector: Option<IndexSelector>,
}

impl Transceiver {
    pub fn new(spec: &WaveformSpec) -> Result<Self> {
        spec.validate()?;
        let bits = bits_per_symbol(spec)? as usize;
        let cp_len = spec.cp_len()?;
        let (mode_a, mode_b) = match spec.kind {
            WaveformKind::Ofdm | WaveformKind::OfdmIm => {
                let q = Qam::new(spec.m_order)?;
                (q.clone(), q)
            }
            WaveformKind::DmOfdm => dm_constellations(spec.m_a, spec.m_b)?,
        };
        let selector = if spec.kind.is_index_modulated() {
            Some(IndexSelector::new(spec.n_sub, spec.k_active, spec.variant)?)
        } else {
            None
        };
        Ok(Transceiver {
            spec: spec.clone(),
            bits,
            cp_len,
            plan: FftPlan::new(spec.n_fft)?,
            mode_a,
            mode_b,
            selector,
        })
    }

    pub fn spec(&self) -> &WaveformSpec {
        &self.spec
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn transmit(&mut self, bits: &[bool]) -> Result<(BasebandFrame, StageCostLedger)> {
        if bits.len() != self.bits {
            return Err(Error::spec(
                "bits",
                format!(
                    "expected {} bits for {}, got {}",
                    self.bits,
                    self.spec.label(),
                    bits.len()
                ),
            ));
        }
        let spec = &self.spec;
        let mut grid = vec![Complex64::default(); spec.n_fft];
        let mut ixs_units = CostUnits::ZERO;
        match &mut self.selector {
            None => {
                let width = self.mode_a.bits_per_symbol();
                for (bin, chunk) in bits.chunks(width).enumerate() {
                    grid[bin] = self.mode_a.map(chunk);
                }
            }
            Some(selector) => {
                let width_a = self.mode_a.bits_per_symbol();
                let width_b = self.mode_b.bits_per_symbol();
                let p1 = selector.index_bits() as usize;
                let dm = spec.kind == WaveformKind::DmOfdm;
                let mut cursor = 0;
                let mut take = |len: usize| {
                    let slice = &bits[cursor..cursor + len];
                    cursor += len;
                    slice
                };
                for block in 0..spec.g {
                    let base = block * spec.n_sub;
                    selector.step_counter_snapshot(true);
                    let pattern = selector.map_bits(take(p1))?;
                    ixs_units += selector.step_counter_snapshot(true);
                    for &pos in &pattern.positions {
                        grid[base + pos] = self.mode_a.map(take(width_a));
                    }
                    if dm {
                        for pos in (0..spec.n_sub).filter(|p| !pattern.is_active(*p)) {
                            grid[base + pos] = self.mode_b.map(take(width_b));
                        }
                    }
                }
            }
        }
        self.plan.inverse(&mut grid)?;
        let frame = BasebandFrame::from_body(&grid, self.cp_len)?;
        let ledger = StageCostLedger {
            ifft_units: transform_cost(spec.n_fft),
            ixs_units,
            ..Default::default()
        };
        Ok((frame, ledger))
    }

    pub fn receive(&mut self, frame: &BasebandFrame) -> Result<(Vec<bool>, StageCostLedger)> {
        let spec = &self.spec;
        if frame.cp_len != self.cp_len || frame.time_samples.len() != spec.n_fft + self.cp_len {
            return Err(Error::Shape(format!(
                "frame has {} samples with a {}-sample prefix; {} expects {} + {}",
                frame.time_samples.len(),
                frame.cp_len,
                spec.label(),
                spec.n_fft,
                self.cp_len
            )));
        }
        let mut grid = frame.body().to_vec();
        self.plan.forward(&mut grid)?;
        let mut bits = Vec::with_capacity(self.bits);
        let mut ixs_units = CostUnits::ZERO;
        match &mut self.selector {
            None => {
                for y in &grid[..spec.n_data] {
                    self.mode_a.demap(*y, &mut bits);
                }
            }
            Some(selector) => {
                let dm = spec.kind == WaveformKind::DmOfdm;
                for block in 0..spec.g {
                    let sub = &grid[block * spec.n_sub..(block + 1) * spec.n_sub];
                    // lower score = more likely active
                    let scores: Vec<f64> = if dm {
                        sub.iter()
                            .map(|&y| self.mode_a.distance_sqr(y) - self.mode_b.distance_sqr(y))
                            .collect()
                    } else {
                        sub.iter().map(|y| -y.norm_sqr()).collect()
                    };
                    let mut order: Vec<usize> = (0..spec.n_sub).collect();
                    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
                    let mut active = order[..spec.k_active].to_vec();
                    active.sort_unstable();
                    selector.step_counter_snapshot(true);
                    let index_bits = selector.demap_bits(&active);
                    ixs_units += selector.step_counter_snapshot(true);
                    bits.extend(index_bits?);
                    for &pos in &active {
                        self.mode_a.demap(sub[pos], &mut bits);
                    }
                    if dm {
                        let mut is_active = vec![false; spec.n_sub];
                        active.iter().for_each(|&p| is_active[p] = true);
                        for pos in (0..spec.n_sub).filter(|&p| !is_active[p]) {
                            self.mode_b.demap(sub[pos], &mut bits);
                        }
                    }
                }
            }
        }
        let ledger = StageCostLedger {
            fft_units: transform_cost(spec.n_fft),
            ixs_units,
            detect_units: detection_cost(spec),
            ..Default::default()
        };
        Ok((bits, ledger))
    }
}

/// Mode A is QAM(M_A); mode B is QAM(M_B) rotated by π/2, or by π/4 when
/// the π/2 rotation lands on mode A's points.
fn dm_constellations(m_a: u32, m_b: u32) -> Result<(Qam, Qam)> {
    let a = Qam::new(m_a)?;
    for phase in [2.0 * FRAC_PI_4, FRAC_PI_4] {
        let b = Qam::new(m_b)?.rotated(Complex64::from_polar(1.0, phase));
        if a.min_cross_distance(&b) > 1e-6 {
            return Ok((a, b));
        }
    }
    Err(Error::spec(
        "m_b",
        format!("no disjoint mode-B rotation found for M_A = {m_a}, M_B = {m_b}"),
    ))
}

/// One-shot transmit; see [`Transceiver::transmit`].
pub fn transmit(bits: &[bool], spec: &WaveformSpec) -> Result<(BasebandFrame, StageCostLedger)> {
    Transceiver::new(spec)?.transmit(bits)
}

/// One-shot receive; see [`Transceiver::receive`].
pub fn receive(frame: &BasebandFrame, spec: &WaveformSpec) -> Result<(Vec<bool>, StageCostLedger)> {
    Transceiver::new(spec)?.receive(frame)
}

/// Adds circularly-symmetric complex Gaussian noise at `snr_db` relative to
/// the frame's mean sample power. An infinite SNR returns the frame as is.
pub fn awgn_channel(frame: &BasebandFrame, snr_db: f64, seed: u64) -> Result<BasebandFrame> {
    if snr_db == f64::INFINITY {
        return Ok(frame.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::domain(format!(
            "SNR must be finite or +inf, got {snr_db}"
        )));
    }
    let noise_power = frame.mean_power() / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt())
        .map_err(|e| Error::domain(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let time_samples = frame
        .time_samples
        .iter()
        .map(|s| s + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    Ok(BasebandFrame {
        time_samples,
        cp_len: frame.cp_len,
    })
}

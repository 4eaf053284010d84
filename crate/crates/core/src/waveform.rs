//! Waveform configurations and their closed-form bit budgets and
//! complexity functions.
//!
//! Bit counts are driven by the number of data subcarriers (`n_data`),
//! complexity functions by the FFT size (`n_fft`). Under the ideal IM setup
//! (one subblock, half of the subcarriers active, binary constellations) the
//! complexity functions reduce to the closed forms
//!
//! | waveform          | transmitter        | receiver                |
//! |-------------------|--------------------|-------------------------|
//! | OFDM              | N log2 N           | N log2 N + N            |
//! | OFDM-IM, original | N log2 N + N²      | N log2 N + 2N + N²      |
//! | DM-OFDM, original | N log2 N + N²      | N log2 N + 4N + N²      |
//! | OFDM-IM, optimized| N log2 N + N       | N log2 N + 2N + N       |
//! | DM-OFDM, optimized| N log2 N + N       | N log2 N + 4N + N       |
//!
//! Outside the ideal setup the index-selector term is evaluated as `g·n·k`
//! and the detection term as `g·n·M` (OFDM-IM) or `g·n·(M_A + M_B)`
//! (DM-OFDM), all with unit constants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{CostUnits, Micros};

/// Relative tolerance for `t_sym = 1/delta_f + t_cp`.
const T_SYM_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WaveformKind {
    #[serde(rename = "OFDM")]
    Ofdm,
    #[serde(rename = "OFDM_IM")]
    OfdmIm,
    #[serde(rename = "DM_OFDM")]
    DmOfdm,
}

impl WaveformKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WaveformKind::Ofdm => "OFDM",
            WaveformKind::OfdmIm => "OFDM_IM",
            WaveformKind::DmOfdm => "DM_OFDM",
        }
    }

    pub fn is_index_modulated(self) -> bool {
        !matches!(self, WaveformKind::Ofdm)
    }
}

impl fmt::Display for WaveformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WaveformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ofdm" => Ok(WaveformKind::Ofdm),
            "ofdm-im" | "im" => Ok(WaveformKind::OfdmIm),
            "dm-ofdm" | "dm" => Ok(WaveformKind::DmOfdm),
            _ => Err(Error::spec("kind", format!("unknown waveform kind {s:?}"))),
        }
    }
}

/// Index selector implementation assumed by the complexity model.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum IxsVariant {
    #[default]
    #[serde(rename = "ORIGINAL_IXS")]
    Original,
    #[serde(rename = "OPTIMIZED_IXS")]
    Optimized,
}

impl IxsVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            IxsVariant::Original => "ORIGINAL_IXS",
            IxsVariant::Optimized => "OPTIMIZED_IXS",
        }
    }
}

impl fmt::Display for IxsVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IxsVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "original" | "original-ixs" | "orig" => Ok(IxsVariant::Original),
            "optimized" | "optimized-ixs" | "opt" => Ok(IxsVariant::Optimized),
            _ => Err(Error::spec("variant", format!("unknown IxS variant {s:?}"))),
        }
    }
}

/// Full parameterization of one waveform configuration.
///
/// Times are in seconds and `delta_f` in Hz. For OFDM the IM fields are
/// carried along (and validated) but do not enter any formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveformDoc")]
pub struct WaveformSpec {
    pub kind: WaveformKind,
    pub variant: IxsVariant,
    pub n_fft: usize,
    pub n_data: usize,
    pub g: usize,
    pub n_sub: usize,
    pub k_active: usize,
    pub m_order: u32,
    pub m_a: u32,
    pub m_b: u32,
    pub delta_f: f64,
    pub t_cp: f64,
    pub t_sym: f64,
}

/// Named parameter presets accepted in config documents.
pub const PRESET_IEEE80211A: &str = "ieee80211a";

const IEEE80211A_N_FFT: usize = 64;
const IEEE80211A_N_DATA: usize = 48;
const IEEE80211A_DELTA_F: f64 = 312_500.0;
const IEEE80211A_T_CP: f64 = 0.8e-6;
const IEEE80211A_T_SYM: f64 = 4e-6;

impl WaveformSpec {
    /// Builds an ideal-setup configuration: one subblock spanning all data
    /// subcarriers, half of them active, binary constellations.
    pub fn ideal(
        kind: WaveformKind,
        variant: IxsVariant,
        n_fft: usize,
        n_data: usize,
        delta_f: f64,
        t_cp: f64,
    ) -> Result<Self> {
        let spec = WaveformSpec {
            kind,
            variant,
            n_fft,
            n_data,
            g: 1,
            n_sub: n_data,
            k_active: (n_data / 2).max(1),
            m_order: 2,
            m_a: 2,
            m_b: 2,
            delta_f,
            t_cp,
            t_sym: 1.0 / delta_f + t_cp,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The 802.11a numerology (64-point FFT, 48 data subcarriers,
    /// 312.5 kHz spacing, 0.8 µs guard, 4 µs symbol) in the ideal IM setup.
    pub fn ieee80211a(kind: WaveformKind, variant: IxsVariant) -> Self {
        WaveformSpec {
            kind,
            variant,
            n_fft: IEEE80211A_N_FFT,
            n_data: IEEE80211A_N_DATA,
            g: 1,
            n_sub: IEEE80211A_N_DATA,
            k_active: IEEE80211A_N_DATA / 2,
            m_order: 2,
            m_a: 2,
            m_b: 2,
            delta_f: IEEE80211A_DELTA_F,
            t_cp: IEEE80211A_T_CP,
            t_sym: IEEE80211A_T_SYM,
        }
    }

    pub fn with_m_order(mut self, m_order: u32) -> Result<Self> {
        self.m_order = m_order;
        self.validate()?;
        Ok(self)
    }

    /// Re-dimensions the configuration to a new FFT size and data subcarrier
    /// count, keeping the ideal IM structure (g = 1, k = n/2).
    pub fn resized_ideal(&self, n_fft: usize, n_data: usize) -> Result<Self> {
        let mut spec = self.clone();
        spec.n_fft = n_fft;
        spec.n_data = n_data;
        spec.g = 1;
        spec.n_sub = n_data;
        spec.k_active = (n_data / 2).max(1);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fft < 2 || !self.n_fft.is_power_of_two() {
            return Err(Error::spec(
                "n_fft",
                format!("must be a power of two >= 2, got {}", self.n_fft),
            ));
        }
        if self.n_data == 0 || self.n_data > self.n_fft {
            return Err(Error::spec(
                "n_data",
                format!("must lie in [1, n_fft={}], got {}", self.n_fft, self.n_data),
            ));
        }
        if self.g == 0 {
            return Err(Error::spec("g", "must be positive"));
        }
        if self.n_sub == 0 {
            return Err(Error::spec("n_sub", "must be positive"));
        }
        if self.g * self.n_sub != self.n_data {
            return Err(Error::spec(
                "n_sub",
                format!(
                    "g * n_sub = {} * {} does not equal n_data = {}",
                    self.g, self.n_sub, self.n_data
                ),
            ));
        }
        if self.k_active == 0 || self.k_active > self.n_sub {
            return Err(Error::spec(
                "k_active",
                format!(
                    "must lie in [1, n_sub={}], got {}",
                    self.n_sub, self.k_active
                ),
            ));
        }
        for (field, m) in [
            ("m_order", self.m_order),
            ("m_a", self.m_a),
            ("m_b", self.m_b),
        ] {
            if m < 2 || !m.is_power_of_two() {
                return Err(Error::spec(
                    field,
                    format!("must be a power of two >= 2, got {m}"),
                ));
            }
        }
        if !(self.delta_f.is_finite() && self.delta_f > 0.0) {
            return Err(Error::spec(
                "delta_f",
                format!("must be positive, got {}", self.delta_f),
            ));
        }
        if !(self.t_cp.is_finite() && self.t_cp >= 0.0) {
            return Err(Error::spec(
                "t_cp",
                format!("must be non-negative, got {}", self.t_cp),
            ));
        }
        let expected = 1.0 / self.delta_f + self.t_cp;
        if !(self.t_sym.is_finite() && self.t_sym > 0.0)
            || (self.t_sym - expected).abs() > T_SYM_REL_TOL * self.t_sym
        {
            return Err(Error::spec(
                "t_sym",
                format!(
                    "must equal 1/delta_f + t_cp = {expected:e} s, got {:e} s",
                    self.t_sym
                ),
            ));
        }
        Ok(())
    }

    /// Ideal IM setup: g = 1, k = n/2 and every relevant constellation
    /// binary. The closed forms in the module table are exact only here.
    pub fn is_ideal(&self) -> bool {
        let structure =
            self.g == 1 && self.n_sub.is_multiple_of(2) && self.k_active == self.n_sub / 2;
        match self.kind {
            WaveformKind::Ofdm => self.m_order == 2,
            WaveformKind::OfdmIm => structure && self.m_order == 2,
            WaveformKind::DmOfdm => structure && self.m_a == 2 && self.m_b == 2,
        }
    }

    /// Occupied bandwidth W = n_fft · delta_f, in Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.n_fft as f64 * self.delta_f
    }

    pub fn t_sym_us(&self) -> Micros {
        Micros::from_secs(self.t_sym)
    }

    /// Cyclic prefix length in (possibly fractional) samples, n_fft · delta_f · t_cp.
    pub fn cp_samples(&self) -> f64 {
        self.n_fft as f64 * self.delta_f * self.t_cp
    }

    /// Cyclic prefix length in whole samples; errors when the numerology
    /// does not put the guard interval on the sample grid.
    pub fn cp_len(&self) -> Result<usize> {
        let exact = self.cp_samples();
        let rounded = exact.round();
        if (exact - rounded).abs() > 1e-6 {
            return Err(Error::spec(
                "t_cp",
                format!("n_fft * delta_f * t_cp = {exact} is not a whole number of samples"),
            ));
        }
        Ok(rounded as usize)
    }

    /// Index bits carried by each subblock's activation pattern.
    pub fn index_bits_per_subblock(&self) -> u32 {
        if self.kind.is_index_modulated() {
            floor_log2_binom_unchecked(self.n_sub as u64, self.k_active as u64)
        } else {
            0
        }
    }

    /// Short human label, e.g. `OFDM-IM (optimized)`.
    pub fn label(&self) -> String {
        match (self.kind, self.variant) {
            (WaveformKind::Ofdm, _) => "OFDM".to_string(),
            (WaveformKind::OfdmIm, IxsVariant::Original) => "OFDM-IM".to_string(),
            (WaveformKind::DmOfdm, IxsVariant::Original) => "DM-OFDM".to_string(),
            (WaveformKind::OfdmIm, IxsVariant::Optimized) => "OFDM-IM (optimized)".to_string(),
            (WaveformKind::DmOfdm, IxsVariant::Optimized) => "DM-OFDM (optimized)".to_string(),
        }
    }
}

/// On-disk form of a [`WaveformSpec`]: every field optional, plus an
/// optional named preset that fills in the numerology.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveformDoc {
    preset: Option<String>,
    kind: WaveformKind,
    variant: Option<IxsVariant>,
    n_fft: Option<usize>,
    n_data: Option<usize>,
    g: Option<usize>,
    n_sub: Option<usize>,
    k_active: Option<usize>,
    m_order: Option<u32>,
    m_a: Option<u32>,
    m_b: Option<u32>,
    delta_f: Option<f64>,
    t_cp: Option<f64>,
    t_sym: Option<f64>,
}

impl TryFrom<WaveformDoc> for WaveformSpec {
    type Error = Error;

    fn try_from(doc: WaveformDoc) -> Result<Self> {
        let base = match doc.preset.as_deref() {
            None => None,
            Some(PRESET_IEEE80211A) => {
                Some(WaveformSpec::ieee80211a(doc.kind, IxsVariant::Original))
            }
            Some(other) => return Err(Error::spec("preset", format!("unknown preset {other:?}"))),
        };
        let n_fft = doc
            .n_fft
            .or(base.as_ref().map(|b| b.n_fft))
            .ok_or_else(|| Error::spec("n_fft", "missing (and no preset given)"))?;
        let n_data = doc
            .n_data
            .or(base.as_ref().map(|b| b.n_data))
            .unwrap_or(n_fft);
        let delta_f = doc
            .delta_f
            .or(base.as_ref().map(|b| b.delta_f))
            .ok_or_else(|| Error::spec("delta_f", "missing (and no preset given)"))?;
        let t_cp = doc.t_cp.or(base.as_ref().map(|b| b.t_cp)).unwrap_or(0.0);
        let t_sym = match doc.t_sym {
            Some(t) => t,
            None => match &base {
                // the preset's symbol time only applies to the preset's own numerology
                Some(b) if doc.delta_f.is_none() && doc.t_cp.is_none() => b.t_sym,
                _ => 1.0 / delta_f + t_cp,
            },
        };
        let g = doc.g.unwrap_or(1);
        if g == 0 {
            return Err(Error::spec("g", "must be positive"));
        }
        let n_sub = match doc.n_sub {
            Some(n) => n,
            None if n_data.is_multiple_of(g) => n_data / g,
            None => {
                return Err(Error::spec(
                    "g",
                    format!("n_data = {n_data} is not divisible by g = {g}"),
                ));
            }
        };
        let spec = WaveformSpec {
            kind: doc.kind,
            variant: doc.variant.unwrap_or_default(),
            n_fft,
            n_data,
            g,
            n_sub,
            k_active: doc.k_active.unwrap_or((n_sub / 2).max(1)),
            m_order: doc.m_order.unwrap_or(2),
            m_a: doc.m_a.unwrap_or(2),
            m_b: doc.m_b.unwrap_or(2),
            delta_f,
            t_cp,
            t_sym,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Exact binomial coefficient C(n, k) = n! / (k! (n-k)!).
pub fn binomial(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::domain(format!(
            "binomial C({n}, {k}) requires k <= n"
        )));
    }
    Ok(binomial_unchecked(n, k))
}

pub(crate) fn binomial_unchecked(n: u64, k: u64) -> BigUint {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // exact at every step: acc holds C(n - k + i, i) before the update
        acc *= n - k + i + 1;
        acc /= i + 1;
    }
    acc
}

/// ⌊log2 C(n, k)⌋, computed on exact big integers.
pub fn floor_log2_binom(n: u64, k: u64) -> Result<u32> {
    if k > n {
        return Err(Error::domain(format!(
            "floor_log2_binom({n}, {k}) requires k <= n"
        )));
    }
    Ok(floor_log2_binom_unchecked(n, k))
}

fn floor_log2_binom_unchecked(n: u64, k: u64) -> u32 {
    // C(n, k) >= 1, so bits() >= 1
    (binomial_unchecked(n, k).bits() - 1) as u32
}

fn log2_exact(x: u64) -> u64 {
    debug_assert!(x.is_power_of_two());
    x.trailing_zeros() as u64
}

/// Payload bits per OFDM symbol.
///
/// OFDM carries `n_data · log2 M`; OFDM-IM carries `g (k log2 M + ⌊log2 C(n,k)⌋)`;
/// DM-OFDM carries `g (k log2 M_A + (n-k) log2 M_B + ⌊log2 C(n,k)⌋)`. The floor
/// is taken per subblock.
pub fn bits_per_symbol(spec: &WaveformSpec) -> Result<u64> {
    spec.validate()?;
    let g = spec.g as u64;
    let n = spec.n_sub as u64;
    let k = spec.k_active as u64;
    let bits = match spec.kind {
        WaveformKind::Ofdm => spec.n_data as u64 * log2_exact(spec.m_order as u64),
        WaveformKind::OfdmIm => {
            g * (k * log2_exact(spec.m_order as u64) + spec.index_bits_per_subblock() as u64)
        }
        WaveformKind::DmOfdm => {
            g * (k * log2_exact(spec.m_a as u64)
                + (n - k) * log2_exact(spec.m_b as u64)
                + spec.index_bits_per_subblock() as u64)
        }
    };
    Ok(bits)
}

/// N log2 N, the cost charged for one (I)FFT.
pub fn transform_cost(n_fft: usize) -> CostUnits {
    let n = n_fft as u64;
    CostUnits(n * log2_exact(n))
}

/// Cost of the index selector (or its inverse) for one symbol.
pub fn ixs_cost(spec: &WaveformSpec) -> CostUnits {
    if !spec.kind.is_index_modulated() {
        return CostUnits::ZERO;
    }
    let n = spec.n_fft as u64;
    match spec.variant {
        IxsVariant::Optimized => CostUnits(n),
        IxsVariant::Original if spec.is_ideal() => CostUnits(n * n),
        IxsVariant::Original => CostUnits((spec.g * spec.n_sub * spec.k_active) as u64),
    }
}

/// Cost of subcarrier detection at the receiver for one symbol.
pub fn detection_cost(spec: &WaveformSpec) -> CostUnits {
    let n = spec.n_fft as u64;
    let subcarriers = (spec.g * spec.n_sub) as u64;
    match spec.kind {
        WaveformKind::Ofdm => CostUnits(n),
        WaveformKind::OfdmIm if spec.is_ideal() => CostUnits(2 * n),
        WaveformKind::DmOfdm if spec.is_ideal() => CostUnits(4 * n),
        WaveformKind::OfdmIm => CostUnits(subcarriers * spec.m_order as u64),
        WaveformKind::DmOfdm => CostUnits(subcarriers * (spec.m_a + spec.m_b) as u64),
    }
}

/// Instructions executed by the transmitter per symbol.
pub fn tx_complexity(spec: &WaveformSpec) -> Result<CostUnits> {
    spec.validate()?;
    Ok(transform_cost(spec.n_fft) + ixs_cost(spec))
}

/// Instructions executed by the receiver per symbol.
pub fn rx_complexity(spec: &WaveformSpec) -> Result<CostUnits> {
    spec.validate()?;
    Ok(transform_cost(spec.n_fft) + detection_cost(spec) + ixs_cost(spec))
}

/// Occupied bandwidth in Hz.
pub fn bandwidth(spec: &WaveformSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.bandwidth_hz())
}

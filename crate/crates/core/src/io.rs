//! File formats: JSON parameter, key and report records, and bitstreams.
//!
//! Polynomials and states are hexadecimal masks, bit `i` being the
//! coefficient of `x^i` or cell `i`. Bitstreams are either ASCII `0`/`1`
//! (whitespace ignored) or the binary layout
//!
//! ```text
//! "ASGB" | bit count: u64 little-endian | payload, bit t at byte t/8, LSB first
//! ```

use serde::{Deserialize, Serialize};

use crate::asg::{AsgKey, AsgParams};
use crate::attack::{AttackCounters, AttackReport};
use crate::error::{Error, Result};
use crate::gf2::{BinaryPolynomial, BitSequence, BitVector};

pub const BINARY_MAGIC: &[u8; 4] = b"ASGB";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitFormat {
    Text,
    Binary,
}

fn default_strict() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub poly_a: String,
    pub poly_b: String,
    pub poly_c: String,
    #[serde(default = "default_strict")]
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyRecord {
    pub r: u64,
    pub s: u64,
    pub state_a: String,
    pub state_b: String,
    pub state_c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub recovered_keys: Vec<KeyRecord>,
    pub counters: AttackCounters,
    pub wall_time_seconds: f64,
}

fn strip_hex(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s)
}

pub fn poly_to_hex(p: &BinaryPolynomial) -> String {
    format!("{p:#x}")
}

pub fn poly_from_hex(s: &str) -> Result<BinaryPolynomial> {
    let digits = strip_hex(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(Error::Format(format!("not a hexadecimal polynomial: {s:?}")));
    }
    let mut words = Vec::new();
    let mut end = digits.len();
    while end > 0 {
        let start = end.saturating_sub(16);
        words.push(u64::from_str_radix(&digits[start..end], 16).expect("checked hex digits"));
        end = start;
    }
    Ok(BinaryPolynomial::from_words(words))
}

pub fn state_to_hex(state: &BitVector) -> String {
    format!("{:#x}", state.to_u64().expect("state fits 64 cells"))
}

pub fn state_from_hex(s: &str, len: usize) -> Result<BitVector> {
    let mask = u64::from_str_radix(strip_hex(s), 16)
        .map_err(|e| Error::Format(format!("bad state mask {s:?}: {e}")))?;
    if len < 64 && mask >> len != 0 {
        return Err(Error::Format(format!("state mask {s} has bits beyond cell {}", len - 1)));
    }
    Ok(BitVector::from_u64(mask, len))
}

impl From<&AsgParams> for ParamsRecord {
    fn from(p: &AsgParams) -> Self {
        Self {
            l: p.l,
            m: p.m,
            n: p.n,
            poly_a: poly_to_hex(&p.poly_a),
            poly_b: poly_to_hex(&p.poly_b),
            poly_c: poly_to_hex(&p.poly_c),
            strict: p.strict,
        }
    }
}

impl ParamsRecord {
    /// Parses the polynomials. Validation is left to the caller.
    pub fn to_params(&self) -> Result<AsgParams> {
        Ok(AsgParams {
            l: self.l,
            m: self.m,
            n: self.n,
            poly_a: poly_from_hex(&self.poly_a)?,
            poly_b: poly_from_hex(&self.poly_b)?,
            poly_c: poly_from_hex(&self.poly_c)?,
            strict: self.strict,
        })
    }
}

impl From<&AsgKey> for KeyRecord {
    fn from(k: &AsgKey) -> Self {
        Self {
            r: k.r,
            s: k.s,
            state_a: state_to_hex(&k.state_a),
            state_b: state_to_hex(&k.state_b),
            state_c: state_to_hex(&k.state_c),
        }
    }
}

impl KeyRecord {
    /// State lengths come from `params`.
    pub fn to_key(&self, params: &AsgParams) -> Result<AsgKey> {
        if params.l > 64 || params.m > 64 || params.n > 64 {
            return Err(Error::Unsupported("registers longer than 64 cells".into()));
        }
        Ok(AsgKey {
            state_a: state_from_hex(&self.state_a, params.l)?,
            state_b: state_from_hex(&self.state_b, params.m)?,
            state_c: state_from_hex(&self.state_c, params.n)?,
            r: self.r,
            s: self.s,
        })
    }
}

impl From<&AttackReport> for ReportRecord {
    fn from(r: &AttackReport) -> Self {
        Self {
            recovered_keys: r.recovered_keys.iter().map(KeyRecord::from).collect(),
            counters: r.counters,
            wall_time_seconds: r.wall_time.as_secs_f64(),
        }
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn params_to_json(p: &AsgParams) -> String {
    serde_json::to_string_pretty(&ParamsRecord::from(p)).expect("plain record")
}

pub fn params_from_json(s: &str) -> Result<AsgParams> {
    serde_json::from_str::<ParamsRecord>(s).map_err(json_err)?.to_params()
}

pub fn key_to_json(k: &AsgKey) -> String {
    serde_json::to_string_pretty(&KeyRecord::from(k)).expect("plain record")
}

pub fn key_from_json(s: &str, params: &AsgParams) -> Result<AsgKey> {
    serde_json::from_str::<KeyRecord>(s).map_err(json_err)?.to_key(params)
}

pub fn report_to_json(r: &AttackReport) -> String {
    serde_json::to_string_pretty(&ReportRecord::from(r)).expect("plain record")
}

pub fn report_from_json(s: &str) -> Result<ReportRecord> {
    serde_json::from_str(s).map_err(json_err)
}

pub fn encode_bits(bits: &BitSequence, format: BitFormat) -> Vec<u8> {
    match format {
        BitFormat::Text => {
            let mut out = bits.to_string().into_bytes();
            out.push(b'\n');
            out
        }
        BitFormat::Binary => {
            let mut out = Vec::with_capacity(12 + bits.len().div_ceil(8));
            out.extend_from_slice(BINARY_MAGIC);
            out.extend_from_slice(&(bits.len() as u64).to_le_bytes());
            let mut payload = vec![0u8; bits.len().div_ceil(8)];
            for (t, b) in bits.iter().enumerate() {
                if b {
                    payload[t / 8] |= 1 << (t % 8);
                }
            }
            out.extend_from_slice(&payload);
            out
        }
    }
}

/// Decodes either format, choosing binary when the magic is present.
pub fn decode_bits(data: &[u8]) -> Result<BitSequence> {
    if let Some(rest) = data.strip_prefix(BINARY_MAGIC) {
        let (count, payload) = rest
            .split_first_chunk::<8>()
            .ok_or_else(|| Error::Format("truncated binary bitstream header".into()))?;
        let count = usize::try_from(u64::from_le_bytes(*count))
            .map_err(|_| Error::Format("bit count overflows".into()))?;
        if payload.len() != count.div_ceil(8) {
            return Err(Error::Format(format!(
                "binary bitstream declares {count} bits but carries {} payload bytes",
                payload.len()
            )));
        }
        return Ok((0..count).map(|t| payload[t / 8] >> (t % 8) & 1 == 1).collect());
    }
    let text = std::str::from_utf8(data).map_err(|e| Error::Format(e.to_string()))?;
    text.parse()
}

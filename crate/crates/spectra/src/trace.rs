//! Spectrum-analyzer traces and their CSV form.
//!
//! CSV layout: `# key = value` header rows (rbw_hz, input_power_w, detuning,
//! power_unit, scan_id), then `frequency_hz,power` samples. Power may be
//! declared in W or dBm.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum DetuningTag {
    Blue,
    #[default]
    Red,
    Peak,
}

impl std::fmt::Display for DetuningTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DetuningTag::Blue => write!(f, "blue"),
            DetuningTag::Red => write!(f, "red"),
            DetuningTag::Peak => write!(f, "peak"),
        }
    }
}

impl std::str::FromStr for DetuningTag {
    type Err = SpectraError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "blue" => Ok(DetuningTag::Blue),
            "red" => Ok(DetuningTag::Red),
            "peak" => Ok(DetuningTag::Peak),
            other => Err(SpectraError::BadTraceFile(format!(
                "unknown detuning tag `{other}`"
            ))),
        }
    }
}

/// One spectrum-analyzer scan. Frequencies in Hz, powers in W.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumTrace {
    pub frequency_hz: Vec<f64>,
    pub power_w: Vec<f64>,
    pub rbw_hz: f64,
    pub input_power_w: f64,
    pub scan_id: u64,
    pub detuning: DetuningTag,
}

impl SpectrumTrace {
    pub fn validate(&self) -> Result<()> {
        if self.frequency_hz.len() != self.power_w.len() {
            return Err(SpectraError::InvalidParameter {
                name: "trace",
                reason: format!(
                    "{} frequencies vs {} powers",
                    self.frequency_hz.len(),
                    self.power_w.len()
                ),
            });
        }
        if self.frequency_hz.len() < 2 {
            return Err(SpectraError::InvalidParameter {
                name: "trace",
                reason: "need at least 2 samples".into(),
            });
        }
        if !self.frequency_hz.windows(2).all(|w| w[1] > w[0]) {
            return Err(SpectraError::InvalidParameter {
                name: "frequency_hz",
                reason: "frequencies must be strictly increasing".into(),
            });
        }
        if !(self.rbw_hz > 0.0) {
            return Err(SpectraError::InvalidParameter {
                name: "rbw_hz",
                reason: format!("must be > 0, got {}", self.rbw_hz),
            });
        }
        Ok(())
    }

    pub fn step_hz(&self) -> f64 {
        (self.frequency_hz[self.frequency_hz.len() - 1] - self.frequency_hz[0])
            / (self.frequency_hz.len() - 1) as f64
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# rbw_hz = {}", self.rbw_hz)?;
        writeln!(f, "# input_power_w = {}", self.input_power_w)?;
        writeln!(f, "# detuning = {}", self.detuning)?;
        writeln!(f, "# power_unit = W")?;
        writeln!(f, "# scan_id = {}", self.scan_id)?;
        writeln!(f, "frequency_hz,power")?;
        for (freq, p) in self.frequency_hz.iter().zip(&self.power_w) {
            writeln!(f, "{freq},{p}")?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut rbw_hz = None;
        let mut input_power_w = 0.0;
        let mut detuning = DetuningTag::default();
        let mut scan_id = 0u64;
        let mut dbm = false;
        let mut frequency_hz = Vec::new();
        let mut power_w = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut kv = rest.splitn(2, '=');
                let key = kv.next().unwrap_or("").trim();
                let value = kv.next().unwrap_or("").trim();
                match key {
                    "rbw_hz" => {
                        rbw_hz = Some(
                            value
                                .parse::<f64>()
                                .map_err(|e| SpectraError::BadTraceFile(format!("rbw_hz: {e}")))?,
                        )
                    }
                    "input_power_w" => {
                        input_power_w = value.parse::<f64>().map_err(|e| {
                            SpectraError::BadTraceFile(format!("input_power_w: {e}"))
                        })?
                    }
                    "detuning" => detuning = value.parse()?,
                    "scan_id" => {
                        scan_id = value
                            .parse::<u64>()
                            .map_err(|e| SpectraError::BadTraceFile(format!("scan_id: {e}")))?
                    }
                    "power_unit" => {
                        dbm = match value.to_ascii_lowercase().as_str() {
                            "w" => false,
                            "dbm" => true,
                            other => {
                                return Err(SpectraError::BadTraceFile(format!(
                                    "unknown power unit `{other}`"
                                )))
                            }
                        }
                    }
                    _ => {}
                }
                continue;
            }
            if line.starts_with("frequency") {
                continue;
            }
            let mut cols = line.split(',');
            let freq: f64 = cols
                .next()
                .ok_or_else(|| SpectraError::BadTraceFile("missing frequency".into()))?
                .trim()
                .parse()
                .map_err(|e| SpectraError::BadTraceFile(format!("frequency: {e}")))?;
            let p: f64 = cols
                .next()
                .ok_or_else(|| SpectraError::BadTraceFile("missing power".into()))?
                .trim()
                .parse()
                .map_err(|e| SpectraError::BadTraceFile(format!("power: {e}")))?;
            frequency_hz.push(freq);
            power_w.push(if dbm { 1e-3 * 10f64.powf(p / 10.0) } else { p });
        }
        let trace = SpectrumTrace {
            frequency_hz,
            power_w,
            rbw_hz: rbw_hz
                .ok_or_else(|| SpectraError::BadTraceFile("missing rbw_hz header".into()))?,
            input_power_w,
            scan_id,
            detuning,
        };
        trace.validate()?;
        Ok(trace)
    }
}

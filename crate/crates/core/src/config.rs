//! Device geometry, DDR timing parameters, and the line-oriented
//! `key = value` configuration file.
//!
//! All simulated time is kept in integer picoseconds. Config files state
//! durations in nanoseconds (fractional values allowed) and refresh intervals
//! in milliseconds.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::EnergyModel;

/// Simulation time in picoseconds.
pub type Picos = u64;

pub const PS_PER_NS: f64 = 1_000.0;

/// What the executor does with ACT-PRE-ACT gaps that fall between the
/// row-copy and multi-activate detection thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AmbiguousTiming {
    /// Abort the trace with [`Error::UndefinedTiming`].
    Strict,
    /// Treat the window as ordinary, fully-timed commands.
    TreatAsNone,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingModel {
    /// Nominal PRE-to-ACT gap.
    pub t_rp: Picos,
    /// Nominal ACT-to-PRE gap.
    pub t_ras: Picos,
    /// ACT-to-read gap; used for the final readout activation.
    pub t_rcd: Picos,
    pub clock: Picos,
    /// Truncated PRE gap emitted for row copy.
    pub t_copy_gap: Picos,
    /// Minimal ACT and PRE gap emitted for multi-row activation.
    pub t_multi_gap: Picos,
    /// PRE gaps strictly below this (after a fully-timed ACT) are row copies.
    pub copy_threshold: Picos,
    /// ACT and PRE gaps both strictly below this open three rows.
    pub multi_threshold: Picos,
    pub refresh_interval: Picos,
    pub ambiguous: AmbiguousTiming,
}

impl Default for TimingModel {
    /// DDR3-1600 nominal values: tRP = tRCD = 13.75 ns, tRAS = 35 ns,
    /// 1.25 ns clock, 64 ms refresh window.
    fn default() -> Self {
        TimingModel {
            t_rp: 13_750,
            t_ras: 35_000,
            t_rcd: 13_750,
            clock: 1_250,
            t_copy_gap: 2_500,
            t_multi_gap: 1_250,
            copy_threshold: 5_000,
            multi_threshold: 2_000,
            refresh_interval: 64_000_000_000,
            ambiguous: AmbiguousTiming::Strict,
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        if self.clock == 0 || self.t_rp == 0 || self.t_ras == 0 {
            return Err(Error::Config("tRP, tRAS and clock must be positive".into()));
        }
        if !(self.t_multi_gap < self.t_copy_gap && self.t_copy_gap < self.t_rp) {
            return Err(Error::Config(
                "emitted gaps must satisfy t_multi_gap < t_copy_gap < t_rp".into(),
            ));
        }
        if !(self.multi_threshold < self.copy_threshold && self.copy_threshold <= self.t_rp) {
            return Err(Error::Config(
                "thresholds must satisfy multi_threshold < copy_threshold <= t_rp".into(),
            ));
        }
        if self.t_multi_gap >= self.multi_threshold {
            return Err(Error::Config("t_multi_gap must fall below multi_threshold".into()));
        }
        if self.t_copy_gap >= self.copy_threshold {
            return Err(Error::Config("t_copy_gap must fall below copy_threshold".into()));
        }
        if self.t_multi_gap >= self.t_ras {
            return Err(Error::Config("t_multi_gap must be below t_ras".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceConfig {
    pub chips: usize,
    pub banks_per_chip: usize,
    pub subarrays_per_bank: usize,
    pub rows_per_subarray: usize,
    pub cols_per_subarray: usize,
    pub timing: TimingModel,
}

impl Default for DeviceConfig {
    /// Single chip, single bank, one 128 x 8192 subarray.
    fn default() -> Self {
        DeviceConfig {
            chips: 1,
            banks_per_chip: 1,
            subarrays_per_bank: 1,
            rows_per_subarray: 128,
            cols_per_subarray: 8192,
            timing: TimingModel::default(),
        }
    }
}

/// Which reading of the "128x64 columns per bank" geometry a preset uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BankGeometry {
    /// 128 rows by 8192 (= 128 * 64) columns.
    Wide,
    /// 128 rows by 64 columns.
    Narrow,
}

impl DeviceConfig {
    /// 16 chips, 8 banks per chip, DDR3 defaults, no subarray parallelism.
    pub fn system_preset(geometry: BankGeometry) -> Self {
        DeviceConfig {
            chips: 16,
            banks_per_chip: 8,
            subarrays_per_bank: 1,
            rows_per_subarray: 128,
            cols_per_subarray: match geometry {
                BankGeometry::Wide => 8192,
                BankGeometry::Narrow => 64,
            },
            timing: TimingModel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("chips", self.chips),
            ("banks_per_chip", self.banks_per_chip),
            ("subarrays_per_bank", self.subarrays_per_bank),
            ("cols_per_subarray", self.cols_per_subarray),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        if self.rows_per_subarray < 8 || !self.rows_per_subarray.is_multiple_of(2) {
            return Err(Error::Config("rows_per_subarray must be even and >= 8".into()));
        }
        self.timing.validate()
    }
}

/// Everything a config file can set.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Config {
    pub device: DeviceConfig,
    pub energy: EnergyModel,
}

fn ns_to_ps(v: f64) -> Picos {
    (v * PS_PER_NS).round() as Picos
}

fn ps_to_ns(v: Picos) -> f64 {
    v as f64 / PS_PER_NS
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|msg| Error::Parse { line: lineno, msg })?;
        }
        cfg.device.validate()?;
        cfg.energy.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn count(v: &str) -> std::result::Result<usize, String> {
            v.parse().map_err(|_| format!("expected a count, got {v:?}"))
        }
        fn num(v: &str) -> std::result::Result<f64, String> {
            let x: f64 = v.parse().map_err(|_| format!("expected a number, got {v:?}"))?;
            if !x.is_finite() || x < 0.0 {
                return Err(format!("value must be finite and non-negative, got {v:?}"));
            }
            Ok(x)
        }
        fn flag(v: &str) -> std::result::Result<bool, String> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(format!("expected a boolean, got {v:?}")),
            }
        }
        let d = &mut self.device;
        let t = &mut d.timing;
        let e = &mut self.energy;
        match key {
            "chips" => d.chips = count(value)?,
            "banks_per_chip" => d.banks_per_chip = count(value)?,
            "subarrays_per_bank" => d.subarrays_per_bank = count(value)?,
            "rows_per_subarray" => d.rows_per_subarray = count(value)?,
            "cols_per_subarray" => d.cols_per_subarray = count(value)?,
            "t_rp_ns" => t.t_rp = ns_to_ps(num(value)?),
            "t_ras_ns" => t.t_ras = ns_to_ps(num(value)?),
            "t_rcd_ns" => t.t_rcd = ns_to_ps(num(value)?),
            "clock_ns" => t.clock = ns_to_ps(num(value)?),
            "t_copy_gap_ns" => t.t_copy_gap = ns_to_ps(num(value)?),
            "t_multi_gap_ns" => t.t_multi_gap = ns_to_ps(num(value)?),
            "copy_threshold_ns" => t.copy_threshold = ns_to_ps(num(value)?),
            "multi_threshold_ns" => t.multi_threshold = ns_to_ps(num(value)?),
            "refresh_interval_ms" => t.refresh_interval = (num(value)? * 1e9).round() as Picos,
            "strict_timing" => {
                t.ambiguous = if flag(value)? {
                    AmbiguousTiming::Strict
                } else {
                    AmbiguousTiming::TreatAsNone
                }
            }
            "e_act_pj" => e.act_pj = num(value)?,
            "e_pre_pj" => e.pre_pj = num(value)?,
            "e_truncated_pj" => e.truncated_pj = num(value)?,
            "background_mw_per_bank" => e.background_mw = num(value)?,
            "include_refresh" => e.include_refresh = flag(value)?,
            "refresh_mw_per_bank" => e.refresh_mw = num(value)?,
            "host_assign_ns" => e.host_assign_ns = num(value)?,
            "host_assign_pj" => e.host_assign_pj = num(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Renders every key; `Config::parse(&cfg.emit())` reproduces `cfg`.
    pub fn emit(&self) -> String {
        let d = &self.device;
        let t = &d.timing;
        let e = &self.energy;
        let mut s = String::new();
        let _ = writeln!(s, "# geometry");
        let _ = writeln!(s, "chips = {}", d.chips);
        let _ = writeln!(s, "banks_per_chip = {}", d.banks_per_chip);
        let _ = writeln!(s, "subarrays_per_bank = {}", d.subarrays_per_bank);
        let _ = writeln!(s, "rows_per_subarray = {}", d.rows_per_subarray);
        let _ = writeln!(s, "cols_per_subarray = {}", d.cols_per_subarray);
        let _ = writeln!(s, "# timing (ns)");
        let _ = writeln!(s, "t_rp_ns = {}", ps_to_ns(t.t_rp));
        let _ = writeln!(s, "t_ras_ns = {}", ps_to_ns(t.t_ras));
        let _ = writeln!(s, "t_rcd_ns = {}", ps_to_ns(t.t_rcd));
        let _ = writeln!(s, "clock_ns = {}", ps_to_ns(t.clock));
        let _ = writeln!(s, "t_copy_gap_ns = {}", ps_to_ns(t.t_copy_gap));
        let _ = writeln!(s, "t_multi_gap_ns = {}", ps_to_ns(t.t_multi_gap));
        let _ = writeln!(s, "copy_threshold_ns = {}", ps_to_ns(t.copy_threshold));
        let _ = writeln!(s, "multi_threshold_ns = {}", ps_to_ns(t.multi_threshold));
        let _ = writeln!(s, "refresh_interval_ms = {}", t.refresh_interval as f64 / 1e9);
        let _ = writeln!(s, "strict_timing = {}", t.ambiguous == AmbiguousTiming::Strict);
        let _ = writeln!(s, "# energy");
        let _ = writeln!(s, "e_act_pj = {}", e.act_pj);
        let _ = writeln!(s, "e_pre_pj = {}", e.pre_pj);
        let _ = writeln!(s, "e_truncated_pj = {}", e.truncated_pj);
        let _ = writeln!(s, "background_mw_per_bank = {}", e.background_mw);
        let _ = writeln!(s, "include_refresh = {}", e.include_refresh);
        let _ = writeln!(s, "refresh_mw_per_bank = {}", e.refresh_mw);
        let _ = writeln!(s, "host_assign_ns = {}", e.host_assign_ns);
        let _ = writeln!(s, "host_assign_pj = {}", e.host_assign_pj);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DeviceConfig::default().validate().unwrap();
        DeviceConfig::system_preset(BankGeometry::Wide).validate().unwrap();
        DeviceConfig::system_preset(BankGeometry::Narrow).validate().unwrap();
    }

    #[test]
    fn parse_overrides_and_comments() {
        let cfg = Config::parse(
            "# preset\nchips = 16\nbanks_per_chip=8   # per chip\n\nt_rp_ns = 15\nstrict_timing = false\n",
        )
        .unwrap();
        assert_eq!(cfg.device.chips, 16);
        assert_eq!(cfg.device.banks_per_chip, 8);
        assert_eq!(cfg.device.timing.t_rp, 15_000);
        assert_eq!(cfg.device.timing.ambiguous, AmbiguousTiming::TreatAsNone);
    }

    #[test]
    fn emit_parse_roundtrip() {
        let mut cfg = Config::default();
        cfg.device.rows_per_subarray = 512;
        cfg.energy.include_refresh = true;
        assert_eq!(Config::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Config::parse("rows_per_subarray = 9"), Err(Error::Config(_))));
        assert!(matches!(Config::parse("bogus = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Config::parse("chips 4"), Err(Error::Parse { .. })));
        assert!(matches!(Config::parse("t_rp_ns = -1"), Err(Error::Parse { .. })));
        assert!(Config::parse("t_copy_gap_ns = 0.5").is_err());
    }
}

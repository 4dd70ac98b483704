//! Latency, energy and throughput accounting over command traces.

use std::fmt;

use serde::Serialize;

use crate::config::{AmbiguousTiming, DeviceConfig, Picos, TimingModel, PS_PER_NS};
use crate::dram::command::{Command, CommandKind, Trace};
use crate::dram::micro_op::{detect_micro_op, MicroOp};
use crate::error::{Error, Result};

/// Per-command energies and background power for one bank.
///
/// Defaults approximate a DDR3-1600 x8 device from its IDD0/IDD3N/IDD2N
/// currents at 1.5 V. They are inputs, not measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyModel {
    pub act_pj: f64,
    pub pre_pj: f64,
    /// Surcharge for each command issued with a shortened gap.
    pub truncated_pj: f64,
    pub background_mw: f64,
    /// Adds conventional refresh power for the accounted time.
    pub include_refresh: bool,
    pub refresh_mw: f64,
    /// Host-side taxon assignment cost per query.
    pub host_assign_ns: f64,
    pub host_assign_pj: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            act_pj: 900.0,
            pre_pj: 470.0,
            truncated_pj: 120.0,
            background_mw: 7.0,
            include_refresh: false,
            refresh_mw: 3.0,
            host_assign_ns: 450.0,
            host_assign_pj: 5_000.0,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.act_pj,
            self.pre_pj,
            self.truncated_pj,
            self.background_mw,
            self.refresh_mw,
            self.host_assign_ns,
            self.host_assign_pj,
        ];
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config(
                "energy model values must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub activations: u64,
    pub precharges: u64,
    /// Commands whose gap is below the row-copy detection threshold.
    pub truncated: u64,
    pub row_copies: u64,
    pub multi_activates: u64,
    /// Sum of all command gaps.
    pub latency_ps: Picos,
    pub command_energy_pj: f64,
    pub background_energy_pj: f64,
    pub refresh_energy_pj: f64,
    pub queries: u64,
    pub assignment_latency_ns: f64,
    pub assignment_energy_pj: f64,
}

impl Report {
    pub fn latency_ns(&self) -> f64 {
        self.latency_ps as f64 / PS_PER_NS
    }

    /// In-array search energy.
    pub fn energy_pj(&self) -> f64 {
        self.command_energy_pj + self.background_energy_pj + self.refresh_energy_pj
    }

    pub fn total_latency_ns(&self) -> f64 {
        self.latency_ns() + self.assignment_latency_ns
    }

    pub fn total_energy_pj(&self) -> f64 {
        self.energy_pj() + self.assignment_energy_pj
    }

    /// Search share of (latency, energy); the remainder is host assignment.
    pub fn search_share(&self) -> (f64, f64) {
        let share = |a: f64, total: f64| if total > 0.0 { a / total } else { 0.0 };
        (
            share(self.latency_ns(), self.total_latency_ns()),
            share(self.energy_pj(), self.total_energy_pj()),
        )
    }

    /// Charges host-side taxon assignment for `queries` lookups.
    pub fn with_host_assignment(mut self, queries: u64, e: &EnergyModel) -> Self {
        self.queries += queries;
        self.assignment_latency_ns += queries as f64 * e.host_assign_ns;
        self.assignment_energy_pj += queries as f64 * e.host_assign_pj;
        self
    }

    pub fn merge(&mut self, o: &Report) {
        self.activations += o.activations;
        self.precharges += o.precharges;
        self.truncated += o.truncated;
        self.row_copies += o.row_copies;
        self.multi_activates += o.multi_activates;
        self.latency_ps += o.latency_ps;
        self.command_energy_pj += o.command_energy_pj;
        self.background_energy_pj += o.background_energy_pj;
        self.refresh_energy_pj += o.refresh_energy_pj;
        self.queries += o.queries;
        self.assignment_latency_ns += o.assignment_latency_ns;
        self.assignment_energy_pj += o.assignment_energy_pj;
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a Report,
            latency_ns: f64,
            energy_pj: f64,
            total_latency_ns: f64,
            total_energy_pj: f64,
            search_latency_share: f64,
            search_energy_share: f64,
        }
        let (ls, es) = self.search_share();
        serde_json::to_string_pretty(&Out {
            report: self,
            latency_ns: self.latency_ns(),
            energy_pj: self.energy_pj(),
            total_latency_ns: self.total_latency_ns(),
            total_energy_pj: self.total_energy_pj(),
            search_latency_share: ls,
            search_energy_share: es,
        })
        .expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (ls, es) = self.search_share();
        writeln!(f, "{:<28}{:>16}", "ACT commands", self.activations)?;
        writeln!(f, "{:<28}{:>16}", "PRE commands", self.precharges)?;
        writeln!(f, "{:<28}{:>16}", "truncated-gap commands", self.truncated)?;
        writeln!(f, "{:<28}{:>16}", "row copies", self.row_copies)?;
        writeln!(f, "{:<28}{:>16}", "multi-row activations", self.multi_activates)?;
        writeln!(f, "{:<28}{:>16.3}", "search latency (ns)", self.latency_ns())?;
        writeln!(f, "{:<28}{:>16.3}", "search energy (pJ)", self.energy_pj())?;
        writeln!(f, "{:<28}{:>16}", "host-assigned queries", self.queries)?;
        writeln!(
            f,
            "{:<28}{:>16.3}",
            "assignment latency (ns)", self.assignment_latency_ns
        )?;
        writeln!(f, "{:<28}{:>16.3}", "assignment energy (pJ)", self.assignment_energy_pj)?;
        writeln!(f, "{:<28}{:>15.1}%", "search share of latency", ls * 100.0)?;
        write!(f, "{:<28}{:>15.1}%", "search share of energy", es * 100.0)
    }
}

fn is_truncated(cmd: &Command, t: &TimingModel) -> bool {
    cmd.gap_after < t.copy_threshold
}

/// Totals for `trace`: latency is the sum of gaps, energy the per-command
/// energies plus background (and optional refresh) power over that latency.
pub fn account(trace: &Trace, t: &TimingModel, e: &EnergyModel) -> Report {
    let mut r = Report::default();
    let lenient = TimingModel {
        ambiguous: AmbiguousTiming::TreatAsNone,
        ..t.clone()
    };
    let cmds = &trace.commands;
    for (i, cmd) in cmds.iter().enumerate() {
        match cmd.kind {
            CommandKind::Act(_) => {
                r.activations += 1;
                r.command_energy_pj += e.act_pj;
                if i >= 2 {
                    match detect_micro_op(&cmds[i - 2..=i], &lenient) {
                        Ok(MicroOp::RowCopy { .. }) => r.row_copies += 1,
                        Ok(MicroOp::MultiActivate { .. }) => r.multi_activates += 1,
                        _ => {}
                    }
                }
            }
            CommandKind::Pre => {
                r.precharges += 1;
                r.command_energy_pj += e.pre_pj;
            }
        }
        if is_truncated(cmd, t) {
            r.truncated += 1;
            r.command_energy_pj += e.truncated_pj;
        }
        r.latency_ps += cmd.gap_after;
    }
    let ns = r.latency_ns();
    r.background_energy_pj = e.background_mw * ns;
    if e.include_refresh {
        r.refresh_energy_pj = e.refresh_mw * ns;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputEstimate {
    pub kmers_per_sec: f64,
    pub compare_latency_ns: f64,
    pub parallel_units: usize,
    pub kmers_per_compare: usize,
    pub assumptions: Vec<String>,
}

impl ThroughputEstimate {
    pub fn gkmers_per_sec(&self) -> f64 {
        self.kmers_per_sec / 1e9
    }
}

impl fmt::Display for ThroughputEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "estimated throughput: {:.3} Gkmers/s", self.gkmers_per_sec())?;
        writeln!(f, "assumptions:")?;
        for a in &self.assumptions {
            writeln!(f, "  - {a}")?;
        }
        Ok(())
    }
}

/// Scales one subarray's compare rate by the number of banks that search
/// in parallel.
pub fn throughput_estimate(
    cfg: &DeviceConfig,
    report: &Report,
    kmers_per_compare: usize,
) -> Result<ThroughputEstimate> {
    if report.latency_ps == 0 {
        return Err(Error::ZeroLatency);
    }
    let units = cfg.chips * cfg.banks_per_chip;
    let latency_s = report.latency_ps as f64 * 1e-12;
    let kmers_per_sec = kmers_per_compare as f64 * units as f64 / latency_s;
    Ok(ThroughputEstimate {
        kmers_per_sec,
        compare_latency_ns: report.latency_ns(),
        parallel_units: units,
        kmers_per_compare,
        assumptions: vec![
            format!(
                "{} chips x {} banks search concurrently, one subarray per bank (no subarray-level parallelism)",
                cfg.chips, cfg.banks_per_chip
            ),
            format!("each compare covers {kmers_per_compare} k-mers (one per column of the open stratum)"),
            format!(
                "compare latency {:.3} ns = sum of command gaps of one compiled compare",
                report.latency_ns()
            ),
            format!(
                "timing tRP={} ns, tRAS={} ns, copy gap={} ns, multi gap={} ns",
                cfg.timing.t_rp as f64 / PS_PER_NS,
                cfg.timing.t_ras as f64 / PS_PER_NS,
                cfg.timing.t_copy_gap as f64 / PS_PER_NS,
                cfg.timing.t_multi_gap as f64 / PS_PER_NS
            ),
            "host-side taxon assignment overlaps with the next search and is excluded".into(),
            "no bus, controller queueing or refresh stalls".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trace_is_zero() {
        let r = account(&Trace::new(), &TimingModel::default(), &EnergyModel::default());
        assert_eq!(r.latency_ps, 0);
        assert_eq!(r.energy_pj(), 0.0);
    }

    #[test]
    fn n_precharges_sum_gaps() {
        let t = TimingModel::default();
        let e = EnergyModel {
            background_mw: 0.0,
            ..EnergyModel::default()
        };
        let trace = Trace::from(vec![Command::pre(t.t_rp); 7]);
        let r = account(&trace, &t, &e);
        assert_eq!(r.latency_ps, 7 * t.t_rp);
        assert_eq!(r.precharges, 7);
        assert!((r.energy_pj() - 7.0 * e.pre_pj).abs() < 1e-9);
    }

    #[test]
    fn refresh_flag_adds_energy() {
        let t = TimingModel::default();
        let trace = Trace::from(vec![Command::pre(t.t_rp)]);
        let off = account(&trace, &t, &EnergyModel::default());
        let on = account(
            &trace,
            &t,
            &EnergyModel {
                include_refresh: true,
                ..EnergyModel::default()
            },
        );
        assert!(on.energy_pj() > off.energy_pj());
    }

    #[test]
    fn zero_latency_throughput_faults() {
        assert_eq!(
            throughput_estimate(&DeviceConfig::default(), &Report::default(), 1),
            Err(Error::ZeroLatency)
        );
    }

    #[test]
    fn host_assignment_breakdown() {
        let t = TimingModel::default();
        let e = EnergyModel::default();
        let trace = Trace::from(vec![Command::act(0, t.t_ras), Command::pre(t.t_rp)]);
        let r = account(&trace, &t, &e).with_host_assignment(2, &e);
        assert_eq!(r.queries, 2);
        let (ls, es) = r.search_share();
        assert!(ls > 0.0 && ls < 1.0 && es > 0.0 && es < 1.0);
        assert!(r.to_json().contains("\"search_latency_share\""));
    }
}

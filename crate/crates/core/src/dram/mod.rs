//! Behavioral model of one unmodified DRAM subarray driven by ACT/PRE.
//!
//! Cells hold resolved logical values. Bitlines are tracked symbolically:
//! precharged at half-VDD, perturbed by +/- delta during charge sharing, and
//! driven to zero or full by the sense amplifiers. Only the sign of the
//! deviation matters, so no voltages are modeled.

pub mod command;
pub mod micro_op;
pub mod refresh;

use serde::Serialize;

use crate::bits::BitRow;
use crate::config::{AmbiguousTiming, DeviceConfig, Picos, TimingModel};
use crate::error::{Error, Result};
use crate::timing_ops::third_row;

pub use command::{Command, CommandKind, Trace};
pub use micro_op::{detect_micro_op, MicroOp};
pub use refresh::{CoverageReport, RefreshTracker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BitlinePhase {
    Precharged,
    Sharing,
    Resolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymbolicLevel {
    Half,
    HalfPlusDelta,
    HalfMinusDelta,
    Zero,
    Full,
}

impl SymbolicLevel {
    /// Sense-amplifier resolution of a charge-sharing level.
    pub fn resolve(self) -> SymbolicLevel {
        match self {
            SymbolicLevel::HalfPlusDelta | SymbolicLevel::Full => SymbolicLevel::Full,
            SymbolicLevel::HalfMinusDelta | SymbolicLevel::Zero => SymbolicLevel::Zero,
            SymbolicLevel::Half => SymbolicLevel::Half,
        }
    }

    pub fn as_bit(self) -> Option<bool> {
        match self {
            SymbolicLevel::Full => Some(true),
            SymbolicLevel::Zero => Some(false),
            _ => None,
        }
    }
}

/// Bitline level after the given cells share charge with a precharged
/// bitline: the sign of the sum of (2c - 1) over the opened cells.
pub fn charge_sharing_level(cells: &[bool]) -> SymbolicLevel {
    let sum: i64 = cells.iter().map(|&c| if c { 1 } else { -1 }).sum();
    match sum.signum() {
        1 => SymbolicLevel::HalfPlusDelta,
        -1 => SymbolicLevel::HalfMinusDelta,
        _ => SymbolicLevel::Half,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Warning {
    /// A majority reused a triple none of whose rows was rewritten since the
    /// previous majority, so the preset constant row is stale.
    StalePreset { rows: [usize; 3], at: Picos },
}

/// Counts of what an executed trace did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExecStats {
    pub commands: usize,
    pub activations: usize,
    pub precharges: usize,
    pub row_copies: usize,
    pub multi_activates: usize,
}

#[derive(Debug, Clone)]
pub struct Subarray {
    rows: usize,
    cols: usize,
    cells: Vec<BitRow>,
    row_buffer: BitRow,
    open_rows: Vec<usize>,
    phase: BitlinePhase,
    clock: Picos,
    history: [Option<Command>; 2],
    tracker: RefreshTracker,
    timing: TimingModel,
    last_majority: Option<[usize; 3]>,
    rewritten_since_majority: Vec<usize>,
    warnings: Vec<Warning>,
}

impl Subarray {
    pub fn new(rows: usize, cols: usize, timing: TimingModel) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config("subarray needs at least one row and column".into()));
        }
        timing.validate()?;
        Ok(Subarray {
            rows,
            cols,
            cells: vec![BitRow::zeros(cols); rows],
            row_buffer: BitRow::zeros(cols),
            open_rows: Vec::with_capacity(3),
            phase: BitlinePhase::Precharged,
            clock: 0,
            history: [None; 2],
            tracker: RefreshTracker::new(rows, cols, timing.refresh_interval),
            timing,
            last_majority: None,
            rewritten_since_majority: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn from_config(cfg: &DeviceConfig) -> Result<Self> {
        cfg.validate()?;
        Subarray::new(cfg.rows_per_subarray, cfg.cols_per_subarray, cfg.timing.clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn clock(&self) -> Picos {
        self.clock
    }

    pub fn phase(&self) -> BitlinePhase {
        self.phase
    }

    pub fn open_rows(&self) -> &[usize] {
        &self.open_rows
    }

    pub fn timing(&self) -> &TimingModel {
        &self.timing
    }

    pub fn tracker(&self) -> &RefreshTracker {
        &self.tracker
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<Warning> {
        std::mem::take(&mut self.warnings)
    }

    /// Host-side view of a row's stored contents; not a DRAM command.
    pub fn row(&self, r: usize) -> &BitRow {
        &self.cells[r]
    }

    pub fn bitline_level(&self, col: usize) -> SymbolicLevel {
        match self.phase {
            BitlinePhase::Precharged => SymbolicLevel::Half,
            BitlinePhase::Sharing => SymbolicLevel::Half,
            BitlinePhase::Resolved => {
                if self.row_buffer.get(col) {
                    SymbolicLevel::Full
                } else {
                    SymbolicLevel::Zero
                }
            }
        }
    }

    fn check_row(&self, r: usize) -> Result<()> {
        if r >= self.rows {
            Err(Error::AddressFault {
                row: r,
                rows: self.rows,
            })
        } else {
            Ok(())
        }
    }

    fn note_rewrite(&mut self, r: usize) {
        if !self.rewritten_since_majority.contains(&r) {
            self.rewritten_since_majority.push(r);
        }
    }

    /// Host data load: overwrites row `r` and stamps its activation time.
    pub fn write_row(&mut self, r: usize, bits: &BitRow) -> Result<()> {
        self.check_row(r)?;
        if bits.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: bits.len(),
            });
        }
        self.cells[r].copy_from(bits);
        self.tracker.touch(r, self.clock);
        self.note_rewrite(r);
        Ok(())
    }

    pub fn read_row_buffer(&self) -> Result<&BitRow> {
        if self.open_rows.is_empty() || self.phase != BitlinePhase::Resolved {
            return Err(Error::NoOpenRow);
        }
        Ok(&self.row_buffer)
    }

    /// Issues `cmd` at the current clock, then advances the clock by its gap.
    pub fn apply_command(&mut self, cmd: Command) -> Result<MicroOp> {
        let op = match cmd.kind {
            CommandKind::Act(r) => self.activate(r, cmd)?,
            CommandKind::Pre => {
                self.open_rows.clear();
                if cmd.gap_after >= self.timing.t_rp {
                    self.phase = BitlinePhase::Precharged;
                }
                MicroOp::None
            }
        };
        self.history = [self.history[1], Some(cmd)];
        self.clock += cmd.gap_after;
        Ok(op)
    }

    fn activate(&mut self, r: usize, cmd: Command) -> Result<MicroOp> {
        self.check_row(r)?;
        if !self.open_rows.is_empty() {
            return Err(Error::ProtocolFault(format!(
                "ACT {r} at t={} while rows {:?} are open",
                self.clock, self.open_rows
            )));
        }
        let window: Vec<Command> = self.history.iter().flatten().copied().chain([cmd]).collect();
        match self.phase {
            BitlinePhase::Sharing => Err(Error::ProtocolFault(format!(
                "ACT {r} at t={} during unresolved charge sharing",
                self.clock
            ))),
            BitlinePhase::Precharged => {
                // A nominal PRE cannot yield a micro-op, but a cut-short ACT
                // before it is still undefined.
                detect_micro_op(&window, &self.timing)?;
                self.open_single(r);
                Ok(MicroOp::None)
            }
            BitlinePhase::Resolved => {
                let op = detect_micro_op(&window, &self.timing)?;
                match op {
                    MicroOp::RowCopy { target, .. } => {
                        // Sense amplifiers still drive the previous row's data.
                        self.phase = BitlinePhase::Sharing;
                        self.cells[target].copy_from(&self.row_buffer);
                        self.phase = BitlinePhase::Resolved;
                        self.tracker.touch(target, self.clock);
                        self.note_rewrite(target);
                        self.open_rows.push(target);
                    }
                    MicroOp::MultiActivate { first, second } => {
                        let third = third_row(first, second, self.rows)?;
                        self.open_triple([first, second, third]);
                    }
                    MicroOp::None => {
                        if self.timing.ambiguous == AmbiguousTiming::Strict {
                            return Err(Error::ProtocolFault(format!(
                                "ACT {r} at t={} on bitlines that were never precharged",
                                self.clock
                            )));
                        }
                        self.open_single(r);
                    }
                }
                Ok(op)
            }
        }
    }

    fn open_single(&mut self, r: usize) {
        self.phase = BitlinePhase::Sharing;
        // Sign of a single cell's deviation is the cell value; restoring
        // writes the same value back.
        self.row_buffer.copy_from(&self.cells[r]);
        self.phase = BitlinePhase::Resolved;
        self.tracker.touch(r, self.clock);
        self.open_rows.push(r);
    }

    fn open_triple(&mut self, rows: [usize; 3]) {
        self.phase = BitlinePhase::Sharing;
        let [a, b, c] = rows;
        let maj = BitRow::majority(&self.cells[a], &self.cells[b], &self.cells[c]);
        for &r in &rows {
            self.cells[r].copy_from(&maj);
            self.tracker.touch(r, self.clock);
        }
        self.row_buffer = maj;
        self.phase = BitlinePhase::Resolved;
        self.open_rows.extend_from_slice(&rows);

        let mut key = rows;
        key.sort_unstable();
        if self.last_majority == Some(key) && !rows.iter().any(|r| self.rewritten_since_majority.contains(r)) {
            self.warnings.push(Warning::StalePreset {
                rows: key,
                at: self.clock,
            });
        }
        self.last_majority = Some(key);
        self.rewritten_since_majority.clear();
    }

    pub fn execute(&mut self, trace: &Trace) -> Result<ExecStats> {
        let mut stats = ExecStats::default();
        for &cmd in trace {
            match self.apply_command(cmd)? {
                MicroOp::RowCopy { .. } => stats.row_copies += 1,
                MicroOp::MultiActivate { .. } => stats.multi_activates += 1,
                MicroOp::None => {}
            }
            stats.commands += 1;
            if cmd.is_act() {
                stats.activations += 1;
            } else {
                stats.precharges += 1;
            }
        }
        Ok(stats)
    }

    /// Coverage of `rows` over `[t0, t1]`.
    pub fn refresh_coverage(&self, rows: impl IntoIterator<Item = usize>, t0: Picos, t1: Picos) -> CoverageReport {
        self.tracker.coverage(rows, t0, t1)
    }
}

//! Row copy and triple-row majority built from shortened ACT/PRE timing.
//!
//! Generators here are pure: they only produce command fragments. Every
//! fragment ends with a fully-timed PRE so fragments concatenate freely.

use serde::Serialize;

use crate::config::TimingModel;
use crate::dram::command::Command;
use crate::error::{Error, Result};

/// Rows reserved for in-array logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComputeRows {
    /// Low-order address bits `01`; the program's preset row.
    pub r1: usize,
    /// Low-order address bits `10`.
    pub r2: usize,
    /// Low-order address bits `00`; opened implicitly by the decoder.
    pub r3: usize,
    /// All-zeros constant.
    pub c0: usize,
    /// All-ones constant.
    pub c1: usize,
}

impl ComputeRows {
    /// Triple at `base` (which must have low bits `00`) plus constants.
    pub fn at(base: usize, c0: usize, c1: usize) -> Self {
        ComputeRows {
            r1: base + 1,
            r2: base + 2,
            r3: base,
            c0,
            c1,
        }
    }
}

/// Validates the address rule for the majority triple and the constants.
pub fn check_row_constraints(rows: &ComputeRows) -> std::result::Result<(), String> {
    let all = [rows.r1, rows.r2, rows.r3, rows.c0, rows.c1];
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i] == all[j] {
                return Err(format!("rows must be pairwise distinct, row {} repeats", all[i]));
            }
        }
    }
    for (name, row, want) in [("r1", rows.r1, 0b01), ("r2", rows.r2, 0b10), ("r3", rows.r3, 0b00)] {
        if row & 0b11 != want {
            return Err(format!(
                "{name} = {row} has low bits {:02b}, expected {want:02b}",
                row & 0b11
            ));
        }
    }
    if rows.r1 >> 2 != rows.r2 >> 2 || rows.r2 >> 2 != rows.r3 >> 2 {
        return Err(format!(
            "r1 = {}, r2 = {}, r3 = {} do not share high-order address bits",
            rows.r1, rows.r2, rows.r3
        ));
    }
    Ok(())
}

/// Row the decoder opens alongside `first` and `second` under minimal
/// timing. The pair must carry low bits `01`/`10` and identical high bits;
/// the third row is their `00` sibling.
pub fn third_row(first: usize, second: usize, rows: usize) -> Result<usize> {
    let lows = [first & 0b11, second & 0b11];
    if !(lows == [0b01, 0b10] || lows == [0b10, 0b01]) {
        return Err(Error::AddressConstraint(format!(
            "multi-activate rows {first} and {second} need low bits 01 and 10"
        )));
    }
    if first >> 2 != second >> 2 {
        return Err(Error::AddressConstraint(format!(
            "multi-activate rows {first} and {second} differ in high-order bits"
        )));
    }
    let third = first & !0b11;
    if third >= rows {
        return Err(Error::AddressFault { row: third, rows });
    }
    Ok(third)
}

/// `target <- source` via a truncated precharge.
pub fn cpy(target: usize, source: usize, t: &TimingModel) -> Result<[Command; 4]> {
    if target == source {
        return Err(Error::SelfCopy(target));
    }
    Ok([
        Command::act(source, t.t_ras),
        Command::pre(t.t_copy_gap),
        Command::act(target, t.t_ras),
        Command::pre(t.t_rp),
    ])
}

/// Minimal-gap ACT r1 / PRE / ACT r2: all three triple rows become
/// `maj(r1, r2, r3)`.
pub fn majority(rows: &ComputeRows, t: &TimingModel) -> Result<[Command; 4]> {
    check_row_constraints(rows).map_err(Error::AddressConstraint)?;
    Ok([
        Command::act(rows.r1, t.t_multi_gap),
        Command::pre(t.t_multi_gap),
        Command::act(rows.r2, t.t_ras),
        Command::pre(t.t_rp),
    ])
}

/// Presets r1 from C0, then majority: r1 = r2 = r3 = r2 AND r3.
pub fn and3(rows: &ComputeRows, t: &TimingModel) -> Result<Vec<Command>> {
    let mut out = cpy(rows.r1, rows.c0, t)?.to_vec();
    out.extend(majority(rows, t)?);
    Ok(out)
}

/// Presets r1 from C1, then majority: r1 = r2 = r3 = r2 OR r3.
pub fn or3(rows: &ComputeRows, t: &TimingModel) -> Result<Vec<Command>> {
    let mut out = cpy(rows.r1, rows.c1, t)?.to_vec();
    out.extend(majority(rows, t)?);
    Ok(out)
}

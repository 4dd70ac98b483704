//! Classification of ACT-PRE-ACT windows by their gaps.
//!
//! A fully-timed ACT followed by a PRE cut short before the bitlines return
//! to half-VDD leaves the sense amplifiers driving the previous row's data;
//! the next ACT then overwrites the newly opened row (row copy). When both
//! gaps are at the minimum, the second ACT arrives while the first wordline
//! is still high and the decoder opens a third row, so three cells share
//! each bitline (multi-activate).

use crate::config::{AmbiguousTiming, TimingModel};
use crate::dram::command::{Command, CommandKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MicroOp {
    None,
    RowCopy {
        source: usize,
        target: usize,
    },
    /// Opens three rows: the two addressed rows plus the one the decoder
    /// derives from their low-order bits.
    MultiActivate {
        first: usize,
        second: usize,
    },
}

/// Classifies the trailing three commands `[ACT a, PRE, ACT b]`.
///
/// Windows of any other shape classify as [`MicroOp::None`].
pub fn detect_micro_op(window: &[Command], timing: &TimingModel) -> Result<MicroOp> {
    let [first, pre, second] = match window {
        [.., a, b, c] => [a, b, c],
        _ => return Ok(MicroOp::None),
    };
    let (CommandKind::Act(a), CommandKind::Pre, CommandKind::Act(b)) = (first.kind, pre.kind, second.kind) else {
        return Ok(MicroOp::None);
    };
    let act_gap = first.gap_after;
    let pre_gap = pre.gap_after;

    if act_gap >= timing.t_ras && pre_gap >= timing.t_rp {
        return Ok(MicroOp::None);
    }
    if act_gap >= timing.t_ras && pre_gap < timing.copy_threshold {
        return Ok(MicroOp::RowCopy { source: a, target: b });
    }
    if act_gap < timing.multi_threshold && pre_gap < timing.multi_threshold {
        return Ok(MicroOp::MultiActivate { first: a, second: b });
    }
    match timing.ambiguous {
        AmbiguousTiming::Strict => Err(Error::UndefinedTiming { act_gap, pre_gap }),
        AmbiguousTiming::TreatAsNone => Ok(MicroOp::None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(act_gap: u64, pre_gap: u64) -> [Command; 3] {
        [Command::act(1, act_gap), Command::pre(pre_gap), Command::act(2, 0)]
    }

    #[test]
    fn nominal_gaps_are_plain() {
        let t = TimingModel::default();
        assert_eq!(detect_micro_op(&window(t.t_ras, t.t_rp), &t).unwrap(), MicroOp::None);
    }

    #[test]
    fn truncated_precharge_is_copy() {
        let t = TimingModel::default();
        assert_eq!(
            detect_micro_op(&window(t.t_ras, t.t_copy_gap), &t).unwrap(),
            MicroOp::RowCopy { source: 1, target: 2 }
        );
    }

    #[test]
    fn minimal_gaps_are_multi_activate() {
        let t = TimingModel::default();
        assert_eq!(
            detect_micro_op(&window(t.t_multi_gap, t.t_multi_gap), &t).unwrap(),
            MicroOp::MultiActivate { first: 1, second: 2 }
        );
    }

    #[test]
    fn ambiguous_band_is_strict_by_default() {
        let mut t = TimingModel::default();
        // PRE gap between the copy threshold and tRP.
        let w = window(t.t_ras, t.copy_threshold + 1);
        assert!(matches!(detect_micro_op(&w, &t), Err(Error::UndefinedTiming { .. })));
        // ACT cut short but PRE fully timed.
        let w2 = window(t.t_multi_gap, t.t_rp);
        assert!(detect_micro_op(&w2, &t).is_err());
        t.ambiguous = AmbiguousTiming::TreatAsNone;
        assert_eq!(detect_micro_op(&w, &t).unwrap(), MicroOp::None);
    }

    #[test]
    fn other_shapes_are_none() {
        let t = TimingModel::default();
        let w = [Command::pre(0), Command::pre(0), Command::act(3, 0)];
        assert_eq!(detect_micro_op(&w, &t).unwrap(), MicroOp::None);
        assert_eq!(detect_micro_op(&w[1..], &t).unwrap(), MicroOp::None);
    }
}

//! Query-to-trace compilers.
//!
//! The query never travels over the data bus: for each bit the compiler
//! chooses which row of the pair to open, and the sensed row is exactly the
//! per-bit XNOR (NAND) or per-bit mismatch (NOR) for every column at once.
//! Each sensed row is copied into `r3` by a truncated precharge and folded
//! into the running result in `r2` with a majority against a preset `r1`.

use serde::Serialize;

use crate::cam::encoding::Query;
use crate::cam::layout::LayoutMap;
use crate::config::TimingModel;
use crate::dram::command::{Command, Trace};
use crate::error::{Error, Result};
use crate::timing_ops::{and3, cpy, or3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    MatchIsOne,
    MatchIsZero,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::MatchIsOne => "match_is_1",
            Polarity::MatchIsZero => "match_is_0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledCompare {
    pub trace: Trace,
    pub polarity: Polarity,
    /// Row holding the verdicts; the trace ends with it open.
    pub result_row: usize,
    /// Data rows opened, one per compared position.
    pub data_activations: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fold {
    And,
    Or,
}

fn check_query(q: &Query, layout: &LayoutMap) -> Result<()> {
    if q.len() != layout.word_length {
        return Err(Error::LengthMismatch {
            expected: layout.word_length,
            got: q.len(),
        });
    }
    Ok(())
}

fn push_fold(trace: &mut Trace, fold: Fold, layout: &LayoutMap, t: &TimingModel) -> Result<()> {
    match fold {
        Fold::And => trace.extend(and3(&layout.compute, t)?),
        Fold::Or => trace.extend(or3(&layout.compute, t)?),
    }
    Ok(())
}

/// Folds the sensed value of every row in `sensed` into `r2`, starting from
/// the fold's identity.
pub fn compile_chain(sensed: &[usize], fold: Fold, layout: &LayoutMap, t: &TimingModel) -> Result<CompiledCompare> {
    let c = &layout.compute;
    let mut trace = Trace::new();
    trace.push(Command::pre(t.t_rp));
    let identity = match fold {
        Fold::And => c.c1,
        Fold::Or => c.c0,
    };
    trace.extend(cpy(c.r2, identity, t)?);
    for &row in sensed {
        trace.extend(cpy(c.r3, row, t)?);
        push_fold(&mut trace, fold, layout, t)?;
    }
    trace.push(Command::act(c.r2, t.t_ras));
    Ok(CompiledCompare {
        trace,
        polarity: match fold {
            Fold::And => Polarity::MatchIsOne,
            Fold::Or => Polarity::MatchIsZero,
        },
        result_row: c.r2,
        data_activations: sensed.to_vec(),
    })
}

/// At-most-one-mismatch fold over per-position match rows:
/// `exact' = exact & x`, `near' = (near & x) | exact`.
pub fn compile_hd1_chain(sensed: &[usize], layout: &LayoutMap, t: &TimingModel) -> Result<CompiledCompare> {
    if !layout.has_hd1_temps() {
        return Err(Error::Layout(format!(
            "approximate compare needs {} temporary rows, layout has {}",
            crate::cam::layout::HD1_TEMP_ROWS,
            layout.temp_rows.len()
        )));
    }
    let c = &layout.compute;
    let (tx, exact, near) = (layout.temp_rows[0], layout.temp_rows[1], layout.temp_rows[2]);
    let mut trace = Trace::new();
    trace.push(Command::pre(t.t_rp));
    trace.extend(cpy(exact, c.c1, t)?);
    trace.extend(cpy(near, c.c1, t)?);
    for &row in sensed {
        trace.extend(cpy(c.r3, row, t)?);
        trace.extend(cpy(tx, c.r3, t)?);
        // r3 = near & x
        trace.extend(cpy(c.r2, near, t)?);
        push_fold(&mut trace, Fold::And, layout, t)?;
        // r2 = (near & x) | exact
        trace.extend(cpy(c.r2, exact, t)?);
        push_fold(&mut trace, Fold::Or, layout, t)?;
        trace.extend(cpy(near, c.r2, t)?);
        // exact = exact & x
        trace.extend(cpy(c.r3, tx, t)?);
        trace.extend(cpy(c.r2, exact, t)?);
        push_fold(&mut trace, Fold::And, layout, t)?;
        trace.extend(cpy(exact, c.r2, t)?);
    }
    trace.push(Command::act(near, t.t_ras));
    Ok(CompiledCompare {
        trace,
        polarity: Polarity::MatchIsOne,
        result_row: near,
        data_activations: sensed.to_vec(),
    })
}

/// Opens `Q2j` for a `0` query bit and `Q2j+1` for a `1`.
pub fn compile_nand_compare(q: &Query, layout: &LayoutMap, t: &TimingModel) -> Result<CompiledCompare> {
    check_query(q, layout)?;
    let rows: Vec<usize> = q
        .active()
        .map(|(j, b)| {
            let (even, odd) = layout.data_pair(j);
            if b {
                odd
            } else {
                even
            }
        })
        .collect();
    compile_chain(&rows, Fold::And, layout, t)
}

/// Inverted addressing with OR accumulation; a match reads as `0`.
pub fn compile_nor_compare(q: &Query, layout: &LayoutMap, t: &TimingModel) -> Result<CompiledCompare> {
    check_query(q, layout)?;
    let rows: Vec<usize> = q
        .active()
        .map(|(j, b)| {
            let (even, odd) = layout.data_pair(j);
            if b {
                even
            } else {
                odd
            }
        })
        .collect();
    compile_chain(&rows, Fold::Or, layout, t)
}

/// Verdict `1` where the stored word is within Hamming distance 1 of `q`.
pub fn compile_approx_hd1(q: &Query, layout: &LayoutMap, t: &TimingModel) -> Result<CompiledCompare> {
    check_query(q, layout)?;
    let rows: Vec<usize> = q
        .active()
        .map(|(j, b)| {
            let (even, odd) = layout.data_pair(j);
            if b {
                odd
            } else {
                even
            }
        })
        .collect();
    compile_hd1_chain(&rows, layout, t)
}

/// Folds the verdict row `result_row` into the accumulator row:
/// `acc = acc op result`. Reset the accumulator with [`compile_reset_accumulator`].
pub fn compile_accumulate(result_row: usize, fold: Fold, layout: &LayoutMap, t: &TimingModel) -> Result<Trace> {
    let c = &layout.compute;
    let mut trace = Trace::new();
    trace.push(Command::pre(t.t_rp));
    if result_row != c.r2 {
        trace.extend(cpy(c.r2, result_row, t)?);
    }
    trace.extend(cpy(c.r3, layout.accumulator, t)?);
    push_fold(&mut trace, fold, layout, t)?;
    trace.extend(cpy(layout.accumulator, c.r2, t)?);
    trace.push(Command::act(layout.accumulator, t.t_ras));
    Ok(trace)
}

/// Loads the fold identity into the accumulator row.
pub fn compile_reset_accumulator(fold: Fold, layout: &LayoutMap, t: &TimingModel) -> Result<Trace> {
    let c = &layout.compute;
    let mut trace = Trace::new();
    trace.push(Command::pre(t.t_rp));
    let identity = match fold {
        Fold::And => c.c1,
        Fold::Or => c.c0,
    };
    trace.extend(cpy(layout.accumulator, identity, t)?);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_length_checked() {
        let l = LayoutMap::for_words(4, 16, 8, false).unwrap();
        let q: Query = "010".parse().unwrap();
        assert!(matches!(
            compile_nand_compare(&q, &l, &TimingModel::default()),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn approx_requires_temps() {
        let l = LayoutMap::for_words(2, 16, 8, false).unwrap();
        let q: Query = "01".parse().unwrap();
        assert!(matches!(
            compile_approx_hd1(&q, &l, &TimingModel::default()),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn nand_opens_odd_row_for_one() {
        let l = LayoutMap::for_words(3, 16, 8, false).unwrap();
        let q: Query = "011".parse().unwrap();
        let t = TimingModel::default();
        assert_eq!(
            compile_nand_compare(&q, &l, &t).unwrap().data_activations,
            vec![0, 3, 5]
        );
        assert_eq!(compile_nor_compare(&q, &l, &t).unwrap().data_activations, vec![1, 2, 4]);
    }

    #[test]
    fn masked_positions_are_skipped() {
        let l = LayoutMap::for_words(3, 16, 8, false).unwrap();
        let q = Query::with_mask(vec![false, true, true], vec![true, false, true]).unwrap();
        let c = compile_nand_compare(&q, &l, &TimingModel::default()).unwrap();
        assert_eq!(c.data_activations, vec![0, 5]);
    }
}

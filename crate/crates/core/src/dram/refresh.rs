//! Activation timestamps used to reason about compare-as-refresh coverage.
//!
//! Activation is row-granular: every cell in an opened row is restored by its
//! sense amplifier, so one timestamp per row describes every cell in it.

use serde::Serialize;

use crate::config::Picos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefreshTracker {
    last_activation: Vec<Option<Picos>>,
    cols: usize,
    pub refresh_interval: Picos,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Rows whose last activation falls in the window.
    pub covered_rows: Vec<usize>,
    pub uncovered_rows: Vec<usize>,
    pub covered_cells: usize,
    pub total_cells: usize,
}

impl CoverageReport {
    pub fn fraction(&self) -> f64 {
        if self.total_cells == 0 {
            1.0
        } else {
            self.covered_cells as f64 / self.total_cells as f64
        }
    }

    pub fn is_covered(&self, row: usize) -> bool {
        self.covered_rows.contains(&row)
    }
}

impl RefreshTracker {
    pub fn new(rows: usize, cols: usize, refresh_interval: Picos) -> Self {
        RefreshTracker {
            last_activation: vec![None; rows],
            cols,
            refresh_interval,
        }
    }

    pub fn touch(&mut self, row: usize, at: Picos) {
        self.last_activation[row] = Some(at);
    }

    pub fn last_activation(&self, row: usize) -> Option<Picos> {
        self.last_activation.get(row).copied().flatten()
    }

    /// Coverage of `rows` over the closed window `[t0, t1]`.
    pub fn coverage(&self, rows: impl IntoIterator<Item = usize>, t0: Picos, t1: Picos) -> CoverageReport {
        let mut covered_rows = Vec::new();
        let mut uncovered_rows = Vec::new();
        for r in rows {
            match self.last_activation(r) {
                Some(t) if t >= t0 && t <= t1 => covered_rows.push(r),
                _ => uncovered_rows.push(r),
            }
        }
        CoverageReport {
            covered_cells: covered_rows.len() * self.cols,
            total_cells: (covered_rows.len() + uncovered_rows.len()) * self.cols,
            covered_rows,
            uncovered_rows,
        }
    }

    /// Rows not activated within one refresh interval before `now`.
    pub fn stale_rows(&self, now: Picos) -> Vec<usize> {
        self.last_activation
            .iter()
            .enumerate()
            .filter(|(_, t)| match t {
                Some(t) => now.saturating_sub(*t) > self.refresh_interval,
                None => true,
            })
            .map(|(r, _)| r)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_inclusive() {
        let mut t = RefreshTracker::new(4, 8, 100);
        t.touch(1, 10);
        t.touch(2, 20);
        let rep = t.coverage([0, 1, 2, 3], 10, 20);
        assert_eq!(rep.covered_rows, vec![1, 2]);
        assert_eq!(rep.uncovered_rows, vec![0, 3]);
        assert_eq!(rep.covered_cells, 16);
        assert!((rep.fraction() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stale_rows_after_interval() {
        let mut t = RefreshTracker::new(3, 1, 100);
        t.touch(0, 0);
        t.touch(1, 50);
        assert_eq!(t.stale_rows(120), vec![0, 2]);
    }
}

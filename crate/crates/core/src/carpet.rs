//! Grid carpets: a selection of cells from an `m × n` grid on the unit square.

use crate::error::{usage, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetSpec {
    m: u32,
    n: u32,
    cells: Vec<(u32, u32)>,
    column_counts: Vec<u32>,
}

impl CarpetSpec {
    /// `cells` are `(column, row)` pairs with `column < m` and `row < n`.
    /// Repeated cells are kept (they describe overlapping maps).
    pub fn new(m: u32, n: u32, cells: Vec<(u32, u32)>) -> Result<Self> {
        if m < 1 || m > n {
            return usage(format!("carpet grid needs 1 ≤ m ≤ n, got m = {m}, n = {n}"));
        }
        if cells.is_empty() {
            return usage("carpet selects no cells");
        }
        let mut column_counts = vec![0u32; m as usize];
        for &(c, r) in &cells {
            if c >= m || r >= n {
                return usage(format!("cell ({c},{r}) lies outside the {m}x{n} grid"));
            }
            column_counts[c as usize] += 1;
        }
        if let Some(j) = column_counts.iter().position(|&k| k > n) {
            return usage(format!("column {j} selects more than {n} cells"));
        }
        Ok(CarpetSpec {
            m,
            n,
            cells,
            column_counts,
        })
    }

    /// Take the first `counts[j]` rows of column `j`.
    pub fn from_column_counts(m: u32, n: u32, counts: &[u32]) -> Result<Self> {
        if counts.len() != m as usize {
            return usage(format!("expected {m} column counts, got {}", counts.len()));
        }
        let cells = counts
            .iter()
            .enumerate()
            .flat_map(|(j, &k)| (0..k).map(move |r| (j as u32, r)))
            .collect();
        CarpetSpec::new(m, n, cells)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn cells(&self) -> &[(u32, u32)] {
        &self.cells
    }

    /// `C_j`, the number of chosen cells in column `j`.
    pub fn column_counts(&self) -> &[u32] {
        &self.column_counts
    }

    pub fn has_distinct_cells(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.cells.len());
        self.cells.iter().all(|c| seen.insert(*c))
    }
}

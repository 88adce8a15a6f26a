//! Combination selection, reward evaluation, and loop-termination logic.
//!
//! The mining loop optimizes the coverage-based reward (cheap, available
//! every iteration); the area-based reward is reported once at the end when
//! an area model is available.

use std::collections::HashMap;

use crate::error::Result;
use crate::library::{AreaModel, CellLibrary};
use crate::mining::PatternEdge;
use crate::netlist::VertexId;

/// A pattern group frozen out of the mining state: shared topology plus the
/// vertex assignment of every member occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedGroup {
    /// Canonical pattern code (seed tree code, `|`-joined neighbor codes).
    pub code: String,
    /// Cell type per in-pattern index; `cells.len()` is the pattern size.
    pub cells: Vec<String>,
    /// Accumulated pattern edges over in-pattern indices.
    pub edges: Vec<PatternEdge>,
    /// One vertex list per occurrence; position = in-pattern index.
    pub members: Vec<Vec<VertexId>>,
}

impl SelectedGroup {
    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Total vertices covered by this group.
    pub fn coverage(&self) -> usize {
        self.count() * self.size()
    }
}

/// Up to Nₚ vertex-disjoint groups with pairwise distinct codes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatternCombination {
    pub groups: Vec<SelectedGroup>,
}

impl PatternCombination {
    pub fn coverage(&self) -> usize {
        self.groups.iter().map(SelectedGroup::coverage).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Take the first `np` groups of a coverage-sorted list.
///
/// Entries sharing a canonical code (possible when seed supplement re-creates
/// a pattern that already exists) are coalesced into a single group so the
/// combination's codes stay pairwise distinct; coalescing does not change the
/// total coverage.
pub fn select_combination(sorted_groups: Vec<SelectedGroup>, np: usize) -> PatternCombination {
    let mut combo = PatternCombination::default();
    for group in sorted_groups.into_iter().take(np) {
        match combo.groups.iter_mut().find(|g| g.code == group.code) {
            Some(existing) => existing.members.extend(group.members),
            None => combo.groups.push(group),
        }
    }
    combo
}

/// Coverage-proxy reward: `K × Σ Cov(PGS_i)`.
pub fn reward_approx(c: &PatternCombination, k: f64) -> f64 {
    debug_assert!(k > 0.0);
    k * c.coverage() as f64
}

/// Area reward: `Σ |PGS_i| × (Σ member areas − merged area)`, each group
/// clamped at zero (a merge that loses area would simply not be adopted).
///
/// `spice_paths` maps group code → SPICE file path, needed only by the
/// `External` area model.
pub fn reward_area(
    c: &PatternCombination,
    lib: &CellLibrary,
    model: &AreaModel,
    spice_paths: &HashMap<String, String>,
) -> Result<f64> {
    let mut total = 0.0;
    for group in &c.groups {
        total += group_saving(group, lib, model, spice_paths.get(&group.code).map(|s| s.as_str()))?;
    }
    Ok(total)
}

/// Area saved by one group: occurrence count × per-merge saving, clamped ≥ 0.
pub fn group_saving(
    group: &SelectedGroup,
    lib: &CellLibrary,
    model: &AreaModel,
    spice_path: Option<&str>,
) -> Result<f64> {
    let members: Vec<_> = group
        .cells
        .iter()
        .map(|c| lib.get(c))
        .collect::<Result<_>>()?;
    let sum: f64 = members.iter().map(|c| c.area).sum();
    let merged = model.merged_area(&members, spice_path)?;
    let per_merge = sum - merged;
    if per_merge < 0.0 {
        log::warn!(
            "pattern {} would grow area by {:.3} per merge; counting it as 0",
            group.code,
            -per_merge
        );
        return Ok(0.0);
    }
    Ok(group.count() as f64 * per_merge)
}

/// One evaluated iteration of the mining loop.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub combination: PatternCombination,
    pub reward_approx: f64,
}

/// Append-only per-iteration reward trace.
#[derive(Debug, Clone, Default)]
pub struct RewardHistory {
    records: Vec<IterationRecord>,
}

impl RewardHistory {
    pub fn push(&mut self, record: IterationRecord) {
        if let Some(last) = self.records.last() {
            assert!(record.iteration > last.iteration, "iteration indices must increase");
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.reward_approx).collect()
    }

    /// True when the reward strictly declined over the last two iterations.
    pub fn should_terminate(&self) -> bool {
        let n = self.records.len();
        if n < 3 {
            return false;
        }
        let r = |i: usize| self.records[i].reward_approx;
        r(n - 1) < r(n - 2) && r(n - 2) < r(n - 3)
    }

    /// The record with the highest reward; earliest wins ties.
    pub fn best(&self) -> Option<&IterationRecord> {
        let mut best: Option<&IterationRecord> = None;
        for rec in &self.records {
            if best.map_or(true, |b| rec.reward_approx > b.reward_approx) {
                best = Some(rec);
            }
        }
        best
    }
}

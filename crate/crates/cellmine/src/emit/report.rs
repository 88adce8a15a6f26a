//! Quantitative mining reports (JSON and CSV).

use std::collections::HashMap;

use serde::Serialize;

use crate::combine::{group_saving, PatternCombination};
use crate::error::Result;
use crate::library::{AreaModel, CellLibrary};
use crate::netlist::{Model, NetlistGraph};

/// One selected pattern group, as reported.
#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub code: String,
    pub size: usize,
    pub count: usize,
    /// Covered share of the netlist graph's vertices, in percent.
    pub coverage_pct: f64,
    /// Estimated design-area saving from adopting this merged cell.
    pub saving_area: f64,
}

/// Whole-run summary. Serialized field order is the wire format.
#[derive(Debug, Clone, Serialize)]
pub struct MiningReport {
    pub design: String,
    pub original_area: f64,
    pub optimized_area: f64,
    pub reduction_pct: f64,
    pub iterations: usize,
    pub fsm_seconds: f64,
    /// Selected pattern sizes joined by `/`, `-` when nothing was selected.
    pub pattern_sizes: String,
    pub groups: Vec<GroupReport>,
}

impl MiningReport {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// One row per group, same columns as the JSON group objects.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["code", "size", "count", "coverage_pct", "saving_area"])
            .map_err(csv_err)?;
        for g in &self.groups {
            w.write_record([
                g.code.as_str(),
                &g.size.to_string(),
                &g.count.to_string(),
                &g.coverage_pct.to_string(),
                &g.saving_area.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Internal(format!("csv serialization failed: {e}"))
}

/// Assemble the report for one design.
///
/// `original_area` sums every gate of the flattened model (latch statements
/// carry no cell and no area); savings follow `group_saving`, so a merge
/// that would grow area contributes zero. `spice_paths` maps group code to
/// an emitted SPICE file for the external area model.
#[allow(clippy::too_many_arguments)]
pub fn build_report(
    design: &str,
    model: &Model,
    graph: &NetlistGraph,
    lib: &CellLibrary,
    combination: &PatternCombination,
    iterations: usize,
    fsm_seconds: f64,
    area_model: &AreaModel,
    spice_paths: &HashMap<String, String>,
) -> Result<MiningReport> {
    let mut original_area = 0.0;
    for gate in &model.gates {
        original_area += lib.get(&gate.cell)?.area;
    }

    let n = graph.n_vertices();
    let mut groups = Vec::with_capacity(combination.groups.len());
    let mut total_saving = 0.0;
    for g in &combination.groups {
        let saving = group_saving(
            g,
            lib,
            area_model,
            spice_paths.get(&g.code).map(|s| s.as_str()),
        )?;
        total_saving += saving;
        groups.push(GroupReport {
            code: g.code.clone(),
            size: g.size(),
            count: g.count(),
            coverage_pct: if n == 0 {
                0.0
            } else {
                100.0 * g.coverage() as f64 / n as f64
            },
            saving_area: saving,
        });
    }

    let optimized_area = original_area - total_saving;
    let pattern_sizes = if combination.groups.is_empty() {
        "-".to_string()
    } else {
        combination
            .groups
            .iter()
            .map(|g| g.size().to_string())
            .collect::<Vec<_>>()
            .join("/")
    };
    Ok(MiningReport {
        design: design.to_string(),
        original_area,
        optimized_area,
        reduction_pct: if original_area > 0.0 {
            100.0 * total_saving / original_area
        } else {
            0.0
        },
        iterations,
        fsm_seconds,
        pattern_sizes,
        groups,
    })
}

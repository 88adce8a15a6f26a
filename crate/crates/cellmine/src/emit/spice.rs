//! Merged-cell SPICE subcircuit generation.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::library::CellLibrary;

use super::{CustomCellSpec, PinPlan};

/// Self-contained SPICE text for a merged cell: the member cells' subcircuit
/// bodies (each distinct cell once, name order) followed by one `.SUBCKT`
/// that instantiates a member per pattern position. Ports carry the plan's
/// external pins plus every supply rail the member bodies declare; removed
/// signals appear only as local `N<pos>_<pin>` nodes.
pub fn generate_spice(spec: &CustomCellSpec, lib: &CellLibrary) -> Result<String> {
    let mut cell_names: Vec<&str> = spec.group.cells.iter().map(String::as_str).collect();
    cell_names.sort();
    cell_names.dedup();

    let mut out = String::new();
    let _ = writeln!(out, "* {} : merged cell for pattern {}", spec.name, spec.group.code);
    let _ = writeln!(
        out,
        "* {} member cells, {} occurrences in the source design",
        spec.group.size(),
        spec.group.count()
    );
    for name in &cell_names {
        let cell = lib.get(name)?;
        let body = cell
            .spice
            .as_ref()
            .ok_or_else(|| Error::MissingSpice(name.to_string()))?;
        out.push('\n');
        out.push_str(body.trim_end());
        out.push('\n');
    }

    // Per-member subckt interface, in position order; rails are every subckt
    // port that is not a logical pin, shared across the whole merged cell.
    let mut interfaces: Vec<(String, Vec<String>)> = Vec::new();
    let mut rails: Vec<String> = Vec::new();
    for name in &spec.group.cells {
        let cell = lib.get(name)?;
        let body = cell.spice.as_ref().unwrap(); // checked above
        let (subckt, ports) = subckt_interface(body).ok_or_else(|| {
            Error::Config(format!("cell {name}: SPICE body has no .SUBCKT line"))
        })?;
        for pin in cell.inputs.iter().chain(cell.outputs.iter()) {
            if !ports.contains(pin) {
                return Err(Error::Config(format!(
                    "cell {name}: SPICE subcircuit lacks pin {pin}"
                )));
            }
        }
        for port in &ports {
            let logical = cell.inputs.contains(port) || cell.outputs.contains(port);
            if !logical && !rails.contains(port) {
                rails.push(port.clone());
            }
        }
        interfaces.push((subckt, ports));
    }

    let mut header: Vec<&str> = spec.ports.iter().map(|p| p.name.as_str()).collect();
    header.extend(rails.iter().map(String::as_str));
    out.push('\n');
    let _ = writeln!(out, ".SUBCKT {} {}", spec.name, header.join(" "));
    for (pos, (subckt, ports)) in interfaces.iter().enumerate() {
        let mut nodes = Vec::with_capacity(ports.len());
        for port in ports {
            if rails.contains(port) {
                nodes.push(port.clone());
            } else {
                nodes.push(node_name(spec, pos, port)?);
            }
        }
        let _ = writeln!(out, "XM{pos} {} {}", nodes.join(" "), subckt);
    }
    let _ = writeln!(out, ".ENDS {}", spec.name);
    Ok(out)
}

/// The in-cell node a member pin connects to.
fn node_name(spec: &CustomCellSpec, pos: usize, pin: &str) -> Result<String> {
    let missing = || Error::Internal(format!("no pin plan for position {pos} pin {pin}"));
    match spec.plan(pos, pin).ok_or_else(missing)? {
        PinPlan::Port(idx) => Ok(spec.ports[*idx].name.clone()),
        PinPlan::LocalOut => Ok(format!("N{pos}_{pin}")),
        PinPlan::Internal { from, out_pin } => match spec.plan(*from, out_pin).ok_or_else(missing)? {
            PinPlan::Port(idx) => Ok(spec.ports[*idx].name.clone()),
            PinPlan::LocalOut => Ok(format!("N{from}_{out_pin}")),
            PinPlan::Internal { .. } => Err(Error::Internal(format!(
                "output pin {out_pin} of position {from} planned as an input"
            ))),
        },
    }
}

/// Parse `.SUBCKT <name> <ports…>` (first match, case-insensitive, with `+`
/// continuation lines) out of a SPICE body.
fn subckt_interface(body: &str) -> Option<(String, Vec<String>)> {
    let mut lines = body.lines().peekable();
    while let Some(line) = lines.next() {
        let trimmed = line.trim();
        if !trimmed.to_ascii_lowercase().starts_with(".subckt") {
            continue;
        }
        let mut joined = trimmed.to_string();
        while let Some(next) = lines.peek() {
            let next = next.trim();
            if let Some(rest) = next.strip_prefix('+') {
                joined.push(' ');
                joined.push_str(rest.trim());
                lines.next();
            } else {
                break;
            }
        }
        let mut tokens = joined.split_whitespace();
        tokens.next(); // .SUBCKT
        let name = tokens.next()?.to_string();
        return Some((name, tokens.map(str::to_string).collect()));
    }
    None
}

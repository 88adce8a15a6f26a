//! Netlist rewriting with merged cells, and its inverse for round-trip
//! verification.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::library::CellLibrary;
use crate::netlist::{GateInst, HierNetlist, Model, NetlistGraph};

use super::{CustomCellSpec, PinPlan, Port};

/// One merged-cell instance placed by the rewrite.
#[derive(Debug, Clone)]
pub struct RewriteInstance {
    /// Index into the spec slice.
    pub spec: usize,
    /// Occurrence index within the spec's group.
    pub occurrence: usize,
    /// Gate index of the instance in the rewritten model.
    pub gate_index: usize,
    /// Original-model gate index per pattern position.
    pub member_gates: Vec<usize>,
}

#[derive(Debug)]
pub struct RewriteOutcome {
    pub netlist: HierNetlist,
    /// Placed instances in rewritten-gate order.
    pub instances: Vec<RewriteInstance>,
    /// Original gates removed (= total coverage of the specs).
    pub replaced_gates: usize,
}

/// Replace every occurrence of every spec's group by one merged-cell gate.
///
/// Each instance sits where the occurrence's first (lowest-index) gate was;
/// the other member gates disappear. All other gates, the latches, and the
/// port lists are untouched. Occurrences must be vertex-disjoint — they come
/// from one mining run — and any overlap is an internal error.
pub fn rewrite_netlist(
    netlist: &HierNetlist,
    graph: &NetlistGraph,
    specs: &[CustomCellSpec],
    lib: &CellLibrary,
) -> Result<RewriteOutcome> {
    let model = netlist.top_model();
    if !model.is_flat() {
        return Err(Error::NotFlat(model.name.clone()));
    }

    let mut replaced: HashSet<usize> = HashSet::new();
    let mut anchors: HashMap<usize, (usize, usize)> = HashMap::new();
    for (si, spec) in specs.iter().enumerate() {
        for (oi, member) in spec.group.members.iter().enumerate() {
            let gates: Vec<usize> = member
                .iter()
                .map(|&v| graph.vertices[v as usize].gate)
                .collect();
            for &g in &gates {
                if !replaced.insert(g) {
                    return Err(Error::Internal(format!(
                        "gate {g} is claimed by two pattern occurrences"
                    )));
                }
            }
            let anchor = *gates.iter().min().expect("patterns are non-empty");
            anchors.insert(anchor, (si, oi));
        }
    }

    let mut gates: Vec<GateInst> = Vec::with_capacity(model.gates.len());
    let mut instances = Vec::new();
    for (gi, gate) in model.gates.iter().enumerate() {
        if let Some(&(si, oi)) = anchors.get(&gi) {
            let spec = &specs[si];
            instances.push(RewriteInstance {
                spec: si,
                occurrence: oi,
                gate_index: gates.len(),
                member_gates: spec.group.members[oi]
                    .iter()
                    .map(|&v| graph.vertices[v as usize].gate)
                    .collect(),
            });
            gates.push(GateInst {
                cell: spec.name.clone(),
                conns: occurrence_conns(spec, graph, model, oi, lib)?,
                line: 0,
            });
        } else if !replaced.contains(&gi) {
            gates.push(gate.clone());
        }
    }

    let rewritten = Model {
        name: model.name.clone(),
        inputs: model.inputs.clone(),
        outputs: model.outputs.clone(),
        gates,
        subckts: Vec::new(),
        latches: model.latches.clone(),
    };
    Ok(RewriteOutcome {
        netlist: HierNetlist::from_flat_model(rewritten),
        instances,
        replaced_gates: replaced.len(),
    })
}

/// Port→net connections for one occurrence, in spec port order.
///
/// Output ports take the net on the member gate's pin. Exposed input slots
/// of each equivalence class take the class's external nets — everything on
/// the class pins minus the nets the accumulated edges wire internally —
/// sorted for determinism (class pins are interchangeable, so any assignment
/// is equivalent). Ports with no net in this occurrence are left off.
fn occurrence_conns(
    spec: &CustomCellSpec,
    graph: &NetlistGraph,
    model: &Model,
    occurrence: usize,
    lib: &CellLibrary,
) -> Result<Vec<(String, String)>> {
    let member = &spec.group.members[occurrence];
    let gate_of =
        |pos: usize| &model.gates[graph.vertices[member[pos] as usize].gate];
    let mut net_of_port: HashMap<&str, String> = HashMap::new();

    for port in spec.ports.iter().filter(|p| p.output) {
        if let Some(net) = gate_of(port.position).net(&port.pin) {
            net_of_port.insert(port.name.as_str(), net.to_string());
        }
    }

    for (pos, cell_name) in spec.group.cells.iter().enumerate() {
        let cell = lib.get(cell_name)?;
        let gate = gate_of(pos);
        for class in &cell.equiv_classes {
            let exposed: Vec<&Port> = class
                .iter()
                .filter_map(|p| match spec.plan(pos, p) {
                    Some(PinPlan::Port(idx)) => Some(&spec.ports[*idx]),
                    _ => None,
                })
                .collect();
            if exposed.is_empty() {
                continue;
            }
            let mut nets: Vec<String> = class
                .iter()
                .filter_map(|p| gate.net(p))
                .map(str::to_string)
                .collect();
            for e in spec
                .group
                .edges
                .iter()
                .filter(|e| e.to as usize == pos && e.in_canon == class[0])
            {
                let src = gate_of(e.from as usize).net(&e.out_pin).ok_or_else(|| {
                    Error::Internal(format!(
                        "pattern {}: accumulated edge has no driving net",
                        spec.group.code
                    ))
                })?;
                match nets.iter().position(|n| n == src) {
                    Some(i) => {
                        nets.remove(i);
                    }
                    None => {
                        return Err(Error::Internal(format!(
                            "pattern {}: net {src} missing from class {} of {}",
                            spec.group.code, class[0], cell.name
                        )))
                    }
                }
            }
            nets.sort();
            for (port, net) in exposed.into_iter().zip(nets) {
                net_of_port.insert(port.name.as_str(), net);
            }
        }
    }

    Ok(spec
        .ports
        .iter()
        .filter_map(|p| {
            net_of_port
                .remove(p.name.as_str())
                .map(|net| (p.name.clone(), net))
        })
        .collect())
}

/// One merged-cell instance expanded back into member gates.
#[derive(Debug, Clone)]
pub struct ExpandedInstance {
    pub spec: usize,
    /// Expanded-model gate index per pattern position.
    pub gates: Vec<usize>,
}

/// Expand every merged-cell gate back into its member gates, recreating the
/// removed internal signals as fresh nets. `expand(rewrite(n))` reproduces
/// `n`'s netlist graph exactly (up to internal net names and gate order).
pub fn expand_netlist(
    netlist: &HierNetlist,
    specs: &[CustomCellSpec],
    lib: &CellLibrary,
) -> Result<(HierNetlist, Vec<ExpandedInstance>)> {
    let model = netlist.top_model();
    if !model.is_flat() {
        return Err(Error::NotFlat(model.name.clone()));
    }
    let by_name: HashMap<&str, usize> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();

    let mut used_nets: HashSet<String> = HashSet::new();
    used_nets.extend(model.inputs.iter().cloned());
    used_nets.extend(model.outputs.iter().cloned());
    for gate in &model.gates {
        used_nets.extend(gate.conns.iter().map(|(_, n)| n.clone()));
    }
    for latch in &model.latches {
        used_nets.insert(latch.input.clone());
        used_nets.insert(latch.output.clone());
    }

    let mut fresh_counter = 0usize;
    let mut gates: Vec<GateInst> = Vec::new();
    let mut records: Vec<ExpandedInstance> = Vec::new();
    for gate in &model.gates {
        let Some(&si) = by_name.get(gate.cell.as_str()) else {
            gates.push(gate.clone());
            continue;
        };
        let spec = &specs[si];
        // Node of each member output: the port's net when connected,
        // otherwise a fresh local net shared by its internal sinks.
        let mut local: HashMap<(usize, String), String> = HashMap::new();
        let mut out_net = |pos: usize, pin: &str| -> Result<String> {
            if let Some(net) = local.get(&(pos, pin.to_string())) {
                return Ok(net.clone());
            }
            let net = match spec.plan(pos, pin) {
                Some(PinPlan::Port(idx)) => {
                    gate.net(&spec.ports[*idx].name).map(str::to_string)
                }
                Some(PinPlan::LocalOut) => None,
                _ => {
                    return Err(Error::Internal(format!(
                        "pin {pin} of position {pos} is not an output"
                    )))
                }
            };
            let net = net.unwrap_or_else(|| loop {
                let cand = format!("acx{fresh_counter}_{pos}_{pin}");
                fresh_counter += 1;
                if used_nets.insert(cand.clone()) {
                    break cand;
                }
            });
            local.insert((pos, pin.to_string()), net.clone());
            Ok(net)
        };

        let mut member_gates: Vec<GateInst> = Vec::with_capacity(spec.group.size());
        for (pos, cell_name) in spec.group.cells.iter().enumerate() {
            let cell = lib.get(cell_name)?;
            let mut conns: Vec<(String, String)> = Vec::new();
            for p in &cell.inputs {
                match spec.plan(pos, p) {
                    Some(PinPlan::Port(idx)) => {
                        if let Some(net) = gate.net(&spec.ports[*idx].name) {
                            conns.push((p.clone(), net.to_string()));
                        }
                    }
                    Some(PinPlan::Internal { from, out_pin }) => {
                        let (from, out_pin) = (*from, out_pin.clone());
                        conns.push((p.clone(), out_net(from, &out_pin)?));
                    }
                    _ => {
                        return Err(Error::Internal(format!(
                            "input pin {p} of {cell_name} has no plan"
                        )))
                    }
                }
            }
            for q in &cell.outputs {
                conns.push((q.clone(), out_net(pos, q)?));
            }
            member_gates.push(GateInst {
                cell: cell_name.clone(),
                conns,
                line: 0,
            });
        }
        records.push(ExpandedInstance {
            spec: si,
            gates: (gates.len()..gates.len() + member_gates.len()).collect(),
        });
        gates.extend(member_gates);
    }

    let expanded = Model {
        name: model.name.clone(),
        inputs: model.inputs.clone(),
        outputs: model.outputs.clone(),
        gates,
        subckts: Vec::new(),
        latches: model.latches.clone(),
    };
    Ok((HierNetlist::from_flat_model(expanded), records))
}

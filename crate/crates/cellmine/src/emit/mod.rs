//! Artifact emission: merged-cell SPICE subcircuits, netlist rewriting, and
//! quantitative reports.
//!
//! The bridge between a mined [`SelectedGroup`] and its artifacts is the
//! [`CustomCellSpec`]: a per-pin plan deciding which member pins are wired
//! inside the merged cell and which become external ports. Accumulated
//! pattern edges are always wired internally; everything else — including
//! member-specific connectivity the canonical code does not cover — routes
//! through ports, so one spec serves every occurrence.

mod report;
mod rewrite;
mod spice;

pub use report::{build_report, GroupReport, MiningReport};
pub use rewrite::{
    expand_netlist, rewrite_netlist, ExpandedInstance, RewriteInstance, RewriteOutcome,
};
pub use spice::generate_spice;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::combine::SelectedGroup;
use crate::error::{Error, Result};
use crate::library::{AreaModel, CellLibrary, CellType};
use crate::netlist::{Model, NetlistGraph, VertexId};

/// Deterministic custom-cell name for a canonical pattern code.
pub fn custom_cell_name(code: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(code.as_bytes());
    let mut name = String::from("ACX_");
    for byte in &digest[..4] {
        let _ = write!(name, "{byte:02x}");
    }
    name
}

/// An external pin of a merged cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    /// `M<position>_<pin>`, de-duplicated if member pin names collide.
    pub name: String,
    /// In-pattern index of the member the pin belongs to.
    pub position: usize,
    /// Pin name on the member cell.
    pub pin: String,
    pub output: bool,
}

/// Where one member pin connects inside the merged cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PinPlan {
    /// Exposed as the external port at this index.
    Port(usize),
    /// Input bound to an accumulated edge: wired to the source position's
    /// output node inside the cell.
    Internal { from: usize, out_pin: String },
    /// Output whose signal is completely internal in every occurrence; its
    /// node never leaves the cell.
    LocalOut,
}

/// Merge plan for one pattern group: name, external ports, and a node plan
/// for every member pin.
#[derive(Debug, Clone)]
pub struct CustomCellSpec {
    pub name: String,
    pub group: SelectedGroup,
    /// External ports in deterministic order: positions ascending, inputs in
    /// declared order, then outputs in declared order.
    pub ports: Vec<Port>,
    /// position → pin → plan.
    pub pin_plan: Vec<BTreeMap<String, PinPlan>>,
}

impl CustomCellSpec {
    pub fn plan(&self, position: usize, pin: &str) -> Option<&PinPlan> {
        self.pin_plan.get(position).and_then(|m| m.get(pin))
    }

    pub fn input_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| !p.output)
    }

    pub fn output_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.output)
    }

    /// The merged cell as a library cell (no equivalence classes: ports of a
    /// merged cell are not interchangeable). `area` comes from the caller's
    /// area model; values ≤ 0 are clamped to a tiny positive area so the
    /// declaration stays parseable.
    pub fn to_cell_type(&self, area: f64, spice: Option<String>) -> Result<CellType> {
        CellType::new(
            self.name.clone(),
            self.input_ports().map(|p| p.name.clone()).collect(),
            self.output_ports().map(|p| p.name.clone()).collect(),
            Vec::new(),
            if area > 0.0 { area } else { 1e-6 },
            false,
            spice,
        )
    }
}

/// Declare every spec's merged cell in a fresh extension library (same `K`,
/// name suffixed `_ext`), with areas from `area_model`.
pub fn library_extension(
    specs: &[CustomCellSpec],
    lib: &CellLibrary,
    area_model: &AreaModel,
    spice_paths: &HashMap<String, String>,
) -> Result<CellLibrary> {
    let mut ext = CellLibrary::new(format!("{}_ext", lib.name), lib.k);
    for spec in specs {
        let members: Vec<&CellType> = spec
            .group
            .cells
            .iter()
            .map(|c| lib.get(c))
            .collect::<Result<_>>()?;
        let area = area_model.merged_area(
            &members,
            spice_paths.get(&spec.group.code).map(|s| s.as_str()),
        )?;
        ext.add_cell(spec.to_cell_type(area, None)?)?;
    }
    Ok(ext)
}

/// Decide internal wiring and external ports for one pattern group.
///
/// An output pin is internal iff in *every* occurrence its net is
/// non-boundary and its sink multiset equals the accumulated-edge sinks;
/// otherwise it is a port. For each input equivalence class with `c`
/// accumulated edges, the first `c` pins (class order) are wired internally
/// and the rest become ports — pin interchangeability within a class is what
/// lets one plan fit occurrences whose edges land on different class pins.
pub fn build_spec(
    group: &SelectedGroup,
    graph: &NetlistGraph,
    model: &Model,
    lib: &CellLibrary,
) -> Result<CustomCellSpec> {
    let size = group.size();
    let cells: Vec<&CellType> = group
        .cells
        .iter()
        .map(|c| lib.get(c))
        .collect::<Result<_>>()?;
    for member in &group.members {
        if member.len() != size {
            return Err(Error::Internal(format!(
                "pattern {} has an occurrence of the wrong size",
                group.code
            )));
        }
    }
    let gate_of = |member: &[VertexId], pos: usize| &model.gates[graph.vertices[member[pos] as usize].gate];

    // Output internality, checked across all occurrences.
    let mut internal_out: HashSet<(usize, String)> = HashSet::new();
    for (pos, cell) in cells.iter().enumerate() {
        'pins: for q in &cell.outputs {
            let mut accumulated: Vec<(usize, &str)> = group
                .edges
                .iter()
                .filter(|e| e.from as usize == pos && e.out_pin == *q)
                .map(|e| (e.to as usize, e.in_canon.as_str()))
                .collect();
            accumulated.sort();
            for member in &group.members {
                let v = member[pos];
                let Some(net) = gate_of(member, pos).net(q) else {
                    if accumulated.is_empty() {
                        continue; // unconnected everywhere it matters
                    }
                    return Err(Error::Internal(format!(
                        "pattern {}: accumulated edge from an unconnected pin",
                        group.code
                    )));
                };
                if graph.boundary_nets.contains(net) {
                    continue 'pins; // drives a primary output / latch / PI net
                }
                let mut sinks: Vec<(usize, &str)> = Vec::new();
                for &eid in &graph.out_edges[v as usize] {
                    let e = &graph.edges[eid as usize];
                    if e.out_pin != *q {
                        continue;
                    }
                    match member.iter().position(|&m| m == e.sink) {
                        Some(p) => sinks.push((p, e.in_canon.as_str())),
                        None => continue 'pins, // external sink
                    }
                }
                sinks.sort();
                if sinks != accumulated {
                    continue 'pins; // in-pattern fanout the code does not cover
                }
            }
            internal_out.insert((pos, q.clone()));
        }
    }

    // Input slots: per class, accumulated edges bind to the first pins.
    let mut ports: Vec<Port> = Vec::new();
    let mut used_names: HashSet<String> = HashSet::new();
    let mut pin_plan: Vec<BTreeMap<String, PinPlan>> = vec![BTreeMap::new(); size];
    let mut push_port = |ports: &mut Vec<Port>, position: usize, pin: &str, output: bool| {
        let mut name = format!("M{position}_{pin}");
        while !used_names.insert(name.clone()) {
            name.push('_');
        }
        ports.push(Port {
            name,
            position,
            pin: pin.to_string(),
            output,
        });
        ports.len() - 1
    };

    for (pos, cell) in cells.iter().enumerate() {
        let mut bound: HashMap<&str, PinPlan> = HashMap::new();
        for class in &cell.equiv_classes {
            let edges: Vec<_> = group
                .edges
                .iter()
                .filter(|e| e.to as usize == pos && e.in_canon == class[0])
                .collect();
            if edges.len() > class.len() {
                return Err(Error::Internal(format!(
                    "pattern {}: {} edges into the {}-pin class {} of {}",
                    group.code,
                    edges.len(),
                    class.len(),
                    class[0],
                    cell.name
                )));
            }
            for (pin, e) in class.iter().zip(&edges) {
                bound.insert(
                    pin.as_str(),
                    PinPlan::Internal {
                        from: e.from as usize,
                        out_pin: e.out_pin.clone(),
                    },
                );
            }
        }
        for p in &cell.inputs {
            let plan = match bound.remove(p.as_str()) {
                Some(plan) => plan,
                None => PinPlan::Port(push_port(&mut ports, pos, p, false)),
            };
            pin_plan[pos].insert(p.clone(), plan);
        }
        for q in &cell.outputs {
            let plan = if internal_out.contains(&(pos, q.clone())) {
                PinPlan::LocalOut
            } else {
                PinPlan::Port(push_port(&mut ports, pos, q, true))
            };
            pin_plan[pos].insert(q.clone(), plan);
        }
    }

    Ok(CustomCellSpec {
        name: custom_cell_name(&group.code),
        group: group.clone(),
        ports,
        pin_plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combine::PatternCombination;
    use crate::library::AreaModel;
    use crate::mining::{mine, MiningConfig, PatternEdge};
    use crate::netlist::{build_graph, parse_blif, write_blif, HierNetlist, NetlistGraph};

    const LIB_TEXT: &str = "\
library emitlib K=1.0
cell INVX1 area=1.0
  in A
  out Y
  spice <<EOF
.SUBCKT INVX1 A Y VDD VSS
MP Y A VDD VDD pmos W=2u L=0.1u
MN Y A VSS VSS nmos W=1u L=0.1u
.ENDS INVX1
EOF
end
cell OR2X1 area=1.5
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT OR2X1 A B Y VDD VSS
MP1 n1 A VDD VDD pmos W=2u L=0.1u
MP2 Y B n1 VDD pmos W=2u L=0.1u
MN1 Y A VSS VSS nmos W=1u L=0.1u
MN2 Y B VSS VSS nmos W=1u L=0.1u
.ENDS OR2X1
EOF
end
cell NAND2X1 area=2.0
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT NAND2X1 A B Y VDD VSS
MP1 Y A VDD VDD pmos W=2u L=0.1u
MP2 Y B VDD VDD pmos W=2u L=0.1u
MN1 Y A n1 VSS nmos W=1u L=0.1u
MN2 n1 B VSS VSS nmos W=1u L=0.1u
.ENDS NAND2X1
EOF
end
";

    fn lib() -> CellLibrary {
        CellLibrary::parse(LIB_TEXT, "emitlib.lib").unwrap()
    }

    fn design(blif: &str) -> (HierNetlist, NetlistGraph) {
        let nl = parse_blif(blif, "test.blif").unwrap();
        let graph = build_graph(nl.top_model(), &lib()).unwrap();
        (nl, graph)
    }

    /// INVX1 at vertex 1 fed by INVX1 at vertex 0; one occurrence.
    fn inv_pair_group() -> SelectedGroup {
        SelectedGroup {
            code: "[INVX1](INVX1,Y,A)".into(),
            cells: vec!["INVX1".into(), "INVX1".into()],
            edges: vec![PatternEdge {
                from: 1,
                to: 0,
                out_pin: "Y".into(),
                in_canon: "A".into(),
            }],
            members: vec![vec![1, 0]],
        }
    }

    fn port(name: &str, position: usize, pin: &str, output: bool) -> Port {
        Port {
            name: name.into(),
            position,
            pin: pin.into(),
            output,
        }
    }

    #[test]
    fn custom_cell_names_are_deterministic_digests() {
        assert_eq!(custom_cell_name("[OR2X1](INVX1,Y,A)"), "ACX_3ae6fb97");
        assert_eq!(custom_cell_name("[INVX1](INVX1,Y,A)"), "ACX_dc6d41c9");
        assert_eq!(
            custom_cell_name("[OR2X1](INVX1,Y,A)"),
            custom_cell_name("[OR2X1](INVX1,Y,A)")
        );
    }

    #[test]
    fn chain_spec_internalizes_the_linking_signal() {
        let (nl, graph) = design(
            ".model chain\n.inputs n1\n.outputs n3\n\
             .gate INVX1 A=n1 Y=n2\n.gate INVX1 A=n2 Y=n3\n.end\n",
        );
        let spec = build_spec(&inv_pair_group(), &graph, nl.top_model(), &lib()).unwrap();
        assert_eq!(spec.name, "ACX_dc6d41c9");
        // Four member pins, two survive as ports: the chain signal is gone.
        assert_eq!(
            spec.ports,
            vec![port("M0_Y", 0, "Y", true), port("M1_A", 1, "A", false)]
        );
        assert_eq!(
            spec.plan(0, "A"),
            Some(&PinPlan::Internal { from: 1, out_pin: "Y".into() })
        );
        assert_eq!(spec.plan(1, "Y"), Some(&PinPlan::LocalOut));

        let spice = generate_spice(&spec, &lib()).unwrap();
        assert!(spice.contains(".SUBCKT ACX_dc6d41c9 M0_Y M1_A VDD VSS\n"));
        assert!(spice.contains("XM0 N1_Y M0_Y VDD VSS INVX1\n"));
        assert!(spice.contains("XM1 M1_A N1_Y VDD VSS INVX1\n"));
    }

    #[test]
    fn external_fanout_keeps_the_output_exposed() {
        // n2 also feeds a NAND outside the pattern, so M1_Y must stay a port
        // and the merged cell keeps driving the tapped net.
        let (nl, graph) = design(
            ".model tap\n.inputs n1 n4\n.outputs n3 n5\n\
             .gate INVX1 A=n1 Y=n2\n.gate INVX1 A=n2 Y=n3\n\
             .gate NAND2X1 A=n2 B=n4 Y=n5\n.end\n",
        );
        let spec = build_spec(&inv_pair_group(), &graph, nl.top_model(), &lib()).unwrap();
        assert_eq!(
            spec.ports,
            vec![
                port("M0_Y", 0, "Y", true),
                port("M1_A", 1, "A", false),
                port("M1_Y", 1, "Y", true),
            ]
        );
        // The internal sink rides the exposed node instead of a local one.
        let spice = generate_spice(&spec, &lib()).unwrap();
        assert!(spice.contains("XM0 M1_Y M0_Y VDD VSS INVX1\n"));
        assert!(spice.contains("XM1 M1_A M1_Y VDD VSS INVX1\n"));

        let outcome = rewrite_netlist(&nl, &graph, &[spec], &lib()).unwrap();
        let gates = &outcome.netlist.top_model().gates;
        assert_eq!(gates.len(), 2);
        assert_eq!(gates[0].cell, "ACX_dc6d41c9");
        assert_eq!(
            gates[0].conns,
            vec![
                ("M0_Y".to_string(), "n3".to_string()),
                ("M1_A".to_string(), "n1".to_string()),
                ("M1_Y".to_string(), "n2".to_string()),
            ]
        );
        assert_eq!(gates[1].cell, "NAND2X1");
    }

    /// Two occurrences of INVX1 → OR2X1 landing on different interchangeable
    /// pins, plus an untouched NAND2X1.
    const PAIR_BLIF: &str = ".model pair\n.inputs a1 b1 a2 b2\n.outputs o1 o2 y\n\
        .gate INVX1 A=a1 Y=w1\n.gate OR2X1 A=w1 B=b1 Y=o1\n\
        .gate INVX1 A=a2 Y=w2\n.gate OR2X1 A=b2 B=w2 Y=o2\n\
        .gate NAND2X1 A=a1 B=b1 Y=y\n.end\n";

    fn mined_pair() -> (HierNetlist, NetlistGraph, CustomCellSpec) {
        let (nl, graph) = design(PAIR_BLIF);
        let outcome = mine(&graph, &MiningConfig::default()).unwrap();
        assert_eq!(outcome.best.groups.len(), 1);
        let spec = build_spec(&outcome.best.groups[0], &graph, nl.top_model(), &lib()).unwrap();
        (nl, graph, spec)
    }

    #[test]
    fn class_slots_rewire_per_occurrence() {
        let (nl, graph, spec) = mined_pair();
        assert_eq!(spec.name, "ACX_3ae6fb97");
        assert_eq!(spec.group.count(), 2);
        assert_eq!(
            spec.ports,
            vec![
                port("M0_B", 0, "B", false),
                port("M0_Y", 0, "Y", true),
                port("M1_A", 1, "A", false),
            ]
        );

        let outcome = rewrite_netlist(&nl, &graph, &[spec], &lib()).unwrap();
        let gates = &outcome.netlist.top_model().gates;
        assert_eq!(outcome.replaced_gates, 4);
        assert_eq!(gates.len(), 3); // 5 - 4 + 2
        // First occurrence fed the OR2X1 on pin A, the second on pin B; both
        // occurrences bind the same spec slot and expose the other net.
        assert_eq!(
            gates[0].conns,
            vec![
                ("M0_B".to_string(), "b1".to_string()),
                ("M0_Y".to_string(), "o1".to_string()),
                ("M1_A".to_string(), "a1".to_string()),
            ]
        );
        assert_eq!(
            gates[1].conns,
            vec![
                ("M0_B".to_string(), "b2".to_string()),
                ("M0_Y".to_string(), "o2".to_string()),
                ("M1_A".to_string(), "a2".to_string()),
            ]
        );
        assert_eq!(gates[2].cell, "NAND2X1");
        assert_eq!(
            outcome
                .instances
                .iter()
                .map(|i| (i.occurrence, i.gate_index, i.member_gates.clone()))
                .collect::<Vec<_>>(),
            vec![(0, 0, vec![1, 0]), (1, 1, vec![3, 2])]
        );
    }

    #[test]
    fn expansion_restores_members_with_fresh_nets() {
        let (nl, graph, spec) = mined_pair();
        let outcome = rewrite_netlist(&nl, &graph, std::slice::from_ref(&spec), &lib()).unwrap();
        let (expanded, records) =
            expand_netlist(&outcome.netlist, std::slice::from_ref(&spec), &lib()).unwrap();

        let conns = |gi: usize| &expanded.top_model().gates[gi].conns;
        let pair = |pin: &str, net: &str| (pin.to_string(), net.to_string());
        assert_eq!(
            *conns(0),
            vec![pair("A", "acx0_1_Y"), pair("B", "b1"), pair("Y", "o1")]
        );
        assert_eq!(*conns(1), vec![pair("A", "a1"), pair("Y", "acx0_1_Y")]);
        assert_eq!(
            *conns(2),
            vec![pair("A", "acx1_1_Y"), pair("B", "b2"), pair("Y", "o2")]
        );
        assert_eq!(*conns(3), vec![pair("A", "a2"), pair("Y", "acx1_1_Y")]);
        assert_eq!(expanded.top_model().gates[4].cell, "NAND2X1");
        assert_eq!(
            records.iter().map(|r| r.gates.clone()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![2, 3]]
        );

        // Same shape as the source: vertex cells, edge labels, boundary nets.
        let orig = &graph;
        let back = build_graph(expanded.top_model(), &lib()).unwrap();
        let cells = |g: &NetlistGraph| {
            let mut v: Vec<String> = g.vertices.iter().map(|x| x.cell.clone()).collect();
            v.sort();
            v
        };
        assert_eq!(cells(orig), cells(&back));
        let edge_sig = |g: &NetlistGraph| {
            let mut e: Vec<(String, String, String, String)> = g
                .edges
                .iter()
                .map(|e| {
                    (
                        g.vertices[e.driver as usize].cell.clone(),
                        e.out_pin.clone(),
                        g.vertices[e.sink as usize].cell.clone(),
                        e.in_canon.clone(),
                    )
                })
                .collect();
            e.sort();
            e
        };
        assert_eq!(edge_sig(orig), edge_sig(&back));
        assert_eq!(orig.boundary_nets, back.boundary_nets);
    }

    #[test]
    fn spice_emits_each_member_body_once() {
        let (nl, graph, spec) = mined_pair();
        let _ = (nl, graph);
        let spice = generate_spice(&spec, &lib()).unwrap();
        assert_eq!(
            spice,
            "* ACX_3ae6fb97 : merged cell for pattern [OR2X1](INVX1,Y,A)\n\
             * 2 member cells, 2 occurrences in the source design\n\
             \n\
             .SUBCKT INVX1 A Y VDD VSS\n\
             MP Y A VDD VDD pmos W=2u L=0.1u\n\
             MN Y A VSS VSS nmos W=1u L=0.1u\n\
             .ENDS INVX1\n\
             \n\
             .SUBCKT OR2X1 A B Y VDD VSS\n\
             MP1 n1 A VDD VDD pmos W=2u L=0.1u\n\
             MP2 Y B n1 VDD pmos W=2u L=0.1u\n\
             MN1 Y A VSS VSS nmos W=1u L=0.1u\n\
             MN2 Y B VSS VSS nmos W=1u L=0.1u\n\
             .ENDS OR2X1\n\
             \n\
             .SUBCKT ACX_3ae6fb97 M0_B M0_Y M1_A VDD VSS\n\
             XM0 N1_Y M0_B M0_Y VDD VSS OR2X1\n\
             XM1 M1_A N1_Y VDD VSS INVX1\n\
             .ENDS ACX_3ae6fb97\n"
        );
    }

    #[test]
    fn missing_spice_body_is_reported() {
        let mut bare = CellLibrary::new("bare", 1.0);
        bare.add_cell(
            CellType::new(
                "INVX1",
                vec!["A".into()],
                vec!["Y".into()],
                Vec::new(),
                1.0,
                false,
                None,
            )
            .unwrap(),
        )
        .unwrap();
        let (nl, graph) = design(
            ".model chain\n.inputs n1\n.outputs n3\n\
             .gate INVX1 A=n1 Y=n2\n.gate INVX1 A=n2 Y=n3\n.end\n",
        );
        let spec = build_spec(&inv_pair_group(), &graph, nl.top_model(), &bare).unwrap();
        let err = generate_spice(&spec, &bare).unwrap_err();
        assert!(matches!(err, Error::MissingSpice(ref c) if c == "INVX1"), "{err}");
    }

    #[test]
    fn report_totals_match_group_rows() {
        let (nl, graph) = design(PAIR_BLIF);
        let outcome = mine(&graph, &MiningConfig::default()).unwrap();
        let report = build_report(
            "pair",
            nl.top_model(),
            &graph,
            &lib(),
            &outcome.best,
            outcome.iterations,
            0.5,
            &AreaModel::linear(1.0).unwrap(),
            &HashMap::new(),
        )
        .unwrap();

        assert_eq!(report.original_area, 7.0);
        // One merge saves 2.5 - (2.5 - 2·1.0) = 2.0; two occurrences.
        assert_eq!(report.groups.len(), 1);
        assert_eq!(report.groups[0].saving_area, 4.0);
        assert_eq!(report.groups[0].coverage_pct, 80.0);
        assert_eq!(report.optimized_area, 3.0);
        assert!((report.reduction_pct - 400.0 / 7.0).abs() < 1e-12);
        assert_eq!(report.pattern_sizes, "2");

        let json = report.to_json().unwrap();
        let pos = |key: &str| json.find(&format!("\"{key}\"")).unwrap();
        let order = [
            "design",
            "original_area",
            "optimized_area",
            "reduction_pct",
            "iterations",
            "fsm_seconds",
            "pattern_sizes",
            "groups",
        ];
        for w in order.windows(2) {
            assert!(pos(w[0]) < pos(w[1]), "{} after {}", w[0], w[1]);
        }

        assert_eq!(
            report.to_csv().unwrap(),
            "code,size,count,coverage_pct,saving_area\n\
             \"[OR2X1](INVX1,Y,A)\",2,2,80,4\n"
        );
    }

    #[test]
    fn empty_report_prints_placeholder_sizes() {
        let (nl, graph) = design(".model empty\n.inputs a\n.outputs a\n.end\n");
        let report = build_report(
            "empty",
            nl.top_model(),
            &graph,
            &lib(),
            &PatternCombination::default(),
            0,
            0.0,
            &AreaModel::linear(1.0).unwrap(),
            &HashMap::new(),
        )
        .unwrap();
        assert_eq!(report.pattern_sizes, "-");
        assert_eq!(report.reduction_pct, 0.0);
        assert!(report.groups.is_empty());
    }

    #[test]
    fn artifacts_are_byte_deterministic() {
        let run = || {
            let (nl, graph) = design(PAIR_BLIF);
            let outcome = mine(&graph, &MiningConfig::default()).unwrap();
            let specs: Vec<CustomCellSpec> = outcome
                .best
                .groups
                .iter()
                .map(|g| build_spec(g, &graph, nl.top_model(), &lib()).unwrap())
                .collect();
            let spice: Vec<String> = specs
                .iter()
                .map(|s| generate_spice(s, &lib()).unwrap())
                .collect();
            let rewritten = rewrite_netlist(&nl, &graph, &specs, &lib()).unwrap();
            let report = build_report(
                "pair",
                nl.top_model(),
                &graph,
                &lib(),
                &outcome.best,
                outcome.iterations,
                0.0,
                &AreaModel::linear(1.0).unwrap(),
                &HashMap::new(),
            )
            .unwrap();
            (
                spice,
                write_blif(&rewritten.netlist),
                report.to_json().unwrap(),
                report.to_csv().unwrap(),
            )
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_spec_list_rewrites_nothing() {
        let (nl, graph) = design(PAIR_BLIF);
        let outcome = rewrite_netlist(&nl, &graph, &[], &lib()).unwrap();
        assert_eq!(outcome.replaced_gates, 0);
        assert!(outcome.instances.is_empty());
        assert_eq!(write_blif(&outcome.netlist), write_blif(&nl));
    }

    #[test]
    fn extension_library_declares_merged_cells() {
        let (_, _, spec) = mined_pair();
        let ext = library_extension(
            std::slice::from_ref(&spec),
            &lib(),
            &AreaModel::linear(1.0).unwrap(),
            &HashMap::new(),
        )
        .unwrap();
        assert_eq!(ext.name, "emitlib_ext");
        assert_eq!(ext.k, 1.0);
        let cell = ext.get("ACX_3ae6fb97").unwrap();
        assert_eq!(cell.inputs, vec!["M0_B".to_string(), "M1_A".to_string()]);
        assert_eq!(cell.outputs, vec!["M0_Y".to_string()]);
        assert_eq!(cell.area, 0.5); // 2.5 summed - 1.0·2 merges
        assert!(cell.spice.is_none());

        // A merge the area model rates as free still yields a usable cell.
        let clamped = spec.to_cell_type(0.0, None).unwrap();
        assert_eq!(clamped.area, 1e-6);
    }
}

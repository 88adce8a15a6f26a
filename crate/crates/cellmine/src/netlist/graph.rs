//! Labeled directed graph over combinational gate instances.
//!
//! One vertex per combinational gate; one edge per (driver output pin, sink
//! input pin) pair sharing a net, so a multi-fanout net becomes several
//! parallel pin-to-pin edges. Sequential cells and `.latch` elements are not
//! vertices — every net they touch is boundary, as are primary I/O nets and
//! undriven nets.

use std::collections::{BTreeSet, HashMap};

use super::Model;
use crate::error::{Error, Result};
use crate::library::CellLibrary;

pub type VertexId = u32;

#[derive(Debug, Clone)]
pub struct GraphVertex {
    /// Cell type name (always combinational).
    pub cell: String,
    /// Index of the originating gate in the flattened model's gate list.
    pub gate: usize,
}

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub driver: VertexId,
    pub sink: VertexId,
    /// Output pin on the driver cell.
    pub out_pin: String,
    /// Input pin on the sink cell, as written in the netlist.
    pub in_pin: String,
    /// Canonical form of `in_pin` under the sink cell's equivalence classes.
    pub in_canon: String,
}

#[derive(Debug)]
pub struct NetlistGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    /// Edge ids leaving each vertex (driver side), in construction order.
    pub out_edges: Vec<Vec<u32>>,
    /// Edge ids entering each vertex (sink side), in construction order.
    pub in_edges: Vec<Vec<u32>>,
    /// Nets touching primary I/O, removed sequential elements, or no driver.
    pub boundary_nets: BTreeSet<String>,
}

impl NetlistGraph {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell(&self, v: VertexId) -> &str {
        &self.vertices[v as usize].cell
    }

    /// Degree (in + out) of a vertex, counting parallel edges.
    pub fn degree(&self, v: VertexId) -> usize {
        self.out_edges[v as usize].len() + self.in_edges[v as usize].len()
    }
}

/// Where a net's driving value comes from, for conflict reporting.
struct DriverInfo {
    vertex: Option<(VertexId, String)>,
    desc: String,
}

#[derive(Default)]
struct NetInfo {
    driver: Option<DriverInfo>,
    sinks: Vec<(VertexId, String)>,
    boundary: bool,
}

/// Build the mining graph from a flattened model.
pub fn build_graph(model: &Model, lib: &CellLibrary) -> Result<NetlistGraph> {
    if !model.is_flat() {
        return Err(Error::NotFlat(model.name.clone()));
    }
    let ctx = &model.name;
    let mut nets: HashMap<String, NetInfo> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let touch = |nets: &mut HashMap<String, NetInfo>, order: &mut Vec<String>, net: &str| {
        if !nets.contains_key(net) {
            nets.insert(net.to_string(), NetInfo::default());
            order.push(net.to_string());
        }
    };
    let set_driver = |nets: &mut HashMap<String, NetInfo>, net: &str, info: DriverInfo| {
        let entry = nets.get_mut(net).expect("touched");
        if let Some(prev) = &entry.driver {
            return Err(Error::MultipleDrivers {
                net: net.to_string(),
                first: prev.desc.clone(),
                second: info.desc,
            });
        }
        entry.driver = Some(info);
        Ok(())
    };

    for net in &model.inputs {
        touch(&mut nets, &mut order, net);
        set_driver(&mut nets, net, DriverInfo { vertex: None, desc: "primary input".into() })?;
        nets.get_mut(net).unwrap().boundary = true;
    }

    let mut vertices: Vec<GraphVertex> = Vec::new();
    for (gi, gate) in model.gates.iter().enumerate() {
        let cell = lib
            .cell(&gate.cell)
            .ok_or_else(|| Error::parse(ctx, gate.line, format!("unknown cell type `{}`", gate.cell)))?;
        let mut seen_pins: Vec<&str> = Vec::new();
        for (pin, net) in &gate.conns {
            if seen_pins.contains(&pin.as_str()) {
                return Err(Error::parse(ctx, gate.line, format!("pin `{pin}` connected twice")));
            }
            seen_pins.push(pin);
            if !cell.is_input(pin) && !cell.is_output(pin) {
                return Err(Error::parse(
                    ctx,
                    gate.line,
                    format!("cell `{}` has no pin `{pin}`", gate.cell),
                ));
            }
            touch(&mut nets, &mut order, net);
        }
        if cell.sequential {
            // Sequential gates are boundary on every pin, like latches.
            for (pin, net) in &gate.conns {
                nets.get_mut(net).unwrap().boundary = true;
                if cell.is_output(pin) {
                    let desc = format!("sequential gate `{}` (line {})", gate.cell, gate.line);
                    set_driver(&mut nets, net, DriverInfo { vertex: None, desc })?;
                }
            }
            continue;
        }
        let v = vertices.len() as VertexId;
        vertices.push(GraphVertex { cell: gate.cell.clone(), gate: gi });
        for (pin, net) in &gate.conns {
            if cell.is_output(pin) {
                let desc = format!("gate `{}` pin {pin} (line {})", gate.cell, gate.line);
                set_driver(&mut nets, net, DriverInfo { vertex: Some((v, pin.clone())), desc })?;
            } else {
                nets.get_mut(net).unwrap().sinks.push((v, pin.clone()));
            }
        }
    }

    for net in &model.outputs {
        touch(&mut nets, &mut order, net);
        nets.get_mut(net).unwrap().boundary = true;
    }
    for latch in &model.latches {
        for net in [&latch.input, &latch.output] {
            touch(&mut nets, &mut order, net);
            nets.get_mut(net).unwrap().boundary = true;
        }
        let desc = format!("latch output (line {})", latch.line);
        set_driver(&mut nets, &latch.output, DriverInfo { vertex: None, desc })?;
        if let Some((_, ctrl)) = &latch.trigger {
            touch(&mut nets, &mut order, ctrl);
            nets.get_mut(ctrl).unwrap().boundary = true;
        }
    }

    let mut edges: Vec<GraphEdge> = Vec::new();
    let mut boundary_nets = BTreeSet::new();
    for net in &order {
        let info = &nets[net];
        // A net nobody drives is fed from outside the graph.
        if info.boundary || info.driver.is_none() {
            boundary_nets.insert(net.clone());
        }
        let Some(DriverInfo { vertex: Some((d, out_pin)), .. }) = &info.driver else {
            continue;
        };
        if info.boundary {
            continue; // edges only exist between two combinational vertices
        }
        for (s, in_pin) in &info.sinks {
            let sink_cell = lib.get(&vertices[*s as usize].cell)?;
            let in_canon = sink_cell.canonical_pin(in_pin)?.to_string();
            edges.push(GraphEdge {
                driver: *d,
                sink: *s,
                out_pin: out_pin.clone(),
                in_pin: in_pin.clone(),
                in_canon,
            });
        }
    }

    let mut out_edges = vec![Vec::new(); vertices.len()];
    let mut in_edges = vec![Vec::new(); vertices.len()];
    for (ei, e) in edges.iter().enumerate() {
        out_edges[e.driver as usize].push(ei as u32);
        in_edges[e.sink as usize].push(ei as u32);
    }

    Ok(NetlistGraph {
        vertices,
        edges,
        out_edges,
        in_edges,
        boundary_nets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::CellLibrary;
    use crate::netlist::parse_blif;

    fn lib() -> CellLibrary {
        CellLibrary::parse(
            "library l K=1\n\
             cell INVX1 area=1\n in A\n out Y\nend\n\
             cell NAND2X1 area=1.2\n in A B\n out Y\nend\n\
             cell OR2X1 area=1.5\n in A B\n out Y\n equiv A B\nend\n\
             cell DFFX1 area=4 seq\n in D CK\n out Q\nend\n",
            "lib",
        )
        .unwrap()
    }

    fn graph(text: &str) -> NetlistGraph {
        let n = parse_blif(text, "t").unwrap();
        build_graph(n.top_model(), &lib()).unwrap()
    }

    #[test]
    fn chain_has_one_edge() {
        let g = graph(".model t\n.inputs n1\n.outputs n3\n.gate INVX1 A=n1 Y=n2\n.gate INVX1 A=n2 Y=n3\n.end\n");
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges.len(), 1);
        let e = &g.edges[0];
        assert_eq!((e.driver, e.sink), (0, 1));
        assert_eq!((e.out_pin.as_str(), e.in_pin.as_str()), ("Y", "A"));
        assert!(g.boundary_nets.contains("n1"));
        assert!(g.boundary_nets.contains("n3"));
        assert!(!g.boundary_nets.contains("n2"));
    }

    #[test]
    fn fanout_makes_parallel_pin_edges() {
        let g = graph(
            ".model t\n.inputs a\n.outputs x y z\n.gate INVX1 A=a Y=n\n\
             .gate INVX1 A=n Y=x\n.gate NAND2X1 A=n B=n Y=y\n.gate INVX1 A=n Y=z\n.end\n",
        );
        // 1 driver, 4 sink pins (NAND takes n twice) -> 4 edges.
        assert_eq!(g.edges.len(), 4);
        assert!(g.edges.iter().all(|e| e.driver == 0 && e.out_pin == "Y"));
        assert_eq!(g.out_edges[0].len(), 4);
        let into_nand: Vec<&str> = g
            .edges
            .iter()
            .filter(|e| e.sink == 2)
            .map(|e| e.in_pin.as_str())
            .collect();
        assert_eq!(into_nand, ["A", "B"]);
    }

    #[test]
    fn equiv_pins_canonicalize() {
        let g = graph(".model t\n.inputs a\n.outputs y\n.gate INVX1 A=a Y=n\n.gate OR2X1 B=n A=a Y=y\n.end\n");
        // Only B=n creates an edge (A comes from a primary input).
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].in_pin, "B");
        assert_eq!(g.edges[0].in_canon, "A");
    }

    #[test]
    fn sequential_elements_cut_the_graph() {
        // INVX1 -> DFF -> INVX1: the flop is no vertex and blocks both edges.
        let g = graph(
            ".model t\n.inputs a ck\n.outputs z\n.gate INVX1 A=a Y=n1\n\
             .gate DFFX1 D=n1 CK=ck Q=n2\n.gate INVX1 A=n2 Y=z\n.end\n",
        );
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges.len(), 0);
        for net in ["n1", "n2", "ck"] {
            assert!(g.boundary_nets.contains(net), "{net} should be boundary");
        }

        // Same shape with a .latch instead of a flop cell.
        let g = graph(
            ".model t\n.inputs a ck\n.outputs z\n.gate INVX1 A=a Y=n1\n\
             .latch n1 n2 re ck 0\n.gate INVX1 A=n2 Y=z\n.end\n",
        );
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges.len(), 0);
        assert!(g.boundary_nets.contains("n1"));
        assert!(g.boundary_nets.contains("n2"));
    }

    #[test]
    fn primary_output_net_still_boundary_with_internal_sink() {
        // n2 is a primary output AND feeds another gate: no edge through it.
        let g = graph(
            ".model t\n.inputs a\n.outputs n2 z\n.gate INVX1 A=a Y=n2\n.gate INVX1 A=n2 Y=z\n.end\n",
        );
        assert_eq!(g.edges.len(), 0);
        assert!(g.boundary_nets.contains("n2"));
    }

    #[test]
    fn undriven_net_is_boundary() {
        let g = graph(".model t\n.inputs a\n.outputs y\n.gate NAND2X1 A=a B=floats Y=y\n.end\n");
        assert!(g.boundary_nets.contains("floats"));
    }

    #[test]
    fn rejects_conflicting_drivers() {
        let n = parse_blif(
            ".model t\n.inputs a b\n.outputs y\n.gate INVX1 A=a Y=n\n.gate INVX1 A=b Y=n\n.gate INVX1 A=n Y=y\n.end\n",
            "t",
        )
        .unwrap();
        let err = build_graph(n.top_model(), &lib()).unwrap_err().to_string();
        assert!(err.contains("multiple drivers"), "{err}");
        assert!(err.contains("line 4") && err.contains("line 5"), "{err}");

        // Gate driving a primary input net.
        let n = parse_blif(".model t\n.inputs a\n.outputs y\n.gate INVX1 A=y Y=a\n.end\n", "t").unwrap();
        let err = build_graph(n.top_model(), &lib()).unwrap_err().to_string();
        assert!(err.contains("primary input"), "{err}");
    }

    #[test]
    fn rejects_unknown_cell_and_pin() {
        let n = parse_blif(".model t\n.gate MYSTERY A=a Y=y\n.end\n", "t").unwrap();
        let err = build_graph(n.top_model(), &lib()).unwrap_err().to_string();
        assert!(err.contains("unknown cell type `MYSTERY`"), "{err}");

        let n = parse_blif(".model t\n.gate INVX1 A=a Q=y\n.end\n", "t").unwrap();
        let err = build_graph(n.top_model(), &lib()).unwrap_err().to_string();
        assert!(err.contains("has no pin `Q`"), "{err}");

        let n = parse_blif(".model t\n.gate INVX1 A=a A=b Y=y\n.end\n", "t").unwrap();
        let err = build_graph(n.top_model(), &lib()).unwrap_err().to_string();
        assert!(err.contains("connected twice"), "{err}");
    }

    #[test]
    fn requires_flat_model() {
        let text = "\
.model top\n.inputs a\n.outputs z\n.subckt c i=a o=z\n.end\n\
.model c\n.inputs i\n.outputs o\n.gate INVX1 A=i Y=o\n.end\n";
        let n = parse_blif(text, "t").unwrap();
        assert!(matches!(
            build_graph(n.top_model(), &lib()),
            Err(Error::NotFlat(_))
        ));
        let flat = n.flatten().unwrap();
        assert_eq!(build_graph(flat.top_model(), &lib()).unwrap().n_vertices(), 1);
    }

    #[test]
    fn construction_is_deterministic() {
        let text = ".model t\n.inputs a b\n.outputs y z\n\
            .gate NAND2X1 A=a B=b Y=n1\n.gate INVX1 A=n1 Y=n2\n\
            .gate OR2X1 A=n1 B=n2 Y=y\n.gate INVX1 A=n2 Y=z\n.end\n";
        let a = graph(text);
        let b = graph(text);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}

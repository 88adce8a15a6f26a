//! Netlist handling: BLIF parsing, hierarchy flattening/partitioning, and
//! construction of the labeled directed graph the miner consumes.

mod blif;
mod graph;
mod hier;

pub use blif::{parse_blif, write_blif};
pub use graph::{build_graph, GraphEdge, GraphVertex, NetlistGraph, VertexId};
pub use hier::PartitionSet;

use std::collections::HashMap;

use crate::error::{Error, Result};

/// One `.gate` statement: a standard-cell instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateInst {
    pub cell: String,
    /// (pin, net) pairs in file order. Unconnected pins are simply absent.
    pub conns: Vec<(String, String)>,
    /// Source line (1-based) for diagnostics; 0 for generated gates.
    pub line: usize,
}

impl GateInst {
    /// Net connected to `pin`, if any.
    pub fn net(&self, pin: &str) -> Option<&str> {
        self.conns
            .iter()
            .find(|(p, _)| p == pin)
            .map(|(_, n)| n.as_str())
    }
}

/// One `.subckt` statement: an instance of another model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcktInst {
    pub model: String,
    /// (port, net) pairs in file order.
    pub conns: Vec<(String, String)>,
    pub line: usize,
}

/// One `.latch` statement. Kept verbatim so output BLIF round-trips; the
/// graph builder treats both ends as sequential boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Latch {
    pub input: String,
    pub output: String,
    /// Optional `<type> <ctrl>` pair (e.g. `re clk`).
    pub trigger: Option<(String, String)>,
    /// Optional initial value token.
    pub init: Option<String>,
    pub line: usize,
}

/// One `.model` block.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub gates: Vec<GateInst>,
    pub subckts: Vec<SubcktInst>,
    pub latches: Vec<Latch>,
}

impl Model {
    pub fn is_flat(&self) -> bool {
        self.subckts.is_empty()
    }
}

/// A multi-model BLIF design. The first model in the file is the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierNetlist {
    models: Vec<Model>,
    index: HashMap<String, usize>,
    top: usize,
}

impl HierNetlist {
    /// Wrap parsed models; the first one is the top. Validates that every
    /// `.subckt` references a defined model and connects existing ports.
    pub fn from_models(models: Vec<Model>, file: &str) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::parse(file, 1, "no .model in file"));
        }
        let mut index = HashMap::new();
        for (i, m) in models.iter().enumerate() {
            if index.insert(m.name.clone(), i).is_some() {
                return Err(Error::parse(file, 1, format!("duplicate model `{}`", m.name)));
            }
        }
        for m in &models {
            for sub in &m.subckts {
                let child = match index.get(&sub.model) {
                    Some(&c) => &models[c],
                    None => {
                        return Err(Error::parse(
                            file,
                            sub.line,
                            format!("subckt references undefined model `{}`", sub.model),
                        ))
                    }
                };
                for (port, _) in &sub.conns {
                    let known = child.inputs.iter().chain(child.outputs.iter());
                    if !known.into_iter().any(|p| p == port) {
                        return Err(Error::parse(
                            file,
                            sub.line,
                            format!("model `{}` has no port `{port}`", sub.model),
                        ));
                    }
                }
            }
        }
        Ok(HierNetlist {
            index,
            top: 0,
            models,
        })
    }

    /// Wrap a single flat model (no hierarchy checks needed beyond flatness).
    pub fn from_flat_model(model: Model) -> Self {
        debug_assert!(model.is_flat());
        let mut index = HashMap::new();
        index.insert(model.name.clone(), 0);
        HierNetlist {
            models: vec![model],
            index,
            top: 0,
        }
    }

    pub fn top_model(&self) -> &Model {
        &self.models[self.top]
    }

    pub fn model(&self, name: &str) -> Option<&Model> {
        self.index.get(name).map(|&i| &self.models[i])
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    /// True when the design is a single model without submodel instances.
    pub fn is_flat(&self) -> bool {
        self.models.len() == 1 && self.models[self.top].is_flat()
    }
}

//! Hierarchy flattening and depth partitioning.
//!
//! Flattening inlines every `.subckt` instance recursively. Instance-local
//! nets get a `path/` prefix where each path segment is `{model}_{ordinal}`
//! (ordinal = position among the parent's `.subckt` statements); nets bound
//! to instance ports take the parent-side net name.

use std::collections::{HashMap, HashSet};

use super::{HierNetlist, Model};
use crate::error::{Error, Result};

/// Result of [`HierNetlist::partition`]: named flat netlists plus any
/// depth-clamping warnings.
#[derive(Debug)]
pub struct PartitionSet {
    /// (instance path, flattened netlist) in instantiation order.
    pub partitions: Vec<(String, HierNetlist)>,
    pub warnings: Vec<String>,
}

impl HierNetlist {
    /// Flatten the whole design into a single model named after the top.
    pub fn flatten(&self) -> Result<HierNetlist> {
        let flat = self.flatten_model(self.top_model())?;
        Ok(HierNetlist::from_flat_model(flat))
    }

    /// One flattened netlist per model instance at exactly `depth` levels
    /// below the top (depth 0: the whole flattened design). An instance
    /// shallower than `depth` with no submodels is emitted as-is with a
    /// warning. Gates sitting above the requested depth belong to no
    /// partition.
    pub fn partition(&self, depth: usize) -> Result<PartitionSet> {
        let mut set = PartitionSet {
            partitions: Vec::new(),
            warnings: Vec::new(),
        };
        self.partition_walk(self.top_model(), self.top_model().name.clone(), depth, &mut set)?;
        Ok(set)
    }

    fn partition_walk(
        &self,
        model: &Model,
        path: String,
        depth: usize,
        set: &mut PartitionSet,
    ) -> Result<()> {
        if depth == 0 {
            let flat = self.flatten_model(model)?;
            set.partitions.push((path, HierNetlist::from_flat_model(flat)));
            return Ok(());
        }
        if model.subckts.is_empty() {
            set.warnings.push(format!(
                "partition depth exceeds hierarchy at `{path}`; emitting this instance whole"
            ));
            let flat = self.flatten_model(model)?;
            set.partitions.push((path, HierNetlist::from_flat_model(flat)));
            return Ok(());
        }
        for (ordinal, sub) in model.subckts.iter().enumerate() {
            let child = self
                .model(&sub.model)
                .ok_or_else(|| Error::Internal(format!("unresolved model `{}`", sub.model)))?;
            let seg = format!("{}_{ordinal}", sub.model);
            self.partition_walk(child, format!("{path}.{seg}"), depth - 1, set)?;
        }
        Ok(())
    }

    /// Flatten `root` (keeping its own ports as the primary I/O).
    fn flatten_model(&self, root: &Model) -> Result<Model> {
        let mut out = Model {
            name: root.name.clone(),
            inputs: root.inputs.clone(),
            outputs: root.outputs.clone(),
            ..Model::default()
        };
        // Net names already claimed; instance-local names must not collide
        // with them (possible when source nets contain '/').
        let mut used: HashSet<String> = root
            .inputs
            .iter()
            .chain(root.outputs.iter())
            .cloned()
            .collect();
        let mut stack = vec![root.name.clone()];
        self.inline_into(root, "", &HashMap::new(), &mut out, &mut used, &mut stack)?;
        Ok(out)
    }

    /// Copy `model`'s gates/latches into `out`, renaming nets, then recurse
    /// into its subckt instances.
    fn inline_into(
        &self,
        model: &Model,
        prefix: &str,
        portmap: &HashMap<String, String>,
        out: &mut Model,
        used: &mut HashSet<String>,
        stack: &mut Vec<String>,
    ) -> Result<()> {
        // Each distinct local net resolves exactly once so renames stay
        // consistent across all mentions within this instance.
        let mut resolved: HashMap<String, String> = HashMap::new();
        let resolve = |net: &str, used: &mut HashSet<String>, resolved: &mut HashMap<String, String>| {
            if let Some(parent_net) = portmap.get(net) {
                return parent_net.clone();
            }
            if let Some(name) = resolved.get(net) {
                return name.clone();
            }
            let mut name = if prefix.is_empty() {
                net.to_string()
            } else {
                format!("{prefix}/{net}")
            };
            if !prefix.is_empty() {
                while used.contains(&name) {
                    name.push_str("_f");
                }
            }
            used.insert(name.clone());
            resolved.insert(net.to_string(), name.clone());
            name
        };

        for gate in &model.gates {
            let mut copy = gate.clone();
            for (_, net) in copy.conns.iter_mut() {
                *net = resolve(net, used, &mut resolved);
            }
            out.gates.push(copy);
        }
        for latch in &model.latches {
            let mut copy = latch.clone();
            copy.input = resolve(&copy.input, used, &mut resolved);
            copy.output = resolve(&copy.output, used, &mut resolved);
            out.latches.push(copy);
        }
        for (ordinal, sub) in model.subckts.iter().enumerate() {
            let child = self
                .model(&sub.model)
                .ok_or_else(|| Error::Internal(format!("unresolved model `{}`", sub.model)))?;
            if stack.contains(&sub.model) {
                return Err(Error::parse(
                    "netlist",
                    sub.line,
                    format!("recursive instantiation of model `{}`", sub.model),
                ));
            }
            let seg = format!("{}_{ordinal}", sub.model);
            let child_prefix = if prefix.is_empty() {
                seg
            } else {
                format!("{prefix}/{seg}")
            };
            let mut child_ports: HashMap<String, String> = HashMap::new();
            for (port, net) in &sub.conns {
                let parent_net = resolve(net, used, &mut resolved);
                child_ports.insert(port.clone(), parent_net);
            }
            stack.push(sub.model.clone());
            self.inline_into(child, &child_prefix, &child_ports, out, used, stack)?;
            stack.pop();
        }
        Ok(())
    }
}

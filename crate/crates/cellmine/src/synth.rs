//! Reproducible synthetic benchmarks with planted patterns.
//!
//! A generated design is random combinational filler plus `occurrences`
//! isomorphic islands of a randomly shaped `pattern_size`-gate pattern,
//! shuffled into one gate list. Islands read only primary inputs from the
//! outside and nothing reads into them, so the planted structure is exactly
//! what a miner should find; the accompanying ground truth lists every
//! island's graph vertex ids for recovery scoring.
//!
//! Everything derives from one `seed` (byte-identical outputs per seed).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::library::CellLibrary;

/// Cell alphabet used by generated designs, with SPICE bodies so the whole
/// emission pipeline runs on synthetic benchmarks. `DFFX1` exists to give
/// libraries a sequential cell; the generator itself emits pure
/// combinational logic.
pub const BUILTIN_LIBRARY: &str = "\
# builtin synthetic-benchmark library
library acx_synth K=1.4
cell INVX1 area=1.0
  in A
  out Y
  spice <<EOF
.SUBCKT INVX1 A Y VDD VSS
MP0 Y A VDD VDD PMOS_VTL W=0.63u L=0.05u
MN0 Y A VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS INVX1
EOF
end
cell BUFX1 area=1.4
  in A
  out Y
  spice <<EOF
.SUBCKT BUFX1 A Y VDD VSS
MP0 nb A VDD VDD PMOS_VTL W=0.63u L=0.05u
MN0 nb A VSS VSS NMOS_VTL W=0.415u L=0.05u
MP1 Y nb VDD VDD PMOS_VTL W=0.945u L=0.05u
MN1 Y nb VSS VSS NMOS_VTL W=0.622u L=0.05u
.ENDS BUFX1
EOF
end
cell NAND2X1 area=1.6
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT NAND2X1 A B Y VDD VSS
MP0 Y A VDD VDD PMOS_VTL W=0.63u L=0.05u
MP1 Y B VDD VDD PMOS_VTL W=0.63u L=0.05u
MN0 Y A net1 VSS NMOS_VTL W=0.83u L=0.05u
MN1 net1 B VSS VSS NMOS_VTL W=0.83u L=0.05u
.ENDS NAND2X1
EOF
end
cell NOR2X1 area=1.6
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT NOR2X1 A B Y VDD VSS
MP0 net1 A VDD VDD PMOS_VTL W=1.26u L=0.05u
MP1 Y B net1 VDD PMOS_VTL W=1.26u L=0.05u
MN0 Y A VSS VSS NMOS_VTL W=0.415u L=0.05u
MN1 Y B VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS NOR2X1
EOF
end
cell AND2X2 area=2.2
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT AND2X2 A B Y VDD VSS
MP0 ny A VDD VDD PMOS_VTL W=0.63u L=0.05u
MP1 ny B VDD VDD PMOS_VTL W=0.63u L=0.05u
MN0 ny A net1 VSS NMOS_VTL W=0.83u L=0.05u
MN1 net1 B VSS VSS NMOS_VTL W=0.83u L=0.05u
MP2 Y ny VDD VDD PMOS_VTL W=1.26u L=0.05u
MN2 Y ny VSS VSS NMOS_VTL W=0.83u L=0.05u
.ENDS AND2X2
EOF
end
cell OR2X1 area=2.0
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT OR2X1 A B Y VDD VSS
MP0 net1 A VDD VDD PMOS_VTL W=1.26u L=0.05u
MP1 ny B net1 VDD PMOS_VTL W=1.26u L=0.05u
MN0 ny A VSS VSS NMOS_VTL W=0.415u L=0.05u
MN1 ny B VSS VSS NMOS_VTL W=0.415u L=0.05u
MP2 Y ny VDD VDD PMOS_VTL W=0.63u L=0.05u
MN2 Y ny VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS OR2X1
EOF
end
cell NOR3X1 area=2.4
  in A B C
  out Y
  equiv A B C
  spice <<EOF
.SUBCKT NOR3X1 A B C Y VDD VSS
MP0 net1 A VDD VDD PMOS_VTL W=1.89u L=0.05u
MP1 net2 B net1 VDD PMOS_VTL W=1.89u L=0.05u
MP2 Y C net2 VDD PMOS_VTL W=1.89u L=0.05u
MN0 Y A VSS VSS NMOS_VTL W=0.415u L=0.05u
MN1 Y B VSS VSS NMOS_VTL W=0.415u L=0.05u
MN2 Y C VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS NOR3X1
EOF
end
cell OR3X1 area=2.8
  in A B C
  out Y
  equiv A B C
  spice <<EOF
.SUBCKT OR3X1 A B C Y VDD VSS
MP0 net1 A VDD VDD PMOS_VTL W=1.89u L=0.05u
MP1 net2 B net1 VDD PMOS_VTL W=1.89u L=0.05u
MP2 ny C net2 VDD PMOS_VTL W=1.89u L=0.05u
MN0 ny A VSS VSS NMOS_VTL W=0.415u L=0.05u
MN1 ny B VSS VSS NMOS_VTL W=0.415u L=0.05u
MN2 ny C VSS VSS NMOS_VTL W=0.415u L=0.05u
MP3 Y ny VDD VDD PMOS_VTL W=0.63u L=0.05u
MN3 Y ny VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS OR3X1
EOF
end
cell AOI21X1 area=2.0
  in A B C
  out Y
  equiv A B
  spice <<EOF
.SUBCKT AOI21X1 A B C Y VDD VSS
MP0 net1 A VDD VDD PMOS_VTL W=1.26u L=0.05u
MP1 net1 B VDD VDD PMOS_VTL W=1.26u L=0.05u
MP2 Y C net1 VDD PMOS_VTL W=1.26u L=0.05u
MN0 Y A net2 VSS NMOS_VTL W=0.83u L=0.05u
MN1 net2 B VSS VSS NMOS_VTL W=0.83u L=0.05u
MN2 Y C VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS AOI21X1
EOF
end
cell DFFX1 area=6.2 seq
  in D CK
  out Q
  spice <<EOF
.SUBCKT DFFX1 D CK Q VDD VSS
MP0 nck CK VDD VDD PMOS_VTL W=0.63u L=0.05u
MN0 nck CK VSS VSS NMOS_VTL W=0.415u L=0.05u
MP1 m D VDD VDD PMOS_VTL W=0.63u L=0.05u
MN1 m nck VSS VSS NMOS_VTL W=0.415u L=0.05u
MP2 Q m VDD VDD PMOS_VTL W=0.63u L=0.05u
MN2 Q m VSS VSS NMOS_VTL W=0.415u L=0.05u
.ENDS DFFX1
EOF
end
";

/// Parse [`BUILTIN_LIBRARY`].
pub fn builtin_library() -> CellLibrary {
    CellLibrary::parse(BUILTIN_LIBRARY, "builtin.acx").expect("builtin library parses")
}

/// What to generate. `vertices` counts gates (all combinational).
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub seed: u64,
    pub vertices: usize,
    pub pattern_size: usize,
    pub occurrences: usize,
}

impl SynthSpec {
    pub fn new(seed: u64, vertices: usize, pattern_size: usize, occurrences: usize) -> Self {
        SynthSpec {
            seed,
            vertices,
            pattern_size,
            occurrences,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vertices == 0 {
            return Err(Error::Config("vertex budget must be positive".into()));
        }
        if self.pattern_size < 2 {
            return Err(Error::Config(
                "planted patterns need at least two gates".into(),
            ));
        }
        if self.occurrences == 0 {
            return Err(Error::Config("need at least one occurrence".into()));
        }
        let planted = self.pattern_size * self.occurrences;
        if planted > self.vertices {
            return Err(Error::Config(format!(
                "{} occurrences of a size-{} pattern need {planted} gates, \
                 over the {}-vertex budget",
                self.occurrences, self.pattern_size, self.vertices
            )));
        }
        Ok(())
    }
}

/// Where the planted occurrences ended up, for recovery scoring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub vertices: usize,
    pub pattern_size: usize,
    pub occurrences: usize,
    pub planted_coverage_pct: f64,
    /// Cell type per in-pattern position.
    pub pattern_cells: Vec<String>,
    /// Graph vertex id (= gate ordinal) per occurrence, per position.
    pub occurrence_vertices: Vec<Vec<u32>>,
}

impl GroundTruth {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// A generated benchmark: BLIF text, library text, and ground truth.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub blif: String,
    pub library: String,
    pub ground_truth: GroundTruth,
}

/// Where one input pin of a pattern gate reads from.
#[derive(Debug, Clone, Copy)]
enum PinSrc {
    /// Output of the island gate at this position.
    Island(usize),
    /// A primary input, chosen per occurrence.
    Input,
}

/// The shared shape of all planted islands: cells plus per-pin sources.
struct Shape {
    cells: Vec<String>,
    wiring: Vec<Vec<(String, PinSrc)>>,
}

/// Generate the benchmark for `spec`.
pub fn generate(spec: &SynthSpec) -> Result<Synthetic> {
    spec.validate()?;
    let lib = builtin_library();
    let comb: Vec<&str> = lib
        .cells()
        .filter(|c| !c.sequential)
        .map(|c| c.name.as_str())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Island shape: a random connected DAG over `pattern_size` gates. Every
    // position past the first reads at least one earlier island output, so
    // each occurrence is one connected cluster.
    let shape = {
        let mut cells = Vec::with_capacity(spec.pattern_size);
        let mut wiring = Vec::with_capacity(spec.pattern_size);
        for pos in 0..spec.pattern_size {
            let cell = lib.get(comb[rng.gen_range(0..comb.len())])?;
            let mut pins: Vec<(String, PinSrc)> = cell
                .inputs
                .iter()
                .map(|p| (p.clone(), PinSrc::Input))
                .collect();
            if pos > 0 {
                let backbone = rng.gen_range(0..pins.len());
                for (i, pin) in pins.iter_mut().enumerate() {
                    if i == backbone {
                        pin.1 = PinSrc::Island(rng.gen_range(0..pos));
                    } else if rng.gen_bool(0.35) {
                        pin.1 = PinSrc::Island(rng.gen_range(0..pos));
                    }
                }
            }
            cells.push(cell.name.clone());
            wiring.push(pins);
        }
        Shape { cells, wiring }
    };

    let n_filler = spec.vertices - spec.pattern_size * spec.occurrences;
    let n_inputs = (spec.vertices / 20).max(4);
    let inputs: Vec<String> = (0..n_inputs).map(|i| format!("pi{i}")).collect();

    // Filler gates read primary inputs and earlier filler outputs only;
    // island pins read island outputs or primary inputs only. Wiring is
    // acyclic by construction and the two worlds never touch, so the
    // planted structure survives verbatim.
    #[derive(Clone, Copy)]
    enum Slot {
        Filler(usize),
        Island { occ: usize, pos: usize },
    }
    let mut slots: Vec<Slot> = Vec::with_capacity(spec.vertices);
    slots.extend((0..n_filler).map(Slot::Filler));
    for occ in 0..spec.occurrences {
        slots.extend((0..spec.pattern_size).map(move |pos| Slot::Island { occ, pos }));
    }
    slots.shuffle(&mut rng);

    let filler_cells: Vec<&str> = (0..n_filler)
        .map(|_| comb[rng.gen_range(0..comb.len())])
        .collect();

    let mut gates: Vec<(String, Vec<(String, String)>)> = Vec::with_capacity(spec.vertices);
    let mut occurrence_vertices = vec![vec![0u32; spec.pattern_size]; spec.occurrences];
    let mut filler_nets: Vec<String> = Vec::new();
    let mut readers: std::collections::HashSet<String> = std::collections::HashSet::new();
    for (ordinal, slot) in slots.iter().enumerate() {
        match *slot {
            Slot::Filler(k) => {
                let cell = lib.get(filler_cells[k])?;
                let mut conns: Vec<(String, String)> = Vec::new();
                for pin in &cell.inputs {
                    let net = if filler_nets.is_empty() || rng.gen_bool(0.25) {
                        inputs[rng.gen_range(0..inputs.len())].clone()
                    } else {
                        filler_nets[rng.gen_range(0..filler_nets.len())].clone()
                    };
                    readers.insert(net.clone());
                    conns.push((pin.clone(), net));
                }
                let out = format!("n{k}");
                conns.push((cell.outputs[0].clone(), out.clone()));
                filler_nets.push(out);
                gates.push((cell.name.clone(), conns));
            }
            Slot::Island { occ, pos } => {
                occurrence_vertices[occ][pos] = ordinal as u32;
                let cell = lib.get(&shape.cells[pos])?;
                let mut conns: Vec<(String, String)> = Vec::new();
                for (pin, src) in &shape.wiring[pos] {
                    let net = match src {
                        PinSrc::Island(p) => format!("w{occ}_{p}"),
                        PinSrc::Input => inputs[rng.gen_range(0..inputs.len())].clone(),
                    };
                    readers.insert(net.clone());
                    conns.push((pin.clone(), net));
                }
                conns.push((cell.outputs[0].clone(), format!("w{occ}_{pos}")));
                gates.push((cell.name.clone(), conns));
            }
        }
    }

    let mut blif = String::new();
    let _ = writeln!(blif, ".model synth_s{}", spec.seed);
    let _ = writeln!(blif, ".inputs {}", inputs.join(" "));
    let outputs: Vec<&str> = gates
        .iter()
        .map(|(_, conns)| conns.last().expect("output pin").1.as_str())
        .filter(|net| !readers.contains(*net))
        .collect();
    let _ = writeln!(blif, ".outputs {}", outputs.join(" "));
    for (cell, conns) in &gates {
        let _ = write!(blif, ".gate {cell}");
        for (pin, net) in conns {
            let _ = write!(blif, " {pin}={net}");
        }
        blif.push('\n');
    }
    blif.push_str(".end\n");

    Ok(Synthetic {
        blif,
        library: BUILTIN_LIBRARY.to_string(),
        ground_truth: GroundTruth {
            seed: spec.seed,
            vertices: spec.vertices,
            pattern_size: spec.pattern_size,
            occurrences: spec.occurrences,
            planted_coverage_pct: 100.0 * (spec.pattern_size * spec.occurrences) as f64
                / spec.vertices as f64,
            pattern_cells: shape.cells.clone(),
            occurrence_vertices,
        },
    })
}

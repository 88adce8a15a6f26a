//! Standard-cell library model and parser.
//!
//! The library file is line oriented:
//!
//! ```text
//! # comment
//! library lib45 K=1.25
//! cell OR2X1 area=1.5
//!   in A B
//!   out Y
//!   equiv A B
//!   spice <<EOF
//! .SUBCKT OR2X1 A B Y
//! ...
//! .ENDS
//! EOF
//! end
//! ```
//!
//! `equiv` declares functionally interchangeable input pins; the canonical
//! representative of a class is its lexicographically smallest member. Pins
//! not named in any `equiv` line form singleton classes. `seq` on the `cell`
//! line marks sequential cells (flip-flops, latches), which pattern mining
//! skips.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::process::Command;

use crate::error::{Error, Result};

/// One cell type: pins, pin-equivalence classes, area, optional SPICE body.
#[derive(Debug, Clone)]
pub struct CellType {
    pub name: String,
    /// Input pins in declaration order.
    pub inputs: Vec<String>,
    /// Output pins in declaration order.
    pub outputs: Vec<String>,
    /// Equivalence classes over input pins, each sorted, ordered by representative.
    /// Every input pin appears in exactly one class (singletons included).
    pub equiv_classes: Vec<Vec<String>>,
    pub area: f64,
    pub sequential: bool,
    /// Verbatim SPICE subcircuit body, if the library carries one.
    pub spice: Option<String>,
    /// pin -> canonical representative (identity for outputs).
    canon: HashMap<String, String>,
}

impl CellType {
    /// Construct a cell directly (used for generated custom cells).
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        equiv: Vec<Vec<String>>,
        area: f64,
        sequential: bool,
        spice: Option<String>,
    ) -> Result<CellType> {
        let name = name.into();
        build_cell(name.clone(), area, sequential, inputs, outputs, equiv, spice)
            .map_err(|msg| Error::Config(format!("cell {name}: {msg}")))
    }

    /// Canonical name for `pin`: the smallest member of its equivalence class.
    /// Output pins map to themselves.
    pub fn canonical_pin(&self, pin: &str) -> Result<&str> {
        self.canon
            .get(pin)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::UnknownPin {
                cell: self.name.clone(),
                pin: pin.to_string(),
            })
    }

    pub fn is_input(&self, pin: &str) -> bool {
        self.inputs.iter().any(|p| p == pin)
    }

    pub fn is_output(&self, pin: &str) -> bool {
        self.outputs.iter().any(|p| p == pin)
    }

    /// The equivalence class containing `pin` (inputs only).
    pub fn class_of(&self, pin: &str) -> Option<&[String]> {
        self.equiv_classes
            .iter()
            .find(|c| c.iter().any(|p| p == pin))
            .map(|c| c.as_slice())
    }
}

/// A parsed cell library.
#[derive(Debug, Clone)]
pub struct CellLibrary {
    pub name: String,
    /// Per-merge area constant from the header; default K for the linear area model.
    pub k: f64,
    cells: BTreeMap<String, CellType>,
}

impl CellLibrary {
    pub fn new(name: impl Into<String>, k: f64) -> Self {
        CellLibrary {
            name: name.into(),
            k,
            cells: BTreeMap::new(),
        }
    }

    /// Parse library text. `file` is used in error messages only.
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        Parser::new(text, file).run()
    }

    pub fn get(&self, name: &str) -> Result<&CellType> {
        self.cells
            .get(name)
            .ok_or_else(|| Error::UnknownCell(name.to_string()))
    }

    pub fn cell(&self, name: &str) -> Option<&CellType> {
        self.cells.get(name)
    }

    /// Cells in name order.
    pub fn cells(&self) -> impl Iterator<Item = &CellType> {
        self.cells.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Add a cell, rejecting duplicates.
    pub fn add_cell(&mut self, cell: CellType) -> Result<()> {
        if self.cells.contains_key(&cell.name) {
            return Err(Error::Config(format!("duplicate cell `{}`", cell.name)));
        }
        self.cells.insert(cell.name.clone(), cell);
        Ok(())
    }

    /// Render back to library-file syntax (used for extension files).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "library {} K={}", self.name, self.k);
        for cell in self.cells.values() {
            let seq = if cell.sequential { " seq" } else { "" };
            let _ = writeln!(out, "cell {} area={}{}", cell.name, cell.area, seq);
            if !cell.inputs.is_empty() {
                let _ = writeln!(out, "  in {}", cell.inputs.join(" "));
            }
            if !cell.outputs.is_empty() {
                let _ = writeln!(out, "  out {}", cell.outputs.join(" "));
            }
            for class in &cell.equiv_classes {
                if class.len() > 1 {
                    let _ = writeln!(out, "  equiv {}", class.join(" "));
                }
            }
            if let Some(spice) = &cell.spice {
                let _ = writeln!(out, "  spice <<EOF");
                let _ = writeln!(out, "{}", spice.trim_end_matches('\n'));
                let _ = writeln!(out, "EOF");
            }
            let _ = writeln!(out, "end");
        }
        out
    }
}

/// Build the pin->canonical map and normalize equivalence classes.
///
/// `declared` holds the `equiv` lines as written; singleton classes are added
/// for unmentioned input pins. Returns classes sorted internally and ordered
/// by representative.
fn normalize_classes(
    inputs: &[String],
    declared: &[Vec<String>],
) -> std::result::Result<Vec<Vec<String>>, String> {
    let mut assigned: HashMap<&str, usize> = HashMap::new();
    let mut classes: Vec<Vec<String>> = Vec::new();
    for class in declared {
        if class.len() < 2 {
            return Err("equiv needs at least two pins".into());
        }
        let mut sorted = class.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != class.len() {
            return Err("equiv lists a pin twice".into());
        }
        for pin in &sorted {
            if !inputs.iter().any(|p| p == pin) {
                return Err(format!("equiv names undeclared input pin `{pin}`"));
            }
            if assigned.contains_key(pin.as_str()) {
                return Err(format!("pin `{pin}` appears in two equiv classes"));
            }
        }
        for pin in &sorted {
            let owned: &str = inputs.iter().find(|p| *p == pin).unwrap();
            assigned.insert(owned, classes.len());
        }
        classes.push(sorted);
    }
    for pin in inputs {
        if !assigned.contains_key(pin.as_str()) {
            classes.push(vec![pin.clone()]);
        }
    }
    classes.sort_by(|a, b| a[0].cmp(&b[0]));
    Ok(classes)
}

fn build_cell(
    name: String,
    area: f64,
    sequential: bool,
    inputs: Vec<String>,
    outputs: Vec<String>,
    declared_classes: Vec<Vec<String>>,
    spice: Option<String>,
) -> std::result::Result<CellType, String> {
    let mut seen: HashMap<&str, &str> = HashMap::new();
    for pin in inputs.iter().chain(outputs.iter()) {
        if seen.insert(pin, pin).is_some() {
            return Err(format!("pin `{pin}` declared twice"));
        }
    }
    if !(area > 0.0) {
        return Err(format!("area must be positive, got {area}"));
    }
    let equiv_classes = normalize_classes(&inputs, &declared_classes)?;
    let mut canon = HashMap::new();
    for class in &equiv_classes {
        for pin in class {
            canon.insert(pin.clone(), class[0].clone());
        }
    }
    for pin in &outputs {
        canon.insert(pin.clone(), pin.clone());
    }
    Ok(CellType {
        name,
        inputs,
        outputs,
        equiv_classes,
        area,
        sequential,
        spice,
        canon,
    })
}

/// Line-oriented parser with heredoc support for `spice <<TOK` blocks.
struct Parser<'a> {
    lines: Vec<&'a str>,
    file: &'a str,
    pos: usize,
}

/// Fields of a `cell` block under construction.
#[derive(Default)]
struct CellDraft {
    name: String,
    area: f64,
    sequential: bool,
    line: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    classes: Vec<Vec<String>>,
    spice: Option<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, file: &'a str) -> Self {
        Parser {
            lines: text.lines().collect(),
            file,
            pos: 0,
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::parse(self.file, line, msg)
    }

    /// Next significant line as (1-based line number, comment-stripped text).
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let raw = self.lines[self.pos];
            self.pos += 1;
            let text = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let text = text.trim();
            if !text.is_empty() {
                return Some((self.pos, text));
            }
        }
        None
    }

    fn run(mut self) -> Result<CellLibrary> {
        let (line, header) = self
            .next_line()
            .ok_or_else(|| self.err(1, "empty library file"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("library") {
            return Err(self.err(line, "expected `library <name> K=<float>` header"));
        }
        let name = parts
            .next()
            .ok_or_else(|| self.err(line, "library header missing name"))?;
        let k_field = parts
            .next()
            .ok_or_else(|| self.err(line, "library header missing K=<float>"))?;
        let k: f64 = k_field
            .strip_prefix("K=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| self.err(line, format!("bad K field `{k_field}`")))?;
        if !(k >= 0.0) {
            return Err(self.err(line, format!("K must be non-negative, got {k}")));
        }

        let mut lib = CellLibrary::new(name, k);
        let mut first_decl: HashMap<String, usize> = HashMap::new();
        while let Some((line, text)) = self.next_line() {
            let mut parts = text.split_whitespace();
            match parts.next() {
                Some("cell") => {
                    let draft = self.parse_cell(line, text)?;
                    if let Some(&prev) = first_decl.get(&draft.name) {
                        return Err(self.err(
                            draft.line,
                            format!("duplicate cell `{}` (first declared at line {prev})", draft.name),
                        ));
                    }
                    first_decl.insert(draft.name.clone(), draft.line);
                    let cell = build_cell(
                        draft.name,
                        draft.area,
                        draft.sequential,
                        draft.inputs,
                        draft.outputs,
                        draft.classes,
                        draft.spice,
                    )
                    .map_err(|m| self.err(line, m))?;
                    lib.add_cell(cell)?;
                }
                Some(other) => {
                    return Err(self.err(line, format!("expected `cell`, got `{other}`")));
                }
                None => unreachable!("next_line skips blanks"),
            }
        }
        Ok(lib)
    }

    fn parse_cell(&mut self, line: usize, text: &str) -> Result<CellDraft> {
        let mut parts = text.split_whitespace().skip(1);
        let name = parts
            .next()
            .ok_or_else(|| self.err(line, "cell missing name"))?
            .to_string();
        let area_field = parts
            .next()
            .ok_or_else(|| self.err(line, "cell missing area=<float>"))?;
        let area: f64 = area_field
            .strip_prefix("area=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| self.err(line, format!("bad area field `{area_field}`")))?;
        let mut sequential = false;
        for extra in parts {
            match extra {
                "seq" => sequential = true,
                other => return Err(self.err(line, format!("unknown cell attribute `{other}`"))),
            }
        }
        let mut draft = CellDraft {
            name,
            area,
            sequential,
            line,
            ..CellDraft::default()
        };
        loop {
            let (line, text) = self
                .next_line()
                .ok_or_else(|| self.err(self.lines.len(), format!("cell `{}` missing `end`", draft.name)))?;
            let mut parts = text.split_whitespace();
            match parts.next() {
                Some("in") => draft.inputs.extend(parts.map(str::to_string)),
                Some("out") => draft.outputs.extend(parts.map(str::to_string)),
                Some("equiv") => draft.classes.push(parts.map(str::to_string).collect()),
                Some("spice") => {
                    let tok = parts
                        .next()
                        .and_then(|t| t.strip_prefix("<<"))
                        .ok_or_else(|| self.err(line, "expected `spice <<TOKEN`"))?;
                    if draft.spice.is_some() {
                        return Err(self.err(line, "cell has two spice blocks"));
                    }
                    draft.spice = Some(self.read_heredoc(line, tok)?);
                }
                Some("end") => return Ok(draft),
                Some(other) => {
                    return Err(self.err(line, format!("unknown directive `{other}` in cell body")))
                }
                None => unreachable!(),
            }
        }
    }

    /// Read raw lines (no comment stripping) until one equals `tok`.
    fn read_heredoc(&mut self, start: usize, tok: &str) -> Result<String> {
        let mut body = String::new();
        while self.pos < self.lines.len() {
            let raw = self.lines[self.pos];
            self.pos += 1;
            if raw.trim() == tok {
                return Ok(body);
            }
            body.push_str(raw);
            body.push('\n');
        }
        Err(self.err(start, format!("unterminated spice block (missing `{tok}`)")))
    }
}

/// How to estimate the silicon area of a merged cell.
#[derive(Debug, Clone)]
pub enum AreaModel {
    /// `sum(areas) - K * n`: every merged gate saves a fixed overhead K
    /// (shared well/rail/spacing), clamped at zero.
    Linear { k: f64 },
    /// `alpha * sum(areas)` with `0 < alpha <= 1`.
    SumScaled { alpha: f64 },
    /// Shell command template; `{spice}` is replaced with the path to the
    /// merged cell's SPICE file and stdout is parsed as the area.
    External { command: String },
}

impl AreaModel {
    pub fn linear(k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::Config(format!("linear area model needs K >= 0, got {k}")));
        }
        Ok(AreaModel::Linear { k })
    }

    pub fn sum_scaled(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!(
                "sum_scaled area model needs 0 < alpha <= 1, got {alpha}"
            )));
        }
        Ok(AreaModel::SumScaled { alpha })
    }

    /// Estimated area of a cell merging `members`.
    ///
    /// `spice_path` is required by the `External` variant and ignored otherwise.
    pub fn merged_area(&self, members: &[&CellType], spice_path: Option<&str>) -> Result<f64> {
        if members.is_empty() {
            return Err(Error::Config("merged cell needs at least one member".into()));
        }
        let sum: f64 = members.iter().map(|c| c.area).sum();
        match self {
            AreaModel::Linear { k } => Ok((sum - k * members.len() as f64).max(0.0)),
            AreaModel::SumScaled { alpha } => Ok(alpha * sum),
            AreaModel::External { command } => {
                let path = spice_path.ok_or_else(|| {
                    Error::Config("external area model needs a SPICE file path".into())
                })?;
                let cmd = command.replace("{spice}", path);
                let out = Command::new("sh")
                    .arg("-c")
                    .arg(&cmd)
                    .output()
                    .map_err(|e| Error::External(format!("{cmd}: {e}")))?;
                if !out.status.success() {
                    return Err(Error::External(format!(
                        "{cmd}: exit {:?}: {}",
                        out.status.code(),
                        String::from_utf8_lossy(&out.stderr).trim()
                    )));
                }
                let text = String::from_utf8_lossy(&out.stdout);
                let first = text.split_whitespace().next().unwrap_or("");
                first
                    .parse::<f64>()
                    .map_err(|_| Error::External(format!("{cmd}: unparseable area `{first}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# tiny library
library lib45 K=1.25
cell INVX1 area=1.0
  in A
  out Y
end
cell OR2X1 area=1.5
  in A B
  out Y
  equiv A B
  spice <<EOF
.SUBCKT OR2X1 A B Y
M1 Y A net1 VDD pmos
.ENDS
EOF
end
cell DFFX1 area=4.0 seq
  in D CK
  out Q
end
";

    #[test]
    fn parses_sample() {
        let lib = CellLibrary::parse(SAMPLE, "lib").unwrap();
        assert_eq!(lib.name, "lib45");
        assert_eq!(lib.k, 1.25);
        assert_eq!(lib.len(), 3);
        let or2 = lib.get("OR2X1").unwrap();
        assert_eq!(or2.inputs, ["A", "B"]);
        assert_eq!(or2.outputs, ["Y"]);
        assert_eq!(or2.area, 1.5);
        assert!(!or2.sequential);
        assert!(or2.spice.as_deref().unwrap().contains(".SUBCKT OR2X1 A B Y"));
        assert!(lib.get("DFFX1").unwrap().sequential);
    }

    #[test]
    fn canonical_pin_uses_smallest_class_member() {
        let lib = CellLibrary::parse(SAMPLE, "lib").unwrap();
        let or2 = lib.get("OR2X1").unwrap();
        assert_eq!(or2.canonical_pin("B").unwrap(), "A");
        assert_eq!(or2.canonical_pin("A").unwrap(), "A");
        assert_eq!(or2.canonical_pin("Y").unwrap(), "Y");
        // Idempotent: canon(canon(p)) == canon(p).
        let c = or2.canonical_pin("B").unwrap();
        assert_eq!(or2.canonical_pin(c).unwrap(), c);
        assert!(or2.canonical_pin("Z").is_err());
        // Pins outside any equiv line are their own class.
        let inv = lib.get("INVX1").unwrap();
        assert_eq!(inv.canonical_pin("A").unwrap(), "A");
        assert_eq!(inv.equiv_classes, vec![vec!["A".to_string()]]);
    }

    #[test]
    fn duplicate_cell_reports_both_lines() {
        let text = "library l K=1\ncell X area=1\nin A\nout Y\nend\ncell X area=2\nin A\nout Y\nend\n";
        let err = CellLibrary::parse(text, "lib").unwrap_err().to_string();
        assert!(err.contains("duplicate cell `X`"), "{err}");
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("lib:6"), "{err}");
    }

    #[test]
    fn rejects_bad_equiv() {
        let undeclared = "library l K=1\ncell X area=1\nin A\nout Y\nequiv A Z\nend\n";
        let err = CellLibrary::parse(undeclared, "lib").unwrap_err().to_string();
        assert!(err.contains("undeclared input pin `Z`"), "{err}");

        // Output pins cannot be equivalenced.
        let output = "library l K=1\ncell X area=1\nin A\nout Y Z\nequiv Y Z\nend\n";
        assert!(CellLibrary::parse(output, "lib").is_err());

        let overlap = "library l K=1\ncell X area=1\nin A B C\nout Y\nequiv A B\nequiv B C\nend\n";
        let err = CellLibrary::parse(overlap, "lib").unwrap_err().to_string();
        assert!(err.contains("two equiv classes"), "{err}");
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(CellLibrary::parse("", "lib").is_err());
        assert!(CellLibrary::parse("library l\n", "lib").is_err()); // no K
        assert!(CellLibrary::parse("cell X area=1\nend\n", "lib").is_err()); // no header
        let no_end = "library l K=1\ncell X area=1\nin A\n";
        let err = CellLibrary::parse(no_end, "lib").unwrap_err().to_string();
        assert!(err.contains("missing `end`"), "{err}");
        let bad_area = "library l K=1\ncell X area=-2\nin A\nout Y\nend\n";
        assert!(CellLibrary::parse(bad_area, "lib").is_err());
        let dup_pin = "library l K=1\ncell X area=1\nin A A\nout Y\nend\n";
        assert!(CellLibrary::parse(dup_pin, "lib").is_err());
        let bad_spice = "library l K=1\ncell X area=1\nin A\nout Y\nspice <<EOF\nbody\nend\n";
        let err = CellLibrary::parse(bad_spice, "lib").unwrap_err().to_string();
        assert!(err.contains("unterminated spice block"), "{err}");
    }

    #[test]
    fn spice_body_keeps_hash_lines() {
        // '#' must not start a comment inside a heredoc.
        let text = "library l K=1\ncell X area=1\nin A\nout Y\nspice <<END\n* stage # 1\nEND\nend\n";
        let lib = CellLibrary::parse(text, "lib").unwrap();
        assert_eq!(lib.get("X").unwrap().spice.as_deref(), Some("* stage # 1\n"));
    }

    #[test]
    fn round_trips_through_to_text() {
        let lib = CellLibrary::parse(SAMPLE, "lib").unwrap();
        let text = lib.to_text();
        let reparsed = CellLibrary::parse(&text, "lib2").unwrap();
        assert_eq!(reparsed.name, lib.name);
        assert_eq!(reparsed.k, lib.k);
        assert_eq!(reparsed.len(), lib.len());
        let a = lib.get("OR2X1").unwrap();
        let b = reparsed.get("OR2X1").unwrap();
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.equiv_classes, b.equiv_classes);
        assert_eq!(a.spice, b.spice);
        assert_eq!(reparsed.to_text(), text);
    }

    #[test]
    fn merged_area_models() {
        let lib = CellLibrary::parse(SAMPLE, "lib").unwrap();
        let inv = lib.get("INVX1").unwrap();
        let or2 = lib.get("OR2X1").unwrap();

        // linear: 1.0 + 1.5 + 1.5 - 1.25 * 3 = 0.25
        let linear = AreaModel::linear(lib.k).unwrap();
        let got = linear.merged_area(&[inv, or2, or2], None).unwrap();
        assert!((got - 0.25).abs() < 1e-12, "{got}");
        // Clamped at zero when overhead savings exceed the raw sum.
        let big_k = AreaModel::linear(5.0).unwrap();
        assert_eq!(big_k.merged_area(&[inv, or2], None).unwrap(), 0.0);

        // sum_scaled: 0.8 * 2.5 = 2.0
        let scaled = AreaModel::sum_scaled(0.8).unwrap();
        let got = scaled.merged_area(&[inv, or2], None).unwrap();
        assert!((got - 2.0).abs() < 1e-12, "{got}");

        assert!(AreaModel::linear(-1.0).is_err());
        assert!(AreaModel::sum_scaled(0.0).is_err());
        assert!(AreaModel::sum_scaled(1.5).is_err());
        assert!(linear.merged_area(&[], None).is_err());
    }

    #[test]
    fn external_area_model_runs_command() {
        let model = AreaModel::External {
            command: "printf '%s ignored' 7.5 # {spice}".into(),
        };
        let got = model.merged_area(
            &[&build_cell("C".into(), 1.0, false, vec!["A".into()], vec!["Y".into()], vec![], None).unwrap()],
            Some("/tmp/x.sp"),
        );
        assert_eq!(got.unwrap(), 7.5);

        let failing = AreaModel::External { command: "false".into() };
        assert!(failing
            .merged_area(
                &[&build_cell("C".into(), 1.0, false, vec![], vec!["Y".into()], vec![], None).unwrap()],
                Some("x")
            )
            .is_err());
    }

    /// Recover K from (member count, raw sum, merged area) samples by least
    /// squares and check it matches the K the model was built with.
    #[test]
    fn linear_model_k_is_recoverable() {
        let k = 1.25;
        let model = AreaModel::linear(k).unwrap();
        let mk = |name: &str, area: f64| {
            build_cell(name.into(), area, false, vec!["A".into()], vec!["Y".into()], vec![], None).unwrap()
        };
        let cells: Vec<CellType> =
            [("a", 2.0), ("b", 1.5), ("c", 2.25), ("d", 4.0)].iter().map(|(n, a)| mk(n, a * 1.0)).collect();
        let sets: Vec<Vec<&CellType>> = vec![
            vec![&cells[0], &cells[1]],
            vec![&cells[0], &cells[1], &cells[2]],
            vec![&cells[2], &cells[3]],
            vec![&cells[0], &cells[1], &cells[2], &cells[3]],
        ];
        // merged = sum - K*n, so K = (sum - merged) / n per sample; least
        // squares over samples: K = sum_i n_i*(sum_i - merged_i) / sum_i n_i^2.
        let mut num = 0.0;
        let mut den = 0.0;
        for set in &sets {
            let n = set.len() as f64;
            let sum: f64 = set.iter().map(|c| c.area).sum();
            let merged = model.merged_area(set, None).unwrap();
            assert!(merged > 0.0, "sample must not clamp");
            num += n * (sum - merged);
            den += n * n;
        }
        let fitted = num / den;
        assert!((fitted - k).abs() < 1e-9, "fitted {fitted}");
    }
}

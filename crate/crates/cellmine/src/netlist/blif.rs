//! BLIF subset parser and writer.
//!
//! Supported statements: `.model`, `.inputs`, `.outputs`, `.gate`, `.subckt`,
//! `.latch`, `.end`. `#` starts a comment; a trailing `\` continues the
//! logical line. `.names` is rejected: it means the netlist still contains
//! unmapped logic.

use std::fmt::Write as _;

use super::{GateInst, HierNetlist, Latch, Model, SubcktInst};
use crate::error::{Error, Result};

/// Parse BLIF text. `file` is used in error messages only.
pub fn parse_blif(text: &str, file: &str) -> Result<HierNetlist> {
    let mut models: Vec<Model> = Vec::new();
    let mut current: Option<Model> = None;

    for (line_no, line) in logical_lines(text) {
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("logical_lines skips blanks");
        let rest: Vec<&str> = tokens.collect();
        let err = |msg: String| Error::parse(file, line_no, msg);

        match head {
            ".model" => {
                if current.is_some() {
                    return Err(err("previous model missing .end".into()));
                }
                let name = rest.first().ok_or_else(|| err(".model missing name".into()))?;
                current = Some(Model {
                    name: name.to_string(),
                    ..Model::default()
                });
            }
            ".end" => {
                let model = current.take().ok_or_else(|| err(".end outside a model".into()))?;
                models.push(model);
            }
            ".inputs" | ".outputs" => {
                let model = current
                    .as_mut()
                    .ok_or_else(|| err(format!("{head} outside a model")))?;
                let list = if head == ".inputs" {
                    &mut model.inputs
                } else {
                    &mut model.outputs
                };
                list.extend(rest.iter().map(|s| s.to_string()));
            }
            ".gate" => {
                let model = current
                    .as_mut()
                    .ok_or_else(|| err(".gate outside a model".into()))?;
                let cell = rest.first().ok_or_else(|| err(".gate missing cell name".into()))?;
                let conns = parse_conns(&rest[1..], file, line_no)?;
                model.gates.push(GateInst {
                    cell: cell.to_string(),
                    conns,
                    line: line_no,
                });
            }
            ".subckt" => {
                let model = current
                    .as_mut()
                    .ok_or_else(|| err(".subckt outside a model".into()))?;
                let child = rest
                    .first()
                    .ok_or_else(|| err(".subckt missing model name".into()))?;
                let conns = parse_conns(&rest[1..], file, line_no)?;
                model.subckts.push(SubcktInst {
                    model: child.to_string(),
                    conns,
                    line: line_no,
                });
            }
            ".latch" => {
                let model = current
                    .as_mut()
                    .ok_or_else(|| err(".latch outside a model".into()))?;
                let latch = match rest.as_slice() {
                    [i, o] => Latch {
                        input: i.to_string(),
                        output: o.to_string(),
                        trigger: None,
                        init: None,
                        line: line_no,
                    },
                    [i, o, init] => Latch {
                        input: i.to_string(),
                        output: o.to_string(),
                        trigger: None,
                        init: Some(init.to_string()),
                        line: line_no,
                    },
                    [i, o, ty, ctrl] => Latch {
                        input: i.to_string(),
                        output: o.to_string(),
                        trigger: Some((ty.to_string(), ctrl.to_string())),
                        init: None,
                        line: line_no,
                    },
                    [i, o, ty, ctrl, init] => Latch {
                        input: i.to_string(),
                        output: o.to_string(),
                        trigger: Some((ty.to_string(), ctrl.to_string())),
                        init: Some(init.to_string()),
                        line: line_no,
                    },
                    _ => return Err(err(".latch expects 2 to 5 fields".into())),
                };
                model.latches.push(latch);
            }
            ".names" => {
                return Err(err("unmapped logic; run technology mapping".into()));
            }
            other if other.starts_with('.') => {
                return Err(err(format!("unsupported construct `{other}`")));
            }
            other => {
                return Err(err(format!("expected a BLIF statement, got `{other}`")));
            }
        }
    }

    if let Some(model) = current {
        return Err(Error::parse(
            file,
            text.lines().count(),
            format!("model `{}` missing .end", model.name),
        ));
    }
    HierNetlist::from_models(models, file)
}

/// Split `pin=net` tokens; empty pin or net names are errors.
fn parse_conns(tokens: &[&str], file: &str, line: usize) -> Result<Vec<(String, String)>> {
    let mut conns = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let (pin, net) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(file, line, format!("expected pin=net, got `{tok}`")))?;
        if pin.is_empty() || net.is_empty() {
            return Err(Error::parse(file, line, format!("empty pin or net in `{tok}`")));
        }
        conns.push((pin.to_string(), net.to_string()));
    }
    Ok(conns)
}

/// Iterate logical lines: comments stripped, `\`-continuations joined,
/// blanks skipped. Yields (first physical line number, text).
fn logical_lines(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    let mut lines = text.lines().enumerate();
    std::iter::from_fn(move || {
        while let Some((idx, raw)) = lines.next() {
            let stripped = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let mut joined = stripped.trim_end().to_string();
            // A trailing backslash splices the next physical line on.
            while joined.ends_with('\\') {
                joined.pop();
                match lines.next() {
                    Some((_, next)) => {
                        let next = match next.find('#') {
                            Some(i) => &next[..i],
                            None => next,
                        };
                        joined.push(' ');
                        joined.push_str(next.trim_end());
                    }
                    None => break,
                }
            }
            if !joined.trim().is_empty() {
                return Some((idx + 1, joined));
            }
        }
        None
    })
}

/// Render a netlist back to BLIF text. Parsing the result yields a netlist
/// structurally equal to the input.
pub fn write_blif(netlist: &HierNetlist) -> String {
    let mut out = String::new();
    for model in netlist.models() {
        let _ = writeln!(out, ".model {}", model.name);
        write_name_list(&mut out, ".inputs", &model.inputs);
        write_name_list(&mut out, ".outputs", &model.outputs);
        for gate in &model.gates {
            let _ = write!(out, ".gate {}", gate.cell);
            for (pin, net) in &gate.conns {
                let _ = write!(out, " {pin}={net}");
            }
            out.push('\n');
        }
        for sub in &model.subckts {
            let _ = write!(out, ".subckt {}", sub.model);
            for (port, net) in &sub.conns {
                let _ = write!(out, " {port}={net}");
            }
            out.push('\n');
        }
        for latch in &model.latches {
            let _ = write!(out, ".latch {} {}", latch.input, latch.output);
            if let Some((ty, ctrl)) = &latch.trigger {
                let _ = write!(out, " {ty} {ctrl}");
            }
            if let Some(init) = &latch.init {
                let _ = write!(out, " {init}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, ".end");
    }
    out
}

/// Emit `.inputs`/`.outputs`, wrapping long lists with `\` continuations.
fn write_name_list(out: &mut String, directive: &str, names: &[String]) {
    if names.is_empty() {
        return;
    }
    let mut width = directive.len();
    out.push_str(directive);
    for name in names {
        if width + 1 + name.len() > 76 {
            out.push_str(" \\\n ");
            width = 1;
        }
        out.push(' ');
        out.push_str(name);
        width += 1 + name.len();
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_model() {
        let n = parse_blif(".model t\n.inputs n1\n.outputs n2\n.gate INVX1 A=n1 Y=n2\n.end\n", "t").unwrap();
        let top = n.top_model();
        assert_eq!(top.name, "t");
        assert_eq!(top.gates.len(), 1);
        assert_eq!(top.gates[0].cell, "INVX1");
        assert_eq!(top.gates[0].net("A"), Some("n1"));
        assert_eq!(top.gates[0].net("Y"), Some("n2"));
        assert_eq!(top.gates[0].net("Z"), None);
    }

    #[test]
    fn rejects_names_as_unmapped_logic() {
        let err = parse_blif(".model t\n.names a b c\n.end\n", "t").unwrap_err().to_string();
        assert!(err.contains("unmapped logic; run technology mapping"), "{err}");
        assert!(err.contains("t:2"), "{err}");
    }

    #[test]
    fn parses_hierarchy() {
        let text = "\
.model parent
.inputs a
.outputs z
.subckt child i=a o=z
.end
.model child
.inputs i
.outputs o
.gate INVX1 A=i Y=o
.end
";
        let n = parse_blif(text, "t").unwrap();
        assert_eq!(n.models().len(), 2);
        assert_eq!(n.top_model().name, "parent");
        assert_eq!(n.top_model().subckts[0].model, "child");
        assert!(n.model("child").is_some());
        assert!(!n.is_flat());
    }

    #[test]
    fn comments_and_continuations() {
        let text = ".model t # top\n.inputs a \\\n b c # more\n.outputs z\n.gate X A=a \\\n B=b Y=z\n.end\n";
        let n = parse_blif(text, "t").unwrap();
        assert_eq!(n.top_model().inputs, ["a", "b", "c"]);
        assert_eq!(n.top_model().gates[0].conns.len(), 3);
    }

    #[test]
    fn latch_forms() {
        let text = "\
.model t
.inputs d clk
.outputs q
.latch d q
.latch d q 2
.latch d q re clk
.latch d q re clk 0
.end
";
        let n = parse_blif(text, "t").unwrap();
        let l = &n.top_model().latches;
        assert_eq!(l.len(), 4);
        assert_eq!(l[0].trigger, None);
        assert_eq!(l[1].init.as_deref(), Some("2"));
        assert_eq!(l[2].trigger, Some(("re".into(), "clk".into())));
        assert_eq!(l[3].init.as_deref(), Some("0"));
    }

    #[test]
    fn reports_structural_errors() {
        for (text, frag) in [
            (".model t\n.gate X A=n1\n", "missing .end"),
            (".model t\n.end\n.model t\n.end\n", "duplicate model `t`"),
            (".model t\n.gate X A\n.end\n", "expected pin=net"),
            (".model t\n.gate X A=\n.end\n", "empty pin or net"),
            (".model t\n.foo\n.end\n", "unsupported construct"),
            (".model t\n.subckt child i=a\n.end\n", "undefined model `child`"),
            (".gate X A=n\n", ".gate outside a model"),
            ("", "no .model"),
            (".model a\n.model b\n.end\n", "missing .end"),
            (
                ".model t\n.subckt c x=a\n.end\n.model c\n.inputs i\n.end\n",
                "no port `x`",
            ),
        ] {
            let err = parse_blif(text, "t").unwrap_err().to_string();
            assert!(err.contains(frag), "`{text}` -> {err}");
        }
    }

    #[test]
    fn round_trips() {
        let text = "\
.model parent
.inputs a b clk
.outputs z
.gate NAND2X1 A=a B=b Y=n1
.subckt child i=n1 o=n2
.latch n2 z re clk 0
.end
.model child
.inputs i
.outputs o
.gate INVX1 A=i Y=o
.end
";
        let once = parse_blif(text, "t").unwrap();
        let written = write_blif(&once);
        let twice = parse_blif(&written, "t").unwrap();
        assert_eq!(once, twice);
        // Writer output is already in canonical form, so it is a fixpoint.
        assert_eq!(written, write_blif(&twice));
    }

    #[test]
    fn long_port_lists_wrap_and_reparse() {
        let names: Vec<String> = (0..60).map(|i| format!("very_long_net_name_{i}")).collect();
        let mut text = String::from(".model t\n.inputs");
        for n in &names {
            text.push(' ');
            text.push_str(n);
        }
        text.push_str("\n.end\n");
        let n = parse_blif(&text, "t").unwrap();
        assert_eq!(n.top_model().inputs, names);
        let written = write_blif(&n);
        assert!(written.lines().all(|l| l.len() <= 80), "lines stay short");
        assert_eq!(parse_blif(&written, "t").unwrap(), n);
    }
}

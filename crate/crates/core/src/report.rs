//! Stable text and JSON rendering. Degrees are always reduced fractions,
//! struct key order is fixed, and every collection is emitted in a
//! deterministic order, so byte-identical inputs give byte-identical output.

use crate::dcomb::ClassTable;
use crate::fullpath::{PathResult, Terminal};
use crate::graph::PlumbingGraph;
use crate::module::{GradedModule, HfSummary};
use num::BigRational;
use serde::Serialize;

pub fn fmt_rat(r: &BigRational) -> String {
    r.to_string()
}

pub fn fmt_tuple(k: &[i64]) -> String {
    let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// "T+[b]" followed by the finite summands, multiplicities expanded:
/// unit-length ones as "Z[b]", longer ones as "Z[U]/U^l[b]".
pub fn module_line(m: &GradedModule) -> String {
    let mut s = format!("T+[{}]", fmt_rat(&m.tower_bottom));
    for f in &m.finite {
        for _ in 0..f.mult {
            if f.u_length == 1 {
                s.push_str(&format!(" + Z[{}]", fmt_rat(&f.bottom)));
            } else {
                s.push_str(&format!(" + Z[U]/U^{}[{}]", f.u_length, fmt_rat(&f.bottom)));
            }
        }
    }
    s
}

pub fn hf_text(s: &HfSummary) -> String {
    let mut out = format!("regime {}: {}\n", s.regime, s.regime.claim());
    for m in &s.modules {
        out.push_str(&format!("Spin^c #{}: {}\n", m.spinc.index, module_line(m)));
    }
    out.push_str(&format!("HF_red total rank: {}\n", s.hf_red_total_rank));
    out
}

pub fn dinv_text(d_y: &BigRational, d_minus_y: &BigRational) -> String {
    format!("d(Y) = {}, d(-Y) = {}", fmt_rat(d_y), fmt_rat(d_minus_y))
}

#[derive(Serialize)]
struct JsonFinite {
    bottom: String,
    u_length: i64,
    mult: usize,
}

#[derive(Serialize)]
struct JsonSpinc {
    index: usize,
    residue: Vec<i64>,
    #[serde(rename = "d_Y")]
    d_y: String,
    tower_bottom: String,
    finite: Vec<JsonFinite>,
}

#[derive(Serialize)]
struct JsonHf {
    graph_hash: String,
    regime: String,
    spinc: Vec<JsonSpinc>,
    hf_red_total_rank: usize,
}

pub fn hf_json(s: &HfSummary) -> String {
    let doc = JsonHf {
        graph_hash: s.graph_hash.clone(),
        regime: s.regime.to_string(),
        spinc: s
            .modules
            .iter()
            .map(|m| JsonSpinc {
                index: m.spinc.index,
                residue: m.spinc.residue.clone(),
                d_y: fmt_rat(&m.d_y()),
                tower_bottom: fmt_rat(&m.tower_bottom),
                finite: m
                    .finite
                    .iter()
                    .map(|f| JsonFinite {
                        bottom: fmt_rat(&f.bottom),
                        u_length: f.u_length,
                        mult: f.mult,
                    })
                    .collect(),
            })
            .collect(),
        hf_red_total_rank: s.hf_red_total_rank,
    };
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}

#[derive(Serialize)]
struct JsonLeveled {
    level: i64,
    k: Vec<i64>,
}

#[derive(Serialize)]
struct JsonClass {
    degree: String,
    kill_level: serde_json::Value,
    representative: JsonLeveled,
}

#[derive(Serialize)]
struct JsonClasses {
    spinc_index: usize,
    budget: i64,
    margin: i64,
    states: usize,
    classes: Vec<JsonClass>,
}

pub fn classes_json(t: &ClassTable) -> String {
    let doc = JsonClasses {
        spinc_index: t.spinc_index,
        budget: t.budget,
        margin: t.margin,
        states: t.states,
        classes: t
            .classes
            .iter()
            .map(|c| JsonClass {
                degree: fmt_rat(&c.delta),
                kill_level: match c.kill {
                    Some(k) => serde_json::Value::from(k),
                    None => serde_json::Value::from("unbounded"),
                },
                representative: JsonLeveled {
                    level: c.representative.0,
                    k: c.representative.1.clone(),
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}

pub fn classes_text(t: &ClassTable) -> String {
    let mut out = format!(
        "Spin^c #{}: {} classes over levels 0..={} (margin {}, {} states)\n",
        t.spinc_index,
        t.classes.len(),
        t.budget,
        t.margin,
        t.states
    );
    for (i, c) in t.classes.iter().enumerate() {
        let kill = match c.kill {
            Some(k) => k.to_string(),
            None => "unbounded".into(),
        };
        out.push_str(&format!(
            "class {}: degree {}, kill {}, members {}, rep U^{} (x) {}\n",
            i,
            fmt_rat(&c.delta),
            kill,
            c.members,
            c.representative.0,
            fmt_tuple(&c.representative.1)
        ));
    }
    out
}

pub fn path_text(g: &PlumbingGraph, r: &PathResult) -> String {
    let mut out = String::new();
    if let Some(vectors) = &r.vectors {
        for k in vectors {
            out.push_str(&fmt_tuple(k));
            out.push('\n');
        }
    }
    match &r.terminal {
        Terminal::Good(l) => {
            out.push_str(&format!("Good: settled at {} after {} steps\n", fmt_tuple(l), r.steps));
        }
        Terminal::Bad { witness, last } => {
            out.push_str(&format!(
                "Bad: vertex {} evaluates to {} > {} after {} steps\n",
                witness,
                last[*witness],
                -g.weight(*witness),
                r.steps
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::IntersectionForm;
    use crate::graph::parse_graph;
    use crate::lattice::SpinCTable;
    use crate::module::{assemble, hf_summary, AssembleOptions};

    #[test]
    fn module_lines() {
        let g = parse_graph("seifert -2 3/1 5/4 7/6").unwrap();
        let f = IntersectionForm::new(&g);
        let sp = SpinCTable::new(&g, &f).unwrap();
        let m = assemble(&g, &f, &sp, 0, &AssembleOptions::default()).unwrap();
        assert_eq!(module_line(&m), "T+[-2] + Z[-2] + Z[0] + Z[0]");

        let g = parse_graph("8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7").unwrap();
        let f = IntersectionForm::new(&g);
        let sp = SpinCTable::new(&g, &f).unwrap();
        let m = assemble(&g, &f, &sp, 0, &AssembleOptions::default()).unwrap();
        assert_eq!(module_line(&m), "T+[-2]");
    }

    #[test]
    fn dinv_line() {
        let z = BigRational::from(num_bigint::BigInt::from(0));
        assert_eq!(dinv_text(&z, &z), "d(Y) = 0, d(-Y) = 0");
        let d = BigRational::new(num_bigint::BigInt::from(3), num_bigint::BigInt::from(4));
        assert_eq!(dinv_text(&d, &-d.clone()), "d(Y) = 3/4, d(-Y) = -3/4");
    }

    #[test]
    fn hf_json_shape() {
        let g = parse_graph("5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4").unwrap();
        let s = hf_summary(&g, &AssembleOptions::default()).unwrap();
        let j = hf_json(&s);
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["spinc"][0]["tower_bottom"], "-3/4");
        assert_eq!(v["spinc"][0]["residue"], serde_json::json!([0, 0, 0, 1, 1]));
        assert_eq!(v["spinc"][0]["d_Y"], "3/4");
        assert_eq!(v["spinc"][0]["finite"][0]["bottom"], "-3/4");
        assert_eq!(v["spinc"][0]["finite"][0]["u_length"], 1);
        assert_eq!(v["spinc"][0]["finite"][0]["mult"], 1);
        assert_eq!(v["hf_red_total_rank"], 1);
        assert_eq!(v["regime"], "exact");
        // key order is declaration order
        let first = j.find("\"graph_hash\"").unwrap();
        let second = j.find("\"regime\"").unwrap();
        let third = j.find("\"spinc\"").unwrap();
        assert!(first < second && second < third);
    }

    #[test]
    fn tuple_and_text_forms() {
        assert_eq!(fmt_tuple(&[2, 0, -1]), "(2, 0, -1)");
        let g = parse_graph("1; -2;").unwrap();
        let f = IntersectionForm::new(&g);
        let r = crate::fullpath::run_full_path(
            &g,
            &f,
            &[2],
            crate::fullpath::PathPolicy::Deterministic,
            true,
        );
        let txt = path_text(&g, &r);
        assert!(txt.starts_with("(2)\n(-2)\n"));
        assert!(txt.contains("Good: settled at (-2)"));
    }
}

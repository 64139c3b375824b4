//! `plumb`: Heegaard Floer homology of three-manifolds bounding
//! negative-definite plumbings of spheres, from the command line.

use clap::{Args, Parser, Subcommand, ValueEnum};
use plumb_core::report;
use plumb_core::*;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "plumb",
    version,
    about = "HF+ of boundaries of negative-definite sphere plumbings",
    after_help = "Graphs are given as a file path or inline, in one of three formats:\n  \
                  compact   \"8; -2 -2 -2 -2 -2 -2 -2 -2; 0-1 0-2 2-3 0-4 4-5 5-6 6-7\"\n  \
                  JSON      {\"vertices\":[{\"id\":0,\"weight\":-2},...],\"edges\":[[0,1],...]}\n  \
                  Seifert   \"seifert -2 3/1 5/4 7/6\"\n\
                  Exit codes: 0 success, 1 domain error, 2 resource/internal error, 3 input error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct GraphInput {
    /// Path to a graph file, or an inline graph description
    #[arg(value_name = "GRAPH", allow_hyphen_values = true)]
    graph: String,
}

#[derive(Args)]
struct Selector {
    /// Spin^c class index (default: all classes)
    #[arg(long, value_name = "INDEX")]
    spinc: Option<usize>,
    /// Characteristic vector picking a Spin^c class, e.g. "0,0,0,1,1"
    #[arg(long, value_name = "K", allow_hyphen_values = true, conflicts_with = "spinc")]
    spinc_vector: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Graph facts: definiteness, bad vertices, regime, |H_1|, hash
    Info {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the Spin^c structures by canonical residue vector
    Spinc {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the full path of one characteristic vector and print the transcript
    Path {
        #[command(flatten)]
        graph: GraphInput,
        /// Start vector, by evaluations, e.g. "2,0,0,0,0,0,0,0"
        #[arg(long, value_name = "K", allow_hyphen_values = true)]
        start: String,
        /// Fire a seeded random choice instead of the lowest eligible vertex
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Equivalence classes of U-leveled characteristic vectors
    Classes {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        select: Selector,
        /// Certify kill levels up to this U-power
        #[arg(long, value_name = "N", default_value_t = 2)]
        max_level: i64,
        /// Extra exploration padding beyond the certified level
        #[arg(long, value_name = "M", default_value_t = 1)]
        margin: i64,
        /// Abort after this many explored states (env: PLUMB_STATE_CAP)
        #[arg(long, value_name = "STATES")]
        state_cap: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The graded Z[U]-module, one summand list per Spin^c structure
    Hf {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        select: Selector,
        /// Cap on the stabilization budget (default 12)
        #[arg(long, value_name = "N")]
        max_level: Option<i64>,
        /// Extra exploration padding beyond the certified level
        #[arg(long, value_name = "M", default_value_t = 1)]
        margin: i64,
        /// Abort after this many explored states (env: PLUMB_STATE_CAP)
        #[arg(long, value_name = "STATES")]
        state_cap: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Correction terms d(Y) and d(-Y)
    Dinv {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        select: Selector,
        /// Search the whole initial box instead of only settled vectors
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-check the pipeline against itself on one graph
    Verify {
        #[command(flatten)]
        graph: GraphInput,
        /// Number of seeded firing policies to compare against the
        /// deterministic one
        #[arg(long, value_name = "COUNT", default_value_t = 16)]
        seeds: u64,
    },
    /// Expand Seifert invariants into a star-shaped plumbing graph
    Seifert {
        /// Central weight e0
        #[arg(value_name = "E0", allow_hyphen_values = true)]
        e0: i64,
        /// Leg invariants p/q with p > q >= 1
        #[arg(value_name = "P/Q", required = true)]
        legs: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_graph(src: &str) -> Result<PlumbingGraph> {
    let text = if std::path::Path::new(src).is_file() {
        std::fs::read_to_string(src)
            .map_err(|e| Error::Parse(format!("cannot read {}: {}", src, e)))?
    } else {
        src.to_string()
    };
    parse_graph(&text)
}

fn parse_vector(s: &str, n: usize) -> Result<Vec<i64>> {
    let vals = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("vector component {:?} is not an integer", t)))
        })
        .collect::<Result<Vec<i64>>>()?;
    if vals.len() != n {
        return Err(Error::Parse(format!(
            "vector has {} components but the graph has {} vertices",
            vals.len(),
            n
        )));
    }
    Ok(vals)
}

fn resolve_state_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("PLUMB_STATE_CAP") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("PLUMB_STATE_CAP ({:?}) is not a number", s))),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

/// None means "all classes".
fn select_class(
    g: &PlumbingGraph,
    sp: &SpinCTable,
    sel: &Selector,
) -> Result<Option<usize>> {
    if let Some(i) = sel.spinc {
        if i >= sp.count() {
            return Err(Error::SpinCOutOfRange(i, sp.count()));
        }
        return Ok(Some(i));
    }
    if let Some(text) = &sel.spinc_vector {
        let k = parse_vector(text, g.n())?;
        return Ok(Some(sp.index_of_vector(g, &k)?));
    }
    Ok(None)
}

fn class_range(pick: Option<usize>, count: usize) -> std::ops::Range<usize> {
    match pick {
        Some(i) => i..i + 1,
        None => 0..count,
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Info { graph, format } => {
            let g = load_graph(&graph.graph)?;
            let r = analyze(&g);
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&r).expect("serialization cannot fail")
                ),
                Format::Text => {
                    println!("graph: {}", g.canonical_string());
                    println!("vertices: {}", r.n);
                    println!("negative definite: {}", r.is_negative_definite);
                    println!("det Q: {}", r.det);
                    match &r.h1_order {
                        Some(h) => println!("|H_1|: {}", h),
                        None => println!("|H_1|: infinite (degenerate form)"),
                    }
                    if r.bad_vertices.is_empty() {
                        println!("bad vertices: none");
                    } else {
                        let list: Vec<String> =
                            r.bad_vertices.iter().map(|v| v.to_string()).collect();
                        println!("bad vertices: {}", list.join(" "));
                    }
                    println!("regime: {} ({})", r.regime, r.regime.claim());
                    println!("hash: {}", r.graph_hash);
                }
            }
            Ok(())
        }
        Command::Spinc { graph, format } => {
            let g = load_graph(&graph.graph)?;
            let f = IntersectionForm::new(&g);
            let sp = SpinCTable::new(&g, &f)?;
            match format {
                Format::Json => {
                    let classes: Vec<serde_json::Value> = (0..sp.count())
                        .map(|i| {
                            serde_json::json!({
                                "index": i,
                                "residue": sp.residue(i),
                                "conjugate": sp.conjugate_index(i).expect("residue negation stays in the table"),
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "count": sp.count(),
                        "classes": classes,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
                    );
                }
                Format::Text => {
                    println!("Spin^c structures: {}", sp.count());
                    for i in 0..sp.count() {
                        println!(
                            "#{}: {}  (conjugate #{})",
                            i,
                            report::fmt_tuple(sp.residue(i)),
                            sp.conjugate_index(i)?
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Path {
            graph,
            start,
            seed,
            format,
        } => {
            let g = load_graph(&graph.graph)?;
            let f = IntersectionForm::new(&g);
            f.require_negative_definite()?;
            let k0 = parse_vector(&start, g.n())?;
            require_characteristic(&g, &k0)?;
            let policy = match seed {
                Some(s) => PathPolicy::Seeded(s),
                None => PathPolicy::Deterministic,
            };
            let r = run_full_path(&g, &f, &k0, policy, true);
            match format {
                Format::Text => print!("{}", report::path_text(&g, &r)),
                Format::Json => {
                    let terminal = match &r.terminal {
                        Terminal::Good(l) => serde_json::json!({"good": l}),
                        Terminal::Bad { witness, last } => {
                            serde_json::json!({"bad": {"witness": witness, "last": last}})
                        }
                    };
                    let doc = serde_json::json!({
                        "start": r.start,
                        "steps": r.steps,
                        "fired": r.fired,
                        "vectors": r.vectors,
                        "terminal": terminal,
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
                    );
                }
            }
            Ok(())
        }
        Command::Classes {
            graph,
            select,
            max_level,
            margin,
            state_cap,
            format,
        } => {
            let g = load_graph(&graph.graph)?;
            let f = IntersectionForm::new(&g);
            let sp = SpinCTable::new(&g, &f)?;
            let cap = resolve_state_cap(state_cap)?;
            let pick = select_class(&g, &sp, &select)?;
            let mut out = Vec::new();
            for t in class_range(pick, sp.count()) {
                let table = build_classes(&g, &f, &sp, t, max_level, margin, cap)?;
                out.push(match format {
                    Format::Text => report::classes_text(&table),
                    Format::Json => report::classes_json(&table),
                });
            }
            match format {
                Format::Text => print!("{}", out.join("")),
                Format::Json => println!("[{}]", out.join(",\n")),
            }
            Ok(())
        }
        Command::Hf {
            graph,
            select,
            max_level,
            margin,
            state_cap,
            format,
        } => {
            let g = load_graph(&graph.graph)?;
            let f = IntersectionForm::new(&g);
            f.require_negative_definite()?;
            let sp = SpinCTable::new(&g, &f)?;
            let mut opts = AssembleOptions {
                margin,
                state_cap: resolve_state_cap(state_cap)?,
                ..AssembleOptions::default()
            };
            if let Some(n) = max_level {
                opts.max_budget = n;
            }
            let pick = select_class(&g, &sp, &select)?;
            let summary = match pick {
                None => hf_summary(&g, &opts)?,
                Some(t) => {
                    let m = assemble(&g, &f, &sp, t, &opts)?;
                    HfSummary {
                        graph_hash: g.hash(),
                        regime: Regime::from_bad_count(g.bad_vertices().len()),
                        hf_red_total_rank: m.hf_red_rank(),
                        modules: vec![m],
                    }
                }
            };
            match format {
                Format::Text => print!("{}", report::hf_text(&summary)),
                Format::Json => println!("{}", report::hf_json(&summary)),
            }
            Ok(())
        }
        Command::Dinv {
            graph,
            select,
            exhaustive,
            format,
        } => {
            let g = load_graph(&graph.graph)?;
            let f = IntersectionForm::new(&g);
            let sp = SpinCTable::new(&g, &f)?;
            let pick = select_class(&g, &sp, &select)?;
            let range = class_range(pick, sp.count());
            let mut rows = Vec::new();
            for t in range.clone() {
                let (d_y, d_m) = d_invariant(&g, &f, &sp, t, exhaustive)?;
                rows.push((t, d_y, d_m));
            }
            match format {
                Format::Json => {
                    let classes: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(t, d_y, d_m)| {
                            serde_json::json!({
                                "index": t,
                                "d_Y": report::fmt_rat(d_y),
                                "d_minus_Y": report::fmt_rat(d_m),
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({ "spinc": classes });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
                    );
                }
                Format::Text => {
                    if rows.len() == 1 && sp.count() == 1 {
                        let (_, d_y, d_m) = &rows[0];
                        println!("{}", report::dinv_text(d_y, d_m));
                    } else {
                        for (t, d_y, d_m) in &rows {
                            println!("Spin^c #{}: {}", t, report::dinv_text(d_y, d_m));
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Verify { graph, seeds } => {
            let g = load_graph(&graph.graph)?;
            verify_all(&g, seeds)
        }
        Command::Seifert { e0, legs, format } => {
            let pairs = legs
                .iter()
                .map(|tok| {
                    let (p, q) = tok.split_once('/').ok_or_else(|| {
                        Error::Parse(format!("Seifert invariant {:?} is not of the form p/q", tok))
                    })?;
                    let p = p.parse::<i64>().map_err(|_| {
                        Error::Parse(format!("bad numerator in {:?}", tok))
                    })?;
                    let q = q.parse::<i64>().map_err(|_| {
                        Error::Parse(format!("bad denominator in {:?}", tok))
                    })?;
                    Ok((p, q))
                })
                .collect::<Result<Vec<(i64, i64)>>>()?;
            let g = seifert_to_star(e0, &pairs)?;
            match format {
                Format::Text => println!("{}", g.canonical_string()),
                Format::Json => {
                    let vertices: Vec<serde_json::Value> = g
                        .weights()
                        .iter()
                        .enumerate()
                        .map(|(i, w)| serde_json::json!({"id": i, "weight": w}))
                        .collect();
                    let doc = serde_json::json!({
                        "vertices": vertices,
                        "edges": g.edges(),
                    });
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
                    );
                }
            }
            Ok(())
        }
    }
}

/// Five independent consistency checks; a skipped check reports the violated
/// hypothesis and does not fail the run.
fn verify_all(g: &PlumbingGraph, seeds: u64) -> Result<()> {
    let f = IntersectionForm::new(g);
    f.require_negative_definite()?;
    let sp = SpinCTable::new(g, &f)?;
    let mut failures = 0usize;

    let mut starts = 0usize;
    let mut policy_ok = true;
    for k0 in initial_box(g) {
        starts += 1;
        let det = run_full_path(g, &f, &k0, PathPolicy::Deterministic, false);
        for seed in 0..seeds {
            let r = run_full_path(g, &f, &k0, PathPolicy::Seeded(seed), false);
            if r.is_good() != det.is_good()
                || (det.is_good() && r.final_vector() != det.final_vector())
            {
                policy_ok = false;
            }
        }
    }
    report_check(
        &format!("policy independence ({} policies x {} starts)", seeds + 1, starts),
        policy_ok,
        &mut failures,
    );

    match short_vector_count(g) {
        Ok((direct, _)) => report_check(
            &format!("short vectors (count {})", direct),
            true,
            &mut failures,
        ),
        Err(Error::HypothesisViolation(msg)) => {
            println!("short vectors: skipped - {}", msg);
        }
        Err(e) => {
            println!("short vectors: FAIL - {}", e);
            failures += 1;
        }
    }

    let opts = AssembleOptions::default();
    for v in 0..g.n() {
        match verify_blowdown(g, v, &opts) {
            Ok(r) => report_check(
                &format!("blow-down at vertex {}", v),
                r.matched,
                &mut failures,
            ),
            Err(Error::NotNegativeDefinite(_)) => {
                println!(
                    "blow-down at vertex {}: skipped - raising the weight by 1 breaks negative definiteness",
                    v
                );
            }
            Err(e) => {
                println!("blow-down at vertex {}: FAIL - {}", v, e);
                failures += 1;
            }
        }
    }

    let mut margin_ok = true;
    for t in 0..sp.count() {
        let narrow = build_classes(g, &f, &sp, t, 2, 1, opts.state_cap)?;
        let wide = build_classes(g, &f, &sp, t, 2, 2, opts.state_cap)?;
        for n in 0..=2 {
            if narrow.census(n)? != wide.census(n)? {
                margin_ok = false;
            }
        }
    }
    report_check("margin stability (M=1 vs M=2 at N=2)", margin_ok, &mut failures);

    let summary = hf_summary(g, &opts)?;
    if summary.regime == Regime::Exact {
        // hf_summary itself rejects mixed parities in this regime, so
        // reaching here means the check passed
        report_check("parity of degrees within each Spin^c class", true, &mut failures);
    } else {
        println!(
            "parity of degrees within each Spin^c class: skipped - only enforced in the exact regime"
        );
    }

    if failures == 0 {
        println!("verify: all checks passed");
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "{} verification check(s) failed",
            failures
        )))
    }
}

fn report_check(name: &str, ok: bool, failures: &mut usize) {
    if ok {
        println!("{}: pass", name);
    } else {
        println!("{}: FAIL", name);
        *failures += 1;
    }
}

//! Command-line surface: enumeration, dimension and height computations,
//! filtrations, additivity and finite-generation checks, automaton
//! utilities, and the theorem verification battery.
//!
//! Exit codes: 0 verified/success, 1 verification failed or counterexample
//! found, 2 usage error, 3 resource cap exceeded.

use std::io::Read;

use clap::{Parser, Subcommand};

use crate::analysis::{
    additivity_check, hausdorff_dimension, revalidate_witness, tfg_check, Additivity,
    NotTfgWitness, TfgStrategy, TfgVerdict,
};
use crate::automata::{family_report, quotient_group, Automaton};
use crate::error::{Error, Result};
use crate::files;
use crate::patterns::{enumerate_nearly_maximal, exhaustive_scan, Pattern};
use crate::report::Report;
use crate::stabilizer::{height_oracle, height_recursive, Filtration, StabVector};
use crate::tree::{LevelSet, DEFAULT_DEPTH_CAP, DEFAULT_ORDER_CAP};
use crate::verify;

#[derive(Parser)]
#[command(
    name = "treegroups",
    about = "finite binary-tree automorphism groups: enumeration, dimensions, verification",
    version
)]
struct Cli {
    /// Emit a single JSON document instead of key/value lines
    #[arg(long, global = true)]
    json: bool,
    /// Bound on parallel candidate verification
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Cap on materialized group order
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    max_order: usize,
    /// Cap on tree depth accepted from inputs
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH_CAP)]
    max_depth: usize,
    /// Include wall-clock timings (output is no longer byte-reproducible)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the nearly-maximal pattern groups at a pattern size
    Enumerate {
        #[arg(long)]
        depth: usize,
        /// Cross-check against the brute-force subgroup descent (depth <= 4)
        #[arg(long)]
        exhaustive: bool,
    },
    /// Hausdorff dimension of the group defined by a pattern file
    Hdim {
        #[arg(long)]
        pattern_file: String,
    },
    /// Height of a top-level stabilizer vector
    Height {
        #[arg(long)]
        depth: usize,
        /// 2^{d-1} bits over the top level, word-value order
        #[arg(long)]
        vector: String,
        #[arg(long, default_value = "recursive")]
        mode: String,
    },
    /// Filtration of the top-level stabilizer under a group's generators
    Filtration {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        group_file: String,
    },
    /// Topological finite generation check (negative direction only)
    Tfg {
        #[arg(long)]
        pattern_file: String,
        /// bs | hom | split | maximal-full
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Additivity of portraits at one level
    Additivity {
        #[arg(long)]
        pattern_file: String,
        #[arg(long)]
        level: usize,
    },
    /// Built-in automata: export, finite quotients, verification report
    Automaton {
        /// grigorchuk | family
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        report: bool,
        /// Emit the depth-n quotients of the generators as a group file
        #[arg(long)]
        quotient: Option<usize>,
    },
    /// Verify a theorem: main-1 | main-2 | heights | growth | all
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        depth: usize,
    },
}

struct Output {
    fields: Vec<(String, String)>,
    report: Option<Report>,
    /// raw text emitted verbatim in text mode (file-format outputs)
    raw: Option<String>,
}

impl Output {
    fn new() -> Output {
        Output {
            fields: Vec::new(),
            report: None,
            raw: None,
        }
    }

    fn field(&mut self, k: impl Into<String>, v: impl ToString) {
        self.fields.push((k.into(), v.to_string()));
    }

    fn print(&self, json: bool, timings: bool) {
        use std::fmt::Write as _;
        let report = self.report.as_ref().map(|r| {
            let mut r = r.clone();
            if !timings {
                for item in &mut r.items {
                    item.time_ms = 0;
                }
            }
            r
        });
        let mut text = String::new();
        if json {
            let mut doc = serde_json::Map::new();
            for (k, v) in &self.fields {
                doc.insert(k.clone(), serde_json::Value::String(v.clone()));
            }
            if let Some(r) = &report {
                doc.insert(
                    "report".into(),
                    serde_json::to_value(r).expect("report serializes"),
                );
            }
            let _ = writeln!(
                text,
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap()
            );
        } else {
            if let Some(raw) = &self.raw {
                text.push_str(raw);
            }
            for (k, v) in &self.fields {
                let _ = writeln!(text, "{k}={v}");
            }
            if let Some(r) = &report {
                let _ = write!(text, "{r}");
            }
        }
        // tolerate closed pipes (e.g. piping into head)
        use std::io::Write as _;
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn witness_summary(w: &NotTfgWitness) -> String {
    match w {
        NotTfgWitness::Homomorphism { sets, pair } => format!(
            "functional:{} pair:{},{}",
            sets.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("+"),
            pair.0,
            pair.1
        ),
        NotTfgWitness::SplitComplement { generators } => format!(
            "complement:{}",
            generators
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        NotTfgWitness::StabilizerOutsideDerived { element, level } => {
            format!("stabilizer-element:{element} level:{level}")
        }
        NotTfgWitness::MaximalWithFullImage { generators } => format!(
            "maximal-subgroup-generators:{}",
            generators
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

fn dispatch(cli: &Cli) -> Result<(Output, i32)> {
    let mut out = Output::new();
    let jobs = cli.jobs.max(1);
    let cap = cli.max_order;
    let depth_arg = match &cli.command {
        Command::Enumerate { depth, .. }
        | Command::Height { depth, .. }
        | Command::Filtration { depth, .. }
        | Command::Verify { depth, .. } => Some(*depth),
        _ => None,
    };
    if let Some(depth) = depth_arg {
        if depth > cli.max_depth {
            return Err(Error::ResourceCap {
                what: "depth",
                needed: depth as u128,
                cap: cli.max_depth as u128,
            });
        }
    }
    match &cli.command {
        Command::Enumerate { depth, exhaustive } => {
            let groups = enumerate_nearly_maximal(*depth)?;
            let expected = 1usize << (2 * depth - 3);
            out.field("depth", depth);
            out.field("count", groups.len());
            out.field("expected", expected);
            let mut code = if groups.len() == expected { 0 } else { 1 };
            for (i, g) in groups.iter().enumerate() {
                let rows: Vec<String> = g
                    .span()
                    .rows()
                    .iter()
                    .map(|r| {
                        LevelSet::from_indicator(*depth, r)
                            .map(|s| s.to_string())
                            .unwrap_or_default()
                    })
                    .collect();
                out.field(format!("group.{i}"), rows.join(";"));
            }
            if *exhaustive {
                let scan = exhaustive_scan(*depth, cap)?;
                out.field("exhaustive_count", scan.len());
                let keys: std::collections::BTreeSet<_> =
                    scan.iter().map(|g| g.sorted_key()).collect();
                let material = verify::parallel_map(jobs, groups, |p| {
                    p.materialize(cap).map(|m| m.sorted_key())
                });
                let mut matched = scan.len() == expected;
                for m in material {
                    matched &= keys.contains(&m?);
                }
                out.field("match", matched);
                if !matched {
                    code = 1;
                }
            }
            Ok((out, code))
        }
        Command::Hdim { pattern_file } => {
            let p = files::parse_pattern_auto(&read_input(pattern_file)?, cli.max_depth, cap)?;
            let h = hausdorff_dimension(&p)?;
            let (num, den) = h.reduced();
            out.field("depth", p.depth());
            out.field("stabilizer_log2", h.numerator);
            out.field("hdim", h);
            out.field("reduced", format!("{num}/{den}"));
            Ok((out, 0))
        }
        Command::Height {
            depth,
            vector,
            mode,
        } => {
            let v = StabVector::parse(*depth, vector)?;
            let height = match mode.as_str() {
                "recursive" => height_recursive(&v),
                "oracle" => height_oracle(&v, &Filtration::full(*depth)?),
                other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
            };
            out.field("depth", depth);
            out.field("vector", v);
            out.field("mode", mode);
            out.field("height", height);
            Ok((out, 0))
        }
        Command::Filtration { depth, group_file } => {
            let g = files::parse_group_file(&read_input(group_file)?, cli.max_depth, cap)?;
            if g.depth() != *depth {
                return Err(Error::DepthMismatch {
                    left: *depth,
                    right: g.depth(),
                });
            }
            let f = Filtration::compute(*depth, g.generators())?;
            out.field(
                "dims",
                f.dims()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.field("uniserial", f.is_uniserial());
            for i in 0..f.chain_len() {
                let rows: Vec<String> = f
                    .layer(i)
                    .rows()
                    .iter()
                    .map(|r| {
                        StabVector::new(*depth, r.clone())
                            .map(|v| v.to_string())
                            .unwrap_or_default()
                    })
                    .collect();
                out.field(format!("layer.{i}"), rows.join(","));
            }
            Ok((out, 0))
        }
        Command::Tfg {
            pattern_file,
            strategy,
            level,
        } => {
            let p = files::parse_pattern_auto(&read_input(pattern_file)?, cli.max_depth, cap)?;
            let strat = TfgStrategy::parse(strategy)?;
            let verdict = tfg_check(&p, strat, *level, cap)?;
            out.field("strategy", strategy);
            match &verdict {
                TfgVerdict::ProvedNotTfg(w) => {
                    let valid = revalidate_witness(&p, w, cap)?;
                    out.field("verdict", "proved-not-tfg");
                    out.field("revalidated", valid);
                    out.field("witness", witness_summary(w));
                    Ok((out, if valid { 0 } else { 1 }))
                }
                TfgVerdict::InconclusiveUpTo(n) => {
                    out.field("verdict", "inconclusive");
                    out.field("level", n);
                    Ok((out, 1))
                }
                TfgVerdict::StructuralCertificate(r) => {
                    out.field("verdict", "structural-certificate");
                    let code = if r.passed() { 0 } else { 1 };
                    out.report = Some(r.clone());
                    Ok((out, code))
                }
            }
        }
        Command::Additivity {
            pattern_file,
            level,
        } => {
            let p = files::parse_pattern_auto(&read_input(pattern_file)?, cli.max_depth, cap)?;
            out.field("depth", p.depth());
            out.field("level", level);
            match additivity_check(&p, *level, cap)? {
                Additivity::Additive { rank, order } => {
                    out.field("additive", true);
                    out.field("rank", rank);
                    out.field("order", order);
                    Ok((out, 0))
                }
                Additivity::NotAdditive { level, witness } => {
                    out.field("additive", false);
                    out.field("witness_level", level);
                    out.field("witness_g", &witness.0);
                    out.field("witness_h", &witness.1);
                    Ok((out, 1))
                }
            }
        }
        Command::Automaton {
            name,
            k,
            report,
            quotient,
        } => {
            let aut = match name.as_str() {
                "grigorchuk" => Automaton::grigorchuk(),
                "family" => Automaton::family(*k)?,
                other => return Err(Error::Parse(format!("unknown automaton {other:?}"))),
            };
            if let Some(n) = quotient {
                if *n > cli.max_depth {
                    return Err(Error::ResourceCap {
                        what: "quotient depth",
                        needed: *n as u128,
                        cap: cli.max_depth as u128,
                    });
                }
                let mut raw = format!("depth={n}\ngenerators:\n");
                for name in aut.generator_names() {
                    let e = aut.state_quotient(aut.state(&name)?, *n)?;
                    if cli.json {
                        out.field(format!("generator.{name}"), &e);
                    }
                    raw.push_str(&format!("{e}\n"));
                }
                if cli.json {
                    out.field("depth", n);
                } else {
                    out.raw = Some(raw);
                }
                return Ok((out, 0));
            }
            if *report {
                let r = match name.as_str() {
                    "grigorchuk" => grigorchuk_report(cap)?,
                    _ => family_report(*k, cap)?,
                };
                let code = if r.passed() { 0 } else { 1 };
                out.report = Some(r);
                return Ok((out, code));
            }
            if cli.json {
                for s in aut.states() {
                    out.field(
                        format!("state.{}", s.name),
                        format!(
                            "{} {} {}",
                            s.active as u8,
                            aut.states()[s.succ[0]].name,
                            aut.states()[s.succ[1]].name
                        ),
                    );
                }
            } else {
                out.raw = Some(files::write_automaton_file(&aut));
            }
            Ok((out, 0))
        }
        Command::Verify { theorem, depth } => {
            let r = verify::theorem(theorem, *depth, jobs)?;
            let code = if r.passed() { 0 } else { 1 };
            out.field("theorem", theorem);
            out.field("depth", depth);
            out.field("summary", if r.passed() { "pass" } else { "fail" });
            out.report = Some(r);
            Ok((out, code))
        }
    }
}

/// Structural report for the Grigorchuk machine: the depth-4 pattern group
/// and its dimension, plus the non-additivity witness.
fn grigorchuk_report(cap: usize) -> Result<Report> {
    let mut r = Report::new("grigorchuk");
    r.check("depth4-closure", || {
        let g = quotient_group(&Automaton::grigorchuk(), 4, cap)?;
        let mut ok = g.order() == 1 << 12;
        ok &= g.level_stabilizer(3)?.order() == 1 << 5;
        ok &= g.is_essential()?;
        Ok((ok, Some(format!("order={}", g.order()))))
    });
    r.check("dimension", || {
        let g = quotient_group(&Automaton::grigorchuk(), 4, cap)?;
        let h = hausdorff_dimension(&Pattern::Explicit(g))?;
        Ok((h.reduced() == (5, 8), Some(format!("hdim={h}"))))
    });
    r.check("non-additive", || {
        let g = Pattern::Explicit(quotient_group(&Automaton::grigorchuk(), 4, cap)?);
        let found = crate::analysis::first_non_additive_level(&g, 5, cap)?;
        match found {
            Some(Additivity::NotAdditive { level, witness }) => Ok((
                true,
                Some(format!("level={level} g={} h={}", witness.0, witness.1)),
            )),
            _ => Ok((false, None)),
        }
    });
    Ok(r)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ResourceCap { .. } => 3,
        Error::Verification(_) | Error::NotEssential | Error::EssentialityUndecided => 1,
        _ => 2,
    }
}

/// Entry point; returns the process exit code.
pub fn run_from_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((out, code)) => {
            out.print(cli.json, cli.timings);
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

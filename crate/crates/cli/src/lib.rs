//! Command-line front end for the `setstab` library.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use setstab::actions::{coloring_census, ELL_LEVELS};
use setstab::catalog::{check_entries, enumerate_primitive_solvable, primitive_lemma_report, table1_report};
use setstab::constructor::{good_subsets, three_coloring_2asym, verify_certificate, Params};
use setstab::product::{final_corollary_check, thmain_report, ProductInstance};
use setstab::registry::{self, Registered};
use setstab::witness::verify_example;
use setstab::{Caps, Certificate, Error, GroupFile, PermGroup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "setstab",
    version,
    about = "Set and coloring stabilizers of solvable permutation groups"
)]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Largest orbit explored by orbit-stabilizer searches.
    #[arg(long, global = true)]
    cap_orbit: Option<usize>,
    /// Largest coloring space k^n scanned by a census.
    #[arg(long, global = true)]
    cap_space: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbits of a group on k-colorings of its points.
    Census {
        /// Builtin name (e.g. sym:4, wr_imp(sym:2,cyc:3)) or path to a group JSON file.
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// Report only the number of classes with stabilizer orbits of length at most this.
        #[arg(long)]
        regularity: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Primitive solvable groups of small degree.
    Catalog {
        #[arg(long, conflicts_with = "lemmas")]
        table1: bool,
        #[arg(long)]
        lemmas: bool,
        #[arg(long, default_value_t = 9)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build subsets or colorings with small stabilizers.
    Construct {
        #[arg(value_enum)]
        what: Construct,
        #[arg(long)]
        group: String,
        /// Number of pairwise inequivalent subsets to build.
        #[arg(long, default_value_t = 1)]
        want: usize,
    },
    /// Check a worked example or a certificate.
    Verify {
        #[arg(value_enum)]
        what: Verify,
        /// Group of the certificate.
        #[arg(long, required_if_eq("what", "certificate"))]
        group: Option<String>,
        /// Certificate JSON, or the output of `construct`.
        #[arg(long, required_if_eq("what", "certificate"))]
        file: Option<String>,
    },
    /// Double-coset construction for a product action X wr_d S.
    ProductDemo {
        #[arg(long)]
        x: String,
        #[arg(long)]
        t: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Also check the setwise stabilizer of this many points around {0, v(0)}.
        #[arg(long)]
        delta_size: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Tsv,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Construct {
    GoodSubset,
    ThreeColoring,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Verify {
    Bad,
    Bad2,
    Certificate,
}

/// Outcome of a command: text for standard output and whether every
/// checked claim held.
struct Output {
    text: String,
    holds: bool,
}

impl Output {
    fn json<T: Serialize>(value: &T, holds: bool) -> anyhow::Result<Self> {
        Ok(Output {
            text: serde_json::to_string_pretty(value)? + "\n",
            holds,
        })
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out` and diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.global.jobs {
        // the global pool can be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match execute(&cli) {
        Ok(o) => {
            if out.write_all(o.text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if o.holds {
                EXIT_OK
            } else {
                eprintln!("setstab: a checked property failed");
                EXIT_PROPERTY
            }
        }
        Err(e) => {
            eprintln!("setstab: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(e) if e.is_cap() => EXIT_CAP,
        Some(e) if e.is_property_violation() => EXIT_PROPERTY,
        _ => EXIT_USAGE,
    }
}

fn caps(g: &Global) -> Caps {
    let d = Caps::default();
    Caps {
        orbit: g.cap_orbit.unwrap_or(d.orbit),
        space: g.cap_space.unwrap_or(d.space),
    }
}

/// A builtin name, or a path to a group JSON file.
fn load_group(spec: &str) -> anyhow::Result<Registered> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let file: GroupFile = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
        let group = PermGroup::try_from(file)?;
        return Ok(Registered {
            name: spec.to_string(),
            group,
            structure: None,
        });
    }
    Ok(registry::lookup(spec)?)
}

fn execute(cli: &Cli) -> anyhow::Result<Output> {
    let caps = caps(&cli.global);
    let params = Params {
        caps,
        seed: cli.global.seed,
    };
    match &cli.command {
        Command::Census {
            group,
            colors,
            regularity,
            format,
        } => {
            let g = load_group(group)?;
            let report = coloring_census(&g.group, &g.name, *colors, &caps)?;
            let levels: Vec<usize> = match regularity {
                Some(i) => vec![*i],
                None => ELL_LEVELS.to_vec(),
            };
            match (format, regularity) {
                (Format::Tsv, _) => {
                    let header: Vec<String> = levels.iter().map(|i| format!("l_{colors},{i}")).collect();
                    let row: Vec<String> = levels.iter().map(|&i| report.ell(i).to_string()).collect();
                    Ok(Output {
                        text: format!("group\t{}\n{}\t{}\n", header.join("\t"), g.name, row.join("\t")),
                        holds: true,
                    })
                }
                (Format::Json, Some(i)) => Output::json(
                    &json!({"group": g.name, "k": colors, "i": i, "ell": report.ell(*i)}),
                    true,
                ),
                (Format::Json, None) => Output::json(&report, true),
            }
        }
        Command::Catalog {
            table1,
            lemmas,
            max_degree,
            format,
        } => {
            let entries = enumerate_primitive_solvable(*max_degree, &caps)?;
            check_entries(&entries)?;
            if *lemmas {
                let flags = primitive_lemma_report(&entries, &caps)?;
                return match format {
                    Format::Json => Output::json(&flags, true),
                    Format::Tsv => {
                        let mut text = String::from(
                            "name\tdegree\ttwo_regular\tthree_regular_class\tmetabelian_class\tabelian_class\tasymmetric_4_coloring\n",
                        );
                        for f in &flags {
                            text += &format!(
                                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                                f.name,
                                f.degree,
                                f.two_regular,
                                f.three_regular_class,
                                f.metabelian_class,
                                f.abelian_class,
                                f.asymmetric_4_coloring
                            );
                        }
                        Ok(Output { text, holds: true })
                    }
                };
            }
            let rows = if *table1 { None } else { Some(&entries) };
            match (format, rows) {
                (Format::Json, Some(entries)) => Output::json(entries, true),
                (Format::Json, None) => Output::json(&table1_report(&entries), true),
                (Format::Tsv, rows) => {
                    let mut text = String::from("degree\tname\tl_2,1\tl_2,2\tl_2,3\tl_2,6\n");
                    let lines: Vec<(usize, String, [usize; 4])> = match rows {
                        Some(entries) => entries.iter().map(|e| (e.degree, e.name.clone(), e.ell)).collect(),
                        None => table1_report(&entries)
                            .into_iter()
                            .map(|r| (r.degree, r.name, r.ell))
                            .collect(),
                    };
                    for (degree, name, ell) in lines {
                        text += &format!("{degree}\t{name}\t{}\t{}\t{}\t{}\n", ell[0], ell[1], ell[2], ell[3]);
                    }
                    Ok(Output { text, holds: true })
                }
            }
        }
        Command::Construct { what, group, want } => {
            let g = load_group(group)?;
            let structure = g.structure.as_ref();
            match what {
                Construct::GoodSubset => {
                    let c = good_subsets(&g.group, structure, *want, &params)?;
                    let holds = c
                        .certificates
                        .iter()
                        .all(|cert| cert.max_orbit_length <= 6 && cert.derived_length.at_most(3));
                    let subsets: Vec<Vec<usize>> = c.family.colorings.iter().map(|c| c.class(1).points()).collect();
                    Output::json(
                        &json!({
                            "group": g.name,
                            "seed": params.seed,
                            "subsets": subsets,
                            "pairwise_inequivalent": c.family.pairwise_inequivalent,
                            "certificates": c.certificates,
                        }),
                        holds,
                    )
                }
                Construct::ThreeColoring => {
                    let cert = three_coloring_2asym(&g.group, structure, &params)?;
                    let holds = cert.max_orbit_length <= 2 && cert.elementary_abelian_2;
                    Output::json(
                        &json!({"group": g.name, "seed": params.seed, "certificates": [cert]}),
                        holds,
                    )
                }
            }
        }
        Command::Verify { what, group, file } => match what {
            Verify::Bad | Verify::Bad2 => {
                let name = if *what == Verify::Bad { "bad" } else { "bad2" };
                let report = verify_example(name, &caps)?;
                let holds = report.holds();
                Output::json(&report, holds)
            }
            Verify::Certificate => {
                let (group, file) = (
                    group.as_deref().unwrap_or_default(),
                    file.as_deref().unwrap_or_default(),
                );
                let g = load_group(group)?;
                let text = std::fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
                let certs = parse_certificates(&text).with_context(|| format!("parsing {file}"))?;
                let mut results = Vec::new();
                for cert in &certs {
                    results.push(verify_certificate(&g.group, g.structure.as_ref(), cert, &caps)?);
                }
                let valid = results.iter().all(|&v| v);
                let o = Output::json(&json!({"group": g.name, "valid": valid, "results": results}), true)?;
                if !valid {
                    anyhow::bail!(Rejected(o.text));
                }
                Ok(o)
            }
        },
        Command::ProductDemo {
            x,
            t,
            d,
            s,
            trials,
            delta_size,
        } => {
            let instance = ProductInstance::from_specs(x, t, *d, s)?;
            let report = thmain_report(&instance, *trials, params.seed, &caps)?;
            let mut holds = report.holds();
            let mut value = serde_json::to_value(&report)?;
            if let Some(size) = delta_size {
                let f = final_corollary_check(&instance, *size, params.seed, &caps)?;
                holds &= f.holds;
                value["setwise_check"] = serde_json::to_value(&f)?;
            }
            value["instance"] = json!({"x": x, "t": t, "d": d, "s": s});
            Output::json(&value, holds)
        }
    }
}

/// A certificate file that failed verification; the report is still printed.
#[derive(Debug)]
struct Rejected(String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "certificate rejected\n{}", self.0)
    }
}

impl std::error::Error for Rejected {}

fn parse_certificates(text: &str) -> anyhow::Result<Vec<Certificate>> {
    let value: Value = serde_json::from_str(text)?;
    match value.get("certificates") {
        Some(list) => Ok(serde_json::from_value(list.clone())?),
        None => Ok(vec![serde_json::from_value(value)?]),
    }
}

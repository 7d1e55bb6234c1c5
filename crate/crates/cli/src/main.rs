use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lnn::dataset::{load_mushroom, load_spect, select, MUSHROOM_ATTRIBUTES};
use lnn::fixtures;
use lnn::gates::{check_network, gate_network, render_table, GateKind};
use lnn::infer::{explain, infer};
use lnn::memorize::memorize;
use lnn::neurule::adjustment_experiment;
use lnn::readout::readout;
use lnn::rules::{add_rule, parse_rule, parse_rule_file, remove_rule, EncodingPolicy};
use lnn::{build, FactSet, Network};

/// Neuron count of the multilayer XOR network used for comparison.
const LAYERED_XOR_NEURONS: usize = 7;

#[derive(Parser)]
#[command(
    name = "lnn",
    version,
    about = "Logical neural networks built from if-then rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Inhibitor,
    Terminal,
}

impl From<Policy> for EncodingPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Inhibitor => EncodingPolicy::AsInhibitor,
            Policy::Terminal => EncodingPolicy::AsTerminal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    Mushroom,
    Spect,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a rule file into a network.
    Build {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long, value_enum, default_value = "inhibitor")]
        policy: Policy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Propagate facts through a network and print the final states.
    Infer {
        #[arg(long)]
        net: PathBuf,
        /// Fact file with `thing=true|false` lines, or `-` for standard input.
        #[arg(long)]
        facts: String,
        #[arg(long)]
        trace: bool,
        /// Print the derivation of a thing.
        #[arg(long)]
        explain: Option<String>,
        /// Exit with status 2 on contradictions or unstable links.
        #[arg(long)]
        strict: bool,
    },
    /// Print the rules stored in a network.
    Readout {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_enum, default_value = "inhibitor")]
        policy: Policy,
    },
    /// Add one rule to a network.
    AddRule {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long, value_enum, default_value = "inhibitor")]
        policy: Policy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove one rule from a network.
    RemoveRule {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long, value_enum, default_value = "inhibitor")]
        policy: Policy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Memorize dataset records one at a time, replaying all of them after
    /// each insertion.
    Memorize {
        #[arg(long, value_enum)]
        dataset: Dataset,
        #[arg(long)]
        file: PathBuf,
        /// Attribute columns to use (mushroom only).
        #[arg(long)]
        attrs: Option<usize>,
        /// Records to take after the seeded shuffle; all when omitted.
        #[arg(long)]
        records: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Text report destination.
        #[arg(long)]
        report: PathBuf,
        /// Per-step CSV table destination.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Keep SPECT records whose features also occur with the other class.
        #[arg(long)]
        keep_indecisive: bool,
    },
    /// Print gate truth tables and check them.
    Gates {
        #[arg(long)]
        gate: Option<GateKind>,
    },
    /// Evaluate the bone-disease neurule against its symbolic rules.
    NeuruleDemo,
    /// Write a network as a Graphviz graph.
    ExportDot {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_net(path: &Path) -> Result<Network> {
    Network::from_json(&read_text(path)?).with_context(|| format!("loading network {}", path.display()))
}

fn list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".to_string()
    } else {
        v.join(" ")
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build { rules, policy, out } => {
            let base = parse_rule_file(&read_text(&rules)?)
                .with_context(|| format!("parsing {}", rules.display()))?;
            let net = build(&base, policy.into())?;
            write_text(&out, &net.to_json())?;
            let s = net.stats();
            println!(
                "built {} rules: {} neurons, {} excitatory links, {} inhibitory links",
                base.len(),
                s.neuron_count,
                s.elink_count,
                s.ilink_count
            );
        }
        Command::Infer {
            net,
            facts,
            trace,
            explain: target,
            strict,
        } => {
            let net = load_net(&net)?;
            let text = if facts == "-" {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .context("reading facts from stdin")?;
                s
            } else {
                read_text(Path::new(&facts))?
            };
            let facts = FactSet::parse(&text)?;
            let result = infer(&net, &facts)?;
            print!("{}", result.states_text());
            println!("rounds: {}", result.rounds);
            println!(
                "contradictions: {}",
                list(result.contradictions.iter().map(|id| &result.things[id.index()]))
            );
            println!("unstable: {}", list(&result.unstable));
            if trace {
                print!("{}", result.trace_tsv());
            }
            if let Some(t) = target {
                print!("{}", explain(&net, &result, &t)?);
            }
            if strict && !(result.contradictions.is_empty() && result.unstable.is_empty()) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Readout { net, policy } => {
            print!("{}", readout(&load_net(&net)?, policy.into()));
        }
        Command::AddRule {
            net,
            rule,
            policy,
            out,
        } => {
            let mut n = load_net(&net)?;
            let rule = parse_rule(&rule)?;
            let handle = add_rule(&mut n, &rule, policy.into())?;
            write_text(&out, &n.to_json())?;
            println!("added {rule} as {}", handle.elink);
        }
        Command::RemoveRule {
            net,
            rule,
            policy,
            out,
        } => {
            let mut n = load_net(&net)?;
            let rule = parse_rule(&rule)?;
            remove_rule(&mut n, &rule, policy.into())?;
            write_text(&out, &n.to_json())?;
            println!("removed {rule}");
        }
        Command::Memorize {
            dataset,
            file,
            attrs,
            records,
            seed,
            report,
            csv,
            keep_indecisive,
        } => {
            let all = match dataset {
                Dataset::Mushroom => {
                    load_mushroom(&file, attrs.unwrap_or(MUSHROOM_ATTRIBUTES.len()), usize::MAX)?
                }
                Dataset::Spect => {
                    if attrs.is_some() {
                        bail!("--attrs applies to the mushroom dataset only");
                    }
                    let data = load_spect(&file, !keep_indecisive)?;
                    println!("indecisive records dropped: {}", data.dropped);
                    data.records
                }
            };
            let n = records.unwrap_or(all.len());
            if n > all.len() {
                bail!("asked for {n} records, the file has {}", all.len());
            }
            let picked = select(&all, n, seed);
            let rep = memorize(&picked);
            write_text(&report, &rep.to_text())?;
            if let Some(csv) = csv {
                write_text(&csv, &rep.to_csv())?;
            }
            let last = rep.steps.last();
            println!(
                "final recall: {}/{}",
                last.map_or(0, |s| s.recalled),
                last.map_or(0, |s| s.total)
            );
        }
        Command::Gates { gate } => {
            let kinds = match gate {
                Some(g) => vec![g],
                None => GateKind::ALL.to_vec(),
            };
            let mut failed = false;
            for g in &kinds {
                print!("{}", render_table(*g, &gate_network(*g)));
            }
            for g in &kinds {
                let net = gate_network(*g);
                match check_network(*g, &net) {
                    Ok(()) => println!("{g}: PASS"),
                    Err(row) => {
                        failed = true;
                        println!("{g}: FAIL at A={} B={}", row.a, row.b);
                    }
                }
            }
            for g in &kinds {
                println!(
                    "{g}: {} neurons (layered XOR network: {LAYERED_XOR_NEURONS})",
                    gate_network(*g).stats().neuron_count
                );
            }
            if failed {
                bail!("gate check failed");
            }
        }
        Command::NeuruleDemo => {
            let nr = fixtures::r7_neurule();
            println!("{nr}");
            let cases = fixtures::r7_cases();
            for (case, rule) in cases.iter().zip(fixtures::r7_rules().iter()) {
                let input: Vec<String> = case.input.iter().map(|x| format!("{}", x.as_f64())).collect();
                println!("{}: {rule}  input [{}]", case.label, input.join(", "));
            }
            let rep = adjustment_experiment(&nr, &cases, &fixtures::r7_adjustments())?;
            print!("{rep}");
            for v in &rep.variants {
                println!("{}: fails {}", v.adjustment, list(v.failed()));
            }
        }
        Command::ExportDot { net, out } => {
            write_text(&out, &load_net(&net)?.to_dot())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

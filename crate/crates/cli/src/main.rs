mod parse;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ebcrn::analysis::{
    execution_length_bound, find_potential, reaction_feedforward_order, species_feedforward_order,
    BoundednessCertificate, PotentialFunction,
};
use ebcrn::compiler::{compile_function, compile_predicate, make_all_voting};
use ebcrn::format::{parse_crn, parse_spec, print_crn, CrnDocument, SpecDocument};
use ebcrn::simulator::{
    bench_stabilization, default_volume, run_to_terminal, summarize, summary_markdown, trial_seed, write_csv,
    BenchConfig,
};
use ebcrn::verifier::{
    verify_computer, verify_decider, Counterexample, Limits, Reduction, Status, Verdict, VerifyOptions,
};
use ebcrn::{Configuration, Crn};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "ebcrn", version, about = "Compile, analyze, verify and simulate execution-bounded CRNs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a semilinear predicate or function into a network.
    Compile {
        /// Predicate spec (file path or inline text).
        #[arg(long, conflicts_with = "function", required_unless_present = "function")]
        pred: Option<String>,
        /// Piecewise function spec (file path or inline text).
        #[arg(long = "fn")]
        function: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        /// Convert the compiled decider so that every species votes.
        #[arg(long, requires = "pred")]
        all_voting: bool,
        /// Grid bound for checking that function pieces partition the domain.
        #[arg(long, default_value_t = 16)]
        grid: u64,
    },
    /// Print a boundedness certificate and feedforward orderings.
    Analyze {
        input: PathBuf,
        /// Validate this potential instead, e.g. `A=1,B=1,C=0`.
        #[arg(long)]
        check_potential: Option<String>,
        /// Report the execution length bound from this configuration.
        #[arg(long)]
        from: Option<String>,
    },
    /// Check stable computation against a spec on a grid of inputs.
    Verify {
        input: PathBuf,
        #[arg(long)]
        spec: String,
        /// Input box, e.g. `0..8` or `0..6,0..3` (inclusive).
        #[arg(long)]
        inputs: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = Limits::default().max_configs)]
        max_configs: usize,
        #[arg(long, default_value_t = Limits::default().max_depth)]
        max_depth: usize,
        /// Explore every interleaving instead of stubborn sets.
        #[arg(long)]
        no_reduction: bool,
        /// Also require exactly one voter in every reachable configuration.
        #[arg(long)]
        single_voting: bool,
    },
    /// Run stochastic simulations to a terminal configuration.
    Simulate {
        input: PathBuf,
        /// Initial molecules on top of the context, e.g. `3 X1, 5 X2`.
        #[arg(long = "input", value_name = "MOLECULES")]
        molecules: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
    },
    /// Measure mean stabilization time across input sizes.
    Bench {
        input: PathBuf,
        /// Comma-separated input sizes.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        trials: u64,
        /// Species receiving the `n` input molecules, split evenly; defaults
        /// to the first input species.
        #[arg(long)]
        input_species: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        /// Write per-trial rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_crn(path: &Path) -> Result<CrnDocument> {
    parse_crn(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// A spec argument is read from disk when it names a file, else parsed as is.
fn load_spec(arg: &str) -> Result<SpecDocument> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    parse_spec(&text).with_context(|| format!("parsing spec `{arg}`"))
}

/// The context of `doc` plus the named molecules.
fn initial(doc: &CrnDocument, text: &str) -> Result<Configuration> {
    let crn = doc.crn();
    let mut x = match doc {
        CrnDocument::Crn(c) => c.zero_config(),
        CrnDocument::Crd(d) => d.context().clone(),
        CrnDocument::Crc(c) => c.context().clone(),
    };
    for (name, k) in parse::molecules(text)? {
        let s = crn.species_id(&name).with_context(|| format!("unknown species `{name}`"))?;
        x.add(s, k)?;
    }
    Ok(x)
}

fn compile(pred: Option<String>, function: Option<String>, output: &Path, all_voting: bool, grid: u64) -> Result<u8> {
    let doc = match (pred, function) {
        (Some(p), None) => {
            let SpecDocument::Predicate(p) = load_spec(&p)? else {
                bail!("--pred expects a predicate, found a function");
            };
            let mut c = compile_predicate(&p)?;
            if all_voting {
                c = make_all_voting(&c)?;
            }
            CrnDocument::Crd(c.crd)
        }
        (None, Some(f)) => {
            let SpecDocument::Function(f) = load_spec(&f)? else {
                bail!("--fn expects a function, found a predicate");
            };
            CrnDocument::Crc(compile_function(&f, grid)?.crc)
        }
        _ => bail!("exactly one of --pred and --fn is required"),
    };
    fs::write(output, print_crn(&doc)).with_context(|| format!("writing {}", output.display()))?;
    let crn = doc.crn();
    eprintln!("{} species, {} reactions", crn.num_species(), crn.reactions().len());
    Ok(0)
}

fn analyze(path: &Path, check: Option<String>, from: Option<String>) -> Result<u8> {
    let doc = load_crn(path)?;
    let crn = doc.crn();
    let mut out = String::new();
    let code = if let Some(text) = check {
        let mut weights = vec![0u64; crn.num_species()];
        for (name, w) in parse::weights(&text)? {
            let s = crn.species_id(&name).with_context(|| format!("unknown species `{name}`"))?;
            weights[s.index()] = w;
        }
        let ok = PotentialFunction::from_u64(&weights).validate(crn);
        out.push_str(if ok { "potential valid\n" } else { "potential invalid\n" });
        u8::from(!ok)
    } else {
        match find_potential(crn) {
            BoundednessCertificate::Bounded(p) => {
                out.push_str("bounded\npotential:\n");
                out.push_str(&indent(&p.to_text(crn)));
                if let Some(text) = &from {
                    let x = initial(&doc, text)?;
                    out.push_str(&format!("execution length bound: {}\n", execution_length_bound(&p, &x)));
                }
                0
            }
            BoundednessCertificate::Unbounded(w) => {
                out.push_str("unbounded\nreaction multiset with M u >= 0:\n");
                for (j, u) in w.multiplicities().iter().enumerate() {
                    out.push_str(&format!("  {j}: {u}  # {}\n", crn.describe_reaction(&crn.reactions()[j])));
                }
                1
            }
        }
    };
    out.push_str(&match reaction_feedforward_order(crn) {
        Some(order) => format!(
            "reaction-feedforward: {}\n",
            order.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ")
        ),
        None => "reaction-feedforward: none\n".into(),
    });
    out.push_str(&match species_feedforward_order(crn) {
        Some(order) => format!(
            "species-feedforward: {}\n",
            order.iter().map(|&s| crn.name(s)).collect::<Vec<_>>().join(", ")
        ),
        None => "species-feedforward: none\n".into(),
    });
    io::stdout().write_all(out.as_bytes())?;
    Ok(code)
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn counterexample_json(crn: &Crn, c: &Counterexample) -> Value {
    json!({
        "init": crn.describe(&c.init),
        "reactions": c.reactions.iter().map(|&j| crn.describe_reaction(&crn.reactions()[j])).collect::<Vec<_>>(),
        "final": c.last(crn).map(|x| crn.describe(&x)).unwrap_or_default(),
    })
}

fn verdict_json(crn: &Crn, v: &Verdict, skipped: usize) -> Value {
    json!({
        "status": v.status.to_string(),
        "checked": v.records.len(),
        "skipped": skipped,
        "records": v.records.iter().map(|r| json!({
            "input": r.input,
            "expected": r.expected.to_string(),
            "observed": r.observed.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "status": r.status.to_string(),
            "reason": r.reason,
            "explored": r.explored,
            "counterexample": r.counterexample.as_ref().map(|c| counterexample_json(crn, c)),
        })).collect::<Vec<_>>(),
    })
}

fn verdict_table(crn: &Crn, v: &Verdict, skipped: usize) -> String {
    let mut out = String::from("input\texpected\tobserved\tstatus\texplored\n");
    for r in &v.records {
        let input: Vec<String> = r.input.iter().map(|x| x.to_string()).collect();
        let observed: Vec<String> = r.observed.iter().map(|o| o.to_string()).collect();
        out.push_str(&format!(
            "({})\t{}\t{}\t{}\t{}\n",
            input.join(","),
            r.expected,
            observed.join("|"),
            r.status,
            r.explored
        ));
        if let Some(reason) = &r.reason {
            out.push_str(&format!("  {reason}\n"));
        }
        if let Some(c) = &r.counterexample {
            out.push_str(&format!("  from {}\n", crn.describe(&c.init)));
            for &j in &c.reactions {
                out.push_str(&format!("    {}\n", crn.describe_reaction(&crn.reactions()[j])));
            }
        }
    }
    out.push_str(&format!("{}: {} inputs checked", v.status, v.records.len()));
    if skipped > 0 {
        out.push_str(&format!(", {skipped} skipped"));
    }
    out.push('\n');
    out
}

#[allow(clippy::too_many_arguments)]
fn verify(
    path: &Path,
    spec: &str,
    inputs: &str,
    format: Format,
    max_configs: usize,
    max_depth: usize,
    no_reduction: bool,
    single_voting: bool,
) -> Result<u8> {
    let doc = load_crn(path)?;
    let spec = load_spec(spec)?;
    let opts = VerifyOptions {
        limits: Limits { max_configs, max_depth },
        reduction: if no_reduction { Reduction::None } else { Reduction::Stubborn },
        single_voting,
    };
    let (verdict, skipped) = match (&doc, &spec) {
        (CrnDocument::Crd(crd), SpecDocument::Predicate(p)) => {
            if crd.inputs().len() != p.vars().len() {
                bail!("network has {} inputs, predicate has {} variables", crd.inputs().len(), p.vars().len());
            }
            let all = parse::points(&parse::ranges(inputs, p.vars().len())?);
            // Without a leader the zero input is not a valid initial configuration.
            let leaderless = crd.context().is_zero();
            let xs: Vec<Vec<u64>> = all.iter().filter(|x| !(leaderless && x.iter().all(|&v| v == 0))).cloned().collect();
            (verify_decider(crd, p, &xs, &opts)?, all.len() - xs.len())
        }
        (CrnDocument::Crc(crc), SpecDocument::Function(f)) => {
            if crc.inputs().len() != f.vars().len() {
                bail!("network has {} inputs, function has {} variables", crc.inputs().len(), f.vars().len());
            }
            let all = parse::points(&parse::ranges(inputs, f.vars().len())?);
            // Points outside every piece are outside the function's domain.
            let xs: Vec<Vec<u64>> = all.iter().filter(|x| !f.covering(x).is_empty()).cloned().collect();
            (verify_computer(crc, f, &xs, &opts)?, all.len() - xs.len())
        }
        (CrnDocument::Crd(_), SpecDocument::Function(_)) => bail!("a decider needs a predicate spec"),
        (CrnDocument::Crc(_), SpecDocument::Predicate(_)) => bail!("a computer needs a function spec"),
        (CrnDocument::Crn(_), _) => bail!("the network declares neither voters nor an output"),
    };
    let crn = doc.crn();
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&verdict_json(crn, &verdict, skipped))?),
        Format::Table => verdict_table(crn, &verdict, skipped),
    };
    io::stdout().write_all(text.as_bytes())?;
    Ok(match verdict.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 2,
    })
}

fn simulate(path: &Path, molecules: &str, seed: u64, volume: Option<f64>, trials: u64, max_steps: u64) -> Result<u8> {
    let doc = load_crn(path)?;
    let crn = doc.crn();
    let init = initial(&doc, molecules)?;
    let n: u64 = parse::molecules(molecules)?.iter().map(|(_, k)| k).sum();
    let volume = volume.unwrap_or_else(|| default_volume(&init));
    let mut records = Vec::new();
    for t in 0..trials {
        let s = trial_seed(seed, n, t);
        let mut r = run_to_terminal(crn, &init, volume, s, max_steps)?;
        r.n = n;
        eprintln!("trial {t}: terminal {}", crn.describe(&r.terminal));
        records.push(r);
    }
    write_csv(&records, io::stdout().lock())?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    path: &Path,
    sizes: &str,
    trials: u64,
    input_species: Option<String>,
    seed: u64,
    volume: Option<f64>,
    max_steps: u64,
    csv: Option<PathBuf>,
) -> Result<u8> {
    let doc = load_crn(path)?;
    let crn = doc.crn();
    let targets = match input_species {
        Some(list) => list
            .split(',')
            .map(|name| crn.species_id(name.trim()).with_context(|| format!("unknown species `{name}`")))
            .collect::<Result<Vec<_>>>()?,
        None => match &doc {
            CrnDocument::Crd(d) => d.inputs().iter().take(1).copied().collect(),
            CrnDocument::Crc(c) => c.inputs().iter().take(1).copied().collect(),
            CrnDocument::Crn(_) => Vec::new(),
        },
    };
    if targets.is_empty() {
        bail!("no input species; pass --input-species");
    }
    let context = match &doc {
        CrnDocument::Crn(c) => c.zero_config(),
        CrnDocument::Crd(d) => d.context().clone(),
        CrnDocument::Crc(c) => c.context().clone(),
    };
    let sizes = parse::sizes(sizes)?;
    let config = BenchConfig {
        trials,
        master_seed: seed,
        max_steps,
        volume,
    };
    let k = targets.len() as u64;
    let records = bench_stabilization(crn, &sizes, &config, |n| {
        let mut x = context.clone();
        for (i, &s) in targets.iter().enumerate() {
            x.add(s, n / k + u64::from((i as u64) < n % k))?;
        }
        Ok(x)
    })?;
    if let Some(path) = csv {
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&records, io::BufWriter::new(file))?;
    }
    io::stdout().write_all(summary_markdown(&summarize(&records)).as_bytes())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compile {
            pred,
            function,
            output,
            all_voting,
            grid,
        } => compile(pred, function, &output, all_voting, grid),
        Command::Analyze {
            input,
            check_potential,
            from,
        } => analyze(&input, check_potential, from),
        Command::Verify {
            input,
            spec,
            inputs,
            format,
            max_configs,
            max_depth,
            no_reduction,
            single_voting,
        } => verify(&input, &spec, &inputs, format, max_configs, max_depth, no_reduction, single_voting),
        Command::Simulate {
            input,
            molecules,
            seed,
            volume,
            trials,
            max_steps,
        } => simulate(&input, &molecules, seed, volume, trials, max_steps),
        Command::Bench {
            input,
            sizes,
            trials,
            input_species,
            seed,
            volume,
            max_steps,
            csv,
        } => bench(&input, &sizes, trials, input_species, seed, volume, max_steps, csv),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

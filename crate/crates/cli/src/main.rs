use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use thinwidth::families::{GenGParams, TemplateSpec, TypeNParams};
use thinwidth::harness::oracle::{oracle_minimum, Constraints};
use thinwidth::harness::{self, render_profile, report_emit, Format, SweepSpec};
use thinwidth::thinning::{self, Hypothesis, ThinningOutcome};
use thinwidth::{MorsePresentation, TemplateDiagram};

#[derive(Parser)]
#[command(
    name = "thinwidth",
    version,
    about = "Width and thinning moves for Morse presentations of knots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Width, level profile and thick/thin spheres of a presentation.
    Width {
        file: PathBuf,
        /// Treat the file as a template and compile it first.
        #[arg(long)]
        template: bool,
    },
    /// Compile a diagram family to a presentation.
    Construct {
        #[arg(long, value_enum, default_value = "type-n")]
        family: FamilyArg,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a thinning script and certify the result.
    Thin {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: Strategy,
        /// Write the certified trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the thinned presentation here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and write a report.
    Verify {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// csv, tsv or text; defaults from the output extension.
        #[arg(long)]
        format: Option<String>,
        /// Record per-row wall-clock milliseconds.
        #[arg(long)]
        timing: bool,
    },
    /// Exhaustive minimum width over admissible orderings.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = harness::DEFAULT_BUDGET)]
        budget: usize,
        /// Treat the file as a template; bundles then constrain the order.
        #[arg(long)]
        template: bool,
    },
    /// Text rendering of the level profile.
    Render {
        file: PathBuf,
        #[arg(long)]
        template: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    TypeN,
    GenG,
    GenL,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Strategy {
    Auto,
    Lemma32,
    Lemma34,
    Composite,
    Prop43,
    Prop44,
    Prop45,
    Prop47,
}

#[derive(Args)]
struct ParamArgs {
    /// Template file.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Bundle sizes, e.g. 3,3,3 (type-n).
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    /// First-column bundle sizes (gen-g).
    #[arg(long, value_delimiter = ',')]
    s1: Vec<usize>,
    /// Second-column bundle sizes (gen-g).
    #[arg(long, value_delimiter = ',')]
    s2: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    slack: usize,
    #[arg(long, value_delimiter = ',')]
    left_minima: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    right_maxima: Vec<usize>,
}

/// Input problems exit with status 2; bound violations with status 1.
#[derive(Debug)]
struct Violation(String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Violation {}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

impl ParamArgs {
    fn spec(&self, family: Option<FamilyArg>) -> Result<TemplateSpec> {
        if let Some(p) = &self.params {
            let spec = TemplateSpec::parse(&read(p)?)
                .with_context(|| format!("parsing {}", p.display()))?;
            return Ok(spec);
        }
        let fill = |v: &Vec<usize>, n: usize| {
            if v.is_empty() {
                vec![self.slack; n]
            } else {
                v.clone()
            }
        };
        match family.unwrap_or(FamilyArg::TypeN) {
            FamilyArg::TypeN => {
                if self.s.is_empty() {
                    bail!("give --params <file> or --s");
                }
                let n = self.s.len();
                Ok(TemplateSpec::TypeN(TypeNParams {
                    n,
                    s: self.s.clone(),
                    left_minima: fill(&self.left_minima, n),
                    right_maxima: fill(&self.right_maxima, n),
                }))
            }
            FamilyArg::GenG => {
                if self.s1.is_empty() || self.s2.is_empty() {
                    bail!("gen-g needs --s1 and --s2");
                }
                let n = self.s1.len();
                Ok(TemplateSpec::GenG(GenGParams {
                    n,
                    s1: self.s1.clone(),
                    s2: self.s2.clone(),
                    left_minima: fill(&self.left_minima, n),
                    right_maxima: fill(&self.right_maxima, n),
                }))
            }
            FamilyArg::GenL => bail!("gen-l diagrams are read from a --params file"),
        }
    }
}

fn load(file: &Path, template: bool) -> Result<(MorsePresentation, Option<TemplateDiagram>)> {
    let text = read(file)?;
    if template {
        let d = TemplateSpec::parse(&text)
            .and_then(|s| s.build())
            .with_context(|| format!("building {}", file.display()))?;
        let p = d.compile()?;
        Ok((p, Some(d)))
    } else {
        let p = MorsePresentation::parse(&text)
            .with_context(|| format!("parsing {}", file.display()))?;
        Ok((p, None))
    }
}

fn print_outcome(o: &ThinningOutcome) {
    println!("hypothesis {}", o.hypothesis);
    println!("params     {}", o.params);
    println!("w_before   {}", o.w_before);
    println!("w_after    {}", o.w_after);
    println!("delta      {}", o.delta);
    println!(
        "bound      {}",
        o.bound.map_or("-".to_string(), |b| b.to_string())
    );
    if let Some(c) = o.closed_form {
        println!("closed     {c}");
    }
    for s in &o.steps {
        println!("step       {} {} delta={}", s.hypothesis, s.params, s.delta);
    }
    println!("moves      {}", o.trace.moves.len());
    println!("pass       {}", o.passes());
}

fn thin(spec: &TemplateSpec, strategy: Strategy) -> Result<ThinningOutcome> {
    let out = match (spec, strategy) {
        (TemplateSpec::TypeN(p), Strategy::Auto) => thinning::thin_pipeline(p)?,
        (TemplateSpec::TypeN(p), Strategy::Lemma32) => thinning::reduce_n_minus_1(p)?,
        (TemplateSpec::TypeN(p), Strategy::Lemma34) => thinning::reduce_n_minus_2(p)?,
        (TemplateSpec::TypeN(p), Strategy::Composite) => {
            let idx = p.s[..p.n.saturating_sub(1)]
                .iter()
                .position(|&s| s == 1)
                .ok_or_else(|| anyhow!("no s_p = 1 with p < n"))?;
            thinning::composite_reduction(p, idx + 1)?
        }
        (TemplateSpec::TypeN(p), Strategy::Prop43 | Strategy::Prop44 | Strategy::Prop45) => {
            thinning::gen_reduce(&p.as_gen_g(), hypothesis(strategy))?
        }
        (TemplateSpec::GenG(g), Strategy::Prop43 | Strategy::Prop44 | Strategy::Prop45) => {
            thinning::gen_reduce(g, hypothesis(strategy))?
        }
        (TemplateSpec::GenG(g), Strategy::Auto) => {
            let mode = if thinning::prop43_hypothesis(g) {
                Hypothesis::Prop43
            } else if thinning::prop44_hypothesis(g) {
                Hypothesis::Prop44
            } else if thinning::prop45_minimum(g).is_some() {
                Hypothesis::Prop45
            } else {
                bail!("{} satisfies none of the generalized hypotheses", g.key());
            };
            thinning::gen_reduce(g, mode)?
        }
        (TemplateSpec::GenL(_), Strategy::Auto | Strategy::Prop47) => {
            thinning::prop47_move(&spec.build()?)?
        }
        (s, _) => bail!("strategy does not apply to a {} template", s.family()),
    };
    Ok(out)
}

fn hypothesis(s: Strategy) -> Hypothesis {
    match s {
        Strategy::Prop43 => Hypothesis::Prop43,
        Strategy::Prop44 => Hypothesis::Prop44,
        _ => Hypothesis::Prop45,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Width { file, template } => {
            let (p, _) = load(&file, template)?;
            p.check_valid()?;
            let prof = p.profile()?;
            println!("width {}", prof.width());
            println!(
                "profile {}",
                prof.counts
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            if p.is_knot() {
                let r = p.thick_thin()?;
                let j = |v: &[i64]| {
                    v.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                println!("thick {}", j(&r.thick));
                println!("thin {}", j(&r.thin));
            }
        }
        Command::Construct {
            family,
            params,
            out,
        } => {
            let spec = params.spec(Some(family))?;
            let p = spec.build()?.compile()?;
            let text = p.serialize();
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            eprintln!("{} events, width {}", p.len(), p.width_direct()?);
        }
        Command::Thin {
            params,
            strategy,
            trace,
            out,
        } => {
            let spec = params.spec(None)?;
            let o = thin(&spec, strategy)?;
            print_outcome(&o);
            if let Some(path) = trace {
                write(&path, &o.trace.to_text(&o.params, "after"))?;
            }
            if let Some(path) = out {
                write(&path, &o.after.serialize())?;
            }
            if !o.passes() {
                return Err(
                    Violation(format!("reduction {} below bound {:?}", o.delta, o.bound)).into(),
                );
            }
        }
        Command::Verify {
            sweep,
            out,
            format,
            timing,
        } => {
            let mut spec = SweepSpec::load(&sweep)?;
            spec.timing |= timing;
            let format = match format {
                Some(f) => f.parse::<Format>()?,
                None => Format::from_path(&out),
            };
            let (rows, summary) = harness::sweep_verify(&spec)?;
            report_emit(&rows, format, &out)?;
            println!("{summary}");
            for r in rows.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {} delta={} bound={:?} {}",
                    r.key(),
                    r.delta,
                    r.bound,
                    r.error.as_deref().unwrap_or("")
                );
            }
            if !summary.all_pass() {
                return Err(Violation(format!(
                    "{} failing rows",
                    summary.total().failed + summary.total().errors
                ))
                .into());
            }
        }
        Command::Oracle {
            file,
            budget,
            template,
        } => {
            let (p, d) = load(&file, template)?;
            p.check_valid()?;
            let c = d
                .as_ref()
                .map_or_else(Constraints::none, |d| Constraints::from_diagram(&p, d));
            let r = oracle_minimum(&p, &c, budget)?;
            println!("direct {}", p.width_direct()?);
            println!("minimum {}", r.width);
            println!("order {}", r.presentation(&p).kinds_string());
        }
        Command::Render { file, template } => {
            let (p, _) = load(&file, template)?;
            print!("{}", render_profile(&p)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("THINWIDTH_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    log::warn!("could not size thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: THINWIDTH_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<Violation>().is_some() => {
            eprintln!("violation: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

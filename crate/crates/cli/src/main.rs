use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ks_core::canon::{canonical_labeling, IsoFilter};
use ks_core::coloring::{find_coloring, is_critical};
use ks_core::geometry::{build_600cell, format_vectors};
use ks_core::loops::{
    annotate, biggest_loop, emit_layout, loop_arrangements, Backend, LayoutConfig,
};
use ks_core::mmp::parse_mmp_lines;
use ks_core::stats::{
    confidence_bounds, coupon_mle, real, survey_aggregate, CouponEstimate, SurveyRecord,
    DEFAULT_DIGITS,
};
use ks_core::strip::{enumerate_subsets, SamplerSeed, SelectionMode, StripPlan};
use ks_core::survey::{run_survey, SurveyConfig};
use ks_core::{serialize_mmp, Hypergraph, ParseOptions, VertexId};

#[derive(Parser)]
#[command(name = "ks", version, about = "Kochen-Specker sets as MMP hypergraphs")]
struct Cli {
    /// Accept doubled commas and a missing final '.' in input lines.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the subsets obtained by removing K edges from each input line.
    Strip(StripArgs),
    /// Write one canonical form per isomorphism class.
    Canon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print each input's vertex mapping onto its canonical form.
        #[arg(long)]
        mapping: bool,
        /// Keep one output line per input instead of one per class.
        #[arg(long)]
        all: bool,
    },
    /// Split the input into colorable and KS (non-colorable) sets.
    Color {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_colorable: PathBuf,
        #[arg(long)]
        out_ks: PathBuf,
        /// Print the vertices colored 1 for each colorable set.
        #[arg(long)]
        witness: bool,
    },
    /// Keep the critical KS sets.
    Critical {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the biggest loop of each input with its annotated edge list.
    Loops(LoopsArgs),
    /// Build the 60-ray, 75-basis set of the 600-cell.
    Cell600 {
        #[arg(long)]
        out_mmp: PathBuf,
        #[arg(long)]
        out_vectors: Option<PathBuf>,
    },
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run or resume a staged survey.
    Survey {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct StripArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Half-open range START:END of colex ranks.
    #[arg(long, value_parser = parse_window)]
    window: Option<(u128, u128)>,
    #[arg(long, default_value_t = 1.0)]
    increment: f64,
    /// Keep each subset with probability 1/increment instead of every
    /// increment-th one.
    #[arg(long)]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    connected_only: bool,
    #[arg(long)]
    renormalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LoopsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Print every arrangement of the biggest loop, not just one.
    #[arg(long)]
    all_max: bool,
    /// Write one drawing per input into this directory.
    #[arg(long)]
    draw: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BackendArg::Svg)]
    backend: BackendArg,
    #[arg(long, default_value_t = 1.0)]
    tension: f64,
    #[arg(long, default_value_t = 1.0)]
    curl: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Svg,
    Asy,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Maximum-likelihood class count from N draws showing C classes.
    Coupon {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c: u64,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        digits: usize,
    },
    /// Confidence bounds on the number of successes among K.
    Bounds {
        #[arg(long = "K")]
        k: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "0.95")]
        level: String,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        digits: usize,
    },
    /// Tabulate JSON-lines survey records; plot data goes to OUT.plot.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0.95")]
        level: String,
        #[arg(long, default_value_t = 40)]
        digits: usize,
    },
}

fn parse_window(s: &str) -> Result<(u128, u128), String> {
    let (a, b) = s.split_once(':').ok_or("expected START:END")?;
    let a = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn read_lines(path: &Path, lenient: bool) -> Result<Vec<Hypergraph>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let opts = if lenient {
        ParseOptions::lenient()
    } else {
        ParseOptions::strict()
    };
    parse_mmp_lines(&text, opts)
        .map_err(|(line, e)| anyhow::anyhow!("{} line {line}: {e}", path.display()))
}

fn write_lines<'a>(path: &Path, hs: impl IntoIterator<Item = &'a Hypergraph>) -> Result<usize> {
    let mut out = String::new();
    let mut n = 0;
    for h in hs {
        out.push_str(&serialize_mmp(h));
        out.push('\n');
        n += 1;
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(n)
}

fn vertex_list(vs: impl IntoIterator<Item = VertexId>) -> String {
    let mut s = String::new();
    for v in vs {
        v.write_to(&mut s);
    }
    s
}

fn strip(args: StripArgs, lenient: bool) -> Result<()> {
    let mut plan = StripPlan::remove(args.k)
        .increment(
            args.increment,
            if args.random {
                SelectionMode::Randomized
            } else {
                SelectionMode::Uniform
            },
        )
        .connected_only(args.connected_only)
        .renormalize(args.renormalize);
    if let Some((a, b)) = args.window {
        plan = plan.window(a, b);
    }
    if args.random {
        plan = plan.seed(
            args.seed
                .map_or_else(SamplerSeed::from_entropy, SamplerSeed::user),
        );
    }
    let mut out = std::io::BufWriter::new(
        fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?,
    );
    let mut count = 0u64;
    for h in read_lines(&args.input, lenient)? {
        for s in enumerate_subsets(&h, &plan)? {
            writeln!(out, "{}", serialize_mmp(&s.hypergraph))?;
            count += 1;
        }
    }
    out.flush()?;
    log::info!("wrote {count} hypergraphs");
    Ok(())
}

fn canon(input: &Path, out: &Path, mapping: bool, all: bool, lenient: bool) -> Result<()> {
    let mut seen = IsoFilter::new();
    let mut text = String::new();
    for (i, h) in read_lines(input, lenient)?.iter().enumerate() {
        let lab = canonical_labeling(h);
        if mapping {
            let mut pairs: Vec<_> = lab.vertex_label.iter().collect();
            pairs.sort();
            let map: Vec<String> = pairs
                .into_iter()
                .map(|(&from, &to)| format!("{from}>{}", VertexId(to)))
                .collect();
            println!("{}\t{}", i + 1, map.join(" "));
        }
        if all || seen.insert(lab.form.clone()) {
            text.push_str(lab.form.as_str());
            text.push('\n');
        }
    }
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn color(input: &Path, colorable: &Path, ks: &Path, witness: bool, lenient: bool) -> Result<()> {
    let hs = read_lines(input, lenient)?;
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        match find_coloring(h) {
            Some(c) => {
                if witness {
                    println!("{}\t{}", i + 1, vertex_list(c.ones()));
                }
                yes.push(h);
            }
            None => no.push(h),
        }
    }
    write_lines(colorable, yes)?;
    let n = write_lines(ks, no)?;
    log::info!("{n} of {} are KS sets", hs.len());
    Ok(())
}

fn loops(args: LoopsArgs, lenient: bool) -> Result<()> {
    let cfg = LayoutConfig {
        tension: args.tension,
        curl: args.curl,
        backend: match args.backend {
            BackendArg::Svg => Backend::Svg,
            BackendArg::Asy => Backend::Asymptote,
        },
        ..LayoutConfig::default()
    };
    if cfg.tension.is_nan() || cfg.tension <= 0.0 {
        bail!("tension must be positive");
    }
    if let Some(dir) = &args.draw {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for (i, h) in read_lines(&args.input, lenient)?.iter().enumerate() {
        let (n, witness) = biggest_loop(h)?;
        let Some(lp) = witness else {
            println!("{}\t0\t-", i + 1);
            continue;
        };
        let loops = if args.all_max {
            loop_arrangements(h, n)?
        } else {
            vec![lp]
        };
        for lp in &loops {
            println!("{}\t{n}\t{}", i + 1, annotate(h, lp));
        }
        if let Some(dir) = &args.draw {
            let ext = match cfg.backend {
                Backend::Svg => "svg",
                Backend::Asymptote => "asy",
            };
            let path = dir.join(format!(
                "{:03}-{}-{}.{ext}",
                i + 1,
                h.num_vertices(),
                h.num_edges()
            ));
            fs::write(&path, emit_layout(h, &loops[0], &cfg))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn cell600(out_mmp: &Path, out_vectors: Option<&Path>) -> Result<()> {
    let cell = build_600cell()?;
    write_lines(out_mmp, [&cell.hypergraph])?;
    if let Some(p) = out_vectors {
        fs::write(p, format_vectors(&cell.rays))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn stats(cmd: StatsCommand) -> Result<()> {
    match cmd {
        StatsCommand::Coupon { n, c, digits } => match coupon_mle(n, c, digits)? {
            CouponEstimate::Finite(j) => println!("{j}"),
            CouponEstimate::Unbounded { cap } => println!("unbounded (no solution up to {cap})"),
        },
        StatsCommand::Bounds {
            k,
            n,
            m,
            level,
            digits,
        } => {
            let b = confidence_bounds(&real(&k, digits)?, n, m, &real(&level, digits)?, digits)?;
            println!("lower\t{}", b.lower);
            println!("upper\t{}", b.upper);
        }
        StatsCommand::Aggregate {
            input,
            out,
            level,
            digits,
        } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let records = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| {
                    serde_json::from_str::<SurveyRecord>(l)
                        .with_context(|| format!("{} line {}", input.display(), i + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            let report = survey_aggregate(&records, &real(&level, digits)?, digits)?;
            fs::write(&out, report.to_table())
                .with_context(|| format!("writing {}", out.display()))?;
            let mut plot = out.into_os_string();
            plot.push(".plot");
            fs::write(&plot, report.to_plot_data())
                .with_context(|| format!("writing {}", plot.to_string_lossy()))?;
            println!(
                "criticals\t{}\t[{}, {}]",
                report.total_point, report.total_lower, report.total_upper
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let lenient = cli.lenient;
    let result = match cli.command {
        Command::Survey { config } => {
            let outcome = SurveyConfig::load(&config).and_then(|cfg| run_survey(&cfg));
            return match outcome {
                Ok(o) => {
                    log::info!("survey finished with seed {}", o.seed);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            };
        }
        Command::Strip(args) => strip(args, lenient),
        Command::Canon {
            input,
            out,
            mapping,
            all,
        } => canon(&input, &out, mapping, all, lenient),
        Command::Color {
            input,
            out_colorable,
            out_ks,
            witness,
        } => color(&input, &out_colorable, &out_ks, witness, lenient),
        Command::Critical { input, out } => read_lines(&input, lenient)
            .and_then(|hs| write_lines(&out, hs.iter().filter(|h| is_critical(h))).map(drop)),
        Command::Loops(args) => loops(args, lenient),
        Command::Cell600 {
            out_mmp,
            out_vectors,
        } => cell600(&out_mmp, out_vectors.as_deref()),
        Command::Stats(cmd) => stats(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tubelab::cli_report::{
    cmd_analyze, cmd_plot, cmd_presets, cmd_verify, parse_point, CliError, DomainSource, Formats, RunConfig, EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "tubelab", version, about = "Interval-verified hyperbolicity obstructions for tube-domain bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property searches, the obstruction scan and the metric bounds.
    Analyze(AnalyzeArgs),
    /// Draw the domain with the image band of f_n.
    Plot(PlotArgs),
    /// Re-verify a certificate document without searching.
    Verify { path: PathBuf },
    /// Print the built-in presets as spec files.
    Presets,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Domain spec file (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Built-in domain: fig1, fig2 or strip.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn domain(&self) -> DomainSource {
        match (&self.spec, &self.preset) {
            (Some(p), _) => DomainSource::Spec(p.clone()),
            (None, Some(name)) => DomainSource::Preset(name.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    /// Base point `x,y`.
    #[arg(long, default_value = "0,2", allow_hyphen_values = true)]
    point: String,
    /// Largest k for the property searches.
    #[arg(long = "K", default_value_t = 20)]
    max_k: u32,
    /// Largest n in the obstruction scan.
    #[arg(long = "N", default_value_t = 50)]
    max_n: u32,
    /// Bisection depth of the searches.
    #[arg(long, default_value_t = 30)]
    depth: u32,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated subset of json,csv,svg.
    #[arg(long, default_value = "json,csv,svg")]
    format: String,
    /// n of the plotted band.
    #[arg(long, default_value_t = 3)]
    n: u32,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 3)]
    n: u32,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "svg,csv")]
    format: String,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze(a) => {
            let mut cfg = RunConfig::new(a.source.domain(), parse_point(&a.point)?);
            cfg.max_k = a.max_k;
            cfg.max_n = a.max_n;
            cfg.depth = a.depth;
            cfg.seed = a.seed;
            cfg.out = a.out;
            cfg.formats = Formats::parse(&a.format)?;
            cfg.plot_n = a.n;
            let out = cmd_analyze(&cfg)?;
            let rep = &out.document.report;
            println!("domain {} at ({}, {})", rep.domain, rep.base_point.x1, rep.base_point.x2);
            println!("  (L)        {:?}", rep.property_l.verdict);
            println!("  (J-P)_aff  {:?}", rep.property_jpaff.verdict);
            println!("  (J-P)      {:?}", rep.property_jp.verdict);
            match &rep.obstruction {
                Some(c) => println!("  obstruction {:?}", c.verdict),
                None => println!("  obstruction scan skipped (base point is not (0, mid))"),
            }
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for p in &out.written {
                println!("wrote {}", p.display());
            }
            Ok(out.exit_code)
        }
        Command::Plot(p) => {
            for path in cmd_plot(&p.source.domain(), p.n, &p.out, Formats::parse(&p.format)?)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Verify { path } => {
            let doc = cmd_verify(&path)?;
            println!("{}: verified ({} on {})", path.display(), doc.checksum, doc.domain.name);
            Ok(0)
        }
        Command::Presets => {
            print!("{}", cmd_presets());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Command-line front end for the `lamptree` library.
//!
//! Parameters come from three places, later ones winning: a `--config`
//! file, the `LAMPTREE_SEED` environment variable (seed only, and only when
//! the file does not set one), and command-line flags.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, CommandFactory, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod registry;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use output::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "lamptree", version, about = "Return probabilities of the lamplighter walk over regular trees")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Exact p_2n by the range-weighted walk sum
    Exact,
    /// p_2n by percolation Monte Carlo
    Mc,
    /// p_2n by simulating the lamplighter chain
    Chainsim,
    /// Trap lower bound at one depth, with the trap's radial spectrum
    Trap,
    /// Trap lower bound maximized over the depth
    OptimizeTrap,
    /// Top eigenpairs of killed operators on root clusters or a forward trap
    Spectrum,
    /// Rooted-shift norms and numerical radius; calibration table with --samples
    Shift,
    /// Sparse-ball certificate on root clusters
    Certificate,
    /// Frequency of dense root balls
    DenseProb,
    /// Witness rank experiment
    WitnessRank,
    /// Correction functional L(n) from several sources
    Correction,
    /// Spectral split of the upper bound
    UpperSplit,
    /// Every module's invariant checks
    Selftest,
}

impl Command {
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn from_name(name: &str) -> Option<Self> {
        registry::SUBCOMMANDS
            .iter()
            .position(|s| *s == name)
            .map(|i| registry::COMMANDS[i])
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let i = registry::COMMANDS.iter().position(|c| c == self).expect("registered");
        f.write_str(registry::SUBCOMMANDS[i])
    }
}

/// Flags shared by every subcommand. Values stay textual until the
/// subcommand parses them, so config files and flags go through one parser.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Tree degree (at least 3)
    #[arg(long, global = true)]
    d: Option<String>,
    /// Half the walk length, or the horizon for bounds
    #[arg(long, global = true)]
    n: Option<String>,
    /// Trap depth or ball radius of the density test
    #[arg(long, global = true)]
    r: Option<String>,
    /// Density threshold as a fraction of b^r
    #[arg(long, global = true)]
    a: Option<String>,
    /// Relative spectral gap below rho_d
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Radius of the sampling arena (inner radius for witness-rank)
    #[arg(long, global = true)]
    radius: Option<String>,
    /// Monte Carlo samples or sampled instances
    #[arg(long, global = true)]
    samples: Option<String>,
    /// Master seed [env: LAMPTREE_SEED]
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv, plotdata or json-lines
    #[arg(long, global = true)]
    format: Option<String>,
    /// key = value file with default parameters
    #[arg(long, global = true)]
    config: Option<String>,
    /// Merge parallel partial results in block order
    #[arg(long, global = true)]
    deterministic_reduce: bool,
    /// Record wall-clock times in the output
    #[arg(long, global = true)]
    timing: bool,
    /// Slack in the spectral gap exponent (default kappa_d / 8)
    #[arg(long, global = true)]
    eta: Option<String>,
    /// Largest shift power
    #[arg(long, global = true)]
    k_max: Option<String>,
    /// Gauge angles in the shift sweep
    #[arg(long, global = true)]
    theta_grid: Option<String>,
    /// Comma-separated horizons for the correction curve
    #[arg(long, global = true)]
    n_list: Option<String>,
    /// Comma-separated correction sources
    #[arg(long, global = true)]
    sources: Option<String>,
    /// Constant c of the hypothesized spectral tail
    #[arg(long, global = true)]
    tail_c: Option<String>,
    /// Node budget of the exact walk sum
    #[arg(long, global = true)]
    budget: Option<String>,
}

impl Flags {
    fn into_config(self) -> CliResult<ExperimentConfig> {
        let mut c = ExperimentConfig::default();
        let pairs = [
            ("d", self.d),
            ("n", self.n),
            ("r", self.r),
            ("a", self.a),
            ("delta", self.delta),
            ("radius", self.radius),
            ("samples", self.samples),
            ("seed", self.seed),
            ("threads", self.threads),
            ("out", self.out),
            ("format", self.format),
            ("eta", self.eta),
            ("k-max", self.k_max),
            ("theta-grid", self.theta_grid),
            ("n-list", self.n_list),
            ("sources", self.sources),
            ("tail-c", self.tail_c),
            ("budget", self.budget),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                c.set(k, v)?;
            }
        }
        if self.deterministic_reduce {
            c.set("deterministic-reduce", "true")?;
        }
        if self.timing {
            c.set("timing", "true")?;
        }
        Ok(c)
    }
}

/// Names of the subcommands clap knows about, in declaration order.
pub fn clap_subcommands() -> Vec<String> {
    Cli::command()
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect()
}

/// Resolves parameters from `args`, the seed environment value and an
/// optional config file.
pub fn resolve<I, T>(args: I, env_seed: Option<String>) -> CliResult<(Command, ExperimentConfig)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        let text = e.render().to_string();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(text),
            _ => CliError::Usage(text),
        }
    })?;
    let config_path = cli.flags.config.clone();
    let from_flags = cli.flags.into_config()?;

    let mut config = match &config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io {
                path: p.clone(),
                message: e.to_string(),
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if config.get("seed").is_none() {
        if let Some(s) = env_seed {
            config
                .set("seed", s.trim())
                .map_err(|_| CliError::invalid("seed", &s, "LAMPTREE_SEED is not a valid value"))?;
            config
                .value::<u64>("seed")
                .map_err(|_| CliError::invalid("seed", &s, "LAMPTREE_SEED must be an unsigned integer"))?;
        }
    }
    let file_command = config.subcommand.clone();
    config.overlay(&from_flags);

    let command = match (cli.command, file_command) {
        (Some(c), Some(f)) if c.name() != f => {
            return Err(CliError::SubcommandConflict {
                file: f,
                cli: c.name(),
            })
        }
        (Some(c), _) => c,
        (None, Some(f)) => Command::from_name(&f)
            .ok_or_else(|| CliError::invalid("config", &f, "not a subcommand"))?,
        (None, None) => return Err(CliError::NoSubcommand),
    };
    config.subcommand = Some(command.name());
    validate_common(&config)?;
    Ok((command, config))
}

fn validate_common(config: &ExperimentConfig) -> CliResult<()> {
    if let Some(out) = config.get("out") {
        let parent = Path::new(out).parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(CliError::invalid(
                    "out",
                    out,
                    format!("output directory {} does not exist", dir.display()),
                ));
            }
        }
    }
    if let Some(f) = config.get("format") {
        f.parse::<Format>().map_err(|e| CliError::invalid("format", f, e))?;
    }
    let threads: usize = config.value_or("threads", 1)?;
    if threads == 0 {
        return Err(CliError::invalid("threads", "0", "need at least one thread"));
    }
    config.value::<u64>("seed")?;
    config.flag("deterministic-reduce")?;
    config.flag("timing")?;
    Ok(())
}

/// Runs one invocation and returns the process exit code: 0 on success, 1 on
/// invalid input, 2 when a budget or resource limit refused the work.
pub fn run<I, T>(args: I, env_seed: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let resolved = match resolve(args, env_seed) {
        Ok(r) => r,
        Err(CliError::Help(text)) => {
            let _ = write!(stdout, "{text}");
            return 0;
        }
        Err(CliError::Usage(text)) => {
            let _ = write!(stderr, "{text}");
            return 1;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let (command, config) = resolved;
    match commands::execute(command, &config, stdout) {
        Ok(summary) => {
            let sink: &mut dyn Write = if config.get("out").is_some() { stdout } else { stderr };
            let _ = writeln!(sink, "{summary}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

//! `realcob`: command-line front end. Exit status 0 on success, 1 when a
//! mathematical check fails, 2 on bad usage.

mod commands;
mod config;
mod selftest;

use anyhow::Result;
use clap::{Parser, Subcommand};
use commands::{Outcome, PageArgs, PullbackArgs};
use config::{Format, RunConfig};
use realcob_core::par::{self, Parallelism};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Bad flags or inputs; maps to exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Parser)]
#[command(name = "realcob", version, about = "Formal group law series, BCSS charts and pullback algebra")]
struct Cli {
    /// key = value file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json, text or svg
    #[arg(long, global = true)]
    format: Option<String>,
    /// Run the engine single-threaded
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Default)]
struct WindowFlags {
    /// u positions above the bottom cell
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    u_window: Option<i64>,
    /// sigma runs over [-s, s]
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    sigma: Option<i64>,
    /// bound on the v-weight of monomials
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    weight: Option<i64>,
    /// highest a-power (Borel filtration)
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    a_max: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// The 2-series [2](u), optionally reduced
    TwoSeries {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: Option<u64>,
        /// truncation order: terms below u^N
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        /// none, 2, (2,v1), ideal:n
        #[arg(long, default_value = "none")]
        modulus: String,
        #[arg(long)]
        json: bool,
    },
    /// The universal 2-typical formal group law F(x, y)
    Fgl {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: Option<u64>,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Sign-alternating power-of-two decomposition of l
    Decompose {
        l: u64,
        /// odd, odd-even-q, odd-odd-q or even
        #[arg(long, default_value = "odd")]
        form: String,
        #[arg(long)]
        json: bool,
    },
    /// The epsilon and delta chains of l
    Chains {
        l: u64,
        /// epsilon, delta or both
        #[arg(long, default_value = "both")]
        kind: String,
        #[arg(long)]
        json: bool,
    },
    /// Differential table of RP^inf_m
    Patterns {
        /// bottom cell, or inf
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        /// last position listed (default m, or 64 for inf)
        #[arg(long)]
        i_max: Option<u64>,
    },
    /// Spectral sequence chart of RP^inf_m
    Chart {
        #[arg(long, default_value = "inf", allow_hyphen_values = true)]
        m: String,
        #[command(flatten)]
        window: WindowFlags,
        /// page to print (default E_inf)
        #[arg(long)]
        pages: Option<u64>,
        /// use the a-inverted filtration and check ranks against the cells
        #[arg(long)]
        check_tate: bool,
        /// also write the page as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Spectral sequence chart of the point
    PointBcss {
        #[command(flatten)]
        window: WindowFlags,
        #[arg(long)]
        pages: Option<u64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Pullback squares with their spanning check
    Pullback {
        /// diagonal or off
        #[arg(long, default_value = "diagonal")]
        mode: String,
        #[arg(long)]
        m: Option<u64>,
        /// toy or bundled
        #[arg(long, default_value = "toy")]
        coeffs: String,
        /// degrees (k, l) with |k|, |l| <= radius
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        radius: i64,
        /// a-layers 0..=layers (bundled table)
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        layers: i64,
        #[arg(long, allow_hyphen_values = true)]
        below: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        above: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        b_weight: Option<i64>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite k + l*ga + m*a + n*g into a computed family
    Normalize {
        #[arg(allow_negative_numbers = true)]
        k: i64,
        #[arg(allow_negative_numbers = true)]
        l: i64,
        #[arg(allow_negative_numbers = true)]
        m: i64,
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        json: bool,
    },
    /// Quick checks over every module
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Usage(e.to_string()).into()
}

fn apply_window(cfg: &mut RunConfig, w: &WindowFlags) {
    cfg.u_window = w.u_window.unwrap_or(cfg.u_window);
    cfg.sigma_window = w.sigma.unwrap_or(cfg.sigma_window);
    cfg.weight_window = w.weight.unwrap_or(cfg.weight_window);
    cfg.a_window = w.a_max.unwrap_or(cfg.a_window);
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(f) = &cli.format {
        cfg.format = Format::parse(f).map_err(usage)?;
    }
    let json = match &cli.command {
        Command::TwoSeries { json, .. }
        | Command::Fgl { json, .. }
        | Command::Decompose { json, .. }
        | Command::Chains { json, .. }
        | Command::Pullback { json, .. }
        | Command::Normalize { json, .. }
        | Command::Selftest { json, .. } => *json,
        _ => false,
    };
    if json {
        cfg.format = Format::Json;
    }
    match &cli.command {
        Command::TwoSeries { nmax, n, .. } | Command::Fgl { nmax, n, .. } => {
            cfg.nmax = nmax.map_or(cfg.nmax, |x| x as usize);
            cfg.trunc_order = n.map_or(cfg.trunc_order, |x| x as usize);
        }
        Command::Chart { window, .. } | Command::PointBcss { window, .. } => apply_window(&mut cfg, window),
        Command::Selftest { seed, .. } => cfg.seed = seed.unwrap_or(cfg.seed),
        _ => {}
    }
    Ok(cfg)
}

fn threads() -> Result<()> {
    let Ok(v) = std::env::var("REALCOB_THREADS") else { return Ok(()) };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            par::init_threads(n);
            Ok(())
        }
        _ => Err(usage(format!("REALCOB_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    threads()?;
    let cfg = configure(&cli)?;
    let mode = if cli.sequential { Parallelism::Sequential } else { Parallelism::Parallel };
    match cli.command {
        Command::TwoSeries { modulus, .. } => commands::two_series_cmd(&cfg, &modulus),
        Command::Fgl { .. } => commands::fgl_cmd(&cfg),
        Command::Decompose { l, form, .. } => commands::decompose_cmd(&cfg, l, &form),
        Command::Chains { l, kind, .. } => commands::chains_cmd(&cfg, l, &kind),
        Command::Patterns { m, i_max } => commands::patterns_cmd(&cfg, &m, i_max),
        Command::Chart { m, pages, check_tate, svg, .. } => {
            commands::chart_cmd(&cfg, &m, check_tate, &PageArgs { page: pages, svg }, mode)
        }
        Command::PointBcss { pages, svg, .. } => commands::point_cmd(&cfg, &PageArgs { page: pages, svg }, mode),
        Command::Pullback { mode: kind, m, coeffs, radius, layers, below, above, b_weight, .. } => {
            let args = PullbackArgs { mode: kind, m, coeffs, radius, layers, below, above, b_weight };
            commands::pullback_cmd(&cfg, &args, mode)
        }
        Command::Normalize { k, l, m, n, .. } => commands::normalize_cmd(&cfg, k, l, m, n),
        Command::Selftest { .. } => {
            if cfg.format == Format::Svg {
                return Err(usage("svg output is only available for chart and point-bcss"));
            }
            selftest::run(&cfg, mode)
        }
    }
}

/// Bad input reported by the library counts as usage; anything else is a
/// failed computation.
fn exit_code(e: &anyhow::Error) -> u8 {
    use realcob_core::Error as E;
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(
            E::InvalidArgument(_)
            | E::WindowTooSmall(_)
            | E::PageBeyondLimit { .. }
            | E::NotRepresentable(_)
            | E::TruncationMismatch { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(o) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(o.out.as_bytes());
            if o.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("realcob: check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("realcob: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

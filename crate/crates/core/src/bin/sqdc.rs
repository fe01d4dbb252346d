use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use sqdc::experiments::{emit_csv, run_sweep, write_csv_file, SweepSpec};
use sqdc::oracle;
use sqdc::protocol::{run_session, Mode, SessionConfig};
use sqdc::stats::normal_quantile;
use sqdc::transport::{connect_bob, serve_sessions, HelloParams};
use sqdc::BitString;

#[derive(Parser)]
#[command(
    name = "sqdc",
    version,
    about = "Semi-quantum direct communication simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a JSON spec and print CSV.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one in-process session and print its transcript as JSON.
    Session(SessionArgs),
    /// Host Alice's side of two-process sessions.
    Serve {
        #[command(flatten)]
        session: SessionArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        /// Connections to accept before exiting.
        #[arg(long, default_value_t = 1)]
        sessions: usize,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
    /// Run Bob's side against a serving Alice.
    Connect {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[arg(long, default_value_t = 1)]
        session_id: u64,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
    /// Exact enumerations.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Upper-tail standard normal quantile.
    Quantile { alpha: f64 },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Reachable (e1, e2, i) -> u rows of the tele-fetch rule.
    TcTable,
    /// Exact detection probability of r probes.
    Mrad {
        #[arg(long)]
        r: usize,
        /// Attack rate as a fraction, e.g. 3/5.
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "0")]
        omega: String,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Data bits; defaults to the message length.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    s_est: usize,
    #[arg(long, default_value = "nk")]
    mode: Mode,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct SessionArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    /// Message bits, e.g. 10110010; all zeros when omitted.
    #[arg(long)]
    message: Option<BitString>,
}

impl SessionArgs {
    fn config(&self) -> Result<SessionConfig> {
        let a = &self.params;
        let message = match (&self.message, a.s) {
            (Some(m), Some(s)) if m.len() != s => {
                bail!("--message has {} bits but --s is {s}", m.len())
            }
            (Some(m), _) => m.clone(),
            (None, Some(s)) => BitString::zeros(s),
            (None, None) => bail!("give --s or --message"),
        };
        let config = SessionConfig {
            s: message.len(),
            r: a.r,
            s_est: a.s_est,
            p: self.p,
            omega: self.omega,
            alpha: a.alpha,
            mode: a.mode,
            seed: a.seed,
            message,
        };
        config.validate()?;
        Ok(config)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Sweep {
            spec,
            seed,
            trials,
            workers,
            out: path,
        } => {
            let mut sweep = SweepSpec::from_json_file(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            if let Some(seed) = seed {
                sweep.seed = seed;
            }
            if let Some(trials) = trials {
                sweep.trials = trials;
            }
            if let Some(workers) = workers {
                sweep.workers = workers;
            }
            let result = run_sweep(&sweep)?;
            match path {
                Some(p) => write_csv_file(&result, p)?,
                None => emit_csv(&result, &mut out)?,
            }
        }
        Command::Session(args) => {
            let outcome = run_session(&args.config()?)?;
            writeln!(out, "{}", outcome.transcript.to_json_line()?)?;
            eprintln!("{}", serde_json::to_string(&outcome.status)?);
        }
        Command::Serve {
            session,
            bind,
            sessions,
            timeout_secs,
        } => {
            let config = session.config()?;
            let listener =
                std::net::TcpListener::bind(&bind).with_context(|| format!("binding {bind}"))?;
            eprintln!("listening on {}", listener.local_addr()?);
            for alice in serve_sessions(
                &listener,
                &config,
                sessions,
                Duration::from_secs(timeout_secs),
            )? {
                match alice.session {
                    Some(s) => writeln!(out, "{}", s.transcript.to_json_line()?)?,
                    None => writeln!(out, "{}", serde_json::to_string(&alice.status)?)?,
                }
            }
        }
        Command::Connect {
            params,
            addr,
            session_id,
            timeout_secs,
        } => {
            let s = params.s.context("--s is required")?;
            let hello = HelloParams::from_config(&SessionConfig {
                s,
                r: params.r,
                s_est: params.s_est,
                p: 0.0,
                omega: 0.0,
                alpha: params.alpha,
                mode: params.mode,
                seed: params.seed,
                message: BitString::zeros(s),
            });
            let bob = connect_bob(&hello, session_id, &addr, Duration::from_secs(timeout_secs))?;
            writeln!(out, "{}", serde_json::to_string(&bob)?)?;
        }
        Command::Oracle(OracleCmd::TcTable) => {
            let rows = oracle::tc_table().context("tele-fetch rule is ambiguous")?;
            writeln!(out, "e1,e2,i,u")?;
            for t in rows {
                writeln!(out, "{},{},{},{}", t.e1, t.e2, t.i, t.u)?;
            }
        }
        Command::Oracle(OracleCmd::Mrad { r, p, omega }) => {
            let p: Ratio<i64> = p.parse().map_err(|e| anyhow::anyhow!("--p: {e}"))?;
            let omega: Ratio<i64> = omega.parse().map_err(|e| anyhow::anyhow!("--omega: {e}"))?;
            if r > 4 {
                bail!("--r above 4 makes the exact tree too large");
            }
            let prob = oracle::mrad_detection_probability(r, p, omega);
            writeln!(
                out,
                "{prob} = {}",
                *prob.numer() as f64 / *prob.denom() as f64
            )?;
        }
        Command::Quantile { alpha } => {
            writeln!(out, "{}", normal_quantile(alpha)?)?;
        }
    }
    Ok(())
}

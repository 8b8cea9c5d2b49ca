use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qot_cli::{parse, suites, CliError, Lines};
use qot_core::ascent::{init_threads, AscentConfig};
use qot_core::channel::ConditionalExpectation;
use qot_core::contraction::{self, bkm_lambda2, bkm_spectrum, entropy_contraction_sample, loglip_sample};
use qot_core::geometry::cc_suite;
use qot_core::groups::{group_cost_efix, word_lengths};
use qot_core::mixing::{self, DEFAULT_CAP};
use qot_core::transport;
use qot_core::{DensityMatrix, SeminormSpec};

#[derive(Parser)]
#[command(name = "qot", version, about = "Transportation cost and Lipschitz contraction for quantum channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Serialize)]
struct Budget {
    /// Master seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ascent restarts.
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    /// Iterations per restart.
    #[arg(long, default_value_t = 500)]
    iterations: usize,
}

impl Budget {
    fn cfg(&self) -> AscentConfig {
        AscentConfig { restarts: self.restarts, iterations: self.iterations, seed: self.seed, ..Default::default() }
    }
}

#[derive(Args, Clone, Serialize)]
struct Seminorm {
    /// pauli | pauli-xy | gellmann:d | single:FILE | FILE
    #[arg(long, default_value = "pauli")]
    resource: String,
    /// Use the ℓ2 (Gram) seminorm instead of the max of commutator norms.
    #[arg(long)]
    l2: bool,
    #[arg(long, default_value_t = 1)]
    amplification: usize,
}

impl Seminorm {
    fn spec(&self) -> Result<SeminormSpec, CliError> {
        let r = parse::resource(&self.resource)?;
        let kind = if self.l2 { qot_core::SeminormKind::L2 } else { qot_core::SeminormKind::Linf };
        SeminormSpec::new(r, kind, self.amplification).map_err(|e| CliError::Input { field: "--amplification", msg: e.to_string() })
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Trace,
    Return,
    Cost,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transportation cost of a channel.
    Cost {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        sn: Seminorm,
        #[command(flatten)]
        budget: Budget,
        /// Also estimate through W_L over this many sampled states.
        #[arg(long)]
        via_states: Option<usize>,
    },
    /// Expected length of a resource set.
    Kappa {
        #[command(flatten)]
        sn: Seminorm,
        #[command(flatten)]
        budget: Budget,
    },
    /// Wasserstein L-metric between two states.
    Wasserstein {
        /// mixed:d | basis:d:k | FILE
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[command(flatten)]
        sn: Seminorm,
        #[command(flatten)]
        budget: Budget,
    },
    /// Lipschitz constant of a channel.
    Lip {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        sn: Seminorm,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        via_states: Option<usize>,
    },
    /// Second BKM eigenvalue of a primitive channel.
    Lambda2 {
        #[arg(long)]
        channel: String,
    },
    /// Sampled entropy contraction ratio.
    EntropyContraction {
        #[arg(long)]
        channel: String,
        /// Reference state; defaults to the fixed state of the channel.
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampled logarithmic Lipschitz ratio.
    Loglip {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        sigma: Option<String>,
        #[command(flatten)]
        sn: Seminorm,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Entropy contraction against its Lipschitz upper bound.
    VerifyEntropy {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        sn: Seminorm,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        slack: f64,
    },
    /// Word lengths and their exact mean.
    GroupLength {
        /// zn:N | dihedral:N | sym:k | FILE
        #[arg(long)]
        group: String,
    },
    /// Cost of SU(2) conjugations against the CC distance, as CSV.
    CcVerify {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Trace, return or cost-induced mixing time.
    Mixing {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "trace")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        sn: Seminorm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs a verification suite; exit 2 on any failure.
    Verify {
        /// all | cost | lip | entropy | group | geometry | mixing
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn reference_state(sigma: &Option<String>, phi: &qot_core::QuantumChannel) -> Result<DensityMatrix, CliError> {
    match sigma {
        Some(s) => parse::state("--sigma", s),
        None => Ok(phi.fixed_state()?),
    }
}

/// Runs one command; `Ok(false)` means a verification failed.
fn dispatch(cmd: Cmd, out: &mut Lines<impl Write>) -> Result<bool, CliError> {
    match cmd {
        Cmd::Cost { channel, sn, budget, via_states } => {
            let phi = parse::channel(&channel)?;
            let spec = sn.spec()?;
            let cfg = budget.cfg();
            let r = transport::cost(&phi, &spec, &cfg)?;
            out.emit(&json!({"command": "cost", "channel": channel, "seminorm": sn, "config": cfg, "report": r}))?;
            if let Some(n) = via_states {
                let s = transport::cost_via_states(&phi, &spec, n, &cfg)?;
                out.emit(&json!({"command": "cost-via-states", "states": n, "config": cfg, "report": s}))?;
            }
        }
        Cmd::Kappa { sn, budget } => {
            let cfg = budget.cfg();
            let r = transport::expected_length(&sn.spec()?, &cfg)?;
            out.emit(&json!({"command": "kappa", "seminorm": sn, "config": cfg, "report": r}))?;
        }
        Cmd::Wasserstein { rho, sigma, sn, budget } => {
            let (a, b) = (parse::state("--rho", &rho)?, parse::state("--sigma", &sigma)?);
            let cfg = budget.cfg();
            let r = transport::wasserstein(&a, &b, &sn.spec()?, &cfg)?;
            out.emit(&json!({"command": "wasserstein", "rho": rho, "sigma": sigma, "seminorm": sn, "config": cfg, "report": r}))?;
        }
        Cmd::Lip { channel, sn, budget, via_states } => {
            let phi = parse::channel(&channel)?;
            let spec = sn.spec()?;
            let cfg = budget.cfg();
            let r = contraction::lip(&phi, &spec, &cfg)?;
            out.emit(&json!({"command": "lip", "channel": channel, "seminorm": sn, "config": cfg, "report": r}))?;
            if let Some(n) = via_states {
                let s = contraction::contraction_via_states(&phi, &spec, n, &cfg)?;
                out.emit(&json!({"command": "lip-via-states", "pairs": n, "config": cfg, "report": s}))?;
            }
        }
        Cmd::Lambda2 { channel } => {
            let phi = parse::channel(&channel)?;
            let l2 = bkm_lambda2(&phi)?;
            let spectrum = bkm_spectrum(&phi)?;
            out.emit(&json!({"command": "lambda2", "channel": channel, "lambda2": l2, "spectrum": spectrum, "method": "exact"}))?;
        }
        Cmd::EntropyContraction { channel, sigma, samples, seed } => {
            let phi = parse::channel(&channel)?;
            let s = reference_state(&sigma, &phi)?;
            let r = entropy_contraction_sample(&phi, &s, samples, seed)?;
            out.emit(&json!({"command": "entropy-contraction", "channel": channel, "method": "sample-max", "report": r}))?;
        }
        Cmd::Loglip { channel, sigma, sn, samples, seed } => {
            let phi = parse::channel(&channel)?;
            let s = reference_state(&sigma, &phi)?;
            let r = loglip_sample(&phi, &s, &sn.spec()?, samples, seed)?;
            out.emit(&json!({"command": "loglip", "channel": channel, "seminorm": sn, "method": "sample-max", "report": r}))?;
        }
        Cmd::VerifyEntropy { channel, sn, budget, samples, slack } => {
            let phi = parse::channel(&channel)?;
            let cfg = budget.cfg();
            let r = contraction::entropy_upper_check(&phi, &sn.spec()?, samples, slack, &cfg)?;
            let passed = r.passed;
            out.emit(&json!({"command": "verify-entropy", "channel": channel, "config": cfg, "method": "sample-max", "report": r}))?;
            return Ok(passed);
        }
        Cmd::GroupLength { group } => {
            let g = parse::group(&group)?;
            let prof = word_lengths(&g);
            let (_, report) = group_cost_efix(&g);
            out.emit(&json!({
                "command": "group-length",
                "group": group,
                "order": g.order(),
                "lengths": prof.lengths,
                "mean": prof.mean_string(),
                "method": "exact",
                "cost_efix": report,
            }))?;
        }
        Cmd::CcVerify { samples, seed } => {
            let reports = cc_suite(samples, seed)?;
            out.raw("sample,distance,cost_lower,margin")?;
            let mut ok = true;
            for (i, r) in reports.iter().enumerate() {
                ok &= r.passed;
                out.raw(&format!("{i},{:.12},{:.12},{:.12}", r.distance, r.cost_lower, r.margin))?;
            }
            return Ok(ok);
        }
        Cmd::Mixing { channel, eps, mode, cap, sn, seed } => {
            let phi = parse::channel(&channel)?;
            let report: Value = match mode {
                Mode::Trace => serde_json::to_value(mixing::trace_mixing_time(&phi, eps, cap, sn.amplification, seed)?),
                Mode::Return => {
                    let spec = sn.spec()?;
                    let e = ConditionalExpectation::onto_commutant(&spec.resource);
                    serde_json::to_value(mixing::return_time(&phi, &e, eps, cap)?)
                }
                Mode::Cost => {
                    let cfg = AscentConfig::light(seed);
                    serde_json::to_value(mixing::cost_mixing_time(&phi, &sn.spec()?, eps, cap, &cfg)?)
                }
            }
            .map_err(|e| CliError::Io(e.into()))?;
            out.emit(&json!({"command": "mixing", "channel": channel, "mode": mode, "report": report}))?;
        }
        Cmd::Verify { suite, seed } => {
            let Some(ids) = suites::suite_ids(&suite) else {
                return Err(CliError::Input {
                    field: "--suite",
                    msg: format!("unknown suite `{suite}`, expected one of {}", suites::SUITES.join(", ")),
                });
            };
            let mut ok = true;
            for id in ids {
                let o = suites::run(id, seed);
                ok &= o.passed;
                out.emit(&o)?;
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    let stdout = io::stdout();
    let mut out = Lines::new(stdout.lock());
    match dispatch(cli.cmd, &mut out) {
        Ok(true) => {
            let _ = out.emit(&json!({"status": "ok"}));
            ExitCode::SUCCESS
        }
        Ok(false) => {
            let _ = out.emit(&json!({"status": "verification-failed"}));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

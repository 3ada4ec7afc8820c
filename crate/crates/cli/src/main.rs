//! netalign: feasibility checks, end-to-end simulations, network
//! generation, and oracle cross-checks for precoding-based network
//! alignment on three-unicast delay networks.
//!
//! Exit status: 0 success/feasible, 1 infeasible or decode failures,
//! 2 unsupported (zero min-cut), 3 input error, 4 oracle mismatch.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use netalign_core::feasibility::{
    feasibility_verdict, membership_check, sn_oracle, FeasParams, FeasibilityReport, SnParams,
};
use netalign_core::galois::{root_of_unity, FieldCtx};
use netalign_core::netgraph::{
    analyze, gen::GenConfig, network_from_json, network_to_json, transfer_oracle,
    transfer_poly, DelayNetwork, LekAssignment, LekSchedule, NetError,
};
use netalign_core::simulator::{
    block_window, pbna_pipeline, run_time_domain, PipelineConfig, SimError, SimReport, Timeline,
};
use netalign_core::transform::heavy_prefix_overhead;

const EXIT_OK: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "netalign", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide scheme feasibility for a network file
    Check(CheckArgs),
    /// Run the full transmission pipeline through the time-domain simulator
    Simulate(SimulateArgs),
    /// Generate a random fully-connected network file
    Gen(GenArgs),
    /// Cross-check fast paths against brute-force oracles
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Field extension degree m for GF(2^m)
    #[arg(long = "field-degree", default_value_t = 16)]
    field_degree: u32,
    /// Block length k; must divide 2^m - 1
    #[arg(long = "block-length", short = 'k', default_value_t = 5)]
    block_length: usize,
    /// RNG seed; falls back to NETALIGN_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl CommonArgs {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var("NETALIGN_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0)
        })
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Network description file (JSON)
    input: std::path::PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// LEK draws per identity test
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Comma-separated probe tones (default: all of 0..k)
    #[arg(long, value_delimiter = ',')]
    tones: Option<Vec<usize>>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Network description file (JSON)
    input: std::path::PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// Alignment parameter n; each source precodes over 2n+1 blocks
    #[arg(long, short = 'n', default_value_t = 2)]
    n: usize,
    /// LEK draws per identity test in the feasibility pre-check
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Comma-separated tones to decode (default: 1..k)
    #[arg(long, value_delimiter = ',')]
    tones: Option<Vec<usize>>,
    /// Simulate even when the feasibility check is negative
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Output path; stdout when omitted
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 8)]
    relays: usize,
    #[arg(long, default_value_t = 20)]
    edges: usize,
    /// Smallest edge delay (default 1)
    #[arg(long)]
    delay_min: Option<u32>,
    /// Largest edge delay (default 3, or 1 with --layered)
    #[arg(long)]
    delay_max: Option<u32>,
    /// Two-layer relay arrangement: shallow paths, small d_max
    #[arg(long)]
    layered: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Network description file (JSON)
    input: std::path::PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// LEK draws per cross-check
    #[arg(long, default_value_t = 8)]
    trials: usize,
    /// Path enumeration budget
    #[arg(long, default_value_t = 100_000)]
    path_budget: u64,
    /// Test hook: corrupt the DP transfer coefficient "i,j,d" before
    /// comparing against the path-enumeration oracle
    #[arg(long, hide = true, value_delimiter = ',')]
    corrupt_coeff: Option<Vec<usize>>,
}

/// Top-level machine-readable report envelope.
#[derive(Serialize, Deserialize)]
struct Report {
    tool: String,
    version: String,
    command: String,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasibility: Option<FeasibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<SimReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
    timing_ms: u64,
    exit_code: u8,
}

#[derive(Serialize, Deserialize)]
struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    field_degree: u32,
    block_length: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tones: Option<Vec<usize>>,
    force: bool,
}

#[derive(Serialize, Deserialize)]
struct OracleReport {
    transfer_dp_vs_paths: CheckOutcome,
    time_domain_vs_transfer: CheckOutcome,
    reduced_vs_sn: CheckOutcome,
}

#[derive(Serialize, Deserialize)]
struct CheckOutcome {
    agreed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatch: Option<String>,
}

impl CheckOutcome {
    fn ok() -> Self {
        CheckOutcome { agreed: true, mismatch: None }
    }
    fn bad(msg: String) -> Self {
        CheckOutcome { agreed: false, mismatch: Some(msg) }
    }
}

fn fail(code: u8, msg: String) -> (u8, String) {
    (code, msg)
}

fn load_network(path: &std::path::Path) -> Result<DelayNetwork, (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    network_from_json(&text).map_err(|e| {
        let code = match e {
            NetError::Cycle | NetError::MissingDiagonalPath(_) => EXIT_INPUT,
            _ => EXIT_INPUT,
        };
        fail(code, format!("invalid network file {}: {e}", path.display()))
    })
}

fn field_and_root(
    m: u32,
    k: usize,
) -> Result<(FieldCtx, netalign_core::galois::RootOfUnity), (u8, String)> {
    let ctx = FieldCtx::new(m).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let root = root_of_unity(&ctx, k).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    Ok((ctx, root))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args, started),
        Command::Simulate(args) => cmd_simulate(args, started),
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle(args) => cmd_oracle(args, started),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn emit(report: &Report, format: Format, text: String) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
        }
        Format::Text => print!("{text}"),
    }
}

fn cmd_check(args: CheckArgs, started: Instant) -> Result<u8, (u8, String)> {
    let net = load_network(&args.input)?;
    let (ctx, root) = field_and_root(args.common.field_degree, args.common.block_length)?;
    let params = FeasParams {
        trials: args.trials,
        seed: args.common.seed(),
        probe_tones: args.tones.clone(),
    };
    let report = match feasibility_verdict(&net, &ctx, &root, &params) {
        Ok(r) => r,
        Err(netalign_core::feasibility::FeasError::ZeroMinCut { missing }) => {
            let pairs: Vec<String> =
                missing.iter().map(|&(i, j)| format!("S{}-T{}", i + 1, j + 1)).collect();
            return Err(fail(
                EXIT_UNSUPPORTED,
                format!("zero min-cut regime: no path for {}", pairs.join(", ")),
            ));
        }
        Err(e) => return Err(fail(EXIT_INPUT, e.to_string())),
    };
    let code = if report.feasible { EXIT_OK } else { EXIT_INFEASIBLE };
    let text = format!(
        "network: {} ({} nodes, {} edges)\nfield: GF(2^{}), k={}, trials={}\n{}",
        args.input.display(),
        net.node_count(),
        net.edges().len(),
        args.common.field_degree,
        args.common.block_length,
        args.trials,
        report.summary(),
    );
    let envelope = Report {
        tool: "netalign".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "check".into(),
        config: ConfigEcho {
            input: Some(args.input.display().to_string()),
            field_degree: args.common.field_degree,
            block_length: args.common.block_length,
            seed: args.common.seed(),
            n: None,
            trials: Some(args.trials),
            tones: args.tones,
            force: false,
        },
        feasibility: Some(report),
        simulation: None,
        oracle: None,
        timing_ms: started.elapsed().as_millis() as u64,
        exit_code: code,
    };
    emit(&envelope, args.common.format, text);
    Ok(code)
}

fn cmd_simulate(args: SimulateArgs, started: Instant) -> Result<u8, (u8, String)> {
    let net = load_network(&args.input)?;
    let (ctx, root) = field_and_root(args.common.field_degree, args.common.block_length)?;
    let seed = args.common.seed();
    let k = args.common.block_length;
    let feas = match feasibility_verdict(
        &net,
        &ctx,
        &root,
        &FeasParams { trials: args.trials, seed, probe_tones: Some(vec![]) },
    ) {
        Ok(r) => r,
        Err(netalign_core::feasibility::FeasError::ZeroMinCut { missing }) => {
            return Err(fail(
                EXIT_UNSUPPORTED,
                format!("zero min-cut regime: missing pairs {missing:?}"),
            ));
        }
        Err(e) => return Err(fail(EXIT_INPUT, e.to_string())),
    };
    if !feas.feasible && !args.force {
        return Err(fail(
            EXIT_INFEASIBLE,
            "feasibility check negative; pass --force to simulate anyway".into(),
        ));
    }
    let mut cfg = PipelineConfig::new(args.n, k, seed);
    if let Some(tones) = &args.tones {
        cfg.decode_tones = tones.clone();
    }
    let sr = match pbna_pipeline(&net, &ctx, &cfg) {
        Ok(sr) => sr,
        Err(SimError::ZeroMinCut { missing }) => {
            return Err(fail(EXIT_UNSUPPORTED, format!("zero min-cut: {missing:?}")));
        }
        Err(e @ (SimError::ToneRelationMismatch { .. } | SimError::DecodeMismatch { .. })) => {
            return Err(fail(EXIT_MISMATCH, e.to_string()));
        }
        Err(e) => return Err(fail(EXIT_INPUT, e.to_string())),
    };
    let report = sr.report();
    let all = report.all_decoded();
    let code = if all { EXIT_OK } else { EXIT_INFEASIBLE };
    let mut text = String::new();
    if heavy_prefix_overhead(k, sr.d_max as usize) {
        eprintln!(
            "warning: block length {k} is small next to d_max = {}; prefix overhead {}/{} per block",
            sr.d_max,
            sr.d_max,
            k as u64 + sr.d_max
        );
    }
    text.push_str(&format!(
        "pipeline: n={}, k={}, GF(2^{}), delta_min={}, d_max={}\n",
        sr.n, sr.k, sr.field_degree, sr.delta_min, sr.d_max
    ));
    text.push_str("per-tone channel relation: verified exactly\n");
    for t in &report.per_tone {
        text.push_str(&format!(
            "  tone {}: aligned={} decoded={:?} rank={:?}\n",
            t.tone, t.aligned, t.decoded, t.decode_rank
        ));
    }
    text.push_str(&format!(
        "decoded symbols: {:?}\nthroughput (paper-normalized): {}, {}, {}\nthroughput (wall-clock): {}, {}, {}\n",
        report.decoded_symbols,
        report.throughput_paper_normalized[0],
        report.throughput_paper_normalized[1],
        report.throughput_paper_normalized[2],
        report.throughput_wall_clock[0],
        report.throughput_wall_clock[1],
        report.throughput_wall_clock[2],
    ));
    let envelope = Report {
        tool: "netalign".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "simulate".into(),
        config: ConfigEcho {
            input: Some(args.input.display().to_string()),
            field_degree: args.common.field_degree,
            block_length: k,
            seed,
            n: Some(args.n),
            trials: Some(args.trials),
            tones: Some(cfg.decode_tones.clone()),
            force: args.force,
        },
        feasibility: Some(feas),
        simulation: Some(report),
        oracle: None,
        timing_ms: started.elapsed().as_millis() as u64,
        exit_code: code,
    };
    emit(&envelope, args.common.format, text);
    Ok(code)
}

fn cmd_gen(args: GenArgs) -> Result<u8, (u8, String)> {
    let base = if args.layered { GenConfig::layered_shallow() } else { GenConfig::default() };
    let cfg = GenConfig {
        relays: args.relays,
        edges: args.edges,
        delay_min: args.delay_min.unwrap_or(base.delay_min),
        delay_max: args.delay_max.unwrap_or(base.delay_max),
        ..base
    };
    let net = netalign_core::netgraph::gen::generate(&cfg, args.common.seed())
        .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let text = network_to_json(&net);
    match &args.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
            writeln!(f, "{text}").map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        }
        None => println!("{text}"),
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(args: OracleArgs, started: Instant) -> Result<u8, (u8, String)> {
    let net = load_network(&args.input)?;
    let (ctx, root) = field_and_root(args.common.field_degree, args.common.block_length)?;
    let analysis = analyze(&net).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let seed = args.common.seed();
    let corrupt = match args.corrupt_coeff.as_deref() {
        None => None,
        Some(&[i, j, d]) => Some((i, j, d)),
        Some(other) => {
            return Err(fail(EXIT_INPUT, format!("--corrupt-coeff wants i,j,d, got {other:?}")))
        }
    };

    // 1. delay-indexed DP vs exhaustive path enumeration
    let mut transfer_outcome = CheckOutcome::ok();
    'transfer: for t in 0..args.trials {
        let mut rng = seeded(seed, 0xA0, t as u64);
        let leks = LekAssignment::random(&net, &analysis, &ctx, &mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let mut dp = transfer_poly(&net, &analysis, &ctx, &leks, i, j);
                if let Some((ci, cj, cd)) = corrupt {
                    if ci == i && cj == j && cd < dp.coeffs.len() {
                        dp.coeffs[cd] ^= 1;
                    }
                }
                let oracle =
                    transfer_oracle(&net, &analysis, &ctx, &leks, i, j, args.path_budget)
                        .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
                if dp != oracle {
                    let d = dp
                        .coeffs
                        .iter()
                        .zip(&oracle.coeffs)
                        .position(|(a, b)| a != b)
                        .unwrap_or(0);
                    transfer_outcome = CheckOutcome::bad(format!(
                        "transfer coefficient (i={}, j={}, d={d}) differs from path sum",
                        i + 1,
                        j + 1
                    ));
                    break 'transfer;
                }
            }
        }
    }

    // 2. time-domain run vs transfer-polynomial convolution
    let mut time_outcome = CheckOutcome::ok();
    'time: for t in 0..args.trials.min(3) {
        let mut rng = seeded(seed, 0xB0, t as u64);
        let leks = LekAssignment::random(&net, &analysis, &ctx, &mut rng);
        let k = 2 * (analysis.delta_min + analysis.d_max).max(4) as usize;
        let sched = LekSchedule::new(vec![leks.clone()], 0, k);
        let (w0, w1) = block_window(k, analysis.d_max, 1);
        let mut inj: [Timeline; 3] =
            std::array::from_fn(|_| Timeline::zeros(w0, (w1 - w0 + 1) as usize));
        for src in inj.iter_mut() {
            for tt in w0..=w1 {
                src.set(tt, rng.random_range(0..ctx.size()));
            }
        }
        let trace = run_time_domain(&net, &analysis, &ctx, &sched, &inj)
            .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        let shift = analysis.delta_min as i64;
        for j in 0..3 {
            let polys: Vec<_> =
                (0..3).map(|i| transfer_poly(&net, &analysis, &ctx, &leks, i, j)).collect();
            for tt in trace.outputs[j].start()..trace.outputs[j].end_exclusive() {
                let mut expect = 0;
                for (i, tp) in polys.iter().enumerate() {
                    for (d, &c) in tp.coeffs.iter().enumerate() {
                        expect ^= ctx.mul(c, inj[i].get(tt - shift - d as i64));
                    }
                }
                if trace.outputs[j].get(tt) != expect {
                    time_outcome = CheckOutcome::bad(format!(
                        "time-domain output at destination {} time {tt} differs from convolution",
                        j + 1
                    ));
                    break 'time;
                }
            }
        }
    }

    // 3. reduced four-element test vs low-degree rational oracle
    let mut sn_outcome = CheckOutcome::ok();
    if analysis.conn.all_connected() {
        let p = if args.common.block_length > 1 { 1 } else { 0 };
        let trials = args.trials.max(8);
        let eta_const = netalign_core::feasibility::is_constant(
            &net,
            &analysis,
            &ctx,
            &root,
            netalign_core::feasibility::RatioKind::Eta,
            p,
            trials,
            seed,
        )
        .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        'sn: for i in 0..3 {
            let sn1 = sn_oracle(
                &net,
                &analysis,
                &ctx,
                &root,
                i,
                p,
                &SnParams { n_small: 1, samples: trials, seed, ..SnParams::default() },
            )
            .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
            if eta_const.constant {
                // constant eta: affine membership must coincide with b_i constancy
                let bc = netalign_core::feasibility::is_constant(
                    &net,
                    &analysis,
                    &ctx,
                    &root,
                    netalign_core::feasibility::RatioKind::B(i),
                    p,
                    trials,
                    seed,
                )
                .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
                if sn1.member != bc.constant {
                    sn_outcome = CheckOutcome::bad(format!(
                        "session {}: affine-oracle membership {} vs b constancy {}",
                        i + 1,
                        sn1.member,
                        bc.constant
                    ));
                }
                continue;
            }
            let sn2 = sn_oracle(
                &net,
                &analysis,
                &ctx,
                &root,
                i,
                p,
                &SnParams { n_small: 2, samples: trials, seed, ..SnParams::default() },
            )
            .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
            let reduced = membership_check(&net, &analysis, &ctx, &root, i, p, trials, seed)
                .map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
            let in_affine_part =
                reduced.one.holds || reduced.eta.holds || reduced.eta_plus_one.holds;
            let checks = [
                (sn1.member == in_affine_part, "affine-oracle vs reduced {1, eta, eta+1}"),
                (sn2.member == reduced.any_member(), "degree-2 oracle vs reduced set"),
            ];
            for (ok, what) in checks {
                if !ok {
                    sn_outcome =
                        CheckOutcome::bad(format!("session {}: {what} disagree", i + 1));
                    break 'sn;
                }
            }
        }
    }

    let all = transfer_outcome.agreed && time_outcome.agreed && sn_outcome.agreed;
    let code = if all { EXIT_OK } else { EXIT_MISMATCH };
    let mut text = String::new();
    let line = |name: &str, o: &CheckOutcome| match &o.mismatch {
        None => format!("  {name}: agree\n"),
        Some(m) => format!("  {name}: MISMATCH ({m})\n"),
    };
    text.push_str("oracle cross-checks:\n");
    text.push_str(&line("transfer DP vs path enumeration", &transfer_outcome));
    text.push_str(&line("time domain vs transfer convolution", &time_outcome));
    text.push_str(&line("reduced test vs rational-membership oracle", &sn_outcome));
    let envelope = Report {
        tool: "netalign".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "oracle".into(),
        config: ConfigEcho {
            input: Some(args.input.display().to_string()),
            field_degree: args.common.field_degree,
            block_length: args.common.block_length,
            seed,
            n: None,
            trials: Some(args.trials),
            tones: None,
            force: false,
        },
        feasibility: None,
        simulation: None,
        oracle: Some(OracleReport {
            transfer_dp_vs_paths: transfer_outcome,
            time_domain_vs_transfer: time_outcome,
            reduced_vs_sn: sn_outcome,
        }),
        timing_ms: started.elapsed().as_millis() as u64,
        exit_code: code,
    };
    emit(&envelope, args.common.format, text);
    Ok(code)
}

fn seeded(seed: u64, tag: u64, t: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (tag << 56) ^ t.wrapping_mul(0x9E37_79B9))
}

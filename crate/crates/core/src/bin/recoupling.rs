use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use recoupling::aht::{
    j2_coefficient, reference_grid_j2, CalibrationOrder, H2_DENOMINATOR, REFERENCE_H2_ROWS,
};
use recoupling::analysis::{
    check_decoupling, emit_results, fit_decay, h2_pair_coefficients, read_decay_points,
    reference_h2, run_experiment, sawtooth_husimi, write_csv, write_husimi_csv, ExperimentConfig,
    ExperimentKind, FitModel, OutputFormat, ResultSet,
};
use recoupling::model::{build_couplings, LatticeKind, LatticeSpec, SpinSystem};
use recoupling::sequences::SchemeVariant;

#[derive(Parser)]
#[command(version, about = "Selective recoupling of dipole-coupled spin qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average Hamiltonian checks.
    Aht {
        #[command(subcommand)]
        command: AhtCommand,
    },
    /// Average fidelity of the recoupled gate against the ideal one.
    GateFidelity(GateArgs),
    /// Fidelity decay of the sawtooth map run on the processor.
    Sawtooth(SawtoothArgs),
    /// Husimi density of the noisy sawtooth states.
    Husimi(HusimiArgs),
    /// Fits a decay law to a result file.
    Fit(FitArgs),
}

#[derive(Subcommand)]
enum AhtCommand {
    /// Compares computed average Hamiltonians with the reference values.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "chain4")]
    lattice: LatticeKind,
    /// Check only this pair instead of every coupled pair.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    /// Pulse spacing of the checked sequences.
    #[arg(long, default_value_t = 0.01)]
    tau: f64,
    /// Skip the first-order terms (slow on the grid).
    #[arg(long)]
    zeroth_only: bool,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; replaces the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "symmetrized")]
    scheme: SchemeVariant,
    #[arg(long, default_value = "0", value_parser = parse_calibration)]
    calibration: CalibrationOrder,
    /// Block counts: `10`, `4,6,8` or `4..20`.
    #[arg(long, default_value = "10")]
    nswhh: String,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Coupling of nearest neighbours.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct GateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
    #[arg(long, default_value = "chain4")]
    lattice: LatticeKind,
    #[arg(long, default_value = "1,2", value_parser = parse_pair)]
    pair: (usize, usize),
    #[arg(long, default_value_t = PI / 4.0)]
    phi: f64,
}

#[derive(Args)]
struct SawtoothArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    output: Output,
    /// Number of qubits: 4 (chain) or 9 (grid).
    #[arg(long, default_value_t = 9)]
    nq: usize,
    /// Classical kick strength.
    #[arg(long = "K", default_value_t = -0.5, allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = 25)]
    iterations: usize,
}

#[derive(Args)]
struct HusimiArgs {
    #[command(flatten)]
    sawtooth: SawtoothArgs,
    /// Number of final iterations averaged.
    #[arg(long, default_value_t = 1)]
    window: usize,
    /// Grid points along each phase-space axis.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Args)]
struct FitArgs {
    /// Gate or sawtooth CSV, or a JSON result file.
    #[arg(long)]
    input: PathBuf,
    /// One of inv_n4, inv_n5, t2_n4, t_n5.
    #[arg(long)]
    model: FitModel,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected k,l")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((num(a)?, num(b)?))
}

fn parse_calibration(s: &str) -> Result<CalibrationOrder, String> {
    let v: u8 = s
        .parse()
        .map_err(|_| format!("expected 0 or 2, got {s:?}"))?;
    CalibrationOrder::try_from(v).map_err(|e| e.to_string())
}

fn lattice_for(nq: usize) -> Result<LatticeKind, String> {
    match nq {
        4 => Ok(LatticeKind::Chain4),
        9 => Ok(LatticeKind::Grid3x3),
        other => Err(format!("--nq must be 4 or 9, got {other}")),
    }
}

fn load_config(
    path: &PathBuf,
    kind: ExperimentKind,
) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    if config.experiment != kind {
        return Err(format!("{}: expected a {kind} configuration", path.display()).into());
    }
    Ok(config)
}

fn base_config(
    common: &Common,
    kind: ExperimentKind,
) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    if let Some(path) = &common.config {
        return load_config(path, kind);
    }
    let n_swhh = recoupling::analysis::parse_n_swhh(&common.nswhh)?;
    Ok(ExperimentConfig {
        experiment: kind,
        calibration: common.calibration,
        base_coupling: common.coupling,
        ..ExperimentConfig::gate(common.scheme, n_swhh, common.runs, common.seed)
    })
}

fn gate_config(a: &GateArgs) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let c = base_config(&a.common, ExperimentKind::GateFidelity)?;
    if a.common.config.is_some() {
        return Ok(c);
    }
    Ok(ExperimentConfig {
        lattice: a.lattice,
        pair: a.pair,
        phi: a.phi,
        ..c
    })
}

fn sawtooth_config(a: &SawtoothArgs) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let c = base_config(&a.common, ExperimentKind::Sawtooth)?;
    if a.common.config.is_some() {
        return Ok(c);
    }
    Ok(ExperimentConfig {
        lattice: lattice_for(a.nq)?,
        k_classical: a.k,
        iterations: a.iterations,
        ..c
    })
}

fn write_set(set: &ResultSet, output: &Output) -> CliResult {
    match &output.out {
        Some(path) => emit_results(set, output.format, path)?,
        None => {
            let stdout = io::stdout().lock();
            match output.format {
                OutputFormat::Csv => write_csv(set, stdout)?,
                OutputFormat::Json => {
                    let mut stdout = stdout;
                    serde_json::to_writer_pretty(&mut stdout, set)?;
                    writeln!(stdout)?;
                }
            }
        }
    }
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Prints the verification tables; returns whether every check passed.
fn aht_verify(a: &VerifyArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let mut ok = true;
    let system = build_couplings(LatticeSpec::new(a.lattice, 1.0));
    let pairs = a.pair.map(|p| vec![p]);
    let check = check_decoupling(&system, pairs.as_deref(), a.tau, !a.zeroth_only)?;
    println!("decoupling on {} (J = 1, tau = {})", a.lattice, a.tau);
    println!(
        "  whh4  max|h0| = {:.3e}  max|h1| = {:.3e}",
        check.whh4_h0_max, check.whh4_h1_max
    );
    println!("  pair     J_kl      j0        j2          |h0 - j0 iso|  max|h1|");
    for p in &check.pairs {
        let h1 = p
            .h1_max
            .map_or("skipped".to_string(), |v| format!("{v:.3e}"));
        println!(
            "  ({},{})  {:<8.5} {:<9.6} {:<11.6} {:<14.3e} {h1}",
            p.k, p.l, p.coupling, p.j0, p.j2, p.h0_error
        );
    }
    let tol = 1e-12;
    let worst = check.worst_error();
    ok &= worst <= tol;
    println!("  worst deviation {worst:.3e} (tolerance {tol:e})\n");

    let (jak, jal, jkl, tau) = (1.0, 0.7, 1.3, 0.1);
    let sys = SpinSystem::from_pairs(3, &[(0, 1, jak), (0, 2, jal), (1, 2, jkl)])?;
    let got = h2_pair_coefficients(&sys, 1, 2, tau)?;
    let want = reference_h2(jak, jal, jkl, tau);
    println!(
        "second order on (1,2), spectator 0, J_ak = {jak}, J_al = {jal}, J_kl = {jkl}, tau = {tau}"
    );
    println!("  term  computed            reference           abs error   rel error");
    for ((name, g), w) in ["xx", "yy", "zz"].iter().zip(got).zip(want) {
        let r = rel(g, w);
        ok &= r <= 1e-10;
        println!(
            "  {name}    {g:<19.12e} {w:<19.12e} {:<11.3e} {r:.3e}",
            (g - w).abs()
        );
    }
    println!();

    println!("j2 coefficients (column means of the reference rows)");
    let names = [
        "J_ak J_al^2",
        "J_ak^2 J_al",
        "J_ak J_al J_kl",
        "J_ak^2 J_kl",
        "J_al^2 J_kl",
    ];
    for (c, name) in names.iter().enumerate() {
        let sum: i64 = REFERENCE_H2_ROWS.iter().map(|r| r[c]).sum();
        let g = gcd(sum.abs(), 3 * H2_DENOMINATOR);
        println!("  {name:<16} {}/{}", sum / g, 3 * H2_DENOMINATOR / g);
    }
    println!();

    println!("grid j2 / J^3 by pair class");
    println!("  pair    computed            reference           abs error");
    let grid = build_couplings(LatticeSpec::new(LatticeKind::Grid3x3, 1.0));
    for (want, pairs) in reference_grid_j2() {
        for &(k, l) in pairs {
            let got = j2_coefficient(&grid, k, l)?.j2;
            let err = (got - want).abs();
            ok &= err <= 1e-12;
            println!("  ({k},{l})   {got:<19.12} {want:<19.12} {err:.3e}");
        }
    }
    println!(
        "\n{}",
        if ok {
            "all checks passed"
        } else {
            "CHECKS FAILED"
        }
    );
    Ok(ok)
}

fn fit(a: &FitArgs) -> CliResult {
    let mut groups: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for (scheme, p) in read_decay_points(&a.input)? {
        groups.entry(scheme).or_default().push(p);
    }
    println!("scheme,model,constant,residual,points");
    for (scheme, points) in groups {
        let r = fit_decay(&points, a.model)?;
        println!(
            "{scheme},{},{},{},{}",
            r.model, r.constant, r.residual, r.points
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Aht {
            command: AhtCommand::Verify(a),
        } => return aht_verify(&a),
        Command::GateFidelity(a) => write_set(&run_experiment(&gate_config(&a)?)?, &a.output)?,
        Command::Sawtooth(a) => write_set(&run_experiment(&sawtooth_config(&a)?)?, &a.output)?,
        Command::Husimi(a) => {
            let config = sawtooth_config(&a.sawtooth)?;
            let n_swhh = config.n_swhh[0];
            let (_, grid) = sawtooth_husimi(&config, n_swhh, a.window, a.resolution)?;
            match &a.sawtooth.output.out {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    write_husimi_csv(&grid, io::BufWriter::new(file))?;
                }
                None => write_husimi_csv(&grid, io::stdout().lock())?,
            }
        }
        Command::Fit(a) => fit(&a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

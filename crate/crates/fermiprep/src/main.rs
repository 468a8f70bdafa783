//! JSON-emitting CLI over the preparation pipelines. Every stochastic
//! subcommand takes a seed; identical argv yields byte-identical reports
//! apart from the timestamp field.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

use fermiprep::antisym::{
    antisymmetrize, exact_collision_probability, reference_antisymmetric_state, AntisymError,
    AntisymJob,
};
use fermiprep::comparator::{build_comparison_oracle, oracle_scratch_count, OracleVariant};
use fermiprep::network::{family_names, generate, resource_summary, verify_zero_one};
use fermiprep::phase::{
    aggregate_runs, amplitude_amplified_cost, iterative_phase_estimation, recover_energy,
    water_equilibrium, water_stretched, CostModelParams, SpectralModel,
};
use fermiprep::qubitize::{spectral_check, LcuSpec};
use fermiprep::shuffle::{shuffle_antisymmetrize, ShuffleError, ShuffleJob};
use fermiprep::sim::fidelity;

const EXIT_VALIDATION: i32 = 2;
const EXIT_SIM_CAP: i32 = 3;

#[derive(Parser)]
#[command(name = "fermiprep", about = "Fermionic eigenstate preparation pipelines")]
struct Cli {
    /// Write the JSON report here instead of standard output. Relative
    /// paths resolve under $FERMIPREP_OUTPUT_DIR when it is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Parallel,
    Sequential,
}

impl From<VariantArg> for OracleVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Parallel => OracleVariant::Parallel,
            VariantArg::Sequential => OracleVariant::Sequential,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Antisymmetrize ascending orbital labels via a reversed sorting network.
    Antisym {
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        orbitals: usize,
        /// Ascending orbital labels, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Vec<usize>,
        #[arg(long, default_value = "bitonic")]
        network: String,
        /// Seed-register alphabet size; defaults to the smallest power of
        /// two at or above eta^2.
        #[arg(long)]
        f_eta: Option<usize>,
        #[arg(long)]
        seed: u64,
    },
    /// Antisymmetrize via the reversible Fisher-Yates shuffle.
    Shuffle {
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        orbitals: usize,
        #[arg(long, value_delimiter = ',')]
        values: Vec<usize>,
        #[arg(long)]
        seed: u64,
    },
    /// Generate a sorting-network schedule and summarize its resources.
    Netgen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        wires: usize,
        /// Run the exhaustive 0-1 check (2^wires inputs).
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 4)]
        element_width: usize,
    },
    /// Build a comparison oracle and report its cost.
    Compare {
        #[arg(long)]
        width: usize,
        #[arg(long, value_enum, default_value = "parallel")]
        variant: VariantArg,
    },
    /// Qubitize an LCU Hamiltonian and check its recovered spectrum.
    Qubitize {
        /// Pauli strings, comma separated (e.g. X,Z or XX,ZI).
        #[arg(long, value_delimiter = ',')]
        paulis: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<f64>,
        /// JSON file with {"coefficients": [...], "terms": [...]}; overrides
        /// --paulis/--coeffs. Relative paths resolve under $FERMIPREP_DATA_DIR.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Iterative phase estimation on the walk operator from |0...0>.
    PhaseEstimate {
        #[arg(long, value_delimiter = ',')]
        paulis: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<f64>,
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        bits: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte-Carlo rejection vs naive preparation costs.
    CostModel {
        /// water-equilibrium, water-stretched, or a JSON file with
        /// {"model": SpectralModel, "params": CostModelParams}.
        #[arg(long)]
        fixture: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<AntisymError> for CliError {
    fn from(e: AntisymError) -> Self {
        let code = match e {
            AntisymError::TooManyQubits(_) => EXIT_SIM_CAP,
            _ => EXIT_VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<ShuffleError> for CliError {
    fn from(e: ShuffleError) -> Self {
        let code = match e {
            ShuffleError::TooManyQubits(_) => EXIT_SIM_CAP,
            _ => EXIT_VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

fn data_path(path: &std::path::Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("FERMIPREP_DATA_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let resolved = data_path(path);
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| CliError::validation(format!("{}: {e}", resolved.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", resolved.display())))
}

fn resolve_lcu(
    paulis: &[String],
    coeffs: &[f64],
    fixture: &Option<PathBuf>,
) -> Result<(LcuSpec, fermiprep::qubitize::LcuHamiltonian), CliError> {
    let spec = match fixture {
        Some(path) => read_json_file::<LcuSpec>(path)?,
        None => {
            if paulis.is_empty() || paulis.len() != coeffs.len() {
                return Err(CliError::validation(
                    "need matching --paulis and --coeffs, or --fixture",
                ));
            }
            LcuSpec {
                coefficients: coeffs.to_vec(),
                terms: paulis
                    .iter()
                    .map(|p| fermiprep::qubitize::TermSpec::Pauli { pauli: p.clone() })
                    .collect(),
            }
        }
    };
    let lcu = spec.resolve().map_err(|e| CliError::validation(e.to_string()))?;
    Ok((spec, lcu))
}

fn default_f_eta(eta: usize) -> usize {
    (eta * eta).max(2).next_power_of_two()
}

fn run(cli: &Cli) -> Result<Value, CliError> {
    match &cli.command {
        Command::Antisym { eta, orbitals, values, network, f_eta, seed } => {
            let f = f_eta.unwrap_or_else(|| default_f_eta(*eta));
            let schedule = generate(network, *eta)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let job = AntisymJob::new(*eta, *orbitals, f, schedule, values.clone())?;
            let result = antisymmetrize(&job, *seed)?;
            let reference = reference_antisymmetric_state(*eta, *orbitals, values)?;
            let fid = fidelity(result.state.amplitudes(), reference.amplitudes());
            eprintln!(
                "antisym eta={eta} N={orbitals} f={f}: success p={:.6}, attempts={}, fidelity deficit {:.3e}",
                result.success_probability,
                result.attempts,
                1.0 - fid
            );
            Ok(json!({
                "config": {
                    "subcommand": "antisym",
                    "eta": eta, "orbitals": orbitals, "values": values,
                    "network": network, "f_eta": f, "rng_seed": seed,
                },
                "success": result.success,
                "success_probability": result.success_probability,
                "collision_probability": exact_collision_probability(*eta, f),
                "attempts": result.attempts,
                "fidelity_vs_oracle": fid,
                "resources": result.resources,
            }))
        }
        Command::Shuffle { eta, orbitals, values, seed } => {
            let job = ShuffleJob::new(*eta, *orbitals, values.clone())?;
            let result = shuffle_antisymmetrize(&job, *seed)?;
            let reference = reference_antisymmetric_state(*eta, *orbitals, values)?;
            let fid = fidelity(result.state.amplitudes(), reference.amplitudes());
            eprintln!(
                "shuffle eta={eta} N={orbitals}: {} elementary gates, fidelity deficit {:.3e}",
                result.total_gates,
                1.0 - fid
            );
            Ok(json!({
                "config": {
                    "subcommand": "shuffle",
                    "eta": eta, "orbitals": orbitals, "values": values, "rng_seed": seed,
                },
                "total_gates": result.total_gates,
                "per_block": result.per_block,
                "fidelity_vs_oracle": fid,
                "resources": result.resources,
            }))
        }
        Command::Netgen { family, wires, verify, element_width } => {
            let schedule =
                generate(family, *wires).map_err(|e| CliError::validation(e.to_string()))?;
            let verified = if *verify {
                Some(verify_zero_one(&schedule).map_err(|e| CliError::validation(e.to_string()))?)
            } else {
                None
            };
            let summary = resource_summary(&schedule, *element_width);
            eprintln!(
                "netgen {family} wires={wires}: {} comparators in {} rounds{}",
                schedule.comparator_count(),
                schedule.depth(),
                match verified {
                    Some(true) => ", 0-1 verified",
                    Some(false) => ", 0-1 FAILED",
                    None => "",
                }
            );
            Ok(json!({
                "config": {
                    "subcommand": "netgen",
                    "family": family, "wires": wires, "verify": verify,
                    "element_width": element_width,
                    "known_families": family_names(),
                },
                "comparators": schedule.comparator_count(),
                "depth": schedule.depth(),
                "zero_one_verified": verified,
                "resources": summary,
            }))
        }
        Command::Compare { width, variant } => {
            if *width == 0 {
                return Err(CliError::validation("width must be positive"));
            }
            let v: OracleVariant = (*variant).into();
            let oracle = build_comparison_oracle(*width, v);
            let tally = &oracle.circuit.resource_tally;
            eprintln!(
                "compare d={width}: {} T, {} Toffoli, {} scratch",
                tally.t,
                tally.toffoli,
                oracle.scratch.len()
            );
            Ok(json!({
                "config": {
                    "subcommand": "compare",
                    "width": width,
                    "variant": match v {
                        OracleVariant::Parallel => "parallel",
                        OracleVariant::Sequential => "sequential",
                    },
                },
                "qubits": oracle.num_qubits,
                "scratch": oracle_scratch_count(*width, v),
                "resources": tally,
            }))
        }
        Command::Qubitize { paulis, coeffs, fixture } => {
            let (spec, lcu) = resolve_lcu(paulis, coeffs, fixture)?;
            let report = spectral_check(&lcu).map_err(|e| CliError::validation(e.to_string()))?;
            eprintln!(
                "qubitize: lambda={}, max spectral error {:.3e}",
                lcu.lambda, report.max_abs_error
            );
            Ok(json!({
                "config": { "subcommand": "qubitize", "lcu": spec },
                "lambda": lcu.lambda,
                "report": report,
            }))
        }
        Command::PhaseEstimate { paulis, coeffs, fixture, bits, seed } => {
            if *bits == 0 || *bits > 24 {
                return Err(CliError::validation("bits must lie in 1..=24"));
            }
            let (spec, lcu) = resolve_lcu(paulis, coeffs, fixture)?;
            let q = fermiprep::qubitize::build_qubiterate(&lcu)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let mut initial = fermiprep::phase::CVector::zeros(q.w.nrows());
            initial[0] = num_complex::Complex64::new(1.0, 0.0);
            let (phase, _) = iterative_phase_estimation(&q.w, &initial, *bits, *seed);
            let energy = recover_energy(phase, q.lambda);
            eprintln!("phase-estimate: phase={phase:.6}, energy={energy:.6}");
            Ok(json!({
                "config": {
                    "subcommand": "phase-estimate",
                    "lcu": spec, "bits": bits, "rng_seed": seed,
                },
                "lambda": q.lambda,
                "phase": phase,
                "energy": energy,
                "resolution": std::f64::consts::TAU * q.lambda / (1u64 << bits) as f64,
            }))
        }
        Command::CostModel { fixture, trials, seed } => {
            if *trials == 0 {
                return Err(CliError::validation("trials must be positive"));
            }
            let (model, params): (SpectralModel, CostModelParams) = match fixture.as_str() {
                "water-equilibrium" => water_equilibrium(),
                "water-stretched" => water_stretched(),
                path => {
                    #[derive(serde::Deserialize)]
                    struct Fixture {
                        model: SpectralModel,
                        params: CostModelParams,
                    }
                    let f: Fixture = read_json_file(std::path::Path::new(path))?;
                    (f.model, f.params)
                }
            };
            model.validate().map_err(|e| CliError::validation(e.to_string()))?;
            params.validate().map_err(|e| CliError::validation(e.to_string()))?;
            let rejection = aggregate_runs(&model, &params, *trials, *seed, false)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let naive = aggregate_runs(&model, &params, *trials, seed.wrapping_add(1), true)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let amplified = params
                .e1_bound
                .map(|_| amplitude_amplified_cost(&params))
                .transpose()
                .map_err(|e| CliError::validation(e.to_string()))?;
            eprintln!(
                "cost-model {fixture}: rejection {:.1} (analytic {:.1}), naive {:.1} (analytic {:.1})",
                rejection.mean_cost, rejection.analytic_cost, naive.mean_cost, naive.analytic_cost
            );
            Ok(json!({
                "config": {
                    "subcommand": "cost-model",
                    "fixture": fixture, "trials": trials, "rng_seed": seed,
                    "model": model, "params": params,
                },
                "rejection": rejection,
                "naive": naive,
                "analytic_speedup": naive.analytic_cost / rejection.analytic_cost,
                "amplitude_amplified_cost": amplified,
            }))
        }
    }
}

fn emit(cli: &Cli, mut report: Value) -> std::io::Result<()> {
    report["timestamp"] = json!(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    );
    let text = serde_json::to_string_pretty(&report)?;
    match &cli.output {
        Some(path) => {
            let resolved = if path.is_relative() {
                match std::env::var("FERMIPREP_OUTPUT_DIR") {
                    Ok(dir) => PathBuf::from(dir).join(path),
                    Err(_) => path.clone(),
                }
            } else {
                path.clone()
            };
            std::fs::write(resolved, text + "\n")
        }
        None => writeln!(std::io::stdout(), "{text}"),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli, report) {
                eprintln!("error: {e}");
                std::process::exit(EXIT_VALIDATION);
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

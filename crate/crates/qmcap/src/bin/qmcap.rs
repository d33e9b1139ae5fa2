use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qmcap::io::{self, EnsembleJson};
use qmcap::search::search_counterexamples;
use qmcap::suites::{run_suite, SuiteConfig, SuiteReport, SUITES};
use qmcap_core::covariant::simplex_entropy_integral;
use qmcap_core::disturb::{d_input_bounds, d_output, d_output_min, InputConfig};
use qmcap_core::encode::{conditional_outcome_dist, Ensemble};
use qmcap_core::entropy::{harmonic_tail, subentropy_of_spectrum};
use qmcap_core::infocap::{
    blahut_arimoto, capacity_commutative, capacity_general, capacity_ps, capacity_ucm, info_final, info_initial,
    measurement_strength, purification_capacity, BaConfig, CapacityResult, SearchConfig, Semantics,
};
use qmcap_core::measure::{common_eigenbasis, Measurement, CLASSIFY_TOL};
use qmcap_core::{ComplexMatrix, DensityOperator, SpectrumVector};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qmcap", version, about = "Information capacity and disturbance of quantum measurements")]
struct Cli {
    /// Units for reported information values.
    #[arg(long, value_enum, global = true, default_value = "nats")]
    units: Units,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Nats,
    Bits,
}

impl Units {
    fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CapMethod {
    Auto,
    Ba,
    Ps,
    Ucm,
}

#[derive(Subcommand)]
enum Command {
    /// Check completeness of a measurement file.
    Validate { measurement: PathBuf },
    /// List the classes a measurement belongs to.
    Classify {
        measurement: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Classical capacity of a measurement.
    Cap {
        measurement: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: CapMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Capacity of a covariant measurement from its generator effects.
    UcmCap { spec: PathBuf },
    /// Capacity of a permutation-symmetric measurement from diagonal generators.
    PsCap { generators: PathBuf },
    /// Information gained about the maximally mixed state.
    Strength { measurement: PathBuf },
    /// Largest final-state information found over input states.
    PurifyCap {
        measurement: PathBuf,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Information gain for an ensemble.
    Info {
        measurement: PathBuf,
        #[arg(long)]
        ensemble: PathBuf,
        /// Final-state information of the ensemble's average state.
        #[arg(long, conflicts_with = "initial")]
        r#final: bool,
        /// Information about the preparation index (default).
        #[arg(long)]
        initial: bool,
    },
    /// Disturbance measures.
    Disturb {
        measurement: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, group = "mode")]
        input: bool,
        #[arg(long, group = "mode")]
        output: bool,
        #[arg(long, group = "mode")]
        output_min: bool,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Subentropy of a spectrum given as a comma list.
    Subentropy { spectrum: String },
    /// Compare the simplex quadrature with the subentropy formula (N = 2, 3).
    SimplexCheck {
        spectrum: String,
        #[arg(long, default_value_t = 200)]
        order: usize,
    },
    /// Run a property suite.
    Suite {
        id: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive dimension range, e.g. 2..4.
        #[arg(long)]
        dims: Option<String>,
        /// Monte Carlo samples per estimate.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Search for counterexamples to a concatenation or Schur inequality.
    Search {
        id: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
}

type Outcome = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn complete(path: &Path) -> Result<Measurement, String> {
    let m = io::load_measurement(path).map_err(|e| e.to_string())?;
    let report = m.validate();
    if !report.complete {
        return Err(format!(
            "{}: operators are not complete (defect {:e})",
            path.display(),
            report.defect
        ));
    }
    Ok(m)
}

fn parse_dims(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {text:?}"))?;
    let lo = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if lo < 2 || hi < lo {
        return Err(format!("bad dimension range {text:?}"));
    }
    Ok((lo, hi))
}

fn print_value(cli: &Cli, name: &str, nats: f64) {
    let v = cli.units.convert(nats);
    if cli.json {
        println!("{}", json!({ name: v, "units": cli.units.name() }));
    } else {
        println!("{name}: {v:.9} {}", cli.units.name());
    }
}

fn print_capacity(cli: &Cli, r: &CapacityResult) {
    if cli.json {
        let mut obj = json!({
            "value": cli.units.convert(r.value),
            "units": cli.units.name(),
            "semantics": r.semantics.as_str(),
            "stderr": cli.units.convert(r.stderr),
            "method": r.method.as_str(),
        });
        if let Some(e) = &r.achieving_encoding {
            obj["achieving_encoding"] = serde_json::to_value(EnsembleJson::from_ensemble(e)).expect("json");
        }
        println!("{}", serde_json::to_string_pretty(&obj).expect("json"));
    } else {
        println!("capacity   {:.9} {}", cli.units.convert(r.value), cli.units.name());
        println!("semantics  {}", r.semantics.as_str());
        println!("method     {}", r.method.as_str());
        if r.stderr > 0.0 {
            println!("stderr     {:.3e}", cli.units.convert(r.stderr));
        }
        if let Some(e) = &r.achieving_encoding {
            let p: Vec<String> = e.priors().values().iter().map(|v| format!("{v:.6}")).collect();
            println!("prior      [{}]", p.join(", "));
        }
    }
}

fn print_report(cli: &Cli, r: &SuiteReport) -> ExitCode {
    if cli.json {
        println!("{}", r.to_json());
    } else {
        println!("suite       {}", r.suite);
        println!("trials      {}", r.trials);
        println!("violations  {}", r.violations.len());
        if !r.candidates.is_empty() {
            println!("candidates  {}", r.candidates.len());
        }
        println!("pass        {}", r.pass);
        println!("runtime     {} ms", r.runtime_ms);
        for v in r.violations.iter().chain(&r.candidates).take(20) {
            println!(
                "  trial {:>5}  {}  lhs {:.12e}  rhs {:.12e}  gap {:.3e}",
                v.trial, v.inputs_ref, v.lhs, v.rhs, v.gap
            );
        }
    }
    if r.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Generators (Ẽ_n, Tr E_n / N) of a permutation-symmetric measurement in
/// its eigenbasis.
fn ps_generators(m: &Measurement) -> Result<Vec<(ComplexMatrix, f64)>, String> {
    if !m.classify(None).permutation_symmetric {
        return Err("measurement is not permutation-symmetric".into());
    }
    let basis = common_eigenbasis(m.operators(), CLASSIFY_TOL).ok_or("no common eigenbasis")?;
    let n = m.dim() as f64;
    Ok(m.effects()
        .iter()
        .filter_map(|e| {
            let d = (&(&basis.adjoint() * e.matrix()) * &basis).real_diagonal();
            let tr: f64 = d.iter().sum();
            (tr > 1e-12).then(|| (ComplexMatrix::from_real_diag(&d.iter().map(|v| v / tr).collect::<Vec<_>>()), tr / n))
        })
        .collect())
}

fn run(cli: &Cli) -> Outcome {
    let err = |e: qmcap_core::Error| e.to_string();
    match &cli.command {
        Command::Validate { measurement } => {
            let m = io::load_measurement(measurement).map_err(|e| e.to_string())?;
            let r = m.validate();
            if cli.json {
                println!("{}", json!({ "complete": r.complete, "defect": r.defect }));
            } else {
                println!("complete  {}", r.complete);
                println!("defect    {:.3e}", r.defect);
            }
            Ok(if r.complete { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Classify { measurement, state } => {
            let m = complete(measurement)?;
            let rho = state.as_deref().map(io::load_state).transpose().map_err(|e| e.to_string())?;
            let flags = m.classify(rho.as_ref()).flags();
            if cli.json {
                println!("{}", json!({ "flags": flags }));
            } else {
                println!("{}", flags.join("\n"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cap { measurement, method, seed } => {
            let m = complete(measurement)?;
            let r = match method {
                CapMethod::Auto => capacity_general(
                    &m,
                    SearchConfig {
                        seed: *seed,
                        ..Default::default()
                    },
                )
                .map_err(err)?,
                CapMethod::Ba => match capacity_commutative(&m) {
                    Ok(r) => r,
                    Err(qmcap_core::Error::NotCommutative) => {
                        let basis = Ensemble::uniform_basis(m.dim(), None).map_err(err)?;
                        let kernel = conditional_outcome_dist(&m, &basis).map_err(err)?;
                        let mut r = blahut_arimoto(&kernel, BaConfig::default()).map_err(err)?;
                        r.semantics = Semantics::LowerBound;
                        r
                    }
                    Err(e) => return Err(e.to_string()),
                },
                CapMethod::Ps => capacity_ps(&ps_generators(&m)?).map_err(err)?,
                CapMethod::Ucm => {
                    return Err("covariant measurements have no operator list; use `qmcap ucm-cap <spec.json>`".into())
                }
            };
            print_capacity(cli, &r);
            Ok(ExitCode::SUCCESS)
        }
        Command::UcmCap { spec } => {
            let s = io::load_components(spec).map_err(|e| e.to_string())?.to_ucm().map_err(|e| e.to_string())?;
            print_capacity(cli, &capacity_ucm(&s).map_err(err)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::PsCap { generators } => {
            let pairs = io::load_components(generators)
                .map_err(|e| e.to_string())?
                .to_pairs()
                .map_err(|e| e.to_string())?;
            print_capacity(cli, &capacity_ps(&pairs).map_err(err)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Strength { measurement } => {
            print_value(cli, "strength", measurement_strength(&complete(measurement)?).map_err(err)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::PurifyCap { measurement, restarts, seed } => {
            let m = complete(measurement)?;
            print_capacity(cli, &purification_capacity(&m, *restarts, *seed).map_err(err)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Info { measurement, ensemble, r#final, .. } => {
            let m = complete(measurement)?;
            let e = io::load_ensemble(ensemble).map_err(|e| e.to_string())?;
            if *r#final {
                print_value(cli, "final_information", info_final(&m, &e.density()).map_err(err)?);
            } else {
                print_value(cli, "initial_information", info_initial(&m, &e).map_err(err)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Disturb {
            measurement,
            state,
            input,
            output_min,
            restarts,
            seed,
            ..
        } => {
            let m = complete(measurement)?;
            if *input {
                let r = d_input_bounds(
                    &m,
                    InputConfig {
                        restarts: *restarts,
                        seed: *seed,
                        ..Default::default()
                    },
                )
                .map_err(err)?;
                if r.clamped {
                    eprintln!("warning: Holevo search exceeded ln N; lower bound clamped");
                }
                let (lo, hi) = (cli.units.convert(r.lo), cli.units.convert(r.hi));
                if cli.json {
                    println!(
                        "{}",
                        json!({ "lo": lo, "hi": hi, "semantics": r.semantics.as_str(), "units": cli.units.name(), "clamped": r.clamped })
                    );
                } else {
                    println!("input_disturbance  [{lo:.9}, {hi:.9}] {} ({})", cli.units.name(), r.semantics.as_str());
                }
            } else if *output_min {
                print_value(cli, "output_disturbance_min", d_output_min(&m, *restarts, *seed).map_err(err)?);
            } else {
                let rho = match state {
                    Some(p) => io::load_state(p).map_err(|e| e.to_string())?,
                    None => DensityOperator::maximally_mixed(m.dim()),
                };
                print_value(cli, "output_disturbance", d_output(&m, &rho).map_err(err)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Subentropy { spectrum } => {
            let e = io::parse_list(spectrum)?;
            print_value(cli, "subentropy", subentropy_of_spectrum(&e).map_err(err)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::SimplexCheck { spectrum, order } => {
            let e = io::parse_list(spectrum)?;
            let quad = simplex_entropy_integral(&SpectrumVector::probability(e.clone()).map_err(err)?, *order).map_err(err)?;
            let closed = subentropy_of_spectrum(&e).map_err(err)? + harmonic_tail(e.len());
            let diff = (quad - closed).abs();
            if cli.json {
                println!("{}", json!({ "quadrature": quad, "closed_form": closed, "difference": diff }));
            } else {
                println!("quadrature   {quad:.12}");
                println!("closed form  {closed:.12}");
                println!("difference   {diff:.3e}");
            }
            let tol = if e.len() == 2 { 1e-6 } else { 1e-4 };
            Ok(if diff <= tol { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Suite {
            id,
            trials,
            seed,
            dims,
            samples,
        } => {
            let config = SuiteConfig {
                trials: *trials,
                dims: dims.as_deref().map(parse_dims).transpose()?,
                seed: *seed,
                samples: *samples,
            };
            let report = run_suite(id, &config).map_err(|e| {
                let known: Vec<&str> = SUITES.iter().map(|s| s.id).collect();
                format!("{e}; known suites: {}", known.join(", "))
            })?;
            Ok(print_report(cli, &report))
        }
        Command::Search {
            id,
            trials,
            seed,
            dims,
            samples,
        } => {
            let config = SuiteConfig {
                trials: *trials,
                dims: dims.as_deref().map(parse_dims).transpose()?,
                seed: *seed,
                samples: *samples,
            };
            let report = search_counterexamples(id, &config).map_err(|e| {
                format!("{e}; known inequalities: {}", qmcap::search::INEQUALITIES.join(", "))
            })?;
            Ok(print_report(cli, &report))
        }
    }
}

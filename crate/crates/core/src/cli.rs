//! Command-line front end. The `awqpe` binary forwards here.
//!
//! Exit codes: 0 when the command ran and its check (if any) passed, 1 when
//! a check failed, 2 on bad arguments or input.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::binary::PhaseValue;
use crate::bounds::{self, BoundParams};
use crate::error::{AwqpeError, Result};
use crate::estimator::{Backend, EstimationConfig, TieBreak, DEFAULT_EPSILON, DEFAULT_SHOTS};
use crate::harness::{self, CampaignSummary, CaseReport};
use crate::resources;
use crate::statevector::UnitaryModel;

#[derive(Parser, Debug)]
#[command(name = "awqpe", version, about = "Adaptive windowed quantum phase estimation")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    /// One JSON object per line.
    Record,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Lowest,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// kernel-sampling, statevector-sampling or infinite-shot.
    #[arg(long, default_value_t = Backend::KernelSampling)]
    pub backend: Backend,
    #[arg(long, value_enum, default_value_t = TieBreakArg::Lowest)]
    pub tie_break: TieBreakArg,
}

impl RunArgs {
    fn config(&self, m_list: Vec<u32>) -> EstimationConfig {
        EstimationConfig::new(m_list)
            .with_shots(self.shots)
            .with_epsilon(self.epsilon)
            .with_seed(self.seed)
            .with_backend(self.backend)
            .with_tie_break(match self.tie_break {
                TieBreakArg::Lowest => TieBreak::LowestIndex,
                TieBreakArg::Random => TieBreak::Random,
            })
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate one phase.
    Estimate {
        /// Decimal, `p/q`, `0b...` or a named constant such as `pi/6`.
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        phi: Option<String>,
        /// Text file describing a dense unitary and its eigenstate.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Reproduce the five reference cases and compare with published bits.
    Table1 {
        #[command(flatten)]
        run: RunArgs,
    },
    /// The detailed example 0.8203125 with windows [3, 2, 3].
    Walkthrough {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Every phase I/2^n on the infinite-shot backend.
    Grid {
        #[arg(long)]
        n: u32,
        /// A single window list; omit to use every composition.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<u32>>,
        #[arg(long, default_value_t = 2)]
        min_part: u32,
    },
    /// Uniform random phases.
    Montecarlo {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_delimiter = ',', default_value = "4,4,4,4")]
        m: Vec<u32>,
        /// Fail below this success rate.
        #[arg(long, default_value_t = 0.99)]
        min_rate: f64,
        /// Also write every case as a JSON line to this file.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Rerun special-chunk cases with a shifted phase.
        #[arg(long)]
        confirm: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the analytic kernel with the simulated circuit.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        phases: usize,
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        #[arg(long, default_value_t = 20)]
        k_max: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shot budgets, optionally checked empirically.
    Bounds {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,8")]
        m: Vec<u32>,
        #[arg(long, default_value_t = 0.01)]
        eps1: f64,
        #[arg(long, default_value_t = 0.01)]
        eps2: f64,
        #[arg(long, default_value_t = 0.05)]
        delta_r: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Trials per window size for the empirical check; 0 skips it.
        #[arg(long, default_value_t = 0)]
        validate: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Controlled-U applications, qubits and depth per block.
    Resources {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        /// Also print the gate listing of each block.
        #[arg(long)]
        circuits: bool,
    },
    /// Estimate phi and phi + dphi and compare the shift.
    Perturb {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        dphi: String,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn dispatch<I, T>(args: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli, out)),
            Err(e) => Err(AwqpeError::Config(e.to_string())),
        },
        None => execute(&cli, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(AwqpeError::Io(msg)) => {
            eprintln!("awqpe: {msg}");
            1
        }
        Err(e) => {
            eprintln!("awqpe: {e}");
            2
        }
    }
}

fn io(e: std::io::Error) -> AwqpeError {
    AwqpeError::Io(e.to_string())
}

/// Effective configuration: stdout in text mode, stderr otherwise so csv and
/// record output stay machine-readable.
fn announce(fmt: Format, out: &mut (dyn Write + Send), line: String) -> Result<()> {
    if fmt == Format::Text {
        writeln!(out, "# {line}").map_err(io)
    } else {
        eprintln!("# {line}");
        Ok(())
    }
}

fn describe(cfg: &EstimationConfig) -> String {
    format!(
        "m={:?} shots={} epsilon={} seed={} backend={} tie-break={:?}",
        cfg.m_list, cfg.shots, cfg.epsilon, cfg.seed, cfg.backend, cfg.tie_break
    )
}

fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<bool> {
    let fmt = cli.format;
    match &cli.command {
        Command::Estimate { phi, model, m, run } => {
            let model = match (phi, model) {
                (Some(p), _) => UnitaryModel::diagonal(PhaseValue::parse(p)?),
                (None, Some(path)) => UnitaryModel::from_file(path)?,
                (None, None) => return Err(AwqpeError::Config("need --phi or --model".into())),
            };
            let cfg = run.config(m.clone());
            cfg.validate()?;
            announce(fmt, out, describe(&cfg))?;
            let report = harness::run_case(&model, &cfg)?;
            write_case(fmt, out, &report)?;
            Ok(true)
        }
        Command::Table1 { run } => {
            let base = run.config(vec![2]);
            announce(fmt, out, format!("shots={} epsilon={} seed={} backend={}", base.shots, base.epsilon, base.seed, base.backend))?;
            let rows = harness::run_table1(&base)?;
            let all_match = rows
                .iter()
                .all(|(row, rep)| rep.raw_bits == row.raw_bits && rep.est_bits == row.final_bits);
            match fmt {
                Format::Csv => out.write_all(harness::table1_csv(&rows).as_bytes()).map_err(io)?,
                Format::Record => {
                    for (_, rep) in &rows {
                        writeln!(out, "{}", rep.to_record()).map_err(io)?;
                    }
                }
                Format::Text => {
                    for (row, rep) in &rows {
                        let ok = rep.raw_bits == row.raw_bits && rep.est_bits == row.final_bits;
                        writeln!(
                            out,
                            "case {}: {}\n  raw   {} (published {})\n  final {} (published {})\n  value {} (published {})  {}",
                            row.case,
                            row.input,
                            rep.raw_bits,
                            row.raw_bits,
                            rep.est_bits,
                            row.final_bits,
                            rep.est_decimal,
                            row.final_decimal,
                            if ok { "match" } else { "MISMATCH" }
                        )
                        .map_err(io)?;
                    }
                }
            }
            Ok(all_match)
        }
        Command::Walkthrough { run } => {
            let (model, _) = harness::walkthrough_config(run.seed);
            let cfg = run.config(vec![3, 2, 3]);
            announce(fmt, out, describe(&cfg))?;
            let report = harness::run_case(&model, &cfg)?;
            write_case(fmt, out, &report)?;
            Ok(report.success)
        }
        Command::Grid { n, m, min_part } => {
            let lists = match m {
                Some(list) => vec![list.clone()],
                None => harness::compositions(*n, *min_part),
            };
            announce(fmt, out, format!("n={n} compositions={} backend=infinite-shot", lists.len()))?;
            let summaries = harness::exhaustive_grid(*n, &lists)?;
            write_summaries(fmt, out, &summaries)?;
            Ok(summaries.iter().all(grid_passes))
        }
        Command::Montecarlo { trials, m, min_rate, records, confirm, run } => {
            let cfg = run.config(m.clone());
            cfg.validate()?;
            announce(fmt, out, format!("trials={trials} {}", describe(&cfg)))?;
            let start = std::time::Instant::now();
            let cases = harness::monte_carlo_cases(*trials, &cfg, *confirm)?;
            let summary = CampaignSummary::from_cases(
                format!(
                    "monte-carlo n={} m={:?}{}",
                    cfg.n_total(),
                    cfg.m_list,
                    if *confirm { " confirmed" } else { "" }
                ),
                cfg.seed,
                &cases,
                start.elapsed().as_secs_f64(),
            );
            if let Some(path) = records {
                let file = File::create(path).map_err(io)?;
                harness::write_records(&cases, BufWriter::new(file)).map_err(io)?;
            }
            write_summaries(fmt, out, std::slice::from_ref(&summary))?;
            Ok(summary.success_rate >= *min_rate)
        }
        Command::OracleCheck { phases, m_max, k_max, tol, seed } => {
            announce(fmt, out, format!("phases={phases} m=2..={m_max} k=0..={k_max} tol={tol:e} seed={seed}"))?;
            let r = harness::oracle_check(*phases, *m_max, *k_max, *seed)?;
            match fmt {
                Format::Record => writeln!(out, "{}", serde_json::to_string(&r).expect("serializable")),
                Format::Csv => writeln!(
                    out,
                    "comparisons,max_distance,worst_phi,worst_m,worst_k\n{},{:e},{},{},{}",
                    r.comparisons, r.max_distance, r.worst_phi, r.worst_m, r.worst_k
                ),
                Format::Text => writeln!(
                    out,
                    "{} comparisons, max |kernel - simulated| = {:e} (phi={}, m={}, k={})",
                    r.comparisons, r.max_distance, r.worst_phi, r.worst_m, r.worst_k
                ),
            }
            .map_err(io)?;
            Ok(r.max_distance <= *tol)
        }
        Command::Bounds { m, eps1, eps2, delta_r, epsilon, validate, seed } => {
            let params = BoundParams {
                epsilon1: *eps1,
                epsilon2: *eps2,
                delta_r: *delta_r,
                epsilon: *epsilon,
                ..BoundParams::default()
            };
            params.validate()?;
            announce(fmt, out, format!("eps1={eps1} eps2={eps2} delta_r={delta_r} epsilon={epsilon} seed={seed}"))?;
            let amb = params.shots_for_ambiguity()?;
            if fmt == Format::Csv {
                writeln!(out, "m,shots_top_outcome,shots_ambiguity,trials,misses,miss_rate").map_err(io)?;
            } else if fmt == Format::Text {
                writeln!(
                    out,
                    "constant 2/dp^2 = {:.4}; ambiguity budget {} shots; pair bound at 100 shots = {:.4e}",
                    params.top_outcome_constant(),
                    amb,
                    bounds::pair_error_bound(100, params.delta_p_min)?
                )
                .map_err(io)?;
            }
            let mut pass = true;
            for &mm in m {
                let shots = params.shots_for_top_outcome(mm)?;
                let check = if *validate > 0 {
                    Some(harness::validate_top_outcome_bound(mm, *eps1, *validate, *seed)?)
                } else {
                    None
                };
                if let Some(c) = &check {
                    pass &= c.miss_rate <= *eps1;
                }
                match fmt {
                    Format::Text => {
                        write!(out, "m={mm}: {shots} shots").map_err(io)?;
                        if let Some(c) = &check {
                            write!(out, "; observed miss rate {}/{} = {:.5}", c.misses, c.trials, c.miss_rate).map_err(io)?;
                        }
                        writeln!(out).map_err(io)?;
                    }
                    Format::Csv => {
                        let (t, mi, r) = check
                            .as_ref()
                            .map(|c| (c.trials.to_string(), c.misses.to_string(), c.miss_rate.to_string()))
                            .unwrap_or_default();
                        writeln!(out, "{mm},{shots},{amb},{t},{mi},{r}").map_err(io)?;
                    }
                    Format::Record => {
                        let v = serde_json::json!({
                            "m": mm, "shots_top_outcome": shots, "shots_ambiguity": amb, "check": check,
                        });
                        writeln!(out, "{v}").map_err(io)?;
                    }
                }
            }
            Ok(pass)
        }
        Command::Resources { m, circuits } => {
            let r = resources::report(m)?;
            match fmt {
                Format::Text => {
                    out.write_all(r.to_text().as_bytes()).map_err(io)?;
                    if *circuits {
                        let mut k = 0;
                        for &mm in m {
                            writeln!(out).map_err(io)?;
                            out.write_all(resources::circuit_summary(k, mm, 1).as_bytes()).map_err(io)?;
                            k += mm;
                        }
                    }
                }
                Format::Csv => out.write_all(r.to_csv().as_bytes()).map_err(io)?,
                Format::Record => writeln!(out, "{}", serde_json::to_string(&r).expect("serializable")).map_err(io)?,
            }
            Ok(true)
        }
        Command::Perturb { phi, dphi, m, run } => {
            let cfg = run.config(m.clone());
            cfg.validate()?;
            announce(fmt, out, describe(&cfg))?;
            let model = UnitaryModel::diagonal(PhaseValue::parse(phi)?);
            let v = harness::perturbation_check(&model, PhaseValue::parse(dphi)?, &cfg)?;
            match fmt {
                Format::Record => writeln!(out, "{}", serde_json::to_string(&v).expect("serializable")),
                Format::Csv => writeln!(
                    out,
                    "phi,delta_phi,est,est_shifted,observed_shift,distance,tolerance,pass\n{},{},{},{},{},{},{},{}",
                    v.phi, v.delta_phi, v.est, v.est_shifted, v.observed_shift, v.distance, v.tolerance, v.pass
                ),
                Format::Text => writeln!(
                    out,
                    "phi {} -> {} (special chunk {:?})\nphi + {} -> {} (special chunk {:?})\nobserved shift {} vs intended, distance {:e} (tolerance {:e}): {}",
                    v.phi,
                    v.est,
                    v.last_idx,
                    v.delta_phi,
                    v.est_shifted,
                    v.last_idx_shifted,
                    v.observed_shift,
                    v.distance,
                    v.tolerance,
                    if v.pass { "consistent" } else { "INCONSISTENT" }
                ),
            }
            .map_err(io)?;
            Ok(v.pass)
        }
    }
}

fn grid_passes(s: &CampaignSummary) -> bool {
    s.clean_successes() == s.clean_cases() && s.tie_successes + s.tie_special_chunk == s.tie_cases
}

fn write_case(fmt: Format, out: &mut (dyn Write + Send), r: &CaseReport) -> Result<()> {
    match fmt {
        Format::Record => writeln!(out, "{}", r.to_record()),
        Format::Csv => writeln!(
            out,
            "phi_true,m_list,raw_bits,flags,last_idx,est_bits,est_decimal,expected_bits,success\n{},{},{},{},{},{},{},{},{}",
            r.phi_true,
            join(&r.m_list, ";"),
            r.raw_bits,
            join(&r.flags.iter().map(|&f| u8::from(f)).collect::<Vec<_>>(), ";"),
            r.last_idx.map(|i| i.to_string()).unwrap_or_default(),
            r.est_bits,
            r.est_decimal,
            r.expected_bits,
            r.success
        ),
        Format::Text => {
            let mut s = format!("phi = {}\n", r.phi_true);
            for w in &r.windows {
                let top: Vec<String> = w.top5.iter().map(|(b, c)| format!("{b}:{c}")).collect();
                s += &format!(
                    "block {}: T1={} T2={} ratio={:.4}{} top=[{}]\n",
                    w.block,
                    w.t1,
                    w.t2,
                    w.ratio,
                    if w.flag_amb { " AMBIGUOUS" } else { "" },
                    top.join(" ")
                );
            }
            s += &format!(
                "raw   {}\nfinal {} = {} (special chunk {:?})\nbest  {} -> {}\n",
                r.raw_bits,
                r.est_bits,
                r.est_decimal,
                r.last_idx,
                r.expected_bits,
                if r.success { "success" } else { "miss" }
            );
            write!(out, "{s}")
        }
    }
    .map_err(io)
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn write_summaries(fmt: Format, out: &mut (dyn Write + Send), summaries: &[CampaignSummary]) -> Result<()> {
    match fmt {
        Format::Record => {
            for s in summaries {
                writeln!(out, "{}", serde_json::to_string(s).expect("serializable")).map_err(io)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "label", "trials", "successes", "success_rate", "tie_cases", "tie_successes",
                "tie_special_chunk", "failures", "wall_time_s",
            ])
            .expect("in-memory write");
            for s in summaries {
                w.write_record([
                    s.label.clone(),
                    s.trials.to_string(),
                    s.successes.to_string(),
                    s.success_rate.to_string(),
                    s.tie_cases.to_string(),
                    s.tie_successes.to_string(),
                    s.tie_special_chunk.to_string(),
                    s.failures.len().to_string(),
                    format!("{:.3}", s.wall_time_s),
                ])
                .expect("in-memory write");
            }
            out.write_all(&w.into_inner().expect("in-memory flush")).map_err(io)?;
        }
        Format::Text => {
            for s in summaries {
                writeln!(
                    out,
                    "{}: {}/{} ({:.4}) | ties {}: {} exact, {} special-chunk | {:.2}s",
                    s.label,
                    s.successes,
                    s.trials,
                    s.success_rate,
                    s.tie_cases,
                    s.tie_successes,
                    s.tie_special_chunk,
                    s.wall_time_s
                )
                .map_err(io)?;
                for f in s.failures.iter().take(10) {
                    writeln!(out, "  miss: phi={} est={} best={} seed={}", f.phi_true, f.est_bits, f.expected_bits, f.seed)
                        .map_err(io)?;
                }
            }
        }
    }
    Ok(())
}

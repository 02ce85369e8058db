// Copyright 2026 The chsh-concepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end. `main.rs` only parses arguments and forwards
//! here, so every command is testable in-process.
//!
//! Exit codes: 0 success, 1 verification or classification failure,
//! 2 input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::amplitude::StateVector4;
use crate::chsh::{chsh_statistic, ChshReport, ExperimentSuite, Setting};
use crate::corpus::{build_suite, count_corpus, Corpus};
use crate::entanglement::{classify_measurement, MeasurementClassification, SchmidtReport};
use crate::error::Error;
use crate::exec::Execution;
use crate::io::{self, ExperimentFile, SolutionFile};
use crate::model::{
    model_chsh, singlet_state, solve_suite, verify_solution, ModelSolution, SolverKind,
    VerificationReport,
};
use crate::tolerance::{Profile, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Largest |ΔS| or |ΔE| accepted by `roundtrip`.
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "chsh-concepts", version, about = "CHSH analysis and Hilbert-space models of concept co-occurrence data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count a query over a directory of UTF-8 text files and write an experiment file.
    Count(CountArgs),
    /// Expectation values, CHSH statistic and bound classification of an experiment.
    Chsh(ChshArgs),
    /// Fit spectral families to an experiment and write a solution file.
    Solve(SolveArgs),
    /// Check a solution file against an experiment.
    Verify(VerifyArgs),
    /// Solve, recompute CHSH from the model and compare with the data.
    Roundtrip(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Strict,
    Quoted,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Strict => Profile::Strict,
            ProfileArg::Quoted => Profile::Quoted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Constructive,
    Ansatz,
    Auto,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Constructive => SolverKind::Constructive,
            SolverArg::Ansatz => SolverKind::Ansatz,
            SolverArg::Auto => SolverKind::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Directory of plain-text documents.
    pub corpus: PathBuf,
    /// Query file.
    pub query: PathBuf,
    /// Collocate window (words on each side); overrides the query file.
    #[arg(long)]
    pub window: Option<usize>,
    /// Experiment name; defaults to the corpus directory name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    pub experiment: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub experiment: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// `singlet` or a file holding [[re, im] x 4].
    #[arg(long, default_value = "singlet")]
    pub state: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub solution: PathBuf,
    pub experiment: PathBuf,
    #[arg(long, value_enum, default_value_t = ProfileArg::Strict)]
    pub profile: ProfileArg,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command, writing reports to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Count(a) => cmd_count(&a, out),
        Command::Chsh(a) => cmd_chsh(&a, out),
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Roundtrip(a) => cmd_roundtrip(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError { code, error }) => {
            let _ = writeln!(err, "error: {error}");
            code
        }
    }
}

struct CliError {
    code: i32,
    error: Error,
}

fn input(error: Error) -> CliError {
    CliError {
        code: EXIT_INPUT,
        error,
    }
}

fn failure(error: Error) -> CliError {
    CliError {
        code: EXIT_FAIL,
        error,
    }
}

type CmdResult = Result<i32, CliError>;

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => io::write_text(p, text).map_err(input),
        None => out.write_all(text.as_bytes()).map_err(|e| {
            input(Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })
        }),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    io::to_canonical_json(value).map_err(input)
}

fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> CmdResult {
    let queries = io::read_query(&args.query, args.window).map_err(input)?;
    let corpus = Corpus::from_dir(&args.corpus).map_err(input)?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.corpus
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".into())
    });
    let totals = count_corpus(&corpus, &queries, Execution::default()).map_err(input)?;
    let suite = build_suite(&corpus, &queries, &name, Execution::default()).map_err(input)?;
    let experiment = json(&ExperimentFile::from_suite(&suite))?;

    let mut summary = String::new();
    summary.push_str(&format!(
        "corpus {} ({} documents), mode {:?}, window {}\n",
        args.corpus.display(),
        corpus.len(),
        queries.mode,
        queries.window
    ));
    for (setting, q) in &queries.queries {
        let cells: Vec<String> = q
            .pairs
            .iter()
            .zip(totals[setting])
            .map(|(p, c)| format!("{} {}", p.label(), c))
            .collect();
        summary.push_str(&format!("{:<5} {}\n", setting.to_string(), cells.join(", ")));
    }

    match (&args.out, args.format) {
        (Some(path), Format::Text) => {
            emit(out, Some(path), &experiment)?;
            emit(out, None, &summary)?;
        }
        (Some(path), Format::Json) => emit(out, Some(path), &experiment)?,
        (None, _) => emit(out, None, &experiment)?,
    }
    Ok(EXIT_OK)
}

pub fn render_chsh(report: &ChshReport) -> String {
    let mut s = format!("{}\n", report.name);
    for setting in Setting::ALL {
        s.push_str(&format!(
            "  E({:<4}) = {:+.4}\n",
            setting.to_string(),
            report.expectation(setting)
        ));
    }
    s.push_str(&format!("  S = {:.4} (|S| = {:.2})\n", report.s, report.s.abs()));
    s.push_str(&format!("  classification: {}\n", report.classification));
    let m = &report.marginal_diagnostic;
    s.push_str(&format!(
        "  marginal deviations: A {:.4}, A' {:.4}, B {:.4}, B' {:.4}\n",
        m.a, m.a_prime, m.b, m.b_prime
    ));
    s
}

fn cmd_chsh(args: &ChshArgs, out: &mut dyn Write) -> CmdResult {
    let suite = io::read_experiment(&args.experiment).map_err(input)?;
    let report = chsh_statistic(&suite).map_err(input)?;
    let text = match args.format {
        Format::Text => render_chsh(&report),
        Format::Json => json(&report)?,
    };
    emit(out, args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn load_state(source: &str) -> Result<StateVector4, CliError> {
    if source.eq_ignore_ascii_case("singlet") {
        Ok(singlet_state())
    } else {
        io::read_state(Path::new(source)).map_err(input)
    }
}

#[derive(Debug, Serialize)]
struct EigenvectorSummary {
    label: String,
    schmidt: SchmidtReport,
}

#[derive(Debug, Serialize)]
struct FamilySummary {
    setting: Setting,
    verdict: crate::entanglement::MeasurementVerdict,
    product_eigenstates: usize,
    eigenvectors: Vec<EigenvectorSummary>,
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    provenance: crate::model::Provenance,
    verification_pass: bool,
    families: Vec<FamilySummary>,
}

fn solve(args: &SolveArgs) -> Result<(ExperimentSuite, ModelSolution), CliError> {
    let suite = io::read_experiment(&args.experiment).map_err(input)?;
    let state = load_state(&args.state)?;
    state
        .check_normalized(Tolerances::STRICT.normalization)
        .map_err(input)?;
    let solution = solve_suite(&state, &suite, args.solver.into(), Execution::default())
        .map_err(|e| match e {
            Error::AnsatzInapplicable(_) => failure(e),
            other => input(other),
        })?;
    Ok((suite, solution))
}

fn classify_all(solution: &ModelSolution) -> Result<Vec<MeasurementClassification>, CliError> {
    solution
        .families
        .values()
        .map(|f| classify_measurement(f, &Tolerances::STRICT).map_err(failure))
        .collect()
}

fn render_verification(report: &VerificationReport) -> String {
    let mut s = format!(
        "profile {} (normalization <= {}, orthogonality <= {}, Born <= {})\n",
        report.profile,
        report.tolerances.normalization,
        report.tolerances.orthogonality,
        report.tolerances.born
    );
    s.push_str(&format!(
        "per family: {} real equations in {} real variables; {} scalar checks\n",
        report.equations_per_family, report.variables_per_family, report.checks_per_family
    ));
    s.push_str(&format!(
        "state normalization residual {:.3e}\n",
        report.state_normalization_residual
    ));
    for missing in &report.missing_families {
        s.push_str(&format!("{missing}: missing family or table  FAIL\n"));
    }
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    for f in &report.families {
        s.push_str(&format!(
            "{:<5} (i) normalization {:.3e} {}  (ii) orthogonality {:.3e} {}  (iii) Born {:.3e} {}{}\n",
            f.setting.to_string(),
            f.max_normalization_residual(),
            verdict(f.normalization_pass),
            f.max_orthogonality_residual(),
            verdict(f.orthogonality_pass),
            f.max_born_residual(),
            verdict(f.born_pass),
            if f.outcome_signs_match { "" } else { "  outcome signs differ from table" },
        ));
        for p in f.orthogonality.iter().filter(|p| p.residual > report.tolerances.orthogonality) {
            s.push_str(&format!(
                "      <{}|{}> = {:.4}\n",
                p.first_label, p.second_label, p.residual
            ));
        }
        for b in f.born.iter().filter(|b| b.residual > report.tolerances.born) {
            s.push_str(&format!(
                "      {}: model {:.4} vs observed {:.4} (residual {:.4})\n",
                b.label, b.model, b.observed, b.residual
            ));
        }
    }
    s.push_str(&format!("overall: {}\n", if report.pass { "PASS" } else { "FAIL" }));
    s
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let (suite, solution) = solve(args)?;
    let report = verify_solution(&solution, &suite, Profile::Strict);
    let classes = classify_all(&solution)?;
    let solution_json = json(&SolutionFile::from_solution(&solution))?;

    let summary = SolveSummary {
        provenance: solution.provenance,
        verification_pass: report.pass,
        families: classes
            .iter()
            .map(|c| FamilySummary {
                setting: c.setting,
                verdict: c.verdict,
                product_eigenstates: c.product_eigenstates,
                eigenvectors: c
                    .eigenvectors
                    .iter()
                    .enumerate()
                    .map(|(k, r)| EigenvectorSummary {
                        label: solution.families[&c.setting].label(k),
                        schmidt: *r,
                    })
                    .collect(),
            })
            .collect(),
    };
    let summary_text = match args.format {
        Format::Json => json(&summary)?,
        Format::Text => {
            let mut s = format!("{} solution ({})\n", suite.name, solution.provenance);
            for f in &summary.families {
                s.push_str(&format!(
                    "{:<5} {:?}: {} product, {} entangled eigenstates\n",
                    f.setting.to_string(),
                    f.verdict,
                    f.product_eigenstates,
                    4 - f.product_eigenstates
                ));
                for e in &f.eigenvectors {
                    s.push_str(&format!(
                        "      {:<16} {:?} |det| {:.4} entropy {:.4} bits\n",
                        e.label, e.schmidt.verdict, e.schmidt.det_abs, e.schmidt.entropy_bits
                    ));
                }
            }
            s.push_str(&format!(
                "verification at strict profile: {}\n",
                if report.pass { "PASS" } else { "FAIL" }
            ));
            s
        }
    };

    match &args.out {
        Some(path) => {
            emit(out, Some(path), &solution_json)?;
            emit(out, None, &summary_text)?;
        }
        None => emit(out, None, &solution_json)?,
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let solution = io::read_solution(&args.solution).map_err(input)?;
    let suite = io::read_experiment(&args.experiment).map_err(input)?;
    let report = verify_solution(&solution, &suite, args.profile.into());
    let text = match args.format {
        Format::Text => render_verification(&report),
        Format::Json => json(&report)?,
    };
    emit(out, args.out.as_deref(), &text)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Debug, Serialize)]
struct RoundtripReport {
    data: ChshReport,
    model: ChshReport,
    s_difference: f64,
    max_expectation_difference: f64,
    verification_pass: bool,
    pass: bool,
}

fn cmd_roundtrip(args: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let (suite, solution) = solve(args)?;
    let data = chsh_statistic(&suite).map_err(input)?;
    let model = model_chsh(&solution).map_err(failure)?;
    let verification_pass = verify_solution(&solution, &suite, Profile::Strict).pass;
    let s_difference = (data.s - model.s).abs();
    let max_expectation_difference = Setting::ALL
        .iter()
        .map(|&s| (data.expectation(s) - model.expectation(s)).abs())
        .fold(0.0, f64::max);
    let pass = verification_pass
        && s_difference <= ROUNDTRIP_TOLERANCE
        && max_expectation_difference <= ROUNDTRIP_TOLERANCE;
    let report = RoundtripReport {
        data,
        model,
        s_difference,
        max_expectation_difference,
        verification_pass,
        pass,
    };
    let text = match args.format {
        Format::Json => json(&report)?,
        Format::Text => format!(
            "data:  S = {:.6} ({})\nmodel: S = {:.6} ({})\n|dS| = {:.3e}, max |dE| = {:.3e}, strict verification {}\nroundtrip: {}\n",
            report.data.s,
            report.data.classification,
            report.model.s,
            report.model.classification,
            s_difference,
            max_expectation_difference,
            if verification_pass { "pass" } else { "FAIL" },
            if pass { "PASS" } else { "FAIL" },
        ),
    };
    emit(out, args.out.as_deref(), &text)?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

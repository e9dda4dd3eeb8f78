use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use reqmine_core::{
    export_dot, export_json, render_text, run_pipeline, AnalysisOptions, AprioriParams,
    EdgeSelection, OutputFormat, PipelineConfig, RequirementScope,
};

#[derive(Parser)]
#[command(
    name = "reqmine",
    version,
    about = "Prioritize requirements from binary survey responses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis on a survey CSV.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Survey CSV: header of attribute names, then one 0/1 row per respondent.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    min_support: f64,
    #[arg(long, default_value_t = 0.75)]
    min_confidence: f64,
    #[arg(long = "max-rule-len", default_value_t = 2)]
    max_rule_len: usize,
    #[arg(long, default_value_t = 1.0)]
    min_lift: f64,
    /// Support cut for top requirements [default: --min-support]
    #[arg(long)]
    top_threshold: Option<f64>,
    /// Correlate every pair of requirements, not only rule-linked pairs.
    #[arg(long)]
    complete_graph: bool,
    /// Build the requirement matrix over every attribute instead of the top requirements.
    #[arg(long)]
    all_attributes: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the correlation graph and spanning forest as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable ANSI styling (also set by the REQMINE_NO_COLOR environment variable).
    #[arg(long)]
    no_color: bool,
}

impl AnalyzeArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            input: self.input.clone(),
            options: AnalysisOptions {
                params: AprioriParams {
                    min_support: self.min_support,
                    min_confidence: self.min_confidence,
                    max_rule_length: self.max_rule_len,
                    min_lift: self.min_lift,
                },
                top_threshold: self.top_threshold,
                edges: if self.complete_graph {
                    EdgeSelection::Complete
                } else {
                    EdgeSelection::Linked
                },
                scope: if self.all_attributes {
                    RequirementScope::AllAttributes
                } else {
                    RequirementScope::TopRequirements
                },
            },
            format: match self.format {
                Format::Text => OutputFormat::Text,
                Format::Json => OutputFormat::Json,
            },
            dot_path: self.dot.clone(),
            out_path: self.out.clone(),
        }
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn analyze(args: &AnalyzeArgs) -> Result<(), (String, u8)> {
    let config = args.config();
    let report = run_pipeline(&config).map_err(|e| (e.to_string(), e.exit_code() as u8))?;

    for s in &report.skipped_edges {
        eprintln!(
            "warning: skipped edge {} -- {}: {} has zero variance",
            report.name(s.u),
            report.name(s.v),
            report.name(s.constant)
        );
    }

    let to_terminal = config.out_path.is_none() && std::io::stdout().is_terminal();
    let rendered = match config.format {
        OutputFormat::Text => {
            let color =
                to_terminal && !args.no_color && std::env::var_os("REQMINE_NO_COLOR").is_none();
            render_text(&report, color)
        }
        OutputFormat::Json => export_json(&report),
    };
    if let Some(path) = &config.dot_path {
        write_file(
            path,
            &export_dot(&report.correlation, &report.forest, &report.attribute_names),
        )
        .map_err(|e| (e, 1))?;
    }
    match &config.out_path {
        Some(path) => write_file(path, &rendered).map_err(|e| (e, 1))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| (format!("writing stdout: {e}"), 1))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as input errors; 2 is reserved for invariant failures
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => analyze(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

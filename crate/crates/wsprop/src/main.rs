use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wsprop::mocks::{self, FakeEndpoint, MockServer};
use wsprop::runner::{reports_json, CheckError, CheckOptions, LoadedService, RunConfig, DEFAULT_MAX_SIZE};
use wsprop::transport::Endpoint;
use wsprop::{response_check, HttpEndpoint};
use wsprop_core::GenSpec;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_WSDL: u8 = 3;

/// Property-based testing of SOAP web services from their WSDL.
///
/// A WSDL argument is a URL, a file path, or `mock:NAME` for one of the
/// built-in mock services run in-process.
#[derive(Parser)]
#[command(name = "wsprop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the generator spec derived from a WSDL.
    Generate {
        wsdl: String,
        #[arg(long, default_value = "proper_ws_autogen.genspec")]
        out: PathBuf,
    },
    /// Test that every operation answers generated requests without a Fault.
    Check {
        wsdl: String,
        /// Generator definitions replacing the derived ones.
        #[arg(long)]
        genspec: Option<PathBuf>,
        /// Test only this operation.
        #[arg(long)]
        op: Option<String>,
        #[arg(long, default_value_t = 100)]
        tests: u64,
        /// Run seed; drawn at random when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        max_size: u32,
        /// Also require responses to match the declared output type.
        #[arg(long)]
        check_output_type: bool,
        /// Print a JSON report instead of the progress transcript.
        #[arg(long)]
        json: bool,
        /// Also write the derived generator spec to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Serve a mock service over HTTP until interrupted.
    ServeMock {
        #[arg(value_parser = mocks::MOCK_NAMES)]
        service: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("wsprop: {message}");
            ExitCode::from(code)
        }
    }
}

/// `mock:NAME` selects an in-process mock; anything else goes over HTTP or
/// to the file system.
fn endpoint_for(wsdl: &str) -> Result<(Box<dyn Endpoint>, String), (u8, String)> {
    match wsdl.strip_prefix("mock:") {
        Some(name) => {
            let mock = mocks::by_name(name).ok_or_else(|| {
                (
                    EXIT_USAGE,
                    format!("unknown mock `{name}` (known: {})", mocks::MOCK_NAMES.join(", ")),
                )
            })?;
            let name = mock.name().to_string();
            Ok((Box::new(FakeEndpoint::new([mock])), FakeEndpoint::wsdl_url_of(&name)))
        }
        None => Ok((Box::new(HttpEndpoint::default()), wsdl.to_string())),
    }
}

fn check_error(e: CheckError) -> (u8, String) {
    let code = match e {
        CheckError::Config(_) | CheckError::GenSpec(_) | CheckError::UnknownOperation(_) => EXIT_USAGE,
        CheckError::Fetch(_) | CheckError::Wsdl(_) | CheckError::Io { .. } => EXIT_WSDL,
    };
    (code, e.to_string())
}

fn run(command: Command) -> Result<u8, (u8, String)> {
    match command {
        Command::Generate { wsdl, out } => {
            let (mut ep, url) = endpoint_for(&wsdl)?;
            let service = LoadedService::load(&url, ep.as_mut()).map_err(check_error)?;
            for s in &service.skipped {
                eprintln!("wsprop: skipping operation {}: {}", s.name, s.reason);
            }
            std::fs::write(&out, service.genspec_text())
                .map_err(|e| (EXIT_WSDL, format!("writing {}: {e}", out.display())))?;
            Ok(0)
        }
        Command::Check {
            wsdl,
            genspec,
            op,
            tests,
            seed,
            max_size,
            check_output_type,
            json,
            emit,
        } => {
            let overrides = match genspec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| (EXIT_USAGE, format!("reading {}: {e}", path.display())))?;
                    let spec = GenSpec::parse_unchecked(&text)
                        .map_err(|e| (EXIT_USAGE, format!("{}: {e}", path.display())))?;
                    Some(spec)
                }
                None => None,
            };
            let cfg = RunConfig {
                num_tests: tests,
                seed: seed.unwrap_or_else(rand::random),
                max_size,
                check_output_type,
                operation_filter: op,
            };
            eprintln!("wsprop: seed {}", cfg.seed);
            let options = CheckOptions {
                overrides,
                emit_to: emit,
                ..CheckOptions::default()
            };
            let (mut ep, url) = endpoint_for(&wsdl)?;
            let stdout = std::io::stdout();
            let reports = if json {
                response_check(&url, ep.as_mut(), &cfg, &options, &mut std::io::sink())
            } else {
                response_check(&url, ep.as_mut(), &cfg, &options, &mut stdout.lock())
            }
            .map_err(check_error)?;
            if json {
                let doc = reports_json(cfg.seed, &reports);
                let _ = writeln!(stdout.lock(), "{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            let all_passed = reports.iter().all(|(_, r)| r.passed());
            Ok(if all_passed { 0 } else { EXIT_FAILED })
        }
        Command::ServeMock { service, port } => {
            let mock = mocks::by_name(&service).ok_or_else(|| (EXIT_USAGE, format!("unknown mock `{service}`")))?;
            let server =
                MockServer::start(mock, port).map_err(|e| (EXIT_WSDL, format!("listening on port {port}: {e}")))?;
            println!("serving {} (WSDL at {})", server.url(), server.wsdl_url());
            server.join();
            Ok(0)
        }
    }
}

//! The responds property: every generated request must get a well-formed,
//! non-Fault SOAP response.
//!
//! Test `i` (from 1) draws its input at size `min(i, max_size)` with seed
//! `mix_seed(run_seed, i)`, so any single test can be replayed from the run
//! seed and its index. The first failing input is shrunk greedily, calling
//! the service again for every candidate.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use wsprop_core::{
    generate, lower_operation_input, lower_operation_output, mix_seed, shrink_to_minimum, size_for_test, GenContext,
    GenSpec, GenSpecError, LowerError, LoweredOperation, NamedIr, OperationDef, TransformHooks, Value, WsdlModel,
};

use crate::soap::{decode_response, encode_request, validate_response_type, CodecError, SoapResponseKind};
use crate::transport::{Endpoint, TransportError};
use crate::wsdl::{parse_wsdl_bytes, SkippedOperation, WsdlError};

/// Limit on successful shrink steps; a longer chain points at a shrinker bug.
pub const MAX_SHRINK_STEPS: usize = 10_000;

pub const DEFAULT_NUM_TESTS: u64 = 100;
pub const DEFAULT_MAX_SIZE: u32 = 42;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub num_tests: u64,
    pub seed: u64,
    pub max_size: u32,
    pub check_output_type: bool,
    pub operation_filter: Option<String>,
}

impl Default for RunConfig {
    /// 100 tests, sizes up to 42, seed from entropy.
    fn default() -> Self {
        RunConfig {
            num_tests: DEFAULT_NUM_TESTS,
            seed: rand::random(),
            max_size: DEFAULT_MAX_SIZE,
            check_output_type: false,
            operation_filter: None,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig {
            seed,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        if self.num_tests == 0 {
            return Err(CheckError::Config("the number of tests must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TestReport {
    Passed {
        count: u64,
    },
    Failed {
        /// 1-based index of the first failing test.
        failing_test_index: u64,
        counterexample: Value,
        shrunk: Value,
        shrink_steps: usize,
        /// Why the shrunk input fails.
        reason: String,
    },
    Aborted {
        reason: String,
    },
}

impl TestReport {
    pub fn passed(&self) -> bool {
        matches!(self, TestReport::Passed { .. })
    }
}

/// What one call of the service says about the property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// The input could not be sent at all: generator and schema disagree.
    Abort(String),
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("{0}")]
    Config(String),
    #[error("fetching the WSDL: {0}")]
    Fetch(TransportError),
    #[error("{0}")]
    Wsdl(#[from] WsdlError),
    #[error("generator spec: {0}")]
    GenSpec(#[from] GenSpecError),
    #[error("no operation named {0}")]
    UnknownOperation(String),
    #[error("writing {path}: {message}")]
    Io { path: String, message: String },
}

/// One operation under test.
pub struct Property<'a> {
    pub model: &'a WsdlModel,
    pub op: &'a OperationDef,
    /// Schema-lowered input; directs encoding.
    pub input: &'a NamedIr,
    /// What inputs are drawn from: the lowered input, or an edited version.
    pub generator: &'a NamedIr,
    /// Lowered output, for the optional output-type check.
    pub output: Option<&'a NamedIr>,
    pub hooks: &'a TransformHooks,
}

impl Property<'_> {
    /// Sends `value` and classifies the reply.
    pub fn evaluate(&self, ep: &mut dyn Endpoint, value: &Value, check_output_type: bool) -> Outcome {
        let envelope = match encode_request(self.input, value) {
            Ok(e) => e,
            Err(
                e @ (CodecError::ShapeMismatch { .. } | CodecError::Unencodable { .. } | CodecError::Decode { .. }),
            ) => return Outcome::Abort(e.to_string()),
        };
        let reply = match ep.post_soap(&self.model.endpoint_url, &self.op.soap_action, &envelope) {
            Ok(r) => r,
            Err(e) => return Outcome::Fail(e.to_string()),
        };
        match decode_response(&reply.body) {
            SoapResponseKind::Ok { body_element } => match self.output.filter(|_| check_output_type) {
                Some(output) => match validate_response_type(output, &body_element) {
                    Ok(()) => Outcome::Pass,
                    Err(m) => Outcome::Fail(format!("response has the wrong type: {m}")),
                },
                None => Outcome::Pass,
            },
            SoapResponseKind::Fault { code, string, .. } => Outcome::Fail(format!("SOAP Fault {code}: {string}")),
            SoapResponseKind::Malformed { reason } => {
                Outcome::Fail(format!("malformed response (HTTP {}): {reason}", reply.status))
            }
        }
    }

    /// Input of test `index` (1-based) of a run.
    pub fn input_for(&self, cfg: &RunConfig, index: u64) -> Result<Value, String> {
        let ctx = GenContext::new(mix_seed(cfg.seed, index), size_for_test(index, cfg.max_size));
        let value = generate(&self.generator.ir, ctx).map_err(|e| e.to_string())?;
        Ok(self.hooks.apply(self.generator, value))
    }

    /// Runs the property, writing the progress transcript to `out`.
    pub fn run(&self, ep: &mut dyn Endpoint, cfg: &RunConfig, out: &mut dyn Write) -> TestReport {
        let report = self.run_inner(ep, cfg, out);
        let _ = out.flush();
        report
    }

    fn run_inner(&self, ep: &mut dyn Endpoint, cfg: &RunConfig, out: &mut dyn Write) -> TestReport {
        let abort = |out: &mut dyn Write, reason: String| {
            let _ = writeln!(out, "\nError: {reason}");
            TestReport::Aborted { reason }
        };
        if let Err(e) = cfg.validate() {
            return abort(out, e.to_string());
        }
        for index in 1..=cfg.num_tests {
            let value = match self.input_for(cfg, index) {
                Ok(v) => v,
                Err(reason) => return abort(out, reason),
            };
            match self.evaluate(ep, &value, cfg.check_output_type) {
                Outcome::Pass => {
                    let _ = write!(out, ".");
                    let _ = out.flush();
                }
                Outcome::Abort(reason) => return abort(out, reason),
                Outcome::Fail(first_reason) => {
                    let _ = write!(out, "!\nFailed: After {index} test(s).\n{value}\n\nShrinking ");
                    let _ = out.flush();
                    let mut last_reason = first_reason;
                    let shrunk =
                        shrink_to_minimum(
                            self.generator,
                            value.clone(),
                            self.hooks,
                            MAX_SHRINK_STEPS,
                            |c| match self.evaluate(ep, c, cfg.check_output_type) {
                                Outcome::Fail(r) => {
                                    last_reason = r;
                                    true
                                }
                                _ => false,
                            },
                        );
                    let dots = ".".repeat(shrunk.steps);
                    let _ = writeln!(out, "{dots}({} time(s))\n{}", shrunk.steps, shrunk.value);
                    return TestReport::Failed {
                        failing_test_index: index,
                        counterexample: value,
                        shrunk: shrunk.value,
                        shrink_steps: shrunk.steps,
                        reason: last_reason,
                    };
                }
            }
        }
        let _ = writeln!(out, "\nOK: Passed {} test(s).", cfg.num_tests);
        TestReport::Passed { count: cfg.num_tests }
    }
}

/// Runs the property for `op` with inputs drawn from its lowered input,
/// discarding the transcript.
pub fn run_property(
    model: &WsdlModel,
    op: &OperationDef,
    ir: &NamedIr,
    ep: &mut dyn Endpoint,
    cfg: &RunConfig,
) -> TestReport {
    let output = lower_operation_output(&model.schema, op).ok();
    let hooks = TransformHooks::new();
    Property {
        model,
        op,
        input: ir,
        generator: ir,
        output: output.as_ref(),
        hooks: &hooks,
    }
    .run(ep, cfg, &mut std::io::sink())
}

/// A fetched and parsed service with its operations lowered.
#[derive(Debug, Clone)]
pub struct LoadedService {
    pub wsdl_url: String,
    pub model: WsdlModel,
    pub skipped: Vec<SkippedOperation>,
    /// Per operation, in declaration order: lowered input and output.
    pub lowered: Vec<Result<(NamedIr, NamedIr), LowerError>>,
}

impl LoadedService {
    pub fn load(wsdl_url: &str, ep: &mut dyn Endpoint) -> Result<Self, CheckError> {
        let bytes = ep.fetch(wsdl_url).map_err(CheckError::Fetch)?;
        let parsed = parse_wsdl_bytes(&bytes, wsdl_url, ep)?;
        let lowered = parsed
            .model
            .operations
            .iter()
            .map(|op| {
                Ok((
                    lower_operation_input(&parsed.model.schema, op)?,
                    lower_operation_output(&parsed.model.schema, op)?,
                ))
            })
            .collect();
        Ok(LoadedService {
            wsdl_url: wsdl_url.to_string(),
            model: parsed.model,
            skipped: parsed.skipped,
            lowered,
        })
    }

    /// Generators for every operation that lowered.
    pub fn genspec(&self) -> GenSpec {
        let ops: Vec<LoweredOperation> = self
            .model
            .operations
            .iter()
            .zip(&self.lowered)
            .filter_map(|(op, l)| {
                let (input, output) = l.as_ref().ok()?;
                Some(LoweredOperation {
                    name: &op.name,
                    input,
                    output,
                })
            })
            .collect();
        GenSpec::from_lowered(&ops)
    }

    pub fn genspec_text(&self) -> String {
        let mut header = format!(
            "Generators for service {}\nsource: {}\nEdit any definition and pass the file to `wsprop check --genspec`.",
            self.model.service_name, self.wsdl_url
        );
        for (op, l) in self.model.operations.iter().zip(&self.lowered) {
            if let Err(e) = l {
                header.push_str(&format!("\nnot generated: operation {}: {e}", op.name));
            }
        }
        for s in &self.skipped {
            header.push_str(&format!("\nnot generated: operation {}: {}", s.name, s.reason));
        }
        self.genspec().to_text(&header)
    }
}

#[derive(Debug, Default)]
pub struct CheckOptions {
    /// Definitions replacing the generated ones, e.g. an edited genspec file.
    pub overrides: Option<GenSpec>,
    /// Where to write the generated genspec, if anywhere.
    pub emit_to: Option<PathBuf>,
    pub hooks: TransformHooks,
}

/// Fetches and parses the WSDL, then runs the responds property for each
/// selected operation in declaration order. Operations that cannot be lowered
/// get an `Aborted` report.
pub fn response_check(
    wsdl_url: &str,
    ep: &mut dyn Endpoint,
    cfg: &RunConfig,
    options: &CheckOptions,
    out: &mut dyn Write,
) -> Result<Vec<(String, TestReport)>, CheckError> {
    cfg.validate()?;
    let service = LoadedService::load(wsdl_url, ep)?;
    if let Some(path) = &options.emit_to {
        std::fs::write(path, service.genspec_text()).map_err(|e| CheckError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    let base = service.genspec();
    let spec = match &options.overrides {
        Some(o) => base.merge_overrides(o)?,
        None => base,
    };
    if let Some(name) = &cfg.operation_filter {
        if service.model.operation(name).is_none() {
            return Err(CheckError::UnknownOperation(name.clone()));
        }
    }
    let mut reports = Vec::new();
    for (op, lowered) in service.model.operations.iter().zip(&service.lowered) {
        if cfg.operation_filter.as_ref().is_some_and(|f| *f != op.name) {
            continue;
        }
        let _ = writeln!(out, "Testing property: prop_{}_responds", op.name);
        let report = match lowered {
            Err(e) => {
                let reason = format!("cannot derive a generator: {e}");
                let _ = writeln!(out, "Error: {reason}");
                TestReport::Aborted { reason }
            }
            Ok((input, output)) => {
                let generator = spec
                    .operation(&op.name)
                    .ok_or_else(|| GenSpecError::UnknownName {
                        name: op.name.clone(),
                        line: None,
                    })
                    .and_then(|stanza| spec.to_ir(&stanza.input_gen))
                    .map(|ir| NamedIr { ir, ..input.clone() });
                match generator {
                    Ok(generator) => Property {
                        model: &service.model,
                        op,
                        input,
                        generator: &generator,
                        output: Some(output),
                        hooks: &options.hooks,
                    }
                    .run(ep, cfg, out),
                    Err(e) => {
                        let reason = e.to_string();
                        let _ = writeln!(out, "Error: {reason}");
                        TestReport::Aborted { reason }
                    }
                }
            }
        };
        reports.push((op.name.clone(), report));
    }
    Ok(reports)
}

/// Machine-readable form of a check: one object per operation.
pub fn reports_json(seed: u64, reports: &[(String, TestReport)]) -> serde_json::Value {
    #[derive(Serialize)]
    struct Entry<'a> {
        operation: &'a str,
        seed: u64,
        #[serde(flatten)]
        report: &'a TestReport,
    }
    let entries: Vec<Entry> = reports
        .iter()
        .map(|(operation, report)| Entry {
            operation,
            seed,
            report,
        })
        .collect();
    serde_json::to_value(entries).expect("reports serialize")
}

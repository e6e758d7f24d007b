//! Deterministic, replayable reports for the command-line entry points.
//!
//! A report is one self-contained record of a run: tool name and version,
//! the RNG seed, a digest of the parsed problem (stable under reformatting
//! of the input file), the certificate with its full condition trail,
//! summaries of the cones the analysis reasons about, every retraction
//! witness with its replay tail, and — for solve runs — the
//! regularization-path trace. Nothing in a report depends on time, the
//! environment, or unordered-map iteration, so identical inputs, flags, and
//! seed render byte-identical JSON and text.
//!
//! Two caveats are wired in rather than left to the caller, because they
//! guard the tool's soundness story:
//! - a `VIOLATED` verdict refutes only the checked *sufficient* condition
//!   (see [`crate::certify::VIOLATION_CAVEAT`]);
//! - a `DIVERGENT` path is evidence, not proof, of nonexistence
//!   ([`DIVERGENCE_CAVEAT`]).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{kappa_cone, ConeDescriptor, DescriptorBound};
use crate::certify::{Certificate, Verdict, RANDOM_PROBES, SAMPLE_DIRECTIONS, VIOLATION_CAVEAT};
use crate::decay::DecayModel;
use crate::pathsolver::{PathStatus, SolveTrace};
use crate::polyhedra::extreme_rays;
use crate::problem::{ProblemFile, ProblemSpec};
use crate::retract::{constancy_cone, retractive_cone, RetractionWitness, ViolationKind};
use crate::Tier;

/// Mandatory caveat attached whenever a trace reports divergence.
pub const DIVERGENCE_CAVEAT: &str =
    "divergence is evidence, not proof, of nonexistence; only certified conditions are conclusive";

/// Compact, renderable description of one cone the analysis used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSummary {
    pub label: String,
    pub dimension: usize,
    pub bound: DescriptorBound,
    pub tier: Tier,
    /// Halfspace rows in the description.
    pub halfspace_rows: usize,
    /// Exact membership oracles attached beside the rows.
    pub oracle_count: usize,
    /// Extreme rays of the polyhedral part; the complete generator list
    /// exactly when `generator_complete`.
    pub generators: Vec<Vec<f64>>,
    /// Whether `generators` spans the whole cone (exact rows, no oracles).
    pub generator_complete: bool,
    /// Membership probes the certifier budgets when the generator list is
    /// not complete (0 otherwise).
    pub sampled_probes: usize,
    /// `Some(true)` when the description pins the cone to `{0}`,
    /// `Some(false)` when a nonzero member is exhibited, `None` when open.
    pub zero_only: Option<bool>,
}

impl ConeSummary {
    /// Summarize a cone descriptor.
    #[must_use]
    pub fn of(desc: &ConeDescriptor) -> Self {
        let generator_complete = desc.generator_form().is_some();
        ConeSummary {
            label: desc.label.clone(),
            dimension: desc.dimension,
            bound: desc.bound,
            tier: desc.tier,
            halfspace_rows: desc.rows.len(),
            oracle_count: desc.oracles.len(),
            generators: extreme_rays(desc.dimension, &desc.rows).generators(),
            generator_complete,
            sampled_probes: if generator_complete {
                0
            } else {
                SAMPLE_DIRECTIONS + RANDOM_PROBES
            },
            zero_only: desc.zero_status().map(|(zero, _)| zero),
        }
    }
}

/// The cones a certification run reasons about, in presentation order: the
/// asymptotic cone of the feasible set, the zero cone of the objective's
/// asymptotic growth, and the two retractive-side cones.
#[must_use]
pub fn cone_summaries(problem: &ProblemSpec) -> Vec<ConeSummary> {
    let effective = problem.effective_set();
    let asserted = problem.assertions().convex;
    [
        effective.asymptotic_cone(),
        kappa_cone(problem.objective(), asserted),
        retractive_cone(&effective),
        constancy_cone(problem.objective(), asserted),
    ]
    .iter()
    .map(ConeSummary::of)
    .collect()
}

/// SHA-256 digest of the problem's canonical JSON form. Reformatting the
/// input file leaves the digest unchanged; any change to the parsed content
/// changes it.
#[must_use]
pub fn problem_digest(file: &ProblemFile) -> String {
    let canonical = serde_json::to_vec(file).expect("problem files serialize");
    let mut hasher = Sha256::new();
    hasher.update(&canonical);
    format!("{:x}", hasher.finalize())
}

/// One self-contained run record. Construct with [`Report::new`], then
/// attach the pieces the command produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// Which entry point ran: `certify`, `solve`, or `analyze-cones`.
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the canonical problem JSON (see [`problem_digest`]).
    pub problem_digest: String,
    pub certificate: Option<Certificate>,
    pub cones: Vec<ConeSummary>,
    /// Every retraction witness cited by the certificate, with its full
    /// replay tail (scales, escape points, retracted points, gaps).
    pub witnesses: Vec<RetractionWitness>,
    pub trace: Option<SolveTrace>,
    /// Soundness caveats that apply to this run's conclusions.
    pub caveats: Vec<String>,
}

impl Report {
    /// An empty report shell for a command invocation.
    #[must_use]
    pub fn new(command: &str, seed: u64, problem_digest: String) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            problem_digest,
            certificate: None,
            cones: Vec::new(),
            witnesses: Vec::new(),
            trace: None,
            caveats: Vec::new(),
        }
    }

    /// Attach a certificate, lifting its witnesses and mandatory caveats.
    pub fn attach_certificate(&mut self, certificate: Certificate) {
        if certificate.verdict == Verdict::Violated {
            self.push_caveat(VIOLATION_CAVEAT);
        }
        if let Some(violation) = &certificate.violation {
            if let Some(witness) = &violation.witness {
                self.witnesses.push(witness.clone());
            }
        }
        self.certificate = Some(certificate);
    }

    /// Attach a solve trace, adding the divergence caveat when it applies.
    pub fn attach_trace(&mut self, trace: SolveTrace) {
        if matches!(trace.status, PathStatus::Divergent { .. }) {
            self.push_caveat(DIVERGENCE_CAVEAT);
        }
        self.trace = Some(trace);
    }

    fn push_caveat(&mut self, caveat: &str) {
        if !self.caveats.iter().any(|c| c == caveat) {
            self.caveats.push(caveat.to_string());
        }
    }

    /// Deterministic pretty JSON (trailing newline included).
    #[must_use]
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
        out.push('\n');
        out
    }

    /// Deterministic human-readable rendering. `dump_trace` expands the
    /// solve trace into its full iterate table.
    #[must_use]
    pub fn to_text(&self, dump_trace: bool) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };
        push(&mut out, &format!("{} {} — {}", self.tool, self.version, self.command));
        push(&mut out, &format!("problem sha256: {}", self.problem_digest));
        push(&mut out, &format!("seed: {}", self.seed));

        if let Some(cert) = &self.certificate {
            push(&mut out, "");
            push(&mut out, &format!("verdict: {}", cert.verdict));
            match cert.theorem_used {
                Some(t) => push(&mut out, &format!("route: {t}")),
                None => push(&mut out, "route: none"),
            }
            let decay_text = match cert.decay.model {
                DecayModel::NormPower { power } => {
                    format!("f(x) ≥ −C(1+‖x‖)^{power}")
                }
                DecayModel::Unknown => "no bound derived".to_string(),
            };
            push(
                &mut out,
                &format!("decay: {decay_text} [{}] — {}", cert.decay.tier, cert.decay.rationale),
            );
            if !cert.condition_trail.is_empty() {
                push(&mut out, "condition trail:");
                for (i, c) in cert.condition_trail.iter().enumerate() {
                    push(
                        &mut out,
                        &format!("  {}. [{}] {} — {}", i + 1, c.tier, c.statement, c.evidence),
                    );
                }
            }
            if let Some(v) = &cert.violation {
                push(&mut out, "violation:");
                push(&mut out, &format!("  direction: {}", fmt_vec(&v.direction)));
                push(&mut out, &format!("  condition: {}", v.condition));
                push(&mut out, &format!("  detail: {} [{}]", v.detail, v.tier));
            }
            if !cert.diagnostics.is_empty() {
                push(&mut out, "diagnostics:");
                for d in &cert.diagnostics {
                    push(&mut out, &format!("  - {d}"));
                }
            }
        }

        if !self.cones.is_empty() {
            push(&mut out, "");
            push(&mut out, "cones:");
            for cone in &self.cones {
                let shape = match cone.zero_only {
                    Some(true) => "= {0}".to_string(),
                    _ if cone.generator_complete => {
                        format!("{} generators (complete)", cone.generators.len())
                    }
                    _ => format!(
                        "{} polyhedral generators + {} oracle(s), {} sampled probes",
                        cone.generators.len(),
                        cone.oracle_count,
                        cone.sampled_probes
                    ),
                };
                push(
                    &mut out,
                    &format!("  - {} [{:?}, {}]: {}", cone.label, cone.bound, cone.tier, shape),
                );
                if cone.zero_only != Some(true) {
                    for g in &cone.generators {
                        push(&mut out, &format!("      {}", fmt_vec(g)));
                    }
                }
            }
        }

        if !self.witnesses.is_empty() {
            push(&mut out, "");
            push(&mut out, &format!("witnesses ({}):", self.witnesses.len()));
            for (i, w) in self.witnesses.iter().enumerate() {
                let kind = match w.kind {
                    ViolationKind::SetExit => "set exit",
                    ViolationKind::FunctionIncrease => "function increase",
                };
                push(
                    &mut out,
                    &format!(
                        "  {}. {kind} for {} along {}, retraction ρ = {}",
                        i + 1,
                        w.target,
                        fmt_vec(&w.direction),
                        fmt_f(w.rho)
                    ),
                );
                for ((scale, point), (retracted, gap)) in w
                    .scales
                    .iter()
                    .zip(&w.points)
                    .zip(w.retracted.iter().zip(&w.gaps))
                {
                    push(
                        &mut out,
                        &format!(
                            "      t = {}: x = {}, x − ρd = {}, gap = {}",
                            fmt_f(*scale),
                            fmt_vec(point),
                            fmt_vec(retracted),
                            fmt_f(*gap)
                        ),
                    );
                }
            }
        }

        if let Some(trace) = &self.trace {
            push(&mut out, "");
            let status = match &trace.status {
                PathStatus::Converged { minimizer, value } => format!(
                    "CONVERGED at x* = {}, f* = {}",
                    fmt_vec(minimizer),
                    fmt_f(*value)
                ),
                PathStatus::Divergent { direction } => {
                    format!("DIVERGENT along {}", fmt_vec(direction))
                }
                PathStatus::BudgetExhausted => "BUDGET_EXHAUSTED".to_string(),
            };
            push(
                &mut out,
                &format!("solver path ({} steps): {status}", trace.iterates.len()),
            );
            if let Some(last) = trace.iterates.last() {
                push(
                    &mut out,
                    &format!(
                        "  final step: r = {}, f = {}, regularized = {}",
                        fmt_f(last.r),
                        fmt_f(last.f_value),
                        fmt_f(last.reg_value)
                    ),
                );
            }
            if dump_trace {
                push(&mut out, "  k       r             f             regularized   x");
                for (k, it) in trace.iterates.iter().enumerate() {
                    push(
                        &mut out,
                        &format!(
                            "  {k:<7} {:<13} {:<13} {:<13} {}",
                            fmt_f(it.r),
                            fmt_f(it.f_value),
                            fmt_f(it.reg_value),
                            fmt_vec(&it.x)
                        ),
                    );
                }
            }
        }

        if !self.caveats.is_empty() {
            push(&mut out, "");
            push(&mut out, "caveats:");
            for c in &self.caveats {
                push(&mut out, &format!("  - {c}"));
            }
        }
        out
    }
}

/// Fixed-notation float for text rendering: six significant digits, stable
/// across runs.
fn fmt_f(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e7).contains(&a) {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.4e}")
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let coords: Vec<String> = v.iter().map(|c| fmt_f(*c)).collect();
    format!("({})", coords.join(", "))
}

//! The run report printed by every analysis command.
//!
//! JSON keeps full precision and is the stable, versioned form
//! (`schema = "polsar-entropy/run-report/v1"`); text rounds to six
//! significant digits. Timing appears only when requested, so identical
//! invocations produce identical bytes.

use crate::entropy::EntropyKind;
use crate::hypothesis::{ConfidenceInterval, QuantileConvention};
use crate::simulate::MCReport;
use crate::wishart::Regime;
use serde::Serialize;
use std::fmt::Write as _;

pub const REPORT_SCHEMA: &str = "polsar-entropy/run-report/v1";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AicReport {
    pub looks_free: f64,
    pub looks_fixed: f64,
    pub fixed_looks: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub kind: EntropyKind,
    pub value: f64,
    /// `σ²_H`; absent for Tsallis.
    pub variance: Option<f64>,
    pub interval: Option<ConfidenceInterval>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub id: String,
    /// `ml` for fitted pixels, `fixture` for given summaries.
    pub source: &'static str,
    pub n: usize,
    pub m: usize,
    pub log_det_sigma: f64,
    pub trace_sigma: Option<f64>,
    pub looks: f64,
    pub regime: Regime,
    pub branch: Option<usize>,
    pub score_residual: Option<f64>,
    pub log_likelihood: Option<f64>,
    pub aic: Option<AicReport>,
    pub entropies: Vec<EntropyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decision {
    pub alpha: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    /// `contrast` or `goodness-of-fit`.
    pub test: &'static str,
    pub kind: EntropyKind,
    pub regions: Vec<String>,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// Pooled mean for contrasts, the reference value for goodness of fit.
    pub reference: f64,
    pub decisions: Vec<Decision>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub convention: Option<QuantileConvention>,
    pub regions: Vec<RegionReport>,
    pub tests: Vec<TestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<MCReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: Option<u64>) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed,
            convention: None,
            regions: Vec::new(),
            tests: Vec::new(),
            simulation: None,
            elapsed_seconds: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "command: {}", self.command.join(" "));
        for i in &self.inputs {
            let _ = writeln!(w, "input: {} sha256={}", i.path, i.sha256);
        }
        for o in &self.outputs {
            let _ = writeln!(w, "output: {} sha256={}", o.path, o.sha256);
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(w, "seed: {seed}");
        }
        for r in &self.regions {
            let _ = writeln!(w, "\nregion {} ({})", r.id, r.source);
            let _ = writeln!(
                w,
                "  N = {}  m = {}  ln|Σ| = {}  L = {}  regime = {}",
                r.n,
                r.m,
                sig(r.log_det_sigma),
                sig(r.looks),
                match r.regime {
                    Regime::Classical => "classical",
                    Regime::Relaxed => "relaxed",
                }
            );
            if let Some(t) = r.trace_sigma {
                let _ = writeln!(w, "  tr Σ = {}", sig(t));
            }
            if let (Some(b), Some(res)) = (r.branch, r.score_residual) {
                let _ = writeln!(w, "  branch = ({b}, {})  score residual = {}", branch_end(b, r.m), sig(res));
            }
            if let Some(ll) = r.log_likelihood {
                let _ = writeln!(w, "  log-likelihood = {}", sig(ll));
            }
            if let Some(a) = &r.aic {
                let _ = writeln!(
                    w,
                    "  AIC: L free = {}  L fixed at {} = {}",
                    sig(a.looks_free),
                    sig(a.fixed_looks),
                    sig(a.looks_fixed)
                );
            }
            for e in &r.entropies {
                let _ = write!(w, "  {:<12} H = {}", e.kind.to_string(), sig(e.value));
                if let Some(v) = e.variance {
                    let _ = write!(w, "  σ² = {}", sig(v));
                }
                if let Some(ci) = &e.interval {
                    let _ = write!(
                        w,
                        "  {}% CI [{}, {}] ({})",
                        sig(ci.level * 100.0),
                        sig(ci.lower),
                        sig(ci.upper),
                        ci.convention
                    );
                }
                let _ = writeln!(w);
            }
        }
        for t in &self.tests {
            let _ = writeln!(w, "\n{} test, {} on {}", t.test, t.kind, t.regions.join(" vs "));
            let _ = writeln!(
                w,
                "  S = {}  df = {}  p = {}  reference = {}",
                sig(t.statistic),
                t.df,
                sig(t.p_value),
                sig(t.reference)
            );
            for d in &t.decisions {
                let _ = writeln!(
                    w,
                    "  alpha = {}: {}",
                    sig(d.alpha),
                    if d.reject { "reject" } else { "do not reject" }
                );
            }
        }
        if let Some(sim) = &self.simulation {
            out.push_str(&simulation_text(sim));
        }
        if let Some(t) = self.elapsed_seconds {
            let _ = writeln!(out, "\nelapsed: {} s", sig(t));
        }
        out
    }
}

fn branch_end(branch: usize, m: usize) -> String {
    if branch + 1 >= m {
        "inf".into()
    } else {
        (branch + 1).to_string()
    }
}

pub fn simulation_text(sim: &MCReport) -> String {
    let mut w = String::new();
    let _ = writeln!(
        w,
        "\n{:?} campaign, {} replicas, seed {}, sampler {}",
        sim.mode, sim.replicas, sim.master_seed, sim.sampler
    );
    let _ = writeln!(w, "  populations: {} | {}", sim.populations[0], sim.populations[1]);
    let _ = writeln!(w, "  {:<12} {:>6} {:>6} {:>10} {:>12} {:>10}", "kind", "N", "alpha", "rate", "mean S", "CV");
    for c in &sim.rates {
        let stat = sim.statistic(c.kind, c.n);
        let _ = writeln!(
            w,
            "  {:<12} {:>6} {:>6} {:>10} {:>12} {:>10}",
            c.kind.to_string(),
            c.n,
            sig(c.alpha),
            sig(c.rate),
            stat.map_or_else(String::new, |s| sig(s.mean)),
            stat.map_or_else(String::new, |s| sig(s.cv)),
        );
    }
    for f in sim.failures.iter().filter(|f| f.failures > 0) {
        let _ = writeln!(
            w,
            "  N = {}: {} failed replicas excluded (first: {})",
            f.n,
            f.failures,
            f.first_cause.as_deref().unwrap_or("?")
        );
    }
    w
}

/// Six significant digits, switching to exponent form outside [1e-4, 1e6).
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if !(1e-4..1e6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let digits = 5 - mag.log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

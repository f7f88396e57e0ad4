//! Verdicts and the summary / key-value reports built from them.

use std::fmt::Write as _;

use dampwave_core::{expected_exponents, SlopeFit, VerdictMode};

use crate::config::ExperimentKind;
use crate::record::Check;

/// One fitted series compared against its predicted exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct FitLine {
    pub series: &'static str,
    pub fit: Option<SlopeFit>,
    pub expected: f64,
    pub mode: VerdictMode,
    pub tol: f64,
    /// Rate criterion alone; tail stability is reported separately.
    pub rate_ok: bool,
    pub error: Option<String>,
}

impl FitLine {
    pub fn tail_stable(&self) -> bool {
        self.fit.as_ref().is_some_and(|f| f.tail_stable)
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.rate_ok && self.tail_stable()
    }

    pub fn slope(&self) -> f64 {
        self.fit.as_ref().map_or(f64::NAN, |f| f.slope)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: String,
    pub experiment: ExperimentKind,
    pub dim: usize,
    pub alpha: f64,
    pub fits: Vec<FitLine>,
    /// Flags that must all be clean for a pass.
    pub diagnostics: Vec<Check>,
    /// Reported but not gating.
    pub info: Vec<(&'static str, f64)>,
    pub error: Option<String>,
}

impl Verdict {
    pub fn new(id: &str, experiment: ExperimentKind, dim: usize, alpha: f64) -> Self {
        Verdict {
            id: id.to_string(),
            experiment,
            dim,
            alpha,
            fits: Vec::new(),
            diagnostics: Vec::new(),
            info: Vec::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.fits.iter().all(FitLine::passed) && self.diagnostics.iter().all(|d| d.passed)
    }

    pub fn fit(&self, series: &str) -> Option<&FitLine> {
        self.fits.iter().find(|f| f.series == series)
    }

    pub fn info(&self, name: &str) -> Option<f64> {
        self.info.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = &self.error {
            out.push(format!("error: {e}"));
        }
        for f in &self.fits {
            if let Some(e) = &f.error {
                out.push(format!("{}: {e}", f.series));
            } else if !f.rate_ok {
                out.push(format!("{}: slope {:.4} vs expected -{:.4}", f.series, f.slope(), f.expected));
            } else if !f.tail_stable() {
                out.push(format!("{}: tail unstable", f.series));
            }
        }
        for d in self.diagnostics.iter().filter(|d| !d.passed) {
            out.push(format!("{}: {:e} (limit {:e})", label(d), d.value, d.limit));
        }
        out
    }
}

fn label(c: &Check) -> String {
    if c.case.is_empty() {
        c.check.to_string()
    } else {
        format!("{}[{}]", c.check, c.case)
    }
}

fn mode_name(mode: VerdictMode) -> &'static str {
    match mode {
        VerdictMode::TwoSided => "two_sided",
        VerdictMode::UpperBound => "upper_bound",
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Human-readable table; empty for no verdicts.
pub fn summary(verdicts: &[Verdict]) -> String {
    let mut out = String::new();
    if verdicts.is_empty() {
        return out;
    }
    let w = |out: &mut String, s: String| out.push_str(&s);
    for v in verdicts {
        w(&mut out, format!("{} {} ({}, N={}, alpha={})\n", status(v.passed()), v.id, v.experiment, v.dim, v.alpha));
        for f in &v.fits {
            w(
                &mut out,
                format!(
                    "    {:<20} slope {:>9.4}  expected {:>8.4}  {:<11} tol {:<5} tail {}\n",
                    f.series,
                    f.slope(),
                    -f.expected,
                    mode_name(f.mode),
                    f.tol,
                    if f.tail_stable() { "stable" } else { "unstable" }
                ),
            );
        }
        for d in &v.diagnostics {
            w(&mut out, format!("    {} {:<32} {:e} (limit {:e})\n", status(d.passed), label(d), d.value, d.limit));
        }
        for (k, x) in &v.info {
            w(&mut out, format!("    info {k} = {x:e}\n"));
        }
        for line in v.failures() {
            w(&mut out, format!("    failed: {line}\n"));
        }
    }
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    for v in verdicts {
        if v.experiment != ExperimentKind::PropertySuite && !pairs.contains(&(v.dim, v.alpha)) {
            pairs.push((v.dim, v.alpha));
        }
    }
    pairs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if !pairs.is_empty() {
        out.push_str("\nexpected exponents\n");
        out.push_str(&expected_table(&pairs));
    }
    let failed = verdicts.iter().filter(|v| !v.passed()).count();
    let _ = writeln!(out, "\n{} experiments, {} passed, {} failed", verdicts.len(), verdicts.len() - failed, failed);
    out
}

/// Rows of [`expected_exponents`] for each `(N, α)`.
pub fn expected_table(pairs: &[(usize, f64)]) -> String {
    let mut out = format!(
        "{:>3} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9}\n",
        "N", "alpha", "heat_L2", "energy0", "energy1", "energy2", "grad0", "grad1", "grad2", "thm1_diff"
    );
    for &(n, a) in pairs {
        match expected_exponents(n, a) {
            Ok(e) => {
                let _ = writeln!(
                    out,
                    "{:>3} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>9.4}",
                    n, a, e.heat_l2, e.energy[0], e.energy[1], e.energy[2], e.grad[0], e.grad[1], e.grad[2], e.thm1_diff
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{n:>3} {a:>6} {e}");
            }
        }
    }
    out
}

/// Machine-readable `key=value` lines, full precision.
pub fn key_values(verdicts: &[Verdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        let mut put = |k: String, val: String| {
            let _ = writeln!(out, "{}.{k}={val}", v.id);
        };
        put("experiment".into(), v.experiment.to_string());
        put("N".into(), v.dim.to_string());
        put("alpha".into(), format!("{:?}", v.alpha));
        put("passed".into(), v.passed().to_string());
        if let Some(e) = &v.error {
            put("error".into(), e.replace('\n', " "));
        }
        for f in &v.fits {
            let s = f.series;
            put(format!("fit.{s}.slope"), format!("{:?}", f.slope()));
            put(format!("fit.{s}.expected"), format!("{:?}", -f.expected));
            put(format!("fit.{s}.mode"), mode_name(f.mode).into());
            put(format!("fit.{s}.tol"), format!("{:?}", f.tol));
            if let Some(fit) = &f.fit {
                put(format!("fit.{s}.window"), format!("{:?}:{:?}", fit.window.lo, fit.window.hi));
                put(format!("fit.{s}.rms"), format!("{:?}", fit.rms));
                put(format!("fit.{s}.tail_slope"), format!("{:?}", fit.tail_slope));
            }
            put(format!("fit.{s}.tail_stable"), f.tail_stable().to_string());
            put(format!("fit.{s}.passed"), f.passed().to_string());
        }
        for d in &v.diagnostics {
            let name = label(d);
            put(format!("diag.{name}.value"), format!("{:?}", d.value));
            put(format!("diag.{name}.limit"), format!("{:?}", d.limit));
            put(format!("diag.{name}.passed"), d.passed.to_string());
        }
        for (k, x) in &v.info {
            put(format!("info.{k}"), format!("{x:?}"));
        }
    }
    if !verdicts.is_empty() {
        let _ = writeln!(out, "all_passed={}", verdicts.iter().all(Verdict::passed));
    }
    out
}

/// 0 when every verdict passed, 1 otherwise.
pub fn exit_code(verdicts: &[Verdict]) -> i32 {
    if verdicts.iter().all(Verdict::passed) {
        0
    } else {
        1
    }
}

//! Trace files, JSON reports, SVG plots and the terminal summary.

use std::fmt::Write as _;
use std::path::Path;

use gauss_factor::analysis::{PrimePower, Verdict};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::schemes::RunOutput;

pub fn trace_csv(run: &RunOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# scheme = {}", run.scheme.name());
    let _ = writeln!(s, "# n = {}", run.n);
    let _ = writeln!(s, "# mode = {}", run.mode.name());
    let _ = writeln!(s, "# normalization = {}", if run.normalized { "max" } else { "none" });
    for (k, v) in run.parameters.iter().filter(|(k, _)| k != "n" && k != "mode") {
        let _ = writeln!(s, "# {k} = {v}");
    }
    for (k, v) in &run.derived {
        let _ = writeln!(s, "# derived {k} = {v}");
    }
    s.push_str("xi,re,im,abs2\n");
    for p in &run.samples {
        let _ = writeln!(s, "{:e},{:e},{:e},{:e}", p.xi, p.amplitude.re, p.amplitude.im, p.value());
    }
    s
}

pub fn factorization_text(n: u64, f: &[PrimePower]) -> String {
    let parts: Vec<String> = f
        .iter()
        .map(|p| {
            if p.exponent == 1 {
                p.prime.to_string()
            } else {
                format!("{}^{}", p.prime, p.exponent)
            }
        })
        .collect();
    format!("{n} = {}", parts.join(" * "))
}

pub fn report_json(run: &RunOutput) -> String {
    let value = json!({
        "scheme": run.scheme.name(),
        "n": run.n,
        "mode": run.mode.name(),
        "parameters": run.parameters.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "report": &run.report,
        "factorization": run.factorization.as_ref().ok(),
        "factorization_error": run.factorization.as_ref().err(),
    });
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

pub fn trace_svg(run: &RunOutput) -> String {
    let (w, h, pad) = (800.0, 400.0, 40.0);
    let pts = &run.samples;
    let xmin = pts.iter().map(|p| p.xi).fold(f64::INFINITY, f64::min);
    let xmax = pts.iter().map(|p| p.xi).fold(f64::NEG_INFINITY, f64::max);
    let ymax = pts.iter().map(|p| p.value()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let px = |x: f64| pad + (x - xmin) / xspan * (w - 2.0 * pad);
    let py = |y: f64| h - pad - y / ymax * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{pad}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{} N = {} ({} rule)</text>",
        run.scheme.name(),
        run.n,
        run.report.rule.name()
    );
    for t in &run.report.trials {
        let x = t.ell as f64;
        if x < xmin || x > xmax {
            continue;
        }
        let color = if t.verdict == Verdict::Factor { "#c33" } else { "#bbb" };
        let _ = writeln!(
            s,
            "<line x1=\"{0:.2}\" y1=\"{pad}\" x2=\"{0:.2}\" y2=\"{1:.2}\" stroke=\"{color}\" stroke-dasharray=\"4 3\"/>",
            px(x),
            h - pad
        );
    }
    let path: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", px(p.xi), py(p.value()))).collect();
    if run.mode == crate::schemes::Mode::Continuous {
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"#225\" stroke-width=\"1.2\" points=\"{}\"/>",
            path.join(" ")
        );
    } else {
        for p in &path {
            let (x, y) = p.split_once(',').expect("formatted above");
            let _ = writeln!(s, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"#225\"/>");
        }
    }
    let _ = writeln!(
        s,
        "<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        h - pad,
        w - pad
    );
    s.push_str("</svg>\n");
    s
}

pub fn summary_text(run: &RunOutput) -> String {
    let list = |v: &[u64]| {
        if v.is_empty() {
            "-".to_string()
        } else {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} N = {}: {} rule, {} scan of {} points",
        run.scheme.name(),
        run.n,
        run.report.rule.name(),
        run.mode.name(),
        run.samples.len()
    );
    for (k, v) in &run.derived {
        if k == "kappa-mismatch" {
            let _ = writeln!(s, "warning: kappa mismatch ({v}); odd sidebands are not suppressed");
        }
    }
    let _ = writeln!(s, "{:>6}  {:>12}  verdict", "ell", "score");
    for t in &run.report.trials {
        let v = match t.verdict {
            Verdict::Factor => "factor",
            Verdict::NonFactor => "-",
        };
        let _ = writeln!(s, "{:>6}  {:>12.6e}  {v}", t.ell, t.score);
    }
    for e in &run.report.candidate_errors {
        let _ = writeln!(s, "{:>6}  error: {}", e.ell, e.message);
    }
    if let Some(slope) = run.report.line_slope {
        let _ = writeln!(s, "fitted slope: {slope:e}");
    }
    let _ = writeln!(s, "factors found: {}", list(&run.report.factors_found));
    let _ = writeln!(s, "multiples: {}", list(&run.report.multiples));
    let _ = writeln!(s, "contradictions: {}", list(&run.report.contradictions));
    match &run.factorization {
        Ok(f) => {
            let _ = writeln!(s, "factorization: {}", factorization_text(run.n, f));
        }
        Err(e) => {
            let _ = writeln!(s, "factorization: unavailable ({e})");
        }
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.display().to_string(),
                source,
            })?;
        }
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

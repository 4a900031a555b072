//! Stable JSON and text renderings of fiber reports, and process exit codes.
//!
//! Keys are sorted and every float is written with 17 significant digits, so
//! a fixed seed and version give byte-identical output.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::fiber::FiberReport;
use crate::index::IndexSpectrum;
use crate::scalar::format_rational;
use crate::solver::{Backend, Classification, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 1;
pub const EXIT_CAVEAT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Argument(_) | Error::Parse(_) => EXIT_ARGUMENT,
        Error::DegenerateConfiguration(_)
        | Error::Inconsistent { .. }
        | Error::IdenticallyZeroPsi { .. }
        | Error::PathFailure { .. }
        | Error::NumericalAmbiguity(_)
        | Error::VerificationFailure(_) => EXIT_DEGENERATE,
    }
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Argument(_) => "argument",
        Error::Parse(_) => "parse",
        Error::DegenerateConfiguration(_) => "degenerate_configuration",
        Error::Inconsistent { .. } => "inconsistent",
        Error::IdenticallyZeroPsi { .. } => "identically_zero_psi",
        Error::PathFailure { .. } => "path_failure",
        Error::NumericalAmbiguity(_) => "numerical_ambiguity",
        Error::VerificationFailure(_) => "verification_failure",
    }
}

/// Caveats that turn a successful run into exit code 2.
pub fn caveats(report: &FiberReport) -> Vec<&'static str> {
    let mut out = Vec::new();
    if report.genericity.is_zero_vector && report.mc_count == 0 {
        out.push("empty_fiber");
    }
    if !report.genericity.is_generic {
        out.push("non_generic");
    }
    if !report.genericity.exact {
        out.push("inexact_indices");
    }
    out
}

pub fn report_exit_code(report: &FiberReport) -> i32 {
    if caveats(report).is_empty() {
        EXIT_OK
    } else {
        EXIT_CAVEAT
    }
}

pub fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn complex_list(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(complex_json).collect())
}

pub fn spectrum_json(spectrum: &IndexSpectrum) -> Value {
    match spectrum.exact_values() {
        Some(ex) => Value::Array(
            ex.iter()
                .map(|g| json!({"re": format_rational(&g.re), "im": format_rational(&g.im)}))
                .collect(),
        ),
        None => complex_list(spectrum.values()),
    }
}

fn one_based(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|i| json!(i + 1)).collect())
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Auto => "auto",
        Backend::Companion => "companion",
        Backend::Homotopy => "homotopy",
    }
}

fn config_json(config: &SolverConfig) -> Value {
    json!({
        "seed": config.seed,
        "tol_dedup": config.tol_dedup,
        "tol_coincide": config.tol_coincide,
        "backend": backend_name(config.backend),
        "retries": config.retries,
    })
}

/// Full report. Representatives (coefficients, lowest degree first) are
/// included when `with_representatives` is set.
pub fn report_json(command: &str, report: &FiberReport, config: &SolverConfig, with_representatives: bool) -> Value {
    let g = &report.genericity;
    let profile = report.spectrum.profile();
    let solutions: Vec<Value> = report
        .solutions
        .iter()
        .map(|s| {
            json!({
                "coords": complex_list(&s.coords),
                "residual": s.residual,
                "jacobian_det": complex_json(s.jacobian_det),
                "jacobian_chart": s.jacobian_chart + 1,
                "classification": match s.classification { Classification::S => "S", Classification::B => "B" },
                "coincidence_pattern": s.coincidence_pattern,
                "multiplicity": s.multiplicity,
            })
        })
        .collect();
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("d".into(), json!(profile.degree()));
    out.insert("profile".into(), json!(profile.parts()));
    out.insert("indices".into(), spectrum_json(&report.spectrum));
    out.insert("config".into(), config_json(config));
    out.insert(
        "genericity".into(),
        json!({
            "stabilizer_order": g.stabilizer_order,
            "stabilizer_generators": g.stabilizer_generators.iter().map(|p| one_based(p)).collect::<Vec<_>>(),
            "zero_subset_partitions": g.zero_subset_partitions.iter()
                .map(|p| p.iter().map(|b| one_based(b)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "zero_subset_partition_count": g.zero_subset_partition_count,
            "partitions_truncated": g.partitions_truncated(),
            "is_zero_vector": g.is_zero_vector,
            "is_generic": g.is_generic,
            "exact": g.exact,
        }),
    );
    out.insert("mp_count".into(), json!(report.mp_count));
    out.insert("mc_count".into(), json!(report.mc_count));
    out.insert("expected_mp".into(), json!(report.expected_mp));
    out.insert("expected_mc".into(), json!(report.expected_mc));
    out.insert("s_count".into(), json!(report.s_count));
    out.insert("b_count".into(), json!(report.b_count));
    out.insert("free_action".into(), json!(report.free_action));
    out.insert("solutions".into(), Value::Array(solutions));
    out.insert(
        "solver".into(),
        match &report.solver {
            Some(s) => json!({
                "backend": backend_name(s.backend),
                "paths_tracked": s.paths_tracked,
                "paths_failed": s.paths_failed,
                "attempts": s.attempts,
            }),
            None => Value::Null,
        },
    );
    out.insert(
        "verification".into(),
        json!({
            "max_oracle_distance": report.max_oracle_distance(),
            "oracle_distances": report.representatives.iter().map(|r| r.oracle_distance).collect::<Vec<_>>(),
        }),
    );
    if with_representatives {
        out.insert(
            "representatives".into(),
            Value::Array(
                report
                    .representatives
                    .iter()
                    .map(|r| {
                        json!({
                            "coefficients": complex_list(r.map.coeffs()),
                            "fixed_points": complex_list(r.map.zetas()),
                            "oracle_distance": r.oracle_distance,
                        })
                    })
                    .collect(),
            ),
        );
    }
    out.insert("caveats".into(), json!(caveats(report)));
    out.insert("notes".into(), json!(report.notes));
    out.insert("exit_code".into(), json!(report_exit_code(report)));
    Value::Object(out)
}

pub fn error_json(command: &str, err: &Error, seed: Option<u64>) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "error": {"kind": error_kind(err), "message": err.to_string()},
        "exit_code": error_exit_code(err),
    })
}

/// Writes floats in `{:.16e}` form and everything else as compact JSON.
struct FixedFloat;

impl serde_json::ser::Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Canonical serialization: sorted keys, fixed float format, trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value.serialize(&mut ser).expect("serializing a JSON value cannot fail");
    let mut s = String::from_utf8(buf).expect("JSON output is UTF-8");
    s.push('\n');
    s
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.10e}{:+.10e}i", z.re, z.im)
}

/// Short human-readable summary.
pub fn report_text(report: &FiberReport, with_representatives: bool) -> String {
    let mut lines = Vec::new();
    let profile = report.spectrum.profile();
    lines.push(format!("profile {profile} (d = {}, l = {})", profile.degree(), profile.ell()));
    let g = &report.genericity;
    lines.push(format!(
        "generic: {} (stabilizer order {}, zero-sum partitions {})",
        g.is_generic, g.stabilizer_order, g.zero_subset_partition_count
    ));
    lines.push(format!("mp_count: {} (generic value {})", report.mp_count, report.expected_mp));
    lines.push(format!("mc_count: {} (generic value {})", report.mc_count, report.expected_mc));
    lines.push(format!("solutions: {} in S, {} in B", report.s_count, report.b_count));
    lines.push(format!("max oracle distance: {:.3e}", report.max_oracle_distance()));
    if with_representatives {
        for (i, r) in report.representatives.iter().enumerate() {
            let coeffs: Vec<String> = r.map.coeffs().iter().map(|z| fmt_c(*z)).collect();
            lines.push(format!("rep {}: [{}]", i + 1, coeffs.join(", ")));
        }
    }
    for c in caveats(report) {
        lines.push(format!("caveat: {c}"));
    }
    for n in &report.notes {
        lines.push(format!("note: {n}"));
    }
    lines.join("\n") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::count_fiber;
    use crate::index::MultiplicityProfile;
    use crate::scalar::gaussian_int;

    fn report(parts: &[usize], m: &[i64]) -> FiberReport {
        let spec = IndexSpectrum::exact(
            MultiplicityProfile::new(parts.to_vec()).unwrap(),
            m.iter().map(|&v| gaussian_int(v, 0)).collect(),
        )
        .unwrap();
        count_fiber(&spec, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn canonical_floats_and_keys() {
        let v = json!({"b": 0.1, "a": [1.0, f64::NAN], "c": 3});
        assert_eq!(
            to_canonical_string(&v),
            "{\"a\":[1.0000000000000000e0,null],\"b\":1.0000000000000001e-1,\"c\":3}\n"
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(report_exit_code(&report(&[1, 1, 2], &[1, 2, -3])), EXIT_OK);
        assert_eq!(report_exit_code(&report(&[1, 1, 1], &[1, 1, -2])), EXIT_CAVEAT);
        let empty = report(&[1, 1, 1, 1], &[0, 0, 0, 0]);
        assert_eq!(caveats(&empty), vec!["empty_fiber", "non_generic"]);
        assert_eq!(error_exit_code(&Error::IdenticallyZeroPsi { index: 1 }), EXIT_DEGENERATE);
        assert_eq!(error_exit_code(&Error::Parse("x".into())), EXIT_ARGUMENT);
    }

    #[test]
    fn json_is_reproducible() {
        let config = SolverConfig::default();
        let a = to_canonical_string(&report_json("enumerate", &report(&[1, 1, 2], &[1, 2, -3]), &config, true));
        let b = to_canonical_string(&report_json("enumerate", &report(&[1, 1, 2], &[1, 2, -3]), &config, true));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["mc_count"], json!(6));
        assert_eq!(v["representatives"].as_array().unwrap().len(), 6);
        assert_eq!(v["indices"][2], json!({"re": "-3", "im": "0"}));
    }
}

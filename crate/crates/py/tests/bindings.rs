use std::ffi::CString;

use pyo3::prelude::*;

fn run_python(code: &str) -> PyResult<()> {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(indexfiber::indexfiber)(py);
        py.import("sys")?.getattr("modules")?.set_item("indexfiber", module)?;
        py.run(&CString::new(code).unwrap(), None, None)
    })
}

#[test]
fn count_from_python() {
    run_python(
        r#"
import indexfiber
f = indexfiber.count([1, 1, 2], [1, 2, -3], seed=3)
assert (f.mp_count, f.mc_count) == (2, 6), f
assert len(f.representatives) == 6
assert all(s["classification"] == "S" for s in f.solutions())
assert indexfiber.expected_counts(7, 5) == (60, 360)
"#,
    )
    .unwrap();
}

#[test]
fn exact_and_inexact_indices() {
    run_python(
        r#"
import indexfiber
exact = indexfiber.count([1, 2], [("1/2", "3"), ("-1/2", -3)])
assert exact.is_generic and exact.exit_code == 0
inexact = indexfiber.count([1, 2], [0.5 + 3j, -0.5 - 3j])
assert inexact.exit_code == 2 and inexact.mc_count == 2
"#,
    )
    .unwrap();
}

#[test]
fn errors_map_to_python_exceptions() {
    run_python(
        r#"
import indexfiber
try:
    indexfiber.count([1, 1, 2], [1, 2, 3])
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")
try:
    indexfiber.recover_aux([1, 1, 2], [1, 2, -3], [0.3 + 0.4j, 1.0, 0.0])
except indexfiber.IndexFiberError:
    pass
else:
    raise AssertionError("expected IndexFiberError")
"#,
    )
    .unwrap();
}

use std::ffi::{CStr, CString};
use std::ptr;

use cal_ffi::*;

const THRESHOLDS: &str = r#"{"n": 4, "functions": "thresholds",
    "distribution_class": {"kind": "list", "members": [["1/4", "1/4", "1/4", "1/4"]]}}"#;

fn load(json: &str) -> *mut CalProblem {
    let text = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { cal_problem_from_json(text.as_ptr(), &mut p) },
        CalStatus::Ok
    );
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let e = cal_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn dimensions_through_the_abi() {
    let p = load(THRESHOLDS);
    let (mut n, mut m, mut vc, mut ld, mut k) = (0, 0, 0, 0, 0);
    unsafe {
        assert_eq!(cal_problem_size(p, &mut n, &mut m), CalStatus::Ok);
        assert_eq!(cal_class_dimensions(p, &mut vc, &mut ld), CalStatus::Ok);
        assert_eq!(cal_k_of_eps(p, 1, 4, &mut k), CalStatus::Ok);
    }
    assert_eq!((n, m, vc, ld), (4, 5, 1, 2));
    assert_eq!(k, 2);
    let mut d = CalDimension::default();
    assert_eq!(
        unsafe { cal_eps_dimension(p, CalTreeKind::Plain, 1, 4, 100_000, &mut d) },
        CalStatus::Ok
    );
    assert!(d.value >= 1 && d.exact && !d.budget_exhausted);
    assert!(cal_last_error().is_null());
    unsafe { cal_problem_free(p) };
}

#[test]
fn error_codes() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            cal_problem_from_json(ptr::null(), &mut p),
            CalStatus::ErrNull
        );
        let bad = CString::new(r#"{"n": 2}"#).unwrap();
        assert_eq!(
            cal_problem_from_json(bad.as_ptr(), &mut p),
            CalStatus::ErrInput
        );
        assert!(p.is_null());
        assert!(!last_error().is_empty());
        let mut k = 0;
        assert_eq!(cal_k_of_eps(ptr::null(), 1, 2, &mut k), CalStatus::ErrNull);
        let q = load(THRESHOLDS);
        assert_eq!(cal_k_of_eps(q, 1, 0, &mut k), CalStatus::ErrInput);
        assert_eq!(last_error(), "zero denominator");
        assert_eq!(cal_k_of_eps(q, 0, 1, &mut k), CalStatus::ErrInput);
        let mut d = CalDimension::default();
        let big = load(
            r#"{"n": 12, "functions": "thresholds", "distribution_class": {"kind": "dirac_all"}}"#,
        );
        assert_eq!(
            cal_eps_dimension(big, CalTreeKind::Relaxed, 1, 8, 1, &mut d),
            CalStatus::ErrBudget
        );
        assert!(d.budget_exhausted && !d.exact);
        cal_problem_free(q);
        cal_problem_free(big);
        cal_problem_free(ptr::null_mut());
    }
}

#[test]
fn regret_estimates_are_seeded() {
    let p = load(THRESHOLDS);
    let learner = CString::new("level:eps=1/4").unwrap();
    let adversary = CString::new("critical:realizable,eps=1/4").unwrap();
    let run = |seed| {
        let mut r = CalRegret::default();
        let s = unsafe {
            cal_estimate_regret(
                p,
                learner.as_ptr(),
                adversary.as_ptr(),
                16,
                8,
                seed,
                CalRegretMode::Adaptive,
                &mut r,
            )
        };
        assert_eq!(s, CalStatus::Ok);
        r
    };
    let a = run(5);
    assert_eq!(a, run(5));
    assert_eq!(a.reps, 8);
    assert!(!a.approximate);
    let bogus = CString::new("nope").unwrap();
    let mut r = CalRegret::default();
    let s = unsafe {
        cal_estimate_regret(
            p,
            bogus.as_ptr(),
            adversary.as_ptr(),
            16,
            8,
            0,
            CalRegretMode::Adaptive,
            &mut r,
        )
    };
    assert_eq!(s, CalStatus::ErrInput);
    unsafe { cal_problem_free(p) };
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(cal_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header compiles as C alongside the standard headers.
#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/cal.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in [
        "cal_problem_from_json",
        "cal_problem_free",
        "cal_eps_dimension",
        "cal_estimate_regret",
        "CAL_STATUS_ERR_BUDGET = 3",
    ] {
        assert!(text.contains(sym), "{sym}");
    }
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c)
            .arg("--version")
            .output()
            .is_ok()
    }) else {
        eprintln!("no C compiler found; skipping compile check");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include <stdio.h>\n#include \"cal.h\"\nint main(void) { CalRegret r; r.std_error = 0; \
         fprintf(stderr, \"%s\", cal_version()); return (int)r.std_error; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

//! C ABI over `cal_core`. Problems are opaque handles created from JSON text and
//! released with [`cal_problem_free`]. Every fallible call returns a [`CalStatus`]
//! and writes results through out-pointers; on failure the message is available from
//! [`cal_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cal_core::adversaries::AdversarySpec;
use cal_core::arena::{estimate_regret, GameConfig, RegretMode};
use cal_core::critical::k_of_eps;
use cal_core::dims::{eps_dimension, littlestone_dimension, vc_dimension, SearchConfig, TreeKind};
use cal_core::learners::LearnerSpec;
use cal_core::problem::Problem;
use cal_core::{Error, Rational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalStatus {
    Ok = 0,
    /// A required pointer was null.
    ErrNull = 1,
    /// Malformed input or a failed precondition.
    ErrInput = 2,
    /// A search budget or expert cap was reached.
    ErrBudget = 3,
    /// A bug or panic inside the library.
    ErrInternal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalTreeKind {
    Plain = 0,
    Relaxed = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalRegretMode {
    Oblivious = 0,
    Adaptive = 1,
}

/// An ε-dimension search result. `value` is a lower bound unless `exact` is set.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CalDimension {
    pub value: u64,
    pub exact: bool,
    pub budget_exhausted: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CalRegret {
    pub mean: f64,
    pub std_error: f64,
    pub mean_loss: f64,
    pub comparator_loss: f64,
    pub reps: u64,
    pub approximate: bool,
}

/// Opaque problem handle.
pub struct CalProblem {
    inner: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CalStatus {
    match e {
        Error::Budget(_) | Error::Cap(_) => CalStatus::ErrBudget,
        Error::Solver(_) => CalStatus::ErrInternal,
        _ => CalStatus::ErrInput,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (CalStatus, String)>) -> CalStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CalStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            CalStatus::ErrInternal
        }
    }
}

fn lift<T>(r: cal_core::Result<T>) -> Result<T, (CalStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CalStatus, String) {
    (CalStatus::ErrNull, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a valid nul-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CalStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CalStatus::ErrInput, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or a handle from [`cal_problem_from_json`] that was not freed.
unsafe fn problem<'a>(p: *const CalProblem) -> Result<&'a Problem, (CalStatus, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("problem"))
}

fn ratio(num: i64, den: i64) -> Result<Rational, (CalStatus, String)> {
    if den == 0 {
        return Err((CalStatus::ErrInput, "zero denominator".into()));
    }
    Ok(Rational::new(num.into(), den.into()))
}

fn finite(p: &Problem) -> Result<&cal_core::env::FiniteEnv, (CalStatus, String)> {
    lift(p.require_finite())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn cal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn cal_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parses a problem document and stores a new handle in `*out`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cal_problem_from_json(
    json: *const c_char,
    out: *mut *mut CalProblem,
) -> CalStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let inner = lift(Problem::from_str(text(json, "json")?))?;
        *out = Box::into_raw(Box::new(CalProblem { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from [`cal_problem_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cal_problem_free(p: *mut CalProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of points and of functions of a finite problem.
///
/// # Safety
/// `p` must be a live handle; `points` and `functions` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn cal_problem_size(
    p: *const CalProblem,
    points: *mut u64,
    functions: *mut u64,
) -> CalStatus {
    guard(|| {
        let env = finite(problem(p)?)?;
        if points.is_null() || functions.is_null() {
            return Err(null("out"));
        }
        *points = env.n() as u64;
        *functions = env.class.m() as u64;
        Ok(())
    })
}

/// VC and Littlestone dimensions of the problem's class.
///
/// # Safety
/// `p` must be a live handle; `vc` and `littlestone` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn cal_class_dimensions(
    p: *const CalProblem,
    vc: *mut u64,
    littlestone: *mut u64,
) -> CalStatus {
    guard(|| {
        let env = finite(problem(p)?)?;
        if vc.is_null() || littlestone.is_null() {
            return Err(null("out"));
        }
        *vc = vc_dimension(&env.class) as u64;
        *littlestone = littlestone_dimension(&env.class) as u64;
        Ok(())
    })
}

/// `k(ε)` at `ε = eps_num / eps_den`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cal_k_of_eps(
    p: *const CalProblem,
    eps_num: i64,
    eps_den: i64,
    out: *mut i64,
) -> CalStatus {
    guard(|| {
        let env = finite(problem(p)?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(k_of_eps(&env.class, &env.u, &ratio(eps_num, eps_den)?))?;
        Ok(())
    })
}

/// Depth of the deepest shattered tree found within `budget` node expansions.
/// A binding budget still fills `out` and returns `ErrBudget`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cal_eps_dimension(
    p: *const CalProblem,
    kind: CalTreeKind,
    eps_num: i64,
    eps_den: i64,
    budget: u64,
    out: *mut CalDimension,
) -> CalStatus {
    guard(|| {
        let env = finite(problem(p)?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let eps = ratio(eps_num, eps_den)?;
        let kind = match kind {
            CalTreeKind::Plain => TreeKind::Plain(eps),
            CalTreeKind::Relaxed => TreeKind::Relaxed(eps),
        };
        let cfg = SearchConfig {
            budget,
            ..SearchConfig::default()
        };
        let r = lift(eps_dimension(&env.class, &env.u, &kind, cfg))?;
        *out = CalDimension {
            value: r.value as u64,
            exact: r.exact,
            budget_exhausted: r.budget_exhausted,
        };
        if r.budget_exhausted {
            return Err((
                CalStatus::ErrBudget,
                format!("search budget of {budget} expansions reached"),
            ));
        }
        Ok(())
    })
}

/// Monte-Carlo regret estimate of `learner` against `adversary`, both given as spec
/// strings such as `level:eps=1/8` and `critical:realizable,eps=1/8`.
///
/// # Safety
/// `p` must be a live handle, the specs nul-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cal_estimate_regret(
    p: *const CalProblem,
    learner: *const c_char,
    adversary: *const c_char,
    horizon: u64,
    reps: u64,
    seed: u64,
    mode: CalRegretMode,
    out: *mut CalRegret,
) -> CalStatus {
    guard(|| {
        let problem = problem(p)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let learner = lift(LearnerSpec::parse(text(learner, "learner")?))?;
        let adversary = lift(AdversarySpec::parse(text(adversary, "adversary")?))?;
        let mut cfg = GameConfig::new(learner, adversary, horizon as usize);
        cfg.reps = reps as usize;
        cfg.seed = seed;
        cfg.mode = match mode {
            CalRegretMode::Oblivious => RegretMode::Oblivious,
            CalRegretMode::Adaptive => RegretMode::Adaptive,
        };
        let e = lift(estimate_regret(problem, &cfg))?;
        *out = CalRegret {
            mean: e.mean,
            std_error: e.stderr,
            mean_loss: e.mean_loss,
            comparator_loss: e.comparator_loss,
            reps: e.reps as u64,
            approximate: e.approximate,
        };
        Ok(())
    })
}

use std::ffi::{c_int, CStr, CString};
use std::ptr;

use mulrk_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mulrk_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn registry(name: &str) -> *mut MulrkProblem {
    let name = CString::new(name).unwrap();
    let mut p = ptr::null_mut();
    let st = unsafe { mulrk_problem_from_registry(name.as_ptr(), ptr::null(), ptr::null(), 0, &mut p) };
    assert_eq!(st, MulrkStatus::Ok, "{}", last_error());
    p
}

fn sample(t: *const MulrkTrajectory, i: usize, k: usize) -> (f64, f64, f64, c_int) {
    let (mut x, mut re, mut im, mut m) = (0.0, 0.0, 0.0, -1);
    let st = unsafe { mulrk_trajectory_sample(t, i, k, &mut x, &mut re, &mut im, &mut m) };
    assert_eq!(st, MulrkStatus::Ok, "{}", last_error());
    (x, re, im, m)
}

#[test]
fn solve_registered_problem() {
    let p = registry("sqrt");
    let (mut h, mut x_end) = (0.0, 0.0);
    assert_eq!(unsafe { mulrk_problem_defaults(p, &mut h, &mut x_end) }, MulrkStatus::Ok);
    assert_eq!((h, x_end), (0.3, 3.0));
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_MRK4, h, x_end, &mut t) }, MulrkStatus::Ok);
    assert_eq!(unsafe { mulrk_trajectory_len(t) }, 11);
    assert_eq!(unsafe { mulrk_trajectory_dim(t) }, 1);
    let (x, re, im, m) = sample(t, 10, 0);
    assert_eq!(x, 3.0);
    assert!((re - 2.0).abs() < 5e-6);
    assert_eq!(im, 0.0);
    assert_eq!(m, MULRK_METHOD_MRK4);
    unsafe {
        mulrk_trajectory_free(t);
        mulrk_problem_free(p);
    }
}

#[test]
fn parameter_overrides() {
    let name = CString::new("sqrt").unwrap();
    let key = CString::new("y0").unwrap();
    let keys = [key.as_ptr()];
    let values = [2.0];
    let mut p = ptr::null_mut();
    let st = unsafe { mulrk_problem_from_registry(name.as_ptr(), keys.as_ptr(), values.as_ptr(), 1, &mut p) };
    assert_eq!(st, MulrkStatus::Ok);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_MRK4, 0.3, 3.0, &mut t) }, MulrkStatus::Ok);
    let (_, re, _, _) = sample(t, 10, 0);
    assert!((re - 7f64.sqrt()).abs() < 1e-5);
    unsafe {
        mulrk_trajectory_free(t);
        mulrk_problem_free(p);
    }

    let bad = CString::new("nope").unwrap();
    let keys = [bad.as_ptr()];
    let st = unsafe { mulrk_problem_from_registry(name.as_ptr(), keys.as_ptr(), values.as_ptr(), 1, &mut p) };
    assert_eq!(st, MulrkStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("nope"));
}

#[test]
fn root_crossing_needs_the_bypass() {
    let p = registry("root_cross");
    let mut t = ptr::null_mut();
    let st = unsafe { mulrk_solve(p, MULRK_METHOD_MRK4, 0.05, 2.0, &mut t) };
    assert_eq!(st, MulrkStatus::Domain);
    assert!(t.is_null());
    assert!(last_error().contains("x = "), "{}", last_error());

    let mut cfg = MulrkHybridConfig {
        zero_threshold: 0.0,
        min_ordinary_steps: 0,
        rearm_factor: 0.0,
    };
    assert_eq!(unsafe { mulrk_hybrid_default(p, &mut cfg) }, MulrkStatus::Ok);
    assert_eq!(cfg.min_ordinary_steps, 2);
    assert_eq!(unsafe { mulrk_solve_hybrid(p, 0.05, 2.0, &cfg, &mut t) }, MulrkStatus::Ok);
    let n = unsafe { mulrk_trajectory_len(t) };
    let tags: Vec<c_int> = (0..n).map(|i| sample(t, i, 0).3).collect();
    assert!(tags.contains(&MULRK_METHOD_RK4));
    let (_, last, _, _) = sample(t, n - 1, 0);
    assert!((last + 1.0).abs() < 1e-5);
    unsafe { mulrk_trajectory_free(t) };

    cfg.rearm_factor = 0.5;
    assert_eq!(
        unsafe { mulrk_solve_hybrid(p, 0.05, 2.0, &cfg, &mut t) },
        MulrkStatus::InvalidArgument
    );
    unsafe { mulrk_problem_free(p) };
}

#[test]
fn expression_problems() {
    let src = CString::new("exp(1/(2*y^2))").unwrap();
    let mut p = ptr::null_mut();
    let st = unsafe { mulrk_problem_from_expr(MULRK_RHS_MULT, src.as_ptr(), 0.0, 1.0, 0.0, &mut p) };
    assert_eq!(st, MulrkStatus::Ok);
    let (mut h, mut x_end) = (0.0, 0.0);
    assert_eq!(
        unsafe { mulrk_problem_defaults(p, &mut h, &mut x_end) },
        MulrkStatus::InvalidArgument
    );
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_MRK2, 0.1, 1.0, &mut t) }, MulrkStatus::Ok);
    let (_, re, _, _) = sample(t, 10, 0);
    assert!((re - 2f64.sqrt()).abs() < 1e-3);
    unsafe {
        mulrk_trajectory_free(t);
        mulrk_problem_free(p);
    }

    let src = CString::new("2*x + (").unwrap();
    let st = unsafe { mulrk_problem_from_expr(MULRK_RHS_ORDINARY, src.as_ptr(), 0.0, 1.0, 0.0, &mut p) };
    assert_eq!(st, MulrkStatus::Syntax);
    assert!(last_error().contains("offset 7"));
}

#[test]
fn argument_errors() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { mulrk_problem_from_registry(ptr::null(), ptr::null(), ptr::null(), 0, &mut p) },
        MulrkStatus::NullPointer
    );
    let p = registry("sqrt");
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mulrk_solve(p, 9, 0.3, 3.0, &mut t) }, MulrkStatus::InvalidArgument);
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_MRK4, 0.7, 3.0, &mut t) }, MulrkStatus::InvalidArgument);
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_MRK4, 0.3, 3.0, &mut t) }, MulrkStatus::Ok);
    assert!(last_error().is_empty());
    let st = unsafe { mulrk_trajectory_sample(t, 11, 0, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, MulrkStatus::OutOfRange);
    let st = unsafe { mulrk_trajectory_sample(t, 0, 1, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, MulrkStatus::OutOfRange);
    assert_eq!(unsafe { mulrk_trajectory_len(ptr::null()) }, 0);
    unsafe {
        mulrk_trajectory_free(t);
        mulrk_problem_free(p);
        mulrk_problem_free(ptr::null_mut());
    }
}

#[test]
fn second_order_rk4_uses_the_ordinary_system() {
    let p = registry("second_order");
    assert_eq!(unsafe { mulrk_problem_dim(p) }, 2);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mulrk_solve(p, MULRK_METHOD_RK4, 0.25, 1.75, &mut t) }, MulrkStatus::Ok);
    let (_, y, _, _) = sample(t, 1, 0);
    assert!((y - 7.618_231_31).abs() < 1e-8);
    unsafe {
        mulrk_trajectory_free(t);
        mulrk_problem_free(p);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(mulrk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

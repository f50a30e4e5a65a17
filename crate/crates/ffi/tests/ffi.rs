use std::ffi::{CStr, CString};
use std::ptr;

use propscore_ffi::*;

fn space(weights: &[f64]) -> *mut PsMeasureSpace {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ps_measure_space_new(weights.as_ptr(), weights.len(), &mut out) }, PsStatus::Ok);
    out
}

fn entropy(name: &str, params: &[f64]) -> Result<*mut PsEntropy, PsStatus> {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { ps_entropy_new(name.as_ptr(), params.as_ptr(), params.len(), &mut out) } {
        PsStatus::Ok => Ok(out),
        s => Err(s),
    }
}

fn last_error() -> String {
    let p = ps_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn quadratic_round_trip() {
    let s = space(&[1.0, 1.0]);
    assert_eq!(unsafe { ps_measure_space_size(s) }, 2);
    let e = entropy("quadratic", &[]).unwrap();
    let (p, q) = ([1.0, 0.0], [0.5, 0.5]);
    unsafe {
        let mut v = 0.0;
        assert_eq!(ps_entropy_value(e, s, q.as_ptr(), 2, &mut v), PsStatus::Ok);
        assert_eq!(v, 0.5);
        let mut g = [0.0; 2];
        assert_eq!(ps_entropy_subgradient(e, s, q.as_ptr(), 2, g.as_mut_ptr()), PsStatus::Ok);
        assert_eq!(g, [1.0, 1.0]);
        let mut d = 0.0;
        assert_eq!(ps_bregman_divergence(e, s, p.as_ptr(), q.as_ptr(), 2, &mut d), PsStatus::Ok);
        assert!((d - 0.5).abs() < 1e-12);

        let mut r = ptr::null_mut();
        assert_eq!(ps_rule_new(e, &mut r), PsStatus::Ok);
        ps_entropy_free(e);
        let mut score = [0.0; 2];
        assert_eq!(ps_rule_score(r, s, p.as_ptr(), 2, score.as_mut_ptr()), PsStatus::Ok);
        assert_eq!(score, [1.0, -1.0]);
        assert_eq!(ps_score_divergence(r, s, p.as_ptr(), q.as_ptr(), 2, &mut d), PsStatus::Ok);
        assert!((d - 0.5).abs() < 1e-12);
        ps_rule_free(r);
        ps_measure_space_free(s);
    }
}

#[test]
fn shannon_boundary_scores() {
    let s = space(&[1.0, 1.0]);
    let e = entropy("shannon", &[]).unwrap();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(ps_rule_new(e, &mut r), PsStatus::Ok);
        let (p, q) = ([0.5, 0.5], [1.0, 0.0]);
        let mut score = [0.0; 2];
        assert_eq!(ps_rule_score(r, s, q.as_ptr(), 2, score.as_mut_ptr()), PsStatus::Ok);
        assert_eq!(score, [0.0, f64::NEG_INFINITY]);
        let mut d = 0.0;
        assert_eq!(ps_score_divergence(r, s, p.as_ptr(), q.as_ptr(), 2, &mut d), PsStatus::Ok);
        assert_eq!(d, f64::INFINITY);
        // the subgradient oracle refuses boundary points
        let mut g = [0.0; 2];
        assert_eq!(ps_entropy_subgradient(e, s, q.as_ptr(), 2, g.as_mut_ptr()), PsStatus::Domain);
        assert!(!last_error().is_empty());
        ps_rule_free(r);
        ps_entropy_free(e);
        ps_measure_space_free(s);
    }
}

#[test]
fn error_codes() {
    assert_eq!(entropy("brier", &[]).unwrap_err(), PsStatus::InvalidArgument);
    assert!(last_error().contains("brier"));
    assert_eq!(entropy("power", &[0.5]).unwrap_err(), PsStatus::InvalidArgument);

    let s = space(&[1.0, 1.0, 1.0]);
    let e = entropy("power", &[3.0]).unwrap();
    let mut v = 0.0;
    unsafe {
        assert_eq!(ps_entropy_value(e, s, [0.5, 0.5].as_ptr(), 2, &mut v), PsStatus::Dimension);
        assert_eq!(ps_entropy_value(ptr::null(), s, [0.2; 3].as_ptr(), 3, &mut v), PsStatus::NullPointer);
        assert_eq!(ps_entropy_value(e, s, ptr::null(), 3, &mut v), PsStatus::NullPointer);
        assert_eq!(ps_entropy_value(e, s, [0.2; 3].as_ptr(), 3, ptr::null_mut()), PsStatus::NullPointer);
        assert_eq!(ps_entropy_value(e, s, [-0.2, 0.5, 0.5].as_ptr(), 3, &mut v), PsStatus::Domain);

        let mut r = ptr::null_mut();
        assert_eq!(ps_rule_new(e, &mut r), PsStatus::Ok);
        let mut out = [0.0; 3];
        assert_eq!(ps_rule_score(r, s, [0.5, 0.5, 0.5].as_ptr(), 3, out.as_mut_ptr()), PsStatus::Domain);
        ps_rule_free(r);
        ps_entropy_free(e);
        ps_measure_space_free(s);
        ps_measure_space_free(ptr::null_mut());

        let mut bad = ptr::null_mut();
        assert_eq!(ps_measure_space_new([1.0, -1.0].as_ptr(), 2, &mut bad), PsStatus::InvalidArgument);
        assert!(bad.is_null());
    }
}

#[test]
fn linear_rule_is_improper() {
    let s = space(&[1.0, 1.0]);
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(ps_rule_linear(&mut r), PsStatus::Ok);
        let (p, q) = ([0.7, 0.3], [1.0, 0.0]);
        let mut d = 0.0;
        assert_eq!(ps_score_divergence(r, s, p.as_ptr(), q.as_ptr(), 2, &mut d), PsStatus::Ok);
        assert!(d < 0.0);
        ps_rule_free(r);
        ps_measure_space_free(s);
    }
}

#[test]
fn hyvarinen_on_grid() {
    let n = 32;
    let values: Vec<f64> = (0..n).map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin().exp()).collect();
    let mut score = vec![0.0; n];
    let mut fisher = 0.0;
    unsafe {
        assert_eq!(ps_hyvarinen_score(values.as_ptr(), n, score.as_mut_ptr()), PsStatus::Ok);
        assert_eq!(ps_fisher_entropy(values.as_ptr(), n, &mut fisher), PsStatus::Ok);
    }
    // Euler identity: Σ q S(q) h = Φ(q)
    let h = 1.0 / n as f64;
    let euler: f64 = values.iter().zip(&score).map(|(q, s)| q * s * h).sum();
    assert!((euler - fisher).abs() < 1e-12 * (1.0 + fisher));
    unsafe {
        assert_eq!(ps_hyvarinen_score(values.as_ptr(), 3, score.as_mut_ptr()), PsStatus::InvalidArgument);
        let zeros = vec![0.0; n];
        assert_eq!(ps_fisher_entropy(zeros.as_ptr(), n, &mut fisher), PsStatus::Domain);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/propscore.h");
    for symbol in [
        "ps_last_error_message",
        "ps_measure_space_new",
        "ps_measure_space_size",
        "ps_measure_space_free",
        "ps_entropy_new",
        "ps_entropy_free",
        "ps_entropy_value",
        "ps_entropy_subgradient",
        "ps_bregman_divergence",
        "ps_rule_new",
        "ps_rule_linear",
        "ps_rule_free",
        "ps_rule_score",
        "ps_score_divergence",
        "ps_hyvarinen_score",
        "ps_fisher_entropy",
        "PS_STATUS_NULL_POINTER",
        "typedef struct PsRule PsRule",
    ] {
        assert!(header.contains(symbol), "{symbol} missing from header");
    }
}

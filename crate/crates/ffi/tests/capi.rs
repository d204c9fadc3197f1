use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use critdipole_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { cd_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take(n.min(255)).map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn constants_and_headline_numbers() {
    unsafe {
        let c = cd_constants_codata2018();
        let mut p = 0.0;
        assert_eq!(cd_p_crit_exact_si(c, &mut p), CdStatus::Ok);
        assert!(((p - 1.052e-30) / 1.052e-30).abs() < 0.01);
        let mut r = 0.0;
        assert_eq!(cd_estimate_ratio(c, &mut r), CdStatus::Ok);
        assert_eq!(r, 16.0);
        let mut alpha = 0.0;
        assert_eq!(cd_alpha_from_p_si(c, p, &mut alpha), CdStatus::Ok);
        assert!((alpha - 0.25).abs() < 1e-12);
        cd_constants_free(c);
    }
}

#[test]
fn invalid_constants_report_an_error() {
    unsafe {
        let mut h = ptr::null_mut();
        let s = cd_constants_new(-1.0, 1.0, 1.0, 1.0, &mut h);
        assert_eq!(s, CdStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(cd_p_crit_exact_si(ptr::null(), &mut 0.0), CdStatus::NullPointer);
        let c = cd_constants_codata2018();
        assert_eq!(cd_p_crit_exact_si(c, ptr::null_mut()), CdStatus::NullPointer);
        cd_constants_free(c);
        cd_constants_free(ptr::null_mut());
        cd_spectrum_free(ptr::null_mut());
        assert_eq!(cd_spectrum_len(ptr::null()), 0);
    }
}

#[test]
fn zero_energy_and_alpha_crit() {
    unsafe {
        let mut n = 0usize;
        assert_eq!(cd_zero_energy_node_count(0.5, 1e-8, 1e8, &mut n), CdStatus::Ok);
        assert_eq!(n, 5);
        let (mut a, mut w) = (0.0, 0.0);
        assert_eq!(cd_find_alpha_crit(1e-8, 1e8, 1e-4, &mut a, &mut w), CdStatus::Ok);
        assert!((a - 0.25727).abs() < 2e-4 && w <= 1e-4);
        assert_eq!(
            cd_find_alpha_crit(1.0, 10.0, 1e-4, &mut a, &mut w),
            CdStatus::Inconclusive
        );
        assert!(last_error().starts_with("bracket"));
    }
}

#[test]
fn series_pure_power() {
    unsafe {
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            cd_series_eval(0.1, 0.0, 0.75, 0.0, 10, 0.3, &mut re, &mut im),
            CdStatus::Ok
        );
        assert!((re - 0.3f64.powf(0.75)).abs() < 1e-14 && im == 0.0);
        assert_eq!(
            cd_series_eval(0.1, 0.0, 0.75, 0.0, 10, -1.0, &mut re, &mut im),
            CdStatus::InvalidArgument
        );
    }
}

#[test]
fn box_spectrum_from_record() {
    let rec = CString::new("kind=coulomb lambda=0").unwrap();
    unsafe {
        let mut s = ptr::null_mut();
        let st = cd_spectrum_from_record(
            rec.as_ptr(),
            CdGridKind::Uniform,
            0.0,
            std::f64::consts::PI,
            513,
            3,
            &mut s,
        );
        assert_eq!(st, CdStatus::Ok);
        assert_eq!(cd_spectrum_len(s), 3);
        for k in 0..3 {
            let (mut e, mut nodes) = (0.0, 0usize);
            assert_eq!(cd_spectrum_state(s, k, &mut e, &mut nodes), CdStatus::Ok);
            let exact = 0.5 * ((k + 1) * (k + 1)) as f64;
            assert!((e - exact).abs() / exact < 1e-4, "{k}: {e}");
            assert_eq!(nodes, k);
        }
        assert_eq!(cd_spectrum_state(s, 3, &mut 0.0, &mut 0), CdStatus::InvalidArgument);
        cd_spectrum_free(s);

        let bad = CString::new("kind=nonsense").unwrap();
        let st = cd_spectrum_from_record(bad.as_ptr(), CdGridKind::Uniform, 0.0, 1.0, 64, 1, &mut s);
        assert_eq!(st, CdStatus::InvalidArgument);
    }
}

#[test]
fn hydrogen_handle() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(cd_hydrogen_spectrum(1.0, 2, 0, &mut s), CdStatus::Ok);
        let (mut e, mut nodes) = (0.0, 0usize);
        assert_eq!(cd_spectrum_state(s, 0, &mut e, &mut nodes), CdStatus::Ok);
        assert!((e + 0.5).abs() < 2.5e-3 && nodes == 0);
        cd_spectrum_free(s);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { std::ffi::CStr::from_ptr(cd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/critdipole.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cd_constants_codata2018",
        "cd_p_crit_exact_si",
        "cd_spectrum_free",
        "CD_STATUS_INCONCLUSIVE",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // syntax check with the system C compiler when one is present
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

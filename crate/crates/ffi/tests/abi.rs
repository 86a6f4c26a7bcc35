use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use crancov_ffi::*;

fn parse(text: &str) -> *mut CrancovScenario {
    let text = CString::new(text).unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { crancov_scenario_parse(text.as_ptr(), &mut handle) };
    assert_eq!(status, CrancovStatus::Ok, "{}", last_error());
    handle
}

fn last_error() -> String {
    let p = crancov_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

#[test]
fn coverage_is_monotone_in_the_threshold() {
    let h = parse("spacing_m = 200\ncluster_area_km2 = 1\n");
    let t = [-5.0, 0.0, 5.0, 10.0];
    let mut p = [0.0; 4];
    let status = unsafe { crancov_coverage(h, t.as_ptr(), t.len(), p.as_mut_ptr()) };
    assert_eq!(status, CrancovStatus::Ok);
    assert!(p.windows(2).all(|w| w[0] >= w[1]));
    assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
    assert!(crancov_last_error().is_null());
    unsafe { crancov_scenario_free(h) };
}

#[test]
fn rate_profile_is_ordered() {
    let h = parse("spacing_m=200, cluster_area_km2=0.5, csi_limit=4");
    let mut r = CrancovRateProfile::default();
    assert_eq!(unsafe { crancov_rate_profile(h, &mut r) }, CrancovStatus::Ok);
    assert!(0.0 < r.p5 && r.p5 <= r.p10 && r.p10 <= r.p50 && r.p50 < r.mean * 2.0);
    unsafe { crancov_scenario_free(h) };
}

#[test]
fn simulation_is_seed_reproducible() {
    let h = parse("spacing_m=200\ncluster_area_km2=0.5\nprecoder_mode=diagonal-approx\n");
    let t = [0.0, 5.0];
    let run = |seed| {
        let (mut p, mut hw) = ([0.0; 2], [0.0; 2]);
        let s = unsafe { crancov_simulate_coverage(h, 2000, seed, t.as_ptr(), 2, p.as_mut_ptr(), hw.as_mut_ptr()) };
        assert_eq!(s, CrancovStatus::Ok, "{}", last_error());
        assert!(hw.iter().all(|x| *x > 0.0));
        p
    };
    assert_eq!(run(3), run(3));
    let mut p = [0.0; 2];
    let s = unsafe { crancov_simulate_coverage(h, 2000, 3, t.as_ptr(), 2, p.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(s, CrancovStatus::Ok);
    assert_eq!(p, run(3));
    unsafe { crancov_scenario_free(h) };
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new("alpha=2\nspacing_m=200\ncluster_area_km2=1").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { crancov_scenario_parse(bad.as_ptr(), &mut h) }, CrancovStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("alpha"));

    assert_eq!(unsafe { crancov_scenario_parse(ptr::null(), &mut h) }, CrancovStatus::InvalidArgument);

    let h = parse("spacing_m=200\ncluster_area_km2=1");
    let mut p = [0.0; 1];
    let s = unsafe { crancov_coverage(h, ptr::null(), 1, p.as_mut_ptr()) };
    assert_eq!(s, CrancovStatus::InvalidArgument);
    let s = unsafe { crancov_coverage(ptr::null(), [0.0].as_ptr(), 1, p.as_mut_ptr()) };
    assert_eq!(s, CrancovStatus::InvalidArgument);
    unsafe { crancov_scenario_free(h) };

    let tiny = parse("spacing_m=200\ncluster_radius_m=0.001\nprecoder_mode=diagonal-approx");
    let s = unsafe { crancov_simulate_coverage(tiny, 1000, 1, [0.0].as_ptr(), 1, p.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(s, CrancovStatus::Numeric);
    assert!(last_error().contains("excluded"));
    unsafe { crancov_scenario_free(tiny) };
    unsafe { crancov_scenario_free(ptr::null_mut()) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(crancov_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/crancov.h");
    assert!(header.exists());
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output()
        else {
            eprintln!("{compiler} not found; skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

use std::ffi::{CStr, CString};
use std::ptr;

use bscc_ffi::*;

fn last_error() -> Option<String> {
    let p = bscc_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn fit(nodes: &[f64], samples: &[f64], channels: usize) -> (BsccStatus, *mut BsccSpline) {
    let mut handle = ptr::null_mut();
    let status = unsafe {
        bscc_spline_fit(
            nodes.as_ptr(),
            nodes.len(),
            samples.as_ptr(),
            channels,
            &mut handle,
        )
    };
    (status, handle)
}

#[test]
fn spline_handle_lifecycle() {
    let nodes: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
    // two channels: 2x + 1 and -x
    let mut samples: Vec<f64> = nodes.iter().map(|x| 2.0 * x + 1.0).collect();
    samples.extend(nodes.iter().map(|x| -x));
    let (status, h) = fit(&nodes, &samples, 2);
    assert_eq!(status, BsccStatus::Ok);
    assert!(!h.is_null());
    unsafe {
        assert_eq!(bscc_spline_num_channels(h), 2);
        assert_eq!(bscc_spline_num_coeffs(h), 11);
        let mut out = [0.0; 2];
        assert_eq!(
            bscc_spline_eval(h, 0.3, out.as_mut_ptr(), 2),
            BsccStatus::Ok
        );
        assert!((out[0] - 1.6).abs() < 1e-13);
        assert!((out[1] + 0.3).abs() < 1e-13);
        assert_eq!(
            bscc_spline_eval(h, 0.3, out.as_mut_ptr(), 1),
            BsccStatus::BufferTooSmall
        );
        assert!(last_error().unwrap().contains("need 2"));
        assert_eq!(
            bscc_spline_eval(h, 1.5, out.as_mut_ptr(), 2),
            BsccStatus::InvalidArgument
        );

        let mut coeffs = [0.0; 11];
        assert_eq!(
            bscc_spline_coefficients(h, 1, coeffs.as_mut_ptr(), 11),
            BsccStatus::Ok
        );
        assert_eq!(coeffs[0], 0.0);
        assert!((coeffs[10] + 1.0).abs() < 1e-13);
        assert_eq!(
            bscc_spline_coefficients(h, 2, coeffs.as_mut_ptr(), 11),
            BsccStatus::InvalidArgument
        );
        bscc_spline_free(h);
        bscc_spline_free(ptr::null_mut());
        assert_eq!(bscc_spline_num_channels(ptr::null()), 0);
    }
}

#[test]
fn fit_errors() {
    let (status, h) = fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], 1);
    assert_eq!(status, BsccStatus::Infeasible);
    assert!(h.is_null());
    assert!(last_error().is_some());

    let (status, _) = fit(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4], 1);
    assert_eq!(status, BsccStatus::InvalidArgument);

    let (status, _) = fit(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4], 0);
    assert_eq!(status, BsccStatus::InvalidArgument);

    let status = unsafe { bscc_spline_fit(ptr::null(), 4, ptr::null(), 1, &mut ptr::null_mut()) };
    assert_eq!(status, BsccStatus::NullPointer);
    let nodes = [0.0, 1.0, 2.0, 3.0];
    let status = unsafe { bscc_spline_fit(nodes.as_ptr(), 4, nodes.as_ptr(), 1, ptr::null_mut()) };
    assert_eq!(status, BsccStatus::NullPointer);

    // success clears the previous message
    let (status, h) = fit(&nodes, &nodes, 1);
    assert_eq!(status, BsccStatus::Ok);
    assert!(last_error().is_none());
    unsafe { bscc_spline_free(h) };
}

#[test]
fn basis_values() {
    let points = [0.0, 1.0, 2.0, 3.0];
    let n = bscc_basis_count(4, 3);
    assert_eq!(n, 6);
    let mut out = vec![f64::NAN; n];
    unsafe {
        assert_eq!(
            bscc_basis_values(points.as_ptr(), 4, 3, 0.0, out.as_mut_ptr(), n),
            BsccStatus::Ok
        );
        assert_eq!(out, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            bscc_basis_values(points.as_ptr(), 4, 3, 1.5, out.as_mut_ptr(), n),
            BsccStatus::Ok
        );
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert_eq!(
            bscc_basis_values(points.as_ptr(), 4, 3, 1.5, out.as_mut_ptr(), 5),
            BsccStatus::BufferTooSmall
        );
        assert_eq!(
            bscc_basis_values(points.as_ptr(), 4, 3, 9.0, out.as_mut_ptr(), n),
            BsccStatus::InvalidArgument
        );
    }
}

#[test]
fn bounds() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(bscc_bacc_bound(100, 0, &mut v), BsccStatus::Ok);
        let pi = std::f64::consts::PI;
        let want = (1.0 + 3.0 * pi * pi / 4.0) * (pi / 200.0).sin();
        assert!((v - want).abs() <= 1e-15 * want);
        assert_eq!(bscc_bacc_bound(100, 100, &mut v), BsccStatus::Infeasible);
        assert_eq!(
            bscc_bacc_bound(100, 0, ptr::null_mut()),
            BsccStatus::NullPointer
        );

        assert_eq!(
            bscc_corollary_bound(100, 5, 1.0, 2.0, 0.0, 0.01, 0.05, &mut v),
            BsccStatus::Ok
        );
        assert_eq!(v, 0.0);
        assert_eq!(
            bscc_corollary_bound(100, 5, 1.0, 2.0, 1.0, 0.05, 0.01, &mut v),
            BsccStatus::InvalidArgument
        );

        let mut a = 0.0;
        let mut b = 0.0;
        assert_eq!(
            bscc_cheby_bound(100, 10, 1.0, 1.0, 1.0, 0.0, &mut a),
            BsccStatus::Ok
        );
        let h = bscc::bounds::chebyshev_h_min(100).unwrap();
        assert_eq!(
            bscc_cheby_bound(100, 10, 1.0, 1.0, 1.0, h, &mut b),
            BsccStatus::Ok
        );
        assert_eq!(a, b);
        assert_eq!(
            bscc_cheby_bound(100, 10, -1.0, 1.0, 1.0, h, &mut b),
            BsccStatus::InvalidArgument
        );
    }
}

#[test]
fn simulate_trial() {
    let f = CString::new("xsinx").unwrap();
    let (mut a, mut b) = (0.0, 0.0);
    let run = |s: usize, enc: i32, a: &mut f64, b: &mut f64| unsafe {
        bscc_simulate_trial(100, 8, s, f.as_ptr(), enc, 7, 0, 5, 5, a, b)
    };
    assert_eq!(
        run(0, BsccEncoder::Lagrange as i32, &mut a, &mut b),
        BsccStatus::Ok
    );
    assert!(a < b);
    let (mut a2, mut b2) = (0.0, 0.0);
    assert_eq!(
        run(0, BsccEncoder::Lagrange as i32, &mut a2, &mut b2),
        BsccStatus::Ok
    );
    assert_eq!((a, b), (a2, b2));
    assert_eq!(
        run(0, BsccEncoder::Berrut as i32, &mut a, &mut b),
        BsccStatus::Ok
    );
    assert_eq!(run(97, 0, &mut a, &mut b), BsccStatus::Infeasible);
    assert_eq!(run(0, 7, &mut a, &mut b), BsccStatus::InvalidArgument);

    let bad = CString::new("cosh").unwrap();
    let status =
        unsafe { bscc_simulate_trial(100, 8, 0, bad.as_ptr(), 0, 7, 0, 5, 5, &mut a, &mut b) };
    assert_eq!(status, BsccStatus::InvalidArgument);
    assert!(last_error().unwrap().contains("cosh"));
}

#[test]
fn status_strings_and_version() {
    let s = |c| {
        unsafe { CStr::from_ptr(bscc_status_string(c)) }
            .to_str()
            .unwrap()
    };
    assert_eq!(s(BsccStatus::Ok as i32), "ok");
    assert_eq!(s(BsccStatus::Panic as i32), "internal panic");
    assert_eq!(s(99), "unknown status");
    let v = unsafe { CStr::from_ptr(bscc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_thread_local() {
    let (status, _) = fit(&[0.0, 1.0], &[0.0, 1.0], 1);
    assert_eq!(status, BsccStatus::Infeasible);
    std::thread::spawn(|| assert!(last_error().is_none()))
        .join()
        .unwrap();
    assert!(last_error().is_some());
}

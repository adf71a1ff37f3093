use std::ffi::{CStr, CString};
use std::fs;
use std::ptr;

use itfs_ffi::*;

fn last_error() -> String {
    let p = itfs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn selection(sel: *const ItfsSelection) -> Vec<(u32, f64)> {
    (0..unsafe { itfs_selection_len(sel) })
        .map(|r| {
            let (mut f, mut s) = (0u32, 0f64);
            assert_eq!(unsafe { itfs_selection_get(sel, r, &mut f, &mut s) }, ItfsStatus::Ok);
            (f, s)
        })
        .collect()
}

// column 1 copies the class; column 0 is half informative
const ROWS: [[u32; 3]; 8] = [
    [0, 0, 0],
    [0, 1, 1],
    [1, 0, 0],
    [1, 1, 1],
    [0, 0, 0],
    [1, 1, 1],
    [1, 0, 0],
    [0, 1, 1],
];

#[test]
fn dense_select_roundtrip() {
    let flat: Vec<u32> = ROWS.iter().flatten().copied().collect();
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(itfs_dataset_from_dense(flat.as_ptr(), 8, 3, 2, &mut ds), ItfsStatus::Ok);
        let (mut n, mut m) = (0, 0);
        assert_eq!(itfs_dataset_n_features(ds, &mut n), ItfsStatus::Ok);
        assert_eq!(itfs_dataset_n_instances(ds, &mut m), ItfsStatus::Ok);
        assert_eq!((n, m), (2, 8));

        let mut sel = ptr::null_mut();
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Mim, 2, 0, 2, f64::NAN, &mut sel),
            ItfsStatus::Ok
        );
        let got = selection(sel);
        assert_eq!(got.iter().map(|g| g.0).collect::<Vec<_>>(), vec![1, 0]);
        assert!((got[0].1 - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(got[1].1.abs() < 1e-12);
        assert_eq!(
            itfs_selection_get(sel, 5, ptr::null_mut(), ptr::null_mut()),
            ItfsStatus::InvalidArgument
        );
        itfs_selection_free(sel);
        itfs_dataset_free(ds);
    }
}

#[test]
fn beta_only_for_mifs() {
    let flat: Vec<u32> = ROWS.iter().flatten().copied().collect();
    let mut ds = ptr::null_mut();
    let mut sel = ptr::null_mut();
    unsafe {
        itfs_dataset_from_dense(flat.as_ptr(), 8, 3, 2, &mut ds);
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Jmi, 1, 0, 1, 0.5, &mut sel),
            ItfsStatus::InvalidArgument
        );
        assert!(last_error().contains("beta"), "{}", last_error());
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Mifs, 2, 0, 1, 0.5, &mut sel),
            ItfsStatus::Ok
        );
        assert_eq!(itfs_selection_len(sel), 2);
        itfs_selection_free(sel);
        itfs_dataset_free(ds);
    }
}

#[test]
fn null_and_invalid_arguments() {
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(
            itfs_dataset_from_dense(ptr::null(), 1, 1, 0, &mut ds),
            ItfsStatus::NullPointer
        );
        assert_eq!(last_error(), "values is null");
        let ragged = [0u32, 1];
        assert_eq!(
            itfs_dataset_from_dense(ragged.as_ptr(), 1, 2, 5, &mut ds),
            ItfsStatus::Data
        );
        let mut n = 0;
        assert_eq!(itfs_dataset_n_features(ptr::null(), &mut n), ItfsStatus::NullPointer);

        let flat: Vec<u32> = ROWS.iter().flatten().copied().collect();
        itfs_dataset_from_dense(flat.as_ptr(), 8, 3, 2, &mut ds);
        let mut sel = ptr::null_mut();
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Cmim, 0, 0, 1, f64::NAN, &mut sel),
            ItfsStatus::InvalidArgument
        );
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Cmim, 1, 0, 1, f64::NAN, ptr::null_mut()),
            ItfsStatus::NullPointer
        );
        assert_eq!(itfs_selection_len(ptr::null()), 0);
        itfs_dataset_free(ds);
        itfs_dataset_free(ptr::null_mut());
        itfs_selection_free(ptr::null_mut());
    }
}

#[test]
fn file_loaders_and_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    fs::write(&csv, "a,b,label\n0,0,-1\n0,1,1\n1,0,-1\n1,1,1\n").unwrap();
    let svm = dir.path().join("d.svm");
    fs::write(&svm, "+1 2:1\n-1 1:1\n+1 1:1 2:1\n-1\n").unwrap();
    let c = |p: &std::path::Path| CString::new(p.to_str().unwrap()).unwrap();

    let mut ds = ptr::null_mut();
    let mut sel = ptr::null_mut();
    unsafe {
        assert_eq!(itfs_dataset_load_csv(c(&csv).as_ptr(), -1, 0, &mut ds), ItfsStatus::Ok);
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Mrmr, 1, 0, 1, f64::NAN, &mut sel),
            ItfsStatus::Ok
        );
        assert_eq!(selection(sel)[0].0, 1);
        itfs_selection_free(sel);
        itfs_dataset_free(ds);

        assert_eq!(itfs_dataset_load_libsvm(c(&svm).as_ptr(), 0, &mut ds), ItfsStatus::Ok);
        let (mut n, mut m) = (0, 0);
        itfs_dataset_n_features(ds, &mut n);
        itfs_dataset_n_instances(ds, &mut m);
        assert_eq!((n, m), (2, 4));
        assert_eq!(
            itfs_select(ds, ItfsCriterion::Icap, 2, 3, 2, f64::NAN, &mut sel),
            ItfsStatus::Ok
        );
        assert_eq!(itfs_selection_len(sel), 2);
        itfs_selection_free(sel);
        itfs_dataset_free(ds);

        let missing = c(&dir.path().join("absent.csv"));
        assert_eq!(itfs_dataset_load_csv(missing.as_ptr(), -1, 0, &mut ds), ItfsStatus::Io);
        assert_eq!(
            itfs_dataset_load_libsvm(ptr::null(), 0, &mut ds),
            ItfsStatus::NullPointer
        );
        fs::write(&csv, "0.5,1\n0.25,0\n").unwrap();
        assert_eq!(
            itfs_dataset_load_csv(c(&csv).as_ptr(), -1, 0, &mut ds),
            ItfsStatus::Data
        );
        assert_eq!(itfs_dataset_load_csv(c(&csv).as_ptr(), -1, 2, &mut ds), ItfsStatus::Ok);
        itfs_dataset_free(ds);
    }
}

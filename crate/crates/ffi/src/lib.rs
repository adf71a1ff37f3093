//! C ABI over `itfs`.
//!
//! Datasets and selections are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every call returns an
//! [`ItfsStatus`]; on failure [`itfs_last_error_message`] describes the
//! most recent error raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use itfs::cli::io::{load_csv, load_libsvm};
use itfs::cli::{Binning, CliError};
use itfs::{
    columnar_transform, select, sparse_columnar_transform, CriterionKind, Engine, Error, RowDataset, SelectConfig,
    SelectionResult, SparseDataset,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItfsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Data = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItfsCriterion {
    Mim = 0,
    Mifs = 1,
    Jmi = 2,
    Cmi = 3,
    Mrmr = 4,
    Cmim = 5,
    If = 6,
    Icap = 7,
}

impl From<ItfsCriterion> for CriterionKind {
    fn from(c: ItfsCriterion) -> Self {
        match c {
            ItfsCriterion::Mim => CriterionKind::Mim,
            ItfsCriterion::Mifs => CriterionKind::Mifs,
            ItfsCriterion::Jmi => CriterionKind::Jmi,
            ItfsCriterion::Cmi => CriterionKind::Cmi,
            ItfsCriterion::Mrmr => CriterionKind::Mrmr,
            ItfsCriterion::Cmim => CriterionKind::Cmim,
            ItfsCriterion::If => CriterionKind::If,
            ItfsCriterion::Icap => CriterionKind::Icap,
        }
    }
}

enum Data {
    Dense(RowDataset),
    Sparse(SparseDataset),
}

/// A loaded dataset.
pub struct ItfsDataset {
    data: Data,
}

/// The ordered output of one selection run.
pub struct ItfsSelection {
    result: SelectionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ItfsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownCriterion(_)
            | Error::FixedParameter { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidPartitionCount => ItfsStatus::InvalidArgument,
            Error::Pool(_) => ItfsStatus::Internal,
            _ => ItfsStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Config(_) => ItfsStatus::InvalidArgument,
            CliError::Io(_) => ItfsStatus::Io,
            CliError::Data(_) => ItfsStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ItfsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(ItfsStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ItfsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ItfsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ItfsStatus::Internal
        }
    }
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn binning(bins: usize) -> Binning {
    if bins == 0 {
        Binning::None
    } else {
        Binning::EqualWidth(bins)
    }
}

/// Copies a row-major `n_rows x n_cols` matrix of discrete symbols.
///
/// # Safety
/// `values` must point to `n_rows * n_cols` readable `u32`s and `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_from_dense(
    values: *const u32,
    n_rows: usize,
    n_cols: usize,
    class_index: usize,
    out: *mut *mut ItfsDataset,
) -> ItfsStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| invalid("matrix size overflows"))?;
        let flat = std::slice::from_raw_parts(values, len).to_vec();
        let data = RowDataset::from_flat(flat, n_cols, class_index)?;
        emit(
            out,
            ItfsDataset {
                data: Data::Dense(data),
            },
        )
    })
}

/// Loads a CSV file. A negative `label_position` selects the last column;
/// `bins == 0` disables discretization.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_load_csv(
    path: *const c_char,
    label_position: isize,
    bins: usize,
    out: *mut *mut ItfsDataset,
) -> ItfsStatus {
    guard(|| {
        let path = path_arg(path)?;
        let label = usize::try_from(label_position).ok();
        let data = load_csv(&path, label, binning(bins))?;
        emit(
            out,
            ItfsDataset {
                data: Data::Dense(data),
            },
        )
    })
}

/// Loads a LibSVM file into the sparse layout; `bins == 0` disables
/// discretization.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_load_libsvm(
    path: *const c_char,
    bins: usize,
    out: *mut *mut ItfsDataset,
) -> ItfsStatus {
    guard(|| {
        let path = path_arg(path)?;
        let data = load_libsvm(&path, binning(bins))?;
        emit(
            out,
            ItfsDataset {
                data: Data::Sparse(data),
            },
        )
    })
}

/// # Safety
/// `dataset` must come from an `itfs_dataset_*` constructor and not be
/// freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_free(dataset: *mut ItfsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

unsafe fn dataset_ref<'a>(dataset: *const ItfsDataset) -> Result<&'a ItfsDataset, Failure> {
    dataset.as_ref().ok_or_else(|| null("dataset"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

/// Number of input features, excluding the class.
///
/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_n_features(dataset: *const ItfsDataset, out: *mut usize) -> ItfsStatus {
    guard(|| {
        let n = match &dataset_ref(dataset)?.data {
            Data::Dense(d) => d.n(),
            Data::Sparse(s) => s.n,
        };
        write_out(out, n)
    })
}

/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_dataset_n_instances(dataset: *const ItfsDataset, out: *mut usize) -> ItfsStatus {
    guard(|| {
        let m = match &dataset_ref(dataset)?.data {
            Data::Dense(d) => d.m(),
            Data::Sparse(s) => s.m(),
        };
        write_out(out, m)
    })
}

/// Runs greedy selection of up to `ns` features. `npart == 0` and
/// `workers == 0` pick defaults; a NaN `beta` keeps the criterion's own
/// weight (only MIFS accepts another value).
///
/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn itfs_select(
    dataset: *const ItfsDataset,
    criterion: ItfsCriterion,
    ns: usize,
    npart: usize,
    workers: usize,
    beta: f64,
    out: *mut *mut ItfsSelection,
) -> ItfsStatus {
    guard(|| {
        let ds = dataset_ref(dataset)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let workers = if workers == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            workers
        };
        let npart = if npart == 0 { 2 * workers } else { npart };
        let engine = Engine::new(workers)?;
        let store = match &ds.data {
            Data::Dense(d) => columnar_transform(&engine, d, 2 * workers, npart)?,
            Data::Sparse(s) => sparse_columnar_transform(&engine, s, 2 * workers, npart)?,
        };
        let mut config = SelectConfig::new(criterion.into(), ns);
        config.beta = (!beta.is_nan()).then_some(beta);
        let report = select(&engine, &store, &config)?;
        emit(out, ItfsSelection { result: report.result })
    })
}

/// Number of selected features; zero for a null handle.
///
/// # Safety
/// `selection` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn itfs_selection_len(selection: *const ItfsSelection) -> usize {
    selection.as_ref().map_or(0, |s| s.result.len())
}

/// Feature id and score at `rank` (0-based). Either output may be null.
///
/// # Safety
/// `selection` must be a live handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn itfs_selection_get(
    selection: *const ItfsSelection,
    rank: usize,
    feature: *mut u32,
    score: *mut f64,
) -> ItfsStatus {
    guard(|| {
        let sel = selection.as_ref().ok_or_else(|| null("selection"))?;
        let s = sel
            .result
            .selected
            .get(rank)
            .ok_or_else(|| invalid(format!("rank {rank} out of range for {} selections", sel.result.len())))?;
        if !feature.is_null() {
            *feature = s.feature;
        }
        if !score.is_null() {
            *score = s.score;
        }
        Ok(())
    })
}

/// # Safety
/// `selection` must come from [`itfs_select`] and not be freed twice.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn itfs_selection_free(selection: *mut ItfsSelection) {
    if !selection.is_null() {
        drop(Box::from_raw(selection));
    }
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn itfs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

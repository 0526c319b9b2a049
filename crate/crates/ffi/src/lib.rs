//! C ABI for scatter-tex.
//!
//! Every fallible call returns an [`StStatus`]; on failure the message is
//! kept per thread and read back with [`st_last_error`]. Objects cross the
//! boundary as opaque pointers created by `*_new` and released by `*_free`.
//! Output buffers are caller-owned: pass the capacity, get the length back.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scatter_tex::classifier::{fit, ClassifierModel, FeatureMatrix};
use scatter_tex::filterbank::{littlewood_paley, FilterBank, FilterBankParams};
use scatter_tex::scattering::{bank_for_image, path_count, scatter};
use scatter_tex::{convert, ColorImage, ColorSpace, Error, ImagePlane};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Geometry = 3,
    Conversion = 4,
    Unsupported = 5,
    Split = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Filter bank on a fixed grid.
pub struct StFilterBank(FilterBank);

/// Fitted per-class PCA classifier.
pub struct StClassifier(ClassifierModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> StStatus {
    match e {
        Error::Context { source, .. } => status_of(source),
        Error::Geometry(_) => StStatus::Geometry,
        Error::Conversion(_) => StStatus::Conversion,
        Error::Unsupported(_) => StStatus::Unsupported,
        Error::Split(_) => StStatus::Split,
        Error::Io { .. } | Error::Decode { .. } | Error::Format { .. } | Error::Dataset { .. } => {
            StStatus::Io
        }
        _ => StStatus::InvalidArgument,
    }
}

struct Fail(StStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(StStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            StStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out(values: &[f64], out: *mut f64, capacity: usize, written: *mut usize) -> Result<(), Fail> {
    if !written.is_null() {
        *written = values.len();
    }
    if values.len() > capacity {
        return Err(Fail(
            StStatus::BufferTooSmall,
            format!("need {} values, buffer holds {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

unsafe fn parse_space(tag: *const c_char) -> Result<ColorSpace, Fail> {
    if tag.is_null() {
        return Err(null("tag"));
    }
    let s = CStr::from_ptr(tag)
        .to_str()
        .map_err(|_| Fail(StStatus::InvalidArgument, "tag is not UTF-8".into()))?;
    s.parse::<ColorSpace>()
        .map_err(|e| Fail(StStatus::InvalidArgument, e.to_string()))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn st_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn st_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Number of planes produced for colour space `tag` (e.g. "opponent").
///
/// # Safety
/// `tag` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_channel_count(tag: *const c_char, out: *mut usize) -> StStatus {
    guard(|| {
        let space = parse_space(tag)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = space.channel_count();
        Ok(())
    })
}

/// Converts an interleaved RGB image (`width * height * 3` samples in
/// [0, 255]) to `tag`. Output is planar: channel `c` occupies
/// `out[c * width * height ..]`.
///
/// # Safety
/// `rgb` must hold `width * height * 3` doubles, `out` `capacity` doubles,
/// `tag` must be NUL-terminated; `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn st_convert(
    rgb: *const f64,
    width: usize,
    height: usize,
    tag: *const c_char,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StStatus {
    guard(|| {
        let space = parse_space(tag)?;
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Fail(StStatus::InvalidArgument, "image size overflows".into()))?;
        let src = slice(rgb, n, "rgb")?;
        let img = ColorImage::from_interleaved_rgb(width, height, src)?;
        let converted = convert(&img, space)?;
        let flat: Vec<f64> = converted
            .planes()
            .iter()
            .flat_map(|p| p.samples().iter().copied())
            .collect();
        write_out(&flat, out, capacity, written)
    })
}

/// Number of scattering paths for `scales`, `angles` and `max_order` <= 2.
#[no_mangle]
pub extern "C" fn st_path_count(scales: usize, angles: usize, max_order: usize) -> usize {
    path_count(scales, angles, max_order)
}

/// Filter bank on an explicit `width x height` grid.
///
/// # Safety
/// `out` must be writable. Release the handle with [`st_filter_bank_free`].
#[no_mangle]
pub unsafe extern "C" fn st_filter_bank_new(
    scales: usize,
    angles: usize,
    width: usize,
    height: usize,
    out: *mut *mut StFilterBank,
) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let bank = FilterBank::new(FilterBankParams::new(scales, angles, width, height))?;
        *out = Box::into_raw(Box::new(StFilterBank(bank)));
        Ok(())
    })
}

/// Filter bank sized for scattering images of `width x height`.
///
/// # Safety
/// `out` must be writable. Release the handle with [`st_filter_bank_free`].
#[no_mangle]
pub unsafe extern "C" fn st_filter_bank_for_image(
    width: usize,
    height: usize,
    scales: usize,
    angles: usize,
    out: *mut *mut StFilterBank,
) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let bank = bank_for_image(width, height, scales, angles)?;
        *out = Box::into_raw(Box::new(StFilterBank(bank)));
        Ok(())
    })
}

/// # Safety
/// `bank` must come from a `st_filter_bank_*` constructor, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn st_filter_bank_free(bank: *mut StFilterBank) {
    if !bank.is_null() {
        drop(Box::from_raw(bank));
    }
}

/// Minimum and maximum of the Littlewood-Paley sum over the bank's grid.
///
/// # Safety
/// `bank` must be a live handle; `min` and `max` writable.
#[no_mangle]
pub unsafe extern "C" fn st_filter_bank_littlewood_paley(
    bank: *const StFilterBank,
    min: *mut f64,
    max: *mut f64,
) -> StStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        if min.is_null() || max.is_null() {
            return Err(null("min/max"));
        }
        let (lo, hi) = littlewood_paley(&bank.0);
        *min = lo;
        *max = hi;
        Ok(())
    })
}

/// Scattering coefficients of one `width x height` plane (row-major).
///
/// # Safety
/// `bank` must be a live handle, `samples` must hold `width * height`
/// doubles, `out` `capacity` doubles; `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn st_scatter_plane(
    bank: *const StFilterBank,
    samples: *const f64,
    width: usize,
    height: usize,
    max_order: usize,
    oversampling: usize,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> StStatus {
    guard(|| {
        let bank = bank.as_ref().ok_or_else(|| null("bank"))?;
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Fail(StStatus::InvalidArgument, "image size overflows".into()))?;
        let plane = ImagePlane::new(width, height, slice(samples, n, "samples")?.to_vec())?;
        let features = scatter(&plane, &bank.0, max_order, oversampling)?;
        write_out(&features.values, out, capacity, written)
    })
}

/// Fits a classifier on `n` column vectors of length `dims` stored
/// contiguously (`features[i * dims ..]` is sample `i`), with class labels
/// in `0..n_classes` and `d` principal directions per class.
///
/// # Safety
/// `features` must hold `n * dims` doubles, `labels` `n` values, `out` must
/// be writable. Release the handle with [`st_classifier_free`].
#[no_mangle]
pub unsafe extern "C" fn st_classifier_fit(
    features: *const f64,
    dims: usize,
    n: usize,
    labels: *const u32,
    n_classes: usize,
    d: usize,
    out: *mut *mut StClassifier,
) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let total = dims
            .checked_mul(n)
            .ok_or_else(|| Fail(StStatus::InvalidArgument, "feature size overflows".into()))?;
        let data = slice(features, total, "features")?;
        let labels: Vec<usize> = slice(labels, n, "labels")?.iter().map(|&l| l as usize).collect();
        let columns = if dims == 0 {
            vec![Vec::new(); n]
        } else {
            data.chunks(dims).map(<[f64]>::to_vec).collect()
        };
        let classes = (0..n_classes).map(|c| c.to_string()).collect();
        let fm = FeatureMatrix::new(columns, labels, classes)?;
        *out = Box::into_raw(Box::new(StClassifier(fit(&fm, d)?)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`st_classifier_fit`], or be NULL.
#[no_mangle]
pub unsafe extern "C" fn st_classifier_free(model: *mut StClassifier) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Predicted class of one feature vector of length `dims`.
///
/// # Safety
/// `model` must be a live handle, `x` must hold `dims` doubles and `label`
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn st_classifier_predict(
    model: *const StClassifier,
    x: *const f64,
    dims: usize,
    label: *mut u32,
) -> StStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if label.is_null() {
            return Err(null("label"));
        }
        let c = model.0.predict(slice(x, dims, "x")?)?;
        *label = c as u32;
        Ok(())
    })
}

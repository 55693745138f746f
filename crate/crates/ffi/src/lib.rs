//! C ABI over `flors-core`.
//!
//! Sessions are opaque handles. Every call returns a [`FlorsStatus`]; on
//! failure [`flors_last_error_message`] describes the error for the calling
//! thread. Strings handed out by the library must be released with
//! [`flors_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use flors_core::features::{read_representations, write_representations};
use flors_core::{Corpus, Error, LinearModel, Mode, Sentence, TaggerSession};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlorsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    Session = 6,
    Incompatible = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlorsMode {
    Static = 0,
    Batch = 1,
    Online = 2,
}

impl From<FlorsMode> for Mode {
    fn from(m: FlorsMode) -> Mode {
        match m {
            FlorsMode::Static => Mode::Static,
            FlorsMode::Batch => Mode::Batch,
            FlorsMode::Online => Mode::Online,
        }
    }
}

/// Opaque tagging session.
pub struct FlorsSession {
    inner: TaggerSession,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(FlorsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) | Error::File { .. } | Error::Csv(_) => FlorsStatus::Io,
            Error::Parse { .. } | Error::NoSentences => FlorsStatus::Parse,
            Error::InvalidArgument(_) => FlorsStatus::InvalidArgument,
            Error::Session(_) => FlorsStatus::Session,
            Error::Incompatible(_) | Error::DimensionMismatch { .. } => FlorsStatus::Incompatible,
            _ => FlorsStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FlorsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FlorsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FlorsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FlorsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FlorsStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn session_arg<'a>(p: *mut FlorsSession) -> Result<&'a mut FlorsSession, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(FlorsStatus::NullPointer, "session is null".into()))
}

fn out_arg<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(FlorsStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(FlorsStatus::Internal, "string contains a nul byte".into()))
}

fn open(path: &str) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::from(Error::File { path: path.into(), source: e }))
}

/// Opens a session from a model file and a store file.
///
/// # Safety
/// Path arguments must be valid NUL-terminated strings; `out` must be
/// writable. The handle is released with [`flors_session_free`].
#[no_mangle]
pub unsafe extern "C" fn flors_session_open(
    model_path: *const c_char,
    store_path: *const c_char,
    mode: FlorsMode,
    out: *mut *mut FlorsSession,
) -> FlorsStatus {
    guard(|| {
        out_arg(out)?;
        *out = ptr::null_mut();
        let model_path = str_arg(model_path, "model_path")?;
        let store_path = str_arg(store_path, "store_path")?;
        let model = LinearModel::read(open(model_path)?)?;
        let (lexicons, store) = read_representations(open(store_path)?)?;
        let inner = TaggerSession::new(Arc::new(model), Arc::new(lexicons), Arc::new(store), mode.into())?
            .with_log_policy(flors_core::LogPolicy::Disabled);
        *out = Box::into_raw(Box::new(FlorsSession { inner }));
        Ok(())
    })
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `session` must come from [`flors_session_open`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn flors_session_free(session: *mut FlorsSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Tags one whitespace-separated sentence. `*out_tags` receives the tags
/// joined by tabs.
///
/// # Safety
/// `session` must be a live handle, `sentence` a NUL-terminated string and
/// `out_tags` writable.
#[no_mangle]
pub unsafe extern "C" fn flors_tag(
    session: *mut FlorsSession,
    sentence: *const c_char,
    out_tags: *mut *mut c_char,
) -> FlorsStatus {
    guard(|| {
        out_arg(out_tags)?;
        *out_tags = ptr::null_mut();
        let session = session_arg(session)?;
        let sentence = Sentence::from_text(str_arg(sentence, "sentence")?)?;
        let tags = session.inner.tag_sentence(&sentence)?;
        *out_tags = to_c_string(tags.join("\t"))?;
        Ok(())
    })
}

/// Accumulates the whole test set before tagging (batch mode only).
/// Sentences are separated by newlines, tokens by whitespace.
///
/// # Safety
/// `session` must be a live handle and `text` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn flors_prepare_batch(
    session: *mut FlorsSession,
    text: *const c_char,
) -> FlorsStatus {
    guard(|| {
        let session = session_arg(session)?;
        let corpus = flors_core::corpus::read_unlabeled(str_arg(text, "text")?.as_bytes())
            .or_else(|e| match e {
                Error::NoSentences => Corpus::new(Vec::new(), false),
                e => Err(e),
            })?;
        session.inner.prepare_batch(&corpus)?;
        Ok(())
    })
}

/// Hex SHA-256 digest of the session's current count store.
///
/// # Safety
/// `session` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flors_store_digest(
    session: *mut FlorsSession,
    out: *mut *mut c_char,
) -> FlorsStatus {
    guard(|| {
        out_arg(out)?;
        *out = ptr::null_mut();
        let session = session_arg(session)?;
        *out = to_c_string(session.inner.store().digest())?;
        Ok(())
    })
}

/// Writes the session's current store (with its lexicons) to `path`.
///
/// # Safety
/// `session` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn flors_save_store(
    session: *mut FlorsSession,
    path: *const c_char,
) -> FlorsStatus {
    guard(|| {
        let session = session_arg(session)?;
        let path = str_arg(path, "path")?;
        let file = File::create(path)
            .map_err(|e| Failure::from(Error::File { path: Path::new(path).into(), source: e }))?;
        let mut w = BufWriter::new(file);
        write_representations(&mut w, session.inner.lexicons(), session.inner.store())?;
        w.flush().map_err(|e| Failure::from(Error::Io(e)))?;
        Ok(())
    })
}

/// Number of tokens tagged so far; 0 for a null handle.
///
/// # Safety
/// `session` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flors_tokens_tagged(session: *const FlorsSession) -> u64 {
    session.as_ref().map_or(0, |s| s.inner.tokens_tagged())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn flors_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn flors_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

use std::ffi::{CStr, CString};
use std::fs::File;
use std::os::raw::c_char;
use std::path::Path;
use std::ptr;

use flors_core::features::{build_representations, write_representations, RepresentationConfig};
use flors_core::pipeline::train_model;
use flors_core::synth::{generate, SyntheticShiftConfig};
use flors_core::TrainConfig;
use flors_ffi::*;

struct Files {
    _dir: tempfile::TempDir,
    model: CString,
    store: CString,
    sentences: Vec<String>,
    dir: std::path::PathBuf,
}

fn setup() -> Files {
    let c = generate(&SyntheticShiftConfig {
        tags: 5,
        source_vocab: 120,
        target_vocab: 120,
        source_sentences: 60,
        target_sentences: 15,
        seed: 9,
        ..SyntheticShiftConfig::default()
    })
    .unwrap();
    let rep = RepresentationConfig {
        n: 30,
        suffix_min_count: 3,
    };
    let (lex, store) = build_representations(&[&c.source], rep).unwrap();
    let cfg = TrainConfig {
        max_epochs: 3,
        ..TrainConfig::default()
    };
    let (model, _) = train_model(&c.source, &lex, &store, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (mp, sp) = (dir.path().join("model.txt"), dir.path().join("store.txt"));
    model.write(File::create(&mp).unwrap()).unwrap();
    write_representations(File::create(&sp).unwrap(), &lex, &store).unwrap();
    let cs = |p: &Path| CString::new(p.to_str().unwrap()).unwrap();
    Files {
        model: cs(&mp),
        store: cs(&sp),
        sentences: c
            .target
            .sentences()
            .iter()
            .map(|s| s.surfaces().collect::<Vec<_>>().join(" "))
            .collect(),
        dir: dir.path().to_path_buf(),
        _dir: dir,
    }
}

fn open(f: &Files, mode: FlorsMode) -> *mut FlorsSession {
    let mut s = ptr::null_mut();
    let status = unsafe { flors_session_open(f.model.as_ptr(), f.store.as_ptr(), mode, &mut s) };
    assert_eq!(status, FlorsStatus::Ok);
    assert!(!s.is_null());
    s
}

fn take(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { flors_string_free(p) };
    s
}

fn tag(s: *mut FlorsSession, sentence: &str) -> Result<String, FlorsStatus> {
    let c = CString::new(sentence).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { flors_tag(s, c.as_ptr(), &mut out) } {
        FlorsStatus::Ok => Ok(take(out)),
        e => Err(e),
    }
}

fn digest(s: *mut FlorsSession) -> String {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { flors_store_digest(s, &mut out) }, FlorsStatus::Ok);
    take(out)
}

fn last_error() -> String {
    let p = flors_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn static_session_tags_without_changing_store() {
    let f = setup();
    let s = open(&f, FlorsMode::Static);
    let before = digest(s);
    let tags = tag(s, &f.sentences[0]).unwrap();
    assert_eq!(tags.split('\t').count(), f.sentences[0].split(' ').count());
    for sentence in &f.sentences {
        tag(s, sentence).unwrap();
    }
    assert_eq!(tag(s, &f.sentences[0]).unwrap(), tags);
    assert_eq!(digest(s), before);
    assert!(unsafe { flors_tokens_tagged(s) } > 0);
    unsafe { flors_session_free(s) };
}

#[test]
fn online_and_batch_stores_agree() {
    let f = setup();
    let online = open(&f, FlorsMode::Online);
    let batch = open(&f, FlorsMode::Batch);
    let start = digest(online);
    let text = CString::new(f.sentences.join("\n")).unwrap();
    assert_eq!(unsafe { flors_prepare_batch(batch, text.as_ptr()) }, FlorsStatus::Ok);
    for sentence in &f.sentences {
        tag(online, sentence).unwrap();
        tag(batch, sentence).unwrap();
    }
    assert_ne!(digest(online), start);
    assert_eq!(digest(online), digest(batch));

    let path = CString::new(f.dir.join("adapted.txt").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { flors_save_store(online, path.as_ptr()) }, FlorsStatus::Ok);
    let reopened = {
        let mut s = ptr::null_mut();
        let st = unsafe { flors_session_open(f.model.as_ptr(), path.as_ptr(), FlorsMode::Static, &mut s) };
        assert_eq!(st, FlorsStatus::Ok);
        s
    };
    assert_eq!(digest(reopened), digest(batch));
    unsafe {
        flors_session_free(online);
        flors_session_free(batch);
        flors_session_free(reopened);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let f = setup();
    let mut s = ptr::null_mut();
    let missing = CString::new("/nonexistent/model.txt").unwrap();
    let st = unsafe { flors_session_open(missing.as_ptr(), f.store.as_ptr(), FlorsMode::Static, &mut s) };
    assert_eq!(st, FlorsStatus::Io);
    assert!(s.is_null());
    assert!(last_error().contains("nonexistent"));

    let st = unsafe { flors_session_open(ptr::null(), f.store.as_ptr(), FlorsMode::Static, &mut s) };
    assert_eq!(st, FlorsStatus::NullPointer);

    let batch = open(&f, FlorsMode::Batch);
    assert_eq!(tag(batch, "a b"), Err(FlorsStatus::Session));
    assert!(last_error().contains("prepare_batch"));

    let fixed = open(&f, FlorsMode::Static);
    let empty = tag(fixed, "  ").unwrap_err();
    assert!(matches!(empty, FlorsStatus::InvalidArgument | FlorsStatus::Parse), "{empty:?}");
    let text = CString::new("a b").unwrap();
    assert_eq!(unsafe { flors_prepare_batch(fixed, text.as_ptr()) }, FlorsStatus::Session);
    let bad = [0xffu8, 0];
    let mut out = ptr::null_mut();
    let st = unsafe { flors_tag(fixed, bad.as_ptr() as *const c_char, &mut out) };
    assert_eq!(st, FlorsStatus::InvalidUtf8);
    assert!(out.is_null());

    assert_eq!(tag(ptr::null_mut(), "a"), Err(FlorsStatus::NullPointer));
    unsafe {
        flors_session_free(batch);
        flors_session_free(fixed);
        flors_session_free(ptr::null_mut());
        flors_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { flors_tokens_tagged(ptr::null()) }, 0);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/flors.h")).unwrap();
    for name in [
        "flors_session_open",
        "flors_session_free",
        "flors_tag",
        "flors_prepare_batch",
        "flors_store_digest",
        "flors_save_store",
        "flors_string_free",
        "flors_last_error_message",
        "FLORS_STATUS_OK",
        "typedef struct FlorsSession FlorsSession",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

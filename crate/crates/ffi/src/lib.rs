//! C ABI over `ara-nav`.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`AraStatus`]; on failure a message
//!   is available from [`ara_last_error_message`] on the same thread.
//! * Objects are opaque handles created by `*_parse`/`*_generate`/`*_run`
//!   functions and released with the matching `*_free`.
//! * Strings returned through `out` parameters are owned by the caller and
//!   must be released with [`ara_string_free`].
//! * Input strings are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ara_nav::config::RunConfig;
use ara_nav::generate::{generate_episodes, GenerateOptions};
use ara_nav::metrics::{instruction_similarity, navigation_error, HashEmbedder, MetricsReport};
use ara_nav::runner::{run_benchmark, RunContext, RunError, RunOutput};
use ara_nav::translator::{desk_translate, render_prompt, PrincipleSet, PromptAssets, PromptTemplate};
use ara_nav::types::{parse_episode_file, write_results};
use ara_nav::{Episode, Goal, Instruction, Pose};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AraStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Episode or results document failed schema or invariant checks.
    FormatError = 3,
    ConfigError = 4,
    /// An argument was out of range (empty text, unknown split, ...).
    InvalidArgument = 5,
    BackendError = 6,
    IoError = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

/// Parsed or generated episode set.
pub struct AraEpisodes {
    inner: Vec<Episode>,
}

/// Outcome of a benchmark run.
pub struct AraRunReport {
    inner: RunOutput,
}

/// Metrics over one split. `bertscore_mean` is meaningful only when
/// `has_bertscore` is non-zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AraMetrics {
    pub n_episodes: usize,
    pub successes: usize,
    pub sr: f64,
    pub ne_mean: f64,
    pub bertscore_mean: f64,
    pub has_bertscore: u8,
}

/// Split selectors for [`ara_run_report_metrics`].
pub const ARA_SPLIT_LOW: u32 = 0;
pub const ARA_SPLIT_HIGH: u32 = 1;
pub const ARA_SPLIT_ALL: u32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("NULs replaced")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(AraStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: AraStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let status = match &e {
            RunError::Config(_) => AraStatus::ConfigError,
            RunError::Io { .. } => AraStatus::IoError,
            RunError::Backend(_) => AraStatus::BackendError,
            RunError::Format(_) => AraStatus::FormatError,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f` behind the panic boundary and records any failure message.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> AraStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AraStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AraStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(AraStatus::NullArgument, format!("{what} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(AraStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(out: *mut T, what: &str) -> FfiResult<&'a mut T> {
    out.as_mut()
        .map_or_else(|| fail(AraStatus::NullArgument, format!("{what} is NULL")), Ok)
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs replaced").into_raw()
}

fn principles(spec: *const c_char) -> FfiResult<PrincipleSet> {
    if spec.is_null() {
        return Ok(PrincipleSet::all());
    }
    let s = unsafe { read_str(spec, "principles") }?;
    PrincipleSet::parse(s).or_else(|e| fail(AraStatus::InvalidArgument, e.to_string()))
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ara_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ara_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an episode document (`{"episodes": [...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ara_episodes_parse(json: *const c_char, out: *mut *mut AraEpisodes) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = read_str(json, "json")?;
        let inner = parse_episode_file(text.as_bytes()).or_else(|e| fail(AraStatus::FormatError, e.to_string()))?;
        *out = Box::into_raw(Box::new(AraEpisodes { inner }));
        Ok(())
    })
}

/// Generates `n` seeded synthetic episodes with default kinematics.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ara_episodes_generate(n: usize, seed: u64, out: *mut *mut AraEpisodes) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inner = generate_episodes(&GenerateOptions {
            n,
            seed,
            kinematics: Default::default(),
        });
        *out = Box::into_raw(Box::new(AraEpisodes { inner }));
        Ok(())
    })
}

/// Number of episodes in the set; 0 for NULL.
///
/// # Safety
/// `episodes` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ara_episodes_len(episodes: *const AraEpisodes) -> usize {
    episodes.as_ref().map_or(0, |e| e.inner.len())
}

/// # Safety
/// `episodes` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ara_episodes_free(episodes: *mut AraEpisodes) {
    if !episodes.is_null() {
        drop(Box::from_raw(episodes));
    }
}

/// Rewrites `text` with the offline translator. `principles` is a set spec
/// (`"all"`, `"none"`, comma-separated ids); NULL means all.
///
/// # Safety
/// String arguments must be NUL-terminated or NULL where allowed; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ara_desk_translate(
    text: *const c_char,
    principles_spec: *const c_char,
    out: *mut *mut c_char,
) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let set = principles(principles_spec)?;
        let text = read_str(text, "text")?;
        let original = Instruction::original(text).or_else(|e| fail(AraStatus::InvalidArgument, e.to_string()))?;
        *out = to_c_string(desk_translate(&original, &set).translated.text().to_string());
        Ok(())
    })
}

/// Renders the translator prompt for a principle set with the bundled
/// wording.
///
/// # Safety
/// `principles_spec` must be NUL-terminated or NULL; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ara_render_prompt(principles_spec: *const c_char, out: *mut *mut c_char) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let set = principles(principles_spec)?;
        *out = to_c_string(render_prompt(&PromptTemplate::from_assets(&PromptAssets::defaults(), &set)));
        Ok(())
    })
}

/// Similarity F1 between two instructions under the default hash embedder.
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ara_bertscore_f1(
    original: *const c_char,
    translated: *const c_char,
    out: *mut f64,
) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let a = read_str(original, "original")?;
        let b = read_str(translated, "translated")?;
        *out = instruction_similarity(a, b, &HashEmbedder::default())
            .or_else(|e| fail(AraStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Euclidean distance from (`fx`, `fy`) to the goal (`gx`, `gy`).
#[no_mangle]
pub extern "C" fn ara_navigation_error(fx: f64, fy: f64, gx: f64, gy: f64) -> f64 {
    navigation_error(&Pose::new(fx, fy, 0.0), &Goal { x: gx, y: gy })
}

/// Runs the benchmark offline. `config_json` is a run configuration document
/// layered over the defaults (NULL for defaults). Configurations that need a
/// completion backend build it from the document as the CLI does.
///
/// # Safety
/// `episodes` must be a live handle; `config_json` NUL-terminated or NULL;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ara_run_benchmark(
    episodes: *const AraEpisodes,
    config_json: *const c_char,
    out: *mut *mut AraRunReport,
) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let Some(episodes) = episodes.as_ref() else {
            return fail(AraStatus::NullArgument, "episodes is NULL");
        };
        let mut value = RunConfig::default().to_value();
        if !config_json.is_null() {
            let text = read_str(config_json, "config_json")?;
            let overlay = serde_json::from_str(text).or_else(|e| fail(AraStatus::ConfigError, e.to_string()))?;
            ara_nav::config::merge(&mut value, overlay);
        }
        let config = RunConfig::from_value(value).or_else(|e| fail(AraStatus::ConfigError, e.to_string()))?;
        let ctx = RunContext::from_config(&config)?;
        let inner = run_benchmark(&episodes.inner, &config, &ctx)?;
        *out = Box::into_raw(Box::new(AraRunReport { inner }));
        Ok(())
    })
}

/// Metrics for one split (`ARA_SPLIT_LOW`, `ARA_SPLIT_HIGH`, `ARA_SPLIT_ALL`).
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ara_run_report_metrics(
    report: *const AraRunReport,
    split: u32,
    out: *mut AraMetrics,
) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let Some(report) = report.as_ref() else {
            return fail(AraStatus::NullArgument, "report is NULL");
        };
        let Some(m): Option<&MetricsReport> = report.inner.reports.get(split as usize) else {
            return fail(AraStatus::InvalidArgument, format!("unknown split {split}"));
        };
        *out = AraMetrics {
            n_episodes: m.n_episodes,
            successes: m.successes,
            sr: m.sr,
            ne_mean: m.ne_mean,
            bertscore_mean: m.bertscore_mean.unwrap_or(0.0),
            has_bertscore: u8::from(m.bertscore_mean.is_some()),
        };
        Ok(())
    })
}

/// Number of aborted episodes (excluded from the metrics).
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ara_run_report_aborted_count(report: *const AraRunReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.aborted.len())
}

/// The per-episode results as JSON lines.
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ara_run_report_results_jsonl(report: *const AraRunReport, out: *mut *mut c_char) -> AraStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let Some(report) = report.as_ref() else {
            return fail(AraStatus::NullArgument, "report is NULL");
        };
        let bytes = write_results(&report.inner.results);
        *out = to_c_string(String::from_utf8(bytes).expect("results are UTF-8 JSON"));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ara_run_report_free(report: *mut AraRunReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

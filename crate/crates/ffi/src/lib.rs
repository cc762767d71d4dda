//! C ABI for codeco grammars and parsing sessions.
//!
//! Grammars and sessions are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns a `CodecoStatus`;
//! on failure `codeco_last_error` describes the problem. Strings returned
//! through out-parameters are owned by the caller and released with
//! `codeco_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use codeco::notation::{load_grammar, LoadError};
use codeco::parser::{antecedent_json, ParseState};
use codeco::Grammar;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidGrammar = 4,
    UnknownStart = 5,
    EmptyHistory = 6,
    Panic = 7,
}

/// A loaded and validated grammar.
pub struct CodecoGrammar {
    grammar: Arc<Grammar>,
}

/// A parsing session: the states after each accepted token.
pub struct CodecoSession {
    states: Vec<ParseState>,
}

impl CodecoSession {
    fn current(&self) -> &ParseState {
        self.states.last().expect("a session always holds its initial state")
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(CodecoStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CodecoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CodecoStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            CodecoStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CodecoStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CodecoStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CodecoStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(CodecoStatus::NullArgument, "output pointer is null".into()))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes were replaced").into_raw()
}

fn load(source: &str) -> Result<CodecoGrammar, Fail> {
    let g = load_grammar(source).map_err(|e| {
        let lines: Vec<String> = match e {
            LoadError::Syntax(d) => d.iter().map(|d| d.to_string()).collect(),
            LoadError::Invalid(d) => d.iter().map(|d| d.to_string()).collect(),
        };
        Fail(CodecoStatus::InvalidGrammar, lines.join("\n"))
    })?;
    Ok(CodecoGrammar { grammar: Arc::new(g) })
}

/// Returns the message of the last failed call on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn codeco_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates grammar source text.
///
/// # Safety
/// `source` must be a nul-terminated string and `out_grammar` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn codeco_grammar_load(source: *const c_char, out_grammar: *mut *mut CodecoGrammar) -> CodecoStatus {
    guard(|| {
        let slot = out(out_grammar)?;
        *slot = ptr::null_mut();
        let g = load(text(source, "source")?)?;
        *slot = Box::into_raw(Box::new(g));
        Ok(())
    })
}

/// Reads, parses and validates a grammar file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out_grammar` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn codeco_grammar_load_file(path: *const c_char, out_grammar: *mut *mut CodecoGrammar) -> CodecoStatus {
    guard(|| {
        let slot = out(out_grammar)?;
        *slot = ptr::null_mut();
        let path = text(path, "path")?;
        let source = std::fs::read_to_string(path).map_err(|e| Fail(CodecoStatus::Io, format!("{path}: {e}")))?;
        *slot = Box::into_raw(Box::new(load(&source)?));
        Ok(())
    })
}

/// Releases a grammar. Sessions created from it stay usable.
///
/// # Safety
/// `grammar` must come from `codeco_grammar_load*` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn codeco_grammar_free(grammar: *mut CodecoGrammar) {
    if !grammar.is_null() {
        drop(Box::from_raw(grammar));
    }
}

/// Number of rules, syntactic and lexical.
///
/// # Safety
/// `grammar` must be a live grammar handle.
#[no_mangle]
pub unsafe extern "C" fn codeco_grammar_rule_count(grammar: *const CodecoGrammar, out_count: *mut usize) -> CodecoStatus {
    guard(|| {
        let n = handle(grammar, "grammar")?.grammar.rule_count();
        *out(out_count)? = n;
        Ok(())
    })
}

/// Starts a session. A null `start` selects the grammar's start category.
///
/// # Safety
/// `grammar` must be a live grammar handle, `start` null or a
/// nul-terminated string, and `out_session` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_new(
    grammar: *const CodecoGrammar,
    start: *const c_char,
    out_session: *mut *mut CodecoSession,
) -> CodecoStatus {
    guard(|| {
        let slot = out(out_session)?;
        *slot = ptr::null_mut();
        let g = &handle(grammar, "grammar")?.grammar;
        let start = if start.is_null() { g.start().to_string() } else { text(start, "start")?.to_string() };
        let st = ParseState::new(Arc::clone(g), &start).map_err(|e| Fail(CodecoStatus::UnknownStart, e.to_string()))?;
        *slot = Box::into_raw(Box::new(CodecoSession { states: vec![st] }));
        Ok(())
    })
}

/// Releases a session.
///
/// # Safety
/// `session` must come from `codeco_session_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_free(session: *mut CodecoSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Appends a token if it can continue the sentence. A rejected token leaves
/// the session unchanged and sets `accepted` to false.
///
/// # Safety
/// `session` must be a live session handle, `token` a nul-terminated string
/// and `accepted` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_feed(session: *mut CodecoSession, token: *const c_char, accepted: *mut bool) -> CodecoStatus {
    guard(|| {
        let s = session.as_mut().ok_or_else(|| Fail(CodecoStatus::NullArgument, "session is null".into()))?;
        let token = text(token, "token")?;
        let flag = out(accepted)?;
        match s.current().feed_token(token) {
            Ok(next) => {
                s.states.push(next);
                *flag = true;
            }
            Err(_) => *flag = false,
        }
        Ok(())
    })
}

/// Removes the last accepted token.
///
/// # Safety
/// `session` must be a live session handle.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_pop(session: *mut CodecoSession) -> CodecoStatus {
    guard(|| {
        let s = session.as_mut().ok_or_else(|| Fail(CodecoStatus::NullArgument, "session is null".into()))?;
        if s.states.len() == 1 {
            return Err(Fail(CodecoStatus::EmptyHistory, "no token to remove".into()));
        }
        s.states.pop();
        Ok(())
    })
}

/// Number of accepted tokens.
///
/// # Safety
/// `session` must be a live session handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_len(session: *const CodecoSession, out_len: *mut usize) -> CodecoStatus {
    guard(|| {
        let n = handle(session, "session")?.states.len() - 1;
        *out(out_len)? = n;
        Ok(())
    })
}

/// Whether the accepted tokens form a complete sentence.
///
/// # Safety
/// `session` must be a live session handle and `out_complete` writable.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_is_complete(session: *const CodecoSession, out_complete: *mut bool) -> CodecoStatus {
    guard(|| {
        let c = handle(session, "session")?.current().is_complete();
        *out(out_complete)? = c;
        Ok(())
    })
}

/// The possible next tokens, one `token<TAB>category` line each, in the
/// same order and format as `codeco complete`.
///
/// # Safety
/// `session` must be a live session handle and `out_text` writable. The
/// result must be released with `codeco_string_free`.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_next_tokens(session: *const CodecoSession, out_text: *mut *mut c_char) -> CodecoStatus {
    guard(|| {
        let slot = out(out_text)?;
        *slot = ptr::null_mut();
        let lines: String = handle(session, "session")?.current().next_tokens().iter().map(|o| format!("{o}\n")).collect();
        *slot = owned(lines);
        Ok(())
    })
}

/// The accessible antecedents as a JSON array of `{position, features}`.
///
/// # Safety
/// As for `codeco_session_next_tokens`.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_antecedents_json(session: *const CodecoSession, out_text: *mut *mut c_char) -> CodecoStatus {
    guard(|| {
        let slot = out(out_text)?;
        *slot = ptr::null_mut();
        let a: Vec<_> = handle(session, "session")?.current().accessible_antecedents().iter().map(antecedent_json).collect();
        *slot = owned(serde_json::Value::from(a).to_string());
        Ok(())
    })
}

/// The syntax trees of a complete sentence as a JSON array; empty if the
/// sentence is incomplete.
///
/// # Safety
/// As for `codeco_session_next_tokens`.
#[no_mangle]
pub unsafe extern "C" fn codeco_session_trees_json(session: *const CodecoSession, out_text: *mut *mut c_char) -> CodecoStatus {
    guard(|| {
        let slot = out(out_text)?;
        *slot = ptr::null_mut();
        let t: Vec<_> = handle(session, "session")?.current().extract_trees().iter().map(|t| t.to_json()).collect();
        *slot = owned(serde_json::Value::from(t).to_string());
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn codeco_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

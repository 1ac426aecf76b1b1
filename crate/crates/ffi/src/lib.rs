//! C ABI for vqclab.
//!
//! Objects are opaque handles created by `vqc_*` constructors and released
//! with the matching `*_free`. Every fallible call returns a status code
//! (`VQC_OK` on success) and writes its result through an out-pointer; the
//! message for the last failure on the calling thread is available from
//! `vqc_last_error_message`. Strings returned through out-pointers are owned
//! by the caller and released with `vqc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vqclab::grad::{grad_variance, reparameterize};
use vqclab::text::{circuit_from_text, circuit_to_text};
use vqclab::transpiler::transpile;
use vqclab::{
    AnsatzKind, BackendModel, Circuit, Error, ReparamMode, TranspileOptions, TranspiledCircuit,
};

pub const VQC_OK: i32 = 0;
/// A required pointer argument was null.
pub const VQC_ERR_NULL: i32 = 1;
/// A string argument was not valid UTF-8.
pub const VQC_ERR_UTF8: i32 = 2;
/// Invalid gate, circuit, ansatz shape or parameter vector.
pub const VQC_ERR_INVALID_ARGUMENT: i32 = 3;
/// Malformed circuit text or JSON.
pub const VQC_ERR_PARSE: i32 = 4;
/// Invalid backend description.
pub const VQC_ERR_BACKEND: i32 = 5;
/// The circuit needs more qubits than the backend has.
pub const VQC_ERR_DOES_NOT_FIT: i32 = 6;
pub const VQC_ERR_IO: i32 = 7;
/// Internal error; the library caught a panic.
pub const VQC_ERR_INTERNAL: i32 = 99;

/// Reparameterization modes for `vqc_transpiled_reparameterize`.
pub const VQC_MODE_ALL_ANGLES: i32 = 0;
pub const VQC_MODE_SYMBOL_DERIVED: i32 = 1;

pub struct VqcCircuit(Circuit);
pub struct VqcBackend(BackendModel);
pub struct VqcTranspiled(TranspiledCircuit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => VQC_ERR_PARSE,
        Error::InvalidBackend(_) | Error::SelfLoop(_) | Error::Disconnected => VQC_ERR_BACKEND,
        Error::DoesNotFit { .. } => VQC_ERR_DOES_NOT_FIT,
        Error::Io(_) => VQC_ERR_IO,
        _ => VQC_ERR_INVALID_ARGUMENT,
    }
}

struct Fail(i32);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_last_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null_arg(name: &str) -> Fail {
    set_last_error(format!("null pointer passed for '{name}'"));
    Fail(VQC_ERR_NULL)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VQC_OK,
        Ok(Err(Fail(code))) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            VQC_ERR_INTERNAL
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_last_error(format!("'{name}' is not valid UTF-8"));
        Fail(VQC_ERR_UTF8)
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null_arg(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null_arg(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| {
        set_last_error("string contains an interior NUL");
        Fail(VQC_ERR_INTERNAL)
    })?;
    put(out, c.into_raw(), "out")
}

/// Message describing the most recent failure on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vqc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vqc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an ansatz (`"efficient_su2"`, `"ttn"` or `"real_amplitudes"`).
///
/// # Safety
/// `kind` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_build_ansatz(
    kind: *const c_char,
    num_qubits: usize,
    reps: usize,
    out: *mut *mut VqcCircuit,
) -> i32 {
    guard(|| {
        let kind: AnsatzKind = str_arg(kind, "kind")?.parse()?;
        put_box(out, VqcCircuit(kind.build(num_qubits, reps)?))
    })
}

/// Parses the line-based circuit text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_from_text(
    text: *const c_char,
    out: *mut *mut VqcCircuit,
) -> i32 {
    guard(|| put_box(out, VqcCircuit(circuit_from_text(str_arg(text, "text")?)?)))
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_to_text(
    circuit: *const VqcCircuit,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| put_string(out, circuit_to_text(&ref_arg(circuit, "circuit")?.0)))
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_num_qubits(
    circuit: *const VqcCircuit,
    out: *mut usize,
) -> i32 {
    guard(|| put(out, ref_arg(circuit, "circuit")?.0.num_qubits(), "out"))
}

/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_num_symbols(
    circuit: *const VqcCircuit,
    out: *mut usize,
) -> i32 {
    guard(|| put(out, ref_arg(circuit, "circuit")?.0.num_symbols(), "out"))
}

/// Expectation of Z on `qubit` after running the circuit from |0...0> with
/// angles `theta[0..len]`.
///
/// # Safety
/// `circuit` must be a live handle, `theta` must point to `len` doubles
/// (may be null when `len` is 0), and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_expect_z(
    circuit: *const VqcCircuit,
    theta: *const f64,
    len: usize,
    qubit: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let c = &ref_arg(circuit, "circuit")?.0;
        let theta: &[f64] = if len == 0 {
            &[]
        } else if theta.is_null() {
            return Err(null_arg("theta"));
        } else {
            std::slice::from_raw_parts(theta, len)
        };
        put(out, vqclab::sim::expect_z(&c.bind(theta)?, qubit)?, "out")
    })
}

/// Gradient variance over `samples` uniform draws, cost `<Z_cost_qubit>`.
///
/// # Safety
/// `circuit` must be a live handle; `out_var` and `out_stderr` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_grad_variance(
    circuit: *const VqcCircuit,
    samples: usize,
    seed: u64,
    cost_qubit: usize,
    out_var: *mut f64,
    out_stderr: *mut f64,
) -> i32 {
    guard(|| {
        if out_var.is_null() || out_stderr.is_null() {
            return Err(null_arg("out"));
        }
        let stats = grad_variance(&ref_arg(circuit, "circuit")?.0, samples, seed, cost_qubit)?;
        put(out_var, stats.grad_var, "out_var")?;
        put(out_stderr, stats.stderr, "out_stderr")
    })
}

/// # Safety
/// `circuit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqc_circuit_free(circuit: *mut VqcCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_line(num_qubits: usize, out: *mut *mut VqcBackend) -> i32 {
    guard(|| put_box(out, VqcBackend(vqclab::backend::make_line(num_qubits)?)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_heavy_hex(
    rows: usize,
    cols: usize,
    out: *mut *mut VqcBackend,
) -> i32 {
    guard(|| {
        put_box(
            out,
            VqcBackend(vqclab::backend::make_heavy_hex(rows, cols)?),
        )
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_from_json(
    json: *const c_char,
    out: *mut *mut VqcBackend,
) -> i32 {
    guard(|| {
        put_box(
            out,
            VqcBackend(BackendModel::from_json(str_arg(json, "json")?)?),
        )
    })
}

/// # Safety
/// `backend` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_to_json(
    backend: *const VqcBackend,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| put_string(out, ref_arg(backend, "backend")?.0.to_json()))
}

/// # Safety
/// `backend` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_num_physical(
    backend: *const VqcBackend,
    out: *mut usize,
) -> i32 {
    guard(|| put(out, ref_arg(backend, "backend")?.0.num_physical(), "out"))
}

/// # Safety
/// `backend` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqc_backend_free(backend: *mut VqcBackend) {
    if !backend.is_null() {
        drop(Box::from_raw(backend));
    }
}

/// Compiles `circuit` for `backend` with the trivial layout. The peephole
/// optimizer runs when `optimize` is nonzero.
///
/// # Safety
/// `circuit` and `backend` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpile(
    circuit: *const VqcCircuit,
    backend: *const VqcBackend,
    optimize: i32,
    out: *mut *mut VqcTranspiled,
) -> i32 {
    guard(|| {
        let options = TranspileOptions {
            optimize: optimize != 0,
            ..TranspileOptions::default()
        };
        let t = transpile(
            &ref_arg(circuit, "circuit")?.0,
            &ref_arg(backend, "backend")?.0,
            &options,
        )?;
        put_box(out, VqcTranspiled(t))
    })
}

/// Copy of the compiled circuit (one symbol per physical rotation).
///
/// # Safety
/// `transpiled` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_physical(
    transpiled: *const VqcTranspiled,
    out: *mut *mut VqcCircuit,
) -> i32 {
    guard(|| {
        put_box(
            out,
            VqcCircuit(ref_arg(transpiled, "transpiled")?.0.physical.clone()),
        )
    })
}

/// The compiled circuit under `mode` (`VQC_MODE_ALL_ANGLES` or
/// `VQC_MODE_SYMBOL_DERIVED`).
///
/// # Safety
/// `transpiled` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_reparameterize(
    transpiled: *const VqcTranspiled,
    mode: i32,
    out: *mut *mut VqcCircuit,
) -> i32 {
    guard(|| {
        let mode = match mode {
            VQC_MODE_ALL_ANGLES => ReparamMode::AllAngles,
            VQC_MODE_SYMBOL_DERIVED => ReparamMode::SymbolDerived,
            m => {
                set_last_error(format!("unknown reparameterization mode {m}"));
                return Err(Fail(VQC_ERR_INVALID_ARGUMENT));
            }
        };
        put_box(
            out,
            VqcCircuit(reparameterize(&ref_arg(transpiled, "transpiled")?.0, mode)),
        )
    })
}

/// Provenance of every physical parameter as JSON.
///
/// # Safety
/// `transpiled` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_provenance_json(
    transpiled: *const VqcTranspiled,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        put_string(
            out,
            ref_arg(transpiled, "transpiled")?.0.provenance.to_json(),
        )
    })
}

/// Physical qubit holding logical qubit 0 at the end of the circuit.
///
/// # Safety
/// `transpiled` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_cost_qubit(
    transpiled: *const VqcTranspiled,
    out: *mut usize,
) -> i32 {
    guard(|| {
        put(
            out,
            ref_arg(transpiled, "transpiled")?.0.cost_qubit(),
            "out",
        )
    })
}

/// Number of SWAPs inserted by routing.
///
/// # Safety
/// `transpiled` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_num_swaps(
    transpiled: *const VqcTranspiled,
    out: *mut usize,
) -> i32 {
    guard(|| put(out, ref_arg(transpiled, "transpiled")?.0.swaps.len(), "out"))
}

/// # Safety
/// `transpiled` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vqc_transpiled_free(transpiled: *mut VqcTranspiled) {
    if !transpiled.is_null() {
        drop(Box::from_raw(transpiled));
    }
}

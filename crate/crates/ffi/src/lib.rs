// Copyright 2026 The spinenc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! C interface to `spinenc`.
//!
//! Hamiltonians are handed out as opaque `SpinencHamiltonian` pointers. Every call returns a
//! status code; on failure `spinenc_last_error` holds a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spinenc::encoding::EncodingKind;
use spinenc::hamiltonian::{build_encoded, dump_hamiltonian, HamiltonianSum};
use spinenc::{Error, Lattice, Spin};

pub const SPINENC_OK: c_int = 0;
pub const SPINENC_ERR_NULL: c_int = 1;
pub const SPINENC_ERR_VALIDATION: c_int = 2;
pub const SPINENC_ERR_RESOURCE: c_int = 3;
pub const SPINENC_ERR_IO: c_int = 4;
pub const SPINENC_ERR_PANIC: c_int = 5;

pub const SPINENC_MAPPING_COMPACT: c_int = 0;
pub const SPINENC_MAPPING_DIRECT: c_int = 1;
pub const SPINENC_MAPPING_DICKE: c_int = 2;
pub const SPINENC_MAPPING_QUDIT: c_int = 3;

/// Encoded Heisenberg Hamiltonian of an open chain.
pub struct SpinencHamiltonian {
    kind: EncodingKind,
    lattice: Lattice,
    sum: HamiltonianSum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> c_int {
    match e {
        Error::Validation(_) => SPINENC_ERR_VALIDATION,
        Error::Resource { .. } => SPINENC_ERR_RESOURCE,
        Error::Io(_) | Error::Json(_) => SPINENC_ERR_IO,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (c_int, String)>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SPINENC_OK,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            SPINENC_ERR_PANIC
        }
    }
}

fn lib_err(e: Error) -> (c_int, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (c_int, String) {
    (SPINENC_ERR_NULL, format!("{what} is null"))
}

fn mapping_of(m: c_int) -> Result<EncodingKind, (c_int, String)> {
    match m {
        SPINENC_MAPPING_COMPACT => Ok(EncodingKind::Compact),
        SPINENC_MAPPING_DIRECT => Ok(EncodingKind::Direct),
        SPINENC_MAPPING_DICKE => Ok(EncodingKind::Dicke),
        SPINENC_MAPPING_QUDIT => Ok(EncodingKind::Qudit),
        _ => Err((SPINENC_ERR_VALIDATION, format!("unknown mapping {m}"))),
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn spinenc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn spinenc_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => panic!("version"),
    };
    V.as_ptr()
}

/// Builds the encoded Hamiltonian of an open chain with `n_sites` spins of size `two_s / 2`.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with `spinenc_hamiltonian_free`.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_new(
    mapping: c_int,
    two_s: u32,
    n_sites: usize,
    out: *mut *mut SpinencHamiltonian,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = ptr::null_mut();
        let kind = mapping_of(mapping)?;
        let spin = Spin::new(two_s).map_err(lib_err)?;
        let lattice = Lattice::open_chain(spin, n_sites).map_err(lib_err)?;
        let sum = build_encoded(kind, &lattice).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SpinencHamiltonian { kind, lattice, sum }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from `spinenc_hamiltonian_new` and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_free(h: *mut SpinencHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of non-identity terms.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_n_terms(h: *const SpinencHamiltonian, out: *mut usize) -> c_int {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = h.sum.len();
        Ok(())
    })
}

/// Coefficient of the identity term.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_offset(h: *const SpinencHamiltonian, out: *mut f64) -> c_int {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = h.sum.offset();
        Ok(())
    })
}

/// Number of qubits, or of qudits for the qudit mapping.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_n_units(h: *const SpinencHamiltonian, out: *mut usize) -> c_int {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        let out = out.as_mut().ok_or_else(|| null_err("out"))?;
        *out = match &h.sum {
            HamiltonianSum::Pauli(s) => s.n_qubits(),
            HamiltonianSum::GellMann(_) => h.lattice.n_sites(),
        };
        Ok(())
    })
}

/// JSON dump of the Hamiltonian. Free the string with `spinenc_string_free`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinenc_hamiltonian_to_json(
    h: *const SpinencHamiltonian,
    out: *mut *mut c_char,
) -> c_int {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null_err("handle"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = ptr::null_mut();
        let dump = dump_hamiltonian(h.kind, &h.lattice, &h.sum);
        let text = serde_json::to_string(&dump).map_err(|e| lib_err(e.into()))?;
        *out = CString::new(text)
            .map_err(|e| (SPINENC_ERR_IO, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spinenc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

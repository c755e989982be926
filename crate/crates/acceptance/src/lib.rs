//! Acceptance checks for `bp-lab`; everything lives in `tests/acceptance.rs`.

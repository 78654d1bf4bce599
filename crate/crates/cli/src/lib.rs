//! Library half of the `qwalk` binary: config schema, preset catalog,
//! artifact formats, and the run pipeline, kept importable so integration
//! tests can parse what the binary writes.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

use qwalk_core::QwError;

/// Exit code for a failed invocation: 3 when the numerical core broke down
/// on a valid problem, 2 for everything the user can fix (bad flags, bad
/// config, unreadable files).
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if matches!(cause.downcast_ref::<QwError>(), Some(QwError::NumericalFailure(_))) {
            return 3;
        }
    }
    2
}

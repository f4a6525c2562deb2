//! Command line pipeline and HTTP service around the `topicrec` engine.

pub mod bundle;
pub mod commands;
pub mod config;
pub mod server;
pub mod session;

/// Environment variable naming the ratings log; `--ratings-log` wins.
pub const RATINGS_LOG_ENV: &str = "TOPICREC_RATINGS_LOG";

/// Exit status for missing or unreadable files.
pub const EXIT_IO: i32 = 2;

/// Nonzero exit status for an error: I/O problems get [`EXIT_IO`], the rest 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let io = err.chain().any(|e| {
        e.is::<std::io::Error>() || matches!(e.downcast_ref::<topicrec::Error>(), Some(topicrec::Error::Io { .. }))
    });
    if io {
        EXIT_IO
    } else {
        1
    }
}

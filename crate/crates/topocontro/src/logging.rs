//! Human-readable log lines on stderr plus a JSON-lines log file.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use log::{Level, LevelFilter, Log, Metadata, Record};
use serde::Serialize;

struct Logger {
    level: LevelFilter,
    file: Mutex<Option<File>>,
    start: Instant,
}

#[derive(Serialize)]
struct Line<'a> {
    level: &'a str,
    target: &'a str,
    message: String,
    elapsed_ms: u128,
}

impl Log for Logger {
    fn enabled(&self, m: &Metadata) -> bool {
        m.level() <= self.level
    }

    fn log(&self, r: &Record) {
        if !self.enabled(r.metadata()) {
            return;
        }
        let message = r.args().to_string();
        match r.level() {
            Level::Error | Level::Warn => eprintln!("{}: {message}", r.level().as_str().to_lowercase()),
            _ => eprintln!("{message}"),
        }
        if let Ok(mut guard) = self.file.lock() {
            if let Some(f) = guard.as_mut() {
                let line = Line {
                    level: r.level().as_str(),
                    target: r.target(),
                    message,
                    elapsed_ms: self.start.elapsed().as_millis(),
                };
                if let Ok(s) = serde_json::to_string(&line) {
                    let _ = writeln!(f, "{s}");
                }
            }
        }
    }

    fn flush(&self) {
        if let Ok(mut guard) = self.file.lock() {
            if let Some(f) = guard.as_mut() {
                let _ = f.flush();
            }
        }
    }
}

static LOGGER: std::sync::OnceLock<Logger> = std::sync::OnceLock::new();

/// Install the logger. `json_log` receives one JSON object per record.
pub fn init(level: LevelFilter, json_log: Option<&Path>) {
    let file = json_log.and_then(|p| {
        if let Some(dir) = p.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        File::create(p).ok()
    });
    let logger = LOGGER.get_or_init(|| Logger {
        level,
        file: Mutex::new(None),
        start: Instant::now(),
    });
    if let Ok(mut guard) = logger.file.lock() {
        *guard = file;
    }
    if log::set_logger(logger).is_ok() {
        log::set_max_level(level);
    }
}

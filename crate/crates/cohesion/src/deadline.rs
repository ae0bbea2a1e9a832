//! Wall-clock limits for solver queries.

use std::time::{Duration, Instant};

use cohesion_core::Interrupt;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Environment variable overriding [`DEFAULT_TIMEOUT`], in seconds.
pub const TIMEOUT_ENV: &str = "COHESION_TIMEOUT_SECS";

#[derive(Debug, Clone, Copy)]
pub struct Deadline(Instant);

impl Deadline {
    pub fn after(limit: Duration) -> Self {
        Deadline(Instant::now() + limit)
    }
}

impl Interrupt for Deadline {
    fn interrupted(&self) -> bool {
        Instant::now() >= self.0
    }
}

/// The explicit limit if given, then the environment, then the default.
pub fn timeout(explicit: Option<f64>) -> Result<Duration, String> {
    let secs = match explicit {
        Some(s) => s,
        None => match std::env::var(TIMEOUT_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| format!("{TIMEOUT_ENV} must be a number of seconds, got {text:?}"))?,
            Err(_) => return Ok(DEFAULT_TIMEOUT),
        },
    };
    Duration::try_from_secs_f64(secs).map_err(|_| format!("invalid timeout {secs}"))
}

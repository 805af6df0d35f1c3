//! Process CPU user time.

use std::time::Duration;

/// User CPU time consumed by this process so far.
pub fn user_time() -> Duration {
    // SAFETY: getrusage only writes into the zeroed struct we pass.
    let mut ru: libc::rusage = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut ru) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::from_secs(ru.ru_utime.tv_sec as u64)
        + Duration::from_micros(ru.ru_utime.tv_usec as u64)
}

/// Runs `f` and returns its result with the user CPU time it took.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = user_time();
    let out = f();
    (out, user_time().saturating_sub(t0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn busy_loop_takes_user_time() {
        let (x, d) = measure(|| {
            (0..50_000_000u64).fold(0u64, |a, b| a.wrapping_add(std::hint::black_box(b * b)))
        });
        assert!(x > 0);
        assert!(d > Duration::ZERO);
    }
}

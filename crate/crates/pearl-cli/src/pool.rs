//! Tiny scoped worker pool for batch trials. `PEARL_THREADS` caps the
//! worker count; each trial owns an RNG stream derived from (seed, index)
//! so results do not depend on scheduling.

pub fn thread_cap() -> usize {
    std::env::var("PEARL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run `job(trial)` for every trial index, in parallel up to the thread
/// cap, collecting results in trial order.
pub fn run_trials<T, F>(trials: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(trials.max(1));
    if workers <= 1 || trials <= 1 {
        return (0..trials).map(job).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..trials).map(|_| None).collect();
    let slot_ptr = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= trials {
                    break;
                }
                let value = job(k);
                let mut guard = slot_ptr.lock().unwrap();
                guard[k] = Some(value);
            });
        }
    });
    slots.into_iter().map(|v| v.unwrap()).collect()
}

//! Parameter grids and the ordered worker pool for sweeps.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const ENDPOINT_TOL: f64 = 1e-12;

/// `start:stop:step` with `stop` included when within 1e-12, or a single number.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?} in grid {spec:?}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if !(step > 0.0) || !step.is_finite() {
                return Err(format!("grid {spec:?} needs a positive step"));
            }
            if stop < start {
                return Err(format!("grid {spec:?} has stop below start"));
            }
            let n = ((stop - start) / step + ENDPOINT_TOL).floor() as usize;
            Ok((0..=n).map(|k| tidy(start + k as f64 * step)).collect())
        }
        _ => Err(format!("grid {spec:?} is not start:stop:step")),
    }
}

/// Removes accumulation noise below 1e-12 so grid values print cleanly.
fn tidy(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if (r - v).abs() <= ENDPOINT_TOL {
        r
    } else {
        v
    }
}

/// All grid points, first axis outermost.
pub fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

/// Evaluates `f(0..n)` on `workers` threads; results are in index order.
pub fn run_ordered<T: Send, F: Fn(usize) -> T + Sync>(n: usize, workers: usize, f: F) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= n {
                    break;
                }
                let out = f(k);
                slots.lock().expect("result slots")[k] = Some(out);
            });
        }
    });
    slots.into_inner().expect("result slots").into_iter().map(|o| o.expect("every index evaluated")).collect()
}

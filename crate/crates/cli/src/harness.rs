//! Deterministic parallel execution of independent experiment cells.
//!
//! Cells are distributed over a scoped thread pool and results are returned
//! in input order, so output files do not depend on scheduling. Ground states
//! are solved once per distinct spec and shared read-only.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use wfc_core::eigensolve::{ground_state_of, GroundStateResult, LanczosOptions};
use wfc_core::hamiltonian::{HamiltonianOp, HamiltonianSpec};

use crate::RunError;

/// Run `job` over all cells with up to `workers` threads, preserving input
/// order in the result.
pub fn parallel_map<T, R, F>(cells: Vec<T>, workers: usize, job: F) -> Result<Vec<R>, RunError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, RunError> + Sync,
{
    let n = cells.len();
    if workers <= 1 || n <= 1 {
        return cells.iter().map(|c| job(c)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<R, RunError>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = job(&cells[i]);
                *slots[i].lock().expect("result slot poisoned") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot poisoned").expect("every cell ran"))
        .collect()
}

/// Solve the ground states of a list of specs sequentially (they are reused
/// across many cells, so this happens once, up front).
pub fn solve_all(
    specs: &[HamiltonianSpec],
    tol: f64,
) -> Result<Vec<GroundStateResult>, RunError> {
    specs
        .iter()
        .map(|spec| {
            spec.validate()?;
            let op = HamiltonianOp::new(spec)?;
            Ok(ground_state_of(&op, LanczosOptions { tol, ..Default::default() })?)
        })
        .collect()
}

//! Wavefunction completion routines.
//!
//! [`tensor_complete`] is the bond-dimension-ramping scheme: starting from the
//! zero-filled sampled state at `χ = d`, each sweep truncates the working
//! state to rank `χ` across every bipartition in the schedule, re-imposes the
//! sampled values, and renormalizes; once a `χ` level stops improving, `χ`
//! increments. [`matrix_complete`] is the same scaffolding restricted to the
//! central bipartition, and [`svt`] provides the singular-value-thresholding
//! baseline. The exact single-coefficient entanglement minimizers live in
//! [`exact_min`].

pub mod exact_min;
pub mod nelder_mead;
pub mod svt;
mod tsvd;

pub use svt::{svt_complete, SvtOptions};
pub use tsvd::TsvdOptions;

use faer::Mat;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{self, Bipartition, QStateError};
use crate::sampling::{self, SampleMask, SamplingError};
use crate::{Boundary, C64, LatticeShape, StateVector};

#[derive(Debug, Error)]
pub enum CompleterError {
    #[error(transparent)]
    QState(#[from] QStateError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("mask covers {mask} amplitudes but the lattice has {lattice}")]
    ShapeMismatch { mask: usize, lattice: usize },
    #[error("schedule kind {0:?} is not valid for open boundaries")]
    ScheduleBoundary(ScheduleKind),
    #[error("invalid completer config: {0}")]
    BadConfig(String),
    #[error("SVT diverged; reduce delta")]
    SvtDiverged,
    #[error("coefficient magnitude is zero at index {0}")]
    ZeroCoefficient(usize),
    #[error("pair indices must be distinct")]
    EqualIndices,
}

/// Which bipartitions a sweep visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// All cyclic contiguous blocks of length `1..=⌊N/2⌋` (periodic chains).
    AllBlocks,
    /// Prefix blocks of length `1..=⌊N/2⌋`.
    PrefixCuts,
    /// The single central cut; turns the scaffolding into matrix completion.
    CentralCutOnly,
}

/// Bipartition schedule for a lattice, honoring its boundary conditions.
pub fn build_schedule(kind: ScheduleKind, shape: LatticeShape) -> Result<Vec<Bipartition>, CompleterError> {
    let n = shape.num_sites;
    let half = n / 2;
    let cuts = match kind {
        ScheduleKind::AllBlocks => {
            if shape.boundary == Boundary::Open {
                return Err(CompleterError::ScheduleBoundary(kind));
            }
            let mut cuts = Vec::with_capacity(n * half);
            for len in 1..=half {
                for start in 1..=n {
                    cuts.push(Bipartition::new(start, len, n)?);
                }
            }
            cuts
        }
        ScheduleKind::PrefixCuts => (1..=half)
            .map(|len| Bipartition::prefix(len, n))
            .collect::<Result<Vec<_>, _>>()?,
        ScheduleKind::CentralCutOnly => vec![Bipartition::central(n)?],
    };
    Ok(cuts)
}

/// Knobs of the χ-ramping completers.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CompleterConfig {
    /// First bond dimension of the ramp; `None` starts at `d`. Values above
    /// `d` skip the low-rank levels and can lose information the later levels
    /// cannot rebuild (see the skip regression test).
    pub chi_start: Option<usize>,
    /// Bond-dimension ceiling; `None` ramps to the largest cut rank.
    pub chi_max: Option<usize>,
    /// Inner sweeps per χ level.
    pub k_max: usize,
    /// Early inner exit when the relative change of unsampled entries over a
    /// sweep drops below this.
    pub inner_tol: f64,
    /// Early outer exit when the full state moves less than this between
    /// consecutive χ levels.
    pub outer_tol: f64,
    pub schedule_kind: ScheduleKind,
    /// Shuffle the cut order each sweep.
    pub shuffle_schedule: bool,
    pub shuffle_seed: u64,
    /// Record the schedule-averaged nuclear norm every sweep (costs extra
    /// SVDs; off for bulk experiments).
    pub trace_entropy: bool,
    /// Force exact SVDs in the truncation step instead of the certified
    /// subspace path.
    pub exact_tsvd: bool,
}

impl Default for CompleterConfig {
    fn default() -> Self {
        Self {
            chi_start: None,
            chi_max: None,
            k_max: 200,
            inner_tol: 1e-9,
            outer_tol: 1e-12,
            schedule_kind: ScheduleKind::AllBlocks,
            shuffle_schedule: true,
            shuffle_seed: 0,
            trace_entropy: false,
            exact_tsvd: false,
        }
    }
}

impl CompleterConfig {
    fn validate(&self, local_dim: usize) -> Result<(), CompleterError> {
        if let Some(chi) = self.chi_max {
            if chi < local_dim {
                return Err(CompleterError::BadConfig(format!(
                    "chi_max {chi} below the smallest nontrivial bond dimension {local_dim}"
                )));
            }
        }
        if self.k_max < 1 {
            return Err(CompleterError::BadConfig("k_max must be >= 1".into()));
        }
        if self.chi_start.is_some_and(|s| s < 1) {
            return Err(CompleterError::BadConfig("chi_start must be >= 1".into()));
        }
        if !(self.inner_tol > 0.0) || !(self.outer_tol > 0.0) {
            return Err(CompleterError::BadConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One recorded sweep of a completion run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRecord {
    pub chi: usize,
    pub sweep: usize,
    /// Cumulative number of cut visits, a solver-work axis for plots.
    pub cuts_visited: u64,
    pub fidelity_error: Option<f64>,
    pub mean_s_half: Option<f64>,
    pub rel_change: f64,
}

/// Per-sweep convergence record of a completion run.
#[derive(Clone, Debug, Default)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    /// CSV export: `chi,k,cut_sweeps,fidelity_error,mean_s_half,rel_change`.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "chi,k,cut_sweeps,fidelity_error,mean_s_half,rel_change")?;
        for r in &self.records {
            let fid = r.fidelity_error.map_or(String::new(), |v| v.to_string());
            let msh = r.mean_s_half.map_or(String::new(), |v| v.to_string());
            writeln!(w, "{},{},{},{},{},{}", r.chi, r.sweep, r.cuts_visited, fid, msh, r.rel_change)?;
        }
        Ok(())
    }

    pub fn final_fidelity_error(&self) -> Option<f64> {
        self.records.iter().rev().find_map(|r| r.fidelity_error)
    }
}

struct SweepCut {
    rows: usize,
    cols: usize,
    table: Vec<u32>,
    engine: tsvd::CutEngine,
    min_dim: usize,
}

/// χ-ramping tensor completion over the configured bipartition schedule.
///
/// Returns the completed state — sampled entries restored bit-exactly as the
/// last step — together with the per-sweep trace. Providing `exact` only adds
/// fidelity columns to the trace; it never feeds back into the update.
pub fn tensor_complete(
    shape: LatticeShape,
    mask: &SampleMask,
    config: &CompleterConfig,
    exact: Option<&StateVector>,
) -> Result<(StateVector, ConvergenceTrace), CompleterError> {
    let d = shape.local_dim;
    config.validate(d)?;
    if mask.total() != shape.dim() {
        return Err(CompleterError::ShapeMismatch { mask: mask.total(), lattice: shape.dim() });
    }
    let schedule = build_schedule(config.schedule_kind, shape)?;
    let n = shape.num_sites;

    let tsvd_opts = TsvdOptions { exact_only: config.exact_tsvd, ..Default::default() };
    let mut cuts: Vec<SweepCut> = schedule
        .iter()
        .enumerate()
        .map(|(i, &cut)| {
            let rows = cut.rows(d);
            let cols = cut.cols(n, d);
            SweepCut {
                rows,
                cols,
                table: qstate::cut_gather_table(n, d, cut),
                engine: tsvd::CutEngine::new(rows, cols, config.shuffle_seed, 0x5eed_0000 + i as u64),
                min_dim: rows.min(cols),
            }
        })
        .collect();
    let rank_cap = cuts.iter().map(|c| c.min_dim).max().expect("schedule is nonempty");
    let chi_hi = config.chi_max.unwrap_or(rank_cap).min(rank_cap);
    let chi_lo = config.chi_start.unwrap_or(d);
    if chi_lo > chi_hi {
        return Err(CompleterError::BadConfig(format!(
            "chi_start {chi_lo} exceeds the effective chi_max {chi_hi}"
        )));
    }

    let mut state = sampling::build_initial(mask, n, d)?;
    state.normalize_in_place()?;
    let unsampled = mask.complement();

    // one gather buffer per distinct matrix shape
    let mut buffers: std::collections::HashMap<(usize, usize), Mat<C64>> = Default::default();
    for c in &cuts {
        buffers
            .entry((c.rows, c.cols))
            .or_insert_with(|| Mat::zeros(c.rows, c.cols));
    }

    let mut trace = ConvergenceTrace::default();
    let mut order: Vec<usize> = (0..cuts.len()).collect();
    let mut prev_unsampled: Vec<C64> = unsampled.iter().map(|&i| state.amplitudes()[i]).collect();
    let mut cuts_visited = 0u64;
    // inexact inner truncations while the iterate is far from converged
    let mut slack = 1e-4f64;

    for chi in chi_lo..=chi_hi {
        let level_entry = state.clone();
        for sweep in 1..=config.k_max {
            if config.shuffle_schedule {
                let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
                rng.set_stream(((chi as u64) << 32) | sweep as u64);
                order.shuffle(&mut rng);
            }
            for &ci in &order {
                let c = &mut cuts[ci];
                if chi < c.min_dim {
                    let buf = buffers.get_mut(&(c.rows, c.cols)).expect("buffer preallocated");
                    qstate::gather_into(state.amplitudes(), &c.table, buf);
                    c.engine.truncate(buf, chi, &tsvd_opts, slack);
                    qstate::scatter_from(state.amplitudes_mut(), &c.table, buf.as_ref());
                }
                sampling::project_data_in_place(&mut state, mask)?;
                state.normalize_in_place()?;
                cuts_visited += 1;
            }
            let rel = relative_change(&state, &unsampled, &mut prev_unsampled);
            slack = 1e-2 * rel;
            let fidelity_error = match exact {
                Some(e) => Some(qstate::fidelity_error(&state, e)?),
                None => None,
            };
            let mean_s_half = if config.trace_entropy {
                Some(qstate::mean_block_renyi_half(&state, &schedule)?)
            } else {
                None
            };
            trace.records.push(TraceRecord {
                chi,
                sweep,
                cuts_visited,
                fidelity_error,
                mean_s_half,
                rel_change: rel,
            });
            if rel < config.inner_tol {
                break;
            }
        }
        if state.distance(&level_entry)? < config.outer_tol {
            break;
        }
        if chi >= rank_cap {
            break;
        }
    }

    // the data constraint is the last word: sampled entries bit-exact
    sampling::project_data_in_place(&mut state, mask)?;
    Ok((state, trace))
}

/// The same scaffolding restricted to the central bipartition (fixed-shape
/// matrix completion). Bit-identical to [`tensor_complete`] with
/// `schedule_kind = CentralCutOnly`.
pub fn matrix_complete(
    shape: LatticeShape,
    mask: &SampleMask,
    config: &CompleterConfig,
    exact: Option<&StateVector>,
) -> Result<(StateVector, ConvergenceTrace), CompleterError> {
    let config = CompleterConfig { schedule_kind: ScheduleKind::CentralCutOnly, ..*config };
    tensor_complete(shape, mask, &config, exact)
}

/// Relative ℓ₂ change of the unsampled entries since the previous sweep;
/// `prev` is updated to the current values.
fn relative_change(state: &StateVector, unsampled: &[usize], prev: &mut [C64]) -> f64 {
    let amps = state.amplitudes();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (slot, &i) in prev.iter_mut().zip(unsampled) {
        let now = amps[i];
        num += (now - *slot).norm_sqr();
        den += slot.norm_sqr();
        *slot = now;
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

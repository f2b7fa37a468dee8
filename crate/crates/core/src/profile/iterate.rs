use std::fmt;

use super::build::build_pssm;
use super::dirichlet::DirichletMixture;
use super::weights::henikoff_weights;
use crate::error::{Error, Result};
use crate::fsindex::FsIndex;
use crate::ingest::{FragmentRef, FragmentStore};
use crate::scoring::{Pssm, QuasiMetric};
use crate::search::{search, CostTable, Hit, SearchMode};
use crate::stats::{ScoreDistribution, Threshold};

/// E-value cutoffs: 1.0 for the first two iterations, 0.1 for the next two,
/// 0.01 from then on.
pub const DEFAULT_SCHEDULE: [f64; 5] = [1.0, 1.0, 0.1, 0.1, 0.01];
pub const DEFAULT_MIN_HITS: usize = 30;

/// Removes unwanted hits (for example low-complexity fragments) before a
/// profile is built from them.
pub trait HitFilter: Send + Sync {
    fn retain(&self, store: &FragmentStore, hits: &mut Vec<Hit>);
}

/// Keeps every hit.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeepAll;

impl HitFilter for KeepAll {
    fn retain(&self, _: &FragmentStore, _: &mut Vec<Hit>) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    /// Cutoff per iteration; the last value repeats.
    pub schedule: Vec<f64>,
    pub min_hits: usize,
    pub max_iterations: usize,
    /// Stop when two successive iterations return the same hits.
    pub stop_on_convergence: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            schedule: DEFAULT_SCHEDULE.to_vec(),
            min_hits: DEFAULT_MIN_HITS,
            max_iterations: 5,
            stop_on_convergence: true,
        }
    }
}

impl IterationConfig {
    pub fn cutoff(&self, iteration: usize) -> f64 {
        let s = &self.schedule;
        s[iteration.min(s.len() - 1)]
    }

    fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() || self.schedule.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidArgument(
                "E-value schedule must be non-empty and positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IterationQuery {
    Fragment(Vec<u8>),
    Profile(Pssm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Active,
    /// Fewer than the minimum number of hits.
    Deactivated,
    Converged,
    /// Reached the iteration limit.
    Finished,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Active => "active",
            Status::Deactivated => "deactivated",
            Status::Converged => "converged",
            Status::Finished => "finished",
        })
    }
}

/// Progress of one query window.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    /// Offset of the window in the query sequence.
    pub window: usize,
    pub query: IterationQuery,
    /// Completed iterations.
    pub iteration: usize,
    /// Cutoff for the next iteration.
    pub evalue: f64,
    pub last_hits: Option<Vec<FragmentRef>>,
    pub status: Status,
}

impl IterationState {
    pub fn new(window: usize, omega: Vec<u8>, config: &IterationConfig) -> Self {
        IterationState {
            window,
            query: IterationQuery::Fragment(omega),
            iteration: 0,
            evalue: config.cutoff(0),
            last_hits: None,
            status: Status::Active,
        }
    }

    pub fn is_active(&self) -> bool {
        self.status == Status::Active
    }

    pub fn pssm(&self) -> Option<&Pssm> {
        match &self.query {
            IterationQuery::Profile(p) => Some(p),
            IterationQuery::Fragment(_) => None,
        }
    }
}

/// One line of the iteration log.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub window: usize,
    /// 1-based number of the iteration just run.
    pub iteration: usize,
    pub evalue: f64,
    pub score_threshold: Option<i64>,
    pub epsilon: Option<u64>,
    pub hits: usize,
    pub status: Status,
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        write!(
            f,
            "window={}\titeration={}\tevalue={}\tscore_threshold={}\tepsilon={}\thits={}\tstatus={}",
            self.window,
            self.iteration,
            self.evalue,
            opt(self.score_threshold.map(|t| t.to_string())),
            opt(self.epsilon.map(|e| e.to_string())),
            self.hits,
            self.status
        )
    }
}

/// Everything an iteration needs besides its state. The first iteration
/// searches with `metric`; later ones with the PSSM built from the hits.
pub struct ProfileSearch<'a> {
    pub index: &'a FsIndex,
    pub metric: &'a QuasiMetric,
    pub mixture: &'a DirichletMixture,
    pub background: &'a [f64],
    pub config: &'a IterationConfig,
    pub filter: &'a dyn HitFilter,
}

/// Result of running a window to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRun {
    pub state: IterationState,
    pub log: Vec<IterationRecord>,
}

impl<'a> ProfileSearch<'a> {
    /// Runs one iteration on an active state.
    pub fn iterate(&self, state: &mut IterationState) -> Result<IterationRecord> {
        self.config.validate()?;
        if !state.is_active() {
            return Err(Error::InvalidArgument(format!("window {} is not active", state.window)));
        }
        let ix = self.index;
        let costs = match &state.query {
            IterationQuery::Fragment(omega) => CostTable::for_fragment(self.metric, omega)?,
            IterationQuery::Profile(p) => CostTable::for_pssm(p),
        };
        if costs.frag_len() != ix.frag_len() {
            return Err(Error::LengthMismatch {
                expected: ix.frag_len(),
                actual: costs.frag_len(),
            });
        }
        let evalue = state.evalue;
        let dist = ScoreDistribution::for_query(&costs, self.background, ix.len() as u64)?;
        let (threshold, epsilon) = match dist.score_threshold_for_evalue(evalue)? {
            Threshold::Score(t) => (Some(t), costs.epsilon_for_score(t)),
            Threshold::Unattainable => (None, None),
        };
        let mut hits = match epsilon {
            Some(eps) => search(ix, &costs, SearchMode::Range(eps))?.hits,
            None => Vec::new(),
        };
        self.filter.retain(ix.store(), &mut hits);
        state.iteration += 1;
        let mut record = IterationRecord {
            window: state.window,
            iteration: state.iteration,
            evalue,
            score_threshold: threshold,
            epsilon,
            hits: hits.len(),
            status: Status::Active,
        };
        if hits.len() < self.config.min_hits {
            state.status = Status::Deactivated;
            record.status = state.status;
            return Ok(record);
        }
        let mut refs: Vec<FragmentRef> = hits.iter().map(|h| h.fragment).collect();
        refs.sort_unstable();
        let converged = state.last_hits.as_ref() == Some(&refs);
        let fragments = refs.iter().map(|&f| ix.store().codes(f).to_vec()).collect();
        let pssm = build_pssm(&henikoff_weights(fragments)?, self.background, self.mixture)?;
        state.query = IterationQuery::Profile(pssm);
        state.last_hits = Some(refs);
        // Never raise the cutoff, whatever the schedule says.
        state.evalue = evalue.min(self.config.cutoff(state.iteration));
        if converged && self.config.stop_on_convergence {
            state.status = Status::Converged;
        } else if state.iteration >= self.config.max_iterations {
            state.status = Status::Finished;
        }
        record.status = state.status;
        Ok(record)
    }

    /// Iterates one window until it stops being active.
    pub fn run_window(&self, window: usize, omega: Vec<u8>) -> Result<WindowRun> {
        let mut state = IterationState::new(window, omega, self.config);
        let mut log = Vec::new();
        if self.config.max_iterations == 0 {
            state.status = Status::Finished;
        }
        while state.is_active() {
            log.push(self.iterate(&mut state)?);
        }
        Ok(WindowRun { state, log })
    }

    /// Runs every overlapping window of `sequence` (letter codes), in order.
    /// A sequence shorter than the fragment length has no windows.
    pub fn run_sequence(&self, sequence: &[u8]) -> Result<Vec<WindowRun>> {
        let m = self.index.frag_len();
        if sequence.len() < m {
            return Ok(Vec::new());
        }
        (0..=sequence.len() - m)
            .map(|w| self.run_window(w, sequence[w..w + m].to_vec()))
            .collect()
    }
}

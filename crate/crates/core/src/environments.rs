//! Ground-truth environments: dataset generators, Bernoulli duel sampling and
//! assumption diagnostics.

use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{ArmId, MatrixError, PreferenceMatrix};
use crate::regret::{condorcet_regret_unchecked, CopelandTable};
use crate::sampling::{stream_rng, Stream};
use crate::winners::{beaten_count, condorcet_winner, copeland_winners};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("regret mode 'condorcet' needs a Condorcet winner, but this matrix has none")]
    NoCondorcetWinner,
    #[error("cannot load matrix {path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: MatrixError,
    },
}

/// Number of suboptimal arms on the Cycle tables.
const CYCLE_LEN: usize = 19;
/// Arms each suboptimal arm beats: its 9 cyclic successors.
const CYCLE_REACH: usize = (CYCLE_LEN - 1) / 2;

/// 20 arms: arm 0 beats everyone with probability `top`; arms 1..=19 sit on a
/// cycle where each beats its 9 cyclic successors with probability `edge`
/// and loses to its 9 predecessors.
fn cycle_table(top: f64, edge: f64) -> PreferenceMatrix {
    PreferenceMatrix::from_upper(CYCLE_LEN + 1, |i, j| {
        if i == 0 {
            return top;
        }
        // positions on the cycle
        let (a, b) = (i - 1, j - 1);
        let ahead = (b + CYCLE_LEN - a) % CYCLE_LEN;
        if ahead <= CYCLE_REACH {
            edge
        } else {
            1.0 - edge
        }
    })
}

/// The Cycle dataset: Condorcet arm 0 wins every duel with probability 0.51;
/// the suboptimal arms beat one another deterministically around a cycle.
pub fn gen_cycle() -> PreferenceMatrix {
    cycle_table(0.51, 1.0)
}

/// The Cycle2 dataset: arm 0 wins with probability 0.6 and cycle edges are
/// won with probability 0.51.
pub fn gen_cycle2() -> PreferenceMatrix {
    cycle_table(0.6, 0.51)
}

/// Random instance with Condorcet winner 0 and every nonzero gap at least
/// `delta_min`; the pair (0, 1) sits exactly at `delta_min`.
///
/// The last `floor(fraction * k)` arms are uninformative: tied at 0.5 among
/// themselves and beaten by every informative arm.
pub fn gen_random_condorcet(
    k: usize,
    delta_min: f64,
    uninformative_fraction: f64,
    seed: u64,
) -> Result<PreferenceMatrix, EnvError> {
    if k < 2 {
        return Err(EnvError::BadParams(format!("k = {k} must be >= 2")));
    }
    if !(delta_min > 0.0 && delta_min <= 0.5) {
        return Err(EnvError::BadParams(format!("delta_min = {delta_min} not in (0, 0.5]")));
    }
    if !(0.0..=1.0 / 3.0 + 1e-12).contains(&uninformative_fraction) {
        return Err(EnvError::BadParams(format!(
            "uninformative_fraction = {uninformative_fraction} not in [0, 1/3]"
        )));
    }
    let n_uninf = (uninformative_fraction * k as f64 + 1e-9).floor() as usize;
    let first_uninf = k - n_uninf;
    let mut rng = stream_rng(seed, Stream::Environment);
    let m = PreferenceMatrix::from_upper(k, |i, j| {
        if i >= first_uninf {
            return 0.5;
        }
        if i == 0 && j == 1 {
            return 0.5 + delta_min;
        }
        let gap = delta_min + rng.random::<f64>() * (0.5 - delta_min);
        if i == 0 || j >= first_uninf || rng.random::<bool>() {
            0.5 + gap
        } else {
            0.5 - gap
        }
    });
    Ok(m)
}

/// Bernoulli duel: returns `i` with probability `p[i][j]`, otherwise `j`.
pub fn sample_duel<R: Rng + ?Sized>(m: &PreferenceMatrix, i: ArmId, j: ArmId, rng: &mut R) -> ArmId {
    if i == j {
        return i;
    }
    if rng.random::<f64>() < m.prob(i, j) {
        i
    } else {
        j
    }
}

/// Diagnostics for the distinguishability and uninformative-arm assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub indistinguishable_pairs: Vec<(usize, usize)>,
    /// Arms that beat no one and are tied with at least one other arm.
    pub uninformative: Vec<ArmId>,
    /// Every tied pair consists of two uninformative arms.
    pub ties_only_among_uninformative: bool,
    /// At most a third of the arms are uninformative.
    pub uninformative_cap_holds: bool,
}

pub fn check_assumptions(m: &PreferenceMatrix) -> AssumptionReport {
    let k = m.k();
    let mut tied = vec![false; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if m.get(i, j) == 0.5 {
                pairs.push((i, j));
                tied[i] = true;
                tied[j] = true;
            }
        }
    }
    let uninformative: Vec<ArmId> = (0..k)
        .filter(|&i| tied[i] && beaten_count(m, i) == 0)
        .map(ArmId)
        .collect();
    let is_uninf = |i: usize| uninformative.contains(&ArmId(i));
    let ties_only_among_uninformative = pairs.iter().all(|&(i, j)| is_uninf(i) && is_uninf(j));
    AssumptionReport {
        indistinguishable_pairs: pairs,
        uninformative_cap_holds: 3 * uninformative.len() <= k,
        uninformative,
        ties_only_among_uninformative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretMode {
    #[default]
    Condorcet,
    Copeland,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSource {
    File {
        path: PathBuf,
    },
    Cycle,
    Cycle2,
    RandomCondorcet {
        k: usize,
        delta_min: f64,
        #[serde(default)]
        uninformative_fraction: f64,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub source: MatrixSource,
    #[serde(default)]
    pub regret_mode: RegretMode,
}

impl EnvironmentSpec {
    pub fn new(source: MatrixSource) -> Self {
        Self {
            source,
            regret_mode: RegretMode::Condorcet,
        }
    }

    /// Builds the environment. Relative file paths resolve against `base_dir`.
    pub fn realize(&self, base_dir: Option<&Path>) -> Result<Environment, EnvError> {
        let matrix = match &self.source {
            MatrixSource::File { path } => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                PreferenceMatrix::load(&full).map_err(|source| EnvError::Load { path: full, source })?
            }
            MatrixSource::Cycle => gen_cycle(),
            MatrixSource::Cycle2 => gen_cycle2(),
            MatrixSource::RandomCondorcet {
                k,
                delta_min,
                uninformative_fraction,
                seed,
            } => gen_random_condorcet(*k, *delta_min, *uninformative_fraction, *seed)?,
        };
        Environment::new(matrix, self.regret_mode)
    }
}

/// A realized environment: the matrix plus precomputed regret tables.
#[derive(Debug, Clone)]
pub struct Environment {
    matrix: PreferenceMatrix,
    mode: RegretMode,
    condorcet: Option<ArmId>,
    copeland: CopelandTable,
    max_regret: f64,
}

impl Environment {
    pub fn new(matrix: PreferenceMatrix, mode: RegretMode) -> Result<Self, EnvError> {
        let condorcet = condorcet_winner(&matrix);
        if mode == RegretMode::Condorcet && condorcet.is_none() {
            return Err(EnvError::NoCondorcetWinner);
        }
        let copeland = CopelandTable::new(&matrix);
        let k = matrix.k();
        let max_regret = match (mode, condorcet) {
            (RegretMode::Condorcet, Some(c)) => (0..k)
                .map(|j| matrix.get(c.0, j) - 0.5)
                .fold(0.0, f64::max),
            _ => (0..k).map(|i| copeland.regret(i, i)).fold(0.0, f64::max),
        };
        Ok(Self {
            matrix,
            mode,
            condorcet,
            copeland,
            max_regret,
        })
    }

    pub fn matrix(&self) -> &PreferenceMatrix {
        &self.matrix
    }

    pub fn k(&self) -> usize {
        self.matrix.k()
    }

    pub fn mode(&self) -> RegretMode {
        self.mode
    }

    pub fn condorcet(&self) -> Option<ArmId> {
        self.condorcet
    }

    /// Arms counted as a correct final answer: the Condorcet winner, or the
    /// Copeland winners when there is none.
    pub fn target_arms(&self) -> Vec<ArmId> {
        match self.condorcet {
            Some(c) => vec![c],
            None => copeland_winners(&self.matrix),
        }
    }

    /// Largest possible single-step regret.
    pub fn max_step_regret(&self) -> f64 {
        self.max_regret
    }

    pub fn duel<R: Rng + ?Sized>(&self, i: ArmId, j: ArmId, rng: &mut R) -> ArmId {
        sample_duel(&self.matrix, i, j, rng)
    }

    #[inline]
    pub fn step_regret(&self, i: ArmId, j: ArmId) -> f64 {
        match (self.mode, self.condorcet) {
            (RegretMode::Condorcet, Some(c)) => condorcet_regret_unchecked(&self.matrix, c.0, i.0, j.0),
            _ => self.copeland.regret(i.0, j.0),
        }
    }
}

//! Follow-the-Leading-History: exponential weights over a pool of base
//! learners in which a fresh learner joins every round.
//!
//! In round `t` the pool holds learners born at rounds `1..=t` (or the subset
//! kept alive by the geometric lifetime schedule). The meta learner plays the
//! weighted average of their plays, reweights each by `exp(-zeta * loss)`,
//! shrinks all weights by `1 - 1/(t+1)` and gives the newcomer `1/(t+1)`.

use std::borrow::{Borrow, Cow};

use serde::{Deserialize, Serialize};

use crate::base_learners::{BaseLearner, Expert, LearnerSpec};
use crate::losses::LossFunction;
use crate::{OcoError, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pruning {
    /// Keep every learner ever spawned.
    #[default]
    None,
    /// Keep a learner born at `j` for `2^(2 + z(j))` rounds, where `z(j)` is
    /// the exponent of 2 in `j`.
    Aflh,
}

/// Number of rounds a learner born at `birth` stays alive under AFLH.
pub fn aflh_lifetime(birth: usize) -> usize {
    assert!(birth >= 1, "births start at round 1");
    1usize << (2 + birth.trailing_zeros())
}

pub fn aflh_is_alive(birth: usize, round: usize) -> bool {
    birth >= 1 && birth <= round && round - birth < aflh_lifetime(birth)
}

/// Birth rounds alive at round `t`, ascending.
pub fn aflh_alive(round: usize) -> Result<Vec<usize>> {
    if round == 0 {
        return Err(OcoError::config("rounds start at 1"));
    }
    let mut alive = Vec::new();
    let mut level = 0u32;
    while (1usize << level) <= round {
        let step = 1usize << level;
        let lifetime = 4 * step;
        // Births with exponent exactly `level` are odd multiples of 2^level.
        let earliest = round.saturating_sub(lifetime - 1).max(1);
        let mut j = earliest.div_ceil(step) * step;
        while j <= round {
            if (j >> level) & 1 == 1 {
                alive.push(j);
            }
            j += step;
        }
        level += 1;
    }
    alive.sort_unstable();
    Ok(alive)
}

/// What changed in the pool during [`FlhState::update`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolChange {
    /// Birth round of the learner that joined.
    pub spawned: usize,
    /// Pool positions (before the newcomer was appended) that were removed,
    /// ascending.
    pub pruned: Vec<usize>,
}

/// Weights and birth rounds of the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct FlhState {
    round: usize,
    zeta: f64,
    births: Vec<usize>,
    weights: Vec<f64>,
    pruning: Pruning,
}

impl FlhState {
    /// Round 1 with a single learner of weight 1.
    pub fn new(zeta: f64, pruning: Pruning) -> Result<Self> {
        if !(zeta > 0.0) || !zeta.is_finite() {
            return Err(OcoError::config(format!("learning rate must be positive, got {zeta}")));
        }
        Ok(Self { round: 1, zeta, births: vec![1], weights: vec![1.0], pruning })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn pruning(&self) -> Pruning {
        self.pruning
    }

    pub fn births(&self) -> &[usize] {
        &self.births
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.births.len()
    }

    pub fn is_empty(&self) -> bool {
        self.births.is_empty()
    }

    /// Weighted average of the experts' plays.
    pub fn predict<P: Borrow<Vector>>(&self, plays: &[P]) -> Result<Vector> {
        if plays.len() != self.weights.len() {
            return Err(OcoError::Dimension { expected: self.weights.len(), got: plays.len() });
        }
        let dim = plays[0].borrow().len();
        let mut out = Vector::zeros(dim);
        for (p, w) in plays.iter().zip(&self.weights) {
            let p = p.borrow();
            if p.len() != dim {
                return Err(OcoError::Dimension { expected: dim, got: p.len() });
            }
            out.axpy(*w, p, 1.0);
        }
        Ok(out)
    }

    /// Multiplicative reweighting by the losses of the round just played,
    /// followed by the addition step and, under AFLH, removal of expired
    /// learners.
    pub fn update(&mut self, losses: &[f64]) -> Result<PoolChange> {
        if losses.len() != self.weights.len() {
            return Err(OcoError::Dimension { expected: self.weights.len(), got: losses.len() });
        }
        if let Some(i) = losses.iter().position(|l| l.is_nan() || *l == f64::NEG_INFINITY) {
            return Err(OcoError::numerical(format!("loss of expert born at {} is {}", self.births[i], losses[i])));
        }

        // Shift by the smallest loss among live weights so the largest factor is 1.
        let shift = losses
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(l, _)| *l)
            .fold(f64::INFINITY, f64::min);
        let shift = if shift.is_finite() { shift } else { 0.0 };
        for (w, l) in self.weights.iter_mut().zip(losses) {
            *w *= (-self.zeta * (l - shift)).exp();
        }
        let total: f64 = self.weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(OcoError::numerical("expert weights collapsed to zero"));
        }

        let next = self.round + 1;
        let keep = 1.0 - 1.0 / next as f64;
        for w in &mut self.weights {
            *w = *w / total * keep;
        }
        self.births.push(next);
        self.weights.push(1.0 / next as f64);
        self.round = next;

        let mut pruned = Vec::new();
        if self.pruning == Pruning::Aflh {
            let alive: Vec<bool> = self.births.iter().map(|&b| aflh_is_alive(b, next)).collect();
            pruned.extend(alive.iter().enumerate().filter(|(_, a)| !**a).map(|(i, _)| i));
            if !pruned.is_empty() {
                let mut flags = alive.iter();
                self.births.retain(|_| *flags.next().unwrap());
                let mut flags = alive.iter();
                self.weights.retain(|_| *flags.next().unwrap());
                let total: f64 = self.weights.iter().sum();
                for w in &mut self.weights {
                    *w /= total;
                }
            }
        }
        Ok(PoolChange { spawned: next, pruned })
    }
}

/// Per-round outcome of [`Flh::round`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub prediction: Vector,
    pub loss: f64,
    /// Birth rounds of the learners queried this round, in pool order.
    pub births: Vec<usize>,
    /// Loss of each learner's own play.
    pub expert_losses: Vec<f64>,
    /// Weights used to form the prediction.
    pub weights: Vec<f64>,
}

type Spawner<E> = Box<dyn FnMut(usize) -> Result<E> + Send>;

/// The meta learner together with its pool of base learners.
pub struct Flh<E> {
    state: FlhState,
    experts: Vec<E>,
    spawn: Spawner<E>,
}

impl Flh<BaseLearner> {
    pub fn from_spec(spec: LearnerSpec, zeta: f64, pruning: Pruning) -> Result<Self> {
        spec.spawn()?;
        Self::new(zeta, pruning, move |_| spec.spawn())
    }
}

impl<E: Expert> Flh<E> {
    /// `spawn` receives the birth round of the learner to create.
    pub fn new<F>(zeta: f64, pruning: Pruning, mut spawn: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<E> + Send + 'static,
    {
        let state = FlhState::new(zeta, pruning)?;
        let first = spawn(1)?;
        Ok(Self { state, experts: vec![first], spawn: Box::new(spawn) })
    }

    pub fn state(&self) -> &FlhState {
        &self.state
    }

    pub fn experts(&self) -> &[E] {
        &self.experts
    }

    /// Play, suffer `loss`, update every learner on its own play, reweight
    /// and grow the pool.
    pub fn round(&mut self, loss: &LossFunction) -> Result<RoundRecord> {
        let covariate = loss.covariate();
        let plays: Vec<Cow<'_, Vector>> =
            self.experts.iter().map(|e| e.play(covariate)).collect::<Result<_>>()?;
        let prediction = self.state.predict(&plays)?;
        let meta_loss = loss.evaluate_play(&prediction)?;
        let expert_losses: Vec<f64> =
            plays.iter().map(|p| loss.evaluate_play(p)).collect::<Result<_>>()?;
        drop(plays);

        let record = RoundRecord {
            round: self.state.round(),
            prediction,
            loss: meta_loss,
            births: self.state.births().to_vec(),
            expert_losses,
            weights: self.state.weights().to_vec(),
        };

        for expert in &mut self.experts {
            expert.observe(loss)?;
        }
        let change = self.state.update(&record.expert_losses)?;
        for &position in change.pruned.iter().rev() {
            self.experts.remove(position);
        }
        self.experts.push((self.spawn)(change.spawned)?);
        debug_assert_eq!(self.experts.len(), self.state.len());
        Ok(record)
    }
}

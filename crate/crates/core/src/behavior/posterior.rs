use crate::geometry::Vec2;

use super::{log_likelihood, BehaviorConstraints};

/// Discrete distribution over behavior candidates, stored as normalized
/// log-weights.
#[derive(Clone, Debug, PartialEq)]
pub struct BehaviorPosterior {
    candidates: Vec<BehaviorConstraints>,
    log_weights: Vec<f64>,
}

impl BehaviorPosterior {
    /// Uniform prior. Panics on an empty candidate list.
    pub fn uniform(candidates: Vec<BehaviorConstraints>) -> Self {
        assert!(
            !candidates.is_empty(),
            "posterior needs at least one candidate"
        );
        let w = -(candidates.len() as f64).ln();
        let log_weights = vec![w; candidates.len()];
        BehaviorPosterior {
            candidates,
            log_weights,
        }
    }

    /// Point mass on a known behavior.
    pub fn known(behavior: BehaviorConstraints) -> Self {
        BehaviorPosterior::uniform(vec![behavior])
    }

    pub fn candidates(&self) -> &[BehaviorConstraints] {
        &self.candidates
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Index of the most probable candidate; ties go to the lowest index.
    pub fn map_index(&self) -> usize {
        let mut best = 0;
        for (i, &w) in self.log_weights.iter().enumerate().skip(1) {
            if w > self.log_weights[best] {
                best = i;
            }
        }
        best
    }

    pub fn map(&self) -> &BehaviorConstraints {
        &self.candidates[self.map_index()]
    }

    pub fn reset(&mut self) {
        let w = -(self.candidates.len() as f64).ln();
        self.log_weights.iter_mut().for_each(|x| *x = w);
    }

    /// Multiplies in one likelihood per candidate (given as logs) and
    /// renormalizes. Resets to uniform if no candidate keeps a finite weight.
    pub fn update_log(&mut self, log_likelihoods: &[f64]) {
        assert_eq!(
            log_likelihoods.len(),
            self.candidates.len(),
            "one likelihood per candidate"
        );
        for (w, l) in self.log_weights.iter_mut().zip(log_likelihoods) {
            *w += l;
        }
        let max = self
            .log_weights
            .iter()
            .copied()
            .filter(|w| w.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            log::warn!("all behavior likelihoods vanished; resetting posterior to uniform");
            self.reset();
            return;
        }
        let sum: f64 = self
            .log_weights
            .iter()
            .map(|w| if w.is_finite() { (w - max).exp() } else { 0.0 })
            .sum();
        let norm = max + sum.ln();
        for w in &mut self.log_weights {
            *w = if w.is_finite() {
                *w - norm
            } else {
                f64::NEG_INFINITY
            };
        }
    }

    /// Bayes update from per-candidate one-step predictions.
    pub fn update(&mut self, predictions: &[Vec2], observed: Vec2, sigma: f64) {
        let logs: Vec<f64> = predictions
            .iter()
            .map(|&p| log_likelihood(observed, p, sigma))
            .collect();
        self.update_log(&logs);
    }
}

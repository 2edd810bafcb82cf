use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Piecewise-constant η: at each listed iteration the *current* η is divided
/// by the paired divisor, so repeated entries compound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    milestones: Vec<(usize, f64)>,
}

impl Schedule {
    pub fn none() -> Self {
        Schedule::default()
    }

    pub fn new(milestones: Vec<(usize, f64)>) -> Result<Self> {
        for pair in milestones.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(invalid(format!(
                    "schedule indices must be strictly increasing ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if let Some((t, d)) = milestones.iter().find(|(_, d)| !(*d > 1.0 && d.is_finite())) {
            return Err(invalid(format!("schedule divisor at iteration {t} must exceed 1, got {d}")));
        }
        Ok(Schedule { milestones })
    }

    pub fn milestones(&self) -> &[(usize, f64)] {
        &self.milestones
    }

    pub fn is_empty(&self) -> bool {
        self.milestones.is_empty()
    }

    /// Divisor that takes effect at iteration `t`, if any.
    pub fn divisor_at(&self, t: usize) -> Option<f64> {
        self.milestones
            .binary_search_by_key(&t, |(i, _)| *i)
            .ok()
            .map(|k| self.milestones[k].1)
    }

    /// η in force at iteration `t`.
    pub fn eta_at(&self, eta0: f64, t: usize) -> f64 {
        self.milestones
            .iter()
            .take_while(|(i, _)| *i <= t)
            .fold(eta0, |eta, (_, d)| eta / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compounding_division() {
        let s = Schedule::new(vec![(100, 10.0), (150, 10.0)]).unwrap();
        assert_eq!(s.eta_at(1.0, 99), 1.0);
        assert_eq!(s.eta_at(1.0, 100), 0.1);
        assert_eq!(s.eta_at(1.0, 149), 0.1);
        assert!((s.eta_at(1.0, 150) - 0.01).abs() < 1e-18);
        assert_eq!(s.divisor_at(150), Some(10.0));
        assert_eq!(s.divisor_at(151), None);
    }

    #[test]
    fn validation() {
        assert!(Schedule::new(vec![(5, 2.0), (5, 2.0)]).is_err());
        assert!(Schedule::new(vec![(5, 2.0), (3, 2.0)]).is_err());
        assert!(Schedule::new(vec![(5, 1.0)]).is_err());
        assert!(Schedule::new(vec![(5, 0.5)]).is_err());
        assert!(Schedule::new(vec![]).unwrap().is_empty());
    }
}

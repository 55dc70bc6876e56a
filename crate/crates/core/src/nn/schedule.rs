/// Stepwise exponential annealing: `initial · decay^⌊step / period⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule {
    pub initial: f64,
    pub decay: f64,
    /// Steps between decays; `0` disables annealing.
    pub period: u64,
}

/// Starting rate used by [`LrSchedule::for_run`]. The loss is averaged over
/// every output bit, so per-weight gradients are small and plain SGD needs
/// a large step to make progress.
pub const DEFAULT_INITIAL_LR: f64 = 10.0;

impl LrSchedule {
    /// Starts at [`DEFAULT_INITIAL_LR`] and halves eight times over a run of
    /// `total_steps`.
    pub fn for_run(total_steps: u64) -> Self {
        LrSchedule {
            initial: DEFAULT_INITIAL_LR,
            decay: 0.5,
            period: (total_steps / 8).max(1),
        }
    }

    pub fn lr(&self, step: u64) -> f64 {
        if self.period == 0 {
            return self.initial;
        }
        let exponent = (step / self.period).min(i32::MAX as u64) as i32;
        self.initial * self.decay.powi(exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn schedule_examples() {
        let s = LrSchedule { initial: 0.002, decay: 0.5, period: 100_000 };
        assert_eq!(s.lr(0), 0.002);
        assert_relative_eq!(s.lr(100_000), 0.001);
        assert_relative_eq!(s.lr(99_999), 0.002);
        assert_relative_eq!(s.lr(250_000), 0.0005);
    }

    #[test]
    fn schedule_is_monotone() {
        let s = LrSchedule::for_run(1000);
        let mut last = f64::INFINITY;
        for step in (0..5000).step_by(7) {
            let lr = s.lr(step);
            assert!(lr <= last);
            last = lr;
        }
        let flat = LrSchedule { initial: 0.1, decay: 0.5, period: 0 };
        assert_eq!(flat.lr(1 << 40), 0.1);
    }
}

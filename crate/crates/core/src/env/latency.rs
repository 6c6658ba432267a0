//! Control latency as a fixed-length action FIFO.

use std::collections::VecDeque;

use crate::error::{CoreError, Result};
use crate::Real;

/// Delays actions by a whole number of control steps.
///
/// The queue is pre-filled with `default_action`, so the environment executes
/// the default during warm-up and thereafter the action issued
/// `latency_steps` control steps earlier. Queue length stays equal to
/// `latency_steps` at all times.
#[derive(Debug, Clone)]
pub struct LatencyBuffer {
    queue: VecDeque<Vec<Real>>,
    default_action: Vec<Real>,
    latency_steps: usize,
}

impl LatencyBuffer {
    pub fn new(latency_steps: usize, default_action: Vec<Real>) -> Self {
        let queue = (0..latency_steps).map(|_| default_action.clone()).collect();
        Self {
            queue,
            default_action,
            latency_steps,
        }
    }

    pub fn latency_steps(&self) -> usize {
        self.latency_steps
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// Refill the queue with default actions (episode start).
    pub fn reset(&mut self) {
        self.queue.clear();
        for _ in 0..self.latency_steps {
            self.queue.push_back(self.default_action.clone());
        }
    }

    /// Push the commanded action, pop the effective one.
    pub fn apply(&mut self, action: &[Real]) -> Result<Vec<Real>> {
        if action.len() != self.default_action.len() {
            return Err(CoreError::Contract(format!(
                "action dimension {} does not match buffer dimension {}",
                action.len(),
                self.default_action.len()
            )));
        }
        if self.latency_steps == 0 {
            return Ok(action.to_vec());
        }
        self.queue.push_back(action.to_vec());
        Ok(self.queue.pop_front().expect("queue pre-filled"))
    }
}

/// Operation-style alias for [`LatencyBuffer::apply`].
pub fn apply_latency(buffer: &mut LatencyBuffer, action: &[Real]) -> Result<Vec<Real>> {
    buffer.apply(action)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_latency_is_identity() {
        let mut buf = LatencyBuffer::new(0, vec![0.0, 0.0]);
        let out = buf.apply(&[1.0, -2.0]).unwrap();
        assert_eq!(out, vec![1.0, -2.0]);
        assert!(buf.is_empty());
    }

    #[test]
    fn two_step_latency_returns_first_action_on_third_call() {
        let mut buf = LatencyBuffer::new(2, vec![0.0]);
        assert_eq!(buf.apply(&[10.0]).unwrap(), vec![0.0]); // warm-up
        assert_eq!(buf.apply(&[20.0]).unwrap(), vec![0.0]); // warm-up
        assert_eq!(buf.apply(&[30.0]).unwrap(), vec![10.0]);
        assert_eq!(buf.len(), 2);
    }

    #[test]
    fn warm_up_returns_default_action() {
        let mut buf = LatencyBuffer::new(2, vec![7.0]);
        assert_eq!(buf.apply(&[1.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut buf = LatencyBuffer::new(1, vec![0.0, 0.0]);
        assert!(buf.apply(&[1.0]).is_err());
    }

    #[test]
    fn queue_length_is_invariant() {
        let mut buf = LatencyBuffer::new(3, vec![0.0]);
        for k in 0..20 {
            buf.apply(&[k as Real]).unwrap();
            assert_eq!(buf.len(), 3);
        }
    }
}

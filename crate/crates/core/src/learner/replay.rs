use std::collections::VecDeque;

use ndarray::Array2;
use rand::seq::index;
use rand::Rng;

use super::LearnerError;

/// One joint transition `(S, A, R, S')`. States and actions are the
/// per-agent vectors concatenated in agent order.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: Vec<f64>,
    pub next_state: Vec<f64>,
}

/// Mini-batch with one transition per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array2<f64>,
    pub next_states: Array2<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.states.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn from_transitions(items: &[&Transition]) -> Self {
        let stack = |f: &dyn Fn(&Transition) -> &Vec<f64>| -> Array2<f64> {
            let cols = items.first().map_or(0, |t| f(t).len());
            let mut data = Vec::with_capacity(items.len() * cols);
            for t in items {
                data.extend_from_slice(f(t));
            }
            Array2::from_shape_vec((items.len(), cols), data).expect("rectangular batch")
        };
        Self {
            states: stack(&|t| &t.state),
            actions: stack(&|t| &t.action),
            rewards: stack(&|t| &t.reward),
            next_states: stack(&|t| &t.next_state),
        }
    }
}

/// Bounded FIFO of transitions shared by all agents.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// Uniform mini-batch without replacement.
    pub fn sample<R: Rng + ?Sized>(&self, batch_size: usize, rng: &mut R) -> Result<Batch, LearnerError> {
        if self.items.len() < batch_size || batch_size == 0 {
            return Err(LearnerError::EmptyBuffer {
                have: self.items.len(),
                need: batch_size,
            });
        }
        let picks: Vec<&Transition> = index::sample(rng, self.items.len(), batch_size)
            .into_iter()
            .map(|i| &self.items[i])
            .collect();
        Ok(Batch::from_transitions(&picks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(i: usize) -> Transition {
        Transition {
            state: vec![i as f64, 0.0],
            action: vec![i as f64],
            reward: vec![i as f64],
            next_state: vec![i as f64 + 1.0, 0.0],
        }
    }

    #[test]
    fn sampling_needs_a_full_batch() {
        let mut buf = ReplayBuffer::new(10);
        buf.push(tr(0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            buf.sample(2, &mut rng),
            Err(LearnerError::EmptyBuffer { have: 1, need: 2 })
        );
    }

    #[test]
    fn batch_rows_are_distinct() {
        let mut buf = ReplayBuffer::new(50);
        for i in 0..50 {
            buf.push(tr(i));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = buf.sample(50, &mut rng).unwrap();
        let mut ids: Vec<i64> = b.actions.column(0).iter().map(|x| *x as i64).collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..50).collect::<Vec<_>>());
        assert_eq!(b.states.shape(), &[50, 2]);
    }

    proptest! {
        #[test]
        fn oldest_records_are_evicted(cap in 1usize..40, extra in 0usize..40) {
            let mut buf = ReplayBuffer::new(cap);
            for i in 0..cap + extra {
                buf.push(tr(i));
                prop_assert!(buf.len() <= cap);
            }
            let kept: Vec<usize> = buf.iter().map(|t| t.action[0] as usize).collect();
            prop_assert_eq!(kept, (extra..cap + extra).collect::<Vec<_>>());
        }
    }
}

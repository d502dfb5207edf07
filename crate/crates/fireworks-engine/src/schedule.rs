//! Requirement scheduling: fair round-robin with first-attention delays.

/// Round-robin over requirements, skipping blocked ones. The delay vector
/// holds each requirement back until its declared first-attention stage;
/// gate checks beyond that are the caller's (via the `blocked` closure).
#[derive(Clone, Debug)]
pub struct RoundRobin {
    cursor: usize,
    delays: Vec<u64>,
}

impl RoundRobin {
    pub fn new(req_count: usize) -> Self {
        RoundRobin {
            cursor: 0,
            delays: vec![0; req_count],
        }
    }

    pub fn with_delays(delays: Vec<u64>) -> Self {
        RoundRobin { cursor: 0, delays }
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    /// The next eligible requirement at `stage`, advancing the cursor past
    /// it. `None` when every requirement is blocked or delayed.
    pub fn next_eligible(&mut self, stage: u64, blocked: impl Fn(usize) -> bool) -> Option<usize> {
        let n = self.delays.len();
        for probe in 0..n {
            let i = (self.cursor + probe) % n;
            if self.delays[i] <= stage && !blocked(i) {
                self.cursor = (i + 1) % n;
                return Some(i);
            }
        }
        None
    }
}

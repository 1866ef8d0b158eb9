use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Env var that lifts the soft capacity bounds of the exhaustive searches.
pub const CAPACITY_OVERRIDE_ENV: &str = "MIL_CAPACITY_OVERRIDE";

pub fn capacity_override_from_env() -> bool {
    std::env::var(CAPACITY_OVERRIDE_ENV)
        .map(|v| !v.is_empty() && v != "0")
        .unwrap_or(false)
}

/// Wall-clock and node limits shared by the backtracking searches.
#[derive(Clone, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self::unlimited()
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Self {
            deadline: None,
            node_limit: None,
            nodes: 0,
        }
    }

    pub fn time(limit: Duration) -> Self {
        Self {
            deadline: Some(Instant::now() + limit),
            ..Self::unlimited()
        }
    }

    pub fn millis(ms: u64) -> Self {
        Self::time(Duration::from_millis(ms))
    }

    pub fn nodes_limit(limit: u64) -> Self {
        Self {
            node_limit: Some(limit),
            ..Self::unlimited()
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Counts one search node; errors once a limit is hit.
    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            return Err(Error::Budget { nodes: self.nodes });
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Error::Budget { nodes: self.nodes });
        }
        Ok(())
    }
}

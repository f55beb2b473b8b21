use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two charging agents of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agent {
    /// Aerial vehicle flying at a fixed altitude.
    Aav,
    /// Ground vehicle.
    Sv,
}

impl Agent {
    /// Update and iteration order.
    pub const ALL: [Agent; 2] = [Agent::Aav, Agent::Sv];

    pub fn name(self) -> &'static str {
        match self {
            Agent::Aav => "aav",
            Agent::Sv => "sv",
        }
    }

    pub fn other(self) -> Agent {
        match self {
            Agent::Aav => Agent::Sv,
            Agent::Sv => Agent::Aav,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Agent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aav" => Ok(Agent::Aav),
            "sv" => Ok(Agent::Sv),
            other => Err(format!("unknown agent `{other}`")),
        }
    }
}

/// One value per agent; serializes as `{"aav": .., "sv": ..}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PerAgent<T> {
    pub aav: T,
    pub sv: T,
}

impl<T> PerAgent<T> {
    pub fn new(aav: T, sv: T) -> Self {
        Self { aav, sv }
    }

    pub fn from_fn(mut f: impl FnMut(Agent) -> T) -> Self {
        let aav = f(Agent::Aav);
        let sv = f(Agent::Sv);
        Self { aav, sv }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Agent, &T) -> U) -> PerAgent<U> {
        PerAgent {
            aav: f(Agent::Aav, &self.aav),
            sv: f(Agent::Sv, &self.sv),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Agent, &T)> {
        [(Agent::Aav, &self.aav), (Agent::Sv, &self.sv)].into_iter()
    }
}

impl<T> Index<Agent> for PerAgent<T> {
    type Output = T;

    fn index(&self, agent: Agent) -> &T {
        match agent {
            Agent::Aav => &self.aav,
            Agent::Sv => &self.sv,
        }
    }
}

impl<T> IndexMut<Agent> for PerAgent<T> {
    fn index_mut(&mut self, agent: Agent) -> &mut T {
        match agent {
            Agent::Aav => &mut self.aav,
            Agent::Sv => &mut self.sv,
        }
    }
}

use std::fmt;

use crate::cycle_game::{PlayNode, StrategyTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictTag {
    EveWins,
    AdamWins,
    Neither,
    Unknown,
}

impl VerdictTag {
    /// Short lowercase name used in CLI output.
    pub fn key(self) -> &'static str {
        match self {
            VerdictTag::EveWins => "eve",
            VerdictTag::AdamWins => "adam",
            VerdictTag::Neither => "neither",
            VerdictTag::Unknown => "unknown",
        }
    }

    pub fn is_decided(self) -> bool {
        matches!(self, VerdictTag::EveWins | VerdictTag::AdamWins)
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Eve(StrategyTree),
    Adam(StrategyTree),
    /// A non-terminal leaf that neither player can avoid or force.
    DeadLeaf(PlayNode),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub tag: VerdictTag,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn unknown() -> Self {
        Verdict { tag: VerdictTag::Unknown, witness: None }
    }
}

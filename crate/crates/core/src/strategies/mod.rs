//! Defragmentation strategies.
//!
//! All strategies are deterministic and return a [`StrategyReport`] whose move
//! list can be replayed through [`Layout::apply_move`] from the input layout.

mod greedy;
mod left_right_shift;
mod neighborhood;
mod tabu;

use std::fmt;
use std::str::FromStr;

pub use greedy::greedy_defrag;
pub use left_right_shift::{left_right_shift, LrsError};
pub use neighborhood::enumerate_moves;
pub use tabu::{default_tabu_iterations, tabu_capacity, tabu_defrag};

use crate::layout::{Layout, Move};

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    /// Every applied move, in order.
    pub moves: Vec<Move>,
    /// Best layout visited; reached after the first `best_step` moves.
    pub best_layout: Layout,
    pub best_step: usize,
    pub best_max_free: usize,
    pub best_fitness: f64,
    pub iterations_used: usize,
}

impl StrategyReport {
    /// Moves leading from the input to `best_layout`.
    pub fn moves_to_best(&self) -> &[Move] {
        &self.moves[..self.best_step]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    LeftRightShift,
    Greedy,
    Tabu,
}

impl Strategy {
    pub fn run(self, layout: &Layout) -> Result<StrategyReport, LrsError> {
        match self {
            Strategy::LeftRightShift => left_right_shift(layout),
            Strategy::Greedy => Ok(greedy_defrag(layout)),
            Strategy::Tabu => Ok(tabu_defrag(layout, None)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::LeftRightShift => "lrs",
            Strategy::Greedy => "greedy",
            Strategy::Tabu => "tabu",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lrs" => Ok(Strategy::LeftRightShift),
            "greedy" => Ok(Strategy::Greedy),
            "tabu" => Ok(Strategy::Tabu),
            other => Err(format!("unknown strategy {other:?} (expected lrs, greedy or tabu)")),
        }
    }
}

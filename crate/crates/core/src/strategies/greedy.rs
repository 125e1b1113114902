use super::neighborhood::{Candidate, Neighborhood};
use super::StrategyReport;
use crate::layout::{fitness_of, Layout};

/// Applies the best single move until no move enlarges the largest free interval.
pub fn greedy_defrag(layout: &Layout) -> StrategyReport {
    let mut hood = Neighborhood::new(layout.clone());
    let mut moves = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let current = hood.max_free();
        let mut best: Option<(Candidate, usize)> = None;
        for c in hood.candidates() {
            let value = hood.max_free_after(c);
            if best.is_none_or(|(_, v)| value > v) {
                best = Some((c, value));
            }
        }
        match best {
            Some((c, value)) if value > current => {
                moves.push(hood.to_move(c));
                hood.apply(c);
            }
            _ => break,
        }
    }
    let max_free = hood.max_free();
    StrategyReport {
        best_step: moves.len(),
        best_max_free: max_free,
        best_fitness: fitness_of(max_free, hood.free_slots()),
        best_layout: hood.layout().clone(),
        moves,
        iterations_used: rounds,
    }
}

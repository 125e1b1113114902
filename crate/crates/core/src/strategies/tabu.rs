//! Tabu search over single-module relocations.
//!
//! Each iteration applies the best neighbor whose resulting configuration is
//! not in the tabu list, even when it is worse than the current one. The list
//! is a FIFO of the last `max(n / 2, 1)` visited configurations. The search
//! stops at fitness 1.0, after the iteration limit (`2n^2` by default), or
//! when every neighbor is tabu.

use std::collections::VecDeque;

use super::neighborhood::{Candidate, Neighborhood};
use super::StrategyReport;
use crate::layout::{fitness_of, Layout};

pub fn tabu_capacity(modules: usize) -> usize {
    (modules / 2).max(1)
}

pub fn default_tabu_iterations(modules: usize) -> usize {
    2 * modules * modules
}

fn zobrist(module: usize, start: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = ((module as u64) << 32 | start as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct TabuList {
    capacity: usize,
    entries: VecDeque<(u64, Vec<usize>)>,
}

impl TabuList {
    fn contains(&self, hash: u64, current: &[usize], c: Candidate) -> bool {
        self.entries.iter().any(|(h, starts)| {
            *h == hash
                && starts
                    .iter()
                    .enumerate()
                    .all(|(i, &s)| s == if i == c.module { c.start } else { current[i] })
        })
    }

    fn push(&mut self, hash: u64, starts: Vec<usize>) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((hash, starts));
    }
}

/// Runs tabu search; `max_iterations` defaults to `2n^2`.
pub fn tabu_defrag(layout: &Layout, max_iterations: Option<usize>) -> StrategyReport {
    let n = layout.module_count();
    let limit = max_iterations.unwrap_or_else(|| default_tabu_iterations(n));
    let mut hood = Neighborhood::new(layout.clone());
    let mut tabu = TabuList { capacity: tabu_capacity(n), entries: VecDeque::new() };
    let mut hash = layout.starts().iter().enumerate().fold(0, |h, (i, &s)| h ^ zobrist(i, s));

    let mut moves = Vec::new();
    let mut best_layout = layout.clone();
    let mut best_max_free = hood.max_free();
    let mut best_step = 0;
    let mut iterations = 0;

    while iterations < limit && !hood.is_defragmented() {
        let current = hood.layout().starts().to_vec();
        let mut chosen: Option<(Candidate, usize, u64)> = None;
        for c in hood.candidates() {
            let h = hash ^ zobrist(c.module, current[c.module]) ^ zobrist(c.module, c.start);
            if tabu.contains(h, &current, c) {
                continue;
            }
            let value = hood.max_free_after(c);
            if chosen.is_none_or(|(_, v, _)| value > v) {
                chosen = Some((c, value, h));
            }
        }
        let Some((c, value, h)) = chosen else { break };
        moves.push(hood.to_move(c));
        hood.apply(c);
        hash = h;
        tabu.push(h, hood.layout().starts().to_vec());
        iterations += 1;
        if value > best_max_free {
            best_max_free = value;
            best_layout = hood.layout().clone();
            best_step = moves.len();
        }
    }

    StrategyReport {
        moves,
        best_fitness: fitness_of(best_max_free, best_layout.free_slots()),
        best_layout,
        best_step,
        best_max_free,
        iterations_used: iterations,
    }
}

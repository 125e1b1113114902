//! Exact reference by breadth-first search over reachable layouts.
//!
//! States are the start vectors of all modules; successors are every legal
//! single jump of every module. BFS depth is therefore the minimum number of
//! moves. Intended for small instances only.

use rustc_hash::FxHashSet;
use std::hash::Hash;

use crate::layout::Layout;

pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Maximum number of distinct states to visit.
    pub budget: usize,
    /// Treat modules with identical patterns as interchangeable when
    /// deduplicating states. Shrinks the space; off by default.
    pub interchangeable: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: DEFAULT_BUDGET, interchangeable: false }
    }
}

impl OracleOptions {
    pub fn with_budget(budget: usize) -> Self {
        OracleOptions { budget, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum_max_free: usize,
    pub min_moves_to_optimum: usize,
    pub states_explored: usize,
    /// Budget hit; the optimum is then only a lower bound.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reachability {
    Reached { moves: usize, states_explored: usize },
    Unreachable { states_explored: usize },
    Truncated { states_explored: usize },
}

impl Reachability {
    pub fn moves(self) -> Option<usize> {
        match self {
            Reachability::Reached { moves, .. } => Some(moves),
            _ => None,
        }
    }
}

struct Space {
    length: usize,
    sizes: Vec<usize>,
    /// Device-level pattern matches per module.
    pattern_starts: Vec<Vec<usize>>,
    /// Module indices grouped by identical pattern (used when interchangeable).
    groups: Vec<Vec<usize>>,
    interchangeable: bool,
}

impl Space {
    fn new(layout: &Layout, interchangeable: bool) -> Self {
        let modules = layout.modules();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, m) in modules.iter().enumerate() {
            match groups.iter_mut().find(|g| modules[g[0]].pattern() == m.pattern()) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        Space {
            length: layout.device().len(),
            sizes: modules.iter().map(|m| m.size()).collect(),
            pattern_starts: modules.iter().map(|m| layout.device().matching_starts(m.pattern())).collect(),
            groups,
            interchangeable,
        }
    }

    fn canonical(&self, state: &mut [u16]) {
        if !self.interchangeable {
            return;
        }
        for g in self.groups.iter().filter(|g| g.len() > 1) {
            // Insertion sort through the index list; groups are small.
            for a in 1..g.len() {
                let mut b = a;
                while b > 0 && state[g[b - 1]] > state[g[b]] {
                    state.swap(g[b - 1], g[b]);
                    b -= 1;
                }
            }
        }
    }

    /// Per-slot occupancy counts and their prefix sums for `state`.
    fn occupancy(&self, state: &[u16], occ: &mut [u8], prefix: &mut [u32]) {
        occ.fill(0);
        for (i, &s) in state.iter().enumerate() {
            for c in &mut occ[s as usize..s as usize + self.sizes[i]] {
                *c += 1;
            }
        }
        for slot in 0..self.length {
            prefix[slot + 1] = prefix[slot] + u32::from(occ[slot] > 0);
        }
    }

    fn max_free(occ: &[u8]) -> usize {
        let mut best = 0;
        let mut run = 0;
        for &c in occ {
            run = if c == 0 { run + 1 } else { 0 };
            best = best.max(run);
        }
        best
    }

    /// Largest free run after moving module `i` from `from` to `to`.
    fn max_free_after(&self, occ: &mut [u8], i: usize, from: usize, to: usize) -> usize {
        let size = self.sizes[i];
        occ[from..from + size].iter_mut().for_each(|c| *c -= 1);
        occ[to..to + size].iter_mut().for_each(|c| *c += 1);
        let best = Self::max_free(occ);
        occ[to..to + size].iter_mut().for_each(|c| *c -= 1);
        occ[from..from + size].iter_mut().for_each(|c| *c += 1);
        best
    }
}

enum Control {
    Continue,
    Stop,
}

/// Level-synchronous BFS. `on_state(depth, max_free)` is called once per
/// distinct state in BFS order and may stop the search. Returns
/// `(states_explored, truncated)`.
fn bfs<K: Hash + Eq>(
    layout: &Layout,
    options: OracleOptions,
    encode: impl Fn(&[u16]) -> K,
    mut on_state: impl FnMut(usize, usize) -> Control,
) -> (usize, bool) {
    let space = Space::new(layout, options.interchangeable);
    let n = space.sizes.len();
    let mut occ = vec![0u8; space.length];
    let mut prefix = vec![0u32; space.length + 1];
    let mut initial: Vec<u16> = layout.starts().iter().map(|&s| s as u16).collect();
    space.canonical(&mut initial);

    let mut visited: FxHashSet<K> = FxHashSet::default();
    visited.insert(encode(&initial));
    space.occupancy(&initial, &mut occ, &mut prefix);
    if let Control::Stop = on_state(0, Space::max_free(&occ)) {
        return (visited.len(), false);
    }

    let mut frontier: Vec<u16> = initial;
    let mut depth = 0;
    let mut scratch = vec![0u16; n];
    while !frontier.is_empty() && n > 0 {
        depth += 1;
        let mut next: Vec<u16> = Vec::new();
        for state in frontier.chunks_exact(n) {
            space.occupancy(state, &mut occ, &mut prefix);
            for (i, starts) in space.pattern_starts.iter().enumerate() {
                let size = space.sizes[i];
                for &p in starts {
                    if prefix[p + size] != prefix[p] {
                        continue;
                    }
                    scratch.copy_from_slice(state);
                    scratch[i] = p as u16;
                    space.canonical(&mut scratch);
                    if !visited.insert(encode(&scratch)) {
                        continue;
                    }
                    if visited.len() > options.budget {
                        return (visited.len() - 1, true);
                    }
                    let max_free = space.max_free_after(&mut occ, i, state[i] as usize, p);
                    match on_state(depth, max_free) {
                        Control::Continue => next.extend_from_slice(&scratch),
                        Control::Stop => return (visited.len(), false),
                    }
                }
            }
        }
        frontier = next;
    }
    (visited.len(), false)
}

fn packed_key(bits: u32) -> impl Fn(&[u16]) -> u128 {
    move |state| state.iter().fold(0u128, |acc, &s| (acc << bits) | u128::from(s))
}

/// Runs `bfs` with a `u128` key when the state fits, otherwise a vector key.
fn dispatch(
    layout: &Layout,
    options: OracleOptions,
    on_state: impl FnMut(usize, usize) -> Control,
) -> (usize, bool) {
    let length = layout.device().len();
    assert!(length <= usize::from(u16::MAX), "device too long for the oracle");
    let bits = usize::BITS - length.leading_zeros();
    if layout.module_count() * bits as usize <= 128 {
        bfs(layout, options, packed_key(bits), on_state)
    } else {
        bfs(layout, options, |s: &[u16]| s.to_vec(), on_state)
    }
}

/// Best reachable largest free interval and the fewest moves reaching it.
pub fn bfs_optimum(layout: &Layout, options: OracleOptions) -> OracleResult {
    let upper = layout.free_slots();
    let mut best = (0usize, 0usize);
    let (states_explored, truncated) = dispatch(layout, options, |depth, max_free| {
        if depth == 0 || max_free > best.0 {
            best = (max_free, depth);
        }
        if best.0 == upper {
            Control::Stop
        } else {
            Control::Continue
        }
    });
    OracleResult { optimum_max_free: best.0, min_moves_to_optimum: best.1, states_explored, truncated }
}

/// Fewest moves until some free interval has at least `target` slots.
pub fn min_moves_to_size(layout: &Layout, target: usize, options: OracleOptions) -> Reachability {
    let mut found = None;
    let (states_explored, truncated) = dispatch(layout, options, |depth, max_free| {
        if max_free >= target {
            found = Some(depth);
            Control::Stop
        } else {
            Control::Continue
        }
    });
    match (found, truncated) {
        (Some(moves), _) => Reachability::Reached { moves, states_explored },
        (None, true) => Reachability::Truncated { states_explored },
        (None, false) => Reachability::Unreachable { states_explored },
    }
}

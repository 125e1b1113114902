//! Move enumeration shared by the greedy and tabu strategies.

use crate::layout::{FreeInterval, Layout, Move};

/// Candidate relocation: module index (in layout order) and target start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub module: usize,
    pub start: usize,
}

/// Current layout plus the derived data needed to enumerate and score moves.
pub(crate) struct Neighborhood {
    layout: Layout,
    free: Vec<FreeInterval>,
    /// Device-level pattern matches per module, ascending, occupancy ignored.
    pattern_starts: Vec<Vec<usize>>,
    free_slots: usize,
}

impl Neighborhood {
    pub fn new(layout: Layout) -> Self {
        let pattern_starts = layout
            .modules()
            .iter()
            .map(|m| layout.device().matching_starts(m.pattern()))
            .collect();
        let free = layout.free_intervals();
        let free_slots = layout.free_slots();
        Neighborhood { layout, free, pattern_starts, free_slots }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn max_free(&self) -> usize {
        self.free.iter().map(|f| f.size).max().unwrap_or(0)
    }

    pub fn free_slots(&self) -> usize {
        self.free_slots
    }

    pub fn is_defragmented(&self) -> bool {
        self.free.len() <= 1
    }

    /// Moves in enumeration order: modules by id; for a homogeneous module the
    /// leftmost then rightmost feasible start inside each free interval large
    /// enough to hold it, for any other module every feasible start ascending.
    pub fn candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for (module, spec) in self.layout.modules().iter().enumerate() {
            let size = spec.size();
            let matches = &self.pattern_starts[module];
            for f in self.free.iter().filter(|f| f.size >= size) {
                let last = f.end() - size;
                let lo = matches.partition_point(|&s| s < f.start);
                let hi = matches.partition_point(|&s| s <= last);
                let inside = &matches[lo..hi];
                if spec.is_homogeneous() {
                    if let (Some(&left), Some(&right)) = (inside.first(), inside.last()) {
                        out.push(Candidate { module, start: left });
                        if right != left {
                            out.push(Candidate { module, start: right });
                        }
                    }
                } else {
                    out.extend(inside.iter().map(|&start| Candidate { module, start }));
                }
            }
        }
        out
    }

    /// Largest free interval after applying `c`, without materializing it.
    pub fn max_free_after(&self, c: Candidate) -> usize {
        let size = self.layout.modules()[c.module].size();
        let old = self.layout.starts()[c.module];
        let (mut merged_start, mut merged_end) = (old, old + size);
        for f in &self.free {
            if f.end() == old {
                merged_start = f.start;
            }
            if f.start == old + size {
                merged_end = f.end();
            }
        }
        let target = (c.start, c.start + size);
        let remaining = |a: usize, b: usize| -> usize {
            if a <= target.0 && target.1 <= b {
                (target.0 - a).max(b - target.1)
            } else {
                b - a
            }
        };
        let mut best = remaining(merged_start, merged_end);
        for f in &self.free {
            if f.start >= merged_start && f.end() <= merged_end {
                continue;
            }
            best = best.max(remaining(f.start, f.end()));
        }
        best
    }

    pub fn apply(&mut self, c: Candidate) {
        self.layout = self.layout.relocated(c.module, c.start);
        self.free = self.layout.free_intervals();
    }

    pub fn to_move(&self, c: Candidate) -> Move {
        Move { module: self.layout.modules()[c.module].id().clone(), new_start: c.start }
    }
}

/// The deterministic move neighborhood of `layout`.
pub fn enumerate_moves(layout: &Layout) -> Vec<Move> {
    let hood = Neighborhood::new(layout.clone());
    hood.candidates().into_iter().map(|c| hood.to_move(c)).collect()
}

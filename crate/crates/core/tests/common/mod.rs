//! Shared fixtures and brute-force references for the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use fpga_defrag::{Device, Layout, ModuleSpec, Move};
use proptest::prelude::*;

/// 10-slot homogeneous device, M1 (size 2) at 1 and M2 (size 2) at 5.
pub fn fixture_a() -> Layout {
    Layout::new(
        Device::homogeneous(10).unwrap(),
        vec![(ModuleSpec::homogeneous("M1", 2).unwrap(), 1), (ModuleSpec::homogeneous("M2", 2).unwrap(), 5)],
    )
    .unwrap()
}

/// Places modules left to right: skip `gap` slots, then a module of `size`
/// copying the device types it covers. Segments that would cover a
/// separator or would run past the end are dropped.
pub fn layout_from(types: &str, segments: &[(usize, usize)]) -> Layout {
    let device: Device = types.parse().unwrap();
    let chars: Vec<char> = types.chars().collect();
    let mut placements = Vec::new();
    let mut cursor = 0;
    for &(gap, size) in segments {
        let start = cursor + gap;
        if size == 0 || start + size > chars.len() {
            continue;
        }
        let pattern: String = chars[start..start + size].iter().collect();
        if pattern.contains('#') {
            cursor = start + size;
            continue;
        }
        let id = format!("M{:02}", placements.len() + 1);
        placements.push((ModuleSpec::parse(id, &pattern).unwrap(), start));
        cursor = start + size;
    }
    Layout::new(device, placements).unwrap()
}

fn slot_char() -> impl Strategy<Value = char> {
    prop_oneof![8 => Just('l'), 2 => Just('m'), 1 => Just('#')]
}

/// Device type string of length `lengths`, homogeneous or mixed.
pub fn arb_types(lengths: std::ops::RangeInclusive<usize>, mixed: bool) -> impl Strategy<Value = String> {
    lengths.prop_flat_map(move |len| {
        if mixed {
            proptest::collection::vec(slot_char(), len).prop_map(|v| v.into_iter().collect()).boxed()
        } else {
            Just("l".repeat(len)).boxed()
        }
    })
}

pub fn arb_layout(
    lengths: std::ops::RangeInclusive<usize>,
    max_modules: usize,
    mixed: bool,
) -> impl Strategy<Value = Layout> {
    (arb_types(lengths, mixed), proptest::collection::vec((0usize..3, 1usize..5), 1..=max_modules))
        .prop_map(|(types, segments)| layout_from(&types, &segments))
}

/// Slot-by-slot occupancy computed from placements only.
pub fn occupied(layout: &Layout) -> Vec<bool> {
    let mut occ = vec![false; layout.device().len()];
    for (spec, start) in layout.placements() {
        for slot in start..start + spec.size() {
            assert!(!occ[slot], "overlap at {slot}");
            occ[slot] = true;
        }
    }
    occ
}

/// Maximal free runs as `(start, size)`.
pub fn free_runs(layout: &Layout) -> Vec<(usize, usize)> {
    let occ = occupied(layout);
    let mut runs = Vec::new();
    let mut slot = 0;
    while slot < occ.len() {
        if occ[slot] {
            slot += 1;
            continue;
        }
        let start = slot;
        while slot < occ.len() && !occ[slot] {
            slot += 1;
        }
        runs.push((start, slot - start));
    }
    runs
}

pub fn max_run(layout: &Layout) -> usize {
    free_runs(layout).iter().map(|r| r.1).max().unwrap_or(0)
}

/// Every start where the module's pattern matches the device and all slots
/// are currently free, checked slot by slot.
pub fn brute_feasible(layout: &Layout, index: usize) -> Vec<usize> {
    let occ = occupied(layout);
    let spec = &layout.modules()[index];
    let types = layout.device().slot_types();
    let size = spec.size();
    (0..layout.device().len())
        .filter(|&p| p + size <= types.len())
        .filter(|&p| (0..size).all(|k| !occ[p + k] && types[p + k] == spec.pattern()[k]))
        .collect()
}

pub fn brute_moves(layout: &Layout) -> Vec<Move> {
    (0..layout.module_count())
        .flat_map(|i| {
            let id = layout.modules()[i].id().clone();
            brute_feasible(layout, i).into_iter().map(move |p| Move::new(id.clone(), p))
        })
        .collect()
}

/// Reference optimum `(best max free, fewest moves to reach it)` by plain BFS
/// over `Layout` values with the brute-force move generator.
pub fn reference_optimum(layout: &Layout) -> (usize, usize) {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(layout.starts().to_vec());
    let mut queue = VecDeque::from([(layout.clone(), 0usize)]);
    let mut best = (max_run(layout), 0);
    while let Some((current, depth)) = queue.pop_front() {
        for mv in brute_moves(&current) {
            let next = current.apply_move(&mv).unwrap();
            if seen.insert(next.starts().to_vec()) {
                let value = max_run(&next);
                if value > best.0 {
                    best = (value, depth + 1);
                }
                queue.push_back((next, depth + 1));
            }
        }
    }
    best
}

/// Whether `values` can be split into groups of three, each summing to `bound`.
pub fn three_partition_solvable(values: &[usize], bound: usize) -> bool {
    fn go(rest: &mut Vec<usize>, bound: usize) -> bool {
        if rest.is_empty() {
            return true;
        }
        let first = rest.remove(0);
        for a in 0..rest.len() {
            for b in a + 1..rest.len() {
                if first + rest[a] + rest[b] == bound {
                    let mut remaining = rest.clone();
                    remaining.remove(b);
                    remaining.remove(a);
                    if go(&mut remaining, bound) {
                        return true;
                    }
                }
            }
        }
        rest.insert(0, first);
        false
    }
    values.len() % 3 == 0 && go(&mut values.to_vec(), bound)
}

/// LeftRightShift density bound in integer form: `2 * occupied <= length - largest module`.
pub fn lrs_bound_holds(layout: &Layout) -> bool {
    let largest = layout.modules().iter().map(ModuleSpec::size).max().unwrap_or(0);
    2 * layout.occupied_slots() + largest <= layout.device().len()
}

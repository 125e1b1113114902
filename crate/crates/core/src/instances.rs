//! Seeded random layouts and the adversarial constructions.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`, which is portable across
//! platforms, so a `(device, target_density, seed)` triple always produces the
//! same layout.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::device::{Device, DeviceError, SlotType};
use crate::layout::{Layout, ModuleSpec};

/// Generator RNG. Fixed so that seeds reproduce across platforms.
pub type InstanceRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("target density {0} must lie in [0, 1)")]
    InvalidDensity(f64),
    #[error("n must be even and at least 2, got {0}")]
    InvalidModuleCount(usize),
    #[error("expected a positive multiple of 3 elements, got {0}")]
    WrongElementCount(usize),
    #[error("bound B must be positive")]
    ZeroBound,
    #[error("element {index} = {value} is not strictly between B/4 and B/2 (B = {bound})")]
    ElementOutOfRange { index: usize, value: usize, bound: usize },
    #[error("elements sum to {sum}, expected k*B = {expected}")]
    SumMismatch { sum: usize, expected: usize },
    #[error("B = {0} is not divisible by 4")]
    BoundNotDivisibleByFour(usize),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub device: Device,
    pub target_density: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub layout: Layout,
    pub actual_density: f64,
    /// Set when no module fit any more before the target density was reached.
    pub density_unreachable: bool,
}

fn module_id(index: usize, width: usize) -> String {
    format!("M{index:0width$}")
}

/// Longest run of free slots that contains no separator.
fn longest_placeable_run(device: &Device, occupied: &[bool]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (slot, &taken) in occupied.iter().enumerate() {
        let usable = !taken && !device.slot_types()[slot].is_separator();
        run = if usable { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

fn placeable_starts(device: &Device, occupied: &[bool], size: usize) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut run = 0;
    for (slot, &taken) in occupied.iter().enumerate() {
        let usable = !taken && !device.slot_types()[slot].is_separator();
        run = if usable { run + 1 } else { 0 };
        if run >= size {
            starts.push(slot + 1 - size);
        }
    }
    starts
}

/// Fills the device with random modules until the density target is met.
///
/// Each module size is uniform on `1..=f` where `f` is the current largest
/// free interval (the first module's draw is scaled by 0.6, rounded down, at
/// least 1); its start is uniform over all free positions; its pattern copies
/// the device slot types it covers.
pub fn random_instance(params: &GenParams) -> Result<GeneratedInstance, GenError> {
    let target = params.target_density;
    if !(0.0..1.0).contains(&target) {
        return Err(GenError::InvalidDensity(target));
    }
    let device = &params.device;
    let length = device.len();
    let mut rng = InstanceRng::seed_from_u64(params.seed);
    let mut occupied = vec![false; length];
    let mut used = 0usize;
    let mut placements: Vec<(ModuleSpec, usize)> = Vec::new();
    let width = length.to_string().len();
    let mut unreachable = false;

    while (used as f64) / (length as f64) < target {
        let largest = longest_placeable_run(device, &occupied);
        if largest == 0 {
            unreachable = true;
            break;
        }
        let mut size = rng.random_range(1..=largest);
        if placements.is_empty() {
            size = ((size as f64 * 0.6).floor() as usize).max(1);
        }
        let starts = placeable_starts(device, &occupied, size);
        let start = starts[rng.random_range(0..starts.len())];
        let pattern = device.slot_types()[start..start + size].to_vec();
        let spec = ModuleSpec::new(module_id(placements.len() + 1, width), pattern)
            .expect("pattern copied from non-separator slots");
        occupied[start..start + size].fill(true);
        used += size;
        placements.push((spec, start));
    }

    let layout = Layout::new(device.clone(), placements).expect("generator respects occupancy");
    Ok(GeneratedInstance { actual_density: layout.density(), layout, density_unreachable: unreachable })
}

/// Sizes of the quadratic lower-bound instance: `n, n-2, ..., 2, 2, ..., n`.
pub fn lower_bound_sizes(n: usize) -> Vec<usize> {
    let half: Vec<usize> = (1..=n / 2).map(|j| n + 2 - 2 * j).collect();
    half.iter().chain(half.iter().rev()).copied().collect()
}

/// Mirrored staircase of `n` modules separated by single free slots, with a
/// gap of two in the middle and one free slot at each end.
pub fn lower_bound_instance(n: usize) -> Result<Layout, GenError> {
    if n < 2 || n % 2 != 0 {
        return Err(GenError::InvalidModuleCount(n));
    }
    let sizes = lower_bound_sizes(n);
    let length = sizes.iter().sum::<usize>() + n + 2;
    let width = n.to_string().len();
    let mut cursor = 1;
    let mut placements = Vec::with_capacity(n);
    for (j, &size) in sizes.iter().enumerate() {
        placements.push((ModuleSpec::homogeneous(module_id(j + 1, width), size).expect("size > 0"), cursor));
        cursor += size + if j + 1 == n / 2 { 2 } else { 1 };
    }
    Ok(Layout::new(Device::homogeneous(length)?, placements).expect("construction is valid"))
}

fn check_three_partition(c: &[usize], bound: usize) -> Result<usize, GenError> {
    if c.is_empty() || c.len() % 3 != 0 {
        return Err(GenError::WrongElementCount(c.len()));
    }
    if bound == 0 {
        return Err(GenError::ZeroBound);
    }
    for (index, &value) in c.iter().enumerate() {
        if 4 * value <= bound || 2 * value >= bound {
            return Err(GenError::ElementOutOfRange { index, value, bound });
        }
    }
    let k = c.len() / 3;
    let sum: usize = c.iter().sum();
    if sum != k * bound {
        return Err(GenError::SumMismatch { sum, expected: k * bound });
    }
    Ok(k)
}

#[derive(Clone, Copy)]
enum Segment {
    Module(usize),
    Gap(usize),
}

impl Segment {
    fn len(self) -> usize {
        match self {
            Segment::Module(n) | Segment::Gap(n) => n,
        }
    }
}

/// Lays out homogeneous modules and gaps left to right.
fn build_segments(segments: &[Segment]) -> Layout {
    let length: usize = segments.iter().map(|s| s.len()).sum();
    let modules = segments.iter().filter(|s| matches!(s, Segment::Module(_))).count();
    let width = modules.to_string().len();
    let mut cursor = 0;
    let mut placements = Vec::with_capacity(modules);
    for &segment in segments {
        if let Segment::Module(size) = segment {
            let id = module_id(placements.len() + 1, width);
            placements.push((ModuleSpec::homogeneous(id, size).expect("size > 0"), cursor));
        }
        cursor += segment.len();
    }
    let device = Arc::new(Device::homogeneous(length).expect("non-empty"));
    Layout::with_shared_device(device, placements).expect("construction is valid")
}

fn gadget_segments(c: &[usize], bound: usize, k: usize, blocker: usize) -> Vec<Segment> {
    let mut segments: Vec<Segment> = c.iter().map(|&ci| Segment::Module(ci)).collect();
    segments.push(Segment::Module(blocker));
    for _ in 0..k {
        segments.push(Segment::Gap(bound));
        segments.push(Segment::Module(blocker));
    }
    segments
}

/// 3-Partition gadget: the `3k` element modules packed at the left, then
/// `k + 1` immovable modules of size `kB + 1` alternating with `k` gaps of
/// size `B`. Returns the layout and the target size `K = kB`.
pub fn three_partition_instance(c: &[usize], bound: usize) -> Result<(Layout, usize), GenError> {
    let k = check_three_partition(c, bound)?;
    let layout = build_segments(&gadget_segments(c, bound, k, k * bound + 1));
    Ok((layout, k * bound))
}

/// The 3-Partition gadget with blockers of size `N = kB + 1 + rB/2`, followed
/// by `r` groups of `[gap B/4, module kB + (i-1)B/2, gap B/4, module N]`.
pub fn inapprox_instance(c: &[usize], bound: usize, r: usize) -> Result<Layout, GenError> {
    let k = check_three_partition(c, bound)?;
    if bound % 4 != 0 {
        return Err(GenError::BoundNotDivisibleByFour(bound));
    }
    let blocker = k * bound + 1 + r * bound / 2;
    let mut segments = gadget_segments(c, bound, k, blocker);
    for i in 1..=r {
        segments.push(Segment::Gap(bound / 4));
        segments.push(Segment::Module(k * bound + (i - 1) * bound / 2));
        segments.push(Segment::Gap(bound / 4));
        segments.push(Segment::Module(blocker));
    }
    Ok(build_segments(&segments))
}

/// Concatenates rows into one device with a `#` separator slot between rows.
pub fn flatten_two_dimensional(rows: &[Vec<SlotType>]) -> Result<Device, GenError> {
    let width = rows.first().map(Vec::len).ok_or(DeviceError::EmptyDevice)?;
    let mut slots = Vec::with_capacity(rows.len() * (width + 1));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(DeviceError::RaggedRows { expected: width, found: row.len() }.into());
        }
        if i > 0 {
            slots.push(SlotType::SEPARATOR);
        }
        slots.extend_from_slice(row);
    }
    Ok(Device::from_slot_types(slots)?)
}

/// Parses rows given as slot-type strings, then flattens them.
pub fn flatten_rows(rows: &[&str]) -> Result<Device, GenError> {
    let parsed = rows
        .iter()
        .map(|r| r.chars().map(SlotType::from_char).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    flatten_two_dimensional(&parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(layout: &Layout) -> Vec<usize> {
        let mut by_start: Vec<_> = layout.placements().map(|(m, s)| (s, m.size())).collect();
        by_start.sort();
        by_start.into_iter().map(|(_, size)| size).collect()
    }

    fn free_sizes(layout: &Layout) -> Vec<usize> {
        layout.free_intervals().iter().map(|f| f.size).collect()
    }

    #[test]
    fn lower_bound_examples() {
        let l8 = lower_bound_instance(8).unwrap();
        assert_eq!(sizes(&l8), vec![8, 6, 4, 2, 2, 4, 6, 8]);
        assert_eq!(l8.device().len(), 50);
        assert_eq!(free_sizes(&l8), vec![1, 1, 1, 1, 2, 1, 1, 1, 1]);

        let l2 = lower_bound_instance(2).unwrap();
        assert_eq!(sizes(&l2), vec![2, 2]);
        assert_eq!(free_sizes(&l2), vec![1, 2, 1]);
        assert_eq!(l2.device().len(), 8);

        let l4 = lower_bound_instance(4).unwrap();
        assert_eq!(sizes(&l4), vec![4, 2, 2, 4]);
        assert_eq!(l4.device().len(), 18);

        for n in (2..=20).step_by(2) {
            assert_eq!(lower_bound_instance(n).unwrap().device().len(), n * n / 2 + 2 * n + 2);
        }
        assert_eq!(lower_bound_instance(3).unwrap_err(), GenError::InvalidModuleCount(3));
        assert_eq!(lower_bound_instance(0).unwrap_err(), GenError::InvalidModuleCount(0));
    }

    #[test]
    fn lower_bound_only_middle_pair_can_move() {
        let l = lower_bound_instance(6).unwrap();
        for (i, spec) in l.modules().iter().enumerate() {
            let movable = !l.feasible_positions(spec.id()).unwrap().is_empty();
            assert_eq!(movable, i == 2 || i == 3, "module {i}");
        }
    }

    #[test]
    fn three_partition_examples() {
        let (l, k) = three_partition_instance(&[3, 3, 4], 10).unwrap();
        assert_eq!(sizes(&l), vec![3, 3, 4, 11, 11]);
        assert_eq!(free_sizes(&l), vec![10]);
        assert_eq!(k, 10);

        let (l, k) = three_partition_instance(&[5, 5, 5, 5, 5, 7], 16).unwrap();
        assert_eq!(k, 32);
        assert_eq!(l.free_slots(), 32);
        for spec in l.modules().iter().filter(|m| m.size() == 33) {
            assert!(l.feasible_positions(spec.id()).unwrap().is_empty());
        }

        assert_eq!(
            three_partition_instance(&[1, 1, 2], 4).unwrap_err(),
            GenError::ElementOutOfRange { index: 0, value: 1, bound: 4 }
        );
        assert_eq!(three_partition_instance(&[3, 3], 10).unwrap_err(), GenError::WrongElementCount(2));
        assert_eq!(
            three_partition_instance(&[3, 3, 3], 10).unwrap_err(),
            GenError::SumMismatch { sum: 9, expected: 10 }
        );
    }

    #[test]
    fn inapprox_examples() {
        let l = inapprox_instance(&[4, 4, 4], 12, 2).unwrap();
        assert_eq!(l.device().len(), 166);
        assert_eq!(sizes(&l), vec![4, 4, 4, 25, 25, 12, 25, 18, 25]);
        assert_eq!(free_sizes(&l), vec![12, 3, 3, 3, 3]);

        let degenerate = inapprox_instance(&[4, 4, 4], 12, 0).unwrap();
        let (gadget, _) = three_partition_instance(&[4, 4, 4], 12).unwrap();
        assert_eq!(degenerate, gadget);

        assert_eq!(inapprox_instance(&[3, 3, 4], 10, 1).unwrap_err(), GenError::BoundNotDivisibleByFour(10));
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten_rows(&["lllll", "lllll"]).unwrap().types_string(), "lllll#lllll");
        assert_eq!(flatten_rows(&["lml"]).unwrap().types_string(), "lml");
        assert_eq!(flatten_rows(&["llm", "lll"]).unwrap().types_string(), "llm#lll");
        assert!(matches!(flatten_rows(&["ll", "lll"]), Err(GenError::Device(DeviceError::RaggedRows { .. }))));
    }

    #[test]
    fn random_instance_basics() {
        let params = GenParams { device: Device::het94(), target_density: 0.5, seed: 1 };
        let a = random_instance(&params).unwrap();
        assert!(a.actual_density >= 0.5);
        assert!(!a.density_unreachable);
        let b = random_instance(&params).unwrap();
        assert_eq!(a.layout, b.layout);
        for (spec, start) in a.layout.placements() {
            assert!(a.layout.device().pattern_fits(spec.pattern(), start));
        }

        let tiny = GenParams { device: Device::homogeneous94(), target_density: 0.005, seed: 3 };
        assert!(random_instance(&tiny).unwrap().layout.module_count() <= 1);
        let zero = GenParams { device: Device::homogeneous94(), target_density: 0.0, seed: 3 };
        assert_eq!(random_instance(&zero).unwrap().layout.module_count(), 0);

        let bad = GenParams { device: Device::homogeneous94(), target_density: 1.0, seed: 3 };
        assert_eq!(random_instance(&bad).unwrap_err(), GenError::InvalidDensity(1.0));
    }

    #[test]
    fn random_instance_never_covers_separators() {
        let device = flatten_rows(&["llll", "llll", "llll"]).unwrap();
        for seed in 0..50 {
            let g = random_instance(&GenParams { device: device.clone(), target_density: 0.7, seed }).unwrap();
            for (spec, _) in g.layout.placements() {
                assert!(!spec.pattern().iter().any(|t| t.is_separator()));
            }
        }
    }
}

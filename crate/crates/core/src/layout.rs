//! Module placements on a device, free intervals and relocation moves.
//!
//! A module occupies the half-open slot range `[start, start + size)`. A move
//! is a jump: the target range must be disjoint from every occupied range,
//! including the module's own current one, and the module's pattern must match
//! the device slot types under the target range.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::device::{Device, SlotType};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleId(String);

impl ModuleId {
    pub fn new(id: impl Into<String>) -> Self {
        ModuleId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ModuleId {
    fn from(s: &str) -> Self {
        ModuleId(s.to_owned())
    }
}

/// A module's identity and per-slot resource requirement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleSpec {
    id: ModuleId,
    pattern: Vec<SlotType>,
}

impl ModuleSpec {
    pub fn new(id: impl Into<ModuleId>, pattern: Vec<SlotType>) -> Result<Self, LayoutError> {
        let id = id.into();
        if pattern.is_empty() {
            return Err(LayoutError::EmptyPattern(id));
        }
        if pattern.iter().any(|t| t.is_separator()) {
            return Err(LayoutError::SeparatorInPattern(id));
        }
        Ok(ModuleSpec { id, pattern })
    }

    /// Parses a pattern string such as `"llml"`.
    pub fn parse(id: impl Into<ModuleId>, pattern: &str) -> Result<Self, LayoutError> {
        let id = id.into();
        let pattern = pattern
            .chars()
            .map(SlotType::from_char)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| LayoutError::InvalidPattern(id.clone()))?;
        Self::new(id, pattern)
    }

    pub fn homogeneous(id: impl Into<ModuleId>, size: usize) -> Result<Self, LayoutError> {
        Self::new(id, vec![SlotType::LOGIC; size])
    }

    pub fn id(&self) -> &ModuleId {
        &self.id
    }

    pub fn pattern(&self) -> &[SlotType] {
        &self.pattern
    }

    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|t| t.as_char()).collect()
    }

    pub fn size(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.pattern.iter().all(|&t| t == SlotType::LOGIC)
    }
}

impl From<String> for ModuleId {
    fn from(s: String) -> Self {
        ModuleId(s)
    }
}

/// A maximal run of unoccupied slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeInterval {
    pub start: usize,
    pub size: usize,
}

impl FreeInterval {
    pub fn end(&self) -> usize {
        self.start + self.size
    }
}

/// Relocation of one module to a new start slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub module: ModuleId,
    pub new_start: usize,
}

impl Move {
    pub fn new(module: impl Into<ModuleId>, new_start: usize) -> Self {
        Move { module: module.into(), new_start }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "move {} {}", self.module, self.new_start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("module {0} has an empty pattern")]
    EmptyPattern(ModuleId),
    #[error("module {0} has an invalid pattern")]
    InvalidPattern(ModuleId),
    #[error("module {0} pattern contains the separator tag '#'")]
    SeparatorInPattern(ModuleId),
    #[error("duplicate module id {0}")]
    DuplicateId(ModuleId),
    #[error("module {id} at {start} exceeds device length {length}")]
    OutOfBounds { id: ModuleId, start: usize, length: usize },
    #[error("module {id} pattern does not match device at slot {slot}")]
    PatternMismatch { id: ModuleId, slot: usize },
    #[error("modules {first} and {second} overlap")]
    Overlap { first: ModuleId, second: ModuleId },
    #[error("unknown module {0}")]
    UnknownModule(ModuleId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("unknown module {0}")]
    UnknownModule(ModuleId),
    #[error("target [{start}, {end}) lies outside the device")]
    OutOfBounds { start: usize, end: usize },
    #[error("target of {0} overlaps its own current interval")]
    SelfOverlap(ModuleId),
    #[error("target of {module} overlaps module {other}")]
    Overlap { module: ModuleId, other: ModuleId },
    #[error("pattern of {module} does not match device at slot {slot}")]
    PatternMismatch { module: ModuleId, slot: usize },
}

/// A validated placement of modules on a device.
///
/// Modules are kept sorted by id; that order is the module order used for
/// deterministic tie-breaking everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    device: Arc<Device>,
    modules: Arc<[ModuleSpec]>,
    starts: Vec<usize>,
}

impl Layout {
    pub fn new(device: Device, placements: Vec<(ModuleSpec, usize)>) -> Result<Self, LayoutError> {
        Self::with_shared_device(Arc::new(device), placements)
    }

    pub fn with_shared_device(
        device: Arc<Device>,
        mut placements: Vec<(ModuleSpec, usize)>,
    ) -> Result<Self, LayoutError> {
        placements.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        for pair in placements.windows(2) {
            if pair[0].0.id == pair[1].0.id {
                return Err(LayoutError::DuplicateId(pair[0].0.id.clone()));
            }
        }
        for (spec, start) in &placements {
            if start + spec.size() > device.len() {
                return Err(LayoutError::OutOfBounds {
                    id: spec.id.clone(),
                    start: *start,
                    length: device.len(),
                });
            }
            if let Some(slot) = device.first_mismatch(&spec.pattern, *start) {
                return Err(LayoutError::PatternMismatch { id: spec.id.clone(), slot });
            }
        }
        let mut by_start: Vec<usize> = (0..placements.len()).collect();
        by_start.sort_by_key(|&i| placements[i].1);
        for pair in by_start.windows(2) {
            let (a, b) = (&placements[pair[0]], &placements[pair[1]]);
            if a.1 + a.0.size() > b.1 {
                return Err(LayoutError::Overlap { first: a.0.id.clone(), second: b.0.id.clone() });
            }
        }
        let (modules, starts): (Vec<_>, Vec<_>) = placements.into_iter().unzip();
        Ok(Layout { device, modules: modules.into(), starts })
    }

    pub fn empty(device: Device) -> Self {
        Layout { device: Arc::new(device), modules: Arc::new([]), starts: Vec::new() }
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    pub fn shared_device(&self) -> &Arc<Device> {
        &self.device
    }

    /// Module specs in module (id) order.
    pub fn modules(&self) -> &[ModuleSpec] {
        &self.modules
    }

    /// Start slots, parallel to [`Layout::modules`].
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    pub fn placements(&self) -> impl Iterator<Item = (&ModuleSpec, usize)> + '_ {
        self.modules.iter().zip(self.starts.iter().copied())
    }

    pub fn index_of(&self, id: &ModuleId) -> Option<usize> {
        self.modules.binary_search_by(|m| m.id.cmp(id)).ok()
    }

    pub fn start_of(&self, id: &ModuleId) -> Option<usize> {
        self.index_of(id).map(|i| self.starts[i])
    }

    pub fn module(&self, id: &ModuleId) -> Option<&ModuleSpec> {
        self.index_of(id).map(|i| &self.modules[i])
    }

    /// Slot owner map: `Some(module index)` for occupied slots.
    pub fn occupancy(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.device.len()];
        for (i, (spec, start)) in self.placements().enumerate() {
            owner[start..start + spec.size()].fill(Some(i));
        }
        owner
    }

    pub fn occupied_slots(&self) -> usize {
        self.modules.iter().map(ModuleSpec::size).sum()
    }

    pub fn free_slots(&self) -> usize {
        self.device.len() - self.occupied_slots()
    }

    /// Maximal unoccupied runs, left to right. Unoccupied heterogeneity slots
    /// count as free.
    pub fn free_intervals(&self) -> Vec<FreeInterval> {
        let mut occupied: Vec<(usize, usize)> = self
            .placements()
            .map(|(spec, start)| (start, start + spec.size()))
            .collect();
        occupied.sort_unstable();
        let mut free = Vec::with_capacity(occupied.len() + 1);
        let mut cursor = 0;
        for (start, end) in occupied {
            if start > cursor {
                free.push(FreeInterval { start: cursor, size: start - cursor });
            }
            cursor = end;
        }
        if cursor < self.device.len() {
            free.push(FreeInterval { start: cursor, size: self.device.len() - cursor });
        }
        free
    }

    pub fn max_free_interval(&self) -> usize {
        self.free_intervals().iter().map(|f| f.size).max().unwrap_or(0)
    }

    /// Largest free interval divided by total free slots; 1.0 when packed.
    pub fn fitness(&self) -> f64 {
        fitness_of(self.max_free_interval(), self.free_slots())
    }

    pub fn density(&self) -> f64 {
        self.occupied_slots() as f64 / self.device.len() as f64
    }

    /// Every start the module could jump to. The current position is never
    /// included since the target must be disjoint from the module's own slots.
    pub fn feasible_positions(&self, id: &ModuleId) -> Result<Vec<usize>, LayoutError> {
        let index = self.index_of(id).ok_or_else(|| LayoutError::UnknownModule(id.clone()))?;
        Ok(self.feasible_positions_of(index))
    }

    pub(crate) fn feasible_positions_of(&self, index: usize) -> Vec<usize> {
        let spec = &self.modules[index];
        let owner = self.occupancy();
        let size = spec.size();
        let length = self.device.len();
        if size > length {
            return Vec::new();
        }
        // Run length of free slots ending at each position.
        let mut run = 0;
        let mut positions = Vec::new();
        for slot in 0..length {
            run = if owner[slot].is_none() { run + 1 } else { 0 };
            if run >= size {
                let start = slot + 1 - size;
                if self.device.pattern_fits(&spec.pattern, start) {
                    positions.push(start);
                }
            }
        }
        positions
    }

    /// Leftmost start where `pattern` fits on free slots, if any.
    pub fn first_fit(&self, pattern: &[SlotType]) -> Option<usize> {
        let owner = self.occupancy();
        let size = pattern.len();
        let mut run = 0;
        for slot in 0..owner.len() {
            run = if owner[slot].is_none() { run + 1 } else { 0 };
            if run >= size && self.device.pattern_fits(pattern, slot + 1 - size) {
                return Some(slot + 1 - size);
            }
        }
        None
    }

    pub fn apply_move(&self, mv: &Move) -> Result<Layout, MoveError> {
        let index = self
            .index_of(&mv.module)
            .ok_or_else(|| MoveError::UnknownModule(mv.module.clone()))?;
        let spec = &self.modules[index];
        let (start, end) = (mv.new_start, mv.new_start + spec.size());
        if end > self.device.len() {
            return Err(MoveError::OutOfBounds { start, end });
        }
        let current = self.starts[index];
        if start < current + spec.size() && current < end {
            return Err(MoveError::SelfOverlap(mv.module.clone()));
        }
        for (other, (o_spec, o_start)) in self.placements().enumerate() {
            if other != index && start < o_start + o_spec.size() && o_start < end {
                return Err(MoveError::Overlap { module: mv.module.clone(), other: o_spec.id.clone() });
            }
        }
        if let Some(slot) = self.device.first_mismatch(&spec.pattern, start) {
            return Err(MoveError::PatternMismatch { module: mv.module.clone(), slot });
        }
        Ok(self.relocated(index, start))
    }

    /// Unchecked relocation of the module at `index`.
    pub(crate) fn relocated(&self, index: usize, start: usize) -> Layout {
        let mut starts = self.starts.clone();
        starts[index] = start;
        Layout { device: Arc::clone(&self.device), modules: Arc::clone(&self.modules), starts }
    }

    /// Adds a module, validating it against the current placements.
    pub fn with_module(&self, spec: ModuleSpec, start: usize) -> Result<Layout, LayoutError> {
        let mut placements: Vec<(ModuleSpec, usize)> =
            self.placements().map(|(s, p)| (s.clone(), p)).collect();
        placements.push((spec, start));
        Self::with_shared_device(Arc::clone(&self.device), placements)
    }

    pub fn without_module(&self, id: &ModuleId) -> Result<Layout, LayoutError> {
        let index = self.index_of(id).ok_or_else(|| LayoutError::UnknownModule(id.clone()))?;
        let mut modules = self.modules.to_vec();
        let mut starts = self.starts.clone();
        modules.remove(index);
        starts.remove(index);
        Ok(Layout { device: Arc::clone(&self.device), modules: modules.into(), starts })
    }
}

pub(crate) fn fitness_of(max_free: usize, free_slots: usize) -> f64 {
    if free_slots == 0 {
        1.0
    } else {
        max_free as f64 / free_slots as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn fixture_a() -> Layout {
        Layout::new(
            Device::homogeneous(10).unwrap(),
            vec![
                (ModuleSpec::homogeneous("M1", 2).unwrap(), 1),
                (ModuleSpec::homogeneous("M2", 2).unwrap(), 5),
            ],
        )
        .unwrap()
    }

    fn packed() -> Layout {
        Layout::new(
            Device::homogeneous(6).unwrap(),
            vec![
                (ModuleSpec::homogeneous("A", 4).unwrap(), 0),
                (ModuleSpec::homogeneous("B", 2).unwrap(), 4),
            ],
        )
        .unwrap()
    }

    fn fi(start: usize, size: usize) -> FreeInterval {
        FreeInterval { start, size }
    }

    #[test]
    fn build_layout_errors() {
        let dev: Device = "llmll".parse().unwrap();
        let err = Layout::new(dev, vec![(ModuleSpec::homogeneous("M1", 2).unwrap(), 1)]).unwrap_err();
        assert_eq!(err, LayoutError::PatternMismatch { id: "M1".into(), slot: 2 });

        let dev = Device::homogeneous(10).unwrap();
        let err = Layout::new(
            dev.clone(),
            vec![
                (ModuleSpec::homogeneous("M1", 2).unwrap(), 1),
                (ModuleSpec::homogeneous("M2", 2).unwrap(), 2),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, LayoutError::Overlap { .. }));

        let err = Layout::new(dev.clone(), vec![(ModuleSpec::homogeneous("M1", 3).unwrap(), 8)]).unwrap_err();
        assert!(matches!(err, LayoutError::OutOfBounds { .. }));

        let err = Layout::new(
            dev,
            vec![
                (ModuleSpec::homogeneous("M1", 1).unwrap(), 0),
                (ModuleSpec::homogeneous("M1", 1).unwrap(), 5),
            ],
        )
        .unwrap_err();
        assert_eq!(err, LayoutError::DuplicateId("M1".into()));

        assert!(ModuleSpec::parse("X", "l#l").is_err());
        assert!(ModuleSpec::parse("X", "").is_err());
    }

    #[test]
    fn free_intervals_and_metrics() {
        let a = fixture_a();
        assert_eq!(a.free_intervals(), vec![fi(0, 1), fi(3, 2), fi(7, 3)]);
        assert_eq!(a.max_free_interval(), 3);
        assert_eq!(a.fitness(), 0.5);
        assert_eq!(a.density(), 0.4);

        let empty = Layout::empty(Device::homogeneous(10).unwrap());
        assert_eq!(empty.free_intervals(), vec![fi(0, 10)]);
        assert_eq!(empty.max_free_interval(), 10);
        assert_eq!(empty.fitness(), 1.0);
        assert_eq!(empty.density(), 0.0);

        let p = packed();
        assert!(p.free_intervals().is_empty());
        assert_eq!(p.max_free_interval(), 0);
        assert_eq!(p.fitness(), 1.0);
        assert_eq!(p.density(), 1.0);
    }

    #[test]
    fn heterogeneity_slots_count_as_free() {
        let dev = Device::new(6, &BTreeMap::from([(2, SlotType::MEMORY)])).unwrap();
        let l = Layout::new(dev, vec![(ModuleSpec::homogeneous("A", 2).unwrap(), 4)]).unwrap();
        assert_eq!(l.free_intervals(), vec![fi(0, 4)]);
    }

    #[test]
    fn feasible_positions_examples() {
        let a = fixture_a();
        assert_eq!(a.feasible_positions(&"M2".into()).unwrap(), vec![3, 7, 8]);
        assert!(matches!(a.feasible_positions(&"X".into()), Err(LayoutError::UnknownModule(_))));

        // The only other "ml" window is (1,2), and slot 2 is taken.
        let dev: Device = "lmlmll".parse().unwrap();
        let l = Layout::new(
            dev,
            vec![
                (ModuleSpec::parse("A", "ml").unwrap(), 3),
                (ModuleSpec::parse("B", "l").unwrap(), 2),
            ],
        )
        .unwrap();
        assert_eq!(l.free_slots(), 3);
        assert!(l.feasible_positions(&"A".into()).unwrap().is_empty());

        let dev: Device = "lmlm".parse().unwrap();
        let l = Layout::new(
            dev,
            vec![(ModuleSpec::parse("A", "m").unwrap(), 3), (ModuleSpec::parse("B", "l").unwrap(), 2)],
        )
        .unwrap();
        assert_eq!(l.feasible_positions(&"A".into()).unwrap(), vec![1]);

        let p = packed();
        assert!(p.feasible_positions(&"A".into()).unwrap().is_empty());
        assert!(p.feasible_positions(&"B".into()).unwrap().is_empty());
    }

    #[test]
    fn apply_move_examples() {
        let a = fixture_a();
        let moved = a.apply_move(&Move::new("M2", 3)).unwrap();
        assert_eq!(moved.free_intervals(), vec![fi(0, 1), fi(5, 5)]);
        assert_eq!(moved.start_of(&"M1".into()), Some(1));

        assert_eq!(a.apply_move(&Move::new("M1", 0)), Err(MoveError::SelfOverlap("M1".into())));
        assert_eq!(a.apply_move(&Move::new("M2", 4)), Err(MoveError::SelfOverlap("M2".into())));
        assert_eq!(a.apply_move(&Move::new("M2", 5)), Err(MoveError::SelfOverlap("M2".into())));
        assert_eq!(
            a.apply_move(&Move::new("M2", 2)),
            Err(MoveError::Overlap { module: "M2".into(), other: "M1".into() })
        );
        assert_eq!(a.apply_move(&Move::new("M2", 9)), Err(MoveError::OutOfBounds { start: 9, end: 11 }));
        assert_eq!(a.apply_move(&Move::new("Q", 0)), Err(MoveError::UnknownModule("Q".into())));

        let dev: Device = "llllml".parse().unwrap();
        let l = Layout::new(dev, vec![(ModuleSpec::homogeneous("A", 2).unwrap(), 0)]).unwrap();
        assert_eq!(
            l.apply_move(&Move::new("A", 3)),
            Err(MoveError::PatternMismatch { module: "A".into(), slot: 4 })
        );
    }

    #[test]
    fn add_and_remove_modules() {
        let a = fixture_a();
        let b = a.with_module(ModuleSpec::homogeneous("M0", 1).unwrap(), 0).unwrap();
        assert_eq!(b.module_count(), 3);
        assert_eq!(b.modules()[0].id().as_str(), "M0");
        assert!(a.with_module(ModuleSpec::homogeneous("M3", 2).unwrap(), 4).is_err());
        let c = b.without_module(&"M1".into()).unwrap();
        assert_eq!(c.free_intervals(), vec![fi(1, 4), fi(7, 3)]);
    }
}

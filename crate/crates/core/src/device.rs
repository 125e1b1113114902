//! The reconfigurable area as a one-dimensional array of typed slots.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Resource type of a single slot (column).
///
/// Tags are single lowercase ASCII letters. `l` is plain logic, `m` a memory
/// tile; `#` is the separator used when flattening a 2D fabric and is never
/// matched by any module pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotType(u8);

impl SlotType {
    pub const LOGIC: SlotType = SlotType(b'l');
    pub const MEMORY: SlotType = SlotType(b'm');
    pub const SEPARATOR: SlotType = SlotType(b'#');

    pub fn from_char(c: char) -> Result<Self, DeviceError> {
        if c.is_ascii_lowercase() || c == '#' {
            Ok(SlotType(c as u8))
        } else {
            Err(DeviceError::InvalidTag(c))
        }
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }

    pub fn is_separator(self) -> bool {
        self == Self::SEPARATOR
    }
}

impl fmt::Display for SlotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeviceError {
    #[error("device length must be positive")]
    EmptyDevice,
    #[error("heterogeneity index {index} out of range for device of length {length}")]
    IndexOutOfRange { index: usize, length: usize },
    #[error("invalid slot type tag {0:?}")]
    InvalidTag(char),
    #[error("rows have different widths ({expected} vs {found})")]
    RaggedRows { expected: usize, found: usize },
}

/// Immutable slot array with a per-slot resource type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Device {
    slot_types: Vec<SlotType>,
}

impl Device {
    /// Builds a device of `length` logic slots, overriding the given positions.
    pub fn new(length: usize, heterogeneities: &BTreeMap<usize, SlotType>) -> Result<Self, DeviceError> {
        if length == 0 {
            return Err(DeviceError::EmptyDevice);
        }
        let mut slot_types = vec![SlotType::LOGIC; length];
        for (&index, &tag) in heterogeneities {
            if index >= length {
                return Err(DeviceError::IndexOutOfRange { index, length });
            }
            slot_types[index] = tag;
        }
        Ok(Device { slot_types })
    }

    pub fn homogeneous(length: usize) -> Result<Self, DeviceError> {
        Self::new(length, &BTreeMap::new())
    }

    pub fn from_slot_types(slot_types: Vec<SlotType>) -> Result<Self, DeviceError> {
        if slot_types.is_empty() {
            return Err(DeviceError::EmptyDevice);
        }
        Ok(Device { slot_types })
    }

    /// The 94-slot homogeneous array used in the density experiments.
    pub fn homogeneous94() -> Self {
        Self::homogeneous(94).expect("non-empty")
    }

    /// The 94-slot FPGA with memory columns at 3, 24, 45, 50, 71 and 82.
    pub fn het94() -> Self {
        let het = [3, 24, 45, 50, 71, 82]
            .into_iter()
            .map(|i| (i, SlotType::MEMORY))
            .collect();
        Self::new(94, &het).expect("positions in range")
    }

    pub fn len(&self) -> usize {
        self.slot_types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slot_types.is_empty()
    }

    pub fn slot_types(&self) -> &[SlotType] {
        &self.slot_types
    }

    pub fn slot_type(&self, index: usize) -> Option<SlotType> {
        self.slot_types.get(index).copied()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.slot_types.iter().all(|&t| t == SlotType::LOGIC)
    }

    /// True iff `pattern` placed at `start` lies in range and matches slot by slot.
    pub fn pattern_fits(&self, pattern: &[SlotType], start: usize) -> bool {
        match self.slot_types.get(start..start + pattern.len()) {
            Some(window) => window == pattern,
            None => false,
        }
    }

    /// First offset at which `pattern` disagrees with the device at `start`.
    pub(crate) fn first_mismatch(&self, pattern: &[SlotType], start: usize) -> Option<usize> {
        pattern
            .iter()
            .zip(&self.slot_types[start..])
            .position(|(p, d)| p != d)
            .map(|o| start + o)
    }

    /// All starts at which `pattern` matches the device, ignoring occupancy.
    pub fn matching_starts(&self, pattern: &[SlotType]) -> Vec<usize> {
        if pattern.is_empty() || pattern.len() > self.len() {
            return Vec::new();
        }
        (0..=self.len() - pattern.len())
            .filter(|&s| self.pattern_fits(pattern, s))
            .collect()
    }

    pub fn types_string(&self) -> String {
        self.slot_types.iter().map(|t| t.as_char()).collect()
    }
}

impl FromStr for Device {
    type Err = DeviceError;

    /// Parses a slot-type string such as `"llmll"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let types = s.chars().map(SlotType::from_char).collect::<Result<Vec<_>, _>>()?;
        Self::from_slot_types(types)
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.types_string())
    }
}

//! Line-oriented instance text format.
//!
//! ```text
//! # comment lines start with '#'
//! device 10
//! types llllllllll
//! module M1 1 ll
//! module M2 5 ll
//! ```
//!
//! `types` is optional (all logic by default). Slot indices are 0-based and a
//! module's size is its pattern length. Move lists use `move <id> <new_start>`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::device::{Device, DeviceError};
use crate::layout::{Layout, LayoutError, ModuleSpec, Move};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `device` line")]
    MissingDevice,
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_layout(text: &str) -> Result<Layout, FormatError> {
    let mut length: Option<usize> = None;
    let mut types: Option<Device> = None;
    let mut modules = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["device", n] => {
                if length.is_some() {
                    return Err(syntax(line, "duplicate `device` line"));
                }
                let n: usize = n.parse().map_err(|_| syntax(line, format!("bad device length {n:?}")))?;
                if n == 0 {
                    return Err(DeviceError::EmptyDevice.into());
                }
                length = Some(n);
            }
            ["types", s] => {
                let n = length.ok_or_else(|| syntax(line, "`types` before `device`"))?;
                let device: Device = s.parse()?;
                if device.len() != n {
                    return Err(syntax(line, format!("types string has {} slots, device has {n}", device.len())));
                }
                types = Some(device);
            }
            ["module", id, start, pattern] => {
                let start: usize =
                    start.parse().map_err(|_| syntax(line, format!("bad start {start:?}")))?;
                modules.push((ModuleSpec::parse(*id, pattern)?, start));
            }
            _ => return Err(syntax(line, format!("unrecognized line {content:?}"))),
        }
    }
    let length = length.ok_or(FormatError::MissingDevice)?;
    let device = match types {
        Some(d) => d,
        None => Device::homogeneous(length)?,
    };
    Ok(Layout::new(device, modules)?)
}

/// Renders a layout; `comments` become leading `# ` lines.
pub fn write_layout(layout: &Layout, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let device = layout.device();
    let _ = writeln!(out, "device {}", device.len());
    if !device.is_homogeneous() {
        let _ = writeln!(out, "types {}", device.types_string());
    }
    for (spec, start) in layout.placements() {
        let _ = writeln!(out, "module {} {} {}", spec.id(), start, spec.pattern_string());
    }
    out
}

pub fn write_moves(moves: &[Move]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

pub fn parse_moves(text: &str) -> Result<Vec<Move>, FormatError> {
    content_lines(text)
        .map(|(line, content)| match content.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["move", id, start] => start
                .parse()
                .map(|s| Move::new(*id, s))
                .map_err(|_| syntax(line, format!("bad start {start:?}"))),
            _ => Err(syntax(line, format!("unrecognized line {content:?}"))),
        })
        .collect()
}

//! Two-pass compaction for moderately dense homogeneous layouts.
//!
//! When `2 * sum(m_i) <= len - max(m_i)`, shifting every module as far left as
//! possible (left to right) and then as far right as possible (right to left)
//! leaves exactly one free interval at the left end, using at most `2n` moves.

use thiserror::Error;

use super::StrategyReport;
use crate::layout::{FreeInterval, Layout, ModuleId, Move};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LrsError {
    #[error("density {density:.4} exceeds bound {bound:.4} (1/2 - max module size / (2 * device length))")]
    DensityTooHigh { density: f64, bound: f64 },
    #[error("module {0} is not homogeneous")]
    HeterogeneousModule(ModuleId),
    #[error("device contains heterogeneities")]
    HeterogeneousDevice,
}

/// Checks the density bound with integer arithmetic.
pub(crate) fn check_precondition(layout: &Layout) -> Result<(), LrsError> {
    if let Some(m) = layout.modules().iter().find(|m| !m.is_homogeneous()) {
        return Err(LrsError::HeterogeneousModule(m.id().clone()));
    }
    if !layout.device().is_homogeneous() {
        return Err(LrsError::HeterogeneousDevice);
    }
    let length = layout.device().len();
    let largest = layout.modules().iter().map(|m| m.size()).max().unwrap_or(0);
    let occupied = layout.occupied_slots();
    if 2 * occupied > length - largest {
        return Err(LrsError::DensityTooHigh {
            density: layout.density(),
            bound: 0.5 - largest as f64 / (2.0 * length as f64),
        });
    }
    Ok(())
}

pub fn left_right_shift(layout: &Layout) -> Result<StrategyReport, LrsError> {
    check_precondition(layout)?;
    let mut current = layout.clone();
    let mut moves = Vec::new();
    let mut attempts = 0;

    let mut order: Vec<usize> = (0..current.module_count()).collect();
    order.sort_by_key(|&i| current.starts()[i]);
    for &i in &order {
        attempts += 1;
        let size = current.modules()[i].size();
        let start = current.starts()[i];
        let target = current
            .free_intervals()
            .into_iter()
            .find(|f| f.end() <= start && f.size >= size)
            .map(|f| f.start);
        if let Some(target) = target {
            current = shift(&current, i, target, &mut moves);
        }
    }

    let at_left_end = |free: &[FreeInterval]| matches!(free, [f] if f.start == 0);
    if !at_left_end(&current.free_intervals()) {
        order.sort_by_key(|&i| std::cmp::Reverse(current.starts()[i]));
        for &i in &order {
            attempts += 1;
            let size = current.modules()[i].size();
            let end = current.starts()[i] + size;
            let target = current
                .free_intervals()
                .into_iter()
                .rev()
                .find(|f| f.start >= end && f.size >= size)
                .map(|f| f.end() - size);
            if let Some(target) = target {
                current = shift(&current, i, target, &mut moves);
            }
        }
    }

    Ok(StrategyReport {
        best_step: moves.len(),
        best_max_free: current.max_free_interval(),
        best_fitness: current.fitness(),
        best_layout: current,
        moves,
        iterations_used: attempts,
    })
}

fn shift(layout: &Layout, index: usize, target: usize, moves: &mut Vec<Move>) -> Layout {
    moves.push(Move { module: layout.modules()[index].id().clone(), new_start: target });
    layout.relocated(index, target)
}

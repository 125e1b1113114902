//! Discrete-event simulation of a module request sequence.
//!
//! All requests are queued at time 0 and admitted strictly in order. An
//! admitted module reserves the leftmost fitting slots, is configured through
//! the single reconfiguration port (one time unit per column), then runs for
//! its duration and frees its slots. When the head request does not fit, the
//! `none` policy waits for the next completion; `greedy` and `tabu` first
//! defragment. Every relocation of a size-`m` module occupies the port for `m`
//! time units, pauses that module for the copy, and delays its completion by
//! the same amount. Defragmentation runs at most once per layout change, only
//! while the port is idle, and admission resumes after its last relocation.

mod workload;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use workload::{generate_workload, WorkloadItem, WorkloadParams};

use crate::device::Device;
use crate::layout::{Layout, Move};
use crate::strategies::{greedy_defrag, tabu_defrag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("workload parameters must be positive")]
    InvalidParameters,
    #[error("module {id} of size {size} never fits on the device")]
    ModuleTooLarge { id: String, size: usize },
    #[error("duplicate workload id {0}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    None,
    Greedy,
    Tabu,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::None, Policy::Greedy, Policy::Tabu];

    pub fn name(self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Greedy => "greedy",
            Policy::Tabu => "tabu",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Policy::None),
            "greedy" => Ok(Policy::Greedy),
            "tabu" => Ok(Policy::Tabu),
            other => Err(format!("unknown policy {other:?} (expected none, greedy or tabu)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub device: Device,
    pub policy: Policy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relocation {
    pub from: usize,
    pub to: usize,
    pub start_time: u64,
    pub end_time: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleTimeline {
    pub id: String,
    pub size: usize,
    pub duration: u64,
    /// Slot chosen at admission.
    pub slot: usize,
    /// Time the request reached the head of the queue.
    pub head_at: u64,
    pub admitted_at: u64,
    pub config_start: u64,
    pub config_end: u64,
    pub finish: u64,
    pub relocations: Vec<Relocation>,
}

impl ModuleTimeline {
    pub fn wait(&self) -> u64 {
        self.admitted_at - self.head_at
    }

    /// Execution time: run span minus relocation pauses.
    pub fn executed(&self) -> u64 {
        let paused: u64 = self.relocations.iter().map(|r| r.end_time - r.start_time).sum();
        self.finish - self.config_end - paused
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub makespan: u64,
    pub timeline: Vec<ModuleTimeline>,
    pub defrag_invocations: usize,
    pub relocations: usize,
    pub total_relocation_cost: u64,
    /// Admission attempts that found no fitting position.
    pub rejected_admissions: usize,
}

impl SimReport {
    pub fn total_wait(&self) -> u64 {
        self.timeline.iter().map(ModuleTimeline::wait).sum()
    }
}

enum PortJob {
    Configure(usize),
    Relocate(usize, Move),
}

struct Running {
    item: usize,
    /// Completion time, `None` until configured.
    finish: Option<u64>,
}

pub fn simulate_schedule(workload: &[WorkloadItem], config: &SimConfig) -> Result<SimReport, SimError> {
    let device = &config.device;
    let mut ids: Vec<&str> = workload.iter().map(|w| w.spec.id().as_str()).collect();
    ids.sort_unstable();
    if let Some(dup) = ids.windows(2).find(|p| p[0] == p[1]) {
        return Err(SimError::DuplicateId(dup[0].to_owned()));
    }
    if let Some(w) = workload
        .iter()
        .find(|w| Layout::empty(device.clone()).first_fit(w.spec.pattern()).is_none())
    {
        return Err(SimError::ModuleTooLarge { id: w.spec.id().to_string(), size: w.size() });
    }

    let mut layout = Layout::empty(device.clone());
    let mut running: Vec<Running> = Vec::new();
    let mut timeline: Vec<ModuleTimeline> = Vec::with_capacity(workload.len());
    let mut port: VecDeque<PortJob> = VecDeque::new();
    let mut port_busy_until: Option<u64> = None;
    let mut current_job: Option<PortJob> = None;
    let mut next_item = 0;
    let mut head_at = 0;
    let mut defrag_pending = true;
    let mut last_rejection: Option<(u64, usize)> = None;
    let mut report = SimReport {
        makespan: 0,
        timeline: Vec::new(),
        defrag_invocations: 0,
        relocations: 0,
        total_relocation_cost: 0,
        rejected_admissions: 0,
    };
    let mut now = 0u64;

    loop {
        // Completions.
        let mut k = 0;
        while k < running.len() {
            match running[k].finish {
                Some(f) if f <= now => {
                    let item = running.swap_remove(k).item;
                    layout = layout.without_module(workload[item].spec.id()).expect("running module is placed");
                    timeline[item].finish = f;
                    report.makespan = report.makespan.max(f);
                    defrag_pending = true;
                }
                _ => k += 1,
            }
        }

        // Port job completion.
        if port_busy_until.is_some_and(|t| t <= now) {
            port_busy_until = None;
            if let Some(PortJob::Configure(item)) = current_job.take() {
                let finish = now + workload[item].duration;
                timeline[item].config_end = now;
                running.iter_mut().find(|r| r.item == item).expect("configuring module").finish = Some(finish);
            }
        }

        // Start the next port job.
        while port_busy_until.is_none() {
            let Some(job) = port.pop_front() else { break };
            match &job {
                PortJob::Configure(item) => {
                    let cost = workload[*item].size() as u64;
                    timeline[*item].config_start = now;
                    port_busy_until = Some(now + cost);
                }
                PortJob::Relocate(item, mv) => {
                    let Some(from) = layout.start_of(&mv.module) else { continue };
                    layout = layout.apply_move(mv).expect("planned relocation stays legal");
                    let cost = workload[*item].size() as u64;
                    let r = running.iter_mut().find(|r| r.item == *item).expect("relocated module runs");
                    *r.finish.as_mut().expect("relocated module is configured") += cost;
                    timeline[*item].relocations.push(Relocation {
                        from,
                        to: mv.new_start,
                        start_time: now,
                        end_time: now + cost,
                    });
                    report.relocations += 1;
                    report.total_relocation_cost += cost;
                    port_busy_until = Some(now + cost);
                }
            }
            current_job = Some(job);
        }

        // Admission, blocked while relocations are outstanding.
        let relocating = matches!(current_job, Some(PortJob::Relocate(..)))
            || port.iter().any(|j| matches!(j, PortJob::Relocate(..)));
        if !relocating {
            while next_item < workload.len() {
                let item = &workload[next_item];
                if let Some(slot) = layout.first_fit(item.spec.pattern()) {
                    layout = layout.with_module(item.spec.clone(), slot).expect("first fit is legal");
                    timeline.push(ModuleTimeline {
                        id: item.spec.id().to_string(),
                        size: item.size(),
                        duration: item.duration,
                        slot,
                        head_at,
                        admitted_at: now,
                        config_start: 0,
                        config_end: 0,
                        finish: 0,
                        relocations: Vec::new(),
                    });
                    running.push(Running { item: next_item, finish: None });
                    port.push_back(PortJob::Configure(next_item));
                    next_item += 1;
                    head_at = now;
                    continue;
                }
                if last_rejection != Some((now, next_item)) {
                    last_rejection = Some((now, next_item));
                    report.rejected_admissions += 1;
                }
                if config.policy != Policy::None && defrag_pending && port_busy_until.is_none() && port.is_empty() {
                    defrag_pending = false;
                    report.defrag_invocations += 1;
                    let moves = match config.policy {
                        Policy::Greedy => greedy_defrag(&layout).moves,
                        Policy::Tabu => {
                            let r = tabu_defrag(&layout, None);
                            r.moves_to_best().to_vec()
                        }
                        Policy::None => unreachable!(),
                    };
                    for mv in moves {
                        let item = index_of_item(workload, &running, &mv);
                        port.push_back(PortJob::Relocate(item, mv));
                    }
                }
                break;
            }
            if port_busy_until.is_none() && !port.is_empty() {
                continue;
            }
        }

        // Advance time.
        let next_finish = running.iter().filter_map(|r| r.finish).min();
        let next = match (next_finish, port_busy_until) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => match a.or(b) {
                Some(t) => t,
                None => break,
            },
        };
        debug_assert!(next > now || next_finish.is_some_and(|f| f <= now));
        now = next;
    }

    debug_assert_eq!(next_item, workload.len());
    report.timeline = timeline;
    Ok(report)
}

fn index_of_item(workload: &[WorkloadItem], running: &[Running], mv: &Move) -> usize {
    running
        .iter()
        .map(|r| r.item)
        .find(|&i| workload[i].spec.id() == &mv.module)
        .expect("moved module is running")
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::SimError;
use crate::layout::ModuleSpec;

/// One module request: a homogeneous pattern and its execution time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadItem {
    pub spec: ModuleSpec,
    pub duration: u64,
}

impl WorkloadItem {
    pub fn new(spec: ModuleSpec, duration: u64) -> Self {
        WorkloadItem { spec, duration }
    }

    pub fn size(&self) -> usize {
        self.spec.size()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadParams {
    pub count: usize,
    pub size_mean: f64,
    pub duration_mean: f64,
    pub device_length: usize,
    pub seed: u64,
}

/// Sizes ~ Normal(mean, mean / 4) rounded and clipped to `[1, device_length]`;
/// durations ~ Exponential(mean) rounded up, at least 1.
pub fn generate_workload(params: &WorkloadParams) -> Result<Vec<WorkloadItem>, SimError> {
    let WorkloadParams { count, size_mean, duration_mean, device_length, seed } = *params;
    if !(size_mean > 0.0) || !(duration_mean > 0.0) || device_length == 0 {
        return Err(SimError::InvalidParameters);
    }
    let sizes = Normal::new(size_mean, size_mean / 4.0).map_err(|_| SimError::InvalidParameters)?;
    let durations = Exp::new(1.0 / duration_mean).map_err(|_| SimError::InvalidParameters)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = count.to_string().len();
    (0..count)
        .map(|i| {
            let size = (sizes.sample(&mut rng).round().max(1.0) as usize).min(device_length);
            let duration = (durations.sample(&mut rng).ceil() as u64).max(1);
            let spec = ModuleSpec::homogeneous(format!("W{:0width$}", i + 1), size).expect("size >= 1");
            Ok(WorkloadItem { spec, duration })
        })
        .collect()
}

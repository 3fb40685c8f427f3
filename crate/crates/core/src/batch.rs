use serde::Serialize;

/// Where a batch of draws came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    DirectSampler { class: String },
    Sde { dt: f64, steps: usize, burn_in: usize, thin: usize },
    ChaosEval { element: String },
}

/// Seeded Monte Carlo draws. Identical `(seed, provenance)` reproduce
/// identical values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub provenance: Provenance,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn raw_moment(&self, p: i32) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        self.values.iter().map(|x| x.powi(p)).sum::<f64>() / self.values.len() as f64
    }

    /// Empirical mean of `x^p` with its i.i.d. standard error.
    pub fn moment_with_se(&self, p: i32) -> (f64, f64) {
        mean_and_se(self.values.iter().map(|x| x.powi(p)))
    }
}

/// Sample mean and standard error `sd / √n`.
pub fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for v in values {
        n += 1.0;
        let d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    (mean, (m2 / (n - 1.0) / n).sqrt())
}

/// Mean and batch-means standard error for an autocorrelated series.
pub fn batch_means_se(values: &[f64], batches: usize) -> (f64, f64) {
    let size = values.len() / batches.max(1);
    if size == 0 {
        return mean_and_se(values.iter().copied());
    }
    let means = values.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64);
    let (mean, se) = mean_and_se(means);
    (mean, se)
}

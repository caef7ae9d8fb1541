use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use super::model::LevyModel;
use crate::error::{Error, Result};

/// Independent random streams derived from one `(seed, replication)` key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Brownian = 0,
    Small = 1,
    Large = 2,
    /// Sampling of test points by the hypothesis and check routines.
    Hypothesis = 3,
    /// Sampling of `ξ` perturbations and other auxiliary draws.
    Auxiliary = 4,
}

/// A ChaCha20 generator keyed by `(seed, replication)` on the given stream.
/// Depends only on its arguments, never on scheduling.
pub fn stream_rng(seed: u64, replication: u64, stream: Stream) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replication.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallEvent {
    pub time: f64,
    /// Index into [`LevyModel::small_atoms`].
    pub atom: usize,
    pub mark: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeEvent {
    pub time: f64,
    pub mark: Vec<f64>,
}

/// One frozen sample of the driving noise on the uniform grid
/// `t_k = T k / M`.
///
/// Events keep their exact times. For time stepping each event belongs to
/// the step `k` with `t_k < time <= t_{k+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseDump", into = "NoiseDump")]
pub struct NoiseRealization {
    horizon: f64,
    dim: usize,
    times: Vec<f64>,
    increments: Vec<f64>,
    small_events: Vec<SmallEvent>,
    large_events: Vec<LargeEvent>,
    small_bins: Vec<usize>,
    large_bins: Vec<usize>,
    seed: u64,
    replication: u64,
}

/// Grid `t_k = T k / M`, with `t_M = T` exactly.
pub fn uniform_grid(horizon: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| if k == steps { horizon } else { horizon * k as f64 / steps as f64 })
        .collect()
}

/// Draw the noise for `(seed, replication)`.
///
/// Brownian increments, small events and large events come from three
/// independent streams, so e.g. switching large jumps off leaves the other
/// two untouched.
pub fn sample_noise(model: &LevyModel, horizon: f64, steps: usize, seed: u64, replication: u64) -> Result<NoiseRealization> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let dim = model.brownian_dim();
    let times = uniform_grid(horizon, steps);

    let mut rng = stream_rng(seed, replication, Stream::Brownian);
    let mut increments = Vec::with_capacity(steps * dim);
    for k in 0..steps {
        let sd = (times[k + 1] - times[k]).sqrt();
        for _ in 0..dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            increments.push(sd * z);
        }
    }

    let mut small_events = Vec::new();
    let total = model.total_small_intensity();
    if total > 0.0 {
        let mut rng = stream_rng(seed, replication, Stream::Small);
        let gap = Exp::new(total).expect("positive rate");
        let mut t = 0.0;
        loop {
            t += gap.sample(&mut rng);
            if t > horizon {
                break;
            }
            let mut u = rng.random::<f64>() * total;
            let atoms = model.small_atoms();
            let mut atom = atoms.len() - 1;
            for (i, a) in atoms.iter().enumerate() {
                if u < a.intensity {
                    atom = i;
                    break;
                }
                u -= a.intensity;
            }
            small_events.push(SmallEvent {
                time: t,
                atom,
                mark: atoms[atom].mark.clone(),
            });
        }
    }

    let mut large_events = Vec::new();
    if model.large_rate() > 0.0 {
        let mut rng = stream_rng(seed, replication, Stream::Large);
        let gap = Exp::new(model.large_rate()).expect("positive rate");
        let mut t = 0.0;
        loop {
            t += gap.sample(&mut rng);
            if t > horizon {
                break;
            }
            let mark = model.large_sampler().sample(dim, &mut rng);
            large_events.push(LargeEvent { time: t, mark });
        }
    }

    // a large event never shares its time with a small one: it goes 1 ulp later
    for ev in &mut large_events {
        while small_events
            .binary_search_by(|s| s.time.total_cmp(&ev.time))
            .is_ok()
        {
            ev.time = ev.time.next_up();
        }
    }

    NoiseRealization::assemble(horizon, dim, times, increments, small_events, large_events, seed, replication)
}

impl NoiseRealization {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        horizon: f64,
        dim: usize,
        times: Vec<f64>,
        increments: Vec<f64>,
        small_events: Vec<SmallEvent>,
        large_events: Vec<LargeEvent>,
        seed: u64,
        replication: u64,
    ) -> Result<Self> {
        let steps = times.len().saturating_sub(1);
        if steps == 0 || times[0] != 0.0 || times[steps] != horizon || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("grid must be strictly increasing from 0 to the horizon".into()));
        }
        if increments.len() != steps * dim {
            return Err(Error::Malformed(format!(
                "expected {} Brownian increments, got {}",
                steps * dim,
                increments.len()
            )));
        }
        let check_times = |ts: &mut dyn Iterator<Item = f64>| -> Result<()> {
            let mut last = 0.0;
            for t in ts {
                if !(t > last && t <= horizon) {
                    return Err(Error::Malformed(format!("event time {t} out of order or outside (0, T]")));
                }
                last = t;
            }
            Ok(())
        };
        check_times(&mut small_events.iter().map(|e| e.time))?;
        check_times(&mut large_events.iter().map(|e| e.time))?;
        if small_events.iter().any(|e| e.mark.len() != dim) || large_events.iter().any(|e| e.mark.len() != dim) {
            return Err(Error::Malformed("event mark dimension differs from the Brownian dimension".into()));
        }
        let small_bins = bin_events(&times, small_events.iter().map(|e| e.time));
        let large_bins = bin_events(&times, large_events.iter().map(|e| e.time));
        Ok(NoiseRealization {
            horizon,
            dim,
            times,
            increments,
            small_events,
            large_events,
            small_bins,
            large_bins,
            seed,
            replication,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `ΔB` for step `k`.
    pub fn increment(&self, k: usize) -> &[f64] {
        &self.increments[k * self.dim..(k + 1) * self.dim]
    }

    pub fn small_events(&self) -> &[SmallEvent] {
        &self.small_events
    }

    pub fn large_events(&self) -> &[LargeEvent] {
        &self.large_events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replication(&self) -> u64 {
        self.replication
    }

    /// Small events binned to step `k`.
    pub fn small_in_step(&self, k: usize) -> &[SmallEvent] {
        &self.small_events[self.small_bins[k]..self.small_bins[k + 1]]
    }

    /// Large events binned to step `k`.
    pub fn large_in_step(&self, k: usize) -> &[LargeEvent] {
        &self.large_events[self.large_bins[k]..self.large_bins[k + 1]]
    }

    /// The step whose interval `(t_k, t_{k+1}]` contains `time`.
    pub fn step_of(&self, time: f64) -> usize {
        self.times.partition_point(|&t| t < time).saturating_sub(1).min(self.steps() - 1)
    }

    /// The same realization with all large events removed.
    pub fn without_large_events(&self) -> Self {
        NoiseRealization {
            large_events: Vec::new(),
            large_bins: vec![0; self.times.len()],
            ..self.clone()
        }
    }

    /// The whole realization as a view with offset 0.
    pub fn full_view(&self) -> NoiseView<'_> {
        NoiseView {
            parent: self,
            offset: 0.0,
            start: 0,
        }
    }

    /// The noise after `eta`, re-timed to start at 0.
    pub fn shift_view(&self, eta: f64) -> Result<NoiseView<'_>> {
        self.full_view().shift_view(eta)
    }
}

/// CSR offsets: events of step `k` are `bins[k]..bins[k + 1]`.
fn bin_events(times: &[f64], events: impl Iterator<Item = f64>) -> Vec<usize> {
    let steps = times.len() - 1;
    let mut counts = vec![0usize; steps + 1];
    for t in events {
        let k = times.partition_point(|&g| g < t).saturating_sub(1).min(steps - 1);
        counts[k + 1] += 1;
    }
    for k in 0..steps {
        counts[k + 1] += counts[k];
    }
    counts
}

/// The noise of a realization after time `offset`.
///
/// Grid steps are those of the parent lying entirely after the offset, so
/// stepping through a view reuses the parent's increments and binning
/// unchanged. Event lists are re-timed by subtracting the offset.
#[derive(Clone, Copy, Debug)]
pub struct NoiseView<'a> {
    parent: &'a NoiseRealization,
    offset: f64,
    start: usize,
}

impl PartialEq for NoiseView<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent)
            && self.offset.to_bits() == other.offset.to_bits()
            && self.start == other.start
    }
}

impl<'a> NoiseView<'a> {
    /// Composes offsets: `v.shift_view(a)?.shift_view(b)` equals
    /// `v.shift_view(a + b)`.
    pub fn shift_view(&self, eta: f64) -> Result<NoiseView<'a>> {
        let remaining = self.horizon();
        if !(eta >= 0.0 && eta <= remaining) {
            return Err(Error::ShiftOutOfRange {
                eta,
                horizon: remaining,
            });
        }
        let offset = self.offset + eta;
        let start = self.parent.times.partition_point(|&t| t < offset);
        Ok(NoiseView {
            parent: self.parent,
            offset,
            start,
        })
    }

    pub fn parent(&self) -> &'a NoiseRealization {
        self.parent
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Parent index of the view's first grid point.
    pub fn start_index(&self) -> usize {
        self.start
    }

    pub fn horizon(&self) -> f64 {
        self.parent.horizon - self.offset
    }

    pub fn steps(&self) -> usize {
        self.parent.steps() - self.start.min(self.parent.steps())
    }

    /// Re-timed grid point `k` of the view.
    pub fn time(&self, k: usize) -> f64 {
        self.parent.times[self.start + k] - self.offset
    }

    pub fn dt(&self, k: usize) -> f64 {
        let i = self.start + k;
        self.parent.times[i + 1] - self.parent.times[i]
    }

    pub fn increment(&self, k: usize) -> &'a [f64] {
        self.parent.increment(self.start + k)
    }

    pub fn small_in_step(&self, k: usize) -> &'a [SmallEvent] {
        self.parent.small_in_step(self.start + k)
    }

    pub fn large_in_step(&self, k: usize) -> &'a [LargeEvent] {
        self.parent.large_in_step(self.start + k)
    }

    /// Small events after the offset, re-timed.
    pub fn small_events(&self) -> impl Iterator<Item = (f64, &'a SmallEvent)> + 'a {
        let offset = self.offset;
        let from = self.parent.small_events.partition_point(|e| e.time <= offset);
        self.parent.small_events[from..].iter().map(move |e| (e.time - offset, e))
    }

    /// Large events after the offset, re-timed.
    pub fn large_events(&self) -> impl Iterator<Item = (f64, &'a LargeEvent)> + 'a {
        let offset = self.offset;
        let from = self.parent.large_events.partition_point(|e| e.time <= offset);
        self.parent.large_events[from..].iter().map(move |e| (e.time - offset, e))
    }
}

/// Serialised form of a [`NoiseRealization`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseDump {
    pub seed: u64,
    pub replication: u64,
    pub horizon: f64,
    pub brownian_dim: usize,
    pub times: Vec<f64>,
    /// One row of `ΔB` per step.
    pub increments: Vec<Vec<f64>>,
    pub small_events: Vec<SmallEvent>,
    pub large_events: Vec<LargeEvent>,
}

impl From<NoiseRealization> for NoiseDump {
    fn from(n: NoiseRealization) -> Self {
        let increments = n.increments.chunks(n.dim).map(<[f64]>::to_vec).collect();
        NoiseDump {
            seed: n.seed,
            replication: n.replication,
            horizon: n.horizon,
            brownian_dim: n.dim,
            times: n.times,
            increments,
            small_events: n.small_events,
            large_events: n.large_events,
        }
    }
}

impl TryFrom<NoiseDump> for NoiseRealization {
    type Error = Error;

    fn try_from(d: NoiseDump) -> Result<Self> {
        if d.increments.iter().any(|row| row.len() != d.brownian_dim) {
            return Err(Error::Malformed("increment row length differs from brownian_dim".into()));
        }
        let increments = d.increments.concat();
        NoiseRealization::assemble(
            d.horizon,
            d.brownian_dim,
            d.times,
            increments,
            d.small_events,
            d.large_events,
            d.seed,
            d.replication,
        )
    }
}

//! Monte Carlo of the heralded entanglement loop: cooling, batched attempts,
//! heralding and motional heating, plus sideband thermometry.

mod thermometry;
mod trace;

use std::ops::Range;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::devmodel::DeviceParams;
use crate::error::{Error, Result};

pub use thermometry::{estimate_nbar, simulate_heating_experiment, simulate_thermometry, ThermometryRecord};
pub use trace::{Event, EventKind, EventTrace};

/// Independent generator for trial `index` of a run seeded with `master`.
/// Streams do not depend on how trials are scheduled across threads.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Master seed for a named sub-run, so that independent stages of one
/// experiment draw from unrelated streams.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(u64::MAX - tag);
    rng.next_u64()
}

/// Duration of one attempt: pump, microwave init, excitation and detection window.
pub fn attempt_cycle_duration(p: &DeviceParams) -> f64 {
    p.t_pump + p.t_mw_init + p.t_excite + p.t_window
}

/// Doppler plus EIT cooling, paid once per batch.
pub fn cooling_duration(p: &DeviceParams) -> f64 {
    p.t_doppler + p.t_eit
}

pub fn batch_duration(p: &DeviceParams) -> f64 {
    cooling_duration(p) + p.attempts_per_batch as f64 * attempt_cycle_duration(p)
}

/// Attempts per second, cooling included.
pub fn attempt_rate(p: &DeviceParams) -> f64 {
    p.attempts_per_batch as f64 / batch_duration(p)
}

/// Per-attempt herald probability that reproduces the mean rate `ent_rate_r`.
pub fn derive_p_att(p: &DeviceParams) -> Result<f64> {
    let rate = attempt_rate(p);
    if p.ent_rate_r > rate {
        return Err(Error::param(
            "ent_rate_r",
            format!("{} s⁻¹ exceeds the attempt rate {rate:.1} s⁻¹", p.ent_rate_r),
        ));
    }
    Ok(p.ent_rate_r / rate)
}

/// Outcome of one storage window.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub success: bool,
    pub t_herald: Option<f64>,
    pub attempts_used: u32,
    /// Attempt index within its batch, starting at 1; 0 without a herald.
    pub attempt_in_batch: u32,
    pub nbar_at_herald: f64,
    pub trace: EventTrace,
}

/// One storage window with the herald probability derived from the rate.
pub fn run_entanglement_trial<R: Rng + ?Sized>(p: &DeviceParams, rng: &mut R, record: bool) -> Result<TrialResult> {
    let p_att = derive_p_att(p)?;
    Ok(run_entanglement_trial_with(p, p_att, rng, record))
}

/// One storage window of length `storage_t`: batches of cooling followed by
/// up to `attempts_per_batch` attempts, stopping at the first herald.
///
/// `n̄` resets to `nbar_after_eit` at each cooling and grows by
/// `heat_per_attempt` per attempt. The loop has no idle time, so the
/// background rate does not enter.
pub fn run_entanglement_trial_with<R: Rng + ?Sized>(p: &DeviceParams, p_att: f64, rng: &mut R, record: bool) -> TrialResult {
    let t_att = attempt_cycle_duration(p);
    let mut trace = EventTrace::default();
    let mut log = |t: f64, kind: EventKind, payload: String| {
        if record {
            trace.push(t, kind, payload);
        }
    };
    let mut t = 0.0;
    let mut attempts = 0u32;
    let mut nbar = p.nbar_after_eit;
    loop {
        if t + cooling_duration(p) + t_att > p.storage_t {
            break;
        }
        log(t, EventKind::Doppler, String::new());
        log(t + p.t_doppler, EventKind::Eit, String::new());
        t += cooling_duration(p);
        nbar = p.nbar_after_eit;
        for k in 1..=p.attempts_per_batch {
            if t + t_att > p.storage_t {
                break;
            }
            attempts += 1;
            log(t, EventKind::Pump, String::new());
            log(t + p.t_pump, EventKind::MwInit, String::new());
            log(t + p.t_pump + p.t_mw_init, EventKind::Excite, format!("attempt={attempts}"));
            nbar += p.heat_per_attempt;
            let end = t + t_att;
            if rng.random::<f64>() < p_att {
                log(end, EventKind::HeraldSuccess, format!("nbar={nbar}"));
                return TrialResult {
                    success: true,
                    t_herald: Some(end),
                    attempts_used: attempts,
                    attempt_in_batch: k,
                    nbar_at_herald: nbar,
                    trace,
                };
            }
            log(end, EventKind::HeraldFail, String::new());
            t = end;
        }
    }
    TrialResult {
        success: false,
        t_herald: None,
        attempts_used: attempts,
        attempt_in_batch: 0,
        nbar_at_herald: nbar,
        trace,
    }
}

/// `n` trials on substreams `0..n` of `master`, in parallel; traces are kept
/// for the first `keep_traces` trials only.
pub fn run_trials(p: &DeviceParams, master: u64, n: u64, keep_traces: u64) -> Result<Vec<TrialResult>> {
    run_trial_range(p, master, 0..n, keep_traces)
}

/// Trials on substreams `indices` of `master`, in index order.
pub fn run_trial_range(p: &DeviceParams, master: u64, indices: Range<u64>, keep_traces: u64) -> Result<Vec<TrialResult>> {
    let p_att = derive_p_att(p)?;
    Ok(indices
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master, i);
            run_entanglement_trial_with(p, p_att, &mut rng, i < keep_traces)
        })
        .collect())
}

/// Kolmogorov–Smirnov statistic of `sample` against `cdf`, with its
/// asymptotic p-value.
pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    (d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d))
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        s += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// CDF of herald times if heralds arrived at constant rate `r` and were kept
/// only within the window `t_max`.
pub fn truncated_exponential_cdf(r: f64, t_max: f64) -> impl Fn(f64) -> f64 {
    let norm = 1.0 - (-r * t_max).exp();
    move |t: f64| ((1.0 - (-r * t.clamp(0.0, t_max)).exp()) / norm).clamp(0.0, 1.0)
}

//! Random two-rover exploration instances.
//!
//! Each rover visits the sites in order with a time budget. At a site it
//! either runs the experiment, which takes a random number of time units, or
//! skips it at no cost. Local rewards are credited on completion; when both
//! rovers complete the experiment of a shared site they earn an extra half of
//! the site reward.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{Agent, Choice, DecMdp, JointReward};
use crate::error::{Error, Result};

pub const EXPERIMENT: usize = 0;
pub const SKIP: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoverConfig {
    pub sites: usize,
    pub horizon: usize,
    /// Shared sites, numbered from 1.
    pub shared: Vec<usize>,
    pub seed: u64,
}

impl Default for RoverConfig {
    fn default() -> Self {
        Self {
            sites: 6,
            horizon: 15,
            shared: vec![1, 2, 3, 4, 5],
            seed: 0,
        }
    }
}

impl RoverConfig {
    /// The first `k` sites are shared.
    pub fn with_shared_count(k: usize, seed: u64) -> Self {
        Self {
            shared: (1..=k).collect(),
            seed,
            ..Self::default()
        }
    }
}

/// Probabilities of durations `1..=horizon` under a normal distribution
/// rounded to integers and renormalized.
fn duration_pmf(mean: f64, horizon: usize) -> Vec<f64> {
    let normal = Normal::new(mean, (0.4 * mean).sqrt()).expect("positive variance");
    let mut pmf: Vec<f64> = (1..=horizon)
        .map(|d| normal.cdf(d as f64 + 0.5) - normal.cdf(d as f64 - 0.5))
        .collect();
    let total: f64 = pmf.iter().sum();
    pmf.iter_mut().for_each(|p| *p /= total);
    pmf
}

fn rover(site_reward: &[f64], pmf: &[Vec<f64>], horizon: usize) -> (Agent, Vec<Vec<f64>>) {
    let sites = site_reward.len();
    let terminal = sites * horizon;
    let index = |k: usize, tau: usize| k * horizon + tau - 1;
    let mut states = Vec::with_capacity(terminal + 1);
    let mut choices = Vec::with_capacity(terminal + 1);
    // completion[k][τ-1] = P(duration ≤ τ)
    let mut completion = vec![vec![0.0; horizon]; sites];
    for k in 0..sites {
        let mut acc = 0.0;
        for tau in 1..=horizon {
            acc += pmf[k][tau - 1];
            completion[k][tau - 1] = acc.min(1.0);
        }
    }
    for k in 0..sites {
        for tau in 1..=horizon {
            states.push(format!("site{}/t{tau}", k + 1));
            let after = |rest: usize| if rest >= 1 && k + 1 < sites { index(k + 1, rest) } else { terminal };
            let mut next: Vec<(usize, f64)> = Vec::new();
            let mut push = |t: usize, p: f64| match next.iter_mut().find(|(s, _)| *s == t) {
                Some(e) => e.1 += p,
                None => next.push((t, p)),
            };
            for (d, &p) in pmf[k].iter().enumerate() {
                let d = d + 1;
                if p <= 0.0 {
                    continue;
                }
                if d <= tau {
                    push(after(tau - d), p);
                } else {
                    push(terminal, p);
                }
            }
            next.sort_by_key(|e| e.0);
            choices.push(vec![
                Choice {
                    action: EXPERIMENT,
                    reward: site_reward[k] * completion[k][tau - 1],
                    next,
                },
                Choice {
                    action: SKIP,
                    reward: 0.0,
                    next: vec![(after(tau), 1.0)],
                },
            ]);
        }
    }
    states.push("done".into());
    choices.push(Vec::new());
    let mut initial = vec![0.0; terminal + 1];
    initial[index(0, horizon)] = 1.0;
    let mut terminal_flags = vec![false; terminal + 1];
    terminal_flags[terminal] = true;
    let agent = Agent {
        states,
        terminal: terminal_flags,
        actions: vec!["experiment".into(), "skip".into()],
        choices,
        initial,
    };
    (agent, completion)
}

/// A random instance; equal configurations give identical models.
pub fn generate_rover(config: &RoverConfig) -> Result<DecMdp> {
    let RoverConfig { sites, horizon, .. } = *config;
    if sites == 0 || horizon == 0 {
        return Err(Error::InvalidArgument("rover instances need at least one site and one time unit".into()));
    }
    if let Some(&k) = config.shared.iter().find(|&&k| k == 0 || k > sites) {
        return Err(Error::InvalidArgument(format!("shared site {k} is not in 1..={sites}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let reward: Vec<f64> = (0..sites).map(|_| rng.random_range(0.1..=1.0)).collect();
    let mut draw_pmfs = || -> Vec<Vec<f64>> {
        (0..sites)
            .map(|_| duration_pmf(rng.random_range(4.0..=6.0), horizon))
            .collect()
    };
    let pmf1 = draw_pmfs();
    let pmf2 = draw_pmfs();
    let (agent1, done1) = rover(&reward, &pmf1, horizon);
    let (agent2, done2) = rover(&reward, &pmf2, horizon);

    let mut shared = config.shared.clone();
    shared.sort_unstable();
    shared.dedup();
    let mut joint = Vec::new();
    for &site in &shared {
        let k = site - 1;
        for t1 in 1..=horizon {
            for t2 in 1..=horizon {
                let value = 0.5 * reward[k] * done1[k][t1 - 1] * done2[k][t2 - 1];
                if value > 0.0 {
                    joint.push(JointReward {
                        state1: k * horizon + t1 - 1,
                        action1: EXPERIMENT,
                        state2: k * horizon + t2 - 1,
                        action2: EXPERIMENT,
                        value,
                    });
                }
            }
        }
    }
    Ok(DecMdp {
        agents: [agent1, agent2],
        joint,
    })
}

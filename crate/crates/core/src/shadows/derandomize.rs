//! Deterministic measurement schedules for a fixed observable set.
//!
//! Bases are fixed greedily, qubit by qubit and round by round. Each choice
//! minimizes the confidence-bound cost
//!
//! ```text
//! sum_l exp(-(eta/2) * hits_l + [alive_l] * ln(1 - nu / 3^remaining_l)),   nu = 1 - exp(-eta/2)
//! ```
//!
//! where `hits_l` counts completed rounds that measured observable `l`,
//! `alive_l` says whether the current round can still measure it and
//! `remaining_l` is the number of its support sites not yet assigned.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spin_ops::{Pauli, PauliString};

use super::estimate::labels_match;
use super::snapshot::{measure_in_bases, snapshot_rng, Scratch, StateSource};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerandomizationConfig {
    pub eta: f64,
}

impl Default for DerandomizationConfig {
    fn default() -> Self {
        DerandomizationConfig { eta: 0.9 }
    }
}

/// One measurement round: a basis for every qubit.
pub type BasisAssignment = Vec<Pauli>;

pub fn derandomized_schedule(observables: &[PauliString], rounds: usize) -> Result<Vec<BasisAssignment>> {
    derandomized_schedule_with(observables, rounds, &DerandomizationConfig::default())
}

pub fn derandomized_schedule_with(
    observables: &[PauliString],
    rounds: usize,
    cfg: &DerandomizationConfig,
) -> Result<Vec<BasisAssignment>> {
    let first = observables.first().ok_or(Error::Empty)?;
    let n = first.n();
    if let Some(bad) = observables.iter().find(|o| o.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.n() });
    }
    if rounds == 0 {
        return Err(Error::Empty);
    }
    let half_eta = cfg.eta / 2.0;
    let nu = 1.0 - libm::exp(-half_eta);
    // ln(1 - nu / 3^r) for r = 0..=n
    let hope: Vec<f64> = (0..=n)
        .map(|r| libm::log(1.0 - nu / libm::pow(3.0, r as f64)))
        .collect();

    let mut hits = vec![0u64; observables.len()];
    let mut schedule = Vec::with_capacity(rounds);
    let mut alive = vec![true; observables.len()];
    let mut remaining: Vec<usize> = observables.iter().map(|o| o.weight()).collect();

    for _ in 0..rounds {
        alive.iter_mut().for_each(|a| *a = true);
        for (r, o) in remaining.iter_mut().zip(observables) {
            *r = o.weight();
        }
        // Common factor exp(-(eta/2) * min hits) dropped to avoid underflow.
        let floor = hits.iter().copied().min().unwrap_or(0);
        let mut round = Vec::with_capacity(n);
        for site in 0..n {
            let mut best = (f64::INFINITY, Pauli::X);
            for basis in Pauli::MEASUREMENT_BASES {
                let cost: f64 = observables
                    .iter()
                    .enumerate()
                    .map(|(l, o)| {
                        let label = o.label(site);
                        let (still, left) = if label == Pauli::I {
                            (alive[l], remaining[l])
                        } else {
                            (alive[l] && label == basis, remaining[l] - 1)
                        };
                        let mut v = -half_eta * (hits[l] - floor) as f64;
                        if still {
                            v += hope[left];
                        }
                        libm::exp(v)
                    })
                    .sum();
                if cost < best.0 {
                    best = (cost, basis);
                }
            }
            let chosen = best.1;
            for (l, o) in observables.iter().enumerate() {
                let label = o.label(site);
                if label != Pauli::I {
                    alive[l] &= label == chosen;
                    remaining[l] -= 1;
                }
            }
            round.push(chosen);
        }
        for (h, &a) in hits.iter_mut().zip(&alive) {
            if a {
                *h += 1;
            }
        }
        schedule.push(round);
    }
    Ok(schedule)
}

/// Direct estimate of `tr(P rho)` from scheduled rounds: the mean of the
/// eigenvalue product on the support of `P` over the rounds whose bases
/// match `P`.
pub fn estimate_derandomized<S: StateSource + ?Sized>(
    source: &S,
    schedule: &[BasisAssignment],
    p: &PauliString,
    seed: u64,
) -> Result<f64> {
    if schedule.is_empty() {
        return Err(Error::Empty);
    }
    let n = source.n_sites();
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.n() });
    }
    let mut scratch = Scratch::default();
    let mut sum = 0i64;
    let mut matched = 0usize;
    for (m, bases) in schedule.iter().enumerate() {
        if bases.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: bases.len() });
        }
        if !labels_match(bases, p) {
            continue;
        }
        let mut rng = snapshot_rng(seed, m as u64);
        let state = source.draw(&mut rng);
        let outcomes = measure_in_bases(state, bases, &mut rng, &mut scratch)?;
        let parity = p.support().map(|j| outcomes[j] as u32).sum::<u32>() % 2;
        sum += if parity == 0 { 1 } else { -1 };
        matched += 1;
    }
    if matched == 0 {
        return Err(Error::NoMatchingRounds);
    }
    Ok(sum as f64 / matched as f64)
}

use std::collections::BTreeMap;

use serde::Serialize;

use super::chart::ChartComplex;
use super::state::{init_cyclic_cover, BinomialState, DivisorId, FValue, Klass};
use crate::error::{Error, Result};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub step_limit: u64,
    /// Replay every blow-up in the chart oracle and compare after each step.
    pub oracle: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            step_limit: DEFAULT_STEP_LIMIT,
            oracle: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepLog {
    pub step: u32,
    pub center: [String; 2],
    pub max_f_before: FValue,
    pub max_f_after: FValue,
    pub new_divisor: String,
    pub new_mult: u32,
    pub killed: usize,
    pub spawned: Vec<Vec<String>>,
    pub discrepancy: i64,
    pub new_classes: u32,
    /// Number of E-class divisors by multiplicity after the step.
    pub exceptional_census: BTreeMap<u32, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionLog {
    pub n: usize,
    pub m: usize,
    pub r: u32,
    pub steps: Vec<StepLog>,
    pub discrepancy: i64,
    pub exceptional_count: u32,
    /// The exceptional count comes from a counting model, not from a theorem.
    pub exceptional_count_model_dependent: bool,
    pub final_max_f: FValue,
    pub final_singular_locus: usize,
    pub oracle_checked: bool,
}

fn census(state: &BinomialState) -> BTreeMap<u32, u32> {
    let mut out = BTreeMap::new();
    for d in state.divisors.iter().filter(|d| d.klass == Klass::E) {
        *out.entry(d.mult).or_default() += 1;
    }
    out
}

/// Runs the blow-up algorithm to the end, checking after every step that max f drops strictly,
/// that the discrepancy stays zero and, if requested, that the chart oracle agrees.
pub fn run_resolution(state: &mut BinomialState, opts: RunOptions) -> Result<ResolutionLog> {
    run_resolution_observed(state, opts, |_| {})
}

/// As [`run_resolution`], calling `observe` on the initial state and after every step.
pub fn run_resolution_observed(
    state: &mut BinomialState,
    opts: RunOptions,
    mut observe: impl FnMut(&BinomialState),
) -> Result<ResolutionLog> {
    let mut oracle = if opts.oracle {
        let mut cx = replay_charts(state)?;
        cx.compare(state)?;
        Some(cx)
    } else {
        None
    };
    observe(state);
    let mut steps = Vec::new();
    let mut before = state.max_f();
    while !before.is_zero() {
        if steps.len() as u64 >= opts.step_limit {
            return Err(Error::StepLimitExceeded(opts.step_limit));
        }
        let (e, f) = state.select_center()?;
        let rec = state.blow_up(e, f)?.clone();
        if rec.discrepancy_delta != 0 || state.discrepancy != 0 {
            return Err(Error::InvalidCenter(format!(
                "step {}: discrepancy {} after blowing up a center of order {}",
                rec.step,
                state.discrepancy,
                rec.center_mult.min(1)
            )));
        }
        if let Some(cx) = oracle.as_mut() {
            cx.blow_up(e, f, rec.new_divisor);
            cx.compare(state)?;
        }
        if let Some(s) = state
            .alive_strata()
            .find(|s| s.divisors.contains(&e) && s.divisors.contains(&f))
        {
            return Err(Error::InvalidCenter(format!(
                "stratum {} still contains both center divisors",
                s.id
            )));
        }
        if let Some(s) = state.alive_strata().find(|s| {
            s.divisors.len() > state.ambient_dim || s.dim + s.divisors.len() != state.ambient_dim
        }) {
            return Err(Error::InvalidCenter(format!(
                "stratum {} meets {} divisors in ambient dimension {}",
                s.id,
                s.divisors.len(),
                state.ambient_dim
            )));
        }
        let after = state.max_f();
        if after >= before {
            return Err(Error::NonDecreasingMeasure {
                step: rec.step,
                before,
                after,
            });
        }
        let names = |ids: &[DivisorId]| ids.iter().map(|&d| state.divisor_label(d)).collect();
        steps.push(StepLog {
            step: rec.step,
            center: [state.divisor_label(e), state.divisor_label(f)],
            max_f_before: before,
            max_f_after: after,
            new_divisor: state.divisor_label(rec.new_divisor),
            new_mult: rec.new_mult,
            killed: rec.killed.len(),
            spawned: rec
                .spawned
                .iter()
                .map(|&id| names(&state.stratum(id).divisors))
                .collect(),
            discrepancy: state.discrepancy,
            new_classes: rec.divisorial_singular_in_center,
            exceptional_census: census(state),
        });
        observe(state);
        before = after;
    }
    let final_singular_locus = state.singular_locus().len();
    if final_singular_locus != 0 || state.alive_count() != 0 {
        return Err(Error::InvalidCenter(format!(
            "max f is zero but {} singular and {} non-transversal strata remain",
            final_singular_locus,
            state.alive_count()
        )));
    }
    let exceptional_count = steps.iter().map(|s| s.new_classes).sum();
    Ok(ResolutionLog {
        n: state.n,
        m: state.m,
        r: state.r,
        steps,
        discrepancy: state.discrepancy,
        exceptional_count,
        exceptional_count_model_dependent: true,
        final_max_f: state.max_f(),
        final_singular_locus,
        oracle_checked: opts.oracle,
    })
}

/// Number of new divisor classes: per step, the components of the singular locus of codimension
/// two in `X` that lie in the center, each contributing the class of a `P^1`-bundle.
pub fn count_new_classes(log: &ResolutionLog) -> u32 {
    log.steps.iter().map(|s| s.new_classes).sum()
}

/// Chart complex of `state` obtained by replaying its history from the initial charts.
fn replay_charts(state: &BinomialState) -> Result<ChartComplex> {
    let initial = init_cyclic_cover(state.n, state.m, state.r)?;
    let mut cx = ChartComplex::initial(&initial);
    for rec in &state.history {
        cx.blow_up(rec.center.0, rec.center.1, rec.new_divisor);
    }
    Ok(cx)
}

/// Replays the history of `state` from the start in lockstep with the chart oracle, comparing
/// after every step, and finally compares against `state` itself.
pub fn oracle_check(state: &BinomialState) -> Result<()> {
    let mut model = init_cyclic_cover(state.n, state.m, state.r)?
        .with_tie_break(state.tie_break)
        .with_mutation(state.mutation);
    let mut cx = ChartComplex::initial(&model);
    cx.compare(&model)?;
    for rec in &state.history {
        let (e, f) = rec.center;
        let new = model.blow_up(e, f)?.new_divisor;
        cx.blow_up(e, f, new);
        cx.compare(&model)?;
    }
    cx.compare(state)?;
    Ok(())
}

/// Exceptional divisors over each stratum `E_0 ∩ F_S` with `2 ≤ |S| ≤ n` in the toric local model
/// `y^r = x_1 ⋯ x_k`: `C(m, k) · C(r − 1, k − 1)`. An independent count of the new classes.
pub fn toric_exceptional_count(n: usize, m: usize, r: usize) -> u64 {
    use crate::hodge::binomial;
    (2..=n as u64)
        .map(|k| binomial(m as u64, k) * binomial(r as u64 - 1, k - 1))
        .sum()
}

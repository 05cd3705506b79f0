//! Experiment harness: a grid of (field, support) spaces crossed with
//! verification suites, producing verdict rows in a deterministic order.
//!
//! Grid cells run on scoped worker threads, one per space; rows are
//! collected back in grid order, so reports are byte-identical across runs
//! regardless of scheduling. Every randomized suite derives its sub-seed
//! from the config seed and the (space, suite, trial) coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cayley::{self, ConnectionFunction, SpectrumReport};
use crate::error::{LabError, Result};
use crate::ffield::FieldDescriptor;
use crate::incidence::{self, PointSet, PolySet, SampleStrategy};
use crate::polyspace::{PolySpace, SupportDescriptor};
use crate::report::{Lhs, VerdictRow};
use crate::rng::{derive_seed, SplitMix64};
use crate::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Spectrum,
    KeyLemma,
    Mixing,
    Bounds,
    Counterexample,
    TauScan,
    AlonBoppana,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Spectrum,
        Suite::KeyLemma,
        Suite::Mixing,
        Suite::Bounds,
        Suite::Counterexample,
        Suite::TauScan,
        Suite::AlonBoppana,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Suite::Spectrum => "spectrum",
            Suite::KeyLemma => "key-lemma",
            Suite::Mixing => "mixing",
            Suite::Bounds => "bounds",
            Suite::Counterexample => "counterexample",
            Suite::TauScan => "tau-scan",
            Suite::AlonBoppana => "alon-boppana",
        }
    }

    pub fn parse(name: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|s| s.label() == name)
            .ok_or_else(|| LabError::InvalidParameter(format!("unknown suite {name:?}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub field: FieldDescriptor,
    pub support: SupportDescriptor,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spaces: Vec<SpaceSpec>,
    pub suites: Vec<Suite>,
    /// Random (𝓛, 𝓛') and (S, T) pairs per space.
    #[serde(default = "default_trials")]
    pub trials: u32,
    /// Random (𝓟, 𝓛) pairs per space.
    #[serde(default = "default_point_trials")]
    pub point_trials: u32,
    /// Trials per concentration-scan cell.
    #[serde(default = "default_tau_trials")]
    pub tau_trials: u32,
    /// Family sizes for the concentration scan; powers of q up to |V| when
    /// omitted.
    #[serde(default)]
    pub tau_sizes: Option<Vec<u64>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budget,
}

fn default_trials() -> u32 {
    200
}
fn default_point_trials() -> u32 {
    100
}
fn default_tau_trials() -> u32 {
    5
}
fn default_seed() -> u64 {
    42
}

/// The out-of-the-box grid: GF(2) and GF(3), two- and three-dimensional
/// degree-bounded spaces, every suite.
pub fn default_config() -> ExperimentConfig {
    let mut spaces = Vec::new();
    for p in [2u32, 3] {
        for support in ["full:1,2", "full:2,1"] {
            spaces.push(SpaceSpec {
                field: FieldDescriptor {
                    p,
                    s: 1,
                    modulus: None,
                },
                support: SupportDescriptor::Preset(support.into()),
            });
        }
    }
    ExperimentConfig {
        spaces,
        suites: Suite::ALL.to_vec(),
        trials: default_trials(),
        point_trials: default_point_trials(),
        tau_trials: default_tau_trials(),
        tau_sizes: None,
        seed: default_seed(),
        budgets: Budget::default(),
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<VerdictRow>,
    pub all_hold: bool,
}

/// Runs every requested suite over the grid. Rows come back in grid order:
/// spaces in config order, suites in config order, trials ascending.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutcome> {
    if config.spaces.is_empty() {
        return Err(LabError::InvalidParameter("no spaces configured".into()));
    }
    if config.suites.is_empty() {
        return Err(LabError::InvalidParameter("no suites configured".into()));
    }

    let results: Vec<Result<Vec<VerdictRow>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .spaces
            .iter()
            .enumerate()
            .map(|(idx, spec)| scope.spawn(move || run_space(config, idx, spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("grid worker panicked"))
            .collect()
    });

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(RunOutcome { rows, all_hold })
}

// Stable suite tags folded into derived seeds.
const SEED_MIXING: u64 = 1;
const SEED_BOUNDS: u64 = 2;
const SEED_POINTS: u64 = 3;
const SEED_TAU: u64 = 4;

fn run_space(config: &ExperimentConfig, idx: usize, spec: &SpaceSpec) -> Result<Vec<VerdictRow>> {
    let ctx = Arc::new(spec.field.build()?);
    let support = spec.support.build()?;
    let space = PolySpace::new(ctx, support, config.budgets)?;
    let field = format!("GF({})", space.q());
    let support_label = spec.support.label();
    eprintln!("[labcli] {field} {support_label}: starting");

    let mut conn_cache: Option<ConnectionFunction> = None;
    let mut spectrum_cache: Option<SpectrumReport> = None;
    let mut rows = Vec::new();

    for suite in &config.suites {
        let needs_conn = matches!(
            suite,
            Suite::Spectrum | Suite::Mixing | Suite::Bounds | Suite::TauScan | Suite::AlonBoppana
        );
        if needs_conn && conn_cache.is_none() {
            conn_cache = Some(incidence::incidence_connection(&space)?);
        }
        let needs_spectrum = matches!(suite, Suite::Spectrum | Suite::Mixing | Suite::AlonBoppana);
        if needs_spectrum && spectrum_cache.is_none() {
            spectrum_cache = Some(cayley::spectrum(
                conn_cache.as_ref().expect("built above"),
                &config.budgets,
            )?);
        }

        let emit = Emitter {
            field: &field,
            support: &support_label,
            suite: suite.label(),
            seed: config.seed,
        };
        match suite {
            Suite::Spectrum => suite_spectrum(
                &space,
                conn_cache.as_ref().unwrap(),
                spectrum_cache.as_ref().unwrap(),
                &emit,
                &mut rows,
            )?,
            Suite::KeyLemma => suite_key_lemma(&space, &emit, &mut rows)?,
            Suite::Mixing => suite_mixing(
                config,
                idx,
                conn_cache.as_ref().unwrap(),
                spectrum_cache.as_ref().unwrap(),
                &emit,
                &mut rows,
            ),
            Suite::Bounds => suite_bounds(
                config,
                idx,
                &space,
                conn_cache.as_ref().unwrap(),
                &emit,
                &mut rows,
            )?,
            Suite::Counterexample => suite_counterexample(config, &space, &emit, &mut rows)?,
            Suite::TauScan => suite_tau(
                config,
                idx,
                &space,
                conn_cache.as_ref().unwrap(),
                &emit,
                &mut rows,
            )?,
            Suite::AlonBoppana => suite_alon_boppana(
                &space,
                conn_cache.as_ref().unwrap(),
                spectrum_cache.as_ref().unwrap(),
                &emit,
                &mut rows,
            )?,
        }
        eprintln!("[labcli] {field} {support_label}: {} done", suite.label());
    }
    Ok(rows)
}

struct Emitter<'a> {
    field: &'a str,
    support: &'a str,
    suite: &'a str,
    seed: u64,
}

impl Emitter<'_> {
    fn row(
        &self,
        theorem: &str,
        lhs: Lhs,
        rhs: f64,
        holds: bool,
        params: BTreeMap<String, serde_json::Value>,
        seed: u64,
    ) -> VerdictRow {
        VerdictRow {
            field: self.field.to_string(),
            support: self.support.to_string(),
            suite: self.suite.to_string(),
            theorem: theorem.to_string(),
            params,
            lhs,
            rhs,
            holds,
            seed,
        }
    }
}

fn space_params(space: &PolySpace) -> BTreeMap<String, serde_json::Value> {
    let mut p = BTreeMap::new();
    p.insert("q".into(), json!(space.q()));
    p.insert("m".into(), json!(space.m()));
    p.insert("dim".into(), json!(space.dim()));
    p.insert("space_size".into(), json!(space.size()));
    p
}

fn suite_spectrum(
    space: &PolySpace,
    conn: &ConnectionFunction,
    report: &SpectrumReport,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) -> Result<()> {
    let comparison = incidence::spectrum_comparison(space, conn, report)?;
    let mut params = space_params(space);
    params.insert("predicted".into(), json!(comparison.predicted));
    params.insert("observed".into(), json!(comparison.observed));
    params.insert("lambda".into(), json!(comparison.lambda));
    if space.has_property_star().holds() {
        rows.push(emit.row(
            "spectrum-multiset",
            Lhs::Int(multiset_mismatch(
                &comparison.observed,
                &comparison.predicted,
            )),
            0.0,
            comparison.multiset_matches,
            params.clone(),
            emit.seed,
        ));
        rows.push(emit.row(
            "spectrum-eigencharacters",
            Lhs::Int(if comparison.eigencharacters_match {
                0
            } else {
                1
            }),
            0.0,
            comparison.eigencharacters_match,
            params,
            emit.seed,
        ));
    } else {
        // without the star hypothesis the statement must fail somewhere
        params.insert("star".into(), json!(space.has_property_star().describe()));
        rows.push(emit.row(
            "spectrum-negative-control",
            Lhs::Int(if comparison.multiset_matches { 0 } else { 1 }),
            0.0,
            !comparison.multiset_matches,
            params,
            emit.seed,
        ));
    }
    Ok(())
}

fn multiset_mismatch(observed: &[(i128, u64)], predicted: &[(i128, u64)]) -> i128 {
    let a: BTreeMap<i128, u64> = observed.iter().copied().collect();
    let b: BTreeMap<i128, u64> = predicted.iter().copied().collect();
    let keys: std::collections::BTreeSet<i128> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter()
        .map(|k| {
            let x = *a.get(&k).unwrap_or(&0) as i128;
            let y = *b.get(&k).unwrap_or(&0) as i128;
            (x - y).abs()
        })
        .sum()
}

fn suite_key_lemma(space: &PolySpace, emit: &Emitter, rows: &mut Vec<VerdictRow>) -> Result<()> {
    let verdict = incidence::verify_key_lemma(space)?;
    let star = space.has_property_star().holds();
    let mut params = space_params(space);
    params.insert(
        "expected_vanishing".into(),
        json!(verdict.expected_vanishing),
    );
    if star {
        rows.push(emit.row(
            "vanishing-dimension",
            Lhs::Int(verdict.vanishing_failures.len() as i128),
            0.0,
            verdict.vanishing_failures.is_empty(),
            params.clone(),
            emit.seed,
        ));
        rows.push(emit.row(
            "annihilator-restriction",
            Lhs::Int(if verdict.restriction_ok { 0 } else { 1 }),
            0.0,
            verdict.restriction_ok,
            params.clone(),
            emit.seed,
        ));
        rows.push(emit.row(
            "annihilator-disjoint",
            Lhs::Int(if verdict.disjoint_ok { 0 } else { 1 }),
            0.0,
            verdict.disjoint_ok,
            params,
            emit.seed,
        ));
    } else {
        params.insert(
            "vanishing_failures".into(),
            json!(verdict.vanishing_failures),
        );
        rows.push(emit.row(
            "key-lemma-negative-control",
            Lhs::Int(if verdict.all_hold() { 0 } else { 1 }),
            0.0,
            !verdict.all_hold(),
            params,
            emit.seed,
        ));
    }
    Ok(())
}

fn suite_mixing(
    config: &ExperimentConfig,
    space_idx: usize,
    conn: &ConnectionFunction,
    report: &SpectrumReport,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) {
    let n = conn.order();
    for trial in 0..config.trials {
        let seed = derive_seed(config.seed, &[space_idx as u64, SEED_MIXING, trial as u64]);
        let mut rng = SplitMix64::new(seed);
        let s = rng.random_subset(n);
        let t = rng.random_subset(n);
        let verdict = cayley::verify_mixing(conn, report, &s, &t);
        let mut params = BTreeMap::new();
        params.insert("trial".into(), json!(trial));
        params.insert("s_size".into(), json!(verdict.s_size));
        params.insert("t_size".into(), json!(verdict.t_size));
        params.insert("edge_weight".into(), json!(verdict.edge_weight_re));
        params.insert("main".into(), json!(verdict.main_term));
        rows.push(emit.row(
            "expander-mixing",
            Lhs::Float(verdict.lhs),
            verdict.rhs,
            verdict.holds,
            params,
            seed,
        ));
    }
}

fn suite_bounds(
    config: &ExperimentConfig,
    space_idx: usize,
    space: &PolySpace,
    conn: &ConnectionFunction,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) -> Result<()> {
    if !space.has_property_star().holds() {
        let mut params = space_params(space);
        params.insert("star".into(), json!(space.has_property_star().describe()));
        params.insert(
            "note".into(),
            json!("incidence bounds are not claimed here"),
        );
        rows.push(emit.row("star-hypothesis", Lhs::Int(0), 0.0, true, params, emit.seed));
        return Ok(());
    }
    let size = space.size();

    // random polynomial pairs
    for trial in 0..config.trials {
        let seed = derive_seed(config.seed, &[space_idx as u64, SEED_BOUNDS, trial as u64]);
        let mut rng = SplitMix64::new(seed);
        let l = PolySet::new(space, rng.random_subset(size))?;
        let lp = PolySet::new(space, rng.random_subset(size))?;
        let cross = incidence::verify_cross_version(space, conn, &l, &lp)?;
        let mut params = BTreeMap::new();
        params.insert("trial".into(), json!(trial));
        params.insert("l_size".into(), json!(l.len()));
        params.insert("lp_size".into(), json!(lp.len()));
        params.insert("sum".into(), json!(cross.sum.to_string()));
        rows.push(emit.row(
            "cross-incidence",
            Lhs::Int(cross.deviation),
            cross.rhs,
            cross.holds,
            params.clone(),
            seed,
        ));
        let sb = incidence::verify_subspace_bounds(space, conn, &l)?;
        params.insert("sum".into(), json!(sb.sum.to_string()));
        rows.push(emit.row(
            "incidence-sum-lower",
            Lhs::Int(sb.lower),
            sb.sum as f64,
            sb.lower_holds,
            params.clone(),
            seed,
        ));
        rows.push(emit.row(
            "incidence-sum-upper",
            Lhs::Int(sb.sum),
            sb.upper as f64,
            sb.upper_holds,
            params,
            seed,
        ));
    }

    // equality case 𝓛 = 𝓛' = V: deviation must vanish exactly
    let all = PolySet::full(space);
    let cross = incidence::verify_cross_version(space, conn, &all, &all)?;
    let mut params = space_params(space);
    params.insert("case".into(), json!("L = L' = V"));
    rows.push(emit.row(
        "cross-incidence-equality",
        Lhs::Int(cross.deviation),
        0.0,
        cross.deviation == 0,
        params,
        emit.seed,
    ));

    // random point-polynomial pairs
    let grid = space.q().pow(space.m() + 1);
    for trial in 0..config.point_trials {
        let seed = derive_seed(config.seed, &[space_idx as u64, SEED_POINTS, trial as u64]);
        let mut rng = SplitMix64::new(seed);
        let pts = PointSet::new(space, rng.random_subset(grid))?;
        let l = PolySet::new(space, rng.random_subset(size))?;
        let check = incidence::verify_point_poly_bound(space, &pts, &l)?;
        let mut params = BTreeMap::new();
        params.insert("trial".into(), json!(trial));
        params.insert("p_size".into(), json!(pts.len()));
        params.insert("l_size".into(), json!(l.len()));
        params.insert("incidences".into(), json!(check.incidences));
        params.insert("full_space_case".into(), json!(check.full_space_case));
        rows.push(emit.row(
            "point-poly-deviation",
            Lhs::Float(check.deviation),
            check.rhs,
            check.holds,
            params.clone(),
            seed,
        ));
        if space.is_full_space() {
            let cs = incidence::cauchy_schwarz_bound(space, &pts, &l)?;
            params.insert("branch_points".into(), json!(cs.branch_points));
            params.insert("branch_polys".into(), json!(cs.branch_polys));
            rows.push(emit.row(
                "cauchy-schwarz-upper",
                Lhs::Int(cs.incidences as i128),
                cs.bound,
                cs.holds,
                params,
                seed,
            ));
        }
    }

    // full-grid equality case
    let full_points = PointSet::full_grid(space)?;
    let check = incidence::verify_point_poly_bound(space, &full_points, &all)?;
    let mut params = space_params(space);
    params.insert("case".into(), json!("P = F_q^{m+1}, L = V"));
    rows.push(emit.row(
        "point-poly-equality",
        Lhs::Int(check.scaled_deviation),
        0.0,
        check.scaled_deviation == 0,
        params.clone(),
        emit.seed,
    ));

    // spectral error term versus the counting bound, on the dense instance
    if space.is_full_space() {
        let cs = incidence::cauchy_schwarz_bound(space, &full_points, &all)?;
        params.insert("regime".into(), json!(cs.comparison_regime));
        params.insert("incidences".into(), json!(cs.incidences));
        rows.push(emit.row(
            "cs-vs-spectral",
            Lhs::Float(cs.spectral_rhs),
            cs.bound,
            cs.spectral_smaller,
            params,
            emit.seed,
        ));
    }
    Ok(())
}

fn suite_counterexample(
    config: &ExperimentConfig,
    space: &PolySpace,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) -> Result<()> {
    if !space.is_full_space() || space.max_total_degree() < 1 {
        return Ok(());
    }
    let report = incidence::example_counterexample(
        space.ctx_arc(),
        space.m(),
        space.max_total_degree(),
        config.budgets,
    )?;
    let mut params = space_params(space);
    params.insert("l0_size".into(), json!(report.l0_size));
    params.insert("incidences".into(), json!(report.incidences));
    params.insert(
        "concentration_ratio".into(),
        json!(report.concentration_ratio),
    );
    params.insert("ratio_to_invalid".into(), json!(report.ratio_to_invalid));
    params.insert(
        "ratio_to_naive_bound".into(),
        json!(report.ratio_to_naive_bound),
    );
    rows.push(emit.row(
        "counterexample-identity",
        Lhs::Int(report.identity_lhs),
        report.identity_rhs as f64,
        report.identity_holds,
        params,
        emit.seed,
    ));
    Ok(())
}

fn suite_tau(
    config: &ExperimentConfig,
    space_idx: usize,
    space: &PolySpace,
    conn: &ConnectionFunction,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) -> Result<()> {
    let sizes: Vec<u64> = match &config.tau_sizes {
        Some(sizes) => sizes.clone(),
        None => {
            // powers of q up to |V|
            let mut out = Vec::new();
            let mut n = space.q();
            while n <= space.size() {
                out.push(n);
                n = match n.checked_mul(space.q()) {
                    Some(next) => next,
                    None => break,
                };
            }
            out
        }
    };
    let scan_seed = derive_seed(config.seed, &[space_idx as u64, SEED_TAU]);
    let scan = incidence::tau_scan(
        space,
        conn,
        &SampleStrategy::ALL,
        &sizes,
        config.tau_trials,
        scan_seed,
    )?;
    let q = space.q() as f64;
    for row in scan {
        let mut params = BTreeMap::new();
        params.insert("strategy".into(), json!(row.strategy));
        params.insert("size".into(), json!(row.size));
        params.insert("trials".into(), json!(row.trials));
        params.insert("min_ratio".into(), json!(row.min_ratio));
        params.insert("max_ratio".into(), json!(row.max_ratio));
        // ratio cap from the exact incidence-sum upper bound
        let cap =
            1.0 + q.powi(space.dim() as i32 - 1) / (q.powi(space.m() as i32 - 1) * row.size as f64);
        rows.push(emit.row(
            "tau-concentration",
            Lhs::Float(row.mean_ratio),
            cap,
            row.within_star_bound.unwrap_or(true),
            params,
            row.seed,
        ));
    }
    Ok(())
}

fn suite_alon_boppana(
    space: &PolySpace,
    conn: &ConnectionFunction,
    report: &SpectrumReport,
    emit: &Emitter,
    rows: &mut Vec<VerdictRow>,
) -> Result<()> {
    let bound = cayley::variance_lower_bound(conn)?;
    let mut params = space_params(space);
    params.insert("lambda".into(), json!(report.lambda));
    params.insert(
        "lambda_over_bound".into(),
        json!(if bound > 0.0 {
            report.lambda / bound
        } else {
            f64::INFINITY
        }),
    );
    rows.push(emit.row(
        "variance-lower-bound",
        Lhs::Float(bound),
        report.lambda,
        bound <= report.lambda + 1e-9 * report.lambda.max(1.0),
        params.clone(),
        emit.seed,
    ));

    // |V|·Σc² − (Σc)² = (q−1)·q^{2dim+m−2}, the closed form of the variance
    // of the zero-count coloring, checked as integers.
    let values = conn
        .exact_values()
        .ok_or_else(|| LabError::Unsupported("variance closed form needs exact values".into()))?;
    let n = conn.order() as i128;
    let sum: i128 = values.iter().map(|&v| v as i128).sum();
    let sum_sq: i128 = values.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let lhs = n * sum_sq - sum * sum;
    let q = space.q() as i128;
    let expected = (q - 1) * q.pow(2 * space.dim() as u32 + space.m() - 2);
    params.insert("scaled_variance".into(), json!(lhs.to_string()));
    rows.push(emit.row(
        "variance-closed-form",
        Lhs::Int(lhs),
        expected as f64,
        lhs == expected,
        params,
        emit.seed,
    ));
    Ok(())
}

/// Human-readable description of one space: field, support, dimensions, the
/// star verdict with its witness, and the predicted spectrum when it holds.
pub fn describe(
    field: &FieldDescriptor,
    support: &SupportDescriptor,
    budget: Budget,
) -> Result<String> {
    let ctx = Arc::new(field.build()?);
    let sup = support.build()?;
    let space = PolySpace::new(Arc::clone(&ctx), sup, budget)?;
    let mut out = String::new();
    out.push_str(&format!(
        "field: GF({}) = GF({}^{}), modulus {:?}\n",
        ctx.q(),
        ctx.p(),
        ctx.s(),
        ctx.modulus()
    ));
    out.push_str(&format!(
        "support: {} → exponents {:?}\n",
        support.label(),
        space.support().exponents()
    ));
    out.push_str(&format!(
        "m = {}, dim V = {}, |V| = {}\n",
        space.m(),
        space.dim(),
        space.size()
    ));
    let star = space.has_property_star();
    out.push_str(&format!("star condition: {}\n", star.describe()));
    if star.holds() {
        let predicted = incidence::predicted_spectrum_multiset(&space);
        let parts: Vec<String> = predicted
            .iter()
            .rev()
            .map(|(v, k)| format!("{v} ×{k}"))
            .collect();
        out.push_str(&format!("predicted spectrum: {}\n", parts.join(", ")));
        out.push_str(&format!(
            "predicted lambda: {}\n",
            (space.q() as i128).pow(space.dim() as u32 - 1)
        ));
    } else {
        out.push_str("predicted spectrum: not claimed without the star condition\n");
    }
    Ok(out)
}

//! Simulated decision maker and experiment generators.
//!
//! The decision maker ranks prospects by a certainty equivalent under the
//! utility `u(x) = 1 − e^{−γx}` for `x ≥ 0` and `u(x) = γx` for `x < 0`,
//! applied to the weighted attribute sum in each scenario.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{EcdsPair, Instance};
use crate::pro::{AffineReward, DecisionModel, ValidModel};
use crate::prospect::Prospect;

/// Risk parameter used in the experiments.
pub const DEFAULT_GAMMA: f64 = 0.05;
/// Per-scenario capital budget in the capital-allocation experiment.
pub const CAPITAL_BUDGET: f64 = 0.5;

/// Attribute weights from a nine-criterion survey, usable as a sample
/// configuration. They sum to 0.9999 and are renormalized on load.
pub const EXAMPLE_WEIGHTS: [f64; 9] = [
    0.1837, 0.1668, 0.0645, 0.0124, 0.0071, 0.1737, 0.1240, 0.0442, 0.2235,
];

/// Certainty-equivalent decision maker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeDm {
    pub weights: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

impl CeDm {
    /// Validates the weights (nonnegative, summing to one within 1e-3; they
    /// are then renormalized exactly) and `γ > 0`.
    pub fn new(weights: Vec<f64>, gamma: f64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidValue("weights must be nonempty, finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidValue(format!("weights must sum to 1, got {total}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidValue(format!("risk parameter must be positive, got {gamma}")));
        }
        Ok(CeDm {
            weights: weights.iter().map(|w| w / total).collect(),
            gamma,
        })
    }

    pub fn single_attribute() -> Self {
        CeDm {
            weights: vec![1.0],
            gamma: DEFAULT_GAMMA,
        }
    }

    /// Weights drawn uniformly from the simplex.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        CeDm {
            weights: raw.iter().map(|x: &f64| x / total).collect(),
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CeDm = serde_json::from_str(s).map_err(|e| Error::Parse(format!("decision maker JSON: {e}")))?;
        CeDm::new(raw.weights, raw.gamma)
    }

    pub fn utility(&self, x: f64) -> f64 {
        if x >= 0.0 {
            -(-self.gamma * x).exp_m1()
        } else {
            self.gamma * x
        }
    }

    pub fn utility_derivative(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.gamma * (-self.gamma * x).exp()
        } else {
            self.gamma
        }
    }

    /// Inverse utility on `(−∞, 1)`.
    pub fn inverse_utility(&self, y: f64) -> f64 {
        assert!(y < 1.0, "mean utility {y} lies outside the utility's range");
        if y >= 0.0 {
            -(-y).ln_1p() / self.gamma
        } else {
            y / self.gamma
        }
    }

    fn scenario_payoff(&self, row: &[f64]) -> f64 {
        row.iter().zip(&self.weights).map(|(a, b)| a * b).sum()
    }
}

/// Certainty equivalent of `x` with equiprobable scenarios.
pub fn ce_value(dm: &CeDm, x: &Prospect) -> Result<f64> {
    if x.attributes() != dm.weights.len() {
        return Err(Error::Dimension(format!(
            "prospect has {} attributes, decision maker weighs {}",
            x.attributes(),
            dm.weights.len()
        )));
    }
    let mean = x.rows().map(|r| dm.utility(dm.scenario_payoff(r))).sum::<f64>() / x.scenarios() as f64;
    Ok(dm.inverse_utility(mean))
}

fn componentwise_max<'a>(ps: impl IntoIterator<Item = &'a Prospect>) -> Option<Prospect> {
    let mut it = ps.into_iter();
    let first = it.next()?.clone();
    let (t, n) = (first.scenarios(), first.attributes());
    let mut data = first.into_vec();
    for p in it {
        for (a, b) in data.iter_mut().zip(p.as_slice()) {
            *a = a.max(*b);
        }
    }
    Some(Prospect::new(t, n, data).expect("maximum of finite prospects"))
}

/// Draws `k` distinct unordered index pairs sequentially, so the draws for a
/// smaller `k` under the same seed are a prefix of those for a larger `k`.
fn sample_pairs(pool: usize, k: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let available = pool * pool.saturating_sub(1) / 2;
    if k > available {
        return Err(Error::InvalidValue(format!(
            "a pool of {pool} prospects has only {available} distinct pairs, {k} requested"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let i = rng.random_range(0..pool);
        let j = rng.random_range(0..pool);
        if i != j && seen.insert((i.min(j), i.max(j))) {
            out.push((i, j));
        }
    }
    Ok(out)
}

fn oriented_pairs(pool: &[Prospect], pairs: &[(usize, usize)], dm: &CeDm) -> Result<Vec<EcdsPair>> {
    pairs
        .iter()
        .map(|&(i, j)| {
            let (ci, cj) = (ce_value(dm, &pool[i])?, ce_value(dm, &pool[j])?);
            let (w, y) = if ci > cj || (ci == cj && i < j) { (i, j) } else { (j, i) };
            Ok(EcdsPair {
                preferred: pool[w].clone(),
                dominated: pool[y].clone(),
            })
        })
        .collect()
}

fn check_pool(pool: &[Prospect]) -> Result<()> {
    let first = pool.first().ok_or_else(|| Error::InvalidValue("prospect pool is empty".into()))?;
    pool.iter().try_for_each(|p| first.check_shape(p, "prospect pool"))
}

/// Samples `k` comparisons from `pool`, orienting each by the decision
/// maker's certainty equivalent. The normalizing prospect is the
/// componentwise maximum of the sampled prospects (of the whole pool when
/// `k = 0`).
pub fn generate_ecds(pool: &[Prospect], k: usize, dm: &CeDm, lipschitz: f64, law: bool, seed: u64) -> Result<Instance> {
    check_pool(pool)?;
    let idx = sample_pairs(pool.len(), k, seed)?;
    let pairs = oriented_pairs(pool, &idx, dm)?;
    let w0 = if pairs.is_empty() {
        componentwise_max(pool)
    } else {
        componentwise_max(pairs.iter().flat_map(|p| [&p.preferred, &p.dominated]))
    }
    .expect("nonempty pool");
    Ok(Instance::new(w0, pairs, lipschitz, law))
}

/// Nested instances for increasing comparison counts under one seed. All
/// share the normalizing prospect of the largest instance, so each ambiguity
/// set contains the next.
pub fn generate_nested_ecds(
    pool: &[Prospect],
    sizes: &[usize],
    dm: &CeDm,
    lipschitz: f64,
    law: bool,
    seed: u64,
) -> Result<Vec<Instance>> {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let full = generate_ecds(pool, largest, dm, lipschitz, law, seed)?;
    Ok(sizes
        .iter()
        .map(|&k| Instance::new(full.w0.clone(), full.pairs[..k].to_vec(), lipschitz, law))
        .collect())
}

/// Draws one `T×N` return prospect: `X_n = 10(φ + ξ_n)` per scenario with a
/// common factor `φ ~ N(0, 0.02)` and `ξ_n ~ N(0.03n, 0.025n)`, where the
/// second parameter is a standard deviation.
pub fn draw_returns(t: usize, n: usize, rng: &mut impl Rng) -> Prospect {
    let phi = Normal::new(0.0, 0.02).expect("valid normal");
    let mut data = Vec::with_capacity(t * n);
    for _ in 0..t {
        let f = phi.sample(rng);
        for a in 1..=n {
            let a = a as f64;
            let xi = Normal::new(0.03 * a, 0.025 * a).expect("valid normal").sample(rng);
            data.push(10.0 * (f + xi));
        }
    }
    Prospect::new(t, n, data).expect("finite draws")
}

/// Capital-allocation experiment data.
#[derive(Clone, Debug)]
pub struct CapitalExperiment {
    /// Prospects the decision maker compares.
    pub pool: Vec<Prospect>,
    /// Current position `X`; the reward is `X + Z`.
    pub base: Prospect,
    /// Decision `Z ∈ ℝ^{T×N}` (scenario-major) with `Z ≥ 0` and
    /// `Σ_n Z_{t,n} ≤ B` in every scenario.
    pub model: DecisionModel,
}

/// Generates a pool of `pool_size` return prospects, a base position and the
/// capital-allocation decision model.
pub fn gen_capital_instance(n: usize, t: usize, pool_size: usize, seed: u64) -> Result<CapitalExperiment> {
    if n == 0 || t == 0 {
        return Err(Error::Dimension("capital experiment needs T, N ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = draw_returns(t, n, &mut rng);
    let pool = (0..pool_size).map(|_| draw_returns(t, n, &mut rng)).collect();
    let m = t * n;
    let g = (0..t)
        .map(|tt| {
            (0..n)
                .map(|nn| {
                    let mut e = vec![0.0; m];
                    e[tt * n + nn] = 1.0;
                    e
                })
                .collect()
        })
        .collect();
    let h = base.rows().map(<[f64]>::to_vec).collect();
    let a = (0..t)
        .map(|tt| {
            let mut r = vec![0.0; m];
            r[tt * n..(tt + 1) * n].fill(1.0);
            r
        })
        .collect();
    Ok(CapitalExperiment {
        pool,
        base,
        model: DecisionModel {
            a,
            b: vec![CAPITAL_BUDGET; t],
            aeq: Vec::new(),
            beq: Vec::new(),
            reward: AffineReward { g, h },
            bounds: vec![(Some(0.0), None); m],
        },
    })
}

/// Reads a headerless numeric CSV into rows.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{shown}: {e}")))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{shown}: {e}")))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{shown}: row {}: '{f}' is not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{shown}: no rows")));
    }
    Ok(rows)
}

/// Loads a `T×M` return table: one single-attribute prospect per asset and
/// the simplex-constrained portfolio model.
pub fn load_returns_csv(path: impl AsRef<Path>) -> Result<(Vec<Prospect>, DecisionModel)> {
    let rows = read_matrix_csv(path)?;
    let m = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != m) {
        return Err(Error::Parse(format!("return table is ragged at row {}", i + 1)));
    }
    let pool = (0..m)
        .map(|j| Prospect::column(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok((pool, DecisionModel::portfolio(&rows)?))
}

/// Feasible sets with a closed-form Euclidean projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProjectionSet {
    /// `{z ≥ 0, Σz = 1}`.
    Simplex,
    /// `{z ≥ 0, Σ_{n} z_{t,n} ≤ budget}` for `t` blocks of `n` entries.
    ScenarioBudget { n: usize, budget: f64 },
}

fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - total) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

impl ProjectionSet {
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        match *self {
            ProjectionSet::Simplex => project_simplex(z, 1.0),
            ProjectionSet::ScenarioBudget { n, budget } => z
                .chunks(n)
                .flat_map(|block| {
                    let clipped: Vec<f64> = block.iter().map(|x| x.max(0.0)).collect();
                    if clipped.iter().sum::<f64>() <= budget {
                        clipped
                    } else {
                        project_simplex(block, budget)
                    }
                })
                .collect(),
        }
    }
}

/// Maximizes the expected utility `mean_t u(⟨w, G_t(z)⟩)` by projected
/// gradient ascent with backtracking; stops when a step moves `z` by less
/// than `tol`. Returns the decision and its certainty equivalent.
pub fn maximize_expected_utility(dm: &CeDm, model: &ValidModel, set: ProjectionSet, tol: f64) -> Result<(Vec<f64>, f64)> {
    let m = model.num_vars();
    let t = model.scenarios();
    let reward = &model.model().reward;
    let objective = |z: &[f64]| -> Result<f64> {
        let x = model.apply(z)?;
        Ok(x.rows().map(|r| dm.utility(dm.scenario_payoff(r))).sum::<f64>() / t as f64)
    };
    let gradient = |z: &[f64]| -> Result<Vec<f64>> {
        let x = model.apply(z)?;
        let mut g = vec![0.0; m];
        for (tt, row) in x.rows().enumerate() {
            let du = dm.utility_derivative(dm.scenario_payoff(row)) / t as f64;
            for (nn, w) in dm.weights.iter().enumerate() {
                for (gi, c) in g.iter_mut().zip(&reward.g[tt][nn]) {
                    *gi += du * w * c;
                }
            }
        }
        Ok(g)
    };
    let mut z = set.project(&vec![0.0; m]);
    let mut f = objective(&z)?;
    let mut step = 1.0;
    for _ in 0..100_000 {
        let g = gradient(&z)?;
        loop {
            let cand = set.project(&z.iter().zip(&g).map(|(a, b)| a + step * b).collect::<Vec<_>>());
            let fc = objective(&cand)?;
            let moved: f64 = cand.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let gain: f64 = cand.iter().zip(&z).zip(&g).map(|((a, b), d)| (a - b) * d).sum();
            if fc >= f + 0.5 * gain - 1e-15 || moved < tol * 1e-3 {
                let done = moved < tol;
                z = cand;
                f = fc.max(f);
                step *= 2.0;
                if done {
                    return Ok((z, dm.inverse_utility(f)));
                }
                break;
            }
            step *= 0.5;
        }
    }
    Err(Error::Solver("projected gradient ascent did not converge".into()))
}

/// Random decision from the projection set's interior structure.
pub fn random_decision(set: ProjectionSet, m: usize, rng: &mut impl Rng) -> Vec<f64> {
    match set {
        ProjectionSet::Simplex => {
            let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x: &f64| x / total).collect()
        }
        ProjectionSet::ScenarioBudget { n, budget } => (0..m / n)
            .flat_map(|_| {
                // Uniform on the budget simplex with slack, then scaled.
                let raw: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = raw.iter().sum();
                raw[..n].iter().map(|x: &f64| budget * x / total).collect::<Vec<_>>()
            })
            .collect(),
    }
}

/// Which experiment to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Portfolio,
    Capital,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Largest comparison count; the nested sizes are the standard ladder
    /// `1, 2, 5, 10, 20` below it, plus this value.
    pub pairs: usize,
    pub scenarios: usize,
    /// Attributes (capital) or assets (portfolio, synthetic returns only).
    pub attributes: usize,
    /// Prospects the comparisons are drawn from (capital only).
    pub pool_size: usize,
    pub test_prospects: usize,
    pub lipschitz: f64,
    pub law: bool,
    pub seed: u64,
    /// Return table for the portfolio experiment; synthetic when absent.
    pub returns: Option<Vec<Vec<f64>>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Portfolio,
            pairs: 20,
            scenarios: 10,
            attributes: 10,
            pool_size: 30,
            test_prospects: 50,
            lipschitz: 1.0,
            law: false,
            seed: 0,
            returns: None,
        }
    }
}

/// One row of the experiment report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub pairs: usize,
    pub pipeline: &'static str,
    pub theta_size: usize,
    pub sort_lp_calls: usize,
    /// Average robust value over the test prospects.
    pub avg_rcf: f64,
    /// `avg_rcf` min-max normalized across the rows of the same pipeline.
    pub avg_rcf_minmax: f64,
    pub pro_binary: f64,
    pub pro_levelsearch: f64,
    pub pro_lp_calls: usize,
    /// Certainty equivalent of the robust decision's reward.
    pub pro_ce: f64,
    /// Certainty equivalent of the expected-utility optimum.
    pub truth_ce: f64,
}

/// Comparison counts used for the trend: `1, 2, 5, 10, 20` up to `max`,
/// followed by `max` itself.
pub fn nested_sizes(max: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = [1, 2, 5, 10, 20].into_iter().filter(|&k| k <= max).collect();
    if sizes.last() != Some(&max) {
        sizes.push(max);
    }
    sizes
}

/// Runs the nested-comparison experiment and reports, per comparison count
/// and pipeline, the average robust value of fixed test prospects and the
/// robust optimization results.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    use crate::rcf::evaluate;
    use crate::pro::{solve_pro, solve_pro_law, solve_pro_law_levelsearch, solve_pro_levelsearch};
    use crate::value::solve_value_problem;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (pool, model, set, dm) = match cfg.kind {
        ExperimentKind::Portfolio => {
            let rows = match &cfg.returns {
                Some(r) => r.clone(),
                None => {
                    let r = draw_returns(cfg.scenarios, cfg.attributes, &mut rng);
                    r.rows().map(<[f64]>::to_vec).collect()
                }
            };
            let model = DecisionModel::portfolio(&rows)?;
            let m = rows[0].len();
            let pool = (0..m)
                .map(|j| Prospect::column(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            (pool, model, ProjectionSet::Simplex, CeDm::single_attribute())
        }
        ExperimentKind::Capital => {
            let exp = gen_capital_instance(cfg.attributes, cfg.scenarios, cfg.pool_size, cfg.seed)?;
            let dm = CeDm::random(cfg.attributes, &mut rng);
            let set = ProjectionSet::ScenarioBudget {
                n: cfg.attributes,
                budget: CAPITAL_BUDGET,
            };
            (exp.pool, exp.model, set, dm)
        }
    };
    let model = model.validate()?;
    let tests: Vec<Prospect> = (0..cfg.test_prospects)
        .map(|_| model.apply(&random_decision(set, model.num_vars(), &mut rng)))
        .collect::<Result<_>>()?;
    let (_, truth_ce) = maximize_expected_utility(&dm, &model, set, 1e-6)?;
    let sizes = nested_sizes(cfg.pairs);
    let pipelines: &[bool] = if cfg.law { &[false, true] } else { &[false] };
    let mut rows = Vec::new();
    for &law in pipelines {
        let instances = generate_nested_ecds(&pool, &sizes, &dm, cfg.lipschitz, law, cfg.seed)?;
        let start = rows.len();
        for (inst, &k) in instances.iter().zip(&sizes) {
            // Test prospects may exceed the normalizing prospect; that is fine
            // for evaluation, which needs no dominance.
            let vi = inst.validate()?;
            let d = solve_value_problem(&vi)?;
            let mut total = 0.0;
            for x in &tests {
                total += evaluate(x, &d, &vi)?.value;
            }
            let (bin, lvl) = if law {
                (solve_pro_law(&model, &d, &vi)?, solve_pro_law_levelsearch(&model, &d, &vi)?)
            } else {
                (solve_pro(&model, &d, &vi)?, solve_pro_levelsearch(&model, &d, &vi)?)
            };
            rows.push(ExperimentRow {
                pairs: k,
                pipeline: if law { "law" } else { "base" },
                theta_size: vi.size(),
                sort_lp_calls: d.lp_calls,
                avg_rcf: total / tests.len().max(1) as f64,
                avg_rcf_minmax: 0.0,
                pro_binary: bin.value,
                pro_levelsearch: lvl.value,
                pro_lp_calls: bin.lp_calls,
                pro_ce: ce_value(&dm, &model.apply(&bin.z_star)?)?,
                truth_ce,
            });
        }
        let block = &mut rows[start..];
        let lo = block.iter().map(|r| r.avg_rcf).fold(f64::INFINITY, f64::min);
        let hi = block.iter().map(|r| r.avg_rcf).fold(f64::NEG_INFINITY, f64::max);
        for r in block {
            r.avg_rcf_minmax = if hi > lo { (r.avg_rcf - lo) / (hi - lo) } else { 1.0 };
        }
    }
    Ok(rows)
}

/// Writes experiment rows as CSV with a header.
pub fn write_experiment_csv<W: std::io::Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(format!("writing CSV: {e}")))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ce_examples() {
        let dm = CeDm::single_attribute();
        assert!((ce_value(&dm, &Prospect::scalar(7.5)).unwrap() - 7.5).abs() < 1e-12);
        assert!((ce_value(&dm, &Prospect::scalar(-3.0)).unwrap() + 3.0).abs() < 1e-12);
        let x = Prospect::column(&[0.0, 40.0]).unwrap();
        let want = -(1.0 - (1.0 - (-2.0f64).exp()) / 2.0).ln() / 0.05;
        let got = ce_value(&dm, &x).unwrap();
        assert!((got - want).abs() < 1e-12);
        // −ln(1 − (1 − e⁻²)/2)/0.05
        assert!((got - 11.32438).abs() < 1e-5);
    }

    #[test]
    fn example_weights_load() {
        let dm = CeDm::new(EXAMPLE_WEIGHTS.to_vec(), DEFAULT_GAMMA).unwrap();
        assert!((dm.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dm.weights[0] - 0.1837 / 0.9999).abs() < 1e-12);
        assert!(CeDm::new(vec![0.5, 0.4], 0.05).is_err());
        assert!(CeDm::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn ecds_generation() {
        let pool: Vec<Prospect> = [5.0, 3.0, 1.0].iter().map(|&x| Prospect::scalar(x)).collect();
        let dm = CeDm::single_attribute();
        let inst = generate_ecds(&pool, 3, &dm, 1.0, false, 9).unwrap();
        for p in &inst.pairs {
            assert!(p.preferred.get(0, 0) > p.dominated.get(0, 0));
        }
        assert_eq!(inst.w0, Prospect::scalar(5.0));
        assert!(inst.validate().is_ok());
        let empty = generate_ecds(&pool, 0, &dm, 1.0, false, 9).unwrap();
        assert_eq!(empty.validate().unwrap().size(), 1);
        assert!(generate_ecds(&pool, 4, &dm, 1.0, false, 9).is_err());
        let nested = generate_nested_ecds(&pool, &[1, 3], &dm, 1.0, false, 9).unwrap();
        assert_eq!(nested[0].pairs[..], inst.pairs[..1]);
    }

    #[test]
    fn capital_generator() {
        let a = gen_capital_instance(3, 4, 5, 11).unwrap();
        let b = gen_capital_instance(3, 4, 5, 11).unwrap();
        assert_eq!(a.pool, b.pool);
        let m = a.model.validate().unwrap();
        assert_eq!(m.num_vars(), 12);
        let z = vec![0.5, 0.0, 0.0, 0.0, 0.25, 0.25, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0];
        assert!(m.contains(&z, 1e-12));
        assert_eq!(m.apply(&z).unwrap().get(0, 0), a.base.get(0, 0) + 0.5);
        assert!(!m.contains(&[0.6; 12], 1e-12));
    }

    #[test]
    fn projections() {
        let p = ProjectionSet::Simplex.project(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
        let p = ProjectionSet::Simplex.project(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
        let s = ProjectionSet::ScenarioBudget { n: 2, budget: 0.5 };
        assert_eq!(s.project(&[0.1, -1.0, 1.0, 1.0]), vec![0.1, 0.0, 0.25, 0.25]);
    }

    #[test]
    fn utility_maximizer_on_two_assets() {
        // A sure 3 beats a sure 2: all weight on the first asset.
        let model = DecisionModel::portfolio(&[vec![3.0, 2.0], vec![3.0, 2.0]]).unwrap().validate().unwrap();
        let (z, ce) = maximize_expected_utility(&CeDm::single_attribute(), &model, ProjectionSet::Simplex, 1e-6).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-6);
        assert!((ce - 3.0).abs() < 1e-6);
    }
}

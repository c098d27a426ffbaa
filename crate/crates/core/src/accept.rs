//! Level selection, acceptance sets and the aspirational representation.
//!
//! The acceptance set at level `v ≤ 0` is the monotone polyhedron
//! `{x : x ≥ Σ_θ p_θ θ̃ + (v/C)·1, p ∈ simplex}` over the translated
//! prospects `θ̃ = θ − (v_θ/C)·1` of the first `κ(v)` sorted prospects.

use prefrobust_lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, Var};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::ValidInstance;
use crate::prospect::{inf_norm_distance, tilde, Prospect};
use crate::value::{Decomposition, GUARD};

/// Number of sorted values at or above `v` (within the guard band), i.e.
/// the level whose value interval `(v_{j+1}, v_j]` contains `v`. Repeated
/// values resolve to the largest such index.
pub fn kappa(v: f64, d: &Decomposition) -> Result<usize> {
    if v.is_nan() || v > 0.0 {
        return Err(Error::InvalidValue(format!("level must be ≤ 0, got {v}")));
    }
    Ok(d.entries.iter().filter(|e| e.value >= v - GUARD).count())
}

/// Generators of the acceptance set at one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptancePolyhedron {
    pub level: f64,
    pub kappa: usize,
    /// Translated prospects `θ̃` for the first `kappa` sorted prospects.
    pub generators: Vec<Prospect>,
    /// The constant `v/C` added to every entry.
    pub offset: f64,
}

fn translated(d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<Vec<Prospect>> {
    d.entries[..j]
        .iter()
        .map(|e| tilde(inst.prospect(e.prospect), e.value, inst.lipschitz()))
        .collect()
}

pub fn acceptance_polyhedron(v: f64, d: &Decomposition, inst: &ValidInstance) -> Result<AcceptancePolyhedron> {
    d.check(inst, d.law_invariant)?;
    let j = kappa(v, d)?;
    Ok(AcceptancePolyhedron {
        level: v,
        kappa: j,
        generators: translated(d, j, inst)?,
        offset: v / inst.lipschitz(),
    })
}

fn simplex_vars(p: &mut LpProblem, k: usize) -> Vec<Var> {
    let vars: Vec<Var> = (0..k).map(|_| p.add_nonneg(0.0)).collect();
    let terms: Vec<(Var, f64)> = vars.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(&terms, Relation::Eq, 1.0);
    vars
}

fn optimal(p: &LpProblem, what: &str) -> Result<prefrobust_lp::LpResult> {
    let r = solve_lp(p)?;
    match r.status {
        LpStatus::Optimal => Ok(r),
        s => Err(Error::Solver(format!("{what} LP ended with status {s:?}"))),
    }
}

impl AcceptancePolyhedron {
    /// Largest uniform margin `t ≤ 1` with `x − Σ p θ̃ − offset ≥ t·1`.
    pub fn margin(&self, x: &Prospect) -> Result<f64> {
        let mut p = LpProblem::new(Sense::Maximize);
        let t = p.add_var(1.0, f64::NEG_INFINITY, 1.0);
        let w = simplex_vars(&mut p, self.generators.len());
        for k in 0..x.len() {
            let mut terms: Vec<(Var, f64)> = self
                .generators
                .iter()
                .zip(&w)
                .map(|(g, &pv)| (pv, g.as_slice()[k]))
                .collect();
            terms.push((t, 1.0));
            p.add_constraint(&terms, Relation::Le, x.as_slice()[k] - self.offset);
        }
        Ok(optimal(&p, "acceptance margin")?.value(t))
    }
}

/// Whether `x` lies in the base acceptance set at level `v`.
pub fn membership(x: &Prospect, v: f64, d: &Decomposition, inst: &ValidInstance) -> Result<bool> {
    d.check(inst, false)?;
    inst.check_prospect(x)?;
    let poly = acceptance_polyhedron(v, d, inst)?;
    Ok(inst.lipschitz() * poly.margin(x)? >= -GUARD)
}

/// Dual of the base interpolation LP at level `j`:
/// `max Σ v_θ p_θ − C q` s.t. `Σ p_θ θ − x ≤ q·1`, `p ∈ simplex`, `q ≥ 0`.
pub fn interpolation_dual_value(x: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<f64> {
    d.check(inst, d.law_invariant)?;
    inst.check_prospect(x)?;
    check_level(j, d)?;
    let mut p = LpProblem::new(Sense::Maximize);
    let q = p.add_nonneg(-inst.lipschitz());
    let w = simplex_vars(&mut p, j);
    for (e, &pv) in d.entries[..j].iter().zip(&w) {
        p.objective[pv.0] = e.value;
    }
    for k in 0..x.len() {
        let mut terms: Vec<(Var, f64)> = d.entries[..j]
            .iter()
            .zip(&w)
            .map(|(e, &pv)| (pv, inst.prospect(e.prospect).as_slice()[k]))
            .collect();
        terms.push((q, -1.0));
        p.add_constraint(&terms, Relation::Le, x.as_slice()[k]);
    }
    Ok(optimal(&p, "interpolation dual")?.objective)
}

/// The dual of the law-invariant interpolation LP at level `j` in the
/// variables `(p, q, ρ)`; `ρ_θ` is a `T×T` matrix with row and column sums
/// `p_θ`. `rhs` supplies the right-hand side `x` per entry: either fixed
/// data or affine in extra decision variables (used by robust optimization).
pub(crate) struct LawDualSystem {
    pub p: Vec<Var>,
    pub q: Var,
}

pub(crate) fn law_dual_system(
    lp: &mut LpProblem,
    d: &Decomposition,
    j: usize,
    inst: &ValidInstance,
    mut rhs: impl FnMut(usize) -> (Vec<(Var, f64)>, f64),
) -> LawDualSystem {
    let t = inst.scenarios();
    let n = inst.attributes();
    let q = lp.add_nonneg(0.0);
    let p = simplex_vars(lp, j);
    let mut rho = Vec::with_capacity(j);
    for &pk in &p {
        let r: Vec<Var> = (0..t * t).map(|_| lp.add_nonneg(0.0)).collect();
        for a in 0..t {
            let mut terms: Vec<(Var, f64)> = (0..t).map(|b| (r[a * t + b], 1.0)).collect();
            terms.push((pk, -1.0));
            lp.add_constraint(&terms, Relation::Eq, 0.0);
        }
        for b in 0..t {
            let mut terms: Vec<(Var, f64)> = (0..t).map(|a| (r[a * t + b], 1.0)).collect();
            terms.push((pk, -1.0));
            lp.add_constraint(&terms, Relation::Eq, 0.0);
        }
        rho.push(r);
    }
    for b in 0..t {
        for m in 0..n {
            let mut terms = Vec::new();
            for (e, r) in d.entries[..j].iter().zip(&rho) {
                let theta = inst.prospect(e.prospect);
                for a in 0..t {
                    let coef = theta.get(a, m);
                    if coef != 0.0 {
                        terms.push((r[a * t + b], coef));
                    }
                }
            }
            terms.push((q, -1.0));
            let (extra, constant) = rhs(b * n + m);
            terms.extend(extra.into_iter().map(|(v, a)| (v, -a)));
            lp.add_constraint(&terms, Relation::Le, constant);
        }
    }
    LawDualSystem { p, q }
}

fn check_level(j: usize, d: &Decomposition) -> Result<()> {
    if j == 0 || j > d.len() {
        return Err(Error::InvalidValue(format!(
            "level index must be in 1..={}, got {j}",
            d.len()
        )));
    }
    Ok(())
}

/// Dual value of the law-invariant interpolation LP at level `j`.
pub fn interpolation_dual_value_law(x: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<f64> {
    d.check(inst, true)?;
    inst.check_prospect(x)?;
    check_level(j, d)?;
    let mut lp = LpProblem::new(Sense::Maximize);
    let sys = law_dual_system(&mut lp, d, j, inst, |k| (Vec::new(), x.as_slice()[k]));
    lp.objective[sys.q.0] = -inst.lipschitz();
    for (e, pk) in d.entries[..j].iter().zip(&sys.p) {
        lp.objective[pk.0] = e.value;
    }
    Ok(optimal(&lp, "law interpolation dual")?.objective)
}

/// Whether `x` lies in the law-invariant acceptance set at level `v`.
pub fn membership_law(x: &Prospect, v: f64, d: &Decomposition, inst: &ValidInstance) -> Result<bool> {
    let j = kappa(v, d)?;
    Ok(interpolation_dual_value_law(x, d, j, inst)? >= v - GUARD)
}

/// `c_j = −min{m : m·1 ≥ Σ p θ̃, p ∈ simplex}` over the first `j` sorted
/// prospects.
pub fn compute_c(j: usize, d: &Decomposition, inst: &ValidInstance) -> Result<f64> {
    d.check(inst, d.law_invariant)?;
    check_level(j, d)?;
    let gens = translated(d, j, inst)?;
    let mut p = LpProblem::new(Sense::Minimize);
    let m = p.add_free(1.0);
    let w = simplex_vars(&mut p, j);
    for k in 0..inst.w0().len() {
        let mut terms: Vec<(Var, f64)> = gens.iter().zip(&w).map(|(g, &pv)| (pv, -g.as_slice()[k])).collect();
        terms.push((m, 1.0));
        p.add_constraint(&terms, Relation::Ge, 0.0);
    }
    Ok(-optimal(&p, "aspiration constant")?.objective)
}

/// The constants `c_j` for every level, with the risk measures `μ_j` and
/// target function `τ` they define.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AspirationalDecomposition {
    pub c: Vec<f64>,
    pub lipschitz: f64,
    values: Vec<f64>,
    generators: Vec<Prospect>,
}

/// One row of the aspiration table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AspirationRow {
    pub level: f64,
    pub kappa: usize,
    pub c: f64,
    pub tau: f64,
}

impl AspirationalDecomposition {
    pub fn new(d: &Decomposition, inst: &ValidInstance) -> Result<Self> {
        d.check(inst, d.law_invariant)?;
        let c = (1..=d.len()).map(|j| compute_c(j, d, inst)).collect::<Result<_>>()?;
        Ok(AspirationalDecomposition {
            c,
            lipschitz: inst.lipschitz(),
            values: d.values(),
            generators: translated(d, d.len(), inst)?,
        })
    }

    fn kappa(&self, v: f64) -> Result<usize> {
        if v.is_nan() || v > 0.0 {
            return Err(Error::InvalidValue(format!("level must be ≤ 0, got {v}")));
        }
        Ok(self.values.iter().filter(|&&w| w >= v - GUARD).count())
    }

    /// `μ_j(x) = min{m : x + m·1 ≥ Σ p θ̃ + c_j·1, p ∈ simplex}`.
    pub fn mu(&self, j: usize, x: &Prospect) -> Result<f64> {
        if j == 0 || j > self.c.len() {
            return Err(Error::InvalidValue(format!(
                "level index must be in 1..={}, got {j}",
                self.c.len()
            )));
        }
        self.generators[0].check_shape(x, "prospect vs instance")?;
        let mut p = LpProblem::new(Sense::Minimize);
        let m = p.add_free(1.0);
        let w = simplex_vars(&mut p, j);
        for k in 0..x.len() {
            let mut terms: Vec<(Var, f64)> = self.generators[..j]
                .iter()
                .zip(&w)
                .map(|(g, &pv)| (pv, -g.as_slice()[k]))
                .collect();
            terms.push((m, 1.0));
            p.add_constraint(&terms, Relation::Ge, self.c[j - 1] - x.as_slice()[k]);
        }
        Ok(optimal(&p, "aspiration risk measure")?.objective)
    }

    /// `τ(v) = v/C − c_{κ(v)}`.
    pub fn tau(&self, v: f64) -> Result<f64> {
        let j = self.kappa(v)?;
        Ok(v / self.lipschitz - self.c[j - 1])
    }

    pub fn row(&self, v: f64) -> Result<AspirationRow> {
        let kappa = self.kappa(v)?;
        Ok(AspirationRow {
            level: v,
            kappa,
            c: self.c[kappa - 1],
            tau: self.tau(v)?,
        })
    }

    /// Largest level in `grid` with `μ_{κ(v)}(x − τ(v)·1) ≤ 0`.
    pub fn eval(&self, x: &Prospect, grid: &[f64]) -> Result<f64> {
        if grid.is_empty() {
            return Err(Error::InvalidValue("level grid is empty".into()));
        }
        let mut levels = grid.to_vec();
        levels.sort_by(|a, b| b.total_cmp(a));
        for v in levels {
            let j = self.kappa(v)?;
            let shifted = x.shifted(-self.tau(v)?);
            if self.mu(j, &shifted)? <= GUARD {
                return Ok(v);
            }
        }
        Err(Error::InvalidValue(
            "no grid level is acceptable; the grid must reach −C·‖x − W₀‖∞".into(),
        ))
    }
}

/// Levels `0, −step, −2·step, …` down to at most `−C·‖x − W₀‖∞`.
pub fn aspiration_grid(x: &Prospect, inst: &ValidInstance, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidValue(format!("grid step must be positive, got {step}")));
    }
    let low = inst.lipschitz() * inf_norm_distance(x, inst.w0())?;
    let count = (low / step).ceil() as usize;
    Ok((0..=count).map(|k| 0.0 - k as f64 * step).collect())
}

/// Robust choice function at `x` through the aspirational representation,
/// resolved on `grid`.
pub fn eval_rcf_via_aspiration(x: &Prospect, d: &Decomposition, inst: &ValidInstance, grid: &[f64]) -> Result<f64> {
    inst.check_prospect(x)?;
    AspirationalDecomposition::new(d, inst)?.eval(x, grid)
}

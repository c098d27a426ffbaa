//! The value problem: values of the robust choice function on the prospect
//! set, computed by sorting, plus exhaustive oracles used for verification.

use std::collections::HashSet;
use std::path::Path;

use prefrobust_lp::{solve_lp, LpProblem, LpStatus, Relation, Sense, Var};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::ValidInstance;
use crate::kinked::{self, Support};
use crate::prospect::{permute, Permutation, Prospect};

pub use crate::kinked::AssignmentDual;

/// Guard band for level comparisons.
pub const GUARD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    /// Node index into the instance's prospect set.
    pub prospect: usize,
    pub value: f64,
}

/// The prospect set ordered by non-increasing value. Levels are 1-based:
/// level `j` is the `j`-th entry, and the prefix of the first `j` entries is
/// the support used at that level. A sentinel level `J + 1` with value −∞
/// is implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub law_invariant: bool,
    pub lipschitz: f64,
    pub scenarios: usize,
    pub attributes: usize,
    pub theta_size: usize,
    pub lp_calls: usize,
    pub entries: Vec<DecompositionEntry>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at level `j` (1-based); `None` for the sentinel level `J + 1`.
    pub fn value(&self, j: usize) -> Option<f64> {
        j.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|e| e.value)
    }

    /// Node sorted at level `j` (1-based).
    pub fn node(&self, j: usize) -> usize {
        self.entries[j - 1].prospect
    }

    /// Values in sorted order.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Values indexed by node.
    pub fn values_by_node(&self) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.entries.len()];
        for e in &self.entries {
            out[e.prospect] = e.value;
        }
        out
    }

    /// The first `j` sorted prospects with their values.
    pub(crate) fn support<'a>(&self, inst: &'a ValidInstance, j: usize) -> Vec<Support<'a>> {
        self.entries[..j]
            .iter()
            .map(|e| (inst.prospect(e.prospect), e.value))
            .collect()
    }

    /// Rejects a decomposition computed for a different instance or for the
    /// other (base vs law-invariant) pipeline.
    pub fn check(&self, inst: &ValidInstance, law: bool) -> Result<()> {
        let mismatch = |m: String| Err(Error::Mismatch(m));
        if self.law_invariant != law {
            let kind = |l: bool| if l { "law-invariant" } else { "base" };
            return mismatch(format!(
                "decomposition is {} but a {} one is required",
                kind(self.law_invariant),
                kind(law)
            ));
        }
        if self.theta_size != inst.size() || self.entries.len() != inst.size() {
            return mismatch(format!(
                "decomposition has {} prospects, instance has {}",
                self.entries.len(),
                inst.size()
            ));
        }
        if self.scenarios != inst.scenarios() || self.attributes != inst.attributes() {
            return mismatch(format!(
                "decomposition is for {}x{} prospects, instance uses {}x{}",
                self.scenarios,
                self.attributes,
                inst.scenarios(),
                inst.attributes()
            ));
        }
        if self.lipschitz != inst.lipschitz() {
            return mismatch(format!(
                "decomposition uses Lipschitz modulus {}, instance uses {}",
                self.lipschitz,
                inst.lipschitz()
            ));
        }
        let mut seen = vec![false; inst.size()];
        for e in &self.entries {
            if e.prospect >= inst.size() || std::mem::replace(&mut seen[e.prospect], true) {
                return mismatch(format!("entry for prospect {} is invalid or repeated", e.prospect));
            }
            if !e.value.is_finite() {
                return mismatch(format!("prospect {} has a non-finite value", e.prospect));
            }
        }
        if self.entries[0].prospect != 0 || self.entries[0].value != 0.0 {
            return mismatch("the first entry must be the normalizing prospect with value 0".into());
        }
        if self.entries.windows(2).any(|w| w[1].value > w[0].value) {
            return mismatch("values must be non-increasing".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("decomposition JSON: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// `v + max{⟨s, · − anchor⟩, 0}`, an upper support of a quasi-concave
/// function at `anchor`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KinkedMajorant {
    pub anchor: Prospect,
    pub value: f64,
    pub subgradient: Vec<f64>,
}

impl KinkedMajorant {
    /// The majorant evaluated at `x`.
    pub fn eval(&self, x: &Prospect) -> f64 {
        let d: f64 = x
            .as_slice()
            .iter()
            .zip(self.anchor.as_slice())
            .zip(&self.subgradient)
            .map(|((a, b), s)| s * (a - b))
            .sum();
        self.value + d.max(0.0)
    }
}

/// Law-invariant kinked majorant with the reduced LP's auxiliary variables,
/// one [`AssignmentDual`] per support prospect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawKinkedMajorant {
    pub majorant: KinkedMajorant,
    pub duals: Vec<AssignmentDual>,
}

fn check_prefix(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance, law: bool) -> Result<()> {
    d.check(inst, law)?;
    inst.check_prospect(theta)?;
    if j == 0 || j > d.len() {
        return Err(Error::Precondition(format!(
            "prefix length must be in 1..={}, got {j}",
            d.len()
        )));
    }
    if d.entries[..j].iter().any(|e| inst.prospect(e.prospect) == theta) {
        return Err(Error::Precondition(
            "the prospect already belongs to the sorted prefix".into(),
        ));
    }
    Ok(())
}

/// Pin values for anchor `theta`: values of already-sorted prospects it was
/// elicited to be preferred to.
fn pins_for(inst: &ValidInstance, theta: Option<usize>, sorted: &[Option<f64>]) -> Vec<f64> {
    let Some(k) = theta else { return Vec::new() };
    inst.edges()
        .iter()
        .filter(|&&(w, _)| w == k)
        .filter_map(|&(_, y)| sorted[y])
        .collect()
}

fn prefix_pins(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Vec<f64> {
    let mut sorted = vec![None; inst.size()];
    for e in &d.entries[..j] {
        sorted[e.prospect] = Some(e.value);
    }
    pins_for(inst, inst.node_of(theta), &sorted)
}

fn infeasible_pins() -> Error {
    Error::Infeasible("the elicitation pins contradict the sorted prefix".into())
}

/// The kinked-majorant LP at `theta` against the first `j` sorted prospects,
/// with elicitation pins.
pub fn plp_problem(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<LpProblem> {
    check_prefix(theta, d, j, inst, d.law_invariant)?;
    let pins = prefix_pins(theta, d, j, inst);
    let support = d.support(inst, j);
    Ok(kinked::base_problem(theta, &support, &pins, inst.lipschitz()).0)
}

/// Solves the pinned kinked-majorant LP of the base value problem.
pub fn solve_plp(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<KinkedMajorant> {
    check_prefix(theta, d, j, inst, false)?;
    let pins = prefix_pins(theta, d, j, inst);
    let m = kinked::solve_base(theta, &d.support(inst, j), &pins, inst.lipschitz())?
        .ok_or_else(infeasible_pins)?;
    Ok(KinkedMajorant {
        anchor: theta.clone(),
        value: m.value,
        subgradient: m.s,
    })
}

/// `min{last sorted value, LP value}`; an infeasible pinned LP is treated as
/// an LP value of +∞.
pub fn predictor(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<f64> {
    let last = d.value(j).unwrap_or(0.0);
    match solve_plp(theta, d, j, inst) {
        Ok(m) => Ok(m.value.min(last)),
        Err(Error::Infeasible(_)) => Ok(last),
        Err(e) => Err(e),
    }
}

/// The literal reduced law-invariant LP, for inspection and dumps.
pub fn plp_law_problem(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<LpProblem> {
    check_prefix(theta, d, j, inst, true)?;
    let pins = prefix_pins(theta, d, j, inst);
    let support = d.support(inst, j);
    Ok(kinked::law_reduced_problem(theta, &support, &pins, inst.lipschitz()).0)
}

/// Solves the pinned law-invariant LP.
pub fn solve_plp_law(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<LawKinkedMajorant> {
    check_prefix(theta, d, j, inst, true)?;
    let pins = prefix_pins(theta, d, j, inst);
    let m = kinked::solve_law(theta, &d.support(inst, j), &pins, inst.lipschitz())?
        .ok_or_else(infeasible_pins)?;
    Ok(LawKinkedMajorant {
        majorant: KinkedMajorant {
            anchor: theta.clone(),
            value: m.value,
            subgradient: m.s,
        },
        duals: m.duals,
    })
}

/// Solves the reduced law-invariant LP directly instead of by cutting planes.
pub fn solve_plp_law_reduced(theta: &Prospect, d: &Decomposition, j: usize, inst: &ValidInstance) -> Result<KinkedMajorant> {
    check_prefix(theta, d, j, inst, true)?;
    let pins = prefix_pins(theta, d, j, inst);
    let m = kinked::solve_law_reduced(theta, &d.support(inst, j), &pins, inst.lipschitz())?
        .ok_or_else(infeasible_pins)?;
    Ok(KinkedMajorant {
        anchor: theta.clone(),
        value: m.value,
        subgradient: m.s,
    })
}

fn sort(inst: &ValidInstance, law: bool) -> Result<Decomposition> {
    let jn = inst.size();
    let c = inst.lipschitz();
    let mut order = vec![(0usize, 0.0f64)];
    let mut sorted: Vec<Option<f64>> = vec![None; jn];
    sorted[0] = Some(0.0);
    let mut lp_calls = 0;
    while order.len() < jn {
        let last = order.last().expect("nonempty").1;
        let support: Vec<Support> = order.iter().map(|&(k, v)| (inst.prospect(k), v)).collect();
        let mut best: Option<(usize, f64)> = None;
        for cand in (0..jn).filter(|&k| sorted[k].is_none()) {
            let pins = pins_for(inst, Some(cand), &sorted);
            let theta = inst.prospect(cand);
            lp_calls += 1;
            let val = if law {
                kinked::solve_law(theta, &support, &pins, c)?.map(|m| m.value)
            } else {
                kinked::solve_base(theta, &support, &pins, c)?.map(|m| m.value)
            };
            let pred = val.map_or(last, |v| v.min(last));
            if pred >= last - GUARD {
                // Ties the last sorted value: no other candidate can do better.
                best = Some((cand, last));
                break;
            }
            if best.map_or(true, |(_, b)| pred > b) {
                best = Some((cand, pred));
            }
        }
        let (k, v) = best.expect("an unsorted candidate remains");
        sorted[k] = Some(v);
        order.push((k, v));
    }
    Ok(Decomposition {
        law_invariant: law,
        lipschitz: c,
        scenarios: inst.scenarios(),
        attributes: inst.attributes(),
        theta_size: jn,
        lp_calls,
        entries: order
            .into_iter()
            .map(|(prospect, value)| DecompositionEntry { prospect, value })
            .collect(),
    })
}

/// Sorts the prospect set by robust value (base ambiguity set).
pub fn sort_value_problem(inst: &ValidInstance) -> Result<Decomposition> {
    if inst.law_invariant() {
        return Err(Error::Precondition(
            "instance is law invariant; use the law-invariant sort".into(),
        ));
    }
    sort(inst, false)
}

/// Sorts the prospect set by robust value (law-invariant ambiguity set).
pub fn sort_value_problem_law(inst: &ValidInstance) -> Result<Decomposition> {
    if !inst.law_invariant() {
        return Err(Error::Precondition(
            "instance is not law invariant; use the base sort".into(),
        ));
    }
    sort(inst, true)
}

/// Dispatches on the instance's law-invariance flag.
pub fn solve_value_problem(inst: &ValidInstance) -> Result<Decomposition> {
    sort(inst, inst.law_invariant())
}

/// Largest prospect set the oracles accept.
pub const ORACLE_MAX_THETA: usize = 8;
/// Largest scenario count the law-invariant oracle accepts.
pub const ORACLE_MAX_SCENARIOS: usize = 5;

/// Exact values of the base value problem by enumerating weak orders.
pub fn oracle_value_problem(inst: &ValidInstance) -> Result<Vec<f64>> {
    oracle(inst, false)
}

/// Exact values of the law-invariant value problem; every support row is
/// expanded over all scenario permutations.
pub fn oracle_value_problem_law(inst: &ValidInstance) -> Result<Vec<f64>> {
    if inst.scenarios() > ORACLE_MAX_SCENARIOS {
        return Err(Error::TooLarge(format!(
            "{} scenarios exceeds the limit of {ORACLE_MAX_SCENARIOS}",
            inst.scenarios()
        )));
    }
    oracle(inst, true)
}

/// Distinct scenario permutations of `x`.
fn orbit(x: &Prospect) -> Vec<Prospect> {
    let mut seen = HashSet::new();
    Permutation::all(x.scenarios())
        .map(|s| permute(x, &s).expect("matching length"))
        .filter(|p| seen.insert(p.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
        .collect()
}

fn oracle(inst: &ValidInstance, law: bool) -> Result<Vec<f64>> {
    let jn = inst.size();
    if jn > ORACLE_MAX_THETA {
        return Err(Error::TooLarge(format!(
            "{jn} prospects exceeds the limit of {ORACLE_MAX_THETA}"
        )));
    }
    let images: Vec<Vec<Prospect>> = inst
        .theta()
        .iter()
        .map(|th| if law { orbit(th) } else { vec![th.clone()] })
        .collect();
    let mut search = OracleSearch {
        inst,
        images,
        best: None,
    };
    let all = (1u32 << jn) - 1;
    search.tiers(all, &mut Vec::new())?;
    let (_, values) = search
        .best
        .ok_or_else(|| Error::Solver("no ordering of the prospect set is feasible".into()))?;
    Ok(values)
}

struct OracleSearch<'a> {
    inst: &'a ValidInstance,
    images: Vec<Vec<Prospect>>,
    best: Option<(f64, Vec<f64>)>,
}

impl OracleSearch<'_> {
    /// Enumerates ordered partitions of `remaining` into tiers (equal-value
    /// classes, best first). The normalizing prospect opens the first tier,
    /// and a dominated prospect may not precede its preferred partner.
    fn tiers(&mut self, remaining: u32, tiers: &mut Vec<u32>) -> Result<()> {
        if remaining == 0 {
            return self.solve(tiers);
        }
        let mut sub = remaining;
        while sub != 0 {
            let ok_first = !tiers.is_empty() || sub & 1 == 1;
            let rest = remaining & !sub;
            let ok_edges = self
                .inst
                .edges()
                .iter()
                .all(|&(w, y)| !(sub >> y & 1 == 1 && rest >> w & 1 == 1));
            if ok_first && ok_edges {
                tiers.push(sub);
                self.tiers(rest, tiers)?;
                tiers.pop();
            }
            sub = (sub - 1) & remaining;
        }
        Ok(())
    }

    fn solve(&mut self, tiers: &[u32]) -> Result<()> {
        let inst = self.inst;
        let jn = inst.size();
        let c = inst.lipschitz();
        let members = |m: u32| (0..jn).filter(move |&k| m >> k & 1 == 1);
        let mut p = LpProblem::new(Sense::Minimize);
        let v: Vec<Var> = (0..jn).map(|_| p.add_free(1.0)).collect();
        let s: Vec<Vec<Var>> = (0..jn)
            .map(|_| (0..inst.w0().len()).map(|_| p.add_nonneg(0.0)).collect())
            .collect();
        p.add_constraint(&[(v[0], 1.0)], Relation::Eq, 0.0);
        let mut prev: Option<usize> = None;
        for (i, &tier) in tiers.iter().enumerate() {
            let head = members(tier).next().expect("tiers are nonempty");
            for m in members(tier).skip(1) {
                p.add_constraint(&[(v[m], 1.0), (v[head], -1.0)], Relation::Eq, 0.0);
            }
            if let Some(ph) = prev {
                p.add_constraint(&[(v[ph], 1.0), (v[head], -1.0)], Relation::Ge, 0.0);
            }
            prev = Some(head);
            for k in members(tier) {
                if i == 0 {
                    continue;
                }
                let terms: Vec<(Var, f64)> = s[k].iter().map(|&x| (x, 1.0)).collect();
                p.add_constraint(&terms, Relation::Le, c);
                let theta = inst.prospect(k).as_slice();
                for &higher in &tiers[..i] {
                    for h in members(higher) {
                        for img in &self.images[h] {
                            let mut terms = vec![(v[k], 1.0), (v[h], -1.0)];
                            for (idx, (&a, &b)) in img.as_slice().iter().zip(theta).enumerate() {
                                if a != b {
                                    terms.push((s[k][idx], a - b));
                                }
                            }
                            p.add_constraint(&terms, Relation::Ge, 0.0);
                        }
                    }
                }
            }
        }
        for &(w, y) in inst.edges() {
            p.add_constraint(&[(v[w], 1.0), (v[y], -1.0)], Relation::Ge, 0.0);
        }
        let r = solve_lp(&p)?;
        match r.status {
            LpStatus::Optimal => {
                if self.best.as_ref().map_or(true, |(b, _)| r.objective < *b) {
                    self.best = Some((r.objective, v.iter().map(|&x| r.value(x)).collect()));
                }
                Ok(())
            }
            LpStatus::Infeasible => Ok(()),
            LpStatus::Unbounded => Err(Error::Solver("oracle LP reported unbounded".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{EcdsPair, Instance};

    fn fixture_a() -> ValidInstance {
        let s = Prospect::scalar;
        Instance::new(
            s(5.0),
            vec![EcdsPair {
                preferred: s(3.0),
                dominated: s(1.0),
            }],
            1.0,
            false,
        )
        .validate()
        .unwrap()
    }

    fn fixture_b() -> ValidInstance {
        let col = |a: f64, b: f64| Prospect::column(&[a, b]).unwrap();
        Instance::new(
            col(5.0, 5.0),
            vec![EcdsPair {
                preferred: col(3.0, 4.0),
                dominated: col(1.0, 3.0),
            }],
            1.0,
            true,
        )
        .validate()
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn fixture_a_sort_and_oracle() {
        let inst = fixture_a();
        let d = sort_value_problem(&inst).unwrap();
        assert!(close(&d.values(), &[0.0, -2.0, -4.0]));
        assert!(close(&oracle_value_problem(&inst).unwrap(), &[0.0, -2.0, -4.0]));
        assert!(d.lp_calls <= 6);
    }

    #[test]
    fn fixture_a_plp_and_predictor() {
        let inst = fixture_a();
        let d = sort_value_problem(&inst).unwrap();
        let s = Prospect::scalar;
        assert!((solve_plp(&s(3.0), &d, 1, &inst).unwrap().value + 2.0).abs() < 1e-9);
        assert!((solve_plp(&s(1.0), &d, 2, &inst).unwrap().value + 4.0).abs() < 1e-9);
        assert!((predictor(&s(3.0), &d, 1, &inst).unwrap() + 2.0).abs() < 1e-9);
        assert!((predictor(&s(1.0), &d, 1, &inst).unwrap() + 4.0).abs() < 1e-9);
        assert!(matches!(
            solve_plp(&s(5.0), &d, 1, &inst),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fixture_b_law_sort_and_oracle() {
        let inst = fixture_b();
        let d = sort_value_problem_law(&inst).unwrap();
        assert!(close(&d.values(), &[0.0, -2.0, -4.0]));
        assert!(close(&oracle_value_problem_law(&inst).unwrap(), &[0.0, -2.0, -4.0]));
        let w1 = inst.prospect(1).clone();
        let y1 = inst.prospect(2).clone();
        assert!((solve_plp_law(&w1, &d, 1, &inst).unwrap().majorant.value + 2.0).abs() < 1e-9);
        assert!((solve_plp_law(&y1, &d, 2, &inst).unwrap().majorant.value + 4.0).abs() < 1e-9);
        assert!((solve_plp_law_reduced(&y1, &d, 2, &inst).unwrap().value + 4.0).abs() < 1e-9);
    }

    #[test]
    fn single_scenario_law_matches_base() {
        let base = fixture_a();
        let law = base.with_law_invariance(true);
        let d = sort_value_problem(&base).unwrap();
        let dl = sort_value_problem_law(&law).unwrap();
        assert_eq!(d.values(), dl.values());
        let e = d.support(&base, 1);
        let m = kinked::solve_law(&Prospect::scalar(3.0), &e, &[], 1.0).unwrap().unwrap();
        assert!((m.value + 2.0).abs() < 1e-9);
    }

    #[test]
    fn trivial_instance() {
        let inst = Instance::new(Prospect::scalar(1.0), vec![], 1.0, false)
            .validate()
            .unwrap();
        let d = sort_value_problem(&inst).unwrap();
        assert_eq!(d.values(), vec![0.0]);
        assert_eq!(d.lp_calls, 0);
        assert_eq!(oracle_value_problem(&inst).unwrap(), vec![0.0]);
    }

    #[test]
    fn json_round_trip_and_checks() {
        let inst = fixture_a();
        let d = sort_value_problem(&inst).unwrap();
        let back = Decomposition::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(d.check(&inst, true).is_err());
        assert!(d.check(&inst.with_lipschitz(2.0).unwrap(), false).is_err());
    }
}

//! Elicitation data and instance validation.

use crate::error::{Error, Result};
use crate::prospect::Prospect;

/// One elicited comparison: `preferred` is weakly preferred to `dominated`.
#[derive(Clone, Debug, PartialEq)]
pub struct EcdsPair {
    pub preferred: Prospect,
    pub dominated: Prospect,
}

/// Raw instance as supplied by the user.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    /// Normalizing prospect; the choice function is pinned to zero here.
    pub w0: Prospect,
    pub pairs: Vec<EcdsPair>,
    /// Lipschitz modulus C > 0.
    pub lipschitz: f64,
    pub law_invariant: bool,
}

/// A validated instance with its deduplicated prospect set.
///
/// Node 0 is the normalizing prospect. Remaining nodes follow the order of
/// first appearance in the pair list (preferred before dominated).
#[derive(Clone, Debug, PartialEq)]
pub struct ValidInstance {
    instance: Instance,
    theta: Vec<Prospect>,
    /// Deduplicated (preferred node, dominated node) edges, self-loops removed.
    edges: Vec<(usize, usize)>,
    /// Node pair for each input pair, in input order.
    pair_nodes: Vec<(usize, usize)>,
}

impl Instance {
    pub fn new(w0: Prospect, pairs: Vec<EcdsPair>, lipschitz: f64, law_invariant: bool) -> Self {
        Instance {
            w0,
            pairs,
            lipschitz,
            law_invariant,
        }
    }

    pub fn validate(&self) -> Result<ValidInstance> {
        validate_instance(self)
    }
}

fn check_dominance(w0: &Prospect, x: &Prospect, what: impl FnOnce() -> String) -> Result<()> {
    for t in 0..x.scenarios() {
        for n in 0..x.attributes() {
            if x.get(t, n) > w0.get(t, n) {
                return Err(Error::Dominance {
                    what: what(),
                    t,
                    n,
                    entry: x.get(t, n),
                    w0: w0.get(t, n),
                });
            }
        }
    }
    Ok(())
}

/// Checks dimensions, the Lipschitz modulus and normalizing-prospect
/// dominance, and merges bit-identical prospects into single nodes.
pub fn validate_instance(inst: &Instance) -> Result<ValidInstance> {
    let c = inst.lipschitz;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Lipschitz(c));
    }
    let mut theta = vec![inst.w0.clone()];
    let node = |p: &Prospect, theta: &mut Vec<Prospect>| -> usize {
        match theta.iter().position(|q| q == p) {
            Some(i) => i,
            None => {
                theta.push(p.clone());
                theta.len() - 1
            }
        }
    };
    let mut edges = Vec::new();
    let mut pair_nodes = Vec::with_capacity(inst.pairs.len());
    for (k, pair) in inst.pairs.iter().enumerate() {
        for (p, role) in [(&pair.preferred, "preferred"), (&pair.dominated, "dominated")] {
            inst.w0
                .check_shape(p, &format!("pair {k} {role} prospect vs normalizing prospect"))?;
            check_dominance(&inst.w0, p, || format!("the {role} prospect of pair {k}"))?;
        }
        let w = node(&pair.preferred, &mut theta);
        let y = node(&pair.dominated, &mut theta);
        pair_nodes.push((w, y));
        if w != y && !edges.contains(&(w, y)) {
            edges.push((w, y));
        }
    }
    Ok(ValidInstance {
        instance: inst.clone(),
        theta,
        edges,
        pair_nodes,
    })
}

impl ValidInstance {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// The deduplicated prospect set; index 0 is the normalizing prospect.
    pub fn theta(&self) -> &[Prospect] {
        &self.theta
    }

    pub fn prospect(&self, node: usize) -> &Prospect {
        &self.theta[node]
    }

    /// Number of distinct prospects J.
    pub fn size(&self) -> usize {
        self.theta.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn pair_nodes(&self) -> &[(usize, usize)] {
        &self.pair_nodes
    }

    pub fn lipschitz(&self) -> f64 {
        self.instance.lipschitz
    }

    pub fn law_invariant(&self) -> bool {
        self.instance.law_invariant
    }

    pub fn scenarios(&self) -> usize {
        self.instance.w0.scenarios()
    }

    pub fn attributes(&self) -> usize {
        self.instance.w0.attributes()
    }

    pub fn w0(&self) -> &Prospect {
        &self.instance.w0
    }

    /// Node holding exactly this prospect, if any.
    pub fn node_of(&self, p: &Prospect) -> Option<usize> {
        self.theta.iter().position(|q| q == p)
    }

    /// Same instance with a different Lipschitz modulus.
    pub fn with_lipschitz(&self, c: f64) -> Result<ValidInstance> {
        let mut inst = self.instance.clone();
        inst.lipschitz = c;
        validate_instance(&inst)
    }

    /// Same instance with the law-invariance flag set to `law`.
    pub fn with_law_invariance(&self, law: bool) -> ValidInstance {
        let mut v = self.clone();
        v.instance.law_invariant = law;
        v
    }

    pub(crate) fn check_prospect(&self, x: &Prospect) -> Result<()> {
        self.w0().check_shape(x, "prospect vs instance")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> Prospect {
        Prospect::scalar(x)
    }

    fn fixture_a() -> Instance {
        Instance::new(
            s(5.0),
            vec![EcdsPair {
                preferred: s(3.0),
                dominated: s(1.0),
            }],
            1.0,
            false,
        )
    }

    #[test]
    fn accepts_fixture_a() {
        let v = validate_instance(&fixture_a()).unwrap();
        assert_eq!(v.size(), 3);
        assert_eq!(v.edges(), &[(1, 2)]);
    }

    #[test]
    fn rejects_bad_modulus_and_dominance() {
        let mut inst = fixture_a();
        inst.lipschitz = 0.0;
        assert!(matches!(validate_instance(&inst), Err(Error::Lipschitz(_))));
        let mut inst = fixture_a();
        inst.pairs[0].dominated = s(6.0);
        assert!(matches!(
            validate_instance(&inst),
            Err(Error::Dominance { .. })
        ));
        let mut inst = fixture_a();
        inst.pairs[0].dominated = Prospect::column(&[1.0, 1.0]).unwrap();
        assert!(matches!(validate_instance(&inst), Err(Error::Dimension(_))));
    }

    #[test]
    fn merges_exact_duplicates() {
        let mut inst = fixture_a();
        inst.pairs.push(EcdsPair {
            preferred: s(1.0),
            dominated: s(5.0),
        });
        inst.pairs.push(EcdsPair {
            preferred: s(3.0),
            dominated: s(1.0),
        });
        inst.pairs.push(EcdsPair {
            preferred: s(2.0),
            dominated: s(2.0),
        });
        let v = validate_instance(&inst).unwrap();
        assert_eq!(v.size(), 4);
        assert_eq!(v.edges(), &[(1, 2), (2, 0)]);
        assert_eq!(v.pair_nodes(), &[(1, 2), (2, 0), (1, 2), (3, 3)]);
    }

    #[test]
    fn validation_is_idempotent() {
        let v = validate_instance(&fixture_a()).unwrap();
        assert_eq!(validate_instance(v.instance()).unwrap(), v);
    }
}

//! The canonical transmission graphs and their perturbed neighbours.
//!
//! The family is indexed by `g`: `T0` (next hop), `T1` (all direct) and
//! `T{k+1}` for `k >= 1`, where sensors `1..=k` relay through the farthest
//! sensor `N` and everyone else transmits directly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{FlowMatrix, NetworkInstance};
use crate::routing::RoutingTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransmissionGraph {
    /// `T0`: every sensor sends to its nearest neighbour towards the collector.
    NextHop,
    /// `T1`: every sensor sends straight to the collector.
    Direct,
    /// `T{k+1}`: sensors `1..=k` relay through sensor `N`.
    Split(usize),
    /// `T0+`: next hop, except sensor `N` skips to `N-2`.
    NextHopPerturbed,
    /// `T1+`: direct, except sensor `N` relays through sensor `N'+1`.
    DirectPerturbed,
}

impl TransmissionGraph {
    /// Family member `T^(g)`.
    pub fn from_family_index(g: usize) -> Self {
        match g {
            0 => TransmissionGraph::NextHop,
            1 => TransmissionGraph::Direct,
            g => TransmissionGraph::Split(g - 1),
        }
    }

    /// Index `g` of `T^(g)`, or `None` for the perturbed graphs.
    pub fn family_index(&self) -> Option<usize> {
        match self {
            TransmissionGraph::NextHop => Some(0),
            TransmissionGraph::Direct => Some(1),
            TransmissionGraph::Split(k) => Some(k + 1),
            _ => None,
        }
    }

    /// Next-hop assignment of this graph on `inst`.
    pub fn routing_tree(&self, inst: &NetworkInstance) -> Result<RoutingTree> {
        let n = inst.len();
        let mut next: Vec<usize> = match self {
            TransmissionGraph::NextHop | TransmissionGraph::NextHopPerturbed => {
                (0..=n).map(|i| i.saturating_sub(1)).collect()
            }
            _ => vec![0; n + 1],
        };
        match *self {
            TransmissionGraph::NextHop | TransmissionGraph::Direct => {}
            TransmissionGraph::Split(k) => {
                let max = n_prime(inst);
                if k == 0 || k > max {
                    return Err(Error::IndexOutOfRange {
                        index: k,
                        min: 1,
                        max,
                    });
                }
                for slot in next.iter_mut().take(k + 1).skip(1) {
                    *slot = n;
                }
            }
            TransmissionGraph::NextHopPerturbed => {
                if n < 2 {
                    return Err(Error::IndexOutOfRange {
                        index: n,
                        min: 2,
                        max: usize::MAX,
                    });
                }
                next[n] = n - 2;
            }
            TransmissionGraph::DirectPerturbed => {
                let relay = n_prime(inst) + 1;
                if relay >= n {
                    return Err(Error::IndexOutOfRange {
                        index: n,
                        min: 2,
                        max: usize::MAX,
                    });
                }
                next[n] = relay;
            }
        }
        Ok(RoutingTree::from_raw(next))
    }
}

impl fmt::Display for TransmissionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransmissionGraph::NextHop => f.write_str("T0"),
            TransmissionGraph::Direct => f.write_str("T1"),
            TransmissionGraph::Split(k) => write!(f, "T{}({})", k + 1, k),
            TransmissionGraph::NextHopPerturbed => f.write_str("T0+"),
            TransmissionGraph::DirectPerturbed => f.write_str("T1+"),
        }
    }
}

impl FromStr for TransmissionGraph {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "T0" => return Ok(TransmissionGraph::NextHop),
            "T1" => return Ok(TransmissionGraph::Direct),
            "T0+" => return Ok(TransmissionGraph::NextHopPerturbed),
            "T1+" => return Ok(TransmissionGraph::DirectPerturbed),
            _ => {}
        }
        let bad = || format!("unknown graph kind {s:?}");
        let rest = s.strip_prefix('T').ok_or_else(bad)?;
        let (head, tail) = rest.split_once('(').ok_or_else(bad)?;
        let k: usize = tail.strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let g: usize = head.parse().map_err(|_| bad())?;
        if k == 0 || g != k + 1 {
            return Err(bad());
        }
        Ok(TransmissionGraph::Split(k))
    }
}

/// Number of sensors strictly inside `(0, x_N / 2)`.
pub fn n_prime(inst: &NetworkInstance) -> usize {
    let n = inst.len();
    if inst.is_regular() {
        let closed = if n.is_multiple_of(2) { (n.saturating_sub(2)) / 2 } else { (n - 1) / 2 };
        debug_assert_eq!(closed, count_first_half(inst));
        closed
    } else {
        count_first_half(inst)
    }
}

fn count_first_half(inst: &NetworkInstance) -> usize {
    let half = inst.position(inst.len()) / 2.0;
    inst.positions().iter().take_while(|&&x| x < half).count()
}

/// Flow matrix carried by `g` on `inst`.
pub fn realize(inst: &NetworkInstance, g: TransmissionGraph) -> Result<FlowMatrix> {
    g.routing_tree(inst)?.induced_flow(inst)
}

/// `[T0, T1, T2(1), ..., T{N'+1}(N')]`.
pub fn enumerate_canonical(inst: &NetworkInstance) -> Vec<TransmissionGraph> {
    (0..n_prime(inst) + 2)
        .map(TransmissionGraph::from_family_index)
        .collect()
}

/// Canonical family plus whichever perturbed graphs exist on `inst`.
pub fn enumerate_extended(inst: &NetworkInstance) -> Vec<TransmissionGraph> {
    let mut graphs = enumerate_canonical(inst);
    for g in [TransmissionGraph::NextHopPerturbed, TransmissionGraph::DirectPerturbed] {
        if g.routing_tree(inst).is_ok() {
            graphs.push(g);
        }
    }
    graphs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasible;

    #[test]
    fn n_prime_examples() {
        assert_eq!(n_prime(&NetworkInstance::regular(4, 1.0).unwrap()), 1);
        assert_eq!(n_prime(&NetworkInstance::regular(5, 1.0).unwrap()), 2);
        assert_eq!(n_prime(&NetworkInstance::regular(1, 1.0).unwrap()), 0);
        assert_eq!(n_prime(&NetworkInstance::regular(2, 1.0).unwrap()), 0);
        let inst = NetworkInstance::new(vec![1.0, 2.0, 10.0], vec![1.0; 3]).unwrap();
        assert_eq!(n_prime(&inst), 2);
        // a sensor exactly at x_N / 2 belongs to the second half
        let inst = NetworkInstance::new(vec![1.0, 2.5, 5.0], vec![1.0; 3]).unwrap();
        assert_eq!(n_prime(&inst), 1);
    }

    #[test]
    fn regular_closed_form_matches_count() {
        for n in 1..40 {
            let inst = NetworkInstance::regular(n, 1.0).unwrap();
            assert_eq!(n_prime(&inst), count_first_half(&inst), "N = {n}");
        }
    }

    #[test]
    fn realize_examples() {
        let inst = NetworkInstance::regular(3, 1.0).unwrap();
        let q = realize(&inst, TransmissionGraph::NextHop).unwrap();
        assert_eq!(q.edges().collect::<Vec<_>>(), vec![(1, 0, 3.0), (2, 1, 2.0), (3, 2, 1.0)]);

        let inst = NetworkInstance::regular(4, 1.0).unwrap();
        let q = realize(&inst, TransmissionGraph::Split(1)).unwrap();
        assert_eq!(
            q.edges().collect::<Vec<_>>(),
            vec![(1, 4, 1.0), (2, 0, 1.0), (3, 0, 1.0), (4, 0, 2.0)]
        );

        let inst = NetworkInstance::regular_with_data(vec![7.0]).unwrap();
        let q = realize(&inst, TransmissionGraph::Direct).unwrap();
        assert_eq!(q.edges().collect::<Vec<_>>(), vec![(1, 0, 7.0)]);
    }

    #[test]
    fn perturbed_graphs() {
        let inst = NetworkInstance::regular_with_data(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let q = realize(&inst, TransmissionGraph::NextHopPerturbed).unwrap();
        assert_eq!(q.get(5, 3), 5.0);
        assert_eq!(q.get(4, 3), 4.0);
        assert_eq!(q.get(3, 2), 12.0);
        let q = realize(&inst, TransmissionGraph::DirectPerturbed).unwrap();
        assert_eq!(q.get(5, 3), 5.0);
        assert_eq!(q.get(3, 0), 8.0);
        assert_eq!(q.get(1, 0), 1.0);
        let single = NetworkInstance::regular(1, 1.0).unwrap();
        assert!(realize(&single, TransmissionGraph::NextHopPerturbed).is_err());
        assert!(realize(&single, TransmissionGraph::DirectPerturbed).is_err());
    }

    #[test]
    fn split_index_is_checked() {
        let inst = NetworkInstance::regular(4, 1.0).unwrap();
        assert!(matches!(
            realize(&inst, TransmissionGraph::Split(2)),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
        assert!(realize(&inst, TransmissionGraph::Split(0)).is_err());
    }

    #[test]
    fn canonical_family_sizes() {
        use TransmissionGraph::*;
        let fam = |n| enumerate_canonical(&NetworkInstance::regular(n, 1.0).unwrap());
        assert_eq!(fam(4), vec![NextHop, Direct, Split(1)]);
        assert_eq!(fam(2), vec![NextHop, Direct]);
        assert_eq!(fam(5).len(), 4);
    }

    #[test]
    fn every_family_member_is_feasible() {
        let inst = NetworkInstance::new(vec![0.3, 0.9, 1.4, 3.0, 3.3, 7.5], vec![0.2, 1.0, 2.0, 0.7, 1.1, 0.4])
            .unwrap();
        for g in enumerate_extended(&inst) {
            let q = realize(&inst, g).unwrap();
            let f = check_feasible(&inst, &q, 1e-12).unwrap();
            assert!(f.feasible, "{g}: residual {}", f.max_residual);
        }
    }

    #[test]
    fn graph_names_round_trip() {
        use TransmissionGraph::*;
        for g in [NextHop, Direct, Split(1), Split(12), NextHopPerturbed, DirectPerturbed] {
            assert_eq!(g.to_string().parse::<TransmissionGraph>().unwrap(), g);
        }
        assert_eq!(Split(1).to_string(), "T2(1)");
        assert!("T3(1)".parse::<TransmissionGraph>().is_err());
        assert!("X".parse::<TransmissionGraph>().is_err());
    }
}

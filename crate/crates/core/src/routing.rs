//! Unsplit routing trees: every sensor forwards all of its data (own plus
//! received) to a single next hop.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CostMatrix, FlowMatrix, NetworkInstance};

/// Next-hop assignment `i -> next[i]` for sensors `1..=N`. Every hop chain
/// ends at the collector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RoutingTree {
    // next[0] is a placeholder for the collector.
    next: Vec<usize>,
}

impl RoutingTree {
    /// `next_hops[i - 1]` is the receiver of sensor `i`.
    pub fn new(next_hops: &[usize]) -> Result<Self> {
        let n = next_hops.len();
        if n == 0 {
            return Err(Error::InvalidTree("no sensors".into()));
        }
        let mut next = Vec::with_capacity(n + 1);
        next.push(0);
        next.extend_from_slice(next_hops);
        for i in 1..=n {
            if next[i] > n {
                return Err(Error::InvalidTree(format!("node {i} sends to unknown node {}", next[i])));
            }
            if next[i] == i {
                return Err(Error::InvalidTree(format!("node {i} sends to itself")));
            }
        }
        let tree = Self { next };
        if let Some(node) = tree.find_cycle() {
            return Err(Error::InvalidTree(format!("cycle through node {node}")));
        }
        Ok(tree)
    }

    pub(crate) fn from_raw(next: Vec<usize>) -> Self {
        debug_assert!(next.len() >= 2);
        Self { next }
    }

    fn find_cycle(&self) -> Option<usize> {
        let n = self.len();
        // 0 = unvisited, 1 = on current chain, 2 = reaches collector
        let mut state = vec![0u8; n + 1];
        state[0] = 2;
        for start in 1..=n {
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                cur = self.next[cur];
            }
            if state[cur] == 1 {
                return Some(cur);
            }
            let mut cur = start;
            while state[cur] == 1 {
                state[cur] = 2;
                cur = self.next[cur];
            }
        }
        None
    }

    /// Number of sensors.
    pub fn len(&self) -> usize {
        self.next.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn next_hop(&self, i: usize) -> usize {
        self.next[i]
    }

    /// Receivers of sensors `1..=N` in order.
    pub fn next_hops(&self) -> &[usize] {
        &self.next[1..]
    }

    /// Every sensor sends strictly closer to the collector.
    pub fn is_forward(&self, inst: &NetworkInstance) -> bool {
        (1..=self.len()).all(|i| inst.position(self.next[i]) < inst.position(i))
    }

    /// Flow induced by forwarding each node's data and everything it
    /// receives to its next hop.
    pub fn induced_flow(&self, inst: &NetworkInstance) -> Result<FlowMatrix> {
        let n = self.len();
        if inst.len() != n {
            return Err(Error::DimensionMismatch {
                expected: inst.len(),
                actual: n,
            });
        }
        let carried = self.carried_data(inst);
        let mut flow = FlowMatrix::zeros(n);
        for i in 1..=n {
            flow.set(i, self.next[i], carried[i])?;
        }
        Ok(flow)
    }

    /// Total data leaving each node (own plus subtree), index 0 unused.
    fn carried_data(&self, inst: &NetworkInstance) -> Vec<f64> {
        let n = self.len();
        let mut carried = vec![0.0; n + 1];
        for i in 1..=n {
            let q = inst.data(i);
            let mut cur = i;
            while cur != 0 {
                carried[cur] += q;
                cur = self.next[cur];
            }
        }
        carried
    }

    /// Cost of the hop chain from each node to the collector under `costs`
    /// (index 0 is the collector itself, always 0).
    pub fn path_costs(&self, costs: &CostMatrix) -> Vec<f64> {
        let n = self.len();
        let mut pi = vec![f64::NAN; n + 1];
        pi[0] = 0.0;
        let mut chain = Vec::with_capacity(n);
        for start in 1..=n {
            let mut cur = start;
            while pi[cur].is_nan() {
                chain.push(cur);
                cur = self.next[cur];
            }
            while let Some(node) = chain.pop() {
                pi[node] = costs.get(node, self.next[node]) + pi[self.next[node]];
            }
        }
        pi
    }

    /// `sum_i Q_i * pathcost(i)`; equals the induced flow's total energy.
    pub fn energy(&self, inst: &NetworkInstance, costs: &CostMatrix) -> f64 {
        self.path_costs(costs)
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, p)| inst.data(i) * p)
            .sum()
    }

    /// Largest relative violation of the shortest-path optimality conditions
    /// `pi_i <= c_ij + pi_j` over all edges, where `pi` are the tree's path
    /// costs. Nonpositive means the tree is an optimal flow: the objective is
    /// linear and supplies are positive, so node potentials that satisfy
    /// every edge constraint certify optimality by LP duality.
    pub fn optimality_gap(&self, costs: &CostMatrix) -> f64 {
        let n = self.len();
        let pi = self.path_costs(costs);
        let mut worst = f64::NEG_INFINITY;
        for i in 1..=n {
            for j in 0..=n {
                if i == j {
                    continue;
                }
                let alt = costs.get(i, j) + pi[j];
                let scale = pi[i].abs().max(alt.abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((pi[i] - alt) / scale);
            }
        }
        worst
    }

    /// True when no single-edge detour improves any node's path by more
    /// than `rel_tol` relative.
    pub fn is_optimal(&self, costs: &CostMatrix, rel_tol: f64) -> bool {
        self.optimality_gap(costs) <= rel_tol
    }
}

impl fmt::Display for RoutingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            if i > 1 {
                f.write_str(" ")?;
            }
            write!(f, "{}->{}", i, self.next[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_feasible, total_energy, CostModel};

    #[test]
    fn rejects_cycles_and_bad_targets() {
        assert!(RoutingTree::new(&[2, 1]).is_err());
        assert!(RoutingTree::new(&[1]).is_err());
        assert!(RoutingTree::new(&[3, 0]).is_err());
        assert!(RoutingTree::new(&[0, 3, 2]).is_err());
        assert!(RoutingTree::new(&[0, 1, 2]).is_ok());
    }

    #[test]
    fn induced_flow_is_feasible_and_energy_matches() {
        let inst = NetworkInstance::new(vec![0.5, 1.5, 4.0], vec![1.0, 2.0, 0.5]).unwrap();
        let tree = RoutingTree::new(&[3, 0, 2]).unwrap();
        let flow = tree.induced_flow(&inst).unwrap();
        assert!(check_feasible(&inst, &flow, 1e-12).unwrap().feasible);
        assert_eq!(flow.get(3, 2), 1.5);
        assert_eq!(flow.get(1, 3), 1.0);
        assert_eq!(flow.get(2, 0), 3.5);
        let model = CostModel::monomial(1.7).unwrap();
        let costs = CostMatrix::new(&inst, &model).unwrap();
        let direct = total_energy(&inst, &model, &flow).unwrap();
        assert!((tree.energy(&inst, &costs) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn optimality_certificate() {
        let inst = NetworkInstance::regular(3, 1.0).unwrap();
        let costs = CostMatrix::new(&inst, &CostModel::monomial(2.0).unwrap()).unwrap();
        let next_hop = RoutingTree::new(&[0, 1, 2]).unwrap();
        let direct = RoutingTree::new(&[0, 0, 0]).unwrap();
        assert!(next_hop.is_optimal(&costs, 1e-12));
        assert!(!direct.is_optimal(&costs, 1e-12));
        let costs = CostMatrix::new(&inst, &CostModel::monomial(0.5).unwrap()).unwrap();
        assert!(direct.is_optimal(&costs, 1e-12));
        assert!(!next_hop.is_optimal(&costs, 1e-12));
    }

    #[test]
    fn display_lists_hops() {
        let tree = RoutingTree::new(&[0, 1, 0]).unwrap();
        assert_eq!(tree.to_string(), "1->0 2->1 3->0");
    }
}

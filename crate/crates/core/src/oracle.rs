//! Exhaustive ground truth over every unsplit routing tree.
//!
//! The objective is linear over the flow polytope, so some vertex is
//! optimal, and the vertices are exactly the routing trees in which each
//! sensor forwards everything to one receiver.

use crate::error::{Error, Result};
use crate::family::enumerate_extended;
use crate::model::{CostMatrix, CostModel, NetworkInstance};
use crate::routing::RoutingTree;
use crate::solver::{Basis, Solution};

/// Largest network searched exhaustively unless overridden.
pub const DEFAULT_ORACLE_CAP: usize = 8;

/// Trees whose energy is within this relative distance of the minimum are
/// reported as co-optimal.
pub const TIE_REL_TOL: f64 = 1e-12;

const UNSET: usize = usize::MAX;

/// Depth-first walk over acyclic next-hop assignments in lexicographic
/// order of `(next[1], ..., next[N])`.
struct TreeWalker {
    n: usize,
    next: Vec<usize>,
    depth: usize,
    done: bool,
}

impl TreeWalker {
    fn new(n: usize) -> Self {
        let mut next = vec![UNSET; n + 1];
        next[0] = 0;
        Self {
            n,
            next,
            depth: 1,
            done: n == 0,
        }
    }

    // Would `p -> target` close a cycle among the assigned nodes 1..=p?
    fn closes_cycle(&self, p: usize, target: usize) -> bool {
        let mut cur = target;
        while cur != 0 && cur < p {
            cur = self.next[cur];
        }
        cur == p
    }

    /// Moves to the next complete tree; `false` once exhausted.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        loop {
            let p = self.depth;
            if p == 0 {
                self.done = true;
                return false;
            }
            let mut cand = if self.next[p] == UNSET { 0 } else { self.next[p] + 1 };
            while cand <= self.n && (cand == p || self.closes_cycle(p, cand)) {
                cand += 1;
            }
            if cand <= self.n {
                self.next[p] = cand;
                if p == self.n {
                    return true;
                }
                self.depth = p + 1;
                self.next[p + 1] = UNSET;
            } else {
                self.next[p] = UNSET;
                self.depth = p - 1;
            }
        }
    }

    fn current(&self) -> &[usize] {
        &self.next
    }
}

/// Streams every routing tree on `n` sensors exactly once.
pub struct TreeIter {
    walker: TreeWalker,
}

impl Iterator for TreeIter {
    type Item = RoutingTree;

    fn next(&mut self) -> Option<RoutingTree> {
        if self.walker.advance() {
            Some(RoutingTree::from_raw(self.walker.current().to_vec()))
        } else {
            None
        }
    }
}

pub fn enumerate_trees(n: usize) -> Result<TreeIter> {
    enumerate_trees_capped(n, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_trees_capped(n: usize, cap: usize) -> Result<TreeIter> {
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    Ok(TreeIter {
        walker: TreeWalker::new(n),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub cap: usize,
    /// Keep the sorted energy of every tree.
    pub keep_energies: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ORACLE_CAP,
            keep_energies: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    /// Built from the first (lexicographically smallest) minimizer.
    pub solution: Solution,
    pub min_energy: f64,
    /// Every co-optimal tree, in enumeration order.
    pub argmin: Vec<RoutingTree>,
    /// Ascending energies of all trees, when requested.
    pub energies: Option<Vec<f64>>,
    pub trees_examined: usize,
}

pub fn oracle_min(inst: &NetworkInstance, model: &CostModel) -> Result<OracleOutcome> {
    oracle_min_with(inst, model, OracleOptions::default())
}

pub fn oracle_min_with(inst: &NetworkInstance, model: &CostModel, opts: OracleOptions) -> Result<OracleOutcome> {
    let n = inst.len();
    if n > opts.cap {
        return Err(Error::TooLarge { n, cap: opts.cap });
    }
    let costs = CostMatrix::new(inst, model)?;
    let mut walker = TreeWalker::new(n);
    let mut pi = vec![0.0; n + 1];
    let mut known = vec![false; n + 1];
    let mut chain = Vec::with_capacity(n);
    let mut energies = Vec::new();
    let mut best = f64::INFINITY;
    let mut candidates: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut examined = 0usize;

    while walker.advance() {
        let next = walker.current();
        examined += 1;
        known.iter_mut().for_each(|k| *k = false);
        known[0] = true;
        pi[0] = 0.0;
        let mut energy = 0.0;
        for start in 1..=n {
            let mut cur = start;
            while !known[cur] {
                chain.push(cur);
                cur = next[cur];
            }
            while let Some(node) = chain.pop() {
                pi[node] = costs.get(node, next[node]) + pi[next[node]];
                known[node] = true;
            }
            energy += inst.data(start) * pi[start];
        }
        if opts.keep_energies {
            energies.push(energy);
        }
        if energy < best {
            best = energy;
            let cutoff = best + TIE_REL_TOL * best.abs();
            candidates.retain(|(e, _)| *e <= cutoff);
            candidates.push((energy, next.to_vec()));
        } else if energy <= best + TIE_REL_TOL * best.abs() {
            candidates.push((energy, next.to_vec()));
        }
    }

    let argmin: Vec<RoutingTree> = candidates.into_iter().map(|(_, next)| RoutingTree::from_raw(next)).collect();
    let tree = argmin[0].clone();
    let family = enumerate_extended(inst);
    let graph = family
        .into_iter()
        .find(|g| g.routing_tree(inst).map(|t| t == tree).unwrap_or(false));
    let flow = tree.induced_flow(inst)?;
    let energy = crate::model::total_energy(inst, model, &flow)?;
    let solution = Solution {
        graph,
        tree,
        flow,
        energy,
        regime: format!("exhaustive search over {examined} routing trees"),
        basis: Basis::Oracle,
        certified: false,
        verified: true,
        ties: Vec::new(),
        rejected_rule: None,
    };
    if opts.keep_energies {
        energies.sort_by(|a, b| a.total_cmp(b));
    }
    Ok(OracleOutcome {
        solution,
        min_energy: best,
        argmin,
        energies: opts.keep_energies.then_some(energies),
        trees_examined: examined,
    })
}

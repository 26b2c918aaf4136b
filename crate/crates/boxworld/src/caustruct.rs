//! Causal structures of deterministic processes: the signaling digraph
//! from the output-flip test, causal-structure classes up to party
//! relabeling, the siblings-on-cycles admissibility test, and the
//! fixed / adaptive / indefinite taxonomy.
//!
//! The flip-test digraph records direct influences only. The causal
//! structure used for class counting is its transitive closure (the graph
//! of causal pasts and futures), under which the full tripartite catalog
//! falls into exactly 7 classes; the raw digraphs fall into 8.

use crate::process::DetProcess;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Directed graph on parties; an edge `i -> j` (0-indexed) means party
/// i's output can flip party j's input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignalingDigraph {
    pub n: usize,
    pub edges: BTreeSet<(u8, u8)>,
}

impl SignalingDigraph {
    pub fn is_acyclic(&self) -> bool {
        // DFS coloring
        let mut state = vec![0u8; self.n];
        fn dfs(v: usize, state: &mut [u8], edges: &BTreeSet<(u8, u8)>, n: usize) -> bool {
            state[v] = 1;
            for w in 0..n {
                if edges.contains(&(v as u8, w as u8)) {
                    if state[w] == 1 {
                        return false;
                    }
                    if state[w] == 0 && !dfs(w, state, edges, n) {
                        return false;
                    }
                }
            }
            state[v] = 2;
            true
        }
        (0..self.n).all(|v| state[v] != 0 || dfs(v, &mut state, &self.edges, self.n))
    }

    /// Reachability closure: the graph of causal pasts and futures.
    pub fn transitive_closure(&self) -> SignalingDigraph {
        let mut reach = vec![vec![false; self.n]; self.n];
        for &(i, j) in &self.edges {
            reach[i as usize][j as usize] = true;
        }
        for k in 0..self.n {
            for i in 0..self.n {
                if reach[i][k] {
                    for j in 0..self.n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut edges = BTreeSet::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && reach[i][j] {
                    edges.insert((i as u8, j as u8));
                }
            }
        }
        SignalingDigraph { n: self.n, edges }
    }

    /// Lexicographically minimal adjacency encoding over all party
    /// permutations.
    pub fn canonical_key(&self) -> Vec<(u8, u8)> {
        let mut best: Option<Vec<(u8, u8)>> = None;
        permute_all(self.n, &mut |perm| {
            let mut e: Vec<(u8, u8)> = self
                .edges
                .iter()
                .map(|&(i, j)| (perm[i as usize] as u8, perm[j as usize] as u8))
                .collect();
            e.sort_unstable();
            if best.as_ref().map_or(true, |b| e < *b) {
                best = Some(e);
            }
        });
        best.unwrap_or_default()
    }

    /// All simple directed cycles, each as its vertex list.
    pub fn simple_cycles(&self) -> Vec<Vec<usize>> {
        let mut cycles = Vec::new();
        let adj: Vec<Vec<usize>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| self.edges.contains(&(i as u8, j as u8)))
                    .collect()
            })
            .collect();
        fn dfs(
            start: usize,
            v: usize,
            adj: &[Vec<usize>],
            path: &mut Vec<usize>,
            visited: &mut BTreeSet<usize>,
            cycles: &mut Vec<Vec<usize>>,
        ) {
            for &w in &adj[v] {
                if w == start {
                    cycles.push(path.clone());
                } else if w > start && !visited.contains(&w) {
                    visited.insert(w);
                    path.push(w);
                    dfs(start, w, adj, path, visited, cycles);
                    path.pop();
                    visited.remove(&w);
                }
            }
        }
        for s in 0..self.n {
            let mut path = vec![s];
            let mut visited = BTreeSet::from([s]);
            dfs(s, s, &adj, &mut path, &mut visited, &mut cycles);
        }
        cycles
    }
}

fn permute_all(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    heap_permute(&mut perm, n, f);
}

fn heap_permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(perm);
        return;
    }
    for i in 0..k {
        heap_permute(perm, k - 1, f);
        if k % 2 == 0 {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

/// Flip test: edge `i -> j` iff some output flip of party i flips the
/// input bit handed to party j, quantified over all `2^n` outputs.
pub fn signaling_digraph(f: &DetProcess) -> SignalingDigraph {
    let n = f.n;
    let m = 1usize << n;
    let mut edges = BTreeSet::new();
    for i in 0..n {
        let hi = 1usize << (n - 1 - i);
        for j in 0..n {
            if i == j {
                continue;
            }
            if (0..m).any(|a| f.coord(j, a) != f.coord(j, a ^ hi)) {
                edges.insert((i as u8, j as u8));
            }
        }
    }
    SignalingDigraph { n, edges }
}

/// The causal structure: transitive closure of the flip-test digraph.
pub fn causal_structure(f: &DetProcess) -> SignalingDigraph {
    signaling_digraph(f).transitive_closure()
}

/// Siblings-on-cycles admissibility: every directed cycle contains two
/// distinct nodes sharing a common parent.
pub fn is_soc(g: &SignalingDigraph) -> bool {
    let parents: Vec<BTreeSet<u8>> = (0..g.n)
        .map(|v| g.edges.iter().filter(|&&(_, j)| j as usize == v).map(|&(i, _)| i).collect())
        .collect();
    g.simple_cycles().iter().all(|cycle| {
        cycle.iter().enumerate().any(|(idx, &v)| {
            cycle[idx + 1..]
                .iter()
                .any(|&w| !parents[v].is_disjoint(&parents[w]))
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalType {
    Fixed,
    Adaptive,
    #[serde(rename = "ICO")]
    Ico,
}

/// Fixed iff the signaling digraph is acyclic; otherwise adaptive iff
/// some party receives a constant (a global past exists); otherwise the
/// order is indefinite.
pub fn classify_type(f: &DetProcess) -> CausalType {
    let g = signaling_digraph(f);
    if g.is_acyclic() {
        CausalType::Fixed
    } else if (0..f.n).any(|i| f.coord_is_constant(i)) {
        CausalType::Adaptive
    } else {
        CausalType::Ico
    }
}

/// One isomorphism class of causal structures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureClass {
    pub structure_id: usize,
    pub adjacency: Vec<(u8, u8)>,
    pub r#type: CausalType,
    pub soc: bool,
    pub members: usize,
}

/// Partition digraphs into isomorphism classes under node permutations.
/// Returns classes keyed by canonical adjacency, in canonical order.
pub fn iso_classes(digraphs: &[SignalingDigraph]) -> Vec<(Vec<(u8, u8)>, usize)> {
    let mut classes: BTreeMap<Vec<(u8, u8)>, usize> = BTreeMap::new();
    for g in digraphs {
        *classes.entry(g.canonical_key()).or_insert(0) += 1;
    }
    classes.into_iter().collect()
}

/// Full structure classification of a process catalog: classes of the
/// reachability-closure structures with their taxonomy and SOC status.
pub fn classify_catalog(catalog: &[DetProcess]) -> Result<Vec<StructureClass>, Error> {
    if catalog.iter().any(|f| f.n > 4) {
        return Err(Error::Guard("structure classification is sized for n <= 4".into()));
    }
    let mut classes: BTreeMap<Vec<(u8, u8)>, (CausalType, bool, usize)> = BTreeMap::new();
    for f in catalog {
        let raw = signaling_digraph(f);
        let closure = raw.transitive_closure();
        let key = closure.canonical_key();
        let entry = classes.entry(key).or_insert_with(|| {
            (classify_type(f), is_soc(&raw), 0)
        });
        entry.2 += 1;
        // the taxonomy is a class invariant; a disagreement would be a bug
        if entry.0 != classify_type(f) {
            return Err(Error::Guard("taxonomy differs within a structure class".into()));
        }
        if !is_soc(&raw) {
            return Err(Error::Guard(format!(
                "consistent process with a non-SOC digraph: {:?}",
                f.x_of_a
            )));
        }
    }
    Ok(classes
        .into_iter()
        .enumerate()
        .map(|(i, (adjacency, (t, soc, members)))| StructureClass {
            structure_id: i,
            adjacency,
            r#type: t,
            soc,
            members,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::enumerate_det;

    fn not(b: u8) -> u8 {
        1 - b
    }

    pub(crate) fn eq20() -> DetProcess {
        DetProcess::from_coords(4, |a| vec![1, not(a[0]), not(a[1]), a[0] ^ a[2]])
    }
    pub(crate) fn eq21() -> DetProcess {
        DetProcess::from_coords(4, |a| {
            vec![1, not(a[0]) | not(a[2]), a[0] | not(a[3]), not(a[1])]
        })
    }
    pub(crate) fn eq22() -> DetProcess {
        DetProcess::from_coords(4, |a| {
            vec![
                not(a[1]) | not(a[2]) | not(a[3]),
                not(a[0]) | not(a[2]) | a[3],
                not(a[0]) | not(a[3]) | a[1],
                not(a[0]) | not(a[1]) | a[2],
            ]
        })
    }

    #[test]
    fn flip_test_digraph_examples() {
        // fixed-order example: edges 1->2, 2->3, 1->4, 3->4 (1-indexed)
        let g = signaling_digraph(&eq20());
        assert_eq!(
            g.edges,
            BTreeSet::from([(0, 1), (1, 2), (0, 3), (2, 3)])
        );
        // constant process: empty edge set
        let c = DetProcess::new(3, vec![5; 8]).unwrap();
        assert!(signaling_digraph(&c).edges.is_empty());
        // PAR-SER: {2,3,4} -> 1 and {1,3,4} -> 2
        let p = crate::switch::parser_process();
        assert_eq!(
            signaling_digraph(&p).edges,
            BTreeSet::from([(1, 0), (2, 0), (3, 0), (0, 1), (2, 1), (3, 1)])
        );
    }

    #[test]
    fn soc_examples() {
        let acyclic = signaling_digraph(&eq20());
        assert!(is_soc(&acyclic));
        let three_cycle = SignalingDigraph {
            n: 3,
            edges: BTreeSet::from([(0, 1), (1, 2), (2, 0)]),
        };
        assert!(!is_soc(&three_cycle));
        assert!(is_soc(&signaling_digraph(&eq22())));
    }

    #[test]
    fn taxonomy_regression_cases() {
        assert!(eq20().is_consistent());
        assert!(eq21().is_consistent());
        assert!(eq22().is_consistent());
        assert_eq!(classify_type(&eq20()), CausalType::Fixed);
        assert_eq!(classify_type(&eq21()), CausalType::Adaptive);
        assert_eq!(classify_type(&eq22()), CausalType::Ico);
        assert_eq!(classify_type(&crate::switch::parser_process()), CausalType::Adaptive);
        assert_eq!(eq20().dk_class(), 1);
    }

    #[test]
    fn iso_classes_under_party_swap() {
        let g1 = SignalingDigraph { n: 3, edges: BTreeSet::from([(0, 1)]) };
        let g2 = SignalingDigraph { n: 3, edges: BTreeSet::from([(2, 0)]) };
        assert_eq!(g1.canonical_key(), g2.canonical_key());
        let classes = iso_classes(&[g1, g2]);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].1, 2);
    }

    #[test]
    fn tripartite_catalog_structure_counts() {
        let catalog = enumerate_det(3).unwrap();
        assert_eq!(catalog.len(), 744);
        // raw flip-test digraphs: 8 classes
        let raw: Vec<SignalingDigraph> = catalog.iter().map(signaling_digraph).collect();
        assert_eq!(iso_classes(&raw).len(), 8);
        // causal structures (reachability closures): exactly 7, 1 of them ICO
        let classes = classify_catalog(&catalog).unwrap();
        assert_eq!(classes.len(), 7);
        let icos: Vec<_> = classes.iter().filter(|c| c.r#type == CausalType::Ico).collect();
        assert_eq!(icos.len(), 1);
        assert_eq!(icos[0].members, 64); // the self-circle family
        assert!(classes.iter().all(|c| c.soc));
        let total: usize = classes.iter().map(|c| c.members).sum();
        assert_eq!(total, 744);
    }

    #[test]
    fn closure_merges_chain_into_transitive_triangle() {
        let chain = SignalingDigraph { n: 3, edges: BTreeSet::from([(0, 1), (1, 2)]) };
        let tri = SignalingDigraph { n: 3, edges: BTreeSet::from([(0, 1), (1, 2), (0, 2)]) };
        assert_eq!(chain.transitive_closure().canonical_key(), tri.canonical_key());
    }
}

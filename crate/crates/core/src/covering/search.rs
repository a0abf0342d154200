//! Exact minimum set cover over a small universe `[0, n)`.
//!
//! Greedy seeds the incumbent; depth-first branch-and-bound then branches on
//! the uncovered element with the fewest admissible candidates. Siblings
//! already explored at a node are forbidden in later siblings, so every cover
//! is visited at most once.

use crate::bits::BitVec;

pub struct CoverSearch {
    n: usize,
    labels: Vec<u64>,
    cands: Vec<BitVec>,
    by_elem: Vec<Vec<usize>>,
    best: Vec<usize>,
    nodes: u64,
}

impl CoverSearch {
    /// `candidates` are `(label, members)`; identical and dominated
    /// candidates are dropped, keeping the earliest label.
    pub fn new(n: usize, candidates: Vec<(u64, BitVec)>) -> Self {
        let mut kept: Vec<(u64, BitVec)> = Vec::new();
        for (label, bits) in candidates {
            if bits.none() || kept.iter().any(|(_, k)| bits.is_subset(k)) {
                continue;
            }
            kept.retain(|(_, k)| !k.is_subset(&bits));
            kept.push((label, bits));
        }
        let (labels, cands): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
        let mut by_elem = vec![Vec::new(); n];
        for (i, c) in cands.iter().enumerate() {
            for e in c.ones_iter() {
                by_elem[e].push(i);
            }
        }
        Self {
            n,
            labels,
            cands,
            by_elem,
            best: Vec::new(),
            nodes: 0,
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Labels of a minimum cover in ascending order, `None` if the
    /// candidates do not cover the universe.
    pub fn solve(&mut self) -> Option<Vec<u64>> {
        if self.by_elem.iter().any(Vec::is_empty) {
            return None;
        }
        let full = BitVec::ones(self.n);
        self.best = self.greedy(&full);
        let mut chosen = Vec::new();
        let forbidden = BitVec::zeros(self.cands.len());
        self.dfs(full, &mut chosen, forbidden);
        let mut out: Vec<u64> = self.best.iter().map(|&i| self.labels[i]).collect();
        out.sort_unstable();
        Some(out)
    }

    fn greedy(&self, start: &BitVec) -> Vec<usize> {
        let mut uncovered = start.clone();
        let mut picks = Vec::new();
        while !uncovered.none() {
            let (i, _) = self
                .cands
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.and_count(&uncovered)))
                .fold((0, 0), |b, x| if x.1 > b.1 { x } else { b });
            uncovered.and_not_assign(&self.cands[i]);
            picks.push(i);
        }
        picks
    }

    fn dfs(&mut self, uncovered: BitVec, chosen: &mut Vec<usize>, mut forbidden: BitVec) {
        self.nodes += 1;
        let remaining = uncovered.count_ones();
        if remaining == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= self.best.len() {
            // need at least one more set, which cannot beat the incumbent
            return;
        }

        let mut widest = 0usize;
        for (i, c) in self.cands.iter().enumerate() {
            if !forbidden.get(i) {
                widest = widest.max(c.and_count(&uncovered));
            }
        }
        if widest == 0 {
            return;
        }
        let lower = remaining.div_ceil(widest);
        if chosen.len() + lower >= self.best.len() {
            return;
        }

        // uncovered element with fewest admissible candidates
        let mut pivot = None;
        let mut pivot_deg = usize::MAX;
        for e in uncovered.ones_iter() {
            let deg = self.by_elem[e].iter().filter(|&&c| !forbidden.get(c)).count();
            if deg < pivot_deg {
                pivot_deg = deg;
                pivot = Some(e);
                if deg <= 1 {
                    break;
                }
            }
        }
        let Some(pivot) = pivot else { return };
        if pivot_deg == 0 {
            return;
        }

        let mut options: Vec<(usize, usize)> = self.by_elem[pivot]
            .iter()
            .filter(|&&c| !forbidden.get(c))
            .map(|&c| (c, self.cands[c].and_count(&uncovered)))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

        for (c, _) in options {
            let mut next = uncovered.clone();
            next.and_not_assign(&self.cands[c]);
            chosen.push(c);
            self.dfs(next, chosen, forbidden.clone());
            chosen.pop();
            forbidden.set(c);
            if chosen.len() + 1 >= self.best.len() {
                return;
            }
        }
    }
}

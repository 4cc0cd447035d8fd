//! Brute-force reference computations for small instances.

use std::collections::HashMap;

use crate::graph::{Color, Graph, Vertex};

/// Maximum bipartite matching size by dynamic programming over subsets of
/// the right side. Needs `right ≤ 20`.
pub fn brute_force_matching(adj: &[Vec<usize>], right: usize) -> usize {
    assert!(right <= 20);
    fn go(i: usize, mask: u32, adj: &[Vec<usize>], memo: &mut HashMap<(usize, u32), usize>) -> usize {
        if i == adj.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, mask)) {
            return v;
        }
        let mut best = go(i + 1, mask, adj, memo);
        for &r in &adj[i] {
            if mask >> r & 1 == 0 {
                best = best.max(1 + go(i + 1, mask | 1 << r, adj, memo));
            }
        }
        memo.insert((i, mask), best);
        best
    }
    go(0, 0, adj, &mut HashMap::new())
}

/// Largest set of vertex-disjoint non-adjacent pairs of `members`, each
/// given a distinct color from `shared(u, v)`, stopping once `cap` pairs
/// are found.
pub fn brute_force_colorful(
    graph: &Graph,
    members: &[Vertex],
    shared: impl Fn(Vertex, Vertex) -> Vec<Color>,
    cap: usize,
) -> usize {
    let k = members.len();
    let mut options: Vec<Vec<(usize, Vec<Color>)>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in i + 1..k {
            if !graph.has_edge(members[i], members[j]) {
                let s = shared(members[i], members[j]);
                if !s.is_empty() {
                    options[i].push((j, s));
                }
            }
        }
    }
    struct Ctx<'a> {
        options: &'a [Vec<(usize, Vec<Color>)>],
        cap: usize,
        best: usize,
        used: Vec<bool>,
        colors: Vec<Color>,
    }
    fn go(ctx: &mut Ctx<'_>, i: usize, count: usize) {
        ctx.best = ctx.best.max(count);
        if ctx.best >= ctx.cap || i >= ctx.options.len() {
            return;
        }
        let free = ctx.used[i..].iter().filter(|u| !**u).count();
        if count + free / 2 <= ctx.best {
            return;
        }
        if !ctx.used[i] {
            for a in 0..ctx.options[i].len() {
                let j = ctx.options[i][a].0;
                if ctx.used[j] {
                    continue;
                }
                for b in 0..ctx.options[i][a].1.len() {
                    let c = ctx.options[i][a].1[b];
                    if ctx.colors.contains(&c) {
                        continue;
                    }
                    ctx.used[i] = true;
                    ctx.used[j] = true;
                    ctx.colors.push(c);
                    go(ctx, i + 1, count + 1);
                    ctx.colors.pop();
                    ctx.used[i] = false;
                    ctx.used[j] = false;
                    if ctx.best >= ctx.cap {
                        return;
                    }
                }
            }
        }
        go(ctx, i + 1, count);
    }
    let mut ctx = Ctx {
        options: &options,
        cap,
        best: 0,
        used: vec![false; k],
        colors: Vec::new(),
    };
    go(&mut ctx, 0, 0);
    ctx.best.min(cap)
}

/// Probability that a clique on `size` vertices, each holding a uniform
/// `k`-subset of `size` colors, has no proper coloring from the lists.
/// Exhaustive over all list assignments.
pub fn clique_list_failure_probability(size: usize, k: usize) -> f64 {
    let subsets: Vec<u32> = (0u32..1 << size).filter(|m| m.count_ones() as usize == k).collect();
    let total = subsets.len().pow(size as u32);
    let mut lists = vec![0u32; size];
    let mut bad = 0usize;
    for idx in 0..total {
        let mut x = idx;
        for l in lists.iter_mut() {
            *l = subsets[x % subsets.len()];
            x /= subsets.len();
        }
        if !has_distinct_representatives(&lists, 0, 0) {
            bad += 1;
        }
    }
    bad as f64 / total as f64
}

fn has_distinct_representatives(lists: &[u32], i: usize, used: u32) -> bool {
    if i == lists.len() {
        return true;
    }
    let mut free = lists[i] & !used;
    while free != 0 {
        let bit = free & free.wrapping_neg();
        if has_distinct_representatives(lists, i + 1, used | bit) {
            return true;
        }
        free &= free - 1;
    }
    false
}

/// Chi-square statistic of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum()
}

/// Upper `1 - level` quantile of chi-square with `df` degrees of freedom.
pub fn chi_square_critical(df: usize, level: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(df as f64).unwrap().inverse_cdf(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k5_failure_probability() {
        let q = clique_list_failure_probability(5, 3);
        assert!((q - 0.0526).abs() < 1e-12, "{q}");
        assert_eq!(clique_list_failure_probability(3, 3), 0.0);
    }

    #[test]
    fn brute_matching() {
        assert_eq!(brute_force_matching(&[vec![0, 1], vec![0]], 2), 2);
        assert_eq!(brute_force_matching(&[vec![0], vec![0]], 1), 1);
    }

    #[test]
    fn chi_square_quantile() {
        assert!((chi_square_critical(1, 0.99) - 6.6349).abs() < 1e-3);
        assert_eq!(chi_square_uniform(&[5, 5, 5]), 0.0);
    }
}

//! Lexicographic enumeration helpers and exact binomials.

use std::ops::ControlFlow;

use num_bigint::BigUint;

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order until it breaks.
pub fn for_each_combination<B>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if k > n {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        if k == 0 || !next_combination(&mut idx, n) {
            return ControlFlow::Continue(());
        }
    }
}

/// Calls `f` on every tuple (C_1, ..., C_r) of pairwise disjoint subsets of
/// `0..n` with |C_i| = sizes[i], each class sorted, ordered lexicographically
/// by C_1 first.
pub fn for_each_disjoint_classes<B>(
    n: usize,
    sizes: &[usize],
    mut f: impl FnMut(&[Vec<usize>]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    fn rec<B>(
        n: usize,
        sizes: &[usize],
        used: &mut Vec<bool>,
        acc: &mut Vec<Vec<usize>>,
        f: &mut dyn FnMut(&[Vec<usize>]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let level = acc.len();
        if level == sizes.len() {
            return f(acc);
        }
        let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        for_each_combination(free.len(), sizes[level], |pick| {
            let class: Vec<usize> = pick.iter().map(|&i| free[i]).collect();
            for &c in &class {
                used[c] = true;
            }
            acc.push(class);
            let flow = rec(n, sizes, used, acc, f);
            let class = acc.pop().unwrap();
            for &c in &class {
                used[c] = false;
            }
            flow
        })
    }
    let total: usize = sizes.iter().sum();
    if total > n {
        return ControlFlow::Continue(());
    }
    let mut used = vec![false; n];
    let mut acc = Vec::with_capacity(sizes.len());
    rec(n, sizes, &mut used, &mut acc, &mut f)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient as u64, saturating at `u64::MAX`.
pub fn binomial_u64(n: u64, k: u64) -> u64 {
    u64::try_from(binomial(n, k)).unwrap_or(u64::MAX)
}

/// Number of ordered tuples of disjoint classes with the given sizes drawn from n items.
pub fn multinomial_count(n: u64, sizes: &[u64]) -> BigUint {
    let mut rest = n;
    let mut acc = BigUint::from(1u32);
    for &s in sizes {
        if s > rest {
            return BigUint::from(0u32);
        }
        acc *= binomial(rest, s);
        rest -= s;
    }
    acc
}

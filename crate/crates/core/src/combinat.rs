//! Lazy enumeration of the index sets the partition-type pmf formulas sum
//! over, and convolution powers of jump distributions.
//!
//! * [`enum_omega`]: multiplicity vectors `(x_1..x_n)` with `sum j x_j = n`
//!   (one per integer partition of `n`).
//! * [`enum_compositions`]: ordered `k`-tuples of positive integers summing to `n`.
//! * [`enum_theta`]: multiplicity vectors of length `n` with exactly `k` parts.
//! * [`enum_lambda`]: the same partitions, recorded with length `n - k + 1`
//!   (no part of a `k`-part partition of `n` exceeds `n - k + 1`).
//!
//! Partitions are produced in reverse-lexicographic order of their parts
//! (`n`, `n-1 1`, `n-2 2`, `n-2 1 1`, ...); compositions in lexicographic order.

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplicityVector {
    counts: Vec<usize>,
    weighted_sum: usize,
    part_count: usize,
}

impl MultiplicityVector {
    /// Build the multiplicity vector of length `len` of a partition given by its parts.
    fn from_parts(parts: &[usize], len: usize) -> Self {
        let mut counts = vec![0; len];
        for &p in parts {
            counts[p - 1] += 1;
        }
        Self {
            counts,
            weighted_sum: parts.iter().sum(),
            part_count: parts.len(),
        }
    }

    pub fn new(counts: Vec<usize>) -> Self {
        let weighted_sum = counts.iter().enumerate().map(|(i, &x)| (i + 1) * x).sum();
        let part_count = counts.iter().sum();
        Self {
            counts,
            weighted_sum,
            part_count,
        }
    }

    /// `x_j` for `j = 1..=len`, stored at index `j - 1`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `sum_j j x_j`
    pub fn weighted_sum(&self) -> usize {
        self.weighted_sum
    }

    /// `sum_j x_j`
    pub fn part_count(&self) -> usize {
        self.part_count
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Pairs `(j, x_j)` with `x_j > 0`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| (i + 1, x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
}

/// All partitions of `n`, reverse-lexicographic.
#[derive(Debug, Clone)]
pub struct Partitions {
    n: usize,
    parts: Vec<usize>,
    started: bool,
    done: bool,
}

impl Partitions {
    fn new(n: usize) -> Self {
        Self {
            n,
            parts: vec![n],
            started: false,
            done: n == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let Some(i) = self.parts.iter().rposition(|&p| p > 1) else {
            return false;
        };
        let ones = self.parts.len() - i - 1;
        let v = self.parts[i] - 1;
        self.parts.truncate(i);
        self.parts.push(v);
        let mut rem = ones + 1;
        while rem > 0 {
            let p = v.min(rem);
            self.parts.push(p);
            rem -= p;
        }
        true
    }
}

impl Iterator for Partitions {
    type Item = MultiplicityVector;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(MultiplicityVector::from_parts(&self.parts, self.n))
    }
}

/// Partitions of `n` into exactly `k` parts, reverse-lexicographic,
/// recorded as multiplicity vectors of length `len`.
#[derive(Debug, Clone)]
pub struct KPartitions {
    len: usize,
    parts: Vec<usize>,
    started: bool,
    done: bool,
}

impl KPartitions {
    fn new(n: usize, k: usize, len: usize) -> Self {
        let mut parts = vec![1; k];
        parts[0] = n - k + 1;
        Self {
            len,
            parts,
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.parts.len();
        // Rightmost position whose part can drop by one while the suffix is
        // refilled with parts in [1, new value].
        let mut suffix: usize = 0;
        for i in (0..k.saturating_sub(1)).rev() {
            suffix += self.parts[i + 1];
            let slots = k - 1 - i;
            let v = self.parts[i] - 1;
            let s = suffix + 1;
            if v >= 1 && s >= slots && s <= slots * v {
                self.parts[i] = v;
                let mut rem = s;
                for j in (i + 1)..k {
                    let after = k - 1 - j;
                    let p = v.min(rem - after);
                    self.parts[j] = p;
                    rem -= p;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for KPartitions {
    type Item = MultiplicityVector;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(MultiplicityVector::from_parts(&self.parts, self.len))
    }
}

/// Compositions of `n` into exactly `k` positive parts, lexicographic.
#[derive(Debug, Clone)]
pub struct Compositions {
    parts: Vec<usize>,
    started: bool,
    done: bool,
}

impl Compositions {
    fn new(n: usize, k: usize) -> Self {
        let mut parts = vec![1; k];
        parts[k - 1] = n - k + 1;
        Self {
            parts,
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.parts.len();
        let mut suffix = 0;
        for i in (0..k.saturating_sub(1)).rev() {
            suffix += self.parts[i + 1];
            let slots = k - 1 - i;
            if suffix > slots {
                self.parts[i] += 1;
                let rest = suffix - 1;
                for j in (i + 1)..k {
                    self.parts[j] = 1;
                }
                self.parts[k - 1] = rest - (slots - 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(Composition {
            parts: self.parts.clone(),
        })
    }
}

pub fn enum_omega(n: usize) -> Result<Partitions> {
    if n == 0 {
        return domain("enum_omega requires n >= 1");
    }
    Ok(Partitions::new(n))
}

fn check_k(op: &str, n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return domain(format!("{op} requires 1 <= k <= n (got n = {n}, k = {k})"));
    }
    Ok(())
}

pub fn enum_compositions(n: usize, k: usize) -> Result<Compositions> {
    check_k("enum_compositions", n, k)?;
    Ok(Compositions::new(n, k))
}

pub fn enum_theta(n: usize, k: usize) -> Result<KPartitions> {
    check_k("enum_theta", n, k)?;
    Ok(KPartitions::new(n, k, n))
}

pub fn enum_lambda(n: usize, k: usize) -> Result<KPartitions> {
    check_k("enum_lambda", n, k)?;
    Ok(KPartitions::new(n, k, n - k + 1))
}

/// All convolution powers of a jump pmf on `{1, 2, ...}` up to a fixed size.
///
/// `mass(k, n) = Pr{X_1 + ... + X_k = n}` for `1 <= k <= k_max`,
/// `0 <= n <= n_max`, computed by dynamic programming over `n`.
#[derive(Debug, Clone)]
pub struct ConvolutionPowers {
    n_max: usize,
    // rows[k - 1][n]
    rows: Vec<Vec<f64>>,
}

impl ConvolutionPowers {
    /// `jump[j]` is `c_j`; `jump[0]` is ignored. Entries beyond the slice are zero.
    pub fn new(jump: &[f64], k_max: usize, n_max: usize) -> Self {
        let c = |j: usize| if j >= 1 && j < jump.len() { jump[j] } else { 0.0 };
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k_max);
        if k_max >= 1 {
            rows.push((0..=n_max).map(c).collect());
        }
        for k in 2..=k_max {
            let prev = &rows[k - 2];
            let mut row = vec![0.0; n_max + 1];
            for (n, slot) in row.iter_mut().enumerate().skip(k) {
                // The (k-1)-fold sum is at least k-1, so the last jump is at most n-k+1.
                *slot = (1..=n + 1 - k).map(|m| c(m) * prev[n - m]).sum();
            }
            rows.push(row);
        }
        Self { n_max, rows }
    }

    pub fn k_max(&self) -> usize {
        self.rows.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mass(&self, k: usize, n: usize) -> f64 {
        if k == 0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        if n < k || n > self.n_max || k > self.rows.len() {
            return 0.0;
        }
        self.rows[k - 1][n]
    }
}

/// `Pr{X_1 + ... + X_k = n}` for iid jumps with `Pr{X = j} = c(j)`, `j >= 1`.
pub fn conv_power(c: impl Fn(usize) -> f64, k: usize, n: usize) -> Result<f64> {
    if k == 0 {
        return domain("conv_power requires k >= 1");
    }
    if n < k {
        return Ok(0.0);
    }
    let jump: Vec<f64> = (0..=n).map(|j| if j == 0 { 0.0 } else { c(j) }).collect();
    Ok(ConvolutionPowers::new(&jump, k, n).mass(k, n))
}

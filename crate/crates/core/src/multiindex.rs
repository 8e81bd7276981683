use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Multi-index `α = (α_1, …, α_n)` with order `|α| = Σ α_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index `e_j` in dimension `n`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `ξ^α` for a real frequency.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .fold(1.0, |acc, (&a, &x)| acc * powu(x, a))
    }

    /// `ξ^α` for a complex frequency.
    pub fn monomial_complex(&self, xi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (&a, &x) in self.0.iter().zip(xi) {
            for _ in 0..a {
                acc *= x;
            }
        }
        acc
    }

    /// Multinomial coefficient `|α|! / α!`.
    pub fn multinomial(&self) -> f64 {
        let mut out = factorial(self.order());
        for &a in &self.0 {
            out /= factorial(a);
        }
        out
    }
}

fn powu(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn factorial(m: u32) -> f64 {
    (1..=m).fold(1.0, |acc, v| acc * v as f64)
}

/// All multi-indices of order `k` in dimension `n`, lexicographically
/// descending (`(1,0)` before `(0,1)`).
pub fn multiindex_enumerate(n: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0u32; n];
    fill(&mut cur, 0, k, &mut out);
    out
}

fn fill(cur: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        fill(cur, pos + 1, remaining - a, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
    }

    #[test]
    fn single_variable() {
        assert_eq!(multiindex_enumerate(1, 3), vec![MultiIndex::new(vec![3])]);
    }

    #[test]
    fn first_order_basis() {
        assert_eq!(
            multiindex_enumerate(2, 1),
            vec![MultiIndex::new(vec![1, 0]), MultiIndex::new(vec![0, 1])]
        );
    }

    #[test]
    fn counts_match_brute_force() {
        for n in 1..=4usize {
            for k in 0..=4u32 {
                let got = multiindex_enumerate(n, k);
                // brute force: every vector in [0,k]^n with the right sum
                let mut brute = Vec::new();
                let total = (k as usize + 1).pow(n as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut e = Vec::with_capacity(n);
                    for _ in 0..n {
                        e.push((c % (k as usize + 1)) as u32);
                        c /= k as usize + 1;
                    }
                    if e.iter().sum::<u32>() == k {
                        brute.push(MultiIndex::new(e));
                    }
                }
                assert_eq!(got.len(), brute.len());
                assert_eq!(got.len() as u64, binom(n as u64 + k as u64 - 1, k as u64));
                let mut sorted = got.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), got.len());
                brute.sort();
                assert_eq!(sorted, brute);
                assert!(got.windows(2).all(|w| w[0] > w[1]));
            }
        }
        assert_eq!(multiindex_enumerate(3, 2).len(), 6);
    }

    #[test]
    fn multinomial_weights_sum_to_power_of_n() {
        // Σ_{|α|=m} m!/α! = n^m
        for n in 1..=4usize {
            for m in 0..=4u32 {
                let s: f64 = multiindex_enumerate(n, m).iter().map(|a| a.multinomial()).sum();
                assert_eq!(s, (n as f64).powi(m as i32));
            }
        }
    }
}

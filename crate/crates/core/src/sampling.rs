use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether sample frequencies live on the real or the complex unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    Real,
    Complex,
}

/// Deterministic quasi-uniform sample of the unit sphere in `ℝ^n` or `ℂ^n`.
///
/// Points come from a randomly shifted Halton sequence (the shift is drawn
/// from `seed`) pushed through Box–Muller and normalized. After the
/// quasi-uniform block the sampler appends the `2n` signed coordinate
/// directions (real mode) or the coordinate directions together with the
/// isotropic pairs `(e_j + ω e_k)/√2`, `ω ∈ {1, -1, i, -i}` (complex mode).
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSampling {
    n: usize,
    quasi_count: usize,
    seed: u64,
    mode: SamplingMode,
    points: Vec<Vec<Complex64>>,
}

/// Default number of quasi-uniform points.
pub const DEFAULT_SAMPLE_COUNT: usize = 2048;

const PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

impl SphereSampling {
    /// Quasi-uniform sampling with `count` points plus the structured
    /// augmentation described on the type.
    pub fn quasi_uniform(n: usize, count: usize, seed: u64, mode: SamplingMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sampling dimension must be >= 1".into()));
        }
        let real_dims = match mode {
            SamplingMode::Real => n,
            SamplingMode::Complex => 2 * n,
        };
        let halton_dims = real_dims + real_dims % 2;
        if halton_dims > PRIMES.len() {
            return Err(Error::InvalidArgument("sampling dimension too large".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..halton_dims).map(|_| rng.random::<f64>()).collect();

        let mut points = Vec::with_capacity(count + 2 * n * n);
        let mut gauss = vec![0.0; halton_dims];
        let mut index = 1u64;
        while points.len() < count {
            for pair in 0..halton_dims / 2 {
                let mut u1 = radical_inverse(index, PRIMES[2 * pair]) + shift[2 * pair];
                let mut u2 = radical_inverse(index, PRIMES[2 * pair + 1]) + shift[2 * pair + 1];
                u1 -= libm::floor(u1);
                u2 -= libm::floor(u2);
                let u1 = u1.max(f64::MIN_POSITIVE);
                let radius = libm::sqrt(-2.0 * libm::log(u1));
                let angle = 2.0 * core::f64::consts::PI * u2;
                gauss[2 * pair] = radius * libm::cos(angle);
                gauss[2 * pair + 1] = radius * libm::sin(angle);
            }
            index += 1;
            let point: Vec<Complex64> = match mode {
                SamplingMode::Real => gauss[..n].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                SamplingMode::Complex => (0..n)
                    .map(|i| Complex64::new(gauss[2 * i], gauss[2 * i + 1]))
                    .collect(),
            };
            if let Some(p) = normalized(point) {
                points.push(p);
            }
        }

        let one = Complex64::new(1.0, 0.0);
        let unit = |j: usize, c: Complex64| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = c;
            e
        };
        match mode {
            SamplingMode::Real => {
                for j in 0..n {
                    points.push(unit(j, one));
                    points.push(unit(j, -one));
                }
            }
            SamplingMode::Complex => {
                let h = core::f64::consts::FRAC_1_SQRT_2;
                for j in 0..n {
                    points.push(unit(j, one));
                }
                for j in 0..n {
                    for k in j + 1..n {
                        for w in [one, -one, Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)] {
                            let mut e = unit(j, Complex64::new(h, 0.0));
                            e[k] = w * h;
                            points.push(e);
                        }
                    }
                }
            }
        }
        Ok(SphereSampling {
            n,
            quasi_count: count,
            seed,
            mode,
            points,
        })
    }

    /// Default real sampling: 2048 quasi-uniform points plus `±e_j`.
    pub fn default_real(n: usize, seed: u64) -> Result<Self> {
        Self::quasi_uniform(n, DEFAULT_SAMPLE_COUNT, seed, SamplingMode::Real)
    }

    /// Default complex sampling.
    pub fn default_complex(n: usize, seed: u64) -> Result<Self> {
        Self::quasi_uniform(n, DEFAULT_SAMPLE_COUNT, seed, SamplingMode::Complex)
    }

    /// Explicit real points; each is normalized. Zero vectors are rejected.
    pub fn from_real_points(n: usize, pts: &[Vec<f64>]) -> Result<Self> {
        let points = pts
            .iter()
            .map(|p| {
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "sample point length",
                        expected: n,
                        got: p.len(),
                    });
                }
                normalized(p.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                    .ok_or_else(|| Error::InvalidArgument("zero sample point".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SphereSampling {
            n,
            quasi_count: 0,
            seed: 0,
            mode: SamplingMode::Real,
            points,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn mode(&self) -> SamplingMode {
        self.mode
    }
    /// Total number of points, including the structured augmentation.
    pub fn count(&self) -> usize {
        self.points.len()
    }
    pub fn quasi_count(&self) -> usize {
        self.quasi_count
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn complex_points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    /// Real parts of the points (exact in real mode).
    pub fn real_points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.points.iter().map(|p| p.iter().map(|z| z.re).collect())
    }
}

fn normalized(p: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let norm = libm::sqrt(p.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if !(norm > 1e-300) || !norm.is_finite() {
        return None;
    }
    Some(p.into_iter().map(|z| z / norm).collect())
}

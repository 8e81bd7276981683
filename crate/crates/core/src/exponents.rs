use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check(p: f64, n: usize) -> Result<()> {
    if !(p >= 1.0 && p < n as f64) || !p.is_finite() {
        return Err(Error::ExponentOutOfRange { p, n });
    }
    Ok(())
}

/// Sobolev conjugate `p* = np / (n − p)` for `1 ≤ p < n`.
pub fn sobolev_conjugate(p: f64, n: usize) -> Result<f64> {
    check(p, n)?;
    let n = n as f64;
    Ok(n * p / (n - p))
}

/// Exponents of the duality step: `q = np / (np − n + p)` is the exponent
/// whose Sobolev embedding `Ẇ^{1,q} ↪ L^{nq/(n−q)}` dualizes to
/// `L^p ↪ Ẇ^{−1,q'}` with `q' = q/(q−1) = p*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualChain {
    pub p: f64,
    pub n: usize,
    pub q: f64,
    pub q_dual: f64,
    pub p_star: f64,
}

pub fn dual_exponent_chain(p: f64, n: usize) -> Result<DualChain> {
    let p_star = sobolev_conjugate(p, n)?;
    let nf = n as f64;
    let q = nf * p / (nf * p - nf + p);
    Ok(DualChain {
        p,
        n,
        q,
        q_dual: q / (q - 1.0),
        p_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert_eq!(sobolev_conjugate(2.0, 3).unwrap(), 6.0);
        assert_eq!(sobolev_conjugate(1.0, 3).unwrap(), 1.5);
        let c = dual_exponent_chain(2.0, 3).unwrap();
        assert!((c.q - 1.2).abs() < 1e-15);
        assert!((c.q_dual - 6.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        assert!(sobolev_conjugate(3.0, 3).is_err());
        assert!(sobolev_conjugate(0.5, 3).is_err());
        assert!(dual_exponent_chain(f64::NAN, 3).is_err());
    }
}

//! The low-order Meijer-G reductions with elementary or incomplete-gamma forms.

use super::gamma::lower_incomplete_gamma;
use crate::error::{Error, Result};

/// G^{1,0}_{0,1}[z | -; b] = z^b e^{-z}.
pub fn meijer_g_1012(z: f64, b: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Domain {
            func: "meijer_g_1012",
            reason: format!("z = {z} must be >= 0"),
        });
    }
    if z == 0.0 {
        return if b > 0.0 {
            Ok(0.0)
        } else if b == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::Domain {
                func: "meijer_g_1012",
                reason: format!("z = 0 with b = {b} < 0"),
            })
        };
    }
    Ok((b * z.ln() - z).exp())
}

/// G^{1,1}_{1,2}[z | 1; u, 0] = γ(u, z).
pub fn meijer_g_1112(z: f64, u: f64) -> Result<f64> {
    lower_incomplete_gamma(u, z)
}

/// The parameter list Δ(k, a) = {a/k, (a+1)/k, ..., (a+k-1)/k}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSeq {
    k: u32,
    a: f64,
}

impl DeltaSeq {
    pub fn new(k: u32, a: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain {
                func: "DeltaSeq::new",
                reason: "k must be positive".into(),
            });
        }
        Ok(Self { k, a })
    }

    pub fn len(&self) -> usize {
        self.k as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(move |j| (self.a + j as f64) / self.k as f64)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }
}

//! Mixture exponential-generalized-Gamma SNR of the optical hop.

use crate::params::{electrical_snr, megg_kernel_constants, MeggBranch, MeggParams};
use crate::specfun::gamma::reg_pq;

#[derive(Debug, Clone)]
pub struct MeggDist {
    params: MeggParams,
    branches: [MeggBranch; 2],
    omega: f64,
    a: f64,
}

impl MeggDist {
    pub fn new(params: &MeggParams) -> Self {
        Self {
            params: *params,
            branches: megg_kernel_constants(params),
            omega: params.omega(),
            a: params.a(),
        }
    }

    pub fn params(&self) -> &MeggParams {
        &self.params
    }

    pub fn branches(&self) -> &[MeggBranch; 2] {
        &self.branches
    }

    /// Branches with nonzero weight.
    pub fn active_branches(&self) -> impl Iterator<Item = (usize, &MeggBranch)> {
        self.branches.iter().enumerate().filter(|(_, b)| b.s != 0.0)
    }

    pub fn electrical_snr(&self) -> f64 {
        electrical_snr(&self.params)
    }

    pub fn knees(&self) -> [f64; 2] {
        self.params.knees()
    }

    fn arg(b: &MeggBranch, x: f64) -> f64 {
        b.n * x.powf(b.v)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let lx = x.ln();
        self.active_branches()
            .map(|(_, b)| {
                let ln_y = b.n.ln() + b.v * lx;
                b.m * (b.u * ln_y - ln_y.exp() - lx).exp()
            })
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let [b1, b2] = &self.branches;
        let mut f = self.omega * -(-Self::arg(b1, x)).exp_m1();
        if b2.s != 0.0 {
            f += (1.0 - self.omega) * reg_pq(self.a, Self::arg(b2, x)).0;
        }
        f
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let [b1, b2] = &self.branches;
        let mut s = self.omega * (-Self::arg(b1, x)).exp();
        if b2.s != 0.0 {
            s += (1.0 - self.omega) * reg_pq(self.a, Self::arg(b2, x)).1;
        }
        s
    }

    /// CDF of one branch scaled by its weight, S_i·γ(U_i, N_i x^V_i).
    pub fn branch_cdf(&self, i: usize, x: f64) -> f64 {
        let b = &self.branches[i];
        if x <= 0.0 || b.s == 0.0 {
            return 0.0;
        }
        let w = if i == 0 { self.omega } else { 1.0 - self.omega };
        w * reg_pq(b.u, Self::arg(b, x)).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Detection;
    use crate::specfun::Quadrature;
    use approx::assert_relative_eq;

    #[test]
    fn pure_exponential() {
        let p = MeggParams::new(1.0, 0.7, 1.0, 1.0, 1.0, Detection::Hd, 3.0).unwrap();
        let d = MeggDist::new(&p);
        for x in [0.1, 1.0, 5.0] {
            assert_relative_eq!(d.pdf(x), (-x / 2.1f64).exp() / 2.1, max_relative = 1e-14);
            assert_relative_eq!(d.cdf(x), -(-x / 2.1f64).exp_m1(), max_relative = 1e-14);
        }
    }

    #[test]
    fn normalizes() {
        let p = MeggParams::new(0.5, 0.3, 1.5, 1.2, 0.9, Detection::ImDd, 10.0).unwrap();
        let d = MeggDist::new(&p);
        let r = Quadrature::new()
            .tol_rel(1e-11)
            .breakpoints(d.knees())
            .semi_infinite(|x| d.pdf(x))
            .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
        assert_relative_eq!(d.cdf(2.0) + d.sf(2.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn branch_cdfs_add_up() {
        let p = MeggParams::new(0.21, 0.33, 1.43, 1.98, 0.47, Detection::Hd, 10.0).unwrap();
        let d = MeggDist::new(&p);
        assert_relative_eq!(
            d.branch_cdf(0, 5.0) + d.branch_cdf(1, 5.0),
            d.cdf(5.0),
            max_relative = 1e-15
        );
    }
}

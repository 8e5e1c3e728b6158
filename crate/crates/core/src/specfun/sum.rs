/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Σ|x_i|, a scale for rounding-error bounds.
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}

impl std::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Neumaier::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_low_bits() {
        let s: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
        assert_eq!(s.abs_sum(), 2e100 + 2.0);
    }
}

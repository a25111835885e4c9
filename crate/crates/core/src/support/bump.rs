//! Smooth compactly supported bumps `A·b((x − c)/w)` with
//! `b(s) = exp(1 − 1/(1 − s²))` on `|s| < 1`, so `b(0) = 1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: f64, width: f64, amplitude: f64) -> Self {
        Self { center, width, amplitude }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// Value and first two derivatives at `x`.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        let s = (x - self.center) / self.width;
        if s.abs() >= 1.0 {
            return [0.0; 3];
        }
        let q = 1.0 - s * s;
        let b = (1.0 - 1.0 / q).exp();
        let g1 = -2.0 * s / (q * q);
        let g2 = -2.0 * (1.0 + 3.0 * s * s) / (q * q * q);
        let w = self.width;
        let a = self.amplitude;
        [a * b, a * g1 * b / w, a * (g2 + g1 * g1) * b / (w * w)]
    }
}

/// Sum of bump jets.
pub fn sum_jet(bumps: &[Bump], x: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for b in bumps {
        let j = b.jet(x);
        for k in 0..3 {
            out[k] += j[k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let b = Bump::new(0.3, 0.7, -1.3);
        for &x in &[-0.2, 0.1, 0.35, 0.8] {
            let h = 1e-6;
            let j = b.jet(x);
            let d1 = (b.jet(x + h)[0] - b.jet(x - h)[0]) / (2.0 * h);
            let d2 = (b.jet(x + h)[1] - b.jet(x - h)[1]) / (2.0 * h);
            assert!((j[1] - d1).abs() < 1e-6);
            assert!((j[2] - d2).abs() < 1e-5);
        }
        assert_eq!(b.jet(1.0), [0.0; 3]);
        assert!((b.jet(0.3)[0] + 1.3).abs() < 1e-15);
    }
}

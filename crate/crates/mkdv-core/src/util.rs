//! Small shared helpers.

/// SplitMix64: tiny deterministic generator for sampling-style tests and
/// randomized grids. Not cryptographic.
#[derive(Debug, Clone)]
pub struct SmallRng(u64);

impl SmallRng {
    pub fn new(seed: u64) -> Self {
        SmallRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Linear interpolation of tabulated values; clamps outside the table.
pub fn interp1(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.is_empty() {
        return 0.0;
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let j = xs.partition_point(|&v| v <= x).min(xs.len() - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    ys[j - 1] + w * (ys[j] - ys[j - 1])
}

/// Finite-difference weights for the `m`-th derivative at `0` on the given
/// stencil offsets (Fornberg's recursion).
pub fn fd_weights(offsets: &[f64], m: usize) -> Vec<f64> {
    let n = offsets.len();
    debug_assert!(m < n);
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Residual `q_t + 6q²q_x + q_xxx` of a closed-form field, measured with
/// sixth-order central differences (steps `hx`, `ht`).
pub fn mkdv_residual<F: Fn(f64, f64) -> f64>(q: F, x: f64, t: f64, hx: f64, ht: f64) -> f64 {
    let off: Vec<f64> = (-4..=4).map(|i| i as f64).collect();
    let w1 = fd_weights(&off, 1);
    let w3 = fd_weights(&off, 3);
    let mut qt = 0.0;
    let mut qx = 0.0;
    let mut qxxx = 0.0;
    for (i, &o) in off.iter().enumerate() {
        qt += w1[i] * q(x, t + o * ht);
        let v = q(x + o * hx, t);
        qx += w1[i] * v;
        qxxx += w3[i] * v;
    }
    qt /= ht;
    qx /= hx;
    qxxx /= hx * hx * hx;
    let q0 = q(x, t);
    qt + 6.0 * q0 * q0 * qx + qxxx
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_uniformish() {
        let mut rng = SmallRng::new(7);
        let n = 10_000;
        let mean: f64 = (0..n).map(|_| rng.next_f64()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn interp_endpoints_and_middle() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 10.0, 0.0];
        assert_eq!(interp1(&xs, &ys, -1.0), 0.0);
        assert_eq!(interp1(&xs, &ys, 3.0), 0.0);
        assert!((interp1(&xs, &ys, 0.5) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn fd_weights_exact_on_polynomials() {
        let off: Vec<f64> = (-4..=4).map(|i| i as f64).collect();
        let w1 = fd_weights(&off, 1);
        let w3 = fd_weights(&off, 3);
        // Differentiate x^5 at x = 2 exactly (degree < stencil order + m).
        let f = |x: f64| x.powi(5);
        let h = 0.5;
        let d1: f64 = off
            .iter()
            .zip(&w1)
            .map(|(&o, &w)| w * f(2.0 + o * h))
            .sum::<f64>()
            / h;
        let d3: f64 = off
            .iter()
            .zip(&w3)
            .map(|(&o, &w)| w * f(2.0 + o * h))
            .sum::<f64>()
            / (h * h * h);
        assert!((d1 - 5.0 * 16.0).abs() < 1e-9, "d1 = {d1}");
        assert!((d3 - 60.0 * 4.0).abs() < 1e-8, "d3 = {d3}");
    }

    #[test]
    fn residual_vanishes_on_constant() {
        // Weight rounding is amplified by 1/h³; constant fields stay below
        // that floor.
        let r = mkdv_residual(|_, _| 0.7, 1.0, 2.0, 1e-2, 1e-2);
        assert!(r.abs() < 1e-8, "r = {r}");
    }

    #[test]
    fn fit_recovers_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 2.0).collect();
        let (a, b) = linear_fit(&xs, &ys);
        assert!((a - 3.0).abs() < 1e-12 && (b + 2.0).abs() < 1e-10);
    }
}

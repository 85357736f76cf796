//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

pub struct Quad {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Quad {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self { x, w }
    }

    pub fn interval(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
    }

    /// Composite rule on `[a, b]` split at `breaks` and then into `sub` equal parts.
    pub fn piecewise(&self, a: f64, b: f64, breaks: &[f64], sub: usize, f: &mut impl FnMut(f64) -> f64) -> f64 {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
        pts.push(a);
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut total = 0.0;
        for seg in pts.windows(2) {
            let h = (seg[1] - seg[0]) / sub as f64;
            for s in 0..sub {
                let lo = seg[0] + s as f64 * h;
                total += self.interval(lo, lo + h, f);
            }
        }
        total
    }
}

/// `r`-fold convolution of the indicator of `[-u/2, u/2)`, by recursive
/// quadrature split at the knots of the inner factor.
pub fn conv_hat(q: &Quad, r: u32, x: f64, u: f64) -> f64 {
    if r == 1 {
        return if (-u / 2.0..u / 2.0).contains(&x) { 1.0 } else { 0.0 };
    }
    let inner = r - 1;
    let knots: Vec<f64> = (0..=inner)
        .map(|k| x - (k as f64 - inner as f64 / 2.0) * u)
        .collect();
    q.piecewise(-u / 2.0, u / 2.0, &knots, 1, &mut |t| conv_hat(q, inner, x - t, u))
}

/// `∫ h(x) e^{-2πixy} dx` for an even kernel supported in `[-s, s]` with the given knots.
pub fn fourier_even(q: &Quad, s: f64, knots: &[f64], y: f64, h: &mut impl FnMut(f64) -> f64) -> f64 {
    q.piecewise(-s, s, knots, 64, &mut |x| h(x) * (2.0 * std::f64::consts::PI * x * y).cos())
}

/// `sup_b |∏ b_j - #{ξ ∈ [0,b)}/m|` for `d = 2` as the maximum over
/// one-sided limits at every corner of the coordinate grid.
pub fn star_brute_2d(pts: &[[f64; 2]]) -> f64 {
    let mut c: Vec<[f64; 2]> = Vec::new();
    let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).chain([0.0, 1.0]).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p[1]).chain([0.0, 1.0]).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    xs.dedup();
    ys.dedup();
    for &x in &xs {
        for &y in &ys {
            c.push([x, y]);
        }
    }
    let m = pts.len() as f64;
    let mut best = 0.0f64;
    for b in c {
        // direction per coordinate: false = limit from below (strict), true = from above
        for dirs in [[false, false], [false, true], [true, false], [true, true]] {
            if (dirs[0] && b[0] >= 1.0) || (dirs[1] && b[1] >= 1.0) {
                continue;
            }
            let inside = |p: &[f64; 2]| {
                (0..2).all(|j| if dirs[j] { p[j] <= b[j] } else { p[j] < b[j] })
            };
            let count = pts.iter().filter(|p| inside(p)).count() as f64;
            best = best.max((b[0] * b[1] - count / m).abs());
        }
    }
    best
}

/// Deterministic uniform stream for test inputs.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

//! FFT plumbing on a [`SpatialGrid`]: spectral derivatives, Fourier-space
//! phases, and band-limited evaluation of a sampled function at dilated
//! points via a chirp-z (Bluestein) transform.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::oscillator::SpatialGrid;

#[derive(Clone)]
pub struct Spectral {
    grid: SpatialGrid,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward2: Arc<dyn Fft<f64>>,
    inverse2: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &SpatialGrid) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        Spectral {
            grid: *grid,
            wavenumbers: grid.wavenumbers(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            forward2: planner.plan_fft_forward(2 * n),
            inverse2: planner.plan_fft_inverse(2 * n),
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the 1/N factor, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Multiplies by `phase(k)` in Fourier space.
    pub fn apply_fourier_multiplier(&self, data: &mut [Complex64], multiplier: impl Fn(f64) -> Complex64) {
        self.forward(data);
        for (v, &k) in data.iter_mut().zip(&self.wavenumbers) {
            *v *= multiplier(k);
        }
        self.inverse(data);
    }

    /// −i d/dx, with the unpaired Nyquist mode dropped.
    pub fn minus_i_derivative(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        let nyquist = self.grid.n_points() / 2;
        self.forward(&mut out);
        for (m, (v, &k)) in out.iter_mut().zip(&self.wavenumbers).enumerate() {
            *v *= if m == nyquist { 0.0 } else { k };
        }
        self.inverse(&mut out);
        out
    }

    /// Fraction of the spectral weight at |k| > `k_cut`.
    pub fn spectral_weight_beyond(&self, data: &[Complex64], k_cut: f64) -> f64 {
        let mut buf = data.to_vec();
        self.forward(&mut buf);
        let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outer: f64 = buf
            .iter()
            .zip(&self.wavenumbers)
            .filter(|(_, k)| k.abs() > k_cut)
            .map(|(v, _)| v.norm_sqr())
            .sum();
        outer / total
    }

    /// Evaluates the trigonometric interpolant of `data` at `scale`·xⱼ for
    /// every grid point xⱼ. Points whose image falls outside the grid are
    /// set to zero rather than wrapped onto the periodic copy.
    pub fn sample_dilated(&self, data: &[Complex64], scale: f64) -> Vec<Complex64> {
        self.sample_dilated_offset(data, scale - 1.0)
    }

    /// As [`Self::sample_dilated`] with scale 1 + `delta`. The chirp phases
    /// π(1+δ)j²/N reach ~πN radians; the integer part is reduced mod 2π
    /// exactly so the small dilations of a propagation step keep full
    /// precision.
    fn sample_dilated_offset(&self, data: &[Complex64], delta: f64) -> Vec<Complex64> {
        let scale = 1.0 + delta;
        let n = self.grid.n_points();
        let half = (n / 2) as i64;
        let m2 = 2 * n;

        // Fourier coefficients uₘ, m ∈ [−N/2, N/2), stored at p = m + N/2, with
        // ψ(x) = Σ uₘ exp(i m dk x).
        let mut coeffs = data.to_vec();
        self.forward(&mut coeffs);
        let inv_n = 1.0 / n as f64;
        let period = 2 * n as i64;
        let phase = |j: i64| {
            let sq = j * j;
            PI * (sq % period) as f64 / n as f64 + PI * delta * sq as f64 / n as f64
        };
        let chirp = |j: i64| Complex64::from_polar(1.0, phase(j));

        let mut a = vec![Complex64::new(0.0, 0.0); m2];
        for p in 0..n {
            let m = p as i64 - half;
            // modes pushed past the Nyquist frequency by s > 1 would fold
            // back into the band and the map would stop being a
            // contraction; the unpaired Nyquist mode has no faithful
            // off-grid interpolant either
            if m == -half || m.abs() as f64 * scale >= half as f64 {
                continue;
            }
            let c = coeffs[m.rem_euclid(n as i64) as usize];
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            a[p] = c * (sign * inv_n) * chirp(m);
        }

        // m·j = (m² + j² − (j−m)²)/2 turns the sum into a convolution.
        let mut kernel = vec![Complex64::new(0.0, 0.0); m2];
        kernel[0] = Complex64::new(1.0, 0.0);
        for d in 1..n {
            let w = chirp(d as i64).conj();
            kernel[d] = w;
            kernel[m2 - d] = w;
        }

        self.forward2.process(&mut a);
        self.forward2.process(&mut kernel);
        for (x, k) in a.iter_mut().zip(&kernel) {
            *x *= k;
        }
        self.inverse2.process(&mut a);
        let inv_m2 = 1.0 / m2 as f64;

        let x_max = self.grid.x_max();
        let x_min = self.grid.x_min();
        (0..n)
            .map(|q| {
                let j = q as i64 - half;
                let image = scale * self.grid.x(q);
                if image < x_min || image >= x_max {
                    Complex64::new(0.0, 0.0)
                } else {
                    a[q] * inv_m2 * chirp(j)
                }
            })
            .collect()
    }

    /// The dilation e^(λ/2)·ψ(e^λ x) for small λ as four alternating
    /// shears, a position chirp e^{icx²/2} and a free drift e^{−ibk²/2}
    /// each:
    ///
    ///   diag(a, 1/a) = L(c)·U((1−a)/(ac))·L(−ac)·U((a−1)/(a²c)),  a = e^{−λ},
    ///
    /// with c free, chosen so chirp and drift act on the grid with equal
    /// relative strength √|a−1|. Every factor is a pure phase in x or k,
    /// so the step is unitary on the grid to rounding. The sampled
    /// dilation is not, and repeated small steps amplify rounding noise.
    pub fn dilate_by_shears(&self, data: &mut [Complex64], lambda: f64) {
        if lambda == 0.0 {
            return;
        }
        let am1 = (-lambda).exp_m1();
        let a = 1.0 + am1;
        let c1 = am1.abs().sqrt() * self.grid.k_max() / self.grid.x_max();
        let b1 = -am1 / (a * c1);
        let c2 = -a * c1;
        let b2 = am1 / (a * a * c1);
        // operators act right to left: U(b2) first
        self.apply_fourier_multiplier(data, |k| Complex64::from_polar(1.0, -0.5 * b2 * k * k));
        self.chirp(data, c2);
        self.apply_fourier_multiplier(data, |k| Complex64::from_polar(1.0, -0.5 * b1 * k * k));
        self.chirp(data, c1);
    }

    fn chirp(&self, data: &mut [Complex64], c: f64) {
        for (v, x) in data.iter_mut().zip(self.grid.points()) {
            *v *= Complex64::from_polar(1.0, 0.5 * c * x * x);
        }
    }

    /// Dilation e^(λ/2)·ψ(e^λ x) by resampling the interpolant; suited to
    /// single large rescalings.
    pub fn dilate(&self, data: &[Complex64], lambda: f64) -> Vec<Complex64> {
        if lambda == 0.0 {
            return data.to_vec();
        }
        let amp = (0.5 * lambda).exp();
        let mut out = self.sample_dilated_offset(data, lambda.exp_m1());
        out.iter_mut().for_each(|v| *v *= amp);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &SpatialGrid, width: f64, k0: f64) -> Vec<Complex64> {
        grid.points()
            .map(|x| Complex64::from_polar((-x * x / (2.0 * width * width)).exp(), k0 * x))
            .collect()
    }

    #[test]
    fn unit_scale_is_identity() {
        let grid = SpatialGrid::new(20.0, 256).unwrap();
        let sp = Spectral::new(&grid);
        let f = gaussian(&grid, 1.3, 0.7);
        let g = sp.sample_dilated(&f, 1.0);
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dilated_samples_match_analytic() {
        let grid = SpatialGrid::new(20.0, 256).unwrap();
        let sp = Spectral::new(&grid);
        let f = gaussian(&grid, 1.0, 0.5);
        for &s in &[0.37, 0.999, 1.0003, 2.4] {
            let g = sp.sample_dilated(&f, s);
            for (x, v) in grid.points().zip(&g) {
                let y = s * x;
                let exact = if y.abs() < 20.0 {
                    Complex64::from_polar((-y * y / 2.0).exp(), 0.5 * y)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((v - exact).norm() < 1e-11, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn shear_dilation_matches_resampling() {
        let grid = SpatialGrid::new(40.0, 1024).unwrap();
        let sp = Spectral::new(&grid);
        let f = gaussian(&grid, 1.3, 0.4);
        for lambda in [1e-4, -3e-4, 0.02, -0.05] {
            let reference = sp.dilate(&f, lambda);
            let mut g = f.clone();
            sp.dilate_by_shears(&mut g, lambda);
            let err = g.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "lambda={lambda}: {err:e}");
        }
    }

    #[test]
    fn repeated_shear_dilations_stay_unitary() {
        // arbitrary grid-filling data: no smoothness to lean on
        let grid = SpatialGrid::new(50.0, 1024).unwrap();
        let sp = Spectral::new(&grid);
        let mut f: Vec<Complex64> =
            (0..1024).map(|j| Complex64::new(((j * 7919) % 13) as f64 - 6.0, ((j * 31) % 7) as f64 - 3.0)).collect();
        let n0: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        for i in 0..4000 {
            sp.dilate_by_shears(&mut f, if i % 2 == 0 { 1e-2 } else { -1e-4 });
        }
        let n1: f64 = f.iter().map(|v| v.norm_sqr()).sum();
        assert!((n1 / n0 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn derivative_of_plane_wave_gaussian() {
        let grid = SpatialGrid::new(20.0, 256).unwrap();
        let sp = Spectral::new(&grid);
        let f = gaussian(&grid, 1.0, 0.0);
        let d = sp.minus_i_derivative(&f);
        for ((x, v), f) in grid.points().zip(&d).zip(&f) {
            // −i d/dx e^{−x²/2} = i x e^{−x²/2}
            let exact = Complex64::new(0.0, x) * f;
            assert!((v - exact).norm() < 1e-11);
        }
    }
}

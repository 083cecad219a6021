//! Periodic spectral discretization of the line.
//!
//! The box is `[-L, L)` sampled at `n` points. Wavenumbers follow the usual
//! FFT ordering: `m = 0, 1, .., n/2 - 1, -n/2, .., -1` and `k = m * pi / L`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const MIN_POINTS: usize = 8;

/// Uniform periodic grid with cached transform plans.
pub struct Grid {
    n: usize,
    half_length: f64,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
    dealias_mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

/// Builds the grid on `[-L, L)` with `n` points.
pub fn make_grid(n: usize, half_length: f64) -> Result<Arc<Grid>> {
    Grid::new(n, half_length)
}

impl Grid {
    pub fn new(n: usize, half_length: f64) -> Result<Arc<Grid>> {
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_POINTS} points, got {n}")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("point count must be even, got {n}")));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("half-length must be positive, got {half_length}")));
        }
        let dx = 2.0 * half_length / n as f64;
        let x = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let k = (0..n).map(|j| mode_index(j, n) as f64 * PI / half_length).collect();
        let dealias_mask = (0..n).map(|j| 3 * mode_index(j, n).unsigned_abs() < n as u64).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid { n, half_length, dx, x, k, dealias_mask, forward, inverse }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias_mask
    }

    /// Index of the Nyquist mode in FFT ordering.
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Largest |k| on the grid.
    pub fn k_max(&self) -> f64 {
        self.n as f64 / 2.0 * PI / self.half_length
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform including the 1/n factor.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        for v in spectrum.iter_mut() {
            *v *= scale;
        }
        spectrum
    }

    /// Applies a Fourier multiplier given per mode index.
    pub fn multiply<F>(&self, values: &[Complex64], multiplier: F) -> Vec<Complex64>
    where
        F: Fn(usize, f64) -> Complex64,
    {
        let mut spec = self.forward(values);
        for (j, v) in spec.iter_mut().enumerate() {
            *v *= multiplier(j, self.k[j]);
        }
        self.inverse(spec)
    }

    pub(crate) fn derivative_raw(&self, values: &[Complex64]) -> Vec<Complex64> {
        let nyq = self.nyquist();
        self.multiply(values, |j, k| if j == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k) })
    }

    /// `-d^2/dx^2` built as the adjoint of the Nyquist-free derivative, so that it is
    /// the exact gradient of the discrete kinetic energy.
    pub(crate) fn neg_laplacian_raw(&self, values: &[Complex64]) -> Vec<Complex64> {
        let nyq = self.nyquist();
        self.multiply(values, |j, k| Complex64::new(if j == nyq { 0.0 } else { k * k }, 0.0))
    }

    pub(crate) fn abs_derivative_raw(&self, values: &[Complex64]) -> Vec<Complex64> {
        let nyq = self.nyquist();
        self.multiply(values, |j, k| Complex64::new(if j == nyq { 0.0 } else { k.abs() }, 0.0))
    }

    pub(crate) fn dealias_raw(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut spec = self.forward(values);
        for (v, &keep) in spec.iter_mut().zip(&self.dealias_mask) {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse(spec)
    }

    /// `dx * sum f conj(g)`.
    pub(crate) fn inner_raw(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * self.dx
    }
}

fn mode_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Complex samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.n() {
            return Err(Error::InvalidField(format!("expected {} samples, got {}", grid.n(), values.len())));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidField(format!("non-finite sample at index {j}")));
        }
        Ok(Field { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<Complex64>) -> Field {
        debug_assert_eq!(values.len(), grid.n());
        Field { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Field {
        let n = grid.n();
        Field { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_real(grid: Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        Field::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples a real function at the grid abscissae.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<Grid>, f: F) -> Result<Field> {
        let values = grid.x().iter().map(|&x| f(x)).collect();
        Field::from_real(grid, values)
    }

    /// Samples a complex function at the grid abscissae.
    pub fn from_complex_fn<F: Fn(f64) -> Complex64>(grid: Arc<Grid>, f: F) -> Result<Field> {
        let values = grid.x().iter().map(|&x| f(x)).collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `sqrt(<f, f>)`.
    pub fn norm_l2(&self) -> f64 {
        self.grid.inner_raw(&self.values, &self.values).re.sqrt()
    }

    pub fn scale(&self, s: f64) -> Field {
        Field::from_parts(self.grid.clone(), self.values.iter().map(|v| v * s).collect())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Field {
        Field::from_parts(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn map_indexed<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Field {
        let values = self.values.iter().enumerate().map(|(j, &v)| f(j, v)).collect();
        Field::from_parts(self.grid.clone(), values)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        same_grid(self, other)?;
        Ok(Field::from_parts(self.grid.clone(), self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        same_grid(self, other)?;
        Ok(Field::from_parts(self.grid.clone(), self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    /// Spectral coefficients (unnormalized FFT).
    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    pub fn from_spectrum(grid: Arc<Grid>, spectrum: Vec<Complex64>) -> Result<Field> {
        if spectrum.len() != grid.n() {
            return Err(Error::InvalidField("spectrum length differs from grid".into()));
        }
        let values = grid.inverse(spectrum);
        Field::new(grid, values)
    }
}

pub(crate) fn same_grid(f: &Field, g: &Field) -> Result<()> {
    if Arc::ptr_eq(&f.grid, &g.grid) || *f.grid == *g.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Hilbert transform with multiplier `-i sgn(k)`; the mean and the Nyquist mode are annihilated.
pub fn hilbert(f: &Field) -> Field {
    let g = &f.grid;
    let nyq = g.nyquist();
    let values = g.multiply(&f.values, |j, k| {
        if j == nyq || k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -k.signum())
        }
    });
    Field::from_parts(g.clone(), values)
}

/// Multiplier `|k|^s`, with `0^0 = 1`.
pub fn frac_derivative(f: &Field, s: f64) -> Result<Field> {
    if !(s >= 0.0) {
        return Err(Error::NegativeOrder(s));
    }
    let values = f.grid.multiply(&f.values, |_, k| {
        let m = if s == 0.0 { 1.0 } else { k.abs().powf(s) };
        Complex64::new(m, 0.0)
    });
    Ok(Field::from_parts(f.grid.clone(), values))
}

/// Spectral first derivative, Nyquist zeroed.
pub fn derivative(f: &Field) -> Field {
    Field::from_parts(f.grid.clone(), f.grid.derivative_raw(&f.values))
}

/// Spectral second derivative, multiplier `-k^2`.
pub fn second_derivative(f: &Field) -> Field {
    let values = f.grid.multiply(&f.values, |_, k| Complex64::new(-k * k, 0.0));
    Field::from_parts(f.grid.clone(), values)
}

/// `<f, g> = dx * sum f conj(g)`.
pub fn inner(f: &Field, g: &Field) -> Result<Complex64> {
    same_grid(f, g)?;
    Ok(f.grid.inner_raw(&f.values, &g.values))
}

/// Same inner product evaluated on spectral coefficients.
pub fn spectral_inner(f: &Field, g: &Field) -> Result<Complex64> {
    same_grid(f, g)?;
    let a = f.spectrum();
    let b = g.spectrum();
    let s: Complex64 = a.iter().zip(&b).map(|(p, q)| p * q.conj()).sum();
    Ok(s * f.grid.dx / f.grid.n as f64)
}

/// Zeroes the top third of modes.
pub fn dealias(f: &Field) -> Field {
    Field::from_parts(f.grid.clone(), f.grid.dealias_raw(&f.values))
}

/// Periodic translation `f(x - s)` by spectral interpolation.
pub fn shift(f: &Field, s: f64) -> Field {
    let g = &f.grid;
    let nyq = g.nyquist();
    let values = g.multiply(&f.values, |j, k| {
        if j == nyq {
            Complex64::new((k * s).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -k * s)
        }
    });
    Field::from_parts(g.clone(), values)
}

/// Hilbert transform of the samples viewed as a sequence on the whole line
/// (zero outside the box), using the band-limited kernel `2/(pi m)` for odd `m`.
///
/// Unlike [`hilbert`], this is not periodic, so it carries no wrap-around images.
pub fn line_hilbert(f: &Field) -> Field {
    let g = &f.grid;
    let n = g.n;
    let len = 2 * n;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut kernel = vec![Complex64::new(0.0, 0.0); len];
    for m in (1..n).step_by(2) {
        let h = 2.0 / (PI * m as f64);
        kernel[m] = Complex64::new(h, 0.0);
        kernel[len - m] = Complex64::new(-h, 0.0);
    }
    let mut data = vec![Complex64::new(0.0, 0.0); len];
    data[..n].copy_from_slice(&f.values);
    fwd.process(&mut kernel);
    fwd.process(&mut data);
    for (d, k) in data.iter_mut().zip(&kernel) {
        *d *= k;
    }
    inv.process(&mut data);
    let scale = 1.0 / len as f64;
    let values = data[..n].iter().map(|v| v * scale).collect();
    Field::from_parts(g.clone(), values)
}

/// Trapezoid (equivalently, periodic rectangle) quadrature of the samples.
pub fn integrate(f: &Field) -> Complex64 {
    f.values.iter().sum::<Complex64>() * f.grid.dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, l: f64) -> Arc<Grid> {
        make_grid(n, l).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values.iter().zip(&b.values).fold(0.0, |m, (p, q)| m.max((p - q).norm()))
    }

    #[test]
    fn grid_spacing_and_wavenumbers() {
        let g = grid(8, PI);
        assert!((g.dx() - PI / 4.0).abs() < 1e-15);
        assert!((g.x()[0] + PI).abs() < 1e-15);
        assert!((g.x()[1] + 3.0 * PI / 4.0).abs() < 1e-15);
        for (j, k) in g.k().iter().enumerate() {
            assert_eq!(*k, mode_index(j, 8) as f64);
        }
        let g = grid(16, 8.0);
        assert_eq!(g.dx(), 1.0);
        assert!((g.k()[1] - PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(make_grid(6, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(9, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, -1.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn dealias_mask_drops_top_third() {
        let g = grid(48, 1.0);
        let kept = g.dealias_mask().iter().filter(|&&b| b).count();
        // |m| <= 15 survive: 31 modes out of 48
        assert_eq!(kept, 31);
        for (j, &keep) in g.dealias_mask().iter().enumerate() {
            assert_eq!(keep, mode_index(j, 48).abs() < 16);
        }
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let g = grid(64, PI);
        let f = Field::from_fn(g.clone(), |x| (3.0 * x).cos()).unwrap();
        let s = Field::from_fn(g.clone(), |x| (3.0 * x).sin()).unwrap();
        assert!(max_diff(&hilbert(&f), &s) < 1e-13);
        let c = Field::from_fn(g, |_| 2.5).unwrap();
        assert!(hilbert(&c).max_abs() < 1e-14);
    }

    #[test]
    fn hilbert_of_lorentzian() {
        for &l in &[100.0, 200.0] {
            let g = grid(4096, l);
            let f = Field::from_fn(g.clone(), |x| 2.0 / (1.0 + x * x)).unwrap();
            let want = Field::from_fn(g, |x| 2.0 * x / (1.0 + x * x)).unwrap();
            let err = max_diff(&hilbert(&f), &want);
            assert!(err < 4.0 / l, "L={l}: {err}");
        }
    }

    #[test]
    fn frac_derivative_cases() {
        let g = grid(64, PI);
        let f = Field::from_fn(g.clone(), |x| (5.0 * x).cos()).unwrap();
        let d = frac_derivative(&f, 1.0).unwrap();
        assert!(max_diff(&d, &f.scale(5.0)) < 1e-12);
        assert!(max_diff(&frac_derivative(&f, 0.0).unwrap(), &f) < 1e-14);
        assert!(matches!(frac_derivative(&f, -0.5), Err(Error::NegativeOrder(_))));
        let half = frac_derivative(&f, 0.5).unwrap();
        assert!(max_diff(&half, &f.scale(5f64.sqrt())) < 1e-12);
        let g2 = grid(128, 10.0);
        let h = Field::from_fn(g2, |x| (-x * x).exp() * (1.0 + 0.3 * x)).unwrap();
        let a = frac_derivative(&h, 1.0).unwrap();
        let b = derivative(&hilbert(&h));
        assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn derivative_cases() {
        let g = grid(64, PI);
        let f = Field::from_fn(g.clone(), |x| (4.0 * x).sin()).unwrap();
        let want = Field::from_fn(g.clone(), |x| 4.0 * (4.0 * x).cos()).unwrap();
        assert!(max_diff(&derivative(&f), &want) < 1e-12);
        assert!(derivative(&Field::from_fn(g, |_| 1.0).unwrap()).max_abs() < 1e-14);
        let g = grid(256, 20.0);
        let f = Field::from_fn(g.clone(), |x| (-x * x).exp()).unwrap();
        let want = Field::from_fn(g, |x| -2.0 * x * (-x * x).exp()).unwrap();
        assert!(max_diff(&derivative(&f), &want) < 1e-10);
    }

    #[test]
    fn second_derivative_of_sine() {
        let g = grid(64, PI);
        let f = Field::from_fn(g.clone(), |x| (4.0 * x).sin()).unwrap();
        assert!(max_diff(&second_derivative(&f), &f.scale(-16.0)) < 1e-11);
    }

    #[test]
    fn inner_product_cases() {
        let g = grid(64, PI);
        let c = Field::from_fn(g.clone(), |x| (2.0 * x).cos()).unwrap();
        let s = Field::from_fn(g.clone(), |x| (2.0 * x).sin()).unwrap();
        assert!(inner(&c, &s).unwrap().norm() < 1e-13);
        let cc = inner(&c, &c).unwrap();
        assert!(cc.im.abs() < 1e-14 && (cc.re - PI).abs() < 1e-12);
        let other = grid(32, PI);
        let z = Field::zeros(other);
        assert!(matches!(inner(&c, &z), Err(Error::GridMismatch)));
    }

    #[test]
    fn algebraic_profile_mass() {
        let g = grid(16384, 256.0);
        let f = Field::from_fn(g, |x| 2f64.sqrt() / (1.0 + x * x).sqrt()).unwrap();
        let m = inner(&f, &f).unwrap().re;
        // 2 * (2 atan(L)) from the antiderivative
        let want = 4.0 * 256f64.atan();
        assert!((m - want).abs() < 1e-3 * want);
        assert!((m - 2.0 * PI).abs() < 0.01 * 2.0 * PI);
    }

    #[test]
    fn dealias_is_idempotent_and_keeps_band_limited() {
        let g = grid(48, PI);
        let f = Field::from_fn(g.clone(), |x| (3.0 * x).cos() + (7.0 * x).sin()).unwrap();
        assert!(max_diff(&dealias(&f), &f) < 1e-13);
        let noisy = Field::from_fn(g.clone(), |x| ((x * 1e3).sin() * 1e4).fract()).unwrap();
        let once = dealias(&noisy);
        assert!(max_diff(&dealias(&once), &once) < 1e-13);
        let spec = once.spectrum();
        for (j, &keep) in g.dealias_mask().iter().enumerate() {
            if !keep {
                assert!(spec[j].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_matches_translation() {
        let g = grid(256, 20.0);
        let f = Field::from_fn(g.clone(), |x| (-(x * x)).exp()).unwrap();
        let want = Field::from_fn(g, |x| (-(x - 1.3) * (x - 1.3)).exp()).unwrap();
        assert!(max_diff(&shift(&f, 1.3), &want) < 1e-12);
    }

    #[test]
    fn line_hilbert_agrees_with_periodic_for_compact_data() {
        let g = grid(512, 40.0);
        let f = Field::from_fn(g, |x| x * (-(x * x)).exp()).unwrap();
        let a = line_hilbert(&f);
        let b = hilbert(&f);
        // the periodic version sees image copies only through the mean-free tails
        assert!(max_diff(&a, &b) < 1e-3);
    }

    #[test]
    fn line_hilbert_of_lorentzian_derivative() {
        // H(f') for f = 2/(1+x^2) is d/dx [2x/(1+x^2)] = 2(1-x^2)/(1+x^2)^2
        let g = grid(8192, 200.0);
        let f = Field::from_fn(g.clone(), |x| -4.0 * x / (1.0 + x * x).powi(2)).unwrap();
        let want = Field::from_fn(g.clone(), |x| 2.0 * (1.0 - x * x) / (1.0 + x * x).powi(2)).unwrap();
        let h = line_hilbert(&f);
        // the truncated tails only matter near the edges
        for ((a, b), x) in h.values().iter().zip(want.values()).zip(g.x()) {
            if x.abs() <= 100.0 {
                assert!((a - b).norm() < 1e-6);
            }
        }
    }
}

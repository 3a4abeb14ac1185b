//! Truncated Fourier model of the mean-zero H^{1/2} space on the circle.
//!
//! A [`CircleFunction`] stores the coefficients `c_n` for `0 < |n| <= N`;
//! the zero mode is absent, which is how the quotient by constants is
//! realised. Everything in the crate is built on this representation.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Uniform grid `theta_j = offset + 2 pi j / M`, `j = 0..M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    size: usize,
    offset: f64,
}

impl SampleGrid {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "grid needs at least one point");
        SampleGrid { size, offset: 0.0 }
    }

    /// Grid shifted by `offset`, which must lie in `[0, 2 pi / M)`.
    pub fn with_offset(size: usize, offset: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("grid size must be positive".into()));
        }
        let h = 2.0 * PI / size as f64;
        if !(0.0..h).contains(&offset) {
            return Err(Error::InvalidInput(format!(
                "grid offset {offset} outside [0, {h})"
            )));
        }
        Ok(SampleGrid { size, offset })
    }

    /// Grid shifted by half a cell.
    pub fn half_cell(size: usize) -> Self {
        SampleGrid {
            size,
            offset: PI / size as f64,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.offset + self.spacing() * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.point(j)).collect()
    }

    /// Largest bandlimit `analyze` accepts on this grid.
    pub fn max_bandlimit(&self) -> usize {
        (self.size - 1) / 2
    }

    /// Bandlimit this grid resolves with the fourfold oversampling margin.
    pub fn resolved_bandlimit(&self) -> usize {
        (self.size / 4).max(1)
    }
}

/// Truncated Fourier series `sum_{0<|n|<=N} c_n e^{i n theta}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFunction {
    real: bool,
    // pos[k-1] = c_k, neg[k-1] = c_{-k}
    pos: Vec<C64>,
    neg: Vec<C64>,
}

impl CircleFunction {
    pub fn zeros(bandlimit: usize, real: bool) -> Self {
        CircleFunction {
            real,
            pos: vec![C64::new(0.0, 0.0); bandlimit],
            neg: vec![C64::new(0.0, 0.0); bandlimit],
        }
    }

    /// Real function from `c_1..c_N`; negative modes are the conjugates.
    pub fn real_from_positive(coeffs: &[C64]) -> Self {
        CircleFunction {
            real: true,
            pos: coeffs.to_vec(),
            neg: coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Complex function from separate positive and negative mode vectors.
    pub fn from_parts(pos: Vec<C64>, neg: Vec<C64>) -> Result<Self> {
        if pos.len() != neg.len() {
            return Err(Error::Dimension(format!(
                "positive part has {} modes, negative part {}",
                pos.len(),
                neg.len()
            )));
        }
        Ok(CircleFunction {
            real: false,
            pos,
            neg,
        })
    }

    /// Builds a function from `(n, c_n)` pairs. Unlisted modes are zero.
    pub fn from_modes(bandlimit: usize, modes: &[(i64, C64)]) -> Result<Self> {
        let mut f = CircleFunction::zeros(bandlimit, false);
        for &(n, c) in modes {
            f.set(n, c)?;
        }
        Ok(f)
    }

    /// `cos(k theta)`.
    pub fn cos(k: usize, bandlimit: usize) -> Self {
        let mut pos = vec![C64::new(0.0, 0.0); bandlimit];
        pos[k - 1] = C64::new(0.5, 0.0);
        CircleFunction::real_from_positive(&pos)
    }

    /// `sin(k theta)`.
    pub fn sin(k: usize, bandlimit: usize) -> Self {
        let mut pos = vec![C64::new(0.0, 0.0); bandlimit];
        pos[k - 1] = C64::new(0.0, -0.5);
        CircleFunction::real_from_positive(&pos)
    }

    /// `e^{i k theta}` for `k != 0`.
    pub fn exp_mode(k: i64, bandlimit: usize) -> Self {
        let mut f = CircleFunction::zeros(bandlimit, false);
        f.set(k, C64::new(1.0, 0.0)).expect("mode within bandlimit");
        f
    }

    /// Random real trigonometric polynomial with coefficients drawn
    /// uniformly from the square of half-width `scale / n`.
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R, bandlimit: usize, scale: f64) -> Self {
        let pos: Vec<C64> = (1..=bandlimit)
            .map(|n| {
                let s = scale / n as f64;
                C64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
            })
            .collect();
        CircleFunction::real_from_positive(&pos)
    }

    pub fn bandlimit(&self) -> usize {
        self.pos.len()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn positive(&self) -> &[C64] {
        &self.pos
    }

    pub fn negative(&self) -> &[C64] {
        &self.neg
    }

    /// Coefficient `c_n`; zero for `n = 0` or beyond the bandlimit.
    pub fn coeff(&self, n: i64) -> C64 {
        let k = n.unsigned_abs() as usize;
        if n == 0 || k > self.pos.len() {
            return C64::new(0.0, 0.0);
        }
        if n > 0 {
            self.pos[k - 1]
        } else {
            self.neg[k - 1]
        }
    }

    /// Sets `c_n`. For real functions the partner `c_{-n}` follows.
    pub fn set(&mut self, n: i64, c: C64) -> Result<()> {
        let k = n.unsigned_abs() as usize;
        if n == 0 {
            return Err(Error::InvalidInput(
                "the zero mode is quotiented out".into(),
            ));
        }
        if k > self.pos.len() {
            return Err(Error::InvalidInput(format!(
                "mode {n} beyond bandlimit {}",
                self.pos.len()
            )));
        }
        let (this, other) = if n > 0 {
            (&mut self.pos, &mut self.neg)
        } else {
            (&mut self.neg, &mut self.pos)
        };
        this[k - 1] = c;
        if self.real {
            other[k - 1] = c.conj();
        }
        Ok(())
    }

    /// Iterates `(n, c_n)` over `n = -N..-1, 1..N`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let n = self.pos.len() as i64;
        (-n..=n)
            .filter(|&k| k != 0)
            .map(move |k| (k, self.coeff(k)))
    }

    /// Same function at a different bandlimit (truncating or zero-padding).
    pub fn resized(&self, bandlimit: usize) -> Self {
        let mut pos = self.pos.clone();
        let mut neg = self.neg.clone();
        pos.resize(bandlimit, C64::new(0.0, 0.0));
        neg.resize(bandlimit, C64::new(0.0, 0.0));
        CircleFunction {
            real: self.real,
            pos,
            neg,
        }
    }

    /// Drops the real flag (the function is unchanged).
    pub fn complexified(&self) -> Self {
        CircleFunction {
            real: false,
            ..self.clone()
        }
    }

    /// Projects onto real functions: `(f + conj f) / 2`.
    pub fn real_part(&self) -> Self {
        let pos: Vec<C64> = self
            .pos
            .iter()
            .zip(&self.neg)
            .map(|(p, q)| (p + q.conj()) * 0.5)
            .collect();
        CircleFunction::real_from_positive(&pos)
    }

    /// Pointwise complex conjugate: `c_n -> conj(c_{-n})`.
    pub fn conj(&self) -> Self {
        CircleFunction {
            real: self.real,
            pos: self.neg.iter().map(|c| c.conj()).collect(),
            neg: self.pos.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        CircleFunction {
            real: self.real && s.im == 0.0,
            pos: self.pos.iter().map(|c| c * s).collect(),
            neg: self.neg.iter().map(|c| c * s).collect(),
        }
    }

    /// Applies a Fourier multiplier `c_n -> m(n) c_n`.
    pub fn multiplier(&self, m: impl Fn(i64) -> C64, keeps_real: bool) -> Self {
        CircleFunction {
            real: self.real && keeps_real,
            pos: self
                .pos
                .iter()
                .enumerate()
                .map(|(k, c)| c * m(k as i64 + 1))
                .collect(),
            neg: self
                .neg
                .iter()
                .enumerate()
                .map(|(k, c)| c * m(-(k as i64) - 1))
                .collect(),
        }
    }

    /// Derivative in theta: `c_n -> i n c_n`.
    pub fn derivative(&self) -> Self {
        self.multiplier(|n| I * n as f64, true)
    }

    /// Point value `sum c_n e^{i n theta}` by direct summation.
    pub fn eval(&self, theta: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, (p, q)) in self.pos.iter().zip(&self.neg).enumerate() {
            let e = C64::from_polar(1.0, (k + 1) as f64 * theta);
            acc += p * e + q * e.conj();
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &CircleFunction) -> f64 {
        let n = self.bandlimit().max(other.bandlimit()) as i64;
        (-n..=n)
            .filter(|&k| k != 0)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.pos
            .iter()
            .chain(&self.neg)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &CircleFunction, op: impl Fn(C64, C64) -> C64) -> Self {
        let n = self.bandlimit().max(other.bandlimit());
        let a = self.resized(n);
        let b = other.resized(n);
        CircleFunction {
            real: self.real && other.real,
            pos: a.pos.iter().zip(&b.pos).map(|(x, y)| op(*x, *y)).collect(),
            neg: a.neg.iter().zip(&b.neg).map(|(x, y)| op(*x, *y)).collect(),
        }
    }
}

impl Add for &CircleFunction {
    type Output = CircleFunction;
    fn add(self, rhs: &CircleFunction) -> CircleFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CircleFunction {
    type Output = CircleFunction;
    fn sub(self, rhs: &CircleFunction) -> CircleFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &CircleFunction {
    type Output = CircleFunction;
    fn neg(self) -> CircleFunction {
        self.scale(C64::new(-1.0, 0.0))
    }
}

pub(crate) fn fft_forward(buf: &mut [C64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn fft_inverse(buf: &mut [C64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// Full discrete spectrum `d_n = (1/M) sum_j x_j e^{-i n theta_j}` stored
/// at index `n mod M`.
pub(crate) fn spectrum(samples: &[C64], grid: &SampleGrid) -> Vec<C64> {
    let m = grid.size();
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let inv_m = 1.0 / m as f64;
    let offset = grid.offset();
    for (idx, v) in buf.iter_mut().enumerate() {
        let n = signed_index(idx, m);
        *v *= inv_m;
        if offset != 0.0 {
            *v *= C64::from_polar(1.0, -(n as f64) * offset);
        }
    }
    buf
}

/// Maps an FFT bin to its signed frequency in `(-M/2, M/2]`.
pub(crate) fn signed_index(idx: usize, m: usize) -> i64 {
    if idx <= m / 2 {
        idx as i64
    } else {
        idx as i64 - m as i64
    }
}

/// Largest coefficient magnitude in the top band `|n| >= 3M/8` of a spectrum,
/// relative to the largest coefficient overall.
pub(crate) fn spectral_tail(spec: &[C64]) -> f64 {
    let m = spec.len();
    let cut = (3 * m / 8) as i64;
    let mut tail: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (idx, c) in spec.iter().enumerate() {
        let n = signed_index(idx, m);
        peak = peak.max(c.norm());
        if n.abs() >= cut {
            tail = tail.max(c.norm());
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak.max(1.0)
    }
}

/// Coefficients of the trigonometric interpolant of complex samples, with
/// the mean dropped.
pub fn analyze(samples: &[C64], grid: &SampleGrid, bandlimit: usize) -> Result<CircleFunction> {
    check_analyze(samples.len(), grid, bandlimit)?;
    let spec = spectrum(samples, grid);
    let m = grid.size();
    let pos = (1..=bandlimit).map(|k| spec[k]).collect();
    let neg = (1..=bandlimit).map(|k| spec[m - k]).collect();
    CircleFunction::from_parts(pos, neg)
}

/// [`analyze`] for real samples; the result carries the real flag.
pub fn analyze_real(
    samples: &[f64],
    grid: &SampleGrid,
    bandlimit: usize,
) -> Result<CircleFunction> {
    let cs: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    Ok(analyze(&cs, grid, bandlimit)?.real_part())
}

fn check_analyze(len: usize, grid: &SampleGrid, bandlimit: usize) -> Result<()> {
    if len != grid.size() {
        return Err(Error::Dimension(format!(
            "{len} samples for a grid of {} points",
            grid.size()
        )));
    }
    if grid.size() < 2 * bandlimit + 1 {
        return Err(Error::GridTooSmall {
            size: grid.size(),
            bandlimit,
            required: 2 * bandlimit + 1,
        });
    }
    Ok(())
}

/// Point values of `f` on the grid.
pub fn synthesize(f: &CircleFunction, grid: &SampleGrid) -> Vec<C64> {
    let m = grid.size();
    let n = f.bandlimit();
    if m < 2 * n + 1 {
        return grid.points().into_iter().map(|t| f.eval(t)).collect();
    }
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let offset = grid.offset();
    for (k, c) in f.modes() {
        let phase = if offset != 0.0 {
            C64::from_polar(1.0, k as f64 * offset)
        } else {
            C64::new(1.0, 0.0)
        };
        buf[k.rem_euclid(m as i64) as usize] = c * phase;
    }
    fft_inverse(&mut buf);
    buf
}

/// Real parts of [`synthesize`]; exact values for real `f`.
pub fn synthesize_real(f: &CircleFunction, grid: &SampleGrid) -> Vec<f64> {
    synthesize(f, grid).into_iter().map(|z| z.re).collect()
}

/// H^{1/2} norm. Real functions use `2 sum_{n>=1} n |c_n|^2`, complex ones
/// `sum_{n != 0} |n| |c_n|^2`; the two agree on real input.
pub fn h_half_norm(f: &CircleFunction) -> f64 {
    norm_squared(f).sqrt()
}

pub fn norm_squared(f: &CircleFunction) -> f64 {
    let pos: f64 = f
        .pos
        .iter()
        .enumerate()
        .map(|(k, c)| (k + 1) as f64 * c.norm_sqr())
        .sum();
    if f.real {
        2.0 * pos
    } else {
        let neg: f64 = f
            .neg
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 1) as f64 * c.norm_sqr())
            .sum();
        pos + neg
    }
}

/// Hermitian inner product `sum |n| c_n(f) conj(c_n(g))`.
pub fn inner_product(f: &CircleFunction, g: &CircleFunction) -> C64 {
    let n = f.bandlimit().min(g.bandlimit());
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let w = (k + 1) as f64;
        acc += (f.pos[k] * g.pos[k].conj() + f.neg[k] * g.neg[k].conj()) * w;
    }
    acc
}

/// Conjugation of Fourier series, `c_n -> -i sgn(n) c_n`.
pub fn hilbert_transform(f: &CircleFunction) -> CircleFunction {
    CircleFunction {
        real: f.real,
        pos: f.pos.iter().map(|c| -I * c).collect(),
        neg: f.neg.iter().map(|c| I * c).collect(),
    }
}

/// Splits `f` into its positive-mode (`W+`) and negative-mode (`W-`) parts.
pub fn polarize(f: &CircleFunction) -> (CircleFunction, CircleFunction) {
    let zero = vec![C64::new(0.0, 0.0); f.bandlimit()];
    let plus = CircleFunction {
        real: false,
        pos: f.pos.clone(),
        neg: zero.clone(),
    };
    let minus = CircleFunction {
        real: false,
        pos: zero,
        neg: f.neg.clone(),
    };
    (plus, minus)
}

/// Boundary double integral for the Dirichlet energy of the harmonic
/// extension, by the trapezoid rule on the product of the unshifted grid and
/// `grid`. The offset of `grid` keeps the two axes off the diagonal.
pub fn douglas_energy(f: &CircleFunction, grid: &SampleGrid) -> Result<f64> {
    if grid.offset() <= 0.0 {
        return Err(Error::ZeroOffset);
    }
    let m = grid.size();
    let on_axis = synthesize(f, &SampleGrid::new(m));
    let off_axis = synthesize(f, grid);
    let h = grid.spacing();
    // theta_i - phi_j depends only on (i - j) mod M.
    let weight: Vec<f64> = (0..m)
        .map(|d| {
            let s = ((h * d as f64 - grid.offset()) / 2.0).sin();
            1.0 / (s * s)
        })
        .collect();
    let mut total = 0.0;
    for (i, fi) in on_axis.iter().enumerate() {
        let mut row = 0.0;
        for (j, gj) in off_axis.iter().enumerate() {
            row += (fi - gj).norm_sqr() * weight[(i + m - j) % m];
        }
        total += row;
    }
    Ok(total * h * h / (16.0 * PI * PI))
}

/// Harmonic extension `sum c_n r^{|n|} e^{i n theta}` into the disc.
pub fn poisson_evaluate(f: &CircleFunction, r: f64, theta: f64) -> Result<C64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::RadiusOutOfRange(r));
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut rk = 1.0;
    for (k, (p, q)) in f.pos.iter().zip(&f.neg).enumerate() {
        rk *= r;
        let e = C64::from_polar(1.0, (k + 1) as f64 * theta);
        acc += (p * e + q * e.conj()) * rk;
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct ModeJson {
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CircleFunctionJson {
    bandlimit: usize,
    real: bool,
    coeffs: Vec<ModeJson>,
}

impl Serialize for CircleFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .modes()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(n, c)| ModeJson {
                n,
                re: c.re,
                im: c.im,
            })
            .collect();
        CircleFunctionJson {
            bandlimit: self.bandlimit(),
            real: self.real,
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CircleFunctionJson::deserialize(d)?;
        CircleFunction::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<CircleFunctionJson> for CircleFunction {
    type Error = Error;

    fn try_from(raw: CircleFunctionJson) -> Result<Self> {
        if raw.bandlimit == 0 {
            return Err(Error::InvalidInput("bandlimit must be positive".into()));
        }
        let mut f = CircleFunction::zeros(raw.bandlimit, false);
        let mut seen = vec![false; 2 * raw.bandlimit + 1];
        for m in &raw.coeffs {
            if !m.re.is_finite() || !m.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite coefficient at n = {}",
                    m.n
                )));
            }
            f.set(m.n, C64::new(m.re, m.im))?;
            seen[(m.n + raw.bandlimit as i64) as usize] = true;
        }
        if !raw.real {
            return Ok(f);
        }
        // A real function may list only one of each conjugate pair.
        for k in 1..=raw.bandlimit as i64 {
            let has_pos = seen[(k + raw.bandlimit as i64) as usize];
            let has_neg = seen[(raw.bandlimit as i64 - k) as usize];
            let (p, q) = (f.coeff(k), f.coeff(-k));
            match (has_pos, has_neg) {
                (true, false) => f.set(-k, p.conj())?,
                (false, true) => f.set(k, q.conj())?,
                _ => {
                    if (q - p.conj()).norm() > 1e-12 * p.norm().max(1.0) {
                        return Err(Error::InvalidInput(format!(
                            "real function violates c(-{k}) = conj(c({k}))"
                        )));
                    }
                }
            }
        }
        Ok(f.real_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-14;

    fn cos_samples(grid: &SampleGrid, k: f64) -> Vec<f64> {
        grid.points().iter().map(|t| (k * t).cos()).collect()
    }

    #[test]
    fn analyze_cosine() {
        let grid = SampleGrid::new(64);
        let f = analyze_real(&cos_samples(&grid, 1.0), &grid, 4).unwrap();
        assert!((f.coeff(1) - C64::new(0.5, 0.0)).norm() < TOL);
        assert!((f.coeff(-1) - C64::new(0.5, 0.0)).norm() < TOL);
        for k in 2..=4 {
            assert!(f.coeff(k).norm() < TOL && f.coeff(-k).norm() < TOL);
        }
        assert!(f.is_real());
    }

    #[test]
    fn analyze_constant_is_zero() {
        let grid = SampleGrid::new(64);
        let f = analyze_real(&vec![5.0; 64], &grid, 4).unwrap();
        assert!(f.max_abs_coeff() < TOL);
    }

    #[test]
    fn analyze_sine_three() {
        let grid = SampleGrid::with_offset(64, 0.03).unwrap();
        let s: Vec<f64> = grid.points().iter().map(|t| (3.0 * t).sin()).collect();
        let f = analyze_real(&s, &grid, 4).unwrap();
        assert!((f.coeff(3) - C64::new(0.0, -0.5)).norm() < TOL);
        assert!((f.coeff(-3) - C64::new(0.0, 0.5)).norm() < TOL);
    }

    #[test]
    fn analyze_rejects_small_grid() {
        let grid = SampleGrid::new(8);
        let err = analyze_real(&[0.0; 8], &grid, 4).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall { required: 9, .. }));
    }

    #[test]
    fn synthesize_basics() {
        let grid = SampleGrid::new(16);
        let z = synthesize(&CircleFunction::zeros(3, true), &grid);
        assert!(z.iter().all(|v| v.norm() == 0.0));
        let c = synthesize_real(&CircleFunction::cos(1, 3), &grid);
        assert!((c[0] - 1.0).abs() < TOL);
    }

    #[test]
    fn round_trip_offset_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = CircleFunction::random_real(&mut rng, 10, 1.0);
        let grid = SampleGrid::with_offset(41, 0.1).unwrap();
        let g = analyze_real(&synthesize_real(&f, &grid), &grid, 10).unwrap();
        assert!(f.max_abs_diff(&g) < 1e-14);
    }

    #[test]
    fn norm_examples() {
        assert!((norm_squared(&CircleFunction::cos(1, 4)) - 0.5).abs() < TOL);
        assert_eq!(h_half_norm(&CircleFunction::zeros(4, true)), 0.0);
        let f = &CircleFunction::cos(1, 4) + &CircleFunction::cos(2, 4);
        assert!((norm_squared(&f) - 1.5).abs() < TOL);
        // complex convention agrees on real input
        assert!((norm_squared(&f.complexified()) - 1.5).abs() < TOL);
    }

    #[test]
    fn inner_product_examples() {
        let c = CircleFunction::cos(1, 3);
        let s = CircleFunction::sin(1, 3);
        assert!(inner_product(&c, &s).norm() < TOL);
        let e = CircleFunction::exp_mode(1, 3);
        assert!((inner_product(&e, &e) - C64::new(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let j = hilbert_transform(&CircleFunction::cos(1, 3));
        assert!(j.max_abs_diff(&CircleFunction::sin(1, 3)) < TOL);
        assert!(j.is_real());
    }

    #[test]
    fn polarize_cosine() {
        let (p, m) = polarize(&CircleFunction::cos(1, 2));
        assert_eq!(p.coeff(1), C64::new(0.5, 0.0));
        assert_eq!(p.coeff(-1), C64::new(0.0, 0.0));
        assert_eq!(m.coeff(-1), C64::new(0.5, 0.0));
        let w = CircleFunction::exp_mode(2, 3);
        let (p, m) = polarize(&w);
        assert_eq!(p, w);
        assert_eq!(m.max_abs_coeff(), 0.0);
    }

    #[test]
    fn douglas_cosine() {
        let e = douglas_energy(&CircleFunction::cos(1, 1), &SampleGrid::half_cell(256)).unwrap();
        assert!((e - 0.5).abs() < 1e-10, "{e}");
        let z =
            douglas_energy(&CircleFunction::zeros(2, true), &SampleGrid::half_cell(64)).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn douglas_rejects_zero_offset() {
        let err = douglas_energy(&CircleFunction::cos(1, 1), &SampleGrid::new(64)).unwrap_err();
        assert!(matches!(err, Error::ZeroOffset));
    }

    #[test]
    fn poisson_examples() {
        let c = CircleFunction::cos(1, 2);
        assert!((poisson_evaluate(&c, 0.5, 0.0).unwrap() - C64::new(0.5, 0.0)).norm() < TOL);
        assert_eq!(poisson_evaluate(&c, 0.0, 1.3).unwrap(), C64::new(0.0, 0.0));
        let e = CircleFunction::exp_mode(1, 2);
        let v = poisson_evaluate(&e, 0.3, 0.7).unwrap();
        assert!((v - C64::from_polar(0.3, 0.7)).norm() < TOL);
        assert!(matches!(
            poisson_evaluate(&c, 1.0, 0.0),
            Err(Error::RadiusOutOfRange(_))
        ));
    }

    #[test]
    fn json_real_pairs_filled_in() {
        let f: CircleFunction = serde_json::from_str(
            r#"{"bandlimit": 2, "real": true, "coeffs": [{"n": 1, "re": 0.5, "im": 0.0}]}"#,
        )
        .unwrap();
        assert_eq!(f, CircleFunction::cos(1, 2));
        let bad = serde_json::from_str::<CircleFunction>(
            r#"{"bandlimit": 2, "real": true, "coeffs": [{"n": 1, "re": 0.5, "im": 0.0}, {"n": -1, "re": 0.2, "im": 0.0}]}"#,
        );
        assert!(bad.is_err());
        let zero = serde_json::from_str::<CircleFunction>(
            r#"{"bandlimit": 2, "real": false, "coeffs": [{"n": 0, "re": 1.0, "im": 0.0}]}"#,
        );
        assert!(zero.is_err());
    }
}

//! Orientation-preserving circle maps given by monotone lifts.
//!
//! A [`CircleMap`] pairs an analytic [`MapDescriptor`] (used for pointwise
//! evaluation) with dense samples of the lift on a grid (used for the
//! monotonicity certificate and for spectral derivatives).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{
    analyze_real, fft_inverse, signed_index, spectrum, CircleFunction, SampleGrid, C64, I,
};

const TWO_PI: f64 = 2.0 * PI;

/// Analytic description of a lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapDescriptor {
    Identity,
    Rotation {
        alpha: f64,
    },
    /// `z -> e^{i beta} (z - a) / (1 - conj(a) z)` restricted to the circle.
    Moebius {
        #[serde(with = "crate::json::complex")]
        a: C64,
        #[serde(default)]
        beta: f64,
    },
    /// `z -> z^k`.
    Power {
        k: u32,
    },
    /// Lift `theta + eps v(theta)` for a real `v`.
    Flow {
        v: CircleFunction,
        eps: f64,
    },
    /// Lift `theta - 2 eps sin((m+2) theta) / (m+1)`: the boundary flow of the
    /// Beltrami direction `conj(z)^m`.
    RauchFlow {
        m: u32,
        eps: f64,
    },
    /// Composition, outermost map first.
    Compose {
        maps: Vec<MapDescriptor>,
    },
    /// Inverse of a degree-1 map, evaluated by bisection.
    Inverse {
        map: Box<MapDescriptor>,
    },
    /// Lift values on the unshifted grid of `values.len()` points,
    /// interpolated trigonometrically after removing `degree * theta`.
    Sampled {
        degree: u32,
        values: Vec<f64>,
    },
}

impl MapDescriptor {
    pub fn rotation(alpha: f64) -> Self {
        MapDescriptor::Rotation { alpha }
    }

    pub fn moebius(a: C64, beta: f64) -> Self {
        MapDescriptor::Moebius { a, beta }
    }

    pub fn flow(v: CircleFunction, eps: f64) -> Self {
        MapDescriptor::Flow { v, eps }
    }

    pub fn rauch_flow(m: u32, eps: f64) -> Self {
        MapDescriptor::RauchFlow { m, eps }
    }

    /// `outer o inner`.
    pub fn compose(outer: MapDescriptor, inner: MapDescriptor) -> Self {
        let mut maps = Vec::new();
        for d in [outer, inner] {
            match d {
                MapDescriptor::Compose { maps: inner_maps } => maps.extend(inner_maps),
                other => maps.push(other),
            }
        }
        MapDescriptor::Compose { maps }
    }

    pub fn degree(&self) -> u32 {
        match self {
            MapDescriptor::Power { k } => *k,
            MapDescriptor::Compose { maps } => maps.iter().map(MapDescriptor::degree).product(),
            MapDescriptor::Sampled { degree, .. } => *degree,
            _ => 1,
        }
    }

    /// False when any component is a sampled lift.
    pub fn is_smooth(&self) -> bool {
        match self {
            MapDescriptor::Sampled { .. } => false,
            MapDescriptor::Compose { maps } => maps.iter().all(MapDescriptor::is_smooth),
            MapDescriptor::Inverse { map } => map.is_smooth(),
            _ => true,
        }
    }
}

#[derive(Clone, Debug)]
enum Lift {
    Identity,
    Rotation(f64),
    Moebius {
        a: C64,
        beta: f64,
    },
    Power(f64),
    Flow {
        v: CircleFunction,
        eps: f64,
    },
    Rauch {
        freq: f64,
        amp: f64,
    },
    Compose(Vec<Lift>),
    Inverse {
        inner: Box<Lift>,
        at_zero: f64,
    },
    Sampled {
        degree: f64,
        mean: f64,
        periodic: CircleFunction,
    },
}

impl Lift {
    fn compile(d: &MapDescriptor) -> Result<Lift> {
        Ok(match d {
            MapDescriptor::Identity => Lift::Identity,
            MapDescriptor::Rotation { alpha } => Lift::Rotation(*alpha),
            MapDescriptor::Moebius { a, beta } => {
                if a.norm() >= 1.0 || !a.norm().is_finite() {
                    return Err(Error::InvalidMoebius(a.norm()));
                }
                Lift::Moebius { a: *a, beta: *beta }
            }
            MapDescriptor::Power { k } => {
                if *k == 0 {
                    return Err(Error::InvalidDescriptor("power needs k >= 1".into()));
                }
                Lift::Power(*k as f64)
            }
            MapDescriptor::Flow { v, eps } => {
                if !v.is_real() {
                    return Err(Error::InvalidDescriptor(
                        "flow field must be a real function".into(),
                    ));
                }
                Lift::Flow {
                    v: v.clone(),
                    eps: *eps,
                }
            }
            MapDescriptor::RauchFlow { m, eps } => Lift::Rauch {
                freq: (*m + 2) as f64,
                amp: 2.0 * eps / (*m + 1) as f64,
            },
            MapDescriptor::Compose { maps } => {
                if maps.is_empty() {
                    return Ok(Lift::Identity);
                }
                Lift::Compose(maps.iter().map(Lift::compile).collect::<Result<_>>()?)
            }
            MapDescriptor::Inverse { map } => {
                if map.degree() != 1 {
                    return Err(Error::DegreeNotOne(map.degree()));
                }
                let inner = Lift::compile(map)?;
                let at_zero = inner.eval(0.0);
                Lift::Inverse {
                    inner: Box::new(inner),
                    at_zero,
                }
            }
            MapDescriptor::Sampled { degree, values } => {
                let m = values.len();
                if m < 3 || *degree == 0 {
                    return Err(Error::InvalidDescriptor(
                        "sampled lift needs at least 3 values and degree >= 1".into(),
                    ));
                }
                let grid = SampleGrid::new(m);
                let deg = *degree as f64;
                let p: Vec<f64> = values
                    .iter()
                    .zip(grid.points())
                    .map(|(v, t)| v - deg * t)
                    .collect();
                let mean = p.iter().sum::<f64>() / m as f64;
                let periodic = analyze_real(&p, &grid, grid.max_bandlimit())?;
                Lift::Sampled {
                    degree: deg,
                    mean,
                    periodic,
                }
            }
        })
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            Lift::Identity => t,
            Lift::Rotation(a) => t + a,
            Lift::Moebius { a, beta } => {
                // arg(e^{it} - a) - arg(1 - conj(a) e^{it}) = t + 2 arg(1 - a e^{-it})
                let w = C64::new(1.0, 0.0) - a * C64::from_polar(1.0, -t);
                t + beta + 2.0 * w.arg()
            }
            Lift::Power(k) => k * t,
            Lift::Flow { v, eps } => t + eps * v.eval(t).re,
            Lift::Rauch { freq, amp } => t - amp * (freq * t).sin(),
            Lift::Compose(maps) => maps.iter().rev().fold(t, |x, l| l.eval(x)),
            Lift::Inverse { inner, at_zero } => {
                let k = ((t - at_zero) / TWO_PI).floor();
                let target = t - TWO_PI * k;
                bisect(inner, target) + TWO_PI * k
            }
            Lift::Sampled {
                degree,
                mean,
                periodic,
            } => degree * t + mean + periodic.eval(t).re,
        }
    }
}

/// Solves `inner(x) = target` for `x` in `[0, 2pi]`, given
/// `inner(0) <= target <= inner(2pi)`.
fn bisect(inner: &Lift, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, TWO_PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inner.eval(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Orientation-preserving circle map of positive degree.
#[derive(Clone, Debug)]
pub struct CircleMap {
    descriptor: MapDescriptor,
    lift: Lift,
    degree: u32,
    grid: SampleGrid,
    samples: Vec<f64>,
    // spectrum of lift - degree * theta, index n mod M
    periodic: Vec<C64>,
}

/// Builds a map from its descriptor, sampling the lift on `grid`.
pub fn make_map(d: &MapDescriptor, grid: &SampleGrid) -> Result<CircleMap> {
    let lift = Lift::compile(d)?;
    let degree = d.degree();
    let samples: Vec<f64> = grid.points().iter().map(|&t| lift.eval(t)).collect();

    match &lift {
        Lift::Flow { v, eps } => {
            let dv = crate::fourier::synthesize_real(&v.derivative(), grid);
            check_positive_derivative(dv.iter().map(|x| 1.0 + eps * x), grid)?;
        }
        Lift::Rauch { freq, amp } => {
            check_positive_derivative(
                grid.points()
                    .iter()
                    .map(|t| 1.0 - amp * freq * (freq * t).cos()),
                grid,
            )?;
        }
        _ => {}
    }
    check_monotone(&samples, degree, grid)?;

    let periodic_samples: Vec<C64> = samples
        .iter()
        .zip(grid.points())
        .map(|(s, t)| C64::new(s - degree as f64 * t, 0.0))
        .collect();
    let mut periodic = spectrum(&periodic_samples, grid);
    // Rounding in the samples puts a floor of about eps * |lift| / sqrt(M)
    // under every coefficient, which spectral derivatives amplify by n^k.
    let scale = samples.iter().fold(1.0_f64, |a, s| a.max(s.abs()));
    let floor = 4.0 * f64::EPSILON * scale;
    for c in periodic.iter_mut().skip(1) {
        if c.norm() < floor {
            *c = C64::new(0.0, 0.0);
        }
    }
    Ok(CircleMap {
        descriptor: d.clone(),
        lift,
        degree,
        grid: *grid,
        samples,
        periodic,
    })
}

fn check_positive_derivative(d: impl Iterator<Item = f64>, grid: &SampleGrid) -> Result<()> {
    for (j, v) in d.enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonMonotone {
                min_step: v,
                at: grid.point(j),
            });
        }
    }
    Ok(())
}

fn check_monotone(samples: &[f64], degree: u32, grid: &SampleGrid) -> Result<()> {
    let m = samples.len();
    for j in 0..m {
        let next = if j + 1 < m {
            samples[j + 1]
        } else {
            samples[0] + TWO_PI * degree as f64
        };
        let step = next - samples[j];
        if !(step > 0.0) {
            return Err(Error::NonMonotone {
                min_step: step,
                at: grid.point(j),
            });
        }
    }
    Ok(())
}

impl CircleMap {
    pub fn descriptor(&self) -> &MapDescriptor {
        &self.descriptor
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    /// Lift values on the map's grid.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_smooth(&self) -> bool {
        self.descriptor.is_smooth()
    }

    /// Lift value, extended by `lift(t + 2pi) = lift(t) + 2pi degree`.
    pub fn lift(&self, theta: f64) -> f64 {
        let k = (theta / TWO_PI).floor();
        let base = theta - TWO_PI * k;
        self.lift.eval(base) + TWO_PI * k * self.degree as f64
    }

    /// `e^{i lift(theta)}`.
    pub fn boundary_value(&self, theta: f64) -> C64 {
        C64::from_polar(1.0, self.lift(theta))
    }

    /// `order`-th derivative of the lift at `x` by spectral differentiation
    /// of its periodic part.
    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        let m = self.periodic.len();
        let mut acc = C64::new(0.0, 0.0);
        for (idx, c) in self.periodic.iter().enumerate() {
            let n = signed_index(idx, m);
            if n == 0 || (m.is_multiple_of(2) && n == (m / 2) as i64) {
                continue;
            }
            let factor = (I * n as f64).powu(order);
            acc += c * factor * C64::from_polar(1.0, n as f64 * x);
        }
        let base = if order == 1 { self.degree as f64 } else { 0.0 };
        base + acc.re
    }

    /// Derivative of the lift on every grid point.
    pub fn derivative_on_grid(&self, order: u32) -> Vec<f64> {
        let m = self.periodic.len();
        let offset = self.grid.offset();
        let mut buf: Vec<C64> = self
            .periodic
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let n = signed_index(idx, m);
                if n == 0 || (m.is_multiple_of(2) && n == (m / 2) as i64) {
                    return C64::new(0.0, 0.0);
                }
                c * (I * n as f64).powu(order) * C64::from_polar(1.0, n as f64 * offset)
            })
            .collect();
        fft_inverse(&mut buf);
        let base = if order == 1 { self.degree as f64 } else { 0.0 };
        buf.into_iter().map(|z| base + z.re).collect()
    }
}

/// Lift value of `map` at `theta`.
pub fn evaluate_lift(map: &CircleMap, theta: f64) -> f64 {
    map.lift(theta)
}

/// `outer o inner`, sampled on the finer of the two grids.
pub fn compose(outer: &CircleMap, inner: &CircleMap) -> Result<CircleMap> {
    let grid = if outer.grid.size() >= inner.grid.size() {
        outer.grid
    } else {
        inner.grid
    };
    make_map(
        &MapDescriptor::compose(outer.descriptor.clone(), inner.descriptor.clone()),
        &grid,
    )
}

/// Inverse homeomorphism; the lift is inverted by bisection.
pub fn invert(map: &CircleMap) -> Result<CircleMap> {
    if map.degree != 1 {
        return Err(Error::DegreeNotOne(map.degree));
    }
    let d = match &map.descriptor {
        MapDescriptor::Inverse { map } => (**map).clone(),
        MapDescriptor::Identity => MapDescriptor::Identity,
        other => MapDescriptor::Inverse {
            map: Box::new(other.clone()),
        },
    };
    make_map(&d, &map.grid)
}

/// Sampled quasisymmetry ratio: the largest `max(rho, 1/rho)` with
/// `rho = (lift(x+t) - lift(x)) / (lift(x) - lift(x-t))` over grid points `x`
/// and the given half-lengths `t`. A lower bound for the true constant.
pub fn qs_ratio(map: &CircleMap, scales: &[f64]) -> Result<f64> {
    if map.degree != 1 {
        return Err(Error::DegreeNotOne(map.degree));
    }
    let mut worst: f64 = 1.0;
    for &x in &map.grid.points() {
        let centre = map.lift(x);
        for &t in scales {
            let right = map.lift(x + t) - centre;
            let left = centre - map.lift(x - t);
            let rho = right / left;
            worst = worst.max(rho).max(1.0 / rho);
        }
    }
    Ok(worst)
}

/// `sup max(phi', 1/phi')` over the grid: the dilatation of the radial
/// extension `r e^{i theta} -> r e^{i phi(theta)}`.
pub fn radial_dilatation(map: &CircleMap) -> Result<f64> {
    if !map.is_smooth() {
        return Err(Error::NonSmooth);
    }
    if map.degree != 1 {
        return Err(Error::DegreeNotOne(map.degree));
    }
    let d = map.derivative_on_grid(1);
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if !(lo > 0.0) {
        return Err(Error::NonMonotone {
            min_step: lo,
            at: f64::NAN,
        });
    }
    Ok(hi.max(1.0 / lo))
}

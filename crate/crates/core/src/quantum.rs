//! Quantum derivatives `d^Q f = [J, M_f]`, their Hilbert-Schmidt norms, the
//! welding kernel `log((h(x) - h(y)) / (x - y))` with its derivative kernels,
//! and the deformed complex structure `T_h J0 T_h^{-1}`.

use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};
use crate::fourier::{norm_squared, CircleFunction, SampleGrid, C64, I};
use crate::linalg::{condition_number, standard_structure, CMatrix};
use crate::period::MAX_CONDITION;
use crate::pullback::{pullback_matrix, BlockOperator};

/// `[J, M_f]` on the exponentials `e^{in theta}`, `|n| <= cutoff`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumOperator {
    cutoff: usize,
    source_bandlimit: usize,
    index_min: i64,
    index_max: i64,
    #[serde(with = "crate::json::matrix")]
    entries: CMatrix,
}

impl QuantumOperator {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn source_bandlimit(&self) -> usize {
        self.source_bandlimit
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Entry at signed indices `(m, n)`.
    pub fn entry(&self, m: i64, n: i64) -> C64 {
        let c = self.cutoff as i64;
        self.entries[((m + c) as usize, (n + c) as usize)]
    }

    pub fn validate(&self) -> Result<()> {
        let size = 2 * self.cutoff + 1;
        if self.entries.nrows() != size
            || self.entries.ncols() != size
            || self.index_min != -(self.cutoff as i64)
            || self.index_max != self.cutoff as i64
        {
            return Err(Error::Dimension(format!(
                "cutoff {} needs a {size}x{size} matrix indexed -{}..{}",
                self.cutoff, self.cutoff, self.cutoff
            )));
        }
        Ok(())
    }
}

fn sgn(n: i64) -> f64 {
    n.signum() as f64
}

/// Entry `(m, n)` is `-i (sgn m - sgn n) c_{m-n}(f)`.
pub fn quantum_derivative_matrix(f: &CircleFunction, cutoff: usize) -> Result<QuantumOperator> {
    if cutoff < f.bandlimit() {
        return Err(Error::CutoffTooSmall {
            cutoff,
            bandlimit: f.bandlimit(),
            required: f.bandlimit(),
        });
    }
    let c = cutoff as i64;
    let entries = CMatrix::from_fn(2 * cutoff + 1, 2 * cutoff + 1, |i, j| {
        let (m, n) = (i as i64 - c, j as i64 - c);
        let s = sgn(m) - sgn(n);
        if s == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            -I * s * f.coeff(m - n)
        }
    });
    Ok(QuantumOperator {
        cutoff,
        source_bandlimit: f.bandlimit(),
        index_min: -c,
        index_max: c,
        entries,
    })
}

/// Frobenius norm of the truncated operator.
pub fn hs_norm(op: &QuantumOperator) -> Result<f64> {
    let required = 2 * op.source_bandlimit;
    if op.cutoff < required {
        return Err(Error::CutoffTooSmall {
            cutoff: op.cutoff,
            bandlimit: op.source_bandlimit,
            required,
        });
    }
    Ok(op.entries.norm())
}

/// `||d^Q f||_HS^2 = sum_{k != 0} (4|k| - 2) |c_k|^2`.
pub fn hs_squared_closed_form(f: &CircleFunction) -> f64 {
    f.modes()
        .map(|(k, c)| (4.0 * k.unsigned_abs() as f64 - 2.0) * c.norm_sqr())
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub hs_squared: f64,
    pub norm_squared: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Checks `2 ||f||^2 <= HS^2 <= 4 ||f||^2` for real `f`.
pub fn hs_bracket_check(f: &CircleFunction) -> Result<BracketReport> {
    if !f.is_real() {
        return Err(Error::InvalidInput(
            "bracket is stated for real functions".into(),
        ));
    }
    let op = quantum_derivative_matrix(f, 2 * f.bandlimit())?;
    let hs = hs_norm(&op)?;
    let hs_squared = hs * hs;
    let n2 = norm_squared(f);
    let slack = 1e-12 * n2;
    Ok(BracketReport {
        hs_squared,
        norm_squared: n2,
        lower_ok: 2.0 * n2 <= hs_squared + slack,
        upper_ok: hs_squared <= 4.0 * n2 + slack,
    })
}

/// A smooth increasing real function with derivatives up to order three.
pub trait RealMap {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64, order: u32) -> f64;
    fn is_smooth(&self) -> bool {
        true
    }
}

impl RealMap for CircleMap {
    fn value(&self, x: f64) -> f64 {
        self.lift(x)
    }

    fn derivative(&self, x: f64, order: u32) -> f64 {
        CircleMap::derivative(self, x, order)
    }

    fn is_smooth(&self) -> bool {
        CircleMap::is_smooth(self)
    }
}

/// `x -> e^x` on the line.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Exponential;

impl RealMap for Exponential {
    fn value(&self, x: f64) -> f64 {
        x.exp()
    }

    fn derivative(&self, x: f64, _order: u32) -> f64 {
        x.exp()
    }
}

/// `x -> (a x + b) / (c x + d)` with `ad - bc > 0`, used away from its pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMoebius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl LineMoebius {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a * d - b * c > 0.0) {
            return Err(Error::InvalidDescriptor(
                "line Moebius map needs ad - bc > 0".into(),
            ));
        }
        Ok(LineMoebius { a, b, c, d })
    }
}

impl RealMap for LineMoebius {
    fn value(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    fn derivative(&self, x: f64, order: u32) -> f64 {
        let det = self.a * self.d - self.b * self.c;
        let q = self.c * x + self.d;
        match order {
            0 => self.value(x),
            1 => det / (q * q),
            2 => -2.0 * self.c * det / q.powi(3),
            3 => 6.0 * self.c * self.c * det / q.powi(4),
            _ => unimplemented!("derivatives above order 3"),
        }
    }
}

/// Which welding kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum KernelOrder {
    /// `log((h(x) - h(y)) / (x - y))`
    Log,
    /// `h'(x) / (h(x) - h(y)) - 1 / (x - y)`
    First,
    /// `h'(x) h'(y) / (h(x) - h(y))^2 - 1 / (x - y)^2`
    Second,
}

impl TryFrom<u8> for KernelOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(KernelOrder::Log),
            1 => Ok(KernelOrder::First),
            2 => Ok(KernelOrder::Second),
            other => Err(Error::InvalidInput(format!(
                "kernel order {other} is not 0, 1 or 2"
            ))),
        }
    }
}

impl From<KernelOrder> for u8 {
    fn from(k: KernelOrder) -> u8 {
        match k {
            KernelOrder::Log => 0,
            KernelOrder::First => 1,
            KernelOrder::Second => 2,
        }
    }
}

impl std::fmt::Display for KernelOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

fn check_kernel_args<H: RealMap + ?Sized>(h: &H, x: f64, y: f64) -> Result<()> {
    if !h.is_smooth() {
        return Err(Error::NonSmooth);
    }
    if x == y {
        return Err(Error::OnDiagonal);
    }
    Ok(())
}

pub fn kernel_eval<H: RealMap + ?Sized>(h: &H, order: KernelOrder, x: f64, y: f64) -> Result<f64> {
    check_kernel_args(h, x, y)?;
    let dh = h.value(x) - h.value(y);
    let u = x - y;
    Ok(match order {
        KernelOrder::Log => (dh / u).ln(),
        KernelOrder::First => h.derivative(x, 1) / dh - 1.0 / u,
        KernelOrder::Second => h.derivative(x, 1) * h.derivative(y, 1) / (dh * dh) - 1.0 / (u * u),
    })
}

/// Second kernel with chords of the unit circle in place of differences:
/// `h'(x) h'(y) / (4 sin^2((h(x)-h(y))/2)) - 1 / (4 sin^2((x-y)/2))`.
/// It vanishes identically for Moebius maps of the circle.
pub fn chordal_kernel_eval<H: RealMap + ?Sized>(h: &H, x: f64, y: f64) -> Result<f64> {
    check_kernel_args(h, x, y)?;
    let chord = |u: f64| {
        let s = (0.5 * u).sin();
        4.0 * s * s
    };
    Ok(
        h.derivative(x, 1) * h.derivative(y, 1) / chord(h.value(x) - h.value(y))
            - 1.0 / chord(x - y),
    )
}

/// `h'''/h' - (3/2) (h''/h')^2`.
pub fn schwarzian<H: RealMap + ?Sized>(h: &H, x: f64) -> f64 {
    let d1 = h.derivative(x, 1);
    let r = h.derivative(x, 2) / d1;
    h.derivative(x, 3) / d1 - 1.5 * r * r
}

/// Classical value of a kernel on the diagonal.
pub fn classical_value<H: RealMap + ?Sized>(h: &H, order: KernelOrder, x: f64) -> f64 {
    match order {
        KernelOrder::Log => h.derivative(x, 1).ln(),
        KernelOrder::First => h.derivative(x, 2) / (2.0 * h.derivative(x, 1)),
        KernelOrder::Second => schwarzian(h, x) / 6.0,
    }
}

/// Extrapolated diagonal value of a kernel against its classical value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalLimit {
    pub order: KernelOrder,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub chordal: bool,
    pub x: f64,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: f64,
    pub classical: f64,
    pub defect: f64,
}

/// Value at 0 of the polynomial through `(t_i, v_i)` (Neville).
fn extrapolate_to_zero(t: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (t[i + k] * p[i] - t[i] * p[i + 1]) / (t[i + k] - t[i]);
        }
    }
    p[0]
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 2 {
        return Err(Error::InvalidInput("need at least two step sizes".into()));
    }
    if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0))
        || deltas.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidInput(
            "step sizes must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// `pole` is the order of the kernel's diagonal singularity; rounding in the
/// lift differences grows like `eps / d^pole`.
fn check_convergence(values: &[f64], x: f64, d_min: f64, pole: i32) -> Result<()> {
    let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let rounding = 16.0 * f64::EPSILON * (1.0 + x.abs()) / d_min.powi(pole);
    let floor = (1e-9 * scale).max(rounding);
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in diffs.windows(2) {
        if w[1] > w[0] && w[1] > floor {
            return Err(Error::DeltasTooLarge(format!(
                "successive differences {:e} then {:e}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Symmetric kernels are sampled at `(x - d/2, x + d/2)`, which makes them
/// even in `d`, and are extrapolated in `d^2`. The first-order kernel is
/// sampled at `(x, x + d)` and extrapolated in `d`.
fn limit_of(
    deltas: &[f64],
    symmetric: bool,
    pole: i32,
    mut eval: impl FnMut(f64, f64) -> Result<f64>,
    x: f64,
) -> Result<(Vec<f64>, f64)> {
    check_deltas(deltas)?;
    let values = deltas
        .iter()
        .map(|&d| {
            if symmetric {
                eval(x - 0.5 * d, x + 0.5 * d)
            } else {
                eval(x, x + d)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    check_convergence(&values, x, deltas[deltas.len() - 1], pole)?;
    let t: Vec<f64> = if symmetric {
        deltas.iter().map(|d| d * d).collect()
    } else {
        deltas.to_vec()
    };
    let limit = extrapolate_to_zero(&t, &values);
    Ok((values, limit))
}

pub fn diagonal_limit<H: RealMap + ?Sized>(
    h: &H,
    order: KernelOrder,
    x: f64,
    deltas: &[f64],
) -> Result<DiagonalLimit> {
    if !h.is_smooth() {
        return Err(Error::NonSmooth);
    }
    let symmetric = order != KernelOrder::First;
    let pole = match order {
        KernelOrder::Log => 1,
        KernelOrder::First => 2,
        KernelOrder::Second => 3,
    };
    let (values, limit) = limit_of(
        deltas,
        symmetric,
        pole,
        |a, b| kernel_eval(h, order, a, b),
        x,
    )?;
    let classical = classical_value(h, order, x);
    Ok(DiagonalLimit {
        order,
        chordal: false,
        x,
        deltas: deltas.to_vec(),
        values,
        limit,
        classical,
        defect: (limit - classical).abs(),
    })
}

/// Diagonal limit of [`chordal_kernel_eval`], compared with
/// `S(h)/6 + (h'^2 - 1)/12`.
pub fn chordal_diagonal_limit<H: RealMap + ?Sized>(
    h: &H,
    x: f64,
    deltas: &[f64],
) -> Result<DiagonalLimit> {
    if !h.is_smooth() {
        return Err(Error::NonSmooth);
    }
    let (values, limit) = limit_of(deltas, true, 3, |a, b| chordal_kernel_eval(h, a, b), x)?;
    let d1 = h.derivative(x, 1);
    let classical = schwarzian(h, x) / 6.0 + (d1 * d1 - 1.0) / 12.0;
    Ok(DiagonalLimit {
        order: KernelOrder::Second,
        chordal: true,
        x,
        deltas: deltas.to_vec(),
        values,
        limit,
        classical,
        defect: (limit - classical).abs(),
    })
}

/// `T_h J0 T_h^{-1}` at cutoff `n`.
pub fn deformed_structure(h: &CircleMap, n: usize, grid: &SampleGrid) -> Result<BlockOperator> {
    let t = pullback_matrix(h, n, grid)?.full();
    let cond = condition_number(&t);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let inv = t
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::IllConditioned(cond))?;
    BlockOperator::from_full(&(&t * standard_structure(n) * inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::{make_map, MapDescriptor};
    use crate::linalg::max_abs;

    #[test]
    fn cosine_operator_entries() {
        let op = quantum_derivative_matrix(&CircleFunction::cos(1, 1), 3).unwrap();
        let nonzero: Vec<(i64, i64)> = (-3..=3)
            .flat_map(|m| (-3..=3).map(move |n| (m, n)))
            .filter(|&(m, n)| op.entry(m, n).norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
        for (m, n) in nonzero {
            assert!((op.entry(m, n).norm() - 0.5).abs() < 1e-15);
        }
        assert!((hs_norm(&op).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_generator() {
        let op = quantum_derivative_matrix(&CircleFunction::zeros(2, true), 4).unwrap();
        assert_eq!(hs_norm(&op).unwrap(), 0.0);
        let r = hs_bracket_check(&CircleFunction::zeros(2, true)).unwrap();
        assert!(r.lower_ok && r.upper_ok);
    }

    #[test]
    fn cutoff_guard() {
        let op = quantum_derivative_matrix(&CircleFunction::cos(2, 2), 3).unwrap();
        assert!(matches!(
            hs_norm(&op),
            Err(Error::CutoffTooSmall { required: 4, .. })
        ));
        assert!(quantum_derivative_matrix(&CircleFunction::cos(2, 2), 1).is_err());
    }

    #[test]
    fn identity_kernels_vanish() {
        let id = make_map(&MapDescriptor::Identity, &SampleGrid::new(64)).unwrap();
        for order in [KernelOrder::Log, KernelOrder::First, KernelOrder::Second] {
            assert_eq!(kernel_eval(&id, order, 0.3, 1.1).unwrap(), 0.0);
            let d = diagonal_limit(&id, order, 0.4, &[0.1, 0.05, 0.025]).unwrap();
            assert_eq!((d.limit, d.classical, d.defect), (0.0, 0.0, 0.0));
        }
        assert!(matches!(
            kernel_eval(&id, KernelOrder::Log, 1.0, 1.0),
            Err(Error::OnDiagonal)
        ));
    }

    #[test]
    fn exponential_schwarzian() {
        assert!((schwarzian(&Exponential, 0.7) + 0.5).abs() < 1e-14);
        let d =
            diagonal_limit(&Exponential, KernelOrder::Second, 0.0, &[0.1, 0.05, 0.025]).unwrap();
        assert!((d.limit + 1.0 / 12.0).abs() < 1e-9, "{}", d.limit);
    }

    #[test]
    fn kernel_order_json() {
        assert_eq!(serde_json::to_string(&KernelOrder::First).unwrap(), "1");
        assert!(serde_json::from_str::<KernelOrder>("3").is_err());
    }

    #[test]
    fn deltas_validated() {
        let e = Exponential;
        assert!(diagonal_limit(&e, KernelOrder::Log, 0.0, &[0.1]).is_err());
        assert!(diagonal_limit(&e, KernelOrder::Log, 0.0, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn divergent_steps_are_reported() {
        // huge steps on a steep map do not converge monotonically
        let m = make_map(
            &MapDescriptor::moebius(C64::new(0.9, 0.0), 0.0),
            &SampleGrid::new(4096),
        )
        .unwrap();
        let err =
            diagonal_limit(&m, KernelOrder::Second, 0.0, &[3.0, 1.5, 0.75, 0.375]).unwrap_err();
        assert!(matches!(err, Error::DeltasTooLarge(_)), "{err}");
    }

    #[test]
    fn identity_structure() {
        let grid = SampleGrid::new(128);
        let id = make_map(&MapDescriptor::Identity, &grid).unwrap();
        let j = deformed_structure(&id, 4, &grid).unwrap();
        assert!(max_abs(&(j.full() - standard_structure(4))) < 1e-14);
    }
}

//! Pullback `V_phi f = f o phi - mean` and its truncated block matrix.
//!
//! Coordinates: a function `f` with bandlimit `N` is the vector
//! `(x+, x-)` in `C^{2N}` with `x+[k] = sqrt(k) c_k` and `x-[k] = sqrt(k) c_{-k}`,
//! i.e. coefficients in the orthonormal basis `e_k = e^{ik theta}/sqrt(k)`
//! and its conjugates. A real operator then has the block form
//! `[[A, B], [conj B, conj A]]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::error::{Error, Result};
use crate::fourier::{spectral_tail, spectrum, CircleFunction, SampleGrid, C64};
use crate::linalg::{form_matrix, max_abs, spectral_norm, CMatrix};
use crate::symplectic::symplectic_fourier;

/// Relative size of the top quarter of a spectrum above which results are
/// considered aliased.
pub const ALIASING_TOL: f64 = 1e-12;

/// Truncated real operator on `W+ (+) W-`, stored by its `W+` row blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    cutoff: usize,
    #[serde(rename = "A", with = "crate::json::matrix")]
    a: CMatrix,
    #[serde(rename = "B", with = "crate::json::matrix")]
    b: CMatrix,
}

impl BlockOperator {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != n {
            return Err(Error::Dimension(format!(
                "blocks must be square and equal: A is {}x{}, B is {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(BlockOperator { cutoff: n, a, b })
    }

    pub fn identity(n: usize) -> Self {
        BlockOperator {
            cutoff: n,
            a: CMatrix::identity(n, n),
            b: CMatrix::zeros(n, n),
        }
    }

    /// Reads the top blocks of a `2N x 2N` matrix; the bottom blocks are
    /// assumed to be their conjugates.
    pub fn from_full(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "expected an even square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows() / 2;
        BlockOperator::new(
            m.view((0, 0), (n, n)).into_owned(),
            m.view((0, n), (n, n)).into_owned(),
        )
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Checks that deserialized blocks agree with the declared cutoff.
    pub fn validate(&self) -> Result<()> {
        let n = self.cutoff;
        if self.a.shape() != (n, n) || self.b.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "cutoff {n} but A is {:?} and B is {:?}",
                self.a.shape(),
                self.b.shape()
            )));
        }
        Ok(())
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// The `2N x 2N` matrix `[[A, B], [conj B, conj A]]`.
    pub fn full(&self) -> CMatrix {
        assemble(&self.a, &self.b)
    }

    /// `self * other` as operators.
    pub fn compose(&self, other: &BlockOperator) -> Result<BlockOperator> {
        if self.cutoff != other.cutoff {
            return Err(Error::Dimension("cutoffs differ".into()));
        }
        BlockOperator::from_full(&(self.full() * other.full()))
    }

    /// Applies the operator to a function (truncated to the cutoff).
    pub fn apply(&self, f: &CircleFunction) -> CircleFunction {
        from_coords(&(self.full() * to_coords(f, self.cutoff)))
    }
}

/// `[[A, B], [conj B, conj A]]` for possibly rectangular blocks.
pub fn assemble(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (r, c) = a.shape();
    let mut m = CMatrix::zeros(2 * r, 2 * c);
    m.view_mut((0, 0), (r, c)).copy_from(a);
    m.view_mut((0, c), (r, c)).copy_from(b);
    m.view_mut((r, 0), (r, c)).copy_from(&b.map(|z| z.conj()));
    m.view_mut((r, c), (r, c)).copy_from(&a.map(|z| z.conj()));
    m
}

/// Orthonormal-basis coordinates of `f`, truncated or padded to `n` modes.
pub fn to_coords(f: &CircleFunction, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(2 * n, 1, |i, _| {
        let (k, sign) = if i < n { (i + 1, 1) } else { (i - n + 1, -1) };
        f.coeff(sign * k as i64) * (k as f64).sqrt()
    })
}

/// Inverse of [`to_coords`].
pub fn from_coords(x: &DMatrix<C64>) -> CircleFunction {
    let n = x.nrows() / 2;
    let pos = (0..n)
        .map(|k| x[(k, 0)] / ((k + 1) as f64).sqrt())
        .collect();
    let neg = (0..n)
        .map(|k| x[(n + k, 0)] / ((k + 1) as f64).sqrt())
        .collect();
    CircleFunction::from_parts(pos, neg).expect("equal halves")
}

fn lift_samples(map: &CircleMap, grid: &SampleGrid) -> Vec<f64> {
    if map.grid() == grid {
        map.samples().to_vec()
    } else {
        grid.points().iter().map(|&t| map.lift(t)).collect()
    }
}

/// `f o map` with the mean removed, analysed on `grid` up to
/// `grid.resolved_bandlimit()` modes.
pub fn pullback_function(
    map: &CircleMap,
    f: &CircleFunction,
    grid: &SampleGrid,
) -> Result<CircleFunction> {
    let lift = lift_samples(map, grid);
    let values: Vec<C64> = lift.iter().map(|&t| f.eval(t)).collect();
    let spec = spectrum(&values, grid);
    let tail = spectral_tail(&spec);
    if tail > ALIASING_TOL {
        return Err(Error::Aliasing {
            tail,
            limit: ALIASING_TOL,
            grid: grid.size(),
        });
    }
    let m = grid.size();
    let n = grid.resolved_bandlimit();
    let pos = (1..=n).map(|k| spec[k]).collect();
    let neg = (1..=n).map(|k| spec[m - k]).collect();
    let out = CircleFunction::from_parts(pos, neg)?;
    Ok(if f.is_real() { out.real_part() } else { out })
}

/// Rectangular blocks: `A[p][q]` and `B[r][s]` for `p, r <= rows` and
/// `q, s <= cols`, with
/// `A[p][q] = sqrt(p/q) (1/2pi) \int w^q e^{-ip theta}` and
/// `B[r][s] = sqrt(r/s) (1/2pi) \int w^{-s} e^{-ir theta}`, `w = e^{i lift}`.
pub fn pullback_blocks(
    map: &CircleMap,
    rows: usize,
    cols: usize,
    grid: &SampleGrid,
) -> Result<(CMatrix, CMatrix)> {
    if map.degree() != 1 {
        return Err(Error::DegreeNotOne(map.degree()));
    }
    let m = grid.size();
    if m < 2 * rows.max(cols) + 1 {
        return Err(Error::GridTooSmall {
            size: m,
            bandlimit: rows.max(cols),
            required: 2 * rows.max(cols) + 1,
        });
    }
    let lift = lift_samples(map, grid);
    let mut a = CMatrix::zeros(rows, cols);
    let mut b = CMatrix::zeros(rows, cols);
    for q in 1..=cols {
        let wq: Vec<C64> = lift
            .iter()
            .map(|&t| C64::from_polar(1.0, q as f64 * t))
            .collect();
        let spec = spectrum(&wq, grid);
        if q == cols {
            // w^{-q} is the mirror image, so one check covers both blocks.
            let tail = spectral_tail(&spec);
            if tail > ALIASING_TOL {
                return Err(Error::Aliasing {
                    tail,
                    limit: ALIASING_TOL,
                    grid: m,
                });
            }
        }
        for p in 1..=rows {
            let scale = (p as f64 / q as f64).sqrt();
            a[(p - 1, q - 1)] = denoise(spec[p]) * scale;
            // coefficient of e^{ip theta} in conj(w^q) is conj(spec[-p])
            b[(p - 1, q - 1)] = denoise(spec[m - p]).conj() * scale;
        }
    }
    Ok((a, b))
}

/// Coefficients of the unimodular `w^q` below this are rounding noise.
const NOISE_FLOOR: f64 = 8.0 * f64::EPSILON;

fn denoise(c: C64) -> C64 {
    if c.norm() < NOISE_FLOOR {
        C64::new(0.0, 0.0)
    } else {
        c
    }
}

/// Square truncation of the pullback operator at cutoff `n`.
pub fn pullback_matrix(map: &CircleMap, n: usize, grid: &SampleGrid) -> Result<BlockOperator> {
    let (a, b) = pullback_blocks(map, n, n, grid)?;
    BlockOperator::new(a, b)
}

/// Largest singular value of the full complexified matrix.
pub fn operator_norm_estimate(t: &BlockOperator) -> f64 {
    spectral_norm(&t.full())
}

/// `|S(V f, V g) - deg(map) S(f, g)|` for real `f`, `g`.
pub fn invariance_defect(
    map: &CircleMap,
    f: &CircleFunction,
    g: &CircleFunction,
    grid: &SampleGrid,
) -> Result<f64> {
    if !f.is_real() || !g.is_real() {
        return Err(Error::InvalidInput(
            "invariance is checked on real functions".into(),
        ));
    }
    let vf = pullback_function(map, f, grid)?;
    let vg = pullback_function(map, g, grid)?;
    let lhs = symplectic_fourier(&vf, &vg);
    let rhs = symplectic_fourier(f, g) * map.degree() as f64;
    Ok((lhs - rhs).norm())
}

/// Unitarity of the `W+` block on the first `cols` basis vectors, with rows
/// taken up to the grid's resolved bandlimit so that no image mass is cut
/// off: returns `(||A^* A - I||_2, ||B||_2)`.
pub fn unitarity_defect(map: &CircleMap, cols: usize, grid: &SampleGrid) -> Result<(f64, f64)> {
    let rows = grid.resolved_bandlimit().max(cols);
    let (a, b) = pullback_blocks(map, rows, cols, grid)?;
    let gram = a.adjoint() * &a - CMatrix::identity(cols, cols);
    Ok((spectral_norm(&gram), spectral_norm(&b)))
}

/// `max |T^T S T - S|` on the first `cols` basis vectors of each polarity,
/// with rows taken up to the grid's resolved bandlimit.
pub fn symplectic_defect(map: &CircleMap, cols: usize, grid: &SampleGrid) -> Result<f64> {
    let rows = grid.resolved_bandlimit().max(cols);
    let (a, b) = pullback_blocks(map, rows, cols, grid)?;
    let t = assemble(&a, &b);
    let lhs = t.transpose() * form_matrix(rows) * &t;
    Ok(max_abs(&(lhs - form_matrix(cols))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::{make_map, MapDescriptor};
    use crate::fourier::norm_squared;

    fn grid() -> SampleGrid {
        SampleGrid::new(1024)
    }

    #[test]
    fn coords_round_trip() {
        let f =
            CircleFunction::from_modes(3, &[(2, C64::new(1.0, -1.0)), (-3, C64::new(0.5, 0.0))])
                .unwrap();
        let x = to_coords(&f, 3);
        assert!((x[(1, 0)] - C64::new(1.0, -1.0) * 2f64.sqrt()).norm() < 1e-15);
        assert!(from_coords(&x).max_abs_diff(&f) < 1e-15);
        // coordinates are orthonormal: |x|^2 = ||f||^2
        assert!((x.norm_squared() - norm_squared(&f)).abs() < 1e-14);
    }

    #[test]
    fn identity_pullbacks() {
        let id = make_map(&MapDescriptor::Identity, &grid()).unwrap();
        let f = CircleFunction::cos(3, 4);
        let v = pullback_function(&id, &f, &grid()).unwrap();
        assert!(v.max_abs_diff(&f) < 1e-15);
        let t = pullback_matrix(&id, 8, &grid()).unwrap();
        assert!(max_abs(&(t.a() - CMatrix::identity(8, 8))) < 1e-14);
        assert!(max_abs(t.b()) < 1e-14);
        assert!((operator_norm_estimate(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_pullbacks() {
        let alpha = 0.8;
        let r = make_map(&MapDescriptor::rotation(alpha), &grid()).unwrap();
        let v = pullback_function(&r, &CircleFunction::exp_mode(1, 2), &grid()).unwrap();
        assert!((v.coeff(1) - C64::from_polar(1.0, alpha)).norm() < 1e-14);
        let t = pullback_matrix(&r, 6, &grid()).unwrap();
        for q in 1..=6 {
            let expected = C64::from_polar(1.0, q as f64 * alpha);
            assert!((t.a()[(q - 1, q - 1)] - expected).norm() < 1e-13);
        }
        assert!(max_abs(t.b()) < 1e-14);
        assert!((operator_norm_estimate(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_map_doubles_frequency() {
        let p = make_map(&MapDescriptor::Power { k: 2 }, &grid()).unwrap();
        let v = pullback_function(&p, &CircleFunction::cos(1, 2), &grid()).unwrap();
        assert!(v.max_abs_diff(&CircleFunction::cos(2, 2)) < 1e-15);
        assert!(matches!(
            pullback_matrix(&p, 4, &grid()),
            Err(Error::DegreeNotOne(2))
        ));
    }

    #[test]
    fn power_map_scales_the_form() {
        let p = make_map(&MapDescriptor::Power { k: 2 }, &grid()).unwrap();
        let d = invariance_defect(
            &p,
            &CircleFunction::cos(1, 1),
            &CircleFunction::sin(1, 1),
            &grid(),
        )
        .unwrap();
        assert!(d < 1e-14);
    }

    #[test]
    fn aliasing_guard_trips_on_coarse_grid() {
        let m = make_map(
            &MapDescriptor::moebius(C64::new(0.9, 0.0), 0.0),
            &SampleGrid::new(64),
        )
        .unwrap();
        let err = pullback_matrix(&m, 8, &SampleGrid::new(64)).unwrap_err();
        assert!(matches!(err, Error::Aliasing { .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn json_shape() {
        let t = BlockOperator::identity(2);
        let s = serde_json::to_string(&t).unwrap();
        assert!(
            s.starts_with(r#"{"cutoff":2,"A":[[{"re":1.0,"im":0.0}"#),
            "{s}"
        );
        let back: BlockOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}

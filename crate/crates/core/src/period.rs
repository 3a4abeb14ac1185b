//! Period matrices `Z = conj(B) A^{-1}` of circle maps, the Siegel disc, the
//! symplectic action on it, the Rauch variational formula and the quantum
//! integrability residual.

use serde::{Deserialize, Serialize};

use crate::circle_map::{compose, make_map, CircleMap, MapDescriptor};
use crate::error::{Error, Result};
use crate::fourier::{analyze, h_half_norm, synthesize, CircleFunction, SampleGrid, C64};
use crate::linalg::{
    condition_number, hermitian_min_eigenvalue, max_abs, right_solve, spectral_norm,
    standard_structure, subspace_distance, CMatrix,
};
use crate::pullback::{from_coords, pullback_matrix, to_coords, BlockOperator};
use crate::quantum::deformed_structure;

/// Condition number of `A` above which the period matrix is refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodMatrix {
    cutoff: usize,
    #[serde(rename = "Z", with = "crate::json::matrix")]
    z: CMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<MapDescriptor>,
    #[serde(
        rename = "condition_of_A",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    condition_of_a: Option<f64>,
}

impl PeriodMatrix {
    pub fn new(z: CMatrix) -> Result<Self> {
        if z.nrows() != z.ncols() {
            return Err(Error::Dimension(format!(
                "Z must be square, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        Ok(PeriodMatrix {
            cutoff: z.nrows(),
            z,
            source: None,
            condition_of_a: None,
        })
    }

    pub fn zero(n: usize) -> Self {
        PeriodMatrix::new(CMatrix::zeros(n, n)).expect("square")
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    pub fn source(&self) -> Option<&MapDescriptor> {
        self.source.as_ref()
    }

    pub fn condition_of_a(&self) -> Option<f64> {
        self.condition_of_a
    }

    /// Basis of the graph `{(x, Z x)}` as the columns of `[I; Z]`.
    pub fn graph(&self) -> CMatrix {
        let n = self.cutoff;
        let mut g = CMatrix::zeros(2 * n, n);
        g.view_mut((0, 0), (n, n)).fill_with_identity();
        g.view_mut((n, 0), (n, n)).copy_from(&self.z);
        g
    }

    /// Checks that deserialized data agrees with its declared cutoff.
    pub fn validate(&self) -> Result<()> {
        if self.z.nrows() != self.cutoff || self.z.ncols() != self.cutoff {
            return Err(Error::Dimension(format!(
                "cutoff {} but Z is {}x{}",
                self.cutoff,
                self.z.nrows(),
                self.z.ncols()
            )));
        }
        Ok(())
    }
}

/// `Z = conj(B) A^{-1}` for the pullback blocks of `map` truncated at `n`.
pub fn period_matrix(map: &CircleMap, n: usize, grid: &SampleGrid) -> Result<PeriodMatrix> {
    let mut z = period_from_blocks(&pullback_matrix(map, n, grid)?)?;
    z.source = Some(map.descriptor().clone());
    Ok(z)
}

/// `Z = conj(B) A^{-1}` for given blocks.
pub fn period_from_blocks(t: &BlockOperator) -> Result<PeriodMatrix> {
    let cond = condition_number(t.a());
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let z = right_solve(t.a(), &t.b().map(|c| c.conj())).ok_or(Error::IllConditioned(cond))?;
    Ok(PeriodMatrix {
        cutoff: t.cutoff(),
        z,
        source: None,
        condition_of_a: Some(cond),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelReport {
    pub symmetry_defect: f64,
    pub sigma_max: f64,
    #[serde(rename = "min_eig_I_minus_ZZbar")]
    pub min_eig_i_minus_zzbar: f64,
    #[serde(rename = "condition_of_A")]
    pub condition_of_a: Option<f64>,
    pub member: bool,
}

/// Siegel-disc diagnostics. The eigenvalue is taken of `I - Z Z^*`, which is
/// Hermitian for any `Z` and equals `I - Z conj(Z)` when `Z` is symmetric.
/// `member` requires the symmetry defect to be at most `tol`.
pub fn siegel_membership(z: &PeriodMatrix, tol: f64) -> SiegelReport {
    let n = z.cutoff;
    let symmetry_defect = max_abs(&(&z.z - z.z.transpose()));
    let sigma_max = spectral_norm(&z.z);
    let min_eig = if n == 0 {
        1.0
    } else {
        hermitian_min_eigenvalue(&(CMatrix::identity(n, n) - &z.z * z.z.adjoint()))
    };
    SiegelReport {
        symmetry_defect,
        sigma_max,
        min_eig_i_minus_zzbar: min_eig,
        condition_of_a: z.condition_of_a,
        member: symmetry_defect <= tol && sigma_max < 1.0 && min_eig > 0.0,
    }
}

/// `(conj(B) + conj(A) Z) (A + B Z)^{-1}`.
pub fn siegel_action(t: &BlockOperator, z: &PeriodMatrix) -> Result<PeriodMatrix> {
    if t.cutoff() != z.cutoff {
        return Err(Error::Dimension(format!(
            "operator cutoff {} but Z cutoff {}",
            t.cutoff(),
            z.cutoff
        )));
    }
    let den = t.a() + t.b() * &z.z;
    let num = t.b().map(|c| c.conj()) + t.a().map(|c| c.conj()) * &z.z;
    let cond = condition_number(&den);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularAction(cond));
    }
    let out = right_solve(&den, &num).ok_or(Error::SingularAction(cond))?;
    Ok(PeriodMatrix {
        cutoff: z.cutoff,
        z: out,
        source: None,
        condition_of_a: None,
    })
}

/// Principal-angle distance between the graph of `Z(phi o psi)` and the image
/// of the graph of `Z(phi)` under `T_psi`.
pub fn equivariance_defect(
    phi: &CircleMap,
    psi: &CircleMap,
    n: usize,
    grid: &SampleGrid,
) -> Result<f64> {
    let composite = compose(phi, psi)?;
    let z_comp = period_matrix(&composite, n, grid)?;
    let z_phi = period_matrix(phi, n, grid)?;
    let t_psi = pullback_matrix(psi, n, grid)?;
    let moved = t_psi.full() * z_phi.graph();
    Ok(subspace_distance(&z_comp.graph(), &moved))
}

/// Beltrami direction `conj(z)^m` on the disc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeltramiMonomial(pub u32);

impl BeltramiMonomial {
    pub fn m(self) -> u32 {
        self.0
    }
}

/// Closed form of the derivative of `Z` in the direction `nu`: entry `(r, s)`
/// is `sqrt(rs) / (r+s-1)` on the antidiagonal `r + s = m + 2`.
pub fn rauch_derivative(nu: BeltramiMonomial, n: usize) -> CMatrix {
    let target = nu.0 as usize + 2;
    CMatrix::from_fn(n, n, |i, j| {
        let (r, s) = (i + 1, j + 1);
        if r + s == target {
            C64::new(((r * s) as f64).sqrt() / (r + s - 1) as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `max |Z(rauch_flow(m, eps))/eps - D|` over entries with
/// `r + s <= min(n, 10)`.
pub fn rauch_fd_defect(m: u32, eps: f64, n: usize, grid: &SampleGrid) -> Result<f64> {
    let map = make_map(&MapDescriptor::rauch_flow(m, eps), grid)?;
    let z = period_matrix(&map, n, grid)?;
    let d = rauch_derivative(BeltramiMonomial(m), n);
    let band = n.min(10);
    let mut worst: f64 = 0.0;
    for r in 1..=n {
        for s in 1..=n {
            if r + s <= band {
                worst = worst.max((z.z[(r - 1, s - 1)] / eps - d[(r - 1, s - 1)]).norm());
            }
        }
    }
    Ok(worst)
}

/// Complex structure whose `-i` eigenspace is the graph of `Z` and whose
/// `+i` eigenspace is its conjugate: `P J0 P^{-1}` with
/// `P = [[I, conj Z], [Z, I]]`.
pub fn complex_structure_from_period(z: &PeriodMatrix) -> Result<CMatrix> {
    let n = z.cutoff;
    let mut p = CMatrix::identity(2 * n, 2 * n);
    p.view_mut((0, n), (n, n)).copy_from(&z.z.map(|c| c.conj()));
    p.view_mut((n, 0), (n, n)).copy_from(&z.z);
    let cond = condition_number(&p);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let pj = &p * standard_structure(n);
    right_solve(&p, &pj).ok_or(Error::IllConditioned(cond))
}

/// Where a complex structure on the truncated space comes from.
#[derive(Clone, Copy, Debug)]
pub enum StructureSource<'a> {
    /// `T_h J0 T_h^{-1}` at the given cutoff.
    Map { map: &'a CircleMap, cutoff: usize },
    /// The graph construction from a period matrix.
    Period(&'a PeriodMatrix),
    /// An explicit `2N x 2N` matrix.
    Matrix(&'a CMatrix),
}

impl StructureSource<'_> {
    pub fn matrix(&self, grid: &SampleGrid) -> Result<CMatrix> {
        match self {
            StructureSource::Map { map, cutoff } => {
                Ok(deformed_structure(map, *cutoff, grid)?.full())
            }
            StructureSource::Period(z) => complex_structure_from_period(z),
            StructureSource::Matrix(j) => {
                if j.nrows() != j.ncols() || j.nrows() % 2 != 0 {
                    return Err(Error::Dimension("structure must be 2N x 2N".into()));
                }
                Ok((*j).clone())
            }
        }
    }
}

/// Products of bandlimited functions, exact on a grid of at least `8n`
/// points, re-truncated to `n` modes with the mean dropped.
struct ProductGrid {
    grid: SampleGrid,
    n: usize,
}

impl ProductGrid {
    fn new(n: usize) -> Self {
        ProductGrid {
            grid: SampleGrid::new((8 * n).max(8).next_power_of_two()),
            n,
        }
    }

    fn values(&self, f: &CircleFunction) -> Vec<C64> {
        synthesize(f, &self.grid)
    }

    fn product(&self, a: &[C64], b: &[C64]) -> CircleFunction {
        let p: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        analyze(&p, &self.grid, self.n).expect("grid resolves the cutoff")
    }
}

/// Worst relative defect of `J[fg - Jf Jg] = f Jg + g Jf` over all pairs of
/// trial functions (including each function with itself).
pub fn integrability_residual(
    source: StructureSource<'_>,
    trials: &[CircleFunction],
    grid: &SampleGrid,
) -> Result<f64> {
    let j = source.matrix(grid)?;
    let n = j.nrows() / 2;
    for f in trials {
        if !f.is_real() {
            return Err(Error::InvalidInput("trial functions must be real".into()));
        }
        if 2 * f.bandlimit() > n {
            return Err(Error::BandlimitOverflow {
                bandlimit: f.bandlimit(),
                cutoff: n,
            });
        }
    }
    let apply = |f: &CircleFunction| from_coords(&(&j * to_coords(f, n)));
    let pg = ProductGrid::new(n);
    let fv: Vec<Vec<C64>> = trials.iter().map(|f| pg.values(&f.resized(n))).collect();
    let jf: Vec<Vec<C64>> = trials.iter().map(|f| pg.values(&apply(f))).collect();

    let mut worst: f64 = 0.0;
    for a in 0..trials.len() {
        for b in a..trials.len() {
            let scale = h_half_norm(&trials[a]) * h_half_norm(&trials[b]);
            if scale == 0.0 {
                continue;
            }
            let inside = &pg.product(&fv[a], &fv[b]) - &pg.product(&jf[a], &jf[b]);
            let lhs = apply(&inside);
            let rhs = &pg.product(&fv[a], &jf[b]) + &pg.product(&fv[b], &jf[a]);
            worst = worst.max(h_half_norm(&(&lhs - &rhs)) / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_zero_period() {
        let grid = SampleGrid::new(256);
        let id = make_map(&MapDescriptor::Identity, &grid).unwrap();
        let z = period_matrix(&id, 8, &grid).unwrap();
        assert_eq!(max_abs(z.z()), 0.0);
        assert!((z.condition_of_a().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn siegel_report_examples() {
        let r = siegel_membership(&PeriodMatrix::zero(4), 1e-12);
        assert_eq!(
            (r.symmetry_defect, r.sigma_max, r.min_eig_i_minus_zzbar),
            (0.0, 0.0, 1.0)
        );
        assert!(r.member);

        let d = PeriodMatrix::new(CMatrix::identity(3, 3) * C64::new(0.5, 0.0)).unwrap();
        let r = siegel_membership(&d, 1e-12);
        assert!((r.sigma_max - 0.5).abs() < 1e-14);
        assert!((r.min_eig_i_minus_zzbar - 0.75).abs() < 1e-14);
        assert!(r.member);

        let big = PeriodMatrix::new(CMatrix::identity(2, 2) * C64::new(1.5, 0.0)).unwrap();
        assert!(!siegel_membership(&big, 1e-12).member);
    }

    #[test]
    fn identity_action_is_trivial() {
        let z = PeriodMatrix::new(CMatrix::from_fn(3, 3, |i, j| {
            C64::new(0.1 / (1 + i + j) as f64, 0.02 * (i * j) as f64)
        }))
        .unwrap();
        let out = siegel_action(&BlockOperator::identity(3), &z).unwrap();
        assert!(max_abs(&(out.z() - z.z())) < 1e-15);
    }

    #[test]
    fn rauch_closed_form() {
        let d0 = rauch_derivative(BeltramiMonomial(0), 4);
        assert_eq!(d0[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(max_abs(&d0), 1.0);
        let d1 = rauch_derivative(BeltramiMonomial(1), 4);
        assert!((d1[(0, 1)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d1[(0, 1)], d1[(1, 0)]);
        assert_eq!(d1[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn graph_structure_squares_to_minus_one() {
        let z = PeriodMatrix::new(CMatrix::from_fn(3, 3, |i, j| {
            C64::new(0.2 / (1 + i + j) as f64, 0.05)
        }))
        .unwrap();
        let j = complex_structure_from_period(&z).unwrap();
        let id = CMatrix::identity(6, 6);
        assert!(max_abs(&(&j * &j + id)) < 1e-13);
        // the graph is the -i eigenspace
        let g = z.graph();
        assert!(max_abs(&(&j * &g + &g * crate::fourier::I)) < 1e-13);
    }

    #[test]
    fn hand_computed_integrability_case() {
        let j0 = standard_structure(4);
        let f = CircleFunction::cos(1, 1);
        let g = CircleFunction::sin(1, 1);
        let r = integrability_residual(StructureSource::Matrix(&j0), &[f, g], &SampleGrid::new(64))
            .unwrap();
        assert!(r < 1e-15, "{r}");
    }

    #[test]
    fn trial_bandlimit_is_checked() {
        let j0 = standard_structure(4);
        let err = integrability_residual(
            StructureSource::Matrix(&j0),
            &[CircleFunction::cos(3, 3)],
            &SampleGrid::new(64),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::BandlimitOverflow {
                bandlimit: 3,
                cutoff: 4
            }
        ));
    }

    #[test]
    fn json_round_trip() {
        let grid = SampleGrid::new(128);
        let id = make_map(&MapDescriptor::rotation(0.3), &grid).unwrap();
        let z = period_matrix(&id, 2, &grid).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        assert!(
            s.contains(r#""source":{"type":"rotation","alpha":0.3}"#),
            "{s}"
        );
        let back: PeriodMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
    }
}

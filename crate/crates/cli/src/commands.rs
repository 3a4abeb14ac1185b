use serde::Serialize;

use hhp_core::circle_map::{make_map, CircleMap, MapDescriptor};
use hhp_core::fourier::{douglas_energy, h_half_norm, hilbert_transform, norm_squared};
use hhp_core::linalg::{max_abs, CMatrix};
use hhp_core::period::{
    equivariance_defect, integrability_residual, period_from_blocks, period_matrix,
    rauch_derivative, rauch_fd_defect, siegel_action, siegel_membership, BeltramiMonomial,
    PeriodMatrix, SiegelReport, StructureSource,
};
use hhp_core::pullback::{pullback_matrix, BlockOperator};
use hhp_core::quantum::{
    chordal_diagonal_limit, diagonal_limit, hs_bracket_check, hs_norm, hs_squared_closed_form,
    quantum_derivative_matrix, DiagonalLimit, KernelOrder, QuantumOperator,
};
use hhp_core::suite::{run_suite, CriterionOutcome};
use hhp_core::{CircleFunction, SampleGrid};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{emit, emit_csv, load};

fn out(cfg: &RunConfig) -> Option<&std::path::Path> {
    cfg.out.as_deref()
}

fn grid(cfg: &RunConfig) -> SampleGrid {
    SampleGrid::new(cfg.grid)
}

fn map_arg(arg: &str, cfg: &RunConfig) -> Result<CircleMap, CliError> {
    let d: MapDescriptor = load(arg, "map descriptor")?;
    Ok(make_map(&d, &grid(cfg))?)
}

fn function_arg(arg: &str) -> Result<CircleFunction, CliError> {
    load(arg, "circle function")
}

#[derive(Serialize)]
struct NormReport {
    bandlimit: usize,
    real: bool,
    norm_squared: f64,
    h_half_norm: f64,
}

pub fn norm(cfg: &RunConfig, input: &str) -> Result<(), CliError> {
    let f = function_arg(input)?;
    emit(
        &NormReport {
            bandlimit: f.bandlimit(),
            real: f.is_real(),
            norm_squared: norm_squared(&f),
            h_half_norm: h_half_norm(&f),
        },
        out(cfg),
    )
}

pub fn hilbert(cfg: &RunConfig, input: &str) -> Result<(), CliError> {
    let f = function_arg(input)?;
    emit(&hilbert_transform(&f), out(cfg))
}

#[derive(Serialize)]
struct EnergyRow {
    grid: usize,
    energy: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct EnergyReport {
    grid: usize,
    energy: f64,
    h_half_norm_squared: f64,
    relative_error: f64,
    tol: f64,
    passed: bool,
    convergence: Vec<EnergyRow>,
}

pub fn energy(cfg: &RunConfig, input: &str, tol: Option<f64>) -> Result<(), CliError> {
    let f = function_arg(input)?;
    let exact = norm_squared(&f);
    let rel = |e: f64| {
        if exact == 0.0 {
            e.abs()
        } else {
            (e - exact).abs() / exact
        }
    };
    let mut sizes: Vec<usize> = std::iter::successors(Some(8usize), |m| Some(m * 2))
        .take_while(|&m| m < cfg.grid)
        .collect();
    sizes.push(cfg.grid);
    let mut rows = Vec::new();
    for m in sizes {
        let e = douglas_energy(&f, &SampleGrid::half_cell(m))?;
        rows.push(EnergyRow {
            grid: m,
            energy: e,
            relative_error: rel(e),
        });
    }
    let last = rows.last().expect("at least one grid");
    let tol = tol.unwrap_or(cfg.spectral_tol);
    let report = EnergyReport {
        grid: cfg.grid,
        energy: last.energy,
        h_half_norm_squared: exact,
        relative_error: last.relative_error,
        tol,
        passed: last.relative_error <= tol,
        convergence: rows,
    };
    emit_csv(&report.convergence, out(cfg))?;
    emit(&report, out(cfg))
}

pub fn pullback(cfg: &RunConfig, map: &str) -> Result<(), CliError> {
    let m = map_arg(map, cfg)?;
    emit(&pullback_matrix(&m, cfg.cutoff, &grid(cfg))?, out(cfg))
}

fn period_arg(
    cfg: &RunConfig,
    map: Option<&str>,
    blocks: Option<&str>,
) -> Result<PeriodMatrix, CliError> {
    match (map, blocks) {
        (Some(m), _) => Ok(period_matrix(&map_arg(m, cfg)?, cfg.cutoff, &grid(cfg))?),
        (None, Some(b)) => {
            let t: BlockOperator = load(b, "pullback blocks")?;
            t.validate()?;
            Ok(period_from_blocks(&t)?)
        }
        (None, None) => Err(CliError::Usage("give --map or --matrix".into())),
    }
}

pub fn period(cfg: &RunConfig, map: Option<&str>, matrix: Option<&str>) -> Result<(), CliError> {
    emit(&period_arg(cfg, map, matrix)?, out(cfg))
}

#[derive(Serialize)]
struct SiegelCheck {
    #[serde(flatten)]
    report: SiegelReport,
    cutoff: usize,
    tol: f64,
}

pub fn siegel_check(
    cfg: &RunConfig,
    map: Option<&str>,
    matrix: Option<&str>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let z = match (map, matrix) {
        (Some(m), _) => period_matrix(&map_arg(m, cfg)?, cfg.cutoff, &grid(cfg))?,
        (None, Some(text)) => {
            let z: PeriodMatrix = load(text, "period matrix")?;
            z.validate()?;
            z
        }
        (None, None) => return Err(CliError::Usage("give --map or --matrix".into())),
    };
    let tol = tol.unwrap_or(cfg.matrix_tol);
    emit(
        &SiegelCheck {
            report: siegel_membership(&z, tol),
            cutoff: z.cutoff(),
            tol,
        },
        out(cfg),
    )
}

#[derive(Serialize)]
struct RauchRow {
    eps: f64,
    defect: f64,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct RauchReport {
    m: u32,
    eps: f64,
    cutoff: usize,
    grid: usize,
    defect: f64,
    derivative_max: f64,
    relative_defect: f64,
    #[serde(with = "hhp_core::json::matrix")]
    derivative: CMatrix,
    convergence: Vec<RauchRow>,
}

pub fn rauch_check(cfg: &RunConfig, m: u32, eps: f64) -> Result<(), CliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(CliError::Usage(format!(
            "--eps must be positive, got {eps}"
        )));
    }
    let g = grid(cfg);
    let d = rauch_derivative(BeltramiMonomial(m), cfg.cutoff);
    let mut rows: Vec<RauchRow> = Vec::new();
    for k in 0..4 {
        let e = eps / f64::from(1u32 << k);
        let defect = rauch_fd_defect(m, e, cfg.cutoff, &g)?;
        let ratio = rows.last().map(|p| defect / p.defect);
        rows.push(RauchRow {
            eps: e,
            defect,
            ratio,
        });
    }
    let derivative_max = max_abs(&d);
    let defect = rows[0].defect;
    let report = RauchReport {
        m,
        eps,
        cutoff: cfg.cutoff,
        grid: cfg.grid,
        defect,
        derivative_max,
        relative_defect: defect / derivative_max,
        derivative: d,
        convergence: rows,
    };
    emit_csv(&report.convergence, out(cfg))?;
    emit(&report, out(cfg))
}

#[derive(Serialize)]
struct EquivarianceReport {
    cutoff: usize,
    phi: MapDescriptor,
    psi: MapDescriptor,
    defect: f64,
    action_defect: f64,
    tol: f64,
    passed: bool,
}

pub fn equivariance(cfg: &RunConfig, maps: &[String], tol: Option<f64>) -> Result<(), CliError> {
    let [phi, psi] = maps else {
        return Err(CliError::Usage(format!(
            "equivariance takes exactly two --map arguments, got {}",
            maps.len()
        )));
    };
    let g = grid(cfg);
    let (p, q) = (map_arg(phi, cfg)?, map_arg(psi, cfg)?);
    let n = cfg.cutoff;
    let defect = equivariance_defect(&p, &q, n, &g)?;
    let composite = make_map(
        &MapDescriptor::compose(p.descriptor().clone(), q.descriptor().clone()),
        &g,
    )?;
    let moved = siegel_action(&pullback_matrix(&q, n, &g)?, &period_matrix(&p, n, &g)?)?;
    let action_defect = max_abs(&(moved.z() - period_matrix(&composite, n, &g)?.z()));
    let tol = tol.unwrap_or(cfg.matrix_tol);
    emit(
        &EquivarianceReport {
            cutoff: n,
            phi: p.descriptor().clone(),
            psi: q.descriptor().clone(),
            defect,
            action_defect,
            tol,
            passed: defect <= tol && action_defect <= tol,
        },
        out(cfg),
    )
}

#[derive(Serialize)]
struct IntegrabilityReport {
    source: &'static str,
    cutoff: usize,
    trials: usize,
    residual: f64,
    tol: f64,
    passed: bool,
}

pub fn integrability(
    cfg: &RunConfig,
    map: Option<&str>,
    matrix: Option<&str>,
    input: Option<&str>,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let g = grid(cfg);
    let z;
    let h;
    let (source, label, cutoff) = match (map, matrix) {
        (Some(m), _) => {
            h = map_arg(m, cfg)?;
            (
                StructureSource::Map {
                    map: &h,
                    cutoff: cfg.cutoff,
                },
                "map",
                cfg.cutoff,
            )
        }
        (None, Some(text)) => {
            z = load::<PeriodMatrix>(text, "period matrix")?;
            z.validate()?;
            (StructureSource::Period(&z), "period", z.cutoff())
        }
        (None, None) => return Err(CliError::Usage("give --map or --matrix".into())),
    };
    let trials: Vec<CircleFunction> = match input {
        Some(text) => load(text, "trial functions")?,
        None => {
            let k = (cutoff / 2).min(8);
            (1..=k)
                .flat_map(|j| [CircleFunction::cos(j, k), CircleFunction::sin(j, k)])
                .collect()
        }
    };
    let residual = integrability_residual(source, &trials, &g)?;
    let tol = tol.unwrap_or(cfg.matrix_tol);
    emit(
        &IntegrabilityReport {
            source: label,
            cutoff,
            trials: trials.len(),
            residual,
            tol,
            passed: residual <= tol,
        },
        out(cfg),
    )
}

#[derive(Serialize)]
struct HsReport {
    cutoff: usize,
    source_bandlimit: usize,
    hs_norm: f64,
    hs_squared: f64,
    closed_form: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_ok: Option<bool>,
    operator: QuantumOperator,
}

pub fn quantum_hs(cfg: &RunConfig, input: &str) -> Result<(), CliError> {
    let f = function_arg(input)?;
    let op = quantum_derivative_matrix(&f, cfg.cutoff)?;
    let hs = hs_norm(&op)?;
    let bracket = if f.is_real() {
        Some(hs_bracket_check(&f)?)
    } else {
        None
    };
    emit(
        &HsReport {
            cutoff: cfg.cutoff,
            source_bandlimit: f.bandlimit(),
            hs_norm: hs,
            hs_squared: hs * hs,
            closed_form: hs_squared_closed_form(&f),
            norm_squared: bracket.map(|b| b.norm_squared),
            lower_ok: bracket.map(|b| b.lower_ok),
            upper_ok: bracket.map(|b| b.upper_ok),
            operator: op,
        },
        out(cfg),
    )
}

#[derive(Serialize)]
struct KernelRow {
    delta: f64,
    value: f64,
}

#[derive(Serialize)]
struct KernelReport {
    #[serde(flatten)]
    limit: DiagonalLimit,
    tol: f64,
    passed: bool,
}

pub fn kernel(
    cfg: &RunConfig,
    map: &str,
    order: u8,
    x: f64,
    window: f64,
    chordal: bool,
    tol: Option<f64>,
) -> Result<(), CliError> {
    if !(window.is_finite() && window > 0.0) {
        return Err(CliError::Usage(format!(
            "--window must be positive, got {window}"
        )));
    }
    if !x.is_finite() {
        return Err(CliError::Usage("--x must be finite".into()));
    }
    let h = map_arg(map, cfg)?;
    let order = KernelOrder::try_from(order)?;
    let deltas: Vec<f64> = (0..4).map(|k| window / f64::from(1u32 << k)).collect();
    let limit = if chordal {
        if order != KernelOrder::Second {
            return Err(CliError::Usage("--chordal applies to order 2 only".into()));
        }
        chordal_diagonal_limit(&h, x, &deltas)?
    } else {
        diagonal_limit(&h, order, x, &deltas)?
    };
    let rows: Vec<KernelRow> = limit
        .deltas
        .iter()
        .zip(&limit.values)
        .map(|(&delta, &value)| KernelRow { delta, value })
        .collect();
    emit_csv(&rows, out(cfg))?;
    let tol = tol.unwrap_or(cfg.spectral_tol);
    let passed = limit.defect <= tol;
    emit(&KernelReport { limit, tol, passed }, out(cfg))
}

#[derive(Serialize)]
struct SuiteReport {
    seed: u64,
    passed: bool,
    criteria: Vec<CriterionOutcome>,
}

pub fn invariance_suite(cfg: &RunConfig) -> Result<(), CliError> {
    let criteria = run_suite(cfg.seed);
    for c in &criteria {
        eprintln!("{}", c.summary());
    }
    let failed = criteria.iter().filter(|c| !c.passed).count();
    let total = criteria.len();
    emit(
        &SuiteReport {
            seed: cfg.seed,
            passed: failed == 0,
            criteria,
        },
        out(cfg),
    )?;
    if failed > 0 {
        return Err(CliError::SuiteFailed(failed, total));
    }
    Ok(())
}

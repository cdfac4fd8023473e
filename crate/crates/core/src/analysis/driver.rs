use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::pow;

use super::cases::TestCase;
use super::norms::error_norms_with;
use super::rates::{dof_slope, eoc};
use crate::coupling::{
    assemble_rhs_direct_with, assemble_rhs_regularized_with, surface_quadrature, RegularizedOptions, MAX_VOL_ORDER, SURFACE_QUAD_ORDER,
    VOLUME_QUAD_ORDER,
};
use crate::exec::{CellMap, Clock};
use crate::fem::{apply_dirichlet, assemble_stiffness_with, solve_cg, FeFunction, FeSpace, CG_REL_TOL};
use crate::kernels::{KernelKind, ScaledDirac};
use crate::mesh::{boundary_clearance, build_interface, build_volume, refine_global, DomainCase, VolumeMesh};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// Gauss points per axis for the error integrals.
pub const ERROR_QUAD_ORDER: usize = 4;
/// Gauss points per axis for the stiffness matrix.
pub const STIFFNESS_QUAD_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RhsMode {
    /// Mollified double quadrature `⟨F^ε, φ_i⟩`.
    Regularized,
    /// Interface quadrature located in the volume mesh, `⟨F, φ_i⟩`.
    Direct,
}

impl RhsMode {
    pub fn name(self) -> &'static str {
        match self {
            RhsMode::Regularized => "regularized",
            RhsMode::Direct => "direct",
        }
    }
}

impl fmt::Display for RhsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RhsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regularized" => Ok(RhsMode::Regularized),
            "direct" => Ok(RhsMode::Direct),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown rhs mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case: DomainCase,
    pub kernel: KernelKind,
    pub rhs_mode: RhsMode,
    /// `ε = c h^q`
    pub q: f64,
    pub c: f64,
    /// Number of refinement levels to run.
    pub levels: u32,
    /// Level of the first (coarsest) mesh; `None` picks the first level at
    /// which the support check passes.
    pub start_level: Option<u32>,
    pub surface_quad_order: usize,
    pub volume_quad_order: usize,
    pub deterministic: bool,
    /// Skip the check that `δ_ε` centered on the interface stays inside `Ω`.
    pub allow_support_leak: bool,
    pub out_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(case: DomainCase) -> Self {
        Self {
            case,
            kernel: KernelKind::TensorC1,
            rhs_mode: RhsMode::Regularized,
            q: 1.0,
            c: 1.0,
            levels: 4,
            start_level: None,
            surface_quad_order: SURFACE_QUAD_ORDER,
            volume_quad_order: VOLUME_QUAD_ORDER,
            deterministic: false,
            allow_support_leak: false,
            out_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::InvalidExponent(self.q));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidConfig(alloc::format!("eps factor c must be positive, got {}", self.c)));
        }
        if self.levels == 0 {
            return Err(Error::InvalidConfig("levels must be at least 1".into()));
        }
        if self.surface_quad_order == 0 || self.volume_quad_order == 0 {
            return Err(Error::InvalidConfig("quadrature orders must be at least 1".into()));
        }
        if self.volume_quad_order > MAX_VOL_ORDER {
            return Err(Error::InvalidConfig(alloc::format!("volume quadrature order must be at most {MAX_VOL_ORDER}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h: f64,
    pub h0: f64,
    pub epsilon: f64,
    pub n_dofs: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    /// Against `h`, from the second level on.
    pub eoc_l2: Option<f64>,
    pub eoc_h1: Option<f64>,
    /// Least-squares DoF slope over the trailing window ending at this level.
    pub slope_vs_dofs_l2: Option<f64>,
    pub slope_vs_dofs_h1: Option<f64>,
    pub assemble_ms: f64,
    pub solve_ms: f64,
    /// `Σ_i rhs_i` and `Σ w f^e`: equal for the direct route, close for the
    /// regularized one.
    pub rhs_sum: f64,
    pub interface_load: f64,
    /// `|Γ_{h₀}|` as seen by the interface quadrature.
    pub interface_measure: f64,
    pub cg_iterations: usize,
    pub cg_relative_residual: f64,
}

/// Runs `cfg.levels` levels, refining the previous mesh each time, and
/// returns one row per level in order.
pub fn run_convergence<E: CellMap, C: Clock>(cfg: &ExperimentConfig, exec: &E, clock: &mut C) -> Result<Vec<ConvergenceRow>> {
    cfg.validate()?;
    let mut rows = match cfg.case.dim() {
        2 => run_levels::<2, _, _>(cfg, exec, clock)?,
        3 => run_levels::<3, _, _>(cfg, exec, clock)?,
        d => return Err(Error::UnsupportedDimension(d)),
    };
    fill_rates(&mut rows)?;
    Ok(rows)
}

fn run_levels<const D: usize, E: CellMap, C: Clock>(
    cfg: &ExperimentConfig,
    exec: &E,
    clock: &mut C,
) -> Result<Vec<ConvergenceRow>> {
    let case = TestCase::new(cfg.case);
    let kernel = cfg.kernel.build(D)?;
    let start = match cfg.start_level {
        Some(level) => level,
        None => first_admissible_level::<D>(cfg)?.unwrap_or(0),
    };
    log::debug!("{} / {}: starting at level {start}", cfg.case, cfg.kernel);
    let mut rows = Vec::with_capacity(cfg.levels as usize);
    let mut mesh: Option<VolumeMesh<D>> = None;
    for level in start..start + cfg.levels {
        let current = match mesh.take() {
            None => build_volume::<D>(cfg.case, level)?,
            Some(prev) => refine_global(&prev),
        };
        let row = solve_level(cfg, &case, &kernel, &current, exec, clock)?;
        log::info!(
            "{} level {}: {} dofs, eps {:.4e}, L2 {:.4e}, H1 {:.4e}, {} CG iterations",
            cfg.case,
            row.level,
            row.n_dofs,
            row.epsilon,
            row.err_l2,
            row.err_h1,
            row.cg_iterations
        );
        rows.push(row);
        mesh = Some(current);
    }
    Ok(rows)
}

/// Largest level searched by [`first_admissible_level`].
const MAX_AUTO_LEVEL: u32 = 10;

/// First level whose interface keeps `ε·r₀ + h₀` away from `∂Ω`, for the
/// regularized route; level 0 for the direct route or when leaking is
/// allowed. `None` if no level up to 10 qualifies.
///
/// The boundary of the structured domains is the same polygon at every
/// level, so the level-0 volume mesh suffices for the distance test.
pub fn first_admissible_level<const D: usize>(cfg: &ExperimentConfig) -> Result<Option<u32>> {
    if cfg.rhs_mode == RhsMode::Direct || cfg.allow_support_leak {
        return Ok(Some(0));
    }
    let case = TestCase::new(cfg.case);
    let kernel = cfg.kernel.build(D)?;
    let coarse = build_volume::<D>(cfg.case, 0)?;
    let mut h = coarse.h;
    for level in 0..=MAX_AUTO_LEVEL {
        let surface = build_interface(case.sphere::<D>(), level)?;
        let required = cfg.c * pow(h, cfg.q) * kernel.support_radius() + surface.h0;
        if boundary_clearance(&coarse, &surface, required).is_none() {
            return Ok(Some(level));
        }
        h *= 0.5;
    }
    Ok(None)
}

fn solve_level<const D: usize, E: CellMap, C: Clock>(
    cfg: &ExperimentConfig,
    case: &TestCase,
    kernel: &crate::kernels::MollifierKernel,
    mesh: &VolumeMesh<D>,
    exec: &E,
    clock: &mut C,
) -> Result<ConvergenceRow> {
    let level = mesh.level;
    let surface = build_interface(case.sphere::<D>(), level)?;
    let epsilon = cfg.c * pow(mesh.h, cfg.q);
    let dirac = ScaledDirac::new(*kernel, epsilon)?;
    let regularized = cfg.rhs_mode == RhsMode::Regularized;
    if regularized && !cfg.allow_support_leak {
        let required = dirac.support_radius() + surface.h0;
        if let Some(clearance) = boundary_clearance(mesh, &surface, required) {
            return Err(Error::SupportViolation {
                level,
                clearance,
                required,
            });
        }
    }
    let space = FeSpace::new(mesh);
    let datum = case.f;
    let squad = surface_quadrature(&surface, |_| datum, cfg.surface_quad_order)?;

    let t0 = clock.now_ms();
    let mut rhs = if regularized {
        let opts = RegularizedOptions {
            vol_order: cfg.volume_quad_order,
            facet_diameter: surface.h0,
            // already enforced above, with the stricter vertex-based margin
            check_support: false,
            swap_arguments: false,
            brute_force: false,
        };
        assemble_rhs_regularized_with(&space, &squad, &dirac, &opts, exec)?
    } else {
        assemble_rhs_direct_with(&space, &squad, exec)?
    };
    let t1 = clock.now_ms();
    let rhs_sum: f64 = rhs.iter().sum();

    let mut a = assemble_stiffness_with(&space, &QuadratureRule::gauss(STIFFNESS_QUAD_ORDER), exec)?;
    apply_dirichlet(&space, &mut a, &mut rhs, |x| case.boundary_g(x));
    let n = space.n_dofs();
    let cg = solve_cg(&a, &rhs, CG_REL_TOL, 10 * n)?;
    let t2 = clock.now_ms();

    let fe = FeFunction::new(&space, cg.solution);
    let errors = error_norms_with(&fe, |x| case.exact(x), ERROR_QUAD_ORDER, exec)?;
    Ok(ConvergenceRow {
        level,
        h: mesh.h,
        h0: surface.h0,
        epsilon,
        n_dofs: n,
        err_l2: errors.l2,
        err_h1: errors.h1,
        eoc_l2: None,
        eoc_h1: None,
        slope_vs_dofs_l2: None,
        slope_vs_dofs_h1: None,
        assemble_ms: t1 - t0,
        solve_ms: t2 - t1,
        rhs_sum,
        interface_load: squad.iter().map(|q| q.weight * q.f_value).sum(),
        interface_measure: squad.iter().map(|q| q.weight).sum(),
        cg_iterations: cg.iterations,
        cg_relative_residual: cg.relative_residual,
    })
}

fn fill_rates(rows: &mut [ConvergenceRow]) -> Result<()> {
    let l2: Vec<f64> = rows.iter().map(|r| r.err_l2).collect();
    let h1: Vec<f64> = rows.iter().map(|r| r.err_h1).collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let dofs: Vec<usize> = rows.iter().map(|r| r.n_dofs).collect();
    if rows.len() < 2 {
        return Ok(());
    }
    let e_l2 = eoc(&l2, &hs)?;
    let e_h1 = eoc(&h1, &hs)?;
    for k in 1..rows.len() {
        rows[k].eoc_l2 = Some(e_l2[k - 1]);
        rows[k].eoc_h1 = Some(e_h1[k - 1]);
        rows[k].slope_vs_dofs_l2 = Some(dof_slope(&l2[..=k], &dofs[..=k])?);
        rows[k].slope_vs_dofs_h1 = Some(dof_slope(&h1[..=k], &dofs[..=k])?);
    }
    Ok(())
}

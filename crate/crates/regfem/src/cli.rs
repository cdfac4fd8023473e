//! Command-line parsing. Values come from defaults, then an optional config
//! file, then flags, each layer overriding the previous one.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use regfem_core::analysis::{
    first_admissible_level, predicted_rates, run_convergence, ConvergenceRow, ExperimentConfig, RhsMode,
    STIFFNESS_QUAD_ORDER,
};
use regfem_core::exec::{NoClock, Serial};
use regfem_core::fem::{assemble_stiffness, FeSpace};
use regfem_core::kernels::KernelKind;
use regfem_core::mesh::{build_volume, DomainCase};
use regfem_core::quadrature::QuadratureRule;

use crate::exec::{Rayon, WallClock};
use crate::output::{emit_csv, emit_summary, RateCheck};
use crate::{config_file, meshio, Error, Result};

/// Levels run on the cube when neither a flag nor the config file sets them.
pub const CUBE_DEFAULT_LEVELS: u32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "regfem", version, about = "Convergence runs for mollified interface problems")]
struct Args {
    /// square | lshape | cube
    #[arg(long)]
    case: Option<String>,
    /// radial-c1 | tensor-c1 | tensor-cinf | tensor-linf
    #[arg(long)]
    kernel: Option<String>,
    /// regularized | direct
    #[arg(long)]
    rhs: Option<String>,
    /// Exponent q in eps = c h^q, within (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    eps_q: Option<String>,
    /// Factor c in eps = c h^q
    #[arg(long, allow_negative_numbers = true)]
    eps_c: Option<String>,
    /// Number of refinement levels
    #[arg(long)]
    levels: Option<String>,
    /// Level of the coarsest mesh (default: first level passing the support check)
    #[arg(long)]
    start_level: Option<String>,
    /// Gauss order per interface facet
    #[arg(long)]
    surface_quad_order: Option<String>,
    /// Gauss order per volume cell for the regularized right-hand side
    #[arg(long)]
    volume_quad_order: Option<String>,
    /// CSV destination (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Serial execution and zero timings, for byte-identical output
    #[arg(long)]
    deterministic: bool,
    /// Run the regularized route even where the kernel support reaches the boundary
    #[arg(long)]
    allow_support_leak: bool,
    /// Exit code reflects the rate-tolerance PASS/FAIL of the summary
    #[arg(long)]
    check: bool,
    /// Write the coarsest volume mesh as plain text
    #[arg(long)]
    dump_mesh: Option<PathBuf>,
    /// Write the coarsest stiffness matrix as "row col value" triplets
    #[arg(long)]
    export_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub check: bool,
    pub dump_mesh: Option<PathBuf>,
    pub export_matrix: Option<PathBuf>,
}

/// Parses `argv` (program name first). Help and version requests come back
/// as [`Error::Args`] and are printed by the caller.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let mut values = match &args.config {
        Some(path) => config_file::read(path)?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("case", &args.case),
        ("kernel", &args.kernel),
        ("rhs", &args.rhs),
        ("eps_q", &args.eps_q),
        ("eps_c", &args.eps_c),
        ("levels", &args.levels),
        ("start_level", &args.start_level),
        ("surface_quad_order", &args.surface_quad_order),
        ("volume_quad_order", &args.volume_quad_order),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            values.insert(key.to_string(), v.clone());
        }
    }
    if let Some(out) = &args.out {
        values.insert("out".into(), out.to_string_lossy().into_owned());
    }
    if args.deterministic {
        values.insert("deterministic".into(), "true".into());
    }
    if args.allow_support_leak {
        values.insert("allow_support_leak".into(), "true".into());
    }
    Ok(Invocation {
        config: resolve(&values)?,
        check: args.check,
        dump_mesh: args.dump_mesh,
        export_matrix: args.export_matrix,
    })
}

/// Builds a validated configuration from merged `key → value` pairs.
pub fn resolve(values: &BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let case: DomainCase = parse_value(values, "case")?.ok_or_else(|| Error::Usage("--case is required".into()))?;
    let mut cfg = ExperimentConfig::new(case);
    if case == DomainCase::Cube {
        cfg.levels = CUBE_DEFAULT_LEVELS;
    }
    if let Some(k) = parse_value::<KernelKind>(values, "kernel")? {
        cfg.kernel = k;
    }
    if let Some(m) = parse_value::<RhsMode>(values, "rhs")? {
        cfg.rhs_mode = m;
    }
    if let Some(q) = parse_value(values, "eps_q")? {
        cfg.q = q;
    }
    if let Some(c) = parse_value(values, "eps_c")? {
        cfg.c = c;
    }
    if let Some(l) = parse_value(values, "levels")? {
        cfg.levels = l;
    }
    cfg.start_level = parse_value(values, "start_level")?;
    if let Some(o) = parse_value(values, "surface_quad_order")? {
        cfg.surface_quad_order = o;
    }
    if let Some(o) = parse_value(values, "volume_quad_order")? {
        cfg.volume_quad_order = o;
    }
    cfg.deterministic = parse_value(values, "deterministic")?.unwrap_or(false);
    cfg.allow_support_leak = parse_value(values, "allow_support_leak")?.unwrap_or(false);
    cfg.out_path = values.get("out").cloned();
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(cfg)
}

fn parse_value<T>(values: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    values
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| Error::Usage(format!("invalid value '{v}' for {}: {e}", key.replace('_', "-"))))
        })
        .transpose()
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<ConvergenceRow>,
    pub summary: String,
    pub check: RateCheck,
}

/// Runs the experiment, writes the CSV when an output path is configured and
/// any requested debug dumps.
pub fn run(inv: &Invocation) -> Result<RunOutcome> {
    let cfg = &inv.config;
    if inv.dump_mesh.is_some() || inv.export_matrix.is_some() {
        match cfg.case.dim() {
            2 => write_debug::<2>(inv)?,
            _ => write_debug::<3>(inv)?,
        }
    }
    let rows = if cfg.deterministic {
        run_convergence(cfg, &Serial, &mut NoClock)?
    } else {
        run_convergence(cfg, &Rayon, &mut WallClock::default())?
    };
    if let Some(path) = &cfg.out_path {
        emit_csv(&rows, path.as_ref())?;
    }
    let prediction = predicted_rates(cfg.case, cfg.q)?;
    Ok(RunOutcome {
        summary: emit_summary(&rows, &prediction),
        check: RateCheck::new(&rows, &prediction),
        rows,
    })
}

fn write_debug<const D: usize>(inv: &Invocation) -> Result<()> {
    let cfg = &inv.config;
    let level = match cfg.start_level {
        Some(l) => l,
        None => first_admissible_level::<D>(cfg)?.unwrap_or(0),
    };
    let mesh = build_volume::<D>(cfg.case, level)?;
    if let Some(path) = &inv.dump_mesh {
        meshio::dump_mesh(&mesh, path)?;
    }
    if let Some(path) = &inv.export_matrix {
        let a = assemble_stiffness(&FeSpace::new(&mesh), &QuadratureRule::gauss(STIFFNESS_QUAD_ORDER))?;
        meshio::export_matrix(&a, path)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<Invocation> {
        parse_args(std::iter::once("regfem").chain(line.split_whitespace()))
    }

    #[test]
    fn square_example() {
        let inv = parse("--case square --eps-q 1 --levels 5").unwrap();
        assert_eq!(inv.config.case, DomainCase::Square);
        assert_eq!(inv.config.q, 1.0);
        assert_eq!(inv.config.levels, 5);
        assert_eq!(inv.config.kernel, KernelKind::TensorC1);
        assert_eq!(inv.config.rhs_mode, RhsMode::Regularized);
        assert_eq!(inv.config.c, 1.0);
        assert!(!inv.check);
    }

    #[test]
    fn lshape_example() {
        let inv = parse("--case lshape --eps-q 0.2").unwrap();
        assert_eq!(inv.config.case, DomainCase::LShape);
        assert_eq!(inv.config.q, 0.2);
        assert_eq!(inv.config.levels, 4);
    }

    #[test]
    fn rejects_exponent_outside_unit_interval() {
        assert!(matches!(parse("--case square --eps-q 1.5"), Err(Error::Usage(_))));
        assert!(matches!(parse("--case square --eps-q 0"), Err(Error::Usage(_))));
        assert!(matches!(parse("--case square --eps-q -0.5"), Err(Error::Usage(_))));
    }

    #[test]
    fn rejects_unknown_flags_and_enums() {
        assert!(matches!(parse("--case square --colour red"), Err(Error::Args(_))));
        assert!(matches!(parse("--case disk"), Err(Error::Usage(_))));
        assert!(matches!(parse("--case square --kernel gauss"), Err(Error::Usage(_))));
        assert!(matches!(parse("--case square --rhs exact"), Err(Error::Usage(_))));
        assert!(matches!(parse("--eps-q 1"), Err(Error::Usage(_))));
    }

    #[test]
    fn cube_defaults_to_three_levels() {
        assert_eq!(parse("--case cube").unwrap().config.levels, CUBE_DEFAULT_LEVELS);
        assert_eq!(parse("--case cube --levels 2").unwrap().config.levels, 2);
    }
}

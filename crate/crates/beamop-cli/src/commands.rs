//! Implementations of the CLI subcommands.

use crate::config::RunConfig;
use crate::CliError;
use beamop::modes::hg2d;
use beamop::operators::{
    build_j, build_p, ccr_table, expected_commutator, operator_to_csv, CommutatorReport,
    QuadraticOperator,
};
use beamop::oracle::{density_map_csv, integrate_moments, GridSpec, MomentReport};
use beamop::quad::uniform_nodes;
use beamop::states::{per_photon_oam, tilt_angles, StateFile};
use beamop::{BeamParams, ModeSpace};
use serde::Serialize;
use std::path::{Path, PathBuf};

const UNITS_NOTE: &str = "hbar*omega0/(c^2*T)";

fn out_dir(config: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&dir).map_err(|e| {
        CliError::config(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn setup(config: &RunConfig) -> Result<(ModeSpace, BeamParams), CliError> {
    let params = config.beam.to_params()?;
    if params.paraxiality_warning() {
        eprintln!(
            "warning: theta0 = {:.3} is outside the collimated regime; results are qualitative",
            params.theta0()
        );
    }
    Ok((ModeSpace::new(config.ncut), params))
}

fn load_state(
    config: &RunConfig,
    space: ModeSpace,
    path: &Path,
) -> Result<(beamop::BeamState, Option<beamop::Polarization>), CliError> {
    let _ = config;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read state {}: {e}", path.display())))?;
    let file = StateFile::parse(&text)
        .map_err(|e| CliError::config(format!("state {}: {e}", path.display())))?;
    file.build(space)
        .map_err(|e| CliError::config(format!("state {}: {e}", path.display())))
}

/* build-operators ************************************************************/

#[derive(Serialize)]
struct ManifestOperator {
    name: &'static str,
    file: String,
    units_tag: &'static str,
    hermitian: bool,
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    ncut: usize,
    dim: usize,
    omega0: f64,
    wavelength: f64,
    w0: f64,
    lambda_bar: f64,
    theta0: f64,
    units_note: &'static str,
    operators: Vec<ManifestOperator>,
}

pub fn build_operators(config: &RunConfig) -> Result<(), CliError> {
    let (space, params) = setup(config)?;
    let dir = out_dir(config)?;
    let p = build_p(&space, &params);
    let j = build_j(&space, &params);
    let named: [(&'static str, &QuadraticOperator); 8] = [
        ("Px", &p.px),
        ("Py", &p.py),
        ("Pz", &p.pz),
        ("Jx", &j.jx),
        ("Jy", &j.jy),
        ("Jz", &j.jz),
        ("Sz", &j.sz),
        ("Lz", &j.lz),
    ];
    let mut operators = Vec::new();
    for (name, op) in named {
        let file = format!("{name}.csv");
        write_file(&dir.join(&file), &operator_to_csv(op, &space))?;
        operators.push(ManifestOperator {
            name,
            file,
            units_tag: op.units_tag().as_str(),
            hermitian: op.is_hermitian(),
        });
    }
    let manifest = Manifest {
        schema_version: 1,
        ncut: space.ncut(),
        dim: space.dim(),
        omega0: params.omega0(),
        wavelength: params.wavelength(),
        w0: params.w0(),
        lambda_bar: params.lambda_bar(),
        theta0: params.theta0(),
        units_note: UNITS_NOTE,
        operators,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join("manifest.json"), &manifest_json)?;
    println!("{manifest_json}");
    eprintln!(
        "wrote 8 operator CSV files and manifest.json to {}",
        dir.display()
    );
    Ok(())
}

/* check-ccr ******************************************************************/

#[derive(Serialize)]
struct CcrEntry {
    #[serde(flatten)]
    report: CommutatorReport,
    expected_rhs: String,
    expected_coefficient: f64,
    matches_expected: bool,
}

#[derive(Serialize)]
struct CcrReport {
    schema_version: u32,
    ncut: usize,
    lambda_bar: f64,
    tolerance: f64,
    all_pass: bool,
    pairs: Vec<CcrEntry>,
}

pub fn check_ccr(config: &RunConfig) -> Result<(), CliError> {
    let (space, params) = setup(config)?;
    let tolerance = config.tolerance("ccr");
    let reports = ccr_table(&space, &params)?;
    let mut all_pass = true;
    let pairs: Vec<CcrEntry> = reports
        .into_iter()
        .map(|report| {
            let (expected_rhs, expected_coefficient) =
                match expected_commutator(&report.pair.0, &report.pair.1) {
                    Some((rhs, f)) => (rhs.to_string(), f),
                    None => ("zero".to_string(), 0.0),
                };
            let matches_expected = report.identified_rhs == expected_rhs
                && (report.coefficient[0] - expected_coefficient).abs() <= tolerance
                && report.coefficient[1].abs() <= tolerance
                && report.residual_norm < tolerance;
            all_pass &= matches_expected;
            CcrEntry {
                report,
                expected_rhs,
                expected_coefficient,
                matches_expected,
            }
        })
        .collect();
    let out = CcrReport {
        schema_version: 1,
        ncut: space.ncut(),
        lambda_bar: params.lambda_bar(),
        tolerance,
        all_pass,
        pairs,
    };
    let json = serde_json::to_string_pretty(&out).expect("report serializes");
    let dir = out_dir(config)?;
    write_file(&dir.join("ccr_report.json"), &json)?;
    println!("{json}");
    if all_pass {
        eprintln!("commutation table verified: {} pairs", out.pairs.len());
        Ok(())
    } else {
        Err(CliError::tolerance(
            "commutation table does not match the expected structure constants",
        ))
    }
}

/* expect *********************************************************************/

#[derive(Serialize)]
struct ExpectReport {
    schema_version: u32,
    units: &'static str,
    moments: std::collections::BTreeMap<&'static str, f64>,
    tilt_angles: Option<[f64; 2]>,
    helicity: Option<f64>,
    per_photon_oam: Option<f64>,
}

pub fn expect(config: &RunConfig, state_path: &Path) -> Result<(), CliError> {
    let (space, params) = setup(config)?;
    let (state, pol) = load_state(config, space, state_path)?;
    let p = build_p(&space, &params);
    let j = build_j(&space, &params);

    let mut moments = std::collections::BTreeMap::new();
    for (name, op) in [
        ("Px", &p.px),
        ("Py", &p.py),
        ("Pz", &p.pz),
        ("Jx", &j.jx),
        ("Jy", &j.jy),
        ("Jz", &j.jz),
        ("Sz", &j.sz),
        ("Lz", &j.lz),
    ] {
        moments.insert(name, state.expectation(op).map_err(beamop_err)?.re);
    }
    let tilt = tilt_angles(&state, &p).ok();
    let oam = per_photon_oam(&state, &j.lz, &p.pz, &params).ok();
    let report = ExpectReport {
        schema_version: 1,
        units: UNITS_NOTE,
        moments,
        tilt_angles: tilt.map(|(tx, ty)| [tx, ty]),
        helicity: pol.map(|p| p.helicity()),
        per_photon_oam: oam,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn beamop_err(err: beamop::Error) -> CliError {
    CliError::config(err.to_string())
}

/* oracle *********************************************************************/

#[derive(Serialize)]
struct OracleReport {
    schema_version: u32,
    tolerance: f64,
    pass: bool,
    max_rel_error: f64,
    #[serde(flatten)]
    moments: MomentReport,
}

pub fn oracle(
    config: &RunConfig,
    state_path: &Path,
    strict: bool,
    density_csv: Option<&Path>,
) -> Result<(), CliError> {
    let (space, params) = setup(config)?;
    let (state, _) = load_state(config, space, state_path)?;
    let spec = GridSpec {
        n: config.grid.n,
        extent_factor: config.grid.extent_factor,
    };
    let tolerance = config.tolerance("oracle");
    let moments = integrate_moments(&state, &params, &spec, 0.0).map_err(beamop_err)?;
    for warning in &moments.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(path) = density_csv {
        let csv = density_map_csv(&state, &params, &spec, 0.0).map_err(beamop_err)?;
        write_file(path, &csv)?;
        eprintln!("wrote density map to {}", path.display());
    }
    let max_rel_error = moments.max_rel_error();
    let pass = max_rel_error < tolerance;
    let report = OracleReport {
        schema_version: 1,
        tolerance,
        pass,
        max_rel_error,
        moments,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    let dir = out_dir(config)?;
    write_file(&dir.join("oracle_report.json"), &json)?;
    println!("{json}");
    if strict && !report.moments.warnings.is_empty() {
        return Err(CliError::config(format!(
            "grid coverage insufficient for --strict: {}",
            report.moments.warnings.join("; ")
        )));
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::tolerance(format!(
            "max rel_error {max_rel_error:.3e} exceeds tolerance {tolerance:.1e}"
        )))
    }
}

/* modes-dump *****************************************************************/

pub fn modes_dump(
    config: &RunConfig,
    z: f64,
    single: Option<(usize, usize)>,
) -> Result<(), CliError> {
    let (space, params) = setup(config)?;
    let dir = out_dir(config)?;
    let modes: Vec<(usize, usize)> = match single {
        Some((n, m)) => vec![(n, m)],
        None => (0..=space.ncut())
            .flat_map(|n| (0..=space.ncut()).map(move |m| (n, m)))
            .collect(),
    };
    let points = if single.is_some() { 201 } else { 101 };
    let extent = config.grid.extent_factor * params.beam_radius(z);
    let (xs, _) = uniform_nodes(points, extent);
    for &(n, m) in &modes {
        let mut csv = String::from("x,y,re,im\n");
        for &x in &xs {
            for &y in &xs {
                let v = hg2d(n, m, x, y, z, &params);
                csv.push_str(&format!("{},{},{},{}\n", x, y, v.re, v.im));
            }
        }
        write_file(&dir.join(format!("mode_{n}_{m}.csv")), &csv)?;
    }
    eprintln!(
        "wrote {} mode profile file(s) at z = {z:e} m to {}",
        modes.len(),
        dir.display()
    );
    Ok(())
}

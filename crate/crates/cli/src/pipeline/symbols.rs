use std::f64::consts::PI;

use heis_core::models::{
    projector_symbol, residue_projector, resolvent_symbol, resolvent_value, sharp_inverse, ProjectorQuery,
    ResolventQuery,
};
use heis_core::quantize::{weyl_quantize, wigner_symbol, HermiteBasisSpec};
use heis_core::star::{GridSpec, GridSymbol, PolySymbol};
use heis_core::verify::Report;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::CliError;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diagonal(n: usize, f: impl Fn(usize) -> Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { f(i) } else { c(0.0) })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Projector basis per dimension: fine one-axis grid, coarse four-dimensional grid.
fn projector_basis(d: usize) -> Result<HermiteBasisSpec, CliError> {
    Ok(match d {
        1 => HermiteBasisSpec::new(1, 30, 10.0, 128)?,
        _ => HermiteBasisSpec::new(2, 6, 6.5, 40)?,
    })
}

pub fn check_caps(config: &RunConfig) -> Result<(), CliError> {
    let cap = config.torus.max_hermite;
    for (name, levels) in [("quantize.levels", config.quantize.levels), ("models.inverse_levels", config.models.inverse_levels)] {
        if levels > cap {
            return Err(CliError::Resource(format!("{name} = {levels} exceeds the Hermite basis cap {cap}")));
        }
    }
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    check_caps(config)?;
    let q = &config.quantize;
    let m = &config.models;
    let mut report = Report::new("model-symbols");
    let spec = HermiteBasisSpec::new(1, q.levels, q.halfwidth, q.points)?;
    let block = spec.trusted_block();
    let osc = diagonal(q.levels, |i| c(i as f64 + 0.5));

    let poly = weyl_quantize(&PolySymbol::harmonic_oscillator(1), &spec)?.block_distance(&osc, block).error;
    report.check("quantize: oscillator (polynomial route)", poly, q.tolerance, poly < q.tolerance, format!("block {block}"));
    let h_grid = GridSymbol::from_radial(spec.grid(), |r2| c(r2 / 2.0));
    let grid = weyl_quantize(&h_grid, &spec)?.block_distance(&osc, block).error;
    report.check("quantize: oscillator (grid route)", grid, q.tolerance, grid < q.tolerance, format!("block {block}"));

    let window = GridSymbol::from_fn(spec.grid(), |x| {
        let g = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
        Complex64::new(1.0 + x[0] - 0.3 * x[1] * x[1], 0.2 * x[0] * x[1]) * g
    });
    let back = wigner_symbol(&weyl_quantize(&window, &spec)?, &spec)?;
    let rt = back.sup_distance_within(&window, spec.halfwidth / 2.0)?;
    report.check(
        "quantize: round trip",
        rt,
        q.roundtrip_tolerance,
        rt < q.roundtrip_tolerance,
        "sup over |xi| <= R/2",
    );

    let z = Complex64::new(m.resolvent_z[0], m.resolvent_z[1]);
    let rq = ResolventQuery::new(1, z)?;
    let rm = weyl_quantize(&resolvent_symbol(&rq, &spec.grid())?, &spec)?;
    let target = diagonal(q.levels, |i| (c(i as f64 + 0.5) - z).inv());
    let res = rm.block_distance(&target, m.resolvent_block).error;
    report.check(
        "resolvent: quantized symbol vs diagonal inverse",
        res,
        m.resolvent_tolerance,
        res < m.resolvent_tolerance,
        format!("z = {z}, block {}", m.resolvent_block),
    );
    let origin = (resolvent_value(&ResolventQuery::new(1, c(0.0))?, 0.0) - c(PI)).norm();
    report.check(
        "resolvent: value at the origin for z = 0 vs 2 arcsin(1)",
        origin,
        1e-8,
        origin < 1e-8,
        "closed form",
    );

    for &[d, level] in &m.projectors {
        let pspec = projector_basis(d)?;
        let pq = ProjectorQuery::new(d, d as f64 / 2.0 + level as f64)?;
        let op = weyl_quantize(&projector_symbol(&pq, &pspec.grid())?, &pspec)?;
        let herm = op.hermitian_defect();
        let idem = max_abs(&(&op.entries * &op.entries - &op.entries));
        let rank = op.trace().re;
        let expected = (1..d).fold(1usize, |acc, j| acc * (level + j) / j) as f64;
        let worst = idem.max(herm).max((rank - expected).abs());
        report.check(
            &format!("projector: d = {d}, m = {level}"),
            worst,
            m.projector_tolerance,
            worst < m.projector_tolerance,
            format!("idempotence {idem:.2e}, hermitian {herm:.2e}, trace {rank:.9} (rank {expected})"),
        );
    }

    let rgrid = GridSpec::new(2, 8.0, 64)?;
    let residue = residue_projector(1, m.contour_center, m.contour_radius, m.contour_nodes, &rgrid)?;
    let exact = projector_symbol(&ProjectorQuery::new(1, m.contour_center)?, &rgrid)?;
    let rerr = residue.symbol.sup_distance_within(&exact, f64::INFINITY)?;
    report.check(
        "residue: contour integral vs projector",
        rerr,
        m.residue_tolerance,
        rerr < m.residue_tolerance,
        format!("{} nodes, radius {}, sign {}", m.contour_nodes, m.contour_radius, residue.sign_convention),
    );

    let ispec = HermiteBasisSpec::new(1, m.inverse_levels, m.inverse_halfwidth, m.inverse_points)?;
    for &[re, im] in &m.inverse_z {
        let z = Complex64::new(re, im);
        let a = GridSymbol::from_radial(ispec.grid(), |r2| c(r2 / 2.0) - z);
        let inv = sharp_inverse(&a, &ispec)?;
        let r = resolvent_symbol(&ResolventQuery::new(1, z)?, &ispec.grid())?;
        let err = inv.sup_distance_within(&r, ispec.halfwidth / 2.0)?;
        report.check(
            &format!("sharp inverse: H - ({z})"),
            err,
            m.inverse_tolerance,
            err < m.inverse_tolerance,
            "sup over |xi| <= R/2",
        );
    }
    Ok(report)
}

//! Named witnesses. Each preset is rebuilt along an independent path (a
//! hyperplane through catalog vertices, or a vertex check) and compared with
//! its literal coefficients before use.

use qutrit_witness::feasible::{
    approx_plane_w1, diag_facet_vertices, facet_to_witness, horodecki_lower_points,
    horodecki_upper_points, hyperplane_through, min_over_vertices, offdiag_a_plane,
    vertex_catalog, FamilyKind,
};
use qutrit_witness::operators::{
    approx_facet_w1, approx_facet_w2, approx_facet_w3, case_c_witness, diag_facet_witness,
    horodecki_lower_witness, horodecki_upper_witness, offdiag_a_witness, FacetSigns,
    WitnessCoeffs, HORODECKI_OFFSET, HORODECKI_TANGENT_OFFSET, OFFDIAG_A_OFFSET,
    OFFDIAG_A_TANGENT_OFFSET,
};

use crate::CliError;

pub const PRESET_HELP: &str = "\
Witness presets:
  facet:<bits>              diagonal facet; <bits> = i1 i2 i4 i5 i6 i7 as six 0/1 digits
  facet-c                   diagonal facet with bits 000101
  approx1[:<bits>]          parallel tangent of the first approximated facet
  approx2:<bits>            second approximated facet
  approx3:<bits>            third approximated facet
  offdiag                   off-diagonal witness with offset 7/4
  offdiag-tangent           same normal at its product-state tangent offset 1 + sqrt(3)/2
  horodecki-upper           ten-vertex witness with offset 809/790
  horodecki-lower           its party-exchanged partner
  horodecki-upper-tangent   upper normal at the tangent offset
  horodecki-lower-tangent   lower normal at the tangent offset
  identity                  the identity operator";

const REVERIFY_TOL: f64 = 1e-12;

fn bits(spec: &str, arg: Option<&str>) -> Result<FacetSigns, CliError> {
    let a = arg.ok_or_else(|| CliError::Usage(format!("preset '{spec}' needs :<bits>")))?;
    FacetSigns::parse(a).map_err(|e| CliError::Usage(format!("preset '{spec}': {e}")))
}

fn same(name: &str, literal: WitnessCoeffs, derived: WitnessCoeffs) -> Result<WitnessCoeffs, CliError> {
    let d = literal.max_abs_diff(&derived);
    if d > REVERIFY_TOL {
        return Err(CliError::Validation(format!(
            "preset {name}: rebuilt coefficients differ by {d:.3e}"
        )));
    }
    Ok(literal)
}

fn catalog_nonnegative(name: &str, w: WitnessCoeffs, kind: FamilyKind) -> Result<WitnessCoeffs, CliError> {
    let (v, k) = min_over_vertices(&w, &vertex_catalog(kind)).map_err(CliError::from)?;
    if v < -REVERIFY_TOL {
        return Err(CliError::Validation(format!(
            "preset {name}: negative ({v:.3e}) on catalog vertex {k}"
        )));
    }
    Ok(w)
}

fn plane_witness(points: Vec<qutrit_witness::feasible::FeasiblePoint>, offset: f64) -> Result<WitnessCoeffs, CliError> {
    let h = hyperplane_through(&points).map_err(CliError::from)?;
    Ok(facet_to_witness(&h, Some(offset)))
}

/// Resolves and re-verifies a preset.
pub fn load(spec: &str) -> Result<WitnessCoeffs, CliError> {
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let no_arg = || -> Result<(), CliError> {
        match arg {
            Some(_) => Err(CliError::Usage(format!("preset '{head}' takes no argument"))),
            None => Ok(()),
        }
    };
    match head {
        "facet" => {
            let s = bits(spec, arg)?;
            let derived = facet_to_witness(&hyperplane_through(&diag_facet_vertices(s)).map_err(CliError::from)?, None);
            same(spec, diag_facet_witness(s), derived)
        }
        "facet-c" => {
            no_arg()?;
            let s = FacetSigns::parse("000101").expect("literal bits");
            let derived = facet_to_witness(&hyperplane_through(&diag_facet_vertices(s)).map_err(CliError::from)?, None);
            same(spec, case_c_witness(), derived)
        }
        "approx1" => {
            let s = match arg {
                Some(_) => bits(spec, arg)?,
                None => FacetSigns::default(),
            };
            let derived = facet_to_witness(&approx_plane_w1(s), Some(11.0 / 8.0));
            let w = same(spec, approx_facet_w1(s), derived)?;
            catalog_nonnegative(spec, w, FamilyKind::Diag)
        }
        "approx2" => catalog_nonnegative(spec, approx_facet_w2(bits(spec, arg)?), FamilyKind::Diag),
        "approx3" => catalog_nonnegative(spec, approx_facet_w3(bits(spec, arg)?), FamilyKind::Diag),
        "offdiag" | "offdiag-tangent" => {
            no_arg()?;
            let a0 = if head == "offdiag" { OFFDIAG_A_OFFSET } else { OFFDIAG_A_TANGENT_OFFSET };
            same(spec, offdiag_a_witness(a0), facet_to_witness(&offdiag_a_plane(), Some(a0)))
        }
        "horodecki-upper" | "horodecki-upper-tangent" => {
            no_arg()?;
            let a0 = if head.ends_with("tangent") { HORODECKI_TANGENT_OFFSET } else { HORODECKI_OFFSET };
            same(spec, horodecki_upper_witness(a0), plane_witness(horodecki_upper_points(), a0)?)
        }
        "horodecki-lower" | "horodecki-lower-tangent" => {
            no_arg()?;
            let a0 = if head.ends_with("tangent") { HORODECKI_TANGENT_OFFSET } else { HORODECKI_OFFSET };
            same(spec, horodecki_lower_witness(a0), plane_witness(horodecki_lower_points(), a0)?)
        }
        "identity" => {
            no_arg()?;
            Ok(WitnessCoeffs::new(1.0))
        }
        _ => Err(CliError::Usage(format!("unknown preset '{spec}'\n{PRESET_HELP}"))),
    }
}

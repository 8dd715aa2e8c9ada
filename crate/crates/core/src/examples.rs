//! Fixed example documents for the four preset curves.

use crate::curve::{preset, CurvePresentation, PRESET_NAMES};
use crate::doc::Document;
use crate::error::{Error, Result};
use crate::heart::{canonical_map, intermediate_extension, j_shriek, j_star, omega0_jstar};
use crate::linalg::{CoeffMode, Matrix};
use crate::rep::Representation;

fn rep(c: &CurvePresentation, mode: &CoeffMode, b: usize, n: usize, gens: &[&[i64]]) -> Result<Representation> {
    let action = gens.iter().map(|g| Matrix::from_i64(n, n, g, mode)).collect();
    Representation::free(mode, &c.branches[b].group, action)
}

/// Branch data used by the example document of a preset.
pub fn example_branch_data(name: &str, mode: &CoeffMode) -> Result<(CurvePresentation, Vec<Representation>)> {
    let c = preset(name).ok_or_else(|| Error::InvalidObject(format!("unknown preset `{name}`")))?;
    let l = match name {
        // standard representation of S_3 with g_1 = (12), g_2 = (23)
        "p1" => vec![rep(&c, mode, 0, 2, &[&[-1, 1, 0, 1], &[1, 0, 1, -1]])?],
        // t of order 2, Frobenius of order 2
        "spec_zp" => vec![rep(&c, mode, 0, 2, &[&[1, 0, 0, -1], &[1, 0, 0, -1]])?.with_weight_base(7)],
        // rotation of order 4 on one branch, trivial on the other
        "node" => vec![rep(&c, mode, 0, 2, &[&[0, -1, 1, 0]])?, rep(&c, mode, 1, 1, &[&[1]])?],
        // unramified sign character
        "sqrt5" => vec![rep(&c, mode, 0, 1, &[&[1], &[-1]])?.with_weight_base(4)],
        _ => unreachable!(),
    };
    Ok((c, l))
}

/// The example document of a preset: `j_!`, the middle extension, the
/// pushforward allowed at its points, and the canonical map `j_! → j_*`.
///
/// Weight truncation needs rational coefficients, so over a chain ring the
/// finite-residue presets omit that object.
pub fn example_document(name: &str, mode: &CoeffMode) -> Result<Document> {
    let (c, l) = example_branch_data(name, mode)?;
    let mut d = Document::new(mode, &c);
    d.objects.push(("j_shriek".into(), j_shriek(&c, l.clone())?));
    d.objects.push(("middle".into(), intermediate_extension(&c, l.clone())?));
    let finite = (0..c.points.len()).any(|x| c.residue_q(x).is_some());
    if finite && *mode == CoeffMode::rational() {
        d.objects.push(("omega0_j_star".into(), omega0_jstar(&c, l.clone())?));
    } else if !finite {
        let f = canonical_map(&c, l.clone())?;
        d.objects.push(("j_star".into(), j_star(&c, l)?));
        d.add_morphism("canonical", "j_shriek", "j_star", f)?;
    }
    Ok(d)
}

pub fn example_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

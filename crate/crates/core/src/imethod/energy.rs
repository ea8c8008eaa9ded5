use super::constants::ConstantsTable;
use super::lambda::{lambda_n, lambda_sum, LatticeM4, LatticeM6, IMAGINARY_TOLERANCE};
use super::multiplier::LatticeTable;
use super::profile::IMultiplierProfile;
use crate::error::{Error, Result};
use crate::solver::{energy, i2, ENERGY_ALPHA};
use crate::spectral::{Field, FieldPair};

/// Relative disagreement tolerated between the physical-space and
/// frequency-space evaluations of the first modified energy.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

/// `Iu`: multiply every coefficient by `m(xi_k)`.
pub fn apply_i(f: &Field, profile: &IMultiplierProfile) -> Field {
    f.map_modes(|_, xi, c| c * profile.m(xi))
}

fn kinetic(profile: &IMultiplierProfile, a: &Field, b: &Field) -> Result<f64> {
    let mx = |xi: &[f64]| profile.m(xi[0]) * xi[0] * profile.m(xi[1]) * xi[1];
    lambda_n(&mx, &[a, b])
}

fn smoothed_quartic(profile: &IMultiplierProfile, fields: [&Field; 4]) -> Result<f64> {
    let mm = |xi: &[f64]| xi.iter().map(|&x| profile.m(x)).product::<f64>();
    lambda_n(&mm, &fields)
}

/// `scale` is the sum of the magnitudes of the terms making up the value.
fn cross_check(what: &str, physical: f64, spectral: f64, scale: f64) -> Result<()> {
    if (physical - spectral).abs() > CROSS_CHECK_TOLERANCE * scale {
        return Err(Error::CrossCheck(format!(
            "{what}: physical-space value {physical:e} and multilinear value {spectral:e} disagree"
        )));
    }
    Ok(())
}

/// `E(Iu)` with quartic coefficient `alpha`, evaluated in physical space and
/// as `-1/2 L2(m1 xi1 m2 xi2) - alpha L4(m1 m2 m3 m4)`; the second value is
/// returned after the two agree.
pub fn e1_with(u: &Field, profile: &IMultiplierProfile, alpha: f64) -> Result<f64> {
    let physical = energy(&apply_i(u, profile), alpha);
    let (kin, quart) = (-0.5 * kinetic(profile, u, u)?, alpha * smoothed_quartic(profile, [u, u, u, u])?);
    let spectral = kin - quart;
    cross_check("first modified energy", physical, spectral, kin.abs() + quart.abs())?;
    Ok(spectral)
}

/// First modified energy with the calibrated quartic coefficient.
pub fn e1(u: &Field, profile: &IMultiplierProfile) -> Result<f64> {
    e1_with(u, profile, ENERGY_ALPHA)
}

/// `I2(Iu, Iv)`, dual-path like [`e1`].
pub fn e1_system(state: &FieldPair, profile: &IMultiplierProfile) -> Result<f64> {
    let (u, v) = (&state.u, &state.v);
    let physical = i2(&apply_i(u, profile), &apply_i(v, profile));
    let kin = -kinetic(profile, u, u)? - kinetic(profile, v, v)?;
    let quart = smoothed_quartic(profile, [u, u, v, v])?;
    let spectral = kin - quart;
    cross_check("first modified system energy", physical, spectral, kin.abs() + quart.abs())?;
    Ok(spectral)
}

/// Quadratic part `-1/2 L2(m1 xi1 m2 xi2)` of both modified energies.
pub fn quadratic_part(u: &Field, profile: &IMultiplierProfile) -> Result<f64> {
    Ok(-0.5 * kinetic(profile, u, u)?)
}

/// `L4(M4; u, u, u, u)`.
pub fn quartic_part(u: &Field, profile: &IMultiplierProfile) -> Result<f64> {
    let table = LatticeTable::new(u.grid(), profile);
    lambda_n(&LatticeM4(&table), &[u, u, u, u])
}

/// `-1/2 L2(m1 xi1 m2 xi2) - c4 L4(M4)`.
pub fn e2(u: &Field, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
    Ok(quadratic_part(u, profile)? - constants.c4 * quartic_part(u, profile)?)
}

/// Quadratic part `-L2(u, u) - L2(v, v)` of the system energies.
pub fn quadratic_part_system(state: &FieldPair, profile: &IMultiplierProfile) -> Result<f64> {
    Ok(-kinetic(profile, &state.u, &state.u)? - kinetic(profile, &state.v, &state.v)?)
}

/// `L4(M4~; u, u, v, v)` with `M4~ = 4 M4`.
pub fn quartic_part_system(state: &FieldPair, profile: &IMultiplierProfile) -> Result<f64> {
    let table = LatticeTable::new(state.grid(), profile);
    let (u, v) = (&state.u, &state.v);
    Ok(4.0 * lambda_n(&LatticeM4(&table), &[u, u, v, v])?)
}

/// `-L2(u, u) - L2(v, v) - c4~ L4(M4~; u, u, v, v)`.
pub fn e2_system(state: &FieldPair, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
    Ok(quadratic_part_system(state, profile)? - constants.c4_system * quartic_part_system(state, profile)?)
}

/// `L6(M6; f1..f6)` for an odd real multiplier: purely imaginary, so the
/// imaginary part is returned after checking the real residue.
fn odd_sextic(table: &LatticeTable, fields: [&Field; 6], truncated: bool) -> Result<f64> {
    let cutoff = truncated.then(|| fields[0].grid().dealias_cutoff());
    let s = lambda_sum(&LatticeM6 { table, active_cutoff: cutoff }, &fields)?;
    if s.value.re.abs() > IMAGINARY_TOLERANCE * s.magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::CrossCheck(format!(
            "odd sextic sum has real part {:e} (term magnitude {:e})",
            s.value.re, s.magnitude
        )));
    }
    Ok(s.value.im)
}

/// Imaginary part of `L6(M6; u, ..., u)`, restricted to the tuples the
/// dealiased flow actually produces.
pub fn sextic_functional(u: &Field, profile: &IMultiplierProfile) -> Result<f64> {
    let table = LatticeTable::new(u.grid(), profile);
    odd_sextic(&table, [u; 6], true)
}

/// Predicted growth rate `dE2/dt = i c6 L6(M6)`.
pub fn sextic_rate(u: &Field, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
    Ok(-constants.c6 * sextic_functional(u, profile)?)
}

/// Imaginary parts of `L6(M6~; u, v, v, u, v, v) + L6(M6~; u, u, v, u, u, v)`:
/// the sextic terms the system flow produces from the quartic part.
pub fn sextic_functional_system(state: &FieldPair, profile: &IMultiplierProfile) -> Result<f64> {
    let table = LatticeTable::new(state.grid(), profile);
    let (u, v) = (&state.u, &state.v);
    let a = odd_sextic(&table, [u, v, v, u, v, v], true)?;
    let b = odd_sextic(&table, [u, u, v, u, u, v], true)?;
    Ok(4.0 * (a + b))
}

/// Predicted system growth rate `i c6~ [L6(M6~; u,v,v,u,v,v) + L6(M6~; u,u,v,u,u,v)]`.
pub fn sextic_rate_system(state: &FieldPair, profile: &IMultiplierProfile, constants: &ConstantsTable) -> Result<f64> {
    Ok(-constants.c6_system * sextic_functional_system(state, profile)?)
}

/// System rate with the single slot ordering `(u, u, v, v, v, v)`, kept for
/// comparison with the corrected form.
pub fn sextic_rate_system_printed(
    state: &FieldPair,
    profile: &IMultiplierProfile,
    constants: &ConstantsTable,
) -> Result<f64> {
    let table = LatticeTable::new(state.grid(), profile);
    let (u, v) = (&state.u, &state.v);
    Ok(-constants.c6_system * 4.0 * odd_sextic(&table, [u, u, v, v, v, v], true)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imethod::multiplier::{m4, FrequencyTuple};
    use crate::spectral::{Complex64, SpectralGrid};
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(2.0 * PI, 32).unwrap()
    }

    fn two_mode(g: &SpectralGrid) -> Field {
        Field::from_fn(g, |x| x.cos() + (2.0 * x).cos()).dealias()
    }

    /// Direct quadruple loop with the scalar multiplier.
    fn brute_quartic(fields: [&Field; 4], p: &IMultiplierProfile) -> f64 {
        let g = fields[0].grid();
        let ks: Vec<i64> = g.active_modes().collect();
        let mut total = Complex64::new(0.0, 0.0);
        for &a in &ks {
            for &b in &ks {
                for &c in &ks {
                    let d = -(a + b + c);
                    if d.abs() > g.dealias_cutoff() {
                        continue;
                    }
                    let xi = vec![g.xi(a), g.xi(b), g.xi(c), g.xi(d)];
                    let w = m4(&FrequencyTuple::new(xi).unwrap(), p).unwrap();
                    total += fields[0].coeff(a) * fields[1].coeff(b) * fields[2].coeff(c) * fields[3].coeff(d) * w;
                }
            }
        }
        total.re * g.length()
    }

    #[test]
    fn identity_multiplier_recovers_plain_energy() {
        let g = grid();
        let u = two_mode(&g);
        let huge = IMultiplierProfile::sharp(1e6, 0.5).unwrap();
        let plain = energy(&u, ENERGY_ALPHA);
        assert!((e1(&u, &huge).unwrap() - plain).abs() < 1e-12);
        let e2v = e2(&u, &huge, &ConstantsTable::default()).unwrap();
        assert!((e2v - plain).abs() < 1e-12, "{e2v} {plain}");
        assert_eq!(apply_i(&u, &huge), u);
    }

    #[test]
    fn zero_field() {
        let g = grid();
        let z = Field::zeros(&g);
        let p = IMultiplierProfile::sharp(2.0, 0.5).unwrap();
        assert_eq!(e1(&z, &p).unwrap(), 0.0);
        assert_eq!(e2(&z, &p, &ConstantsTable::default()).unwrap(), 0.0);
        assert_eq!(sextic_rate(&z, &p, &ConstantsTable::default()).unwrap(), 0.0);
    }

    #[test]
    fn e2_matches_brute_force() {
        let g = grid();
        let u = two_mode(&g);
        let p = IMultiplierProfile::sharp(1.5, 0.5).unwrap();
        let c = ConstantsTable::default();
        let expected = quadratic_part(&u, &p).unwrap() - c.c4 * brute_quartic([&u; 4], &p);
        let got = e2(&u, &p, &c).unwrap();
        assert!(got.is_finite());
        assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0), "{got} {expected}");
    }

    #[test]
    fn system_energy_reductions() {
        let g = grid();
        let u = two_mode(&g);
        let p = IMultiplierProfile::sharp(1.5, 0.5).unwrap();
        let c = ConstantsTable::default();
        let huge = IMultiplierProfile::sharp(1e6, 0.5).unwrap();
        let pair = FieldPair::new(u.clone(), u.scale(0.5)).unwrap();
        let plain = i2(&pair.u, &pair.v);
        assert!((e2_system(&pair, &huge, &c).unwrap() - plain).abs() < 1e-12 * plain.abs());
        let only_u = FieldPair::new(u.clone(), Field::zeros(&g)).unwrap();
        assert!((e2_system(&only_u, &p, &c).unwrap() - 2.0 * quadratic_part(&u, &p).unwrap()).abs() < 1e-13);
        let same = FieldPair::new(u.clone(), u.clone()).unwrap();
        let brute = 2.0 * 2.0 * quadratic_part(&u, &p).unwrap() - c.c4_system * 4.0 * brute_quartic([&u; 4], &p);
        assert!((e2_system(&same, &p, &c).unwrap() - brute).abs() < 1e-12 * brute.abs());
        assert!((e2_system(&same, &p, &c).unwrap() - 4.0 * e2(&u, &p, &c).unwrap()).abs() < 1e-12 * brute.abs());
        assert!(e1_system(&pair, &p).is_ok());
    }

    #[test]
    fn low_band_fields_have_no_sextic_growth() {
        let g = SpectralGrid::new(2.0 * PI, 32).unwrap();
        let u = Field::from_fn(&g, |x| 0.3 * x.cos() - 0.2 * (2.0 * x).sin()).dealias();
        let p = IMultiplierProfile::sharp(12.0, 0.5).unwrap();
        assert!(sextic_rate(&u, &p, &ConstantsTable::default()).unwrap().abs() < 1e-12);
        let pair = FieldPair::new(u.clone(), u.scale(0.4)).unwrap();
        assert!(sextic_rate_system(&pair, &p, &ConstantsTable::default()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn system_rate_reduces_on_equal_components() {
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let u = Field::from_fn(&g, |x| 0.3 * x.cos() + 0.2 * (2.0 * x + 0.4).sin() + 0.1 * (4.0 * x).cos()).dealias();
        let p = IMultiplierProfile::sharp(1.5, 0.5).unwrap();
        let c = ConstantsTable::default();
        let single = sextic_rate(&u, &p, &c).unwrap();
        let pair = FieldPair::new(u.clone(), u.clone()).unwrap();
        let sys = sextic_rate_system(&pair, &p, &c).unwrap();
        assert!(single.abs() > 1e-8);
        assert!((sys - 4.0 * single).abs() < 1e-12 * single.abs().max(1.0), "{sys} {single}");
        let printed = sextic_rate_system_printed(&pair, &p, &c).unwrap();
        assert!((printed - 2.0 * single).abs() < 1e-12 * single.abs().max(1.0));
    }
}

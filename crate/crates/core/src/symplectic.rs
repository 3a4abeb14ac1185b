//! The canonical symplectic form `S(f, g) = (1/2pi) \oint f dg` and its
//! compatibility with the Hilbert transform and the inner product.

use crate::error::{Error, Result};
use crate::fourier::{
    hilbert_transform, inner_product, polarize, synthesize, CircleFunction, SampleGrid, C64, I,
};

/// How the form is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormMode {
    /// Coefficient sum `-i sum n c_n(f) c_{-n}(g)`.
    Fourier,
    /// Trapezoid rule for `(1/2pi) \int f g' dtheta`, `g'` spectral.
    Quadrature(SampleGrid),
}

/// Complex-bilinear extension of `S`, coefficient form.
pub fn symplectic_fourier(f: &CircleFunction, g: &CircleFunction) -> C64 {
    let n = f.bandlimit().min(g.bandlimit());
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..=n as i64 {
        acc += (f.coeff(k) * g.coeff(-k) - f.coeff(-k) * g.coeff(k)) * k as f64;
    }
    -I * acc
}

pub fn symplectic_form(f: &CircleFunction, g: &CircleFunction, mode: FormMode) -> Result<C64> {
    match mode {
        FormMode::Fourier => Ok(symplectic_fourier(f, g)),
        FormMode::Quadrature(grid) => {
            let n = f.bandlimit().max(g.bandlimit());
            if grid.size() < 2 * n + 1 {
                return Err(Error::GridTooSmall {
                    size: grid.size(),
                    bandlimit: n,
                    required: 2 * n + 1,
                });
            }
            let fv = synthesize(f, &grid);
            let dg = synthesize(&g.derivative(), &grid);
            let sum: C64 = fv.iter().zip(&dg).map(|(a, b)| a * b).sum();
            Ok(sum / grid.size() as f64)
        }
    }
}

/// `|S(f, Jg) - <f, g>|` for real `f`, `g`.
pub fn compatibility_defect(f: &CircleFunction, g: &CircleFunction) -> Result<f64> {
    if !f.is_real() || !g.is_real() {
        return Err(Error::InvalidInput(
            "compatibility identity is stated for real functions".into(),
        ));
    }
    let lhs = symplectic_fourier(f, &hilbert_transform(g));
    Ok((lhs - inner_product(f, g)).norm())
}

/// `i S(f+, conj f+)` for `f+` in `W+`; equals the squared norm.
pub fn polarization_positivity(f_plus: &CircleFunction) -> Result<f64> {
    if let Some(k) = f_plus
        .negative()
        .iter()
        .position(|c| c.re != 0.0 || c.im != 0.0)
    {
        return Err(Error::NotInPositiveSpace(k + 1));
    }
    Ok((I * symplectic_fourier(f_plus, &f_plus.conj())).re)
}

/// Inner product rebuilt from the form and the polarization:
/// `i S(f+, conj g+) - i S(f-, conj g-)`.
pub fn inner_product_via_form(f: &CircleFunction, g: &CircleFunction) -> C64 {
    let (fp, fm) = polarize(f);
    let (gp, gm) = polarize(g);
    I * symplectic_fourier(&fp, &gp.conj()) - I * symplectic_fourier(&fm, &gm.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::norm_squared;

    #[test]
    fn cos_sin_pairing() {
        let c = CircleFunction::cos(1, 3);
        let s = CircleFunction::sin(1, 3);
        let v = symplectic_fourier(&c, &s);
        assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
        let q = symplectic_form(&c, &s, FormMode::Quadrature(SampleGrid::new(16))).unwrap();
        assert!((q - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(symplectic_fourier(&c, &c).norm() == 0.0);
    }

    #[test]
    fn positive_space_is_isotropic() {
        let f = CircleFunction::from_modes(4, &[(1, C64::new(1.0, 2.0)), (3, C64::new(-0.5, 0.1))])
            .unwrap();
        let g = CircleFunction::from_modes(4, &[(2, C64::new(0.3, 0.0)), (1, C64::new(0.0, 1.0))])
            .unwrap();
        assert_eq!(symplectic_fourier(&f, &g), C64::new(0.0, 0.0));
    }

    #[test]
    fn compatibility_on_cosine() {
        let c = CircleFunction::cos(1, 2);
        assert!(compatibility_defect(&c, &c).unwrap() < 1e-16);
        assert_eq!(
            compatibility_defect(&c, &CircleFunction::zeros(2, true)).unwrap(),
            0.0
        );
        assert!(compatibility_defect(&c.complexified(), &c).is_err());
    }

    #[test]
    fn positivity_examples() {
        let e = CircleFunction::exp_mode(1, 3);
        assert!((polarization_positivity(&e).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            polarization_positivity(&CircleFunction::zeros(3, false)).unwrap(),
            0.0
        );
        let f = CircleFunction::from_modes(3, &[(2, C64::new(0.4, -0.2))]).unwrap();
        let p = polarization_positivity(&f).unwrap();
        assert!((p - norm_squared(&f)).abs() < 1e-15);
        assert!(matches!(
            polarization_positivity(&CircleFunction::cos(1, 2)),
            Err(Error::NotInPositiveSpace(1))
        ));
    }

    #[test]
    fn quadrature_grid_checked() {
        let c = CircleFunction::cos(4, 4);
        let err = symplectic_form(&c, &c, FormMode::Quadrature(SampleGrid::new(8))).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall { .. }));
    }
}

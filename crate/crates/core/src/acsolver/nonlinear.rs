//! Skew-symmetric quadratic term `N(u) = -(u·∇)u - ½(div u)u`.
//!
//! Evaluated as `-½[(u·∇)u + div(u⊗u)]`, which equals `N(u)` pointwise and
//! makes `Σ N(u)·u` vanish on the grid for any discrete `u`.

use crate::field::ops::{dealias_vector, partial};
use crate::field::{ScalarField, Spectrum, VectorSpectrum};

/// Spectral `N(û)`. With `dealias`, both the input and the output are
/// truncated by the 2/3 rule.
pub(crate) fn nonlinear_spectral(u_hat: &VectorSpectrum, dealias: bool) -> VectorSpectrum {
    let grid = u_hat.grid();
    let dim = grid.dim();
    let len = grid.len();
    let mut input = u_hat.clone();
    if dealias {
        dealias_vector(&mut input);
    }
    let u: Vec<ScalarField> = input.components().iter().map(Spectrum::inverse).collect();

    let mut advective = vec![vec![0.0; len]; dim];
    for (i, adv) in advective.iter_mut().enumerate() {
        for (j, uj) in u.iter().enumerate() {
            let d = partial(input.component(i), j).inverse();
            for ((a, x), y) in adv.iter_mut().zip(uj.values()).zip(d.values()) {
                *a += x * y;
            }
        }
    }

    let mut products: Vec<Vec<Option<Spectrum>>> = vec![vec![None; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let prod = u[i].mul(&u[j]).expect("same grid").transform();
            products[i][j] = Some(prod);
        }
    }

    let components = (0..dim)
        .map(|i| {
            let adv = ScalarField::from_values(grid, std::mem::take(&mut advective[i]))
                .expect("grid length")
                .transform();
            let mut out = adv;
            for j in 0..dim {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                let d = partial(products[a][b].as_ref().expect("filled"), j);
                for (o, v) in out.coeffs_mut().iter_mut().zip(d.coeffs()) {
                    *o += v;
                }
            }
            out.scaled(-0.5)
        })
        .collect();
    let mut out = VectorSpectrum::from_components(components).expect("same grid");
    if dealias {
        dealias_vector(&mut out);
    }
    out
}

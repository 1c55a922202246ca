//! Small dense complex matrix exponentials and φ-functions.
//!
//! The 2×2 acoustic–viscous block has a closed-form exponential; the
//! φ-functions needed by the exponential integrator are read off the
//! exponential of an augmented 6×6 matrix, computed by scaling and squaring
//! with a diagonal Padé approximant.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn mat2_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_apply(a: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// `cosh(√z)` and `sinh(√z)/√z` as power series in `z`.
fn cosh_sinhc_series(z: f64) -> (f64, f64) {
    let mut c = 1.0;
    let mut s = 1.0;
    let mut term_c = 1.0;
    let mut term_s = 1.0;
    for n in 1..60 {
        let nf = n as f64;
        term_c *= z / ((2.0 * nf - 1.0) * (2.0 * nf));
        term_s *= z / ((2.0 * nf) * (2.0 * nf + 1.0));
        c += term_c;
        s += term_s;
        if term_c.abs() < 1e-18 * c.abs() && term_s.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (c, s)
}

/// Closed-form `exp(h M)` for `M = [[-ν, -iω], [-iω, 0]]` with `ν ≥ 0`, `ω ≥ 0`.
///
/// Writing `M = s I + (M - s I)` with `s = -ν/2`, `(M - s I)² = δ² I` where
/// `δ² = (ν² - 4ω²)/4`, so `exp(hM) = e^{sh} [cosh(δh) I + sinh(δh)/δ (M - sI)]`.
/// When the discriminant almost cancels (or `δh` is tiny) the hyperbolic
/// functions are summed as series in `δ²h²`.
pub fn acoustic_block_exp(nu: f64, omega: f64, h: f64) -> Mat2 {
    let disc = nu * nu - 4.0 * omega * omega;
    let scale = nu * nu + 4.0 * omega * omega;
    let s = -0.5 * nu;
    let delta_sq = 0.25 * disc;
    let z = delta_sq * h * h;
    let (ec, es) = if disc.abs() < 1e-12 * scale || z.abs() < 1e-6 {
        let (c, sinhc) = cosh_sinhc_series(z);
        let e = (s * h).exp();
        (e * c, e * sinhc * h)
    } else if disc < 0.0 {
        let w = (-delta_sq).sqrt();
        let e = (s * h).exp();
        (e * (w * h).cos(), e * (w * h).sin() / w)
    } else {
        let d = delta_sq.sqrt();
        // e^{(s±d)h}; the difference through expm1 avoids cancellation
        let lo = ((s - d) * h).exp();
        let hi = ((s + d) * h).exp();
        (0.5 * (hi + lo), 0.5 * lo * (2.0 * d * h).exp_m1() / d)
    };
    let m = [[Complex64::new(-nu, 0.0), Complex64::new(0.0, -omega)], [Complex64::new(0.0, -omega), ZERO]];
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let shifted = if i == j { m[i][j] - s } else { m[i][j] };
            out[i][j] = shifted * es + if i == j { Complex64::new(ec, 0.0) } else { ZERO };
        }
    }
    out
}

/// Row-major dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    fn norm_one(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn scaled(&self, f: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|c| c * f).collect(),
        }
    }

    fn add_scaled(&mut self, other: &Self, f: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * f;
        }
    }

    /// Solve `self · X = rhs` by Gaussian elimination with partial pivoting.
    fn solve(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap();
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    b.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[col * n + col];
            for row in col + 1..n {
                let f = a[row * n + col] / d;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
                for j in 0..n {
                    let v = b[col * n + j];
                    b[row * n + j] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..n {
                let mut acc = b[col * n + j];
                for k in col + 1..n {
                    acc -= a[col * n + k] * b[k * n + j];
                }
                b[col * n + j] = acc / d;
            }
        }
        Self { n, data: b }
    }

    /// Matrix exponential: scale to `‖A‖₁ ≤ 1/2`, Padé(8,8), square back.
    pub fn exp(&self) -> Self {
        const M: usize = 8;
        let norm = self.norm_one();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scaled(0.5f64.powi(squarings));
        // c_j = (2m - j)! m! / ((2m)! j! (m - j)!)
        let mut coeffs = [0.0f64; M + 1];
        coeffs[0] = 1.0;
        for j in 1..=M {
            coeffs[j] = coeffs[j - 1] * (M - j + 1) as f64 / ((j * (2 * M - j + 1)) as f64);
        }
        let n = self.n;
        let mut numer = Self::identity(n);
        let mut denom = Self::identity(n);
        let mut power = Self::identity(n);
        for (j, c) in coeffs.iter().enumerate().skip(1) {
            power = power.mul(&a);
            numer.add_scaled(&power, *c);
            denom.add_scaled(&power, if j % 2 == 0 { *c } else { -*c });
        }
        let mut result = denom.solve(&numer);
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `(φ₁(hM), φ₂(hM))` for a 2×2 matrix, from the exponential of
/// `[[hM, I, 0], [0, 0, I], [0, 0, 0]]`.
pub fn phi_functions_2x2(m: &Mat2, h: f64) -> (Mat2, Mat2) {
    let mut aug = DenseMatrix::zeros(6);
    for i in 0..2 {
        for j in 0..2 {
            aug[(i, j)] = m[i][j] * h;
        }
        aug[(i, i + 2)] = ONE;
        aug[(i + 2, i + 4)] = ONE;
    }
    let e = aug.exp();
    let mut phi1 = [[ZERO; 2]; 2];
    let mut phi2 = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            phi1[i][j] = e[(i, j + 2)];
            phi2[i][j] = e[(i, j + 4)];
        }
    }
    (phi1, phi2)
}

/// Scalar `(e^z, φ₁(z), φ₂(z))` for real `z`, accurate near zero.
pub fn scalar_phi(z: f64) -> (f64, f64, f64) {
    let e = z.exp();
    if z.abs() < 0.1 {
        // φ_k(z) = Σ z^n / (n + k)!
        let mut phi1 = 0.0;
        let mut phi2 = 0.0;
        let mut term1 = 1.0; // z^n/(n+1)!
        let mut term2 = 0.5; // z^n/(n+2)!
        for n in 0..20 {
            phi1 += term1;
            phi2 += term2;
            let nf = n as f64;
            term1 *= z / (nf + 2.0);
            term2 *= z / (nf + 3.0);
        }
        (e, phi1, phi2)
    } else {
        let em1 = z.exp_m1();
        (e, em1 / z, (em1 - z) / (z * z))
    }
}

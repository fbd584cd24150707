//! Dirac matrices, projection symbols, bilinear-interaction geometry
//! (angles, hyperbolic weights, sign classification) and the null-form
//! symbols with their angle bounds.

use crate::error::{CoreError, Result};
use crate::field::{angle_between, Sign, SpinorField2D};
use num_complex::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut out = self.0;
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] -= other.0[r][c];
            }
        }
        Mat2(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// α⁰ = I, α¹ = σ¹, α² = σ², β = σ³ in the 2-spinor representation.
pub mod matrices {
    use super::*;

    pub const ALPHA0: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ALPHA1: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const ALPHA2: Mat2 = Mat2([
        [ZERO, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), ZERO],
    ]);
    pub const BETA: Mat2 = Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub const ALPHA: [Mat2; 3] = [ALPHA0, ALPHA1, ALPHA2];
}

/// Dirac projection symbol Π(±ξ) = ½(I + (±ξ_j/|ξ|)α^j) for ξ ≠ 0.
pub fn projection_symbol(xi: [f64; 2], sign: Sign) -> Result<Mat2> {
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    if r == 0.0 {
        return Err(CoreError::UndefinedDirection("projection symbol at ξ = 0".into()));
    }
    let s = sign.factor();
    let e = [s * xi[0] / r, s * xi[1] / r];
    Ok(projection_of_unit(e))
}

/// Π(e) for a unit direction e.
#[inline]
pub fn projection_of_unit(e: [f64; 2]) -> Mat2 {
    // e·σ = [[0, e1 − i e2], [e1 + i e2, 0]]
    let c = Complex64::new(e[0], e[1]);
    Mat2([
        [Complex64::new(0.5, 0.0), 0.5 * c.conj()],
        [0.5 * c, Complex64::new(0.5, 0.0)],
    ])
}

/// Mode-wise spectral projection ψ ↦ Π(±D)ψ. The zero mode uses the fixed
/// idempotent Π(±e₀) with e₀ = (1, 0), which keeps both the partition of
/// identity and the Pythagoras identity ‖ψ‖² = ‖ψ₊‖² + ‖ψ₋‖² exact.
pub fn apply_projection(psi: &SpinorField2D, sign: Sign) -> SpinorField2D {
    let up = psi.up.clone().into_fourier();
    let dn = psi.dn.clone().into_fourier();
    let grid = up.grid;
    let n = grid.n;
    let mut out = SpinorField2D::zeros(grid, crate::field::Representation::Fourier);
    let s = sign.factor();
    for i in 0..n {
        for j in 0..n {
            let idx = i * n + j;
            let xi = grid.xi(i, j);
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            let v = [up.data[idx], dn.data[idx]];
            let c = if r == 0.0 {
                Complex64::new(s, 0.0)
            } else {
                Complex64::new(s * xi[0] / r, s * xi[1] / r)
            };
            out.up.data[idx] = 0.5 * (v[0] + c.conj() * v[1]);
            out.dn.data[idx] = 0.5 * (v[1] + c * v[0]);
        }
    }
    out
}

/// Hermitian inner product ⟨u, v⟩ = Σ u_i conj(v_i) on C².
#[inline]
pub fn inner2(u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    u[0] * v[0].conj() + u[1] * v[1].conj()
}

/// A space-time frequency point X = (τ, ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqPoint {
    pub tau: f64,
    pub xi: [f64; 2],
}

impl FreqPoint {
    pub fn new(tau: f64, xi: [f64; 2]) -> Self {
        FreqPoint { tau, xi }
    }

    pub fn xi_norm(&self) -> f64 {
        (self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1]).sqrt()
    }

    pub fn sub(&self, other: &FreqPoint) -> FreqPoint {
        FreqPoint {
            tau: self.tau - other.tau,
            xi: [self.xi[0] - other.xi[0], self.xi[1] - other.xi[1]],
        }
    }

    /// Hyperbolic weight h = τ ± |ξ|.
    pub fn hyperbolic_weight(&self, sign: Sign) -> f64 {
        self.tau + sign.factor() * self.xi_norm()
    }
}

/// Signed direction ±ξ/|ξ|.
fn signed_dir(xi: [f64; 2], sign: Sign) -> Result<[f64; 2]> {
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    if r == 0.0 {
        return Err(CoreError::UndefinedDirection("zero frequency".into()));
    }
    let s = sign.factor();
    Ok([s * xi[0] / r, s * xi[1] / r])
}

/// Angle θ(a, b) of nonzero vectors; error on zero input.
pub fn angle(a: [f64; 2], b: [f64; 2]) -> Result<f64> {
    if (a[0] == 0.0 && a[1] == 0.0) || (b[0] == 0.0 && b[1] == 0.0) {
        return Err(CoreError::UndefinedDirection("angle of zero vector".into()));
    }
    Ok(angle_between(a, b))
}

/// A bilinear interaction X₀ = X₁ − X₂ with a sign triple (±₀, ±₁, ±₂).
#[derive(Debug, Clone, Copy)]
pub struct BilinearInteraction {
    pub x0: FreqPoint,
    pub x1: FreqPoint,
    pub x2: FreqPoint,
    pub signs: [Sign; 3],
}

impl BilinearInteraction {
    /// Builds the interaction from (X₁, X₂); X₀ = X₁ − X₂.
    pub fn new(x1: FreqPoint, x2: FreqPoint, signs: [Sign; 3]) -> Result<Self> {
        if x1.xi_norm() == 0.0 || x2.xi_norm() == 0.0 {
            return Err(CoreError::UndefinedDirection("interaction with zero frequency".into()));
        }
        Ok(BilinearInteraction { x0: x1.sub(&x2), x1, x2, signs })
    }

    pub fn h(&self, j: usize) -> f64 {
        [self.x0, self.x1, self.x2][j].hyperbolic_weight(self.signs[j])
    }

    pub fn max_h(&self) -> f64 {
        self.h(0).abs().max(self.h(1).abs()).max(self.h(2).abs())
    }

    /// θ(±_j ξ_j, ±_k ξ_k); requires both frequencies nonzero.
    pub fn theta(&self, j: usize, k: usize) -> Result<f64> {
        let xs = [self.x0, self.x1, self.x2];
        let a = signed_dir(xs[j].xi, self.signs[j])?;
        let b = signed_dir(xs[k].xi, self.signs[k])?;
        Ok(angle_between(a, b))
    }

    pub fn xi_norm(&self, j: usize) -> f64 {
        [self.x0, self.x1, self.x2][j].xi_norm()
    }
}

/// The sign ±₁₂ of a bilinear interaction: the table for (±₁, ±₂) = (+,+)
/// and (+,−), extended to the remaining cases by reversing all three signs.
/// Ties |ξ₁| = |ξ₂| with (+,+) give −.
pub fn classify_sign_pm12(inter: &BilinearInteraction) -> Result<Sign> {
    let r1 = inter.x1.xi_norm();
    let r2 = inter.x2.xi_norm();
    if r1 == 0.0 || r2 == 0.0 {
        return Err(CoreError::UndefinedDirection("sign classification at zero frequency".into()));
    }
    Ok(match (inter.signs[1], inter.signs[2]) {
        (Sign::Plus, Sign::Plus) => {
            if r1 > r2 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        }
        (Sign::Plus, Sign::Minus) => Sign::Plus,
        (Sign::Minus, Sign::Minus) => {
            if r1 > r2 {
                Sign::Minus
            } else {
                Sign::Plus
            }
        }
        (Sign::Minus, Sign::Plus) => Sign::Minus,
    })
}

/// A quadrilinear symbol configuration: four unit directions and four unit
/// spinors.
#[derive(Debug, Clone, Copy)]
pub struct QuadInteraction {
    pub e: [[f64; 2]; 4],
    pub z: [[Complex64; 2]; 4],
}

impl QuadInteraction {
    pub fn theta(&self, j: usize, k: usize) -> f64 {
        angle_between(self.e[j], self.e[k])
    }

    /// φ = min of the four cross angles θ₁₃, θ₁₄, θ₂₃, θ₂₄.
    pub fn phi(&self) -> f64 {
        self.theta(0, 2)
            .min(self.theta(0, 3))
            .min(self.theta(1, 2))
            .min(self.theta(1, 3))
    }
}

/// q₁₂₃₄ = ⟨α^μ Π(e₁)z₁, Π(e₂)z₂⟩ ⟨α_μ Π(e₃)z₃, Π(e₄)z₄⟩, contracted with
/// the metric diag(−1, 1, 1):
/// q = −⟨α⁰…⟩⟨α⁰…⟩ + ⟨α¹…⟩⟨α¹…⟩ + ⟨α²…⟩⟨α²…⟩.
pub fn q1234(q: &QuadInteraction) -> Complex64 {
    let p: Vec<[Complex64; 2]> =
        (0..4).map(|j| projection_of_unit(q.e[j]).apply(q.z[j])).collect();
    let mut acc = ZERO;
    for mu in 0..3 {
        let a = inner2(matrices::ALPHA[mu].apply(p[0]), p[1]);
        let b = inner2(matrices::ALPHA[mu].apply(p[2]), p[3]);
        let metric = if mu == 0 { -1.0 } else { 1.0 };
        acc += metric * a * b;
    }
    acc
}

/// The angle bound θ₁₂θ₃₄ + φ·max(θ₁₂, θ₃₄) + φ² controlling |q₁₂₃₄|.
pub fn q1234_angle_bound(q: &QuadInteraction) -> f64 {
    let t12 = q.theta(0, 1);
    let t34 = q.theta(2, 3);
    let phi = q.phi();
    t12 * t34 + phi * t12.max(t34) + phi * phi
}

/// The simplified bound θ₁₃θ₂₄, valid in the regimes where
/// min(θ₁₂, θ₃₄) ≪ φ.
pub fn q1234_cross_bound(q: &QuadInteraction) -> f64 {
    q.theta(0, 2) * q.theta(1, 3)
}

/// σ^j g_j = Σ_{j=1,2} ⟨α^j Π(±₁ξ₁)z₁, Π(±₂ξ₂)z₂⟩ g_j — the trilinear
/// potential symbol contracted with the spatial potential coefficients.
pub fn sigma_trilinear(
    xi1: [f64; 2],
    xi2: [f64; 2],
    signs: [Sign; 2],
    z1: [Complex64; 2],
    z2: [Complex64; 2],
    g: [Complex64; 2],
) -> Result<Complex64> {
    let p1 = projection_symbol(xi1, signs[0])?.apply(z1);
    let p2 = projection_symbol(xi2, signs[1])?.apply(z2);
    let s1 = inner2(matrices::ALPHA1.apply(p1), p2);
    let s2 = inner2(matrices::ALPHA2.apply(p1), p2);
    Ok(s1 * g[0] + s2 * g[1])
}

/// Which component pair of the antisymmetrized current symbol σ_{κλ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaKind {
    /// Spatial pair (1, 2).
    SpatialPair,
    /// Mixed pair (k, 0), k ∈ {1, 2}.
    TimePair { k: usize },
}

/// σ_{κλ}(X₁, X₂) = X₀^κ ⟨α_λ Π(±₁ξ₁)z₁, Π(±₂ξ₂)z₂⟩ − X₀^λ ⟨α_κ Π z₁, Π z₂⟩
/// with X₀ = X₁ − X₂ and indices lowered with diag(−1, 1, 1).
pub fn sigma_kl(
    kind: SigmaKind,
    x1: FreqPoint,
    x2: FreqPoint,
    signs: [Sign; 2],
    z1: [Complex64; 2],
    z2: [Complex64; 2],
) -> Result<Complex64> {
    let x0 = x1.sub(&x2);
    let p1 = projection_symbol(x1.xi, signs[0])?.apply(z1);
    let p2 = projection_symbol(x2.xi, signs[1])?.apply(z2);
    // α with a lower index: α_0 = −α⁰, α_j = α^j.
    let pair = |mu: usize| -> Complex64 {
        let metric = if mu == 0 { -1.0 } else { 1.0 };
        metric * inner2(matrices::ALPHA[mu].apply(p1), p2)
    };
    let comp = |mu: usize| -> f64 {
        match mu {
            0 => x0.tau,
            j => x0.xi[j - 1],
        }
    };
    let (kappa, lambda) = match kind {
        SigmaKind::SpatialPair => (1usize, 2usize),
        SigmaKind::TimePair { k } => {
            if k != 1 && k != 2 {
                return Err(CoreError::Parameter("spatial index must be 1 or 2".into()));
            }
            (k, 0usize)
        }
    };
    Ok(comp(kappa) * pair(lambda) - comp(lambda) * pair(kappa))
}

/// Evaluated lower bounds on max(|h₀|, |h₁|, |h₂|) and the angle
/// comparability ratios for a bilinear interaction. Fields are `None` when
/// the hypothesis of the corresponding statement is not met (or ξ₀ = 0
/// makes θ₀ⱼ undefined).
#[derive(Debug, Clone, Default)]
pub struct AngleBounds {
    pub max_h: f64,
    pub theta12: f64,
    /// min(|ξ₁|, |ξ₂|)·θ₁₂²
    pub low_bound: f64,
    /// |ξ₁||ξ₂|θ₁₂²/|ξ₀| (None when ξ₀ = 0 or the opposite-sign low-output
    /// branch applies)
    pub product_bound: Option<f64>,
    /// min(|ξ₁|, |ξ₂|) in the opposite-sign low-output branch, where also
    /// θ₁₂ ∼ 1
    pub branch_bound: Option<f64>,
    /// |ξ₀|·min(θ₀₁, θ₀₂)² (all signs)
    pub xi0_angle_bound: Option<f64>,
    /// |ξ₀| when ±₀ ≠ ±₁₂
    pub sign_mismatch_bound: Option<f64>,
    /// min(θ₀₁, θ₀₂) / [(min(|ξ₁|,|ξ₂|)/|ξ₀|)·sin θ₁₂] when ±₀ = ±₁₂
    pub comparability_ratio: Option<f64>,
    /// max(θ₀₁, θ₀₂)/θ₁₂ when ±₀ = ±₁₂ and ±₁ ≠ ±₂
    pub mixed_sign_ratio: Option<f64>,
    /// [|ξ₁||ξ₂|θ₁₂²/|ξ₀|] / [min(|ξ₀|,|ξ₁|,|ξ₂|)·max(θ₀₁,θ₀₂)²]
    /// when ±₀ = ±₁₂ and ±₁ = ±₂
    pub same_sign_comparability: Option<f64>,
}

/// Fraction of min(|ξ₁|, |ξ₂|) below which the output counts as "low" in the
/// opposite-sign branch of the interaction-angle analysis.
pub const LOW_OUTPUT_FRACTION: f64 = 0.25;

pub fn angle_bounds(inter: &BilinearInteraction) -> Result<AngleBounds> {
    let theta12 = inter.theta(1, 2)?;
    let r0 = inter.xi_norm(0);
    let r1 = inter.xi_norm(1);
    let r2 = inter.xi_norm(2);
    let rmin = r1.min(r2);
    let mut out = AngleBounds {
        max_h: inter.max_h(),
        theta12,
        low_bound: rmin * theta12 * theta12,
        ..AngleBounds::default()
    };

    let opposite = inter.signs[1] != inter.signs[2];
    let low_output = opposite && r0 <= LOW_OUTPUT_FRACTION * rmin;
    if low_output {
        out.branch_bound = Some(rmin);
    } else if r0 > 0.0 {
        out.product_bound = Some(r1 * r2 * theta12 * theta12 / r0);
    }

    if r0 > 0.0 {
        let t01 = inter.theta(0, 1)?;
        let t02 = inter.theta(0, 2)?;
        let tmin = t01.min(t02);
        let tmax = t01.max(t02);
        out.xi0_angle_bound = Some(r0 * tmin * tmin);
        let pm12 = classify_sign_pm12(inter)?;
        if inter.signs[0] != pm12 {
            out.sign_mismatch_bound = Some(r0);
        } else {
            let denom = (rmin / r0) * theta12.sin();
            if denom > 0.0 {
                out.comparability_ratio = Some(tmin / denom);
            }
            if opposite && theta12 > 0.0 {
                out.mixed_sign_ratio = Some(tmax / theta12);
            }
            if !opposite && theta12 > 0.0 && tmax > 0.0 {
                let lhs = r1 * r2 * theta12 * theta12 / r0;
                let rhs = r0.min(rmin) * tmax * tmax;
                out.same_sign_comparability = Some(lhs / rhs);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Representation;
    use crate::grid::Grid2D;
    use rand::Rng;

    #[test]
    fn projection_symbol_examples() {
        let p = projection_symbol([1.0, 0.0], Sign::Plus).unwrap();
        let expect = Mat2([
            [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
            [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        assert!(p.sub(&expect).frobenius_norm() < 1e-15);

        let p = projection_symbol([0.0, 1.0], Sign::Plus).unwrap();
        let expect = Mat2([
            [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5)],
            [Complex64::new(0.0, 0.5), Complex64::new(0.5, 0.0)],
        ]);
        assert!(p.sub(&expect).frobenius_norm() < 1e-15);

        assert!(projection_symbol([0.0, 0.0], Sign::Plus).is_err());
    }

    #[test]
    fn alpha_matrix_algebra() {
        use matrices::*;
        for m in [ALPHA0, ALPHA1, ALPHA2, BETA] {
            assert!(m.adjoint().sub(&m).frobenius_norm() < 1e-15);
            assert!(m.mul(&m).sub(&Mat2::IDENTITY).frobenius_norm() < 1e-15);
        }
        let anti = ALPHA1.mul(&ALPHA2);
        let comm = ALPHA2.mul(&ALPHA1);
        let mut sum = anti;
        for r in 0..2 {
            for c in 0..2 {
                sum.0[r][c] += comm.0[r][c];
            }
        }
        assert!(sum.frobenius_norm() < 1e-15);
    }

    #[test]
    fn projection_algebra_random() {
        let mut rng = crate::rng::trial_rng(11, "dirac-test", 0);
        for _ in 0..2000 {
            let xi = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            if xi[0] == 0.0 && xi[1] == 0.0 {
                continue;
            }
            let p = projection_symbol(xi, Sign::Plus).unwrap();
            let m = projection_symbol(xi, Sign::Minus).unwrap();
            assert!(p.mul(&p).sub(&p).frobenius_norm() < 1e-14);
            assert!(p.adjoint().sub(&p).frobenius_norm() < 1e-14);
            assert!(p.mul(&m).frobenius_norm() < 1e-14);
            let mut sum = p;
            for r in 0..2 {
                for c in 0..2 {
                    sum.0[r][c] += m.0[r][c];
                }
            }
            assert!(sum.sub(&Mat2::IDENTITY).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn spinor_split_partition_and_pythagoras() {
        let grid = Grid2D::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let mut rng = crate::rng::trial_rng(12, "dirac-test", 1);
        let mut psi = SpinorField2D::zeros(grid, Representation::Fourier);
        for v in psi.up.data.iter_mut().chain(psi.dn.data.iter_mut()) {
            *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let plus = apply_projection(&psi, Sign::Plus);
        let minus = apply_projection(&psi, Sign::Minus);
        let mut sum = plus.clone();
        sum.add_scaled(&minus, Complex64::new(1.0, 0.0));
        assert!(sum.sub(&psi).norm() <= 1e-12 * psi.norm());
        let pyth = (plus.norm_sq() + minus.norm_sq() - psi.norm_sq()).abs();
        assert!(pyth <= 1e-12 * psi.norm_sq());
        // Fixed point.
        let again = apply_projection(&plus, Sign::Plus);
        assert!(again.sub(&plus).norm() <= 1e-12 * plus.norm().max(1e-30));
    }

    #[test]
    fn sign_table() {
        let mk = |s1, s2, r1: f64, r2: f64| {
            BilinearInteraction::new(
                FreqPoint::new(0.3, [r1, 0.0]),
                FreqPoint::new(0.1, [0.0, r2]),
                [Sign::Plus, s1, s2],
            )
            .unwrap()
        };
        assert_eq!(classify_sign_pm12(&mk(Sign::Plus, Sign::Plus, 2.0, 1.0)).unwrap(), Sign::Plus);
        assert_eq!(classify_sign_pm12(&mk(Sign::Plus, Sign::Plus, 1.0, 1.0)).unwrap(), Sign::Minus);
        assert_eq!(classify_sign_pm12(&mk(Sign::Plus, Sign::Minus, 1.0, 2.0)).unwrap(), Sign::Plus);
        assert_eq!(classify_sign_pm12(&mk(Sign::Minus, Sign::Minus, 2.0, 1.0)).unwrap(), Sign::Minus);
        assert_eq!(classify_sign_pm12(&mk(Sign::Minus, Sign::Minus, 1.0, 2.0)).unwrap(), Sign::Plus);
        assert_eq!(classify_sign_pm12(&mk(Sign::Minus, Sign::Plus, 1.0, 2.0)).unwrap(), Sign::Minus);
    }

    fn random_unit_spinor(rng: &mut impl Rng) -> [Complex64; 2] {
        let v = [
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    fn random_unit_dir(rng: &mut impl Rng) -> [f64; 2] {
        let a = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
        [a.cos(), a.sin()]
    }

    #[test]
    fn q1234_vanishes_when_all_angles_vanish() {
        let mut rng = crate::rng::trial_rng(13, "dirac-test", 2);
        for _ in 0..100 {
            let e = random_unit_dir(&mut rng);
            let z1 = random_unit_spinor(&mut rng);
            let z3 = random_unit_spinor(&mut rng);
            let q = QuadInteraction { e: [e, e, e, e], z: [z1, z1, z3, z3] };
            assert!(q1234_angle_bound(&q) < 1e-15);
            assert!(q1234(&q).norm() < 1e-12);
        }
    }

    #[test]
    fn q1234_two_routes_agree() {
        let mut rng = crate::rng::trial_rng(14, "dirac-test", 3);
        for _ in 0..500 {
            let q = QuadInteraction {
                e: [
                    random_unit_dir(&mut rng),
                    random_unit_dir(&mut rng),
                    random_unit_dir(&mut rng),
                    random_unit_dir(&mut rng),
                ],
                z: [
                    random_unit_spinor(&mut rng),
                    random_unit_spinor(&mut rng),
                    random_unit_spinor(&mut rng),
                    random_unit_spinor(&mut rng),
                ],
            };
            // Independent expansion: explicit component sums.
            let p: Vec<[Complex64; 2]> =
                (0..4).map(|j| projection_of_unit(q.e[j]).apply(q.z[j])).collect();
            let mut direct = ZERO;
            for mu in 0..3 {
                let m = matrices::ALPHA[mu];
                let mut a = ZERO;
                let mut b = ZERO;
                for r in 0..2 {
                    for c in 0..2 {
                        a += m.0[r][c] * p[0][c] * p[1][r].conj();
                        b += m.0[r][c] * p[2][c] * p[3][r].conj();
                    }
                }
                direct += if mu == 0 { -a * b } else { a * b };
            }
            assert!((q1234(&q) - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn sigma_kl_vanishes_for_equal_points() {
        let mut rng = crate::rng::trial_rng(15, "dirac-test", 4);
        let x = FreqPoint::new(1.3, [0.4, -2.0]);
        let z1 = random_unit_spinor(&mut rng);
        let z2 = random_unit_spinor(&mut rng);
        let v = sigma_kl(SigmaKind::SpatialPair, x, x, [Sign::Plus, Sign::Minus], z1, z2).unwrap();
        assert!(v.norm() < 1e-15);
        let v = sigma_kl(SigmaKind::TimePair { k: 1 }, x, x, [Sign::Plus, Sign::Plus], z1, z2).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(sigma_kl(SigmaKind::TimePair { k: 3 }, x, x, [Sign::Plus, Sign::Plus], z1, z2).is_err());
    }

    #[test]
    fn trilinear_symbol_zero_g() {
        let mut rng = crate::rng::trial_rng(16, "dirac-test", 5);
        let z1 = random_unit_spinor(&mut rng);
        let z2 = random_unit_spinor(&mut rng);
        let v = sigma_trilinear([1.0, 0.0], [0.0, 1.0], [Sign::Plus, Sign::Plus], z1, z2, [ZERO, ZERO])
            .unwrap();
        assert!(v.norm() == 0.0);
    }

    #[test]
    fn angle_bounds_null_interaction() {
        // Collinear same-sign rays with τ_j = −|ξ_j|: all h_j = 0, θ₁₂ = 0.
        let x1 = FreqPoint::new(-2.0, [2.0, 0.0]);
        let x2 = FreqPoint::new(-1.0, [1.0, 0.0]);
        let inter = BilinearInteraction::new(x1, x2, [Sign::Plus, Sign::Plus, Sign::Plus]).unwrap();
        assert!(inter.max_h() < 1e-15);
        let b = angle_bounds(&inter).unwrap();
        assert!(b.theta12 < 1e-15);
        assert!(b.low_bound < 1e-15);
    }

    #[test]
    fn angle_special_values_and_errors() {
        assert!(angle([0.0, 0.0], [1.0, 0.0]).is_err());
        assert!((angle([1.0, 0.0], [0.0, 1.0]).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}

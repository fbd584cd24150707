//! Charge-class data construction: the Gauss constraint, Lorenz-gauge
//! potential data, the current, and the half-wave / Klein-Gordon splitting
//! of the electromagnetic fields.

use crate::error::{CoreError, Result};
use crate::field::{
    curl_z, div_free_project, divergence, gradient, ComplexField2D, Representation, Sign,
    SpinorField2D, VectorField2D, ZeroModePolicy,
};
use crate::grid::{dyadic_ladder, Grid2D};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Initial data in the charge class: spinor ψ₀, divergence-free electric part E₀^df and
/// scalar magnetic component B₀³.
#[derive(Debug, Clone)]
pub struct ChargeClassData {
    pub psi0: SpinorField2D,
    pub e0_df: VectorField2D,
    pub b0_3: ComplexField2D,
}

/// Lorenz-gauge potential state: A_μ and ∂ₜA_μ for μ = 0, 1, 2, stored in
/// Fourier representation with conjugate symmetry (real fields).
#[derive(Debug, Clone)]
pub struct PotentialState {
    pub a: [ComplexField2D; 3],
    pub a_t: [ComplexField2D; 3],
}

/// The four split electromagnetic fields E^df_±, B³_±.
#[derive(Debug, Clone)]
pub struct EMSplit {
    pub e_df_plus: VectorField2D,
    pub e_df_minus: VectorField2D,
    pub b3_plus: ComplexField2D,
    pub b3_minus: ComplexField2D,
}

/// The Dirac current J^μ = ⟨α^μ ψ, ψ⟩ (physical representation, real).
#[derive(Debug, Clone)]
pub struct Current {
    pub j0: ComplexField2D,
    pub j1: ComplexField2D,
    pub j2: ComplexField2D,
}

impl Current {
    pub fn spatial(&self) -> VectorField2D {
        [self.j1.clone(), self.j2.clone()]
    }
}

/// Pointwise current J^μ(x) = ⟨α^μ ψ(x), ψ(x)⟩:
/// J⁰ = |ψ|², J¹ = 2 Re(ψ₁ conj(ψ₂)), J² = −2 Im(ψ₁ conj(ψ₂)).
pub fn current(psi: &SpinorField2D) -> Current {
    let up = psi.up.clone().into_physical();
    let dn = psi.dn.clone().into_physical();
    let grid = up.grid;
    let mut j0 = ComplexField2D::zeros(grid, Representation::Physical);
    let mut j1 = ComplexField2D::zeros(grid, Representation::Physical);
    let mut j2 = ComplexField2D::zeros(grid, Representation::Physical);
    for idx in 0..grid.len() {
        let a = up.data[idx];
        let b = dn.data[idx];
        let cross = a * b.conj();
        j0.data[idx] = Complex64::new(a.norm_sqr() + b.norm_sqr(), 0.0);
        j1.data[idx] = Complex64::new(2.0 * cross.re, 0.0);
        j2.data[idx] = Complex64::new(-2.0 * cross.im, 0.0);
    }
    Current { j0, j1, j2 }
}

/// E₀ = E₀^df + Δ⁻¹∇(|ψ₀|² − mean). On the torus the Gauss law is solvable
/// only after removing the mean charge; the removed constant is
/// mean(|ψ₀|²) = charge / L².
pub fn assemble_e0(data: &ChargeClassData) -> Result<VectorField2D> {
    let rho = current(&data.psi0).j0;
    let mut rho_hat = rho.into_fourier();
    rho_hat.data[0] = Complex64::default(); // mean removal
    let pot = rho_hat.inv_laplacian(ZeroModePolicy::Error)?;
    let grad = gradient(&pot)?;
    let mut e = [data.e0_df[0].clone().into_fourier(), data.e0_df[1].clone().into_fourier()];
    e[0].add_scaled(&grad[0], Complex64::new(1.0, 0.0));
    e[1].add_scaled(&grad[1], Complex64::new(1.0, 0.0));
    Ok(e)
}

/// Potential data at t = 0: a₀ = ȧ₀ = 0,
/// a = −Δ⁻¹(∂₂B₀³, −∂₁B₀³) and ȧ = −E₀.
pub fn potential_data(data: &ChargeClassData) -> Result<PotentialState> {
    let grid = data.b0_3.grid;
    let b3 = data.b0_3.clone().into_fourier();
    // curl of (0,0,B³): (∂₂B³, −∂₁B³)
    let d2b = b3.apply_multiplier(|xi| Complex64::new(0.0, xi[1]), ZeroModePolicy::Error)?;
    let d1b = b3.apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error)?;
    let mut a1 = d2b.inv_laplacian(ZeroModePolicy::Annihilate)?;
    a1.scale(Complex64::new(-1.0, 0.0));
    // a₂ = −Δ⁻¹(−∂₁B³) = Δ⁻¹∂₁B³; the two sign flips cancel.
    let a2 = d1b.inv_laplacian(ZeroModePolicy::Annihilate)?;
    let e0 = assemble_e0(data)?;
    let mut at1 = e0[0].clone();
    at1.scale(Complex64::new(-1.0, 0.0));
    let mut at2 = e0[1].clone();
    at2.scale(Complex64::new(-1.0, 0.0));
    Ok(PotentialState {
        a: [
            ComplexField2D::zeros(grid, Representation::Fourier),
            a1,
            a2,
        ],
        a_t: [ComplexField2D::zeros(grid, Representation::Fourier), at1, at2],
    })
}

/// Reconstructed fields from a potential state: E = ∇A₀ − ∂ₜA,
/// B³ = ∂₁A₂ − ∂₂A₁, and the divergence-free part E^df = P_df E.
pub struct Reconstructed {
    pub e: VectorField2D,
    pub e_df: VectorField2D,
    pub b3: ComplexField2D,
}

pub fn reconstruct_em(pot: &PotentialState) -> Result<Reconstructed> {
    let grad_a0 = gradient(&pot.a[0])?;
    let mut e = [grad_a0[0].clone(), grad_a0[1].clone()];
    e[0].add_scaled(&pot.a_t[1], Complex64::new(-1.0, 0.0));
    e[1].add_scaled(&pot.a_t[2], Complex64::new(-1.0, 0.0));
    let b3 = curl_z(&[pot.a[1].clone(), pot.a[2].clone()])?;
    let e_df = div_free_project(&e)?;
    Ok(Reconstructed { e, e_df, b3 })
}

/// Split the electromagnetic observables into half-wave / Klein-Gordon
/// components:
/// 2E^df_± = E^df ± i⟨D⟩⁻¹[∇×(0,0,B³) − P_df J],
/// 2B³_± = B³ ± i|D|⁻¹[−(∇×E^df)³].
pub fn split_em(e_df: &VectorField2D, b3: &ComplexField2D, j: &Current) -> Result<EMSplit> {
    let e_df = [e_df[0].clone().into_fourier(), e_df[1].clone().into_fourier()];
    let b3 = b3.clone().into_fourier();

    // ∂ₜE^df = ∇×(0,0,B³) − P_df J
    let d2b = b3.apply_multiplier(|xi| Complex64::new(0.0, xi[1]), ZeroModePolicy::Error)?;
    let mut d1b = b3.apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error)?;
    d1b.scale(Complex64::new(-1.0, 0.0));
    let j_df = div_free_project(&[
        j.j1.clone().into_fourier(),
        j.j2.clone().into_fourier(),
    ])?;
    let mut et = [d2b, d1b];
    et[0].add_scaled(&j_df[0], Complex64::new(-1.0, 0.0));
    et[1].add_scaled(&j_df[1], Complex64::new(-1.0, 0.0));

    let inv_bracket = |f: &ComplexField2D| {
        f.apply_multiplier(
            |xi| Complex64::new(1.0 / (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt(), 0.0),
            ZeroModePolicy::Error,
        )
    };
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    let mk_e = |sign: Sign| -> Result<VectorField2D> {
        let s = sign.factor();
        let mut out0 = e_df[0].clone();
        out0.scale(half);
        out0.add_scaled(&inv_bracket(&et[0])?, s * half_i);
        let mut out1 = e_df[1].clone();
        out1.scale(half);
        out1.add_scaled(&inv_bracket(&et[1])?, s * half_i);
        Ok([out0, out1])
    };

    // ∂ₜB³ = −(∇×E^df)³; this curl has exact zero mean.
    let mut bt = curl_z(&e_df)?;
    bt.scale(Complex64::new(-1.0, 0.0));
    let inv_mod = |f: &ComplexField2D| {
        f.apply_multiplier(
            |xi| {
                let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                if r == 0.0 {
                    Complex64::new(f64::NAN, 0.0)
                } else {
                    Complex64::new(1.0 / r, 0.0)
                }
            },
            ZeroModePolicy::Annihilate,
        )
    };
    let mk_b = |sign: Sign| -> Result<ComplexField2D> {
        let s = sign.factor();
        let mut out = b3.clone();
        out.scale(half);
        out.add_scaled(&inv_mod(&bt)?, s * half_i);
        Ok(out)
    };

    Ok(EMSplit {
        e_df_plus: mk_e(Sign::Plus)?,
        e_df_minus: mk_e(Sign::Minus)?,
        b3_plus: mk_b(Sign::Plus)?,
        b3_minus: mk_b(Sign::Minus)?,
    })
}

impl EMSplit {
    /// Sum of the ± components; reconstructs (E^df, B³).
    pub fn recombine(&self) -> (VectorField2D, ComplexField2D) {
        let mut e0 = self.e_df_plus[0].clone();
        e0.add_scaled(&self.e_df_minus[0], Complex64::new(1.0, 0.0));
        let mut e1 = self.e_df_plus[1].clone();
        e1.add_scaled(&self.e_df_minus[1], Complex64::new(1.0, 0.0));
        let mut b = self.b3_plus.clone();
        b.add_scaled(&self.b3_minus, Complex64::new(1.0, 0.0));
        ([e0, e1], b)
    }
}

/// Low-frequency Besov sums, H^{-1/2} high parts and the current bounds for
/// a data set, evaluated at a given cutoff parameter.
#[derive(Debug, Clone, Serialize)]
pub struct BesovReport {
    /// Σ_{N<1} ‖P_N (E₀^df, B₀³)‖ over the homogeneous ladder.
    pub low_frequency_sum: f64,
    /// ‖P_{|ξ|≥1} (E₀^df, B₀³)‖_{H^{-1/2}}.
    pub high_frequency_part: f64,
    /// Σ_{N<1} ‖P_N J(0)‖ over the homogeneous ladder.
    pub current_low_sum: f64,
    /// ‖J(0)‖_{H^{-3/2}} of the spatial current.
    pub current_h_minus_32: f64,
    /// ‖ψ₀‖² (the charge constant).
    pub charge: f64,
    /// current_low_sum / charge (finite-constant check for the low-frequency current bound).
    pub current_low_ratio: f64,
    /// current_h_minus_32 / charge.
    pub current_sobolev_ratio: f64,
}

/// Shell-resolved Besov / Sobolev bookkeeping for the data and its current.
pub fn besov_data_check(data: &ChargeClassData) -> Result<BesovReport> {
    let grid = data.b0_3.grid;
    let e = [data.e0_df[0].clone().into_fourier(), data.e0_df[1].clone().into_fourier()];
    let b = data.b0_3.clone().into_fourier();
    let joint_shell_norm = |nv: f64, hi: f64| -> f64 {
        let keep = |xi: [f64; 2]| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            r > 0.0 && nv <= r && r < hi
        };
        let s = e[0].restrict(keep).norm_sq() + e[1].restrict(keep).norm_sq()
            + b.restrict(keep).norm_sq();
        s.sqrt()
    };
    let mut low = 0.0;
    if grid.dxi() < 1.0 {
        for shell in dyadic_ladder(grid.dxi() * 0.999, 0.5) {
            let nv = shell.value();
            if nv >= 1.0 {
                break;
            }
            low += joint_shell_norm(nv, 2.0 * nv);
        }
    }
    let hminus_half = |f: &ComplexField2D| -> f64 {
        f.restrict(|xi| xi[0] * xi[0] + xi[1] * xi[1] >= 1.0)
            .apply_multiplier(
                |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(-0.25), 0.0),
                ZeroModePolicy::Error,
            )
            .map(|g| g.norm_sq())
            .unwrap_or(0.0)
    };
    let high = (hminus_half(&e[0]) + hminus_half(&e[1]) + hminus_half(&b)).sqrt();

    let j = current(&data.psi0);
    let j1 = j.j1.clone().into_fourier();
    let j2 = j.j2.clone().into_fourier();
    let mut current_low = 0.0;
    if grid.dxi() < 1.0 {
        for shell in dyadic_ladder(grid.dxi() * 0.999, 0.5) {
            let nv = shell.value();
            if nv >= 1.0 {
                break;
            }
            let keep = |xi: [f64; 2]| {
                let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                nv <= r && r < 2.0 * nv
            };
            current_low +=
                (j1.restrict(keep).norm_sq() + j2.restrict(keep).norm_sq()).sqrt();
        }
    }
    let weight_32 = |f: &ComplexField2D| -> f64 {
        f.apply_multiplier(
            |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(-0.75), 0.0),
            ZeroModePolicy::Error,
        )
        .map(|g| g.norm_sq())
        .unwrap_or(0.0)
    };
    let current_sob = (weight_32(&j1) + weight_32(&j2)).sqrt();
    let charge = data.psi0.norm_sq();
    Ok(BesovReport {
        low_frequency_sum: low,
        high_frequency_part: high,
        current_low_sum: current_low,
        current_h_minus_32: current_sob,
        charge,
        current_low_ratio: if charge > 0.0 { current_low / charge } else { 0.0 },
        current_sobolev_ratio: if charge > 0.0 { current_sob / charge } else { 0.0 },
    })
}

/// Profile of a generated field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    /// Analytic Gaussian bump exp(−|x−c|²/(2w²)) (periodized by sampling).
    Gaussian {
        width: f64,
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
    /// Band-limited Gaussian random field with |ξ| ∈ [band.0, band.1].
    RandomBand { band: [f64; 2] },
}

/// Specification of one generated field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub amplitude: f64,
    #[serde(flatten)]
    pub profile: Profile,
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(CoreError::Parameter("amplitude must be finite and >= 0".into()));
        }
        match &self.profile {
            Profile::Gaussian { width, .. } => {
                if !(*width > 0.0) {
                    return Err(CoreError::Parameter("gaussian width must be positive".into()));
                }
            }
            Profile::RandomBand { band } => {
                if !(band[0] >= 0.0 && band[1] > band[0]) {
                    return Err(CoreError::Parameter("band must satisfy 0 <= lo < hi".into()));
                }
            }
        }
        Ok(())
    }
}

/// Data-specification block: seeds and per-field profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub seed: u64,
    pub psi: FieldSpec,
    pub e_df: FieldSpec,
    pub b3: FieldSpec,
}

impl DataSpec {
    pub fn validate(&self) -> Result<()> {
        self.psi.validate()?;
        self.e_df.validate()?;
        self.b3.validate()
    }

    pub fn zero(seed: u64) -> DataSpec {
        let z = FieldSpec { amplitude: 0.0, profile: Profile::Gaussian { width: 1.0, center: None } };
        DataSpec { seed, psi: z.clone(), e_df: z.clone(), b3: z }
    }
}

/// A complex scalar field from a spec. Coefficients are drawn in a fixed
/// lattice order (independent of grid size for modes inside the band), so
/// refining the grid does not change the realized field.
fn generate_scalar(
    grid: Grid2D,
    spec: &FieldSpec,
    rng: &mut impl Rng,
    real_valued: bool,
) -> ComplexField2D {
    match &spec.profile {
        Profile::Gaussian { width, center } => {
            let c = center.unwrap_or([grid.box_period / 2.0, grid.box_period / 2.0]);
            let w2 = 2.0 * width * width;
            let amp = spec.amplitude;
            let l = grid.box_period;
            let f = ComplexField2D::from_fn_physical(grid, |x| {
                // nearest periodic image
                let mut dx = x[0] - c[0];
                let mut dy = x[1] - c[1];
                if dx > l / 2.0 {
                    dx -= l;
                }
                if dx < -l / 2.0 {
                    dx += l;
                }
                if dy > l / 2.0 {
                    dy -= l;
                }
                if dy < -l / 2.0 {
                    dy += l;
                }
                Complex64::new(amp * (-(dx * dx + dy * dy) / w2).exp(), 0.0)
            });
            f.to_fourier().expect("fresh physical field")
        }
        Profile::RandomBand { band } => {
            let mut f = ComplexField2D::zeros(grid, Representation::Fourier);
            let n = grid.n;
            // Fixed iteration order over signed modes so the draw sequence is
            // grid-independent: k1, k2 ascend over the band's bounding box.
            let kmax = (band[1] / grid.dxi()).ceil() as i64;
            let nyq = (n / 2) as i64;
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    let xi = [k1 as f64 * grid.dxi(), k2 as f64 * grid.dxi()];
                    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                    let re = rng.gen::<f64>() - 0.5;
                    let im = rng.gen::<f64>() - 0.5;
                    // Draws above are consumed for every box mode so the
                    // sequence does not depend on the grid size.
                    if r < band[0] || r > band[1] {
                        continue;
                    }
                    if k1.abs() >= nyq || k2.abs() >= nyq {
                        continue;
                    }
                    let i = k1.rem_euclid(n as i64) as usize;
                    let j = k2.rem_euclid(n as i64) as usize;
                    f.data[i * n + j] = Complex64::new(re, im);
                }
            }
            if real_valued {
                // Hermitian symmetrization: f̂(−ξ) = conj(f̂(ξ)).
                let mut sym = f.clone();
                for i in 0..n {
                    for j in 0..n {
                        let ni = (n - i) % n;
                        let nj = (n - j) % n;
                        sym.data[i * n + j] =
                            0.5 * (f.data[i * n + j] + f.data[ni * n + nj].conj());
                    }
                }
                f = sym;
            }
            // Normalize to the requested amplitude in L∞-ish scale: fix the
            // L² norm to amplitude·L (the norm of the constant `amplitude`).
            let norm = f.norm();
            if norm > 0.0 {
                f.scale(Complex64::new(spec.amplitude * grid.box_period / norm, 0.0));
            }
            f
        }
    }
}

/// Generates seed-reproducible charge-class data on a grid.
pub fn generate(grid: Grid2D, spec: &DataSpec) -> Result<ChargeClassData> {
    spec.validate()?;
    let mut rng = crate::rng::trial_rng(spec.seed, "data-psi", 0);
    let up = generate_scalar(grid, &spec.psi, &mut rng, false);
    let mut rng = crate::rng::trial_rng(spec.seed, "data-psi", 1);
    let dn = generate_scalar(grid, &spec.psi, &mut rng, false);
    let psi0 = SpinorField2D { up: up.into_fourier(), dn: dn.into_fourier() };

    let mut rng = crate::rng::trial_rng(spec.seed, "data-e", 0);
    let raw0 = generate_scalar(grid, &spec.e_df, &mut rng, true);
    let mut rng = crate::rng::trial_rng(spec.seed, "data-e", 1);
    let raw1 = generate_scalar(grid, &spec.e_df, &mut rng, true);
    let mut e0_df = div_free_project(&[raw0.into_fourier(), raw1.into_fourier()])?;
    // Constant (zero-mode) electric fields are divergence-free but carry no
    // charge-class information; drop them for reproducible norms.
    e0_df[0].data[0] = Complex64::default();
    e0_df[1].data[0] = Complex64::default();

    let mut rng = crate::rng::trial_rng(spec.seed, "data-b", 0);
    let mut b0_3 = generate_scalar(grid, &spec.b3, &mut rng, true).into_fourier();
    b0_3.data[0] = Complex64::default();

    Ok(ChargeClassData { psi0, e0_df, b0_3 })
}

/// ℓ² norm of the Gauss defect ∇·E₀ − (|ψ₀|² − mean).
pub fn gauss_residual(data: &ChargeClassData) -> Result<f64> {
    let e0 = assemble_e0(data)?;
    let div = divergence(&e0)?;
    let mut rho = current(&data.psi0).j0.into_fourier();
    rho.data[0] = Complex64::default();
    Ok(div.sub(&rho).norm())
}

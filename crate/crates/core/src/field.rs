//! Periodic-box Fourier infrastructure: transforms with discrete-Parseval
//! normalization, radial/angular multipliers, Littlewood-Paley shells,
//! sector projectors, divergence-free projection and the inverse Laplacian.

use crate::error::{CoreError, Result};
use crate::grid::{Dyadic, Grid2D};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Fourier,
}

impl Representation {
    fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Fourier => "fourier",
        }
    }
}

/// Half-wave / frequency-selection sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// Policy for multipliers that are singular at the zero mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// Fail if the singular mode carries mass.
    Error,
    /// Zero the singular mode.
    Annihilate,
}

/// Shell selection for Littlewood-Paley projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellMode {
    /// |ξ| ∈ [N, 2N)
    Homogeneous,
    /// ⟨ξ⟩ ∈ [N, 2N), N ≥ 1; the N = 1 shell absorbs |ξ| < 1 (and ξ = 0).
    Inhomogeneous,
}

fn plan_cache() -> &'static Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = plan_cache().lock().unwrap();
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Unnormalized 2d DFT in place (row-major n×n buffer).
fn fft2_inplace(data: &mut [Complex64], n: usize, forward: bool) {
    let p = plan(n, forward);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        p.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        p.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// An n×n complex scalar field tagged with its representation.
///
/// Normalization: the forward transform is the Riemann sum Δx²·Σ f e^{-ix·ξ},
/// so the discrete Parseval identity Δx²·Σ|f|² = (Δξ/2π)²·Σ|f̂|² holds exactly
/// and [`ComplexField2D::norm`] is representation-independent.
#[derive(Debug, Clone)]
pub struct ComplexField2D {
    pub grid: Grid2D,
    pub rep: Representation,
    pub data: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(grid: Grid2D, rep: Representation) -> Self {
        ComplexField2D { grid, rep, data: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_fn_physical(grid: Grid2D, mut f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let n = grid.n;
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                data.push(f(grid.x(i, j)));
            }
        }
        ComplexField2D { grid, rep: Representation::Physical, data }
    }

    pub fn from_fn_fourier(grid: Grid2D, mut f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let n = grid.n;
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                data.push(f(grid.xi(i, j)));
            }
        }
        ComplexField2D { grid, rep: Representation::Fourier, data }
    }

    pub fn is_fourier(&self) -> bool {
        self.rep == Representation::Fourier
    }

    /// Physical → Fourier. Errors if already in Fourier representation.
    pub fn to_fourier(&self) -> Result<ComplexField2D> {
        if self.rep != Representation::Physical {
            return Err(CoreError::Representation { expected: "physical", got: self.rep.name() });
        }
        let mut out = self.clone();
        out.fourier_inplace();
        Ok(out)
    }

    /// Fourier → physical. Errors if already in physical representation.
    pub fn to_physical(&self) -> Result<ComplexField2D> {
        if self.rep != Representation::Fourier {
            return Err(CoreError::Representation { expected: "fourier", got: self.rep.name() });
        }
        let mut out = self.clone();
        out.physical_inplace();
        Ok(out)
    }

    pub fn fourier_inplace(&mut self) {
        if self.rep == Representation::Fourier {
            return;
        }
        let scale = self.grid.dx() * self.grid.dx();
        fft2_inplace(&mut self.data, self.grid.n, true);
        for v in &mut self.data {
            *v *= scale;
        }
        self.rep = Representation::Fourier;
    }

    pub fn physical_inplace(&mut self) {
        if self.rep == Representation::Physical {
            return;
        }
        let l = self.grid.box_period;
        let scale = 1.0 / (l * l);
        fft2_inplace(&mut self.data, self.grid.n, false);
        for v in &mut self.data {
            *v *= scale;
        }
        self.rep = Representation::Physical;
    }

    /// Ensure Fourier representation (conversion allowed, per the multiplier
    /// operations' auto-convert contract).
    pub fn into_fourier(mut self) -> ComplexField2D {
        self.fourier_inplace();
        self
    }

    pub fn into_physical(mut self) -> ComplexField2D {
        self.physical_inplace();
        self
    }

    /// L² norm with the lattice measure weight of the current representation.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        let w = self.measure_weight();
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w
    }

    /// The squared-measure weight per lattice site for the current
    /// representation (Δx² or (Δξ/2π)²).
    pub fn measure_weight(&self) -> f64 {
        match self.rep {
            Representation::Physical => {
                let dx = self.grid.dx();
                dx * dx
            }
            Representation::Fourier => {
                let w = self.grid.dxi() / (2.0 * std::f64::consts::PI);
                w * w
            }
        }
    }

    /// Mean value over the box (the ξ=0 Fourier coefficient divided by L²).
    pub fn mean(&self) -> Complex64 {
        match self.rep {
            Representation::Physical => {
                self.data.iter().sum::<Complex64>() / self.data.len() as f64
            }
            Representation::Fourier => {
                let l = self.grid.box_period;
                self.data[0] / (l * l)
            }
        }
    }

    /// Coefficientwise product with h(ξ). The field is auto-converted to the
    /// Fourier representation. A singular (non-finite) value of h at an
    /// occupied mode is an error unless the policy says annihilate.
    pub fn apply_multiplier(
        &self,
        mut h: impl FnMut([f64; 2]) -> Complex64,
        policy: ZeroModePolicy,
    ) -> Result<ComplexField2D> {
        let mut f = self.clone().into_fourier();
        let n = f.grid.n;
        let tol = 1e-300;
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let hv = h(f.grid.xi(i, j));
                if hv.re.is_finite() && hv.im.is_finite() {
                    f.data[idx] *= hv;
                } else {
                    match policy {
                        ZeroModePolicy::Annihilate => f.data[idx] = Complex64::default(),
                        ZeroModePolicy::Error => {
                            if f.data[idx].norm() > tol {
                                return Err(CoreError::SingularMultiplier(format!(
                                    "mode ({}, {})",
                                    f.grid.mode(i),
                                    f.grid.mode(j)
                                )));
                            }
                            f.data[idx] = Complex64::default();
                        }
                    }
                }
            }
        }
        Ok(f)
    }

    /// Sharp characteristic cutoff on a frequency set.
    pub fn restrict(&self, mut keep: impl FnMut([f64; 2]) -> bool) -> ComplexField2D {
        let mut f = self.clone().into_fourier();
        let n = f.grid.n;
        for i in 0..n {
            for j in 0..n {
                if !keep(f.grid.xi(i, j)) {
                    f.data[i * n + j] = Complex64::default();
                }
            }
        }
        f
    }

    /// Littlewood-Paley shell projection onto [N, 2N).
    pub fn lp_project(&self, shell: Dyadic, mode: ShellMode) -> ComplexField2D {
        let nv = shell.value();
        self.restrict(|xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            match mode {
                ShellMode::Homogeneous => r > 0.0 && nv <= r && r < 2.0 * nv,
                ShellMode::Inhomogeneous => {
                    let w = (1.0 + r * r).sqrt();
                    if nv <= 1.0 {
                        w < 2.0
                    } else {
                        nv <= w && w < 2.0 * nv
                    }
                }
            }
        })
    }

    /// Angular sector projection onto {±ξ ∈ Γ_γ(ω)} (ξ = 0 excluded).
    pub fn sector_project(&self, sector: Sector, sign: Sign) -> ComplexField2D {
        let s = sign.factor();
        self.restrict(|xi| {
            let v = [s * xi[0], s * xi[1]];
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if r == 0.0 {
                return false;
            }
            angle_between(v, sector.omega) <= sector.gamma
        })
    }

    /// Multiplier −1/|ξ|² off the zero mode.
    pub fn inv_laplacian(&self, policy: ZeroModePolicy) -> Result<ComplexField2D> {
        if policy == ZeroModePolicy::Error {
            let f = self.clone().into_fourier();
            let zero = f.data[0].norm() * f.measure_weight().sqrt();
            let total = f.norm();
            if zero > 1e-12 * total.max(1e-300) {
                return Err(CoreError::Constraint(format!(
                    "inverse Laplacian of a field with nonzero mean (|mean mode| = {zero:.3e})"
                )));
            }
        }
        self.apply_multiplier(
            |xi| {
                let r2 = xi[0] * xi[0] + xi[1] * xi[1];
                if r2 == 0.0 {
                    Complex64::new(f64::NAN, 0.0)
                } else {
                    Complex64::new(-1.0 / r2, 0.0)
                }
            },
            ZeroModePolicy::Annihilate,
        )
    }

    /// Zero all modes outside the dealias band.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        debug_assert!(self.rep == Representation::Fourier);
        let n = grid.n;
        for i in 0..n {
            for j in 0..n {
                if !grid.keep_mode(i, j) {
                    self.data[i * n + j] = Complex64::default();
                }
            }
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &ComplexField2D, c: Complex64) {
        debug_assert_eq!(self.rep, other.rep);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
    }

    /// ⟨f, g⟩ with the representation's lattice measure.
    pub fn inner(&self, other: &ComplexField2D) -> Complex64 {
        debug_assert_eq!(self.rep, other.rep);
        let w = self.measure_weight();
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * w
    }

    pub fn sub(&self, other: &ComplexField2D) -> ComplexField2D {
        let mut out = self.clone();
        out.add_scaled(other, Complex64::new(-1.0, 0.0));
        out
    }

    /// Maximal pointwise modulus (representation as stored).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Drop imaginary parts (used to re-enforce reality of physical fields).
    pub fn take_real(&mut self) {
        debug_assert!(self.rep == Representation::Physical);
        for v in &mut self.data {
            *v = Complex64::new(v.re, 0.0);
        }
    }
}

/// Angle θ(a, b) ∈ [0, π] between nonzero plane vectors, via atan2 of
/// cross/dot for stability near 0 and π.
pub fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.abs().atan2(dot)
}

/// An angular sector Γ_γ(ω) = {ξ ≠ 0 : θ(ξ, ω) ≤ γ}.
#[derive(Debug, Clone, Copy)]
pub struct Sector {
    pub gamma: f64,
    pub omega: [f64; 2],
}

impl Sector {
    pub fn new(gamma: f64, omega: [f64; 2]) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= std::f64::consts::PI) {
            return Err(CoreError::Parameter("sector angle must lie in (0, π]".into()));
        }
        let r = (omega[0] * omega[0] + omega[1] * omega[1]).sqrt();
        if r == 0.0 {
            return Err(CoreError::UndefinedDirection("sector axis".into()));
        }
        Ok(Sector { gamma, omega: [omega[0] / r, omega[1] / r] })
    }
}

/// Deterministic maximal γ-separated family on the circle:
/// ω_k = (cos kγ', sin kγ') with γ' = 2π/⌈2π/γ⌉ ≤ γ.
pub fn omega_family(gamma: f64) -> Vec<[f64; 2]> {
    assert!(gamma > 0.0 && gamma <= std::f64::consts::PI);
    let m = (2.0 * std::f64::consts::PI / gamma).ceil() as usize;
    (0..m)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            [a.cos(), a.sin()]
        })
        .collect()
}

/// The angular step γ' of [`omega_family`].
pub fn omega_family_step(gamma: f64) -> f64 {
    let m = (2.0 * std::f64::consts::PI / gamma).ceil() as usize;
    2.0 * std::f64::consts::PI / m as f64
}

/// Two-component field (vectors in the plane).
pub type VectorField2D = [ComplexField2D; 2];

/// Fourier-side projection onto the divergence-free part,
/// v̂ ↦ v̂ − ξ(ξ·v̂)/|ξ|²; the zero mode passes through unchanged.
pub fn div_free_project(v: &VectorField2D) -> Result<VectorField2D> {
    v[0].grid.same_lattice(&v[1].grid)?;
    let mut a = v[0].clone().into_fourier();
    let mut b = v[1].clone().into_fourier();
    let grid = a.grid;
    let n = grid.n;
    for i in 0..n {
        for j in 0..n {
            let idx = i * n + j;
            let xi = grid.xi(i, j);
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            if r2 == 0.0 {
                continue;
            }
            let dot = (xi[0] * a.data[idx] + xi[1] * b.data[idx]) / r2;
            a.data[idx] -= dot * xi[0];
            b.data[idx] -= dot * xi[1];
        }
    }
    Ok([a, b])
}

/// Spectral divergence ∂₁v¹ + ∂₂v² (returned in Fourier representation).
pub fn divergence(v: &VectorField2D) -> Result<ComplexField2D> {
    let a = v[0].apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error)?;
    let b = v[1].apply_multiplier(|xi| Complex64::new(0.0, xi[1]), ZeroModePolicy::Error)?;
    let mut out = a;
    out.add_scaled(&b, Complex64::new(1.0, 0.0));
    Ok(out)
}

/// Spectral scalar curl (∇×v)³ = ∂₁v² − ∂₂v¹ (Fourier representation).
pub fn curl_z(v: &VectorField2D) -> Result<ComplexField2D> {
    let a = v[1].apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error)?;
    let b = v[0].apply_multiplier(|xi| Complex64::new(0.0, xi[1]), ZeroModePolicy::Error)?;
    let mut out = a;
    out.add_scaled(&b, Complex64::new(-1.0, 0.0));
    Ok(out)
}

/// Spectral gradient of a scalar (Fourier representation).
pub fn gradient(f: &ComplexField2D) -> Result<VectorField2D> {
    let a = f.apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error)?;
    let b = f.apply_multiplier(|xi| Complex64::new(0.0, xi[1]), ZeroModePolicy::Error)?;
    Ok([a, b])
}

/// Two-component spinor field.
#[derive(Debug, Clone)]
pub struct SpinorField2D {
    pub up: ComplexField2D,
    pub dn: ComplexField2D,
}

impl SpinorField2D {
    pub fn zeros(grid: Grid2D, rep: Representation) -> Self {
        SpinorField2D {
            up: ComplexField2D::zeros(grid, rep),
            dn: ComplexField2D::zeros(grid, rep),
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.up.grid
    }

    pub fn norm_sq(&self) -> f64 {
        self.up.norm_sq() + self.dn.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn into_fourier(self) -> SpinorField2D {
        SpinorField2D { up: self.up.into_fourier(), dn: self.dn.into_fourier() }
    }

    pub fn into_physical(self) -> SpinorField2D {
        SpinorField2D { up: self.up.into_physical(), dn: self.dn.into_physical() }
    }

    pub fn add_scaled(&mut self, other: &SpinorField2D, c: Complex64) {
        self.up.add_scaled(&other.up, c);
        self.dn.add_scaled(&other.dn, c);
    }

    pub fn sub(&self, other: &SpinorField2D) -> SpinorField2D {
        SpinorField2D { up: self.up.sub(&other.up), dn: self.dn.sub(&other.dn) }
    }

    pub fn dealias(&mut self) {
        self.up.dealias();
        self.dn.dealias();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn grid16() -> Grid2D {
        Grid2D::new(16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn random_field(grid: Grid2D, rng: &mut impl Rng) -> ComplexField2D {
        let mut f = ComplexField2D::zeros(grid, Representation::Physical);
        for v in &mut f.data {
            *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        f
    }

    #[test]
    fn constant_field_concentrates_at_zero() {
        let g = grid16();
        let f = ComplexField2D::from_fn_physical(g, |_| Complex64::new(1.0, 0.0));
        let fh = f.to_fourier().unwrap();
        let l2 = g.box_period * g.box_period;
        assert!((fh.data[0] - Complex64::new(l2, 0.0)).norm() < 1e-9);
        let off: f64 = fh.data[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(off < 1e-10);
        // Parseval: ‖1‖ = L.
        assert!((fh.norm() - g.box_period).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_single_coefficient() {
        let g = grid16();
        let f = ComplexField2D::from_fn_physical(g, |x| Complex64::new(0.0, x[0]).exp());
        let fh = f.to_fourier().unwrap();
        let n = g.n;
        for i in 0..n {
            for j in 0..n {
                let v = fh.data[i * n + j].norm();
                if g.mode(i) == 1 && g.mode(j) == 0 {
                    assert!(v > 1.0);
                } else {
                    assert!(v <= 1e-12 * g.box_period * g.box_period, "leak at ({i},{j}): {v}");
                }
            }
        }
    }

    #[test]
    fn parseval_roundtrip_random() {
        let mut rng = crate::rng::trial_rng(1, "field-test", 0);
        let f = random_field(grid16(), &mut rng);
        // Independent direct summation on both sides.
        let phys: f64 = f.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * f.measure_weight();
        let fh = f.to_fourier().unwrap();
        let four: f64 = fh.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * fh.measure_weight();
        assert!((phys - four).abs() <= 1e-12 * phys);
        let back = fh.to_physical().unwrap();
        let err: f64 = back
            .data
            .iter()
            .zip(f.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn representation_tag_enforced() {
        let g = grid16();
        let f = ComplexField2D::zeros(g, Representation::Fourier);
        assert!(f.to_fourier().is_err());
        assert!(f.to_physical().is_ok());
    }

    #[test]
    fn multiplier_identity_and_composition() {
        let mut rng = crate::rng::trial_rng(2, "field-test", 1);
        let f = random_field(grid16(), &mut rng).into_fourier();
        let id = f
            .apply_multiplier(|_| Complex64::new(1.0, 0.0), ZeroModePolicy::Error)
            .unwrap();
        assert!(id.sub(&f).norm() < 1e-14);
        // ⟨D⟩^{1/2} then ⟨D⟩^{-1/2} is the identity.
        let half = f
            .apply_multiplier(
                |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt().sqrt(), 0.0),
                ZeroModePolicy::Error,
            )
            .unwrap();
        let back = half
            .apply_multiplier(
                |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt().sqrt().recip(), 0.0),
                ZeroModePolicy::Error,
            )
            .unwrap();
        assert!(back.sub(&f).norm() <= 1e-12 * f.norm());
    }

    #[test]
    fn multiplier_scales_plane_wave_by_japanese_bracket() {
        let g = grid16();
        let f = ComplexField2D::from_fn_physical(g, |x| Complex64::new(0.0, 2.0 * x[1]).exp());
        let out = f
            .apply_multiplier(
                |xi| Complex64::new((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).sqrt(), 0.0),
                ZeroModePolicy::Error,
            )
            .unwrap()
            .into_physical();
        let expect = (1.0 + 4.0f64).sqrt();
        for (a, b) in out.data.iter().zip(f.data.iter()) {
            assert!((a - b * expect).norm() < 1e-10);
        }
    }

    #[test]
    fn lp_shells_partition() {
        let mut rng = crate::rng::trial_rng(3, "field-test", 2);
        let f = random_field(grid16(), &mut rng).into_fourier();
        let ladder = crate::grid::dyadic_ladder(f.grid.dxi() * 0.99, f.grid.xi_max());
        let mut sum = ComplexField2D::zeros(f.grid, Representation::Fourier);
        let mut total_sq = 0.0;
        for shell in &ladder {
            let p = f.lp_project(*shell, ShellMode::Homogeneous);
            total_sq += p.norm_sq();
            sum.add_scaled(&p, Complex64::new(1.0, 0.0));
        }
        // Reconstructs f minus its mean.
        let mut centered = f.clone();
        centered.data[0] = Complex64::default();
        assert!(sum.sub(&centered).norm() < 1e-12);
        assert!((total_sq - centered.norm_sq()).abs() <= 1e-12 * centered.norm_sq());
        // A plane wave at |ξ| = 3 lands in exactly one shell.
        let g = f.grid;
        let pw = ComplexField2D::from_fn_physical(g, |x| Complex64::new(0.0, 3.0 * x[0]).exp());
        let pwh = pw.to_fourier().unwrap();
        let mut hits = 0;
        for shell in &ladder {
            if pwh.lp_project(*shell, ShellMode::Homogeneous).norm() > 1e-9 {
                hits += 1;
            }
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn sector_identity_at_pi_and_plane_wave() {
        let mut rng = crate::rng::trial_rng(4, "field-test", 3);
        let f = random_field(grid16(), &mut rng).into_fourier();
        let full = f.sector_project(Sector::new(std::f64::consts::PI, [1.0, 0.0]).unwrap(), Sign::Plus);
        let mut centered = f.clone();
        centered.data[0] = Complex64::default();
        assert!(full.sub(&centered).norm() < 1e-12);

        let g = f.grid;
        let pw = ComplexField2D::from_fn_physical(g, |x| Complex64::new(0.0, 3.0 * x[0]).exp())
            .to_fourier()
            .unwrap();
        let sec = Sector::new(std::f64::consts::PI / 8.0, [1.0, 0.0]).unwrap();
        let kept = pw.sector_project(sec, Sign::Plus);
        assert!(kept.sub(&pw).norm() < 1e-12);
    }

    #[test]
    fn sector_family_almost_orthogonal() {
        let mut rng = crate::rng::trial_rng(5, "field-test", 4);
        let f = random_field(grid16(), &mut rng).into_fourier();
        let gamma = std::f64::consts::PI / 16.0;
        let mut sum_sq = 0.0;
        for omega in omega_family(gamma) {
            let p = f.sector_project(Sector::new(gamma, omega).unwrap(), Sign::Plus);
            sum_sq += p.norm_sq();
        }
        let mut centered = f.clone();
        centered.data[0] = Complex64::default();
        let ratio = sum_sq / centered.norm_sq();
        assert!(ratio >= 1.0 - 1e-12 && ratio <= 3.0 + 1e-9, "ratio = {ratio}");
    }

    #[test]
    fn div_free_projection_properties() {
        let mut rng = crate::rng::trial_rng(6, "field-test", 5);
        let g = grid16();
        // A gradient field projects to (almost) zero.
        let phi = random_field(g, &mut rng).into_fourier();
        let grad = gradient(&phi).unwrap();
        let pg = div_free_project(&grad).unwrap();
        let from = (grad[0].norm_sq() + grad[1].norm_sq()).sqrt();
        assert!((pg[0].norm_sq() + pg[1].norm_sq()).sqrt() < 1e-12 * from.max(1.0));
        // A curl field is fixed.
        let curl = [
            phi.apply_multiplier(|xi| Complex64::new(0.0, -xi[1]), ZeroModePolicy::Error).unwrap(),
            phi.apply_multiplier(|xi| Complex64::new(0.0, xi[0]), ZeroModePolicy::Error).unwrap(),
        ];
        let pc = div_free_project(&curl).unwrap();
        assert!(pc[0].sub(&curl[0]).norm() + pc[1].sub(&curl[1]).norm() < 1e-12 * from.max(1.0));
        // Idempotent on a random field, and output is divergence-free.
        let v = [random_field(g, &mut rng).into_fourier(), random_field(g, &mut rng).into_fourier()];
        let p1 = div_free_project(&v).unwrap();
        let p2 = div_free_project(&p1).unwrap();
        assert!(p2[0].sub(&p1[0]).norm() + p2[1].sub(&p1[1]).norm() < 1e-12);
        let d = divergence(&p1).unwrap();
        assert!(d.norm() < 1e-12 * (v[0].norm() + v[1].norm()));
    }

    #[test]
    fn inv_laplacian_contract() {
        let g = grid16();
        // Plane wave ξ₀ scales by −1/|ξ₀|².
        let pw = ComplexField2D::from_fn_physical(g, |x| Complex64::new(0.0, 2.0 * x[0]).exp())
            .to_fourier()
            .unwrap();
        let out = pw.inv_laplacian(ZeroModePolicy::Error).unwrap().into_physical();
        let pwp = pw.to_physical().unwrap();
        for (a, b) in out.data.iter().zip(pwp.data.iter()) {
            assert!((a - b * (-0.25)).norm() < 1e-12);
        }
        // Δ(Δ⁻¹ f) = f − mean(f) for mean-zero f.
        let mut rng = crate::rng::trial_rng(7, "field-test", 6);
        let mut f = random_field(g, &mut rng).into_fourier();
        f.data[0] = Complex64::default();
        let inv = f.inv_laplacian(ZeroModePolicy::Error).unwrap();
        let lap = inv
            .apply_multiplier(|xi| Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0), ZeroModePolicy::Error)
            .unwrap();
        assert!(lap.sub(&f).norm() <= 1e-10 * f.norm());
        // Constant input with policy = Error fails.
        let c = ComplexField2D::from_fn_physical(g, |_| Complex64::new(1.0, 0.0)).to_fourier().unwrap();
        assert!(c.inv_laplacian(ZeroModePolicy::Error).is_err());
    }

    #[test]
    fn angle_special_values() {
        assert!(angle_between([1.0, 0.0], [1.0, 0.0]).abs() < 1e-15);
        assert!((angle_between([1.0, 0.0], [0.0, 1.0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((angle_between([1.0, 0.0], [-1.0, 0.0]) - std::f64::consts::PI).abs() < 1e-15);
    }
}

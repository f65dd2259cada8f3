//! Two-flavor NJL quark matter: the 48×48 inverse propagator
//!
//! ```text
//! S = [ k̸ + μγ⁰ − M          Δ γ₅ τ₂ λ₂   ]
//!     [ −Δ* γ₅ τ₂ λ₂      k̸ − μγ⁰ − M   ]      k̸ = Eγ⁰ − γ·k
//! ```
//!
//! partitioned into 6×6 blocks of size 8 by writing out the color index. Inside
//! a block the index order is Dirac ⊗ flavor (Dirac-major). The only nonzero
//! blocks are
//!
//! ```text
//! S11 = S22 = S33 = k̸ + μγ⁰ − M
//! S44 = S55 = S66 = k̸ − μγ⁰ − M
//! S24 = −S15 = iΔ γ₅τ₂
//! S42 = −S51 = iΔ* γ₅τ₂
//! ```
//!
//! The determinant factors into
//!
//! ```text
//! [E ± √((E_k+μ)² + |Δ|²)]⁸ [E ± √((E_k−μ)² + |Δ|²)]⁸ (E ± (E_k+μ))⁴ (E ± (E_k−μ))⁴
//! ```
//!
//! with `E_k = √(k² + M²)`, so the quasiparticle energies are `|E_k ± μ|` and
//! `√((E_k ± μ)² + |Δ|²)`.

use std::fmt;

use crate::block::{flatten, BlockMatrix};
use crate::dense::{DenseMatrix, C64, ONE, ZERO};
use crate::engine::{alpha_recursion, report_from_tables, AlphaTable};
use crate::error::{BlockDetError, Result};
use crate::lu::{invert, lu_decompose};
use crate::scaled::ScaledDet;
use crate::tolerance::Tolerances;

const I: C64 = C64::new(0.0, 1.0);

/// Block count and block size of the partition.
pub const NJL_BLOCKS: usize = 6;
pub const NJL_BLOCK_SIZE: usize = 8;

/// Acceptance thresholds for [`verify_njl`].
pub const CLOSED_FORM_REL_TOL: f64 = 1e-7;
pub const ROOT_PROBE_OFFSET: f64 = 1e-2;
pub const ROOT_SUPPRESSION: f64 = 1e-6;
pub const ALPHA_REL_TOL: f64 = 1e-9;
pub const S55_INVERSE_TOL: f64 = 1e-10;

/// Model parameters in energy units (`c = ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NjlParams {
    pub mass: f64,
    pub chemical_potential: f64,
    pub gap: C64,
    pub momentum: [f64; 3],
    pub probe_energy: C64,
}

impl Default for NjlParams {
    /// Desk-scale values (GeV-like), chosen for testing only.
    fn default() -> Self {
        Self {
            mass: 0.35,
            chemical_potential: 0.4,
            gap: C64::new(0.1, 0.0),
            momentum: [0.1, 0.2, 0.3],
            probe_energy: C64::new(0.77, 0.13),
        }
    }
}

impl NjlParams {
    /// `E_k = √(k·k + M²)`.
    pub fn energy_k(&self) -> f64 {
        let k2: f64 = self.momentum.iter().map(|x| x * x).sum();
        (k2 + self.mass * self.mass).sqrt()
    }

    /// `|Δ|² = Δ Δ*`.
    pub fn gap_sq(&self) -> f64 {
        self.gap.norm_sqr()
    }

    pub fn with_probe_energy(mut self, energy: C64) -> Self {
        self.probe_energy = energy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.mass.is_finite()
            && self.chemical_potential.is_finite()
            && self.gap.re.is_finite()
            && self.gap.im.is_finite()
            && self.momentum.iter().all(|x| x.is_finite())
            && self.probe_energy.re.is_finite()
            && self.probe_energy.im.is_finite();
        if finite {
            Ok(())
        } else {
            Err(BlockDetError::Parse("NJL parameters must be finite".into()))
        }
    }
}

/// Dirac matrices in the Dirac representation plus the Pauli, Gell-Mann and
/// flavor matrices the model needs.
#[derive(Debug, Clone)]
pub struct GammaBasis {
    /// `γ⁰ … γ³`.
    pub gamma: [DenseMatrix; 4],
    pub gamma5: DenseMatrix,
    /// `σx, σy, σz`.
    pub pauli: [DenseMatrix; 3],
    pub lambda2: DenseMatrix,
    pub tau2: DenseMatrix,
}

fn mat(rows: usize, cols: usize, entries: &[C64]) -> DenseMatrix {
    DenseMatrix::new(rows, cols, entries.to_vec()).expect("fixed-size literal")
}

pub fn build_gamma_basis() -> GammaBasis {
    let sx = mat(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let sy = mat(2, 2, &[ZERO, -I, I, ZERO]);
    let sz = mat(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let i2 = DenseMatrix::identity(2);
    let z2 = DenseMatrix::zeros(2, 2);

    let blocks = |a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix, d: &DenseMatrix| {
        crate::block::assemble_2x2(a, b, c, d).expect("2x2 blocks")
    };
    let g0 = blocks(&i2, &z2, &z2, &i2.neg());
    let spatial = |s: &DenseMatrix| blocks(&z2, s, &s.neg(), &z2);
    let (g1, g2, g3) = (spatial(&sx), spatial(&sy), spatial(&sz));

    let gamma5 = g0
        .matmul(&g1)
        .and_then(|m| m.matmul(&g2))
        .and_then(|m| m.matmul(&g3))
        .expect("4x4")
        .scalar_mul(I);

    let lambda2 = mat(3, 3, &[ZERO, -I, ZERO, I, ZERO, ZERO, ZERO, ZERO, ZERO]);

    GammaBasis {
        gamma: [g0, g1, g2, g3],
        gamma5,
        pauli: [sx, sy.clone(), sz],
        lambda2,
        tau2: sy,
    }
}

impl GammaBasis {
    /// `k̸ = Eγ⁰ − γ·k`.
    pub fn slash(&self, energy: C64, k: [f64; 3]) -> DenseMatrix {
        let mut m = self.gamma[0].scalar_mul(energy);
        for (g, &kc) in self.gamma[1..].iter().zip(&k) {
            m = m.matsub(&g.scalar_mul(C64::new(kc, 0.0))).expect("4x4");
        }
        m
    }

    /// `σ·k`.
    pub fn sigma_dot(&self, k: [f64; 3]) -> DenseMatrix {
        self.pauli
            .iter()
            .zip(&k)
            .map(|(s, &kc)| s.scalar_mul(C64::new(kc, 0.0)))
            .reduce(|a, b| a.matadd(&b).expect("2x2"))
            .expect("three components")
    }
}

/// `k̸ + sign·μγ⁰ + mass_sign·M` on Dirac indices only (4×4).
fn dirac_combination(g: &GammaBasis, p: &NjlParams, mu_sign: f64, mass_sign: f64) -> DenseMatrix {
    let mu = g.gamma[0].scalar_mul(C64::new(mu_sign * p.chemical_potential, 0.0));
    let mass = DenseMatrix::identity(4).scalar_mul(C64::new(mass_sign * p.mass, 0.0));
    g.slash(p.probe_energy, p.momentum)
        .matadd(&mu)
        .and_then(|m| m.matadd(&mass))
        .expect("4x4")
}

/// `k̸ ± μγ⁰ − M` (4×4); `sign` selects `±`.
pub fn dirac_operator(p: &NjlParams, sign: f64) -> DenseMatrix {
    dirac_combination(&build_gamma_basis(), p, sign, -1.0)
}

/// `[(E ± μ)² − E_k²]²`, the determinant of [`dirac_operator`].
pub fn dirac_operator_det(p: &NjlParams, sign: f64) -> C64 {
    let shifted = p.probe_energy + sign * p.chemical_potential;
    let ek = p.energy_k();
    let f = shifted * shifted - ek * ek;
    f * f
}

/// `(E − μ)² − E_k²`.
fn minus_denominator(p: &NjlParams) -> C64 {
    let shifted = p.probe_energy - p.chemical_potential;
    let ek = p.energy_k();
    shifted * shifted - ek * ek
}

/// The Dirac part of the fully reduced block,
/// `k̸ + μγ⁰ − M − |Δ|² (k̸ − μγ⁰ − M) / ((E − μ)² − E_k²)` (4×4).
pub fn reduced_dirac_block(p: &NjlParams) -> DenseMatrix {
    let g = build_gamma_basis();
    let plus = dirac_combination(&g, p, 1.0, -1.0);
    let minus = dirac_combination(&g, p, -1.0, -1.0);
    let scale = C64::new(p.gap_sq(), 0.0) / minus_denominator(p);
    plus.matsub(&minus.scalar_mul(scale)).expect("4x4")
}

/// Rational closed form of `det` [`reduced_dirac_block`]:
///
/// ```text
/// [E² − (E_k+μ)² − |Δ|²]² [E² − (E_k−μ)² − |Δ|²]² / ((E − E_k − μ)² (E + E_k − μ)²)
/// ```
pub fn reduced_dirac_det(p: &NjlParams) -> C64 {
    let e = p.probe_energy;
    let ek = p.energy_k();
    let mu = p.chemical_potential;
    let d2 = p.gap_sq();
    let a = e * e - (ek + mu).powi(2) - d2;
    let b = e * e - (ek - mu).powi(2) - d2;
    let c = (e - ek - mu) * (e + ek - mu);
    (a * a * b * b) / (c * c)
}

/// Closed form of `S_55⁻¹ = (k̸ − μγ⁰ + M) / ((E − μ)² − E_k²)`, on Dirac ⊗ flavor.
pub fn s55_inverse_closed_form(p: &NjlParams) -> DenseMatrix {
    let g = build_gamma_basis();
    dirac_combination(&g, p, -1.0, 1.0)
        .scalar_mul(ONE / minus_denominator(p))
        .kron(&DenseMatrix::identity(2))
}

/// The 6×6-of-8×8 block form listed in the module docs.
pub fn build_njl_matrix(p: &NjlParams) -> BlockMatrix {
    let g = build_gamma_basis();
    let flavor = DenseMatrix::identity(2);
    let plus = dirac_combination(&g, p, 1.0, -1.0).kron(&flavor);
    let minus = dirac_combination(&g, p, -1.0, -1.0).kron(&flavor);
    let pairing = g.gamma5.kron(&g.tau2);
    let s24 = pairing.scalar_mul(I * p.gap);
    let s42 = pairing.scalar_mul(I * p.gap.conj());

    BlockMatrix::from_fn(NJL_BLOCKS, NJL_BLOCK_SIZE, |i, j| match (i, j) {
        (1, 1) | (2, 2) | (3, 3) => plus.clone(),
        (4, 4) | (5, 5) | (6, 6) => minus.clone(),
        (2, 4) => s24.clone(),
        (1, 5) => s24.neg(),
        (4, 2) => s42.clone(),
        (5, 1) => s42.neg(),
        _ => DenseMatrix::zeros(NJL_BLOCK_SIZE, NJL_BLOCK_SIZE),
    })
    .expect("uniform 8x8 blocks")
}

/// The factored degree-48 polynomial in `E`, evaluated in scaled arithmetic.
pub fn closed_form_det(p: &NjlParams) -> ScaledDet {
    let e = p.probe_energy;
    let ek = p.energy_k();
    let mu = p.chemical_potential;
    let d2 = p.gap_sq();
    let gapped_plus = ((ek + mu).powi(2) + d2).sqrt();
    let gapped_minus = ((ek - mu).powi(2) + d2).sqrt();

    let factor = |z: C64, power: u32| ScaledDet::from_complex(z).powi(power);
    [
        factor(e + gapped_plus, 8),
        factor(e + gapped_minus, 8),
        factor(e - gapped_plus, 8),
        factor(e - gapped_minus, 8),
        factor(e + ek + mu, 4),
        factor(e - ek - mu, 4),
        factor(e + ek - mu, 4),
        factor(e - ek + mu, 4),
    ]
    .into_iter()
    .product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEnergy {
    pub value: f64,
    pub multiplicity: u32,
}

/// `E₁ = |E_k + μ|` (8), `E₂ = |E_k − μ|` (8), `E₃ = √((E_k+μ)² + |Δ|²)` (16),
/// `E₄ = √((E_k−μ)² + |Δ|²)` (16).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEnergySpectrum {
    pub levels: [EigenEnergy; 4],
}

impl EigenEnergySpectrum {
    pub fn total_multiplicity(&self) -> u32 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }
}

/// The probe energy in `p` is ignored.
pub fn eigen_energies(p: &NjlParams) -> EigenEnergySpectrum {
    let ek = p.energy_k();
    let mu = p.chemical_potential;
    let d2 = p.gap_sq();
    let level = |value, multiplicity| EigenEnergy {
        value,
        multiplicity,
    };
    EigenEnergySpectrum {
        levels: [
            level((ek + mu).abs(), 8),
            level((ek - mu).abs(), 8),
            level(((ek + mu).powi(2) + d2).sqrt(), 16),
            level(((ek - mu).powi(2) + d2).sqrt(), 16),
        ],
    }
}

/// Determinant at one probe energy: block engine first, dense LU of the
/// flattened matrix when a pivot block is singular (as it is at most roots).
/// The LU value is the raw pivot product, so a root shows up as a tiny
/// magnitude rather than a thresholded zero.
#[derive(Debug, Clone, Copy)]
pub struct ProbedDet {
    pub value: ScaledDet,
    pub used_dense_fallback: bool,
}

pub fn probe_det(p: &NjlParams) -> Result<ProbedDet> {
    let bm = build_njl_matrix(p);
    match crate::engine::block_det(&bm) {
        Ok(report) => Ok(ProbedDet {
            value: report.value,
            used_dense_fallback: false,
        }),
        Err(BlockDetError::SingularPivotBlock { .. }) => Ok(ProbedDet {
            value: lu_decompose(&flatten(&bm))?.pivot_product(),
            used_dense_fallback: true,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RootCheck {
    pub energy: EigenEnergy,
    pub at_root: ProbedDet,
    pub at_offset: ProbedDet,
    /// `|det(E*)| / |det(E* + offset)|`.
    pub suppression: f64,
    pub passed: bool,
}

/// A named numeric comparison with its threshold.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub error: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.threshold
    }
}

#[derive(Debug, Clone)]
pub struct NjlReport {
    pub params: NjlParams,
    pub spectrum: EigenEnergySpectrum,
    pub block_det: Option<ScaledDet>,
    pub closed_form_det: ScaledDet,
    /// Comparisons of block-engine quantities with their closed forms.
    pub checks: Vec<Check>,
    pub roots: Vec<RootCheck>,
    /// Errors raised by the block engine at the probe energy, if any.
    pub engine_error: Option<BlockDetError>,
}

impl NjlReport {
    pub fn passed(&self) -> bool {
        self.engine_error.is_none()
            && self.spectrum.total_multiplicity() == 48
            && self.checks.iter().all(Check::passed)
            && self.roots.iter().all(|r| r.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn relative_max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        a.max_abs_diff(b) / scale
    }
}

fn check_root(p: &NjlParams, energy: EigenEnergy) -> Result<RootCheck> {
    let at_root = probe_det(&p.with_probe_energy(C64::new(energy.value, 0.0)))?;
    let at_offset =
        probe_det(&p.with_probe_energy(C64::new(energy.value + ROOT_PROBE_OFFSET, 0.0)))?;
    let suppression = if at_offset.value.is_zero() {
        f64::INFINITY
    } else {
        10f64.powf(at_root.value.log10_abs() - at_offset.value.log10_abs())
    };
    Ok(RootCheck {
        energy,
        at_root,
        at_offset,
        suppression,
        passed: suppression <= ROOT_SUPPRESSION,
    })
}

/// Runs every closed-form comparison at `p` and collects the outcome. Failures
/// are recorded in the report; only invalid parameters produce an `Err`.
pub fn verify_njl(p: &NjlParams) -> Result<NjlReport> {
    p.validate()?;
    let spectrum = eigen_energies(p);
    let closed = closed_form_det(p);
    let bm = build_njl_matrix(p);
    let mut checks = Vec::new();
    let mut block_value = None;
    let mut engine_error = None;

    match alpha_recursion(&bm) {
        Ok(tables) => {
            let report = report_from_tables(&tables, &Tolerances::default())?;
            block_value = Some(report.value);
            checks.push(Check {
                name: "block_det vs closed form",
                error: report.value.relative_difference(&closed),
                threshold: CLOSED_FORM_REL_TOL,
            });
            checks.extend(alpha_checks(p, &tables));
        }
        Err(e) => engine_error = Some(e),
    }

    match invert(bm.block(5, 5)) {
        Ok(inv) => checks.push(Check {
            name: "S55 inverse vs closed form",
            error: inv.max_abs_diff(&s55_inverse_closed_form(p)),
            threshold: S55_INVERSE_TOL,
        }),
        Err(e) => engine_error = engine_error.or(Some(e)),
    }

    let roots = spectrum
        .levels
        .iter()
        .map(|&level| check_root(p, level))
        .collect::<Result<Vec<_>>>()?;

    Ok(NjlReport {
        params: *p,
        spectrum,
        block_det: block_value,
        closed_form_det: closed,
        checks,
        roots,
        engine_error,
    })
}

fn alpha_checks(p: &NjlParams, tables: &[AlphaTable]) -> Vec<Check> {
    let reduced = reduced_dirac_block(p).kron(&DenseMatrix::identity(2));
    vec![
        Check {
            name: "alpha(2)_11 vs reduced closed form",
            error: relative_max_diff(tables[2].block(1, 1), &reduced),
            threshold: ALPHA_REL_TOL,
        },
        Check {
            name: "alpha(3)_22 vs alpha(2)_11",
            error: relative_max_diff(tables[3].block(2, 2), tables[2].block(1, 1)),
            threshold: ALPHA_REL_TOL,
        },
        Check {
            name: "alpha(5)_11 vs alpha(3)_11",
            error: relative_max_diff(tables[5].block(1, 1), tables[3].block(1, 1)),
            threshold: ALPHA_REL_TOL,
        },
    ]
}

impl fmt::Display for NjlReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "parameters: M = {}, mu = {}, Delta = {}{:+}i, k = ({}, {}, {}), E = {}{:+}i",
            p.mass,
            p.chemical_potential,
            p.gap.re,
            p.gap.im,
            p.momentum[0],
            p.momentum[1],
            p.momentum[2],
            p.probe_energy.re,
            p.probe_energy.im
        )?;
        writeln!(f, "E_k = {:.12}", p.energy_k())?;
        writeln!(f, "eigenenergies:")?;
        for (idx, level) in self.spectrum.levels.iter().enumerate() {
            writeln!(
                f,
                "  E{} = {:.12}  (multiplicity {})",
                idx + 1,
                level.value,
                level.multiplicity
            )?;
        }
        writeln!(
            f,
            "  total multiplicity = {}",
            self.spectrum.total_multiplicity()
        )?;
        writeln!(f, "closed-form det = {}", self.closed_form_det)?;
        match (&self.block_det, &self.engine_error) {
            (Some(d), _) => writeln!(f, "block-engine det = {d}")?,
            (None, Some(e)) => writeln!(f, "block-engine det = unavailable ({e})")?,
            (None, None) => writeln!(f, "block-engine det = unavailable")?,
        }
        writeln!(f, "checks:")?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {:.3e} (threshold {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.error,
                c.threshold
            )?;
        }
        writeln!(
            f,
            "roots (offset {ROOT_PROBE_OFFSET:e}, required suppression {ROOT_SUPPRESSION:e}):"
        )?;
        for (idx, r) in self.roots.iter().enumerate() {
            writeln!(
                f,
                "  [{}] E{} = {:.12}: |det| = {:.3e} vs {:.3e} at offset, ratio {:.3e}{}",
                if r.passed { "PASS" } else { "FAIL" },
                idx + 1,
                r.energy.value,
                10f64.powf(r.at_root.value.log10_abs()),
                10f64.powf(r.at_offset.value.log10_abs()),
                r.suppression,
                if r.at_root.used_dense_fallback {
                    " (dense fallback)"
                } else {
                    ""
                }
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

//! Parameterized example Hamiltonians with their closed-form expectations.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as Z;

use crate::basis::{basis_from_vectors, compute_basis, ComputationalBasis, LadderPhases};
use crate::error::{Error, Result};
use crate::hamiltonian::{gamma_matrix, NhHamiltonian, PauliVector};
use crate::matrix::{pauli, CMatrix, CVector};
use crate::symmetry::EnergyClass;

/// Closed-form values for a model, in rescaled units unless noted.
#[derive(Clone, Debug, Default)]
pub struct ExpectedRecord {
    /// `{H₀, H₀†}/I` of the unscaled operand.
    pub d: f64,
    /// `f` of each pair. Follows the preferred basis labeling when the model
    /// has one, else `f ≥ ½`.
    pub pair_f: Vec<f64>,
    /// `|E|` of each pair.
    pub abs_e: Vec<f64>,
    /// Full rescaled spectrum, flat states included.
    pub energies: Vec<Z>,
    pub singlet_energies: Vec<Z>,
    /// Ladder phases on the canonical branch, in the model's reference gauge.
    pub phases: Option<(f64, f64)>,
    pub a_mag: Option<f64>,
    pub energy_class: Option<EnergyClass>,
    pub exceptional: bool,
    /// Eigenvalues of the physical matrix when the analyzed operand differs
    /// from it.
    pub assembled_spectrum: Option<Vec<Z>>,
}

/// Basis vectors in the model's reference gauge, written in the input coordinates.
#[derive(Clone, Debug, Default)]
pub struct PreferredBasis {
    pub pairs: Vec<(CVector<f64>, CVector<f64>)>,
    pub singlets: Vec<CVector<f64>>,
    /// `H` maps each `v_f` onto its own `v_cf`. Degenerate levels may be
    /// given in a gauge where `H` mixes pairs; such bases only feed the
    /// block decomposition.
    pub ladder: bool,
}

#[derive(Clone, Debug)]
pub struct ModelInstance {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// The physical matrix.
    pub matrix: CMatrix<f64>,
    /// The scalar-D operand the framework runs on, when it is not `matrix`.
    pub inner: Option<CMatrix<f64>>,
    pub expected: ExpectedRecord,
    pub preferred_basis: Option<PreferredBasis>,
}

impl ModelInstance {
    pub fn operand(&self) -> &CMatrix<f64> {
        self.inner.as_ref().unwrap_or(&self.matrix)
    }

    /// The preferred basis when it pairs up under `H`, else the computed one.
    pub fn basis(&self, h: &NhHamiltonian<f64>, ep_tol: f64) -> Result<ComputationalBasis<f64>> {
        match &self.preferred_basis {
            Some(pb) if pb.ladder => basis_from_vectors(h, &pb.pairs, &pb.singlets, ep_tol),
            _ => compute_basis(h),
        }
    }

    /// The preferred basis in any gauge, else the computed one.
    pub fn block_basis(
        &self,
        h: &NhHamiltonian<f64>,
        ep_tol: f64,
    ) -> Result<ComputationalBasis<f64>> {
        match &self.preferred_basis {
            Some(pb) => basis_from_vectors(h, &pb.pairs, &pb.singlets, ep_tol),
            None => compute_basis(h),
        }
    }
}

fn z(re: f64, im: f64) -> Z {
    Z::new(re, im)
}

fn zr(re: f64) -> Z {
    Z::new(re, 0.0)
}

fn mat2(a: Z, b: Z, c: Z, d: Z) -> CMatrix<f64> {
    CMatrix::from_rows(vec![vec![a, b], vec![c, d]]).expect("2×2 literal")
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `sgn` with `sgn(0) = +1`.
fn sgn(x: f64) -> f64 {
    if x < -1e-12 {
        -1.0
    } else {
        1.0
    }
}

fn class_of_square(e2: Z, tol: f64) -> EnergyClass {
    if e2.norm() <= tol {
        EnergyClass::Real
    } else if e2.im.abs() <= tol * e2.norm().max(1.0) {
        if e2.re > 0.0 {
            EnergyClass::Real
        } else {
            EnergyClass::Imaginary
        }
    } else {
        EnergyClass::Complex
    }
}

/// Record for a traceless 2×2 `h·σ`, rescaled by `d = 2|h|²`.
fn pauli_record(h: [Z; 3]) -> ExpectedRecord {
    let d = 2.0 * h.iter().map(|x| x.norm_sqr()).sum::<f64>();
    let hs: Vec<Z> = h.iter().map(|x| *x / d.sqrt()).collect();
    let comp = |n: usize, r: usize| -2.0 * (hs[n].conj() * hs[r]).im;
    let fv = [comp(1, 2), comp(2, 0), comp(0, 1)];
    let fm = fv.iter().map(|x| x * x).sum::<f64>().sqrt();
    let f = 0.5 + fm;
    let e2 = hs[0] * hs[0] + hs[1] * hs[1] + hs[2] * hs[2];
    let e = e2.sqrt();
    let abs_e = (f * (1.0 - f)).max(0.0).powf(0.25);
    let exceptional = (1.0 - f) <= 1e-9;
    ExpectedRecord {
        d,
        pair_f: vec![f],
        abs_e: vec![abs_e],
        energies: vec![e, -e],
        a_mag: (!exceptional).then(|| (f / (1.0 - f)).powf(0.25)),
        energy_class: (!exceptional).then(|| class_of_square(e2, 1e-12)),
        exceptional,
        ..Default::default()
    }
}

fn pauli_matrix(h: [Z; 3]) -> CMatrix<f64> {
    PauliVector { h }.matrix()
}

/// Two levels with gain and loss:
/// `[[−iγ₁, Ω_r − iΩ_i], [Ω_r + iΩ_i, Δ − iγ₂]]`.
pub fn gain_loss(
    delta: f64,
    gamma1: f64,
    gamma2: f64,
    omega_r: f64,
    omega_i: f64,
) -> ModelInstance {
    let matrix = mat2(
        z(0.0, -gamma1),
        z(omega_r, -omega_i),
        z(omega_r, omega_i),
        z(delta, -gamma2),
    );
    let dg = (gamma1 - gamma2) / 2.0;
    let expected = pauli_record([zr(omega_r), zr(omega_i), z(-delta / 2.0, -dg)]);
    ModelInstance {
        name: "gain_loss".into(),
        params: params(&[
            ("delta", delta),
            ("gamma1", gamma1),
            ("gamma2", gamma2),
            ("omega_r", omega_r),
            ("omega_i", omega_i),
        ]),
        matrix,
        inner: None,
        expected,
        preferred_basis: None,
    }
}

/// `|E|` of the gain/loss model at `Δ = 0` after rescaling, from `δγ` and `|Ω|`
/// in unscaled units.
pub fn gain_loss_abs_e(d_gamma: f64, omega: f64) -> f64 {
    let d = 2.0 * (omega * omega + d_gamma * d_gamma);
    let (g, o) = (d_gamma / d.sqrt(), omega / d.sqrt());
    (0.25 - 4.0 * g * g * o * o).max(0.0).powf(0.25)
}

fn nonreciprocal_from(
    name: &str,
    o1: Z,
    o2: Z,
    delta: f64,
    p: BTreeMap<String, f64>,
) -> ModelInstance {
    let matrix = mat2(zr(0.0), o1, o2, zr(delta));
    let h = [(o1 + o2) / 2.0, (o1 - o2) * z(0.0, 0.5), zr(-delta / 2.0)];
    ModelInstance {
        name: name.into(),
        params: p,
        matrix,
        inner: None,
        expected: pauli_record(h),
        preferred_basis: None,
    }
}

/// Non-reciprocal coupling `[[0, Ω₁], [Ω₂, Δ]]` with real hoppings.
pub fn nonreciprocal(omega1: f64, omega2: f64, delta: f64) -> ModelInstance {
    nonreciprocal_from(
        "nonreciprocal",
        zr(omega1),
        zr(omega2),
        delta,
        params(&[("omega1", omega1), ("omega2", omega2), ("delta", delta)]),
    )
}

/// Gain/loss parameters `(Ω_r, Ω_i, δγ)` equivalent to a real non-reciprocal
/// model under `e^{−iπσ_x/4}`.
pub fn nonreciprocal_as_gain_loss(omega1: f64, omega2: f64, delta: f64) -> (f64, f64, f64) {
    (
        (omega1 + omega2) / 2.0,
        delta / 2.0,
        (omega2 - omega1) / 2.0,
    )
}

/// Bloch Hamiltonian of the bipartite Hatano–Nelson chain:
/// `Ω₁ = t_R + t_L e^{−ik}`, `Ω₂ = t_L + t_R e^{ik}`.
pub fn hatano_nelson(t_r: f64, t_l: f64, k: f64, delta: f64) -> ModelInstance {
    let o1 = zr(t_r) + Z::from_polar(t_l, -k);
    let o2 = zr(t_l) + Z::from_polar(t_r, k);
    nonreciprocal_from(
        "hatano_nelson",
        o1,
        o2,
        delta,
        params(&[("t_r", t_r), ("t_l", t_l), ("k", k), ("delta", delta)]),
    )
}

/// Unscaled f-vector of the Hatano–Nelson point, `(−δtΔ(1−cos k), δtΔ sin k, 0)`.
pub fn hatano_nelson_f_vector(t_r: f64, t_l: f64, k: f64, delta: f64) -> [f64; 3] {
    let dt = (t_r - t_l) / 2.0;
    [-dt * delta * (1.0 - k.cos()), dt * delta * k.sin(), 0.0]
}

/// Canonical `(γ, φ)` of the α–β model in its reference basis.
pub fn alpha_beta_phases(alpha: f64) -> Option<(f64, f64)> {
    let r = alpha;
    let ep = |x: f64| (r - x).abs() <= 1e-12;
    if ep(FRAC_PI_4) || ep(3.0 * FRAC_PI_4) {
        None
    } else if r < FRAC_PI_4 {
        Some((FRAC_PI_2, 0.0))
    } else if r <= FRAC_PI_2 + 1e-12 {
        Some((0.0, FRAC_PI_2))
    } else if r < 3.0 * FRAC_PI_4 {
        Some((0.0, -FRAC_PI_2))
    } else {
        Some((FRAC_PI_2, PI))
    }
}

/// `h = (sin α cos β, sin α sin β, i cos α)/√2`, a unit-`d` two-level model
/// covering every energy class.
pub fn alpha_beta(alpha: f64, beta: f64) -> ModelInstance {
    let s = FRAC_1_SQRT_2;
    let h = [
        zr(s * alpha.sin() * beta.cos()),
        zr(s * alpha.sin() * beta.sin()),
        z(0.0, s * alpha.cos()),
    ];
    let nu = sgn((2.0 * alpha).sin());
    let v_f = vec![zr(s), Z::from_polar(nu * s, beta) * Z::i()];
    let v_cf = vec![zr(s), -Z::from_polar(nu * s, beta) * Z::i()];
    let mut expected = pauli_record(h);
    expected.phases = alpha_beta_phases(alpha);
    let c2a = (2.0 * alpha).cos();
    expected.energy_class = (!expected.exceptional).then_some({
        if c2a < 0.0 {
            EnergyClass::Real
        } else {
            EnergyClass::Imaginary
        }
    });
    ModelInstance {
        name: "alpha_beta".into(),
        params: params(&[("alpha", alpha), ("beta", beta)]),
        matrix: pauli_matrix(h),
        inner: None,
        expected,
        preferred_basis: Some(PreferredBasis {
            pairs: vec![(v_f, v_cf)],
            singlets: Vec::new(),
            ladder: true,
        }),
    }
}

/// `S₁ = e^{iβ}τ_x` (times complex conjugation) of the α–β model in its
/// original basis, for `α ∈ (π/4, π/2)`.
pub fn alpha_beta_s1(beta: f64) -> CMatrix<f64> {
    pauli::<f64>(1).scale(Z::from_polar(1.0, beta))
}

/// Inner two-level Hamiltonian `[[0, √(1−f)], [√f, 0]]` with the given `f`.
pub fn ladder_2x2(f: f64) -> CMatrix<f64> {
    mat2(zr(0.0), zr((1.0 - f).sqrt()), zr(f.sqrt()), zr(0.0))
}

/// `[[d₃ I, d₁ H], [d₂ H†, −d₃ I]]`.
pub fn chiral_embed(inner: &CMatrix<f64>, d1: Z, d2: Z, d3: Z) -> CMatrix<f64> {
    let n = inner.dim();
    let hd = inner.adjoint();
    CMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, true) => {
            if i == j {
                d3
            } else {
                zr(0.0)
            }
        }
        (true, false) => d1 * inner[(i, j - n)],
        (false, true) => d2 * hd[(i - n, j)],
        (false, false) => {
            if i == j {
                -d3
            } else {
                zr(0.0)
            }
        }
    })
}

/// Chiral embedding of [`ladder_2x2`] with real couplings `d₁, d₂, d₃`.
pub fn chiral_embed_f(f: f64, d1: f64, d2: f64, d3: f64) -> ModelInstance {
    let inner = ladder_2x2(f);
    let matrix = chiral_embed(&inner, zr(d1), zr(d2), zr(d3));
    let (g, phi) = (0.0, 0.0);
    let e = (f * (1.0 - f)).max(0.0).sqrt().sqrt();
    let exceptional = f.min(1.0 - f) <= 1e-9;
    let special = (d1 - 1.0).abs() < 1e-15 && (d2 - 1.0).abs() < 1e-15 && d3 == 0.0;
    let expected = ExpectedRecord {
        d: 1.0,
        pair_f: vec![f],
        abs_e: vec![e],
        energies: vec![zr(e), zr(-e)],
        phases: (!exceptional).then_some((g, phi)),
        a_mag: (!exceptional).then(|| (f / (1.0 - f)).powf(0.25)),
        energy_class: (!exceptional).then_some(EnergyClass::Real),
        exceptional,
        assembled_spectrum: special.then(|| {
            let (a, b) = (f.sqrt(), (1.0 - f).sqrt());
            vec![zr(a), zr(-a), zr(b), zr(-b)]
        }),
        singlet_energies: Vec::new(),
    };
    ModelInstance {
        name: "chiral_embed".into(),
        params: params(&[("f", f), ("d1", d1), ("d2", d2), ("d3", d3)]),
        matrix,
        inner: Some(inner),
        expected,
        preferred_basis: Some(PreferredBasis {
            pairs: vec![(vec![zr(1.0), zr(0.0)], vec![zr(0.0), zr(1.0)])],
            singlets: Vec::new(),
            ladder: true,
        }),
    }
}

/// Four levels: `h₁Γ₁ + h₂Γ₂ + h₃Γ₃` with the α–β amplitudes.
pub fn gamma_4d(alpha: f64, beta: f64) -> ModelInstance {
    let s = FRAC_1_SQRT_2;
    let h = [
        zr(s * alpha.sin() * beta.cos()),
        zr(s * alpha.sin() * beta.sin()),
        z(0.0, s * alpha.cos()),
        zr(0.0),
        zr(0.0),
    ];
    let nu = sgn((2.0 * alpha).sin());
    let iphase = |sign: f64, b: f64| Z::from_polar(sign * nu * s, b) * Z::i();
    let f1 = vec![iphase(1.0, -beta), zr(0.0), zr(0.0), zr(s)];
    let c1 = vec![iphase(-1.0, -beta), zr(0.0), zr(0.0), zr(s)];
    let f2 = vec![zr(0.0), iphase(1.0, beta), zr(s), zr(0.0)];
    let c2 = vec![zr(0.0), iphase(-1.0, beta), zr(s), zr(0.0)];
    let f = 0.5 + 0.5 * (2.0 * alpha).sin().abs();
    let c2a = (2.0 * alpha).cos();
    let e = (zr(c2a / 2.0)).sqrt() * Z::i();
    let exceptional = (1.0 - f) <= 1e-9;
    let expected = ExpectedRecord {
        d: 1.0,
        pair_f: vec![f, f],
        abs_e: vec![e.norm(); 2],
        energies: vec![e, -e, e, -e],
        a_mag: (!exceptional).then(|| (f / (1.0 - f)).powf(0.25)),
        energy_class: (!exceptional).then_some({
            if c2a < 0.0 {
                EnergyClass::Real
            } else {
                EnergyClass::Imaginary
            }
        }),
        exceptional,
        ..Default::default()
    };
    ModelInstance {
        name: "gamma_4d".into(),
        params: params(&[("alpha", alpha), ("beta", beta)]),
        matrix: gamma_matrix(&h),
        inner: None,
        expected,
        preferred_basis: Some(PreferredBasis {
            pairs: vec![(f1, c1), (f2, c2)],
            singlets: Vec::new(),
            ladder: false,
        }),
    }
}

/// `−sin(α ± ν π/4)(cos β σ_x − sin β σ_y)`, the `A` (upper sign) and `B`
/// blocks of [`gamma_4d`] in its reference basis.
pub fn gamma_4d_blocks(alpha: f64, beta: f64) -> (CMatrix<f64>, CMatrix<f64>) {
    let nu = sgn((2.0 * alpha).sin());
    let m = &pauli::<f64>(1).scale_real(beta.cos()) - &pauli::<f64>(2).scale_real(beta.sin());
    let a = m.scale_real(-(alpha + nu * FRAC_PI_4).sin());
    let b = m.scale_real(-(alpha - nu * FRAC_PI_4).sin());
    (a, b)
}

/// Three levels with one flat state:
/// `(1/2√2)[[0, 2cos κ, 2cos κ], [2sin κ, 1, −1], [2sin κ, −1, 1]]`.
pub fn flat_3d(kappa: f64) -> ModelInstance {
    let p = 1.0 / (2.0 * 2f64.sqrt());
    let (s, c) = kappa.sin_cos();
    let matrix = CMatrix::from_rows(vec![
        vec![zr(0.0), zr(2.0 * c * p), zr(2.0 * c * p)],
        vec![zr(2.0 * s * p), zr(p), zr(-p)],
        vec![zr(2.0 * s * p), zr(-p), zr(p)],
    ])
    .expect("3×3 literal");
    let r = FRAC_1_SQRT_2;
    let v_f = vec![zr(1.0), zr(0.0), zr(0.0)];
    let v_cf = vec![zr(0.0), zr(r), zr(r)];
    let flat = vec![zr(0.0), zr(r), zr(-r)];
    let f = s * s;
    let e = zr(s * c).sqrt();
    let exceptional = f.min(1.0 - f) <= 1e-9;
    let arg = |x: f64| if x < 0.0 { PI } else { 0.0 };
    let phases = LadderPhases::canonical((arg(s) + arg(c)) / 2.0, (arg(s) - arg(c)) / 2.0);
    let singlet = zr(FRAC_1_SQRT_2);
    let expected = ExpectedRecord {
        d: 1.0,
        pair_f: vec![f],
        abs_e: vec![e.norm()],
        energies: vec![e, -e, singlet],
        singlet_energies: vec![singlet],
        phases: (!exceptional).then_some((phases.gamma, phases.phi)),
        a_mag: (!exceptional).then(|| (s / c).abs().sqrt()),
        energy_class: (!exceptional).then_some({
            if s * c >= 0.0 {
                EnergyClass::Real
            } else {
                EnergyClass::Imaginary
            }
        }),
        exceptional,
        assembled_spectrum: None,
    };
    ModelInstance {
        name: "flat_3d".into(),
        params: params(&[("kappa", kappa)]),
        matrix,
        inner: None,
        expected,
        preferred_basis: Some(PreferredBasis {
            pairs: vec![(v_f, v_cf)],
            singlets: vec![flat],
            ladder: true,
        }),
    }
}

/// `h = (s, 0, r₁ + i r₂)` rescaled so that `2(r₁² + r₂² + s²) = 1`.
pub fn supplement_pt(r1: f64, r2: f64, s: f64) -> ModelInstance {
    let n = (2.0 * (r1 * r1 + r2 * r2 + s * s)).sqrt();
    let (r1n, r2n, sn) = if n > 0.0 {
        (r1 / n, r2 / n, s / n)
    } else {
        (r1, r2, s)
    };
    let h = [zr(sn), zr(0.0), z(r1n, r2n)];
    let r = FRAC_1_SQRT_2;
    let v_f = vec![zr(r), z(0.0, -r)];
    let v_cf = vec![zr(r), z(0.0, r)];
    let f = r1n * r1n + (sn - r2n) * (sn - r2n);
    let e2 = z(r1n, r2n) * z(r1n, r2n) + sn * sn;
    let e = e2.sqrt();
    let exceptional = f.min(1.0 - f) <= 1e-9;
    let expected = ExpectedRecord {
        d: 1.0,
        pair_f: vec![f],
        abs_e: vec![e.norm()],
        energies: vec![e, -e],
        a_mag: (!exceptional).then(|| (f / (1.0 - f)).powf(0.25)),
        energy_class: (!exceptional).then(|| class_of_square(e2, 1e-12)),
        exceptional,
        ..Default::default()
    };
    ModelInstance {
        name: "supplement_pt".into(),
        params: params(&[("r1", r1), ("r2", r2), ("s", s)]),
        matrix: pauli_matrix(h),
        inner: None,
        expected,
        preferred_basis: Some(PreferredBasis {
            pairs: vec![(v_f, v_cf)],
            singlets: Vec::new(),
            ladder: true,
        }),
    }
}

/// One parameter of a registered model.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Option<f64>,
    /// Converted by `--degrees`.
    pub angle: bool,
}

const fn req(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default: None,
        angle: false,
    }
}

const fn opt(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec {
        name,
        default: Some(default),
        angle: false,
    }
}

const fn ang(name: &'static str, default: Option<f64>) -> ParamSpec {
    ParamSpec {
        name,
        default,
        angle: true,
    }
}

/// A named model and its parameter schema.
#[derive(Clone, Copy, Debug)]
pub struct ModelSpec {
    pub name: &'static str,
    pub params: &'static [ParamSpec],
    pub summary: &'static str,
}

pub const MODELS: &[ModelSpec] = &[
    ModelSpec {
        name: "gain_loss",
        params: &[
            opt("delta", 0.0),
            opt("gamma1", 0.0),
            opt("gamma2", 0.0),
            opt("d_gamma", 0.0),
            req("omega_r"),
            opt("omega_i", 0.0),
        ],
        summary: "two levels with gain/loss; d_gamma sets gamma1 = -gamma2 = d_gamma",
    },
    ModelSpec {
        name: "nonreciprocal",
        params: &[req("omega1"), req("omega2"), opt("delta", 0.0)],
        summary: "asymmetric real hoppings [[0, omega1], [omega2, delta]]",
    },
    ModelSpec {
        name: "hatano_nelson",
        params: &[req("t_r"), req("t_l"), ang("k", None), opt("delta", 0.0)],
        summary: "Bloch Hamiltonian of the bipartite Hatano-Nelson chain",
    },
    ModelSpec {
        name: "alpha_beta",
        params: &[ang("alpha", None), ang("beta", Some(0.0))],
        summary: "h = (sin a cos b, sin a sin b, i cos a)/sqrt 2",
    },
    ModelSpec {
        name: "chiral_embed",
        params: &[req("f"), opt("d1", 1.0), opt("d2", 1.0), opt("d3", 0.0)],
        summary: "chiral 4x4 embedding of [[0, sqrt(1-f)], [sqrt f, 0]]",
    },
    ModelSpec {
        name: "gamma_4d",
        params: &[ang("alpha", None), ang("beta", Some(0.0))],
        summary: "four-level Gamma-matrix model with point degeneracy",
    },
    ModelSpec {
        name: "flat_3d",
        params: &[ang("kappa", None)],
        summary: "three-level model with a flat state",
    },
    ModelSpec {
        name: "supplement_pt",
        params: &[req("r1"), req("r2"), req("s")],
        summary: "h = (s, 0, r1 + i r2), rescaled to d = 1",
    },
];

pub fn model_spec(name: &str) -> Result<&'static ModelSpec> {
    MODELS
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| Error::UnknownModel {
            name: name.to_string(),
        })
}

/// Builds a registered model. Unknown keys are ignored; missing required
/// parameters are an error.
pub fn build_model(name: &str, given: &BTreeMap<String, f64>) -> Result<ModelInstance> {
    let spec = model_spec(name)?;
    let mut p = BTreeMap::new();
    for ps in spec.params {
        let v = given
            .get(ps.name)
            .copied()
            .or(ps.default)
            .ok_or_else(|| Error::MissingParam {
                model: name.to_string(),
                param: ps.name.to_string(),
            })?;
        p.insert(ps.name, v);
    }
    Ok(match name {
        "gain_loss" => {
            let (g1, g2) = if given.contains_key("d_gamma") {
                (p["d_gamma"], -p["d_gamma"])
            } else {
                (p["gamma1"], p["gamma2"])
            };
            gain_loss(p["delta"], g1, g2, p["omega_r"], p["omega_i"])
        }
        "nonreciprocal" => nonreciprocal(p["omega1"], p["omega2"], p["delta"]),
        "hatano_nelson" => hatano_nelson(p["t_r"], p["t_l"], p["k"], p["delta"]),
        "alpha_beta" => alpha_beta(p["alpha"], p["beta"]),
        "chiral_embed" => chiral_embed_f(p["f"], p["d1"], p["d2"], p["d3"]),
        "gamma_4d" => gamma_4d(p["alpha"], p["beta"]),
        "flat_3d" => flat_3d(p["kappa"]),
        "supplement_pt" => supplement_pt(p["r1"], p["r2"], p["s"]),
        _ => unreachable!("registry and constructors disagree"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ladder_phases;
    use crate::hamiltonian::{f_vector, normalize, pauli_decompose};
    use crate::higher_dim::{block_decompose, degenerate_spectrum, DegeneracyKind};

    #[test]
    fn alpha_beta_reference_basis_is_an_f_eigenbasis() {
        for &alpha in &[0.3, 1.0, 2.0, 2.8] {
            let m = alpha_beta(alpha, 0.7);
            let h = normalize(&m.matrix, 1e-9).unwrap();
            assert!((h.d - 1.0).abs() < 1e-14);
            let b = m.basis(&h, 1e-9).unwrap();
            assert!((b.pairs[0].f - m.expected.pair_f[0]).abs() < 1e-14);
            let ph = ladder_phases(&h, &b.pairs[0]).unwrap();
            let (g, p) = m.expected.phases.unwrap();
            assert!(
                (ph.gamma - g).abs() < 1e-12 && (ph.phi - p).abs() < 1e-12,
                "{alpha}: {ph:?}"
            );
        }
    }

    #[test]
    fn hatano_nelson_f_vector_matches_unscaled_h() {
        let m = hatano_nelson(0.8, 0.3, 0.7, 0.5);
        let shift = CMatrix::identity(2).scale(m.matrix.trace() / 2.0);
        let pv = pauli_decompose(&(&m.matrix - &shift)).unwrap();
        let fv = f_vector(&pv);
        let want = hatano_nelson_f_vector(0.8, 0.3, 0.7, 0.5);
        for i in 0..3 {
            assert!((fv.components[i] - want[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_4d_blocks_match_reference_form() {
        let m = gamma_4d(PI / 6.0, 0.5);
        let h = normalize(&m.matrix, 1e-9).unwrap();
        let basis = m.block_basis(&h, 1e-9).unwrap();
        let blocks = block_decompose(&h, &basis).unwrap();
        assert_eq!(blocks.len(), 1);
        let (a, b) = gamma_4d_blocks(PI / 6.0, 0.5);
        assert!(blocks[0].a.distance(&a) < 1e-14);
        assert!(blocks[0].b.distance(&b) < 1e-14);
        let ds = degenerate_spectrum(&blocks[0]).unwrap();
        assert_eq!(ds.kind, DegeneracyKind::Point);
        for p in &ds.eigenpairs {
            assert!((p.e_plus - Z::new(0.0, 0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_3d_normalizes_without_trace_removal() {
        let m = flat_3d(0.4);
        let h = normalize(&m.matrix, 1e-9).unwrap();
        assert!(h.trace_shift.norm() < 1e-12);
        assert!((h.d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn registry_reports_missing_and_unknown() {
        let empty = BTreeMap::new();
        assert!(matches!(
            build_model("nope", &empty),
            Err(Error::UnknownModel { .. })
        ));
        assert!(matches!(
            build_model("flat_3d", &empty),
            Err(Error::MissingParam { .. })
        ));
        let mut p = BTreeMap::new();
        p.insert("alpha".to_string(), 0.3);
        assert_eq!(build_model("alpha_beta", &p).unwrap().params["beta"], 0.0);
    }
}

//! Differential brackets: the Courant bracket on sections of `TM ⊕ T*M`,
//! the graded Lie bracket on `Λ^•(T^{1,0} ⊕ T^{*0,1})`, Lie derivatives and
//! the Lie-algebroid differential `d_L = ∂̄ + ⟦σ, ·⟧`.
//!
//! The graded bracket is the biderivation extending `[X,Y]` (Lie bracket),
//! `[X,η] = L_X η` and `[η,θ] = 0` on generators, expanded symbolically over
//! frame monomials; `d_L` returns a graded sum since its two pieces shift
//! different slots of the bidegree.

use num_complex::Complex64;

use crate::algebra::HolPoissonBase;
use crate::error::{GcError, Result};
use crate::fields::{Dir, SpectralField, TorusGeometry, Valence};
use crate::hodge::dbar;

/// A section of the complexified double tangent bundle in the real frame:
/// `2n` vector components and `2n` form components, each a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub vector: Vec<SpectralField>,
    pub form: Vec<SpectralField>,
}

impl Section {
    pub fn zero(geom: TorusGeometry) -> Self {
        let mk = || (0..geom.axes()).map(|_| SpectralField::zero(geom, Valence::SCALAR)).collect();
        Self { vector: mk(), form: mk() }
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.vector[0].geometry()
    }

    pub fn random(geom: TorusGeometry, seed: u64, bandwidth: usize, amplitude: f64) -> Result<Self> {
        let mut s = Self::zero(geom);
        for m in 0..geom.axes() {
            s.vector[m] = SpectralField::random_bandlimited(
                geom,
                Valence::SCALAR,
                seed.wrapping_mul(2).wrapping_add(m as u64),
                bandwidth,
                amplitude,
                false,
            )?;
            s.form[m] = SpectralField::random_bandlimited(
                geom,
                Valence::SCALAR,
                seed.wrapping_mul(2).wrapping_add(1000 + m as u64),
                bandwidth,
                amplitude,
                false,
            )?;
        }
        Ok(s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for m in 0..self.vector.len() {
            out.vector[m] = self.vector[m].add(&other.vector[m])?;
            out.form[m] = self.form[m].add(&other.form[m])?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            vector: self.vector.iter().map(|f| f.scale(s)).collect(),
            form: self.form.iter().map(|f| f.scale(s)).collect(),
        }
    }

    /// Multiply by a scalar function.
    pub fn mul_fn(&self, f: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        for m in 0..self.vector.len() {
            out.vector[m] = self.vector[m].mul_scalar_field(f)?;
            out.form[m] = self.form[m].mul_scalar_field(f)?;
        }
        Ok(out)
    }

    pub fn c0_norm(&self) -> f64 {
        self.vector
            .iter()
            .chain(self.form.iter())
            .map(|f| f.c0_norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::from(-1.0)))
    }
}

/// Pointwise natural pairing of two sections, as a scalar field.
pub fn pairing_field(u: &Section, v: &Section) -> Result<SpectralField> {
    let geom = u.geometry();
    let mut s = SpectralField::zero(geom, Valence::SCALAR);
    for m in 0..geom.axes() {
        s = s.add(&u.form[m].mul_scalar_field(&v.vector[m])?)?;
        s = s.add(&v.form[m].mul_scalar_field(&u.vector[m])?)?;
    }
    Ok(s.scale(Complex64::from(0.5)))
}

/// Differential of a function as a section with zero vector part.
pub fn d_function(f: &SpectralField) -> Section {
    let geom = f.geometry();
    let mut s = Section::zero(geom);
    for m in 0..geom.axes() {
        s.form[m] = f.derivative(Dir::Real(m));
    }
    s
}

/// Anchor action `π_T(u) · f`.
pub fn anchor_apply(u: &Section, f: &SpectralField) -> Result<SpectralField> {
    let geom = f.geometry();
    let mut s = SpectralField::zero(geom, Valence::SCALAR);
    for m in 0..geom.axes() {
        s = s.add(&f.derivative(Dir::Real(m)).mul_scalar_field(&u.vector[m])?)?;
    }
    Ok(s)
}

/// Courant bracket with `H = 0`:
/// `⟦X+ξ, Y+η⟧ = [X,Y] + L_X η - ι_Y dξ`.
pub fn courant_bracket(u: &Section, v: &Section) -> Result<Section> {
    let geom = u.geometry();
    if v.geometry() != geom {
        return Err(GcError::DimensionMismatch("sections on different geometries".into()));
    }
    let axes = geom.axes();
    let mut out = Section::zero(geom);
    for m in 0..axes {
        // [X,Y]^m = Σ_c X^c ∂_c Y^m - Y^c ∂_c X^m
        let mut vec_m = SpectralField::zero(geom, Valence::SCALAR);
        // (L_X η)_m = Σ_c X^c ∂_c η_m + η_c ∂_m X^c
        // (ι_Y dξ)_m = Σ_c Y^c (∂_c ξ_m - ∂_m ξ_c)
        let mut form_m = SpectralField::zero(geom, Valence::SCALAR);
        for c in 0..axes {
            vec_m = vec_m.add(&v.vector[m].derivative(Dir::Real(c)).mul_scalar_field(&u.vector[c])?)?;
            vec_m = vec_m.sub(&u.vector[m].derivative(Dir::Real(c)).mul_scalar_field(&v.vector[c])?)?;

            form_m = form_m.add(&v.form[m].derivative(Dir::Real(c)).mul_scalar_field(&u.vector[c])?)?;
            form_m = form_m.add(&u.vector[c].derivative(Dir::Real(m)).mul_scalar_field(&v.form[c])?)?;
            let curl = u.form[m]
                .derivative(Dir::Real(c))
                .sub(&u.form[c].derivative(Dir::Real(m)))?;
            form_m = form_m.sub(&curl.mul_scalar_field(&v.vector[c])?)?;
        }
        out.vector[m] = vec_m;
        out.form[m] = form_m;
    }
    Ok(out)
}

/// Odd derivative by `θ_a` acting from the right (`last_sign = true`) or
/// from the left. In the word `θ_A ∧ χ_B` the right derivative picks up
/// `(-1)^{#letters after a}`, the left one `(-1)^{#letters before a}`.
fn theta_derivative(f: &SpectralField, a: u32, from_right: bool) -> SpectralField {
    let g = f.geometry();
    let n = g.n;
    let v = f.valence();
    debug_assert!(v.vec >= 1);
    let out_v = Valence::new(v.vec - 1, v.form);
    let mut out = SpectralField::zero(g, out_v);
    let bit = 1u32 << a;
    for (ci, &(amask, bmask)) in v.components(n).iter().enumerate() {
        if amask & bit == 0 {
            continue;
        }
        let before = (amask & (bit - 1)).count_ones() as usize;
        let exp = if from_right { (v.vec - 1 - before) + v.form } else { before };
        let s = if exp % 2 == 0 { 1.0 } else { -1.0 };
        let tc = out_v.component_index(n, amask & !bit, bmask);
        let src = f.comp(ci).to_vec();
        let dst = out.comp_mut(tc);
        for (i, c) in src.iter().enumerate() {
            dst[i] += s * c;
        }
    }
    out
}

/// The graded Lie bracket on `C^∞(Λ^• L̃)`: the biderivation extending the
/// Courant bracket of the integrable complement (`[X,Y]` Lie, `[X,η] = L_X η`,
/// `[η,θ] = 0`). In the constant frame it is the odd Poisson bracket
/// `[u,v] = Σ_a (u ∂⃖_{θ_a}) ∧ ∂_{z^a} v - Σ_a ∂_{z^a} u ∧ (∂⃗_{θ_a} v)`.
/// The result has bidegree `(p_u + p_v - 1, q_u + q_v)`; pure-form inputs
/// of positive degree are rejected.
pub fn graded_bracket(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let g = u.geometry();
    if v.geometry() != g {
        return Err(GcError::DimensionMismatch("fields on different geometries".into()));
    }
    let (vu, vv) = (u.valence(), v.valence());
    if vu.vec + vv.vec == 0 {
        return Err(GcError::IncompatibleValence(
            "graded bracket needs a vector slot (it vanishes on pure forms)".into(),
        ));
    }
    let n = g.n;
    let out_v = Valence::new(vu.vec + vv.vec - 1, vu.form + vv.form);
    let mut out = SpectralField::zero(g, out_v);
    if out_v.vec > n || out_v.form > n {
        return Ok(out);
    }
    for a in 0..n {
        if vu.vec >= 1 {
            let du = theta_derivative(u, a as u32, true);
            let dv = v.derivative(Dir::Z(a));
            out = out.add(&du.wedge(&dv)?)?;
        }
        if vv.vec >= 1 {
            let du = u.derivative(Dir::Z(a));
            let dv = theta_derivative(v, a as u32, false);
            out = out.sub(&du.wedge(&dv)?)?;
        }
    }
    Ok(out)
}

/// Lie derivative along a `(1,0)` vector field, the degree-1 case of the
/// graded bracket.
pub fn lie_derivative(x: &SpectralField, t: &SpectralField) -> Result<SpectralField> {
    if x.valence() != Valence::new(1, 0) {
        return Err(GcError::IncompatibleValence("lie_derivative needs a (1,0) vector field".into()));
    }
    graded_bracket(x, t)
}

/// Constant `(2,0)`-field carrying the background bivector `σ`.
pub fn sigma_field(geom: TorusGeometry, base: &HolPoissonBase) -> SpectralField {
    let v = Valence::new(2, 0);
    let mut vals = Vec::new();
    for (amask, _) in v.components(geom.n) {
        let a = amask.trailing_zeros() as usize;
        let b = (31 - amask.leading_zeros()) as usize;
        vals.push(base.sigma[(a, b)]);
    }
    SpectralField::constant(geom, v, &vals).expect("component count")
}

/// A sum of homogeneous tensor fields of distinct bidegrees.
#[derive(Debug, Clone)]
pub struct GradedField {
    parts: Vec<SpectralField>,
}

impl GradedField {
    pub fn from_parts(parts: Vec<SpectralField>) -> Self {
        let mut merged: Vec<SpectralField> = Vec::new();
        for p in parts {
            if let Some(q) = merged.iter_mut().find(|q| q.valence() == p.valence()) {
                *q = q.add(&p).expect("same shape");
            } else {
                merged.push(p);
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[SpectralField] {
        &self.parts
    }

    pub fn part(&self, v: Valence) -> Option<&SpectralField> {
        self.parts.iter().find(|p| p.valence() == v)
    }

    pub fn max_coef(&self) -> f64 {
        self.parts.iter().map(|p| p.max_coef()).fold(0.0, f64::max)
    }

    pub fn c0_norm(&self) -> f64 {
        self.parts.iter().map(|p| p.c0_norm()).fold(0.0, f64::max)
    }
}

/// Lie-algebroid differential for the holomorphic Poisson background:
/// `d_L = ∂̄ + ⟦σ, ·⟧`. The two pieces land in bidegrees `(p, q+1)` and
/// `(p+1, q)`, so the result is a graded sum.
pub fn d_l(a: &SpectralField, base: &HolPoissonBase) -> Result<GradedField> {
    let sf = sigma_field(a.geometry(), base);
    Ok(GradedField::from_parts(vec![dbar(a), graded_bracket(&sf, a)?]))
}

/// `d_L` applied to a graded sum.
pub fn d_l_graded(a: &GradedField, base: &HolPoissonBase) -> Result<GradedField> {
    let mut parts = Vec::new();
    for p in a.parts() {
        parts.extend(d_l(p, base)?.parts.into_iter());
    }
    Ok(GradedField::from_parts(parts))
}

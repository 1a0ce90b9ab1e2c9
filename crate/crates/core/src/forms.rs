//! Real one-forms and real closed two-forms on the torus, stored through
//! their Dolbeault pieces. Reality is enforced by construction: a one-form
//! keeps only its `(0,1)`-part (the `(1,0)`-part is its conjugate), a
//! two-form keeps the `(0,2)` and `(1,1)` parts with
//! `B^{2,0} = conj(B^{0,2})`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{GcError, Result};
use crate::fields::{Dir, SpectralField, TorusGeometry, Valence};

/// A real one-form `ξ = u + conj(u)` represented by `u = ξ^{0,1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealOneForm {
    c01: SpectralField,
}

impl RealOneForm {
    pub fn zero(geom: TorusGeometry) -> Self {
        Self { c01: SpectralField::zero(geom, Valence::new(0, 1)) }
    }

    pub fn from_zbar_part(c01: SpectralField) -> Result<Self> {
        if c01.valence() != Valence::new(0, 1) {
            return Err(GcError::IncompatibleValence("one-form part must have valence (0,1)".into()));
        }
        Ok(Self { c01 })
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.c01.geometry()
    }

    /// The `(0,1)`-part as a spectral field.
    pub fn zbar_part(&self) -> &SpectralField {
        &self.c01
    }

    /// Component `a` of the `(1,0)`-part (`conj` of the `(0,1)`-part).
    pub fn z_part_component(&self, a: usize) -> SpectralField {
        self.c01.component_scalar(a).conj_scalar().expect("scalar conj")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { c01: self.c01.add(&other.c01)? })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c01: self.c01.scale(Complex64::from(s)) }
    }

    pub fn c0_norm(&self) -> f64 {
        // |ξ| ~ max over the complex components of both parts
        self.c01.c0_norm()
    }

    /// Exterior derivative; closed and real by construction.
    pub fn d(&self) -> RealTwoForm {
        let g = self.geometry();
        let n = g.n;
        let b02 = crate::hodge::dbar(&self.c01);
        let mut b11 = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                // (dξ)^{1,1}_{ab̄} = ∂_{z^a} u_b - ∂_{z̄^b} conj(u)_a
                let du = self.c01.component_scalar(b).derivative(Dir::Z(a));
                let dv = self.z_part_component(a).derivative(Dir::Zbar(b));
                b11.push(du.sub(&dv).expect("shape"));
            }
        }
        RealTwoForm { geom: g, b02, b11 }
    }
}

/// A real closed two-form through its `(0,2)` and `(1,1)` parts; the
/// `(2,0)`-part is implied by reality.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTwoForm {
    geom: TorusGeometry,
    b02: SpectralField,
    /// coefficients of `dz^a ∧ dz̄^b`, row-major `a * n + b`
    b11: Vec<SpectralField>,
}

impl RealTwoForm {
    pub fn zero(geom: TorusGeometry) -> Self {
        let n = geom.n;
        Self {
            geom,
            b02: SpectralField::zero(geom, Valence::new(0, 2)),
            b11: (0..n * n).map(|_| SpectralField::zero(geom, Valence::SCALAR)).collect(),
        }
    }

    /// Constant two-form with the given `(0,2)`-part and zero `(1,1)`-part.
    pub(crate) fn from_b02(b02: SpectralField) -> Self {
        let geom = b02.geometry();
        let n = geom.n;
        Self {
            geom,
            b02,
            b11: (0..n * n).map(|_| SpectralField::zero(geom, Valence::SCALAR)).collect(),
        }
    }

    pub fn geometry(&self) -> TorusGeometry {
        self.geom
    }

    pub fn b02(&self) -> &SpectralField {
        &self.b02
    }

    pub fn b11(&self, a: usize, b: usize) -> &SpectralField {
        &self.b11[a * self.geom.n + b]
    }

    /// Overwrite one `(1,1)`-coefficient (scalar field for `dz^a ∧ dz̄^b`).
    /// Reality and closedness are the caller's responsibility; used for
    /// constant-coefficient test forms.
    pub(crate) fn set_b11(&mut self, a: usize, b: usize, f: SpectralField) {
        self.b11[a * self.geom.n + b] = f;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let b02 = self.b02.add(&other.b02)?;
        let mut b11 = Vec::with_capacity(self.b11.len());
        for (x, y) in self.b11.iter().zip(other.b11.iter()) {
            b11.push(x.add(y)?);
        }
        Ok(Self { geom: self.geom, b02, b11 })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            geom: self.geom,
            b02: self.b02.scale(Complex64::from(s)),
            b11: self.b11.iter().map(|x| x.scale(Complex64::from(s))).collect(),
        }
    }

    /// Sup-norm proxy: max over the component samples of all parts.
    pub fn c0_norm(&self) -> f64 {
        let mut m = self.b02.c0_norm();
        for x in &self.b11 {
            m = m.max(x.c0_norm());
        }
        m
    }

    /// Real skew matrices `TM -> T*M` of the form at every grid point
    /// (row-major over the grid, frame `∂_{x^1}, ∂_{y^1}, ...`).
    pub fn real_matrices(&self) -> Vec<DMatrix<f64>> {
        let n = self.geom.n;
        let d = 2 * n;
        let glen = self.geom.grid_len();
        let i = Complex64::new(0.0, 1.0);
        // covector columns of dz^a and dz̄^a in the real frame
        let dz_col = |a: usize| {
            let mut v = vec![Complex64::default(); d];
            v[2 * a] = Complex64::new(1.0, 0.0);
            v[2 * a + 1] = i;
            v
        };
        let dzbar_col = |a: usize| {
            let mut v = vec![Complex64::default(); d];
            v[2 * a] = Complex64::new(1.0, 0.0);
            v[2 * a + 1] = -i;
            v
        };
        let g02 = self.b02.sample();
        let g11: Vec<Vec<Complex64>> = self.b11.iter().map(|x| x.sample()).collect();
        let comps02 = self.b02.valence().components(n);
        let mut out = Vec::with_capacity(glen);
        for p in 0..glen {
            let mut m = DMatrix::from_element(d, d, Complex64::default());
            let mut rank1 = |coef: Complex64, u: &Vec<Complex64>, v: &Vec<Complex64>| {
                if coef == Complex64::default() {
                    return;
                }
                for r in 0..d {
                    for c in 0..d {
                        m[(r, c)] += coef * (v[r] * u[c] - u[r] * v[c]);
                    }
                }
            };
            for (ci, &(_, bmask)) in comps02.iter().enumerate() {
                // bmask encodes {a < b}
                let a = bmask.trailing_zeros() as usize;
                let b = (31 - bmask.leading_zeros()) as usize;
                let gamma = g02[ci * glen + p];
                rank1(gamma, &dzbar_col(a), &dzbar_col(b));
                rank1(gamma.conj(), &dz_col(a), &dz_col(b));
            }
            for a in 0..n {
                for b in 0..n {
                    let coef = g11[a * n + b][p];
                    rank1(coef, &dz_col(a), &dzbar_col(b));
                }
            }
            let real = DMatrix::from_fn(d, d, |r, c| {
                debug_assert!(m[(r, c)].im.abs() < 1e-10 * (1.0 + m[(r, c)].re.abs()));
                m[(r, c)].re
            });
            out.push(real);
        }
        out
    }
}

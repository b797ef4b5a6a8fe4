//! Block formulas for R^G on pure horizontal/vertical arguments, the
//! special 4-tensor values, and the Ricci and scalar curvature of G.
//! Mixed arguments are handled by splitting into h/v parts and summing.

use nalgebra::{DMatrix, DVector};

use super::{SasakiAt, SplitTangentVector};

/// Argument patterns R^G(X, Y, Y, W) with closed forms.
/// Letters give the part (h or v) taken from X, Y, Y, W.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rg4Pattern {
    Hhhh,
    Hvvh,
    Vhhh,
    Vhhv,
    Vvvh,
    Hhhv,
    Hvvv,
}

impl Rg4Pattern {
    pub const ALL: [Rg4Pattern; 7] = [
        Rg4Pattern::Hhhh,
        Rg4Pattern::Hvvh,
        Rg4Pattern::Vhhh,
        Rg4Pattern::Vhhv,
        Rg4Pattern::Vvvh,
        Rg4Pattern::Hhhv,
        Rg4Pattern::Hvvv,
    ];

    /// (X vertical?, Y vertical?, W vertical?)
    pub fn parts(self) -> (bool, bool, bool) {
        match self {
            Rg4Pattern::Hhhh => (false, false, false),
            Rg4Pattern::Hvvh => (false, true, false),
            Rg4Pattern::Vhhh => (true, false, false),
            Rg4Pattern::Vhhv => (true, false, true),
            Rg4Pattern::Vvvh => (true, true, false),
            Rg4Pattern::Hhhv => (false, false, true),
            Rg4Pattern::Hvvv => (false, true, true),
        }
    }
}

fn pick(x: &SplitTangentVector, vertical: bool) -> SplitTangentVector {
    if vertical {
        x.v_part()
    } else {
        x.h_part()
    }
}

impl<'a> SasakiAt<'a> {
    fn horizontal_sum<F>(&self, mut coeff: F) -> SplitTangentVector
    where
        F: FnMut(&SplitTangentVector) -> f64,
    {
        let m = self.dim();
        let mut h = DVector::zeros(m);
        for (i, e) in self.frame.e.iter().enumerate() {
            h += e * coeff(&self.frame.horizontal(i));
        }
        SplitTangentVector::horizontal(h)
    }

    // R^G(X^h, Y^h)Z^h
    fn block_hhh(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let base = SplitTangentVector::horizontal(self.base_r(&x.h, &y.h, &z.h));
        base - 0.5 * self.nabla_script_r(x, y, z) + 0.5 * self.nabla_script_r(y, x, z)
            + self.tensor_a(&self.script_r(x, y), z)
            - 0.5 * self.tensor_a(x, &self.script_r(y, z))
            + 0.5 * self.tensor_a(y, &self.script_r(x, z))
    }

    // R^G(X^v, Y^h)Z^h
    fn block_vhh(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let d = self.delta();
        let mut sum = SplitTangentVector::zero(self.dim());
        for (j, _) in self.frame.e.iter().enumerate() {
            let ej = self.frame.horizontal(j);
            let c = self.sasaki_inner(&self.script_r(z, &ej), x);
            sum = sum + c * self.script_r(y, &ej);
        }
        -0.5 * SplitTangentVector::vertical(self.base_r(&y.h, &z.h, &x.v)) - self.a_nabla_r(y, x, z) + (0.25 * d) * sum
    }

    // R^G(X^v, Y^h)Z^v
    fn block_vhv(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let d = self.delta();
        let tail = self.horizontal_sum(|ei| {
            (0..self.dim())
                .map(|j| {
                    let ej = self.frame.horizontal(j);
                    self.sasaki_inner(&self.script_r(y, &ej), z) * self.sasaki_inner(&self.script_r(&ej, ei), x)
                })
                .sum()
        });
        self.a_nabla_r(x, y, z) + (0.25 * d * d) * tail
    }

    // R^G(X^h, Y^h)Z^v
    fn block_hhv(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let d = self.delta();
        let mut sum = SplitTangentVector::zero(self.dim());
        for j in 0..self.dim() {
            let ej = self.frame.horizontal(j);
            sum = sum + self.sasaki_inner(&self.script_r(x, &ej), z) * self.script_r(y, &ej)
                - self.sasaki_inner(&self.script_r(y, &ej), z) * self.script_r(x, &ej);
        }
        SplitTangentVector::vertical(self.base_r(&x.h, &y.h, &z.v)) - self.a_nabla_r(y, x, z)
            + self.a_nabla_r(x, y, z)
            + (0.25 * d) * sum
    }

    // R^G(X^v, Y^v)Z^h
    fn block_vvh(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let d = self.delta();
        let tail = self.horizontal_sum(|ei| {
            (0..self.dim())
                .map(|j| {
                    let ej = self.frame.horizontal(j);
                    self.sasaki_inner(&self.script_r(z, &ej), y) * self.sasaki_inner(&self.script_r(&ej, ei), x)
                        - self.sasaki_inner(&self.script_r(z, &ej), x) * self.sasaki_inner(&self.script_r(&ej, ei), y)
                })
                .sum()
        });
        -self.a_nabla_r(y, x, z) + self.a_nabla_r(x, y, z) + (0.25 * d * d) * tail
    }

    /// R^G(X, Y)Z from the five block formulas, extended by multilinearity.
    /// Three vertical arguments contribute exactly zero.
    pub fn curvature_rg(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector) -> SplitTangentVector {
        let (xh, xv) = (x.h_part(), x.v_part());
        let (yh, yv) = (y.h_part(), y.v_part());
        let (zh, zv) = (z.h_part(), z.v_part());
        self.block_hhh(&xh, &yh, &zh) + self.block_vhh(&xv, &yh, &zh) - self.block_vhh(&yv, &xh, &zh)
            + self.block_vhv(&xv, &yh, &zv)
            - self.block_vhv(&yv, &xh, &zv)
            + self.block_hhv(&xh, &yh, &zv)
            + self.block_vvh(&xv, &yv, &zh)
    }

    /// R^G(X, Y, Z, W) = G(R^G(X, Y)Z, W).
    pub fn curvature_rg4(&self, x: &SplitTangentVector, y: &SplitTangentVector, z: &SplitTangentVector, w: &SplitTangentVector) -> f64 {
        self.g_inner(&self.curvature_rg(x, y, z), w)
    }

    /// Closed form of R^G(X, Y, Y, W) on the given argument pattern. The
    /// parts named by the pattern are taken from X, Y and W.
    pub fn curvature_rg4_pattern(&self, pattern: Rg4Pattern, x: &SplitTangentVector, y: &SplitTangentVector, w: &SplitTangentVector) -> f64 {
        let (xv, yv, wv) = pattern.parts();
        let (x, y, w) = (pick(x, xv), pick(y, yv), pick(w, wv));
        let (f1, f2, d) = (self.f1(), self.f2(), self.delta());
        let m = self.dim();
        match pattern {
            Rg4Pattern::Hhhh => {
                f1 * self.ip(&self.base_r(&x.h, &y.h, &y.h), &w.h)
                    + 0.75 * f2 * self.sasaki_inner(&self.script_r(&y, &w), &self.script_r(&x, &y))
            }
            Rg4Pattern::Hvvh => {
                let s: f64 = (0..m)
                    .map(|j| {
                        let ej = self.frame.horizontal(j);
                        self.sasaki_inner(&self.script_r(&x, &ej), &y) * self.sasaki_inner(&self.script_r(&w, &ej), &y)
                    })
                    .sum();
                0.25 * f1 * d * d * s
            }
            Rg4Pattern::Vhhh => 0.5 * f2 * self.sasaki_inner(&self.nabla_script_r(&y, &w, &y), &x),
            Rg4Pattern::Vhhv => {
                let s: f64 = (0..m)
                    .map(|j| {
                        let ej = self.frame.horizontal(j);
                        self.sasaki_inner(&self.script_r(&y, &ej), &w) * self.sasaki_inner(&self.script_r(&y, &ej), &x)
                    })
                    .sum();
                0.25 * f2 * d * s
            }
            Rg4Pattern::Vvvh | Rg4Pattern::Hvvv => 0.0,
            Rg4Pattern::Hhhv => 0.5 * f2 * self.sasaki_inner(&self.nabla_script_r(&y, &x, &y), &w),
        }
    }

    /// ric^G(X^h, Y^h) = ric(X, Y) − (δ/2) Σ_j ⟨ℛ(X,e_j), ℛ(Y,e_j)⟩.
    pub fn ricci_hh(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (xs, ys) = (SplitTangentVector::horizontal(x.clone()), SplitTangentVector::horizontal(y.clone()));
        let s: f64 = (0..self.dim())
            .map(|j| {
                let ej = self.frame.horizontal(j);
                self.sasaki_inner(&self.script_r(&xs, &ej), &self.script_r(&ys, &ej))
            })
            .sum();
        (x.transpose() * &self.base_ric * y)[(0, 0)] - 0.5 * self.delta() * s
    }

    /// ric^G(X^v, Y^v) = (δ²/4) Σ_{ij} ⟨ℛ(e_i,e_j), X⟩⟨ℛ(e_i,e_j), Y⟩.
    pub fn ricci_vv(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let mut s = 0.0;
        for a in &self.frame.e {
            for b in &self.frame.e {
                let r = self.base_r(a, b, self.u());
                s += self.ip(&r, x) * self.ip(&r, y);
            }
        }
        0.25 * self.delta() * self.delta() * s
    }

    /// ric^G(X^h, Y^v) = −(δ/2) Σ_i ⟨(∇_{e_i}ℛ)(e_i, X^h), Y^v⟩, with e_i lifted horizontally.
    pub fn ricci_hv(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let s: f64 = self.frame.e.iter().map(|e| self.ip(&self.base_nabla_r(e, e, x, self.u()), y)).sum();
        -0.5 * self.delta() * s
    }

    /// ric^G(X, Y), extended bilinearly from the three block formulas.
    pub fn ricci_g(&self, x: &SplitTangentVector, y: &SplitTangentVector) -> f64 {
        self.ricci_hh(&x.h, &y.h) + self.ricci_vv(&x.v, &y.v) + self.ricci_hv(&x.h, &y.v) + self.ricci_hv(&y.h, &x.v)
    }

    /// ric^G as a 2m×2m matrix in the G-orthonormal frame.
    pub fn ricci_matrix_orthonormal(&self) -> DMatrix<f64> {
        let frame = self.g_orthonormal_frame();
        let n = frame.len();
        DMatrix::from_fn(n, n, |a, b| self.ricci_g(&frame[a], &frame[b]))
    }

    /// S^G = S/f1 − (f2 / 4f1²) Σ_{ijk} (ℛ_ijk)².
    pub fn scalar_g(&self) -> f64 {
        self.base_scalar / self.f1() - self.f2() / (4.0 * self.f1() * self.f1()) * self.script_r_square_sum()
    }

    /// Frobenius norm of the trace-free part of ric^G in a G-orthonormal frame.
    pub fn trace_free_ricci_norm(&self) -> f64 {
        let ric = self.ricci_matrix_orthonormal();
        let n = ric.nrows();
        let mean = ric.trace() / n as f64;
        (ric - DMatrix::identity(n, n) * mean).norm()
    }
}

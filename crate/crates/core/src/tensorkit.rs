//! Dense multi-index arrays, central finite differences and Gram–Schmidt
//! frames. Everything here is small and dense: the largest arrays are the
//! rank-4 curvature tensors of a 2m-dimensional bundle chart with m <= 6.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_finite, GeoError, Result};

/// Row-major dense tensor of arbitrary rank.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![0.0; n] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(GeoError::Shape(format!(
                "shape {:?} needs {} entries, got {}",
                shape,
                n,
                data.len()
            )));
        }
        Ok(Self { shape: shape.to_vec(), data })
    }

    pub fn scalar(value: f64) -> Self {
        Self { shape: Vec::new(), data: vec![value] }
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        Self { shape: vec![v.len()], data: v.iter().copied().collect() }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let (r, c) = m.shape();
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        Self { shape: vec![r, c], data }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.shape.len() != 2 {
            return Err(GeoError::Shape(format!("expected rank 2, got shape {:?}", self.shape)));
        }
        Ok(DMatrix::from_row_slice(self.shape[0], self.shape[1], &self.data))
    }

    pub fn to_vector(&self) -> Result<DVector<f64>> {
        if self.shape.len() != 1 {
            return Err(GeoError::Shape(format!("expected rank 1, got shape {:?}", self.shape)));
        }
        Ok(DVector::from_column_slice(&self.data))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        let mut off = 0;
        for (i, (&ix, &ext)) in index.iter().zip(&self.shape).enumerate() {
            debug_assert!(ix < ext, "index {} out of range in slot {}", ix, i);
            off = off * ext + ix;
        }
        off
    }

    #[inline]
    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    #[inline]
    pub fn set(&mut self, index: &[usize], value: f64) {
        let off = self.offset(index);
        self.data[off] = value;
    }

    #[inline]
    pub fn add_at(&mut self, index: &[usize], value: f64) {
        let off = self.offset(index);
        self.data[off] += value;
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn axpy(&mut self, factor: f64, other: &DenseTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(GeoError::Shape(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Iterates over every multi-index in row-major order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(&self.shape)
    }
}

/// Row-major odometer over a shape.
pub struct MultiIndexIter {
    shape: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl MultiIndexIter {
    pub fn new(shape: &[usize]) -> Self {
        let done = shape.contains(&0);
        Self { shape: shape.to_vec(), current: vec![0; shape.len()], done }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut slot = self.shape.len();
        loop {
            if slot == 0 {
                self.done = true;
                break;
            }
            slot -= 1;
            self.current[slot] += 1;
            if self.current[slot] < self.shape[slot] {
                break;
            }
            self.current[slot] = 0;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdOrder {
    Second,
    #[default]
    Fourth,
}

impl FdOrder {
    fn power(self) -> i32 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

/// Central finite-difference scheme.
///
/// The step actually used along coordinate `i` is
/// `h_eff = max(h, h * |x_i|)`, so large coordinates get proportionally
/// larger steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    pub step: f64,
    pub order: FdOrder,
    pub richardson: bool,
}

impl Default for FdScheme {
    fn default() -> Self {
        Self { step: 1e-3, order: FdOrder::Fourth, richardson: false }
    }
}

impl FdScheme {
    pub fn new(step: f64, order: FdOrder, richardson: bool) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(GeoError::Config(format!("finite-difference step must be positive, got {step}")));
        }
        Ok(Self { step, order, richardson })
    }

    pub fn effective_step(&self, coordinate: f64) -> f64 {
        self.step.max(self.step * coordinate.abs())
    }
}

/// Symmetric stencil: weights w_k of (f(x + k h) − f(x − k h)) / h.
fn stencil(order: FdOrder) -> &'static [(f64, f64)] {
    match order {
        FdOrder::Second => &[(1.0, 0.5)],
        FdOrder::Fourth => &[(1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
    }
}

fn single_derivative<F>(field: &F, point: &[f64], dir: usize, h: f64, order: FdOrder) -> Result<DenseTensor>
where
    F: Fn(&[f64]) -> Result<DenseTensor> + ?Sized,
{
    let mut probe = point.to_vec();
    let mut eval = |offset: f64| -> Result<DenseTensor> {
        probe[dir] = point[dir] + offset * h;
        let value = field(&probe)?;
        if !value.is_finite() {
            return Err(GeoError::Numeric(format!("field value at stencil point {:?}", probe)));
        }
        Ok(value)
    };
    let mut acc: Option<DenseTensor> = None;
    for &(offset, weight) in stencil(order) {
        let mut diff = eval(offset)?;
        diff.axpy(-1.0, &eval(-offset)?)?;
        match acc.as_mut() {
            None => acc = Some(diff.scale(weight / h)),
            Some(a) => a.axpy(weight / h, &diff)?,
        }
    }
    Ok(acc.expect("stencil is non-empty"))
}

/// Partial derivatives of a tensor-valued field, stacked in a new leading slot.
pub fn finite_difference_derivative<F>(field: &F, point: &[f64], scheme: &FdScheme) -> Result<DenseTensor>
where
    F: Fn(&[f64]) -> Result<DenseTensor> + ?Sized,
{
    let dim = point.len();
    let mut slices = Vec::with_capacity(dim);
    for dir in 0..dim {
        let h = scheme.effective_step(point[dir]);
        let d = if scheme.richardson {
            let coarse = single_derivative(field, point, dir, h, scheme.order)?;
            let mut fine = single_derivative(field, point, dir, 0.5 * h, scheme.order)?;
            let p = 2f64.powi(scheme.order.power());
            // (p * D(h/2) - D(h)) / (p - 1)
            fine = fine.scale(p / (p - 1.0));
            fine.axpy(-1.0 / (p - 1.0), &coarse)?;
            fine
        } else {
            single_derivative(field, point, dir, h, scheme.order)?
        };
        slices.push(d);
    }
    let inner_shape = slices[0].shape().to_vec();
    let mut shape = vec![dim];
    shape.extend_from_slice(&inner_shape);
    let mut data = Vec::with_capacity(shape.iter().product());
    for s in &slices {
        data.extend_from_slice(s.data());
    }
    ensure_finite(&data, "finite-difference derivative")?;
    DenseTensor::from_vec(&shape, data)
}

/// Returns a `gram`-orthonormal frame built by modified Gram–Schmidt on `seed`.
///
/// With `distinguished_last`, that direction is projected out of the seed
/// first and appended (normalized) as the last frame vector.
pub fn gram_schmidt_frame(
    gram: &DMatrix<f64>,
    seed: &[DVector<f64>],
    distinguished_last: Option<&DVector<f64>>,
) -> Result<Vec<DVector<f64>>> {
    let m = gram.nrows();
    if gram.ncols() != m {
        return Err(GeoError::Shape("gram matrix must be square".into()));
    }
    if seed.iter().any(|v| v.len() != m) {
        return Err(GeoError::Shape("seed vectors must match the gram dimension".into()));
    }
    let sym_defect = (gram - gram.transpose()).amax();
    if sym_defect > 1e-10 * gram.amax().max(1.0) || gram.clone().cholesky().is_none() {
        return Err(GeoError::Geometry("gram matrix is not symmetric positive-definite".into()));
    }
    let inner = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * gram * b)[(0, 0)];

    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(m);
    let last = match distinguished_last {
        Some(d) => {
            if d.len() != m {
                return Err(GeoError::Shape("distinguished vector has wrong length".into()));
            }
            let n2 = inner(d, d);
            if !(n2 > 0.0) {
                return Err(GeoError::Rank("distinguished vector is zero".into()));
            }
            Some(d / n2.sqrt())
        }
        None => None,
    };
    let wanted = if last.is_some() { m - 1 } else { m };

    for v in seed {
        if frame.len() == wanted {
            break;
        }
        let scale = inner(v, v).sqrt();
        let mut w = v.clone();
        if let Some(l) = &last {
            w -= l * inner(l, &w);
        }
        for e in &frame {
            w -= e * inner(e, &w);
        }
        let n = inner(&w, &w).max(0.0).sqrt();
        if n <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
            if last.is_some() {
                // the seed vector lies along the distinguished direction
                continue;
            }
            return Err(GeoError::Rank("seed vectors are linearly dependent".into()));
        }
        frame.push(w / n);
    }
    if frame.len() < wanted {
        return Err(GeoError::Rank(format!("seed spans only {} of {} directions", frame.len(), wanted)));
    }
    if let Some(l) = last {
        frame.push(l);
    }
    Ok(frame)
}

/// Standard basis of R^m.
pub fn standard_basis(m: usize) -> Vec<DVector<f64>> {
    (0..m)
        .map(|i| {
            let mut v = DVector::zeros(m);
            v[i] = 1.0;
            v
        })
        .collect()
}

/// Contracts each listed pair of slots of `t` against `gram`.
pub fn contract_with_metric(t: &DenseTensor, gram: &DMatrix<f64>, slot_pairs: &[(usize, usize)]) -> Result<DenseTensor> {
    let rank = t.rank();
    let mut used = vec![false; rank];
    for &(a, b) in slot_pairs {
        if a >= rank || b >= rank || a == b || used[a] || used[b] {
            return Err(GeoError::Shape(format!("invalid slot pair ({a}, {b}) for rank {rank}")));
        }
        used[a] = true;
        used[b] = true;
        let (ea, eb) = (t.shape()[a], t.shape()[b]);
        if ea != eb || ea != gram.nrows() || gram.ncols() != gram.nrows() {
            return Err(GeoError::Shape(format!(
                "slots {a},{b} have extents {ea},{eb}; gram is {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
    }
    let free: Vec<usize> = (0..rank).filter(|s| !used[*s]).collect();
    let out_shape: Vec<usize> = free.iter().map(|&s| t.shape()[s]).collect();
    let mut out = DenseTensor::zeros(&out_shape);
    let mut out_index = vec![0; free.len()];
    for (idx, &value) in t.indices().zip(t.data()) {
        if value == 0.0 {
            continue;
        }
        let weight: f64 = slot_pairs.iter().map(|&(a, b)| gram[(idx[a], idx[b])]).product();
        for (k, &s) in free.iter().enumerate() {
            out_index[k] = idx[s];
        }
        out.add_at(&out_index, weight * value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn derivative_of_bilinear_field_is_exact() {
        let field = |x: &[f64]| Ok(DenseTensor::scalar(x[0] * x[1]));
        for order in [FdOrder::Second, FdOrder::Fourth] {
            let scheme = FdScheme::new(1e-3, order, false).unwrap();
            let d = finite_difference_derivative(&field, &[1.0, 2.0], &scheme).unwrap();
            assert_eq!(d.shape(), &[2]);
            assert!(approx(d.data()[0], 2.0, 1e-10));
            assert!(approx(d.data()[1], 1.0, 1e-10));
        }
    }

    #[test]
    fn derivative_of_constant_field_is_zero() {
        let c = DenseTensor::from_vec(&[2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let field = move |_: &[f64]| Ok(c.clone());
        let d = finite_difference_derivative(&field, &[0.3, -0.2, 5.0], &FdScheme::default()).unwrap();
        assert_eq!(d.shape(), &[3, 2, 2]);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn derivative_of_sine_matches_cosine() {
        let field = |x: &[f64]| Ok(DenseTensor::scalar(x[0].sin()));
        let scheme = FdScheme::new(1e-4, FdOrder::Fourth, false).unwrap();
        let d = finite_difference_derivative(&field, &[0.3], &scheme).unwrap();
        assert!(approx(d.data()[0], 0.3f64.cos(), 1e-8));
    }

    #[test]
    fn richardson_improves_second_order() {
        let field = |x: &[f64]| Ok(DenseTensor::scalar(x[0].exp()));
        let plain = FdScheme::new(1e-2, FdOrder::Second, false).unwrap();
        let rich = FdScheme::new(1e-2, FdOrder::Second, true).unwrap();
        let exact = 0.7f64.exp();
        let e_plain = (finite_difference_derivative(&field, &[0.7], &plain).unwrap().data()[0] - exact).abs();
        let e_rich = (finite_difference_derivative(&field, &[0.7], &rich).unwrap().data()[0] - exact).abs();
        assert!(e_rich < 1e-3 * e_plain, "{e_rich} vs {e_plain}");
    }

    #[test]
    fn fourth_order_exact_on_quartic() {
        let field = |x: &[f64]| Ok(DenseTensor::scalar(x[0].powi(4) - 3.0 * x[0] * x[1].powi(3)));
        let p = [1.3, -0.7];
        let d = finite_difference_derivative(&field, &p, &FdScheme::new(1e-2, FdOrder::Fourth, false).unwrap()).unwrap();
        let dx = 4.0 * p[0].powi(3) - 3.0 * p[1].powi(3);
        let dy = -9.0 * p[0] * p[1].powi(2);
        assert!(((d.data()[0] - dx) / dx).abs() < 1e-10);
        assert!(((d.data()[1] - dy) / dy).abs() < 1e-10);
    }

    #[test]
    fn stencil_errors_propagate() {
        let field = |x: &[f64]| {
            if x[0] > 1.0 {
                Err(GeoError::Domain("x > 1".into()))
            } else {
                Ok(DenseTensor::scalar(x[0]))
            }
        };
        let r = finite_difference_derivative(&field, &[1.0], &FdScheme::default());
        assert!(matches!(r, Err(GeoError::Domain(_))));
        let nan = |_: &[f64]| Ok(DenseTensor::scalar(f64::NAN));
        assert!(matches!(
            finite_difference_derivative(&nan, &[0.0], &FdScheme::default()),
            Err(GeoError::Numeric(_))
        ));
    }

    #[test]
    fn frame_identity_and_diagonal() {
        let id = DMatrix::identity(2, 2);
        let f = gram_schmidt_frame(&id, &standard_basis(2), None).unwrap();
        assert_eq!(f, standard_basis(2));

        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let f = gram_schmidt_frame(&g, &standard_basis(2), None).unwrap();
        assert!(approx(f[0][0], 0.5, 1e-15) && approx(f[0][1], 0.0, 1e-15));
        assert!(approx(f[1][0], 0.0, 1e-15) && approx(f[1][1], 1.0, 1e-15));
    }

    #[test]
    fn frame_with_distinguished_last() {
        let id = DMatrix::identity(3, 3);
        let d = DVector::from_vec(vec![0.0, 0.0, 2.0]);
        let f = gram_schmidt_frame(&id, &standard_basis(3), Some(&d)).unwrap();
        assert_eq!(f.len(), 3);
        assert!((&f[2] - DVector::from_vec(vec![0.0, 0.0, 1.0])).amax() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let ip = f[i].dot(&f[j]);
                assert!(approx(ip, if i == j { 1.0 } else { 0.0 }, 1e-12));
            }
        }
        assert!(f[0][2].abs() < 1e-15 && f[1][2].abs() < 1e-15);
    }

    #[test]
    fn frame_errors() {
        let not_pd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(gram_schmidt_frame(&not_pd, &standard_basis(2), None), Err(GeoError::Geometry(_))));
        let id = DMatrix::identity(2, 2);
        let dep = vec![DVector::from_vec(vec![1.0, 1.0]), DVector::from_vec(vec![2.0, 2.0])];
        assert!(matches!(gram_schmidt_frame(&id, &dep, None), Err(GeoError::Rank(_))));
        let zero = DVector::zeros(2);
        assert!(matches!(gram_schmidt_frame(&id, &standard_basis(2), Some(&zero)), Err(GeoError::Rank(_))));
    }

    #[test]
    fn contraction_examples() {
        let id = DMatrix::identity(2, 2);
        let pair = |a: [f64; 2], b: [f64; 2]| {
            let mut t = DenseTensor::zeros(&[2, 2]);
            for i in 0..2 {
                for j in 0..2 {
                    t.set(&[i, j], a[i] * b[j]);
                }
            }
            t
        };
        let c = contract_with_metric(&pair([1.0, 0.0], [0.0, 1.0]), &id, &[(0, 1)]).unwrap();
        assert_eq!(c.shape(), &[] as &[usize]);
        assert_eq!(c.data()[0], 0.0);
        let c = contract_with_metric(&pair([1.0, 2.0], [3.0, 4.0]), &id, &[(0, 1)]).unwrap();
        assert_eq!(c.data()[0], 11.0);
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![9.0, 9.0]));
        let c = contract_with_metric(&pair([1.0, 0.0], [1.0, 0.0]), &g, &[(0, 1)]).unwrap();
        assert_eq!(c.data()[0], 9.0);
    }

    #[test]
    fn contraction_keeps_free_slots_and_checks_shapes() {
        // t_{ijk} = i + 10 j + 100 k, contract slots (0, 2)
        let mut t = DenseTensor::zeros(&[2, 3, 2]);
        for idx in t.indices().collect::<Vec<_>>() {
            t.set(&idx, (idx[0] + 10 * idx[1] + 100 * idx[2]) as f64);
        }
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let c = contract_with_metric(&t, &g, &[(0, 2)]).unwrap();
        assert_eq!(c.shape(), &[3]);
        for j in 0..3 {
            let mut expect = 0.0;
            for i in 0..2 {
                for k in 0..2 {
                    expect += g[(i, k)] * t.get(&[i, j, k]);
                }
            }
            assert_eq!(c.get(&[j]), expect);
        }
        assert!(matches!(contract_with_metric(&t, &g, &[(0, 1)]), Err(GeoError::Shape(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn spd(vals: &[f64]) -> DMatrix<f64> {
            let a = DMatrix::from_row_slice(3, 3, vals);
            &a * a.transpose() + DMatrix::identity(3, 3) * 0.5
        }

        proptest! {
            #[test]
            fn frame_is_orthonormal(vals in prop::collection::vec(-1.0f64..1.0, 9)) {
                let g = spd(&vals);
                let f = gram_schmidt_frame(&g, &standard_basis(3), None).unwrap();
                let fm = DMatrix::from_columns(&f);
                let id = fm.transpose() * &g * fm;
                prop_assert!((id - DMatrix::identity(3, 3)).amax() < 1e-10);
            }

            #[test]
            fn contraction_bilinear_symmetric(
                vals in prop::collection::vec(-1.0f64..1.0, 9),
                a in prop::collection::vec(-2.0f64..2.0, 3),
                b in prop::collection::vec(-2.0f64..2.0, 3),
                s in -3.0f64..3.0,
            ) {
                let g = spd(&vals);
                let outer = |x: &[f64], y: &[f64]| {
                    let mut t = DenseTensor::zeros(&[3, 3]);
                    for i in 0..3 { for j in 0..3 { t.set(&[i, j], x[i] * y[j]); } }
                    t
                };
                let ab = contract_with_metric(&outer(&a, &b), &g, &[(0, 1)]).unwrap().data()[0];
                let ba = contract_with_metric(&outer(&b, &a), &g, &[(0, 1)]).unwrap().data()[0];
                prop_assert!((ab - ba).abs() < 1e-12);
                let sa: Vec<f64> = a.iter().map(|v| v * s).collect();
                let sab = contract_with_metric(&outer(&sa, &b), &g, &[(0, 1)]).unwrap().data()[0];
                prop_assert!((sab - s * ab).abs() < 1e-11);
            }
        }
    }
}

//! Interface-value reconstruction and recovery of the in-cell polynomial.
//!
//! A cell expansion is
//!
//! ```text
//! W(xi) = mean + D1 phi1(xi) + D2 phi2(xi) + D3 phi3(xi) + D4 phi4(xi),
//! phi1 = xi, phi2 = (xi^2 - 1/12) / 2, phi3 = xi^3 / 6, phi4 = (xi^4 - 1/80) / 24,
//! ```
//!
//! with `xi = (x - x_j) / dx` in `[-1/2, 1/2]`. Every `phi_k` has zero cell
//! mean, and `D_k` is the scaled derivative `dx^k d^kW/dx^k`. The
//! coefficients follow from the two interface values plus the averages of
//! the neighbouring cells (fifth order only).

use crate::physics::ConservedVector;

/// Regularization of the fifth-order Jiang-Shu weights.
pub const WENO_EPSILON: f64 = 1e-6;

/// Regularization of the third-order weights, `dx^2`. A fixed small
/// constant leaves the third-order scheme far from its asymptotic regime at
/// practical resolutions.
pub fn weno3_epsilon(dx: f64) -> f64 {
    dx * dx
}

/// Space-time order of an HFVS variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Two,
    Three,
    Five,
}

impl Order {
    /// Number of derivative coefficients carried by a cell expansion.
    pub fn derivative_terms(self) -> usize {
        match self {
            Order::Two => 1,
            Order::Three => 2,
            Order::Five => 4,
        }
    }

    /// Half-width of the reconstruction stencil.
    pub fn radius(self) -> usize {
        match self {
            Order::Two | Order::Three => 1,
            Order::Five => 2,
        }
    }

    pub fn ghost_width(self) -> usize {
        self.radius() + 1
    }

    pub fn as_number(self) -> usize {
        match self {
            Order::Two => 2,
            Order::Three => 3,
            Order::Five => 5,
        }
    }

    pub fn from_number(n: usize) -> Option<Self> {
        match n {
            2 => Some(Order::Two),
            3 => Some(Order::Three),
            5 => Some(Order::Five),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WenoOrder {
    Three,
    Five,
}

impl WenoOrder {
    pub fn radius(self) -> usize {
        match self {
            WenoOrder::Three => 1,
            WenoOrder::Five => 2,
        }
    }
}

/// Cell averages `j-r ..= j+r` around the cell being reconstructed.
#[derive(Debug, Clone, Copy)]
pub struct StencilWindow<'a, const M: usize> {
    cells: &'a [ConservedVector<M>],
    cell_width: f64,
}

impl<'a, const M: usize> StencilWindow<'a, M> {
    /// # Panics
    /// If the window length is even.
    pub fn new(cells: &'a [ConservedVector<M>], cell_width: f64) -> Self {
        assert!(cells.len() % 2 == 1, "stencil window must have odd length");
        Self { cells, cell_width }
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn radius(&self) -> usize {
        self.cells.len() / 2
    }

    /// Cell average at `offset` from the centre cell.
    #[inline]
    pub fn at(&self, offset: isize) -> &ConservedVector<M> {
        &self.cells[(self.radius() as isize + offset) as usize]
    }

    pub fn center(&self) -> &ConservedVector<M> {
        self.at(0)
    }

    fn component<const L: usize>(&self, radius: usize, comp: usize) -> [f64; L] {
        debug_assert_eq!(L, 2 * radius + 1);
        assert!(self.radius() >= radius, "stencil window too narrow");
        std::array::from_fn(|i| self.at(i as isize - radius as isize)[comp])
    }
}

/// One-sided limits at the two faces of a cell, taken from inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceValues<const M: usize> {
    /// Value at `x_{j-1/2}`.
    pub minus: ConservedVector<M>,
    /// Value at `x_{j+1/2}`.
    pub plus: ConservedVector<M>,
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// Jiang-Shu weights of the two candidate stencils `{j-1, j}` and
/// `{j, j+1}` for the value at `x_{j+1/2}`.
pub fn weno3_weights(v: [f64; 3], epsilon: f64) -> [f64; 2] {
    let b0 = sq(v[1] - v[0]);
    let b1 = sq(v[2] - v[1]);
    let a0 = (1.0 / 3.0) / sq(epsilon + b0);
    let a1 = (2.0 / 3.0) / sq(epsilon + b1);
    let s = a0 + a1;
    [a0 / s, a1 / s]
}

/// Third-order WENO value at `x_{j+1/2}` from `[v_{j-1}, v_j, v_{j+1}]`.
pub fn weno3_face(v: [f64; 3], epsilon: f64) -> f64 {
    weno3_combine(v, weno3_weights(v, epsilon))
}

fn weno3_combine(v: [f64; 3], [w0, w1]: [f64; 2]) -> f64 {
    let q0 = 0.5 * (3.0 * v[1] - v[0]);
    let q1 = 0.5 * (v[1] + v[2]);
    w0 * q0 + w1 * q1
}

/// Jiang-Shu weights of the three candidate stencils for the value at
/// `x_{j+1/2}` from `[v_{j-2}, ..., v_{j+2}]`.
pub fn weno5_weights(v: [f64; 5]) -> [f64; 3] {
    let b0 = 13.0 / 12.0 * sq(v[0] - 2.0 * v[1] + v[2]) + 0.25 * sq(v[0] - 4.0 * v[1] + 3.0 * v[2]);
    let b1 = 13.0 / 12.0 * sq(v[1] - 2.0 * v[2] + v[3]) + 0.25 * sq(v[1] - v[3]);
    let b2 = 13.0 / 12.0 * sq(v[2] - 2.0 * v[3] + v[4]) + 0.25 * sq(3.0 * v[2] - 4.0 * v[3] + v[4]);
    let a0 = 0.1 / sq(WENO_EPSILON + b0);
    let a1 = 0.6 / sq(WENO_EPSILON + b1);
    let a2 = 0.3 / sq(WENO_EPSILON + b2);
    let s = a0 + a1 + a2;
    [a0 / s, a1 / s, a2 / s]
}

/// Fifth-order WENO value at `x_{j+1/2}` from `[v_{j-2}, ..., v_{j+2}]`.
pub fn weno5_face(v: [f64; 5]) -> f64 {
    weno5_combine(v, weno5_weights(v))
}

fn weno5_combine(v: [f64; 5], [w0, w1, w2]: [f64; 3]) -> f64 {
    let q0 = (2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0;
    let q1 = (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0;
    let q2 = (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0;
    w0 * q0 + w1 * q1 + w2 * q2
}

#[inline]
fn reversed<const L: usize>(mut v: [f64; L]) -> [f64; L] {
    v.reverse();
    v
}

/// Component-wise WENO limits at both faces of the centre cell. The value at
/// `x_{j-1/2}` is the mirror image of the `x_{j+1/2}` construction.
pub fn weno_interface_values<const M: usize>(
    window: &StencilWindow<'_, M>,
    order: WenoOrder,
) -> InterfaceValues<M> {
    weighted_interface_values(window, order, FaceWeights::Nonlinear)
}

/// How the WENO candidate stencils are blended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FaceWeights {
    /// Jiang-Shu smoothness weights.
    #[default]
    Nonlinear,
    /// The ideal weights: faces are exact for polynomials of degree `2r` but
    /// oscillate at discontinuities. For verification on smooth data.
    Linear,
}

pub fn weighted_interface_values<const M: usize>(
    window: &StencilWindow<'_, M>,
    order: WenoOrder,
    weights: FaceWeights,
) -> InterfaceValues<M> {
    let mut minus = ConservedVector::<M>::zeros();
    let mut plus = ConservedVector::<M>::zeros();
    let eps3 = weno3_epsilon(window.cell_width());
    let linear = weights == FaceWeights::Linear;
    for c in 0..M {
        match order {
            WenoOrder::Three => {
                let v = window.component::<3>(1, c);
                let face = |v: [f64; 3]| {
                    let w = if linear { [1.0 / 3.0, 2.0 / 3.0] } else { weno3_weights(v, eps3) };
                    weno3_combine(v, w)
                };
                plus[c] = face(v);
                minus[c] = face(reversed(v));
            }
            WenoOrder::Five => {
                let v = window.component::<5>(2, c);
                let face = |v: [f64; 5]| {
                    let w = if linear { [0.1, 0.6, 0.3] } else { weno5_weights(v) };
                    weno5_combine(v, w)
                };
                plus[c] = face(v);
                minus[c] = face(reversed(v));
            }
        }
    }
    InterfaceValues { minus, plus }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Minmod-limited piecewise-linear (MUSCL) face values.
pub fn second_order_interface_values<const M: usize>(
    window: &StencilWindow<'_, M>,
) -> InterfaceValues<M> {
    let (l, c, r) = (window.at(-1), window.at(0), window.at(1));
    let slope = ConservedVector::<M>::from_fn(|i, _| minmod(c[i] - l[i], r[i] - c[i]));
    InterfaceValues { minus: c - slope * 0.5, plus: c + slope * 0.5 }
}

/// In-cell polynomial: cell mean, face limits and scaled derivative
/// coefficients `D_1 ..= D_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellExpansion<const M: usize> {
    pub order: Order,
    pub mean: ConservedVector<M>,
    /// Limit at `x_{j-1/2}` from inside the cell.
    pub w_left: ConservedVector<M>,
    /// Limit at `x_{j+1/2}` from inside the cell.
    pub w_right: ConservedVector<M>,
    /// `D_k` at index `k - 1`; entries beyond `order.derivative_terms()` are zero.
    pub coefficients: [ConservedVector<M>; 4],
}

/// `phi_k(xi)` for `k = 1..=4`.
pub fn basis(k: usize, xi: f64) -> f64 {
    match k {
        1 => xi,
        2 => 0.5 * (xi * xi - 1.0 / 12.0),
        3 => xi * xi * xi / 6.0,
        4 => (xi * xi * xi * xi - 1.0 / 80.0) / 24.0,
        _ => panic!("basis function {k} is not defined"),
    }
}

const INV_FACTORIAL: [f64; 4] = [1.0, 1.0, 0.5, 1.0 / 6.0];

/// Which face of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Left,
    Right,
}

impl Face {
    fn xi(self) -> f64 {
        match self {
            Face::Left => -0.5,
            Face::Right => 0.5,
        }
    }
}

impl<const M: usize> CellExpansion<M> {
    /// First-order expansion: the cell average everywhere.
    pub fn constant(order: Order, mean: ConservedVector<M>) -> Self {
        Self {
            order,
            mean,
            w_left: mean,
            w_right: mean,
            coefficients: [ConservedVector::zeros(); 4],
        }
    }

    pub fn derivative_terms(&self) -> usize {
        self.order.derivative_terms()
    }

    pub fn limit(&self, face: Face) -> &ConservedVector<M> {
        match face {
            Face::Left => &self.w_left,
            Face::Right => &self.w_right,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients[..self.derivative_terms()].iter().all(|d| d.iter().all(|&x| x == 0.0))
    }

    pub fn eval(&self, xi: f64) -> ConservedVector<M> {
        let mut w = self.mean;
        for k in 1..=self.derivative_terms() {
            w += self.coefficients[k - 1] * basis(k, xi);
        }
        w
    }

    /// Scaled derivatives `dx^k d^kW/dx^k`, `k = 1..=N`, of the expansion
    /// evaluated at `face`. Entry `k - 1` holds order `k`.
    pub fn face_derivatives(&self, face: Face) -> [ConservedVector<M>; 4] {
        let n = self.derivative_terms();
        let xi = face.xi();
        let mut out = [ConservedVector::zeros(); 4];
        // d^k phi_m / dxi^k = xi^(m-k) / (m-k)!
        for (k, slot) in out.iter_mut().enumerate().take(n) {
            let mut power = 1.0;
            for m in k..n {
                *slot += self.coefficients[m] * (power * INV_FACTORIAL[m - k]);
                power *= xi;
            }
        }
        out
    }
}

/// Closed-form solution of the face-value / cell-average moment system.
///
/// * order 2: `D1 = W+ - W-`
/// * order 3: `D1 = W+ - W-`, `D2 = 6 (W+ + W- - 2 W_j)`
/// * order 5, with `a = W+ - W-`, `b = W_{j+1} - W_{j-1}`,
///   `c = W+ + W- - 2 W_j`, `d = W_{j+1} + W_{j-1} - 2 W_j`:
///   `D1 = (10a - b) / 8`, `D2 = (30c - d) / 4`, `D3 = 3b - 6a`,
///   `D4 = 10d - 60c`.
pub fn recover_derivatives<const M: usize>(
    order: Order,
    window: &StencilWindow<'_, M>,
    w_minus: &ConservedVector<M>,
    w_plus: &ConservedVector<M>,
) -> CellExpansion<M> {
    let mean = *window.center();
    let mut coefficients = [ConservedVector::<M>::zeros(); 4];
    match order {
        Order::Two => {
            coefficients[0] = w_plus - w_minus;
        }
        Order::Three => {
            coefficients[0] = w_plus - w_minus;
            coefficients[1] = (w_plus + w_minus - mean * 2.0) * 6.0;
        }
        Order::Five => {
            let (left, right) = (window.at(-1), window.at(1));
            let a = w_plus - w_minus;
            let b = right - left;
            let c = w_plus + w_minus - mean * 2.0;
            let d = right + left - mean * 2.0;
            coefficients[0] = (a * 10.0 - b) / 8.0;
            coefficients[1] = (c * 30.0 - d) / 4.0;
            coefficients[2] = b * 3.0 - a * 6.0;
            coefficients[3] = d * 10.0 - c * 60.0;
        }
    }
    CellExpansion { order, mean, w_left: *w_minus, w_right: *w_plus, coefficients }
}

/// Face values for `order`: WENO3 for orders 2 and 3, WENO5 for order 5.
/// Order 2 keeps only the slope `W+ - W-` of the WENO3 faces; minmod faces
/// clip smooth extrema and cost the scheme its second order in max norm.
pub fn interface_values<const M: usize>(
    order: Order,
    window: &StencilWindow<'_, M>,
    weights: FaceWeights,
) -> InterfaceValues<M> {
    match order {
        Order::Two | Order::Three => weighted_interface_values(window, WenoOrder::Three, weights),
        Order::Five => weighted_interface_values(window, WenoOrder::Five, weights),
    }
}

/// Face values followed by derivative recovery.
#[inline(always)]
pub fn reconstruct_cell<const M: usize>(
    order: Order,
    window: &StencilWindow<'_, M>,
) -> CellExpansion<M> {
    reconstruct_cell_with(order, window, FaceWeights::Nonlinear)
}

#[inline(always)]
pub fn reconstruct_cell_with<const M: usize>(
    order: Order,
    window: &StencilWindow<'_, M>,
    weights: FaceWeights,
) -> CellExpansion<M> {
    let faces = interface_values(order, window, weights);
    recover_derivatives(order, window, &faces.minus, &faces.plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SVector;

    fn scalars(v: &[f64]) -> Vec<ConservedVector<1>> {
        v.iter().map(|&x| SVector::from([x])).collect()
    }

    #[test]
    fn constant_window_is_reproduced() {
        let data = scalars(&[2.5; 5]);
        let w = StencilWindow::new(&data, 1.0);
        for order in [WenoOrder::Three, WenoOrder::Five] {
            let f = weno_interface_values(&w, order);
            assert_eq!(f.minus[0], 2.5);
            assert_eq!(f.plus[0], 2.5);
        }
        let f = second_order_interface_values(&StencilWindow::new(&data[1..4], 1.0));
        assert_eq!((f.minus[0], f.plus[0]), (2.5, 2.5));
        for order in [Order::Two, Order::Three, Order::Five] {
            let e = reconstruct_cell(order, &w);
            assert!(e.is_constant(), "{order:?}");
        }
    }

    #[test]
    fn linear_cell_averages_give_exact_faces() {
        // Cell averages of x on unit cells centred at 0..5 are the centres.
        let data = scalars(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let w = StencilWindow::new(&data, 1.0);
        for order in [WenoOrder::Three, WenoOrder::Five] {
            let f = weno_interface_values(&w, order);
            assert!((f.minus[0] - 1.5).abs() < 1e-12);
            assert!((f.plus[0] - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn minmod_examples() {
        let data = scalars(&[0.0, 1.0, 2.0]);
        let f = second_order_interface_values(&StencilWindow::new(&data, 1.0));
        assert_eq!((f.minus[0], f.plus[0]), (0.5, 1.5));
        let data = scalars(&[0.0, 1.0, 0.0]);
        let f = second_order_interface_values(&StencilWindow::new(&data, 1.0));
        assert_eq!((f.minus[0], f.plus[0]), (1.0, 1.0));
    }

    #[test]
    fn second_order_unit_jump() {
        let data = scalars(&[0.5; 3]);
        let e = recover_derivatives(
            Order::Two,
            &StencilWindow::new(&data, 1.0),
            &SVector::from([0.0]),
            &SVector::from([1.0]),
        );
        assert_eq!(e.coefficients[0][0], 1.0);
    }

    #[test]
    fn expansion_evaluation() {
        let mut e = CellExpansion::constant(Order::Five, SVector::from([3.0]));
        assert_eq!(e.eval(0.3)[0], 3.0);
        e.coefficients[1] = SVector::from([1.0]);
        assert!((e.eval(0.0)[0] - (3.0 - 1.0 / 24.0)).abs() < 1e-15);
    }

    #[test]
    fn weno_weights_form_a_partition_of_unity() {
        let w = weno5_weights([1.0, -3.0, 0.2, 7.0, 7.1]);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let w = weno3_weights([1.0, -3.0, 0.2], 1e-6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discontinuity_biases_weights_to_smooth_side() {
        let w = weno5_weights([0.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(w[0] > 0.99);
    }

    #[test]
    fn linear_weights_are_exact_for_quartics() {
        // Averages of x^4 over unit cells centred at -2..=2.
        let avg = |m: f64| ((m + 0.5).powi(5) - (m - 0.5).powi(5)) / 5.0;
        let data: Vec<_> = (-2..=2).map(|k| ConservedVector::<1>::from([avg(k as f64)])).collect();
        let w = StencilWindow::new(&data, 1.0);
        let f = weighted_interface_values(&w, WenoOrder::Five, FaceWeights::Linear);
        assert!((f.plus[0] - 0.0625).abs() < 1e-14);
        assert!((f.minus[0] - 0.0625).abs() < 1e-14);
        let g = weighted_interface_values(&w, WenoOrder::Five, FaceWeights::Nonlinear);
        assert!((g.plus[0] - 0.0625).abs() > 1e-6);
    }
}

//! Adaptive Gauss-Kronrod (7/15) integration on smooth pieces.

use crate::scalar::Scalar;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_3,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_DEPTH: u32 = 48;

/// One 15-point Kronrod estimate and the embedded 7-point Gauss estimate.
fn gauss_kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut kronrod = T::zero();
    let mut gauss = T::zero();
    for (idx, (&node, &weight)) in KRONROD_NODES.iter().zip(KRONROD_WEIGHTS.iter()).enumerate() {
        let fx = if node == 0.0 {
            f(mid)
        } else {
            let dx = half * T::lit(node);
            f(mid - dx) + f(mid + dx)
        };
        kronrod = kronrod + T::lit(weight) * fx;
        if idx % 2 == 1 {
            gauss = gauss + T::lit(GAUSS_WEIGHTS[idx / 2]) * fx;
        }
    }
    (kronrod * half, gauss * half)
}

fn adapt<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T, whole: T, tol: T, depth: u32) -> T {
    let mid = (a + b) * T::lit(0.5);
    let (left, left_gauss) = gauss_kronrod(f, a, mid);
    let (right, right_gauss) = gauss_kronrod(f, mid, b);
    let refined = left + right;
    let err = (left - left_gauss).abs() + (right - right_gauss).abs();
    if depth >= MAX_DEPTH || err <= tol || (refined - whole).abs() <= tol * T::lit(1e-3) || mid <= a || mid >= b {
        return refined;
    }
    let half_tol = tol * T::lit(0.5);
    adapt(f, a, mid, left, half_tol, depth + 1) + adapt(f, mid, b, right, half_tol, depth + 1)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. The integrand
/// must be smooth in the interior; integrable endpoint singularities are
/// handled by bisection towards the endpoint.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> T {
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return T::zero();
    }
    let (whole, gauss) = gauss_kronrod(&f, a, b);
    if (whole - gauss).abs() <= tol * T::lit(1e-3) {
        return whole;
    }
    adapt(&f, a, b, whole, tol, 0)
}

/// Integrates `f` over consecutive intervals given by sorted `edges`, never
/// crossing an edge.
pub fn integrate_pieces<T: Scalar, F: Fn(T) -> T>(f: F, edges: &[T], tol: T) -> T {
    let count = edges.len().saturating_sub(1).max(1);
    let per_piece = tol / T::from_count(count);
    edges.windows(2).map(|w| integrate(&f, w[0], w[1], per_piece)).fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // x^{-1/2} on (0, 1]
        let v = integrate(|x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-7, "{v}");
        // x * x^{-2/3}
        let v = integrate(|x: f64| x * x.powf(-2.0 / 3.0), 0.0, 1.0, 1e-10);
        assert!((v - 0.75).abs() < 1e-9, "{v}");
    }

    #[test]
    fn piecewise_kink() {
        let v = integrate_pieces(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], 1e-12);
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, 1e-9), 0.0);
    }
}

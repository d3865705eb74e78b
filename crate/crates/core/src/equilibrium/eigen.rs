//! Eigenvalues of small real matrices from their characteristic polynomials.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

pub type Matrix3 = [[f64; 3]; 3];

/// Imaginary parts below this are treated as real when classifying.
pub const IMAG_TOLERANCE: f64 = 1e-8;
/// Real parts within this of zero are marginal.
pub const MARGINAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    /// All eigenvalues real and negative.
    StableSink,
    /// Negative real parts with a complex pair.
    StableSpiral,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::StableSink => "stable-sink",
            Stability::StableSpiral => "stable-spiral",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_stability(eigenvalues: &[Complex64]) -> Stability {
    let max_re = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re > MARGINAL_TOLERANCE {
        Stability::Unstable
    } else if max_re >= -MARGINAL_TOLERANCE {
        Stability::Marginal
    } else if eigenvalues.iter().all(|z| z.im.abs() < IMAG_TOLERANCE) {
        Stability::StableSink
    } else {
        Stability::StableSpiral
    }
}

/// Roots of `x^2 + b x + c`, larger real part first.
pub fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        // Avoid cancellation: take the root with the larger magnitude first.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn polish_cubic_root(a: f64, b: f64, c: f64, mut x: f64) -> f64 {
    for _ in 0..3 {
        let f = ((x + a) * x + b) * x + c;
        let df = (3.0 * x + 2.0 * a) * x + b;
        if df == 0.0 {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() {
            break;
        }
        x = next;
    }
    x
}

/// Roots of the monic cubic `x^3 + a x^2 + b x + c`.
///
/// Three real roots use the trigonometric form; otherwise one real root
/// comes from Cardano's formula and the pair from the deflated quadratic.
pub fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let real_root = if disc <= 0.0 && p < 0.0 {
        let m = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, r) in roots.iter_mut().enumerate() {
            *r = polish_cubic_root(a, b, c, m * (theta - 2.0 * PI * k as f64 / 3.0).cos() - shift);
        }
        roots.sort_by(|x, y| y.total_cmp(x));
        return roots.map(|r| Complex64::new(r, 0.0));
    } else {
        let s = disc.max(0.0).sqrt();
        let t = (-half_q + s).cbrt() + (-half_q - s).cbrt();
        polish_cubic_root(a, b, c, t - shift)
    };

    // x^3 + a x^2 + b x + c = (x - r)(x^2 + beta x + gamma)
    let beta = a + real_root;
    let gamma = b + real_root * beta;
    let [z1, z2] = quadratic_roots(beta, gamma);
    [Complex64::new(real_root, 0.0), z1, z2]
}

/// Eigenvalues of a 2x2 matrix.
pub fn eigenvalues2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let trace = m[0][0] + m[1][1];
    let half_gap = 0.5 * (m[0][0] - m[1][1]);
    // Discriminant written as gap^2 + bc keeps near-degenerate blocks accurate.
    let disc = half_gap * half_gap + m[0][1] * m[1][0];
    let mid = 0.5 * trace;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [Complex64::new(mid + s, 0.0), Complex64::new(mid - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(mid, s), Complex64::new(mid, -s)]
    }
}

/// Eigenvalues of a 3x3 matrix.
///
/// When the last row decouples (zero off-diagonal entries, as for the cook
/// equation) the spectrum is the corner entry plus the leading 2x2 block;
/// otherwise the characteristic cubic is solved in closed form.
pub fn eigenvalues3(m: &Matrix3) -> [Complex64; 3] {
    if m[2][0] == 0.0 && m[2][1] == 0.0 {
        let [z1, z2] = eigenvalues2([[m[0][0], m[0][1]], [m[1][0], m[1][1]]]);
        return [z1, z2, Complex64::new(m[2][2], 0.0)];
    }
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2]
        - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    cubic_roots(-trace, minors, -det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted_re(z: &[Complex64]) -> Vec<f64> {
        let mut v: Vec<f64> = z.iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonal_matrix_is_a_sink() {
        let m = [[-1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -3.0]];
        let eig = eigenvalues3(&m);
        assert_eq!(sorted_re(&eig), vec![-3.0, -2.0, -1.0]);
        assert_eq!(classify_stability(&eig), Stability::StableSink);
    }

    #[test]
    fn positive_eigenvalue_is_unstable() {
        let m = [[1.0, 2.0, 0.5], [0.0, -2.0, 1.0], [0.3, 0.0, -3.0]];
        let eig = eigenvalues3(&m);
        assert!(eig.iter().any(|z| z.re > 0.0));
        assert_eq!(classify_stability(&eig), Stability::Unstable);
    }

    #[test]
    fn rotation_block_is_a_spiral() {
        let m = [[-1.0, 2.0, 0.1], [-2.0, -1.0, 0.0], [0.2, 0.0, -4.0]];
        let eig = eigenvalues3(&m);
        assert_eq!(classify_stability(&eig), Stability::StableSpiral);
        let zero = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]];
        assert_eq!(classify_stability(&eigenvalues3(&zero)), Stability::Marginal);
    }

    #[test]
    fn cubic_with_known_roots() {
        // (x - 1)(x + 2)(x + 5) = x^3 + 6x^2 + 3x - 10
        let r = cubic_roots(6.0, 3.0, -10.0);
        let re = sorted_re(&r);
        assert_abs_diff_eq!(re[0], -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], 1.0, epsilon = 1e-12);
        assert!(r.iter().all(|z| z.im == 0.0));

        // (x + 1)(x^2 + 2x + 5): roots -1, -1 +- 2i
        let r = cubic_roots(3.0, 7.0, 5.0);
        assert_abs_diff_eq!(r[0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].im.abs(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn general_path_matches_block_path() {
        let coupled = [[-1.2, 0.3, 0.0], [0.4, -0.9, 0.1], [1e-300, 0.0, -1.0]];
        let mut decoupled = coupled;
        decoupled[2][0] = 0.0;
        let a = sorted_re(&eigenvalues3(&coupled));
        let b = sorted_re(&eigenvalues3(&decoupled));
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}

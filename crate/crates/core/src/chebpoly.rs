//! Chebyshev series of the first kind on `τ ∈ [-1, 1]`.
//!
//! Everything the functional iteration needs stays closed-form in this basis:
//! products linearize through `F_i F_j = ½(F_{i+j} + F_{|i-j|})`, and the
//! antiderivative of a series is again a series one degree higher.
//!
//! Degrees are structural. A product of a degree-`p` and a degree-`q` series
//! always stores `p + q + 1` coefficients, even if the tail is numerically
//! tiny; [`ChebSeries::trimmed`] and [`ChebSeries3::truncate`] are the only
//! operations that shorten a series.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Slack allowed beyond `|τ| = 1` before an evaluation is rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Default absolute threshold used by [`ChebSeries::trimmed`].
pub const TRIM_TOL: f64 = 1e-14;

fn check_tau(tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            what: "tau must lie in [-1, 1]",
            value: tau,
        });
    }
    Ok(tau.clamp(-1.0, 1.0))
}

/// `F_i(x)` through the three-term recurrence.
pub fn basis_value(i: usize, x: f64) -> f64 {
    match i {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..i {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `count` Chebyshev–Lobatto points `cos(kπ/(count-1))`, endpoints included,
/// ordered from `-1` to `1`.
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let m = (count - 1) as f64;
            (0..count)
                .map(|k| -(std::f64::consts::PI * k as f64 / m).cos())
                .collect()
        }
    }
}

fn antiderivative_value(i: usize, x: f64) -> f64 {
    // ∫F_i = (i F_{i+1}(x) − (i+1) x F_i(x)) / (i² − 1), i ≠ 1
    let fi = i as f64;
    (fi * basis_value(i + 1, x) - (fi + 1.0) * x * basis_value(i, x)) / (fi * fi - 1.0)
}

/// `∫_{a}^{b} F_i(τ) dτ` for `-1 <= a <= b <= 1`.
pub fn segment_integral(i: usize, tau_a: f64, tau_b: f64) -> Result<f64> {
    let a = check_tau(tau_a)?;
    let b = check_tau(tau_b)?;
    if a > b {
        return Err(Error::Domain {
            what: "segment bounds must satisfy tau_a <= tau_b",
            value: tau_a,
        });
    }
    if i == 1 {
        return Ok((b * b - a * a) / 2.0);
    }
    Ok(antiderivative_value(i, b) - antiderivative_value(i, a))
}

/// Affine map between mission time `t ∈ [0, t_N]` and `τ ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMap {
    span: f64,
}

impl TimeMap {
    pub fn new(span: f64) -> Result<Self> {
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::Domain {
                what: "interval length t_N must be positive",
                value: span,
            });
        }
        Ok(Self { span })
    }

    /// Interval length `t_N` in seconds.
    pub fn span(&self) -> f64 {
        self.span
    }

    /// `dt/dτ = t_N / 2`.
    pub fn half_span(&self) -> f64 {
        0.5 * self.span
    }

    pub fn to_time(&self, tau: f64) -> f64 {
        self.half_span() * (1.0 + tau)
    }

    pub fn to_tau(&self, t: f64) -> f64 {
        2.0 * t / self.span - 1.0
    }
}

/// Scalar Chebyshev series `Σ a_i F_i(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl Default for ChebSeries {
    fn default() -> Self {
        Self::zero()
    }
}

impl ChebSeries {
    /// An empty coefficient list becomes the zero series.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            Self::zero()
        } else {
            Self { coeffs }
        }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The single basis polynomial `F_i`.
    pub fn basis(i: usize) -> Self {
        let mut coeffs = vec![0.0; i + 1];
        coeffs[i] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Clenshaw evaluation without a domain check.
    pub fn clenshaw(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    pub fn eval(&self, tau: f64) -> Result<f64> {
        Ok(self.clenshaw(check_tau(tau)?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Product series of degree `deg p + deg q`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &p) in self.coeffs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let half = 0.5 * p;
            for (j, &q) in other.coeffs.iter().enumerate() {
                let h = half * q;
                out[i + j] += h;
                out[i.abs_diff(j)] += h;
            }
        }
        Self { coeffs: out }
    }

    /// `∫_{-1}^{τ} s dτ'`, degree `deg s + 1`, vanishing at `τ = -1`.
    pub fn antiderivative(&self) -> Self {
        let m = self.coeffs.len();
        let a = |k: usize| self.coeff(k);
        let mut b = vec![0.0; m + 1];
        b[1] = a(0) - 0.5 * a(2);
        for (k, bk) in b.iter_mut().enumerate().skip(2) {
            *bk = (a(k - 1) - a(k + 1)) / (2.0 * k as f64);
        }
        // F_k(-1) = (-1)^k
        let at_start: f64 = b
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &bk)| if k % 2 == 0 { bk } else { -bk })
            .sum();
        b[0] = -at_start;
        Self { coeffs: b }
    }

    /// `(t_N/2) ∫_{-1}^{τ} s dτ'`, i.e. the integral in time from the
    /// interval start.
    pub fn integral_from_start(&self, map: &TimeMap) -> Self {
        self.antiderivative().scale(map.half_span())
    }

    /// `d/dτ`, degree `deg s - 1` (a constant stays degree 0).
    pub fn derivative(&self) -> Self {
        let m = self.degree();
        if m == 0 {
            return Self::zero();
        }
        let mut d = vec![0.0; m + 1];
        for k in (1..=m).rev() {
            d[k - 1] = d.get(k + 1).copied().unwrap_or(0.0) + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(m);
        Self { coeffs: d }
    }

    /// Drops trailing coefficients with magnitude at or below `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > tol)
            .map_or(1, |p| p + 1);
        Self {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Keeps `F_0..F_max_degree`; returns the largest dropped `|a_i|`.
    pub fn truncate(&self, max_degree: usize) -> (Self, f64) {
        if self.degree() <= max_degree {
            return (self.clone(), 0.0);
        }
        let dropped = self.coeffs[max_degree + 1..]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        (
            Self {
                coeffs: self.coeffs[..=max_degree].to_vec(),
            },
            dropped,
        )
    }

    /// Sum of magnitudes above `max_degree`; bounds the pointwise truncation
    /// error since `|F_i| <= 1` on the interval.
    pub fn tail_mass(&self, max_degree: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(max_degree + 1)
            .map(|c| c.abs())
            .sum()
    }
}

/// Three-vector valued Chebyshev series, one scalar series per axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChebSeries3 {
    pub x: ChebSeries,
    pub y: ChebSeries,
    pub z: ChebSeries,
}

impl ChebSeries3 {
    pub fn new(x: ChebSeries, y: ChebSeries, z: ChebSeries) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(v: Vector3<f64>) -> Self {
        Self::new(
            ChebSeries::constant(v.x),
            ChebSeries::constant(v.y),
            ChebSeries::constant(v.z),
        )
    }

    /// Series `Σ c_i F_i` from vector coefficients `c_0..c_n`.
    pub fn from_coefficients(coeffs: &[Vector3<f64>]) -> Self {
        Self::new(
            ChebSeries::new(coeffs.iter().map(|c| c.x).collect()),
            ChebSeries::new(coeffs.iter().map(|c| c.y).collect()),
            ChebSeries::new(coeffs.iter().map(|c| c.z).collect()),
        )
    }

    pub fn components(&self) -> [&ChebSeries; 3] {
        [&self.x, &self.y, &self.z]
    }

    fn map(&self, f: impl Fn(&ChebSeries) -> ChebSeries) -> Self {
        Self::new(f(&self.x), f(&self.y), f(&self.z))
    }

    fn zip(&self, other: &Self, f: impl Fn(&ChebSeries, &ChebSeries) -> ChebSeries) -> Self {
        Self::new(f(&self.x, &other.x), f(&self.y, &other.y), f(&self.z, &other.z))
    }

    /// Coefficient vector of `F_i` (zero beyond a component's degree).
    pub fn coefficient(&self, i: usize) -> Vector3<f64> {
        Vector3::new(self.x.coeff(i), self.y.coeff(i), self.z.coeff(i))
    }

    pub fn degrees(&self) -> [usize; 3] {
        [self.x.degree(), self.y.degree(), self.z.degree()]
    }

    /// Largest component degree.
    pub fn degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn value_at(&self, x: f64) -> Vector3<f64> {
        Vector3::new(self.x.clenshaw(x), self.y.clenshaw(x), self.z.clenshaw(x))
    }

    pub fn eval(&self, tau: f64) -> Result<Vector3<f64>> {
        Ok(self.value_at(check_tau(tau)?))
    }

    /// `max_k |s(τ_k)|` over the given nodes.
    pub fn sup_norm_at(&self, nodes: &[f64]) -> f64 {
        nodes
            .iter()
            .map(|&t| self.value_at(t).norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, ChebSeries::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, ChebSeries::sub)
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y.mul(&other.z).sub(&self.z.mul(&other.y)),
            self.z.mul(&other.x).sub(&self.x.mul(&other.z)),
            self.x.mul(&other.y).sub(&self.y.mul(&other.x)),
        )
    }

    pub fn dot(&self, other: &Self) -> ChebSeries {
        self.x
            .mul(&other.x)
            .add(&self.y.mul(&other.y))
            .add(&self.z.mul(&other.z))
    }

    /// Pointwise `s(τ)·v(τ)`.
    pub fn scalar_times_vec(s: &ChebSeries, v: &Self) -> Self {
        v.map(|c| s.mul(c))
    }

    pub fn integral_from_start(&self, map: &TimeMap) -> Self {
        self.map(|c| c.integral_from_start(map))
    }

    /// `d/dτ` per component.
    pub fn derivative(&self) -> Self {
        self.map(ChebSeries::derivative)
    }

    pub fn trimmed(&self, tol: f64) -> Self {
        self.map(|c| c.trimmed(tol))
    }

    /// Drops every coefficient above `max_degree`; returns the largest
    /// dropped magnitude over all components.
    pub fn truncate(&self, max_degree: usize) -> (Self, f64) {
        let (x, dx) = self.x.truncate(max_degree);
        let (y, dy) = self.y.truncate(max_degree);
        let (z, dz) = self.z.truncate(max_degree);
        (Self::new(x, y, z), dx.max(dy).max(dz))
    }

    /// Euclidean bound on the pointwise truncation error at `max_degree`.
    pub fn tail_mass(&self, max_degree: usize) -> f64 {
        let [x, y, z] = self.components().map(|c| c.tail_mass(max_degree));
        (x * x + y * y + z * z).sqrt()
    }
}

/// Exact conversions between the Chebyshev and monomial bases in `τ`.
///
/// Conversion loses accuracy quickly with degree; these exist for checking
/// results against closed forms written in powers of `τ` (degree <= ~30).
pub mod monomial {
    use super::ChebSeries;

    /// Monomial coefficients `m_k` with `Σ a_i F_i(τ) = Σ m_k τ^k`.
    pub fn from_chebyshev(s: &ChebSeries) -> Vec<f64> {
        let n = s.degree();
        let mut out = vec![0.0; n + 1];
        // power coefficients of F_{i-1}, F_i
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        out[0] += s.coeff(0);
        if n >= 1 {
            out[1] += s.coeff(1);
        }
        for i in 2..=n {
            let mut next = vec![0.0; i + 1];
            for (k, &c) in cur.iter().enumerate() {
                next[k + 1] += 2.0 * c;
            }
            for (k, &c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            for (k, &c) in next.iter().enumerate() {
                out[k] += s.coeff(i) * c;
            }
            prev = cur;
            cur = next;
        }
        out
    }

    /// Chebyshev series equal to `Σ m_k τ^k`.
    pub fn to_chebyshev(m: &[f64]) -> ChebSeries {
        let x = ChebSeries::basis(1);
        let mut power = ChebSeries::constant(1.0);
        let mut acc = ChebSeries::zero();
        for (k, &c) in m.iter().enumerate() {
            if k > 0 {
                power = power.mul(&x);
            }
            acc = acc.add(&power.scale(c));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn recurrence_eval(s: &ChebSeries, x: f64) -> f64 {
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * basis_value(i, x))
            .sum()
    }

    // Composite Simpson on [a, b]; integrands here are low-degree polynomials
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + k as f64 * h);
        }
        s * h / 3.0
    }

    fn pseudo_random(seed: u64, n: usize) -> Vec<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    fn random3(seed: u64, degree: usize) -> ChebSeries3 {
        let c = pseudo_random(seed, 3 * (degree + 1));
        ChebSeries3::new(
            ChebSeries::new(c[..=degree].to_vec()),
            ChebSeries::new(c[degree + 1..2 * degree + 2].to_vec()),
            ChebSeries::new(c[2 * degree + 2..].to_vec()),
        )
    }

    #[test]
    fn eval_basis_and_constants() {
        let f2 = ChebSeries::basis(2);
        assert!((f2.eval(0.5).unwrap() + 0.5).abs() < 1e-15);

        let c = ChebSeries3::constant(Vector3::new(1.0, 2.0, 3.0));
        for tau in [-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert_eq!(c.eval(tau).unwrap(), Vector3::new(1.0, 2.0, 3.0));
        }

        let lin = ChebSeries3::from_coefficients(&[Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)]);
        assert_eq!(lin.eval(-1.0).unwrap(), Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn eval_domain() {
        let s = ChebSeries::basis(3);
        assert!(s.eval(1.0 + 1e-13).is_ok());
        assert!(matches!(s.eval(1.0 + 1e-9), Err(Error::Domain { .. })));
        assert!(s.eval(f64::NAN).is_err());
    }

    #[test]
    fn clenshaw_matches_recurrence_to_degree_64() {
        let s = ChebSeries::new(pseudo_random(7, 65));
        for x in chebyshev_nodes(41) {
            let a = s.clenshaw(x);
            let b = recurrence_eval(&s, x);
            assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn trimming_keeps_values() {
        let s = ChebSeries::new(vec![1.0, 0.5, 1e-16, 0.0, -2e-15]);
        let t = s.trimmed(TRIM_TOL);
        assert_eq!(t.degree(), 1);
        for x in chebyshev_nodes(9) {
            assert!((s.clenshaw(x) - t.clenshaw(x)).abs() < 1e-14);
        }
        assert_eq!(ChebSeries::new(vec![0.0, 0.0]).trimmed(0.0).degree(), 0);
    }

    #[test]
    fn add_scale_identities() {
        let s = random3(3, 5);
        assert_eq!(s.add(&ChebSeries3::zero()), s);
        assert!(s.scale(0.0).is_zero());

        let (a, b) = (random3(11, 5), random3(12, 5));
        let sum = a.add(&b);
        let lhs = sum.eval(0.3).unwrap();
        let rhs = a.eval(0.3).unwrap() + b.eval(0.3).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn product_linearization() {
        let f1 = ChebSeries::basis(1);
        assert_eq!(f1.mul(&f1).coeffs(), &[0.5, 0.0, 0.5]);

        let q = ChebSeries::new(pseudo_random(5, 7));
        assert_eq!(ChebSeries::constant(1.0).mul(&q), q);

        let p = ChebSeries::new(pseudo_random(21, 7));
        let pq = p.mul(&q);
        assert_eq!(pq.degree(), 12);
        for x in chebyshev_nodes(11) {
            let want = p.clenshaw(x) * q.clenshaw(x);
            assert!((pq.clenshaw(x) - want).abs() < 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn high_degree_product_stays_accurate() {
        let p = ChebSeries::new(pseudo_random(31, 33));
        let q = ChebSeries::new(pseudo_random(32, 32));
        let pq = p.mul(&q);
        assert_eq!(pq.degree(), 63);
        for x in chebyshev_nodes(33) {
            let want = p.clenshaw(x) * q.clenshaw(x);
            assert!((pq.clenshaw(x) - want).abs() < 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn cross_and_dot() {
        let ex = ChebSeries3::constant(Vector3::x());
        let ey = ChebSeries3::constant(Vector3::y());
        let ez = ex.cross(&ey);
        for tau in [-1.0, 0.0, 1.0] {
            assert!((ez.eval(tau).unwrap() - Vector3::z()).norm() < 1e-15);
        }

        let (a, b) = (random3(41, 4), random3(42, 6));
        let ab = a.cross(&b);
        let ba = b.cross(&a);
        for x in chebyshev_nodes(9) {
            assert!(ab.add(&ba).value_at(x).norm() < 1e-15);
        }
        assert!(a.cross(&a).trimmed(TRIM_TOL).is_zero());

        let aa = a.dot(&a);
        for x in chebyshev_nodes(7) {
            let v = a.value_at(x);
            assert!((aa.clenshaw(x) - v.norm_squared()).abs() < 1e-13);
        }

        let s = ChebSeries::new(vec![0.5, -0.25, 0.1]);
        let sv = ChebSeries3::scalar_times_vec(&s, &b);
        for x in chebyshev_nodes(7) {
            assert!((sv.value_at(x) - s.clenshaw(x) * b.value_at(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn integral_examples() {
        let map = TimeMap::new(1.0).unwrap();
        let c = Vector3::new(0.3, -1.0, 2.0);
        let p = ChebSeries3::constant(c).integral_from_start(&map);
        assert!((p.eval(1.0).unwrap() - c).norm() < 1e-15);
        assert!((p.eval(0.0).unwrap() - 0.5 * c).norm() < 1e-15);

        let full = |s: &ChebSeries| {
            let a = s.antiderivative();
            a.clenshaw(1.0) - a.clenshaw(-1.0)
        };
        assert!(full(&ChebSeries::basis(1)).abs() < 1e-15);
        assert!((full(&ChebSeries::basis(2)) + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn integral_is_antiderivative() {
        let map = TimeMap::new(0.08).unwrap();
        let s = random3(77, 9);
        let p = s.integral_from_start(&map);
        assert_eq!(p.degree(), 10);
        assert!(p.eval(-1.0).unwrap().norm() < 1e-16);
        // dP/dt = (2/t_N) dP/dτ
        let back = p.derivative().scale(1.0 / map.half_span());
        for x in chebyshev_nodes(17) {
            assert!((back.value_at(x) - s.value_at(x)).norm() < 1e-12);
        }
        // independent oracle: quadrature of the integrand in time
        for &tau in &[-0.5, 0.2, 1.0] {
            let q = simpson(|u| s.x.clenshaw(u), -1.0, tau, 20_000) * map.half_span();
            assert!((p.x.clenshaw(tau) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_basis() {
        // F_3' = 12τ² − 3 = 3 F_0 + 6 F_2
        let d = ChebSeries::basis(3).derivative();
        assert_eq!(d.degree(), 2);
        assert!((d.coeff(0) - 3.0).abs() < 1e-15);
        assert!(d.coeff(1).abs() < 1e-15);
        assert!((d.coeff(2) - 6.0).abs() < 1e-15);
        assert!(ChebSeries::constant(4.0).derivative().is_zero());
    }

    #[test]
    fn segment_integral_examples() {
        assert!((segment_integral(0, -1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let (a, b) = (-0.3, 0.7);
        assert!((segment_integral(1, a, b).unwrap() - (b * b - a * a) / 2.0).abs() < 1e-16);
        assert!((segment_integral(2, -1.0, 1.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!(segment_integral(1, -1.0, 1.0).unwrap().abs() < 1e-16);
        for i in (3..30).step_by(2) {
            assert!(segment_integral(i, -1.0, 1.0).unwrap().abs() < 1e-13, "i={i}");
        }
        assert!(matches!(
            segment_integral(2, 0.5, 0.1),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn segment_integral_matches_quadrature() {
        for i in 0..12 {
            for (a, b) in [(-1.0, -0.75), (-0.2, 0.4), (0.5, 1.0)] {
                let want = simpson(|x| basis_value(i, x), a, b, 4000);
                let got = segment_integral(i, a, b).unwrap();
                assert!((got - want).abs() < 1e-12, "i={i} [{a},{b}] {got} {want}");
            }
        }
    }

    #[test]
    fn truncate_examples() {
        let s = random3(9, 6);
        let (same, dropped) = s.truncate(6);
        assert_eq!(same, s);
        assert_eq!(dropped, 0.0);

        let f3 = ChebSeries3::new(
            ChebSeries::new(vec![0.0, 0.0, 0.0, -0.7]),
            ChebSeries::zero(),
            ChebSeries::zero(),
        );
        let (t, dropped) = f3.truncate(2);
        assert!(t.is_zero());
        assert_eq!(dropped, 0.7);

        let long = random3(19, 14);
        let (short, _) = long.truncate(10);
        let bound = long.tail_mass(10);
        for x in chebyshev_nodes(33) {
            assert!((long.value_at(x) - short.value_at(x)).norm() <= bound + 1e-15);
        }
    }

    #[test]
    fn monomial_round_trip() {
        // F_3 = 4τ³ − 3τ
        let m = monomial::from_chebyshev(&ChebSeries::basis(3));
        assert_eq!(m, vec![0.0, -3.0, 0.0, 4.0]);
        let back = monomial::to_chebyshev(&m);
        for (a, b) in back.coeffs().iter().zip(ChebSeries::basis(3).coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn time_map() {
        let map = TimeMap::new(0.08).unwrap();
        assert_eq!(map.to_time(-1.0), 0.0);
        assert_eq!(map.to_time(1.0), 0.08);
        assert!((map.to_tau(0.04)).abs() < 1e-16);
        assert!(TimeMap::new(0.0).is_err());
        assert!(TimeMap::new(-1.0).is_err());
    }

    fn series_strategy(max_degree: usize) -> impl Strategy<Value = ChebSeries3> {
        prop::collection::vec(-1.0f64..1.0, 3..=3 * (max_degree + 1)).prop_map(|c| {
            let n = c.len() / 3;
            ChebSeries3::new(
                ChebSeries::new(c[..n].to_vec()),
                ChebSeries::new(c[n..2 * n].to_vec()),
                ChebSeries::new(c[2 * n..3 * n].to_vec()),
            )
        })
    }

    proptest! {
        #[test]
        fn pointwise_homomorphism(
            a in series_strategy(10),
            b in series_strategy(10),
            k in -2.0f64..2.0,
        ) {
            let map = TimeMap::new(1.3).unwrap();
            let sum = a.add(&b);
            let scaled = a.scale(k);
            let cross = a.cross(&b);
            let dot = a.dot(&b);
            let integ = a.integral_from_start(&map);
            prop_assert_eq!(integ.degree(), a.degree() + 1);
            prop_assert_eq!(dot.degree(), a.degree() + b.degree());
            prop_assert!(integ.eval(-1.0).unwrap().norm() < 1e-15);
            for x in chebyshev_nodes(33) {
                let (va, vb) = (a.value_at(x), b.value_at(x));
                prop_assert!((sum.value_at(x) - (va + vb)).norm() < 1e-12);
                prop_assert!((scaled.value_at(x) - k * va).norm() < 1e-12);
                prop_assert!((cross.value_at(x) - va.cross(&vb)).norm() < 1e-12);
                prop_assert!((dot.clenshaw(x) - va.dot(&vb)).abs() < 1e-12);
            }
        }
    }
}

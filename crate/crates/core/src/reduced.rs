//! Reduced three-variable magnetization dynamics for `n₀ = 0` spin-flip
//! symmetric states:
//!
//! ```text
//! Ṁ  = 4J I₀
//! Ṙ₀ = −2λ_A I₀ M
//! İ₀ = 2λ_A R₀ M − J M
//! ```
//!
//! plus its first integral, fixed points, linear stability and the closed-form
//! solution for the `M(0) = 1` branch.

use num_complex::Complex;

use crate::elliptic::{elliptic_k, jacobi_cn_dn};
use crate::error::{Error, Result};
use crate::integrator::{solve_adaptive, IntegratorConfig, OdeSystem, StepStats};
use crate::model::{Observables, Spinor};
use crate::scalar::Real;

/// Tolerance on `2J/|λ_A| − 1` for the critical point.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedState<T> {
    pub m: T,
    pub r0: T,
    pub i0: T,
}

impl<T: Real> ReducedState<T> {
    pub fn new(m: T, r0: T, i0: T) -> Self {
        Self { m, r0, i0 }
    }

    pub fn from_observables(o: &Observables<T>) -> Self {
        Self::new(o.m, o.r0, o.i0)
    }

    pub fn from_spinor(f: &Spinor<T>) -> Self {
        Self::from_observables(&crate::model::observables(f))
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.m, self.r0, self.i0]
    }

    pub fn from_array(y: &[T; 3]) -> Self {
        Self::new(y[0], y[1], y[2])
    }

    pub fn norm(&self) -> T {
        (self.m * self.m + self.r0 * self.r0 + self.i0 * self.i0).sqrt()
    }

    /// Realizable for an `n₀ = 0` unit spinor.
    pub fn is_physical(&self) -> bool {
        self.m.abs() <= T::one() && conserved_quantity(self) <= T::lit(0.25 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams<T> {
    pub j: T,
    pub lambda_a: T,
}

impl<T: Real> ReducedParams<T> {
    pub fn new(j: T, lambda_a: T) -> Result<Self> {
        if !(j.is_finite() && lambda_a.is_finite()) {
            return Err(Error::NonFinite("reduced parameters"));
        }
        if j <= T::zero() {
            return Err(Error::Domain(format!("tunnelling J must be positive, got {j}")));
        }
        Ok(Self { j, lambda_a })
    }

    /// `2J / |λ_A|` (infinite for λ_A = 0).
    pub fn ratio(&self) -> T {
        T::lit(2.0) * self.j / self.lambda_a.abs()
    }
}

pub fn reduced_rhs<T: Real>(s: &ReducedState<T>, p: &ReducedParams<T>) -> ReducedState<T> {
    let two = T::lit(2.0);
    ReducedState::new(
        T::lit(4.0) * p.j * s.i0,
        -two * p.lambda_a * s.i0 * s.m,
        two * p.lambda_a * s.r0 * s.m - p.j * s.m,
    )
}

/// `C = R₀² + I₀² + M²/4`, a first integral of the reduced flow.
pub fn conserved_quantity<T: Real>(s: &ReducedState<T>) -> T {
    s.r0 * s.r0 + s.i0 * s.i0 + s.m * s.m / T::lit(4.0)
}

/// `R₀ = λ_A(1 − M²)/(4J)` along the orbit through `M = 1, R₀ = I₀ = 0`.
pub fn trajectory_relation_r0<T: Real>(m: T, p: &ReducedParams<T>) -> T {
    p.lambda_a * (T::one() - m * m) / (T::lit(4.0) * p.j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SelfTrapped,
    Critical,
    FullOscillation,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::SelfTrapped => "SelfTrapped",
            Regime::Critical => "Critical",
            Regime::FullOscillation => "FullOscillation",
        })
    }
}

fn is_critical<T: Real>(p: &ReducedParams<T>) -> bool {
    p.lambda_a != T::zero() && (p.ratio() - T::one()).abs() <= T::lit(CRITICAL_TOL)
}

pub fn classify_regime<T: Real>(p: &ReducedParams<T>) -> Regime {
    if is_critical(p) {
        Regime::Critical
    } else if T::lit(2.0) * p.j < p.lambda_a.abs() {
        Regime::SelfTrapped
    } else {
        Regime::FullOscillation
    }
}

/// Oscillation period of the `M(0) = 1` orbit:
/// `2K(2J/|λ_A|)/|λ_A|` when self-trapped, `4K(|λ_A|/2J)/(2J)` otherwise,
/// and the linear Rabi period `π/J` at `λ_A = 0`.
pub fn analytic_period<T: Real>(p: &ReducedParams<T>) -> Result<T> {
    let two = T::lit(2.0);
    let la = p.lambda_a.abs();
    if la == T::zero() {
        return Ok(T::PI() / p.j);
    }
    if is_critical(p) {
        return Err(Error::CriticalPoint);
    }
    if two * p.j < la {
        Ok(two * elliptic_k(two * p.j / la)? / la)
    } else {
        Ok(T::lit(4.0) * elliptic_k(la / (two * p.j))? / (two * p.j))
    }
}

/// Closed-form `M(t)` for `M(0) = 1, R₀(0) = I₀(0) = 0`:
/// `dn(|λ_A| t, 2J/|λ_A|)` when self-trapped, `cn(2J t, |λ_A|/2J)` otherwise.
pub fn analytic_magnetization<T: Real>(t: T, p: &ReducedParams<T>) -> Result<T> {
    let two = T::lit(2.0);
    let la = p.lambda_a.abs();
    if is_critical(p) {
        return Err(Error::CriticalPoint);
    }
    if la != T::zero() && two * p.j < la {
        Ok(jacobi_cn_dn(la * t, two * p.j / la)?.1)
    } else {
        Ok(jacobi_cn_dn(two * p.j * t, la / (two * p.j))?.0)
    }
}

/// Analytic Jacobian of [`reduced_rhs`] in variable order (M, R₀, I₀).
pub fn jacobian<T: Real>(s: &ReducedState<T>, p: &ReducedParams<T>) -> [[T; 3]; 3] {
    let two = T::lit(2.0);
    let z = T::zero();
    let la = p.lambda_a;
    [
        [z, z, T::lit(4.0) * p.j],
        [-two * la * s.i0, z, -two * la * s.m],
        [two * la * s.r0 - p.j, two * la * s.m, z],
    ]
}

/// Roots of `x³ + a x² + b x + c`.
pub fn cubic_roots<T: Real>(a: T, b: T, c: T) -> [Complex<T>; 3] {
    let three = T::lit(3.0);
    let shift = a / three;
    let p = b - a * a / three;
    let q = T::lit(2.0) * a * a * a / T::lit(27.0) - a * b / three + c;
    let cq = Complex::new(q, T::zero());
    let disc = Complex::new(q * q / T::lit(4.0) + p * p * p / T::lit(27.0), T::zero()).sqrt();
    let half_q = cq / T::lit(2.0);
    let (u1, u2) = (-half_q + disc, -half_q - disc);
    let big = if u1.norm() >= u2.norm() { u1 } else { u2 };
    let u = if big.norm() == T::zero() {
        Complex::new(T::zero(), T::zero())
    } else {
        big.powf(T::one() / three)
    };
    let omega = Complex::new(-T::lit(0.5), T::lit(0.75).sqrt());
    let omega2 = omega.conj();
    let v = |u: Complex<T>| {
        if u.norm() == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(-p, T::zero()) / (u * three)
        }
    };
    let mut roots = [u + v(u), omega * u + v(omega * u), omega2 * u + v(omega2 * u)];
    let poly = |x: Complex<T>| ((x + a) * x + b) * x + c;
    let dpoly = |x: Complex<T>| (x * three + a * T::lit(2.0)) * x + b;
    for r in roots.iter_mut() {
        *r = *r - Complex::new(shift, T::zero());
        for _ in 0..3 {
            let d = dpoly(*r);
            if d.norm() == T::zero() {
                break;
            }
            let next = *r - poly(*r) / d;
            if !(next.re.is_finite() && next.im.is_finite()) || poly(next).norm() > poly(*r).norm() {
                break;
            }
            *r = next;
        }
    }
    roots
}

/// Eigenvalues of a real 3×3 matrix from its characteristic polynomial.
pub fn eigenvalues_3x3<T: Real>(m: &[[T; 3]; 3]) -> [Complex<T>; 3] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // det(xI − A) = x³ − tr x² + minors x − det
    let mut roots = cubic_roots(-tr, minors, -det);
    roots.sort_by(|x, y| {
        x.im.partial_cmp(&y.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal))
    });
    roots
}

pub fn stability_eigenvalues<T: Real>(s: &ReducedState<T>, p: &ReducedParams<T>) -> [Complex<T>; 3] {
    eigenvalues_3x3(&jacobian(s, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointFamily {
    /// `I₀ = M = 0`, any `R₀`.
    CenterFamily,
    /// `I₀ = 0`, `R₀ = J/(2λ_A)`, any `M`.
    SecondFamily,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport<T> {
    pub location: ReducedState<T>,
    pub family: FixedPointFamily,
    pub eigenvalues: [Complex<T>; 3],
}

/// Representative members of each fixed-point family.
pub fn fixed_points<T: Real>(p: &ReducedParams<T>) -> Vec<FixedPointReport<T>> {
    let half = T::lit(0.5);
    let report = |location: ReducedState<T>, family| FixedPointReport {
        location,
        family,
        eigenvalues: stability_eigenvalues(&location, p),
    };
    let mut out: Vec<_> = [T::zero(), half, -half]
        .into_iter()
        .map(|r0| report(ReducedState::new(T::zero(), r0, T::zero()), FixedPointFamily::CenterFamily))
        .collect();
    if p.lambda_a != T::zero() && p.j <= p.lambda_a.abs() {
        let r0 = p.j / (T::lit(2.0) * p.lambda_a);
        out.extend(
            [T::zero(), half, -half]
                .into_iter()
                .map(|m| report(ReducedState::new(m, r0, T::zero()), FixedPointFamily::SecondFamily)),
        );
    }
    out
}

pub struct ReducedSystem<T> {
    pub params: ReducedParams<T>,
}

impl<T: Real> OdeSystem<T, 3> for ReducedSystem<T> {
    fn derivative(&self, _t: T, y: &[T; 3]) -> Result<[T; 3]> {
        Ok(reduced_rhs(&ReducedState::from_array(y), &self.params).to_array())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory<T> {
    pub params: ReducedParams<T>,
    pub times: Vec<T>,
    pub states: Vec<ReducedState<T>>,
    pub conserved: Vec<T>,
    pub stats: StepStats,
}

impl<T: Real> ReducedTrajectory<T> {
    pub fn conserved_drift(&self) -> T {
        let c0 = self.conserved.first().copied().unwrap_or(T::zero());
        self.conserved.iter().fold(T::zero(), |m, c| m.max((*c - c0).abs()))
    }
}

pub fn integrate_reduced<T: Real>(
    s0: &ReducedState<T>,
    p: &ReducedParams<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<ReducedTrajectory<T>> {
    let sys = ReducedSystem { params: *p };
    let (times, ys, stats) = solve_adaptive(&sys, &s0.to_array(), cfg)?;
    let states: Vec<_> = ys.iter().map(ReducedState::from_array).collect();
    let conserved = states.iter().map(conserved_quantity).collect();
    Ok(ReducedTrajectory { params: *p, times, states, conserved, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(j: f64, la: f64) -> ReducedParams<f64> {
        ReducedParams::new(j, la).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let pp = p(0.001, -0.01);
        for r0 in [-0.3, 0.0, 0.4] {
            assert_eq!(reduced_rhs(&ReducedState::new(0.0, r0, 0.0), &pp), ReducedState::default());
        }
        let d = reduced_rhs(&ReducedState::new(1.0, 0.0, 0.0), &pp);
        assert_eq!((d.m, d.r0), (0.0, 0.0));
        assert!((d.i0 + 0.001).abs() < 1e-18);
        for m in [-0.7, 0.2, 1.0] {
            let s = ReducedState::new(m, 0.001 / (2.0 * -0.01), 0.0);
            assert!(reduced_rhs(&s, &pp).norm() < 1e-18);
        }
    }

    #[test]
    fn params_validation() {
        assert!(ReducedParams::new(0.0, -0.01).is_err());
        assert!(ReducedParams::new(-1.0, -0.01).is_err());
        assert!(ReducedParams::new(f64::NAN, -0.01).is_err());
    }

    #[test]
    fn conserved_examples_and_rate() {
        assert_eq!(conserved_quantity(&ReducedState::new(1.0, 0.0, 0.0)), 0.25);
        assert_eq!(conserved_quantity(&ReducedState::new(0.0, 0.5, 0.0)), 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pp = p(0.0051, -0.01);
        for _ in 0..100 {
            let s = ReducedState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let d = reduced_rhs(&s, &pp);
            let rate = 2.0 * s.r0 * d.r0 + 2.0 * s.i0 * d.i0 + 0.5 * s.m * d.m;
            assert!(rate.abs() < 1e-17);
        }
    }

    #[test]
    fn conserved_along_integration() {
        let pp = p(0.0051, -0.01);
        let tau = analytic_period(&pp).unwrap();
        let cfg = IntegratorConfig::with_span(10.0 * tau, tau / 200.0);
        let traj = integrate_reduced(&ReducedState::new(1.0, 0.0, 0.0), &pp, &cfg).unwrap();
        assert!(traj.conserved_drift() < 1e-10, "{}", traj.conserved_drift());
    }

    #[test]
    fn period_examples() {
        assert!((analytic_period(&p(0.001, -0.01)).unwrap() - 317.373_569_490_833).abs() < 1e-9);
        assert!((analytic_period(&p(0.0051, -0.01)).unwrap() - 1188.423_258_648_777).abs() < 1e-8);
        assert!((analytic_period(&p(0.01, 0.0)).unwrap() - std::f64::consts::PI / 0.01).abs() < 1e-12);
        assert_eq!(analytic_period(&p(0.005, -0.01)), Err(Error::CriticalPoint));
        assert!((analytic_period(&p(0.002, -0.01)).unwrap() * 0.01 - 3.279_999_731_729_02).abs() < 1e-12);
    }

    #[test]
    fn period_only_depends_on_abs_lambda() {
        for j in [0.001, 0.004, 0.006, 0.02] {
            assert_eq!(analytic_period(&p(j, -0.01)), analytic_period(&p(j, 0.01)));
            assert_eq!(classify_regime(&p(j, -0.01)), classify_regime(&p(j, 0.01)));
        }
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(&p(0.001, -0.01)), Regime::SelfTrapped);
        assert_eq!(classify_regime(&p(0.0051, -0.01)), Regime::FullOscillation);
        assert_eq!(classify_regime(&p(0.005, -0.01)), Regime::Critical);
        assert_eq!(classify_regime(&p(0.005, 0.0)), Regime::FullOscillation);
    }

    #[test]
    fn magnetization_examples() {
        for pp in [p(0.001, -0.01), p(0.0051, -0.01)] {
            assert_eq!(analytic_magnetization(0.0, &pp).unwrap(), 1.0);
        }
        let pp = p(0.001, -0.01);
        let tau = analytic_period(&pp).unwrap();
        let min = (0..=2000)
            .map(|i| analytic_magnetization(tau * i as f64 / 2000.0, &pp).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((min - 0.96f64.sqrt()).abs() < 1e-10);
        assert!((analytic_magnetization(tau / 2.0, &pp).unwrap() - 0.96f64.sqrt()).abs() < 1e-12);
        let pp = p(0.0051, -0.01);
        let tau = analytic_period(&pp).unwrap();
        assert!((analytic_magnetization(tau / 2.0, &pp).unwrap() + 1.0).abs() < 1e-8);
        let pp = p(0.01, 0.0);
        assert!((analytic_magnetization(30.0, &pp).unwrap() - (0.6f64).cos()).abs() < 1e-13);
    }

    #[test]
    fn magnetization_matches_integrated_flow() {
        for pp in [p(0.001, -0.01), p(0.0051, -0.01)] {
            let tau = analytic_period(&pp).unwrap();
            let cfg = IntegratorConfig::with_span(2.0 * tau, tau / 100.0);
            let traj = integrate_reduced(&ReducedState::new(1.0, 0.0, 0.0), &pp, &cfg).unwrap();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let m = analytic_magnetization(*t, &pp).unwrap();
                assert!((m - s.m).abs() < 1e-8, "t={t} {m} {}", s.m);
                assert!((s.r0 - trajectory_relation_r0(s.m, &pp)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn magnetization_second_derivative_matches_flow() {
        // M̈ = 4J İ₀ with İ₀ = (2λ_A R₀ − J) M and R₀ on the trajectory relation.
        for pp in [p(0.001, -0.01), p(0.0051, -0.01)] {
            let h = 0.5;
            for i in 1..40 {
                let t = i as f64 * 23.7;
                let m = |t| analytic_magnetization(t, &pp).unwrap();
                let second = (m(t + h) - 2.0 * m(t) + m(t - h)) / (h * h);
                let r0 = trajectory_relation_r0(m(t), &pp);
                let flow = 4.0 * pp.j * (2.0 * pp.lambda_a * r0 - pp.j) * m(t);
                assert!((second - flow).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn trajectory_relation_examples() {
        let pp = p(0.0051, -0.01);
        assert_eq!(trajectory_relation_r0(1.0, &pp), 0.0);
        assert_eq!(trajectory_relation_r0(-1.0, &pp), 0.0);
        assert!((trajectory_relation_r0(0.0, &pp) + 0.490_196_078_431_372_5).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_families() {
        let fps = fixed_points(&p(0.001, -0.01));
        let second: Vec<_> = fps.iter().filter(|f| f.family == FixedPointFamily::SecondFamily).collect();
        assert_eq!(second.len(), 3);
        assert!(second.iter().all(|f| (f.location.r0 + 0.05).abs() < 1e-15));
        let pp = p(0.001, -0.01);
        for f in &fps {
            assert!(reduced_rhs(&f.location, &pp).norm() < 1e-12);
        }
        let fps = fixed_points(&p(0.02, -0.01));
        assert!(fps.iter().all(|f| f.family == FixedPointFamily::CenterFamily));
        let fps = fixed_points(&p(0.02, 0.0));
        assert_eq!(fps.len(), 3);
    }

    #[test]
    fn eigenvalues_at_fixed_points() {
        let pp = p(0.001, -0.01);
        for r0 in [-0.5, 0.0, 0.3] {
            let ev = stability_eigenvalues(&ReducedState::new(0.0, r0, 0.0), &pp);
            let disc = Complex::new(pp.j * (2.0 * pp.lambda_a * r0 - pp.j), 0.0);
            let w = disc.sqrt() * 2.0;
            let mut want = [-w, Complex::new(0.0, 0.0), w];
            want.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap().then(x.re.partial_cmp(&y.re).unwrap()));
            for (got, want) in ev.iter().zip(want) {
                assert!((got - want).norm() < 1e-15, "{ev:?}");
            }
        }
        for m in [-0.5, 0.25, 0.9] {
            let ev = stability_eigenvalues(&ReducedState::new(m, pp.j / (2.0 * pp.lambda_a), 0.0), &pp);
            let w = 2.0 * (pp.lambda_a * m).abs();
            assert!((ev[0] - Complex::new(0.0, -w)).norm() < 1e-15);
            assert!(ev[1].norm() < 1e-15);
            assert!((ev[2] - Complex::new(0.0, w)).norm() < 1e-15);
        }
        // Real pair when 2λ_A R₀ > J.
        let ev = stability_eigenvalues(&ReducedState::new(0.0, 0.5, 0.0), &p(0.001, 0.01));
        let w = 2.0 * (0.001f64 * (2.0 * 0.01 * 0.5 - 0.001)).sqrt();
        let mut re: Vec<f64> = ev.iter().map(|e| e.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + w).abs() < 1e-15 && re[1].abs() < 1e-15 && (re[2] - w).abs() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        for _ in 0..100 {
            let pp = p(rng.gen_range(1e-4..0.05), rng.gen_range(-0.05..0.05));
            let s = ReducedState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let jac = jacobian(&s, &pp);
            for col in 0..3 {
                let mut yp = s.to_array();
                let mut ym = s.to_array();
                yp[col] += h;
                ym[col] -= h;
                let fp = reduced_rhs(&ReducedState::from_array(&yp), &pp).to_array();
                let fm = reduced_rhs(&ReducedState::from_array(&ym), &pp).to_array();
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!((fd - jac[row][col]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn cubic_solver_generic_matrix() {
        // Upper triangular: eigenvalues are the diagonal.
        let m = [[2.0, 1.0, 3.0], [0.0, -1.0, 4.0], [0.0, 0.0, 0.5]];
        let ev = eigenvalues_3x3(&m);
        let mut re: Vec<f64> = ev.iter().map(|e| e.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-1.0, 0.5, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let roots = cubic_roots(0.0, 0.0, 0.0);
        assert!(roots.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn from_spinor_reduces_observables() {
        let s = ReducedState::from_spinor(&Spinor::real(1.0, 0.0, 0.0));
        assert_eq!(s, ReducedState::new(1.0, 0.0, 0.0));
        assert!(s.is_physical());
    }
}

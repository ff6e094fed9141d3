//! Time integration: a classical RK4 step for convergence studies and an
//! adaptive Dormand–Prince 5(4) pair with PI step-size control.
//!
//! Output is sampled on a uniform grid `0, Δ, 2Δ, …` (plus `t_max` when it is
//! not a grid point). The adaptive driver splits steps so that every sample
//! time is hit exactly; no interpolation is involved.

use crate::error::{Error, Result};
use crate::model::{self, Observables, SpinorPair, SystemParams};
use crate::scalar::Real;

/// An autonomous or non-autonomous ODE `y' = f(t, y)` on `N` reals.
pub trait OdeSystem<T: Real, const N: usize> {
    fn derivative(&self, t: T, y: &[T; N]) -> Result<[T; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rtol: T,
    pub atol: T,
    pub dt_init: T,
    pub dt_min: T,
    pub t_max: T,
    pub sample_dt: T,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-12).max(T::epsilon() * T::lit(100.0)),
            atol: T::lit(1e-14).max(T::epsilon() * T::lit(10.0)),
            dt_init: T::lit(1e-2),
            dt_min: T::lit(1e-12),
            t_max: T::lit(100.0),
            sample_dt: T::lit(0.5),
            max_steps: 50_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_span(t_max: T, sample_dt: T) -> Self {
        Self { t_max, sample_dt, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let finite = [self.rtol, self.atol, self.dt_init, self.dt_min, self.t_max, self.sample_dt];
        if !finite.iter().all(|v| v.is_finite()) {
            return bad("integrator settings must be finite");
        }
        if !(self.rtol > T::zero() && self.atol > T::zero()) {
            return bad("rtol and atol must be positive");
        }
        if !(self.dt_min > T::zero() && self.dt_min < self.dt_init) {
            return bad("require 0 < dt_min < dt_init");
        }
        if !(self.sample_dt > T::zero()) {
            return bad("sample_dt must be positive");
        }
        if !(self.t_max > T::zero()) {
            return bad("t_max must be positive");
        }
        Ok(())
    }

    /// Uniform output grid; the last interval may be short.
    pub fn sample_times(&self) -> Vec<T> {
        let mut times = Vec::new();
        let mut k = 0usize;
        let slack = (self.sample_dt * T::lit(1e-9)).max(self.t_max.abs() * T::epsilon() * T::lit(16.0));
        loop {
            let t = T::from_usize(k).unwrap() * self.sample_dt;
            if t > self.t_max - slack {
                break;
            }
            times.push(t);
            k += 1;
        }
        times.push(self.t_max);
        times
    }
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + *c * k[i];
        }
        *o = *o + h * acc;
    }
    out
}

fn check<T: Real, const N: usize>(y: &[T; N]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("integrated state"))
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<T: Real, const N: usize, S: OdeSystem<T, N>>(
    sys: &S,
    t: T,
    y: &[T; N],
    h: T,
) -> Result<[T; N]> {
    let half = T::lit(0.5);
    let k1 = sys.derivative(t, y)?;
    let k2 = sys.derivative(t + half * h, &axpy(y, half * h, &[(T::one(), &k1)]))?;
    let k3 = sys.derivative(t + half * h, &axpy(y, half * h, &[(T::one(), &k2)]))?;
    let k4 = sys.derivative(t + h, &axpy(y, h, &[(T::one(), &k3)]))?;
    let sixth = T::one() / T::lit(6.0);
    let third = T::one() / T::lit(3.0);
    let out = axpy(y, h, &[(sixth, &k1), (third, &k2), (third, &k3), (sixth, &k4)]);
    check(&out)?;
    Ok(out)
}

struct DormandPrince<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    b: [T; 7],
    e: [T; 7],
}

impl<T: Real> DormandPrince<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        let b = [
            l(35.0 / 384.0),
            z,
            l(500.0 / 1113.0),
            l(125.0 / 192.0),
            l(-2187.0 / 6784.0),
            l(11.0 / 84.0),
            z,
        ];
        let b4 = [
            l(5179.0 / 57600.0),
            z,
            l(7571.0 / 16695.0),
            l(393.0 / 640.0),
            l(-92097.0 / 339200.0),
            l(187.0 / 2100.0),
            l(1.0 / 40.0),
        ];
        let mut e = [z; 7];
        for i in 0..7 {
            e[i] = b[i] - b4[i];
        }
        Self {
            c: [z, l(0.2), l(0.3), l(0.8), l(8.0 / 9.0), T::one(), T::one()],
            a: [
                [z; 6],
                [l(0.2), z, z, z, z, z],
                [l(3.0 / 40.0), l(9.0 / 40.0), z, z, z, z],
                [l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0), z, z, z],
                [
                    l(19372.0 / 6561.0),
                    l(-25360.0 / 2187.0),
                    l(64448.0 / 6561.0),
                    l(-212.0 / 729.0),
                    z,
                    z,
                ],
                [
                    l(9017.0 / 3168.0),
                    l(-355.0 / 33.0),
                    l(46732.0 / 5247.0),
                    l(49.0 / 176.0),
                    l(-5103.0 / 18656.0),
                    z,
                ],
                [
                    l(35.0 / 384.0),
                    z,
                    l(500.0 / 1113.0),
                    l(125.0 / 192.0),
                    l(-2187.0 / 6784.0),
                    l(11.0 / 84.0),
                ],
            ],
            b,
            e,
        }
    }

    /// Returns `(y_new, error_estimate, f(t+h, y_new))`; uses FSAL.
    fn step<const N: usize, S: OdeSystem<T, N>>(
        &self,
        sys: &S,
        t: T,
        y: &[T; N],
        f0: &[T; N],
        h: T,
    ) -> Result<([T; N], [T; N], [T; N])> {
        let mut k = [[T::zero(); N]; 7];
        k[0] = *f0;
        for s in 1..7 {
            let mut ys = *y;
            for i in 0..N {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + self.a[s][j] * kj[i];
                }
                ys[i] = ys[i] + h * acc;
            }
            k[s] = sys.derivative(t + self.c[s] * h, &ys)?;
        }
        // Stage 7 is evaluated at the 5th-order solution.
        let mut y_new = *y;
        let mut err = [T::zero(); N];
        for i in 0..N {
            let mut acc = T::zero();
            let mut eacc = T::zero();
            for s in 0..7 {
                acc = acc + self.b[s] * k[s][i];
                eacc = eacc + self.e[s] * k[s][i];
            }
            y_new[i] = y[i] + h * acc;
            err[i] = h * eacc;
        }
        Ok((y_new, err, k[6]))
    }
}

/// Integrates `sys` from `y0` at `t = 0` and returns the state at every
/// sample time of `cfg`.
pub fn solve_adaptive<T: Real, const N: usize, S: OdeSystem<T, N>>(
    sys: &S,
    y0: &[T; N],
    cfg: &IntegratorConfig<T>,
) -> Result<(Vec<T>, Vec<[T; N]>, StepStats)> {
    cfg.validate()?;
    check(y0)?;
    let times = cfg.sample_times();
    let tab = DormandPrince::<T>::new();
    let mut stats = StepStats::default();

    let safety = T::lit(0.9);
    let beta = T::lit(0.04);
    let expo = T::lit(0.2) - beta * T::lit(0.75);
    let (fac_min, fac_max) = (T::lit(0.2), T::lit(10.0));

    let mut t = T::zero();
    let mut y = *y0;
    let mut f = sys.derivative(t, &y)?;
    stats.evaluations += 1;
    let mut h = cfg.dt_init;
    let mut err_old = T::lit(1e-4);
    let mut states = Vec::with_capacity(times.len());
    states.push(y);

    for &target in &times[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(Error::StepBudget { t: t.to_f64_lossy(), max_steps: cfg.max_steps });
            }
            let remaining = target - t;
            let landing = h >= remaining * (T::one() - T::lit(1e-12));
            let h_try = if landing { remaining } else { h };

            let (y_new, err_vec, f_new) = tab.step(sys, t, &y, &f, h_try)?;
            stats.evaluations += 6;

            // Componentwise bound: |e_i| ≤ atol + rtol·|y_i| for every i.
            let mut err = T::zero();
            for i in 0..N {
                let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((err_vec[i] / sc).abs());
            }

            if err.is_finite() && err <= T::one() {
                check(&y_new)?;
                let fac = if err == T::zero() {
                    fac_max
                } else {
                    (safety * err.powf(-expo) * err_old.powf(beta)).max(fac_min).min(fac_max)
                };
                let h_next = h_try * fac;
                t = if landing { target } else { t + h_try };
                y = y_new;
                f = f_new;
                err_old = err.max(T::lit(1e-4));
                stats.accepted += 1;
                h = if landing { h_next.max(h) } else { h_next };
            } else {
                stats.rejected += 1;
                let fac = if err.is_finite() {
                    (safety * err.powf(-expo)).max(fac_min).min(T::one())
                } else {
                    fac_min
                };
                h = h_try * fac;
                if h < cfg.dt_min {
                    return Err(Error::StepUnderflow {
                        t: t.to_f64_lossy(),
                        dt_min: cfg.dt_min.to_f64_lossy(),
                    });
                }
            }
        }
        states.push(y);
    }
    Ok((times, states, stats))
}

/// Fixed-step RK4 sampled on the same grid as [`solve_adaptive`]. Steps are
/// shortened where needed to land on sample times.
pub fn solve_fixed<T: Real, const N: usize, S: OdeSystem<T, N>>(
    sys: &S,
    y0: &[T; N],
    dt: T,
    cfg: &IntegratorConfig<T>,
) -> Result<(Vec<T>, Vec<[T; N]>)> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidConfig("fixed step must be positive".into()));
    }
    if !(cfg.sample_dt > T::zero() && cfg.t_max > T::zero()) {
        return Err(Error::InvalidConfig("sample_dt and t_max must be positive".into()));
    }
    check(y0)?;
    let times = cfg.sample_times();
    let mut t = T::zero();
    let mut y = *y0;
    let mut states = vec![y];
    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            if dt >= remaining * (T::one() - T::lit(1e-12)) {
                y = rk4_step(sys, t, &y, remaining)?;
                t = target;
            } else {
                y = rk4_step(sys, t, &y, dt)?;
                t = t + dt;
            }
        }
        states.push(y);
    }
    Ok((times, states))
}

/// The coupled spinor equations as a 12-dimensional real ODE.
pub struct SpinorSystem<'a, T> {
    pub params: &'a SystemParams<T>,
}

impl<T: Real> OdeSystem<T, 12> for SpinorSystem<'_, T> {
    fn derivative(&self, _t: T, y: &[T; 12]) -> Result<[T; 12]> {
        Ok(model::rhs(&SpinorPair::from_reals(y), self.params)?.to_reals())
    }
}

/// One RK4 step of the full system.
pub fn step_fixed<T: Real>(
    state: &SpinorPair<T>,
    dt: T,
    params: &SystemParams<T>,
) -> Result<SpinorPair<T>> {
    if !(dt >= T::zero() && dt.is_finite()) {
        return Err(Error::InvalidConfig("step must be non-negative".into()));
    }
    let sys = SpinorSystem { params };
    Ok(SpinorPair::from_reals(&rk4_step(&sys, T::zero(), &state.to_reals(), dt)?))
}

/// Sampled full-system trajectory with per-sample observables and the
/// conserved-quantity ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub params: SystemParams<T>,
    pub times: Vec<T>,
    pub states: Vec<SpinorPair<T>>,
    pub observables_left: Vec<Observables<T>>,
    pub observables_right: Vec<Observables<T>>,
    pub energy: Vec<T>,
    pub total_norm: Vec<T>,
    pub total_magnetization: Vec<T>,
    /// `R₊` of the left well.
    pub r_plus: Vec<T>,
    pub stats: StepStats,
}

impl<T: Real> Trajectory<T> {
    pub fn from_states(
        params: SystemParams<T>,
        times: Vec<T>,
        states: Vec<SpinorPair<T>>,
        stats: StepStats,
    ) -> Self {
        let observables_left: Vec<_> = states.iter().map(|s| model::observables(&s.left)).collect();
        let observables_right = states.iter().map(|s| model::observables(&s.right)).collect();
        let energy = states.iter().map(|s| model::energy(s, &params)).collect();
        let total_norm = states.iter().map(|s| s.total_norm()).collect();
        let total_magnetization = states.iter().map(|s| s.total_magnetization()).collect();
        let r_plus = observables_left.iter().map(|o| o.r_plus).collect();
        Self {
            params,
            times,
            states,
            observables_left,
            observables_right,
            energy,
            total_norm,
            total_magnetization,
            r_plus,
            stats,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|q(t) − q(0)| / max(|q(0)|, 1)` over the ledger column.
    pub fn drift(series: &[T]) -> T {
        let Some(&q0) = series.first() else {
            return T::zero();
        };
        let scale = q0.abs().max(T::one());
        series.iter().fold(T::zero(), |m, q| m.max((*q - q0).abs() / scale))
    }

    /// Maximum drift over total norm, energy, total F_z and R₊.
    pub fn max_ledger_drift(&self) -> T {
        [&self.total_norm, &self.energy, &self.total_magnetization, &self.r_plus]
            .iter()
            .map(|s| Self::drift(s))
            .fold(T::zero(), T::max)
    }
}

/// Integrates the coupled spinor equations with the adaptive pair.
pub fn integrate<T: Real>(
    state0: &SpinorPair<T>,
    params: &SystemParams<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    let sys = SpinorSystem { params };
    let (times, ys, stats) = solve_adaptive(&sys, &state0.to_reals(), cfg)?;
    let states = ys.iter().map(SpinorPair::from_reals).collect();
    Ok(Trajectory::from_states(*params, times, states, stats))
}

/// Integrates the coupled spinor equations with fixed RK4 steps.
pub fn integrate_fixed<T: Real>(
    state0: &SpinorPair<T>,
    params: &SystemParams<T>,
    dt: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    params.validate()?;
    let sys = SpinorSystem { params };
    let (times, ys) = solve_fixed(&sys, &state0.to_reals(), dt, cfg)?;
    let states = ys.iter().map(SpinorPair::from_reals).collect();
    Ok(Trajectory::from_states(*params, times, states, StepStats::default()))
}

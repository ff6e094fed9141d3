//! Two-well spin-1 mean-field model: spinor types, spin algebra, the coupled
//! equations of motion, energy, collective observables and stationary states.
//!
//! Units are ħ = 1 throughout. Spinor components are always ordered (+, 0, −).

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

pub type Mat3<T> = [[Complex<T>; 3]; 3];

/// Three-component spin-1 amplitude in the (+, 0, −) basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor<T> {
    pub plus: Complex<T>,
    pub zero: Complex<T>,
    pub minus: Complex<T>,
}

impl<T: Real> Spinor<T> {
    pub fn new(plus: Complex<T>, zero: Complex<T>, minus: Complex<T>) -> Self {
        Self { plus, zero, minus }
    }

    /// Spinor with real amplitudes.
    pub fn real(plus: T, zero: T, minus: T) -> Self {
        Self::new(
            Complex::new(plus, T::zero()),
            Complex::new(zero, T::zero()),
            Complex::new(minus, T::zero()),
        )
    }

    pub fn zeros() -> Self {
        Self::real(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(c: [Complex<T>; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(&self) -> [Complex<T>; 3] {
        [self.plus, self.zero, self.minus]
    }

    pub fn norm_sqr(&self) -> T {
        self.plus.norm_sqr() + self.zero.norm_sqr() + self.minus.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Scales to unit norm. The zero spinor is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            *self * Complex::new(T::one() / n, T::zero())
        } else {
            *self
        }
    }

    /// Inner product `self† · other`.
    pub fn dot(&self, other: &Self) -> Complex<T> {
        self.plus.conj() * other.plus
            + self.zero.conj() * other.zero
            + self.minus.conj() * other.minus
    }

    /// `(f₋, f₀, f₊)`: the well-swap partner used by spin-flip-symmetric states.
    pub fn spin_flip(&self) -> Self {
        Self::new(self.minus, self.zero, self.plus)
    }

    /// Complex conjugate of the primed spinor `f′ = (f₋, −f₀, f₊)`.
    pub fn primed_conj(&self) -> Self {
        Self::new(self.minus.conj(), -self.zero.conj(), self.plus.conj())
    }

    pub fn apply(&self, m: &Mat3<T>) -> Self {
        let v = self.to_array();
        let mut out = [Complex::new(T::zero(), T::zero()); 3];
        for (i, row) in m.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        Self::from_array(out)
    }

    /// `f† A f`.
    pub fn expectation(&self, m: &Mat3<T>) -> Complex<T> {
        self.dot(&self.apply(m))
    }
}

impl<T: Real> Add for Spinor<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.plus + o.plus, self.zero + o.zero, self.minus + o.minus)
    }
}

impl<T: Real> Sub for Spinor<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.plus - o.plus, self.zero - o.zero, self.minus - o.minus)
    }
}

impl<T: Real> Mul<Complex<T>> for Spinor<T> {
    type Output = Self;
    fn mul(self, s: Complex<T>) -> Self {
        Self::new(self.plus * s, self.zero * s, self.minus * s)
    }
}

/// Left-well (ξ) and right-well (η) spinors: the full dynamical state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinorPair<T> {
    pub left: Spinor<T>,
    pub right: Spinor<T>,
}

impl<T: Real> SpinorPair<T> {
    pub fn new(left: Spinor<T>, right: Spinor<T>) -> Self {
        Self { left, right }
    }

    /// `η = spin_flip(ξ)`.
    pub fn spin_flip_symmetric(left: Spinor<T>) -> Self {
        Self::new(left, left.spin_flip())
    }

    pub fn total_norm(&self) -> T {
        self.left.norm_sqr() + self.right.norm_sqr()
    }

    /// `ξ†F_zξ + η†F_zη`.
    pub fn total_magnetization(&self) -> T {
        let fz = |f: &Spinor<T>| f.plus.norm_sqr() - f.minus.norm_sqr();
        fz(&self.left) + fz(&self.right)
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    /// Flattens into 12 reals: (re, im) of ξ₊, ξ₀, ξ₋, η₊, η₀, η₋.
    pub fn to_reals(&self) -> [T; 12] {
        let mut out = [T::zero(); 12];
        for (k, c) in self.left.to_array().iter().chain(self.right.to_array().iter()).enumerate() {
            out[2 * k] = c.re;
            out[2 * k + 1] = c.im;
        }
        out
    }

    pub fn from_reals(y: &[T; 12]) -> Self {
        let c = |k: usize| Complex::new(y[2 * k], y[2 * k + 1]);
        Self::new(
            Spinor::new(c(0), c(1), c(2)),
            Spinor::new(c(3), c(4), c(5)),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.left * s, self.right * s)
    }

    /// Euclidean norm over all six amplitudes.
    pub fn l2(&self) -> T {
        self.total_norm().sqrt()
    }

    pub fn dot(&self, other: &Self) -> Complex<T> {
        self.left.dot(&other.left) + self.right.dot(&other.right)
    }
}

impl<T: Real> Add for SpinorPair<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.left + o.left, self.right + o.right)
    }
}

impl<T: Real> Sub for SpinorPair<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.left - o.left, self.right - o.right)
    }
}

/// Coefficients of the two-mode Hamiltonian (ħ = 1).
///
/// `lambda_a < 0` is ferromagnetic, `lambda_a > 0` antiferromagnetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub eps_left: T,
    pub eps_right: T,
    pub lambda_s_left: T,
    pub lambda_s_right: T,
    pub lambda_a_left: T,
    pub lambda_a_right: T,
    pub j: T,
}

impl<T: Real> SystemParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        eps_left: T,
        eps_right: T,
        lambda_s_left: T,
        lambda_s_right: T,
        lambda_a_left: T,
        lambda_a_right: T,
        j: T,
    ) -> Result<Self> {
        let p = Self {
            eps_left,
            eps_right,
            lambda_s_left,
            lambda_s_right,
            lambda_a_left,
            lambda_a_right,
            j,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric double well: identical on-site parameters in both wells.
    pub fn symmetric(eps: T, lambda_s: T, lambda_a: T, j: T) -> Result<Self> {
        Self::new(eps, eps, lambda_s, lambda_s, lambda_a, lambda_a, j)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps_left,
            self.eps_right,
            self.lambda_s_left,
            self.lambda_s_right,
            self.lambda_a_left,
            self.lambda_a_right,
            self.j,
        ];
        if all.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("system parameters"))
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.eps_left == self.eps_right
            && self.lambda_s_left == self.lambda_s_right
            && self.lambda_a_left == self.lambda_a_right
    }

    /// Symmetric within a relative tolerance.
    pub fn is_symmetric_within(&self, rel: T) -> bool {
        let close = |a: T, b: T| (a - b).abs() <= rel * a.abs().max(b.abs());
        close(self.eps_left, self.eps_right)
            && close(self.lambda_s_left, self.lambda_s_right)
            && close(self.lambda_a_left, self.lambda_a_right)
    }

    fn well(&self, left: bool) -> (T, T, T) {
        if left {
            (self.eps_left, self.lambda_s_left, self.lambda_a_left)
        } else {
            (self.eps_right, self.lambda_s_right, self.lambda_a_right)
        }
    }
}

/// Interaction strengths from the s-wave scattering lengths in the total-spin
/// 0 and 2 channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants<T> {
    pub a0: T,
    pub a2: T,
    pub atom_mass: T,
    pub c_s: T,
    pub c_a: T,
}

impl<T: Real> CouplingConstants<T> {
    /// `c_S = 4πħ²(a₀+2a₂)/3m`, `c_A = 4πħ²(a₂−a₀)/3m`.
    pub fn from_scattering_lengths(a0: T, a2: T, atom_mass: T, hbar: T) -> Result<Self> {
        if !(a0.is_finite() && a2.is_finite() && atom_mass.is_finite() && hbar.is_finite()) {
            return Err(Error::NonFinite("scattering lengths"));
        }
        if atom_mass <= T::zero() {
            return Err(Error::Domain("atom mass must be positive".into()));
        }
        let pref = T::lit(4.0) * T::PI() * hbar * hbar / (T::lit(3.0) * atom_mass);
        Ok(Self {
            a0,
            a2,
            atom_mass,
            c_s: pref * (a0 + T::lit(2.0) * a2),
            c_a: pref * (a2 - a0),
        })
    }
}

/// Collective variables of one well, from `ρ_ij = f_i* f_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observables<T> {
    /// Trace of ρ (the well population).
    pub norm: T,
    pub m: T,
    pub n0: T,
    pub r_plus: T,
    pub r_minus: T,
    pub i_plus: T,
    pub i_minus: T,
    pub r0: T,
    pub i0: T,
    /// `atan2(i0, r0)`, zero when both vanish.
    pub theta: T,
}

impl<T: Real> Observables<T> {
    pub fn rho_pp(&self) -> T {
        (self.norm - self.n0 + self.m) / T::lit(2.0)
    }

    pub fn rho_mm(&self) -> T {
        (self.norm - self.n0 - self.m) / T::lit(2.0)
    }

    pub fn rho_pp_minus_rho_00(&self) -> T {
        self.rho_pp() - self.n0
    }
}

/// Spin-1 matrices `(F_x, F_y, F_z)` in the (+, 0, −) basis.
pub fn spin_matrices<T: Real>() -> [Mat3<T>; 3] {
    let z = Complex::new(T::zero(), T::zero());
    let r = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    let s = T::one() / T::lit(2.0).sqrt();
    let fx = [[z, r(s), z], [r(s), z, r(s)], [z, r(s), z]];
    let fy = [[z, im(-s), z], [im(s), z, im(-s)], [z, im(s), z]];
    let fz = [[r(T::one()), z, z], [z, z, z], [z, z, r(-T::one())]];
    [fx, fy, fz]
}

/// `ρ_ij = f_i* f_j`.
pub fn density_matrix<T: Real>(f: &Spinor<T>) -> Mat3<T> {
    let v = f.to_array();
    let mut rho = [[Complex::new(T::zero(), T::zero()); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rho[i][j] = v[i].conj() * v[j];
        }
    }
    rho
}

pub fn observables<T: Real>(f: &Spinor<T>) -> Observables<T> {
    let rho = density_matrix(f);
    let (p, z, m) = (0, 1, 2);
    let sum = rho[p][z] + rho[z][m];
    let diff = rho[p][z] - rho[z][m];
    let r0 = rho[p][m].re;
    let i0 = rho[p][m].im;
    let theta = if r0 == T::zero() && i0 == T::zero() {
        T::zero()
    } else {
        i0.atan2(r0)
    };
    Observables {
        norm: rho[p][p].re + rho[z][z].re + rho[m][m].re,
        m: rho[p][p].re - rho[m][m].re,
        n0: rho[z][z].re,
        r_plus: sum.re,
        r_minus: diff.re,
        i_plus: sum.im,
        i_minus: diff.im,
        r0,
        i0,
        theta,
    }
}

/// `Θ = f′ᵀ f = 2 f₊ f₋ − f₀²`; the spin-mixing term acts as `h f = Θ f′*`.
pub fn singlet_amplitude<T: Real>(f: &Spinor<T>) -> Complex<T> {
    f.plus * f.minus * T::lit(2.0) - f.zero * f.zero
}

fn check_finite<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::NonFinite("spinor state"));
    }
    params.validate()
}

fn on_site_h_form<T: Real>(f: &Spinor<T>, eps: T, ls: T, la: T) -> Spinor<T> {
    let diag = eps + (ls + la) * f.norm_sqr();
    let theta = singlet_amplitude(f);
    *f * Complex::new(diag, T::zero()) - f.primed_conj() * (theta * la)
}

fn on_site_spin_form<T: Real>(f: &Spinor<T>, eps: T, ls: T, la: T, fs: &[Mat3<T>; 3]) -> Spinor<T> {
    let mut out = *f * Complex::new(eps + ls * f.norm_sqr(), T::zero());
    for fj in fs {
        let mean = f.expectation(fj).re;
        out = out + f.apply(fj) * Complex::new(la * mean, T::zero());
    }
    out
}

/// `H_eff(Ψ) Ψ`, the right-hand side of `i dΨ/dt = H_eff Ψ`.
pub fn apply_hamiltonian<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> SpinorPair<T> {
    let (el, sl, al) = params.well(true);
    let (er, sr, ar) = params.well(false);
    let j = Complex::new(params.j, T::zero());
    SpinorPair::new(
        on_site_h_form(&state.left, el, sl, al) + state.right * j,
        on_site_h_form(&state.right, er, sr, ar) + state.left * j,
    )
}

fn minus_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), -T::one())
}

/// Time derivative `(dξ/dt, dη/dt)` from the h-matrix form of the coupled
/// spinor equations.
pub fn rhs<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> Result<SpinorPair<T>> {
    check_finite(state, params)?;
    Ok(apply_hamiltonian(state, params).scale(minus_i()))
}

/// Same derivative evaluated through `λ_S|f|²f + λ_A Σ_j ⟨F_j⟩ F_j f`.
pub fn rhs_spin_form<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> Result<SpinorPair<T>> {
    check_finite(state, params)?;
    let fs = spin_matrices::<T>();
    let (el, sl, al) = params.well(true);
    let (er, sr, ar) = params.well(false);
    let j = Complex::new(params.j, T::zero());
    let h = SpinorPair::new(
        on_site_spin_form(&state.left, el, sl, al, &fs) + state.right * j,
        on_site_spin_form(&state.right, er, sr, ar, &fs) + state.left * j,
    );
    Ok(h.scale(minus_i()))
}

/// Mean-field energy `H_S + H_A`.
pub fn energy<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> T {
    let fs = spin_matrices::<T>();
    let half = T::lit(0.5);
    let well = |f: &Spinor<T>, (eps, ls, la): (T, T, T)| {
        let n = f.norm_sqr();
        let spin2: T = fs.iter().map(|fj| f.expectation(fj).re.powi(2)).sum();
        eps * n + half * ls * n * n + half * la * spin2
    };
    let hop = state.left.dot(&state.right).re * T::lit(2.0);
    well(&state.left, params.well(true)) + well(&state.right, params.well(false)) + params.j * hop
}

pub fn spin_flip<T: Real>(f: &Spinor<T>) -> Spinor<T> {
    f.spin_flip()
}

/// `‖H_eff Ψ − μ Ψ‖`; zero for a stationary state with chemical potential `mu`.
pub fn stationary_residual<T: Real>(state: &SpinorPair<T>, mu: T, params: &SystemParams<T>) -> T {
    let h = apply_hamiltonian(state, params);
    (h - state.scale(Complex::new(mu, T::zero()))).l2()
}

/// `Re(Ψ† H_eff Ψ) / Ψ†Ψ`.
pub fn rayleigh_mu<T: Real>(state: &SpinorPair<T>, params: &SystemParams<T>) -> T {
    let n = state.total_norm();
    if n == T::zero() {
        return T::zero();
    }
    state.dot(&apply_hamiltonian(state, params)).re / n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions<T> {
    pub tol: T,
    pub max_iterations: usize,
}

impl<T: Real> StationaryOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryState<T> {
    pub state: SpinorPair<T>,
    pub mu: T,
    pub residual: T,
    /// Residual evaluations performed, counting the initial check.
    pub iterations: usize,
}

fn renormalize_wells<T: Real>(s: &SpinorPair<T>) -> SpinorPair<T> {
    SpinorPair::new(s.left.normalized(), s.right.normalized())
}

fn residual_vector<T: Real>(y: &[T; 12], params: &SystemParams<T>) -> [T; 12] {
    let s = SpinorPair::from_reals(y);
    let mu = rayleigh_mu(&s, params);
    (apply_hamiltonian(&s, params) - s.scale(Complex::new(mu, T::zero()))).to_reals()
}

fn sum_sq<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum()
}

/// Damped Newton (Levenberg–Marquardt) search for `H_eff Ψ = μ Ψ` with μ the
/// Rayleigh quotient, renormalizing each well to unit norm after every step.
pub fn find_stationary<T: Real>(
    seed: &SpinorPair<T>,
    params: &SystemParams<T>,
    opts: StationaryOptions<T>,
) -> Result<StationaryState<T>> {
    check_finite(seed, params)?;
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidConfig("stationary tolerance must be positive".into()));
    }
    let mut state = renormalize_wells(seed);
    let mut damping = T::lit(1e-3);
    let fd_step = T::epsilon().cbrt();
    let mut last = T::infinity();

    for iter in 1..=opts.max_iterations {
        let y = state.to_reals();
        let r = residual_vector(&y, params);
        let res = sum_sq(&r).sqrt();
        last = res;
        if res < opts.tol {
            return Ok(StationaryState {
                state,
                mu: rayleigh_mu(&state, params),
                residual: res,
                iterations: iter,
            });
        }

        // Central-difference Jacobian of the residual.
        let mut jac = [[T::zero(); 12]; 12];
        for k in 0..12 {
            let h = fd_step * (T::one() + y[k].abs());
            let mut yp = y;
            let mut ym = y;
            yp[k] = yp[k] + h;
            ym[k] = ym[k] - h;
            let rp = residual_vector(&yp, params);
            let rm = residual_vector(&ym, params);
            for i in 0..12 {
                jac[i][k] = (rp[i] - rm[i]) / (h + h);
            }
        }
        let mut jtj = vec![vec![T::zero(); 12]; 12];
        let mut jtr = vec![T::zero(); 12];
        for a in 0..12 {
            for b in 0..12 {
                jtj[a][b] = (0..12).map(|i| jac[i][a] * jac[i][b]).sum();
            }
            jtr[a] = (0..12).map(|i| jac[i][a] * r[i]).sum();
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut sys = jtj.clone();
            for (a, row) in sys.iter_mut().enumerate() {
                row[a] = row[a] + damping * (T::one() + jtj[a][a]);
            }
            let rhs_v: Vec<T> = jtr.iter().map(|v| -*v).collect();
            let Some(delta) = linalg::solve(sys, rhs_v) else {
                damping = damping * T::lit(10.0);
                continue;
            };
            let mut yn = y;
            for k in 0..12 {
                yn[k] = yn[k] + delta[k];
            }
            let candidate = renormalize_wells(&SpinorPair::from_reals(&yn));
            let rn = sum_sq(&residual_vector(&candidate.to_reals(), params)).sqrt();
            if rn.is_finite() && rn < res {
                state = candidate;
                damping = (damping / T::lit(3.0)).max(T::lit(1e-12));
                improved = true;
                break;
            }
            damping = damping * T::lit(4.0);
        }
        if !improved {
            break;
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        residual: last.to_f64_lossy(),
    })
}

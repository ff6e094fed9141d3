//! One-dimensional double-well mode solver (`ħ = m = 1`).
//!
//! Finds the lowest eigenstates of `−½ψ″ + Vψ = Eψ` on a uniform grid with
//! hard walls, builds left/right localized modes from the symmetric and
//! antisymmetric pair, and evaluates the two-mode parameters.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::Real;

pub const MIN_POINTS: usize = 64;
/// Minimum grid points per well half-separation `a`.
pub const MIN_POINTS_PER_WELL: usize = 16;
/// Below this `(e₂−e₁)/(e₁−e₀)` the two-mode picture is flagged as marginal.
pub const MIN_GAP_RATIO: f64 = 10.0;
const EIGEN_RTOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;
const MAX_INVERSE_ITERATIONS: usize = 50;

/// Uniform grid on `[x_min, x_max]`; both endpoints are hard walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_points: usize,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::NonFinite("grid bounds"));
        }
        if x_max <= x_min {
            return Err(Error::InvalidConfig(format!("grid needs x_max > x_min, got [{x_min}, {x_max}]")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidConfig(format!("grid needs at least {MIN_POINTS} points, got {n_points}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn spacing(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize(self.n_points - 1).unwrap()
    }

    pub fn x(&self, i: usize) -> T {
        self.x_min + T::from_usize(i).unwrap() * self.spacing()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DoubleWellPotential<T> {
    /// `V₀ [(x/a)² − 1]²`: minima at `±a`, barrier height `V₀`.
    Quartic { v0: T, a: T },
    /// Samples `(x, V)` with strictly increasing `x`, linearly interpolated.
    Tabulated { x: Vec<T>, v: Vec<T> },
}

impl<T: Real> DoubleWellPotential<T> {
    pub fn quartic(v0: T, a: T) -> Result<Self> {
        if !v0.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite("potential parameters"));
        }
        if v0 < T::zero() {
            return Err(Error::Domain(format!("quartic barrier must be non-negative, got {v0}")));
        }
        if a <= T::zero() {
            return Err(Error::Domain(format!("well half-separation must be positive, got {a}")));
        }
        Ok(Self::Quartic { v0, a })
    }

    pub fn tabulated(x: Vec<T>, v: Vec<T>) -> Result<Self> {
        if x.len() != v.len() || x.len() < 2 {
            return Err(Error::InvalidConfig("tabulated potential needs at least two (x, V) rows".into()));
        }
        if !x.iter().chain(v.iter()).all(|s| s.is_finite()) {
            return Err(Error::NonFinite("tabulated potential"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("tabulated potential x must be strictly increasing".into()));
        }
        Ok(Self::Tabulated { x, v })
    }

    /// Parses two whitespace- or comma-separated columns `x V`; blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let (mut xs, mut vs) = (Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::InvalidConfig(format!("line {}: expected two columns", lineno + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("line {}: cannot parse '{s}'", lineno + 1)))
            };
            xs.push(T::lit(parse(fields[0])?));
            vs.push(T::lit(parse(fields[1])?));
        }
        Self::tabulated(xs, vs)
    }

    pub fn value(&self, x: T) -> Result<T> {
        match self {
            Self::Quartic { v0, a } => {
                let s = (x / *a) * (x / *a) - T::one();
                Ok(*v0 * s * s)
            }
            Self::Tabulated { x: xs, v } => {
                let (lo, hi) = (xs[0], xs[xs.len() - 1]);
                let slack = T::lit(1e-12) * (hi - lo);
                if x < lo - slack || x > hi + slack {
                    return Err(Error::GridMismatch(format!(
                        "grid point {x} outside tabulated range [{lo}, {hi}]"
                    )));
                }
                let k = xs.partition_point(|p| *p <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                Ok(v[k - 1] + (v[k] - v[k - 1]) * (x - x0) / (x1 - x0))
            }
        }
    }

    pub fn sample(&self, grid: &Grid1D<T>) -> Result<Vec<T>> {
        grid.points().into_iter().map(|x| self.value(x)).collect()
    }

    fn check_resolution(&self, grid: &Grid1D<T>) -> Result<()> {
        if let Self::Quartic { a, .. } = self {
            let per_well = *a / grid.spacing();
            if per_well < T::from_usize(MIN_POINTS_PER_WELL).unwrap() {
                return Err(Error::InvalidConfig(format!(
                    "grid resolves the wells with {per_well:.1} points per half-separation; need {MIN_POINTS_PER_WELL}"
                )));
            }
        }
        Ok(())
    }
}

/// Lowest eigenpairs and the localized modes built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct WellModes<T> {
    pub grid: Grid1D<T>,
    pub psi_s: Vec<T>,
    pub psi_a: Vec<T>,
    pub e_s: T,
    pub e_a: T,
    /// Third level, used for the gap ratio.
    pub e_2: T,
    /// Orthonormal localized modes `(ψ_s ∓ ψ_a)/√2`; `φ_L` peaks at `x < 0`.
    pub phi_left: Vec<T>,
    pub phi_right: Vec<T>,
    /// `|φ_L|`, `|φ_R|`: nonnegative amplitudes whose squares are the densities.
    pub sqrt_n_left: Vec<T>,
    pub sqrt_n_right: Vec<T>,
    pub gap_ratio: T,
    pub warnings: Vec<String>,
}

/// Tridiagonal `−½ d²/dx² + V` on the interior points.
struct Tridiagonal<T> {
    diag: Vec<T>,
    off: T,
}

impl<T: Real> Tridiagonal<T> {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let off2 = self.off * self.off;
        let mut q = T::one();
        let mut count = 0;
        for (i, d) in self.diag.iter().enumerate() {
            q = if i == 0 { *d - x } else { *d - x - off2 / q };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (T, T) {
        let r = self.off.abs() * T::lit(2.0);
        let lo = self.diag.iter().copied().fold(T::infinity(), T::min) - r;
        let hi = self.diag.iter().copied().fold(T::neg_infinity(), T::max) + r;
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> Result<T> {
        let (mut lo, mut hi) = self.bounds();
        let tol = T::epsilon() * T::lit(4.0);
        for _ in 0..MAX_BISECTIONS {
            let mid = (lo + hi) / T::lit(2.0);
            if hi - lo <= tol * lo.abs().max(hi.abs()).max(self.off.abs()) || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mid = (lo + hi) / T::lit(2.0);
        let residual = ((hi - lo) / mid.abs().max(T::one())).to_f64_lossy();
        if residual <= EIGEN_RTOL {
            Ok(mid)
        } else {
            Err(Error::NotConverged { iterations: MAX_BISECTIONS, residual })
        }
    }

    /// Solves `(A − λI) y = b` by Thomas elimination with guarded pivots.
    fn shifted_solve(&self, lambda: T, b: &[T]) -> Vec<T> {
        let n = self.diag.len();
        let guard = T::epsilon() * (self.off.abs() + lambda.abs());
        let mut c = vec![T::zero(); n];
        let mut y = vec![T::zero(); n];
        let mut piv = self.diag[0] - lambda;
        if piv.abs() < guard {
            piv = guard;
        }
        c[0] = self.off / piv;
        y[0] = b[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - lambda - self.off * c[i - 1];
            if piv.abs() < guard {
                piv = guard;
            }
            c[i] = self.off / piv;
            y[i] = (b[i] - self.off * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] = y[i] - c[i] * y[i + 1];
        }
        y
    }

    fn apply(&self, v: &[T]) -> Vec<T> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s = s + self.off * v[i - 1];
                }
                if i + 1 < n {
                    s = s + self.off * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Unit eigenvector for `lambda` by inverse iteration, orthogonal to `prev`.
    fn eigenvector(&self, lambda: T, prev: &[Vec<T>]) -> Result<Vec<T>> {
        let n = self.diag.len();
        let unit = |v: &mut Vec<T>| {
            let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
            v.iter_mut().for_each(|x| *x = *x / norm);
        };
        // Deterministic start with components in every mode.
        let mut v: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.1) * T::from_usize(i % 7).unwrap()).collect();
        unit(&mut v);
        let scale = lambda.abs().max(self.off.abs());
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            let mut w = self.shifted_solve(lambda, &v);
            for p in prev {
                let d: T = w.iter().zip(p).map(|(a, b)| *a * *b).sum();
                w.iter_mut().zip(p).for_each(|(a, b)| *a = *a - d * *b);
            }
            if !w.iter().all(|x| x.is_finite()) {
                return Err(Error::Eigensolver("inverse iteration produced non-finite values".into()));
            }
            unit(&mut w);
            let aw = self.apply(&w);
            let r = aw.iter().zip(&w).map(|(a, x)| (*a - lambda * *x) * (*a - lambda * *x)).sum::<T>().sqrt();
            residual = (r / scale).to_f64_lossy();
            v = w;
            if residual <= EIGEN_RTOL {
                return Ok(v);
            }
        }
        Err(Error::NotConverged { iterations: MAX_INVERSE_ITERATIONS, residual })
    }
}

fn trapezoid<T: Real>(f: &[T], h: T) -> T {
    let n = f.len();
    let inner: T = f[1..n - 1].iter().copied().sum();
    h * (inner + (f[0] + f[n - 1]) / T::lit(2.0))
}

/// Central differences inside, second-order one-sided at the ends.
fn derivative<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            if i == 0 {
                (-T::lit(3.0) * f[0] + T::lit(4.0) * f[1] - f[2]) / (two * h)
            } else if i == n - 1 {
                (T::lit(3.0) * f[n - 1] - T::lit(4.0) * f[n - 2] + f[n - 3]) / (two * h)
            } else {
                (f[i + 1] - f[i - 1]) / (two * h)
            }
        })
        .collect()
}

/// Two lowest eigenstates and the localized modes `|ψ_s ± ψ_a|/√2`, with the
/// left mode concentrated at `x < 0`.
pub fn lowest_modes<T: Real>(pot: &DoubleWellPotential<T>, grid: &Grid1D<T>) -> Result<WellModes<T>> {
    pot.check_resolution(grid)?;
    let v = pot.sample(grid)?;
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("potential on grid"));
    }
    let h = grid.spacing();
    let inv_h2 = T::one() / (h * h);
    let interior = &v[1..grid.n_points - 1];
    let op = Tridiagonal {
        diag: interior.iter().map(|x| inv_h2 + *x).collect(),
        off: -inv_h2 / T::lit(2.0),
    };
    let e: Vec<T> = (0..3).map(|k| op.eigenvalue(k)).collect::<Result<_>>()?;
    let vs = op.eigenvector(e[0], &[])?;
    let va = op.eigenvector(e[1], std::slice::from_ref(&vs))?;

    let embed = |inner: Vec<T>| {
        let mut full = Vec::with_capacity(grid.n_points);
        full.push(T::zero());
        full.extend(inner);
        full.push(T::zero());
        let norm = trapezoid(&full.iter().map(|x| *x * *x).collect::<Vec<_>>(), h).sqrt();
        full.into_iter().map(|x| x / norm).collect::<Vec<T>>()
    };
    let xs = grid.points();
    let mut psi_s = embed(vs);
    let mut psi_a = embed(va);
    if psi_s.iter().copied().sum::<T>() < T::zero() {
        psi_s.iter_mut().for_each(|x| *x = -*x);
    }
    let moment: T = psi_a.iter().zip(&xs).map(|(p, x)| *p * *x).sum();
    if moment < T::zero() {
        psi_a.iter_mut().for_each(|x| *x = -*x);
    }
    if is_mirror_symmetric(&v, grid) {
        project_parity(&mut psi_s, true, h);
        project_parity(&mut psi_a, false, h);
    }
    // ψ_a > 0 on the right, so ψ_s − ψ_a sits on the left.
    let r2 = T::SQRT_2();
    let phi_left: Vec<T> = psi_s.iter().zip(&psi_a).map(|(s, a)| (*s - *a) / r2).collect();
    let phi_right: Vec<T> = psi_s.iter().zip(&psi_a).map(|(s, a)| (*s + *a) / r2).collect();
    let sqrt_n_left = phi_left.iter().map(|x| x.abs()).collect();
    let sqrt_n_right = phi_right.iter().map(|x| x.abs()).collect();

    let gap_ratio = (e[2] - e[1]) / (e[1] - e[0]);
    let mut warnings = Vec::new();
    if !(gap_ratio >= T::lit(MIN_GAP_RATIO)) {
        warnings.push(format!(
            "third level is close to the lowest pair (gap ratio {gap_ratio:.3} < {MIN_GAP_RATIO}); two-mode picture is marginal"
        ));
    }
    Ok(WellModes {
        grid: *grid,
        psi_s,
        psi_a,
        e_s: e[0],
        e_a: e[1],
        e_2: e[2],
        phi_left,
        phi_right,
        sqrt_n_left,
        sqrt_n_right,
        gap_ratio,
        warnings,
    })
}

fn is_mirror_symmetric<T: Real>(v: &[T], grid: &Grid1D<T>) -> bool {
    let span = grid.x_max - grid.x_min;
    if (grid.x_min + grid.x_max).abs() > T::lit(1e-12) * span {
        return false;
    }
    let scale = v.iter().fold(T::zero(), |m, x| m.max(x.abs())).max(T::one());
    let n = v.len();
    (0..n / 2).all(|i| (v[i] - v[n - 1 - i]).abs() <= T::lit(1e-12) * scale)
}

/// Keeps the even (or odd) part of `psi` under `x → −x` and renormalizes.
/// Removes the mixing of a nearly degenerate parity pair left by inverse
/// iteration.
fn project_parity<T: Real>(psi: &mut [T], even: bool, h: T) {
    let sign = if even { T::one() } else { -T::one() };
    let mirrored: Vec<T> = psi.iter().rev().copied().collect();
    psi.iter_mut().zip(&mirrored).for_each(|(p, m)| *p = (*p + sign * *m) / T::lit(2.0));
    let norm = trapezoid(&psi.iter().map(|x| *x * *x).collect::<Vec<_>>(), h).sqrt();
    psi.iter_mut().for_each(|x| *x = *x / norm);
}

/// Effective one-dimensional interaction constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCouplings<T> {
    pub c_s: T,
    pub c_a: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParameters<T> {
    /// Two-mode parameters with `j = |J|`.
    pub params: SystemParams<T>,
    pub j_signed: T,
    /// `∫ √n_L √n_R dx` of the nonnegative amplitudes.
    pub overlap: T,
    pub norm_left: T,
    pub norm_right: T,
    /// `∫ n_ν² dx`.
    pub density_integral_left: T,
    pub density_integral_right: T,
}

/// On-site energies, tunnelling coefficient and interaction strengths from
/// the localized modes. The energy integrals use the signed orthonormal modes
/// `φ_L`, `φ_R`; the density integrals use `n_ν = φ_ν²`.
pub fn well_parameters<T: Real>(
    modes: &WellModes<T>,
    pot: &DoubleWellPotential<T>,
    grid: &Grid1D<T>,
    couplings: &LineCouplings<T>,
) -> Result<WellParameters<T>> {
    let n = grid.n_points;
    if modes.grid != *grid || modes.phi_left.len() != n || modes.phi_right.len() != n {
        return Err(Error::GridMismatch(format!(
            "modes were computed on a {}-point grid over [{}, {}], parameters requested on {} points over [{}, {}]",
            modes.phi_left.len(),
            modes.grid.x_min,
            modes.grid.x_max,
            n,
            grid.x_min,
            grid.x_max
        )));
    }
    if !couplings.c_s.is_finite() || !couplings.c_a.is_finite() {
        return Err(Error::NonFinite("couplings"));
    }
    let h = grid.spacing();
    let v = pot.sample(grid)?;
    let (l, r) = (&modes.phi_left, &modes.phi_right);
    let (dl, dr) = (derivative(l, h), derivative(r, h));
    let (al, ar) = (&modes.sqrt_n_left, &modes.sqrt_n_right);
    let half = T::lit(0.5);
    let energy = |f: &[T], df: &[T], g: &[T], dg: &[T]| {
        let integrand: Vec<T> = (0..n).map(|i| half * df[i] * dg[i] + f[i] * v[i] * g[i]).collect();
        trapezoid(&integrand, h)
    };
    let eps_left = energy(l, &dl, l, &dl);
    let eps_right = energy(r, &dr, r, &dr);
    let j_signed = energy(l, &dl, r, &dr);
    let quad = |f: &dyn Fn(usize) -> T| trapezoid(&(0..n).map(f).collect::<Vec<_>>(), h);
    let norm_left = quad(&|i| l[i] * l[i]);
    let norm_right = quad(&|i| r[i] * r[i]);
    let overlap = quad(&|i| al[i] * ar[i]);
    let n2_left = quad(&|i| l[i] * l[i] * l[i] * l[i]);
    let n2_right = quad(&|i| r[i] * r[i] * r[i] * r[i]);
    let params = SystemParams::new(
        eps_left,
        eps_right,
        couplings.c_s * n2_left,
        couplings.c_s * n2_right,
        couplings.c_a * n2_left,
        couplings.c_a * n2_right,
        j_signed.abs(),
    )?;
    Ok(WellParameters {
        params,
        j_signed,
        overlap,
        norm_left,
        norm_right,
        density_integral_left: n2_left,
        density_integral_right: n2_right,
    })
}

/// `(V₀, |J|)` for quartic wells of fixed `a`, evaluated in parallel.
pub fn barrier_scan<T: Real>(v0s: &[T], a: T, grid: &Grid1D<T>) -> Vec<Result<(T, T)>> {
    let couplings = LineCouplings { c_s: T::zero(), c_a: T::zero() };
    v0s.par_iter()
        .map(|&v0| {
            let pot = DoubleWellPotential::quartic(v0, a)?;
            let modes = lowest_modes(&pot, grid)?;
            let wp = well_parameters(&modes, &pot, grid, &couplings)?;
            Ok((v0, wp.params.j))
        })
        .collect()
}

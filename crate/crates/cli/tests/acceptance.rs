//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated and reported like the
//! rest; their failure does not fail the target. Any other failure does.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinor_tunnel::analysis::{
    period_from_samples, period_scan, period_sensitivity, phase_diffusion_times, physical, polarized_initial_state,
    rb87_inputs, sensitivity_note, ScanSettings,
};
use spinor_tunnel::elliptic::{elliptic_k, jacobi_cn_dn};
use spinor_tunnel::integrator::integrate;
use spinor_tunnel::model::{rhs, rhs_spin_form};
use spinor_tunnel::reduced::{analytic_magnetization, analytic_period, integrate_reduced};
use spinor_tunnel::wellmodes::{barrier_scan, lowest_modes, well_parameters, LineCouplings};
use spinor_tunnel::{
    DoubleWellPotential, Grid1D, IntegratorConfig, ReducedParams, ReducedState, Spinor, SpinorPair, SystemParams,
    Trajectory,
};
use spinor_tunnel_cli::figures::fig5_initial_state;

const KNOWN_UNATTAINABLE: &[u32] = &[8];
const LAMBDA_A: f64 = -0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn tau(j: f64, lambda_a: f64) -> f64 {
    analytic_period(&ReducedParams::new(j, lambda_a).unwrap()).unwrap()
}

fn fig4_run(j: f64, t_max: f64, sample_dt: f64) -> Trajectory {
    let params = SystemParams::symmetric(1.0, 1.0, LAMBDA_A, j).unwrap();
    integrate(&polarized_initial_state(), &params, &IntegratorConfig::with_span(t_max, sample_dt)).unwrap()
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)))
}

fn m_left(traj: &Trajectory) -> Vec<f64> {
    traj.observables_left.iter().map(|o| o.m).collect()
}

fn criterion_1() -> Outcome {
    let js = [0.001, 0.002, 0.003, 0.004, 0.0049, 0.0051, 0.006, 0.008, 0.01, 0.02];
    let start = Instant::now();
    let rows = period_scan(&js, LAMBDA_A, &ScanSettings::default());
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    let mut all_ok = true;
    for r in &rows {
        match r.relative_error() {
            Some(e) if r.status == "ok" => worst = worst.max(e),
            _ => all_ok = false,
        }
    }
    outcome(
        all_ok && worst < 1e-3 && elapsed < 60.0,
        format!("10 points, max relative error {worst:.2e} (< 1e-3), runtime {elapsed:.1} s (< 60 s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for j in [0.001, 0.0049] {
        let traj = fig4_run(j, 5.0 * tau(j, LAMBDA_A), 0.5);
        let (lo, _) = min_max(&m_left(&traj));
        let ok = lo >= 0.19 && (j != 0.001 || (0.9797..=0.9799).contains(&lo));
        pass &= ok;
        parts.push(format!("J={j}: min M {lo:.6}"));
    }
    for j in [0.0051, 0.01] {
        let traj = fig4_run(j, 5.0 * tau(j, LAMBDA_A), 0.5);
        let (lo, _) = min_max(&m_left(&traj));
        pass &= lo <= -0.999;
        parts.push(format!("J={j}: min M {lo:.6}"));
    }
    outcome(pass, parts.join("; "))
}

/// Ranges `max − min` over consecutive windows of length `window`.
fn window_ranges(times: &[f64], v: &[f64], window: f64) -> Vec<f64> {
    let t_end = times.last().copied().unwrap_or(0.0);
    let n = (t_end / window + 1e-9).floor() as usize;
    (0..n)
        .map(|k| {
            let (a, b) = (k as f64 * window, (k + 1) as f64 * window);
            let slice: Vec<f64> =
                times.iter().zip(v).filter(|(t, _)| **t >= a && **t <= b).map(|(_, x)| *x).collect();
            let (lo, hi) = min_max(&slice);
            hi - lo
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let j = 0.001;
    let state = fig5_initial_state();
    let t_max = 4.0 * PI / j;
    let run = |lambda_a: f64| {
        let params = SystemParams::symmetric(1.0, 1.0, lambda_a, j).unwrap();
        let traj = integrate(&state, &params, &IntegratorConfig::with_span(t_max, 0.5)).unwrap();
        let v = traj.observables_left.iter().map(|o| o.rho_pp_minus_rho_00()).collect::<Vec<f64>>();
        (traj.times, v)
    };
    let (_, linear) = run(0.0);
    let (lo0, hi0) = min_max(&linear);
    let ok_linear = (lo0 - -0.008).abs() <= 0.002 && (hi0 - 0.985).abs() <= 0.002;
    let (times, coupled) = run(LAMBDA_A);
    let (lo1, _) = min_max(&coupled);
    let ranges = window_ranges(&times, &coupled, PI / j);
    let (rmin, rmax) = min_max(&ranges);
    let variation = (rmax - rmin) / rmax;
    outcome(
        ok_linear && lo1 < 0.0 && ranges.len() >= 2 && variation > 0.01,
        format!(
            "lambda_A=0: [{lo0:.4}, {hi0:.4}]; lambda_A=-0.01: min {lo1:.4}, per-cycle range varies {:.1}% over {} windows of pi/J",
            variation * 100.0,
            ranges.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for j in [0.001, 0.0051] {
        let t = tau(j, LAMBDA_A);
        let cfg = IntegratorConfig::with_span(t, t / 2000.0);
        let full = integrate(&polarized_initial_state(), &SystemParams::symmetric(1.0, 1.0, LAMBDA_A, j).unwrap(), &cfg)
            .unwrap();
        let red = integrate_reduced(&ReducedState::new(1.0, 0.0, 0.0), &ReducedParams::new(j, LAMBDA_A).unwrap(), &cfg)
            .unwrap();
        for (o, s) in full.observables_left.iter().zip(&red.states) {
            worst = worst.max((o.m - s.m).abs()).max((o.r0 - s.r0).abs()).max((o.i0 - s.i0).abs());
        }
    }
    outcome(worst < 1e-6, format!("max |full - reduced| over one period: {worst:.2e} (< 1e-6)"))
}

fn criterion_5() -> Outcome {
    let j = 0.0051;
    let t_max = 10.0 * tau(j, LAMBDA_A);
    let traj = fig4_run(j, t_max, 0.5);
    let drifts = [
        ("norm", Trajectory::drift(&traj.total_norm)),
        ("energy", Trajectory::drift(&traj.energy)),
        ("F_z", Trajectory::drift(&traj.total_magnetization)),
        ("R+", Trajectory::drift(&traj.r_plus)),
    ];
    let red = integrate_reduced(
        &ReducedState::new(1.0, 0.0, 0.0),
        &ReducedParams::new(j, LAMBDA_A).unwrap(),
        &IntegratorConfig::with_span(t_max, 0.5),
    )
    .unwrap();
    let c = red.conserved_drift();
    let pass = drifts.iter().all(|(_, d)| *d < 1e-8) && c < 1e-10;
    let listed: Vec<String> = drifts.iter().map(|(n, d)| format!("{n} {d:.1e}")).collect();
    outcome(pass, format!("{} (< 1e-8); C {c:.1e} (< 1e-10)", listed.join(", ")))
}

fn random_state(rng: &mut ChaCha8Rng) -> SpinorPair {
    let mut c = || Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let left = Spinor::new(c(), c(), c()).normalized();
    let right = Spinor::new(c(), c(), c()).normalized();
    SpinorPair::new(left, right)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let mut worst = 0.0f64;
    for lambda_a in [-0.01, 0.01] {
        let params = SystemParams::symmetric(1.0, 1.0, lambda_a, 0.0051).unwrap();
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let a = rhs(&s, &params).unwrap().to_reals();
            let b = rhs_spin_form(&s, &params).unwrap().to_reals();
            worst = a.iter().zip(&b).fold(worst, |m, (x, y)| m.max((x - y).abs()));
        }
    }
    outcome(worst < 1e-12, format!("2 x 1000 states, max componentwise difference {worst:.1e} (< 1e-12)"))
}

/// `K = (π/2) Σ [(2n)!/(2^{2n} n!²)]² k^{2n}`.
fn k_series(k: f64) -> f64 {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for n in 1..500 {
        let r = (2 * n - 1) as f64 / (2 * n) as f64;
        term *= r * r * k * k;
        sum += term;
        if term < 1e-20 {
            break;
        }
    }
    PI / 2.0 * sum
}

/// Logarithmic expansion of `K` about `k = 1`.
fn k_log(k: f64) -> f64 {
    let kp2 = (1.0 - k) * (1.0 + k);
    let l = (4.0 / kp2.sqrt()).ln();
    let (mut coef, mut d, mut sum) = (1.0f64, 0.0f64, l);
    for n in 1..200 {
        let r = (2 * n - 1) as f64 / (2 * n) as f64;
        coef *= r * r * kp2;
        d += 2.0 / (((2 * n - 1) * 2 * n) as f64);
        let term = coef * (l - d);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn criterion_7() -> Outcome {
    let k0 = (elliptic_k(0.0f64).unwrap() - PI / 2.0).abs();
    let series = (0..=300).map(|i| i as f64 * 0.001).fold(0.0f64, |m, k| m.max((elliptic_k(k).unwrap() - k_series(k)).abs()));
    let asym = [0.99, 0.992, 0.995, 0.998, 0.999, 0.9995, 0.9999]
        .iter()
        .fold(0.0f64, |m, k| m.max((elliptic_k(*k).unwrap() - k_log(*k)).abs()));
    let mut periodic = 0.0f64;
    for k in [0.1, 0.5, 0.9, 0.99] {
        let big_k = elliptic_k(k).unwrap();
        for i in 0..100 {
            let u = i as f64 * 0.137;
            let (cn, dn) = jacobi_cn_dn(u, k).unwrap();
            let (cn4, _) = jacobi_cn_dn(u + 4.0 * big_k, k).unwrap();
            let (_, dn2) = jacobi_cn_dn(u + 2.0 * big_k, k).unwrap();
            periodic = periodic.max((cn - cn4).abs()).max((dn - dn2).abs());
        }
    }
    let mut sampled = 0.0f64;
    for j in [0.001, 0.0049, 0.0051, 0.02] {
        let p = ReducedParams::new(j, LAMBDA_A).unwrap();
        let t = analytic_period(&p).unwrap();
        let dt = t / 2000.0;
        let times: Vec<f64> = (0..=10_000).map(|i| i as f64 * dt).collect();
        let m: Vec<f64> = times.iter().map(|s| analytic_magnetization(*s, &p).unwrap()).collect();
        let est = period_from_samples(&times, &m).unwrap();
        sampled = sampled.max((est.period - t).abs() / t);
    }
    outcome(
        k0 <= 1e-15 && series <= 1e-12 && asym <= 1e-6 && periodic <= 1e-10 && sampled <= 1e-4,
        format!(
            "K(0) err {k0:.1e}; series {series:.1e}; log asymptote {asym:.1e}; periodicity {periodic:.1e}; sampled period {sampled:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let taus: Vec<f64> = [0.9, 0.99, 0.999].iter().map(|r| tau(r * LAMBDA_A.abs() / 2.0, LAMBDA_A)).collect();
    let increasing = taus.windows(2).all(|w| w[1] > w[0]);
    let ratio = taus[2] / taus[1];
    outcome(
        increasing && (1.4..=1.9).contains(&ratio),
        format!(
            "tau = {:.2}, {:.2}, {:.2} (increasing: {increasing}); tau(0.999)/tau(0.99) = {ratio:.4}, bracket [1.4, 1.9]",
            taus[0], taus[1], taus[2]
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for j in [0.001, 0.0049, 0.0051, 0.01] {
        let traj = fig4_run(j, 2.0 * tau(j, LAMBDA_A), 0.5);
        for o in &traj.observables_left {
            let want = LAMBDA_A * (1.0 - o.m * o.m) / (4.0 * j);
            worst = worst.max((o.r0 - want).abs());
        }
    }
    outcome(worst < 1e-8, format!("max |R0 - lambda_A(1-M^2)/4J| = {worst:.2e} (< 1e-8)"))
}

fn criterion_10() -> Outcome {
    let grid = Grid1D::new(-6.0, 6.0, 1024).unwrap();
    let pot = DoubleWellPotential::quartic(10.0, 2.0).unwrap();
    let modes = lowest_modes(&pot, &grid).unwrap();
    let wp = well_parameters(&modes, &pot, &grid, &LineCouplings { c_s: 1.0, c_a: -0.01 }).unwrap();
    let p = wp.params;
    let eps_rel = (p.eps_left - p.eps_right).abs() / p.eps_left.abs();
    let half = (modes.e_a - modes.e_s) / 2.0;
    let j_rel = (p.j - half).abs() / half;
    let js: Vec<f64> = barrier_scan(&[5.0, 10.0, 20.0, 40.0], 2.0, &grid).into_iter().map(|r| r.unwrap().1).collect();
    let decreasing = js.windows(2).all(|w| w[1] < w[0]);
    outcome(
        eps_rel <= 1e-10 && j_rel <= 0.1 && decreasing,
        format!(
            "eps_L/eps_R rel diff {eps_rel:.1e}; |J| vs (e_a-e_s)/2: {:.1}%; |J| over V0=5,10,20,40: {:.3e}, {:.3e}, {:.3e}, {:.3e}",
            j_rel * 100.0,
            js[0],
            js[1],
            js[2],
            js[3]
        ),
    )
}

fn criterion_11() -> Outcome {
    let inp = rb87_inputs().unwrap();
    let t = phase_diffusion_times(&inp, physical::HBAR).unwrap();
    let ratio = t.tau_c_a / t.tau_c_s;
    let s = period_sensitivity(1e7f64).unwrap();
    let note = sensitivity_note(1e7).unwrap();
    outcome(
        ratio >= 125.0 && ratio <= 500.0 && (s - 3.16e-4).abs() <= 1e-6,
        format!(
            "tau_A/tau_S = {ratio:.1} (250 within x2); tau_S = {:.2} s, tau_A = {:.0} s; {note}",
            t.tau_c_s, t.tau_c_a
        ),
    )
}

fn header_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap_or_default()
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let expected: [(u8, &str, &[&str]); 5] = [
        (1, "fig1_full.csv", &["# j = 0.02", "# lambda_a = -0.01"]),
        (2, "fig2_portrait.csv", &["# j = 0.0051", "# lambda_a = -0.01"]),
        (3, "fig3_period.csv", &["# lambda_a = -0.01"]),
        (
            4,
            "fig4_j0.001.csv",
            &["# xi0 = (1,0,0)", "# eta0 = (0,0,1)", "# eps = 1.0", "# lambda_s = 1.0", "# lambda_a = -0.01", "# j = 0.001"],
        ),
        (
            5,
            "fig5_lambda_a_-0.01.csv",
            &["# xi0_caption = (0.9962, 0.0872, 0)", "# eps = 1.0", "# lambda_s = 1.0", "# lambda_a = -0.01", "# j = 0.001"],
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, file, keys) in expected {
        let out = dir.path().join(format!("fig{n}"));
        let code = spinor_tunnel_cli::run(["spinor-tunnel", "figure", &n.to_string(), "--out", out.to_str().unwrap()]);
        let files: Vec<_> = std::fs::read_dir(&out).map(|d| d.flatten().collect()).unwrap_or_default();
        let non_empty = !files.is_empty()
            && files.iter().all(|f| {
                std::fs::read_to_string(f.path()).map(|t| t.lines().filter(|l| !l.starts_with('#')).count() > 1).unwrap_or(false)
            });
        let header = header_lines(&out.join(file));
        let missing: Vec<&str> = keys.iter().copied().filter(|k| !header.iter().any(|h| h == k)).collect();
        let ok = code == 0 && non_empty && missing.is_empty();
        pass &= ok;
        parts.push(if ok { format!("fig{n} ok") } else { format!("fig{n} exit {code}, missing {missing:?}") });
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "period agreement across the J scan", criterion_1),
        (2, "self-trapping and full-oscillation regimes", criterion_2),
        (3, "rho_++ - rho_00 oscillation with and without spin interaction", criterion_3),
        (4, "reduced vs full-system equivalence", criterion_4),
        (5, "conservation ledger over 10 periods", criterion_5),
        (6, "Hamiltonian vs spin-form right-hand side", criterion_6),
        (7, "special functions", criterion_7),
        (8, "critical slowdown near 2J = |lambda_A|", criterion_8),
        (9, "trajectory relation R0(M)", criterion_9),
        (10, "double-well modes and two-mode parameters", criterion_10),
        (11, "physical estimates", criterion_11),
        (12, "figure presets", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] #{id} {name}: {} ({secs:.1} s)", o.detail);
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria pass except known-unattainable {KNOWN_UNATTAINABLE:?}");
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        std::process::exit(1);
    }
}

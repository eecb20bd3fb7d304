//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use risnoma::core::analytic::{
    analytic_outage, gil_pelaez_cdf, stats_a, stats_b, stats_c, stats_d, FnCf, QuadComponent,
    QuadFormSpec,
};
use risnoma::core::channel::{path_loss_db, LinkVariances};
use risnoma::core::config::{AlphaMode, SystemConfig, UserId};
use risnoma::core::link::LinkBudget;
use risnoma::core::montecarlo::Term;
use risnoma::core::optimizer::{optimize, OptimizerMode, OptimizerSettings};
use risnoma::core::quadrature::QuadratureSettings;
use risnoma::core::Complex64;
use risnoma::fit::fit_gamma;
use risnoma::parallel::{accumulate_terms, estimate_both, sample_sinr, with_workers};
use risnoma::presets::preset;
use risnoma::sweep::{csv_body, run_sweep, RunOptions};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            summary: String::new(),
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details
            .push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn analytic(c: &SystemConfig) -> [f64; 2] {
    UserId::BOTH.map(|u| analytic_outage(c, u).unwrap().op)
}

fn unit_budget(alpha: f64) -> LinkBudget {
    let mut b = LinkBudget::with_alpha(&SystemConfig::default(), alpha).unwrap();
    b.m = 64;
    b.n = 64;
    b.variances = LinkVariances::unit();
    b
}

// 1 and 2 share one million draws.
fn term_moments() -> (Outcome, Outcome) {
    let n = 1_000_000;
    let acc = accumulate_terms(&unit_budget(1.0), 0xACC, n).unwrap();
    let mut c1 = Outcome::new();
    let expected = [
        (Term::A, stats_a(1.0, 64, 1.0, 1.0)),
        (Term::B, stats_b(64, 1.0, 1.0)),
        (Term::C, stats_c(1.0, 64, 1.0, 1.0)),
        (Term::D, stats_d(64, 1.0, 1.0)),
    ];
    for (t, s) in expected {
        let mean = acc.mean(t);
        let var = acc.variance(t);
        // Zero-mean terms are judged against their spread instead.
        let mean_err = if s.mu == 0.0 {
            mean.norm() / s.var.sqrt()
        } else {
            (mean - Complex64::new(s.mu, 0.0)).norm() / s.mu
        };
        let var_err = (var / s.var - 1.0).abs();
        c1.check(
            mean_err <= 0.01,
            format!(
                "{t:?} mean {mean:.4} vs {:.4}: rel err {mean_err:.2e} (<= 1e-2)",
                s.mu
            ),
        );
        c1.check(
            var_err <= 0.02,
            format!(
                "{t:?} var {var:.4} vs {:.4}: rel err {var_err:.2e} (<= 2e-2)",
                s.var
            ),
        );
    }
    c1.summary = format!("{n} realizations, M=N=64, alpha=1, unit variances");

    let mut c2 = Outcome::new();
    let (ac, bd) = (acc.corr_ac(), acc.corr_bd());
    c2.check(ac <= 0.005, format!("|rho(A,C)| = {ac:.2e} (<= 5e-3)"));
    c2.check(bd <= 0.005, format!("|rho(B,D)| = {bd:.2e} (<= 5e-3)"));
    c2.summary = format!("|rho(A,C)| = {ac:.2e}, |rho(B,D)| = {bd:.2e}");
    (c1, c2)
}

fn noncentral_chi2_cdf(k: f64, lambda: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut weight = (-lambda / 2.0).exp();
    for j in 0..200 {
        if j > 0 {
            weight *= lambda / 2.0 / j as f64;
        }
        sum += weight * ChiSquared::new(k + 2.0 * j as f64).unwrap().cdf(x);
    }
    sum
}

fn gil_pelaez() -> Outcome {
    let quad = QuadratureSettings::default();
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    let mut cmp = |o: &mut Outcome, what: String, got: f64, want: f64| {
        let err = (got - want).abs();
        worst = worst.max(err);
        o.check(
            err <= 1e-4,
            format!("{what}: {got:.8} vs {want:.8} (err {err:.1e})"),
        );
    };

    let normal = FnCf::new(|w: f64| Complex64::new((-0.5 * w * w).exp(), 0.0), 0.0, 1.0);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    for g in [-1.96, -1.0, 0.0, 0.5, 2.326] {
        let got = gil_pelaez_cdf(&normal, g, &quad).unwrap().value;
        cmp(&mut o, format!("N(0,1) at {g}"), got, std_normal.cdf(g));
    }
    let expo = FnCf::new(|w: f64| Complex64::new(1.0, -w).inv(), 1.0, 1.0);
    for g in [0.5, 1.0, 2.0] {
        let got = gil_pelaez_cdf(&expo, g, &quad).unwrap().value;
        cmp(&mut o, format!("Exp(1) at {g}"), got, 1.0 - (-g).exp());
    }
    let chi2 = QuadFormSpec::new(vec![QuadComponent::central(1.0, 2, 1.0)]);
    let got = gil_pelaez_cdf(&chi2, 2.0, &quad).unwrap().value;
    cmp(&mut o, "chi2(2) at 2".into(), got, 1.0 - (-1.0f64).exp());
    let nc = QuadFormSpec::new(vec![QuadComponent::noncentral(1.0, 1.0, 1.0)]);
    for g in [0.5, 1.0, 2.0, 4.0] {
        let got = gil_pelaez_cdf(&nc, g, &quad).unwrap().value;
        cmp(
            &mut o,
            format!("ncchi2(1, 1) at {g}"),
            got,
            noncentral_chi2_cdf(1.0, 1.0, g),
        );
    }
    o.summary = format!("13 closed-form points, worst abs err {worst:.1e} (<= 1e-4)");
    o
}

fn outage_agreement() -> Outcome {
    let mut o = Outcome::new();
    let cases = [
        (32, 1.0, 33.0, 0.0),
        (64, 8.5, 25.0, 0.0),
        (128, 100.0, 15.0, 0.0),
        (64, 100.0, 15.0, 0.01),
        (128, 8.5, 15.0, 0.01),
    ];
    let mut worst: f64 = 0.0;
    for (size, alpha, pt, eps) in cases {
        let c = SystemConfig {
            m_active: size,
            n_passive: size,
            alpha_mode: AlphaMode::Fixed,
            alpha_linear: alpha,
            pt_user_dbm: pt,
            epsilon_sic: eps,
            rate_threshold_bps_hz: 2.0,
            mc_trials: 1_000_000,
            seed: 0xC4 + size as u64,
            ..SystemConfig::default()
        };
        let mc = estimate_both(&c).unwrap();
        let an = analytic(&c);
        for u in UserId::BOTH {
            let i = u.index() as usize - 1;
            let tol = f64::max(0.01, 3.0 * mc[i].std_err);
            let diff = (mc[i].op - an[i]).abs();
            worst = worst.max(diff);
            o.check(
                diff <= tol,
                format!(
                    "M=N={size} alpha={alpha} Pt={pt} dBm eps={eps} U{}: mc {:.4e} analytic {:.4e} diff {diff:.1e} (<= {tol:.1e})",
                    u.index(),
                    mc[i].op,
                    an[i]
                ),
            );
        }
    }
    o.summary = format!("5 configs x 2 users, 1e6 trials each, worst |diff| {worst:.1e}");
    o
}

fn optimizer_anchor() -> Outcome {
    let mut o = Outcome::new();
    let out = optimize(&SystemConfig::default(), &OptimizerSettings::default()).unwrap();
    o.check(
        (out.pt_ris_dbm + 47.0).abs() <= 2.0,
        format!("pt_ris = {:.3} dBm (-47 +- 2)", out.pt_ris_dbm),
    );
    o.check(
        (6.0..=11.0).contains(&out.alpha),
        format!("alpha = {:.3} ([6, 11])", out.alpha),
    );
    o.summary = format!(
        "pt_ris = {:.2} dBm, alpha = {:.2}, mode {}, OP1 {:.2e} OP2 {:.2e}",
        out.pt_ris_dbm, out.alpha, out.mode, out.op1, out.op2
    );
    o
}

fn size_anchor() -> Outcome {
    let mut o = Outcome::new();
    let sizes: Vec<usize> = (200..=600).step_by(10).collect();
    let ops: Vec<[f64; 2]> = sizes
        .iter()
        .map(|&s| {
            analytic(&SystemConfig {
                m_active: s,
                n_passive: s,
                alpha_mode: AlphaMode::Fixed,
                alpha_linear: 8.5,
                ..SystemConfig::default()
            })
        })
        .collect();
    let first = sizes
        .iter()
        .zip(&ops)
        .find(|(_, op)| op[1] < 0.5)
        .map(|(s, _)| *s);
    match first {
        Some(s) => o.check(
            (240..=360).contains(&s),
            format!("smallest M=N with OP2 < 0.5: {s} ([240, 360])"),
        ),
        None => o.check(false, "OP2 never drops below 0.5 up to M=N=600".into()),
    }
    let start = sizes.iter().position(|&s| Some(s) == first).unwrap_or(0);
    let mut monotone = true;
    for w in ops[start..].windows(2) {
        monotone &= w[1]
            .iter()
            .zip(&w[0])
            .all(|(next, prev)| *next <= prev + 1e-8);
    }
    o.check(
        monotone,
        "OP1 and OP2 non-increasing in size from there up to 600".into(),
    );
    o.summary =
        format!("analytic sweep M=N 200..600 step 10, alpha = 8.5, first OP2 < 0.5 at {first:?}");
    o
}

fn orderings() -> Outcome {
    let mut o = Outcome::new();
    let quad_tol = QuadratureSettings::default().abs_tol;

    // Transmit power at M=N=512, both routes.
    let at_pt = |pt: f64| SystemConfig {
        pt_user_dbm: pt,
        mc_trials: 20_000,
        ..SystemConfig::default()
    };
    let mut prev_an = [1.0f64; 2];
    let mut prev_mc: Option<[(f64, f64); 2]> = None;
    let (mut an_ok, mut mc_ok) = (true, true);
    for pt in (0..=23).map(f64::from) {
        let c = at_pt(pt);
        let an = analytic(&c);
        let mc = estimate_both(&c).unwrap().map(|r| (r.op, r.std_err));
        for u in 0..2 {
            an_ok &= an[u] <= prev_an[u] + 2.0 * quad_tol;
            if let Some(p) = prev_mc {
                mc_ok &= mc[u].0 <= p[u].0 + 3.0 * f64::hypot(mc[u].1, p[u].1);
            }
        }
        prev_an = an;
        prev_mc = Some(mc);
    }
    o.check(
        an_ok,
        "analytic OP1, OP2 non-increasing in Pt over 0..23 dBm at M=N=512".into(),
    );
    o.check(
        mc_ok,
        "Monte-Carlo OP1, OP2 non-increasing in Pt (within 3 std_err)".into(),
    );

    // SIC residual, user 2.
    let mut prev = (0.0f64, 0.0f64, 0.0f64);
    let (mut an_ok, mut mc_ok) = (true, true);
    let mut trace = Vec::new();
    for eps in [0.0, 0.001, 0.01, 0.1] {
        let c = SystemConfig {
            epsilon_sic: eps,
            ..SystemConfig::default()
        };
        let an = analytic_outage(&c, UserId::U2).unwrap().op;
        let mc = estimate_both(&c).unwrap()[1];
        an_ok &= an >= prev.0 - 2.0 * quad_tol;
        mc_ok &= mc.op >= prev.1 - 3.0 * f64::hypot(mc.std_err, prev.2);
        prev = (an, mc.op, mc.std_err);
        trace.push(format!("{eps}: {an:.3e}"));
    }
    o.check(
        an_ok,
        format!("analytic OP2 non-decreasing in eps ({})", trace.join(", ")),
    );
    o.check(
        mc_ok,
        "Monte-Carlo OP2 non-decreasing in eps (within 3 std_err)".into(),
    );

    // Optimized against fixed alpha = 8.5 for the user(s) the optimizer serves.
    for (size, eps) in [(128, 0.0), (256, 0.0), (384, 0.0), (512, 0.0), (512, 0.01)] {
        let c = SystemConfig {
            m_active: size,
            n_passive: size,
            epsilon_sic: eps,
            ..SystemConfig::default()
        };
        let fixed = analytic(&c);
        let out = optimize(&c, &OptimizerSettings::default()).unwrap();
        let (opt, base) = match out.mode {
            OptimizerMode::Balanced => (out.max_op, fixed[0].max(fixed[1])),
            m => {
                let u = m.served_user().unwrap();
                (out.op(u), fixed[u.index() as usize - 1])
            }
        };
        o.check(
            opt <= base + 2.0 * quad_tol,
            format!(
                "M=N={size} eps={eps} {}: optimized {opt:.3e} <= fixed {base:.3e}",
                out.mode
            ),
        );
    }
    o.summary = "Pt, eps and optimized-vs-fixed orderings".into();
    o
}

fn path_loss() -> Outcome {
    let mut o = Outcome::new();
    for (d, want) in [(20.22, 88.795), (35.51, 97.772), (55.73, 104.953)] {
        let got = path_loss_db(d, 5.0).unwrap();
        o.check(
            (got - want).abs() <= 1e-3,
            format!(
                "L({d} m) = {got:.4} dB vs {want} (err {:.1e}, <= 1e-3)",
                (got - want).abs()
            ),
        );
    }
    o.summary = "fc = 5 GHz at 20.22 / 35.51 / 55.73 m".into();
    o
}

fn gamma_fit() -> Outcome {
    let mut o = Outcome::new();
    let samples = sample_sinr(&SystemConfig::default(), UserId::U1, 100_000).unwrap();
    let fit = fit_gamma(&samples).unwrap();
    o.check(
        fit.ks_stat < 0.05,
        format!("KS = {:.4} (< 0.05)", fit.ks_stat),
    );
    o.summary = format!(
        "1e5 gamma1 samples at defaults: shape {:.3}, scale {:.3e}, KS {:.4}",
        fit.shape, fit.scale, fit.ks_stat
    );
    o
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let spec = preset("fig6").unwrap();
    let base = SystemConfig {
        mc_trials: 5_000,
        ..SystemConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for workers in [1, 4] {
        let path = dir.path().join(format!("fig6_w{workers}.csv"));
        with_workers(Some(workers), || {
            run_sweep(&spec, &base, &path, &RunOptions::default())
        })
        .unwrap()
        .unwrap();
        bodies.push(csv_body(&std::fs::read_to_string(&path).unwrap()));
    }
    let same = bodies[0] == bodies[1];
    o.check(
        same,
        format!(
            "fig6 body, 1 vs 4 workers: {} bytes each, identical = {same}",
            bodies[0].len()
        ),
    );
    o.summary = format!("preset fig6 with 5000 trials at 1 and 4 workers, identical = {same}");
    o
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, start: Instant, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} [{id:>2}] {name}: {} ({:.1} s)",
            o.summary,
            start.elapsed().as_secs_f64()
        );
        for d in &o.details {
            println!("         {d}");
        }
        if !o.pass {
            failed += 1;
        }
    };

    let t = Instant::now();
    let (c1, c2) = term_moments();
    report(1, "term moments", t, c1);
    report(2, "term correlations", t, c2);
    let t = Instant::now();
    report(3, "Gil-Pelaez oracles", t, gil_pelaez());
    let t = Instant::now();
    report(4, "analytic vs Monte-Carlo outage", t, outage_agreement());
    let t = Instant::now();
    report(5, "optimizer anchor", t, optimizer_anchor());
    let t = Instant::now();
    report(6, "minimum RIS size", t, size_anchor());
    let t = Instant::now();
    report(7, "orderings", t, orderings());
    let t = Instant::now();
    report(8, "path loss", t, path_loss());
    let t = Instant::now();
    report(9, "Gamma fit", t, gamma_fit());
    let t = Instant::now();
    report(10, "determinism", t, determinism());

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

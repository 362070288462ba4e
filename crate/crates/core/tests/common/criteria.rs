//! The nine acceptance criteria, shared by the acceptance targets of the
//! library and the command-line crates.
//!
//! Every reference value is computed here from closed forms or independent
//! quadrature and never from the code under test.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use yieldlab::bv1d::{brute_force_oracle_1d, minimize_relaxed_1d};
use yieldlab::competitor::{
    build_region, bump_level_set, closed_form_gap_profile, closed_form_gap_rect, default_eps,
    divergence_identity_residual, energy_gap, field_constants, profile_threshold, rect_threshold,
    scan_family, search_certificate, taylor_flux_check, CaseTag, FamilySpec, GeometryParams,
};
use yieldlab::field2d::{
    extract_level_set, profile_ode_residual, profile_phi, radial_bump, region_integral, BBox,
    FnField, ImplicitRegion, Point, Quadrature, SampledField2D, ScalarField2D,
};
use yieldlab::laws::{
    build_envelope, solve_yield_strain, BulkKind, BulkLaw, CohesiveKind, CohesiveLaw, EnvelopeLaw,
    ScalarLaw,
};
use yieldlab::report::{fmt_g, Table};
use yieldlab::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Fails as stated, but exactly in the way recorded in the decisions
    /// ledger; the harness still exits successfully.
    KnownDeviation,
    Fail,
}

#[derive(Debug)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::KnownDeviation => "FAIL (known deviation)",
            Status::Fail => "FAIL",
        };
        format!(
            "criterion {} [{}] {}: {} ({:.2}s)",
            self.id,
            tag,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects failed checks of one criterion.
#[derive(Default)]
pub struct Checks {
    failures: Vec<String>,
}

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let shown: Vec<&str> = self.failures.iter().take(3).map(String::as_str).collect();
        format!(
            "{} failed check(s): {}",
            self.failures.len(),
            shown.join("; ")
        )
    }
}

pub fn outcome(
    id: u32,
    title: &'static str,
    start: Instant,
    checks: &Checks,
    detail: String,
) -> Outcome {
    let (status, detail) = if checks.is_ok() {
        (Status::Pass, detail)
    } else {
        (Status::Fail, format!("{}; {detail}", checks.summary()))
    };
    Outcome {
        id,
        title,
        status,
        detail,
        elapsed: start.elapsed(),
    }
}

pub struct Pair {
    pub name: String,
    pub p: f64,
    pub bulk: BulkLaw,
    pub g: CohesiveLaw,
    pub env: EnvelopeLaw,
}

impl Pair {
    pub fn is_cusp(&self) -> bool {
        matches!(self.g.kind(), CohesiveKind::Cusp)
    }

    /// Law pair in the JSON layout of scenario configurations.
    pub fn laws_json(&self) -> String {
        let cohesive = match self.g.kind() {
            CohesiveKind::Exp => r#"{"kind": "exp"}"#.to_string(),
            CohesiveKind::Parabola { c } => format!(r#"{{"kind": "parabola", "c": {c}}}"#),
            CohesiveKind::Cusp => r#"{"kind": "cusp"}"#.to_string(),
            CohesiveKind::Linear => unreachable!(),
        };
        format!(
            r#"{{"bulk": {{"kind": "power", "p": {}}}, "cohesive": {cohesive}}}"#,
            self.p
        )
    }
}

/// `xi^p / p` for `p in {2, 3}` crossed with the exponential, parabolic
/// (`c = 0.4`) and cusp cohesive laws.
pub fn catalog() -> Vec<Pair> {
    let mut out = Vec::new();
    for p in [2.0, 3.0] {
        for (name, kind) in [
            ("exp", CohesiveKind::Exp),
            ("parabola", CohesiveKind::Parabola { c: 0.4 }),
            ("cusp", CohesiveKind::Cusp),
        ] {
            let bulk = BulkLaw::new(BulkKind::Power { p }).unwrap();
            let g = CohesiveLaw::new(kind).unwrap();
            let env = build_envelope(&bulk, &g).unwrap();
            out.push(Pair {
                name: format!("p={p}/{name}"),
                p,
                bulk,
                g,
                env,
            });
        }
    }
    out
}

/// Every catalog law has `G'(0) = 1`, so `F'(e) = e^{p-1} = 1` gives `e_M = 1`.
const SLOPE0: f64 = 1.0;
const YIELD: f64 = 1.0;

fn envelope_oracle(p: f64, xi: f64) -> f64 {
    if xi <= YIELD {
        xi.powf(p) / p
    } else {
        1.0 / p + SLOPE0 * (xi - YIELD)
    }
}

pub fn affine(lambda: f64) -> SampledField2D {
    SampledField2D::affine(lambda, BBox::centered(2.5))
}

pub fn geometry(h: f64) -> GeometryParams {
    GeometryParams {
        r: 1.0,
        big_r: 2.0,
        h,
    }
}

/// Composite five-point Gauss-Legendre rule.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * step;
            X.iter()
                .zip(W)
                .map(|(x, w)| w * f(mid + 0.5 * step * x))
                .sum::<f64>()
                * 0.5
                * step
        })
        .sum()
}

/// Gap of the scaled competitor on the sublevel slab or the tapered profile
/// above `u = lambda x_2`, by one-dimensional quadrature of the bulk saving
/// and the jump cost along each boundary arc.
pub fn affine_gap_oracle(
    case: CaseTag,
    pair: &Pair,
    lambda: f64,
    alpha: f64,
    sigma: f64,
) -> Option<f64> {
    let (big_r, r) = (2.0_f64, 1.0_f64);
    let saving = pair.env.value(lambda) - pair.env.value(alpha * lambda);
    let g = |t: f64| pair.g.value(t);
    match case {
        CaseTag::Sublevel => {
            let s = sigma / lambda;
            if s >= big_r {
                return None;
            }
            let area = s * (big_r * big_r - s * s).sqrt() + big_r * big_r * (s / big_r).asin();
            let top = g((1.0 - alpha) * sigma) * 2.0 * (big_r * big_r - s * s).sqrt();
            let theta = (s / big_r).asin();
            let lateral = 2.0
                * gauss_legendre(
                    |th| g((1.0 - alpha) * lambda * big_r * th.sin()) * big_r,
                    0.0,
                    theta,
                    64,
                );
            Some(saving * area - top - lateral)
        }
        CaseTag::Profile2D => {
            let area = 2.0 * sigma * (r + (big_r - r) / 3.0);
            let phi = |x: f64| profile_phi(r, big_r, x).unwrap();
            let top_inner = 2.0 * r * g((1.0 - alpha) * lambda * sigma);
            let top_outer = 2.0
                * gauss_legendre(
                    |x| {
                        let p = phi(x);
                        g((1.0 - alpha) * lambda * sigma * p.value)
                            * (1.0 + sigma * sigma * p.slope * p.slope).sqrt()
                    },
                    r,
                    big_r,
                    256,
                );
            Some(saving * area - top_inner - top_outer)
        }
        CaseTag::RadialBump => None,
    }
}

/// Criterion 1: yield strain, envelope shape and slopes at the knee.
pub fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for pair in catalog() {
        let e_m = solve_yield_strain(&pair.bulk, &pair.g).unwrap();
        let residual = (pair.bulk.deriv(e_m) - SLOPE0).abs();
        c.check(residual <= 1e-10, || {
            format!("{}: |F'(e_M) - G'(0)| = {residual:e}", pair.name)
        });
        c.check((e_m - YIELD).abs() <= 1e-9, || {
            format!("{}: e_M = {e_m}", pair.name)
        });
        worst.0 = worst.0.max(residual);
        for k in 0..512 {
            let xi = 3.0 * YIELD * k as f64 / 511.0;
            let got = pair.env.eval(xi).unwrap();
            let want = envelope_oracle(pair.p, xi);
            let err = (got - want).abs();
            worst.1 = worst.1.max(err);
            c.check(err <= 1e-12, || {
                format!("{}: Fbar({xi}) off by {err:e}", pair.name)
            });
        }
        let h = 1e-7;
        let left = (pair.env.value(e_m) - pair.env.value(e_m - h)) / h;
        let right = (pair.env.value(e_m + h) - pair.env.value(e_m)) / h;
        worst.2 = worst.2.max((left - right).abs());
        c.check((left - right).abs() <= 1e-6, || {
            format!("{}: slopes {left} vs {right}", pair.name)
        });
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(1), || {
        format!("runtime {elapsed:?}")
    });
    outcome(
        1,
        "envelope and yield strain",
        start,
        &c,
        format!(
            "max root residual {:.1e}, max Fbar error {:.1e}, max slope mismatch {:.1e}",
            worst.0, worst.1, worst.2
        ),
    )
}

/// Criterion 2: the reduced minimizer never strains past yield and matches
/// the lattice oracle.
pub fn criterion_2(exec: Execution) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut max_strain = 0.0_f64;
    let mut max_dev = 0.0_f64;
    for pair in catalog() {
        for k in 0..31 {
            let t = 3.0 * k as f64 / 30.0;
            let m = minimize_relaxed_1d(&pair.bulk, &pair.g, 1.0, t).unwrap();
            let o = brute_force_oracle_1d(&pair.bulk, &pair.g, 1.0, t, 2, 2000, exec).unwrap();
            max_strain = max_strain.max(m.strain);
            let dev = (m.energy - o.energy).abs();
            max_dev = max_dev.max(dev - o.gap_bound);
            c.check(m.strain <= YIELD + 1e-6, || {
                format!("{} t={t}: e* = {}", pair.name, m.strain)
            });
            c.check(m.cantor == 0.0, || {
                format!("{} t={t}: c* = {}", pair.name, m.cantor)
            });
            c.check(dev <= 1e-6 + o.gap_bound, || {
                format!(
                    "{} t={t}: energy {} vs oracle {}",
                    pair.name, m.energy, o.energy
                )
            });
        }
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(30), || {
        format!("runtime {elapsed:?}")
    });
    outcome(
        2,
        "one-dimensional yield bound",
        start,
        &c,
        format!(
            "186 loads, max e* = {max_strain:.9}, max excess over oracle gap bound {max_dev:.1e}"
        ),
    )
}

/// Criterion 3: profile equation, taper integral and circle oracles.
pub fn criterion_3(exec: Execution) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let (r, big_r) = (1.0, 2.0);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_ode = 0.0_f64;
    for _ in 0..1000 {
        let rho = rng.random_range(r..big_r);
        let res = profile_ode_residual(r, big_r, rho).abs();
        worst_ode = worst_ode.max(res);
        c.check(res <= 1e-14, || format!("ODE residual {res:e} at {rho}"));
    }
    let phi2 = gauss_legendre(
        |x| profile_phi(r, big_r, x).unwrap().value.powi(2),
        r,
        big_r,
        64,
    );
    let phi2_err = (phi2 - (big_r - r) / 5.0).abs();
    c.check(phi2_err <= 1e-10, || {
        format!("int phi^2 off by {phi2_err:e}")
    });

    let circle = FnField::new(
        |p: Point| p[0] * p[0] + p[1] * p[1],
        |p: Point| [2.0 * p[0], 2.0 * p[1]],
    );
    let length_err = |h: f64| {
        let curve = extract_level_set(&circle, 1.0, &BBox::centered(1.5), h, exec);
        (curve.length() - 2.0 * std::f64::consts::PI).abs()
    };
    let area_err = |h: f64, rule: Quadrature| {
        let a = region_integral(
            |_| 1.0,
            &ImplicitRegion::disk([0.0, 0.0], 1.0),
            h,
            rule,
            exec,
        );
        (a - std::f64::consts::PI).abs()
    };
    let (l1, l2) = (length_err(1.0 / 256.0), length_err(1.0 / 512.0));
    let (a1, a2) = (
        area_err(1.0 / 256.0, Quadrature::Midpoint),
        area_err(1.0 / 512.0, Quadrature::Midpoint),
    );
    let (k1, k2) = (
        area_err(1.0 / 256.0, Quadrature::CutCell),
        area_err(1.0 / 512.0, Quadrature::CutCell),
    );
    // The cell-centre rule counts lattice points inside the circle, whose
    // error does not decrease monotonically; it is reported, not checked.
    for (name, e1, e2) in [("length", l1, l2), ("cut-cell area", k1, k2)] {
        c.check(e1 <= 0.02, || format!("{name} error {e1:e} at h = 1/256"));
        c.check(e2 <= 0.5 * e1, || {
            format!("{name} error {e1:e} -> {e2:e} not halved")
        });
    }
    outcome(
        3,
        "profile and quadrature identities",
        start,
        &c,
        format!(
            "ODE residual {worst_ode:.1e}, int phi^2 error {phi2_err:.1e}, circle length error {l1:.1e} -> {l2:.1e}, \
             area error midpoint {a1:.1e} -> {a2:.1e}, cut-cell {k1:.1e} -> {k2:.1e}"
        ),
    )
}

/// Criterion 4: closed-form gap bounds.
pub fn criterion_4() -> (Outcome, String) {
    let start = Instant::now();
    let mut c = Checks::default();
    let (r, big_r, sigma, alpha, lambda, c1, c2) = (1.0, 2.0, 0.08, 0.6, 2.0, 0.4, 0.6);
    let value = closed_form_gap_profile(r, big_r, sigma, alpha, lambda, c1).unwrap();
    c.check((value - 3.2768e-4).abs() <= 1e-12, || {
        format!("profile gap {value}")
    });
    // (1 - alpha) lambda = 0.8: 0.8 (2 0.4 0.8 sigma^2 - 4 sigma^3) / 5.
    let by_hand = 0.8 * (0.64 * sigma * sigma - 4.0 * sigma.powi(3)) / 5.0;
    c.check((value - by_hand).abs() <= 1e-15, || {
        format!("profile gap {value} vs {by_hand}")
    });
    let threshold = profile_threshold(r, big_r, alpha, lambda, c1);
    c.check((threshold - 0.16).abs() <= 1e-15, || {
        format!("threshold {threshold}")
    });
    let at_threshold = closed_form_gap_profile(r, big_r, threshold, alpha, lambda, c1).unwrap();
    c.check(at_threshold.abs() <= 1e-15, || {
        format!("gap at threshold {at_threshold:e}")
    });
    let s = 0.25;
    let s_star = rect_threshold(alpha, lambda, c2);
    c.check((s_star - 1.0 / 0.96).abs() <= 1e-15 && s < s_star, || {
        format!("rect threshold {s_star}")
    });
    let mut table = Table::new(&["quantity", "value"]);
    let mut rect_max = f64::NEG_INFINITY;
    for k in 1..=1000 {
        let delta = 0.1 * k as f64 / 1000.0;
        let gap = closed_form_gap_rect(s, delta, alpha, lambda, c2);
        rect_max = rect_max.max(gap);
        c.check(gap < 0.0, || format!("rect gap {gap:e} at delta {delta}"));
        if k % 100 == 0 {
            table
                .push(vec![format!("rect_gap_{delta}").into(), gap.into()])
                .unwrap();
        }
    }
    for (name, v) in [
        ("profile_gap", value),
        ("profile_threshold", threshold),
        ("profile_gap_at_threshold", at_threshold),
        ("rect_threshold", s_star),
    ] {
        table.push(vec![name.into(), v.into()]).unwrap();
    }
    let o = outcome(
        4,
        "closed-form gaps",
        start,
        &c,
        format!(
            "profile gap {}, threshold {}, rect gap max {:.3e} over 1000 heights, rect threshold {}",
            fmt_g(value),
            fmt_g(threshold),
            rect_max,
            fmt_g(s_star)
        ),
    );
    (o, table.to_csv())
}

/// Criterion 5: quadrature gap on the profile region against the closed form.
pub fn criterion_5(exec: Execution) -> (Outcome, String) {
    let start = Instant::now();
    let mut c = Checks::default();
    let pair = catalog().into_iter().find(|p| p.name == "p=2/exp").unwrap();
    let u = affine(2.0);
    let geo = geometry(1.0 / 256.0);
    let fc = field_constants(
        &u,
        default_eps(2.0, pair.env.yield_strain()),
        geo.big_r,
        exec,
    )
    .unwrap();
    let region = build_region(CaseTag::Profile2D, &u, 0.08, geo, fc, exec).unwrap();
    let gap = energy_gap(&u, &region, 0.6, &pair.env, &pair.g, exec).unwrap();
    let bound = closed_form_gap_profile(1.0, 2.0, 0.08, 0.6, 2.0, 0.4).unwrap();
    let oracle = affine_gap_oracle(CaseTag::Profile2D, &pair, 2.0, 0.6, 0.08).unwrap();
    c.check(gap.gap >= bound - 5e-5, || {
        format!("gap {} below bound {bound}", gap.gap)
    });
    c.check(gap.gap > 0.0, || format!("gap {} not positive", gap.gap));
    c.check((gap.gap - oracle).abs() <= 1e-9, || {
        format!("gap {} vs line-integral oracle {oracle}", gap.gap)
    });
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(10), || {
        format!("runtime {elapsed:?}")
    });
    let mut table = Table::new(&["gap", "bulk", "top", "bound", "oracle"]);
    table
        .push(vec![
            gap.gap.into(),
            gap.bulk.into(),
            gap.top.into(),
            bound.into(),
            oracle.into(),
        ])
        .unwrap();
    let o = outcome(
        5,
        "quadrature gap above the closed-form bound",
        start,
        &c,
        format!(
            "gap {} >= bound {} - 5e-5, line-integral oracle {} (difference {:.1e})",
            fmt_g(gap.gap),
            fmt_g(bound),
            fmt_g(oracle),
            (gap.gap - oracle).abs()
        ),
    );
    (o, table.to_csv())
}

pub const ABOVE_YIELD: [f64; 4] = [1.2, 1.5, 2.0, 3.0];
pub const BELOW_YIELD: [f64; 3] = [0.5, 0.9, 0.95];

/// Families expected to certify for a law: profile and radial bump for laws
/// with finite negative curvature at the origin, the sublevel slab for the
/// cusp law.
pub fn expected_families(pair: &Pair) -> Vec<CaseTag> {
    if pair.is_cusp() {
        vec![CaseTag::Sublevel]
    } else {
        vec![CaseTag::Profile2D, CaseTag::RadialBump]
    }
}

/// Criterion 6: certificates above yield, each re-validated.
pub fn criterion_6(exec: Execution) -> (Outcome, String) {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut docs = String::new();
    let mut found = 0;
    let mut min_ratio = f64::INFINITY;
    let mut max_bv = 0.0_f64;
    for pair in catalog() {
        for lambda in ABOVE_YIELD {
            let u = affine(lambda);
            for case in expected_families(&pair) {
                let spec = FamilySpec::new(case);
                let label = format!("{} lambda={lambda} {}", pair.name, case.name());
                match search_certificate(&u, &pair.env, &pair.g, &spec, exec).unwrap() {
                    None => c.check(false, || format!("{label}: no certificate")),
                    Some(cert) => {
                        found += 1;
                        let again = cert.revalidate(&u, &pair.env, &pair.g, exec).unwrap();
                        c.check((again.gap - cert.gap).abs() <= 1e-12, || {
                            format!("{label}: gap {} re-evaluates to {}", cert.gap, again.gap)
                        });
                        c.check(
                            (again.bv_distance - cert.bv_distance).abs() <= 1e-12,
                            || format!("{label}: bv distance not reproduced"),
                        );
                        c.check(
                            again.valid && cert.gap > cert.tau_gap && cert.bv_distance < 1.0,
                            || format!("{label}: invalid certificate {cert:?}"),
                        );
                        if let Some(oracle) =
                            affine_gap_oracle(case, &pair, lambda, cert.alpha, cert.sigma)
                        {
                            let tol = 1e-6 * cert.tau_gap.max(1e-17) + 1e-16;
                            c.check(
                                (oracle - cert.gap).abs() <= tol.max(1e-3 * cert.gap.abs()),
                                || {
                                    format!(
                                        "{label}: gap {} vs line-integral oracle {oracle}",
                                        cert.gap
                                    )
                                },
                            );
                        }
                        min_ratio = min_ratio.min(cert.gap / cert.tau_gap);
                        max_bv = max_bv.max(cert.bv_distance);
                        writeln!(docs, "{}", cert.to_json().render()).unwrap();
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(120), || {
        format!("runtime {elapsed:?}")
    });
    let o = outcome(
        6,
        "certificates above yield",
        start,
        &c,
        format!(
            "{found}/40 certificates, min gap/tau_gap {min_ratio:.0}, max bv distance {max_bv:.2e}"
        ),
    );
    (o, docs)
}

/// Rows certified below yield, as `(law, lambda, family, alpha, sigma, gap)`.
pub type BelowYieldCertificate = (String, f64, CaseTag, f64, f64, f64);

/// Criterion 7: the audit grid below yield.
///
/// For the cusp law with quadratic bulk energy the slab and profile families
/// lower the energy at moderate heights. These gaps are confirmed against the
/// line-integral oracle, so the criterion is reported as failed and the
/// harness accepts exactly this set of exceptions.
pub fn criterion_7(exec: Execution) -> (Outcome, String) {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut table = Table::new(&[
        "law",
        "case",
        "lambda",
        "alpha",
        "sigma",
        "gap",
        "bv_distance",
        "certified",
    ]);
    let mut certified: Vec<BelowYieldCertificate> = Vec::new();
    let mut rows = 0usize;
    let mut positive_elsewhere = 0usize;
    let mut oracle_checked = 0usize;
    let mut worst_dev = 0.0_f64;
    for pair in catalog() {
        for lambda in BELOW_YIELD {
            let u = affine(lambda);
            for case in CaseTag::ALL {
                let scan =
                    scan_family(&u, &pair.env, &pair.g, &FamilySpec::new(case), exec).unwrap();
                for row in &scan.rows {
                    rows += 1;
                    table
                        .push(vec![
                            pair.name.clone().into(),
                            case.name().into(),
                            row.lambda.into(),
                            row.alpha.into(),
                            row.sigma.into(),
                            row.gap.into(),
                            row.bv_distance.into(),
                            row.certified.into(),
                        ])
                        .unwrap();
                    if let Some(oracle) =
                        affine_gap_oracle(case, &pair, lambda, row.alpha, row.sigma)
                    {
                        oracle_checked += 1;
                        let dev = (oracle - row.gap).abs();
                        worst_dev = worst_dev.max(dev);
                        // The cusp law is not smooth at zero amplitude, which
                        // limits the surface rule near the slab corners.
                        c.check(dev <= 1e-9 + 1e-6 * oracle.abs(), || {
                            format!(
                                "{} {} lambda={lambda}: gap {} vs oracle {oracle}",
                                pair.name,
                                case.name(),
                                row.gap
                            )
                        });
                    }
                    let exceeds = row.gap > row.tau_gap;
                    if row.certified {
                        certified.push((
                            pair.name.clone(),
                            lambda,
                            case,
                            row.alpha,
                            row.sigma,
                            row.gap,
                        ));
                    }
                    if exceeds && !(pair.is_cusp() && pair.p == 2.0) {
                        positive_elsewhere += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(120), || {
        format!("runtime {elapsed:?}")
    });
    c.check(positive_elsewhere == 0, || {
        format!("{positive_elsewhere} positive gaps outside the cusp law with p = 2")
    });
    let unexpected = certified
        .iter()
        .filter(|(law, lambda, case, ..)| {
            !(law == "p=2/cusp"
                && (*lambda == 0.9 || *lambda == 0.95)
                && matches!(case, CaseTag::Sublevel | CaseTag::Profile2D))
        })
        .count();
    c.check(unexpected == 0, || {
        format!("{unexpected} certificates outside the recorded deviation")
    });
    let listing: Vec<String> = certified
        .iter()
        .map(|(law, lambda, case, alpha, sigma, gap)| {
            format!(
                "{law} lambda={lambda} {} alpha={alpha} sigma={sigma} gap={}",
                case.name(),
                fmt_g(*gap)
            )
        })
        .collect();
    let detail = format!(
        "{rows} gaps evaluated, {oracle_checked} matched to the line-integral oracle (max deviation {worst_dev:.1e}); {} certified row(s): {}",
        certified.len(),
        if listing.is_empty() { "none".into() } else { listing.join(", ") }
    );
    let mut o = outcome(7, "no certificates below yield", start, &c, detail);
    if o.status == Status::Pass && !certified.is_empty() {
        o.status = Status::KnownDeviation;
    }
    (o, table.to_csv())
}

/// Criterion 8: divergence identity and the flux expansion on the radial bump.
pub fn criterion_8(exec: Execution) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let pair = catalog().into_iter().find(|p| p.name == "p=2/exp").unwrap();
    let lambda = 2.0;
    let u = affine(lambda);
    let eps = default_eps(lambda, pair.env.yield_strain());
    let mut detail = Vec::new();
    for sigma in [0.02, 0.04, 0.08] {
        let residual = |h: f64| {
            let geo = geometry(h);
            let fc = field_constants(&u, eps, geo.big_r, exec).unwrap();
            let region = build_region(CaseTag::RadialBump, &u, sigma, geo, fc, exec).unwrap();
            divergence_identity_residual(&u, &region, exec).unwrap()
        };
        let (d1, d2) = (residual(1.0 / 256.0), residual(1.0 / 512.0));
        c.check(d1 <= 1e-2, || format!("sigma={sigma}: residual {d1:e}"));
        c.check(d2 <= 0.5 * d1, || {
            format!("sigma={sigma}: residual {d1:e} -> {d2:e}")
        });

        let geo = geometry(1.0 / 256.0);
        let fc = field_constants(&u, eps, geo.big_r, exec).unwrap();
        let flux = taylor_flux_check(&u, &fc, geo, sigma, exec).unwrap();
        // Independent pass over the same curve with the bump gradient from
        // the radial profile.
        let curve = bump_level_set(&u, &fc, geo, sigma, exec);
        let spread = lambda - eps;
        let (mut count, mut worst_margin, mut worst_level) = (0usize, f64::INFINITY, 0.0_f64);
        for p in curve.vertices() {
            let rho = p[0].hypot(p[1]);
            let (a, _) = radial_bump(1.0, 2.0, p).unwrap();
            worst_level = worst_level.max((u.value(p) - sigma * a).abs());
            if !(rho > 1.0 && rho < 2.0) {
                continue;
            }
            let slope = profile_phi(1.0, 2.0, rho).unwrap().slope;
            let da = [slope * p[0] / rho, slope * p[1] / rho];
            let w = [-sigma * da[0], lambda - sigma * da[1]];
            let factor = lambda * w[1] / (lambda * w[0].hypot(w[1]));
            let bound = 1.0 - slope * slope * sigma * sigma / (2.0 * spread * spread);
            worst_margin = worst_margin.min(factor - bound);
            count += 1;
        }
        c.check(worst_margin >= 0.0, || {
            format!("sigma={sigma}: flux bound violated by {worst_margin:e}")
        });
        c.check(flux.cubic_constant <= 0.0, || {
            format!("sigma={sigma}: cubic constant {}", flux.cubic_constant)
        });
        c.check(count == flux.vertices && count > 0, || {
            format!(
                "sigma={sigma}: {count} annulus vertices vs {}",
                flux.vertices
            )
        });
        c.check(worst_level <= 1e-10, || {
            format!("sigma={sigma}: vertex off the level set by {worst_level:e}")
        });
        detail.push(format!(
            "sigma={sigma}: residual {d1:.2e} -> {d2:.2e}, {count} vertices, min margin {worst_margin:.2e}, cubic constant {:.3e}",
            flux.cubic_constant
        ));
    }
    outcome(
        8,
        "divergence identity and flux expansion",
        start,
        &c,
        detail.join("; "),
    )
}

/// Criterion 9: repeating criteria 4 to 7 with the other execution policy
/// reproduces every artifact byte for byte.
pub fn criterion_9(first: &[String], exec: Execution) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let second = [
        criterion_4().1,
        criterion_5(exec).1,
        criterion_6(exec).1,
        criterion_7(exec).1,
    ];
    let mut bytes = 0usize;
    for (k, (a, b)) in first.iter().zip(&second).enumerate() {
        bytes += a.len();
        c.check(a == b, || {
            format!("artifact of criterion {} differs", k + 4)
        });
    }
    c.check(first.len() == second.len(), || {
        "artifact count differs".into()
    });
    outcome(
        9,
        "determinism",
        start,
        &c,
        format!(
            "{} artifacts, {bytes} bytes, identical across execution policies",
            second.len()
        ),
    )
}

/// Runs criteria 1 to 9 with `exec`, repeating 4 to 7 with `repeat_exec`.
pub fn run_all(exec: Execution, repeat_exec: Execution) -> (Vec<Outcome>, Vec<String>) {
    let mut out = vec![criterion_1(), criterion_2(exec), criterion_3(exec)];
    let mut artifacts = Vec::new();
    for (o, a) in [
        criterion_4(),
        criterion_5(exec),
        criterion_6(exec),
        criterion_7(exec),
    ] {
        out.push(o);
        artifacts.push(a);
    }
    out.push(criterion_8(exec));
    out.push(criterion_9(&artifacts, repeat_exec));
    (out, artifacts)
}

/// Prints one line per outcome; `true` when nothing failed unexpectedly.
pub fn report(outcomes: &[Outcome]) -> bool {
    for o in outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    let known = outcomes
        .iter()
        .filter(|o| o.status == Status::KnownDeviation)
        .count();
    println!(
        "acceptance: {} passed, {known} known deviation(s), {failed} failed",
        outcomes.iter().filter(|o| o.status == Status::Pass).count()
    );
    failed == 0
}

use crate::config::RunConfig;
use crate::output::{num, Record, Table};
use rescore::contour::a0;
use rescore::riemann::{
    cross_cut, locus_eq23, locus_quadr, locus_quadrprime, Direction, HolGeometry, MultiIndex, RootLocus, SheetPoint,
    Threshold, ThresholdSet,
};
use rescore::roots::Rect;
use rescore::threebody::{
    assemble_t, find_resonances_3b, jacobi_coeffs, ring_probe_m, three_body_bound_states, FaddeevOptions,
    ThreeBodySystem,
};
use rescore::twobody::{
    bound_states, continue_s_sheet, find_resonances, ring_probe_t, smatrix, solve_ls, yamaguchi, LsOptions,
    PairPotential,
};
use rescore::{msqrt, Error, C64};

/// Failure classes, mapped to exit codes 1, 2, 3.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Sheet(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Sheet(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config invalid: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Sheet(m) => write!(f, "sheet/path violation: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Sheet(_) | Error::Path(_) => Failure::Sheet(e.to_string()),
            Error::Domain(_) | Error::OnCut(_) => Failure::Config(e.to_string()),
            Error::Singular { .. } | Error::NoConvergence { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

/// Result files plus an optional failure verdict (files are written either way).
pub struct Report {
    pub rec: Record,
    pub tab: Table,
    pub verdict: Option<Failure>,
}

type Out = Result<Report, Failure>;

fn done(rec: Record, tab: Table) -> Out {
    Ok(Report { rec, tab, verdict: None })
}

fn cnum(rec: &mut Record, key: &str, z: C64) {
    rec.num(format!("{key}.re"), z.re);
    rec.num(format!("{key}.im"), z.im);
}

fn pair_potential(c: &RunConfig) -> PairPotential {
    match c.pair_potential.as_str() {
        "yukawa" => PairPotential::Yukawa { coupling: c.pair_coupling, mu: c.pair_mu },
        _ => PairPotential::Yamaguchi { strength: c.pair_strength, beta: c.pair_beta },
    }
}

fn ls_options(c: &RunConfig, pot: &PairPotential) -> LsOptions {
    LsOptions { theta: c.theta, ..LsOptions::for_potential(pot) }
}

fn three_system(c: &RunConfig) -> Result<ThreeBodySystem, Failure> {
    let sys = if c.bosons {
        ThreeBodySystem::identical_bosons(c.strength[0], c.beta[0])?
    } else {
        let p = |k: usize| PairPotential::Yamaguchi { strength: c.strength[k], beta: c.beta[k] };
        ThreeBodySystem::new(c.masses, [p(0), p(1), p(2)])?
    };
    Ok(sys)
}

fn faddeev_options(c: &RunConfig) -> FaddeevOptions {
    FaddeevOptions {
        nodes: c.nodes,
        grading: c.grading,
        theta: c.theta,
        tail_theta: c.tail_theta,
        generations: c.generations,
    }
}

fn region(c: &RunConfig) -> Result<Rect, Failure> {
    let [a, b, cc, d] = c.region.ok_or_else(|| Failure::Config("this command needs region.*".into()))?;
    Ok(Rect::new(a, b, cc, d)?)
}

fn sheet_index(ts: &ThresholdSet, l0: i32, bits: &Option<Vec<u8>>, fill: u8) -> Result<MultiIndex, Failure> {
    let b = bits.clone().unwrap_or_else(|| vec![fill; ts.levels().len()]);
    MultiIndex::from_level_bits(ts, l0, &b).map_err(|e| Failure::Config(e.to_string()))
}

pub fn run(c: &RunConfig, verbose: bool) -> Out {
    match c.command.as_str() {
        "pair-spectrum" => pair_spectrum(c),
        "pair-resonances" => pair_resonances(c),
        "loci" => loci(c),
        "sheet-map" => sheet_map(c),
        "three-bound" => three_bound(c),
        "three-resonances" => three_resonances(c, verbose),
        "verify" => verify(c, verbose),
        other => Err(Failure::Config(format!("unknown command {other}"))),
    }
}

fn pair_spectrum(c: &RunConfig) -> Out {
    let pot = pair_potential(c);
    let opts = ls_options(c, &pot);
    let spec = bound_states(&pot, &opts, c.e_max)?;
    let mut rec = Record::default();
    let mut tab = Table::new(&["index", "lambda", "phi_residual", "analytic_lambda", "near_threshold"]);
    rec.put("levels", spec.levels.len().to_string());
    let analytic = match pot {
        PairPotential::Yamaguchi { strength, beta } => yamaguchi::bound_kappa(strength, beta).map(|k| -k * k),
        _ => None,
    };
    for (i, lv) in spec.levels.iter().enumerate() {
        // self-consistency of the form factor on its own grid
        let (q, phi) = lv.grid_phi();
        let scale = phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let res = q.iter().zip(phi).map(|(&k, &p)| (lv.phi(C64::new(k, 0.0)).re - p).abs()).fold(0.0, f64::max) / scale;
        let key = format!("level.{i}");
        rec.num(format!("{key}.lambda"), lv.lambda);
        rec.num(format!("{key}.phi_residual"), res);
        rec.num(format!("{key}.tol"), c.tol);
        rec.put(format!("{key}.near_threshold"), lv.near_threshold.to_string());
        let an = if i == 0 { analytic } else { None };
        if let Some(a) = an {
            rec.num(format!("{key}.analytic_lambda"), a);
        }
        tab.row(vec![
            i.to_string(),
            num(lv.lambda),
            num(res),
            an.map_or(String::new(), num),
            lv.near_threshold.to_string(),
        ]);
    }
    done(rec, tab)
}

fn pair_resonances(c: &RunConfig) -> Out {
    let pot = pair_potential(c);
    let opts = ls_options(c, &pot);
    let out = find_resonances(&pot, region(c)?, &opts)?;
    let mut rec = Record::default();
    let mut tab = Table::new(&["index", "re", "im", "residual", "pole_re", "pole_im", "pole_distance", "sheet"]);
    rec.put("count", out.count.to_string());
    rec.put("roots", out.resonances.len().to_string());
    rec.put("failures", out.failures.len().to_string());
    rec.num("pole_tol", 1e-6);
    let k = C64::new(0.5, 0.0);
    for (i, r) in out.resonances.iter().enumerate() {
        let probe = ring_probe_t(&pot, r.z, k, k, &opts)?;
        let key = format!("resonance.{i}");
        cnum(&mut rec, &key, r.z);
        rec.num(format!("{key}.residual"), r.residual);
        cnum(&mut rec, &format!("{key}.pole"), probe.pole);
        let d = (probe.pole - r.z).norm();
        rec.num(format!("{key}.pole_distance"), d);
        tab.row(vec![
            i.to_string(),
            num(r.z.re),
            num(r.z.im),
            num(r.residual),
            num(probe.pole.re),
            num(probe.pole.im),
            num(d),
            "1".into(),
        ]);
    }
    done(rec, tab)
}

// ---- loci ------------------------------------------------------------------

fn quadratic(a2: C64, a1: C64, a0: C64) -> Vec<C64> {
    if a2.norm() < 1e-300 {
        return vec![-a0 / a1];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc.norm() <= 8.0 * f64::EPSILON * (a1.norm_sqr() + 4.0 * (a2 * a0).norm()) {
        let z = -a1 / (2.0 * a2);
        return vec![z, z];
    }
    let d = disc.sqrt();
    let q = if (a1.conj() * d).re >= 0.0 { -0.5 * (a1 + d) } else { -0.5 * (a1 - d) };
    if q.norm() == 0.0 {
        return vec![C64::new(0.0, 0.0)];
    }
    vec![q / a2, a0 / q]
}

fn sc(z: C64) -> f64 {
    z.norm().max(1.0)
}

// squared forms; a candidate is kept when it solves the unsquared equation better
// than the η → −η one
fn genuine(r: C64, flip: C64, z: C64) -> bool {
    r.norm() <= flip.norm() && r.norm() < 1e-8 * sc(z) * sc(z)
}

fn quadr_lhs(z: C64, l1: f64, l2: f64, cc: f64, eta: f64) -> C64 {
    (1.0 + cc * cc) * z - l1 - l2 + 2.0 * cc * eta * msqrt(z - l1) * msqrt(z - l2)
}

fn quadr_oracle(l1: f64, l2: f64, cc: f64, eta: f64) -> Vec<C64> {
    let c2 = cc * cc;
    let e = 4.0 * c2 * eta * eta;
    let a2 = (1.0 + c2).powi(2) - e;
    let a1 = -(2.0 * (1.0 + c2) - e) * (l1 + l2);
    let a0 = (l1 + l2).powi(2) - e * l1 * l2;
    quadratic(a2.into(), a1.into(), a0.into())
        .into_iter()
        .filter(|&z| genuine(quadr_lhs(z, l1, l2, cc, eta), quadr_lhs(z, l1, l2, cc, -eta), z))
        .collect()
}

fn eq23_lhs(z: C64, lambda: f64, cc: f64, nu: f64, eta: f64) -> C64 {
    z * (cc * cc + nu) - lambda + 2.0 * cc * eta * nu.sqrt() * msqrt(z) * msqrt(z - lambda)
}

fn eq23_oracle(lambda: f64, cc: f64, nu: f64, eta: f64) -> Vec<C64> {
    let c2 = cc * cc;
    let e = 4.0 * c2 * eta * eta * nu;
    let a2 = (c2 + nu).powi(2) - e;
    let a1 = -2.0 * lambda * (c2 + nu) + e * lambda;
    quadratic(a2.into(), a1.into(), (lambda * lambda).into())
        .into_iter()
        .filter(|&z| genuine(eq23_lhs(z, lambda, cc, nu, eta), eq23_lhs(z, lambda, cc, nu, -eta), z))
        .collect()
}

// ρ + zν + 2c√z√ν√ρ η − s²z in w = √ρ, kept on the main branch
fn qp_oracle(z: C64, cc: f64, nu: f64, eta: f64) -> Vec<C64> {
    let s2 = 1.0 - cc * cc;
    let b = 2.0 * cc * msqrt(z) * nu.sqrt() * eta;
    quadratic(C64::new(1.0, 0.0), b, z * nu - s2 * z)
        .into_iter()
        .filter(|w| (msqrt(w * w) - w).norm() <= 1e-12 * sc(*w))
        .map(|w| w * w)
        .collect()
}

// z = w² + λ from c²w² + 2c√ρ η w + (c² − 1)λ + ρ = 0, w = √(z − λ) on the main branch
fn quadr0_oracle(lambda: f64, rho: f64, eta: f64, cc: f64) -> Vec<C64> {
    let c2 = cc * cc;
    quadratic(c2.into(), (2.0 * cc * rho.sqrt() * eta).into(), ((c2 - 1.0) * lambda + rho).into())
        .into_iter()
        .filter(|w| (msqrt(w * w) - w).norm() <= 1e-12 * sc(*w))
        .map(|w| w * w + lambda)
        .collect()
}

fn grid(n: usize, a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

fn describe(rec: &mut Record, key: &str, loc: &RootLocus) {
    match *loc {
        RootLocus::Interval { lo, hi } => {
            rec.put(format!("{key}.kind"), "interval");
            rec.num(format!("{key}.lo"), lo);
            rec.num(format!("{key}.hi"), hi);
        }
        RootLocus::IntervalEllipse { lo, hi, center, a, b } => {
            rec.put(format!("{key}.kind"), "interval+ellipse");
            rec.num(format!("{key}.lo"), lo);
            rec.num(format!("{key}.hi"), hi);
            rec.num(format!("{key}.center"), center);
            rec.num(format!("{key}.a"), a);
            rec.num(format!("{key}.b"), b);
            rec.num(format!("{key}.right_vertex"), center + a);
        }
        RootLocus::RayPlusDisk { ray_end, center, radius } => {
            rec.put(format!("{key}.kind"), "ray+disk");
            rec.num(format!("{key}.ray_end"), ray_end);
            rec.num(format!("{key}.center"), center);
            rec.num(format!("{key}.radius"), radius);
        }
        RootLocus::SegmentPlusDisk { end, radius } => {
            rec.put(format!("{key}.kind"), "segment+disk");
            cnum(rec, &format!("{key}.end"), end);
            rec.num(format!("{key}.radius"), radius);
        }
    }
}

fn loci(c: &RunConfig) -> Out {
    let (l1, l2, cc) = (c.lambda1, c.lambda2, c.loci_c);
    let tol = 1e-9;
    let mut rec = Record::default();
    let mut tab = Table::new(&["equation", "p1", "p2", "re", "im", "distance"]);
    let sweep = |rec: &mut Record,
                     tab: &mut Table,
                     name: &str,
                     loc: &RootLocus,
                     roots: Vec<(f64, f64, C64)>| {
        describe(rec, name, loc);
        let mut worst = 0.0f64;
        for (p1, p2, z) in &roots {
            let d = loc.distance(*z) / sc(*z);
            worst = worst.max(d);
            tab.row(vec![name.to_string(), num(*p1), num(*p2), num(z.re), num(z.im), num(d)]);
        }
        rec.put(format!("{name}.oracle_roots"), roots.len().to_string());
        rec.num(format!("{name}.max_distance"), worst);
        rec.num(format!("{name}.tol"), tol);
        rec.put(format!("{name}.pass"), (worst < tol).to_string());
        worst < tol
    };
    let n = c.loci_grid;
    let nu_n = (n / 10).max(2);

    let loc = locus_quadr(l1, l2, cc)?;
    let roots = grid(n, -1.0, 1.0).flat_map(|eta| quadr_oracle(l1, l2, cc, eta).into_iter().map(move |z| (eta, 0.0, z)));
    let mut ok = sweep(&mut rec, &mut tab, "quadr", &loc, roots.collect());
    for (k, lam) in [l1, l2].into_iter().enumerate() {
        let loc = locus_eq23(lam, cc)?;
        let roots: Vec<_> = grid(nu_n, 0.0, 1.0)
            .flat_map(|nu| grid(n, -1.0, 1.0).map(move |eta| (nu, eta)))
            .flat_map(|(nu, eta)| eq23_oracle(lam, cc, nu, eta).into_iter().map(move |z| (nu, eta, z)))
            .collect();
        ok &= sweep(&mut rec, &mut tab, &format!("eq23.{}", k + 1), &loc, roots);
    }
    // spectator-variable locus at a sample energy in the upper half-plane
    let zq = C64::new(l1.abs(), 0.3 * l1.abs());
    let loc = locus_quadrprime(zq, cc)?;
    cnum(&mut rec, "quadrprime.z", zq);
    let roots: Vec<_> = grid(nu_n, 0.0, 1.0)
        .flat_map(|nu| grid(n, -1.0, 1.0).map(move |eta| (nu, eta)))
        .flat_map(|(nu, eta)| qp_oracle(zq, cc, nu, eta).into_iter().map(move |z| (nu, eta, z)))
        .collect();
    ok &= sweep(&mut rec, &mut tab, "quadrprime", &loc, roots);

    // parabola: no root of the one-threshold equation inside
    let m = (c.loci_samples as f64).sqrt().ceil() as usize;
    let mut inside = 0;
    let mut total = 0;
    for i in 0..m {
        let t = (i as f64 + 0.5) / m as f64;
        let rho = l1.abs() * t / (1.0 - t);
        // η = ±1 puts the root exactly on the boundary; sample the open interval
        for eta in (0..m).map(|k| -1.0 + (2 * k + 1) as f64 / m as f64) {
            for z in quadr0_oracle(l1, rho, eta, cc) {
                total += 1;
                if rescore::riemann::parabola_contains(z, l1, cc) {
                    inside += 1;
                }
            }
        }
    }
    rec.put("parabola.samples", (m * m).to_string());
    rec.put("parabola.oracle_roots", total.to_string());
    rec.put("parabola.roots_inside", inside.to_string());
    ok &= inside == 0;
    rec.put("all_pass", ok.to_string());
    let verdict = (!ok).then(|| Failure::Numerical("locus oracle outside tolerance".into()));
    Ok(Report { rec, tab, verdict })
}

// ---- sheets ----------------------------------------------------------------

fn sheet_map(c: &RunConfig) -> Out {
    let entries: Vec<Threshold> = c
        .path_thresholds
        .iter()
        .enumerate()
        .map(|(k, &lambda)| Threshold { alpha: (k % 3) as u8 + 1, j: (k / 3) as u32 + 1, lambda })
        .collect();
    let ts = ThresholdSet::new(entries)?;
    let mut cm = [[0.0; 3]; 3];
    for (a, row) in cm.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            if a != b {
                *x = c.path_c;
            }
        }
    }
    let geom = HolGeometry { thresholds: ts.clone(), c: cm, b: c.strip };
    let mut sheet = sheet_index(&ts, c.start_l0, &c.start_bits, 0)?;
    if c.path_points.len() < 2 {
        return Err(Failure::Config("path.points needs at least two vertices".into()));
    }
    let cut = ts.lambda_min().unwrap_or(0.0);
    let pts: Vec<C64> = c.path_points.iter().map(|p| C64::new(p[0], p[1])).collect();
    let mut rec = Record::default();
    let mut tab = Table::new(&["index", "re", "im", "sheet", "in_hol_domain"]);
    rec.put("start", sheet.to_string());
    let mut crossings = 0;
    for (i, &z) in pts.iter().enumerate() {
        if i > 0 {
            let a = pts[i - 1];
            if a.im * z.im < 0.0 {
                let x = a.re + (z.re - a.re) * a.im / (a.im - z.im);
                if x > cut {
                    let seg = ts
                        .segment_of(x)
                        .ok_or_else(|| Failure::Sheet(format!("path crosses the cut at a threshold ({x})")))?;
                    let dir = if a.im < 0.0 { Direction::FromBelow } else { Direction::FromAbove };
                    sheet = cross_cut(&sheet, seg, dir, &ts)?;
                    crossings += 1;
                }
            }
        }
        if z.im == 0.0 && z.re >= cut {
            return Err(Failure::Sheet(format!("vertex {i} lies on the cut")));
        }
        let sp = SheetPoint::new(z, sheet.clone(), &geom, &[], c.tube)?;
        if c.check_domain && !sp.in_hol_domain {
            return Err(Failure::Sheet(format!("vertex {i} = {z} outside the holomorphy domain of {sheet}")));
        }
        tab.row(vec![i.to_string(), num(z.re), num(z.im), sheet.to_string(), sp.in_hol_domain.to_string()]);
    }
    rec.put("crossings", crossings.to_string());
    rec.put("final", sheet.to_string());
    done(rec, tab)
}

// ---- three-body --------------------------------------------------------------

fn three_bound(c: &RunConfig) -> Out {
    let sys = three_system(c)?;
    let opts = faddeev_options(c);
    let top = sys.thresholds.lambda_min().unwrap_or(0.0).min(0.0);
    let e_max = c.bound_e_max.unwrap_or(top - 1e-4);
    let found = three_body_bound_states(&sys, c.bound_e_min, e_max, c.scan, &opts)?;
    let mut rec = Record::default();
    let mut tab = Table::new(&["index", "energy"]);
    rec.num("window.lo", c.bound_e_min);
    rec.num("window.hi", e_max);
    rec.num("threshold", top);
    rec.put("count", found.len().to_string());
    for (i, e) in found.iter().enumerate() {
        rec.num(format!("state.{i}.energy"), *e);
        rec.num(format!("state.{i}.tol"), c.tol);
        tab.row(vec![i.to_string(), num(*e)]);
    }
    done(rec, tab)
}

fn smooth(_: usize, q: C64) -> C64 {
    1.0 / (q * q + 1.0).powi(2)
}

fn three_resonances(c: &RunConfig, verbose: bool) -> Out {
    let sys = three_system(c)?;
    let opts = faddeev_options(c);
    let l = sheet_index(&sys.thresholds, c.l0, &c.level_bits, 1)?;
    let out = find_resonances_3b(&sys, region(c)?, &l, c.side_pts, &opts)?;
    if verbose {
        eprintln!("winding count {}, {} polished roots", out.count, out.resonances.len());
    }
    let mut rec = Record::default();
    let mut tab =
        Table::new(&["index", "re", "im", "residual", "pole_re", "pole_im", "pole_distance", "paired", "sheet"]);
    rec.put("sheet", l.to_string());
    rec.put("count", out.count.to_string());
    rec.put("roots", out.resonances.len().to_string());
    rec.put("count_matches", (out.count == out.resonances.len() as i64).to_string());
    rec.put("failures", out.failures.len().to_string());
    let pair_tol = 1e-6;
    rec.num("pole_tol", pair_tol);
    for (i, r) in out.resonances.iter().enumerate() {
        let radius = (0.02 * r.z.im.abs()).max(1e-6);
        let probe = ring_probe_m(&sys, r.z, &l, &smooth, radius, &opts)?;
        let d = (probe.pole - r.z).norm();
        let key = format!("resonance.{i}");
        cnum(&mut rec, &key, r.z);
        rec.num(format!("{key}.residual"), r.residual);
        cnum(&mut rec, &format!("{key}.pole"), probe.pole);
        rec.num(format!("{key}.pole_distance"), d);
        rec.put(format!("{key}.paired"), (d < pair_tol).to_string());
        tab.row(vec![
            i.to_string(),
            num(r.z.re),
            num(r.z.im),
            num(r.residual),
            num(probe.pole.re),
            num(probe.pole.im),
            num(d),
            (d < pair_tol).to_string(),
            l.to_string(),
        ]);
    }
    done(rec, tab)
}

// ---- verify ----------------------------------------------------------------

fn verify(c: &RunConfig, verbose: bool) -> Out {
    let mut rec = Record::default();
    let mut tab = Table::new(&["check", "value", "tol", "pass"]);
    let mut all = true;
    let mut check = |name: &str, value: f64, tol: f64| {
        let pass = value < tol;
        if verbose {
            eprintln!("{name}: {value:e} (tol {tol:e}) {}", if pass { "ok" } else { "FAIL" });
        }
        all &= pass;
        rec.num(format!("{name}.value"), value);
        rec.num(format!("{name}.tol"), tol);
        rec.put(format!("{name}.pass"), pass.to_string());
        tab.row(vec![name.to_string(), num(value), num(tol), pass.to_string()]);
    };

    // Yamaguchi: Nyström t against g τ g
    let (lam, beta) = (c.pair_strength, c.pair_beta);
    let pot = PairPotential::Yamaguchi { strength: lam, beta };
    let opts = LsOptions::default();
    let mut worst = 0.0f64;
    for z in [C64::new(-0.5, 0.3), C64::new(0.4, 0.2), C64::new(1.5, -0.4)] {
        let t = solve_ls(&pot, z, &opts)?;
        let k = C64::new(0.3, 0.0);
        let g = 1.0 / (k * k + beta * beta);
        let want = g * g * yamaguchi::tau(z, lam, beta);
        worst = worst.max((t.eval(k, k) - want).norm() / want.norm());
    }
    check("two_body_closed_form", worst, 1e-8);

    let mut worst = 0.0f64;
    for z in [C64::new(0.4, 0.2), C64::new(-0.3, -0.5)] {
        let s = smatrix(&pot, z, &opts)?.value;
        let s1 = continue_s_sheet(&pot, z, &opts)?.value;
        worst = worst.max((s * s1 - 1.0).norm());
        // s₀ against its closed form
        let want = 1.0 + a0(z) * 4.0 * std::f64::consts::PI * yamaguchi::tau(z, lam, beta) / (z + beta * beta).powi(2);
        worst = worst.max((s - want).norm());
    }
    check("two_body_smatrix", worst, 1e-10);

    // double crossing returns to the start
    let ts = ThresholdSet::new(vec![
        Threshold { alpha: 1, j: 1, lambda: -2.0 },
        Threshold { alpha: 2, j: 1, lambda: -0.5 },
    ])?;
    let mut bad = 0.0;
    for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
        for l0 in [-1, 0, 1] {
            let l = MultiIndex::from_level_bits(&ts, l0, &bits)?;
            for seg in ts.segments() {
                for dir in [Direction::FromBelow, Direction::FromAbove] {
                    let back = match dir {
                        Direction::FromBelow => Direction::FromAbove,
                        Direction::FromAbove => Direction::FromBelow,
                    };
                    if let Ok(m) = cross_cut(&l, seg, dir, &ts) {
                        if cross_cut(&m, seg, back, &ts)? != l {
                            bad += 1.0;
                        }
                    }
                }
            }
        }
    }
    check("sheet_involution", bad, 0.5);

    // locus geometry against the brute-force roots
    let mut worst = 0.0f64;
    let (l1, l2, cc) = (c.lambda1, c.lambda2, c.loci_c);
    let loc = locus_quadr(l1, l2, cc)?;
    for eta in grid(c.loci_grid, -1.0, 1.0) {
        for z in quadr_oracle(l1, l2, cc, eta) {
            worst = worst.max(loc.distance(z) / sc(z));
        }
    }
    check("locus_quadr", worst, 1e-9);

    // kinetic-form rotation
    let jc = jacobi_coeffs(c.masses)?;
    let mut worst = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            worst = worst.max((jc.c[a][b].powi(2) + jc.s[a][b].powi(2) - 1.0).abs());
            let (k, p) = ([0.3, -1.1, 0.7], [0.9, 0.2, -0.4]);
            let (ka, pa) = jc.rotate(a, b, k, p);
            let (kb, pb) = jc.rotate(b, a, ka, pa);
            for i in 0..3 {
                worst = worst.max((kb[i] - k[i]).abs()).max((pb[i] - p[i]).abs());
            }
        }
    }
    check("rotation", worst, 1e-12);

    // three-body isometry above breakup
    let sys = ThreeBodySystem::identical_bosons(0.2, 1.0)?;
    let amp = assemble_t(&sys, C64::new(0.5, 0.0), &faddeev_options(c))?;
    check("three_body_unitarity", amp.unitarity_defect(6)?, 1e-6);

    rec.put("all_pass", all.to_string());
    let verdict = (!all).then(|| Failure::Numerical("verification failed".into()));
    Ok(Report { rec, tab, verdict })
}

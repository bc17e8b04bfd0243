//! Subcommand implementations. Each produces a [`Report`]: text for the
//! terminal and the artifacts written under `--out`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use casimir_pfa::functional::GradientEnergy;
use casimir_pfa::io::{self, sig12, sig6};
use casimir_pfa::model::{symbolic_coefficient_set, symbolic_for_kind, PiRational, SymbolicCoefficients};
use casimir_pfa::oracle::{extrapolated_energy, normalized_energy};
use casimir_pfa::pade::{energy_curve, Provenance, Resummed, Thetas};
use casimir_pfa::profile::BodySide;
use casimir_pfa::{
    ae_extract, build_energy_pade, build_pade, closed_form_inclined_cylinders, closed_form_two_spheres,
    extract_thetas, fit_theta1, gradient_energy, matching_check, oracle_curve, oracle_energy_d, pole_check,
    AsymptoticSeries, BoundaryCondition, CoefficientSet, EnergyCurve, Error, HeightProfile, IntegrationDomain,
    OracleConfig, PadeApproximant, Result,
};
use serde::Serialize;

use crate::manifest::{self, Artifact};
use crate::{
    Cli, CoeffsArgs, Command, FitThetaArgs, Figure1Args, FixtureArgs, GeometryArgs, KernelMatchArgs, Method,
    OracleArgs, OracleCommand, PadeCommand, Shape, Table1Args,
};

#[derive(Default)]
pub struct Report {
    pub text: String,
    pub artifacts: Vec<Artifact>,
    pub fixtures: Vec<PathBuf>,
}

impl Report {
    fn text(text: String) -> Self {
        Self {
            text,
            ..Self::default()
        }
    }

    /// Report whose terminal output is the single artifact it writes.
    fn file(name: &str, text: String) -> Self {
        Self {
            artifacts: vec![Artifact::new(name, text.clone())],
            text,
            fixtures: Vec::new(),
        }
    }

    fn with_fixture(mut self, path: &Path) -> Self {
        self.fixtures.push(path.to_path_buf());
        self
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let report = dispatch(&cli.command)?;
    match &cli.out {
        Some(dir) => {
            let mut artifacts = report.artifacts;
            if artifacts.is_empty() {
                artifacts.push(Artifact::new("output.txt", report.text));
            }
            let params = serde_json::to_value(&cli.command)?;
            let path = manifest::write_all(dir, cli.command.name(), params, &report.fixtures, &artifacts)?;
            for a in &artifacts {
                println!("{}", dir.join(&a.name).display());
            }
            println!("{}", path.display());
        }
        None => print!("{}", report.text),
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Coeffs(a) => coeffs(a),
        Command::Geometry(a) => geometry(a),
        Command::KernelMatch(a) => kernel_match(a),
        Command::Pade(p) => pade(p),
        Command::Oracle(o) => oracle(o),
        Command::FitTheta(a) => fit_theta(a),
        Command::Figure1(a) => figure1(a),
        Command::Table1(a) => table1(a),
    }
}

/// `D`, `EM`, `ND` or an explicit surface pair `D/N`.
fn parse_pair(s: &str) -> Result<SymbolicCoefficients> {
    match s.split_once('/') {
        Some((a, b)) => symbolic_coefficient_set(a.parse()?, b.parse()?),
        None => Ok(symbolic_for_kind(s.parse()?)),
    }
}

/// Left-aligned text table.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}  ", w = *w);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct Exact {
    exact: String,
    value: f64,
}

impl Exact {
    fn of(p: PiRational) -> Self {
        Self {
            exact: p.to_string(),
            value: p.eval(),
        }
    }
}

#[derive(Serialize)]
struct CoeffsJson {
    bc: String,
    first: BoundaryCondition,
    second: BoundaryCondition,
    alpha: Exact,
    beta1: Exact,
    beta2: Exact,
    beta_cross: Exact,
    theta1: Exact,
}

fn coeffs(a: &CoeffsArgs) -> Result<Report> {
    let c = parse_pair(&a.bc)?;
    let pairs = [
        ("alpha", PiRational::rational(c.alpha)),
        ("beta1", c.beta1),
        ("beta2", c.beta2),
        ("beta_cross", c.beta_cross),
        ("theta1", c.theta1()),
    ];
    if a.json {
        let [alpha, beta1, beta2, beta_cross, theta1] = pairs.map(|(_, p)| Exact::of(p));
        return Ok(Report::text(json(&CoeffsJson {
            bc: a.bc.trim().to_ascii_uppercase(),
            first: c.first,
            second: c.second,
            alpha,
            beta1,
            beta2,
            beta_cross,
            theta1,
        })?));
    }
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|(name, p)| vec![name.to_string(), p.to_string(), sig6(p.eval())])
        .collect();
    let mut text = format!("surfaces {}/{}\n", c.first, c.second);
    text.push_str(&table(&["coefficient", "exact", "value"], &rows));
    Ok(Report::text(text))
}

const SPHERE_DOMAIN_FRACTION: f64 = 0.9;
const SPHERE_SLOPE_CAP: f64 = 10.0;

fn quadrature_energy(
    h1: &HeightProfile<f64>,
    h2: &HeightProfile<f64>,
    coeffs: &CoefficientSet<f64>,
    radius: f64,
) -> Result<GradientEnergy<f64>> {
    let dom = IntegrationDomain::disk(radius).with_slope_cap(SPHERE_SLOPE_CAP);
    gradient_energy(h1, h2, coeffs, &coeffs.law(), &dom)
}

fn geometry(a: &GeometryArgs) -> Result<Report> {
    let sym = parse_pair(&a.bc)?;
    let coeffs: CoefficientSet<f64> = sym.eval();
    let r1 = a.radius;
    let r2 = a.radius2.unwrap_or(r1);
    for (v, what) in [(r1, "--radius"), (r2, "--radius2"), (a.lambda, "--lambda"), (a.length, "--length")] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{what} must be positive, got {v}")));
        }
    }
    if a.sweep.0.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain("sweep values must be positive".into()));
    }
    let closed_available = a.shape != Shape::Profile;
    let use_closed = match a.method {
        Method::Auto => closed_available,
        Method::Closed if !closed_available => {
            return Err(Error::UnsupportedConfiguration(
                "no closed form for tabulated or descriptor profiles; use --method quadrature".into(),
            ))
        }
        Method::Closed => true,
        Method::Quadrature => false,
    };
    let method = if use_closed { "closed" } else { "quadrature" };
    let pi3 = std::f64::consts::PI.powi(3);
    let plate_pfa = |reff: f64, d: f64| -coeffs.alpha * pi3 * reff / (1440.0 * d * d);
    let mut rows = Vec::new();
    let mut fixtures = Vec::new();
    match a.shape {
        Shape::SpherePlate | Shape::TwoSpheres => {
            let other = (a.shape == Shape::TwoSpheres).then_some(r2);
            for &x in &a.sweep.0 {
                let d = x * r1;
                let cf = closed_form_two_spheres(r1, other, d, &coeffs)?;
                let ratio = if use_closed {
                    cf.ratio
                } else {
                    let h1 = HeightProfile::sphere_below(r1, 0.0);
                    let (h2, rmin) = match other {
                        Some(r2) => (HeightProfile::sphere(r2, d), r1.min(r2)),
                        None => (HeightProfile::flat(d), r1),
                    };
                    quadrature_energy(&h1, &h2, &coeffs, SPHERE_DOMAIN_FRACTION * rmin)?.energy / cf.pfa_energy
                };
                rows.push(vec![sig12(x), sig12(ratio), method.into()]);
            }
        }
        Shape::Hyperboloid => {
            let reff = r1 / (a.lambda * a.lambda);
            let slope = 2.0 * coeffs.beta1 + 1.0 / (a.lambda * a.lambda);
            for &x in &a.sweep.0 {
                let d = x * r1;
                let ratio = if use_closed {
                    1.0 + slope * a.lambda * a.lambda * x
                } else {
                    let h1 = HeightProfile::Hyperboloid {
                        radius: r1,
                        lambda: a.lambda,
                        apex: 0.0,
                        body: BodySide::Below,
                    };
                    let rho = SPHERE_DOMAIN_FRACTION * r1 / a.lambda;
                    quadrature_energy(&h1, &HeightProfile::flat(d), &coeffs, rho)?.energy / plate_pfa(reff, d)
                };
                rows.push(vec![sig12(x), sig12(ratio), method.into()]);
            }
        }
        Shape::Cylinders => {
            for &theta in &a.theta.0 {
                for &x in &a.sweep.0 {
                    let d = x * r1;
                    let cf = closed_form_inclined_cylinders(r1, r2, d, theta, &coeffs)?;
                    let ratio = if use_closed {
                        cf.correction
                    } else {
                        let h1 = HeightProfile::Cylinder {
                            radius: r1,
                            axis_angle: 0.0,
                            apex: 0.0,
                            body: BodySide::Below,
                        };
                        let h2 = HeightProfile::Cylinder {
                            radius: r2,
                            axis_angle: theta,
                            apex: d,
                            body: BodySide::Above,
                        };
                        quadrature_energy(&h1, &h2, &coeffs, SPHERE_DOMAIN_FRACTION * r1.min(r2))?.energy
                            / cf.leading
                    };
                    rows.push(vec![sig12(theta), sig12(x), sig12(ratio), method.into()]);
                }
            }
        }
        Shape::Profile => {
            let path = a
                .profile
                .as_ref()
                .ok_or_else(|| Error::Input("--shape profile needs --profile FILE".into()))?;
            let base = io::read_profile(path)?;
            fixtures.push(path.clone());
            let plane = HeightProfile::flat(0.0);
            let h0 = base.height(0.0, 0.0);
            let law = coeffs.law();
            for &x in &a.sweep.0 {
                let h2 = base.clone().raised(x * a.length - h0);
                let dom = IntegrationDomain::auto_disk(&plane, &h2, &law, (0.0, 0.0), a.slope_cap)?;
                let res = gradient_energy(&plane, &h2, &coeffs, &law, &dom)?;
                let flag = if res.slope_warning { "quadrature-slope-warning" } else { method };
                rows.push(vec![sig12(x), sig12(res.ratio()), flag.into()]);
            }
        }
    }
    let header: &[&str] = if a.shape == Shape::Cylinders {
        &["theta", "d_over_R", "E_over_EPFA", "method"]
    } else {
        &["d_over_R", "E_over_EPFA", "method"]
    };
    let mut report = Report::file("geometry.csv", csv(header, &rows));
    report.fixtures = fixtures;
    Ok(report)
}

#[derive(Serialize)]
struct MatchRow {
    d: f64,
    mu_residual: Option<f64>,
    gamma_residual: f64,
    beta: f64,
    beta_uncertainty: f64,
    beta_exact: f64,
}

fn kernel_match(a: &KernelMatchArgs) -> Result<Report> {
    let sym = parse_pair(&a.bc)?;
    let coeffs: CoefficientSet<f64> = sym.eval();
    let kernel = io::read_kernel(std::fs::File::open(&a.kernel)?)?;
    let ds = match &a.d {
        Some(g) => g.0.clone(),
        None => kernel.separations(),
    };
    let law = coeffs.law();
    let beta_exact = coeffs.beta1;
    let mut out = Vec::with_capacity(ds.len());
    for d in ds {
        let r = matching_check(&kernel, &law, d, a.tolerance)?;
        out.push(MatchRow {
            d,
            mu_residual: r.mu_residual,
            gamma_residual: r.gamma_residual,
            beta: r.beta,
            beta_uncertainty: r.beta_uncertainty,
            beta_exact,
        });
    }
    let text = if a.json {
        json(&out)?
    } else {
        let rows: Vec<Vec<String>> = out
            .iter()
            .map(|m| {
                vec![
                    sig6(m.d),
                    m.mu_residual.map_or_else(|| "n/a".into(), sig6),
                    sig6(m.gamma_residual),
                    sig6(m.beta),
                    sig6(m.beta_uncertainty),
                    sig6(m.beta_exact),
                ]
            })
            .collect();
        table(&["d", "mu_residual", "gamma_residual", "beta", "beta_err", "beta_exact"], &rows)
    };
    Ok(Report::text(text).with_fixture(&a.kernel))
}

struct Loaded {
    series: AsymptoticSeries<f64>,
    alpha: f64,
    beta: f64,
}

fn load_series(f: &FixtureArgs) -> Result<Loaded> {
    let mut series = io::read_series(&f.fixture).map_err(|e| match e {
        Error::Io(io) => Error::Input(format!(
            "cannot read fixture {}: {io}; expected JSON {{\"bc\": \"D|N|EM\", \"j0\": int, \"coefficients\": [..], \"source\": string}}",
            f.fixture.display()
        )),
        other => other,
    })?;
    if let Some(n) = f.n {
        series = series.truncated(n)?;
    }
    let coeffs: CoefficientSet<f64> = CoefficientSet::for_kind(series.bc);
    Ok(Loaded {
        alpha: coeffs.alpha,
        beta: coeffs.beta1,
        series,
    })
}

fn build(l: &Loaded, energy: bool) -> Result<PadeApproximant<f64>> {
    if energy {
        build_energy_pade(&l.series, l.alpha, l.beta)
    } else {
        build_pade(&l.series, l.alpha, l.beta)
    }
}

fn pade(cmd: &PadeCommand) -> Result<Report> {
    match cmd {
        PadeCommand::Build { fixture, json: as_json } => {
            let l = load_series(fixture)?;
            let p = build(&l, fixture.energy)?;
            let text = if *as_json {
                json(&p)?
            } else {
                let mut s = format!(
                    "{} approximant [{}/{}] for {} (j0 = {}, n = {})\ncondition {}  residual {}\n",
                    match p.quantity {
                        Resummed::Force => "force",
                        Resummed::Energy => "energy",
                    },
                    p.p.len() - 1,
                    p.q.len() - 1,
                    l.series.bc,
                    l.series.j0,
                    l.series.n(),
                    sig6(p.condition),
                    sig6(p.residual),
                );
                let rows: Vec<Vec<String>> = (0..p.p.len())
                    .map(|i| {
                        vec![
                            i.to_string(),
                            sig12(p.p[i]),
                            p.q.get(i).map_or_else(String::new, |&q| sig12(q)),
                        ]
                    })
                    .collect();
                s.push_str(&table(&["power", "p", "q"], &rows));
                for (pole, zero) in p.doublets() {
                    let _ = writeln!(s, "cancelled doublet: pole {} zero {}", sig6(*pole), sig6(*zero));
                }
                s
            };
            Ok(Report::text(text).with_fixture(&fixture.fixture))
        }
        PadeCommand::Eval { fixture, r } => {
            let l = load_series(fixture)?;
            let p = build(&l, fixture.energy)?;
            let col = if fixture.energy { "ER" } else { "f" };
            let rows = r
                .0
                .iter()
                .map(|&r| Ok(vec![sig12(r), sig12(p.eval_force(r)?)]))
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::file("pade_eval.csv", csv(&["r", col], &rows)).with_fixture(&fixture.fixture))
        }
        PadeCommand::Thetas { fixture, json: as_json } => {
            if fixture.energy {
                return Err(Error::Input("θ extraction needs the force approximant; drop --energy".into()));
            }
            let l = load_series(fixture)?;
            // Sensitivity to the number of series terms, stepping n by 2 to keep parity.
            let mut sens: Vec<(usize, Thetas<f64>, f64)> = Vec::new();
            let mut n = l.series.n();
            loop {
                let s = l.series.truncated(n)?;
                let p = build_pade(&s, l.alpha, l.beta)?;
                sens.push((n, extract_thetas(&p, l.alpha)?, p.condition));
                if n < 3 || sens.len() == 3 {
                    break;
                }
                n -= 2;
            }
            let text = if *as_json {
                #[derive(Serialize)]
                struct Row {
                    n: usize,
                    #[serde(flatten)]
                    thetas: Thetas<f64>,
                    condition: f64,
                }
                let rows: Vec<Row> = sens
                    .iter()
                    .map(|&(n, thetas, condition)| Row { n, thetas, condition })
                    .collect();
                json(&rows)?
            } else {
                let rows: Vec<Vec<String>> = sens
                    .iter()
                    .map(|(n, t, c)| vec![n.to_string(), sig6(t.theta1), sig6(t.theta2), sig6(*c)])
                    .collect();
                format!("{}\n{}", l.series.bc, table(&["n", "theta1", "theta2", "condition"], &rows))
            };
            Ok(Report::text(text).with_fixture(&fixture.fixture))
        }
        PadeCommand::Poles {
            fixture,
            r_max,
            json: as_json,
        } => {
            let l = load_series(fixture)?;
            let p = build(&l, fixture.energy)?;
            let report = pole_check(&p, *r_max)?;
            let text = if *as_json {
                json(&report)?
            } else {
                let mut s = String::new();
                if report.poles.is_empty() {
                    let _ = writeln!(s, "no positive real roots of Q on (0, {}]", sig6(*r_max));
                } else {
                    let rows: Vec<Vec<String>> = report
                        .poles
                        .iter()
                        .map(|p| {
                            vec![
                                sig6(p.location),
                                p.cancelled_by.map_or_else(|| "pole".into(), |z| format!("doublet (zero {})", sig6(z))),
                            ]
                        })
                        .collect();
                    s.push_str(&table(&["r", "kind"], &rows));
                }
                let _ = writeln!(
                    s,
                    "{}",
                    if report.is_pole_free() { "pole-free" } else { "has uncancelled poles" }
                );
                s
            };
            Ok(Report::text(text).with_fixture(&fixture.fixture))
        }
        PadeCommand::Curve { fixture, sweep } => {
            let l = load_series(fixture)?;
            let p = build(&l, fixture.energy)?;
            let curve = pade_curve(&p, l.alpha, &sweep.0)?;
            let mut buf = Vec::new();
            io::write_curve(&mut buf, &curve)?;
            Ok(Report::file("pade_curve.csv", utf8(buf)).with_fixture(&fixture.fixture))
        }
    }
}

/// `E/E_PFA` on `d/R` values from either kind of approximant.
fn pade_curve(p: &PadeApproximant<f64>, alpha: f64, xs: &[f64]) -> Result<EnergyCurve<f64>> {
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain("d/R values must be positive".into()));
    }
    match p.quantity {
        Resummed::Force => {
            let rs: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
            energy_curve(p, alpha, &rs)
        }
        Resummed::Energy => {
            let mut xs = xs.to_vec();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let samples = xs
                .iter()
                .map(|&x| Ok((x, p.energy_ratio(1.0 / x, alpha)?)))
                .collect::<Result<Vec<_>>>()?;
            EnergyCurve::new(samples, Provenance::Pade)
        }
    }
}

fn utf8(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("writers emit UTF-8")
}

fn oracle_template(a: &OracleArgs) -> OracleConfig {
    OracleConfig::new(a.ell_max, a.radius, a.radius)
        .with_kappa_nodes(a.kappa_nodes)
        .with_extrapolation(a.extrapolate)
}

fn oracle(cmd: &OracleCommand) -> Result<Report> {
    match cmd {
        OracleCommand::Energy {
            oracle,
            d_over_r,
            json: as_json,
        } => {
            let cfg = oracle_template(oracle).at_ratio(*d_over_r);
            cfg.validate()?;
            let energy = oracle_energy_d(&cfg)?;
            let (ratio, error) = if cfg.extrapolate {
                extrapolated_energy(&cfg)?
            } else {
                let e = normalized_energy(&cfg)?;
                let coarse = cfg.ell_max.saturating_sub(4).max(10);
                let err = if coarse < cfg.ell_max {
                    (e - normalized_energy(&cfg.with_ell_max(coarse))?).abs()
                } else {
                    f64::NAN
                };
                (e, err)
            };
            #[derive(Serialize)]
            struct Out {
                config: OracleConfig,
                d_over_r: f64,
                energy: f64,
                pfa_energy: f64,
                ratio: f64,
                error: f64,
            }
            let out = Out {
                config: cfg,
                d_over_r: *d_over_r,
                energy,
                pfa_energy: energy / normalized_energy(&cfg)?,
                ratio,
                error,
            };
            let text = if *as_json {
                json(&out)?
            } else {
                table(
                    &["d_over_R", "E", "E_PFA", "E_over_EPFA", "error"],
                    &[vec![
                        sig6(out.d_over_r),
                        sig6(out.energy),
                        sig6(out.pfa_energy),
                        sig6(out.ratio),
                        sig6(out.error),
                    ]],
                )
            };
            Ok(Report::text(text))
        }
        OracleCommand::Curve { oracle, grid } => {
            let curve = oracle_curve(&oracle_template(oracle), &grid.0)?;
            let (mut c, mut e) = (Vec::new(), Vec::new());
            io::write_curve(&mut c, &curve)?;
            io::write_curve_errors(&mut e, &curve)?;
            let text = utf8(c);
            Ok(Report {
                artifacts: vec![
                    Artifact::new("oracle_curve.csv", text.clone()),
                    Artifact::new("oracle_curve_errors.csv", e),
                ],
                text,
                fixtures: Vec::new(),
            })
        }
        OracleCommand::Ae { oracle, grid, m } => {
            let curve = oracle_curve(&oracle_template(oracle), &grid.0)?;
            let bc = BoundaryCondition::D;
            let j0 = bc.series_offset().expect("D has a series offset");
            let est = ae_extract(&curve, 1.0, j0, *m)?;
            let series = est.to_series(
                bc,
                format!("oracle ell_max={} kappa_nodes={}", oracle.ell_max, oracle.kappa_nodes),
            );
            let mut buf = Vec::new();
            io::write_series(&mut buf, &series)?;
            let text = utf8(buf);
            Ok(Report {
                artifacts: vec![
                    Artifact::new("ae_D.json", text.clone()),
                    Artifact::new("ae_estimate.json", json(&est)?),
                ],
                text,
                fixtures: Vec::new(),
            })
        }
    }
}

fn fit_theta(a: &FitThetaArgs) -> Result<Report> {
    let curve = io::read_curve_file(&a.curve, Provenance::ExternalFixture)?;
    let fit = fit_theta1(&curve, (a.range.0, a.range.1))?;
    let text = if a.json {
        json(&fit)?
    } else {
        table(
            &["theta1", "theta1_err", "theta2", "theta2_err", "rms", "samples"],
            &[vec![
                sig6(fit.theta1),
                sig6(fit.theta1_uncertainty),
                sig6(fit.theta2),
                sig6(fit.theta2_uncertainty),
                sig6(fit.residual),
                fit.samples.to_string(),
            ]],
        )
    };
    Ok(Report::text(text).with_fixture(&a.curve))
}

/// `BC=FILE` pairs.
fn parse_assignments(items: &[String]) -> Result<BTreeMap<String, PathBuf>> {
    items
        .iter()
        .map(|s| {
            let (bc, file) = s
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("`{s}`: expected BC=FILE")))?;
            let bc: BoundaryCondition = bc.parse()?;
            Ok((bc.to_string(), PathBuf::from(file)))
        })
        .collect()
}

fn fixture_path(dir: &Path, bc: BoundaryCondition) -> Result<PathBuf> {
    let path = dir.join(format!("ae_{bc}.json"));
    if !path.is_file() {
        return Err(Error::Input(format!(
            "missing fixture {}; expected JSON {{\"bc\": \"{bc}\", \"j0\": int, \"coefficients\": [..], \"source\": string}} \
             holding the large-distance force coefficients",
            path.display()
        )));
    }
    Ok(path)
}

fn figure1(a: &Figure1Args) -> Result<Report> {
    let bcs = a
        .bc
        .iter()
        .map(|s| {
            let bc: BoundaryCondition = s.parse()?;
            if bc.series_offset().is_none() {
                return Err(Error::UnsupportedConfiguration(format!("no sphere-plate series for {bc}")));
            }
            Ok(bc)
        })
        .collect::<Result<Vec<_>>>()?;
    let external = parse_assignments(&a.external)?;
    let mut report = Report::default();
    let mut summary = Vec::new();
    let mut plots = Vec::new();
    for bc in bcs {
        let path = fixture_path(&a.fixtures, bc)?;
        report.fixtures.push(path.clone());
        let l = load_series(&FixtureArgs {
            fixture: path,
            n: None,
            energy: false,
        })?;
        let p = build(&l, false)?;
        let thetas = extract_thetas(&p, l.alpha)?;
        let curve = pade_curve(&p, l.alpha, &a.sweep.0)?;
        let coeffs: CoefficientSet<f64> = CoefficientSet::for_kind(bc);
        let rows = curve
            .samples
            .iter()
            .map(|&(x, e)| {
                let line = closed_form_two_spheres(1.0, None, x, &coeffs)?.ratio;
                Ok(vec![sig12(x), sig12(e), sig12(line)])
            })
            .collect::<Result<Vec<_>>>()?;
        let name = format!("figure1_{bc}.csv");
        report
            .artifacts
            .push(Artifact::new(&name, csv(&["d_over_R", "pade", "first_correction"], &rows)));

        let points = if let Some(file) = external.get(bc.as_str()) {
            report.fixtures.push(file.clone());
            Some(io::read_curve_file(file, Provenance::ExternalFixture)?)
        } else if bc == BoundaryCondition::D && !a.no_oracle {
            let template = OracleConfig::new(a.ell_max, 1.0, 1.0)
                .with_kappa_nodes(a.kappa_nodes)
                .with_extrapolation(!a.raw_oracle);
            Some(oracle_curve(&template, &a.oracle_grid.0)?)
        } else {
            None
        };
        let mut worst = None;
        let mut points_name = None;
        if let Some(pts) = points {
            let pade_at = pade_curve(&p, l.alpha, &pts.samples.iter().map(|s| s.0).collect::<Vec<_>>())?;
            let mut rows = Vec::new();
            let mut max_rel: f64 = 0.0;
            for (i, (&(x, e), &(_, pe))) in pts.samples.iter().zip(&pade_at.samples).enumerate() {
                let rel = (pe - e).abs() / e.abs();
                max_rel = max_rel.max(rel);
                let err = pts.errors.as_ref().map_or(f64::NAN, |v| v[i]);
                rows.push(vec![sig12(x), sig12(e), sig12(err), sig12(pe), sig12(rel)]);
            }
            worst = Some(max_rel);
            let name = format!("figure1_{bc}_points.csv");
            report.artifacts.push(Artifact::new(
                &name,
                csv(&["d_over_R", "E_over_EPFA", "error", "pade", "relative_difference"], &rows),
            ));
            points_name = Some(name);
        }
        plots.push((bc, name, points_name));
        let poles = pole_check(&p, 100.0)?;
        summary.push(vec![
            bc.to_string(),
            sig6(thetas.theta1),
            sig6(thetas.theta2),
            if poles.is_pole_free() { "none".into() } else { "present".into() },
            worst.map_or_else(|| "n/a".into(), |w| format!("{}%", sig6(100.0 * w))),
        ]);
    }
    report.artifacts.push(Artifact::new("figure1.gp", gnuplot(&plots)));
    report.text = table(&["bc", "theta1", "theta2", "poles", "max_pade_vs_points"], &summary);
    Ok(report)
}

fn gnuplot(plots: &[(BoundaryCondition, String, Option<String>)]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'd/R'\nset ylabel 'E/E_PFA'\n\
         set logscale x\nset xrange [0.01:5]\nset yrange [0:1.6]\n",
    );
    let mut parts = Vec::new();
    for (i, (bc, curve, points)) in plots.iter().enumerate() {
        let lc = i + 1;
        parts.push(format!("'{curve}' using 1:2 with lines lc {lc} title '{bc} Padé'"));
        parts.push(format!("'{curve}' using 1:3 with lines dt 2 lc {lc} title '{bc} 1 + θ₁ d/R'"));
        if let Some(p) = points {
            parts.push(format!("'{p}' using 1:2:3 with yerrorbars pt 7 lc {lc} title '{bc} numerical'"));
        }
    }
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

#[derive(Serialize)]
struct Table1Row {
    bc: BoundaryCondition,
    fit: Option<f64>,
    fit_uncertainty: Option<f64>,
    exact: f64,
    exact_symbolic: String,
    source: String,
}

fn table1(a: &Table1Args) -> Result<Report> {
    let curves = parse_assignments(&a.curves)?;
    let mut report = Report::default();
    let mut out = Vec::new();
    for bc in [BoundaryCondition::D, BoundaryCondition::N, BoundaryCondition::EM] {
        let exact = bc.theta1();
        let (curve, source) = if let Some(file) = curves.get(bc.as_str()) {
            report.fixtures.push(file.clone());
            (
                Some(io::read_curve_file(file, Provenance::ExternalFixture)?),
                file.display().to_string(),
            )
        } else if bc == BoundaryCondition::D && !a.no_oracle {
            let template = OracleConfig::new(a.ell_max, 1.0, 1.0)
                .with_kappa_nodes(a.kappa_nodes)
                .with_extrapolation(!a.raw_oracle);
            (Some(oracle_curve(&template, &a.oracle_grid.0)?), "oracle".to_string())
        } else {
            (None, "n/a".to_string())
        };
        let fit = curve.map(|c| fit_theta1(&c, (a.range.0, a.range.1))).transpose()?;
        out.push(Table1Row {
            bc,
            fit: fit.map(|f| f.theta1),
            fit_uncertainty: fit.map(|f| f.theta1_uncertainty),
            exact: exact.eval(),
            exact_symbolic: exact.to_string(),
            source,
        });
    }
    let na = || "n/a".to_string();
    let rows: Vec<Vec<String>> = out
        .iter()
        .map(|r| {
            vec![
                r.bc.to_string(),
                r.fit.map_or_else(na, sig12),
                r.fit_uncertainty.map_or_else(na, sig12),
                sig12(r.exact),
            ]
        })
        .collect();
    report.artifacts.push(Artifact::new(
        "table1.csv",
        csv(&["bc", "theta1_fit", "theta1_fit_uncertainty", "theta1_exact"], &rows),
    ));
    report.artifacts.push(Artifact::new("table1.json", json(&out)?));
    report.text = if a.json {
        json(&out)?
    } else {
        let rows: Vec<Vec<String>> = out
            .iter()
            .map(|r| {
                vec![
                    r.bc.to_string(),
                    r.fit.map_or_else(na, sig6),
                    r.fit_uncertainty.map_or_else(na, sig6),
                    sig6(r.exact),
                    r.exact_symbolic.clone(),
                    r.source.clone(),
                ]
            })
            .collect();
        table(&["bc", "theta1_fit", "fit_err", "theta1_exact", "exact", "fit_source"], &rows)
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("d/n").unwrap().second, BoundaryCondition::N);
        assert_eq!(parse_pair("EM").unwrap().first, BoundaryCondition::EM);
        assert!(matches!(parse_pair("D/EM"), Err(Error::UnsupportedConfiguration(_))));
        assert!(matches!(parse_pair("X"), Err(Error::UnknownBoundary(_))));
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bb"], &[vec!["long".into(), "1".into()]]);
        assert_eq!(t, "a     bb\nlong  1\n");
    }
}

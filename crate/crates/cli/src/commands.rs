//! Subcommand bodies. Each returns the text for stdout and the exit code.

use std::fmt::Write as _;
use std::path::Path;

use jordan_geo::jb::{
    connect_residual, connect_type1, equivalent_elements, fiber_sample, jb_spectral,
};
use jordan_geo::linalg::identity;
use jordan_geo::manifold::{geodesic, is_tangent, riemann_metric, tangent_space_basis, BasePoint};
use jordan_geo::peirce::{peirce_projections, PeirceIndex};
use jordan_geo::random::Sampler;
use jordan_geo::spectral::{spectral_resolution, unitary_connect};
use jordan_geo::triple::Tripotent;
use jordan_geo::verify::{run_suites, Bound, Suite, SuiteConfig};
use jordan_geo::{Matrix, Signature, Tol, C64};
use serde_json::{json, Value};

use crate::io::{
    fmt_f64, matrix_to_json, matrix_value, read_matrix, trajectory_header, trajectory_row,
    write_text,
};
use crate::{Cli, CliError, Command, GlobalArgs, Mode, SuiteArg, EXIT_DOMAIN, EXIT_OK};

/// Step of the central second difference behind trajectory residuals.
pub const RESIDUAL_STEP: f64 = 1e-4;
pub const MAX_STEPS: usize = 100_000;
pub const MAX_VERIFY_DIM: usize = 8;
pub const MAX_TRIALS: usize = 100_000;
pub const MAX_RANDOM_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub code: i32,
    pub warnings: Vec<String>,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            code: EXIT_OK,
            warnings: Vec::new(),
        }
    }
}

type Res<T> = Result<T, CliError>;

pub fn tolerance(g: &GlobalArgs) -> Res<Tol> {
    match g.tol {
        None => Ok(Tol::default()),
        Some(t) if t.is_finite() && t > 0.0 && t < 1.0 => Ok(Tol::uniform(t)),
        Some(t) => Err(CliError::Input(format!(
            "tolerance must lie in (0, 1), got {t}"
        ))),
    }
}

pub fn dispatch(cli: &Cli) -> Res<Report> {
    let tol = tolerance(&cli.global)?;
    let g = &cli.global;
    match &cli.command {
        Command::Spectral { file, mode } => spectral(&read_matrix(file)?, *mode, g.json, &tol),
        Command::Geodesic {
            a,
            u,
            t0,
            t1,
            steps,
            out,
        } => geodesic_cmd(
            &read_matrix(a)?,
            &read_matrix(u)?,
            (*t0, *t1, *steps),
            out.as_deref(),
            g.json,
            &tol,
        ),
        Command::Verify { suite, dim, trials } => {
            verify(*suite, *dim, *trials, g.seed, g.json, &tol)
        }
        Command::Connect {
            a,
            b,
            mode,
            out_u,
            out_v,
        } => connect(
            &read_matrix(a)?,
            &read_matrix(b)?,
            *mode,
            (out_u.as_deref(), out_v.as_deref()),
            g.json,
            &tol,
        ),
        Command::Random {
            component,
            dim,
            out,
        } => random(component, *dim, g.seed, out.as_deref(), g.json, &tol),
        Command::Fiber { a, v, t_list, out } => fiber(
            &read_matrix(a)?,
            &read_matrix(v)?,
            t_list,
            out.as_deref(),
            g.json,
            &tol,
        ),
        Command::Peirce { e, z } => {
            let z = z.as_deref().map(read_matrix).transpose()?;
            peirce(read_matrix(e)?, z.as_ref(), g.json, &tol)
        }
        Command::Tangent { a, u } => {
            let u = u.as_deref().map(read_matrix).transpose()?;
            tangent(&read_matrix(a)?, u.as_ref(), g.json, &tol)
        }
    }
}

fn fmt_c(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
    format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im.abs()))
}

fn join<T, F: Fn(&T) -> String>(items: &[T], f: F) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

fn complex_pairs(values: &[C64]) -> Value {
    json!(values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn fmt_signature(sig: &Signature) -> String {
    format!(
        "n={} Λ=({}) R=({})",
        sig.n(),
        join(&sig.lambda, |z| fmt_c(*z)),
        join(&sig.ranks, |r| r.to_string())
    )
}

fn signature_value(sig: &Signature) -> Value {
    json!({ "n": sig.n(), "lambda": complex_pairs(&sig.lambda), "ranks": sig.ranks })
}

fn matrices(ms: &[Matrix]) -> Res<Value> {
    Ok(Value::Array(
        ms.iter().map(matrix_value).collect::<Res<_>>()?,
    ))
}

fn spectral(a: &Matrix, mode: Mode, as_json: bool, tol: &Tol) -> Res<Report> {
    let (rows, cols) = a.shape();
    let (values, ranks, parts, sig, kernel) = match mode {
        Mode::Cstar => {
            let r = spectral_resolution(a, tol)?;
            let sig = r.signature()?;
            (
                r.values.clone(),
                r.ranks.clone(),
                r.projections.clone(),
                sig,
                Some(r.kernel_rank),
            )
        }
        Mode::Jb => {
            let r = jb_spectral(a, tol)?;
            let values = r.values.iter().map(|&v| C64::new(v, 0.0)).collect();
            (
                values,
                r.ranks.clone(),
                r.tripotents.clone(),
                r.signature(),
                None,
            )
        }
    };
    let support_rank: usize = ranks.iter().sum();
    if as_json {
        let mode_name = if mode == Mode::Cstar { "cstar" } else { "jb" };
        let parts_key = if mode == Mode::Cstar {
            "projections"
        } else {
            "tripotents"
        };
        let mut v = json!({
            "mode": mode_name,
            "rows": rows,
            "cols": cols,
            "n": values.len(),
            "values": complex_pairs(&values),
            "ranks": ranks,
            "support_rank": support_rank,
            "signature": signature_value(&sig),
        });
        v[parts_key] = matrices(&parts)?;
        if let Some(k) = kernel {
            v["kernel_rank"] = json!(k);
        }
        return Ok(Report::ok(pretty(&v)));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mode: {}",
        if mode == Mode::Cstar { "cstar" } else { "jb" }
    );
    let _ = writeln!(s, "shape: {rows}x{cols}");
    let _ = writeln!(s, "values: {}", join(&values, |z| fmt_c(*z)));
    let _ = writeln!(s, "ranks: {}", join(&ranks, |r| r.to_string()));
    let _ = writeln!(s, "support rank: {support_rank}");
    if let Some(k) = kernel {
        let _ = writeln!(s, "kernel rank: {k}");
    }
    let _ = writeln!(s, "signature: {}", fmt_signature(&sig));
    Ok(Report::ok(s))
}

fn geodesic_cmd(
    a: &Matrix,
    u: &Matrix,
    (t0, t1, steps): (f64, f64, usize),
    out: Option<&Path>,
    as_json: bool,
    tol: &Tol,
) -> Res<Report> {
    if !t0.is_finite() || !t1.is_finite() {
        return Err(CliError::Input("--t0 and --t1 must be finite".into()));
    }
    if steps == 0 || steps > MAX_STEPS {
        return Err(CliError::Input(format!(
            "--steps must lie in 1..={MAX_STEPS}"
        )));
    }
    if a.shape() != u.shape() {
        return Err(CliError::Input(format!(
            "shapes differ: {:?} vs {:?}",
            a.shape(),
            u.shape()
        )));
    }
    let g = geodesic(a, u, tol)?;
    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = if i == steps {
            t1
        } else {
            t0 + (t1 - t0) * i as f64 / steps as f64
        };
        rows.push((t, g.point(t)?, g.residual(t, RESIDUAL_STEP)?));
    }
    let max_residual = rows.iter().fold(0.0f64, |w, r| w.max(r.2));
    let mut csv = trajectory_header(a.len(), &["residual"]);
    csv.push('\n');
    for (t, p, r) in &rows {
        csv.push_str(&trajectory_row(*t, p, &[fmt_f64(*r)]));
        csv.push('\n');
    }
    if let Some(path) = out {
        write_text(path, &csv)?;
        let summary = if as_json {
            pretty(
                &json!({ "rows": rows.len(), "out": path.display().to_string(), "max_residual": max_residual }),
            )
        } else {
            format!(
                "wrote {} rows to {}\nmax residual: {max_residual:e}\n",
                rows.len(),
                path.display()
            )
        };
        return Ok(Report::ok(summary));
    }
    if as_json {
        let items = rows
            .iter()
            .map(|(t, p, r)| Ok(json!({ "t": t, "point": matrix_value(p)?, "residual": r })))
            .collect::<Res<Vec<_>>>()?;
        return Ok(Report::ok(pretty(&Value::Array(items))));
    }
    Ok(Report::ok(csv))
}

fn verify(
    suite: SuiteArg,
    dim: usize,
    trials: usize,
    seed: u64,
    as_json: bool,
    tol: &Tol,
) -> Res<Report> {
    if dim == 0 || dim > MAX_VERIFY_DIM {
        return Err(CliError::Input(format!(
            "--dim must lie in 1..={MAX_VERIFY_DIM}"
        )));
    }
    if trials > MAX_TRIALS {
        return Err(CliError::Input(format!(
            "--trials must not exceed {MAX_TRIALS}"
        )));
    }
    let suites = match suite {
        SuiteArg::Axioms => vec![Suite::Axioms],
        SuiteArg::Peirce => vec![Suite::Peirce],
        SuiteArg::Spectral => vec![Suite::Spectral],
        SuiteArg::Derivations => vec![Suite::Derivations],
        SuiteArg::Manifold => vec![Suite::Manifold],
        SuiteArg::Metric => vec![Suite::Metric],
        SuiteArg::Jb => vec![Suite::Jb],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let cfg = SuiteConfig {
        seed,
        trials,
        dim,
        tol: *tol,
    };
    let reports = run_suites(&suites, &cfg);
    let passed = reports.iter().all(|r| r.passed);
    let mut warnings = Vec::new();
    for r in &reports {
        warnings.extend(r.warnings.iter().map(|w| format!("{}: {w}", r.suite)));
    }
    let stdout = if as_json {
        let mut s =
            serde_json::to_string_pretty(&reports).map_err(|e| CliError::Domain(e.to_string()))?;
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for r in &reports {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{verdict} suite {} (seed {}, trials {}, dim {})",
                r.suite, r.seed, r.trials, r.dim
            );
            for c in &r.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                let op = if c.bound == Bound::AtMost { "<=" } else { ">=" };
                let worst = c.worst.map_or("n/a".to_string(), |w| format!("{w:e}"));
                let _ = write!(
                    s,
                    "  {verdict} {} worst {worst} {op} {:e} ({} samples",
                    c.name, c.threshold, c.samples
                );
                if c.errors > 0 {
                    let _ = write!(s, ", {} errors", c.errors);
                }
                s.push(')');
                if let Some(e) = &c.first_error {
                    let _ = write!(s, " first error: {e}");
                }
                s.push('\n');
            }
        }
        s
    };
    Ok(Report {
        stdout,
        code: if passed { EXIT_OK } else { EXIT_DOMAIN },
        warnings,
    })
}

fn unitarity(u: &Matrix) -> f64 {
    (u.adjoint() * u - identity::<f64>(u.nrows())).norm()
}

fn connect(
    a: &Matrix,
    b: &Matrix,
    mode: Mode,
    (out_u, out_v): (Option<&Path>, Option<&Path>),
    as_json: bool,
    tol: &Tol,
) -> Res<Report> {
    let (u, v, residual) = match mode {
        Mode::Cstar => {
            if out_v.is_some() {
                return Err(CliError::Input("--out-v only applies to --mode jb".into()));
            }
            let u = unitary_connect(a, b, tol)?;
            let residual = (&u * a * u.adjoint() - b).norm();
            (u, None, residual)
        }
        Mode::Jb => {
            let (u, v) = connect_type1(a, b, tol)?;
            let residual = connect_residual(a, b, &u, &v);
            (u, Some(v), residual)
        }
    };
    let unitary = v
        .as_ref()
        .map_or(unitarity(&u), |v| unitarity(&u).max(unitarity(v)));
    if let Some(path) = out_u {
        write_text(path, &(matrix_to_json(&u)? + "\n"))?;
    }
    if let (Some(path), Some(v)) = (out_v, &v) {
        write_text(path, &(matrix_to_json(v)? + "\n"))?;
    }
    if as_json {
        let mut r =
            json!({ "residual": residual, "unitarity_residual": unitary, "u": matrix_value(&u)? });
        if let Some(v) = &v {
            r["v"] = matrix_value(v)?;
        }
        return Ok(Report::ok(pretty(&r)));
    }
    let mut s = String::new();
    let _ = writeln!(s, "residual: {residual:e}");
    let _ = writeln!(s, "unitarity residual: {unitary:e}");
    if out_u.is_none() {
        let _ = writeln!(s, "U: {}", matrix_to_json(&u)?);
    }
    if let (None, Some(v)) = (out_v, &v) {
        let _ = writeln!(s, "V: {}", matrix_to_json(v)?);
    }
    Ok(Report::ok(s))
}

/// A real number or `re±imi`, `±imi`, `±i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    let z = if let Ok(x) = s.parse::<f64>() {
        C64::new(x, 0.0)
    } else {
        let body = s.strip_suffix('i')?;
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        let imag = |t: &str| -> Option<f64> {
            match t {
                "" | "+" => Some(1.0),
                "-" => Some(-1.0),
                _ => t.parse().ok(),
            }
        };
        match split {
            Some(k) => C64::new(body[..k].parse().ok()?, imag(&body[k..])?),
            None => C64::new(0.0, imag(body)?),
        }
    };
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Parses `λ1:r1,λ2:r2,…` and checks it describes a component of `M_dim`.
pub fn parse_component(spec: &str, dim: usize, tol: &Tol) -> Res<Vec<(C64, usize)>> {
    let bad = |m: String| CliError::Input(m);
    let mut out: Vec<(C64, usize)> = Vec::new();
    for item in spec.split(',') {
        let (l, r) = item
            .rsplit_once(':')
            .ok_or_else(|| bad(format!("component entry {item:?} is not of the form λ:r")))?;
        let lambda =
            parse_complex(l).ok_or_else(|| bad(format!("invalid spectral value {l:?}")))?;
        let rank: usize = r
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid rank {r:?}")))?;
        if rank == 0 {
            return Err(bad("ranks must be positive".into()));
        }
        if lambda.norm() <= tol.cluster_radius() {
            return Err(bad("spectral values must be nonzero".into()));
        }
        if out
            .iter()
            .any(|(m, _)| (m - lambda).norm() <= tol.cluster_radius())
        {
            return Err(bad("spectral values must be distinct".into()));
        }
        out.push((lambda, rank));
    }
    let total = out
        .iter()
        .try_fold(0usize, |acc, (_, r)| acc.checked_add(*r));
    if total.is_none_or(|t| t > dim) {
        return Err(bad(format!("total rank exceeds dimension {dim}")));
    }
    Ok(out)
}

fn random(
    component: &str,
    dim: usize,
    seed: u64,
    out: Option<&Path>,
    as_json: bool,
    tol: &Tol,
) -> Res<Report> {
    if dim == 0 || dim > MAX_RANDOM_DIM {
        return Err(CliError::Input(format!(
            "--dim must lie in 1..={MAX_RANDOM_DIM}"
        )));
    }
    let spec = parse_component(component, dim, tol)?;
    let m: Matrix = Sampler::new(seed).normal_element(dim, &spec);
    let text = matrix_to_json(&m)? + "\n";
    match out {
        None => Ok(Report::ok(text)),
        Some(path) => {
            write_text(path, &text)?;
            let sig = Signature::new(
                spec.iter().map(|p| p.0).collect(),
                spec.iter().map(|p| p.1).collect(),
            );
            Ok(Report::ok(if as_json {
                pretty(
                    &json!({ "out": path.display().to_string(), "signature": signature_value(&sig) }),
                )
            } else {
                format!("wrote {}\nsignature: {}\n", path.display(), fmt_signature(&sig))
            }))
        }
    }
}

fn fiber(
    a: &Matrix,
    v: &Matrix,
    ts: &[f64],
    out: Option<&Path>,
    as_json: bool,
    tol: &Tol,
) -> Res<Report> {
    if ts.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Input("--t-list entries must be finite".into()));
    }
    if a.shape() != v.shape() {
        return Err(CliError::Input(format!(
            "shapes differ: {:?} vs {:?}",
            a.shape(),
            v.shape()
        )));
    }
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let sample = fiber_sample(a, v, t, tol)?;
        let equivalent = equivalent_elements(a, &sample.point, tol)?;
        let circle = sample.unit_circle_residual.max(sample.jordan_unit_residual);
        rows.push((
            t,
            sample.point,
            sample.factorization_residual,
            circle,
            equivalent,
        ));
    }
    let all = rows.iter().all(|r| r.4);
    let mut csv = trajectory_header(
        a.len(),
        &[
            "factorization_residual",
            "unit_circle_residual",
            "equivalent",
        ],
    );
    csv.push('\n');
    for (t, p, f, c, e) in &rows {
        csv.push_str(&trajectory_row(
            *t,
            p,
            &[fmt_f64(*f), fmt_f64(*c), e.to_string()],
        ));
        csv.push('\n');
    }
    let code = if all { EXIT_OK } else { EXIT_DOMAIN };
    let stdout = if let Some(path) = out {
        write_text(path, &csv)?;
        format!(
            "wrote {} rows to {}\nall equivalent: {all}\n",
            rows.len(),
            path.display()
        )
    } else if as_json {
        let items = rows
            .iter()
            .map(|(t, p, f, c, e)| {
                Ok(json!({
                    "t": t,
                    "point": matrix_value(p)?,
                    "factorization_residual": f,
                    "unit_circle_residual": c,
                    "equivalent": e,
                }))
            })
            .collect::<Res<Vec<_>>>()?;
        pretty(&Value::Array(items))
    } else {
        csv
    };
    Ok(Report {
        stdout,
        code,
        warnings: Vec::new(),
    })
}

fn peirce(e: Matrix, z: Option<&Matrix>, as_json: bool, tol: &Tol) -> Res<Report> {
    let shape = e.shape();
    let t = Tripotent::new(e, tol)?;
    let d = peirce_projections(&t)?;
    let dims = PeirceIndex::ALL.map(|k| d.basis(k).len());
    let names = ["Z_1", "Z_1/2", "Z_0"];
    let parts = match z {
        None => None,
        Some(z) if z.shape() != shape => {
            return Err(CliError::Input(format!(
                "shapes differ: {shape:?} vs {:?}",
                z.shape()
            )));
        }
        Some(z) => {
            let parts = PeirceIndex::ALL
                .iter()
                .map(|&k| d.part(z, k))
                .collect::<Result<Vec<_>, _>>()?;
            let residual = (parts
                .iter()
                .fold(Matrix::zeros(shape.0, shape.1), |acc, p| acc + p)
                - z)
                .norm();
            Some((parts, residual))
        }
    };
    if as_json {
        let mut v = json!({
            "rows": shape.0,
            "cols": shape.1,
            "rank": t.rank(),
            "dims": { "one": dims[0], "half": dims[1], "zero": dims[2] },
        });
        if let Some((parts, residual)) = &parts {
            v["parts"] = matrices(parts)?;
            v["sum_residual"] = json!(residual);
        }
        return Ok(Report::ok(pretty(&v)));
    }
    let mut s = String::new();
    let _ = writeln!(s, "shape: {}x{}", shape.0, shape.1);
    let _ = writeln!(s, "tripotent rank: {}", t.rank());
    for (name, dim) in names.iter().zip(dims) {
        let _ = writeln!(s, "dim {name}: {dim}");
    }
    if let Some((parts, residual)) = &parts {
        for (name, p) in names.iter().zip(parts) {
            let _ = writeln!(s, "norm of {name} part: {:e}", p.norm());
        }
        let _ = writeln!(s, "sum residual: {residual:e}");
    }
    Ok(Report::ok(s))
}

fn tangent(a: &Matrix, u: Option<&Matrix>, as_json: bool, tol: &Tol) -> Res<Report> {
    let base = BasePoint::normal(a, tol)?;
    let basis = tangent_space_basis(a, tol)?;
    let sig = spectral_resolution(a, tol)?.signature()?;
    let check = match u {
        None => None,
        Some(u) => {
            let d = is_tangent(a, u, tol)?;
            let metric = if d.tangent {
                Some(riemann_metric(a, u, u, tol)?.0)
            } else {
                None
            };
            Some((d, metric))
        }
    };
    let code = match &check {
        Some((d, _)) if !d.tangent => EXIT_DOMAIN,
        _ => EXIT_OK,
    };
    let stdout = if as_json {
        let mut v = json!({
            "signature": signature_value(&sig),
            "support_rank": sig.total_rank(),
            "min_modulus": base.min_modulus(),
            "tangent_dim": basis.len(),
        });
        if let Some((d, metric)) = &check {
            v["tangent"] = json!(d.tangent);
            v["residual"] = json!(d.residual);
            v["components"] = matrices(&d.components)?;
            if let Some(m) = metric {
                v["metric"] = json!([m.re, m.im]);
            }
        }
        pretty(&v)
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "signature: {}", fmt_signature(&sig));
        let _ = writeln!(s, "support rank: {}", sig.total_rank());
        let _ = writeln!(s, "min |λ|: {}", base.min_modulus());
        let _ = writeln!(s, "tangent dimension: {}", basis.len());
        if let Some((d, metric)) = &check {
            let _ = writeln!(s, "tangent: {}", d.tangent);
            let _ = writeln!(s, "residual: {:e}", d.residual);
            if !d.components.is_empty() {
                let _ = writeln!(
                    s,
                    "component norms: {}",
                    join(&d.components, |c| format!("{:e}", c.norm()))
                );
            }
            if let Some(m) = metric {
                let _ = writeln!(s, "metric g(u,u): {}", fmt_c(*m));
            }
        }
        s
    };
    Ok(Report {
        stdout,
        code,
        warnings: Vec::new(),
    })
}

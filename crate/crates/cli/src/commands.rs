use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use shiftcodes::capacity::{sweep_row, threshold_sigma_with, ThresholdKind};
use shiftcodes::lattice::{LatticeFile, LatticeKind, Sublattice, MAX_ENUMERATION_MODES};
use shiftcodes::mc::{run_mc, McConfig};
use shiftcodes::qudit::{PauliLabel, QuditCode, DENSE_ORACLE_MAX_DIM};
use shiftcodes::squeezing::{wigner_sites, GaussianCodeword};
use shiftcodes::LatticeCode;

use crate::{
    CodeArgs, CodeFamily, Command, Format, LatticeInfoArgs, McArgs, PlotKind, QuditArgs, StateChoice,
    ThresholdArgs, ThresholdLattice, UserError, SCHEMA_VERSION, UNITS,
};

macro_rules! rows {
    ($m:expr) => {
        (0..$m.nrows()).map(|i| (0..$m.ncols()).map(|j| $m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Threshold(a) => threshold(a),
        Command::Mc(a) => mc(a),
        Command::Plotdata(a) => plotdata(a.kind),
        Command::QuditDemo(a) => qudit_demo(a),
        Command::LatticeInfo(a) => lattice_info(a),
    }
}

fn user(msg: impl Into<String>) -> anyhow::Error {
    UserError(msg.into()).into()
}

/// Write the whole payload at once so a failure leaves stdout empty.
fn emit(out: Option<&Path>, payload: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(payload).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn header(command: &str, seed: Option<u64>, parameters: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(seed));
    m.insert("units".into(), json!(UNITS));
    m.insert("parameters".into(), parameters);
    m
}

/// CSV preceded by `#` metadata lines carrying the same header fields as JSON output.
fn emit_csv<R: serde::Serialize>(out: Option<&Path>, command: &str, parameters: Value, rows: &[R]) -> Result<()> {
    let mut buf = Vec::new();
    for (k, v) in header(command, None, parameters) {
        writeln!(buf, "# {k}: {v}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    emit(out, &buf)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(user(format!("--{name} must be positive, got {x}")));
    }
    Ok(())
}

fn threshold(a: ThresholdArgs) -> Result<()> {
    let kind = match a.lattice {
        ThresholdLattice::Square => ThresholdKind::SquareCss,
        ThresholdLattice::Hex => ThresholdKind::HexStabilizer,
    };
    let target = a.target_pe.unwrap_or(kind.default_target());
    if !(target > 0.0 && target < 1.0) {
        return Err(user(format!("--target-pe must lie in (0, 1), got {target}")));
    }
    positive("tolerance", a.tolerance)?;
    let t = threshold_sigma_with(kind, target, a.tolerance)?;
    let mut m = header("threshold", None, json!({"lattice": kind, "target_pe": target, "tolerance": a.tolerance}));
    m.insert("kind".into(), json!(kind));
    m.insert("sigma_star".into(), json!(t.sigma_star));
    m.insert("target_pe".into(), json!(t.target_pe));
    m.insert("iterations".into(), json!(t.iterations));
    emit_json(a.out.as_deref(), &Value::Object(m))
}

fn build_code(c: &CodeArgs) -> Result<LatticeCode> {
    let kind = match c.code {
        CodeFamily::Square => match c.alpha {
            Some(alpha) => LatticeKind::Square { n: c.n, alpha },
            None => LatticeKind::SymmetricSquare { n: c.n },
        },
        CodeFamily::Hex => LatticeKind::Hexagonal { n: c.n },
        CodeFamily::Shor9 => LatticeKind::Shor9,
        CodeFamily::File => {
            let path = c.lattice_file.as_ref().ok_or_else(|| user("--code file needs --lattice-file"))?;
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let file: LatticeFile =
                serde_json::from_str(&text).map_err(|e| user(format!("{}: {e}", path.display())))?;
            return Ok(LatticeCode::from_file(&file)?);
        }
    };
    Ok(kind.build()?)
}

fn code_parameters(c: &CodeArgs) -> Value {
    json!({
        "code": format!("{:?}", c.code).to_lowercase(),
        "n": c.n,
        "alpha": c.alpha,
        "lattice_file": c.lattice_file.as_ref().map(|p| p.display().to_string()),
    })
}

fn mc(a: McArgs) -> Result<()> {
    positive("sigma", a.sigma)?;
    if a.trials == 0 {
        return Err(user("--trials must be at least 1"));
    }
    let code = build_code(&a.code)?;
    let mut cfg = McConfig::new(code, a.sigma, a.trials, a.seed);
    cfg.ancilla_sigma = a.ancilla_sigma;
    cfg.squeezing_delta = a.delta;
    cfg.workers = a.workers;
    let res = run_mc(&cfg)?;
    let mut params = code_parameters(&a.code);
    params["sigma"] = json!(a.sigma);
    params["trials"] = json!(a.trials);
    params["ancilla_sigma"] = json!(a.ancilla_sigma);
    params["delta"] = json!(a.delta);
    let mut m = header("mc", Some(a.seed), params);
    if let Value::Object(fields) = serde_json::to_value(&res)? {
        m.extend(fields);
    }
    emit_json(a.out.as_deref(), &Value::Object(m))
}

#[derive(serde::Serialize)]
struct DensityRow {
    q: f64,
    density: f64,
    envelope: f64,
}

#[derive(serde::Serialize)]
struct SiteRow {
    q: f64,
    p: f64,
    sign: i8,
    s: i64,
    t: i64,
}

#[derive(serde::Serialize)]
struct SweepCsvRow {
    sigma: f64,
    pe_square: f64,
    pe_hex: f64,
    css_rate: Option<f64>,
    holevo: f64,
    coherent: Option<f64>,
}

fn plotdata(kind: PlotKind) -> Result<()> {
    match kind {
        PlotKind::CodewordDensity { delta, kappa, n, alpha, state, out } => {
            let kappa = kappa.unwrap_or(delta);
            let alpha = alpha.unwrap_or(PI.sqrt());
            let (word, anchor) = match state {
                StateChoice::Zero => (GaussianCodeword::basis(n, alpha, delta, kappa, 0)?, 0.0),
                StateChoice::One => (GaussianCodeword::basis(n, alpha, delta, kappa, 1)?, alpha),
                StateChoice::Plus => (GaussianCodeword::plus(n, alpha, delta, kappa)?, 0.0),
            };
            let grid = word.default_position_grid();
            let density = word.position_density(&grid)?;
            // peak heights follow e^{−κ²q²}; scale through the peak nearest the origin
            let scale = word.position_amplitude(anchor).norm_sqr() * (kappa * anchor).powi(2).exp();
            let rows: Vec<DensityRow> = grid
                .points()
                .zip(density)
                .map(|(q, d)| DensityRow { q, density: d, envelope: scale * (-(kappa * q).powi(2)).exp() })
                .collect();
            let params = json!({
                "kind": "codeword-density", "delta": delta, "kappa": kappa, "n": n, "alpha": alpha,
                "state": format!("{state:?}").to_lowercase(), "warnings": word.warnings(),
            });
            emit_csv(out.as_deref(), "plotdata", params, &rows)
        }
        PlotKind::WignerSites { n, alpha, j, window, out } => {
            if window < 0 {
                return Err(user("--window must be non-negative"));
            }
            let alpha = alpha.unwrap_or((2.0 * PI / n.max(1) as f64).sqrt());
            let sites = wigner_sites(n, alpha, j, -window..=window, -window..=window)?;
            let rows: Vec<SiteRow> =
                sites.iter().map(|s| SiteRow { q: s.q, p: s.p, sign: s.sign, s: s.s, t: s.t }).collect();
            let params = json!({"kind": "wigner-sites", "n": n, "alpha": alpha, "j": j, "window": window});
            emit_csv(out.as_deref(), "plotdata", params, &rows)
        }
        PlotKind::Sweep { from, to, steps, out } => {
            positive("from", from)?;
            if !(to > from) || steps < 2 {
                return Err(user("sweep needs --to > --from and at least two --steps"));
            }
            let rows = (0..steps)
                .map(|i| {
                    let sigma = from + (to - from) * i as f64 / (steps - 1) as f64;
                    let r = sweep_row(sigma)?;
                    Ok(SweepCsvRow {
                        sigma,
                        pe_square: r.pe_square,
                        pe_hex: r.pe_hex,
                        css_rate: r.css_rate,
                        holevo: r.holevo,
                        coherent: r.coherent,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let params = json!({"kind": "sweep", "from": from, "to": to, "steps": steps});
            emit_csv(out.as_deref(), "plotdata", params, &rows)
        }
    }
}

fn qudit_demo(a: QuditArgs) -> Result<()> {
    let code = QuditCode::new(a.n, a.r1, a.r2)?;
    let d = code.d();
    if d > DENSE_ORACLE_MAX_DIM {
        return Err(user(format!("d = {d} exceeds the dense-oracle limit {DENSE_ORACLE_MAX_DIM}")));
    }
    let codewords: Vec<Value> = (0..a.n)
        .map(|j| {
            let support = code.codeword_support(j)?;
            let amplitude = 1.0 / (support.len() as f64).sqrt();
            Ok(json!({"j": j, "support": support, "amplitude": amplitude}))
        })
        .collect::<Result<_>>()?;
    let table: Vec<Value> = code
        .guaranteed_errors()
        .into_iter()
        .map(|e| {
            let out = code.decode(e);
            json!({"error": e, "syndrome": out.syndrome, "correction": out.correction, "logical": out.logical})
        })
        .collect();

    let di = d as i64;
    let mut matrix = Vec::with_capacity(d as usize);
    let (mut correctable, mut disagreements) = (0u64, 0u64);
    for a_exp in 0..di {
        let mut row = String::with_capacity(d as usize);
        for b_exp in 0..di {
            let e = PauliLabel { a: a_exp, b: b_exp };
            let dense = code.dense_oracle_roundtrip(e)?;
            let ok = (dense.fidelity - 1.0).abs() < 1e-12;
            let dec = code.decode(e);
            if ok != dec.correctable || dense.logical != dec.logical {
                disagreements += 1;
            }
            correctable += ok as u64;
            row.push(if ok { '1' } else { '0' });
        }
        matrix.push(row);
    }
    let (sx, sz) = code.stabilizer_exponents();
    let (lx, lz) = code.logical_exponents();

    match a.format {
        Format::Json => {
            let mut m = header("qudit-demo", None, json!({"n": a.n, "r1": a.r1, "r2": a.r2}));
            m.insert("d".into(), json!(d));
            m.insert("stabilizer_exponents".into(), json!({"x": sx, "z": sz}));
            m.insert("logical_exponents".into(), json!({"x": lx, "z": lz}));
            m.insert("codewords".into(), json!(codewords));
            m.insert("syndrome_table".into(), json!(table));
            m.insert("guaranteed_correctable".into(), json!(table.len()));
            m.insert("perfect".into(), json!(code.is_perfect()));
            m.insert(
                "oracle".into(),
                json!({"correctable": correctable, "disagreements": disagreements, "matrix": matrix}),
            );
            emit_json(a.out.as_deref(), &Value::Object(m))
        }
        Format::Text => {
            let mut s = String::new();
            use std::fmt::Write as _;
            writeln!(s, "qudit code n={} r1={} r2={} (d={d})", a.n, a.r1, a.r2)?;
            writeln!(s, "stabilizers X^{sx}, Z^{sz}; logicals X^{lx}, Z^{lz}")?;
            for j in 0..a.n {
                writeln!(s, "|{j}> support {:?}", code.codeword_support(j)?)?;
            }
            writeln!(s, "syndrome table ({} guaranteed errors):", table.len())?;
            for e in code.guaranteed_errors() {
                let o = code.decode(e);
                writeln!(
                    s,
                    "  X^{} Z^{} -> ({}, {}) correct by X^{} Z^{}",
                    e.a, e.b, o.syndrome.s_amp, o.syndrome.s_phase, o.correction.a, o.correction.b
                )?;
            }
            writeln!(s, "perfect: {}", code.is_perfect())?;
            writeln!(s, "dense oracle: {correctable} of {} errors corrected, {disagreements} disagreements", d * d)?;
            writeln!(s, "correctability (rows a, columns b):")?;
            for row in &matrix {
                writeln!(s, "  {row}")?;
            }
            emit(a.out.as_deref(), s.as_bytes())
        }
    }
}

fn lattice_info(a: LatticeInfoArgs) -> Result<()> {
    let code = build_code(&a.code)?;
    let form = code.standard_form();
    let shortest = |which| (code.modes() <= MAX_ENUMERATION_MODES).then(|| code.shortest_nonzero(which)).transpose();
    let mut m = header("lattice-info", None, code_parameters(&a.code));
    m.insert("descriptor".into(), json!(code.descriptor()));
    m.insert("N".into(), json!(code.modes()));
    m.insert("M".into(), json!(rows!(code.generator())));
    m.insert("A".into(), json!(rows!(code.gram())));
    m.insert("D".into(), json!(form.d));
    m.insert("code_dimension".into(), json!(code.code_dimension()));
    m.insert("self_dual".into(), json!(code.is_self_dual()));
    m.insert("shift_protected".into(), json!(code.shift_protected()));
    m.insert("dual".into(), json!(rows!(code.dual())));
    m.insert("shortest_stabilizer".into(), json!(shortest(Sublattice::Stabilizer)?));
    m.insert("shortest_dual".into(), json!(shortest(Sublattice::Dual)?));
    emit_json(a.out.as_deref(), &Value::Object(m))
}

use crate::spec::{
    closed_form, kernel_moments, parse_points, read_series, series_from, KernelSpec, ProblemSpec,
    SequenceSpec,
};
use crate::{Global, Normalization, Status, SumArgs};
use anyhow::{bail, Context, Result};
use resum_core::envelope::log_space;
use resum_core::kernels::{moment_sequence, validate_kernel, ValidationGrids};
use resum_core::mpde::{
    assumption_a_classify, growth_classify, Classification, Factor, MPDEProblem, Symbol,
};
use resum_core::sequences::{check_axiom, Axiom, TailVerdict};
use resum_core::summation::m_sum;
use resum_core::{ContinuationMethod, Error, FormalSeries, GrowthMaps};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Writes named outputs into `--out`, or to stdout under `# name` headers.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(g: &Global) -> Result<Self> {
        if let Some(d) = &g.out {
            std::fs::create_dir_all(d).with_context(|| format!("cannot create {}", d.display()))?;
        }
        Ok(Output { dir: g.out.clone() })
    }

    pub fn write(&self, name: &str, content: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, content)
                    .with_context(|| format!("cannot write {}", path.display()))
            }
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                match write!(stdout, "# {name}\n{content}").and_then(|_| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }
}

fn tail_text(t: &TailVerdict) -> String {
    match t {
        TailVerdict::Stable { limit, width } => {
            format!("stable, limit {limit:.6}, width {width:.3e}")
        }
        TailVerdict::Unstable { width } => format!("unstable, width {width:.3e}"),
        TailVerdict::NonFinite => "non-finite".into(),
    }
}

pub fn run_seq(g: &Global, path: &Path) -> Result<Status> {
    let spec = SequenceSpec::load(path)?;
    let depth = g.depth.map(|d| d as usize).or(spec.depth).unwrap_or(400);
    let table = spec.table(depth)?;
    let out = Output::new(g)?;

    let mut report = format!("family: {}\ndepth: {depth}\n", spec.family);
    let mut all_hold = true;
    for axiom in [
        Axiom::LogConvex,
        Axiom::ModerateGrowth,
        Axiom::StrongNonQuasianalytic,
    ] {
        let r = check_axiom(&table, axiom)?;
        all_hold &= r.holds_to_depth;
        writeln!(report, "\n[axiom {axiom}]")?;
        writeln!(report, "holds_to_depth = {}", r.holds_to_depth)?;
        writeln!(
            report,
            "witness = {}",
            r.witness.map_or("none".into(), |w| format!("{w:.6e}"))
        )?;
        writeln!(
            report,
            "first_violation = {}",
            r.first_violation.map_or("none".into(), |p| p.to_string())
        )?;
    }
    let maps = GrowthMaps::new(table.clone());
    writeln!(report, "\n[order]")?;
    match maps.order_and_omega() {
        Ok(o) => writeln!(
            report,
            "rho = {:.6}\nomega = {:.6}\ntail_width = {:.3e}",
            o.rho, o.omega, o.tail_width
        )?,
        Err(e) => writeln!(report, "unavailable: {e}")?,
    }
    let diag = maps.proximate_order_diagnostic(0.05);
    writeln!(report, "\n[proximate-order]")?;
    writeln!(report, "criterion3 = {}", tail_text(&diag.criterion3_tail))?;
    writeln!(report, "criterion410 = {}", tail_text(&diag.cor410_tail))?;
    writeln!(
        report,
        "consistent_limit = {}",
        diag.consistent_limit
            .map_or("none".into(), |l| format!("{l:.6}"))
    )?;
    writeln!(report, "note = {}", diag.note)?;
    out.write("report.txt", &report)?;

    let mut csv = String::from("p,logM_p,m_p\n");
    for p in 0..depth {
        writeln!(
            csv,
            "{p},{:.15e},{:.15e}",
            table.log_value(p),
            table.quotient(p)
        )?;
    }
    out.write("table.csv", &csv)?;

    let mut csv = String::from("p,criterion3,criterion410\n");
    for (i, (p, c3)) in diag.criterion3.iter().enumerate() {
        let c4 = diag
            .cor410
            .get(i)
            .map_or(String::new(), |(_, v)| format!("{v:.10e}"));
        writeln!(csv, "{p},{c3:.10e},{c4}")?;
    }
    out.write("diagnostics.csv", &csv)?;

    let edge = table.quotient(depth - 2);
    let mut csv = String::from("t,h,big_m\n");
    for t in log_space(1.0 / edge, edge, 60) {
        writeln!(csv, "{t:.10e},{:.10e},{:.10e}", maps.h(t)?, maps.big_m(t)?)?;
    }
    out.write("growth_maps.csv", &csv)?;
    Ok(if all_hold {
        Status::Success
    } else {
        Status::VerdictFailed
    })
}

pub fn run_kernel(g: &Global, spec: &str, sequence: Option<&Path>) -> Result<Status> {
    let kernel = KernelSpec::resolve(spec)?.build()?;
    let depth = g.depth.map_or(40, |d| d as usize);
    let out = Output::new(g)?;
    let moments = moment_sequence(&kernel, depth, g.tol)?;
    out.write("moments.csv", &moments.to_csv())?;
    let table = match sequence {
        Some(p) => {
            let s = SequenceSpec::load(p)?;
            s.table(s.depth.unwrap_or(400))?
        }
        None => match kernel.law() {
            Some(_) => moment_sequence(&kernel, 400, g.tol)?.to_table()?,
            None => moments.to_table()?,
        },
    };
    let report = validate_kernel(&kernel, &table, &ValidationGrids::default());
    out.write("validation.txt", &report.to_text())?;
    Ok(if report.passed() {
        Status::Success
    } else {
        Status::VerdictFailed
    })
}

fn parse_method(method: Option<&str>, series: &FormalSeries) -> Result<ContinuationMethod> {
    let Some(m) = method else {
        return Ok(ContinuationMethod::near_diagonal(series));
    };
    if let Some(name) = m.strip_prefix("closed:") {
        let f = closed_form(name)?;
        return Ok(ContinuationMethod::ClosedForm {
            name: name.to_string(),
            g: f,
        });
    }
    if let Some(degrees) = m.strip_prefix("pade:") {
        let (a, b) = degrees
            .split_once(',')
            .with_context(|| format!("expected pade:M,N, got '{m}'"))?;
        return Ok(ContinuationMethod::RationalApproximant {
            m: a.trim()
                .parse()
                .with_context(|| format!("bad degree in '{m}'"))?,
            n: b.trim()
                .parse()
                .with_context(|| format!("bad degree in '{m}'"))?,
        });
    }
    bail!("unknown method '{m}' (pade:M,N or closed:NAME)")
}

pub fn run_sum(g: &Global, args: &SumArgs) -> Result<Status> {
    let coeffs = read_series(&args.series)?;
    let origin = args.series.display().to_string();
    let series = series_from(
        &coeffs,
        args.normalization == Normalization::Factorial,
        &origin,
    )?;
    let kernel = KernelSpec::resolve(&args.kernel)?.build()?;
    let method = parse_method(args.method.as_deref(), &series)?;
    let points = parse_points(&args.points)?;
    if points.is_empty() {
        bail!("no evaluation points");
    }
    let out = Output::new(g)?;
    let (values, report) = match m_sum(&series, &kernel, args.direction, &method, &points, g.tol) {
        Ok(r) => r,
        Err(Error::Stage { stage, detail }) => {
            out.write(
                "report.txt",
                &format!(
                    "kernel: {}\ndirection: {}\nverdict: not-certified\nstage: {stage}\nreason: {detail}\n",
                    kernel.tag(),
                    args.direction
                ),
            )?;
            return Ok(Status::VerdictFailed);
        }
        Err(e) => return Err(e.into()),
    };
    let mut csv = String::from("z_re,z_im,sum_re,sum_im,err_est\n");
    for v in &values {
        writeln!(
            csv,
            "{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}",
            v.z.re, v.z.im, v.value.re, v.value.im, v.error
        )?;
    }
    out.write("sum.csv", &csv)?;
    out.write(
        "report.txt",
        &format!("kernel: {}\n{}", kernel.tag(), report.to_text()),
    )?;
    Ok(if report.certified() {
        Status::Success
    } else {
        Status::VerdictFailed
    })
}

pub fn run_mpde(g: &Global, path: &Path, direction: Option<f64>) -> Result<Status> {
    let (spec, base) = ProblemSpec::load(path)?;
    let (j, n) = (spec.truncation.j, spec.truncation.n);
    let symbols = spec
        .factors
        .iter()
        .map(|f| {
            Ok(Factor {
                symbol: Symbol::real_polynomial(&f.coefficients)?,
                multiplicity: f.multiplicity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_degree = symbols
        .iter()
        .map(|f| f.symbol.coefficients().len() - 1)
        .max()
        .unwrap_or(0);
    let q_max = symbols.iter().map(|f| f.symbol.q()).fold(1.0, f64::max);
    // m₂ is read up to N + J·deg and at q·J; the summability fits want 140.
    let depth = [
        n + j * max_degree,
        (q_max * j as f64).ceil() as usize + 2,
        140,
        g.depth.unwrap_or(0) as usize,
    ]
    .into_iter()
    .max()
    .unwrap_or(140);
    let m1 = kernel_moments(&spec.m1, depth, g.tol)?;
    let m2 = kernel_moments(&spec.m2, depth, g.tol)?;
    let candidate = kernel_moments(spec.candidate.as_ref().unwrap_or(&spec.m2), depth, g.tol)?;
    let data = spec
        .data
        .iter()
        .map(|p| {
            let full = base.join(p);
            series_from(&read_series(&full)?, false, &p.display().to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = MPDEProblem::new(symbols, m1.clone(), m2.clone(), data, j, n, spec.r0)?;
    let solution = problem.formal_solution()?;
    let q = problem.factors[0].symbol.q();
    let report = growth_classify(&solution, &m1, &m2, q, Some(&candidate))?;
    let out = Output::new(g)?;
    out.write("classification.txt", &report.to_text())?;
    out.write("evidence.csv", &report.to_csv())?;
    let mut ok = report.verdict != Classification::Unclassified;
    if let Some(d) = direction {
        let a = assumption_a_classify(&problem, &candidate, d)?;
        ok &= a.rows.iter().all(|r| r.solution_certified && r.agree);
        out.write("summability.txt", &a.to_text())?;
    }
    Ok(if ok {
        Status::Success
    } else {
        Status::VerdictFailed
    })
}

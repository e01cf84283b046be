//! Input formats: TOML spec files for sequences, kernels and problems, and
//! CSV series files.

use anyhow::{anyhow, bail, Context, Result};
use resum_core::kernels::{
    classical_kernel, gevrey_kernel, maergoiz_kernel, moment_sequence, rescale_kernel, SurfaceFn,
};
use resum_core::sequences::generate;
use resum_core::{
    Complex64, FormalSeries, Kernel, MomentSequence, SequenceFamily, SequenceTable, SurfacePoint,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    toml::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn expect_params(tag: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        bail!("{tag} takes {n} parameter(s), got {}", params.len());
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub values: Vec<f64>,
    pub depth: Option<usize>,
}

impl SequenceSpec {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }

    pub fn family(&self) -> Result<SequenceFamily> {
        let p = &self.params;
        Ok(match self.family.as_str() {
            "gevrey" => {
                expect_params("gevrey", p, 1)?;
                SequenceFamily::gevrey(p[0])
            }
            "gevrey-log" => {
                expect_params("gevrey-log", p, 2)?;
                SequenceFamily::GevreyLog { alpha: p[0], beta: p[1] }
            }
            "qpower" => {
                expect_params("qpower", p, 1)?;
                SequenceFamily::QPower { q: p[0] }
            }
            "gevrey-product" => {
                expect_params("gevrey-product", p, 2)?;
                SequenceFamily::product(SequenceFamily::gevrey(p[0]), SequenceFamily::gevrey(p[1]))
            }
            "explicit" => SequenceFamily::Explicit(self.values.clone()),
            other => bail!("unknown sequence family '{other}' (gevrey, gevrey-log, qpower, gevrey-product, explicit)"),
        })
    }

    pub fn table(&self, depth: usize) -> Result<SequenceTable> {
        Ok(generate(&self.family()?, depth)?)
    }
}

/// A kernel as `tag` plus numeric `params`; also written inline as
/// `tag:p1,p2`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub tag: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl KernelSpec {
    pub fn inline(text: &str) -> Result<Self> {
        let (tag, rest) = text.split_once(':').unwrap_or((text, ""));
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .with_context(|| format!("bad kernel parameter '{s}'"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelSpec {
            tag: tag.trim().to_string(),
            params,
        })
    }

    /// A path to a TOML file, or the inline form.
    pub fn resolve(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            parse_toml(path)
        } else {
            Self::inline(arg)
        }
    }

    pub fn build(&self) -> Result<Kernel> {
        let p = &self.params;
        Ok(match self.tag.as_str() {
            "gevrey" => {
                expect_params("gevrey", p, 1)?;
                gevrey_kernel(p[0])?
            }
            "classical" => {
                expect_params("classical", p, 1)?;
                classical_kernel(p[0])?
            }
            "rescaled-gevrey" => {
                expect_params("rescaled-gevrey", p, 2)?;
                rescale_kernel(&gevrey_kernel(p[0])?, p[1])?
            }
            "maergoiz-power" => {
                // V(z) = z^{1/ω}
                expect_params("maergoiz-power", p, 1)?;
                let k = 1.0 / p[0];
                let v: SurfaceFn = Arc::new(move |z: SurfacePoint| z.powf(k).to_complex());
                maergoiz_kernel(v, p[0])?
            }
            "maergoiz-log" => {
                // V(z) = z^k − c log z
                expect_params("maergoiz-log", p, 2)?;
                let (k, c) = (p[0], p[1]);
                let v: SurfaceFn = Arc::new(move |z: SurfacePoint| z.powf(k).to_complex() - c * z.ln());
                maergoiz_kernel(v, 1.0 / k)?
            }
            other => bail!(
                "unknown kernel tag '{other}' (gevrey, classical, rescaled-gevrey, maergoiz-power, maergoiz-log)"
            ),
        })
    }
}

/// Series file: CSV `p,re_a,im_a` with a header and consecutive `p` from 0.
pub fn read_series(path: &Path) -> Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (i, record) in reader.deserialize::<(usize, f64, f64)>().enumerate() {
        let line = i + 2;
        let (p, re, im) = record.with_context(|| format!("{} line {line}", path.display()))?;
        if p != out.len() {
            bail!(
                "{} line {line}: expected p = {}, got {p}",
                path.display(),
                out.len()
            );
        }
        out.push(Complex64::new(re, im));
    }
    if out.is_empty() {
        bail!("{}: no coefficients", path.display());
    }
    Ok(out)
}

/// Comma-separated complex numbers such as `0.1,0.05+0.02i`.
pub fn parse_points(list: &str) -> Result<Vec<Complex64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<Complex64>()
                .map_err(|_| anyhow!("bad point '{s}'"))
        })
        .collect()
}

/// Named Borel-plane functions for `--method closed:NAME`.
pub fn closed_form(name: &str) -> Result<SurfaceFn> {
    let f: SurfaceFn = match name {
        "recip-1p" => Arc::new(|u: SurfacePoint| 1.0 / (1.0 + u.to_complex())),
        "recip-1m" => Arc::new(|u: SurfacePoint| 1.0 / (1.0 - u.to_complex())),
        "exp" => Arc::new(|u: SurfacePoint| u.to_complex().exp()),
        "zero" => Arc::new(|_| Complex64::new(0.0, 0.0)),
        other => bail!("unknown closed form '{other}' (recip-1p, recip-1m, exp, zero)"),
    };
    Ok(f)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    /// Coefficients of `λ(ξ)` in increasing powers of `ξ`.
    pub coefficients: Vec<f64>,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub j: usize,
    pub n: usize,
}

fn default_r0() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub factors: Vec<FactorSpec>,
    pub m1: KernelSpec,
    pub m2: KernelSpec,
    /// Candidate sequence for the growth inequalities; defaults to `m2`.
    pub candidate: Option<KernelSpec>,
    /// Series files for `φ_{αβ}` in factor order, relative to the problem file.
    pub data: Vec<PathBuf>,
    pub truncation: Truncation,
    #[serde(default = "default_r0")]
    pub r0: f64,
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let spec: ProblemSpec = parse_toml(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((spec, base))
    }
}

/// Moments of a kernel to depth `n`.
pub fn kernel_moments(spec: &KernelSpec, n: usize, tol: f64) -> Result<MomentSequence> {
    let kernel = spec.build()?;
    moment_sequence(&kernel, n, tol).with_context(|| format!("moments of {}", kernel.tag()))
}

/// Series from file contents under the chosen normalization.
pub fn series_from(coeffs: &[Complex64], factorial: bool, origin: &str) -> Result<FormalSeries> {
    Ok(if factorial {
        FormalSeries::from_factorial(coeffs, origin)?
    } else {
        FormalSeries::new(coeffs.to_vec(), origin)?
    })
}

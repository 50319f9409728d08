//! The `bggw` command line. [`run`] returns the exit status and the report
//! so it can be driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bgg::{build_bgg, default_truncation, homology_profile, regularity_of_dual_via_bgg, verify_theorem_a};
use crate::emodule::regularity::default_imax;
use crate::emodule::{betti_table, dual_module, regularity_definition_route, GradedEModule};
use crate::error::{Error, Result};
use crate::filtered::{
    check_degeneration_criterion, e1_check, induce_emodule, page_table, predict_vanishing, sum_complexes,
    validate_complex, FilteredFreeComplex, SpectralSequence,
};
use crate::format::{self, WorkbenchFile};
use crate::linalg::Field;
use crate::models::{generate, ModelSpec};

#[derive(Parser, Debug)]
#[command(name = "bggw", version, about = "Exterior-algebra modules, BGG complexes and m-adic spectral sequences")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Coefficient field: `Q` or `fp:<p>`. Rational input is reduced mod p.
    #[arg(long, global = true)]
    field: Option<Field>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Def,
    Bgg,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Point,
    Abelian,
    Curve,
    #[value(name = "curve_times_p1", alias = "curve-times-p1")]
    CurveTimesP1,
    #[value(name = "synthetic_kollar", alias = "synthetic-kollar")]
    SyntheticKollar,
    Custom,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a workbench file of any schema.
    Validate { file: PathBuf },
    /// Build the linear complex L(P) of an E-module.
    Bgg {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the homology of L(P) through this internal degree.
        #[arg(long)]
        truncation: Option<i64>,
    },
    /// Graded Betti numbers of an E-module.
    Betti {
        file: PathBuf,
        #[arg(long)]
        imax: usize,
    },
    /// Regularity of a module living in nonpositive degrees.
    Regularity {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
        #[arg(long)]
        truncation: Option<i64>,
        #[arg(long)]
        imax: Option<usize>,
    },
    /// Write the module P of a model (or its dual with --dual).
    Model {
        #[arg(value_enum)]
        kind: ModelKind,
        #[arg(long, conflicts_with = "genus")]
        dim: Option<usize>,
        #[arg(long)]
        genus: Option<usize>,
        /// Summand files for synthetic_kollar, the module file for custom.
        files: Vec<PathBuf>,
        #[arg(long)]
        dual: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the splitting of Q = ⊕ Q^j(j); `0` stands for a zero summand.
    VerifyTheoremA {
        #[arg(required = true)]
        summands: Vec<String>,
        #[arg(long)]
        truncation: Option<i64>,
        #[arg(long)]
        imax: Option<usize>,
    },
    /// Spectral sequences of complexes over k[[t]].
    #[command(subcommand)]
    Ss(SsCommand),
}

#[derive(Args, Debug)]
struct ComplexArg {
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum SsCommand {
    Validate(ComplexArg),
    Pages {
        file: PathBuf,
        #[arg(long)]
        max_page: usize,
        #[arg(long)]
        pmax: usize,
        /// Re-truncate the complex to this precision.
        #[arg(long)]
        precision: Option<usize>,
    },
    Criterion {
        file: PathBuf,
        #[arg(short)]
        r: usize,
    },
    Degeneration {
        file: PathBuf,
        #[arg(short)]
        r: usize,
    },
    Induce {
        file: PathBuf,
        #[arg(long)]
        top_degree: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    E1Check(ComplexArg),
    PredictVanishing {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        truncation: usize,
    },
    Sum {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Ctx {
    format: OutputFormat,
    field: Option<Field>,
    out: String,
}

impl Ctx {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn module(&self, path: &Path) -> Result<GradedEModule> {
        format::load_emodule(path, self.field)
    }

    fn complex(&self, path: &Path) -> Result<FilteredFreeComplex> {
        format::load_rcomplex(path, self.field)
    }

    /// Writes `text` to `out`, or appends it to the report.
    fn emit(&mut self, text: &str, out: Option<&Path>, what: &str) -> Result<()> {
        match out {
            Some(p) => {
                std::fs::write(p, text)?;
                self.line(format!("wrote {what} to {}", p.display()));
            }
            None => self.out.push_str(text),
        }
        Ok(())
    }
}

/// Exit status 0 on success, 1 when a mathematical claim is refuted or an
/// input violates its invariants, 2 on usage errors.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        field: cli.field,
        out: String::new(),
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(refuted) => (i32::from(refuted), ctx.out),
        Err(e) => {
            let code = match e {
                Error::InvalidModule(_) | Error::InvalidComplex(_) => 1,
                _ => 2,
            };
            ctx.line(format!("error: {e}"));
            (code, ctx.out)
        }
    }
}

/// Returns whether the command refuted something.
fn dispatch(ctx: &mut Ctx, cmd: Command) -> Result<bool> {
    match cmd {
        Command::Validate { file } => validate(ctx, &file),
        Command::Bgg { file, out, truncation } => {
            let p = ctx.module(&file)?;
            let l = build_bgg(&p)?;
            ctx.emit(&format::scomplex_to_string(&l), out.as_deref(), "L(P)")?;
            if let Some(t) = truncation {
                let h = homology_profile(&l, t);
                match ctx.format {
                    OutputFormat::Text => ctx.line(h.to_string()),
                    OutputFormat::Csv => ctx.out.push_str(&h.csv()),
                }
            }
            Ok(false)
        }
        Command::Betti { file, imax } => {
            let m = ctx.module(&file)?;
            let table = betti_table(&m, imax);
            match ctx.format {
                OutputFormat::Text => ctx.line(table.to_string()),
                OutputFormat::Csv => ctx.out.push_str(&table.csv()),
            }
            Ok(false)
        }
        Command::Regularity {
            file,
            route,
            truncation,
            imax,
        } => regularity(ctx, &file, route, truncation, imax),
        Command::Model {
            kind,
            dim,
            genus,
            files,
            dual,
            out,
        } => {
            let spec = model_spec(ctx, kind, dim, genus, &files)?;
            let m = generate(&spec, ctx.field.unwrap_or(Field::Rationals))?;
            let module = if dual { m.q } else { m.p };
            ctx.emit(&format::emodule_to_string(&module), out.as_deref(), &spec.to_string())?;
            Ok(false)
        }
        Command::VerifyTheoremA {
            summands,
            truncation,
            imax,
        } => {
            let summands = load_summands(ctx, &summands)?;
            let report = verify_theorem_a(&summands, truncation, imax)?;
            ctx.line(report.summary());
            for f in &report.failures {
                ctx.line(format!("  {f}"));
            }
            Ok(!report.passed)
        }
        Command::Ss(cmd) => spectral(ctx, cmd),
    }
}

fn validate(ctx: &mut Ctx, path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    let f = format::parse_unchecked(&text, ctx.field)?;
    let mut problems = Vec::new();
    let summary = match &f {
        WorkbenchFile::EModule(m) => {
            problems.extend(crate::emodule::validate_module(&m.context(), m)?.iter().map(|v| v.to_string()));
            format!(
                "emodule over {} with q = {}, dims {:?} in degrees {:?}",
                m.field(),
                m.q(),
                m.support().iter().map(|&j| m.dim(j)).collect::<Vec<_>>(),
                m.support()
            )
        }
        WorkbenchFile::SComplex(l) => {
            problems.extend(
                l.d_squared_violations()
                    .iter()
                    .map(|(n, a, b)| format!("x{} x{} terms of d^2 nonzero from spot {n}", a + 1, b + 1)),
            );
            format!("scomplex with ranks {:?}", l.ranks())
        }
        WorkbenchFile::RComplex(k) => {
            problems.extend(validate_complex(k).iter().map(|v| v.to_string()));
            format!(
                "rcomplex in {} variables, precision {}, spots {}..{}, ranks {:?}",
                k.e(),
                k.precision(),
                k.n_lo(),
                k.n_hi(),
                k.ranks()
            )
        }
    };
    ctx.line(summary);
    if problems.is_empty() {
        ctx.line("valid");
        Ok(false)
    } else {
        ctx.line(format!("invalid: {} violation(s)", problems.len()));
        for p in problems {
            ctx.line(format!("  {p}"));
        }
        Ok(true)
    }
}

fn regularity(ctx: &mut Ctx, path: &Path, route: RouteArg, truncation: Option<i64>, imax: Option<usize>) -> Result<bool> {
    let q = ctx.module(path)?;
    let t = truncation.unwrap_or_else(|| default_truncation(&dual_module(&q)));
    let imax = imax.unwrap_or_else(|| default_imax(&q).max(t.max(0) as usize));
    let show = |m: Option<i64>| m.map_or("none (zero module)".to_string(), |m| m.to_string());
    match route {
        RouteArg::Def => {
            let r = regularity_definition_route(&q, imax)?;
            ctx.line(format!("m = {} (route def; imax={imax})", show(r.regularity)));
            Ok(false)
        }
        RouteArg::Bgg => {
            let r = regularity_of_dual_via_bgg(&q, t)?;
            ctx.line(format!("m = {} (route bgg; T={t})", show(r.regularity)));
            Ok(false)
        }
        RouteArg::Both => {
            let def = regularity_definition_route(&q, imax)?;
            let bgg = regularity_of_dual_via_bgg(&q, t)?;
            if def.regularity == bgg.regularity {
                ctx.line(format!("m = {} (both routes agree; T={t}, imax={imax})", show(def.regularity)));
                Ok(false)
            } else {
                ctx.line(format!(
                    "routes disagree: def gives m = {}, bgg gives m = {} (T={t}, imax={imax})",
                    show(def.regularity),
                    show(bgg.regularity)
                ));
                for e in def.evidence.iter().chain(&bgg.evidence) {
                    ctx.line(format!("  {e}"));
                }
                Ok(true)
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn model_spec(ctx: &Ctx, kind: ModelKind, dim: Option<usize>, genus: Option<usize>, files: &[PathBuf]) -> Result<ModelSpec> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("this model needs --{flag}")));
    Ok(match kind {
        ModelKind::Point => ModelSpec::Point,
        ModelKind::Abelian => ModelSpec::Abelian(need(dim, "dim")?),
        ModelKind::Curve => ModelSpec::Curve(need(genus, "genus")?),
        ModelKind::CurveTimesP1 => ModelSpec::CurveTimesP1(need(genus, "genus")?),
        ModelKind::SyntheticKollar => {
            let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            ModelSpec::SyntheticKollar(load_summands(ctx, &names)?)
        }
        ModelKind::Custom => match files {
            [f] => ModelSpec::Custom(ctx.module(f)?),
            _ => return Err(usage("custom takes exactly one module file")),
        },
    })
}

/// Loads summand files; `0` is the zero module over the common context.
fn load_summands(ctx: &Ctx, names: &[String]) -> Result<Vec<GradedEModule>> {
    let loaded: Vec<Option<GradedEModule>> = names
        .iter()
        .map(|n| if n == "0" { Ok(None) } else { ctx.module(Path::new(n)).map(Some) })
        .collect::<Result<_>>()?;
    let Some(context) = loaded.iter().flatten().map(GradedEModule::context).next() else {
        return Err(usage("at least one summand must be a module file"));
    };
    for m in loaded.iter().flatten() {
        if m.context() != context {
            return Err(Error::ContextMismatch(format!(
                "summands over different exterior algebras (q = {} and q = {})",
                context.q,
                m.q()
            )));
        }
    }
    Ok(loaded
        .into_iter()
        .map(|m| m.unwrap_or_else(|| GradedEModule::zero(context)))
        .collect())
}

fn with_precision(k: FilteredFreeComplex, precision: Option<usize>) -> Result<FilteredFreeComplex> {
    match precision {
        None => Ok(k),
        Some(n) => FilteredFreeComplex::new(k.field(), k.e(), n, k.n_lo(), k.ranks().to_vec(), k.differentials().to_vec()),
    }
}

fn spectral(ctx: &mut Ctx, cmd: SsCommand) -> Result<bool> {
    match cmd {
        SsCommand::Validate(a) => validate(ctx, &a.file),
        SsCommand::Pages {
            file,
            max_page,
            pmax,
            precision,
        } => {
            let k = with_precision(ctx.complex(&file)?, precision)?;
            let ss = SpectralSequence::compute(&k)?;
            for r in 1..=max_page {
                let page = page_table(&ss, r, pmax)?;
                match ctx.format {
                    OutputFormat::Text => ctx.line(page.to_string()),
                    OutputFormat::Csv if r == 1 => ctx.out.push_str(&page.csv()),
                    OutputFormat::Csv => ctx.out.extend(page.csv().lines().skip(1).map(|l| format!("{l}\n"))),
                }
            }
            Ok(false)
        }
        SsCommand::Criterion { file, r } => {
            let k = ctx.complex(&file)?;
            let verdict = check_degeneration_criterion(&k, r)?;
            ctx.line(verdict.to_string());
            Ok(!verdict.holds)
        }
        SsCommand::Degeneration { file, r } => {
            let k = ctx.complex(&file)?;
            let ss = SpectralSequence::compute(&k)?;
            let holds = ss.degenerates_at(r);
            if holds {
                ctx.line(format!("degenerates at E_{r}: d_i = 0 for all i >= {r}"));
            } else {
                let first = first_nonzero_differential(&ss, r);
                let mut s = format!("does not degenerate at E_{r}");
                if let Some((i, n, p)) = first {
                    let _ = write!(s, ": d_{i} is nonzero on E_{i}^(p={p}, n={n})");
                }
                ctx.line(s);
            }
            Ok(!holds)
        }
        SsCommand::Induce { file, top_degree, out } => {
            let k = ctx.complex(&file)?;
            let p = induce_emodule(&k, top_degree)?;
            ctx.emit(&format::emodule_to_string(&p), out.as_deref(), "P")?;
            Ok(false)
        }
        SsCommand::E1Check(a) => {
            let k = ctx.complex(&a.file)?;
            let check = e1_check(&k)?;
            ctx.line(check.to_string());
            Ok(!check.passed)
        }
        SsCommand::PredictVanishing { file, truncation } => {
            let k = ctx.complex(&file)?;
            let pred = predict_vanishing(&k, truncation)?;
            ctx.line(pred.to_string());
            Ok(!pred.contradicted.is_empty())
        }
        SsCommand::Sum { files, out } => {
            let parts: Vec<FilteredFreeComplex> = files.iter().map(|f| ctx.complex(f)).collect::<Result<_>>()?;
            let sum = sum_complexes(&parts)?;
            ctx.emit(&format::rcomplex_to_string(&sum), out.as_deref(), "sum")?;
            Ok(false)
        }
    }
}

fn first_nonzero_differential(ss: &SpectralSequence, r: usize) -> Option<(usize, i64, usize)> {
    let k = ss.complex();
    (r..=ss.last_page()).find_map(|i| {
        k.spots().find_map(|n| {
            (0..=k.precision())
                .find(|&p| !ss.differential(i, n, p).is_zero())
                .map(|p| (i, n, p))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, out) = run(["bggw", "betti", "x.json", "--bogus"]);
        assert_eq!(code, 2, "{out}");
    }

    #[test]
    fn missing_file_is_usage_error() {
        let (code, out) = run(["bggw", "ss", "e1-check", "/nonexistent/k.json"]);
        assert_eq!(code, 2);
        assert!(out.starts_with("error:"), "{out}");
    }
}

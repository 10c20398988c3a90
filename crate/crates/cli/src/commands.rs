//! Subcommand implementations. Each builds a [`Report`].

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use upsilon::{
    collapse_direction, compute_factor_sr, compute_sr, coverage_sim, credible_interval,
    factor_k_sample_test, factor_sr_confidence_interval, marginal_snr_params,
    posterior_prediction_interval, sample_upsilon, sr_confidence_interval, sr_prediction_interval,
    stream_rng, update_nig, update_regression, upsilon_cumulants, ApproxOrder, FactorSr, Factors,
    Hypothesis, InferenceResult, Matrix, Nig, Regression, Returns, SampleStats, SimulationPlan, Sr,
    Upsilon, UpsilonApprox,
};
use upsilon::frequentist::{factor_ci_params, sr_ci_params, Critical};
use upsilon::{k_sample_test, one_sample_test};

use crate::input::{CsvOptions, ReturnsTable};
use crate::report::{Bounds, Decision, Params, Report};
use crate::{
    BayesCommand, BayesData, CiArgs, Cli, CliError, Command, CsvArgs, DistCommand, HypArgs,
    LawArgs, OrderArgs, PredintArgs, PriorArgs, SimulateArgs, TestCommand,
};

type Res<T> = Result<T, CliError>;

const SEED_VAR: &str = "UPSILON_SEED";

pub fn run(cli: &Cli) -> Res<String> {
    let report = match &cli.command {
        Command::Dist { func } => dist(func)?,
        Command::Test { kind } => test(kind)?,
        Command::Ci(args) => ci(args)?,
        Command::Predint(args) => predint(args)?,
        Command::Bayes { op } => bayes(op)?,
        Command::Simulate(args) => simulate(args)?,
        Command::Render { file } => {
            let text = match file {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
                None => {
                    let mut s = String::new();
                    std::io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|e| CliError::Input(e.to_string()))?;
                    s
                }
            };
            let report: Report = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("not a report: {e}")))?;
            return Ok(report.render());
        }
    };
    Ok(if cli.json {
        let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.render()
    })
}

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(CliError::Usage(msg.into()))
}

impl OrderArgs {
    fn resolve(&self) -> Res<ApproxOrder> {
        let base = match self.terms {
            Some(t) => ApproxOrder::uniform(t).map_err(|e| CliError::Usage(e.to_string()))?,
            None => ApproxOrder::default(),
        };
        ApproxOrder::new(
            self.edgeworth_terms.unwrap_or(base.edgeworth_terms),
            self.cf_terms.unwrap_or(base.cf_terms),
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }
}

impl LawArgs {
    fn resolve(&self) -> Res<Upsilon> {
        let (coef, df) = (&self.coef.0, &self.df.0);
        if coef.len() != df.len() {
            return usage(format!(
                "--coef has {} entries but --df has {}",
                coef.len(),
                df.len()
            ));
        }
        Upsilon::new(coef.clone(), df.clone()).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn dist(func: &DistCommand) -> Res<Report> {
    let mut r;
    match func {
        DistCommand::Cdf { law, order, x } | DistCommand::Pdf { law, order, x } => {
            let is_cdf = matches!(func, DistCommand::Cdf { .. });
            let params = law.resolve()?;
            let order = order.resolve()?;
            let approx = UpsilonApprox::new(&params, order)?;
            r = Report::new(if is_cdf { "dist cdf" } else { "dist pdf" });
            r.input("x", &x.0);
            r.params = Some(Params::from(&params));
            r.terms = Some(order.into());
            r.values = Some(
                x.0.iter()
                    .map(|&v| if is_cdf { approx.cdf(v) } else { approx.pdf(v) })
                    .collect(),
            );
        }
        DistCommand::Quantile { law, order, p, refine } => {
            let params = law.resolve()?;
            let order = order.resolve()?;
            let approx = UpsilonApprox::new(&params, order)?;
            let values = p
                .0
                .iter()
                .map(|&prob| if *refine { approx.quantile(prob) } else { approx.cf_quantile(prob) })
                .collect::<upsilon::Result<Vec<_>>>()?;
            r = Report::new("dist quantile");
            r.input("p", &p.0)
                .input("via", if *refine { "refined" } else { "cornish-fisher" });
            r.params = Some(Params::from(&params));
            r.terms = Some(order.into());
            r.values = Some(values);
        }
        DistCommand::Cumulants { law, order } => {
            let params = law.resolve()?;
            let k = upsilon_cumulants(&params, *order)?;
            r = Report::new("dist cumulants");
            r.input("orders", format!("1..={order}"));
            r.params = Some(Params::from(&params));
            r.values = Some((1..=*order).map(|j| k.order(j)).collect());
        }
        DistCommand::Sample { law, n, seed } => {
            let params = law.resolve()?;
            let seed = seed.unwrap_or(0);
            let draws = sample_upsilon(&params, &mut stream_rng(seed, 0), *n)?;
            r = Report::new("dist sample");
            r.input("n", n);
            r.params = Some(Params::from(&params));
            r.seed = Some(seed);
            r.values = Some(draws);
        }
    }
    Ok(r)
}

/// Loaded returns file together with the options used to read it.
struct Data {
    table: ReturnsTable,
    rfr: f64,
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            header: match (self.header, self.no_header) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
            date_column: if self.no_date { Some(None) } else { self.date_column.map(Some) },
            percent: self.percent,
        }
    }

    /// Reads the file when `--csv` is present, rejecting a mix with summary
    /// flags. Returns `None` in summary mode.
    fn load(&self, summary_given: bool, required: bool) -> Res<Option<Data>> {
        match (&self.csv, summary_given) {
            (Some(_), true) => usage("give either --csv or summary flags, not both"),
            (None, false) if required => usage("give --csv or the summary flags"),
            (None, _) => {
                if !self.columns.is_empty() || !self.factors.is_empty() || self.percent {
                    return usage("--columns, --factors and --percent need --csv");
                }
                Ok(None)
            }
            (Some(path), false) => Ok(Some(Data {
                table: ReturnsTable::read(path, &self.options())?,
                rfr: self.rfr,
            })),
        }
    }
}

impl Data {
    fn describe(&self, r: &mut Report, csv: &CsvArgs) {
        if let Some(path) = &csv.csv {
            r.input("file", path.display().to_string());
        }
        r.input("rows", self.table.rows());
        if let Some(d) = &self.table.dates {
            r.input("period", format!("{} to {}", d[0], d[d.len() - 1]));
        }
        if self.rfr != 0.0 {
            r.input("rfr", self.rfr);
        }
        if csv.percent {
            r.input("percent", true);
        }
    }

    /// Return columns: the ones named, or every non-factor column.
    fn return_columns(&self, csv: &CsvArgs) -> Res<Vec<usize>> {
        let factors = self.table.select(&csv.factors)?;
        if !csv.columns.is_empty() {
            return self.table.select(&csv.columns);
        }
        Ok((0..self.table.columns.len()).filter(|i| !factors.contains(i)).collect())
    }

    fn single_column(&self, csv: &CsvArgs) -> Res<usize> {
        match self.return_columns(csv)?.as_slice() {
            [one] => Ok(*one),
            cols => usage(format!(
                "expected one return column, found {} ({}); choose with --columns",
                cols.len(),
                cols.iter().map(|&i| self.table.names[i].as_str()).collect::<Vec<_>>().join(", ")
            )),
        }
    }

    fn returns(&self, col: usize) -> Res<Returns> {
        Ok(Returns::new(self.table.column(col), self.rfr)?)
    }

    fn factor_sample(&self, col: usize, csv: &CsvArgs, direction: Option<&[f64]>) -> Res<Factors> {
        let factor_cols: Vec<Vec<f64>> = self
            .table
            .select(&csv.factors)?
            .into_iter()
            .map(|j| self.table.column(j))
            .collect();
        let sample = Factors::with_intercept(&factor_cols, self.table.column(col), self.rfr)?;
        match direction {
            Some(v) => Ok(sample.with_direction(v.to_vec())?),
            None => Ok(sample),
        }
    }
}

fn test_report(res: &InferenceResult<f64>, name: &str) -> Report {
    let mut r = Report::new(name);
    r.statistic = Some(res.statistic);
    r.p_value = Some(res.p_value);
    r.params = Some(Params::from(&res.params));
    r.terms = Some(res.order.into());
    r.decision = Some(Decision {
        reject: res.reject,
        alpha: res.alpha,
        sided: res.sided.to_string(),
        critical: match res.critical {
            Critical::Threshold(q) => vec![q],
            Critical::Interval(i) => vec![i.lo, i.hi],
        },
        nct_p_value: res.nct.map(|d| d.p_value),
        nct_reject: res.nct.map(|d| d.reject),
    });
    r.notes = res.notes.clone();
    r
}

fn default_weights(k: usize, given: &Option<crate::List>) -> Res<Vec<f64>> {
    match (given, k) {
        (Some(w), _) => Ok(w.0.clone()),
        (None, 1) => Ok(vec![1.0]),
        (None, 2) => Ok(vec![1.0, -1.0]),
        (None, k) => usage(format!("{k} samples: give --weights")),
    }
}

fn hypothesis(k: usize, hyp: &HypArgs) -> Res<Hypothesis> {
    let w = default_weights(k, &hyp.weights)?;
    if w.len() != k {
        return usage(format!("{k} samples but {} weights", w.len()));
    }
    Ok(Hypothesis::new(w, hyp.target, hyp.alpha, hyp.sided)?)
}

fn lengths_match(name: &str, len: usize, k: usize) -> Res<()> {
    if len == k {
        Ok(())
    } else {
        usage(format!("--sr has {k} entries but {name} has {len}"))
    }
}

fn test(kind: &TestCommand) -> Res<Report> {
    match kind {
        TestCommand::One { csv, sr, n, target, alpha, sided, order } => {
            let order = order.resolve()?;
            let data = csv.load(sr.is_some() || n.is_some(), true)?;
            let s = match (&data, sr, n) {
                (Some(d), _, _) => compute_sr(&d.returns(d.single_column(csv)?)?)?,
                (None, Some(sr), Some(n)) => Sr::new(*sr, *n)?,
                _ => return usage("summary mode needs both --sr and --n"),
            };
            let res = one_sample_test(&s, *target, *alpha, *sided, order)?;
            let mut r = test_report(&res, "test one");
            if let Some(d) = &data {
                d.describe(&mut r, csv);
                r.input("column", &d.table.names[d.single_column(csv)?]);
            }
            r.input("sr", s.sr).input("n", s.n).input("target", target);
            Ok(r)
        }
        TestCommand::Ksample { csv, sr, n, hyp, order } => {
            let order = order.resolve()?;
            let data = csv.load(sr.is_some() || n.is_some(), true)?;
            let mut names = Vec::new();
            let samples: Vec<Sr> = match (&data, sr, n) {
                (Some(d), _, _) => {
                    if !csv.factors.is_empty() {
                        return usage("--factors applies to 'test factor'");
                    }
                    let cols = d.return_columns(csv)?;
                    names = cols.iter().map(|&i| d.table.names[i].clone()).collect();
                    cols.iter().map(|&i| compute_sr(&d.returns(i)?).map_err(CliError::from)).collect::<Res<_>>()?
                }
                (None, Some(sr), Some(n)) => {
                    lengths_match("--n", n.0.len(), sr.0.len())?;
                    sr.0.iter().zip(&n.0).map(|(&s, &m)| Sr::new(s, m).map_err(CliError::from)).collect::<Res<_>>()?
                }
                _ => return usage("summary mode needs both --sr and --n"),
            };
            let h = hypothesis(samples.len(), hyp)?;
            let res = k_sample_test(&samples, &h, order)?;
            let mut r = test_report(&res, "test ksample");
            if let Some(d) = &data {
                d.describe(&mut r, csv);
                r.input("columns", names);
            }
            r.input("sr", samples.iter().map(|s| s.sr).collect::<Vec<_>>())
                .input("n", samples.iter().map(|s| s.n).collect::<Vec<_>>())
                .input("weights", &h.weights)
                .input("target", h.target);
            Ok(r)
        }
        TestCommand::Factor { csv, sr, n, gram, p_count, direction, hyp, order } => {
            let order = order.resolve()?;
            let summary = sr.is_some() || n.is_some() || gram.is_some() || p_count.is_some();
            let data = csv.load(summary, true)?;
            let mut names = Vec::new();
            let samples: Vec<FactorSr> = match &data {
                Some(d) => {
                    let cols = d.return_columns(csv)?;
                    names = cols.iter().map(|&i| d.table.names[i].clone()).collect();
                    let dir = direction.as_ref().map(|v| v.0.as_slice());
                    cols.iter()
                        .map(|&i| Ok(compute_factor_sr(&d.factor_sample(i, csv, dir)?)?))
                        .collect::<Res<_>>()?
                }
                None => {
                    if direction.is_some() {
                        return usage("--direction needs --csv; in summary mode pass --gram");
                    }
                    let (Some(sr), Some(n), Some(gram), Some(p)) = (sr, n, gram, p_count) else {
                        return usage("summary mode needs --sr, --n, --gram and --p-count");
                    };
                    let k = sr.0.len();
                    lengths_match("--n", n.0.len(), k)?;
                    lengths_match("--gram", gram.0.len(), k)?;
                    let p: Vec<usize> = if p.0.len() == 1 { vec![p.0[0]; k] } else { p.0.clone() };
                    lengths_match("--p-count", p.len(), k)?;
                    (0..k)
                        .map(|i| Ok(FactorSr::new(sr.0[i], n.0[i], p[i], gram.0[i])?))
                        .collect::<Res<_>>()?
                }
            };
            let h = hypothesis(samples.len(), hyp)?;
            let res = factor_k_sample_test(&samples, &h, order)?;
            let mut r = test_report(&res, "test factor");
            if let Some(d) = &data {
                d.describe(&mut r, csv);
                r.input("columns", names).input("factors", &csv.factors);
                if let Some(v) = direction {
                    r.input("direction", &v.0);
                }
            }
            r.input("sr", samples.iter().map(|s| s.srg).collect::<Vec<_>>())
                .input("n", samples.iter().map(|s| s.n).collect::<Vec<_>>())
                .input("p", samples.iter().map(|s| s.p).collect::<Vec<_>>())
                .input("gram", samples.iter().map(|s| s.gram_scalar).collect::<Vec<_>>())
                .input("weights", &h.weights)
                .input("target", h.target);
            Ok(r)
        }
    }
}

fn ci(args: &CiArgs) -> Res<Report> {
    let order = args.order.resolve()?;
    let summary = args.sr.is_some() || args.n.is_some() || args.gram.is_some() || args.p_count.is_some();
    let csv = &args.csv;
    let data = args.csv.load(summary, true)?;
    let factor = !csv.factors.is_empty() || args.direction.is_some() || args.gram.is_some() || args.p_count.is_some();
    let mut r = Report::new(if factor { "ci factor" } else { "ci" });
    if let Some(d) = &data {
        d.describe(&mut r, csv);
    }
    if factor {
        let s = match &data {
            Some(d) => {
                let col = d.single_column(csv)?;
                r.input("column", &d.table.names[col]).input("factors", &csv.factors);
                compute_factor_sr(&d.factor_sample(col, csv, args.direction.as_ref().map(|v| v.0.as_slice()))?)?
            }
            None => match (args.sr, args.n, args.gram, args.p_count) {
                (Some(sr), Some(n), Some(g), Some(p)) => FactorSr::new(sr, n, p, g)?,
                _ => return usage("factor summary mode needs --sr, --n, --gram and --p-count"),
            },
        };
        r.input("sr", s.srg).input("n", s.n).input("p", s.p).input("gram", s.gram_scalar);
        r.params = Some(Params::from(&factor_ci_params(&s)?));
        r.interval = Some(factor_sr_confidence_interval(&s, args.alpha, order)?.into());
    } else {
        let s = match (&data, args.sr, args.n) {
            (Some(d), _, _) => {
                let col = d.single_column(csv)?;
                r.input("column", &d.table.names[col]);
                compute_sr(&d.returns(col)?)?
            }
            (None, Some(sr), Some(n)) => Sr::new(sr, n)?,
            _ => return usage("summary mode needs both --sr and --n"),
        };
        r.input("sr", s.sr).input("n", s.n);
        r.params = Some(Params::from(&sr_ci_params(&s)?));
        r.interval = Some(sr_confidence_interval(&s, args.alpha, order)?.into());
    }
    r.input("alpha", args.alpha);
    r.terms = Some(order.into());
    Ok(r)
}

fn predint(args: &PredintArgs) -> Res<Report> {
    let order = args.order.resolve()?;
    let csv = &args.csv;
    let data = csv.load(args.sr.is_some() || args.n.is_some(), true)?;
    let mut r = Report::new("predint");
    let s = match (&data, args.sr, args.n) {
        (Some(d), _, _) => {
            if !csv.factors.is_empty() {
                return usage("--factors is not supported by predint");
            }
            let col = d.single_column(csv)?;
            d.describe(&mut r, csv);
            r.input("column", &d.table.names[col]);
            compute_sr(&d.returns(col)?)?
        }
        (None, Some(sr), Some(n)) => Sr::new(sr, n)?,
        _ => return usage("summary mode needs both --sr and --n"),
    };
    r.input("sr", s.sr).input("n", s.n).input("n2", args.n2).input("alpha", args.alpha);
    r.interval = Some(sr_prediction_interval(&s, args.n2, args.alpha, order)?.into());
    r.terms = Some(order.into());
    Ok(r)
}

/// Hyperparameter file: Normal-Inverse-Gamma keys or regression keys.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Vec<Vec<f64>>>,
    sigsq: f64,
    m: f64,
}

enum Prior {
    Nig(Nig),
    Regression(Regression),
}

impl Prior {
    fn to_file(&self) -> PriorFile {
        match self {
            Prior::Nig(h) => PriorFile {
                mu: Some(h.mu),
                n: Some(h.n),
                sigsq: h.sigsq,
                m: h.m,
                ..Default::default()
            },
            Prior::Regression(h) => PriorFile {
                beta: Some(h.beta.clone()),
                lambda: Some(matrix_rows(&h.lambda)),
                sigsq: h.sigsq,
                m: h.m,
                ..Default::default()
            },
        }
    }

    fn describe(&self) -> BTreeMap<&'static str, serde_json::Value> {
        let v = |x: f64| serde_json::json!(x);
        match self {
            Prior::Nig(h) => BTreeMap::from([("mu", v(h.mu)), ("n", v(h.n)), ("sigsq", v(h.sigsq)), ("m", v(h.m))]),
            Prior::Regression(h) => BTreeMap::from([
                ("beta", serde_json::json!(h.beta)),
                ("lambda", serde_json::json!(matrix_rows(&h.lambda))),
                ("sigsq", v(h.sigsq)),
                ("m", v(h.m)),
            ]),
        }
    }
}

fn matrix_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn read_prior(path: &Path) -> Res<Prior> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let f: PriorFile =
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    match (f.mu, f.n, f.beta, f.lambda) {
        (Some(mu), Some(n), None, None) => Ok(Prior::Nig(Nig::new(mu, n, f.sigsq, f.m)?)),
        (None, None, Some(beta), Some(lambda)) => {
            let lambda = Matrix::from_rows(&lambda).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Prior::Regression(Regression::new(beta, lambda, f.sigsq, f.m)?))
        }
        _ => Err(CliError::Input(format!(
            "{}: give either mu and n, or beta and lambda, along with sigsq and m",
            path.display()
        ))),
    }
}

impl PriorArgs {
    fn flags_given(&self) -> bool {
        self.mu0.is_some() || self.n0.is_some() || self.sigsq0.is_some() || self.m0.is_some()
    }

    fn resolve(&self) -> Res<Option<Prior>> {
        if let Some(path) = &self.prior {
            return read_prior(path).map(Some);
        }
        if !self.flags_given() {
            return Ok(None);
        }
        Ok(Some(Prior::Nig(Nig::new(
            self.mu0.unwrap_or(0.0),
            self.n0.unwrap_or(0.0),
            self.sigsq0.unwrap_or(0.0),
            self.m0.unwrap_or(0.0),
        )?)))
    }
}

/// Posterior from the prior and whatever data was given. Regression is used
/// when factors are named or the prior is a regression prior.
fn posterior(prior: &PriorArgs, data: &BayesData, r: &mut Report, direction: Option<&[f64]>) -> Res<Prior> {
    let csv = &data.csv;
    let summary = data.mean.is_some() || data.sr.is_some() || data.sd.is_some() || data.n.is_some();
    let loaded = csv.load(summary, false)?;
    let given = prior.resolve()?;
    let regression = !csv.factors.is_empty() || matches!(given, Some(Prior::Regression(_)));
    if let Some(p) = &given {
        r.result("prior", p.describe());
    }

    if regression {
        let prior_h = match given {
            Some(Prior::Regression(h)) => Some(h),
            Some(Prior::Nig(_)) => {
                return usage("factor models take matrix hyperparameters via --prior FILE")
            }
            None => None,
        };
        return match &loaded {
            Some(d) => {
                let col = d.single_column(csv)?;
                d.describe(r, csv);
                r.input("column", &d.table.names[col]).input("factors", &csv.factors);
                let sample = d.factor_sample(col, csv, direction)?;
                let prior_h = prior_h.unwrap_or_else(|| Regression::noninformative(sample.p()));
                Ok(Prior::Regression(update_regression(&prior_h, &sample)?))
            }
            None if summary => usage("factor models need --csv data"),
            None => Ok(Prior::Regression(prior_h.expect("regression prior"))),
        };
    }

    let prior_h = match given {
        Some(Prior::Nig(h)) => h,
        _ => Nig::noninformative(),
    };
    let stats = match &loaded {
        Some(d) => {
            let col = d.single_column(csv)?;
            d.describe(r, csv);
            r.input("column", &d.table.names[col]);
            SampleStats::from_returns(&d.returns(col)?)?
        }
        None if summary => {
            let (Some(sd), Some(n)) = (data.sd, data.n) else {
                return usage("summary mode needs --sd and --n with --mean or --sr");
            };
            let mean = match (data.mean, data.sr) {
                (Some(m), None) => m,
                (None, Some(sr)) => sr * sd,
                _ => return usage("give one of --mean or --sr"),
            };
            SampleStats::new(mean, sd, n)?
        }
        None => SampleStats::empty(),
    };
    if stats.n > 0 {
        r.input("mean", stats.mean).input("sd", stats.sd).input("n", stats.n);
    }
    Ok(Prior::Nig(update_nig(&prior_h, &stats)?))
}

fn bayes(op: &BayesCommand) -> Res<Report> {
    match op {
        BayesCommand::Update { prior, data, output } => {
            let mut r = Report::new("bayes update");
            let post = posterior(prior, data, &mut r, None)?;
            if let Prior::Nig(h) = &post {
                if let Ok(snr) = h.snr() {
                    r.result("snr", snr);
                }
            }
            r.result("posterior", post.describe());
            if let Some(path) = output {
                let text = toml::to_string(&post.to_file()).map_err(|e| CliError::Input(e.to_string()))?;
                std::fs::write(path, text)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                r.input("output", path.display().to_string());
            }
            Ok(r)
        }
        BayesCommand::Credint { prior, data, direction, alpha, order } => {
            let order = order.resolve()?;
            let mut r = Report::new("bayes credint");
            let dir = direction.as_ref().map(|v| v.0.as_slice());
            let post = posterior(prior, data, &mut r, dir)?;
            let (marginal, interval) = match &post {
                Prior::Nig(h) => {
                    if direction.is_some() {
                        return usage("--direction applies to factor models");
                    }
                    (marginal_snr_params(h)?, credible_interval(h, *alpha, order)?)
                }
                Prior::Regression(h) => {
                    let v = match dir {
                        Some(v) => v.to_vec(),
                        None => (0..h.p()).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
                    };
                    let c = collapse_direction(h, &v)?;
                    r.input("direction", &v).result("snr", c.snr).result("q", c.q);
                    (c.marginal()?, c.credible_interval(*alpha, order)?)
                }
            };
            r.input("alpha", alpha);
            r.result("posterior", post.describe()).result("scale", marginal.scale);
            r.params = Some(Params::from(&marginal.params));
            r.interval = Some(Bounds::from(interval));
            r.terms = Some(order.into());
            Ok(r)
        }
        BayesCommand::Predint { prior, data, n2, alpha, order } => {
            let order = order.resolve()?;
            let mut r = Report::new("bayes predint");
            let post = posterior(prior, data, &mut r, None)?;
            let Prior::Nig(h) = &post else {
                return usage("posterior prediction intervals are available for the plain model only");
            };
            r.input("n2", n2).input("alpha", alpha);
            r.result("posterior", post.describe());
            r.interval = Some(posterior_prediction_interval(h, *n2, *alpha, order)?.into());
            r.terms = Some(order.into());
            Ok(r)
        }
    }
}

fn env_seed() -> Res<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_VAR}='{s}' is not a seed"))),
        Err(_) => Ok(None),
    }
}

fn simulate(args: &SimulateArgs) -> Res<Report> {
    let text = std::fs::read_to_string(&args.plan)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.plan.display())))?;
    let mut table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.plan.display())))?;
    let seed = match (args.seed, table.get("seed")) {
        (Some(s), _) => Some(s),
        (None, Some(_)) => None,
        (None, None) => Some(env_seed()?.unwrap_or(0)),
    };
    if let Some(s) = seed {
        let s = i64::try_from(s).map_err(|_| CliError::Usage("seed must be below 2^63".into()))?;
        table.insert("seed".into(), toml::Value::Integer(s));
    }
    if let Some(reps) = args.replications {
        table.insert("replications".into(), toml::Value::Integer(reps as i64));
    }
    let plan = SimulationPlan::from_toml_str(&toml::to_string(&table).expect("table serializes"))?;
    let procedure = match (&args.procedure, &plan.procedure) {
        (Some(p), _) | (None, Some(p)) => p.clone(),
        (None, None) => plan.scenario.clone(),
    };
    let res = coverage_sim(&plan, &procedure)?;

    let mut r = Report::new(format!("simulate {}", res.procedure));
    r.input("plan", args.plan.display().to_string())
        .input("scenario", &plan.scenario)
        .input("replications", plan.replications)
        .input("n", plan.n)
        .input("snr", plan.snr)
        .input("alpha", plan.alpha);
    if let Some(n2) = plan.n2 {
        r.input("n2", n2);
    }
    if plan.p > 1 {
        r.input("p", plan.p);
    }
    r.seed = Some(res.seed);
    r.terms = Some(plan.order()?.into());
    r.result("rate", res.rate)
        .result("std_error", res.std_error)
        .result("nominal", res.nominal)
        .result("failures", res.failures);
    Ok(r)
}

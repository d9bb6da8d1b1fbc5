use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use effdio_core::effectivity::{self, compute_theta, Config, ProblemInstance};
use effdio_core::io::{
    read_instance, ConfigEcho, IndexReport, Payload, PolyFile, ReportFile, FORMAT_VERSION,
};
use effdio_core::numfield::{default_m0_cap, FieldContext, DEFAULT_REFINE_CAP};
use effdio_core::polyops::{index_with_witness, RationalPoint, Weights};
use effdio_core::positivity::{positivity_report, PositivityReport};
use effdio_core::rat::{fmt_rat, parse_rat};
use effdio_core::search::{search, SearchHit, SearchQuery};
use effdio_core::siegel::{
    asymptotic_targets, dim_counts, DimensionReport, RatPoint, DEFAULT_MAX_K,
};
use effdio_core::{Error, Rat, Result};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report format 1)");

#[derive(Parser, Debug)]
#[command(name = "effdio", version = VERSION, about = "Effective bounds for simultaneous rational approximation of algebraic pairs")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Largest degree bound accepted by `dims`.
    #[arg(long, global = true, env = "EFFDIO_MAX_K", default_value_t = DEFAULT_MAX_K)]
    max_k: u32,
    /// Slack for the upper bound on max |alpha_i|, as p/q.
    #[arg(long, global = true, env = "EFFDIO_SLACK", default_value = "1/1048576")]
    slack: String,
    /// Cap on the primitive-element search (default 10 (d1 d2)^2).
    #[arg(long, global = true, env = "EFFDIO_M0_CAP")]
    m0_cap: Option<u64>,
    /// Cap on interval refinement steps.
    #[arg(long, global = true, env = "EFFDIO_REFINE_CAP", default_value_t = DEFAULT_REFINE_CAP)]
    refine_cap: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute theta, theta0, B, C and C0 for an instance.
    Constant {
        #[arg(short, long)]
        input: PathBuf,
        /// Also write the JSON report to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Dimension counts of the vanishing-condition system.
    Dims {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated degree bounds.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Index demanded at the conjugate locus (defaults to the instance theta).
        #[arg(long)]
        theta: Option<String>,
        /// Rational point `p1/q,p2/q`.
        #[arg(long, requires = "theta0")]
        point: Option<String>,
        #[arg(long, requires = "point")]
        theta0: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate all certified approximations with q in a range.
    Search {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        q_max: u64,
        #[arg(long, default_value_t = 1)]
        q_min: u64,
        #[arg(long, default_value = "1")]
        multiplier: String,
        #[arg(long)]
        json: bool,
    },
    /// Weighted vanishing index of a polynomial at a point.
    Index {
        /// Polynomial file.
        #[arg(long)]
        poly: PathBuf,
        /// Instance whose algebraic point is used.
        #[arg(
            short,
            long,
            conflicts_with = "point",
            required_unless_present = "point"
        )]
        input: Option<PathBuf>,
        /// Rational point `x1,x2`.
        #[arg(long)]
        point: Option<String>,
        /// Weights `r1,r2` (default `k,k`).
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Thresholds and volumes for the blowup family.
    Positivity {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        mu: Option<String>,
        /// Defaults to the denominator of theta.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

struct Settings {
    config: Config,
    max_k: u32,
}

impl Settings {
    fn from(g: &GlobalOpts) -> Result<Self> {
        let slack = parse_rat(&g.slack)?;
        if slack <= Rat::from_integer(0.into()) {
            return Err(Error::InvalidInput("slack must be positive".into()));
        }
        Ok(Settings {
            config: Config {
                m0_cap: g.m0_cap,
                refine_cap: g.refine_cap,
                slack,
            },
            max_k: g.max_k,
        })
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            m0_cap: self.config.m0_cap,
            refine_cap: self.config.refine_cap,
            slack: self.config.slack.clone(),
            max_k: self.max_k,
        }
    }

    fn context(&self, inst: &ProblemInstance) -> Result<FieldContext> {
        let cap = self
            .config
            .m0_cap
            .unwrap_or_else(|| default_m0_cap(inst.alpha1.degree(), inst.alpha2.degree()));
        FieldContext::build(&inst.alpha1, &inst.alpha2, cap, self.config.refine_cap)
    }
}

fn parse_pair(s: &str) -> Result<(Rat, Rat)> {
    match s.split_once(',') {
        Some((a, b)) => Ok((parse_rat(a)?, parse_rat(b)?)),
        None => Err(Error::InvalidInput(format!("expected `x1,x2`, got {s:?}"))),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit(json: bool, file: ReportFile, text: impl FnOnce(&Payload) -> String) {
    if json {
        println!("{}", file.to_json());
    } else {
        print!("{}", text(&file.payload));
    }
}

fn constant_text(r: &effectivity::EffectivityReport) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k:<22}{v}\n"));
    line("d", r.d.to_string());
    line("M0", r.m0.to_string());
    line("M1", r.m1.to_string());
    line(
        "m_alpha",
        r.m_alpha
            .iter()
            .map(BigInt::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    );
    line("|m_alpha|", r.m_alpha_height.to_string());
    line("N", r.n.to_string());
    line("M", r.big_m.to_string());
    line("theta", fmt_rat(&r.theta));
    line("Q", r.q.to_string());
    line("l(theta)", fmt_rat(&r.l_theta));
    line("theta0", fmt_rat(&r.theta0));
    line("B", r.b.to_string());
    line("max|alpha| <=", fmt_rat(&r.max_abs_upper));
    line("delta(th-th0)-1", fmt_rat(&r.exponent_denominator));
    line("C base", fmt_rat(&r.c.base));
    line("C exponent", fmt_rat(&r.c.exponent));
    line("log10 C <=", r.c.log10_upper.clone());
    let c0 = &r.c0_expression;
    line("C0 inner base", c0.inner_base.to_string());
    line("C0 inner exponent", fmt_rat(&c0.inner_exponent));
    line("C0 outer factor", fmt_rat(&c0.outer_factor));
    line("C0 outer exponent", fmt_rat(&c0.outer_exponent));
    line("log10 C0 <=", r.c0_log10_upper.clone());
    for w in &r.warnings {
        line("warning", w.clone());
    }
    s
}

fn dims_text(reports: &[DimensionReport]) -> String {
    let mut s = String::from("k\tb_k\tl_k\trank\ta_k\ti_k\ta_k/(k^2/2)\ttarget\n");
    for r in reports {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.k,
            r.b_k,
            r.l_k,
            r.rank,
            r.a_k,
            r.i_k.map_or("-".into(), |i| i.to_string()),
            fmt_rat(&r.ratio_a),
            r.targets.as_ref().map_or("-".into(), |t| fmt_rat(&t.locus)),
        ));
    }
    s
}

fn search_text(hits: &[SearchHit]) -> String {
    let mut s = String::from("# q p1 p2 margin1 margin2 (lower ends)\n");
    for h in hits {
        s.push_str(&format!(
            "{} {} {} {} {}\n",
            h.q,
            h.p1,
            h.p2,
            fmt_rat(&h.margins[0].lo),
            fmt_rat(&h.margins[1].lo)
        ));
    }
    s
}

fn positivity_text(r: &PositivityReport) -> String {
    let opt = |x: &Option<Rat>| x.as_ref().map_or("-".into(), fmt_rat);
    let mut s = String::new();
    s.push_str(&format!("threshold       {}\n", fmt_rat(&r.threshold)));
    s.push_str(&format!("ample           {}\n", r.ample));
    s.push_str(&format!("Q               {}\n", r.q));
    s.push_str(&format!("l(theta)        {}\n", fmt_rat(&r.l_theta)));
    s.push_str(&format!("1/(Q l(theta))  {}\n", fmt_rat(&r.seshadri_bound)));
    s.push_str(&format!("volume          {}\n", opt(&r.volume)));
    if r.mu.is_some() {
        s.push_str(&format!("volume with mu  {}\n", opt(&r.volume_with_mu)));
        s.push_str(&format!(
            "volume drop     {} (= mu^2)\n",
            opt(&r.volume_drop)
        ));
    }
    s
}

fn run(cli: Cli) -> Result<()> {
    let st = Settings::from(&cli.global)?;
    match cli.command {
        Command::Constant {
            input,
            output,
            json,
        } => {
            let inst = read_instance(&input)?;
            let report = effectivity::run(&inst, &st.config)?;
            let file = ReportFile::new(st.echo(), Payload::Constant(Box::new(report)));
            if let Some(out) = output {
                std::fs::write(&out, file.to_json())
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", out.display())))?;
            }
            emit(json, file, |p| match p {
                Payload::Constant(r) => constant_text(r),
                _ => unreachable!(),
            });
        }
        Command::Dims {
            input,
            k,
            theta,
            point,
            theta0,
            json,
        } => {
            if let Some(&big) = k.iter().find(|&&k| k > st.max_k) {
                return Err(Error::CapExceeded {
                    what: "degree bound k",
                    cap: st.max_k as u64,
                })
                .inspect_err(|_| eprintln!("k = {big} is above the configured maximum"));
            }
            let inst = read_instance(&input)?;
            let v = effectivity::validate(&inst, &st.config)?;
            let (default_theta, q) = compute_theta(&inst.delta, inst.m, v.ctx.d);
            let theta = theta
                .as_deref()
                .map(parse_rat)
                .transpose()?
                .unwrap_or(default_theta);
            let rat = match (point, theta0) {
                (Some(p), Some(t)) => {
                    let (x1, x2) = parse_pair(&p)?;
                    Some((RatPoint::from_rats(&x1, &x2), parse_rat(&t)?))
                }
                _ => None,
            };
            let q: u64 = (&q).try_into().unwrap_or(u64::MAX);
            let zero = Rat::from_integer(0.into());
            let t0 = rat.as_ref().map_or(&zero, |(_, t)| t);
            let targets = asymptotic_targets(&theta, t0, v.ctx.d, inst.m, q).ok();
            let reports = k
                .iter()
                .map(|&k| {
                    let mut r = dim_counts(k, &v.ctx, &theta, rat.as_ref().map(|(p, t)| (p, t)))?;
                    r.targets = targets.clone();
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            let file = ReportFile::new(st.echo(), Payload::Dims(reports));
            emit(json, file, |p| match p {
                Payload::Dims(r) => dims_text(r),
                _ => unreachable!(),
            });
        }
        Command::Search {
            input,
            q_max,
            q_min,
            multiplier,
            json,
        } => {
            let inst = read_instance(&input)?;
            effectivity::validate(&inst, &st.config)?;
            let n: BigInt = multiplier
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad multiplier {multiplier:?}")))?;
            let query = SearchQuery::new(inst, n, q_min, q_max, st.config.refine_cap)?;
            let hits = search(&query)?;
            let file = ReportFile::new(st.echo(), Payload::Search(hits));
            emit(json, file, |p| match p {
                Payload::Search(h) => search_text(h),
                _ => unreachable!(),
            });
        }
        Command::Index {
            poly,
            input,
            point,
            weights,
            json,
        } => {
            let p = PolyFile::parse(&read_text(&poly)?)?.to_poly()?;
            let w = match weights {
                Some(w) => {
                    let (a, b) = w
                        .split_once(',')
                        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                        .ok_or_else(|| Error::InvalidInput(format!("bad weights {w:?}")))?;
                    Weights::new(a, b)?
                }
                None => Weights::equal(p.k()),
            };
            let (ind, witness, label) = match (input, point) {
                (Some(i), _) => {
                    let inst = read_instance(&i)?;
                    let ctx = st.context(&inst)?;
                    let (ind, wit) = index_with_witness(&p, &ctx.point(p.k()), &w);
                    (ind, wit, format!("({}, {})", inst.alpha1, inst.alpha2))
                }
                (None, Some(s)) => {
                    let (x1, x2) = parse_pair(&s)?;
                    let label = format!("({}, {})", fmt_rat(&x1), fmt_rat(&x2));
                    let (ind, wit) = index_with_witness(&p, &RationalPoint::new(x1, x2), &w);
                    (ind, wit, label)
                }
                (None, None) => return Err(Error::InvalidInput("need --input or --point".into())),
            };
            let report = IndexReport {
                k: p.k(),
                weights: [w.r1(), w.r2()],
                point: label,
                index: ind.to_string(),
                witness,
            };
            let file = ReportFile::new(st.echo(), Payload::Index(report));
            emit(json, file, |p| match p {
                Payload::Index(r) => {
                    let wit = r
                        .witness
                        .map_or("-".into(), |j| format!("({}, {})", j.j1, j.j2));
                    format!("index {}\nwitness {}\n", r.index, wit)
                }
                _ => unreachable!(),
            });
        }
        Command::Positivity {
            d,
            m,
            theta,
            mu,
            q,
            json,
        } => {
            if d == 0 || m == 0 {
                return Err(Error::InvalidInput("d and m must be positive".into()));
            }
            let theta = parse_rat(&theta)?;
            let mu = mu.as_deref().map(parse_rat).transpose()?;
            let report = positivity_report(d, m, &theta, mu.as_ref(), q)?;
            let file = ReportFile::new(st.echo(), Payload::Positivity(Box::new(report)));
            emit(json, file, |p| match p {
                Payload::Positivity(r) => positivity_text(r),
                _ => unreachable!(),
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    debug_assert_eq!(FORMAT_VERSION, 1);
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

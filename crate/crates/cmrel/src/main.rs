//! `cmrel`: certified arithmetic of singular moduli from the command line —
//! class groups, j-values, class polynomials, explicit bounds, discriminant
//! sieves, and the integer-relation elimination pipeline.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rug::{Float, Integer};
use serde_json::json;

use cmrel_core::classgroup::{galois_orbit_triples, FormClass};
use cmrel_core::pipeline::{render_matrix, reproduce_all, run_trip, RunConfig};
use cmrel_core::quadforms::{class_number, denominator_census, reduced_forms, QuadForm};
use cmrel_core::relations::{check_triple, CheckConfig, TripleStatus};
use cmrel_core::sieve::{self, Abm15Table, CaseTag};
use cmrel_core::{bounds, detengine, hilbert, modular};

/// Environment override for the class-polynomial cache directory.
const CACHE_ENV: &str = "CMREL_CACHE_DIR";
/// Environment override for the equal-field table path.
const TABLE_ENV: &str = "CMREL_ABM15_TABLE";

#[derive(Parser)]
#[command(
    name = "cmrel",
    version,
    about = "Certified singular-modulus relation search and elimination"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the reduced forms of a discriminant, one per line.
    Forms {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
    },
    /// Print the class number h(Δ).
    Classnum {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
    },
    /// Reduced-form denominator census as JSON.
    Census {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
    },
    /// Galois orbit of a base triple of form classes, as JSON.
    ///
    /// The three discriminants must share a fundamental discriminant; the
    /// base is given as three comma-separated indices into the respective
    /// reduced-form lists (e.g. `0,0,1`).
    Orbit {
        #[arg(allow_negative_numbers = true)]
        dx: i64,
        #[arg(allow_negative_numbers = true)]
        dy: i64,
        #[arg(allow_negative_numbers = true)]
        dz: i64,
        base: String,
    },
    /// Evaluate j at the root of the form (a, b, c): certified midpoint and radius.
    Jval {
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        c: i64,
        #[arg(long, default_value_t = 256)]
        bits: u32,
    },
    /// Compute (or fetch from cache) the class polynomial of Δ.
    Hcp {
        #[arg(allow_negative_numbers = true)]
        delta: i64,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Explicit bound profiles as CSV.
    Bounds {
        /// Emit the per-n table (the default and only output form).
        #[arg(long)]
        table: bool,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
    /// Recompute the incompatibility thresholds and compare with references.
    Thresholds,
    /// Candidate discriminant lists as CSV.
    Sieve {
        /// Restrict to one family (1a, 1b, 1c, 2a, 2b, 2c), or `pairs` for
        /// the index-2 containment pairs.
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        abm15_table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equal-field table utilities.
    #[command(subcommand)]
    Abm15(Abm15Cmd),
    /// Check one discriminant triple for rational linear relations.
    CheckTriple {
        #[arg(allow_negative_numbers = true)]
        dx: i64,
        #[arg(allow_negative_numbers = true)]
        dy: i64,
        #[arg(allow_negative_numbers = true)]
        dz: i64,
        #[arg(long, default_value_t = 4096)]
        bits: u32,
        /// Decimal integer, or `2^N`.
        #[arg(long)]
        coeff_bound: Option<String>,
        /// Fail unless the verdict is certified.
        #[arg(long)]
        certified: bool,
    },
    /// Run the elimination over every candidate triple (resumable).
    RunTrip {
        #[arg(long, default_value_t = 4096)]
        bits: u32,
        /// Decimal integer, or `2^N`.
        #[arg(long)]
        coeff_bound: Option<String>,
        /// Worker threads (0 = default).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        abm15_table: Option<PathBuf>,
        /// Restrict to the given families (repeatable).
        #[arg(long = "case")]
        cases: Vec<String>,
        /// Output directory for the report log and summary.
        #[arg(long, default_value = "cmrel-run")]
        out: PathBuf,
    },
    /// Recompute every headline constant and print the comparison matrix.
    Reproduce {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum Abm15Cmd {
    /// Regenerate the equal-field table from scratch.
    Generate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a user-supplied table.
    Validate { path: PathBuf },
}

fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from)
}

fn parse_coeff_bound(s: &str) -> Result<Integer> {
    if let Some(exp) = s.strip_prefix("2^") {
        let e: u32 = exp.parse().context("bad exponent in coefficient bound")?;
        return Ok(Integer::from(1) << e);
    }
    s.parse::<Integer>()
        .map_err(|e| anyhow!("bad coefficient bound {s:?}: {e}"))
}

fn parse_cases(names: &[String]) -> Result<Option<BTreeSet<CaseTag>>> {
    if names.is_empty() {
        return Ok(None);
    }
    let mut set = BTreeSet::new();
    for name in names {
        let tag =
            CaseTag::parse(name).ok_or_else(|| anyhow!("unknown case {name:?} (use 1a..2c)"))?;
        set.insert(tag);
    }
    Ok(Some(set))
}

fn decimal(f: &Float, bits: u32) -> String {
    let digits = ((f64::from(bits)) * std::f64::consts::LOG10_2) as usize;
    format!("{f:.*e}", digits.max(8))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Loads the equal-field table from the given path or the environment;
/// `required` decides whether absence is an error or an empty table.
fn load_table(flag: Option<PathBuf>, required: bool) -> Result<Abm15Table> {
    match flag.or_else(|| env_path(TABLE_ENV)) {
        Some(path) => Ok(Abm15Table::load(&path)?),
        None if required => bail!(
            "equal-field table required: pass --abm15-table, set {TABLE_ENV}, \
             or generate one with `cmrel abm15 generate`"
        ),
        None => Ok(Abm15Table::default()),
    }
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Forms { delta } => {
            for form in reduced_forms(delta)? {
                println!("{form}");
            }
        }
        Cmd::Classnum { delta } => println!("{}", class_number(delta)?),
        Cmd::Census { delta } => {
            let census = denominator_census(delta)?;
            let counts: serde_json::Map<String, serde_json::Value> = census
                .map()
                .iter()
                .map(|(a, n)| (a.to_string(), json!(n)))
                .collect();
            println!(
                "{:#}",
                json!({ "delta": delta, "counts": counts, "total": census.total() })
            );
        }
        Cmd::Orbit { dx, dy, dz, base } => {
            let indices: Vec<usize> = base
                .split(',')
                .map(|s| s.trim().parse().context("base must be three indices"))
                .collect::<Result<_>>()?;
            let [ix, iy, iz] = indices[..] else {
                bail!("base must be three comma-separated indices, e.g. 0,0,1");
            };
            let pick = |delta: i64, i: usize| -> Result<FormClass> {
                let forms = reduced_forms(delta)?;
                let form = *forms
                    .get(i)
                    .ok_or_else(|| anyhow!("index {i} out of range for {delta} (h = {})", forms.len()))?;
                Ok(FormClass::from_form(delta, form)?)
            };
            let basis = (pick(dx, ix)?, pick(dy, iy)?, pick(dz, iz)?);
            let orbit = galois_orbit_triples(&basis)?;
            let rows: Vec<_> = orbit
                .iter()
                .map(|(x, y, z)| {
                    json!([x.representative(), y.representative(), z.representative()]
                        .map(|f| json!([f.a, f.b, f.c])))
                })
                .collect();
            println!("{:#}", json!({ "length": rows.len(), "orbit": rows }));
        }
        Cmd::Jval { a, b, c, bits } => {
            let value = modular::singular_modulus(&QuadForm::new(a, b, c), bits)?;
            let ball = value.value();
            println!("re     {}", decimal(ball.re.mid(), bits));
            println!("im     {}", decimal(ball.im.mid(), bits));
            println!("radius {:.8e}", ball.rad_upper());
        }
        Cmd::Hcp { delta, cache_dir } => {
            let dir = cache_dir.or_else(|| env_path(CACHE_ENV));
            let poly = match dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    hilbert::hilbert_class_poly_cached(&dir, delta)?
                }
                None => hilbert::hilbert_class_poly(delta)?,
            };
            println!("discriminant {delta}");
            println!("degree {}", poly.degree());
            for (k, coeff) in poly.coefficients().iter().enumerate() {
                println!("c{k} {coeff}");
            }
        }
        Cmd::Bounds { table: _, n_max } => print!("{}", bounds::table_csv(n_max)),
        Cmd::Thresholds => {
            let rows = detengine::reproduce_thresholds()?;
            println!(
                "{:<18} {:>10} {:>10}  {:>5}  result",
                "scenario", "computed", "reference", "exact"
            );
            let mut all = true;
            for r in &rows {
                all &= r.within;
                println!(
                    "{:<18} {:>10} {:>10}  {:>5}  {}",
                    r.id,
                    r.computed,
                    r.reference,
                    r.exact,
                    if r.within { "pass" } else { "FAIL" }
                );
            }
            println!("all within reference: {all}");
        }
        Cmd::Sieve {
            case,
            abm15_table,
            out,
        } => {
            let text = match case.as_deref() {
                Some("pairs") => sieve::pairs_csv(&sieve::difffundsub_pairs()?),
                other => {
                    let tag = other
                        .map(|s| {
                            CaseTag::parse(s)
                                .ok_or_else(|| anyhow!("unknown case {s:?} (use 1a..2c or pairs)"))
                        })
                        .transpose()?;
                    let required = tag.is_none_or(|t| t == CaseTag::C1c);
                    let table = load_table(abm15_table, required)?;
                    let list = sieve::case_lists(&table)?;
                    let filtered: Vec<_> = list
                        .into_iter()
                        .filter(|t| tag.is_none_or(|tag| t.tag == tag))
                        .collect();
                    sieve::triples_csv(&filtered)
                }
            };
            emit(out.as_ref(), &text)?;
        }
        Cmd::Abm15(Abm15Cmd::Generate { out }) => {
            let table = Abm15Table::generate()?;
            emit(out.as_ref(), &table.to_csv())?;
        }
        Cmd::Abm15(Abm15Cmd::Validate { path }) => {
            let table = Abm15Table::load(&path)?;
            println!("ok: {} rows, {} fields", table.rows.len(), table.field_groups().len());
        }
        Cmd::CheckTriple {
            dx,
            dy,
            dz,
            bits,
            coeff_bound,
            certified,
        } => {
            let mut cfg = CheckConfig {
                bits,
                ..CheckConfig::default()
            };
            if let Some(s) = coeff_bound {
                cfg.coeff_bound = parse_coeff_bound(&s)?;
            }
            let report = check_triple(dx, dy, dz, &cfg)?;
            println!("{:#}", report.to_json());
            if certified
                && !matches!(
                    report.status,
                    TripleStatus::RelationFoundCertified | TripleStatus::EliminatedCertified
                )
            {
                bail!("verdict not certified: {}", report.status.as_str());
            }
        }
        Cmd::RunTrip {
            bits,
            coeff_bound,
            jobs,
            cache_dir,
            abm15_table,
            cases,
            out,
        } => {
            let mut cfg = RunConfig {
                bits,
                jobs,
                cache_dir: cache_dir.or_else(|| env_path(CACHE_ENV)),
                table_path: abm15_table.or_else(|| env_path(TABLE_ENV)),
                cases: parse_cases(&cases)?,
                out_dir: out,
                ..RunConfig::default()
            };
            if let Some(s) = coeff_bound {
                cfg.coeff_bound = parse_coeff_bound(&s)?;
            }
            let summary = run_trip(&cfg)?;
            println!("{:#}", summary.to_json());
        }
        Cmd::Reproduce { json: as_json } => {
            let rows = reproduce_all()?;
            if as_json {
                let rows: Vec<_> = rows.iter().map(|r| r.to_json()).collect();
                println!("{:#}", json!(rows));
            } else {
                print!("{}", render_matrix(&rows));
            }
        }
    }
    Ok(())
}

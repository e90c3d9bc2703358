//! Command-line driver: `chartab`, `verify` and `search`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::localfield;
use crate::matgrp::{self, Flavor, HermitianSpec};
use crate::multiplicity::{self, KleinKind, MultiplicityReport};
use crate::report::CheckReport;
use crate::repthy::{character_table, dixon_prime, CharacterTable, ClassFunction, TableJson};

pub const CACHE_ENV: &str = "CHARMULT_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "charmult", version, about = "Exact character tables and branching multiplicity checks")]
pub struct Cli {
    /// Character-table cache directory.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the character-table cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the character table of a group.
    Chartab {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a verification suite and print a run manifest.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 3)]
        q: u32,
        /// Lattice half-rank; both 1 and 2 when omitted.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        prec: u32,
        /// Rank for the GU → U survey.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of random homomorphisms.
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search a catalog for Klein-four configurations.
    Search {
        #[arg(long, default_value_t = 64)]
        max_order: usize,
        /// JSON multiplication tables; the built-in catalog when omitted.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    RegularIdentity,
    Constancy,
    Invariance,
    Klein,
    ShadowMult2,
    Lattice,
    E1,
    Survey,
    All,
}

/// Parses a group description.
///
/// `Q8`, `klein`, `S3`, `S4`, `A4`, `cyclic:n`, `dihedral:n` (order `2n`), `U:n=2,q=3` and
/// likewise `SU`, `GU`, `SUxU`, or `table:FILE`.
pub fn parse_group(spec: &str) -> Result<FiniteGroup> {
    let spec = spec.trim();
    let int = |s: &str| s.parse::<usize>().map_err(|_| Error::SpecParse(format!("bad integer in {spec:?}")));
    match spec.split_once(':') {
        None if spec.eq_ignore_ascii_case("q8") => Ok(catalog::q8()),
        None if spec.eq_ignore_ascii_case("klein") => Ok(catalog::klein()),
        None if spec.eq_ignore_ascii_case("s3") => Ok(catalog::s3()),
        None if spec.eq_ignore_ascii_case("s4") => Ok(catalog::s4()),
        None if spec.eq_ignore_ascii_case("a4") => Ok(catalog::a4()),
        Some(("cyclic", n)) => match int(n)? {
            0 => Err(Error::SpecParse("cyclic:0".into())),
            n => Ok(crate::groups::cyclic(n)),
        },
        Some(("dihedral", n)) => catalog::dihedral(int(n)?).map_err(|e| Error::SpecParse(e.to_string())),
        Some(("table", path)) => catalog::read_fixtures(Path::new(path))?
            .into_iter()
            .next()
            .ok_or_else(|| Error::SpecParse(format!("{path} holds no group"))),
        Some(("U" | "SU" | "GU" | "SUxU", _)) => {
            let h: HermitianSpec = spec.parse()?;
            Ok(matgrp::unitary_group(&h)?.group)
        }
        _ => Err(Error::SpecParse(format!("unrecognized group {spec:?}"))),
    }
}

/// Hit and miss counters of a [`TableCache`].
#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Character tables on disk, keyed by the group's content hash and the
/// Dixon prime.
#[derive(Debug)]
pub struct TableCache {
    dir: Option<PathBuf>,
    pub stats: CacheStats,
}

impl TableCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        TableCache { dir, stats: CacheStats::default() }
    }

    pub fn disabled() -> Self {
        Self::new(None)
    }

    /// `--cache-dir`, else `$CHARMULT_CACHE_DIR`, else the user cache directory.
    pub fn default_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).or_else(|| {
            let root = std::env::var_os("XDG_CACHE_HOME")
                .map(PathBuf::from)
                .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
            Some(root.join("charmult"))
        })
    }

    fn path(&self, g: &FiniteGroup) -> Option<PathBuf> {
        let ell = dixon_prime(g.order() as u64, g.exponent());
        self.dir.as_ref().map(|d| d.join(format!("{}-{ell}.json", g.content_hash())))
    }

    pub fn table(&mut self, g: &FiniteGroup) -> Result<CharacterTable> {
        let path = self.path(g);
        if let Some(p) = path.as_ref().filter(|p| p.exists()) {
            let cached = std::fs::read_to_string(p)
                .ok()
                .and_then(|s| serde_json::from_str::<TableJson>(&s).ok())
                .and_then(|j| CharacterTable::from_json(g, &j).ok());
            if let Some(t) = cached {
                self.stats.hits += 1;
                return Ok(t);
            }
        }
        self.stats.misses += 1;
        let t = character_table(g)?;
        if let Some(p) = path {
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir)?;
            }
            // write then rename so concurrent readers never see a partial file
            let tmp = p.with_extension(format!("tmp{}", std::process::id()));
            std::fs::write(&tmp, serde_json::to_string(&t.to_json())?)?;
            std::fs::rename(&tmp, &p)?;
        }
        Ok(t)
    }
}

/// Everything one invocation produced. Timings live under `timing` so the
/// rest is byte-stable across warm-cache reruns.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub parameters: Value,
    pub pass: bool,
    pub reports: Vec<Value>,
    pub cache: CacheStats,
    pub timing: BTreeMap<String, f64>,
}

/// Accumulates reports and their timings.
#[derive(Debug, Default)]
pub struct Collector {
    reports: Vec<(String, bool, Value)>,
    timing: BTreeMap<String, f64>,
}

impl Collector {
    fn key(&self, name: &str) -> String {
        let mut key = name.to_string();
        let mut k = 1;
        while self.timing.contains_key(&key) {
            k += 1;
            key = format!("{name}#{k}");
        }
        key
    }

    pub fn multiplicity(&mut self, r: MultiplicityReport) {
        let name = match r.inputs.get("group").and_then(|g| g.as_str()) {
            Some(g) => format!("{}[{g}]", r.scenario),
            None => r.scenario.clone(),
        };
        let key = self.key(&name);
        self.timing.insert(key.clone(), r.seconds);
        self.reports.push((key, r.pass(), serde_json::to_value(&r).expect("report serializes")));
    }

    pub fn check(&mut self, r: CheckReport, seconds: f64) {
        let tag: Vec<String> =
            ["p", "prec", "d"].iter().filter_map(|k| r.params.get(*k).map(|v| format!("{k}={v}"))).collect();
        let key = self.key(&format!("{}[{}]", r.check, tag.join(",")));
        self.timing.insert(key.clone(), seconds);
        self.reports.push((key, r.pass, serde_json::to_value(&r).expect("report serializes")));
    }

    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.1)
    }

    pub fn summary(&self) -> Vec<(String, bool)> {
        self.reports.iter().map(|(k, p, _)| (k.clone(), *p)).collect()
    }

    pub fn into_manifest(self, subcommand: &str, parameters: Value, cache: CacheStats, total: f64) -> RunManifest {
        let pass = self.pass();
        let mut timing = self.timing;
        timing.insert("total".into(), total);
        RunManifest {
            tool: "charmult".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            parameters,
            pass,
            reports: self.reports.into_iter().map(|r| r.2).collect(),
            cache,
            timing,
        }
    }
}

fn sign_character(t: &CharacterTable) -> Option<&ClassFunction> {
    let minus = crate::cycnum::CycNum::from_integer(-1);
    t.rows().iter().find(|r| r.degree() == Some(1) && r.values().contains(&minus))
}

/// `⟨R, f*χ₁⟩ = χ₁(1)` over random homomorphisms among groups of order ≤ 64.
pub fn suite_regular_identity(cache: &mut TableCache, count: usize, seed: u64, out: &mut Collector) -> Result<()> {
    let start = Instant::now();
    let homs = catalog::random_homomorphisms(&catalog::small_catalog(), count, seed)?;
    let mut report = MultiplicityReport::new("regular_identity_battery", json!({"count": count, "seed": seed}));
    let mut failures = Vec::new();
    for (i, f) in homs.iter().enumerate() {
        let t = cache.table(f.target())?;
        let r = multiplicity::regular_identity_check(f, &t)?;
        if !r.pass() {
            failures.push(json!({"index": i, "source": f.source().label(), "target": f.target().label()}));
        }
    }
    report.set_verdict("all_pass", failures.is_empty() && homs.len() >= count);
    report.witness = json!({"homomorphisms": homs.len(), "failures": failures});
    report.seconds = start.elapsed().as_secs_f64();
    out.multiplicity(report);
    Ok(())
}

/// Constancy over the support for `SU(2,q) ↪ U(2,q)` and for the random
/// homomorphisms that satisfy the precondition.
pub fn suite_constancy(cache: &mut TableCache, q: u32, count: usize, seed: u64, out: &mut Collector) -> Result<()> {
    let start = Instant::now();
    let u = matgrp::unitary_group(&HermitianSpec::unitary(2, q))?;
    let su = u.group.subgroup_where(|x| u.det(x) == 1)?;
    let ut = cache.table(&u.group)?;
    let sut = cache.table(su.source())?;
    let mut report = MultiplicityReport::new("constancy_su_in_u", json!({"q": q}));
    let mut values = Vec::new();
    for chi2 in sut.rows() {
        let r = multiplicity::constancy_check(&su, &ut, chi2)?;
        report.set_verdict("singleton", r.pass() && r.witness["support_empty"] == false);
        values.push(r.witness["values"].clone());
    }
    report.witness = json!({"values_per_chi2": values});
    report.seconds = start.elapsed().as_secs_f64();
    out.multiplicity(report);

    let start = Instant::now();
    let homs = catalog::random_homomorphisms(&catalog::small_catalog(), count, seed)?;
    let mut report = MultiplicityReport::new("constancy_battery", json!({"count": count, "seed": seed}));
    let (mut checked, mut skipped, mut vacuous) = (0, 0, 0);
    let mut failures = Vec::new();
    for (i, f) in homs.iter().enumerate() {
        if !f.image_normal_abelian_cokernel().holds() {
            skipped += 1;
            continue;
        }
        let t1 = cache.table(f.target())?;
        let t2 = cache.table(f.source())?;
        for (j, chi2) in t2.rows().iter().enumerate() {
            checked += 1;
            let r = multiplicity::constancy_check(f, &t1, chi2)?;
            if r.witness["support_empty"] == true {
                vacuous += 1;
            }
            if !r.pass() {
                failures.push(json!({"index": i, "chi2": j}));
            }
        }
    }
    report.set_verdict("all_pass", failures.is_empty() && checked > 0);
    report.witness = json!({
        "checked": checked,
        "empty_support": vacuous,
        "skipped_precondition": skipped,
        "failures": failures,
    });
    report.seconds = start.elapsed().as_secs_f64();
    out.multiplicity(report);
    Ok(())
}

/// Groups of order ≤ 128 for the invariance battery.
pub fn invariance_groups() -> Result<Vec<FiniteGroup>> {
    let mut gs = catalog::small_catalog();
    gs.push(matgrp::unitary_group(&HermitianSpec::unitary(2, 3))?.group);
    gs.push(matgrp::unitary_group(&HermitianSpec::new(Flavor::SU, 2, 3))?.group);
    Ok(gs)
}

pub fn suite_invariance(cache: &mut TableCache, out: &mut Collector) -> Result<()> {
    for g in invariance_groups()? {
        let t = cache.table(&g)?;
        out.multiplicity(multiplicity::invariance_battery(&g, &t)?);
    }
    Ok(())
}

/// The `Q₈` example and the search over `groups`.
pub fn suite_klein(cache: &mut TableCache, groups: &[FiniteGroup], out: &mut Collector) -> Result<()> {
    let start = Instant::now();
    let q8 = catalog::q8();
    let t = cache.table(&q8)?;
    let pi = t.rows().iter().find(|r| r.degree() == Some(2)).expect("Q8 has a 2-dimensional irreducible");
    let z = q8.center();
    let verdict = multiplicity::klein_classifier(&z, pi)?;
    let zt = cache.table(z.source())?;
    let sign = sign_character(&zt).expect("center of Q8 has a sign character");
    let sign_row = zt.find(sign).expect("row of the table");
    let mut report = MultiplicityReport::new("klein_q8", json!({"group": "Q8", "normal": "center"}));
    report.decomposition = verdict.restriction_to_n.iter().map(|&(i, m)| (format!("chi{i}"), m)).collect();
    report.set_verdict("two_copies", verdict.kind == KleinKind::TwoCopies);
    report.set_verdict("restriction_is_twice_sign", verdict.restriction_to_n == vec![(sign_row, 2)]);
    report.set_verdict("direct_agrees", verdict.direct_agrees);
    report.witness = serde_json::to_value(&verdict)?;
    report.seconds = start.elapsed().as_secs_f64();
    out.multiplicity(report);
    out.multiplicity(search_report(groups)?);
    Ok(())
}

fn search_report(groups: &[FiniteGroup]) -> Result<MultiplicityReport> {
    let start = Instant::now();
    let hits = multiplicity::klein_search(groups)?;
    let mut report = MultiplicityReport::new(
        "klein_search",
        json!({"groups": groups.iter().map(|g| g.label()).collect::<Vec<_>>()}),
    );
    report.set_verdict("criterion_agrees_with_direct", hits.iter().all(|h| h.verdict.direct_agrees));
    report.set_verdict(
        "construction_route_verified",
        hits.iter().filter_map(|h| h.construction.as_ref()).all(|c| c.verified()),
    );
    let two = hits.iter().filter(|h| h.verdict.kind == KleinKind::TwoCopies).count();
    report.witness = json!({
        "configurations": hits.len(),
        "two_copies": two,
        "four_distinct": hits.len() - two,
        "hits": hits,
    });
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

pub fn suite_lattice(p: u64, prec: u32, ds: &[usize], out: &mut Collector) -> Result<()> {
    for &d in ds {
        let start = Instant::now();
        let reports = localfield::lattice_report(p, prec, d)?;
        let each = start.elapsed().as_secs_f64() / reports.len() as f64;
        for r in reports {
            out.check(r, each);
        }
    }
    Ok(())
}

pub fn suite_e1(ps: &[u64], max_prec: u32, out: &mut Collector) -> Result<()> {
    for &p in ps {
        for prec in 1..=max_prec {
            let start = Instant::now();
            let reports = localfield::e1_report(p, prec)?;
            let each = start.elapsed().as_secs_f64() / reports.len() as f64;
            for r in reports {
                out.check(r, each);
            }
        }
    }
    Ok(())
}

/// Runs one suite with the given parameters.
#[allow(clippy::too_many_arguments)]
pub fn run_suite(
    suite: Suite,
    cache: &mut TableCache,
    q: u32,
    d: Option<usize>,
    p: u64,
    prec: u32,
    n: usize,
    count: usize,
    seed: u64,
    out: &mut Collector,
) -> Result<()> {
    let ds = d.map(|d| vec![d]).unwrap_or_else(|| vec![1, 2]);
    match suite {
        Suite::RegularIdentity => suite_regular_identity(cache, count, seed, out),
        Suite::Constancy => suite_constancy(cache, q, count, seed, out),
        Suite::Invariance => suite_invariance(cache, out),
        Suite::Klein => suite_klein(cache, &catalog::small_catalog(), out),
        Suite::ShadowMult2 => {
            out.multiplicity(multiplicity::finite_shadow_mult_two(q)?);
            Ok(())
        }
        Suite::Lattice => suite_lattice(p, prec, &ds, out),
        Suite::E1 => suite_e1(&[p], prec, out),
        Suite::Survey => {
            out.multiplicity(multiplicity::gu_u_restriction_survey(q, n)?);
            Ok(())
        }
        Suite::All => {
            for s in [
                Suite::RegularIdentity,
                Suite::Constancy,
                Suite::Invariance,
                Suite::Klein,
                Suite::ShadowMult2,
                Suite::Lattice,
                Suite::Survey,
            ] {
                run_suite(s, cache, q, d, p, prec, n, count, seed, out)?;
            }
            suite_e1(&[3, 5], prec, out)
        }
    }
}

/// Renders a character table as TSV: class data, then one row per character.
pub fn table_tsv(t: &CharacterTable) -> String {
    let cc = t.group().conjugacy_classes();
    let mut s = String::new();
    let join = |v: Vec<String>| v.join("\t");
    s += &format!("class\t{}\n", join((0..cc.len()).map(|c| c.to_string()).collect()));
    s += &format!("size\t{}\n", join(cc.sizes().iter().map(|x| x.to_string()).collect()));
    s += &format!("order\t{}\n", join((0..cc.len()).map(|c| cc.element_order(c).to_string()).collect()));
    for (i, row) in t.rows().iter().enumerate() {
        s += &format!("chi{i}\t{}\n", join(row.values().iter().map(|v| v.to_string()).collect()));
    }
    s
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn manifest_text(m: &RunManifest, format: Format, summary: &[(String, bool)]) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(m)? + "\n",
        Format::Tsv => {
            let mut s = String::from("check\tpass\n");
            for (k, p) in summary {
                s += &format!("{k}\t{p}\n");
            }
            s
        }
    })
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::SpecParse(_)
                | Error::Parse(_)
                | Error::Unsupported(_)
                | Error::NoQuadraticCharacter { .. }
                | Error::ClosureExceedsCap { .. }
                | Error::PrecisionExhausted(_)
                | Error::Io(_)
                | Error::Json(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<bool> {
    let dir = if cli.no_cache { None } else { TableCache::default_dir(cli.cache_dir.clone()) };
    let mut cache = TableCache::new(dir);
    let start = Instant::now();
    match cli.command {
        Command::Chartab { group, format } => {
            let g = parse_group(&group)?;
            let t = cache.table(&g)?;
            let text = match format {
                Format::Json => {
                    let mut j = serde_json::to_value(t.to_json())?;
                    j["group"] = json!(group);
                    j["degrees"] = json!(t.degrees());
                    serde_json::to_string_pretty(&j)? + "\n"
                }
                Format::Tsv => table_tsv(&t),
            };
            emit(&text, None, stdout)?;
            Ok(true)
        }
        Command::Verify { suite, q, d, p, prec, n, count, seed, out, format } => {
            let mut collector = Collector::default();
            run_suite(suite, &mut cache, q, d, p, prec, n, count, seed, &mut collector)?;
            let summary = collector.summary();
            let params = json!({
                "suite": format!("{suite:?}"), "q": q, "d": d, "p": p, "prec": prec,
                "n": n, "count": count, "seed": seed,
            });
            let m = collector.into_manifest("verify", params, cache.stats, start.elapsed().as_secs_f64());
            emit(&manifest_text(&m, format, &summary)?, out.as_deref(), stdout)?;
            Ok(m.pass)
        }
        Command::Search { max_order, fixtures, out } => {
            let groups = match &fixtures {
                Some(path) => catalog::read_fixtures(path)?,
                None => catalog::small_catalog(),
            };
            let groups: Vec<FiniteGroup> = groups.into_iter().filter(|g| g.order() <= max_order).collect();
            let mut collector = Collector::default();
            collector.multiplicity(search_report(&groups)?);
            let params = json!({"max_order": max_order, "fixtures": fixtures});
            let m = collector.into_manifest("search", params, cache.stats, start.elapsed().as_secs_f64());
            emit(&(serde_json::to_string_pretty(&m)? + "\n"), out.as_deref(), stdout)?;
            Ok(m.pass)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_specs() {
        assert_eq!(parse_group("Q8").unwrap().order(), 8);
        assert_eq!(parse_group("cyclic:4").unwrap().order(), 4);
        assert_eq!(parse_group("dihedral:4").unwrap().order(), 8);
        assert_eq!(parse_group("klein").unwrap().order(), 4);
        assert_eq!(parse_group("S4").unwrap().order(), 24);
        assert_eq!(parse_group("U:n=2,q=3").unwrap().order(), 96);
        assert!(matches!(parse_group("cyclic:x"), Err(Error::SpecParse(_))));
        assert!(matches!(parse_group("mystery"), Err(Error::SpecParse(_))));
    }

    #[test]
    fn tsv_shape() {
        let t = character_table(&catalog::q8()).unwrap();
        let s = table_tsv(&t);
        assert_eq!(s.lines().count(), 3 + 5);
        assert!(s.lines().all(|l| l.split('\t').count() == 6));
    }

    #[test]
    fn bad_arguments_exit_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["charmult", "verify", "--suite", "nope"], &mut o, &mut e), 2);
        assert_eq!(run(["charmult", "--no-cache", "chartab", "--group", "bogus"], &mut o, &mut e), 2);
    }
}

use std::fmt;
use std::io;

use convbound::boundary::{
    finite_difference, horo_limit, horofunction_vector, myrberg_stats, ns_dynamics, random_geodesic_ray,
    shadow_members, GeodesicSemantics, HoroLimit, HoroVector, ShadowSpec,
};
use convbound::contracting::{certify_contracting, find_barriers, Axis};
use convbound::density::{
    cogrowth_check, conformality_check, critical_exponent, exact_shadow_report, hts_evidence, orbit_counts,
    ps_measure, shadow_report, AuditParams, ConformalityMode, ConicalProxyParams, HtsParams, ShadowReportParams,
};
use convbound::pcomplex::{run_pipeline, tn_series, visual_spheres, PipelineOptions};
use convbound::randwalk::{boundary_convergence, drift, simulate, ConvergenceParams, StepDistribution};
use convbound::space::{CountMethod, Family, SubgroupPredicate};
use convbound::{AnnulusSpec, Error, GeodesicPath, ModelSpace, Word};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;
use crate::output::Emitter;

#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(io::Error),
    Usage(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Usage(e) => write!(f, "usage error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Search(_) | Error::Order(_) | Error::Admissibility(_)) => 1,
            Failure::Lib(Error::Validation(_) | Error::Parse(_)) | Failure::Io(_) | Failure::Usage(_) => 2,
            Failure::Lib(Error::Resource { .. }) => 3,
            Failure::Lib(Error::Capability(_)) => 4,
            Failure::Lib(Error::Inconclusive(_)) => 5,
        }
    }
}

/// `Some(verdict)` for commands that decide something, `None` otherwise.
pub type Outcome = Result<Option<bool>, Failure>;

pub struct Ctx {
    pub seed: u64,
    pub enum_cap: Option<u64>,
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, Error> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

pub fn parse_space(ctx: &Ctx, s: &str) -> Result<ModelSpace, Error> {
    let s = s.trim();
    let space = if let Some(k) = s.strip_prefix("free:") {
        ModelSpace::new(Family::Free { rank: number(k, "rank")? })
    } else if let Some(k) = s.strip_prefix("lattice:") {
        ModelSpace::new(Family::Lattice { rank: number(k, "rank")? })
    } else if let Some(rest) = s.strip_prefix("fpa:") {
        let (ranks, free) = rest.split_once('+').unwrap_or((rest, "0"));
        let ranks = ranks
            .split(',')
            .filter(|r| !r.trim().is_empty())
            .map(|r| number(r, "factor rank"))
            .collect::<Result<Vec<usize>, _>>()?;
        ModelSpace::new(Family::FreeProductAbelian {
            ranks,
            free_rank: number(free, "free rank")?,
        })
    } else {
        ModelSpace::preset(s)
    }?;
    Ok(match ctx.enum_cap {
        Some(c) => space.with_enumeration_cap(c as u128),
        None => space,
    })
}

pub fn parse_predicate(space: &ModelSpace, s: &str) -> Result<SubgroupPredicate, Error> {
    let s = s.trim();
    let weights = |w: &str| -> Result<Vec<i64>, Error> { w.split(',').map(|x| number(x, "weight")).collect() };
    let pred = if s == "whole" {
        SubgroupPredicate::Whole
    } else if let Some(w) = s.strip_prefix("exp:") {
        SubgroupPredicate::exponent_sum(space, &weights(w)?)?
    } else if let Some(w) = s.strip_prefix("parity:") {
        SubgroupPredicate::parity(space, &weights(w)?)?
    } else {
        return Err(Error::Parse(format!("unknown predicate {s:?} (whole, exp:W.., parity:W..)")));
    };
    pred.validate(space)?;
    Ok(pred)
}

fn words(space: &ModelSpace, given: &[String]) -> Result<Vec<Word>, Error> {
    given.iter().map(|w| space.parse(w)).collect()
}

/// First generators of the first two factors.
fn factor_pair(space: &ModelSpace) -> Result<(Word, Word), Error> {
    let first = |k: u16| {
        space
            .generators()
            .iter()
            .find(|g| g.factor == k && g.sign > 0)
            .map(|&g| Word::from_gen(g))
    };
    match (first(0), first(1)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Capability(
            "a single-factor space has no contracting elements to default to; pass --f".into(),
        )),
    }
}

/// `(ab)^3, (ab^-1)^3`.
fn default_barriers(space: &ModelSpace) -> Result<Vec<Word>, Error> {
    let (a, b) = factor_pair(space)?;
    Ok(vec![a.mul(&b).pow(3), a.mul(&b.inverse()).pow(3)])
}

/// `(ab)^3, (ab^-1)^3, (a^2 b)^3`.
fn default_family(space: &ModelSpace) -> Result<Vec<Word>, Error> {
    let (a, b) = factor_pair(space)?;
    let mut fs = default_barriers(space)?;
    fs.push(a.pow(2).mul(&b).pow(3));
    Ok(fs)
}

/// `b^4, a b a^-1 b, a^-1 b a b^-1`: all in the kernel of the `a`-exponent sum.
fn default_audit_set(space: &ModelSpace) -> Result<Vec<Word>, Error> {
    let (a, b) = factor_pair(space)?;
    let (ai, bi) = (a.inverse(), b.inverse());
    Ok(vec![
        b.pow(4),
        a.mul(&b).mul(&ai).mul(&b),
        ai.mul(&b).mul(&a).mul(&bi),
    ])
}

fn elements_or(
    space: &ModelSpace,
    given: &[String],
    default: fn(&ModelSpace) -> Result<Vec<Word>, Error>,
) -> Result<Vec<Word>, Error> {
    if given.is_empty() {
        default(space)
    } else {
        words(space, given)
    }
}

fn formatted(space: &ModelSpace, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| space.format(w)).collect()
}

/// `log(2k - 1)` on free groups of rank `k >= 2`.
fn free_omega(space: &ModelSpace) -> Option<f64> {
    match space.family() {
        Family::Free { rank } if *rank >= 2 => Some(((2 * rank - 1) as f64).ln()),
        _ => None,
    }
}

/// Growth quotient `log |S(o, R)| / R`.
fn growth_quotient(space: &ModelSpace, r: u64) -> Result<f64, Error> {
    if r == 0 {
        return Err(Error::Validation("growth quotient needs R > 0".into()));
    }
    Ok((space.sphere_count(r)? as f64).ln() / r as f64)
}

/// Extra fields first, then the report's own.
fn merged<T: Serialize>(extra: Value, report: &T) -> Value {
    let mut out = extra;
    if let (Value::Object(o), Ok(Value::Object(r))) = (&mut out, serde_json::to_value(report)) {
        o.extend(r);
    }
    out
}

fn without<T: Serialize>(report: &T, keys: &[&str]) -> Value {
    let mut v = serde_json::to_value(report).unwrap_or(Value::Null);
    if let Value::Object(o) = &mut v {
        for k in keys {
            o.remove(*k);
        }
    }
    v
}

pub fn run(cmd: &Command, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    match cmd {
        Command::Space(a) => space_cmd(a, ctx, em),
        Command::Certify(a) => certify(a, ctx, em),
        Command::Barriers(a) => barriers(a, ctx, em),
        Command::Pcomplex(a) => pcomplex(a, ctx, em),
        Command::Spheres(a) => spheres(a, ctx, em),
        Command::Horo(a) => horo(a, ctx, em),
        Command::Shadow(a) => shadow(a, ctx, em),
        Command::Myrberg(a) => myrberg(a, ctx, em),
        Command::Nsdyn(a) => nsdyn(a, ctx, em),
        Command::Exponent(a) => exponent(a, ctx, em),
        Command::Psmeasure(a) => psmeasure(a, ctx, em),
        Command::Shadowlemma(a) => shadowlemma(a, ctx, em),
        Command::Hts(a) => hts(a, ctx, em),
        Command::Cogrowth(a) => cogrowth(a, ctx, em),
        Command::Walk(a) => walk(a, ctx, em),
    }
}

fn space_cmd(a: &SpaceArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let pred = parse_predicate(&sp, &a.predicate)?;
    let method = match a.method.as_str() {
        "auto" => CountMethod::Auto,
        "dp" => CountMethod::Dp,
        "stream" => CountMethod::Stream,
        m => return Err(Failure::Usage(format!("unknown count method {m:?} (auto, dp, stream)"))),
    };
    let o = Word::identity();
    let whole = sp.sphere_counts(a.nmax)?;
    let constrained = orbit_counts(&sp, &pred, &o, &o, a.nmax, method)?;
    let rows: Vec<Value> = whole
        .iter()
        .zip(&constrained)
        .enumerate()
        // u128 counts go out as strings so that no JSON reader rounds them
        .map(|(n, (w, c))| json!({"n": n, "sphere": w.to_string(), "in_subgroup": c.to_string()}))
        .collect();
    em.table("sphere_count", &rows)?;
    if let Some(w) = &a.word {
        let x = sp.parse(w)?;
        em.record(
            "word",
            &json!({
                "input": w,
                "normal_form": sp.format(&x),
                "length": x.len(),
                "syllables": x.syllables().len(),
                "in_subgroup": pred.contains(&x),
            }),
        )?;
    }
    Ok(None)
}

fn certify(a: &CertifyArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let f = sp.parse(&a.f)?;
    let window = a.window.unwrap_or(4 * a.radius + 2 * f.len());
    let axis = Axis::with_stabilizer(&f, &Word::identity(), window)?;
    let cert = certify_contracting(&sp, &axis, a.c, a.radius)?;
    em.record("certificate", &merged(json!({"f": sp.format(&f), "window": window}), &cert))?;
    Ok(Some(cert.is_certified()))
}

fn barriers(a: &BarriersArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let (x, y) = (sp.parse(&a.from)?, sp.parse(&a.to)?);
    let fs = elements_or(&sp, &a.f, default_barriers)?;
    let gamma = GeodesicPath::canonical(&x, &y);
    let found = find_barriers(&sp, &gamma, &fs, a.r)?;
    let rows: Vec<Value> = found
        .iter()
        .map(|w| merged(json!({"h": sp.format(&w.h), "f": sp.format(&w.f)}), w))
        .collect();
    em.table("barrier", &rows)?;
    let per_f: Vec<usize> = fs.iter().map(|f| found.iter().filter(|w| w.f == *f).count()).collect();
    em.record(
        "barrier_summary",
        &json!({
            "from": sp.format(&x),
            "to": sp.format(&y),
            "length": gamma.len(),
            "r": a.r,
            "fs": formatted(&sp, &fs),
            "counts": per_f,
        }),
    )?;
    Ok(None)
}

fn pipeline_options(f: &FamilyArgs) -> PipelineOptions {
    PipelineOptions {
        kappa: f.kappa,
        k: f.k,
        ..PipelineOptions::default()
    }
}

fn pcomplex(a: &PcomplexArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let f = &a.family;
    let sp = parse_space(ctx, &f.space)?;
    let fs = elements_or(&sp, &f.f, default_family)?;
    let (p, summary) = run_pipeline(&sp, &fs, f.rfam, f.window, &pipeline_options(f))?;
    if let Some(path) = &a.adjacency {
        std::fs::write(path, p.graph.to_adjacency_text())?;
    }
    em.record("pcomplex", &merged(json!({"fs": formatted(&sp, &fs)}), &summary))?;
    let tripod = summary.tripod.as_ref().is_none_or(|t| t.pass);
    Ok(Some(summary.axioms.pass && summary.connected && tripod))
}

fn spheres(a: &SpheresArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let f = &a.family;
    let sp = parse_space(ctx, &f.space)?;
    let fs = elements_or(&sp, &f.f, default_family)?;
    let s = match a.s.or_else(|| free_omega(&sp)) {
        Some(s) => s,
        None => return Err(Failure::Usage("--s is required outside free groups".into())),
    };
    let opts = PipelineOptions {
        tripod_cap: 0,
        forcing_span: None,
        ..pipeline_options(f)
    };
    let (p, _) = run_pipeline(&sp, &fs, f.rfam, f.window, &opts)?;
    let base = p
        .family
        .base_axis(a.base_kind)
        .ok_or_else(|| Error::Validation(format!("no axis of kind {} through the origin", a.base_kind)))?;
    let rep = visual_spheres(&p.family, &p.graph, base, a.nmax)?;
    let t = tn_series(&rep.spheres, s)?;
    let rows: Vec<Value> = rep
        .spheres
        .iter()
        .map(|sph| {
            json!({
                "n": sph.n,
                "vertices": sph.vertices.len(),
                "points": sph.points.len(),
                "edge_vertices": sph.edge_vertices,
                "sum": t.sums[sph.n],
            })
        })
        .collect();
    em.table("sphere", &rows)?;
    em.record(
        "series",
        &merged(
            json!({
                "base": p.family.ids[base],
                "kappa": p.kappa,
                "k": p.k,
                "multiplicity_min": rep.multiplicity_min,
                "multiplicity_max": rep.multiplicity_max,
                "points_covered": rep.points_covered,
            }),
            &t,
        ),
    )?;
    Ok(Some(t.max_min <= a.max_ratio && t.max_defect <= a.max_defect))
}

fn horo_for(sp: &ModelSpace, a: &HoroArgs, point: &str) -> Result<HoroVector, Failure> {
    let w = sp.parse(point)?;
    if a.ray.is_none() {
        return Ok(horofunction_vector(sp, &w, a.radius)?);
    }
    let ys: Vec<Word> = (1..=a.terms as i64).map(|k| w.pow(k)).collect();
    match horo_limit(sp, &ys, a.radius, a.window)? {
        HoroLimit::Stabilized(b) => Ok(b),
        HoroLimit::Diverged(d) => Err(Error::Inconclusive(format!(
            "horofunction limit along {} did not stabilize at {} ball points",
            sp.format(&w),
            d.oscillating.len()
        ))
        .into()),
    }
}

fn horo(a: &HoroArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let point = match (&a.ray, &a.y) {
        (Some(r), None) => r,
        (None, Some(y)) => y,
        _ => return Err(Failure::Usage("horo needs exactly one of --y and --ray".into())),
    };
    let b = horo_for(&sp, a, point)?;
    let rows: Vec<Value> = b
        .points()
        .iter()
        .zip(b.values())
        .map(|(x, v)| json!({"x": sp.format(x), "value": v}))
        .collect();
    em.table("horovector", &rows)?;
    em.record(
        "horo",
        &json!({"source": b.source, "radius": b.radius(), "points": b.points().len(), "lipschitz": b.is_lipschitz()}),
    )?;
    if let Some(other) = &a.other {
        let c = horo_for(&sp, a, other)?;
        em.record("finite_difference", &merged(json!({"other": c.source}), &finite_difference(&sp, &b, &c)?))?;
    }
    Ok(None)
}

fn shadow(a: &ShadowArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let (x, y) = (sp.parse(&a.source)?, sp.parse(&a.target)?);
    let semantics = match a.semantics.as_str() {
        "canonical" => GeodesicSemantics::Canonical,
        "some-geodesic" | "some_geodesic" => GeodesicSemantics::SomeGeodesic,
        s => return Err(Failure::Usage(format!("unknown semantics {s:?} (canonical, some-geodesic)"))),
    };
    let spec = if a.f.is_empty() {
        ShadowSpec::plain(x.clone(), y.clone(), a.r)
    } else {
        ShadowSpec::partial(x.clone(), y.clone(), a.r, words(&sp, &a.f)?)
    }
    .with_semantics(semantics);
    let mut candidates = sp.ball(a.ball)?;
    candidates.sort_by(Word::shortlex_cmp);
    let members = shadow_members(&sp, &spec, &candidates)?;
    em.record(
        "shadow",
        &json!({
            "source": sp.format(&x),
            "target": sp.format(&y),
            "r": a.r,
            "partial": !a.f.is_empty(),
            "semantics": semantics,
            "ball": a.ball,
            "candidates": candidates.len(),
            "members": members.len(),
        }),
    )?;
    if a.list {
        let rows: Vec<Value> = members
            .iter()
            .map(|z| json!({"z": sp.format(z), "length": z.len()}))
            .collect();
        em.table("member", &rows)?;
    }
    Ok(None)
}

fn myrberg(a: &MyrbergArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let fs = elements_or(&sp, &a.f, default_barriers)?;
    let ray = random_geodesic_ray(&sp, a.length, ctx.seed);
    let st = myrberg_stats(&sp, &ray, &fs, a.r)?;
    em.record("myrberg", &merged(json!({"seed": ctx.seed}), &st))?;
    Ok(Some(st.all_positive()))
}

fn nsdyn(a: &NsdynArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let h = sp.parse(&a.h)?;
    let u = a.u.as_deref().map(|w| sp.parse(w)).transpose()?.unwrap_or_else(|| h.pow(3));
    let v = a.v.as_deref().map(|w| sp.parse(w)).transpose()?.unwrap_or_else(|| h.pow(-3));
    let o = Word::identity();
    let su = ShadowSpec::plain(o.clone(), u.clone(), a.r);
    let sv = ShadowSpec::plain(o, v.clone(), a.r);
    let samples = sp.enumerate_annulus(&AnnulusSpec::sphere(a.sphere))?;
    let rep = ns_dynamics(&sp, &h, &su, &sv, &samples, a.nmax)?;
    em.record(
        "ns",
        &merged(
            json!({"h": sp.format(&h), "u": sp.format(&u), "v": sp.format(&v), "r": a.r, "sphere": a.sphere}),
            &without(&rep, &["per_sample_forward"]),
        ),
    )?;
    Ok(Some(true))
}

fn exponent(a: &ExponentArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let pred = parse_predicate(&sp, &a.predicate)?;
    let est = critical_exponent(&sp, &pred, a.nmax, a.delta)?;
    let rows: Vec<Value> = est
        .rows
        .iter()
        .map(|r| json!({"n": r.n, "count": r.count.to_string(), "quotient": r.quotient}))
        .collect();
    em.table("growth", &rows)?;
    em.record(
        "exponent",
        &merged(json!({"space": a.space, "predicate": a.predicate}), &without(&est, &["rows"])),
    )?;
    Ok(None)
}

fn default_s(sp: &ModelSpace, s: Option<f64>, r: u64) -> Result<f64, Error> {
    match s {
        Some(s) => Ok(s),
        None => Ok(growth_quotient(sp, r)? + 0.05),
    }
}

fn psmeasure(a: &PsmeasureArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let x = sp.parse(&a.x)?;
    let s = default_s(&sp, a.s, a.radius)?;
    let m = ps_measure(&sp, s, &x, a.radius)?;
    let total = m.total_mass(&sp)?;
    if let Some(w) = &m.warning {
        eprintln!("warning: {w}");
    }
    em.record("measure", &merged(json!({"x": sp.format(&x), "total_mass": total}), &m))?;
    let o = Word::identity();
    if let Some(t) = &a.target {
        let v = sp.parse(t)?;
        let mass = m.shadow_mass(&sp, &ShadowSpec::plain(o.clone(), v.clone(), a.r))?;
        em.record(
            "shadow_mass",
            &json!({
                "target": sp.format(&v),
                "r": a.r,
                "mass": mass,
                "scaled": mass * (s * v.len() as f64).exp(),
            }),
        )?;
    }
    if let Some(g) = &a.conformal_g {
        let g = sp.parse(g)?;
        let targets = sp.enumerate_annulus(&AnnulusSpec::sphere(a.depth))?;
        let mode = if a.exact {
            ConformalityMode::Exact
        } else {
            ConformalityMode::Estimator { s, r: a.radius }
        };
        let rep = conformality_check(&sp, mode, &g, &targets)?;
        em.table("conformality", &rep.rows)?;
        em.record("conformality_summary", &without(&rep, &["rows"]))?;
    }
    Ok(None)
}

fn shadowlemma(a: &ShadowlemmaArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let rep = if a.exact {
        exact_shadow_report(&sp, a.n1, a.n2)?
    } else {
        let s = default_s(&sp, a.s, a.radius)?;
        let m = ps_measure(&sp, s, &Word::identity(), a.radius)?;
        if let Some(w) = &m.warning {
            eprintln!("warning: {w}");
        }
        let omega = match a.omega.or_else(|| free_omega(&sp)) {
            Some(w) => w,
            None => growth_quotient(&sp, a.radius)?,
        };
        let fs = (!a.f.is_empty()).then(|| words(&sp, &a.f)).transpose()?;
        let p = ShadowReportParams {
            omega,
            r: a.r,
            fs,
            n1: a.n1,
            n2: a.n2,
            overlap_samples: a.overlap_samples,
            seed: ctx.seed,
        };
        shadow_report(&sp, &m, &p)?
    };
    em.table("annulus", &rep.annuli)?;
    if a.rows {
        em.table("shadow_row", &rep.rows)?;
    }
    em.record("shadowlemma", &without(&rep, &["rows", "annuli"]))?;
    if a.ratio_min.is_none() && a.ratio_max.is_none() {
        return Ok(None);
    }
    let lo = a.ratio_min.unwrap_or(f64::NEG_INFINITY);
    let hi = a.ratio_max.unwrap_or(f64::INFINITY);
    Ok(Some(rep.min_ratio >= lo && rep.max_ratio <= hi))
}

fn hts(a: &HtsArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let pred = parse_predicate(&sp, &a.predicate)?;
    let omega = match a.omega {
        Some(w) => w,
        None => critical_exponent(&sp, &pred, a.nmax, 0)?.omega_hat,
    };
    let proxy = if a.proxy_samples > 0 {
        Some(ConicalProxyParams {
            samples: a.proxy_samples,
            seed: ctx.seed,
            r: a.r,
            fs: elements_or(&sp, &a.f, default_barriers)?,
        })
    } else {
        None
    };
    let p = HtsParams {
        r: a.radius,
        conv_offset: a.conv_offset,
        conv_radius: a.conv_radius,
        proxy,
    };
    let rep = hts_evidence(&sp, &pred, omega, &p)?;
    let rows: Vec<Value> = rep
        .partial_sums
        .iter()
        .enumerate()
        .map(|(n, v)| json!({"n": n, "partial_sum": v}))
        .collect();
    em.table("partial_sum", &rows)?;
    em.record("hts", &without(&rep, &["partial_sums"]))?;
    Ok(Some(rep.convergent.cauchy && !rep.degenerate))
}

fn cogrowth(a: &CogrowthArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let h = parse_predicate(&sp, &a.predicate)?;
    let audit = if a.audit_n > 0 {
        Some(AuditParams {
            n: a.audit_n,
            delta: a.delta,
            r: a.r,
            fs: elements_or(&sp, &a.f, default_audit_set)?,
            r_sep: a.rsep,
        })
    } else {
        None
    };
    let rep = cogrowth_check(&sp, &h, a.nmax, audit.as_ref())?;
    let rows: Vec<Value> = rep
        .curve_g
        .iter()
        .zip(&rep.curve_h)
        .map(|(g, h)| {
            json!({
                "n": g.n,
                "count_g": g.count.to_string(),
                "quotient_g": g.quotient,
                "count_h": h.count.to_string(),
                "quotient_h": h.quotient,
            })
        })
        .collect();
    em.table("cogrowth_curve", &rows)?;
    em.record(
        "cogrowth",
        &merged(json!({"predicate": a.predicate}), &without(&rep, &["curve_g", "curve_h", "audit"])),
    )?;
    if let Some(au) = &rep.audit {
        let mut v = merged(json!({"pass": au.pass()}), au);
        if let Value::Object(o) = &mut v {
            o.insert("h_annulus_count".into(), Value::String(au.h_annulus_count.to_string()));
        }
        em.record("doubling_audit", &v)?;
    }
    Ok(Some(rep.pass()))
}

fn walk(a: &WalkArgs, ctx: &Ctx, em: &mut Emitter) -> Outcome {
    let sp = parse_space(ctx, &a.space)?;
    let mu = match a.mu.as_str() {
        "srw" | "lazy" => StepDistribution::preset(&sp, &a.mu)?,
        path => StepDistribution::parse(&sp, &std::fs::read_to_string(path)?)?,
    };
    let fs = if a.f.is_empty() {
        // lattices have no contracting elements; the barrier counts are then skipped
        default_barriers(&sp).unwrap_or_default()
    } else {
        words(&sp, &a.f)?
    };
    let params = ConvergenceParams {
        r: a.radius,
        window: a.window,
        fs,
        barrier_r: a.barrier_r,
    };
    let runs = (0..a.seeds)
        .into_par_iter()
        .map(|i| {
            let seed = ctx.seed + i;
            let t = simulate(&sp, &mu, a.steps, seed, a.checkpoint, false)?;
            Ok((seed, drift(&t)?, boundary_convergence(&sp, &t, &params)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows: Vec<Value> = runs
        .iter()
        .map(|(seed, d, c)| {
            json!({
                "seed": seed,
                "steps": a.steps,
                "drift": d.terminal,
                "diffusive_band": d.diffusive_band,
                "stabilized": c.stabilized,
                "stabilized_at": c.stabilized_at,
                "gromov_monotone": c.gromov_monotone,
                "barrier_counts": c.myrberg.as_ref().map(|m| &m.counts),
                "barriers_all_positive": c.myrberg.as_ref().map(|m| m.all_positive()),
            })
        })
        .collect();
    em.table("walk", &rows)?;
    let n = runs.len().max(1) as f64;
    let mean = runs.iter().map(|r| r.1.terminal).sum::<f64>() / n;
    let var = runs.iter().map(|r| (r.1.terminal - mean).powi(2)).sum::<f64>() / n;
    em.record(
        "walk_summary",
        &json!({
            "space": a.space,
            "mu": a.mu,
            "support": mu.support().len(),
            "generates_semigroup": mu.generates_semigroup(&sp, 4),
            "steps": a.steps,
            "seeds": runs.len(),
            "mean_drift": mean,
            "drift_sd": var.sqrt(),
            "stabilized": runs.iter().filter(|r| r.2.stabilized).count(),
            "barriers_all_positive": runs
                .iter()
                .filter(|r| r.2.myrberg.as_ref().is_some_and(|m| m.all_positive()))
                .count(),
        }),
    )?;
    Ok(None)
}

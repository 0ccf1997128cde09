//! The `isrwb` command line.
//!
//! Exit status: 0 on success, 1 when the answer is a valid negative one (not
//! isogenous, not strong, certificate withheld, residual above threshold), 2
//! on errors and undecided questions.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};
use serde::Serialize;

use crate::arith::ball::{ComplexBall, RAD_PREC};
use crate::arith::poly::{parse_poly, RatFunc};
use crate::counting::{count_report, default_eps, Descriptor, Domain, TargetFunction};
use crate::differentials::{
    der_dimension, extend_derivation, f_forms, hcl_witness, omega_presentation, DerivationAssignment, Extension,
    FieldPresentation, HclResult, Mode, Scalar,
};
use crate::error::{Error, Result};
use crate::lattice::{
    cm_field, is_isogenous, isr_equivalent, make_lattice, parse_value, reduce_tau, ExactComplex, Lattice,
    DEFAULT_CM_BOUND,
};
use crate::predim::{
    chain_decompose, check_semimodularity, independence_certificate, is_strong, predim_dim, strong_hull, validate,
    Configuration, CoordSet, SlotSet,
};
use crate::records::{config_from_record, presentation_from_record, read_file, render, ComplexRecord, LatticeRecord, ValueRecord};
use crate::reports::*;
use crate::wp::{
    addition_residual, homogeneity_residual, invariants, isogeny_residual, ode_residual, schwarz_residual, IdentityTag,
    Residual, GUARD_BITS,
};

/// Seed used by every randomized command unless `--seed` is given.
pub const DEFAULT_SEED: u64 = 1729;

/// Residuals must be below `2^-(precision - VERIFY_SLACK)`.
pub const VERIFY_SLACK: u32 = 28;

#[derive(Parser, Debug)]
#[command(name = "isrwb", version, about = "Lattices, Weierstrass p, predimension and point counting")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Search bound for CM and isogeny searches.
    #[arg(long, global = true, default_value_t = DEFAULT_CM_BOUND)]
    bound: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Record,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Period lattices: normalization, reduction, CM, isogeny.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Invariants, values and identity checks of the p-function.
    #[command(subcommand)]
    Wp(WpCmd),
    /// Predimension calculus on a configuration file.
    #[command(subcommand)]
    Predim(PredimCmd),
    /// Derivation spaces of a presentation file.
    #[command(subcommand)]
    Deriv(DerivCmd),
    /// Rational points of bounded height near a target function.
    Count(CountArgs),
    /// Quick consistency checks across all modules.
    Selftest,
}

#[derive(Args, Debug, Clone)]
struct LatticeArgs {
    /// `τ` as `p+qi:d`, `i`, or a decimal `x+yi`.
    #[arg(allow_hyphen_values = true, long)]
    tau: Option<String>,
    #[arg(allow_hyphen_values = true, long, requires = "w2", conflicts_with = "tau")]
    w1: Option<String>,
    #[arg(allow_hyphen_values = true, long, requires = "w1")]
    w2: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(allow_hyphen_values = true, long)]
    tau1: String,
    #[arg(allow_hyphen_values = true, long)]
    tau2: String,
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    Normalize {
        #[arg(allow_hyphen_values = true, long)]
        w1: String,
        #[arg(allow_hyphen_values = true, long)]
        w2: String,
    },
    Reduce(LatticeArgs),
    Cm(LatticeArgs),
    Isogenous(PairArgs),
    Isr(PairArgs),
}

#[derive(Subcommand, Debug)]
enum WpCmd {
    Invariants(LatticeArgs),
    Eval {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(allow_hyphen_values = true, long)]
        z: String,
    },
    Verify {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_parser = parse_identity)]
        identity: IdentityTag,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Scale factor for the homogeneity identity.
        #[arg(allow_hyphen_values = true, long, default_value = "2")]
        alpha: String,
        /// Partner lattice for the isogeny identity (default `2τ`).
        #[arg(allow_hyphen_values = true, long)]
        tau2: Option<String>,
    },
}

fn parse_identity(s: &str) -> std::result::Result<IdentityTag, String> {
    IdentityTag::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Slot indices, comma separated; all slots by default.
    #[arg(long)]
    slots: Option<String>,
}

#[derive(Subcommand, Debug)]
enum PredimCmd {
    /// `δ(set / base)`.
    Report {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        set: String,
        /// Defaults to the configuration's base.
        #[arg(long)]
        base: Option<String>,
    },
    Strong {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        set: String,
    },
    Hull {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        set: String,
    },
    Dim {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        set: String,
        #[arg(long)]
        base: Option<String>,
    },
    Chain {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The four semimodularity statements for `(A, B, C)`.
    Lemma7 {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
    },
    Certificate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        fa: String,
        #[arg(long, default_value = "")]
        c: String,
    },
}

#[derive(Subcommand, Debug)]
enum DerivCmd {
    Rank {
        #[arg(long)]
        presentation: PathBuf,
    },
    Extend {
        #[arg(long)]
        presentation: PathBuf,
        /// `x=value,y=value`.
        #[arg(long, default_value = "")]
        boundary: String,
        /// `b=value`.
        #[arg(long)]
        target: Option<String>,
    },
    Hcl {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        generator: String,
    },
}

#[derive(Args, Debug)]
struct CountArgs {
    /// `identity` or `exp-wp-log`.
    #[arg(long, default_value = "exp-wp-log")]
    target: String,
    #[arg(allow_hyphen_values = true, long, default_value = "0+2i:-1")]
    tau: String,
    /// Open interval such as `(6/5, 23/10)` or `(0, inf)`.
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, default_value = "2,5,10,20,50")]
    heights: String,
    /// `2^-k` or a decimal; defaults to `2^-(precision/2)`.
    #[arg(long)]
    eps: Option<String>,
}

/// Exit status plus the two output streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type Reply = (i32, String);

fn emit<T: Serialize>(c: &Common, code: i32, value: &T) -> Result<Reply> {
    Ok((code, render(value, c.format == Format::Record)))
}

fn dispatch(cli: &Cli) -> Result<Reply> {
    let c = &cli.common;
    match &cli.command {
        Command::Lattice(cmd) => lattice_cmd(c, cmd),
        Command::Wp(cmd) => wp_cmd(c, cmd),
        Command::Predim(cmd) => predim_cmd(c, cmd),
        Command::Deriv(cmd) => deriv_cmd(c, cmd),
        Command::Count(args) => count_cmd(c, args),
        Command::Selftest => {
            let r = crate::selftest::run(c.precision, c.seed);
            emit(c, if r.failed == 0 { 0 } else { 1 }, &r)
        }
    }
}

/// Decimal periods are read with guard bits so that their rounding does not
/// limit the requested accuracy.
fn lattice_of(args: &LatticeArgs, prec: u32) -> Result<Lattice> {
    let prec = prec + GUARD_BITS;
    match (&args.tau, &args.w1, &args.w2) {
        (Some(t), _, _) => Lattice::from_tau(parse_value(t, prec)?),
        (None, Some(w1), Some(w2)) => make_lattice(parse_value(w1, prec)?, parse_value(w2, prec)?),
        _ => Err(Error::InvalidInput("give --tau or both --w1 and --w2".into())),
    }
}

fn tau_lattice(text: &str, prec: u32) -> Result<Lattice> {
    Lattice::from_tau(parse_value(text, prec + GUARD_BITS)?)
}

fn lattice_cmd(c: &Common, cmd: &LatticeCmd) -> Result<Reply> {
    let p = c.precision;
    match cmd {
        LatticeCmd::Normalize { w1, w2 } => {
            let l = make_lattice(parse_value(w1, p)?, parse_value(w2, p)?)?;
            emit(c, 0, &LatticeRecord::from_lattice(&l))
        }
        LatticeCmd::Reduce(args) => {
            let (tau, m) = reduce_tau(&lattice_of(args, p)?)?;
            emit(c, 0, &ReduceRecord { tau: ValueRecord::from_value(&tau), unimodular: m })
        }
        LatticeCmd::Cm(args) => {
            let l = lattice_of(args, p)?;
            let d = cm_field(&l, c.bound)?;
            let rec = CmRecord { tau: ValueRecord::from_value(&l.tau), bound: c.bound, cm: d.is_some(), d };
            emit(c, if d.is_some() { 0 } else { 1 }, &rec)
        }
        LatticeCmd::Isogenous(pair) => {
            let v = is_isogenous(&tau_lattice(&pair.tau1, p)?, &tau_lattice(&pair.tau2, p)?, c.bound)?;
            let rec = IsogenyRecord::from_verdict(&v, c.bound, None);
            emit(c, verdict_code(&rec), &rec)
        }
        LatticeCmd::Isr(pair) => {
            let v = isr_equivalent(&tau_lattice(&pair.tau1, p)?, &tau_lattice(&pair.tau2, p)?, c.bound)?;
            let rec = IsogenyRecord::from_verdict(&v.verdict, c.bound, Some(v.used_reflection));
            emit(c, verdict_code(&rec), &rec)
        }
    }
}

fn verdict_code(r: &IsogenyRecord) -> i32 {
    match r.verdict.as_str() {
        "isogenous" => 0,
        "not_isogenous" => 1,
        _ => 2,
    }
}

fn wp_cmd(c: &Common, cmd: &WpCmd) -> Result<Reply> {
    let p = c.precision;
    match cmd {
        WpCmd::Invariants(args) => {
            let m = invariants(&lattice_of(args, p)?, p)?;
            emit(
                c,
                0,
                &InvariantsRecord {
                    lattice: LatticeRecord::from_lattice(&m.lattice),
                    precision: p,
                    g2: ComplexRecord::from_ball(&m.g2),
                    g3: ComplexRecord::from_ball(&m.g3),
                    discriminant: ComplexRecord::from_ball(&m.discriminant()),
                    input_limited: m.input_limited,
                },
            )
        }
        WpCmd::Eval { lattice, z } => {
            let m = invariants(&lattice_of(lattice, p)?, p)?;
            let z = parse_value(z, p)?.to_ball(m.working_precision());
            let (wp, dwp) = m.wp_pair(&z)?;
            emit(
                c,
                0,
                &EvalRecord {
                    lattice: LatticeRecord::from_lattice(&m.lattice),
                    argument: ComplexRecord::from_ball(&z),
                    precision: p,
                    wp: ComplexRecord::from_ball(&wp),
                    wp_prime: ComplexRecord::from_ball(&dwp),
                },
            )
        }
        WpCmd::Verify { lattice, identity, samples, alpha, tau2 } => {
            let l = lattice_of(lattice, p)?;
            let alpha = parse_value(alpha, p)?;
            let partner = match tau2 {
                Some(t) => Some(tau_lattice(t, p)?),
                None => Some(Lattice::from_tau(double(&l.tau))?),
            };
            let spec = VerifySpec { identity: *identity, alpha, partner, bound: c.bound };
            let rec = verify_identity(&l, &spec, *samples, c.seed, p)?;
            emit(c, if rec.failed == 0 { 0 } else { 1 }, &rec)
        }
    }
}

fn double(v: &ExactComplex) -> ExactComplex {
    match v {
        ExactComplex::Quad(q) => ExactComplex::Quad(q.scale(&Rational::from(2))),
        ExactComplex::Numeric(b) => ExactComplex::Numeric(b.mul_i64(2)),
    }
}

/// What `wp verify` checks.
#[derive(Clone, Debug)]
pub struct VerifySpec {
    pub identity: IdentityTag,
    /// Scale for the homogeneity identity.
    pub alpha: ExactComplex,
    /// Second lattice for the isogeny identity.
    pub partner: Option<Lattice>,
    /// Search bound used to find the isogeny witness.
    pub bound: u32,
}

/// `u ω₁ + v ω₂` with `u, v ∈ {1/1000, …, 999/1000}`.
pub fn random_argument<R: Rng>(l: &Lattice, rng: &mut R, prec: u32) -> ComplexBall {
    let u = Rational::from((rng.gen_range(1..1000), 1000));
    let v = Rational::from((rng.gen_range(1..1000), 1000));
    let w1 = l.omega1_ball(prec);
    let w2 = l.omega2_ball(prec);
    let scale = |w: &ComplexBall, r: &Rational| w.mul(&ComplexBall::from_rationals(r, &Rational::new(), prec));
    scale(&w1, &u).add(&scale(&w2, &v))
}

/// Evaluates one identity on `samples` seeded random arguments.
pub fn verify_identity(l: &Lattice, spec: &VerifySpec, samples: usize, seed: u64, precision: u32) -> Result<VerifyRecord> {
    let m = invariants(l, precision)?;
    let prec = m.working_precision();
    let witness = match (spec.identity, &spec.partner) {
        (IdentityTag::Isogeny, Some(l2)) => match is_isogenous(l, l2, spec.bound)?.witness() {
            Some(w) => Some(w),
            None => return Err(Error::InvalidInput("the partner lattice is not isogenous to the first".into())),
        },
        (IdentityTag::Isogeny, None) => return Err(Error::InvalidInput("the isogeny identity needs --tau2".into())),
        _ => None,
    };
    let bits = precision.saturating_sub(VERIFY_SLACK).max(1) as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut passed, mut failed) = (0, 0);
    let mut worst: Option<(Float, ResidualRecord)> = None;
    for _ in 0..samples {
        let z1 = random_argument(l, &mut rng, prec);
        let z2 = random_argument(l, &mut rng, prec);
        let (args, res): (Vec<&ComplexBall>, Result<Residual>) = match spec.identity {
            IdentityTag::Ode => (vec![&z1], ode_residual(&m, &z1)),
            IdentityTag::Homogeneity => (vec![&z1], homogeneity_residual(&m, &spec.alpha, &z1)),
            IdentityTag::Schwarz => (vec![&z1], schwarz_residual(&m, &z1)),
            IdentityTag::Addition => (vec![&z1, &z2], addition_residual(&m, &z1, &z2)),
            IdentityTag::Isogeny => {
                let l2 = spec.partner.as_ref().expect("checked above");
                let r = isogeny_residual(l, l2, witness.as_ref().expect("checked above"), &z1, precision);
                (vec![&z1], r.map(|r| r.best().clone()))
            }
        };
        let (value, error) = match &res {
            Ok(r) => (r.value.clone(), None),
            Err(e) => (Float::with_val(RAD_PREC, f64::INFINITY), Some(e.to_string())),
        };
        let ok = matches!(&res, Ok(r) if r.below_pow2(bits));
        if ok {
            passed += 1;
        } else {
            failed += 1;
        }
        let rec = ResidualRecord {
            identity: spec.identity.name().into(),
            lattice: ValueRecord::from_value(&l.tau),
            argument: args.into_iter().map(ComplexRecord::from_ball).collect(),
            precision,
            bound: bound_string(&value),
            error,
        };
        if worst.as_ref().is_none_or(|(w, _)| value > *w) {
            worst = Some((value, rec));
        }
    }
    let (max, worst) = worst.ok_or_else(|| Error::InvalidInput("--samples must be positive".into()))?;
    Ok(VerifyRecord {
        identity: spec.identity.name().into(),
        lattice: LatticeRecord::from_lattice(l),
        precision,
        seed,
        samples,
        threshold: format!("2^-{bits}"),
        passed,
        failed,
        max_bound: bound_string(&max),
        worst,
    })
}

fn load_config(path: &std::path::Path) -> Result<Configuration> {
    let cfg = config_from_record(&read_file(path)?)?;
    let diag = validate(&cfg);
    if !diag.valid {
        return Err(Error::InvalidConfiguration(diag.issue.unwrap_or_default()));
    }
    Ok(cfg)
}

/// Comma-separated slot indices; `None` means all slots.
pub fn parse_slots(cfg: &Configuration, text: Option<&str>) -> Result<SlotSet> {
    let Some(text) = text else {
        return Ok(cfg.all_slots());
    };
    let mut s = 0;
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| Error::Parse(format!("slots: bad index {part:?}")))?;
        if i >= cfg.slots.len() {
            return Err(Error::Parse(format!("slots: no slot {i}")));
        }
        s |= 1 << i;
    }
    Ok(s)
}

fn predim_cmd(c: &Common, cmd: &PredimCmd) -> Result<Reply> {
    let open = |a: &ConfigArgs| -> Result<(Configuration, SlotSet)> {
        let cfg = load_config(&a.config)?;
        let slots = parse_slots(&cfg, a.slots.as_deref())?;
        Ok((cfg, slots))
    };
    let base_of = |cfg: &Configuration, b: &Option<String>| -> Result<CoordSet> {
        b.as_deref().map_or(Ok(cfg.base), |t| cfg.subset(t))
    };
    match cmd {
        PredimCmd::Report { cfg, set, base } => {
            let (cfg, slots) = open(cfg)?;
            let (b, a) = (cfg.subset(set)?, base_of(&cfg, base)?);
            let r = cfg.delta(slots, b, a);
            emit(c, 0, &PredimRecord::new(&cfg, b, a, slots, &r))
        }
        PredimCmd::Strong { cfg, set } => {
            let (cfg, slots) = open(cfg)?;
            let a = cfg.subset(set)?;
            let s = is_strong(&cfg, a, slots)?;
            let rec = StrongRecord {
                set: cfg.names(a),
                slots: slot_list(slots),
                strong: s.strong,
                violation: s.violation.map(|v| cfg.names(v)),
            };
            emit(c, if s.strong { 0 } else { 1 }, &rec)
        }
        PredimCmd::Hull { cfg, set } => {
            let (cfg, slots) = open(cfg)?;
            let a = cfg.subset(set)?;
            let h = strong_hull(&cfg, a, slots)?;
            emit(c, 0, &HullRecord { set: cfg.names(a), slots: slot_list(slots), hull: cfg.names(h) })
        }
        PredimCmd::Dim { cfg, set, base } => {
            let (cfg, slots) = open(cfg)?;
            let (a, base) = (cfg.subset(set)?, base_of(&cfg, base)?);
            let d = predim_dim(&cfg, a, base, slots)?;
            let rec = DimRecord {
                set: cfg.names(a),
                base: cfg.names(base),
                slots: slot_list(slots),
                dim: d.dim,
                witness: cfg.names(d.witness),
            };
            emit(c, 0, &rec)
        }
        PredimCmd::Chain { cfg, from, to } => {
            let (cfg, slots) = open(cfg)?;
            let (a, b) = (cfg.subset(from)?, cfg.subset(to)?);
            let chain = chain_decompose(&cfg, a, b, slots)?;
            emit(c, 0, &ChainRecord::new(&cfg, &chain, b, slots))
        }
        PredimCmd::Lemma7 { cfg, a, b, c: base } => {
            let (cfg, slots) = open(cfg)?;
            let (a, b, base) = (cfg.subset(a)?, cfg.subset(b)?, cfg.subset(base)?);
            let r = check_semimodularity(&cfg, a, b, base, slots)?;
            let rec = LemmaRecord::new(&cfg, (a, b, base), slots, &r);
            emit(c, if rec.all_hold { 0 } else { 1 }, &rec)
        }
        PredimCmd::Certificate { config, f1, f2, a, fa, c: base } => {
            let cfg = load_config(config)?;
            let (f1, f2) = (parse_slots(&cfg, Some(f1))?, parse_slots(&cfg, Some(f2))?);
            let cert = independence_certificate(&cfg, f1, f2, cfg.subset(a)?, cfg.subset(fa)?, cfg.subset(base)?)?;
            let rec = CertificateRecord::new(&cfg, &cert);
            emit(c, if rec.certified { 0 } else { 1 }, &rec)
        }
    }
}

fn scalar(p: &FieldPresentation, text: &str, field: &str) -> Result<Scalar> {
    match p.mode {
        Mode::Generic => {
            let mut resolve = |n: &str| p.index_of(n);
            let poly = parse_poly(text, &mut resolve).map_err(|e| Error::Parse(format!("{field}: {e}")))?;
            Ok(Scalar::Exact(RatFunc::from_poly(poly)))
        }
        Mode::NumericPoint => Ok(Scalar::Numeric(
            parse_value(text, p.precision).map_err(|e| Error::Parse(format!("{field}: {e}")))?.to_ball(p.precision),
        )),
    }
}

fn assignment_pairs(p: &FieldPresentation, a: &DerivationAssignment) -> Vec<(String, String)> {
    a.values.iter().map(|(i, v)| (p.generators[*i].clone(), v.render(&p.generators))).collect()
}

fn deriv_cmd(c: &Common, cmd: &DerivCmd) -> Result<Reply> {
    let load = |path: &PathBuf| presentation_from_record(&read_file(path)?, c.precision);
    match cmd {
        DerivCmd::Rank { presentation } => {
            let (p, specs) = load(presentation)?;
            omega_presentation(&p)?;
            let forms = f_forms(&p, &specs)?;
            let rec = RankRecord {
                mode: p.mode.name().into(),
                generators: p.generators.clone(),
                relations: p.relations.len(),
                forms: forms.len(),
                der_dimension: der_dimension(&p, &forms)?,
            };
            emit(c, 0, &rec)
        }
        DerivCmd::Extend { presentation, boundary, target } => {
            let (p, specs) = load(presentation)?;
            let forms = f_forms(&p, &specs)?;
            let mut values = Vec::new();
            for part in boundary.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, value) =
                    part.split_once('=').ok_or_else(|| Error::Parse(format!("boundary: expected name=value in {part:?}")))?;
                values.push((p.index_of(name.trim())?, scalar(&p, value, "boundary")?));
            }
            let target = match target {
                Some(t) => {
                    let (name, value) =
                        t.split_once('=').ok_or_else(|| Error::Parse(format!("target: expected name=value in {t:?}")))?;
                    Some((p.index_of(name.trim())?, scalar(&p, value, "target")?))
                }
                None => None,
            };
            let ext = extend_derivation(&p, &forms, &DerivationAssignment { values }, target)?;
            let mut rec = ExtendRecord { result: String::new(), dimension: None, assignment: None, row: None, reason: None };
            let code = match &ext {
                Extension::Unique(a) => {
                    rec.result = "unique".into();
                    rec.dimension = Some(0);
                    rec.assignment = Some(assignment_pairs(&p, a));
                    0
                }
                Extension::Family { dimension, particular } => {
                    rec.result = "family".into();
                    rec.dimension = Some(*dimension);
                    rec.assignment = Some(assignment_pairs(&p, particular));
                    0
                }
                Extension::Inconsistent { row, label } => {
                    rec.result = "inconsistent".into();
                    rec.row = Some(*row);
                    rec.reason = Some(label.clone());
                    1
                }
            };
            emit(c, code, &rec)
        }
        DerivCmd::Hcl { presentation, generator } => {
            let (p, specs) = load(presentation)?;
            let forms = f_forms(&p, &specs)?;
            let rec = match hcl_witness(&p, &forms, p.index_of(generator)?)? {
                HclResult::InClosure => HclRecord { generator: generator.clone(), in_closure: true, witness: None },
                HclResult::Witness(a) => {
                    HclRecord { generator: generator.clone(), in_closure: false, witness: Some(assignment_pairs(&p, &a)) }
                }
            };
            emit(c, 0, &rec)
        }
    }
}

/// `2^-k` or a decimal.
pub fn parse_eps(text: &str) -> Result<Float> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("2^-") {
        let k: u32 = k.parse().map_err(|_| Error::Parse(format!("eps: bad exponent in {t:?}")))?;
        return Ok(Float::with_val(RAD_PREC, 1) >> k);
    }
    let v = Float::parse(t).map_err(|_| Error::Parse(format!("eps: bad value {t:?}")))?;
    let v = Float::with_val(RAD_PREC, v);
    if v <= 0 {
        return Err(Error::Parse("eps: must be positive".into()));
    }
    Ok(v)
}

fn count_cmd(c: &Common, args: &CountArgs) -> Result<Reply> {
    let p = c.precision;
    let target = match args.target.as_str() {
        "identity" => {
            let domain = args.domain.as_deref().map_or(Ok(Domain::positive()), Domain::parse)?;
            TargetFunction { descriptor: Descriptor::Identity, domain }
        }
        "exp-wp-log" => {
            let domain = Domain::parse(args.domain.as_deref().unwrap_or("(6/5, 23/10)"))?;
            TargetFunction::exp_wp_log(parse_value(&args.tau, p)?, domain)
        }
        other => return Err(Error::Parse(format!("target: unknown target {other:?}"))),
    };
    let heights = args
        .heights
        .split(',')
        .map(|h| h.trim().parse::<u64>().map_err(|_| Error::Parse(format!("heights: bad height {h:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let eps = args.eps.as_deref().map_or_else(|| Ok(default_eps(p)), parse_eps)?;
    let report = count_report(&target, &heights, &eps, p)?;
    let rec = CountRecord::from(&report);
    match c.format {
        Format::Text => Ok((0, rec.table())),
        Format::Record => emit(c, 0, &rec),
    }
}

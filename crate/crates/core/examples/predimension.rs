//! Predimension on a small configuration and the replayed independence
//! certificate for one exp slot and one ℘ slot.
//!
//!     cargo run --example predimension

use isr_workbench::predim::{
    chain_decompose, check_semimodularity, independence_certificate, is_strong, predim_dim, strong_hull,
    worked_example,
};

fn main() -> isr_workbench::Result<()> {
    let w = worked_example();
    let cfg = &w.cfg;
    let all_slots = cfg.all_slots();
    println!("coordinates: {}", cfg.render(cfg.all()));

    for set in ["u,eu", "a,u,eu", "u,eu,v,pv", "a,fa,u,eu,v,pv"] {
        let s = cfg.subset(set)?;
        let r = cfg.delta(all_slots, s, 0);
        println!("delta({}) = {} - {} = {}", cfg.render(s), r.td, r.grk_total, r.delta);
    }

    let eu = cfg.subset("eu")?;
    println!("\n{} strong: {}", cfg.render(eu), is_strong(cfg, eu, all_slots)?.strong);
    println!("hull of {} = {}", cfg.render(eu), cfg.render(strong_hull(cfg, eu, all_slots)?));
    let d = predim_dim(cfg, cfg.subset("a")?, 0, all_slots)?;
    println!("dim(a) = {} realized by {}", d.dim, cfg.render(d.witness));

    let chain = chain_decompose(cfg, 0, cfg.all(), all_slots)?;
    for step in &chain.steps {
        println!("  {:<24} {:?} delta {}", cfg.render(step.subset), step.tag, step.delta);
    }
    println!("chain total {} = delta(all) {}", chain.total_delta(), cfg.delta_value(all_slots, cfg.all(), 0));

    let (a, b) = (cfg.subset("a,u,eu")?, cfg.subset("u,eu,v,pv")?);
    let lemma = check_semimodularity(cfg, a, b, cfg.subset("u")?, all_slots)?;
    println!("\nsemimodularity at (A, B, C = u): all hold = {}", lemma.all_hold());

    let cert = independence_certificate(cfg, w.f1, w.f2, w.a, w.fa, w.c)?;
    println!("\ncertificate: d = {:?}, hypotheses {:?}, certified = {}", cert.d, cert.hypotheses, cert.certified);
    for c in &cert.checks {
        println!("  [{}] {:<52} {} <= {}", if c.holds { "ok" } else { "!!" }, c.name, c.lhs, c.rhs);
    }
    Ok(())
}

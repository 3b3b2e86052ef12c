use std::sync::Arc;

use ibig::IBig;
use roelab::cohomology::{hax, StabilizationReport, Tower, WindowSchedule};
use roelab::complex::{Backend, CochainBasis, DEFAULT_DEGREE_CAP};
use roelab::pairing::{crossing_cochain, fundamental_chain_line, pair_classes};
use roelab::rips::{q_shadow, ShadowSchedule};
use roelab::space::{make_window, AmbientSpec};
use serde::Serialize;

use crate::args::Common;
use crate::input::{default_core, resolve, SpaceInput};
use crate::output::{emit, Outcome};

pub fn space(common: &Common) -> Result<SpaceInput, String> {
    let name = common.space.as_deref().ok_or("--space is required for this command")?;
    resolve(name)
}

fn cores(common: &Common, input: &SpaceInput) -> Vec<u32> {
    common.cores.clone().unwrap_or_else(|| {
        let r = input.core_radius.unwrap_or_else(|| default_core(&input.spec));
        let start = r.saturating_sub(3);
        (start..start + 4).collect()
    })
}

pub fn schedule(common: &Common, input: &SpaceInput, backend: Backend) -> WindowSchedule {
    let k_max = *common.scales.end();
    let padding = common.padding.or(input.padding).unwrap_or(k_max * (DEFAULT_DEGREE_CAP as u32 + 2));
    let mut s = WindowSchedule::new(cores(common, input), padding).with_backend(backend);
    if let Some(m) = common.margin {
        s = s.with_margin(m);
    }
    s
}

#[derive(Serialize)]
struct Row<'a> {
    backend: &'a str,
    degree: usize,
    scale: u32,
    window: usize,
    core_radius: u32,
    rank: usize,
    torsion: String,
    stabilized: bool,
}

fn tower_rows<'a>(backend: &'a str, towers: &[Tower], out: &mut Vec<Row<'a>>) {
    for t in towers {
        for (i, e) in t.entries.iter().enumerate() {
            out.push(Row {
                backend,
                degree: t.degree,
                scale: e.scale,
                window: e.window_index,
                core_radius: e.core_radius,
                rank: e.group.rank,
                torsion: e.group.torsion.iter().map(IBig::to_string).collect::<Vec<_>>().join(";"),
                stabilized: t.stabilized_at.is_some_and(|s| i >= s),
            });
        }
    }
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::OrderedNormalized => "ordered",
        Backend::Alternating => "alternating",
    }
}

pub fn cohomology(common: &Common) -> Result<Outcome, String> {
    let input = space(common)?;
    let (scales, degrees) = (common.scale_list(), common.degree_list());
    let mut reports: Vec<(Backend, StabilizationReport)> = Vec::new();
    for b in common.backend.backends() {
        let r = hax(&input.spec, &degrees, &scales, &schedule(common, &input, b)).map_err(|e| e.to_string())?;
        reports.push((b, r));
    }
    let mut rows = Vec::new();
    let mut outcome = Outcome::Pass;
    for (b, r) in &reports {
        for d in &r.degrees {
            tower_rows(backend_name(*b), &d.window_towers, &mut rows);
            let flag = if d.stabilized { "stabilized" } else { "not stabilized" };
            eprintln!("{b}: H^{} = {} ({flag})", d.degree, d.group);
        }
        if !r.all_stabilized() {
            outcome = outcome.max(Outcome::Unstable);
        }
    }
    if let [(_, a), (_, b)] = reports.as_slice() {
        if degrees.iter().any(|&n| a.group(n) != b.group(n)) {
            eprintln!("FAIL: the two backends disagree");
            outcome = Outcome::Fail;
        }
    }
    emit(common.out.as_deref(), &csv_bytes(&rows)?)?;
    Ok(outcome)
}

pub fn rips_shadow(common: &Common) -> Result<Outcome, String> {
    let input = space(common)?;
    let (scales, degrees) = (common.scale_list(), common.degree_list());
    let k_max = *common.scales.end();
    let padding = common.padding.or(input.padding).unwrap_or(4 * k_max);
    let mut sched = ShadowSchedule::new(cores(common, &input), padding);
    if let Some(b) = common.budget {
        sched = sched.with_budget(b);
    }
    let r = q_shadow(&input.spec, &degrees, &scales, &sched).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for d in &r.degrees {
        tower_rows("alternating", &d.radius_towers, &mut rows);
        let flag = if d.stabilized { "stabilized" } else { "not stabilized" };
        eprintln!("shadow H^{} = {} ({flag})", d.degree, d.group);
    }
    emit(common.out.as_deref(), &csv_bytes(&rows)?)?;
    Ok(if r.all_stabilized() { Outcome::Pass } else { Outcome::Unstable })
}

#[derive(Serialize)]
struct PairReport {
    seed: u64,
    backend: String,
    scale: u32,
    edge: [i64; 2],
    value: String,
    audited: Vec<String>,
    invariant: bool,
}

pub fn pair(common: &Common, at: i64, rounds: usize) -> Result<Outcome, String> {
    let input = space(common)?;
    if input.spec != AmbientSpec::grid(1) {
        return Err("pair supports the line (kind grid, d = 1) only".into());
    }
    let k = *common.scales.start();
    let core = common.cores.as_ref().and_then(|c| c.last().copied()).or(input.core_radius).unwrap_or(4);
    let core = core.max(at.unsigned_abs() as u32 + 1);
    let padding = common.padding.or(input.padding).unwrap_or(2 * k + 2);
    let w = Arc::new(make_window(&input.spec, core, padding).map_err(|e| e.to_string())?);
    let mut reports = Vec::new();
    for backend in common.backend.backends() {
        let b1 = CochainBasis::enumerate(&w, k, 1, &w.full_mask(), backend).map_err(|e| e.to_string())?;
        let c = fundamental_chain_line(&b1);
        let phi = crossing_cochain(&w, at, k, backend).map_err(|e| e.to_string())?;
        let out = pair_classes(&w, &phi, &c, rounds, common.seed).map_err(|e| e.to_string())?;
        let invariant = out.audited.iter().all(|v| *v == out.value);
        eprintln!("{backend}: <crossing, fundamental> = {} (audit {})", out.value, if invariant { "ok" } else { "FAILED" });
        reports.push(PairReport {
            seed: common.seed,
            backend: backend.to_string(),
            scale: k,
            edge: [at, at + 1],
            value: out.value.to_string(),
            audited: out.audited.iter().map(IBig::to_string).collect(),
            invariant,
        });
    }
    let ok = reports.iter().all(|r| r.invariant);
    let text = serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?;
    emit(common.out.as_deref(), format!("{text}\n").as_bytes())?;
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

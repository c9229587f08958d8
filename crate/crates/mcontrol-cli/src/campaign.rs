//! Differential campaign: every registry case, direct solver against the
//! oracle, over enumerated or sampled instances.

use crate::doc::{instance_to_doc, InstanceDoc};
use crate::gen::{for_each_exhaustive, random_instance, Bounds};
use mcontrol::oracle::solve_oracle;
use mcontrol::solvers::{registry, solve_direct};
use mcontrol::{ControlType, Error, Instance, Mode, Rule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

const CHUNK: usize = 2048;

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub rules: Vec<Rule>,
    pub types: Vec<ControlType>,
    pub modes: Vec<Mode>,
    pub bounds: Bounds,
    pub seed: u64,
    /// Sampled instances per case when not exhaustive.
    pub count: usize,
    pub exhaustive: bool,
    pub budget: u128,
    /// Mismatch documents kept in the report; all are counted.
    pub max_reported: usize,
    /// Negates every direct answer, to check that the campaign notices.
    pub inject_fault: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub rule: String,
    #[serde(rename = "type")]
    pub ctype: String,
    pub mode: String,
    pub tag: String,
    pub instances: u64,
    pub yes: u64,
    pub no: u64,
    pub mismatches: u64,
    /// Instances the oracle could not decide within budget.
    pub over_budget: u64,
    /// Instances the direct solver refused or failed on.
    pub direct_errors: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub rule: String,
    #[serde(rename = "type")]
    pub ctype: String,
    pub mode: String,
    /// Position of the instance in the case's generation order.
    pub index: u64,
    pub direct: bool,
    pub oracle: bool,
    pub instance: InstanceDoc,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub format_version: u32,
    pub seed: u64,
    pub bounds: String,
    pub exhaustive: bool,
    pub budget: String,
    pub inject_fault: bool,
    pub cases: Vec<CaseReport>,
    pub total_instances: u64,
    pub total_mismatches: u64,
    pub mismatches: Vec<Mismatch>,
    pub incomplete: bool,
    /// Wall-clock time; the only nondeterministic field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

enum Verdict {
    Agree(bool),
    Disagree { direct: bool, oracle: bool },
    OverBudget,
    DirectError,
}

fn judge(inst: &Instance, budget: u128, inject_fault: bool) -> Verdict {
    let oracle = match solve_oracle(inst, budget) {
        Ok(o) => o.answer,
        Err(Error::Budget { .. }) => return Verdict::OverBudget,
        Err(_) => return Verdict::DirectError,
    };
    match solve_direct(inst) {
        Ok(d) => {
            let direct = d.answer != inject_fault;
            if direct == oracle {
                Verdict::Agree(oracle)
            } else {
                Verdict::Disagree { direct, oracle }
            }
        }
        Err(_) => Verdict::DirectError,
    }
}

pub fn run_campaign(cfg: &CampaignConfig) -> CampaignReport {
    let start = Instant::now();
    let mut cases = Vec::new();
    let mut mismatches = Vec::new();
    let selected = registry()
        .into_iter()
        .filter(|(r, t, s, _)| cfg.rules.contains(r) && cfg.types.contains(t) && cfg.modes.contains(&s.mode));
    for (case_no, (rule, ctype, scenario, tag)) in selected.enumerate() {
        let mut rep = CaseReport {
            rule: rule.id().into(),
            ctype: ctype.code(),
            mode: scenario.mode.id().into(),
            tag: tag.id().into(),
            instances: 0,
            yes: 0,
            no: 0,
            mismatches: 0,
            over_budget: 0,
            direct_errors: 0,
        };
        let mut chunk: Vec<Instance> = Vec::with_capacity(CHUNK);
        let flush = |chunk: &mut Vec<Instance>, rep: &mut CaseReport, mismatches: &mut Vec<Mismatch>| {
            let verdicts: Vec<Verdict> = chunk.par_iter().map(|i| judge(i, cfg.budget, cfg.inject_fault)).collect();
            for (inst, v) in chunk.iter().zip(verdicts) {
                let index = rep.instances;
                rep.instances += 1;
                match v {
                    Verdict::Agree(true) => rep.yes += 1,
                    Verdict::Agree(false) => rep.no += 1,
                    Verdict::OverBudget => rep.over_budget += 1,
                    Verdict::DirectError => rep.direct_errors += 1,
                    Verdict::Disagree { direct, oracle } => {
                        rep.mismatches += 1;
                        if mismatches.len() < cfg.max_reported {
                            mismatches.push(Mismatch {
                                rule: rep.rule.clone(),
                                ctype: rep.ctype.clone(),
                                mode: rep.mode.clone(),
                                index,
                                direct,
                                oracle,
                                instance: instance_to_doc(inst),
                            });
                        }
                    }
                }
            }
            chunk.clear();
        };
        if cfg.exhaustive {
            for_each_exhaustive(rule, ctype, scenario.mode, &cfg.bounds, &mut |inst| {
                chunk.push(inst);
                if chunk.len() == CHUNK {
                    flush(&mut chunk, &mut rep, &mut mismatches);
                }
            });
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(case_no as u64);
            for _ in 0..cfg.count {
                match random_instance(&mut rng, rule, ctype, scenario.mode, &cfg.bounds) {
                    Some(inst) => chunk.push(inst),
                    None => break,
                }
                if chunk.len() == CHUNK {
                    flush(&mut chunk, &mut rep, &mut mismatches);
                }
            }
        }
        flush(&mut chunk, &mut rep, &mut mismatches);
        cases.push(rep);
    }
    let total_instances = cases.iter().map(|c| c.instances).sum();
    let total_mismatches = cases.iter().map(|c| c.mismatches).sum();
    let incomplete = cases.iter().any(|c| c.over_budget > 0 || c.direct_errors > 0);
    CampaignReport {
        format_version: crate::doc::FORMAT_VERSION,
        seed: cfg.seed,
        bounds: cfg.bounds.to_string(),
        exhaustive: cfg.exhaustive,
        budget: cfg.budget.to_string(),
        inject_fault: cfg.inject_fault,
        cases,
        total_instances,
        total_mismatches,
        mismatches,
        incomplete,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    }
}

impl CampaignReport {
    pub fn without_timings(mut self) -> CampaignReport {
        self.elapsed_ms = None;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!(
                "{:<10} {:<9} {:<3} {:<11} instances={} yes={} no={} mismatches={} over_budget={} direct_errors={}\n",
                c.rule, c.ctype, c.mode, c.tag, c.instances, c.yes, c.no, c.mismatches, c.over_budget, c.direct_errors
            ));
        }
        for m in &self.mismatches {
            out.push_str(&format!(
                "MISMATCH {} {} {} #{}: direct={} oracle={}\n",
                m.rule, m.ctype, m.mode, m.index, m.direct, m.oracle
            ));
        }
        out.push_str(&format!(
            "total instances={} mismatches={} incomplete={}\n",
            self.total_instances, self.total_mismatches, self.incomplete
        ));
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("elapsed_ms={ms}\n"));
        }
        out
    }
}

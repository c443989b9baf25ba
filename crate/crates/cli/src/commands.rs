use std::collections::BTreeMap;
use std::process::ExitCode;

use ideal_angles::angles::{compute_angles, AngleRec};
use ideal_angles::cocycle::{
    measure_transport, sample, window_check, Coord, ProductSpaceCfg, TMap,
};
use ideal_angles::equidist::{
    box_count, weyl_sum, window_count, BoxSpec, DEFAULT_CHECKPOINTS,
};
use ideal_angles::field::AlgElem;
use ideal_angles::function_field::{class_counts, nongeometric_image, Fq, PolyFq};
use ideal_angles::generator::{canonical_generator, verify_generator, GeneratorRec};
use ideal_angles::golden::verify_cubic;
use ideal_angles::primes::{enumerate_prime_ideals, PrimeIdealRec};
use ideal_angles::ratio::{
    build_pairs, expected_block_size, in_difference_window, norm_ratio_bounds, verify_witness,
    RatioParams,
};
use ideal_angles::torus::{AngleTorus, TorusPoint};
use ideal_angles::{Error, Result};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{
    csv_err, fmt_point, join, load_field, read_angles, read_ideal_rows, read_pairs,
    resolve_ideal, write_manifest, AngleRow, LoadedField, Output,
};
use crate::{
    AnglesArgs, BoxesArgs, CocycleArgs, FfcountArgs, GeneratorsArgs, GoldenArgs, PrimesArgs,
    RatiosetArgs, StreamArgs, WeylArgs, WindowArgs,
};

type Inputs = BTreeMap<String, String>;

fn params<T: Serialize>(args: &T) -> Result<BTreeMap<String, Value>> {
    match serde_json::to_value(args)? {
        Value::Object(m) => Ok(m.into_iter().collect()),
        _ => Ok(BTreeMap::new()),
    }
}

fn finish<T: Serialize>(
    out: Output,
    subcommand: &str,
    args: &T,
    inputs: &Inputs,
    summary: Value,
) -> Result<()> {
    if let Some((path, sha)) = out.finish()? {
        write_manifest(&path, subcommand, &params(args)?, inputs, &sha, summary)?;
    }
    Ok(())
}

fn angle_header(dim: usize) -> Vec<String> {
    let mut h = vec!["norm".to_string(), "p".into(), "root".into()];
    h.extend((1..=dim).map(|j| format!("t{j}")));
    h
}

pub fn primes(a: &PrimesArgs) -> Result<ExitCode> {
    let f = load_field(&a.field.field)?;
    let ideals = enumerate_prime_ideals(&f.spec, a.max_norm);
    let mut out = Output::new(&a.out);
    {
        let mut w = out.csv();
        w.write_record(["norm", "p", "root", "res_degree", "multiplicity", "ramified"])
            .map_err(csv_err)?;
        for i in &ideals {
            w.write_record([
                i.norm.to_string(),
                i.p.to_string(),
                i.label(),
                i.res_degree.to_string(),
                i.multiplicity.to_string(),
                i.ramified.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    let inputs = Inputs::from([(f.source.clone(), f.sha256.clone())]);
    finish(out, "primes", a, &inputs, json!({ "count": ideals.len() }))?;
    Ok(ExitCode::SUCCESS)
}

fn ideals_from(
    f: &LoadedField,
    file: Option<&str>,
    max_norm: Option<u64>,
    inputs: &mut Inputs,
) -> Result<Vec<(PrimeIdealRec, Vec<String>)>> {
    match (file, max_norm) {
        (Some(path), _) => {
            let (rows, _, sha) = read_ideal_rows(path)?;
            inputs.insert(path.to_string(), sha);
            rows.into_par_iter()
                .map(|(p, root, rest)| Ok((resolve_ideal(&f.spec, p, &root)?, rest)))
                .collect()
        }
        (None, Some(x)) => Ok(enumerate_prime_ideals(&f.spec, x)
            .into_iter()
            .map(|i| (i, Vec::new()))
            .collect()),
        (None, None) => Err(Error::ParamViolation(
            "give an input CSV or --max-norm".into(),
        )),
    }
}

pub fn generators(a: &GeneratorsArgs) -> Result<ExitCode> {
    let f = load_field(&a.field.field)?;
    let torus = AngleTorus::build(&f.spec)?;
    let mut inputs = Inputs::from([(f.source.clone(), f.sha256.clone())]);
    let ideals = ideals_from(&f, a.primes.as_deref(), a.max_norm, &mut inputs)?;
    let gens: Vec<GeneratorRec> = ideals
        .into_par_iter()
        .map(|(i, _)| canonical_generator(&torus, &i))
        .collect::<Result<_>>()?;
    let mut out = Output::new(&a.out);
    {
        let mut w = out.csv();
        w.write_record(["norm", "p", "root", "alpha"]).map_err(csv_err)?;
        for g in &gens {
            w.write_record([
                g.ideal.norm.to_string(),
                g.ideal.p.to_string(),
                g.ideal.label(),
                g.alpha.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    finish(out, "generators", a, &inputs, json!({ "count": gens.len() }))?;
    Ok(ExitCode::SUCCESS)
}

pub fn angles(a: &AnglesArgs) -> Result<ExitCode> {
    let f = load_field(&a.field.field)?;
    let torus = AngleTorus::build(&f.spec)?;
    let mut inputs = Inputs::from([(f.source.clone(), f.sha256.clone())]);
    let recs: Vec<AngleRec> = match &a.generators {
        Some(path) => {
            let rows = ideals_from(&f, Some(path), None, &mut inputs)?;
            rows.into_par_iter()
                .map(|(ideal, rest)| {
                    let cell = rest
                        .first()
                        .ok_or_else(|| Error::Parse("missing alpha column".into()))?;
                    let alpha = AlgElem::parse(cell)?;
                    if !verify_generator(&f.spec, &ideal, &alpha) {
                        return Err(Error::Parse(format!(
                            "{alpha} does not generate the prime {}:{}",
                            ideal.p,
                            ideal.label()
                        )));
                    }
                    let point = torus.rho_of_generator(&alpha)?;
                    Ok(AngleRec {
                        ideal,
                        alpha,
                        point,
                    })
                })
                .collect::<Result<_>>()?
        }
        None => {
            let x = a.max_norm.ok_or_else(|| {
                Error::ParamViolation("give --generators or --max-norm".into())
            })?;
            compute_angles(&torus, x)?
        }
    };
    let mut out = Output::new(&a.out);
    {
        let mut w = out.csv();
        w.write_record(angle_header(torus.dim())).map_err(csv_err)?;
        for r in &recs {
            let mut row = vec![r.ideal.norm.to_string(), r.ideal.p.to_string(), r.ideal.label()];
            row.extend(fmt_point(&r.point));
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    finish(out, "angles", a, &inputs, json!({ "count": recs.len() }))?;
    Ok(ExitCode::SUCCESS)
}

/// The angle stream of a stage: read from CSV or computed in place.
struct Stream {
    rows: Vec<AngleRow>,
    ideals: Option<Vec<PrimeIdealRec>>,
    field: Option<LoadedField>,
    bound: u64,
    dim: usize,
    inputs: Inputs,
}

impl Stream {
    fn iter(&self) -> impl Iterator<Item = (u64, &TorusPoint)> + Clone {
        self.rows.iter().map(|r| (r.norm, &r.point))
    }

    fn ideals(&mut self) -> Result<&[PrimeIdealRec]> {
        if self.ideals.is_none() {
            let f = self.field.as_ref().ok_or_else(|| {
                Error::ParamViolation("this stage needs --field to identify primes".into())
            })?;
            let ids = self
                .rows
                .par_iter()
                .map(|r| resolve_ideal(&f.spec, r.p, &r.root))
                .collect::<Result<Vec<_>>>()?;
            self.ideals = Some(ids);
        }
        Ok(self.ideals.as_deref().unwrap())
    }

    fn checkpoints(&self, given: &Option<Vec<u64>>) -> Vec<u64> {
        match given {
            Some(v) => v.clone(),
            None => {
                let mut v: Vec<u64> = DEFAULT_CHECKPOINTS
                    .iter()
                    .copied()
                    .filter(|&x| x <= self.bound)
                    .collect();
                if v.is_empty() {
                    v.push(self.bound);
                }
                v
            }
        }
    }
}

fn load_stream(s: &StreamArgs) -> Result<Stream> {
    let field = s.field.as_deref().map(load_field).transpose()?;
    let mut inputs = Inputs::new();
    if let Some(f) = &field {
        inputs.insert(f.source.clone(), f.sha256.clone());
    }
    match &s.angles {
        Some(path) => {
            let (mut rows, sha) = read_angles(path)?;
            inputs.insert(path.clone(), sha);
            if let Some(x) = s.max_norm {
                rows.retain(|r| r.norm <= x);
            }
            let bound = s
                .max_norm
                .unwrap_or_else(|| rows.last().map_or(0, |r| r.norm));
            let dim = rows.first().map_or(0, |r| r.point.dim());
            Ok(Stream {
                rows,
                ideals: None,
                field,
                bound,
                dim,
                inputs,
            })
        }
        None => {
            let (f, x) = match (&field, s.max_norm) {
                (Some(f), Some(x)) => (f, x),
                _ => {
                    return Err(Error::ParamViolation(
                        "give --angles, or --field with --max-norm".into(),
                    ))
                }
            };
            let torus = AngleTorus::build(&f.spec)?;
            let recs = compute_angles(&torus, x)?;
            let rows = recs
                .iter()
                .map(|r| AngleRow {
                    norm: r.ideal.norm,
                    p: r.ideal.p,
                    root: r.ideal.label(),
                    point: r.point.clone(),
                })
                .collect();
            Ok(Stream {
                rows,
                ideals: Some(recs.into_iter().map(|r| r.ideal).collect()),
                field,
                bound: x,
                dim: torus.dim(),
                inputs,
            })
        }
    }
}

pub fn weyl(a: &WeylArgs) -> Result<ExitCode> {
    let s = load_stream(&a.stream)?;
    let cps = s.checkpoints(&a.checkpoints);
    let mut out = Output::new(&a.out);
    let mut summary = Vec::new();
    {
        let mut w = out.csv();
        w.write_record(["k", "x", "count", "sum_re", "sum_im", "normalized"])
            .map_err(csv_err)?;
        for k in &a.k {
            if k.len() != s.dim {
                return Err(Error::ParamViolation(format!(
                    "character index has {} entries, torus has dimension {}",
                    k.len(),
                    s.dim
                )));
            }
            let r = weyl_sum(k, s.iter(), &cps);
            for c in &r.checkpoints {
                w.write_record([
                    join(k),
                    c.x.to_string(),
                    c.count.to_string(),
                    c.sum.re.to_string(),
                    c.sum.im.to_string(),
                    c.normalized.to_string(),
                ])
                .map_err(csv_err)?;
            }
            summary.push(json!({ "k": k, "strictly_decreasing": r.strictly_decreasing() }));
        }
        w.flush()?;
    }
    finish(out, "weyl", a, &s.inputs, json!(summary))?;
    Ok(ExitCode::SUCCESS)
}

fn box_label(b: &BoxSpec) -> (String, String) {
    (join(&b.lo), join(&b.hi))
}

pub fn boxes(a: &BoxesArgs) -> Result<ExitCode> {
    let s = load_stream(&a.stream)?;
    let mut specs: Vec<BoxSpec> = a
        .boxes
        .iter()
        .map(|b| BoxSpec::parse(b))
        .collect::<Result<_>>()?;
    if let Some(g) = a.grid {
        if g == 0 {
            return Err(Error::ParamViolation("--grid must be positive".into()));
        }
        specs.extend(BoxSpec::grid(s.dim, g));
    }
    if specs.is_empty() {
        specs.extend(BoxSpec::grid(s.dim, 4));
    }
    if specs.iter().any(|b| b.dim() != s.dim) {
        return Err(Error::ParamViolation("box dimension differs from the torus".into()));
    }
    let cps = s.checkpoints(&a.checkpoints);
    let mut out = Output::new(&a.out);
    let mut max_dev = BTreeMap::new();
    {
        let mut w = out.csv();
        w.write_record([
            "cell",
            "lo",
            "hi",
            "x",
            "count",
            "total",
            "measure",
            "expected",
            "expected_li",
            "expected_x_log",
            "deviation",
            "frequency",
        ])
        .map_err(csv_err)?;
        for &x in &cps {
            let mut worst: f64 = 0.0;
            for (i, b) in specs.iter().enumerate() {
                let c = box_count(b, s.iter(), x);
                worst = worst.max((c.frequency() - c.measure).abs());
                let (lo, hi) = box_label(b);
                w.write_record([
                    i.to_string(),
                    lo,
                    hi,
                    x.to_string(),
                    c.count.to_string(),
                    c.total.to_string(),
                    c.measure.to_string(),
                    c.expected.to_string(),
                    c.expected_li.to_string(),
                    c.expected_x_log.to_string(),
                    c.deviation.to_string(),
                    c.frequency().to_string(),
                ])
                .map_err(csv_err)?;
            }
            max_dev.insert(x.to_string(), worst);
        }
        w.flush()?;
    }
    finish(out, "boxes", a, &s.inputs, json!({ "max_abs_freq_deviation": max_dev }))?;
    Ok(ExitCode::SUCCESS)
}

pub fn window(a: &WindowArgs) -> Result<ExitCode> {
    let s = load_stream(&a.stream)?;
    let b = match &a.bx {
        Some(t) => BoxSpec::parse(t)?,
        None => BoxSpec::full(s.dim),
    };
    let r = window_count(&b, a.delta, a.x as f64, s.iter())?;
    let mut out = Output::new(&a.out);
    {
        let mut w = out.csv();
        w.write_record(["lo", "hi", "x", "delta", "count", "predicted", "predicted_li"])
            .map_err(csv_err)?;
        let (lo, hi) = box_label(&b);
        w.write_record([
            lo,
            hi,
            a.x.to_string(),
            a.delta.to_string(),
            r.count.to_string(),
            r.predicted.to_string(),
            r.predicted_li.to_string(),
        ])
        .map_err(csv_err)?;
        w.flush()?;
    }
    finish(out, "window", a, &s.inputs, json!({ "count": r.count }))?;
    Ok(ExitCode::SUCCESS)
}

pub fn ratioset(a: &RatiosetArgs) -> Result<ExitCode> {
    let mut s = load_stream(&a.stream)?;
    let max_norm = a
        .stream
        .max_norm
        .ok_or_else(|| Error::ParamViolation("ratioset needs --max-norm".into()))?;
    let params = RatioParams {
        x0: a.x0,
        y0: TorusPoint::new(a.y0.clone()),
        eps: a.eps,
        delta: a.delta,
        v: BoxSpec::parse(&a.bx)?,
        max_norm,
    };
    params.validate()?;
    let points: Vec<TorusPoint> = s.rows.iter().map(|r| r.point.clone()).collect();
    let ideals = s.ideals()?;
    let wit = build_pairs(&params, ideals.iter().zip(&points))?;
    let verdict = verify_witness(&wit)?;
    let dim = params.y0.dim();
    let mut out = Output::new(&a.out);
    {
        let mut w = out.csv();
        let mut header = vec!["n".to_string(), "k".into(), "p_norm".into(), "p".into(), "p_root".into()];
        header.extend((1..=dim).map(|j| format!("p_t{j}")));
        header.extend(["q_norm".to_string(), "q".into(), "q_root".into()]);
        header.extend((1..=dim).map(|j| format!("q_t{j}")));
        header.extend(["ratio".to_string(), "harmonic_partial".into()]);
        w.write_record(&header).map_err(csv_err)?;
        for (n, (pr, h)) in wit.pairs.iter().zip(&wit.harmonic_partial).enumerate() {
            let mut row = vec![
                (n + 1).to_string(),
                pr.k.to_string(),
                pr.p.norm.to_string(),
                pr.p.p.to_string(),
                pr.p.label(),
            ];
            row.extend(fmt_point(&pr.rho_p));
            row.extend([pr.q.norm.to_string(), pr.q.p.to_string(), pr.q.label()]);
            row.extend(fmt_point(&pr.rho_q));
            row.extend([format!("{:.9}", pr.ratio()), format!("{h:.12}")]);
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    let blocks: Vec<Value> = wit
        .blocks
        .iter()
        .map(|b| {
            json!({
                "n": b.n,
                "lower": b.lower.to_string(),
                "upper": b.upper.to_string(),
                "size": b.len(),
                "expected": if b.n == 0 { Value::Null } else { json!(expected_block_size(&params, b.n)) },
            })
        })
        .collect();
    let summary = json!({
        "k0": wit.k0,
        "empty_witness": wit.is_empty_witness(),
        "pairs": wit.pairs.len(),
        "blocks": blocks,
        "harmonic": {
            "sum": wit.harmonic.sum_f64(),
            "lower_bound": wit.harmonic.lower_bound_f64(),
            "lower_bound_exact": wit.harmonic.lower_bound.to_string(),
            "holds_exactly": wit.harmonic.holds(),
        },
        "verify": {
            "ratio_failures": verdict.ratio_failures.len(),
            "angle_failures": verdict.angle_failures.len(),
            "alignment_failures": verdict.alignment_failures.len(),
            "blocks_disjoint": verdict.blocks_disjoint,
            "pairing_monotone": verdict.pairing_monotone,
        },
    });
    if a.out != "-" {
        eprintln!(
            "{} pairs, k0 = {:?}, checker {}",
            wit.pairs.len(),
            wit.k0,
            if verdict.all_pass() { "passed" } else { "FAILED" }
        );
    }
    finish(out, "ratioset", a, &s.inputs, summary)?;
    Ok(if verdict.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn cocycle_sim(a: &CocycleArgs) -> Result<ExitCode> {
    let (pairs, dim, sha) = read_pairs(&a.pairs)?;
    let mut inputs = Inputs::from([(a.pairs.clone(), sha)]);
    if let Some(f) = &a.field {
        { let lf = load_field(f)?; inputs.insert(lf.source, lf.sha256); };
    }
    let v = BoxSpec::parse(&a.bx)?;
    let y0 = TorusPoint::new(a.y0.clone());
    if v.dim() != dim || y0.dim() != dim {
        return Err(Error::ParamViolation("box or y0 dimension differs from the pairs".into()));
    }
    let coords = pairs
        .iter()
        .flat_map(|r| {
            [
                (&r.p_label, r.p_norm, &r.rho_p),
                (&r.q_label, r.q_norm, &r.rho_q),
            ]
            .map(|(label, norm, rho)| Coord {
                label: label.clone(),
                norm,
                level: a.level,
                rho: Some(rho.clone()),
            })
        })
        .collect();
    let cfg = ProductSpaceCfg::new(coords)?;
    let tmap = TMap::pair_blocks(pairs.len(), &cfg)?;
    let xs = sample(&cfg, a.seed, a.samples as usize);
    let (s, t) = norm_ratio_bounds(pairs.iter().map(|r| (r.p_norm, r.q_norm)))
        .ok_or_else(|| Error::ParamViolation("pairs file is empty".into()))?;
    let report = window_check(&tmap, &cfg, dim, &xs, &s, &t, |g| {
        in_difference_window(&v, &y0, g)
    })?;
    let rows = measure_transport(&tmap, &cfg, &xs)?;
    let mut out = Output::new(&a.out);
    let mut max_z: f64 = 0.0;
    {
        let mut w = out.csv();
        w.write_record([
            "block", "p", "q", "p_norm", "q_norm", "observed", "expected", "std_err", "z",
        ])
        .map_err(csv_err)?;
        for r in &rows {
            let pr = &pairs[r.block];
            max_z = max_z.max(r.z_score().abs());
            w.write_record([
                (r.block + 1).to_string(),
                pr.p_label.clone(),
                pr.q_label.clone(),
                pr.p_norm.to_string(),
                pr.q_norm.to_string(),
                r.observed.to_string(),
                r.expected.to_string(),
                r.std_err.to_string(),
                r.z_score().to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    let summary = json!({
        "samples": report.samples,
        "in_domain": report.in_domain,
        "inside_window": report.inside,
        "ratio_failures": report.ratio_failures,
        "angle_failures": report.angle_failures,
        "identity_failures": report.identity_failures,
        "s": s.to_string(),
        "t": t.to_string(),
        "s_f64": s.to_f64(),
        "t_f64": t.to_f64(),
        "max_abs_z": max_z,
    });
    finish(out, "cocycle-sim", a, &inputs, summary)?;
    Ok(if report.all_inside() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn ffcount(a: &FfcountArgs) -> Result<ExitCode> {
    let fq = Fq::new(a.q)?;
    let mut out = Output::new(&a.out);
    let summary = match a.m_const {
        Some(m) => {
            let r = nongeometric_image(a.q, m, a.max_deg)?;
            let mut w = out.csv();
            w.write_record(["n", "g", "in_gamma", "count", "predicted", "normalized"])
                .map_err(csv_err)?;
            for c in &r.cells {
                w.write_record([
                    c.n.to_string(),
                    c.g.to_string(),
                    c.in_gamma.to_string(),
                    c.count.to_string(),
                    c.predicted.to_string(),
                    c.normalized.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
            json!({
                "h": r.h.label(),
                "outside_gamma_total": r.outside_gamma_total(),
                "max_abs_normalized_in_gamma": r.max_normalized_in_gamma(),
            })
        }
        None => {
            let m = PolyFq::parse(&a.modulus, &fq)?;
            let r = class_counts(a.q, &m, a.max_deg)?;
            let mut w = out.csv();
            w.write_record([
                "n", "class", "count", "total", "necklace", "predicted", "residual", "normalized",
            ])
            .map_err(csv_err)?;
            for row in &r.rows {
                for (i, cls) in r.classes.iter().enumerate() {
                    w.write_record([
                        row.n.to_string(),
                        cls.label(),
                        row.counts[i].to_string(),
                        row.total.to_string(),
                        row.necklace.to_string(),
                        row.predicted.to_string(),
                        row.residuals[i].to_string(),
                        row.normalized[i].to_string(),
                    ])
                    .map_err(csv_err)?;
                }
                if row.excluded > 0 {
                    w.write_record([
                        row.n.to_string(),
                        "excluded".into(),
                        row.excluded.to_string(),
                        row.total.to_string(),
                        row.necklace.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ])
                    .map_err(csv_err)?;
                }
            }
            w.flush()?;
            json!({
                "modulus": r.modulus.label(),
                "phi": r.phi(),
                "row_sums_match_necklace": r.row_sums_match(),
                "max_abs_normalized": r.max_normalized(),
            })
        }
    };
    finish(out, "ffcount", a, &Inputs::new(), summary)?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify_golden(a: &GoldenArgs) -> Result<ExitCode> {
    let f = load_field(&a.field.field)?;
    let r = verify_cubic(&f.spec)?;
    println!(
        "theta {:.15} ({})",
        r.theta,
        if r.theta_matches() { "matches 1.3247" } else { "MISMATCH vs 1.3247" }
    );
    println!("phi {:.15}", r.phi);
    for row in &r.rows {
        println!("{} residual {:.3e}", row.name, row.residual());
    }
    println!("{}", if r.passes() { "ok" } else { "FAILED" });
    if let Some(path) = &a.out {
        let mut out = Output::new(path);
        {
            let mut w = out.csv();
            w.write_record(["vector", "computed", "closed_form", "residual"])
                .map_err(csv_err)?;
            for row in &r.rows {
                w.write_record([
                    row.name.to_string(),
                    join(&row.computed),
                    join(&row.closed_form),
                    row.residual().to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
        let inputs = Inputs::from([(f.source.clone(), f.sha256.clone())]);
        finish(out, "verify-golden", a, &inputs, json!({ "passes": r.passes() }))?;
    }
    Ok(if r.passes() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

//! Parameter sweeps over system families, witness search for
//! non-functional dependence between measures, and CSV emission.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{parity_system, random_system, SystemShape};
use crate::measures::{all_measures_with, MeasureConfig, MeasureReport};

/// System family a sweep draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Parity,
    Random,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Parity => "parity",
            Family::Random => "random",
        }
    }
}

/// Sweep parameters of one system: the eps vector (parity family) or the
/// generator seed (random family).
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Eps(Vec<f64>),
    Seed(u64),
}

/// One evaluated system: identity, parameters, and all measure scalars.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub system_id: String,
    pub family: Family,
    pub order: usize,
    pub rank: usize,
    pub params: Params,
    pub cnt1: f64,
    pub cnt2: f64,
    pub cnt2_by_level: Vec<f64>,
    pub level: Option<usize>,
    pub cnt3: f64,
    pub cntf: f64,
    pub contextual: bool,
}

impl SweepRecord {
    fn from_report(
        system_id: String,
        family: Family,
        shape: SystemShape,
        params: Params,
        r: MeasureReport,
    ) -> SweepRecord {
        SweepRecord {
            system_id,
            family,
            order: shape.order,
            rank: shape.rank,
            params,
            cnt1: r.cnt1,
            cnt2: r.cnt2,
            cnt2_by_level: r.cnt2_by_level,
            level: r.level,
            cnt3: r.cnt3,
            cntf: r.cntf,
            contextual: r.contextual,
        }
    }

    /// Look up a measure column by name (`cnt1`, `cnt2`, `cnt3`, `cntf`,
    /// or `cnt2_lM`).
    pub fn measure(&self, name: &str) -> Option<f64> {
        match name {
            "cnt1" => Some(self.cnt1),
            "cnt2" => Some(self.cnt2),
            "cnt3" => Some(self.cnt3),
            "cntf" => Some(self.cntf),
            _ => name
                .strip_prefix("cnt2_l")
                .and_then(|m| m.parse::<usize>().ok())
                .and_then(|m| self.cnt2_by_level.get(m.checked_sub(1)?).copied()),
        }
    }
}

/// How a parity sweep picks its eps vectors.
#[derive(Debug, Clone)]
pub enum ParityDesign {
    /// `count` eps vectors drawn uniformly from `[-2^-k, 2^-k]^n`.
    Random { count: usize, seed: u64 },
    /// Full grid over one or two eps coordinates, remaining coordinates
    /// fixed (defaults to zero).
    Grid {
        coords: Vec<usize>,
        points: usize,
        fixed: Vec<f64>,
    },
}

/// SplitMix64; documented fixed mixer for deriving per-system seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th system in a sweep seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The eps vector of the `index`-th system of a random parity sweep:
/// ChaCha12 seeded with [`derive_seed`], each coordinate `(2u − 1)·2^-k`.
pub fn parity_random_eps(seed: u64, index: u64, shape: SystemShape) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, index));
    let bound = 1.0 / (1u64 << shape.order) as f64;
    (0..shape.rank)
        .map(|_| {
            let u: f64 = rng.random();
            (2.0 * u - 1.0) * bound
        })
        .collect()
}

/// Evaluate all measures over a parity-family sweep.
pub fn sweep_parity(
    shape: SystemShape,
    design: &ParityDesign,
    cfg: &MeasureConfig,
) -> Result<Vec<SweepRecord>> {
    if shape.order < 2 {
        return Err(Error::Domain(
            "parity sweeps need order >= 2 (order 1 has no proper-subset structure)".into(),
        ));
    }
    let eps_list: Vec<(String, Vec<f64>)> = match design {
        ParityDesign::Random { count, seed } => (0..*count as u64)
            .map(|i| {
                (
                    format!("parity-{}-{}-s{seed}-{i:05}", shape.order, shape.rank),
                    parity_random_eps(*seed, i, shape),
                )
            })
            .collect(),
        ParityDesign::Grid {
            coords,
            points,
            fixed,
        } => {
            if coords.is_empty() || coords.len() > 2 {
                return Err(Error::Domain(
                    "grid sweeps support one or two free coordinates".into(),
                ));
            }
            if coords.iter().any(|&c| c >= shape.rank) {
                return Err(Error::Domain("grid coordinate outside rank".into()));
            }
            if *points < 2 {
                return Err(Error::Domain("grid needs at least 2 points".into()));
            }
            let mut base = fixed.clone();
            base.resize(shape.rank, 0.0);
            let bound = 1.0 / (1u64 << shape.order) as f64;
            let axis: Vec<f64> = (0..*points)
                .map(|i| -bound + 2.0 * bound * i as f64 / (*points as f64 - 1.0))
                .collect();
            let mut list = Vec::new();
            if coords.len() == 1 {
                for (i, &v) in axis.iter().enumerate() {
                    let mut eps = base.clone();
                    eps[coords[0]] = v;
                    list.push((
                        format!("parity-{}-{}-grid-{i:05}", shape.order, shape.rank),
                        eps,
                    ));
                }
            } else {
                let mut i = 0usize;
                for &va in &axis {
                    for &vb in &axis {
                        let mut eps = base.clone();
                        eps[coords[0]] = va;
                        eps[coords[1]] = vb;
                        list.push((
                            format!("parity-{}-{}-grid-{i:05}", shape.order, shape.rank),
                            eps,
                        ));
                        i += 1;
                    }
                }
            }
            list
        }
    };

    eps_list
        .into_par_iter()
        .map(|(id, eps)| {
            let sys = parity_system(shape, &eps)?;
            let report = all_measures_with(&sys, cfg)?;
            Ok(SweepRecord::from_report(
                id,
                Family::Parity,
                shape,
                Params::Eps(eps),
                report,
            ))
        })
        .collect()
}

/// Evaluate all measures over `count` seeded random systems.
pub fn sweep_random(
    shape: SystemShape,
    count: usize,
    seed: u64,
    cfg: &MeasureConfig,
) -> Result<Vec<SweepRecord>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let sys_seed = derive_seed(seed, i);
            let sys = random_system(shape, sys_seed)?;
            let report = all_measures_with(&sys, cfg)?;
            Ok(SweepRecord::from_report(
                format!("random-{}-{}-s{seed}-{i:05}", shape.order, shape.rank),
                Family::Random,
                shape,
                Params::Seed(sys_seed),
                report,
            ))
        })
        .collect()
}

/// A pair of records holding one measure fixed while another moves.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPair {
    pub id_a: String,
    pub id_b: String,
    pub held: String,
    pub varied: String,
    pub held_diff: f64,
    pub varied_diff: f64,
}

/// All record pairs (up to `max`) with `|held_a − held_b| ≤ eps_hold` and
/// `|varied_a − varied_b| ≥ delta_vary`. Run once per orientation of a
/// measure pair to establish non-functionality in each direction.
pub fn find_witnesses(
    records: &[SweepRecord],
    held: &str,
    varied: &str,
    eps_hold: f64,
    delta_vary: f64,
    max: Option<usize>,
) -> Result<Vec<WitnessPair>> {
    let xs: Vec<f64> = records
        .iter()
        .map(|r| {
            r.measure(held)
                .ok_or_else(|| Error::Domain(format!("unknown measure `{held}`")))
        })
        .collect::<Result<_>>()?;
    let ys: Vec<f64> = records
        .iter()
        .map(|r| {
            r.measure(varied)
                .ok_or_else(|| Error::Domain(format!("unknown measure `{varied}`")))
        })
        .collect::<Result<_>>()?;

    let cap = max.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    'search: for a in 0..records.len() {
        for b in (a + 1)..records.len() {
            let held_diff = (xs[a] - xs[b]).abs();
            let varied_diff = (ys[a] - ys[b]).abs();
            if held_diff <= eps_hold && varied_diff >= delta_vary {
                out.push(WitnessPair {
                    id_a: records[a].system_id.clone(),
                    id_b: records[b].system_id.clone(),
                    held: held.to_string(),
                    varied: varied.to_string(),
                    held_diff,
                    varied_diff,
                });
                if out.len() >= cap {
                    break 'search;
                }
            }
        }
    }
    Ok(out)
}

/// Format a float with 12 significant digits, trailing zeros trimmed.
/// Deterministic: a pure function of the bits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exp}")
}

fn level_str(level: Option<usize>) -> String {
    match level {
        Some(m) => m.to_string(),
        None => "none".to_string(),
    }
}

/// CSV header for a record set. All records must share family and shape.
fn csv_header(first: &SweepRecord) -> Vec<String> {
    let mut cols = vec![
        "system_id".to_string(),
        "family".to_string(),
        "order".to_string(),
        "rank".to_string(),
    ];
    match &first.params {
        Params::Eps(eps) => {
            for i in 1..=eps.len() {
                cols.push(format!("eps{i}"));
            }
        }
        Params::Seed(_) => cols.push("seed".to_string()),
    }
    cols.push("cnt1".to_string());
    cols.push("cnt2".to_string());
    for m in 1..=first.cnt2_by_level.len() {
        cols.push(format!("cnt2_l{m}"));
    }
    cols.push("level".to_string());
    cols.push("cnt3".to_string());
    cols.push("cntf".to_string());
    cols.push("contextual".to_string());
    cols
}

/// Write sweep records as CSV; returns the number of data rows.
pub fn write_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<usize> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    if records.is_empty() {
        w.write_record(["system_id", "family", "order", "rank"])
            .map_err(csv_err)?;
        w.flush()?;
        return Ok(0);
    }
    let header = csv_header(&records[0]);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut fields = vec![
            r.system_id.clone(),
            r.family.as_str().to_string(),
            r.order.to_string(),
            r.rank.to_string(),
        ];
        match &r.params {
            Params::Eps(eps) => fields.extend(eps.iter().map(|&e| fmt_sig12(e))),
            Params::Seed(s) => fields.push(s.to_string()),
        }
        fields.push(fmt_sig12(r.cnt1));
        fields.push(fmt_sig12(r.cnt2));
        fields.extend(r.cnt2_by_level.iter().map(|&v| fmt_sig12(v)));
        fields.push(level_str(r.level));
        fields.push(fmt_sig12(r.cnt3));
        fields.push(fmt_sig12(r.cntf));
        fields.push(r.contextual.to_string());
        if fields.len() != header.len() {
            return Err(Error::Domain(
                "records in one CSV must share family and shape".into(),
            ));
        }
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(records.len())
}

/// Write witness pairs as CSV; returns the number of data rows.
pub fn write_witness_csv(pairs: &[WitnessPair], path: impl AsRef<Path>) -> Result<usize> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    w.write_record(["id_a", "id_b", "held", "varied", "held_diff", "varied_diff"])
        .map_err(csv_err)?;
    for p in pairs {
        w.write_record([
            p.id_a.as_str(),
            p.id_b.as_str(),
            p.held.as_str(),
            p.varied.as_str(),
            &fmt_sig12(p.held_diff),
            &fmt_sig12(p.varied_diff),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(pairs.len())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Read sweep records back from CSV (the inverse of [`write_csv`]).
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_path(path.as_ref()).map_err(csv_err)?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let col = |name: &str| -> Option<usize> { header.iter().position(|h| h == name) };
    let eps_cols: Vec<usize> = (1..)
        .map_while(|i| col(&format!("eps{i}")))
        .collect();
    let level_cols: Vec<usize> = (1..)
        .map_while(|m| col(&format!("cnt2_l{m}")))
        .collect();
    let seed_col = col("seed");

    let need = |name: &str| -> Result<usize> {
        col(name).ok_or_else(|| Error::Parse(format!("csv missing column `{name}`")))
    };
    let (id_c, fam_c, order_c, rank_c) = (
        need("system_id")?,
        need("family")?,
        need("order")?,
        need("rank")?,
    );
    let (cnt1_c, cnt2_c, level_c, cnt3_c, cntf_c, ctx_c) = (
        need("cnt1")?,
        need("cnt2")?,
        need("level")?,
        need("cnt3")?,
        need("cntf")?,
        need("contextual")?,
    );

    let parse_f = |s: &str, what: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad float `{s}` in column {what}")))
    };

    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let family = match get(fam_c) {
            "parity" => Family::Parity,
            "random" => Family::Random,
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        };
        let params = if let Some(sc) = seed_col {
            Params::Seed(
                get(sc)
                    .parse()
                    .map_err(|_| Error::Parse("bad seed".into()))?,
            )
        } else {
            Params::Eps(
                eps_cols
                    .iter()
                    .map(|&c| parse_f(get(c), "eps"))
                    .collect::<Result<_>>()?,
            )
        };
        let level = match get(level_c) {
            "none" => None,
            s => Some(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad level `{s}`")))?,
            ),
        };
        out.push(SweepRecord {
            system_id: get(id_c).to_string(),
            family,
            order: get(order_c)
                .parse()
                .map_err(|_| Error::Parse("bad order".into()))?,
            rank: get(rank_c)
                .parse()
                .map_err(|_| Error::Parse("bad rank".into()))?,
            params,
            cnt1: parse_f(get(cnt1_c), "cnt1")?,
            cnt2: parse_f(get(cnt2_c), "cnt2")?,
            cnt2_by_level: level_cols
                .iter()
                .map(|&c| parse_f(get(c), "cnt2_l"))
                .collect::<Result<_>>()?,
            level,
            cnt3: parse_f(get(cnt3_c), "cnt3")?,
            cntf: parse_f(get(cntf_c), "cntf")?,
            contextual: get(ctx_c) == "true",
        });
    }
    Ok(out)
}

/// Emit a minimal SVG scatter of two measure columns, one circle per
/// record, linear axes with min/max tick labels.
pub fn svg_scatter(
    records: &[SweepRecord],
    x_name: &str,
    y_name: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    let get = |r: &SweepRecord, name: &str| -> Result<f64> {
        r.measure(name)
            .ok_or_else(|| Error::Domain(format!("unknown measure `{name}`")))
    };
    let mut pts = Vec::with_capacity(records.len());
    for r in records {
        pts.push((get(r, x_name)?, get(r, y_name)?));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let (w, h, ml, mb, mt, mr) = (640.0, 480.0, 60.0, 40.0, 20.0, 20.0);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| (h - mb) - (y - y0) / (y1 - y0) * (h - mb - mt);

    let mut f = File::create(path.as_ref())?;
    writeln!(
        f,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    )?;
    writeln!(
        f,
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>"
    )?;
    writeln!(
        f,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb,
        w - mr,
        h - mb
    )?;
    writeln!(
        f,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        h - mb
    )?;
    let label = |v: f64| fmt_sig12(v);
    writeln!(
        f,
        "<text x=\"{ml}\" y=\"{}\" font-size=\"12\">{}</text>",
        h - mb + 16.0,
        label(x0)
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
        w - mr,
        h - mb + 16.0,
        label(x1)
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
        ml - 6.0,
        h - mb,
        label(y0)
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
        ml - 6.0,
        mt + 12.0,
        label(y1)
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x_name}</text>",
        (ml + w - mr) / 2.0,
        h - 8.0
    )?;
    writeln!(
        f,
        "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{y_name}</text>",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    )?;
    for &(x, y) in &pts {
        writeln!(
            f,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.6\"/>",
            sx(x),
            sy(y)
        )?;
    }
    writeln!(f, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dummy_record(id: &str, cnt1: f64, cnt2: f64) -> SweepRecord {
        SweepRecord {
            system_id: id.to_string(),
            family: Family::Parity,
            order: 3,
            rank: 4,
            params: Params::Eps(vec![0.0; 4]),
            cnt1,
            cnt2,
            cnt2_by_level: vec![0.0, 0.0, cnt2],
            level: if cnt2 > 1e-7 { Some(3) } else { None },
            cnt3: cnt1 / 2.0,
            cntf: cnt1 / 4.0,
            contextual: cnt2 > 1e-7,
        }
    }

    #[test]
    fn witness_definition() {
        let a = dummy_record("a", 0.1, 0.05);
        let b = dummy_record("b", 0.1, 0.20);
        let found = find_witnesses(&[a.clone(), b.clone()], "cnt1", "cnt2", 1e-6, 1e-3, None)
            .unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].id_a, "a");

        // identical records: no witness
        let none = find_witnesses(&[a.clone(), a.clone()], "cnt1", "cnt2", 1e-6, 1e-3, None)
            .unwrap();
        assert!(none.is_empty());

        // cap respected
        let many = vec![a.clone(), b.clone(), a, b];
        let capped =
            find_witnesses(&many, "cnt1", "cnt2", 1e-6, 1e-3, Some(2)).unwrap();
        assert_eq!(capped.len(), 2);
    }

    #[test]
    fn fmt_sig12_round_trips() {
        for &x in &[0.0, 1.0, 0.25, -0.125, 1.0 / 3.0, 2e-17, 123456.789] {
            let s = fmt_sig12(x);
            let back: f64 = s.parse().unwrap();
            assert!(
                (back - x).abs() <= x.abs() * 1e-11,
                "{x} → {s} → {back}"
            );
        }
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(0.25), "2.5e-1");
    }

    #[test]
    fn csv_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records = vec![dummy_record("a", 0.1, 0.05), dummy_record("b", 0.2, 0.3)];
        let n = write_csv(&records, &path).unwrap();
        assert_eq!(n, 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);

        let again = dir.path().join("again.csv");
        write_csv(&records, &again).unwrap();
        assert_eq!(text, std::fs::read_to_string(&again).unwrap());

        let back = read_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].system_id, "a");
        assert_eq!(back[0].level, None);
        assert_eq!(back[1].level, Some(3));
        assert!((back[1].cnt2 - 0.3).abs() < 1e-12);
        assert_eq!(back[0].params, Params::Eps(vec![0.0; 4]));
    }

    #[test]
    fn empty_record_list_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        let n = write_csv(&[], &path).unwrap();
        assert_eq!(n, 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn sweep_records_are_deterministic() {
        let shape = SystemShape { order: 2, rank: 2 };
        let cfg = MeasureConfig::default();
        let design = ParityDesign::Random { count: 4, seed: 11 };
        let a = sweep_parity(shape, &design, &cfg).unwrap();
        let b = sweep_parity(shape, &design, &cfg).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.system_id, y.system_id);
            assert_eq!(x.cnt1.to_bits(), y.cnt1.to_bits());
            assert_eq!(x.cnt2.to_bits(), y.cnt2.to_bits());
            assert_eq!(x.cnt3.to_bits(), y.cnt3.to_bits());
            assert_eq!(x.cntf.to_bits(), y.cntf.to_bits());
        }
    }

    #[test]
    fn grid_sweep_center_point_is_noncontextual() {
        let shape = SystemShape { order: 2, rank: 3 };
        let cfg = MeasureConfig::default();
        let design = ParityDesign::Grid {
            coords: vec![0],
            points: 9,
            fixed: vec![],
        };
        let records = sweep_parity(shape, &design, &cfg).unwrap();
        assert_eq!(records.len(), 9);
        // middle grid point has eps = 0 everywhere → uniform system
        let mid = &records[4];
        match &mid.params {
            Params::Eps(eps) => assert!(eps.iter().all(|&e| e.abs() < 1e-15)),
            _ => panic!("parity sweep must carry eps"),
        }
        assert!(!mid.contextual);
        assert!(mid.cnt1 <= 1e-9 && mid.cnt2 <= 1e-9 && mid.cnt3 <= 1e-9 && mid.cntf <= 1e-9);
    }

    #[test]
    fn random_sweep_repeats_bit_identically() {
        let shape = SystemShape { order: 2, rank: 3 };
        let cfg = MeasureConfig::default();
        let a = sweep_random(shape, 5, 9, &cfg).unwrap();
        let b = sweep_random(shape, 5, 9, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.system_id, y.system_id);
            assert_eq!(x.cnt2.to_bits(), y.cnt2.to_bits());
        }
    }

    #[test]
    fn svg_scatter_writes_points() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let records = vec![dummy_record("a", 0.1, 0.05), dummy_record("b", 0.2, 0.3)];
        svg_scatter(&records, "cnt1", "cnt2", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("<circle").count(), 2);
    }
}

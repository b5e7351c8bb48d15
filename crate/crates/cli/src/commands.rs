use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use spatial_influence::formats::tables::{curve_csv, num, surface_csv, zero_lag_surface_csv, Table};
use spatial_influence::formats::{join_geojson, read_attribute_csv, render_lattice_svg, LocationRecord, Palette};
use spatial_influence::weights::gal::GalFile;
use spatial_influence::{
    influence_curve, influence_surface, lif_map, lisa_inference, local_moran, mc_experiment, moran_i, Error,
    InfluenceModel, LifOptions, LisaConfig, Observations, Quadrant, SarConfig, SpatialWeights, SurfaceSpec,
};

use crate::args::{DataArgs, InfluenceArgs, LifArgs, LisaArgs, OutputArgs, SimulateArgs, SurfaceArgs};
use crate::output::{provenance, Artifacts};

macro_rules! log {
    ($($t:tt)*) => { eprintln!("[spinf] {}", format!($($t)*)) };
}

/// `ROWSxCOLS`
pub fn parse_lattice(spec: &str) -> Result<(usize, usize)> {
    let (r, c) = spec.split_once(['x', 'X']).with_context(|| format!("lattice `{spec}` is not ROWSxCOLS"))?;
    let rows: usize = r.trim().parse().with_context(|| format!("bad lattice rows in `{spec}`"))?;
    let cols: usize = c.trim().parse().with_context(|| format!("bad lattice columns in `{spec}`"))?;
    Ok((rows, cols))
}

fn parse_range(spec: &str) -> Result<(f64, f64)> {
    let (a, b) = spec.split_once(':').with_context(|| format!("range `{spec}` is not LO:HI"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn lattice_weights(rows: usize, cols: usize, torus: bool, queen: bool) -> Result<SpatialWeights<f64>> {
    let w = if queen {
        SpatialWeights::lattice_queen(rows, cols, torus)?
    } else {
        SpatialWeights::lattice_rook(rows, cols, torus)?
    };
    Ok(w.row_standardize())
}

struct Loaded {
    obs: Observations<f64>,
    w: SpatialWeights<f64>,
    lattice: Option<(usize, usize)>,
}

fn load(data: &DataArgs) -> Result<Loaded> {
    let ds = read_attribute_csv::<f64>(&data.input, &data.id_col, &data.value_col)
        .with_context(|| format!("reading {}", data.input.display()))?;
    log!("read {} observations from {}", ds.len(), data.input.display());
    let (w, lattice) = if let Some(path) = &data.weights {
        let gal = GalFile::read(path).with_context(|| format!("reading {}", path.display()))?;
        let (gal_ids, w) = gal.to_weights::<f64>()?;
        log!("read GAL weights for {} locations from {}", gal_ids.len(), path.display());
        (align(&ds.ids, &gal_ids, &w)?.row_standardize(), None)
    } else {
        let spec = data.lattice.as_deref().expect("clap enforces a weights source");
        let (rows, cols) = parse_lattice(spec)?;
        if rows * cols != ds.len() {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: ds.len() }.into());
        }
        (lattice_weights(rows, cols, data.torus, data.queen)?, Some((rows, cols)))
    };
    if !w.islands().is_empty() {
        log!("{} location(s) have no neighbours", w.islands().len());
    }
    let obs = Observations::with_ids(ds.ids, ds.raw_values)?;
    Ok(Loaded { obs, w, lattice })
}

/// Reorders weights keyed by `gal_ids` into the order of `ids`.
fn align(ids: &[String], gal_ids: &[String], w: &SpatialWeights<f64>) -> Result<SpatialWeights<f64>> {
    let index: HashMap<&str, usize> = gal_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let order = ids
        .iter()
        .map(|id| index.get(id.as_str()).copied().ok_or_else(|| Error::UnknownId(id.clone())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if gal_ids.len() != ids.len() {
        let known: std::collections::HashSet<&str> = ids.iter().map(String::as_str).collect();
        let extra = gal_ids.iter().find(|g| !known.contains(g.as_str())).expect("sizes differ");
        return Err(Error::UnknownId(extra.clone()).into());
    }
    Ok(w.permuted(&order)?)
}

fn lif_options(args: &InfluenceArgs) -> LifOptions<f64> {
    LifOptions {
        half_width: args.half_width,
        model: if args.exact { InfluenceModel::Exact } else { InfluenceModel::Closed(args.form.into()) },
        ..LifOptions::default()
    }
}

fn palette(output: &OutputArgs) -> Result<Palette> {
    Ok(output.palette.parse()?)
}

fn join(
    arts: &mut Artifacts,
    path: &Path,
    key: &str,
    name: &str,
    records: &HashMap<String, LocationRecord>,
) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let joined = join_geojson(&text, key, records)?;
    if joined.unmatched > 0 {
        log!("{} feature(s) in {} had no matching id", joined.unmatched, path.display());
    }
    arts.add(name, serde_json::to_string(&joined.collection)? + "\n");
    Ok(())
}

/// Writes the artifacts, then the tab separated summary on stdout.
fn finish(arts: Artifacts, out_dir: &Path, summary: &[String]) -> Result<()> {
    for path in arts.commit(out_dir)? {
        log!("wrote {}", path.display());
    }
    let mut out = std::io::stdout().lock();
    for line in summary {
        // a closed pipe is not a failed run
        if writeln!(out, "{line}").is_err() {
            break;
        }
    }
    Ok(())
}

pub fn lif(args: &LifArgs, canonical: &str) -> Result<()> {
    let Loaded { obs, w, lattice } = load(&args.data)?;
    let opts = lif_options(&args.influence);
    let mc = moran_i(&obs, &w)?;
    let scores = lif_map(&obs, &w, &opts)?;
    let comment = provenance(canonical, args.output.seed);

    let mut arts = Artifacts::default();
    let mut t = Table::new(&comment, &["id", "value", "lag", "lif", "rank"]);
    for k in 0..obs.n() {
        t.row([
            obs.ids[k].clone(),
            num(obs.values[k]),
            num(scores.lag_sums[k]),
            num(scores.lif[k]),
            scores.rank[k].to_string(),
        ]);
    }
    arts.add("lif.csv", t.finish());
    for (name, k) in [("curve_max.csv", scores.argmax), ("curve_min.csv", scores.argmin)] {
        let curve = influence_curve(&obs, &w, k, &opts, args.influence.curve_points)?;
        arts.add(name, curve_csv(&format!("{comment} id={}", obs.ids[k]), &curve));
    }
    if let Some(path) = &args.geojson {
        let local = local_moran(&obs, &w)?;
        let lag = w.lag(&obs.standardized)?;
        let records = (0..obs.n())
            .map(|k| {
                let quadrant =
                    if w.is_island(k) { Quadrant::Island } else { Quadrant::classify(obs.standardized[k], lag[k]) };
                let rec = LocationRecord {
                    lif: Some(scores.lif[k]),
                    lif_rank: Some(scores.rank[k]),
                    local_i: Some(local[k]),
                    lisa_p: None,
                    quadrant: Some(quadrant.as_str().to_string()),
                };
                (obs.ids[k].clone(), rec)
            })
            .collect();
        join(&mut arts, path, args.join_key.as_deref().unwrap_or(&args.data.id_col), "lif.geojson", &records)?;
    }
    if args.output.svg {
        let (rows, cols) = lattice.context("--svg needs --lattice input")?;
        arts.add("value.svg", render_lattice_svg(&obs.values, rows, cols, Palette::greys(), true)?);
        arts.add("lif.svg", render_lattice_svg(&scores.lif, rows, cols, palette(&args.output)?, true)?);
    }

    let summary = vec![
        format!("moran_i\t{}", num(mc)),
        format!("max_lif\t{}\t{}", obs.ids[scores.argmax], num(scores.lif[scores.argmax])),
        format!("min_lif\t{}\t{}", obs.ids[scores.argmin], num(scores.lif[scores.argmin])),
    ];
    finish(arts, &args.output.out_dir, &summary)
}

pub fn lisa(args: &LisaArgs, canonical: &str) -> Result<()> {
    let Loaded { obs, w, lattice } = load(&args.data)?;
    let cfg = LisaConfig { permutations: args.permutations, seed: args.output.seed, alpha: args.alpha };
    let res = lisa_inference(&obs, &w, &cfg)?;
    let comment = provenance(canonical, args.output.seed);

    let mut arts = Artifacts::default();
    let mut t = Table::new(&comment, &["id", "local_i", "quadrant", "p_value", "significant"]);
    for k in 0..obs.n() {
        let p = res.p_value[k].map_or_else(|| "NA".to_string(), num);
        t.row([
            obs.ids[k].clone(),
            num(res.local_i[k]),
            res.quadrant[k].to_string(),
            p,
            res.is_significant(k).to_string(),
        ]);
    }
    arts.add("lisa.csv", t.finish());
    if let Some(path) = &args.geojson {
        let records = (0..obs.n())
            .map(|k| {
                let rec = LocationRecord {
                    local_i: Some(res.local_i[k]),
                    lisa_p: res.p_value[k],
                    quadrant: Some(res.quadrant[k].as_str().to_string()),
                    ..LocationRecord::default()
                };
                (obs.ids[k].clone(), rec)
            })
            .collect();
        join(&mut arts, path, args.join_key.as_deref().unwrap_or(&args.data.id_col), "lisa.geojson", &records)?;
    }
    if args.output.svg {
        let (rows, cols) = lattice.context("--svg needs --lattice input")?;
        arts.add("local_i.svg", render_lattice_svg(&res.local_i, rows, cols, palette(&args.output)?, true)?);
    }

    let sig = res.significant_count();
    let summary = vec![format!("moran_i\t{}", num(moran_i(&obs, &w)?)), format!("significant\t{sig}\t{}", obs.n())];
    log!(
        "{sig} of {} locations significant at alpha={}; {}",
        obs.n(),
        args.alpha,
        if 2 * sig < obs.n() { "most locations are not significant" } else { "most locations are significant" }
    );
    finish(arts, &args.output.out_dir, &summary)
}

pub fn simulate(args: &SimulateArgs, canonical: &str) -> Result<()> {
    let (rows, cols) = parse_lattice(&args.lattice)?;
    let w = lattice_weights(rows, cols, args.torus, args.queen)?;
    let config = SarConfig::new(args.rho, w, args.output.seed, args.replications)?;
    let opts = lif_options(&args.influence);
    log!("simulating {} SAR fields, rho={}, lattice {rows}x{cols}", args.replications, args.rho);
    let s = mc_experiment(&config, &opts, args.influence.curve_points)?;
    let comment = provenance(canonical, args.output.seed);

    let mut arts = Artifacts::default();
    let cell = |k: usize| [(k + 1).to_string(), (k / cols + 1).to_string(), (k % cols + 1).to_string()];
    let mut t = Table::new(&comment, &["index", "row", "col", "mean_lif", "sd_lif"]);
    for k in 0..rows * cols {
        let [i, r, c] = cell(k);
        t.row([i, r, c, num(s.mean_lif[k]), num(s.sd_lif[k])]);
    }
    arts.add("cells.csv", t.finish());
    let mut t = Table::new(&comment, &["index", "row", "col", "value", "lif", "rank"]);
    for k in 0..rows * cols {
        let [i, r, c] = cell(k);
        t.row([i, r, c, num(s.final_field[k]), num(s.final_scores.lif[k]), s.final_scores.rank[k].to_string()]);
    }
    arts.add("final_field.csv", t.finish());
    let mut t = Table::new(&comment, &["replicate", "moran_i"]);
    for (r, mc) in s.moran.iter().enumerate() {
        t.row([(r + 1).to_string(), num(*mc)]);
    }
    arts.add("replications.csv", t.finish());
    for (name, curve) in [
        ("curve_max_mean.csv", &s.mean_max_curve),
        ("curve_min_mean.csv", &s.mean_min_curve),
        ("curve_max_final.csv", &s.final_max_curve),
        ("curve_min_final.csv", &s.final_min_curve),
    ] {
        arts.add(name, curve_csv(&format!("{comment} index={}", curve.location + 1), curve));
    }
    if args.output.svg {
        let pal = palette(&args.output)?;
        arts.add("field.svg", render_lattice_svg(&s.final_field, rows, cols, Palette::greys(), true)?);
        arts.add("lif.svg", render_lattice_svg(&s.final_scores.lif, rows, cols, pal, true)?);
        arts.add("mean_lif.svg", render_lattice_svg(&s.mean_lif, rows, cols, pal, true)?);
    }

    let positive = s.moran.iter().filter(|&&m| m > 0.0).count();
    let mean_mc = s.moran.iter().sum::<f64>() / s.moran.len() as f64;
    let summary = vec![
        format!("mean_moran_i\t{}", num(mean_mc)),
        format!("positive_moran_i\t{positive}\t{}", s.replications),
        format!("max_residual\t{}", num(s.max_residual)),
        format!("max_mean_lif_cell\t{}", s.mean_argmax + 1),
        format!("min_mean_lif_cell\t{}", s.mean_argmin + 1),
    ];
    finish(arts, &args.output.out_dir, &summary)
}

pub fn surface(args: &SurfaceArgs, canonical: &str) -> Result<()> {
    let mc_levels = args
        .mc_levels
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad MC level `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    let (z1_points, lag_points) = parse_lattice(&args.grid).context("--grid expects Z1POINTSxLAGPOINTS")?;
    if args.n < 3 {
        bail!("--n must be at least 3");
    }
    let spec = SurfaceSpec {
        n: args.n,
        mc_levels,
        z1_range: parse_range(&args.z1_range)?,
        lag_range: parse_range(&args.lag_range)?,
        mc_range: parse_range(&args.mc_range)?,
        z1_points,
        lag_points,
        mc_points: args.mc_points,
        form: args.form.into(),
    };
    let surfaces = influence_surface(&spec)?;
    let comment = provenance(canonical, 0);
    let mut arts = Artifacts::default();
    for (i, (mc, _)) in surfaces.by_mc.iter().enumerate() {
        arts.add(
            format!("surface_mc{}.csv", i + 1),
            surface_csv(&format!("{comment} n={} mc={}", args.n, num(*mc)), &surfaces, i),
        );
    }
    arts.add("surface_zero_lag.csv", zero_lag_surface_csv(&format!("{comment} n={} lag=0", args.n), &surfaces));
    let summary = vec![format!("surfaces\t{}", surfaces.by_mc.len() + 1)];
    finish(arts, &args.out_dir, &summary)
}

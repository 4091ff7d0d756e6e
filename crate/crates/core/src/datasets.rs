//! Instance generators and dataset directories.
//!
//! Every generator is a pure function of its parameters and seed; batch
//! generators give instance `i` its own ChaCha stream, so instance `i` does
//! not depend on how many others are drawn or on thread scheduling.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::chromatic_number;
use crate::error::{Error, Result};
use crate::graph::{ConflictGraph, TopologyMatrix, UndirectedGraph};
use crate::io::{read_json, write_json, InstanceFile};

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} outside [0, 1]"
        )));
    }
    Ok(())
}

fn er_with(rng: &mut impl Rng, k: usize, p: f64) -> ConflictGraph {
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .filter(|_| rng.gen_bool(p))
        .collect();
    ConflictGraph::from_edges(k, edges).expect("generated edges are in range")
}

/// Directed Erdős–Rényi graph: each ordered pair is an edge with probability `p`.
pub fn gen_er(k: usize, p: f64, seed: u64) -> Result<ConflictGraph> {
    check_probability("p", p)?;
    Ok(er_with(&mut ChaCha8Rng::seed_from_u64(seed), k, p))
}

/// `count` independent ER graphs; graph `i` is drawn from stream `i` of `seed`.
pub fn gen_er_batch(k: usize, p: f64, count: usize, seed: u64) -> Result<Vec<ConflictGraph>> {
    check_probability("p", p)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| er_with(&mut stream_rng(seed, i as u64), k, p))
        .collect())
}

/// Keeps each node as a demanded message with probability `q` (at least one
/// node survives) and returns the induced conflict graph.
pub fn thin_demands(g: &ConflictGraph, q: f64, seed: u64) -> Result<ConflictGraph> {
    check_probability("q", q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<usize> = (0..g.node_count()).filter(|_| rng.gen_bool(q)).collect();
    if kept.is_empty() && g.node_count() > 0 {
        kept.push(rng.gen_range(0..g.node_count()));
    }
    Ok(g.induced(&kept))
}

/// Undirected graphs from the underlying graphs of directed ER draws, keeping
/// those with chromatic number `chi` until `count` are found. Draw `i` uses
/// stream `i`; gives up after `max_draws`.
pub fn er_with_chromatic(
    k: usize,
    p: f64,
    chi: usize,
    count: usize,
    seed: u64,
    max_draws: usize,
) -> Result<Vec<UndirectedGraph>> {
    check_probability("p", p)?;
    let mut out = Vec::with_capacity(count);
    let mut next = 0usize;
    const CHUNK: usize = 64;
    while out.len() < count {
        if next >= max_draws {
            return Err(Error::InvalidParameter(format!(
                "only {} of {count} graphs with chromatic number {chi} in {max_draws} draws",
                out.len()
            )));
        }
        let end = (next + CHUNK).min(max_draws);
        let chunk: Vec<Option<UndirectedGraph>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let u = er_with(&mut stream_rng(seed, i as u64), k, p).underlying_undirected();
                Ok((chromatic_number(&u)? == chi).then_some(u))
            })
            .collect::<Result<_>>()?;
        out.extend(chunk.into_iter().flatten().take(count - out.len()));
        next = end;
    }
    Ok(out)
}

/// Radio parameters of the device-to-device layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub carrier_hz: f64,
    pub antenna_height_m: f64,
    pub antenna_gain_db: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub pair_distance_m: (f64, f64),
    pub area_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            carrier_hz: 2.4e9,
            antenna_height_m: 1.5,
            antenna_gain_db: -2.5,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 7.0,
            bandwidth_hz: 10e6,
            tx_power_dbm: 30.0,
            pair_distance_m: (2.0, 65.0),
            area_m: 1000.0,
        }
    }
}

impl RadioParams {
    pub fn wavelength(&self) -> f64 {
        299_792_458.0 / self.carrier_hz
    }

    /// Breakpoint distance `4 h_tx h_rx / λ`.
    pub fn breakpoint_m(&self) -> f64 {
        4.0 * self.antenna_height_m * self.antenna_height_m / self.wavelength()
    }

    /// Basic transmission loss at the breakpoint, `|20 log10(λ² / (8π h_tx h_rx))|`.
    pub fn breakpoint_loss_db(&self) -> f64 {
        let l = self.wavelength();
        (20.0 * (l * l / (8.0 * PI * self.antenna_height_m * self.antenna_height_m)).log10()).abs()
    }

    /// Line-of-sight lower-bound loss: slope 20 dB/decade before the
    /// breakpoint, 40 after. Distances below 1 m are treated as 1 m.
    pub fn path_loss_db(&self, d: f64) -> f64 {
        let d = d.max(1.0);
        let rbp = self.breakpoint_m();
        let slope = if d <= rbp { 20.0 } else { 40.0 };
        self.breakpoint_loss_db() + slope * (d / rbp).log10()
    }

    /// Received power in dBm over distance `d`.
    pub fn rx_power_dbm(&self, d: f64) -> f64 {
        self.tx_power_dbm + 2.0 * self.antenna_gain_db - self.path_loss_db(d)
    }

    pub fn noise_dbm(&self) -> f64 {
        self.noise_density_dbm_hz + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirelessLayout {
    /// `(tx, rx)` positions in meters.
    pub pairs: Vec<([f64; 2], [f64; 2])>,
    /// `channel_gain[j][i]`: linear power gain from transmitter `i` to receiver `j`.
    pub channel_gain: Vec<Vec<f64>>,
    pub params: RadioParams,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `k` transmitter/receiver pairs in the square area; each receiver lies at a
/// uniform distance from its transmitter, at a uniform angle redrawn until the
/// receiver falls inside the area. The topology keeps the
/// `⌈density · k(k−1)⌉` strongest cross links (ties by index).
pub fn gen_wireless(
    k: usize,
    density: f64,
    seed: u64,
    params: &RadioParams,
) -> Result<(WirelessLayout, TopologyMatrix)> {
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density {density} outside (0, 1)"
        )));
    }
    let (dmin, dmax) = params.pair_distance_m;
    if !(0.0 < dmin && dmin <= dmax && 2.0 * dmax < params.area_m) {
        return Err(Error::InvalidParameter(
            "pair distance range does not fit the area".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = params.area_m;
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let tx = [rng.gen_range(0.0..=side), rng.gen_range(0.0..=side)];
        let d = rng.gen_range(dmin..=dmax);
        let rx = loop {
            let theta = rng.gen_range(0.0..2.0 * PI);
            let rx = [tx[0] + d * theta.cos(), tx[1] + d * theta.sin()];
            if (0.0..=side).contains(&rx[0]) && (0.0..=side).contains(&rx[1]) {
                break rx;
            }
        };
        pairs.push((tx, rx));
    }
    let gain_db = |j: usize, i: usize| {
        2.0 * params.antenna_gain_db - params.path_loss_db(distance(pairs[i].0, pairs[j].1))
    };
    let channel_gain: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| 10f64.powf(gain_db(j, i) / 10.0)).collect())
        .collect();

    let mut cross: Vec<(usize, usize)> = (0..k)
        .flat_map(|j| (0..k).map(move |i| (j, i)))
        .filter(|&(j, i)| i != j)
        .collect();
    cross.sort_by(|&(j1, i1), &(j2, i2)| {
        channel_gain[j2][i2]
            .total_cmp(&channel_gain[j1][i1])
            .then((j1, i1).cmp(&(j2, i2)))
    });
    let keep = (density * cross.len() as f64).ceil() as usize;
    let mut t = vec![vec![0u8; k]; k];
    for (j, row) in t.iter_mut().enumerate() {
        row[j] = 1;
    }
    for &(j, i) in cross.iter().take(keep) {
        t[j][i] = 1;
    }
    let layout = WirelessLayout {
        pairs,
        channel_gain,
        params: *params,
    };
    Ok((layout, TopologyMatrix::new(t, 1, 1)?))
}

/// Groups graphs by the chromatic number of their underlying undirected
/// graph; bins not listed in `bins` are dropped.
pub fn partition_by_chromatic(
    graphs: &[ConflictGraph],
    bins: &[usize],
) -> Result<BTreeMap<usize, Vec<ConflictGraph>>> {
    let chis: Vec<usize> = graphs
        .par_iter()
        .map(|g| chromatic_number(&g.underlying_undirected()))
        .collect::<Result<_>>()?;
    let mut out: BTreeMap<usize, Vec<ConflictGraph>> =
        bins.iter().map(|&b| (b, Vec::new())).collect();
    for (g, chi) in graphs.iter().zip(chis) {
        if let Some(bin) = out.get_mut(&chi) {
            bin.push(g.clone());
        }
    }
    Ok(out)
}

/// `manifest.json` of a dataset directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub count: usize,
    /// Instance file names relative to the directory, in order.
    pub files: Vec<String>,
}

/// A wireless instance: the topology plus the layout that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirelessInstance {
    pub k: usize,
    pub topology: Vec<Vec<u8>>,
    pub m: usize,
    pub n: usize,
    pub layout: WirelessLayout,
}

pub const MANIFEST: &str = "manifest.json";

pub fn instance_name(i: usize) -> String {
    format!("instance_{i:05}.json")
}

/// Writes `manifest.json` and one file per instance under `dir`.
pub fn write_dataset<T: Serialize>(
    dir: &Path,
    generator: &str,
    params: serde_json::Value,
    seed: u64,
    instances: &[T],
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let files: Vec<String> = (0..instances.len()).map(instance_name).collect();
    for (name, inst) in files.iter().zip(instances) {
        write_json(dir.join(name), inst)?;
    }
    let manifest = Manifest {
        generator: generator.to_string(),
        params,
        seed,
        count: instances.len(),
        files,
    };
    write_json(dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// The manifest and every listed instance, each parsed independently.
pub fn read_dataset(dir: &Path) -> Result<(Manifest, Vec<(String, Result<InstanceFile>)>)> {
    let manifest: Manifest = read_json(dir.join(MANIFEST))?;
    let instances = manifest
        .files
        .iter()
        .map(|name| (name.clone(), read_json::<InstanceFile>(dir.join(name))))
        .collect();
    Ok((manifest, instances))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_er(6, 1.0, 1).unwrap().edge_count(), 30);
        assert!(gen_er(6, 1.5, 1).is_err());
    }

    #[test]
    fn er_is_seeded() {
        assert_eq!(gen_er(8, 0.3, 11).unwrap(), gen_er(8, 0.3, 11).unwrap());
        let a = gen_er_batch(8, 0.3, 5, 2).unwrap();
        let b = gen_er_batch(8, 0.3, 9, 2).unwrap();
        assert_eq!(a[..], b[..5]);
    }

    #[test]
    fn er_edge_frequency_concentrates() {
        let (k, p, draws) = (6usize, 0.4, 10_000usize);
        let pairs = (k * (k - 1) * draws) as f64;
        let edges: usize = gen_er_batch(k, p, draws, 3)
            .unwrap()
            .iter()
            .map(|g| g.edge_count())
            .sum();
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        assert!((edges as f64 - pairs * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn er_edge_counts_fit_binomial() {
        // Chi-squared over edge counts of 5-node graphs (20 ordered pairs).
        let (k, p, draws) = (5usize, 0.3, 4000usize);
        let m = k * (k - 1);
        let mut observed = vec![0usize; m + 1];
        for g in gen_er_batch(k, p, draws, 17).unwrap() {
            observed[g.edge_count()] += 1;
        }
        let binom = |x: usize| -> f64 {
            let mut c = 1.0;
            for i in 0..x {
                c *= (m - i) as f64 / (i + 1) as f64;
            }
            c * p.powi(x as i32) * (1.0 - p).powi((m - x) as i32)
        };
        // Pool the tails so every cell expects at least 5 draws.
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let (mut e, mut o) = (0.0, 0.0);
        for x in 0..=m {
            e += binom(x) * draws as f64;
            o += observed[x] as f64;
            if e >= 5.0 {
                cells.push((o, e));
                e = 0.0;
                o = 0.0;
            }
        }
        if let Some(last) = cells.last_mut() {
            last.0 += o;
            last.1 += e;
        }
        let chi2: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        // 99.9% quantile of chi-squared with up to 15 degrees of freedom.
        assert!(chi2 < 37.7, "chi2 = {chi2} over {} cells", cells.len());
    }

    #[test]
    fn breakpoint_values() {
        let r = RadioParams::default();
        assert!((r.breakpoint_m() - 72.0).abs() < 0.1);
        // λ = 0.12491 m: 20 log10(8π · 1.5² / λ²) = 71.18 dB.
        assert!((r.breakpoint_loss_db() - 71.18).abs() < 0.01);
        assert!((r.path_loss_db(r.breakpoint_m()) - r.breakpoint_loss_db()).abs() < 1e-9);
    }

    #[test]
    fn gain_decreases_with_distance() {
        let r = RadioParams::default();
        let mut prev = f64::INFINITY;
        for step in 0..2000 {
            let g = r.rx_power_dbm(0.5 * step as f64);
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn wireless_density_and_diagonal() {
        let params = RadioParams::default();
        for (k, density, seed) in [(30, 0.3, 1), (20, 0.4, 2), (7, 0.5, 3)] {
            let (layout, t) = gen_wireless(k, density, seed, &params).unwrap();
            let off: usize = (0..k)
                .flat_map(|j| (0..k).map(move |i| (j, i)))
                .filter(|&(j, i)| i != j && t.get(j, i))
                .count();
            let target = (density * (k * (k - 1)) as f64).ceil() as usize;
            assert!(off.abs_diff(target) <= 1);
            assert!((0..k).all(|j| t.get(j, j)));
            for (tx, rx) in &layout.pairs {
                let d = distance(*tx, *rx);
                assert!((2.0 - 1e-9..=65.0 + 1e-9).contains(&d));
                assert!(rx.iter().chain(tx).all(|&x| (0.0..=1000.0).contains(&x)));
            }
            assert_eq!(gen_wireless(k, density, seed, &params).unwrap().1, t);
        }
        assert!(gen_wireless(5, 1.0, 0, &params).is_err());
    }

    #[test]
    fn chromatic_bins() {
        let graphs = vec![
            ConflictGraph::empty(3),
            ConflictGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap(),
            ConflictGraph::from_edges(2, [(0, 1)]).unwrap(),
        ];
        let bins = partition_by_chromatic(&graphs, &[1, 3]).unwrap();
        assert_eq!(bins[&1].len(), 1);
        assert_eq!(bins[&3].len(), 1);
        assert!(!bins.contains_key(&2));
    }

    #[test]
    fn chromatic_sampler() {
        let gs = er_with_chromatic(10, 0.3, 4, 3, 5, 10_000).unwrap();
        assert_eq!(gs.len(), 3);
        assert!(gs.iter().all(|u| chromatic_number(u).unwrap() == 4));
        assert!(er_with_chromatic(4, 0.0, 3, 1, 0, 50).is_err());
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let graphs = gen_er_batch(4, 0.5, 3, 0).unwrap();
        let files: Vec<InstanceFile> = graphs.iter().map(InstanceFile::from_graph).collect();
        write_dataset(
            dir.path(),
            "er",
            serde_json::json!({"k": 4, "p": 0.5}),
            0,
            &files,
        )
        .unwrap();
        let (manifest, read) = read_dataset(dir.path()).unwrap();
        assert_eq!(manifest.count, 3);
        for ((_, inst), g) in read.into_iter().zip(&graphs) {
            assert_eq!(&inst.unwrap().conflict_graph().unwrap(), g);
        }
    }
}

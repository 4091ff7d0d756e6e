use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use tim_core::datasets::{
    er_with_chromatic, gen_er_batch, gen_wireless, thin_demands, write_dataset, RadioParams,
    WirelessInstance,
};
use tim_core::graph::ConflictGraph;
use tim_core::io::InstanceFile;

use crate::args::{GenArgs, GenKind};
use crate::error::CliResult;

pub fn run(args: &GenArgs, seed: u64) -> CliResult<()> {
    let manifest = match &args.kind {
        GenKind::Er { k, p, q } => {
            let mut graphs = gen_er_batch(*k, *p, args.count, seed)?;
            if let Some(q) = q {
                graphs = graphs
                    .iter()
                    .enumerate()
                    .map(|(i, g)| thin_demands(g, *q, seed ^ i as u64))
                    .collect::<tim_core::Result<_>>()?;
            }
            let files: Vec<InstanceFile> = graphs.iter().map(InstanceFile::from_graph).collect();
            write_dataset(&args.out, "er", json!({"k": k, "p": p, "q": q}), seed, &files)?
        }
        GenKind::ErChi { k, p, chi, max_draws } => {
            let graphs = er_with_chromatic(*k, *p, *chi, args.count, seed, *max_draws)?;
            // Each undirected edge becomes a pair of opposite conflicts.
            let files = graphs
                .iter()
                .map(|u| {
                    let edges = u.edges().flat_map(|(a, b)| [(a, b), (b, a)]);
                    Ok(InstanceFile::from_graph(&ConflictGraph::from_edges(u.node_count(), edges)?))
                })
                .collect::<tim_core::Result<Vec<_>>>()?;
            let params = json!({"k": k, "p": p, "chi": chi});
            write_dataset(&args.out, "er_chi", params, seed, &files)?
        }
        GenKind::Wireless { k, density } => {
            let radio = RadioParams::default();
            let mut seeds = ChaCha8Rng::seed_from_u64(seed);
            let instances = (0..args.count)
                .map(|_| {
                    let (layout, t) = gen_wireless(*k, *density, seeds.gen(), &radio)?;
                    Ok(WirelessInstance {
                        k: *k,
                        topology: t.entries().to_vec(),
                        m: t.m(),
                        n: t.n(),
                        layout,
                    })
                })
                .collect::<tim_core::Result<Vec<_>>>()?;
            let params = json!({"k": k, "density": density, "radio": radio});
            write_dataset(&args.out, "wireless", params, seed, &instances)?
        }
    };
    eprintln!("wrote {} instances to {}", manifest.count, args.out.display());
    Ok(())
}

//! Detects a piecewise-smooth signal in Gaussian noise with a local-set dictionary.

use graphsig::detection::{detect, detection_threshold, rejection_rate};
use graphsig::dictionary::{lsps_dictionary, LspsModel};
use graphsig::graph::generators;
use graphsig::partition::{build_tree, PartitionMethod, StopRule};

fn main() -> graphsig::Result<()> {
    let graph = generators::grid(8, 8);
    let tree = build_tree(&graph, &PartitionMethod::SpanningTree, StopRule::FullDepth)?;
    let dict = lsps_dictionary(&graph, &tree, LspsModel::Bandlimited { bandwidth: 2 })?;
    let (sigma, delta, budget) = (1.0, 0.05, 4);
    let tau = detection_threshold(sigma, delta, dict.order, graph.num_nodes(), dict.depth);
    println!("{} atoms, order {}, depth {}, threshold {tau:.3}", dict.num_atoms(), dict.order, dict.depth);

    let null = vec![0.0; graph.num_nodes()];
    let planted: Vec<f64> = dict.atom(5).iter().map(|v| 8.0 * v).collect();
    println!("type-I rate  {:.3}", rejection_rate(&null, &dict, budget, sigma, delta, 400, 0)?);
    println!("power        {:.3}", rejection_rate(&planted, &dict, budget, sigma, delta, 400, 0)?);

    let r = detect(&planted, &dict, budget, sigma, delta)?;
    println!("noiseless planted atom: statistic {:.3}, reject {}, top atom {:?}", r.statistic, r.reject, r.top_atom);
    Ok(())
}

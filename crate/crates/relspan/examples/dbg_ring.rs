use relspan::cover::{tree_cover, ClusterMeta};
use relspan::instance::random_tree;
use relspan::metric::shortest_path_metric;

fn main() {
    let mut worst = (0.0f64, 0usize, 0usize);
    for seed in 0..40u64 {
        let tree = random_tree(64, seed);
        let m = shortest_path_metric(&tree).unwrap();
        let c = tree_cover(&tree, 0.5).unwrap();
        for cl in &c.clusters {
            if let Some(ClusterMeta::Ring { separator, radius }) = cl.meta {
                for &z in &cl.points {
                    let d = m.dist(separator, z);
                    assert!(d <= radius * (1.0 + 1e-9), "radius form violated");
                    let ratio = d / (cl.diameter / 2.0);
                    if ratio > worst.0 {
                        worst = (ratio, seed as usize, cl.points.len());
                    }
                }
            }
        }
    }
    println!("worst d(sep,z)/(diam/2) = {:.4} (seed {}, cluster size {})", worst.0, worst.1, worst.2);
}

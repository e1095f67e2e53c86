use georate::manifold::ManifoldModel;
use georate::increments::IncrementLaw;
use georate::weights::WeightRow;
use georate::walk::{Partition, WalkPath};

fn main() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let row = WeightRow::sample(128, 1).unwrap();
    let path = WalkPath::generate(&m, &IncrementLaw::Shell { r: 1.0 }, &row, &m.base_point(), 1).unwrap();
    let part = Partition::new(128, 8, 1.0, &m).unwrap();
    let pulls = path.tangent_pullbacks(&part).unwrap();
    let mut worst = (0.0f64, 0, 0);
    for (i, piece) in pulls.iter().enumerate() {
        let anchor = &path.points[part.cuts[i]];
        for (k, v) in piece.iter().enumerate() {
            let back = m.exp(anchor, v).unwrap();
            let d = m.distance(&back, &path.points[part.cuts[i] + k]);
            if d > worst.0 { worst = (d, i, k); }
        }
    }
    println!("worst roundtrip distance: {:?}", worst);
    let (_, i, k) = worst;
    let anchor = &path.points[part.cuts[i]];
    let target = &path.points[part.cuts[i] + k];
    println!("anchor->target dist {}", m.distance(anchor, target));
    let v = m.log_min(anchor, target).unwrap();
    println!("|v| = {}", m.norm(&v));
    let back = m.exp(anchor, &v).unwrap();
    println!("back {:?} target {:?}", back.coords, target.coords);
}

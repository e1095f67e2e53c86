use georate::increments::IncrementLaw;
use georate::rates::RateProblem;

fn main() {
    let p = RateProblem::new(1, IncrementLaw::Gaussian { variance: 1.0 }).unwrap();
    for lam in [0.5, 2.0, 5.0] {
        println!("gauss {lam}: gap {:.3e} psi {:.6e}", p.psi_doubling_gap(&[lam]).unwrap(), p.psi(&[lam]));
    }
    let p = RateProblem::new(2, IncrementLaw::Poisson { rate: 1.0 }).unwrap();
    for lam in [[0.5, -0.5], [3.0, 4.0], [5.0, 0.0]] {
        println!("poisson {lam:?}: gap {:.3e} psi {:.6e}", p.psi_doubling_gap(&lam).unwrap(), p.psi(&lam));
    }
    let p = RateProblem::new(1, IncrementLaw::Rademacher { r: 1.0 }).unwrap();
    for lam in [0.3, 0.7, 1.0, 1.25, 2.0, 5.0] {
        println!("rademacher {lam}: gap {:.3e}", p.psi_doubling_gap(&[lam]).unwrap());
    }
    let p = RateProblem::new(2, IncrementLaw::Shell { r: 1.0 }).unwrap();
    for lam in [0.5, 1.0, 1.25, 2.0] {
        println!("shell2 {lam}: gap {:.3e}", p.psi_doubling_gap(&[lam, 0.0]).unwrap());
    }
}

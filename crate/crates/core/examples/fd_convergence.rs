//! Prints FD eigenvalues of the quarter disk against the Bessel roots.

use sector_dra::oracle::{fd_transverse_eigs, FdProblem};
use std::time::Instant;

fn main() {
    let exact = [2.404_825_557_695_773, 5.135_622_301_840_683, 5.520_078_110_286_311];
    for n in [16, 32, 64, 128, 256] {
        let t = Instant::now();
        let p = FdProblem::new(1.0, std::f64::consts::FRAC_PI_2, n, n).unwrap();
        let k = fd_transverse_eigs(&p, 3).unwrap();
        let errs: Vec<String> =
            k.iter().zip(exact).map(|(a, e)| (a - e).abs() / e).map(|e| format!("{e:.3e}")).collect();
        println!("{n:4}  {k:?}  rel err {errs:?}  {:.2?}", t.elapsed());
    }
}

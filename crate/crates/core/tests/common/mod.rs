#![allow(dead_code)]

use blockdet::random::MatrixRng;
use blockdet::{block_det, BlockDetError, BlockMatrix, DenseMatrix, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random block matrix whose pivot blocks are all usable, plus the number of
/// draws that had to be discarded.
pub fn nonsingular_block_matrix(rng: &mut MatrixRng, nb: usize, n: usize) -> (BlockMatrix, usize) {
    let mut resamples = 0;
    loop {
        let bm = rng.block_matrix(nb, n);
        match block_det(&bm) {
            Ok(_) => return (bm, resamples),
            Err(BlockDetError::SingularPivotBlock { .. }) => resamples += 1,
            Err(e) => panic!("unexpected engine error: {e}"),
        }
    }
}

/// Dirac-representation gamma matrices γ⁰..γ³ and γ5, built independently of
/// the library's basis.
pub fn gammas() -> ([DenseMatrix; 4], DenseMatrix) {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let m = |rows: [[C64; 4]; 4]| DenseMatrix::from_rows(&rows.map(|r| r.to_vec())).unwrap();
    let g0 = m([[l, o, o, o], [o, l, o, o], [o, o, -l, o], [o, o, o, -l]]);
    let g1 = m([[o, o, o, l], [o, o, l, o], [o, -l, o, o], [-l, o, o, o]]);
    let g2 = m([[o, o, o, -i], [o, o, i, o], [o, i, o, o], [-i, o, o, o]]);
    let g3 = m([[o, o, l, o], [o, o, o, -l], [-l, o, o, o], [o, l, o, o]]);
    let g5 = m([[o, o, l, o], [o, o, o, l], [l, o, o, o], [o, l, o, o]]);
    ([g0, g1, g2, g3], g5)
}

pub fn combination(rng: &mut MatrixRng, basis: &[&DenseMatrix]) -> DenseMatrix {
    basis
        .iter()
        .map(|b| b.scalar_mul(rng.complex()))
        .reduce(|a, b| a.matadd(&b).unwrap())
        .unwrap()
}

/// `(S22, X)` with `X S22 = −S22 X` and `S22` invertible, from one of two
/// gamma-matrix families chosen by `family`.
pub fn anticommuting_pair(rng: &mut MatrixRng, family: usize) -> (DenseMatrix, DenseMatrix) {
    let ([g0, g1, g2, g3], g5) = gammas();
    let g123 = g1.matmul(&g2).unwrap().matmul(&g3).unwrap();
    match family % 2 {
        0 => {
            let s22 = g0.scalar_mul(c(1.0, 0.0) + rng.complex());
            (s22, combination(rng, &[&g1, &g2, &g3, &g5, &g123]))
        }
        _ => {
            let s22 = combination(rng, &[&g1, &g2]);
            (s22, combination(rng, &[&g0, &g3, &g5]))
        }
    }
}

use blockdet::njl::{eigen_energies, NjlParams};

/// NJL parameters away from degenerate spectra: all of `±E1..±E4` at least
/// 0.05 apart.
pub fn njl_draw(rng: &mut MatrixRng) -> NjlParams {
    loop {
        let p = NjlParams {
            mass: rng.uniform(0.1, 0.5),
            chemical_potential: rng.uniform(0.0, 0.6),
            gap: c(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)),
            momentum: [
                rng.uniform(-0.5, 0.5),
                rng.uniform(-0.5, 0.5),
                rng.uniform(-0.5, 0.5),
            ],
            probe_energy: c(rng.uniform(0.2, 1.5), rng.uniform(0.05, 0.3)),
        };
        let mut roots: Vec<f64> = eigen_energies(&p)
            .levels
            .iter()
            .flat_map(|l| [l.value, -l.value])
            .collect();
        roots.sort_by(f64::total_cmp);
        if roots.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return p;
        }
    }
}

/// The 48×48 matrix assembled straight from the Nambu ⊗ color ⊗ Dirac ⊗ flavor
/// tensor form, using only the independently written gamma matrices.
pub fn njl_from_tensor_form(p: &NjlParams) -> DenseMatrix {
    let ([g0, g1, g2, g3], g5) = gammas();
    let e = p.probe_energy;
    let mu = p.chemical_potential;
    let id4 = DenseMatrix::identity(4);
    let real = |x: f64| c(x, 0.0);
    let slash = g0
        .scalar_mul(e)
        .matsub(&g1.scalar_mul(real(p.momentum[0])))
        .unwrap()
        .matsub(&g2.scalar_mul(real(p.momentum[1])))
        .unwrap()
        .matsub(&g3.scalar_mul(real(p.momentum[2])))
        .unwrap();
    let diag = |sign: f64| {
        slash
            .matadd(&g0.scalar_mul(real(sign * mu)))
            .unwrap()
            .matsub(&id4.scalar_mul(real(p.mass)))
            .unwrap()
    };
    let o = c(0.0, 0.0);
    let i = c(0.0, 1.0);
    let tau2 = DenseMatrix::from_rows(&[vec![o, -i], vec![i, o]]).unwrap();
    let lambda2 = DenseMatrix::from_rows(&[vec![o, -i, o], vec![i, o, o], vec![o, o, o]]).unwrap();
    let id2 = DenseMatrix::identity(2);
    let id3 = DenseMatrix::identity(3);
    // color ⊗ Dirac ⊗ flavor inside each Nambu block
    let top_left = id3.kron(&diag(1.0)).kron(&id2);
    let bottom_right = id3.kron(&diag(-1.0)).kron(&id2);
    let pairing = lambda2.kron(&g5).kron(&tau2);
    let top_right = pairing.scalar_mul(p.gap);
    let bottom_left = pairing.scalar_mul(-p.gap.conj());
    blockdet::assemble_2x2(&top_left, &top_right, &bottom_left, &bottom_right).unwrap()
}

/// Order of vanishing of `f` at `x0`, estimated from `|f(x0+2h)| / |f(x0+h)|`.
pub fn vanishing_order(f: impl Fn(f64) -> ScaledDet, x0: f64, h: f64) -> f64 {
    (f(x0 + 2.0 * h).log10_abs() - f(x0 + h).log10_abs()) / 2f64.log10()
}

use blockdet::ScaledDet;

use proptest::prelude::*;

use eplab::dynamics::{bilinear_m, bilinear_n, energy_l2};
use eplab::initial::{algebraic_tail, bandlimited};
use eplab::io::report::{read_report_csv, write_report_csv, Table};
use eplab::io::snapshot::{decode, encode, SnapshotError};
use eplab::littlewood_paley::{build_lp_family, dyadic_block, high_part, low_cutoff};
use eplab::spectral::{dealias_field, lambda_s, sobolev_norm, TorusGrid, VelocityField};

fn rel_l2(a: &VelocityField, b: &VelocityField) -> f64 {
    energy_l2(&a.sub(b).unwrap()).sqrt() / energy_l2(b).sqrt().max(f64::MIN_POSITIVE)
}

fn grid_strategy() -> impl Strategy<Value = TorusGrid> {
    (1usize..=3, prop::sample::select(vec![1.0, 2.0, 4.0])).prop_map(|(d, scale)| {
        let n = [0, 64, 32, 12][d];
        TorusGrid::new(d, n, scale * std::f64::consts::TAU).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(grid in grid_strategy(), k in 1usize..=4, seed: u64) {
        let u = bandlimited(&grid, k, seed).unwrap();
        let physical: f64 = u.components().iter().flatten().map(|x| x * x).sum::<f64>() * grid.cell_volume();
        prop_assert!((physical - energy_l2(&u)).abs() <= 1e-12 * physical);
    }

    #[test]
    fn bessel_potential_inverts(grid in grid_strategy(), k in 1usize..=4, seed: u64, s in -3.0f64..4.0) {
        let u = bandlimited(&grid, k, seed).unwrap();
        prop_assert!(rel_l2(&lambda_s(&lambda_s(&u, s), -s), &u) < 1e-12);
        let norm = sobolev_norm(&u, s);
        prop_assert!((sobolev_norm(&lambda_s(&u, s), 0.0) - norm).abs() <= 1e-12 * norm);
    }

    #[test]
    fn forms_symmetric_and_bilinear(grid in grid_strategy(), seed: u64, a in -2.0f64..2.0) {
        let u = bandlimited(&grid, 3, seed).unwrap();
        let v = bandlimited(&grid, 3, seed ^ 0x5555).unwrap();
        let w = bandlimited(&grid, 2, seed.wrapping_add(1)).unwrap();
        prop_assert_eq!(bilinear_m(&u, &v).unwrap(), bilinear_m(&v, &u).unwrap());
        prop_assert_eq!(bilinear_n(&u, &v).unwrap(), bilinear_n(&v, &u).unwrap());
        let comb = u.lincomb(a, &w, 1.0).unwrap();
        let lhs = bilinear_n(&comb, &v).unwrap();
        let rhs = bilinear_n(&u, &v).unwrap().lincomb(a, &bilinear_n(&w, &v).unwrap(), 1.0).unwrap();
        prop_assert!(rel_l2(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn dealias_is_a_projection(grid in grid_strategy(), seed: u64) {
        let u = algebraic_tail(&grid, 1.5, seed).unwrap();
        let once = dealias_field(&u);
        prop_assert!(rel_l2(&dealias_field(&once), &once) < 1e-13);
        prop_assert!(rel_l2(&once, &u) < 1e-13);
    }

    #[test]
    fn blocks_sum_to_field(grid in grid_strategy(), seed: u64) {
        let fam = build_lp_family();
        let u = algebraic_tail(&grid, 2.0, seed).unwrap();
        let mut sum = VelocityField::zeros(grid);
        for j in -1..=fam.j_max(&grid) {
            sum = sum.add(&dyadic_block(&u, j, &fam)).unwrap();
        }
        prop_assert!(rel_l2(&sum, &u) < 1e-12);
        let n = 2;
        let split = low_cutoff(&u, n, &fam).unwrap().add(&high_part(&u, n, &fam).unwrap()).unwrap();
        prop_assert!(rel_l2(&split, &u) < 1e-13);
    }

    /// `(Id − S_n)` lives on `|ξ| ≥ ¾·2ⁿ`, so one derivative less buys `4/3·2⁻ⁿ`,
    /// and the tail shrinks as `n` grows.
    #[test]
    fn tail_decay_and_smoothing_gain(seed: u64, exponent in 3.0f64..5.0) {
        let fam = build_lp_family();
        let grid = TorusGrid::standard(2, 64).unwrap();
        let u = algebraic_tail(&grid, exponent, seed).unwrap();
        let s = 2.5;
        let mut last = f64::INFINITY;
        for n in 0..=5 {
            let tail = high_part(&u, n, &fam).unwrap();
            let hs = sobolev_norm(&tail, s);
            prop_assert!(hs <= last * (1.0 + 1e-12));
            prop_assert!(sobolev_norm(&tail, s - 1.0) <= 4.0 / 3.0 * (-(n as f64)).exp2() * hs * (1.0 + 1e-12));
            last = hs;
        }
    }

    #[test]
    fn snapshot_round_trip(grid in grid_strategy(), seed: u64, t in 0.0f64..1e3, alpha in 0.0f64..1.0) {
        let u = algebraic_tail(&grid, 2.0, seed).unwrap();
        let bytes = encode(&u, t, alpha);
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(back.field, u);
        prop_assert_eq!(back.header.time.to_bits(), t.to_bits());
        prop_assert_eq!(back.header.alpha.to_bits(), alpha.to_bits());
        let mut bad = bytes.clone();
        bad[0] ^= 0xff;
        prop_assert!(matches!(decode(&bad), Err(SnapshotError::BadMagic(_))));
        let short = decode(&bytes[..bytes.len() - 1]);
        prop_assert!(matches!(short, Err(SnapshotError::SizeMismatch { .. })), "truncated file accepted");
    }

    #[test]
    fn csv_floats_round_trip(values in prop::collection::vec(any::<f64>(), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut table = Table::new(["x"]);
        for v in &values {
            table.push_floats(&[*v]).unwrap();
        }
        write_report_csv(&table, &path).unwrap();
        let back = read_report_csv(&path).unwrap().float_column("x").unwrap();
        for (v, b) in values.iter().zip(&back) {
            let b = b.unwrap();
            if v.is_nan() {
                prop_assert!(b.is_nan());
            } else {
                prop_assert_eq!(b.to_bits(), v.to_bits());
            }
        }
    }
}

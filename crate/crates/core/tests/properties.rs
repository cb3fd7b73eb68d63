//! Randomized invariants of the field, polynomial and spectral layers.

mod common;

use std::cmp::Ordering;

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultradyn::dynamics::{linearization_radius, remainder_lipschitz};
use ultradyn::field::{compare_threshold, Padic, Prime, Scalar, Threshold, Val, Valuation};
use ultradyn::polyalg::{newton_polygon, slope_factorization, Matrix, Polynomial};
use ultradyn::spectral::{adapted_norm, spectrum_abs};

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-10_000i64..=10_000, 1i64..=500).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn val_of(q: &BigRational, p: u64) -> Option<i64> {
    Scalar::Exact(q.clone()).valuation(Prime::new(p).unwrap())
}

/// `v(exact - approx)` reaches the absolute precision of `approx`.
fn agrees(exact: &BigRational, approx: &Padic, p: u64) -> bool {
    let Some(abs) = approx.abs_precision() else {
        return &approx.to_rational() == exact;
    };
    let diff = exact - approx.to_rational();
    val_of(&diff, p).is_none_or(|v| v >= abs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ultrametric_inequality(p in prime(), x in nonzero_rational(), y in nonzero_rational()) {
        let s = &x + &y;
        let (vx, vy) = (val_of(&x, p).unwrap(), val_of(&y, p).unwrap());
        if let Some(vs) = val_of(&s, p) {
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        } else {
            prop_assert_eq!(vx, vy);
        }
    }

    #[test]
    fn dominated_sum_keeps_the_valuation(p in prime(), x in nonzero_rational(), y in nonzero_rational(), prec in 4u32..30) {
        let pr = Prime::new(p).unwrap();
        let (a, b) = (Padic::from_rational(&x, pr, prec), Padic::from_rational(&y, pr, prec));
        let s = &a + &b;
        let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
        if va != vb {
            prop_assert_eq!(s.valuation(), Some(va.min(vb)));
        }
        prop_assert!(agrees(&(&x + &y), &s, p));
    }

    #[test]
    fn precision_propagates_through_arithmetic(
        p in prime(),
        x in nonzero_rational(),
        y in nonzero_rational(),
        px in 2u32..25,
        py in 2u32..25,
    ) {
        let pr = Prime::new(p).unwrap();
        let (a, b) = (Padic::from_rational(&x, pr, px), Padic::from_rational(&y, pr, py));
        let m = &a * &b;
        prop_assert!(agrees(&(&x * &y), &m, p));
        // relative precision of a product is the smaller of the two
        prop_assert_eq!(m.rel_precision(), px.min(py));
        let d = a.checked_div(&b).unwrap();
        prop_assert!(agrees(&(&x / &y), &d, p));
        prop_assert!(agrees(&(&x - &y), &(&a - &b), p));
    }

    #[test]
    fn threshold_comparison_matches_floating_point(p in prime(), n in 1i64..5000, d in 1i64..5000, v in -12i64..12) {
        let a = Threshold::from_ratio(n, d).unwrap();
        let lhs = n as f64 / d as f64;
        let rhs = (p as f64).powi(-v as i32);
        prop_assume!((lhs - rhs).abs() > 1e-9 * rhs);
        let want = lhs.partial_cmp(&rhs).unwrap();
        prop_assert_eq!(compare_threshold(&a, Valuation::int(v), Prime::new(p).unwrap()), want);
    }

    #[test]
    fn fractional_threshold_comparison(p in prime(), n in 1i64..500, d in 1i64..500, r in -20i64..20, s in 1i64..5) {
        let a = Threshold::from_ratio(n, d).unwrap();
        let v = Val::new(r, s);
        let lhs = (n as f64 / d as f64).ln();
        let rhs = -(r as f64 / s as f64) * (p as f64).ln();
        prop_assume!((lhs - rhs).abs() > 1e-9);
        let want = if lhs < rhs { Ordering::Less } else { Ordering::Greater };
        prop_assert_eq!(compare_threshold(&a, Valuation::Finite(v), Prime::new(p).unwrap()), want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn newton_polygon_of_a_product_of_linear_factors(p in prime(), seed in any::<u64>(), deg in 1usize..7, zeros in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut roots = Vec::new();
        let mut want: Vec<Valuation> = vec![Valuation::Infinite; zeros];
        for _ in 0..deg {
            let k = rng.gen_range(-3..=3);
            roots.push(p_pow(p, k) * unit(&mut rng, p));
            want.push(Valuation::int(k));
        }
        roots.extend(std::iter::repeat_n(BigRational::zero(), zeros));
        want.sort_by(|a, b| b.cmp(a));
        let poly = Polynomial::from_roots(&roots);
        let np = newton_polygon(&poly, Prime::new(p).unwrap()).unwrap();
        let got: Vec<Valuation> =
            np.root_valuations().into_iter().flat_map(|(v, m)| std::iter::repeat_n(v, m)).collect();
        prop_assert_eq!(got, want);
        prop_assert_eq!(np.degree(), deg + zeros);
    }

    #[test]
    fn slope_factors_multiply_back(p in prime(), seed in any::<u64>(), deg in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roots: Vec<BigRational> = (0..deg)
            .map(|_| {
                let k = rng.gen_range(-2..=2);
                p_pow(p, k) * unit(&mut rng, p)
            })
            .collect();
        let poly = Polynomial::from_roots(&roots);
        let c = ctx(p);
        let factors = slope_factorization(&poly, &c).unwrap();
        let pr = c.p;
        let mut product = Polynomial::one();
        let mut last: Option<Valuation> = None;
        for f in &factors {
            let np = newton_polygon(&f.factor, pr).unwrap();
            let vals = np.root_valuations();
            prop_assert_eq!(vals.len(), 1, "factor {:?} has several slopes", f.factor);
            prop_assert_eq!(vals[0], (f.root_valuation, f.multiplicity));
            if let Some(l) = last {
                prop_assert!(f.root_valuation < l);
            }
            last = Some(f.root_valuation);
            product = product.mul(&f.factor);
        }
        prop_assert_eq!(product.degree(), poly.degree());
        let n = factors.iter().map(|f| f.certified_precision).min().unwrap() as i64;
        for i in 0..=deg {
            let d = &product.coeff(i) - &poly.coeff(i);
            if let Some(v) = d.valuation(pr) {
                prop_assert!(v >= n, "coefficient {} differs at valuation {}", i, v);
            }
        }
    }

    #[test]
    fn kernel_basis_is_annihilated(p in prime(), seed in any::<u64>(), rows in 1usize..5, cols in 1usize..5, rank in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rank.min(rows).min(cols);
        let left = Matrix::from_fn(rows, rank, |_, _| Scalar::Exact(rat(rng.gen_range(-9..=9), 1)));
        let right = Matrix::from_fn(rank, cols, |_, _| {
            let k = rng.gen_range(-2..=2);
            element(&mut rng, p, k)
        });
        let m = if rank == 0 { Matrix::zeros(rows, cols) } else { left.mul(&right) };
        let c = ctx(p);
        let ker = m.kernel_basis(&c).unwrap();
        let r = m.gauss_jordan(&c, cols).unwrap().rank();
        prop_assert!(r <= rank);
        prop_assert_eq!(r + ker.len(), cols);
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(Scalar::is_certainly_zero));
            prop_assert!(is_nonzero(v));
        }
    }

    #[test]
    fn spectrum_is_invariant_under_conjugation(p in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let pm = planted(&mut rng, p, d, &Shape::full(3));
        let (t, t_inv) = conjugator(&mut rng, p, d);
        let c = ctx(p);
        let s1 = spectrum_abs(&pm.matrix, &c).unwrap();
        let s2 = spectrum_abs(&t.mul(&pm.matrix).mul(&t_inv), &c).unwrap();
        prop_assert_eq!(s1, s2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn remainder_lipschitz_decreases_with_the_radius(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PRIMES[rng.gen_range(0..3)];
        let d = rng.gen_range(1..=3);
        let shape = Shape { max_dim: 3, valuations: vec![-1, 0, 1], jordan: true, ramified: false, nilpotent: false };
        let pm = planted(&mut rng, p, d, &shape);
        let lo = rng.gen_range(-1..=1);
        let f = with_linear_part(&pm.matrix, &nonlinear(&mut rng, p, d, 3, lo));
        let c = ctx(p);
        let norm = adapted_norm(&pm.matrix, &c, None).unwrap();
        let mut prev = remainder_lipschitz(&f, -4, &norm, &c).unwrap();
        for k in -3..12 {
            let cur = remainder_lipschitz(&f, k, &norm, &c).unwrap();
            prop_assert!(cur >= prev, "Lip on B(p^-{}) is p^-({}) but the larger ball gave p^-({})", k, cur, prev);
            prev = cur;
        }
    }

    #[test]
    fn local_isometry_inside_the_linearization_radius(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PRIMES[rng.gen_range(0..3)];
        let d = rng.gen_range(1..=3);
        let shape = Shape { max_dim: 3, valuations: vec![-1, 0, 1, 2], jordan: true, ramified: true, nilpotent: false };
        let pm = planted(&mut rng, p, d, &shape);
        let lo = rng.gen_range(-1..=1);
        let f = with_linear_part(&pm.matrix, &nonlinear(&mut rng, p, d, 3, lo));
        let c = ctx(p);
        let norm = adapted_norm(&pm.matrix, &c, None).unwrap();
        let k = linearization_radius(&f, &norm, &c).unwrap();
        for _ in 0..10 {
            let (ky, kz) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let y = shell_point(&mut rng, &norm, k + ky);
            let z = shell_point(&mut rng, &norm, k + kz);
            let dz: Vec<Scalar> = z.iter().zip(&y).map(|(a, b)| a - b).collect();
            let df: Vec<Scalar> = f.eval(&z).iter().zip(&f.eval(&y)).map(|(a, b)| a - b).collect();
            prop_assert_eq!(
                norm.norm_valuation(&df, &c).unwrap(),
                norm.norm_valuation(&pm.matrix.mul_vec(&dz), &c).unwrap()
            );
        }
    }
}

#[test]
fn threshold_oracle_sanity() {
    // a = 1/2 is exactly |2|_2 and lies strictly between |4|_2 and |1|_2
    let p = Prime::new(2).unwrap();
    let a = Threshold::new(rat(1, 2)).unwrap();
    assert_eq!(compare_threshold(&a, Valuation::int(1), p), Ordering::Equal);
    assert_eq!(compare_threshold(&a, Valuation::int(2), p), Ordering::Greater);
    assert_eq!(compare_threshold(&a, Valuation::int(0), p), Ordering::Less);
}

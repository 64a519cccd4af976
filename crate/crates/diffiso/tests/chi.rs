use d6lab_core::family::D6Params;
use d6lab_core::fields::PrimeField;
use d6lab_diffiso::chi::{chi_of_s, chi_of_t};
use d6lab_diffiso::lambda::LAMBDAS;
use d6lab_diffiso::{chi_composed, chi_plain, DiffPoly, DiffRational, DiffisoError, LambdaChoice, Rationals, Scalars, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn same<C: Clone + PartialEq, K: Scalars<C = C>>(k: &K, a: &DiffRational<C>, b: &DiffRational<C>) -> bool {
    a.num.mul(k, &b.den) == b.num.mul(k, &a.den)
}

#[test]
fn chi_of_identity() {
    let k = Rationals;
    let t = DiffRational::from_poly(&k, DiffPoly::var(&k, Var::T));
    let chi = chi_plain(&k, &t, Var::T).unwrap();
    let expected = DiffRational::new(
        &k,
        DiffPoly::from_ints(&k, Var::T, &[1, -1, 1]),
        DiffPoly::from_ints(&k, Var::T, &[0, 0, 4, -8, 4]),
    )
    .unwrap();
    assert!(same(&k, &chi, &expected), "{chi:?}");
}

#[test]
fn constant_lambda_is_rejected() {
    let k = Rationals;
    let c = DiffRational::from_poly(&k, DiffPoly::from_i64(&k, 5));
    assert_eq!(chi_plain(&k, &c, Var::T), Err(DiffisoError::ConstantInput));
    assert_eq!(chi_composed(&k, &DiffRational::from_poly(&k, DiffPoly::from_i64(&k, 5))), Err(DiffisoError::ConstantInput));
}

#[test]
fn lambda_six_golden() {
    let k = Rationals;
    let chi = chi_of_t(&k, LambdaChoice::Six);
    let num = chi.num.as_univariate(&k, Var::T).unwrap();
    let den = chi.den.as_univariate(&k, Var::T).unwrap();
    assert_eq!(num.len() - 1, 12);
    assert_eq!(den.len() - 1, 14);
    // Denominator normalized monic.
    assert_eq!(den[14], q(1));
    assert_eq!(num[12], Q::new(BigInt::from(GOLDEN_SIX_LEAD.0), BigInt::from(GOLDEN_SIX_LEAD.1)));
}

const GOLDEN_SIX_LEAD: (i64, i64) = (1, 4);

/// Taylor coefficients of n(x0 + h) / d(x0 + h) up to h^3 by exact series
/// division.
fn taylor(n: &[i64], d: &[i64], x0: &Q) -> [Q; 4] {
    let shift = |c: &[i64]| -> Vec<Q> {
        // Coefficients of c(x0 + h) in h.
        let mut out = vec![Q::zero(); c.len()];
        for (i, &ci) in c.iter().enumerate() {
            let mut binom = Q::one();
            let mut pow = Q::one();
            for _ in 0..i {
                pow *= x0;
            }
            let x_inv = if x0.is_zero() { Q::zero() } else { Q::one() / x0 };
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let term = &binom * &pow * q(ci);
                *slot += term;
                binom = binom * q((i - j) as i64) / q(j as i64 + 1);
                pow = if x0.is_zero() { if j + 1 == i { Q::one() } else { Q::zero() } } else { &pow * &x_inv };
            }
        }
        out
    };
    let (ns, ds) = (shift(n), shift(d));
    let mut y: [Q; 4] = Default::default();
    for m in 0..4 {
        let mut acc = ns.get(m).cloned().unwrap_or_default();
        for i in 1..=m {
            acc -= ds.get(i).cloned().unwrap_or_default() * &y[m - i];
        }
        y[m] = acc / &ds[0];
    }
    y
}

fn chi_from_taylor(y: &[Q; 4]) -> Q {
    let (y0, y1, y2, y3) = (&y[0], &y[1], q(2) * &y[2], q(6) * &y[3]);
    let first = (q(2) * y1 * &y3 - q(3) * &y2 * &y2) / (q(4) * y1 * y1);
    let ym1 = y0 - q(1);
    let second = y1 * y1 * (y0 * y0 - y0 + q(1)) / (q(4) * y0 * y0 * &ym1 * &ym1);
    first + second
}

#[test]
fn chi_plain_matches_taylor_oracle() {
    let k = Rationals;
    for l in LAMBDAS {
        let (n, d) = l.int_coeffs();
        let chi = chi_of_t(&k, l);
        for x0 in [Q::new(BigInt::from(7), BigInt::from(5)), q(5), Q::new(BigInt::from(-11), BigInt::from(3))] {
            let expected = chi_from_taylor(&taylor(&n, &d, &x0));
            let z = Q::zero();
            let got = chi.eval_all(&k, &[x0.clone(), z.clone(), z.clone(), z.clone(), z]).unwrap();
            assert_eq!(got, expected, "lambda {l} at {x0}");
        }
    }
}

#[test]
fn composed_chi_has_universal_leading_terms() {
    // d chi / d s3 = 1 / (2 s1) and d^2 chi / d s2^2 = -3 / (2 s1^2).
    let k = Rationals;
    let s1 = DiffPoly::var(&k, Var::S1);
    let want3 = DiffRational::new(&k, DiffPoly::from_i64(&k, 1), s1.scale(&k, &q(2))).unwrap();
    let want22 = DiffRational::new(&k, DiffPoly::from_i64(&k, -3), s1.mul(&k, &s1).scale(&k, &q(2))).unwrap();
    for l in LAMBDAS {
        let chi = chi_of_s(&k, l);
        assert!(same(&k, &chi.derivative(&k, Var::S3), &want3), "s3 term for {l}");
        assert!(same(&k, &chi.derivative(&k, Var::S2).derivative(&k, Var::S2), &want22), "s2^2 term for {l}");
    }
}

#[test]
fn composed_chi_degenerates_to_plain() {
    let f = PrimeField::new(1_000_003).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for l in LAMBDAS {
        let (cs, ct) = (chi_of_s(&f, l), chi_of_t(&f, l));
        for _ in 0..20 {
            let t0 = rng.gen_range(2..f.p());
            let a = cs.eval_all(&f, &[t0, t0, 1, 0, 0]);
            let b = ct.eval_all(&f, &[t0, 0, 0, 0, 0]);
            assert_eq!(a, b, "lambda {l} at {t0}");
        }
    }
}

#[test]
fn composed_chi_matches_composition_oracle() {
    // s(t) = t^3 - t + 5: compare chi(lambda(s(t))) computed as a plain
    // rational function of t with the chain-rule expansion at s = s(t).
    let k = PrimeField::new(1_000_003).unwrap();
    let s_of_t = DiffRational::from_poly(&k, DiffPoly::from_ints(&k, Var::T, &[5, -1, 0, 1]));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for l in LAMBDAS {
        let composed = l.rational(&k, Var::S).substitute(&k, Var::S, &s_of_t);
        let direct = chi_plain(&k, &composed, Var::T).unwrap();
        let chain = chi_of_s(&k, l);
        for _ in 0..10 {
            let t0: u64 = rng.gen_range(2..k.p());
            let s0 = k.add(k.sub(k.pow(t0, 3), t0), 5);
            let s1 = k.sub(k.mul(3, k.mul(t0, t0)), 1);
            let pt = [t0, s0, s1, k.mul(6, t0), 6];
            let a = chain.eval_all(&k, &pt);
            let b = direct.eval_all(&k, &[t0, 0, 0, 0, 0]);
            assert_eq!(a, b, "lambda {l} at {t0}");
        }
    }
}

#[test]
fn base_lambda_golden_and_family_agreement() {
    assert_eq!(LambdaChoice::Base.int_coeffs(), (vec![-3, 8, -6, 0, 1], vec![-3, -8, -6, 0, 1]));
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [101u64, 1009, 65_537, 1_000_003] {
        let f = PrimeField::new(p).unwrap();
        let mut seen = 0;
        while seen < 20 {
            let u = rng.gen_range(2..p);
            let Some(d) = D6Params::formal(f, u, false) else { continue };
            seen += 1;
            assert_eq!(LambdaChoice::Base.eval_in(&f, u), Some(d.base_legendre().0), "p {p} u {u}");
            let orbit = d.orbit_prym_curves();
            let want = [(LambdaChoice::Six, 0), (LambdaChoice::ThreeA, 6), (LambdaChoice::ThreeB, 9), (LambdaChoice::ThreeC, 12)];
            for (l, idx) in want {
                assert_eq!(l.eval_in(&f, u), Some(orbit[idx].lambda), "{l} at p {p} u {u}");
            }
        }
    }
}

#[test]
fn lambda_labels_round_trip() {
    for l in LAMBDAS {
        assert_eq!(l.label().parse::<LambdaChoice>().unwrap(), l);
    }
    assert!("7".parse::<LambdaChoice>().is_err());
}

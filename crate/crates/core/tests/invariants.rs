use std::sync::Arc;

use latsym::heat::dilation::{dilation_lattice_residuals, self_similar_residuals};
use latsym::heat::ztransform::{contour_quadrature_i, gamma_recurrence_sides, q_polynomial, z_transform_i};
use latsym::heat::{heat_evolve, HeatScheme};
use latsym::lattice::scheme_residual;
use latsym::scalar::{format_rational, parse_rational, rat};
use latsym::symmetry::{apply_linear_symmetry, heat_operator, HeatOperator};
use latsym::toda::{solve_nonisospectral_stationary, FamilyForm, NonisospectralFamily};
use latsym::toda::{ab_system_residual, dttl_ab_step, dttl_exponent_balance, random_ab_state, translational_family, AbState, StepOptions};
use latsym::{Field, LatticeGrid, Window};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

fn positive_rational() -> impl Strategy<Value = BigRational> {
    (1i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn heat_row(scheme: &HeatScheme<BigRational>, values: &[i64]) -> Field<BigRational> {
    let w = Window::new((0, values.len() as i64 - 1), (0, 0));
    let grid = Arc::new(scheme.grid(w, rat(0, 1), rat(0, 1)).unwrap());
    Field::from_fn(grid, |m, _, _, _| rat(values[m as usize], 1))
}

fn exact_heat_solution(c: &BigRational, values: &[i64], steps: usize) -> Field<BigRational> {
    let scheme = HeatScheme::from_c(c.clone(), rat(1, 2)).unwrap();
    heat_evolve(&heat_row(&scheme, values), steps, &scheme).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn rationals_survive_formatting(r in small_rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn heat_evolution_is_linear(
        f in proptest::collection::vec(-9i64..10, 11),
        g in proptest::collection::vec(-9i64..10, 11),
        a in small_rational(),
        b in small_rational(),
        c in positive_rational(),
    ) {
        let scheme = HeatScheme::from_c(c, rat(1, 3)).unwrap();
        let (rf, rg) = (heat_row(&scheme, &f), heat_row(&scheme, &g));
        let lhs = heat_evolve(&rf.combine(&a, &rg, &b).unwrap(), 4, &scheme).unwrap();
        let rhs = heat_evolve(&rf, 4, &scheme).unwrap().combine(&a, &heat_evolve(&rg, 4, &scheme).unwrap(), &b).unwrap();
        prop_assert_eq!(lhs.values(), rhs.values());
    }

    #[test]
    fn evolved_fields_solve_the_scheme_exactly(values in proptest::collection::vec(-9i64..10, 13), c in positive_rational()) {
        let f = exact_heat_solution(&c, &values, 5);
        let scheme = HeatScheme::from_c(c, rat(1, 2)).unwrap();
        prop_assert!(scheme_residual(&scheme.equation(), &f).unwrap().max_abs.is_zero());
    }

    #[test]
    fn heat_operators_map_solutions_to_solutions(values in proptest::collection::vec(-9i64..10, 17), c in positive_rational()) {
        let f = exact_heat_solution(&c, &values, 6);
        let scheme = HeatScheme::from_c(c, rat(1, 2)).unwrap();
        for op in HeatOperator::ALL {
            let image = apply_linear_symmetry(&heat_operator(op, scheme.sigma_x(), scheme.sigma_t()), &f).unwrap();
            let r = scheme_residual(&scheme.equation(), &image).unwrap().max_abs;
            prop_assert!(r.is_zero(), "{:?} leaves residual {}", op, r);
        }
    }

    #[test]
    fn coefficient_extraction_matches_contour_quadrature(big_n in -3i64..12, n in 0u32..8, c in positive_rational()) {
        let exact = z_transform_i(big_n, n, &c).unwrap().to_f64().unwrap();
        let quad = contour_quadrature_i(big_n, n, c.to_f64().unwrap(), 64);
        prop_assert!((exact - quad).abs() < 1e-9, "exact {} quadrature {}", exact, quad);
    }

    #[test]
    fn powers_of_q_multiply(c in positive_rational(), i in 0u32..5, j in 0u32..5) {
        let q = q_polynomial(&c);
        let (pi, pj, pij) = (q.pow(i), q.pow(j), q.pow(i + j));
        for k in 0..=(2 * (i + j)) as i64 {
            let conv = (0..=k).fold(BigRational::zero(), |acc, l| acc + pi.coeff(l) * pj.coeff(k - l));
            prop_assert_eq!(conv, pij.coeff(k));
        }
    }

    #[test]
    fn gamma_sequence_solves_its_recurrence(big_n in -4i64..8, n in 0i64..8, c in positive_rational(), g0 in small_rational()) {
        let (lhs, rhs) = gamma_recurrence_sides(big_n, n, &c, &g0).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn self_similar_data_is_exact(c in positive_rational(), g0 in small_rational()) {
        let (reduced, invariance) = self_similar_residuals(&c, &g0, Window::new((-3, 3), (1, 4))).unwrap();
        prop_assert!(reduced.is_zero() && invariance.is_zero());
    }

    #[test]
    fn dilation_variable_satisfies_its_lattice(c in 0.1f64..4.0, m0 in -3i64..4, n0 in -5i64..0) {
        let (space, time) = dilation_lattice_residuals(c, m0, n0, Window::new((-4, 4), (0, 5))).unwrap();
        prop_assert!(space < 1e-12 && time < 1e-12, "space {} time {}", space, time);
    }

    #[test]
    fn translational_family_balances_exactly(a in small_rational(), b in small_rational(), c in small_rational(), d in small_rational()) {
        let grid = Arc::new(LatticeGrid::toda(Window::new((-3, 3), (-3, 3)), rat(1, 1), rat(1, 1)).unwrap());
        let u = translational_family(grid, [a, b, c, d]);
        prop_assert!(dttl_exponent_balance(&u).unwrap().max_abs.is_zero());
    }

    #[test]
    fn corrected_nonisospectral_family_is_exact(big_a in small_rational(), big_b in small_rational(), m in 0i64..4) {
        let fam = NonisospectralFamily::new(big_a, big_b, m, FamilyForm::Corrected);
        let s = solve_nonisospectral_stationary(&fam, (2, 10)).unwrap();
        prop_assert!(s.recurrence_residual.is_zero());
        prop_assert!(s.flow_residual_a.is_zero() && s.flow_residual_b.is_zero());
    }

    #[test]
    fn ab_states_round_trip_through_json(seed in 0u64..1000, lo in -6i64..6, len in 1usize..9) {
        let s = random_ab_state(seed, 0, lo, len, 0.2).unwrap();
        let text = serde_json::to_string(&s.to_document()).unwrap();
        let back = AbState::<f64>::from_document(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn ab_step_solves_the_ab_system(seed in 0u64..1000, alpha in 1.5f64..4.0) {
        let s = random_ab_state(seed, 0, -3, 6, 0.1).unwrap();
        let next = dttl_ab_step(&s, &alpha, StepOptions::default()).unwrap().state;
        let range = (s.support_lo() - 4, s.support_hi() + 4);
        let (ra, rb) = ab_system_residual(&s, &next, &alpha, range, range);
        prop_assert!(ra < 1e-10 && rb < 1e-10, "residuals {} {}", ra, rb);
    }

    #[test]
    fn rational_fields_round_trip_through_json_and_csv(values in proptest::collection::vec((-30i64..30, 1i64..6), 12)) {
        let grid = Arc::new(LatticeGrid::heat(Window::new((-1, 2), (0, 2)), rat(1, 2), rat(1, 3), rat(1, 5), rat(-2, 7)).unwrap());
        let f = Field::from_fn(grid, |m, n, _, _| {
            let (p, q) = values[((n * 4) + m + 1) as usize];
            rat(p, q)
        });
        let mut json = Vec::new();
        f.write_json(&mut json).unwrap();
        prop_assert_eq!(&Field::<BigRational>::read_json(json.as_slice()).unwrap(), &f);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        prop_assert_eq!(&Field::<BigRational>::read_csv(csv.as_slice()).unwrap(), &f);
    }
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deligne_core::cv_map::{cv, cv_inverse, is_c_parameter};
use deligne_core::enumerate::{random_class, random_nilpotent};
use deligne_core::expr::{format_class, parse_class};
use deligne_core::lfactor::l_class;
use deligne_core::weil_model::ModelConfig;
use deligne_core::{DeligneClass, Error, Indec, WeilModel};

fn model(k: usize) -> WeilModel {
    [WeilModel::m0, WeilModel::m1, WeilModel::m2][k % 3]()
}

fn classes(m: &WeilModel, seed: u64, n: usize) -> Vec<DeligneClass> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_class(m, &mut rng, 3, 3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semiring_laws(k in 0usize..3, seed in any::<u64>()) {
        let m = model(k);
        let v = classes(&m, seed, 3);
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let t = |a: &DeligneClass, b: &DeligneClass| a.tensor(b, &m).unwrap();
        prop_assert_eq!(x.direct_sum(y), y.direct_sum(x));
        prop_assert_eq!(t(x, y), t(y, x));
        prop_assert_eq!(t(&t(x, y), z), t(x, &t(y, z)));
        prop_assert_eq!(t(x, &y.direct_sum(z)), t(x, y).direct_sum(&t(x, z)));
        let one = DeligneClass::single(Indec::atom(1, m.trivial()));
        prop_assert_eq!(&t(x, &one), x);
        prop_assert!(t(x, &DeligneClass::zero()).is_zero());
        prop_assert_eq!(t(x, y).dim(&m), x.dim(&m) * y.dim(&m));
    }

    #[test]
    fn dual_is_an_involutive_homomorphism(k in 0usize..3, seed in any::<u64>()) {
        let m = model(k);
        let v = classes(&m, seed, 2);
        let (x, y) = (&v[0], &v[1]);
        prop_assert_eq!(&x.dual(&m).dual(&m), x);
        prop_assert_eq!(x.tensor(y, &m).unwrap().dual(&m), x.dual(&m).tensor(&y.dual(&m), &m).unwrap());
        prop_assert_eq!(x.direct_sum(y).dual(&m), x.dual(&m).direct_sum(&y.dual(&m)));
    }

    #[test]
    fn print_parse_round_trip(k in 0usize..3, seed in any::<u64>()) {
        let m = model(k);
        for x in classes(&m, seed, 4) {
            let text = format_class(&m, &x);
            prop_assert_eq!(parse_class(&m, &text).unwrap(), x, "{}", text);
        }
    }

    #[test]
    fn cv_round_trips(k in 0usize..3, seed in any::<u64>()) {
        let m = model(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_nilpotent(&m, &mut rng, 5, 4);
        let y = cv(&m, &x).unwrap();
        prop_assert!(is_c_parameter(&m, &y));
        prop_assert_eq!(cv_inverse(&m, &y).unwrap(), x.clone());
        prop_assert_eq!(y.support(&m), x.support(&m));
        prop_assert_eq!(cv(&m, &x.dual(&m)).unwrap(), y.dual(&m));
    }

    #[test]
    fn l_factor_is_multiplicative(k in 0usize..3, seed in any::<u64>()) {
        let m = model(k);
        let v = classes(&m, seed, 2);
        prop_assert_eq!(l_class(&m, &v[0].direct_sum(&v[1])), l_class(&m, &v[0]).mul(&l_class(&m, &v[1])));
    }

    #[test]
    fn random_character_models_validate(
        ell in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
        q in 2i64..40,
        tame in prop::collection::vec(1u32..4, 0..2),
    ) {
        prop_assume!(q % ell as i64 != 0);
        let m = WeilModel::character(ell, q, &tame, 1).unwrap();
        prop_assert!(m.validate().is_ok(), "{}", m.validate());
        let again = ModelConfig::from_json(&serde_json::to_string(m.config()).unwrap()).unwrap().build().unwrap();
        prop_assert_eq!(again.num_atoms(), m.num_atoms());
    }
}

fn m0_as_table(square_of_nu: &str) -> String {
    format!(
        r#"{{"kind":"table","ell":3,"e":2,"q":2,
            "atoms":[{{"name":"nu^0","dim":1,"unramified":true,"frob_eig":1}},
                     {{"name":"nu^1","dim":1,"unramified":true,"frob_eig":2}}],
            "twist":[1,0],"dual":[0,1],
            "fusion":{{"nu^0*nu^0":["nu^0"],"nu^0*nu^1":["nu^1"],"nu^1*nu^1":["{square_of_nu}"]}}}}"#
    )
}

#[test]
fn table_copy_of_m0_agrees_with_m0() {
    let t = ModelConfig::from_json(&m0_as_table("nu^0")).unwrap().build().unwrap();
    assert!(t.validate().is_ok());
    let m0 = WeilModel::m0();
    for s in ["[0,1]*[0,2]", "nu^1*(nu^0 + nu^1)", "[0,1]*C(nu^0)"] {
        let a = format_class(&t, &parse_class(&t, s).unwrap());
        assert_eq!(a, format_class(&m0, &parse_class(&m0, s).unwrap()), "{s}");
    }
}

#[test]
fn mutated_fusion_entry_is_rejected() {
    let built = ModelConfig::from_json(&m0_as_table("nu^1")).unwrap().build();
    match built {
        Err(Error::InvalidModel(report)) => assert!(report.contains("fusion"), "{report}"),
        Ok(m) => assert!(!m.validate().is_ok()),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn mutated_twist_entry_is_rejected() {
    let text = m0_as_table("nu^0").replace(r#""twist":[1,0]"#, r#""twist":[1,1]"#);
    let built = ModelConfig::from_json(&text).unwrap().build();
    assert!(matches!(built, Err(Error::InvalidModel(_))) || !built.unwrap().validate().is_ok());
}

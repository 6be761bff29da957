use galerkin_nn::{Activation, ActivationSpec, ShallowNetwork};
use galerkin_nn_cli::checkpoint::{read_binary, read_csv, write_binary, write_csv};
use proptest::prelude::*;

fn bits(n: &ShallowNetwork) -> Vec<u64> {
    let mut v: Vec<u64> = n.weights().iter().chain(n.biases()).chain(n.coeffs()).map(|x| x.to_bits()).collect();
    v.push(n.activation().scale.to_bits());
    v
}

fn network() -> impl Strategy<Value = ShallowNetwork> {
    (1usize..=2, 1usize..=16, 1e-3f64..1e3, any::<bool>()).prop_flat_map(|(d, n, beta, relu)| {
        let float = prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1.0f64..1.0];
        (
            proptest::collection::vec(float.clone(), d * n),
            proptest::collection::vec(float.clone(), n),
            proptest::collection::vec(float, n),
        )
            .prop_map(move |(w, b, c)| {
                let base = if relu { Activation::Relu } else { Activation::Tanh };
                ShallowNetwork::new(d, w, b, c, ActivationSpec::new(base, beta).unwrap()).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn both_encodings_are_bit_exact(net in network()) {
        let mut bin = Vec::new();
        write_binary(&net, &mut bin).unwrap();
        let a = read_binary(bin.as_slice()).unwrap();
        prop_assert_eq!(bits(&a), bits(&net));
        prop_assert_eq!(a.activation().base, net.activation().base);

        let mut text = Vec::new();
        write_csv(&net, &mut text).unwrap();
        let b = read_csv(text.as_slice()).unwrap();
        prop_assert_eq!(bits(&b), bits(&net));
        prop_assert_eq!((b.dim(), b.width()), (net.dim(), net.width()));
    }
}

use rand::Rng;
use specshape_core::rlnc::{
    decode_batch, innovation_probability, nonsingular_probability, CodedPacket, Decoder, Encoder, GaloisField,
    Symbol, DEFAULT_PAYLOAD_LEN,
};
use specshape_core::sampling::stream;
use specshape_core::RlncError;

#[test]
fn unit_coefficients_select_a_source() {
    let field = GaloisField::new(8).unwrap();
    let mut rng = stream(3, 0);
    let enc = Encoder::random_batch(field, 5, DEFAULT_PAYLOAD_LEN, &mut rng);
    for j in 0..5 {
        let mut e = vec![0; 5];
        e[j] = 1;
        assert_eq!(enc.encode_with(&e).unwrap().payload, enc.sources()[j]);
    }
}

#[test]
fn gf2_sum_is_xor() {
    let field = GaloisField::new(1).unwrap();
    let a: Vec<Symbol> = vec![1, 0, 1, 1, 0, 0, 1, 0];
    let b: Vec<Symbol> = vec![0, 0, 1, 0, 1, 1, 1, 0];
    let enc = Encoder::new(field, vec![a.clone(), b.clone()]).unwrap();
    let pkt = enc.encode_with(&[1, 1]).unwrap();
    let xor: Vec<Symbol> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
    assert_eq!(pkt.payload, xor);
}

#[test]
fn identity_batch_decodes_and_duplicates_are_dependent() {
    let field = GaloisField::new(4).unwrap();
    let mut rng = stream(4, 0);
    let enc = Encoder::random_batch(field.clone(), 3, 16, &mut rng);
    let mut dec = Decoder::new(field, 3, 16);
    let first = enc.encode_with(&[1, 0, 0]).unwrap();
    assert!(dec.ingest(&first).unwrap());
    assert!(!dec.ingest(&first).unwrap());
    assert_eq!(dec.rank(), 1);
    assert!(dec.ingest(&enc.encode_with(&[0, 1, 0]).unwrap()).unwrap());
    assert!(dec.ingest(&enc.encode_with(&[0, 0, 1]).unwrap()).unwrap());
    assert!(dec.is_complete());
    assert_eq!(dec.recovered().unwrap(), enc.sources());
}

#[test]
fn wrong_coefficient_length_is_rejected() {
    let field = GaloisField::new(8).unwrap();
    let mut dec = Decoder::new(field, 4, 2);
    let pkt = CodedPacket {
        coefficients: vec![1, 2, 3],
        payload: vec![0, 0],
    };
    assert_eq!(
        dec.ingest(&pkt),
        Err(RlncError::CoefficientLength { expected: 4, got: 3 })
    );
}

#[test]
fn gf2_two_by_two_exhaustive() {
    let field = GaloisField::new(1).unwrap();
    let mut invertible = 0;
    for code in 0u32..16 {
        let bit = |i: u32| (code >> i & 1) as Symbol;
        let coeffs = vec![vec![bit(0), bit(1)], vec![bit(2), bit(3)]];
        let det = (bit(0) & bit(3)) ^ (bit(1) & bit(2));
        let rec = decode_batch(&field, &coeffs, &[vec![1], vec![0]]).unwrap();
        assert_eq!(rec.is_some(), det == 1, "{coeffs:?}");
        invertible += usize::from(det == 1);
    }
    assert_eq!(invertible, 6);
    let est = innovation_probability(&field, 2, 1, &mut stream(0, 0));
    assert!(est.exact);
    assert_eq!(est.probability, 0.375);
    assert_eq!(innovation_probability(&field, 1, 1, &mut stream(0, 0)).probability, 0.5);
}

#[test]
fn exact_enumeration_matches_product_formula() {
    for &(w, m) in &[(1, 1), (1, 2), (1, 3), (1, 4), (4, 1), (4, 2), (8, 1)] {
        let field = GaloisField::new(w).unwrap();
        let est = innovation_probability(&field, m, 1, &mut stream(0, 0));
        assert!(est.exact);
        let expect = nonsingular_probability(field.order(), m as u32);
        assert!((est.probability - expect).abs() < 1e-12, "w={w} m={m}");
    }
}

#[test]
fn sampled_innovation_within_three_sigma() {
    for &(w, m) in &[(1, 5), (4, 3), (8, 3)] {
        let field = GaloisField::new(w).unwrap();
        let est = innovation_probability(&field, m, 20_000, &mut stream(11, u64::from(w)));
        assert!(!est.exact);
        let p = nonsingular_probability(field.order(), m as u32);
        let sigma = (p * (1.0 - p) / 20_000.0).sqrt();
        assert!((est.probability - p).abs() < 3.0 * sigma + 1e-12, "w={w} m={m}: {} vs {p}", est.probability);
    }
}

#[test]
fn gf65536_batches_of_eight_decode() {
    let field = GaloisField::new(16).unwrap();
    let mut rng = stream(2024, 0);
    let trials = 10_000;
    let mut ok = 0;
    for _ in 0..trials {
        let enc = Encoder::random_batch(field.clone(), 8, 8, &mut rng);
        let pkts: Vec<CodedPacket> = (0..8).map(|_| enc.encode(&mut rng)).collect();
        let coeffs: Vec<_> = pkts.iter().map(|p| p.coefficients.clone()).collect();
        let payloads: Vec<_> = pkts.iter().map(|p| p.payload.clone()).collect();
        if let Some(rec) = decode_batch(&field, &coeffs, &payloads).unwrap() {
            assert_eq!(rec, enc.sources());
            ok += 1;
        }
    }
    let p = nonsingular_probability(field.order(), 8);
    let freq = f64::from(ok) / f64::from(trials);
    let sigma = (p * (1.0 - p) / f64::from(trials)).sqrt();
    assert!(freq >= p - 3.0 * sigma && freq >= 0.999, "{freq}");
}

#[test]
fn roundtrip_on_every_nonsingular_batch() {
    for w in [1, 4, 8, 16] {
        let field = GaloisField::new(w).unwrap();
        let mut rng = stream(55, u64::from(w));
        for _ in 0..500 {
            let m = rng.random_range(1..=6);
            let enc = Encoder::random_batch(field.clone(), m, 10, &mut rng);
            let mut dec = Decoder::new(field.clone(), m, 10);
            let mut rank = 0;
            while !dec.is_complete() {
                let innovative = dec.ingest(&enc.encode(&mut rng)).unwrap();
                rank += usize::from(innovative);
                assert_eq!(dec.rank(), rank);
            }
            assert_eq!(dec.recovered().unwrap(), enc.sources());
        }
    }
}

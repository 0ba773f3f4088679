use hyperramsey::format::{parse, to_bytes, FormatError, Layout};
use hyperramsey_core::gen::GeneratorSpec;
use hyperramsey_core::model::{ColorId, TripleColoring};
use hyperramsey_core::math::choose3;
use proptest::prelude::*;

fn explicit(n: u32, colors: u32, digits: &[u8]) -> TripleColoring {
    let by_rank: Vec<ColorId> = (0..choose3(n as u64) as usize).map(|r| ColorId(digits[r % digits.len()] % colors as u8)).collect();
    TripleColoring::explicit(n, colors, &by_rank).unwrap()
}

proptest! {
    #[test]
    fn explicit_round_trip(n in 3u32..24, colors in 1u32..=16, digits in prop::collection::vec(any::<u8>(), 1..64)) {
        let c = explicit(n, colors, &digits);
        let back = parse(&to_bytes(&c, Layout::Native).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn implicit_round_trip(n in 3u32..200, colors in 1u32..=16, seed in any::<u64>(), which in 0u8..3) {
        let spec = match which {
            0 => GeneratorSpec::uniform(seed),
            1 => GeneratorSpec::constant(ColorId((seed % colors as u64) as u8)),
            _ => GeneratorSpec::blockmix(seed, 1 + (seed % n as u64) as u32),
        };
        let c = TripleColoring::implicit(n, colors, spec).unwrap();
        let back = parse(&to_bytes(&c, Layout::Native).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn any_single_corruption_is_located(n in 3u32..16, seed in any::<u64>(), at in any::<prop::sample::Index>()) {
        let c = TripleColoring::implicit(n, 2, GeneratorSpec::uniform(seed)).unwrap();
        let mut bytes = to_bytes(&c, Layout::Explicit).unwrap();
        let header_len = bytes.iter().position(|&b| b == b'\n').unwrap() + 1;
        let digit_positions: Vec<usize> = (header_len..bytes.len()).filter(|&i| bytes[i] != b'\n').collect();
        let pos = digit_positions[at.index(digit_positions.len())];
        bytes[pos] = b'g';
        match parse(&bytes) {
            Err(FormatError::BadDigit { offset, byte: 'g' }) => prop_assert_eq!(offset, pos as u64),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }
}

use super::SegmentBuffer;
use crate::wheel::SmallPrimeMask;

/// ORs every small-prime mask into the segment, one pass over its words, and
/// rotates the masks to the phase of the next segment.
pub fn apply_small_masks(segment: &mut SegmentBuffer, masks: &mut [SmallPrimeMask]) {
    let mut cursors: Vec<(&[u64], u64, u64, u64)> = masks
        .iter()
        .map(|m| (m.patterns(), m.phase(), m.modulus(), 64 % m.modulus()))
        .collect();
    for word in segment.words_mut() {
        let mut acc = 0u64;
        for (patterns, phase, modulus, step) in cursors.iter_mut() {
            acc |= patterns[*phase as usize];
            *phase += *step;
            if *phase >= *modulus {
                *phase -= *modulus;
            }
        }
        *word |= acc;
    }
    segment.trim();
    drop(cursors);
    for mask in masks.iter_mut() {
        mask.advance_segment();
    }
}

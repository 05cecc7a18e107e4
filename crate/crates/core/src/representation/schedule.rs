//! Keyframe placement for overlapping block division.

/// Keyframes are the multiples of `d` whose window of radius
/// `r * d + s` lies inside the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyframeSchedule {
    pub d: usize,
    pub s: usize,
    pub r: usize,
    pub keyframes: Vec<usize>,
}

impl KeyframeSchedule {
    pub fn half_window(&self) -> usize {
        self.r * self.d + self.s
    }

    pub fn is_empty(&self) -> bool {
        self.keyframes.is_empty()
    }

    /// Inclusive frame range `[first - half, last + half]` spanned by all windows.
    pub fn coverage(&self) -> Option<(usize, usize)> {
        let hw = self.half_window();
        Some((self.keyframes.first()? - hw, self.keyframes.last()? + hw))
    }

    /// Smallest stream length with a non-empty schedule.
    pub fn min_frames(d: usize, s: usize, r: usize) -> usize {
        let hw = r * d + s;
        let first = hw.div_ceil(d.max(1)) * d.max(1);
        first + hw + 1
    }
}

/// `d` must be at least 1; a zero step yields an empty schedule.
pub fn keyframe_schedule(n_frames: usize, d: usize, s: usize, r: usize) -> KeyframeSchedule {
    let hw = r * d + s;
    let keyframes = if d == 0 {
        Vec::new()
    } else {
        (hw.div_ceil(d)..)
            .map(|t| t * d)
            .take_while(|&k| k + hw < n_frames)
            .collect()
    };
    KeyframeSchedule { d, s, r, keyframes }
}

//! Construction of sampling plans for the five inference strategies.
//!
//! All constructors are pure: identical inputs produce byte-identical plans.
//! The target length is always `T = N * c` with `c = g*g + 1`; videos shorter
//! or longer than `T` are handled per strategy.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{ClipSpec, SamplingPlan, Strategy, VideoMeta};

/// Per-frame relevance of the text prompt, one score per original frame.
/// Scores are an input here; producing them is an external model's job.
/// Construction rejects non-finite values, so comparisons are total.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceScores {
    scores: Vec<f64>,
}

impl RelevanceScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::validation(format!(
                "relevance scores must be finite, got {bad}"
            )));
        }
        Ok(RelevanceScores { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Indices of the `k` highest-scoring frames, ties broken by lower
    /// index, returned in temporal order.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        // Descending score, ascending index on ties.
        order.sort_by(|&a, &b| {
            self.scores[b]
                .partial_cmp(&self.scores[a])
                .expect("scores are finite")
                .then(a.cmp(&b))
        });
        let mut selected: Vec<usize> = order.into_iter().take(k).collect();
        selected.sort_unstable();
        selected
    }
}

/// Grid side `g` for a clip length `c = g*g + 1`.
pub fn grid_for_clip_len(clip_len: usize) -> Result<usize> {
    let body = clip_len.saturating_sub(1);
    let g = body.isqrt();
    if g >= 1 && g * g == body {
        Ok(g)
    } else {
        Err(Error::validation(format!(
            "clip length {clip_len} is not g*g+1 for any integer g >= 1"
        )))
    }
}

fn check_inputs(meta: &VideoMeta, n_clips: usize, clip_len: usize) -> Result<usize> {
    meta.validate()?;
    if n_clips == 0 {
        return Err(Error::validation("plan needs at least one clip"));
    }
    grid_for_clip_len(clip_len)
}

/// Endpoint-inclusive linear spacing over `[start, end]` with `count`
/// entries, rounding half up. Exact integer arithmetic.
fn linspace_members(start: usize, end: usize, count: usize) -> Vec<usize> {
    debug_assert!(end >= start && count >= 2);
    let span = end - start;
    let den = count - 1;
    (0..count)
        .map(|k| start + (2 * k * span + den) / (2 * den))
        .collect()
}

/// Clip boundaries `b_i = ceil(i * t_ori / n)`, so original frame `j`
/// belongs to ori-clip `j * n / t_ori`.
fn clip_boundaries(t_ori: usize, n_clips: usize) -> Vec<usize> {
    (0..=n_clips)
        .map(|i| (i * t_ori).div_ceil(n_clips))
        .collect()
}

/// Shared construction for Uniform and Uniform+.
///
/// For `t_ori >= T` the ori-clips are disjoint half-open ranges and members
/// are sampled inside each. For shorter videos adjacent ranges share their
/// junction frame, so clip endpoints overlap and frames near boundaries are
/// members of two clips.
fn uniform_members(t_ori: usize, n_clips: usize, clip_len: usize) -> Vec<Vec<usize>> {
    let target = n_clips * clip_len;
    let bounds = clip_boundaries(t_ori, n_clips);
    let last = t_ori - 1;
    (0..n_clips)
        .map(|i| {
            let (lo, hi) = if t_ori >= target {
                (bounds[i], bounds[i + 1] - 1)
            } else {
                (bounds[i].min(last), bounds[i + 1].min(last))
            };
            linspace_members(lo, hi, clip_len)
        })
        .collect()
}

fn assemble(
    strategy: Strategy,
    n_clips: usize,
    clip_len: usize,
    grid: usize,
    members: Vec<Vec<usize>>,
    frame_token_map: BTreeMap<usize, Vec<usize>>,
    tail_propagation: bool,
) -> Result<SamplingPlan> {
    let clips = members
        .into_iter()
        .enumerate()
        .map(|(i, m)| ClipSpec::new(i, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(SamplingPlan {
        strategy,
        n_clips,
        clip_len,
        grid,
        target_len: n_clips * clip_len,
        clips,
        frame_token_map,
        tail_propagation,
    })
}

/// Uniform: divide the video evenly into `N` ori-clips and sample `c`
/// members inside each; every frame decodes with its own ori-clip's token.
pub fn plan_uniform(meta: &VideoMeta, n_clips: usize, clip_len: usize) -> Result<SamplingPlan> {
    let grid = check_inputs(meta, n_clips, clip_len)?;
    let t_ori = meta.frame_count;
    let members = uniform_members(t_ori, n_clips, clip_len);
    let map = (0..t_ori)
        .map(|frame| (frame, vec![frame * n_clips / t_ori]))
        .collect();
    assemble(
        Strategy::Uniform,
        n_clips,
        clip_len,
        grid,
        members,
        map,
        false,
    )
}

/// Uniform+: like Uniform, but when the video is shorter than `T` the
/// frames shared by two adjacent clips keep both tokens and their masks are
/// averaged downstream.
pub fn plan_uniform_plus(
    meta: &VideoMeta,
    n_clips: usize,
    clip_len: usize,
) -> Result<SamplingPlan> {
    let grid = check_inputs(meta, n_clips, clip_len)?;
    let plan = uniform_plus_over(meta.frame_count, n_clips, clip_len, grid)?;
    Ok(plan)
}

fn uniform_plus_over(
    t_ori: usize,
    n_clips: usize,
    clip_len: usize,
    grid: usize,
) -> Result<SamplingPlan> {
    let target = n_clips * clip_len;
    let members = uniform_members(t_ori, n_clips, clip_len);

    let mut map: BTreeMap<usize, Vec<usize>> = (0..t_ori)
        .map(|frame| (frame, vec![frame * n_clips / t_ori]))
        .collect();
    if t_ori < target {
        // Clips containing a frame always form a contiguous run; keep the
        // first two so every entry stays adjacent.
        let mut containing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (clip_index, clip_members) in members.iter().enumerate() {
            for &frame in clip_members {
                let entry = containing.entry(frame).or_default();
                if entry.last() != Some(&clip_index) {
                    entry.push(clip_index);
                }
            }
        }
        for (frame, clips) in containing {
            if clips.len() >= 2 {
                map.insert(frame, clips[..2].to_vec());
            }
        }
    }
    assemble(
        Strategy::UniformPlus,
        n_clips,
        clip_len,
        grid,
        members,
        map,
        false,
    )
}

/// Q-frame: keep the `T` frames most relevant to the prompt, sort them in
/// temporal order and process the subsequence with Uniform+. Unselected
/// frames decode with the token of their nearest selected frame.
pub fn plan_qframe(
    meta: &VideoMeta,
    n_clips: usize,
    clip_len: usize,
    scores: &RelevanceScores,
) -> Result<SamplingPlan> {
    let grid = check_inputs(meta, n_clips, clip_len)?;
    let t_ori = meta.frame_count;
    if scores.len() != t_ori {
        return Err(Error::validation(format!(
            "video {:?}: {} relevance scores for {} frames",
            meta.video_id,
            scores.len(),
            t_ori
        )));
    }

    let target = n_clips * clip_len;
    let selected = scores.top_k(target.min(t_ori));

    // Uniform+ over the selected subsequence, then translate positions back
    // to original frame indices.
    let virtual_plan = uniform_plus_over(selected.len(), n_clips, clip_len, grid)?;
    let members = virtual_plan
        .clips
        .iter()
        .map(|clip| clip.member_indices.iter().map(|&p| selected[p]).collect())
        .collect();

    let mut map = BTreeMap::new();
    for (pos, &frame) in selected.iter().enumerate() {
        map.insert(frame, virtual_plan.frame_token_map[&pos].clone());
    }
    for frame in 0..t_ori {
        if map.contains_key(&frame) {
            continue;
        }
        let after = selected.partition_point(|&s| s < frame);
        let nearest = match (after.checked_sub(1), selected.get(after)) {
            (Some(b), Some(&next)) => {
                let prev = selected[b];
                // Earlier frame wins ties.
                if frame - prev <= next - frame {
                    prev
                } else {
                    next
                }
            }
            (Some(b), None) => selected[b],
            (None, Some(&next)) => next,
            (None, None) => unreachable!("top_k of a non-empty video is non-empty"),
        };
        let entry = map[&nearest].clone();
        map.insert(frame, entry);
    }
    assemble(
        Strategy::QFrame,
        n_clips,
        clip_len,
        grid,
        members,
        map,
        false,
    )
}

/// Wrap-around: sample indices `i mod T_ori` for `i < T`. Long videos keep
/// their first `T` frames and propagate the tail through tracker memory;
/// short videos repeat cyclically, sort, and chunk into `N` clips.
pub fn plan_wrap_around(meta: &VideoMeta, n_clips: usize, clip_len: usize) -> Result<SamplingPlan> {
    let grid = check_inputs(meta, n_clips, clip_len)?;
    let t_ori = meta.frame_count;
    let target = n_clips * clip_len;

    if t_ori >= target {
        let members = (0..n_clips)
            .map(|i| (i * clip_len..(i + 1) * clip_len).collect())
            .collect();
        let map = (0..t_ori)
            .map(|frame| (frame, vec![(frame / clip_len).min(n_clips - 1)]))
            .collect();
        return assemble(
            Strategy::WrapAround,
            n_clips,
            clip_len,
            grid,
            members,
            map,
            t_ori > target,
        );
    }

    let mut sampled: Vec<usize> = (0..target).map(|i| i % t_ori).collect();
    sampled.sort_unstable();
    let members: Vec<Vec<usize>> = sampled.chunks(clip_len).map(|c| c.to_vec()).collect();
    // Each frame decodes with the first clip that contains it.
    let mut map = BTreeMap::new();
    for (pos, &frame) in sampled.iter().enumerate() {
        map.entry(frame).or_insert_with(|| vec![pos / clip_len]);
    }
    assemble(
        Strategy::WrapAround,
        n_clips,
        clip_len,
        grid,
        members,
        map,
        false,
    )
}

/// Wrap-around+: Wrap-around for videos shorter than `T`, Uniform otherwise.
pub fn plan_wrap_around_plus(
    meta: &VideoMeta,
    n_clips: usize,
    clip_len: usize,
) -> Result<SamplingPlan> {
    let _ = check_inputs(meta, n_clips, clip_len)?;
    if meta.frame_count < n_clips * clip_len {
        plan_wrap_around(meta, n_clips, clip_len)
    } else {
        plan_uniform(meta, n_clips, clip_len)
    }
}

/// Build a plan for any strategy. Q-frame requires relevance scores.
pub fn plan_for_strategy(
    strategy: Strategy,
    meta: &VideoMeta,
    n_clips: usize,
    clip_len: usize,
    scores: Option<&RelevanceScores>,
) -> Result<SamplingPlan> {
    match strategy {
        Strategy::Uniform => plan_uniform(meta, n_clips, clip_len),
        Strategy::UniformPlus => plan_uniform_plus(meta, n_clips, clip_len),
        Strategy::QFrame => {
            let scores = scores
                .ok_or_else(|| Error::validation("qframe strategy requires relevance scores"))?;
            plan_qframe(meta, n_clips, clip_len, scores)
        }
        Strategy::WrapAround => plan_wrap_around(meta, n_clips, clip_len),
        Strategy::WrapAroundPlus => plan_wrap_around_plus(meta, n_clips, clip_len),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_plan;

    fn meta(t_ori: usize) -> VideoMeta {
        VideoMeta::with_placeholder_uris("vid", t_ori, 32, 24).unwrap()
    }

    /// Float evaluation of the member-spacing rule, used as an independent
    /// oracle for the integer implementation.
    fn linspace_oracle(start: usize, len: usize, count: usize) -> Vec<usize> {
        (0..count)
            .map(|k| {
                (start as f64 + (k * (len - 1)) as f64 / (count - 1) as f64 + 0.5).floor() as usize
            })
            .collect()
    }

    #[test]
    fn grid_for_clip_len_accepts_g_squared_plus_one() {
        assert_eq!(grid_for_clip_len(2).unwrap(), 1);
        assert_eq!(grid_for_clip_len(5).unwrap(), 2);
        assert_eq!(grid_for_clip_len(10).unwrap(), 3);
        assert!(grid_for_clip_len(9).is_err());
        assert!(grid_for_clip_len(1).is_err());
    }

    #[test]
    fn uniform_100_10_10_is_the_identity_partition() {
        let meta = meta(100);
        let plan = plan_uniform(&meta, 10, 10).unwrap();
        for (i, clip) in plan.clips.iter().enumerate() {
            let expected: Vec<usize> = (i * 10..(i + 1) * 10).collect();
            assert_eq!(clip.member_indices, expected);
            assert_eq!(clip.key_index, i * 10);
        }
        for frame in 0..100 {
            assert_eq!(plan.tokens_for(frame).unwrap(), &[frame / 10]);
        }
        assert!(validate_plan(&plan, &meta).is_empty());
    }

    #[test]
    fn uniform_single_clip_identity() {
        let plan = plan_uniform(&meta(5), 1, 5).unwrap();
        assert_eq!(plan.clips[0].member_indices, vec![0, 1, 2, 3, 4]);
        assert_eq!(plan.clips[0].key_index, 0);
    }

    #[test]
    fn uniform_23_2_5_matches_linspace_oracle() {
        let plan = plan_uniform(&meta(23), 2, 5).unwrap();
        assert_eq!(plan.clips[0].member_indices, vec![0, 3, 6, 8, 11]);
        assert_eq!(plan.clips[1].member_indices, vec![12, 15, 17, 20, 22]);
        // Oracle over the same ori-clip ranges.
        assert_eq!(plan.clips[0].member_indices, linspace_oracle(0, 12, 5),);
        assert_eq!(plan.clips[1].member_indices, linspace_oracle(12, 11, 5),);
    }

    #[test]
    fn uniform_rejects_bad_inputs() {
        assert!(plan_uniform(&meta(10), 0, 5).is_err());
        assert!(plan_uniform(&meta(10), 2, 9).is_err());
        let zero = VideoMeta {
            video_id: "z".into(),
            frame_count: 0,
            width: 1,
            height: 1,
            frame_uris: vec![],
        };
        assert!(plan_uniform(&zero, 2, 5).is_err());
    }

    #[test]
    fn uniform_plus_equals_uniform_for_long_videos() {
        let meta = meta(100);
        let uniform = plan_uniform(&meta, 10, 10).unwrap();
        let plus = plan_uniform_plus(&meta, 10, 10).unwrap();
        assert_eq!(plus.clips, uniform.clips);
        assert_eq!(plus.frame_token_map, uniform.frame_token_map);
    }

    #[test]
    fn uniform_plus_short_video_duplicates_boundary_members() {
        let meta = meta(12);
        let plan = plan_uniform_plus(&meta, 10, 10).unwrap();
        assert!(validate_plan(&plan, &meta).is_empty());

        // Brute-force: every frame that is a member of two adjacent clips
        // must carry both tokens.
        let mut dual = 0;
        for frame in 0..12 {
            let containing: Vec<usize> = plan
                .clips
                .iter()
                .filter(|c| c.member_indices.contains(&frame))
                .map(|c| c.clip_index)
                .collect();
            let entry = plan.tokens_for(frame).unwrap();
            if containing.len() >= 2 {
                assert_eq!(entry, &containing[..2], "frame {frame}");
                dual += 1;
            } else {
                assert_eq!(entry.len(), 1, "frame {frame}");
            }
        }
        assert!(dual > 0, "short video should share frames across clips");
    }

    #[test]
    fn uniform_plus_single_frame_video_maps_to_both_clips() {
        let meta = meta(1);
        let plan = plan_uniform_plus(&meta, 2, 5).unwrap();
        assert_eq!(plan.tokens_for(0).unwrap(), &[0, 1]);
        assert!(validate_plan(&plan, &meta).is_empty());
    }

    #[test]
    fn qframe_top_k_selects_highest_scores_in_temporal_order() {
        let scores = RelevanceScores::new(vec![0.1, 0.9, 0.2, 0.8, 0.3]).unwrap();
        assert_eq!(scores.top_k(3), vec![1, 3, 4]);
    }

    #[test]
    fn qframe_uniform_scores_tie_break_by_index() {
        let scores = RelevanceScores::new(vec![0.5; 8]).unwrap();
        assert_eq!(scores.top_k(3), vec![0, 1, 2]);
    }

    #[test]
    fn qframe_all_selected_reduces_to_uniform_plus() {
        let meta = meta(7);
        let scores = RelevanceScores::new((0..7).map(|i| i as f64).collect()).unwrap();
        let qframe = plan_qframe(&meta, 2, 5, &scores).unwrap();
        let plus = plan_uniform_plus(&meta, 2, 5).unwrap();
        assert_eq!(qframe.clips, plus.clips);
        assert_eq!(qframe.frame_token_map, plus.frame_token_map);
    }

    #[test]
    fn qframe_unselected_frames_inherit_nearest_token() {
        // 30 frames, T=10: only the 10 highest-scoring survive.
        let meta = meta(30);
        let mut raw = vec![0.0; 30];
        for i in 0..10 {
            raw[i * 3] = 1.0; // select frames 0,3,6,...,27
        }
        let scores = RelevanceScores::new(raw).unwrap();
        let plan = plan_qframe(&meta, 2, 5, &scores).unwrap();
        assert!(validate_plan(&plan, &meta).is_empty());
        // Frame 1 is closer to 0 than 3; frame 2 closer to 3.
        assert_eq!(plan.tokens_for(1), plan.tokens_for(0));
        assert_eq!(plan.tokens_for(2), plan.tokens_for(3));
        // Midpoint tie: frame 28 sits 1 away from 27 and 29 does not exist;
        // tail frames follow the last selected frame.
        assert_eq!(plan.tokens_for(28), plan.tokens_for(27));
        assert_eq!(plan.tokens_for(29), plan.tokens_for(27));
    }

    #[test]
    fn qframe_rejects_bad_scores() {
        let meta = meta(5);
        let short = RelevanceScores::new(vec![0.0; 4]).unwrap();
        assert!(plan_qframe(&meta, 1, 5, &short).is_err());
        assert!(RelevanceScores::new(vec![f64::NAN; 5]).is_err());
        assert!(RelevanceScores::new(vec![f64::INFINITY; 5]).is_err());
    }

    #[test]
    fn wrap_around_short_video_sorted_members() {
        let meta = meta(7);
        let plan = plan_wrap_around(&meta, 2, 5).unwrap();
        let all: Vec<usize> = plan
            .clips
            .iter()
            .flat_map(|c| c.member_indices.iter().copied())
            .collect();
        assert_eq!(all, vec![0, 0, 1, 1, 2, 2, 3, 4, 5, 6]);
        assert_eq!(plan.clips[0].member_indices, vec![0, 0, 1, 1, 2]);
        assert_eq!(plan.clips[1].member_indices, vec![2, 3, 4, 5, 6]);
        assert!(!plan.tail_propagation);
        // Shared frame 2 decodes with the first clip containing it.
        assert_eq!(plan.tokens_for(2).unwrap(), &[0]);
        assert!(validate_plan(&plan, &meta).is_empty());
    }

    #[test]
    fn wrap_around_exact_length_is_identity_without_tail() {
        let meta = meta(100);
        let plan = plan_wrap_around(&meta, 10, 10).unwrap();
        let all: Vec<usize> = plan
            .clips
            .iter()
            .flat_map(|c| c.member_indices.iter().copied())
            .collect();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(!plan.tail_propagation);
    }

    #[test]
    fn wrap_around_long_video_propagates_tail() {
        let meta = meta(150);
        let plan = plan_wrap_around(&meta, 10, 10).unwrap();
        assert!(plan.tail_propagation);
        for frame in 100..150 {
            assert_eq!(plan.tokens_for(frame).unwrap(), &[9]);
        }
        assert!(validate_plan(&plan, &meta).is_empty());
    }

    #[test]
    fn wrap_around_plus_dispatches_by_length() {
        let short = meta(50);
        assert_eq!(
            plan_wrap_around_plus(&short, 10, 10).unwrap(),
            plan_wrap_around(&short, 10, 10).unwrap()
        );
        let long = meta(100);
        assert_eq!(
            plan_wrap_around_plus(&long, 10, 10).unwrap(),
            plan_uniform(&long, 10, 10).unwrap()
        );
        let tiny = meta(7);
        let plan = plan_wrap_around_plus(&tiny, 2, 5).unwrap();
        assert_eq!(plan.clips[0].member_indices, vec![0, 0, 1, 1, 2]);
        assert_eq!(plan.clips[1].member_indices, vec![2, 3, 4, 5, 6]);
    }

    #[test]
    fn plan_for_strategy_requires_scores_for_qframe() {
        let meta = meta(10);
        let err = plan_for_strategy(Strategy::QFrame, &meta, 2, 5, None);
        assert!(err.is_err());
    }

    mod properties {
        use super::*;
        use crate::types::Strategy as Sampling;
        use proptest::prelude::*;

        fn strategies() -> impl proptest::strategy::Strategy<Value = Sampling> {
            prop::sample::select(Sampling::ALL.to_vec())
        }

        proptest! {
            #[test]
            fn every_plan_validates(
                t_ori in 1usize..300,
                n_clips in 1usize..12,
                g in 1usize..4,
                strategy in strategies(),
                seed in 0u64..u64::MAX,
            ) {
                let clip_len = g * g + 1;
                let meta = meta(t_ori);
                let scores = RelevanceScores::new(
                    (0..t_ori)
                        .map(|i| {
                            let mut x = seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15);
                            x ^= x >> 33;
                            (x % 10_000) as f64 / 10_000.0
                        })
                        .collect(),
                ).unwrap();
                let plan =
                    plan_for_strategy(strategy, &meta, n_clips, clip_len, Some(&scores)).unwrap();
                let violations = validate_plan(&plan, &meta);
                prop_assert!(violations.is_empty(), "{:?}", violations);
            }

            #[test]
            fn wrap_around_matches_mod_oracle(
                t_ori in 1usize..300,
                n_clips in 1usize..12,
                g in 1usize..4,
            ) {
                let clip_len = g * g + 1;
                let target = n_clips * clip_len;
                let plan = plan_wrap_around(&meta(t_ori), n_clips, clip_len).unwrap();
                let mut expected: Vec<usize> = Vec::with_capacity(target);
                for i in 0..target {
                    expected.push(i % t_ori);
                }
                if t_ori < target {
                    expected.sort_unstable();
                }
                let got: Vec<usize> = plan
                    .clips
                    .iter()
                    .flat_map(|c| c.member_indices.iter().copied())
                    .collect();
                prop_assert_eq!(got, expected);
            }

            #[test]
            fn uniform_members_monotone_and_partition(
                t_ori in 1usize..300,
                n_clips in 1usize..12,
                g in 1usize..4,
            ) {
                let clip_len = g * g + 1;
                let plan = plan_uniform(&meta(t_ori), n_clips, clip_len).unwrap();
                for clip in &plan.clips {
                    prop_assert!(clip.member_indices.windows(2).all(|w| w[0] <= w[1]));
                }
                // Exactly one token per frame, non-decreasing across frames.
                let mut last = 0;
                for frame in 0..t_ori {
                    let tokens = plan.tokens_for(frame).unwrap();
                    prop_assert_eq!(tokens.len(), 1);
                    prop_assert!(tokens[0] >= last);
                    last = tokens[0];
                }
            }

            #[test]
            fn qframe_monotone_scores_select_extremes(
                t_ori in 1usize..300,
                n_clips in 1usize..12,
                g in 1usize..4,
            ) {
                let clip_len = g * g + 1;
                let target = n_clips * clip_len;
                let k = target.min(t_ori);
                let increasing =
                    RelevanceScores::new((0..t_ori).map(|i| i as f64).collect()).unwrap();
                prop_assert_eq!(
                    increasing.top_k(k),
                    (t_ori - k..t_ori).collect::<Vec<_>>()
                );
                let decreasing =
                    RelevanceScores::new((0..t_ori).map(|i| -(i as f64)).collect()).unwrap();
                prop_assert_eq!(decreasing.top_k(k), (0..k).collect::<Vec<_>>());
            }

            #[test]
            fn plans_are_deterministic(
                t_ori in 1usize..120,
                n_clips in 1usize..8,
                g in 1usize..4,
                strategy in strategies(),
            ) {
                let clip_len = g * g + 1;
                let meta = meta(t_ori);
                let scores =
                    RelevanceScores::new((0..t_ori).map(|i| (i % 7) as f64).collect()).unwrap();
                let a =
                    plan_for_strategy(strategy, &meta, n_clips, clip_len, Some(&scores)).unwrap();
                let b =
                    plan_for_strategy(strategy, &meta, n_clips, clip_len, Some(&scores)).unwrap();
                prop_assert_eq!(
                    serde_json::to_vec(&a).unwrap(),
                    serde_json::to_vec(&b).unwrap()
                );
            }
        }
    }
}

/* C interface to the rvos video-segmentation pipeline. */

#ifndef RVOS_H
#define RVOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes, aligned with the CLI's exit codes where they overlap.
 */
typedef enum RvosStatus {
  RVOS_STATUS_OK = 0,
  RVOS_STATUS_NULL_ARGUMENT = 1,
  RVOS_STATUS_VALIDATION = 2,
  RVOS_STATUS_BACKEND = 3,
  RVOS_STATUS_IO = 4,
} RvosStatus;

/**
 * Opaque binary mask handle.
 */
typedef struct RvosMask RvosMask;

/**
 * Opaque sampling plan handle.
 */
typedef struct RvosPlan RvosPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message on this thread, or NULL if none. The caller
 * owns the returned string and must free it with `rvos_string_free`.
 */
char *rvos_last_error_message(void);

/**
 * Free a string returned by this library.
 */
void rvos_string_free(char *ptr);

/**
 * Build a sampling plan.
 *
 * `strategy` is one of "uniform", "uniform+", "qframe", "wrap_around",
 * "wrap_around+". `scores` must point to `frame_count` relevance values
 * for "qframe" and may be NULL otherwise.
 */
enum RvosStatus rvos_plan_build(const char *strategy,
                                uint64_t frame_count,
                                uint64_t n_clips,
                                uint64_t clip_len,
                                const double *scores,
                                size_t scores_len,
                                struct RvosPlan **out_plan);

void rvos_plan_free(struct RvosPlan *plan);

/**
 * Number of clips in the plan.
 */
size_t rvos_plan_clip_count(const struct RvosPlan *plan);

/**
 * Whether frames beyond the sampling target rely on tracker memory.
 */
bool rvos_plan_tail_propagation(const struct RvosPlan *plan);

/**
 * Member frame indices of one clip. `out_members` must hold `clip_len`
 * entries; the actual count is written to `out_len`.
 */
enum RvosStatus rvos_plan_clip_members(const struct RvosPlan *plan,
                                       size_t clip_index,
                                       uint64_t *out_members,
                                       size_t capacity,
                                       size_t *out_len);

/**
 * Clip indices responsible for decoding `frame` (1 or 2 entries).
 * `out_tokens` must hold at least 2 entries.
 */
enum RvosStatus rvos_plan_frame_tokens(const struct RvosPlan *plan,
                                       uint64_t frame,
                                       uint64_t *out_tokens,
                                       size_t *out_len);

/**
 * Serialize the plan to JSON. Free the string with `rvos_string_free`.
 */
enum RvosStatus rvos_plan_to_json(const struct RvosPlan *plan, char **out_json);

/**
 * Create a mask from `width * height` bytes of {0,1} values, row-major.
 */
enum RvosStatus rvos_mask_create(uint32_t width,
                                 uint32_t height,
                                 const uint8_t *bits,
                                 struct RvosMask **out_mask);

void rvos_mask_free(struct RvosMask *mask);

uint32_t rvos_mask_width(const struct RvosMask *mask);

uint32_t rvos_mask_height(const struct RvosMask *mask);

/**
 * Borrow the mask's bits ({0,1} bytes, row-major). Valid until the mask is
 * freed or mutated.
 */
const uint8_t *rvos_mask_bits(const struct RvosMask *mask, size_t *out_len);

/**
 * Run-length encode a mask (column-major, background first). The counts
 * buffer is allocated by the library; free it with `rvos_counts_free`.
 */
enum RvosStatus rvos_mask_rle_encode(const struct RvosMask *mask,
                                     uint64_t **out_counts,
                                     size_t *out_len);

void rvos_counts_free(uint64_t *counts, size_t len);

/**
 * Decode run-length counts back into a mask.
 */
enum RvosStatus rvos_rle_decode(uint32_t width,
                                uint32_t height,
                                const uint64_t *counts,
                                size_t counts_len,
                                struct RvosMask **out_mask);

/**
 * Weighted per-pixel vote over `count` masks, binarized strictly above 0.5.
 */
enum RvosStatus rvos_selective_average(const struct RvosMask *const *masks,
                                       const double *weights,
                                       size_t count,
                                       struct RvosMask **out_mask);

/**
 * Mean per-frame intersection-over-union of two equal-length sequences.
 */
enum RvosStatus rvos_jaccard(const struct RvosMask *const *pred,
                             const struct RvosMask *const *gt,
                             size_t frames,
                             double *out_score);

/**
 * Boundary F-measure of one frame pair at a pixel tolerance.
 */
enum RvosStatus rvos_boundary_f(const struct RvosMask *pred,
                                const struct RvosMask *gt,
                                uint32_t tolerance,
                                double *out_score);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RVOS_H */

#pragma once

namespace hetvar {

/// One study's 2x2 table. Counts are reals so that the half-corrected
/// table (x + 0.5 events out of n + 1) is representable in place.
struct Study2x2 {
  double x_t = 0.0;  ///< events, treatment arm
  double n_t = 0.0;  ///< treatment arm size
  double x_c = 0.0;  ///< events, control arm
  double n_c = 0.0;  ///< control arm size
  bool adjusted = false;
};

/// When to add 1/2 to all four cells (and 1 to each arm size).
enum class AdjustmentPolicy { OnlyIfZero, Always };

bool is_double_zero(const Study2x2& s);
bool is_double_n(const Study2x2& s);

/// n_c * n_t / (n_c + n_t), computed from the raw (unadjusted) sizes.
double effective_sample_size(const Study2x2& raw);

/// Applies the half-correction per policy. Rejects double-zero and
/// double-n tables: those are discarded upstream, never corrected.
Study2x2 adjust_counts(const Study2x2& raw, AdjustmentPolicy policy);

}  // namespace hetvar

#include "hetvar/study.hpp"

#include <stdexcept>

namespace hetvar {

bool is_double_zero(const Study2x2& s) { return s.x_t == 0.0 && s.x_c == 0.0; }

bool is_double_n(const Study2x2& s) { return s.x_t == s.n_t && s.x_c == s.n_c; }

double effective_sample_size(const Study2x2& raw) {
  return raw.n_c * raw.n_t / (raw.n_c + raw.n_t);
}

Study2x2 adjust_counts(const Study2x2& raw, AdjustmentPolicy policy) {
  if (raw.x_t < 0.0 || raw.x_c < 0.0 || raw.x_t > raw.n_t || raw.x_c > raw.n_c ||
      raw.n_t <= 0.0 || raw.n_c <= 0.0) {
    throw std::invalid_argument("adjust_counts: invalid 2x2 table");
  }
  if (is_double_zero(raw)) {
    throw std::invalid_argument("adjust_counts: double-zero study must be discarded");
  }
  if (is_double_n(raw)) {
    throw std::invalid_argument("adjust_counts: double-n study must be discarded");
  }
  const bool any_zero_cell = raw.x_t == 0.0 || raw.x_c == 0.0 ||
                             raw.x_t == raw.n_t || raw.x_c == raw.n_c;
  const bool apply = policy == AdjustmentPolicy::Always || any_zero_cell;
  if (!apply) return raw;
  Study2x2 out;
  out.x_t = raw.x_t + 0.5;
  out.n_t = raw.n_t + 1.0;
  out.x_c = raw.x_c + 0.5;
  out.n_c = raw.n_c + 1.0;
  out.adjusted = true;
  return out;
}

}  // namespace hetvar

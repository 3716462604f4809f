#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hetvar/study.hpp"

namespace hetvar {

struct DatasetRow {
  std::string study_id;
  Study2x2 table;
};

struct InputDataset {
  std::vector<DatasetRow> rows;
};

/// CSV columns: study_id,x_t,n_t,x_c,n_c (header optional). Counts must
/// be non-negative integers with x <= n. Parse errors carry the line
/// number.
InputDataset parse_dataset(std::istream& in, const std::string& name);
InputDataset load_dataset(const std::string& path);

}  // namespace hetvar

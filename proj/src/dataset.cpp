#include "hetvar/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hetvar {

namespace {

long parse_count(const std::string& tok, const std::string& name, int lineno,
                 const std::string& column) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != tok.size() || v < 0) {
    throw std::runtime_error(name + ":" + std::to_string(lineno) + ": column " + column +
                             " must be a non-negative integer, got '" + tok + "'");
  }
  return v;
}

}  // namespace

InputDataset parse_dataset(std::istream& in, const std::string& name) {
  InputDataset data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("study_id", 0) == 0) continue;  // optional header
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": expected 5 fields (study_id,x_t,n_t,x_c,n_c), got " +
                               std::to_string(fields.size()));
    }
    DatasetRow row;
    row.study_id = fields[0];
    row.table.x_t = parse_count(fields[1], name, lineno, "x_t");
    row.table.n_t = parse_count(fields[2], name, lineno, "n_t");
    row.table.x_c = parse_count(fields[3], name, lineno, "x_c");
    row.table.n_c = parse_count(fields[4], name, lineno, "n_c");
    if (row.table.n_t < 1 || row.table.n_c < 1 || row.table.x_t > row.table.n_t ||
        row.table.x_c > row.table.n_c) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": counts must satisfy 0 <= x <= n with n >= 1");
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

InputDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  return parse_dataset(in, path);
}

}  // namespace hetvar

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docpack/packer.hpp"

namespace docpack {

struct PlanStats {
  std::size_t num_sequences = 0;
  std::size_t num_batches = 0;
  std::size_t num_documents = 0;
  double docs_per_batch_mean = 0.0;
  std::uint64_t pad_positions = 0;
  std::uint64_t total_positions = 0;
  double padding_ratio = 0.0;
  std::uint64_t allowed_pairs_cross_on = 0;
  std::uint64_t allowed_pairs_cross_off = 0;
};

struct ConvergenceRecord {
  PackingStrategy strategy = PackingStrategy::no_packing();
  std::uint64_t batch_size = 1;
  double steps_to_convergence = 0.0;
};

// steps x batch size x documents per sequence. Throws ConfigError for
// strategies without a fixed document count.
double total_documents(const ConvergenceRecord& rec);

// Throw DataError on an empty plan.
double docs_per_batch(const EpochPlan& plan);
PlanStats plan_stats(const EpochPlan& plan);
// Same statistics from sequences read back from disk.
PlanStats plan_stats(std::span<const PackedSequence> sequences,
                     std::span<const std::vector<std::size_t>> batches);

// Rectangular table with labelled rows/columns and possibly absent cells.
struct Table {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<std::optional<double>>> cells;

  std::size_t rows() const { return row_labels.size(); }
  std::size_t columns() const { return column_labels.size(); }
};

// CSV with a header row. Cells accept plain numbers and k/M suffixes
// ("48.8k", "1.6M"); an empty cell is absent.
Table parse_table(std::istream& in, std::string_view source = "table");
Table load_table(const std::filesystem::path& path);

struct ConvergenceCell {
  std::string strategy;
  std::uint64_t batch_size = 0;
  double docs = 0.0;
  std::optional<double> reference;
  std::optional<double> rel_err;
  bool within_tolerance = true;
};

struct ConvergenceReport {
  Table documents;  // derived table, same shape as the step table
  std::vector<ConvergenceCell> cells;
  double tolerance = 0.05;
  std::size_t compared = 0;
  std::size_t flagged = 0;
};

// Docs-per-sequence for each row label and batch size for each column label.
// Labels missing from the maps are inferred: rows via PackingStrategy::parse
// ("No packing" and "Pack 2" are accepted too), columns from their digits.
using PackMap = std::map<std::string, int>;
using BatchSizeMap = std::map<std::string, std::uint64_t>;

// Converts a step table into a document table and compares each populated
// cell against the reference. Throws DataError on a shape mismatch.
ConvergenceReport convergence_table_check(const Table& steps,
                                          const PackMap& pack_map,
                                          const BatchSizeMap& bs_map,
                                          const Table* reference,
                                          double tolerance = 0.05);

int infer_docs_per_sequence(std::string_view row_label);
std::uint64_t infer_batch_size(std::string_view column_label);

}  // namespace docpack

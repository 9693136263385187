#include "docpack/stats.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "docpack/error.hpp"
#include "docpack/maskgen.hpp"

namespace docpack {

double total_documents(const ConvergenceRecord& rec) {
  const int per_sequence = rec.strategy.docs_per_sequence();
  if (per_sequence == 0) {
    throw ConfigError("total_documents: strategy " + rec.strategy.to_string() +
                      " has no fixed document count; use docs_per_batch on a plan");
  }
  return rec.steps_to_convergence * static_cast<double>(rec.batch_size) * per_sequence;
}

PlanStats plan_stats(std::span<const PackedSequence> sequences,
                     std::span<const std::vector<std::size_t>> batches) {
  if (sequences.empty()) throw DataError("plan_stats: plan has no sequences");
  PlanStats st;
  st.num_sequences = sequences.size();
  st.num_batches = batches.size();
  for (const auto& seq : sequences) {
    st.num_documents += seq.doc_ids.size();
    st.total_positions += seq.segment_ids.size();
    for (auto s : seq.segment_ids) st.pad_positions += s == kPadSegment;
    st.allowed_pairs_cross_on += allowed_pairs(seq.segment_ids, true);
    st.allowed_pairs_cross_off += allowed_pairs(seq.segment_ids, false);
  }
  st.padding_ratio = st.total_positions == 0
                         ? 0.0
                         : static_cast<double>(st.pad_positions) / static_cast<double>(st.total_positions);
  if (!batches.empty()) {
    std::size_t docs = 0;
    for (const auto& b : batches) {
      for (auto idx : b) {
        if (idx >= sequences.size()) {
          throw DataError("batch references sequence " + std::to_string(idx) + " of " +
                          std::to_string(sequences.size()));
        }
        docs += sequences[idx].doc_ids.size();
      }
    }
    st.docs_per_batch_mean = static_cast<double>(docs) / static_cast<double>(batches.size());
  }
  return st;
}

PlanStats plan_stats(const EpochPlan& plan) {
  return plan_stats(plan.sequences, plan.batches);
}

double docs_per_batch(const EpochPlan& plan) {
  if (plan.sequences.empty() || plan.batches.empty()) {
    throw DataError("docs_per_batch: plan is empty");
  }
  return plan_stats(plan).docs_per_batch_mean;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_cell(const std::string& text, std::string_view source,
                                 std::size_t line) {
  if (text.empty()) return std::nullopt;
  double scale = 1.0;
  std::string_view digits = text;
  switch (digits.back()) {
    case 'k': case 'K': scale = 1e3; digits.remove_suffix(1); break;
    case 'M': scale = 1e6; digits.remove_suffix(1); break;
    case 'B': case 'G': scale = 1e9; digits.remove_suffix(1); break;
    default: break;
  }
  double value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw DataError(std::string(source) + ":" + std::to_string(line) + ": bad cell \"" + text + "\"");
  }
  return value * scale;
}

}  // namespace

Table parse_table(std::istream& in, std::string_view source) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line).starts_with("#")) continue;
    auto cells = split_csv(line);
    if (header) {
      if (cells.size() < 2) throw DataError(std::string(source) + ": header needs at least one column");
      t.column_labels.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() > t.columns() + 1) {
      throw DataError(std::string(source) + ":" + std::to_string(lineno) + ": too many cells");
    }
    cells.resize(t.columns() + 1);
    t.row_labels.push_back(cells[0]);
    auto& row = t.cells.emplace_back();
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], source, lineno));
  }
  if (header) throw DataError(std::string(source) + ": empty table");
  return t;
}

Table load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table " + path.string());
  return parse_table(in, path.string());
}

int infer_docs_per_sequence(std::string_view label) {
  std::string s;
  for (char c : label) {
    if (c == ' ' || c == '_') c = '-';
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "no-packing") return 1;
  if (s.starts_with("pack") && s.size() > 4 && std::isdigit(static_cast<unsigned char>(s[4]))) {
    s.insert(4, "-");
  }
  try {
    const int per = PackingStrategy::parse(s).docs_per_sequence();
    if (per > 0) return per;
  } catch (const ConfigError&) {
  }
  throw DataError("cannot infer documents per sequence from row label \"" + std::string(label) + "\"");
}

std::uint64_t infer_batch_size(std::string_view label) {
  std::uint64_t value = 0;
  bool any = false;
  for (char c : label) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      value = value * 10 + static_cast<std::uint64_t>(c - '0');
      any = true;
    }
  }
  if (!any) throw DataError("cannot infer batch size from column label \"" + std::string(label) + "\"");
  return value;
}

ConvergenceReport convergence_table_check(const Table& steps, const PackMap& pack_map,
                                          const BatchSizeMap& bs_map, const Table* reference,
                                          double tolerance) {
  if (reference != nullptr &&
      (reference->rows() != steps.rows() || reference->columns() != steps.columns())) {
    throw DataError("reference table is " + std::to_string(reference->rows()) + "x" +
                    std::to_string(reference->columns()) + " but step table is " +
                    std::to_string(steps.rows()) + "x" + std::to_string(steps.columns()));
  }
  ConvergenceReport report;
  report.tolerance = tolerance;
  report.documents.row_labels = steps.row_labels;
  report.documents.column_labels = steps.column_labels;

  for (std::size_t r = 0; r < steps.rows(); ++r) {
    const auto& row_label = steps.row_labels[r];
    auto pit = pack_map.find(row_label);
    const int per = pit != pack_map.end() ? pit->second : infer_docs_per_sequence(row_label);
    auto& out_row = report.documents.cells.emplace_back();
    for (std::size_t c = 0; c < steps.columns(); ++c) {
      const auto& col_label = steps.column_labels[c];
      auto bit = bs_map.find(col_label);
      const std::uint64_t bs = bit != bs_map.end() ? bit->second : infer_batch_size(col_label);
      const auto& step_cell = steps.cells[r][c];
      const std::optional<double> ref = reference ? reference->cells[r][c] : std::nullopt;
      if (!step_cell) {
        out_row.push_back(std::nullopt);
        if (ref) {
          report.cells.push_back({row_label, bs, 0.0, ref, std::nullopt, false});
          ++report.flagged;
        }
        continue;
      }
      const double docs = *step_cell * static_cast<double>(bs) * per;
      out_row.push_back(docs);
      ConvergenceCell cell{row_label, bs, docs, ref, std::nullopt, true};
      if (ref) {
        const double err = *ref == 0.0 ? (docs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                       : std::abs(docs - *ref) / std::abs(*ref);
        cell.rel_err = err;
        cell.within_tolerance = err <= tolerance;
        ++report.compared;
      } else if (reference != nullptr) {
        cell.within_tolerance = false;
      }
      if (!cell.within_tolerance) ++report.flagged;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace docpack

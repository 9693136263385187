#include "docpack/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "docpack/error.hpp"
#include "docpack/evalharness.hpp"
#include "docpack/maskgen.hpp"
#include "docpack/packed_io.hpp"
#include "docpack/stats.hpp"

namespace docpack {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

void require_file(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("no ") + what + " file given");
  if (!std::filesystem::exists(p)) {
    throw ConfigError(std::string(what) + " file " + p.string() + " does not exist");
  }
}

Corpus load_configured_corpus(const RunConfig& config) {
  require_file(config.docs, "documents");
  require_file(config.groups, "groups");
  return load_corpus(config.docs, config.groups, config.vocab);
}

ojson opt_json(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson scores_json(const EvalScores& s) {
  ojson o;
  o["precision"] = opt_json(s.precision);
  o["hallucination_rate"] = opt_json(s.hallucination_rate);
  o["accuracy"] = opt_json(s.accuracy);
  const auto& c = s.counts;
  o["titles_recalled"] = c.titles_recalled;
  o["titles_matched"] = c.titles_matched;
  o["contents_mismatched"] = c.contents_mismatched;
  o["questions"] = c.questions;
  o["judged_questions"] = c.judged_questions;
  o["judged_yes"] = c.judged_yes;
  o["unparseable_verdicts"] = c.unparseable_verdicts;
  o["titles_other_document"] = c.titles_other_document;
  o["titles_not_in_corpus"] = c.titles_not_in_corpus;
  return o;
}

std::string fmt_pct(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *v;
  return os.str();
}

std::string fmt_count(double v) {
  std::ostringstream os;
  os << std::setprecision(3);
  if (v >= 1e6) {
    os << v / 1e6 << "M";
  } else if (v >= 1e3) {
    os << v / 1e3 << "k";
  } else {
    os << v;
  }
  return os.str();
}

std::unique_ptr<JudgeClient> make_judge(const RunConfig& config,
                                        const std::optional<std::filesystem::path>& cache_path,
                                        std::unique_ptr<ChatTransport> transport) {
  if (!transport) {
    if (config.judge.endpoint.empty()) {
      throw ConfigError("judge endpoint is not configured (set judge.endpoint or pass --no-judge)");
    }
    transport = std::make_unique<HttpChatTransport>(config.judge);
  }
  auto cache = cache_path ? std::make_shared<VerdictCache>(*cache_path)
                          : std::make_shared<VerdictCache>();
  return std::make_unique<JudgeClient>(config.judge, std::move(transport), std::move(cache));
}

}  // namespace

std::vector<std::filesystem::path> cmd_pack(const RunConfig& config, std::ostream& log) {
  validate(config);
  const Corpus corpus = load_configured_corpus(config);
  std::vector<std::filesystem::path> written;
  if (config.epochs == 0) return written;

  std::filesystem::create_directories(config.out);
  for (std::uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
    const EpochPlan plan = plan_epoch(corpus, config.strategy, config.epoch_mode, epoch,
                                      config.seed, config.batch_size, config.vocab);
    for (const auto& w : plan.warnings) spdlog::warn("epoch {}: {}", epoch, w);

    const std::string stem = epoch_stem(epoch);
    const auto seq_path = config.out / (stem + ".jsonl");
    const auto manifest_path = config.out / (stem + ".manifest.json");
    {
      std::ofstream out(seq_path, std::ios::binary);
      if (!out) throw DataError("cannot write " + seq_path.string());
      write_sequences_jsonl(out, plan.sequences);
    }
    {
      std::ofstream out(manifest_path, std::ios::binary);
      if (!out) throw DataError("cannot write " + manifest_path.string());
      out << manifest_json(manifest_of(plan));
    }
    written.push_back(seq_path);
    written.push_back(manifest_path);
    if (config.write_compact) {
      const auto bin = config.out / (stem + ".bin");
      const auto idx = config.out / (stem + ".idx.json");
      write_compact(bin, idx, plan.sequences);
      written.push_back(bin);
      written.push_back(idx);
    }
    log << stem << ": " << plan.sequences.size() << " sequences, " << plan.batches.size()
        << " batches (" << config.strategy.to_string() << ", " << to_string(config.epoch_mode)
        << ")\n";
  }
  return written;
}

bool cmd_stats(const StatsOptions& options, std::ostream& out) {
  if (!options.packed && !options.steps_table) {
    throw ConfigError("stats needs --packed and/or --steps-table");
  }
  ojson report = ojson::object();
  bool ok = true;

  if (options.packed) {
    require_file(*options.packed, "packed");
    const auto sequences = read_sequences_jsonl(*options.packed);
    if (sequences.empty()) throw DataError("packed file " + options.packed->string() + " is empty");
    auto manifest_path = options.manifest;
    if (!manifest_path) {
      auto p = *options.packed;
      p.replace_extension(".manifest.json");
      manifest_path = p;
    }
    const Manifest manifest = read_manifest(*manifest_path);
    const PlanStats st = plan_stats(sequences, manifest.batches);

    out << "plan " << options.packed->filename().string() << " (" << manifest.strategy << ", "
        << manifest.mode << ", epoch " << manifest.epoch << ")\n"
        << "  sequences            " << st.num_sequences << "\n"
        << "  batches              " << st.num_batches << "\n"
        << "  documents            " << st.num_documents << "\n"
        << "  docs per batch       " << std::fixed << std::setprecision(3) << st.docs_per_batch_mean << "\n"
        << "  padding ratio        " << std::setprecision(6) << st.padding_ratio << "\n"
        << "  attn pairs (cross)   " << st.allowed_pairs_cross_on << "\n"
        << "  attn pairs (isolated) " << st.allowed_pairs_cross_off << "\n";
    out.unsetf(std::ios::floatfield);
    ojson plan;
    plan["num_sequences"] = st.num_sequences;
    plan["num_batches"] = st.num_batches;
    plan["num_documents"] = st.num_documents;
    plan["docs_per_batch_mean"] = st.docs_per_batch_mean;
    plan["pad_positions"] = st.pad_positions;
    plan["total_positions"] = st.total_positions;
    plan["padding_ratio"] = st.padding_ratio;
    plan["allowed_pairs_cross_on"] = st.allowed_pairs_cross_on;
    plan["allowed_pairs_cross_off"] = st.allowed_pairs_cross_off;
    report["plan"] = std::move(plan);
  }

  if (options.steps_table) {
    const Table steps = load_table(*options.steps_table);
    std::optional<Table> reference;
    if (options.reference_table) reference = load_table(*options.reference_table);
    const ConvergenceReport conv = convergence_table_check(
        steps, {}, {}, reference ? &*reference : nullptr, options.tolerance);

    out << std::left << std::setw(14) << "strategy" << std::setw(6) << "bs" << std::setw(10)
        << "docs" << std::setw(10) << "ref" << std::setw(10) << "rel_err" << "\n";
    ojson cells = ojson::array();
    for (const auto& c : conv.cells) {
      std::ostringstream err;
      if (c.rel_err) err << std::fixed << std::setprecision(2) << 100.0 * *c.rel_err << "%";
      out << std::setw(14) << c.strategy << std::setw(6) << c.batch_size << std::setw(10)
          << fmt_count(c.docs) << std::setw(10) << (c.reference ? fmt_count(*c.reference) : "-")
          << std::setw(10) << (c.rel_err ? err.str() : "-") << (c.within_tolerance ? "" : "FLAG")
          << "\n";
      ojson cell;
      cell["strategy"] = c.strategy;
      cell["bs"] = c.batch_size;
      cell["docs"] = c.docs;
      cell["ref"] = opt_json(c.reference);
      cell["rel_err"] = opt_json(c.rel_err);
      cell["within_tolerance"] = c.within_tolerance;
      cells.push_back(std::move(cell));
    }
    out << std::right << conv.compared << " cells compared, " << conv.flagged
        << " outside " << conv.tolerance * 100 << "% tolerance\n";
    report["cells"] = std::move(cells);
    report["tolerance"] = conv.tolerance;
    report["flagged"] = conv.flagged;
    ok = conv.flagged == 0;
  }

  if (options.report) {
    std::ofstream f(*options.report);
    if (!f) throw DataError("cannot write report " + options.report->string());
    f << report.dump(2) << '\n';
  }
  return ok;
}

void cmd_eval(const RunConfig& config, const EvalOptions& options, std::ostream& out,
              std::unique_ptr<ChatTransport> transport) {
  validate(config);
  const Corpus corpus = load_configured_corpus(config);
  require_file(options.generations, "generations");
  std::ifstream in(options.generations);

  struct Item {
    std::string question_id;
    const DocumentGroup* group = nullptr;
    std::optional<ParsedGeneration> parsed;
    std::string parse_error;
    std::optional<Verdict> verdict;
    std::string judge_raw;
    bool judge_cached = false;
  };
  std::vector<Item> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = options.generations.string() + ":" + std::to_string(lineno);
    Item item;
    std::string text;
    try {
      const json rec = json::parse(line);
      item.question_id = rec.at("question_id").get<std::string>();
      text = rec.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    item.group = corpus.find_group(item.question_id);
    if (!item.group) throw DataError(where + ": unknown question_id \"" + item.question_id + "\"");
    try {
      item.parsed = parse_generation(text, config.sft_template);
    } catch (const DataError& e) {
      item.parse_error = e.what();
    }
    items.push_back(std::move(item));
  }

  if (!options.no_judge) {
    std::vector<JudgeRequest> requests;
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      if (!it.parsed) continue;
      if (it.group->question.empty() || it.group->answer.empty()) {
        spdlog::warn("question \"{}\" has no question/answer text; not judged", it.question_id);
        continue;
      }
      requests.push_back({it.group->question, it.group->answer, it.parsed->generation.answer});
      owners.push_back(i);
    }
    auto judge = make_judge(config, options.verdict_cache, std::move(transport));
    const auto verdicts = judge->judge_all(requests);
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      auto& it = items[owners[k]];
      it.verdict = verdicts[k].verdict;
      it.judge_raw = verdicts[k].raw_response;
      it.judge_cached = verdicts[k].cached;
    }
  }

  const TitleIndex titles(corpus);
  std::vector<EvalScores> scored;
  std::size_t parse_failures = 0;
  std::ostringstream records;
  for (const auto& it : items) {
    ojson rec;
    rec["question_id"] = it.question_id;
    if (!it.parsed) {
      ++parse_failures;
      rec["parse_error"] = it.parse_error;
      records << rec.dump() << '\n';
      continue;
    }
    const EvalScores s = score_one(it.parsed->generation, *it.group, corpus, it.verdict, &titles);
    scored.push_back(s);
    rec["verdict"] = it.verdict ? ojson(to_string(*it.verdict)) : ojson(nullptr);
    if (it.verdict) rec["judge_cached"] = it.judge_cached;
    rec.update(scores_json(s));
    rec["warnings"] = it.parsed->warnings;
    records << rec.dump() << '\n';
  }

  ojson agg;
  agg["aggregate"] = true;
  agg["parse_failures"] = parse_failures;
  std::optional<EvalScores> total;
  if (!scored.empty()) {
    total = aggregate(scored);
    agg.update(scores_json(*total));
  }
  records << agg.dump() << '\n';

  if (options.report) {
    std::ofstream f(*options.report);
    if (!f) throw DataError("cannot write report " + options.report->string());
    f << records.str();
  } else {
    out << records.str();
  }

  out << "questions           " << items.size() << " (" << parse_failures << " unparseable generations)\n";
  if (total) {
    out << "precision           " << fmt_pct(total->precision) << "\n"
        << "hallucination rate  " << fmt_pct(total->hallucination_rate) << "\n"
        << "accuracy            " << fmt_pct(total->accuracy)
        << (options.no_judge ? " (judge disabled)" : "") << "\n";
    if (total->counts.unparseable_verdicts > 0) {
      out << "unparseable verdicts " << total->counts.unparseable_verdicts << " (excluded from accuracy)\n";
    }
  }
}

void cmd_judge(const RunConfig& config, const JudgeOptions& options, std::ostream& out,
               std::unique_ptr<ChatTransport> transport) {
  std::vector<std::string> ids;
  std::vector<JudgeRequest> requests;
  if (options.requests) {
    require_file(*options.requests, "requests");
    std::ifstream in(*options.requests);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const json rec = json::parse(line);
        ids.push_back(rec.value("question_id", std::to_string(lineno)));
        requests.push_back({rec.at("question").get<std::string>(), rec.at("expected").get<std::string>(),
                            rec.at("answer").get<std::string>()});
      } catch (const json::exception& e) {
        throw DataError(options.requests->string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  } else {
    ids.emplace_back("1");
    requests.push_back({options.question, options.expected, options.answer});
  }

  if (options.print_prompt) {
    for (const auto& r : requests) out << render_prompt(r) << "\n";
    return;
  }

  auto judge = make_judge(config, options.verdict_cache, std::move(transport));
  const auto verdicts = judge->judge_all(requests);
  std::ostringstream records;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    ojson rec;
    rec["question_id"] = ids[i];
    rec["verdict"] = to_string(verdicts[i].verdict);
    rec["raw"] = verdicts[i].raw_response;
    rec["cached"] = verdicts[i].cached;
    records << rec.dump() << '\n';
  }
  if (options.output) {
    std::ofstream f(*options.output);
    if (!f) throw DataError("cannot write " + options.output->string());
    f << records.str();
  } else {
    out << records.str();
  }
}

void cmd_inspect(const InspectOptions& options, std::ostream& out) {
  require_file(options.packed, "packed");
  const auto sequences = read_sequences_jsonl(options.packed);
  if (options.index >= sequences.size()) {
    throw DataError("sequence " + std::to_string(options.index) + " out of range (file has " +
                    std::to_string(sequences.size()) + ")");
  }
  const PackedSequence& seq = sequences[options.index];
  const std::size_t content = seq.content_length();
  out << "sequence " << options.index << ": " << seq.tokens.size() << " positions, " << content
      << " content, " << seq.tokens.size() - content << " pad"
      << (seq.truncated ? ", truncated" : "") << "\n";

  // Runs of equal segment ids.
  std::size_t start = 0;
  while (start < seq.segment_ids.size()) {
    std::size_t end = start;
    while (end < seq.segment_ids.size() && seq.segment_ids[end] == seq.segment_ids[start]) ++end;
    const auto s = seq.segment_ids[start];
    out << "  [" << std::setw(5) << start << ", " << std::setw(5) << end << ")  ";
    if (s == kPadSegment) {
      out << "PAD\n";
    } else {
      const bool has_sep = end > start && std::find(seq.sep_positions.begin(), seq.sep_positions.end(),
                                                    static_cast<std::uint32_t>(end - 1)) != seq.sep_positions.end();
      out << "segment " << s << "  " << (static_cast<std::size_t>(s) < seq.doc_ids.size() ? seq.doc_ids[s] : "?")
          << (has_sep ? "  (+SEP)" : "") << "\n";
    }
    start = end;
  }

  const MaskSpec spec = MaskSpec::from(seq, options.cross_doc);
  out << "attention: cross-document " << (options.cross_doc ? "on" : "off") << ", "
      << allowed_pairs(seq.segment_ids, options.cross_doc) << " allowed pairs\n";
  if (content == 0) return;
  if (content > options.max_matrix) {
    out << "  (mask over " << content << " content positions not drawn; limit " << options.max_matrix << ")\n";
    return;
  }
  for (std::size_t i = 0; i < content; ++i) {
    out << "  ";
    for (std::size_t j = 0; j < content; ++j) out << (may_attend(spec, i, j) ? '#' : '.');
    out << "\n";
  }
}

}  // namespace docpack

#include "treeduce/eval.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace treeduce {

namespace {

double pct(long long num, long long den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << v;
  return out.str();
}

}  // namespace

EvalCounts score_counts(const Treebank& system, const Treebank& gold) {
  if (system.sentences.size() != gold.sentences.size())
    throw EvalError("system has " + std::to_string(system.sentences.size()) +
                    " sentences, gold has " +
                    std::to_string(gold.sentences.size()));
  EvalCounts counts;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const Sentence& sys = system.sentences[i];
    const Sentence& ref = gold.sentences[i];
    if (sys.tokens.size() != ref.tokens.size())
      throw EvalError("sentence " + std::to_string(i + 1) + ": system has " +
                      std::to_string(sys.tokens.size()) + " tokens, gold has " +
                      std::to_string(ref.tokens.size()));
    for (size_t j = 0; j < ref.tokens.size(); ++j) {
      if (sys.tokens[j].form != ref.tokens[j].form)
        throw EvalError("sentence " + std::to_string(i + 1) + " token " +
                        std::to_string(j + 1) + ": form '" + sys.tokens[j].form +
                        "' does not match gold '" + ref.tokens[j].form + "'");
      counts.total_words += 1;
      if (sys.tokens[j].head == ref.tokens[j].head) {
        counts.correct_heads += 1;
        if (sys.tokens[j].deprel == ref.tokens[j].deprel)
          counts.correct_labeled += 1;
      }
    }
  }
  return counts;
}

EvalReport score(const Treebank& system, const Treebank& gold) {
  EvalReport report;
  report.counts = score_counts(system, gold);
  report.uas = pct(report.counts.correct_heads, report.counts.total_words);
  report.las = pct(report.counts.correct_labeled, report.counts.total_words);
  return report;
}

BenchmarkRun benchmark_parse(
    const std::function<std::pair<Treebank, double>()>& parse, int repetitions,
    long long basis_tokens) {
  if (repetitions < 2) throw EvalError("benchmark needs at least 2 repetitions");
  parse();  // warm-up, excluded

  BenchmarkRun run;
  std::vector<double> tps;
  double total_seconds = 0.0;
  for (int r = 0; r < repetitions; ++r) {
    auto [output, seconds] = parse();
    if (seconds <= 0.0) seconds = 1e-9;
    tps.push_back(static_cast<double>(basis_tokens) / seconds);
    total_seconds += seconds;
    if (r + 1 == repetitions) run.output = std::move(output);
  }
  double mean = 0.0;
  for (double v : tps) mean += v;
  mean /= tps.size();
  double var = 0.0;
  for (double v : tps) var += (v - mean) * (v - mean);
  var /= (tps.size() - 1);  // sample standard deviation

  run.timing.mean_tokens_per_sec = mean;
  run.timing.std_tokens_per_sec = std::sqrt(var);
  run.timing.mean_seconds = total_seconds / repetitions;
  run.timing.repetitions = repetitions;
  return run;
}

std::string render_table(std::vector<EvalReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const EvalReport& a, const EvalReport& b) {
                     const double ra = a.word_reduction_pct.value_or(-1.0);
                     const double rb = b.word_reduction_pct.value_or(-1.0);
                     return ra < rb;
                   });

  const std::vector<std::string> header = {"Setup",         "UAS (%)",
                                           "LAS (%)",       "Word Reduction (%)",
                                           "Tokens/Sec",    "Speed-up Factor"};
  std::vector<std::vector<std::string>> rows;
  for (const EvalReport& r : reports) {
    std::vector<std::string> row;
    row.push_back(r.setup.empty() ? "-" : r.setup);
    row.push_back(fixed(r.uas, 2));
    row.push_back(fixed(r.las, 2));
    row.push_back(r.word_reduction_pct ? fixed(*r.word_reduction_pct, 1) : "NA");
    if (r.timing) {
      row.push_back(std::to_string(std::llround(r.timing->mean_tokens_per_sec)) +
                    " +/- " +
                    std::to_string(std::llround(r.timing->std_tokens_per_sec)));
    } else {
      row.push_back("NA");
    }
    row.push_back(r.speedup ? fixed(*r.speedup, 2) + "x" : "NA");
    rows.push_back(std::move(row));
  }

  std::vector<size_t> width(header.size());
  for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows)
    for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      out << (c + 1 == row.size() ? "\n" : "  ");
    }
  };
  emit_row(header);
  for (size_t c = 0; c < header.size(); ++c) {
    out << std::string(width[c], '-') << (c + 1 == header.size() ? "\n" : "  ");
  }
  for (const auto& row : rows) emit_row(row);
  return out.str();
}

std::string report_to_json(const std::vector<EvalReport>& reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const EvalReport& r : reports) {
    nlohmann::ordered_json jr;
    jr["setup"] = r.setup;
    jr["uas"] = r.uas;
    jr["las"] = r.las;
    jr["counts"] = {{"total_words", r.counts.total_words},
                    {"correct_heads", r.counts.correct_heads},
                    {"correct_labeled", r.counts.correct_labeled}};
    if (r.word_reduction_pct) jr["word_reduction_pct"] = *r.word_reduction_pct;
    if (r.timing) {
      jr["tokens_per_sec"] = {{"mean", r.timing->mean_tokens_per_sec},
                              {"std", r.timing->std_tokens_per_sec},
                              {"mean_seconds", r.timing->mean_seconds},
                              {"repetitions", r.timing->repetitions}};
    }
    if (r.speedup) jr["speedup_factor"] = *r.speedup;
    if (r.overhead_seconds) jr["technique_overhead_seconds"] = *r.overhead_seconds;
    doc.push_back(std::move(jr));
  }
  return doc.dump(2);
}

}  // namespace treeduce

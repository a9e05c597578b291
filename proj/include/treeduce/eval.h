#ifndef TREEDUCE_EVAL_H
#define TREEDUCE_EVAL_H

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeduce/conllu.h"

namespace treeduce {

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EvalCounts {
  long long total_words = 0;
  long long correct_heads = 0;
  long long correct_labeled = 0;
};

struct Timing {
  double mean_tokens_per_sec = 0.0;
  double std_tokens_per_sec = 0.0;
  double mean_seconds = 0.0;
  int repetitions = 0;
};

struct EvalReport {
  std::string setup;  // row label, e.g. "baseline" or "2,3:83-83"
  double uas = 0.0;
  double las = 0.0;
  EvalCounts counts;
  std::optional<double> word_reduction_pct;
  std::optional<Timing> timing;
  std::optional<double> speedup;  // vs the named baseline row
  // Reduction + reattachment wall time. Parser timings exclude it; this
  // diagnostic lets users confirm the bookkeeping stays negligible.
  std::optional<double> overhead_seconds;
};

// Attachment scores over all syntactic words, punctuation included.
// Throws EvalError naming the first divergent sentence/token.
EvalCounts score_counts(const Treebank& system, const Treebank& gold);
EvalReport score(const Treebank& system, const Treebank& gold);

// Runs `parse` once for warm-up and then `repetitions` timed passes.
// Tokens/sec is computed against `basis_tokens` (callers choose the
// original or the reduced token count). The last output is returned.
struct BenchmarkRun {
  Timing timing;
  Treebank output;
};
BenchmarkRun benchmark_parse(
    const std::function<std::pair<Treebank, double>()>& parse, int repetitions,
    long long basis_tokens);

// Text table with the comparison columns: Setup, UAS, LAS, Word Reduction,
// Tokens/Sec, Speed-up Factor. Rows are ordered by reduction ascending with
// baselines (no reduction) first.
std::string render_table(std::vector<EvalReport> reports);

std::string report_to_json(const std::vector<EvalReport>& reports);

}  // namespace treeduce

#endif  // TREEDUCE_EVAL_H

#ifndef TREEDUCE_PARSER_H
#define TREEDUCE_PARSER_H

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treeduce/conllu.h"

namespace treeduce {

class ParserError : public std::runtime_error {
 public:
  explicit ParserError(const std::string& msg) : std::runtime_error(msg) {}
};

// Greedy arc-eager model with averaged-perceptron weights. Weights are kept
// sparse: a feature maps to the (action, weight) pairs that ever received an
// update. Inference is deterministic for fixed weights.
struct BaselineModel {
  std::vector<std::string> labels;  // sorted deprel inventory
  std::unordered_map<std::string, std::vector<std::pair<int, float>>> weights;
  int epochs = 0;
  unsigned seed = 0;

  // 0 = shift, 1 = reduce, then a left/right pair per label.
  int num_actions() const { return 2 + 2 * static_cast<int>(labels.size()); }
  bool operator==(const BaselineModel&) const = default;
};

// Averaged perceptron over the static arc-eager oracle. Non-projective
// sentences are projectivized by repeated arc lifting first. Deterministic
// for a fixed seed.
BaselineModel train_baseline(const Treebank& treebank, int epochs, unsigned seed);

// Parses every sentence; output keeps forms and tags and replaces
// head/deprel with predictions (always a projective single-rooted tree).
// The returned seconds cover inference only.
std::pair<Treebank, double> parse_baseline(const BaselineModel& model,
                                           const Treebank& input);

// In-place arc lifting: replaces each shortest non-projective arc's head by
// its grandparent until the tree is projective.
void projectivize(Sentence& sent);

void save_model(const BaselineModel& model, const std::string& path);
BaselineModel load_model(const std::string& path);

}  // namespace treeduce

#endif  // TREEDUCE_PARSER_H

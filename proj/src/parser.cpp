#include "treeduce/parser.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "treeduce/pattern.h"

#include "json.hpp"

namespace treeduce {

namespace {

using json = nlohmann::ordered_json;

constexpr int kModelVersion = 1;
constexpr int kShift = 0;
constexpr int kReduce = 1;

int left_action(int label) { return 2 + 2 * label; }
int right_action(int label) { return 3 + 2 * label; }
bool is_left(int action) { return action >= 2 && action % 2 == 0; }
int action_label(int action) { return (action - 2) / 2; }

// Parser configuration over one sentence. Token 0 is the artificial root.
struct Config {
  std::vector<int> stack;   // bottom..top, starts as {0}
  size_t buffer = 1;        // next input position
  std::vector<int> head;    // assigned heads, 0-based over 1..n, -1 = none
  std::vector<int> label;   // label ids, -1 = none
  std::vector<int> leftmost_child;
  std::vector<int> rightmost_child;
  int n = 0;

  explicit Config(int len)
      : stack{0},
        head(len + 1, -1),
        label(len + 1, -1),
        leftmost_child(len + 1, 0),
        rightmost_child(len + 1, 0),
        n(len) {}

  bool done() const { return buffer > static_cast<size_t>(n); }
  int top() const { return stack.back(); }
  int front() const { return static_cast<int>(buffer); }

  void add_arc(int h, int d, int l) {
    head[d] = h;
    label[d] = l;
    if (h >= 0 && h <= n) {
      if (leftmost_child[h] == 0 || d < leftmost_child[h]) leftmost_child[h] = d;
      if (d > rightmost_child[h]) rightmost_child[h] = d;
    }
  }

  void apply(int action, int root_assigned_to) {
    (void)root_assigned_to;
    if (action == kShift) {
      stack.push_back(front());
      ++buffer;
    } else if (action == kReduce) {
      stack.pop_back();
    } else if (is_left(action)) {
      add_arc(front(), top(), action_label(action));
      stack.pop_back();
    } else {
      add_arc(top(), front(), action_label(action));
      stack.push_back(front());
      ++buffer;
    }
  }
};

struct ActionRules {
  int num_actions;
  // Fills `valid` (true per permitted action). `has_root` blocks a second
  // attachment to the artificial root.
  void valid_actions(const Config& c, bool has_root, std::vector<bool>& valid) const {
    std::fill(valid.begin(), valid.end(), false);
    if (c.done()) return;
    valid[kShift] = true;
    const int s = c.top();
    if (s != 0 && c.head[s] >= 0) valid[kReduce] = true;
    for (int a = 2; a < num_actions; ++a) {
      if (is_left(a)) {
        valid[a] = s != 0 && c.head[s] < 0;
      } else {
        valid[a] = s != 0 || !has_root;
      }
    }
  }
};

const std::string kNil = "<NIL>";
const std::string kRoot = "<ROOT>";

struct FeatureContext {
  const Sentence* sent;
  const Config* config;

  const std::string& form(int i) const {
    if (i == 0) return kRoot;
    if (i < 0 || i > config->n) return kNil;
    return sent->tokens[i - 1].form;
  }
  const std::string& tag(int i) const {
    if (i == 0) return kRoot;
    if (i < 0 || i > config->n) return kNil;
    return sent->tokens[i - 1].upos;
  }
  const std::string& child_tag(int i) const {
    return i <= 0 ? kNil : tag(i);
  }
};

// Fixed feature order keeps score accumulation reproducible.
void extract_features(const FeatureContext& ctx, std::vector<std::string>& feats) {
  feats.clear();
  const Config& c = *ctx.config;
  const int s0 = c.top();
  const int s1 = c.stack.size() >= 2 ? c.stack[c.stack.size() - 2] : -1;
  const int b0 = c.done() ? -1 : c.front();
  const int b1 = b0 >= 0 && b0 + 1 <= c.n ? b0 + 1 : -1;

  const std::string& s0p = ctx.tag(s0);
  const std::string& s0f = ctx.form(s0);
  const std::string& b0p = ctx.tag(b0);
  const std::string& b0f = ctx.form(b0);
  const std::string& b1p = ctx.tag(b1);
  const std::string& s1p = ctx.tag(s1);

  feats.push_back("s0p=" + s0p);
  feats.push_back("s0f=" + s0f);
  feats.push_back("s0fp=" + s0f + '|' + s0p);
  feats.push_back("b0p=" + b0p);
  feats.push_back("b0f=" + b0f);
  feats.push_back("b0fp=" + b0f + '|' + b0p);
  feats.push_back("b1p=" + b1p);
  feats.push_back("b1f=" + ctx.form(b1));
  feats.push_back("s1p=" + s1p);
  feats.push_back("s0pb0p=" + s0p + '|' + b0p);
  feats.push_back("s0fb0f=" + s0f + '|' + b0f);
  feats.push_back("s0pb0f=" + s0p + '|' + b0f);
  feats.push_back("s0fb0p=" + s0f + '|' + b0p);
  feats.push_back("s1ps0pb0p=" + s1p + '|' + s0p + '|' + b0p);
  feats.push_back("s0pb0pb1p=" + s0p + '|' + b0p + '|' + b1p);
  const int s0l = s0 >= 0 && s0 <= c.n ? c.leftmost_child[s0] : 0;
  const int s0r = s0 >= 0 && s0 <= c.n ? c.rightmost_child[s0] : 0;
  const int b0l = b0 >= 1 && b0 <= c.n ? c.leftmost_child[b0] : 0;
  feats.push_back("s0lp=" + ctx.child_tag(s0l));
  feats.push_back("s0rp=" + ctx.child_tag(s0r));
  feats.push_back("b0lp=" + ctx.child_tag(b0l));
  if (s0 >= 0 && b0 >= 1) {
    const int dist = std::min(b0 - s0, 6);
    feats.push_back("d=" + std::to_string(dist));
    feats.push_back("s0pd=" + s0p + '|' + std::to_string(dist));
  }
}

// Assigns heads to whatever the derivation left unattached: the first
// headless token becomes the root unless one exists, everything else hangs
// off the root token.
void attach_stragglers(Config& c, int root_label, int dep_label) {
  int root_token = 0;
  for (int i = 1; i <= c.n; ++i)
    if (c.head[i] == 0) root_token = i;
  for (int i = 1; i <= c.n; ++i) {
    if (c.head[i] >= 0) continue;
    if (root_token == 0) {
      c.head[i] = 0;
      c.label[i] = root_label;
      root_token = i;
    } else {
      c.head[i] = root_token;
      c.label[i] = dep_label;
    }
  }
}

struct LabelInventory {
  std::vector<std::string> labels;
  std::map<std::string, int> index;

  int id(const std::string& l) const {
    auto it = index.find(l);
    return it == index.end() ? -1 : it->second;
  }
};

LabelInventory collect_labels(const Treebank& tb) {
  std::set<std::string> seen;
  for (const Sentence& s : tb.sentences) {
    if (s.unsupported) continue;
    for (const Token& t : s.tokens)
      if (t.has_head()) seen.insert(t.deprel);
  }
  seen.insert("root");
  seen.insert("dep");
  LabelInventory inv;
  inv.labels.assign(seen.begin(), seen.end());
  for (size_t i = 0; i < inv.labels.size(); ++i) inv.index[inv.labels[i]] = static_cast<int>(i);
  return inv;
}

// Static oracle for a projective gold tree.
int oracle_action(const Config& c, const Sentence& gold,
                  const LabelInventory& inv) {
  const int s = c.top();
  const int b = c.front();
  const auto gold_head = [&](int i) { return gold.tokens[i - 1].head; };
  const auto gold_label = [&](int i) { return inv.id(gold.tokens[i - 1].deprel); };

  if (s != 0 && gold_head(s) == b) return left_action(gold_label(s));
  if (gold_head(b) == s) return right_action(gold_label(b));
  if (s != 0 && c.head[s] >= 0) {
    for (size_t k = 0; k + 1 < c.stack.size(); ++k) {
      const int below = c.stack[k];
      if (gold_head(b) == below) return kReduce;
      if (below != 0 && gold_head(below) == b) return kReduce;
    }
  }
  return kShift;
}

struct TrainEntry {
  int action;
  double w = 0.0;
  double total = 0.0;
  long long ts = 0;
};

using TrainWeights =
    std::unordered_map<std::string, std::vector<TrainEntry>>;

void update_weight(TrainWeights& weights, const std::string& feat, int action,
                   double delta, long long t) {
  auto& row = weights[feat];
  for (TrainEntry& e : row) {
    if (e.action == action) {
      e.total += e.w * static_cast<double>(t - e.ts);
      e.w += delta;
      e.ts = t;
      return;
    }
  }
  row.push_back(TrainEntry{action, delta, 0.0, t});
}

void score_actions(const BaselineModel& model,
                   const std::vector<std::string>& feats,
                   std::vector<double>& scores) {
  std::fill(scores.begin(), scores.end(), 0.0);
  for (const std::string& f : feats) {
    auto it = model.weights.find(f);
    if (it == model.weights.end()) continue;
    for (const auto& [action, w] : it->second) scores[action] += w;
  }
}

void score_actions_train(const TrainWeights& weights,
                         const std::vector<std::string>& feats,
                         std::vector<double>& scores) {
  std::fill(scores.begin(), scores.end(), 0.0);
  for (const std::string& f : feats) {
    auto it = weights.find(f);
    if (it == weights.end()) continue;
    for (const TrainEntry& e : it->second) scores[e.action] += e.w;
  }
}

int best_valid(const std::vector<double>& scores, const std::vector<bool>& valid) {
  int best = -1;
  for (size_t a = 0; a < scores.size(); ++a) {
    if (!valid[a]) continue;
    if (best < 0 || scores[a] > scores[best]) best = static_cast<int>(a);
  }
  return best;
}

bool has_root_arc(const Config& c) {
  for (int i = 1; i <= c.n; ++i)
    if (c.head[i] == 0) return true;
  return false;
}

}  // namespace

void projectivize(Sentence& sent) {
  const int n = static_cast<int>(sent.tokens.size());
  if (n == 0) return;
  std::vector<int> heads(n);
  for (int i = 0; i < n; ++i) heads[i] = sent.tokens[i].head;

  auto is_descendant_of = [&](int node, int ancestor) {
    int cur = node;
    int steps = 0;
    while (cur != 0) {
      if (cur == ancestor) return true;
      cur = heads[cur - 1];
      if (++steps > n) return false;
    }
    return false;
  };

  while (!is_projective_tree(heads)) {
    // Lift the shortest offending arc (leftmost dependent on ties).
    int best_d = -1;
    int best_len = n + 1;
    for (int d = 1; d <= n; ++d) {
      const int h = heads[d - 1];
      if (h == 0) continue;
      const int lo = std::min(h, d);
      const int hi = std::max(h, d);
      bool bad = false;
      for (int k = lo + 1; k < hi && !bad; ++k)
        if (!is_descendant_of(k, h)) bad = true;
      if (bad && hi - lo < best_len) {
        best_len = hi - lo;
        best_d = d;
      }
    }
    if (best_d < 0) break;  // cannot happen for tree input
    heads[best_d - 1] = heads[heads[best_d - 1] - 1];
  }
  for (int i = 0; i < n; ++i) sent.tokens[i].head = heads[i];
}

BaselineModel train_baseline(const Treebank& treebank, int epochs, unsigned seed) {
  if (treebank.word_count() == 0)
    throw ParserError("cannot train on an empty treebank");
  if (epochs < 0) throw ParserError("epochs must be >= 0");
  validate_gold_trees(treebank);

  // Projectivized training copies; the oracle is static and projective-only.
  std::vector<Sentence> data;
  for (const Sentence& s : treebank.sentences) {
    if (s.unsupported || s.tokens.empty()) continue;
    Sentence copy = s;
    projectivize(copy);
    data.push_back(std::move(copy));
  }

  const LabelInventory inv = collect_labels(treebank);
  BaselineModel model;
  model.labels = inv.labels;
  model.epochs = epochs;
  model.seed = seed;
  const int num_actions = model.num_actions();

  TrainWeights weights;
  std::vector<double> scores(num_actions);
  std::vector<bool> valid(num_actions);
  std::vector<std::string> feats;
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(seed);
  long long t = 1;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t si : order) {
      const Sentence& sent = data[si];
      Config c(static_cast<int>(sent.tokens.size()));
      FeatureContext ctx{&sent, &c};
      ActionRules rules{num_actions};
      while (!c.done()) {
        rules.valid_actions(c, has_root_arc(c), valid);
        const int gold = oracle_action(c, sent, inv);
        extract_features(ctx, feats);
        score_actions_train(weights, feats, scores);
        const int pred = best_valid(scores, valid);
        if (pred != gold) {
          for (const std::string& f : feats) {
            update_weight(weights, f, gold, +1.0, t);
            update_weight(weights, f, pred, -1.0, t);
          }
        }
        c.apply(gold, 0);
        ++t;
      }
    }
  }

  // Averaged weights.
  for (auto& [feat, row] : weights) {
    std::vector<std::pair<int, float>> averaged;
    for (TrainEntry& e : row) {
      e.total += e.w * static_cast<double>(t - e.ts);
      const double avg = e.total / static_cast<double>(t);
      if (avg != 0.0) averaged.emplace_back(e.action, static_cast<float>(avg));
    }
    if (!averaged.empty()) {
      std::sort(averaged.begin(), averaged.end());
      model.weights.emplace(feat, std::move(averaged));
    }
  }
  return model;
}

std::pair<Treebank, double> parse_baseline(const BaselineModel& model,
                                           const Treebank& input) {
  const int num_actions = model.num_actions();
  int root_label = 0, dep_label = 0;
  for (size_t i = 0; i < model.labels.size(); ++i) {
    if (model.labels[i] == "root") root_label = static_cast<int>(i);
    if (model.labels[i] == "dep") dep_label = static_cast<int>(i);
  }

  Treebank out = input;
  std::vector<double> scores(num_actions);
  std::vector<bool> valid(num_actions);
  std::vector<std::string> feats;
  ActionRules rules{num_actions};

  const auto start = std::chrono::steady_clock::now();
  for (Sentence& sent : out.sentences) {
    if (sent.tokens.empty() || sent.unsupported) continue;
    Config c(static_cast<int>(sent.tokens.size()));
    FeatureContext ctx{&sent, &c};
    bool has_root = false;
    while (!c.done()) {
      rules.valid_actions(c, has_root, valid);
      extract_features(ctx, feats);
      score_actions(model, feats, scores);
      const int action = best_valid(scores, valid);
      c.apply(action, 0);
      if (action >= 2 && !is_left(action) && c.head[c.top()] == 0) has_root = true;
    }
    attach_stragglers(c, root_label, dep_label);
    for (int i = 1; i <= c.n; ++i) {
      sent.tokens[i - 1].head = c.head[i];
      sent.tokens[i - 1].deprel =
          c.label[i] >= 0 ? model.labels[c.label[i]] : "dep";
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();
  return {std::move(out), seconds};
}

void save_model(const BaselineModel& model, const std::string& path) {
  json doc;
  doc["version"] = kModelVersion;
  doc["labels"] = model.labels;
  doc["epochs"] = model.epochs;
  doc["seed"] = model.seed;
  // Sorted feature order makes the file reproducible run to run.
  std::vector<const std::string*> feats;
  feats.reserve(model.weights.size());
  for (const auto& [f, _] : model.weights) feats.push_back(&f);
  std::sort(feats.begin(), feats.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  json jw = json::object();
  for (const std::string* f : feats) {
    json row = json::array();
    for (const auto& [action, w] : model.weights.at(*f))
      row.push_back(json::array({action, w}));
    jw[*f] = std::move(row);
  }
  doc["weights"] = std::move(jw);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParserError("cannot open " + path + " for writing");
  out << doc.dump() << '\n';
  if (!out) throw ParserError("write failure on " + path);
}

BaselineModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParserError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParserError(path + ": malformed model: " + e.what());
  }
  if (!doc.contains("version") || doc["version"].get<int>() != kModelVersion)
    throw ParserError(path + ": unsupported model version (expected " +
                      std::to_string(kModelVersion) + ")");
  BaselineModel model;
  try {
    model.labels = doc.at("labels").get<std::vector<std::string>>();
    model.epochs = doc.at("epochs").get<int>();
    model.seed = doc.at("seed").get<unsigned>();
    for (const auto& [feat, row] : doc.at("weights").items()) {
      std::vector<std::pair<int, float>> entries;
      for (const json& e : row)
        entries.emplace_back(e.at(0).get<int>(), e.at(1).get<float>());
      model.weights.emplace(feat, std::move(entries));
    }
  } catch (const json::exception& e) {
    throw ParserError(path + ": malformed model: " + e.what());
  }
  return model;
}

}  // namespace treeduce

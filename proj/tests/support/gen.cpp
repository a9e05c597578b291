#include "support/gen.h"

#include <functional>
#include <stdexcept>

namespace treeduce::testing {

namespace {

const std::vector<std::string> kTagPool = {"DET", "NOUN", "VERB", "ADJ",
                                           "ADV", "ADP",  "PRON", "AUX"};
const std::vector<std::string> kLabelPool = {"nmod", "obl",  "conj",
                                             "case", "amod", "dep"};

int pick(std::mt19937& rng, int n) {
  return static_cast<int>(rng() % static_cast<unsigned>(n));
}

}  // namespace

Sentence make_sentence(const std::vector<std::string>& tags,
                       const std::vector<int>& heads,
                       const std::vector<std::string>& deprels,
                       const std::vector<std::string>& forms) {
  if (tags.size() != heads.size() || tags.size() != deprels.size())
    throw std::invalid_argument("make_sentence: length mismatch");
  Sentence sent;
  for (size_t i = 0; i < tags.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = i < forms.size() ? forms[i] : "w" + std::to_string(i + 1);
    t.lemma = t.form;
    t.upos = tags[i];
    t.xpos = "X" + tags[i];
    t.head = heads[i];
    t.deprel = deprels[i];
    sent.tokens.push_back(std::move(t));
  }
  return sent;
}

Treebank single_sentence(const Sentence& sent) {
  Treebank tb;
  tb.sentences.push_back(sent);
  return tb;
}

std::vector<int> random_projective_heads(std::mt19937& rng, int n) {
  std::vector<int> heads(n + 1, 0);
  // Recursive segment splitting keeps every subtree contiguous.
  std::function<int(int, int)> build = [&](int lo, int hi) -> int {
    const int root = lo + pick(rng, hi - lo + 1);
    int pos = root - 1;
    while (pos >= lo) {
      const int start = lo + pick(rng, pos - lo + 1);
      const int sub = build(start, pos);
      heads[sub] = root;
      pos = start - 1;
    }
    pos = root + 1;
    while (pos <= hi) {
      const int end = pos + pick(rng, hi - pos + 1);
      const int sub = build(pos, end);
      heads[sub] = root;
      pos = end + 1;
    }
    return root;
  };
  if (n > 0) heads[build(1, n)] = 0;
  return std::vector<int>(heads.begin() + 1, heads.end());
}

Sentence random_projective_sentence(std::mt19937& rng, int max_len,
                                    int alphabet_size) {
  const int n = 1 + pick(rng, max_len);
  std::vector<std::string> tags, deprels;
  for (int i = 0; i < n; ++i)
    tags.push_back(kTagPool[pick(rng, alphabet_size)]);
  const std::vector<int> heads = random_projective_heads(rng, n);
  for (int i = 0; i < n; ++i)
    deprels.push_back(heads[i] == 0 ? "root"
                                    : kLabelPool[pick(rng, kLabelPool.size())]);
  return make_sentence(tags, heads, deprels);
}

Treebank random_projective_treebank(std::mt19937& rng, int max_sentences,
                                    int max_len, int alphabet_size) {
  Treebank tb;
  const int count = 1 + pick(rng, max_sentences);
  for (int i = 0; i < count; ++i)
    tb.sentences.push_back(random_projective_sentence(rng, max_len, alphabet_size));
  return tb;
}

namespace {

Template make_template(std::vector<std::string> tags, const std::string& head,
                       const std::string& labels, double head_conf,
                       double label_conf, long long freq) {
  Template t;
  t.tags = std::move(tags);
  t.head_pattern = parse_head_pattern(head);
  t.label_pattern = parse_label_pattern(labels);
  t.head_confidence = head_conf;
  t.label_confidence = label_conf;
  t.frequency = freq;
  return t;
}

// Skeleton item kinds; the expanding kinds insert fragment dependents that
// are leaves, so every match the store finds agrees with gold.
enum class Item { NounDet, VerbAdv, VerbSconj, Noun, Verb, Adj, Adp };

}  // namespace

ConsistentFixtures consistent_fixtures() {
  ConsistentFixtures fx;
  fx.store.config.mode = MiningMode::BagOfRules;
  fx.store.config.tag_field = TagField::Upos;
  fx.store.templates.push_back(make_template({"DET", "NOUN"}, "1 - false",
                                             "det - false", 100.0, 100.0, 50));
  fx.store.templates.push_back(make_template({"ADV", "VERB"}, "1 - false",
                                             "advmod - false", 95.0, 90.0, 40));
  fx.store.templates.push_back(make_template({"SCONJ", "PROPN", "VERB"},
                                             "2 2 - false", "mark nsubj - false",
                                             100.0, 100.0, 30));
  return fx;
}

Sentence ConsistentFixtures::generate(std::mt19937& rng) {
  const int k = 2 + pick(rng, 5);  // skeleton length
  std::vector<Item> items;
  bool has_expansion = false;
  for (int i = 0; i < k; ++i) {
    const Item it = static_cast<Item>(pick(rng, 7));
    if (it == Item::NounDet || it == Item::VerbAdv || it == Item::VerbSconj)
      has_expansion = true;
    items.push_back(it);
  }
  if (!has_expansion) items[pick(rng, k)] = Item::NounDet;

  const std::vector<int> skel_heads = random_projective_heads(rng, k);

  // First pass: final position of each skeleton head word.
  std::vector<int> skel_pos(k + 1, 0);
  int next = 1;
  for (int i = 0; i < k; ++i) {
    switch (items[i]) {
      case Item::NounDet:
      case Item::VerbAdv:
        next += 1;  // one inserted dependent before the head word
        break;
      case Item::VerbSconj:
        next += 2;
        break;
      default:
        break;
    }
    skel_pos[i + 1] = next++;
  }
  const int n = next - 1;

  std::vector<std::string> tags(n), deprels(n);
  std::vector<int> heads(n);
  for (int i = 0; i < k; ++i) {
    const int pos = skel_pos[i + 1];
    const int head_final = skel_heads[i] == 0 ? 0 : skel_pos[skel_heads[i]];
    const std::string label =
        skel_heads[i] == 0 ? "root" : kLabelPool[pick(rng, kLabelPool.size())];
    auto put = [&](int p, const std::string& tag, int h, const std::string& d) {
      tags[p - 1] = tag;
      heads[p - 1] = h;
      deprels[p - 1] = d;
    };
    switch (items[i]) {
      case Item::NounDet:
        put(pos - 1, "DET", pos, "det");
        put(pos, "NOUN", head_final, label);
        break;
      case Item::VerbAdv:
        put(pos - 1, "ADV", pos, "advmod");
        put(pos, "VERB", head_final, label);
        break;
      case Item::VerbSconj:
        put(pos - 2, "SCONJ", pos, "mark");
        put(pos - 1, "PROPN", pos, "nsubj");
        put(pos, "VERB", head_final, label);
        break;
      case Item::Noun:
        put(pos, "NOUN", head_final, label);
        break;
      case Item::Verb:
        put(pos, "VERB", head_final, label);
        break;
      case Item::Adj:
        put(pos, "ADJ", head_final, label);
        break;
      case Item::Adp:
        put(pos, "ADP", head_final, label);
        break;
    }
  }
  return make_sentence(tags, heads, deprels);
}

Disagreement consistent_fixture_with_one_disagreement(std::mt19937& rng,
                                                      ConsistentFixtures& fx,
                                                      bool label_only) {
  while (true) {
    Sentence sent = fx.generate(rng);
    // Locate a DET NOUN occurrence to corrupt.
    int det_pos = 0;
    for (size_t i = 0; i + 1 < sent.tokens.size(); ++i) {
      if (sent.tokens[i].upos == "DET" && sent.tokens[i + 1].upos == "NOUN") {
        det_pos = static_cast<int>(i) + 1;
        break;
      }
    }
    if (det_pos == 0) continue;

    Disagreement out;
    out.disagreeing_pos = det_pos;
    out.label_only = label_only;
    if (label_only) {
      sent.tokens[det_pos - 1].deprel = "amod";
    } else {
      const int noun_pos = det_pos + 1;
      int new_head = sent.tokens[noun_pos - 1].head;  // the noun's own head
      if (new_head == 0) {
        new_head = 0;
        for (int p = 1; p <= static_cast<int>(sent.tokens.size()); ++p) {
          if (p == det_pos || p == noun_pos) continue;
          if (sent.tokens[p - 1].upos == "DET" || sent.tokens[p - 1].upos == "ADV" ||
              sent.tokens[p - 1].upos == "SCONJ" || sent.tokens[p - 1].upos == "PROPN")
            continue;  // keep the new head among surviving words
          new_head = p;
          break;
        }
        if (new_head == 0) continue;  // no usable target, try another sentence
      }
      sent.tokens[det_pos - 1].head = new_head;
    }
    out.sentence = std::move(sent);
    return out;
  }
}

}  // namespace treeduce::testing

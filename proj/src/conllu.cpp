#include "treeduce/conllu.h"

#include <fstream>
#include <iostream>
#include <sstream>

namespace treeduce {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool is_all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

[[noreturn]] void fail(size_t line_no, const std::string& what) {
  throw ConlluError("line " + std::to_string(line_no) + ": " + what);
}

void check_sentence(const Sentence& sent, size_t ordinal, size_t line_no,
                    const ReadOptions& opts) {
  const int n = static_cast<int>(sent.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = sent.tokens[i];
    if (t.id != i + 1)
      fail(line_no, "sentence " + std::to_string(ordinal) +
                        ": token ids not consecutive (expected " +
                        std::to_string(i + 1) + ", got " + std::to_string(t.id) + ")");
    if (t.head == t.id)
      fail(line_no, "sentence " + std::to_string(ordinal) + ": token " +
                        std::to_string(t.id) + " is its own head");
    if (t.head > n)
      fail(line_no, "sentence " + std::to_string(ordinal) + ": token " +
                        std::to_string(t.id) + " head " + std::to_string(t.head) +
                        " out of range");
  }
  if (opts.require_gold_trees && !sent.unsupported && n > 0) {
    if (!is_single_rooted_tree(sent))
      throw ConlluError("sentence " + std::to_string(ordinal) +
                        " (near line " + std::to_string(line_no) +
                        "): annotations are not a single-rooted tree");
  }
}

}  // namespace

size_t Treebank::word_count() const {
  size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

bool is_single_rooted_tree(const Sentence& sent) {
  const int n = static_cast<int>(sent.tokens.size());
  int roots = 0;
  for (const Token& t : sent.tokens) {
    if (!t.has_head() || t.head > n || t.head == t.id) return false;
    if (t.head == 0) ++roots;
  }
  if (roots != 1) return false;
  // Every token must reach 0 without revisiting.
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    int steps = 0;
    while (cur != 0) {
      cur = sent.tokens[cur - 1].head;
      if (++steps > n) return false;  // cycle
    }
  }
  return true;
}

Treebank read_conllu(std::istream& in, const ReadOptions& opts) {
  Treebank tb;
  Sentence cur;
  bool in_sentence = false;
  size_t line_no = 0;
  size_t sent_start_line = 1;

  auto flush = [&]() {
    if (!in_sentence) return;
    check_sentence(cur, tb.sentences.size() + 1, sent_start_line, opts);
    if (!cur.unsupported) cur.raw_lines.clear();  // only needed for pass-through
    tb.sentences.push_back(std::move(cur));
    cur = Sentence();
    in_sentence = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (line.empty()) {
      flush();
      continue;
    }
    if (!in_sentence) {
      in_sentence = true;
      sent_start_line = line_no;
    }
    cur.raw_lines.push_back(line);

    if (line[0] == '#') {
      cur.comments.push_back(line);
      continue;
    }

    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 10)
      fail(line_no, "expected 10 tab-separated columns, got " +
                        std::to_string(cols.size()));

    const std::string& id_col = cols[0];
    if (id_col.find('.') != std::string::npos) {
      // Empty node (enhanced UD): flag and pass the sentence through verbatim.
      cur.unsupported = true;
      continue;
    }
    size_t dash = id_col.find('-');
    if (dash != std::string::npos) {
      MwtRange range;
      const std::string lo = id_col.substr(0, dash);
      const std::string hi = id_col.substr(dash + 1);
      if (!is_all_digits(lo) || !is_all_digits(hi))
        fail(line_no, "malformed multiword-token id '" + id_col + "'");
      range.start_id = std::stoi(lo);
      range.end_id = std::stoi(hi);
      range.rest = line.substr(id_col.size() + 1);
      cur.mwt_ranges.push_back(std::move(range));
      continue;
    }
    if (!is_all_digits(id_col)) fail(line_no, "malformed token id '" + id_col + "'");

    Token t;
    t.id = std::stoi(id_col);
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.xpos = cols[4];
    t.feats = cols[5];
    if (cols[6] == "_") {
      t.head = kNoHead;
    } else if (is_all_digits(cols[6])) {
      t.head = std::stoi(cols[6]);
    } else {
      fail(line_no, "malformed head '" + cols[6] + "'");
    }
    t.deprel = cols[7];
    t.deps = cols[8];
    t.misc = cols[9];
    cur.tokens.push_back(std::move(t));
  }
  flush();
  return tb;
}

Treebank read_conllu_file(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConlluError("cannot open " + path);
  try {
    return read_conllu(in, opts);
  } catch (const ConlluError& e) {
    throw ConlluError(path + ": " + e.what());
  }
}

void write_conllu(const Treebank& tb, std::ostream& out) {
  for (const Sentence& sent : tb.sentences) {
    if (sent.unsupported) {
      // Not modeled: emit exactly what was read.
      for (const auto& line : sent.raw_lines) out << line << '\n';
      out << '\n';
      continue;
    }
    for (const auto& c : sent.comments) out << c << '\n';
    size_t next_mwt = 0;
    for (const Token& t : sent.tokens) {
      while (next_mwt < sent.mwt_ranges.size() &&
             sent.mwt_ranges[next_mwt].start_id == t.id) {
        const MwtRange& r = sent.mwt_ranges[next_mwt];
        out << r.start_id << '-' << r.end_id << '\t' << r.rest << '\n';
        ++next_mwt;
      }
      out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t'
          << t.xpos << '\t' << t.feats << '\t';
      if (t.has_head())
        out << t.head;
      else
        out << '_';
      out << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc << '\n';
    }
    out << '\n';
  }
  if (!out) throw ConlluError("write failure");
}

void write_conllu_file(const Treebank& tb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConlluError("cannot open " + path + " for writing");
  write_conllu(tb, out);
  out.flush();
  if (!out) throw ConlluError("write failure on " + path);
}

void validate_gold_trees(const Treebank& tb) {
  for (size_t i = 0; i < tb.sentences.size(); ++i) {
    const Sentence& sent = tb.sentences[i];
    if (sent.unsupported || sent.tokens.empty()) continue;
    for (const Token& t : sent.tokens) {
      if (t.upos.empty())
        throw ConlluError("sentence " + std::to_string(i + 1) + ": token " +
                          std::to_string(t.id) + " has empty UPOS");
    }
    if (!is_single_rooted_tree(sent))
      throw ConlluError("sentence " + std::to_string(i + 1) +
                        ": annotations are not a single-rooted tree");
  }
}

}  // namespace treeduce

#include "treeduce/conllu.h"

#include <random>
#include <sstream>

#include "doctest.h"
#include "support/gen.h"

using namespace treeduce;

namespace {

const char* kTwoSentences =
    "# sent_id = 1\n"
    "# text = He ate it\n"
    "1\tHe\the\tPRON\tPRP\tCase=Nom\t2\tnsubj\t_\t_\n"
    "2\tate\teat\tVERB\tVBD\t_\t0\troot\t_\t_\n"
    "3\tit\tit\tPRON\tPRP\t_\t2\tobj\t_\tSpaceAfter=No\n"
    "\n"
    "# sent_id = 2\n"
    "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_\n"
    "2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_\n"
    "3\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST_CASE("reads sentences, comments and multiword ranges") {
  std::istringstream in(kTwoSentences);
  Treebank tb = read_conllu(in);
  REQUIRE(tb.sentences.size() == 2);
  CHECK(tb.word_count() == 6);

  const Sentence& s1 = tb.sentences[0];
  REQUIRE(s1.tokens.size() == 3);
  CHECK(s1.comments.size() == 2);
  CHECK(s1.comments[1] == "# text = He ate it");
  CHECK(s1.tokens[0].form == "He");
  CHECK(s1.tokens[0].head == 2);
  CHECK(s1.tokens[1].head == 0);
  CHECK(s1.tokens[2].misc == "SpaceAfter=No");
  CHECK(s1.tokens[0].feats == "Case=Nom");

  const Sentence& s2 = tb.sentences[1];
  REQUIRE(s2.mwt_ranges.size() == 1);
  CHECK(s2.mwt_ranges[0].start_id == 1);
  CHECK(s2.mwt_ranges[0].end_id == 2);
  CHECK(s2.tokens.size() == 3);
}

TEST_CASE("round-trips byte-identically") {
  std::istringstream in(kTwoSentences);
  Treebank tb = read_conllu(in);
  std::ostringstream out;
  write_conllu(tb, out);
  CHECK(out.str() == kTwoSentences);

  std::istringstream in2(out.str());
  Treebank tb2 = read_conllu(in2);
  CHECK(tb2 == tb);
}

TEST_CASE("empty input gives an empty treebank") {
  std::istringstream in("");
  Treebank tb = read_conllu(in);
  CHECK(tb.sentences.empty());
  CHECK(tb.word_count() == 0);
  std::ostringstream out;
  write_conllu(tb, out);
  CHECK(out.str().empty());
}

TEST_CASE("wrong column count reports the line number") {
  std::istringstream in("1\tword\tlemma\n");
  CHECK_THROWS_WITH_AS(read_conllu(in), doctest::Contains("line 1"), ConlluError);

  std::istringstream in2(
      "1\tok\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "2\tbad\t_\tNOUN\t_\t_\t1\n");
  CHECK_THROWS_WITH_AS(read_conllu(in2), doctest::Contains("line 2"), ConlluError);
}

TEST_CASE("empty nodes flag the sentence as unsupported and pass through") {
  const std::string text =
      "1\tSue\tSue\tPROPN\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tleft\tleave\tVERB\t_\t_\t0\troot\t_\t_\n"
      "2.1\tquit\tquit\tVERB\t_\t_\t_\t_\t_\t_\n"
      "3\tearly\tearly\tADV\t_\t_\t2\tadvmod\t_\t_\n"
      "\n";
  std::istringstream in(text);
  Treebank tb = read_conllu(in);
  REQUIRE(tb.sentences.size() == 1);
  CHECK(tb.sentences[0].unsupported);
  CHECK(tb.sentences[0].tokens.size() == 3);  // empty node not a token
  std::ostringstream out;
  write_conllu(tb, out);
  CHECK(out.str() == text);
}

TEST_CASE("gold validation rejects cycles and multiple roots") {
  // 1 -> 2 -> 1 cycle
  std::istringstream cyc(
      "1\ta\t_\tNOUN\t_\t_\t2\tdep\t_\t_\n"
      "2\tb\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n"
      "\n");
  Treebank bad = read_conllu(cyc);
  CHECK_THROWS_WITH_AS(validate_gold_trees(bad), doctest::Contains("sentence 1"),
                       ConlluError);

  std::istringstream multi(
      "1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "\n");
  Treebank bad2 = read_conllu(multi);
  CHECK_THROWS_AS(validate_gold_trees(bad2), ConlluError);

  ReadOptions opts;
  opts.require_gold_trees = true;
  std::istringstream multi2(
      "1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "2\tb\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "\n");
  CHECK_THROWS_AS(read_conllu(multi2, opts), ConlluError);
}

TEST_CASE("self-headed and out-of-range heads are rejected") {
  std::istringstream self(
      "1\ta\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n\n");
  CHECK_THROWS_WITH_AS(read_conllu(self), doctest::Contains("own head"),
                       ConlluError);

  std::istringstream range(
      "1\ta\t_\tNOUN\t_\t_\t9\tdep\t_\t_\n\n");
  CHECK_THROWS_WITH_AS(read_conllu(range), doctest::Contains("out of range"),
                       ConlluError);
}

TEST_CASE("non-consecutive ids are rejected") {
  std::istringstream in(
      "1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "3\tb\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n"
      "\n");
  CHECK_THROWS_WITH_AS(read_conllu(in), doctest::Contains("consecutive"),
                       ConlluError);
}

TEST_CASE("carriage returns are tolerated") {
  std::istringstream in("1\ta\t_\tNOUN\t_\t_\t0\troot\t_\t_\r\n\r\n");
  Treebank tb = read_conllu(in);
  REQUIRE(tb.sentences.size() == 1);
  CHECK(tb.sentences[0].tokens[0].form == "a");
}

TEST_CASE("unannotated heads survive a round trip") {
  const std::string text = "1\tword\t_\tNOUN\t_\t_\t_\t_\t_\t_\n\n";
  std::istringstream in(text);
  Treebank tb = read_conllu(in);
  CHECK(!tb.sentences[0].tokens[0].has_head());
  std::ostringstream out;
  write_conllu(tb, out);
  CHECK(out.str() == text);
}

TEST_CASE("random treebanks round-trip as values and as bytes") {
  std::mt19937 rng(20250809);
  for (int round = 0; round < 50; ++round) {
    Treebank tb = testing::random_projective_treebank(rng, 12, 10, 6);
    std::ostringstream first;
    write_conllu(tb, first);
    std::istringstream back(first.str());
    Treebank reread = read_conllu(back);
    CHECK(reread == tb);
    std::ostringstream second;
    write_conllu(reread, second);
    CHECK(second.str() == first.str());
  }
}

TEST_CASE("file helpers report the path on failure") {
  CHECK_THROWS_WITH_AS(read_conllu_file("/nonexistent/x.conllu"),
                       doctest::Contains("/nonexistent/x.conllu"), ConlluError);
}

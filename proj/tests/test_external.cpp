#include "treeduce/external.h"

#include <random>

#include "doctest.h"
#include "support/gen.h"

using namespace treeduce;

namespace {

Treebank small_input() {
  std::mt19937 rng(321);
  Treebank tb = testing::random_projective_treebank(rng, 6, 8, 5);
  while (tb.sentences.size() < 3)
    tb.sentences.push_back(testing::random_projective_sentence(rng, 8, 5));
  return tb;
}

}  // namespace

TEST_CASE("an identity command echoes the input and reports wall time") {
  ExternalParserSpec spec;
  spec.command = "cp {input} {output}";
  Treebank input = small_input();
  auto [output, seconds] = run_external(spec, input);
  CHECK(output == input);
  CHECK(seconds > 0.0);
}

TEST_CASE("model placeholders are substituted") {
  // The "model" is itself a treebank file the command copies to the output.
  Treebank input = small_input();
  const std::string model_path = "/tmp/treeduce-ext-model.conllu";
  write_conllu_file(input, model_path);
  ExternalParserSpec spec;
  spec.command = "cp {model} {output}";
  spec.model_path = model_path;
  auto [output, _] = run_external(spec, input);
  CHECK(output == input);
}

TEST_CASE("sentence-count mismatches are alignment errors") {
  ExternalParserSpec spec;
  // One well-formed sentence regardless of the input size.
  spec.command =
      "printf '1\\tw1\\t_\\tNOUN\\t_\\t_\\t0\\troot\\t_\\t_\\n\\n' > {output}";
  CHECK_THROWS_WITH_AS(run_external(spec, small_input()),
                       doctest::Contains("misaligned"), ExternalError);
}

TEST_CASE("changed forms are alignment errors") {
  ExternalParserSpec spec;
  spec.command = "sed 's/\\tw1\\t/\\tZZ\\t/' {input} > {output}";
  CHECK_THROWS_WITH_AS(run_external(spec, small_input()),
                       doctest::Contains("misaligned"), ExternalError);
}

TEST_CASE("nonzero exits carry captured diagnostics") {
  ExternalParserSpec spec;
  spec.command = "echo something broke >&2; exit 3";
  CHECK_THROWS_WITH_AS(run_external(spec, small_input()),
                       doctest::Contains("something broke"), ExternalError);
}

TEST_CASE("garbage output is a bridge error") {
  ExternalParserSpec spec;
  spec.command = "echo not-conllu > {output}";
  CHECK_THROWS_WITH_AS(run_external(spec, small_input()),
                       doctest::Contains("unreadable"), ExternalError);
}

TEST_CASE("slow commands hit the timeout") {
  ExternalParserSpec spec;
  spec.command = "sleep 5";
  spec.timeout_seconds = 0.2;
  CHECK_THROWS_WITH_AS(run_external(spec, small_input()),
                       doctest::Contains("timed out"), ExternalError);
}

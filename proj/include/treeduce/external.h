#ifndef TREEDUCE_EXTERNAL_H
#define TREEDUCE_EXTERNAL_H

#include <string>
#include <utility>

#include "treeduce/conllu.h"

namespace treeduce {

class ExternalError : public std::runtime_error {
 public:
  explicit ExternalError(const std::string& msg) : std::runtime_error(msg) {}
};

// File contract for a third-party parser: the command reads {input}
// (CoNLL-U), writes {output} (CoNLL-U, same tokenization, head/deprel
// filled) and exits 0. {model} is substituted when given.
struct ExternalParserSpec {
  std::string command;  // e.g. "maltparser -m parse -i {input} -o {output}"
  std::string model_path;
  double timeout_seconds = 600.0;
  std::string working_dir;  // empty = inherit
};

// Runs the command over `input` via temporary files and returns the parsed
// treebank plus the subprocess wall time. Throws ExternalError on nonzero
// exit, timeout, or output misalignment, with captured diagnostics.
std::pair<Treebank, double> run_external(const ExternalParserSpec& spec,
                                         const Treebank& input);

}  // namespace treeduce

#endif  // TREEDUCE_EXTERNAL_H

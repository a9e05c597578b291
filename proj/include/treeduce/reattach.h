#ifndef TREEDUCE_REATTACH_H
#define TREEDUCE_REATTACH_H

#include <string>
#include <vector>

#include "treeduce/conllu.h"
#include "treeduce/reducer.h"

namespace treeduce {

class ReattachError : public std::runtime_error {
 public:
  explicit ReattachError(const std::string& msg) : std::runtime_error(msg) {}
};

// Splices the stored fragments back into a parse of the reduced input:
// tokens are reinserted at their original positions, predicted heads are
// remapped to original indices, and every removed word receives the head
// and label its template prescribes. The fragment head keeps whatever the
// parser assigned to it.
Treebank reattach(const Treebank& parsed_reduced,
                  const std::vector<SentenceReduction>& records);

}  // namespace treeduce

#endif  // TREEDUCE_REATTACH_H

#ifndef MORPHTAG_EVAL_HPP
#define MORPHTAG_EVAL_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "corpus.hpp"
#include "tag.hpp"

namespace mt {

enum class EvalMode { kStandard, kIntersected, kPos };

// The POS attribute is carried through scoring under this pseudo-name.
inline const std::string kPosAttribute = "POS";

struct EvalConfig {
  EvalMode mode = EvalMode::kStandard;
  std::set<std::string> shared_attribute_types;    // excludes POS
  std::set<AttributeValue> shared_attribute_values;  // includes POS=<value>
  std::set<std::string> target_pos_inventory;
  // When set, the macro average also covers shared attribute types that
  // never occur in gold or predictions (their F1 counts as 0).
  bool include_unobserved_shared = false;
};

struct AttributeScore {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::map<std::string, AttributeScore> per_attribute;
  double macro_f1 = 0.0;
  double pos_accuracy = 0.0;
  long long token_count = 0;
};

// Shared attribute sets from the two training corpora; mandatory before
// Standard/Intersected scoring.
EvalConfig derive_eval_config(EvalMode mode, const Corpus& source_train,
                              const Corpus& target_train);

// Fallback chain for predicted POS values absent from the target
// inventory: PROPN->NOUN; SYM->X; INTJ->X; then SYM->PUNCT and X->PUNCT;
// unchanged when nothing applies.
std::string standard_remap_pos(const std::string& predicted_pos,
                               const std::set<std::string>& target_pos_inventory);

// Keeps only attributes whose type is shared; POS untouched. Values are
// deliberately not filtered.
MorphTag standard_filter(const MorphTag& tag,
                         const std::set<std::string>& shared_types);

// Keeps only attribute-value pairs in the shared set; the POS survives as
// a value only when POS=<pos> is shared.
struct IntersectedTag {
  std::optional<std::string> pos;
  std::set<AttributeValue> features;
};
IntersectedTag intersected_filter(const MorphTag& tag,
                                  const std::set<AttributeValue>& shared_values);

// Scores predictions against gold, token for token. Predictions are read
// from the gold slot of `pred` (an annotated corpus of model output). POS
// remap applies to predictions in all modes.
EvalReport score(const Corpus& gold, const Corpus& pred,
                 const EvalConfig& config);

// Machine-readable report: one "attr<TAB>tp<TAB>fp<TAB>fn<TAB>P<TAB>R<TAB>F1"
// line per attribute (sorted), then MACRO_F1 and POS_ACC. Mode pos writes
// the accuracy line only.
void write_report(std::ostream& out, const EvalReport& report, EvalMode mode);
std::string format_report(const EvalReport& report, EvalMode mode);

}  // namespace mt

#endif

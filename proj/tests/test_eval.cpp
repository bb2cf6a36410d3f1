#include <sstream>

#include "doctest.h"
#include "eval.hpp"

using namespace mt;

namespace {

Token tok(const std::string& surface, MorphTag gold, MorphTag predicted) {
  Token t;
  t.surface = surface;
  t.gold = std::move(gold);
  t.predicted = std::move(predicted);
  return t;
}

MorphTag tag(const std::string& canonical) {
  return MorphTag::from_canonical(canonical);
}

// Predictions are read from the gold slot of the second corpus, matching
// the way tagged output files are re-read for scoring.
std::pair<Corpus, Corpus> corpora(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  Sentence gold_sent, pred_sent;
  int i = 0;
  for (const auto& [g, p] : pairs) {
    std::string surface = "w" + std::to_string(i++);
    gold_sent.tokens.push_back(tok(surface, tag(g), MorphTag()));
    pred_sent.tokens.push_back(tok(surface, tag(p), MorphTag()));
  }
  return {Corpus{gold_sent}, Corpus{pred_sent}};
}

}  // namespace

TEST_CASE("pos remap fallback chain") {
  std::set<std::string> with_noun = {"NOUN", "VERB", "PUNCT"};
  std::set<std::string> with_propn = {"NOUN", "PROPN"};
  std::set<std::string> with_x = {"NOUN", "X"};
  std::set<std::string> punct_only = {"NOUN", "PUNCT"};

  CHECK(standard_remap_pos("PROPN", with_noun) == "NOUN");
  CHECK(standard_remap_pos("PROPN", with_propn) == "PROPN");
  CHECK(standard_remap_pos("SYM", with_x) == "X");
  CHECK(standard_remap_pos("INTJ", with_x) == "X");
  CHECK(standard_remap_pos("SYM", punct_only) == "PUNCT");
  CHECK(standard_remap_pos("X", punct_only) == "PUNCT");
  CHECK(standard_remap_pos("INTJ", punct_only) == "PUNCT");
  CHECK(standard_remap_pos("VERB", punct_only) == "VERB");
  CHECK(standard_remap_pos("PROPN", {"VERB"}) == "PROPN");
}

TEST_CASE("filters") {
  MorphTag t = tag("NOUN|Case=Nom|Number=Sing");
  MorphTag filtered = standard_filter(t, {"Case"});
  CHECK(filtered.canonical() == "NOUN|Case=Nom");

  std::set<AttributeValue> shared = {{"Case", "Nom"}, {"POS", "VERB"}};
  IntersectedTag it = intersected_filter(t, shared);
  CHECK_FALSE(it.pos.has_value());  // POS=NOUN is not a shared value
  CHECK(it.features == std::set<AttributeValue>{{"Case", "Nom"}});

  IntersectedTag iv = intersected_filter(tag("VERB|Case=Acc"), shared);
  CHECK(iv.pos == "VERB");
  CHECK(iv.features.empty());
}

TEST_CASE("macro f1 0.75 fixture") {
  auto [gold, pred] = corpora({
      {"NOUN|Case=Nom", "NOUN|Case=Nom"},
      {"VERB|Case=Dat", "VERB|Case=Gen"},
  });
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case"};
  config.target_pos_inventory = {"NOUN", "VERB"};

  EvalReport report = score(gold, pred, config);
  CHECK(report.token_count == 2);
  CHECK(report.per_attribute.at("POS").f1 == doctest::Approx(1.0));
  const auto& c = report.per_attribute.at("Case");
  CHECK(c.tp == 1);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.f1 == doctest::Approx(0.5));
  CHECK(report.macro_f1 == doctest::Approx(0.75));
  CHECK(report.pos_accuracy == doctest::Approx(1.0));
}

TEST_CASE("perfect predictions score 1.0 everywhere") {
  auto [gold, pred] = corpora({
      {"NOUN|Case=Nom|Number=Sing", "NOUN|Case=Nom|Number=Sing"},
      {"VERB|Number=Plur", "VERB|Number=Plur"},
      {"PUNCT", "PUNCT"},
  });
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case", "Number"};
  config.target_pos_inventory = {"NOUN", "VERB", "PUNCT"};
  EvalReport report = score(gold, pred, config);
  CHECK(report.macro_f1 == doctest::Approx(1.0));
  CHECK(report.pos_accuracy == doctest::Approx(1.0));
}

TEST_CASE("value mismatch counts as both fp and fn") {
  auto [gold, pred] = corpora({{"NOUN|Case=Nom", "NOUN|Case=Acc"}});
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case"};
  config.target_pos_inventory = {"NOUN"};
  EvalReport report = score(gold, pred, config);
  const auto& c = report.per_attribute.at("Case");
  CHECK(c.tp == 0);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.f1 == doctest::Approx(0.0));
}

TEST_CASE("standard mode ignores non-shared types; remap applies") {
  auto [gold, pred] = corpora({
      // Gender is not shared: the gold Gender and the spurious predicted
      // Gender are both dropped. PROPN remaps to NOUN before POS scoring.
      {"NOUN|Case=Nom|Gender=Fem", "PROPN|Case=Nom|Gender=Masc"},
  });
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case"};
  config.target_pos_inventory = {"NOUN", "VERB"};
  EvalReport report = score(gold, pred, config);
  CHECK(report.per_attribute.count("Gender") == 0);
  CHECK(report.per_attribute.at("POS").tp == 1);
  CHECK(report.per_attribute.at("Case").tp == 1);
  CHECK(report.pos_accuracy == doctest::Approx(1.0));
  CHECK(report.macro_f1 == doctest::Approx(1.0));
}

TEST_CASE("intersected mode drops non-shared values including POS") {
  auto [gold, pred] = corpora({
      // Case=Dat is not a shared value: the gold side keeps nothing for
      // Case, the prediction's shared Case=Nom becomes a false positive.
      {"NOUN|Case=Dat", "VERB|Case=Nom"},
  });
  EvalConfig config;
  config.mode = EvalMode::kIntersected;
  config.shared_attribute_values = {{"Case", "Nom"}, {"POS", "NOUN"}};
  config.target_pos_inventory = {"NOUN", "VERB"};
  EvalReport report = score(gold, pred, config);
  // Gold contributes POS=NOUN (shared); the predicted VERB is dropped.
  CHECK(report.per_attribute.at("POS").fn == 1);
  CHECK(report.per_attribute.at("POS").fp == 0);
  CHECK(report.per_attribute.at("Case").fp == 1);
  CHECK(report.per_attribute.at("Case").fn == 0);
  CHECK(report.pos_accuracy == doctest::Approx(0.0));
}

TEST_CASE("shared sets derive from the two training corpora") {
  Sentence src, tgt;
  src.tokens.push_back(tok("a", tag("NOUN|Case=Nom|Gender=Fem"), MorphTag()));
  src.tokens.push_back(tok("b", tag("PROPN|Case=Acc"), MorphTag()));
  tgt.tokens.push_back(tok("c", tag("NOUN|Case=Nom|Number=Sing"), MorphTag()));
  tgt.tokens.push_back(tok("d", tag("VERB|Case=Dat"), MorphTag()));
  EvalConfig config =
      derive_eval_config(EvalMode::kStandard, Corpus{src}, Corpus{tgt});
  CHECK(config.shared_attribute_types == std::set<std::string>{"Case"});
  CHECK(config.shared_attribute_values ==
        std::set<AttributeValue>{{"Case", "Nom"}, {"POS", "NOUN"}});
  CHECK(config.target_pos_inventory ==
        std::set<std::string>{"NOUN", "VERB"});
}

TEST_CASE("macro average can include unobserved shared types") {
  auto [gold, pred] = corpora({{"NOUN", "NOUN"}});
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case"};
  config.target_pos_inventory = {"NOUN"};
  EvalReport without = score(gold, pred, config);
  CHECK(without.macro_f1 == doctest::Approx(1.0));
  config.include_unobserved_shared = true;
  EvalReport with = score(gold, pred, config);
  CHECK(with.per_attribute.at("Case").tp == 0);
  CHECK(with.macro_f1 == doctest::Approx(0.5));
}

TEST_CASE("report format is byte stable") {
  auto [gold, pred] = corpora({
      {"NOUN|Case=Nom", "NOUN|Case=Nom"},
      {"VERB|Case=Dat", "VERB|Case=Gen"},
  });
  EvalConfig config;
  config.mode = EvalMode::kStandard;
  config.shared_attribute_types = {"Case"};
  config.target_pos_inventory = {"NOUN", "VERB"};
  EvalReport report = score(gold, pred, config);
  std::string text = format_report(report, EvalMode::kStandard);
  CHECK(text ==
        "Case\t1\t1\t1\t0.500000\t0.500000\t0.500000\n"
        "POS\t2\t0\t0\t1.000000\t1.000000\t1.000000\n"
        "MACRO_F1\t0.750000\n"
        "POS_ACC\t1.000000\n");
  CHECK(format_report(report, EvalMode::kPos) == "POS_ACC\t1.000000\n");

  std::ostringstream out;
  write_report(out, report, EvalMode::kStandard);
  CHECK(out.str() == text);
}

TEST_CASE("token and sentence count mismatches are errors") {
  auto [gold, pred] = corpora({{"NOUN", "NOUN"}});
  Corpus short_pred = pred;
  short_pred[0].tokens.pop_back();
  CHECK_THROWS_AS(score(gold, short_pred, EvalConfig{}), DataError);
  Corpus no_sent;
  CHECK_THROWS_AS(score(gold, no_sent, EvalConfig{}), DataError);
}
